//! Partial-sum engines: Cesàro and logarithmic prefix sums, savings
//! profiles, Gauss sums and the Pólya expansion, twisted logarithmic sums
//! with their character-expansion identities, and Dirichlet approximation.
//!
//! Two summation paths exist. The fast path accumulates complex doubles with
//! compensation and is what scans use. The exact path ([`exact`]) counts
//! roots of unity in `Z[ζ_g]` and is what identity checks at small moduli
//! rely on.

mod approx;
pub mod exact;
mod gauss;
mod twisted;

use num_complex::Complex64;

pub use approx::{dirichlet_approx, Arc, RationalApprox};
pub use gauss::{gauss_sum, polya_expansion_error, polya_rhs, PolyaError};
pub use twisted::{
    gs_identity_check, gs_identity_sweep, orthogonality_twist_check, twisted_log_sum,
    twisted_log_sum_rational, IdentityCheck,
};

use crate::characters::DirichletCharacter;
use crate::error::{domain, Error, Result};
use crate::numeric::ComplexSum;

/// Above this length [`build_series`] refuses to materialise prefix
/// vectors; use [`build_series_streaming`].
pub const STREAMING_THRESHOLD: u64 = 100_000_000;

/// Relative slack under which two moduli count as tied when tracking maxima;
/// ties resolve to the smaller index.
const TIE_TOLERANCE: f64 = 1e-12;

/// A running maximum and the (smallest) index attaining it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremum {
    pub arg: u64,
    pub value: f64,
}

impl Extremum {
    fn empty() -> Self {
        Extremum {
            arg: 0,
            value: f64::NEG_INFINITY,
        }
    }

    #[inline]
    fn offer(&mut self, arg: u64, value: f64) {
        if self.value == f64::NEG_INFINITY
            || value > self.value + TIE_TOLERANCE * self.value.abs().max(1.0)
        {
            self.arg = arg;
            self.value = value;
        }
    }
}

/// Prefix sums `S(t) = Σ_{n≤t} χ(n)` and `L(N) = Σ_{n≤N} χ(n)/n` for
/// `0 ≤ t, N ≤ T` (index 0 holds the empty sum).
#[derive(Debug, Clone)]
pub struct SumSeries {
    pub character: DirichletCharacter,
    pub limit: u64,
    pub cesaro: Vec<Complex64>,
    pub logsum: Vec<Complex64>,
    pub cesaro_max: Extremum,
    pub log_max: Extremum,
}

impl SumSeries {
    pub fn s(&self, t: u64) -> Complex64 {
        self.cesaro[t as usize]
    }

    pub fn log(&self, n: u64) -> Complex64 {
        self.logsum[n as usize]
    }
}

/// Running maxima only, for lengths where prefix vectors do not fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesMaxima {
    pub limit: u64,
    pub cesaro_max: Extremum,
    pub log_max: Extremum,
    pub final_cesaro: Complex64,
    pub final_log: Complex64,
}

pub fn build_series(chi: &DirichletCharacter, limit: u64) -> Result<SumSeries> {
    if limit > STREAMING_THRESHOLD {
        return Err(Error::Resource(format!(
            "series length {limit} exceeds {STREAMING_THRESHOLD}; use the streaming builder"
        )));
    }
    let q = chi.modulus();
    let values = chi.complex_values();
    let period = limit.min(q);
    let mut cesaro = Vec::with_capacity(limit as usize + 1);
    let mut logsum = Vec::with_capacity(limit as usize + 1);
    cesaro.push(Complex64::new(0.0, 0.0));
    logsum.push(Complex64::new(0.0, 0.0));

    let mut acc = ComplexSum::default();
    for n in 1..=period {
        acc.add(values[(n % q) as usize]);
        cesaro.push(acc.value());
    }
    // S(kq + r) = k S(q) + S(r); S(q) vanishes identically off the
    // principal character, so the continuation repeats the first period.
    let full = if chi.is_principal() {
        cesaro[period as usize]
    } else {
        Complex64::new(0.0, 0.0)
    };
    for t in period + 1..=limit {
        let k = (t / q) as f64;
        let r = (t % q) as usize;
        cesaro.push(full * k + cesaro[r]);
    }
    let mut lacc = ComplexSum::default();
    for n in 1..=limit {
        lacc.add(values[(n % q) as usize] / n as f64);
        logsum.push(lacc.value());
    }

    let mut cesaro_max = Extremum::empty();
    let mut log_max = Extremum::empty();
    for t in 1..=limit {
        cesaro_max.offer(t, cesaro[t as usize].norm());
        log_max.offer(t, logsum[t as usize].norm());
    }
    Ok(SumSeries {
        character: chi.clone(),
        limit,
        cesaro,
        logsum,
        cesaro_max,
        log_max,
    })
}

/// One pass to `limit` keeping only the maxima.
pub fn build_series_streaming(chi: &DirichletCharacter, limit: u64) -> SeriesMaxima {
    let q = chi.modulus();
    let values = chi.complex_values();
    let mut acc = ComplexSum::default();
    let mut lacc = ComplexSum::default();
    let mut cesaro_max = Extremum::empty();
    let mut log_max = Extremum::empty();
    for n in 1..=limit {
        let v = values[(n % q) as usize];
        acc.add(v);
        lacc.add(v / n as f64);
        cesaro_max.offer(n, acc.value().norm());
        log_max.offer(n, lacc.value().norm());
    }
    SeriesMaxima {
        limit,
        cesaro_max,
        log_max,
        final_cesaro: acc.value(),
        final_log: lacc.value(),
    }
}

/// How far `χ` is from the Pólya–Vinogradov bound, and how much its short
/// sums cancel.
#[derive(Debug, Clone, PartialEq)]
pub struct SavingsProfile {
    pub q: u64,
    /// `max_{1≤t≤q} |S(t)|`.
    pub pv_max: f64,
    pub pv_argmax: u64,
    /// `√q log q / pv_max`.
    pub a_q: f64,
    pub eps_grid: Vec<f64>,
    /// For each `ε`: `max_{q^ε < t ≤ q} |S(t)|/t` (the value at `t = q` when
    /// the window is empty).
    pub delta_eps: Vec<f64>,
    pub delta_argmax: Vec<u64>,
    pub n_chi: Option<u64>,
}

/// Least integer `t` with `t > q^ε`, with `q^ε` snapped to an integer when
/// it is one up to rounding.
pub fn window_start(q: u64, eps: f64) -> u64 {
    let x = (q as f64).powf(eps);
    let r = x.round();
    let floor = if (x - r).abs() <= 1e-9 * x.max(1.0) { r } else { x.floor() };
    floor as u64 + 1
}

pub fn savings_profile(chi: &DirichletCharacter, eps_grid: &[f64]) -> Result<SavingsProfile> {
    if chi.is_principal() {
        return domain("savings profile of a principal character");
    }
    if let Some(e) = eps_grid.iter().find(|&&e| !(e > 0.0 && e <= 1.0)) {
        return domain(format!("ε = {e} outside (0, 1]"));
    }
    let q = chi.modulus();
    let values = chi.complex_values();
    let starts: Vec<u64> = eps_grid.iter().map(|&e| window_start(q, e)).collect();
    let mut pv = Extremum::empty();
    let mut deltas = vec![Extremum::empty(); eps_grid.len()];
    let mut acc = ComplexSum::default();
    for t in 1..=q {
        acc.add(values[(t % q) as usize]);
        let s = acc.value().norm();
        pv.offer(t, s);
        for (d, &start) in deltas.iter_mut().zip(&starts) {
            if t >= start {
                d.offer(t, s / t as f64);
            }
        }
    }
    let last = acc.value().norm() / q as f64;
    for d in deltas.iter_mut() {
        if d.value == f64::NEG_INFINITY {
            *d = Extremum { arg: q, value: last };
        }
    }
    let qf = q as f64;
    Ok(SavingsProfile {
        q,
        pv_max: pv.value,
        pv_argmax: pv.arg,
        a_q: qf.sqrt() * qf.ln() / pv.value,
        eps_grid: eps_grid.to_vec(),
        delta_eps: deltas.iter().map(|d| d.value).collect(),
        delta_argmax: deltas.iter().map(|d| d.arg).collect(),
        n_chi: chi.n_chi(),
    })
}

/// The short-sum bound shape `(log₂ a / log a)^{1/(19g²)}` (the bound on
/// `|S(t)|` divided by `t`), where `log₂ = log log`. Requires `a > e^e`.
pub fn thmgen_ratio(g: u64, a: f64) -> Result<f64> {
    if g < 1 {
        return domain("order must be positive");
    }
    if !(a > std::f64::consts::E.exp()) {
        return domain(format!("a = {a} must exceed e^e"));
    }
    let la = a.ln();
    Ok((la.ln() / la).powf(1.0 / (19.0 * (g * g) as f64)))
}

/// `t · (log₂ a / log a)^{1/(19g²)}`.
pub fn thmgen_rhs(t: f64, g: u64, a: f64) -> Result<f64> {
    Ok(t * thmgen_ratio(g, a)?)
}

/// `δ_g = 1 − (g/π) sin(π/g)` for odd `g ≥ 3`.
pub fn delta_g(g: u64) -> Result<f64> {
    if g < 3 || g % 2 == 0 {
        return domain(format!("δ_g needs an odd order ≥ 3, got {g}"));
    }
    let x = std::f64::consts::PI / g as f64;
    Ok(1.0 - x.sin() / x)
}

/// `Σ_{n≤N} χ(n)/n` with compensation.
pub fn log_sum(chi: &DirichletCharacter, n_max: u64) -> Complex64 {
    let q = chi.modulus();
    let values = chi.complex_values();
    (1..=n_max)
        .map(|n| values[(n % q) as usize] / n as f64)
        .collect::<ComplexSum>()
        .value()
}
