//! Pretentious distances between completely multiplicative functions,
//! minimisation over the twists `n^{it}`, the Halász–Montgomery–Tenenbaum
//! bound, the equivalence gap for functions of finite order and the
//! repulsion report for twisted characters.

mod model;

use num_complex::Complex64;
use rayon::prelude::*;

pub use model::{MultiplicativeModel, PrimeValue, Provenance, EXTENSION_LIMIT};

use crate::characters::{characters_mod, CharacterFilter, DirichletCharacter};
use crate::error::{domain, Error, Result};
use crate::numeric::{ComplexSum, KahanSum};

/// Default additive constant in `λ`.
pub const DEFAULT_C_GS: f64 = 2.0;

/// Bracket width at which golden-section refinement stops.
const REFINE_RESOLUTION: f64 = 1e-6;

/// `D(f₁, f₂; x)² = Σ_{p ≤ x, p ∤ r} (1 − Re f₁(p) f̄₂(p))/p`.
pub fn distance(
    f1: &MultiplicativeModel,
    f2: &MultiplicativeModel,
    x: f64,
    exclude_r: u64,
) -> Result<f64> {
    let n1 = f1.primes_through(x)?;
    f2.primes_through(x)?;
    let a = f1.complex_values();
    let b = f2.complex_values();
    let mut acc = KahanSum::default();
    for (i, &p) in f1.primes()[..n1].iter().enumerate() {
        if exclude_r > 1 && exclude_r % p == 0 {
            continue;
        }
        acc.add((1.0 - (a[i] * b[i].conj()).re) / p as f64);
    }
    Ok(acc.value())
}

/// The objective `t ↦ D(f, n^{it}; x)²` with per-prime data cached.
struct TwistObjective {
    recip: Vec<f64>,
    logs: Vec<f64>,
    weighted: Vec<Complex64>,
    base: f64,
}

impl TwistObjective {
    fn new(f: &MultiplicativeModel, x: f64) -> Result<Self> {
        let n = f.primes_through(x)?;
        let primes = &f.primes()[..n];
        let recip: Vec<f64> = primes.iter().map(|&p| 1.0 / p as f64).collect();
        let logs = primes.iter().map(|&p| (p as f64).ln()).collect();
        let weighted = f.complex_values()[..n]
            .iter()
            .zip(&recip)
            .map(|(&z, &w)| z * w)
            .collect();
        let mut base = KahanSum::default();
        recip.iter().for_each(|&w| base.add(w));
        Ok(TwistObjective {
            base: base.value(),
            recip,
            logs,
            weighted,
        })
    }

    fn eval(&self, t: f64) -> f64 {
        if t == 0.0 {
            let mut acc = KahanSum::default();
            for (z, w) in self.weighted.iter().zip(&self.recip) {
                acc.add(w - z.re);
            }
            return acc.value();
        }
        // Re f(p) p^{-it} = Re f(p) cos(t log p) + Im f(p) sin(t log p)
        let mut acc = KahanSum::default();
        acc.add(self.base);
        for (z, &l) in self.weighted.iter().zip(&self.logs) {
            let (s, c) = (t * l).sin_cos();
            acc.add(-(z.re * c + z.im * s));
        }
        acc.value()
    }
}

/// Result of minimising `D(f, n^{it}; x)²` over `|t| ≤ T`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceReport {
    pub x: f64,
    pub t_max: f64,
    /// `D(f, 1; x)²`.
    pub d0_squared: f64,
    pub t_star: f64,
    /// `D(f, n^{it*}; x)²`.
    pub d_min_squared: f64,
    pub grid_spacing: f64,
    pub grid_points: usize,
    pub refine_iterations: usize,
    pub c_gs: f64,
    /// `d_min_squared + log(1 + |t*|) + c_GS`.
    pub lambda: f64,
    /// `1/(λ e^λ)`.
    pub eta: f64,
}

/// Grid search at spacing `1/(4 log x)` (adjusted to land on 0 and `±T`;
/// nearer-to-zero points win ties), then golden-section refinement inside
/// the bracket around the best grid point.
pub fn min_distance_over_t(f: &MultiplicativeModel, x: f64, t_max: f64, c_gs: f64) -> Result<DistanceReport> {
    if !(t_max >= 0.0) || !t_max.is_finite() {
        return domain(format!("T = {t_max} must be finite and non-negative"));
    }
    let obj = TwistObjective::new(f, x)?;
    let d0 = obj.eval(0.0);
    let nominal = 1.0 / (4.0 * x.ln());
    let steps = (t_max / nominal).ceil() as i64;
    let spacing = if steps > 0 { t_max / steps as f64 } else { 0.0 };

    let (mut t_best, mut v_best) = (0.0, d0);
    for j in 1..=steps {
        for t in [j as f64 * spacing, -(j as f64) * spacing] {
            let v = obj.eval(t);
            if v < v_best {
                t_best = t;
                v_best = v;
            }
        }
    }

    let mut iterations = 0;
    if steps > 0 {
        let mut lo = (t_best - spacing).max(-t_max);
        let mut hi = (t_best + spacing).min(t_max);
        let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
        let mut c = hi - inv_phi * (hi - lo);
        let mut d = lo + inv_phi * (hi - lo);
        let (mut fc, mut fd) = (obj.eval(c), obj.eval(d));
        while hi - lo > REFINE_RESOLUTION {
            iterations += 1;
            if fc < fd {
                hi = d;
                d = c;
                fd = fc;
                c = hi - inv_phi * (hi - lo);
                fc = obj.eval(c);
            } else {
                lo = c;
                c = d;
                fc = fd;
                d = lo + inv_phi * (hi - lo);
                fd = obj.eval(d);
            }
        }
        let t_ref = 0.5 * (lo + hi);
        let v_ref = obj.eval(t_ref);
        if v_ref < v_best {
            t_best = t_ref;
            v_best = v_ref;
        }
    }

    let d_min = v_best.max(0.0);
    let lambda = d_min + (1.0 + t_best.abs()).ln() + c_gs;
    Ok(DistanceReport {
        x,
        t_max,
        d0_squared: d0,
        t_star: t_best,
        d_min_squared: d_min,
        grid_spacing: spacing,
        grid_points: (2 * steps + 1) as usize,
        refine_iterations: iterations,
        c_gs,
        lambda,
        eta: 1.0 / (lambda * lambda.exp()),
    })
}

/// The Halász–Montgomery–Tenenbaum comparison at `x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HmtReport {
    /// `𝒟 e^{−𝒟} + 1/√T`.
    pub bound: f64,
    /// `|(1/x) Σ_{n≤x} f(n)|`.
    pub mean: f64,
    pub ratio: f64,
    pub distance: DistanceReport,
}

pub fn hmt_bound(f: &MultiplicativeModel, x: u64, t_max: f64, c_gs: f64) -> Result<HmtReport> {
    if x > EXTENSION_LIMIT {
        return Err(Error::Resource(format!("x = {x} exceeds {EXTENSION_LIMIT}")));
    }
    if !(t_max > 0.0) {
        return domain(format!("T = {t_max} must be positive"));
    }
    let distance = min_distance_over_t(f, x as f64, t_max, c_gs)?;
    let values = f.extend(x)?;
    let mean = values[1..].iter().copied().collect::<ComplexSum>().value().norm() / x as f64;
    let d = distance.d_min_squared;
    let bound = d * (-d).exp() + 1.0 / t_max.sqrt();
    Ok(HmtReport {
        bound,
        mean,
        ratio: mean / bound,
        distance,
    })
}

/// Both sides of the lower bound
/// `min_{|t|≤T} D(f̃, n^{it}; x) ≥ (1/2k) min{√(log log x), D(f̃, 1; x)} − O(1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquivGap {
    pub lhs: f64,
    pub rhs_core: f64,
    /// `lhs − rhs_core`; the implied constant is `max(0, −gap)`.
    pub gap: f64,
    pub distance: DistanceReport,
}

/// Runs on `f̃` (zeros at primes replaced by 1), which takes values in
/// `μ_k` when `f` does off its zeros.
pub fn equiv_gap(f: &MultiplicativeModel, x: f64, t_max: f64, k: u64, c_gs: f64) -> Result<EquivGap> {
    if k == 0 {
        return domain("order k must be positive");
    }
    f.check_order(k)?;
    let ft = f.tilde();
    let distance = min_distance_over_t(&ft, x, t_max, c_gs)?;
    let lhs = distance.d_min_squared.sqrt();
    let rhs_core = x.ln().ln().max(0.0).sqrt().min(distance.d0_squared.sqrt()) / (2.0 * k as f64);
    Ok(EquivGap {
        lhs,
        rhs_core,
        gap: lhs - rhs_core,
        distance,
    })
}

/// One twist candidate in [`orders_report`].
#[derive(Debug, Clone, PartialEq)]
pub struct TwistCandidate {
    pub label: String,
    pub conductor: u64,
    pub order: u64,
    pub parity: crate::characters::Parity,
    /// `𝒟_{χψ̄}(q; T)`.
    pub d_min_squared: f64,
    pub t_star: f64,
    /// `(1/(3(gk)²)) log log q`.
    pub threshold: f64,
    pub below_threshold: bool,
}

impl TwistCandidate {
    fn evaluate(chi: &DirichletCharacter, psi: &DirichletCharacter, t_max: f64, c_gs: f64) -> Result<Self> {
        let q = chi.modulus();
        let twisted = chi.mul(&psi.conj());
        let model = MultiplicativeModel::from_character(&twisted, q)?;
        let rep = min_distance_over_t(&model, q as f64, t_max, c_gs)?;
        let gk = (chi.order() * psi.order()) as f64;
        let threshold = (q as f64).ln().ln() / (3.0 * gk * gk);
        Ok(TwistCandidate {
            label: psi.label(),
            conductor: psi.modulus(),
            order: psi.order(),
            parity: psi.parity(),
            d_min_squared: rep.d_min_squared,
            t_star: rep.t_star,
            threshold,
            below_threshold: rep.d_min_squared <= threshold,
        })
    }
}

/// The two alternatives for `(χ, ψ)` and the scan over all primitive `ψ`
/// with conductor `2 ≤ m ≤ log q`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrdersReport {
    pub q: u64,
    pub g: u64,
    pub m: u64,
    pub k: u64,
    pub t_max: f64,
    pub pair: TwistCandidate,
    /// Alternative i): the distance lies at or below the threshold.
    pub close: bool,
    /// Alternative ii): `k ∤ g`.
    pub k_not_dividing_g: bool,
    /// Both alternatives at once (excluded for large `q`).
    pub both: bool,
    /// `m ≤ log q`; outside this regime the report is advisory.
    pub in_regime: bool,
    pub scan: Vec<TwistCandidate>,
    pub count_below: usize,
}

/// Largest conductor scanned for a modulus `q`: `⌊log q⌋`.
pub fn twist_conductor_bound(q: u64) -> u64 {
    (q as f64).ln().floor().max(0.0) as u64
}

/// All primitive characters of conductor `2 ≤ m ≤ ⌊log q⌋`, ordered by
/// conductor then exponents.
pub fn twist_candidates(q: u64) -> Result<Vec<DirichletCharacter>> {
    let mut out = Vec::new();
    for m in 2..=twist_conductor_bound(q) {
        out.extend(characters_mod(m, CharacterFilter::primitive())?);
    }
    Ok(out)
}

/// Distances from `χ` to every twist candidate, in candidate order.
pub fn twist_scan(chi: &DirichletCharacter, t_max: f64, c_gs: f64) -> Result<Vec<TwistCandidate>> {
    twist_candidates(chi.modulus())?
        .par_iter()
        .map(|psi| TwistCandidate::evaluate(chi, psi, t_max, c_gs))
        .collect()
}

pub fn orders_report(
    chi: &DirichletCharacter,
    psi: &DirichletCharacter,
    t_max: f64,
    c_gs: f64,
) -> Result<OrdersReport> {
    if !psi.is_primitive() {
        return domain(format!("{} is not primitive", psi.label()));
    }
    let q = chi.modulus();
    let pair = TwistCandidate::evaluate(chi, psi, t_max, c_gs)?;
    let scan = twist_scan(chi, t_max, c_gs)?;
    let (g, k) = (chi.order(), psi.order());
    let close = pair.below_threshold;
    let k_not_dividing_g = g % k != 0;
    Ok(OrdersReport {
        q,
        g,
        m: psi.modulus(),
        k,
        t_max,
        close,
        k_not_dividing_g,
        both: close && k_not_dividing_g,
        in_regime: (psi.modulus() as f64) <= (q as f64).ln(),
        count_below: scan.iter().filter(|c| c.below_threshold).count(),
        pair,
        scan,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::UnitValue;

    fn one(limit: u64) -> MultiplicativeModel {
        MultiplicativeModel::constant(UnitValue::ONE, limit).unwrap()
    }

    #[test]
    fn distance_examples() {
        let f1 = one(100);
        assert_eq!(distance(&f1, &f1, 100.0, 1).unwrap(), 0.0);
        let chi3 = DirichletCharacter::legendre(3).unwrap();
        let m3 = MultiplicativeModel::from_character(&chi3, 100).unwrap();
        assert!((distance(&m3, &m3, 10.0, 1).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!((distance(&f1, &m3, 5.0, 1).unwrap() - 26.0 / 15.0).abs() < 1e-15);
        // excluding r = 6 removes p = 2, 3
        assert!((distance(&f1, &m3, 5.0, 6).unwrap() - 2.0 / 5.0).abs() < 1e-15);
        assert!(distance(&f1, &m3, 101.0, 1).is_err());
    }

    #[test]
    fn minimiser_examples() {
        let f = one(10_000);
        let r = min_distance_over_t(&f, 10_000.0, 1.0, DEFAULT_C_GS).unwrap();
        assert_eq!(r.t_star, 0.0);
        assert_eq!(r.d_min_squared, 0.0);

        let planted = MultiplicativeModel::archimedean(0.3, 10_000).unwrap();
        let r = min_distance_over_t(&planted, 10_000.0, 1.0, DEFAULT_C_GS).unwrap();
        assert!((r.t_star - 0.3).abs() <= 1e-3, "{r:?}");
        assert!(r.d_min_squared <= 1e-4);
        assert!(r.eta > 0.0 && r.eta < 1.0);

        let chi3 = DirichletCharacter::legendre(3).unwrap();
        let m3 = MultiplicativeModel::from_character(&chi3, 10_000).unwrap();
        let r = min_distance_over_t(&m3, 10_000.0, 0.0, DEFAULT_C_GS).unwrap();
        assert_eq!(r.d_min_squared, distance(&m3, &one(10_000), 10_000.0, 1).unwrap());
        assert_eq!(r.grid_points, 1);
    }

    #[test]
    fn hmt_trivial() {
        let r = hmt_bound(&one(10_000), 10_000, 4.0, DEFAULT_C_GS).unwrap();
        assert!((r.mean - 1.0).abs() < 1e-12);
        assert!((r.bound - 0.5).abs() < 1e-12);
        assert!((r.ratio - 2.0).abs() < 1e-12);
        assert!(matches!(
            hmt_bound(&one(100), EXTENSION_LIMIT + 1, 1.0, 2.0),
            Err(Error::Resource(_))
        ));
    }

    #[test]
    fn equiv_examples() {
        let r = equiv_gap(&one(10_000), 10_000.0, 10.0, 1, DEFAULT_C_GS).unwrap();
        assert_eq!((r.lhs, r.rhs_core, r.gap), (0.0, 0.0, 0.0));
        let cubic = MultiplicativeModel::constant(UnitValue::root(1, 3), 10_000).unwrap();
        let r = equiv_gap(&cubic, 10_000.0, 10.0, 3, DEFAULT_C_GS).unwrap();
        assert!(r.lhs > 0.0 && r.gap.is_finite());
        assert!(equiv_gap(&cubic, 10_000.0, 10.0, 2, DEFAULT_C_GS).is_err());
    }

    #[test]
    fn orders_small_modulus() {
        let chi = DirichletCharacter::legendre(101).unwrap();
        let psi = characters_mod(4, CharacterFilter::primitive()).unwrap().remove(0);
        let rep = orders_report(&chi, &psi, 1.0, DEFAULT_C_GS).unwrap();
        let conductors: Vec<u64> = rep.scan.iter().map(|c| c.conductor).collect();
        assert_eq!(conductors, vec![3, 4]);
        assert!(rep.count_below <= 1);
        assert!(rep.in_regime);
        assert!(!rep.k_not_dividing_g);
    }
}
