//! The non-negative convolution `g = 1∗1∗f∗f̄` and what is built on it:
//! the Fejér kernel identity at prime powers, the two-sided logarithmic
//! mean bound, the Dickman function and Hildebrand's lower bound, the
//! families `ξ` with their modulus classes, and the report comparing
//! logarithmic means with the bounds that follow from a large mean value.

mod dickman;
mod xi;

use num_complex::Complex64;

pub use dickman::{dickman_richardson_gap, dickman_rho, sigma_minus, DICKMAN_MAX_U, DICKMAN_STEP, RICHARDSON_TOLERANCE};
pub use xi::{iterated_log, q_class_membership, Membership, XiFamily, BORDERLINE_BAND};

use crate::characters::UnitValue;
use crate::error::{domain, Error, Result};
use crate::numeric::{ComplexSum, KahanSum};
use crate::pretentious::{MultiplicativeModel, PrimeValue};

/// Largest dense table.
pub const CONVOLUTION_LIMIT: u64 = 10_000_000;

/// Default smallest `t` accepted by [`revtonn_check`].
pub const DEFAULT_T0: u64 = 100;

/// `f`, `h = 1∗f` and `g = h∗h̄` on `1 ≤ n ≤ x` (index 0 unused).
#[derive(Debug, Clone)]
pub struct ConvolutionTable {
    model: MultiplicativeModel,
    limit: u64,
    f: Vec<Complex64>,
    h: Vec<Complex64>,
    g: Vec<f64>,
    max_imag: f64,
}

/// Two divisor-sieve passes: `f → h`, then `h → g`.
pub fn build_convolution(f: &MultiplicativeModel, x: u64) -> Result<ConvolutionTable> {
    if x > CONVOLUTION_LIMIT {
        return Err(Error::Resource(format!(
            "convolution table to {x} exceeds {CONVOLUTION_LIMIT}"
        )));
    }
    if x < 1 {
        return domain("convolution table needs x ≥ 1");
    }
    let fv = f.extend(x)?;
    let n = x as usize;
    let mut h = vec![Complex64::new(0.0, 0.0); n + 1];
    for d in 1..=n {
        let v = fv[d];
        if v == Complex64::new(0.0, 0.0) {
            continue;
        }
        for m in (d..=n).step_by(d) {
            h[m] += v;
        }
    }
    let mut g = vec![0.0f64; n + 1];
    let mut g_im = vec![0.0f64; n + 1];
    for d in 1..=n {
        let hd = h[d];
        if hd == Complex64::new(0.0, 0.0) {
            continue;
        }
        for (j, hj) in h[1..=n / d].iter().enumerate() {
            let z = hd * hj.conj();
            g[d * (j + 1)] += z.re;
            g_im[d * (j + 1)] += z.im;
        }
    }
    let max_imag = g_im.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    Ok(ConvolutionTable {
        model: f.clone(),
        limit: x,
        f: fv,
        h,
        g,
        max_imag,
    })
}

impl ConvolutionTable {
    pub fn model(&self) -> &MultiplicativeModel {
        &self.model
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn f(&self, n: u64) -> Complex64 {
        self.f[n as usize]
    }

    pub fn h(&self, n: u64) -> Complex64 {
        self.h[n as usize]
    }

    /// `g(n)` (real part; see [`Self::max_imag`]).
    pub fn g(&self, n: u64) -> f64 {
        self.g[n as usize]
    }

    /// `max_n |Im g(n)|`.
    pub fn max_imag(&self) -> f64 {
        self.max_imag
    }

    /// `(min_n g(n), argmin)`.
    pub fn g_min(&self) -> (f64, u64) {
        self.g[1..]
            .iter()
            .enumerate()
            .fold((f64::INFINITY, 0), |(m, a), (i, &v)| if v < m { (v, i as u64 + 1) } else { (m, a) })
    }

    /// `(1/t) Σ_{n ≤ t} g(n)`.
    pub fn g_mean(&self, t: u64) -> f64 {
        let mut acc = KahanSum::default();
        self.g[1..=t as usize].iter().for_each(|&v| acc.add(v));
        acc.value() / t as f64
    }

    /// `|(1/t) Σ_{n ≤ t} f(n)|`.
    pub fn f_mean_abs(&self, t: u64) -> f64 {
        self.f[1..=t as usize].iter().copied().collect::<ComplexSum>().value().norm() / t as f64
    }

    fn check_within(&self, t: u64) -> Result<()> {
        if t > self.limit || t < 2 {
            return domain(format!("t = {t} outside the table range [2, {}]", self.limit));
        }
        Ok(())
    }

    /// `max_{y ∈ [lo, t]} |(1/log y) Σ_{n≤y} f(n)/n|` and its argmax.
    fn log_mean_max(&self, lo: u64, t: u64) -> (f64, u64) {
        let mut acc = ComplexSum::default();
        let mut best = (f64::NEG_INFINITY, lo);
        for y in 1..=t {
            acc.add(self.f[y as usize] / y as f64);
            if y >= lo.max(2) {
                let v = acc.value().norm() / (y as f64).ln();
                if v > best.0 {
                    best = (v, y);
                }
            }
        }
        best
    }
}

/// `K_N(t) = (1/N)(sin πNt / sin πt)²`, equal to `N` at integers.
pub fn fejer_kernel(n: u64, t: f64) -> f64 {
    assert!(n >= 1, "Fejér kernel order must be positive");
    if t.fract() == 0.0 {
        return n as f64;
    }
    let pi = std::f64::consts::PI;
    let r = (pi * n as f64 * t).sin() / (pi * t).sin();
    r * r / n as f64
}

/// `Σ_{|j| ≤ N−1} (1 − |j|/N) e(jt)`.
pub fn fejer_kernel_sum(n: u64, t: f64) -> f64 {
    let mut acc = KahanSum::default();
    acc.add(1.0);
    for j in 1..n {
        acc.add(2.0 * (1.0 - j as f64 / n as f64) * (std::f64::consts::TAU * j as f64 * t).cos());
    }
    acc.value()
}

/// Weight `c_k(w)` of `f(p)^{±w}` in `g(p^k)`:
/// `Σ_{v ≥ 0, 2v + w ≤ k} (k + 1 − w − 2v)`.
pub fn prime_power_weight(k: u64, w: u64) -> u64 {
    if w > k {
        return 0;
    }
    (0..=(k - w) / 2).map(|v| k + 1 - w - 2 * v).sum()
}

/// `g(p^k) = Σ_{|w|≤k} c_k(|w|) e(wθ)` for `f(p) = e(θ)`, and `k + 1`
/// when `f(p) = 0` (`theta = None`).
pub fn prime_power_value(k: u64, theta: Option<f64>) -> f64 {
    match theta {
        None => (k + 1) as f64,
        Some(th) => {
            let mut acc = KahanSum::default();
            acc.add(prime_power_weight(k, 0) as f64);
            for w in 1..=k {
                acc.add(2.0 * prime_power_weight(k, w) as f64 * (std::f64::consts::TAU * w as f64 * th).cos());
            }
            acc.value()
        }
    }
}

/// `(k + 1) K_{k+1}(θ)`, the Fejér form, which carries the weights
/// `k + 1 − |w|`. It agrees with `g(p^k)` for `k ≤ 1` only: the weights
/// drop the constraint `u + v ≤ k` on the pairs of exponents, so from
/// `k = 2` on they differ from `c_k(w)` (for `f = 1`, `g(p²) = 10` while
/// `3 K_3(0) = 9`).
pub fn fejer_form(k: u64, theta: Option<f64>) -> f64 {
    match theta {
        None => (k + 1) as f64,
        Some(th) => (k + 1) as f64 * fejer_kernel(k + 1, th),
    }
}

/// Outcome of [`prime_power_identity_check`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrimePowerCheck {
    /// `max_k |g(p^k) − (k+1) K_{k+1}(θ_p)|`.
    pub fejer_diff: f64,
    /// `max_k |g(p^k) − Σ_w c_k(w) e(wθ_p)|`.
    pub weight_diff: f64,
    /// Smallest `k` at which the Fejér form misses by more than `1e-9`.
    pub fejer_first_miss: Option<u32>,
}

/// `g(p^k)` for `k ≤ kmax`, convolved directly along the powers of `p`,
/// against the Fejér form and against the weight form.
pub fn prime_power_identity_check(f: &MultiplicativeModel, p: u64, kmax: u32) -> Result<PrimePowerCheck> {
    let v = f
        .at_prime(p)
        .ok_or_else(|| Error::Domain(format!("{p} is not a prime within the model")))?;
    let theta = prime_angle(v);
    let mut out = PrimePowerCheck {
        fejer_diff: 0.0,
        weight_diff: 0.0,
        fejer_first_miss: None,
    };
    for (k, gk) in direct_prime_powers(v, kmax).into_iter().enumerate() {
        let k = k as u64;
        let fd = (gk - fejer_form(k, theta)).norm();
        if fd > 1e-9 && out.fejer_first_miss.is_none() {
            out.fejer_first_miss = Some(k as u32);
        }
        out.fejer_diff = out.fejer_diff.max(fd);
        out.weight_diff = out.weight_diff.max((gk - prime_power_value(k, theta)).norm());
    }
    Ok(out)
}

/// `θ` with `f(p) = e(θ)`, or `None` when `f(p) = 0`.
pub fn prime_angle(v: PrimeValue) -> Option<f64> {
    match v {
        PrimeValue::Exact(UnitValue::Zero) => None,
        PrimeValue::Exact(UnitValue::Root { num, den }) => Some(num as f64 / den as f64),
        PrimeValue::Unimodular(z) => Some(z.arg() / std::f64::consts::TAU),
    }
}

/// `g(1), g(p), …, g(p^kmax)` from `h(p^j) = Σ_{i≤j} f(p)^i`.
fn direct_prime_powers(v: PrimeValue, kmax: u32) -> Vec<Complex64> {
    let mut h = Vec::with_capacity(kmax as usize + 1);
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..=kmax as u64 {
        acc += match v {
            _ if i == 0 => Complex64::new(1.0, 0.0),
            PrimeValue::Exact(u) => u.pow(i).to_complex(),
            PrimeValue::Unimodular(z) => z.powu(i as u32),
        };
        h.push(acc);
    }
    (0..=kmax as usize)
        .map(|k| (0..=k).map(|j| h[j] * h[k - j].conj()).sum())
        .collect()
}

/// Both sides of
/// `max_{√t ≤ x ≤ t} |(1/log x) Σ_{n≤x} f(n)/n| + 1/log t ≫ (1/(log t)³)(1/t) Σ_{n≤t} g(n)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RevtonnReport {
    pub t: u64,
    pub lhs: f64,
    pub lhs_argmax: u64,
    pub rhs_core: f64,
    pub ratio: f64,
}

/// Evaluates the left side at every integer `x` in `[√t, t]`.
pub fn revtonn_check(table: &ConvolutionTable, t: u64, t0: u64) -> Result<RevtonnReport> {
    if t < t0 {
        return Err(Error::Config(format!("t = {t} below t0 = {t0}")));
    }
    table.check_within(t)?;
    let s = t.isqrt();
    let lo = if s * s == t { s } else { s + 1 };
    let (m, arg) = table.log_mean_max(lo, t);
    let lt = (t as f64).ln();
    let lhs = m + 1.0 / lt;
    let rhs_core = table.g_mean(t) / (lt * lt * lt);
    Ok(RevtonnReport {
        t,
        lhs,
        lhs_argmax: arg,
        rhs_core,
        ratio: lhs / rhs_core,
    })
}

/// Hildebrand's main term against the actual mean of `g`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HildebrandReport {
    pub x: u64,
    /// `exp(Σ_{p≤x} (g(p) − 1)/p) σ₋(exp(Σ_{p≤x} max(0, 1 − g(p))/p))`.
    pub lower: f64,
    /// `(1/x) Σ_{n≤x} g(n)`.
    pub actual: f64,
    pub ratio: f64,
    /// The argument of `σ₋`.
    pub sigma_arg: f64,
}

/// Uses `g(p) = 2(1 + Re f(p))` at primes.
pub fn hildebrand_lower(table: &ConvolutionTable, x: u64) -> Result<HildebrandReport> {
    table.check_within(x)?;
    let f = table.model();
    let n = f.primes_through(x as f64)?;
    let mut main = KahanSum::default();
    let mut deficit = KahanSum::default();
    for (&p, z) in f.primes()[..n].iter().zip(f.complex_values()) {
        let gp = 2.0 * (1.0 + z.re);
        main.add((gp - 1.0) / p as f64);
        deficit.add((1.0 - gp).max(0.0) / p as f64);
    }
    let sigma_arg = deficit.value().exp();
    let lower = main.value().exp() * sigma_minus(sigma_arg)?;
    let actual = table.g_mean(x);
    Ok(HildebrandReport {
        x,
        lower,
        actual,
        ratio: actual / lower,
        sigma_arg,
    })
}

/// Logarithmic means against the two bounds implied by a large mean value.
#[derive(Debug, Clone, PartialEq)]
pub struct CestologReport {
    pub x: u64,
    pub k: u64,
    pub xi_name: String,
    pub xi_x: f64,
    /// `|(1/x) Σ_{n≤x} f(n)|`.
    pub mean_abs: f64,
    /// `mean_abs > 1/ξ(x)`.
    pub hypothesis: bool,
    /// `max_{√x < y ≤ x} |(1/log y) Σ_{n≤y} f(n)/n| + 1/log x`.
    pub lhs: f64,
    pub lhs_argmax: u64,
    /// `ξ^{−38k² ξ^{19k²}}` and its logarithm.
    pub rhs_a: f64,
    pub log_rhs_a: f64,
    /// `ξ^{−72k²}` (odd `k` only) and its logarithm.
    pub rhs_b: Option<f64>,
    pub log_rhs_b: Option<f64>,
    pub log_ratio_a: f64,
    pub log_ratio_b: Option<f64>,
}

pub fn cestolog_report(table: &ConvolutionTable, k: u64, x: u64, xi: &XiFamily) -> Result<CestologReport> {
    if k == 0 {
        return domain("order k must be positive");
    }
    table.check_within(x)?;
    table.model().check_order(k)?;
    let xi_x = xi.eval(x as f64)?;
    if !(xi_x > 0.0) {
        return domain(format!("ξ({x}) = {xi_x} is not positive"));
    }
    let mean_abs = table.f_mean_abs(x);
    let (m, arg) = table.log_mean_max(x.isqrt() + 1, x);
    let lhs = m + 1.0 / (x as f64).ln();
    let kk = (k * k) as f64;
    let lx = xi_x.ln();
    let log_rhs_a = -38.0 * kk * xi_x.powf(19.0 * kk) * lx;
    let log_rhs_b = (k % 2 == 1).then(|| -72.0 * kk * lx);
    Ok(CestologReport {
        x,
        k,
        xi_name: xi.to_string(),
        xi_x,
        mean_abs,
        hypothesis: mean_abs > 1.0 / xi_x,
        lhs,
        lhs_argmax: arg,
        rhs_a: log_rhs_a.exp(),
        log_rhs_a,
        rhs_b: log_rhs_b.map(f64::exp),
        log_rhs_b,
        log_ratio_a: lhs.ln() - log_rhs_a,
        log_ratio_b: log_rhs_b.map(|b| lhs.ln() - b),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::gcd;
    use crate::characters::{characters_mod, CharacterFilter, DirichletCharacter};

    fn tau(n: u64) -> u64 {
        (1..=n).filter(|d| n % d == 0).count() as u64
    }

    #[test]
    fn trivial_f_gives_divisor_functions() {
        let f = MultiplicativeModel::constant(UnitValue::ONE, 2000).unwrap();
        let t = build_convolution(&f, 2000).unwrap();
        for n in 1..=2000u64 {
            assert_eq!(t.h(n), Complex64::new(tau(n) as f64, 0.0));
            // g = τ∗τ = τ₄
            let tau4: u64 = (1..=n).filter(|d| n % d == 0).map(|d| tau(d) * tau(n / d)).sum();
            assert_eq!(t.g(n), tau4 as f64);
        }
        for p in [2u64, 3, 5, 1999] {
            assert_eq!(t.g(p), 4.0);
        }
    }

    #[test]
    fn mobius_like_f() {
        let f = MultiplicativeModel::constant(UnitValue::MINUS_ONE, 1000).unwrap();
        let t = build_convolution(&f, 1000).unwrap();
        for p in [2u64, 3, 97, 997] {
            assert_eq!(t.g(p), 0.0);
        }
        assert!(t.g_min().0 >= -1e-9);
    }

    #[test]
    fn character_table_invariants() {
        let chi = DirichletCharacter::legendre(3).unwrap();
        let f = MultiplicativeModel::from_character(&chi, 10_000).unwrap();
        let t = build_convolution(&f, 10_000).unwrap();
        assert!(t.g_min().0 >= -1e-9);
        assert!(t.max_imag() <= 1e-9);
        for n in 1..=10_000u64 {
            assert!(t.h(n).norm() <= tau(n) as f64 + 1e-9);
        }
        for (m, n) in [(4u64, 9u64), (7, 125), (8, 27), (11, 13), (16, 625)] {
            assert_eq!(gcd(m, n), 1);
            assert!((t.g(m * n) - t.g(m) * t.g(n)).abs() <= 1e-9 * t.g(m * n).abs().max(1.0));
        }
    }

    #[test]
    fn fejer_forms_agree() {
        assert_eq!(fejer_kernel(7, 0.0), 7.0);
        assert_eq!(fejer_kernel(7, 3.0), 7.0);
        assert!(fejer_kernel(2, 0.5).abs() < 1e-15);
        assert!((fejer_kernel(5, 0.17) - fejer_kernel_sum(5, 0.17)).abs() < 1e-10);
        for n in 1..30u64 {
            for i in 0..50 {
                let t = i as f64 / 37.0 - 0.6;
                assert!((fejer_kernel(n, t) - fejer_kernel_sum(n, t)).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn prime_power_examples() {
        let one = MultiplicativeModel::constant(UnitValue::ONE, 100).unwrap();
        let c = prime_power_identity_check(&one, 2, 10).unwrap();
        assert!(c.weight_diff < 1e-9);
        // g(p^k) = τ₄(p^k) = C(k+3, 3), not (k+1)²
        assert_eq!(prime_power_value(2, Some(0.0)), 10.0);
        assert_eq!(fejer_form(2, Some(0.0)), 9.0);
        assert_eq!(c.fejer_first_miss, Some(2));
        for k in 0..=10u64 {
            let binom = (k + 1) * (k + 2) * (k + 3) / 6;
            assert_eq!(prime_power_value(k, Some(0.0)), binom as f64);
        }

        let cubic = MultiplicativeModel::constant(UnitValue::root(1, 3), 100).unwrap();
        let c = prime_power_identity_check(&cubic, 2, 8).unwrap();
        assert!(c.weight_diff < 1e-9);
        assert!(c.fejer_diff > 1e-3);

        // f(p) = 0: both forms give k + 1
        let chi = DirichletCharacter::legendre(3).unwrap();
        let m = MultiplicativeModel::from_character(&chi, 100).unwrap();
        let c = prime_power_identity_check(&m, 3, 10).unwrap();
        assert!(c.weight_diff < 1e-9 && c.fejer_diff < 1e-9);
        assert_eq!(c.fejer_first_miss, None);

        let tw = MultiplicativeModel::archimedean(0.7, 100).unwrap();
        let c = prime_power_identity_check(&tw, 5, 10).unwrap();
        assert!(c.weight_diff < 1e-9);
        assert!(prime_power_identity_check(&m, 4, 3).is_err());
    }

    #[test]
    fn table_matches_prime_power_closed_form() {
        for chi in characters_mod(7, CharacterFilter::default()).unwrap() {
            let f = MultiplicativeModel::from_character(&chi, 5000).unwrap();
            let t = build_convolution(&f, 5000).unwrap();
            for p in [2u64, 3, 7, 11] {
                let mut pk = 1u64;
                for k in 0..=12u32 {
                    if pk > 5000 {
                        break;
                    }
                    let theta = prime_angle(f.at_prime(p).unwrap());
                    let closed = prime_power_value(k as u64, theta);
                    assert!((t.g(pk) - closed).abs() < 1e-9, "p={p} k={k}");
                    if k <= 1 {
                        assert!((t.g(pk) - fejer_form(k as u64, theta)).abs() < 1e-9);
                    }
                    pk *= p;
                }
            }
        }
    }

    #[test]
    fn revtonn_trivial() {
        let f = MultiplicativeModel::constant(UnitValue::ONE, 20_000).unwrap();
        let t = build_convolution(&f, 20_000).unwrap();
        let r = revtonn_check(&t, 20_000, DEFAULT_T0).unwrap();
        // Σ_{n≤x} 1/n / log x is largest at the smallest x of the window
        assert!(r.lhs > 1.0 && r.lhs < 1.5);
        assert!(r.ratio > 0.0 && r.ratio.is_finite());
        assert!(matches!(revtonn_check(&t, 50, DEFAULT_T0), Err(Error::Config(_))));
        assert!(revtonn_check(&t, 30_000, DEFAULT_T0).is_err());
    }

    #[test]
    fn hildebrand_structure() {
        let f = MultiplicativeModel::constant(UnitValue::ONE, 10_000).unwrap();
        let t = build_convolution(&f, 10_000).unwrap();
        let r = hildebrand_lower(&t, 10_000).unwrap();
        assert_eq!(r.sigma_arg, 1.0);
        let three = crate::arith::mertens_prime_sum(10_000.0).unwrap() * 3.0;
        assert!((r.lower - three.exp()).abs() <= 1e-9 * r.lower);

        let minus = MultiplicativeModel::constant(UnitValue::MINUS_ONE, 10_000).unwrap();
        let t = build_convolution(&minus, 10_000).unwrap();
        let r = hildebrand_lower(&t, 10_000).unwrap();
        assert!(r.sigma_arg > 1.0 && r.lower > 0.0 && r.actual > 0.0);
    }

    #[test]
    fn cestolog_examples() {
        let f = MultiplicativeModel::constant(UnitValue::ONE, 10_000).unwrap();
        let t = build_convolution(&f, 10_000).unwrap();
        let r = cestolog_report(&t, 1, 10_000, &XiFamily::log2_half()).unwrap();
        assert!(r.hypothesis);
        assert!(r.log_ratio_a > 0.0 && r.rhs_b.is_some());

        let cubic = characters_mod(7, CharacterFilter::default())
            .unwrap()
            .into_iter()
            .find(|c| c.order() == 3)
            .unwrap();
        let f = MultiplicativeModel::from_character(&cubic, 100_000).unwrap();
        let t = build_convolution(&f, 100_000).unwrap();
        let r = cestolog_report(&t, 3, 100_000, &XiFamily::log2_quarter()).unwrap();
        assert!(r.log_rhs_b.unwrap() >= r.log_rhs_a);
        assert!(r.rhs_b.unwrap() >= r.rhs_a);
        assert!(cestolog_report(&t, 2, 100_000, &XiFamily::log2_quarter()).is_err());
    }

    #[test]
    fn size_limit() {
        let f = MultiplicativeModel::constant(UnitValue::ONE, 10).unwrap();
        assert!(matches!(
            build_convolution(&f, CONVOLUTION_LIMIT + 1),
            Err(Error::Resource(_))
        ));
    }
}
