use num_complex::Complex64;

use crate::arith::gcd;
use crate::characters::{characters_mod, CharacterFilter, DirichletCharacter};
use crate::error::{domain, Result};
use crate::numeric::{e, roots_of_unity, ComplexSum};

use super::gauss_sum;

/// Two independently computed sides of an identity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityCheck {
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub abs_diff: f64,
}

impl IdentityCheck {
    fn new(lhs: Complex64, rhs: Complex64) -> Self {
        IdentityCheck {
            lhs,
            rhs,
            abs_diff: (lhs - rhs).norm(),
        }
    }

    /// `abs_diff ≤ tol · (1 + |lhs|)`.
    pub fn holds(&self, tol: f64) -> bool {
        self.abs_diff <= tol * (1.0 + self.lhs.norm())
    }
}

/// `Σ χ(n) e(nα)/n` over `1 ≤ n ≤ N`, or over `1 ≤ |n| ≤ N`.
pub fn twisted_log_sum(chi: &DirichletCharacter, alpha: f64, n_max: u64, two_sided: bool) -> Complex64 {
    let q = chi.modulus();
    let values = chi.complex_values();
    let mut acc = ComplexSum::default();
    for n in 1..=n_max {
        let phase = (n as f64 * alpha).fract();
        let z = e(phase);
        let v = values[(n % q) as usize];
        acc.add(v * z / n as f64);
        if two_sided {
            let w = values[((q - n % q) % q) as usize];
            acc.add(-(w * z.conj()) / n as f64);
        }
    }
    acc.value()
}

/// [`twisted_log_sum`] at the rational `α = b/r`, with exact phases.
pub fn twisted_log_sum_rational(
    chi: &DirichletCharacter,
    b: i64,
    r: u64,
    n_max: u64,
    two_sided: bool,
) -> Complex64 {
    let q = chi.modulus();
    let values = chi.complex_values();
    let roots = roots_of_unity(r);
    let b = b.rem_euclid(r as i64) as u64;
    let mut acc = ComplexSum::default();
    for n in 1..=n_max {
        let k = ((b as u128 * n as u128) % r as u128) as usize;
        let v = values[(n % q) as usize];
        acc.add(v * roots[k] / n as f64);
        if two_sided {
            let w = values[((q - n % q) % q) as usize];
            let kn = (r as usize - k) % r as usize;
            acc.add(-(w * roots[kn]) / n as f64);
        }
    }
    acc.value()
}

/// One `ψ′` term of the expansion: its coefficient
/// `(1 − χψ(−1)ψ′(−1)) τ(ψ′)` and the values of `ψ̄′`.
struct TwistTerm {
    coeff: Complex64,
    conj_values: Vec<Complex64>,
    /// `Σ_{m ≤ M} χψψ̄′(m)/m` for `0 ≤ M ≤ ⌊N_max/d⌋`.
    prefix: Vec<Complex64>,
}

struct DivisorPart {
    d: u64,
    s: u64,
    /// `χψ(d)/(d φ(r/d))`.
    weight: Complex64,
    terms: Vec<TwistTerm>,
}

/// The right-hand side of the twist expansion, prepared for a fixed
/// `(χψ, r)` and all `N ≤ n_max`, so that many `(b, N)` reuse the same
/// prefix sums.
struct TwistExpansion {
    parts: Vec<DivisorPart>,
}

impl TwistExpansion {
    fn new(f: &DirichletCharacter, r: u64, n_max: u64) -> Result<Self> {
        let qf = f.modulus();
        let f_vals = f.complex_values();
        let f_minus_one = f.parity().sign() as f64;
        let mut parts = Vec::new();
        for d in (1..=r).filter(|d| r % d == 0) {
            let s = r / d;
            let fd = f_vals[(d % qf) as usize];
            if fd == Complex64::new(0.0, 0.0) {
                continue;
            }
            let m_max = n_max / d;
            let mut terms = Vec::new();
            let mut phi_s = 0u64;
            for psi in characters_mod(s, CharacterFilter::default())? {
                phi_s = psi.factored_modulus().phi;
                let factor = 1.0 - f_minus_one * psi.parity().sign() as f64;
                if factor == 0.0 {
                    continue;
                }
                let coeff = gauss_sum(&psi)? * factor;
                let conj_values = psi.conj().complex_values();
                let mut prefix = Vec::with_capacity(m_max as usize + 1);
                prefix.push(Complex64::new(0.0, 0.0));
                let mut acc = ComplexSum::default();
                for m in 1..=m_max {
                    acc.add(f_vals[(m % qf) as usize] * conj_values[(m % s) as usize] / m as f64);
                    prefix.push(acc.value());
                }
                terms.push(TwistTerm {
                    coeff,
                    conj_values,
                    prefix,
                });
            }
            parts.push(DivisorPart {
                d,
                s,
                weight: fd / (d as f64 * phi_s as f64),
                terms,
            });
        }
        Ok(TwistExpansion { parts })
    }

    fn eval(&self, b: u64, n: u64) -> Complex64 {
        let mut total = ComplexSum::default();
        for part in &self.parts {
            let m = (n / part.d) as usize;
            let mut inner = ComplexSum::default();
            for t in &part.terms {
                inner.add(t.coeff * t.conj_values[(b % part.s) as usize] * t.prefix[m]);
            }
            total.add(part.weight * inner.value());
        }
        total.value()
    }
}

/// Both sides of the twist expansion
/// `Σ_{1≤|n|≤N} χψ(n)e(bn/r)/n
///   = Σ_{d|r} χψ(d)/d · 1/φ(r/d) · Σ_{ψ′ mod r/d} (1 − χψ(−1)ψ′(−1)) τ(ψ′) ψ̄′(b)
///     · Σ_{1≤m≤N/d} χψψ̄′(m)/m`.
///
/// Any parity of `χψ` is accepted; for even `χψ` both sides vanish.
pub fn gs_identity_check(
    chi: &DirichletCharacter,
    psi: &DirichletCharacter,
    b: i64,
    r: u64,
    n: u64,
) -> Result<IdentityCheck> {
    if r == 0 {
        return domain("r must be positive");
    }
    let b = b.rem_euclid(r as i64) as u64;
    if gcd(b, r) != 1 {
        return domain(format!("gcd({b}, {r}) ≠ 1"));
    }
    let f = chi.mul(psi);
    let lhs = twisted_log_sum_rational(&f, b as i64, r, n, true);
    let rhs = TwistExpansion::new(&f, r, n)?.eval(b, n);
    Ok(IdentityCheck::new(lhs, rhs))
}

/// One `(b, N)` cell of [`gs_identity_sweep`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GsCase {
    pub b: u64,
    pub n: u64,
    pub check: IdentityCheck,
}

/// [`gs_identity_check`] for every `b mod r` coprime to `r` and every `N`
/// in `ns`, sharing the prefix sums of the expansion.
pub fn gs_identity_sweep(
    chi: &DirichletCharacter,
    psi: &DirichletCharacter,
    r: u64,
    ns: &[u64],
) -> Result<Vec<GsCase>> {
    if r == 0 {
        return domain("r must be positive");
    }
    let f = chi.mul(psi);
    let n_max = ns.iter().copied().max().unwrap_or(0);
    let expansion = TwistExpansion::new(&f, r, n_max)?;
    let mut out = Vec::new();
    for b in (0..r).filter(|&b| gcd(b, r) == 1) {
        for &n in ns {
            let lhs = twisted_log_sum_rational(&f, b as i64, r, n, true);
            out.push(GsCase {
                b,
                n,
                check: IdentityCheck::new(lhs, expansion.eval(b, n)),
            });
        }
    }
    Ok(out)
}

/// Both sides of
/// `(1/φ(ℓ)) Σ_{b mod ℓ} ψ̄(b) Σ_{1≤|n|≤N} χ(n)(1 − e(nb/ℓ))/n
///   = −(2τ(ψ̄)/φ(ℓ)) Σ_{n≤N} χψ(n)/n`
/// for primitive non-principal `ψ mod ℓ` and odd `χψ`.
pub fn orthogonality_twist_check(
    chi: &DirichletCharacter,
    psi: &DirichletCharacter,
    n: u64,
) -> Result<IdentityCheck> {
    if psi.is_principal() || !psi.is_primitive() {
        return domain(format!("{} must be primitive and non-principal", psi.label()));
    }
    let f = chi.mul(psi);
    if !f.is_odd() {
        return domain(format!("{} · {} is even", chi.label(), psi.label()));
    }
    let l = psi.modulus();
    let phi = psi.factored_modulus().phi as f64;
    let psi_bar = psi.conj();
    let psi_bar_vals = psi_bar.complex_values();
    let q = chi.modulus();
    let chi_vals = chi.complex_values();
    let roots = roots_of_unity(l);

    let mut lhs = ComplexSum::default();
    for b in 0..l {
        let w = psi_bar_vals[b as usize];
        if w == Complex64::new(0.0, 0.0) {
            continue;
        }
        let mut inner = ComplexSum::default();
        for k in 1..=n {
            let kb = ((k as u128 * b as u128) % l as u128) as usize;
            let plus = chi_vals[(k % q) as usize] * (Complex64::new(1.0, 0.0) - roots[kb]);
            let minus = chi_vals[((q - k % q) % q) as usize]
                * (Complex64::new(1.0, 0.0) - roots[(l as usize - kb) % l as usize]);
            inner.add((plus - minus) / k as f64);
        }
        lhs.add(w * inner.value());
    }
    let lhs = lhs.value() / phi;

    let f_vals = f.complex_values();
    let qf = f.modulus();
    let log_sum = (1..=n)
        .map(|k| f_vals[(k % qf) as usize] / k as f64)
        .collect::<ComplexSum>()
        .value();
    let rhs = -(gauss_sum(&psi_bar)? * 2.0 / phi) * log_sum;
    Ok(IdentityCheck::new(lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn odd_mod(q: u64) -> DirichletCharacter {
        characters_mod(q, CharacterFilter::primitive())
            .unwrap()
            .into_iter()
            .find(|c| c.is_odd())
            .unwrap()
    }

    #[test]
    fn log_sum_examples() {
        let chi3 = DirichletCharacter::legendre(3).unwrap();
        let one = twisted_log_sum(&chi3, 0.0, 10, false);
        let expect = 1.0 - 0.5 + 0.25 - 0.2 + 1.0 / 7.0 - 0.125 + 0.1;
        assert!((one.re - expect).abs() < 1e-14 && one.im == 0.0);
        assert!((one.re - 0.667_857).abs() < 1e-6);
        let two = twisted_log_sum(&chi3, 0.0, 10, true);
        assert!((two - one * 2.0).norm() < 1e-14);

        let chi5 = DirichletCharacter::legendre(5).unwrap();
        assert!(twisted_log_sum(&chi5, 0.0, 100, true).norm() < 1e-14);
    }

    #[test]
    fn rational_phases_agree_with_real_alpha() {
        let chi = odd_mod(7);
        for (b, r) in [(1i64, 3u64), (2, 5), (5, 12)] {
            let exact = twisted_log_sum_rational(&chi, b, r, 300, true);
            let real = twisted_log_sum(&chi, b as f64 / r as f64, 300, true);
            assert!((exact - real).norm() < 1e-10);
        }
    }

    #[test]
    fn gs_examples() {
        let chi3 = DirichletCharacter::legendre(3).unwrap();
        let triv = DirichletCharacter::principal(1).unwrap();
        let c = gs_identity_check(&chi3, &triv, 0, 1, 200).unwrap();
        assert!((c.lhs - twisted_log_sum(&chi3, 0.0, 200, true)).norm() < 1e-12);
        assert!(c.holds(1e-8));

        let c = gs_identity_check(&chi3, &triv, 1, 4, 500).unwrap();
        assert!(c.abs_diff <= 1e-8, "{c:?}");

        let chi5 = DirichletCharacter::legendre(5).unwrap();
        let c = gs_identity_check(&chi5, &odd_mod(4), 2, 3, 1000).unwrap();
        assert!(c.abs_diff <= 1e-8, "{c:?}");
        assert!(gs_identity_check(&chi5, &triv, 2, 4, 10).is_err());
    }

    #[test]
    fn gs_sweep_all_parities() {
        for chi in characters_mod(7, CharacterFilter::primitive()).unwrap() {
            for psi in characters_mod(4, CharacterFilter::default()).unwrap() {
                for case in gs_identity_sweep(&chi, &psi, 12, &[10, 97]).unwrap() {
                    assert!(case.check.holds(1e-8), "{case:?}");
                }
            }
        }
    }

    #[test]
    fn orthogonality_examples() {
        let psi5 = DirichletCharacter::legendre(5).unwrap();
        for (chi, n) in [(odd_mod(4), 200u64), (odd_mod(3), 1000), (odd_mod(4), 1)] {
            let c = orthogonality_twist_check(&chi, &psi5, n).unwrap();
            assert!(c.holds(1e-9), "{c:?}");
        }
        // N = 1: the identity collapses to Σ_b ψ̄(b) e(b/ℓ) = τ(ψ̄)
        let c = orthogonality_twist_check(&odd_mod(4), &psi5, 1).unwrap();
        let tau = gauss_sum(&psi5.conj()).unwrap();
        assert!((c.rhs + tau * 2.0 / 4.0).norm() < 1e-12);

        assert!(orthogonality_twist_check(&psi5, &psi5, 10).is_err());
        let principal = DirichletCharacter::principal(5).unwrap();
        assert!(orthogonality_twist_check(&odd_mod(4), &principal, 10).is_err());
    }
}
