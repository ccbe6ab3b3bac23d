use num_complex::Complex64;

use crate::characters::DirichletCharacter;
use crate::error::{domain, Error, Result};
use crate::numeric::{roots_of_unity, ComplexSum};

/// Largest modulus for which Gauss sums are summed directly.
pub const GAUSS_DIRECT_LIMIT: u64 = 1_000_000;

/// `τ(χ) = Σ_{a mod q} χ(a) e(a/q)`.
pub fn gauss_sum(chi: &DirichletCharacter) -> Result<Complex64> {
    let q = chi.modulus();
    if q > GAUSS_DIRECT_LIMIT {
        return Err(Error::Resource(format!(
            "Gauss sum modulus {q} above {GAUSS_DIRECT_LIMIT}"
        )));
    }
    let values = chi.complex_values();
    let roots = roots_of_unity(q);
    Ok(values
        .iter()
        .zip(&roots)
        .map(|(&v, &z)| v * z)
        .collect::<ComplexSum>()
        .value())
}

/// Worst pointwise gap in the Pólya expansion truncated at `|n| ≤ q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolyaError {
    pub sup_error: f64,
    pub argmax_t: u64,
}

/// `τ(χ)/(2πi) Σ_{1≤|n|≤q} χ̄(n)(1 − e(−nt/q))/n` for `t = 0, …, q`.
///
/// The sum is folded by residue: `A_k = Σ_{n ≡ k} χ̄(n)/n` over the `2q`
/// indices, then `Σ_n χ̄(n)e(−nt/q)/n = Σ_k A_k e(−kt/q)`.
pub fn polya_rhs(chi: &DirichletCharacter) -> Result<Vec<Complex64>> {
    let q = chi.modulus();
    if !chi.is_primitive() || q < 3 {
        return domain(format!(
            "Pólya expansion needs a primitive character with q ≥ 3, got {}",
            chi.label()
        ));
    }
    let tau = gauss_sum(chi)?;
    let conj = chi.conj().complex_values();
    let sign = if chi.is_odd() { -1.0 } else { 1.0 };
    let qu = q as usize;
    let mut folded = vec![ComplexSum::default(); qu];
    for n in 1..=q {
        let k = (n % q) as usize;
        let v = conj[k] / n as f64;
        folded[k].add(v);
        // the term at −n: χ̄(−n)/(−n)
        folded[(qu - k) % qu].add(v * (-sign));
    }
    let a: Vec<Complex64> = folded.iter().map(|s| s.value()).collect();
    let total: Complex64 = a.iter().copied().collect::<ComplexSum>().value();
    let roots = roots_of_unity(q);
    let scale = tau / Complex64::new(0.0, std::f64::consts::TAU);
    let mut out = Vec::with_capacity(qu + 1);
    for t in 0..=q {
        let mut f = ComplexSum::default();
        for (k, &ak) in a.iter().enumerate() {
            let idx = (q - (k as u64 * t) % q) % q;
            f.add(ak * roots[idx as usize]);
        }
        out.push(scale * (total - f.value()));
    }
    Ok(out)
}

/// `sup_{1≤t≤q} |S(t) − RHS(t)|` against [`polya_rhs`].
pub fn polya_expansion_error(chi: &DirichletCharacter) -> Result<PolyaError> {
    let rhs = polya_rhs(chi)?;
    let q = chi.modulus();
    let values = chi.complex_values();
    let mut acc = ComplexSum::default();
    let mut best = PolyaError {
        sup_error: f64::NEG_INFINITY,
        argmax_t: 0,
    };
    for t in 1..=q {
        acc.add(values[(t % q) as usize]);
        let err = (acc.value() - rhs[t as usize]).norm();
        if err > best.sup_error {
            best = PolyaError {
                sup_error: err,
                argmax_t: t,
            };
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::{characters_mod, CharacterFilter};
    use crate::numeric::e;

    fn odd_mod4() -> DirichletCharacter {
        characters_mod(4, CharacterFilter::primitive()).unwrap().remove(0)
    }

    #[test]
    fn gauss_examples() {
        let t = gauss_sum(&odd_mod4()).unwrap();
        assert!((t - Complex64::new(0.0, 2.0)).norm() < 1e-14);
        let t5 = gauss_sum(&DirichletCharacter::legendre(5).unwrap()).unwrap();
        assert!((t5 - Complex64::new(5f64.sqrt(), 0.0)).norm() < 1e-12);
        let t0 = gauss_sum(&DirichletCharacter::principal(4).unwrap()).unwrap();
        assert!(t0.norm() < 1e-14);
    }

    #[test]
    fn quadratic_gauss_sign() {
        // τ = √p for p ≡ 1 (mod 4) and i√p for p ≡ 3 (mod 4)
        for p in [3u64, 5, 7, 11, 13, 17, 19, 23, 101, 103] {
            let t = gauss_sum(&DirichletCharacter::legendre(p).unwrap()).unwrap();
            let expect = if p % 4 == 1 {
                Complex64::new((p as f64).sqrt(), 0.0)
            } else {
                Complex64::new(0.0, (p as f64).sqrt())
            };
            assert!((t - expect).norm() < 1e-10, "p={p}");
        }
    }

    #[test]
    fn gauss_modulus_for_primitive() {
        for q in 3..=120u64 {
            for chi in characters_mod(q, CharacterFilter::primitive()).unwrap() {
                let t = gauss_sum(&chi).unwrap();
                assert!((t.norm_sqr() / q as f64 - 1.0).abs() < 1e-9, "{}", chi.label());
            }
        }
    }

    /// The expansion summed term by term over `n`, no folding.
    fn polya_naive(chi: &DirichletCharacter, t: u64) -> Complex64 {
        let q = chi.modulus() as i64;
        let tau: Complex64 = (0..q).map(|a| chi.eval_complex(a) * e(a as f64 / q as f64)).sum();
        let mut s = Complex64::new(0.0, 0.0);
        for n in (-q..=q).filter(|&n| n != 0) {
            let c = chi.eval_complex(n).conj();
            s += c * (Complex64::new(1.0, 0.0) - e(-(n as f64) * t as f64 / q as f64)) / n as f64;
        }
        tau / Complex64::new(0.0, std::f64::consts::TAU) * s
    }

    #[test]
    fn folded_expansion_matches_naive() {
        for q in [3u64, 4, 5, 7, 8, 9, 12, 13, 15] {
            for chi in characters_mod(q, CharacterFilter::primitive()).unwrap() {
                let rhs = polya_rhs(&chi).unwrap();
                for t in 0..=q {
                    assert!((rhs[t as usize] - polya_naive(&chi, t)).norm() < 1e-10);
                }
                assert!(rhs[q as usize].norm() < 1e-10);
                assert!(rhs[0].norm() < 1e-12);
            }
        }
    }

    #[test]
    fn polya_error_small() {
        for chi in [odd_mod4(), DirichletCharacter::legendre(7).unwrap()] {
            let q = chi.modulus() as f64;
            let err = polya_expansion_error(&chi).unwrap();
            assert!(err.sup_error <= 10.0 * q.ln());
        }
        for q in 3..=60u64 {
            for chi in characters_mod(q, CharacterFilter::primitive()).unwrap() {
                assert!(polya_expansion_error(&chi).unwrap().sup_error <= 10.0 * (q as f64).ln());
            }
        }
    }

    #[test]
    fn polya_rejects_imprimitive() {
        let chi = DirichletCharacter::principal(7).unwrap();
        assert!(polya_expansion_error(&chi).is_err());
        let induced = DirichletCharacter::legendre(3).unwrap().induce(6).unwrap();
        assert!(polya_expansion_error(&induced).is_err());
    }
}
