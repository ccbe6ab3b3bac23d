//! Exact arithmetic in `Z[ζ_m]`, used by the exact summation path.
//!
//! Elements are accumulated in the redundant basis `1, ζ, …, ζ^{m−1}` and
//! reduced modulo the cyclotomic polynomial `Φ_m` to a canonical vector of
//! length `φ(m)` when compared.

use std::collections::HashMap;

use num_complex::Complex64;

use crate::numeric::{roots_of_unity, ComplexSum};

/// Integer coefficients of `Φ_n`, lowest degree first.
pub fn cyclotomic_polynomial(n: u64) -> Vec<i64> {
    let mut memo = HashMap::new();
    cyclo_memo(n, &mut memo)
}

fn cyclo_memo(n: u64, memo: &mut HashMap<u64, Vec<i64>>) -> Vec<i64> {
    if let Some(p) = memo.get(&n) {
        return p.clone();
    }
    // x^n − 1
    let mut poly = vec![0i64; n as usize + 1];
    poly[0] = -1;
    poly[n as usize] = 1;
    for d in 1..n {
        if n % d == 0 {
            let divisor = cyclo_memo(d, memo);
            poly = exact_div(&poly, &divisor);
        }
    }
    memo.insert(n, poly.clone());
    poly
}

/// Quotient of `a` by the monic polynomial `b` (division must be exact).
fn exact_div(a: &[i64], b: &[i64]) -> Vec<i64> {
    let mut rem = a.to_vec();
    let db = b.len() - 1;
    let da = a.len() - 1;
    let mut quot = vec![0i64; da - db + 1];
    for i in (0..=da - db).rev() {
        let c = rem[i + db];
        quot[i] = c;
        if c != 0 {
            for (j, &bj) in b.iter().enumerate() {
                rem[i + j] -= c * bj;
            }
        }
    }
    debug_assert!(rem.iter().all(|&r| r == 0));
    quot
}

/// The ring `Z[ζ_m]` with reduction modulo `Φ_m`.
#[derive(Debug, Clone)]
pub struct CyclotomicRing {
    m: u64,
    phi_poly: Vec<i64>,
}

impl CyclotomicRing {
    pub fn new(m: u64) -> Self {
        assert!(m >= 1);
        CyclotomicRing {
            m,
            phi_poly: cyclotomic_polynomial(m),
        }
    }

    pub fn level(&self) -> u64 {
        self.m
    }

    pub fn degree(&self) -> usize {
        self.phi_poly.len() - 1
    }

    /// Canonical coordinates of `Σ_j raw[j] ζ^j` (with `raw.len() == m`).
    pub fn reduce(&self, raw: &[i64]) -> Vec<i64> {
        let deg = self.degree();
        let mut v = raw.to_vec();
        for i in (deg..v.len()).rev() {
            let c = v[i];
            if c != 0 {
                let shift = i - deg;
                for (j, &pj) in self.phi_poly.iter().enumerate() {
                    v[shift + j] -= c * pj;
                }
            }
        }
        v.truncate(deg);
        v
    }

    pub fn to_complex(&self, coords: &[i64]) -> Complex64 {
        let roots = roots_of_unity(self.m);
        coords
            .iter()
            .zip(&roots)
            .map(|(&c, &z)| z * c as f64)
            .collect::<ComplexSum>()
            .value()
    }
}

/// Running sum of `m`-th roots of unity with exact integer counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootAccumulator {
    counts: Vec<i64>,
}

impl RootAccumulator {
    pub fn new(m: u64) -> Self {
        RootAccumulator {
            counts: vec![0; m as usize],
        }
    }

    /// Adds `ζ_m^j`.
    pub fn add_root(&mut self, j: u64) {
        self.counts[j as usize] += 1;
    }

    pub fn raw(&self) -> &[i64] {
        &self.counts
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cyclotomics() {
        assert_eq!(cyclotomic_polynomial(1), vec![-1, 1]);
        assert_eq!(cyclotomic_polynomial(2), vec![1, 1]);
        assert_eq!(cyclotomic_polynomial(4), vec![1, 0, 1]);
        assert_eq!(cyclotomic_polynomial(6), vec![1, -1, 1]);
        assert_eq!(cyclotomic_polynomial(12), vec![1, 0, -1, 0, 1]);
        // Φ_105 is the first with a coefficient of absolute value 2.
        assert!(cyclotomic_polynomial(105).iter().any(|&c| c == -2));
        assert_eq!(cyclotomic_polynomial(105).len() - 1, 48);
    }

    #[test]
    fn full_root_sum_reduces_to_zero() {
        for m in 2..60u64 {
            let ring = CyclotomicRing::new(m);
            let raw = vec![1i64; m as usize];
            assert!(ring.reduce(&raw).iter().all(|&c| c == 0), "m={m}");
            let mut one = vec![0i64; m as usize];
            one[0] = 1;
            let r = ring.reduce(&one);
            assert!((ring.to_complex(&r) - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn reduction_preserves_value() {
        let ring = CyclotomicRing::new(12);
        let raw: Vec<i64> = (0..12).map(|j| (j * 7 % 5) as i64 - 2).collect();
        let direct: Complex64 = raw
            .iter()
            .zip(roots_of_unity(12))
            .map(|(&c, z)| z * c as f64)
            .sum();
        assert!((ring.to_complex(&ring.reduce(&raw)) - direct).norm() < 1e-12);
    }
}
