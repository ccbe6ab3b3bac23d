use std::fmt;

use crate::arith::gcd;
use crate::error::{domain, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Arc {
    Major,
    Minor,
}

impl fmt::Display for Arc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Arc::Major => "major",
            Arc::Minor => "minor",
        })
    }
}

/// `α ≈ b/r` with `r ≤ R` and `|α − b/r| ≤ 1/(rR)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RationalApprox {
    pub alpha: f64,
    pub b: u64,
    pub r: u64,
    pub err: f64,
    pub arc: Arc,
}

/// Continued-fraction convergents of `α` with denominator at most `r_max`.
fn convergents(alpha: f64, r_max: f64) -> Vec<(u64, u64)> {
    let (mut p0, mut q0, mut p1, mut q1) = (1u64, 0u64, alpha.floor() as u64, 1u64);
    let mut out = vec![(p1, q1)];
    let mut x = alpha - alpha.floor();
    while x > 1e-15 && out.len() < 64 {
        x = 1.0 / x;
        let a = x.floor();
        x -= a;
        let a = a as u64;
        let (p2, q2) = match (a.checked_mul(p1), a.checked_mul(q1)) {
            (Some(ap), Some(aq)) => (ap + p0, aq + q0),
            _ => break,
        };
        if q2 as f64 > r_max {
            break;
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        out.push((p1, q1));
    }
    out
}

/// The smallest-denominator continued-fraction convergent `b/r` of `α`
/// with `r ≤ R` and `|α − b/r| ≤ 1/(rR)`, classified as a major arc when
/// `r ≤ M`.
pub fn dirichlet_approx(alpha: f64, r_bound: f64, m_bound: f64) -> Result<RationalApprox> {
    if !(0.0..=1.0).contains(&alpha) {
        return domain(format!("α = {alpha} outside [0, 1]"));
    }
    if !(1.0 <= m_bound && m_bound <= r_bound) {
        return domain(format!("need 1 ≤ M ≤ R, got M = {m_bound}, R = {r_bound}"));
    }
    let cands = convergents(alpha, r_bound);
    let pick = cands
        .iter()
        .find(|&&(b, r)| (alpha - b as f64 / r as f64).abs() <= 1.0 / (r as f64 * r_bound))
        .or(cands.last())
        .copied()
        .unwrap_or((0, 1));
    let (b, r) = pick;
    debug_assert_eq!(gcd(b, r), 1);
    Ok(RationalApprox {
        alpha,
        b,
        r,
        err: (alpha - b as f64 / r as f64).abs(),
        arc: if r as f64 <= m_bound { Arc::Major } else { Arc::Minor },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let a = dirichlet_approx(0.0, 10.0, 2.0).unwrap();
        assert_eq!((a.b, a.r, a.arc), (0, 1, Arc::Major));
        let a = dirichlet_approx(1.0 / 3.0, 10.0, 5.0).unwrap();
        assert_eq!((a.b, a.r, a.arc), (1, 3, Arc::Major));
        assert!(a.err < 1e-15);
        let a = dirichlet_approx(1.0, 10.0, 5.0).unwrap();
        assert_eq!((a.b, a.r), (1, 1));
    }

    #[test]
    fn sqrt_two_minus_one() {
        // Convergents 0/1, 1/2, 2/5, 5/12, 12/29, 29/70, 70/169.
        // 12/29 misses 1/(29·100) (its error is about 4.2e-4), so the first
        // admissible convergent is 29/70.
        let alpha = 2f64.sqrt() - 1.0;
        let c = convergents(alpha, 100.0);
        assert_eq!(c, vec![(0, 1), (1, 2), (2, 5), (5, 12), (12, 29), (29, 70)]);
        assert!((alpha - 12.0 / 29.0).abs() > 1.0 / 2900.0);
        let a = dirichlet_approx(alpha, 100.0, 5.0).unwrap();
        assert_eq!((a.b, a.r, a.arc), (29, 70, Arc::Minor));
        assert!(a.err <= 1.0 / 7000.0);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(dirichlet_approx(1.5, 10.0, 2.0).is_err());
        assert!(dirichlet_approx(0.5, 10.0, 20.0).is_err());
        assert!(dirichlet_approx(0.5, 10.0, 0.5).is_err());
    }
}
