use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};

use crate::arith::FactoredModulus;
use crate::error::{domain, Error, Result};

/// Width of the band around equality in which a membership decision is
/// flagged as borderline.
pub const BORDERLINE_BAND: f64 = 1e-12;

/// `log_k t`: the logarithm iterated `k` times (`log_1 = log`).
pub fn iterated_log(t: f64, k: u32) -> Result<f64> {
    let mut v = t;
    for _ in 0..k {
        if !(v > 0.0) {
            return domain(format!("log_{k}({t}) is undefined"));
        }
        v = v.ln();
    }
    Ok(v)
}

/// A slowly growing function `ξ`.
#[derive(Debug, Clone, PartialEq)]
pub enum XiFamily {
    /// `(log_k t)^A`.
    LogPower { k: u32, a: f64 },
    /// `(log a(t) / (13 log log a(t)))^{1/(19g²)}` for an inner family `a`.
    PaperXi { g: u64, inner: Box<XiFamily> },
}

impl XiFamily {
    pub fn log2_quarter() -> Self {
        XiFamily::LogPower { k: 2, a: 0.25 }
    }

    pub fn log2_half() -> Self {
        XiFamily::LogPower { k: 2, a: 0.5 }
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        match self {
            XiFamily::LogPower { k, a } => {
                let l = iterated_log(t, *k)?;
                if !(l > 0.0) {
                    return domain(format!("log_{k}({t}) = {l} is not positive"));
                }
                Ok(l.powf(*a))
            }
            XiFamily::PaperXi { g, inner } => {
                let a = inner.eval(t)?;
                let la = iterated_log(a, 1)?;
                let lla = iterated_log(a, 2)?;
                if !(la > 0.0 && lla > 0.0) {
                    return domain(format!("a({t}) = {a} is too small"));
                }
                Ok((la / (13.0 * lla)).powf(1.0 / (19.0 * (g * g) as f64)))
            }
        }
    }

    /// A point from which the family is positive and non-decreasing
    /// (for `LogPower` with `A > 0`: the tower `e↑↑k`, where `log_k = 1`).
    pub fn t0(&self) -> f64 {
        match self {
            XiFamily::LogPower { k, .. } => (0..*k).fold(1.0f64, |acc, _| acc.exp()),
            XiFamily::PaperXi { inner, .. } => inner.t0(),
        }
    }
}

impl fmt::Display for XiFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            XiFamily::LogPower { k: 2, a } if *a == 0.25 => f.write_str("log2-quarter"),
            XiFamily::LogPower { k: 2, a } if *a == 0.5 => f.write_str("log2-half"),
            XiFamily::LogPower { k, a } => write!(f, "log{k}^{a}"),
            XiFamily::PaperXi { g, inner } => match inner.as_ref() {
                XiFamily::LogPower { k, a } => write!(f, "paper:{g}:log{k}^{a}"),
                other => write!(f, "paper:{g}:{other}"),
            },
        }
    }
}

impl FromStr for XiFamily {
    type Err = Error;

    /// Accepts `log2-quarter`, `log2-half`, `log<k>^<A>` and
    /// `paper:<g>:<family>`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("unknown ξ family {s:?}"));
        let s = s.trim();
        match s {
            "log2-quarter" => return Ok(Self::log2_quarter()),
            "log2-half" => return Ok(Self::log2_half()),
            _ => {}
        }
        if let Some(rest) = s.strip_prefix("paper:") {
            let (g, inner) = rest.split_once(':').ok_or_else(bad)?;
            let g: u64 = g.parse().map_err(|_| bad())?;
            if g == 0 {
                return Err(bad());
            }
            return Ok(XiFamily::PaperXi {
                g,
                inner: Box::new(inner.parse()?),
            });
        }
        let rest = s.strip_prefix("log").ok_or_else(bad)?;
        let (k, a) = rest.split_once('^').ok_or_else(bad)?;
        let k: u32 = k.parse().map_err(|_| bad())?;
        let a: f64 = a.parse().map_err(|_| bad())?;
        if k == 0 || !(a > 0.0) || !a.is_finite() {
            return Err(bad());
        }
        Ok(XiFamily::LogPower { k, a })
    }
}

/// Outcome of `Σ_{p|q} 1/p < log ξ(q)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Membership {
    pub member: bool,
    pub borderline: bool,
    pub prime_sum: f64,
    pub log_xi: f64,
}

/// Membership of `q` in `{q : Σ_{p|q} 1/p < log ξ(q)}`. The prime sum is
/// exact; `log ξ(q)` is a double, converted exactly to a rational.
pub fn q_class_membership(q: &FactoredModulus, xi: &XiFamily) -> Result<Membership> {
    let v = xi.eval(q.q as f64)?;
    if !(v > 1.0) {
        return domain(format!("ξ({}) = {v} is not above 1", q.q));
    }
    let log_xi = v.ln();
    let rhs = BigRational::from_float(log_xi).ok_or_else(|| Error::Domain("log ξ not finite".into()))?;
    let lhs = &q.prime_recip_sum;
    let diff = (&rhs - lhs).abs();
    let band = BigRational::new(BigInt::from(1), BigInt::from(1_000_000_000_000u64));
    Ok(Membership {
        member: *lhs < rhs,
        borderline: diff <= band,
        prime_sum: lhs.to_f64().unwrap_or(f64::NAN),
        log_xi,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::factorize;

    #[test]
    fn names_round_trip() {
        for name in ["log2-quarter", "log2-half", "log3^2", "paper:2:log2^0.5", "log1^0.75"] {
            let xi: XiFamily = name.parse().unwrap();
            assert_eq!(xi.to_string(), name);
        }
        assert!("log0^1".parse::<XiFamily>().is_err());
        assert!("log2^-1".parse::<XiFamily>().is_err());
        assert!("paper:x:log2^1".parse::<XiFamily>().is_err());
        assert!("sqrt".parse::<XiFamily>().is_err());
    }

    #[test]
    fn families_monotone_past_t0() {
        for xi in [XiFamily::log2_quarter(), XiFamily::log2_half(), "log3^2".parse().unwrap()] {
            let mut t = xi.t0() * 1.01;
            let mut prev = 0.0;
            while t < 1e300 {
                let v = xi.eval(t).unwrap();
                assert!(v > 0.0 && v >= prev);
                prev = v;
                t *= 3.0;
            }
        }
    }

    #[test]
    fn membership_examples() {
        let xi = XiFamily::log2_half();
        let big_prime = factorize(1_000_000_007).unwrap();
        assert!(q_class_membership(&big_prime, &xi).unwrap().member);
        let primorial = factorize(30030).unwrap();
        let m = q_class_membership(&primorial, &xi).unwrap();
        assert!(!m.member && !m.borderline);
        let exact = 0.5 + 1.0 / 3.0 + 0.2 + 1.0 / 7.0 + 1.0 / 11.0 + 1.0 / 13.0;
        assert!((m.prime_sum - exact).abs() < 1e-15);
        assert!((m.prime_sum - 1.344_022).abs() < 1e-6);
        let expect = 0.5 * (30030f64).ln().ln().ln();
        assert!((m.log_xi - expect).abs() < 1e-15);
        // ξ(q) ≤ 1 below the tower
        assert!(q_class_membership(&factorize(10).unwrap(), &xi).is_err());
    }

    #[test]
    fn borderline_band() {
        // choose A so that log ξ(q) lands on Σ 1/p for q = 2·3 = 6 up to rounding
        let q = factorize(6).unwrap();
        let target = 5.0 / 6.0;
        let l1 = (6f64).ln();
        let a = target / l1.ln();
        let xi = XiFamily::LogPower { k: 1, a };
        let m = q_class_membership(&q, &xi).unwrap();
        assert!(m.borderline, "{m:?}");
    }
}
