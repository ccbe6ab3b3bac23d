use std::fmt;
use std::ops::Mul;

use num_complex::Complex64;

use crate::arith::{gcd, lcm};
use crate::numeric::e_frac;

/// An exact value in `μ_∞ ∪ {0}`: either zero or `e(num/den)` with the
/// fraction in lowest terms and `0 ≤ num < den`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnitValue {
    Zero,
    Root { num: u64, den: u64 },
}

impl UnitValue {
    pub const ONE: UnitValue = UnitValue::Root { num: 0, den: 1 };
    pub const MINUS_ONE: UnitValue = UnitValue::Root { num: 1, den: 2 };

    /// Canonical `e(a/m)`.
    pub fn root(a: i64, m: u64) -> UnitValue {
        assert!(m > 0, "root of unity with zero denominator");
        let a = a.rem_euclid(m as i64) as u64;
        let g = gcd(a, m);
        UnitValue::Root {
            num: a / g,
            den: m / g,
        }
    }

    pub fn is_zero(self) -> bool {
        matches!(self, UnitValue::Zero)
    }

    pub fn is_one(self) -> bool {
        self == UnitValue::ONE
    }

    pub fn conj(self) -> UnitValue {
        match self {
            UnitValue::Zero => UnitValue::Zero,
            UnitValue::Root { num, den } => UnitValue::root(-(num as i64), den),
        }
    }

    pub fn pow(self, k: u64) -> UnitValue {
        match self {
            UnitValue::Zero if k == 0 => UnitValue::ONE,
            UnitValue::Zero => UnitValue::Zero,
            UnitValue::Root { num, den } => {
                let a = (num as u128 * k as u128 % den as u128) as i64;
                UnitValue::root(a, den)
            }
        }
    }

    /// Multiplicative order of the value (`None` for zero).
    pub fn order(self) -> Option<u64> {
        match self {
            UnitValue::Zero => None,
            UnitValue::Root { den, .. } => Some(den),
        }
    }

    /// The angle `θ` in turns with `value = e(θ)`, `θ ∈ [0, 1)`.
    pub fn turns(self) -> Option<f64> {
        match self {
            UnitValue::Zero => None,
            UnitValue::Root { num, den } => Some(num as f64 / den as f64),
        }
    }

    pub fn to_complex(self) -> Complex64 {
        match self {
            UnitValue::Zero => Complex64::new(0.0, 0.0),
            UnitValue::Root { num, den } => e_frac(num as i64, den),
        }
    }
}

impl Mul for UnitValue {
    type Output = UnitValue;

    fn mul(self, rhs: UnitValue) -> UnitValue {
        match (self, rhs) {
            (UnitValue::Root { num: a, den: m }, UnitValue::Root { num: b, den: n }) => {
                let l = lcm(m, n);
                let s = (a as u128 * (l / m) as u128 + b as u128 * (l / n) as u128) % l as u128;
                UnitValue::root(s as i64, l)
            }
            _ => UnitValue::Zero,
        }
    }
}

impl fmt::Display for UnitValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            UnitValue::Zero => write!(f, "0"),
            UnitValue::Root { num: 0, .. } => write!(f, "1"),
            UnitValue::Root { num: 1, den: 2 } => write!(f, "-1"),
            UnitValue::Root { num, den } => write!(f, "e({num}/{den})"),
        }
    }
}
