use std::fmt;

use num_complex::Complex64;

use crate::arith::{primes_up_to, SpfSieve};
use crate::characters::{DirichletCharacter, UnitValue};
use crate::error::{domain, Error, Result};

/// Largest `x` to which a model is extended to all integers.
pub const EXTENSION_LIMIT: u64 = 10_000_000;

/// A value at a prime: exact (root of unity or zero) or a unimodular double.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PrimeValue {
    Exact(UnitValue),
    Unimodular(Complex64),
}

impl PrimeValue {
    pub fn to_complex(self) -> Complex64 {
        match self {
            PrimeValue::Exact(v) => v.to_complex(),
            PrimeValue::Unimodular(z) => z,
        }
    }

    pub fn is_zero(self) -> bool {
        match self {
            PrimeValue::Exact(v) => v.is_zero(),
            PrimeValue::Unimodular(_) => false,
        }
    }
}

/// Where a model came from.
#[derive(Debug, Clone, PartialEq)]
pub enum Provenance {
    Character(String),
    Synthetic(String),
    /// `base · n^{it}`.
    Twisted(Box<Provenance>, f64),
    /// `f̃`: zeros at primes replaced by 1.
    Tilde(Box<Provenance>),
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Character(label) => write!(f, "chi[{label}]"),
            Provenance::Synthetic(name) => write!(f, "{name}"),
            Provenance::Twisted(base, t) => write!(f, "{base}*n^(i{t})"),
            Provenance::Tilde(base) => write!(f, "tilde({base})"),
        }
    }
}

/// A completely multiplicative function given by its values at the primes
/// `p ≤ limit`.
#[derive(Debug, Clone)]
pub struct MultiplicativeModel {
    provenance: Provenance,
    limit: u64,
    primes: Vec<u64>,
    values: Vec<PrimeValue>,
    complex: Vec<Complex64>,
}

impl MultiplicativeModel {
    fn assemble(provenance: Provenance, limit: u64, primes: Vec<u64>, values: Vec<PrimeValue>) -> Result<Self> {
        for (&p, v) in primes.iter().zip(&values) {
            if let PrimeValue::Unimodular(z) = v {
                if (z.norm() - 1.0).abs() > 1e-12 {
                    return domain(format!("value at p = {p} has modulus {}", z.norm()));
                }
            }
        }
        let complex = values.iter().map(|v| v.to_complex()).collect();
        Ok(MultiplicativeModel {
            provenance,
            limit,
            primes,
            values,
            complex,
        })
    }

    /// `f(p) = value(p)` for `p ≤ limit`.
    pub fn from_fn(
        provenance: Provenance,
        limit: u64,
        value: impl Fn(u64) -> PrimeValue,
    ) -> Result<Self> {
        let primes = primes_up_to(limit);
        let values = primes.iter().map(|&p| value(p)).collect();
        Self::assemble(provenance, limit, primes, values)
    }

    pub fn from_character(chi: &DirichletCharacter, limit: u64) -> Result<Self> {
        let q = chi.modulus();
        let table = chi.values();
        Self::from_fn(Provenance::Character(chi.label()), limit, |p| {
            PrimeValue::Exact(table[(p % q) as usize])
        })
    }

    /// `f(p) = v` at every prime.
    pub fn constant(v: UnitValue, limit: u64) -> Result<Self> {
        Self::from_fn(Provenance::Synthetic(format!("const({v})")), limit, |_| PrimeValue::Exact(v))
    }

    /// `f(p) = p^{it}`.
    pub fn archimedean(t: f64, limit: u64) -> Result<Self> {
        Self::from_fn(Provenance::Synthetic(format!("n^(i{t})")), limit, |p| {
            PrimeValue::Unimodular(Complex64::from_polar(1.0, t * (p as f64).ln()))
        })
    }

    /// `f(p) · p^{it}`.
    pub fn twisted(&self, t: f64) -> MultiplicativeModel {
        let values: Vec<PrimeValue> = self
            .primes
            .iter()
            .zip(&self.values)
            .map(|(&p, &v)| {
                if v.is_zero() || t == 0.0 {
                    v
                } else {
                    PrimeValue::Unimodular(v.to_complex() * Complex64::from_polar(1.0, t * (p as f64).ln()))
                }
            })
            .collect();
        let provenance = Provenance::Twisted(Box::new(self.provenance.clone()), t);
        Self::assemble(provenance, self.limit, self.primes.clone(), values)
            .expect("twisting preserves modulus")
    }

    /// `f̃`: `f(p)` where nonzero, 1 where `f(p) = 0`.
    pub fn tilde(&self) -> MultiplicativeModel {
        let values = self
            .values
            .iter()
            .map(|&v| if v.is_zero() { PrimeValue::Exact(UnitValue::ONE) } else { v })
            .collect();
        let provenance = Provenance::Tilde(Box::new(self.provenance.clone()));
        Self::assemble(provenance, self.limit, self.primes.clone(), values).expect("same moduli")
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn prime_values(&self) -> &[PrimeValue] {
        &self.values
    }

    pub fn complex_values(&self) -> &[Complex64] {
        &self.complex
    }

    /// `f(p)` for a prime `p ≤ limit`.
    pub fn at_prime(&self, p: u64) -> Option<PrimeValue> {
        self.primes.binary_search(&p).ok().map(|i| self.values[i])
    }

    /// Number of primes `≤ x`, or an error if the model stops short of `x`.
    pub(crate) fn primes_through(&self, x: f64) -> Result<usize> {
        if !(x >= 2.0) {
            return domain(format!("x = {x} must be at least 2"));
        }
        if x.floor() > self.limit as f64 {
            return domain(format!(
                "model {} is defined only for primes ≤ {}, needed {x}",
                self.provenance, self.limit
            ));
        }
        let xf = x.floor() as u64;
        Ok(self.primes.partition_point(|&p| p <= xf))
    }

    /// `f(p)^k = 1` wherever `f(p) ≠ 0`, for `p ≤ limit`.
    pub fn check_order(&self, k: u64) -> Result<()> {
        for (&p, &v) in self.primes.iter().zip(&self.values) {
            let ok = match v {
                PrimeValue::Exact(UnitValue::Zero) => true,
                PrimeValue::Exact(u) => u.pow(k).is_one(),
                PrimeValue::Unimodular(z) => (z.powu(k as u32) - 1.0).norm() <= 1e-12 * k as f64,
            };
            if !ok {
                return domain(format!("f({p})^{k} ≠ 1 for {}", self.provenance));
            }
        }
        Ok(())
    }

    /// `f(0), f(1), …, f(x)` for the complete multiplicative extension
    /// (`f(0)` is set to 0).
    pub fn extend(&self, x: u64) -> Result<Vec<Complex64>> {
        if x > EXTENSION_LIMIT {
            return Err(Error::Resource(format!(
                "extension to {x} exceeds {EXTENSION_LIMIT}"
            )));
        }
        if x > self.limit && x >= 2 {
            return domain(format!(
                "model {} is defined only for primes ≤ {}, needed {x}",
                self.provenance, self.limit
            ));
        }
        let local;
        let sieve = if x > 1_000_000 {
            SpfSieve::shared()
        } else {
            local = SpfSieve::new(x as usize);
            &local
        };
        let mut out = vec![Complex64::new(0.0, 0.0); x as usize + 1];
        if x >= 1 {
            out[1] = Complex64::new(1.0, 0.0);
        }
        let mut next_prime = 0usize;
        for n in 2..=x as usize {
            let p = sieve.smallest_prime_factor(n);
            if p == n {
                debug_assert_eq!(self.primes[next_prime], n as u64);
                out[n] = self.complex[next_prime];
                next_prime += 1;
            } else {
                out[n] = out[p] * out[n / p];
            }
        }
        Ok(out)
    }
}
