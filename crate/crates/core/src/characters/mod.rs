//! Exact Dirichlet characters.
//!
//! A character modulo `q` is identified by its exponent list against the
//! generator basis of [`UnitGroup`]: on the `i`-th generator, of order
//! `d_i`, it takes the value `e(exponent_i / d_i)`. Values are exact
//! [`UnitValue`]s; complex numbers only appear when a caller asks for them.
//!
//! The text form `q=<int>;e=<comma-separated exponents>` is stable and is
//! what CSV output and command-line arguments use.

mod group;
mod unit_value;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;

pub use group::{bsgs, discrete_log, UnitGroup, LOG_TABLE_LIMIT};
pub use unit_value::UnitValue;

use crate::arith::{crt, factorize, gcd, is_prime, lcm, pow_mod, FactoredModulus};
use crate::error::{domain, Error, Result};
use crate::numeric::roots_of_unity;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn sign(self) -> i32 {
        match self {
            Parity::Even => 1,
            Parity::Odd => -1,
        }
    }

    pub fn flip(self) -> Parity {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }

    pub fn times(self, other: Parity) -> Parity {
        if self == other {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        })
    }
}

impl FromStr for Parity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "even" | "+1" | "1" => Ok(Parity::Even),
            "odd" | "-1" => Ok(Parity::Odd),
            _ => Err(Error::Parse(format!("unknown parity {s:?}"))),
        }
    }
}

/// A Dirichlet character modulo `q`.
#[derive(Clone)]
pub struct DirichletCharacter {
    group: Arc<UnitGroup>,
    exponents: Vec<u64>,
    /// `exponents[i] · (L / d_i) mod L` with `L` the group exponent.
    weights: Vec<u64>,
    order: u64,
    parity: Parity,
    conductor: u64,
}

/// Output of [`DirichletCharacter::primitive_part`].
#[derive(Debug, Clone)]
pub struct PrimitiveDecomposition {
    /// The primitive character inducing `χ`.
    pub primitive: DirichletCharacter,
    pub conductor: u64,
    /// `q / conductor`, the modulus of the principal factor.
    pub cofactor: u64,
}

impl DirichletCharacter {
    pub fn new(group: Arc<UnitGroup>, exponents: Vec<u64>) -> Result<Self> {
        let orders = group.generator_orders();
        if exponents.len() != orders.len() {
            return domain(format!(
                "modulus {} needs {} exponents, got {}",
                group.q(),
                orders.len(),
                exponents.len()
            ));
        }
        if let Some((i, _)) = exponents.iter().zip(orders).enumerate().find(|(_, (e, d))| e >= d) {
            return domain(format!(
                "exponent {} out of range for generator of order {}",
                exponents[i], orders[i]
            ));
        }
        let l = group.exponent();
        let weights = exponents
            .iter()
            .zip(orders)
            .map(|(&e, &d)| e * (l / d) % l)
            .collect();
        let order = exponents
            .iter()
            .zip(orders)
            .fold(1, |acc, (&e, &d)| lcm(acc, d / gcd(e, d)));
        let conductor = conductor_from_exponents(&group, &exponents);
        let mut chi = DirichletCharacter {
            group,
            exponents,
            weights,
            order,
            parity: Parity::Even,
            conductor,
        };
        chi.parity = match chi.eval(-1) {
            v if v.is_one() => Parity::Even,
            v if v == UnitValue::MINUS_ONE => Parity::Odd,
            v => unreachable!("χ(−1) = {v}"),
        };
        Ok(chi)
    }

    pub fn principal(q: u64) -> Result<Self> {
        let group = Arc::new(UnitGroup::new(q)?);
        let n = group.generator_orders().len();
        Self::new(group, vec![0; n])
    }

    /// The character taking `values[i]` on the `i`-th generator.
    pub fn from_generator_values(group: Arc<UnitGroup>, values: &[UnitValue]) -> Result<Self> {
        let orders = group.generator_orders().to_vec();
        let mut exps = Vec::with_capacity(values.len());
        for (&v, &d) in values.iter().zip(&orders) {
            match v {
                UnitValue::Root { num, den } if d % den == 0 => exps.push(num * (d / den)),
                _ => return domain(format!("value {v} is not a root of unity of order dividing {d}")),
            }
        }
        Self::new(group, exps)
    }

    /// The quadratic character `(·/p)` for an odd prime `p`.
    pub fn legendre(p: u64) -> Result<Self> {
        if p == 2 || !is_prime(p) {
            return domain(format!("legendre symbol needs an odd prime, got {p}"));
        }
        let group = Arc::new(UnitGroup::new(p)?);
        let d = group.generator_orders()[0];
        Self::new(group, vec![d / 2])
    }

    pub fn group(&self) -> &Arc<UnitGroup> {
        &self.group
    }

    pub fn modulus(&self) -> u64 {
        self.group.q()
    }

    pub fn factored_modulus(&self) -> &FactoredModulus {
        self.group.modulus()
    }

    pub fn exponents(&self) -> &[u64] {
        &self.exponents
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn is_odd(&self) -> bool {
        self.parity == Parity::Odd
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    pub fn is_primitive(&self) -> bool {
        self.conductor == self.modulus()
    }

    pub fn is_principal(&self) -> bool {
        self.order == 1
    }

    /// `χ(n)`, for any integer `n` (negative `n` via `χ(−n) = χ(−1)χ(n)`,
    /// which is what reducing mod `q` gives).
    pub fn eval(&self, n: i64) -> UnitValue {
        let k = self.weights.len();
        let mut buf = [0u64; 24];
        if !self.group.logs_into(n, &mut buf[..k]) {
            return UnitValue::Zero;
        }
        let l = self.group.exponent();
        let s = self
            .weights
            .iter()
            .zip(&buf[..k])
            .fold(0u128, |acc, (&w, &x)| (acc + w as u128 * x as u128) % l as u128);
        UnitValue::root(s as i64, l)
    }

    pub fn eval_complex(&self, n: i64) -> Complex64 {
        self.eval(n).to_complex()
    }

    /// Values on one full period, indexed by `n mod q`.
    pub fn values(&self) -> Vec<UnitValue> {
        (0..self.modulus() as i64).map(|n| self.eval(n)).collect()
    }

    /// Complex values on one full period, indexed by `n mod q`.
    pub fn complex_values(&self) -> Vec<Complex64> {
        let roots = roots_of_unity(self.order);
        self.values()
            .into_iter()
            .map(|v| match v {
                UnitValue::Zero => Complex64::new(0.0, 0.0),
                UnitValue::Root { num, den } => roots[(num * (self.order / den)) as usize],
            })
            .collect()
    }

    pub fn conj(&self) -> DirichletCharacter {
        self.pow(self.order - 1)
    }

    pub fn pow(&self, k: u64) -> DirichletCharacter {
        let exps = self
            .exponents
            .iter()
            .zip(self.group.generator_orders())
            .map(|(&e, &d)| (e as u128 * k as u128 % d as u128) as u64)
            .collect();
        DirichletCharacter::new(self.group.clone(), exps).expect("exponents stay in range")
    }

    /// The character modulo `target` induced by `self`; `q` must divide
    /// `target`.
    pub fn induce(&self, target: u64) -> Result<DirichletCharacter> {
        if target == 0 || target % self.modulus() != 0 {
            return domain(format!(
                "cannot induce a character mod {} to modulus {target}",
                self.modulus()
            ));
        }
        if target == self.modulus() {
            return Ok(self.clone());
        }
        let group = Arc::new(UnitGroup::new(target)?);
        self.induce_into(group)
    }

    fn induce_into(&self, group: Arc<UnitGroup>) -> Result<DirichletCharacter> {
        let values: Vec<UnitValue> = group
            .generators_mod_q()
            .into_iter()
            .map(|g| self.eval(g as i64))
            .collect();
        DirichletCharacter::from_generator_values(group, &values)
    }

    /// Pointwise product; the result lives modulo `lcm(q₁, q₂)`.
    pub fn mul(&self, other: &DirichletCharacter) -> DirichletCharacter {
        let l = lcm(self.modulus(), other.modulus());
        let group = if l == self.modulus() {
            self.group.clone()
        } else if l == other.modulus() {
            other.group.clone()
        } else {
            Arc::new(UnitGroup::new(l).expect("lcm is positive"))
        };
        let a = self.induce_into(group.clone()).expect("q₁ divides lcm");
        let b = other.induce_into(group.clone()).expect("q₂ divides lcm");
        let exps = a
            .exponents
            .iter()
            .zip(&b.exponents)
            .zip(group.generator_orders())
            .map(|((&x, &y), &d)| (x + y) % d)
            .collect();
        DirichletCharacter::new(group, exps).expect("exponents stay in range")
    }

    /// The primitive character `ξ*` of conductor `q*` inducing `χ`, together
    /// with `q*` and `q / q*`.
    pub fn primitive_part(&self) -> PrimitiveDecomposition {
        let q = self.modulus();
        let qstar = self.conductor;
        let small = factorize(qstar).expect("conductor is positive");
        let group = Arc::new(UnitGroup::from_modulus(small.clone()).expect("valid modulus"));
        let big = self.factored_modulus();
        let values: Vec<UnitValue> = group
            .generators_mod_q()
            .into_iter()
            .map(|g| self.eval(lift_unit(g, &small, big) as i64))
            .collect();
        let primitive = DirichletCharacter::from_generator_values(group, &values)
            .expect("χ is trivial on the kernel of reduction mod its conductor");
        PrimitiveDecomposition {
            primitive,
            conductor: qstar,
            cofactor: q / qstar,
        }
    }

    /// `n_χ`: the least `n` with `χ(n) ∉ {0, 1}`, or `None` for principal
    /// characters. The minimiser is always prime, so only primes are tried.
    pub fn n_chi(&self) -> Option<u64> {
        if self.is_principal() {
            return None;
        }
        let q = self.modulus();
        let n = (2..q).find(|&p| {
            is_prime(p) && {
                let v = self.eval(p as i64);
                !v.is_zero() && !v.is_one()
            }
        })?;
        debug_assert!(!self.eval(n as i64).is_one());
        Some(n)
    }

    /// The stable text label `q=<int>;e=<exponents>`.
    pub fn label(&self) -> String {
        let exps: Vec<String> = self.exponents.iter().map(u64::to_string).collect();
        format!("q={};e={}", self.modulus(), exps.join(","))
    }

    pub fn parse(label: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("expected `q=<int>;e=<exponents>`, got {label:?}"));
        let (qpart, epart) = label.trim().split_once(';').ok_or_else(bad)?;
        let q: u64 = qpart
            .trim()
            .strip_prefix("q=")
            .ok_or_else(bad)?
            .trim()
            .parse()
            .map_err(|_| bad())?;
        let list = epart.trim().strip_prefix("e=").ok_or_else(bad)?.trim();
        let exps = if list.is_empty() {
            Vec::new()
        } else {
            list.split(',')
                .map(|s| s.trim().parse::<u64>().map_err(|_| bad()))
                .collect::<Result<Vec<_>>>()?
        };
        let group = Arc::new(UnitGroup::new(q)?);
        Self::new(group, exps)
    }

    /// Conrey index `n` with `χ = χ_q(n, ·)`. Agrees with the usual Conrey
    /// labels wherever the least primitive root of `p^e` is also the one the
    /// Conrey convention picks (that is, away from the rare primes whose
    /// least primitive root fails modulo `p²`).
    pub fn conrey_index(&self) -> u64 {
        let mut residues = Vec::new();
        let mut idx = 0;
        for c in &self.group.components {
            let n = match c.gens.len() {
                0 => 1,
                1 => pow_mod(c.gens[0].0, self.exponents[idx], c.pe),
                _ => {
                    let five = pow_mod(5, self.exponents[idx + 1], c.pe);
                    if self.exponents[idx] == 1 {
                        c.pe - five
                    } else {
                        five
                    }
                }
            };
            idx += c.gens.len();
            residues.push((n, c.pe));
        }
        if self.modulus() == 1 {
            1
        } else {
            crt(&residues)
        }
    }
}

/// An integer `N` with `N ≡ n (mod small.q)` and `N ≡ 1` modulo every prime
/// power of `big` whose prime does not divide `small.q`. Requires
/// `small.q | big.q` and `gcd(n, small.q) = 1`.
fn lift_unit(n: u64, small: &FactoredModulus, big: &FactoredModulus) -> u64 {
    let residues: Vec<(u64, u64)> = big
        .factors
        .iter()
        .map(|&(p, e)| {
            let pe = p.pow(e);
            if small.q % p == 0 {
                (n % pe, pe)
            } else {
                (1 % pe, pe)
            }
        })
        .collect();
    crt(&residues)
}

fn conductor_from_exponents(group: &UnitGroup, exps: &[u64]) -> u64 {
    let mut cond = 1u64;
    let mut idx = 0;
    for c in &group.components {
        let f = match c.gens.len() {
            0 => 0,
            1 if c.p == 2 => {
                // modulus 4
                if exps[idx] == 0 {
                    0
                } else {
                    2
                }
            }
            1 => {
                let a = exps[idx];
                if a == 0 {
                    0
                } else {
                    c.e - valuation(a, c.p).min(c.e - 1)
                }
            }
            _ => {
                let (a, b) = (exps[idx], exps[idx + 1]);
                if b == 0 {
                    if a == 0 {
                        0
                    } else {
                        2
                    }
                } else {
                    c.e - valuation(b, 2)
                }
            }
        };
        idx += c.gens.len();
        cond *= c.p.pow(f);
    }
    cond
}

fn valuation(mut n: u64, p: u64) -> u32 {
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

impl PartialEq for DirichletCharacter {
    fn eq(&self, other: &Self) -> bool {
        self.modulus() == other.modulus() && self.exponents == other.exponents
    }
}

impl Eq for DirichletCharacter {}

impl fmt::Debug for DirichletCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "DirichletCharacter({}, order {}, {}, conductor {})",
            self.label(),
            self.order,
            self.parity,
            self.conductor
        )
    }
}

impl fmt::Display for DirichletCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl FromStr for DirichletCharacter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        DirichletCharacter::parse(s)
    }
}

/// Restrictions applied by [`enumerate_characters`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CharacterFilter {
    pub order: Option<u64>,
    pub parity: Option<Parity>,
    pub primitive_only: bool,
}

impl CharacterFilter {
    pub fn primitive() -> Self {
        CharacterFilter {
            primitive_only: true,
            ..Default::default()
        }
    }

    pub fn accepts(&self, chi: &DirichletCharacter) -> bool {
        self.order.map_or(true, |g| chi.order() == g)
            && self.parity.map_or(true, |p| chi.parity() == p)
            && (!self.primitive_only || chi.is_primitive())
    }
}

/// Every character modulo `q` passing `filter`, in lexicographic order of
/// exponent lists.
pub fn enumerate_characters(q: &FactoredModulus, filter: CharacterFilter) -> Vec<DirichletCharacter> {
    let group = Arc::new(UnitGroup::from_modulus(q.clone()).expect("valid modulus"));
    enumerate_in_group(&group, filter)
}

pub fn enumerate_in_group(group: &Arc<UnitGroup>, filter: CharacterFilter) -> Vec<DirichletCharacter> {
    let orders = group.generator_orders().to_vec();
    let mut exps = vec![0u64; orders.len()];
    let mut out = Vec::new();
    loop {
        let order = exps
            .iter()
            .zip(&orders)
            .fold(1, |acc, (&e, &d)| lcm(acc, d / gcd(e, d)));
        if filter.order.map_or(true, |g| g == order) {
            let chi = DirichletCharacter::new(group.clone(), exps.clone()).expect("in range");
            if filter.accepts(&chi) {
                out.push(chi);
            }
        }
        // odometer, last coordinate fastest
        let mut i = orders.len();
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            exps[i] += 1;
            if exps[i] < orders[i] {
                break;
            }
            exps[i] = 0;
        }
    }
}

/// Shorthand for [`enumerate_characters`] from a bare modulus.
pub fn characters_mod(q: u64, filter: CharacterFilter) -> Result<Vec<DirichletCharacter>> {
    Ok(enumerate_characters(&factorize(q)?, filter))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_period(chi: &DirichletCharacter) -> u64 {
        // least d | q such that χ(n) = χ(m) whenever n ≡ m (mod d), both coprime to q
        let q = chi.modulus();
        (1..=q)
            .filter(|d| q % d == 0)
            .find(|&d| {
                (1..q as i64).all(|n| {
                    if gcd(n as u64, q) != 1 {
                        return true;
                    }
                    (1..q as i64).all(|m| {
                        gcd(m as u64, q) != 1 || (n - m) % d as i64 != 0 || chi.eval(n) == chi.eval(m)
                    })
                })
            })
            .unwrap()
    }

    #[test]
    fn enumeration_examples() {
        let five = characters_mod(
            5,
            CharacterFilter {
                order: Some(4),
                primitive_only: true,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(five.len(), 2);

        let three = characters_mod(
            3,
            CharacterFilter {
                order: Some(2),
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(three.len(), 1);
        assert!(three[0].is_odd() && three[0].is_primitive());

        assert_eq!(characters_mod(1, CharacterFilter::default()).unwrap().len(), 1);
    }

    #[test]
    fn eval_examples() {
        let mod4 = characters_mod(
            4,
            CharacterFilter {
                order: Some(2),
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(mod4[0].eval(3), UnitValue::MINUS_ONE);
        let leg7 = DirichletCharacter::legendre(7).unwrap();
        assert_eq!(leg7.eval(3), UnitValue::MINUS_ONE);
        for sq in [1, 2, 4] {
            assert!(leg7.eval(sq).is_one());
        }
        for chi in characters_mod(6, CharacterFilter::default()).unwrap() {
            assert!(chi.eval(3).is_zero());
        }
    }

    #[test]
    fn legendre_matches_euler_criterion() {
        for p in [3u64, 5, 7, 11, 13, 101, 997] {
            let chi = DirichletCharacter::legendre(p).unwrap();
            for n in 1..p {
                let euler = pow_mod(n, (p - 1) / 2, p);
                let expect = if euler == 1 {
                    UnitValue::ONE
                } else {
                    UnitValue::MINUS_ONE
                };
                assert_eq!(chi.eval(n as i64), expect);
            }
        }
    }

    #[test]
    fn primitive_part_examples() {
        let principal = DirichletCharacter::principal(12).unwrap();
        let d = principal.primitive_part();
        assert_eq!(d.conductor, 1);
        assert_eq!(d.primitive.modulus(), 1);

        let odd4 = DirichletCharacter::parse("q=4;e=1").unwrap();
        let induced = odd4.induce(8).unwrap();
        assert_eq!(induced.conductor(), 4);
        assert!(!induced.is_primitive());
        for n in (1..64).step_by(2) {
            assert_eq!(induced.eval(n), odd4.eval(n));
        }
        assert_eq!(induced.primitive_part().primitive, odd4);

        let leg5 = DirichletCharacter::legendre(5).unwrap();
        assert_eq!(leg5.conductor(), 5);
        assert_eq!(brute_period(&leg5), 5);
    }

    #[test]
    fn conductor_matches_brute_force_period() {
        for q in 1..=64u64 {
            for chi in characters_mod(q, CharacterFilter::default()).unwrap() {
                assert_eq!(chi.conductor(), brute_period(&chi), "{chi:?}");
            }
        }
    }

    #[test]
    fn multiply_and_conjugate() {
        let leg7 = DirichletCharacter::legendre(7).unwrap();
        assert!(leg7.mul(&leg7.conj()).is_principal());
        let odd4 = DirichletCharacter::parse("q=4;e=1").unwrap();
        let odd3 = DirichletCharacter::legendre(3).unwrap();
        let prod = odd4.mul(&odd3);
        assert_eq!(prod.modulus(), 12);
        assert_eq!(prod.parity(), Parity::Even);
        for n in -30..30 {
            assert_eq!(prod.eval(n), odd4.eval(n) * odd3.eval(n));
        }
        let leg5 = DirichletCharacter::legendre(5).unwrap();
        let sq = leg5.mul(&leg5);
        assert!(sq.is_principal());
        assert_eq!(sq.modulus(), 5);

        for chi in characters_mod(45, CharacterFilter::default()).unwrap() {
            let c = chi.conj();
            assert_eq!(c.order(), chi.order());
            assert_eq!(c.parity(), chi.parity());
            for n in 0..45 {
                assert_eq!(c.eval(n), chi.eval(n).conj());
            }
        }
    }

    #[test]
    fn n_chi_examples() {
        assert_eq!(DirichletCharacter::legendre(7).unwrap().n_chi(), Some(3));
        assert_eq!(DirichletCharacter::legendre(5).unwrap().n_chi(), Some(2));
        assert_eq!(DirichletCharacter::principal(6).unwrap().n_chi(), None);
        assert_eq!(DirichletCharacter::legendre(71).unwrap().n_chi(), Some(7));
    }

    #[test]
    fn label_round_trip_and_errors() {
        for chi in characters_mod(40, CharacterFilter::default()).unwrap() {
            assert_eq!(DirichletCharacter::parse(&chi.label()).unwrap(), chi);
        }
        assert_eq!(DirichletCharacter::principal(1).unwrap().label(), "q=1;e=");
        assert!(DirichletCharacter::parse("q=7;e=6").is_err());
        assert!(DirichletCharacter::parse("q=8;e=1").is_err());
        assert!(matches!(DirichletCharacter::parse("7;1"), Err(Error::Parse(_))));
    }

    #[test]
    fn conrey_indices() {
        // Conrey label 7.3 is the order-6 character sending 3 to e(1/6).
        assert_eq!(DirichletCharacter::parse("q=7;e=1").unwrap().conrey_index(), 3);
        assert_eq!(DirichletCharacter::legendre(7).unwrap().conrey_index(), 6);
        assert_eq!(DirichletCharacter::parse("q=4;e=1").unwrap().conrey_index(), 3);
        assert_eq!(DirichletCharacter::principal(9).unwrap().conrey_index(), 1);
        // distinct characters get distinct units
        let mut seen: Vec<u64> = characters_mod(360, CharacterFilter::default())
            .unwrap()
            .iter()
            .map(|c| c.conrey_index())
            .collect();
        seen.sort_unstable();
        seen.dedup();
        assert_eq!(seen.len(), 96);
        assert!(seen.iter().all(|&n| gcd(n, 360) == 1));
    }
}
