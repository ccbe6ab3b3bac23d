//! Integer arithmetic underneath the character machinery: factorization,
//! unit-group generators, multiplicative orders, coprime counting and prime
//! reciprocal sums.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{domain, Error, Result};

/// Largest `x` accepted by [`mertens_prime_sum`].
pub const PRIME_SUM_LIMIT: u64 = 1_000_000_000;

/// Default bound of the cached smallest-prime-factor sieve.
pub const DEFAULT_SPF_BOUND: usize = 10_000_000;

const TRIAL_PRIME_BOUND: u64 = 1_000_000;

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        return 0;
    }
    a / gcd(a, b) * b
}

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let (mut old_r, mut r) = (a as i128 % m as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let quot = old_r / r;
        (old_r, r) = (r, old_r - quot * r);
        (old_s, s) = (s, old_s - quot * s);
    }
    if old_r != 1 {
        return if m == 1 { Some(0) } else { None };
    }
    Some(old_s.rem_euclid(m as i128) as u64)
}

/// Chinese remaindering over pairwise coprime moduli: returns the unique
/// `x mod Π m_i` with `x ≡ r_i (mod m_i)`.
pub fn crt(residues: &[(u64, u64)]) -> u64 {
    let mut x = 0u64;
    let mut modulus = 1u64;
    for &(r, m) in residues {
        let inv = inv_mod(modulus % m, m).expect("crt moduli must be pairwise coprime");
        // x + modulus * k ≡ r (mod m)
        let diff = (r % m + m - x % m) % m;
        let k = mul_mod(diff, inv, m);
        x += modulus * k;
        modulus *= m;
    }
    x
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    // Deterministic for every 64-bit input.
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Brent's variant of Pollard rho; `n` must be odd and composite.
fn pollard_rho(n: u64) -> u64 {
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut g) = (2u64, 2u64, 1u64);
        let mut q = 1u64;
        let mut r = 1u64;
        let m = 128u64;
        let mut ys = 0u64;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..m.min(r - k) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = gcd(q, n);
                k += m;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = gcd(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
        c += 1;
    }
}

fn trial_primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| primes_up_to(TRIAL_PRIME_BOUND))
}

/// All primes `≤ limit` by a plain sieve of Eratosthenes.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    let mut out = Vec::new();
    for_each_prime(limit, |p| out.push(p));
    out
}

/// Calls `visit` on every prime `≤ limit` in increasing order, using a
/// segmented sieve so memory stays at `O(√limit)`.
pub fn for_each_prime(limit: u64, mut visit: impl FnMut(u64)) {
    if limit < 2 {
        return;
    }
    let root = (limit as f64).sqrt() as u64 + 1;
    let mut small = vec![true; (root + 1) as usize];
    small[0] = false;
    small[1] = false;
    let mut i = 2usize;
    while i * i <= root as usize {
        if small[i] {
            let mut j = i * i;
            while j <= root as usize {
                small[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    let base: Vec<u64> = (2..=root).filter(|&k| small[k as usize]).collect();

    const SEGMENT: u64 = 1 << 18;
    let mut seg = vec![true; SEGMENT as usize];
    let mut lo = 2u64;
    while lo <= limit {
        let hi = (lo + SEGMENT - 1).min(limit);
        seg.iter_mut().for_each(|b| *b = true);
        for &p in &base {
            if p * p > hi {
                break;
            }
            let mut start = (lo + p - 1) / p * p;
            if start < p * p {
                start = p * p;
            }
            let mut m = start;
            while m <= hi {
                seg[(m - lo) as usize] = false;
                m += p;
            }
        }
        for n in lo..=hi {
            if seg[(n - lo) as usize] {
                visit(n);
            }
        }
        lo = hi + 1;
    }
}

/// A positive integer together with its prime factorization and the derived
/// quantities the character code needs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactoredModulus {
    pub q: u64,
    /// `(prime, exponent)` pairs in increasing prime order.
    pub factors: Vec<(u64, u32)>,
    pub phi: u64,
    pub radical: u64,
    /// Exact `Σ_{p | q} 1/p`.
    pub prime_recip_sum: BigRational,
}

impl FactoredModulus {
    pub fn new(q: u64) -> Result<Self> {
        factorize(q)
    }

    pub fn from_factors(factors: Vec<(u64, u32)>) -> Self {
        let mut q = 1u64;
        let mut phi = 1u64;
        let mut radical = 1u64;
        let mut recip = BigRational::zero();
        for &(p, e) in &factors {
            let pe = p.pow(e);
            q *= pe;
            phi *= pe / p * (p - 1);
            radical *= p;
            recip += BigRational::new(BigInt::from(1), BigInt::from(p));
        }
        FactoredModulus {
            q,
            factors,
            phi,
            radical,
            prime_recip_sum: recip,
        }
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    pub fn prime_powers(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, e)| p.pow(e))
    }

    pub fn is_coprime(&self, n: i64) -> bool {
        gcd(n.unsigned_abs(), self.q) == 1
    }

    pub fn prime_recip_sum_f64(&self) -> f64 {
        self.primes().map(|p| 1.0 / p as f64).sum()
    }
}

/// Complete factorization of `n ≥ 1`: trial division by the primes below
/// 10^6, then Miller–Rabin and Pollard rho for whatever cofactor remains.
pub fn factorize(n: u64) -> Result<FactoredModulus> {
    if n == 0 {
        return domain("cannot factorize 0");
    }
    let mut primes = Vec::new();
    let mut m = n;
    for &p in trial_primes() {
        if p * p > m {
            break;
        }
        while m % p == 0 {
            primes.push(p);
            m /= p;
        }
    }
    if m > 1 {
        if m < TRIAL_PRIME_BOUND * TRIAL_PRIME_BOUND || is_prime(m) {
            primes.push(m);
        } else {
            split_large(m, &mut primes);
        }
    }
    primes.sort_unstable();
    let mut factors: Vec<(u64, u32)> = Vec::new();
    for p in primes {
        match factors.last_mut() {
            Some((last, e)) if *last == p => *e += 1,
            _ => factors.push((p, 1)),
        }
    }
    Ok(FactoredModulus::from_factors(factors))
}

fn split_large(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        out.push(n);
        return;
    }
    let d = pollard_rho(n);
    split_large(d, out);
    split_large(n / d, out);
}

/// Least `d ≥ 1` with `a^d ≡ 1 (mod q)`, found by stripping prime factors
/// off `φ(q)`.
pub fn multiplicative_order(a: i64, m: &FactoredModulus) -> Result<u64> {
    let q = m.q;
    let a = a.rem_euclid(q as i64) as u64;
    if gcd(a, q) != 1 {
        return domain(format!("{a} is not a unit modulo {q}"));
    }
    if q == 1 {
        return Ok(1);
    }
    Ok(order_dividing(a, q, m.phi))
}

/// Order of the unit `a` modulo `q` given a multiple `n` of it.
pub(crate) fn order_dividing(a: u64, q: u64, n: u64) -> u64 {
    let mut d = n;
    let fac = factorize(n).expect("n > 0");
    for &(r, _) in &fac.factors {
        while d % r == 0 && pow_mod(a, d / r, q) == 1 {
            d /= r;
        }
    }
    d
}

/// Generators of `(Z/p^e)^*` with their orders, in the fixed basis that
/// defines character exponents: the least primitive root for odd `p`,
/// `{3}` for 4, and `{2^e − 1, 5}` (that is `{−1, 5}`) for `2^e`, `e ≥ 3`.
pub fn unit_group_generators(p: u64, e: u32) -> Result<Vec<(u64, u64)>> {
    if e == 0 || !is_prime(p) {
        return domain(format!("{p}^{e} is not a prime power"));
    }
    let pe = p
        .checked_pow(e)
        .ok_or_else(|| Error::Resource(format!("{p}^{e} overflows u64")))?;
    if p == 2 {
        return Ok(match e {
            1 => vec![],
            2 => vec![(3, 2)],
            _ => vec![(pe - 1, 2), (5, pe >> 2)],
        });
    }
    let phi = pe / p * (p - 1);
    let phi_primes: Vec<u64> = factorize(phi)?.primes().collect();
    let g = (2..pe)
        .find(|&g| g % p != 0 && phi_primes.iter().all(|&r| pow_mod(g, phi / r, pe) != 1))
        .expect("odd prime powers have primitive roots");
    Ok(vec![(g, phi)])
}

/// `#{1 ≤ n ≤ t : gcd(n, q) = 1}` via `Σ_{d | rad q} μ(d) ⌊t/d⌋`.
pub fn coprime_count(t: u64, q: &FactoredModulus) -> u64 {
    let primes: Vec<u64> = q.primes().collect();
    let mut total: i128 = 0;
    for mask in 0u32..(1 << primes.len()) {
        let mut d = 1u128;
        for (i, &p) in primes.iter().enumerate() {
            if mask >> i & 1 == 1 {
                d *= p as u128;
            }
        }
        let term = (t as u128 / d) as i128;
        if mask.count_ones() % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    total as u64
}

/// `Σ_{p ≤ x} 1/p`, summed with compensation.
pub fn mertens_prime_sum(x: f64) -> Result<f64> {
    mertens_prime_sum_weighted(x, |_| 1.0)
}

/// `Σ_{p ≤ x} w(p)/p`.
pub fn mertens_prime_sum_weighted(x: f64, weight: impl Fn(u64) -> f64) -> Result<f64> {
    if !(x >= 2.0) {
        return domain(format!("prime sums need x >= 2, got {x}"));
    }
    if x > PRIME_SUM_LIMIT as f64 {
        return Err(Error::Resource(format!(
            "x = {x} exceeds the prime sieve limit {PRIME_SUM_LIMIT}"
        )));
    }
    let mut acc = crate::numeric::KahanSum::default();
    for_each_prime(x.floor() as u64, |p| acc.add(weight(p) / p as f64));
    Ok(acc.value())
}

static SHARED_SIEVE: OnceLock<SpfSieve> = OnceLock::new();

/// Smallest-prime-factor table for bulk factorization of small integers.
#[derive(Debug, Clone)]
pub struct SpfSieve {
    spf: Vec<u32>,
}

impl SpfSieve {
    pub fn new(bound: usize) -> Self {
        let mut spf = vec![0u32; bound + 1];
        for i in 2..=bound {
            if spf[i] == 0 {
                spf[i] = i as u32;
                let mut j = i.saturating_mul(i);
                while j <= bound {
                    if spf[j] == 0 {
                        spf[j] = i as u32;
                    }
                    j += i;
                }
            }
        }
        SpfSieve { spf }
    }

    /// Rebuilds a sieve from a stored table, checking every entry.
    pub fn from_table(spf: Vec<u32>) -> Result<Self> {
        if spf.len() < 2 {
            return domain("sieve table too short");
        }
        for (n, &p) in spf.iter().enumerate().skip(2) {
            let p = p as usize;
            if p < 2 || n % p != 0 || spf[p] as usize != p || (p != n && p * p > n) {
                return domain(format!("sieve table corrupt at {n}"));
            }
        }
        Ok(SpfSieve { spf })
    }

    pub fn table(&self) -> &[u32] {
        &self.spf
    }

    /// The process-wide sieve up to [`DEFAULT_SPF_BOUND`].
    pub fn shared() -> &'static SpfSieve {
        SHARED_SIEVE.get_or_init(|| SpfSieve::new(DEFAULT_SPF_BOUND))
    }

    /// Installs `sieve` as the shared one, if none has been built yet.
    /// Returns false (and drops `sieve`) otherwise or if it is too small.
    pub fn install_shared(sieve: SpfSieve) -> bool {
        sieve.bound() >= DEFAULT_SPF_BOUND && SHARED_SIEVE.set(sieve).is_ok()
    }

    pub fn bound(&self) -> usize {
        self.spf.len() - 1
    }

    pub fn smallest_prime_factor(&self, n: usize) -> usize {
        self.spf[n] as usize
    }

    pub fn is_prime(&self, n: usize) -> bool {
        n >= 2 && self.spf[n] as usize == n
    }

    /// Factorization of `n` (`1 ≤ n ≤ bound`), falling back to [`factorize`]
    /// above the table.
    pub fn factorize(&self, n: u64) -> Result<FactoredModulus> {
        if n == 0 || n as usize > self.bound() {
            return factorize(n);
        }
        let mut factors: Vec<(u64, u32)> = Vec::new();
        let mut m = n as usize;
        while m > 1 {
            let p = self.spf[m] as usize;
            let mut e = 0;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            factors.push((p as u64, e));
        }
        Ok(FactoredModulus::from_factors(factors))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_order(a: u64, q: u64) -> u64 {
        let mut x = a % q;
        let mut d = 1;
        while x != 1 {
            x = x * a % q;
            d += 1;
        }
        d
    }

    #[test]
    fn factorize_examples() {
        assert_eq!(factorize(12).unwrap().factors, vec![(2, 2), (3, 1)]);
        let one = factorize(1).unwrap();
        assert!(one.factors.is_empty());
        assert_eq!(one.phi, 1);
        assert_eq!(factorize(97).unwrap().factors, vec![(97, 1)]);
        assert_eq!(factorize(0), Err(Error::Domain("cannot factorize 0".into())));
    }

    #[test]
    fn factorize_large() {
        // 2^63 - 1 = 7^2 · 73 · 127 · 337 · 92737 · 649657
        let f = factorize((1u64 << 63) - 1).unwrap();
        assert_eq!(
            f.factors,
            vec![(7, 2), (73, 1), (127, 1), (337, 1), (92737, 1), (649657, 1)]
        );
        // product of two primes just above 10^9
        let p = 1_000_000_007u64;
        let q = 1_000_000_009u64;
        assert_eq!(factorize(p * q).unwrap().factors, vec![(p, 1), (q, 1)]);
        assert_eq!(factorize(u64::MAX).unwrap().q, u64::MAX);
    }

    #[test]
    fn factorize_round_trip_small() {
        let sieve = SpfSieve::new(100_000);
        for n in 1..=100_000u64 {
            let f = factorize(n).unwrap();
            let prod: u64 = f.factors.iter().map(|&(p, e)| p.pow(e)).product();
            assert_eq!(prod, n);
            assert!(f.factors.windows(2).all(|w| w[0].0 < w[1].0));
            assert_eq!(sieve.factorize(n).unwrap(), f);
        }
    }

    #[test]
    fn phi_and_recip_sum() {
        let m = factorize(360).unwrap();
        assert_eq!(m.phi, 96);
        assert_eq!(m.radical, 30);
        let expected = BigRational::new(BigInt::from(31), BigInt::from(30));
        assert_eq!(m.prime_recip_sum, expected);
    }

    #[test]
    fn order_examples() {
        let m7 = factorize(7).unwrap();
        assert_eq!(multiplicative_order(1, &m7).unwrap(), 1);
        assert_eq!(multiplicative_order(3, &m7).unwrap(), 6);
        let m8 = factorize(8).unwrap();
        assert_eq!(multiplicative_order(3, &m8).unwrap(), 2);
        assert!(multiplicative_order(2, &m8).is_err());
    }

    #[test]
    fn order_matches_brute_force() {
        for q in 2..300u64 {
            let m = factorize(q).unwrap();
            for a in 1..q {
                if gcd(a, q) == 1 {
                    let d = multiplicative_order(a as i64, &m).unwrap();
                    assert_eq!(d, naive_order(a, q), "a={a} q={q}");
                    assert_eq!(m.phi % d, 0);
                }
            }
        }
    }

    #[test]
    fn generator_examples() {
        assert_eq!(unit_group_generators(7, 1).unwrap(), vec![(3, 6)]);
        assert_eq!(unit_group_generators(2, 2).unwrap(), vec![(3, 2)]);
        assert_eq!(unit_group_generators(2, 5).unwrap(), vec![(31, 2), (5, 8)]);
        assert!(unit_group_generators(2, 1).unwrap().is_empty());
        assert!(unit_group_generators(6, 1).is_err());
    }

    #[test]
    fn generators_span_unit_group() {
        for pe in 2..=1024u64 {
            let f = factorize(pe).unwrap();
            if f.factors.len() != 1 {
                continue;
            }
            let (p, e) = f.factors[0];
            let gens = unit_group_generators(p, e).unwrap();
            let mut seen = vec![false; pe as usize];
            seen[1] = true;
            let mut frontier = vec![1u64];
            while let Some(x) = frontier.pop() {
                for &(g, d) in &gens {
                    assert_eq!(naive_order(g, pe), d);
                    let y = x * g % pe;
                    if !seen[y as usize] {
                        seen[y as usize] = true;
                        frontier.push(y);
                    }
                }
            }
            let count = seen.iter().filter(|&&b| b).count() as u64;
            assert_eq!(count, f.phi, "p^e = {pe}");
        }
    }

    #[test]
    fn odd_generator_is_least_primitive_root() {
        for (pe, g) in [(3u64, 2u64), (5, 2), (9, 2), (23, 5), (41, 6), (49, 3), (71, 7)] {
            let f = factorize(pe).unwrap();
            let (p, e) = f.factors[0];
            assert_eq!(unit_group_generators(p, e).unwrap()[0].0, g);
        }
    }

    #[test]
    fn coprime_count_examples() {
        assert_eq!(coprime_count(10, &factorize(6).unwrap()), 3);
        assert_eq!(coprime_count(100, &factorize(1).unwrap()), 100);
        assert_eq!(coprime_count(50, &factorize(101).unwrap()), 50);
        assert_eq!(coprime_count(0, &factorize(30).unwrap()), 0);
    }

    #[test]
    fn coprime_count_matches_gcd_loop() {
        for q in 1..=1000u64 {
            let m = factorize(q).unwrap();
            let mut naive = 0;
            for t in 1..=10_000u64 {
                if gcd(t, q) == 1 {
                    naive += 1;
                }
                if t % 97 == 0 || t == 10_000 || t < 40 {
                    assert_eq!(coprime_count(t, &m), naive, "t={t} q={q}");
                }
            }
        }
    }

    #[test]
    fn prime_sum_examples() {
        assert_eq!(mertens_prime_sum(2.0).unwrap(), 0.5);
        let direct = 1.0 / 2.0 + 1.0 / 3.0 + 1.0 / 5.0 + 1.0 / 7.0;
        assert!((mertens_prime_sum(10.0).unwrap() - direct).abs() < 1e-15);
        let big = mertens_prime_sum(1e6).unwrap();
        let mertens = (1e6f64).ln().ln() + 0.261_497_212_847_642_8;
        assert!((big - mertens).abs() < 2e-3);
        assert!(mertens_prime_sum(1.5).is_err());
        assert!(matches!(mertens_prime_sum(2e9), Err(Error::Resource(_))));
    }

    #[test]
    fn segmented_sieve_agrees_with_spf() {
        let sieve = SpfSieve::new(2_000_000);
        let primes = primes_up_to(2_000_000);
        let expected: Vec<u64> = (2..=2_000_000usize)
            .filter(|&n| sieve.is_prime(n))
            .map(|n| n as u64)
            .collect();
        assert_eq!(primes, expected);
        assert_eq!(primes_up_to(100).len(), 25);
    }

    #[test]
    fn crt_and_inverse() {
        assert_eq!(crt(&[(2, 3), (3, 5), (2, 7)]), 23);
        assert_eq!(inv_mod(3, 7), Some(5));
        assert_eq!(inv_mod(2, 4), None);
        assert!(is_prime(1_000_000_007));
        assert!(!is_prime(3_215_031_751));
    }

    #[test]
    fn sieve_table_round_trip() {
        let sieve = SpfSieve::new(10_000);
        let back = SpfSieve::from_table(sieve.table().to_vec()).unwrap();
        assert_eq!(back.factorize(9_991).unwrap().factors, vec![(97, 1), (103, 1)]);
        let mut bad = sieve.table().to_vec();
        bad[91] = 13;
        assert!(SpfSieve::from_table(bad).is_err());
        assert!(!SpfSieve::install_shared(sieve));
    }
}
