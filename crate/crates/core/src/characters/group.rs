//! The unit group `(Z/q)^*` as a product of cyclic factors over the fixed
//! generator basis, with discrete logarithms.

use std::collections::HashMap;

use crate::arith::{factorize, gcd, inv_mod, lcm, mul_mod, pow_mod, unit_group_generators, FactoredModulus};
use crate::error::Result;

/// Prime powers up to this size get a full discrete-log table.
pub const LOG_TABLE_LIMIT: u64 = 1_000_000;

const NO_LOG: u32 = u32::MAX;

#[derive(Debug, Clone)]
pub(crate) struct Component {
    pub p: u64,
    pub e: u32,
    pub pe: u64,
    /// `(generator mod p^e, order)`.
    pub gens: Vec<(u64, u64)>,
    /// Logs to the cyclic generator (for `2^e` with `e ≥ 3`: to 5, after
    /// removing the sign).
    table: Option<Vec<u32>>,
}

impl Component {
    fn new(p: u64, e: u32) -> Result<Self> {
        let pe = p.pow(e);
        let gens = unit_group_generators(p, e)?;
        let table = if pe <= LOG_TABLE_LIMIT && !gens.is_empty() {
            let (g, d) = *gens.last().unwrap();
            let mut t = vec![NO_LOG; pe as usize];
            let mut x = 1u64;
            for k in 0..d {
                t[x as usize] = k as u32;
                x = mul_mod(x, g, pe);
            }
            Some(t)
        } else {
            None
        };
        Ok(Component { p, e, pe, gens, table })
    }

    /// Logs of the unit `r` against `gens`, written into `out`.
    fn logs(&self, r: u64, out: &mut [u64]) {
        match self.gens.len() {
            0 => {}
            1 => out[0] = self.cyclic_log(r),
            _ => {
                // r ≡ (−1)^a · 5^b (mod 2^e)
                let sign = if r % 4 == 1 { 0 } else { 1 };
                let m = if sign == 1 { self.pe - r } else { r };
                out[0] = sign;
                out[1] = self.cyclic_log(m);
            }
        }
    }

    fn cyclic_log(&self, r: u64) -> u64 {
        if let Some(t) = &self.table {
            let v = t[r as usize];
            debug_assert!(v != NO_LOG);
            return v as u64;
        }
        let (g, d) = *self.gens.last().unwrap();
        discrete_log(g, r, d, self.pe).expect("residue lies in the cyclic subgroup")
    }
}

/// `x` with `g^x ≡ h (mod m)`, where `g` has order `n`, by Pohlig–Hellman
/// over the prime-power parts of `n` and baby-step giant-step in each.
pub fn discrete_log(g: u64, h: u64, n: u64, m: u64) -> Option<u64> {
    let fac = factorize(n).ok()?;
    let mut residues = Vec::new();
    for &(r, k) in &fac.factors {
        let rk = r.pow(k);
        let cofactor = n / rk;
        let g_i = pow_mod(g, cofactor, m);
        let h_i = pow_mod(h, cofactor, m);
        // g_i has order r^k; recover the base-r digits of the log.
        let gamma = pow_mod(g_i, rk / r, m);
        let g_inv = inv_mod(g_i, m)?;
        let mut x = 0u64;
        let mut r_pow = 1u64;
        for j in 0..k {
            let t = mul_mod(pow_mod(g_inv, x, m), h_i, m);
            let hk = pow_mod(t, rk / r_pow / r, m);
            let digit = bsgs(gamma, hk, r, m)?;
            x += digit * r_pow;
            if j + 1 < k {
                r_pow *= r;
            }
        }
        residues.push((x, rk));
    }
    Some(crate::arith::crt(&residues))
}

/// Baby-step giant-step in a cyclic group of order `n` generated by `g`.
pub fn bsgs(g: u64, h: u64, n: u64, m: u64) -> Option<u64> {
    let step = (n as f64).sqrt().ceil() as u64;
    let mut baby = HashMap::with_capacity(step as usize);
    let mut x = 1u64;
    for j in 0..step {
        baby.entry(x).or_insert(j);
        x = mul_mod(x, g, m);
    }
    let giant = inv_mod(pow_mod(g, step, m), m)?;
    let mut y = h % m;
    for i in 0..=step {
        if let Some(&j) = baby.get(&y) {
            let v = i * step + j;
            if v < n {
                return Some(v);
            }
        }
        y = mul_mod(y, giant, m);
    }
    None
}

/// `(Z/q)^*` over the canonical generator basis.
#[derive(Debug, Clone)]
pub struct UnitGroup {
    modulus: FactoredModulus,
    pub(crate) components: Vec<Component>,
    gen_orders: Vec<u64>,
    /// Offset of each component's generators in the flattened list.
    offsets: Vec<usize>,
    exponent: u64,
}

impl UnitGroup {
    pub fn new(q: u64) -> Result<Self> {
        Self::from_modulus(factorize(q)?)
    }

    pub fn from_modulus(modulus: FactoredModulus) -> Result<Self> {
        let mut components = Vec::new();
        let mut gen_orders = Vec::new();
        let mut offsets = Vec::new();
        for &(p, e) in &modulus.factors {
            let c = Component::new(p, e)?;
            offsets.push(gen_orders.len());
            gen_orders.extend(c.gens.iter().map(|&(_, d)| d));
            components.push(c);
        }
        let exponent = gen_orders.iter().fold(1, |acc, &d| lcm(acc, d));
        Ok(UnitGroup {
            modulus,
            components,
            gen_orders,
            offsets,
            exponent,
        })
    }

    pub fn modulus(&self) -> &FactoredModulus {
        &self.modulus
    }

    pub fn q(&self) -> u64 {
        self.modulus.q
    }

    /// Orders of the generators, flattened over the prime-power components.
    pub fn generator_orders(&self) -> &[u64] {
        &self.gen_orders
    }

    /// Exponent of the group (lcm of generator orders).
    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    /// The generators as residues modulo `q` (each is the component
    /// generator at its own prime power and 1 at the others).
    pub fn generators_mod_q(&self) -> Vec<u64> {
        let mut out = Vec::new();
        for (ci, c) in self.components.iter().enumerate() {
            for &(g, _) in &c.gens {
                let residues: Vec<(u64, u64)> = self
                    .components
                    .iter()
                    .enumerate()
                    .map(|(cj, d)| (if cj == ci { g } else { 1 }, d.pe))
                    .collect();
                out.push(crate::arith::crt(&residues));
            }
        }
        out
    }

    /// Discrete logs of `n` against the generators, or `None` if
    /// `gcd(n, q) > 1`.
    pub fn logs(&self, n: i64) -> Option<Vec<u64>> {
        let mut out = vec![0u64; self.gen_orders.len()];
        self.logs_into(n, &mut out).then_some(out)
    }

    pub(crate) fn logs_into(&self, n: i64, out: &mut [u64]) -> bool {
        let q = self.modulus.q;
        let r = n.rem_euclid(q as i64) as u64;
        if gcd(r, q) != 1 {
            return false;
        }
        for (c, &off) in self.components.iter().zip(&self.offsets) {
            c.logs(r % c.pe, &mut out[off..off + c.gens.len()]);
        }
        true
    }
}
