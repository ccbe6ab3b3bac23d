//! Exact prefix sums `S(t)` as elements of `Z[ζ_g]`, `g` the order of `χ`.

use num_complex::Complex64;

use crate::characters::{DirichletCharacter, UnitValue};
use crate::cyclotomic::{CyclotomicRing, RootAccumulator};

/// Values of `χ` on one period as exponents of `ζ_g` (`None` off the units).
pub fn root_indices(chi: &DirichletCharacter) -> Vec<Option<u64>> {
    let g = chi.order();
    chi.values()
        .into_iter()
        .map(|v| match v {
            UnitValue::Zero => None,
            UnitValue::Root { num, den } => Some(num * (g / den)),
        })
        .collect()
}

/// `S(0), …, S(T)` in reduced cyclotomic coordinates.
#[derive(Debug, Clone)]
pub struct ExactSeries {
    ring: CyclotomicRing,
    prefixes: Vec<Vec<i64>>,
}

impl ExactSeries {
    pub fn level(&self) -> u64 {
        self.ring.level()
    }

    pub fn limit(&self) -> u64 {
        self.prefixes.len() as u64 - 1
    }

    pub fn coords(&self, t: u64) -> &[i64] {
        &self.prefixes[t as usize]
    }

    pub fn is_zero(&self, t: u64) -> bool {
        self.coords(t).iter().all(|&c| c == 0)
    }

    pub fn to_complex(&self, t: u64) -> Complex64 {
        self.ring.to_complex(self.coords(t))
    }
}

pub fn exact_prefix_sums(chi: &DirichletCharacter, limit: u64) -> ExactSeries {
    let q = chi.modulus();
    let ring = CyclotomicRing::new(chi.order());
    let idx = root_indices(chi);
    let mut acc = RootAccumulator::new(chi.order());
    let mut prefixes = Vec::with_capacity(limit as usize + 1);
    prefixes.push(ring.reduce(acc.raw()));
    for t in 1..=limit {
        if let Some(j) = idx[(t % q) as usize] {
            acc.add_root(j);
        }
        prefixes.push(ring.reduce(acc.raw()));
    }
    ExactSeries { ring, prefixes }
}
