//! Compensated summation and unit-circle helpers shared by the sum engines.

use std::f64::consts::TAU;

use num_complex::Complex64;

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Compensated complex sum (independent compensation per coordinate).
#[derive(Debug, Clone, Copy, Default)]
pub struct ComplexSum {
    re: KahanSum,
    im: KahanSum,
}

impl ComplexSum {
    #[inline]
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    #[inline]
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

impl std::iter::FromIterator<Complex64> for ComplexSum {
    fn from_iter<I: IntoIterator<Item = Complex64>>(iter: I) -> Self {
        let mut s = ComplexSum::default();
        for z in iter {
            s.add(z);
        }
        s
    }
}

/// `e(x) = exp(2πix)`.
#[inline]
pub fn e(x: f64) -> Complex64 {
    Complex64::from_polar(1.0, TAU * x)
}

/// `e(a/m)` with the fraction reduced first, so that e.g. `e(3/4)` is
/// evaluated as `e(-1/4)` on the principal branch.
#[inline]
pub fn e_frac(a: i64, m: u64) -> Complex64 {
    let m_i = m as i64;
    let mut r = a.rem_euclid(m_i);
    if 2 * r > m_i {
        r -= m_i;
    }
    match (r, m) {
        (0, _) => Complex64::new(1.0, 0.0),
        (_, 2) => Complex64::new(-1.0, 0.0),
        (1, 4) => Complex64::new(0.0, 1.0),
        (-1, 4) => Complex64::new(0.0, -1.0),
        _ => e(r as f64 / m as f64),
    }
}

/// Table `e(j/m)` for `0 ≤ j < m`.
pub fn roots_of_unity(m: u64) -> Vec<Complex64> {
    (0..m as i64).map(|j| e_frac(j, m)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensation_beats_naive() {
        let mut k = KahanSum::default();
        let mut naive = 0.0;
        for _ in 0..1_000_000 {
            k.add(0.1);
            naive += 0.1;
        }
        assert!((k.value() - 100_000.0).abs() < 1e-9);
        assert!((naive - 100_000.0f64).abs() > (k.value() - 100_000.0).abs());
    }

    #[test]
    fn exact_quarter_turns() {
        assert_eq!(e_frac(1, 4), Complex64::new(0.0, 1.0));
        assert_eq!(e_frac(3, 4), Complex64::new(0.0, -1.0));
        assert_eq!(e_frac(-1, 2), Complex64::new(-1.0, 0.0));
        for j in 0..12 {
            assert!((e_frac(j, 12).norm() - 1.0).abs() < 1e-15);
        }
    }
}
