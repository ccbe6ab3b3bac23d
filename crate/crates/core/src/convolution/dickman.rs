use std::sync::OnceLock;

use crate::error::{domain, Error, Result};

/// Upper end of the tabulated range.
pub const DICKMAN_MAX_U: f64 = 50.0;
/// Trapezoid step.
pub const DICKMAN_STEP: f64 = 1e-3;
/// Largest allowed gap between the step-`h` and step-`h/2` tables.
pub const RICHARDSON_TOLERANCE: f64 = 1e-7;

/// Window sums are recomputed from scratch every this many steps so that
/// subtracting large early values cannot swamp the tiny late ones.
const RESYNC: usize = 64;

/// `ρ` on the grid `u = j/steps_per_unit`, `0 ≤ u ≤ max_u`, by the
/// trapezoid rule on `u ρ(u) = ∫_{u−1}^{u} ρ(s) ds`, solved for the new
/// endpoint at each step. Every term is positive, so the relative accuracy
/// survives into the far tail where `ρ` is tiny.
fn trapezoid_table(steps_per_unit: usize, max_u: usize) -> Vec<f64> {
    let n = steps_per_unit * max_u;
    let h = 1.0 / steps_per_unit as f64;
    let mut rho = vec![1.0; n + 1];
    // interior = Σ_{i=j−spu+1}^{j−1} ρ_i
    let mut interior = 0.0;
    for j in steps_per_unit + 1..=n {
        if (j - steps_per_unit - 1) % RESYNC == 0 {
            interior = rho[j - steps_per_unit + 1..j].iter().sum();
        } else {
            interior += rho[j - 1] - rho[j - steps_per_unit];
        }
        let u = j as f64 * h;
        let known = h * (0.5 * rho[j - steps_per_unit] + interior);
        rho[j] = known / (u - 0.5 * h);
    }
    rho
}

struct DickmanTable {
    steps_per_unit: usize,
    rho: Vec<f64>,
    richardson_gap: f64,
}

fn table() -> Result<&'static DickmanTable> {
    static TABLE: OnceLock<std::result::Result<DickmanTable, String>> = OnceLock::new();
    TABLE
        .get_or_init(|| {
            let spu = (1.0 / DICKMAN_STEP).round() as usize;
            let max_u = DICKMAN_MAX_U as usize;
            let coarse = trapezoid_table(spu, max_u);
            let fine = trapezoid_table(2 * spu, max_u);
            let worst = coarse
                .iter()
                .enumerate()
                .map(|(j, &c)| (c - fine[2 * j]).abs())
                .fold(0.0, f64::max);
            if worst > RICHARDSON_TOLERANCE {
                return Err(format!(
                    "Dickman table: step-halving moved a value by {worst:e}"
                ));
            }
            Ok(DickmanTable {
                steps_per_unit: spu,
                rho: coarse,
                richardson_gap: worst,
            })
        })
        .as_ref()
        .map_err(|e| Error::Resource(e.clone()))
}

/// The Dickman–de Bruijn function on `[0, 50]`.
///
/// Between grid points `ρ(u) = ρ(u₀) − ∫_{u₀}^{u} ρ(s − 1)/s ds` is
/// advanced by one partial trapezoid step, with `ρ(s − 1)` interpolated
/// linearly.
pub fn dickman_rho(u: f64) -> Result<f64> {
    if !(u >= 0.0) {
        return domain(format!("ρ({u}) undefined for negative u"));
    }
    if u > DICKMAN_MAX_U {
        return domain(format!("ρ tabulated only up to u = {DICKMAN_MAX_U}"));
    }
    if u <= 1.0 {
        return Ok(1.0);
    }
    let t = table()?;
    let spu = t.steps_per_unit as f64;
    let j = (u * spu).floor() as usize;
    let u0 = j as f64 / spu;
    let frac = u - u0;
    if frac == 0.0 {
        return Ok(t.rho[j]);
    }
    let lag = j - t.steps_per_unit;
    let r_lag0 = t.rho[lag];
    let r_lag1 = t.rho[lag + 1];
    let r_at_u = r_lag0 + (r_lag1 - r_lag0) * frac * spu;
    Ok(t.rho[j] - 0.5 * frac * (r_lag0 / u0 + r_at_u / u))
}

/// Largest gap between the step-`h` and step-`h/2` tables over `[0, 50]`.
pub fn dickman_richardson_gap() -> Result<f64> {
    Ok(table()?.richardson_gap)
}

/// `σ₋(u) = u ρ(u)`.
pub fn sigma_minus(u: f64) -> Result<f64> {
    Ok(u * dickman_rho(u)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms() {
        assert_eq!(dickman_rho(0.5).unwrap(), 1.0);
        assert_eq!(dickman_rho(0.0).unwrap(), 1.0);
        for i in 0..=100 {
            let u = 1.0 + i as f64 / 100.0 + 0.0037 * (i % 3) as f64;
            let u = u.min(2.0);
            assert!((dickman_rho(u).unwrap() - (1.0 - u.ln())).abs() < 1e-6, "u={u}");
        }
        assert!((dickman_rho(2.0).unwrap() - 0.306_853).abs() < 1e-6);
        assert!(dickman_rho(-0.1).is_err());
        assert!(dickman_rho(50.5).is_err());
    }

    #[test]
    fn rho_three_against_quadrature() {
        // ρ(3) = ρ(2) − ∫_2^3 (1 − log(s − 1))/s ds by Simpson's rule
        let f = |s: f64| (1.0 - (s - 1.0).ln()) / s;
        let n = 2000;
        let h = 1.0 / n as f64;
        let mut acc = f(2.0) + f(3.0);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * f(2.0 + i as f64 * h);
        }
        let rho3 = (1.0 - 2f64.ln()) - acc * h / 3.0;
        assert!((dickman_rho(3.0).unwrap() - rho3).abs() < 1e-6);
        assert!((rho3 - 0.048_608_4).abs() < 1e-6);
    }

    #[test]
    fn known_values_and_shape() {
        // standard table values
        for (u, v) in [(4.0, 4.910_925e-3), (5.0, 3.547_247e-4), (8.0, 3.232_069e-8), (10.0, 2.770_172e-11)] {
            assert!((dickman_rho(u).unwrap() / v - 1.0).abs() < 1e-4, "u={u}");
        }
        assert!(dickman_richardson_gap().unwrap() <= RICHARDSON_TOLERANCE);
        let mut prev = f64::INFINITY;
        for i in 0..=490 {
            let u = 1.0 + i as f64 * 0.1;
            let s = sigma_minus(u).unwrap();
            assert!(s > 0.0 && s < prev, "u={u}");
            prev = s;
        }
    }
}
