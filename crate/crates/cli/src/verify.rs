//! The `verify` suites. Each check prints one `PASS`/`FAIL` line with its
//! case count and worst observed value; failing cases are listed below it.

use std::f64::consts::PI;
use std::io::Write;

use charlab::arith::{factorize, gcd};
use charlab::characters::characters_mod;
use charlab::convolution::{
    dickman_richardson_gap, dickman_rho, fejer_form, fejer_kernel, fejer_kernel_sum, prime_angle,
    prime_power_identity_check, RICHARDSON_TOLERANCE,
};
use charlab::cyclotomic::{CyclotomicRing, RootAccumulator};
use charlab::pretentious::{distance, min_distance_over_t, MultiplicativeModel, DEFAULT_C_GS};
use charlab::sums::exact::exact_prefix_sums;
use charlab::sums::{gauss_sum, gs_identity_sweep, orthogonality_twist_check, savings_profile};
use charlab::{CharacterFilter, DirichletCharacter, Parity, UnitValue};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::caps::CapsFile;
use crate::families::{self, primitive_characters, FAMILY_SEED};
use crate::CliResult;

/// Largest number of failing cases listed under a `FAIL` line.
const LISTED_FAILURES: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, clap::ValueEnum)]
pub enum Suite {
    Fejer,
    Gauss,
    Polya,
    GsIdentity,
    Orthogonality,
    Convolution,
    Pretentious,
    All,
}

impl Suite {
    pub const EACH: [Suite; 7] = [
        Suite::Fejer,
        Suite::Gauss,
        Suite::Polya,
        Suite::GsIdentity,
        Suite::Orthogonality,
        Suite::Convolution,
        Suite::Pretentious,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Fejer => "fejer",
            Suite::Gauss => "gauss",
            Suite::Polya => "polya",
            Suite::GsIdentity => "gs-identity",
            Suite::Orthogonality => "orthogonality",
            Suite::Convolution => "convolution",
            Suite::Pretentious => "pretentious",
            Suite::All => "all",
        }
    }

    /// Whether the suite checks calibrated caps.
    pub fn needs_caps(self) -> bool {
        matches!(self, Suite::Polya | Suite::Convolution | Suite::Pretentious | Suite::All)
    }
}

/// Collects check outcomes and prints them as they arrive.
pub struct Reporter<W: Write> {
    out: W,
    pub passed: usize,
    pub failed: usize,
}

impl<W: Write> Reporter<W> {
    pub fn new(out: W) -> Self {
        Reporter {
            out,
            passed: 0,
            failed: 0,
        }
    }

    /// Records a check over `cases` cases. `failures` holds a description of
    /// each failing case.
    pub fn check(&mut self, suite: Suite, name: &str, cases: usize, worst: &str, failures: &[String]) {
        let ok = failures.is_empty() && cases > 0;
        let tag = if ok { "PASS" } else { "FAIL" };
        let _ = writeln!(
            self.out,
            "{tag} {} {name}: {cases} cases, {} failed, worst {worst}",
            suite.name(),
            failures.len()
        );
        for f in failures.iter().take(LISTED_FAILURES) {
            let _ = writeln!(self.out, "    {f}");
        }
        if failures.len() > LISTED_FAILURES {
            let _ = writeln!(self.out, "    ... {} more", failures.len() - LISTED_FAILURES);
        }
        if ok {
            self.passed += 1;
        } else {
            self.failed += 1;
        }
    }

    pub fn info(&mut self, suite: Suite, text: &str) {
        let _ = writeln!(self.out, "INFO {} {text}", suite.name());
    }

    pub fn summary(&mut self) {
        let _ = writeln!(self.out, "SUMMARY {} passed, {} failed", self.passed, self.failed);
        let _ = self.out.flush();
    }
}

/// Per-case values gathered into a check: `(description, value, ok)`.
struct Cases {
    n: usize,
    worst: f64,
    failures: Vec<String>,
}

impl Cases {
    fn new() -> Self {
        Cases {
            n: 0,
            worst: f64::NEG_INFINITY,
            failures: Vec::new(),
        }
    }

    /// Adds a case whose badness is `v` (larger is worse).
    fn add(&mut self, what: impl FnOnce() -> String, v: f64, ok: bool) {
        self.n += 1;
        if v > self.worst || v.is_nan() {
            self.worst = v;
        }
        if !ok {
            self.failures.push(format!("{}: {v:e}", what()));
        }
    }

    fn report<W: Write>(self, r: &mut Reporter<W>, suite: Suite, name: &str) {
        r.check(suite, name, self.n, &format!("{:e}", self.worst), &self.failures);
    }
}

fn chars(q: u64, filter: CharacterFilter) -> CliResult<Vec<DirichletCharacter>> {
    Ok(characters_mod(q, filter)?)
}

/// Runs `suite` (every suite for [`Suite::All`]) and prints the results.
pub fn run_suite<W: Write>(suite: Suite, caps: Option<&CapsFile>, r: &mut Reporter<W>) -> CliResult<()> {
    if suite == Suite::All {
        for s in Suite::EACH {
            run_suite(s, caps, r)?;
        }
        return Ok(());
    }
    let need_caps = || {
        caps.ok_or_else(|| crate::CliError::Caps(format!("suite {} needs a caps file", suite.name())))
    };
    match suite {
        Suite::Fejer => fejer(r),
        Suite::Gauss => gauss(r),
        Suite::Polya => polya(need_caps()?, r),
        Suite::GsIdentity => gs_identity(r),
        Suite::Orthogonality => orthogonality(r),
        Suite::Convolution => convolution(need_caps()?, r),
        Suite::Pretentious => pretentious(need_caps()?, r),
        Suite::All => unreachable!(),
    }
}

/// Fejér kernel closed form against its defining sum, and the prime-power
/// values of `1∗1∗f∗f̄` for the seeded family at `p ≤ 100`, `k ≤ 10`.
pub fn fejer<W: Write>(r: &mut Reporter<W>) -> CliResult<()> {
    let s = Suite::Fejer;
    let mut c = Cases::new();
    for n in 1..=64u64 {
        for j in 0..=200 {
            let t = j as f64 / 197.0 - 0.5 + if j % 2 == 0 { 0.0 } else { 1e-3 * std::f64::consts::SQRT_2 };
            let a = fejer_kernel(n, t);
            let b = fejer_kernel_sum(n, t);
            let d = (a - b).abs() / n as f64;
            c.add(|| format!("n={n} t={t}"), d, d <= 1e-9 && a >= -1e-12);
        }
    }
    c.report(r, s, "kernel closed form = sum, K_N >= 0");

    let family = families::seeded_family()?;
    let mut weight = Cases::new();
    let mut low = Cases::new();
    let mut zero = Cases::new();
    for chi in &family {
        let f = MultiplicativeModel::from_character(chi, 100)?;
        for &p in f.primes() {
            let check = prime_power_identity_check(&f, p, 10)?;
            let what = || format!("{} p={p}", chi.label());
            weight.add(what, check.weight_diff, check.weight_diff <= 1e-9);
            let k1 = prime_power_identity_check(&f, p, 1)?;
            low.add(what, k1.fejer_diff, k1.fejer_diff <= 1e-9);
            if prime_angle(f.at_prime(p).expect("prime in model")).is_none() {
                zero.add(what, check.fejer_diff, check.fejer_diff <= 1e-9);
            }
        }
    }
    weight.report(r, s, "g(p^k) = sum_w c_k(w) e(w theta_p), p <= 100, k <= 10");
    low.report(r, s, "g(p^k) = (k+1) K_{k+1}(theta_p), k <= 1");
    zero.report(r, s, "g(p^k) = k+1 where f(p) = 0, k <= 10");
    r.info(
        s,
        &format!(
            "(k+1) K_(k+1)(theta) departs from g(p^k) from k = 2 on: f = 1 gives g(p^2) = 10, form = {}",
            fejer_form(2, Some(0.0))
        ),
    );
    Ok(())
}

fn mobius(n: u64) -> CliResult<i64> {
    let f = factorize(n)?;
    Ok(if f.factors.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.factors.len() % 2 == 0 {
        1
    } else {
        -1
    })
}

/// `|τ(χ)|² = q` for primitive `χ`, `q ≤ 200`; for imprimitive `χ`,
/// `τ(χ) = μ(q/q*) χ*(q/q*) τ(χ*)`, which vanishes on the listed cases.
pub fn gauss<W: Write>(r: &mut Reporter<W>) -> CliResult<()> {
    let s = Suite::Gauss;
    let mut prim = Cases::new();
    let mut induced = Cases::new();
    let mut vanishing = Cases::new();
    for q in 1..=200u64 {
        for chi in chars(q, CharacterFilter::default())? {
            let tau = gauss_sum(&chi)?;
            if chi.is_primitive() {
                let d = (tau.norm_sqr() / q as f64 - 1.0).abs();
                prim.add(|| chi.label(), d, d <= 1e-6);
                continue;
            }
            let dec = chi.primitive_part();
            let c = dec.cofactor;
            let mu = mobius(c)?;
            let expect = dec.primitive.eval_complex(c as i64) * gauss_sum(&dec.primitive)? * mu as f64;
            let d = (tau - expect).norm() / (q as f64).sqrt();
            induced.add(|| chi.label(), d, d <= 1e-6);
            if mu == 0 || gcd(c, dec.conductor) != 1 {
                let z = tau.norm() / (q as f64).sqrt();
                vanishing.add(|| chi.label(), z, z <= 1e-9);
            }
        }
    }
    let principal4 = gauss_sum(&DirichletCharacter::principal(4)?)?.norm();
    vanishing.add(|| "q=4;e=0".into(), principal4, principal4 <= 1e-12);
    prim.report(r, s, "|tau|^2 = q, primitive, q <= 200");
    induced.report(r, s, "tau = mu(c) chi*(c) tau(chi*), imprimitive, q <= 200");
    vanishing.report(r, s, "tau = 0 where q/q* is not squarefree or shares a prime with q*");
    Ok(())
}

/// Pólya expansion within `C_P log q`, and the Schur floor
/// `max |S(t)| ≥ √q / (2π)` after checking `max |S(t)|` by brute force.
pub fn polya<W: Write>(caps: &CapsFile, r: &mut Reporter<W>) -> CliResult<()> {
    let s = Suite::Polya;
    let cap = caps.get("C_P", families::POLYA_FAMILY)?;
    let mut c = Cases::new();
    for sample in families::polya_samples()? {
        c.add(|| sample.label.clone(), sample.value - cap, sample.value <= cap);
    }
    c.report(r, s, &format!("sup_error <= C_P log q, C_P = {cap}"));

    let family = primitive_characters(3, 400)?;
    let rows: Vec<(String, f64, f64, u64)> = family
        .par_iter()
        .map(|chi| {
            let q = chi.modulus();
            let p = savings_profile(chi, &[0.5])?;
            let mut acc = num_complex::Complex64::new(0.0, 0.0);
            let mut brute: f64 = 0.0;
            for n in 1..=q as i64 {
                acc += chi.eval_complex(n);
                brute = brute.max(acc.norm());
            }
            Ok((chi.label(), p.pv_max, brute, q))
        })
        .collect::<CliResult<_>>()?;
    let mut oracle = Cases::new();
    let mut floor = Cases::new();
    for (label, pv, brute, q) in rows {
        let d = (pv - brute).abs();
        oracle.add(|| label.clone(), d, d <= 1e-9 * brute.max(1.0));
        let lo = (q as f64).sqrt() / (2.0 * PI);
        floor.add(|| label.clone(), lo / pv, pv >= lo);
    }
    oracle.report(r, s, "pv_max = brute-force max |S(t)|, primitive, q <= 400");
    floor.report(r, s, "pv_max >= sqrt(q)/(2 pi), primitive, q <= 400");
    Ok(())
}

/// The twist identity over primitive `χ` with `q ≤ 50`, primitive `ψ` mod
/// 3, 4, 5, `r ≤ 12`, every `b` prime to `r`, and `N ∈ {10, 100, 1000}`.
pub fn gs_identity<W: Write>(r: &mut Reporter<W>) -> CliResult<()> {
    let s = Suite::GsIdentity;
    let mut psis = Vec::new();
    for l in [3, 4, 5] {
        psis.extend(chars(l, CharacterFilter::primitive())?);
    }
    let family = primitive_characters(1, 50)?;
    let ns = [10, 100, 1000];
    let per_chi: Vec<Vec<(String, f64, bool)>> = family
        .par_iter()
        .map(|chi| {
            let mut out = Vec::new();
            for psi in &psis {
                for rr in 1..=12u64 {
                    for case in gs_identity_sweep(chi, psi, rr, &ns)? {
                        let rel = case.check.abs_diff / (1.0 + case.check.lhs.norm());
                        out.push((
                            format!("chi={} psi={} b/r={}/{rr} N={}", chi.label(), psi.label(), case.b, case.n),
                            rel,
                            case.check.holds(1e-8),
                        ));
                    }
                }
            }
            Ok(out)
        })
        .collect::<CliResult<_>>()?;
    let mut c = Cases::new();
    for (what, v, ok) in per_chi.into_iter().flatten() {
        c.add(|| what, v, ok);
    }
    c.report(r, s, "twist expansion, q <= 50, psi mod 3,4,5, r <= 12, N in {10,100,1000}");
    Ok(())
}

/// The orthogonality twist, and the structure laws of the character group.
pub fn orthogonality<W: Write>(r: &mut Reporter<W>) -> CliResult<()> {
    let s = Suite::Orthogonality;
    let psi = chars(5, CharacterFilter {
        parity: Some(Parity::Even),
        ..CharacterFilter::primitive()
    })?;
    let family: Vec<_> = primitive_characters(1, 60)?.into_iter().filter(|c| c.is_odd()).collect();
    let rows: Vec<(String, f64, bool)> = family
        .par_iter()
        .flat_map_iter(|chi| {
            psi.iter().flat_map(move |p| {
                (1..=1000u64).map(move |n| {
                    let ch = orthogonality_twist_check(chi, p, n).expect("valid pair");
                    let rel = ch.abs_diff / (1.0 + ch.lhs.norm());
                    (format!("chi={} psi={} N={n}", chi.label(), p.label()), rel, ch.holds(1e-9))
                })
            })
        })
        .collect();
    let mut c = Cases::new();
    for (what, v, ok) in rows {
        c.add(|| what, v, ok);
    }
    c.report(r, s, "orthogonality twist, odd primitive q <= 60, even primitive psi mod 5, N <= 1000");

    let mut parity = Cases::new();
    for q in 1..=500u64 {
        for chi in chars(q, CharacterFilter::default())? {
            if chi.order() % 2 == 1 && chi.order() > 1 {
                let bad = chi.is_odd();
                parity.add(|| chi.label(), bad as u8 as f64, !bad);
            }
        }
    }
    parity.report(r, s, "odd order > 1 implies even, q <= 500");

    let mut conductor = Cases::new();
    for q in 1..=300u64 {
        for chi in chars(q, CharacterFilter::default())? {
            let d = chi.primitive_part();
            let ok = d.conductor == chi.conductor()
                && q % d.conductor == 0
                && d.primitive.is_primitive()
                && d.primitive.modulus() == d.conductor
                && d.primitive.induce(q)? == chi
                && chi.is_primitive() == (d.conductor == q);
            conductor.add(|| chi.label(), (!ok) as u8 as f64, ok);
        }
    }
    conductor.report(r, s, "primitive part induces back, q <= 300");

    let mut count = Cases::new();
    for q in 1..=1000u64 {
        let n = chars(q, CharacterFilter::default())?.len() as u64;
        let phi = factorize(q)?.phi;
        count.add(|| format!("q={q}"), n.abs_diff(phi) as f64, n == phi);
    }
    count.report(r, s, "number of characters = phi(q), q <= 1000");

    let mut rows_exact = Cases::new();
    let mut cols_exact = Cases::new();
    for q in 1..=100u64 {
        let all = chars(q, CharacterFilter::default())?;
        let phi = factorize(q)?.phi as i64;
        for chi in &all {
            let e = exact_prefix_sums(chi, q);
            let ok = if chi.is_principal() { e.coords(q) == [phi] } else { e.is_zero(q) };
            rows_exact.add(|| chi.label(), (!ok) as u8 as f64, ok);
        }
        let level = all[0].group().exponent();
        let ring = CyclotomicRing::new(level);
        for a in 1..=q {
            if gcd(a, q) != 1 {
                continue;
            }
            let mut acc = RootAccumulator::new(level);
            for chi in &all {
                if let UnitValue::Root { num, den } = chi.eval(a as i64) {
                    acc.add_root(num * (level / den));
                }
            }
            let coords = ring.reduce(acc.raw());
            let ok = if a % q == 1 % q {
                coords[0] == phi && coords[1..].iter().all(|&c| c == 0)
            } else {
                coords.iter().all(|&c| c == 0)
            };
            cols_exact.add(|| format!("q={q} a={a}"), (!ok) as u8 as f64, ok);
        }
    }
    rows_exact.report(r, s, "sum over n mod q of chi(n) exact, q <= 100");
    cols_exact.report(r, s, "sum over chi of chi(a) exact, q <= 100");
    Ok(())
}

/// Non-negativity, multiplicativity and `|h| ≤ τ` on the seeded family at
/// `x = 10⁵`; the Dickman checks; and the two calibrated lower bounds.
pub fn convolution<W: Write>(caps: &CapsFile, r: &mut Reporter<W>) -> CliResult<()> {
    let s = Suite::Convolution;
    let c_r = caps.get("c_R", &families::revtonn_family())?;
    let c_h = caps.get("c_H", &families::hildebrand_family())?;
    let tables = families::table_samples()?;
    let mut nonneg = Cases::new();
    let mut mult = Cases::new();
    let mut hbound = Cases::new();
    let mut imag = Cases::new();
    let mut revtonn = Cases::new();
    let mut hild = Cases::new();
    for t in &tables {
        nonneg.add(|| t.label.clone(), -t.g_min, t.g_min >= -1e-9);
        mult.add(|| t.label.clone(), t.mult_rel, t.mult_rel <= 1e-9 && t.pairs == families::PAIRS_PER_TABLE);
        hbound.add(|| t.label.clone(), t.h_excess, t.h_excess <= 1e-9);
        imag.add(|| t.label.clone(), t.max_imag, t.max_imag <= 1e-9);
        revtonn.add(|| t.label.clone(), c_r - t.revtonn_ratio, t.revtonn_ratio >= c_r);
        hild.add(|| t.label.clone(), c_h - t.hildebrand_ratio, t.hildebrand_ratio >= c_h);
    }
    nonneg.report(r, s, "min g >= -1e-9, seeded family, x = 1e5");
    mult.report(r, s, "g multiplicative on 1e4 coprime pairs per table");
    hbound.report(r, s, "|h(n)| <= tau(n)");
    imag.report(r, s, "|Im g| <= 1e-9");
    revtonn.report(r, s, &format!("revtonn ratio >= c_R, c_R = {c_r}"));
    hild.report(r, s, &format!("hildebrand ratio >= c_H, c_H = {c_h}"));

    let mut dick = Cases::new();
    for j in 0..=100 {
        let u = j as f64 / 100.0;
        let v = (dickman_rho(u)? - 1.0).abs();
        dick.add(|| format!("rho({u})"), v, v == 0.0);
    }
    let d2 = (dickman_rho(2.0)? - (1.0 - 2f64.ln())).abs();
    dick.add(|| "rho(2)".into(), d2, d2 <= 1e-6);
    let gap = dickman_richardson_gap()?;
    dick.add(|| "step-halving gap".into(), gap, gap <= RICHARDSON_TOLERANCE);
    dick.report(r, s, "rho = 1 on [0,1], rho(2) = 1 - log 2, step halving <= 1e-7");
    Ok(())
}

/// Distance axioms on seeded triples, the exact self-distance, the planted
/// twist, and `equiv_gap ≥ −C_E`.
pub fn pretentious<W: Write>(caps: &CapsFile, r: &mut Reporter<W>) -> CliResult<()> {
    let s = Suite::Pretentious;
    const X: u64 = 10_000;
    let pool = primitive_characters(3, 60)?;
    let models: Vec<MultiplicativeModel> = pool
        .par_iter()
        .map(|chi| MultiplicativeModel::from_character(chi, X))
        .collect::<charlab::Result<_>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(FAMILY_SEED);
    let mut tri = Cases::new();
    let mut sym = Cases::new();
    for _ in 0..1000 {
        let [a, b, c] = [0; 3].map(|_| rng.gen_range(0..models.len()));
        let (fa, fb, fc) = (&models[a], &models[b], &models[c]);
        let ab = distance(fa, fb, X as f64, 1)?;
        let ba = distance(fb, fa, X as f64, 1)?;
        let bc = distance(fb, fc, X as f64, 1)?;
        let ac = distance(fa, fc, X as f64, 1)?;
        let excess = ac.sqrt() - ab.sqrt() - bc.sqrt();
        let what = || format!("{} {} {}", pool[a].label(), pool[b].label(), pool[c].label());
        tri.add(what, excess, excess <= 1e-9);
        sym.add(what, (ab - ba).abs(), ab >= 0.0 && (ab - ba).abs() <= 1e-12);
    }
    tri.report(r, s, "triangle inequality, 1000 seeded triples, x = 1e4");
    sym.report(r, s, "distance symmetric and non-negative");

    let mut selfd = Cases::new();
    for (chi, f) in pool.iter().zip(&models) {
        let d = distance(f, f, X as f64, 1)?;
        let mut exact = BigRational::zero();
        for &p in chi.factored_modulus().primes().collect::<Vec<_>>().iter() {
            if p <= X {
                exact += BigRational::new(BigInt::from(1), BigInt::from(p));
            }
        }
        let e = exact.to_f64().unwrap_or(f64::NAN);
        let diff = (d - e).abs() / e.max(1.0);
        selfd.add(|| chi.label(), diff, diff <= 1e-12);
    }
    selfd.report(r, s, "D(f,f;x)^2 = sum of 1/p over p | q");

    let planted = MultiplicativeModel::archimedean(0.3, X)?;
    let rep = min_distance_over_t(&planted, X as f64, 1.0, DEFAULT_C_GS)?;
    let mut tw = Cases::new();
    let dt = (rep.t_star - 0.3).abs();
    tw.add(|| "t_star".into(), dt, dt <= 1e-3);
    tw.add(|| "d_min_squared".into(), rep.d_min_squared, rep.d_min_squared <= 1e-4);
    tw.report(r, s, "planted twist t = 0.3 recovered");

    let cap = caps.get("C_E", families::EQUIV_FAMILY)?;
    let mut eq = Cases::new();
    for sample in families::equiv_samples()? {
        eq.add(|| sample.label.clone(), sample.value - cap, sample.value <= cap);
    }
    eq.report(r, s, &format!("equiv gap >= -C_E, C_E = {cap}"));
    Ok(())
}
