//! `explore` reports as JSON. These observe the asymptotic statements at
//! finite scale and never assert anything.

use charlab::characters::characters_mod;
use charlab::convolution::{build_convolution, cestolog_report, hildebrand_lower, XiFamily};
use charlab::pretentious::{hmt_bound, orders_report, twist_scan, DistanceReport, MultiplicativeModel, PrimeValue, Provenance, TwistCandidate};
use charlab::{CharacterFilter, DirichletCharacter, UnitValue};
use num_complex::Complex64;
use serde::Serialize;

use crate::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Target {
    Cestolog,
    Hmt,
    Orders,
    Hildebrand,
}

/// Arguments shared by the targets; each uses the subset it needs.
#[derive(Debug, Clone, PartialEq)]
pub struct ExploreArgs {
    pub character: Option<String>,
    pub synthetic: Option<String>,
    pub x: u64,
    pub xi: String,
    pub t: Option<f64>,
    pub q: Option<u64>,
    pub order: u64,
    pub psi: Option<String>,
    pub c_gs: f64,
}

/// `one`, `minus-one`, `root:<a>/<m>` (`f(p) = e(a/m)`) or `nit:<t>`
/// (`f(p) = p^{it}`).
pub fn synthetic(name: &str, limit: u64) -> CliResult<MultiplicativeModel> {
    let bad = || CliError::Config(format!("unknown synthetic model {name:?}"));
    let m = match name {
        "one" => MultiplicativeModel::constant(UnitValue::ONE, limit)?,
        "minus-one" => MultiplicativeModel::from_fn(Provenance::Synthetic("minus-one".into()), limit, |_| {
            PrimeValue::Exact(UnitValue::MINUS_ONE)
        })?,
        _ => {
            if let Some(rest) = name.strip_prefix("root:") {
                let (a, m) = rest.split_once('/').ok_or_else(bad)?;
                let a: i64 = a.parse().map_err(|_| bad())?;
                let m: u64 = m.parse().map_err(|_| bad())?;
                if m == 0 {
                    return Err(bad());
                }
                MultiplicativeModel::constant(UnitValue::root(a, m), limit)?
            } else if let Some(t) = name.strip_prefix("nit:") {
                MultiplicativeModel::archimedean(t.parse().map_err(|_| bad())?, limit)?
            } else {
                return Err(bad());
            }
        }
    };
    Ok(m)
}

fn model(args: &ExploreArgs, limit: u64) -> CliResult<(MultiplicativeModel, Option<DirichletCharacter>)> {
    match (&args.character, &args.synthetic) {
        (Some(label), None) => {
            let chi = DirichletCharacter::parse(label)?;
            Ok((MultiplicativeModel::from_character(&chi, limit)?, Some(chi)))
        }
        (None, Some(name)) => Ok((synthetic(name, limit)?, None)),
        _ => Err(CliError::Config("give exactly one of --char and --synthetic".into())),
    }
}

#[derive(Serialize)]
struct DistanceJson {
    x: f64,
    t_max: f64,
    d0_squared: f64,
    t_star: f64,
    d_min_squared: f64,
    grid_spacing: f64,
    grid_points: usize,
    refine_iterations: usize,
    c_gs: f64,
    lambda: f64,
    eta: f64,
}

impl From<&DistanceReport> for DistanceJson {
    fn from(d: &DistanceReport) -> Self {
        DistanceJson {
            x: d.x,
            t_max: d.t_max,
            d0_squared: d.d0_squared,
            t_star: d.t_star,
            d_min_squared: d.d_min_squared,
            grid_spacing: d.grid_spacing,
            grid_points: d.grid_points,
            refine_iterations: d.refine_iterations,
            c_gs: d.c_gs,
            lambda: d.lambda,
            eta: d.eta,
        }
    }
}

#[derive(Serialize)]
struct TwistJson {
    label: String,
    conductor: u64,
    order: u64,
    parity: String,
    d_min_squared: f64,
    t_star: f64,
    threshold: f64,
    below_threshold: bool,
}

impl From<&TwistCandidate> for TwistJson {
    fn from(c: &TwistCandidate) -> Self {
        TwistJson {
            label: c.label.clone(),
            conductor: c.conductor,
            order: c.order,
            parity: c.parity.to_string(),
            d_min_squared: c.d_min_squared,
            t_star: c.t_star,
            threshold: c.threshold,
            below_threshold: c.below_threshold,
        }
    }
}

#[derive(Serialize)]
struct Envelope<T: Serialize> {
    target: &'static str,
    model: String,
    report: T,
}

#[derive(Serialize)]
struct CestologJson {
    x: u64,
    k: u64,
    xi: String,
    xi_x: f64,
    mean_abs: f64,
    hypothesis: bool,
    lhs: f64,
    lhs_argmax: u64,
    rhs_a: f64,
    log_rhs_a: f64,
    rhs_b: Option<f64>,
    log_rhs_b: Option<f64>,
    log_ratio_a: f64,
    log_ratio_b: Option<f64>,
}

#[derive(Serialize)]
struct HmtJson {
    x: u64,
    bound: f64,
    mean: f64,
    ratio: f64,
    distance: DistanceJson,
}

#[derive(Serialize)]
struct OrdersJson {
    q: u64,
    g: u64,
    m: u64,
    k: u64,
    t_max: f64,
    pair: TwistJson,
    close: bool,
    k_not_dividing_g: bool,
    both: bool,
    in_regime: bool,
    count_below: usize,
    scan: Vec<TwistJson>,
}

#[derive(Serialize)]
struct HildebrandJson {
    x: u64,
    lower: f64,
    actual: f64,
    ratio: f64,
    sigma_arg: f64,
}

/// Runs `target` and returns the JSON text.
pub fn explore(target: Target, args: &ExploreArgs) -> CliResult<String> {
    match target {
        Target::Cestolog => {
            let (f, chi) = model(args, args.x)?;
            let k = match &chi {
                Some(c) => c.order(),
                None => synthetic_order(&f)?,
            };
            let xi: XiFamily = args.xi.parse()?;
            let table = build_convolution(&f, args.x)?;
            let r = cestolog_report(&table, k, args.x, &xi)?;
            crate::format::to_json(&Envelope {
                target: "cestolog",
                model: f.provenance().to_string(),
                report: CestologJson {
                    x: r.x,
                    k: r.k,
                    xi: r.xi_name,
                    xi_x: r.xi_x,
                    mean_abs: r.mean_abs,
                    hypothesis: r.hypothesis,
                    lhs: r.lhs,
                    lhs_argmax: r.lhs_argmax,
                    rhs_a: r.rhs_a,
                    log_rhs_a: r.log_rhs_a,
                    rhs_b: r.rhs_b,
                    log_rhs_b: r.log_rhs_b,
                    log_ratio_a: r.log_ratio_a,
                    log_ratio_b: r.log_ratio_b,
                },
            })
        }
        Target::Hmt => {
            let (f, _) = model(args, args.x)?;
            let t = args.t.unwrap_or_else(|| (args.x as f64).ln().powi(2));
            let r = hmt_bound(&f, args.x, t, args.c_gs)?;
            crate::format::to_json(&Envelope {
                target: "hmt",
                model: f.provenance().to_string(),
                report: HmtJson {
                    x: args.x,
                    bound: r.bound,
                    mean: r.mean,
                    ratio: r.ratio,
                    distance: (&r.distance).into(),
                },
            })
        }
        Target::Orders => {
            let t = args.t.unwrap_or(1.0);
            let chi = match (&args.character, args.q) {
                (Some(label), None) => DirichletCharacter::parse(label)?,
                (None, Some(q)) => first_of_order(q, args.order)?,
                _ => return Err(CliError::Config("give exactly one of --char and --q".into())),
            };
            let psi = match &args.psi {
                Some(label) => DirichletCharacter::parse(label)?,
                None => nearest_twist(&chi, t, args.c_gs)?,
            };
            let r = orders_report(&chi, &psi, t, args.c_gs)?;
            crate::format::to_json(&Envelope {
                target: "orders",
                model: format!("chi[{}] vs psi[{}]", chi.label(), psi.label()),
                report: OrdersJson {
                    q: r.q,
                    g: r.g,
                    m: r.m,
                    k: r.k,
                    t_max: r.t_max,
                    pair: (&r.pair).into(),
                    close: r.close,
                    k_not_dividing_g: r.k_not_dividing_g,
                    both: r.both,
                    in_regime: r.in_regime,
                    count_below: r.count_below,
                    scan: r.scan.iter().map(Into::into).collect(),
                },
            })
        }
        Target::Hildebrand => {
            let (f, _) = model(args, args.x)?;
            let table = build_convolution(&f, args.x)?;
            let r = hildebrand_lower(&table, args.x)?;
            crate::format::to_json(&Envelope {
                target: "hildebrand",
                model: f.provenance().to_string(),
                report: HildebrandJson {
                    x: r.x,
                    lower: r.lower,
                    actual: r.actual,
                    ratio: r.ratio,
                    sigma_arg: r.sigma_arg,
                },
            })
        }
    }
}

/// Least common order of the exact prime values of a synthetic model.
fn synthetic_order(f: &MultiplicativeModel) -> CliResult<u64> {
    let mut k = 1;
    for v in f.prime_values() {
        match v {
            PrimeValue::Exact(u) => {
                if let Some(o) = u.order() {
                    k = charlab::arith::lcm(k, o);
                }
            }
            PrimeValue::Unimodular(_) => {
                return Err(CliError::Config("cestolog needs a model of finite order".into()));
            }
        }
    }
    Ok(k)
}

/// The first primitive character of order `g` modulo `q`.
pub fn first_of_order(q: u64, g: u64) -> CliResult<DirichletCharacter> {
    let filter = CharacterFilter {
        order: Some(g),
        ..CharacterFilter::primitive()
    };
    characters_mod(q, filter)?
        .into_iter()
        .next()
        .ok_or_else(|| CliError::Config(format!("no primitive character of order {g} modulo {q}")))
}

fn nearest_twist(chi: &DirichletCharacter, t: f64, c_gs: f64) -> CliResult<DirichletCharacter> {
    let scan = twist_scan(chi, t, c_gs)?;
    let best = scan
        .iter()
        .enumerate()
        .fold(None::<(usize, f64)>, |acc, (i, c)| match acc {
            Some((_, d)) if d <= c.d_min_squared => acc,
            _ => Some((i, c.d_min_squared)),
        })
        .ok_or_else(|| {
            CliError::Config(format!("no twist candidates for q = {}; pass --psi", chi.modulus()))
        })?;
    Ok(DirichletCharacter::parse(&scan[best.0].label)?)
}

/// `χ(n)` as a JSON object.
pub fn char_eval(label: &str, n: i64) -> CliResult<String> {
    let chi = DirichletCharacter::parse(label)?;
    let v = chi.eval(n);
    let z: Complex64 = v.to_complex();
    #[derive(Serialize)]
    struct Eval {
        label: String,
        n: i64,
        value: String,
        re: f64,
        im: f64,
    }
    crate::format::to_json(&Eval {
        label: chi.label(),
        n,
        value: v.to_string(),
        re: z.re,
        im: z.im,
    })
}

/// Structural data of `χ` as a JSON object.
pub fn char_info(label: &str) -> CliResult<String> {
    let chi = DirichletCharacter::parse(label)?;
    #[derive(Serialize)]
    struct Info {
        label: String,
        modulus: u64,
        order: u64,
        parity: String,
        conductor: u64,
        primitive: bool,
        principal: bool,
        conrey_index: u64,
        primitive_part: String,
        n_chi: Option<u64>,
    }
    crate::format::to_json(&Info {
        label: chi.label(),
        modulus: chi.modulus(),
        order: chi.order(),
        parity: chi.parity().to_string(),
        conductor: chi.conductor(),
        primitive: chi.is_primitive(),
        principal: chi.is_principal(),
        conrey_index: chi.conrey_index(),
        primitive_part: chi.primitive_part().primitive.label(),
        n_chi: chi.n_chi(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args() -> ExploreArgs {
        ExploreArgs {
            character: None,
            synthetic: None,
            x: 10_000,
            xi: "log2-quarter".into(),
            t: None,
            q: None,
            order: 2,
            psi: None,
            c_gs: 2.0,
        }
    }

    #[test]
    fn orders_for_101() {
        let a = ExploreArgs { q: Some(101), ..args() };
        let json: serde_json::Value = serde_json::from_str(&explore(Target::Orders, &a).unwrap()).unwrap();
        let r = &json["report"];
        assert_eq!(r["q"], 101);
        assert!(r["count_below"].as_u64().unwrap() <= 1);
        let conductors: Vec<u64> = r["scan"].as_array().unwrap().iter().map(|c| c["conductor"].as_u64().unwrap()).collect();
        assert!(conductors.iter().all(|&m| m == 3 || m == 4));
    }

    #[test]
    fn synthetic_models() {
        assert!(synthetic("minus-one", 100).unwrap().at_prime(7).unwrap().to_complex().re == -1.0);
        assert!(synthetic("root:1/3", 100).is_ok());
        assert!(synthetic("nit:0.5", 100).is_ok());
        assert!(synthetic("root:1/0", 100).is_err());
        assert!(synthetic("zeta", 100).is_err());
        let a = ExploreArgs { synthetic: Some("minus-one".into()), ..args() };
        let json: serde_json::Value = serde_json::from_str(&explore(Target::Hmt, &a).unwrap()).unwrap();
        assert!(json["report"]["ratio"].as_f64().unwrap().is_finite());
        let c = ExploreArgs { synthetic: Some("nit:0.5".into()), ..args() };
        assert!(explore(Target::Cestolog, &c).is_err());
    }

    #[test]
    fn non_finite_becomes_null() {
        let a = ExploreArgs { character: Some("q=7;e=2".into()), x: 100_000, ..args() };
        let text = explore(Target::Cestolog, &a).unwrap();
        let json: serde_json::Value = serde_json::from_str(&text).unwrap();
        let r = &json["report"];
        assert_eq!(r["k"], 3);
        assert!(r["hypothesis"].is_boolean());
        assert!(r["log_rhs_b"].as_f64().unwrap() >= r["log_rhs_a"].as_f64().unwrap());
    }

    #[test]
    fn char_reports() {
        let v: serde_json::Value = serde_json::from_str(&char_eval("q=7;e=1", 3).unwrap()).unwrap();
        assert_eq!(v["value"], "e(1/6)");
        let i: serde_json::Value = serde_json::from_str(&char_info("q=8;e=1,0").unwrap()).unwrap();
        assert_eq!(i["conductor"], 4);
    }
}
