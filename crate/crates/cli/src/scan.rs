//! Character-family scans to CSV.
//!
//! Rows are computed in parallel and merged in `(q, label)` order, so the
//! output is byte-identical for every thread count. `runtime_ms` is left
//! empty unless timing is requested, since wall-clock times would break
//! that.

use std::path::PathBuf;
use std::time::Instant;

use charlab::arith::is_prime;
use charlab::characters::characters_mod;
use charlab::pretentious::{distance, twist_scan, MultiplicativeModel};
use charlab::sums::savings_profile;
use charlab::{CharacterFilter, DirichletCharacter, Parity};
use rayon::prelude::*;

use crate::config::canonical_hash;
use crate::format::sig;
use crate::{CliError, CliResult};

/// Default largest modulus a scan may reach; `--q-limit` raises it.
pub const DEFAULT_Q_LIMIT: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct ScanConfig {
    pub qmin: u64,
    pub qmax: u64,
    pub order: Option<u64>,
    pub parity: Option<Parity>,
    pub primes_only: bool,
    pub eps: Vec<f64>,
    /// `T` for the nearest-twist search.
    pub twist_t: f64,
    pub c_gs: f64,
    pub q_limit: u64,
    pub timing: bool,
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
}

impl ScanConfig {
    pub fn validate(&self) -> CliResult<()> {
        let bad = |m: String| Err(CliError::Config(m));
        if self.qmin < 1 || self.qmin > self.qmax {
            return bad(format!("need 1 <= qmin <= qmax, got {}..{}", self.qmin, self.qmax));
        }
        if self.eps.is_empty() {
            return bad("empty --eps grid".into());
        }
        if let Some(e) = self.eps.iter().find(|&&e| !(e > 0.0 && e <= 1.0)) {
            return bad(format!("eps {e} outside (0, 1]"));
        }
        if self.order == Some(0) {
            return bad("--order must be positive".into());
        }
        if !(self.twist_t >= 0.0) || !(self.c_gs > 0.0) {
            return bad("--twist-t must be >= 0 and --c-gs > 0".into());
        }
        if self.threads == Some(0) {
            return bad("--threads must be positive".into());
        }
        if self.qmax > self.q_limit {
            return Err(CliError::Lib(charlab::Error::Resource(format!(
                "qmax {} exceeds the scan limit {}; raise it with --q-limit",
                self.qmax, self.q_limit
            ))));
        }
        Ok(())
    }

    /// Hash of everything that determines the output bytes (thread count
    /// and output path excluded).
    pub fn hash(&self) -> String {
        let eps: Vec<String> = self.eps.iter().map(|e| e.to_string()).collect();
        canonical_hash(&[
            ("qmin", self.qmin.to_string()),
            ("qmax", self.qmax.to_string()),
            ("order", self.order.map_or("any".into(), |g| g.to_string())),
            ("parity", self.parity.map_or("any".into(), |p| p.to_string())),
            ("primes_only", self.primes_only.to_string()),
            ("eps", eps.join(",")),
            ("twist_t", self.twist_t.to_string()),
            ("c_gs", self.c_gs.to_string()),
            ("timing", self.timing.to_string()),
        ])
    }

    pub fn eps_names(&self) -> Vec<String> {
        self.eps.iter().map(|e| format!("delta_{e}")).collect()
    }
}

/// One CSV row.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanRecord {
    pub q: u64,
    pub label: String,
    pub order: u64,
    pub parity: Parity,
    pub pv_max: f64,
    pub a_q: f64,
    pub n_chi: Option<u64>,
    pub delta: Vec<f64>,
    pub d0_sq: f64,
    /// Nearest twist `(conductor, order, distance)`, absent when no
    /// primitive character has conductor `2 ≤ m ≤ log q`.
    pub twist: Option<(u64, u64, f64)>,
    pub runtime_ms: Option<f64>,
}

impl ScanRecord {
    pub fn cells(&self) -> Vec<String> {
        let mut v = vec![
            self.q.to_string(),
            self.label.clone(),
            self.order.to_string(),
            self.parity.to_string(),
            sig(self.pv_max),
            sig(self.a_q),
            self.n_chi.map_or(String::new(), |n| n.to_string()),
        ];
        v.extend(self.delta.iter().map(|&d| sig(d)));
        v.push(sig(self.d0_sq));
        match self.twist {
            Some((c, o, d)) => v.extend([c.to_string(), o.to_string(), sig(d)]),
            None => v.extend([String::new(), String::new(), String::new()]),
        }
        v.push(self.runtime_ms.map_or(String::new(), sig));
        v
    }
}

pub fn header(cfg: &ScanConfig) -> Vec<String> {
    let mut h: Vec<String> = ["q", "label", "order", "parity", "pv_max", "a_q", "n_chi"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    h.extend(cfg.eps_names());
    h.extend(["d0_sq", "twist_cond", "twist_order", "twist_dist", "runtime_ms"].map(String::from));
    h
}

pub fn scan_record(chi: &DirichletCharacter, cfg: &ScanConfig) -> CliResult<ScanRecord> {
    let start = Instant::now();
    let q = chi.modulus();
    let profile = savings_profile(chi, &cfg.eps)?;
    let d0_sq = if q >= 2 {
        let f = MultiplicativeModel::from_character(chi, q)?;
        let one = MultiplicativeModel::constant(charlab::UnitValue::ONE, q)?;
        distance(&f, &one, q as f64, 1)?
    } else {
        0.0
    };
    let mut twist: Option<(u64, u64, f64)> = None;
    for c in twist_scan(chi, cfg.twist_t, cfg.c_gs)? {
        if twist.map_or(true, |(_, _, d)| c.d_min_squared < d) {
            twist = Some((c.conductor, c.order, c.d_min_squared));
        }
    }
    Ok(ScanRecord {
        q,
        label: chi.label(),
        order: chi.order(),
        parity: chi.parity(),
        pv_max: profile.pv_max,
        a_q: profile.a_q,
        n_chi: profile.n_chi,
        delta: profile.delta_eps,
        d0_sq,
        twist,
        runtime_ms: cfg.timing.then(|| start.elapsed().as_secs_f64() * 1e3),
    })
}

/// The characters a scan visits: primitive, non-principal, passing the
/// filters, sorted by `(q, label)`.
pub fn scan_characters(cfg: &ScanConfig) -> CliResult<Vec<DirichletCharacter>> {
    let filter = CharacterFilter {
        order: cfg.order,
        parity: cfg.parity,
        primitive_only: true,
    };
    let mut out = Vec::new();
    for q in cfg.qmin.max(3)..=cfg.qmax {
        if cfg.primes_only && !is_prime(q) {
            continue;
        }
        let mut row: Vec<_> = characters_mod(q, filter)?.into_iter().filter(|c| !c.is_principal()).collect();
        row.sort_by_key(|c| c.label());
        out.extend(row);
    }
    Ok(out)
}

/// Spearman rank correlation (average ranks on ties); `NaN` when either
/// side is constant or fewer than two points are given.
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    fn ranks(v: &[f64]) -> Vec<f64> {
        let mut idx: Vec<usize> = (0..v.len()).collect();
        idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
        let mut r = vec![0.0; v.len()];
        let mut i = 0;
        while i < idx.len() {
            let mut j = i;
            while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
                j += 1;
            }
            let avg = (i + j) as f64 / 2.0 + 1.0;
            for &k in &idx[i..=j] {
                r[k] = avg;
            }
            i = j + 1;
        }
        r
    }
    if x.len() != y.len() || x.len() < 2 {
        return f64::NAN;
    }
    let (rx, ry) = (ranks(x), ranks(y));
    let n = x.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return f64::NAN;
    }
    sxy / (sxx * syy).sqrt()
}

/// Runs the scan and returns the CSV text, footer included.
pub fn run_scan(cfg: &ScanConfig) -> CliResult<String> {
    cfg.validate()?;
    let work = || -> CliResult<Vec<ScanRecord>> {
        let chars = scan_characters(cfg)?;
        chars.par_iter().map(|chi| scan_record(chi, cfg)).collect()
    };
    let records = match cfg.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?
            .install(work)?,
        None => work()?,
    };

    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    let csv_err = |e: csv::Error| CliError::Config(format!("csv: {e}"));
    w.write_record(header(cfg)).map_err(csv_err)?;
    for r in &records {
        w.write_record(r.cells()).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Config(format!("csv: {e}")))?;
    let mut text = String::from_utf8(bytes).expect("csv of UTF-8 strings");

    text.push_str(&format!("# config_hash={}\n", cfg.hash()));
    text.push_str(&format!("# rows={}\n", records.len()));
    let a: Vec<f64> = records.iter().map(|r| r.a_q).collect();
    for (i, name) in cfg.eps_names().iter().enumerate() {
        let d: Vec<f64> = records.iter().map(|r| r.delta[i]).collect();
        text.push_str(&format!("# spearman(a_q,{name})={}\n", sig(spearman(&a, &d))));
    }
    Ok(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(qmin: u64, qmax: u64) -> ScanConfig {
        ScanConfig {
            qmin,
            qmax,
            order: Some(2),
            parity: Some(Parity::Odd),
            primes_only: false,
            eps: vec![0.1, 0.25, 0.5],
            twist_t: 1.0,
            c_gs: 2.0,
            q_limit: DEFAULT_Q_LIMIT,
            timing: false,
            threads: None,
            out: None,
        }
    }

    #[test]
    fn odd_quadratic_three_to_five() {
        let chars = scan_characters(&cfg(3, 5)).unwrap();
        let qs: Vec<u64> = chars.iter().map(|c| c.modulus()).collect();
        assert_eq!(qs, vec![3, 4]);
    }

    #[test]
    fn header_and_rows() {
        let text = run_scan(&cfg(3, 40)).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "q,label,order,parity,pv_max,a_q,n_chi,delta_0.1,delta_0.25,delta_0.5,d0_sq,twist_cond,twist_order,twist_dist,runtime_ms"
        );
        let first = lines.next().unwrap();
        assert!(first.starts_with("3,q=3;e=1,2,odd,1,"), "{first}");
        assert!(text.contains("# spearman(a_q,delta_0.25)="));
        assert!(text.ends_with('\n'));
    }

    #[test]
    fn spearman_examples() {
        assert!((spearman(&[1.0, 2.0, 3.0], &[10.0, 20.0, 30.0]) - 1.0).abs() < 1e-15);
        assert!((spearman(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]) + 1.0).abs() < 1e-15);
        assert!((spearman(&[1.0, 2.0, 2.0, 3.0], &[1.0, 2.0, 3.0, 4.0]) - 0.948_683_298_050_513_8).abs() < 1e-12);
        assert!(spearman(&[1.0, 1.0], &[1.0, 2.0]).is_nan());
    }

    #[test]
    fn limits() {
        let mut c = cfg(3, 100);
        c.q_limit = 50;
        assert!(matches!(c.validate(), Err(CliError::Lib(charlab::Error::Resource(_)))));
        let mut c = cfg(3, 10);
        c.eps = vec![1.5];
        assert!(matches!(c.validate(), Err(CliError::Config(_))));
    }
}
