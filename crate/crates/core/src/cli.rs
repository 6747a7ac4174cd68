//! Command-line front end. `run` is what the binary calls; it never exits
//! the process itself so integration tests can drive it in-process.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::arith::{dim_vector_symmetric, exponents_of_graded, nu_p_che, wreath_exponents, Tower};
use crate::complexes::{build_cyclic_complex, Family, GradedAbelianGroup, Window};
use crate::equivariant::{bruteforce_cyclic, bruteforce_graded, WreathModel};
use crate::error::{Error, Result};
use crate::formulas::{detection_kernel, detection_kernel_sigma_p, is_prime, predict_wreath_cohomology};
use crate::spectral::{check_scaled_differential, Kind, SpectralEngine};

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "wreathcoh", version, about = "Integral cohomology of wreath products G ≀ C_p")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum GroupArg {
    Cp,
    Sp,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact cohomology of Tot Hom_{C_p}(W, C^{⊗p}) on a window.
    Bruteforce {
        #[arg(long)]
        p: u64,
        /// Order of the single summand C(n, d); ignored with --input.
        #[arg(long)]
        n: Option<u64>,
        #[arg(long)]
        d: Option<i64>,
        /// GradedAbelianGroup JSON for H^*(X).
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, allow_hyphen_values = true)]
        window: Window,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// Closed-form cohomology of the wreath product.
    Predict {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        max_degree: i64,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// Pages of the spectral sequences of Hom_{C_p}(W, D(n, d)).
    Spectral {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        d: i64,
        #[arg(long, default_value = "II")]
        kind: Kind,
        #[arg(long, allow_hyphen_values = true)]
        window: Window,
        /// Comma-separated page numbers; "inf" for E_∞.
        #[arg(long, value_delimiter = ',', default_value = "2")]
        pages: Vec<String>,
        /// Instead of pages, compare d_r of D(n, d) with n^r times that of D(1, d).
        #[arg(long)]
        scaled_check: Option<u64>,
        #[arg(long, default_value_t = 3)]
        r: usize,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// Kernel of restriction to the diagonal and the trivial subgroup.
    Kernel {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        max_degree: i64,
        #[arg(long, value_enum, default_value = "cp")]
        group: GroupArg,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// e and ee of an iterated wreath product (JSON).
    Exponents {
        /// e.g. "C:9 wr C_3"
        #[arg(long, conflicts_with = "input")]
        tower: Option<String>,
        /// Exponents of G ≀ C_p from H^*(G) given as JSON; needs --p.
        #[arg(long, requires = "p")]
        input: Option<PathBuf>,
        #[arg(long)]
        p: Option<u64>,
    },
    /// Dimensions dim W_i and ν_p(che) (JSON).
    Varieties {
        #[arg(long, conflicts_with = "tower", requires = "p")]
        sym: Option<u64>,
        #[arg(long)]
        p: Option<u64>,
        #[arg(long)]
        tower: Option<String>,
    },
    /// Brute force against prediction, one entry or the whole corpus.
    Verify {
        #[arg(long)]
        p: Option<u64>,
        #[arg(long)]
        n: Option<u64>,
        #[arg(long)]
        d: Option<i64>,
        #[arg(long, allow_hyphen_values = true)]
        window: Option<Window>,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum VerifyStatus {
    Match,
    Mismatch,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct DegreeDiff {
    pub degree: i64,
    pub brute: Vec<u64>,
    pub predicted: Vec<u64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyEntry {
    pub parameters: serde_json::Value,
    pub window: String,
    pub brute: GradedAbelianGroup,
    pub predicted: GradedAbelianGroup,
    pub status: VerifyStatus,
    pub diffs: Vec<DegreeDiff>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub entries: Vec<VerifyEntry>,
}

impl VerifyReport {
    pub fn all_match(&self) -> bool {
        self.entries.iter().all(|e| e.status == VerifyStatus::Match)
    }
}

/// H = Z/n in degree d; empty for n = 1.
pub fn single_summand(n: u64, d: i64) -> GradedAbelianGroup {
    GradedAbelianGroup::from_families(vec![Family::single(d, n, 1)]).expect("valid family")
}

/// Compares brute force and prediction for H on the window.
pub fn verify_graded(h: &GradedAbelianGroup, p: u64, window: Window, parameters: serde_json::Value) -> VerifyEntry {
    compare(h, p, window, parameters, bruteforce_graded(h, p, window))
}

fn compare(
    h: &GradedAbelianGroup,
    p: u64,
    window: Window,
    parameters: serde_json::Value,
    brute: Result<GradedAbelianGroup>,
) -> VerifyEntry {
    let empty = GradedAbelianGroup::zero();
    let computed = brute.and_then(|b| Ok((b, predict_wreath_cohomology(h, p, window.hi)?.result)));
    let (brute, pred) = match computed {
        Ok(x) => x,
        Err(e) => {
            return VerifyEntry {
                parameters,
                window: window.to_string(),
                brute: empty.clone(),
                predicted: empty,
                status: VerifyStatus::Inconclusive,
                diffs: vec![],
                error: Some(e.to_string()),
            }
        }
    };
    let bmap = brute.restrict(window.lo, window.hi);
    let pmap = pred.restrict(window.lo, window.hi);
    let diffs: Vec<DegreeDiff> = window
        .degrees()
        .filter_map(|m| {
            let b = bmap.get(&m).cloned().unwrap_or_default();
            let q = pmap.get(&m).cloned().unwrap_or_default();
            (b != q).then_some(DegreeDiff { degree: m, brute: b, predicted: q })
        })
        .collect();
    VerifyEntry {
        parameters,
        window: window.to_string(),
        brute: GradedAbelianGroup::from_degree_map(&bmap),
        predicted: GradedAbelianGroup::from_degree_map(&pmap),
        status: if diffs.is_empty() { VerifyStatus::Match } else { VerifyStatus::Mismatch },
        diffs,
        error: None,
    }
}

/// Tot Hom_{C_p}(W, D(n, d)) against the prediction for H = Z/n in degree d.
pub fn verify_cyclic(p: u64, n: u64, d: i64, window: Window) -> VerifyEntry {
    let params = json!({"p": p, "n": n, "d": d});
    compare(&single_summand(n, d), p, window, params, bruteforce_cyclic(p, n, d, window))
}

/// A small order prime to p.
pub fn coprime_order(p: u64) -> u64 {
    if p == 2 {
        3
    } else {
        2
    }
}

/// (p, n, d, window) for p ∈ {2,3,5}, n ∈ {1, p, p², q}, d ∈ {1,2,3}.
pub fn corpus() -> Vec<(u64, u64, i64, Window)> {
    let mut out = Vec::new();
    for p in [2u64, 3, 5] {
        for n in [1, p, p * p, coprime_order(p)] {
            for d in 1..=3i64 {
                out.push((p, n, d, corpus_window(p, d)));
            }
        }
    }
    out
}

pub fn corpus_window(p: u64, d: i64) -> Window {
    let pi = p as i64;
    Window { lo: pi * (d - 1) - 1, hi: pi * d + 6 }
}

/// Runs entries on a pool capped by WREATHCOH_THREADS (0 = serial).
pub fn run_sweep(entries: &[(u64, u64, i64, Window)]) -> VerifyReport {
    let threads = std::env::var("WREATHCOH_THREADS").ok().and_then(|s| s.trim().parse::<usize>().ok());
    let work = |&(p, n, d, w): &(u64, u64, i64, Window)| verify_cyclic(p, n, d, w);
    let entries = match threads {
        Some(0) => entries.iter().map(work).collect(),
        Some(k) => match rayon::ThreadPoolBuilder::new().num_threads(k).build() {
            Ok(pool) => pool.install(|| entries.par_iter().map(work).collect()),
            Err(_) => entries.iter().map(work).collect(),
        },
        None => entries.par_iter().map(work).collect(),
    };
    VerifyReport { entries }
}

fn read_graded(path: &PathBuf) -> Result<GradedAbelianGroup> {
    let s = std::fs::read_to_string(path).map_err(|e| Error::Malformed(format!("{}: {}", path.display(), e)))?;
    GradedAbelianGroup::from_json(&s)
}

fn check_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::Precondition(format!("p = {} is not a prime", p)))
    }
}

fn degree_table(h: &GradedAbelianGroup, lo: i64, hi: i64) -> String {
    let mut s = String::from("degree\tgroup\n");
    for m in lo..=hi {
        let g = h.group_at(m);
        if !g.is_trivial() {
            s.push_str(&format!("{}\t{}\n", m, g));
        }
    }
    s
}

fn pretty(v: &impl Serialize) -> String {
    serde_json::to_string(v).expect("serializable")
}

/// Runs one command line; returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(err, "{}", text) } else { write!(out, "{}", text) };
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e);
            EXIT_USAGE
        }
    }
}

fn emit(out: &mut dyn Write, s: &str) -> Result<()> {
    writeln!(out, "{}", s.trim_end()).map_err(|e| Error::Malformed(format!("write failed: {}", e)))
}

fn execute(cmd: Command, out: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::Bruteforce { p, n, d, input, window, format } => {
            check_prime(p)?;
            let h = match (input, n, d) {
                (Some(path), _, _) => read_graded(&path)?,
                (None, Some(n), Some(d)) => single_summand(n, d),
                _ => return Err(Error::Malformed("give --input or both --n and --d".into())),
            };
            let res = bruteforce_graded(&h, p, window)?;
            let res = GradedAbelianGroup::from_degree_map(&res.restrict(window.lo, window.hi));
            match format {
                Format::Json => emit(out, &pretty(&json!({"p": p, "window": window.to_string(), "certified": window.to_string(), "result": res})))?,
                Format::Table => emit(out, &format!("certified window {}\n{}", window, degree_table(&res, window.lo, window.hi)))?,
            }
            Ok(EXIT_OK)
        }
        Command::Predict { p, input, max_degree, format } => {
            check_prime(p)?;
            let h = read_graded(&input)?;
            let pred = predict_wreath_cohomology(&h, p, max_degree)?;
            match format {
                Format::Json => emit(out, &pretty(&pred))?,
                Format::Table => emit(out, &format!("{}\n{}", pred.result, degree_table(&pred.result, h.min_degree().unwrap_or(0).min(0), max_degree)))?,
            }
            Ok(EXIT_OK)
        }
        Command::Spectral { p, n, d, kind, window, pages, scaled_check, r, format } => {
            check_prime(p)?;
            if let Some(scale) = scaled_check {
                let rep = check_scaled_differential(p, d, scale, r, window)?;
                match format {
                    Format::Json => emit(out, &pretty(&rep))?,
                    Format::Table => {
                        let mut s = format!("scaled d_{} check, p = {}, n = {}, d = {}\ni\tj\tgens\tstatus\n", r, p, scale, d);
                        for b in &rep.bidegrees {
                            s.push_str(&format!("{}\t{}\t{}\t{:?}\n", b.i, b.j, b.generators, b.status));
                        }
                        emit(out, &s)?;
                    }
                }
                return Ok(if rep.passed() { EXIT_OK } else { EXIT_MISMATCH });
            }
            let model = WreathModel::build(build_cyclic_complex(n, d), p, window)?;
            let engine = SpectralEngine::from_total(model.total, kind);
            let mut dumps = Vec::new();
            let mut text = format!("certified window {}\n", engine.window());
            for pg in &pages {
                let r = if pg.trim() == "inf" {
                    engine.infinity_page()
                } else {
                    pg.trim().parse::<usize>().map_err(|_| Error::Malformed(format!("page {:?}", pg)))?
                };
                if r < 1 {
                    return Err(Error::Malformed("pages start at 1".into()));
                }
                let page = engine.page(r)?;
                text.push_str(&format!("{}\n", page));
                dumps.push(page.to_json());
            }
            match format {
                Format::Json => emit(out, &pretty(&dumps))?,
                Format::Table => emit(out, &text)?,
            }
            Ok(EXIT_OK)
        }
        Command::Kernel { p, input, max_degree, group, format } => {
            check_prime(p)?;
            let h = read_graded(&input)?;
            let k = match group {
                GroupArg::Cp => detection_kernel(&h, p, max_degree)?,
                GroupArg::Sp => detection_kernel_sigma_p(&h, p, max_degree)?,
            };
            match format {
                Format::Json => emit(out, &k.to_json())?,
                Format::Table => emit(out, &degree_table(&k, 0, max_degree))?,
            }
            Ok(EXIT_OK)
        }
        Command::Exponents { tower, input, p } => {
            let e = match (tower, input, p) {
                (Some(t), _, _) => t.parse::<Tower>()?.exponents()?,
                (None, Some(path), Some(p)) => {
                    check_prime(p)?;
                    wreath_exponents(exponents_of_graded(&read_graded(&path)?), p)?
                }
                _ => return Err(Error::Malformed("give --tower, or --input with --p".into())),
            };
            emit(out, &e.to_json())?;
            Ok(EXIT_OK)
        }
        Command::Varieties { sym, p, tower } => {
            let dims = match (sym, p, tower) {
                (Some(m), Some(p), _) => {
                    check_prime(p)?;
                    dim_vector_symmetric(m, p)
                }
                (None, _, Some(t)) => t.parse::<Tower>()?.dims(),
                _ => return Err(Error::Malformed("give --sym with --p, or --tower".into())),
            };
            emit(out, &pretty(&json!({"dims": dims.dims, "nu_p_che": nu_p_che(&dims)})))?;
            Ok(EXIT_OK)
        }
        Command::Verify { p, n, d, window, format } => {
            let entries: Vec<(u64, u64, i64, Window)> = match (p, n, d) {
                (Some(p), Some(n), Some(d)) => {
                    check_prime(p)?;
                    let p_i = p as i64;
                    vec![(p, n, d, window.unwrap_or(Window { lo: p_i * (d - 1) - 1, hi: p_i * d + 6 }))]
                }
                _ => corpus()
                    .into_iter()
                    .filter(|&(cp, cn, cd, _)| p.is_none_or(|x| x == cp) && n.is_none_or(|x| x == cn) && d.is_none_or(|x| x == cd))
                    .map(|(cp, cn, cd, w)| (cp, cn, cd, window.unwrap_or(w)))
                    .collect(),
            };
            if entries.is_empty() {
                return Err(Error::Malformed("no corpus entry matches the given parameters".into()));
            }
            let report = run_sweep(&entries);
            match format {
                Format::Json => emit(out, &pretty(&report))?,
                Format::Table => {
                    let mut s = String::from("p\tn\td\twindow\tstatus\n");
                    for e in &report.entries {
                        let pm = &e.parameters;
                        s.push_str(&format!("{}\t{}\t{}\t{}\t{:?}\n", pm["p"], pm["n"], pm["d"], e.window, e.status));
                        for df in &e.diffs {
                            s.push_str(&format!("  degree {}: brute {:?} predicted {:?}\n", df.degree, df.brute, df.predicted));
                        }
                        if let Some(msg) = &e.error {
                            s.push_str(&format!("  error: {}\n", msg));
                        }
                    }
                    emit(out, &s)?;
                }
            }
            Ok(if report.all_match() { EXIT_OK } else { EXIT_MISMATCH })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("wreathcoh").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn exponents_tower() {
        let (code, out, _) = run_str(&["exponents", "--tower", "C:9 wr C_3"]);
        assert_eq!(code, 0);
        assert_eq!(out.trim(), r#"{"e":27,"ee":27}"#);
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run_str(&["predict", "--bogus"]).0, 2);
        assert_eq!(run_str(&["frobnicate"]).0, 2);
        assert_eq!(run_str(&["exponents", "--tower", "C:6"]).0, 2);
        assert_eq!(run_str(&["--help"]).0, 0);
    }

    #[test]
    fn single_verify_matches() {
        let (code, out, _) = run_str(&["verify", "--p", "3", "--n", "9", "--d", "2", "--window", "0:14"]);
        assert_eq!(code, 0, "{}", out);
        assert!(out.contains("Match"));
    }

    #[test]
    fn corpus_shape() {
        let c = corpus();
        assert_eq!(c.len(), 36);
        assert!(c.iter().all(|&(p, n, _, _)| n == 1 || n % p == 0 || n == coprime_order(p)));
        assert_eq!(corpus_window(3, 2), Window { lo: 2, hi: 12 });
    }
}
