//! Command-line front end.
//!
//! Exit codes: 0 success (including `--help`), 1 usage or input error,
//! 2 soundness violation in `lemma` or `verify`.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::bazilevic::{membership_witness, ClassParams, MEMBERSHIP_THRESHOLD};
use crate::bounds::{self, FeketeSzegoInputs};
use crate::caratheodory::GridSpec;
use crate::distributions::{DistributionCoeffs, DistributionKind};
use crate::powerseries::TruncatedSeries;
use crate::report::{fmt_complex, fmt_sig, sig12};
use crate::telephone::{gtn_table, parse_rational, rational_to_f64, x_series};
use crate::verify::{self, Convolution, Functional, LemmaKind, Suite};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_UNSOUND: i32 = 2;

const DEFAULT_GRID: usize = 60;
const TABLE_DIGITS: usize = 6;
const MACHINE_DIGITS: usize = 12;

#[derive(Debug, Parser)]
#[command(name = "bazverify", version, about = "Coefficient bound calculator and verifier")]
pub struct Cli {
    /// key=value file with defaults (vartheta, kappa, varkappa, grid, format, member_threshold)
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, value_name = "R")]
    pub vartheta: Option<f64>,
    #[arg(long, global = true, value_name = "R")]
    pub kappa: Option<f64>,
    /// Accepts decimals or fractions such as 7/2.
    #[arg(long, global = true, value_name = "R")]
    pub varkappa: Option<String>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BoundKind {
    A2,
    A3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DistArg {
    Poisson,
    Borel,
    Pascal,
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    Remarks,
    Lemmas,
    Full,
}

#[derive(Debug, Args)]
pub struct DistFlags {
    /// Distribution parameter: m (poisson), sigma (borel) or q (pascal)
    #[arg(long = "dist-param", value_name = "R")]
    pub param: Option<f64>,
    /// Pascal shape s
    #[arg(long, default_value_t = 1)]
    pub s: u32,
    /// Explicit p2 for --dist custom
    #[arg(long)]
    pub p2: Option<f64>,
    /// Explicit p3 for --dist custom
    #[arg(long)]
    pub p3: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generalized telephone numbers T(0..=max-n)
    Gtn {
        #[arg(long, default_value_t = 10)]
        max_n: usize,
    },
    /// Taylor coefficients of exp(z + varkappa z^2 / 2)
    Xseries {
        #[arg(long, default_value_t = 6)]
        order: usize,
    },
    /// Printed |a2| or |a3| bound
    Bound {
        #[arg(value_enum)]
        which: BoundKind,
    },
    /// Fekete-Szego bound for |a3 - mu a2^2|
    Fs {
        #[arg(long, value_parser = parse_complex, value_name = "RE[,IM]")]
        mu: Complex64,
    },
    /// Inverse-function coefficient bounds
    InverseFs {
        #[arg(long, value_parser = parse_complex, value_name = "RE[,IM]")]
        hbar: Complex64,
    },
    /// Logarithmic coefficient bounds
    LogCoeff,
    /// Fekete-Szego bound for a function whose convolution lies in the class
    ConvFs {
        #[arg(long, value_enum)]
        dist: DistArg,
        #[command(flatten)]
        flags: DistFlags,
        #[arg(long, value_parser = parse_complex, value_name = "RE[,IM]", default_value = "0")]
        mu: Complex64,
    },
    /// Distribution series coefficients p_2..=p_max-n
    Dist {
        #[arg(long, value_enum)]
        kind: DistArg,
        #[arg(long, value_name = "R")]
        param: f64,
        #[arg(long, default_value_t = 1)]
        s: u32,
        #[arg(long, default_value_t = 10)]
        max_n: usize,
    },
    /// Schwarz-function membership witness for f read from a file
    Member {
        /// One coefficient per line, a0 first, as `re` or `re,im`; `#` starts a comment
        #[arg(long, value_name = "FILE")]
        f_coeffs: PathBuf,
    },
    /// Sampled supremum of a Caratheodory lemma functional
    Lemma {
        #[arg(long, value_parser = ["1", "3", "4"])]
        which: String,
        /// v, or hbar for lemma 4
        #[arg(long, value_parser = parse_complex, value_name = "RE[,IM]")]
        v: Complex64,
        #[arg(long)]
        grid: Option<usize>,
    },
    /// Run an experiment suite and write JSON-lines reports
    Verify {
        #[arg(long, value_enum, default_value = "remarks")]
        suite: SuiteArg,
        #[arg(long)]
        grid: Option<usize>,
        /// Reports go to <stem>-<unix millis>.<ext> next to this path
        #[arg(long, value_name = "FILE.jsonl")]
        out: Option<PathBuf>,
    },
}

/// `"1.5"` or `"1.5,-2"`.
pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let parse = |t: &str| -> Result<f64, String> {
        let x: f64 = t.trim().parse().map_err(|_| format!("not a number: {t:?}"))?;
        if x.is_finite() {
            Ok(x)
        } else {
            Err(format!("not finite: {t:?}"))
        }
    };
    match s.split_once(',') {
        Some((re, im)) => Ok(Complex64::new(parse(re)?, parse(im)?)),
        None => Ok(Complex64::new(parse(s)?, 0.0)),
    }
}

/// Values from the optional config file, validated up front.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FileConfig {
    pub vartheta: Option<f64>,
    pub kappa: Option<f64>,
    pub varkappa: Option<String>,
    pub grid: Option<usize>,
    pub format: Option<Format>,
    pub member_threshold: Option<f64>,
}

impl FileConfig {
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut cfg = FileConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("config line {}: expected key=value", i + 1))?;
            let (key, value) = (key.trim(), value.trim());
            let num = || value.parse::<f64>().map_err(|_| format!("config line {}: {key} needs a number", i + 1));
            match key {
                "vartheta" => cfg.vartheta = Some(num()?),
                "kappa" => cfg.kappa = Some(num()?),
                "varkappa" => cfg.varkappa = Some(value.to_string()),
                "grid" => {
                    cfg.grid = Some(value.parse().map_err(|_| format!("config line {}: grid needs an integer", i + 1))?)
                }
                "format" => cfg.format = Some(Format::from_str(value, true)?),
                "member_threshold" => cfg.member_threshold = Some(num()?),
                other => return Err(format!("config line {}: unknown key {other:?}", i + 1)),
            }
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("reading {}: {e}", path.display()))?;
        Self::parse(&text)
    }
}

/// Settings after applying flag > config file > built-in default.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub vartheta: f64,
    pub kappa: f64,
    pub varkappa: String,
    pub grid: usize,
    pub format: Format,
    pub member_threshold: f64,
}

impl RunConfig {
    pub fn resolve(cli: &Cli, file: &FileConfig, grid_flag: Option<usize>) -> Result<Self, String> {
        let cfg = RunConfig {
            vartheta: cli.vartheta.or(file.vartheta).unwrap_or(0.0),
            kappa: cli.kappa.or(file.kappa).unwrap_or(0.0),
            varkappa: cli.varkappa.clone().or_else(|| file.varkappa.clone()).unwrap_or_else(|| "1".into()),
            grid: grid_flag.or(file.grid).unwrap_or(DEFAULT_GRID),
            format: cli.format.or(file.format).unwrap_or(Format::Table),
            member_threshold: file.member_threshold.unwrap_or(MEMBERSHIP_THRESHOLD),
        };
        if cfg.grid < 2 {
            return Err(format!("grid must be at least 2, got {}", cfg.grid));
        }
        if !(cfg.member_threshold > 0.0 && cfg.member_threshold <= 1.0) {
            return Err(format!("member_threshold must lie in (0, 1], got {}", cfg.member_threshold));
        }
        Ok(cfg)
    }

    pub fn varkappa_f64(&self) -> Result<f64, String> {
        parse_rational(&self.varkappa).map(|r| rational_to_f64(&r)).map_err(|e| e.to_string())
    }

    pub fn params(&self) -> Result<ClassParams, String> {
        ClassParams::new(self.vartheta, self.kappa, self.varkappa_f64()?).map_err(|e| e.to_string())
    }
}

#[derive(Debug, Clone)]
enum Cell {
    Num(f64),
    Cx(Complex64),
    Text(String),
}

impl Cell {
    fn render(&self, digits: usize) -> String {
        match self {
            Cell::Num(x) => fmt_sig(*x, digits),
            Cell::Cx(z) => fmt_complex(*z, digits),
            Cell::Text(s) => s.clone(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<Complex64> for Cell {
    fn from(z: Complex64) -> Self {
        Cell::Cx(z)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.into())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl From<usize> for Cell {
    fn from(n: usize) -> Self {
        Cell::Text(n.to_string())
    }
}

/// What a subcommand produced, renderable in each format.
struct Output {
    json: Value,
    headers: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
    /// Replaces the aligned table in `table` format.
    plain: Option<String>,
}

impl Output {
    fn key_value(json: Value, pairs: Vec<(&str, Cell)>) -> Self {
        Output {
            json,
            headers: vec!["quantity", "value"],
            rows: pairs.into_iter().map(|(k, v)| vec![Cell::Text(k.into()), v]).collect(),
            plain: None,
        }
    }

    fn render(&self, format: Format) -> Result<String, String> {
        match format {
            Format::Json => serde_json::to_string_pretty(&self.json).map(|s| s + "\n").map_err(|e| e.to_string()),
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                let fail = |e: csv::Error| e.to_string();
                w.write_record(&self.headers).map_err(fail)?;
                for row in &self.rows {
                    w.write_record(row.iter().map(|c| c.render(MACHINE_DIGITS))).map_err(fail)?;
                }
                let bytes = w.into_inner().map_err(|e| e.to_string())?;
                String::from_utf8(bytes).map_err(|e| e.to_string())
            }
            Format::Table => {
                if let Some(p) = &self.plain {
                    return Ok(format!("{p}\n"));
                }
                let cells: Vec<Vec<String>> = self
                    .rows
                    .iter()
                    .map(|r| r.iter().map(|c| c.render(TABLE_DIGITS)).collect())
                    .collect();
                let mut widths: Vec<usize> = self.headers.iter().map(|h| h.len()).collect();
                for r in &cells {
                    for (w, c) in widths.iter_mut().zip(r) {
                        *w = (*w).max(c.chars().count());
                    }
                }
                let line = |items: Vec<&str>| {
                    items
                        .iter()
                        .zip(&widths)
                        .map(|(s, w)| format!("{s:<w$}"))
                        .collect::<Vec<_>>()
                        .join("  ")
                        .trim_end()
                        .to_string()
                };
                let mut out = line(self.headers.clone()) + "\n";
                for r in &cells {
                    out += &line(r.iter().map(String::as_str).collect());
                    out.push('\n');
                }
                Ok(out)
            }
        }
    }
}

fn cx_json(z: Complex64) -> Value {
    json!({"re": sig12(z.re), "im": sig12(z.im)})
}

struct Failure {
    code: i32,
    message: String,
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: e.to_string(),
        }
    }
}

/// Parses `argv` (including the program name), runs the command and writes
/// to the given streams. Returns the process exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(err, "{text}") } else { write!(out, "{text}") };
            return code;
        }
    };
    match dispatch(&cli, err) {
        Ok((output, format, code)) => match output.render(format) {
            Ok(text) => {
                let _ = write!(out, "{text}");
                code
            }
            Err(e) => {
                let _ = writeln!(err, "error: {e}");
                EXIT_USAGE
            }
        },
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

/// Entry point for the binary.
pub fn parse_and_dispatch(argv: impl IntoIterator<Item = String>) -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(argv, &mut stdout.lock(), &mut stderr.lock())
}

fn dispatch(cli: &Cli, err: &mut dyn Write) -> Result<(Output, Format, i32), Failure> {
    let file = match &cli.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let grid_flag = match &cli.command {
        Command::Lemma { grid, .. } | Command::Verify { grid, .. } => *grid,
        _ => None,
    };
    let cfg = RunConfig::resolve(cli, &file, grid_flag)?;
    let kx = cfg.varkappa_f64()?;
    if kx < 1.0 {
        let _ = writeln!(
            err,
            "warning: varkappa = {} < 1; the telephone-number reading of the sequence assumes varkappa >= 1",
            cfg.varkappa
        );
    }
    let mut code = EXIT_OK;

    let output = match &cli.command {
        Command::Gtn { max_n } => {
            let k = parse_rational(&cfg.varkappa)?;
            let rows = gtn_table(&k, *max_n)?;
            Output {
                json: json!({
                    "varkappa": cfg.varkappa,
                    "values": rows.iter().map(|r| json!({
                        "n": r.n, "exact": r.exact, "value": sig12(r.value), "via_egf": sig12(r.via_egf)
                    })).collect::<Vec<_>>(),
                }),
                headers: vec!["n", "exact", "value", "via_egf"],
                plain: Some(rows.iter().map(|r| r.exact.clone()).collect::<Vec<_>>().join(", ")),
                rows: rows
                    .iter()
                    .map(|r| vec![r.n.into(), r.exact.clone().into(), r.value.into(), r.via_egf.into()])
                    .collect(),
            }
        }
        Command::Xseries { order } => {
            let s = x_series(kx, *order);
            let coeffs: Vec<f64> = s.coeffs().iter().map(|c| c.re).collect();
            Output {
                json: json!({
                    "varkappa": sig12(kx),
                    "coefficients": coeffs.iter().map(|&c| sig12(c)).collect::<Vec<_>>(),
                }),
                headers: vec!["k", "coefficient"],
                rows: coeffs.iter().enumerate().map(|(k, &c)| vec![k.into(), c.into()]).collect(),
                plain: None,
            }
        }
        Command::Bound { which } => {
            let params = cfg.params()?;
            let (name, value) = match which {
                BoundKind::A2 => ("a2", bounds::a2_bound(&params)),
                BoundKind::A3 => ("a3", bounds::a3_bound(&params)),
            };
            Output::key_value(
                json!({"bound": name, "params": params, "value": sig12(value)}),
                vec![(name, value.into())],
            )
        }
        Command::Fs { mu } => {
            let params = cfg.params()?;
            let fs = bounds::fs_complex(&params, *mu);
            let mut json = json!({
                "params": params, "mu": cx_json(*mu),
                "value": sig12(fs.value), "alternate": sig12(fs.alternate),
            });
            let mut pairs: Vec<(&str, Cell)> = vec![("value", fs.value.into()), ("alternate", fs.alternate.into())];
            if mu.im == 0.0 {
                let v = bounds::fs_real(&params, mu.re);
                json["piecewise"] = serde_json::to_value(v)?;
                let branch = serde_json::to_value(v.branch)?.as_str().unwrap_or_default().to_string();
                pairs.extend([
                    ("piecewise", v.value.into()),
                    ("branch", branch.into()),
                    ("sigma1", v.sigma1.into()),
                    ("sigma2", v.sigma2.into()),
                    ("aleph", v.aleph.into()),
                ]);
            }
            Output::key_value(json, pairs)
        }
        Command::InverseFs { hbar } => {
            let params = cfg.params()?;
            let value = bounds::inverse_fs(&params, *hbar);
            let (d2, d2_oracle) = bounds::inverse_d2_bound(&params);
            let d3 = bounds::inverse_d3_bound(&params);
            Output::key_value(
                json!({
                    "params": params, "hbar": cx_json(*hbar), "value": sig12(value),
                    "d2": sig12(d2), "d2_from_a2": sig12(d2_oracle), "d3": sig12(d3),
                }),
                vec![
                    ("value", value.into()),
                    ("d2", d2.into()),
                    ("d2_from_a2", d2_oracle.into()),
                    ("d3", d3.into()),
                ],
            )
        }
        Command::LogCoeff => {
            let params = cfg.params()?;
            let b = bounds::log_coeff_bounds(&params);
            Output::key_value(
                json!({"params": params, "g1": sig12(b.g1), "g2": sig12(b.g2), "g2_from_fs": sig12(b.g2_from_fs)}),
                vec![("g1", b.g1.into()), ("g2", b.g2.into()), ("g2_from_fs", b.g2_from_fs.into())],
            )
        }
        Command::ConvFs { dist, flags, mu } => {
            let params = cfg.params()?;
            let conv = convolution(*dist, flags)?;
            let inputs = FeketeSzegoInputs::new(params, *mu).with_convolution(conv.wp2, conv.wp3);
            let value = bounds::conv_fs_complex(&inputs)?;
            let mut json = json!({"params": params, "mu": cx_json(*mu), "dist": conv, "value": sig12(value)});
            let mut pairs: Vec<(&str, Cell)> =
                vec![("value", value.into()), ("p2", conv.wp2.into()), ("p3", conv.wp3.into())];
            if mu.im == 0.0 {
                let v = bounds::conv_fs_real(&inputs)?;
                json["piecewise"] = serde_json::to_value(v)?;
                pairs.push(("piecewise", v.value.into()));
            }
            Output::key_value(json, pairs)
        }
        Command::Dist { kind, param, s, max_n } => {
            let kind = distribution_kind(*kind, *param, *s)?;
            let d = DistributionCoeffs::new(kind, *max_n)?;
            Output {
                json: json!({
                    "distribution": kind,
                    "coefficients": d.values.iter().enumerate()
                        .map(|(i, &p)| json!({"n": i + 2, "value": sig12(p)})).collect::<Vec<_>>(),
                }),
                headers: vec!["n", "p_n"],
                rows: d.values.iter().enumerate().map(|(i, &p)| vec![(i + 2).into(), p.into()]).collect(),
                plain: None,
            }
        }
        Command::Member { f_coeffs } => {
            let params = cfg.params()?;
            let f = read_series(f_coeffs)?;
            let w = membership_witness(&f, &params)?;
            let member = w.sup_norm <= cfg.member_threshold;
            let mut out = Output {
                json: json!({
                    "params": params,
                    "sup_norm": sig12(w.sup_norm),
                    "threshold": sig12(cfg.member_threshold),
                    "member": member,
                    "w": w.w.coeffs().iter().map(|&c| cx_json(c)).collect::<Vec<_>>(),
                }),
                headers: vec!["quantity", "value"],
                rows: vec![
                    vec!["sup_norm".into(), w.sup_norm.into()],
                    vec!["member".into(), member.to_string().into()],
                ],
                plain: None,
            };
            for (k, &c) in w.w.coeffs().iter().enumerate() {
                out.rows.push(vec![format!("w{k}").into(), c.into()]);
            }
            out
        }
        Command::Lemma { which, v, .. } => {
            let which = match which.as_str() {
                "1" => LemmaKind::One,
                "3" => LemmaKind::Three,
                _ => LemmaKind::Four,
            };
            let grid = GridSpec::uniform(cfg.grid)?;
            let r = verify::run_experiment(&Functional::Lemma { which, v: *v }, &ClassParams::new(0.0, 0.0, 1.0)?, &grid)?;
            if !r.sound {
                code = EXIT_UNSOUND;
            }
            Output::key_value(
                serde_json::to_value(&r)?,
                vec![
                    ("bound", r.as_stated.into()),
                    ("empirical_sup", r.empirical_sup.into()),
                    ("gap", r.gap.into()),
                ],
            )
        }
        Command::Verify { suite, out, .. } => {
            let suite = match suite {
                SuiteArg::Remarks => Suite::Remarks,
                SuiteArg::Lemmas => Suite::Lemmas,
                SuiteArg::Full => Suite::Full,
            };
            let grid = GridSpec::uniform(cfg.grid)?;
            let sweep = verify::run_suite(suite, kx, &grid)?;
            let mut summary = serde_json::to_value(&sweep.summary)?;
            if let Some(path) = out {
                let written = verify::write_jsonl(path, &sweep)?;
                let _ = writeln!(err, "wrote {}", written.display());
                summary["path"] = json!(written.display().to_string());
            }
            if !sweep.summary.sound {
                code = EXIT_UNSOUND;
                let _ = writeln!(err, "soundness violated in {} report(s)", sweep.summary.soundness_violations);
            }
            Output {
                json: summary,
                headers: vec!["experiment", "as_stated", "oracle", "empirical_sup", "gap", "ids"],
                rows: sweep
                    .reports
                    .iter()
                    .map(|r| {
                        vec![
                            r.experiment_id.clone().into(),
                            r.as_stated.into(),
                            r.oracle.into(),
                            r.empirical_sup.into(),
                            r.gap.into(),
                            r.discrepancy_ids.join(" ").into(),
                        ]
                    })
                    .collect(),
                plain: None,
            }
        }
    };
    Ok((output, cfg.format, code))
}

fn distribution_kind(kind: DistArg, param: f64, s: u32) -> Result<DistributionKind, String> {
    let k = match kind {
        DistArg::Poisson => DistributionKind::Poisson { m: param },
        DistArg::Borel => DistributionKind::Borel { sigma: param },
        DistArg::Pascal => DistributionKind::Pascal { q: param, s },
        DistArg::Custom => return Err("custom weights have no parameter form; use conv-fs --dist custom --p2 --p3".into()),
    };
    k.validate().map_err(|e| e.to_string())?;
    Ok(k)
}

fn convolution(dist: DistArg, flags: &DistFlags) -> Result<Convolution, String> {
    if dist == DistArg::Custom {
        let (Some(p2), Some(p3)) = (flags.p2, flags.p3) else {
            return Err("--dist custom needs --p2 and --p3".into());
        };
        return Convolution::custom(p2, p3).map_err(|e| e.to_string());
    }
    let param = flags.param.ok_or("--dist-param is required for this distribution")?;
    Convolution::from_kind(distribution_kind(dist, param, flags.s)?).map_err(|e| e.to_string())
}

/// Reads `a0, a1, ...` one per line.
pub fn parse_series(text: &str) -> Result<TruncatedSeries, String> {
    let mut coeffs = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        coeffs.push(parse_complex(line).map_err(|e| format!("line {}: {e}", i + 1))?);
    }
    if coeffs.len() < 4 {
        return Err(format!("need coefficients a0..a3 at least, got {}", coeffs.len()));
    }
    Ok(TruncatedSeries::new(coeffs.len() - 1, coeffs))
}

fn read_series(path: &Path) -> Result<TruncatedSeries, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("reading {}: {e}", path.display()))?;
    parse_series(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("bazverify").chain(args.iter().copied());
        let code = run(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn gtn_plain() {
        let (code, out, _) = call(&["gtn", "--varkappa", "1", "--max-n", "5"]);
        assert_eq!(code, 0);
        assert_eq!(out.trim(), "1, 1, 2, 4, 10, 26");
    }

    #[test]
    fn bound_a2_convex() {
        let (code, out, _) = call(&["bound", "a2", "--vartheta", "0", "--kappa", "1", "--format", "json"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["value"], 0.5);
    }

    #[test]
    fn fs_branch() {
        let (code, out, _) = call(&["fs", "--mu", "0", "--vartheta", "0", "--kappa", "0", "--varkappa", "1", "--format", "json"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["piecewise"]["branch"], "above-sigma2");
        assert_eq!(v["piecewise"]["value"], 1.0);
        assert_eq!(v["value"], 1.0);
    }

    #[test]
    fn usage_errors() {
        assert_eq!(call(&["fs"]).0, EXIT_USAGE);
        assert_eq!(call(&["nope"]).0, EXIT_USAGE);
        assert_eq!(call(&["fs", "--mu", "x"]).0, EXIT_USAGE);
        assert_eq!(call(&["bound", "a2", "--kappa", "-1"]).0, EXIT_USAGE);
        assert_eq!(call(&["lemma", "--which", "1", "--v", "0,1", "--grid", "4"]).0, EXIT_USAGE);
        assert_eq!(call(&["conv-fs", "--dist", "custom", "--p2", "1"]).0, EXIT_USAGE);
        assert_eq!(call(&["--help"]).0, EXIT_OK);
    }

    #[test]
    fn low_varkappa_warns() {
        let (code, _, err) = call(&["gtn", "--varkappa", "1/2", "--max-n", "3"]);
        assert_eq!(code, 0);
        assert!(err.contains("warning"));
    }

    #[test]
    fn config_precedence() {
        let file = FileConfig::parse("# defaults\nkappa = 1\nvartheta=1\ngrid = 7\n").unwrap();
        let cli = Cli::try_parse_from(["bazverify", "--vartheta", "0", "bound", "a2"]).unwrap();
        let cfg = RunConfig::resolve(&cli, &file, None).unwrap();
        assert_eq!((cfg.vartheta, cfg.kappa, cfg.grid), (0.0, 1.0, 7));
        assert_eq!(cfg.format, Format::Table);
        assert!(FileConfig::parse("colour = red").is_err());
        assert!(RunConfig::resolve(&cli, &FileConfig { grid: Some(1), ..Default::default() }, None).is_err());
    }

    #[test]
    fn series_file_format() {
        let f = parse_series("# f = z + z^2/2\n0\n1\n0.5\n0,0\n").unwrap();
        assert_eq!(f.order(), 3);
        assert_eq!(f.coeff(2), Complex64::new(0.5, 0.0));
        assert!(parse_series("0\n1\n").is_err());
    }

    #[test]
    fn csv_and_table() {
        let (_, csv, _) = call(&["dist", "--kind", "pascal", "--param", "0.5", "--max-n", "3", "--format", "csv"]);
        assert_eq!(csv, "n,p_n\n2,0.25\n3,0.125\n");
        let (_, table, _) = call(&["log-coeff"]);
        assert!(table.starts_with("quantity"));
        assert!(table.contains("g2_from_fs  0.75"));
    }
}
