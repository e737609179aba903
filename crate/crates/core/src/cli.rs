//! Command-line front end: `verify`, `scan` and `charges`.
//!
//! Flags override values from `--config <file.toml>`, which in turn override
//! the defaults of [`RunConfig`].

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::charges::ChargeRow;
use crate::error::{Error, Result};
use crate::suites::{charges_report, scan, verify, Mutation, RunConfig, ScanRow, Suite, VerifyReport};

#[derive(Parser, Debug)]
#[command(name = "ising-lab", version, about = "Operator identities of the trotterized critical Ising chain")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run identity suites; exit status 0 only if every check passes.
    Verify(CommonArgs),
    /// Trotter-error scaling and the Floquet-window sweep, as CSV.
    Scan(CommonArgs),
    /// Closed-form and oracle charges with fitted scalars and commutation residuals.
    Charges(CommonArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Args, Debug, Default)]
pub struct CommonArgs {
    /// TOML file with any `RunConfig` keys.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub n_sites: Option<usize>,
    /// Staggering grid `ω`, comma separated; circuits use `Ω = tanh ω`.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub omega: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub floquet_t: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub h: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub j: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub couplings: Option<Vec<f64>>,
    /// Suites to run, comma separated (default: all).
    #[arg(long, value_delimiter = ',')]
    pub suite: Option<Vec<String>>,
    /// Override for identity tolerances.
    #[arg(long)]
    pub tolerance: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Inject a defect: none, dplus-sign, jw-phase or all.
    #[arg(long)]
    pub mutation: Option<String>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

impl CommonArgs {
    pub fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)?;
                toml::from_str::<RunConfig>(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?
            }
            None => RunConfig::default(),
        };
        if let Some(n) = self.n_sites {
            cfg.n_sites = n;
        }
        let grids = [
            (&self.omega, &mut cfg.omega),
            (&self.floquet_t, &mut cfg.floquet_t),
            (&self.h, &mut cfg.h),
            (&self.j, &mut cfg.j),
            (&self.couplings, &mut cfg.couplings),
        ];
        for (flag, field) in grids {
            if let Some(v) = flag {
                *field = v.clone();
            }
        }
        if let Some(s) = &self.suite {
            cfg.suites = s.iter().map(|x| x.parse::<Suite>()).collect::<Result<_>>()?;
        }
        if self.tolerance.is_some() {
            cfg.tolerance = self.tolerance;
        }
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(m) = &self.mutation {
            cfg.mutation = m.parse::<Mutation>()?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn params_string(p: &std::collections::BTreeMap<String, f64>) -> String {
    p.iter().map(|(k, v)| format!("{k}={v:e}")).collect::<Vec<_>>().join(";")
}

pub fn render_verify(report: &VerifyReport, format: Format) -> Result<String> {
    let mut out = String::new();
    match format {
        Format::Json => out = serde_json::to_string_pretty(report)?,
        Format::Csv => {
            out.push_str("id,pass,residual,tolerance,wall_time_ms,params,anchor\n");
            for c in &report.checks {
                let _ = writeln!(
                    out,
                    "{},{},{:e},{:e},{:.3},{},{}",
                    csv_field(&c.id),
                    c.pass,
                    c.residual,
                    c.tolerance,
                    c.wall_time_ms,
                    csv_field(&params_string(&c.params)),
                    csv_field(&c.anchor)
                );
            }
        }
        Format::Text => {
            for c in &report.checks {
                let _ = writeln!(out, "{}", c.summary());
            }
            let _ = writeln!(out, "{} checks, {} failed", report.total, report.failed);
        }
    }
    Ok(out)
}

pub fn render_scan(rows: &[ScanRow], format: Format) -> Result<String> {
    Ok(match format {
        Format::Json => serde_json::to_string_pretty(rows)?,
        Format::Csv | Format::Text => {
            let mut out = String::from(ScanRow::HEADER);
            out.push('\n');
            for r in rows {
                out.push_str(&r.to_csv());
                out.push('\n');
            }
            out
        }
    })
}

pub fn render_charges(rows: &[ChargeRow], format: Format) -> Result<String> {
    let mut out = String::new();
    match format {
        Format::Json => out = serde_json::to_string_pretty(rows)?,
        Format::Csv => {
            out.push_str("label,omega,N,term_count,support_range,majorana_degree,scalar_re,scalar_im,residuals,error\n");
            for r in rows {
                let (re, im) = r.fitted_scalar.map_or((f64::NAN, f64::NAN), |s| (s[0], s[1]));
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{:e},{:e},{},{}",
                    r.label,
                    r.params.get("omega").copied().unwrap_or(f64::NAN),
                    r.params.get("N").copied().unwrap_or(f64::NAN),
                    r.term_count,
                    r.support_range,
                    r.majorana_degree,
                    re,
                    im,
                    csv_field(&params_string(&r.residuals)),
                    csv_field(r.error.as_deref().unwrap_or(""))
                );
            }
        }
        Format::Text => {
            for r in rows {
                let _ = writeln!(
                    out,
                    "{:<9} ω={:<5} terms={:<3} range={} scalar={:?} {}",
                    r.label,
                    r.params.get("omega").copied().unwrap_or(f64::NAN),
                    r.term_count,
                    r.support_range,
                    r.fitted_scalar,
                    params_string(&r.residuals)
                );
            }
        }
    }
    Ok(out)
}

fn emit(text: &str, out: &Option<PathBuf>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            if !text.ends_with('\n') {
                stdout.write_all(b"\n")?;
            }
        }
    }
    Ok(())
}

/// Runs a parsed command. Returns the process exit status: 0 on success,
/// 1 when a verification check fails, 2 on configuration or runtime errors.
pub fn execute(cli: Cli) -> i32 {
    let result = match cli.command {
        Command::Verify(args) => run_verify(&args),
        Command::Scan(args) => run_scan(&args).map(|_| 0),
        Command::Charges(args) => run_charges(&args).map(|_| 0),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn run_verify(args: &CommonArgs) -> Result<i32> {
    let cfg = args.resolve()?;
    let report = verify(&cfg)?;
    emit(&render_verify(&report, args.format.unwrap_or(Format::Json))?, &args.out)?;
    if report.all_pass {
        eprintln!("all {} checks passed", report.total);
        Ok(0)
    } else {
        eprintln!("{} of {} checks failed:", report.failed, report.total);
        for id in report.failing_ids() {
            eprintln!("  {id}");
        }
        Ok(1)
    }
}

fn run_scan(args: &CommonArgs) -> Result<()> {
    let rows = scan(&args.resolve()?)?;
    emit(&render_scan(&rows, args.format.unwrap_or(Format::Csv))?, &args.out)
}

fn run_charges(args: &CommonArgs) -> Result<()> {
    let rows = charges_report(&args.resolve()?)?;
    emit(&render_charges(&rows, args.format.unwrap_or(Format::Json))?, &args.out)
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(cli),
        Err(e) => {
            let _ = e.print();
            if e.use_stderr() {
                2
            } else {
                0
            }
        }
    }
}
