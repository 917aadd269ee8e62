//! Command-line front end for the tangle pipeline.

pub mod cache;
pub mod manifest;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use num_traits::Zero;
use clap::{Args, Parser, Subcommand, ValueEnum};
use tangle_core::asymptotics::{conjectured_alpha, fit_growth, parse_sequence_csv, AsymptoticFit, GrowthModel};
use tangle_core::oracle::{count_2pi, oracle_table, OracleOptions};
use tangle_core::renorm::{solve_couplings, tangle_series, ClassMap, CouplingSolution};
use tangle_core::series::GSeries;
use tangle_core::table::CountTable;
use tangle_core::tm::{EnumerateOptions, Enumerator};
use tangle_core::{Error, Result};

use cache::{default_cache_dir, Cache};
use manifest::RunManifest;

pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CACHE_VERSION: i32 = 3;
pub const EXIT_RESIDUAL: i32 = 4;
pub const EXIT_INSUFFICIENT_ORDER: i32 = 5;

#[derive(Debug, Parser)]
#[command(name = "tangle", version, about = "Exact enumeration of alternating tangle diagrams")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Count diagrams with the transfer matrix.
    Enumerate(EnumerateArgs),
    /// Solve the coupling renormalization and print tangle counts.
    Renorm(RenormArgs),
    /// Count diagrams by brute-force map generation.
    Oracle(OracleArgs),
    /// Fit the asymptotic growth of a `p,count` sequence.
    Fit(FitArgs),
    /// Conjectured exponent for loop weight `n`.
    Conjecture(ConjectureArgs),
    /// Rerun the command recorded in a manifest.
    Replay {
        manifest: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct EnumerateArgs {
    #[arg(long)]
    pub legs: usize,
    #[arg(long)]
    pub max_vertices: usize,
    #[arg(long)]
    pub tangencies: bool,
    /// Budget units per tangency; cells with `p1 + c p2` above the maximum
    /// are skipped.
    #[arg(long, default_value_t = 1)]
    pub tangency_cost: usize,
    #[arg(long)]
    pub allow_disconnected: bool,
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
    #[arg(long, default_value = "-")]
    pub out: String,
    /// Neither read nor write checkpoints.
    #[arg(long)]
    pub no_cache: bool,
    /// Checkpoint directory (default `$TANGLE_CACHE_DIR` or the platform
    /// cache directory).
    #[arg(long)]
    pub cache_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RenormArgs {
    #[arg(long)]
    pub counts2: PathBuf,
    #[arg(long)]
    pub counts4: PathBuf,
    #[arg(long)]
    pub counts6: Option<PathBuf>,
    #[arg(long)]
    pub order: usize,
    /// Tangency cost the input tables were enumerated with. Defaults to the
    /// value in each table's manifest, or 1 without one.
    #[arg(long)]
    pub tangency_cost: Option<usize>,
    #[arg(long, default_value = "-")]
    pub out: String,
    /// Also write couplings and series as JSON.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[arg(long)]
    pub legs: usize,
    #[arg(long)]
    pub vertices: usize,
    /// Print `p,count_total,count_2pi` for single-strand two-leg diagrams.
    #[arg(long)]
    pub check_2pi: bool,
    #[arg(long)]
    pub no_tangencies: bool,
    #[arg(long)]
    pub allow_disconnected: bool,
    #[arg(long, default_value_t = 50_000_000)]
    pub node_budget: u64,
    #[arg(long, default_value = "-")]
    pub out: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModelChoice {
    PurePower,
    LogCorrected,
    Both,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// `p,count` CSV; `-` reads standard input.
    #[arg(long, default_value = "-")]
    pub input: String,
    #[arg(long, value_enum, default_value_t = ModelChoice::Both)]
    pub model: ModelChoice,
    #[arg(long)]
    pub from: Option<usize>,
    #[arg(long)]
    pub to: Option<usize>,
    #[arg(long, default_value = "-")]
    pub out: String,
}

#[derive(Debug, Args)]
pub struct ConjectureArgs {
    #[arg(long)]
    pub n: f64,
}

/// Exit status for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::UnsupportedLegCount(_) | Error::OutOfRange(_) => EXIT_USAGE,
        Error::CacheVersion { .. } => EXIT_CACHE_VERSION,
        Error::Residual(_) | Error::Calibration(_) | Error::ClassMismatch { .. } => EXIT_RESIDUAL,
        Error::InsufficientTableOrder { .. } | Error::TangencyCost { .. } => EXIT_INSUFFICIENT_ORDER,
        _ => EXIT_FAILURE,
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn main_with(args: Vec<String>) -> i32 {
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { 0 };
        }
    };
    match run(cli, args) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn run(cli: Cli, args: Vec<String>) -> Result<()> {
    match cli.command {
        Command::Enumerate(a) => cmd_enumerate(a, args),
        Command::Renorm(a) => cmd_renorm(a, args),
        Command::Oracle(a) => cmd_oracle(a, args),
        Command::Fit(a) => cmd_fit(a, args),
        Command::Conjecture(a) => cmd_conjecture(a),
        Command::Replay { manifest } => {
            let m: RunManifest = serde_json::from_str(&std::fs::read_to_string(manifest)?)?;
            let cli = Cli::try_parse_from(&m.args).map_err(|e| Error::Parse(e.to_string()))?;
            run(cli, m.args)
        }
    }
}

fn write_output(out: &str, text: &str) -> Result<()> {
    if out == "-" {
        let mut stdout = std::io::stdout().lock();
        stdout.write_all(text.as_bytes())?;
        stdout.flush()?;
    } else {
        std::fs::write(out, text)?;
    }
    Ok(())
}

fn finish_manifest(mut m: RunManifest, out: &str, start: Instant) -> Result<()> {
    m.seconds = start.elapsed().as_secs_f64();
    if out != "-" {
        m.write_beside(Path::new(out))?;
    }
    Ok(())
}

pub fn cmd_enumerate(a: EnumerateArgs, args: Vec<String>) -> Result<()> {
    let start = Instant::now();
    if a.tangency_cost == 0 {
        return Err(Error::OutOfRange("--tangency-cost must be at least 1".into()));
    }
    if a.tangency_cost > 1 && !a.tangencies {
        return Err(Error::OutOfRange("--tangency-cost needs --tangencies".into()));
    }
    let opts = EnumerateOptions::new(a.legs, a.max_vertices)
        .tangencies(a.tangencies)
        .tangency_cost(a.tangency_cost)
        .allow_disconnected(a.allow_disconnected)
        .threads(a.threads);
    let params: BTreeMap<String, String> = [
        ("legs", a.legs.to_string()),
        ("max_vertices", a.max_vertices.to_string()),
        ("tangencies", a.tangencies.to_string()),
        ("tangency_cost", a.tangency_cost.to_string()),
        ("allow_disconnected", a.allow_disconnected.to_string()),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect();
    let mut manifest = RunManifest::new("enumerate", args, params);

    let cache = (!a.no_cache).then(|| Cache::new(a.cache_dir.clone().unwrap_or_else(default_cache_dir)));
    let checkpoint = match &cache {
        Some(c) => c.load(&opts)?,
        None => None,
    };
    let mut save = cache.is_some();
    let mut driver = match checkpoint {
        Some(ck) if ck.level > a.max_vertices => {
            eprintln!("cache: complete through level {}", ck.level - 1);
            write_output(&a.out, &ck.table.truncate(a.max_vertices).to_csv())?;
            return finish_manifest(manifest, &a.out, start);
        }
        Some(ck) if ck.extends_to(a.max_vertices, a.tangency_cost) => {
            eprintln!("cache: resuming at level {}", ck.level);
            save = a.max_vertices >= ck.target;
            Enumerator::resume(opts, ck.level, ck.table, ck.entries)?
        }
        _ => Enumerator::new(opts)?,
    };
    driver.run_with(|e, s| {
        eprintln!(
            "level {}: {} states ({} fresh) in {:.2}s",
            s.vertices,
            s.states,
            s.fresh_states,
            s.elapsed.as_secs_f64()
        );
        match &cache {
            Some(c) if save => c.save(e),
            _ => Ok(()),
        }
    })?;
    manifest.levels = driver
        .levels()
        .iter()
        .map(|s| (s.vertices, s.states, s.elapsed.as_secs_f64()))
        .collect();
    let table = driver.table();
    write_output(&a.out, &table.to_csv())?;
    finish_manifest(manifest, &a.out, start)
}

/// Tangency cost of a counts file: the flag if given, else the one recorded
/// in the manifest beside the file, else 1. A flag contradicting the manifest
/// is refused.
fn table_cost(path: &Path, flag: Option<usize>) -> Result<usize> {
    let mut name = path.as_os_str().to_owned();
    name.push(".manifest.json");
    let recorded = match std::fs::read_to_string(&name) {
        Ok(text) => {
            let m: RunManifest = serde_json::from_str(&text)?;
            m.parameters.get("tangency_cost").and_then(|c| c.parse::<usize>().ok())
        }
        Err(_) => None,
    };
    match (flag, recorded) {
        (Some(f), Some(r)) if f != r => Err(Error::OutOfRange(format!(
            "--tangency-cost {f} but {} was enumerated with cost {r}",
            path.display()
        ))),
        (Some(f), _) => Ok(f.max(1)),
        (None, Some(r)) => Ok(r.max(1)),
        (None, None) => Ok(1),
    }
}

fn read_table(path: &Path, legs: usize, flag: Option<usize>) -> Result<CountTable> {
    let cost = table_cost(path, flag)?;
    let text = std::fs::read_to_string(path)?;
    let table = CountTable::from_csv_with_cost(&text, None, cost)?;
    if table.legs() != legs {
        return Err(Error::OutOfRange(format!(
            "{} holds {}-leg counts, expected {legs}",
            path.display(),
            table.legs()
        )));
    }
    Ok(table)
}

fn series_json(s: &GSeries) -> Vec<Vec<String>> {
    s.coeffs()
        .iter()
        .map(|c| c.coeffs().iter().map(|v| v.to_string()).collect())
        .collect()
}

pub fn cmd_renorm(a: RenormArgs, args: Vec<String>) -> Result<()> {
    let start = Instant::now();
    let t2 = read_table(&a.counts2, 2, a.tangency_cost)?;
    let t4 = read_table(&a.counts4, 4, a.tangency_cost)?;
    let t6 = a.counts6.as_deref().map(|p| read_table(p, 6, a.tangency_cost)).transpose()?;
    let sol: CouplingSolution = solve_couplings(&t2, &t4, a.order)?;
    let map = ClassMap::builtin();
    let mut series = tangle_series(&t4.truncate(a.order), &sol, &map)?;
    if let Some(t6) = &t6 {
        series.extend(tangle_series(&t6.truncate(a.order), &sol, &map)?);
    }
    for (name, s) in &series {
        if !s.is_counting_series() {
            return Err(Error::Residual(format!("{name} has non-integral or negative coefficients")));
        }
    }
    let csv = series_csv(&series);
    write_output(&a.out, &csv)?;
    if let Some(path) = &a.json {
        let doc = serde_json::json!({
            "order": a.order,
            "couplings": {
                "t": series_json(&sol.t),
                "g1": series_json(&sol.g1),
                "g2": series_json(&sol.g2),
            },
            "series": series.iter().map(|(k, v)| (k.clone(), series_json(v))).collect::<BTreeMap<_, _>>(),
        });
        std::fs::write(path, serde_json::to_string_pretty(&doc)? + "\n")?;
    }
    let params = [
        ("counts2", a.counts2.display().to_string()),
        ("counts4", a.counts4.display().to_string()),
        ("counts6", a.counts6.as_ref().map(|p| p.display().to_string()).unwrap_or_default()),
        ("order", a.order.to_string()),
        ("tangency_cost", a.tangency_cost.map_or_else(|| "from manifest".to_string(), |c| c.to_string())),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect();
    finish_manifest(RunManifest::new("renorm", args, params), &a.out, start)
}

/// `type,p,k,count` rows for every nonzero coefficient from order 1 on.
pub fn series_csv(series: &BTreeMap<String, GSeries>) -> String {
    let mut out = String::from("type,p,k,count\n");
    for (name, s) in series {
        for (p, c) in s.coeffs().iter().enumerate().skip(1) {
            for (k, v) in c.coeffs().iter().enumerate() {
                if !v.numer().is_zero() {
                    let _ = writeln!(out, "{name},{p},{k},{v}");
                }
            }
        }
    }
    out
}

pub fn cmd_oracle(a: OracleArgs, args: Vec<String>) -> Result<()> {
    let start = Instant::now();
    let text = if a.check_2pi {
        if a.legs != 2 {
            return Err(Error::OutOfRange("--check-2pi needs --legs 2".into()));
        }
        let row = count_2pi(a.vertices, a.node_budget)?;
        format!("p,count_total,count_2pi\n{},{},{}\n", row.p, row.total, row.two_pi)
    } else {
        let opts = OracleOptions {
            connected_only: !a.allow_disconnected,
            tangencies: !a.no_tangencies,
            node_budget: a.node_budget,
        };
        oracle_table(a.legs, a.vertices, opts)?.to_csv()
    };
    write_output(&a.out, &text)?;
    let params = [
        ("legs", a.legs.to_string()),
        ("vertices", a.vertices.to_string()),
        ("check_2pi", a.check_2pi.to_string()),
        ("tangencies", (!a.no_tangencies).to_string()),
        ("allow_disconnected", a.allow_disconnected.to_string()),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect();
    finish_manifest(RunManifest::new("oracle", args, params), &a.out, start)
}

pub fn cmd_fit(a: FitArgs, args: Vec<String>) -> Result<()> {
    let start = Instant::now();
    let text = if a.input == "-" {
        std::io::read_to_string(std::io::stdin())?
    } else {
        std::fs::read_to_string(&a.input)?
    };
    let seq = parse_sequence_csv(&text)?;
    let window = match (a.from, a.to) {
        (None, None) => None,
        (from, to) => Some(from.unwrap_or(1)..=to.unwrap_or(usize::MAX)),
    };
    let models: &[GrowthModel] = match a.model {
        ModelChoice::PurePower => &[GrowthModel::PurePower],
        ModelChoice::LogCorrected => &[GrowthModel::LogCorrected],
        ModelChoice::Both => &[GrowthModel::PurePower, GrowthModel::LogCorrected],
    };
    let fits = models
        .iter()
        .map(|m| fit_growth(&seq, *m, window.clone()))
        .collect::<Result<Vec<AsymptoticFit>>>()?;
    write_output(&a.out, &(serde_json::to_string_pretty(&fits)? + "\n"))?;
    let params = [
        ("input", a.input.clone()),
        ("model", format!("{:?}", a.model)),
        ("from", format!("{:?}", a.from)),
        ("to", format!("{:?}", a.to)),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect();
    finish_manifest(RunManifest::new("fit", args, params), &a.out, start)
}

pub fn cmd_conjecture(a: ConjectureArgs) -> Result<()> {
    println!("{}", format_real(conjectured_alpha(a.n)?));
    Ok(())
}

/// Twelve significant decimals with trailing zeros removed.
pub fn format_real(x: f64) -> String {
    let s = format!("{x:.12}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}
