//! `singdist`: singularity distances of planar 3-RPR manipulators.

mod manifest;
mod tables;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use log::warn;
use serde::Serialize;

use singdist_core::analysis::{self, CountRow, PipelineConfig};
use singdist_core::bezout::{self, VariableGrouping};
use singdist_core::geometry::{MotionGroup, MotionRep, RepKind};
use singdist_core::instance::ManipulatorInstance;
use singdist_core::polysys::{self, PolySystem};
use singdist_core::reference;
use singdist_core::tracker::{PathStatus, SolutionsFile};
use singdist_core::{par, Error};

use manifest::{RunManifest, Wrapped};

/// Process exit codes.
pub mod code {
    pub const USAGE: u8 = 2;
    pub const NUMERIC: u8 = 3;
    pub const MISMATCH: u8 = 4;
}

#[derive(Parser, Debug)]
#[command(name = "singdist", version, about = "Singularity distance of planar 3-RPR manipulators")]
struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, env = "SINGDIST_SEED", default_value_t = 1)]
    seed: u64,
    /// Disable the thread pool.
    #[arg(long, global = true)]
    serial: bool,
    /// More log output (repeatable).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct InstanceArgs {
    /// Instance JSON; the bundled reference instance when omitted.
    #[arg(long)]
    instance: Option<PathBuf>,
    /// Accept floating-point numbers, rationalised to 1e-12.
    #[arg(long)]
    inexact: bool,
}

#[derive(Args, Debug, Clone)]
struct RepArgs {
    /// pbr, perr, icr, bgr, dhr, qbr or dckr.
    #[arg(long)]
    rep: RepKind,
    /// se2 or s2; fixed for the homogeneous representations.
    #[arg(long)]
    mode: Option<MotionGroup>,
    /// Draw the squaring matrix from the seed instead of the fixed BGR/DCKR ones.
    #[arg(long)]
    random_coeffs: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Bézout number of one grouping.
    Bezout {
        #[command(flatten)]
        inst: InstanceArgs,
        #[command(flatten)]
        rep: RepArgs,
        /// e.g. "x1a,y1a,x2a,y2a;l,m" or "h:e0,e3,t1,t2;l".
        #[arg(long)]
        grouping: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Bézout numbers of all groupings.
    Search {
        #[command(flatten)]
        inst: InstanceArgs,
        #[command(flatten)]
        rep: RepArgs,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tracks all paths and writes the endpoints.
    Solve {
        #[command(flatten)]
        inst: InstanceArgs,
        #[command(flatten)]
        rep: RepArgs,
        /// Grouping spec or "best".
        #[arg(long, default_value = "best")]
        grouping: String,
        /// Track DHR/QBR despite their path counts.
        #[arg(long)]
        force: bool,
        /// Tracker settings as JSON.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Singularity distance and closest singular pose.
    Distance {
        #[command(flatten)]
        inst: InstanceArgs,
        #[command(flatten)]
        rep: RepArgs,
        #[arg(long, default_value = "best")]
        grouping: String,
        #[arg(long)]
        force: bool,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the solution-count CSV.
        #[arg(long)]
        table: Option<PathBuf>,
    },
    /// Re-checks a solutions file against an instance.
    Verify {
        #[command(flatten)]
        inst: InstanceArgs,
        #[arg(long)]
        solutions: PathBuf,
    },
    /// Regenerates the comparison tables and diffs them against the published values.
    ReproduceTables {
        #[command(flatten)]
        inst: InstanceArgs,
        #[arg(long)]
        out_dir: PathBuf,
        /// Only the Bézout tables; skips path tracking.
        #[arg(long)]
        skip_counts: bool,
    },
}

/// Error carrying the exit code.
#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse(_) | Error::Config(_) | Error::Usage(_) | Error::Dimension(_) | Error::Json(_) => code::USAGE,
            Error::Io(_) => code::USAGE,
            _ => code::NUMERIC,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e).into()
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e).into()
    }
}

type CmdResult = Result<(), Failure>;

fn load_instance(a: &InstanceArgs) -> Result<ManipulatorInstance, Failure> {
    match &a.instance {
        Some(p) => Ok(ManipulatorInstance::load(p, a.inexact)?),
        None => Ok(reference::reference_instance()),
    }
}

fn motion_rep(a: &RepArgs) -> Result<MotionRep, Failure> {
    match (a.rep.fixed_group(), a.mode) {
        (Some(_), Some(m)) => {
            warn!("--mode {m} ignored: {} has a fixed Lagrange form", a.rep);
            Ok(MotionRep::natural(a.rep))
        }
        (Some(_), None) => Ok(MotionRep::natural(a.rep)),
        (None, m) => Ok(MotionRep::new(a.rep, m.unwrap_or(MotionGroup::Se2))?),
    }
}

fn pipeline_config(seed: u64, rep: &RepArgs, grouping: &str, config: Option<&Path>) -> Result<PipelineConfig, Failure> {
    let mut cfg = match config {
        Some(p) => serde_json::from_str::<PipelineConfig>(&std::fs::read_to_string(p)?)?,
        None => PipelineConfig::default(),
    };
    cfg.track.seed = seed;
    cfg.track.validate()?;
    cfg.paper_coeffs = !rep.random_coeffs;
    cfg.squaring_seed = seed;
    cfg.grouping = Some(grouping.to_string());
    Ok(cfg)
}

fn system(inst: &ManipulatorInstance, rep: &MotionRep, a: &RepArgs, seed: u64) -> Result<PolySystem, Failure> {
    let coeffs = polysys::default_coeffs(rep.kind, !a.random_coeffs, seed);
    Ok(polysys::build_system(inst, rep, &coeffs)?.1)
}

fn write_json<T: Serialize>(path: Option<&Path>, manifest: &RunManifest, result: &T) -> CmdResult {
    if let Some(p) = path {
        let text = serde_json::to_string_pretty(&Wrapped { manifest, result })?;
        std::fs::write(p, text + "\n")?;
    }
    Ok(())
}

fn guard_large(rep: &MotionRep, force: bool) -> CmdResult {
    if matches!(rep.kind, RepKind::Dhr | RepKind::Qbr) && !force {
        return Err(Failure {
            code: code::USAGE,
            message: format!("{} needs tens of thousands of paths; pass --force to track them", rep.kind),
        });
    }
    Ok(())
}

fn cmd_bezout(seed: u64, inst: &InstanceArgs, ra: &RepArgs, spec: &str, out: Option<&Path>) -> CmdResult {
    let t = Instant::now();
    let instance = load_instance(inst)?;
    let rep = motion_rep(ra)?;
    let sys = system(&instance, &rep, ra, seed)?;
    let construction = t.elapsed();
    let names: Vec<String> = sys.vars().to_vec();
    let g = VariableGrouping::parse(&names, spec)?;
    let b = bezout::bezout_number(&sys, &g)?;
    println!("{b}");
    let mut m = RunManifest::new("bezout", &instance, Some(&rep), Some(g.spec()), seed, serde_json::Value::Null);
    m.timings.construction_ms = construction.as_secs_f64() * 1e3;
    m.timings.bezout_ms = t.elapsed().as_secs_f64() * 1e3 - m.timings.construction_ms;
    write_json(out, &m, &serde_json::json!({ "bezout": b.to_string() }))
}

fn cmd_search(seed: u64, inst: &InstanceArgs, ra: &RepArgs, csv: Option<&Path>, out: Option<&Path>) -> CmdResult {
    let t = Instant::now();
    let instance = load_instance(inst)?;
    let rep = motion_rep(ra)?;
    let sys = system(&instance, &rep, ra, seed)?;
    let construction = t.elapsed().as_secs_f64() * 1e3;
    let report = bezout::search_groupings(&sys)?;
    println!("{rep}: {} groupings, B_min {}, B_max {}", report.rows.len(), report.min, report.max);
    for g in report.best_groupings() {
        println!("  best  {g}");
    }
    for g in report.worst_groupings() {
        println!("  worst {g}");
    }
    let mut m = RunManifest::new("search", &instance, Some(&rep), None, seed, serde_json::Value::Null);
    m.timings.construction_ms = construction;
    m.timings.bezout_ms = t.elapsed().as_secs_f64() * 1e3 - construction;
    if let Some(p) = csv {
        std::fs::write(p, m.csv_comment() + &report.to_csv())?;
    }
    write_json(out, &m, &report)
}

fn cmd_solve(seed: u64, inst: &InstanceArgs, ra: &RepArgs, grouping: &str, force: bool, config: Option<&Path>, out: Option<&Path>) -> CmdResult {
    let instance = load_instance(inst)?;
    let rep = motion_rep(ra)?;
    guard_large(&rep, force)?;
    let cfg = pipeline_config(seed, ra, grouping, config)?;
    let solved = analysis::solve(&instance, &rep, &cfg)?;
    let run = &solved.run;
    println!(
        "{} finite (with multiplicity), {} diverged, {} failed; {} paths",
        run.count(PathStatus::Converged),
        run.count(PathStatus::DivergedToInfinity),
        run.count(PathStatus::TrackingFailed),
        run.endpoints.len()
    );
    let file = SolutionsFile::from_run(run, &solved.grouping, &cfg.track, Some(instance.hash()), Some(rep.to_string()));
    let mut m = RunManifest::new("solve", &instance, Some(&rep), Some(solved.grouping.spec()), seed, serde_json::to_value(&cfg)?);
    m.timings = solved.timings.clone();
    write_json(out, &m, &file)
}

#[allow(clippy::too_many_arguments)]
fn cmd_distance(
    seed: u64,
    inst: &InstanceArgs,
    ra: &RepArgs,
    grouping: &str,
    force: bool,
    config: Option<&Path>,
    out: Option<&Path>,
    table: Option<&Path>,
) -> CmdResult {
    let instance = load_instance(inst)?;
    let rep = motion_rep(ra)?;
    guard_large(&rep, force)?;
    let cfg = pipeline_config(seed, ra, grouping, config)?;
    let solved = analysis::solve(&instance, &rep, &cfg)?;
    let report = analysis::report(&instance, &solved)?;
    match (&report.value, &report.minimizer) {
        (Some(v), Some(mz)) => {
            println!("{} = {v:.12} ({rep})", report.metric);
            println!("closest singular pose: {:?}", mz.platform);
            if report.ties.len() > 1 {
                println!("{} minimizers tie within tolerance", report.ties.len());
            }
        }
        _ => println!("{}: no-minimizer ({rep}); no genuine real solution among {} finite endpoints", report.metric, report.finite),
    }
    if let Some(note) = &report.metric_note {
        println!("note: {note}");
    }
    let counts: Vec<String> = report.counts.iter().map(|(k, v)| format!("{k} {v}")).collect();
    println!("classes: {}", counts.join(", "));
    let checks = analysis::reference_checks(&instance, std::slice::from_ref(&report))?;
    for c in &checks {
        println!("reference {}: expected {} got {:?} {}", c.name, c.expected, c.actual, if c.pass { "ok" } else { "MISMATCH" });
    }
    let mut m = RunManifest::new("distance", &instance, Some(&rep), Some(report.grouping.clone()), seed, serde_json::to_value(&cfg)?);
    m.timings = report.timings.clone();
    if let Some(p) = table {
        std::fs::write(p, m.csv_comment() + &analysis::count_table_csv(&[CountRow::from_report(&report)]))?;
    }
    write_json(out, &m, &report)?;
    let failed = checks.iter().filter(|c| !c.pass).count();
    if failed > 0 {
        return Err(Failure { code: code::MISMATCH, message: format!("{failed} reference values differ") });
    }
    Ok(())
}

fn cmd_verify(inst: &InstanceArgs, path: &Path) -> CmdResult {
    let instance = load_instance(inst)?;
    let text = std::fs::read_to_string(path)?;
    let wrapped: manifest::Owned<SolutionsFile> = serde_json::from_str(&text)?;
    let (m, file) = (wrapped.manifest, wrapped.result);
    if m.instance_hash != instance.hash() {
        return Err(Failure { code: code::MISMATCH, message: "solutions file was produced for a different instance".into() });
    }
    let rep_text = m.representation.clone().ok_or_else(|| Failure { code: code::USAGE, message: "manifest lacks a representation".into() })?;
    let (kind, group) = rep_text
        .split_once(' ')
        .ok_or_else(|| Failure { code: code::USAGE, message: format!("bad representation '{rep_text}'") })?;
    let rep = MotionRep::new(kind.parse()?, group.parse()?)?;
    let cfg: PipelineConfig = serde_json::from_value(m.config.clone())?;
    let coeffs = polysys::default_coeffs(rep.kind, cfg.paper_coeffs, cfg.squaring_seed);
    let (_, sys) = polysys::build_system(&instance, &rep, &coeffs)?;
    let classifier = analysis::Classifier::new(&instance, &rep, &sys)?;
    let mut bad = 0;
    let mut tags = std::collections::BTreeMap::<&str, usize>::new();
    for s in file.solutions.iter().filter(|s| s.status == PathStatus::Converged) {
        let x = classifier.normalized(&singdist_core::tracker::from_pairs(&s.point));
        let res = sys.equations().iter().map(|e| analysis::scaled_residual(e, &x)).fold(0.0, f64::max);
        if res > analysis::RESIDUAL_TOL {
            bad += 1;
        }
        *tags.entry(classifier.classify_point(&x).tag.name()).or_default() += 1;
    }
    let finite = file.solutions.iter().filter(|s| s.status == PathStatus::Converged).count();
    println!("{finite} finite endpoints re-checked, {bad} above residual tolerance");
    for (k, v) in &tags {
        println!("  {k} {v}");
    }
    if bad > 0 {
        return Err(Failure { code: code::NUMERIC, message: format!("{bad} endpoints fail the residual check") });
    }
    Ok(())
}

fn cmd_reproduce(seed: u64, inst: &InstanceArgs, out_dir: &Path, skip_counts: bool) -> CmdResult {
    let instance = load_instance(inst)?;
    std::fs::create_dir_all(out_dir)?;
    let m = RunManifest::new("reproduce-tables", &instance, None, None, seed, serde_json::Value::Null);
    let mut diff = Vec::new();
    let (t1, t2, d, notes) = tables::bezout_tables(&instance)?;
    std::fs::write(out_dir.join("table1.csv"), m.csv_comment() + &t1)?;
    std::fs::write(out_dir.join("table2.csv"), m.csv_comment() + &t2)?;
    diff.extend(d);
    if skip_counts {
        println!("solution counts skipped");
    } else {
        let (t3, d) = tables::count_table(&instance, seed)?;
        std::fs::write(out_dir.join("table3.csv"), m.csv_comment() + &t3)?;
        diff.extend(d);
    }
    let mut text = if diff.is_empty() { "all values match\n".to_string() } else { diff.join("\n") + "\n" };
    for n in &notes {
        text.push_str(n);
        text.push('\n');
    }
    std::fs::write(out_dir.join("diff.txt"), &text)?;
    print!("{text}");
    if !diff.is_empty() {
        return Err(Failure { code: code::MISMATCH, message: format!("{} values differ from the published tables", diff.len()) });
    }
    Ok(())
}

fn run(cli: Cli) -> CmdResult {
    let seed = cli.seed;
    match &cli.command {
        Command::Bezout { inst, rep, grouping, out } => cmd_bezout(seed, inst, rep, grouping, out.as_deref()),
        Command::Search { inst, rep, csv, out } => cmd_search(seed, inst, rep, csv.as_deref(), out.as_deref()),
        Command::Solve { inst, rep, grouping, force, config, out } => {
            cmd_solve(seed, inst, rep, grouping, *force, config.as_deref(), out.as_deref())
        }
        Command::Distance { inst, rep, grouping, force, config, out, table } => {
            cmd_distance(seed, inst, rep, grouping, *force, config.as_deref(), out.as_deref(), table.as_deref())
        }
        Command::Verify { inst, solutions } => cmd_verify(inst, solutions),
        Command::ReproduceTables { inst, out_dir, skip_counts } => cmd_reproduce(seed, inst, out_dir, *skip_counts),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    if cli.serial {
        par::set_parallel(false);
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
