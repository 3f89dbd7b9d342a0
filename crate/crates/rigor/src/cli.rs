//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 for usage or domain errors, 2 for unreadable
//! or invalid files and failed writes. Every run prints the resolved seed
//! first; the default seed is [`DEFAULT_SEED`].

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rigor_core::constructions::{bootstrap_clique_with, build_matching_gadget, MatchingSource};
use rigor_core::graph::gnp_sample;
use rigor_core::rigidity::{
    contracted_closure, generic_rank_formula, max_rigid_dim_search, probe_seed, rank_repeated, Embedding,
};
use rigor_core::rng::{derive_seed, labels};
use rigor_core::thresholds::{a_of_c, phase_diagram, phi, Regime};
use rigor_core::{RngStream, VertexSet};

use crate::experiments::{min_degree_concentration, records_csv, run_experiment, Check, DGrid, ExperimentConfig};
use crate::io::{fmt_sig, phase_csv, read_graph, write_closure, write_graph, write_text};

pub const DEFAULT_SEED: u64 = 2718;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "rigor", version, about = "Generic rigidity of graphs and random-graph experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Rank of the rigidity matrix at random embeddings, and the verdict.
    Rank(RankArgs),
    /// Closure (optionally contracted) as CSV plus a JSON sidecar.
    Closure(ClosureArgs),
    /// G(n, p) experiments over a grid of c = (n - 1) p / log n.
    Scan(ScanArgs),
    /// a(c) and the regime for one c, or the phase diagram as CSV.
    Thresholds(ThresholdArgs),
    /// Matching gadget graph file.
    Gadget(GadgetArgs),
    /// G(n, p) sample as a graph file.
    Gnp(GnpArgs),
    /// Maximum rigid dimension with its probe transcript.
    Maxdim(MaxdimArgs),
    /// Clique bootstrap event log as JSON.
    Bootstrap(BootstrapArgs),
    /// Minimum-degree concentration of G(n, p) against a(c).
    Mindegree(MindegreeArgs),
}

#[derive(Args, Debug)]
pub struct RankArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub dim: u64,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub repeats: u64,
}

#[derive(Args, Debug)]
pub struct ClosureArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub dim: u64,
    /// Comma-separated vertices whose pairs are contracted.
    #[arg(long)]
    pub contract: Option<String>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum GridArg {
    Binary,
    Full,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum CheckArg {
    DeltaRigidity,
    EdgeCriterion,
    ClosureDensity,
    MinDegreeConcentration,
    BootstrapSuccess,
}

impl From<CheckArg> for Check {
    fn from(c: CheckArg) -> Check {
        match c {
            CheckArg::DeltaRigidity => Check::DeltaRigidity,
            CheckArg::EdgeCriterion => Check::EdgeCriterion,
            CheckArg::ClosureDensity => Check::ClosureDensity,
            CheckArg::MinDegreeConcentration => Check::MinDegreeConcentration,
            CheckArg::BootstrapSuccess => Check::BootstrapSuccess,
        }
    }
}

#[derive(Args, Debug)]
pub struct ScanArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub c_min: f64,
    #[arg(long)]
    pub c_max: f64,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub steps: u64,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub trials: u64,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Records as JSON Lines; the summaries go to `<stem>.summary.json`.
    #[arg(long)]
    pub out: PathBuf,
    /// Optional CSV copy of the records.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = GridArg::Binary)]
    pub grid: GridArg,
    /// Comma-separated checks; all of them by default.
    #[arg(long, value_enum, value_delimiter = ',')]
    pub checks: Vec<CheckArg>,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub repeats: u64,
    #[arg(long)]
    pub bootstrap_dim: Option<usize>,
    /// Record per-phase wall-clock times (records stop being reproducible).
    #[arg(long)]
    pub timings: bool,
}

#[derive(Args, Debug)]
pub struct ThresholdArgs {
    #[arg(long, conflicts_with = "phase", required_unless_present = "phase")]
    pub c: Option<f64>,
    #[arg(long, requires_all = ["c_min", "c_max", "steps", "out"])]
    pub phase: bool,
    #[arg(long, requires = "phase")]
    pub c_min: Option<f64>,
    #[arg(long, requires = "phase")]
    pub c_max: Option<f64>,
    #[arg(long, requires = "phase")]
    pub steps: Option<usize>,
    #[arg(long, requires = "phase")]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct GadgetArgs {
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub dim: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct GnpArgs {
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub n: u64,
    #[arg(long)]
    pub p: f64,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct MaxdimArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub repeats: u64,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum MatchingArg {
    Closure,
    Graph,
}

#[derive(Args, Debug)]
pub struct BootstrapArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub dim: u64,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = MatchingArg::Closure)]
    pub matching: MatchingArg,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct MindegreeArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub c: f64,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub trials: u64,
    #[arg(long)]
    pub seed: Option<u64>,
}

/// A failed command together with its exit code.
#[derive(Debug)]
pub enum Failure {
    Usage(anyhow::Error),
    Data(anyhow::Error),
}

impl Failure {
    pub fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Data(_) => EXIT_DATA,
        }
    }

    fn usage<E: Into<anyhow::Error>>(e: E) -> Failure {
        Failure::Usage(e.into())
    }

    fn data<E: Into<anyhow::Error>>(e: E) -> Failure {
        Failure::Data(e.into())
    }
}

type Outcome = Result<(), Failure>;

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match dispatch(cli.command, out) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let e = match &f {
                Failure::Usage(e) | Failure::Data(e) => e,
            };
            let _ = writeln!(err, "error: {e:#}");
            f.code()
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> Outcome {
    match cmd {
        Command::Rank(a) => cmd_rank(a, out),
        Command::Closure(a) => cmd_closure(a, out),
        Command::Scan(a) => cmd_scan(a, out),
        Command::Thresholds(a) => cmd_thresholds(a, out),
        Command::Gadget(a) => cmd_gadget(a, out),
        Command::Gnp(a) => cmd_gnp(a, out),
        Command::Maxdim(a) => cmd_maxdim(a, out),
        Command::Bootstrap(a) => cmd_bootstrap(a, out),
        Command::Mindegree(a) => cmd_mindegree(a, out),
    }
}

fn say(out: &mut dyn Write, line: String) -> Outcome {
    writeln!(out, "{line}").map_err(Failure::data)
}

fn print_seed(out: &mut dyn Write, seed: Option<u64>) -> Result<u64, Failure> {
    let seed = seed.unwrap_or(DEFAULT_SEED);
    say(out, format!("seed={seed}"))?;
    Ok(seed)
}

fn load(path: &Path) -> Result<rigor_core::Graph, Failure> {
    read_graph(path).map_err(Failure::data)
}

fn cmd_rank(a: RankArgs, out: &mut dyn Write) -> Outcome {
    let seed = print_seed(out, a.seed)?;
    let g = load(&a.graph)?;
    let d = a.dim as usize;
    let rank = rank_repeated(&g, d, seed, a.repeats as usize).map_err(Failure::usage)?;
    let generic = generic_rank_formula(g.n(), d);
    let verdict = if rank == generic { "Rigid" } else { "Flexible" };
    say(out, format!("rank={rank} generic={generic} verdict={verdict}"))
}

fn parse_vertex_list(text: &str, n: usize) -> anyhow::Result<VertexSet> {
    let mut vs = Vec::new();
    for tok in text.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let v: usize = tok.parse().map_err(|_| anyhow::anyhow!("not a vertex: {tok:?}"))?;
        if vs.contains(&v) {
            anyhow::bail!("vertex {v} listed twice");
        }
        vs.push(v);
    }
    Ok(VertexSet::from_vertices(n, vs)?)
}

fn cmd_closure(a: ClosureArgs, out: &mut dyn Write) -> Outcome {
    let seed = print_seed(out, a.seed)?;
    let g = load(&a.graph)?;
    let d = a.dim as usize;
    let set = match &a.contract {
        Some(text) => parse_vertex_list(text, g.n()).map_err(Failure::data)?,
        None => VertexSet::empty(g.n()),
    };
    let emb = Embedding::random(g.n(), d, probe_seed(seed, d, 0)).map_err(Failure::data)?;
    let report = contracted_closure(&g, d, &set, &emb).map_err(Failure::data)?;
    let side = write_closure(&a.out, &report).map_err(Failure::data)?;
    say(out, format!("members={} base_rank={} sidecar={}", report.member_count(), report.base_rank(), side.display()))
}

fn c_grid(c_min: f64, c_max: f64, steps: usize) -> Vec<f64> {
    if steps == 1 {
        return vec![c_min];
    }
    let h = (c_max - c_min) / (steps - 1) as f64;
    (0..steps).map(|i| if i + 1 == steps { c_max } else { c_min + h * i as f64 }).collect()
}

/// `out` with its extension replaced by `summary.json`.
pub fn summary_path(out: &Path) -> PathBuf {
    out.with_extension("summary.json")
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| "NA".to_string(), |v| fmt_sig(v, 6))
}

fn cmd_scan(a: ScanArgs, out: &mut dyn Write) -> Outcome {
    let seed = print_seed(out, a.seed)?;
    if a.n < 2 || !(a.c_min > 0.0) || !(a.c_max >= a.c_min) || !a.c_max.is_finite() {
        return Err(Failure::usage(anyhow::anyhow!("scan needs n >= 2 and 0 < c-min <= c-max")));
    }
    let checks: Vec<Check> =
        if a.checks.is_empty() { Check::ALL.to_vec() } else { a.checks.iter().map(|&c| c.into()).collect() };
    let mut records = Vec::new();
    let mut summaries = Vec::new();
    for (i, c) in c_grid(a.c_min, a.c_max, a.steps as usize).into_iter().enumerate() {
        let mut cfg = ExperimentConfig::from_c(a.n, c, a.trials as usize, derive_seed(seed, i as u64));
        cfg.d_grid = match a.grid {
            GridArg::Binary => DGrid::BinarySearch,
            GridArg::Full => DGrid::full(a.n),
        };
        cfg.checks = checks.clone();
        cfg.repeats = a.repeats as usize;
        cfg.bootstrap_dim = a.bootstrap_dim;
        cfg.timings = a.timings;
        cfg.validate().map_err(Failure::usage)?;
        let result = run_experiment(&cfg).map_err(Failure::data)?;
        let s = &result.summary;
        say(
            out,
            format!(
                "c={} p={} trials={} delta_rigid={} mean_d_max={} ratio={} edge_agreement={} bootstrap={}",
                fmt_sig(c, 6),
                fmt_sig(cfg.p, 6),
                s.trials,
                opt(s.delta_rigid_fraction),
                opt(s.mean_d_max),
                opt(s.d_max_ratio_mean),
                opt(s.edge_pair_agreement),
                opt(s.bootstrap_success_rate),
            ),
        )?;
        records.extend(result.records);
        summaries.push(result.summary);
    }
    crate::experiments::write_records(&a.out, &records).map_err(Failure::data)?;
    let sp = summary_path(&a.out);
    let text = serde_json::to_string_pretty(&summaries).map_err(Failure::data)? + "\n";
    write_text(&sp, &text).map_err(Failure::data)?;
    if let Some(csv) = &a.csv {
        write_text(csv, &records_csv(&records).map_err(Failure::data)?).map_err(Failure::data)?;
    }
    Ok(())
}

fn cmd_thresholds(a: ThresholdArgs, out: &mut dyn Write) -> Outcome {
    print_seed(out, None)?;
    if a.phase {
        let (Some(lo), Some(hi), Some(steps), Some(path)) = (a.c_min, a.c_max, a.steps, a.out) else {
            return Err(Failure::usage(anyhow::anyhow!("--phase needs --c-min, --c-max, --steps and --out")));
        };
        let rows = phase_diagram(lo, hi, steps).map_err(Failure::usage)?;
        write_text(&path, &phase_csv(&rows).map_err(Failure::data)?).map_err(Failure::data)?;
        return say(out, format!("rows={} out={}", rows.len(), path.display()));
    }
    let c = a.c.expect("clap requires --c without --phase");
    let a_c = a_of_c(c).map_err(Failure::usage)?;
    let half = c / 2.0;
    let phi_half = phi(c, half).map_err(Failure::usage)?;
    say(
        out,
        format!(
            "a={} c_half={} phi_c_half={} regime={}",
            fmt_sig(a_c, 12),
            fmt_sig(half, 12),
            fmt_sig(phi_half, 12),
            Regime::of(c).as_str()
        ),
    )
}

fn cmd_gadget(a: GadgetArgs, out: &mut dyn Write) -> Outcome {
    print_seed(out, None)?;
    let gad = build_matching_gadget(a.dim as usize).map_err(Failure::usage)?;
    let k = gad.half;
    let comments = vec![
        format!("matching gadget d={}", gad.d),
        format!("halves: X = 0..{k}, Y = {k}..{}; matching k <-> {k} + k", 2 * k),
    ];
    write_graph(&a.out, &gad.graph, &comments).map_err(Failure::data)?;
    say(out, format!("n={} m={}", gad.graph.n(), gad.graph.edge_count()))
}

fn cmd_gnp(a: GnpArgs, out: &mut dyn Write) -> Outcome {
    let seed = print_seed(out, a.seed)?;
    let mut rng = RngStream::new(seed).substream(labels::GRAPH);
    let g = gnp_sample(a.n as usize, a.p, &mut rng).map_err(Failure::usage)?;
    write_graph(&a.out, &g, &[format!("G(n={}, p={}) seed={seed}", a.n, a.p)]).map_err(Failure::data)?;
    say(out, format!("n={} m={}", g.n(), g.edge_count()))
}

fn cmd_maxdim(a: MaxdimArgs, out: &mut dyn Write) -> Outcome {
    let seed = print_seed(out, a.seed)?;
    let g = load(&a.graph)?;
    let s = max_rigid_dim_search(&g, seed, a.repeats as usize).map_err(Failure::usage)?;
    let probes: Vec<String> = s.probes.iter().map(|(d, v)| format!("{d}:{v:?}")).collect();
    say(out, format!("d_max={} delta={} upper={} probes=[{}]", s.d_max, g.min_degree(), s.upper, probes.join(",")))
}

fn cmd_bootstrap(a: BootstrapArgs, out: &mut dyn Write) -> Outcome {
    let seed = print_seed(out, a.seed)?;
    let g = load(&a.graph)?;
    let source = match a.matching {
        MatchingArg::Closure => MatchingSource::Closure,
        MatchingArg::Graph => MatchingSource::Graph,
    };
    let log = bootstrap_clique_with(&g, a.dim as usize, seed, source).map_err(Failure::data)?;
    let text = serde_json::to_string_pretty(&log).map_err(Failure::data)? + "\n";
    write_text(&a.out, &text).map_err(Failure::data)?;
    say(out, format!("certified={} clique={} events={}", log.certified, log.final_clique.len(), log.events.len()))
}

fn cmd_mindegree(a: MindegreeArgs, out: &mut dyn Write) -> Outcome {
    let seed = print_seed(out, a.seed)?;
    let s = min_degree_concentration(a.n, a.c, a.trials as usize, seed).map_err(Failure::usage)?;
    say(
        out,
        format!(
            "mean={} std={} a_c={} deviation={}",
            fmt_sig(s.mean, 8),
            fmt_sig(s.std, 8),
            fmt_sig(s.a_c, 12),
            fmt_sig(s.deviation, 8)
        ),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(c_grid(2.0, 10.0, 1), vec![2.0]);
        assert_eq!(c_grid(2.0, 10.0, 9), (2..=10).map(f64::from).collect::<Vec<_>>());
    }

    #[test]
    fn vertex_lists() {
        assert_eq!(parse_vertex_list("0, 2", 3).unwrap().to_vec(), vec![0, 2]);
        assert!(parse_vertex_list("0,0", 3).is_err());
        assert!(parse_vertex_list("3", 3).is_err());
        assert!(parse_vertex_list("x", 3).is_err());
    }

    #[test]
    fn summary_paths() {
        assert_eq!(summary_path(Path::new("runs/a.jsonl")), PathBuf::from("runs/a.summary.json"));
        assert_eq!(summary_path(Path::new("a")), PathBuf::from("a.summary.json"));
    }
}
