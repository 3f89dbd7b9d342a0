//! Seeded Monte Carlo harness over `G(n, p)`.
//!
//! Trial `i` draws everything from `derive_seed(master_seed, i)`, so records
//! do not depend on scheduling. Trials run on a rayon pool capped by the
//! `RIGOR_THREADS` environment variable and are collected in index order.

use std::io::Write;
use std::path::Path;
use std::time::Instant;

use anyhow::Context;
use rayon::prelude::*;
use rigor_core::constructions::{bootstrap_clique, BootstrapEvent, StuckReason};
use rigor_core::graph::gnp_sample;
use rigor_core::rigidity::{
    contracted_closure, edge_count_dmax, generic_rank_formula, is_d_rigid_seeded, max_rigid_dim_search, Embedding,
};
use rigor_core::rng::{derive_seed, labels};
use rigor_core::thresholds::{a_of_c, predicted_dmax, RegimePrediction};
use rigor_core::{Error, Graph, RngStream, Verdict, VertexSet};
use serde::{Deserialize, Serialize};

pub const THREADS_ENV: &str = "RIGOR_THREADS";

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub enum Check {
    /// Whether the graph is `delta(G)`-rigid.
    DeltaRigidity,
    /// Agreement of rank verdicts with `|E| >= dn - binom(d + 1, 2)`.
    EdgeCriterion,
    /// Contracted closure size for one random half-size set.
    ClosureDensity,
    /// `delta / log n`; with no other check the trial skips linear algebra.
    MinDegreeConcentration,
    /// Clique bootstrap certificates.
    BootstrapSuccess,
}

impl Check {
    pub const ALL: [Check; 5] = [
        Check::DeltaRigidity,
        Check::EdgeCriterion,
        Check::ClosureDensity,
        Check::MinDegreeConcentration,
        Check::BootstrapSuccess,
    ];
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum DGrid {
    /// Probe the upper bound, then binary search.
    BinarySearch,
    /// Probe exactly these dimensions.
    ExplicitList(Vec<usize>),
}

impl DGrid {
    /// Every dimension `1..n`.
    pub fn full(n: usize) -> DGrid {
        DGrid::ExplicitList((1..n).collect())
    }
}

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub n: usize,
    pub p: f64,
    pub trials: usize,
    pub master_seed: u64,
    pub d_grid: DGrid,
    pub checks: Vec<Check>,
    /// Embeddings per rank query.
    pub repeats: usize,
    /// Dimension of the extra bootstrap run; `None` means `floor(0.3 n p)`.
    pub bootstrap_dim: Option<usize>,
    /// Record wall-clock times per phase (this makes records nondeterministic).
    pub timings: bool,
}

impl ExperimentConfig {
    pub fn new(n: usize, p: f64, trials: usize, master_seed: u64) -> Self {
        ExperimentConfig {
            n,
            p,
            trials,
            master_seed,
            d_grid: DGrid::BinarySearch,
            checks: Check::ALL.to_vec(),
            repeats: 1,
            bootstrap_dim: None,
            timings: false,
        }
    }

    /// `p = c log n / (n - 1)`.
    pub fn from_c(n: usize, c: f64, trials: usize, master_seed: u64) -> Self {
        Self::new(n, c_to_p(n, c), trials, master_seed)
    }

    pub fn c(&self) -> f64 {
        p_to_c(self.n, self.p)
    }

    pub fn has(&self, check: Check) -> bool {
        self.checks.contains(&check)
    }

    fn needs_dimension(&self) -> bool {
        self.checks.iter().any(|&c| c != Check::MinDegreeConcentration)
    }

    pub fn validate(&self) -> Result<(), Error> {
        if self.trials == 0 {
            return Err(Error::Domain("trials must be at least 1".into()));
        }
        if self.n < 2 {
            return Err(Error::Domain(format!("n must be at least 2, got {}", self.n)));
        }
        if !(0.0..=1.0).contains(&self.p) {
            return Err(Error::Probability(self.p));
        }
        if let DGrid::ExplicitList(ds) = &self.d_grid {
            if let Some(&d) = ds.iter().find(|&&d| d == 0 || d >= self.n) {
                return Err(Error::Domain(format!("grid dimension {d} outside 1..{}", self.n)));
            }
        }
        if matches!(self.bootstrap_dim, Some(d) if d == 0 || d >= self.n) {
            return Err(Error::Domain("bootstrap dimension outside 1..n".into()));
        }
        Ok(())
    }

    /// The dimension of the extra bootstrap run, clamped to `[1, n - 1]`.
    pub fn resolved_bootstrap_dim(&self) -> usize {
        self.bootstrap_dim
            .unwrap_or_else(|| (0.3 * self.n as f64 * self.p).floor() as usize)
            .clamp(1, self.n - 1)
    }
}

pub fn c_to_p(n: usize, c: f64) -> f64 {
    c * (n as f64).ln() / (n - 1) as f64
}

pub fn p_to_c(n: usize, p: f64) -> f64 {
    (n - 1) as f64 * p / (n as f64).ln()
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct DimProbe {
    pub d: usize,
    pub verdict: Verdict,
    /// `|E| >= dn - binom(d + 1, 2)`.
    pub edge_criterion: bool,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct BootstrapOutcome {
    pub d: usize,
    pub certified: bool,
    /// Rank verdict from the trial's own embeddings.
    pub rank_verdict: Verdict,
    pub events: usize,
    pub merges: usize,
    pub stuck: Option<StuckReason>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct ClosureDensity {
    pub d: usize,
    pub subset_size: usize,
    pub members: usize,
    /// `binom(n, 2) - binom(|A|, 2)`.
    pub domain: usize,
}

#[derive(Clone, Copy, PartialEq, Debug, Default, Serialize, Deserialize)]
pub struct PhaseTimes {
    pub sample: f64,
    pub dimension: f64,
    pub bootstrap: f64,
    pub closure: f64,
}

/// One trial. Key order in JSON follows field order.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial_index: usize,
    pub derived_seed: u64,
    pub n: usize,
    pub p: f64,
    pub c: f64,
    pub delta: usize,
    pub edges: usize,
    pub d_max: Option<usize>,
    /// `None` when `p` is 0 or 1.
    pub d_pred: Option<RegimePrediction>,
    pub edge_criterion_dmax: usize,
    pub delta_rigid: Option<bool>,
    pub bootstrap_certified_d: Option<usize>,
    pub closure_density: Option<ClosureDensity>,
    pub elapsed_ms: Option<PhaseTimes>,
    /// Every rank probe, in the order made.
    pub probes: Vec<DimProbe>,
    /// Probed dimensions where the rank verdict and the edge criterion differ.
    pub edge_disagreements: Vec<usize>,
    pub bootstrap: Option<BootstrapOutcome>,
}

impl TrialRecord {
    /// The three record-level inequalities.
    pub fn check_invariants(&self) -> Result<(), Error> {
        let Some(d_max) = self.d_max else { return Ok(()) };
        let fail = |what: String| Err(Error::InvariantViolation(format!("trial {}: {what}", self.trial_index)));
        if d_max > self.delta {
            return fail(format!("d_max {d_max} > delta {}", self.delta));
        }
        if d_max > self.edge_criterion_dmax {
            return fail(format!("d_max {d_max} > edge criterion {}", self.edge_criterion_dmax));
        }
        if let Some(b) = self.bootstrap_certified_d {
            if b > d_max {
                return fail(format!("bootstrap certified {b} > d_max {d_max}"));
            }
        }
        if let Some(b) = &self.bootstrap {
            if b.certified && !b.rank_verdict.is_rigid() {
                return fail(format!("bootstrap certified d={} against a Flexible rank verdict", b.d));
            }
        }
        for probe in &self.probes {
            if probe.verdict.is_rigid() != (probe.d <= d_max) {
                return fail(format!("probe d={} is {:?} but d_max = {d_max}", probe.d, probe.verdict));
            }
        }
        Ok(())
    }
}

pub fn trial_seed(master_seed: u64, trial_index: usize) -> u64 {
    derive_seed(master_seed, trial_index as u64)
}

fn ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

fn sample(cfg: &ExperimentConfig, seed: u64) -> Result<Graph, Error> {
    gnp_sample(cfg.n, cfg.p, &mut RngStream::new(seed).substream(labels::GRAPH))
}

pub fn run_trial(cfg: &ExperimentConfig, trial_index: usize) -> Result<TrialRecord, Error> {
    cfg.validate()?;
    let seed = trial_seed(cfg.master_seed, trial_index);
    let rank_seed = derive_seed(seed, labels::EMBEDDING);
    let n = cfg.n;
    let mut times = PhaseTimes::default();

    let t = Instant::now();
    let g = sample(cfg, seed)?;
    times.sample = ms(t);
    let delta = g.min_degree();
    let edges = g.edge_count();
    let edge_dmax = edge_count_dmax(n, edges);
    let criterion = |d: usize| edges >= generic_rank_formula(n, d);

    let t = Instant::now();
    let mut probes = Vec::new();
    let mut d_max = None;
    if cfg.needs_dimension() {
        let dm = match &cfg.d_grid {
            DGrid::BinarySearch => {
                let search = max_rigid_dim_search(&g, rank_seed, cfg.repeats)?;
                probes.extend(search.probes.iter().map(|&(d, verdict)| DimProbe { d, verdict, edge_criterion: criterion(d) }));
                search.d_max
            }
            DGrid::ExplicitList(ds) => {
                for &d in ds {
                    let verdict = is_d_rigid_seeded(&g, d, rank_seed, cfg.repeats)?;
                    probes.push(DimProbe { d, verdict, edge_criterion: criterion(d) });
                }
                probes.iter().filter(|p| p.verdict.is_rigid()).map(|p| p.d).max().unwrap_or(0)
            }
        };
        d_max = Some(dm);
    }
    let verdict_at = |d: usize, probes: &[DimProbe]| -> Result<Verdict, Error> {
        match probes.iter().find(|p| p.d == d) {
            Some(p) => Ok(p.verdict),
            None => is_d_rigid_seeded(&g, d, rank_seed, cfg.repeats),
        }
    };
    let delta_rigid = if cfg.has(Check::DeltaRigidity) {
        // every graph counts as 0-rigid
        Some(delta == 0 || verdict_at(delta, &probes)?.is_rigid())
    } else {
        None
    };
    times.dimension = ms(t);
    let edge_disagreements = if cfg.has(Check::EdgeCriterion) {
        probes.iter().filter(|p| p.verdict.is_rigid() != p.edge_criterion).map(|p| p.d).collect()
    } else {
        Vec::new()
    };

    let t = Instant::now();
    let mut bootstrap_certified_d = None;
    let mut bootstrap = None;
    if cfg.has(Check::BootstrapSuccess) {
        let dm = d_max.unwrap_or(0);
        bootstrap_certified_d = Some(largest_bootstrap_certificate(&g, dm, seed)?);
        let d = cfg.resolved_bootstrap_dim();
        let log = bootstrap_clique(&g, d, seed)?;
        let stuck = log.events.iter().find_map(|e| match e {
            BootstrapEvent::Stuck { reason } => Some(reason.clone()),
            _ => None,
        });
        bootstrap = Some(BootstrapOutcome {
            d,
            certified: log.certified,
            rank_verdict: verdict_at(d, &probes)?,
            events: log.events.len(),
            merges: log.events.iter().filter(|e| matches!(e, BootstrapEvent::MergeByMatching { .. })).count(),
            stuck,
        });
    }
    times.bootstrap = ms(t);

    let t = Instant::now();
    let closure_density = if cfg.has(Check::ClosureDensity) {
        let d = cfg.resolved_bootstrap_dim();
        let mut rng = RngStream::new(seed).substream(labels::SUBSET);
        let a = random_subset(n, n / 2, &mut rng);
        let emb = Embedding::random(n, d, derive_seed(seed, labels::CLOSURE))?;
        let members = closure_density_probe(&g, d, &a, &emb)?;
        let k = a.len();
        Some(ClosureDensity { d, subset_size: k, members, domain: n * (n - 1) / 2 - k * k.saturating_sub(1) / 2 })
    } else {
        None
    };
    times.closure = ms(t);

    let record = TrialRecord {
        trial_index,
        derived_seed: seed,
        n,
        p: cfg.p,
        c: cfg.c(),
        delta,
        edges,
        d_max,
        d_pred: if cfg.p > 0.0 && cfg.p < 1.0 { Some(predicted_dmax(n, cfg.p)?) } else { None },
        edge_criterion_dmax: edge_dmax,
        delta_rigid,
        bootstrap_certified_d,
        closure_density,
        elapsed_ms: cfg.timings.then_some(times),
        probes,
        edge_disagreements,
        bootstrap,
    };
    record.check_invariants()?;
    Ok(record)
}

/// Largest `d` certified by the bootstrap, searched downward from
/// `d_max + 1` (so a certificate above `d_max` would be caught). Dimensions
/// with fewer edges than the generic rank cannot have a complete closure and
/// are skipped.
fn largest_bootstrap_certificate(g: &Graph, d_max: usize, seed: u64) -> Result<usize, Error> {
    let n = g.n();
    let top = (d_max + 1).min(n.saturating_sub(1));
    for d in (1..=top).rev() {
        if g.edge_count() < generic_rank_formula(n, d) {
            continue;
        }
        if bootstrap_clique(g, d, seed)?.certified {
            return Ok(d);
        }
    }
    Ok(0)
}

/// Uniform `k`-subset of `0..n` by a partial Fisher-Yates shuffle.
pub fn random_subset(n: usize, k: usize, rng: &mut RngStream) -> VertexSet {
    let mut perm: Vec<usize> = (0..n).collect();
    for i in 0..k.min(n) {
        let j = i + rng.next_below((n - i) as u64) as usize;
        perm.swap(i, j);
    }
    VertexSet::from_vertices(n, perm[..k.min(n)].iter().copied()).expect("indices below n")
}

/// Number of members of the contracted closure `C_{d,A}(g)`.
pub fn closure_density_probe(g: &Graph, d: usize, a: &VertexSet, emb: &Embedding) -> Result<usize, Error> {
    if 10 * a.len() > 9 * g.n() {
        return Err(Error::Domain(format!("|A| = {} exceeds 0.9 n", a.len())));
    }
    Ok(contracted_closure(g, d, a, emb)?.member_count())
}

fn mean_std(xs: &[f64]) -> (Option<f64>, Option<f64>) {
    if xs.is_empty() {
        return (None, None);
    }
    let m = xs.iter().sum::<f64>() / xs.len() as f64;
    let sd = if xs.len() > 1 {
        (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
    } else {
        0.0
    };
    (Some(m), Some(sd))
}

fn fraction(hits: usize, total: usize) -> Option<f64> {
    (total > 0).then(|| hits as f64 / total as f64)
}

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct ExperimentSummary {
    pub n: usize,
    pub p: f64,
    pub c: f64,
    pub trials: usize,
    pub master_seed: u64,
    pub d_pred: Option<RegimePrediction>,
    pub mean_delta: f64,
    pub mean_d_max: Option<f64>,
    pub delta_rigid_fraction: Option<f64>,
    /// Mean and sample standard deviation of `d_max / predicted_d`.
    pub d_max_ratio_mean: Option<f64>,
    pub d_max_ratio_std: Option<f64>,
    /// Fraction of trials with `d_max == edge_criterion_dmax`.
    pub edge_dmax_agreement: Option<f64>,
    /// Fraction of probed `(trial, d)` pairs where the rank verdict matches
    /// the edge criterion.
    pub edge_pair_agreement: Option<f64>,
    pub edge_pairs: usize,
    /// `(trial_index, d)` for every disagreeing pair.
    pub edge_disagreements: Vec<(usize, usize)>,
    pub bootstrap_dim: Option<usize>,
    pub bootstrap_success_rate: Option<f64>,
}

pub fn summarize(cfg: &ExperimentConfig, records: &[TrialRecord]) -> ExperimentSummary {
    let d_pred = if cfg.p > 0.0 && cfg.p < 1.0 { predicted_dmax(cfg.n, cfg.p).ok() } else { None };
    let dmax: Vec<usize> = records.iter().filter_map(|r| r.d_max).collect();
    let dmax_f: Vec<f64> = dmax.iter().map(|&d| d as f64).collect();
    let deltas: Vec<f64> = records.iter().map(|r| r.delta as f64).collect();
    let rigid: Vec<bool> = records.iter().filter_map(|r| r.delta_rigid).collect();
    let ratios: Vec<f64> = match d_pred {
        Some(pred) if pred.predicted_d > 0.0 => dmax_f.iter().map(|d| d / pred.predicted_d).collect(),
        _ => Vec::new(),
    };
    let (ratio_mean, ratio_std) = mean_std(&ratios);
    let edge_on = cfg.has(Check::EdgeCriterion);
    let pairs: usize = if edge_on { records.iter().map(|r| r.probes.len()).sum() } else { 0 };
    let disagreements: Vec<(usize, usize)> =
        records.iter().flat_map(|r| r.edge_disagreements.iter().map(move |&d| (r.trial_index, d))).collect();
    let boots: Vec<bool> = records.iter().filter_map(|r| r.bootstrap.as_ref().map(|b| b.certified)).collect();
    ExperimentSummary {
        n: cfg.n,
        p: cfg.p,
        c: cfg.c(),
        trials: records.len(),
        master_seed: cfg.master_seed,
        d_pred,
        mean_delta: mean_std(&deltas).0.unwrap_or(0.0),
        mean_d_max: mean_std(&dmax_f).0,
        delta_rigid_fraction: fraction(rigid.iter().filter(|&&x| x).count(), rigid.len()),
        d_max_ratio_mean: ratio_mean,
        d_max_ratio_std: ratio_std,
        edge_dmax_agreement: if edge_on {
            fraction(records.iter().filter(|r| r.d_max == Some(r.edge_criterion_dmax)).count(), dmax.len())
        } else {
            None
        },
        edge_pair_agreement: fraction(pairs.saturating_sub(disagreements.len()), pairs),
        edge_pairs: pairs,
        edge_disagreements: disagreements,
        bootstrap_dim: cfg.has(Check::BootstrapSuccess).then(|| cfg.resolved_bootstrap_dim()),
        bootstrap_success_rate: fraction(boots.iter().filter(|&&x| x).count(), boots.len()),
    }
}

/// Worker count from `RIGOR_THREADS`, or rayon's default when unset or invalid.
pub fn thread_cap() -> Option<usize> {
    std::env::var(THREADS_ENV).ok()?.trim().parse().ok().filter(|&t| t > 0)
}

fn pool() -> anyhow::Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(t) = thread_cap() {
        b = b.num_threads(t);
    }
    b.build().context("building the trial thread pool")
}

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct ExperimentOutput {
    pub summary: ExperimentSummary,
    pub records: Vec<TrialRecord>,
}

pub fn run_experiment(cfg: &ExperimentConfig) -> anyhow::Result<ExperimentOutput> {
    cfg.validate()?;
    let records = pool()?.install(|| {
        (0..cfg.trials).into_par_iter().map(|i| run_trial(cfg, i)).collect::<Result<Vec<_>, Error>>()
    })?;
    Ok(ExperimentOutput { summary: summarize(cfg, &records), records })
}

pub fn records_jsonl(records: &[TrialRecord]) -> anyhow::Result<String> {
    let mut s = String::new();
    for r in records {
        s.push_str(&serde_json::to_string(r)?);
        s.push('\n');
    }
    Ok(s)
}

/// CSV with one column per record field; nested values are JSON-encoded.
pub fn records_csv(records: &[TrialRecord]) -> anyhow::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header_done = false;
    for r in records {
        let serde_json::Value::Object(map) = serde_json::to_value(r)? else {
            anyhow::bail!("record did not serialize to an object");
        };
        if !header_done {
            w.write_record(map.keys())?;
            header_done = true;
        }
        w.write_record(map.values().map(|v| match v {
            serde_json::Value::Null => String::new(),
            serde_json::Value::String(s) => s.clone(),
            other => other.to_string(),
        }))?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

pub fn write_records(path: &Path, records: &[TrialRecord]) -> anyhow::Result<()> {
    let mut f = std::fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
    f.write_all(records_jsonl(records)?.as_bytes()).with_context(|| format!("writing {}", path.display()))
}

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct MinDegreeSummary {
    pub n: usize,
    pub c: f64,
    pub p: f64,
    pub trials: usize,
    pub master_seed: u64,
    /// `a(c)`, with `a(1) = 0`.
    pub a_c: f64,
    /// `delta / log n` per trial.
    pub normalized: Vec<f64>,
    pub mean: f64,
    pub std: f64,
    /// `|mean - a(c)|`.
    pub deviation: f64,
}

/// Samples `trials` graphs and compares `delta / log n` with `a(c)`.
/// Probabilities above 1 are clamped, which gives complete graphs.
pub fn min_degree_concentration(n: usize, c: f64, trials: usize, master_seed: u64) -> anyhow::Result<MinDegreeSummary> {
    if !(c >= 1.0) || !c.is_finite() || trials == 0 || n < 2 {
        return Err(Error::Domain(format!("need c >= 1, trials >= 1, n >= 2; got c={c}, trials={trials}, n={n}")).into());
    }
    let p = c_to_p(n, c).min(1.0);
    let cfg = ExperimentConfig { checks: vec![Check::MinDegreeConcentration], ..ExperimentConfig::new(n, p, trials, master_seed) };
    let log_n = (n as f64).ln();
    let normalized = pool()?.install(|| {
        (0..trials)
            .into_par_iter()
            .map(|i| Ok(sample(&cfg, trial_seed(master_seed, i))?.min_degree() as f64 / log_n))
            .collect::<Result<Vec<f64>, Error>>()
    })?;
    let a_c = if c == 1.0 { 0.0 } else { a_of_c(c)? };
    let (mean, std) = mean_std(&normalized);
    let mean = mean.unwrap_or(0.0);
    Ok(MinDegreeSummary {
        n,
        c,
        p,
        trials,
        master_seed,
        a_c,
        normalized,
        mean,
        std: std.unwrap_or(0.0),
        deviation: (mean - a_c).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick(n: usize, p: f64, trials: usize) -> ExperimentConfig {
        ExperimentConfig::new(n, p, trials, 11)
    }

    #[test]
    fn extreme_densities() {
        let r = run_trial(&quick(20, 1.0, 1), 0).unwrap();
        assert_eq!((r.delta, r.d_max, r.delta_rigid), (19, Some(19), Some(true)));
        assert_eq!(r.edges, 190);
        assert_eq!(r.d_pred, None);
        let r = run_trial(&quick(20, 0.0, 1), 0).unwrap();
        assert_eq!((r.delta, r.d_max, r.edges), (0, Some(0), 0));
        assert_eq!(r.bootstrap_certified_d, Some(0));
    }

    #[test]
    fn moderate_trial_satisfies_invariants() {
        let cfg = ExperimentConfig::from_c(100, 3.0, 3, 5);
        for i in 0..3 {
            let r = run_trial(&cfg, i).unwrap();
            r.check_invariants().unwrap();
            let dm = r.d_max.unwrap();
            assert!(dm <= r.delta && dm <= r.edge_criterion_dmax);
            assert!(r.bootstrap_certified_d.unwrap() <= dm);
            assert_eq!(r.elapsed_ms, None);
        }
    }

    #[test]
    fn trials_are_deterministic_and_independent() {
        let cfg = ExperimentConfig::from_c(40, 4.0, 3, 9);
        assert_eq!(run_trial(&cfg, 2).unwrap(), run_trial(&cfg, 2).unwrap());
        assert_ne!(run_trial(&cfg, 0).unwrap().derived_seed, run_trial(&cfg, 1).unwrap().derived_seed);
        let out = run_experiment(&cfg).unwrap();
        assert_eq!(out.records[2], run_trial(&cfg, 2).unwrap());
        let one = ExperimentConfig { trials: 1, ..cfg.clone() };
        assert_eq!(run_experiment(&one).unwrap().records, vec![run_trial(&cfg, 0).unwrap()]);
    }

    #[test]
    fn explicit_grid_matches_binary_search() {
        let mut cfg = ExperimentConfig::from_c(30, 5.0, 4, 2);
        let searched = run_experiment(&cfg).unwrap();
        cfg.d_grid = DGrid::full(30);
        let full = run_experiment(&cfg).unwrap();
        for (a, b) in searched.records.iter().zip(&full.records) {
            assert_eq!(a.d_max, b.d_max);
            assert_eq!(b.probes.len(), 29);
        }
        assert_eq!(full.summary.edge_pairs, 4 * 29);
    }

    #[test]
    fn config_validation() {
        assert!(quick(1, 0.5, 1).validate().is_err());
        assert!(quick(10, 0.5, 0).validate().is_err());
        assert!(quick(10, 1.5, 1).validate().is_err());
        let cfg = ExperimentConfig { d_grid: DGrid::ExplicitList(vec![0]), ..quick(10, 0.5, 1) };
        assert!(cfg.validate().is_err());
        assert_eq!(quick(100, 0.5, 1).resolved_bootstrap_dim(), 15);
        assert_eq!(quick(10, 0.01, 1).resolved_bootstrap_dim(), 1);
    }

    #[test]
    fn closure_probe_examples() {
        let n = 12;
        let emb = Embedding::random(n, 3, 1).unwrap();
        let none = VertexSet::empty(n);
        assert_eq!(closure_density_probe(&Graph::complete(n), 3, &none, &emb).unwrap(), 66);
        let a = VertexSet::from_vertices(n, 0..6).unwrap();
        assert_eq!(closure_density_probe(&Graph::empty(n), 3, &a, &emb).unwrap(), 0);
        let big = VertexSet::from_vertices(n, 0..11).unwrap();
        assert!(closure_density_probe(&Graph::empty(n), 3, &big, &emb).is_err());
    }

    #[test]
    fn random_subsets() {
        let mut rng = RngStream::new(3);
        for k in [0, 1, 7, 20] {
            assert_eq!(random_subset(20, k, &mut rng).len(), k);
        }
    }

    #[test]
    fn min_degree_forced_complete() {
        let s = min_degree_concentration(30, 100.0, 3, 1).unwrap();
        assert_eq!(s.p, 1.0);
        let log_n = 30f64.ln();
        assert!(s.normalized.iter().all(|&x| (x - 29.0 / log_n).abs() < 1e-12));
        assert!(min_degree_concentration(30, 0.5, 3, 1).is_err());
    }

    #[test]
    fn timings_are_opt_in() {
        let cfg = ExperimentConfig { timings: true, ..ExperimentConfig::from_c(20, 3.0, 1, 1) };
        assert!(run_trial(&cfg, 0).unwrap().elapsed_ms.is_some());
    }

    #[test]
    fn exports_keep_field_order() {
        let out = run_experiment(&ExperimentConfig::from_c(20, 3.0, 2, 4)).unwrap();
        let jsonl = records_jsonl(&out.records).unwrap();
        assert_eq!(jsonl.lines().count(), 2);
        assert!(jsonl.starts_with("{\"trial_index\":0,\"derived_seed\":"));
        let csv = records_csv(&out.records).unwrap();
        let header = csv.lines().next().unwrap();
        assert!(header.starts_with("trial_index,derived_seed,n,p,c,delta,edges,d_max,d_pred,edge_criterion_dmax"));
        assert_eq!(csv.lines().count(), 3);
    }
}
