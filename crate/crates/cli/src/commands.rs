//! Subcommand arguments and their implementations.

use std::path::PathBuf;

use clap::{Args, ValueEnum};
use rayon::prelude::*;
use rpzf::analysis::{critical_reversion_probability_with, CriticalOptions};
use rpzf::closedform::kn_one_step_distribution;
use rpzf::export::{report_table_with_p, sim_table, sweep_table, trajectory_table, Cell, Table};
use rpzf::meanfield::{indicator, mf_trajectory_with, MeanFieldOptions};
use rpzf::sim::{estimate_grid, SimConfig, DEFAULT_MAX_ROUNDS};
use rpzf::{
    analyze, threshold_sweep, BRule, ColoringState, Error, Family, Graph, Metric, Model, Result,
    StateSpace, Variant,
};
use serde::Serialize;

use crate::grid::{parse_n_grid, parse_p_grid, parse_vertices};
use crate::output::{emit, Format, RunManifest};

fn family_arg(s: &str) -> std::result::Result<String, String> {
    s.parse::<Family>().map(|f| f.to_string()).map_err(|e| e.to_string())
}

/// Where the graph comes from: exactly one of `--family` or `--edge-list`.
#[derive(Debug, Clone, Args, Serialize)]
#[group(required = true, multiple = false)]
pub struct GraphArgs {
    /// Standard family as name:params: complete:N, path:N, cycle:N, star:N
    /// (vertex 0 is the center) or complete_bipartite:M,N.
    #[arg(long, value_parser = family_arg)]
    pub family: Option<String>,
    /// Edge-list file: first line the vertex count n, then one `u v` pair per
    /// line (0-based); lines starting with '#' are comments.
    #[arg(long)]
    pub edge_list: Option<PathBuf>,
}

impl GraphArgs {
    fn family(&self) -> Option<Family> {
        self.family.as_deref().map(|s| s.parse().expect("validated by clap"))
    }

    fn load(&self) -> Result<Graph> {
        match (self.family(), &self.edge_list) {
            (Some(f), _) => Graph::family(f),
            (None, Some(path)) => Graph::from_edge_list(&std::fs::read_to_string(path)?),
            (None, None) => unreachable!("clap requires a graph source"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum VariantArg {
    /// Single absorption: only the all-white coloring absorbs.
    Sarpzf,
    /// Dual absorption: all-white and all-blue both absorb.
    Darpzf,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Sarpzf => Variant::Sarpzf,
            VariantArg::Darpzf => Variant::Darpzf,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct PGrid(pub Vec<f64>);

fn p_grid_arg(s: &str) -> std::result::Result<PGrid, String> {
    parse_p_grid(s).map(PGrid)
}

/// A single reversion probability or an inclusive grid.
#[derive(Debug, Clone, Args, Serialize)]
#[group(required = true, multiple = false)]
pub struct PArgs {
    /// Reversion probability.
    #[arg(long)]
    pub p: Option<f64>,
    /// Inclusive grid start:stop:step, e.g. 0.05:0.95:0.05.
    #[arg(long, value_parser = p_grid_arg)]
    pub p_grid: Option<PGrid>,
}

impl PArgs {
    fn values(&self) -> Vec<f64> {
        match (&self.p, &self.p_grid) {
            (Some(p), _) => vec![*p],
            (None, Some(g)) => g.0.clone(),
            (None, None) => unreachable!("clap requires --p or --p-grid"),
        }
    }

    fn is_grid(&self) -> bool {
        self.p_grid.is_some()
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct OutArgs {
    /// Output file; stdout when omitted. A manifest is written next to it
    /// as <out>.manifest.json.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

impl OutArgs {
    fn emit(&self, table: &Table, manifest: RunManifest) -> Result<()> {
        emit(table, self.format, self.out.as_deref(), manifest)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Collapsed when the family has a symmetry-collapsed space, else full.
    Auto,
    /// Every coloring (at most 2^20 states).
    Full,
    /// Symmetry-collapsed (complete, star, complete bipartite families).
    Collapsed,
}

fn state_space(src: &GraphArgs, g: &Graph, mode: Mode) -> Result<StateSpace> {
    let collapsed = src.family().and_then(StateSpace::collapsed_for);
    match (mode, collapsed) {
        (Mode::Full, _) | (Mode::Auto, None) => StateSpace::enumerate_full(g),
        (Mode::Auto | Mode::Collapsed, Some(ss)) => ss,
        (Mode::Collapsed, None) => Err(Error::Domain(
            "collapsed mode needs a complete, star (n >= 3) or complete_bipartite family".into(),
        )),
    }
}

/// Comma-separated vertex list.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Vertices(pub Vec<usize>);

fn vertices_arg(s: &str) -> std::result::Result<Vertices, String> {
    parse_vertices(s).map(Vertices)
}

fn start_state(ss: &StateSpace, n: usize, start: &[usize]) -> Result<usize> {
    ss.classify(&ColoringState::from_vertices(n, start.iter().copied())?)
}

// ---------------------------------------------------------------- analyze

/// Exact absorption analysis: expected absorption time per state and, under
/// DARPZF, die-out / fully-force probabilities.
#[derive(Debug, Clone, Args, Serialize)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[arg(long, value_enum, default_value_t = VariantArg::Darpzf)]
    pub variant: VariantArg,
    #[command(flatten)]
    pub p: PArgs,
    #[arg(long, value_enum, default_value_t = Mode::Auto)]
    pub mode: Mode,
    #[command(flatten)]
    pub output: OutArgs,
}

pub fn analyze_cmd(args: &AnalyzeArgs) -> Result<()> {
    let g = args.graph.load()?;
    let ss = state_space(&args.graph, &g, args.mode)?;
    let variant = Variant::from(args.variant);
    let reports = args
        .p
        .values()
        .into_par_iter()
        .map(|p| analyze::<f64>(&g, &ss, p, variant))
        .collect::<Result<Vec<_>>>()?;
    let grid = args.p.is_grid();
    let mut table = report_table_with_p(&reports[0], grid);
    for r in &reports[1..] {
        table.extend(report_table_with_p(r, grid))?;
    }
    args.output.emit(&table, RunManifest::new("analyze", args, None)?)
}

// ------------------------------------------------------------- critical-p

/// Critical reversion probability: the p at which die-out and full forcing
/// are equally likely from the start state (DARPZF).
#[derive(Debug, Clone, Args, Serialize)]
pub struct CriticalArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    /// Initially blue vertices.
    #[arg(long, value_parser = vertices_arg, default_value = "0", conflicts_with = "state")]
    pub start: Vertices,
    /// State index in the chosen state space, instead of --start.
    #[arg(long)]
    pub state: Option<usize>,
    /// Tolerance on |die-out - 1/2| at the returned p.
    #[arg(long, default_value_t = rpzf::analysis::DEFAULT_CRITICAL_TOL)]
    pub tol: f64,
    /// Also scan p on this grid step and report the number of sign changes.
    #[arg(long)]
    pub scan_step: Option<f64>,
    #[arg(long, value_enum, default_value_t = Mode::Auto)]
    pub mode: Mode,
    #[command(flatten)]
    pub output: OutArgs,
}

pub fn critical_cmd(args: &CriticalArgs) -> Result<()> {
    let g = args.graph.load()?;
    let ss = state_space(&args.graph, &g, args.mode)?;
    let state = match args.state {
        Some(s) => s,
        None => start_state(&ss, g.vertex_count(), &args.start.0)?,
    };
    let opts = CriticalOptions {
        tol: args.tol,
        scan_step: args.scan_step,
        ..CriticalOptions::default()
    };
    let r = critical_reversion_probability_with::<f64>(&g, &ss, state, opts)?;
    let mut table = Table::new(&["state_index", "p_critical", "die_out", "probes", "scan_sign_changes"]);
    table.push(vec![
        state.into(),
        r.p.into(),
        r.die_out.into(),
        r.probes.into(),
        r.scan_sign_changes.map_or(Cell::from(""), Cell::from),
    ]);
    if args.output.out.is_some() {
        println!("{}", rpzf::export::fmt_float(r.p));
    }
    args.output.emit(&table, RunManifest::new("critical-p", args, None)?)
}

// --------------------------------------------------------------- simulate

/// Seeded Monte Carlo estimates of die-out probability and absorption time.
#[derive(Debug, Clone, Args, Serialize)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    /// Initially blue vertices.
    #[arg(long, value_parser = vertices_arg, default_value = "0")]
    pub start: Vertices,
    #[arg(long, value_enum, default_value_t = VariantArg::Darpzf)]
    pub variant: VariantArg,
    #[command(flatten)]
    pub p: PArgs,
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
    /// Rounds after which a trial is counted as censored.
    #[arg(long, default_value_t = DEFAULT_MAX_ROUNDS)]
    pub max_rounds: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutArgs,
}

pub fn simulate_cmd(args: &SimulateArgs) -> Result<()> {
    let g = args.graph.load()?;
    let ps = args.p.values();
    let config = SimConfig::new(g, &args.start.0, ps[0], args.variant.into(), args.trials, args.seed)?
        .with_max_rounds(args.max_rounds);
    let results = estimate_grid(&config, &ps)?;
    args.output
        .emit(&sim_table(&results), RunManifest::new("simulate", args, Some(args.seed))?)
}

// -------------------------------------------------------------- threshold

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RuleArg {
    /// K_n with b_n = ceil(sqrt(n c ln n)); needs --c.
    Complete,
    /// Star with b_n = n - 1 - offset; needs --offset.
    StarOffset,
    /// Star with b_n = n - 1 - ceil(c ln n); needs --c.
    StarLog,
    /// K_{n,n} with ceil(sqrt(n c ln n)) blue per part; needs --c.
    BipartiteBalanced,
    /// K_{n,n} with one part blue and ceil(c ln n) in the other; needs --c.
    BipartitePartFull,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricArg {
    /// |n - E[X_1]| under DARPZF.
    ExpectationGap,
    /// P[every vertex blue after one round].
    OneStepForceProb,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct NGrid(pub Vec<usize>);

fn n_grid_arg(s: &str) -> std::result::Result<NGrid, String> {
    parse_n_grid(s).map(NGrid)
}

/// Closed-form threshold sweeps over growing graph sizes.
#[derive(Debug, Clone, Args, Serialize)]
pub struct ThresholdArgs {
    #[arg(long, value_enum)]
    pub rule: RuleArg,
    /// Exponent / coefficient of the rule.
    #[arg(long)]
    pub c: Option<f64>,
    /// Constant offset for the star-offset rule.
    #[arg(long)]
    pub offset: Option<usize>,
    /// Sizes: comma list (100,1e3,1e4) or start:stop:step. For bipartite
    /// rules this is the part size.
    #[arg(long, value_parser = n_grid_arg)]
    pub n_grid: NGrid,
    #[arg(long, value_enum, default_value_t = MetricArg::ExpectationGap)]
    pub metric: MetricArg,
    /// Reversion probability.
    #[arg(long, default_value_t = 0.5)]
    pub p: f64,
    #[command(flatten)]
    pub output: OutArgs,
}

pub fn threshold_cmd(args: &ThresholdArgs) -> Result<()> {
    let missing = |flag: &str| Error::Parse {
        line: 0,
        msg: format!("rule {:?} needs {flag}", args.rule),
    };
    let c = || args.c.ok_or_else(|| missing("--c"));
    let rule = match args.rule {
        RuleArg::Complete => BRule::CompleteSqrtLog { c: c()? },
        RuleArg::StarOffset => BRule::StarOffset {
            offset: args.offset.ok_or_else(|| missing("--offset"))?,
        },
        RuleArg::StarLog => BRule::StarLogOffset { c: c()? },
        RuleArg::BipartiteBalanced => BRule::BipartiteBalanced { c: c()? },
        RuleArg::BipartitePartFull => BRule::BipartitePartFull { c: c()? },
    };
    let metric = match args.metric {
        MetricArg::ExpectationGap => Metric::ExpectationGap,
        MetricArg::OneStepForceProb => Metric::OneStepForceProb,
    };
    let sweep = threshold_sweep(rule, metric, args.p, &args.n_grid.0)?;
    args.output
        .emit(&sweep_table(&sweep), RunManifest::new("threshold", args, None)?)
}

// -------------------------------------------------------------- meanfield

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelArg {
    Wang,
    Gomez,
    Ahn,
    Pare,
    Sarpzf,
}

impl From<ModelArg> for Model {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Wang => Model::Wang,
            ModelArg::Gomez => Model::Gomez,
            ModelArg::Ahn => Model::Ahn,
            ModelArg::Pare => Model::Pare,
            ModelArg::Sarpzf => Model::Sarpzf,
        }
    }
}

/// Discrete-time mean-field trajectories (infection density per step).
#[derive(Debug, Clone, Args, Serialize)]
pub struct MeanfieldArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[arg(long, value_enum)]
    pub model: ModelArg,
    /// Infection rate (ignored by the sarpzf model).
    #[arg(long, default_value_t = 0.0)]
    pub beta: f64,
    /// Recovery / reversion probability.
    #[arg(long)]
    pub p: f64,
    #[arg(long)]
    pub horizon: usize,
    /// Initially blue (infected) vertices, probability 1; the rest start at 0.
    #[arg(long, value_parser = vertices_arg, default_value = "0", conflicts_with = "init")]
    pub start: Vertices,
    /// Start every vertex at this probability instead of --start.
    #[arg(long)]
    pub init: Option<f64>,
    /// Also write every vertex's probability.
    #[arg(long)]
    pub per_vertex: bool,
    /// sarpzf: sum q_v over v's own colour too, as the formula is printed.
    #[arg(long)]
    pub literal_q: bool,
    #[command(flatten)]
    pub output: OutArgs,
}

pub fn meanfield_cmd(args: &MeanfieldArgs) -> Result<()> {
    let g = args.graph.load()?;
    let n = g.vertex_count();
    let initial = match args.init {
        Some(x) => vec![x; n],
        None => indicator(n, &args.start.0)?,
    };
    let opts = MeanFieldOptions {
        literal_sarpzf_q: args.literal_q,
        ..MeanFieldOptions::default()
    };
    let tr = mf_trajectory_with(args.model.into(), &g, initial, args.beta, args.p, args.horizon, opts)?;
    if tr.drift_events > 0 {
        eprintln!(
            "warning: {} probabilities drifted outside [0, 1] (max {:e}) and were clamped",
            tr.drift_events, tr.max_drift
        );
    }
    args.output.emit(
        &trajectory_table(&tr, args.per_vertex),
        RunManifest::new("meanfield", args, None)?,
    )
}

// -------------------------------------------------------------------- pmf

/// One-round distribution of the blue count on K_n from b blue vertices.
#[derive(Debug, Clone, Args, Serialize)]
pub struct PmfArgs {
    /// Number of vertices of the complete graph.
    #[arg(long)]
    pub n: usize,
    /// Number of initially blue vertices.
    #[arg(long)]
    pub b: usize,
    #[arg(long, value_enum, default_value_t = VariantArg::Darpzf)]
    pub variant: VariantArg,
    #[command(flatten)]
    pub p: PArgs,
    #[command(flatten)]
    pub output: OutArgs,
}

pub fn pmf_cmd(args: &PmfArgs) -> Result<()> {
    let grid = args.p.is_grid();
    let mut table = if grid {
        Table::new(&["p", "k", "probability"])
    } else {
        Table::new(&["k", "probability"])
    };
    for p in args.p.values() {
        let dist = kn_one_step_distribution::<f64>(args.n, args.b, p, args.variant.into())?;
        for (k, x) in dist.into_iter().enumerate() {
            let mut row = vec![Cell::from(k), Cell::from(x)];
            if grid {
                row.insert(0, Cell::from(p));
            }
            table.push(row);
        }
    }
    args.output.emit(&table, RunManifest::new("pmf", args, None)?)
}
