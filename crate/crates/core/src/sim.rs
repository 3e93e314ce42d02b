//! Seeded Monte Carlo simulation of SARPZF/DARPZF on arbitrary graphs.
//!
//! Trial `i` draws from `ChaCha8Rng::seed_from_u64(seed)` switched to
//! stream `i`, so results do not depend on how trials are scheduled across
//! threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::chain::{check_p, Variant};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::statespace::ColoringState;

pub const DEFAULT_MAX_ROUNDS: u64 = 1_000_000;

#[derive(Debug, Clone)]
pub struct SimConfig {
    pub graph: Graph,
    pub initial_blue: ColoringState,
    pub p: f64,
    pub variant: Variant,
    pub trials: usize,
    pub max_rounds: u64,
    pub seed: u64,
}

impl SimConfig {
    pub fn new(
        graph: Graph,
        initial_blue: &[usize],
        p: f64,
        variant: Variant,
        trials: usize,
        seed: u64,
    ) -> Result<Self> {
        let n = graph.vertex_count();
        if initial_blue.is_empty() {
            return Err(Error::domain("initial blue set must be nonempty"));
        }
        let initial_blue = ColoringState::from_vertices(n, initial_blue.iter().copied())?;
        check_p(p)?;
        if trials == 0 {
            return Err(Error::domain("trials must be at least 1"));
        }
        Ok(SimConfig {
            graph,
            initial_blue,
            p,
            variant,
            trials,
            max_rounds: DEFAULT_MAX_ROUNDS,
            seed,
        })
    }

    pub fn with_max_rounds(mut self, max_rounds: u64) -> Self {
        self.max_rounds = max_rounds;
        self
    }

    pub fn with_p(mut self, p: f64) -> Result<Self> {
        check_p(p)?;
        self.p = p;
        Ok(self)
    }
}

/// The RNG stream for one trial.
pub fn trial_rng(seed: u64, trial_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial_index);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    DiedOut,
    FullyForced,
    Censored,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TrialRecord {
    /// `None` when the trial hit the round cap.
    pub absorption_round: Option<u64>,
    pub outcome: Outcome,
}

/// Scratch buffers for stepping one trial without reallocating.
struct Stepper<'g> {
    g: &'g Graph,
    blue: Vec<bool>,
    next: Vec<bool>,
    ratio: Vec<f64>,
}

impl<'g> Stepper<'g> {
    fn new(g: &'g Graph, start: &ColoringState) -> Self {
        let n = g.vertex_count();
        Stepper {
            g,
            blue: (0..n).map(|v| start.contains(v)).collect(),
            next: vec![false; n],
            ratio: vec![0.0; n],
        }
    }

    fn count(&self) -> usize {
        self.blue.iter().filter(|&&b| b).count()
    }

    /// One round. Returns the blue count after phase 2.
    fn step<R: Rng>(&mut self, p: f64, variant: Variant, rng: &mut R) -> usize {
        let g = self.g;
        let n = g.vertex_count();
        // Forcing strength of every blue vertex against the round-start set.
        for x in 0..n {
            if self.blue[x] {
                let closed = 1 + g.neighbors(x).iter().filter(|&&y| self.blue[y]).count();
                self.ratio[x] = closed as f64 / g.degree(x) as f64;
            }
        }
        let mut all_blue = true;
        for w in 0..n {
            if self.blue[w] {
                self.next[w] = true;
                continue;
            }
            let miss: f64 = g
                .neighbors(w)
                .iter()
                .filter(|&&x| self.blue[x])
                .map(|&x| 1.0 - self.ratio[x])
                .product();
            let forced = miss < 1.0 && rng.random::<f64>() < 1.0 - miss;
            self.next[w] = forced;
            all_blue &= forced;
        }
        if variant == Variant::Darpzf && all_blue {
            std::mem::swap(&mut self.blue, &mut self.next);
            return n;
        }
        let mut count = 0;
        for v in 0..n {
            let keep = self.next[v] && rng.random::<f64>() >= p;
            self.blue[v] = keep;
            count += keep as usize;
        }
        count
    }

    fn state(&self) -> ColoringState {
        let mut c = ColoringState::empty(self.blue.len());
        for (v, &b) in self.blue.iter().enumerate() {
            if b {
                c.insert(v);
            }
        }
        c
    }
}

/// Applies one RPZF round to `blue`: phase-1 forcing (one Bernoulli draw per
/// white vertex with the combined force probability), then reversion unless
/// DARPZF has just turned every vertex blue.
pub fn run_round<R: Rng>(g: &Graph, blue: &ColoringState, p: f64, variant: Variant, rng: &mut R) -> ColoringState {
    if blue.is_empty() {
        return blue.clone();
    }
    let mut s = Stepper::new(g, blue);
    s.step(p, variant, rng);
    s.state()
}

pub fn run_trial(config: &SimConfig, trial_index: u64) -> TrialRecord {
    let n = config.graph.vertex_count();
    let absorbed = |count: usize| -> Option<Outcome> {
        if count == 0 {
            Some(Outcome::DiedOut)
        } else if count == n && config.variant == Variant::Darpzf {
            Some(Outcome::FullyForced)
        } else {
            None
        }
    };
    let mut stepper = Stepper::new(&config.graph, &config.initial_blue);
    if let Some(outcome) = absorbed(stepper.count()) {
        return TrialRecord {
            absorption_round: Some(0),
            outcome,
        };
    }
    let mut rng = trial_rng(config.seed, trial_index);
    for round in 1..=config.max_rounds {
        let count = stepper.step(config.p, config.variant, &mut rng);
        if let Some(outcome) = absorbed(count) {
            return TrialRecord {
                absorption_round: Some(round),
                outcome,
            };
        }
    }
    TrialRecord {
        absorption_round: None,
        outcome: Outcome::Censored,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SimResult {
    pub p: f64,
    pub variant: Variant,
    pub seed: u64,
    pub trials: usize,
    #[serde(skip)]
    pub records: Vec<TrialRecord>,
    pub die_out_fraction: f64,
    pub fully_forced_fraction: f64,
    pub se_die_out: f64,
    pub se_fully_forced: f64,
    /// Mean absorption round over uncensored trials (NaN if all censored).
    pub mean_abs_time: f64,
    pub se_abs_time: f64,
    /// Nonzero counts mean the estimates are biased by the round cap.
    pub censored_count: usize,
}

/// `(mean, sample std / sqrt(len))`; the standard error is NaN for fewer
/// than two samples.
fn mean_se(xs: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let (mut count, mut sum) = (0usize, 0.0);
    for x in xs.clone() {
        count += 1;
        sum += x;
    }
    if count == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = sum / count as f64;
    if count < 2 {
        return (mean, f64::NAN);
    }
    let ss: f64 = xs.map(|x| (x - mean) * (x - mean)).sum();
    let sd = (ss / (count - 1) as f64).sqrt();
    (mean, sd / (count as f64).sqrt())
}

impl SimResult {
    pub fn from_records(config: &SimConfig, records: Vec<TrialRecord>) -> Self {
        let indicator = |o: Outcome| records.iter().map(move |t| f64::from(u8::from(t.outcome == o)));
        let (die, se_die) = mean_se(indicator(Outcome::DiedOut));
        let (full, se_full) = mean_se(indicator(Outcome::FullyForced));
        let (mean_t, se_t) = mean_se(records.iter().filter_map(|t| t.absorption_round.map(|r| r as f64)));
        let censored_count = records.iter().filter(|t| t.outcome == Outcome::Censored).count();
        SimResult {
            p: config.p,
            variant: config.variant,
            seed: config.seed,
            trials: records.len(),
            die_out_fraction: die,
            fully_forced_fraction: full,
            se_die_out: se_die,
            se_fully_forced: se_full,
            mean_abs_time: mean_t,
            se_abs_time: se_t,
            censored_count,
            records,
        }
    }
}

/// Runs every trial (in parallel) and aggregates in trial order.
pub fn estimate(config: &SimConfig) -> SimResult {
    let records: Vec<TrialRecord> = (0..config.trials as u64)
        .into_par_iter()
        .map(|i| run_trial(config, i))
        .collect();
    SimResult::from_records(config, records)
}

/// Runs `estimate` at each reversion probability of a grid.
pub fn estimate_grid(config: &SimConfig, ps: &[f64]) -> Result<Vec<SimResult>> {
    ps.iter()
        .map(|&p| Ok(estimate(&config.clone().with_p(p)?)))
        .collect()
}
