//! Discrete-time SIS mean-field recursions: the Wang, Gómez, Ahn–Hassibi and
//! Paré models, and the SARPZF model whose non-infection probability is
//! computed exactly under the product-of-marginals law.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Default vertex cap for the SARPZF model's total-probability sum.
pub const DEFAULT_SARPZF_CAP: usize = 12;
/// Drift outside `[0, 1]` beyond this is counted as a clamp event.
pub const DRIFT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Wang,
    Gomez,
    Ahn,
    Pare,
    Sarpzf,
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Model::Wang => "wang",
            Model::Gomez => "gomez",
            Model::Ahn => "ahn",
            Model::Pare => "pare",
            Model::Sarpzf => "sarpzf",
        })
    }
}

impl FromStr for Model {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "wang" => Ok(Model::Wang),
            "gomez" => Ok(Model::Gomez),
            "ahn" => Ok(Model::Ahn),
            "pare" => Ok(Model::Pare),
            "sarpzf" => Ok(Model::Sarpzf),
            _ => Err(Error::Parse {
                line: 0,
                msg: format!("unknown mean-field model {s:?}"),
            }),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct MeanFieldOptions {
    /// Largest graph the SARPZF model accepts.
    pub sarpzf_cap: usize,
    /// Sum over every coloring, including those where `v` itself is blue,
    /// when computing the probability that `v` is forced. By default `v` is
    /// held white, which is the case the update multiplies by.
    pub literal_sarpzf_q: bool,
}

impl Default for MeanFieldOptions {
    fn default() -> Self {
        MeanFieldOptions {
            sarpzf_cap: DEFAULT_SARPZF_CAP,
            literal_sarpzf_q: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeanFieldState {
    pub probs: Vec<f64>,
    pub t: usize,
    pub model: Model,
    /// Infection rate (unused by the SARPZF model).
    pub beta: f64,
    /// Recovery / reversion probability.
    pub p: f64,
    /// Number of entries so far that drifted outside `[0, 1]` by more than
    /// [`DRIFT_TOL`] and were clamped.
    pub drift_events: usize,
    pub max_drift: f64,
}

impl MeanFieldState {
    pub fn new(model: Model, probs: Vec<f64>, beta: f64, p: f64) -> Result<Self> {
        if let Some(x) = probs.iter().find(|x| !(0.0..=1.0).contains(*x)) {
            return Err(Error::domain(format!("probability {x} outside [0, 1]")));
        }
        let s = MeanFieldState {
            probs,
            t: 0,
            model,
            beta,
            p,
            drift_events: 0,
            max_drift: 0.0,
        };
        s.check_params(None)?;
        Ok(s)
    }

    fn check_params(&self, g: Option<&Graph>) -> Result<()> {
        let (beta, p) = (self.beta, self.p);
        match self.model {
            Model::Sarpzf => {
                if !(p > 0.0 && p < 1.0) {
                    return Err(Error::domain(format!("sarpzf needs p in (0, 1), got {p}")));
                }
            }
            _ => {
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::domain(format!("p must lie in [0, 1], got {p}")));
                }
                if !(0.0..=1.0).contains(&beta) {
                    return Err(Error::domain(format!("beta must lie in [0, 1], got {beta}")));
                }
                if let (Model::Pare, Some(g)) = (self.model, g) {
                    let d = g.max_degree() as f64;
                    if beta * d > 1.0 {
                        return Err(Error::domain(format!(
                            "pare needs beta * max degree <= 1, got {}",
                            beta * d
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// `q_v = prod_{x in N(v)} (1 - beta p_x)`.
fn q_product(g: &Graph, probs: &[f64], beta: f64, v: usize) -> f64 {
    g.neighbors(v).iter().map(|&x| 1.0 - beta * probs[x]).product()
}

/// Probability that `v` is not forced when every vertex is independently
/// blue with its marginal probability. Only vertices within distance two of
/// `v` influence the sum; the rest marginalize to 1.
fn q_sarpzf(g: &Graph, probs: &[f64], v: usize, literal: bool) -> f64 {
    let mut relevant: Vec<usize> = Vec::new();
    for &x in g.neighbors(v) {
        relevant.push(x);
        relevant.extend(g.neighbors(x).iter().copied().filter(|&y| y != v));
    }
    relevant.sort_unstable();
    relevant.dedup();
    if literal {
        relevant.push(v);
    }
    let mut blue = vec![false; g.vertex_count()];
    let mut total = 0.0;
    enumerate(g, probs, v, &relevant, 0, 1.0, &mut blue, &mut total);
    total
}

#[allow(clippy::too_many_arguments)]
fn enumerate(
    g: &Graph,
    probs: &[f64],
    v: usize,
    vars: &[usize],
    depth: usize,
    weight: f64,
    blue: &mut [bool],
    total: &mut f64,
) {
    if depth == vars.len() {
        let not_forced: f64 = g
            .neighbors(v)
            .iter()
            .filter(|&&x| blue[x])
            .map(|&x| {
                let closed = 1 + g.neighbors(x).iter().filter(|&&y| blue[y]).count();
                1.0 - closed as f64 / g.degree(x) as f64
            })
            .product();
        *total += weight * not_forced;
        return;
    }
    let x = vars[depth];
    let px = probs[x];
    if px > 0.0 {
        blue[x] = true;
        enumerate(g, probs, v, vars, depth + 1, weight * px, blue, total);
        blue[x] = false;
    }
    if px < 1.0 {
        enumerate(g, probs, v, vars, depth + 1, weight * (1.0 - px), blue, total);
    }
}

pub fn mf_step(state: &MeanFieldState, g: &Graph) -> Result<MeanFieldState> {
    mf_step_with(state, g, MeanFieldOptions::default())
}

pub fn mf_step_with(state: &MeanFieldState, g: &Graph, opts: MeanFieldOptions) -> Result<MeanFieldState> {
    let n = g.vertex_count();
    if state.probs.len() != n {
        return Err(Error::Dimension {
            expected: n,
            got: state.probs.len(),
        });
    }
    state.check_params(Some(g))?;
    if state.model == Model::Sarpzf && n > opts.sarpzf_cap {
        return Err(Error::Size(format!(
            "sarpzf mean-field model supports at most {} vertices, got {n}",
            opts.sarpzf_cap
        )));
    }
    let (beta, p) = (state.beta, state.p);
    let pr = &state.probs;
    let mut next = state.clone();
    next.t += 1;
    for v in 0..n {
        let pv = pr[v];
        let raw = match state.model {
            Model::Wang => {
                let q = q_product(g, pr, beta, v);
                1.0 - ((1.0 - pv) * q + p * pv * q + 0.5 * p * pv * (1.0 - q))
            }
            Model::Gomez => {
                let q = q_product(g, pr, beta, v);
                (1.0 - p) * pv + (1.0 - q) * (1.0 - pv) + p * (1.0 - q) * pv
            }
            Model::Ahn => {
                let q = q_product(g, pr, beta, v);
                (1.0 - p) * pv + (1.0 - pv) * (1.0 - q)
            }
            Model::Pare => {
                let s: f64 = g.neighbors(v).iter().map(|&x| pr[x]).sum();
                (1.0 - p) * pv + (1.0 - pv) * beta * s
            }
            Model::Sarpzf => {
                let q = q_sarpzf(g, pr, v, opts.literal_sarpzf_q);
                (1.0 - p) * pv + (1.0 - p) * (1.0 - pv) * (1.0 - q)
            }
        };
        let clamped = raw.clamp(0.0, 1.0);
        let drift = (raw - clamped).abs();
        if drift > DRIFT_TOL {
            next.drift_events += 1;
        }
        next.max_drift = next.max_drift.max(drift);
        next.probs[v] = clamped;
    }
    Ok(next)
}

/// `rho_t = (1/n) sum_v p_v(t)`.
pub fn infection_density(state: &MeanFieldState) -> f64 {
    if state.probs.is_empty() {
        return 0.0;
    }
    state.probs.iter().sum::<f64>() / state.probs.len() as f64
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub model: Model,
    pub beta: f64,
    pub p: f64,
    pub t: Vec<usize>,
    pub rho: Vec<f64>,
    /// Per-vertex probabilities at every recorded time.
    pub probs: Vec<Vec<f64>>,
    pub drift_events: usize,
    pub max_drift: f64,
}

/// Iterates the model from `initial` and records `rho_t` for `t = 0..=horizon`.
pub fn mf_trajectory(
    model: Model,
    g: &Graph,
    initial: Vec<f64>,
    beta: f64,
    p: f64,
    horizon: usize,
) -> Result<Trajectory> {
    mf_trajectory_with(model, g, initial, beta, p, horizon, MeanFieldOptions::default())
}

pub fn mf_trajectory_with(
    model: Model,
    g: &Graph,
    initial: Vec<f64>,
    beta: f64,
    p: f64,
    horizon: usize,
    opts: MeanFieldOptions,
) -> Result<Trajectory> {
    let mut state = MeanFieldState::new(model, initial, beta, p)?;
    let mut traj = Trajectory {
        model,
        beta,
        p,
        t: vec![0],
        rho: vec![infection_density(&state)],
        probs: vec![state.probs.clone()],
        drift_events: 0,
        max_drift: 0.0,
    };
    for _ in 0..horizon {
        state = mf_step_with(&state, g, opts)?;
        traj.t.push(state.t);
        traj.rho.push(infection_density(&state));
        traj.probs.push(state.probs.clone());
    }
    traj.drift_events = state.drift_events;
    traj.max_drift = state.max_drift;
    Ok(traj)
}

/// Initial condition with the given vertices infected with probability 1.
pub fn indicator(n: usize, blue: &[usize]) -> Result<Vec<f64>> {
    let mut v = vec![0.0; n];
    for &b in blue {
        if b >= n {
            return Err(Error::domain(format!("vertex {b} outside [0, {n})")));
        }
        v[b] = 1.0;
    }
    Ok(v)
}
