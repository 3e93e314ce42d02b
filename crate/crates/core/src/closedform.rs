//! Closed forms for one RPZF round on the complete graph, the balanced
//! complete bipartite graph and the star, plus numeric threshold sweeps.
//!
//! Quantities of the form `x^m` with `x` near 0 or 1 and large `m` are
//! evaluated through `ln_1p`/`exp_m1` so they stay accurate for `n` well
//! beyond `10^5`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::chain::{check_p, Variant};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::{binomial_pmf, powi, Scalar};

fn need(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Domain(msg()))
    }
}

/// `ln(1 - q(n,b)) = b ln(1 - b/(n-1))` for `b < n - 1`.
fn ln_one_minus_q<T: Scalar>(n: usize, b: usize) -> T {
    T::of_usize(b) * (-(T::of_usize(b) / T::of_usize(n - 1))).ln_1p()
}

/// `q(n,b) = 1 - (1 - b/(n-1))^b`, the probability that `b` blue vertices of
/// `K_n` force a fixed white vertex. Uses `0^0 = 1`; for `b >= n - 1` the
/// value is 1 (for `b = n` there is no white vertex to force).
pub fn q_nb<T: Scalar>(n: usize, b: usize) -> Result<T> {
    need(n >= 2, || format!("q(n,b) needs n >= 2, got n = {n}"))?;
    need(b <= n, || format!("q(n,b) needs b <= n, got b = {b}, n = {n}"))?;
    if b == 0 {
        return Ok(T::zero());
    }
    if b >= n - 1 {
        return Ok(T::one());
    }
    Ok(-ln_one_minus_q::<T>(n, b).exp_m1())
}

/// `ln q(n,b)^{n-b}`, finite for `b >= 1`.
fn ln_force_all<T: Scalar>(n: usize, b: usize) -> T {
    if b >= n - 1 {
        return T::zero();
    }
    // ln q = ln(1 - (1 - q)) with 1 - q computed directly.
    let one_minus_q = ln_one_minus_q::<T>(n, b).exp();
    T::of_usize(n - b) * (-one_minus_q).ln_1p()
}

/// `P_b[all white vertices forced] = q(n,b)^{n-b}` on `K_n`.
pub fn kn_force_all_probability<T: Scalar>(n: usize, b: usize) -> Result<T> {
    q_nb::<T>(n, b)?;
    if b == 0 {
        return Ok(T::zero());
    }
    Ok(ln_force_all::<T>(n, b).exp())
}

/// The `n x n` PZF transition matrix `K(n)` of `K_n` over blue counts
/// `1..=n` (row/column `i - 1` holds count `i`).
pub fn kn_pzf_matrix<T: Scalar>(n: usize) -> Result<Matrix<T>> {
    need(n >= 2, || format!("K(n) needs n >= 2, got {n}"))?;
    let mut k = Matrix::zeros(n, n);
    for i in 1..=n {
        let q = q_nb::<T>(n, i)?;
        for j in i..=n {
            k[(i - 1, j - 1)] = binomial_pmf(n - i, j - i, q);
        }
    }
    Ok(k)
}

/// `[1] ⊕ K(n)`: the PZF matrix including the all-white state.
pub fn kn_pzf_matrix_with_empty<T: Scalar>(n: usize) -> Result<Matrix<T>> {
    let k = kn_pzf_matrix::<T>(n)?;
    let mut out = Matrix::zeros(n + 1, n + 1);
    out[(0, 0)] = T::one();
    for i in 0..n {
        for j in 0..n {
            out[(i + 1, j + 1)] = k[(i, j)];
        }
    }
    Ok(out)
}

fn check_pmf_args<T: Scalar>(n: usize, b: usize, p: T, k: usize) -> Result<()> {
    need(n >= 2, || format!("n must be >= 2, got {n}"))?;
    need((1..=n).contains(&b), || format!("b must lie in [1, {n}], got {b}"))?;
    need(k <= n, || format!("k must lie in [0, {n}], got {k}"))?;
    check_p(p)
}

/// `P_b[X_1 = k]` for SARPZF by the forcing-then-reversion sum
/// `sum_i C(n-b,i-b) C(i,k) (1-p)^k p^(i-k) q^(i-b) (1-q)^(n-i)`.
pub fn kn_one_step_pmf_formula1<T: Scalar>(n: usize, b: usize, p: T, k: usize) -> Result<T> {
    check_pmf_args(n, b, p, k)?;
    let q = q_nb::<T>(n, b)?;
    Ok((b.max(k)..=n)
        .map(|i| binomial_pmf(n - b, i - b, q) * binomial_pmf(i, k, T::one() - p))
        .sum())
}

/// `P_b[X_1 = k]` for SARPZF as a sum of two independent binomials:
/// survivors among the `b` blue vertices and forced-and-kept white vertices.
pub fn kn_one_step_pmf_formula2<T: Scalar>(n: usize, b: usize, p: T, k: usize) -> Result<T> {
    check_pmf_args(n, b, p, k)?;
    let q = q_nb::<T>(n, b)?;
    let keep = (T::one() - p) * q;
    Ok((0..=b.min(k))
        .map(|i| binomial_pmf(b, i, T::one() - p) * binomial_pmf(n - b, k - i, keep))
        .sum())
}

/// `P_b[X_1 = k]` on `K_n`. DARPZF removes the reversion of the fully
/// forced outcome: `- C(n,k) p^(n-k) (1-p)^k q^(n-b) + δ_{nk} q^(n-b)`.
pub fn kn_one_step_pmf<T: Scalar>(n: usize, b: usize, p: T, variant: Variant, k: usize) -> Result<T> {
    let s = kn_one_step_pmf_formula2(n, b, p, k)?;
    Ok(match variant {
        Variant::Sarpzf => s,
        Variant::Darpzf => {
            let all = kn_force_all_probability::<T>(n, b)?;
            let delta = if k == n { all } else { T::zero() };
            s - binomial_pmf(n, k, T::one() - p) * all + delta
        }
    })
}

/// The whole one-step distribution `(P_b[X_1 = k])_{k=0..=n}`.
pub fn kn_one_step_distribution<T: Scalar>(n: usize, b: usize, p: T, variant: Variant) -> Result<Vec<T>> {
    (0..=n).map(|k| kn_one_step_pmf(n, b, p, variant, k)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DieOut<T> {
    /// Exact `P_b[X_1 = 0]`.
    pub exact: T,
    /// Large-`n` limit `p^b e^{b^2 (p - 1)}`.
    pub limit: T,
}

/// One-round die-out probability on `K_n` from `b` blue vertices:
/// `p^b [1 - (1-p) q(n,b)]^{n-b}`, minus `p^n q(n,b)^{n-b}` for DARPZF.
pub fn kn_one_step_dieout<T: Scalar>(n: usize, b: usize, p: T, variant: Variant) -> Result<DieOut<T>> {
    need(n >= 3 && (1..=n - 2).contains(&b), || {
        format!("die-out closed form needs 1 <= b <= n - 2, got b = {b}, n = {n}")
    })?;
    check_p(p)?;
    let q = q_nb::<T>(n, b)?;
    let ln_s = T::of_usize(b) * p.ln() + T::of_usize(n - b) * (-(T::one() - p) * q).ln_1p();
    let mut exact = ln_s.exp();
    if variant == Variant::Darpzf {
        exact = exact - (T::of_usize(n) * p.ln() + ln_force_all::<T>(n, b)).exp();
    }
    Ok(DieOut {
        exact,
        limit: kn_dieout_limit(b, p),
    })
}

/// `p^b e^{b^2 (p - 1)}`.
pub fn kn_dieout_limit<T: Scalar>(b: usize, p: T) -> T {
    let bf = T::of_usize(b);
    (bf * p.ln() + bf * bf * (p - T::one())).exp()
}

/// `E_b[X_1]` on `K_n`: `(1-p)(b + (n-b) q(n,b))`, plus `n p q(n,b)^{n-b}`
/// for DARPZF.
pub fn kn_one_step_expectation<T: Scalar>(n: usize, b: usize, p: T, variant: Variant) -> Result<T> {
    need(n >= 2 && b <= n, || format!("need n >= 2 and b <= n, got b = {b}, n = {n}"))?;
    check_p(p)?;
    let q = q_nb::<T>(n, b)?;
    let (nf, bf) = (T::of_usize(n), T::of_usize(b));
    let mut e = (T::one() - p) * (bf + (nf - bf) * q);
    if variant == Variant::Darpzf {
        e = e + nf * p * powi(q, n - b);
    }
    Ok(e)
}

/// `|n - E_b[X_1^D]|` on `K_n` in the cancellation-free form
/// `(1-p)(n-b)(1-q) + p n (1 - q^{n-b})`.
pub fn kn_expectation_gap(n: usize, b: usize, p: f64) -> Result<f64> {
    need(n >= 2 && (1..=n).contains(&b), || format!("need 1 <= b <= n, got b = {b}, n = {n}"))?;
    check_p(p)?;
    if b >= n - 1 {
        // q = 1: the fully forced outcome is certain.
        return Ok(0.0);
    }
    let one_minus_q = ln_one_minus_q::<f64>(n, b).exp();
    let one_minus_all = -ln_force_all::<f64>(n, b).exp_m1();
    Ok((1.0 - p) * (n - b) as f64 * one_minus_q + p * n as f64 * one_minus_all)
}

/// Probability that one part of a complete bipartite graph forces the other
/// part (of size `part_size`, `b_v` of whose vertices are blue) entirely
/// blue: `(1 - (1 - (b_v+1)/|V|)^{b_u})^{|V| - b_v}`.
pub fn bipartite_force_across<T: Scalar>(part_size: usize, b_u: usize, b_v: usize) -> Result<T> {
    need(part_size >= 1, || "part size must be >= 1".into())?;
    need(b_v <= part_size, || format!("b_V = {b_v} exceeds part size {part_size}"))?;
    if b_v == part_size {
        return Ok(T::one());
    }
    if b_u == 0 {
        return Ok(T::zero());
    }
    let ratio = T::of_usize(b_v + 1) / T::of_usize(part_size);
    let miss = powi(T::one() - ratio, b_u);
    let whites = part_size - b_v;
    if miss == T::zero() {
        return Ok(T::one());
    }
    Ok((T::of_usize(whites) * (-miss).ln_1p()).exp())
}

fn check_star<T: Scalar>(n: usize, b: usize, p: T) -> Result<()> {
    need(n >= 3, || format!("star closed forms need n >= 3, got {n}"))?;
    need((1..=n).contains(&b), || format!("b must lie in [1, {n}], got {b}"))?;
    check_p(p)
}

/// Probability that the blue universal vertex of the star on `n` vertices,
/// with `b` blue vertices in total, forces every white leaf:
/// `(b/(n-1))^{n-b}`.
pub fn star_force_all_probability<T: Scalar>(n: usize, b: usize) -> Result<T> {
    check_star(n, b, T::of(0.5))?;
    Ok(powi(T::of_usize(b) / T::of_usize(n - 1), n - b))
}

/// `E[X_1]` on the star with the universal vertex among the `b` blue
/// vertices: `(1-p)(b + (n-b) b/(n-1))`, plus `n p (b/(n-1))^{n-b}` for
/// DARPZF.
pub fn star_one_step_expectation<T: Scalar>(n: usize, b: usize, p: T, variant: Variant) -> Result<T> {
    check_star(n, b, p)?;
    let (nf, bf) = (T::of_usize(n), T::of_usize(b));
    let r = bf / T::of_usize(n - 1);
    let mut e = (T::one() - p) * (bf + (nf - bf) * r);
    if variant == Variant::Darpzf {
        e = e + nf * p * powi(r, n - b);
    }
    Ok(e)
}

/// `|n - E[X_1^D]|` on the star, cancellation free:
/// `(1-p)(n-b)(1-r) + p n (1 - r^{n-b})` with `r = b/(n-1)`.
pub fn star_expectation_gap(n: usize, b: usize, p: f64) -> Result<f64> {
    check_star(n, b, p)?;
    if b >= n - 1 {
        return Ok(0.0);
    }
    let one_minus_r = (n - 1 - b) as f64 / (n - 1) as f64;
    let one_minus_all = -((n - b) as f64 * (-one_minus_r).ln_1p()).exp_m1();
    Ok((1.0 - p) * (n - b) as f64 * one_minus_r + p * n as f64 * one_minus_all)
}

/// How `b_n` grows with `n` in a threshold sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum BRule {
    /// Complete graph: `b_n = ceil(sqrt(n c ln n))`, i.e. `sqrt(n log n^c)`.
    CompleteSqrtLog { c: f64 },
    /// Star: `b_n = n - 1 - offset` blue vertices including the center.
    StarOffset { offset: usize },
    /// Star: `b_n = n - 1 - ceil(c ln n)`.
    StarLogOffset { c: f64 },
    /// `K_{n,n}` with `ceil(sqrt(n c ln n))` blue vertices in each part.
    BipartiteBalanced { c: f64 },
    /// `K_{n,n}` with one part entirely blue and `ceil(c ln n)` blue
    /// vertices in the other.
    BipartitePartFull { c: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepFamily {
    Complete,
    Bipartite,
    Star,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    /// `|n - E_{b_n}[X_1^D]|`.
    ExpectationGap,
    /// `P_{b_n}[X_1^D = n]`: every vertex blue after one round.
    OneStepForceProb,
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::ExpectationGap => "expectation_gap",
            Metric::OneStepForceProb => "one_step_force_prob",
        })
    }
}

impl FromStr for Metric {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "expectation_gap" | "gap" => Ok(Metric::ExpectationGap),
            "one_step_force_prob" | "force_prob" => Ok(Metric::OneStepForceProb),
            _ => Err(Error::Parse {
                line: 0,
                msg: format!("unknown metric {s:?}"),
            }),
        }
    }
}

impl BRule {
    pub fn family(&self) -> SweepFamily {
        match self {
            BRule::CompleteSqrtLog { .. } => SweepFamily::Complete,
            BRule::StarOffset { .. } | BRule::StarLogOffset { .. } => SweepFamily::Star,
            BRule::BipartiteBalanced { .. } | BRule::BipartitePartFull { .. } => {
                SweepFamily::Bipartite
            }
        }
    }

    /// The blue count for size parameter `n` (vertex count for complete and
    /// star, part size for bipartite).
    pub fn b_for(&self, n: usize) -> Result<usize> {
        let ln = (n as f64).ln();
        let b = match *self {
            BRule::CompleteSqrtLog { c } | BRule::BipartiteBalanced { c } => {
                need(c > 0.0, || format!("exponent must be positive, got {c}"))?;
                ((n as f64 * c * ln).sqrt().ceil() as usize).clamp(1, n)
            }
            BRule::BipartitePartFull { c } => {
                need(c > 0.0, || format!("exponent must be positive, got {c}"))?;
                ((c * ln).ceil() as usize).min(n)
            }
            BRule::StarOffset { offset } => {
                need(offset + 1 < n, || format!("offset {offset} too large for n = {n}"))?;
                n - 1 - offset
            }
            BRule::StarLogOffset { c } => {
                let off = (c * ln).ceil().max(0.0) as usize;
                need(off + 1 < n, || format!("offset {off} too large for n = {n}"))?;
                n - 1 - off
            }
        };
        Ok(b)
    }

    pub fn describe(&self) -> String {
        match *self {
            BRule::CompleteSqrtLog { c } => format!("ceil(sqrt(n*{c}*ln n))"),
            BRule::StarOffset { offset } => format!("n-1-{offset}"),
            BRule::StarLogOffset { c } => format!("n-1-ceil({c}*ln n)"),
            BRule::BipartiteBalanced { c } => format!("ceil(sqrt(n*{c}*ln n)) per part"),
            BRule::BipartitePartFull { c } => format!("U full, ceil({c}*ln n) in V"),
        }
    }
}

/// A threshold experiment: metric values along a grid of sizes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdSweep {
    pub family: SweepFamily,
    pub rule: BRule,
    pub b_rule: String,
    pub metric: Metric,
    pub p: f64,
    pub n_grid: Vec<usize>,
    pub b_values: Vec<usize>,
    pub values: Vec<f64>,
}

/// Evaluates `metric` at every `n` of a strictly increasing grid.
pub fn threshold_sweep(rule: BRule, metric: Metric, p: f64, n_grid: &[usize]) -> Result<ThresholdSweep> {
    check_p(p)?;
    need(!n_grid.is_empty(), || "n grid is empty".into())?;
    need(n_grid.windows(2).all(|w| w[0] < w[1]), || {
        "n grid must be strictly increasing".into()
    })?;
    let mut b_values = Vec::with_capacity(n_grid.len());
    let mut values = Vec::with_capacity(n_grid.len());
    for &n in n_grid {
        let b = rule.b_for(n)?;
        let v = match (rule.family(), metric) {
            (SweepFamily::Complete, Metric::ExpectationGap) => kn_expectation_gap(n, b, p)?,
            (SweepFamily::Complete, Metric::OneStepForceProb) => kn_force_all_probability(n, b)?,
            (SweepFamily::Star, Metric::ExpectationGap) => star_expectation_gap(n, b, p)?,
            (SweepFamily::Star, Metric::OneStepForceProb) => star_force_all_probability(n, b)?,
            (SweepFamily::Bipartite, Metric::OneStepForceProb) => match rule {
                BRule::BipartiteBalanced { .. } => {
                    let one: f64 = bipartite_force_across(n, b, b)?;
                    one * one
                }
                _ => bipartite_force_across(n, n, b)?,
            },
            (SweepFamily::Bipartite, Metric::ExpectationGap) => {
                return Err(Error::domain(
                    "bipartite sweeps support only the one_step_force_prob metric",
                ))
            }
        };
        if !(v.is_finite() && v >= 0.0) {
            return Err(Error::Consistency(format!("metric at n = {n} is {v}")));
        }
        b_values.push(b);
        values.push(v);
    }
    Ok(ThresholdSweep {
        family: rule.family(),
        rule,
        b_rule: rule.describe(),
        metric,
        p,
        n_grid: n_grid.to_vec(),
        b_values,
        values,
    })
}
