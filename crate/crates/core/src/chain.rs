//! Transition matrices for the two-phase reversion process.
//!
//! One round is phase 1 (probabilistic forcing, matrix `F`) followed by
//! phase 2 (each blue vertex reverts independently with probability `p`,
//! matrix `R`), so the round transition matrix is `M = F R`. Forces in a
//! round are evaluated against the blue set at the start of the round.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::linalg::Matrix;
use crate::scalar::{binomial_pmf, powi, Scalar};
use crate::statespace::{ColoringState, StateSpace};

/// Row-sum tolerance applied when a bundle is built.
pub const BUILD_ROW_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// Single absorption: only all-white is absorbing.
    Sarpzf,
    /// Dual absorption: all-blue after phase 1 suppresses reversion.
    Darpzf,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Sarpzf => "sarpzf",
            Variant::Darpzf => "darpzf",
        })
    }
}

impl FromStr for Variant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sarpzf" | "s" => Ok(Variant::Sarpzf),
            "darpzf" | "d" => Ok(Variant::Darpzf),
            other => Err(Error::Parse {
                line: 0,
                msg: format!("unknown variant {other:?}"),
            }),
        }
    }
}

pub(crate) fn check_p<T: Scalar>(p: T) -> Result<()> {
    if p > T::zero() && p < T::one() {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "reversion probability must lie in (0, 1), got {p}"
        )))
    }
}

/// Construction-time tolerance: `BUILD_ROW_TOL`, widened for low precision
/// scalars.
pub fn build_tol<T: Scalar>(dim: usize) -> T {
    T::of(BUILD_ROW_TOL).max(T::epsilon() * T::of_usize(4 * dim.max(1)))
}

/// Probability that the blue set forces white vertex `w` in one phase-1 step:
/// `1 - prod_{x in B ∩ N(w)} (1 - |N[x] ∩ B| / deg x)`.
pub fn force_probability<T: Scalar>(g: &Graph, blue: &ColoringState, w: usize) -> Result<T> {
    if blue.vertex_count() != g.vertex_count() {
        return Err(Error::Dimension {
            expected: g.vertex_count(),
            got: blue.vertex_count(),
        });
    }
    if w >= g.vertex_count() {
        return Err(Error::domain(format!("vertex {w} out of range")));
    }
    if blue.contains(w) {
        return Err(Error::domain(format!("vertex {w} is already blue")));
    }
    let mut miss = T::one();
    for &x in g.neighbors(w).iter().filter(|&&x| blue.contains(x)) {
        let closed = 1 + g.neighbors(x).iter().filter(|&&y| blue.contains(y)).count();
        let factor = T::one() - T::of_usize(closed) / T::of_usize(g.degree(x));
        // x has the white neighbour w, so |N[x] ∩ B| <= deg x
        debug_assert!(factor >= T::zero() && factor <= T::one());
        miss = miss * factor;
    }
    Ok(T::one() - miss)
}

/// Phase-1 matrix `F` over the states of `ss`.
pub fn build_forcing<T: Scalar>(g: &Graph, ss: &StateSpace) -> Result<Matrix<T>> {
    ss.check_compatible(g)?;
    let dim = ss.len();
    let mut f = Matrix::zeros(dim, dim);
    if let Some(cells) = ss.cells() {
        for i in 0..dim {
            let rep = ss.representative(i);
            let counts = ss.cell_counts(i).expect("collapsed space");
            // per cell: distribution of the number of newly forced vertices
            let mut per_cell: Vec<Vec<T>> = Vec::with_capacity(cells.len());
            for (cell, &k) in cells.iter().zip(counts) {
                let whites = cell.len() - k;
                if whites == 0 {
                    per_cell.push(vec![T::one()]);
                    continue;
                }
                let q: T = force_probability(g, &rep, cell[k])?;
                per_cell.push((0..=whites).map(|x| binomial_pmf(whites, x, q)).collect());
            }
            let mut target = counts.to_vec();
            scatter_product(&per_cell, 0, T::one(), counts, &mut target, &mut |t, w| {
                let j = ss.index_of_counts(t).expect("count within cell");
                f[(i, j)] = f[(i, j)] + w;
            });
        }
    } else {
        let n = g.vertex_count();
        for i in 0..dim {
            let b = ss.mask(i).expect("full space");
            let blue = ColoringState::from_mask(n, b);
            let mut outcomes: Vec<(u64, T)> = vec![(b, T::one())];
            for w in (0..n).filter(|w| b >> w & 1 == 0) {
                let q: T = force_probability(g, &blue, w)?;
                let mut next = Vec::with_capacity(outcomes.len() * 2);
                for (m, x) in outcomes {
                    if q < T::one() {
                        next.push((m, x * (T::one() - q)));
                    }
                    if q > T::zero() {
                        next.push((m | 1 << w, x * q));
                    }
                }
                outcomes = next;
            }
            for (m, x) in outcomes {
                let j = ss.classify(&ColoringState::from_mask(n, m))?;
                f[(i, j)] = f[(i, j)] + x;
            }
        }
    }
    Ok(f)
}

fn scatter_product<T: Scalar>(
    per_cell: &[Vec<T>],
    cell: usize,
    weight: T,
    base: &[usize],
    target: &mut Vec<usize>,
    emit: &mut impl FnMut(&[usize], T),
) {
    if cell == per_cell.len() {
        emit(target, weight);
        return;
    }
    for (x, &w) in per_cell[cell].iter().enumerate() {
        if w == T::zero() {
            continue;
        }
        target[cell] = base[cell] + x;
        scatter_product(per_cell, cell + 1, weight * w, base, target, emit);
    }
}

/// Phase-2 matrix: each blue vertex reverts independently with probability
/// `p`; under DARPZF the all-blue row is the identity row.
pub fn build_reversion<T: Scalar>(ss: &StateSpace, p: T, variant: Variant) -> Result<Matrix<T>> {
    check_p(p)?;
    let dim = ss.len();
    let keep = T::one() - p;
    let mut r = Matrix::zeros(dim, dim);
    if ss.cells().is_some() {
        for i in 0..dim {
            let counts = ss.cell_counts(i).expect("collapsed space").to_vec();
            // survivors per cell ~ Binomial(k, 1 - p)
            let per_cell: Vec<Vec<T>> = counts
                .iter()
                .map(|&k| (0..=k).map(|j| binomial_pmf(k, j, keep)).collect())
                .collect();
            let zero = vec![0; counts.len()];
            let mut target = zero.clone();
            scatter_product(&per_cell, 0, T::one(), &zero, &mut target, &mut |t, w| {
                let j = ss.index_of_counts(t).expect("count within cell");
                r[(i, j)] = r[(i, j)] + w;
            });
        }
    } else {
        let n = ss.vertex_count();
        for i in 0..dim {
            let b = ss.mask(i).expect("full space");
            let total = b.count_ones() as usize;
            let mut sub = b;
            loop {
                let kept = sub.count_ones() as usize;
                let j = ss.classify(&ColoringState::from_mask(n, sub))?;
                r[(i, j)] = powi(p, total - kept) * powi(keep, kept);
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & b;
            }
        }
    }
    if variant == Variant::Darpzf {
        let s = ss.last();
        r.row_mut(s).fill(T::zero());
        r[(s, s)] = T::one();
    }
    Ok(r)
}

/// The block partition of `M` into absorbing and transient parts.
#[derive(Debug, Clone, PartialEq)]
pub enum Partition<T> {
    /// `M = [1 0; r Q]`, with `Q` over states `1..=s`.
    Single { r: Vec<T>, q: Matrix<T> },
    /// `M = [1 0 0; a1 Q a2; 0 0 1]`, with `Q` over states `1..s`.
    Dual {
        a1: Vec<T>,
        q: Matrix<T>,
        a2: Vec<T>,
    },
}

impl<T: Scalar> Partition<T> {
    pub fn transient_block(&self) -> &Matrix<T> {
        match self {
            Partition::Single { q, .. } | Partition::Dual { q, .. } => q,
        }
    }
}

#[derive(Debug, Clone)]
pub struct TransitionBundle<T> {
    pub variant: Variant,
    pub p: T,
    pub forcing: Matrix<T>,
    pub reversion: Matrix<T>,
    pub transition: Matrix<T>,
    pub partition: Partition<T>,
}

impl<T: Scalar> TransitionBundle<T> {
    pub fn build(g: &Graph, ss: &StateSpace, p: T, variant: Variant) -> Result<Self> {
        check_p(p)?;
        if g.vertex_count() < 2 {
            return Err(Error::domain("chains need at least two vertices"));
        }
        let forcing = build_forcing(g, ss)?;
        Self::from_forcing(forcing, ss, p, variant)
    }

    /// Builds the bundle from a precomputed phase-1 matrix; `F` does not
    /// depend on `p`, so sweeps over `p` reuse it.
    pub fn from_forcing(
        forcing: Matrix<T>,
        ss: &StateSpace,
        p: T,
        variant: Variant,
    ) -> Result<Self> {
        if forcing.rows() != ss.len() || !forcing.is_square() {
            return Err(Error::Dimension {
                expected: ss.len(),
                got: forcing.rows(),
            });
        }
        let reversion = build_reversion(ss, p, variant)?;
        let transition = forcing.matmul(&reversion)?;
        let s = ss.last();
        let partition = match variant {
            Variant::Sarpzf => Partition::Single {
                r: transition.column(0)[1..].to_vec(),
                q: transition.block(1, s + 1, 1, s + 1),
            },
            Variant::Darpzf => Partition::Dual {
                a1: transition.column(0)[1..s].to_vec(),
                q: transition.block(1, s, 1, s),
                a2: transition.column(s)[1..s].to_vec(),
            },
        };
        let bundle = TransitionBundle {
            variant,
            p,
            forcing,
            reversion,
            transition,
            partition,
        };
        bundle.validate(build_tol::<T>(bundle.dim()))?;
        Ok(bundle)
    }

    /// Number of states `s + 1`.
    pub fn dim(&self) -> usize {
        self.transition.rows()
    }

    pub fn validate(&self, tol: T) -> Result<()> {
        for (name, m) in [
            ("F", &self.forcing),
            ("R", &self.reversion),
            ("M", &self.transition),
        ] {
            for (i, sum) in m.row_sums().into_iter().enumerate() {
                if (sum - T::one()).abs() > tol {
                    return Err(Error::Consistency(format!(
                        "row {i} of {name} sums to {sum}"
                    )));
                }
            }
            if let Some(x) = m.iter().find(|&&x| x < -tol || x > T::one() + tol) {
                return Err(Error::Consistency(format!("{name} has entry {x}")));
            }
        }
        let s = self.dim() - 1;
        let unit = |i: usize| (0..=s).all(|j| self.transition[(i, j)] == if i == j { T::one() } else { T::zero() });
        if !unit(0) {
            return Err(Error::Consistency("all-white row is not absorbing".into()));
        }
        if self.variant == Variant::Darpzf && !unit(s) {
            return Err(Error::Consistency("all-blue row is not absorbing".into()));
        }
        // Every transient row leaks mass in exact arithmetic, but the leak
        // can be far below machine epsilon (e.g. p near 0), so the computed
        // norm is only required to be at most 1 up to round-off; a block that
        // truly fails to absorb is caught as singular by the solver.
        let q = self.partition.transient_block();
        if q.rows() > 0 && q.norm_inf() > T::one() + tol {
            return Err(Error::Consistency(format!(
                "transient block has norm {} >= 1",
                q.norm_inf()
            )));
        }
        Ok(())
    }

    /// `dist · M`.
    pub fn step_distribution(&self, dist: &[T]) -> Result<Vec<T>> {
        if dist.len() != self.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                got: dist.len(),
            });
        }
        if dist.iter().any(|&x| x < T::zero()) {
            return Err(Error::domain("distribution has a negative entry"));
        }
        let total: T = dist.iter().copied().sum();
        if (total - T::one()).abs() > build_tol::<T>(self.dim()) {
            return Err(Error::domain(format!("distribution sums to {total}")));
        }
        self.transition.left_mul_vec(dist)
    }
}

/// Convenience wrapper for [`TransitionBundle::build`].
pub fn build_bundle<T: Scalar>(
    g: &Graph,
    ss: &StateSpace,
    p: T,
    variant: Variant,
) -> Result<TransitionBundle<T>> {
    TransitionBundle::build(g, ss, p, variant)
}
