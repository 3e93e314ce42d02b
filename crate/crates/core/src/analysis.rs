//! Absorbing-chain linear algebra.
//!
//! With `Q` the transient block of a round transition matrix, the
//! fundamental matrix `N = (I - Q)^{-1}` holds expected visit counts,
//! `t = N 1` the expected rounds until absorption, and under DARPZF
//! `C = (I - Q)^{-1} [a1 a2]` the die-out / fully-force probabilities.

use serde::Serialize;

use crate::chain::{Partition, TransitionBundle, Variant};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::linalg::{residual, Lu, Matrix};
use crate::scalar::Scalar;
use crate::statespace::StateSpace;

/// Default function-value tolerance for the critical reversion probability.
pub const DEFAULT_CRITICAL_TOL: f64 = 1e-7;
const BRACKET_LO: f64 = 1e-9;
const BRACKET_HI: f64 = 1.0 - 1e-9;

#[derive(Debug, Clone)]
pub struct FundamentalMatrix<T> {
    pub n: Matrix<T>,
    /// `‖(I - Q) N - I‖_∞`.
    pub residual: T,
}

fn identity_minus<T: Scalar>(q: &Matrix<T>) -> Result<Matrix<T>> {
    if !q.is_square() {
        return Err(Error::Dimension {
            expected: q.rows(),
            got: q.cols(),
        });
    }
    // `‖Q‖ < 1` cannot be certified in floating point when the escape
    // probability of some row is below epsilon, so only norms clearly above
    // 1 are rejected here; rank deficiency surfaces from the factorization.
    if q.rows() > 0 && q.norm_inf() > T::one() + crate::chain::build_tol::<T>(q.rows()) {
        return Err(Error::domain(format!(
            "transient block has norm {} > 1",
            q.norm_inf()
        )));
    }
    Ok(Matrix::identity(q.rows()).sub(q))
}

/// `I - Q` for a partitioned round matrix, with each diagonal entry
/// `1 - Q_ii` taken as the row's escape mass plus its off-diagonal transient
/// mass rather than by subtraction. Rows of `M` sum to one, so this is the
/// same matrix in exact arithmetic, but it avoids cancellation when `Q_ii`
/// is close to 1 (the Grassmann–Taksar–Heyman device).
fn transient_system<T: Scalar>(partition: &Partition<T>) -> Result<Matrix<T>> {
    let q = partition.transient_block();
    let mut a = identity_minus(q)?;
    let escape: Vec<T> = match partition {
        Partition::Single { r, .. } => r.clone(),
        Partition::Dual { a1, a2, .. } => a1.iter().zip(a2).map(|(&x, &y)| x + y).collect(),
    };
    for (i, &e) in escape.iter().enumerate() {
        let off: T = (0..q.cols()).filter(|&j| j != i).map(|j| q[(i, j)]).sum();
        a[(i, i)] = e + off;
    }
    Ok(a)
}

pub fn fundamental_matrix<T: Scalar>(q: &Matrix<T>) -> Result<FundamentalMatrix<T>> {
    let a = identity_minus(q)?;
    let eye = Matrix::identity(q.rows());
    let n = Lu::factor(&a)?.solve_mat(&eye)?;
    let residual = residual(&a, &n, &eye)?;
    Ok(FundamentalMatrix { n, residual })
}

/// `t = N 1`.
pub fn expected_absorption_times<T: Scalar>(n: &Matrix<T>) -> Vec<T> {
    n.row_sums()
}

#[derive(Debug, Clone)]
pub struct AbsorptionProbabilities<T> {
    /// Column 0: die out, column 1: fully force.
    pub c: Matrix<T>,
    pub residual: T,
}

pub fn absorption_probabilities<T: Scalar>(
    q: &Matrix<T>,
    a1: &[T],
    a2: &[T],
) -> Result<AbsorptionProbabilities<T>> {
    if a1.len() != q.rows() || a2.len() != q.rows() {
        return Err(Error::Dimension {
            expected: q.rows(),
            got: a1.len().min(a2.len()),
        });
    }
    let a = identity_minus(q)?;
    let lu = Lu::factor(&a)?;
    let die = lu.solve_vec(a1)?;
    let force = lu.solve_vec(a2)?;
    let c = Matrix::from_rows(die.into_iter().zip(force).map(|(x, y)| vec![x, y]).collect())
        .unwrap_or_else(|_| Matrix::zeros(0, 2));
    let rhs = Matrix::from_rows(a1.iter().zip(a2).map(|(&x, &y)| vec![x, y]).collect())
        .unwrap_or_else(|_| Matrix::zeros(0, 2));
    let residual = if q.rows() == 0 {
        T::zero()
    } else {
        residual(&a, &c, &rhs)?
    };
    Ok(AbsorptionProbabilities { c, residual })
}

/// Absorption statistics for every transient state of a bundle.
#[derive(Debug, Clone)]
pub struct AbsorptionReport<T> {
    pub variant: Variant,
    pub p: T,
    /// State index of each transient row.
    pub states: Vec<usize>,
    pub blue_counts: Vec<usize>,
    pub labels: Vec<String>,
    pub n: Matrix<T>,
    pub t: Vec<T>,
    pub c: Option<Matrix<T>>,
    pub residual: T,
}

impl<T: Scalar> AbsorptionReport<T> {
    pub fn from_bundle(bundle: &TransitionBundle<T>, ss: &StateSpace) -> Result<Self> {
        if bundle.dim() != ss.len() {
            return Err(Error::Dimension {
                expected: ss.len(),
                got: bundle.dim(),
            });
        }
        let q = bundle.partition.transient_block();
        let k = q.rows();
        let a = transient_system(&bundle.partition)?;
        let lu = Lu::factor(&a)?;
        let eye = Matrix::identity(k);
        let mut n = Matrix::zeros(k, k);
        for j in 0..k {
            for (i, v) in lu.solve_refined(&a, &eye.column(j))?.into_iter().enumerate() {
                n[(i, j)] = v;
            }
        }
        let mut res = if k == 0 { T::zero() } else { residual(&a, &n, &eye)? };
        let t = expected_absorption_times(&n);
        let c = match &bundle.partition {
            Partition::Dual { a1, a2, .. } => {
                let die = lu.solve_refined(&a, a1)?;
                let force = lu.solve_refined(&a, a2)?;
                let c = Matrix::from_rows(die.into_iter().zip(force).map(|(x, y)| vec![x, y]).collect())
                    .unwrap_or_else(|_| Matrix::zeros(0, 2));
                if k > 0 {
                    let rhs = Matrix::from_rows(a1.iter().zip(a2).map(|(&x, &y)| vec![x, y]).collect())?;
                    res = res.max(residual(&a, &c, &rhs)?);
                }
                Some(c)
            }
            Partition::Single { .. } => None,
        };
        let states: Vec<usize> = (1..=q.rows()).collect();
        Ok(AbsorptionReport {
            variant: bundle.variant,
            p: bundle.p,
            blue_counts: states.iter().map(|&i| ss.blue_count(i)).collect(),
            labels: states.iter().map(|&i| ss.label(i)).collect(),
            states,
            n,
            t,
            c,
            residual: res,
        })
    }

    /// Row of the report for state index `state`.
    pub fn row_of(&self, state: usize) -> Option<usize> {
        self.states.iter().position(|&s| s == state)
    }

    pub fn expected_time(&self, state: usize) -> Option<T> {
        self.row_of(state).map(|r| self.t[r])
    }

    pub fn die_out(&self, state: usize) -> Option<T> {
        let r = self.row_of(state)?;
        self.c.as_ref().map(|c| c[(r, 0)])
    }

    pub fn fully_force(&self, state: usize) -> Option<T> {
        let r = self.row_of(state)?;
        self.c.as_ref().map(|c| c[(r, 1)])
    }
}

/// Builds the bundle for `(g, ss, p, variant)` and analyses it.
pub fn analyze<T: Scalar>(
    g: &Graph,
    ss: &StateSpace,
    p: T,
    variant: Variant,
) -> Result<AbsorptionReport<T>> {
    let bundle = TransitionBundle::build(g, ss, p, variant)?;
    AbsorptionReport::from_bundle(&bundle, ss)
}

/// Die-out probability from one state as a function of `p`, reusing the
/// phase-1 matrix across evaluations.
pub struct DieOutCurve<'a, T> {
    ss: &'a StateSpace,
    forcing: Matrix<T>,
    state: usize,
}

impl<'a, T: Scalar> DieOutCurve<'a, T> {
    pub fn new(g: &Graph, ss: &'a StateSpace, state: usize) -> Result<Self> {
        if state == 0 || state >= ss.last() {
            return Err(Error::domain(format!(
                "state {state} is not transient under DARPZF"
            )));
        }
        Ok(DieOutCurve {
            ss,
            forcing: crate::chain::build_forcing(g, ss)?,
            state,
        })
    }

    pub fn eval(&self, p: T) -> Result<T> {
        let bundle = TransitionBundle::from_forcing(self.forcing.clone(), self.ss, p, Variant::Darpzf)?;
        match &bundle.partition {
            Partition::Dual { a1, .. } => {
                let a = transient_system(&bundle.partition)?;
                let x = Lu::factor(&a)?.solve_vec(a1)?;
                Ok(x[self.state - 1])
            }
            Partition::Single { .. } => unreachable!("DARPZF bundle"),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CriticalProbability<T> {
    pub p: T,
    /// Die-out probability at `p`.
    pub die_out: T,
    pub probes: usize,
    /// Number of sign changes of `c(p) - 1/2` seen by the optional scan;
    /// more than one means the root may not be unique.
    pub scan_sign_changes: Option<usize>,
}

#[derive(Debug, Clone, Copy)]
pub struct CriticalOptions {
    pub tol: f64,
    /// Grid step for the optional uniqueness scan.
    pub scan_step: Option<f64>,
    pub max_probes: usize,
}

impl Default for CriticalOptions {
    fn default() -> Self {
        CriticalOptions {
            tol: DEFAULT_CRITICAL_TOL,
            scan_step: None,
            max_probes: 200,
        }
    }
}

pub fn critical_reversion_probability<T: Scalar>(
    g: &Graph,
    ss: &StateSpace,
    state: usize,
    tol: T,
) -> Result<CriticalProbability<T>> {
    critical_reversion_probability_with(
        g,
        ss,
        state,
        CriticalOptions {
            tol: tol.to_f64_lossy(),
            ..Default::default()
        },
    )
}

/// Bisection on `p` for the reversion probability where die-out and
/// full forcing are equally likely from `state`.
pub fn critical_reversion_probability_with<T: Scalar>(
    g: &Graph,
    ss: &StateSpace,
    state: usize,
    opts: CriticalOptions,
) -> Result<CriticalProbability<T>> {
    if opts.tol.is_nan() || opts.tol <= 0.0 {
        return Err(Error::domain("tolerance must be positive"));
    }
    let curve = DieOutCurve::<T>::new(g, ss, state)?;
    let half = T::of(0.5);
    let tol = T::of(opts.tol);
    let mut lo = T::of(BRACKET_LO);
    let mut hi = T::of(BRACKET_HI);
    let f_lo = curve.eval(lo)? - half;
    let f_hi = curve.eval(hi)? - half;
    let mut probes = 2;
    if !(f_lo < T::zero() && f_hi > T::zero()) {
        return Err(Error::Bracket(format!(
            "die-out probability minus 1/2 is {f_lo} at p={lo} and {f_hi} at p={hi}"
        )));
    }
    let (mut p, mut f) = if f_lo.abs() < f_hi.abs() { (lo, f_lo) } else { (hi, f_hi) };
    while probes < opts.max_probes {
        let mid = (lo + hi) * half;
        let fm = curve.eval(mid)? - half;
        probes += 1;
        p = mid;
        f = fm;
        if fm.abs() <= tol * T::of(1e-3) || hi - lo <= T::epsilon() * T::of(4.0) {
            break;
        }
        if fm < T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if f.abs() > tol {
        return Err(Error::Consistency(format!(
            "bisection stopped at p={p} with |c - 1/2| = {}",
            f.abs()
        )));
    }
    let scan_sign_changes = match opts.scan_step {
        Some(step) if step > 0.0 => {
            let mut changes = 0;
            let mut prev: Option<bool> = None;
            let mut x = step;
            while x < 1.0 {
                let above = curve.eval(T::of(x))? > half;
                if prev.is_some_and(|pv| pv != above) {
                    changes += 1;
                }
                prev = Some(above);
                x += step;
            }
            Some(changes)
        }
        _ => None,
    };
    Ok(CriticalProbability {
        p,
        die_out: f + half,
        probes,
        scan_sign_changes,
    })
}

/// Expected PZF propagation time from `start` using
/// `ept = ((M - 1 e_s^T - I)^{-1})_{start, s} + 1`, with `M` the phase-1
/// matrix restricted to the nonempty colorings.
pub fn pzf_expected_propagation_time<T: Scalar>(
    g: &Graph,
    ss: &StateSpace,
    start: usize,
) -> Result<T> {
    if start == 0 || start > ss.last() {
        return Err(Error::domain(format!(
            "start state {start} must be a nonempty coloring"
        )));
    }
    let f = crate::chain::build_forcing::<T>(g, ss)?;
    let s = ss.last();
    let m = f.block(1, s + 1, 1, s + 1);
    let dim = m.rows();
    let mut a = m;
    for i in 0..dim {
        a[(i, dim - 1)] = a[(i, dim - 1)] - T::one();
        a[(i, i)] = a[(i, i)] - T::one();
    }
    let mut e = vec![T::zero(); dim];
    e[dim - 1] = T::one();
    let y = Lu::factor(&a)?.solve_vec(&e)?;
    Ok(y[start - 1] + T::one())
}

/// `E_i[|X_1|] = sum_j |S_j| M_ij` for every state.
pub fn expected_blue_after_step<T: Scalar>(m: &Matrix<T>, ss: &StateSpace) -> Vec<T> {
    let counts: Vec<T> = ss.blue_counts().iter().map(|&k| T::of_usize(k)).collect();
    (0..m.rows())
        .map(|i| m.row(i).iter().zip(&counts).map(|(&a, &b)| a * b).sum())
        .collect()
}

/// `E_i[F_1]`, the expected number of vertices forced in phase 1.
pub fn expected_forced<T: Scalar>(f: &Matrix<T>, ss: &StateSpace) -> Vec<T> {
    expected_blue_after_step(f, ss)
        .into_iter()
        .enumerate()
        .map(|(i, e)| e - T::of_usize(ss.blue_count(i)))
        .collect()
}
