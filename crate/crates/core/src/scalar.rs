use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating point scalar used by every matrix and closed-form routine.
///
/// Implemented for `f32` and `f64`. The crate root exposes `f64` aliases for
/// the common types.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Lossy conversion from `f64`; panics only for types that cannot
    /// represent ordinary finite constants, which neither `f32` nor `f64` do.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64 constant representable in scalar type")
    }

    fn of_usize(k: usize) -> Self {
        Self::from_usize(k).expect("integer representable in scalar type")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// `base^exp` with the convention `0^0 = 1`.
pub fn powi<T: Scalar>(base: T, exp: usize) -> T {
    if exp == 0 {
        return T::one();
    }
    match i32::try_from(exp) {
        Ok(e) => base.powi(e),
        Err(_) => base.powf(T::of_usize(exp)),
    }
}

/// Binomial coefficient in floating point, multiplicative form.
pub fn binomial<T: Scalar>(n: usize, k: usize) -> T {
    if k > n {
        return T::zero();
    }
    let k = k.min(n - k);
    let mut acc = T::one();
    for i in 1..=k {
        acc = acc * T::of_usize(n - k + i) / T::of_usize(i);
    }
    acc
}

/// Natural log of the binomial coefficient, summed term by term so that it
/// stays finite far beyond where `binomial` overflows.
pub fn ln_binomial<T: Scalar>(n: usize, k: usize) -> T {
    if k > n {
        return T::neg_infinity();
    }
    let k = k.min(n - k);
    (1..=k)
        .map(|i| (T::of_usize(n - k + i) / T::of_usize(i)).ln())
        .fold(T::zero(), |a, b| a + b)
}

/// `C(n,k) x^k (1-x)^(n-k)`, evaluated in log-space when the direct product
/// would under- or overflow.
pub fn binomial_pmf<T: Scalar>(n: usize, k: usize, x: T) -> T {
    if k > n {
        return T::zero();
    }
    let direct = n <= 60;
    if direct {
        return binomial::<T>(n, k) * powi(x, k) * powi(T::one() - x, n - k);
    }
    if (x == T::zero() && k > 0) || (x == T::one() && k < n) {
        return T::zero();
    }
    let mut ln = ln_binomial::<T>(n, k);
    if k > 0 {
        ln = ln + T::of_usize(k) * x.ln();
    }
    if n - k > 0 {
        ln = ln + T::of_usize(n - k) * (-x).ln_1p();
    }
    ln.exp()
}
