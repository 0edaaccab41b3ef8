//! Scalar abstraction for the exact kernel.
//!
//! All lattice and cone computations are generic over an integer scalar
//! implementing [`LatInt`]; rational data uses `Ratio<T>` over the same
//! scalar. The crate root fixes the default instantiation to
//! arbitrary-precision integers, which every public pipeline type uses.
//! Fixed-width instantiations (`i64`, `i128`) are useful for small
//! cross-check oracles in tests.

use std::fmt::{Debug, Display};
use std::hash::Hash;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Signed, Zero};

/// Integer scalar usable by the exact kernel.
pub trait LatInt: Integer + Signed + Clone + Hash + Debug + Display + From<i32> + 'static {}

impl<T> LatInt for T where T: Integer + Signed + Clone + Hash + Debug + Display + From<i32> + 'static
{}

/// Rational scalar over a kernel integer.
pub type RatOf<T> = Ratio<T>;

pub fn int<T: LatInt>(v: i32) -> T {
    T::from(v)
}

pub fn rat<T: LatInt>(num: i32, den: i32) -> RatOf<T> {
    Ratio::new(T::from(num), T::from(den))
}

/// Exact inner product of two integer vectors.
pub fn dot<T: LatInt>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = T::zero();
    for (x, y) in a.iter().zip(b) {
        acc = acc + x.clone() * y.clone();
    }
    acc
}

/// Inner product of an integer vector with a rational vector.
pub fn dot_rat<T: LatInt>(a: &[T], b: &[RatOf<T>]) -> RatOf<T> {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = RatOf::<T>::zero();
    for (x, y) in a.iter().zip(b) {
        acc = acc + RatOf::from_integer(x.clone()) * y.clone();
    }
    acc
}

/// Divides a vector by the gcd of its entries; the zero vector is unchanged.
/// The sign convention makes the first nonzero entry positive when `orient`
/// is set.
pub fn primitive<T: LatInt>(v: &[T], orient: bool) -> Vec<T> {
    let mut g = T::zero();
    for x in v {
        g = g.gcd(x);
    }
    if g.is_zero() {
        return v.to_vec();
    }
    let mut out: Vec<T> = v.iter().map(|x| x.clone() / g.clone()).collect();
    if orient {
        if let Some(first) = out.iter().find(|x| !x.is_zero()) {
            if first.is_negative() {
                for x in &mut out {
                    *x = -x.clone();
                }
            }
        }
    }
    out
}

/// Content (gcd of entries) of a vector, nonnegative.
pub fn content<T: LatInt>(v: &[T]) -> T {
    let mut g = T::zero();
    for x in v {
        g = g.gcd(x);
    }
    g
}

pub fn neg_vec<T: LatInt>(v: &[T]) -> Vec<T> {
    v.iter().map(|x| -x.clone()).collect()
}

pub fn is_zero_vec<T: LatInt>(v: &[T]) -> bool {
    v.iter().all(|x| x.is_zero())
}

/// Clears denominators: maps a rational vector to the primitive integer
/// vector on the same ray (requires a nonzero input direction to be useful).
pub fn clear_denominators<T: LatInt>(v: &[RatOf<T>]) -> Vec<T> {
    let mut lcm = T::one();
    for x in v {
        lcm = lcm.lcm(x.denom());
    }
    let ints: Vec<T> = v
        .iter()
        .map(|x| x.numer().clone() * (lcm.clone() / x.denom().clone()))
        .collect();
    ints
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    #[test]
    fn primitive_orients_first_entry() {
        let v: Vec<BigInt> = vec![(-4).into(), 6.into()];
        assert_eq!(primitive(&v, true), vec![BigInt::from(2), (-3).into()]);
        assert_eq!(primitive(&v, false), vec![BigInt::from(-2), 3.into()]);
    }

    #[test]
    fn dot_small() {
        let a: Vec<i64> = vec![2, -1];
        let b: Vec<i64> = vec![1, 1];
        assert_eq!(dot(&a, &b), 1);
    }
}
