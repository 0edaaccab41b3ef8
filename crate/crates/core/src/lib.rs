//! Exact-arithmetic toolkit for monoidal complexes and the toric varieties
//! they define: normality properties (seminormal, weakly normal, S2),
//! classification of invariant log structures (weakly normal log pairs,
//! weakly log canonical, semi-log canonical), lc centers, differents and
//! residue data.
//!
//! The linear-algebra kernel is generic over an integer scalar (see
//! [`num::LatInt`]); the pipeline types are fixed to the arbitrary-precision
//! aliases below. Nothing in the crate uses floating point.
//!
//! ```
//! use facering::complex::coordinate_arrangement;
//! use facering::logpair::{classify, Boundary};
//! use facering::residue::lcs_chain;
//!
//! // the three coordinate planes in affine 3-space
//! let mc = coordinate_arrangement(3, 1);
//! let report = classify(&mc, &Boundary::zero(), 4).unwrap();
//! assert!(report.is_wlc);
//! assert!(report.is_slc);
//! assert!(report.invertibility_orders.contains(&2));
//!
//! // restricting to the LCS locus walks down the coordinate filtration
//! let steps = lcs_chain(&mc, &Boundary::zero(), 2).unwrap();
//! assert_eq!(steps.len(), 3);
//! ```

pub mod complex;
pub mod cone;
pub mod field;
pub mod fixtures;
pub mod lattice;
pub mod logpair;
pub mod mat;
pub mod normality;
pub mod num;
pub mod residue;

/// Kernel integer used by all pipeline types.
pub type Int = num_bigint::BigInt;
/// Exact rational over [`Int`].
pub type Rat = num_rational::Ratio<Int>;

pub type IMat = mat::Mat<Int>;
pub type Lattice = lattice::Sublattice<Int>;
pub type Cone = cone::RationalCone<Int>;
