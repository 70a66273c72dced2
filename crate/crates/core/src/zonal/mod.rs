//! Partitions, zonal polynomials and series of matrix argument.
//!
//! Every function here takes a symmetric matrix through its eigenvalues;
//! zonal polynomials are orthogonally invariant so nothing else is needed.

mod binomial;
mod hypergeom;
mod partition;
mod table;

pub use binomial::{gen_binomial, gen_binomials, gen_laguerre, BinomialRow};
pub use hypergeom::{gen_pochhammer, hypergeometric_pfq, zonal_series, SeriesValue};
pub use partition::{partitions, Partition};
pub use table::{monomial, table, zonal, ZonalTable, MAX_TABLE_DEGREE};

/// Default truncation degree for zonal series.
pub const DEFAULT_MAX_DEGREE: usize = 8;
