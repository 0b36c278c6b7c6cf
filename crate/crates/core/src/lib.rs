//! Orthogonal polynomials from moment sequences.
//!
//! A normalized moment sequence determines a positive-definite Hankel matrix
//! `M_n`. Its Cholesky factor `L_n` and the inverse `Π_n = L_n⁻¹` carry the
//! whole orthonormal polynomial system: row `k` of `Π_n` lists the
//! coefficients of `p_k`, row `k` of `L_n` expresses `x^k` in the `p`'s.
//! Everything else in the crate (three-term recurrences, connection and
//! linearization coefficients, Fourier expansions of Radon–Nikodym
//! derivatives) is assembled from products of such triangular tables.
//!
//! All algorithms run on either backend of [`Scalar`]: `f64`, or the exact
//! [`Surd`] type.

pub mod cholesky;
pub mod connect;
pub mod error;
pub mod io;
pub mod linalg;
pub mod linearize;
pub mod moments;
pub mod polysys;
pub mod qkernel;
pub mod recurrence;
pub mod scalar;

#[cfg(test)]
mod testing;

pub use cholesky::{cholesky_decompose, invert_lower_triangular, TableRole, TriangularTable};
pub use connect::{connection_table, rn_expansion, ribbon_check, Basis, ConnectionTable, RibbonReport, RnExpansion};
pub use error::{Error, Result};
pub use io::{MomentFile, Mode, RecFile};
pub use linearize::{linearization_table, LinearizationTable};
pub use moments::{hankel_matrix, make_moments, Family, FamilySpec, HankelMoments, MomentSequence};
pub use polysys::{build_system, PolynomialSystem, RecurrenceCoefficients};
pub use recurrence::{eta_table, moments_from_recurrence, tau_table, verify_closed_forms};
pub use scalar::{Scalar, Surd};
