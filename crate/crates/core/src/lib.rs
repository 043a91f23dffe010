//! Exact diagram calculus: uni-trivalent diagrams modulo AS/IHX, skeleton
//! diagrams modulo STU, formal Gaussian integration, and the BCH gluing
//! formula.

pub mod algebra;
pub mod bch;
pub mod canon;
pub mod checks;
pub mod diagram;
pub mod enumerate;
pub mod error;
pub mod gaussian;
pub mod grammar;
pub mod label;
pub mod linalg;
pub mod pipeline;
pub mod random;
pub mod reduce;
pub mod skeleton;
pub mod sum;

pub use canon::{canonicalize, CanonicalForm};
pub use diagram::{Diagram, End};
pub use error::{Error, Result};
pub use grammar::{parse_sum, print_sum};
pub use label::{dvar, var, Attach, LegKey, VarLabel};
pub use linalg::{signature, RatMatrix};
pub use reduce::{build_basis, reduce, Grade, GradedBasis};
pub use sum::{Caps, DiagramSum, LinComb, SkeletonSum};

/// Exact arbitrary-precision rationals used for every coefficient.
pub type Rational = num_rational::BigRational;

/// Builds the rational `n / d`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}
