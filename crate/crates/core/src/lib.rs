//! Exact exterior calculus on model contact charts and their conformally
//! symplectic quotients: Rumin complexes, their push-downs, the intrinsic
//! Rumin–Seshadri complex and the associated long exact sequences.

pub mod coefficients;
pub mod cohomology;
pub mod contact;
pub mod descent;
pub mod error;
pub mod forms;
pub mod grading;
pub mod lefschetz;
pub mod linalg;
pub mod operator;
pub mod rumin;
pub mod sections;

pub use coefficients::{Coefficient, Poly, Rational, Ring, Trig};
pub use error::{Error, Result};
pub use forms::{DifferentialForm, MultiIndex, PolyVectorField};
