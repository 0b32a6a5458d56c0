//! Finite reductive quotients at the faces of the standard chamber, their
//! representations, and the passage between `H_F`-modules and representations.

mod face_functor;
mod frobenius;
mod group;
mod rep;

pub use face_functor::{t_functor, tau_map, TfResult, TfCache};
pub use frobenius::{frobenius_matrix, FrobeniusMatrix, GroupRing};
pub use group::{FiniteQuotient, Mat2};
pub use rep::{universal_module, ConditionH, FiniteRep, Universal};
