//! Diagrams on the standard chamber, coefficient systems spread over tree
//! regions, and the apartment system of invariants.

mod diagram;
pub mod padic;
mod system;

pub use diagram::{Diagram, FaceCaches, FmDiagram};
pub use system::{apartment_system, check_category_c, spread, ApartmentSystem, CategoryReport, CoeffSystem, Transition};
pub(crate) use system::lift_rows;
