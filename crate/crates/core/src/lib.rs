//! Pro-p Iwahori–Hecke algebras of rank-one groups, their parahoric
//! subalgebras and finite modules, and equivariant coefficient systems on
//! truncated Bruhat–Tits trees, all computed exactly over Z/m.

pub mod chains;
pub mod coeff;
pub mod error;
pub mod hecke;
pub mod parahoric;
pub mod ring_linalg;
pub mod verify;
pub mod weyl;

pub use error::{Error, Result};
pub use hecke::{HeckeElt, HeckeModule, Scope};
pub use ring_linalg::{Matrix, ModuleMap, Order, PresentedModule, Zm};
pub use weyl::{Face, GroupData, GroupKind, Letter, Torus, WeylElt, Word};
