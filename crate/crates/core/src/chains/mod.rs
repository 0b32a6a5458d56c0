//! Finite regions of the tree, chain complexes of coefficient systems and the
//! checks built on them.

mod complex;
mod halftree;
mod local;
mod rank1;
pub mod region;

pub use complex::{chain_complex, compare_with_module, homology, invariants_complex, m_functor, ChainComplex, Check, MFunctor};
pub use region::{FaceRef, Region, RegionKind, Transport};
pub use rank1::{boundary_sweep, check_rank_one_exactness, check_tau_injective, fm_system, injects_into_h0, BoundarySweep};
pub use halftree::{act, check_etale_identity, halftree_h0, phi, psi, Chain, Contraction, HalfTreeReport, MonoidElt};
pub use local::check_locally_constant;
