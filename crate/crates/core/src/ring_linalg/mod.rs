//! Exact linear algebra over Z/m and finitely presented Z/m-modules.

mod action;
mod howell;
mod matrix;
mod module;
mod solve;
mod zmod;

pub use action::{double_dual_map, module_dual, module_hom_space, module_tensor, ActionModule, HomSpace};
pub use howell::{howell_form, Howell};
pub use matrix::Matrix;
pub use module::{ModuleMap, PresentedModule};
pub use solve::{left_kernel, preimage, solve_linear, solve_many, Solution};
pub use zmod::{factorize, gcd, is_prime, Order, Zm};
