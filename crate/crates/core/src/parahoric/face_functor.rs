use std::sync::Arc;

use super::group::FiniteQuotient;
use super::rep::{universal_module, FiniteRep, Universal};
use crate::error::{Error, Result};
use crate::hecke::{HeckeModule, Scope};
use crate::ring_linalg::{module_hom_space, module_tensor, ActionModule, Matrix, ModuleMap, PresentedModule, Zm};
use crate::weyl::Face;

/// Data of `t_F` that does not depend on the module: `Y = X_F` as a right
/// `S = H_F`-module and generators `φ_i` of `Hom_S(Y, S)`.
#[derive(Debug, Clone)]
pub struct TfCache {
    pub universal: Universal,
    pub phis: Vec<Matrix>,
}

impl TfCache {
    pub fn new(group: Arc<FiniteQuotient>, ring: Zm) -> Result<Self> {
        let universal = universal_module(group, ring)?;
        let y = universal.right_module()?;
        let alg = &universal.algebra;
        let s = ActionModule::new(
            PresentedModule::free(ring, alg.rank()),
            alg.generator_vectors().iter().map(|g| alg.right_regular(g)).collect(),
        )?;
        let phis = module_hom_space(&y, &s)?.maps;
        Ok(TfCache { universal, phis })
    }

    pub fn group(&self) -> &Arc<FiniteQuotient> {
        &self.universal.rep.group
    }

    pub fn ring(&self) -> Zm {
        self.universal.rep.ring()
    }

    /// For every `(i, j)` the matrix of `m ↦ φ_i(δ_j)·m` on the module.
    fn blocks(&self, m: &HeckeModule) -> Result<Vec<Vec<Matrix>>> {
        let alg = &self.universal.algebra;
        let acts = alg
            .basis()
            .iter()
            .map(|w| m.basis_action(w))
            .collect::<Result<Vec<_>>>()?;
        let ny = self.universal.rep.rank();
        let ring = self.ring();
        Ok(self
            .phis
            .iter()
            .map(|phi| {
                (0..ny)
                    .map(|j| {
                        let mut acc = Matrix::zeros(ring, m.rank(), m.rank());
                        for (w, a) in acts.iter().enumerate() {
                            let c = phi.get(j, w);
                            if c != 0 {
                                acc = acc.add(&a.scale(c)).expect("square");
                            }
                        }
                        acc
                    })
                    .collect()
            })
            .collect())
    }

    /// Matrix of `δ_j ⊗ m_b ↦ (φ_i(δ_j)·m_b)_i` on generators `(j, b)`.
    fn tau_matrix(&self, m: &HeckeModule) -> Result<Matrix> {
        let blocks = self.blocks(m)?;
        let ny = self.universal.rep.rank();
        let rm = m.rank();
        let r = self.phis.len();
        let mut big = Matrix::zeros(self.ring(), ny * rm, r * rm);
        for (i, per_j) in blocks.iter().enumerate() {
            for (j, b) in per_j.iter().enumerate() {
                for x in 0..rm {
                    for y in 0..rm {
                        big.set(j * rm + x, i * rm + y, b.get(x, y));
                    }
                }
            }
        }
        Ok(big)
    }

    fn check_module(&self, m: &HeckeModule) -> Result<()> {
        let g = self.group();
        if m.gd != g.group() {
            return Err(Error::GroupMismatch);
        }
        if m.ring() != self.ring() {
            return Err(Error::RingMismatch(m.ring().modulus(), self.ring().modulus()));
        }
        match m.scope {
            Scope::Face { face, .. } if face == g.face() => Ok(()),
            _ => Err(Error::AlgebraMismatch(format!("expected a module over H_{}", g.face()))),
        }
    }
}

impl Universal {
    /// `X_F` as an action module for the right `H_F`-action on the algebra generators.
    pub fn right_module(&self) -> Result<ActionModule> {
        let actions = self
            .algebra
            .generator_vectors()
            .iter()
            .map(|g| self.right_action(g))
            .collect();
        ActionModule::new(self.rep.carrier.clone(), actions)
    }
}

fn without_omega(m: &HeckeModule) -> HeckeModule {
    match m.scope {
        Scope::Face { face, dagger: true } => HeckeModule {
            scope: Scope::Face { face, dagger: false },
            omega: None,
            ..m.clone()
        },
        _ => m.clone(),
    }
}

/// `t_F(M)` with the canonical map `M → t_F(M)`, `m ↦ [δ_U ⊗ m]`.
#[derive(Debug, Clone)]
pub struct TfResult {
    pub rep: FiniteRep,
    pub canonical: ModuleMap,
    /// From generators `δ_j ⊗ m_b` (index `j·rank M + b`) to the carrier.
    pub from_tensor: Matrix,
    /// A lift of each carrier generator to the generators `δ_j ⊗ m_b`.
    pub to_tensor: Matrix,
}

impl TfResult {
    /// The canonical map as a map into the invariants, together with those invariants.
    pub fn canonical_into_invariants(&self) -> Result<(HeckeModule, ModuleMap)> {
        let (inv, incl) = self.rep.invariants()?;
        let mut mat = Matrix::zeros(self.rep.ring(), self.canonical.domain.rank(), inv.rank());
        for (i, row) in self.canonical.matrix.row_iter().enumerate() {
            let c = incl
                .lift(row)?
                .ok_or_else(|| Error::Internal("canonical image is not U-invariant".into()))?;
            mat.row_mut(i).copy_from_slice(&c);
        }
        let f = ModuleMap::new(self.canonical.domain.clone(), inv.carrier.clone(), mat)?;
        Ok((inv, f))
    }

    /// Whether `M → t_F(M)^U` is an isomorphism of modules over `H_F` (or `H_F^†`).
    pub fn check_round_trip(&self, m: &HeckeModule) -> Result<bool> {
        let (inv, f) = self.canonical_into_invariants()?;
        Ok(f.is_isomorphism() && m.is_linear_map_to(&inv, &f))
    }
}

/// The image of `τ_{M,F}: Y ⊗ M → Hom_S(Hom_S(Y, S), M) ⊆ M^r`.
pub fn t_functor(cache: &TfCache, m: &HeckeModule) -> Result<TfResult> {
    cache.check_module(m)?;
    let dagger = matches!(m.scope, Scope::Face { dagger: true, .. });
    let base = without_omega(m);
    let ring = cache.ring();
    let ny = cache.universal.rep.rank();
    let rm = base.rank();
    let copies = |k: usize| {
        let parts: Vec<&PresentedModule> = (0..k).map(|_| &base.carrier).collect();
        PresentedModule::direct_sum(ring, &parts)
    };
    let domain = copies(ny);
    let map = ModuleMap::new(domain.clone(), copies(cache.phis.len()), cache.tau_matrix(&base)?)?;
    let (image, _) = domain.quotient(&map.kernel_generators())?;
    let (small, fwd, back) = image.prune();
    let id = Matrix::identity(ring, rm);
    let action = cache
        .universal
        .rep
        .action
        .iter()
        .map(|p| back.matrix.mul(&p.kron(&id)?)?.mul(&fwd.matrix))
        .collect::<Result<Vec<_>>>()?;
    let group = cache.group().clone();
    let (coset, _) = group.unipotent_cosets();
    let j0 = coset[group.identity()];
    let mut can = Matrix::zeros(ring, rm, ny * rm);
    for b in 0..rm {
        can.set(b, j0 * rm + b, 1);
    }
    let canonical = ModuleMap::new(base.carrier.clone(), small.clone(), can.mul(&fwd.matrix)?)?;
    let mut rep = FiniteRep::new(group, small, action, None)?;
    if dagger {
        // transport τ_ω through the canonical isomorphism M ≅ t_C(M)
        if cache.group().face() != Face::C {
            return Err(Error::Unsupported("Ω_F acts only at the chamber".into()));
        }
        let inv = canonical.inverse()?;
        let om = m.omega.as_ref().ok_or_else(|| Error::InvalidInput("missing τ_ω".into()))?;
        rep = FiniteRep::new(rep.group.clone(), rep.carrier.clone(), rep.action.clone(), Some(inv.matrix.mul(om)?.mul(&canonical.matrix)?))?;
    }
    Ok(TfResult {
        rep,
        canonical,
        from_tensor: fwd.matrix,
        to_tensor: back.matrix,
    })
}

/// `τ_{M,F}` on the honest tensor product `Y ⊗_S M`.
pub fn tau_map(cache: &TfCache, m: &HeckeModule) -> Result<ModuleMap> {
    cache.check_module(m)?;
    let base = without_omega(m);
    let tensor = module_tensor(&cache.universal.right_module()?, &base.action_module())?;
    let parts: Vec<&PresentedModule> = (0..cache.phis.len()).map(|_| &base.carrier).collect();
    let target = PresentedModule::direct_sum(cache.ring(), &parts);
    ModuleMap::new(tensor, target, cache.tau_matrix(&base)?)
}
