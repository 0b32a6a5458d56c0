use std::sync::Arc;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::hecke::{restrict_module, HeckeModule, Scope};
use crate::parahoric::{t_functor, FiniteQuotient, FiniteRep, TfCache, TfResult};
use crate::ring_linalg::{Matrix, ModuleMap, PresentedModule, Zm};
use crate::weyl::{Face, GroupData, GroupKind};

/// Representations at the faces of the standard chamber with restriction maps.
///
/// Vertex data is indexed by type: 0 = x0, 1 = x1.
#[derive(Debug, Clone)]
pub struct Diagram {
    pub gd: GroupData,
    pub ring: Zm,
    pub chamber: FiniteRep,
    pub vertices: [FiniteRep; 2],
    /// `r^C_x: D_C → D_x`.
    pub restriction: [ModuleMap; 2],
    /// `c_ω: D_x0 → D_x1` and `c_ω: D_x1 → D_x0` (PGL2 only).
    pub omega_vertex: Option<[ModuleMap; 2]>,
}

/// Per-face `t_F` caches for one group and ring.
#[derive(Debug, Clone)]
pub struct FaceCaches {
    pub gd: GroupData,
    pub ring: Zm,
    pub vertices: [TfCache; 2],
    pub chamber: TfCache,
}

impl FaceCaches {
    pub fn new(gd: GroupData, ring: Zm) -> Result<Self> {
        let cache = |f: Face| -> Result<TfCache> { TfCache::new(Arc::new(FiniteQuotient::new(gd, f)?), ring) };
        Ok(FaceCaches {
            gd,
            ring,
            vertices: [cache(Face::X0)?, cache(Face::X1)?],
            chamber: cache(Face::C)?,
        })
    }
}

/// `F(M)` on the standard chamber, with the `t_F` data it was built from.
#[derive(Debug, Clone)]
pub struct FmDiagram {
    pub diagram: Diagram,
    pub vertex_tf: [TfResult; 2],
    pub chamber_tf: TfResult,
}

fn check_kind(gd: &GroupData) -> Result<()> {
    if gd.kind() == GroupKind::Gl2 {
        return Err(Error::Unsupported("diagrams need a finite Ω; GL2 is not supported".into()));
    }
    Ok(())
}

fn identity_action(group: &FiniteQuotient, ring: Zm, n: usize) -> Vec<Matrix> {
    vec![Matrix::identity(ring, n); group.order()]
}

/// The element `J = [[0, 1], [1, 0]]` relating the two vertex quotients under ω.
fn swap_index(group: &FiniteQuotient) -> usize {
    group.find([[0, 1], [1, 0]]).expect("J lies in GL2/center")
}

impl Diagram {
    /// `F(M)`: `D_F = t_F(M|_{H_F})` with restrictions `[δ_U ⊗ m] ↦ [δ_U ⊗ m]`.
    pub fn from_hecke_module(m: &HeckeModule, caches: &FaceCaches) -> Result<FmDiagram> {
        let gd = m.gd;
        check_kind(&gd)?;
        if m.scope != Scope::Full {
            return Err(Error::AlgebraMismatch("F(M) needs a module over H".into()));
        }
        let pgl2 = gd.kind() == GroupKind::Pgl2;
        let tf = |face: Face, cache: &TfCache, dagger: bool| -> Result<TfResult> {
            t_functor(cache, &restrict_module(m, face, dagger)?)
        };
        let t0 = tf(Face::X0, &caches.vertices[0], false)?;
        let t1 = tf(Face::X1, &caches.vertices[1], false)?;
        let tc = tf(Face::C, &caches.chamber, pgl2)?;
        let c_inv = tc.canonical.inverse()?;
        let restriction = [c_inv.then(&t0.canonical)?, c_inv.then(&t1.canonical)?];
        let omega_vertex = if pgl2 {
            let om = m.omega.as_ref().ok_or_else(|| Error::InvalidInput("PGL2 module without τ_ω".into()))?;
            Some([omega_transfer(&t0, &t1, om)?, omega_transfer(&t1, &t0, om)?])
        } else {
            None
        };
        let diagram = Diagram {
            gd,
            ring: m.ring(),
            chamber: tc.rep.clone(),
            vertices: [t0.rep.clone(), t1.rep.clone()],
            restriction,
            omega_vertex,
        };
        diagram.validate()?;
        Ok(FmDiagram {
            diagram,
            vertex_tf: [t0, t1],
            chamber_tf: tc,
        })
    }

    /// The constant diagram with value `R`.
    pub fn constant(gd: GroupData, ring: Zm) -> Result<Diagram> {
        Self::scalar(gd, PresentedModule::free(ring, 1))
    }

    pub fn zero(gd: GroupData, ring: Zm) -> Result<Diagram> {
        Self::scalar(gd, PresentedModule::zero(ring))
    }

    fn scalar(gd: GroupData, module: PresentedModule) -> Result<Diagram> {
        check_kind(&gd)?;
        let ring = module.ring();
        let n = module.rank();
        let rep = |face: Face, omega: Option<Matrix>| -> Result<FiniteRep> {
            let g = Arc::new(FiniteQuotient::new(gd, face)?);
            let action = identity_action(&g, ring, n);
            FiniteRep::new(g, module.clone(), action, omega)
        };
        let pgl2 = gd.kind() == GroupKind::Pgl2;
        let id = ModuleMap::identity(&module);
        let d = Diagram {
            gd,
            ring,
            chamber: rep(Face::C, pgl2.then(|| Matrix::identity(ring, n)))?,
            vertices: [rep(Face::X0, None)?, rep(Face::X1, None)?],
            restriction: [id.clone(), id.clone()],
            omega_vertex: pgl2.then(|| [id.clone(), id]),
        };
        d.validate()?;
        Ok(d)
    }

    /// Equivariance of the restrictions and compatibility of the Ω data.
    pub fn validate(&self) -> Result<()> {
        let fail = |what: String| Error::RelationViolated {
            relation: what,
            witness: vec![],
        };
        let torus_c = self.chamber.group.torus();
        for (x, r) in self.restriction.iter().enumerate() {
            let v = &self.vertices[x];
            for (i, &tv) in v.group.torus().iter().enumerate() {
                let lhs = self.chamber.action[torus_c[i]].mul(&r.matrix)?;
                let rhs = r.matrix.mul(&v.action[tv])?;
                if !ModuleMap::new(r.domain.clone(), r.codomain.clone(), lhs.sub(&rhs)?)?.is_zero() {
                    return Err(fail(format!("restriction to x{x} commutes with the torus")));
                }
            }
            for &u in v.group.unipotent() {
                let moved = r.matrix.mul(&v.action[u])?;
                if !ModuleMap::new(r.domain.clone(), r.codomain.clone(), moved.sub(&r.matrix)?)?.is_zero() {
                    return Err(fail(format!("restriction to x{x} lands in U-invariants")));
                }
            }
        }
        match (&self.omega_vertex, self.gd.kind()) {
            (None, GroupKind::Pgl2) => return Err(fail("PGL2 diagram carries ω".into())),
            (Some(_), k) if k != GroupKind::Pgl2 => return Err(Error::Unsupported("ω data outside PGL2".into())),
            _ => {}
        }
        if let Some(cw) = &self.omega_vertex {
            let om_c = self
                .chamber
                .omega
                .as_ref()
                .ok_or_else(|| fail("PGL2 chamber carries ω".into()))?;
            for x in 0..2 {
                let (src, dst) = (&self.vertices[x], &self.vertices[1 - x]);
                let j = swap_index(&src.group);
                for g in 0..src.group.order() {
                    let jgj = dst.group.mul(dst.group.mul(j, g), j);
                    let lhs = src.action[g].mul(&cw[x].matrix)?;
                    let rhs = cw[x].matrix.mul(&dst.action[jgj])?;
                    if !ModuleMap::new(cw[x].domain.clone(), cw[x].codomain.clone(), lhs.sub(&rhs)?)?.is_zero() {
                        return Err(fail("c_ω(g·v) = ωgω⁻¹·c_ω(v)".into()));
                    }
                }
                let lhs = om_c.mul(&self.restriction[1 - x].matrix)?;
                let rhs = self.restriction[x].matrix.mul(&cw[x].matrix)?;
                let r = &self.restriction[1 - x];
                if !ModuleMap::new(r.domain.clone(), r.codomain.clone(), lhs.sub(&rhs)?)?.is_zero() {
                    return Err(fail("r∘τ_ω = c_ω∘r".into()));
                }
            }
            if !cw[0].then(&cw[1])?.agrees_with(&ModuleMap::identity(&self.vertices[0].carrier)) {
                return Err(fail("c_ω∘c_ω = 1".into()));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        let rep_json = |r: &FiniteRep| {
            let gens: Vec<Value> = r
                .group
                .generators()
                .into_iter()
                .map(|g| {
                    let m = r.group.element(g);
                    json!({"element": [m[0][0], m[0][1], m[1][0], m[1][1]], "matrix": r.action[g].to_rows()})
                })
                .collect();
            json!({
                "rank": r.carrier.rank(),
                "relations": r.carrier.relations().to_rows(),
                "generators": gens,
                "omega": r.omega.as_ref().map(|m| m.to_rows()),
            })
        };
        json!({
            "group": {"kind": self.gd.kind().name(), "q": self.gd.q()},
            "ring": format!("zmod:{}", self.ring.modulus()),
            "x0": rep_json(&self.vertices[0]),
            "x1": rep_json(&self.vertices[1]),
            "C": rep_json(&self.chamber),
            "restriction": {"x0": self.restriction[0].matrix.to_rows(), "x1": self.restriction[1].matrix.to_rows()},
            "omega_vertex": self.omega_vertex.as_ref().map(|c| json!({"x0": c[0].matrix.to_rows(), "x1": c[1].matrix.to_rows()})),
        })
    }
}

/// `c_ω: t_x(M) → t_y(M)`, `[g δ_U ⊗ m] ↦ [J g J δ_{U'} ⊗ τ_ω m]`.
fn omega_transfer(src: &TfResult, dst: &TfResult, om: &Matrix) -> Result<ModuleMap> {
    let (gs, gt) = (&src.rep.group, &dst.rep.group);
    let ring = om.ring();
    let rm = om.rows();
    let (_, reps) = gs.unipotent_cosets();
    let (coset_t, _) = gt.unipotent_cosets();
    let j = swap_index(gs);
    let n = reps.len() * rm;
    let mut pre = Matrix::zeros(ring, n, n);
    for (a, &g) in reps.iter().enumerate() {
        let b = coset_t[gt.mul(gt.mul(j, g), j)];
        for x in 0..rm {
            for y in 0..rm {
                pre.set(a * rm + x, b * rm + y, om.get(x, y));
            }
        }
    }
    let mat = src.to_tensor.mul(&pre)?.mul(&dst.from_tensor)?;
    ModuleMap::new(src.rep.carrier.clone(), dst.rep.carrier.clone(), mat)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hecke::random::random_module;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn constant_and_zero() {
        for kind in [GroupKind::Sl2, GroupKind::Pgl2] {
            let gd = GroupData::new(kind, 3).unwrap();
            Diagram::constant(gd, Zm::new(4).unwrap()).unwrap();
            Diagram::zero(gd, Zm::new(4).unwrap()).unwrap();
        }
        let gd = GroupData::new(GroupKind::Gl2, 2).unwrap();
        assert!(matches!(Diagram::constant(gd, Zm::new(2).unwrap()), Err(Error::Unsupported(_))));
    }

    #[test]
    fn fm_diagrams_validate() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for (kind, q, m) in [(GroupKind::Sl2, 2, 2), (GroupKind::Pgl2, 3, 9), (GroupKind::Pgl2, 2, 4), (GroupKind::Sl2, 3, 9)] {
            let gd = GroupData::new(kind, q).unwrap();
            let ring = Zm::new(m).unwrap();
            let caches = FaceCaches::new(gd, ring).unwrap();
            for _ in 0..3 {
                let md = random_module(gd, ring, Scope::Full, 2, &mut rng).unwrap();
                let fm = Diagram::from_hecke_module(&md, &caches).unwrap();
                for t in &fm.vertex_tf {
                    assert!(t.check_round_trip(&restrict_module(&md, t.rep.group.face(), false).unwrap()).unwrap());
                }
            }
        }
    }

    #[test]
    fn trivial_character_ranks() {
        let gd = GroupData::new(GroupKind::Sl2, 2).unwrap();
        let ring = Zm::new(2).unwrap();
        let m = HeckeModule {
            gd,
            scope: Scope::Full,
            carrier: PresentedModule::free(ring, 1),
            torus: vec![],
            s0: Some(Matrix::zeros(ring, 1, 1)),
            s1: Some(Matrix::zeros(ring, 1, 1)),
            omega: None,
        };
        m.validate().unwrap();
        let fm = Diagram::from_hecke_module(&m, &FaceCaches::new(gd, ring).unwrap()).unwrap();
        assert!(fm.diagram.vertices.iter().all(|v| v.rank() <= 3));
        assert_eq!(fm.diagram.chamber.rank(), 1);
    }
}
