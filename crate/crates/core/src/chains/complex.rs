use serde::Serialize;

use crate::coeff::{apartment_system, lift_rows, ApartmentSystem, CoeffSystem, FmDiagram};
use crate::error::{Error, Result};
use crate::hecke::{HeckeModule, Scope};
use crate::ring_linalg::{Matrix, ModuleMap, PresentedModule};
use crate::weyl::GroupKind;

/// A two-term complex `C_1 → C_0` of oriented chains, block by face.
#[derive(Debug, Clone)]
pub struct ChainComplex {
    pub c1: PresentedModule,
    pub c0: PresentedModule,
    pub boundary: ModuleMap,
    /// `(chamber id, first coordinate)` of each degree-one block.
    pub chamber_blocks: Vec<(usize, usize)>,
    /// `(vertex id, first coordinate)` of each degree-zero block.
    pub vertex_blocks: Vec<(usize, usize)>,
}

impl ChainComplex {
    pub fn vertex_offset(&self, v: usize) -> Option<usize> {
        self.vertex_blocks.iter().find(|b| b.0 == v).map(|b| b.1)
    }

    pub fn chamber_offset(&self, c: usize) -> Option<usize> {
        self.chamber_blocks.iter().find(|b| b.0 == c).map(|b| b.1)
    }
}

/// One named check with its outcome.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub anchor: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl Check {
    pub fn new(name: impl Into<String>, anchor: impl Into<String>, pass: bool) -> Check {
        Check {
            name: name.into(),
            anchor: anchor.into(),
            pass,
            witness: None,
        }
    }

    pub fn with_witness(mut self, w: Option<String>) -> Check {
        if !self.pass {
            self.witness = w;
        }
        self
    }
}

/// Assemble `∂₀` from per-chamber blocks `(chamber, [(vertex, sign, matrix)])`.
fn assemble(
    ring: crate::ring_linalg::Zm,
    chambers: &[(usize, &PresentedModule)],
    vertices: &[(usize, &PresentedModule)],
    blocks: impl Fn(usize) -> Result<Vec<(usize, Matrix)>>,
) -> Result<ChainComplex> {
    let mut chamber_blocks = Vec::new();
    let mut off = 0;
    for (c, m) in chambers {
        chamber_blocks.push((*c, off));
        off += m.rank();
    }
    let mut vertex_blocks = Vec::new();
    let mut voff = 0;
    for (v, m) in vertices {
        vertex_blocks.push((*v, voff));
        voff += m.rank();
    }
    let c1 = PresentedModule::direct_sum(ring, &chambers.iter().map(|c| c.1).collect::<Vec<_>>());
    let c0 = PresentedModule::direct_sum(ring, &vertices.iter().map(|v| v.1).collect::<Vec<_>>());
    let mut mat = Matrix::zeros(ring, off, voff);
    for &(c, row0) in &chamber_blocks {
        for (v, m) in blocks(c)? {
            let col0 = vertex_blocks
                .iter()
                .find(|b| b.0 == v)
                .map(|b| b.1)
                .ok_or_else(|| Error::Internal(format!("vertex {v} missing from the complex")))?;
            for i in 0..m.rows() {
                for j in 0..m.cols() {
                    mat.add_at(row0 + i, col0 + j, m.get(i, j));
                }
            }
        }
    }
    let boundary = ModuleMap::new(c1.clone(), c0.clone(), mat)?;
    Ok(ChainComplex {
        c1,
        c0,
        boundary,
        chamber_blocks,
        vertex_blocks,
    })
}

/// The oriented chain complex of a coefficient system over its whole region.
pub fn chain_complex(sys: &CoeffSystem) -> Result<ChainComplex> {
    let region = &sys.region;
    let chambers: Vec<(usize, &PresentedModule)> = (0..region.chambers.len())
        .map(|c| (c, &sys.diagram.chamber.carrier))
        .collect();
    let vertices: Vec<(usize, &PresentedModule)> = (0..region.vertices.len())
        .map(|v| (v, &sys.diagram.vertices[region.vertices[v].ty].carrier))
        .collect();
    assemble(sys.diagram.ring, &chambers, &vertices, |c| {
        let info = &region.chambers[c];
        (0..2)
            .map(|ty| {
                let v = info.vertices[ty];
                let r = sys.restriction(c, ty)?;
                Ok((v, if v == info.source { r } else { r.neg() }))
            })
            .collect()
    })
}

/// `H_1 = ker ∂₀` or `H_0 = coker ∂₀`, pruned.
pub fn homology(k: &ChainComplex, degree: usize) -> Result<PresentedModule> {
    match degree {
        0 => Ok(k.boundary.cokernel().0.prune().0),
        1 => Ok(k.boundary.kernel().0.prune().0),
        _ => Err(Error::InvalidInput(format!("no homology in degree {degree} for a two-term complex"))),
    }
}

/// The complex of invariant chains on the apartment, built from the transition maps.
pub fn invariants_complex(sys: &CoeffSystem) -> Result<(ChainComplex, ApartmentSystem)> {
    let ap = apartment_system(sys)?;
    let region = &sys.region;
    let chambers: Vec<(usize, &PresentedModule)> = ap
        .chambers
        .iter()
        .map(|&c| (c, &ap.chamber_invariants.0.carrier))
        .collect();
    let vertices: Vec<(usize, &PresentedModule)> = ap
        .vertices
        .iter()
        .map(|&v| (v, &ap.vertex_invariants[region.vertices[v].ty].0.carrier))
        .collect();
    let k = assemble(sys.diagram.ring, &chambers, &vertices, |c| {
        let info = &region.chambers[c];
        info.vertices
            .iter()
            .map(|&v| {
                let t = ap
                    .transition(c, v)
                    .ok_or_else(|| Error::Internal("missing transition".into()))?;
                let m = t.map.matrix.clone();
                Ok((v, if v == info.source { m } else { m.neg() }))
            })
            .collect()
    })?;
    Ok((k, ap))
}

/// `H_0` of the invariants complex with the transported algebra actions.
#[derive(Debug, Clone)]
pub struct MFunctor {
    pub module: HeckeModule,
    pub h1: PresentedModule,
    /// `ι_x: F^I_x → H_0` for the two standard vertices.
    pub iota: [ModuleMap; 2],
    pub iota_chamber: ModuleMap,
    pub checks: Vec<Check>,
}

impl MFunctor {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

fn conjugate(iota: &ModuleMap, iota_inv: &ModuleMap, a: &Matrix) -> Result<Matrix> {
    iota_inv.matrix.mul(a)?.mul(&iota.matrix)
}

fn maps_agree(a: &Matrix, b: &Matrix, target: &PresentedModule) -> Result<bool> {
    Ok(a.sub(b)?.row_iter().all(|r| target.is_zero_element(r)))
}

/// `M(F)`: `H_0` of the invariants complex on the apartment, with the actions of
/// every parahoric generator transported through `ι_F`.
pub fn m_functor(sys: &CoeffSystem) -> Result<MFunctor> {
    let gd = sys.diagram.gd;
    let (k, ap) = invariants_complex(sys)?;
    let mut checks = Vec::new();
    let h1 = homology(&k, 1)?;
    checks.push(Check::new("H1 vanishes", "acyclic.h1", h1.is_zero()));
    let (coker, proj) = k.boundary.cokernel();
    let (h0, fwd, _) = coker.prune();
    let to_h0 = proj.then(&fwd)?;
    let iota_of = |ty: usize| -> Result<ModuleMap> {
        let off = k
            .vertex_offset(ty)
            .ok_or_else(|| Error::Internal("standard vertex missing from the apartment".into()))?;
        let n = ap.vertex_invariants[ty].0.rank();
        let rows: Vec<usize> = (off..off + n).collect();
        ModuleMap::new(ap.vertex_invariants[ty].0.carrier.clone(), h0.clone(), to_h0.matrix.select_rows(&rows))
    };
    let iota = [iota_of(0)?, iota_of(1)?];
    for (ty, map) in iota.iter().enumerate() {
        checks.push(
            Check::new(format!("iota_x{ty} bijective"), "acyclic.iota", map.is_isomorphism())
                .with_witness(map.kernel_witness().map(|w| format!("kernel element {w:?}"))),
        );
    }
    let t_c = |ty: usize| -> Result<&ModuleMap> {
        ap.transition(0, ty)
            .map(|t| &t.map)
            .ok_or_else(|| Error::Internal("missing transition at C".into()))
    };
    let iota_chamber = t_c(0)?.then(&iota[0])?;
    let via_x1 = t_c(1)?.then(&iota[1])?;
    checks.push(Check::new(
        "iota_C = iota_x . t^C_x for both vertices",
        "acyclic.iota_chamber",
        iota_chamber.agrees_with(&via_x1),
    ));
    if !iota.iter().all(|m| m.is_isomorphism()) {
        return Err(Error::RelationViolated {
            relation: "ι_x is not bijective; the system is outside category C".into(),
            witness: iota[0].kernel_witness().unwrap_or_default(),
        });
    }
    let inv = [iota[0].inverse()?, iota[1].inverse()?];
    let (m0, m1) = (&ap.vertex_invariants[0].0, &ap.vertex_invariants[1].0);
    let torus0: Vec<Matrix> = m0
        .torus
        .iter()
        .map(|a| conjugate(&iota[0], &inv[0], a))
        .collect::<Result<_>>()?;
    let mut torus_agree = true;
    for (a, b) in torus0.iter().zip(&m1.torus) {
        torus_agree &= maps_agree(a, &conjugate(&iota[1], &inv[1], b)?, &h0)?;
    }
    checks.push(Check::new("torus actions agree on H0", "acyclic.torus", torus_agree));
    let s0 = conjugate(&iota[0], &inv[0], m0.s0.as_ref().expect("H_x0 has τ_s0"))?;
    let s1 = conjugate(&iota[1], &inv[1], m1.s1.as_ref().expect("H_x1 has τ_s1"))?;
    let omega = if gd.kind() == GroupKind::Pgl2 {
        let om = ap
            .chamber_invariants
            .0
            .omega
            .as_ref()
            .ok_or_else(|| Error::Internal("chamber invariants lack τ_ω".into()))?;
        let iota_c_inv = iota_chamber.inverse()?;
        let a = conjugate(&iota_chamber, &iota_c_inv, om)?;
        checks.push(equivariance_check(sys, &ap, &iota, &a, &h0)?);
        Some(a)
    } else {
        None
    };
    let module = HeckeModule {
        gd,
        scope: Scope::Full,
        carrier: h0,
        torus: torus0,
        s0: Some(s0),
        s1: Some(s1),
        omega,
    };
    let valid = module.validate();
    checks.push(
        Check::new("H0 is a module over H", "acyclic.module", valid.is_ok())
            .with_witness(valid.err().map(|e| e.to_string())),
    );
    Ok(MFunctor {
        module,
        h1,
        iota,
        iota_chamber,
        checks,
    })
}

/// `ι_{x1}(c_ω(m)) = ω·ι_{x0}(m)` on `F^I_{x0}`.
fn equivariance_check(
    sys: &CoeffSystem,
    ap: &ApartmentSystem,
    iota: &[ModuleMap; 2],
    omega_h0: &Matrix,
    h0: &PresentedModule,
) -> Result<Check> {
    let cw = sys
        .diagram
        .omega_vertex
        .as_ref()
        .ok_or_else(|| Error::Internal("PGL2 diagram without ω".into()))?;
    let (_, incl0) = &ap.vertex_invariants[0];
    let (_, incl1) = &ap.vertex_invariants[1];
    let moved = lift_rows(incl1, &incl0.matrix.mul(&cw[0].matrix)?)?;
    let lhs = moved.mul(&iota[1].matrix)?;
    let rhs = iota[0].matrix.mul(omega_h0)?;
    Ok(Check::new(
        "iota_{omega x0}(c_omega m) = omega iota_x0(m)",
        "acyclic.omega",
        maps_agree(&lhs, &rhs, h0)?,
    ))
}

/// The composite `M → F(M)^I_{x0} → H_0`, checked to be an H-linear bijection.
pub fn compare_with_module(mf: &MFunctor, m: &HeckeModule, fm: &FmDiagram) -> Result<(ModuleMap, Check)> {
    let (_, can) = fm.vertex_tf[0].canonical_into_invariants()?;
    let f = can.then(&mf.iota[0])?;
    let pass = f.is_isomorphism() && m.is_linear_map_to(&mf.module, &f);
    Ok((f, Check::new("M -> H0 is an H-linear bijection", "equivalence.unit", pass)))
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::chains::region::{Region, RegionKind};
    use crate::coeff::{spread, Diagram, FaceCaches};
    use crate::hecke::random::random_module;
    use crate::ring_linalg::Zm;
    use crate::weyl::GroupData;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn system(d: Diagram, kind: RegionKind, n: usize) -> CoeffSystem {
        let r = Region::build(d.gd, kind, n).unwrap();
        spread(Arc::new(d), Arc::new(r)).unwrap()
    }

    #[test]
    fn constant_apartment_complex() {
        let gd = GroupData::new(GroupKind::Sl2, 2).unwrap();
        let ring = Zm::new(4).unwrap();
        let sys = system(Diagram::constant(gd, ring).unwrap(), RegionKind::Apartment, 1);
        let k = chain_complex(&sys).unwrap();
        assert_eq!(k.boundary.matrix.rows(), 3);
        let row = k.boundary.matrix.row(0);
        assert_eq!(row.iter().filter(|&&x| x == 1).count(), 1);
        assert_eq!(row.iter().filter(|&&x| x == 3).count(), 1);
        for n in 1..=3 {
            let k = chain_complex(&system(Diagram::constant(gd, ring).unwrap(), RegionKind::Apartment, n)).unwrap();
            assert!(homology(&k, 1).unwrap().is_zero());
            assert!(homology(&k, 0).unwrap().is_isomorphic_to(&PresentedModule::free(ring, 1)));
        }
    }

    #[test]
    fn constant_invariants_complex_has_q_entries() {
        let gd = GroupData::new(GroupKind::Sl2, 2).unwrap();
        let sys = system(Diagram::constant(gd, Zm::new(3).unwrap()).unwrap(), RegionKind::Apartment, 2);
        let (k, _) = invariants_complex(&sys).unwrap();
        let mut entries: Vec<u64> = k.boundary.matrix.entries().iter().copied().filter(|&x| x != 0).collect();
        entries.sort_unstable();
        entries.dedup();
        assert_eq!(entries, vec![1, 2]);
    }

    #[test]
    fn zero_system() {
        let gd = GroupData::new(GroupKind::Pgl2, 2).unwrap();
        let sys = system(Diagram::zero(gd, Zm::new(2).unwrap()).unwrap(), RegionKind::Apartment, 2);
        let mf = m_functor(&sys).unwrap();
        assert!(mf.module.carrier.is_zero());
        assert!(mf.passed(), "{:?}", mf.checks);
    }

    #[test]
    fn m_functor_recovers_random_modules() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for (kind, q, m) in [(GroupKind::Sl2, 2, 4), (GroupKind::Pgl2, 3, 3), (GroupKind::Pgl2, 2, 2)] {
            let gd = GroupData::new(kind, q).unwrap();
            let ring = Zm::new(m).unwrap();
            let caches = FaceCaches::new(gd, ring).unwrap();
            for _ in 0..3 {
                let module = random_module(gd, ring, Scope::Full, 2, &mut rng).unwrap();
                let fm = Diagram::from_hecke_module(&module, &caches).unwrap();
                let sys = system(fm.diagram.clone(), RegionKind::Apartment, 3);
                let mf = m_functor(&sys).unwrap();
                assert!(mf.passed(), "{:?}", mf.checks);
                let (_, check) = compare_with_module(&mf, &module, &fm).unwrap();
                assert!(check.pass);
            }
        }
    }
}
