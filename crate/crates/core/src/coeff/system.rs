use std::sync::Arc;

use super::diagram::Diagram;
use crate::chains::region::{FaceRef, Region, Transport};
use crate::error::{Error, Result};
use crate::hecke::HeckeModule;
use crate::parahoric::FiniteRep;
use crate::ring_linalg::{Matrix, ModuleMap};

/// A diagram spread over a region by the transports `h_F`.
#[derive(Debug, Clone)]
pub struct CoeffSystem {
    pub diagram: Arc<Diagram>,
    pub region: Arc<Region>,
}

pub fn spread(diagram: Arc<Diagram>, region: Arc<Region>) -> Result<CoeffSystem> {
    if diagram.gd != region.gd {
        return Err(Error::GroupMismatch);
    }
    Ok(CoeffSystem { diagram, region })
}

impl CoeffSystem {
    /// `F_F`, in the coordinates of `D_{[F]}`.
    pub fn value(&self, f: FaceRef) -> &FiniteRep {
        match f {
            FaceRef::Chamber(_) => &self.diagram.chamber,
            FaceRef::Vertex(v) => &self.diagram.vertices[self.region.vertices[v].ty],
        }
    }

    /// `r^e_v = π_{[v]}(h_v⁻¹ h_e) ∘ r^C_{[v]}` for the vertex of type `ty` of chamber `e`.
    pub fn restriction(&self, e: usize, ty: usize) -> Result<Matrix> {
        let twist = self.region.chambers[e].twist[ty];
        self.diagram.restriction[ty].matrix.mul(&self.diagram.vertices[ty].action[twist])
    }

    /// The value map `c_{g,F}: F_F → F_{gF}` of a located transport, orientation sign included.
    pub fn transport_matrix(&self, f: FaceRef, t: &Transport) -> Result<Matrix> {
        let rep = self.value(f);
        let mut m = rep.action[t.element].clone();
        if t.omega {
            let om = match f {
                FaceRef::Chamber(_) => rep.omega.as_ref(),
                FaceRef::Vertex(v) => self
                    .diagram
                    .omega_vertex
                    .as_ref()
                    .map(|c| &c[self.region.vertices[v].ty].matrix),
            }
            .ok_or_else(|| Error::Unsupported("ω acts only for PGL2".into()))?;
            m = m.mul(om)?;
        }
        if t.sign < 0 {
            m = m.neg();
        }
        Ok(m)
    }
}

/// A transition map `t^D_v: F^I_D → F^I_v` on the apartment.
#[derive(Debug, Clone)]
pub struct Transition {
    pub chamber: usize,
    pub vertex: usize,
    /// Whether `C(v) = D`.
    pub near: bool,
    pub map: ModuleMap,
}

/// The apartment system `F^I` on the apartment chambers of a region.
#[derive(Debug, Clone)]
pub struct ApartmentSystem {
    pub chambers: Vec<usize>,
    pub vertices: Vec<usize>,
    /// `D_C^U` with its `H_C` (or `H_C^†`) action and inclusion.
    pub chamber_invariants: (HeckeModule, ModuleMap),
    /// `D_x^U` with its `H_x` action and inclusion, by type.
    pub vertex_invariants: [(HeckeModule, ModuleMap); 2],
    pub transitions: Vec<Transition>,
}

impl ApartmentSystem {
    pub fn transition(&self, chamber: usize, vertex: usize) -> Option<&Transition> {
        self.transitions.iter().find(|t| t.chamber == chamber && t.vertex == vertex)
    }
}

/// Lift the rows of `imgs` through an inclusion.
pub(crate) fn lift_rows(incl: &ModuleMap, imgs: &Matrix) -> Result<Matrix> {
    let mut out = Matrix::zeros(imgs.ring(), imgs.rows(), incl.domain.rank());
    for (i, row) in imgs.row_iter().enumerate() {
        let c = incl
            .lift(row)?
            .ok_or_else(|| Error::Internal("transition leaves the invariants".into()))?;
        out.row_mut(i).copy_from_slice(&c);
    }
    Ok(out)
}

/// `t^D_v(m) = Σ_{g ∈ (I∩P_v)/(I∩P_D)} g·r^D_v(m)`; the representatives map onto
/// the unipotent radical at `[v]` when `C(v) ≠ D`, and are trivial otherwise.
pub fn apartment_system(sys: &CoeffSystem) -> Result<ApartmentSystem> {
    let region = &sys.region;
    let d = &sys.diagram;
    let chamber_invariants = d.chamber.invariants()?;
    let vertex_invariants = [d.vertices[0].invariants()?, d.vertices[1].invariants()?];
    let chambers: Vec<usize> = (0..region.chambers.len())
        .filter(|&c| region.chambers[c].in_apartment())
        .collect();
    let mut vertices: Vec<usize> = chambers.iter().flat_map(|&c| region.chambers[c].vertices).collect();
    vertices.sort_unstable();
    vertices.dedup();
    let mut transitions = Vec::new();
    for &c in &chambers {
        for ty in 0..2 {
            let v = region.chambers[c].vertices[ty];
            let near = region.vertices[v].home == c;
            let mut m = chamber_invariants.1.matrix.mul(&sys.restriction(c, ty)?)?;
            if !near {
                let rep = &d.vertices[ty];
                m = m.mul(&rep.sum_action(rep.group.unipotent()))?;
            }
            let (inv, incl) = &vertex_invariants[ty];
            let map = ModuleMap::new(chamber_invariants.0.carrier.clone(), inv.carrier.clone(), lift_rows(incl, &m)?)?;
            transitions.push(Transition {
                chamber: c,
                vertex: v,
                near,
                map,
            });
        }
    }
    Ok(ApartmentSystem {
        chambers,
        vertices,
        chamber_invariants,
        vertex_invariants,
        transitions,
    })
}

/// Outcome of the category-C membership test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CategoryReport {
    pub holds: bool,
    pub failures: Vec<String>,
}

/// Condition (H) at every face of the standard chamber, and bijectivity of the
/// apartment transitions with `C(v) = D`.
pub fn check_category_c(sys: &CoeffSystem) -> Result<CategoryReport> {
    let d = &sys.diagram;
    let mut failures = Vec::new();
    for (name, rep) in [("x0", &d.vertices[0]), ("x1", &d.vertices[1]), ("C", &d.chamber)] {
        if !rep.check_condition_h()?.holds {
            failures.push(format!("condition (H) fails at {name}"));
        }
    }
    let ap = apartment_system(sys)?;
    for t in ap.transitions.iter().filter(|t| t.near) {
        if !t.map.is_isomorphism() {
            failures.push(format!(
                "transition {} -> vertex {} is not bijective",
                sys.region.chambers[t.chamber].name(),
                t.vertex
            ));
        }
    }
    Ok(CategoryReport {
        holds: failures.is_empty(),
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chains::region::RegionKind;
    use crate::ring_linalg::Zm;
    use crate::weyl::{GroupData, GroupKind};

    #[test]
    fn constant_system_transitions() {
        let gd = GroupData::new(GroupKind::Sl2, 2).unwrap();
        let ring = Zm::new(8).unwrap();
        let d = Arc::new(Diagram::constant(gd, ring).unwrap());
        let r = Arc::new(Region::build(gd, RegionKind::Apartment, 2).unwrap());
        let sys = spread(d, r).unwrap();
        let ap = apartment_system(&sys).unwrap();
        for t in &ap.transitions {
            let expect = if t.near { 1 } else { 2 };
            assert_eq!(t.map.matrix.get(0, 0), expect);
        }
        let report = check_category_c(&sys).unwrap();
        assert!(report.holds, "{:?}", report.failures);
    }

    #[test]
    fn zero_system_is_in_category_c() {
        let gd = GroupData::new(GroupKind::Pgl2, 3).unwrap();
        let d = Arc::new(Diagram::zero(gd, Zm::new(3).unwrap()).unwrap());
        let r = Arc::new(Region::build(gd, RegionKind::Apartment, 2).unwrap());
        assert!(check_category_c(&spread(d, r).unwrap()).unwrap().holds);
    }
}
