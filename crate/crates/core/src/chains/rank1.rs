use std::collections::VecDeque;
use std::sync::Arc;

use super::complex::Check;
use super::region::{Region, RegionKind};
use crate::coeff::{spread, CoeffSystem, Diagram, FaceCaches, FmDiagram};
use crate::error::{Error, Result};
use crate::hecke::{restrict_module, HeckeModule, Scope};
use crate::parahoric::tau_map;
use crate::ring_linalg::{is_prime, preimage, Matrix, ModuleMap, PresentedModule};
use crate::weyl::{Face, GroupKind};

/// Result of the rooted sweep over a tree-shaped region.
#[derive(Debug, Clone)]
pub struct BoundarySweep {
    /// Whether `∂₀` is injective on all chains of the region.
    pub injective: bool,
    pub witness: Option<String>,
    /// Values at the root of boundaries supported only at the root, as rows in `D_{[root]}`.
    pub root_span: Matrix,
}

/// Decide injectivity of `∂₀` on a tree-shaped region by a leaf-to-root sweep.
///
/// For a chamber `e` with outer vertex `w`, `A_e` collects the values at `e` that
/// extend to a chain below `e` whose boundary vanishes away from the inner vertex
/// of `e`. A kernel element exists iff some vertex sums its children's admissible
/// values to zero non-trivially.
pub fn boundary_sweep(sys: &CoeffSystem, root: usize) -> Result<BoundarySweep> {
    let region = &sys.region;
    let ring = sys.diagram.ring;
    let nv = region.vertices.len();
    let mut incident = vec![Vec::new(); nv];
    for (c, info) in region.chambers.iter().enumerate() {
        for &v in &info.vertices {
            incident[v].push(c);
        }
    }
    let mut parent_chamber: Vec<Option<usize>> = vec![None; nv];
    let mut seen = vec![false; nv];
    let mut order = Vec::with_capacity(nv);
    let mut queue = VecDeque::from([root]);
    seen[root] = true;
    while let Some(v) = queue.pop_front() {
        order.push(v);
        for &c in &incident[v] {
            let info = &region.chambers[c];
            let w = if info.vertices[0] == v { info.vertices[1] } else { info.vertices[0] };
            if !seen[w] {
                seen[w] = true;
                parent_chamber[w] = Some(c);
                queue.push_back(w);
            }
        }
    }
    if order.len() != nv {
        return Err(Error::Internal("region is not connected".into()));
    }
    let chamber_rep = &sys.diagram.chamber;
    let nc = chamber_rep.rank();
    let mut admissible: Vec<Option<Matrix>> = vec![None; region.chambers.len()];
    let mut root_span = Matrix::zeros(ring, 0, sys.value_rank(root));
    for &w in order.iter().rev() {
        let ty = region.vertices[w].ty;
        let target = &sys.diagram.vertices[ty].carrier;
        let mut span = Matrix::zeros(ring, 0, target.rank());
        let mut subs = Vec::new();
        for &c in incident[w].iter().filter(|&&c| Some(c) != parent_chamber[w]) {
            let a = admissible[c]
                .take()
                .ok_or_else(|| Error::Internal("child chamber visited out of order".into()))?;
            let img = a.mul(&sys.restriction(c, ty)?)?;
            span = span.vstack(&img)?;
            subs.push(chamber_rep.carrier.submodule(&a)?.0);
        }
        if !subs.is_empty() {
            let domain = PresentedModule::direct_sum(ring, &subs.iter().collect::<Vec<_>>());
            let phi = ModuleMap::new(domain, target.clone(), span.clone())?;
            if let Some(k) = phi.kernel_witness() {
                return Ok(BoundarySweep {
                    injective: false,
                    witness: Some(format!(
                        "vertex {:?}: child values {k:?} have vanishing boundary",
                        region.vertices[w].key
                    )),
                    root_span: Matrix::zeros(ring, 0, target.rank()),
                });
            }
        }
        match parent_chamber[w] {
            Some(e) => {
                let r = sys.restriction(e, ty)?;
                let allowed = span.vstack(target.relations())?;
                let a = preimage(&r, &allowed)?;
                debug_assert_eq!(a.cols(), nc);
                admissible[e] = Some(a);
            }
            None => root_span = span,
        }
    }
    Ok(BoundarySweep {
        injective: true,
        witness: None,
        root_span,
    })
}

/// Whether `M → D_{[root]} / (boundaries at the root)` is injective for the given
/// map of `M` into the root value.
pub fn injects_into_h0(sweep: &BoundarySweep, root_value: &PresentedModule, m: &PresentedModule, map: &Matrix) -> Result<(bool, Option<Vec<u64>>)> {
    let (quot, _) = root_value.quotient(&sweep.root_span)?;
    let f = ModuleMap::new(m.clone(), quot, map.clone())?;
    Ok((f.is_injective(), f.kernel_witness()))
}

fn require_p_nilpotent(m: &HeckeModule) -> Result<()> {
    let p = m.gd.q();
    match m.ring().prime_power_base() {
        Some(b) if b == p => Ok(()),
        _ if m.ring().modulus() == 1 => Ok(()),
        _ => Err(Error::InvalidInput(format!(
            "p = {p} must be nilpotent in Z/{}",
            m.ring().modulus()
        ))),
    }
}

fn require_diagram_kind(m: &HeckeModule, caches: &FaceCaches) -> Result<()> {
    if m.gd.kind() == GroupKind::Gl2 {
        return Err(Error::Unsupported("coefficient systems need SL2 or PGL2".into()));
    }
    if caches.gd != m.gd {
        return Err(Error::GroupMismatch);
    }
    if caches.ring != m.ring() {
        return Err(Error::RingMismatch(caches.ring.modulus(), m.ring().modulus()));
    }
    if m.scope != Scope::Full {
        return Err(Error::AlgebraMismatch("expected a module over H".into()));
    }
    Ok(())
}

/// `F(M)` spread over a region of the given kind.
pub fn fm_system(m: &HeckeModule, caches: &FaceCaches, kind: RegionKind, radius: usize) -> Result<(FmDiagram, CoeffSystem)> {
    let fm = Diagram::from_hecke_module(m, caches)?;
    let region = Region::build(m.gd, kind, radius)?;
    let sys = spread(Arc::new(fm.diagram.clone()), Arc::new(region))?;
    Ok((fm, sys))
}

/// Exactness of the augmented complex of `F(M)` on a tree ball and injectivity of
/// `M ≅ F(M)^I_{x0} → H_0`, for `p` nilpotent in the coefficients.
pub fn check_rank_one_exactness(m: &HeckeModule, caches: &FaceCaches, radius: usize) -> Result<Vec<Check>> {
    require_diagram_kind(m, caches)?;
    require_p_nilpotent(m)?;
    let (fm, sys) = fm_system(m, caches, RegionKind::Tree, radius)?;
    let sweep = boundary_sweep(&sys, 0)?;
    let mut checks = vec![Check::new(format!("d0 injective on the tree ball of radius {radius}"), "rank1.exact", sweep.injective)
        .with_witness(sweep.witness.clone())];
    let (ok, w) = injects_into_h0(&sweep, &fm.diagram.vertices[0].carrier, &m.carrier, &fm.vertex_tf[0].canonical.matrix)?;
    checks.push(
        Check::new("M -> H0 injective", "rank1.injection", ok).with_witness(w.map(|w| format!("kernel element {w:?}"))),
    );
    Ok(checks)
}

/// Injectivity of `τ_{M,F}: X_F ⊗ M → M^r` at every face of the standard chamber.
pub fn check_tau_injective(m: &HeckeModule, caches: &FaceCaches) -> Result<Vec<Check>> {
    require_diagram_kind(m, caches)?;
    // the residue field must be prime
    if !is_prime(m.gd.q()) {
        return Err(Error::InvalidInput(format!("q = {} is not prime", m.gd.q())));
    }
    require_p_nilpotent(m)?;
    let faces = [(Face::X0, &caches.vertices[0]), (Face::X1, &caches.vertices[1]), (Face::C, &caches.chamber)];
    faces
        .into_iter()
        .map(|(face, cache)| {
            let tau = tau_map(cache, &restrict_module(m, face, false)?)?;
            let w = tau.kernel_witness();
            Ok(Check::new(format!("tau injective at {face:?}"), "flat.tau", w.is_none())
                .with_witness(w.map(|w| format!("kernel element {w:?}"))))
        })
        .collect()
}

impl CoeffSystem {
    /// Rank of the carrier at a vertex.
    pub fn value_rank(&self, v: usize) -> usize {
        self.diagram.vertices[self.region.vertices[v].ty].rank()
    }
}
