use std::collections::BTreeMap;

use rand::Rng;

use super::complex::{invariants_complex, Check};
use super::rank1::{boundary_sweep, fm_system, injects_into_h0};
use super::region::{FaceRef, Region, RegionKind};
use crate::coeff::{CoeffSystem, FaceCaches};
use crate::error::{Error, Result};
use crate::hecke::HeckeModule;
use crate::coeff::padic::PMat;
use crate::ring_linalg::{Matrix, ModuleMap, PresentedModule};
use crate::weyl::GroupKind;

/// An element of the monoid generated by the contraction `t` and `Ū₁`, with its inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MonoidElt {
    pub matrix: PMat,
    pub inverse: PMat,
}

impl MonoidElt {
    pub fn identity(region: &Region) -> MonoidElt {
        let id = region.padic.identity();
        MonoidElt { matrix: id, inverse: id }
    }

    /// `[[1, 0], [p·a, 1]]`.
    pub fn unipotent(region: &Region, a: i64) -> MonoidElt {
        MonoidElt {
            matrix: region.padic.lower(a),
            inverse: region.padic.lower(-a),
        }
    }

    /// `self · other`.
    pub fn then_apply(&self, region: &Region, other: &MonoidElt) -> MonoidElt {
        let ctx = &region.padic;
        MonoidElt {
            matrix: ctx.mul(&self.matrix, &other.matrix),
            inverse: ctx.mul(&other.inverse, &self.inverse),
        }
    }

    pub fn pow(&self, region: &Region, n: usize) -> MonoidElt {
        (0..n).fold(MonoidElt::identity(region), |acc, _| acc.then_apply(region, self))
    }
}

/// The contraction `t` with `tŪ₁t⁻¹ ⊆ Ū₁` and representatives of `Ū₁/tŪ₁t⁻¹`.
#[derive(Debug, Clone)]
pub struct Contraction {
    pub t: MonoidElt,
    /// `⟨α, ν(t)⟩`: how far `t` moves the standard chamber along the ray.
    pub depth: usize,
    pub cosets: Vec<MonoidElt>,
}

impl Contraction {
    /// `diag(π⁻¹, π)` for SL2, `diag(1, π)` for PGL2.
    pub fn standard(region: &Region) -> Result<Contraction> {
        let ctx = &region.padic;
        let (t, t_inv, depth) = match region.gd.kind() {
            GroupKind::Sl2 => (ctx.diag_pi(-1, 1), ctx.diag_pi(1, -1), 2),
            GroupKind::Pgl2 => (ctx.diag_pi(0, 1), ctx.diag_pi(0, -1), 1),
            GroupKind::Gl2 => return Err(Error::Unsupported("half-tree operators need SL2 or PGL2".into())),
        };
        let p = region.gd.q() as i64;
        let cosets = (0..p.pow(depth as u32))
            .map(|d| MonoidElt::unipotent(region, d))
            .collect();
        Ok(Contraction {
            t: MonoidElt { matrix: t, inverse: t_inv },
            depth,
            cosets,
        })
    }
}

/// A finitely supported oriented chain, each value in the coordinates of `D_{[F]}`
/// for the orientation given by the source vertex.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Chain {
    values: BTreeMap<FaceRef, Vec<u64>>,
}

impl Chain {
    pub fn zero() -> Chain {
        Chain::default()
    }

    pub fn basis(sys: &CoeffSystem, f: FaceRef, i: usize) -> Chain {
        let mut v = vec![0; sys.value(f).rank()];
        v[i] = 1;
        Chain {
            values: BTreeMap::from([(f, v)]),
        }
    }

    pub fn random<G: Rng>(sys: &CoeffSystem, faces: &[FaceRef], terms: usize, rng: &mut G) -> Chain {
        let mut out = Chain::zero();
        let m = sys.diagram.ring.modulus();
        for _ in 0..terms {
            let f = faces[rng.gen_range(0..faces.len())];
            let v: Vec<u64> = (0..sys.value(f).rank()).map(|_| rng.gen_range(0..m)).collect();
            out.add_value(sys, f, &v);
        }
        out
    }

    pub fn get(&self, f: FaceRef) -> Option<&[u64]> {
        self.values.get(&f).map(|v| v.as_slice())
    }

    pub fn support(&self) -> impl Iterator<Item = FaceRef> + '_ {
        self.values.keys().copied()
    }

    pub fn add_value(&mut self, sys: &CoeffSystem, f: FaceRef, v: &[u64]) {
        let ring = sys.diagram.ring;
        let entry = self.values.entry(f).or_insert_with(|| vec![0; v.len()]);
        for (a, b) in entry.iter_mut().zip(v) {
            *a = ring.add(*a, *b);
        }
    }

    pub fn add(&mut self, sys: &CoeffSystem, other: &Chain) {
        for (f, v) in &other.values {
            self.add_value(sys, *f, v);
        }
    }

    pub fn sub(&self, sys: &CoeffSystem, other: &Chain) -> Chain {
        let ring = sys.diagram.ring;
        let mut out = self.clone();
        for (f, v) in &other.values {
            let neg: Vec<u64> = v.iter().map(|&x| ring.neg(x)).collect();
            out.add_value(sys, *f, &neg);
        }
        out
    }

    /// The first face carrying a nonzero value.
    pub fn nonzero_face(&self, sys: &CoeffSystem) -> Option<FaceRef> {
        self.values
            .iter()
            .find(|(f, v)| !sys.value(**f).carrier.is_zero_element(v))
            .map(|(f, _)| *f)
    }

    pub fn is_zero(&self, sys: &CoeffSystem) -> bool {
        self.nonzero_face(sys).is_none()
    }
}

/// `(g·f)(gF) = c_{g,F}(f(F))`. Faces sent outside the region are an error when
/// `strict`, and dropped otherwise.
fn push_forward(sys: &CoeffSystem, g: &PMat, f: &Chain, strict: bool) -> Result<Chain> {
    let mut out = Chain::zero();
    for (face, v) in &f.values {
        match sys.region.transport(g, *face)? {
            Some(t) => {
                let m = sys.transport_matrix(*face, &t)?;
                out.add_value(sys, t.target, &m.apply(v));
            }
            None if strict => {
                return Err(Error::Precision(format!(
                    "{face:?} leaves the region of radius {}",
                    sys.region.radius
                )))
            }
            None => {}
        }
    }
    Ok(out)
}

/// `φ_g(f)(F) = c_{g,g⁻¹F}(f(g⁻¹F))`, zero when `g⁻¹F` is outside the half-tree.
pub fn phi(sys: &CoeffSystem, g: &MonoidElt, f: &Chain) -> Result<Chain> {
    push_forward(sys, &g.matrix, f, true)
}

/// `ψ_g(f)(F) = c_{g⁻¹,gF}(f(gF))`.
pub fn psi(sys: &CoeffSystem, g: &MonoidElt, f: &Chain) -> Result<Chain> {
    push_forward(sys, &g.inverse, f, false)
}

/// Action of an element of `Ū₁` (which preserves the half-tree).
pub fn act(sys: &CoeffSystem, g: &PMat, f: &Chain) -> Result<Chain> {
    push_forward(sys, g, f, true)
}

fn require_halftree(sys: &CoeffSystem) -> Result<()> {
    if sys.region.kind != RegionKind::HalfTree {
        return Err(Error::InvalidInput("half-tree operators need a half-tree region".into()));
    }
    Ok(())
}

/// Faces `F` with `g⁻¹F` in the region.
fn faces_in_image(sys: &CoeffSystem, g: &MonoidElt) -> Result<Vec<FaceRef>> {
    let mut out = Vec::new();
    for f in sys.region.faces() {
        if sys.region.transport(&g.inverse, f)?.is_some() {
            out.push(f);
        }
    }
    Ok(out)
}

/// `Σ_u u φ_t ψ_t u⁻¹ = id` on every basis chain supported in `ts·BT⁺` (with `s = t`),
/// and `ψ_t φ_t = id` on every basis chain that `φ_t` keeps inside the region.
pub fn check_etale_identity(sys: &CoeffSystem, c: &Contraction) -> Result<Vec<Check>> {
    require_halftree(sys)?;
    let region = &sys.region;
    let ts = c.t.pow(region, 2);
    let shrunken = faces_in_image(sys, &ts)?;
    let mut failure = None;
    'outer: for &f in &shrunken {
        for i in 0..sys.value(f).rank() {
            let e = Chain::basis(sys, f, i);
            let mut total = Chain::zero();
            for u in &c.cosets {
                let moved = act(sys, &u.inverse, &e)?;
                let back = phi(sys, &c.t, &psi(sys, &c.t, &moved)?)?;
                total.add(sys, &act(sys, &u.matrix, &back)?);
            }
            if let Some(bad) = total.sub(sys, &e).nonzero_face(sys) {
                failure = Some(format!("basis chain {i} at {f:?} differs at {bad:?}"));
                break 'outer;
            }
        }
    }
    let mut checks = vec![Check::new(
        format!("sum_u u phi_t psi_t u^-1 = id on {} faces of ts.BT+", shrunken.len()),
        "etale.identity",
        failure.is_none() && !shrunken.is_empty(),
    )
    .with_witness(failure.or_else(|| shrunken.is_empty().then(|| "shrunken region is empty".into())))];
    let inner: Vec<FaceRef> = region
        .faces()
        .filter(|&f| region.distance(f) + c.depth < region.radius)
        .collect();
    let mut failure = None;
    'outer2: for &f in &inner {
        for i in 0..sys.value(f).rank() {
            let e = Chain::basis(sys, f, i);
            let back = psi(sys, &c.t, &phi(sys, &c.t, &e)?)?;
            if let Some(bad) = back.sub(sys, &e).nonzero_face(sys) {
                failure = Some(format!("basis chain {i} at {f:?} differs at {bad:?}"));
                break 'outer2;
            }
        }
    }
    checks.push(
        Check::new("psi_t phi_t = id", "etale.retraction", failure.is_none()).with_witness(failure),
    );
    Ok(checks)
}

/// Half-tree data of `F(M)`.
#[derive(Debug, Clone)]
pub struct HalfTreeReport {
    /// `H_0` of the invariant chains on the ray.
    pub h0: PresentedModule,
    /// `M → F(M)_{[t x0]}`, `m ↦ c_{t,x0}(m)`.
    pub phi_t: Matrix,
    pub checks: Vec<Check>,
}

/// `H_0` of the invariants complex of `F(M)` on the truncated half-tree, its comparison
/// with the apartment, and injectivity of `φ_t^n` on `M` for `n·depth(t) ≤ radius`.
pub fn halftree_h0(m: &HeckeModule, caches: &FaceCaches, radius: usize) -> Result<HalfTreeReport> {
    let (fm, sys) = fm_system(m, caches, RegionKind::HalfTree, radius)?;
    let region = &sys.region;
    let mut checks = Vec::new();
    let (k, ap) = invariants_complex(&sys)?;
    let (coker, proj) = k.boundary.cokernel();
    let (h0, _, _) = coker.prune();
    let off = k
        .vertex_offset(0)
        .ok_or_else(|| Error::Internal("x0 missing from the ray".into()))?;
    let n0 = ap.vertex_invariants[0].0.rank();
    let rows: Vec<usize> = (off..off + n0).collect();
    let iota = ModuleMap::new(ap.vertex_invariants[0].0.carrier.clone(), coker.clone(), proj.matrix.select_rows(&rows))?;
    checks.push(
        Check::new("iota_x0 bijective on the half-tree", "halftree.iota", iota.is_isomorphism())
            .with_witness(iota.kernel_witness().map(|w| format!("kernel element {w:?}"))),
    );
    let (_, can) = fm.vertex_tf[0].canonical_into_invariants()?;
    checks.push(Check::new(
        "M -> H0 of the half-tree bijective",
        "halftree.module",
        can.then(&iota)?.is_isomorphism(),
    ));

    // ray → apartment, matched by lattice class
    let (_, apsys) = fm_system(m, caches, RegionKind::Apartment, radius)?;
    let (ka, _) = invariants_complex(&apsys)?;
    let (coker_a, _) = ka.boundary.cokernel();
    let mut p = Matrix::zeros(m.ring(), k.c0.rank(), ka.c0.rank());
    for &(v, o) in &k.vertex_blocks {
        let w = apsys
            .region
            .vertex_by_key(&region.vertices[v].key)
            .ok_or_else(|| Error::Internal("ray vertex missing from the apartment".into()))?;
        let oa = ka
            .vertex_offset(w)
            .ok_or_else(|| Error::Internal("apartment vertex without a block".into()))?;
        for i in 0..ap.vertex_invariants[region.vertices[v].ty].0.rank() {
            p.set(o + i, oa + i, 1);
        }
    }
    let restriction = ModuleMap::new(coker.clone(), coker_a, p);
    let ok = restriction.as_ref().map(|r| r.is_isomorphism()).unwrap_or(false);
    checks.push(
        Check::new("H0 of the half-tree -> H0 of the apartment bijective", "halftree.scalar_restriction", ok)
            .with_witness(restriction.err().map(|e| e.to_string())),
    );

    let c = Contraction::standard(region)?;
    let mut phi_t = Matrix::zeros(m.ring(), m.rank(), 0);
    let mut n = 1;
    while n * c.depth <= radius {
        let g = c.t.pow(region, n);
        let t = region
            .transport(&g.matrix, FaceRef::Vertex(0))?
            .ok_or_else(|| Error::Internal("t^n x0 leaves the half-tree".into()))?;
        let FaceRef::Vertex(w) = t.target else {
            return Err(Error::Internal("a vertex moved to a chamber".into()));
        };
        let map = fm.vertex_tf[0].canonical.matrix.mul(&sys.transport_matrix(FaceRef::Vertex(0), &t)?)?;
        if n == 1 {
            phi_t = map.clone();
        }
        let sweep = boundary_sweep(&sys, w)?;
        let target = &sys.diagram.vertices[region.vertices[w].ty].carrier;
        let (inj, wit) = injects_into_h0(&sweep, target, &m.carrier, &map)?;
        checks.push(
            Check::new(format!("phi_t^{n} injective on M"), "halftree.nonvanishing", inj && sweep.injective)
                .with_witness(wit.map(|w| format!("kernel element {w:?}")).or(sweep.witness)),
        );
        n += 1;
    }
    Ok(HalfTreeReport { h0, phi_t, checks })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::coeff::{spread, Diagram};
    use crate::hecke::random::random_module;
    use crate::hecke::Scope;
    use crate::ring_linalg::Zm;
    use crate::weyl::GroupData;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn fm(kind: GroupKind, q: u64, modulus: u64, radius: usize, seed: u64) -> CoeffSystem {
        let gd = GroupData::new(kind, q).unwrap();
        let ring = Zm::new(modulus).unwrap();
        let caches = FaceCaches::new(gd, ring).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_module(gd, ring, Scope::Full, 2, &mut rng).unwrap();
        fm_system(&m, &caches, RegionKind::HalfTree, radius).unwrap().1
    }

    #[test]
    fn coset_counts() {
        for (kind, q, n) in [(GroupKind::Sl2, 2, 4), (GroupKind::Sl2, 3, 9), (GroupKind::Pgl2, 3, 3)] {
            let r = Region::build(GroupData::new(kind, q).unwrap(), RegionKind::HalfTree, 2).unwrap();
            assert_eq!(Contraction::standard(&r).unwrap().cosets.len(), n);
        }
    }

    #[test]
    fn phi_moves_the_chamber_along_the_ray() {
        let sys = fm(GroupKind::Sl2, 2, 2, 4, 1);
        let c = Contraction::standard(&sys.region).unwrap();
        let t = sys.region.transport(&c.t.matrix, FaceRef::Chamber(0)).unwrap().unwrap();
        let FaceRef::Chamber(d) = t.target else { panic!() };
        let info = &sys.region.chambers[d];
        assert!(info.in_apartment());
        assert_eq!(info.distance(), 2);
        let e = Chain::basis(&sys, FaceRef::Chamber(0), 0);
        let moved = phi(&sys, &c.t, &e).unwrap();
        assert_eq!(moved.support().collect::<Vec<_>>(), vec![FaceRef::Chamber(d)]);
        let id = MonoidElt::identity(&sys.region);
        assert_eq!(phi(&sys, &id, &e).unwrap(), e);
        assert_eq!(psi(&sys, &id, &e).unwrap(), e);
    }

    #[test]
    fn monoid_laws_on_random_chains() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for (kind, q, modulus) in [(GroupKind::Sl2, 2, 4), (GroupKind::Pgl2, 3, 3)] {
            let sys = fm(kind, q, modulus, 7, 4);
            let region = &sys.region;
            let c = Contraction::standard(region).unwrap();
            let near: Vec<FaceRef> = region.faces().filter(|&f| region.distance(f) <= 1).collect();
            let mut elements = vec![c.t];
            elements.extend(c.cosets.iter().copied());
            for _ in 0..25 {
                let f = Chain::random(&sys, &near, 3, &mut rng);
                let g = elements[rng.gen_range(0..elements.len())];
                let h = elements[rng.gen_range(0..elements.len())];
                let gh = g.then_apply(region, &h);
                let lhs = phi(&sys, &g, &phi(&sys, &h, &f).unwrap()).unwrap();
                assert!(lhs.sub(&sys, &phi(&sys, &gh, &f).unwrap()).is_zero(&sys));
                let far = phi(&sys, &gh, &f).unwrap();
                let lhs = psi(&sys, &g, &psi(&sys, &h, &far).unwrap()).unwrap();
                let hg = h.then_apply(region, &g);
                assert!(lhs.sub(&sys, &psi(&sys, &hg, &far).unwrap()).is_zero(&sys));
                assert!(psi(&sys, &g, &phi(&sys, &g, &f).unwrap()).unwrap().sub(&sys, &f).is_zero(&sys));
            }
        }
    }

    #[test]
    fn etale_identity_small() {
        for (kind, q) in [(GroupKind::Sl2, 2), (GroupKind::Pgl2, 2)] {
            let c_sys = fm(kind, q, 2, 6, 9);
            let c = Contraction::standard(&c_sys.region).unwrap();
            let checks = check_etale_identity(&c_sys, &c).unwrap();
            assert!(checks.iter().all(|c| c.pass), "{checks:?}");
        }
    }

    #[test]
    fn constant_system_etale() {
        let gd = GroupData::new(GroupKind::Sl2, 3).unwrap();
        let d = Diagram::constant(gd, Zm::new(9).unwrap()).unwrap();
        let r = Region::build(gd, RegionKind::HalfTree, 5).unwrap();
        let sys = spread(Arc::new(d), Arc::new(r)).unwrap();
        let c = Contraction::standard(&sys.region).unwrap();
        assert!(check_etale_identity(&sys, &c).unwrap().iter().all(|c| c.pass));
        assert!(Chain::zero().is_zero(&sys));
    }

    #[test]
    fn halftree_report() {
        let gd = GroupData::new(GroupKind::Sl2, 2).unwrap();
        let ring = Zm::new(2).unwrap();
        let caches = FaceCaches::new(gd, ring).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let m = random_module(gd, ring, Scope::Full, 1, &mut rng).unwrap();
        let rep = halftree_h0(&m, &caches, 3).unwrap();
        assert!(rep.checks.iter().all(|c| c.pass), "{:?}", rep.checks);
        assert_eq!(rep.h0.order(), m.carrier.order());
    }
}
