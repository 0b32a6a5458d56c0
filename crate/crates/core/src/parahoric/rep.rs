use std::sync::Arc;

use super::group::FiniteQuotient;
use crate::error::{Error, Result};
use crate::hecke::{parahoric_algebra, FiniteAlgebra, HeckeModule, Scope};
use crate::ring_linalg::{module_dual, solve_many, Matrix, ModuleMap, PresentedModule, Zm};
use crate::weyl::{Face, GroupKind, Letter, WeylElt};

/// A representation of a finite quotient `G_F` on a finite R-module.
///
/// `action[g]` is the matrix of `g` on row vectors, so `action[gh] = action[h]·action[g]`.
/// At the chamber of PGL2 an optional `omega` matrix extends the action to `P_C^†`.
#[derive(Debug, Clone)]
pub struct FiniteRep {
    pub group: Arc<FiniteQuotient>,
    pub carrier: PresentedModule,
    pub action: Vec<Matrix>,
    pub omega: Option<Matrix>,
}

/// Result of the generation test behind condition (H).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditionH {
    pub holds: bool,
    /// Invariant vectors generating V (rows), or empty when generation fails.
    pub generators: Matrix,
    /// Nonzero cokernel of `R[G]·V^U ⊆ V` (or of the dual) when generation fails.
    pub witness: Option<PresentedModule>,
    pub dual_generated: bool,
}

fn same_map(carrier: &PresentedModule, a: &Matrix, b: &Matrix) -> bool {
    match a.sub(b) {
        Ok(d) => d.row_iter().all(|r| carrier.is_zero_element(r)),
        Err(_) => false,
    }
}

impl FiniteRep {
    pub fn new(group: Arc<FiniteQuotient>, carrier: PresentedModule, action: Vec<Matrix>, omega: Option<Matrix>) -> Result<Self> {
        let rep = FiniteRep {
            group,
            carrier,
            action,
            omega,
        };
        rep.validate()?;
        Ok(rep)
    }

    pub fn ring(&self) -> Zm {
        self.carrier.ring()
    }

    pub fn rank(&self) -> usize {
        self.carrier.rank()
    }

    fn validate(&self) -> Result<()> {
        let g = &self.group;
        if self.action.len() != g.order() {
            return Err(Error::DimensionMismatch(format!(
                "{} action matrices for a group of order {}",
                self.action.len(),
                g.order()
            )));
        }
        let n = self.rank();
        let id = Matrix::identity(self.ring(), n);
        let violated = |what: &str| Error::RelationViolated {
            relation: what.into(),
            witness: vec![],
        };
        for a in &self.action {
            ModuleMap::new(self.carrier.clone(), self.carrier.clone(), a.clone())?;
        }
        if !same_map(&self.carrier, &self.action[g.identity()], &id) {
            return Err(violated("1 acts as the identity"));
        }
        for s in g.generators() {
            for h in 0..g.order() {
                let lhs = &self.action[g.mul(s, h)];
                let rhs = self.action[h].mul(&self.action[s])?;
                if !same_map(&self.carrier, lhs, &rhs) {
                    return Err(violated("g·(h·v) = (gh)·v"));
                }
            }
        }
        if let Some(om) = &self.omega {
            if g.face() != Face::C || g.group().kind() != GroupKind::Pgl2 {
                return Err(Error::Unsupported("Ω_F actions are only carried at the chamber of PGL2".into()));
            }
            ModuleMap::new(self.carrier.clone(), self.carrier.clone(), om.clone())?;
            if !same_map(&self.carrier, &om.mul(om)?, &id) {
                return Err(violated("ω² = 1"));
            }
            let gd = g.group();
            for (t, &ti) in gd.torus_elements().iter().zip(g.torus()) {
                let sw = g.torus()[gd.torus_elements().iter().position(|x| *x == gd.torus_swap(*t)).expect("torus closed")];
                // ω t = swap(t) ω
                let lhs = om.mul(&self.action[ti])?;
                let rhs = self.action[sw].mul(om)?;
                if !same_map(&self.carrier, &lhs, &rhs) {
                    return Err(violated("ω t ω⁻¹ = swap(t)"));
                }
            }
        }
        Ok(())
    }

    /// The permutation module `R[G_F / U]` with its left group action.
    pub fn universal(group: Arc<FiniteQuotient>, ring: Zm) -> FiniteRep {
        let (coset, reps) = group.unipotent_cosets();
        let n = reps.len();
        let action = (0..group.order())
            .map(|h| {
                let mut a = Matrix::zeros(ring, n, n);
                for (i, &r) in reps.iter().enumerate() {
                    a.set(i, coset[group.mul(h, r)], 1);
                }
                a
            })
            .collect();
        FiniteRep {
            group,
            carrier: PresentedModule::free(ring, n),
            action,
            omega: None,
        }
    }

    /// Matrix of `v ↦ Σ_{g ∈ S} g·v`.
    pub fn sum_action(&self, elements: &[usize]) -> Matrix {
        let mut out = Matrix::zeros(self.ring(), self.rank(), self.rank());
        for &g in elements {
            out = out.add(&self.action[g]).expect("square matrices");
        }
        out
    }

    /// Matrix of the Hecke operator `τ_w = Σ_{gU ⊂ UẇU} g` on V (it preserves V^U).
    pub fn hecke_operator(&self, w: &WeylElt) -> Result<Matrix> {
        if w.omega != 0 {
            return self
                .omega
                .clone()
                .ok_or_else(|| Error::InvalidInput("representation has no Ω action".into()));
        }
        Ok(self.sum_action(&self.group.double_coset_reps(w)?))
    }

    /// The simultaneous fixed space of `elements`, with its inclusion.
    pub fn fixed_space(&self, elements: &[usize]) -> Result<(PresentedModule, ModuleMap)> {
        let ring = self.ring();
        let n = self.rank();
        let id = Matrix::identity(ring, n);
        let mut stacked = Matrix::zeros(ring, n, 0);
        let mut parts = Vec::new();
        for &g in elements {
            stacked = stacked.hstack(&self.action[g].sub(&id)?)?;
            parts.push(&self.carrier);
        }
        let target = PresentedModule::direct_sum(ring, &parts);
        let map = ModuleMap::new(self.carrier.clone(), target, stacked)?;
        let (sub, incl) = map.kernel();
        let (small, _, back) = sub.prune();
        Ok((small, back.then(&incl)?))
    }

    /// `V^U` as a module over `H_F` (or `H_C^†` when an Ω action is present), with its inclusion.
    pub fn invariants(&self) -> Result<(HeckeModule, ModuleMap)> {
        let g = &self.group;
        let gd = g.group();
        let (sub, incl) = self.fixed_space(g.unipotent())?;
        let scope = Scope::Face {
            face: g.face(),
            dagger: self.omega.is_some(),
        };
        let restrict = |op: &Matrix| -> Result<Matrix> {
            let imgs = incl.matrix.mul(op)?;
            let mut out = Matrix::zeros(self.ring(), sub.rank(), sub.rank());
            for (i, row) in imgs.row_iter().enumerate() {
                let c = incl
                    .lift(row)?
                    .ok_or_else(|| Error::Internal("Hecke operator leaves the invariants".into()))?;
                out.row_mut(i).copy_from_slice(&c);
            }
            Ok(out)
        };
        let torus = gd
            .torus_generators()
            .into_iter()
            .map(|t| restrict(&self.hecke_operator(&gd.torus_elt(t))?))
            .collect::<Result<Vec<_>>>()?;
        let reflection = |l: Letter| -> Result<Option<Matrix>> {
            if g.face().letter() == Some(l) {
                Ok(Some(restrict(&self.hecke_operator(&gd.reflection(l))?)?))
            } else {
                Ok(None)
            }
        };
        let s0 = reflection(Letter::S0)?;
        let s1 = reflection(Letter::S1)?;
        let omega = self.omega.as_ref().map(restrict).transpose()?;
        let module = HeckeModule {
            gd,
            scope,
            carrier: sub.clone(),
            torus,
            s0,
            s1,
            omega,
        };
        module.validate()?;
        Ok((module, incl))
    }

    /// The contragredient `V* = Hom_R(V, R)` with `(g·f)(v) = f(g⁻¹·v)`.
    pub fn dual(&self) -> Result<FiniteRep> {
        let (dual, funcs) = module_dual(&self.carrier);
        let translate = |a: &Matrix| -> Result<Matrix> {
            // f ↦ f∘a as a row vector is f·aᵀ
            let targets = funcs.mul(&a.transpose())?;
            solve_many(&funcs, &targets)?.ok_or_else(|| Error::Internal("dual action leaves the functionals".into()))
        };
        let g = &self.group;
        let action = (0..g.order())
            .map(|h| translate(&self.action[g.inv(h)]))
            .collect::<Result<Vec<_>>>()?;
        let omega = self.omega.as_ref().map(translate).transpose()?;
        FiniteRep::new(self.group.clone(), dual, action, omega)
    }

    /// Whether `R[G]·V^U = V`; returns the invariant generators and the cokernel.
    pub fn generation_by_invariants(&self) -> Result<(bool, Matrix, PresentedModule)> {
        let (_, incl) = self.fixed_space(self.group.unipotent())?;
        let mut span = Matrix::zeros(self.ring(), 0, self.rank());
        for a in &self.action {
            span = span.vstack(&incl.matrix.mul(a)?)?;
        }
        let (coker, _) = self.carrier.quotient(&span)?;
        Ok((coker.is_zero(), incl.matrix.clone(), coker))
    }

    /// Condition (H) for a finite carrier: V and V* are generated by their U-invariants.
    pub fn check_condition_h(&self) -> Result<ConditionH> {
        let (ok, gens, coker) = self.generation_by_invariants()?;
        let (dual_ok, _, dual_coker) = self.dual()?.generation_by_invariants()?;
        let witness = if !ok {
            Some(coker)
        } else if !dual_ok {
            Some(dual_coker)
        } else {
            None
        };
        Ok(ConditionH {
            holds: ok && dual_ok,
            generators: if ok { gens } else { Matrix::zeros(self.ring(), 0, self.rank()) },
            witness,
            dual_generated: dual_ok,
        })
    }

    /// Induction from the Iwahori image of a vertex quotient, with U acting trivially.
    /// `self` is a representation of the torus quotient at C.
    pub fn induce(&self, target: Arc<FiniteQuotient>) -> Result<FiniteRep> {
        if self.group.face() != Face::C || !target.face().is_vertex() {
            return Err(Error::InvalidInput("induction runs from the chamber to a vertex".into()));
        }
        if target.group() != self.group.group() {
            return Err(Error::GroupMismatch);
        }
        let gd = target.group();
        let ring = self.ring();
        let borel = target.borel();
        let n = target.order();
        // left cosets g·B
        let mut coset = vec![usize::MAX; n];
        let mut reps = Vec::new();
        for g in 0..n {
            if coset[g] == usize::MAX {
                for &b in borel {
                    coset[target.mul(g, b)] = reps.len();
                }
                reps.push(g);
            }
        }
        let torus_index = |b: usize| -> Result<usize> {
            let t = target.torus_class(b)?;
            let i = gd.torus_elements().iter().position(|x| *x == t).expect("torus class");
            Ok(self.group.torus()[i])
        };
        let k = self.rank();
        let blocks = reps.len();
        let action = (0..n)
            .map(|h| -> Result<Matrix> {
                let mut a = Matrix::zeros(ring, blocks * k, blocks * k);
                for (i, &r) in reps.iter().enumerate() {
                    let hr = target.mul(h, r);
                    let j = coset[hr];
                    let b = target.mul(target.inv(reps[j]), hr);
                    let m = &self.action[torus_index(b)?];
                    for x in 0..k {
                        for y in 0..k {
                            a.set(i * k + x, j * k + y, m.get(x, y));
                        }
                    }
                }
                Ok(a)
            })
            .collect::<Result<Vec<_>>>()?;
        let parts: Vec<&PresentedModule> = (0..blocks).map(|_| &self.carrier).collect();
        let carrier = PresentedModule::direct_sum(ring, &parts);
        FiniteRep::new(target, carrier, action, None)
    }

    /// Reduction along `Z/m → Z/m'`.
    pub fn change_ring(&self, target: Zm) -> Result<FiniteRep> {
        let action = self
            .action
            .iter()
            .map(|a| a.change_ring(target))
            .collect::<Result<Vec<_>>>()?;
        let omega = self.omega.as_ref().map(|m| m.change_ring(target)).transpose()?;
        FiniteRep::new(self.group.clone(), self.carrier.change_ring(target)?, action, omega)
    }

    /// The same representation on an isomorphic carrier.
    pub fn transport(&self, iso: &ModuleMap, inverse: &ModuleMap) -> Result<FiniteRep> {
        let conj = |a: &Matrix| -> Result<Matrix> { inverse.matrix.mul(a)?.mul(&iso.matrix) };
        let action = self.action.iter().map(conj).collect::<Result<Vec<_>>>()?;
        let omega = self.omega.as_ref().map(conj).transpose()?;
        FiniteRep::new(self.group.clone(), iso.codomain.clone(), action, omega)
    }

    /// Drop redundant generators of the carrier.
    pub fn pruned(&self) -> Result<FiniteRep> {
        let (_, fwd, back) = self.carrier.prune();
        self.transport(&fwd, &back)
    }

    /// Whether `f: self → other` commutes with the group action.
    pub fn is_equivariant(&self, other: &FiniteRep, f: &ModuleMap) -> bool {
        (0..self.group.order()).all(|g| {
            let lhs = self.action[g].mul(&f.matrix);
            let rhs = f.matrix.mul(&other.action[g]);
            match (lhs, rhs) {
                (Ok(l), Ok(r)) => same_map(&other.carrier, &l, &r),
                _ => false,
            }
        })
    }
}

/// The universal module `X_F` together with the matrices of its right `H_F`-action.
#[derive(Debug, Clone)]
pub struct Universal {
    pub rep: FiniteRep,
    pub algebra: FiniteAlgebra,
    /// `right[i]` is the matrix of `x ↦ x·τ_{w_i}` for the i-th algebra basis element.
    pub right: Vec<Matrix>,
}

/// `X_F = R[G_F/U]` with `δ_{gU}·τ_w = Σ_{hU ⊂ UẇU} δ_{ghU}`.
pub fn universal_module(group: Arc<FiniteQuotient>, ring: Zm) -> Result<Universal> {
    let algebra = parahoric_algebra(group.group(), ring, group.face(), false)?;
    let rep = FiniteRep::universal(group.clone(), ring);
    let (coset, reps) = group.unipotent_cosets();
    let n = reps.len();
    let right = algebra
        .basis()
        .iter()
        .map(|w| -> Result<Matrix> {
            let ks = group.double_coset_reps(w)?;
            let mut a = Matrix::zeros(ring, n, n);
            for (i, &r) in reps.iter().enumerate() {
                for &k in &ks {
                    a.add_at(i, coset[group.mul(r, k)], 1);
                }
            }
            Ok(a)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Universal { rep, algebra, right })
}

impl Universal {
    /// Right action matrix of an algebra element given in the basis.
    pub fn right_action(&self, a: &[u64]) -> Matrix {
        let ring = self.rep.ring();
        let n = self.rep.rank();
        let mut out = Matrix::zeros(ring, n, n);
        for (m, &c) in self.right.iter().zip(a) {
            if c != 0 {
                out = out.add(&m.scale(c)).expect("square");
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hecke::HeckeElt;
    use crate::weyl::GroupData;

    fn group(kind: GroupKind, q: u64, face: Face) -> Arc<FiniteQuotient> {
        Arc::new(FiniteQuotient::new(GroupData::new(kind, q).unwrap(), face).unwrap())
    }

    fn z(m: u64) -> Zm {
        Zm::new(m).unwrap()
    }

    #[test]
    fn universal_ranks() {
        let x = FiniteRep::universal(group(GroupKind::Sl2, 2, Face::X0), z(2));
        assert_eq!(x.rank(), 3);
        let (inv, _) = x.invariants().unwrap();
        assert_eq!(inv.rank(), 2);
        let x = FiniteRep::universal(group(GroupKind::Sl2, 3, Face::X0), z(9));
        assert_eq!(x.rank(), 8);
        assert_eq!(x.invariants().unwrap().0.rank(), 4);
        let x = FiniteRep::universal(group(GroupKind::Gl2, 3, Face::C), z(4));
        assert_eq!(x.rank(), 4);
    }

    /// Convolution of double cosets inside `X_F^U` reproduces the structure constants.
    #[test]
    fn finite_convolution_matches_structure_constants() {
        for kind in [GroupKind::Sl2, GroupKind::Gl2, GroupKind::Pgl2] {
            for q in [2, 3] {
                for face in Face::ALL {
                    let g = group(kind, q, face);
                    let ring = z(if q == 2 { 4 } else { 9 });
                    let x = FiniteRep::universal(g.clone(), ring);
                    let gd = g.group();
                    let (coset, _) = g.unipotent_cosets();
                    let char_vec = |w: &WeylElt| -> Vec<u64> {
                        let mut v = vec![0; x.rank()];
                        for r in g.double_coset_reps(w).unwrap() {
                            v[coset[r]] = 1;
                        }
                        v
                    };
                    let basis = gd.face_group(face, false).unwrap();
                    for a in &basis {
                        let op = x.hecke_operator(a).unwrap();
                        for b in &basis {
                            let lhs = Matrix::row_vector(ring, &char_vec(b)).mul(&op).unwrap().row(0).to_vec();
                            let prod = crate::hecke::tau_multiply(&HeckeElt::tau(gd, ring, *a), &HeckeElt::tau(gd, ring, *b)).unwrap();
                            let mut rhs = vec![0; x.rank()];
                            for (w, &c) in prod.terms() {
                                for (e, &v) in rhs.iter_mut().zip(&char_vec(w)) {
                                    *e = ring.add(*e, ring.mul(c, v));
                                }
                            }
                            assert_eq!(lhs, rhs, "{kind} q={q} {face}: τ_a τ_b");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn right_action_is_a_module_structure_commuting_with_g() {
        let u = universal_module(group(GroupKind::Gl2, 3, Face::X1), z(3)).unwrap();
        let n = u.algebra.rank();
        for i in 0..n {
            for j in 0..n {
                let mut ei = vec![0; n];
                ei[i] = 1;
                let mut ej = vec![0; n];
                ej[j] = 1;
                // (x·a)·b = x·(ab)
                let lhs = u.right[i].mul(&u.right[j]).unwrap();
                let rhs = u.right_action(&u.algebra.mul(&ei, &ej));
                assert_eq!(lhs, rhs);
            }
            for g in 0..u.rep.group.order() {
                let a = &u.rep.action[g];
                assert_eq!(a.mul(&u.right[i]).unwrap(), u.right[i].mul(a).unwrap());
            }
        }
    }

    #[test]
    fn condition_h_examples() {
        let g = group(GroupKind::Sl2, 2, Face::X0);
        let x = FiniteRep::universal(g.clone(), z(2));
        assert!(x.check_condition_h().unwrap().holds);
        let triv = FiniteRep::new(
            g.clone(),
            PresentedModule::free(z(2), 1),
            vec![Matrix::identity(z(2), 1); g.order()],
            None,
        )
        .unwrap();
        assert!(triv.check_condition_h().unwrap().holds);
    }

    /// Brute force: V satisfies generation iff no proper subrepresentation contains V^U.
    #[test]
    fn generation_matches_subrepresentation_enumeration() {
        let g = group(GroupKind::Sl2, 2, Face::X0);
        let ring = z(2);
        let x = FiniteRep::universal(g.clone(), ring);
        // X / constants
        let ones = Matrix::from_rows(ring, 3, &[vec![1, 1, 1]]).unwrap();
        let (qm, _) = x.carrier.quotient(&ones).unwrap();
        let quot = FiniteRep::new(g.clone(), qm.clone(), x.action.clone(), None).unwrap();
        for rep in [&x, &quot] {
            let (gen, _, _) = rep.generation_by_invariants().unwrap();
            let elems = rep.carrier.elements();
            let (_, incl) = rep.fixed_space(g.unipotent()).unwrap();
            // every subset closed under addition and G that contains V^U
            let contains_all = |set: &[Vec<u64>]| set.len() == elems.len();
            let mut smallest = elems.clone();
            let n = elems.len();
            for mask in 0u32..(1 << n) {
                let set: Vec<Vec<u64>> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| elems[i].clone()).collect();
                let member = |v: &[u64]| set.iter().any(|s| *s == rep.carrier.reduce(v));
                let closed = set.iter().all(|a| {
                    set.iter().all(|b| {
                        let s: Vec<u64> = a.iter().zip(b).map(|(x, y)| ring.add(*x, *y)).collect();
                        member(&s)
                    }) && rep.action.iter().all(|m| member(Matrix::row_vector(ring, a).mul(m).unwrap().row(0)))
                });
                let has_inv = incl.matrix.row_iter().all(member);
                if closed && has_inv && set.len() < smallest.len() {
                    smallest = set;
                }
            }
            assert_eq!(gen, contains_all(&smallest));
        }
    }

    #[test]
    fn induction_ranks_and_condition_h() {
        let gd = GroupData::new(GroupKind::Sl2, 3).unwrap();
        let c = Arc::new(FiniteQuotient::new(gd, Face::C).unwrap());
        let x0 = Arc::new(FiniteQuotient::new(gd, Face::X0).unwrap());
        let xc = FiniteRep::universal(c.clone(), z(9));
        let ind = xc.induce(x0.clone()).unwrap();
        assert_eq!(ind.rank(), 8);
        assert!(ind.check_condition_h().unwrap().holds);
        let triv = FiniteRep::new(c.clone(), PresentedModule::free(z(9), 1), vec![Matrix::identity(z(9), 1); 2], None).unwrap();
        assert_eq!(triv.induce(x0.clone()).unwrap().rank(), 4);
        let zero = FiniteRep::new(c, PresentedModule::zero(z(9)), vec![Matrix::identity(z(9), 0); 2], None).unwrap();
        assert_eq!(zero.induce(x0).unwrap().carrier.order(), crate::ring_linalg::Order::one());
    }

    #[test]
    fn change_ring_preserves_condition_h() {
        let x = FiniteRep::universal(group(GroupKind::Pgl2, 2, Face::X1), z(4));
        let y = x.change_ring(z(2)).unwrap();
        assert!(y.check_condition_h().unwrap().holds);
        assert!(matches!(x.change_ring(z(3)), Err(Error::NoRingMap { .. })));
    }

    #[test]
    fn p_group_invariants_nonzero() {
        // subrepresentations of R[G/U] restricted to U, over Z/p^n
        let g = group(GroupKind::Sl2, 3, Face::X0);
        let x = FiniteRep::universal(g.clone(), z(9));
        for i in 0..x.rank() {
            let mut v = vec![0; x.rank()];
            v[i] = 3;
            let span: Vec<Vec<u64>> = g
                .unipotent()
                .iter()
                .map(|&u| Matrix::row_vector(z(9), &v).mul(&x.action[u]).unwrap().row(0).to_vec())
                .collect();
            let sub = Matrix::from_rows(z(9), x.rank(), &span).unwrap();
            let (m, incl) = x.carrier.submodule(&sub).unwrap();
            let acts: Vec<Matrix> = g
                .unipotent()
                .iter()
                .map(|&u| {
                    let imgs = sub.mul(&x.action[u]).unwrap();
                    let mut a = Matrix::zeros(z(9), sub.rows(), sub.rows());
                    for (r, row) in imgs.row_iter().enumerate() {
                        a.row_mut(r).copy_from_slice(&incl.lift(row).unwrap().unwrap());
                    }
                    a
                })
                .collect();
            let id = Matrix::identity(z(9), sub.rows());
            let mut stacked = Matrix::zeros(z(9), sub.rows(), 0);
            let mut parts = Vec::new();
            for a in &acts {
                stacked = stacked.hstack(&a.sub(&id).unwrap()).unwrap();
                parts.push(&m);
            }
            let f = ModuleMap::new(m.clone(), PresentedModule::direct_sum(z(9), &parts), stacked).unwrap();
            assert!(m.is_zero() || !f.kernel().0.is_zero());
        }
    }
}
