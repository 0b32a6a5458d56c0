use std::collections::HashMap;

use super::module::Scope;
use super::{tau_multiply, HeckeElt};
use crate::error::{Error, Result};
use crate::ring_linalg::{Matrix, Zm};
use crate::weyl::{Face, GroupData, WeylElt};

/// A parahoric subalgebra `H_F` or `H_F^†` with structure constants in the basis `τ_w`.
#[derive(Debug, Clone)]
pub struct FiniteAlgebra {
    gd: GroupData,
    ring: Zm,
    scope: Scope,
    basis: Vec<WeylElt>,
    index: HashMap<WeylElt, usize>,
    /// `table[(i*n + j)*n + k]` is the coefficient of `τ_k` in `τ_i τ_j`.
    table: Vec<u64>,
}

/// Structure constants of `H_F` (or `H_F^†` when `dagger`).
pub fn parahoric_algebra(gd: GroupData, ring: Zm, face: Face, dagger: bool) -> Result<FiniteAlgebra> {
    let basis = gd.face_group(face, dagger)?;
    let n = basis.len();
    let index: HashMap<WeylElt, usize> = basis.iter().enumerate().map(|(i, w)| (*w, i)).collect();
    let mut table = vec![0u64; n * n * n];
    for (i, a) in basis.iter().enumerate() {
        for (j, b) in basis.iter().enumerate() {
            let prod = tau_multiply(&HeckeElt::tau(gd, ring, *a), &HeckeElt::tau(gd, ring, *b))?;
            for (w, &c) in prod.terms() {
                let k = *index.get(w).ok_or_else(|| {
                    Error::Internal(format!("product leaves the subalgebra at {}", gd.display(w)))
                })?;
                table[(i * n + j) * n + k] = c;
            }
        }
    }
    let alg = FiniteAlgebra {
        gd,
        ring,
        scope: Scope::Face { face, dagger },
        basis,
        index,
        table,
    };
    alg.check_associative()?;
    Ok(alg)
}

impl FiniteAlgebra {
    pub fn group(&self) -> GroupData {
        self.gd
    }

    pub fn ring(&self) -> Zm {
        self.ring
    }

    pub fn scope(&self) -> Scope {
        self.scope
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[WeylElt] {
        &self.basis
    }

    pub fn index_of(&self, w: &WeylElt) -> Option<usize> {
        self.index.get(w).copied()
    }

    pub fn structure_constant(&self, i: usize, j: usize, k: usize) -> u64 {
        let n = self.rank();
        self.table[(i * n + j) * n + k]
    }

    pub fn basis_vector(&self, w: &WeylElt) -> Result<Vec<u64>> {
        let i = self
            .index_of(w)
            .ok_or_else(|| Error::InvalidInput(format!("{} is not in the subalgebra", self.gd.display(w))))?;
        let mut v = vec![0; self.rank()];
        v[i] = 1;
        Ok(v)
    }

    pub fn unit(&self) -> Vec<u64> {
        self.basis_vector(&self.gd.identity()).expect("identity is a basis element")
    }

    pub fn mul(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let n = self.rank();
        let r = self.ring;
        let mut out = vec![0u64; n];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                if y == 0 {
                    continue;
                }
                let xy = r.mul(x, y);
                let row = &self.table[(i * n + j) * n..(i * n + j + 1) * n];
                for (o, &c) in out.iter_mut().zip(row) {
                    if c != 0 {
                        *o = r.add(*o, r.mul(xy, c));
                    }
                }
            }
        }
        out
    }

    /// Matrix of `x ↦ a·x` on row vectors.
    pub fn left_regular(&self, a: &[u64]) -> Matrix {
        let n = self.rank();
        let mut out = Matrix::zeros(self.ring, n, n);
        for i in 0..n {
            let mut e = vec![0; n];
            e[i] = 1;
            out.row_mut(i).copy_from_slice(&self.mul(a, &e));
        }
        out
    }

    /// Matrix of `x ↦ x·a` on row vectors.
    pub fn right_regular(&self, a: &[u64]) -> Matrix {
        let n = self.rank();
        let mut out = Matrix::zeros(self.ring, n, n);
        for i in 0..n {
            let mut e = vec![0; n];
            e[i] = 1;
            out.row_mut(i).copy_from_slice(&self.mul(&e, a));
        }
        out
    }

    pub fn is_unit(&self, a: &[u64]) -> bool {
        self.left_regular(a).inverse().is_some()
    }

    pub fn to_hecke(&self, v: &[u64]) -> HeckeElt {
        let mut h = HeckeElt::zero(self.gd, self.ring);
        for (w, &c) in self.basis.iter().zip(v) {
            h.add_term(*w, c);
        }
        h
    }

    pub fn from_hecke(&self, h: &HeckeElt) -> Result<Vec<u64>> {
        let mut v = vec![0; self.rank()];
        for (w, &c) in h.terms() {
            let i = self
                .index_of(w)
                .ok_or_else(|| Error::InvalidInput(format!("{} is not in the subalgebra", self.gd.display(w))))?;
            v[i] = c;
        }
        Ok(v)
    }

    /// Basis vectors of the algebra generators, in [`Scope::generators`] order.
    pub fn generator_vectors(&self) -> Vec<Vec<u64>> {
        self.scope
            .generators(&self.gd, true)
            .iter()
            .map(|g| self.basis_vector(&g.element(&self.gd)).expect("generator in basis"))
            .collect()
    }

    fn check_associative(&self) -> Result<()> {
        let n = self.rank();
        let e = |i: usize| {
            let mut v = vec![0; n];
            v[i] = 1;
            v
        };
        for i in 0..n {
            for j in 0..n {
                let ij = self.mul(&e(i), &e(j));
                for k in 0..n {
                    if self.mul(&ij, &e(k)) != self.mul(&e(i), &self.mul(&e(j), &e(k))) {
                        return Err(Error::Internal(format!("structure constants not associative at ({i},{j},{k})")));
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weyl::{GroupKind, Letter};

    fn alg(kind: GroupKind, q: u64, m: u64, face: Face, dagger: bool) -> Result<FiniteAlgebra> {
        parahoric_algebra(GroupData::new(kind, q).unwrap(), Zm::new(m).unwrap(), face, dagger)
    }

    #[test]
    fn ranks_match_face_groups() {
        assert_eq!(alg(GroupKind::Sl2, 3, 9, Face::C, false).unwrap().rank(), 2);
        assert_eq!(alg(GroupKind::Sl2, 3, 9, Face::X0, false).unwrap().rank(), 4);
        assert_eq!(alg(GroupKind::Sl2, 3, 9, Face::X1, false).unwrap().rank(), 4);
        let a = alg(GroupKind::Pgl2, 2, 2, Face::C, true).unwrap();
        assert_eq!(a.rank(), 2);
        let om = a.basis_vector(&a.group().omega_elt(1).unwrap()).unwrap();
        assert_eq!(a.mul(&om, &om), a.unit());
    }

    #[test]
    fn gl2_dagger_rejected() {
        assert!(matches!(alg(GroupKind::Gl2, 2, 2, Face::C, true), Err(Error::Unsupported(_))));
    }

    #[test]
    fn reflection_invertible_when_p_is() {
        // q = 2 over Z/3: τ_s² = 2 + τ_s, so τ_s(τ_s − 1) = 2 is a unit.
        let a = alg(GroupKind::Sl2, 2, 3, Face::X0, false).unwrap();
        let s = a.basis_vector(&a.group().reflection(Letter::S0)).unwrap();
        assert!(a.is_unit(&s));
        let a = alg(GroupKind::Sl2, 2, 4, Face::X0, false).unwrap();
        let s = a.basis_vector(&a.group().reflection(Letter::S0)).unwrap();
        assert!(!a.is_unit(&s));
    }
}
