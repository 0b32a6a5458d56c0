use crate::error::Result;
use crate::hecke::{tau_multiply, HeckeElt};
use crate::ring_linalg::{Matrix, Zm};
use crate::weyl::{Face, GroupData, Torus, WeylElt};

/// The commutative group ring `R[T0/T1]`, elements indexed like `torus_elements`.
#[derive(Debug, Clone)]
pub struct GroupRing {
    gd: GroupData,
    ring: Zm,
    torus: Vec<Torus>,
}

impl GroupRing {
    pub fn new(gd: GroupData, ring: Zm) -> Self {
        GroupRing {
            gd,
            ring,
            torus: gd.torus_elements(),
        }
    }

    fn index(&self, t: Torus) -> usize {
        self.torus.iter().position(|x| *x == t).expect("torus element")
    }

    pub fn zero(&self) -> Vec<u64> {
        vec![0; self.torus.len()]
    }

    pub fn one(&self) -> Vec<u64> {
        let mut v = self.zero();
        v[self.index(self.gd.torus_one())] = 1;
        v
    }

    pub fn mul(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let r = self.ring;
        let mut out = self.zero();
        for (i, &x) in a.iter().enumerate().filter(|(_, x)| **x != 0) {
            for (j, &y) in b.iter().enumerate().filter(|(_, y)| **y != 0) {
                let k = self.index(self.gd.torus_mul(self.torus[i], self.torus[j]));
                out[k] = r.add(out[k], r.mul(x, y));
            }
        }
        out
    }

    pub fn sub(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        a.iter().zip(b).map(|(x, y)| self.ring.sub(*x, *y)).collect()
    }

    pub fn is_unit(&self, a: &[u64]) -> bool {
        let n = self.torus.len();
        let mut reg = Matrix::zeros(self.ring, n, n);
        for i in 0..n {
            let mut e = self.zero();
            e[i] = 1;
            reg.row_mut(i).copy_from_slice(&self.mul(&e, a));
        }
        reg.inverse().is_some()
    }

    /// `θ(Σ a_w τ_w) = Σ_ξ a_{ξ w0} τ_ξ`.
    pub fn theta(&self, h: &HeckeElt, w0: &WeylElt) -> Vec<u64> {
        self.torus
            .iter()
            .map(|&t| h.coeff(&self.gd.mul(&self.gd.torus_elt(t), w0)))
            .collect()
    }
}

/// The matrix `(θ(τ_v τ_{w⁻¹ w0}))_{v, w ∈ W_F}` over `R[T0/T1]` and its determinant.
#[derive(Debug, Clone)]
pub struct FrobeniusMatrix {
    pub entries: Vec<Vec<Vec<u64>>>,
    pub determinant: Vec<u64>,
    pub invertible: bool,
}

pub fn frobenius_matrix(gd: GroupData, ring: Zm, face: Face) -> Result<FrobeniusMatrix> {
    let gr = GroupRing::new(gd, ring);
    let mut weyl = vec![gd.identity()];
    if let Some(l) = face.letter() {
        weyl.push(gd.reflection(l));
    }
    let w0 = *weyl.last().expect("nonempty");
    let mut entries = Vec::new();
    for v in &weyl {
        let mut row = Vec::new();
        for w in &weyl {
            let right = gd.mul(&gd.inverse(w), &w0);
            let prod = tau_multiply(&HeckeElt::tau(gd, ring, *v), &HeckeElt::tau(gd, ring, right))?;
            row.push(gr.theta(&prod, &w0));
        }
        entries.push(row);
    }
    let determinant = match entries.len() {
        1 => entries[0][0].clone(),
        _ => gr.sub(
            &gr.mul(&entries[0][0], &entries[1][1]),
            &gr.mul(&entries[0][1], &entries[1][0]),
        ),
    };
    let invertible = gr.is_unit(&determinant);
    Ok(FrobeniusMatrix {
        entries,
        determinant,
        invertible,
    })
}
