use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::ring_linalg::Zm;
use crate::weyl::{Face, GroupData, GroupKind, Torus, WeylElt};

/// A 2×2 matrix over F_q.
pub type Mat2 = [[u64; 2]; 2];

/// The finite reductive quotient `G_F = P_F / P_F^1` at a face of the standard chamber.
///
/// At a vertex this is SL2, GL2 or PGL2 over F_q, written in coordinates where
/// the Iwahori subgroup maps onto the upper (x0) or lower (x1) Borel. At the
/// chamber it is the torus T(k).
#[derive(Debug, Clone)]
pub struct FiniteQuotient {
    gd: GroupData,
    face: Face,
    elements: Vec<Mat2>,
    index: HashMap<Mat2, usize>,
    table: Vec<usize>,
    inverses: Vec<usize>,
    unipotent: Vec<usize>,
    opposite: Vec<usize>,
    torus: Vec<usize>,
    borel: Vec<usize>,
}

fn mat_mul(f: Zm, a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[0; 2]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, e) in row.iter_mut().enumerate() {
            *e = f.add(f.mul(a[i][0], b[0][j]), f.mul(a[i][1], b[1][j]));
        }
    }
    out
}

fn det(f: Zm, a: &Mat2) -> u64 {
    f.sub(f.mul(a[0][0], a[1][1]), f.mul(a[0][1], a[1][0]))
}

impl FiniteQuotient {
    pub fn new(gd: GroupData, face: Face) -> Result<Self> {
        let f = gd.field();
        let q = gd.q();
        let mut elements = Vec::new();
        if face.is_vertex() {
            for a in 0..q {
                for b in 0..q {
                    for c in 0..q {
                        for d in 0..q {
                            let m = [[a, b], [c, d]];
                            let dt = det(f, &m);
                            let keep = match gd.kind() {
                                GroupKind::Sl2 => dt == 1,
                                GroupKind::Gl2 => dt != 0,
                                GroupKind::Pgl2 => dt != 0 && Self::normalize_with(gd, m) == m,
                            };
                            if keep {
                                elements.push(m);
                            }
                        }
                    }
                }
            }
        } else {
            elements = gd
                .torus_elements()
                .into_iter()
                .map(|t| Self::normalize_with(gd, gd.torus_matrix(t)))
                .collect();
        }
        let index: HashMap<Mat2, usize> = elements.iter().enumerate().map(|(i, m)| (*m, i)).collect();
        let n = elements.len();
        let mut table = vec![0; n * n];
        for (i, a) in elements.iter().enumerate() {
            for (j, b) in elements.iter().enumerate() {
                let p = Self::normalize_with(gd, mat_mul(f, a, b));
                table[i * n + j] = *index
                    .get(&p)
                    .ok_or_else(|| Error::Internal("finite quotient not closed under products".into()))?;
            }
        }
        let one = index[&Self::normalize_with(gd, [[1, 0], [0, 1]])];
        let inverses = (0..n)
            .map(|i| (0..n).find(|&j| table[i * n + j] == one).expect("finite group"))
            .collect();
        let lookup = |m: Mat2| index.get(&Self::normalize_with(gd, m)).copied();
        let upper: Vec<usize> = (0..q).filter_map(|a| lookup([[1, a], [0, 1]])).collect();
        let lower: Vec<usize> = (0..q).filter_map(|a| lookup([[1, 0], [a, 1]])).collect();
        let (unipotent, opposite) = match face {
            Face::X0 => (upper, lower),
            Face::X1 => (lower, upper),
            Face::C => (vec![one], vec![one]),
        };
        let torus: Vec<usize> = gd
            .torus_elements()
            .into_iter()
            .map(|t| lookup(gd.torus_matrix(t)).expect("torus lies in every quotient"))
            .collect();
        let mut borel: Vec<usize> = torus
            .iter()
            .flat_map(|&t| unipotent.iter().map(|&u| table[t * n + u]).collect::<Vec<_>>())
            .collect();
        borel.sort_unstable();
        borel.dedup();
        Ok(FiniteQuotient {
            gd,
            face,
            elements,
            index,
            table,
            inverses,
            unipotent,
            opposite,
            torus,
            borel,
        })
    }

    fn normalize_with(gd: GroupData, m: Mat2) -> Mat2 {
        if gd.kind() != GroupKind::Pgl2 {
            return m;
        }
        let f = gd.field();
        let lead = m.iter().flatten().copied().find(|&x| x != 0).unwrap_or(1);
        let inv = f.inv(lead).expect("nonzero in a field");
        m.map(|row| row.map(|x| f.mul(x, inv)))
    }

    pub fn group(&self) -> GroupData {
        self.gd
    }

    pub fn face(&self) -> Face {
        self.face
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn element(&self, i: usize) -> Mat2 {
        self.elements[i]
    }

    pub fn identity(&self) -> usize {
        self.index[&Self::normalize_with(self.gd, [[1, 0], [0, 1]])]
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order() + b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverses[a]
    }

    /// Index of a matrix over F_q (entries reduced mod q), if it lies in the group.
    pub fn find(&self, m: Mat2) -> Option<usize> {
        let q = self.gd.q();
        let m = m.map(|row| row.map(|x| x % q));
        self.index.get(&Self::normalize_with(self.gd, m)).copied()
    }

    /// Image of the pro-p Iwahori subgroup.
    pub fn unipotent(&self) -> &[usize] {
        &self.unipotent
    }

    /// The opposite unipotent subgroup.
    pub fn opposite(&self) -> &[usize] {
        &self.opposite
    }

    /// Image of T0, indexed like `GroupData::torus_elements`.
    pub fn torus(&self) -> &[usize] {
        &self.torus
    }

    /// Image of the Iwahori subgroup.
    pub fn borel(&self) -> &[usize] {
        &self.borel
    }

    /// Torus class of an element of the Iwahori image.
    pub fn torus_class(&self, b: usize) -> Result<Torus> {
        if self.borel.binary_search(&b).is_err() {
            return Err(Error::InvalidInput("element is not in the Iwahori image".into()));
        }
        let m = self.elements[b];
        let f = self.gd.field();
        let (a, d) = (m[0][0], m[1][1]);
        Ok(match self.gd.kind() {
            GroupKind::Sl2 => Torus([a, 1]),
            GroupKind::Pgl2 => Torus([f.mul(a, f.inv(d).expect("unit")), 1]),
            GroupKind::Gl2 => Torus([a, d]),
        })
    }

    /// Image of the lift of `w ∈ W̃_F`.
    pub fn lift(&self, w: &WeylElt) -> Result<usize> {
        if w.omega != 0 {
            return Err(Error::InvalidInput("ω has no image in a parahoric quotient".into()));
        }
        let t = self.find(self.gd.torus_matrix(w.torus)).expect("torus lies in every quotient");
        match (w.word.len, self.face.letter()) {
            (0, _) => Ok(t),
            (1, Some(l)) if w.word.first == l => {
                let m1 = self.gd.q() - 1;
                let n = match self.face {
                    Face::X0 => [[0, 1], [m1, 0]],
                    _ => [[0, m1], [1, 0]],
                };
                Ok(self.mul(t, self.find(n).expect("reflection lies in the group")))
            }
            _ => Err(Error::InvalidInput(format!("{} is not in W̃_{}", self.gd.display(w), self.face))),
        }
    }

    /// Left cosets `gU`: the coset index of every element, and one representative per coset.
    pub fn unipotent_cosets(&self) -> (Vec<usize>, Vec<usize>) {
        let n = self.order();
        let mut coset = vec![usize::MAX; n];
        let mut reps = Vec::new();
        for g in 0..n {
            if coset[g] != usize::MAX {
                continue;
            }
            for &u in &self.unipotent {
                coset[self.mul(g, u)] = reps.len();
            }
            reps.push(g);
        }
        (coset, reps)
    }

    /// Representatives of `U ẇ U / U`.
    pub fn double_coset_reps(&self, w: &WeylElt) -> Result<Vec<usize>> {
        let wl = self.lift(w)?;
        let (coset, _) = self.unipotent_cosets();
        let mut seen = std::collections::BTreeMap::new();
        for &u in &self.unipotent {
            let g = self.mul(u, wl);
            seen.entry(coset[g]).or_insert(g);
        }
        Ok(seen.into_values().collect())
    }

    /// A small generating set.
    pub fn generators(&self) -> Vec<usize> {
        let mut gens: Vec<usize> = self.torus.clone();
        gens.extend(self.unipotent.iter().copied());
        gens.extend(self.opposite.iter().copied());
        if let Some(l) = self.face.letter() {
            if let Ok(s) = self.lift(&self.gd.reflection(l)) {
                gens.push(s);
            }
        }
        gens.sort_unstable();
        gens.dedup();
        gens
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quot(kind: GroupKind, q: u64, face: Face) -> FiniteQuotient {
        FiniteQuotient::new(GroupData::new(kind, q).unwrap(), face).unwrap()
    }

    #[test]
    fn orders() {
        assert_eq!(quot(GroupKind::Sl2, 3, Face::X0).order(), 24);
        assert_eq!(quot(GroupKind::Gl2, 3, Face::X1).order(), 48);
        assert_eq!(quot(GroupKind::Pgl2, 3, Face::X0).order(), 24);
        assert_eq!(quot(GroupKind::Gl2, 3, Face::C).order(), 4);
        assert_eq!(quot(GroupKind::Sl2, 2, Face::C).order(), 1);
    }

    #[test]
    fn double_cosets_are_indexed_by_the_face_group() {
        for kind in [GroupKind::Sl2, GroupKind::Gl2, GroupKind::Pgl2] {
            for q in [2, 3] {
                for face in Face::ALL {
                    let g = quot(kind, q, face);
                    let gd = g.group();
                    let (coset, reps) = g.unipotent_cosets();
                    let mut hit = vec![false; reps.len()];
                    for w in gd.face_group(face, false).unwrap() {
                        for r in g.double_coset_reps(&w).unwrap() {
                            assert!(!hit[coset[r]], "double cosets overlap");
                            hit[coset[r]] = true;
                        }
                    }
                    assert!(hit.iter().all(|&h| h), "double cosets miss part of G/U");
                }
            }
        }
    }

    #[test]
    fn borel_has_expected_size() {
        let g = quot(GroupKind::Gl2, 3, Face::X0);
        assert_eq!(g.borel().len(), 12);
        for &b in g.borel() {
            g.torus_class(b).unwrap();
        }
    }
}
