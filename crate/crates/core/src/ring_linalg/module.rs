use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::howell::Howell;
use super::matrix::Matrix;
use super::solve::{preimage, solve_many};
use super::zmod::{Order, Zm};
use crate::error::{Error, Result};

/// A finitely generated Z/m-module `R^n / rowspan(relations)`, with the
/// relations kept in Howell form so that equal presentations compare equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PresentedModule {
    rank: usize,
    relations: Howell,
}

#[derive(Serialize, Deserialize)]
struct ModuleJson {
    m: u64,
    rank: usize,
    relations: Matrix,
}

impl Serialize for PresentedModule {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ModuleJson {
            m: self.ring().modulus(),
            rank: self.rank,
            relations: self.relations().clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PresentedModule {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let j = ModuleJson::deserialize(d)?;
        if j.relations.ring().modulus() != j.m {
            return Err(D::Error::custom("relation matrix over a different ring"));
        }
        PresentedModule::new(j.rank, &j.relations).map_err(D::Error::custom)
    }
}

impl PresentedModule {
    pub fn new(rank: usize, relations: &Matrix) -> Result<Self> {
        if relations.cols() != rank {
            return Err(Error::DimensionMismatch(format!(
                "relations with {} columns for rank {rank}",
                relations.cols()
            )));
        }
        Ok(PresentedModule {
            rank,
            relations: Howell::new(relations),
        })
    }

    pub fn free(ring: Zm, rank: usize) -> Self {
        PresentedModule {
            rank,
            relations: Howell::new(&Matrix::zeros(ring, 0, rank)),
        }
    }

    pub fn zero(ring: Zm) -> Self {
        Self::free(ring, 0)
    }

    /// The cyclic module R/(d).
    pub fn cyclic(ring: Zm, d: u64) -> Self {
        let rel = Matrix::from_rows(ring, 1, &[vec![d]]).expect("1x1");
        Self::new(1, &rel).expect("rank 1")
    }

    pub fn ring(&self) -> Zm {
        self.relations.ring()
    }

    /// Number of generators.
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn relations(&self) -> &Matrix {
        self.relations.matrix()
    }

    pub fn howell(&self) -> &Howell {
        &self.relations
    }

    /// Canonical representative of the class of `v`.
    pub fn reduce(&self, v: &[u64]) -> Vec<u64> {
        let mut w: Vec<u64> = v.iter().map(|&e| self.ring().reduce(e)).collect();
        self.relations.reduce(&mut w);
        w
    }

    pub fn is_zero_element(&self, v: &[u64]) -> bool {
        self.relations.contains(v)
    }

    pub fn order(&self) -> Order {
        self.relations.quotient_order()
    }

    pub fn is_zero(&self) -> bool {
        self.relations.is_full()
    }

    /// True iff the module is free on its generators.
    pub fn is_free_on_generators(&self) -> bool {
        self.relations().rows() == 0
    }

    /// Number of elements, when it fits in a u128.
    pub fn cardinality(&self) -> Option<u128> {
        self.order().to_u128()
    }

    /// Canonical representatives of all elements (for small modules). Vectors
    /// with pivot entries below the pivot are exactly the reduced ones.
    pub fn elements(&self) -> Vec<Vec<u64>> {
        let m = self.ring().modulus();
        let mut bound = vec![m; self.rank];
        for &(c, d) in self.relations.pivots() {
            bound[c] = d;
        }
        let mut out = vec![Vec::with_capacity(self.rank)];
        for &b in &bound {
            out = out
                .into_iter()
                .flat_map(|v| {
                    (0..b).map(move |x| {
                        let mut w = v.clone();
                        w.push(x);
                        w
                    })
                })
                .collect();
        }
        out
    }

    /// Submodule generated by the rows of `gens` (vectors in R^rank), presented
    /// on those generators, with its inclusion map.
    pub fn submodule(&self, gens: &Matrix) -> Result<(PresentedModule, ModuleMap)> {
        if gens.cols() != self.rank {
            return Err(Error::DimensionMismatch("submodule generators".into()));
        }
        let rel = preimage(gens, self.relations())?;
        let sub = PresentedModule::new(gens.rows(), &rel)?;
        let incl = ModuleMap {
            domain: sub.clone(),
            codomain: self.clone(),
            matrix: gens.clone(),
        };
        Ok((sub, incl))
    }

    /// Quotient by the submodule generated by the rows of `gens`, with the projection.
    pub fn quotient(&self, gens: &Matrix) -> Result<(PresentedModule, ModuleMap)> {
        let rel = self.relations().vstack(gens)?;
        let q = PresentedModule::new(self.rank, &rel)?;
        let proj = ModuleMap {
            domain: self.clone(),
            codomain: q.clone(),
            matrix: Matrix::identity(self.ring(), self.rank),
        };
        Ok((q, proj))
    }

    pub fn direct_sum(ring: Zm, parts: &[&PresentedModule]) -> PresentedModule {
        let rels: Vec<&Matrix> = parts.iter().map(|p| p.relations()).collect();
        let rel = Matrix::block_diag(ring, &rels);
        let rank = parts.iter().map(|p| p.rank).sum();
        PresentedModule::new(rank, &rel).expect("block sizes agree")
    }

    /// Drop generators that the relations express through later ones.
    /// Returns the smaller module with mutually inverse isomorphisms.
    pub fn prune(&self) -> (PresentedModule, ModuleMap, ModuleMap) {
        let ring = self.ring();
        let mut unit_rows = BTreeMap::new();
        for (i, &(c, d)) in self.relations.pivots().iter().enumerate() {
            if d == 1 {
                unit_rows.insert(c, i);
            }
        }
        let keep: Vec<usize> = (0..self.rank).filter(|c| !unit_rows.contains_key(c)).collect();
        let mut new_index = vec![usize::MAX; self.rank];
        for (k, &c) in keep.iter().enumerate() {
            new_index[c] = k;
        }
        let rel_rows: Vec<usize> = self
            .relations
            .pivots()
            .iter()
            .enumerate()
            .filter(|(_, &(_, d))| d != 1)
            .map(|(i, _)| i)
            .collect();
        let rel = self.relations().select_rows(&rel_rows).select_cols(&keep);
        let small = PresentedModule::new(keep.len(), &rel).expect("column count");
        let mut to_small = Matrix::zeros(ring, self.rank, keep.len());
        for c in 0..self.rank {
            if let Some(&i) = unit_rows.get(&c) {
                // e_c = -(rest of row i)
                for (k, &j) in keep.iter().enumerate() {
                    to_small.set(c, k, ring.neg(self.relations().get(i, j)));
                }
            } else {
                to_small.set(c, new_index[c], 1);
            }
        }
        let from_small = Matrix::identity(ring, self.rank).select_rows(&keep);
        let fwd = ModuleMap {
            domain: self.clone(),
            codomain: small.clone(),
            matrix: to_small,
        };
        let back = ModuleMap {
            domain: small.clone(),
            codomain: self.clone(),
            matrix: from_small,
        };
        (small, fwd, back)
    }

    /// |M[p^k]| for each prime p | m and k = 1..=v_p(m); determines M up to
    /// isomorphism as an abelian group.
    pub fn torsion_profile(&self) -> Vec<(u64, u32, Order)> {
        let ring = self.ring();
        let mut out = Vec::new();
        for (p, e) in ring.factorization() {
            for k in 1..=e {
                let pk = p.pow(k);
                let mult = Matrix::scalar(ring, self.rank, pk);
                let pre = preimage(&mult, self.relations()).expect("square");
                let killed = Howell::new(&pre).span_order();
                let count = killed
                    .div(&self.relations.span_order())
                    .expect("relations lie in the preimage");
                out.push((p, k, count));
            }
        }
        out
    }

    /// Abstract isomorphism of underlying R-modules.
    pub fn is_isomorphic_to(&self, other: &PresentedModule) -> bool {
        self.ring() == other.ring() && self.torsion_profile() == other.torsion_profile()
    }

    pub fn change_ring(&self, target: Zm) -> Result<PresentedModule> {
        let rel = self.relations().change_ring(target)?;
        PresentedModule::new(self.rank, &rel)
    }
}

/// An R-linear map between presented modules, given on generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModuleMap {
    pub domain: PresentedModule,
    pub codomain: PresentedModule,
    pub matrix: Matrix,
}

impl ModuleMap {
    /// Builds the map, checking that relations of the domain land in relations of the codomain.
    pub fn new(domain: PresentedModule, codomain: PresentedModule, matrix: Matrix) -> Result<Self> {
        if matrix.rows() != domain.rank() || matrix.cols() != codomain.rank() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix for a map of ranks {} -> {}",
                matrix.rows(),
                matrix.cols(),
                domain.rank(),
                codomain.rank()
            )));
        }
        let img = domain.relations().mul(&matrix)?;
        for row in img.row_iter() {
            if !codomain.is_zero_element(row) {
                return Err(Error::RelationViolated {
                    relation: "map sends a relation to a nonzero element".into(),
                    witness: row.to_vec(),
                });
            }
        }
        Ok(ModuleMap {
            domain,
            codomain,
            matrix,
        })
    }

    pub fn identity(m: &PresentedModule) -> Self {
        ModuleMap {
            domain: m.clone(),
            codomain: m.clone(),
            matrix: Matrix::identity(m.ring(), m.rank()),
        }
    }

    pub fn zero(domain: &PresentedModule, codomain: &PresentedModule) -> Self {
        ModuleMap {
            domain: domain.clone(),
            codomain: codomain.clone(),
            matrix: Matrix::zeros(domain.ring(), domain.rank(), codomain.rank()),
        }
    }

    pub fn apply(&self, v: &[u64]) -> Vec<u64> {
        self.codomain.reduce(&self.matrix.apply(v))
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &ModuleMap) -> Result<ModuleMap> {
        if self.codomain.rank() != other.domain.rank() {
            return Err(Error::DimensionMismatch("composition".into()));
        }
        Ok(ModuleMap {
            domain: self.domain.clone(),
            codomain: other.codomain.clone(),
            matrix: self.matrix.mul(&other.matrix)?,
        })
    }

    /// Generators of the kernel, as vectors in the domain's ambient space.
    pub fn kernel_generators(&self) -> Matrix {
        preimage(&self.matrix, self.codomain.relations()).expect("shapes agree")
    }

    pub fn kernel(&self) -> (PresentedModule, ModuleMap) {
        self.domain
            .submodule(&self.kernel_generators())
            .expect("kernel generators live in the domain")
    }

    pub fn image(&self) -> (PresentedModule, ModuleMap) {
        self.codomain
            .submodule(&self.matrix)
            .expect("images live in the codomain")
    }

    pub fn cokernel(&self) -> (PresentedModule, ModuleMap) {
        self.codomain.quotient(&self.matrix).expect("images live in the codomain")
    }

    pub fn kernel_order(&self) -> Order {
        let gens = self.kernel_generators();
        Howell::new(&gens)
            .span_order()
            .div(&self.domain.howell().span_order())
            .expect("relations lie in the kernel")
    }

    pub fn image_order(&self) -> Order {
        self.image().0.order()
    }

    pub fn is_injective(&self) -> bool {
        self.kernel_order().is_one()
    }

    pub fn is_surjective(&self) -> bool {
        self.cokernel().0.is_zero()
    }

    pub fn is_isomorphism(&self) -> bool {
        self.is_injective() && self.is_surjective()
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.row_iter().all(|r| self.codomain.is_zero_element(r))
    }

    /// A nonzero domain element killed by the map, if any.
    pub fn kernel_witness(&self) -> Option<Vec<u64>> {
        let gens = self.kernel_generators();
        let found = gens
            .row_iter()
            .find(|r| !self.domain.is_zero_element(r))
            .map(|r| self.domain.reduce(r));
        found
    }

    /// Equality as maps of modules.
    pub fn agrees_with(&self, other: &ModuleMap) -> bool {
        if self.matrix.rows() != other.matrix.rows() || self.matrix.cols() != other.matrix.cols() {
            return false;
        }
        match self.matrix.sub(&other.matrix) {
            Ok(d) => d.row_iter().all(|r| self.codomain.is_zero_element(r)),
            Err(_) => false,
        }
    }

    /// Inverse of an isomorphism.
    pub fn inverse(&self) -> Result<ModuleMap> {
        if !self.is_isomorphism() {
            return Err(Error::InvalidInput("map is not an isomorphism".into()));
        }
        let ring = self.domain.ring();
        let stacked = self.matrix.vstack(self.codomain.relations())?;
        let id = Matrix::identity(ring, self.codomain.rank());
        let sol = solve_many(&stacked, &id)?
            .ok_or_else(|| Error::Internal("surjective map without preimages".into()))?;
        let mat = sol.col_range(0, self.domain.rank());
        ModuleMap::new(self.codomain.clone(), self.domain.clone(), mat)
    }

    /// Express the element `v` of the codomain as an image, if possible.
    pub fn lift(&self, v: &[u64]) -> Result<Option<Vec<u64>>> {
        let stacked = self.matrix.vstack(self.codomain.relations())?;
        let b = Matrix::row_vector(self.domain.ring(), v);
        Ok(solve_many(&stacked, &b)?.map(|x| x.row(0)[..self.domain.rank()].to_vec()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(m: u64) -> Zm {
        Zm::new(m).unwrap()
    }

    #[test]
    fn orders_and_elements() {
        let r = z(4);
        let rel = Matrix::from_rows(r, 2, &[vec![2, 0]]).unwrap();
        let m = PresentedModule::new(2, &rel).unwrap();
        assert_eq!(m.cardinality(), Some(8));
        assert_eq!(m.elements().len(), 8);
        assert!(PresentedModule::cyclic(r, 1).is_zero());
    }

    #[test]
    fn prune_gives_isomorphism() {
        let r = z(9);
        let rel = Matrix::from_rows(r, 3, &[vec![1, 2, 0], vec![0, 0, 3]]).unwrap();
        let m = PresentedModule::new(3, &rel).unwrap();
        let (small, fwd, back) = m.prune();
        assert_eq!(small.rank(), 2);
        assert_eq!(small.order(), m.order());
        assert!(fwd.then(&back).unwrap().agrees_with(&ModuleMap::identity(&m)));
        assert!(back.then(&fwd).unwrap().agrees_with(&ModuleMap::identity(&small)));
    }

    #[test]
    fn rank_nullity_on_enumeration() {
        let r = z(4);
        let dom = PresentedModule::free(r, 2);
        let cod = PresentedModule::cyclic(r, 2);
        let f = ModuleMap::new(dom.clone(), cod, Matrix::from_rows(r, 1, &[vec![1], vec![1]]).unwrap()).unwrap();
        let ker = dom.elements().into_iter().filter(|v| f.apply(v).iter().all(|&e| e == 0)).count();
        assert_eq!(f.kernel_order().to_u128(), Some(ker as u128));
        assert_eq!(f.image_order().to_u128(), Some(2));
        assert!(f.is_surjective());
        assert!(!f.is_injective());
    }

    #[test]
    fn ill_defined_map_rejected() {
        let r = z(4);
        let dom = PresentedModule::cyclic(r, 2);
        let cod = PresentedModule::free(r, 1);
        let bad = Matrix::from_rows(r, 1, &[vec![1]]).unwrap();
        assert!(matches!(ModuleMap::new(dom, cod, bad), Err(Error::RelationViolated { .. })));
    }

    #[test]
    fn inverse_of_iso() {
        let r = z(9);
        let m = PresentedModule::free(r, 2);
        let f = ModuleMap::new(m.clone(), m.clone(), Matrix::from_rows(r, 2, &[vec![1, 1], vec![0, 2]]).unwrap()).unwrap();
        let g = f.inverse().unwrap();
        assert!(f.then(&g).unwrap().agrees_with(&ModuleMap::identity(&m)));
    }

    #[test]
    fn torsion_profile_separates_z4_from_z2_squared() {
        let r = z(4);
        let a = PresentedModule::free(r, 1);
        let b = PresentedModule::direct_sum(r, &[&PresentedModule::cyclic(r, 2), &PresentedModule::cyclic(r, 2)]);
        assert_eq!(a.order(), b.order());
        assert!(!a.is_isomorphic_to(&b));
        assert!(a.is_isomorphic_to(&PresentedModule::cyclic(r, 0)));
    }
}
