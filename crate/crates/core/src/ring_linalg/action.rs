use super::matrix::Matrix;
use super::module::{ModuleMap, PresentedModule};
use super::solve::{preimage, solve_many};
use super::zmod::Zm;
use crate::error::{Error, Result};

/// A presented module together with one action matrix per algebra generator.
///
/// Each matrix acts on row vectors of generator coordinates. Hom and tensor
/// only need the generators; which side the algebra acts on does not matter
/// for the equations below.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionModule {
    pub carrier: PresentedModule,
    pub actions: Vec<Matrix>,
}

impl ActionModule {
    pub fn new(carrier: PresentedModule, actions: Vec<Matrix>) -> Result<Self> {
        let n = carrier.rank();
        for (i, a) in actions.iter().enumerate() {
            if a.rows() != n || a.cols() != n {
                return Err(Error::DimensionMismatch(format!(
                    "action {i} is {}x{} on a module with {n} generators",
                    a.rows(),
                    a.cols()
                )));
            }
            ModuleMap::new(carrier.clone(), carrier.clone(), a.clone())?;
        }
        Ok(ActionModule { carrier, actions })
    }

    pub fn ring(&self) -> Zm {
        self.carrier.ring()
    }
}

/// The R-module of generator-equivariant maps `P → M`.
#[derive(Debug, Clone)]
pub struct HomSpace {
    /// Presentation of Hom on the generators `maps`.
    pub module: PresentedModule,
    /// One `rank(P) × rank(M)` matrix per generator of `module`.
    pub maps: Vec<Matrix>,
}

fn check_algebra(p: &ActionModule, m: &ActionModule) -> Result<()> {
    if p.ring() != m.ring() {
        return Err(Error::RingMismatch(p.ring().modulus(), m.ring().modulus()));
    }
    if p.actions.len() != m.actions.len() {
        return Err(Error::AlgebraMismatch(format!(
            "{} vs {} generators",
            p.actions.len(),
            m.actions.len()
        )));
    }
    Ok(())
}

/// Hom between modules over the same generated algebra.
///
/// Unknowns are the entries of F (x ↦ x·F). Conditions: relations of P map
/// into relations of M, and `A_g F − F B_g` has rows in the relations of M.
pub fn module_hom_space(p: &ActionModule, m: &ActionModule) -> Result<HomSpace> {
    check_algebra(p, m)?;
    let ring = p.ring();
    let (np, nm) = (p.carrier.rank(), m.carrier.rank());
    let nvars = np * nm;
    let rel_p = p.carrier.relations();
    let blocks = rel_p.rows() + p.actions.len() * np;
    let mut lin = Matrix::zeros(ring, nvars, blocks * nm);
    let mut block = 0;
    for u in rel_p.row_iter() {
        for (i, &ui) in u.iter().enumerate() {
            if ui == 0 {
                continue;
            }
            for j in 0..nm {
                lin.add_at(i * nm + j, block * nm + j, ui);
            }
        }
        block += 1;
    }
    for (a, b) in p.actions.iter().zip(&m.actions) {
        for i in 0..np {
            for j in 0..nm {
                for k in 0..np {
                    let c = a.get(i, k);
                    if c != 0 {
                        lin.add_at(k * nm + j, block * nm + j, c);
                    }
                }
                for k in 0..nm {
                    let c = b.get(k, j);
                    if c != 0 {
                        lin.add_at(i * nm + k, block * nm + j, ring.neg(c));
                    }
                }
            }
            block += 1;
        }
    }
    let rel_m = m.carrier.relations();
    let copies: Vec<&Matrix> = (0..blocks).map(|_| rel_m).collect();
    let target = Matrix::block_diag(ring, &copies);
    let sols = preimage(&lin, &target)?;
    // Maps whose every row lies in the relations of M are zero.
    let zero_copies: Vec<&Matrix> = (0..np).map(|_| rel_m).collect();
    let zero_maps = Matrix::block_diag(ring, &zero_copies);
    let (module, _) = PresentedModule::new(nvars, &zero_maps)?.submodule(&sols)?;
    let maps = sols
        .row_iter()
        .map(|r| Matrix::from_vec(ring, np, nm, r.to_vec()).expect("np*nm entries"))
        .collect();
    let raw = HomSpace { module, maps };
    Ok(prune_hom(raw))
}

fn prune_hom(h: HomSpace) -> HomSpace {
    let (small, _, back) = h.module.prune();
    let ring = small.ring();
    let maps = (0..small.rank())
        .map(|i| {
            let coeffs = back.matrix.row(i);
            let mut acc: Option<Matrix> = None;
            for (c, f) in coeffs.iter().zip(&h.maps) {
                if *c == 0 {
                    continue;
                }
                let term = f.scale(*c);
                acc = Some(match acc {
                    None => term,
                    Some(a) => a.add(&term).expect("same shape"),
                });
            }
            acc.unwrap_or_else(|| {
                let f = &h.maps[0];
                Matrix::zeros(ring, f.rows(), f.cols())
            })
        })
        .collect();
    HomSpace {
        module: small,
        maps,
    }
}

/// `X ⊗_A M` for a right module X and a left module M over the same generators:
/// the cokernel of the balancing relations `x·g ⊗ m − x ⊗ g·m`.
pub fn module_tensor(x: &ActionModule, m: &ActionModule) -> Result<PresentedModule> {
    check_algebra(x, m)?;
    let ring = x.ring();
    let (nx, nm) = (x.carrier.rank(), m.carrier.rank());
    let mut rel = Matrix::zeros(ring, 0, nx * nm);
    let mut row = vec![0u64; nx * nm];
    for r in x.carrier.relations().row_iter() {
        for j in 0..nm {
            row.iter_mut().for_each(|e| *e = 0);
            for (i, &c) in r.iter().enumerate() {
                row[i * nm + j] = c;
            }
            rel.push_row(&row);
        }
    }
    for r in m.carrier.relations().row_iter() {
        for i in 0..nx {
            row.iter_mut().for_each(|e| *e = 0);
            row[i * nm..(i + 1) * nm].copy_from_slice(r);
            rel.push_row(&row);
        }
    }
    for (a, b) in x.actions.iter().zip(&m.actions) {
        for i in 0..nx {
            for j in 0..nm {
                row.iter_mut().for_each(|e| *e = 0);
                for k in 0..nx {
                    let c = a.get(i, k);
                    if c != 0 {
                        let s = &mut row[k * nm + j];
                        *s = ring.add(*s, c);
                    }
                }
                for l in 0..nm {
                    let c = b.get(j, l);
                    if c != 0 {
                        let s = &mut row[i * nm + l];
                        *s = ring.sub(*s, c);
                    }
                }
                rel.push_row(&row);
            }
        }
    }
    PresentedModule::new(nx * nm, &rel)
}

/// `Hom_R(M, R)`, presented on functionals `f ∈ R^n` with `rel·f = 0`
/// (rows of the returned matrix; `f` evaluates `x ↦ Σ x_i f_i`).
pub fn module_dual(m: &PresentedModule) -> (PresentedModule, Matrix) {
    let ring = m.ring();
    let funcs = preimage(&m.relations().transpose(), &Matrix::zeros(ring, 0, m.relations().rows()))
        .expect("shapes agree");
    let (dual, _) = PresentedModule::free(ring, m.rank())
        .submodule(&funcs)
        .expect("functionals live in R^n");
    (dual, funcs)
}

/// The evaluation map `M → M**` in the presentations produced by `module_dual`.
pub fn double_dual_map(m: &PresentedModule) -> Result<ModuleMap> {
    let (dual, funcs) = module_dual(m);
    let (ddual, funcs2) = module_dual(&dual);
    // ev(e_i) is the functional f ↦ f_i on the generators of M*, i.e. column i of `funcs`.
    let targets = funcs.transpose();
    let sol = solve_many(&funcs2, &targets)?
        .ok_or_else(|| Error::Internal("evaluation is not a functional on M*".into()))?;
    ModuleMap::new(m.clone(), ddual, sol)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(m: u64) -> Zm {
        Zm::new(m).unwrap()
    }

    #[test]
    fn hom_over_trivial_algebra() {
        let r = z(5);
        let free = ActionModule::new(PresentedModule::free(r, 1), vec![]).unwrap();
        let h = module_hom_space(&free, &free).unwrap();
        assert_eq!(h.module.cardinality(), Some(5));
        assert_eq!(h.maps.len(), 1);
    }

    #[test]
    fn hom_counts_commuting_matrices() {
        // Hom over k[x] of (k^2, nilpotent Jordan block) to itself: the
        // centralizer of J has dimension 2 over F_3; check by enumeration.
        let r = z(3);
        let j = Matrix::from_rows(r, 2, &[vec![0, 1], vec![0, 0]]).unwrap();
        let p = ActionModule::new(PresentedModule::free(r, 2), vec![j.clone()]).unwrap();
        let h = module_hom_space(&p, &p).unwrap();
        let mut count = 0;
        for e in 0..81u64 {
            let f = Matrix::from_vec(r, 2, 2, vec![e % 3, e / 3 % 3, e / 9 % 3, e / 27]).unwrap();
            if j.mul(&f).unwrap() == f.mul(&j).unwrap() {
                count += 1;
            }
        }
        assert_eq!(h.module.cardinality(), Some(count));
        assert_eq!(count, 9);
    }

    #[test]
    fn tensor_with_zero_and_unit() {
        let r = z(4);
        let x = ActionModule::new(PresentedModule::free(r, 3), vec![Matrix::identity(r, 3)]).unwrap();
        let zero = ActionModule::new(PresentedModule::zero(r), vec![Matrix::zeros(r, 0, 0)]).unwrap();
        assert!(module_tensor(&x, &zero).unwrap().is_zero());
        let one = ActionModule::new(PresentedModule::free(r, 1), vec![Matrix::identity(r, 1)]).unwrap();
        assert_eq!(module_tensor(&one, &one).unwrap().cardinality(), Some(4));
    }

    #[test]
    fn duals_of_cyclic_modules() {
        let r = z(4);
        let (d, _) = module_dual(&PresentedModule::free(r, 1));
        assert_eq!(d.cardinality(), Some(4));
        let (d, _) = module_dual(&PresentedModule::cyclic(r, 2));
        assert_eq!(d.cardinality(), Some(2));
        let (d, _) = module_dual(&PresentedModule::zero(r));
        assert!(d.is_zero());
    }

    #[test]
    fn double_dual_is_iso_on_small_modules() {
        let r = z(12);
        let rel = Matrix::from_rows(r, 2, &[vec![2, 4], vec![0, 6]]).unwrap();
        let m = PresentedModule::new(2, &rel).unwrap();
        assert!(double_dual_map(&m).unwrap().is_isomorphism());
    }
}
