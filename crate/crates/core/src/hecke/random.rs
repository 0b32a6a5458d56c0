//! Seeded random finite modules over H and its parahoric subalgebras.
//!
//! Modules are built as iterated extensions of rank-one pieces. The
//! off-diagonal blocks of an extension are drawn from the solution space of
//! the linearised defining relations, so split and non-split extensions both
//! occur. The result is then conjugated by a random change of basis and
//! sometimes cut down by a cyclic submodule.

use rand::seq::SliceRandom;
use rand::Rng;

use super::module::{Generator, HeckeModule, Scope};
use crate::error::{Error, Result};
use crate::ring_linalg::{preimage, Howell, Matrix, ModuleMap, PresentedModule, Zm};
use crate::weyl::{GroupData, GroupKind, Letter};

fn assemble(gd: GroupData, scope: Scope, carrier: PresentedModule, gens: &[Generator], mats: Vec<Matrix>) -> HeckeModule {
    let mut m = HeckeModule {
        gd,
        scope,
        carrier,
        torus: Vec::new(),
        s0: None,
        s1: None,
        omega: None,
    };
    for (g, a) in gens.iter().zip(mats) {
        match g {
            Generator::Torus(_) => m.torus.push(a),
            Generator::S(Letter::S0) => m.s0 = Some(a),
            Generator::S(Letter::S1) => m.s1 = Some(a),
            Generator::Omega => m.omega = Some(a),
        }
    }
    m
}

fn matrices(m: &HeckeModule, gens: &[Generator]) -> Vec<Matrix> {
    gens.iter()
        .map(|g| m.generator_matrix(*g).expect("generator present").clone())
        .collect()
}

/// All rank-one modules `R/d` (for every divisor `d > 1` of m) on which the
/// listed generators act by scalars, found by exhaustive search.
pub fn rank_one_modules(gd: GroupData, ring: Zm, scope: Scope, gens: &[Generator]) -> Vec<HeckeModule> {
    let m = ring.modulus();
    let n_torus = gens.iter().filter(|g| matches!(g, Generator::Torus(_))).count();
    let rest = &gens[n_torus..];
    let mut out = Vec::new();
    for d in (2..=m).filter(|d| m.is_multiple_of(*d)) {
        let carrier = PresentedModule::cyclic(ring, d);
        let scalar = |x: u64| Matrix::scalar(ring, 1, x);
        let mut torus_choices = vec![Vec::new()];
        for _ in 0..n_torus {
            torus_choices = torus_choices
                .into_iter()
                .flat_map(|prefix: Vec<u64>| {
                    (0..d).map(move |x| {
                        let mut v = prefix.clone();
                        v.push(x);
                        v
                    })
                })
                .collect();
        }
        for tv in torus_choices {
            let base: Vec<Matrix> = tv.iter().map(|&x| scalar(x)).collect();
            let probe = assemble(gd, scope, carrier.clone(), &gens[..n_torus], base.clone());
            if probe.check_residuals().is_err() {
                continue;
            }
            // Backtrack over the remaining generators, checking as soon as each is set.
            let mut stack = vec![base];
            while let Some(partial) = stack.pop() {
                let k = partial.len() - n_torus;
                if k == rest.len() {
                    out.push(assemble(gd, scope, carrier.clone(), gens, partial));
                    continue;
                }
                for x in (0..d).rev() {
                    if rest[k] == Generator::Omega && crate::ring_linalg::gcd(x, d) != 1 {
                        continue;
                    }
                    let mut next = partial.clone();
                    next.push(scalar(x));
                    let probe = assemble(gd, scope, carrier.clone(), &gens[..next.len()], next.clone());
                    if probe.check_residuals().is_ok() {
                        stack.push(next);
                    }
                }
            }
        }
    }
    out
}

/// `N ⊕ N^ω` with τ_ω swapping the summands, for N a module over the
/// subalgebra without τ_ω (PGL2 only, where ω² = 1).
pub fn omega_double(n: &HeckeModule) -> Result<HeckeModule> {
    let gd = n.gd;
    if gd.kind() != GroupKind::Pgl2 {
        return Err(Error::Unsupported("ω-doubling needs ω of order 2".into()));
    }
    let ring = n.ring();
    let (s0, s1) = match (&n.s0, &n.s1) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(Error::InvalidInput("ω-doubling needs both reflections".into())),
    };
    let r = n.rank();
    let torus = gd
        .torus_generators()
        .iter()
        .zip(&n.torus)
        .map(|(t, a)| Matrix::block_diag(ring, &[a, &n.torus_action(gd.torus_swap(*t))]))
        .collect();
    let id = Matrix::identity(ring, r);
    let zero = Matrix::zeros(ring, r, r);
    let omega = zero.hstack(&id)?.vstack(&id.hstack(&zero)?)?;
    let m = HeckeModule {
        gd,
        scope: Scope::Full,
        carrier: PresentedModule::direct_sum(ring, &[&n.carrier, &n.carrier]),
        torus,
        s0: Some(Matrix::block_diag(ring, &[s0, s1])),
        s1: Some(Matrix::block_diag(ring, &[s1, s0])),
        omega: Some(omega),
    };
    m.validate()?;
    Ok(m)
}

fn block_lower(a: &Matrix, x: &Matrix, b: &Matrix) -> Matrix {
    let ring = a.ring();
    let top = a.hstack(&Matrix::zeros(ring, a.rows(), b.cols())).expect("rows agree");
    let bottom = x.hstack(b).expect("rows agree");
    top.vstack(&bottom).expect("cols agree")
}

/// Generators of all off-diagonal blocks X making `[[A, 0], [X, B]]` a module
/// with `sub` as submodule and `top` as quotient. Rows are flattened X tuples.
pub fn extension_space(sub: &HeckeModule, top: &HeckeModule, gens: &[Generator]) -> Result<Matrix> {
    let ring = sub.ring();
    let (a, b) = (sub.rank(), top.rank());
    let per = b * a;
    let unknowns = gens.len() * per;
    let carrier = PresentedModule::direct_sum(ring, &[&sub.carrier, &top.carrier]);
    let sub_m = matrices(sub, gens);
    let top_m = matrices(top, gens);
    let build = |xs: &[Matrix]| -> HeckeModule {
        let mats = sub_m
            .iter()
            .zip(xs)
            .zip(&top_m)
            .map(|((am, x), bm)| block_lower(am, x, bm))
            .collect();
        assemble(sub.gd, sub.scope, carrier.clone(), gens, mats)
    };
    let rel_b = top.carrier.relations();
    let mut rows: Vec<Vec<u64>> = Vec::with_capacity(unknowns);
    for u in 0..unknowns {
        let mut xs = vec![Matrix::zeros(ring, b, a); gens.len()];
        xs[u / per].set((u % per) / a, u % a, 1);
        let ext = build(&xs);
        let mut v = Vec::new();
        for (_, res) in ext.relation_residuals() {
            for i in a..a + b {
                v.extend_from_slice(&res.row(i)[..a]);
            }
        }
        // Relations of the quotient must map into relations of the sub.
        for x in &xs {
            let img = rel_b.mul(x)?;
            v.extend(img.entries().iter().copied());
        }
        rows.push(v);
    }
    let width = rows.first().map_or(0, |r| r.len());
    let f = Matrix::from_rows(ring, width, &rows)?;
    let blocks = width / a.max(1);
    let rel_a = sub.carrier.relations();
    let copies: Vec<&Matrix> = (0..blocks).map(|_| rel_a).collect();
    let s = if a == 0 {
        Matrix::zeros(ring, 0, width)
    } else {
        Matrix::block_diag(ring, &copies)
    };
    preimage(&f, &s)
}

/// A random extension of `top` by `sub`.
pub fn random_extension<G: Rng>(sub: &HeckeModule, top: &HeckeModule, rng: &mut G) -> Result<HeckeModule> {
    let gens = sub.generators();
    if gens != top.generators() {
        return Err(Error::AlgebraMismatch("extension of modules over different algebras".into()));
    }
    let ring = sub.ring();
    let (a, b) = (sub.rank(), top.rank());
    let space = extension_space(sub, top, &gens)?;
    let mut x = vec![0u64; gens.len() * a * b];
    for row in space.row_iter() {
        let c = rng.gen_range(0..ring.modulus());
        for (xi, &r) in x.iter_mut().zip(row) {
            *xi = ring.add(*xi, ring.mul(c, r));
        }
    }
    let per = a * b;
    let mats = gens
        .iter()
        .enumerate()
        .map(|(g, _)| {
            let block = Matrix::from_vec(ring, b, a, x[g * per..(g + 1) * per].to_vec()).expect("block size");
            block_lower(
                sub.generator_matrix(gens[g]).expect("present"),
                &block,
                top.generator_matrix(gens[g]).expect("present"),
            )
        })
        .collect();
    let carrier = PresentedModule::direct_sum(ring, &[&sub.carrier, &top.carrier]);
    let m = assemble(sub.gd, sub.scope, carrier, &gens, mats);
    m.validate()?;
    Ok(m)
}

fn random_invertible<G: Rng>(ring: Zm, n: usize, rng: &mut G) -> Option<(Matrix, Matrix)> {
    for _ in 0..64 {
        let data = (0..n * n).map(|_| rng.gen_range(0..ring.modulus())).collect();
        let p = Matrix::from_vec(ring, n, n, data).expect("square");
        if let Some(inv) = p.inverse() {
            return Some((p, inv));
        }
    }
    None
}

/// Re-present `m` in a random basis.
pub fn random_conjugate<G: Rng>(m: &HeckeModule, rng: &mut G) -> Result<HeckeModule> {
    let Some((p, inv)) = random_invertible(m.ring(), m.rank(), rng) else {
        return Ok(m.clone());
    };
    let new_carrier = PresentedModule::new(m.rank(), &m.carrier.relations().mul(&p)?)?;
    let iso = ModuleMap::new(m.carrier.clone(), new_carrier.clone(), p)?;
    let back = ModuleMap::new(new_carrier, m.carrier.clone(), inv)?;
    m.transport(&iso, &back)
}

/// Generators of the submodule spanned by `v` and its images under all generators.
pub fn cyclic_submodule(m: &HeckeModule, v: &[u64]) -> Matrix {
    let ring = m.ring();
    let mats: Vec<Matrix> = matrices(m, &m.generators());
    let mut span = Howell::from_rows(ring, m.rank(), vec![v.to_vec()]);
    loop {
        let before = span.span_order();
        let mut rows: Vec<Vec<u64>> = span.matrix().to_rows();
        for a in &mats {
            for r in span.matrix().row_iter() {
                rows.push(a.apply(r));
            }
        }
        span = Howell::from_rows(ring, m.rank(), rows);
        if span.span_order() == before {
            return span.into_matrix();
        }
    }
}

/// Quotient of `m` by a submodule, with the induced actions.
pub fn quotient_module(m: &HeckeModule, gens: &Matrix) -> Result<HeckeModule> {
    let (q, _) = m.carrier.quotient(gens)?;
    let out = HeckeModule {
        carrier: q,
        ..m.clone()
    };
    out.validate()?;
    Ok(out.pruned())
}

/// Building blocks for random modules in a given scope.
pub fn pieces(gd: GroupData, ring: Zm, scope: Scope) -> Result<Vec<HeckeModule>> {
    scope.check(&gd)?;
    let gens = scope.generators(&gd, true);
    let mut out = rank_one_modules(gd, ring, scope, &gens);
    if scope == Scope::Full && gd.kind() == GroupKind::Pgl2 {
        let affine: Vec<Generator> = gens.iter().copied().filter(|g| *g != Generator::Omega).collect();
        for n in rank_one_modules(gd, ring, scope, &affine) {
            out.push(omega_double(&n)?);
        }
    }
    Ok(out)
}

/// A random module of rank at most `max_rank` built from `pieces`.
pub fn random_module_from<G: Rng>(pieces: &[HeckeModule], max_rank: usize, rng: &mut G) -> Result<HeckeModule> {
    let target = rng.gen_range(1..=max_rank.max(1));
    let fitting = |room: usize| -> Vec<&HeckeModule> { pieces.iter().filter(|p| p.rank() <= room).collect() };
    let first = fitting(target)
        .choose(rng)
        .copied()
        .ok_or_else(|| Error::Internal("no module pieces available".into()))?
        .clone();
    let mut m = first;
    while m.rank() < target {
        let Some(p) = fitting(target - m.rank()).choose(rng).copied() else {
            break;
        };
        m = if rng.gen_bool(0.5) {
            random_extension(&m, p, rng)?
        } else {
            random_extension(p, &m, rng)?
        };
    }
    if rng.gen_bool(0.5) {
        m = random_conjugate(&m, rng)?;
    }
    if m.rank() > 1 && rng.gen_bool(0.25) {
        let v: Vec<u64> = (0..m.rank()).map(|_| rng.gen_range(0..m.ring().modulus())).collect();
        let sub = cyclic_submodule(&m, &v);
        let q = quotient_module(&m, &sub)?;
        if !q.carrier.is_zero() {
            m = q;
        }
    }
    m.validate()?;
    Ok(m)
}

/// A random module over the algebra of `scope`, of rank at most `max_rank`.
pub fn random_module<G: Rng>(gd: GroupData, ring: Zm, scope: Scope, max_rank: usize, rng: &mut G) -> Result<HeckeModule> {
    random_module_from(&pieces(gd, ring, scope)?, max_rank, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weyl::Face;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rank_one_sl2_q2_z2() {
        // Over F_2 with q = 2: τ_s² = τ_s, so each τ_s acts by 0 or 1.
        let gd = GroupData::new(GroupKind::Sl2, 2).unwrap();
        let ring = Zm::new(2).unwrap();
        let gens = Scope::Full.generators(&gd, false);
        assert_eq!(rank_one_modules(gd, ring, Scope::Full, &gens).len(), 4);
    }

    #[test]
    fn random_modules_validate() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for (kind, q, m) in [
            (GroupKind::Sl2, 2, 4),
            (GroupKind::Sl2, 3, 9),
            (GroupKind::Pgl2, 3, 3),
            (GroupKind::Gl2, 2, 4),
        ] {
            let gd = GroupData::new(kind, q).unwrap();
            let ring = Zm::new(m).unwrap();
            for scope in [
                Scope::Full,
                Scope::Face {
                    face: Face::X0,
                    dagger: false,
                },
            ] {
                let pieces = pieces(gd, ring, scope).unwrap();
                for _ in 0..10 {
                    let md = random_module_from(&pieces, 3, &mut rng).unwrap();
                    assert!(md.rank() <= 3);
                    md.validate().unwrap();
                }
            }
        }
    }

    #[test]
    fn pgl2_doubling_is_nontrivial() {
        let gd = GroupData::new(GroupKind::Pgl2, 2).unwrap();
        let ring = Zm::new(2).unwrap();
        let p = pieces(gd, ring, Scope::Full).unwrap();
        assert!(p.iter().any(|m| m.rank() == 2 && m.s0 != m.s1));
    }

    #[test]
    fn nonsplit_extensions_occur() {
        let gd = GroupData::new(GroupKind::Sl2, 2).unwrap();
        let ring = Zm::new(2).unwrap();
        let gens = Scope::Full.generators(&gd, false);
        let chars = rank_one_modules(gd, ring, Scope::Full, &gens);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut found = false;
        for a in &chars {
            for b in &chars {
                let split = random_extension_with_zero(a, b);
                for _ in 0..8 {
                    let e = random_extension(a, b, &mut rng).unwrap();
                    if !e.is_isomorphic_to(&split).unwrap() {
                        found = true;
                    }
                }
            }
        }
        assert!(found);
    }

    fn random_extension_with_zero(a: &HeckeModule, b: &HeckeModule) -> HeckeModule {
        let gens = a.generators();
        let mats = gens
            .iter()
            .map(|g| Matrix::block_diag(a.ring(), &[a.generator_matrix(*g).unwrap(), b.generator_matrix(*g).unwrap()]))
            .collect();
        let carrier = PresentedModule::direct_sum(a.ring(), &[&a.carrier, &b.carrier]);
        assemble(a.gd, a.scope, carrier, &gens, mats)
    }
}
