//! The pro-p Iwahori–Hecke algebra in the basis `τ_w`, its parahoric
//! subalgebras, and finite modules over them.

mod algebra;
mod module;
pub mod random;

use std::collections::BTreeMap;

pub use algebra::{parahoric_algebra, FiniteAlgebra};
pub use module::{parse_ring, restrict_module, validate_module, HeckeModule, ModuleJson, Scope};

use crate::error::{Error, Result};
use crate::ring_linalg::Zm;
use crate::weyl::{GroupData, Letter, WeylElt};

/// A finite R-linear combination of the `τ_w`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeckeElt {
    gd: GroupData,
    ring: Zm,
    terms: BTreeMap<WeylElt, u64>,
}

impl HeckeElt {
    pub fn zero(gd: GroupData, ring: Zm) -> Self {
        HeckeElt {
            gd,
            ring,
            terms: BTreeMap::new(),
        }
    }

    pub fn tau(gd: GroupData, ring: Zm, w: WeylElt) -> Self {
        let mut h = Self::zero(gd, ring);
        h.add_term(w, 1);
        h
    }

    pub fn one(gd: GroupData, ring: Zm) -> Self {
        Self::tau(gd, ring, gd.identity())
    }

    pub fn group(&self) -> GroupData {
        self.gd
    }

    pub fn ring(&self) -> Zm {
        self.ring
    }

    pub fn terms(&self) -> &BTreeMap<WeylElt, u64> {
        &self.terms
    }

    pub fn coeff(&self, w: &WeylElt) -> u64 {
        self.terms.get(w).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, w: WeylElt, c: u64) {
        let c = self.ring.reduce(c);
        if c == 0 {
            return;
        }
        let slot = self.terms.entry(w).or_insert(0);
        *slot = self.ring.add(*slot, c);
        if *slot == 0 {
            self.terms.remove(&w);
        }
    }

    fn check(&self, other: &HeckeElt) -> Result<()> {
        if self.gd != other.gd {
            return Err(Error::GroupMismatch);
        }
        if self.ring != other.ring {
            return Err(Error::RingMismatch(self.ring.modulus(), other.ring.modulus()));
        }
        Ok(())
    }

    pub fn add(&self, other: &HeckeElt) -> Result<HeckeElt> {
        self.check(other)?;
        let mut out = self.clone();
        for (w, &c) in &other.terms {
            out.add_term(*w, c);
        }
        Ok(out)
    }

    pub fn scale(&self, c: u64) -> HeckeElt {
        let mut out = Self::zero(self.gd, self.ring);
        for (w, &a) in &self.terms {
            out.add_term(*w, self.ring.mul(a, c));
        }
        out
    }

    pub fn display(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        self.terms
            .iter()
            .map(|(w, c)| {
                let name = format!("τ[{}]", self.gd.display(w));
                if *c == 1 {
                    name
                } else {
                    format!("{c}·{name}")
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// `θ_s = Σ_{x ∈ F_q^×} τ_{h(x)}` with `h(x)` the coroot class of diag(x, 1/x).
///
/// The sum is the same for both reflections, since the coroot of `s1` is the
/// inverse of that of `s0` and the sum is stable under inversion.
pub fn theta_element(gd: GroupData, ring: Zm, _s: Letter) -> HeckeElt {
    let mut h = HeckeElt::zero(gd, ring);
    for x in 1..gd.q() {
        h.add_term(gd.torus_elt(gd.coroot(x)), 1);
    }
    h
}

/// `τ_y · τ_s` expanded in the basis.
fn right_mul_letter(gd: GroupData, ring: Zm, y: &WeylElt, c: u64, s: Letter, out: &mut HeckeElt) {
    let ys = gd.mul(y, &gd.reflection(s));
    if ys.length() > y.length() {
        out.add_term(ys, c);
        return;
    }
    // y = y'·n_s, so τ_y τ_s = τ_{y'} τ_s² = q τ_{y' z} + τ_y θ_s, and y' z = y·n_s.
    out.add_term(ys, ring.mul(c, ring.reduce(gd.q())));
    for x in 1..gd.q() {
        out.add_term(gd.mul(y, &gd.torus_elt(gd.coroot(x))), c);
    }
}

/// `τ_x · τ_w`, by peeling `w = t · s_1 ⋯ s_k · ω^j` into length-additive pieces.
fn basis_product(gd: GroupData, ring: Zm, x: &WeylElt, w: &WeylElt) -> HeckeElt {
    let mut acc = HeckeElt::tau(gd, ring, gd.mul(x, &gd.torus_elt(w.torus)));
    for s in w.word.letters() {
        let mut next = HeckeElt::zero(gd, ring);
        for (y, &c) in &acc.terms {
            right_mul_letter(gd, ring, y, c, s, &mut next);
        }
        acc = next;
    }
    if w.omega != 0 {
        let om = WeylElt {
            torus: gd.torus_one(),
            word: crate::weyl::Word::EMPTY,
            omega: w.omega,
        };
        let mut next = HeckeElt::zero(gd, ring);
        for (y, &c) in &acc.terms {
            next.add_term(gd.mul(y, &om), c);
        }
        acc = next;
    }
    acc
}

/// Product in H.
pub fn tau_multiply(a: &HeckeElt, b: &HeckeElt) -> Result<HeckeElt> {
    a.check(b)?;
    let (gd, ring) = (a.gd, a.ring);
    let mut out = HeckeElt::zero(gd, ring);
    for (x, &cx) in &a.terms {
        for (w, &cw) in &b.terms {
            let prod = basis_product(gd, ring, x, w);
            let c = ring.mul(cx, cw);
            for (y, &cy) in &prod.terms {
                out.add_term(*y, ring.mul(c, cy));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weyl::{GroupKind, Torus};

    fn setup(kind: GroupKind, q: u64, m: u64) -> (GroupData, Zm) {
        (GroupData::new(kind, q).unwrap(), Zm::new(m).unwrap())
    }

    #[test]
    fn unit_is_neutral() {
        let (gd, r) = setup(GroupKind::Pgl2, 3, 9);
        let one = HeckeElt::one(gd, r);
        for w in gd.elements_up_to(3) {
            let t = HeckeElt::tau(gd, r, w);
            assert_eq!(tau_multiply(&one, &t).unwrap(), t);
            assert_eq!(tau_multiply(&t, &one).unwrap(), t);
        }
    }

    #[test]
    fn quadratic_relation_q2() {
        let (gd, r2) = setup(GroupKind::Sl2, 2, 2);
        let s0 = HeckeElt::tau(gd, r2, gd.reflection(Letter::S0));
        assert_eq!(tau_multiply(&s0, &s0).unwrap(), s0);
        let r4 = Zm::new(4).unwrap();
        let s0 = HeckeElt::tau(gd, r4, gd.reflection(Letter::S0));
        let mut expect = HeckeElt::one(gd, r4).scale(2);
        expect.add_term(gd.reflection(Letter::S0), 1);
        assert_eq!(tau_multiply(&s0, &s0).unwrap(), expect);
    }

    #[test]
    fn theta_examples() {
        let (gd, r) = setup(GroupKind::Sl2, 2, 4);
        assert_eq!(theta_element(gd, r, Letter::S0), HeckeElt::one(gd, r));
        let (gd, r) = setup(GroupKind::Sl2, 3, 9);
        let th = theta_element(gd, r, Letter::S0);
        assert_eq!(th.terms().len(), 2);
        assert_eq!(th.coeff(&gd.torus_elt(Torus([1, 1]))), 1);
        assert_eq!(th.coeff(&gd.torus_elt(Torus([2, 1]))), 1);
        // PGL2, q = 3: diag(x, 1/x) ~ diag(x², 1) is trivial for x = ±1.
        let (gd, r) = setup(GroupKind::Pgl2, 3, 9);
        let th = theta_element(gd, r, Letter::S0);
        assert_eq!(th, HeckeElt::one(gd, r).scale(2));
    }

    #[test]
    fn mismatched_rings_rejected() {
        let (gd, r) = setup(GroupKind::Sl2, 2, 4);
        let a = HeckeElt::one(gd, r);
        let b = HeckeElt::one(gd, Zm::new(2).unwrap());
        assert!(matches!(tau_multiply(&a, &b), Err(Error::RingMismatch(4, 2))));
    }
}
