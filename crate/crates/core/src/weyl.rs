//! Rank-one extended affine Weyl groups `(T0/T1) ⋊ (W_aff ⋊ Ω)`.
//!
//! Elements are kept in the normal form `t · u · ω^j` where `t` is a torus
//! class, `u` an alternating word in the affine reflections and `ω^j` a
//! length-zero element. Words stand for products of the fixed matrix lifts
//!
//! ```text
//! n_s0 = [[0, 1], [-1, 0]]    n_s1 = [[0, -1/π], [π, 0]]    ω = [[0, 1], [π, 0]]
//! ```
//!
//! so that `n_s² = -I`, `ω n_s0 ω⁻¹ = n_s1`, `ω n_s1 ω⁻¹ = n_s0` and
//! `ω² = πI`, which is central.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ring_linalg::{is_prime, Zm};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupKind {
    Sl2,
    Gl2,
    Pgl2,
}

impl GroupKind {
    pub fn name(self) -> &'static str {
        match self {
            GroupKind::Sl2 => "sl2",
            GroupKind::Gl2 => "gl2",
            GroupKind::Pgl2 => "pgl2",
        }
    }
}

impl fmt::Display for GroupKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for GroupKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sl2" => Ok(GroupKind::Sl2),
            "gl2" => Ok(GroupKind::Gl2),
            "pgl2" => Ok(GroupKind::Pgl2),
            other => Err(Error::InvalidInput(format!("unknown group kind `{other}`"))),
        }
    }
}

/// One of the two affine simple reflections.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Letter {
    S0,
    S1,
}

impl Letter {
    pub fn other(self) -> Letter {
        match self {
            Letter::S0 => Letter::S1,
            Letter::S1 => Letter::S0,
        }
    }

    /// The letter after conjugation by `ω^j`.
    pub fn conj_omega(self, j: i64) -> Letter {
        if j.rem_euclid(2) == 1 {
            self.other()
        } else {
            self
        }
    }
}

/// Faces of the closed base chamber.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Face {
    #[serde(rename = "x0")]
    X0,
    #[serde(rename = "x1")]
    X1,
    #[serde(rename = "C")]
    C,
}

impl Face {
    pub const ALL: [Face; 3] = [Face::X0, Face::X1, Face::C];

    /// The reflection fixing this vertex.
    pub fn letter(self) -> Option<Letter> {
        match self {
            Face::X0 => Some(Letter::S0),
            Face::X1 => Some(Letter::S1),
            Face::C => None,
        }
    }

    pub fn is_vertex(self) -> bool {
        self != Face::C
    }
}

impl fmt::Display for Face {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Face::X0 => "x0",
            Face::X1 => "x1",
            Face::C => "C",
        })
    }
}

impl std::str::FromStr for Face {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "x0" => Ok(Face::X0),
            "x1" => Ok(Face::X1),
            "C" | "c" => Ok(Face::C),
            other => Err(Error::InvalidInput(format!("unknown face `{other}`"))),
        }
    }
}

/// A class in T0/T1, stored through residues in F_q^×.
///
/// SL2: `[a, 1]` for diag(a, 1/a). PGL2: `[a/b, 1]` for diag(a, b).
/// GL2: `[a, b]` for diag(a, b).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Torus(pub [u64; 2]);

/// An alternating word, stored as its first letter and length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Word {
    pub first: Letter,
    pub len: u32,
}

impl Word {
    pub const EMPTY: Word = Word {
        first: Letter::S0,
        len: 0,
    };

    pub fn new(first: Letter, len: u32) -> Word {
        if len == 0 {
            Word::EMPTY
        } else {
            Word { first, len }
        }
    }

    pub fn letter(l: Letter) -> Word {
        Word { first: l, len: 1 }
    }

    pub fn last(self) -> Option<Letter> {
        match self.len {
            0 => None,
            n if n % 2 == 1 => Some(self.first),
            _ => Some(self.first.other()),
        }
    }

    pub fn letters(self) -> impl Iterator<Item = Letter> {
        (0..self.len).map(move |i| if i % 2 == 0 { self.first } else { self.first.other() })
    }

    pub fn conj_omega(self, j: i64) -> Word {
        Word::new(self.first.conj_omega(j), self.len)
    }

    /// `self · other` as words, returning the reduced word and the number of
    /// cancelled pairs `n_s n_s = z`.
    fn concat(self, other: Word) -> (Word, u32) {
        if self.len == 0 {
            return (other, 0);
        }
        if other.len == 0 {
            return (self, 0);
        }
        if self.last() != Some(other.first) {
            return (Word::new(self.first, self.len + other.len), 0);
        }
        let k = self.len.min(other.len);
        let w = if self.len > other.len {
            Word::new(self.first, self.len - k)
        } else {
            let first = if k.is_multiple_of(2) { other.first } else { other.first.other() };
            Word::new(first, other.len - k)
        };
        (w, k)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.len == 0 {
            return f.write_str("1");
        }
        for l in self.letters() {
            f.write_str(match l {
                Letter::S0 => "s0",
                Letter::S1 => "s1",
            })?;
        }
        Ok(())
    }
}

/// An element `t · u · ω^j` of the extended Weyl group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WeylElt {
    pub torus: Torus,
    pub word: Word,
    pub omega: i64,
}

impl WeylElt {
    pub fn length(&self) -> u32 {
        self.word.len
    }
}

/// JSON form of a [`WeylElt`]; needs the group to interpret `t`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeylEltJson {
    pub t: Vec<u64>,
    pub word: Word,
    pub omega: i64,
}

/// Root datum and lift tables of SL2, GL2 or PGL2 over a p-adic field with residue field F_q.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupData {
    kind: GroupKind,
    q: u64,
    primitive_root: u64,
}

impl GroupData {
    pub fn new(kind: GroupKind, q: u64) -> Result<Self> {
        if !is_prime(q) {
            return Err(Error::NotPrime(q));
        }
        let field = Zm::new(q)?;
        let primitive_root = (1..q)
            .find(|&g| (1..q - 1).all(|e| field.pow(g, e) != 1))
            .expect("F_q^× is cyclic");
        let gd = GroupData {
            kind,
            q,
            primitive_root,
        };
        gd.self_check()?;
        Ok(gd)
    }

    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn field(&self) -> Zm {
        Zm::new(self.q).expect("q is prime")
    }

    pub fn primitive_root(&self) -> u64 {
        self.primitive_root
    }

    /// Order of Ω, or `None` when Ω is infinite.
    pub fn omega_order(&self) -> Option<u64> {
        match self.kind {
            GroupKind::Sl2 => Some(1),
            GroupKind::Pgl2 => Some(2),
            GroupKind::Gl2 => None,
        }
    }

    fn normalize_omega(&self, j: i64) -> i64 {
        match self.omega_order() {
            Some(n) => j.rem_euclid(n as i64),
            None => j,
        }
    }

    // ---- torus ----

    pub fn torus_one(&self) -> Torus {
        Torus([1, 1])
    }

    pub fn torus_order(&self) -> u64 {
        match self.kind {
            GroupKind::Gl2 => (self.q - 1) * (self.q - 1),
            _ => self.q - 1,
        }
    }

    pub fn torus_elements(&self) -> Vec<Torus> {
        let q = self.q;
        match self.kind {
            GroupKind::Gl2 => (1..q)
                .flat_map(|a| (1..q).map(move |b| Torus([a, b])))
                .collect(),
            _ => (1..q).map(|a| Torus([a, 1])).collect(),
        }
    }

    /// Generators of T0/T1 used for module action matrices (empty for q = 2).
    pub fn torus_generators(&self) -> Vec<Torus> {
        if self.q == 2 {
            return Vec::new();
        }
        let g = self.primitive_root;
        match self.kind {
            GroupKind::Gl2 => vec![Torus([g, 1]), Torus([1, g])],
            _ => vec![Torus([g, 1])],
        }
    }

    /// Exponents of `t` with respect to [`Self::torus_generators`].
    pub fn torus_exponents(&self, t: Torus) -> Vec<u64> {
        if self.q == 2 {
            return Vec::new();
        }
        let log = |x: u64| -> u64 {
            let f = self.field();
            (0..self.q - 1)
                .find(|&e| f.pow(self.primitive_root, e) == x)
                .expect("x is a unit")
        };
        match self.kind {
            GroupKind::Gl2 => vec![log(t.0[0]), log(t.0[1])],
            _ => vec![log(t.0[0])],
        }
    }

    pub fn torus_mul(&self, a: Torus, b: Torus) -> Torus {
        let f = self.field();
        Torus([f.mul(a.0[0], b.0[0]), f.mul(a.0[1], b.0[1])])
    }

    pub fn torus_inv(&self, a: Torus) -> Torus {
        let f = self.field();
        Torus([f.inv(a.0[0]).unwrap(), f.inv(a.0[1]).unwrap()])
    }

    pub fn torus_pow(&self, a: Torus, e: u64) -> Torus {
        let f = self.field();
        Torus([f.pow(a.0[0], e), f.pow(a.0[1], e)])
    }

    /// Conjugation by any `n_s` or by `ω`: diag(a, b) ↦ diag(b, a).
    pub fn torus_swap(&self, a: Torus) -> Torus {
        match self.kind {
            GroupKind::Gl2 => Torus([a.0[1], a.0[0]]),
            _ => self.torus_inv(a),
        }
    }

    /// The class of `n_s² = -I`.
    pub fn torus_z(&self) -> Torus {
        let m1 = self.q - 1;
        match self.kind {
            GroupKind::Sl2 => Torus([m1, 1]),
            GroupKind::Gl2 => Torus([m1, m1]),
            GroupKind::Pgl2 => Torus([1, 1]),
        }
    }

    /// Class of the coroot value diag(x, 1/x) at a unit x ∈ F_q^×.
    pub fn coroot(&self, x: u64) -> Torus {
        let f = self.field();
        let xi = f.inv(x).expect("unit");
        match self.kind {
            GroupKind::Sl2 => Torus([x, 1]),
            GroupKind::Pgl2 => Torus([f.mul(x, x), 1]),
            GroupKind::Gl2 => Torus([x, xi]),
        }
    }

    /// Matrix of the torus class (Teichmüller-free integer representative).
    pub fn torus_matrix(&self, t: Torus) -> [[u64; 2]; 2] {
        match self.kind {
            GroupKind::Sl2 => {
                let inv = self.field().inv(t.0[0]).unwrap();
                [[t.0[0], 0], [0, inv]]
            }
            GroupKind::Pgl2 => [[t.0[0], 0], [0, 1]],
            GroupKind::Gl2 => [[t.0[0], 0], [0, t.0[1]]],
        }
    }

    fn self_check(&self) -> Result<()> {
        let els = self.torus_elements();
        if els.len() as u64 != self.torus_order() {
            return Err(Error::Internal("torus enumeration".into()));
        }
        let z = self.torus_z();
        for &a in &els {
            for &b in &els {
                let lhs = self.torus_swap(self.torus_mul(a, b));
                let rhs = self.torus_mul(self.torus_swap(a), self.torus_swap(b));
                if lhs != rhs {
                    return Err(Error::Internal("swap is not a homomorphism".into()));
                }
            }
            if self.torus_swap(self.torus_swap(a)) != a {
                return Err(Error::Internal("swap is not an involution".into()));
            }
            if self.torus_mul(a, z) != self.torus_mul(z, a) || self.torus_swap(z) != z {
                return Err(Error::Internal("z is not central".into()));
            }
        }
        if self.torus_mul(z, z) != self.torus_one() {
            return Err(Error::Internal("z has order > 2".into()));
        }
        Ok(())
    }

    // ---- Weyl group ----

    pub fn identity(&self) -> WeylElt {
        WeylElt {
            torus: self.torus_one(),
            word: Word::EMPTY,
            omega: 0,
        }
    }

    pub fn torus_elt(&self, t: Torus) -> WeylElt {
        WeylElt {
            torus: t,
            ..self.identity()
        }
    }

    pub fn reflection(&self, l: Letter) -> WeylElt {
        WeylElt {
            word: Word::letter(l),
            ..self.identity()
        }
    }

    pub fn word_elt(&self, w: Word) -> WeylElt {
        WeylElt {
            word: w,
            ..self.identity()
        }
    }

    /// `ω^j`; rejected for SL2 unless `j = 0`.
    pub fn omega_elt(&self, j: i64) -> Result<WeylElt> {
        if self.kind == GroupKind::Sl2 && j != 0 {
            return Err(Error::Unsupported("SL2 has trivial Ω".into()));
        }
        Ok(WeylElt {
            omega: self.normalize_omega(j),
            ..self.identity()
        })
    }

    pub fn z_elt(&self) -> WeylElt {
        self.torus_elt(self.torus_z())
    }

    /// True iff `w` is a well-formed element of this group.
    pub fn contains(&self, w: &WeylElt) -> bool {
        let unit = |x: u64| (1..self.q).contains(&x);
        let torus_ok = match self.kind {
            GroupKind::Gl2 => unit(w.torus.0[0]) && unit(w.torus.0[1]),
            _ => unit(w.torus.0[0]) && w.torus.0[1] == 1,
        };
        let omega_ok = match self.kind {
            GroupKind::Sl2 => w.omega == 0,
            GroupKind::Pgl2 => (0..2).contains(&w.omega),
            GroupKind::Gl2 => true,
        };
        let word_ok = w.word.len > 0 || w.word.first == Letter::S0;
        torus_ok && omega_ok && word_ok
    }

    /// Normal form of `a · b`.
    pub fn multiply(&self, a: &WeylElt, b: &WeylElt) -> Result<WeylElt> {
        if !self.contains(a) || !self.contains(b) {
            return Err(Error::GroupMismatch);
        }
        Ok(self.mul(a, b))
    }

    pub(crate) fn mul(&self, a: &WeylElt, b: &WeylElt) -> WeylElt {
        // Move ω^{j1} past b's torus and word.
        let odd = a.omega.rem_euclid(2) == 1;
        let t2 = if odd { self.torus_swap(b.torus) } else { b.torus };
        let u2 = b.word.conj_omega(a.omega);
        // Move u1 past t2.
        let t2 = if a.word.len % 2 == 1 { self.torus_swap(t2) } else { t2 };
        let (word, cancelled) = a.word.concat(u2);
        let mut torus = self.torus_mul(a.torus, t2);
        if cancelled % 2 == 1 {
            torus = self.torus_mul(torus, self.torus_z());
        }
        WeylElt {
            torus,
            word,
            omega: self.normalize_omega(a.omega + b.omega),
        }
    }

    pub fn inverse(&self, a: &WeylElt) -> WeylElt {
        // (t u ω^j)⁻¹ = ω^{-j} u⁻¹ t⁻¹ with n_s⁻¹ = z n_s.
        let om = WeylElt {
            omega: self.normalize_omega(-a.omega),
            ..self.identity()
        };
        let mut u_inv = self.word_elt(Word::new(a.word.last().unwrap_or(Letter::S0), a.word.len));
        if a.word.len % 2 == 1 {
            u_inv.torus = self.torus_z();
        }
        let t_inv = self.torus_elt(self.torus_inv(a.torus));
        self.mul(&self.mul(&om, &u_inv), &t_inv)
    }

    pub fn is_length_additive(&self, d: &WeylElt, w: &WeylElt) -> bool {
        self.mul(d, w).length() == d.length() + w.length()
    }

    /// Window of Ω exponents used when enumerating (all of Ω when finite).
    pub fn omega_window(&self) -> Vec<i64> {
        match self.kind {
            GroupKind::Sl2 => vec![0],
            GroupKind::Pgl2 => vec![0, 1],
            GroupKind::Gl2 => vec![-1, 0, 1],
        }
    }

    pub fn words_up_to(&self, maxlen: u32) -> Vec<Word> {
        let mut out = vec![Word::EMPTY];
        for len in 1..=maxlen {
            out.push(Word::new(Letter::S0, len));
            out.push(Word::new(Letter::S1, len));
        }
        out
    }

    /// All elements of length at most `maxlen` (Ω restricted to [`Self::omega_window`]).
    pub fn elements_up_to(&self, maxlen: u32) -> Vec<WeylElt> {
        let mut out = Vec::new();
        for t in self.torus_elements() {
            for w in self.words_up_to(maxlen) {
                for j in self.omega_window() {
                    out.push(WeylElt {
                        torus: t,
                        word: w,
                        omega: j,
                    });
                }
            }
        }
        out
    }

    /// Whether `d` has minimal length in `d·W̃_F`.
    pub fn in_dist_reps(&self, face: Face, d: &WeylElt) -> bool {
        match face.letter() {
            None => true,
            Some(l) => {
                let s = self.reflection(l);
                self.mul(d, &s).length() > d.length()
            }
        }
    }

    /// All d ∈ D̃_F with ℓ(d) ≤ maxlen.
    pub fn enum_df(&self, face: Face, maxlen: u32) -> Vec<WeylElt> {
        self.elements_up_to(maxlen)
            .into_iter()
            .filter(|d| self.in_dist_reps(face, d))
            .collect()
    }

    /// Elements of W̃_F (and of W̃_F^† when `dagger`).
    pub fn face_group(&self, face: Face, dagger: bool) -> Result<Vec<WeylElt>> {
        if dagger && self.kind == GroupKind::Gl2 {
            return Err(Error::Unsupported("Ω_F is infinite for GL2".into()));
        }
        let mut out: Vec<WeylElt> = self.torus_elements().into_iter().map(|t| self.torus_elt(t)).collect();
        if let Some(l) = face.letter() {
            let s = self.reflection(l);
            let with_s: Vec<WeylElt> = out.iter().map(|t| self.mul(t, &s)).collect();
            out.extend(with_s);
        } else if dagger && self.kind == GroupKind::Pgl2 {
            let om = self.omega_elt(1)?;
            let with_om: Vec<WeylElt> = out.iter().map(|t| self.mul(t, &om)).collect();
            out.extend(with_om);
        }
        Ok(out)
    }

    /// Factor `w = d · w_F` with `d` a torus-free minimal representative of
    /// its coset and `w_F ∈ W̃_F`.
    pub fn factor_through_face(&self, face: Face, w: &WeylElt) -> (WeylElt, WeylElt) {
        let head = WeylElt {
            torus: self.torus_one(),
            ..*w
        };
        // w = t·head = head·(head⁻¹ t head)
        let t_shift = self.mul(&self.mul(&self.inverse(&head), &self.torus_elt(w.torus)), &head);
        if self.in_dist_reps(face, &head) {
            return (head, t_shift);
        }
        let s = self.reflection(face.letter().expect("C has every element minimal"));
        let d0 = self.mul(&head, &self.inverse(&s));
        let d = WeylElt {
            torus: self.torus_one(),
            ..d0
        };
        // head = d0·s, d0 = t0·d so head = d·(d⁻¹ t0 d)·s
        let rest = self.mul(&self.inverse(&d), &head);
        (d, self.mul(&rest, &t_shift))
    }

    pub fn to_json(&self, w: &WeylElt) -> WeylEltJson {
        let t = match self.kind {
            GroupKind::Gl2 => vec![w.torus.0[0], w.torus.0[1]],
            _ => vec![w.torus.0[0]],
        };
        WeylEltJson {
            t,
            word: w.word,
            omega: w.omega,
        }
    }

    pub fn from_json(&self, j: &WeylEltJson) -> Result<WeylElt> {
        let torus = match (self.kind, j.t.as_slice()) {
            (GroupKind::Gl2, [a, b]) => Torus([a % self.q, b % self.q]),
            (GroupKind::Sl2 | GroupKind::Pgl2, [a]) => Torus([a % self.q, 1]),
            _ => return Err(Error::InvalidInput("torus component has the wrong length".into())),
        };
        let w = WeylElt {
            torus,
            word: Word::new(j.word.first, j.word.len),
            omega: j.omega,
        };
        if !self.contains(&w) {
            return Err(Error::GroupMismatch);
        }
        Ok(w)
    }

    pub fn display(&self, w: &WeylElt) -> String {
        let t = if w.torus == self.torus_one() {
            String::new()
        } else {
            match self.kind {
                GroupKind::Gl2 => format!("t({},{})·", w.torus.0[0], w.torus.0[1]),
                _ => format!("t({})·", w.torus.0[0]),
            }
        };
        let om = if w.omega == 0 { String::new() } else { format!("·ω^{}", w.omega) };
        format!("{t}{}{om}", w.word)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gd(kind: GroupKind, q: u64) -> GroupData {
        GroupData::new(kind, q).unwrap()
    }

    #[test]
    fn rejects_non_prime() {
        assert_eq!(GroupData::new(GroupKind::Sl2, 4), Err(Error::NotPrime(4)));
    }

    #[test]
    fn squares_tables() {
        let g = gd(GroupKind::Sl2, 2);
        assert_eq!(g.torus_order(), 1);
        assert_eq!(g.torus_z(), g.torus_one());
        assert_eq!(g.omega_order(), Some(1));
        let g = gd(GroupKind::Sl2, 3);
        assert_eq!(g.torus_order(), 2);
        assert_eq!(g.torus_z(), Torus([2, 1]));
        let g = gd(GroupKind::Pgl2, 3);
        assert_eq!(g.omega_order(), Some(2));
        let om = g.omega_elt(1).unwrap();
        assert_eq!(g.mul(&om, &om), g.identity());
    }

    #[test]
    fn reflection_squares() {
        let g = gd(GroupKind::Sl2, 2);
        let s0 = g.reflection(Letter::S0);
        assert_eq!(g.mul(&s0, &s0), g.identity());
        let g3 = gd(GroupKind::Sl2, 3);
        let s0 = g3.reflection(Letter::S0);
        assert_eq!(g3.mul(&s0, &s0), g3.z_elt());
        let s01 = g.mul(&g.reflection(Letter::S0), &g.reflection(Letter::S1));
        assert_eq!(s01.length(), 2);
        assert_eq!(s01.word.to_string(), "s0s1");
    }

    /// Oracle: d is in D_F iff no element of d·W̃_F is shorter.
    fn minimal_in_coset(g: &GroupData, face: Face, d: &WeylElt) -> bool {
        let coset = g.face_group(face, false).unwrap();
        coset.iter().all(|w| g.mul(d, w).length() >= d.length())
    }

    #[test]
    fn dist_reps_examples() {
        let g = gd(GroupKind::Sl2, 2);
        let show = |v: Vec<WeylElt>| v.iter().map(|w| w.word.to_string()).collect::<Vec<_>>();
        assert_eq!(show(g.enum_df(Face::X0, 1)), vec!["1", "s1"]);
        // s1s0 ends in s0 and is not minimal: s1s0·s0 = s1.
        assert_eq!(show(g.enum_df(Face::X0, 2)), vec!["1", "s1", "s0s1"]);
        assert_eq!(g.enum_df(Face::C, 2).len(), 5);
        for kind in [GroupKind::Sl2, GroupKind::Pgl2, GroupKind::Gl2] {
            let g = gd(kind, 3);
            for face in Face::ALL {
                for d in g.elements_up_to(4) {
                    assert_eq!(g.in_dist_reps(face, &d), minimal_in_coset(&g, face, &d));
                }
            }
        }
    }

    #[test]
    fn length_additivity_examples() {
        let g = gd(GroupKind::Sl2, 3);
        let (s0, s1) = (g.reflection(Letter::S0), g.reflection(Letter::S1));
        assert!(g.is_length_additive(&g.identity(), &s0));
        assert!(g.is_length_additive(&s1, &s0));
        assert!(!g.is_length_additive(&s0, &s0));
    }

    #[test]
    fn omega_conjugates_reflections() {
        let g = gd(GroupKind::Pgl2, 3);
        let om = g.omega_elt(1).unwrap();
        let s0 = g.reflection(Letter::S0);
        let conj = g.mul(&g.mul(&om, &s0), &g.inverse(&om));
        assert_eq!(conj, g.reflection(Letter::S1));
    }

    #[test]
    fn json_round_trip() {
        let g = gd(GroupKind::Gl2, 3);
        let w = WeylElt {
            torus: Torus([2, 1]),
            word: Word::new(Letter::S1, 3),
            omega: -2,
        };
        let j = g.to_json(&w);
        let s = serde_json::to_string(&j).unwrap();
        assert_eq!(s, r#"{"t":[2,1],"word":{"first":"s1","len":3},"omega":-2}"#);
        assert_eq!(g.from_json(&serde_json::from_str(&s).unwrap()).unwrap(), w);
    }

    #[test]
    fn inverse_is_two_sided() {
        for kind in [GroupKind::Sl2, GroupKind::Pgl2, GroupKind::Gl2] {
            let g = gd(kind, 3);
            for w in g.elements_up_to(3) {
                let wi = g.inverse(&w);
                assert_eq!(g.mul(&w, &wi), g.identity(), "{}", g.display(&w));
                assert_eq!(g.mul(&wi, &w), g.identity(), "{}", g.display(&w));
            }
        }
    }
}
