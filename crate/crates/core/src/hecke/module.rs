use serde::{Deserialize, Serialize};

use super::HeckeElt;
use crate::error::{Error, Result};
use crate::ring_linalg::{ActionModule, Matrix, ModuleMap, PresentedModule, Zm};
use crate::weyl::{Face, GroupData, GroupKind, Letter, WeylElt};

/// Which algebra a module is over: H itself, or `H_F` / `H_F^†`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scope {
    Full,
    Face { face: Face, dagger: bool },
}

/// An algebra generator: a torus generator, a reflection, or ω.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Generator {
    Torus(usize),
    S(Letter),
    Omega,
}

impl Generator {
    pub fn element(&self, gd: &GroupData) -> WeylElt {
        match *self {
            Generator::Torus(i) => gd.torus_elt(gd.torus_generators()[i]),
            Generator::S(l) => gd.reflection(l),
            Generator::Omega => gd.omega_elt(1).expect("ω exists for this group"),
        }
    }
}

impl Scope {
    /// Generators in the fixed order torus, s0, s1, ω. `with_omega` only
    /// matters for GL2 over H, where τ_ω is optional.
    pub fn generators(&self, gd: &GroupData, with_omega: bool) -> Vec<Generator> {
        let mut out: Vec<Generator> = (0..gd.torus_generators().len()).map(Generator::Torus).collect();
        match *self {
            Scope::Full => {
                out.push(Generator::S(Letter::S0));
                out.push(Generator::S(Letter::S1));
                let omega = match gd.kind() {
                    GroupKind::Sl2 => false,
                    GroupKind::Pgl2 => true,
                    GroupKind::Gl2 => with_omega,
                };
                if omega {
                    out.push(Generator::Omega);
                }
            }
            Scope::Face { face, dagger } => {
                if let Some(l) = face.letter() {
                    out.push(Generator::S(l));
                } else if dagger && gd.kind() == GroupKind::Pgl2 {
                    out.push(Generator::Omega);
                }
            }
        }
        out
    }

    pub fn check(&self, gd: &GroupData) -> Result<()> {
        if let Scope::Face { dagger: true, .. } = self {
            if gd.kind() == GroupKind::Gl2 {
                return Err(Error::Unsupported("Ω_F is infinite for GL2".into()));
            }
        }
        Ok(())
    }

    /// Whether `w` lies in the algebra of this scope.
    pub fn contains(&self, gd: &GroupData, w: &WeylElt) -> bool {
        match *self {
            Scope::Full => true,
            Scope::Face { face, dagger } => {
                let word_ok = match face.letter() {
                    Some(l) => w.word.len == 0 || (w.word.len == 1 && w.word.first == l),
                    None => w.word.len == 0,
                };
                let omega_ok = w.omega == 0 || (dagger && face == Face::C && gd.kind() == GroupKind::Pgl2);
                word_ok && omega_ok
            }
        }
    }
}

/// A left module over H or a parahoric subalgebra, given by generator actions.
///
/// Action matrices act on row vectors, so the matrix of `τ_a τ_b` is `A_b·A_a`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeckeModule {
    pub gd: GroupData,
    pub scope: Scope,
    pub carrier: PresentedModule,
    pub torus: Vec<Matrix>,
    pub s0: Option<Matrix>,
    pub s1: Option<Matrix>,
    pub omega: Option<Matrix>,
}

impl HeckeModule {
    pub fn ring(&self) -> Zm {
        self.carrier.ring()
    }

    pub fn rank(&self) -> usize {
        self.carrier.rank()
    }

    pub fn generators(&self) -> Vec<Generator> {
        self.scope.generators(&self.gd, self.omega.is_some())
    }

    pub fn generator_matrix(&self, g: Generator) -> Result<&Matrix> {
        let missing = || Error::InvalidInput(format!("module has no action for {g:?}"));
        match g {
            Generator::Torus(i) => self.torus.get(i).ok_or_else(missing),
            Generator::S(Letter::S0) => self.s0.as_ref().ok_or_else(missing),
            Generator::S(Letter::S1) => self.s1.as_ref().ok_or_else(missing),
            Generator::Omega => self.omega.as_ref().ok_or_else(missing),
        }
    }

    /// Actions in [`Self::generators`] order, as a generic action module.
    pub fn action_module(&self) -> ActionModule {
        let actions = self
            .generators()
            .into_iter()
            .map(|g| self.generator_matrix(g).expect("generator present").clone())
            .collect();
        ActionModule {
            carrier: self.carrier.clone(),
            actions,
        }
    }

    fn identity(&self) -> Matrix {
        Matrix::identity(self.ring(), self.rank())
    }

    pub fn torus_action(&self, t: crate::weyl::Torus) -> Matrix {
        let mut acc = self.identity();
        for (a, e) in self.torus.iter().zip(self.gd.torus_exponents(t)) {
            acc = acc.mul(&a.pow(e).expect("square")).expect("square");
        }
        acc
    }

    fn omega_power(&self, j: i64) -> Result<Matrix> {
        if j == 0 {
            return Ok(self.identity());
        }
        let om = self.generator_matrix(Generator::Omega)?;
        if j > 0 {
            return om.pow(j as u64);
        }
        let inv = om
            .inverse()
            .ok_or_else(|| Error::InvalidInput("τ_ω is not invertible on the carrier".into()))?;
        inv.pow(j.unsigned_abs())
    }

    /// Matrix of `τ_w`; `τ_w = τ_t τ_{s_1} ⋯ τ_{s_k} τ_ω^j` since lengths add.
    pub fn basis_action(&self, w: &WeylElt) -> Result<Matrix> {
        if !self.scope.contains(&self.gd, w) {
            return Err(Error::InvalidInput(format!(
                "{} is outside the algebra of this module",
                self.gd.display(w)
            )));
        }
        let mut acc = self.torus_action(w.torus);
        for l in w.word.letters() {
            acc = self.generator_matrix(Generator::S(l))?.mul(&acc)?;
        }
        self.omega_power(w.omega)?.mul(&acc)
    }

    pub fn act(&self, h: &HeckeElt) -> Result<Matrix> {
        let mut acc = Matrix::zeros(self.ring(), self.rank(), self.rank());
        for (w, &c) in h.terms() {
            acc = acc.add(&self.basis_action(w)?.scale(c))?;
        }
        Ok(acc)
    }

    fn theta_matrix(&self) -> Matrix {
        let mut acc = Matrix::zeros(self.ring(), self.rank(), self.rank());
        for x in 1..self.gd.q() {
            acc = acc.add(&self.torus_action(self.gd.coroot(x))).expect("same shape");
        }
        acc
    }

    /// Every defining relation as a pair (name, LHS − RHS); all must vanish on the carrier.
    pub fn relation_residuals(&self) -> Vec<(String, Matrix)> {
        let gd = self.gd;
        let id = self.identity();
        let mut out = Vec::new();
        let tgens = gd.torus_generators();
        for (i, a) in self.torus.iter().enumerate() {
            let e = gd.q() - 1;
            out.push((format!("t{i}^{e} = 1"), a.pow(e).unwrap().sub(&id).unwrap()));
            for (j, b) in self.torus.iter().enumerate().skip(i + 1) {
                out.push((format!("t{i} t{j} = t{j} t{i}"), a.mul(b).unwrap().sub(&b.mul(a).unwrap()).unwrap()));
            }
        }
        for (l, s) in [(Letter::S0, &self.s0), (Letter::S1, &self.s1)] {
            let Some(s) = s else { continue };
            for (i, t) in tgens.iter().enumerate() {
                // τ_s τ_t = τ_{sts⁻¹} τ_s
                let lhs = self.torus[i].mul(s).unwrap();
                let rhs = s.mul(&self.torus_action(gd.torus_swap(*t))).unwrap();
                out.push((format!("{l:?} t{i} = swap(t{i}) {l:?}"), lhs.sub(&rhs).unwrap()));
            }
            // τ_s² = q τ_{s²} + τ_s θ_s
            let lhs = s.mul(s).unwrap();
            let rhs = self
                .torus_action(gd.torus_z())
                .scale(gd.q())
                .add(&self.theta_matrix().mul(s).unwrap())
                .unwrap();
            out.push((format!("{l:?}^2 = q z + {l:?} theta"), lhs.sub(&rhs).unwrap()));
        }
        if let Some(om) = &self.omega {
            if gd.kind() == GroupKind::Pgl2 {
                out.push(("omega^2 = 1".into(), om.mul(om).unwrap().sub(&id).unwrap()));
            }
            for (i, t) in tgens.iter().enumerate() {
                let lhs = self.torus[i].mul(om).unwrap();
                let rhs = om.mul(&self.torus_action(gd.torus_swap(*t))).unwrap();
                out.push((format!("omega t{i} = swap(t{i}) omega"), lhs.sub(&rhs).unwrap()));
            }
            for (l, s, s_other) in [(Letter::S0, &self.s0, &self.s1), (Letter::S1, &self.s1, &self.s0)] {
                if let (Some(s), Some(so)) = (s, s_other) {
                    // τ_ω τ_s = τ_{ωsω⁻¹} τ_ω
                    let lhs = s.mul(om).unwrap();
                    let rhs = om.mul(so).unwrap();
                    out.push((format!("omega {l:?} = {:?} omega", l.other()), lhs.sub(&rhs).unwrap()));
                }
            }
        }
        out
    }

    /// Checks all relations; reports the first failure with a carrier witness.
    pub fn validate(&self) -> Result<()> {
        self.scope.check(&self.gd)?;
        let expect_torus = self.gd.torus_generators().len();
        if self.torus.len() != expect_torus {
            return Err(Error::InvalidInput(format!(
                "{} torus matrices given, {expect_torus} expected",
                self.torus.len()
            )));
        }
        for g in self.generators() {
            let a = self.generator_matrix(g)?;
            ModuleMap::new(self.carrier.clone(), self.carrier.clone(), a.clone())?;
        }
        if self.scope == Scope::Full && self.gd.kind() == GroupKind::Pgl2 && self.omega.is_none() {
            return Err(Error::InvalidInput("PGL2 modules need an action of τ_ω".into()));
        }
        if let Some(om) = &self.omega {
            let onto = ModuleMap::new(self.carrier.clone(), self.carrier.clone(), om.clone())?;
            if !onto.is_isomorphism() {
                return Err(Error::RelationViolated {
                    relation: "omega invertible".into(),
                    witness: onto.kernel_witness().unwrap_or_default(),
                });
            }
        }
        self.check_residuals()
    }

    pub(crate) fn check_residuals(&self) -> Result<()> {
        for (name, res) in self.relation_residuals() {
            for (i, row) in res.row_iter().enumerate() {
                if !self.carrier.is_zero_element(row) {
                    let mut witness = vec![0; self.rank()];
                    witness[i] = 1;
                    return Err(Error::RelationViolated { relation: name, witness });
                }
            }
        }
        Ok(())
    }

    pub fn zero(gd: GroupData, ring: Zm, scope: Scope) -> HeckeModule {
        let z = Matrix::zeros(ring, 0, 0);
        let gens = scope.generators(&gd, false);
        let has = |g: Generator| gens.contains(&g).then(|| z.clone());
        HeckeModule {
            gd,
            scope,
            carrier: PresentedModule::zero(ring),
            torus: vec![z.clone(); gd.torus_generators().len()],
            s0: has(Generator::S(Letter::S0)),
            s1: has(Generator::S(Letter::S1)),
            omega: has(Generator::Omega),
        }
    }

    /// Same actions on a new presentation reached through an isomorphism.
    pub fn transport(&self, iso: &ModuleMap, inverse: &ModuleMap) -> Result<HeckeModule> {
        let conj = |a: &Matrix| -> Result<Matrix> { inverse.matrix.mul(a)?.mul(&iso.matrix) };
        let opt = |a: &Option<Matrix>| -> Result<Option<Matrix>> { a.as_ref().map(conj).transpose() };
        Ok(HeckeModule {
            gd: self.gd,
            scope: self.scope,
            carrier: iso.codomain.clone(),
            torus: self.torus.iter().map(conj).collect::<Result<_>>()?,
            s0: opt(&self.s0)?,
            s1: opt(&self.s1)?,
            omega: opt(&self.omega)?,
        })
    }

    /// Drop redundant generators of the carrier.
    pub fn pruned(&self) -> HeckeModule {
        let (_, fwd, back) = self.carrier.prune();
        self.transport(&fwd, &back).expect("prune yields an isomorphism")
    }

    /// True iff `f` (a map of carriers) commutes with every generator action.
    pub fn is_linear_map_to(&self, other: &HeckeModule, f: &ModuleMap) -> bool {
        let gens = self.generators();
        if gens != other.generators() {
            return false;
        }
        gens.into_iter().all(|g| {
            let a = self.generator_matrix(g).unwrap().mul(&f.matrix).unwrap();
            let b = f.matrix.mul(other.generator_matrix(g).unwrap()).unwrap();
            a.sub(&b).unwrap().row_iter().all(|r| other.carrier.is_zero_element(r))
        })
    }

    /// Whether the two modules are isomorphic, by searching Hom for an invertible map.
    pub fn is_isomorphic_to(&self, other: &HeckeModule) -> Result<bool> {
        if self.carrier.order() != other.carrier.order() {
            return Ok(false);
        }
        let hom = crate::ring_linalg::module_hom_space(&self.action_module(), &other.action_module())?;
        Ok(find_invertible(self, other, &hom).is_some())
    }
}

/// Scan R-combinations of a Hom basis for an isomorphism (small spaces only).
fn find_invertible(a: &HeckeModule, b: &HeckeModule, hom: &crate::ring_linalg::HomSpace) -> Option<ModuleMap> {
    let ring = a.ring();
    let elements = hom.module.elements();
    let limit = 1usize << 16;
    for coeffs in elements.into_iter().take(limit) {
        let mut mat = Matrix::zeros(ring, a.rank(), b.rank());
        for (c, f) in coeffs.iter().zip(&hom.maps) {
            if *c != 0 {
                mat = mat.add(&f.scale(*c)).unwrap();
            }
        }
        let Ok(map) = ModuleMap::new(a.carrier.clone(), b.carrier.clone(), mat) else {
            continue;
        };
        if map.is_isomorphism() {
            return Some(map);
        }
    }
    None
}

/// Restrict a module over H to `H_F` or `H_F^†`.
pub fn restrict_module(m: &HeckeModule, face: Face, dagger: bool) -> Result<HeckeModule> {
    let scope = Scope::Face { face, dagger };
    scope.check(&m.gd)?;
    if m.scope != Scope::Full {
        return Err(Error::AlgebraMismatch("restriction starts from a module over H".into()));
    }
    let keep = |l: Letter, a: &Option<Matrix>| if face.letter() == Some(l) { a.clone() } else { None };
    let omega = if face == Face::C && dagger && m.gd.kind() == GroupKind::Pgl2 {
        m.omega.clone()
    } else {
        None
    };
    Ok(HeckeModule {
        gd: m.gd,
        scope,
        carrier: m.carrier.clone(),
        torus: m.torus.clone(),
        s0: keep(Letter::S0, &m.s0),
        s1: keep(Letter::S1, &m.s1),
        omega,
    })
}

/// JSON schema of a module file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModuleJson {
    pub ring: String,
    pub group: GroupJson,
    pub rank: usize,
    pub action: ActionJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relations: Option<Vec<Vec<i64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scope: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroupJson {
    pub kind: GroupKind,
    pub q: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ActionJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s0: Option<Vec<Vec<i64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s1: Option<Vec<Vec<i64>>>,
    pub t0: Vec<Vec<Vec<i64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<Vec<Vec<i64>>>,
}

pub fn parse_ring(s: &str) -> Result<Zm> {
    let m = s
        .strip_prefix("zmod:")
        .and_then(|x| x.parse::<u64>().ok())
        .ok_or_else(|| Error::InvalidInput(format!("ring `{s}` is not of the form zmod:<m>")))?;
    Zm::new(m)
}

fn scope_name(scope: Scope) -> Option<String> {
    match scope {
        Scope::Full => None,
        Scope::Face { face, dagger } => Some(format!("{face}{}", if dagger { "+" } else { "" })),
    }
}

fn parse_scope(s: Option<&str>) -> Result<Scope> {
    match s {
        None | Some("H") => Ok(Scope::Full),
        Some(name) => {
            let (face, dagger) = match name.strip_suffix('+') {
                Some(f) => (f, true),
                None => (name, false),
            };
            Ok(Scope::Face {
                face: face.parse()?,
                dagger,
            })
        }
    }
}

impl HeckeModule {
    pub fn to_json(&self) -> ModuleJson {
        let rows = |a: &Matrix| -> Vec<Vec<i64>> {
            a.row_iter().map(|r| r.iter().map(|&e| e as i64).collect()).collect()
        };
        let rel = self.carrier.relations();
        ModuleJson {
            ring: format!("zmod:{}", self.ring().modulus()),
            group: GroupJson {
                kind: self.gd.kind(),
                q: self.gd.q(),
            },
            rank: self.rank(),
            action: ActionJson {
                s0: self.s0.as_ref().map(rows),
                s1: self.s1.as_ref().map(rows),
                t0: self.torus.iter().map(rows).collect(),
                omega: self.omega.as_ref().map(rows),
            },
            relations: (rel.rows() > 0).then(|| rows(rel)),
            scope: scope_name(self.scope),
        }
    }

    pub fn from_json(j: &ModuleJson) -> Result<HeckeModule> {
        let ring = parse_ring(&j.ring)?;
        let gd = GroupData::new(j.group.kind, j.group.q)?;
        let n = j.rank;
        let mat = |rows: &Vec<Vec<i64>>| Matrix::from_rows_i64(ring, n, rows).and_then(|a| {
            if a.rows() == n {
                Ok(a)
            } else {
                Err(Error::DimensionMismatch(format!("action matrix with {} rows for rank {n}", a.rows())))
            }
        });
        let carrier = match &j.relations {
            Some(rel) => PresentedModule::new(n, &Matrix::from_rows_i64(ring, n, rel)?)?,
            None => PresentedModule::free(ring, n),
        };
        let m = HeckeModule {
            gd,
            scope: parse_scope(j.scope.as_deref())?,
            carrier,
            torus: j.action.t0.iter().map(mat).collect::<Result<_>>()?,
            s0: j.action.s0.as_ref().map(mat).transpose()?,
            s1: j.action.s1.as_ref().map(mat).transpose()?,
            omega: j.action.omega.as_ref().map(mat).transpose()?,
        };
        for g in m.generators() {
            m.generator_matrix(g)?;
        }
        Ok(m)
    }
}

/// Parse and validate a module description.
pub fn validate_module(j: &ModuleJson) -> Result<HeckeModule> {
    let m = HeckeModule::from_json(j)?;
    m.validate()?;
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rank_one(m: u64, s0: i64, s1: i64) -> ModuleJson {
        ModuleJson {
            ring: format!("zmod:{m}"),
            group: GroupJson {
                kind: GroupKind::Sl2,
                q: 2,
            },
            rank: 1,
            action: ActionJson {
                s0: Some(vec![vec![s0]]),
                s1: Some(vec![vec![s1]]),
                t0: vec![],
                omega: None,
            },
            relations: None,
            scope: None,
        }
    }

    #[test]
    fn validate_examples() {
        assert!(validate_module(&rank_one(2, 0, 0)).is_ok());
        assert!(validate_module(&rank_one(2, 1, 0)).is_ok());
        let err = validate_module(&rank_one(4, 1, 0)).unwrap_err();
        assert!(matches!(err, Error::RelationViolated { ref relation, .. } if relation.contains("S0^2")), "{err}");
    }

    #[test]
    fn pgl2_requires_omega() {
        let mut j = rank_one(3, 2, 2);
        j.group.kind = GroupKind::Pgl2;
        assert!(validate_module(&j).is_err());
        j.action.omega = Some(vec![vec![1]]);
        validate_module(&j).unwrap();
        j.action.omega = Some(vec![vec![0]]);
        assert!(validate_module(&j).is_err());
    }

    #[test]
    fn restriction_keeps_torus_and_reflection() {
        let m = validate_module(&rank_one(2, 0, 1)).unwrap();
        let r = restrict_module(&m, Face::X0, false).unwrap();
        assert_eq!(r.s0, m.s0);
        assert_eq!(r.s1, None);
        assert_eq!(r.torus, m.torus);
        r.validate().unwrap();
        let one = HeckeElt::one(m.gd, m.ring());
        assert_eq!(r.act(&one).unwrap(), Matrix::identity(m.ring(), 1));
    }

    #[test]
    fn json_round_trip() {
        let m = validate_module(&rank_one(2, 1, 0)).unwrap();
        let j = serde_json::to_string(&m.to_json()).unwrap();
        let back = validate_module(&serde_json::from_str(&j).unwrap()).unwrap();
        assert_eq!(back, m);
    }
}
