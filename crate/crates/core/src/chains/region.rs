use std::collections::HashMap;
use std::sync::Arc;

use crate::coeff::padic::{default_precision, LatticeKey, PMat, Padic};
use crate::error::{Error, Result};
use crate::parahoric::FiniteQuotient;
use crate::weyl::{Face, GroupData, GroupKind, Letter};

/// Which part of the tree a region covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RegionKind {
    Apartment,
    Tree,
    HalfTree,
}

impl std::str::FromStr for RegionKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "apartment" => Ok(RegionKind::Apartment),
            "tree" => Ok(RegionKind::Tree),
            "halftree" => Ok(RegionKind::HalfTree),
            _ => Err(Error::InvalidInput(format!("unknown region kind {s:?}"))),
        }
    }
}

/// A vertex or a chamber of a region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FaceRef {
    Vertex(usize),
    Chamber(usize),
}

#[derive(Debug, Clone)]
pub struct VertexInfo {
    pub key: LatticeKey,
    /// The vertex of the standard chamber it is a translate of (0 = x0, 1 = x1).
    pub ty: usize,
    /// The closest chamber `C(v)`.
    pub home: usize,
}

#[derive(Debug, Clone)]
pub struct ChamberInfo {
    /// Gallery from C: chamber = `Π u_i(a_i) n_{s_i} · C`.
    pub letters: Vec<Letter>,
    pub digits: Vec<u64>,
    /// Vertex ids indexed by type.
    pub vertices: [usize; 2],
    /// The vertex shared with the previous chamber of the gallery (x0 for C).
    pub source: usize,
    pub parent: Option<usize>,
    /// `h` with `h·C` this chamber.
    pub h: PMat,
    pub h_inv: PMat,
    /// `π_{[v]}(h_v⁻¹ h)` for both vertices, as indices into the vertex quotients.
    pub twist: [usize; 2],
}

impl ChamberInfo {
    pub fn distance(&self) -> usize {
        self.letters.len()
    }

    pub fn in_apartment(&self) -> bool {
        self.digits.iter().all(|&d| d == 0)
    }

    pub fn name(&self) -> String {
        if self.letters.is_empty() {
            return "C".into();
        }
        self.letters
            .iter()
            .zip(&self.digits)
            .map(|(l, d)| format!("{}[{d}]", if *l == Letter::S0 { "s0" } else { "s1" }))
            .collect::<Vec<_>>()
            .join("")
    }
}

/// Where a group element sends a face, and the element of `P_{[F]}^†` relating the coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Transport {
    pub target: FaceRef,
    /// Index in the quotient of `[F]` of `π(k)` or `π(ω⁻¹k)`.
    pub element: usize,
    /// Whether `k` is `ω` times an element of `P_{[F]}`.
    pub omega: bool,
    /// Orientation sign for chambers.
    pub sign: i64,
}

/// A finite part of the tree, chambers encoded by digit words.
#[derive(Debug, Clone)]
pub struct Region {
    pub gd: GroupData,
    pub kind: RegionKind,
    pub radius: usize,
    pub padic: Padic,
    pub vertices: Vec<VertexInfo>,
    pub chambers: Vec<ChamberInfo>,
    pub quotients: [Arc<FiniteQuotient>; 2],
    pub chamber_quotient: Arc<FiniteQuotient>,
    vertex_index: HashMap<LatticeKey, usize>,
    chamber_index: HashMap<[usize; 2], usize>,
}

fn type_of(l: Letter) -> usize {
    match l {
        Letter::S0 => 0,
        Letter::S1 => 1,
    }
}

impl Region {
    pub fn build(gd: GroupData, kind: RegionKind, radius: usize) -> Result<Region> {
        Self::with_precision(gd, kind, radius, default_precision(radius))
    }

    pub fn with_precision(gd: GroupData, kind: RegionKind, radius: usize, precision: u32) -> Result<Region> {
        if radius == 0 {
            return Err(Error::InvalidInput("radius must be at least 1".into()));
        }
        let padic = Padic::new(gd.q(), precision)?;
        let quotients = [
            Arc::new(FiniteQuotient::new(gd, Face::X0)?),
            Arc::new(FiniteQuotient::new(gd, Face::X1)?),
        ];
        let chamber_quotient = Arc::new(FiniteQuotient::new(gd, Face::C)?);
        let mut region = Region {
            gd,
            kind,
            radius,
            padic,
            vertices: Vec::new(),
            chambers: Vec::new(),
            quotients,
            chamber_quotient,
            vertex_index: HashMap::new(),
            chamber_index: HashMap::new(),
        };
        let id = padic.identity();
        let x0 = region.add_vertex(padic.lattice_key(&id)?, 0, 0)?;
        let x1 = region.add_vertex(padic.lattice_key(&padic.eta())?, 1, 0)?;
        let ones = [quotients_identity(&region.quotients[0]), quotients_identity(&region.quotients[1])];
        region.chambers.push(ChamberInfo {
            letters: vec![],
            digits: vec![],
            vertices: [x0, x1],
            source: x0,
            parent: None,
            h: id,
            h_inv: id,
            twist: ones,
        });
        region.chamber_index.insert([x0, x1], 0);
        let mut frontier = vec![0usize];
        for _ in 0..radius {
            let mut next = Vec::new();
            for &c in &frontier {
                for child in region.extend(c)? {
                    next.push(child);
                }
            }
            frontier = next;
        }
        region.check_counts()?;
        Ok(region)
    }

    fn add_vertex(&mut self, key: LatticeKey, ty: usize, home: usize) -> Result<usize> {
        if self.vertex_index.contains_key(&key) {
            return Err(Error::Internal(format!("two digit words reach the vertex {key:?}")));
        }
        let id = self.vertices.len();
        self.vertex_index.insert(key.clone(), id);
        self.vertices.push(VertexInfo { key, ty, home });
        Ok(id)
    }

    fn basis(&self, h: &PMat, ty: usize) -> PMat {
        if ty == 0 {
            *h
        } else {
            self.padic.mul(h, &self.padic.eta())
        }
    }

    /// Reduction of `k ∈ P_y` into the quotient at `y`.
    fn reduce_at(&self, k: &PMat, ty: usize) -> Result<Option<usize>> {
        let ctx = &self.padic;
        let local = if ty == 0 {
            *k
        } else {
            ctx.product([&ctx.eta_inv(), k, &ctx.eta()])
        };
        let projective = self.gd.kind() == GroupKind::Pgl2;
        Ok(ctx.reduce(&local, projective)?.and_then(|m| self.quotients[ty].find(m)))
    }

    fn extend(&mut self, c: usize) -> Result<Vec<usize>> {
        let ctx = self.padic;
        let parent = self.chambers[c].clone();
        let letters: Vec<Letter> = match (parent.letters.last(), self.kind) {
            (None, RegionKind::HalfTree) => vec![Letter::S1],
            (None, _) => vec![Letter::S0, Letter::S1],
            (Some(l), _) => vec![l.other()],
        };
        let digits: Vec<u64> = match self.kind {
            RegionKind::Apartment => vec![0],
            _ => (0..self.gd.q()).collect(),
        };
        let mut out = Vec::new();
        for l in letters {
            for &a in &digits {
                let (u, u_inv, n, n_inv) = match l {
                    Letter::S0 => (ctx.upper(a as i64), ctx.upper(-(a as i64)), ctx.n0(), ctx.n0_inv()),
                    Letter::S1 => (ctx.lower(a as i64), ctx.lower(-(a as i64)), ctx.n1(), ctx.n1_inv()),
                };
                let h = ctx.product([&parent.h, &u, &n]);
                let h_inv = ctx.product([&n_inv, &u_inv, &parent.h_inv]);
                let near_ty = type_of(l);
                let far_ty = 1 - near_ty;
                let near = parent.vertices[near_ty];
                if ctx.lattice_key(&self.basis(&h, near_ty))? != self.vertices[near].key {
                    return Err(Error::Internal("gallery step does not fix the shared vertex".into()));
                }
                let id = self.chambers.len();
                let far = self.add_vertex(ctx.lattice_key(&self.basis(&h, far_ty))?, far_ty, id)?;
                let home_inv = self.chambers[self.vertices[near].home].h_inv;
                let delta = ctx.mul(&home_inv, &h);
                let near_twist = self
                    .reduce_at(&delta, near_ty)?
                    .ok_or_else(|| Error::Internal("twist leaves the vertex stabilizer".into()))?;
                let mut twist = [0; 2];
                twist[near_ty] = near_twist;
                twist[far_ty] = quotients_identity(&self.quotients[far_ty]);
                let mut vertices = [0; 2];
                vertices[near_ty] = near;
                vertices[far_ty] = far;
                let mut letters = parent.letters.clone();
                letters.push(l);
                let mut ds = parent.digits.clone();
                ds.push(a);
                self.chambers.push(ChamberInfo {
                    letters,
                    digits: ds,
                    vertices,
                    source: near,
                    parent: Some(c),
                    h,
                    h_inv,
                    twist,
                });
                self.chamber_index.insert(vertices, id);
                out.push(id);
            }
        }
        Ok(out)
    }

    fn check_counts(&self) -> Result<()> {
        let q = self.gd.q() as usize;
        let n = self.radius;
        let expected = match self.kind {
            RegionKind::Apartment => 1 + 2 * n,
            RegionKind::Tree => 1 + 2 * (1..=n).map(|j| q.pow(j as u32)).sum::<usize>(),
            RegionKind::HalfTree => 1 + (1..=n).map(|j| q.pow(j as u32)).sum::<usize>(),
        };
        if self.chambers.len() != expected || self.vertices.len() != self.chambers.len() + 1 {
            return Err(Error::Internal(format!(
                "region has {} chambers and {} vertices, expected {expected} chambers",
                self.chambers.len(),
                self.vertices.len()
            )));
        }
        if self.kind == RegionKind::Tree {
            // vertices at distance k from x0 form P¹(Z/p^k)
            let mut by_depth: HashMap<u32, usize> = HashMap::new();
            for v in &self.vertices {
                *by_depth.entry(v.key.depth).or_default() += 1;
            }
            for k in 1..=n as u32 {
                if by_depth.get(&k).copied().unwrap_or(0) != q.pow(k - 1) * (q + 1) {
                    return Err(Error::Internal(format!("wrong number of vertices at depth {k}")));
                }
            }
        }
        Ok(())
    }

    pub fn vertex_by_key(&self, key: &LatticeKey) -> Option<usize> {
        self.vertex_index.get(key).copied()
    }

    pub fn chamber_by_vertices(&self, a: usize, b: usize) -> Option<usize> {
        let (x, y) = if self.vertices[a].ty == 0 { (a, b) } else { (b, a) };
        self.chamber_index.get(&[x, y]).copied()
    }

    /// `h_F`: the element carrying the standard face `[F]` to `F`.
    pub fn transport_of(&self, f: FaceRef) -> (PMat, PMat) {
        match f {
            FaceRef::Chamber(c) => (self.chambers[c].h, self.chambers[c].h_inv),
            FaceRef::Vertex(v) => {
                let home = &self.chambers[self.vertices[v].home];
                (home.h, home.h_inv)
            }
        }
    }

    /// Lattice key of `g·v`.
    fn moved_vertex(&self, g: &PMat, v: usize) -> Result<Option<usize>> {
        let (h, _) = self.transport_of(FaceRef::Vertex(v));
        let basis = self.padic.mul(g, &self.basis(&h, self.vertices[v].ty));
        Ok(self.vertex_by_key(&self.padic.lattice_key(&basis)?))
    }

    /// `g·F` and `k = h_{gF}⁻¹ g h_F` reduced into the stabilizer of `[F]`, or `None`
    /// when `g·F` leaves the region.
    pub fn transport(&self, g: &PMat, f: FaceRef) -> Result<Option<Transport>> {
        let ctx = &self.padic;
        match f {
            FaceRef::Vertex(v) => {
                let Some(w) = self.moved_vertex(g, v)? else {
                    return Ok(None);
                };
                let (h, _) = self.transport_of(f);
                let (_, h2_inv) = self.transport_of(FaceRef::Vertex(w));
                let k = ctx.product([&h2_inv, g, &h]);
                let ty = self.vertices[v].ty;
                let omega = self.vertices[w].ty != ty;
                let k = if omega { ctx.mul(&ctx.omega_inv(), &k) } else { k };
                let element = self
                    .reduce_at(&k, ty)?
                    .ok_or_else(|| Error::Internal("transport does not stabilize the vertex".into()))?;
                Ok(Some(Transport {
                    target: FaceRef::Vertex(w),
                    element,
                    omega,
                    sign: 1,
                }))
            }
            FaceRef::Chamber(c) => {
                let info = &self.chambers[c];
                let (Some(a), Some(b)) = (self.moved_vertex(g, info.vertices[0])?, self.moved_vertex(g, info.vertices[1])?) else {
                    return Ok(None);
                };
                let Some(d) = self.chamber_by_vertices(a, b) else {
                    return Ok(None);
                };
                let target = &self.chambers[d];
                let k = ctx.product([&target.h_inv, g, &info.h]);
                let src = self.moved_vertex(g, info.source)?.expect("vertex of a located chamber");
                let sign = if src == target.source { 1 } else { -1 };
                for omega in [false, true] {
                    let k = if omega { ctx.mul(&ctx.omega_inv(), &k) } else { k };
                    if let Some(e) = self.reduce_at(&k, 0)? {
                        if let Ok(t) = self.quotients[0].torus_class(e) {
                            let i = self.gd.torus_elements().iter().position(|x| *x == t).expect("torus");
                            return Ok(Some(Transport {
                                target: FaceRef::Chamber(d),
                                element: self.chamber_quotient.torus()[i],
                                omega,
                                sign,
                            }));
                        }
                    }
                }
                Err(Error::Internal("transport does not stabilize the chamber".into()))
            }
        }
    }

    pub fn faces(&self) -> impl Iterator<Item = FaceRef> + '_ {
        (0..self.vertices.len())
            .map(FaceRef::Vertex)
            .chain((0..self.chambers.len()).map(FaceRef::Chamber))
    }

    /// Gallery distance of a face's closest chamber from C.
    pub fn distance(&self, f: FaceRef) -> usize {
        match f {
            FaceRef::Chamber(c) => self.chambers[c].distance(),
            FaceRef::Vertex(v) => self.chambers[self.vertices[v].home].distance(),
        }
    }

    /// The type `[F]` of a face.
    pub fn face_type(&self, f: FaceRef) -> Face {
        match f {
            FaceRef::Chamber(_) => Face::C,
            FaceRef::Vertex(v) => {
                if self.vertices[v].ty == 0 {
                    Face::X0
                } else {
                    Face::X1
                }
            }
        }
    }
}

fn quotients_identity(q: &FiniteQuotient) -> usize {
    q.identity()
}
