use crate::error::{Error, Result};
use crate::ring_linalg::{Howell, Zm};

use crate::parahoric::Mat2;

/// Working precision for 2×2 matrices over Q_p.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Padic {
    p: u64,
    k: u32,
    modulus: u64,
}

/// `p^{-shift} · a` with `a` an integral matrix known modulo `p^prec`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PMat {
    a: [[u64; 2]; 2],
    shift: i32,
    prec: u32,
}

/// Homothety class of a lattice: `(k, line)` where `L/p^k` is the line in `(Z/p^k)²`
/// spanned by the primitive basis of `L`, and `k` is the distance to `Z_p²`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticeKey {
    pub depth: u32,
    pub line: Vec<u64>,
}

/// Precision used when the caller does not fix one: `3·radius + 6`, or `HKCOEFF_PRECISION`.
pub fn default_precision(radius: usize) -> u32 {
    std::env::var("HKCOEFF_PRECISION")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(3 * radius as u32 + 6)
}

impl Padic {
    pub fn new(p: u64, k: u32) -> Result<Self> {
        let modulus = p
            .checked_pow(k)
            .filter(|m| *m < 1 << 62)
            .ok_or_else(|| Error::Precision(format!("p^{k} does not fit in a machine word")))?;
        Ok(Padic {
            p,
            k,
            modulus,
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.k
    }

    /// `p^{-shift}·rows`.
    pub fn mat(&self, rows: [[i64; 2]; 2], shift: i32) -> PMat {
        PMat {
            a: rows.map(|r| r.map(|x| x.rem_euclid(self.modulus as i64) as u64)),
            shift,
            prec: self.k,
        }
    }

    pub fn identity(&self) -> PMat {
        self.mat([[1, 0], [0, 1]], 0)
    }

    pub fn upper(&self, a: i64) -> PMat {
        self.mat([[1, a], [0, 1]], 0)
    }

    /// `[[1, 0], [p·a, 1]]`.
    pub fn lower(&self, a: i64) -> PMat {
        self.mat([[1, 0], [self.p as i64 * a, 1]], 0)
    }

    pub fn n0(&self) -> PMat {
        self.mat([[0, 1], [-1, 0]], 0)
    }

    pub fn n0_inv(&self) -> PMat {
        self.mat([[0, -1], [1, 0]], 0)
    }

    /// `[[0, -1/π], [π, 0]]`.
    pub fn n1(&self) -> PMat {
        let p2 = (self.p * self.p) as i64;
        self.mat([[0, -1], [p2, 0]], 1)
    }

    pub fn n1_inv(&self) -> PMat {
        let p2 = (self.p * self.p) as i64;
        self.mat([[0, 1], [-p2, 0]], 1)
    }

    /// `[[0, 1], [π, 0]]`.
    pub fn omega(&self) -> PMat {
        self.mat([[0, 1], [self.p as i64, 0]], 0)
    }

    pub fn omega_inv(&self) -> PMat {
        self.mat([[0, 1], [self.p as i64, 0]], 1)
    }

    /// `diag(1, π)`: carries `Z_p²` to the standard lattice of x1.
    pub fn eta(&self) -> PMat {
        self.mat([[1, 0], [0, self.p as i64]], 0)
    }

    pub fn eta_inv(&self) -> PMat {
        self.mat([[self.p as i64, 0], [0, 1]], 1)
    }

    /// `diag(π^e0, π^e1)`.
    pub fn diag_pi(&self, e0: i32, e1: i32) -> PMat {
        let base = e0.min(e1);
        let pw = |e: i32| self.p.pow((e - base) as u32) as i64;
        self.mat([[pw(e0), 0], [0, pw(e1)]], -base)
    }

    pub fn mul(&self, x: &PMat, y: &PMat) -> PMat {
        let m = self.modulus as u128;
        let mut a = [[0; 2]; 2];
        for (i, row) in a.iter_mut().enumerate() {
            for (j, e) in row.iter_mut().enumerate() {
                let s = x.a[i][0] as u128 * y.a[0][j] as u128 + x.a[i][1] as u128 * y.a[1][j] as u128;
                *e = (s % m) as u64;
            }
        }
        PMat {
            a,
            shift: x.shift + y.shift,
            prec: x.prec.min(y.prec),
        }
    }

    pub fn product<'a>(&self, factors: impl IntoIterator<Item = &'a PMat>) -> PMat {
        factors.into_iter().fold(self.identity(), |acc, f| self.mul(&acc, f))
    }

    fn divisible(&self, x: u64) -> bool {
        x.is_multiple_of(self.p)
    }

    /// Remove common factors of p from the integral part.
    pub fn normalize(&self, x: &PMat) -> Result<PMat> {
        let mut m = *x;
        while m.a.iter().flatten().all(|&e| self.divisible(e)) {
            if m.prec <= 1 {
                return Err(Error::Precision(format!("matrix vanishes at precision {}", self.k)));
            }
            m.a = m.a.map(|r| r.map(|e| e / self.p));
            m.shift -= 1;
            m.prec -= 1;
        }
        Ok(m)
    }

    fn valuation(&self, x: u64, prec: u32) -> Result<u32> {
        let mut v = 0;
        let mut x = x;
        while v < prec {
            if !x.is_multiple_of(self.p) {
                return Ok(v);
            }
            x /= self.p;
            v += 1;
        }
        Err(Error::Precision(format!("valuation exceeds precision {prec}")))
    }

    fn det(&self, x: &PMat) -> u64 {
        let m = self.modulus as u128;
        let ad = x.a[0][0] as u128 * x.a[1][1] as u128 % m;
        let bc = x.a[0][1] as u128 * x.a[1][0] as u128 % m;
        ((ad + m - bc) % m) as u64
    }

    /// Reduction mod π of an element of `GL2(O)` (or of its class, when `projective`).
    /// `None` when the element does not stabilize `Z_p²`.
    pub fn reduce(&self, x: &PMat, projective: bool) -> Result<Option<Mat2>> {
        let m = self.normalize(x)?;
        if !projective && m.shift != 0 {
            return Ok(None);
        }
        if self.divisible(self.det(&m) % self.p) {
            return Ok(None);
        }
        Ok(Some(m.a.map(|r| r.map(|e| e % self.p))))
    }

    /// Homothety class of the lattice spanned by the columns of `basis`.
    pub fn lattice_key(&self, basis: &PMat) -> Result<LatticeKey> {
        let m = self.normalize(basis)?;
        let depth = self.valuation(self.det(&m), m.prec)?;
        if depth == 0 {
            return Ok(LatticeKey { depth, line: vec![] });
        }
        let ring = Zm::new(self.p.pow(depth))
            .map_err(|_| Error::Precision(format!("lattice at distance {depth} is too far for machine words")))?;
        let cols = vec![
            vec![ring.reduce(m.a[0][0]), ring.reduce(m.a[1][0])],
            vec![ring.reduce(m.a[0][1]), ring.reduce(m.a[1][1])],
        ];
        let h = Howell::from_rows(ring, 2, cols).into_matrix();
        Ok(LatticeKey {
            depth,
            line: h.entries().to_vec(),
        })
    }
}
