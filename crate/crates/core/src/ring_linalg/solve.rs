use super::howell::Howell;
use super::matrix::Matrix;
use crate::error::{Error, Result};

/// A particular solution of `x·A = b` together with generators of the left kernel of `A`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    pub particular: Vec<u64>,
    pub kernel: Matrix,
}

/// Howell form of `[A | I]`; pivots in the first `A.cols()` columns solve,
/// rows starting later give the left kernel.
struct Augmented {
    howell: Howell,
    split: usize,
}

impl Augmented {
    fn new(a: &Matrix) -> Result<Self> {
        let aug = a.hstack(&Matrix::identity(a.ring(), a.rows()))?;
        Ok(Augmented {
            howell: Howell::new(&aug),
            split: a.cols(),
        })
    }

    fn solve(&self, b: &[u64]) -> Option<Vec<u64>> {
        let ring = self.howell.ring();
        let mut v = b.to_vec();
        v.resize(self.howell.cols(), 0);
        self.howell.reduce_upto(&mut v, self.split);
        if v[..self.split].iter().any(|&e| e != 0) {
            return None;
        }
        Some(v[self.split..].iter().map(|&e| ring.neg(e)).collect())
    }

    fn kernel(&self) -> Matrix {
        let h = &self.howell;
        let idx: Vec<usize> = h
            .pivots()
            .iter()
            .enumerate()
            .filter(|(_, &(c, _))| c >= self.split)
            .map(|(i, _)| i)
            .collect();
        h.matrix()
            .select_rows(&idx)
            .col_range(self.split, h.cols())
    }
}

/// Solve `x·A = b`. Returns `None` when no solution exists.
pub fn solve_linear(a: &Matrix, b: &[u64]) -> Result<Option<Solution>> {
    if b.len() != a.cols() {
        return Err(Error::DimensionMismatch(format!(
            "right-hand side of length {} for {} columns",
            b.len(),
            a.cols()
        )));
    }
    let aug = Augmented::new(a)?;
    Ok(aug.solve(b).map(|particular| Solution {
        particular,
        kernel: aug.kernel(),
    }))
}

/// Solve `X·A = B` row by row; `None` if some row has no solution.
pub fn solve_many(a: &Matrix, b: &Matrix) -> Result<Option<Matrix>> {
    if b.cols() != a.cols() {
        return Err(Error::DimensionMismatch("solve_many column counts".into()));
    }
    let aug = Augmented::new(a)?;
    let mut out = Matrix::zeros(a.ring(), 0, a.rows());
    for row in b.row_iter() {
        match aug.solve(row) {
            Some(x) => out.push_row(&x),
            None => return Ok(None),
        }
    }
    Ok(Some(out))
}

/// Generators (in Howell form) of the left kernel `{x : x·A = 0}`.
pub fn left_kernel(a: &Matrix) -> Matrix {
    preimage(a, &Matrix::zeros(a.ring(), 0, a.cols())).expect("shapes agree by construction")
}

/// Generators (in Howell form) of `{x : x·F ∈ rowspan(S)}`.
pub fn preimage(f: &Matrix, s: &Matrix) -> Result<Matrix> {
    if f.cols() != s.cols() {
        return Err(Error::DimensionMismatch(format!(
            "preimage: map has {} columns, target relations {}",
            f.cols(),
            s.cols()
        )));
    }
    let ring = f.ring();
    let n = f.rows();
    let top = f.hstack(&Matrix::identity(ring, n))?;
    let bottom = s.hstack(&Matrix::zeros(ring, s.rows(), n))?;
    let aug = Augmented {
        howell: Howell::new(&top.vstack(&bottom)?),
        split: f.cols(),
    };
    Ok(aug.kernel())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring_linalg::zmod::Zm;

    fn z(m: u64) -> Zm {
        Zm::new(m).unwrap()
    }

    #[test]
    fn identity_solves_trivially() {
        let r = z(9);
        let a = Matrix::identity(r, 3);
        let s = solve_linear(&a, &[4, 0, 7]).unwrap().unwrap();
        assert_eq!(s.particular, vec![4, 0, 7]);
        assert_eq!(s.kernel.rows(), 0);
    }

    #[test]
    fn three_times_x_mod_nine() {
        let r = z(9);
        let a = Matrix::from_rows(r, 1, &[vec![3]]).unwrap();
        // Oracle: enumerate all 9 candidates.
        let sols: Vec<u64> = (0..9).filter(|x| (3 * x) % 9 == 6).collect();
        assert_eq!(sols, vec![2, 5, 8]);
        let s = solve_linear(&a, &[6]).unwrap().unwrap();
        assert!(sols.contains(&s.particular[0]));
        assert_eq!(s.kernel.to_rows(), vec![vec![3]]);
        assert!((0..9).all(|x| (3 * x) % 9 != 1));
        assert!(solve_linear(&a, &[1]).unwrap().is_none());
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let a = Matrix::identity(z(4), 2);
        assert!(matches!(solve_linear(&a, &[1]), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn preimage_of_torsion() {
        // {x in (Z/4)^1 : 2x ∈ span(0)} = span(2)
        let r = z(4);
        let f = Matrix::from_rows(r, 1, &[vec![2]]).unwrap();
        let s = Matrix::zeros(r, 0, 1);
        assert_eq!(preimage(&f, &s).unwrap().to_rows(), vec![vec![2]]);
        // {x : 2x ∈ span(2)} = everything
        let s = Matrix::from_rows(r, 1, &[vec![2]]).unwrap();
        assert_eq!(preimage(&f, &s).unwrap().to_rows(), vec![vec![1]]);
    }
}
