use super::matrix::Matrix;
use super::zmod::{ext_gcd, Order, Zm};

/// A matrix in Howell normal form together with its pivot data.
///
/// Row `i` has its leading entry in column `pivots[i].0`, equal to
/// `pivots[i].1`, a divisor of m. Entries above a pivot are reduced
/// modulo that pivot. The rows with pivot column `>= k` span every element
/// of the row span whose first `k` coordinates vanish.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Howell {
    mat: Matrix,
    pivots: Vec<(usize, u64)>,
}

impl Howell {
    pub fn new(a: &Matrix) -> Howell {
        let ring = a.ring();
        let rows: Vec<Vec<u64>> = a
            .row_iter()
            .filter(|r| r.iter().any(|&e| e != 0))
            .map(<[u64]>::to_vec)
            .collect();
        Self::from_rows(ring, a.cols(), rows)
    }

    pub fn from_rows(ring: Zm, cols: usize, mut work: Vec<Vec<u64>>) -> Howell {
        let m = ring.modulus();
        let mut pivot_rows: Vec<Vec<u64>> = Vec::new();
        let mut pivots: Vec<(usize, u64)> = Vec::new();
        for c in 0..cols {
            if work.is_empty() {
                break;
            }
            let mut pivot: Option<Vec<u64>> = None;
            let mut rest = Vec::with_capacity(work.len() + 1);
            for mut row in work.drain(..) {
                if row[c] == 0 {
                    rest.push(row);
                    continue;
                }
                let Some(p) = pivot.as_mut() else {
                    pivot = Some(row);
                    continue;
                };
                combine_rows(ring, c, p, &mut row);
                if row[c..].iter().any(|&e| e != 0) {
                    rest.push(row);
                }
            }
            if let Some(mut p) = pivot {
                let u = ring.normalizing_unit(p[c]);
                if u != 1 {
                    for e in p[c..].iter_mut() {
                        *e = ring.mul(*e, u);
                    }
                }
                let d = p[c];
                let k = m / d;
                let extra: Vec<u64> = p.iter().map(|&e| ring.mul(e, k)).collect();
                if extra.iter().any(|&e| e != 0) {
                    rest.push(extra);
                }
                pivot_rows.push(p);
                pivots.push((c, d));
            }
            work = rest;
        }
        for j in 0..pivot_rows.len() {
            let (c, d) = pivots[j];
            let (above, below) = pivot_rows.split_at_mut(j);
            let pj = &below[0];
            for row in above.iter_mut() {
                let k = row[c] / d;
                if k == 0 {
                    continue;
                }
                for (e, &b) in row[c..].iter_mut().zip(&pj[c..]) {
                    *e = ring.sub(*e, ring.mul(k, b));
                }
            }
        }
        let mut mat = Matrix::zeros(ring, 0, cols);
        for r in &pivot_rows {
            mat.push_row(r);
        }
        Howell { mat, pivots }
    }

    pub fn matrix(&self) -> &Matrix {
        &self.mat
    }

    pub fn into_matrix(self) -> Matrix {
        self.mat
    }

    pub fn pivots(&self) -> &[(usize, u64)] {
        &self.pivots
    }

    pub fn ring(&self) -> Zm {
        self.mat.ring()
    }

    pub fn cols(&self) -> usize {
        self.mat.cols()
    }

    /// Reduce `v` in place against the rows; the result is the canonical
    /// representative of `v` modulo the span.
    pub fn reduce(&self, v: &mut [u64]) {
        self.reduce_upto(v, usize::MAX);
    }

    /// Reduce using only pivots in columns `< limit`; returns the
    /// coefficients used (one per applied row).
    pub(crate) fn reduce_upto(&self, v: &mut [u64], limit: usize) -> Vec<u64> {
        let ring = self.ring();
        let mut coeffs = vec![0; self.pivots.len()];
        for (i, &(c, d)) in self.pivots.iter().enumerate() {
            if c >= limit {
                break;
            }
            let k = v[c] / d;
            if k == 0 {
                continue;
            }
            coeffs[i] = k;
            for (e, &b) in v[c..].iter_mut().zip(&self.mat.row(i)[c..]) {
                *e = ring.sub(*e, ring.mul(k, b));
            }
        }
        coeffs
    }

    pub fn contains(&self, v: &[u64]) -> bool {
        let mut w = v.to_vec();
        self.reduce(&mut w);
        w.iter().all(|&e| e == 0)
    }

    /// Cardinality of the row span.
    pub fn span_order(&self) -> Order {
        let m = self.ring().modulus();
        let mut o = Order::one();
        for &(_, d) in &self.pivots {
            o.mul_assign_num(m / d);
        }
        o
    }

    /// Cardinality of R^cols modulo the row span.
    pub fn quotient_order(&self) -> Order {
        let m = self.ring().modulus();
        let mut o = Order::one();
        let mut next = 0;
        for &(c, d) in &self.pivots {
            for _ in next..c {
                o.mul_assign_num(m);
            }
            o.mul_assign_num(d);
            next = c + 1;
        }
        for _ in next..self.cols() {
            o.mul_assign_num(m);
        }
        o
    }

    /// True iff the span is all of R^cols.
    pub fn is_full(&self) -> bool {
        self.pivots.len() == self.cols() && self.pivots.iter().all(|&(_, d)| d == 1)
    }
}

/// Unimodular 2x2 row operation making `p[c]` the gcd and `row[c]` zero.
fn combine_rows(ring: Zm, c: usize, p: &mut [u64], row: &mut [u64]) {
    let (a, b) = (p[c], row[c]);
    let (g, s, t) = ext_gcd(a as i64, b as i64);
    let (u, v) = ((a as i64 / g) as u64, (b as i64 / g) as u64);
    let (s, t) = (ring.from_i64(s), ring.from_i64(t));
    let (u, v) = (ring.reduce(u), ring.reduce(v));
    for (pe, re) in p[c..].iter_mut().zip(row[c..].iter_mut()) {
        let (x, y) = (*pe, *re);
        *pe = ring.add(ring.mul(s, x), ring.mul(t, y));
        *re = ring.sub(ring.mul(u, y), ring.mul(v, x));
    }
}

/// Howell normal form of the row span of `a`.
pub fn howell_form(a: &Matrix) -> Matrix {
    Howell::new(a).into_matrix()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn z(m: u64) -> Zm {
        Zm::new(m).unwrap()
    }

    /// All vectors of the row span, by enumerating coefficient tuples.
    fn span_by_enumeration(a: &Matrix) -> BTreeSet<Vec<u64>> {
        let ring = a.ring();
        let mut span = BTreeSet::new();
        span.insert(vec![0; a.cols()]);
        for row in a.row_iter() {
            let mut next = BTreeSet::new();
            for v in &span {
                for k in 0..ring.modulus() {
                    let w: Vec<u64> = v
                        .iter()
                        .zip(row)
                        .map(|(&x, &y)| ring.add(x, ring.mul(k, y)))
                        .collect();
                    next.insert(w);
                }
            }
            span = next;
        }
        span
    }

    /// Canonical generators rebuilt from an enumerated span: for each column
    /// c, the least leading ideal d over span vectors vanishing before c, then
    /// the lexicographically least span vector with that prefix and entry d.
    fn canonical_from_span(ring: Zm, cols: usize, span: &BTreeSet<Vec<u64>>) -> Matrix {
        let mut out = Matrix::zeros(ring, 0, cols);
        for c in 0..cols {
            let with_prefix = || span.iter().filter(move |v| v[..c].iter().all(|&e| e == 0));
            let Some(d) = with_prefix().filter(|v| v[c] != 0).map(|v| ring.ideal(v[c])).min() else {
                continue;
            };
            let v = with_prefix().filter(|v| v[c] == d).min().unwrap();
            out.push_row(v);
        }
        out
    }

    #[test]
    fn zero_matrix_has_empty_form() {
        let a = Matrix::zeros(z(4), 3, 2);
        assert_eq!(howell_form(&a).rows(), 0);
    }

    #[test]
    fn already_canonical() {
        let a = Matrix::from_rows(z(4), 1, &[vec![2]]).unwrap();
        assert_eq!(howell_form(&a).to_rows(), vec![vec![2]]);
    }

    #[test]
    fn mixed_example_matches_enumerated_span() {
        let r = z(4);
        let a = Matrix::from_rows(r, 2, &[vec![2, 0], vec![0, 2], vec![1, 1]]).unwrap();
        let h = howell_form(&a);
        let span = span_by_enumeration(&a);
        assert_eq!(span.len(), 8);
        assert_eq!(span_by_enumeration(&h), span);
        assert_eq!(h, canonical_from_span(r, 2, &span));
        assert_eq!(h.to_rows(), vec![vec![1, 1], vec![0, 2]]);
    }

    #[test]
    fn howell_property_on_small_cases() {
        // [[2, 1]] over Z/4: 2*(2,1) = (0,2) must appear as a row.
        let r = z(4);
        let a = Matrix::from_rows(r, 2, &[vec![2, 1]]).unwrap();
        let h = howell_form(&a);
        assert_eq!(h.to_rows(), vec![vec![2, 1], vec![0, 2]]);
    }

    #[test]
    fn canonical_against_enumeration_exhaustive_2x2_mod6() {
        let r = z(6);
        for a0 in 0..6 {
            for a1 in 0..6 {
                for b0 in [0, 2, 3] {
                    for b1 in 0..6 {
                        let a = Matrix::from_rows(r, 2, &[vec![a0, a1], vec![b0, b1]]).unwrap();
                        let h = howell_form(&a);
                        let span = span_by_enumeration(&a);
                        assert_eq!(span_by_enumeration(&h), span);
                        assert_eq!(h, canonical_from_span(r, 2, &span), "{a:?}");
                        let hw = Howell::new(&a);
                        assert_eq!(hw.span_order().to_u128(), Some(span.len() as u128));
                    }
                }
            }
        }
    }
}
