use std::fmt;
use std::ops::{Index, IndexMut};

use num_traits::{One, Zero};

use crate::ring::{FElem, FieldParams, Rational};

/// Dense row-major matrix over `F`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Mat {
    params: FieldParams,
    rows: usize,
    cols: usize,
    data: Vec<FElem>,
}

impl Mat {
    pub fn zeros(params: FieldParams, rows: usize, cols: usize) -> Self {
        Mat { params, rows, cols, data: vec![params.zero(); rows * cols] }
    }

    pub fn identity(params: FieldParams, n: usize) -> Self {
        let mut m = Mat::zeros(params, n, n);
        for i in 0..n {
            m[(i, i)] = params.one();
        }
        m
    }

    pub fn diagonal(params: FieldParams, d: &[FElem]) -> Self {
        let mut m = Mat::zeros(params, d.len(), d.len());
        for (i, x) in d.iter().enumerate() {
            m[(i, i)] = x.clone();
        }
        m
    }

    pub fn from_rows(params: FieldParams, rows: Vec<Vec<FElem>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged matrix");
        Mat { params, rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_columns(params: FieldParams, nrows: usize, cols: &[Vec<FElem>]) -> Self {
        let mut m = Mat::zeros(params, nrows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), nrows);
            for (i, x) in c.iter().enumerate() {
                m[(i, j)] = x.clone();
            }
        }
        m
    }

    pub fn params(&self) -> FieldParams {
        self.params
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> Vec<FElem> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn column(&self, j: usize) -> Vec<FElem> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<FElem>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn select_columns(&self, idx: &[usize]) -> Mat {
        let cols: Vec<_> = idx.iter().map(|&j| self.column(j)).collect();
        Mat::from_columns(self.params, self.rows, &cols)
    }

    pub fn transpose(&self) -> Mat {
        let mut m = Mat::zeros(self.params, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(j, i)] = self[(i, j)].clone();
            }
        }
        m
    }

    pub fn conj_transpose(&self) -> Mat {
        let mut m = Mat::zeros(self.params, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(j, i)] = self[(i, j)].conj();
            }
        }
        m
    }

    pub fn mul(&self, o: &Mat) -> Mat {
        assert_eq!(self.cols, o.rows, "dimension mismatch");
        let mut m = Mat::zeros(self.params, self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = &o[(k, j)];
                    if !b.is_zero() {
                        let t = a * b;
                        m[(i, j)] += &t;
                    }
                }
            }
        }
        m
    }

    pub fn mul_vec(&self, v: &[FElem]) -> Vec<FElem> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut s = self.params.zero();
                for (k, x) in v.iter().enumerate() {
                    s += &(&self[(i, k)] * x);
                }
                s
            })
            .collect()
    }

    pub fn scale(&self, c: &FElem) -> Mat {
        let mut m = self.clone();
        for x in m.data.iter_mut() {
            *x = &*x * c;
        }
        m
    }

    pub fn hstack(&self, o: &Mat) -> Mat {
        assert_eq!(self.rows, o.rows);
        let mut cols = self.columns();
        cols.extend(o.columns());
        Mat::from_columns(self.params, self.rows, &cols)
    }

    pub fn block_diag(&self, o: &Mat) -> Mat {
        let mut m = Mat::zeros(self.params, self.rows + o.rows, self.cols + o.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(i, j)] = self[(i, j)].clone();
            }
        }
        for i in 0..o.rows {
            for j in 0..o.cols {
                m[(self.rows + i, self.cols + j)] = o[(i, j)].clone();
            }
        }
        m
    }

    pub fn is_hermitian(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (0..=i).all(|j| self[(i, j)] == self[(j, i)].conj()))
    }

    /// Row echelon form by Gaussian elimination; returns `(echelon, pivot columns, det sign/scale)`.
    fn eliminate(&self) -> (Mat, Vec<usize>, FElem) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut det = self.params.one();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(pr) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else { continue };
            if pr != r {
                m.swap_rows(pr, r);
                det = -det;
            }
            let inv = m[(r, c)].inv().unwrap();
            det = &det * &m[(r, c)];
            for j in c..m.cols {
                m[(r, j)] = &m[(r, j)] * &inv;
            }
            for i in 0..m.rows {
                if i != r && !m[(i, c)].is_zero() {
                    let f = m[(i, c)].clone();
                    for j in c..m.cols {
                        let t = &f * &m[(r, j)];
                        m[(i, j)] -= &t;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots, det)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self) -> usize {
        self.eliminate().1.len()
    }

    pub fn det(&self) -> FElem {
        assert_eq!(self.rows, self.cols);
        let (_, piv, d) = self.eliminate();
        if piv.len() < self.rows {
            self.params.zero()
        } else {
            d
        }
    }

    pub fn inverse(&self) -> Option<Mat> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let aug = self.hstack(&Mat::identity(self.params, n));
        let (e, piv, _) = aug.eliminate();
        if piv.len() < n || piv[n - 1] >= n {
            return None;
        }
        let idx: Vec<usize> = (n..2 * n).collect();
        Some(e.select_columns(&idx))
    }

    /// Basis of the right kernel, as columns.
    pub fn kernel(&self) -> Mat {
        let (e, piv, _) = self.eliminate();
        let free: Vec<usize> = (0..self.cols).filter(|c| !piv.contains(c)).collect();
        let mut cols = Vec::new();
        for &f in &free {
            let mut v = vec![self.params.zero(); self.cols];
            v[f] = self.params.one();
            for (r, &pc) in piv.iter().enumerate() {
                v[pc] = -e[(r, f)].clone();
            }
            cols.push(v);
        }
        Mat::from_columns(self.params, self.cols, &cols)
    }

    /// Canonical column echelon basis of the `O_F`-module generated by the
    /// columns. Rows are scanned top to bottom; each pivot is exactly `p^v`
    /// and entries left of a pivot are canonical representatives modulo `p^v`.
    pub fn hnf_columns(&self) -> Mat {
        let p = self.params;
        let mut cols: Vec<Vec<FElem>> = self.columns().into_iter().filter(|c| c.iter().any(|x| !x.is_zero())).collect();
        let mut done: Vec<(Vec<FElem>, usize, i64)> = Vec::new();
        for i in 0..self.rows {
            let best = cols
                .iter()
                .enumerate()
                .filter_map(|(j, c)| c[i].val().map(|v| (v, j)))
                .min();
            let Some((v, j)) = best else { continue };
            let piv = cols.swap_remove(j);
            let unit = piv[i].scale(&p.p_pow_rat(-v));
            let uinv = unit.inv().unwrap();
            let piv: Vec<FElem> = piv.iter().map(|x| x * &uinv).collect();
            let pv_inv = p.p_pow_rat(-v);
            for c in cols.iter_mut() {
                if c[i].is_zero() {
                    continue;
                }
                let f = c[i].scale(&pv_inv);
                for (x, y) in c.iter_mut().zip(&piv) {
                    *x -= &(&f * y);
                }
            }
            cols.retain(|c| c.iter().any(|x| !x.is_zero()));
            for (prev, _, _) in done.iter_mut() {
                let x = &prev[i];
                if x.is_zero() {
                    continue;
                }
                let rep = x.canonical_mod(v);
                let f = (x - &rep).scale(&pv_inv);
                if f.is_zero() {
                    continue;
                }
                for (a, b) in prev.iter_mut().zip(&piv) {
                    *a -= &(&f * b);
                }
            }
            done.push((piv, i, v));
        }
        let cols: Vec<Vec<FElem>> = done.into_iter().map(|(c, _, _)| c).collect();
        Mat::from_columns(p, self.rows, &cols)
    }

    /// Solve `self * c = x` for a matrix of full column rank; `None` if `x`
    /// is outside the column span.
    pub fn solve(&self, x: &[FElem]) -> Option<Vec<FElem>> {
        let aug = self.hstack(&Mat::from_columns(self.params, self.rows, &[x.to_vec()]));
        let (e, piv, _) = aug.eliminate();
        if piv.contains(&self.cols) {
            return None;
        }
        assert_eq!(piv.len(), self.cols, "matrix does not have full column rank");
        Some((0..self.cols).map(|r| e[(r, self.cols)].clone()).collect())
    }

    pub fn map_rational(&self, f: impl Fn(&Rational) -> Rational) -> Mat {
        let mut m = self.clone();
        for x in m.data.iter_mut() {
            *x = self.params.elem(f(x.a()), f(x.b()));
        }
        m
    }

    pub fn is_integral(&self) -> bool {
        self.data.iter().all(|x| x.val().map_or(true, |v| v >= 0))
    }

    pub fn min_val(&self) -> Option<i64> {
        self.data.iter().filter_map(|x| x.val()).min()
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let x = &self[(i, j)];
                    if i == j {
                        x.a().is_one() && x.b().is_zero()
                    } else {
                        x.is_zero()
                    }
                })
            })
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            (0..self.rows)
                .map(|i| serde_json::Value::Array(self.row(i).iter().map(|x| x.to_json()).collect()))
                .collect(),
        )
    }
}

impl Index<(usize, usize)> for Mat {
    type Output = FElem;
    fn index(&self, (i, j): (usize, usize)) -> &FElem {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut FElem {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[")?;
        for i in 0..self.rows {
            let r: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "  [{}]", r.join(", "))?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k() -> FieldParams {
        FieldParams::new(3).unwrap()
    }

    #[test]
    fn inverse_roundtrip() {
        let k = k();
        let m = Mat::from_rows(k, vec![vec![k.int(2), k.t()], vec![k.int(3), k.int(9)]]);
        let inv = m.inverse().unwrap();
        assert!(m.mul(&inv).is_identity());
    }

    #[test]
    fn hnf_is_module_invariant() {
        let k = k();
        let m = Mat::from_rows(k, vec![vec![k.int(3), k.int(1)], vec![k.t(), k.int(9)]]);
        let u = Mat::from_rows(k, vec![vec![k.int(1), k.t()], vec![k.int(0), k.int(1)]]);
        let h1 = m.hnf_columns();
        assert_eq!(h1, m.mul(&u).hnf_columns());
        assert_eq!(h1, h1.hnf_columns());
    }

    #[test]
    fn kernel_is_annihilated() {
        let k = k();
        let m = Mat::from_rows(k, vec![vec![k.int(1), k.int(2), k.t()]]);
        let ker = m.kernel();
        assert_eq!(ker.ncols(), 2);
        assert!(m.mul(&ker).data.iter().all(|x| x.is_zero()));
    }
}
