//! Hermitian spaces over `F` and `O_F`-lattices embedded in them.
//!
//! The pairing is `(x, y) = x^H G y`, conjugate-linear in the first slot.
//! A lattice carries its ambient space, a basis (columns) and the Gram matrix
//! of that basis.

mod frame;
mod matrix;

pub use frame::Frame;
pub use matrix::Mat;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ring::{FElem, FieldParams, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpaceKind {
    Split,
    Nonsplit,
}

impl SpaceKind {
    /// The kind whose determinant valuation has the parity of `val`.
    pub fn of_val(val: i64) -> Self {
        if val.rem_euclid(2) == 0 {
            SpaceKind::Split
        } else {
            SpaceKind::Nonsplit
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct HermSpace {
    params: FieldParams,
    gram: Mat,
}

impl HermSpace {
    pub fn new(gram: Mat) -> Result<Self> {
        if !gram.is_hermitian() {
            return Err(Error::InvalidParams("gram matrix is not hermitian".into()));
        }
        if gram.det().is_zero() {
            return Err(Error::DegenerateLattice);
        }
        Ok(HermSpace { params: gram.params(), gram })
    }

    /// `diag(1, ..., 1, p)` for the nonsplit space, the identity for the split one.
    pub fn standard(kind: SpaceKind, n: usize, params: FieldParams) -> Self {
        let mut d = vec![params.one(); n];
        if kind == SpaceKind::Nonsplit {
            d[n - 1] = params.int(params.p() as i64);
        }
        HermSpace { params, gram: Mat::diagonal(params, &d) }
    }

    pub fn params(&self) -> FieldParams {
        self.params
    }

    pub fn dim(&self) -> usize {
        self.gram.nrows()
    }

    pub fn gram(&self) -> &Mat {
        &self.gram
    }

    pub fn is_split(&self) -> bool {
        self.gram.det().val().unwrap() % 2 == 0
    }

    pub fn kind(&self) -> SpaceKind {
        if self.is_split() {
            SpaceKind::Split
        } else {
            SpaceKind::Nonsplit
        }
    }

    pub fn pairing(&self, x: &[FElem], y: &[FElem]) -> FElem {
        let gy = self.gram.mul_vec(y);
        let mut s = self.params.zero();
        for (a, b) in x.iter().zip(&gy) {
            s += &(&a.conj() * b);
        }
        s
    }

    pub fn norm(&self, x: &[FElem]) -> Rational {
        self.pairing(x, x).a().clone()
    }

    pub fn orthogonal_sum(&self, o: &HermSpace) -> HermSpace {
        HermSpace { params: self.params, gram: self.gram.block_diag(&o.gram) }
    }
}

impl fmt::Debug for HermSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "HermSpace(p={}, gram={:?})", self.params.p(), self.gram)
    }
}

/// Sorted fundamental invariants `a_1 <= ... <= a_r`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Invariants {
    pub seq: Vec<i64>,
}

impl Invariants {
    pub fn new(mut seq: Vec<i64>) -> Self {
        seq.sort_unstable();
        Invariants { seq }
    }

    pub fn rank(&self) -> usize {
        self.seq.len()
    }

    pub fn val(&self) -> i64 {
        self.seq.iter().sum()
    }

    pub fn is_integral(&self) -> bool {
        self.seq.iter().all(|&a| a >= 0)
    }

    /// Number of positive invariants; `None` unless integral.
    pub fn type_t(&self) -> Option<usize> {
        self.is_integral().then(|| self.seq.iter().filter(|&&a| a > 0).count())
    }

    pub fn e_max(&self) -> Option<i64> {
        self.seq.last().copied()
    }

    pub fn is_vertex(&self, t: usize) -> bool {
        let r = self.rank();
        t <= r && self.seq.iter().enumerate().all(|(i, &a)| a == if i < r - t { 0 } else { 1 })
    }
}

impl fmt::Display for Invariants {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.seq.iter().map(|a| a.to_string()).collect();
        write!(f, "({})", s.join(","))
    }
}

/// Orthogonal basis certificate produced by the invariant computation.
#[derive(Clone, Debug)]
pub struct Diagonalization {
    /// Columns give the orthogonal basis in terms of the lattice basis.
    pub transform: Mat,
    /// Norms of the orthogonal basis vectors.
    pub norms: Vec<Rational>,
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct EmbeddedLattice {
    space: Arc<HermSpace>,
    basis: Mat,
    gram: Mat,
}

impl EmbeddedLattice {
    pub fn new(space: Arc<HermSpace>, basis: Mat) -> Result<Self> {
        if basis.nrows() != space.dim() {
            return Err(Error::AmbientMismatch);
        }
        if basis.rank() != basis.ncols() {
            return Err(Error::DegenerateLattice);
        }
        let gram = basis.conj_transpose().mul(space.gram()).mul(&basis);
        Ok(EmbeddedLattice { space, basis, gram })
    }

    /// The lattice spanned by the standard basis vectors.
    pub fn standard(space: Arc<HermSpace>) -> Self {
        let b = Mat::identity(space.params(), space.dim());
        EmbeddedLattice::new(space, b).unwrap()
    }

    /// `diag(p^a_1, ..., p^a_r)` on the standard basis of its own ambient space.
    pub fn diagonal(params: FieldParams, inv: &[i64]) -> Self {
        let d: Vec<FElem> = inv.iter().map(|&a| params.p_pow(a)).collect();
        let space = Arc::new(HermSpace::new(Mat::diagonal(params, &d)).unwrap());
        EmbeddedLattice::standard(space)
    }

    /// Full-rank lattice with the given Gram matrix on the standard basis.
    pub fn from_gram(gram: Mat) -> Result<Self> {
        Ok(EmbeddedLattice::standard(Arc::new(HermSpace::new(gram)?)))
    }

    /// A lattice with the given invariants inside the standard space of the
    /// matching kind. Each even invariant is realized on one coordinate,
    /// odd invariants on pairs or on the last coordinate.
    pub fn in_standard_space(params: FieldParams, kind: SpaceKind, inv: &[i64]) -> Result<Self> {
        let n = inv.len();
        let val: i64 = inv.iter().sum();
        if SpaceKind::of_val(val) != kind {
            return Err(Error::WrongAmbientParity);
        }
        let space = Arc::new(HermSpace::standard(kind, n, params));
        let mut inv = inv.to_vec();
        inv.sort_unstable();
        // Split into even invariants and odd invariants.
        let (odd, even): (Vec<i64>, Vec<i64>) = inv.iter().partition(|&&a| a.rem_euclid(2) == 1);
        let mut cols: Vec<Vec<FElem>> = Vec::new();
        let mut coord = 0;
        let unit_vec = |i: usize, c: FElem| {
            let mut v = vec![params.zero(); n];
            v[i] = c;
            v
        };
        for &a in &even {
            cols.push(unit_vec(coord, params.p_pow(a / 2)));
            coord += 1;
        }
        // A pair of odd invariants lives in a plane <1> + <1>: with
        // N(x) + N(y) of valuation one, u = (x, y) and w = (-conj y, conj x)
        // are orthogonal of the same norm.
        let (x, y) = odd_pair_seed(params);
        let mut last_odd = None;
        for ch in odd.chunks(2) {
            if let [a, b] = *ch {
                let sa = params.p_pow((a - 1) / 2);
                let sb = params.p_pow((b - 1) / 2);
                let mut c1 = vec![params.zero(); n];
                let mut c2 = vec![params.zero(); n];
                c1[coord] = &x * &sa;
                c1[coord + 1] = &y * &sa;
                c2[coord] = -(&y.conj() * &sb);
                c2[coord + 1] = &x.conj() * &sb;
                cols.push(c1);
                cols.push(c2);
                coord += 2;
            } else {
                last_odd = Some(ch[0]);
            }
        }
        if let Some(a) = last_odd {
            // The remaining odd invariant sits on the last coordinate of norm p.
            debug_assert_eq!(coord, n - 1);
            cols.push(unit_vec(n - 1, params.p_pow((a - 1) / 2)));
        }
        let basis = Mat::from_columns(params, n, &cols);
        EmbeddedLattice::new(space, basis)
    }

    pub fn space(&self) -> &Arc<HermSpace> {
        &self.space
    }

    pub fn params(&self) -> FieldParams {
        self.space.params()
    }

    pub fn basis(&self) -> &Mat {
        &self.basis
    }

    pub fn gram(&self) -> &Mat {
        &self.gram
    }

    pub fn rank(&self) -> usize {
        self.basis.ncols()
    }

    pub fn ambient_dim(&self) -> usize {
        self.space.dim()
    }

    pub fn is_full_rank(&self) -> bool {
        self.rank() == self.ambient_dim()
    }

    pub fn with_basis(&self, basis: Mat) -> Result<Self> {
        EmbeddedLattice::new(self.space.clone(), basis)
    }

    /// Change of basis by a matrix `U` (columns of `B U`).
    pub fn transform(&self, u: &Mat) -> Result<Self> {
        self.with_basis(self.basis.mul(u))
    }

    pub fn diagonalize(&self) -> Result<Diagonalization> {
        diagonalize(&self.gram)
    }

    pub fn fundamental_invariants(&self) -> Result<Invariants> {
        let d = self.diagonalize()?;
        let p = self.params().p();
        Ok(Invariants::new(
            d.norms.iter().map(|x| crate::ring::val_rat(x, p).unwrap()).collect(),
        ))
    }

    pub fn invariants(&self) -> Invariants {
        self.fundamental_invariants().expect("nondegenerate lattice")
    }

    pub fn val(&self) -> i64 {
        self.gram.det().val().expect("nondegenerate lattice")
    }

    /// `q^(-val)`.
    pub fn vol(&self) -> Rational {
        self.params().q_pow_rat(-self.val())
    }

    pub fn is_integral(&self) -> bool {
        self.gram.is_integral()
    }

    pub fn is_vertex(&self, t: usize) -> bool {
        self.is_integral() && self.invariants().is_vertex(t)
    }

    pub fn type_t(&self) -> Option<usize> {
        self.invariants().type_t()
    }

    pub fn dual(&self) -> Result<Self> {
        let inv = self.gram.inverse().ok_or(Error::DegenerateLattice)?;
        self.with_basis(self.basis.mul(&inv))
    }

    pub fn hnf(&self) -> Self {
        let h = self.basis.hnf_columns();
        self.with_basis(h).unwrap()
    }

    fn check_same_space(&self, o: &Self) -> Result<()> {
        if self.space != o.space {
            return Err(Error::AmbientMismatch);
        }
        Ok(())
    }

    pub fn sum(&self, o: &Self) -> Result<Self> {
        self.check_same_space(o)?;
        self.with_basis(self.basis.hstack(&o.basis).hnf_columns())
    }

    pub fn intersect(&self, o: &Self) -> Result<Self> {
        self.check_same_space(o)?;
        if self.rank() != o.rank() || self.basis.hstack(&o.basis).rank() != self.rank() {
            return Err(Error::AmbientMismatch);
        }
        self.dual()?.sum(&o.dual()?)?.dual().map(|l| l.hnf())
    }

    /// Coordinates of `x` in the basis, or `None` if `x` is outside the span.
    pub fn coordinates(&self, x: &[FElem]) -> Option<Vec<FElem>> {
        self.basis.solve(x)
    }

    pub fn contains_vector(&self, x: &[FElem]) -> bool {
        self.coordinates(x)
            .map_or(false, |c| c.iter().all(|e| e.val().map_or(true, |v| v >= 0)))
    }

    pub fn contains(&self, o: &Self) -> bool {
        self.space == o.space && o.basis.columns().iter().all(|c| self.contains_vector(c))
    }

    /// Same module, decided by comparing canonical bases.
    pub fn same_module(&self, o: &Self) -> bool {
        self.space == o.space && self.basis.hnf_columns() == o.basis.hnf_columns()
    }

    /// Canonical key: the echelon basis.
    pub fn key(&self) -> Mat {
        self.basis.hnf_columns()
    }

    /// `Lp ∩ H` where `H` is spanned by the columns of `w`.
    pub fn intersect_with_subspace(&self, w: &Mat) -> Result<Self> {
        let p = self.params();
        let gw = w.conj_transpose().mul(self.space.gram()).mul(w);
        if gw.det().is_zero() {
            return Err(Error::DegenerateSubspace);
        }
        let (r, h) = (self.rank(), w.ncols());
        let big = self.basis.hstack(&w.scale(&p.int(-1)));
        let ker = big.kernel();
        // Coefficient vectors c with B c in H.
        let rows: Vec<usize> = (0..r).collect();
        let v = Mat::from_columns(
            p,
            r,
            &ker.columns().iter().map(|c| rows.iter().map(|&i| c[i].clone()).collect()).collect::<Vec<_>>(),
        );
        if v.ncols() == 0 {
            return Err(Error::DegenerateSubspace);
        }
        // Saturate: {d : V d integral} is the transpose-dual of the module
        // generated by the rows of V.
        let row_lat = v.transpose().hnf_columns();
        let d = row_lat.transpose().inverse().ok_or(Error::DegenerateSubspace)?;
        let basis = self.basis.mul(&v).mul(&d);
        let _ = h;
        Ok(self.with_basis(basis.hnf_columns())?)
    }

    /// Orthogonal sum inside the direct sum of the ambient spaces.
    pub fn orthogonal_sum(&self, o: &Self) -> Self {
        let space = Arc::new(self.space.orthogonal_sum(&o.space));
        let basis = self.basis.block_diag(&o.basis);
        EmbeddedLattice::new(space, basis).unwrap()
    }

    /// Rescale the hermitian form by a rational `c`; every invariant moves by `val(c)`.
    pub fn rescale_form(&self, c: &Rational) -> Self {
        let p = self.params();
        let g = self.space.gram().scale(&p.rat(c.clone()));
        let space = Arc::new(HermSpace::new(g).unwrap());
        EmbeddedLattice::new(space, self.basis.clone()).unwrap()
    }

    /// The orthogonal complement of the span inside the ambient space, as columns.
    pub fn orthogonal_complement(&self) -> Mat {
        self.basis.conj_transpose().mul(self.space.gram()).kernel()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "space": { "gram": self.space.gram().to_json() },
            "basis": self.basis.transpose().to_json(),
        })
    }
}

impl fmt::Debug for EmbeddedLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Lattice(basis={:?}, gram={:?})", self.basis, self.gram)
    }
}

/// `(x, y)` in `O_F^2` with `val(N(x) + N(y)) = 1`.
fn odd_pair_seed(params: FieldParams) -> (FElem, FElem) {
    let p = params.p() as i64;
    let eps = params.eps();
    for c in 0..p {
        for d in 0..p {
            let s = 1 + c * c - eps * d * d;
            if s.rem_euclid(p) == 0 && (s / p).rem_euclid(p) != 0 {
                return (params.one(), params.elem(Rational::from_integer(c.into()), Rational::from_integer(d.into())));
            }
            // Shift c by p to move off valuation two.
            let s = 1 + (c + p) * (c + p) - eps * d * d;
            if s.rem_euclid(p) == 0 && (s / p).rem_euclid(p) != 0 {
                return (params.one(), params.elem(Rational::from_integer((c + p).into()), Rational::from_integer(d.into())));
            }
        }
    }
    unreachable!("the norm form is surjective onto F_p")
}

/// Diagonalize a hermitian Gram matrix by pivoting on an entry of minimal valuation.
pub fn diagonalize(gram: &Mat) -> Result<Diagonalization> {
    let p = gram.params();
    let r = gram.nrows();
    let mut g = gram.clone();
    let mut t = Mat::identity(p, r);
    for k in 0..r {
        let mut best: Option<(i64, usize, usize)> = None;
        for i in k..r {
            for j in k..r {
                if let Some(v) = g[(i, j)].val() {
                    // Prefer a diagonal entry on ties.
                    let better = match best {
                        None => true,
                        Some((bv, bi, bj)) => v < bv || (v == bv && i == j && bi != bj),
                    };
                    if better {
                        best = Some((v, i, j));
                    }
                }
            }
        }
        let Some((v, i, j)) = best else { return Err(Error::DegenerateLattice) };
        let pivot = if i == j {
            i
        } else {
            // e_i <- e_i + u e_j with u in {1, t} so the trace term is a unit times p^v.
            let w = g[(i, j)].scale(&p.p_pow_rat(-v));
            let re_unit = crate::ring::val_rat(w.a(), p.p()).map_or(false, |x| x == 0);
            let u = if re_unit { p.one() } else { p.t() };
            add_multiple(&mut g, &mut t, i, j, &u);
            debug_assert_eq!(g[(i, i)].val(), Some(v));
            i
        };
        swap(&mut g, &mut t, k, pivot);
        let gkk_inv = g[(k, k)].inv().unwrap();
        for l in k + 1..r {
            if g[(k, l)].is_zero() {
                continue;
            }
            let c = -(&g[(k, l)] * &gkk_inv);
            add_multiple(&mut g, &mut t, l, k, &c);
        }
    }
    let norms = (0..r).map(|i| g[(i, i)].a().clone()).collect();
    Ok(Diagonalization { transform: t, norms })
}

/// `e_i <- e_i + c e_j`, updating the Gram matrix by congruence.
fn add_multiple(g: &mut Mat, t: &mut Mat, i: usize, j: usize, c: &FElem) {
    let n = g.nrows();
    for x in 0..t.nrows() {
        let d = c * &t[(x, j)];
        t[(x, i)] += &d;
    }
    for x in 0..n {
        let d = c * &g[(x, j)];
        g[(x, i)] += &d;
    }
    let cc = c.conj();
    for y in 0..n {
        let d = &cc * &g[(j, y)];
        g[(i, y)] += &d;
    }
}

fn swap(g: &mut Mat, t: &mut Mat, a: usize, b: usize) {
    if a == b {
        return;
    }
    let n = g.nrows();
    for x in 0..t.nrows() {
        let tmp = t[(x, a)].clone();
        t[(x, a)] = t[(x, b)].clone();
        t[(x, b)] = tmp;
    }
    for x in 0..n {
        let tmp = g[(x, a)].clone();
        g[(x, a)] = g[(x, b)].clone();
        g[(x, b)] = tmp;
    }
    for y in 0..n {
        let tmp = g[(a, y)].clone();
        g[(a, y)] = g[(b, y)].clone();
        g[(b, y)] = tmp;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k() -> FieldParams {
        FieldParams::new(3).unwrap()
    }

    #[test]
    fn invariant_examples() {
        let k = k();
        let l = EmbeddedLattice::from_gram(Mat::identity(k, 3)).unwrap();
        assert_eq!(l.invariants().seq, vec![0, 0, 0]);
        let l = EmbeddedLattice::diagonal(k, &[3, 1]);
        assert_eq!(l.invariants().seq, vec![1, 3]);
        let h = Mat::from_rows(k, vec![vec![k.zero(), k.one()], vec![k.one(), k.zero()]]);
        let l = EmbeddedLattice::from_gram(h).unwrap();
        assert_eq!(l.invariants().seq, vec![0, 0]);
        assert!(l.same_module(&l.dual().unwrap()));
    }

    #[test]
    fn dual_negates_invariants() {
        let l = EmbeddedLattice::diagonal(k(), &[0, 1, 4]);
        assert_eq!(l.dual().unwrap().invariants().seq, vec![-4, -1, 0]);
        assert!(l.dual().unwrap().dual().unwrap().same_module(&l));
    }

    #[test]
    fn standard_space_realizations() {
        let k = k();
        for inv in [vec![3], vec![1, 1], vec![1, 3], vec![0, 2, 1], vec![1, 1, 1], vec![2, 2], vec![0, 1, 1, 3]] {
            let val: i64 = inv.iter().sum();
            let l = EmbeddedLattice::in_standard_space(k, SpaceKind::of_val(val), &inv).unwrap();
            let mut s = inv.clone();
            s.sort();
            assert_eq!(l.invariants().seq, s, "{inv:?}");
        }
    }

    #[test]
    fn sum_and_intersection_volumes() {
        let k = k();
        let l = EmbeddedLattice::diagonal(k, &[1, 2]);
        let u = Mat::from_rows(k, vec![vec![k.int(1), k.t()], vec![k.int(3), k.int(1)]]);
        let m = l.transform(&u).unwrap();
        let s = l.sum(&m).unwrap();
        let i = l.intersect(&m).unwrap();
        assert_eq!(&i.vol() * &s.vol(), &l.vol() * &m.vol());
        assert!(i.dual().unwrap().same_module(&l.dual().unwrap().sum(&m.dual().unwrap()).unwrap()));
    }

    #[test]
    fn hyperplane_of_orthogonal_sum() {
        let k = k();
        let l = EmbeddedLattice::diagonal(k, &[1, 1, 1]);
        let w = Mat::identity(k, 3).select_columns(&[0, 1]);
        let lf = l.intersect_with_subspace(&w).unwrap();
        assert_eq!(lf.invariants().seq, vec![1, 1]);
    }
}
