//! Breadth-first enumeration of integral overlattices in modular coordinates.
//!
//! Fix an integral full-rank `L` with basis `B` and let `A` be its largest
//! invariant, so that `L^∨ ⊆ p^(-A) L`. An overlattice `M` is recorded by the
//! submodule `S = p^A M / p^A L` of `(O_F/p^A)^n`, keyed by its Howell form.
//!
//! Every integral `M' ⊋ M` contains some `M + O_F z` with `z = ζ/p`, where
//! `ζ` spans an isotropic line of the form `(ζ,ζ)/p mod p` on the radical of
//! `G_M mod p`. Walking these simple steps from `L` reaches everything.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::lattice::{EmbeddedLattice, Mat};
use crate::ring::{elementary_divisors, Echelon, FElem, Fq2, ResidueElem, ResidueRing, F2};

/// One integral overlattice in the engine's coordinates.
#[derive(Clone, Debug)]
pub struct Node {
    /// Howell form of `p^A M / p^A L`.
    pub key: Echelon,
    /// Triangular basis of `p^A M` in frame coordinates, exact as integers.
    pub basis: Vec<Vec<ResidueElem>>,
    pub length: u32,
    pub type_t: usize,
    pub cyclic: bool,
    /// Type of `M ∩ span(b_1, ..., b_{n-1})` when requested.
    pub flat_type: Option<usize>,
    /// Length of `M ∩ span(b_1, ..., b_{n-1})` over the root's intersection.
    pub flat_length: u32,
}

#[derive(Clone, Copy, Debug)]
pub struct EngineOptions {
    pub budget: u64,
    /// Also compute the type of the intersection with the span of all
    /// frame vectors but the first.
    pub flat_type: bool,
    /// Keep only overlattices whose intersection with that span is the
    /// root's, pruning the search as soon as it grows.
    pub primitive_flat: bool,
}

pub struct Engine {
    basis: Mat,
    n: usize,
    a: u32,
    key_ring: ResidueRing,
    basis_ring: ResidueRing,
    gram_ring: ResidueRing,
    gram: Vec<Vec<ResidueElem>>,
    fq: Fq2,
    opts: EngineOptions,
}

impl Engine {
    /// The frame is the given basis of `lattice`, which must be integral and full rank.
    pub fn new(lattice: &EmbeddedLattice, opts: EngineOptions) -> Result<Self> {
        if !lattice.is_integral() {
            return Err(Error::NotIntegral);
        }
        let params = lattice.params();
        let a = lattice.invariants().e_max().unwrap_or(0) as u32;
        let key_ring = ResidueRing::new(params, a)?;
        let basis_ring = ResidueRing::new(params, a + 2)?;
        let gram_ring = ResidueRing::new(params, 2 * a + 2)?;
        let g = lattice.gram();
        let n = lattice.rank();
        let gram = (0..n)
            .map(|i| (0..n).map(|j| gram_ring.reduce(&g[(i, j)])).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Ok(Engine {
            basis: lattice.basis().clone(),
            n,
            a,
            key_ring,
            basis_ring,
            gram_ring,
            gram,
            fq: Fq2::new(params),
            opts,
        })
    }

    pub fn exponent(&self) -> u32 {
        self.a
    }

    pub fn key_ring(&self) -> ResidueRing {
        self.key_ring
    }

    /// All integral overlattices, sorted by key.
    pub fn enumerate(&self) -> Result<Vec<Node>> {
        let root = self.node(Echelon::new(self.key_ring, self.n, vec![]))?;
        let mut seen: HashSet<Vec<u128>> = HashSet::new();
        seen.insert(root.key.key());
        let mut level = vec![root];
        let mut out = Vec::new();
        let mut spent: u64 = 0;
        while !level.is_empty() {
            let mut next = Vec::new();
            for node in &level {
                for y in self.children(node, &mut spent)? {
                    let mut rows = node.key.rows().to_vec();
                    rows.push(y);
                    let key = Echelon::new(self.key_ring, self.n, rows);
                    if seen.insert(key.key()) {
                        let child = self.node(key)?;
                        if self.opts.primitive_flat && child.flat_length > 0 {
                            continue;
                        }
                        next.push(child);
                    }
                }
            }
            out.append(&mut level);
            level = next;
        }
        out.sort_by(|x, y| x.key.key().cmp(&y.key.key()));
        Ok(out)
    }

    fn node(&self, key: Echelon) -> Result<Node> {
        let (br, n, a) = (self.basis_ring, self.n, self.a);
        let mut rows: Vec<Vec<ResidueElem>> = key
            .rows()
            .iter()
            .map(|r| r.iter().map(|x| br.new_elem(x.a, x.b)).collect())
            .collect();
        for i in 0..n {
            let mut e = vec![br.zero(); n];
            e[i] = br.p_pow(a);
            rows.push(e);
        }
        let ech = Echelon::new(br, n, rows);
        debug_assert_eq!(ech.rows().len(), n);
        let basis = ech.rows().to_vec();
        let length: u32 = ech.pivots().iter().map(|&(_, v)| a - v).sum();
        // Pivot columns increase, so the rows after the first span the flat part.
        let flat_length: u32 = ech.pivots().iter().skip(1).map(|&(_, v)| a - v).sum();
        let gm = self.gram_of(&basis)?;
        let type_t = n - self.rank_mod_p(&gm, 0..n);
        let cyclic = elementary_divisors(self.key_ring, n, key.rows()).len() <= 1;
        let flat_type = if self.opts.flat_type { Some((n - 1) - self.rank_mod_p(&gm, 1..n)) } else { None };
        Ok(Node { key, basis, length, type_t, cyclic, flat_type, flat_length })
    }

    /// `G_M mod p^2` for the basis rows `Y / p^A`.
    fn gram_of(&self, y: &[Vec<ResidueElem>]) -> Result<Vec<Vec<ResidueElem>>> {
        let gr = self.gram_ring;
        let n = self.n;
        let lift: Vec<Vec<ResidueElem>> =
            y.iter().map(|r| r.iter().map(|x| gr.new_elem(x.a, x.b)).collect()).collect();
        let gy: Vec<Vec<ResidueElem>> = lift
            .iter()
            .map(|r| {
                (0..n)
                    .map(|i| (0..n).fold(gr.zero(), |s, j| gr.add(s, gr.mul(self.gram[i][j], r[j]))))
                    .collect()
            })
            .collect();
        let p2 = ResidueRing::new(gr.params(), 2)?;
        let mut out = vec![vec![p2.zero(); n]; n];
        for k in 0..n {
            for l in 0..n {
                let s = (0..n).fold(gr.zero(), |s, i| gr.add(s, gr.mul(gr.conj(lift[k][i]), gy[l][i])));
                let d = gr.p().pow(2 * self.a);
                if s.a % d != 0 || s.b % d != 0 {
                    return Err(Error::Inconsistent("overlattice is not integral".into()));
                }
                out[k][l] = p2.new_elem(s.a / d, s.b / d);
            }
        }
        Ok(out)
    }

    fn rank_mod_p(&self, g: &[Vec<ResidueElem>], idx: std::ops::Range<usize>) -> usize {
        let p = self.fq.p() as u128;
        let m: Vec<Vec<F2>> = idx
            .clone()
            .map(|i| idx.clone().map(|j| ((g[i][j].a % p) as u64, (g[i][j].b % p) as u64)).collect())
            .collect();
        let (_, piv) = row_reduce(&self.fq, m);
        piv.len()
    }

    /// Generators `y` (mod `p^A`) of all simple integral extensions of the node.
    fn children(&self, node: &Node, spent: &mut u64) -> Result<Vec<Vec<ResidueElem>>> {
        if node.type_t == 0 || self.a == 0 {
            return Ok(vec![]);
        }
        let fq = self.fq;
        let n = self.n;
        let p = fq.p() as u128;
        let gm = self.gram_of(&node.basis)?;
        let g1: Vec<Vec<F2>> =
            gm.iter().map(|r| r.iter().map(|x| ((x.a % p) as u64, (x.b % p) as u64)).collect()).collect();
        let kernel = kernel_of(&fq, g1);
        // Hermitian form (ζ, ζ')/p mod p on the kernel.
        let p2 = ResidueRing::new(self.gram_ring.params(), 2)?;
        let to_p2 = |x: F2| p2.new_elem(x.0 as u128, x.1 as u128);
        let t = kernel.len();
        let mut q = vec![vec![(0u64, 0u64); t]; t];
        for i in 0..t {
            for j in 0..t {
                let mut s = p2.zero();
                for k in 0..n {
                    for l in 0..n {
                        let term = p2.mul(p2.mul(p2.conj(to_p2(kernel[i][k])), gm[k][l]), to_p2(kernel[j][l]));
                        s = p2.add(s, term);
                    }
                }
                debug_assert!(s.a % p == 0 && s.b % p == 0);
                q[i][j] = ((s.a / p) as u64, (s.b / p) as u64);
            }
        }
        let (diag, change) = diagonalize_hermitian(&fq, q);
        let lines = isotropic_lines(&fq, &diag);
        *spent += lines.len() as u64;
        if *spent > self.opts.budget {
            return Err(Error::BudgetExceeded { what: "overlattice enumeration", limit: self.opts.budget });
        }
        let br = self.basis_ring;
        let mut out = Vec::with_capacity(lines.len());
        for line in lines {
            // Coordinates in the kernel basis, then in the rows of Y.
            let mut zeta = vec![(0u64, 0u64); n];
            for (i, c) in line.iter().enumerate() {
                if fq.is_zero(*c) {
                    continue;
                }
                for (r, kc) in change[i].iter().enumerate() {
                    let coef = fq.mul(*c, *kc);
                    if fq.is_zero(coef) {
                        continue;
                    }
                    for k in 0..n {
                        zeta[k] = fq.add(zeta[k], fq.mul(coef, kernel[r][k]));
                    }
                }
            }
            let mut y = vec![br.zero(); n];
            for (k, z) in zeta.iter().enumerate() {
                if fq.is_zero(*z) {
                    continue;
                }
                let c = br.new_elem(z.0 as u128, z.1 as u128);
                for j in 0..n {
                    y[j] = br.add(y[j], br.mul(c, node.basis[k][j]));
                }
            }
            let key_y: Vec<ResidueElem> = y
                .iter()
                .map(|x| {
                    debug_assert!(x.a % p == 0 && x.b % p == 0);
                    self.key_ring.new_elem(x.a / p, x.b / p)
                })
                .collect();
            out.push(key_y);
        }
        Ok(out)
    }

    /// The overlattice as an embedded lattice (canonical basis).
    pub fn materialize(&self, node: &Node, like: &EmbeddedLattice) -> EmbeddedLattice {
        let params = like.params();
        let br = self.basis_ring;
        let scale = params.p_pow_rat(-(self.a as i64));
        let cols: Vec<Vec<FElem>> = node
            .basis
            .iter()
            .map(|r| {
                let c: Vec<FElem> = r.iter().map(|&x| br.lift(x).scale(&scale)).collect();
                self.basis.mul_vec(&c)
            })
            .collect();
        let m = Mat::from_columns(params, self.basis.nrows(), &cols);
        like.with_basis(m.hnf_columns()).expect("overlattice basis")
    }

    /// Frame coordinates of a node's vectors modulo `p^A`, as a membership test
    /// for vectors of `p^(-A) L` given by their coordinates times `p^A`.
    pub fn contains_scaled(&self, node: &Node, y: &[ResidueElem]) -> bool {
        node.key.contains(y)
    }
}

/// Reduced row echelon form over `F_{q^2}`; returns the matrix and pivot columns.
pub(crate) fn row_reduce(fq: &Fq2, mut m: Vec<Vec<F2>>) -> (Vec<Vec<F2>>, Vec<usize>) {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut piv = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(pr) = (r..rows).find(|&i| !fq.is_zero(m[i][c])) else { continue };
        m.swap(pr, r);
        let inv = fq.inv(m[r][c]).unwrap();
        for j in 0..cols {
            m[r][j] = fq.mul(m[r][j], inv);
        }
        for i in 0..rows {
            if i != r && !fq.is_zero(m[i][c]) {
                let f = m[i][c];
                for j in 0..cols {
                    m[i][j] = fq.sub(m[i][j], fq.mul(f, m[r][j]));
                }
            }
        }
        piv.push(c);
        r += 1;
    }
    (m, piv)
}

/// Basis of `{v : M v = 0}` over `F_{q^2}`.
pub(crate) fn kernel_of(fq: &Fq2, m: Vec<Vec<F2>>) -> Vec<Vec<F2>> {
    let cols = m.first().map_or(0, |r| r.len());
    let (e, piv) = row_reduce(fq, m);
    let mut out = Vec::new();
    for f in (0..cols).filter(|c| !piv.contains(c)) {
        let mut v = vec![(0, 0); cols];
        v[f] = (1, 0);
        for (r, &pc) in piv.iter().enumerate() {
            v[pc] = fq.neg(e[r][f]);
        }
        out.push(v);
    }
    out
}

/// Diagonalize a hermitian form `q` over `F_{q^2}`. Returns the diagonal
/// (in `F_q`) and the change of basis: row `i` gives the `i`-th new basis
/// vector in the old coordinates.
pub(crate) fn diagonalize_hermitian(fq: &Fq2, mut q: Vec<Vec<F2>>) -> (Vec<u64>, Vec<Vec<F2>>) {
    let t = q.len();
    let mut basis: Vec<Vec<F2>> = (0..t).map(|i| (0..t).map(|j| if i == j { (1, 0) } else { (0, 0) }).collect()).collect();
    // v_i <- v_i + c v_j
    let add = |q: &mut Vec<Vec<F2>>, basis: &mut Vec<Vec<F2>>, i: usize, j: usize, c: F2| {
        for x in 0..t {
            let d = fq.mul(c, basis[j][x]);
            basis[i][x] = fq.add(basis[i][x], d);
        }
        for x in 0..t {
            let d = fq.mul(c, q[x][j]);
            q[x][i] = fq.add(q[x][i], d);
        }
        let cc = fq.conj(c);
        for y in 0..t {
            let d = fq.mul(cc, q[j][y]);
            q[i][y] = fq.add(q[i][y], d);
        }
    };
    for k in 0..t {
        if fq.is_zero(q[k][k]) {
            if let Some(i) = (k + 1..t).find(|&i| !fq.is_zero(q[i][i])) {
                basis.swap(k, i);
                q.swap(k, i);
                for r in q.iter_mut() {
                    r.swap(k, i);
                }
            } else if let Some(j) = (k + 1..t).find(|&j| !fq.is_zero(q[k][j])) {
                // Tr(c q_kj) is nonzero for c = 1 or c = t.
                let c = if fq.add(q[k][j], fq.conj(q[k][j])) != (0, 0) { (1, 0) } else { (0, 1) };
                add(&mut q, &mut basis, k, j, c);
            }
        }
        if fq.is_zero(q[k][k]) {
            continue;
        }
        let inv = fq.inv(q[k][k]).unwrap();
        for l in k + 1..t {
            if !fq.is_zero(q[k][l]) {
                let c = fq.neg(fq.mul(q[k][l], inv));
                add(&mut q, &mut basis, l, k, c);
            }
        }
    }
    let diag = (0..t).map(|i| q[i][i].0).collect();
    (diag, basis)
}

/// Isotropic lines of `sum d_i N(z_i)`, each given by its representative
/// whose first nonzero coordinate is 1.
pub(crate) fn isotropic_lines(fq: &Fq2, diag: &[u64]) -> Vec<Vec<F2>> {
    let p = fq.p();
    let t = diag.len();
    let pre = fq.norm_preimages();
    let norm_one = fq.norm_one();
    let elems: Vec<F2> = fq.elements().collect();
    let last_nd = (0..t).rev().find(|&i| diag[i] != 0);
    let mut out = Vec::new();
    for lead in 0..t {
        let mut v = vec![(0u64, 0u64); t];
        v[lead] = (1, 0);
        let solve = match last_nd {
            Some(l) if l > lead => Some(l),
            _ => None,
        };
        let free: Vec<usize> = (lead + 1..t).filter(|&i| Some(i) != solve).collect();
        let mut idx = vec![0usize; free.len()];
        loop {
            for (slot, &i) in free.iter().enumerate() {
                v[i] = elems[idx[slot]];
            }
            let partial: u64 = (0..t)
                .filter(|&i| Some(i) != solve)
                .map(|i| diag[i] * fq.norm(v[i]) % p)
                .sum::<u64>()
                % p;
            match solve {
                None => {
                    if partial == 0 {
                        out.push(v.clone());
                    }
                }
                Some(l) => {
                    // d_l N(z) = -partial
                    let dinv = crate::ring::inv_mod_u64(diag[l], p);
                    let c = (p - partial) % p * dinv % p;
                    if c == 0 {
                        v[l] = (0, 0);
                        out.push(v.clone());
                    } else {
                        let base = pre[c as usize];
                        for &u in &norm_one {
                            v[l] = fq.mul(base, u);
                            out.push(v.clone());
                        }
                    }
                }
            }
            // Advance the odometer.
            let mut s = 0;
            loop {
                if s == idx.len() {
                    break;
                }
                idx[s] += 1;
                if idx[s] < elems.len() {
                    break;
                }
                idx[s] = 0;
                s += 1;
            }
            if s == idx.len() {
                break;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::FieldParams;

    #[test]
    fn isotropic_line_counts() {
        // A nondegenerate hermitian space of dim t over F_{q^2} has
        // (q^t - (-1)^t)(q^(t-1) - (-1)^(t-1)) / (q^2 - 1) isotropic lines.
        for p in [3u64, 5] {
            let fq = Fq2::new(FieldParams::new(p).unwrap());
            for t in 1..=3u32 {
                let q = p as i64;
                let s = |e: u32| q.pow(e) - (-1i64).pow(e);
                let expected = s(t) * s(t - 1) / (q * q - 1);
                let lines = isotropic_lines(&fq, &vec![1; t as usize]);
                assert_eq!(lines.len() as i64, expected, "p={p} t={t}");
            }
            // Totally isotropic plane: all q^2 + 1 lines.
            assert_eq!(isotropic_lines(&fq, &[0, 0]).len() as u64, p * p + 1);
        }
    }
}
