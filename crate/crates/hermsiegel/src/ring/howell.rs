//! Canonical echelon (Howell) forms of submodules of `(O_F/p^k)^n`.
//!
//! `O_F/p^k` is a chain ring: every element is `p^v` times a unit. Each pivot
//! is normalized to exactly `p^v`, and after every pivot the saturation row
//! `p^(k-v) P` is pushed back so that the Howell property holds. Entries above
//! a pivot are reduced to digits below `p^v`, making the row set canonical.

use super::{ResidueElem, ResidueRing};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Echelon {
    ring: ResidueRing,
    n: usize,
    rows: Vec<Vec<ResidueElem>>,
    /// `(column, valuation)` of each row's pivot, columns strictly increasing.
    pivots: Vec<(usize, u32)>,
}

impl Echelon {
    pub fn new(ring: ResidueRing, n: usize, input: Vec<Vec<ResidueElem>>) -> Self {
        let k = ring.k();
        let mut work: Vec<Vec<ResidueElem>> =
            input.into_iter().filter(|r| r.iter().any(|x| !x.is_zero())).collect();
        let mut rows = Vec::new();
        let mut pivots = Vec::new();
        for c in 0..n {
            let best = work
                .iter()
                .enumerate()
                .map(|(i, r)| (ring.val(r[c]), i))
                .filter(|&(v, _)| v < k)
                .min();
            let Some((v, idx)) = best else { continue };
            let mut piv = work.swap_remove(idx);
            let (_, u) = ring.split_unit(piv[c]);
            let uinv = ring.inv(u).expect("unit");
            for x in piv.iter_mut() {
                *x = ring.mul(*x, uinv);
            }
            for r in work.iter_mut() {
                if r[c].is_zero() {
                    continue;
                }
                let f = ring.div_p_pow(r[c], v);
                for j in c..n {
                    r[j] = ring.sub(r[j], ring.mul(f, piv[j]));
                }
            }
            work.retain(|r| r.iter().any(|x| !x.is_zero()));
            let sat = ring.p_pow(k - v);
            let sat_row: Vec<_> = piv.iter().map(|&x| ring.mul(x, sat)).collect();
            if sat_row.iter().any(|x| !x.is_zero()) {
                work.push(sat_row);
            }
            rows.push(piv);
            pivots.push((c, v));
        }
        debug_assert!(work.is_empty());
        let mut e = Echelon { ring, n, rows, pivots };
        e.reduce_above();
        e
    }

    fn reduce_above(&mut self) {
        let ring = self.ring;
        for j in 0..self.rows.len() {
            let (c, v) = self.pivots[j];
            let m = ring.p().pow(v);
            for i in 0..j {
                let x = self.rows[i][c];
                let q = ring.new_elem(x.a / m, x.b / m);
                if q.is_zero() {
                    continue;
                }
                for l in c..self.n {
                    let s = ring.mul(q, self.rows[j][l]);
                    self.rows[i][l] = ring.sub(self.rows[i][l], s);
                }
            }
        }
    }

    pub fn ring(&self) -> ResidueRing {
        self.ring
    }

    pub fn ncols(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[Vec<ResidueElem>] {
        &self.rows
    }

    pub fn pivots(&self) -> &[(usize, u32)] {
        &self.pivots
    }

    pub fn is_zero(&self) -> bool {
        self.rows.is_empty()
    }

    /// `log_q` of the number of elements: the module has `q^(2 sum(k - v))` elements.
    pub fn log_size(&self) -> u32 {
        self.pivots.iter().map(|&(_, v)| 2 * (self.ring.k() - v)).sum()
    }

    /// Remainder of `x` after reduction by the rows; zero iff `x` lies in the module.
    pub fn remainder(&self, x: &[ResidueElem]) -> Vec<ResidueElem> {
        let ring = self.ring;
        let mut x = x.to_vec();
        for (row, &(c, v)) in self.rows.iter().zip(&self.pivots) {
            if x[c].is_zero() || ring.val(x[c]) < v {
                continue;
            }
            let f = ring.div_p_pow(x[c], v);
            for l in c..self.n {
                x[l] = ring.sub(x[l], ring.mul(f, row[l]));
            }
        }
        x
    }

    pub fn contains(&self, x: &[ResidueElem]) -> bool {
        self.remainder(x).iter().all(|e| e.is_zero())
    }

    /// Flattened canonical key.
    pub fn key(&self) -> Vec<u128> {
        let mut out = Vec::with_capacity(self.rows.len() * self.n * 2);
        for r in &self.rows {
            for x in r {
                out.push(x.a);
                out.push(x.b);
            }
        }
        out
    }

    /// Every element exactly once, as `sum c_j row_j` with `c_j` ranging over
    /// residues modulo `p^(k - v_j)`.
    pub fn elements(&self) -> Vec<Vec<ResidueElem>> {
        let ring = self.ring;
        let mut acc = vec![vec![ring.zero(); self.n]];
        for (row, &(_, v)) in self.rows.iter().zip(&self.pivots) {
            let m = ring.p().pow(ring.k() - v);
            let mut next = Vec::with_capacity(acc.len() * (m * m) as usize);
            for a in 0..m {
                for b in 0..m {
                    let c = ring.new_elem(a, b);
                    for base in &acc {
                        next.push(
                            base.iter().zip(row).map(|(&x, &y)| ring.add(x, ring.mul(c, y))).collect(),
                        );
                    }
                }
            }
            acc = next;
        }
        acc
    }
}

/// Smith-form valuations of the module generated by `rows` in `(O_F/p^k)^n`;
/// only the nonzero elementary divisors are returned, sorted.
pub fn elementary_divisors(ring: ResidueRing, n: usize, rows: &[Vec<ResidueElem>]) -> Vec<u32> {
    let k = ring.k();
    let mut m: Vec<Vec<ResidueElem>> = rows.to_vec();
    let mut cols: Vec<usize> = (0..n).collect();
    let mut out = Vec::new();
    loop {
        let mut best: Option<(u32, usize, usize)> = None;
        for (i, r) in m.iter().enumerate() {
            for &j in &cols {
                let v = ring.val(r[j]);
                if v < k && best.map_or(true, |b| v < b.0) {
                    best = Some((v, i, j));
                }
            }
        }
        let Some((v, pi, pj)) = best else { break };
        out.push(v);
        let piv = m.swap_remove(pi);
        let (_, u) = ring.split_unit(piv[pj]);
        let uinv = ring.inv(u).expect("unit");
        let piv: Vec<_> = piv.iter().map(|&x| ring.mul(x, uinv)).collect();
        for r in m.iter_mut() {
            if r[pj].is_zero() {
                continue;
            }
            let f = ring.div_p_pow(r[pj], v);
            for &j in &cols {
                r[j] = ring.sub(r[j], ring.mul(f, piv[j]));
            }
        }
        // Column operations clear the pivot row; the other rows only see the
        // pivot column, which we drop.
        cols.retain(|&j| j != pj);
    }
    out.sort_unstable();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::FieldParams;

    fn ring(p: u64, k: u32) -> ResidueRing {
        ResidueRing::new(FieldParams::new(p).unwrap(), k).unwrap()
    }

    #[test]
    fn saturation_row_appears() {
        let r = ring(3, 2);
        let e = Echelon::new(r, 2, vec![vec![r.new_elem(3, 0), r.one()]]);
        assert_eq!(e.pivots(), &[(0, 1), (1, 1)]);
        assert_eq!(e.log_size(), 4);
        assert_eq!(e.elements().len(), 81);
    }

    #[test]
    fn form_is_independent_of_generators() {
        let r = ring(3, 2);
        let a = vec![r.new_elem(1, 2), r.new_elem(3, 0), r.new_elem(0, 6)];
        let b = vec![r.new_elem(0, 0), r.new_elem(3, 3), r.new_elem(1, 0)];
        let e1 = Echelon::new(r, 3, vec![a.clone(), b.clone()]);
        let mix: Vec<_> = a.iter().zip(&b).map(|(&x, &y)| r.add(r.mul(r.t(), x), y)).collect();
        let e2 = Echelon::new(r, 3, vec![b, mix, a]);
        assert_eq!(e1, e2);
    }

    #[test]
    fn smith_divisors() {
        let r = ring(5, 3);
        let rows = vec![vec![r.new_elem(5, 0), r.new_elem(25, 0)], vec![r.zero(), r.new_elem(0, 25)]];
        assert_eq!(elementary_divisors(r, 2, &rows), vec![1, 2]);
    }
}
