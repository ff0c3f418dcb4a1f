//! Integral overlattices `L ⊆ L' ⊆ L'^∨` and related enumerations.

pub mod engine;

use std::collections::BTreeMap;

use serde::Serialize;

use crate::budget;
use crate::error::{Error, Result};
use crate::lattice::{EmbeddedLattice, Mat};
use crate::ring::{Echelon, FElem, Fq2, ResidueRing, F2};
use engine::{Engine, EngineOptions, Node};

#[derive(Clone, Debug)]
pub struct OverlatticeRecord {
    pub lattice: EmbeddedLattice,
    /// Length of `L'/L` as an `O_F`-module.
    pub length: u32,
    pub type_t: usize,
    pub cyclic: bool,
}

/// The numerical data of an overlattice without its basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Shape {
    pub length: u32,
    pub type_t: usize,
    pub cyclic: bool,
}

impl From<&Node> for Shape {
    fn from(n: &Node) -> Self {
        Shape { length: n.length, type_t: n.type_t, cyclic: n.cyclic }
    }
}

fn engine(l: &EmbeddedLattice, flat_type: bool) -> Result<Engine> {
    engine_with(l, EngineOptions { budget: budget::enumeration(), flat_type, primitive_flat: false })
}

fn engine_with(l: &EmbeddedLattice, opts: EngineOptions) -> Result<Engine> {
    if !l.is_integral() {
        return Err(Error::NotIntegral);
    }
    Engine::new(l, opts)
}

/// Raw enumeration nodes, sorted by key.
pub fn nodes(l: &EmbeddedLattice) -> Result<Vec<Node>> {
    engine(l, false)?.enumerate()
}

/// Multiset of `(length, type, cyclic)` over all integral overlattices.
pub fn shapes(l: &EmbeddedLattice) -> Result<BTreeMap<Shape, u64>> {
    let mut out = BTreeMap::new();
    for n in nodes(l)? {
        *out.entry(Shape::from(&n)).or_insert(0) += 1;
    }
    Ok(out)
}

pub fn integral_overlattices(l: &EmbeddedLattice) -> Result<Vec<OverlatticeRecord>> {
    let e = engine(l, false)?;
    Ok(e.enumerate()?
        .iter()
        .map(|n| OverlatticeRecord {
            lattice: e.materialize(n, l),
            length: n.length,
            type_t: n.type_t,
            cyclic: n.cyclic,
        })
        .collect())
}

pub fn cyclic_overlattices(l: &EmbeddedLattice) -> Result<Vec<OverlatticeRecord>> {
    Ok(integral_overlattices(l)?.into_iter().filter(|r| r.cyclic).collect())
}

/// Integral overlattices `L'` of `L` with `L' ∩ span(b_2, ..., b_n) = L ∩ span(b_2, ..., b_n)`,
/// where `b_1, ..., b_n` is the given basis of `L`.
pub(crate) fn primitive_flat_nodes(l: &EmbeddedLattice) -> Result<Vec<Node>> {
    engine_with(l, EngineOptions { budget: budget::enumeration(), flat_type: false, primitive_flat: true })?.enumerate()
}

/// Overlattices of `L♭ + <x>` together with the type of their intersection
/// with the span of `L♭`. The basis must be `x` followed by a basis of `L♭`.
pub(crate) fn flat_nodes(l: &EmbeddedLattice) -> Result<(Engine, Vec<Node>)> {
    let e = engine(l, true)?;
    let nodes = e.enumerate()?;
    Ok((e, nodes))
}

/// Number of lattices `L'` with `L ⊆ L' ⊆ Lpp`, both endpoints included.
pub fn count_intermediate(l: &EmbeddedLattice, lpp: &EmbeddedLattice) -> Result<u64> {
    if l.rank() != lpp.rank() || l.space() != lpp.space() {
        return Err(Error::AmbientMismatch);
    }
    if !lpp.contains(l) {
        return Err(Error::NotContained);
    }
    let params = l.params();
    let fq = Fq2::new(params);
    let budget = budget::enumeration();
    // Coordinates relative to Lpp, intersected with its span.
    let frame_inv = {
        let b = lpp.basis();
        let bh = b.conj_transpose();
        let g = bh.mul(b);
        g.inverse().ok_or(Error::DegenerateLattice)?.mul(&bh)
    };
    let coords = |m: &EmbeddedLattice| frame_inv.mul(m.basis());
    let cl = coords(l);
    let k = (-cl.min_val().unwrap_or(0)).max(0);
    let k = {
        // p^k Lpp ⊆ L iff p^k times the inverse coordinate matrix is integral.
        let inv = cl.inverse().ok_or(Error::DegenerateLattice)?;
        (-inv.min_val().unwrap_or(0)).max(k).max(0) as u32
    };
    if k == 0 {
        return Ok(1);
    }
    let ring = ResidueRing::new(params, k)?;
    let r = l.rank();
    let to_rows = |m: &Mat| -> Result<Vec<Vec<_>>> {
        (0..m.ncols()).map(|j| m.column(j).iter().map(|x| ring.reduce(x)).collect()).collect()
    };
    let start = Echelon::new(ring, r, to_rows(&cl)?);
    let mut seen = std::collections::HashSet::new();
    seen.insert(start.key());
    let mut level = vec![start];
    let mut count = 1u64;
    let mut spent = 0u64;
    while !level.is_empty() {
        let mut next = Vec::new();
        for s in &level {
            // Socle of (O/p^k)^r / S: vectors y with p y in S, modulo S.
            let mut socle_gens = Vec::new();
            let mut cur = s.clone();
            for y in socle_generators(&ring, s, r) {
                if !cur.contains(&y) {
                    let mut rows = cur.rows().to_vec();
                    rows.push(y.clone());
                    cur = Echelon::new(ring, r, rows);
                    socle_gens.push(y);
                }
            }
            for line in projective_points(&fq, socle_gens.len()) {
                spent += 1;
                if spent > budget {
                    return Err(Error::BudgetExceeded { what: "intermediate lattices", limit: budget });
                }
                let mut y = vec![ring.zero(); r];
                for (c, g) in line.iter().zip(&socle_gens) {
                    let c = ring.new_elem(c.0 as u128, c.1 as u128);
                    for j in 0..r {
                        y[j] = ring.add(y[j], ring.mul(c, g[j]));
                    }
                }
                let mut rows = s.rows().to_vec();
                rows.push(y);
                let e = Echelon::new(ring, r, rows);
                if seen.insert(e.key()) {
                    count += 1;
                    next.push(e);
                }
            }
        }
        level = next;
    }
    Ok(count)
}

/// Generators of `{y : p y ∈ S}` modulo `S`, for a submodule `S` of `(O/p^k)^r`.
///
/// With `N` the preimage of `S` in `O^r`, an element `sum c_j R_j` of `N` is
/// divisible by `p` exactly when the residues of the `c_j` lie in the kernel
/// of the rows modulo `p`.
fn socle_generators(ring: &ResidueRing, s: &Echelon, r: usize) -> Vec<Vec<crate::ring::ResidueElem>> {
    let k = ring.k();
    let fine = ResidueRing::new(ring.params(), k + 1).expect("precision");
    let p = ring.p();
    let fq = Fq2::new(ring.params());
    let mut gens: Vec<Vec<_>> =
        s.rows().iter().map(|row| row.iter().map(|e| fine.new_elem(e.a, e.b)).collect()).collect();
    for i in 0..r {
        let mut e = vec![fine.zero(); r];
        e[i] = fine.p_pow(k);
        gens.push(e);
    }
    let transposed: Vec<Vec<F2>> = (0..r)
        .map(|i| gens.iter().map(|g| ((g[i].a % p) as u64, (g[i].b % p) as u64)).collect())
        .collect();
    engine::kernel_of(&fq, transposed)
        .into_iter()
        .map(|c| {
            let mut z = vec![fine.zero(); r];
            for (cj, g) in c.iter().zip(&gens) {
                let cj = fine.new_elem(cj.0 as u128, cj.1 as u128);
                for i in 0..r {
                    z[i] = fine.add(z[i], fine.mul(cj, g[i]));
                }
            }
            z.iter()
                .map(|e| {
                    debug_assert!(e.a % p == 0 && e.b % p == 0);
                    ring.new_elem(e.a / p, e.b / p)
                })
                .collect()
        })
        .collect()
}

/// Representatives of the lines of `F_{q^2}^d` (first nonzero coordinate 1).
pub(crate) fn projective_points(fq: &Fq2, d: usize) -> Vec<Vec<F2>> {
    let elems: Vec<F2> = fq.elements().collect();
    let mut out = Vec::new();
    for lead in 0..d {
        let tail = d - lead - 1;
        let total = elems.len().pow(tail as u32);
        for mut code in 0..total {
            let mut v = vec![(0u64, 0u64); d];
            v[lead] = (1, 0);
            for slot in v.iter_mut().skip(lead + 1) {
                *slot = elems[code % elems.len()];
                code /= elems.len();
            }
            out.push(v);
        }
    }
    out
}

/// All vertex lattices of type `t` in the ambient space of `lflat` that contain it.
///
/// A vertex lattice `Λ ⊇ L♭` meets the line orthogonal to `L♭` in `O_F w`
/// for some `w` of norm valuation `v`, and then `Λ` is an integral overlattice
/// of `L♭ ⊕ <w>`. From `p Λ^∨ ⊆ Λ` the cyclic quotient `π(Λ)/O_F w` has
/// length at least `v - 1`, so `t = val(Λ) <= val(L♭) + 2 - v`.
pub fn vertex_overlattices(lflat: &EmbeddedLattice, t: usize) -> Result<Vec<EmbeddedLattice>> {
    let hi = lflat.val() + 2 - t as i64;
    vertex_overlattices_window(lflat, t, hi)
}

/// Same as [`vertex_overlattices`] with an explicit upper end of the window.
pub fn vertex_overlattices_window(lflat: &EmbeddedLattice, t: usize, hi: i64) -> Result<Vec<EmbeddedLattice>> {
    if !lflat.is_integral() {
        return Err(Error::NotIntegral);
    }
    let n = lflat.ambient_dim();
    if lflat.rank() + 1 != n {
        return Err(Error::PreconditionViolated("flat lattice must have corank one".into()));
    }
    let params = lflat.params();
    let perp = lflat.orthogonal_complement();
    let u0: Vec<FElem> = perp.column(0);
    let c = crate::ring::val_rat(&lflat.space().norm(&u0), params.p()).ok_or(Error::DegenerateSubspace)?;
    let lo = if t == n { 1 } else { 0 };
    let mut found: BTreeMap<String, EmbeddedLattice> = BTreeMap::new();
    for v in lo..=hi {
        if (v - c).rem_euclid(2) != 0 {
            continue;
        }
        let w: Vec<FElem> = u0.iter().map(|x| x.scale(&params.p_pow_rat((v - c) / 2))).collect();
        let basis = lflat.basis().hstack(&Mat::from_columns(params, n, &[w]));
        let l = lflat.with_basis(basis)?;
        let e = engine(&l, false)?;
        for node in e.enumerate()? {
            if node.type_t != t || l.val() - 2 * node.length as i64 != t as i64 {
                continue;
            }
            let m = e.materialize(&node, &l);
            found.entry(format!("{:?}", m.basis())).or_insert(m);
        }
    }
    Ok(found.into_values().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::FieldParams;

    #[test]
    fn rank_one_examples() {
        let k = FieldParams::new(3).unwrap();
        assert_eq!(integral_overlattices(&EmbeddedLattice::diagonal(k, &[0])).unwrap().len(), 1);
        assert_eq!(integral_overlattices(&EmbeddedLattice::diagonal(k, &[1])).unwrap().len(), 1);
        let recs = integral_overlattices(&EmbeddedLattice::diagonal(k, &[2])).unwrap();
        let mut shapes: Vec<_> = recs.iter().map(|r| (r.length, r.type_t)).collect();
        shapes.sort();
        assert_eq!(shapes, vec![(0, 1), (1, 0)]);
    }

    #[test]
    fn q_plus_one_self_dual_overlattices() {
        for p in [3, 5] {
            let k = FieldParams::new(p).unwrap();
            let l = EmbeddedLattice::diagonal(k, &[1, 1]);
            let cyc = cyclic_overlattices(&l).unwrap();
            assert_eq!(cyc.len() as u64, p + 2);
            assert_eq!(cyc.iter().filter(|r| r.type_t == 0).count() as u64, p + 1);
        }
    }

    #[test]
    fn intermediate_counts() {
        let k = FieldParams::new(3).unwrap();
        let l = EmbeddedLattice::diagonal(k, &[2, 2]);
        assert_eq!(count_intermediate(&l, &l).unwrap(), 1);
        let b = Mat::diagonal(k, &[k.p_pow(-1), k.one()]);
        let lpp = l.transform(&b).unwrap();
        assert_eq!(count_intermediate(&l, &lpp).unwrap(), 2);
        let lpp = l.transform(&Mat::diagonal(k, &[k.p_pow(-1), k.p_pow(-1)])).unwrap();
        // Subspaces of F_9^2: zero, whole, and q^2 + 1 lines.
        assert_eq!(count_intermediate(&l, &lpp).unwrap(), 9 + 3);
    }

    #[test]
    fn projective_point_count() {
        let fq = Fq2::new(FieldParams::new(3).unwrap());
        assert_eq!(projective_points(&fq, 2).len(), 10);
        assert_eq!(projective_points(&fq, 0).len(), 0);
    }
}
