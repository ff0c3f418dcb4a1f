//! The functions `∂Den_{L♭}(x)` on the ambient space, their horizontal and
//! vertical parts, and the identities relating them to densities of `L♭`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::density::{den_value, derived_den, weight_m_der};
use crate::error::{Error, Result};
use crate::lattice::{EmbeddedLattice, Mat};
use crate::overlat::{self, cyclic_overlattices, integral_overlattices};
use crate::ring::{rat_pow, val_rat, FElem, Rational, ResidueRing};

/// A rank `n-1` lattice `L♭` with nondegenerate span and a vector `x` off that span.
#[derive(Clone, Debug)]
pub struct FlatPair {
    lflat: EmbeddedLattice,
    x: Vec<FElem>,
}

impl FlatPair {
    pub fn new(lflat: EmbeddedLattice, x: Vec<FElem>) -> Result<Self> {
        check_flat(&lflat)?;
        if x.len() != lflat.ambient_dim() {
            return Err(Error::AmbientMismatch);
        }
        let fp = FlatPair { lflat, x };
        if fp.joined_basis().rank() != fp.lflat.ambient_dim() {
            return Err(Error::PreconditionViolated("x lies in the span of the flat lattice".into()));
        }
        Ok(fp)
    }

    pub fn lflat(&self) -> &EmbeddedLattice {
        &self.lflat
    }

    pub fn x(&self) -> &[FElem] {
        &self.x
    }

    pub fn with_x(&self, x: Vec<FElem>) -> Result<Self> {
        FlatPair::new(self.lflat.clone(), x)
    }

    fn joined_basis(&self) -> Mat {
        joined(&self.x, &self.lflat)
    }

    /// `L♭ + <x>`, with `x` as the first basis vector.
    pub fn lattice(&self) -> EmbeddedLattice {
        self.lflat.with_basis(self.joined_basis()).expect("x is off the flat span")
    }

    /// Whether `x ⊥ L♭`.
    pub fn is_perpendicular(&self) -> bool {
        let space = self.lflat.space();
        self.lflat.basis().columns().iter().all(|b| space.pairing(b, &self.x).is_zero())
    }

    /// `val((x, x))`, `None` for isotropic `x`.
    pub fn x_val(&self) -> Option<i64> {
        val_rat(&self.lflat.space().norm(&self.x), self.lflat.params().p())
    }
}

fn joined(x: &[FElem], l: &EmbeddedLattice) -> Mat {
    let mut cols = vec![x.to_vec()];
    cols.extend(l.basis().columns());
    Mat::from_columns(l.params(), l.ambient_dim(), &cols)
}

fn check_flat(lflat: &EmbeddedLattice) -> Result<()> {
    if lflat.rank() + 1 != lflat.ambient_dim() {
        return Err(Error::InvalidParams(format!(
            "flat lattice has rank {} in a space of dimension {}",
            lflat.rank(),
            lflat.ambient_dim()
        )));
    }
    if lflat.rank() == 0 || lflat.gram().det().is_zero() {
        return Err(Error::DegenerateSubspace);
    }
    Ok(())
}

/// `M(L♭) = L♭ ⊥ <u>` where `u ⊥ L♭` has valuation `e_max` or `e_max + 1`.
#[derive(Clone, Debug)]
pub struct FlatAux {
    pub e_max: i64,
    pub m_of_flat: EmbeddedLattice,
    pub u: Vec<FElem>,
    pub u_val: i64,
}

pub fn flat_aux(lflat: &EmbeddedLattice) -> Result<FlatAux> {
    check_flat(lflat)?;
    if !lflat.is_integral() {
        return Err(Error::NotIntegral);
    }
    let params = lflat.params();
    let space = lflat.space();
    let e_max = lflat.invariants().e_max().unwrap_or(0);
    let u0 = lflat.orthogonal_complement().column(0);
    let v0 = val_rat(&space.norm(&u0), params.p()).ok_or(Error::DegenerateSubspace)?;
    let u_val = if (v0 - e_max).rem_euclid(2) == 0 { e_max } else { e_max + 1 };
    let s = params.p_pow((u_val - v0) / 2);
    let u: Vec<FElem> = u0.iter().map(|c| c * &s).collect();
    let mut cols = lflat.basis().columns();
    cols.push(u.clone());
    let m_of_flat = lflat.with_basis(Mat::from_columns(params, lflat.ambient_dim(), &cols))?;
    Ok(FlatAux { e_max, m_of_flat, u, u_val })
}

/// Everything about `L♭` needed to evaluate the three functions at many
/// points: the integral overlattices of type at most one, `M(L♭)`, and a
/// cache of derived densities keyed by invariants.
pub struct FlatContext {
    lflat: EmbeddedLattice,
    aux: FlatAux,
    horizontal_flats: Vec<EmbeddedLattice>,
    cache: Mutex<HashMap<Vec<i64>, Rational>>,
}

impl FlatContext {
    pub fn new(lflat: &EmbeddedLattice) -> Result<Self> {
        let aux = flat_aux(lflat)?;
        let horizontal_flats = integral_overlattices(lflat)?
            .into_iter()
            .filter(|r| r.type_t <= 1)
            .map(|r| r.lattice)
            .collect();
        Ok(FlatContext { lflat: lflat.clone(), aux, horizontal_flats, cache: Mutex::new(HashMap::new()) })
    }

    pub fn lflat(&self) -> &EmbeddedLattice {
        &self.lflat
    }

    pub fn aux(&self) -> &FlatAux {
        &self.aux
    }

    /// The integral overlattices `M♭ ⊇ L♭` with `t(M♭) ≤ 1`.
    pub fn horizontal_flats(&self) -> &[EmbeddedLattice] {
        &self.horizontal_flats
    }

    pub fn pair(&self, x: &[FElem]) -> Result<FlatPair> {
        FlatPair::new(self.lflat.clone(), x.to_vec())
    }

    /// `x ∈ N(L♭)`, i.e. `L♭ + <x>` is integral.
    pub fn in_support(&self, x: &[FElem]) -> Result<bool> {
        Ok(self.pair(x)?.lattice().is_integral())
    }

    fn cached_derived(&self, l: &EmbeddedLattice) -> Result<Rational> {
        let key = l.invariants().seq;
        if let Some(v) = self.cache.lock().unwrap().get(&key) {
            return Ok(v.clone());
        }
        // The derived density depends only on the invariants.
        let v = derived_den(&EmbeddedLattice::diagonal(l.params(), &key))?;
        self.cache.lock().unwrap().insert(key, v.clone());
        Ok(v)
    }

    /// `∂Den(L♭ + <x>)`, zero when the lattice is not integral.
    pub fn pden(&self, x: &[FElem]) -> Result<Rational> {
        let l = self.pair(x)?.lattice();
        if !l.is_integral() {
            return Ok(Rational::zero());
        }
        self.cached_derived(&l)
    }

    /// Sum of `m(t(L'))` over integral `L' ∋ x` containing `L♭` with
    /// `t(L' ∩ L♭_F) ≤ 1`, grouped by the flat part `M♭ = L' ∩ L♭_F`.
    pub fn horizontal(&self, x: &[FElem]) -> Result<Rational> {
        let l = self.pair(x)?.lattice();
        if !l.is_integral() {
            return Ok(Rational::zero());
        }
        if l.val().rem_euclid(2) == 0 {
            return Err(Error::EvenValuation);
        }
        let q = self.lflat.params().q();
        let mut total = Rational::zero();
        for mflat in &self.horizontal_flats {
            let base = mflat.with_basis(joined(x, mflat))?;
            if !base.is_integral() {
                continue;
            }
            for node in overlat::primitive_flat_nodes(&base)? {
                total += weight_m_der(q, node.type_t);
            }
        }
        Ok(total)
    }

    pub fn vertical(&self, x: &[FElem]) -> Result<Rational> {
        let full = self.pden(x)?;
        if full.is_zero() && !self.in_support(x)? {
            return Ok(Rational::zero());
        }
        Ok(full - self.horizontal(x)?)
    }

    /// `(pden, horizontal, vertical)` at `x`.
    pub fn eval(&self, x: &[FElem]) -> Result<(Rational, Rational, Rational)> {
        let full = self.pden(x)?;
        let h = self.horizontal(x)?;
        let v = &full - &h;
        Ok((full, h, v))
    }
}

pub fn pden_x(fp: &FlatPair) -> Result<Rational> {
    let l = fp.lattice();
    if !l.is_integral() {
        return Ok(Rational::zero());
    }
    derived_den(&l)
}

pub fn pden_horizontal(fp: &FlatPair) -> Result<Rational> {
    if !fp.lattice().is_integral() {
        return Ok(Rational::zero());
    }
    FlatContext::new(fp.lflat())?.horizontal(fp.x())
}

pub fn pden_vertical(fp: &FlatPair) -> Result<Rational> {
    if !fp.lattice().is_integral() {
        return Ok(Rational::zero());
    }
    Ok(pden_x(fp)? - pden_horizontal(fp)?)
}

/// The horizontal part straight from the definition: one enumeration of the
/// overlattices of `L♭ + <x>`, filtered by the type of their flat part.
pub fn pden_horizontal_direct(fp: &FlatPair) -> Result<Rational> {
    let l = fp.lattice();
    if !l.is_integral() {
        return Ok(Rational::zero());
    }
    if l.val().rem_euclid(2) == 0 {
        return Err(Error::EvenValuation);
    }
    let q = l.params().q();
    let (_, nodes) = overlat::flat_nodes(&l)?;
    Ok(nodes
        .iter()
        .filter(|n| n.flat_type.expect("flat type requested") <= 1)
        .map(|n| weight_m_der(q, n.type_t))
        .sum())
}

pub fn in_support_n(fp: &FlatPair) -> bool {
    fp.lattice().is_integral()
}

fn require_perpendicular(fp: &FlatPair) -> Result<i64> {
    if !fp.is_perpendicular() {
        return Err(Error::PreconditionViolated("x is not orthogonal to the flat lattice".into()));
    }
    fp.x_val().ok_or_else(|| Error::PreconditionViolated("x is isotropic".into()))
}

fn x_over_p(x: &[FElem]) -> Vec<FElem> {
    let pinv = x[0].params().p_pow(-1);
    x.iter().map(|c| c * &pinv).collect()
}

/// For `x ⊥ L♭` with `val(x) > e_max(L♭)`, checks
/// `∂Den(x) - ∂Den(x/p) = Den(-q, L♭)` and
/// `∂Den_H(x) - ∂Den_H(x/p) = vol(L♭)^{-1} Den(-1/q, L♭)`.
pub fn diff_identity_check(fp: &FlatPair) -> Result<(bool, bool)> {
    let vx = require_perpendicular(fp)?;
    let lflat = fp.lflat();
    if !lflat.is_integral() {
        return Err(Error::NotIntegral);
    }
    let e = lflat.invariants().e_max().unwrap_or(0);
    if vx < e + 1 {
        return Err(Error::PreconditionViolated(format!("val(x) = {vx} is below {}", e + 1)));
    }
    let ctx = FlatContext::new(lflat)?;
    let y = x_over_p(fp.x());
    let q = lflat.params().q();
    let qq = Rational::from_integer(BigInt::from(q));
    let full = ctx.pden(fp.x())? - ctx.pden(&y)?;
    let hor = ctx.horizontal(fp.x())? - ctx.horizontal(&y)?;
    let want_full = den_value(lflat, &-qq.clone())?;
    let want_hor = den_value(lflat, &-qq.recip())? * rat_pow(q, lflat.val());
    Ok((full == want_full, hor == want_hor))
}

/// Fourier transforms at `x ⊥ L♭` with `val(x) < 0` of `∂Den_{L♭}` and of
/// its horizontal part, each reduced to a finite sum over overlattices of
/// `L♭`. Returns `(hat_full, hat_horizontal)`; their equality is the
/// vanishing of the transform of the vertical part there.
pub fn fourier_pden_perp(fp: &FlatPair) -> Result<(Rational, Rational)> {
    let vx = require_perpendicular(fp)?;
    if vx >= 0 {
        return Err(Error::PreconditionViolated(format!("val(x) = {vx} is not negative")));
    }
    let lflat = fp.lflat();
    if !lflat.is_integral() {
        return Err(Error::NotIntegral);
    }
    let q = lflat.params().q();
    let minus_q = -Rational::from_integer(BigInt::from(q));
    let qm2 = rat_pow(q, -2);
    let one = Rational::one();
    // (1 - q^-2)^-1 vol(<x>^∨), and vol(<x>^∨) = q^{val(x)}.
    let pref = (&one - &qm2).recip() * rat_pow(q, vx);

    let mut full = &qm2 * lflat.vol() * den_value(lflat, &minus_q)?;
    let mut cyc = Rational::zero();
    for r in cyclic_overlattices(lflat)? {
        cyc += r.lattice.vol() * den_value(&r.lattice, &minus_q)?;
    }
    full += (&one - &qm2) * cyc;

    let w1 = &one + rat_pow(q, -1);
    let mut hor = Rational::zero();
    for r in integral_overlattices(lflat)? {
        match r.type_t {
            0 => hor += &one,
            1 => hor += &w1,
            _ => {}
        }
    }
    Ok((&pref * full, pref * hor))
}

/// Sum of the `n-1` smallest invariants of `L♭ + <x>` compared with `val(L♭)`
/// decides membership of `x` in `M(L♭)`. Checks that on the given points.
pub fn support_bound_check(lflat: &EmbeddedLattice, points: &[Vec<FElem>]) -> Result<bool> {
    let aux = flat_aux(lflat)?;
    let vflat = lflat.val();
    for x in points {
        let fp = FlatPair::new(lflat.clone(), x.clone())?;
        let inv = fp.lattice().fundamental_invariants()?.seq;
        let head: i64 = inv[..inv.len() - 1].iter().sum();
        if (head >= vflat) != aux.m_of_flat.contains_vector(x) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Coordinates for the finite grids: an orthogonal basis `f_i` of `M(L♭)`,
/// the last one spanning the perpendicular line, and the dual vectors
/// `f_i / (f_i, f_i)`.
#[derive(Clone, Debug)]
pub struct GridFrame {
    dual: Vec<Vec<FElem>>,
    /// `(d_i, d_i)` for the dual vectors `d_i`.
    dual_norms: Vec<Rational>,
    /// Invariant of each `f_i`.
    exps: Vec<u32>,
}

/// A grid point and whether `L♭ + <x>` is integral there.
#[derive(Clone, Debug)]
pub struct GridPoint {
    pub x: Vec<FElem>,
    pub in_support: bool,
}

impl GridFrame {
    pub fn new(aux: &FlatAux) -> Result<Self> {
        let m = &aux.m_of_flat;
        let n = m.rank();
        let lflat_part = m.with_basis(m.basis().select_columns(&(0..n - 1).collect::<Vec<_>>()))?;
        let d = lflat_part.diagonalize()?;
        let p = m.params();
        let mut dual = Vec::with_capacity(n);
        let mut dual_norms = Vec::with_capacity(n);
        let mut exps = Vec::with_capacity(n);
        let orth = lflat_part.basis().mul(&d.transform);
        for (i, nrm) in d.norms.iter().enumerate() {
            let s = p.rat(nrm.recip());
            dual.push(orth.column(i).iter().map(|c| c * &s).collect());
            dual_norms.push(nrm.recip());
            exps.push(val_rat(nrm, p.p()).expect("nondegenerate") as u32);
        }
        let nu = m.space().norm(&aux.u);
        let s = p.rat(nu.recip());
        dual.push(aux.u.iter().map(|c| c * &s).collect());
        dual_norms.push(nu.recip());
        exps.push(aux.u_val as u32);
        Ok(GridFrame { dual, dual_norms, exps })
    }

    pub fn invariants(&self) -> &[u32] {
        &self.exps
    }

    /// `sum c_i f_i / (f_i, f_i)`.
    pub fn point(&self, coeffs: &[FElem]) -> Vec<FElem> {
        let dim = self.dual[0].len();
        let p = coeffs[0].params();
        let mut out = vec![p.zero(); dim];
        for (c, v) in coeffs.iter().zip(&self.dual) {
            if c.is_zero() {
                continue;
            }
            for (o, x) in out.iter_mut().zip(v) {
                *o += &(c * x);
            }
        }
        out
    }

    /// Representatives of `M^∨ / p^2 M`: coefficient `i` runs over
    /// `O_F / p^{a_i + 2}`. The zero class of the perpendicular coefficient is
    /// represented by `p^{a+2}` so that every point lies off the flat span.
    pub fn coset_grid(&self, limit: u64) -> Result<Vec<GridPoint>> {
        let mods: Vec<u32> = self.exps.iter().map(|&a| a + 2).collect();
        let q = self.dual[0][0].params().q() as u128;
        let full = mods.iter().try_fold(1u128, |acc, &m| acc.checked_mul(q.checked_pow(2 * m)?));
        if !matches!(full, Some(t) if t <= limit as u128) {
            return Err(Error::BudgetExceeded { what: "evaluation grid", limit });
        }
        self.product(&mods, limit, |ring| ring.elements().map(|e| ring.lift(e)).collect())
    }

    /// Representatives of `M^∨ / (L♭ + p^2 <u>)` up to multiplying each
    /// coordinate by a norm-one unit. Both `L♭`-translation and these
    /// diagonal unitary automorphisms fix `L♭` and preserve all three functions.
    pub fn orbit_grid(&self, limit: u64) -> Result<Vec<GridPoint>> {
        let n = self.exps.len();
        let mods: Vec<u32> = (0..n).map(|i| if i + 1 == n { self.exps[i] + 2 } else { self.exps[i] }).collect();
        self.product(&mods, limit, |ring| unit_orbit_reps(ring))
    }

    fn product(
        &self,
        mods: &[u32],
        limit: u64,
        reps: impl Fn(&ResidueRing) -> Vec<FElem>,
    ) -> Result<Vec<GridPoint>> {
        let p = self.dual[0][0].params();
        let n = mods.len();
        let mut coords: Vec<Vec<FElem>> = Vec::with_capacity(n);
        for (i, &m) in mods.iter().enumerate() {
            let mut r = if m == 0 { vec![p.zero()] } else { reps(&ResidueRing::new(p, m)?) };
            if i + 1 == n {
                for c in r.iter_mut().filter(|c| c.is_zero()) {
                    *c = p.p_pow(m as i64);
                }
            }
            coords.push(r);
        }
        // With integral coefficients the pairings with L♭ are integral, so
        // only the norm decides integrality of L♭ + <x>.
        let norms: Vec<Vec<Rational>> = coords
            .iter()
            .zip(&self.dual_norms)
            .map(|(r, dn)| r.iter().map(|c| c.norm() * dn).collect())
            .collect();
        let pp = p.p();
        let total = coords.iter().try_fold(1u128, |acc, r| acc.checked_mul(r.len() as u128));
        match total {
            Some(t) if t <= limit as u128 => {}
            _ => return Err(Error::BudgetExceeded { what: "evaluation grid", limit }),
        }
        let mut out = Vec::new();
        let mut idx = vec![0usize; n];
        loop {
            let c: Vec<FElem> = idx.iter().zip(&coords).map(|(&i, r)| r[i].clone()).collect();
            let nx: Rational = idx.iter().zip(&norms).map(|(&i, r)| &r[i]).sum();
            let in_support = val_rat(&nx, pp).map_or(true, |v| v >= 0);
            out.push(GridPoint { x: self.point(&c), in_support });
            let mut k = 0;
            while k < n {
                idx[k] += 1;
                if idx[k] < coords[k].len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if k == n {
                break;
            }
        }
        Ok(out)
    }
}

/// Representatives of `O_F / p^m` modulo multiplication by norm-one units:
/// zero, and `p^j r` with `r` running over one unit per norm class mod `p^(m-j)`.
pub fn unit_orbit_reps(ring: &ResidueRing) -> Vec<FElem> {
    let p = ring.params();
    let m = ring.k();
    let mut out = vec![p.zero()];
    for j in 0..m {
        let sub = ResidueRing::new(p, m - j).expect("smaller ring");
        for r in norm_class_reps(&sub) {
            out.push(&sub.lift(r) * &p.p_pow(j as i64));
        }
    }
    out
}

fn norm_class_reps(ring: &ResidueRing) -> Vec<crate::ring::ResidueElem> {
    let modulus = ring.modulus();
    let p = ring.p();
    let want = (modulus - modulus / p) as usize;
    let mut seen: HashMap<u128, crate::ring::ResidueElem> = HashMap::new();
    for e in ring.elements() {
        if !ring.is_unit(e) {
            continue;
        }
        seen.entry(ring.norm(e)).or_insert(e);
        if seen.len() == want {
            break;
        }
    }
    let mut v: Vec<_> = seen.into_iter().collect();
    v.sort_by_key(|(k, _)| *k);
    v.into_iter().map(|(_, e)| e).collect()
}

/// Shared handle used by grid checks.
pub type SharedContext = Arc<FlatContext>;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::SpaceKind;
    use crate::ring::FieldParams;

    fn p3() -> FieldParams {
        FieldParams::new(3).unwrap()
    }

    fn int(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    /// `L♭` spanned by the first `n-1` standard vectors of `diag(p^a_1, ..., p^a_n)`.
    fn split_flat(inv: &[i64]) -> (EmbeddedLattice, Vec<FElem>) {
        let p = p3();
        let full = EmbeddedLattice::diagonal(p, inv);
        let n = inv.len();
        let flat = full.with_basis(full.basis().select_columns(&(0..n - 1).collect::<Vec<_>>())).unwrap();
        (flat, full.basis().column(n - 1))
    }

    #[test]
    fn unit_flat_with_uniformizer() {
        let (flat, x) = split_flat(&[0, 1]);
        let fp = FlatPair::new(flat, x).unwrap();
        assert_eq!(pden_x(&fp).unwrap(), int(1));
        assert_eq!(pden_horizontal(&fp).unwrap(), int(1));
        assert_eq!(pden_vertical(&fp).unwrap(), int(0));
    }

    #[test]
    fn flat_cancellation() {
        let (flat, x) = split_flat(&[0, 3]);
        let fp = FlatPair::new(flat, x).unwrap();
        assert_eq!(pden_x(&fp).unwrap(), int(2));
        let y = x_over_p(fp.x());
        assert_eq!(pden_x(&fp.with_x(y.clone()).unwrap()).unwrap(), int(1));
        let z = x_over_p(&y);
        assert_eq!(pden_x(&fp.with_x(z).unwrap()).unwrap(), int(0));
    }

    #[test]
    fn horizontal_paths_agree() {
        for inv in [[1, 1, 1], [1, 1, 3], [0, 2, 1], [1, 3, 1]] {
            let (flat, x) = split_flat(&inv);
            let ctx = FlatContext::new(&flat).unwrap();
            let g = GridFrame::new(ctx.aux()).unwrap();
            for pt in g.orbit_grid(1 << 20).unwrap().iter().take(60) {
                let fp = ctx.pair(&pt.x).unwrap();
                assert_eq!(in_support_n(&fp), pt.in_support);
                if !pt.in_support {
                    continue;
                }
                assert_eq!(ctx.horizontal(&pt.x).unwrap(), pden_horizontal_direct(&fp).unwrap(), "{inv:?}");
            }
            let _ = x;
        }
    }

    #[test]
    fn vertical_at_minuscule() {
        let p = p3();
        let l = EmbeddedLattice::in_standard_space(p, SpaceKind::Nonsplit, &[1, 1, 1]).unwrap();
        let flat = l.with_basis(l.basis().select_columns(&[0, 1])).unwrap();
        let x = l.basis().column(2);
        let fp = FlatPair::new(flat, x).unwrap();
        assert_eq!(pden_vertical(&fp).unwrap(), int(1 - 9));
    }

    #[test]
    fn differences() {
        for inv in [&[0, 1][..], &[0, 3], &[1, 2], &[1, 4], &[0, 2, 3]] {
            let (flat, x) = split_flat(inv);
            let fp = FlatPair::new(flat, x).unwrap();
            assert_eq!(diff_identity_check(&fp).unwrap(), (true, true), "{inv:?}");
        }
    }

    #[test]
    fn vanishing_at_negative_valuation() {
        for inv in [[0, -2], [1, -1], [2, -1], [1, -3]] {
            let (flat, x) = split_flat(&inv);
            let fp = FlatPair::new(flat, x).unwrap();
            let (a, b) = fourier_pden_perp(&fp).unwrap();
            assert_eq!(a, b, "{inv:?}");
        }
    }

    #[test]
    fn orbit_reps_count() {
        let p = p3();
        for m in 1..4 {
            let ring = ResidueRing::new(p, m).unwrap();
            assert_eq!(unit_orbit_reps(&ring).len() as u64, 3u64.pow(m));
        }
    }
}
