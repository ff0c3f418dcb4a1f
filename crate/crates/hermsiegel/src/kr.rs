//! Intersection numbers through the density identities that compute them,
//! and the `n = 3` decomposition of the vertical part into Deligne–Lusztig
//! curve contributions.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::decomp::{FlatContext, GridFrame, GridPoint};
use crate::density::{den_central, den_poly, den_value, derived_den, derived_den_lambda};
use crate::error::{Error, Result};
use crate::lattice::{EmbeddedLattice, SpaceKind};
use crate::overlat::{count_intermediate, integral_overlattices, vertex_overlattices};
use crate::ring::{rat_pow, rat_to_string, FElem, FieldParams, Rational};
use crate::schwartz::{int_v_lambda, CosetEvaluator, LatticeFunction};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IntKind {
    /// `Int(L) = ∂Den(L)` on the self-dual level.
    Main,
    /// `Int(L) = ∂Den_Λ(L) / (q + 1)` on the almost self-dual level.
    Main2,
    /// `Int'(L) = (∂Den_Λ(L) - Den(L)) / (q + 1)`.
    Main2Prime,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntResult {
    pub value: Rational,
    pub kind: IntKind,
    pub invariants: Vec<i64>,
    pub q: u64,
}

impl IntResult {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "value": rat_to_string(&self.value),
            "kind": self.kind,
            "invariants": self.invariants,
            "q": self.q,
        })
    }
}

fn q_plus_one(l: &EmbeddedLattice) -> Rational {
    Rational::from_integer(BigInt::from(l.params().q() + 1))
}

fn check_full(l: &EmbeddedLattice) -> Result<()> {
    if !l.is_full_rank() {
        return Err(Error::AmbientMismatch);
    }
    if !l.is_integral() {
        return Err(Error::NotIntegral);
    }
    Ok(())
}

fn result(l: &EmbeddedLattice, kind: IntKind, value: Rational) -> IntResult {
    IntResult { value, kind, invariants: l.invariants().seq, q: l.params().q() }
}

pub fn int_selfdual(l: &EmbeddedLattice) -> Result<IntResult> {
    check_full(l)?;
    if l.space().kind() != SpaceKind::Nonsplit {
        return Err(Error::WrongAmbientParity);
    }
    Ok(result(l, IntKind::Main, derived_den(l)?))
}

fn check_almost(l: &EmbeddedLattice) -> Result<()> {
    check_full(l)?;
    if l.val().rem_euclid(2) != 0 {
        return Err(Error::WrongParity);
    }
    Ok(())
}

pub fn int_almost_selfdual(l: &EmbeddedLattice) -> Result<IntResult> {
    check_almost(l)?;
    Ok(result(l, IntKind::Main2, derived_den_lambda(l)? / q_plus_one(l)))
}

pub fn int_prime(l: &EmbeddedLattice) -> Result<IntResult> {
    check_almost(l)?;
    let v = (derived_den_lambda(l)? - den_central(l)?) / q_plus_one(l);
    Ok(result(l, IntKind::Main2Prime, v))
}

fn check_flat3(lflat: &EmbeddedLattice) -> Result<()> {
    if lflat.ambient_dim() != 3 || lflat.rank() != 2 || lflat.space().kind() != SpaceKind::Nonsplit {
        return Err(Error::PreconditionViolated("needs a rank 2 lattice in the nonsplit space of dimension 3".into()));
    }
    if !lflat.is_integral() {
        return Err(Error::NotIntegral);
    }
    Ok(())
}

/// A lattice with the given invariants spanned by orthogonal vectors of
/// the standard nonsplit space of one dimension more.
pub fn standard_flat(params: FieldParams, inv: &[i64]) -> Result<EmbeddedLattice> {
    let val: i64 = inv.iter().sum();
    let mut full_inv = inv.to_vec();
    full_inv.push(if val.rem_euclid(2) == 0 { 1 } else { 0 });
    let full = EmbeddedLattice::in_standard_space(params, SpaceKind::Nonsplit, &full_inv)?;
    let g = full.gram();
    let mut free: Vec<usize> = (0..full.rank()).collect();
    let mut cols = Vec::with_capacity(inv.len());
    for &a in inv {
        let pos = free
            .iter()
            .position(|&j| g[(j, j)].val() == Some(a))
            .ok_or_else(|| Error::Inconsistent("orthogonal basis misses an invariant".into()))?;
        cols.push(free.remove(pos));
    }
    full.with_basis(full.basis().select_columns(&cols))
}

/// Type 3 vertex lattices containing `L♭`.
pub fn vert3(lflat: &EmbeddedLattice) -> Result<Vec<EmbeddedLattice>> {
    check_flat3(lflat)?;
    vertex_overlattices(lflat, 3)
}

/// Number of `L'♭` with `L♭ ⊆ L'♭ ⊆ L♭_F ∩ Λ`, both ends included.
pub fn mult_vertical(lflat: &EmbeddedLattice, lambda: &EmbeddedLattice) -> Result<u64> {
    check_flat3(lflat)?;
    if !lambda.is_vertex(3) || lambda.space() != lflat.space() || !lambda.contains(lflat) {
        return Err(Error::NotInVert3);
    }
    let slice = lambda.intersect_with_subspace(lflat.basis())?;
    count_intermediate(lflat, &slice)
}

/// `sum_{Λ ∈ Vert^3(L♭)} mult(Λ) Int_{V(Λ)}` as one lattice function.
pub fn vertical_sum(lflat: &EmbeddedLattice) -> Result<LatticeFunction> {
    let mut terms = Vec::new();
    for lambda in vert3(lflat)? {
        let m = Rational::from_integer(BigInt::from(mult_vertical(lflat, &lambda)?));
        for (c, l) in int_v_lambda(&lambda)?.terms() {
            terms.push((c * &m, l.clone()));
        }
    }
    if terms.is_empty() {
        return Ok(LatticeFunction::new(vec![])?);
    }
    LatticeFunction::new(terms)
}

/// One point where the two sides differ.
#[derive(Clone, Debug)]
pub struct Mismatch {
    pub x: Vec<FElem>,
    pub vertical: Rational,
    pub cycles: Rational,
}

#[derive(Clone, Debug, Default)]
pub struct IdentityReport {
    pub points: usize,
    pub in_support: usize,
    pub mismatches: Vec<Mismatch>,
}

impl IdentityReport {
    pub fn holds(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Compares `∂Den_{L♭,V}(x)` with `sum mult(Λ) Int_{V(Λ)}(x)` at every point.
pub struct VerticalIdentity {
    ctx: FlatContext,
    rhs: Option<CosetEvaluator>,
    /// Every lattice in the cycle combination is integral, so the cycle side
    /// vanishes wherever `(x, x)` is not integral.
    rhs_integral: bool,
}

impl VerticalIdentity {
    pub fn new(lflat: &EmbeddedLattice) -> Result<Self> {
        check_flat3(lflat)?;
        let ctx = FlatContext::new(lflat)?;
        let f = vertical_sum(lflat)?;
        let rhs_integral = f.terms().iter().all(|(_, l)| l.is_integral());
        let rhs = if f.is_zero() { None } else { Some(CosetEvaluator::new(&f)?) };
        Ok(VerticalIdentity { ctx, rhs, rhs_integral })
    }

    pub fn context(&self) -> &FlatContext {
        &self.ctx
    }

    pub fn cycles(&self, x: &[FElem]) -> Rational {
        self.rhs.as_ref().map_or_else(Rational::zero, |r| r.value_of(x))
    }

    /// `(vertical, cycles)` at `x`.
    pub fn sides(&self, x: &[FElem]) -> Result<(Rational, Rational)> {
        Ok((self.ctx.vertical(x)?, self.cycles(x)))
    }

    pub fn check(&self, points: &[Vec<FElem>]) -> Result<IdentityReport> {
        let mut rep = IdentityReport::default();
        for x in points {
            let inside = self.ctx.in_support(x)?;
            self.check_point(&mut rep, x, inside)?;
        }
        Ok(rep)
    }

    /// Like [`check`](Self::check) on grid points whose support flag is
    /// already known. Off the support the vertical part is zero by
    /// definition. Grid points carry integral pairings with `L♭`, so off the
    /// support `(x, x)` is not integral and the cycle side is zero too when
    /// all its lattices are integral; otherwise it is evaluated.
    pub fn check_grid(&self, points: &[GridPoint]) -> Result<IdentityReport> {
        let mut rep = IdentityReport::default();
        for pt in points {
            self.check_point(&mut rep, &pt.x, pt.in_support)?;
        }
        Ok(rep)
    }

    fn check_point(&self, rep: &mut IdentityReport, x: &[FElem], inside: bool) -> Result<()> {
        rep.points += 1;
        let v = if inside {
            rep.in_support += 1;
            self.ctx.vertical(x)?
        } else {
            Rational::zero()
        };
        let c = if inside || !self.rhs_integral { self.cycles(x) } else { Rational::zero() };
        if v != c {
            rep.mismatches.push(Mismatch { x: x.to_vec(), vertical: v, cycles: c });
        }
        Ok(())
    }
}

pub fn vertical_identity_n3(lflat: &EmbeddedLattice, points: &[Vec<FElem>]) -> Result<bool> {
    Ok(VerticalIdentity::new(lflat)?.check(points)?.holds())
}

/// The identity on orbit representatives of `M(L♭)^∨ / (L♭ + p^2 <u>)`.
pub fn vertical_identity_on_grid(lflat: &EmbeddedLattice, limit: u64) -> Result<IdentityReport> {
    let vi = VerticalIdentity::new(lflat)?;
    let grid = GridFrame::new(vi.context().aux())?.orbit_grid(limit)?;
    vi.check_grid(&grid)
}

/// Degree of the horizontal part of the special cycle of `L♭`: each integral
/// `M♭ ⊇ L♭` contributes `1` if self-dual and `q^{val M♭} (1 + 1/q)` if of type 1.
pub fn horizontal_degree(lflat: &EmbeddedLattice) -> Result<Rational> {
    if !lflat.is_integral() {
        return Err(Error::NotIntegral);
    }
    let q = lflat.params().q();
    let w = Rational::one() + rat_pow(q, -1);
    let mut total = Rational::zero();
    for r in integral_overlattices(lflat)? {
        match r.type_t {
            0 => total += Rational::one(),
            1 => total += &w * rat_pow(q, r.lattice.val()),
            _ => {}
        }
    }
    Ok(total)
}

/// `Den(1, <1>^{n-1} ⊥ <p> ⊥ <p>) = q + 1`, both as a polynomial value and
/// as a count of self-dual overlattices, and `(q + 1) Int = ∂Den_Λ` on
/// `<1>^{n-2} ⊥ <p^a> ⊥ <p^b>` for `a + b ≤ 4` even.
pub fn eisenstein_ratio_check(params: FieldParams, n: usize) -> Result<bool> {
    if n == 0 {
        return Err(Error::InvalidParams("n must be positive".into()));
    }
    let q = params.q();
    let mut inv = vec![0i64; n - 1];
    inv.extend([1, 1]);
    let sharp = EmbeddedLattice::diagonal(params, &inv);
    let want = Rational::from_integer(BigInt::from(q + 1));
    let count = integral_overlattices(&sharp)?.iter().filter(|r| r.type_t == 0).count() as u64;
    if den_central(&sharp)? != want || count != q + 1 {
        return Ok(false);
    }
    for (a, b) in [(0, 0), (0, 2), (1, 1), (2, 2), (1, 3), (0, 4)] {
        let mut inv = vec![0i64; n.saturating_sub(2)];
        inv.extend(if n == 1 { vec![a + b] } else { vec![a, b] });
        let l = EmbeddedLattice::diagonal(params, &inv);
        if int_almost_selfdual(&l)?.value * &want != derived_den_lambda(&l)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// One line of a results table: invariants, `Den(X)`, `∂Den` and `Int`.
#[derive(Clone, Debug)]
pub struct TableRow {
    pub invariants: Vec<i64>,
    pub den: String,
    pub pden: Option<Rational>,
    pub int: Option<IntResult>,
}

/// For odd valuation the self-dual level applies; for even valuation the
/// almost self-dual one, reported through `∂Den_Λ`.
pub fn table_row(params: FieldParams, inv: &[i64]) -> Result<TableRow> {
    let l = EmbeddedLattice::diagonal(params, inv);
    let den = den_poly(&l)?.to_string();
    if !l.is_integral() {
        return Ok(TableRow { invariants: inv.to_vec(), den, pden: None, int: None });
    }
    let (pden, int) = if l.val().rem_euclid(2) == 1 {
        let d = derived_den(&l)?;
        (Some(d.clone()), Some(result(&l, IntKind::Main, d)))
    } else {
        (Some(derived_den_lambda(&l)?), Some(int_almost_selfdual(&l)?))
    };
    Ok(TableRow { invariants: inv.to_vec(), den, pden, int })
}

/// `Den(-q, L♭)`, the value the horizontal degree must match.
pub fn den_at_minus_q(lflat: &EmbeddedLattice) -> Result<Rational> {
    den_value(lflat, &-Rational::from_integer(BigInt::from(lflat.params().q())))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p3() -> FieldParams {
        FieldParams::new(3).unwrap()
    }

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn rank_one_values() {
        for k in 0..4 {
            let l = EmbeddedLattice::in_standard_space(p3(), SpaceKind::Nonsplit, &[2 * k + 1]).unwrap();
            assert_eq!(int_selfdual(&l).unwrap().value, r(k + 1, 1));
            let l = EmbeddedLattice::diagonal(p3(), &[2 * k]);
            assert_eq!(int_prime(&l).unwrap().value, r(k, 1));
            assert_eq!(int_almost_selfdual(&l).unwrap().value, r(1 + 4 * k, 4));
        }
    }

    #[test]
    fn minuscule_multiplicity() {
        let l = EmbeddedLattice::in_standard_space(p3(), SpaceKind::Nonsplit, &[1, 1, 1]).unwrap();
        let flat = l.with_basis(l.basis().select_columns(&[0, 1])).unwrap();
        let v = vert3(&flat).unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!(mult_vertical(&flat, &v[0]).unwrap(), 1);
    }

    #[test]
    fn horizontal_degree_examples() {
        for inv in [&[0][..], &[1], &[0, 3], &[1, 1], &[1, 2]] {
            let l = EmbeddedLattice::diagonal(p3(), inv);
            assert_eq!(horizontal_degree(&l).unwrap(), den_at_minus_q(&l).unwrap(), "{inv:?}");
        }
        assert_eq!(horizontal_degree(&EmbeddedLattice::diagonal(p3(), &[1])).unwrap(), r(4, 1));
    }

    #[test]
    fn eisenstein_ratio() {
        assert!(eisenstein_ratio_check(p3(), 2).unwrap());
        assert!(eisenstein_ratio_check(p3(), 3).unwrap());
    }
}
