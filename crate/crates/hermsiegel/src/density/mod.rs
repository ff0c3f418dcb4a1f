//! The local Siegel series `Den(X, L)` and the quantities derived from it.

pub mod poly;

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::EmbeddedLattice;
use crate::overlat::{self, Shape};
use crate::ring::{rat_pow, FElem, Rational};
pub use poly::{DensityPoly, Poly};

fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

fn neg_q(q: u64) -> Rational {
    -Rational::from_integer(BigInt::from(q))
}

/// `m(a; X) = prod_{i<a} (1 - (-q)^i X)`.
pub fn weight_m(q: u64, a: usize) -> Poly {
    let mut out = Poly::one();
    let mut c = Rational::one();
    for _ in 0..a {
        out = &out * &Poly::new(vec![Rational::one(), -c.clone()]);
        c *= neg_q(q);
    }
    out
}

/// `m(a) = prod_{i=1}^{a-1} (1 - (-q)^i)`, with `m(0) = 0`.
pub fn weight_m_der(q: u64, a: usize) -> Rational {
    if a == 0 {
        return Rational::zero();
    }
    let mut out = Rational::one();
    let mut c = Rational::one();
    for _ in 1..a {
        c *= neg_q(q);
        out *= Rational::one() - &c;
    }
    out
}

fn lattice_shapes(l: &EmbeddedLattice) -> Result<BTreeMap<Shape, u64>> {
    overlat::shapes(l)
}

fn poly_from_shapes(q: u64, shapes: &BTreeMap<Shape, u64>) -> Poly {
    let mut weights: BTreeMap<usize, Poly> = BTreeMap::new();
    let mut out = Poly::zero();
    for (s, &count) in shapes {
        let w = weights.entry(s.type_t).or_insert_with(|| weight_m(q, s.type_t));
        let term = &Poly::x_pow(2 * s.length as usize) * w;
        out = &out + &term.scale(&int(count as i64));
    }
    out
}

/// `Den(X, L)`; the zero polynomial when `L` is not integral.
pub fn den_poly(l: &EmbeddedLattice) -> Result<DensityPoly> {
    let q = l.params().q();
    if !l.is_integral() {
        return Ok(DensityPoly { coeffs: vec![], q, val: l.val() });
    }
    let p = poly_from_shapes(q, &lattice_shapes(l)?);
    DensityPoly::from_poly(&p, q, l.val())
}

/// `∂Den(L)` for odd `val(L)`, computed as a weighted count and checked
/// against `-d/dX Den(X, L)` at `X = 1`.
pub fn derived_den(l: &EmbeddedLattice) -> Result<Rational> {
    if !l.is_integral() {
        return Err(Error::NotIntegral);
    }
    if l.val().rem_euclid(2) == 0 {
        return Err(Error::EvenValuation);
    }
    let q = l.params().q();
    let shapes = lattice_shapes(l)?;
    let direct: Rational = shapes.iter().map(|(s, &c)| weight_m_der(q, s.type_t) * int(c as i64)).sum();
    let via_poly = -poly_from_shapes(q, &shapes).derivative().eval(&Rational::one());
    if direct != via_poly {
        return Err(Error::Inconsistent(format!("derived density {direct} vs polynomial derivative {via_poly}")));
    }
    Ok(direct)
}

pub fn den_value(l: &EmbeddedLattice, x: &Rational) -> Result<Rational> {
    Ok(den_poly(l)?.eval(x))
}

/// `Den(1, L)`, the number of self-dual lattices containing `L`.
pub fn den_central(l: &EmbeddedLattice) -> Result<Rational> {
    den_value(l, &Rational::one())
}

/// `sum [L':L] m(t(L') + 1)` over integral overlattices, which equals `Den(-q, L)`.
pub fn den_minus_q_sum(l: &EmbeddedLattice) -> Result<Rational> {
    if !l.is_integral() {
        return Ok(Rational::zero());
    }
    let q = l.params().q();
    Ok(lattice_shapes(l)?
        .iter()
        .map(|(s, &c)| rat_pow(q, 2 * s.length as i64) * weight_m_der(q, s.type_t + 1) * int(c as i64))
        .sum())
}

/// `sum_{t(L')=0} 1 + sum_{t(L')=1} (1 + 1/q) / vol(L')`, which equals
/// `vol(L)^{-1} Den((-q)^{-1}, L)`.
pub fn value_at_inverse_sum(l: &EmbeddedLattice) -> Result<Rational> {
    if !l.is_integral() {
        return Ok(Rational::zero());
    }
    let q = l.params().q();
    let w = Rational::one() + rat_pow(q, -1);
    let val = l.val();
    Ok(lattice_shapes(l)?
        .iter()
        .map(|(s, &c)| {
            let c = int(c as i64);
            match s.type_t {
                0 => c,
                1 => c * &w * rat_pow(q, val - 2 * s.length as i64),
                _ => Rational::zero(),
            }
        })
        .sum())
}

/// Whether `Den(X) = (-X)^{val} Den(1/X)` holds exactly.
pub fn functional_eq_check(l: &EmbeddedLattice) -> Result<bool> {
    Ok(den_poly(l)?.satisfies_functional_equation())
}

/// Checks `Den(X, L) = X^2 Den(X, L') + (1 - X) Den(-qX, L_flat)` for
/// `L = L_flat + <x>` and `L' = L_flat + <x/p>`.
pub fn induction_check(lflat: &EmbeddedLattice, x: &[FElem]) -> Result<bool> {
    let params = lflat.params();
    let space = lflat.space();
    if x.len() != lflat.ambient_dim() {
        return Err(Error::AmbientMismatch);
    }
    if lflat.basis().columns().iter().any(|b| !space.pairing(b, x).is_zero()) {
        return Err(Error::PreconditionViolated("x is not orthogonal to the flat lattice".into()));
    }
    let vx = crate::ring::val_rat(&space.norm(x), params.p())
        .ok_or_else(|| Error::PreconditionViolated("x is isotropic".into()))?;
    if let Some(e) = lflat.invariants().e_max() {
        if vx <= e {
            return Err(Error::PreconditionViolated(format!("val(x) = {vx} does not exceed {e}")));
        }
    }
    let with = |v: Vec<FElem>| -> Result<EmbeddedLattice> {
        let mut cols = lflat.basis().columns();
        cols.push(v);
        lflat.with_basis(crate::lattice::Mat::from_columns(params, lflat.ambient_dim(), &cols))
    };
    let l = with(x.to_vec())?;
    let pinv = params.p_pow(-1);
    let lp = with(x.iter().map(|c| c * &pinv).collect())?;
    let lhs = den_poly(&l)?.poly();
    let d_prime = den_poly(&lp)?.poly();
    let d_flat = den_poly(lflat)?.poly().rescale_var(&neg_q(params.q()));
    let rhs = &(&Poly::x_pow(2) * &d_prime) + &(&Poly::from_ints([1, -1]) * &d_flat);
    Ok(lhs == rhs)
}

/// `Den(X, <p^a>) = sum_{i=0}^{a} (-X)^i`.
pub fn rank1_closed(q: u64, a: i64) -> Result<DensityPoly> {
    if a < 0 {
        return Ok(DensityPoly { coeffs: vec![], q, val: a });
    }
    let coeffs = (0..=a).map(|i| if i % 2 == 0 { BigInt::one() } else { -BigInt::one() }).collect();
    Ok(DensityPoly { coeffs, q, val: a })
}

fn check_pair(a: i64, b: i64) -> Result<()> {
    if a < 0 || a > b || (a + b) % 2 != 0 {
        return Err(Error::InvalidParams(format!("need 0 <= a <= b with a + b even, got ({a}, {b})")));
    }
    Ok(())
}

/// Closed form of `Den_Λ(X, diag(p^a, p^b))` in rank two, `a <= b`.
///
/// As printed, the formula only matches the overlattice count when its
/// exponent `a` is the larger invariant, so the roles are exchanged here.
pub fn sankaran_rank2(q: u64, a: i64, b: i64) -> Result<DensityPoly> {
    check_pair(a, b)?;
    let (a, b) = (b as usize, a as usize);
    let e = b % 2;
    let qr = int(q as i64);
    let qi = rat_pow(q, -1);
    let x = Poly::x_pow(1);
    let one_minus_x = Poly::from_ints([1, -1]);
    let qx = Poly::monomial(qr.clone(), 1);
    let qx_minus_1 = &qx - &Poly::one();
    let x2_minus_1 = Poly::from_ints([-1, 0, 1]);

    let t1 = (&qx.pow(b as u32) - &qx.pow(e as u32)).div_exact(&qx_minus_1)?;
    let t1 = &qx.scale(&(Rational::one() - &qr)) * &t1;

    let t2 = (&x.pow(2 * b as u32) - &x.pow(2 * e as u32)).div_exact(&x2_minus_1)?;
    let t2 = &(&x.pow(2) * &Poly::new(vec![qr.clone(), -qi.clone()])) * &t2;

    let lead = one_minus_x.scale(&rat_pow(q, b as i64 + 1)) + Poly::monomial(qr.clone(), b + 1)
        - Poly::monomial(qi.clone(), b + 2);
    let t3 = (&x.pow(a as u32 + 1) - &x.pow(b as u32 + 1)).div_exact(&x2_minus_1)?;
    let t3 = &lead * &t3;

    let brace = &(&t1 + &t2) + &t3;
    let tail = (&one_minus_x * &brace).div_exact(&Poly::new(vec![Rational::one(), -qi]))?;
    let quad = Poly::new(vec![Rational::one(), -(&qr * &qr - &qr), Rational::one()]);
    let head = &one_minus_x * &quad.pow(e as u32);
    DensityPoly::from_poly(&(&head + &tail), q, (a + b + 1) as i64)
}

/// `Den(X, diag(p^a, p^b) ⊥ <p>)` in closed form, `a <= b`, with an exact
/// division by `1 + X`. Roles of `a` and `b` are exchanged as above.
pub fn terstiege_rank3(q: u64, a: i64, b: i64) -> Result<DensityPoly> {
    check_pair(a, b)?;
    let (a, b) = (b, a);
    let mut s = Poly::zero();
    for l in 0..=b + 1 {
        let c = &Poly::monomial(rat_pow(q, l), l as usize)
            - &Poly::monomial(rat_pow(q, 1 + b - l), (l + a + 1) as usize);
        s = &s + &c;
    }
    for l in 0..b {
        let c = &Poly::monomial(rat_pow(q, 2 + l), (1 + l) as usize)
            - &Poly::monomial(rat_pow(q, 1 + b - l), (2 + l + a) as usize);
        s = &s - &c;
    }
    let p = s.div_exact(&Poly::from_ints([1, 1]))?;
    DensityPoly::from_poly(&p, q, a + b + 1)
}

/// `L ⊥ <p>`.
pub fn augment(l: &EmbeddedLattice) -> EmbeddedLattice {
    l.orthogonal_sum(&EmbeddedLattice::diagonal(l.params(), &[1]))
}

/// `Den_Λ(X, L) = Den(X, L ⊥ <p>)`.
pub fn den_lambda_poly(l: &EmbeddedLattice) -> Result<DensityPoly> {
    den_poly(&augment(l))
}

/// `∂Den_Λ(L)` for even `val(L)`.
pub fn derived_den_lambda(l: &EmbeddedLattice) -> Result<Rational> {
    if !l.is_integral() {
        return Err(Error::NotIntegral);
    }
    if l.val().rem_euclid(2) != 0 {
        return Err(Error::OddValuation);
    }
    derived_den(&augment(l))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Level {
    Selfdual,
    AlmostSelfdual,
}

/// Local Whittaker data as rational numbers. The derivative is the rational
/// cofactor of `log q^2`, present only when the parity makes the value vanish.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WhittakerFactors {
    pub level: Level,
    pub rank: usize,
    pub factor: String,
    pub value: String,
    pub derivative_log_q2: Option<String>,
    pub log_factor: &'static str,
}

fn local_factor(q: u64, n: usize, level: Level) -> Rational {
    let mut c = Rational::one();
    let m = match level {
        Level::Selfdual => n,
        Level::AlmostSelfdual => n - 1,
    };
    let mut f = Rational::one();
    for _ in 1..=m {
        c /= neg_q(q);
        f *= Rational::one() - &c;
    }
    if level == Level::AlmostSelfdual {
        f *= neg_q(q).pow(-(n as i32));
    }
    f
}

pub fn whittaker_factors(l: &EmbeddedLattice, level: Level) -> Result<WhittakerFactors> {
    if !l.is_integral() {
        return Err(Error::NotIntegral);
    }
    let q = l.params().q();
    let n = l.rank();
    let f = local_factor(q, n, level);
    let (value, derivative) = match level {
        Level::Selfdual => {
            let v = den_central(l)?;
            let d = if l.val().rem_euclid(2) == 1 { Some(derived_den(l)?) } else { None };
            (v, d)
        }
        Level::AlmostSelfdual => {
            let v = den_poly(&augment(l))?.eval(&Rational::one());
            let d = if l.val().rem_euclid(2) == 0 { Some(derived_den_lambda(l)?) } else { None };
            (v, d)
        }
    };
    let s = crate::ring::rat_to_string;
    Ok(WhittakerFactors {
        level,
        rank: n,
        factor: s(&f),
        value: s(&(value * &f)),
        derivative_log_q2: derivative.map(|d| s(&(d * &f))),
        log_factor: "log q^2 (symbolic, not evaluated)",
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::FieldParams;

    fn p3() -> FieldParams {
        FieldParams::new(3).unwrap()
    }

    fn r(n: i64) -> Rational {
        int(n)
    }

    #[test]
    fn weights() {
        assert_eq!(weight_m(3, 0), Poly::one());
        assert_eq!(weight_m(3, 2), Poly::from_ints([1, 2, -3]));
        assert_eq!(weight_m_der(3, 0), r(0));
        assert_eq!(weight_m_der(3, 1), r(1));
        assert_eq!(weight_m_der(3, 2), r(4));
        for t in 0..4 {
            assert_eq!(weight_m(3, t).eval(&r(-3)), weight_m_der(3, t + 1));
        }
    }

    #[test]
    fn rank_one_matches_closed_form() {
        for a in 0..5 {
            let l = EmbeddedLattice::diagonal(p3(), &[a]);
            assert_eq!(den_poly(&l).unwrap(), rank1_closed(3, a).unwrap());
        }
        assert_eq!(derived_den(&EmbeddedLattice::diagonal(p3(), &[3])).unwrap(), r(2));
        assert_eq!(derived_den(&EmbeddedLattice::diagonal(p3(), &[2])), Err(Error::EvenValuation));
    }

    #[test]
    fn central_values() {
        assert_eq!(den_central(&EmbeddedLattice::diagonal(p3(), &[1, 1])).unwrap(), r(4));
        assert_eq!(den_central(&EmbeddedLattice::diagonal(p3(), &[0, 0])).unwrap(), r(1));
    }

    #[test]
    fn low_rank_closed_forms() {
        assert_eq!(sankaran_rank2(3, 0, 0).unwrap().poly(), Poly::from_ints([1, -1]));
        assert_eq!(sankaran_rank2(3, 1, 1).unwrap().poly(), Poly::from_ints([1, -7, 7, -1]));
        for (a, b) in [(0, 0), (1, 1), (0, 2), (1, 3), (2, 2)] {
            assert_eq!(sankaran_rank2(3, a, b).unwrap(), terstiege_rank3(3, a, b).unwrap());
        }
    }

    #[test]
    fn almost_self_dual_rank_one() {
        for k in 0..3 {
            let l = EmbeddedLattice::diagonal(p3(), &[2 * k]);
            assert_eq!(derived_den_lambda(&l).unwrap(), r(1 + 4 * k));
        }
    }

    #[test]
    fn whittaker_rank_one() {
        let w = whittaker_factors(&EmbeddedLattice::diagonal(p3(), &[1]), Level::Selfdual).unwrap();
        assert_eq!(w.derivative_log_q2.as_deref(), Some("4/3"));
        let w = whittaker_factors(&EmbeddedLattice::diagonal(p3(), &[0]), Level::AlmostSelfdual).unwrap();
        assert_eq!(w.factor, "-1/3");
    }

    #[test]
    fn enumeration_agrees_with_closed_forms() {
        for (a, b) in [(0, 0), (1, 1), (0, 2), (1, 3), (2, 2), (2, 4), (3, 3), (0, 4), (1, 5)] {
            let l = EmbeddedLattice::diagonal(p3(), &[a, b]);
            let d = den_lambda_poly(&l).unwrap();
            assert_eq!(d, sankaran_rank2(3, a, b).unwrap(), "({a},{b})");
            assert_eq!(d, terstiege_rank3(3, a, b).unwrap(), "({a},{b})");
        }
    }

    #[test]
    fn special_values() {
        let q = r(3);
        for inv in [vec![1, 2], vec![0, 1, 3], vec![1, 1, 2], vec![2, 3]] {
            let l = EmbeddedLattice::diagonal(p3(), &inv);
            let d = den_poly(&l).unwrap();
            assert!(d.satisfies_functional_equation());
            assert_eq!(d.eval(&-q.clone()), den_minus_q_sum(&l).unwrap());
            let lhs = d.eval(&(-q.clone()).recip()) / l.vol();
            assert_eq!(lhs, value_at_inverse_sum(&l).unwrap(), "{inv:?}");
        }
    }
}
