//! Exact arithmetic in `F0 = Q_p` (p odd), in its unramified quadratic
//! extension `F = F0(t)` with `t^2 = eps`, and in the finite rings `O_F / p^k`.
//!
//! Elements of `F` are stored as pairs of exact rationals. Only the `p`-adic
//! behaviour of a rational matters for valuations and reductions; the
//! prime-to-`p` part of a denominator is a unit and is inverted modulo `p^k`
//! when reducing.

mod howell;
mod residue;

pub use howell::{elementary_divisors, Echelon};
pub use residue::{Fq2, ResidueElem, ResidueRing, F2};

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Residue characteristic and the non-square used to build `F`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldParams {
    p: u64,
    eps: i64,
}

impl FieldParams {
    /// Parameters for an odd prime `p`, with `eps` the smallest positive non-residue.
    pub fn new(p: u64) -> Result<Self> {
        check_odd_prime(p)?;
        let eps = (2..p as i64)
            .find(|&e| !is_square_mod(e, p))
            .expect("every odd prime has a non-residue");
        Ok(FieldParams { p, eps })
    }

    pub fn with_eps(p: u64, eps: i64) -> Result<Self> {
        check_odd_prime(p)?;
        if is_square_mod(eps, p) {
            return Err(Error::InvalidParams(format!("{eps} is a square modulo {p}")));
        }
        Ok(FieldParams { p, eps })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn eps(&self) -> i64 {
        self.eps
    }

    /// Residue field size of `F0`.
    pub fn q(&self) -> u64 {
        self.p
    }

    pub fn zero(&self) -> FElem {
        FElem::new(Rational::zero(), Rational::zero(), *self)
    }

    pub fn one(&self) -> FElem {
        self.int(1)
    }

    pub fn int(&self, n: i64) -> FElem {
        FElem::new(Rational::from_integer(n.into()), Rational::zero(), *self)
    }

    pub fn rat(&self, r: Rational) -> FElem {
        FElem::new(r, Rational::zero(), *self)
    }

    pub fn elem(&self, a: Rational, b: Rational) -> FElem {
        FElem::new(a, b, *self)
    }

    /// The generator `t` with `t^2 = eps`.
    pub fn t(&self) -> FElem {
        FElem::new(Rational::zero(), Rational::one(), *self)
    }

    /// `p^k` as an element of `F`; `k` may be negative.
    pub fn p_pow(&self, k: i64) -> FElem {
        self.rat(self.p_pow_rat(k))
    }

    pub fn p_pow_rat(&self, k: i64) -> Rational {
        rat_pow(self.p, k)
    }

    pub fn q_pow_rat(&self, k: i64) -> Rational {
        rat_pow(self.q(), k)
    }
}

fn check_odd_prime(p: u64) -> Result<()> {
    let prime = p >= 3 && (2..).take_while(|d: &u64| d * d <= p).all(|d| p % d != 0);
    if !prime || p % 2 == 0 {
        return Err(Error::InvalidParams(format!("{p} is not an odd prime")));
    }
    Ok(())
}

fn is_square_mod(e: i64, p: u64) -> bool {
    let r = e.rem_euclid(p as i64) as u64;
    if r == 0 {
        return true;
    }
    (1..p).any(|x| x * x % p == r)
}

pub(crate) fn inv_mod_u64(a: u64, p: u64) -> u64 {
    residue::inv_mod(a as u128, p as u128).expect("invertible") as u64
}

/// `base^k` as a rational, `k` of either sign.
pub fn rat_pow(base: u64, k: i64) -> Rational {
    let n = num_traits::pow(BigInt::from(base), k.unsigned_abs() as usize);
    if k >= 0 {
        Rational::from_integer(n)
    } else {
        Rational::new(BigInt::one(), n)
    }
}

/// `p`-adic valuation of a nonzero integer.
pub fn val_int(n: &BigInt, p: u64) -> Option<i64> {
    if n.is_zero() {
        return None;
    }
    let p = BigInt::from(p);
    let mut n = n.clone();
    let mut v = 0;
    loop {
        let (quo, rem) = n.div_rem(&p);
        if !rem.is_zero() {
            return Some(v);
        }
        n = quo;
        v += 1;
    }
}

/// `p`-adic valuation of a rational; `None` stands for `+infinity`.
pub fn val_rat(x: &Rational, p: u64) -> Option<i64> {
    let vn = val_int(x.numer(), p)?;
    let vd = val_int(x.denom(), p).unwrap_or(0);
    Some(vn - vd)
}

/// Residue of a `p`-integral rational modulo `m = p^k`.
pub fn rat_mod(x: &Rational, p: u64, m: u128) -> Result<u128> {
    if let Some(v) = val_rat(x, p) {
        if v < 0 {
            return Err(Error::NonIntegralElement);
        }
    } else {
        return Ok(0);
    }
    let mb = BigInt::from(m);
    let n = x.numer().mod_floor(&mb).to_u128().unwrap();
    let d = x.denom().mod_floor(&mb).to_u128().unwrap();
    let dinv = residue::inv_mod(d, m).ok_or(Error::NonIntegralElement)?;
    Ok(residue::mul_mod(n, dinv, m))
}

/// Canonical representative of `x` modulo `p^k Z_(p)`: the unique element of
/// `Z[1/p]` in `[0, p^k)` congruent to `x`.
pub fn rat_canonical_mod(x: &Rational, p: u64, k: i64) -> Rational {
    if x.is_zero() {
        return Rational::zero();
    }
    let vd = val_int(x.denom(), p).unwrap_or(0);
    let s = vd.max(-k);
    // N = x * p^s, a p-integral rational; reduce it modulo p^(k+s).
    let scaled = x * rat_pow(p, s);
    let e = (k + s) as usize;
    let m = num_traits::pow(BigInt::from(p), e);
    let unit_den = scaled.denom().clone();
    let inv = mod_inverse_big(&unit_den, &m);
    let n = (scaled.numer() * inv).mod_floor(&m);
    Rational::new(n, num_traits::pow(BigInt::from(p), s as usize))
}

fn mod_inverse_big(a: &BigInt, m: &BigInt) -> BigInt {
    if m.is_one() {
        return BigInt::zero();
    }
    let e = a.extended_gcd(m);
    debug_assert!(e.gcd.is_one());
    e.x.mod_floor(m)
}

/// An element `a + b t` of `F`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FElem {
    a: Rational,
    b: Rational,
    params: FieldParams,
}

impl FElem {
    pub fn new(a: Rational, b: Rational, params: FieldParams) -> Self {
        FElem { a, b, params }
    }

    pub fn a(&self) -> &Rational {
        &self.a
    }

    pub fn b(&self) -> &Rational {
        &self.b
    }

    pub fn params(&self) -> FieldParams {
        self.params
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn conj(&self) -> FElem {
        FElem::new(self.a.clone(), -self.b.clone(), self.params)
    }

    /// `x * conj(x)`, an element of `F0`.
    pub fn norm(&self) -> Rational {
        &self.a * &self.a - &self.b * &self.b * Rational::from_integer(self.params.eps.into())
    }

    /// `x + conj(x)`, an element of `F0`.
    pub fn trace(&self) -> Rational {
        &self.a + &self.a
    }

    /// Valuation normalized by `val(p) = 1`; `None` for zero.
    pub fn val(&self) -> Option<i64> {
        let p = self.params.p;
        match (val_rat(&self.a, p), val_rat(&self.b, p)) {
            (None, None) => None,
            (Some(x), None) | (None, Some(x)) => Some(x),
            (Some(x), Some(y)) => Some(x.min(y)),
        }
    }

    pub fn inv(&self) -> Option<FElem> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm();
        Some(FElem::new(&self.a / &n, -&self.b / &n, self.params))
    }

    pub fn scale(&self, r: &Rational) -> FElem {
        FElem::new(&self.a * r, &self.b * r, self.params)
    }

    pub fn pow(&self, k: u32) -> FElem {
        let mut acc = self.params.one();
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Unit part `x / p^val(x)`.
    pub fn unit_part(&self) -> Option<FElem> {
        let v = self.val()?;
        Some(self.scale(&self.params.p_pow_rat(-v)))
    }

    /// Reduction into `O_F / p^k`.
    pub fn reduce(&self, ring: &ResidueRing) -> Result<ResidueElem> {
        ring.reduce(self)
    }

    /// Componentwise canonical representative modulo `p^k O_F`.
    pub fn canonical_mod(&self, k: i64) -> FElem {
        let p = self.params.p;
        FElem::new(
            rat_canonical_mod(&self.a, p, k),
            rat_canonical_mod(&self.b, p, k),
            self.params,
        )
    }
}

impl fmt::Debug for FElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for FElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.a.is_zero(), self.b.is_zero()) {
            (_, true) => write!(f, "{}", self.a),
            (true, false) => write!(f, "{}t", self.b),
            (false, false) => {
                if self.b.is_negative() {
                    write!(f, "{}-{}t", self.a, -self.b.clone())
                } else {
                    write!(f, "{}+{}t", self.a, self.b)
                }
            }
        }
    }
}

impl<'a> Add<&'a FElem> for &'a FElem {
    type Output = FElem;
    fn add(self, o: &FElem) -> FElem {
        debug_assert_eq!(self.params, o.params);
        FElem::new(&self.a + &o.a, &self.b + &o.b, self.params)
    }
}

impl<'a> Sub<&'a FElem> for &'a FElem {
    type Output = FElem;
    fn sub(self, o: &FElem) -> FElem {
        debug_assert_eq!(self.params, o.params);
        FElem::new(&self.a - &o.a, &self.b - &o.b, self.params)
    }
}

impl<'a> Mul<&'a FElem> for &'a FElem {
    type Output = FElem;
    fn mul(self, o: &FElem) -> FElem {
        debug_assert_eq!(self.params, o.params);
        let eps = Rational::from_integer(self.params.eps.into());
        let a = &self.a * &o.a + &self.b * &o.b * eps;
        let b = &self.a * &o.b + &self.b * &o.a;
        FElem::new(a, b, self.params)
    }
}

impl Add for FElem {
    type Output = FElem;
    fn add(self, o: FElem) -> FElem {
        &self + &o
    }
}

impl Sub for FElem {
    type Output = FElem;
    fn sub(self, o: FElem) -> FElem {
        &self - &o
    }
}

impl Mul for FElem {
    type Output = FElem;
    fn mul(self, o: FElem) -> FElem {
        &self * &o
    }
}

impl Neg for FElem {
    type Output = FElem;
    fn neg(self) -> FElem {
        FElem::new(-self.a, -self.b, self.params)
    }
}

impl Neg for &FElem {
    type Output = FElem;
    fn neg(self) -> FElem {
        FElem::new(-self.a.clone(), -self.b.clone(), self.params)
    }
}

impl AddAssign<&FElem> for FElem {
    fn add_assign(&mut self, o: &FElem) {
        self.a += &o.a;
        self.b += &o.b;
    }
}

impl SubAssign<&FElem> for FElem {
    fn sub_assign(&mut self, o: &FElem) {
        self.a -= &o.a;
        self.b -= &o.b;
    }
}

/// `"num/den"` (or `"num"`) for a rational.
pub fn rat_to_string(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

impl FElem {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({ "a": rat_to_string(&self.a), "b": rat_to_string(&self.b) })
    }

    /// Accepts `{"a": "n/d", "b": "n/d"}`, a bare rational string, or an integer.
    pub fn from_json(v: &serde_json::Value, params: FieldParams) -> Result<FElem> {
        let field = |x: &serde_json::Value| -> Result<Rational> {
            match x {
                serde_json::Value::String(s) => parse_rational(s),
                serde_json::Value::Number(n) => n
                    .as_i64()
                    .map(|n| Rational::from_integer(n.into()))
                    .ok_or_else(|| Error::Parse(format!("bad number {n}"))),
                other => Err(Error::Parse(format!("bad rational {other}"))),
            }
        };
        match v {
            serde_json::Value::Object(m) => {
                let a = m.get("a").map(field).transpose()?.unwrap_or_else(Rational::zero);
                let b = m.get("b").map(field).transpose()?.unwrap_or_else(Rational::zero);
                Ok(FElem::new(a, b, params))
            }
            other => Ok(params.rat(field(other)?)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn eps_is_smallest_nonresidue() {
        assert_eq!(FieldParams::new(3).unwrap().eps(), 2);
        assert_eq!(FieldParams::new(5).unwrap().eps(), 2);
        assert_eq!(FieldParams::new(7).unwrap().eps(), 3);
        assert!(FieldParams::new(9).is_err());
        assert!(FieldParams::new(2).is_err());
        assert!(FieldParams::with_eps(7, 2).is_err());
    }

    #[test]
    fn valuation_examples() {
        let k = FieldParams::new(3).unwrap();
        assert_eq!(k.one().val(), Some(0));
        assert_eq!((&k.int(3) * &k.t()).val(), Some(1));
        assert_eq!(k.elem(r(1, 3), r(1, 1)).val(), Some(-1));
        assert_eq!(k.zero().val(), None);
    }

    #[test]
    fn inverse_and_norm() {
        let k = FieldParams::new(5).unwrap();
        let x = k.elem(r(2, 5), r(-7, 3));
        let y = x.inv().unwrap();
        assert_eq!(&x * &y, k.one());
        assert_eq!((&x * &x.conj()).b().clone(), Rational::zero());
        assert_eq!((&x * &x.conj()).a().clone(), x.norm());
    }

    #[test]
    fn canonical_mod_representatives() {
        let p = 3;
        assert_eq!(rat_canonical_mod(&r(-1, 1), p, 2), r(8, 1));
        assert_eq!(rat_canonical_mod(&r(1, 2), p, 1), r(2, 1));
        assert_eq!(rat_canonical_mod(&r(1, 3), p, 1), r(1, 3));
        assert_eq!(rat_canonical_mod(&r(4, 3), p, 1), r(4, 3));
        assert_eq!(rat_canonical_mod(&r(10, 3), p, 1), r(1, 3));
        assert_eq!(rat_canonical_mod(&r(5, 9), p, -1), r(2, 9));
    }

    #[test]
    fn json_roundtrip() {
        let k = FieldParams::new(3).unwrap();
        let x = k.elem(r(-2, 9), r(5, 1));
        assert_eq!(FElem::from_json(&x.to_json(), k).unwrap(), x);
    }
}
