use num_bigint::BigInt;

use super::{rat_mod, FElem, FieldParams, Rational};
use crate::error::{Error, Result};

/// Largest modulus we accept; keeps every product below 2^126.
const MAX_MODULUS: u128 = 1 << 63;

#[inline]
pub(crate) fn mul_mod(a: u128, b: u128, m: u128) -> u128 {
    if m <= u32::MAX as u128 {
        ((a as u64 * b as u64) % m as u64) as u128
    } else {
        a * b % m
    }
}

pub(crate) fn inv_mod(a: u128, m: u128) -> Option<u128> {
    if m == 1 {
        return Some(0);
    }
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    if r0 != 1 {
        return None;
    }
    Some(s0.rem_euclid(m as i128) as u128)
}

/// An element `a + b t` of `O_F / p^k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ResidueElem {
    pub k: u32,
    pub a: u128,
    pub b: u128,
}

/// The Galois ring `O_F / p^k = (Z/p^k)[t]/(t^2 - eps)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ResidueRing {
    params: FieldParams,
    k: u32,
    modulus: u128,
    eps: u128,
}

impl ResidueRing {
    pub fn new(params: FieldParams, k: u32) -> Result<Self> {
        let p = params.p() as u128;
        let mut modulus: u128 = 1;
        for _ in 0..k {
            modulus = modulus
                .checked_mul(p)
                .filter(|&m| m < MAX_MODULUS)
                .ok_or(Error::PrecisionOverflow { exp: k })?;
        }
        let eps = (params.eps() as i128).rem_euclid(modulus.max(1) as i128) as u128;
        Ok(ResidueRing { params, k, modulus, eps })
    }

    pub fn params(&self) -> FieldParams {
        self.params
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn p(&self) -> u128 {
        self.params.p() as u128
    }

    pub fn modulus(&self) -> u128 {
        self.modulus
    }

    pub fn zero(&self) -> ResidueElem {
        ResidueElem { k: self.k, a: 0, b: 0 }
    }

    pub fn one(&self) -> ResidueElem {
        self.new_elem(1, 0)
    }

    pub fn t(&self) -> ResidueElem {
        self.new_elem(0, 1)
    }

    pub fn new_elem(&self, a: u128, b: u128) -> ResidueElem {
        let m = self.modulus;
        ResidueElem { k: self.k, a: a % m, b: b % m }
    }

    pub fn from_i128(&self, a: i128, b: i128) -> ResidueElem {
        let m = self.modulus as i128;
        self.new_elem(a.rem_euclid(m) as u128, b.rem_euclid(m) as u128)
    }

    /// `p^e` (zero once `e >= k`).
    pub fn p_pow(&self, e: u32) -> ResidueElem {
        if e >= self.k {
            return self.zero();
        }
        self.new_elem(self.p().pow(e), 0)
    }

    pub fn reduce(&self, x: &FElem) -> Result<ResidueElem> {
        debug_assert_eq!(x.params(), self.params);
        let p = self.params.p();
        Ok(ResidueElem {
            k: self.k,
            a: rat_mod(x.a(), p, self.modulus)?,
            b: rat_mod(x.b(), p, self.modulus)?,
        })
    }

    /// The representative with components in `[0, p^k)`.
    pub fn lift(&self, x: ResidueElem) -> FElem {
        self.params.elem(
            Rational::from_integer(BigInt::from(x.a)),
            Rational::from_integer(BigInt::from(x.b)),
        )
    }

    #[inline]
    pub fn add(&self, x: ResidueElem, y: ResidueElem) -> ResidueElem {
        let m = self.modulus;
        let a = x.a + y.a;
        let b = x.b + y.b;
        ResidueElem {
            k: self.k,
            a: if a >= m { a - m } else { a },
            b: if b >= m { b - m } else { b },
        }
    }

    #[inline]
    pub fn neg(&self, x: ResidueElem) -> ResidueElem {
        let m = self.modulus;
        ResidueElem {
            k: self.k,
            a: if x.a == 0 { 0 } else { m - x.a },
            b: if x.b == 0 { 0 } else { m - x.b },
        }
    }

    #[inline]
    pub fn sub(&self, x: ResidueElem, y: ResidueElem) -> ResidueElem {
        self.add(x, self.neg(y))
    }

    #[inline]
    pub fn mul(&self, x: ResidueElem, y: ResidueElem) -> ResidueElem {
        let m = self.modulus;
        let bb = mul_mod(x.b, y.b, m);
        let a = (mul_mod(x.a, y.a, m) + mul_mod(bb, self.eps, m)) % m;
        let b = (mul_mod(x.a, y.b, m) + mul_mod(x.b, y.a, m)) % m;
        ResidueElem { k: self.k, a, b }
    }

    #[inline]
    pub fn conj(&self, x: ResidueElem) -> ResidueElem {
        ResidueElem { k: self.k, a: x.a, b: if x.b == 0 { 0 } else { self.modulus - x.b } }
    }

    /// `x conj(x)`, returned as a residue modulo `p^k`.
    #[inline]
    pub fn norm(&self, x: ResidueElem) -> u128 {
        let m = self.modulus;
        let bb = mul_mod(mul_mod(x.b, x.b, m), self.eps, m);
        (mul_mod(x.a, x.a, m) + m - bb) % m
    }

    pub fn scale(&self, x: ResidueElem, c: u128) -> ResidueElem {
        let m = self.modulus;
        ResidueElem { k: self.k, a: mul_mod(x.a, c % m, m), b: mul_mod(x.b, c % m, m) }
    }

    pub fn is_zero(&self, x: ResidueElem) -> bool {
        x.a == 0 && x.b == 0
    }

    pub fn is_unit(&self, x: ResidueElem) -> bool {
        let p = self.p();
        x.a % p != 0 || x.b % p != 0
    }

    pub fn inv(&self, x: ResidueElem) -> Option<ResidueElem> {
        let n_inv = inv_mod(self.norm(x), self.modulus)?;
        Some(self.scale(self.conj(x), n_inv))
    }

    /// Valuation in `0..=k`, with `k` standing for zero.
    pub fn val(&self, x: ResidueElem) -> u32 {
        let p = self.p();
        let (mut a, mut b) = (x.a, x.b);
        let mut v = 0;
        while v < self.k && a % p == 0 && b % p == 0 {
            a /= p;
            b /= p;
            v += 1;
        }
        v
    }

    /// `x / p^e`, assuming `val(x) >= e`; the top `e` digits become zero.
    pub fn div_p_pow(&self, x: ResidueElem, e: u32) -> ResidueElem {
        let d = self.p().pow(e);
        debug_assert!(x.a % d == 0 && x.b % d == 0);
        ResidueElem { k: self.k, a: x.a / d, b: x.b / d }
    }

    /// Decompose `x = p^v u` with `u` a unit (`u = 1` for zero).
    pub fn split_unit(&self, x: ResidueElem) -> (u32, ResidueElem) {
        let v = self.val(x);
        if v == self.k {
            return (v, self.one());
        }
        (v, self.div_p_pow(x, v))
    }

    /// Reduction to precision `k2 <= k`.
    pub fn truncate(&self, x: ResidueElem, k2: u32) -> ResidueElem {
        let m = self.p().pow(k2);
        ResidueElem { k: k2, a: x.a % m, b: x.b % m }
    }

    /// Every element, in lexicographic order of `(a, b)`.
    pub fn elements(&self) -> impl Iterator<Item = ResidueElem> + '_ {
        let m = self.modulus;
        (0..m).flat_map(move |a| (0..m).map(move |b| ResidueElem { k: self.k, a, b }))
    }
}

impl ResidueElem {
    pub fn is_zero(&self) -> bool {
        self.a == 0 && self.b == 0
    }
}

/// The residue field `F_{q^2}` of `F`, elements as pairs `(a, b)` meaning `a + b t`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Fq2 {
    p: u64,
    eps: u64,
}

pub type F2 = (u64, u64);

impl Fq2 {
    pub fn new(params: FieldParams) -> Self {
        let p = params.p();
        Fq2 { p, eps: params.eps().rem_euclid(p as i64) as u64 }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn size(&self) -> u64 {
        self.p * self.p
    }

    #[inline]
    pub fn add(&self, x: F2, y: F2) -> F2 {
        ((x.0 + y.0) % self.p, (x.1 + y.1) % self.p)
    }

    #[inline]
    pub fn sub(&self, x: F2, y: F2) -> F2 {
        ((x.0 + self.p - y.0) % self.p, (x.1 + self.p - y.1) % self.p)
    }

    #[inline]
    pub fn neg(&self, x: F2) -> F2 {
        ((self.p - x.0) % self.p, (self.p - x.1) % self.p)
    }

    #[inline]
    pub fn mul(&self, x: F2, y: F2) -> F2 {
        let p = self.p;
        ((x.0 * y.0 + x.1 * y.1 % p * self.eps) % p, (x.0 * y.1 + x.1 * y.0) % p)
    }

    #[inline]
    pub fn conj(&self, x: F2) -> F2 {
        (x.0, (self.p - x.1) % self.p)
    }

    /// Norm to `F_q`.
    #[inline]
    pub fn norm(&self, x: F2) -> u64 {
        let p = self.p;
        (x.0 * x.0 % p + p - x.1 * x.1 % p * self.eps % p) % p
    }

    pub fn inv(&self, x: F2) -> Option<F2> {
        let n = self.norm(x);
        if n == 0 {
            return None;
        }
        let ni = inv_mod(n as u128, self.p as u128)? as u64;
        let c = self.conj(x);
        Some((c.0 * ni % self.p, c.1 * ni % self.p))
    }

    pub fn is_zero(&self, x: F2) -> bool {
        x.0 == 0 && x.1 == 0
    }

    pub fn elements(&self) -> impl Iterator<Item = F2> {
        let p = self.p;
        (0..p).flat_map(move |a| (0..p).map(move |b| (a, b)))
    }

    /// For each `c` in `F_q`, one element of norm `c` (norm is surjective).
    pub fn norm_preimages(&self) -> Vec<F2> {
        let mut table = vec![None; self.p as usize];
        for x in self.elements() {
            let n = self.norm(x) as usize;
            if table[n].is_none() {
                table[n] = Some(x);
            }
        }
        table.into_iter().map(|x| x.expect("norm is surjective")).collect()
    }

    /// Elements of norm one.
    pub fn norm_one(&self) -> Vec<F2> {
        self.elements().filter(|&x| self.norm(x) == 1).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduce_examples() {
        let k = FieldParams::new(3).unwrap();
        let r2 = ResidueRing::new(k, 2).unwrap();
        assert!(r2.reduce(&k.int(9)).unwrap().is_zero());
        let r1 = ResidueRing::new(k, 1).unwrap();
        let x = r1.reduce(&(&k.one() + &k.t())).unwrap();
        assert_eq!((x.a, x.b), (1, 1));
        assert_eq!(r1.reduce(&k.p_pow(-1)), Err(Error::NonIntegralElement));
    }

    #[test]
    fn units_invert() {
        let k = FieldParams::new(5).unwrap();
        let r = ResidueRing::new(k, 2).unwrap();
        for x in r.elements() {
            match r.inv(x) {
                Some(y) => assert_eq!(r.mul(x, y), r.one()),
                None => assert!(!r.is_unit(x)),
            }
        }
    }

    #[test]
    fn norm_one_has_q_plus_one_elements() {
        for p in [3, 5, 7] {
            let f = Fq2::new(FieldParams::new(p).unwrap());
            assert_eq!(f.norm_one().len() as u64, p + 1);
        }
    }

    #[test]
    fn overflow_is_reported() {
        let k = FieldParams::new(3).unwrap();
        assert!(ResidueRing::new(k, 39).is_ok());
        assert!(matches!(ResidueRing::new(k, 40), Err(Error::PrecisionOverflow { .. })));
    }
}
