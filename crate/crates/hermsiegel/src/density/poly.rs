use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde_json::json;

use crate::error::{Error, Result};
use crate::ring::{rat_to_string, Rational};

/// Polynomial in `X` with rational coefficients, ascending powers, no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Poly {
    coeffs: Vec<Rational>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_ints<I: IntoIterator<Item = i64>>(c: I) -> Self {
        Poly::new(c.into_iter().map(|x| Rational::from_integer(x.into())).collect())
    }

    pub fn zero() -> Self {
        Poly { coeffs: vec![] }
    }

    pub fn constant(c: Rational) -> Self {
        Poly::new(vec![c])
    }

    pub fn one() -> Self {
        Poly::constant(Rational::one())
    }

    /// `c X^k`.
    pub fn monomial(c: Rational, k: usize) -> Self {
        let mut v = vec![Rational::zero(); k + 1];
        v[k] = c;
        Poly::new(v)
    }

    pub fn x_pow(k: usize) -> Self {
        Poly::monomial(Rational::one(), k)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        Poly::new(self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn pow(&self, k: u32) -> Poly {
        (0..k).fold(Poly::one(), |acc, _| &acc * self)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * Rational::from_integer(BigInt::from(i)))
                .collect(),
        )
    }

    /// `P(c X)`.
    pub fn rescale_var(&self, c: &Rational) -> Poly {
        let mut f = Rational::one();
        let mut out = Vec::with_capacity(self.coeffs.len());
        for a in &self.coeffs {
            out.push(a * &f);
            f *= c;
        }
        Poly::new(out)
    }

    pub fn div_rem(&self, d: &Poly) -> (Poly, Poly) {
        let dd = d.degree().expect("division by zero polynomial");
        let lead = d.coeffs[dd].clone();
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let mut q = vec![Rational::zero(); r.len() - dd];
        for i in (0..q.len()).rev() {
            let c = &r[i + dd] / &lead;
            if c.is_zero() {
                continue;
            }
            for (j, dc) in d.coeffs.iter().enumerate() {
                r[i + j] -= &c * dc;
            }
            q[i] = c;
        }
        (Poly::new(q), Poly::new(r))
    }

    /// Exact division; fails with `RemainderNonzero` otherwise.
    pub fn div_exact(&self, d: &Poly) -> Result<Poly> {
        let (q, r) = self.div_rem(d);
        if !r.is_zero() {
            return Err(Error::RemainderNonzero);
        }
        Ok(q)
    }

    /// Integer coefficients, if all are integral.
    pub fn to_integer_coeffs(&self) -> Option<Vec<BigInt>> {
        self.coeffs.iter().map(|c| c.is_integer().then(|| c.to_integer())).collect()
    }
}

impl<'a> Add<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }
}

impl<'a> Sub<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }
}

impl<'a> Mul<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut v = vec![Rational::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        Poly::new(v)
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(self, o: Poly) -> Poly {
        &self + &o
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(self, o: Poly) -> Poly {
        &self - &o
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, o: Poly) -> Poly {
        &self * &o
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::new(self.coeffs.into_iter().map(|c| -c).collect())
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            match (first, neg) {
                (true, true) => write!(f, "-")?,
                (true, false) => {}
                (false, true) => write!(f, " - ")?,
                (false, false) => write!(f, " + ")?,
            }
            first = false;
            let mon = match i {
                0 => String::new(),
                1 => "X".to_string(),
                _ => format!("X^{i}"),
            };
            if i == 0 {
                write!(f, "{}", rat_to_string(&a))?;
            } else if a.is_one() {
                write!(f, "{mon}")?;
            } else {
                write!(f, "{}*{mon}", rat_to_string(&a))?;
            }
        }
        Ok(())
    }
}

/// A normalized local Siegel series: integer coefficients, with the
/// parameter `q` and the valuation of the lattice it came from.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct DensityPoly {
    pub coeffs: Vec<BigInt>,
    pub q: u64,
    pub val: i64,
}

impl DensityPoly {
    pub fn from_poly(p: &Poly, q: u64, val: i64) -> Result<Self> {
        let coeffs = p
            .to_integer_coeffs()
            .ok_or_else(|| Error::Inconsistent("density polynomial has non-integral coefficients".into()))?;
        Ok(DensityPoly { coeffs, q, val })
    }

    pub fn poly(&self) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| Rational::from_integer(c.clone())).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.poly().eval(x)
    }

    /// `-d/dX` at `X = 1`.
    pub fn neg_derivative_at_one(&self) -> Rational {
        -self.poly().derivative().eval(&Rational::one())
    }

    /// `P(X) = (-X)^val P(1/X)` as polynomials.
    pub fn satisfies_functional_equation(&self) -> bool {
        if self.is_zero() {
            return true;
        }
        if self.val < 0 || self.coeffs.len() as i64 > self.val + 1 {
            return false;
        }
        let v = self.val as usize;
        let sign = if v % 2 == 0 { BigInt::one() } else { -BigInt::one() };
        (0..=v).all(|i| {
            let c = self.coeffs.get(i).cloned().unwrap_or_default();
            let d = self.coeffs.get(v - i).cloned().unwrap_or_default();
            c == &sign * d
        })
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "coeffs": self.coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            "q": self.q,
            "val": self.val,
        })
    }
}

impl fmt::Display for DensityPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.poly())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_and_division() {
        let p = Poly::from_ints([1, -1, 1, -1]);
        assert_eq!(p.to_string(), "1 - X + X^2 - X^3");
        let (q, r) = p.div_rem(&Poly::from_ints([1, -1]));
        assert!(r.is_zero() == false || q.degree() == Some(2));
        let d = Poly::from_ints([1, 1]);
        let prod = &p * &d;
        assert_eq!(prod.div_exact(&d).unwrap(), p);
        assert_eq!(Poly::from_ints([1, 0, 1]).div_exact(&d), Err(Error::RemainderNonzero));
        assert_eq!(Poly::from_ints([0, 3, -2]).to_string(), "3*X - 2*X^2");
    }

    #[test]
    fn functional_equation_of_alternating_sum() {
        let d = DensityPoly { coeffs: [1, -1, 1, -1].iter().map(|&c| BigInt::from(c)).collect(), q: 3, val: 3 };
        assert!(d.satisfies_functional_equation());
        assert_eq!(d.neg_derivative_at_one(), Rational::from_integer(2.into()));
    }
}
