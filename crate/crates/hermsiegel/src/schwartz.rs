//! Finite combinations of lattice indicators with the Fourier transform
//! `1_Λ ↦ vol(Λ) 1_{Λ^∨}`, and the functions `Int_{V(Λ)}` for type 3 vertex lattices.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde_json::json;

use crate::budget;
use crate::error::{Error, Result};
use crate::lattice::{EmbeddedLattice, Frame, SpaceKind};
use crate::overlat::integral_overlattices;
use crate::ring::{rat_pow, rat_to_string, val_rat, Echelon, FElem, Rational, ResidueElem, ResidueRing};

/// The Weil constant of a nonsplit hermitian space.
pub const WEIL_CONSTANT: i64 = -1;

/// `sum c_i 1_{Λ_i}` in canonical form: sorted by lattice key, merged, no zero terms.
#[derive(Clone, PartialEq, Eq)]
pub struct LatticeFunction {
    terms: Vec<(Rational, EmbeddedLattice)>,
}

fn sort_key(l: &EmbeddedLattice) -> String {
    l.key().to_json().to_string()
}

impl LatticeFunction {
    pub fn new(terms: Vec<(Rational, EmbeddedLattice)>) -> Result<Self> {
        if let Some((_, first)) = terms.first() {
            if terms.iter().any(|(_, l)| l.space() != first.space() || !l.is_full_rank()) {
                return Err(Error::AmbientMismatch);
            }
        }
        let mut merged: BTreeMap<String, (Rational, EmbeddedLattice)> = BTreeMap::new();
        for (c, l) in terms {
            let l = l.hnf();
            merged
                .entry(sort_key(&l))
                .and_modify(|e| e.0 += &c)
                .or_insert((c, l));
        }
        Ok(LatticeFunction { terms: merged.into_values().filter(|(c, _)| !c.is_zero()).collect() })
    }

    pub fn indicator(l: &EmbeddedLattice) -> Result<Self> {
        LatticeFunction::new(vec![(Rational::one(), l.clone())])
    }

    pub fn terms(&self) -> &[(Rational, EmbeddedLattice)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        LatticeFunction::new(self.terms.iter().map(|(a, l)| (a * c, l.clone())).collect()).expect("same ambient")
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        LatticeFunction::new(self.terms.iter().chain(&o.terms).cloned().collect())
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.add(&o.scale(&-Rational::one()))
    }

    /// `(c, Λ) ↦ (c q^{-val Λ}, Λ^∨)`.
    pub fn fourier(&self) -> Result<Self> {
        let terms = self
            .terms
            .iter()
            .map(|(c, l)| Ok((c * rat_pow(l.params().q(), -l.val()), l.dual()?)))
            .collect::<Result<Vec<_>>>()?;
        LatticeFunction::new(terms)
    }

    pub fn evaluate(&self, x: &[FElem]) -> Result<Rational> {
        let mut out = Rational::zero();
        for (c, l) in &self.terms {
            if x.len() != l.ambient_dim() {
                return Err(Error::AmbientMismatch);
            }
            if l.contains_vector(x) {
                out += c;
            }
        }
        Ok(out)
    }

    /// Decides `self = o` pointwise on coset representatives of the sum of
    /// all lattices modulo their intersection, outside of which both vanish
    /// or are constant.
    pub fn equals(&self, o: &Self) -> Result<bool> {
        let diff = self.sub(o)?;
        if diff.is_zero() {
            return Ok(true);
        }
        Ok(CosetEvaluator::new(&diff)?.values(budget::enumeration())?.iter().all(|v| v.is_zero()))
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.terms.iter().map(|(c, l)| json!({ "coeff": rat_to_string(c), "lattice": l.to_json() })).collect(),
        )
    }
}

impl fmt::Debug for LatticeFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.terms.iter().map(|(c, l)| (rat_to_string(c), l.invariants().seq))).finish()
    }
}

/// Exact evaluation of a lattice function on all classes of `S / I`, where
/// `S` is the sum and `I` the intersection of its lattices. Every lattice
/// of the function lies between `I` and `S`, so the function is constant on
/// these classes and zero off `S`.
pub struct CosetEvaluator {
    frame: Frame,
    ring: ResidueRing,
    inner: Echelon,
    terms: Vec<(Rational, Echelon)>,
}

impl CosetEvaluator {
    pub fn new(f: &LatticeFunction) -> Result<Self> {
        let first = &f.terms.first().ok_or(Error::InvalidParams("empty function".into()))?.1;
        let mut sum = first.clone();
        let mut meet = first.clone();
        for (_, l) in &f.terms[1..] {
            sum = sum.sum(l)?;
            meet = meet.intersect(l)?;
        }
        let frame = Frame::new(sum)?;
        // Smallest k with p^k S ⊆ I.
        let coords = frame.lattice().basis().inverse().ok_or(Error::DegenerateLattice)?.mul(meet.basis());
        let inv = coords.inverse().ok_or(Error::DegenerateLattice)?;
        let k = (-inv.min_val().unwrap_or(0)).max(1) as u32;
        let ring = ResidueRing::new(frame.lattice().params(), k)?;
        let inner = frame.echelon_of(&meet, &ring)?;
        let terms = f
            .terms
            .iter()
            .map(|(c, l)| Ok((c.clone(), frame.echelon_of(l, &ring)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(CosetEvaluator { frame, ring, inner, terms })
    }

    /// Number of classes in `S / I`, if it fits in 128 bits.
    pub fn class_count(&self) -> Option<u128> {
        let q = self.ring.params().q() as u128;
        let k = self.ring.k();
        q.checked_pow(2 * k * self.frame.dim() as u32 - self.inner.log_size())
    }

    /// Representatives of `S / I` in frame coordinates modulo `p^k`.
    pub fn representatives(&self, limit: u64) -> Result<Vec<Vec<ResidueElem>>> {
        if !matches!(self.class_count(), Some(s) if s <= limit as u128) {
            return Err(Error::BudgetExceeded { what: "coset evaluation", limit });
        }
        let ring = self.ring;
        let n = self.frame.dim();
        // With triangular pivots (c, v), coordinate c runs over O / p^v;
        // a column without a pivot runs over all of O / p^k.
        let full: Vec<ResidueElem> = ring.elements().collect();
        let mut ranges: Vec<Vec<ResidueElem>> = vec![full; n];
        for &(c, v) in self.inner.pivots() {
            let sub = ResidueRing::new(ring.params(), v.max(1)).expect("ring");
            ranges[c] = if v == 0 { vec![ring.zero()] } else { sub.elements().map(|e| ring.new_elem(e.a, e.b)).collect() };
        }
        let mut out = Vec::new();
        let mut idx = vec![0usize; n];
        loop {
            out.push(idx.iter().zip(&ranges).map(|(&i, r)| r[i]).collect());
            let mut k = 0;
            while k < n {
                idx[k] += 1;
                if idx[k] < ranges[k].len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if k == n {
                return Ok(out);
            }
        }
    }

    pub fn value_at(&self, y: &[ResidueElem]) -> Rational {
        self.terms.iter().filter(|(_, e)| e.contains(y)).map(|(c, _)| c.clone()).sum()
    }

    /// The value at an ambient vector; zero outside the sum lattice.
    pub fn value_of(&self, x: &[FElem]) -> Rational {
        match self.frame.residue_coords(x, &self.ring) {
            Ok(y) => self.value_at(&y),
            Err(_) => Rational::zero(),
        }
    }

    pub fn values(&self, limit: u64) -> Result<Vec<Rational>> {
        Ok(self.representatives(limit)?.iter().map(|y| self.value_at(y)).collect())
    }

    /// The ambient vector of a representative.
    pub fn lift(&self, y: &[ResidueElem]) -> Vec<FElem> {
        self.frame.lift(y, &self.ring)
    }
}

fn check_type3(lambda: &EmbeddedLattice) -> Result<()> {
    let n = lambda.ambient_dim();
    let nonsplit = lambda.space().kind() == SpaceKind::Nonsplit;
    if !lambda.is_full_rank() || !nonsplit || n < 3 || n % 2 == 0 || !lambda.is_vertex(3) {
        return Err(Error::NotVertexType3);
    }
    Ok(())
}

/// The type 1 lattices containing a type 3 vertex lattice.
pub fn type1_overlattices(lambda: &EmbeddedLattice) -> Result<Vec<EmbeddedLattice>> {
    check_type3(lambda)?;
    Ok(integral_overlattices(lambda)?.into_iter().filter(|r| r.type_t == 1).map(|r| r.lattice).collect())
}

/// `Int_{V(Λ)} = -q^2 (1 + q) 1_Λ + sum_{Λ ⊆ Λ', t(Λ') = 1} 1_{Λ'}`.
pub fn int_v_lambda(lambda: &EmbeddedLattice) -> Result<LatticeFunction> {
    let q = lambda.params().q();
    let ones = type1_overlattices(lambda)?;
    if ones.len() as u64 != q * q * q + 1 {
        return Err(Error::Inconsistent(format!("{} type 1 overlattices, expected {}", ones.len(), q * q * q + 1)));
    }
    let qq = BigInt::from(q);
    let lead = -Rational::from_integer(&qq * &qq * (BigInt::one() + &qq));
    let mut terms = vec![(lead, lambda.clone())];
    terms.extend(ones.into_iter().map(|l| (Rational::one(), l)));
    LatticeFunction::new(terms)
}

/// The closed-form values of `Int_{V(Λ)}`: `1 - q^2` on `Λ`, `1` on the rest
/// of `Λ^∨` where `val(x) ≥ 0`, and `0` elsewhere.
pub fn int_v_lambda_expected(lambda: &EmbeddedLattice, x: &[FElem]) -> Result<Rational> {
    check_type3(lambda)?;
    let q = lambda.params().q() as i64;
    if lambda.contains_vector(x) {
        return Ok(Rational::from_integer((1 - q * q).into()));
    }
    let integral_norm = match val_rat(&lambda.space().norm(x), lambda.params().p()) {
        None => true,
        Some(v) => v >= 0,
    };
    if integral_norm && lambda.dual()?.contains_vector(x) {
        return Ok(Rational::one());
    }
    Ok(Rational::zero())
}

/// `hat(Int_{V(Λ)}) = γ_V Int_{V(Λ)}` as lattice functions.
pub fn local_modularity_check(lambda: &EmbeddedLattice) -> Result<bool> {
    let f = int_v_lambda(lambda)?;
    f.fourier()?.equals(&f.scale(&Rational::from_integer(WEIL_CONSTANT.into())))
}

/// How many type 1 lattices `Λ' ⊇ Λ` have `x ∈ Λ'^∨`. The four possible
/// answers `q^3 + 1`, `1`, `q + 1`, `0` correspond to `x` in `Λ`, isotropic
/// in `Λ^∨/Λ`, anisotropic in `Λ^∨/Λ`, and outside `Λ^∨`.
pub fn dual_membership_count(lambda: &EmbeddedLattice, x: &[FElem]) -> Result<u64> {
    let mut n = 0;
    for l in type1_overlattices(lambda)? {
        if l.dual()?.contains_vector(x) {
            n += 1;
        }
    }
    Ok(n)
}

/// A type 3 vertex lattice in the standard nonsplit space of odd dimension `n`.
pub fn standard_type3(params: crate::ring::FieldParams, n: usize) -> Result<EmbeddedLattice> {
    if n < 3 || n % 2 == 0 {
        return Err(Error::InvalidParams(format!("type 3 vertex lattices need odd n ≥ 3, got {n}")));
    }
    let mut inv = vec![0i64; n - 3];
    inv.extend([1, 1, 1]);
    EmbeddedLattice::in_standard_space(params, SpaceKind::Nonsplit, &inv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::FieldParams;

    #[test]
    fn fourier_of_vertex_indicator() {
        let p = FieldParams::new(3).unwrap();
        let l = standard_type3(p, 3).unwrap();
        let f = LatticeFunction::indicator(&l).unwrap().fourier().unwrap();
        assert_eq!(f.terms().len(), 1);
        assert_eq!(f.terms()[0].0, rat_pow(3, -3));
        assert!(f.terms()[0].1.same_module(&l.dual().unwrap()));
        let ff = LatticeFunction::indicator(&l).unwrap().fourier().unwrap().fourier().unwrap();
        assert_eq!(ff, LatticeFunction::indicator(&l).unwrap());
    }

    #[test]
    fn modularity_n3_q3() {
        let p = FieldParams::new(3).unwrap();
        let l = standard_type3(p, 3).unwrap();
        assert!(local_modularity_check(&l).unwrap());
    }

    #[test]
    fn pointwise_values_match() {
        let p = FieldParams::new(3).unwrap();
        let l = standard_type3(p, 3).unwrap();
        let f = int_v_lambda(&l).unwrap();
        let ev = CosetEvaluator::new(&f).unwrap();
        let reps = ev.representatives(1 << 20).unwrap();
        assert_eq!(reps.len() as u128, ev.class_count().unwrap());
        for y in reps {
            let x = ev.lift(&y);
            assert_eq!(f.evaluate(&x).unwrap(), int_v_lambda_expected(&l, &x).unwrap());
            assert_eq!(ev.value_at(&y), f.evaluate(&x).unwrap());
        }
    }
}
