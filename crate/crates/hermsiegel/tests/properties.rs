use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use proptest::prelude::*;

use hermsiegel::density::{den_central, den_poly};
use hermsiegel::lattice::{EmbeddedLattice, HermSpace, Mat};
use hermsiegel::overlat::integral_overlattices;
use hermsiegel::ring::{val_rat, FElem, FieldParams, Rational, ResidueRing};
use hermsiegel::schwartz::LatticeFunction;

fn params() -> impl Strategy<Value = FieldParams> {
    prop_oneof![Just(3u64), Just(5), Just(7)].prop_map(|p| FieldParams::new(p).unwrap())
}

fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// `(a + b t) p^e` with small integer `a, b`.
fn elem(p: FieldParams) -> impl Strategy<Value = FElem> {
    (-20i64..20, -20i64..20, -2i64..3).prop_map(move |(a, b, e)| &p.elem(rat(a, 1), rat(b, 1)) * &p.p_pow(e))
}

fn integral_elem(p: FieldParams) -> impl Strategy<Value = FElem> {
    (-50i64..50, -50i64..50).prop_map(move |(a, b)| p.elem(rat(a, 1), rat(b, 1)))
}

fn invariants(max_rank: usize, max_a: i64) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(0..=max_a, 1..=max_rank)
}

/// A unit upper triangular matrix times a unit lower triangular one.
fn unimodular(p: FieldParams, n: usize) -> impl Strategy<Value = Mat> {
    let m = n * n.saturating_sub(1) / 2;
    (prop::collection::vec(integral_elem(p), m), prop::collection::vec(integral_elem(p), m)).prop_map(move |(u, l)| {
        let mut up = Mat::identity(p, n);
        let mut lo = Mat::identity(p, n);
        let mut k = 0;
        for i in 0..n {
            for j in i + 1..n {
                up[(i, j)] = u[k].clone();
                lo[(j, i)] = l[k].clone();
                k += 1;
            }
        }
        up.mul(&lo)
    })
}

fn lattice_and_change(max_rank: usize, max_a: i64) -> impl Strategy<Value = (EmbeddedLattice, Mat)> {
    (params(), invariants(max_rank, max_a)).prop_flat_map(|(p, inv)| {
        let n = inv.len();
        (Just(EmbeddedLattice::diagonal(p, &inv)), unimodular(p, n))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn valuation_is_multiplicative_and_ultrametric((x, y) in params().prop_flat_map(|p| (elem(p), elem(p)))) {
        match (x.val(), y.val()) {
            (Some(a), Some(b)) => {
                prop_assert_eq!((&x * &y).val(), Some(a + b));
                if let Some(s) = (&x + &y).val() {
                    prop_assert!(s >= a.min(b));
                    if a != b {
                        prop_assert_eq!(s, a.min(b));
                    }
                }
            }
            _ => prop_assert!((&x * &y).is_zero()),
        }
    }

    #[test]
    fn conjugation_is_an_involutive_automorphism((x, y) in params().prop_flat_map(|p| (elem(p), elem(p)))) {
        prop_assert_eq!(x.conj().conj(), x.clone());
        prop_assert_eq!((&x * &y).conj(), &x.conj() * &y.conj());
        prop_assert_eq!((&x + &y).conj(), &x.conj() + &y.conj());
        prop_assert_eq!((&x * &y).norm(), x.norm() * y.norm());
        prop_assert_eq!(x.conj() == x, x.b().is_zero());
    }

    #[test]
    fn reduction_is_a_ring_homomorphism(
        (x, y, k) in params().prop_flat_map(|p| (integral_elem(p), integral_elem(p), 1u32..4))
    ) {
        let ring = ResidueRing::new(x.params(), k).unwrap();
        let (rx, ry) = (ring.reduce(&x).unwrap(), ring.reduce(&y).unwrap());
        prop_assert_eq!(ring.reduce(&(&x * &y)).unwrap(), ring.mul(rx, ry));
        prop_assert_eq!(ring.reduce(&(&x + &y)).unwrap(), ring.add(rx, ry));
        prop_assert_eq!(ring.reduce(&x.conj()).unwrap(), ring.conj(rx));
    }

    #[test]
    fn invariants_ignore_the_basis((l, u) in lattice_and_change(4, 4)) {
        let moved = l.transform(&u).unwrap();
        prop_assert_eq!(moved.fundamental_invariants().unwrap(), l.invariants());
        prop_assert!(moved.same_module(&l));
    }

    #[test]
    fn orthogonal_sum_merges_invariants(
        (p, a, b) in (params(), invariants(2, 4), invariants(2, 4))
    ) {
        let s = EmbeddedLattice::diagonal(p, &a).orthogonal_sum(&EmbeddedLattice::diagonal(p, &b));
        let mut merged = [a, b].concat();
        merged.sort_unstable();
        prop_assert_eq!(s.invariants().seq, merged);
    }

    #[test]
    fn form_rescaling_shifts_invariants((p, inv) in (params(), invariants(3, 4))) {
        let l = EmbeddedLattice::diagonal(p, &inv);
        let scaled = l.rescale_form(&Rational::from_integer(BigInt::from(p.p())));
        let want: Vec<i64> = inv.iter().map(|a| a + 1).collect::<Vec<_>>();
        let mut want = want;
        want.sort_unstable();
        prop_assert_eq!(scaled.invariants().seq, want);
    }

    #[test]
    fn dual_is_an_involution_and_inverts_volume((l, u) in lattice_and_change(3, 3)) {
        let l = l.transform(&u).unwrap();
        let d = l.dual().unwrap();
        prop_assert!(d.dual().unwrap().same_module(&l));
        prop_assert_eq!(d.vol() * l.vol(), Rational::one());
        prop_assert_eq!(l.is_integral(), l.gram().is_integral());
    }

    #[test]
    fn volumes_of_sum_and_intersection(
        (p, a, b) in params().prop_flat_map(|p| (Just(p), prop::collection::vec(integral_elem(p), 4), prop::collection::vec(integral_elem(p), 4)))
    ) {
        let space = Arc::new(HermSpace::new(Mat::identity(p, 2)).unwrap());
        let m1 = Mat::from_rows(p, vec![a[..2].to_vec(), a[2..].to_vec()]);
        let m2 = Mat::from_rows(p, vec![b[..2].to_vec(), b[2..].to_vec()]);
        prop_assume!(!m1.det().is_zero() && !m2.det().is_zero());
        let l1 = EmbeddedLattice::new(space.clone(), m1).unwrap();
        let l2 = EmbeddedLattice::new(space, m2).unwrap();
        let s = l1.sum(&l2).unwrap();
        let i = l1.intersect(&l2).unwrap();
        prop_assert_eq!(s.vol() * i.vol(), l1.vol() * l2.vol());
        prop_assert!(s.contains(&l1) && s.contains(&l2) && l1.contains(&i) && l2.contains(&i));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn siegel_series_functional_equation((l, u) in lattice_and_change(3, 3)) {
        let l = l.transform(&u).unwrap();
        let d = den_poly(&l).unwrap();
        prop_assert!(d.satisfies_functional_equation());
        prop_assert_eq!(d.val, l.val());
        prop_assert_eq!(d.eval(&Rational::zero()), Rational::one());
    }

    #[test]
    fn central_value_counts_selfdual_overlattices((p, inv) in (params(), invariants(3, 2))) {
        let l = EmbeddedLattice::diagonal(p, &inv);
        let n = integral_overlattices(&l).unwrap().iter().filter(|r| r.type_t == 0).count();
        prop_assert_eq!(den_central(&l).unwrap(), Rational::from_integer(BigInt::from(n)));
    }

    #[test]
    fn unit_summands_cancel((p, inv) in (params(), invariants(2, 3))) {
        let base = den_poly(&EmbeddedLattice::diagonal(p, &inv)).unwrap();
        let bigger = den_poly(&EmbeddedLattice::diagonal(p, &[&[0][..], &inv].concat())).unwrap();
        prop_assert_eq!(base.poly(), bigger.poly());
    }

    #[test]
    fn fourier_transform_is_an_involution(
        (l, u, c) in lattice_and_change(2, 2).prop_flat_map(|(l, u)| (Just(l), Just(u), -5i64..6))
    ) {
        prop_assume!(c != 0);
        let l = l.transform(&u).unwrap();
        let f = LatticeFunction::indicator(&l).unwrap().scale(&rat(c, 1));
        let g = f.add(&LatticeFunction::indicator(&l.dual().unwrap()).unwrap()).unwrap();
        prop_assert!(g.fourier().unwrap().fourier().unwrap().equals(&g).unwrap());
        let hat = f.fourier().unwrap();
        prop_assert_eq!(hat.terms().len(), 1);
        prop_assert_eq!(&hat.terms()[0].0, &(rat(c, 1) * l.vol()));
        prop_assert!(hat.terms()[0].1.same_module(&l.dual().unwrap()));
    }

    #[test]
    fn norm_valuation_of_basis_vectors((p, inv) in (params(), invariants(3, 5))) {
        let l = EmbeddedLattice::diagonal(p, &inv);
        for (i, b) in l.basis().columns().iter().enumerate() {
            prop_assert_eq!(val_rat(&l.space().norm(b), p.p()), Some(inv[i]));
        }
    }
}
