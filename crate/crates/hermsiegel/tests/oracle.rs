use num_bigint::BigInt;
use num_traits::One;

use hermsiegel::density::den_poly;
use hermsiegel::lattice::EmbeddedLattice;
use hermsiegel::oracle::{base_precision, count_rep, count_rep_dfs, den_oracle, den_oracle_from, siegel_ratio, unit_lattice};
use hermsiegel::ring::{FieldParams, Rational};

fn p3() -> FieldParams {
    FieldParams::new(3).unwrap()
}

fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

#[test]
fn unimodular_self_density_is_the_product_formula() {
    // Den(<1>^n, <1>^n) = prod_{i=1}^n (1 - (-q)^{-i}).
    let p = p3();
    let mut want = Rational::one();
    for n in 1..=3usize {
        want *= Rational::one() - rat(-3, 1).pow(-(n as i32));
        let u = unit_lattice(p, n);
        let r = den_oracle(&u, &u).unwrap();
        assert!(r.stabilized);
        assert_eq!(r.normalized, want, "n = {n}");
    }
}

#[test]
fn starting_precision_does_not_change_the_density() {
    let p = p3();
    let l = EmbeddedLattice::diagonal(p, &[1, 1]);
    let m = unit_lattice(p, 2);
    assert_eq!(base_precision(&l), 2);
    let low = den_oracle(&m, &l).unwrap();
    let high = den_oracle_from(&m, &l, 3).unwrap();
    assert!(low.stabilized && high.stabilized);
    assert_eq!(low.normalized, high.normalized);
}

#[test]
fn both_counters_agree() {
    let p = p3();
    for (m, l, n) in [(vec![0, 0], vec![2], 2), (vec![0, 1], vec![1], 2), (vec![0, 0, 0], vec![0, 1], 1)] {
        let (m, l) = (EmbeddedLattice::diagonal(p, &m), EmbeddedLattice::diagonal(p, &l));
        assert_eq!(count_rep(&m, &l, n).unwrap(), count_rep_dfs(&m, &l, n).unwrap());
    }
}

#[test]
fn counted_ratio_matches_the_siegel_series() {
    let p = p3();
    for inv in [vec![1], vec![2], vec![0, 1]] {
        let l = EmbeddedLattice::diagonal(p, &inv);
        let d = den_poly(&l).unwrap();
        for k in 0..=1usize {
            let (v, stable) = siegel_ratio(&l, k).unwrap();
            assert!(stable);
            assert_eq!(v, d.eval(&rat(-3, 1).pow(-(k as i32))), "{inv:?} k = {k}");
        }
    }
}
