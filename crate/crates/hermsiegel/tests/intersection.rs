use num_bigint::BigInt;

use hermsiegel::density::{den_central, derived_den_lambda, Poly};
use hermsiegel::kr::{int_almost_selfdual, int_prime, int_selfdual};
use hermsiegel::lattice::{EmbeddedLattice, SpaceKind};
use hermsiegel::ring::{FieldParams, Rational};

fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `Den(X, <p>^3)` counted by hand: the lattice itself (type 3) and one
/// type 1 overlattice per isotropic line of the residue hermitian space,
/// of which there are `q^3 + 1`.
fn den_type3_by_hand(q: i64) -> Poly {
    let m3 = &(&Poly::from_ints([1, -1]) * &Poly::from_ints([1, q])) * &Poly::from_ints([1, -q * q]);
    let lines = &Poly::from_ints([0, 0, q * q * q + 1]) * &Poly::from_ints([1, -1]);
    &m3 + &lines
}

#[test]
fn int_prime_of_the_minuscule_plane_is_one_minus_q() {
    for p in [3u64, 5, 7] {
        let params = FieldParams::new(p).unwrap();
        let q = p as i64;
        let l = EmbeddedLattice::in_standard_space(params, SpaceKind::Split, &[1, 1]).unwrap();
        let hand = -den_type3_by_hand(q).derivative().eval(&int(1));
        assert_eq!(hand, int((1 + q) * (2 - q)));
        assert_eq!(derived_den_lambda(&l).unwrap(), hand);
        // Self-dual overlattices of the plane: the q + 1 isotropic lines.
        assert_eq!(den_central(&l).unwrap(), int(q + 1));
        assert_eq!(int_prime(&l).unwrap().value, int(1 - q));
        assert_eq!(int_almost_selfdual(&l).unwrap().value, int(2 - q));
    }
}

#[test]
fn rank_one_values() {
    let params = FieldParams::new(3).unwrap();
    for k in 0..=3i64 {
        let even = EmbeddedLattice::in_standard_space(params, SpaceKind::Split, &[2 * k]).unwrap();
        assert_eq!(int_prime(&even).unwrap().value, int(k));
        assert_eq!(derived_den_lambda(&even).unwrap(), int(1 + 4 * k));
        let odd = EmbeddedLattice::in_standard_space(params, SpaceKind::Nonsplit, &[2 * k + 1]).unwrap();
        assert_eq!(int_selfdual(&odd).unwrap().value, int(k + 1));
    }
}
