use coxvol::chamber::apply_word;
use coxvol::lattice::LatticeVector;
use coxvol::scalar::{Exact, Rational};
use coxvol::volume::{h0_nef_big, sandwich_constant, top_intersection, vol_k, volume};
use coxvol::word::Word;
use coxvol::Error;
use dashu::integer::IBig;

type V = LatticeVector<Rational>;

fn v(xs: &[i64]) -> V {
    V::from_ints(&Exact, xs).unwrap()
}
fn q(x: i64) -> Rational {
    Rational::from(x)
}

#[test]
fn vol_k_examples() {
    assert_eq!(vol_k(&v(&[1, 2, 3, 4]), 0).unwrap(), q(1));
    assert_eq!(vol_k(&v(&[1, 2, 3, 4]), 3).unwrap(), q(50));
    let moved = apply_word(&Word::from_letters([0, 1, 2]), &v(&[1, 2, 3, 4])).unwrap();
    assert_eq!(vol_k(&moved, 3).unwrap(), q(50));
}

#[test]
fn top_intersection_examples() {
    assert_eq!(top_intersection(&v(&[1, 1, 1, 1])).unwrap(), q(48));
    assert_eq!(top_intersection(&V::omega(&Exact, 3, 0).unwrap()).unwrap(), q(0));
    assert_eq!(top_intersection(&v(&[1, 1, 1, 0])).unwrap(), q(12));
    assert!(matches!(top_intersection(&v(&[-1, 1, 1, 1])), Err(Error::NotNef)));
}

#[test]
fn volume_examples() {
    assert_eq!(volume(&v(&[1, 1, 1, 1])).unwrap(), q(48));
    let moved = apply_word(&Word::from_letters([3, 1, 0, 2, 1]), &v(&[1, 1, 1, 1])).unwrap();
    assert_eq!(volume(&moved).unwrap(), q(48));
    // τ_3(1,1,2,2) = 2 + 2 + 4 + 4 = 12, so 2·3!·12.
    assert_eq!(volume(&v(&[1, 1, 2, 2])).unwrap(), q(144));
    let g = coxvol::oracle::SquareFreePoly::linear(v(&[1, 1, 2, 2]).coords()).unwrap();
    let g3 = coxvol::oracle::poly_mul(&coxvol::oracle::poly_mul(&g, &g).unwrap(), &g).unwrap();
    assert_eq!(coxvol::oracle::integrate(&g3), q(144));
}

#[test]
fn h0_examples() {
    assert_eq!(h0_nef_big(&v(&[1, 1, 1, 1])).unwrap(), IBig::from(16));
    assert_eq!(h0_nef_big(&v(&[1, 1, 1, 0])).unwrap(), IBig::from(8));
    assert_eq!(h0_nef_big(&v(&[2, 2, 2, 2])).unwrap(), IBig::from(80));
    assert!(matches!(h0_nef_big(&v(&[1, 1, 0, 0])), Err(Error::NotBig { zeros: 2 })));
    let half = V::new(vec![q(1), q(1), q(1), Rational::from_parts(1.into(), 2u8.into())]).unwrap();
    assert!(matches!(h0_nef_big(&half), Err(Error::NotIntegral)));
}

#[test]
fn sandwich_constants() {
    assert_eq!(sandwich_constant(3).unwrap(), IBig::from(5));
    assert_eq!(sandwich_constant(4).unwrap(), IBig::from(12));
    assert_eq!(sandwich_constant(5).unwrap(), IBig::from(27));
}
