use coxvol::lattice::LatticeVector;
use coxvol::oracle::{brute_force_reduce, chi_oracle, integrate, poly_exp_truncated, poly_mul, todd_class, SquareFreePoly};
use coxvol::scalar::{factorial, Exact, Rational};
use dashu::integer::IBig;

type V = LatticeVector<Rational>;

#[test]
fn ring_examples() {
    let w0 = SquareFreePoly::monomial(3, 1).unwrap();
    assert!(poly_mul(&w0, &w0).unwrap().is_zero());
    let one = SquareFreePoly::constant(3, Rational::ONE).unwrap();
    let a = one.add(&w0);
    let b = one.add(&SquareFreePoly::monomial(3, 2).unwrap());
    let ab = poly_mul(&a, &b).unwrap();
    for mask in 0..16 {
        let expect = if mask < 4 { Rational::ONE } else { Rational::ZERO };
        assert_eq!(ab.coeff(mask), &expect);
    }
}

#[test]
fn sigma_powers() {
    for n in 2..=5 {
        let s1 = SquareFreePoly::sigma(n, 1).unwrap();
        let mut pow = SquareFreePoly::constant(n, Rational::ONE).unwrap();
        for p in 1..=n + 1 {
            pow = poly_mul(&pow, &s1).unwrap();
            let scaled = pow.scale(&(Rational::ONE / Rational::from(factorial(p))));
            assert_eq!(scaled, SquareFreePoly::sigma(n, p).unwrap());
        }
    }
}

#[test]
fn todd_components() {
    for n in 2..=6 {
        let td = todd_class(n).unwrap();
        assert_eq!(td.coeff(0), &Rational::ONE);
        assert_eq!(td.component(2), SquareFreePoly::sigma(n, 2).unwrap().scale(&Rational::from_parts(1.into(), 3u8.into())));
        for d in (1..=n + 1).step_by(2) {
            assert!(td.component(d).is_zero());
        }
    }
}

#[test]
fn integrate_examples() {
    for n in 2..=6 {
        let top = SquareFreePoly::monomial(n, (1 << n) - 1).unwrap();
        assert_eq!(integrate(&top), Rational::from(2));
        let all = SquareFreePoly::monomial(n, (1 << (n + 1)) - 1).unwrap();
        assert_eq!(integrate(&all), Rational::ZERO);
        assert_eq!(integrate(&SquareFreePoly::sigma(n, n).unwrap()), Rational::from(2 * (n as i64 + 1)));
        let s1n = (0..n).fold(SquareFreePoly::constant(n, Rational::ONE).unwrap(), |acc, _| {
            poly_mul(&acc, &SquareFreePoly::sigma(n, 1).unwrap()).unwrap()
        });
        assert_eq!(integrate(&s1n) / Rational::from(factorial(n)), Rational::from(2 * (n as i64 + 1)));
    }
}

#[test]
fn exp_is_truncated() {
    let lin = SquareFreePoly::linear(&[Rational::ONE, Rational::from(2), Rational::from(3)]).unwrap();
    let e = poly_exp_truncated(&lin, 1).unwrap();
    assert!(e.component(2).is_zero());
    assert_eq!(e.coeff(0), &Rational::ONE);
}

#[test]
fn chi_examples() {
    let u3 = V::u(&Exact, 3).unwrap();
    assert_eq!(chi_oracle(&u3).unwrap(), IBig::from(16));
    assert_eq!(chi_oracle(&V::zero(&Exact, 4).unwrap()).unwrap(), IBig::from(2));
    assert_eq!(chi_oracle(&V::zero(&Exact, 3).unwrap()).unwrap(), IBig::ZERO);
}

#[test]
fn bfs_examples() {
    let u = V::u(&Exact, 3).unwrap();
    assert!(brute_force_reduce(&u, 4).unwrap().word.is_empty());
    let x = V::from_ints(&Exact, &[-1, 3, 3, 3]).unwrap();
    let r = brute_force_reduce(&x, 4).unwrap();
    assert_eq!(r.reduced, u);
    assert_eq!(r.word.len(), 1);
}
