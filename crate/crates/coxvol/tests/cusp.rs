use coxvol::boundary::projective_distance;
use coxvol::chamber::{apply_word, reflect};
use coxvol::cusp::*;
use coxvol::lattice::LatticeVector;
use coxvol::scalar::{BigFloat, Exact, Rational, Scalar};
use coxvol::word::Word;
use coxvol::Error;

type V = LatticeVector<Rational>;

fn q(n: i64, d: u64) -> Rational {
    Rational::from_parts(n.into(), d.into())
}

#[test]
fn height_examples() {
    let c = CuspId::new(0, 1, 3).unwrap();
    let u = V::u(&Exact, 3).unwrap();
    let h = height(c, &u).unwrap().to_f64();
    assert!((h - 0.5f64.sqrt()).abs() < 1e-15);
    assert_eq!(height_sq(c, &u).unwrap(), q(1, 2));
    assert_eq!(height_sq(c, &u.scale(&Rational::from(7))).unwrap(), q(1, 2));

    let (p, r) = (V::omega_hat(&Exact, 3, 0, 1).unwrap(), V::omega_hat(&Exact, 3, 0, 2).unwrap());
    let mut prev = 0.0;
    for e in 1..20 {
        let x = p.add_scaled(&q(1, 1 << e), &r).unwrap();
        let h = height(c, &x).unwrap().to_f64();
        assert!(h > prev);
        prev = h;
    }
    assert!(prev > 500.0);

    assert!(matches!(height(c, &V::omega(&Exact, 3, 0).unwrap()), Err(Error::NonTimelike)));
    assert!(matches!(CuspId::new(2, 2, 3), Err(Error::InvalidCusp { .. })));
}

#[test]
fn horoball_examples() {
    let c = CuspId::new(0, 1, 3).unwrap();
    let u = V::u(&Exact, 3).unwrap();
    assert!(!in_horoball(c, &u, &Rational::ONE).unwrap());
    // Ht(ω_{0̂1} + u/7) = 2 exactly; the level set belongs to the horoball.
    let x = V::omega_hat(&Exact, 3, 0, 1).unwrap().add_scaled(&q(1, 7), &u).unwrap();
    assert_eq!(height_sq(c, &x).unwrap(), Rational::from(4));
    assert!(in_horoball(c, &x, &Rational::from(2)).unwrap());
    assert!(!in_horoball(c, &x, &q(2_000_001, 1_000_000)).unwrap());
    assert!(in_horoball(c, &x, &Rational::ONE).unwrap());
}

#[test]
fn reparametrization_examples() {
    let bits = 256;
    let one = BigFloat::one(&bits);
    let t = s_to_t(&one).unwrap().to_f64();
    assert!((t - 0.5 * 2f64.ln()).abs() < 1e-15);
    for s in ["0.001", "1", "7.5", "1e-30"] {
        let s = BigFloat::parse(&bits, s).unwrap();
        let back = t_to_s(&s_to_t(&s).unwrap()).unwrap();
        let rel = ((back - s.clone()) / s).abs();
        assert!(rel < BigFloat::parse(&bits, "1e-70").unwrap());
    }
    let s = BigFloat::parse(&bits, "1").unwrap() / BigFloat::from_i64(&bits, 1 << 40);
    let ratio = s_to_t(&s).unwrap().to_f64() / (-0.5 * s.ln());
    assert!((ratio - 1.0).abs() < 1e-11);
    assert!((s_to_t_f64(&s) - s_to_t(&s).unwrap().to_f64()).abs() < 1e-14);
    assert!(s_to_t(&BigFloat::zero(&bits)).is_err());
}

#[test]
fn phi_proxy_examples() {
    for n in 3..=6 {
        let u = V::u(&Exact, n).unwrap();
        assert!((phi_proxy(&u).unwrap() - calibration_offset(n)).abs() < 1e-14);
    }
    let x = V::from_ints(&Exact, &[2, 3, 1, 5]).unwrap();
    let w = Word::from_letters([0, 2, 1, 3, 0, 1]);
    let moved = apply_word(&w, &x).unwrap();
    assert!((phi_proxy(&moved).unwrap() - phi_proxy(&x).unwrap()).abs() < 1e-12);

    // A pure cusp ray climbs at unit speed in t.
    let p = V::omega_hat(&Exact, 3, 0, 1).unwrap();
    let u = V::u(&Exact, 3).unwrap();
    let (mut ts, mut phis) = (Vec::new(), Vec::new());
    for k in 10..=40 {
        let s = q(1, 1) / Rational::from(dashu::integer::IBig::from(2).pow(k));
        let a = p.add_scaled(&s, &u).unwrap();
        ts.push(s_to_t_f64(&s));
        phis.push(phi_proxy(&a).unwrap());
    }
    let slope = coxvol::asymptotics::ols_slope(&ts, &phis).unwrap();
    assert!((slope - 1.0).abs() < 0.01, "slope {slope}");
}

#[test]
fn excursion_examples() {
    let c = CuspId::new(1, 3, 3).unwrap();
    let v = V::from_ints(&Exact, &[1, 2, 3, 4]).unwrap();
    let once = apply_word(&excursion_word(c, 1), &v).unwrap();
    assert_eq!(once, reflect(1, &reflect(3, &v).unwrap()).unwrap());

    let u = V::u(&Exact, 3).unwrap();
    let p = c.vector::<Rational>(&Exact, 3).unwrap();
    let mut prev: Option<Rational> = None;
    for k in [1u64, 2, 5, 30, 1000, 1_000_000] {
        let d = projective_distance(&apply_word(&excursion_word(c, k), &u).unwrap(), &p).unwrap();
        if let Some(pd) = &prev {
            assert!(d < *pd);
        }
        prev = Some(d);
    }

    // Deepest φ along the geodesic [u, (ij)^k u] grows like log k in this normalization.
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for k in [8u64, 64, 512, 4096] {
        let end = apply_word(&excursion_word(c, k), &u).unwrap();
        let (end, start) = (normalize_u_slice(&end), normalize_u_slice(&u));
        let mut best = f64::MIN;
        // In the projective slice the deep part sits close to the far end.
        for j in 1..48 {
            let lam = Rational::ONE - Rational::ONE / Rational::from(dashu::integer::IBig::from(2).pow(j / 2) * dashu::integer::IBig::from(2 + j % 2));
            let x = start.scale(&(Rational::ONE - lam.clone())).add_scaled(&lam, &end).unwrap();
            best = best.max(phi_proxy(&x).unwrap());
        }
        xs.push((k as f64).ln());
        ys.push(best);
    }
    let slope = coxvol::asymptotics::ols_slope(&xs, &ys).unwrap();
    assert!((slope - 1.0).abs() < 0.1, "slope {slope}");
}

fn geometric(l: f64, count: usize) -> ExcursionSchedule {
    let gen = ScheduleGenerator { lengths: LengthGenerator::Geometric { l }, count };
    ExcursionSchedule::from_generator(3, vec![0, 1, 2, 3], gen).unwrap()
}

#[test]
fn recurrent_point_examples() {
    let c = CuspId::new(0, 1, 3).unwrap();
    let k = 5000;
    let single = ExcursionSchedule::new(3, vec![0, 1, 2, 3], vec![Excursion { cusp: c, power: k }]).unwrap();
    let rp = build_recurrent_point::<Rational>(&single, 1).unwrap();
    let m = coxvol::boundary::materialize(&rp.spec, &Exact, None).unwrap().vector;
    let d = projective_distance(&m, &c.vector::<Rational>(&Exact, 3).unwrap()).unwrap();
    assert!(d < Rational::from(2) / Rational::from(k), "distance {d}");

    assert!(matches!(ExcursionSchedule::new(3, vec![0, 1, 2, 3], vec![]), Err(Error::InvalidSchedule(_))));
    assert!(matches!(ExcursionSchedule::new(3, vec![0, 1], vec![Excursion { cusp: c, power: 9 }]), Err(Error::InvalidSchedule(_))));
    assert!(matches!(ExcursionSchedule::new(3, vec![0, 1, 2, 3], vec![Excursion { cusp: c, power: 2 }]), Err(Error::InvalidSchedule(_))));
    let far = CuspId::new(2, 3, 3).unwrap();
    let jump = vec![Excursion { cusp: c, power: 9 }, Excursion { cusp: far, power: 9 }];
    assert!(matches!(ExcursionSchedule::new(3, vec![0, 1, 2, 3], jump), Err(Error::InvalidSchedule(_))));

    let rp = build_recurrent_point::<Rational>(&geometric(3.0, 6), 6).unwrap();
    let inc = &rp.certificate.ln_increments;
    assert_eq!(inc.len(), 6);
    assert!(rp.certificate.decay_rate.unwrap() < 1.0);
    for w in inc[1..].windows(2) {
        assert!(w[1] < w[0] - 10f64.ln(), "{inc:?}");
    }
}

#[test]
fn schedule_word_is_reduced() {
    let s = geometric(2.0, 5);
    for d in 1..=5 {
        let w = s.word(d);
        let total: u64 = s.excursions[..d].iter().map(|e| 2 * e.power).sum();
        assert_eq!(w.len(), total);
    }
    let powers: Vec<u64> = s.excursions.iter().map(|e| e.power).collect();
    assert_eq!(powers[..3], [7, 55, 2981]);
}

#[test]
fn delta_targets() {
    assert_eq!(delta_inf_target(&Rational::from(3), 3).unwrap(), q(5, 4));
    assert_eq!(delta_inf_target(&Rational::from(2), 4).unwrap(), q(5, 3));
    assert_eq!(limsup_ratio(&Rational::from(3)).unwrap(), q(1, 2));
    let near = Scalar::to_f64(&delta_inf_target(&q(1_000_001, 1_000_000), 5).unwrap());
    assert!((near - 2.5).abs() < 1e-5);
    assert!(limsup_ratio(&Rational::ONE).is_err());
    let l = solve_l_for_delta(1.25, 3, 1e-12).unwrap();
    assert!((l - 3.0).abs() < 1e-9, "L = {l}");
    assert!(solve_l_for_delta(1.0, 3, 1e-12).is_err());
    assert!(solve_l_for_delta(1.5, 3, 1e-12).is_err());
}
