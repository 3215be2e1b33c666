mod common;

use common::*;
use logsurf::numerics::{integrate_form, laurent_residue_exact, ExpForm, Laurent};
use logsurf::skeleton::{betti, finite_completion, ramification_census, skeleton};
use logsurf::{validate, Complex64, Order, SheetComplex, SurfaceDoc};
use num_rational::BigRational;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rational() -> impl Strategy<Value = BigRational> {
    (-20i64..20, 1i64..12).prop_map(|(p, q)| BigRational::new(p.into(), q.into()))
}

fn laurent(low: i64) -> impl Strategy<Value = Laurent<BigRational>> {
    prop::collection::vec(rational(), 1..6).prop_map(move |c| Laurent::new(low, c))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn covers_validate_and_census_matches_monodromy(seed in any::<u64>(), d in 2usize..5, r in 1usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (c, oracle) = random_cover(&mut rng, d, r);
        prop_assert!(validate(&c).ok);
        let census = ramification_census(&skeleton(&c).unwrap()).unwrap();
        for (id, order) in &census {
            let want = c.rams()[c.ram_index(id).unwrap()].order;
            prop_assert_eq!(*order, want);
        }
        let covers = classified_lifts(&c).periodic;
        let mut inf: Vec<u64> = oracle.at_infinity.iter().map(|&x| x as u64).collect();
        inf.sort();
        prop_assert_eq!(covers, inf);
        prop_assert_eq!(oracle.sheets, d);
    }

    #[test]
    fn document_round_trip(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (c, _, _) = random_model(&mut rng);
        let json = c.to_doc().to_json();
        let back = SheetComplex::from_doc(&SurfaceDoc::from_json(&json).unwrap()).unwrap();
        prop_assert_eq!(back.to_doc().to_json(), json);
    }

    #[test]
    fn completion_removes_exactly_the_finite_cycles(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (c, _, _) = random_model(&mut rng);
        let s = skeleton(&c).unwrap();
        let finite = c.rams().iter().filter(|r| matches!(r.order, Order::Finite(_))).count();
        prop_assert_eq!(betti(&s), betti(&finite_completion(&s).unwrap()) + finite);
    }

    #[test]
    fn residue_is_linear(a in laurent(-4), b in laurent(-6), p in laurent(1), s in rational()) {
        let lhs = laurent_residue_exact(&(&a + &b.scale(&s)), &p).unwrap();
        let rhs = laurent_residue_exact(&a, &p).unwrap() + s * laurent_residue_exact(&b, &p).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn homotopic_paths_agree(re in -1.5f64..1.5, im in -1.5f64..1.5, via in -1.5f64..1.5) {
        let f = ExpForm::new(Laurent::parse("1,0.5;0,-1").unwrap(), Laurent::parse("0,0.5,0,-0.2").unwrap()).unwrap();
        let (a, b) = (Complex64::new(0.2, -0.1), Complex64::new(re, im));
        let straight = integrate_form(&f, &[a, b], 1e-11).unwrap();
        let bent = integrate_form(&f, &[a, Complex64::new(via, -via), b], 1e-11).unwrap();
        let scale = straight.value.norm().max(1.0);
        prop_assert!((straight.value - bent.value).norm() <= straight.est_error + bent.est_error + 1e-12 * scale);
    }
}
