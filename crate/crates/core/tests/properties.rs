use gaussian_hellinger::affinity;
use gaussian_hellinger::discord::{self, ProductStateParams};
use gaussian_hellinger::sampling;
use gaussian_hellinger::states::{GaussianState, StsParams};
use gaussian_hellinger::symplectic::{self, StandardForm};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn physical_form() -> impl Strategy<Value = StandardForm> {
    (0.5..5.0f64, 0.5..5.0f64, 0.0..1.0f64, -1.0..=1.0f64)
        .prop_map(|(b1, b2, cf, df)| {
            let c = cf * (b1 * b2).sqrt();
            StandardForm::new(b1, b2, c, df * c)
        })
        .prop_filter("physical", |sf| matches!(sf.spectrum(), Ok((_, k2)) if k2 > 0.5 + 1e-9))
}

fn product_params() -> impl Strategy<Value = ProductStateParams> {
    (
        0.5..6.0f64,
        0.5..6.0f64,
        -1.5..1.5f64,
        -1.5..1.5f64,
        -3.1..3.1f64,
        -3.1..3.1f64,
    )
        .prop_map(|(e1, e2, r1, r2, p1, p2)| ProductStateParams::centered(e1, e2, r1, r2, p1, p2))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn discord_lies_in_unit_interval(sf in physical_form()) {
        let d = discord::hellinger_discord(&sf.to_cm()).unwrap();
        prop_assert!((0.0..1.0).contains(&d));
    }

    #[test]
    fn discord_invariant_under_local_symplectics(sf in physical_form(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = sampling::random_local_symplectic(&mut rng, 2, 1.0);
        let v = sf.to_cm();
        let moved = v.congruence(&s).unwrap();
        let (a, b) = (discord::hellinger_discord(&v).unwrap(), discord::hellinger_discord(&moved).unwrap());
        prop_assert!((a - b).abs() < 1e-9, "{a} vs {b}");
    }

    #[test]
    fn standard_form_recovered_after_local_map(sf in physical_form(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = sampling::random_local_symplectic(&mut rng, 2, 1.0);
        let back = symplectic::standard_form(&sf.to_cm().congruence(&s).unwrap()).unwrap();
        prop_assert!(back.unscaled().max_abs_diff(&sf) < 1e-8, "{back:?} vs {sf:?}");
    }

    #[test]
    fn square_root_round_trip(sf in physical_form()) {
        let v = sf.to_cm();
        let back = symplectic::cm_from_square_root(&symplectic::square_root_cm(&v).unwrap()).unwrap();
        prop_assert!(back.max_abs_diff(&v) < 1e-9 * v.matrix().amax().max(1.0));
    }

    #[test]
    fn no_product_state_beats_closed_form(sf in physical_form(), p in product_params()) {
        let rho = GaussianState::centered(sf.to_cm()).unwrap();
        let sigma = p.to_state().unwrap();
        let a = affinity::affinity(&rho, &sigma).unwrap().value;
        prop_assert!(a <= discord::max_affinity(&sf.to_cm()).unwrap() + 1e-12);
    }

    #[test]
    fn closest_product_attains_maximum(sf in physical_form(), mean in prop::array::uniform4(-2.0..2.0f64)) {
        let rho = GaussianState::new(mean.to_vec(), sf.to_cm()).unwrap();
        let cp = discord::closest_product_state(rho.cm(), &mean).unwrap();
        let a = affinity::affinity(&rho, &cp.state).unwrap().value;
        prop_assert!((a - cp.max_affinity).abs() < 1e-9, "{a} vs {}", cp.max_affinity);
        prop_assert!(cp.state.cm().block(0, 1).amax() < 1e-12);
    }

    #[test]
    fn affinity_symmetric_and_bounded(s1 in any::<u64>(), modes in 1usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(s1);
        let a = GaussianState::new(sampling::random_mean(&mut rng, modes, 1.0), sampling::random_covariance(&mut rng, modes, 4.0, 0.6)).unwrap();
        let b = GaussianState::new(sampling::random_mean(&mut rng, modes, 1.0), sampling::random_covariance(&mut rng, modes, 4.0, 0.6)).unwrap();
        let ab = affinity::affinity(&a, &b).unwrap().value;
        let ba = affinity::affinity(&b, &a).unwrap().value;
        prop_assert!((ab - ba).abs() < 1e-12);
        prop_assert!(ab > 0.0 && ab <= 1.0);
        let d = affinity::hellinger_distance(&a, &b).unwrap();
        prop_assert!((0.0..=2f64.sqrt()).contains(&d));
    }

    #[test]
    fn sts_discord_increases_with_squeezing(n1 in 0.0..10.0f64, n2 in 0.0..10.0f64, r in 0.01..2.5f64) {
        let lo = discord::hellinger_discord_sts(&StsParams::new(n1, n2, r)).unwrap();
        let hi = discord::hellinger_discord_sts(&StsParams::new(n1, n2, r * 1.05)).unwrap();
        prop_assert!(hi > lo);
    }

    #[test]
    fn entropic_measures_are_ordered(b in 0.5..6.0f64, cf in 0.0..1.0f64, sign in prop::bool::ANY) {
        let c = cf * (b - 0.5);
        let v = StandardForm::symmetric(b, c, if sign { c } else { -c }).to_cm();
        let mi = discord::mutual_information(&v).unwrap();
        let e = discord::entropic_discord(&v).unwrap();
        let j = discord::classical_correlations(&v).unwrap();
        prop_assert!(e >= -1e-12 && j >= -1e-12);
        prop_assert!((mi - e - j).abs() < 1e-9);
    }
}
