use proptest::prelude::*;
use quasinv::channels::{compose, kraus_to_affine, random_channel, unitary_to_affine, validate_cptp, BlochState, UnitaryParams};
use quasinv::inverter::{build_q, build_q_for_region, delta_mstd_direct, quasi_inverse};
use quasinv::metrics::{mstd_analytic, mstd_surface_analytic, trace_distance, Region};
use quasinv::numerics::{dot3, RngStream};
use quasinv::AffineChannel;

fn channel(seed: u64, n_kraus: usize) -> AffineChannel {
    kraus_to_affine(&random_channel(&mut RngStream::new(seed), n_kraus).unwrap()).unwrap()
}

fn unitary(seed: u64) -> UnitaryParams {
    UnitaryParams::from_vec4(&RngStream::new(seed).sample_sphere4()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn random_channels_are_cptp(seed in any::<u64>(), k in 1usize..=4) {
        let e = channel(seed, k);
        prop_assert!(validate_cptp(&e).unwrap().passed);
    }

    #[test]
    fn q_is_traceless_in_the_first_slot(seed in any::<u64>(), k in 1usize..=4) {
        let q = build_q(&channel(seed, k));
        prop_assert_eq!(q.matrix().get(0, 0), 0.0);
    }

    #[test]
    fn quadratic_form_matches_direct_delta(seed in any::<u64>(), useed in any::<u64>(), k in 1usize..=4) {
        let e = channel(seed, k);
        let u = unitary(useed);
        let d = build_q(&e).delta(&u.as_vec4());
        prop_assert!((d - delta_mstd_direct(&e, &u)).abs() < 1e-12);
    }

    #[test]
    fn solver_beats_every_unitary(seed in any::<u64>(), useed in any::<u64>(), k in 1usize..=4) {
        let e = channel(seed, k);
        let r = quasi_inverse(&e).unwrap();
        prop_assert!(r.lambda_max >= -1e-12);
        prop_assert!(delta_mstd_direct(&e, &unitary(useed)) <= r.delta_mstd + 1e-12);
        prop_assert!(r.mstd_after <= r.mstd_before + 1e-12);
    }

    #[test]
    fn surface_q_is_scaled_ball_q(seed in any::<u64>(), k in 1usize..=4) {
        let e = channel(seed, k);
        let ball = build_q(&e).matrix().scale(5.0 / 3.0);
        let surface = *build_q_for_region(&e, Region::Surface).matrix();
        prop_assert!(surface.max_abs_diff(&ball) < 1e-12);
    }

    #[test]
    fn unitaries_keep_the_offset_term(seed in any::<u64>(), useed in any::<u64>(), k in 1usize..=4) {
        let e = channel(seed, k);
        let ve = compose(&unitary_to_affine(&unitary(useed)), &e);
        prop_assert!((dot3(ve.c(), ve.c()) - dot3(e.c(), e.c())).abs() < 1e-12);
    }

    #[test]
    fn composition_is_associative(a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
        let (x, y, z) = (channel(a, 2), channel(b, 3), channel(c, 4));
        let left = compose(&compose(&z, &y), &x);
        let right = compose(&z, &compose(&y, &x));
        prop_assert!(left.m().max_abs_diff(right.m()) < 1e-12);
        for i in 0..3 {
            prop_assert!((left.c()[i] - right.c()[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn surface_mstd_dominates_ball_for_unital_part(seed in any::<u64>(), k in 1usize..=4) {
        let e = channel(seed, k);
        let offset = 0.25 * dot3(e.c(), e.c());
        prop_assert!(mstd_surface_analytic(&e).value - offset >= mstd_analytic(&e).value - offset - 1e-15);
    }

    #[test]
    fn trace_distance_triangle(s in any::<u64>()) {
        let mut rng = RngStream::new(s);
        let [a, b, c] = [(); 3].map(|_| BlochState::new(rng.sample_ball()).unwrap());
        prop_assert!(trace_distance(&a, &c) <= trace_distance(&a, &b) + trace_distance(&b, &c) + 1e-15);
        prop_assert!((trace_distance(&a, &b) - trace_distance(&b, &a)).abs() == 0.0);
    }
}
