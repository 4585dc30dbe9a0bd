//! Cross-route oracle checks: every closed form the library leans on is
//! re-derived here through an independent computation and compared on
//! grids.

use approx::assert_relative_eq;
use num_complex::Complex64;
use seqbell_core::bell;
use seqbell_core::qstate::{
    apply_kraus_bob, branch_angle_stable, expectation, make_state, schmidt, BlochObservable,
    KrausPair, Outcome, TwoQubitState,
};
use std::f64::consts::{FRAC_PI_4, FRAC_PI_8};

/// Schmidt angle through the reduced density operator: the smaller
/// eigenvalue of ρ_A = ΨΨ† is sin²θ, computed here from trace and
/// determinant only — no singular vectors, no stable rewrite.
fn schmidt_angle_by_reduced_density(state: &TwoQubitState) -> f64 {
    let a = state.amps();
    // ρ_A entries from the amplitude matrix m: ρ = m m†.
    let m = [[a[0], a[1]], [a[2], a[3]]];
    let r00 = (m[0][0] * m[0][0].conj() + m[0][1] * m[0][1].conj()).re;
    let r11 = (m[1][0] * m[1][0].conj() + m[1][1] * m[1][1].conj()).re;
    let r01 = m[0][0] * m[1][0].conj() + m[0][1] * m[1][1].conj();
    let trace = r00 + r11;
    let det = r00 * r11 - r01.norm_sqr();
    let disc = (trace * trace - 4.0 * det).max(0.0).sqrt();
    let lam_min = ((trace - disc) / 2.0).max(0.0);
    lam_min.sqrt().asin()
}

fn weak_post_state(theta: f64, xi: f64, outcome: Outcome) -> TwoQubitState {
    let state = make_state(theta).unwrap();
    let kraus = KrausPair::new(xi).unwrap();
    apply_kraus_bob(&state, &kraus, outcome).unwrap().0
}

#[test]
fn stable_branch_angle_agrees_with_svd_route_on_a_50x50_grid() {
    let lo = 1e-4;
    let hi = FRAC_PI_4;
    for i in 0..50 {
        let theta = lo + (hi - lo) * i as f64 / 49.0;
        for j in 0..50 {
            let xi = lo + (hi - lo) * j as f64 / 49.0;
            let expected = branch_angle_stable(theta, xi);
            for outcome in Outcome::BOTH {
                let post = weak_post_state(theta, xi, outcome);
                let svd = schmidt(&post).theta;
                assert!(
                    (svd - expected).abs() < 1e-12,
                    "theta = {theta}, xi = {xi}: svd {svd} vs stable {expected}"
                );
            }
        }
    }
}

#[test]
fn both_angle_routes_agree_with_the_reduced_density_oracle() {
    for i in 1..=20 {
        let theta = FRAC_PI_4 * i as f64 / 20.0;
        for j in 1..=20 {
            let xi = FRAC_PI_4 * j as f64 / 20.0;
            let post = weak_post_state(theta, xi, Outcome::Plus);
            let oracle = schmidt_angle_by_reduced_density(&post);
            assert!((schmidt(&post).theta - oracle).abs() < 1e-10);
            assert!((branch_angle_stable(theta, xi) - oracle).abs() < 1e-10);
        }
    }
}

#[test]
fn branch_angle_is_monotone_in_strength_and_bounded_by_theta() {
    for i in 1..=25 {
        let theta = FRAC_PI_4 * i as f64 / 25.0;
        let mut last = 0.0;
        for j in 0..=25 {
            let xi = FRAC_PI_4 * j as f64 / 25.0;
            let angle = branch_angle_stable(theta, xi);
            assert!(angle + 1e-15 >= last, "not monotone at ({theta}, {xi})");
            assert!(angle <= theta + 1e-12);
            last = angle;
        }
        // Non-interacting endpoint keeps the full angle.
        assert_relative_eq!(last, theta, epsilon = 1e-12);
    }
}

#[test]
fn entanglement_retention_and_destruction_endpoints() {
    for i in 1..=10 {
        let theta = FRAC_PI_4 * i as f64 / 10.0;
        assert_eq!(branch_angle_stable(theta, 0.0), 0.0);
        for j in 1..=10 {
            let xi = FRAC_PI_4 * j as f64 / 10.0;
            assert!(branch_angle_stable(theta, xi) > 0.0);
        }
    }
}

/// The weak measurement's effective observable is cos(2ξ)σ_x; verify the
/// probability identity behind it by direct matrix evaluation over a grid.
#[test]
fn weak_outcome_probabilities_by_direct_matrix_evaluation() {
    for i in 0..=12 {
        let theta = std::f64::consts::FRAC_PI_2 * i as f64 / 12.0;
        for j in 0..=12 {
            let xi = FRAC_PI_4 * j as f64 / 12.0;
            let state = make_state(theta).unwrap();
            let kraus = KrausPair::new(xi).unwrap();
            let (_, p_plus) = apply_kraus_bob(&state, &kraus, Outcome::Plus).unwrap();
            let (_, p_minus) = apply_kraus_bob(&state, &kraus, Outcome::Minus).unwrap();
            // ⟨E_±⟩ = (1 ± cos2ξ·⟨σ_x⟩_B)/2 and ⟨σ_x⟩_B = 0 on these states.
            assert!((p_plus - 0.5).abs() < 1e-12);
            assert!((p_minus - 0.5).abs() < 1e-12);
        }
    }
}

#[test]
fn maximal_violation_closed_form_reproduced_from_raw_expectations() {
    // Rebuild I from eight direct expectation values and compare to the
    // closed-form maximum, for the three angles the figures use.
    for theta in [FRAC_PI_4, FRAC_PI_8, FRAC_PI_8 / 2.0] {
        let state = make_state(theta).unwrap();
        let mu = (2.0 * theta).sin().atan();
        let a0 = BlochObservable::from_polar(mu, 0.0);
        let a1 = BlochObservable::from_polar(-mu, 0.0);
        let z = BlochObservable::z();
        let x = BlochObservable::x();
        let beta = bell::beta_of_theta(theta).unwrap();
        let i = beta * expectation(&state, None, Some(&z))
            + expectation(&state, Some(&a0), Some(&z))
            + expectation(&state, Some(&a1), Some(&z))
            + expectation(&state, Some(&a0), Some(&x))
            - expectation(&state, Some(&a1), Some(&x));
        let i_max = 2.0 * 2.0_f64.sqrt() * (1.0 + beta * beta / 4.0).sqrt();
        assert!((i - i_max).abs() < 1e-10, "theta = {theta}");
    }
}

#[test]
fn schmidt_form_of_random_phase_twisted_states() {
    // States with nontrivial complex structure still reconstruct exactly.
    let cases = [
        [0.62, 0.31, -0.44, 0.57],
        [0.9, 0.1, 0.2, 0.38],
        [0.5, -0.5, 0.5, 0.5],
    ];
    let phases = [0.0, 0.7, 2.1, 4.4];
    for raw in cases {
        let mut amps = [Complex64::new(0.0, 0.0); 4];
        let norm: f64 = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
        for (k, (&r, &ph)) in raw.iter().zip(&phases).enumerate() {
            amps[k] = Complex64::from_polar(r / norm, ph);
        }
        let state = TwoQubitState::new(amps).unwrap();
        let form = schmidt(&state);
        assert!(form.theta >= 0.0 && form.theta <= FRAC_PI_4 + 1e-12);
        assert!(form.u_a.unitarity_defect() < 1e-9);
        assert!(form.u_b.unitarity_defect() < 1e-9);
        assert!(form.reconstruct().fidelity(&state) >= 1.0 - 1e-10);
        let oracle = schmidt_angle_by_reduced_density(&state);
        assert!((form.theta - oracle).abs() < 1e-9);
    }
}

#[test]
fn first_step_bound_closed_form_over_xi() {
    // g − 1/2 = √(Δ(2√2 + I))/4 with Δ = 2√2·sin²ξ at maximal entanglement,
    // re-derived here from the correlator route.
    for &xi in &[0.1, 0.05, 0.01, 0.005] {
        let state = make_state(FRAC_PI_4).unwrap();
        let mu = FRAC_PI_4;
        let alice = [
            BlochObservable::from_polar(mu, 0.0),
            BlochObservable::from_polar(-mu, 0.0),
        ];
        let c = bell::correlators_of(
            &state,
            &alice,
            &BlochObservable::z(),
            &KrausPair::new(xi).unwrap(),
        );
        let p = bell::BellParams::chsh();
        let i = bell::bell_value(&c, &p);
        let delta = 2.0 * 2.0_f64.sqrt() * xi.sin().powi(2);
        assert_relative_eq!(i, 2.0 * 2.0_f64.sqrt() - delta, epsilon = 1e-12);
        let g = bell::guessing_bound(i, &p).unwrap().g_upper;
        let expected = 0.5 + (delta * (2.0 * 2.0_f64.sqrt() + i)).sqrt() / 4.0;
        assert_relative_eq!(g, expected, epsilon = 1e-10);
        assert!(g - 0.5 <= xi.sin() + 1e-12);
    }
}

/// The certification walks one canonical representative per level; here a
/// physically evolved branch with a nontrivial Alice unitary must produce
/// the same per-step Bell value and bound through its own bank.
#[test]
fn branch_resolved_statistics_match_the_canonical_certificate() {
    use seqbell_core::bell::{bell_value, beta_of_theta, guessing_bound, BellParams};
    use seqbell_core::sequence::{alice_bank, build_tree, certify, ProtocolConfig};

    let cfg = ProtocolConfig::new(0.5, vec![0.3, 0.25]).unwrap();
    let report = certify(&cfg).unwrap();
    let levels = build_tree(&cfg).unwrap();

    for (step_idx, level) in levels.iter().take(cfg.n()).enumerate() {
        let xi = cfg.xis()[step_idx];
        for branch in level {
            // The branch unitary is generally far from the identity.
            let (a0, a1) = alice_bank(branch).unwrap();
            let c = bell::correlators_of(
                &branch.state(),
                &[a0, a1],
                &BlochObservable::z(),
                &KrausPair::new(xi).unwrap(),
            );
            let p = BellParams::new(1.0, beta_of_theta(branch.theta()).unwrap()).unwrap();
            let i = bell_value(&c, &p);
            let bound = guessing_bound(i, &p).unwrap();
            let expected = &report.per_step[step_idx];
            assert!(
                (i - expected.bell_value).abs() < 1e-10,
                "step {} branch '{}': I = {i} vs {}",
                step_idx + 1,
                branch.history(),
                expected.bell_value
            );
            assert!(
                (bound.g_upper - expected.g_upper).abs() < 1e-9,
                "step {} branch '{}': g = {} vs {}",
                step_idx + 1,
                branch.history(),
                bound.g_upper,
                expected.g_upper
            );
        }
    }
}
