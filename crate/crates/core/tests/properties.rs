use num_complex::Complex64;
use proptest::prelude::*;

use wecp::metrics::{
    analytic_concurrences, concurrence, concurrence_hermitian, numeric_concurrences,
    one_vs_rest_concurrence,
};
use wecp::oracle::{compare, enumerate_round_one};
use wecp::pcm::{apply_pcm, correct_to_even, Parity};
use wecp::protocol::{modes, run_round_one, w_state};
use wecp::statevec::{make_single_photon, Direction, PureState, QubitLabel};
use wecp::{recurse, WCoefficients};

fn labels(names: &[&str]) -> Vec<QubitLabel> {
    names.iter().map(|n| QubitLabel::new(*n)).collect()
}

fn amplitudes(n: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1 << n)
        .prop_filter("nonzero", |v| {
            v.iter().map(|(r, i)| r * r + i * i).sum::<f64>() > 1e-3
        })
        .prop_map(|v| v.into_iter().map(|(r, i)| Complex64::new(r, i)).collect())
}

fn state(names: &'static [&'static str]) -> impl Strategy<Value = PureState> {
    amplitudes(names.len()).prop_map(move |a| PureState::from_amplitudes(labels(names), a).unwrap())
}

/// Coefficients bounded away from zero so every round is well defined.
fn coefficients() -> impl Strategy<Value = WCoefficients> {
    (0.05f64..1.0, 0.05f64..1.0, 0.05f64..1.0)
        .prop_map(|(a, b, c)| WCoefficients::normalized(a, b, c).unwrap())
}

proptest! {
    #[test]
    fn states_are_normalized(s in state(&["x", "y", "z"])) {
        prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn projection_is_complete(s in state(&["x", "y"]), theta in 0.0f64..std::f64::consts::PI) {
        let d = Direction::real(theta.cos(), theta.sin()).unwrap();
        let x = QubitLabel::new("x");
        let p = s.project(&x, &d).unwrap().probability + s.project(&x, &d.orthogonal()).unwrap().probability;
        prop_assert!((p - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tensor_then_reduce_recovers_factor(
        s in state(&["x", "y"]),
        t in state(&["z"]),
    ) {
        let joint = s.tensor(&t).unwrap();
        let back = joint.reduce(&labels(&["x", "y"])).unwrap();
        let direct = s.reduce(&labels(&["x", "y"])).unwrap();
        prop_assert!(back.max_abs_diff(&direct) < 1e-12);
        prop_assert!(back.is_valid());
    }

    #[test]
    fn reduction_ignores_label_order(s in state(&["x", "y", "z"])) {
        let shuffled = s.reorder(&labels(&["z", "x", "y"])).unwrap();
        let keep = labels(&["x", "z"]);
        let a = s.reduce(&keep).unwrap();
        let b = shuffled.reduce(&keep).unwrap();
        prop_assert!(a.max_abs_diff(&b) < 1e-12);
    }

    #[test]
    fn pcm_branches_are_complete(s in state(&["x", "y", "z"])) {
        let (x, z) = (QubitLabel::new("x"), QubitLabel::new("z"));
        let r = apply_pcm(&s, &x, &z).unwrap();
        prop_assert!((r.total_probability() - 1.0).abs() < 1e-12);
        for b in &r.branches {
            if let Some(post) = &b.state {
                let again = apply_pcm(post, &x, &z).unwrap();
                prop_assert!((again.branch(b.parity).probability - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn bit_flip_correction_merges_parities(w in coefficients()) {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let psi = w_state(&w).tensor(&make_single_photon(h, h, modes::A2).unwrap()).unwrap();
        let r = apply_pcm(&psi, &modes::A1, &modes::A2).unwrap();
        prop_assert!((r.even().probability - 0.5).abs() < 1e-12);
        let even = r.even().state.clone().unwrap();
        let odd = correct_to_even(Parity::Odd, r.odd().state.as_ref().unwrap(), &modes::A2).unwrap();
        prop_assert!(even.distance_up_to_phase(&odd).unwrap() < 1e-12);
    }

    #[test]
    fn round_one_matches_enumeration(w in coefficients()) {
        let report = run_round_one(&w).unwrap();
        prop_assert!((report.total_probability() - 1.0).abs() < 1e-12);
        let dev = compare(&enumerate_round_one(&w).unwrap(), &report).unwrap();
        prop_assert!(dev.max() < 1e-12, "{dev:?}");
    }

    #[test]
    fn w_concurrences_match_closed_forms(w in coefficients()) {
        let numeric = numeric_concurrences(&w_state(&w)).unwrap();
        let exact = analytic_concurrences(&w);
        prop_assert!((numeric.c_ab - exact.c_ab).abs() < 1e-10);
        prop_assert!((numeric.c_ac - exact.c_ac).abs() < 1e-10);
        prop_assert!((numeric.c_a_bc - exact.c_a_bc).abs() < 1e-10);
        prop_assert!(numeric.three_tangle <= 1e-9);
    }

    #[test]
    fn concurrence_routes_agree_and_obey_monogamy(s in state(&["x", "y", "z"])) {
        let xy = s.reduce(&labels(&["x", "y"])).unwrap();
        let xz = s.reduce(&labels(&["x", "z"])).unwrap();
        let (c_xy, c_xz) = (concurrence(&xy).unwrap(), concurrence(&xz).unwrap());
        prop_assert!((c_xy - concurrence_hermitian(&xy).unwrap()).abs() < 1e-6);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&c_xy));
        let c_x_rest = one_vs_rest_concurrence(&s, 0).unwrap();
        prop_assert!(c_xy * c_xy + c_xz * c_xz <= c_x_rest * c_x_rest + 1e-9);
    }

    #[test]
    fn recursion_is_monotone_and_conserves_mass(w in coefficients(), depth in 1usize..7) {
        let r = recurse(&w, depth).unwrap();
        prop_assert_eq!(r.success_by_depth.len(), depth);
        for pair in r.success_by_depth.windows(2) {
            prop_assert!(pair[1] >= pair[0]);
        }
        prop_assert!(r.total_success_probability <= 1.0);
        prop_assert!((r.total_success_probability + r.failure_mass() - 1.0).abs() < 1e-10);
    }
}

#[test]
fn parity_checks_are_repeatable_on_basis_states() {
    let h = Complex64::new(1.0, 0.0);
    let z = Complex64::new(0.0, 0.0);
    let x = make_single_photon(h, z, QubitLabel::new("x")).unwrap();
    let y = make_single_photon(z, h, QubitLabel::new("y")).unwrap();
    let r = apply_pcm(
        &x.tensor(&y).unwrap(),
        &QubitLabel::new("x"),
        &QubitLabel::new("y"),
    )
    .unwrap();
    assert_eq!(r.odd().probability, 1.0);
    assert!(r.even().state.is_none());
}
