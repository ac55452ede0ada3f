use proptest::prelude::*;

use polybound_core::{
    bound_1d, change_basis, element_mean, squeeze_alpha, tables, BasisFamily, BasisSpec, Limiter, NodeKind, PolyCoeffs,
};

fn lobatto_coeffs(p: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0..10.0f64, p + 1)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn wider_target_never_lowers_alpha(
        mean in -1.0..1.0f64,
        spread in (0.0..3.0f64, 0.0..3.0f64),
        target in (0.0..1.0f64, 0.0..1.0f64),
        grow in (0.0..1.0f64, 0.0..1.0f64),
    ) {
        let (u_min, u_max) = (mean - spread.0, mean + spread.1);
        let (a, b) = (mean - target.0, mean + target.1);
        let narrow = squeeze_alpha(mean, u_min, u_max, a, b).unwrap();
        let wide = squeeze_alpha(mean, u_min, u_max, a - grow.0, b + grow.1).unwrap();
        prop_assert!(wide >= narrow);
        prop_assert!((0.0..=1.0).contains(&narrow));
    }

    #[test]
    fn limiting_keeps_the_mean(values in prop::collection::vec(-2.0..3.0f64, 16)) {
        let t = tables::get_table(BasisFamily::LobattoNodal, 3, NodeKind::Optimized, 4).unwrap();
        let lim = Limiter::new(t, 0.0, 1.0).unwrap();
        let mut c = PolyCoeffs::new(2, BasisSpec::lobatto(3).unwrap(), values).unwrap();
        let mean = element_mean(&c);
        prop_assume!((0.0..=1.0).contains(&mean));
        lim.limit(&mut c).unwrap();
        prop_assert!((element_mean(&c) - mean).abs() <= 1e-13);
    }

    #[test]
    fn gap_is_invariant_under_affine_changes(
        u in lobatto_coeffs(4),
        alpha in prop_oneof![-5.0..-0.1f64, 0.1..5.0f64],
        beta in -5.0..5.0f64,
        gamma in -5.0..5.0f64,
    ) {
        let basis = BasisSpec::lobatto(4).unwrap();
        let t = tables::get_table(BasisFamily::LobattoNodal, 4, NodeKind::Optimized, 6).unwrap();
        let (one, x) = (basis.unit_coeffs().to_vec(), basis.identity_coeffs().to_vec());
        let v: Vec<f64> = (0..5).map(|i| alpha * u[i] + beta * one[i] + gamma * x[i]).collect();
        let b0 = bound_1d(&PolyCoeffs::new_1d(basis.clone(), u).unwrap(), &t).unwrap();
        let b1 = bound_1d(&PolyCoeffs::new_1d(basis, v).unwrap(), &t).unwrap();
        for j in 0..t.m() {
            let (g0, g1) = (b0.upper[j] - b0.lower[j], b1.upper[j] - b1.lower[j]);
            prop_assert!((g1 - alpha.abs() * g0).abs() <= 1e-10 * (1.0 + g1.abs()));
        }
    }

    #[test]
    fn change_basis_round_trips(u in lobatto_coeffs(5), target in 0usize..3) {
        let family = [BasisFamily::LegendreModal, BasisFamily::Bernstein, BasisFamily::LegendreNodal][target];
        let c = PolyCoeffs::new_1d(BasisSpec::lobatto(5).unwrap(), u).unwrap();
        let there = change_basis(&c, &BasisSpec::new(family, 5).unwrap()).unwrap();
        let back = change_basis(&there, c.basis()).unwrap();
        for (a, b) in c.values().iter().zip(back.values()) {
            prop_assert!((a - b).abs() <= 1e-10 * (1.0 + a.abs()));
        }
    }

    #[test]
    fn mirrored_input_gives_mirrored_bounds(u in lobatto_coeffs(3), m in 4usize..7) {
        let t = tables::get_table(BasisFamily::LobattoNodal, 3, NodeKind::Optimized, m).unwrap();
        let basis = BasisSpec::lobatto(3).unwrap();
        let mirrored: Vec<f64> = u.iter().rev().copied().collect();
        let b0 = bound_1d(&PolyCoeffs::new_1d(basis.clone(), u).unwrap(), &t).unwrap();
        let b1 = bound_1d(&PolyCoeffs::new_1d(basis, mirrored).unwrap(), &t).unwrap();
        for j in 0..m {
            prop_assert!((b0.lower[j] - b1.lower[m - 1 - j]).abs() <= 1e-12);
            prop_assert!((b0.upper[j] - b1.upper[m - 1 - j]).abs() <= 1e-12);
        }
    }
}
