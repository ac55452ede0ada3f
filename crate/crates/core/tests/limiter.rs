use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use polybound_core::limiter::{
    apply_limiter, apply_limiter_to, blend, cfl_limit, dg_step, element_mean, sample_extrema, DGState, Limiter,
    Velocity,
};
use polybound_core::limiter::step_interpolation_table;
use polybound_core::{tables, BasisFamily, BasisSpec, NodeKind, PolyCoeffs};

fn p3_limiter(lower: f64, upper: f64) -> Limiter {
    let t = tables::get_table(BasisFamily::LobattoNodal, 3, NodeKind::Optimized, 4).unwrap();
    Limiter::new(t, lower, upper).unwrap()
}

#[test]
fn mean_matches_monte_carlo() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let basis = BasisSpec::lobatto(3).unwrap();
    let c = PolyCoeffs::new_1d(basis, (0..4).map(|_| rng.random_range(-1.0..1.0)).collect()).unwrap();
    let n = 1_000_000;
    let (mut s, mut s2) = (0.0, 0.0);
    for _ in 0..n {
        let v = c.eval(&[rng.random_range(-1.0..=1.0)]).unwrap();
        s += v;
        s2 += v * v;
    }
    let mean = s / n as f64;
    let sigma = ((s2 / n as f64 - mean * mean) / n as f64).sqrt();
    assert!((element_mean(&c) - mean).abs() <= 3.0 * sigma);
}

#[test]
fn step_data_is_squeezed_into_bounds() {
    let basis = BasisSpec::lobatto(3).unwrap();
    let step = |x: &[f64]| if x[0] < 0.0 { -0.5 } else if x[0] > 0.0 { 0.5 } else { 0.0 };
    let c = PolyCoeffs::interpolate(1, &basis, step).unwrap();
    let (limited, d) = apply_limiter_to(&c, &p3_limiter(-0.5, 0.5)).unwrap();
    assert!(d.alpha < 1.0);
    for k in 0..=10_000 {
        let x = -1.0 + 2.0 * k as f64 / 10_000.0;
        let v = limited.eval(&[x]).unwrap();
        assert!((-0.5 - 1e-12..=0.5 + 1e-12).contains(&v), "{v} at {x}");
    }
}

#[test]
fn admissible_state_is_unchanged_bitwise() {
    let s = DGState::from_fn(4, 3, Velocity::Rotation, |x, y| 0.5 + 0.1 * (x * y).sin()).unwrap();
    let (out, decisions) = apply_limiter(&s, &p3_limiter(0.0, 1.0)).unwrap();
    assert!(decisions.iter().all(|d| d.alpha == 1.0));
    for e in 0..s.num_elements() {
        assert_eq!(out.element_values(e), s.element_values(e));
    }
}

#[test]
fn zero_alpha_gives_constant_element() {
    let basis = BasisSpec::lobatto(3).unwrap();
    let mut c = PolyCoeffs::interpolate(2, &basis, |x| x[0] * x[1] + x[0]).unwrap();
    let mean = element_mean(&c);
    blend(&mut c, 0.0, mean);
    assert!(c.values().iter().all(|v| (v - mean).abs() < 1e-15));
}

#[test]
fn constant_state_is_preserved() {
    let lim = p3_limiter(0.0, 1.0);
    let mut s = DGState::from_fn(4, 3, Velocity::Rotation, |_, _| 0.3).unwrap();
    let dt = cfl_limit(&s);
    for _ in 0..100 {
        s = dg_step(&s, dt, Some(&lim)).unwrap();
    }
    for e in 0..s.num_elements() {
        assert!(s.element_values(e).iter().all(|v| (v - 0.3).abs() < 1e-13));
    }
}

#[test]
fn stages_stay_bounded_and_conservative() {
    let lim = p3_limiter(0.0, 1.0);
    let (mut s, _) = apply_limiter(
        &DGState::from_fn(8, 3, Velocity::Rotation, polybound_core::limiter::rotation_initial_condition).unwrap(),
        &lim,
    )
    .unwrap();
    let dt = cfl_limit(&s);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..20 {
        let before = s.total_mass();
        s = dg_step(&s, dt, Some(&lim)).unwrap();
        assert!((s.total_mass() - before).abs() <= 1e-12);
        for _ in 0..50 {
            let e = rng.random_range(0..s.num_elements());
            for _ in 0..1000 {
                let v = s.eval_element(e, rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0));
                assert!((-1e-12..=1.0 + 1e-12).contains(&v));
            }
        }
    }
    let (lo, hi) = sample_extrema(&s, 100, 1);
    assert!(lo >= -1e-12 && hi <= 1.0 + 1e-12);
}

fn hump(x: f64, y: f64) -> f64 {
    let r = ((x - 0.3).powi(2) + (y - 0.5).powi(2)).sqrt() / 0.2;
    if r < 1.0 {
        (0.5 * std::f64::consts::PI * r).cos().powi(6)
    } else {
        0.0
    }
}

#[test]
fn smooth_rotation_converges_without_limiter() {
    let error = |ne: usize| {
        let mut s = DGState::from_fn(ne, 3, Velocity::Rotation, hump).unwrap();
        let steps = (1.0 / cfl_limit(&s)).ceil() as usize;
        let dt = 1.0 / steps as f64;
        for _ in 0..steps {
            s = dg_step(&s, dt, None).unwrap();
        }
        s.l2_error(hump)
    };
    let (e8, e16) = (error(8), error(16));
    assert!(e16 < e8 / 4.0, "{e8} {e16}");
}

#[test]
fn step_table_orders_bounds() {
    let t = step_interpolation_table(&[3, 5]).unwrap();
    for r in &t.rows {
        assert!(r.exact.1 <= r.present.1 && r.present.1 < r.bernstein.1);
    }
    assert!((t.rows[1].error_reduction() + 98.3).abs() < 0.5);
}
