//! Acceptance checks, one line per criterion.
//!
//! Run with `cargo test -p polybound-core --test acceptance`.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use polybound_core::bounder::{bound, brute_force_extrema_with, project_p1};
use polybound_core::limiter::{self, element_mean, run, squeeze_alpha, Limiter, RunOptions};
use polybound_core::meshcheck::{
    check_mesh, classify_element, detj_coeffs, detj_tables, dip_element, perturbed_mesh, refinement_history,
    CheckOptions, Status,
};
use polybound_core::{
    change_basis, make_node_set, optimize_values, tables, verify_table, BasisFamily, BasisSpec, NodeKind, PolyCoeffs,
};

struct Outcome {
    pass: bool,
    detail: String,
}

fn random_poly(rng: &mut ChaCha8Rng, dim: usize, basis: &BasisSpec) -> PolyCoeffs {
    let n = basis.len().pow(dim as u32);
    let values = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    PolyCoeffs::new(dim, basis.clone(), values).unwrap()
}

fn soundness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut failures = 0;
    let mut cases = 0;
    for n in 3..=8 {
        let basis = BasisSpec::lobatto(n - 1).unwrap();
        for m in n..=n + 2 {
            let table = tables::get_table(BasisFamily::LobattoNodal, n - 1, NodeKind::Optimized, m).unwrap();
            for dim in 1..=2 {
                let samples = if dim == 1 { 10_000 } else { 100 };
                for _ in 0..1000 {
                    let c = random_poly(&mut rng, dim, &basis);
                    let nb = bound(&c, &table).unwrap();
                    let (lo, hi) = brute_force_extrema_with(&c, samples, true).unwrap();
                    if lo < nb.min_lower() - 1e-12 || hi > nb.max_upper() + 1e-12 {
                        failures += 1;
                    }
                    cases += 1;
                }
            }
        }
    }
    Outcome { pass: failures == 0, detail: format!("{failures} failures in {cases} polynomials") }
}

fn tabulated_box_reproduction() -> Outcome {
    let mut worst = 0.0f64;
    let mut worst_violation = f64::INFINITY;
    for (p, _, fixture) in tables::reference_tables().unwrap() {
        worst_violation = worst_violation.min(verify_table(&fixture).max_violation);
        if p > 4 {
            continue;
        }
        let mine = optimize_values(fixture.basis(), fixture.nodes(), 1000).unwrap();
        for (a, b) in fixture.lower().iter().zip(mine.lower()).chain(fixture.upper().iter().zip(mine.upper())) {
            worst = worst.max((a - b).abs());
        }
    }
    Outcome {
        pass: worst <= 2e-3 && worst_violation >= -1e-12,
        detail: format!("max |diff| P2-P4 = {worst:.2e} (tol 2e-3), min fixture max_violation = {worst_violation:.2e}"),
    }
}

fn step_table() -> Outcome {
    let exact = [0.6286, 0.5342, 0.6368, 0.5340, 0.6389];
    let bern = [1.1967, 0.7116, 3.0758, 1.1040, 8.8450];
    let present = [0.6530, 0.5867, 0.6780, 0.6236, 0.7080];
    let t0 = Instant::now();
    let table = limiter::step_interpolation_table(&[3, 4, 5, 6, 7]).unwrap();
    let elapsed = t0.elapsed();
    let mut ok = elapsed < Duration::from_secs(10);
    let mut worst = [0.0f64; 3];
    for (k, r) in table.rows.iter().enumerate() {
        let sym = |v: (f64, f64)| (v.0 + v.1).abs() < 1e-9;
        ok &= sym(r.exact) && sym(r.bernstein) && sym(r.present);
        let e = [(r.exact.1 - exact[k]).abs(), (r.bernstein.1 - bern[k]).abs(), (r.present.1 - present[k]).abs()];
        for i in 0..3 {
            worst[i] = worst[i].max(e[i]);
        }
        ok &= e[0] <= 5e-5 && e[1] <= 5e-5 && e[2] <= 5e-3;
        ok &= r.present.1.abs() < r.bernstein.1.abs();
    }
    Outcome {
        pass: ok,
        detail: format!(
            "max dev exact {:.1e}, bernstein {:.1e}, present {:.1e}; {:.2?}",
            worst[0], worst[1], worst[2], elapsed
        ),
    }
}

fn slope(ms: &[f64], eps: &[f64]) -> f64 {
    let x: Vec<f64> = ms.iter().map(|m| m.ln()).collect();
    let y: Vec<f64> = eps.iter().map(|e| e.ln()).collect();
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

fn convergence() -> Outcome {
    let basis = BasisSpec::lobatto(3).unwrap();
    let ms: Vec<usize> = (4..=20).collect();
    let mfs: Vec<f64> = ms.iter().map(|&m| m as f64).collect();
    let eps_of = |kind: NodeKind| -> Vec<f64> {
        ms.iter()
            .map(|&m| {
                let t = if kind == NodeKind::Optimized {
                    tables::get_table(BasisFamily::LobattoNodal, 3, kind, m).unwrap()
                } else {
                    optimize_values(&basis, &make_node_set(kind, m).unwrap(), 1000).unwrap()
                };
                verify_table(&t).eps2
            })
            .collect()
    };
    let opt = eps_of(NodeKind::Optimized);
    let mut ok = true;
    let mut parts = vec![format!("optimized {:.2}", slope(&mfs, &opt))];
    ok &= (-2.5..=-1.5).contains(&slope(&mfs, &opt));
    for kind in NodeKind::STANDARD {
        let e = eps_of(kind);
        let s = slope(&mfs, &e);
        if kind != NodeKind::GaussLegendreEndpoints {
            ok &= (-2.5..=-1.5).contains(&s);
        }
        ok &= opt.iter().zip(&e).all(|(o, k)| o <= k);
        parts.push(format!("{} {s:.2}", kind.name()));
    }
    Outcome { pass: ok, detail: format!("slopes: {}; optimized <= all kinds at every M", parts.join(", ")) }
}

fn mesh_validity() -> Outcome {
    let mut ok = true;
    let element = dip_element(-2.156e-4).unwrap();
    let coeffs = detj_coeffs(&element, 2).unwrap();
    let (oracle_min, _) = brute_force_extrema_with(&coeffs, 300, true).unwrap();
    let t2 = detj_tables(2).unwrap();
    let opts = CheckOptions { tol: 1e-4, max_levels: 6, ..Default::default() };
    let r = classify_element(&element, 2, &t2, &opts).unwrap();
    ok &= r.status == Status::Invalid && r.levels_used <= 6;
    let history = refinement_history(&coeffs, &t2[0], 6).unwrap();
    let tighter = history.iter().all(|l| l.proposed_lower >= l.bernstein_lower);
    ok &= tighter;

    let t3 = detj_tables(3).unwrap();
    let mut misclassified = 0;
    let mut unsound = 0;
    let mut counts = [0usize; 3];
    for seed in 0..20 {
        let mesh = perturbed_mesh(8, 3, 0.3, 1000 + seed).unwrap();
        let report = check_mesh(&mesh, &t3, &opts).unwrap();
        for er in &report.elements {
            let c = detj_coeffs(&mesh.elements()[er.index], 3).unwrap();
            let (mut lo, _) = brute_force_extrema_with(&c, 100, true).unwrap();
            if let Some(w) = er.witness {
                lo = lo.min(c.eval(&w).unwrap());
            }
            let (a, b) = er.min_detj_interval;
            if lo < a - 1e-12 || lo > b + 1e-12 {
                unsound += 1;
            }
            match er.status {
                Status::Valid => {
                    counts[0] += 1;
                    misclassified += usize::from(lo <= 0.0);
                }
                Status::Invalid => {
                    counts[1] += 1;
                    misclassified += usize::from(lo >= 0.0);
                }
                Status::Indeterminate => counts[2] += 1,
            }
        }
    }
    ok &= misclassified == 0 && unsound == 0;
    Outcome {
        pass: ok,
        detail: format!(
            "dip element oracle min {oracle_min:.4e}: {} after {} levels, proposed >= Bernstein at levels 0-6: {tighter}; \
             20 meshes: {} valid / {} invalid / {} indeterminate, {misclassified} misclassified, {unsound} unsound intervals",
            r.status, r.levels_used, counts[0], counts[1], counts[2]
        ),
    }
}

fn limiter_rotation() -> Outcome {
    let table = tables::get_table(BasisFamily::LobattoNodal, 3, NodeKind::Optimized, 4).unwrap();
    let lim = Limiter::new(table, 0.0, 1.0).unwrap();
    let t0 = Instant::now();
    let mut ok = true;
    let mut maxima = Vec::new();
    let mut parts = Vec::new();
    for ne in [16, 32] {
        let opts = RunOptions { ne, order: 3, t_final: 1.0, snapshots: 4, samples_per_element: 1000, seed: 7 };
        let rep = run(&opts, Some(&lim)).unwrap();
        let (lo, hi) = rep.extrema();
        ok &= lo >= -1e-12 && hi <= 1.0 + 1e-12 && rep.relative_drift() <= 1e-10;
        let last = rep.snapshots.last().unwrap();
        maxima.push(last.max);
        parts.push(format!(
            "{ne}^2: min {:.3e} max {:.6} drift {:.1e}",
            last.min,
            last.max,
            rep.relative_drift()
        ));
    }
    ok &= maxima[1] > maxima[0];
    Outcome { pass: ok, detail: format!("{}; {:.1?}", parts.join(", "), t0.elapsed()) }
}

fn properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = [0.0f64; 4];
    let mut alpha_bad = 0;
    for p in 2..=6 {
        let basis = BasisSpec::lobatto(p).unwrap();
        let table = tables::get_table(BasisFamily::LobattoNodal, p, NodeKind::Optimized, p + 1).unwrap();
        for _ in 0..50 {
            let c = random_poly(&mut rng, 1, &basis);
            let a: f64 = rng.random_range(0.1..10.0) * if rng.random_bool(0.5) { -1.0 } else { 1.0 };
            let b: f64 = rng.random_range(-5.0..5.0);
            let g: f64 = rng.random_range(-5.0..5.0);
            let (one, x) = (basis.unit_coeffs(), basis.identity_coeffs());
            let values = c.values().iter().enumerate().map(|(i, v)| a * v + b * one[i] + g * x[i]).collect();
            let scaled = PolyCoeffs::new_1d(basis.clone(), values).unwrap();
            let (n0, n1) = (bound(&c, &table).unwrap(), bound(&scaled, &table).unwrap());
            for k in 0..n0.len() {
                let g0 = n0.upper[k] - n0.lower[k];
                let g1 = n1.upper[k] - n1.lower[k];
                worst[0] = worst[0].max((g1 - a.abs() * g0).abs());
            }
            let (_, fluct) = project_p1(&c).unwrap();
            let (w0, w1) = basis.projection_weights();
            let m0: f64 = w0.iter().zip(fluct.values()).map(|(w, v)| w * v).sum();
            let m1: f64 = w1.iter().zip(fluct.values()).map(|(w, v)| w * v).sum();
            worst[1] = worst[1].max(m0.abs()).max(m1.abs());
            let mut back = c.clone();
            for fam in [BasisFamily::Bernstein, BasisFamily::LegendreModal, BasisFamily::LegendreNodal] {
                back = change_basis(&back, &BasisSpec::new(fam, p).unwrap()).unwrap();
            }
            back = change_basis(&back, &basis).unwrap();
            for (x, y) in back.values().iter().zip(c.values()) {
                worst[2] = worst[2].max((x - y).abs());
            }
            let c2 = random_poly(&mut rng, 2, &basis);
            let shifted = PolyCoeffs::new(2, basis.clone(), c2.values().iter().map(|v| 0.5 + 0.4 * v).collect()).unwrap();
            let lim = Limiter::new(table.clone(), 0.0, 1.0).unwrap();
            let before = element_mean(&shifted);
            let (after, _) = limiter::apply_limiter_to(&shifted, &lim).unwrap();
            worst[3] = worst[3].max((element_mean(&after) - before).abs());
        }
    }
    for _ in 0..100_000 {
        let mean: f64 = rng.random_range(-1.0..1.0);
        let a = mean - rng.random_range(0.0..1.0);
        let b = mean + rng.random_range(0.0..1.0);
        let u_min = mean - rng.random_range(0.0..2.0);
        let u_max = mean + rng.random_range(0.0..2.0);
        let alpha = squeeze_alpha(mean, u_min, u_max, a, b).unwrap();
        if !(0.0..=1.0).contains(&alpha) {
            alpha_bad += 1;
        }
    }
    let ok = worst[0] <= 1e-10 && worst[1] <= 1e-12 && worst[2] <= 1e-10 && worst[3] <= 1e-13 && alpha_bad == 0;
    Outcome {
        pass: ok,
        detail: format!(
            "gap scaling {:.1e}, orthogonality {:.1e}, round trip {:.1e}, mean change {:.1e}, alpha out of range {alpha_bad}",
            worst[0], worst[1], worst[2], worst[3]
        ),
    }
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 7] = [
        ("soundness suite", soundness),
        ("tabulated box reproduction", tabulated_box_reproduction),
        ("step interpolation table", step_table),
        ("convergence in M", convergence),
        ("mesh validity", mesh_validity),
        ("limiter rotation", limiter_rotation),
        ("property suite", properties),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let id = (k + 1).to_string();
        if !filter.is_empty() && !filter.iter().any(|f| *f == id) {
            continue;
        }
        let t0 = Instant::now();
        let o = check();
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {id} [{verdict}] {name}: {} ({:.1?})", o.detail, t0.elapsed());
        failed += usize::from(!o.pass);
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
