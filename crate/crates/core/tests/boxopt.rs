use polybound_core::boxopt::{offset_correction, optimize_nodes, optimize_nodes_with, verify_table, NodeSearchOptions};
use polybound_core::{make_node_set, optimize_values, tables, BasisSpec, NodeKind};

#[test]
fn linear_box_is_the_basis_itself() {
    let basis = BasisSpec::lobatto(1).unwrap();
    let t = optimize_values(&basis, &make_node_set(NodeKind::Equispaced, 2).unwrap(), 1000).unwrap();
    let eps = t.epsilon();
    for i in 0..2 {
        for j in 0..2 {
            let phi = if i == j { 1.0 } else { 0.0 };
            assert!((t.lower_row(i)[j] - (phi - eps)).abs() < 1e-12);
            assert!((t.upper_row(i)[j] - (phi + eps)).abs() < 1e-12);
        }
    }
}

#[test]
fn published_p3_nodes_reproduce_fixture_quality() {
    let fixture = tables::reference_table(3, 4).unwrap().unwrap();
    let basis = BasisSpec::lobatto(3).unwrap();
    let t = optimize_values(&basis, fixture.nodes(), 1000).unwrap();
    let (ours, theirs) = (verify_table(&t), verify_table(&fixture));
    assert!((ours.eps2 - theirs.eps2).abs() < 1e-3, "{} vs {}", ours.eps2, theirs.eps2);
    assert!(ours.max_violation >= 0.0);
}

#[test]
fn node_search_finds_published_p3_nodes() {
    let (nodes, t) = optimize_nodes(&BasisSpec::lobatto(3).unwrap(), 4).unwrap();
    let x = nodes.positions();
    assert!((x[1] + 0.4626).abs() < 5e-3 && (x[2] - 0.4626).abs() < 5e-3, "{x:?}");
    assert_eq!(t.symmetry_defect(), 0.0);
}

#[test]
fn node_search_is_deterministic() {
    let basis = BasisSpec::lobatto(3).unwrap();
    let opts = NodeSearchOptions { restarts: 4, ..Default::default() };
    let a = optimize_nodes_with(&basis, 5, &opts).unwrap();
    let b = optimize_nodes_with(&basis, 5, &opts).unwrap();
    assert_eq!(a, b);
}

#[test]
fn bounding_rows_need_no_offset() {
    let basis = BasisSpec::lobatto(3).unwrap();
    let t = tables::reference_table(3, 5).unwrap().unwrap();
    for i in 0..t.n() {
        let r = offset_correction(&basis, i, t.nodes(), t.lower_row(i), t.upper_row(i), 0.0, 1000).unwrap();
        assert_eq!((r.delta_lower, r.delta_upper), (0.0, 0.0));
    }
}

#[test]
fn optimized_nodes_beat_equispaced_and_smaller_tables() {
    for p in 2..=7 {
        let basis = BasisSpec::lobatto(p).unwrap();
        let mut prev = f64::INFINITY;
        for m in p + 1..=p + 3 {
            let opt = verify_table(&tables::bundled_table(p, m).unwrap().unwrap()).eps2;
            let eq = verify_table(&optimize_values(&basis, &make_node_set(NodeKind::Equispaced, m).unwrap(), 1000).unwrap()).eps2;
            assert!(opt <= eq + 1e-9, "p={p} M={m}: {opt} > {eq}");
            assert!(opt <= prev + 1e-9, "p={p} M={m}: {opt} > {prev}");
            prev = opt;
        }
    }
}

#[test]
fn tables_bound_on_dense_samples() {
    for (p, m, t) in tables::reference_tables().unwrap() {
        let basis = t.basis().clone();
        for k in 0..=10_000 {
            let x = -1.0 + 2.0 * k as f64 / 10_000.0;
            for i in 0..t.n() {
                let phi = basis.eval(i, x).unwrap();
                assert!(t.lower_at(i, x) <= phi + 1e-12 && phi <= t.upper_at(i, x) + 1e-12, "p={p} M={m} i={i} x={x}");
            }
        }
    }
}

#[test]
fn fixtures_are_symmetric_under_mirroring() {
    for (p, m, t) in tables::reference_tables().unwrap() {
        assert!(t.symmetry_defect() < 1e-6, "p={p} M={m}: {}", t.symmetry_defect());
        assert_eq!(t.nodes().positions().len(), m);
        let x = t.nodes().positions();
        assert!(x.iter().zip(x.iter().rev()).all(|(a, b)| (a + b).abs() < 1e-12));
    }
}
