use clusterfuse_wasm::api;

#[test]
fn figure_table_shapes() {
    let t = api::figure_table("fig3-left", 5).unwrap();
    assert_eq!(t.rows.len(), 5);
    assert_eq!(t.columns[0], "p");
    let sim = t.column("sim_method1").unwrap();
    let formula = t.column("formula_method1").unwrap();
    for (a, b) in sim.iter().zip(&formula) {
        assert!((a - b).abs() < 1e-9);
    }
    assert!(api::figure_table("fig7", 5).is_err());
    assert!(api::figure_table("fig1", 1).is_err());
    assert!(api::figure_table("fig1", 10_000).is_err());
}

#[test]
fn scenario_matches_closed_form() {
    let r = api::scenario(
        "method2-all-success",
        [Some(0.0), Some(0.2), Some(0.1), Some(0.05), None, None],
    )
    .unwrap();
    assert!((r.fidelity_sim - r.fidelity_formula.unwrap()).abs() < 1e-9);
    assert_eq!((r.fusion_attempts, r.primitives_used), (3, 4));
    assert!((r.branch_probability - 0.125).abs() < 1e-15);
}

#[test]
fn scenario_rejects_bad_input() {
    assert!(api::scenario("method1-wait", [Some(0.0), None, None, None, None, None]).is_err());
    assert!(api::scenario("method1-wait", [Some(0.0), Some(2.0), None, None, None, Some(0.1)]).is_err());
    assert!(api::scenario("nope", [None; 6]).is_err());
}

#[test]
fn sampling_is_seeded() {
    let a = api::sample(1, true, 300, 7, 0.02).unwrap();
    let b = api::sample(1, true, 300, 7, 0.02).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.samples, 300);
    assert!(api::sample(3, true, 10, 0, 0.0).is_err());
    assert!(api::sample(2, false, api::MAX_SAMPLES + 1, 0, 0.0).is_err());
}

#[test]
fn results_serialize() {
    let r = api::scenario("method1-all-success", [Some(0.0), Some(0.1), None, None, None, None]).unwrap();
    let v: serde_json::Value = serde_json::to_value(&r).unwrap();
    assert_eq!(v["scenario"], "method1-all-success");
    assert!(v["fidelity_formula"].is_number());
}
