use pathfx::{load_model, TaggedVar};
use pathfx_testkit::{all_paths_oracle, cpt_to_scm, fixtures, mutate, seeded, two_world_oracle, witness_oracle};

fn nodes(path: &[&str]) -> Vec<String> {
    path.iter().map(|s| s.to_string()).collect()
}

#[test]
fn two_world_oracle_by_hand() {
    let model = load_model::<f64>(fixtures::F1_SCM).unwrap();
    let scm = model.as_scm().unwrap();
    let table = two_world_oracle(scm, &nodes(&["A", "M", "Y"]), "1", false);
    assert_eq!(table.columns.len(), 5);
    // p(A=a) = 0.5, p(M'=1 | a'=1) = 0.8, p(Y=1|a,m) = .1/.5/.4/.9
    let want = 0.5 * (0.8 * 0.5 + 0.2 * 0.1) + 0.5 * (0.8 * 0.9 + 0.2 * 0.4);
    let y = table.marginal(&TaggedVar::pi("Y"));
    assert!((y[1] - want).abs() < 1e-12);
    assert!((want - 0.61).abs() < 1e-12);
}

#[test]
fn threshold_scm_reproduces_rows() {
    let cpt = load_model::<f64>(fixtures::F4).unwrap().to_cpt();
    let scm = cpt_to_scm(&cpt);
    let back = scm.to_cpt();
    let p = back.probability("Y", "1", &["1", "1", "1", "1"]).unwrap();
    assert!((p - cpt.probability("Y", "1", &["1", "1", "1", "1"]).unwrap()).abs() < 1e-12);
}

#[test]
fn graph_oracles() {
    let f3 = load_model::<f64>(fixtures::F3).unwrap().to_cpt();
    assert_eq!(all_paths_oracle(&f3, "X", "Y"), [nodes(&["X", "A", "M", "Y"]), nodes(&["X", "A", "Y"])]);
    assert_eq!(witness_oracle(&f3, &nodes(&["X", "A", "Y"])).as_deref(), Some("A"));
    assert_eq!(witness_oracle(&f3, &nodes(&["X", "A", "M", "Y"])).as_deref(), Some("A"));
    assert_eq!(witness_oracle(&f3, &nodes(&["A", "M", "Y"])), None);
}

#[test]
fn mutation_changes_text() {
    let mut rng = seeded(1);
    let changed = (0..100).filter(|_| mutate(&mut rng, fixtures::F1) != fixtures::F1).count();
    assert!(changed > 90);
}
