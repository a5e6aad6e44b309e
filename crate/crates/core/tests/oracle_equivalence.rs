//! Exact π-formula results against brute-force enumeration over explicit noise.

use pathfx::infer::{counterfactual_distribution, exact_marginal, factorization_of, observational_factorization};
use pathfx::{apply_path, load_model, CausalModel, CptModel, PathIntervention, Scm, TaggedVar};
use pathfx_testkit::{cpt_to_scm, fixtures, random_path, random_scm, seeded, two_world_oracle, RandomModelConfig};
use rand::Rng;

const TOL: f64 = 1e-12;

/// Compares every counterfactual marginal and the full two-world joint, and
/// checks that the factual block still carries the observational law.
fn check(scm: &Scm<f64>, iv: &PathIntervention, keep_all: bool) {
    let cpt = scm.to_cpt();
    let oracle = two_world_oracle(scm, iv.path.nodes(), &iv.value, keep_all);
    assert!((oracle.total() - 1.0).abs() < TOL);
    let pm = apply_path(&cpt, iv, keep_all).unwrap();
    for column in pm.counterfactual_columns() {
        let exact = if keep_all {
            exact_marginal(&cpt, &factorization_of(&pm), std::slice::from_ref(&column)).unwrap()
        } else {
            counterfactual_distribution(&cpt, iv, &column.name).unwrap()
        };
        for (got, want) in exact.probs().iter().zip(oracle.marginal(&column)) {
            assert!((got - want).abs() < TOL, "{column} on {}: {got} vs {want}", iv.path);
        }
    }
    let columns: Vec<TaggedVar> = oracle.columns.clone();
    let joint = exact_marginal(&cpt, &factorization_of(&pm), &columns).unwrap();
    let tv = pathfx::tv_distance(&joint, &oracle).unwrap();
    assert!(tv < TOL, "joint differs on {}: {tv}", iv.path);

    let factual: Vec<TaggedVar> = cpt.variables().iter().map(|v| TaggedVar::factual(&v.name)).collect();
    let observed = exact_marginal(&cpt, &observational_factorization(&cpt), &factual).unwrap();
    let projected = exact_marginal(&cpt, &factorization_of(&pm), &factual).unwrap();
    let gap = projected.max_abs_diff(&observed).unwrap();
    assert!(gap <= TOL, "factual block moved on {}: {gap}", iv.path);
}

fn fixture(src: &str) -> CptModel<f64> {
    load_model::<f64>(src).unwrap().to_cpt()
}

#[test]
fn fixtures_match_noise_enumeration() {
    for (name, src) in fixtures::TABLES {
        let cpt = fixture(src);
        let scm = cpt_to_scm(&cpt);
        for value in ["0", "1"] {
            let iv = PathIntervention::parse(&cpt, fixtures::default_path(name), value).unwrap();
            check(&scm, &iv, false);
            check(&scm, &iv, true);
        }
    }
}

#[test]
fn structural_fixture_matches_noise_enumeration() {
    let scm = load_model::<f64>(fixtures::F1_SCM).unwrap();
    let scm = scm.as_scm().unwrap();
    for path in ["A->M->Y", "A->Y", "M->Y", "A->M"] {
        let iv = PathIntervention::parse(scm, path, "1").unwrap();
        check(scm, &iv, false);
    }
}

#[test]
fn random_models_match_noise_enumeration() {
    let mut rng = seeded(0x5eed_0001);
    let config = RandomModelConfig::default();
    for _ in 0..100 {
        let scm = random_scm(&mut rng, &config);
        let path = random_path(&mut rng, &scm).expect("generated models have an edge");
        let head = &path.nodes()[0];
        let domain = CausalModel::domain_of(&scm, head).unwrap();
        let value = domain.label(rng.random_range(0..domain.len())).to_string();
        let iv = PathIntervention::new(&scm, path.nodes(), value).unwrap();
        check(&scm, &iv, false);
    }
}

#[test]
fn threshold_construction_preserves_tables() {
    let mut rng = seeded(7);
    for (_, src) in fixtures::TABLES {
        let cpt = fixture(src);
        let back = cpt_to_scm(&cpt).to_cpt();
        for (a, b) in cpt.cpts().iter().zip(back.cpts()) {
            for (ra, rb) in a.rows().iter().zip(b.rows()) {
                for (x, y) in ra.iter().zip(rb) {
                    assert!((x - y).abs() < TOL);
                }
            }
        }
    }
    for _ in 0..20 {
        let cpt = random_scm(&mut rng, &RandomModelConfig::default()).to_cpt();
        let back = cpt_to_scm(&cpt).to_cpt();
        for (a, b) in cpt.cpts().iter().zip(back.cpts()) {
            assert_eq!(a.parents(), b.parents());
            for (ra, rb) in a.rows().iter().zip(b.rows()) {
                for (x, y) in ra.iter().zip(rb) {
                    assert!((x - y).abs() < TOL);
                }
            }
        }
    }
}
