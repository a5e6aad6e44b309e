use pathfx::infer::{exact_marginal, factorization_of, observational_factorization};
use pathfx::sample::{sample_model, DEFAULT_SEED};
use pathfx::{apply_path, load_model, tv_distance, CausalModel, CptModel, PathIntervention, TaggedVar};
use pathfx_testkit::fixtures;

const N: u64 = 200_000;

fn fixture(src: &str) -> CptModel<f64> {
    load_model::<f64>(src).unwrap().to_cpt()
}

#[test]
fn path_intervened_marginals_converge() {
    for (name, src) in fixtures::TABLES {
        let model = fixture(src);
        for value in ["0", "1"] {
            let iv = PathIntervention::parse(&model, fixtures::default_path(name), value).unwrap();
            let pm = apply_path(&model, &iv, false).unwrap();
            let keep = pm.counterfactual_columns();
            let exact = exact_marginal(&model, &factorization_of(&pm), &keep).unwrap();
            let empirical = sample_model(&pm, N, DEFAULT_SEED).unwrap().marginalize(&keep).unwrap();
            let tv = tv_distance(&empirical, &exact).unwrap();
            assert!(tv <= 0.01, "{name} a'={value}: {tv}");
        }
    }
}

#[test]
fn factual_block_matches_observational_law() {
    for (name, src) in fixtures::TABLES {
        let model = fixture(src);
        let iv = PathIntervention::parse(&model, fixtures::default_path(name), "1").unwrap();
        let pm = apply_path(&model, &iv, false).unwrap();
        let factual: Vec<TaggedVar> = model
            .topological_order()
            .into_iter()
            .map(|i| TaggedVar::factual(&model.variables()[i].name))
            .collect();
        let exact = exact_marginal(&model, &observational_factorization(&model), &factual).unwrap();
        let from_path = sample_model(&pm, N, DEFAULT_SEED + 1).unwrap().marginalize(&factual).unwrap();
        assert!(tv_distance(&from_path, &exact).unwrap() <= 0.01, "{name}");
        let plain = sample_model(&model, N, DEFAULT_SEED + 2).unwrap();
        assert!(tv_distance(&plain, &exact).unwrap() <= 0.01, "{name}");
    }
}

#[test]
fn exact_rationals_sample_like_floats() {
    let exact = load_model::<pathfx::BigRational>(fixtures::F3).unwrap().to_cpt();
    let float = fixture(fixtures::F3);
    assert_eq!(sample_model(&exact, 10_000, 5).unwrap(), sample_model(&float, 10_000, 5).unwrap());
}
