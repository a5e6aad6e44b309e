use pathfx::infer::{exact_joint, exact_marginal, observational_factorization, pi_formula, BLOCK_SIZE};
use pathfx::model::CptSpec;
use pathfx::{CausalModel, CptModel, PathIntervention, TaggedVar, VariableSpec};
use pathfx_testkit::{random_path, random_scm, seeded, RandomModelConfig};
use proptest::prelude::*;
use rand::Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn two_world_joint_is_a_distribution(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let scm = random_scm(&mut rng, &RandomModelConfig::default());
        let cpt = scm.to_cpt();
        let path = random_path(&mut rng, &cpt).unwrap();
        let head = cpt.domain_of(path.head()).unwrap();
        let value = head.label(rng.random_range(0..head.len())).to_string();
        let iv = PathIntervention::new(&cpt, path.nodes(), value).unwrap();
        let f = pi_formula(&cpt, &iv).unwrap();
        prop_assert_eq!(f.factors.len(), cpt.variables().len() + path.nodes().len() - 1);
        let joint = exact_joint(&cpt, &f).unwrap();
        prop_assert!((joint.total() - 1.0).abs() < 1e-12);
        prop_assert!(joint.probs().iter().all(|p| *p >= 0.0));
    }

    #[test]
    fn factual_block_is_untouched(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let cpt = random_scm(&mut rng, &RandomModelConfig::default()).to_cpt();
        let path = random_path(&mut rng, &cpt).unwrap();
        let iv = PathIntervention::new(&cpt, path.nodes(), cpt.domain_of(path.head()).unwrap().label(0)).unwrap();
        let factual: Vec<TaggedVar> = cpt.variables().iter().map(|v| TaggedVar::factual(&v.name)).collect();
        let a = exact_marginal(&cpt, &pi_formula(&cpt, &iv).unwrap(), &factual).unwrap();
        let b = exact_marginal(&cpt, &observational_factorization(&cpt), &factual).unwrap();
        prop_assert!(a.max_abs_diff(&b).unwrap() < 1e-12);
    }
}

/// 18 binary variables in a chain: several enumeration blocks.
fn long_chain() -> CptModel<f64> {
    let names: Vec<String> = (0..18).map(|i| format!("C{i:02}")).collect();
    let vars = names.iter().map(VariableSpec::binary).collect();
    let mut specs = vec![CptSpec::root(names[0].clone(), vec![0.3, 0.7])];
    for (i, pair) in names.windows(2).enumerate() {
        let q = 0.1 + 0.04 * i as f64;
        specs.push(CptSpec::dense(pair[1].clone(), &[&pair[0]], vec![vec![q, 1.0 - q], vec![0.9 - q, 0.1 + q]]));
    }
    CptModel::new(vars, specs).unwrap()
}

#[test]
fn enumeration_is_bit_identical_across_thread_counts() {
    let model = long_chain();
    let f = observational_factorization(&model);
    let keep = [TaggedVar::factual("C17"), TaggedVar::factual("C03")];
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| (exact_joint(&model, &f).unwrap(), exact_marginal(&model, &f, &keep).unwrap()))
    };
    let (joint1, marginal1) = run(1);
    assert!(joint1.len() > 2 * BLOCK_SIZE);
    for threads in [2, 5, 8] {
        let (joint, marginal) = run(threads);
        let bits = |t: &pathfx::JointTable<f64>| t.probs().iter().map(|p| p.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&joint), bits(&joint1));
        assert_eq!(bits(&marginal), bits(&marginal1));
    }
    assert!((marginal1.total() - 1.0).abs() < 1e-12);
}

#[test]
fn cap_refuses_large_spaces() {
    let model = long_chain();
    let f = observational_factorization(&model);
    assert!(pathfx::infer::exact_joint_with_cap(&model, &f, 1000).is_err());
}
