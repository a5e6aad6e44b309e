use super::*;
use crate::dsl::load_model;
use crate::infer::{counterfactual_distribution, exact_joint};
use crate::intervene::{apply_path, PathIntervention};

const N: u64 = 200_000;

fn load(text: &str) -> AnyModel<f64> {
    load_model::<f64>(text).unwrap()
}

fn f1_scm() -> AnyModel<f64> {
    load(include_str!("../../fixtures/f1_scm.scm.txt"))
}

#[test]
fn single_edge_frequency() {
    let model = load(include_str!("../../fixtures/f2.scm.txt")).to_cpt();
    let iv = PathIntervention::parse(&model, "T->Y", "1").unwrap();
    let pm = apply_path(&model, &iv, false).unwrap();
    let table = sample_model(&pm, N, DEFAULT_SEED).unwrap();
    assert_eq!(table.n(), N);
    let y = table.marginalize(&[TaggedVar::pi("Y")]).unwrap();
    assert!((y.frequency(&["1"]) - 0.75).abs() < 0.01);
}

#[test]
fn reproducible() {
    let model = f1_scm().to_cpt();
    assert_eq!(sample_model(&model, 1, 7).unwrap(), sample_model(&model, 1, 7).unwrap());
    let a = sample_model(&model, 150_000, 7).unwrap();
    assert_eq!(a, sample_model(&model, 150_000, 7).unwrap());
    assert_ne!(a, sample_model(&model, 150_000, 8).unwrap());
    assert_eq!(a.to_json()["rng"], RNG_ALGORITHM);
    assert!(matches!(sample_model(&model, 0, 7), Err(SampleError::NoDraws)));
}

#[test]
fn thread_count_does_not_matter() {
    let model = f1_scm();
    let spec = NestedSpec::parse(&model.to_cpt(), "A->M->Y", "1", "0").unwrap();
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| {
                (
                    sample_model(&model, 300_000, 3).unwrap(),
                    nested_counterfactual_sample(&model, &spec, 300_000, 3).unwrap(),
                )
            })
    };
    assert_eq!(run(1), run(4));
}

#[test]
fn observational_sampling_converges() {
    let model = f1_scm().to_cpt();
    let exact = exact_joint(&model, &observational_factorization(&model)).unwrap();
    let table = sample_model(&model, N, DEFAULT_SEED).unwrap();
    assert!(tv_distance(&table, &exact).unwrap() <= 0.01);
}

#[test]
fn nested_differs_from_path_effect() {
    let model = f1_scm();
    let cpt = model.to_cpt();
    let spec = NestedSpec::parse(&cpt, "A->M->Y", "1", "0").unwrap();
    let nested = nested_counterfactual_sample(&model, &spec, N, DEFAULT_SEED).unwrap();
    let nested_mean = nested.mean(&TaggedVar::new("Y", World::Nested)).unwrap();
    // f_Y(0, f_M(1, u_M), u_Y): p(Y=1|A=0,M) weighted by p(M|A=1)
    let pm1 = *cpt.probability("M", "1", &["1"]).unwrap();
    let oracle = pm1 * cpt.probability("Y", "1", &["0", "1"]).unwrap()
        + (1.0 - pm1) * cpt.probability("Y", "1", &["0", "0"]).unwrap();
    assert!((nested_mean - oracle).abs() < 0.01);
    let iv = PathIntervention::parse(&cpt, "A->M->Y", "1").unwrap();
    let pm = apply_path(&cpt, &iv, false).unwrap();
    let path_mean = sample_model(&pm, N, DEFAULT_SEED)
        .unwrap()
        .mean(&TaggedVar::pi("Y"))
        .unwrap();
    assert!((path_mean - nested_mean).abs() > 0.01);
}

#[test]
fn degenerate_head_makes_them_agree() {
    let model = load(include_str!("../../fixtures/f1_degenerate.scm.txt"));
    let cpt = model.to_cpt();
    let spec = NestedSpec::parse(&cpt, "A->M->Y", "0", "1").unwrap();
    let nested = nested_counterfactual_sample(&model, &spec, N, DEFAULT_SEED).unwrap();
    let iv = PathIntervention::parse(&cpt, "A->M->Y", "0").unwrap();
    let exact = counterfactual_distribution(&cpt, &iv, "Y").unwrap();
    let nested = nested
        .marginalize(&[TaggedVar::new("Y", World::Nested)])
        .unwrap();
    // compare laws over the same column
    let relabeled = EmpiricalTable::new(
        vec![TaggedVar::pi("Y")],
        nested.domains().to_vec(),
        nested.counts().map(|(l, c)| (vec![exact.domains()[0].index_of(l[0]).unwrap()], c)).collect(),
        nested.seed(),
    );
    assert!(tv_distance(&relabeled, &exact).unwrap() <= 0.01);
}

#[test]
fn cpt_input_refused() {
    let model = AnyModel::Cpt(f1_scm().to_cpt());
    let spec = NestedSpec::parse(&model.to_cpt(), "A->M->Y", "1", "0").unwrap();
    assert!(matches!(
        nested_counterfactual_sample(&model, &spec, 10, 1),
        Err(SampleError::RequiresScm)
    ));
}

#[test]
fn tv_extremes() {
    let model = f1_scm().to_cpt();
    let exact = exact_joint(&model, &observational_factorization(&model)).unwrap();
    assert_eq!(tv_distance(&exact, &exact).unwrap(), 0.0);
    let a = EmpiricalTable::new(vec![TaggedVar::factual("A")], vec![crate::model::Domain::binary()], [(vec![0], 5)].into(), 0);
    let b = EmpiricalTable::new(vec![TaggedVar::factual("A")], vec![crate::model::Domain::binary()], [(vec![1], 3)].into(), 0);
    assert_eq!(tv_distance(&a, &b).unwrap(), 1.0);
    assert!(matches!(tv_distance(&a, &exact), Err(crate::table::TableError::ColumnMismatch)));
}
