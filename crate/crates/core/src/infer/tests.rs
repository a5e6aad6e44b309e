use num_rational::BigRational;

use super::*;
use crate::dsl::load_model;
use crate::tagged::World;

fn fixture(text: &str) -> CptModel<f64> {
    load_model::<f64>(text).unwrap().to_cpt()
}

fn f1() -> CptModel<f64> {
    fixture(include_str!("../../fixtures/f1.scm.txt"))
}

fn f2() -> CptModel<f64> {
    fixture(include_str!("../../fixtures/f2.scm.txt"))
}

fn f3() -> CptModel<f64> {
    fixture(include_str!("../../fixtures/f3.scm.txt"))
}

fn p1(model: &CptModel<f64>, child: &str, parents: &[&str]) -> f64 {
    *model.probability(child, "1", parents).unwrap()
}

#[test]
fn recanting_path_factors() {
    let model = f3();
    let iv = PathIntervention::parse(&model, "X->A->Y", "1").unwrap();
    let f = pi_formula(&model, &iv).unwrap();
    let mut expected = ["p(y^π|a^π,m)", "p(a^π|x')", "p(y|a,m)", "p(m|a)", "p(a|x)", "p(x)"].map(String::from);
    expected.sort();
    assert_eq!(f.sorted_terms(), expected);
    assert_eq!(f.to_string(), "p(x)·p(a|x)·p(m|a)·p(y|a,m)·p(a^π|x')·p(y^π|a^π,m)");
}

#[test]
fn factor_json_shape() {
    let model = f2();
    let iv = PathIntervention::parse(&model, "T->Y", "1").unwrap();
    let f = pi_formula(&model, &iv).unwrap();
    let last = f.factors.last().unwrap();
    assert_eq!(
        last.to_json().to_string(),
        r#"{"child":{"name":"Y","world":"pi"},"given":[{"literal":"1"},{"name":"Z","world":"factual"}]}"#
    );
}

#[test]
fn mediation_contrast() {
    let model = f1();
    let iv = PathIntervention::parse(&model, "A->M->Y", "1").unwrap();
    let on = counterfactual_expectation(&model, &iv, "Y").unwrap();
    let iv0 = PathIntervention::parse(&model, "A->M->Y", "0").unwrap();
    let off = counterfactual_expectation(&model, &iv0, "Y").unwrap();
    // y^π reads the factual A and m^π drawn under a'.
    let oracle = |a_prime: &str| -> f64 {
        let mut total = 0.0;
        for a in ["0", "1"] {
            let pa = if a == "1" { p1(&model, "A", &[]) } else { 1.0 - p1(&model, "A", &[]) };
            for m in ["0", "1"] {
                let pm1 = p1(&model, "M", &[a_prime]);
                let pm = if m == "1" { pm1 } else { 1.0 - pm1 };
                total += pa * pm * p1(&model, "Y", &[a, m]);
            }
        }
        total
    };
    assert!((on - oracle("1")).abs() < 1e-12);
    assert!((off - oracle("0")).abs() < 1e-12);
    assert!((on - 0.61).abs() < 1e-12);
    assert!((off - 0.34).abs() < 1e-12);
    let contrast = expectation_contrast(&model, &iv, "0", "Y").unwrap();
    assert!((contrast - 0.27).abs() < 1e-12);
}

#[test]
fn single_edge_matches_adjustment() {
    let model = f2();
    let iv = PathIntervention::parse(&model, "T->Y", "1").unwrap();
    let joint = path_joint(&model, &iv).unwrap();
    let cols: Vec<String> = joint.columns().iter().map(ToString::to_string).collect();
    assert_eq!(cols.len(), 4);
    let dist = counterfactual_distribution(&model, &iv, "Y").unwrap();
    let adjusted: f64 = ["0", "1"]
        .iter()
        .map(|z| {
            let pz = if *z == "1" { p1(&model, "Z", &[]) } else { 1.0 - p1(&model, "Z", &[]) };
            pz * p1(&model, "Y", &["1", z])
        })
        .sum();
    assert!((dist.probs()[1] - adjusted).abs() < 1e-12);
    assert!((adjusted - 0.75).abs() < 1e-12);
    let from_joint = marginalize(&joint, &[TaggedVar::pi("Y")]).unwrap();
    assert!(from_joint.max_abs_diff(&dist).unwrap() < 1e-15);
}

#[test]
fn recanting_path_value() {
    let model = f3();
    let iv = PathIntervention::parse(&model, "X->A->Y", "1").unwrap();
    let got = counterfactual_distribution(&model, &iv, "Y").unwrap().probs()[1];
    let pa = 0.5 * p1(&model, "A", &["0"]) + 0.5 * p1(&model, "A", &["1"]);
    let pm = (1.0 - pa) * p1(&model, "M", &["0"]) + pa * p1(&model, "M", &["1"]);
    let pa_pi = p1(&model, "A", &["1"]);
    let mut oracle = 0.0;
    for (a, wa) in [("0", 1.0 - pa_pi), ("1", pa_pi)] {
        for (m, wm) in [("0", 1.0 - pm), ("1", pm)] {
            oracle += wa * wm * p1(&model, "Y", &[a, m]);
        }
    }
    assert!((got - oracle).abs() < 1e-12);
    assert!((got - 0.71025).abs() < 1e-12);
}

#[test]
fn exact_rationals_agree() {
    let model = load_model::<BigRational>(include_str!("../../fixtures/f3.scm.txt")).unwrap().to_cpt();
    let iv = PathIntervention::parse(&model, "X->A->Y", "1").unwrap();
    let e = counterfactual_expectation(&model, &iv, "Y").unwrap();
    assert_eq!(e, BigRational::new(71025.into(), 100000.into()));
    let joint = path_joint(&model, &iv).unwrap();
    assert_eq!(joint.total(), BigRational::from_integer(1.into()));
}

#[test]
fn single_precision_runs() {
    let model = f3().convert::<f32>().unwrap();
    let iv = PathIntervention::parse(&model, "X->A->Y", "1").unwrap();
    let e = counterfactual_expectation(&model, &iv, "Y").unwrap();
    assert!((e - 0.71025).abs() < 1e-5);
}

#[test]
fn cap_is_enforced() {
    let model = f3();
    let f = pi_formula(&model, &PathIntervention::parse(&model, "X->A->Y", "1").unwrap()).unwrap();
    assert!(matches!(
        exact_joint_with_cap(&model, &f, 63),
        Err(InferError::StateSpaceTooLarge { cap: 63, .. })
    ));
    assert_eq!(exact_joint_with_cap(&model, &f, 64).unwrap().len(), 64);
}

#[test]
fn marginal_agrees_with_joint() {
    let model = f3();
    let f = pi_formula(&model, &PathIntervention::parse(&model, "X->A->Y", "0").unwrap()).unwrap();
    let keep = [TaggedVar::pi("Y"), TaggedVar::factual("M")];
    let joint = exact_joint(&model, &f).unwrap();
    let direct = exact_marginal(&model, &f, &keep).unwrap();
    assert!(joint.marginalize(&keep).unwrap().max_abs_diff(&direct).unwrap() < 1e-15);
    assert!(matches!(
        exact_marginal(&model, &f, &[TaggedVar::new("Q", World::Pi)]),
        Err(InferError::Table(TableError::UnknownColumn(_)))
    ));
}

#[test]
fn malformed_factorizations_rejected() {
    let model = f3();
    let mut f = observational_factorization(&model);
    f.factors[1].given = vec![Conditioner::Var(TaggedVar::pi("X"))];
    assert!(matches!(exact_joint(&model, &f), Err(InferError::InvalidFactorization(_))));
    let mut f = observational_factorization(&model);
    f.factors[1].given = vec![Conditioner::Literal {
        variable: "X".into(),
        value: "7".into(),
    }];
    assert!(matches!(exact_joint(&model, &f), Err(InferError::InvalidFactorization(_))));
    let mut f = observational_factorization(&model);
    f.factors.push(f.factors[0].clone());
    assert!(matches!(exact_joint(&model, &f), Err(InferError::InvalidFactorization(_))));
}

#[test]
fn target_must_follow_the_head() {
    let model = f3();
    let iv = PathIntervention::parse(&model, "X->A->Y", "1").unwrap();
    assert!(matches!(
        counterfactual_expectation(&model, &iv, "M"),
        Err(InferError::NotOnPath { .. })
    ));
}
