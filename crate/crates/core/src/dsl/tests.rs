use super::*;

const F1: &str = include_str!("../../fixtures/f1.scm.txt");
const F1_SCM: &str = include_str!("../../fixtures/f1_scm.scm.txt");

fn semantic(text: &str) -> SemanticError {
    match parse_model(text) {
        Err(DslError::Semantic(e)) => e,
        other => panic!("expected a semantic error, got {other:?}"),
    }
}

fn syntax(text: &str) -> ParseError {
    match parse_model(text) {
        Err(DslError::Parse(e)) => e,
        other => panic!("expected a parse error, got {other:?}"),
    }
}

#[test]
fn table_fixture_shape() {
    let file = parse_model(F1).unwrap();
    assert_eq!(file.name, "F1");
    assert_eq!(file.kind, ModelKind::Cpt);
    let count = |pred: fn(&Declaration) -> bool| file.declarations.iter().filter(|d| pred(d)).count();
    assert_eq!(count(|d| matches!(d, Declaration::Var(_))), 3);
    assert_eq!(count(|d| matches!(d, Declaration::Cpt(_))), 3);
    let model = file.to_cpt_model::<f64>().unwrap();
    assert_eq!(model.probability("Y", "1", &["1", "0"]), Some(&0.4));
}

#[test]
fn short_probability_vector() {
    let e = semantic("model \"m\"\nvar A : {0,1}\ncpt A | : [0.5]");
    assert_eq!((e.line, e.column), (3, 11));
    assert!(e.message.contains("1 entries, expected 2"), "{}", e.message);
}

#[test]
fn missing_parent_combination_is_named() {
    let text = "model \"m\"\nvar A : {0,1}\nvar M : {0,1}\nvar Y : {0,1}\n\
                cpt A | : [0.5, 0.5]\ncpt M | : [0.5, 0.5]\n\
                cpt Y | A, M : { (0,0): [0.9,0.1] (0,1): [0.5,0.5] (1,0): [0.6,0.4] }";
    let e = semantic(text);
    assert!(e.message.contains("(1,1)"), "{}", e.message);
    assert_eq!(e.line, 7);
}

#[test]
fn unnormalized_row_points_at_the_row() {
    let text = "model \"m\"\nvar A : {0,1}\nvar Y : {0,1}\ncpt A | : [0.5, 0.5]\n\
                cpt Y | A : {\n  (0): [0.5, 0.5]\n  (1): [0.6, 0.5]\n}\n";
    let e = semantic(text);
    assert_eq!((e.line, e.column), (7, 3));
    assert!(matches!(e.source_error, Some(ModelError::RowNotNormalized { .. })));
}

#[test]
fn mixed_kinds_rejected() {
    let text = "model \"m\"\nvar A : {0,1}\nvar B : {0,1}\ncpt A | : [0.5, 0.5]\n\
                noise U : {0} ~ [1]\nmech B <- (; U) { (;0) -> 1 }";
    let e = semantic(text);
    assert_eq!(e.line, 5);
}

#[test]
fn undeclared_parent_and_cycle() {
    let e = semantic("model \"m\"\nvar A : {0,1}\ncpt A | B : { (0): [1, 0] (1): [0, 1] }");
    assert!(e.message.contains("`B`"));
    let text = "model \"m\"\nvar A : {0,1}\nvar Y : {0,1}\n\
                cpt A | Y : { (0): [1, 0] (1): [0, 1] }\ncpt Y | A : { (0): [1, 0] (1): [0, 1] }";
    let e = semantic(text);
    assert!(matches!(e.source_error, Some(ModelError::CycleDetected(_))));
    assert_eq!(e.line, 5);
}

#[test]
fn round_trip_and_canonical_rows() {
    for text in [F1, F1_SCM] {
        let file = parse_model(text).unwrap();
        let canonical = serialize_model(&file);
        assert_eq!(parse_model(&canonical).unwrap(), file);
        assert_eq!(serialize_model(&parse_model(&canonical).unwrap()), canonical);
        assert!(!canonical.contains('#'));
    }
    let shuffled = "model \"m\" var A : {x, y} var Y : {0,1}\n\
                    cpt A | : [0.5, 0.5]\n\
                    cpt Y | A : { (y): [0.2, 0.8], (x): [0.9, 0.1] }";
    let file = parse_model(shuffled).unwrap();
    let Declaration::Cpt(cpt) = &file.declarations[3] else { panic!() };
    assert_eq!(cpt.rows[0].key, ["x"]);
}

#[test]
fn quoted_values_survive() {
    let text = "model \"odd \\\"name\\\"\"\nvar A : {\"low value\", \"a,b\", -1, \"\"}\n\
                cpt A | : [0.25, 0.25, 0.25, 0.25]";
    let file = parse_model(text).unwrap();
    let again = parse_model(&serialize_model(&file)).unwrap();
    assert_eq!(again, file);
    assert_eq!(file.name, "odd \"name\"");
}

#[test]
fn probabilities_keep_twelve_digits() {
    let text = "model \"m\"\nvar A : {0,1}\ncpt A | : [0.1234567890123456, 0.8765432109876544]";
    let file = parse_model(text).unwrap();
    let Declaration::Cpt(cpt) = &file.declarations[1] else { panic!() };
    assert_eq!(cpt.rows[0].probs[0], 0.123456789012);
    let small = "model \"m\"\nvar A : {0,1}\ncpt A | : [1e-30, 1]";
    let file = parse_model(small).unwrap();
    assert_eq!(parse_model(&serialize_model(&file)).unwrap(), file);
}

#[test]
fn crlf_accepted() {
    let text = F1.replace('\n', "\r\n");
    assert_eq!(parse_model(&text).unwrap(), parse_model(F1).unwrap());
}

#[test]
fn syntax_errors_are_positioned() {
    let e = syntax("model \"m\"\nvar A {0,1}");
    assert_eq!((e.line, e.column), (2, 7));
    assert_eq!(e.expected.as_deref(), Some("`:`"));
    let e = syntax("");
    assert_eq!((e.line, e.column), (1, 1));
    let e = syntax("model \"m\"\nvar A : {0,1\n");
    assert_eq!(e.line, 2);
    assert!(e.column <= 13);
    let e = syntax("model \"m\"\ncpt A | : [abc]");
    assert!(e.message.contains("probability"));
}

#[test]
fn invalid_utf8_is_positioned() {
    let e = parse_model_bytes(b"model \"m\"\nvar \xff").unwrap_err();
    assert_eq!(e.position(), Pos { line: 2, column: 5 });
}

#[test]
fn structural_file_builds_scm() {
    let file = parse_model(F1_SCM).unwrap();
    assert_eq!(file.kind, ModelKind::Scm);
    let scm = file.to_scm::<f64>().unwrap();
    let cpt = scm.to_cpt();
    let p = cpt.probability("Y", "1", &["1", "0"]).unwrap();
    assert!((p - 0.4).abs() < 1e-12);
    let p = cpt.probability("M", "1", &["0"]).unwrap();
    assert!((p - 0.2).abs() < 1e-12);
}

#[test]
fn exact_scalar_load() {
    use num_rational::BigRational;
    let model = load_model::<BigRational>(F1).unwrap().to_cpt();
    let p = model.probability("Y", "1", &["0", "0"]).unwrap();
    assert_eq!(*p, BigRational::new(1.into(), 10.into()));
}

#[test]
fn model_round_trips_through_file_form() {
    let scm = parse_model(F1_SCM).unwrap().to_scm::<f64>().unwrap();
    let file = ModelFile::from_scm("F1-SCM", &scm);
    assert_eq!(file, parse_model(F1_SCM).unwrap());
    let cpt = parse_model(F1).unwrap().to_cpt_model::<f64>().unwrap();
    assert_eq!(ModelFile::from_cpt_model("F1", &cpt), parse_model(F1).unwrap());
}
