use pathfx::dsl::{parse_model, parse_model_bytes, DslError, ModelFile};
use pathfx::serialize_model;
use pathfx_testkit::{cpt_to_scm, fixtures, mutate, mutate_bytes, random_scm, seeded, RandomModelConfig};

fn inside(text: &[u8], e: &DslError) -> bool {
    let pos = e.position();
    let lines = text.split(|&b| b == b'\n').count();
    pos.line >= 1 && pos.column >= 1 && pos.line <= lines.max(1)
}

#[test]
fn fixtures_round_trip() {
    for (name, src) in fixtures::ALL {
        let file = parse_model(src).unwrap_or_else(|e| panic!("{name}: {e}"));
        let text = serialize_model(&file);
        assert_eq!(parse_model(&text).unwrap(), file, "{name}");
        assert_eq!(serialize_model(&parse_model(&text).unwrap()), text, "{name}");
    }
}

#[test]
fn generated_models_round_trip() {
    let mut rng = seeded(3);
    for i in 0..50 {
        let scm = random_scm(&mut rng, &RandomModelConfig::default());
        let file = ModelFile::from_scm(format!("r{i}"), &scm);
        let again = parse_model(&serialize_model(&file)).unwrap();
        assert_eq!(again, file);
        let cpt_file = ModelFile::from_cpt_model(format!("c{i}"), &scm.to_cpt());
        assert_eq!(parse_model(&serialize_model(&cpt_file)).unwrap(), cpt_file);
    }
    let f1 = parse_model(fixtures::F1).unwrap().to_cpt_model::<f64>().unwrap();
    let file = ModelFile::from_scm("t", &cpt_to_scm(&f1));
    assert_eq!(parse_model(&serialize_model(&file)).unwrap(), file);
}

#[test]
fn mutated_sources_never_panic() {
    let mut rng = seeded(9);
    let mut rejected = 0;
    for i in 0..10_000 {
        let (_, src) = fixtures::ALL[i % fixtures::ALL.len()];
        if i % 4 == 3 {
            let bytes = mutate_bytes(&mut rng, src.as_bytes());
            if let Err(e) = parse_model_bytes(&bytes) {
                assert!(inside(&bytes, &e), "{e:?}");
                rejected += 1;
            }
        } else {
            let text = mutate(&mut rng, src);
            match parse_model(&text) {
                Ok(file) => {
                    assert_eq!(parse_model(&serialize_model(&file)).unwrap(), file);
                }
                Err(e) => {
                    assert!(inside(text.as_bytes(), &e), "{e:?}\n{text}");
                    assert!(!e.to_string().is_empty());
                    rejected += 1;
                }
            }
        }
    }
    assert!(rejected > 5_000, "only {rejected} mutations rejected");
}
