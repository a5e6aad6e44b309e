use std::path::Path;

use pathfx::dsl::{parse_model_bytes, ModelFile};
use pathfx::graph::{directed_paths, find_recanting_witness, parse_path_spec, validate_path, Diagram};
use pathfx::infer::{counterfactual_distribution, exact_marginal, factorization_of, observational_factorization};
use pathfx::intervene::InterventionDiagram;
use pathfx::sample::{nested_counterfactual_sample, sample_model, NestedSpec};
use pathfx::table::probability_json;
use pathfx::{
    apply_do, apply_info, apply_path, causal_diagram, tv_distance, AnyModel, CausalModel, CptModel, DoIntervention,
    EmpiricalTable, InfoIntervention, JointTable, PathIntervention, TableError, TaggedVar, World,
};
use serde_json::{json, Value};

use crate::args::{Command, InterventionArgs};
use crate::error::CliError;
use crate::Output;

struct Loaded {
    file: ModelFile,
    model: AnyModel<f64>,
    cpt: CptModel<f64>,
}

fn load(path: &Path) -> Result<Loaded, CliError> {
    let bytes = std::fs::read(path).map_err(|e| CliError::semantic(format!("{}: {e}", path.display())))?;
    let file = parse_model_bytes(&bytes).map_err(|e| CliError::from_dsl(path, &e))?;
    let model = file.to_any::<f64>()?;
    let cpt = model.to_cpt();
    Ok(Loaded { file, model, cpt })
}

enum Mode {
    Observe,
    Do(DoIntervention),
    Info(InfoIntervention),
    Path(PathIntervention),
}

impl Mode {
    fn resolve(args: &InterventionArgs, model: &CptModel<f64>) -> Result<Self, CliError> {
        let kinds = [!args.do_.is_empty(), !args.info.is_empty(), args.path.is_some() || args.value.is_some()];
        if kinds.iter().filter(|k| **k).count() > 1 {
            return Err(CliError::usage("--do, --info and --path cannot be combined"));
        }
        if !args.do_.is_empty() {
            let iv = DoIntervention::parse(&args.do_)?;
            iv.assignments.validate(model)?;
            return Ok(Mode::Do(iv));
        }
        if !args.info.is_empty() {
            let iv = InfoIntervention::parse(&args.info)?;
            iv.assignments.validate(model)?;
            return Ok(Mode::Info(iv));
        }
        match (&args.path, &args.value) {
            (Some(path), Some(value)) => Ok(Mode::Path(PathIntervention::parse(model, path, value.as_str())?)),
            (Some(_), None) => Err(CliError::usage("--path needs --value")),
            (None, Some(_)) => Err(CliError::usage("--value needs --path")),
            (None, None) => Ok(Mode::Observe),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Mode::Observe => json!({ "kind": "none" }),
            Mode::Do(iv) => json!({ "kind": "do", "assignments": assignments_json(iv.assignments.iter()) }),
            Mode::Info(iv) => json!({ "kind": "info", "assignments": assignments_json(iv.assignments.iter()) }),
            Mode::Path(iv) => json!({ "kind": "path", "path": iv.path.to_string(), "value": iv.value }),
        }
    }

    /// The model after a `do` or `info` rewrite; `None` for path mode.
    fn rewritten(&self, model: &CptModel<f64>) -> Result<Option<CptModel<f64>>, CliError> {
        Ok(match self {
            Mode::Observe => Some(model.clone()),
            Mode::Do(iv) => Some(apply_do(model, iv)?.model),
            Mode::Info(iv) => Some(apply_info(model, iv)?.model),
            Mode::Path(_) => None,
        })
    }
}

fn assignments_json<'a>(items: impl Iterator<Item = (&'a str, &'a str)>) -> Value {
    Value::Object(items.map(|(k, v)| (k.to_string(), json!(v))).collect())
}

pub(crate) fn run(command: &Command) -> Result<Output, CliError> {
    match command {
        Command::Validate { file } => validate(file),
        Command::Paths { file, from, to } => paths(file, from, to),
        Command::Witness { file, path } => witness(file, path),
        Command::Diagram {
            file,
            intervention,
            augmented,
            output,
        } => diagram(file, intervention, *augmented, output.as_deref()),
        Command::Infer {
            file,
            intervention,
            target,
            keep_factual,
            format: _,
        } => infer(file, intervention, target, *keep_factual),
        Command::Sample {
            file,
            intervention,
            n,
            seed,
            target,
            keep_all,
        } => sample(file, intervention, *n, *seed, target, *keep_all),
        Command::Compare {
            file,
            path,
            value,
            nested,
            n,
            seed,
            target,
        } => compare(file, path, value, nested.as_deref(), *n, *seed, target.as_deref()),
    }
}

fn report(loaded: &Loaded, intervention: Value, result: Value, seed: Option<u64>) -> Output {
    Output::Report {
        model: loaded.file.name.clone(),
        intervention,
        result,
        seed,
    }
}

fn validate(path: &Path) -> Result<Output, CliError> {
    let loaded = load(path)?;
    let model = loaded.model.as_causal_model();
    let variables: Vec<Value> = model
        .variables()
        .iter()
        .enumerate()
        .map(|(i, v)| json!({ "name": v.name, "values": v.domain.values(), "parents": model.parents_of(i) }))
        .collect();
    let dag = causal_diagram(model);
    let mut result = json!({
        "kind": loaded.file.kind.as_str(),
        "variables": variables,
        "edges": dag.edges().into_iter().map(|(a, b)| json!([a, b])).collect::<Vec<_>>(),
        "topological_order": dag.topological_order(),
    });
    if let Some(scm) = loaded.model.as_scm() {
        result["noises"] = scm
            .noises()
            .iter()
            .map(|u| json!({ "name": u.name, "values": u.domain.values() }))
            .collect();
    }
    Ok(report(&loaded, json!({ "kind": "none" }), result, None))
}

fn paths(path: &Path, from: &str, to: &str) -> Result<Output, CliError> {
    let loaded = load(path)?;
    let found = directed_paths(&causal_diagram(&loaded.cpt), from, to)?;
    let list: Vec<&[String]> = found.iter().map(|p| p.nodes()).collect();
    let result = json!({ "from": from, "to": to, "count": list.len(), "paths": list });
    Ok(report(&loaded, json!({ "kind": "none" }), result, None))
}

fn witness(path: &Path, spec: &str) -> Result<Output, CliError> {
    let loaded = load(path)?;
    let dag = causal_diagram(&loaded.cpt);
    let causal_path = validate_path(&dag, &parse_path_spec(spec)?)?;
    let found = find_recanting_witness(&dag, &causal_path);
    let result = json!({
        "path": causal_path.to_string(),
        "has_witness": found.is_some(),
        "witness": found,
    });
    Ok(report(&loaded, json!({ "kind": "none" }), result, None))
}

fn diagram(path: &Path, args: &InterventionArgs, augmented: bool, output: Option<&Path>) -> Result<Output, CliError> {
    let loaded = load(path)?;
    let model = &loaded.cpt;
    let diagram: Diagram = match Mode::resolve(args, model)? {
        Mode::Observe => apply_do(model, &DoIntervention::default())?.intervention_diagram(augmented),
        Mode::Do(iv) => apply_do(model, &iv)?.intervention_diagram(augmented),
        Mode::Info(iv) => apply_info(model, &iv)?.intervention_diagram(augmented),
        Mode::Path(iv) => apply_path(model, &iv, false)?.intervention_diagram(augmented),
    };
    let dot = diagram.to_dot();
    match output {
        Some(out) => {
            std::fs::write(out, dot).map_err(|e| CliError::semantic(format!("{}: {e}", out.display())))?;
            Ok(Output::Written)
        }
        None => Ok(Output::Dot(dot)),
    }
}

fn factual_columns(model: &CptModel<f64>) -> Vec<TaggedVar> {
    model
        .topological_order()
        .into_iter()
        .map(|i| TaggedVar::factual(&model.variables()[i].name))
        .collect()
}

fn check_variables(model: &CptModel<f64>, names: &[String]) -> Result<(), CliError> {
    match names.iter().find(|n| model.variable_index(n).is_none()) {
        Some(n) => Err(CliError::semantic(format!("unknown variable `{n}`"))),
        None => Ok(()),
    }
}

/// `E[column]` for every column whose labels are numbers.
fn expectations(table: &JointTable<f64>) -> Result<Value, CliError> {
    let mut out = Vec::new();
    for column in table.columns() {
        match table.expectation(column) {
            Ok(e) => out.push(json!({ "name": column.name, "world": column.world.as_str(), "value": probability_json(e) })),
            Err(TableError::NonNumericDomain { .. }) => {}
            Err(e) => return Err(e.into()),
        }
    }
    Ok(Value::Array(out))
}

fn infer(path: &Path, args: &InterventionArgs, targets: &[String], keep_factual: bool) -> Result<Output, CliError> {
    let loaded = load(path)?;
    let model = &loaded.cpt;
    check_variables(model, targets)?;
    let mode = Mode::resolve(args, model)?;
    let (tables, factorization, columns) = match &mode {
        Mode::Path(iv) => {
            let pm = apply_path(model, iv, false)?;
            let names: Vec<String> = if targets.is_empty() {
                vec![iv.path.tail().to_string()]
            } else {
                targets.to_vec()
            };
            if let Some(off) = names.iter().find(|n| !pm.is_counterfactual(n)) {
                return Err(CliError::semantic(format!(
                    "`{off}` is not downstream of the head along {}, so it has no counterfactual copy",
                    iv.path
                )));
            }
            let mut columns = if keep_factual { factual_columns(model) } else { Vec::new() };
            columns.extend(names.iter().map(TaggedVar::pi));
            (model.clone(), factorization_of(&pm), columns)
        }
        _ => {
            let rewritten = mode.rewritten(model)?.expect("not a path");
            let columns = if targets.is_empty() {
                factual_columns(&rewritten)
            } else {
                targets.iter().map(TaggedVar::factual).collect()
            };
            let f = observational_factorization(&rewritten);
            (rewritten, f, columns)
        }
    };
    let marginal = exact_marginal(&tables, &factorization, &columns)?;
    let result = json!({
        "formula": factorization.to_string(),
        "factorization": factorization.to_json(),
        "marginal": marginal.to_json(),
        "expectations": expectations(&marginal)?,
    });
    Ok(report(&loaded, mode.to_json(), result, None))
}

fn sample(
    path: &Path,
    args: &InterventionArgs,
    n: u64,
    seed: u64,
    targets: &[String],
    keep_all: bool,
) -> Result<Output, CliError> {
    let loaded = load(path)?;
    let model = &loaded.cpt;
    check_variables(model, targets)?;
    if n == 0 {
        return Err(CliError::usage("--n must be at least 1"));
    }
    let mode = Mode::resolve(args, model)?;
    let (table, world) = match &mode {
        Mode::Path(iv) => (sample_model(&apply_path(model, iv, keep_all)?, n, seed)?, World::Pi),
        _ if keep_all => return Err(CliError::usage("--keep-all needs --path")),
        _ => (sample_model(&mode.rewritten(model)?.expect("not a path"), n, seed)?, World::Factual),
    };
    let table = if targets.is_empty() {
        table
    } else {
        let keep: Vec<TaggedVar> = targets.iter().map(|t| TaggedVar::new(t, world)).collect();
        table.marginalize(&keep)?
    };
    Ok(report(&loaded, mode.to_json(), table.to_json(), Some(seed)))
}

fn mean_json(table: &EmpiricalTable, column: &TaggedVar) -> Value {
    table.mean(column).map_or(Value::Null, probability_json)
}

#[allow(clippy::too_many_arguments)]
fn compare(
    path: &Path,
    spec: &str,
    value: &str,
    nested: Option<&str>,
    n: u64,
    seed: u64,
    target: Option<&str>,
) -> Result<Output, CliError> {
    let loaded = load(path)?;
    let model = &loaded.cpt;
    if n == 0 {
        return Err(CliError::usage("--n must be at least 1"));
    }
    let iv = PathIntervention::parse(model, spec, value)?;
    let target = target.unwrap_or(iv.path.tail()).to_string();
    check_variables(model, std::slice::from_ref(&target))?;
    let nested_values = nested
        .map(|text| match text.split(',').map(str::trim).collect::<Vec<_>>()[..] {
            [a, b] if !a.is_empty() && !b.is_empty() => Ok((a.to_string(), b.to_string())),
            _ => Err(CliError::usage(format!("--nested expects `a,a'`, got `{text}`"))),
        })
        .transpose()?;
    if nested_values.is_some() && target != iv.path.tail() {
        return Err(CliError::usage("the nested counterfactual is defined for the path's last node only"));
    }

    let column = TaggedVar::pi(&target);
    let exact = counterfactual_distribution(model, &iv, &target)?;
    let empirical = sample_model(&apply_path(model, &iv, false)?, n, seed)?.marginalize(std::slice::from_ref(&column))?;
    let exact_mean = match exact.expectation(&column) {
        Ok(e) => probability_json(e),
        Err(_) => Value::Null,
    };
    let mut result = json!({
        "target": { "name": column.name, "world": column.world.as_str() },
        "exact": exact.to_json(),
        "exact_expectation": exact_mean,
        "empirical": empirical.to_json(),
        "empirical_expectation": mean_json(&empirical, &column),
        "tv_distance": probability_json(tv_distance(&empirical, &exact)?),
    });
    if let Some((on, off)) = nested_values {
        let spec = NestedSpec::parse(model, spec, &on, &off)?;
        let table = nested_counterfactual_sample(&loaded.model, &spec, n, seed)?;
        let nested_column = TaggedVar::new(&target, World::Nested);
        result["nested"] = json!({
            "on_path_value": on,
            "off_path_value": off,
            "empirical": table.to_json(),
            "expectation": mean_json(&table, &nested_column),
        });
    }
    let intervention = json!({ "kind": "path", "path": iv.path.to_string(), "value": iv.value });
    Ok(report(&loaded, intervention, result, Some(seed)))
}
