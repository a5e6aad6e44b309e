use std::fmt::Write as _;

use super::{Declaration, ModelFile};
use crate::scalar::format_probability;

/// Canonical text: one declaration per line (tables span several), LF line
/// endings, probabilities with up to 12 significant digits.
pub fn serialize_model(file: &ModelFile) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "model {}", quote(&file.name));
    let mut previous: Option<std::mem::Discriminant<Declaration>> = None;
    for decl in &file.declarations {
        let kind = std::mem::discriminant(decl);
        if previous != Some(kind) {
            out.push('\n');
            previous = Some(kind);
        }
        match decl {
            Declaration::Var(v) => {
                let _ = writeln!(out, "var {} : {{{}}}", v.name, values(&v.values));
            }
            Declaration::Noise(n) => {
                let _ = writeln!(
                    out,
                    "noise {} : {{{}}} ~ [{}]",
                    n.name,
                    values(&n.values),
                    probs(&n.probs)
                );
            }
            Declaration::Cpt(c) => {
                let head = format!("cpt {} | {}", c.child, c.parents.join(", "));
                let head = head.trim_end();
                match c.rows.as_slice() {
                    [row] if c.parents.is_empty() => {
                        let _ = writeln!(out, "{head} : [{}]", probs(&row.probs));
                    }
                    rows => {
                        let _ = writeln!(out, "{head} : {{");
                        for row in rows {
                            let _ = writeln!(out, "  ({}): [{}]", values(&row.key), probs(&row.probs));
                        }
                        out.push_str("}\n");
                    }
                }
            }
            Declaration::Mech(m) => {
                let _ = writeln!(
                    out,
                    "mech {} <- ({}; {}) {{",
                    m.child,
                    m.parents.join(", "),
                    m.noise
                );
                for row in &m.rows {
                    let _ = writeln!(
                        out,
                        "  ({}; {}) -> {}",
                        values(&row.inputs),
                        quote_value(&row.noise),
                        quote_value(&row.output)
                    );
                }
                out.push_str("}\n");
            }
        }
    }
    out
}

fn values(vals: &[String]) -> String {
    vals.iter().map(|v| quote_value(v)).collect::<Vec<_>>().join(", ")
}

fn probs(ps: &[f64]) -> String {
    ps.iter()
        .map(|&p| format_probability(p))
        .collect::<Vec<_>>()
        .join(", ")
}

/// Bare when the lexer would read the value back as a single word.
fn quote_value(value: &str) -> String {
    let body = value.strip_prefix('-').unwrap_or(value);
    let bare = !body.is_empty()
        && body
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '.');
    if bare {
        value.to_string()
    } else {
        quote(value)
    }
}

fn quote(text: &str) -> String {
    let escaped = text
        .replace('\\', "\\\\")
        .replace('"', "\\\"")
        .replace('\n', "\\n");
    format!("\"{escaped}\"")
}
