//! LP-format writer and the variable-mapping sidecar.

use std::fmt::Write as _;

use num_traits::{One, Signed, Zero};
use serde_json::{json, Map, Value};

use super::{Coef, LinearModel, Role, Sense, VarKind};
use crate::decimal::{big, is_terminating, render, Precision};

const TERMS_PER_LINE: usize = 8;

/// Exact decimal text for a coefficient with a terminating expansion.
fn number(c: Coef) -> String {
    let r = big(c);
    if is_terminating(&r) {
        let mut places = 0u32;
        let mut d = *c.denom();
        while d != 1 {
            d = if d % 10 == 0 {
                d / 10
            } else if d % 5 == 0 {
                d / 5
            } else {
                d / 2
            };
            places += 1;
        }
        render(&r, Precision::Places(places))
    } else {
        render(&r, Precision::Significant(17))
    }
}

fn write_terms(out: &mut String, terms: &[(usize, Coef)], model: &LinearModel) {
    if terms.is_empty() {
        out.push_str(" 0");
        return;
    }
    for (k, &(var, c)) in terms.iter().enumerate() {
        if k > 0 && k % TERMS_PER_LINE == 0 {
            out.push_str("\n  ");
        }
        let magnitude = c.abs();
        match (k, c.is_negative()) {
            (0, false) => out.push(' '),
            (0, true) => out.push_str(" -"),
            (_, false) => out.push_str(" + "),
            (_, true) => out.push_str(" - "),
        }
        if !magnitude.is_one() {
            write!(out, "{} ", number(magnitude)).unwrap();
        }
        out.push_str(&model.variables[var].name);
    }
}

/// Renders the model in LP format. Output is a pure function of the model.
pub fn emit_lp(model: &LinearModel) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "\\ modularity density model: n={} m={} edges={}",
        model.n,
        model.m,
        model.edges.len()
    )
    .unwrap();
    out.push_str("Maximize\n obj:");
    write_terms(&mut out, &model.objective, model);
    out.push_str("\nSubject To\n");
    for row in &model.constraints {
        write!(out, " {}:", row.name).unwrap();
        write_terms(&mut out, &row.terms, model);
        let sense = match row.sense {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        };
        writeln!(out, " {sense} {}", number(row.rhs)).unwrap();
    }
    out.push_str("Bounds\n");
    for var in &model.variables {
        match var.kind {
            VarKind::Binary => {
                if var.upper.is_zero() {
                    writeln!(out, " {} = 0", var.name).unwrap();
                }
            }
            VarKind::Continuous => {
                writeln!(out, " {} <= {} <= {}", number(var.lower), var.name, number(var.upper)).unwrap();
            }
        }
    }
    out.push_str("Binary\n");
    let binaries: Vec<&str> = model
        .variables
        .iter()
        .filter(|v| v.kind == VarKind::Binary)
        .map(|v| v.name.as_str())
        .collect();
    for chunk in binaries.chunks(TERMS_PER_LINE) {
        writeln!(out, " {}", chunk.join(" ")).unwrap();
    }
    out.push_str("End\n");
    out
}

/// Variable name to (vertex, community) mapping, 1-based, for decoding
/// external solver output.
pub fn sidecar_json(model: &LinearModel) -> Value {
    let mut vars = Map::new();
    for var in &model.variables {
        let entry = match var.role {
            Role::Assign { vertex, community } => {
                json!({"role": "x", "vertex": vertex + 1, "community": community + 1})
            }
            Role::Product { edge, community } => {
                let (i, j) = model.edges[edge];
                json!({"role": "w", "vertices": [i + 1, j + 1], "community": community + 1})
            }
            Role::Density { community } => json!({"role": "a", "community": community + 1}),
            Role::Scaled { vertex, community } => {
                json!({"role": "y", "vertex": vertex + 1, "community": community + 1})
            }
        };
        vars.insert(var.name.clone(), entry);
    }
    json!({
        "schema": "mdnet/1",
        "n": model.n,
        "m": model.m,
        "weak_L": model.options.weak.map(|w| w.offset()),
        "symmetry_break": model.options.symmetry_break,
        "alpha_bounds": [number(model.bounds.lower), number(model.bounds.upper)],
        "variables": vars,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use crate::metrics::Weak;
    use crate::model::{build_model, AlphaRule, BuildOptions};

    fn triangle_model(opts: BuildOptions) -> LinearModel {
        build_model(&Graph::parse_edge_list("1 2\n2 3\n1 3").unwrap(), 2, opts).unwrap()
    }

    #[test]
    fn numbers() {
        assert_eq!(number(Coef::new(-33, 2)), "-16.5");
        assert_eq!(number(Coef::new(30_303, 1_000_000)), "0.030303");
        assert_eq!(number(Coef::from_integer(4)), "4");
        assert_eq!(number(Coef::new(1, 40)), "0.025");
    }

    #[test]
    fn objective_line_and_sections() {
        let lp = emit_lp(&triangle_model(BuildOptions::default()));
        assert!(lp.contains("Maximize\n obj: a_1 + a_2\n"), "{lp}");
        let order: Vec<usize> = ["Maximize", "Subject To", "Bounds", "Binary", "End"]
            .iter()
            .map(|s| lp.find(&format!("\n{s}")).or_else(|| lp.find(s)).unwrap())
            .collect();
        assert!(order.windows(2).all(|w| w[0] < w[1]));
        assert!(lp.contains(
            " link_1: 4 w_1_2_1 + 4 w_2_3_1 + 4 w_1_3_1 - 2 x_1_1 - 2 x_2_1 - 2 x_3_1 - y_1_1 - y_2_1\n   - y_3_1 = 0\n"
        ), "{lp}");
        assert!(lp.contains(" -2 <= a_1 <= 2\n"));
        assert!(lp.contains(" mc_up_a_1_1: y_1_1 - a_1 + 2 x_1_1 <= 2\n"), "{lp}");
    }

    #[test]
    fn weak_rows_and_degree_pair_bounds() {
        let opts = BuildOptions {
            weak: Some(Weak::Strict),
            alpha_rule: AlphaRule::DegreePair,
            ..Default::default()
        };
        let lp = emit_lp(&triangle_model(opts));
        assert!(lp.contains(" weak_2: 4 w_1_2_2 + 4 w_2_3_2 + 4 w_1_3_2 - 2 x_1_2 - 2 x_2_2 - 2 x_3_2 >= 1\n"));
        assert!(lp.contains(" 1 <= a_1 <= 2\n"));
        // y bounds widen to include zero.
        assert!(lp.contains(" 0 <= y_1_1 <= 2\n"));
    }

    #[test]
    fn deterministic_bytes() {
        let model = triangle_model(BuildOptions::default());
        assert_eq!(emit_lp(&model), emit_lp(&model.clone()));
        assert_eq!(sidecar_json(&model).to_string(), sidecar_json(&model).to_string());
    }

    #[test]
    fn sidecar_maps_names() {
        let v = sidecar_json(&triangle_model(BuildOptions::default()));
        assert_eq!(v["variables"]["x_3_2"]["vertex"], 3);
        assert_eq!(v["variables"]["x_3_2"]["community"], 2);
        assert_eq!(v["variables"]["w_1_3_1"]["vertices"], json!([1, 3]));
        assert_eq!(v["variables"].as_object().unwrap().len(), 20);
        assert_eq!(v["alpha_bounds"], json!(["-2", "2"]));
    }

    #[test]
    fn long_rows_wrap() {
        let g = crate::generators::zachary_graph();
        let lp = emit_lp(&build_model(&g, 2, BuildOptions::default()).unwrap());
        assert!(lp.lines().all(|l| l.len() < 255));
    }
}
