//! Parameterised query templates for common questions.

use std::collections::BTreeMap;

use super::ast::*;
use super::BoilerplateError;
use crate::graph::vocab;

pub struct Template {
    pub name: &'static str,
    pub params: &'static [&'static str],
    pub optional: &'static [&'static str],
}

pub const TEMPLATES: &[Template] = &[
    Template {
        name: "practices-by-context",
        params: &["domain", "function"],
        optional: &[],
    },
    Template {
        name: "weights-above",
        params: &["location", "characteristic", "threshold"],
        optional: &["name"],
    },
    Template {
        name: "practice-detail",
        params: &["name"],
        optional: &[],
    },
];

fn param<'a>(params: &'a BTreeMap<String, String>, name: &str) -> Result<&'a str, BoilerplateError> {
    params
        .get(name)
        .map(String::as_str)
        .ok_or_else(|| BoilerplateError::MissingParam { name: name.into() })
}

fn one_of<'a>(params: &'a BTreeMap<String, String>, name: &str, allowed: &[&str]) -> Result<&'a str, BoilerplateError> {
    let value = param(params, name)?;
    if allowed.contains(&value) {
        Ok(value)
    } else {
        Err(BoilerplateError::InvalidParam {
            name: name.into(),
            reason: format!("expected one of {}", allowed.join(", ")),
        })
    }
}

fn eq(var: &str, key: &str, value: &str) -> Comparison {
    Comparison {
        lhs: Operand::prop(var, key),
        op: CompOp::Eq,
        rhs: Operand::Literal(Literal::Str(value.into())),
    }
}

fn weight_edge() -> EdgePattern {
    EdgePattern::new(Some("w"), Some(vocab::WEIGHT))
}

/// Builds a query from a named template. Unknown extra parameters are
/// rejected so typos do not silently widen a query.
pub fn expand_boilerplate(name: &str, params: &BTreeMap<String, String>) -> Result<PatternQuery, BoilerplateError> {
    let template = TEMPLATES
        .iter()
        .find(|t| t.name == name)
        .ok_or_else(|| BoilerplateError::UnknownTemplate { name: name.into() })?;
    if let Some(extra) = params
        .keys()
        .find(|k| !template.params.contains(&k.as_str()) && !template.optional.contains(&k.as_str()))
    {
        return Err(BoilerplateError::InvalidParam {
            name: extra.clone(),
            reason: format!("not a parameter of `{name}`"),
        });
    }

    let query = match name {
        "practices-by-context" => {
            let domain = param(params, "domain")?;
            let function = param(params, "function")?;
            PatternQuery {
                paths: vec![
                    PathPattern::node(NodePattern::new(Some("p"), Some(vocab::PRACTICE))).then(
                        EdgePattern::new(Some("wd"), Some(vocab::WEIGHT)),
                        NodePattern::new(Some("d"), Some(vocab::DOMAIN)),
                    ),
                    PathPattern::node(NodePattern::new(Some("p"), None)).then(
                        EdgePattern::new(Some("wf"), Some(vocab::WEIGHT)),
                        NodePattern::new(Some("f"), Some(vocab::FUNCTION)),
                    ),
                ],
                filters: vec![eq("d", vocab::NAME, domain), eq("f", vocab::NAME, function)],
                returns: Projection::All,
            }
        }
        "weights-above" => {
            let mut locations = vec![vocab::PRACTICE];
            locations.extend(vocab::LOCATION_LABELS);
            let location = one_of(params, "location", &locations)?;
            let characteristic = one_of(params, "characteristic", &vocab::CHARACTERISTIC_LABELS)?;
            let raw = param(params, "threshold")?;
            let threshold = raw
                .trim()
                .parse::<f64>()
                .ok()
                .filter(|t| t.is_finite())
                .ok_or_else(|| BoilerplateError::InvalidParam {
                    name: "threshold".into(),
                    reason: format!("`{raw}` is not a finite number"),
                })?;
            let loc_var = initial(location);
            let mut char_var = initial(characteristic);
            if char_var == loc_var || char_var == "w" {
                char_var = "c".into();
            }
            let mut filters = vec![Comparison {
                lhs: Operand::prop("w", vocab::VALUE),
                op: CompOp::Gt,
                rhs: Operand::Literal(Literal::Num(threshold)),
            }];
            if let Some(n) = params.get("name") {
                filters.push(eq(&char_var, vocab::NAME, n));
            }
            PatternQuery {
                paths: vec![PathPattern::node(NodePattern::new(Some(&loc_var), Some(location)))
                    .then(weight_edge(), NodePattern::new(Some(&char_var), Some(characteristic)))],
                filters,
                returns: Projection::All,
            }
        }
        "practice-detail" => {
            let practice = param(params, "name")?;
            PatternQuery {
                paths: vec![PathPattern::node(NodePattern::new(Some("p"), Some(vocab::PRACTICE)))],
                filters: vec![eq("p", vocab::NAME, practice)],
                returns: Projection::Vars(vec!["p".into()]),
            }
        }
        _ => unreachable!("template table and match arms agree"),
    };
    Ok(query)
}

fn initial(label: &str) -> String {
    label
        .chars()
        .next()
        .map(|c| c.to_ascii_lowercase().to_string())
        .unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::query::parse;

    fn params(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
        pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
    }

    #[test]
    fn weights_above_reproduces_the_hybrid_query() {
        let q = expand_boilerplate(
            "weights-above",
            &params(&[
                ("location", "Hybrid"),
                ("characteristic", "Domain"),
                ("threshold", "2"),
                ("name", "Factory Automation"),
            ]),
        )
        .unwrap();
        let expected = parse(
            "MATCH(h:Hybrid)-[w:WEIGHT]->(d:Domain) WHERE w.value > 2 AND d.name = \"Factory Automation\" RETURN *",
        )
        .unwrap();
        assert_eq!(q, expected);
    }

    #[test]
    fn every_template_expands_to_a_valid_query() {
        let cases = [
            (
                "practices-by-context",
                params(&[("domain", "Energy"), ("function", "Monitoring")]),
            ),
            (
                "weights-above",
                params(&[
                    ("location", "Practice"),
                    ("characteristic", "PerformanceEfficiency"),
                    ("threshold", "3.5"),
                ]),
            ),
            ("practice-detail", params(&[("name", "HL:1")])),
        ];
        for (name, p) in cases {
            let q = expand_boilerplate(name, &p).unwrap();
            q.check().unwrap();
            assert_eq!(parse(&q.pretty_print()).unwrap(), q);
        }
        let detail = expand_boilerplate("practice-detail", &params(&[("name", "HL:1")])).unwrap();
        assert_eq!(
            detail.pretty_print(),
            "MATCH (p:Practice) WHERE p.name = \"HL:1\" RETURN p"
        );
    }

    #[test]
    fn parameter_errors() {
        assert_eq!(
            expand_boilerplate("nope", &BTreeMap::new()),
            Err(BoilerplateError::UnknownTemplate { name: "nope".into() })
        );
        assert_eq!(
            expand_boilerplate("practice-detail", &BTreeMap::new()),
            Err(BoilerplateError::MissingParam { name: "name".into() })
        );
        let bad = params(&[
            ("location", "Hybrid"),
            ("characteristic", "Domain"),
            ("threshold", "lots"),
        ]);
        assert!(matches!(
            expand_boilerplate("weights-above", &bad),
            Err(BoilerplateError::InvalidParam { name, .. }) if name == "threshold"
        ));
        let bad = params(&[("location", "Cloud"), ("characteristic", "Domain"), ("threshold", "1")]);
        assert!(matches!(
            expand_boilerplate("weights-above", &bad),
            Err(BoilerplateError::InvalidParam { name, .. }) if name == "location"
        ));
        let extra = params(&[("name", "HL:1"), ("colour", "red")]);
        assert!(matches!(
            expand_boilerplate("practice-detail", &extra),
            Err(BoilerplateError::InvalidParam { name, .. }) if name == "colour"
        ));
    }
}
