use thiserror::Error;

use super::{BodyElement, ConditionalLiteral, Literal, Rule, Span};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{span}: unsafe variable `{variable}` in rule `{rule}`: {reason}")]
pub struct SafetyViolation {
    pub span: Span,
    pub rule: String,
    pub variable: String,
    pub reason: String,
}

/// Variables of a conditional literal that occur nowhere else in the rule:
/// not in the head and not in any body element outside conditional
/// literals. Returned in order of first occurrence.
pub fn local_variables(rule: &Rule, literal: &ConditionalLiteral) -> Vec<String> {
    let global = rule.global_variables();
    let mut vars = Vec::new();
    literal.collect_variables(&mut vars);
    vars.retain(|v| !global.contains(v));
    vars
}

/// Every variable in the head, under negation or in a comparison must occur
/// in a positive body atom outside conditional literals; every local
/// variable of a conditional literal must occur in one of its positive
/// conditions.
pub fn check_safety(rule: &Rule) -> Result<(), SafetyViolation> {
    let mut bound = Vec::new();
    for element in &rule.body {
        if let BodyElement::Positive(a) = element {
            a.collect_variables(&mut bound);
        }
    }

    let violation = |variable: &str, reason: &str| SafetyViolation {
        span: rule.span,
        rule: rule.to_string(),
        variable: variable.to_string(),
        reason: reason.to_string(),
    };

    if let Some(head) = rule.head.atom() {
        for v in head.variables() {
            if !bound.contains(&v) {
                return Err(violation(&v, "head variable has no positive body occurrence"));
            }
        }
    }

    for element in &rule.body {
        let mut vars = Vec::new();
        match element {
            BodyElement::Positive(_) => continue,
            BodyElement::Negative(a) | BodyElement::DoubleNegative(a) => a.collect_variables(&mut vars),
            BodyElement::Comparison(c) => c.collect_variables(&mut vars),
            BodyElement::Conditional(cl) => {
                let local = local_variables(rule, cl);
                let mut cl_bound = Vec::new();
                for c in &cl.conditions {
                    if let Literal::Positive(a) = c {
                        a.collect_variables(&mut cl_bound);
                    }
                }
                for v in &local {
                    if !cl_bound.contains(v) {
                        return Err(violation(
                            v,
                            "local variable of a conditional literal has no positive condition occurrence",
                        ));
                    }
                }
                cl.collect_variables(&mut vars);
                vars.retain(|v| !local.contains(v));
            }
        }
        for v in vars {
            if !bound.contains(&v) {
                return Err(violation(&v, "variable has no positive body occurrence"));
            }
        }
    }
    Ok(())
}
