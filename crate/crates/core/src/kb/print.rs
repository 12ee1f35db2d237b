//! Canonical pretty-printer: one statement per line, a single space after
//! each comma, empty bodies printed as `[]`. Printing a parsed program and
//! parsing it back yields a structurally equal program, and the printed
//! form is a fixed point of `print . parse`.

use super::ast::{Program, Rule};

pub fn print_rule(rule: &Rule) -> String {
    let body = rule
        .body
        .iter()
        .map(|lit| lit.to_string())
        .collect::<Vec<_>>()
        .join(", ");
    format!("rule({}, {}, [{}]).", rule.label, rule.head, body)
}

/// Canonical text of a whole program; empty programs print as empty text.
pub fn print_program(program: &Program) -> String {
    let mut out = String::new();
    for rule in &program.rules {
        out.push_str(&print_rule(rule));
        out.push('\n');
    }
    out
}
