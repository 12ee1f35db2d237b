//! Static checks over a parsed program: label uniqueness and variable
//! coverage, preference references and cycles, head-only variables, and
//! statement counts.
//!
//! The report carries three severities. Errors make a program unusable for
//! grounding; a label that does not carry every variable of its rule is an
//! error because its instances would share an identifier. Warnings flag
//! constructs that are downgraded (a mutual preference pair becomes "no
//! strict preference"); infos are advisory (head-only variables are
//! grounded over the whole constant domain).

use std::collections::BTreeMap;

use serde::Serialize;

use super::ast::{Head, Program, Rule, SourceSpan, StatementKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Error,
    Warning,
    Info,
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct Issue {
    pub code: String,
    pub message: String,
    pub file: String,
    pub line: usize,
    pub col: usize,
}

impl Issue {
    fn at(code: &str, message: String, span: &SourceSpan) -> Self {
        Self {
            code: code.to_string(),
            message,
            file: span.file.clone(),
            line: span.line,
            col: span.col,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, Serialize, PartialEq, Eq)]
pub struct Counts {
    pub rules: usize,
    pub preferences: usize,
    pub facts: usize,
}

#[derive(Debug, Clone, Default, Serialize, PartialEq, Eq)]
pub struct ValidationReport {
    pub errors: Vec<Issue>,
    pub warnings: Vec<Issue>,
    pub infos: Vec<Issue>,
    pub counts: Counts,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.errors.is_empty()
    }

    fn push(&mut self, severity: Severity, issue: Issue) {
        match severity {
            Severity::Error => self.errors.push(issue),
            Severity::Warning => self.warnings.push(issue),
            Severity::Info => self.infos.push(issue),
        }
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serializes");
        text.push('\n');
        text
    }
}

/// What a label name is declared as, for reference checks.
struct LabelGroup<'a> {
    arity: usize,
    occurrences: Vec<&'a Rule>,
}

fn label_groups(program: &Program) -> BTreeMap<String, LabelGroup<'_>> {
    let mut groups: BTreeMap<String, LabelGroup> = BTreeMap::new();
    for rule in &program.rules {
        groups
            .entry(rule.label.functor.clone())
            .or_insert_with(|| LabelGroup {
                arity: rule.label.arity(),
                occurrences: Vec::new(),
            })
            .occurrences
            .push(rule);
    }
    groups
}

fn check_duplicate_labels(groups: &BTreeMap<String, LabelGroup>, report: &mut ValidationReport) {
    for (name, group) in groups {
        if group.occurrences.len() == 1 {
            continue;
        }
        // Several statements may legitimately share a label name when every
        // label is ground and pairwise distinct (e.g. a printed ground
        // program declaring r1(lime) and r1(counterfactual)).
        let all_ground = group.occurrences.iter().all(|r| r.label.is_ground());
        let arities_match = group
            .occurrences
            .iter()
            .all(|r| r.label.arity() == group.arity);
        let mut seen: BTreeMap<String, &Rule> = BTreeMap::new();
        for rule in &group.occurrences {
            let key = rule.label.to_string();
            if let Some(first) = seen.get(&key) {
                report.push(
                    Severity::Error,
                    Issue::at(
                        "duplicate_label",
                        format!("duplicate label `{key}` (first declared at {})", first.span),
                        &rule.span,
                    ),
                );
            } else {
                seen.insert(key, rule);
            }
        }
        if !all_ground || !arities_match {
            let first = group.occurrences[0];
            for rule in &group.occurrences[1..] {
                if rule.label.to_string() != first.label.to_string() {
                    report.push(
                        Severity::Error,
                        Issue::at(
                            "duplicate_label",
                            format!(
                                "label name `{name}` is reused by non-ground or mismatched \
                                 declarations (first declared at {})",
                                first.span
                            ),
                            &rule.span,
                        ),
                    );
                }
            }
        }
    }
}

fn check_preference_references(
    program: &Program,
    groups: &BTreeMap<String, LabelGroup>,
    report: &mut ValidationReport,
) {
    for rule in &program.rules {
        let Head::Preference(pref) = &rule.head else {
            continue;
        };
        if !rule.body.is_empty() {
            report.push(
                Severity::Warning,
                Issue::at(
                    "preference_body_ignored",
                    format!(
                        "body of preference rule `{}` is ignored when resolving attacks",
                        rule.label
                    ),
                    &rule.span,
                ),
            );
        }
        for side in [&pref.stronger, &pref.weaker] {
            match groups.get(&side.functor) {
                None => report.push(
                    Severity::Error,
                    Issue::at(
                        "undeclared_preference_label",
                        format!(
                            "preference in `{}` references undeclared rule label `{}`",
                            rule.label, side.functor
                        ),
                        &rule.span,
                    ),
                ),
                Some(group) if group.arity != side.arity() => report.push(
                    Severity::Error,
                    Issue::at(
                        "preference_arity_mismatch",
                        format!(
                            "preference in `{}` uses `{}` with arity {}, declared with arity {}",
                            rule.label,
                            side.functor,
                            side.arity(),
                            group.arity
                        ),
                        &rule.span,
                    ),
                ),
                Some(_) => {}
            }
        }
    }
}

fn head_variables(rule: &Rule) -> Vec<String> {
    let mut head_vars = Vec::new();
    let mut collect = |atom: &crate::kb::ast::Atom| {
        for term in &atom.args {
            if term.is_variable() && !head_vars.iter().any(|v: &String| v == term.name()) {
                head_vars.push(term.name().to_string());
            }
        }
    };
    match &rule.head {
        Head::Literal(l) => collect(&l.atom),
        Head::Preference(p) => {
            collect(&p.stronger);
            collect(&p.weaker);
        }
    }
    head_vars
}

fn body_variables(rule: &Rule) -> Vec<&str> {
    rule.body
        .iter()
        .flat_map(|l| l.atom.args.iter())
        .filter(|t| t.is_variable())
        .map(|t| t.name())
        .collect()
}

/// Variables in head or body that the label does not carry make ground
/// instances indistinguishable, so they are rejected.
fn check_label_coverage(program: &Program, report: &mut ValidationReport) {
    for rule in &program.rules {
        let label_vars: Vec<&str> = rule
            .label
            .args
            .iter()
            .filter(|t| t.is_variable())
            .map(|t| t.name())
            .collect();
        let mut missing: Vec<String> = head_variables(rule);
        for var in body_variables(rule) {
            if !missing.iter().any(|v| v == var) {
                missing.push(var.to_string());
            }
        }
        missing.retain(|v| !label_vars.contains(&v.as_str()));
        if !missing.is_empty() {
            report.push(
                Severity::Error,
                Issue::at(
                    "label_missing_variables",
                    format!(
                        "label `{}` does not carry variable(s) {}; its ground instances \
                         would share one label",
                        rule.label,
                        missing.join(", ")
                    ),
                    &rule.span,
                ),
            );
        }
    }
}

/// Variables that occur in the head but not in the body are instantiated
/// over the whole constant domain rather than derived; worth knowing, not
/// wrong. The preference schemas with empty bodies are the typical case.
fn check_head_only_variables(program: &Program, report: &mut ValidationReport) {
    for rule in &program.rules {
        let body_vars = body_variables(rule);
        let orphans: Vec<String> = head_variables(rule)
            .into_iter()
            .filter(|v| !body_vars.contains(&v.as_str()))
            .collect();
        if !orphans.is_empty() {
            report.push(
                Severity::Info,
                Issue::at(
                    "head_only_variables",
                    format!(
                        "rule `{}` has head-only variables ({}); they are grounded over the \
                         whole constant domain",
                        rule.label,
                        orphans.join(", ")
                    ),
                    &rule.span,
                ),
            );
        }
    }
}

/// Strongly connected components of the schema-level preference graph via
/// Kosaraju's algorithm. Nodes are label names.
fn preference_sccs(edges: &BTreeMap<String, Vec<String>>) -> Vec<Vec<String>> {
    let nodes: Vec<String> = edges.keys().cloned().collect();
    let mut order = Vec::new();
    let mut visited: BTreeMap<&str, bool> = nodes.iter().map(|n| (n.as_str(), false)).collect();

    for node in &nodes {
        if visited[node.as_str()] {
            continue;
        }
        // Iterative post-order DFS.
        let mut stack: Vec<(&str, usize)> = vec![(node, 0)];
        *visited.get_mut(node.as_str()).unwrap() = true;
        while let Some((current, next_child)) = stack.pop() {
            let children = &edges[current];
            if let Some(child) = children.get(next_child) {
                stack.push((current, next_child + 1));
                if edges.contains_key(child) && !visited[child.as_str()] {
                    *visited.get_mut(child.as_str()).unwrap() = true;
                    stack.push((child, 0));
                }
            } else {
                order.push(current.to_string());
            }
        }
    }

    let mut reversed: BTreeMap<&str, Vec<&str>> =
        nodes.iter().map(|n| (n.as_str(), vec![])).collect();
    for (from, tos) in edges {
        for to in tos {
            if let Some(bucket) = reversed.get_mut(to.as_str()) {
                bucket.push(from.as_str());
            }
        }
    }

    let mut assigned: BTreeMap<&str, bool> = nodes.iter().map(|n| (n.as_str(), false)).collect();
    let mut sccs = Vec::new();
    for node in order.iter().rev() {
        if assigned[node.as_str()] {
            continue;
        }
        let mut component = Vec::new();
        let mut stack = vec![node.as_str()];
        *assigned.get_mut(node.as_str()).unwrap() = true;
        while let Some(current) = stack.pop() {
            component.push(current.to_string());
            for &prev in &reversed[current] {
                if !assigned[prev] {
                    *assigned.get_mut(prev).unwrap() = true;
                    stack.push(prev);
                }
            }
        }
        component.sort();
        sccs.push(component);
    }
    sccs
}

fn check_preference_cycles(program: &Program, report: &mut ValidationReport) {
    let mut edges: BTreeMap<String, Vec<String>> = BTreeMap::new();
    let mut spans: BTreeMap<String, &SourceSpan> = BTreeMap::new();
    for rule in &program.rules {
        if let Head::Preference(pref) = &rule.head {
            let from = pref.stronger.functor.clone();
            let to = pref.weaker.functor.clone();
            edges.entry(from.clone()).or_default().push(to.clone());
            edges.entry(to.clone()).or_default();
            spans.entry(from).or_insert(&rule.span);
        }
    }
    for tos in edges.values_mut() {
        tos.sort();
        tos.dedup();
    }

    for component in preference_sccs(&edges) {
        let span = component
            .iter()
            .find_map(|n| spans.get(n.as_str()).copied())
            .cloned()
            .unwrap_or_else(|| SourceSpan::synthetic("<program>"));
        match component.len() {
            1 => {
                let node = &component[0];
                if edges[node].contains(node) {
                    report.push(
                        Severity::Warning,
                        Issue::at(
                            "no_strict_preference",
                            format!("self-preference on `{node}` carries no strict preference"),
                            &span,
                        ),
                    );
                }
            }
            2 => report.push(
                Severity::Warning,
                Issue::at(
                    "no_strict_preference",
                    format!(
                        "no strict preference between {}, {}: mutual preferences cancel out",
                        component[0], component[1]
                    ),
                    &span,
                ),
            ),
            _ => report.push(
                Severity::Error,
                Issue::at(
                    "preference_cycle",
                    format!("preference cycle among {}", component.join(", ")),
                    &span,
                ),
            ),
        }
    }
}

pub fn validate_program(program: &Program) -> ValidationReport {
    let mut report = ValidationReport::default();

    for rule in &program.rules {
        match rule.kind() {
            StatementKind::Rule => report.counts.rules += 1,
            StatementKind::Preference => report.counts.preferences += 1,
            StatementKind::Fact => report.counts.facts += 1,
        }
    }

    let groups = label_groups(program);
    check_duplicate_labels(&groups, &mut report);
    check_label_coverage(program, &mut report);
    check_preference_references(program, &groups, &mut report);
    check_head_only_variables(program, &mut report);
    check_preference_cycles(program, &mut report);
    report
}

/// Concatenates programs, preserving per-rule provenance. Fails with a
/// report when a label is declared in more than one input.
pub fn merge_programs(programs: &[Program]) -> Result<Program, ValidationReport> {
    let mut rules = Vec::new();
    let mut provenance = Vec::new();
    for program in programs {
        rules.extend(program.rules.iter().cloned());
        provenance.extend(program.provenance.iter().cloned());
    }
    let merged = Program::new(rules, provenance);

    let mut report = ValidationReport::default();
    check_duplicate_labels(&label_groups(&merged), &mut report);
    if report.is_valid() {
        Ok(merged)
    } else {
        Err(report)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kb::parse::parse_program;
    use crate::kb::print::print_program;

    const LISTING: &str = include_str!("../../fixtures/kb/full.gkb");

    fn parse(text: &str) -> Program {
        parse_program(text, "<test>").unwrap()
    }

    #[test]
    fn listing_is_valid_with_expected_counts() {
        let report = validate_program(&parse(LISTING));
        assert!(report.is_valid(), "unexpected errors: {:?}", report.errors);
        assert_eq!(
            report.counts,
            Counts {
                rules: 5,
                preferences: 3,
                facts: 6
            }
        );
        assert!(report.warnings.is_empty());
        // The three preference schemas quantify over X with empty bodies.
        assert_eq!(report.infos.len(), 3);
        assert!(report.infos.iter().all(|i| i.code == "head_only_variables"));
    }

    #[test]
    fn duplicate_label_is_an_error() {
        let report = validate_program(&parse("rule(f1, p(a), []). rule(f1, q(b), [])."));
        assert_eq!(report.errors.len(), 1);
        assert_eq!(report.errors[0].code, "duplicate_label");
        assert!(report.errors[0].message.contains("1:1"));
    }

    #[test]
    fn ground_label_variants_of_one_name_are_allowed() {
        let report = validate_program(&parse(
            "rule(r1(lime), use(lime), []). rule(r1(counterfactual), use(counterfactual), []).",
        ));
        assert!(report.is_valid());
    }

    #[test]
    fn schema_label_reuse_is_an_error() {
        let report = validate_program(&parse(
            "rule(r1(X), p(X), [q(X)]). rule(r1(Y), s(Y), [t(Y)]).",
        ));
        assert!(!report.is_valid());
    }

    #[test]
    fn undeclared_preference_reference_is_an_error() {
        let report = validate_program(&parse("rule(a, p, []). rule(q1, prefer(a, missing), [])."));
        assert_eq!(report.errors.len(), 1);
        assert_eq!(report.errors[0].code, "undeclared_preference_label");
    }

    #[test]
    fn preference_arity_mismatch_is_an_error() {
        let report = validate_program(&parse(
            "rule(a(X), p(X), [r(X)]). rule(b, q, []). rule(q1, prefer(a, b), []).",
        ));
        assert!(report
            .errors
            .iter()
            .any(|i| i.code == "preference_arity_mismatch"));
    }

    #[test]
    fn mutual_preference_pair_is_a_warning() {
        let report = validate_program(&parse(
            "rule(a, p, []). rule(b, neg(p), []). \
             rule(q1, prefer(a, b), []). rule(q2, prefer(b, a), []).",
        ));
        assert!(report.is_valid());
        assert_eq!(report.warnings.len(), 1);
        assert_eq!(report.warnings[0].code, "no_strict_preference");
        assert!(report.warnings[0].message.contains("a, b"));
    }

    #[test]
    fn three_cycle_is_an_error() {
        let report = validate_program(&parse(
            "rule(a, p, []). rule(b, q, []). rule(c, r, []). \
             rule(q1, prefer(a, b), []). rule(q2, prefer(b, c), []). rule(q3, prefer(c, a), []).",
        ));
        assert_eq!(report.errors.len(), 1);
        assert_eq!(report.errors[0].code, "preference_cycle");
    }

    #[test]
    fn head_only_variable_is_informational() {
        let report = validate_program(&parse("rule(r9(X), p(X), [])."));
        assert!(report.is_valid());
        assert_eq!(report.infos.len(), 1);
        assert_eq!(report.infos[0].code, "head_only_variables");
    }

    #[test]
    fn uncovered_variables_are_an_error() {
        for bad in ["rule(r9, p(X), []).", "rule(r9, p(a), [q(X)])."] {
            let report = validate_program(&parse(bad));
            assert_eq!(report.errors.len(), 1, "{bad}");
            assert_eq!(report.errors[0].code, "label_missing_variables");
        }
        // Label-only variables are fine: instances stay distinguishable.
        assert!(validate_program(&parse("rule(r9(Z), p(a), []).")).is_valid());
    }

    #[test]
    fn preference_body_is_flagged() {
        let report = validate_program(&parse(
            "rule(a, p, []). rule(b, q, []). rule(q1, prefer(a, b), [p]).",
        ));
        assert!(report.is_valid());
        assert!(report
            .warnings
            .iter()
            .any(|i| i.code == "preference_body_ignored"));
    }

    #[test]
    fn merge_of_split_listing_restores_all_statements() {
        let requirements = parse_program(
            include_str!("../../fixtures/kb/requirements.gkb"),
            "requirements.gkb",
        )
        .unwrap();
        let facts =
            parse_program(include_str!("../../fixtures/kb/facts.gkb"), "facts.gkb").unwrap();
        let merged = merge_programs(&[requirements, facts]).unwrap();
        assert_eq!(merged.rules.len(), 14);
        let counts = validate_program(&merged).counts;
        assert_eq!(counts.rules + counts.preferences + counts.facts, 14);
        // Same statements as the single-file listing.
        assert_eq!(print_program(&merged), print_program(&parse(LISTING)));
    }

    #[test]
    fn merge_with_empty_is_identity() {
        let p = parse(LISTING);
        let merged = merge_programs(&[p.clone(), Program::default()]).unwrap();
        assert_eq!(merged, p);
    }

    #[test]
    fn merge_duplicate_label_names_both_spans() {
        let a = parse_program("rule(f1, p(a), []).", "a.gkb").unwrap();
        let b = parse_program("\nrule(f1, p(a), []).", "b.gkb").unwrap();
        let err = merge_programs(&[a, b]).unwrap_err();
        assert_eq!(err.errors.len(), 1);
        let issue = &err.errors[0];
        assert!(issue.message.contains("a.gkb:1:1"), "{}", issue.message);
        assert_eq!((issue.file.as_str(), issue.line), ("b.gkb", 2));
    }

    #[test]
    fn validation_report_serializes_with_counts() {
        let json = validate_program(&parse(LISTING)).to_json();
        let value: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(value["counts"]["rules"], 5);
        assert_eq!(value["counts"]["preferences"], 3);
        assert_eq!(value["counts"]["facts"], 6);
        assert!(value["errors"].as_array().unwrap().is_empty());
    }
}
