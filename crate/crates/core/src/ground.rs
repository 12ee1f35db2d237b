//! Instantiation of rule schemas over the finite constant domain.
//!
//! Grounding is whole-program: every schema is instantiated for every
//! assignment of its variables to domain constants, after first applying
//! any query bindings. Domains in practice are tiny (explainer names), so
//! exhaustive instantiation is the simple and correct choice; a cap guards
//! against pathological inputs.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::kb::{Bindings, Program, Query, Rule};

/// Default cap on the number of ground instances.
pub const DEFAULT_INSTANCE_CAP: usize = 100_000;

/// Ordered set of constants a program is grounded over: everything that
/// occurs syntactically in the program plus any query bindings, in
/// lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstantDomain {
    constants: Vec<String>,
}

impl ConstantDomain {
    pub fn constants(&self) -> &[String] {
        &self.constants
    }

    pub fn len(&self) -> usize {
        self.constants.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constants.is_empty()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.constants
            .binary_search_by(|c| c.as_str().cmp(name))
            .is_ok()
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum GroundError {
    #[error("grounding would produce at least {at_least} instances, above the cap of {cap}")]
    TooManyInstances { cap: usize, at_least: usize },
    #[error("ground label `{label}` produced by more than one schema instantiation")]
    LabelCollision { label: String },
}

/// Schema and substitution a ground rule was produced from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundOrigin {
    pub schema_label: String,
    pub substitution: Bindings,
}

/// A variable-free program together with where each instance came from,
/// keyed by the printed ground label.
#[derive(Debug, Clone)]
pub struct GroundProgram {
    pub program: Program,
    pub origin: BTreeMap<String, GroundOrigin>,
    pub domain: ConstantDomain,
}

pub fn collect_constants(program: &Program, bindings: &Bindings) -> ConstantDomain {
    let mut set = program.constants();
    for constant in bindings.values() {
        set.insert(constant.clone());
    }
    ConstantDomain {
        constants: set.into_iter().collect(),
    }
}

/// All ground instances of one rule: bindings are applied first, the
/// remaining variables are enumerated over the domain in order (rightmost
/// variable fastest). Bound constants outside the domain simply extend it
/// for this rule.
pub fn ground_rule(rule: &Rule, domain: &ConstantDomain, bindings: &Bindings) -> Vec<Rule> {
    let bound = rule.substitute(bindings);
    let free: Vec<String> = bound.variables();
    if free.is_empty() {
        return vec![bound];
    }
    if domain.is_empty() {
        return Vec::new();
    }

    let mut out = Vec::new();
    let mut indices = vec![0usize; free.len()];
    loop {
        let assignment: Bindings = free
            .iter()
            .zip(&indices)
            .map(|(var, &i)| (var.clone(), domain.constants[i].clone()))
            .collect();
        out.push(bound.substitute(&assignment));

        // Odometer increment, rightmost fastest.
        let mut slot = free.len();
        loop {
            if slot == 0 {
                return out;
            }
            slot -= 1;
            indices[slot] += 1;
            if indices[slot] < domain.len() {
                break;
            }
            indices[slot] = 0;
        }
    }
}

fn instance_count(rule: &Rule, domain: &ConstantDomain, bindings: &Bindings) -> usize {
    let free = rule.substitute(bindings).variables().len();
    if free == 0 {
        1
    } else {
        domain.len().saturating_pow(free as u32)
    }
}

/// Grounds every rule and preference schema under the query's bindings and
/// records the origin of each instance.
pub fn ground_program(
    program: &Program,
    query: &Query,
    cap: usize,
) -> Result<GroundProgram, GroundError> {
    ground_with_bindings(program, &query.bindings, cap)
}

/// The core of [`ground_program`]: grounding is driven entirely by the
/// bindings, the query literal itself plays no role here.
pub fn ground_with_bindings(
    program: &Program,
    bindings: &Bindings,
    cap: usize,
) -> Result<GroundProgram, GroundError> {
    let domain = collect_constants(program, bindings);

    let mut predicted = 0usize;
    for rule in &program.rules {
        predicted = predicted.saturating_add(instance_count(rule, &domain, bindings));
        if predicted > cap {
            return Err(GroundError::TooManyInstances {
                cap,
                at_least: predicted,
            });
        }
    }

    let mut rules = Vec::new();
    let mut origin = BTreeMap::new();
    for schema in &program.rules {
        let schema_vars = schema.variables();
        for instance in ground_rule(schema, &domain, bindings) {
            let label = instance.label.to_string();
            let substitution: Bindings = schema_vars
                .iter()
                .zip(substitution_of(schema, &instance, bindings))
                .map(|(var, constant)| (var.clone(), constant))
                .collect();
            if origin
                .insert(
                    label.clone(),
                    GroundOrigin {
                        schema_label: schema.label.to_string(),
                        substitution,
                    },
                )
                .is_some()
            {
                return Err(GroundError::LabelCollision { label });
            }
            rules.push(instance);
        }
    }

    Ok(GroundProgram {
        program: Program::new(rules, program.provenance.clone()),
        origin,
        domain,
    })
}

/// Reconstructs the constants assigned to each schema variable for one
/// instance, in the schema's variable order.
fn substitution_of(schema: &Rule, instance: &Rule, bindings: &Bindings) -> Vec<String> {
    // Walk schema and instance terms in lockstep; every variable position in
    // the schema holds the assigned constant in the instance.
    let mut assignment: BTreeMap<String, String> = BTreeMap::new();
    let schema_terms = rule_terms(schema);
    let instance_terms = rule_terms(instance);
    for (s, i) in schema_terms.iter().zip(instance_terms.iter()) {
        if let crate::kb::Term::Variable(v) = s {
            assignment.insert(v.clone(), i.name().to_string());
        }
    }
    for (var, constant) in bindings {
        assignment
            .entry(var.clone())
            .or_insert_with(|| constant.clone());
    }
    schema
        .variables()
        .iter()
        .map(|v| assignment.get(v).cloned().unwrap_or_default())
        .collect()
}

fn rule_terms(rule: &Rule) -> Vec<crate::kb::Term> {
    use crate::kb::Head;
    let mut terms: Vec<crate::kb::Term> = rule.label.args.clone();
    match &rule.head {
        Head::Literal(l) => terms.extend(l.atom.args.clone()),
        Head::Preference(p) => {
            terms.extend(p.stronger.args.clone());
            terms.extend(p.weaker.args.clone());
        }
    }
    for lit in &rule.body {
        terms.extend(lit.atom.args.clone());
    }
    terms
}
