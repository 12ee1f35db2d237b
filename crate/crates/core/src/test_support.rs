//! Generators shared by the property tests of several modules.
//!
//! Generated programs have unique labels by construction, and preference
//! rules reference labels that the same program declares, so most samples
//! survive validation.

use proptest::prelude::*;
use proptest::sample::Index;

use crate::kb::{Atom, Head, Literal, PreferenceAtom, Program, Rule, SourceSpan, Term};

pub(crate) fn constant_name() -> impl Strategy<Value = String> {
    "[a-z][a-z0-9_]{0,6}".prop_filter("reserved functor", |s| {
        !crate::kb::parse::RESERVED_FUNCTORS.contains(&s.as_str())
    })
}

pub(crate) fn variable_name() -> impl Strategy<Value = String> {
    "[A-Z][a-z0-9]{0,3}".prop_map(|s| s.to_string())
}

pub(crate) fn term() -> impl Strategy<Value = Term> {
    prop_oneof![
        constant_name().prop_map(Term::Constant),
        variable_name().prop_map(Term::Variable),
    ]
}

pub(crate) fn atom() -> impl Strategy<Value = Atom> {
    (constant_name(), proptest::collection::vec(term(), 0..3))
        .prop_map(|(functor, args)| Atom::new(functor, args))
}

pub(crate) fn literal() -> impl Strategy<Value = Literal> {
    (any::<bool>(), atom()).prop_map(|(positive, atom)| {
        if positive {
            Literal::positive(atom)
        } else {
            Literal::negative(atom)
        }
    })
}

pub(crate) fn label() -> impl Strategy<Value = Atom> {
    (
        constant_name(),
        proptest::collection::vec(variable_name().prop_map(Term::Variable), 0..2),
    )
        .prop_map(|(functor, args)| Atom::new(functor, args))
}

type RuleSpec = (Atom, Literal, Vec<Literal>);

fn rule_spec() -> impl Strategy<Value = RuleSpec> {
    (
        label(),
        literal(),
        proptest::collection::vec(literal(), 0..3),
    )
}

/// Fresh variables of the side's declared arity.
fn side_atom(declared: &Atom, prefix: &str) -> Atom {
    Atom::new(
        declared.functor.clone(),
        (1..=declared.arity())
            .map(|i| Term::Variable(format!("{prefix}{i}")))
            .collect(),
    )
}

pub(crate) fn program() -> impl Strategy<Value = Program> {
    (
        proptest::collection::vec(rule_spec(), 0..8),
        proptest::collection::vec((any::<Index>(), any::<Index>()), 0..3),
    )
        .prop_map(|(specs, preference_picks)| {
            let span = SourceSpan::synthetic("<generated>");
            let mut rules: Vec<Rule> = specs
                .into_iter()
                .enumerate()
                .map(|(i, (mut label, head, body))| {
                    // Indexed suffix keeps labels unique; i is a single digit,
                    // so two distinct indices never print alike.
                    label.functor = format!("{}_{i}", label.functor);
                    let draft = Rule::new(label, Head::Literal(head), body, span.clone());
                    // The label must carry every variable of the rule, or
                    // validation rejects it.
                    let mut label = draft.label.clone();
                    label.args = draft.variables().into_iter().map(Term::Variable).collect();
                    Rule::new(label, draft.head, draft.body, draft.span)
                })
                .collect();
            if !rules.is_empty() {
                let declared: Vec<Atom> = rules.iter().map(|r| r.label.clone()).collect();
                for (j, (a, b)) in preference_picks.iter().enumerate() {
                    let stronger = side_atom(&declared[a.index(declared.len())], "V");
                    let weaker = side_atom(&declared[b.index(declared.len())], "W");
                    let mut params = stronger.args.clone();
                    for term in &weaker.args {
                        if !params.contains(term) {
                            params.push(term.clone());
                        }
                    }
                    rules.push(Rule::new(
                        Atom::new(format!("p{j}_pref"), params),
                        Head::Preference(PreferenceAtom { stronger, weaker }),
                        Vec::new(),
                        span.clone(),
                    ));
                }
            }
            Program::new(rules, vec!["<generated>".into()])
        })
}
