//! Core syntax tree for the rule language: terms, literals, labelled rules
//! and whole programs.
//!
//! Terms are flat: an atom is a functor applied to constants and variables
//! only. Inline bindings (`X = c`) are a surface form; the parser applies
//! them to the enclosing statement, so a constructed tree never contains
//! binding nodes.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// Where a statement came from: file identifier, 1-based line and column.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SourceSpan {
    pub file: String,
    pub line: usize,
    pub col: usize,
}

impl SourceSpan {
    pub fn new(file: impl Into<String>, line: usize, col: usize) -> Self {
        Self {
            file: file.into(),
            line,
            col,
        }
    }

    /// Span for statements that were synthesised rather than parsed.
    pub fn synthetic(origin: impl Into<String>) -> Self {
        Self::new(origin, 0, 0)
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.file, self.line, self.col)
    }
}

/// A substitution of constants for variables, keyed by variable name.
pub type Bindings = BTreeMap<String, String>;

/// An argument position inside an atom or label.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Constant(String),
    Variable(String),
}

impl Term {
    pub fn is_variable(&self) -> bool {
        matches!(self, Term::Variable(_))
    }

    pub fn name(&self) -> &str {
        match self {
            Term::Constant(n) | Term::Variable(n) => n,
        }
    }

    pub fn substitute(&self, bindings: &Bindings) -> Term {
        match self {
            Term::Variable(v) => match bindings.get(v) {
                Some(c) => Term::Constant(c.clone()),
                None => self.clone(),
            },
            Term::Constant(_) => self.clone(),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A functor applied to flat argument terms. Serves both as the atom of a
/// literal and as a rule label; zero-arity atoms print without parentheses.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub functor: String,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(functor: impl Into<String>, args: Vec<Term>) -> Self {
        Self {
            functor: functor.into(),
            args,
        }
    }

    /// Zero-arity atom.
    pub fn nullary(functor: impl Into<String>) -> Self {
        Self::new(functor, Vec::new())
    }

    /// Unary atom over a constant, e.g. `use(lime)`.
    pub fn unary(functor: impl Into<String>, constant: impl Into<String>) -> Self {
        Self::new(functor, vec![Term::Constant(constant.into())])
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(|t| !t.is_variable())
    }

    pub fn substitute(&self, bindings: &Bindings) -> Atom {
        Atom {
            functor: self.functor.clone(),
            args: self.args.iter().map(|t| t.substitute(bindings)).collect(),
        }
    }

    fn collect_variables(&self, out: &mut Vec<String>) {
        for arg in &self.args {
            if let Term::Variable(v) = arg {
                if !out.iter().any(|seen| seen == v) {
                    out.push(v.clone());
                }
            }
        }
    }

    fn collect_constants(&self, out: &mut BTreeSet<String>) {
        for arg in &self.args {
            if let Term::Constant(c) = arg {
                out.insert(c.clone());
            }
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.functor)?;
        if !self.args.is_empty() {
            write!(f, "(")?;
            for (i, arg) in self.args.iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{arg}")?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Polarity {
    Positive,
    Negative,
}

/// An atom with explicit polarity. Negation is strong: `neg(L)` asserts the
/// falsity of `L`, it is not failure to derive `L`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub polarity: Polarity,
    pub atom: Atom,
}

impl Literal {
    pub fn positive(atom: Atom) -> Self {
        Self {
            polarity: Polarity::Positive,
            atom,
        }
    }

    pub fn negative(atom: Atom) -> Self {
        Self {
            polarity: Polarity::Negative,
            atom,
        }
    }

    pub fn is_positive(&self) -> bool {
        self.polarity == Polarity::Positive
    }

    /// The literal with the opposite polarity over the same atom.
    pub fn complement(&self) -> Literal {
        Literal {
            polarity: match self.polarity {
                Polarity::Positive => Polarity::Negative,
                Polarity::Negative => Polarity::Positive,
            },
            atom: self.atom.clone(),
        }
    }

    pub fn is_ground(&self) -> bool {
        self.atom.is_ground()
    }

    pub fn substitute(&self, bindings: &Bindings) -> Literal {
        Literal {
            polarity: self.polarity,
            atom: self.atom.substitute(bindings),
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.polarity {
            Polarity::Positive => write!(f, "{}", self.atom),
            Polarity::Negative => write!(f, "neg({})", self.atom),
        }
    }
}

/// `prefer(stronger, weaker)`: the rule labelled `stronger` takes strict
/// priority over the rule labelled `weaker`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PreferenceAtom {
    pub stronger: Atom,
    pub weaker: Atom,
}

impl PreferenceAtom {
    pub fn substitute(&self, bindings: &Bindings) -> PreferenceAtom {
        PreferenceAtom {
            stronger: self.stronger.substitute(bindings),
            weaker: self.weaker.substitute(bindings),
        }
    }

    pub fn is_ground(&self) -> bool {
        self.stronger.is_ground() && self.weaker.is_ground()
    }
}

impl fmt::Display for PreferenceAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "prefer({}, {})", self.stronger, self.weaker)
    }
}

/// Head of a rule: an ordinary literal, or a preference between rule labels.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Head {
    Literal(Literal),
    Preference(PreferenceAtom),
}

impl Head {
    pub fn substitute(&self, bindings: &Bindings) -> Head {
        match self {
            Head::Literal(l) => Head::Literal(l.substitute(bindings)),
            Head::Preference(p) => Head::Preference(p.substitute(bindings)),
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Head::Literal(l) => l.is_ground(),
            Head::Preference(p) => p.is_ground(),
        }
    }

    fn collect_variables(&self, out: &mut Vec<String>) {
        match self {
            Head::Literal(l) => l.atom.collect_variables(out),
            Head::Preference(p) => {
                p.stronger.collect_variables(out);
                p.weaker.collect_variables(out);
            }
        }
    }

    fn collect_constants(&self, out: &mut BTreeSet<String>) {
        match self {
            Head::Literal(l) => l.atom.collect_constants(out),
            Head::Preference(p) => {
                p.stronger.collect_constants(out);
                p.weaker.collect_constants(out);
            }
        }
    }
}

impl fmt::Display for Head {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Head::Literal(l) => write!(f, "{l}"),
            Head::Preference(p) => write!(f, "{p}"),
        }
    }
}

/// Classification of a statement by shape.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StatementKind {
    /// Non-preference rule with a non-empty body, or a non-ground head.
    Rule,
    /// Head is a `prefer` atom.
    Preference,
    /// Empty body and ground literal head.
    Fact,
}

/// A labelled defeasible rule `rule(Label, Head, Body)`.
///
/// Equality is structural over label, head and body; the source span is
/// carried as metadata only.
#[derive(Debug, Clone)]
pub struct Rule {
    pub label: Atom,
    pub head: Head,
    pub body: Vec<Literal>,
    pub span: SourceSpan,
}

impl PartialEq for Rule {
    fn eq(&self, other: &Self) -> bool {
        self.label == other.label && self.head == other.head && self.body == other.body
    }
}

impl Eq for Rule {}

impl Rule {
    pub fn new(label: Atom, head: Head, body: Vec<Literal>, span: SourceSpan) -> Self {
        Self {
            label,
            head,
            body,
            span,
        }
    }

    pub fn kind(&self) -> StatementKind {
        match &self.head {
            Head::Preference(_) => StatementKind::Preference,
            Head::Literal(l) if self.body.is_empty() && l.is_ground() => StatementKind::Fact,
            Head::Literal(_) => StatementKind::Rule,
        }
    }

    pub fn is_preference(&self) -> bool {
        self.kind() == StatementKind::Preference
    }

    pub fn is_fact(&self) -> bool {
        self.kind() == StatementKind::Fact
    }

    pub fn is_ground(&self) -> bool {
        self.label.is_ground() && self.head.is_ground() && self.body.iter().all(Literal::is_ground)
    }

    /// Distinct variable names in first-occurrence order: label, head, body.
    pub fn variables(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.label.collect_variables(&mut out);
        self.head.collect_variables(&mut out);
        for lit in &self.body {
            lit.atom.collect_variables(&mut out);
        }
        out
    }

    pub fn substitute(&self, bindings: &Bindings) -> Rule {
        Rule {
            label: self.label.substitute(bindings),
            head: self.head.substitute(bindings),
            body: self.body.iter().map(|l| l.substitute(bindings)).collect(),
            span: self.span.clone(),
        }
    }

    fn collect_constants(&self, out: &mut BTreeSet<String>) {
        self.label.collect_constants(out);
        self.head.collect_constants(out);
        for lit in &self.body {
            lit.atom.collect_constants(out);
        }
    }
}

/// An ordered collection of rules with the files they came from.
///
/// Equality is structural over the rule list; provenance is metadata.
#[derive(Debug, Clone, Default)]
pub struct Program {
    pub rules: Vec<Rule>,
    pub provenance: Vec<String>,
}

impl PartialEq for Program {
    fn eq(&self, other: &Self) -> bool {
        self.rules == other.rules
    }
}

impl Eq for Program {}

impl Program {
    pub fn new(rules: Vec<Rule>, provenance: Vec<String>) -> Self {
        Self { rules, provenance }
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    /// All constant names occurring syntactically anywhere in the program.
    pub fn constants(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for rule in &self.rules {
            rule.collect_constants(&mut out);
        }
        out
    }
}

/// A goal to solve for: the normalized literal plus any bindings written
/// inline as `Var = constant`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    pub literal: Literal,
    pub bindings: Bindings,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lit(text_polarity: bool, functor: &str, arg: &str) -> Literal {
        let atom = Atom::unary(functor, arg);
        if text_polarity {
            Literal::positive(atom)
        } else {
            Literal::negative(atom)
        }
    }

    #[test]
    fn complement_is_an_involution() {
        let l = lit(false, "use", "lime");
        assert_eq!(l.complement().complement(), l);
        assert_ne!(l.complement(), l);
    }

    #[test]
    fn variables_in_first_occurrence_order() {
        let rule = Rule::new(
            Atom::new("r", vec![Term::Variable("B".into())]),
            Head::Literal(Literal::positive(Atom::new(
                "p",
                vec![Term::Variable("A".into()), Term::Variable("B".into())],
            ))),
            vec![Literal::positive(Atom::new(
                "q",
                vec![Term::Variable("C".into()), Term::Variable("A".into())],
            ))],
            SourceSpan::synthetic("<test>"),
        );
        assert_eq!(rule.variables(), vec!["B", "A", "C"]);
    }

    #[test]
    fn statement_kinds() {
        let span = SourceSpan::synthetic("<test>");
        let fact = Rule::new(
            Atom::nullary("f1"),
            Head::Literal(lit(true, "is_sparse", "lime")),
            vec![],
            span.clone(),
        );
        assert_eq!(fact.kind(), StatementKind::Fact);

        let schema = Rule::new(
            Atom::new("r1", vec![Term::Variable("X".into())]),
            Head::Literal(Literal::positive(Atom::new(
                "use",
                vec![Term::Variable("X".into())],
            ))),
            vec![],
            span.clone(),
        );
        // Empty body but non-ground head: still a rule schema, not a fact.
        assert_eq!(schema.kind(), StatementKind::Rule);

        let pref = Rule::new(
            Atom::nullary("pr1"),
            Head::Preference(PreferenceAtom {
                stronger: Atom::nullary("a"),
                weaker: Atom::nullary("b"),
            }),
            vec![],
            span,
        );
        assert_eq!(pref.kind(), StatementKind::Preference);
    }

    #[test]
    fn rule_equality_ignores_span() {
        let a = Rule::new(
            Atom::nullary("f1"),
            Head::Literal(lit(true, "p", "a")),
            vec![],
            SourceSpan::new("one.gkb", 1, 1),
        );
        let b = Rule::new(
            Atom::nullary("f1"),
            Head::Literal(lit(true, "p", "a")),
            vec![],
            SourceSpan::new("two.gkb", 9, 4),
        );
        assert_eq!(a, b);
    }
}
