//! Explainer selection: compile explainer profiles and a stakeholder model
//! into knowledge-base statements, query `use(e)` and `neg(use(e))` per
//! candidate, and rank the outcomes.
//!
//! Both polarities are queried explicitly: under grounded semantics "not
//! accepted" is weaker than "the negation is accepted", and the two
//! verdicts drive four distinct statuses. When no candidate comes out
//! recommended, the stakeholder's default explainer is chosen with the
//! fallback flag set, so a selection is always made.

use std::collections::BTreeMap;

use serde::Deserialize;
use thiserror::Error;

use crate::framework::{build_framework, ArgumentationFramework};
use crate::ground::{ground_with_bindings, GroundError, GroundProgram};
use crate::kb::{
    merge_programs, parse_program, validate_program, Atom, Bindings, Head, Literal, ParseError,
    Program, Rule, SourceSpan, Term, ValidationReport,
};
use crate::solver::{accept, AcceptanceMode, QueryVerdict};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AttributeValue {
    True,
    False,
    Unknown,
}

/// An explainer's registered characteristics. `True` attributes compile to
/// positive facts, `False` to negated facts, `Unknown` to nothing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExplainerProfile {
    pub name: String,
    pub attributes: BTreeMap<String, AttributeValue>,
    pub extra_statements: Vec<Rule>,
}

/// The stakeholder's requirement rules, rule preferences (as label-name
/// pairs) and default explainer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StakeholderModel {
    pub requirement_rules: Vec<Rule>,
    pub preference_pairs: Vec<(String, String)>,
    pub default_explainer: String,
}

#[derive(Debug, Error)]
pub enum SelectorError {
    #[error("no candidates given")]
    NoCandidates,
    #[error("invalid identifier `{0}`: expected [a-z][a-zA-Z0-9_]*")]
    InvalidIdentifier(String),
    #[error("unknown candidate `{name}`; registered profiles: {registered}")]
    UnknownCandidate { name: String, registered: String },
    #[error("preference pair references `{0}`, which is not a declared rule label")]
    UnknownPreferenceLabel(String),
    #[error("{origin}: {message}")]
    Json { origin: String, message: String },
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("knowledge base is invalid: {}", first_error(.0))]
    InvalidKnowledgeBase(ValidationReport),
    #[error(transparent)]
    Ground(#[from] GroundError),
}

fn first_error(report: &ValidationReport) -> String {
    report
        .errors
        .first()
        .map(|issue| issue.message.clone())
        .unwrap_or_else(|| "unknown error".into())
}

fn valid_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_lowercase() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawAttribute {
    Flag(bool),
    Text(String),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProfile {
    name: String,
    #[serde(default)]
    attributes: BTreeMap<String, RawAttribute>,
    #[serde(default)]
    extra: Option<String>,
}

impl ExplainerProfile {
    /// Loads a `.profile.json` document:
    /// `{"name": ..., "attributes": {"pred": true|false|"unknown"}, "extra": "<statements>"}`.
    pub fn from_json(text: &str, origin: &str) -> Result<Self, SelectorError> {
        let raw: RawProfile = serde_json::from_str(text).map_err(|e| SelectorError::Json {
            origin: origin.to_string(),
            message: e.to_string(),
        })?;
        let mut attributes = BTreeMap::new();
        for (key, value) in raw.attributes {
            let value = match value {
                RawAttribute::Flag(true) => AttributeValue::True,
                RawAttribute::Flag(false) => AttributeValue::False,
                RawAttribute::Text(s) if s == "unknown" => AttributeValue::Unknown,
                RawAttribute::Text(s) => {
                    return Err(SelectorError::Json {
                        origin: origin.to_string(),
                        message: format!(
                            "attribute `{key}`: expected true, false or \"unknown\", found \"{s}\""
                        ),
                    })
                }
            };
            attributes.insert(key, value);
        }
        let extra_statements = match raw.extra {
            Some(text) => parse_program(&text, origin)?.rules,
            None => Vec::new(),
        };
        Ok(Self {
            name: raw.name,
            attributes,
            extra_statements,
        })
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawStakeholder {
    #[serde(default)]
    rules: String,
    #[serde(default)]
    preferences: Vec<(String, String)>,
    default_explainer: String,
}

impl StakeholderModel {
    pub fn from_json(text: &str, origin: &str) -> Result<Self, SelectorError> {
        let raw: RawStakeholder = serde_json::from_str(text).map_err(|e| SelectorError::Json {
            origin: origin.to_string(),
            message: e.to_string(),
        })?;
        Ok(Self {
            requirement_rules: parse_program(&raw.rules, origin)?.rules,
            preference_pairs: raw.preferences,
            default_explainer: raw.default_explainer,
        })
    }

    pub fn default_only(default_explainer: impl Into<String>) -> Self {
        Self {
            requirement_rules: Vec::new(),
            preference_pairs: Vec::new(),
            default_explainer: default_explainer.into(),
        }
    }

    /// Compiles the name-pair preferences into preference rules, resolving
    /// each side's arity against the declared labels. Sides of equal arity
    /// share variables, so the preference pairs rule instances per
    /// candidate.
    fn preference_rules(
        &self,
        declared: &BTreeMap<String, usize>,
    ) -> Result<Vec<Rule>, SelectorError> {
        let mut rules = Vec::new();
        for (index, (stronger, weaker)) in self.preference_pairs.iter().enumerate() {
            let arity_of = |name: &str| {
                declared
                    .get(name)
                    .copied()
                    .ok_or_else(|| SelectorError::UnknownPreferenceLabel(name.to_string()))
            };
            let stronger_arity = arity_of(stronger)?;
            let weaker_arity = arity_of(weaker)?;
            let vars = |prefix: &str, arity: usize| -> Vec<Term> {
                (1..=arity)
                    .map(|i| Term::Variable(format!("{prefix}{i}")))
                    .collect()
            };
            let (left, right) = if stronger_arity == weaker_arity {
                (vars("V", stronger_arity), vars("V", weaker_arity))
            } else {
                (vars("L", stronger_arity), vars("R", weaker_arity))
            };
            let mut label_args = left.clone();
            for term in &right {
                if !label_args.contains(term) {
                    label_args.push(term.clone());
                }
            }
            rules.push(Rule::new(
                Atom::new(format!("sp{}", index + 1), label_args),
                Head::Preference(crate::kb::PreferenceAtom {
                    stronger: Atom::new(stronger.clone(), left),
                    weaker: Atom::new(weaker.clone(), right),
                }),
                Vec::new(),
                SourceSpan::synthetic("<stakeholder>"),
            ));
        }
        Ok(rules)
    }
}

/// Compiles a profile into facts, attributes in sorted order: `true` gives
/// `attr(name)`, `false` gives `neg(attr(name))`, `unknown` contributes
/// nothing. Extra statements are appended verbatim.
pub fn facts_from_profile(profile: &ExplainerProfile) -> Result<Vec<Rule>, SelectorError> {
    if !valid_identifier(&profile.name) {
        return Err(SelectorError::InvalidIdentifier(profile.name.clone()));
    }
    let mut rules = Vec::new();
    for (attribute, value) in &profile.attributes {
        if !valid_identifier(attribute) {
            return Err(SelectorError::InvalidIdentifier(attribute.clone()));
        }
        let atom = Atom::unary(attribute.clone(), profile.name.clone());
        let literal = match value {
            AttributeValue::True => Literal::positive(atom),
            AttributeValue::False => Literal::negative(atom),
            AttributeValue::Unknown => continue,
        };
        rules.push(Rule::new(
            Atom::unary(format!("f_{attribute}"), profile.name.clone()),
            Head::Literal(literal),
            Vec::new(),
            SourceSpan::synthetic(format!("<profile:{}>", profile.name)),
        ));
    }
    rules.extend(profile.extra_statements.iter().cloned());
    Ok(rules)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum CandidateStatus {
    Recommended,
    Undecided,
    Conflicted,
    Rejected,
}

impl CandidateStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            CandidateStatus::Recommended => "recommended",
            CandidateStatus::Undecided => "undecided",
            CandidateStatus::Conflicted => "conflicted",
            CandidateStatus::Rejected => "rejected",
        }
    }
}

impl std::fmt::Display for CandidateStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone)]
pub struct CandidateOutcome {
    pub name: String,
    pub status: CandidateStatus,
    pub use_verdict: QueryVerdict,
    pub neg_use_verdict: QueryVerdict,
    pub use_framework: ArgumentationFramework,
    pub neg_use_framework: ArgumentationFramework,
}

#[derive(Debug, Clone)]
pub struct SelectionReport {
    /// Candidates ranked recommended > undecided > conflicted > rejected,
    /// ties broken by input order.
    pub candidates: Vec<CandidateOutcome>,
    pub chosen: String,
    pub fallback_used: bool,
}

impl SelectionReport {
    pub fn recommended(&self) -> Option<&CandidateOutcome> {
        self.candidates
            .iter()
            .find(|c| c.status == CandidateStatus::Recommended)
    }
}

fn use_literal(candidate: &str) -> Literal {
    Literal::positive(Atom::unary("use", candidate))
}

fn evaluate_candidate(gp: &GroundProgram, name: &str) -> CandidateOutcome {
    let positive = use_literal(name);
    let negative = positive.complement();

    let use_framework = build_framework(gp, &positive);
    let use_verdict = accept(&use_framework, &positive, AcceptanceMode::default());
    let neg_use_framework = build_framework(gp, &negative);
    let neg_use_verdict = accept(&neg_use_framework, &negative, AcceptanceMode::default());

    let status = match (use_verdict.accepted, neg_use_verdict.accepted) {
        (true, false) => CandidateStatus::Recommended,
        (false, true) => CandidateStatus::Rejected,
        (true, true) => CandidateStatus::Conflicted,
        (false, false) => CandidateStatus::Undecided,
    };
    CandidateOutcome {
        name: name.to_string(),
        status,
        use_verdict,
        neg_use_verdict,
        use_framework,
        neg_use_framework,
    }
}

/// Runs both polarity queries for every candidate over the knowledge base
/// extended with the stakeholder model, and ranks the results. Candidate
/// solves are independent and run on their own threads.
pub fn select_explainer(
    kb: &Program,
    candidates: &[String],
    model: &StakeholderModel,
    cap: usize,
) -> Result<SelectionReport, SelectorError> {
    if candidates.is_empty() {
        return Err(SelectorError::NoCandidates);
    }
    for candidate in candidates {
        if !valid_identifier(candidate) {
            return Err(SelectorError::InvalidIdentifier(candidate.clone()));
        }
    }

    let mut declared: BTreeMap<String, usize> = BTreeMap::new();
    for rule in kb.rules.iter().chain(&model.requirement_rules) {
        declared
            .entry(rule.label.functor.clone())
            .or_insert(rule.label.arity());
    }
    let mut stakeholder_rules = model.requirement_rules.clone();
    stakeholder_rules.extend(model.preference_rules(&declared)?);
    let stakeholder_program = Program::new(stakeholder_rules, vec!["<stakeholder>".into()]);

    let merged = merge_programs(&[kb.clone(), stakeholder_program])
        .map_err(SelectorError::InvalidKnowledgeBase)?;
    let report = validate_program(&merged);
    if !report.is_valid() {
        return Err(SelectorError::InvalidKnowledgeBase(report));
    }

    let gp = ground_with_bindings(&merged, &Bindings::new(), cap)?;

    let mut slots: Vec<Option<CandidateOutcome>> = candidates.iter().map(|_| None).collect();
    if candidates.len() == 1 {
        slots[0] = Some(evaluate_candidate(&gp, &candidates[0]));
    } else {
        let gp_ref = &gp;
        std::thread::scope(|scope| {
            for (slot, name) in slots.iter_mut().zip(candidates) {
                scope.spawn(move || {
                    *slot = Some(evaluate_candidate(gp_ref, name));
                });
            }
        });
    }
    let mut outcomes: Vec<CandidateOutcome> = slots
        .into_iter()
        .map(|slot| slot.expect("solved"))
        .collect();

    // Stable sort: ties keep input order.
    outcomes.sort_by_key(|outcome| outcome.status);

    let (chosen, fallback_used) = match outcomes
        .iter()
        .find(|c| c.status == CandidateStatus::Recommended)
    {
        Some(best) => (best.name.clone(), false),
        None => (model.default_explainer.clone(), true),
    };

    Ok(SelectionReport {
        candidates: outcomes,
        chosen,
        fallback_used,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ground::DEFAULT_INSTANCE_CAP;
    use crate::kb::parse_program;

    const LISTING: &str = include_str!("../fixtures/kb/full.gkb");
    const CURATED: &str = include_str!("../fixtures/kb/curated.gkb");
    const LIME_PROFILE: &str = include_str!("../fixtures/profiles/lime.profile.json");
    const CF_PROFILE: &str = include_str!("../fixtures/profiles/counterfactual.profile.json");
    const SHAP_PROFILE: &str = include_str!("../fixtures/profiles/shap.profile.json");
    const AGENCY: &str = include_str!("../fixtures/stakeholder/agency.stakeholder.json");

    fn names(items: &[&str]) -> Vec<String> {
        items.iter().map(|s| s.to_string()).collect()
    }

    fn heads_of(rules: &[Rule]) -> Vec<String> {
        rules.iter().map(|r| r.head.to_string()).collect()
    }

    #[test]
    fn lime_profile_compiles_to_the_listing_facts() {
        let profile = ExplainerProfile::from_json(LIME_PROFILE, "lime.profile.json").unwrap();
        let facts = facts_from_profile(&profile).unwrap();
        let mut heads = heads_of(&facts);
        heads.sort();
        // Same contents as f2, f3, f5 and f6 of the bundled listing.
        assert_eq!(
            heads,
            [
                "is_computationally_cheap(lime)",
                "is_sparse(lime)",
                "neg(is_stable(lime))",
                "susceptible_to_adversarial_attack(lime)"
            ]
        );
        assert!(facts.iter().all(|f| f.is_fact()));
    }

    #[test]
    fn counterfactual_profile_compiles_to_its_two_facts() {
        let profile = ExplainerProfile::from_json(CF_PROFILE, "cf.profile.json").unwrap();
        let facts = facts_from_profile(&profile).unwrap();
        let mut heads = heads_of(&facts);
        heads.sort();
        assert_eq!(
            heads,
            [
                "is_sparse(counterfactual)",
                "neg(is_computationally_cheap(counterfactual))"
            ]
        );
    }

    #[test]
    fn unknown_attributes_contribute_nothing() {
        let profile = ExplainerProfile::from_json(SHAP_PROFILE, "shap.profile.json").unwrap();
        assert!(facts_from_profile(&profile).unwrap().is_empty());
    }

    #[test]
    fn invalid_predicate_names_are_rejected() {
        let profile = ExplainerProfile {
            name: "lime".into(),
            attributes: [("Is_Sparse".to_string(), AttributeValue::True)]
                .into_iter()
                .collect(),
            extra_statements: Vec::new(),
        };
        assert!(matches!(
            facts_from_profile(&profile),
            Err(SelectorError::InvalidIdentifier(_))
        ));
    }

    #[test]
    fn profile_extra_statements_are_appended() {
        let profile = ExplainerProfile::from_json(
            r#"{"name": "lime", "attributes": {}, "extra": "rule(x1, fast(lime), [])."}"#,
            "<test>",
        )
        .unwrap();
        let facts = facts_from_profile(&profile).unwrap();
        assert_eq!(facts.len(), 1);
        assert_eq!(facts[0].label.to_string(), "x1");
    }

    #[test]
    fn curated_kb_selects_the_counterfactual_method() {
        let kb = parse_program(CURATED, "curated.gkb").unwrap();
        let model = StakeholderModel::default_only("lime");
        let report = select_explainer(
            &kb,
            &names(&["lime", "counterfactual"]),
            &model,
            DEFAULT_INSTANCE_CAP,
        )
        .unwrap();

        assert_eq!(report.chosen, "counterfactual");
        assert!(!report.fallback_used);
        assert_eq!(report.candidates[0].name, "counterfactual");
        assert_eq!(report.candidates[0].status, CandidateStatus::Recommended);
        assert_eq!(report.candidates[1].name, "lime");
        assert_eq!(report.candidates[1].status, CandidateStatus::Rejected);

        let lime = &report.candidates[1];
        assert!(lime.neg_use_verdict.accepted);
        assert_eq!(
            lime.neg_use_verdict.supporting.iter().collect::<Vec<_>>(),
            ["r2(lime)"]
        );
        assert_eq!(
            lime.neg_use_verdict
                .labelling
                .position(&lime.neg_use_framework)
                .iter()
                .collect::<Vec<_>>(),
            ["r2(lime)", "r5(lime)"]
        );

        let counterfactual = &report.candidates[0];
        let in_set = counterfactual.use_verdict.labelling.in_set();
        for id in [
            "r1(counterfactual)",
            "r3(counterfactual)",
            "r4(counterfactual)",
        ] {
            assert!(in_set.contains(id), "missing {id}");
        }
    }

    #[test]
    fn unmodified_listing_recommends_lime_instead() {
        let kb = parse_program(LISTING, "full.gkb").unwrap();
        let model = StakeholderModel::default_only("lime");
        let report = select_explainer(
            &kb,
            &names(&["lime", "counterfactual"]),
            &model,
            DEFAULT_INSTANCE_CAP,
        )
        .unwrap();
        // With lime recorded as computationally cheap, the cost objection
        // never forms and lime's sparsity argument stands unopposed.
        assert_eq!(report.chosen, "lime");
        assert!(!report.fallback_used);
        assert_eq!(report.candidates[0].status, CandidateStatus::Recommended);
        assert_eq!(report.candidates[1].status, CandidateStatus::Rejected);
    }

    #[test]
    fn empty_kb_falls_back_to_the_default() {
        let report = select_explainer(
            &Program::default(),
            &names(&["lime"]),
            &StakeholderModel::default_only("lime"),
            DEFAULT_INSTANCE_CAP,
        )
        .unwrap();
        assert_eq!(report.candidates[0].status, CandidateStatus::Undecided);
        assert_eq!(report.chosen, "lime");
        assert!(report.fallback_used);
    }

    #[test]
    fn contradictory_facts_make_a_candidate_conflicted() {
        let kb = parse_program(
            "rule(c1, use(lime), []). rule(c2, neg(use(lime)), []).",
            "<test>",
        )
        .unwrap();
        let report = select_explainer(
            &kb,
            &names(&["lime"]),
            &StakeholderModel::default_only("lime"),
            DEFAULT_INSTANCE_CAP,
        )
        .unwrap();
        let outcome = &report.candidates[0];
        assert!(outcome.use_verdict.accepted);
        assert!(outcome.neg_use_verdict.accepted);
        assert_eq!(outcome.status, CandidateStatus::Conflicted);
        // No recommendation, so the default is chosen.
        assert!(report.fallback_used);
        assert_eq!(report.chosen, "lime");
    }

    #[test]
    fn adding_an_unknown_attribute_changes_no_verdict() {
        let kb = parse_program(CURATED, "curated.gkb").unwrap();
        let model = StakeholderModel::default_only("lime");
        let candidates = names(&["lime", "counterfactual"]);

        let baseline = select_explainer(&kb, &candidates, &model, DEFAULT_INSTANCE_CAP).unwrap();

        let mut profile = ExplainerProfile::from_json(CF_PROFILE, "cf.profile.json").unwrap();
        profile
            .attributes
            .insert("made_of_cheese".into(), AttributeValue::Unknown);
        let mut kb_with_profile = kb.clone();
        kb_with_profile.rules.extend(
            facts_from_profile(&profile)
                .unwrap()
                .into_iter()
                .filter(|r| r.label.to_string().starts_with("f_made_of_cheese")),
        );
        let with_unknown =
            select_explainer(&kb_with_profile, &candidates, &model, DEFAULT_INSTANCE_CAP).unwrap();

        for (a, b) in baseline.candidates.iter().zip(&with_unknown.candidates) {
            assert_eq!(a.status, b.status);
            assert_eq!(a.use_verdict.accepted, b.use_verdict.accepted);
            assert_eq!(a.neg_use_verdict.accepted, b.neg_use_verdict.accepted);
        }
        assert_eq!(baseline.chosen, with_unknown.chosen);
    }

    #[test]
    fn stakeholder_model_reproduces_the_listing_outcome() {
        let model = StakeholderModel::from_json(AGENCY, "agency.stakeholder.json").unwrap();
        assert_eq!(model.requirement_rules.len(), 5);
        assert_eq!(model.preference_pairs.len(), 3);

        let lime = ExplainerProfile::from_json(LIME_PROFILE, "lime").unwrap();
        let cf = ExplainerProfile::from_json(CF_PROFILE, "cf").unwrap();
        let mut rules = facts_from_profile(&lime).unwrap();
        rules.extend(facts_from_profile(&cf).unwrap());
        let kb = Program::new(rules, vec!["<profiles>".into()]);

        let report = select_explainer(
            &kb,
            &names(&["lime", "counterfactual"]),
            &model,
            DEFAULT_INSTANCE_CAP,
        )
        .unwrap();
        // Profile facts match the full listing, so lime is recommended here
        // just as with the single-file knowledge base.
        assert_eq!(report.chosen, "lime");
        assert!(!report.fallback_used);
    }

    #[test]
    fn preference_pairs_resolve_arities_against_declared_rules() {
        let model = StakeholderModel {
            requirement_rules: parse_program(
                "rule(a(X), p(X), [q(X)]). rule(b, r, [s]).",
                "<test>",
            )
            .unwrap()
            .rules,
            preference_pairs: vec![("a".into(), "b".into())],
            default_explainer: "lime".into(),
        };
        let declared = [("a".to_string(), 1usize), ("b".to_string(), 0usize)]
            .into_iter()
            .collect();
        let rules = model.preference_rules(&declared).unwrap();
        assert_eq!(rules.len(), 1);
        assert_eq!(
            crate::kb::print_rule(&rules[0]),
            "rule(sp1(L1), prefer(a(L1), b), [])."
        );

        let missing = model.preference_rules(&BTreeMap::new());
        assert!(matches!(
            missing,
            Err(SelectorError::UnknownPreferenceLabel(_))
        ));
    }

    #[test]
    fn selection_requires_candidates() {
        let err = select_explainer(
            &Program::default(),
            &[],
            &StakeholderModel::default_only("lime"),
            DEFAULT_INSTANCE_CAP,
        )
        .unwrap_err();
        assert!(matches!(err, SelectorError::NoCandidates));
    }

    #[test]
    fn selection_is_deterministic() {
        let kb = parse_program(CURATED, "curated.gkb").unwrap();
        let model = StakeholderModel::default_only("lime");
        let candidates = names(&["lime", "counterfactual"]);
        let a = select_explainer(&kb, &candidates, &model, DEFAULT_INSTANCE_CAP).unwrap();
        let b = select_explainer(&kb, &candidates, &model, DEFAULT_INSTANCE_CAP).unwrap();
        assert_eq!(a.chosen, b.chosen);
        assert_eq!(a.fallback_used, b.fallback_used);
        let statuses = |r: &SelectionReport| -> Vec<(String, CandidateStatus)> {
            r.candidates
                .iter()
                .map(|c| (c.name.clone(), c.status))
                .collect()
        };
        assert_eq!(statuses(&a), statuses(&b));
    }
}
