//! Rendering of solve results: step-by-step text traces, DOT graphs with
//! labelling colours, and a versioned JSON report.
//!
//! All canonical output is byte-stable across runs: collections are
//! iterated in sorted order and no wall-clock data is included. Timing is
//! available as an explicitly non-canonical add-on block.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::framework::{
    Argument, ArgumentKind, ArgumentationFramework, AttackEdge, PremiseSupport, ResolutionEvent,
};
use crate::selector::{CandidateOutcome, SelectionReport};
use crate::solver::{Label, Labelling, LabellingStep, QueryVerdict};

/// The four fixed phases of a solve, in presentation order.
#[derive(Debug, Clone)]
pub struct TraceDocument {
    pub construction: ConstructionPhase,
    pub resolution: Vec<ResolutionEvent>,
    pub labelling_steps: Vec<LabellingStep>,
    pub outcome: OutcomePhase,
}

#[derive(Debug, Clone)]
pub struct ConstructionPhase {
    pub arguments: Vec<String>,
    /// Fact arguments retained in the framework; kept out of the argument
    /// listing proper but introduced here so the labelling steps only ever
    /// reference known ids.
    pub facts: Vec<String>,
    pub attacks: Vec<String>,
    pub preferences: Vec<String>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct OutcomePhase {
    pub query: Option<String>,
    pub accepted: bool,
    pub supporting: Vec<String>,
    pub position: Vec<String>,
}

fn describe_argument(argument: &Argument) -> String {
    let Some(conclusion) = &argument.conclusion else {
        return argument.id.clone();
    };
    if argument.premises.is_empty() {
        return format!("{}: {}", argument.id, conclusion);
    }
    let premises: Vec<String> = argument
        .premises
        .iter()
        .zip(&argument.premise_support)
        .map(|(premise, support)| match support {
            PremiseSupport::Fact(fact) => format!("{premise} [fact {fact}]"),
            PremiseSupport::Assumed => format!("{premise} [assumed]"),
        })
        .collect();
    format!("{}: {} <- {}", argument.id, conclusion, premises.join(", "))
}

fn describe_edge(edge: &AttackEdge) -> String {
    let mut line = format!("{} -> {} ({})", edge.attacker, edge.target, edge.kind);
    if let Some(by) = &edge.resolved_by {
        line.push_str(&format!(" [by {by}]"));
    }
    line
}

/// Assembles the deterministic trace for one solve. The labelling phase
/// mirrors the solver's step trace verbatim; displayed sets cover rule
/// arguments only.
pub fn build_trace(
    af: &ArgumentationFramework,
    labelling: &Labelling,
    verdict: Option<&QueryVerdict>,
) -> TraceDocument {
    let construction = ConstructionPhase {
        arguments: af
            .displayed_ids()
            .iter()
            .map(|id| describe_argument(&af.arguments[*id]))
            .collect(),
        facts: af
            .arguments
            .values()
            .filter(|a| a.kind == ArgumentKind::Fact)
            .map(describe_argument)
            .collect(),
        attacks: af.initial_attacks.iter().map(describe_edge).collect(),
        preferences: af
            .preferences
            .iter()
            .map(|(stronger, weaker)| format!("{stronger} > {weaker}"))
            .collect(),
        warnings: af.warnings.clone(),
    };
    let outcome = OutcomePhase {
        query: verdict.map(|v| v.query.to_string()),
        accepted: verdict.map(|v| v.accepted).unwrap_or(false),
        supporting: verdict
            .map(|v| v.supporting.iter().cloned().collect())
            .unwrap_or_default(),
        position: labelling.position(af).into_iter().collect(),
    };
    TraceDocument {
        construction,
        resolution: af.resolutions.clone(),
        labelling_steps: labelling.steps.clone(),
        outcome,
    }
}

impl TraceDocument {
    /// Human-readable rendering; ends with the accepted position line.
    pub fn render_text(&self, color: bool) -> String {
        let paint = |text: &str, code: &str| {
            if color {
                format!("\x1b[{code}m{text}\x1b[0m")
            } else {
                text.to_string()
            }
        };
        let mut out = String::new();

        out.push_str("== arguments ==\n");
        for line in &self.construction.arguments {
            out.push_str(&format!("  {line}\n"));
        }
        for line in &self.construction.facts {
            out.push_str(&format!("  fact {line}\n"));
        }
        out.push_str("== attacks ==\n");
        for line in &self.construction.attacks {
            out.push_str(&format!("  {line}\n"));
        }
        out.push_str("== preferences ==\n");
        for line in &self.construction.preferences {
            out.push_str(&format!("  {line}\n"));
        }
        for warning in &self.construction.warnings {
            out.push_str(&format!("  warning: {warning}\n"));
        }

        out.push_str("== preference resolution ==\n");
        for event in &self.resolution {
            out.push_str(&format!("  {event}\n"));
        }

        out.push_str("== labelling ==\n");
        for step in &self.labelling_steps {
            let label = match step.label {
                Label::In => paint("IN", "32"),
                Label::Out => paint("OUT", "31"),
                Label::Undec => paint("UNDEC", "90"),
            };
            out.push_str(&format!(
                "  {}: {} ({})\n",
                step.argument, label, step.justification
            ));
        }

        out.push_str("== result ==\n");
        if let Some(query) = &self.outcome.query {
            out.push_str(&format!("query: {query}\n"));
            let verdict = if self.outcome.accepted {
                format!(
                    "{} (via {})",
                    paint("accepted", "32"),
                    self.outcome.supporting.join(", ")
                )
            } else {
                paint("not accepted", "31")
            };
            out.push_str(&format!("verdict: {verdict}\n"));
        }
        out.push_str(&format!(
            "position {{{}}}\n",
            self.outcome.position.join(", ")
        ));
        out
    }
}

/// DOT digraph with the labelling painted on: IN nodes green, OUT red,
/// UNDEC gray; edges out of OUT arguments dotted, everything else solid.
/// Rule arguments are always shown; a fact appears only when it attacks.
pub fn to_dot(af: &ArgumentationFramework, labelling: &Labelling) -> String {
    let mut shown: Vec<&str> = af.displayed_ids().iter().map(|s| s.as_str()).collect();
    for edge in &af.attacks {
        let attacker = &af.arguments[&edge.attacker];
        if attacker.kind == ArgumentKind::Fact && !shown.contains(&edge.attacker.as_str()) {
            shown.push(edge.attacker.as_str());
        }
    }
    shown.sort_unstable();

    let mut out = String::from("digraph framework {\n");
    for id in &shown {
        let color = match labelling.label_of(id) {
            Some(Label::In) => "green",
            Some(Label::Out) => "red",
            _ => "gray",
        };
        out.push_str(&format!("  \"{id}\" [color={color}];\n"));
    }
    for edge in &af.attacks {
        if !shown.contains(&edge.attacker.as_str()) || !shown.contains(&edge.target.as_str()) {
            continue;
        }
        let style = match labelling.label_of(&edge.attacker) {
            Some(Label::Out) => "dotted",
            _ => "solid",
        };
        out.push_str(&format!(
            "  \"{}\" -> \"{}\" [style={style}];\n",
            edge.attacker, edge.target
        ));
    }
    out.push_str("}\n");
    out
}

// --- JSON report ------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct JsonReport {
    pub schema_version: u32,
    pub inputs: JsonInputs,
    pub framework: JsonFramework,
    pub labelling: BTreeMap<String, String>,
    pub verdicts: Vec<JsonVerdict>,
    pub chosen: Option<String>,
    pub fallback_used: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing: Option<JsonTiming>,
}

#[derive(Debug, Clone, Serialize)]
pub struct JsonInputs {
    pub kb_files: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub query: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub candidates: Option<Vec<String>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct JsonFramework {
    pub arguments: Vec<JsonArgument>,
    pub attacks: Vec<JsonAttack>,
    pub preferences: Vec<JsonPreference>,
}

#[derive(Debug, Clone, Serialize)]
pub struct JsonArgument {
    pub id: String,
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub conclusion: Option<String>,
    pub premises: Vec<JsonPremise>,
}

#[derive(Debug, Clone, Serialize)]
pub struct JsonPremise {
    pub literal: String,
    pub support: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct JsonAttack {
    pub attacker: String,
    pub target: String,
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub resolved_by: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct JsonPreference {
    pub stronger: String,
    pub weaker: String,
}

#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum JsonVerdict {
    Query {
        query: String,
        accepted: bool,
        supporting_arguments: Vec<String>,
    },
    Candidate {
        candidate: String,
        status: String,
        r#use: Box<JsonVerdict>,
        neg_use: Box<JsonVerdict>,
    },
}

/// Non-canonical timing block, attached only on request.
#[derive(Debug, Clone, Serialize)]
pub struct JsonTiming {
    pub total_ms: f64,
}

fn json_framework(af: &ArgumentationFramework) -> JsonFramework {
    JsonFramework {
        arguments: af
            .arguments
            .values()
            .map(|argument| JsonArgument {
                id: argument.id.clone(),
                kind: match argument.kind {
                    ArgumentKind::Fact => "fact".into(),
                    ArgumentKind::Rule => "rule".into(),
                },
                conclusion: argument.conclusion.as_ref().map(|c| c.to_string()),
                premises: argument
                    .premises
                    .iter()
                    .zip(&argument.premise_support)
                    .map(|(premise, support)| JsonPremise {
                        literal: premise.to_string(),
                        support: match support {
                            PremiseSupport::Fact(id) => format!("fact {id}"),
                            PremiseSupport::Assumed => "assumed".into(),
                        },
                    })
                    .collect(),
            })
            .collect(),
        attacks: af
            .attacks
            .iter()
            .map(|edge| JsonAttack {
                attacker: edge.attacker.clone(),
                target: edge.target.clone(),
                kind: edge.kind.to_string(),
                resolved_by: edge.resolved_by.clone(),
            })
            .collect(),
        preferences: af
            .preferences
            .iter()
            .map(|(stronger, weaker)| JsonPreference {
                stronger: stronger.clone(),
                weaker: weaker.clone(),
            })
            .collect(),
    }
}

fn json_labelling(labelling: &Labelling) -> BTreeMap<String, String> {
    labelling
        .assignment
        .iter()
        .map(|(id, label)| (id.clone(), label.to_string()))
        .collect()
}

fn json_query_verdict(verdict: &QueryVerdict) -> JsonVerdict {
    JsonVerdict::Query {
        query: verdict.query.to_string(),
        accepted: verdict.accepted,
        supporting_arguments: verdict.supporting.iter().cloned().collect(),
    }
}

/// Report for a single-query run.
pub fn query_report(
    kb_files: &[String],
    af: &ArgumentationFramework,
    verdict: &QueryVerdict,
    timing: Option<JsonTiming>,
) -> JsonReport {
    JsonReport {
        schema_version: 1,
        inputs: JsonInputs {
            kb_files: kb_files.to_vec(),
            query: Some(verdict.query.to_string()),
            candidates: None,
        },
        framework: json_framework(af),
        labelling: json_labelling(&verdict.labelling),
        verdicts: vec![json_query_verdict(verdict)],
        chosen: None,
        fallback_used: false,
        timing,
    }
}

/// Report for an abstract-mode solve, where the query is an argument id
/// rather than a literal.
pub fn abstract_report(
    file: &str,
    af: &ArgumentationFramework,
    labelling: &Labelling,
    query: Option<(&str, bool)>,
) -> JsonReport {
    JsonReport {
        schema_version: 1,
        inputs: JsonInputs {
            kb_files: vec![file.to_string()],
            query: query.map(|(id, _)| id.to_string()),
            candidates: None,
        },
        framework: json_framework(af),
        labelling: json_labelling(labelling),
        verdicts: query
            .map(|(id, accepted)| {
                vec![JsonVerdict::Query {
                    query: id.to_string(),
                    accepted,
                    supporting_arguments: if accepted {
                        vec![id.to_string()]
                    } else {
                        Vec::new()
                    },
                }]
            })
            .unwrap_or_default(),
        chosen: None,
        fallback_used: false,
        timing: None,
    }
}

fn json_candidate(outcome: &CandidateOutcome) -> JsonVerdict {
    JsonVerdict::Candidate {
        candidate: outcome.name.clone(),
        status: outcome.status.to_string(),
        r#use: Box::new(json_query_verdict(&outcome.use_verdict)),
        neg_use: Box::new(json_query_verdict(&outcome.neg_use_verdict)),
    }
}

/// Report for a selection run. The framework and labelling blocks show the
/// chosen candidate's positive query; per-candidate verdicts carry the
/// rest.
pub fn selection_report(
    kb_files: &[String],
    candidates: &[String],
    selection: &SelectionReport,
    timing: Option<JsonTiming>,
) -> JsonReport {
    let shown = selection
        .candidates
        .iter()
        .find(|c| c.name == selection.chosen)
        .or_else(|| selection.candidates.first());
    let (framework, labelling) = match shown {
        Some(outcome) => (
            json_framework(&outcome.use_framework),
            json_labelling(&outcome.use_verdict.labelling),
        ),
        None => (
            json_framework(&ArgumentationFramework::default()),
            BTreeMap::new(),
        ),
    };
    JsonReport {
        schema_version: 1,
        inputs: JsonInputs {
            kb_files: kb_files.to_vec(),
            query: None,
            candidates: Some(candidates.to_vec()),
        },
        framework,
        labelling,
        verdicts: selection.candidates.iter().map(json_candidate).collect(),
        chosen: Some(selection.chosen.clone()),
        fallback_used: selection.fallback_used,
        timing,
    }
}

impl JsonReport {
    pub fn to_text(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serializes");
        text.push('\n');
        text
    }
}
