//! Construction of the abstract framework from a ground program: candidate
//! arguments, attack edges, and preference resolution.
//!
//! An argument is one ground rule instance; its premises are taken as given
//! unless a fact directly contradicts one, in which case the instance is
//! not generated at all. Attacks are rebuttals (complementary conclusions,
//! emitted in both directions) and underminings (conclusion contradicts a
//! premise, one direction). Preferences then orient rebuttals: an attack
//! from a strictly weaker rule onto a stronger one is flipped. Facts hold
//! maximal priority: a rebuttal onto a fact flips (or, between two facts,
//! dissolves), so facts are never attack targets.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::ground::GroundProgram;
use crate::kb::{Head, Literal};

pub type ArgumentId = String;

/// Marker used in `resolved_by` when fact priority, not a preference rule,
/// decided a rebuttal.
pub const FACT_PRIORITY: &str = "fact priority";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ArgumentKind {
    Fact,
    Rule,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PremiseSupport {
    /// The premise is the conclusion of this fact.
    Fact(ArgumentId),
    /// Nothing in the knowledge base establishes the premise; it is assumed.
    Assumed,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Argument {
    pub id: ArgumentId,
    pub kind: ArgumentKind,
    /// `None` only for nodes loaded from an abstract framework file.
    pub conclusion: Option<Literal>,
    pub premises: Vec<Literal>,
    pub premise_support: Vec<PremiseSupport>,
}

impl Argument {
    fn fact(id: ArgumentId, conclusion: Literal) -> Self {
        Self {
            id,
            kind: ArgumentKind::Fact,
            conclusion: Some(conclusion),
            premises: Vec::new(),
            premise_support: Vec::new(),
        }
    }

    fn abstract_node(id: ArgumentId) -> Self {
        Self {
            id,
            kind: ArgumentKind::Rule,
            conclusion: None,
            premises: Vec::new(),
            premise_support: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum AttackKind {
    Rebuttal,
    Undermining,
}

impl fmt::Display for AttackKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AttackKind::Rebuttal => f.write_str("rebuttal"),
            AttackKind::Undermining => f.write_str("undermining"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttackEdge {
    pub attacker: ArgumentId,
    pub target: ArgumentId,
    pub kind: AttackKind,
    /// Preference label (or [`FACT_PRIORITY`]) that decided this edge's
    /// direction, when one did.
    pub resolved_by: Option<String>,
}

impl AttackEdge {
    fn new(attacker: ArgumentId, target: ArgumentId, kind: AttackKind) -> Self {
        Self {
            attacker,
            target,
            kind,
            resolved_by: None,
        }
    }
}

/// What happened to a rebuttal during preference application.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ResolutionEvent {
    Flip {
        from: (ArgumentId, ArgumentId),
        to: (ArgumentId, ArgumentId),
        by: String,
    },
    Drop {
        edge: (ArgumentId, ArgumentId),
        reason: String,
    },
}

impl fmt::Display for ResolutionEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ResolutionEvent::Flip { from, to, by } => write!(
                f,
                "flip {} -> {} into {} -> {} ({})",
                from.0, from.1, to.0, to.1, by
            ),
            ResolutionEvent::Drop { edge, reason } => {
                write!(f, "drop {} -> {} ({})", edge.0, edge.1, reason)
            }
        }
    }
}

/// Strict priority over ground rule labels: the transitive closure of the
/// `prefer` statements, with mutual pairs and cycles dissolved.
#[derive(Debug, Clone, Default)]
pub struct PreferenceRelation {
    direct: Vec<(ArgumentId, ArgumentId)>,
    closed: BTreeSet<(ArgumentId, ArgumentId)>,
    witness: BTreeMap<(ArgumentId, ArgumentId), String>,
}

impl PreferenceRelation {
    /// Builds the relation from `(stronger, weaker, witness-label)` triples.
    /// Mutual pairs, self-preferences and any residual cycles carry no
    /// strict preference; their edges are removed and reported as warnings.
    pub fn from_pairs(pairs: &[(ArgumentId, ArgumentId, String)]) -> (Self, Vec<String>) {
        let mut warnings = Vec::new();

        let mut nodes: BTreeSet<&str> = BTreeSet::new();
        for (a, b, _) in pairs {
            nodes.insert(a);
            nodes.insert(b);
        }
        let index: BTreeMap<&str, usize> = nodes.iter().enumerate().map(|(i, &n)| (n, i)).collect();
        let names: Vec<&str> = nodes.into_iter().collect();
        let n = names.len();

        let mut direct_edges: BTreeMap<(usize, usize), String> = BTreeMap::new();
        for (a, b, label) in pairs {
            direct_edges
                .entry((index[a.as_str()], index[b.as_str()]))
                .or_insert_with(|| label.clone());
        }

        let closure = |edges: &BTreeMap<(usize, usize), String>| -> Vec<Vec<bool>> {
            let mut reach = vec![vec![false; n]; n];
            for &(a, b) in edges.keys() {
                reach[a][b] = true;
            }
            for k in 0..n {
                for i in 0..n {
                    if reach[i][k] {
                        let via: Vec<usize> = (0..n).filter(|&j| reach[k][j]).collect();
                        for j in via {
                            reach[i][j] = true;
                        }
                    }
                }
            }
            reach
        };

        // Nodes that can reach each other form a cycle group; all edges
        // inside a group dissolve.
        let reach = closure(&direct_edges);
        let mut group_of: Vec<Option<usize>> = vec![None; n];
        let mut groups: Vec<Vec<usize>> = Vec::new();
        for i in 0..n {
            if group_of[i].is_some() || !reach[i][i] {
                continue;
            }
            let members: Vec<usize> = (i..n)
                .filter(|&j| reach[i][j] && reach[j][i] && reach[j][j])
                .collect();
            for &m in &members {
                group_of[m] = Some(groups.len());
            }
            groups.push(members);
        }
        for group in &groups {
            let mut labels: Vec<&str> = group.iter().map(|&i| names[i]).collect();
            labels.sort_unstable();
            if labels.len() == 1 {
                warnings.push(format!(
                    "self-preference on {} carries no strict preference",
                    labels[0]
                ));
            } else {
                warnings.push(format!(
                    "no strict preference between {}: preferences cancel out",
                    labels.join(", ")
                ));
            }
        }
        direct_edges.retain(|&(a, b), _| !(group_of[a].is_some() && group_of[a] == group_of[b]));

        // Closure of the remaining acyclic graph, with a witness chain per
        // derived pair (shortest path over direct edges).
        let reach = closure(&direct_edges);
        let mut closed = BTreeSet::new();
        let mut witness: BTreeMap<(ArgumentId, ArgumentId), String> = BTreeMap::new();
        for a in 0..n {
            for b in 0..n {
                if reach[a][b] {
                    closed.insert((names[a].to_string(), names[b].to_string()));
                }
            }
        }
        for a in 0..n {
            // BFS over sorted successors gives a deterministic witness path.
            let mut parent: BTreeMap<usize, (usize, &String)> = BTreeMap::new();
            let mut queue = std::collections::VecDeque::from([a]);
            let mut seen = vec![false; n];
            seen[a] = true;
            while let Some(current) = queue.pop_front() {
                for (&(from, to), label) in &direct_edges {
                    if from == current && !seen[to] {
                        seen[to] = true;
                        parent.insert(to, (current, label));
                        queue.push_back(to);
                    }
                }
            }
            for b in 0..n {
                if !reach[a][b] {
                    continue;
                }
                let mut chain = Vec::new();
                let mut at = b;
                while at != a {
                    let (prev, label) = parent[&at];
                    chain.push(label.clone());
                    at = prev;
                }
                chain.reverse();
                witness.insert(
                    (names[a].to_string(), names[b].to_string()),
                    chain.join(","),
                );
            }
        }

        let direct: Vec<(ArgumentId, ArgumentId)> = direct_edges
            .keys()
            .map(|&(a, b)| (names[a].to_string(), names[b].to_string()))
            .collect();

        (
            Self {
                direct,
                closed,
                witness,
            },
            warnings,
        )
    }

    /// True when `a` is strictly preferred over `b` under the closure.
    pub fn prefers(&self, a: &str, b: &str) -> bool {
        self.closed.contains(&(a.to_string(), b.to_string()))
    }

    pub fn witness(&self, a: &str, b: &str) -> Option<&str> {
        self.witness
            .get(&(a.to_string(), b.to_string()))
            .map(String::as_str)
    }

    /// The surviving direct pairs, for display.
    pub fn direct_pairs(&self) -> &[(ArgumentId, ArgumentId)] {
        &self.direct
    }
}

/// The framework: arguments, resolved attacks, and everything needed to
/// replay how the attacks were resolved.
#[derive(Debug, Clone, Default)]
pub struct ArgumentationFramework {
    pub arguments: BTreeMap<ArgumentId, Argument>,
    /// Attack relation after preference application.
    pub attacks: Vec<AttackEdge>,
    /// Attack relation as first computed, before preference application.
    pub initial_attacks: Vec<AttackEdge>,
    /// Direct preference pairs relevant to this framework, for display.
    pub preferences: Vec<(ArgumentId, ArgumentId)>,
    pub resolutions: Vec<ResolutionEvent>,
    pub warnings: Vec<String>,
    preference_relation: PreferenceRelation,
}

impl ArgumentationFramework {
    pub fn len(&self) -> usize {
        self.arguments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arguments.is_empty()
    }

    /// Rule arguments, the ones presented in traces and graphs; fact
    /// arguments are kept in the framework but not displayed.
    pub fn displayed_ids(&self) -> Vec<&ArgumentId> {
        self.arguments
            .values()
            .filter(|a| a.kind == ArgumentKind::Rule)
            .map(|a| &a.id)
            .collect()
    }

    pub fn prefers(&self, a: &str, b: &str) -> bool {
        self.preference_relation.prefers(a, b)
    }

    /// Builds a framework directly from abstract parts: bare argument ids,
    /// attack pairs and preference pairs. No generation filter and no
    /// query restriction apply; preference flipping does.
    pub fn from_abstract(
        ids: &[ArgumentId],
        attack_pairs: &[(ArgumentId, ArgumentId)],
        preference_pairs: &[(ArgumentId, ArgumentId)],
    ) -> Self {
        let arguments: BTreeMap<ArgumentId, Argument> = ids
            .iter()
            .map(|id| (id.clone(), Argument::abstract_node(id.clone())))
            .collect();

        let mut initial: Vec<AttackEdge> = attack_pairs
            .iter()
            .map(|(a, b)| AttackEdge::new(a.clone(), b.clone(), AttackKind::Rebuttal))
            .collect();
        initial.sort_by(edge_order);
        initial.dedup();

        let triples: Vec<(ArgumentId, ArgumentId, String)> = preference_pairs
            .iter()
            .map(|(a, b)| (a.clone(), b.clone(), format!("pref {a} {b}")))
            .collect();
        let (relation, warnings) = PreferenceRelation::from_pairs(&triples);

        let kinds: BTreeMap<ArgumentId, ArgumentKind> =
            arguments.values().map(|a| (a.id.clone(), a.kind)).collect();
        let (attacks, resolutions) = apply_preferences(&initial, &kinds, &relation);
        let preferences = relation.direct_pairs().to_vec();

        Self {
            arguments,
            attacks,
            initial_attacks: initial,
            preferences,
            resolutions,
            warnings,
            preference_relation: relation,
        }
    }
}

fn edge_order(a: &AttackEdge, b: &AttackEdge) -> std::cmp::Ordering {
    (&a.attacker, &a.target, a.kind).cmp(&(&b.attacker, &b.target, b.kind))
}

/// One argument per ground fact, one per ground rule instance whose body no
/// fact directly contradicts. Premises matching a fact are recorded as
/// fact-supported, the rest as assumed.
pub fn build_candidate_arguments(gp: &GroundProgram) -> Vec<Argument> {
    let mut fact_conclusions: BTreeMap<&Literal, String> = BTreeMap::new();
    let mut fact_pairs: Vec<(&Literal, String)> = Vec::new();
    for rule in &gp.program.rules {
        if let Head::Literal(conclusion) = &rule.head {
            if rule.body.is_empty() {
                fact_pairs.push((conclusion, rule.label.to_string()));
            }
        }
    }
    fact_pairs.sort();
    for (conclusion, id) in fact_pairs {
        fact_conclusions.entry(conclusion).or_insert(id);
    }

    let mut args = Vec::new();
    for rule in &gp.program.rules {
        let Head::Literal(conclusion) = &rule.head else {
            continue;
        };
        let id = rule.label.to_string();
        if rule.body.is_empty() {
            args.push(Argument::fact(id, conclusion.clone()));
            continue;
        }
        let contradicted = rule
            .body
            .iter()
            .any(|premise| fact_conclusions.contains_key(&premise.complement()));
        if contradicted {
            continue;
        }
        let premise_support = rule
            .body
            .iter()
            .map(|premise| match fact_conclusions.get(premise) {
                Some(fact_id) => PremiseSupport::Fact(fact_id.clone()),
                None => PremiseSupport::Assumed,
            })
            .collect();
        args.push(Argument {
            id,
            kind: ArgumentKind::Rule,
            conclusion: Some(conclusion.clone()),
            premises: rule.body.clone(),
            premise_support,
        });
    }
    args.sort_by(|a, b| a.id.cmp(&b.id));
    args
}

/// Rebuttals between complementary conclusions, both directions; one
/// undermining per (attacker, target) where the attacker's conclusion
/// contradicts a premise of the target.
pub fn compute_attacks(args: &[Argument]) -> Vec<AttackEdge> {
    let mut by_conclusion: BTreeMap<&Literal, Vec<&ArgumentId>> = BTreeMap::new();
    for arg in args {
        if let Some(conclusion) = &arg.conclusion {
            by_conclusion.entry(conclusion).or_default().push(&arg.id);
        }
    }

    let mut edges = Vec::new();
    for target in args {
        if let Some(conclusion) = &target.conclusion {
            if let Some(attackers) = by_conclusion.get(&conclusion.complement()) {
                for attacker in attackers {
                    edges.push(AttackEdge::new(
                        (*attacker).clone(),
                        target.id.clone(),
                        AttackKind::Rebuttal,
                    ));
                }
            }
        }
        for premise in &target.premises {
            if let Some(attackers) = by_conclusion.get(&premise.complement()) {
                for attacker in attackers {
                    edges.push(AttackEdge::new(
                        (*attacker).clone(),
                        target.id.clone(),
                        AttackKind::Undermining,
                    ));
                }
            }
        }
    }
    edges.sort_by(edge_order);
    edges.dedup();
    edges
}

/// Orients rebuttals by priority. A rebuttal whose target is strictly
/// preferred over its attacker is flipped; underminings pass through
/// untouched. Facts outrank every rule, and no fact is attackable: a
/// rebuttal between two facts dissolves.
pub fn apply_preferences(
    edges: &[AttackEdge],
    kinds: &BTreeMap<ArgumentId, ArgumentKind>,
    relation: &PreferenceRelation,
) -> (Vec<AttackEdge>, Vec<ResolutionEvent>) {
    let mut kept: BTreeMap<(ArgumentId, ArgumentId, AttackKind), Option<String>> = BTreeMap::new();
    let mut events = Vec::new();

    let mut keep =
        |attacker: &ArgumentId, target: &ArgumentId, kind: AttackKind, by: Option<String>| {
            let entry = kept
                .entry((attacker.clone(), target.clone(), kind))
                .or_insert(None);
            if entry.is_none() {
                *entry = by;
            }
        };

    for edge in edges {
        if edge.kind == AttackKind::Undermining {
            keep(&edge.attacker, &edge.target, edge.kind, None);
            continue;
        }
        let attacker_is_fact = kinds.get(&edge.attacker) == Some(&ArgumentKind::Fact);
        let target_is_fact = kinds.get(&edge.target) == Some(&ArgumentKind::Fact);

        if target_is_fact && attacker_is_fact {
            events.push(ResolutionEvent::Drop {
                edge: (edge.attacker.clone(), edge.target.clone()),
                reason: format!("{FACT_PRIORITY}: facts are not attackable"),
            });
        } else if target_is_fact {
            events.push(ResolutionEvent::Flip {
                from: (edge.attacker.clone(), edge.target.clone()),
                to: (edge.target.clone(), edge.attacker.clone()),
                by: FACT_PRIORITY.to_string(),
            });
            keep(
                &edge.target,
                &edge.attacker,
                AttackKind::Rebuttal,
                Some(FACT_PRIORITY.to_string()),
            );
        } else if !attacker_is_fact && relation.prefers(&edge.target, &edge.attacker) {
            let by = relation
                .witness(&edge.target, &edge.attacker)
                .unwrap_or_default()
                .to_string();
            events.push(ResolutionEvent::Flip {
                from: (edge.attacker.clone(), edge.target.clone()),
                to: (edge.target.clone(), edge.attacker.clone()),
                by: by.clone(),
            });
            keep(&edge.target, &edge.attacker, AttackKind::Rebuttal, Some(by));
        } else {
            // The edge stands; if a preference decided that, record it.
            let by = if attacker_is_fact {
                Some(FACT_PRIORITY.to_string())
            } else {
                relation
                    .witness(&edge.attacker, &edge.target)
                    .map(str::to_string)
            };
            keep(&edge.attacker, &edge.target, AttackKind::Rebuttal, by);
        }
    }

    let result = kept
        .into_iter()
        .map(|((attacker, target, kind), resolved_by)| AttackEdge {
            attacker,
            target,
            kind,
            resolved_by,
        })
        .collect();
    (result, events)
}

/// Builds the framework for one query: candidate arguments, attacks,
/// preference resolution, then restriction to the query-relevant subgraph.
///
/// The restriction seeds on arguments concluding the query or its
/// complement and closes transitively over incoming attackers and over
/// arguments concluding a premise of anything already included. Fact
/// arguments reached this way are retained but not displayed.
pub fn build_framework(gp: &GroundProgram, query: &Literal) -> ArgumentationFramework {
    let mut warnings = Vec::new();

    let args = build_candidate_arguments(gp);
    let mut preference_triples = Vec::new();
    for rule in &gp.program.rules {
        if let Head::Preference(pref) = &rule.head {
            if !rule.body.is_empty() {
                warnings.push(format!(
                    "body of preference rule {} ignored when resolving attacks",
                    rule.label
                ));
            }
            preference_triples.push((
                pref.stronger.to_string(),
                pref.weaker.to_string(),
                rule.label.to_string(),
            ));
        }
    }
    let (relation, relation_warnings) = PreferenceRelation::from_pairs(&preference_triples);
    warnings.extend(relation_warnings);

    let initial = compute_attacks(&args);
    let kinds: BTreeMap<ArgumentId, ArgumentKind> =
        args.iter().map(|a| (a.id.clone(), a.kind)).collect();
    let (resolved, resolutions) = apply_preferences(&initial, &kinds, &relation);

    // Query-relevant restriction.
    let by_id: BTreeMap<&str, &Argument> = args.iter().map(|a| (a.id.as_str(), a)).collect();
    let mut by_conclusion: BTreeMap<&Literal, Vec<&str>> = BTreeMap::new();
    for arg in &args {
        if let Some(conclusion) = &arg.conclusion {
            by_conclusion
                .entry(conclusion)
                .or_default()
                .push(arg.id.as_str());
        }
    }
    let mut attackers_of: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for edge in &resolved {
        attackers_of
            .entry(edge.target.as_str())
            .or_default()
            .push(edge.attacker.as_str());
    }

    let complement = query.complement();
    let mut included: BTreeSet<&str> = BTreeSet::new();
    let mut frontier: Vec<&str> = Vec::new();
    for arg in &args {
        if arg.conclusion.as_ref() == Some(query) || arg.conclusion.as_ref() == Some(&complement) {
            included.insert(arg.id.as_str());
            frontier.push(arg.id.as_str());
        }
    }
    while let Some(id) = frontier.pop() {
        if let Some(attackers) = attackers_of.get(id) {
            for &attacker in attackers {
                if included.insert(attacker) {
                    frontier.push(attacker);
                }
            }
        }
        for premise in &by_id[id].premises {
            if let Some(concluders) = by_conclusion.get(premise) {
                for &concluder in concluders {
                    if included.insert(concluder) {
                        frontier.push(concluder);
                    }
                }
            }
        }
    }

    let arguments: BTreeMap<ArgumentId, Argument> = args
        .iter()
        .filter(|a| included.contains(a.id.as_str()))
        .map(|a| (a.id.clone(), a.clone()))
        .collect();
    let in_scope = |edge: &AttackEdge| {
        included.contains(edge.attacker.as_str()) && included.contains(edge.target.as_str())
    };
    let attacks: Vec<AttackEdge> = resolved.iter().filter(|e| in_scope(e)).cloned().collect();
    let initial_attacks: Vec<AttackEdge> =
        initial.iter().filter(|e| in_scope(e)).cloned().collect();
    let resolutions = resolutions
        .into_iter()
        .filter(|event| match event {
            ResolutionEvent::Flip { from, .. } | ResolutionEvent::Drop { edge: from, .. } => {
                included.contains(from.0.as_str()) && included.contains(from.1.as_str())
            }
        })
        .collect();
    let preferences = relation
        .direct_pairs()
        .iter()
        .filter(|(a, b)| included.contains(a.as_str()) || included.contains(b.as_str()))
        .cloned()
        .collect();

    ArgumentationFramework {
        arguments,
        attacks,
        initial_attacks,
        preferences,
        resolutions,
        warnings,
        preference_relation: relation,
    }
}
