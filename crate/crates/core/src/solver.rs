//! Labelling-based solving over an argumentation framework.
//!
//! The grounded labelling is the engine's query semantics: iterate, marking
//! IN every argument whose attackers are all OUT (vacuously the unattacked
//! ones) and OUT every argument with an IN attacker, until stable; the rest
//! is UNDEC. The grounded extension is unique, so credulous and skeptical
//! acceptance coincide. Admissible and preferred extensions are available
//! through brute-force enumeration under a size guard, mainly as an audit
//! and test oracle.

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::framework::{ArgumentId, ArgumentKind, ArgumentationFramework};
use crate::kb::Literal;

/// Upper bound on framework size for subset enumeration.
pub const ENUMERATION_LIMIT: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Label {
    In,
    Out,
    Undec,
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::In => f.write_str("IN"),
            Label::Out => f.write_str("OUT"),
            Label::Undec => f.write_str("UNDEC"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Justification {
    Unattacked,
    AttackersAllOut(Vec<ArgumentId>),
    DefeatedBy(Vec<ArgumentId>),
    UnresolvedCycle,
}

impl fmt::Display for Justification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Justification::Unattacked => f.write_str("no attackers"),
            Justification::AttackersAllOut(ids) => {
                write!(f, "all attackers OUT: {}", ids.join(", "))
            }
            Justification::DefeatedBy(ids) => {
                write!(f, "attacked by IN argument {}", ids.join(", "))
            }
            Justification::UnresolvedCycle => f.write_str("no attacker settles; undecided"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabellingStep {
    pub argument: ArgumentId,
    pub label: Label,
    pub justification: Justification,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Labelling {
    pub assignment: BTreeMap<ArgumentId, Label>,
    pub steps: Vec<LabellingStep>,
}

impl Labelling {
    pub fn label_of(&self, id: &str) -> Option<Label> {
        self.assignment.get(id).copied()
    }

    pub fn is_in(&self, id: &str) -> bool {
        self.label_of(id) == Some(Label::In)
    }

    fn set_of(&self, label: Label) -> BTreeSet<ArgumentId> {
        self.assignment
            .iter()
            .filter(|(_, &l)| l == label)
            .map(|(id, _)| id.clone())
            .collect()
    }

    pub fn in_set(&self) -> BTreeSet<ArgumentId> {
        self.set_of(Label::In)
    }

    pub fn out_set(&self) -> BTreeSet<ArgumentId> {
        self.set_of(Label::Out)
    }

    pub fn undec_set(&self) -> BTreeSet<ArgumentId> {
        self.set_of(Label::Undec)
    }

    /// The accepted position: IN arguments that are displayed (rule kind).
    pub fn position(&self, af: &ArgumentationFramework) -> BTreeSet<ArgumentId> {
        self.in_set()
            .into_iter()
            .filter(|id| {
                af.arguments
                    .get(id)
                    .map(|a| a.kind == ArgumentKind::Rule)
                    .unwrap_or(false)
            })
            .collect()
    }
}

fn attacker_index(af: &ArgumentationFramework) -> BTreeMap<&str, BTreeSet<&str>> {
    let mut attackers: BTreeMap<&str, BTreeSet<&str>> = af
        .arguments
        .keys()
        .map(|id| (id.as_str(), BTreeSet::new()))
        .collect();
    for edge in &af.attacks {
        if let Some(bucket) = attackers.get_mut(edge.target.as_str()) {
            bucket.insert(edge.attacker.as_str());
        }
    }
    attackers
}

/// Computes the least-fixpoint labelling, recording each assignment in
/// order with the attackers that justify it.
pub fn grounded_labelling(af: &ArgumentationFramework) -> Labelling {
    let attackers = attacker_index(af);
    let mut labelling = Labelling::default();

    loop {
        let newly_in: Vec<&str> = af
            .arguments
            .keys()
            .map(String::as_str)
            .filter(|id| !labelling.assignment.contains_key(*id))
            .filter(|id| {
                attackers[*id]
                    .iter()
                    .all(|attacker| labelling.label_of(attacker) == Some(Label::Out))
            })
            .collect();
        if newly_in.is_empty() {
            break;
        }
        for id in newly_in {
            let justification = if attackers[id].is_empty() {
                Justification::Unattacked
            } else {
                Justification::AttackersAllOut(
                    attackers[id].iter().map(|s| s.to_string()).collect(),
                )
            };
            labelling.assignment.insert(id.to_string(), Label::In);
            labelling.steps.push(LabellingStep {
                argument: id.to_string(),
                label: Label::In,
                justification,
            });
        }

        let newly_out: Vec<(&str, Vec<ArgumentId>)> = af
            .arguments
            .keys()
            .map(String::as_str)
            .filter(|id| !labelling.assignment.contains_key(*id))
            .filter_map(|id| {
                let in_attackers: Vec<ArgumentId> = attackers[id]
                    .iter()
                    .filter(|attacker| labelling.label_of(attacker) == Some(Label::In))
                    .map(|s| s.to_string())
                    .collect();
                (!in_attackers.is_empty()).then_some((id, in_attackers))
            })
            .collect();
        for (id, in_attackers) in newly_out {
            labelling.assignment.insert(id.to_string(), Label::Out);
            labelling.steps.push(LabellingStep {
                argument: id.to_string(),
                label: Label::Out,
                justification: Justification::DefeatedBy(in_attackers),
            });
        }
    }

    let undecided: Vec<&str> = af
        .arguments
        .keys()
        .map(String::as_str)
        .filter(|id| !labelling.assignment.contains_key(*id))
        .collect();
    for id in undecided {
        labelling.assignment.insert(id.to_string(), Label::Undec);
        labelling.steps.push(LabellingStep {
            argument: id.to_string(),
            label: Label::Undec,
            justification: Justification::UnresolvedCycle,
        });
    }

    labelling
}

/// True iff no attack has both endpoints inside `set`. Ids outside the
/// framework make the set invalid, hence `false`.
pub fn is_conflict_free(af: &ArgumentationFramework, set: &BTreeSet<ArgumentId>) -> bool {
    if !set.iter().all(|id| af.arguments.contains_key(id)) {
        return false;
    }
    !af.attacks
        .iter()
        .any(|edge| set.contains(&edge.attacker) && set.contains(&edge.target))
}

/// True iff the set is conflict-free and defends each of its members: every
/// attacker of a member is attacked by some member.
pub fn is_admissible(af: &ArgumentationFramework, set: &BTreeSet<ArgumentId>) -> bool {
    if !is_conflict_free(af, set) {
        return false;
    }
    let attackers = attacker_index(af);
    set.iter().all(|member| {
        attackers[member.as_str()].iter().all(|attacker| {
            attackers[attacker]
                .iter()
                .any(|defender| set.contains(*defender))
        })
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Semantics {
    ConflictFree,
    Admissible,
    Grounded,
    Preferred,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Extension {
    pub members: BTreeSet<ArgumentId>,
    pub semantics: Semantics,
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum SolverError {
    #[error("framework has {size} arguments; enumeration is limited to {limit}")]
    TooLarge { size: usize, limit: usize },
}

fn enumerate_sets(
    af: &ArgumentationFramework,
    predicate: impl Fn(&BTreeSet<ArgumentId>) -> bool,
    semantics: Semantics,
) -> Result<Vec<Extension>, SolverError> {
    let ids: Vec<&ArgumentId> = af.arguments.keys().collect();
    if ids.len() > ENUMERATION_LIMIT {
        return Err(SolverError::TooLarge {
            size: ids.len(),
            limit: ENUMERATION_LIMIT,
        });
    }
    let mut found = Vec::new();
    for mask in 0u32..(1u32 << ids.len()) {
        let set: BTreeSet<ArgumentId> = ids
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, id)| (*id).clone())
            .collect();
        if predicate(&set) {
            found.push(Extension {
                members: set,
                semantics,
            });
        }
    }
    found.sort_by(|a, b| {
        a.members
            .len()
            .cmp(&b.members.len())
            .then_with(|| a.members.cmp(&b.members))
    });
    Ok(found)
}

/// Brute-force enumeration of every admissible set, sorted by size then
/// lexicographically. Guarded by [`ENUMERATION_LIMIT`].
pub fn enumerate_admissible(af: &ArgumentationFramework) -> Result<Vec<Extension>, SolverError> {
    enumerate_sets(af, |set| is_admissible(af, set), Semantics::Admissible)
}

/// The maximal admissible sets, through the same brute-force path.
pub fn enumerate_preferred(af: &ArgumentationFramework) -> Result<Vec<Extension>, SolverError> {
    let admissible = enumerate_admissible(af)?;
    let preferred: Vec<Extension> = admissible
        .iter()
        .filter(|candidate| {
            !admissible.iter().any(|other| {
                other.members.len() > candidate.members.len()
                    && candidate.members.is_subset(&other.members)
            })
        })
        .map(|e| Extension {
            members: e.members.clone(),
            semantics: Semantics::Preferred,
        })
        .collect();
    Ok(preferred)
}

pub fn grounded_extension(af: &ArgumentationFramework) -> Extension {
    Extension {
        members: grounded_labelling(af).in_set(),
        semantics: Semantics::Grounded,
    }
}

/// Credulous and skeptical acceptance coincide under grounded semantics;
/// the mode is accepted for symmetry and does not change the verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AcceptanceMode {
    #[default]
    Credulous,
    Skeptical,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryVerdict {
    pub query: Literal,
    pub accepted: bool,
    pub supporting: BTreeSet<ArgumentId>,
    pub labelling: Labelling,
}

/// Accepts a ground literal iff some IN argument concludes it.
pub fn accept(
    af: &ArgumentationFramework,
    literal: &Literal,
    _mode: AcceptanceMode,
) -> QueryVerdict {
    let labelling = grounded_labelling(af);
    let supporting: BTreeSet<ArgumentId> = af
        .arguments
        .values()
        .filter(|arg| labelling.is_in(&arg.id))
        .filter(|arg| arg.conclusion.as_ref() == Some(literal))
        .map(|arg| arg.id.clone())
        .collect();
    QueryVerdict {
        query: literal.clone(),
        accepted: !supporting.is_empty(),
        supporting,
        labelling,
    }
}
