//! Decisions over applicable rules and the final falsification step.

use std::fmt;
use std::str::FromStr;

use crate::assignment::{AssignResult, Assignment, Reason};
use crate::completion::AuxMap;
use crate::error::{Error, Result};
use crate::lit::{AtomId, Lit};
use crate::program::GroundProgram;
use crate::store::{LengthClass, NogoodStore};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum HeuristicKind {
    #[default]
    Occurrence,
    JeroslowWang,
    Activity,
}

impl fmt::Display for HeuristicKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            HeuristicKind::Occurrence => "occ",
            HeuristicKind::JeroslowWang => "jw",
            HeuristicKind::Activity => "act",
        })
    }
}

impl FromStr for HeuristicKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "occ" => Ok(HeuristicKind::Occurrence),
            "jw" => Ok(HeuristicKind::JeroslowWang),
            "act" => Ok(HeuristicKind::Activity),
            _ => Err(Error::Config(format!("unknown heuristic '{s}' (expected occ, jw or act)"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HeuristicConfig {
    pub kind: HeuristicKind,
    pub activity_decay: f64,
}

impl Default for HeuristicConfig {
    fn default() -> Self {
        HeuristicConfig { kind: HeuristicKind::Occurrence, activity_decay: 0.95 }
    }
}

/// Per-atom scores; rules are ranked by the score of their head.
#[derive(Clone, Debug)]
pub struct Heuristic {
    kind: HeuristicKind,
    scores: Vec<f64>,
    increment: f64,
    decay: f64,
}

impl Heuristic {
    pub fn new(config: HeuristicConfig, store: &NogoodStore) -> Heuristic {
        let n = store.num_atoms() + 1;
        let mut scores = vec![0.0; n];
        if config.kind != HeuristicKind::Activity {
            for atom in 1..n {
                let a = AtomId(atom as u32);
                for l in [Lit::pos(a), Lit::neg(a)] {
                    for class in LengthClass::PROPAGATING {
                        for &id in store.occurrences(class, l) {
                            if id.index() >= store.static_count() {
                                continue;
                            }
                            scores[atom] += match config.kind {
                                HeuristicKind::Occurrence => 1.0,
                                _ => (-(store.len_of(id) as f64)).exp2(),
                            };
                        }
                    }
                }
            }
        }
        Heuristic { kind: config.kind, scores, increment: 1.0, decay: config.activity_decay }
    }

    pub fn kind(&self) -> HeuristicKind {
        self.kind
    }

    pub fn score(&self, atom: AtomId) -> f64 {
        self.scores[atom.index()]
    }

    /// Bumps the atoms of a learned nogood; aux atoms count for their rule's head.
    pub fn on_learned(&mut self, lits: &[Lit], program: &GroundProgram, aux: &AuxMap) {
        if self.kind != HeuristicKind::Activity {
            return;
        }
        for l in lits {
            let atom = match aux.owner(l.atom()) {
                Some((r, _)) => program.rules()[r].head,
                None => l.atom(),
            };
            self.scores[atom.index()] += self.increment;
        }
    }

    pub fn on_conflict(&mut self) {
        if self.kind != HeuristicKind::Activity {
            return;
        }
        self.increment /= self.decay;
        if self.increment > 1e100 {
            for s in &mut self.scores {
                *s *= 1e-100;
            }
            self.increment *= 1e-100;
        }
    }
}

/// Whether rule `r` may be applied: head and body atom unassigned, positive
/// body true (or empty) and negative-body atom not false.
pub fn is_applicable(program: &GroundProgram, aux: &AuxMap, a: &Assignment, r: usize) -> bool {
    let ra = aux.rule(r);
    if a.is_assigned(program.rules()[r].head) || a.is_assigned(ra.body) {
        return false;
    }
    if let Some(t) = ra.pos {
        if !a.holds(Lit::pos(t)) {
            return false;
        }
    }
    match ra.neg {
        Some(n) => !a.holds(Lit::neg(n)),
        None => true,
    }
}

pub fn find_applicable(program: &GroundProgram, aux: &AuxMap, a: &Assignment) -> Vec<usize> {
    (0..program.rules().len()).filter(|&r| is_applicable(program, aux, a, r)).collect()
}

/// Highest-scoring applicable rule; ties go to the lowest rule index.
pub fn select_rule(program: &GroundProgram, aux: &AuxMap, a: &Assignment, heur: &Heuristic) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for r in 0..program.rules().len() {
        if !is_applicable(program, aux, a, r) {
            continue;
        }
        let s = heur.score(program.rules()[r].head);
        if best.is_none_or(|(_, b)| s > b) {
            best = Some((r, s));
        }
    }
    best.map(|(r, _)| r)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Decision {
    Decided { rule: usize, lit: Lit, level: u32 },
    NoApplicable,
}

/// Opens a new level deciding `T b_r` for the best applicable rule.
pub fn decide(program: &GroundProgram, aux: &AuxMap, a: &mut Assignment, heur: &Heuristic) -> Decision {
    match select_rule(program, aux, a, heur) {
        None => Decision::NoApplicable,
        Some(rule) => {
            let lit = Lit::pos(aux.rule(rule).body);
            debug_assert!(aux.is_aux(lit.atom()));
            let level = a.decide(lit);
            Decision::Decided { rule, lit, level }
        }
    }
}

/// Assigns `F p` at the current level to every unassigned program atom.
pub fn complete_assignment(program: &GroundProgram, a: &mut Assignment) -> Vec<Lit> {
    let level = a.level();
    let mask = a.all_decisions_mask();
    let mut out = Vec::new();
    for atom in program.atoms().ids() {
        if a.is_assigned(atom) {
            continue;
        }
        let lit = Lit::neg(atom);
        let r = a.assign(lit, level, Reason::Completion, &mask);
        debug_assert_eq!(r, AssignResult::NewlySet);
        out.push(lit);
    }
    out
}
