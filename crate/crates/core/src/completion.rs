//! Compilation of a ground program into completion and constraint nogoods.
//!
//! Every headed rule `r` gets a body atom `b_r`, and, when the corresponding
//! body part is non-empty, `t_r` (positive body) and `n_r` (negative body).
//! They encode `b_r <-> t_r & n_r`, `t_r <-> AND body+`, `n_r <-> AND not body-`
//! and, per atom, `p <-> OR b_r`.
//!
//! Elision rules for degenerate rules:
//!
//! * `body+ = {}`: no `t_r`; `b_r <-> n_r` gives `{F b_r, T n_r}` and `{T b_r, F n_r}`.
//! * `body- = {}`: no `n_r`; `b_r <-> t_r` gives `{F b_r, T t_r}` and `{T b_r, F t_r}`.
//! * both empty (a fact): no `t_r`, `n_r`; `b_r` is forced by the unit `{F b_r}`.
//! * `body+` and `body-` overlap: the rule never fires; only `b_r` is created,
//!   forced false by the unit `{T b_r}`.
//!
//! Nogoods containing complementary literals are dropped (an inconsistent
//! constraint compiles to nothing).

use std::fmt;

use crate::lit::{AtomId, Lit};
use crate::program::{GroundProgram, Rule};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Origin {
    Completion,
    Constraint,
    Learned,
    /// Added by the solver to exclude an already-visited branch (found model
    /// or rejected candidate); not counted as learned.
    Blocking,
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Origin::Completion => "completion",
            Origin::Constraint => "constraint",
            Origin::Learned => "learned",
            Origin::Blocking => "blocking",
        })
    }
}

/// A set of signed literals that must not all hold, sorted by atom id.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Nogood {
    lits: Vec<Lit>,
    origin: Origin,
}

impl Nogood {
    /// Returns `None` for an empty or vacuous (complementary literals) set.
    pub fn new(lits: impl IntoIterator<Item = Lit>, origin: Origin) -> Option<Nogood> {
        let mut lits: Vec<Lit> = lits.into_iter().collect();
        lits.sort_unstable();
        lits.dedup();
        if lits.is_empty() || lits.windows(2).any(|w| w[0].atom() == w[1].atom()) {
            return None;
        }
        Some(Nogood { lits, origin })
    }

    pub fn lits(&self) -> &[Lit] {
        &self.lits
    }

    pub fn len(&self) -> usize {
        self.lits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lits.is_empty()
    }

    pub fn origin(&self) -> Origin {
        self.origin
    }

    pub fn contains(&self, lit: Lit) -> bool {
        self.lits.binary_search(&lit).is_ok()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AuxKind {
    /// `b_r`
    Body,
    /// `t_r`
    PosBody,
    /// `n_r`
    NegBody,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RuleAux {
    pub body: AtomId,
    pub pos: Option<AtomId>,
    pub neg: Option<AtomId>,
}

/// Auxiliary atoms per headed rule. Aux ids follow the program atoms.
#[derive(Clone, Debug)]
pub struct AuxMap {
    first: u32,
    rules: Vec<RuleAux>,
    owners: Vec<(usize, AuxKind)>,
}

impl AuxMap {
    pub fn rule(&self, r: usize) -> &RuleAux {
        &self.rules[r]
    }

    pub fn rules(&self) -> &[RuleAux] {
        &self.rules
    }

    pub fn is_aux(&self, atom: AtomId) -> bool {
        atom.0 >= self.first
    }

    /// Rule index and kind of an auxiliary atom.
    pub fn owner(&self, atom: AtomId) -> Option<(usize, AuxKind)> {
        if !self.is_aux(atom) {
            return None;
        }
        self.owners.get((atom.0 - self.first) as usize).copied()
    }

    /// Program atoms plus auxiliary atoms.
    pub fn total_atoms(&self) -> usize {
        self.first as usize - 1 + self.owners.len()
    }

    pub fn aux_count(&self) -> usize {
        self.owners.len()
    }

    /// Display name: program atoms by their table name, aux atoms as `b_r(i)`
    /// with a 1-based rule index.
    pub fn name(&self, program: &GroundProgram, atom: AtomId) -> String {
        match self.owner(atom) {
            None => program.atoms().name(atom).to_owned(),
            Some((r, kind)) => {
                let prefix = match kind {
                    AuxKind::Body => "b_r",
                    AuxKind::PosBody => "t_r",
                    AuxKind::NegBody => "n_r",
                };
                format!("{prefix}({})", r + 1)
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct Completion {
    pub nogoods: Vec<Nogood>,
    pub aux: AuxMap,
}

impl Completion {
    /// One nogood per line: `{T a, F b_r(1)} completion`.
    pub fn dump(&self, program: &GroundProgram) -> String {
        let mut out = String::new();
        for ng in &self.nogoods {
            out.push('{');
            for (i, l) in ng.lits().iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                out.push(if l.is_true() { 'T' } else { 'F' });
                out.push(' ');
                out.push_str(&self.aux.name(program, l.atom()));
            }
            out.push_str("} ");
            out.push_str(&ng.origin().to_string());
            out.push('\n');
        }
        out
    }
}

fn has_overlap(r: &Rule) -> bool {
    !r.is_consistent()
}

fn allocate_aux(program: &GroundProgram) -> AuxMap {
    let first = program.atom_count() as u32 + 1;
    let mut next = first;
    let mut rules = Vec::with_capacity(program.rules().len());
    let mut owners = Vec::new();
    let mut fresh = |r: usize, kind: AuxKind, owners: &mut Vec<(usize, AuxKind)>| {
        let id = AtomId(next);
        next += 1;
        owners.push((r, kind));
        id
    };
    for (i, r) in program.rules().iter().enumerate() {
        let body = fresh(i, AuxKind::Body, &mut owners);
        let (pos, neg) = if has_overlap(r) {
            (None, None)
        } else {
            let pos = (!r.pos.is_empty()).then(|| fresh(i, AuxKind::PosBody, &mut owners));
            let neg = (!r.neg.is_empty()).then(|| fresh(i, AuxKind::NegBody, &mut owners));
            (pos, neg)
        };
        rules.push(RuleAux { body, pos, neg });
    }
    AuxMap { first, rules, owners }
}

pub fn compile_completion(program: &GroundProgram) -> Completion {
    let aux = allocate_aux(program);
    let mut out = Vec::new();
    let mut emit = |lits: Vec<Lit>, origin: Origin| {
        if let Some(ng) = Nogood::new(lits, origin) {
            out.push(ng);
        }
    };
    use Lit as L;
    let o = Origin::Completion;

    for (i, r) in program.rules().iter().enumerate() {
        let RuleAux { body: b, pos, neg } = aux.rules[i];
        if has_overlap(r) {
            emit(vec![L::pos(b)], o);
            continue;
        }
        match (pos, neg) {
            (Some(t), Some(n)) => {
                emit(vec![L::neg(b), L::pos(t), L::pos(n)], o);
                emit(vec![L::pos(b), L::neg(t)], o);
                emit(vec![L::pos(b), L::neg(n)], o);
            }
            (None, Some(n)) => {
                emit(vec![L::neg(b), L::pos(n)], o);
                emit(vec![L::pos(b), L::neg(n)], o);
            }
            (Some(t), None) => {
                emit(vec![L::neg(b), L::pos(t)], o);
                emit(vec![L::pos(b), L::neg(t)], o);
            }
            (None, None) => emit(vec![L::neg(b)], o),
        }
        if let Some(t) = pos {
            for &p in &r.pos {
                emit(vec![L::pos(t), L::neg(p)], o);
            }
            emit(std::iter::once(L::neg(t)).chain(r.pos.iter().map(|&p| L::pos(p))).collect(), o);
        }
        if let Some(n) = neg {
            for &q in &r.neg {
                emit(vec![L::pos(n), L::pos(q)], o);
            }
            emit(std::iter::once(L::neg(n)).chain(r.neg.iter().map(|&q| L::neg(q))).collect(), o);
        }
    }

    for p in program.atoms().ids() {
        let defining = program.rules_of(p);
        if defining.is_empty() {
            emit(vec![L::pos(p)], o);
            continue;
        }
        for &r in defining {
            emit(vec![L::neg(p), L::pos(aux.rules[r].body)], o);
        }
        emit(std::iter::once(L::pos(p)).chain(defining.iter().map(|&r| L::neg(aux.rules[r].body))).collect(), o);
    }

    for c in program.constraints() {
        emit(c.pos.iter().map(|&p| L::pos(p)).chain(c.neg.iter().map(|&q| L::neg(q))).collect(), Origin::Constraint);
    }

    Completion { nogoods: out, aux }
}

/// Predicted nogood counts per category.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Census {
    pub rule_nogoods: usize,
    pub defined_atom_nogoods: usize,
    pub undefined_atom_nogoods: usize,
    pub constraint_nogoods: usize,
}

impl Census {
    pub fn total(&self) -> usize {
        self.rule_nogoods + self.defined_atom_nogoods + self.undefined_atom_nogoods + self.constraint_nogoods
    }
}

/// Closed-form nogood count, computed from the program alone.
pub fn nogood_census(program: &GroundProgram) -> Census {
    let mut c = Census::default();
    for r in program.rules() {
        let (np, nn) = (r.pos.len(), r.neg.len());
        c.rule_nogoods += if has_overlap(r) {
            1
        } else {
            match (np > 0, nn > 0) {
                (true, true) => 5 + np + nn,
                (false, true) => 3 + nn,
                (true, false) => 3 + np,
                (false, false) => 1,
            }
        };
    }
    for p in program.atoms().ids() {
        match program.rules_of(p).len() {
            0 => c.undefined_atom_nogoods += 1,
            k => c.defined_atom_nogoods += 1 + k,
        }
    }
    c.constraint_nogoods = program.constraints().iter().filter(|r| r.is_consistent()).count();
    c
}
