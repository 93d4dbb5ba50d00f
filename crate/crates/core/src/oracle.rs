//! Brute-force reference semantics for small programs, plus a naive unit
//! closure over plain nogood lists.

use std::collections::BTreeSet;

use crate::completion::Nogood;
use crate::error::{Error, Result};
use crate::lit::{AtomId, Lit};
use crate::program::GroundProgram;

pub const MAX_ORACLE_ATOMS: usize = 22;

pub type AtomSet = BTreeSet<AtomId>;

/// Negation-free program relative to a candidate interpretation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reduct {
    pub rules: Vec<(AtomId, Vec<AtomId>)>,
    pub constraints: Vec<Vec<AtomId>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LeastModel {
    Model(AtomSet),
    ConstraintViolated,
}

pub fn reduct(program: &GroundProgram, m: &AtomSet) -> Reduct {
    let keep = |neg: &[AtomId]| neg.iter().all(|q| !m.contains(q));
    Reduct {
        rules: program.rules().iter().filter(|r| keep(&r.neg)).map(|r| (r.head, r.pos.clone())).collect(),
        constraints: program.constraints().iter().filter(|c| keep(&c.neg)).map(|c| c.pos.clone()).collect(),
    }
}

pub fn least_model(reduct: &Reduct) -> LeastModel {
    let mut m = AtomSet::new();
    loop {
        let mut grew = false;
        for (head, pos) in &reduct.rules {
            if !m.contains(head) && pos.iter().all(|p| m.contains(p)) {
                m.insert(*head);
                grew = true;
            }
        }
        if !grew {
            break;
        }
    }
    if reduct.constraints.iter().any(|c| c.iter().all(|p| m.contains(p))) {
        LeastModel::ConstraintViolated
    } else {
        LeastModel::Model(m)
    }
}

pub fn is_answer_set(program: &GroundProgram, m: &AtomSet) -> bool {
    least_model(&reduct(program, m)) == LeastModel::Model(m.clone())
}

/// Every answer set, in increasing order of the candidate bitmask.
pub fn enumerate_answer_sets(program: &GroundProgram) -> Result<Vec<AtomSet>> {
    let n = program.atom_count();
    if n > MAX_ORACLE_ATOMS {
        return Err(Error::Config(format!("oracle handles at most {MAX_ORACLE_ATOMS} atoms, program has {n}")));
    }
    let ids: Vec<AtomId> = program.atoms().ids().collect();
    let mut out = Vec::new();
    for mask in 0u32..(1u32 << n) {
        let m: AtomSet = ids.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &a)| a).collect();
        if program.is_model(&m) && is_answer_set(program, &m) {
            out.push(m);
        }
    }
    Ok(out)
}

/// Repeated full scans: assigns the complement of the last free literal of
/// any nogood whose other literals all hold. `None` on conflict.
pub fn unit_closure(nogoods: &[Nogood], assumptions: &[Lit]) -> Option<BTreeSet<Lit>> {
    let mut a: BTreeSet<Lit> = BTreeSet::new();
    for &l in assumptions {
        if a.contains(&l.complement()) {
            return None;
        }
        a.insert(l);
    }
    loop {
        let mut changed = false;
        for ng in nogoods {
            if ng.lits().iter().any(|l| a.contains(&l.complement())) {
                continue;
            }
            let free: Vec<Lit> = ng.lits().iter().copied().filter(|l| !a.contains(l)).collect();
            match free.as_slice() {
                [] => return None,
                [w] => {
                    a.insert(w.complement());
                    changed = true;
                }
                _ => {}
            }
        }
        if !changed {
            return Some(a);
        }
    }
}
