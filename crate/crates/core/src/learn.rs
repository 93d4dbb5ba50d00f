//! Conflict analysis: first-UIP resolution (res) and Deps-bitmap
//! reduction over decision levels (fwd).

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use crate::assignment::{mask_is_zero, mask_levels, Assignment, Reason};
use crate::completion::{Nogood, Origin};
use crate::error::{Error, Result};
use crate::lit::Lit;
use crate::pool::WorkerPool;
use crate::propagate::mk_dl_bitmap;
use crate::store::{NogoodId, NogoodStore};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum LearnMode {
    #[default]
    Fwd,
    Res,
}

impl fmt::Display for LearnMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LearnMode::Fwd => "fwd",
            LearnMode::Res => "res",
        })
    }
}

impl FromStr for LearnMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fwd" => Ok(LearnMode::Fwd),
            "res" => Ok(LearnMode::Res),
            _ => Err(Error::Config(format!("unknown learning mode '{s}' (expected fwd or res)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Learned {
    pub nogood: Nogood,
    pub backjump: u32,
    pub mode: LearnMode,
    pub conflict: NogoodId,
    /// The two most recently assigned literals (equal for units).
    pub watches: [Lit; 2],
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Analysis {
    /// The conflict does not depend on any decision.
    Unsat,
    Learned {
        nogoods: Vec<Learned>,
        backjump: u32,
    },
}

/// Shortest conflicting nogood, ties to the lowest id.
pub fn select_conflict(conflicts: &[NogoodId], store: &NogoodStore) -> NogoodId {
    select_conflicts(conflicts, store, 1)[0]
}

/// Up to `k` conflicts ordered by (length, id).
pub fn select_conflicts(conflicts: &[NogoodId], store: &NogoodStore, k: usize) -> Vec<NogoodId> {
    assert!(!conflicts.is_empty(), "no conflict to select");
    let mut v: Vec<NogoodId> = conflicts.to_vec();
    v.sort_unstable_by_key(|&id| (store.len_of(id), id));
    v.dedup();
    v.truncate(k.max(1));
    v
}

/// The nogood that forced `lit` (which is in A), or `None` for decisions and units.
/// Completion falsifications are justified by the current decisions.
pub fn antecedent(store: &NogoodStore, a: &Assignment, lit: Lit) -> Option<Vec<Lit>> {
    match a.reason(lit.atom()) {
        Reason::Nogood(id) => Some(store.lits(id).to_vec()),
        Reason::Completion => {
            let level = a.level_of(lit.atom());
            let mut eps: Vec<Lit> = (2..=level).filter_map(|j| a.decision_at(j)).collect();
            eps.push(lit.complement());
            Some(eps)
        }
        Reason::Decision | Reason::Unit => None,
    }
}

fn latest(a: &Assignment, lits: &[Lit]) -> (usize, Lit) {
    lits.iter()
        .copied()
        .enumerate()
        .max_by_key(|&(_, l)| a.trail_pos(l.atom()).expect("conflict literal not on trail"))
        .expect("empty nogood")
}

/// First-UIP resolution. Returns the learned literals and the backjump level,
/// or `None` when everything involved is fixed at level 1.
pub fn res_learning(delta: &[Lit], store: &NogoodStore, a: &Assignment) -> Result<Option<(Vec<Lit>, u32)>> {
    let mut d: Vec<Lit> = delta.to_vec();
    let mut present: HashSet<Lit> = d.iter().copied().collect();
    loop {
        let (si, sigma) = latest(a, &d);
        let ls = a.level_of(sigma.atom());
        if ls <= 1 {
            return Ok(None);
        }
        let kappa =
            d.iter().enumerate().filter(|&(i, _)| i != si).map(|(_, l)| a.level_of(l.atom())).max().unwrap_or(0);
        if kappa != ls {
            return Ok(Some((d, kappa.max(1))));
        }
        let eps = antecedent(store, a, sigma).ok_or_else(|| {
            Error::Internal(format!("{sigma:?} shares level {ls} with another literal but has no antecedent"))
        })?;
        d.swap_remove(si);
        present.remove(&sigma);
        for l in eps {
            if l != sigma.complement() && present.insert(l) {
                d.push(l);
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FwdOutcome {
    Unsat,
    /// A level involved exceeds the Deps capacity.
    Overflow,
    Learned(Vec<Lit>, u32),
}

/// Decision-level learning from the OR of the Deps bitmaps of `delta`.
pub fn fwd_learning(delta: &[Lit], store: &NogoodStore, a: &Assignment, pool: &WorkerPool) -> FwdOutcome {
    let cap = a.deps().capacity();
    if !a.tracks_deps() || delta.iter().any(|l| a.level_of(l.atom()) > cap) {
        return FwdOutcome::Overflow;
    }
    let words = a.deps().words();
    let masks: Vec<&[u64]> = delta.iter().map(|l| a.deps().get(l.atom())).collect();
    let mut m = pool.or_reduce(&masks, words);

    let (_, sigma) = latest(a, delta);
    let mut extra = vec![0u64; words];
    match a.reason(sigma.atom()) {
        Reason::Nogood(id) => mk_dl_bitmap(store.lits(id), sigma.complement(), a, &mut extra),
        Reason::Completion => extra.copy_from_slice(a.deps().get(sigma.atom())),
        Reason::Decision | Reason::Unit => {}
    }
    for (x, e) in m.iter_mut().zip(&extra) {
        *x |= *e;
    }

    if mask_is_zero(&m) {
        return FwdOutcome::Unsat;
    }
    let levels = mask_levels(&m);
    let lits = levels.iter().map(|&j| a.decision_at(j).expect("Deps bit without a decision")).collect();
    let backjump = if levels.len() >= 2 { levels[levels.len() - 2] } else { 1 };
    FwdOutcome::Learned(lits, backjump)
}

fn most_recent_two(a: &Assignment, lits: &[Lit]) -> [Lit; 2] {
    let mut v: Vec<Lit> = lits.to_vec();
    v.sort_by_key(|l| std::cmp::Reverse(a.trail_pos(l.atom())));
    match v.as_slice() {
        [x] => [*x, *x],
        [x, y, ..] => [*x, *y],
        [] => unreachable!(),
    }
}

fn finish(lits: Vec<Lit>, backjump: u32, mode: LearnMode, conflict: NogoodId, a: &Assignment) -> Result<Learned> {
    let watches = most_recent_two(a, &lits);
    let nogood = Nogood::new(lits, Origin::Learned)
        .ok_or_else(|| Error::Internal("learned nogood is empty or contradictory".into()))?;
    Ok(Learned { nogood, backjump, mode, conflict, watches })
}

/// Analyzes the selected conflict(s). In fwd mode up to `fanout` conflicts are
/// analyzed and the lowest backjump level wins; overflowing ones use res.
pub fn analyze(
    conflicts: &[NogoodId],
    mode: LearnMode,
    fanout: usize,
    store: &NogoodStore,
    a: &Assignment,
    pool: &WorkerPool,
) -> Result<Analysis> {
    let picked = match mode {
        LearnMode::Res => select_conflicts(conflicts, store, 1),
        LearnMode::Fwd => select_conflicts(conflicts, store, fanout),
    };
    let mut out = Vec::with_capacity(picked.len());
    for id in picked {
        let delta = store.lits(id);
        let fwd = match mode {
            LearnMode::Fwd => fwd_learning(delta, store, a, pool),
            LearnMode::Res => FwdOutcome::Overflow,
        };
        let learned = match fwd {
            FwdOutcome::Unsat => return Ok(Analysis::Unsat),
            FwdOutcome::Learned(lits, bj) => finish(lits, bj, LearnMode::Fwd, id, a)?,
            FwdOutcome::Overflow => match res_learning(delta, store, a)? {
                None => return Ok(Analysis::Unsat),
                Some((lits, bj)) => finish(lits, bj, LearnMode::Res, id, a)?,
            },
        };
        out.push(learned);
    }
    let backjump = out.iter().map(|l| l.backjump).min().expect("at least one conflict");
    Ok(Analysis::Learned { nogoods: out, backjump })
}
