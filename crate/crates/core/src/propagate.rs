//! Unit propagation: input units, then frontier-driven passes over the
//! occurrence lists of newly assigned literals.

use crate::assignment::{AssignResult, Assignment, Reason};
use crate::lit::Lit;
use crate::pool::WorkerPool;
use crate::store::{LengthClass, NogoodId, NogoodStore};

pub const DEFAULT_PAR_THRESHOLD: usize = 512;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PropagationOutcome {
    /// Violated nogoods found in the last pass, sorted by id.
    pub conflicts: Vec<NogoodId>,
    /// Unit nogoods whose literal was already forced the other way.
    pub unit_conflicts: Vec<Lit>,
    pub propagations: u64,
    pub passes: u64,
    pub watch_replacements: u64,
}

impl PropagationOutcome {
    pub fn violated(&self) -> bool {
        !self.conflicts.is_empty() || !self.unit_conflicts.is_empty()
    }
}

/// Assigns the complement of every static and learned unit at level 1.
pub fn initial_propagation(store: &NogoodStore, a: &mut Assignment) -> PropagationOutcome {
    assert_eq!(a.level(), 1, "initial propagation runs at level 1");
    let mut out = PropagationOutcome::default();
    let empty = a.deps().empty_mask();
    let learned = store.learned_units().iter().map(|&id| store.lits(id)[0]);
    for u in store.units().iter().copied().chain(learned) {
        match a.assign(u.complement(), 1, Reason::Unit, &empty) {
            AssignResult::NewlySet => out.propagations += 1,
            AssignResult::Agreed => {}
            AssignResult::Conflict => out.unit_conflicts.push(u),
        }
    }
    out
}

/// OR of Deps over `lits` minus `w` and its complement, skipping level-1 atoms.
pub fn mk_dl_bitmap(lits: &[Lit], w: Lit, a: &Assignment, out: &mut [u64]) {
    out.fill(0);
    for &x in lits {
        if x.atom() == w.atom() || a.level_of(x.atom()) <= 1 {
            continue;
        }
        a.deps().or_into(out, x.atom());
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Quiet,
    Satisfied,
    Unit(Lit),
    Violated,
}

/// Evaluates one nogood, moving watches off literals that are in A.
/// Returns the verdict, the new watches and the number of replacements.
pub fn evaluate(lits: &[Lit], watches: [Lit; 2], a: &Assignment) -> (Verdict, [Lit; 2], u32) {
    let [mut w1, mut w2] = watches;
    if a.value(w1) == Some(false) || a.value(w2) == Some(false) {
        return (Verdict::Satisfied, [w1, w2], 0);
    }
    let mut moved = 0;
    for slot in 0..2 {
        let (cur, other) = if slot == 0 { (w1, w2) } else { (w2, w1) };
        if !a.holds(cur) {
            continue;
        }
        if let Some(&sub) = lits.iter().find(|&&l| l != cur && l != other && !a.holds(l)) {
            moved += 1;
            if slot == 0 {
                w1 = sub;
            } else {
                w2 = sub;
            }
            if a.value(sub) == Some(false) {
                return (Verdict::Satisfied, [w1, w2], moved);
            }
        }
    }
    let v = match (a.holds(w1), a.holds(w2)) {
        (false, false) => Verdict::Quiet,
        (true, true) => Verdict::Violated,
        (true, false) => Verdict::Unit(w2),
        (false, true) => Verdict::Unit(w1),
    };
    (v, [w1, w2], moved)
}

#[derive(Default)]
struct WorkerOut {
    watches: Vec<(NogoodId, [Lit; 2])>,
    claimed: Vec<(Lit, NogoodId)>,
    conflicts: Vec<NogoodId>,
    replacements: u64,
}

pub struct Propagator {
    stamps: Vec<u32>,
    pass: u32,
    par_threshold: usize,
    offset: usize,
    items: Vec<NogoodId>,
    scratch: Vec<u64>,
}

impl Propagator {
    pub fn new(par_threshold: usize, seed: u64) -> Propagator {
        Propagator {
            stamps: Vec::new(),
            pass: 0,
            par_threshold,
            offset: seed as usize,
            items: Vec::new(),
            scratch: Vec::new(),
        }
    }

    /// Runs passes until the frontier is empty or a pass finds a conflict.
    pub fn propagate(&mut self, store: &mut NogoodStore, a: &mut Assignment, pool: &WorkerPool) -> PropagationOutcome {
        let mut out = PropagationOutcome::default();
        if self.stamps.len() < store.len() {
            self.stamps.resize(store.len(), 0);
        }
        self.scratch.resize(a.deps().words(), 0);
        while a.frontier.swap() {
            out.passes += 1;
            self.collect_items(store, a);
            if pool.workers() > 1 && self.items.len() >= self.par_threshold.max(1) {
                self.parallel_pass(store, a, pool, &mut out);
            } else {
                self.serial_pass(store, a, &mut out);
            }
            if !out.conflicts.is_empty() {
                out.conflicts.sort_unstable();
                out.conflicts.dedup();
                break;
            }
        }
        out
    }

    /// Distinct nogoods touched by `last`, binary first, then ternary, then long.
    fn collect_items(&mut self, store: &NogoodStore, a: &Assignment) {
        self.pass = self.pass.wrapping_add(1);
        if self.pass == 0 {
            self.stamps.fill(0);
            self.pass = 1;
        }
        self.items.clear();
        for class in LengthClass::PROPAGATING {
            for &l in &a.frontier.last {
                for &id in store.occurrences(class, l) {
                    let s = &mut self.stamps[id.index()];
                    if *s != self.pass {
                        *s = self.pass;
                        self.items.push(id);
                    }
                }
            }
        }
    }

    fn serial_pass(&mut self, store: &mut NogoodStore, a: &mut Assignment, out: &mut PropagationOutcome) {
        let level = a.level();
        let track = a.tracks_deps();
        for i in 0..self.items.len() {
            let id = self.items[i];
            let (v, w, moved) = evaluate(store.lits(id), store.watches(id), a);
            out.watch_replacements += moved as u64;
            store.set_watches(id, w);
            match v {
                Verdict::Quiet | Verdict::Satisfied => {}
                Verdict::Violated => out.conflicts.push(id),
                Verdict::Unit(w) => {
                    if track {
                        mk_dl_bitmap(store.lits(id), w, a, &mut self.scratch);
                    }
                    match a.assign(w.complement(), level, Reason::Nogood(id), &self.scratch) {
                        AssignResult::NewlySet => out.propagations += 1,
                        AssignResult::Agreed => {}
                        AssignResult::Conflict => out.conflicts.push(id),
                    }
                }
            }
        }
    }

    fn parallel_pass(
        &mut self,
        store: &mut NogoodStore,
        a: &mut Assignment,
        pool: &WorkerPool,
        out: &mut PropagationOutcome,
    ) {
        let level = a.level();
        let workers = pool.workers();
        let offset = self.offset % workers;
        self.offset = self.offset.wrapping_add(1);
        let items = &self.items;
        let shared_store: &NogoodStore = store;
        let shared_a: &Assignment = a;
        let results = pool.run(|k| {
            let mut w_out = WorkerOut::default();
            let start = (k + workers - offset) % workers;
            for &id in items.iter().skip(start).step_by(workers) {
                let (v, w, moved) = evaluate(shared_store.lits(id), shared_store.watches(id), shared_a);
                w_out.replacements += moved as u64;
                w_out.watches.push((id, w));
                match v {
                    Verdict::Quiet | Verdict::Satisfied => {}
                    Verdict::Violated => w_out.conflicts.push(id),
                    Verdict::Unit(w) => match shared_a.try_claim(w.complement(), level) {
                        AssignResult::NewlySet => w_out.claimed.push((w.complement(), id)),
                        AssignResult::Agreed => {}
                        AssignResult::Conflict => w_out.conflicts.push(id),
                    },
                }
            }
            w_out
        });

        let mut pending = Vec::new();
        for r in results {
            out.watch_replacements += r.replacements;
            for (id, w) in r.watches {
                store.set_watches(id, w);
            }
            out.conflicts.extend(r.conflicts);
            pending.extend(r.claimed);
        }
        out.propagations += pending.len() as u64;
        self.record_claimed(store, a, pending);
    }

    /// Appends claimed literals to the trail so that every literal follows the
    /// literals of its antecedent, then fills in their Deps.
    fn record_claimed(&mut self, store: &NogoodStore, a: &mut Assignment, mut pending: Vec<(Lit, NogoodId)>) {
        while !pending.is_empty() {
            let before = pending.len();
            let mut i = 0;
            while i < pending.len() {
                let (lit, id) = pending[i];
                let ready = store.lits(id).iter().all(|x| x.atom() == lit.atom() || a.trail_pos(x.atom()).is_some());
                if ready {
                    if a.tracks_deps() {
                        mk_dl_bitmap(store.lits(id), lit, a, &mut self.scratch);
                    }
                    a.record(lit, Reason::Nogood(id), &self.scratch);
                    pending.remove(i);
                } else {
                    i += 1;
                }
            }
            assert!(pending.len() < before, "cyclic propagation order");
        }
    }
}

/// Nogoods that are unit or violated under `a` (full scan of the store).
pub fn fixpoint_violations(store: &NogoodStore, a: &Assignment) -> Vec<NogoodId> {
    (0..store.len() as u32)
        .map(NogoodId)
        .filter(|&id| {
            let lits = store.lits(id);
            if lits.iter().any(|&l| a.value(l) == Some(false)) {
                return false;
            }
            lits.iter().filter(|&&l| !a.holds(l)).count() <= 1
        })
        .collect()
}
