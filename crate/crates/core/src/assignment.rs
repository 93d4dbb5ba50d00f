//! Partial assignment with signed decision-level cells, trail, Deps bitmaps
//! and the propagation frontier.

use std::fmt::Write as _;
use std::sync::atomic::{AtomicI32, Ordering};

use crate::lit::{AtomId, Lit};
use crate::store::NogoodId;

pub const DEFAULT_DEPS_WORDS: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Reason {
    /// Unit nogood (static or learned) applied at level 1.
    Unit,
    Decision,
    Nogood(NogoodId),
    /// Falsified because no rule for the atom was applicable.
    Completion,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AssignResult {
    NewlySet,
    Agreed,
    Conflict,
}

/// Per-atom bitmask over decision levels; bit `j - 1` stands for level `j`.
#[derive(Clone, Debug)]
pub struct DepsMap {
    words: usize,
    bits: Vec<u64>,
}

impl DepsMap {
    pub fn new(num_atoms: usize, words: usize) -> DepsMap {
        assert!(words >= 1);
        DepsMap { words, bits: vec![0; (num_atoms + 1) * words] }
    }

    pub fn words(&self) -> usize {
        self.words
    }

    /// Highest representable decision level.
    pub fn capacity(&self) -> u32 {
        (self.words * 64) as u32
    }

    #[inline]
    pub fn get(&self, atom: AtomId) -> &[u64] {
        let s = atom.index() * self.words;
        &self.bits[s..s + self.words]
    }

    pub fn set(&mut self, atom: AtomId, mask: &[u64]) {
        let s = atom.index() * self.words;
        self.bits[s..s + self.words].copy_from_slice(mask);
    }

    pub fn clear(&mut self, atom: AtomId) {
        let s = atom.index() * self.words;
        self.bits[s..s + self.words].fill(0);
    }

    #[inline]
    pub fn or_into(&self, dst: &mut [u64], atom: AtomId) {
        for (d, s) in dst.iter_mut().zip(self.get(atom)) {
            *d |= *s;
        }
    }

    pub fn empty_mask(&self) -> Vec<u64> {
        vec![0; self.words]
    }
}

pub fn set_level_bit(mask: &mut [u64], level: u32) {
    debug_assert!(level >= 1);
    let bit = (level - 1) as usize;
    if bit < mask.len() * 64 {
        mask[bit / 64] |= 1 << (bit % 64);
    }
}

pub fn has_level_bit(mask: &[u64], level: u32) -> bool {
    let bit = (level - 1) as usize;
    bit < mask.len() * 64 && mask[bit / 64] & (1 << (bit % 64)) != 0
}

/// Set levels in ascending order.
pub fn mask_levels(mask: &[u64]) -> Vec<u32> {
    let mut out = Vec::new();
    for (w, &word) in mask.iter().enumerate() {
        let mut word = word;
        while word != 0 {
            let b = word.trailing_zeros();
            out.push((w * 64) as u32 + b + 1);
            word &= word - 1;
        }
    }
    out
}

pub fn mask_is_zero(mask: &[u64]) -> bool {
    mask.iter().all(|&w| w == 0)
}

#[derive(Clone, Debug, Default)]
pub struct Frontier {
    pub last: Vec<Lit>,
    pub next: Vec<Lit>,
}

impl Frontier {
    pub fn clear(&mut self) {
        self.last.clear();
        self.next.clear();
    }

    /// Moves `next` into `last`; returns false when there is nothing to do.
    pub fn swap(&mut self) -> bool {
        std::mem::swap(&mut self.last, &mut self.next);
        self.next.clear();
        !self.last.is_empty()
    }
}

const NOT_ON_TRAIL: u32 = u32::MAX;

#[derive(Debug)]
pub struct Assignment {
    cells: Vec<AtomicI32>,
    trail: Vec<Lit>,
    trail_pos: Vec<u32>,
    reasons: Vec<Reason>,
    /// Trail index at which each level begins; index 0 is a placeholder.
    level_starts: Vec<usize>,
    /// Decision literal per level; entries 0 and 1 are placeholders.
    decisions: Vec<Lit>,
    deps: DepsMap,
    track_deps: bool,
    pub frontier: Frontier,
}

impl Assignment {
    pub fn new(num_atoms: usize, deps_words: usize, track_deps: bool) -> Assignment {
        let n = num_atoms + 1;
        Assignment {
            cells: (0..n).map(|_| AtomicI32::new(0)).collect(),
            trail: Vec::with_capacity(num_atoms),
            trail_pos: vec![NOT_ON_TRAIL; n],
            reasons: vec![Reason::Unit; n],
            level_starts: vec![0, 0],
            decisions: vec![Lit::pos(AtomId::NONE); 2],
            deps: DepsMap::new(num_atoms, deps_words),
            track_deps,
            frontier: Frontier::default(),
        }
    }

    pub fn num_atoms(&self) -> usize {
        self.cells.len() - 1
    }

    pub fn level(&self) -> u32 {
        (self.level_starts.len() - 1) as u32
    }

    pub fn tracks_deps(&self) -> bool {
        self.track_deps
    }

    pub fn deps(&self) -> &DepsMap {
        &self.deps
    }

    #[inline]
    pub fn cell(&self, atom: AtomId) -> i32 {
        self.cells[atom.index()].load(Ordering::Acquire)
    }

    #[inline]
    pub fn is_assigned(&self, atom: AtomId) -> bool {
        self.cell(atom) != 0
    }

    /// True iff `lit` itself is in A.
    #[inline]
    pub fn holds(&self, lit: Lit) -> bool {
        let c = self.cell(lit.atom());
        if lit.is_true() {
            c > 0
        } else {
            c < 0
        }
    }

    /// `Some(true)` if `lit` is in A, `Some(false)` if its complement is.
    #[inline]
    pub fn value(&self, lit: Lit) -> Option<bool> {
        let c = self.cell(lit.atom());
        if c == 0 {
            None
        } else {
            Some((c > 0) == lit.is_true())
        }
    }

    pub fn level_of(&self, atom: AtomId) -> u32 {
        self.cell(atom).unsigned_abs()
    }

    pub fn reason(&self, atom: AtomId) -> Reason {
        self.reasons[atom.index()]
    }

    pub fn trail(&self) -> &[Lit] {
        &self.trail
    }

    /// Trail index of an assigned atom.
    pub fn trail_pos(&self, atom: AtomId) -> Option<usize> {
        match self.trail_pos[atom.index()] {
            NOT_ON_TRAIL => None,
            p => Some(p as usize),
        }
    }

    pub fn decision_at(&self, level: u32) -> Option<Lit> {
        (level >= 2).then(|| self.decisions.get(level as usize).copied()).flatten()
    }

    /// Decision literals of levels `2..=level()`.
    pub fn decisions(&self) -> &[Lit] {
        &self.decisions[2..]
    }

    pub fn is_total(&self) -> bool {
        self.trail.len() == self.num_atoms()
    }

    /// Non-atomic assignment used by the coordinator. On `NewlySet` the literal
    /// is appended to the trail and to `frontier.next`.
    pub fn assign(&mut self, lit: Lit, level: u32, reason: Reason, deps: &[u64]) -> AssignResult {
        debug_assert!(level >= 1 && level <= self.level());
        match self.try_claim(lit, level) {
            AssignResult::NewlySet => {
                self.record(lit, reason, deps);
                AssignResult::NewlySet
            }
            other => other,
        }
    }

    /// Compare-and-set on the cell only; the winner must later call `record`.
    pub fn try_claim(&self, lit: Lit, level: u32) -> AssignResult {
        let want = if lit.is_true() { level as i32 } else { -(level as i32) };
        match self.cells[lit.atom().index()].compare_exchange(0, want, Ordering::AcqRel, Ordering::Acquire) {
            Ok(_) => AssignResult::NewlySet,
            Err(cur) if (cur > 0) == lit.is_true() => AssignResult::Agreed,
            Err(_) => AssignResult::Conflict,
        }
    }

    /// Appends a claimed literal to the trail with its reason and Deps.
    pub fn record(&mut self, lit: Lit, reason: Reason, deps: &[u64]) {
        let a = lit.atom();
        debug_assert!(self.holds(lit) && self.trail_pos[a.index()] == NOT_ON_TRAIL);
        self.trail_pos[a.index()] = self.trail.len() as u32;
        self.trail.push(lit);
        self.reasons[a.index()] = reason;
        if self.track_deps {
            self.deps.set(a, deps);
        }
        self.frontier.next.push(lit);
    }

    /// Opens a new level with `lit` as its decision.
    pub fn decide(&mut self, lit: Lit) -> u32 {
        self.level_starts.push(self.trail.len());
        self.decisions.push(lit);
        let level = self.level();
        let mut mask = self.deps.empty_mask();
        set_level_bit(&mut mask, level);
        let r = self.assign(lit, level, Reason::Decision, &mask);
        assert_eq!(r, AssignResult::NewlySet, "decision on an assigned atom");
        level
    }

    /// Erases every assignment above `target`.
    pub fn backjump(&mut self, target: u32) {
        assert!(target >= 1 && target < self.level(), "backjump {target} from {}", self.level());
        let cut = self.level_starts[target as usize + 1];
        self.erase_from(cut);
        self.level_starts.truncate(target as usize + 1);
        self.decisions.truncate(target as usize + 1);
        self.frontier.clear();
    }

    /// Clears everything including level 1.
    pub fn reset(&mut self) {
        self.erase_from(0);
        self.level_starts.truncate(2);
        self.decisions.truncate(2);
        self.frontier.clear();
    }

    fn erase_from(&mut self, cut: usize) {
        for lit in self.trail.drain(cut..) {
            let a = lit.atom();
            self.cells[a.index()].store(0, Ordering::Release);
            self.trail_pos[a.index()] = NOT_ON_TRAIL;
            self.reasons[a.index()] = Reason::Unit;
            if self.track_deps {
                self.deps.clear(a);
            }
        }
    }

    /// OR of all decision bits of the current branch.
    pub fn all_decisions_mask(&self) -> Vec<u64> {
        let mut mask = self.deps.empty_mask();
        for level in 2..=self.level() {
            set_level_bit(&mut mask, level);
        }
        mask
    }

    /// Checks trail/cell coherence, level monotonicity and decision Deps.
    pub fn check_coherence(&self) -> Result<(), String> {
        let mut prev = 1;
        for (i, &lit) in self.trail.iter().enumerate() {
            let a = lit.atom();
            if !self.holds(lit) {
                return Err(format!("trail literal {lit:?} not in cells"));
            }
            if self.trail_pos[a.index()] as usize != i {
                return Err(format!("trail position of {lit:?} is stale"));
            }
            let level = self.level_of(a);
            if level < prev {
                return Err(format!("trail levels decrease at {lit:?}"));
            }
            prev = level;
        }
        let assigned = (1..self.cells.len()).filter(|&i| self.cells[i].load(Ordering::Acquire) != 0).count();
        if assigned != self.trail.len() {
            return Err(format!("{assigned} assigned cells but trail length {}", self.trail.len()));
        }
        for level in 2..=self.level() {
            let d = self.decisions[level as usize];
            if self.level_of(d.atom()) != level || self.reason(d.atom()) != Reason::Decision {
                return Err(format!("decision {d:?} not recorded at level {level}"));
            }
            if self.track_deps && level <= self.deps.capacity() {
                let mut m = self.deps.empty_mask();
                set_level_bit(&mut m, level);
                if self.deps.get(d.atom()) != m.as_slice() {
                    return Err(format!("decision {d:?} has wrong Deps"));
                }
            }
        }
        Ok(())
    }

    /// One line per trail entry: `<lit>@<level> <reason>`.
    pub fn debug_trail(&self) -> String {
        let mut out = String::new();
        for &lit in &self.trail {
            let _ = writeln!(out, "{lit:?}@{} {:?}", self.level_of(lit.atom()), self.reason(lit.atom()));
        }
        out
    }
}
