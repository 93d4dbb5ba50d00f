//! Length-sorted CSR nogood storage with occurrence lists and watches.
//!
//! Static nogoods (length >= 2) occupy ids `0..static_count()` in
//! non-decreasing length order. Unit nogoods never enter the CSR arrays; they
//! are kept as a literal list and drive initial propagation. Learned nogoods are
//! appended after the static partition and additionally indexed per length
//! class; learned units get an id but no occurrence entries.

use std::fmt::Write as _;

use crate::completion::{Nogood, Origin};
use crate::error::{Error, Result};
use crate::lit::Lit;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct NogoodId(pub u32);

impl NogoodId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum LengthClass {
    Unit,
    Binary,
    Ternary,
    Long,
}

impl LengthClass {
    pub fn of(len: usize) -> LengthClass {
        match len {
            0 | 1 => LengthClass::Unit,
            2 => LengthClass::Binary,
            3 => LengthClass::Ternary,
            _ => LengthClass::Long,
        }
    }

    /// Classes handled by propagation passes, in pass order.
    pub const PROPAGATING: [LengthClass; 3] = [LengthClass::Binary, LengthClass::Ternary, LengthClass::Long];

    fn slot(self) -> usize {
        self as usize
    }
}

pub const DEFAULT_LEARNED_CAPACITY: usize = 4_000_000;

#[derive(Clone, Debug)]
pub struct NogoodStore {
    pool: Vec<Lit>,
    offsets: Vec<usize>,
    origins: Vec<Origin>,
    watches: Vec<[Lit; 2]>,
    static_count: usize,
    /// Start of the binary, ternary and long partitions, and the end.
    static_bounds: [usize; 4],
    units: Vec<Lit>,
    learned_by_class: [Vec<NogoodId>; 4],
    /// Occurrence lists per propagating length class, indexed by literal code.
    occ: [Vec<Vec<NogoodId>>; 3],
    num_atoms: usize,
    learned_capacity: usize,
}

impl NogoodStore {
    /// Builds the store over atoms `1..=num_atoms`. Units are split out; the
    /// rest are stably sorted by length. Watches start on the first two literals.
    pub fn build(nogoods: &[Nogood], num_atoms: usize) -> NogoodStore {
        let mut units = Vec::new();
        let mut rest: Vec<&Nogood> = Vec::new();
        for ng in nogoods {
            assert!(!ng.is_empty(), "empty nogood");
            if ng.len() == 1 {
                units.push(ng.lits()[0]);
            } else {
                rest.push(ng);
            }
        }
        rest.sort_by_key(|ng| ng.len());

        let lit_slots = 2 * (num_atoms + 1);
        let mut store = NogoodStore {
            pool: Vec::with_capacity(rest.iter().map(|n| n.len()).sum()),
            offsets: vec![0],
            origins: Vec::with_capacity(rest.len()),
            watches: Vec::with_capacity(rest.len()),
            static_count: rest.len(),
            static_bounds: [0; 4],
            units,
            learned_by_class: Default::default(),
            occ: [vec![Vec::new(); lit_slots], vec![Vec::new(); lit_slots], vec![Vec::new(); lit_slots]],
            num_atoms,
            learned_capacity: DEFAULT_LEARNED_CAPACITY,
        };
        for ng in &rest {
            store.push(ng.lits(), ng.origin(), [ng.lits()[0], ng.lits()[1]]);
        }
        let first_with = |len: usize| rest.iter().position(|n| n.len() >= len).unwrap_or(rest.len());
        store.static_bounds = [0, first_with(3), first_with(4), rest.len()];
        store
    }

    fn push(&mut self, lits: &[Lit], origin: Origin, watches: [Lit; 2]) -> NogoodId {
        let id = NogoodId(self.origins.len() as u32);
        self.pool.extend_from_slice(lits);
        self.offsets.push(self.pool.len());
        self.origins.push(origin);
        self.watches.push(watches);
        let class = LengthClass::of(lits.len());
        if class != LengthClass::Unit {
            let slot = class.slot() - 1;
            for l in lits {
                self.occ[slot][l.code()].push(id);
            }
        }
        id
    }

    pub fn set_learned_capacity(&mut self, cap: usize) {
        self.learned_capacity = cap;
    }

    /// Appends a learned nogood watched on its first two literals.
    pub fn add_learned(&mut self, nogood: Nogood) -> Result<NogoodId> {
        let w = match nogood.lits() {
            [a, b, ..] => [*a, *b],
            [a] => [*a, *a],
            [] => unreachable!("Nogood is never empty"),
        };
        self.add_learned_watched(nogood, w)
    }

    /// Appends a learned nogood with explicit watches (ignored for units).
    pub fn add_learned_watched(&mut self, nogood: Nogood, watches: [Lit; 2]) -> Result<NogoodId> {
        if self.learned_count() >= self.learned_capacity {
            return Err(Error::LearnedCapacity(self.learned_capacity));
        }
        if nogood.len() >= 2 {
            debug_assert!(watches[0] != watches[1] && nogood.contains(watches[0]) && nogood.contains(watches[1]));
        }
        let class = LengthClass::of(nogood.len());
        let id = self.push(nogood.lits(), nogood.origin(), watches);
        self.learned_by_class[class.slot()].push(id);
        Ok(id)
    }

    pub fn units(&self) -> &[Lit] {
        &self.units
    }

    pub fn learned_units(&self) -> &[NogoodId] {
        &self.learned_by_class[LengthClass::Unit.slot()]
    }

    pub fn learned_in_class(&self, class: LengthClass) -> &[NogoodId] {
        &self.learned_by_class[class.slot()]
    }

    /// Total number of stored nogoods with ids (static non-unit plus learned).
    pub fn len(&self) -> usize {
        self.origins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.origins.is_empty()
    }

    pub fn static_count(&self) -> usize {
        self.static_count
    }

    pub fn learned_count(&self) -> usize {
        self.origins.len() - self.static_count
    }

    pub fn static_bounds(&self) -> [usize; 4] {
        self.static_bounds
    }

    pub fn num_atoms(&self) -> usize {
        self.num_atoms
    }

    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub fn pool(&self) -> &[Lit] {
        &self.pool
    }

    #[inline]
    pub fn lits(&self, id: NogoodId) -> &[Lit] {
        &self.pool[self.offsets[id.index()]..self.offsets[id.index() + 1]]
    }

    #[inline]
    pub fn len_of(&self, id: NogoodId) -> usize {
        self.offsets[id.index() + 1] - self.offsets[id.index()]
    }

    pub fn class(&self, id: NogoodId) -> LengthClass {
        LengthClass::of(self.len_of(id))
    }

    pub fn origin(&self, id: NogoodId) -> Origin {
        self.origins[id.index()]
    }

    #[inline]
    pub fn watches(&self, id: NogoodId) -> [Lit; 2] {
        self.watches[id.index()]
    }

    pub fn set_watches(&mut self, id: NogoodId, w: [Lit; 2]) {
        self.watches[id.index()] = w;
    }

    /// Occurrence list of `lit` for one propagating class.
    #[inline]
    pub fn occurrences(&self, class: LengthClass, lit: Lit) -> &[NogoodId] {
        debug_assert!(class != LengthClass::Unit);
        self.occ[class.slot() - 1].get(lit.code()).map_or(&[], |v| v.as_slice())
    }

    /// Every nogood containing `lit`, binary first, then ternary, then long.
    pub fn nogoods_of(&self, lit: Lit) -> Vec<NogoodId> {
        LengthClass::PROPAGATING.iter().flat_map(|&c| self.occurrences(c, lit).iter().copied()).collect()
    }

    /// CSV dump of the CSR arrays: `array,index,value`; pool literals use the
    /// signed encoding (`+p` for `Tp`, `-p` for `Fp`).
    pub fn csr_csv(&self) -> String {
        let mut out = String::from("array,index,value\n");
        for (i, o) in self.offsets.iter().enumerate() {
            let _ = writeln!(out, "offset,{i},{o}");
        }
        for (i, l) in self.pool.iter().enumerate() {
            let _ = writeln!(out, "pool,{i},{}", l.to_signed());
        }
        out
    }

    /// Checks CSR integrity and occurrence-map completeness.
    pub fn check_integrity(&self) -> std::result::Result<(), String> {
        if self.offsets.first() != Some(&0) || *self.offsets.last().unwrap() != self.pool.len() {
            return Err("offsets do not span the pool".into());
        }
        if self.offsets.windows(2).any(|w| w[0] >= w[1]) {
            return Err("offsets not strictly increasing".into());
        }
        for w in self.offsets[..=self.static_count].windows(3) {
            if w[1] - w[0] > w[2] - w[1] {
                return Err("static partition not sorted by length".into());
            }
        }
        let mut expected = 0usize;
        for id in (0..self.len()).map(|i| NogoodId(i as u32)) {
            let lits = self.lits(id);
            let class = self.class(id);
            if class == LengthClass::Unit {
                continue;
            }
            for l in lits {
                if !self.occurrences(class, *l).contains(&id) {
                    return Err(format!("nogood {} missing from occurrences of {l:?}", id.0));
                }
            }
            expected += lits.len();
            let [w1, w2] = self.watches(id);
            if w1 == w2 || !lits.contains(&w1) || !lits.contains(&w2) {
                return Err(format!("bad watches on nogood {}", id.0));
            }
        }
        let mut found = 0usize;
        for (slot, per_lit) in self.occ.iter().enumerate() {
            for (code, ids) in per_lit.iter().enumerate() {
                let mut sorted = ids.clone();
                sorted.sort();
                sorted.dedup();
                if sorted.len() != ids.len() {
                    return Err(format!("duplicate occurrence for literal code {code}"));
                }
                for id in ids {
                    if self.class(*id).slot() - 1 != slot || !self.lits(*id).iter().any(|l| l.code() == code) {
                        return Err(format!("spurious occurrence of nogood {}", id.0));
                    }
                }
                found += ids.len();
            }
        }
        if found != expected {
            return Err(format!("occurrence count {found} != literal count {expected}"));
        }
        Ok(())
    }
}
