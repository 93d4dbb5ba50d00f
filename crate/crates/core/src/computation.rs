//! Convergence check for total assignments. The true program atoms must be
//! reachable from the empty set by firing, one at a time, rules whose body atom
//! is true; otherwise the assignment is a completion model that no ASP
//! computation produces.

use crate::assignment::Assignment;
use crate::completion::AuxMap;
use crate::lit::Lit;
use crate::program::GroundProgram;

pub struct DerivationCheck {
    /// Rules having the atom in their positive body.
    pos_occ: Vec<Vec<usize>>,
    missing: Vec<usize>,
    derived: Vec<bool>,
    queue: Vec<usize>,
}

impl DerivationCheck {
    pub fn new(program: &GroundProgram) -> DerivationCheck {
        let mut pos_occ = vec![Vec::new(); program.atom_count() + 1];
        for (i, r) in program.rules().iter().enumerate() {
            for p in &r.pos {
                pos_occ[p.index()].push(i);
            }
        }
        DerivationCheck { pos_occ, missing: Vec::new(), derived: Vec::new(), queue: Vec::new() }
    }

    /// Atoms derivable through rules with a true body atom.
    pub fn derive(&mut self, program: &GroundProgram, aux: &AuxMap, a: &Assignment) -> &[bool] {
        let rules = program.rules();
        self.missing.clear();
        self.missing.extend(rules.iter().map(|r| r.pos.len()));
        self.derived.clear();
        self.derived.resize(program.atom_count() + 1, false);
        self.queue.clear();
        let fires = |r: usize| a.holds(Lit::pos(aux.rule(r).body));
        for (i, r) in rules.iter().enumerate() {
            if r.pos.is_empty() && fires(i) && !self.derived[r.head.index()] {
                self.derived[r.head.index()] = true;
                self.queue.push(r.head.index());
            }
        }
        while let Some(p) = self.queue.pop() {
            for &i in &self.pos_occ[p] {
                self.missing[i] -= 1;
                let h = rules[i].head.index();
                if self.missing[i] == 0 && fires(i) && !self.derived[h] {
                    self.derived[h] = true;
                    self.queue.push(h);
                }
            }
        }
        &self.derived
    }

    /// True iff the derivable atoms are exactly the true program atoms.
    pub fn converges(&mut self, program: &GroundProgram, aux: &AuxMap, a: &Assignment) -> bool {
        self.derive(program, aux, a);
        program.atoms().ids().all(|p| self.derived[p.index()] == a.holds(Lit::pos(p)))
    }
}
