//! Ground programs: atom table, rules, the canonical text format and the
//! immediate-consequence operator.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::error::{Error, Result};
use crate::lit::AtomId;

/// Bijective atom id <-> name table. Ids start at 1.
#[derive(Clone, Debug, Default)]
pub struct AtomTable {
    names: Vec<String>,
    index: HashMap<String, AtomId>,
}

impl AtomTable {
    pub fn new() -> Self {
        AtomTable { names: vec![String::new()], index: HashMap::new() }
    }

    /// Returns the id of `name`, adding it if unseen.
    pub fn intern(&mut self, name: &str) -> AtomId {
        if let Some(&id) = self.index.get(name) {
            return id;
        }
        let id = AtomId(self.names.len() as u32);
        self.names.push(name.to_owned());
        self.index.insert(name.to_owned(), id);
        id
    }

    pub fn id(&self, name: &str) -> Option<AtomId> {
        self.index.get(name).copied()
    }

    pub fn name(&self, id: AtomId) -> &str {
        &self.names[id.index()]
    }

    /// Number of atoms (the largest id).
    pub fn len(&self) -> usize {
        self.names.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, id: AtomId) -> bool {
        !id.is_none() && id.index() < self.names.len()
    }

    pub fn ids(&self) -> impl Iterator<Item = AtomId> + '_ {
        (1..self.names.len() as u32).map(AtomId)
    }
}

/// `head :- pos, not neg.`; `head == AtomId::NONE` marks a constraint.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Rule {
    pub head: AtomId,
    /// Sorted, duplicate-free.
    pub pos: Vec<AtomId>,
    /// Sorted, duplicate-free.
    pub neg: Vec<AtomId>,
}

impl Rule {
    pub fn new(head: AtomId, pos: impl IntoIterator<Item = AtomId>, neg: impl IntoIterator<Item = AtomId>) -> Rule {
        let mut pos: Vec<_> = pos.into_iter().collect();
        let mut neg: Vec<_> = neg.into_iter().collect();
        pos.sort_unstable();
        pos.dedup();
        neg.sort_unstable();
        neg.dedup();
        Rule { head, pos, neg }
    }

    pub fn is_constraint(&self) -> bool {
        self.head.is_none()
    }

    pub fn is_fact(&self) -> bool {
        !self.is_constraint() && self.pos.is_empty() && self.neg.is_empty()
    }

    /// False when some atom occurs both positively and negatively.
    pub fn is_consistent(&self) -> bool {
        !self.pos.iter().any(|a| self.neg.binary_search(a).is_ok())
    }

    /// Body is true under `interp` (as a set of true atoms).
    pub fn body_holds(&self, interp: &BTreeSet<AtomId>) -> bool {
        self.pos.iter().all(|a| interp.contains(a)) && !self.neg.iter().any(|a| interp.contains(a))
    }
}

#[derive(Clone, Debug, Default)]
pub struct GroundProgram {
    atoms: AtomTable,
    rules: Vec<Rule>,
    constraints: Vec<Rule>,
    rules_of: Vec<Vec<usize>>,
}

impl GroundProgram {
    pub fn new() -> Self {
        GroundProgram {
            atoms: AtomTable::new(),
            rules: Vec::new(),
            constraints: Vec::new(),
            rules_of: vec![Vec::new()],
        }
    }

    pub fn atoms(&self) -> &AtomTable {
        &self.atoms
    }

    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn constraints(&self) -> &[Rule] {
        &self.constraints
    }

    /// Indices of the headed rules whose head is `atom`.
    pub fn rules_of(&self, atom: AtomId) -> &[usize] {
        &self.rules_of[atom.index()]
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty() && self.constraints.is_empty()
    }

    pub fn add_atom(&mut self, name: &str) -> AtomId {
        let id = self.atoms.intern(name);
        if self.rules_of.len() <= id.index() {
            self.rules_of.resize(id.index() + 1, Vec::new());
        }
        id
    }

    fn check_atoms<'a>(&self, ids: impl IntoIterator<Item = &'a AtomId>) -> Result<()> {
        for &id in ids {
            if !self.atoms.contains(id) {
                return Err(Error::UnknownAtom(id.0));
            }
        }
        Ok(())
    }

    /// Adds `head :- pos, not neg.` and returns the rule index.
    pub fn add_rule(
        &mut self,
        head: AtomId,
        pos: impl IntoIterator<Item = AtomId>,
        neg: impl IntoIterator<Item = AtomId>,
    ) -> Result<usize> {
        if head.is_none() {
            let rule = Rule::new(head, pos, neg);
            return self.push_constraint(rule);
        }
        let rule = Rule::new(head, pos, neg);
        self.check_atoms(std::iter::once(&rule.head).chain(&rule.pos).chain(&rule.neg))?;
        let idx = self.rules.len();
        self.rules_of[head.index()].push(idx);
        self.rules.push(rule);
        Ok(idx)
    }

    /// Adds `:- pos, not neg.` and returns the constraint index.
    pub fn add_constraint(
        &mut self,
        pos: impl IntoIterator<Item = AtomId>,
        neg: impl IntoIterator<Item = AtomId>,
    ) -> Result<usize> {
        self.push_constraint(Rule::new(AtomId::NONE, pos, neg))
    }

    fn push_constraint(&mut self, rule: Rule) -> Result<usize> {
        if rule.pos.is_empty() && rule.neg.is_empty() {
            return Err(Error::EmptyConstraint);
        }
        self.check_atoms(rule.pos.iter().chain(&rule.neg))?;
        self.constraints.push(rule);
        Ok(self.constraints.len() - 1)
    }

    /// Parses the canonical line format.
    pub fn parse(text: &str) -> Result<GroundProgram> {
        let mut program = GroundProgram::new();
        for (i, raw) in text.lines().enumerate() {
            parse_line(&mut program, raw, i + 1)?;
        }
        Ok(program)
    }

    /// Immediate consequences of `interp`: heads of all rules whose body holds.
    pub fn tp_step(&self, interp: &BTreeSet<AtomId>) -> BTreeSet<AtomId> {
        self.rules.iter().filter(|r| r.body_holds(interp)).map(|r| r.head).collect()
    }

    /// True if `interp` satisfies every rule and constraint.
    pub fn is_model(&self, interp: &BTreeSet<AtomId>) -> bool {
        self.rules.iter().all(|r| interp.contains(&r.head) || !r.body_holds(interp))
            && self.constraints.iter().all(|c| !c.body_holds(interp))
    }

    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        if self.is_empty() {
            out.push(Diagnostic::EmptyProgram);
        }
        for id in self.atoms.ids() {
            if self.rules_of(id).is_empty() {
                out.push(Diagnostic::UndefinedAtom(self.atoms.name(id).to_owned()));
            }
        }
        for (i, r) in self.rules.iter().enumerate() {
            if !r.is_consistent() {
                out.push(Diagnostic::InconsistentRule(i + 1));
            }
        }
        for (i, c) in self.constraints.iter().enumerate() {
            if !c.is_consistent() {
                out.push(Diagnostic::InconsistentConstraint(i + 1));
            }
        }
        out
    }

    fn fmt_body(&self, r: &Rule, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lits = r
            .pos
            .iter()
            .map(|&a| self.atoms.name(a).to_owned())
            .chain(r.neg.iter().map(|&a| format!("not {}", self.atoms.name(a))));
        for (i, l) in lits.enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.write_str(&l)?;
        }
        Ok(())
    }
}

/// Prints the canonical format: headed rules first, then constraints.
impl fmt::Display for GroundProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rules {
            f.write_str(self.atoms.name(r.head))?;
            if !r.is_fact() {
                f.write_str(" :- ")?;
                self.fmt_body(r, f)?;
            }
            f.write_str(".\n")?;
        }
        for c in &self.constraints {
            f.write_str(":- ")?;
            self.fmt_body(c, f)?;
            f.write_str(".\n")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Diagnostic {
    EmptyProgram,
    /// The atom has no defining rule and is false in every answer set.
    UndefinedAtom(String),
    /// 1-based headed-rule index.
    InconsistentRule(usize),
    /// 1-based constraint index.
    InconsistentConstraint(usize),
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::EmptyProgram => write!(f, "program is empty"),
            Diagnostic::UndefinedAtom(a) => write!(f, "atom {a} has no rules"),
            Diagnostic::InconsistentRule(i) => write!(f, "rule {i} body is inconsistent"),
            Diagnostic::InconsistentConstraint(i) => write!(f, "constraint {i} body is inconsistent"),
        }
    }
}

fn syntax(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

fn is_atom(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '(' | ')' | ','))
}

/// Splits on commas outside parentheses.
fn split_top_level(body: &str, line: usize) -> Result<Vec<&str>> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in body.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth < 0 {
                    return Err(syntax(line, "unbalanced ')'"));
                }
            }
            ',' if depth == 0 => {
                parts.push(&body[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    if depth != 0 {
        return Err(syntax(line, "unbalanced '('"));
    }
    parts.push(&body[start..]);
    Ok(parts)
}

fn parse_atom(s: &str, line: usize) -> Result<&str> {
    let s = s.trim();
    if !is_atom(s) {
        return Err(syntax(line, format!("invalid atom '{s}'")));
    }
    if split_top_level(s, line)?.len() > 1 {
        return Err(syntax(line, format!("invalid atom '{s}'")));
    }
    Ok(s)
}

fn parse_line(program: &mut GroundProgram, raw: &str, line: usize) -> Result<()> {
    let text = match raw.find('%') {
        Some(i) => &raw[..i],
        None => raw,
    };
    let text = text.trim();
    if text.is_empty() {
        return Ok(());
    }
    let Some(stmt) = text.strip_suffix('.') else {
        return Err(syntax(line, "statement must end with '.'"));
    };
    let (head, body) = match stmt.find(":-") {
        Some(i) => (stmt[..i].trim(), Some(&stmt[i + 2..])),
        None => (stmt.trim(), None),
    };

    let head_id = if head.is_empty() {
        if body.is_none() {
            return Err(syntax(line, "empty statement"));
        }
        AtomId::NONE
    } else {
        program.add_atom(parse_atom(head, line)?)
    };

    let mut pos = Vec::new();
    let mut neg = Vec::new();
    if let Some(body) = body {
        if body.trim().is_empty() {
            return Err(syntax(line, "empty body"));
        }
        for lit in split_top_level(body, line)? {
            let lit = lit.trim();
            let negated = lit.strip_prefix("not").filter(|rest| rest.starts_with(char::is_whitespace));
            match negated {
                Some(rest) => neg.push(program.add_atom(parse_atom(rest, line)?)),
                None => pos.push(program.add_atom(parse_atom(lit, line)?)),
            }
        }
    }

    if head_id.is_none() {
        program.add_constraint(pos, neg)?;
    } else {
        program.add_rule(head_id, pos, neg)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(p: &GroundProgram, names: &[&str]) -> BTreeSet<AtomId> {
        names.iter().map(|n| p.atoms().id(n).unwrap()).collect()
    }

    #[test]
    fn parses_even_loop() {
        let p = GroundProgram::parse("a :- not b.\nb :- not a.").unwrap();
        assert_eq!(p.atom_count(), 2);
        assert_eq!(p.rules().len(), 2);
        assert!(p.constraints().is_empty());
    }

    #[test]
    fn parses_fact_rule_constraint() {
        let p = GroundProgram::parse("a.\nb :- a, not c.\n:- b, c.").unwrap();
        let (a, b, c) = (AtomId(1), AtomId(2), AtomId(3));
        assert_eq!(p.atoms().name(a), "a");
        assert_eq!(p.atoms().name(b), "b");
        assert_eq!(p.atoms().name(c), "c");
        assert_eq!(p.rules()[0], Rule::new(a, [], []));
        assert_eq!(p.rules()[1], Rule::new(b, [a], [c]));
        assert_eq!(p.constraints()[0], Rule::new(AtomId::NONE, [b, c], []));
        assert_eq!(p.rules_of(b), &[1]);
    }

    #[test]
    fn parses_self_negation() {
        let p = GroundProgram::parse("a :- not a.").unwrap();
        assert_eq!(p.atom_count(), 1);
        assert_eq!(p.rules()[0].neg, vec![AtomId(1)]);
    }

    #[test]
    fn comments_terms_and_duplicates() {
        let text = "% header\np(1,2) :- q(a), q(a), not r. % trailing\n\n  :- p(1,2).";
        let p = GroundProgram::parse(text).unwrap();
        assert_eq!(p.atom_count(), 3);
        assert_eq!(p.atoms().name(AtomId(1)), "p(1,2)");
        assert_eq!(p.rules()[0].pos.len(), 1);
        assert_eq!(p.constraints().len(), 1);
    }

    #[test]
    fn syntax_errors_carry_line_numbers() {
        for (text, line) in
            [("a.\nb :- a", 2), ("a.\n\n1x.", 3), (":- .", 1), ("a :- b,.", 1), ("a :- p(1.", 1), ("a, b.", 1)]
        {
            match GroundProgram::parse(text) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?} -> {other:?}"),
            }
        }
    }

    #[test]
    fn tp_step_examples() {
        let p = GroundProgram::parse("a.\nb :- a.").unwrap();
        assert_eq!(p.tp_step(&BTreeSet::new()), set(&p, &["a"]));
        assert_eq!(p.tp_step(&set(&p, &["a"])), set(&p, &["a", "b"]));

        let q = GroundProgram::parse("a :- not b.\nb :- not a.").unwrap();
        assert_eq!(q.tp_step(&set(&q, &["a"])), set(&q, &["a"]));
    }

    #[test]
    fn validate_examples() {
        let p = GroundProgram::parse("b :- a.").unwrap();
        let d: Vec<String> = p.validate().iter().map(|d| d.to_string()).collect();
        assert!(d.contains(&"atom a has no rules".to_owned()));

        let p = GroundProgram::parse("a :- b, not b.").unwrap();
        let d: Vec<String> = p.validate().iter().map(|d| d.to_string()).collect();
        assert!(d.contains(&"rule 1 body is inconsistent".to_owned()));

        let p = GroundProgram::parse("a.").unwrap();
        assert!(p.validate().is_empty());

        assert_eq!(GroundProgram::new().validate(), vec![Diagnostic::EmptyProgram]);
    }

    #[test]
    fn api_rejects_unknown_atoms_and_empty_constraints() {
        let mut p = GroundProgram::new();
        let a = p.add_atom("a");
        assert!(matches!(p.add_rule(a, [AtomId(9)], []), Err(Error::UnknownAtom(9))));
        assert!(matches!(p.add_constraint([], []), Err(Error::EmptyConstraint)));
    }

    #[test]
    fn print_is_canonical() {
        let p = GroundProgram::parse("a.\nb :- a, not c.\n:- b, c.").unwrap();
        assert_eq!(p.to_string(), "a.\nb :- a, not c.\n:- b, c.\n");
    }
}
