//! Atoms and signed literals.

use std::fmt;

/// Dense atom index. Id 0 is reserved as the null atom / constraint head.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct AtomId(pub u32);

impl AtomId {
    pub const NONE: AtomId = AtomId(0);

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn is_none(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for AtomId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Sign {
    True,
    False,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::True => Sign::False,
            Sign::False => Sign::True,
        }
    }
}

/// A signed atom `Tp` or `Fp`.
///
/// Encoded as `atom << 1 | is_false`, so literals order by atom id first and
/// `complement` is a single xor.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lit(u32);

impl Lit {
    #[inline]
    pub fn new(atom: AtomId, sign: Sign) -> Lit {
        Lit(atom.0 << 1 | (sign == Sign::False) as u32)
    }

    #[inline]
    pub fn pos(atom: AtomId) -> Lit {
        Lit::new(atom, Sign::True)
    }

    #[inline]
    pub fn neg(atom: AtomId) -> Lit {
        Lit::new(atom, Sign::False)
    }

    #[inline]
    pub fn atom(self) -> AtomId {
        AtomId(self.0 >> 1)
    }

    #[inline]
    pub fn sign(self) -> Sign {
        if self.0 & 1 == 0 {
            Sign::True
        } else {
            Sign::False
        }
    }

    #[inline]
    pub fn is_true(self) -> bool {
        self.0 & 1 == 0
    }

    #[inline]
    pub fn complement(self) -> Lit {
        Lit(self.0 ^ 1)
    }

    /// Dense index usable for per-literal tables.
    #[inline]
    pub fn code(self) -> usize {
        self.0 as usize
    }

    /// `+p` for `Tp`, `-p` for `Fp`; the same convention the assignment cells use.
    pub fn to_signed(self) -> i64 {
        let a = self.atom().0 as i64;
        if self.is_true() {
            a
        } else {
            -a
        }
    }

    pub fn from_signed(v: i64) -> Option<Lit> {
        if v == 0 || v.unsigned_abs() > (u32::MAX >> 1) as u64 {
            return None;
        }
        let atom = AtomId(v.unsigned_abs() as u32);
        Some(if v > 0 { Lit::pos(atom) } else { Lit::neg(atom) })
    }
}

impl fmt::Debug for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = if self.is_true() { 'T' } else { 'F' };
        write!(f, "{}{}", s, self.atom().0)
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}
