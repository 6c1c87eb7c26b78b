//! Propositional alphabet, literals and worlds.
//!
//! The atom order is fixed when the alphabet is built. Atom `i` is bit `i` of
//! a [`World`], and every enumeration in the crate walks worlds in ascending
//! bit order.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Default number of atoms a world-space sweep may cover.
pub const DEFAULT_ATOM_CAP: usize = 24;
/// No cap override may exceed this.
pub const HARD_ATOM_CAP: usize = 30;

#[derive(Debug)]
struct Inner {
    names: Vec<String>,
    index: HashMap<String, usize>,
}

/// Ordered list of unique atom names.
///
/// Cloning is cheap; the name table is shared. Equality ignores the cap.
#[derive(Clone)]
pub struct Alphabet {
    inner: Arc<Inner>,
    cap: usize,
}

pub fn is_valid_atom_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    if name == "top" || name == "bot" {
        return false;
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl Alphabet {
    pub fn new<I, S>(names: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut list = Vec::new();
        let mut index = HashMap::new();
        for name in names {
            let name = name.into();
            if !is_valid_atom_name(&name) {
                return Err(Error::InvalidAtomName(name));
            }
            if index.insert(name.clone(), list.len()).is_some() {
                return Err(Error::DuplicateAtom(name));
            }
            list.push(name);
        }
        if list.len() > HARD_ATOM_CAP {
            return Err(Error::CapExceeded {
                atoms: list.len(),
                cap: HARD_ATOM_CAP,
            });
        }
        Ok(Alphabet {
            inner: Arc::new(Inner { names: list, index }),
            cap: DEFAULT_ATOM_CAP,
        })
    }

    pub fn empty() -> Self {
        Alphabet::new(Vec::<String>::new()).expect("empty alphabet is valid")
    }

    /// Same atoms with a different enumeration cap.
    pub fn with_cap(&self, cap: usize) -> Result<Self> {
        if cap > HARD_ATOM_CAP {
            return Err(Error::CapExceeded {
                atoms: cap,
                cap: HARD_ATOM_CAP,
            });
        }
        Ok(Alphabet {
            inner: Arc::clone(&self.inner),
            cap,
        })
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn len(&self) -> usize {
        self.inner.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inner.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.inner.names
    }

    pub fn name(&self, atom: usize) -> &str {
        &self.inner.names[atom]
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.inner.index.get(name).copied()
    }

    pub fn lookup(&self, name: &str) -> Result<usize> {
        self.index(name)
            .ok_or_else(|| Error::UnknownAtom(name.to_string()))
    }

    /// Bit mask with one bit per atom.
    pub fn full_mask(&self) -> u32 {
        mask_of(self.len())
    }

    /// Fails when a sweep over all worlds would exceed the cap.
    pub fn check_enumerable(&self) -> Result<()> {
        if self.len() > self.cap {
            Err(Error::CapExceeded {
                atoms: self.len(),
                cap: self.cap,
            })
        } else {
            Ok(())
        }
    }

    /// Number of worlds, `2^n`.
    pub fn world_count(&self) -> usize {
        1usize << self.len()
    }

    /// All worlds in ascending bit order.
    pub fn worlds(&self) -> impl Iterator<Item = World> {
        (0..self.world_count() as u64).map(|b| World(b as u32))
    }

    pub fn literal(&self, name: &str, positive: bool) -> Result<Literal> {
        Ok(Literal::new(self.lookup(name)?, positive))
    }

    /// Parses `name` or `~name`.
    pub fn parse_literal(&self, text: &str) -> Result<Literal> {
        let text = text.trim();
        match text.strip_prefix('~') {
            Some(rest) => self.literal(rest.trim(), false),
            None => self.literal(text, true),
        }
    }

    pub fn show_literal(&self, lit: Literal) -> String {
        if lit.positive {
            self.name(lit.atom).to_string()
        } else {
            format!("~{}", self.name(lit.atom))
        }
    }

    /// `{a, b}` listing of the true atoms of a world.
    pub fn show_world(&self, world: World) -> String {
        let names: Vec<&str> = (0..self.len())
            .filter(|&a| world.get(a))
            .map(|a| self.name(a))
            .collect();
        format!("{{{}}}", names.join(", "))
    }

    /// World whose true atoms are exactly `names`.
    pub fn world_of(&self, names: &[&str]) -> Result<World> {
        let mut bits = 0u32;
        for name in names {
            bits |= 1 << self.lookup(name)?;
        }
        Ok(World(bits))
    }
}

pub(crate) fn mask_of(n: usize) -> u32 {
    if n >= 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

/// Packs the bits of `bits` selected by `mask` into the low bits of an index,
/// lowest atom first.
pub fn compress(bits: u32, mask: u32) -> usize {
    let mut out = 0usize;
    let mut j = 0;
    let mut m = mask;
    while m != 0 {
        let atom = m.trailing_zeros();
        if bits >> atom & 1 == 1 {
            out |= 1 << j;
        }
        j += 1;
        m &= m - 1;
    }
    out
}

/// Inverse of [`compress`]: spreads `index` over the atoms of `mask`.
pub fn expand(index: usize, mask: u32) -> u32 {
    let mut out = 0u32;
    let mut j = 0;
    let mut m = mask;
    while m != 0 {
        let atom = m.trailing_zeros();
        if index >> j & 1 == 1 {
            out |= 1 << atom;
        }
        j += 1;
        m &= m - 1;
    }
    out
}

impl PartialEq for Alphabet {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner) || self.inner.names == other.inner.names
    }
}

impl Eq for Alphabet {}

impl fmt::Debug for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.inner.names.iter()).finish()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub atom: usize,
    pub positive: bool,
}

impl Literal {
    pub fn new(atom: usize, positive: bool) -> Self {
        Literal { atom, positive }
    }

    pub fn pos(atom: usize) -> Self {
        Literal::new(atom, true)
    }

    pub fn neg(atom: usize) -> Self {
        Literal::new(atom, false)
    }

    pub fn negated(self) -> Self {
        Literal::new(self.atom, !self.positive)
    }

    pub fn holds_in(self, world: World) -> bool {
        world.get(self.atom) == self.positive
    }
}

/// Total truth assignment, identified with its set of true atoms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct World(pub u32);

impl World {
    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn get(self, atom: usize) -> bool {
        self.0 >> atom & 1 == 1
    }

    pub fn with(self, atom: usize, value: bool) -> World {
        if value {
            World(self.0 | 1 << atom)
        } else {
            World(self.0 & !(1 << atom))
        }
    }

    /// The literal set of this world over `mask`.
    pub fn literals(self, mask: u32) -> LitSet {
        LitSet {
            pos: self.0 & mask,
            neg: !self.0 & mask,
        }
    }
}

/// Literal set packed as two bit masks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct LitSet {
    pub pos: u32,
    pub neg: u32,
}

impl LitSet {
    pub fn from_literals<'a, I: IntoIterator<Item = &'a Literal>>(lits: I) -> Self {
        let mut set = LitSet::default();
        for lit in lits {
            set.insert(*lit);
        }
        set
    }

    pub fn insert(&mut self, lit: Literal) {
        if lit.positive {
            self.pos |= 1 << lit.atom;
        } else {
            self.neg |= 1 << lit.atom;
        }
    }

    pub fn contains(&self, lit: Literal) -> bool {
        let m = 1 << lit.atom;
        if lit.positive {
            self.pos & m != 0
        } else {
            self.neg & m != 0
        }
    }

    pub fn contains_all(&self, other: &LitSet) -> bool {
        other.pos & !self.pos == 0 && other.neg & !self.neg == 0
    }

    pub fn union(&self, other: &LitSet) -> LitSet {
        LitSet {
            pos: self.pos | other.pos,
            neg: self.neg | other.neg,
        }
    }

    pub fn intersect(&self, other: &LitSet) -> LitSet {
        LitSet {
            pos: self.pos & other.pos,
            neg: self.neg & other.neg,
        }
    }

    pub fn is_contradictory(&self) -> bool {
        self.pos & self.neg != 0
    }

    pub fn is_empty(&self) -> bool {
        self.pos == 0 && self.neg == 0
    }

    /// Literals sorted by atom, negative before positive.
    pub fn to_vec(&self) -> Vec<Literal> {
        let mut out = Vec::new();
        for atom in 0..32 {
            if self.neg >> atom & 1 == 1 {
                out.push(Literal::neg(atom));
            }
            if self.pos >> atom & 1 == 1 {
                out.push(Literal::pos(atom));
            }
        }
        out
    }

    pub fn len(&self) -> usize {
        (self.pos.count_ones() + self.neg.count_ones()) as usize
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_names() {
        assert!(Alphabet::new(["9a"]).is_err());
        assert!(Alphabet::new(["a-b"]).is_err());
        assert!(Alphabet::new(["top"]).is_err());
        assert!(Alphabet::new([""]).is_err());
        assert_eq!(
            Alphabet::new(["a", "a"]).unwrap_err(),
            Error::DuplicateAtom("a".into())
        );
        assert!(Alphabet::new(["_x1", "Fire_h2"]).is_ok());
    }

    #[test]
    fn cap_is_enforced() {
        let names: Vec<String> = (0..31).map(|i| format!("p{i}")).collect();
        assert!(matches!(
            Alphabet::new(names.clone()),
            Err(Error::CapExceeded { .. })
        ));
        let ab = Alphabet::new(names[..25].to_vec()).unwrap();
        assert!(ab.check_enumerable().is_err());
        assert!(ab.with_cap(25).unwrap().check_enumerable().is_ok());
        assert!(ab.with_cap(31).is_err());
    }

    #[test]
    fn world_helpers() {
        let ab = Alphabet::new(["a", "b", "c"]).unwrap();
        let w = ab.world_of(&["a", "c"]).unwrap();
        assert_eq!(w, World(0b101));
        assert_eq!(ab.show_world(w), "{a, c}");
        assert_eq!(ab.worlds().count(), 8);
        let lits = w.literals(ab.full_mask());
        assert!(lits.contains(Literal::neg(1)));
        assert!(!lits.is_contradictory());
        assert_eq!(lits.len(), 3);
    }

    #[test]
    fn compress_expand() {
        assert_eq!(compress(0b1010, 0b1110), 0b101);
        assert_eq!(expand(0b101, 0b1110), 0b1010);
        for i in 0..8 {
            assert_eq!(compress(expand(i, 0b10101), 0b10101), i);
        }
    }
}
