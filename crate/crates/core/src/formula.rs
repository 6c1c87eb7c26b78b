use crate::alphabet::{Literal, World};

/// Propositional formula over atom indices of some alphabet.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Top,
    Bot,
    Atom(usize),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn atom(a: usize) -> Formula {
        Formula::Atom(a)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    pub fn literal(lit: Literal) -> Formula {
        if lit.positive {
            Formula::Atom(lit.atom)
        } else {
            Formula::not(Formula::Atom(lit.atom))
        }
    }

    /// Left-nested conjunction; `Top` when empty.
    pub fn conjunction<I: IntoIterator<Item = Formula>>(parts: I) -> Formula {
        parts
            .into_iter()
            .reduce(Formula::and)
            .unwrap_or(Formula::Top)
    }

    /// Left-nested disjunction; `Bot` when empty.
    pub fn disjunction<I: IntoIterator<Item = Formula>>(parts: I) -> Formula {
        parts
            .into_iter()
            .reduce(Formula::or)
            .unwrap_or(Formula::Bot)
    }

    pub fn conjunction_of_literals<'a, I: IntoIterator<Item = &'a Literal>>(lits: I) -> Formula {
        Formula::conjunction(lits.into_iter().map(|l| Formula::literal(*l)))
    }

    pub fn eval(&self, world: World) -> bool {
        match self {
            Formula::Top => true,
            Formula::Bot => false,
            Formula::Atom(a) => world.get(*a),
            Formula::Not(f) => !f.eval(world),
            Formula::And(a, b) => a.eval(world) && b.eval(world),
            Formula::Or(a, b) => a.eval(world) || b.eval(world),
            Formula::Implies(a, b) => !a.eval(world) || b.eval(world),
            Formula::Iff(a, b) => a.eval(world) == b.eval(world),
        }
    }

    /// Bit mask of the atoms occurring in the formula.
    pub fn atom_mask(&self) -> u32 {
        match self {
            Formula::Top | Formula::Bot => 0,
            Formula::Atom(a) => 1 << a,
            Formula::Not(f) => f.atom_mask(),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => a.atom_mask() | b.atom_mask(),
        }
    }

    pub fn max_atom(&self) -> Option<usize> {
        match self {
            Formula::Top | Formula::Bot => None,
            Formula::Atom(a) => Some(*a),
            Formula::Not(f) => f.max_atom(),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => a.max_atom().max(b.max_atom()),
        }
    }

    /// Negation normal form over `Top`, `Bot`, literals, `And`, `Or`.
    pub fn nnf(&self) -> Formula {
        self.nnf_signed(true)
    }

    fn nnf_signed(&self, positive: bool) -> Formula {
        match (self, positive) {
            (Formula::Top, true) | (Formula::Bot, false) => Formula::Top,
            (Formula::Top, false) | (Formula::Bot, true) => Formula::Bot,
            (Formula::Atom(a), true) => Formula::Atom(*a),
            (Formula::Atom(a), false) => Formula::not(Formula::Atom(*a)),
            (Formula::Not(f), s) => f.nnf_signed(!s),
            (Formula::And(a, b), true) => Formula::and(a.nnf_signed(true), b.nnf_signed(true)),
            (Formula::And(a, b), false) => Formula::or(a.nnf_signed(false), b.nnf_signed(false)),
            (Formula::Or(a, b), true) => Formula::or(a.nnf_signed(true), b.nnf_signed(true)),
            (Formula::Or(a, b), false) => Formula::and(a.nnf_signed(false), b.nnf_signed(false)),
            (Formula::Implies(a, b), true) => Formula::or(a.nnf_signed(false), b.nnf_signed(true)),
            (Formula::Implies(a, b), false) => {
                Formula::and(a.nnf_signed(true), b.nnf_signed(false))
            }
            (Formula::Iff(a, b), true) => Formula::or(
                Formula::and(a.nnf_signed(true), b.nnf_signed(true)),
                Formula::and(a.nnf_signed(false), b.nnf_signed(false)),
            ),
            (Formula::Iff(a, b), false) => Formula::or(
                Formula::and(a.nnf_signed(true), b.nnf_signed(false)),
                Formula::and(a.nnf_signed(false), b.nnf_signed(true)),
            ),
        }
    }

    /// Literal occurrences after conversion to NNF.
    pub fn nnf_literals(&self) -> Vec<Literal> {
        fn walk(f: &Formula, out: &mut Vec<Literal>) {
            match f {
                Formula::Top | Formula::Bot => {}
                Formula::Atom(a) => out.push(Literal::pos(*a)),
                Formula::Not(inner) => match inner.as_ref() {
                    Formula::Atom(a) => out.push(Literal::neg(*a)),
                    other => walk(other, out),
                },
                Formula::And(a, b)
                | Formula::Or(a, b)
                | Formula::Implies(a, b)
                | Formula::Iff(a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
            }
        }
        let mut out = Vec::new();
        walk(&self.nnf(), &mut out);
        out
    }

    pub fn depth(&self) -> usize {
        match self {
            Formula::Top | Formula::Bot | Formula::Atom(_) => 1,
            Formula::Not(f) => 1 + f.depth(),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => 1 + a.depth().max(b.depth()),
        }
    }
}

/// Conjunction of all formulas; `Top` when empty.
pub fn conjoin(formulas: &[Formula]) -> Formula {
    Formula::conjunction(formulas.iter().cloned())
}
