use std::fmt::Write;

use crate::alphabet::{Alphabet, Literal};
use crate::formula::Formula;
use crate::rule::{CausalRule, Weight};
use crate::system::{DetCausalSystem, MaxEntCausalSystem};

fn precedence(f: &Formula) -> u8 {
    match f {
        Formula::Iff(..) => 1,
        Formula::Implies(..) => 2,
        Formula::Or(..) => 3,
        Formula::And(..) => 4,
        Formula::Not(_) => 5,
        Formula::Top | Formula::Bot | Formula::Atom(_) => 6,
    }
}

fn write_formula(out: &mut String, ab: &Alphabet, f: &Formula, min: u8) {
    let p = precedence(f);
    if p < min {
        out.push('(');
    }
    match f {
        Formula::Top => out.push_str("top"),
        Formula::Bot => out.push_str("bot"),
        Formula::Atom(a) => out.push_str(ab.name(*a)),
        Formula::Not(x) => {
            out.push('~');
            write_formula(out, ab, x, 5);
        }
        Formula::And(a, b) => binary(out, ab, a, " & ", b, (4, 5)),
        Formula::Or(a, b) => binary(out, ab, a, " | ", b, (3, 4)),
        Formula::Implies(a, b) => binary(out, ab, a, " -> ", b, (3, 2)),
        Formula::Iff(a, b) => binary(out, ab, a, " <-> ", b, (1, 2)),
    }
    if p < min {
        out.push(')');
    }
}

fn binary(out: &mut String, ab: &Alphabet, a: &Formula, op: &str, b: &Formula, mins: (u8, u8)) {
    write_formula(out, ab, a, mins.0);
    out.push_str(op);
    write_formula(out, ab, b, mins.1);
}

/// Formula text with the fewest parentheses that parse back to the same tree.
pub fn print_formula(alphabet: &Alphabet, formula: &Formula) -> String {
    let mut out = String::new();
    write_formula(&mut out, alphabet, formula, 0);
    out
}

pub fn print_literal(alphabet: &Alphabet, lit: Literal) -> String {
    alphabet.show_literal(lit)
}

fn header(out: &mut String, name: &str, kind: &str, alphabet: &Alphabet) {
    let _ = writeln!(out, "system {name} {kind}");
    if !alphabet.is_empty() {
        let _ = writeln!(out, "atoms {}.", alphabet.names().join(" "));
    }
}

fn rule_text(alphabet: &Alphabet, weight: Option<Weight>, rule: &CausalRule) -> String {
    match weight {
        Some(w) => format!("rule {w} : {}.", rule.show(alphabet)),
        None => format!("rule {}.", rule.show(alphabet)),
    }
}

fn tail(out: &mut String, alphabet: &Alphabet, premises: &[Literal], observations: &[Formula]) {
    for l in premises {
        let _ = writeln!(out, "premise {}.", alphabet.show_literal(*l));
    }
    for o in observations {
        let _ = writeln!(out, "observe {}.", print_formula(alphabet, o));
    }
}

pub fn print_det(name: &str, sys: &DetCausalSystem) -> String {
    let ab = &sys.alphabet;
    let mut out = String::new();
    header(&mut out, name, "det", ab);
    for r in &sys.rules {
        let _ = writeln!(out, "{}", rule_text(ab, None, r));
    }
    let premises: Vec<Literal> = sys.premises.iter().copied().collect();
    tail(&mut out, ab, &premises, &sys.observations);
    out
}

pub fn print_maxent(name: &str, sys: &MaxEntCausalSystem) -> String {
    let ab = &sys.alphabet;
    let mut out = String::new();
    header(&mut out, name, "maxent", ab);
    for wr in &sys.rules {
        let _ = writeln!(out, "{}", rule_text(ab, Some(wr.weight), &wr.rule));
    }
    let premises: Vec<Literal> = sys.premises.iter().copied().collect();
    tail(&mut out, ab, &premises, &sys.observations);
    for (w, f) in sys.sigma.constraints() {
        let _ = writeln!(out, "sigma {w} : {}.", print_formula(ab, f));
    }
    out
}
