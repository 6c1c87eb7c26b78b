use std::collections::HashMap;

use crate::alphabet::{is_valid_atom_name, Alphabet, Literal};
use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::loglin::LogLinearModel;
use crate::rule::{CausalRule, Head, Weight, WeightedRule};
use crate::system::{DetCausalSystem, MaxEntCausalSystem};

use super::lexer::{tokenize, Tok, Token};
use super::{ParsedSystem, SourceSpan, SystemFile};

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    atoms: Atoms<'a>,
}

enum Atoms<'a> {
    Fixed(&'a Alphabet),
    Declared {
        names: Vec<String>,
        index: HashMap<String, usize>,
    },
}

impl Atoms<'_> {
    fn lookup(&self, name: &str) -> Option<usize> {
        match self {
            Atoms::Fixed(ab) => ab.index(name),
            Atoms::Declared { index, .. } => index.get(name).copied(),
        }
    }
}

fn syntax(message: impl Into<String>, span: SourceSpan) -> Error {
    Error::Syntax {
        message: message.into(),
        span,
    }
}

impl Parser<'_> {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if t.tok != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if &self.peek().tok == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<Token> {
        let t = self.bump();
        if t.tok == tok {
            Ok(t)
        } else {
            Err(syntax(
                format!("expected {}, found {}", tok.describe(), t.tok.describe()),
                t.span,
            ))
        }
    }

    fn ident(&mut self, what: &str) -> Result<(String, SourceSpan)> {
        let t = self.bump();
        match t.tok {
            Tok::Ident(s) => Ok((s, t.span)),
            other => Err(syntax(
                format!("expected {what}, found {}", other.describe()),
                t.span,
            )),
        }
    }

    fn atom(&mut self) -> Result<usize> {
        let (name, span) = self.ident("atom name")?;
        self.atoms
            .lookup(&name)
            .ok_or_else(|| syntax(format!("unknown atom `{name}`"), span))
    }

    fn literal(&mut self) -> Result<Literal> {
        let positive = !self.eat(&Tok::Not);
        Ok(Literal::new(self.atom()?, positive))
    }

    fn weight(&mut self) -> Result<Weight> {
        let t = self.bump();
        match &t.tok {
            Tok::Number(s) => {
                Weight::parse(s).map_err(|_| syntax(format!("invalid weight `{s}`"), t.span))
            }
            other => Err(syntax(
                format!("expected weight, found {}", other.describe()),
                t.span,
            )),
        }
    }

    fn formula(&mut self) -> Result<Formula> {
        let mut left = self.implication()?;
        while self.eat(&Tok::Iff) {
            left = Formula::iff(left, self.implication()?);
        }
        Ok(left)
    }

    fn implication(&mut self) -> Result<Formula> {
        let left = self.disjunction()?;
        if self.eat(&Tok::Implies) {
            Ok(Formula::implies(left, self.implication()?))
        } else {
            Ok(left)
        }
    }

    fn disjunction(&mut self) -> Result<Formula> {
        let mut left = self.conjunction()?;
        while self.eat(&Tok::Or) {
            left = Formula::or(left, self.conjunction()?);
        }
        Ok(left)
    }

    fn conjunction(&mut self) -> Result<Formula> {
        let mut left = self.unary()?;
        while self.eat(&Tok::And) {
            left = Formula::and(left, self.unary()?);
        }
        Ok(left)
    }

    fn unary(&mut self) -> Result<Formula> {
        if self.eat(&Tok::Not) {
            return Ok(Formula::not(self.unary()?));
        }
        if self.eat(&Tok::LParen) {
            let f = self.formula()?;
            self.expect(Tok::RParen)?;
            return Ok(f);
        }
        match &self.peek().tok {
            Tok::Ident(s) if s == "top" => {
                self.bump();
                Ok(Formula::Top)
            }
            Tok::Ident(s) if s == "bot" => {
                self.bump();
                Ok(Formula::Bot)
            }
            _ => Ok(Formula::Atom(self.atom()?)),
        }
    }

    fn rule_body(&mut self) -> Result<Vec<Literal>> {
        if matches!(&self.peek().tok, Tok::Ident(s) if s == "top") {
            self.bump();
            return Ok(Vec::new());
        }
        let mut body = vec![self.literal()?];
        while self.eat(&Tok::And) {
            body.push(self.literal()?);
        }
        Ok(body)
    }

    fn head(&mut self) -> Result<Head> {
        if matches!(&self.peek().tok, Tok::Ident(s) if s == "bot") {
            self.bump();
            return Ok(Head::Bottom);
        }
        Ok(Head::Lit(self.literal()?))
    }

    fn declare(&mut self, name: String, span: SourceSpan) -> Result<()> {
        let Atoms::Declared { names, index } = &mut self.atoms else {
            unreachable!("declarations only occur in system files");
        };
        if !is_valid_atom_name(&name) {
            return Err(syntax(format!("invalid atom name `{name}`"), span));
        }
        if index.insert(name.clone(), names.len()).is_some() {
            return Err(syntax(format!("duplicate atom `{name}`"), span));
        }
        names.push(name);
        Ok(())
    }

    fn end_of_input(&mut self) -> Result<()> {
        let t = self.peek().clone();
        if t.tok == Tok::Eof {
            Ok(())
        } else {
            Err(syntax(format!("unexpected {}", t.tok.describe()), t.span))
        }
    }
}

enum Kind {
    Det,
    MaxEnt,
}

/// Parses a `.csys` document.
pub fn parse_system(src: &str) -> Result<SystemFile> {
    let mut p = Parser {
        tokens: tokenize(src)?,
        pos: 0,
        atoms: Atoms::Declared {
            names: Vec::new(),
            index: HashMap::new(),
        },
    };
    let (kw, span) = p.ident("`system` header")?;
    if kw != "system" {
        return Err(syntax(
            format!("expected `system` header, found `{kw}`"),
            span,
        ));
    }
    let (name, _) = p.ident("system name")?;
    let (kind_text, kind_span) = p.ident("`det` or `maxent`")?;
    let kind = match kind_text.as_str() {
        "det" => Kind::Det,
        "maxent" => Kind::MaxEnt,
        other => {
            return Err(syntax(
                format!("expected `det` or `maxent`, found `{other}`"),
                kind_span,
            ))
        }
    };
    let mut rules: Vec<WeightedRule> = Vec::new();
    let mut premises = Vec::new();
    let mut observations = Vec::new();
    let mut sigma: Vec<(Weight, Formula)> = Vec::new();
    loop {
        let t = p.peek().clone();
        let stmt = match &t.tok {
            Tok::Eof => break,
            Tok::Ident(s) => s.clone(),
            other => {
                return Err(syntax(
                    format!("expected a statement, found {}", other.describe()),
                    t.span,
                ))
            }
        };
        p.bump();
        match stmt.as_str() {
            "system" => return Err(syntax("duplicate `system` header", t.span)),
            "atoms" => {
                let (first, span) = p.ident("atom name")?;
                p.declare(first, span)?;
                while let Tok::Ident(_) = p.peek().tok {
                    let (n, span) = p.ident("atom name")?;
                    p.declare(n, span)?;
                }
            }
            "rule" => {
                let weighted = matches!(p.peek().tok, Tok::Number(_));
                let weight = if weighted {
                    let w = p.weight()?;
                    p.expect(Tok::Colon)?;
                    if matches!(kind, Kind::Det) {
                        return Err(syntax("weighted rule in a det system", t.span));
                    }
                    w
                } else {
                    Weight::POS_INF
                };
                let body = p.rule_body()?;
                p.expect(Tok::Arrow)?;
                let head = p.head()?;
                rules.push(WeightedRule::new(weight, CausalRule::new(body, head)));
            }
            "premise" => premises.push(p.literal()?),
            "observe" => observations.push(p.formula()?),
            "sigma" => {
                if matches!(kind, Kind::Det) {
                    return Err(syntax("`sigma` in a det system", t.span));
                }
                let w = p.weight()?;
                p.expect(Tok::Colon)?;
                sigma.push((w, p.formula()?));
            }
            other => return Err(syntax(format!("unknown statement `{other}`"), t.span)),
        }
        p.expect(Tok::Dot)?;
    }
    let Atoms::Declared { names, .. } = p.atoms else {
        unreachable!()
    };
    let alphabet = Alphabet::new(names)?;
    let system = match kind {
        Kind::Det => ParsedSystem::Det(
            DetCausalSystem::new(alphabet)
                .with_rules(rules.into_iter().map(|wr| wr.rule))
                .with_premises(premises)
                .with_observations(observations),
        ),
        Kind::MaxEnt => ParsedSystem::MaxEnt(
            MaxEntCausalSystem::new(alphabet.clone())
                .with_rules(rules)
                .with_premises(premises)
                .with_observations(observations)
                .with_sigma(LogLinearModel::with_constraints(alphabet, sigma)),
        ),
    };
    Ok(SystemFile { name, system })
}

/// Parses a formula over an existing alphabet.
pub fn parse_formula(alphabet: &Alphabet, src: &str) -> Result<Formula> {
    let mut p = Parser {
        tokens: tokenize(src)?,
        pos: 0,
        atoms: Atoms::Fixed(alphabet),
    };
    let f = p.formula()?;
    p.end_of_input()?;
    Ok(f)
}

/// Parses a literal such as `~rain` over an existing alphabet.
pub fn parse_literal(alphabet: &Alphabet, src: &str) -> Result<Literal> {
    let mut p = Parser {
        tokens: tokenize(src)?,
        pos: 0,
        atoms: Atoms::Fixed(alphabet),
    };
    let l = p.literal()?;
    p.end_of_input()?;
    Ok(l)
}
