//! JSON interchange. Every document carries `"version": "v1"` and a `kind`
//! tag. Infinite weights are written as the strings `"+inf"` and `"-inf"`.

use std::collections::BTreeMap;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::alphabet::{Alphabet, Literal};
use crate::bayesnet::BayesNet;
use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::loglin::LogLinearModel;
use crate::rule::{CausalRule, Head, Weight, WeightedRule};
use crate::scm::{ProbScm, Scm};
use crate::system::{DetCausalSystem, MaxEntCausalSystem};

use super::parser::{parse_formula, parse_literal};
use super::printer::print_formula;

pub const SCHEMA_VERSION: &str = "v1";

/// Any value that has a JSON form.
#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Det(DetCausalSystem),
    MaxEnt(MaxEntCausalSystem),
    Bn(BayesNet),
    Scm(Scm),
    ProbScm(ProbScm),
    LogLinear(LogLinearModel),
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct JsonWeight(Weight);

impl Serialize for JsonWeight {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let w = self.0;
        if w.is_finite() {
            s.serialize_f64(w.value())
        } else {
            s.serialize_str(&w.to_string())
        }
    }
}

impl<'de> Deserialize<'de> for JsonWeight {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        let w = match Raw::deserialize(d)? {
            Raw::Num(x) => Weight::new(x),
            Raw::Text(t) if t == "+inf" || t == "-inf" => Weight::parse(&t),
            Raw::Text(t) => Err(Error::Schema(format!("invalid weight `{t}`"))),
        };
        w.map(JsonWeight).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RuleDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    weight: Option<JsonWeight>,
    body: Vec<String>,
    head: String,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WeightedFormulaDoc {
    weight: JsonWeight,
    formula: String,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SystemDoc {
    atoms: Vec<String>,
    #[serde(default)]
    rules: Vec<RuleDoc>,
    #[serde(default)]
    premises: Vec<String>,
    #[serde(default)]
    observations: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    sigma: Vec<WeightedFormulaDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BnDoc {
    nodes: Vec<String>,
    #[serde(default)]
    edges: Vec<(String, String)>,
    /// Per node, parent bitstring (parents in node order) to probability of true.
    cpt: BTreeMap<String, BTreeMap<String, f64>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScmDoc {
    externals: Vec<String>,
    internals: Vec<String>,
    equations: BTreeMap<String, String>,
    /// Situation bitstring (externals in listed order) to probability.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    situation_probs: Option<BTreeMap<String, f64>>,
    /// Independent error terms: probability of each external being true.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    marginals: Option<BTreeMap<String, f64>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LogLinearDoc {
    atoms: Vec<String>,
    #[serde(default)]
    constraints: Vec<WeightedFormulaDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum Body {
    Det(SystemDoc),
    Maxent(SystemDoc),
    Bn(BnDoc),
    Scm(ScmDoc),
    Loglinear(LogLinearDoc),
}

#[derive(Debug, Serialize, Deserialize)]
struct Envelope {
    version: String,
    #[serde(flatten)]
    body: Body,
}

fn lit_text(ab: &Alphabet, l: Literal) -> String {
    ab.show_literal(l)
}

fn rule_doc(ab: &Alphabet, weight: Option<Weight>, rule: &CausalRule) -> RuleDoc {
    RuleDoc {
        weight: weight.map(JsonWeight),
        body: rule.body().iter().map(|l| lit_text(ab, *l)).collect(),
        head: match rule.head {
            Head::Lit(l) => lit_text(ab, l),
            Head::Bottom => "bot".into(),
        },
    }
}

fn formulas_doc(ab: &Alphabet, items: &[(Weight, Formula)]) -> Vec<WeightedFormulaDoc> {
    items
        .iter()
        .map(|(w, f)| WeightedFormulaDoc {
            weight: JsonWeight(*w),
            formula: print_formula(ab, f),
        })
        .collect()
}

fn bitstring(bits: u32, mask: u32) -> String {
    crate::graph::bits(mask)
        .map(|a| if bits >> a & 1 == 1 { '1' } else { '0' })
        .collect()
}

fn parse_bitstring(text: &str, width: usize) -> Result<usize> {
    if text.len() != width || !text.chars().all(|c| c == '0' || c == '1') {
        return Err(Error::Schema(format!(
            "expected a bitstring of length {width}, got `{text}`"
        )));
    }
    Ok(text.chars().enumerate().fold(
        0usize,
        |acc, (j, c)| if c == '1' { acc | 1 << j } else { acc },
    ))
}

fn to_envelope(model: &Model) -> Envelope {
    let body = match model {
        Model::Det(sys) => {
            let ab = &sys.alphabet;
            Body::Det(SystemDoc {
                atoms: ab.names().to_vec(),
                rules: sys.rules.iter().map(|r| rule_doc(ab, None, r)).collect(),
                premises: sys.premises.iter().map(|l| lit_text(ab, *l)).collect(),
                observations: sys
                    .observations
                    .iter()
                    .map(|f| print_formula(ab, f))
                    .collect(),
                sigma: Vec::new(),
            })
        }
        Model::MaxEnt(sys) => {
            let ab = &sys.alphabet;
            Body::Maxent(SystemDoc {
                atoms: ab.names().to_vec(),
                rules: sys
                    .rules
                    .iter()
                    .map(|wr| rule_doc(ab, Some(wr.weight), &wr.rule))
                    .collect(),
                premises: sys.premises.iter().map(|l| lit_text(ab, *l)).collect(),
                observations: sys
                    .observations
                    .iter()
                    .map(|f| print_formula(ab, f))
                    .collect(),
                sigma: formulas_doc(ab, sys.sigma.constraints()),
            })
        }
        Model::Bn(bn) => {
            let ab = bn.alphabet();
            let mut edges = Vec::new();
            let mut cpt = BTreeMap::new();
            for node in 0..ab.len() {
                let pa = bn.parents(node);
                for p in crate::graph::bits(pa) {
                    edges.push((ab.name(p).to_string(), ab.name(node).to_string()));
                }
                let rows = bn
                    .table(node)
                    .iter()
                    .enumerate()
                    .map(|(i, &p)| (bitstring(crate::alphabet::expand(i, pa), pa), p))
                    .collect();
                cpt.insert(ab.name(node).to_string(), rows);
            }
            edges.sort();
            Body::Bn(BnDoc {
                nodes: ab.names().to_vec(),
                edges,
                cpt,
            })
        }
        Model::Scm(scm) => Body::Scm(scm_doc(scm, None)),
        Model::ProbScm(pm) => Body::Scm(scm_doc(&pm.scm, Some(pm))),
        Model::LogLinear(m) => Body::Loglinear(LogLinearDoc {
            atoms: m.alphabet().names().to_vec(),
            constraints: formulas_doc(m.alphabet(), m.constraints()),
        }),
    };
    Envelope {
        version: SCHEMA_VERSION.into(),
        body,
    }
}

fn scm_doc(scm: &Scm, pm: Option<&ProbScm>) -> ScmDoc {
    let ab = scm.alphabet();
    let ext = scm.externals();
    ScmDoc {
        externals: crate::graph::bits(ext)
            .map(|a| ab.name(a).to_string())
            .collect(),
        internals: crate::graph::bits(scm.internals())
            .map(|a| ab.name(a).to_string())
            .collect(),
        equations: scm
            .equations()
            .iter()
            .map(|(&v, f)| (ab.name(v).to_string(), print_formula(ab, f)))
            .collect(),
        situation_probs: pm.map(|pm| {
            scm.situations()
                .map(|u| (bitstring(u.bits(), ext), pm.situation_prob(u)))
                .collect()
        }),
        marginals: None,
    }
}

/// Pretty-printed JSON with deterministic key order.
pub fn emit_json(model: &Model) -> String {
    serde_json::to_string_pretty(&to_envelope(model)).expect("documents always serialize")
}

fn literal(ab: &Alphabet, text: &str) -> Result<Literal> {
    parse_literal(ab, text)
}

fn rule_from(ab: &Alphabet, doc: &RuleDoc) -> Result<CausalRule> {
    let body = doc
        .body
        .iter()
        .map(|t| literal(ab, t))
        .collect::<Result<Vec<_>>>()?;
    let head = if doc.head.trim() == "bot" {
        Head::Bottom
    } else {
        Head::Lit(literal(ab, &doc.head)?)
    };
    Ok(CausalRule::new(body, head))
}

fn constraints_from(ab: &Alphabet, docs: &[WeightedFormulaDoc]) -> Result<Vec<(Weight, Formula)>> {
    docs.iter()
        .map(|d| Ok((d.weight.0, parse_formula(ab, &d.formula)?)))
        .collect()
}

fn det_from(doc: &SystemDoc) -> Result<DetCausalSystem> {
    if !doc.sigma.is_empty() {
        return Err(Error::Schema("det system with sigma".into()));
    }
    let ab = Alphabet::new(doc.atoms.clone())?;
    let mut rules = Vec::new();
    for r in &doc.rules {
        if r.weight.is_some() {
            return Err(Error::Schema("weighted rule in a det system".into()));
        }
        rules.push(rule_from(&ab, r)?);
    }
    Ok(DetCausalSystem::new(ab.clone())
        .with_rules(rules)
        .with_premises(
            doc.premises
                .iter()
                .map(|t| literal(&ab, t))
                .collect::<Result<Vec<_>>>()?,
        )
        .with_observations(
            doc.observations
                .iter()
                .map(|t| parse_formula(&ab, t))
                .collect::<Result<Vec<_>>>()?,
        ))
}

fn maxent_from(doc: &SystemDoc) -> Result<MaxEntCausalSystem> {
    let ab = Alphabet::new(doc.atoms.clone())?;
    let rules = doc
        .rules
        .iter()
        .map(|r| {
            Ok(WeightedRule::new(
                r.weight.map_or(Weight::POS_INF, |w| w.0),
                rule_from(&ab, r)?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MaxEntCausalSystem::new(ab.clone())
        .with_rules(rules)
        .with_premises(
            doc.premises
                .iter()
                .map(|t| literal(&ab, t))
                .collect::<Result<Vec<_>>>()?,
        )
        .with_observations(
            doc.observations
                .iter()
                .map(|t| parse_formula(&ab, t))
                .collect::<Result<Vec<_>>>()?,
        )
        .with_sigma(LogLinearModel::with_constraints(
            ab.clone(),
            constraints_from(&ab, &doc.sigma)?,
        )))
}

fn bn_from(doc: &BnDoc) -> Result<BayesNet> {
    let ab = Alphabet::new(doc.nodes.clone())?;
    let n = ab.len();
    let mut parents = vec![0u32; n];
    for (from, to) in &doc.edges {
        parents[ab.lookup(to)?] |= 1 << ab.lookup(from)?;
    }
    let mut cpt = Vec::with_capacity(n);
    for (node, &pa) in parents.iter().enumerate() {
        let name = ab.name(node);
        let rows_doc = doc
            .cpt
            .get(name)
            .ok_or_else(|| Error::Schema(format!("missing table for `{name}`")))?;
        let width = pa.count_ones() as usize;
        let mut rows = vec![None; 1 << width];
        for (key, &p) in rows_doc {
            let i = parse_bitstring(key, width)?;
            rows[i] = Some(p);
        }
        let rows = rows
            .into_iter()
            .map(|r| r.ok_or_else(|| Error::Schema(format!("incomplete table for `{name}`"))))
            .collect::<Result<Vec<_>>>()?;
        cpt.push(rows);
    }
    if let Some(extra) = doc.cpt.keys().find(|k| ab.index(k).is_none()) {
        return Err(Error::Schema(format!("table for unknown node `{extra}`")));
    }
    BayesNet::new(ab, parents, cpt)
}

enum ScmResult {
    Plain(Scm),
    Prob(ProbScm),
}

fn scm_from(doc: &ScmDoc) -> Result<ScmResult> {
    let names: Vec<String> = doc
        .externals
        .iter()
        .chain(&doc.internals)
        .cloned()
        .collect();
    let ab = Alphabet::new(names)?;
    let ext = (0..doc.externals.len()).fold(0u32, |m, i| m | 1 << i);
    let mut equations = BTreeMap::new();
    for (var, text) in &doc.equations {
        let v = ab.lookup(var)?;
        equations.insert(v, parse_formula(&ab, text)?);
    }
    let scm = Scm::new(ab.clone(), ext, equations)?;
    match (&doc.situation_probs, &doc.marginals) {
        (Some(_), Some(_)) => Err(Error::Schema(
            "give either situation_probs or marginals, not both".into(),
        )),
        (Some(probs), None) => {
            let width = doc.externals.len();
            let mut table = vec![0.0; 1 << width];
            for (key, &p) in probs {
                table[parse_bitstring(key, width)?] = p;
            }
            Ok(ScmResult::Prob(ProbScm::new(scm, table)?))
        }
        (None, Some(m)) => {
            let mut marg = BTreeMap::new();
            for (name, &p) in m {
                marg.insert(ab.lookup(name)?, p);
            }
            Ok(ScmResult::Prob(ProbScm::from_marginals(scm, &marg)?))
        }
        (None, None) => Ok(ScmResult::Plain(scm)),
    }
}

pub fn parse_json(text: &str) -> Result<Model> {
    let env: Envelope = serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
    if env.version != SCHEMA_VERSION {
        return Err(Error::Schema(format!(
            "unsupported version `{}`, expected `{SCHEMA_VERSION}`",
            env.version
        )));
    }
    match &env.body {
        Body::Det(d) => det_from(d).map(Model::Det),
        Body::Maxent(d) => maxent_from(d).map(Model::MaxEnt),
        Body::Bn(d) => bn_from(d).map(Model::Bn),
        Body::Scm(d) => scm_from(d).map(|r| match r {
            ScmResult::Plain(s) => Model::Scm(s),
            ScmResult::Prob(p) => Model::ProbScm(p),
        }),
        Body::Loglinear(d) => {
            let ab = Alphabet::new(d.atoms.clone())?;
            let c = constraints_from(&ab, &d.constraints)?;
            Ok(Model::LogLinear(LogLinearModel::with_constraints(ab, c)))
        }
    }
}
