//! Causal structure of a theory and its condensation.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::rule::{CausalRule, Head};

/// Directed graph on atom indices, stored as successor bit masks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Digraph {
    succ: Vec<u32>,
}

impl Digraph {
    pub fn new(nodes: usize) -> Self {
        Digraph {
            succ: vec![0; nodes],
        }
    }

    pub fn node_count(&self) -> usize {
        self.succ.len()
    }

    pub fn add_edge(&mut self, from: usize, to: usize) {
        self.succ[from] |= 1 << to;
    }

    pub fn has_edge(&self, from: usize, to: usize) -> bool {
        self.succ[from] >> to & 1 == 1
    }

    pub fn successors(&self, node: usize) -> u32 {
        self.succ[node]
    }

    pub fn predecessors(&self, node: usize) -> u32 {
        (0..self.succ.len())
            .filter(|&p| self.has_edge(p, node))
            .fold(0, |m, p| m | 1 << p)
    }

    /// Edges in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let n = self.succ.len();
        let mut out = Vec::new();
        for p in 0..n {
            for q in 0..n {
                if self.has_edge(p, q) {
                    out.push((p, q));
                }
            }
        }
        out
    }

    /// Nodes reachable from `start` by a path of length at least one.
    pub fn reachable_from(&self, start: u32) -> u32 {
        let mut seen = 0u32;
        let mut frontier = start;
        while frontier != 0 {
            let mut next = 0u32;
            for p in bits(frontier) {
                next |= self.succ[p];
            }
            frontier = next & !seen;
            seen |= next;
        }
        seen
    }

    /// Descendants of the node set, excluding the set itself.
    pub fn descendants(&self, set: u32) -> u32 {
        self.reachable_from(set) & !set
    }
}

pub(crate) fn bits(mask: u32) -> impl Iterator<Item = usize> {
    (0..32).filter(move |i| mask >> i & 1 == 1)
}

/// Edge `p -> q` for every rule with `p` in the body and `q` in the head.
pub fn causal_structure(atoms: usize, rules: &[CausalRule]) -> Digraph {
    let mut g = Digraph::new(atoms);
    for rule in rules {
        if let Head::Lit(h) = rule.head {
            for b in rule.body() {
                g.add_edge(b.atom, h.atom);
            }
        }
    }
    g
}

/// Strongly connected components in topological order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CondensationDag {
    /// Member masks, ordered so every edge goes from a lower to a higher index.
    pub components: Vec<u32>,
    pub component_of: Vec<usize>,
    /// Parent component indices per component, ascending.
    pub parents: Vec<Vec<usize>>,
}

impl CondensationDag {
    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn has_edge(&self, from: usize, to: usize) -> bool {
        self.parents[to].contains(&from)
    }

    pub fn members(&self, comp: usize) -> Vec<usize> {
        bits(self.components[comp]).collect()
    }
}

struct Tarjan<'a> {
    g: &'a Digraph,
    index: Vec<Option<usize>>,
    low: Vec<usize>,
    on_stack: Vec<bool>,
    stack: Vec<usize>,
    next: usize,
    found: Vec<u32>,
}

impl Tarjan<'_> {
    fn visit(&mut self, v: usize) {
        self.index[v] = Some(self.next);
        self.low[v] = self.next;
        self.next += 1;
        self.stack.push(v);
        self.on_stack[v] = true;
        for w in bits(self.g.successors(v)) {
            match self.index[w] {
                None => {
                    self.visit(w);
                    self.low[v] = self.low[v].min(self.low[w]);
                }
                Some(iw) if self.on_stack[w] => self.low[v] = self.low[v].min(iw),
                Some(_) => {}
            }
        }
        if Some(self.low[v]) == self.index[v] {
            let mut comp = 0u32;
            loop {
                let w = self.stack.pop().expect("tarjan stack underflow");
                self.on_stack[w] = false;
                comp |= 1 << w;
                if w == v {
                    break;
                }
            }
            self.found.push(comp);
        }
    }
}

/// Condenses `g`. Components are ordered topologically, ties broken by
/// smallest member atom.
pub fn condensation(g: &Digraph) -> CondensationDag {
    let n = g.node_count();
    let mut t = Tarjan {
        g,
        index: vec![None; n],
        low: vec![0; n],
        on_stack: vec![false; n],
        stack: Vec::new(),
        next: 0,
        found: Vec::new(),
    };
    for v in 0..n {
        if t.index[v].is_none() {
            t.visit(v);
        }
    }
    let raw = t.found;
    let mut raw_of = vec![0usize; n];
    for (c, &mask) in raw.iter().enumerate() {
        for v in bits(mask) {
            raw_of[v] = c;
        }
    }
    let k = raw.len();
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); k];
    let mut indeg = vec![0usize; k];
    for (p, q) in g.edges() {
        let (a, b) = (raw_of[p], raw_of[q]);
        if a != b && !succ[a].contains(&b) {
            succ[a].push(b);
            indeg[b] += 1;
        }
    }
    let key = |c: usize| raw[c].trailing_zeros();
    let mut heap: BinaryHeap<Reverse<(u32, usize)>> = (0..k)
        .filter(|&c| indeg[c] == 0)
        .map(|c| Reverse((key(c), c)))
        .collect();
    let mut order = Vec::with_capacity(k);
    while let Some(Reverse((_, c))) = heap.pop() {
        order.push(c);
        for &d in &succ[c] {
            indeg[d] -= 1;
            if indeg[d] == 0 {
                heap.push(Reverse((key(d), d)));
            }
        }
    }
    let mut pos = vec![0usize; k];
    for (i, &c) in order.iter().enumerate() {
        pos[c] = i;
    }
    let components: Vec<u32> = order.iter().map(|&c| raw[c]).collect();
    let component_of: Vec<usize> = raw_of.iter().map(|&c| pos[c]).collect();
    let mut parents = vec![Vec::new(); k];
    for (a, targets) in succ.iter().enumerate() {
        for &b in targets {
            parents[pos[b]].push(pos[a]);
        }
    }
    for p in &mut parents {
        p.sort_unstable();
    }
    CondensationDag {
        components,
        component_of,
        parents,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::Literal;

    #[test]
    fn two_cycle_condenses() {
        let rules = vec![
            CausalRule::to_lit([Literal::pos(1)], Literal::pos(0)),
            CausalRule::to_lit([Literal::pos(0)], Literal::pos(1)),
            CausalRule::to_lit([Literal::pos(2)], Literal::pos(0)),
        ];
        let c = condensation(&causal_structure(3, &rules));
        assert_eq!(c.components, vec![0b100, 0b011]);
        assert_eq!(c.parents[1], vec![0]);
    }

    #[test]
    fn dag_keeps_shape() {
        let mut g = Digraph::new(3);
        g.add_edge(2, 1);
        g.add_edge(1, 0);
        let c = condensation(&g);
        assert_eq!(c.components, vec![0b100, 0b010, 0b001]);
        assert_eq!(c.parents, vec![vec![], vec![0], vec![1]]);
    }

    #[test]
    fn descendants_exclude_the_set() {
        let mut g = Digraph::new(3);
        g.add_edge(0, 1);
        g.add_edge(1, 0);
        g.add_edge(1, 2);
        assert_eq!(g.descendants(0b001), 0b110);
    }
}
