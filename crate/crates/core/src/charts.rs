//! Marked graphs, metrics on them, and reduced circuits.
//!
//! Oriented edges use the [`Letter`] encoding: edge `e` traversed forward is
//! `Letter(2e)`, backward is `Letter(2e + 1)`. Edge ids are single lowercase
//! letters, so a path prints as a word (`x t y T`) with uppercase marking a
//! reversed edge. On a bouquet the edge letters coincide with the generators.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use num::Zero;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::rational::{self, Q};
use crate::words::{
    canonical_rotation, free_reduce, inverse_letters, is_cyclically_reduced, Alphabet, CyclicWord, Letter, Word,
};

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum MarkingKind {
    Bouquet,
    Geometric,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub id: char,
    pub from: usize,
    pub to: usize,
}

#[derive(Clone, Debug)]
pub struct Chart {
    name: Option<String>,
    vertices: Vec<String>,
    edges: Vec<Edge>,
    kind: MarkingKind,
    tree: Vec<bool>,
    rank: usize,
    basis: Vec<Vec<Letter>>,
    generator_of: Vec<Option<usize>>,
    out_edges: Vec<Vec<Letter>>,
}

impl PartialEq for Chart {
    fn eq(&self, other: &Self) -> bool {
        self.vertices.len() == other.vertices.len()
            && self.edges == other.edges
            && self.tree == other.tree
            && self.rank == other.rank
    }
}

impl Eq for Chart {}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut x = x;
        while self.0[x] != r {
            let next = self.0[x];
            self.0[x] = r;
            x = next;
        }
        r
    }

    /// Returns false when `a` and `b` were already joined.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.0[hi] = lo;
        true
    }
}

impl Chart {
    /// Validates a chart. `tree` lists the spanning-tree edge indices for a
    /// geometric marking and must be empty for a bouquet.
    pub fn new(
        vertices: Vec<String>,
        edges: Vec<Edge>,
        kind: MarkingKind,
        tree: &[usize],
        alphabet_rank: usize,
    ) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::InvalidChart("no vertices".into()));
        }
        let nv = vertices.len();
        for (i, v) in vertices.iter().enumerate() {
            if vertices[..i].contains(v) {
                return Err(Error::InvalidChart(format!("duplicate vertex '{v}'")));
            }
        }
        for (i, e) in edges.iter().enumerate() {
            if !e.id.is_ascii_lowercase() {
                return Err(Error::InvalidChart(format!("edge id '{}' must be a lowercase letter", e.id)));
            }
            if edges[..i].iter().any(|f| f.id == e.id) {
                return Err(Error::InvalidChart(format!("duplicate edge '{}'", e.id)));
            }
            if e.from >= nv || e.to >= nv {
                return Err(Error::InvalidChart(format!("edge '{}' has an unknown endpoint", e.id)));
            }
        }
        let mut uf = UnionFind::new(nv);
        for e in &edges {
            uf.union(e.from, e.to);
        }
        if (0..nv).any(|v| uf.find(v) != 0) {
            return Err(Error::InvalidChart("graph is disconnected".into()));
        }
        let betti = edges.len() + 1 - nv;
        if alphabet_rank < 2 {
            return Err(Error::invalid(format!("alphabet rank must be at least 2, got {alphabet_rank}")));
        }
        if betti != alphabet_rank {
            return Err(Error::RankMismatch { expected: alphabet_rank, found: betti });
        }
        if kind == MarkingKind::Bouquet && (nv != 1 || !tree.is_empty()) {
            return Err(Error::InvalidChart("a bouquet marking needs one vertex and no tree".into()));
        }
        let mut out_edges = vec![Vec::new(); nv];
        for (i, e) in edges.iter().enumerate() {
            out_edges[e.from].push(Letter::generator(i));
            out_edges[e.to].push(Letter::generator_inverse(i));
        }
        for o in &mut out_edges {
            o.sort();
        }
        let mut chart = Chart {
            name: None,
            vertices,
            edges,
            kind,
            tree: Vec::new(),
            rank: alphabet_rank,
            basis: Vec::new(),
            generator_of: Vec::new(),
            out_edges,
        };
        chart.set_tree(tree)?;
        Ok(chart)
    }

    fn set_tree(&mut self, tree: &[usize]) -> Result<()> {
        let basis = self.geometric_basis(tree)?;
        let mut in_tree = vec![false; self.edges.len()];
        for &t in tree {
            in_tree[t] = true;
        }
        let mut generator_of = vec![None; self.edges.len()];
        let mut g = 0;
        for (e, slot) in generator_of.iter_mut().enumerate() {
            if !in_tree[e] {
                *slot = Some(g);
                g += 1;
            }
        }
        self.tree = in_tree;
        self.basis = basis;
        self.generator_of = generator_of;
        Ok(())
    }

    /// One loop `[s, o(e)]_T · e · [t(e), s]_T` per non-tree edge, in edge
    /// order, based at vertex 0.
    pub fn geometric_basis(&self, tree: &[usize]) -> Result<Vec<Vec<Letter>>> {
        let nv = self.vertices.len();
        let mut in_tree = vec![false; self.edges.len()];
        let mut uf = UnionFind::new(nv);
        for &t in tree {
            if t >= self.edges.len() || in_tree[t] {
                return Err(Error::invalid(format!("bad tree edge index {t}")));
            }
            in_tree[t] = true;
            let e = &self.edges[t];
            if !uf.union(e.from, e.to) {
                return Err(Error::invalid("tree edges contain a cycle"));
            }
        }
        if tree.len() + 1 != nv {
            return Err(Error::invalid("tree edges do not span the graph"));
        }
        // path from the basepoint to each vertex along the tree
        let mut to_vertex: Vec<Option<Vec<Letter>>> = vec![None; nv];
        to_vertex[0] = Some(Vec::new());
        let mut queue = VecDeque::from([0usize]);
        while let Some(v) = queue.pop_front() {
            for &l in &self.out_edges[v] {
                if !in_tree[l.index()] {
                    continue;
                }
                let w = self.terminus(l);
                if to_vertex[w].is_none() {
                    let mut p = to_vertex[v].clone().unwrap_or_default();
                    p.push(l);
                    to_vertex[w] = Some(p);
                    queue.push_back(w);
                }
            }
        }
        let mut basis = Vec::new();
        for (i, e) in self.edges.iter().enumerate() {
            if in_tree[i] {
                continue;
            }
            let mut gamma = to_vertex[e.from].clone().unwrap_or_default();
            gamma.push(Letter::generator(i));
            gamma.extend(inverse_letters(to_vertex[e.to].as_deref().unwrap_or_default()));
            basis.push(gamma);
        }
        Ok(basis)
    }

    /// The same graph re-marked by a different spanning tree.
    pub fn with_tree(&self, tree: &[usize]) -> Result<Chart> {
        let mut c = self.clone();
        c.kind = MarkingKind::Geometric;
        c.set_tree(tree)?;
        Ok(c)
    }

    pub fn bouquet(k: usize) -> Result<Chart> {
        if k > 26 {
            return Err(Error::invalid("bouquet rank above 26 has no text form"));
        }
        let edges = (0..k).map(|i| Edge { id: (b'a' + i as u8) as char, from: 0, to: 0 }).collect();
        let mut c = Chart::new(vec!["0".into()], edges, MarkingKind::Bouquet, &[], k)?;
        c.name = Some(format!("bouquet{k}"));
        Ok(c)
    }

    /// Two vertices joined by three edges `x, y, z`; tree `{x}`, so
    /// `a = yX`, `b = zX`.
    pub fn theta() -> Chart {
        let edges = vec![
            Edge { id: 'x', from: 0, to: 1 },
            Edge { id: 'y', from: 0, to: 1 },
            Edge { id: 'z', from: 0, to: 1 },
        ];
        let mut c = Chart::new(vec!["0".into(), "1".into()], edges, MarkingKind::Geometric, &[0], 2)
            .expect("theta chart is valid");
        c.name = Some("theta".into());
        c
    }

    /// Loops `x` at vertex 0 and `y` at vertex 1 joined by the bar `t`;
    /// tree `{t}`, so `a = x`, `b = tyT`.
    pub fn dumbbell() -> Chart {
        let edges = vec![
            Edge { id: 'x', from: 0, to: 0 },
            Edge { id: 't', from: 0, to: 1 },
            Edge { id: 'y', from: 1, to: 1 },
        ];
        let mut c = Chart::new(vec!["0".into(), "1".into()], edges, MarkingKind::Geometric, &[1], 2)
            .expect("dumbbell chart is valid");
        c.name = Some("dumbbell".into());
        c
    }

    /// `bouquetK` (also `bouquet` for rank 2), `theta`, `dumbbell`.
    pub fn builtin(name: &str) -> Result<Chart> {
        match name {
            "theta" => Ok(Chart::theta()),
            "dumbbell" => Ok(Chart::dumbbell()),
            "bouquet" | "rose" => Chart::bouquet(2),
            _ => match name.strip_prefix("bouquet").map(str::parse::<usize>) {
                Some(Ok(k)) => Chart::bouquet(k),
                _ => Err(Error::invalid(format!("unknown built-in chart '{name}'"))),
            },
        }
    }

    pub fn builtins_for_rank(k: usize) -> Vec<Chart> {
        let mut out = vec![Chart::bouquet(k).expect("rank checked by caller")];
        if k == 2 {
            out.push(Chart::theta());
            out.push(Chart::dumbbell());
        }
        out
    }

    pub fn from_json(v: &Value) -> Result<Chart> {
        if let Value::String(name) = v {
            return Chart::builtin(name);
        }
        let id_of = |x: &Value| -> Result<String> {
            match x {
                Value::String(s) => Ok(s.clone()),
                Value::Number(n) => Ok(n.to_string()),
                other => Err(Error::InvalidChart(format!("bad vertex id {other}"))),
            }
        };
        let vertices: Vec<String> = v["vertices"]
            .as_array()
            .ok_or_else(|| Error::InvalidChart("missing 'vertices'".into()))?
            .iter()
            .map(id_of)
            .collect::<Result<_>>()?;
        let vindex = |x: &Value| -> Result<usize> {
            let id = id_of(x)?;
            vertices
                .iter()
                .position(|v| *v == id)
                .ok_or_else(|| Error::InvalidChart(format!("unknown vertex '{id}'")))
        };
        let mut edges = Vec::new();
        for e in v["edges"].as_array().ok_or_else(|| Error::InvalidChart("missing 'edges'".into()))? {
            let id = e["id"].as_str().unwrap_or_default();
            let mut chars = id.chars();
            let c = match (chars.next(), chars.next()) {
                (Some(c), None) => c,
                _ => return Err(Error::InvalidChart(format!("edge id '{id}' must be one letter"))),
            };
            edges.push(Edge { id: c, from: vindex(&e["from"])?, to: vindex(&e["to"])? });
        }
        let marking = &v["marking"];
        let kind = match marking["kind"].as_str() {
            Some("bouquet") => MarkingKind::Bouquet,
            Some("geometric") => MarkingKind::Geometric,
            other => return Err(Error::InvalidChart(format!("unknown marking kind {other:?}"))),
        };
        let mut tree = Vec::new();
        if let Some(ts) = marking["tree_edges"].as_array() {
            for t in ts {
                let id = t.as_str().unwrap_or_default();
                let idx = edges
                    .iter()
                    .position(|e| id.len() == 1 && id.starts_with(e.id))
                    .ok_or_else(|| Error::invalid(format!("unknown tree edge '{id}'")))?;
                tree.push(idx);
            }
        }
        let rank = marking["alphabet_rank"]
            .as_u64()
            .map(|r| r as usize)
            .unwrap_or(edges.len() + 1 - vertices.len().min(edges.len() + 1));
        let mut chart = Chart::new(vertices, edges, kind, &tree, rank)?;
        chart.name = v["name"].as_str().map(str::to_owned);
        Ok(chart)
    }

    pub fn to_json(&self) -> Value {
        let edges: Vec<Value> = self
            .edges
            .iter()
            .map(|e| json!({"id": e.id.to_string(), "from": self.vertices[e.from], "to": self.vertices[e.to]}))
            .collect();
        let mut marking = json!({
            "kind": match self.kind { MarkingKind::Bouquet => "bouquet", MarkingKind::Geometric => "geometric" },
            "alphabet_rank": self.rank,
        });
        if self.kind == MarkingKind::Geometric {
            let tree: Vec<String> = self.tree_edges().iter().map(|&t| self.edges[t].id.to_string()).collect();
            marking["tree_edges"] = json!(tree);
        }
        let mut out = json!({"vertices": self.vertices, "edges": edges, "marking": marking});
        if let Some(n) = &self.name {
            out["name"] = json!(n);
        }
        out
    }

    /// Compact JSON reference: the built-in name when there is one.
    pub fn to_json_ref(&self) -> Value {
        match &self.name {
            Some(n) if Chart::builtin(n).map(|c| c == *self).unwrap_or(false) => json!(n),
            _ => self.to_json(),
        }
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn alphabet(&self) -> Alphabet {
        Alphabet::new(self.rank).expect("chart rank is at least 2")
    }

    pub fn kind(&self) -> MarkingKind {
        self.kind
    }

    pub fn is_bouquet(&self) -> bool {
        self.vertices.len() == 1
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn tree_edges(&self) -> Vec<usize> {
        (0..self.edges.len()).filter(|&e| self.tree[e]).collect()
    }

    pub fn is_tree_edge(&self, l: Letter) -> bool {
        self.tree[l.index()]
    }

    /// The basis loop (as an edge path at the basepoint) of generator `i`.
    pub fn basis_loop(&self, i: usize) -> &[Letter] {
        &self.basis[i]
    }

    /// Generator letter read off an oriented non-tree edge.
    pub fn generator_letter(&self, l: Letter) -> Option<Letter> {
        self.generator_of[l.index()].map(|g| Letter((2 * g as u32) | (l.0 & 1)))
    }

    pub fn origin(&self, l: Letter) -> usize {
        let e = &self.edges[l.index()];
        if l.is_inverse() {
            e.to
        } else {
            e.from
        }
    }

    pub fn terminus(&self, l: Letter) -> usize {
        self.origin(l.inverse())
    }

    pub fn out_edges(&self, v: usize) -> &[Letter] {
        &self.out_edges[v]
    }

    pub fn oriented_edges(&self) -> impl Iterator<Item = Letter> {
        (0..2 * self.edges.len() as u32).map(Letter)
    }

    pub fn contains_edge(&self, l: Letter) -> bool {
        l.index() < self.edges.len()
    }

    /// Edges that may follow `l` in a reduced path.
    pub fn successors(&self, l: Letter) -> impl Iterator<Item = Letter> + '_ {
        let back = l.inverse();
        self.out_edges[self.terminus(l)].iter().copied().filter(move |&e| e != back)
    }

    pub fn is_reduced_path(&self, p: &[Letter]) -> bool {
        p.iter().all(|&l| self.contains_edge(l))
            && p.windows(2).all(|w| self.terminus(w[0]) == self.origin(w[1]) && w[1] != w[0].inverse())
    }

    pub fn is_circuit(&self, p: &[Letter]) -> bool {
        match (p.first(), p.last()) {
            (Some(&f), Some(&l)) => {
                self.is_reduced_path(p) && self.terminus(l) == self.origin(f) && (p.len() == 1 || f != l.inverse())
            }
            _ => false,
        }
    }

    pub fn format_path(&self, p: &[Letter]) -> String {
        p.iter()
            .map(|&l| {
                let c = self.edges[l.index()].id;
                if l.is_inverse() {
                    c.to_ascii_uppercase()
                } else {
                    c
                }
            })
            .collect()
    }

    /// Parses an edge-label string (uppercase = reversed edge) without
    /// checking reducedness.
    pub fn parse_edges(&self, s: &str) -> Result<Vec<Letter>> {
        s.chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| {
                let lower = c.to_ascii_lowercase();
                let i = self
                    .edges
                    .iter()
                    .position(|e| e.id == lower)
                    .ok_or_else(|| Error::invalid(format!("'{c}' is not an edge of this chart")))?;
                Ok(if c.is_ascii_uppercase() { Letter::generator_inverse(i) } else { Letter::generator(i) })
            })
            .collect()
    }

    /// Parses a reduced edge path.
    pub fn parse_path(&self, s: &str) -> Result<Vec<Letter>> {
        let p = self.parse_edges(s)?;
        if p.is_empty() || !self.is_reduced_path(&p) {
            return Err(Error::invalid(format!("'{s}' is not a reduced path in this chart")));
        }
        Ok(p)
    }

    /// Calls `f` on every reduced path of length `m`, in lexicographic order.
    pub fn for_each_path(&self, m: usize, f: &mut dyn FnMut(&[Letter])) {
        fn go(c: &Chart, m: usize, buf: &mut Vec<Letter>, f: &mut dyn FnMut(&[Letter])) {
            if buf.len() == m {
                f(buf);
                return;
            }
            let next: Vec<Letter> = match buf.last() {
                None => c.oriented_edges().collect(),
                Some(&l) => c.successors(l).collect(),
            };
            for e in next {
                buf.push(e);
                go(c, m, buf, f);
                buf.pop();
            }
        }
        if m == 0 {
            return;
        }
        let mut buf = Vec::with_capacity(m);
        go(self, m, &mut buf, f);
    }

    /// `S(m)`: all reduced paths of length `m`.
    pub fn paths(&self, m: usize) -> Vec<Vec<Letter>> {
        let mut out = Vec::new();
        self.for_each_path(m, &mut |p| out.push(p.to_vec()));
        out
    }

    /// Expands a word over the chart's basis into a reduced edge path.
    pub fn word_to_path(&self, w: &[Letter]) -> Vec<Letter> {
        let mut out = Vec::new();
        for &l in w {
            let gamma = &self.basis[l.index()];
            if l.is_inverse() {
                out.extend(inverse_letters(gamma));
            } else {
                out.extend_from_slice(gamma);
            }
        }
        free_reduce(&out)
    }

    /// The reduced circuit of a conjugacy class.
    pub fn word_to_circuit(&self, w: &CyclicWord) -> Circuit {
        Circuit::from_closed_path(self, &self.word_to_path(w.letters()))
            .expect("nontrivial classes have nontrivial circuits")
    }

    /// Reads a circuit back as a cyclic word by dropping tree edges.
    pub fn circuit_to_word(&self, c: &Circuit) -> Option<CyclicWord> {
        let letters: Vec<Letter> = c.edges().iter().filter_map(|&l| self.generator_letter(l)).collect();
        CyclicWord::from_letters(&letters)
    }

    pub fn hyperbolic_length(&self, metric: &Metric, w: &Word) -> Q {
        match CyclicWord::from_word(w) {
            Some(c) => metric.path_length(self.word_to_circuit(&c).edges()),
            None => Q::zero(),
        }
    }

    pub fn check_alphabet(&self, w: &[Letter]) -> Result<()> {
        self.alphabet().check(w)
    }
}

impl fmt::Display for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.name {
            Some(n) => f.write_str(n),
            None => write!(f, "chart({}v,{}e)", self.vertices.len(), self.edges.len()),
        }
    }
}

/// A cyclically reduced closed edge path, stored in least rotation.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Circuit {
    edges: Vec<Letter>,
}

impl Circuit {
    /// Cyclically reduces a closed path; `None` if it is null-homotopic.
    pub fn from_closed_path(chart: &Chart, path: &[Letter]) -> Option<Circuit> {
        let mut p = free_reduce(path);
        loop {
            let n = p.len();
            if n >= 2 && p[0] == p[n - 1].inverse() {
                p.truncate(n - 1);
                p.remove(0);
            } else {
                break;
            }
        }
        if p.is_empty() {
            return None;
        }
        debug_assert!(chart.is_circuit(&p));
        Some(Circuit { edges: canonical_rotation(&p) })
    }

    pub fn parse(chart: &Chart, s: &str) -> Result<Circuit> {
        let p = chart.parse_edges(s.trim().trim_start_matches('~'))?;
        if !chart.is_circuit(&p) || !is_cyclically_reduced(&p) {
            return Err(Error::invalid(format!("'{s}' is not a reduced circuit")));
        }
        Ok(Circuit { edges: canonical_rotation(&p) })
    }

    pub fn edges(&self) -> &[Letter] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

/// Positive rational lengths on the unoriented edges of a chart.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Metric {
    lengths: Vec<Q>,
}

impl Metric {
    pub fn simplicial(chart: &Chart) -> Metric {
        Metric { lengths: vec![rational::one(); chart.edge_count()] }
    }

    pub fn new(chart: &Chart, lengths: Vec<Q>) -> Result<Metric> {
        if lengths.len() != chart.edge_count() {
            return Err(Error::invalid(format!(
                "metric has {} lengths for {} edges",
                lengths.len(),
                chart.edge_count()
            )));
        }
        if let Some(bad) = lengths.iter().find(|l| !rational::is_positive(l)) {
            return Err(Error::invalid(format!("edge length {bad} is not positive")));
        }
        Ok(Metric { lengths })
    }

    /// JSON object mapping edge ids to `"p/q"`; missing edges get length 1.
    pub fn from_json(chart: &Chart, v: &Value) -> Result<Metric> {
        let obj = v.as_object().ok_or_else(|| Error::invalid("metric must be a JSON object"))?;
        let mut lengths = vec![rational::one(); chart.edge_count()];
        for (id, val) in obj {
            let i = chart
                .edges()
                .iter()
                .position(|e| id.len() == 1 && id.starts_with(e.id))
                .ok_or_else(|| Error::invalid(format!("metric names unknown edge '{id}'")))?;
            lengths[i] = rational::rational_from_json(val)?;
        }
        Metric::new(chart, lengths)
    }

    pub fn to_json(&self, chart: &Chart) -> Value {
        let map: BTreeMap<String, String> =
            chart.edges().iter().zip(&self.lengths).map(|(e, l)| (e.id.to_string(), l.to_string())).collect();
        json!(map)
    }

    pub fn lengths(&self) -> &[Q] {
        &self.lengths
    }

    pub fn length(&self, l: Letter) -> &Q {
        &self.lengths[l.index()]
    }

    pub fn path_length(&self, p: &[Letter]) -> Q {
        p.iter().fold(Q::zero(), |acc, &l| acc + self.length(l))
    }

    pub fn scaled(&self, r: &Q) -> Metric {
        Metric { lengths: self.lengths.iter().map(|l| l * r).collect() }
    }

    pub fn is_simplicial(&self) -> bool {
        self.lengths.iter().all(|l| *l == rational::one())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};
    use crate::words::trial_rng;

    fn cw(s: &str) -> CyclicWord {
        s.parse().unwrap()
    }

    #[test]
    fn builtin_shapes() {
        let b = Chart::bouquet(2).unwrap();
        assert_eq!((b.vertex_count(), b.oriented_edges().count()), (1, 4));
        let t = Chart::theta();
        assert_eq!((t.vertex_count(), t.edge_count(), t.rank()), (2, 3, 2));
        assert_eq!(Chart::builtin("bouquet3").unwrap().rank(), 3);
    }

    #[test]
    fn disconnected_and_wrong_rank_rejected() {
        let edges = vec![Edge { id: 'a', from: 0, to: 0 }, Edge { id: 'b', from: 1, to: 1 }];
        let err = Chart::new(vec!["0".into(), "1".into()], edges, MarkingKind::Geometric, &[], 2).unwrap_err();
        assert_eq!(err.name(), "InvalidChart");

        let edges = vec![Edge { id: 'a', from: 0, to: 0 }, Edge { id: 'b', from: 0, to: 0 }];
        let err = Chart::new(vec!["0".into()], edges, MarkingKind::Bouquet, &[], 3).unwrap_err();
        assert_eq!(err, Error::RankMismatch { expected: 3, found: 2 });
    }

    #[test]
    fn geometric_bases() {
        let t = Chart::theta();
        assert_eq!(t.format_path(t.basis_loop(0)), "yX");
        assert_eq!(t.format_path(t.basis_loop(1)), "zX");
        let d = Chart::dumbbell();
        assert_eq!(d.format_path(d.basis_loop(0)), "x");
        assert_eq!(d.format_path(d.basis_loop(1)), "tyT");
        assert!(t.geometric_basis(&[0, 1, 2]).is_err());
        assert!(t.geometric_basis(&[]).is_err());
    }

    #[test]
    fn dumbbell_circuits() {
        let d = Chart::dumbbell();
        let c = d.word_to_circuit(&cw("ab"));
        assert_eq!(c.len(), 4);
        assert_eq!(c, Circuit::parse(&d, "xtyT").unwrap());
        assert_eq!(d.word_to_circuit(&cw("a")).len(), 1);
        assert_eq!(d.circuit_to_word(&Circuit::parse(&d, "xtyT").unwrap()).unwrap().to_string(), "~ab");
    }

    #[test]
    fn lengths() {
        let b = Chart::bouquet(2).unwrap();
        let simp = Metric::simplicial(&b);
        assert_eq!(b.hyperbolic_length(&simp, &"baB".parse().unwrap()), qi(1));
        let m = Metric::new(&b, vec![qi(1), qi(2)]).unwrap();
        assert_eq!(b.hyperbolic_length(&m, &"ab".parse().unwrap()), qi(3));
        let d = Chart::dumbbell();
        assert_eq!(d.hyperbolic_length(&Metric::simplicial(&d), &"ab".parse().unwrap()), qi(4));
        assert!(Metric::new(&b, vec![qi(1), qi(0)]).is_err());
    }

    #[test]
    fn metric_json_defaults_missing_edges() {
        let d = Chart::dumbbell();
        let m = Metric::from_json(&d, &json!({"t": "1/2"})).unwrap();
        assert_eq!(m.lengths(), &[qi(1), q(1, 2), qi(1)]);
        assert_eq!(Metric::from_json(&d, &m.to_json(&d)).unwrap(), m);
    }

    #[test]
    fn chart_json_round_trip() {
        for c in [Chart::bouquet(3).unwrap(), Chart::theta(), Chart::dumbbell()] {
            assert_eq!(Chart::from_json(&c.to_json()).unwrap(), c);
            assert_eq!(Chart::from_json(&c.to_json_ref()).unwrap(), c);
        }
    }

    #[test]
    fn path_counts() {
        // |S(m)| on a rank-k bouquet is 2k(2k-1)^(m-1)
        let b = Chart::bouquet(2).unwrap();
        assert_eq!(b.paths(3).len(), 36);
        // theta: every vertex has degree 3
        assert_eq!(Chart::theta().paths(2).len(), 12);
    }

    #[test]
    fn circuits_round_trip_on_every_builtin() {
        let alphabet = Alphabet::new(2).unwrap();
        let mut rng = trial_rng(5, 0);
        for chart in Chart::builtins_for_rank(2) {
            for _ in 0..1000 {
                let w = crate::words::random_cyclic_word(&alphabet, 40, &mut rng);
                let c = chart.word_to_circuit(&w);
                assert!(chart.is_circuit(c.edges()));
                assert_eq!(chart.circuit_to_word(&c).as_ref(), Some(&w));
            }
        }
    }

    #[test]
    fn length_is_a_class_function_and_homogeneous() {
        let alphabet = Alphabet::new(2).unwrap();
        let mut rng = trial_rng(6, 0);
        for chart in Chart::builtins_for_rank(2) {
            let lengths = (0..chart.edge_count()).map(|i| q(i as i64 + 2, 3)).collect();
            let metric = Metric::new(&chart, lengths).unwrap();
            for _ in 0..200 {
                let w = crate::words::random_reduced_word(&alphabet, 15, &mut rng).unwrap();
                let u = crate::words::random_reduced_word(&alphabet, 6, &mut rng).unwrap();
                let base = chart.hyperbolic_length(&metric, &w);
                assert_eq!(chart.hyperbolic_length(&metric, &u.concat(&w).concat(&u.inverse())), base);
                for n in 1..=5 {
                    assert_eq!(chart.hyperbolic_length(&metric, &w.pow(n)), &base * qi(n as i64));
                }
                if chart.is_bouquet() {
                    let core = crate::words::cyclic_reduce(&w).0.map_or(0, |c| c.len());
                    assert_eq!(chart.hyperbolic_length(&Metric::simplicial(&chart), &w), qi(core as i64));
                }
            }
        }
    }
}
