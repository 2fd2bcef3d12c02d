//! Finite-level coordinates of currents.
//!
//! A [`LevelVector`] at level `m` assigns a nonnegative rational to each
//! reduced edge path of length `m` in a chart and satisfies the flow
//! condition (for every path `u` of length `m - 1`, the mass entering `u`
//! equals the mass leaving it). Paths absent from the map are zero.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num::{Signed, Zero};
use serde_json::{json, Value};

use crate::charts::{Chart, Circuit};
use crate::error::{Error, Result};
use crate::rational::{self, Q};
use crate::words::{inverse_letters, necklace_windows, CyclicWord, Letter, Word};

pub type Path = Vec<Letter>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelVector {
    chart: Arc<Chart>,
    level: usize,
    coords: BTreeMap<Path, Q>,
}

impl LevelVector {
    /// Validates paths, signs and the flow condition; zero entries are dropped.
    pub fn new(chart: Arc<Chart>, level: usize, coords: BTreeMap<Path, Q>) -> Result<Self> {
        if level == 0 {
            return Err(Error::invalid("level must be at least 1"));
        }
        for (p, x) in &coords {
            if p.len() != level || !chart.is_reduced_path(p) {
                return Err(Error::invalid(format!(
                    "'{}' is not a reduced path of length {level}",
                    chart.format_path(p)
                )));
            }
            if x.is_negative() {
                return Err(Error::invalid(format!("coordinate of '{}' is negative", chart.format_path(p))));
            }
        }
        let v = LevelVector::from_raw(chart, level, coords);
        v.check_flow()?;
        Ok(v)
    }

    pub(crate) fn from_raw(chart: Arc<Chart>, level: usize, mut coords: BTreeMap<Path, Q>) -> Self {
        coords.retain(|_, x| !x.is_zero());
        LevelVector { chart, level, coords }
    }

    pub fn zero(chart: Arc<Chart>, level: usize) -> Self {
        LevelVector { chart, level, coords: BTreeMap::new() }
    }

    fn check_flow(&self) -> Result<()> {
        let (ins, outs) = self.vertex_sums();
        let keys: BTreeSet<&Path> = ins.keys().chain(outs.keys()).collect();
        for u in keys {
            let zero = Q::zero();
            if ins.get(u).unwrap_or(&zero) != outs.get(u).unwrap_or(&zero) {
                return Err(Error::invalid(format!("flow condition fails at '{}'", self.chart.format_path(u))));
            }
        }
        Ok(())
    }

    /// Incoming and outgoing mass per vertex of the initial graph. At level 1
    /// the vertices are chart vertices, encoded as one-element paths holding
    /// the vertex index.
    fn vertex_sums(&self) -> (BTreeMap<Path, Q>, BTreeMap<Path, Q>) {
        let mut ins: BTreeMap<Path, Q> = BTreeMap::new();
        let mut outs: BTreeMap<Path, Q> = BTreeMap::new();
        for (v, x) in &self.coords {
            let (head, tail) = if self.level == 1 {
                (vec![Letter(self.chart.terminus(v[0]) as u32)], vec![Letter(self.chart.origin(v[0]) as u32)])
            } else {
                (v[1..].to_vec(), v[..v.len() - 1].to_vec())
            };
            *ins.entry(head).or_insert_with(Q::zero) += x;
            *outs.entry(tail).or_insert_with(Q::zero) += x;
        }
        (ins, outs)
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn coords(&self) -> &BTreeMap<Path, Q> {
        &self.coords
    }

    pub fn get(&self, p: &[Letter]) -> Q {
        self.coords.get(p).cloned().unwrap_or_else(Q::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn is_integral(&self) -> bool {
        self.coords.values().all(rational::is_integer)
    }

    /// `ω(x)`, the total mass.
    pub fn weight(&self) -> Q {
        self.coords.values().fold(Q::zero(), |a, x| a + x)
    }

    pub fn normalize(&self) -> Result<LevelVector> {
        if self.is_zero() {
            return Err(Error::ZeroCurrent);
        }
        Ok(self.scale(&(rational::one() / self.weight())))
    }

    pub fn scale(&self, r: &Q) -> LevelVector {
        let coords = self.coords.iter().map(|(p, x)| (p.clone(), x * r)).collect();
        LevelVector::from_raw(self.chart.clone(), self.level, coords)
    }

    pub fn add(&self, other: &LevelVector) -> Result<LevelVector> {
        self.same_space(other)?;
        let mut coords = self.coords.clone();
        for (p, x) in &other.coords {
            *coords.entry(p.clone()).or_insert_with(Q::zero) += x;
        }
        Ok(LevelVector::from_raw(self.chart.clone(), self.level, coords))
    }

    fn same_space(&self, other: &LevelVector) -> Result<()> {
        if self.chart != other.chart {
            return Err(Error::ChartMismatch(format!("{} vs {}", self.chart, other.chart)));
        }
        if self.level != other.level {
            return Err(Error::invalid(format!("levels {} and {} differ", self.level, other.level)));
        }
        Ok(())
    }

    /// Mass through each path `u` of length `m - 1`, `d_x(u)`.
    pub fn throughput(&self) -> BTreeMap<Path, Q> {
        let mut d: BTreeMap<Path, Q> = BTreeMap::new();
        for (v, x) in &self.coords {
            *d.entry(v[..v.len() - 1].to_vec()).or_insert_with(Q::zero) += x;
        }
        d
    }

    pub fn to_json(&self) -> Value {
        let coords: serde_json::Map<String, Value> =
            self.coords.iter().map(|(p, x)| (self.chart.format_path(p), json!(x.to_string()))).collect();
        json!({"chart": self.chart.to_json_ref(), "level": self.level, "coords": coords})
    }

    pub fn from_json(v: &Value) -> Result<LevelVector> {
        let chart = Arc::new(match v.get("chart") {
            Some(c) => Chart::from_json(c)?,
            None => Chart::bouquet(2)?,
        });
        let obj = v["coords"].as_object().ok_or_else(|| Error::invalid("missing 'coords' object"))?;
        let mut coords = BTreeMap::new();
        let mut level = v["level"].as_u64().map(|l| l as usize);
        for (p, x) in obj {
            let path = chart.parse_path(p)?;
            level.get_or_insert(path.len());
            coords.insert(path, rational::rational_from_json(x)?);
        }
        let level = level.ok_or_else(|| Error::invalid("cannot infer the level of an empty vector"))?;
        LevelVector::new(chart, level, coords)
    }

    /// Parses a bare coordinate map (`{"aa": 1, "bb": "1/2"}`) on `chart`.
    pub fn from_coords_json(chart: Arc<Chart>, level: Option<usize>, coords: &Value) -> Result<LevelVector> {
        let mut obj = json!({"coords": coords, "chart": chart.to_json_ref()});
        if let Some(l) = level {
            obj["level"] = json!(l);
        }
        LevelVector::from_json(&obj)
    }
}

/// `j_m(η_w)`: occurrence counts of every length-`m` path on the circuit of `w`.
pub fn rational_current(chart: &Arc<Chart>, w: &CyclicWord, m: usize) -> Result<LevelVector> {
    if m == 0 {
        return Err(Error::invalid("level must be at least 1"));
    }
    chart.check_alphabet(w.letters())?;
    let circuit = chart.word_to_circuit(w);
    Ok(circuit_current(chart, &circuit, m))
}

pub(crate) fn circuit_current(chart: &Arc<Chart>, c: &Circuit, m: usize) -> LevelVector {
    let mut coords: BTreeMap<Path, Q> = BTreeMap::new();
    necklace_windows(c.edges(), m, |p| *coords.entry(p.to_vec()).or_insert_with(Q::zero) += rational::one());
    LevelVector::from_raw(chart.clone(), m, coords)
}

/// Rational current of an element, through its conjugacy class.
pub fn rational_current_of_word(chart: &Arc<Chart>, g: &Word, m: usize) -> Result<LevelVector> {
    let w = CyclicWord::from_word(g).ok_or_else(|| Error::invalid("the identity has no rational current"))?;
    rational_current(chart, &w, m)
}

/// The uniform current of a bouquet: `1 / (2k (2k-1)^(m-1))` on every path.
pub fn uniform_current(chart: &Arc<Chart>, m: usize) -> Result<LevelVector> {
    if !chart.is_bouquet() {
        return Err(Error::Unsupported("the uniform current is defined on a bouquet".into()));
    }
    if m == 0 {
        return Err(Error::invalid("level must be at least 1"));
    }
    let k = chart.rank() as i64;
    let denom = (2 * k) * num::pow(2 * k - 1, m - 1);
    let value = rational::q(1, denom);
    let coords = chart.paths(m).into_iter().map(|p| (p, value.clone())).collect();
    Ok(LevelVector::from_raw(chart.clone(), m, coords))
}

/// `π_m`: sums over the first edge.
pub fn project(x: &LevelVector) -> Result<LevelVector> {
    if x.level < 2 {
        return Err(Error::invalid("cannot project below level 1"));
    }
    let mut coords: BTreeMap<Path, Q> = BTreeMap::new();
    for (v, c) in &x.coords {
        *coords.entry(v[1..].to_vec()).or_insert_with(Q::zero) += c;
    }
    Ok(LevelVector::from_raw(x.chart.clone(), x.level - 1, coords))
}

/// `ι_m`: the random-walk extension `y_z = x_{z-} x_{z+} / d_x(z-+)`.
pub fn extend(x: &LevelVector) -> Result<LevelVector> {
    if x.level < 2 {
        return Err(Error::Unsupported("extension is defined from level 2 up".into()));
    }
    if x.is_zero() {
        return Err(Error::ZeroCurrent);
    }
    let d = x.throughput();
    let mut coords = BTreeMap::new();
    for (v, xv) in &x.coords {
        let last = *v.last().expect("level at least 2");
        for e in x.chart.successors(last) {
            let mut z = v.clone();
            z.push(e);
            let xz_plus = x.get(&z[1..]);
            if xz_plus.is_zero() {
                continue;
            }
            let y = xv * xz_plus / &d[&z[1..z.len() - 1]];
            coords.insert(z, y);
        }
    }
    Ok(LevelVector::from_raw(x.chart.clone(), x.level + 1, coords))
}

/// Projects or extends to level `n`.
pub fn extend_to_level(x: &LevelVector, n: usize) -> Result<LevelVector> {
    if n == 0 {
        return Err(Error::invalid("level must be at least 1"));
    }
    let mut y = x.clone();
    while y.level > n {
        y = project(&y)?;
    }
    while y.level < n {
        y = extend(&y)?;
    }
    Ok(y)
}

/// Closed form of iterated extension to level `n`:
/// `y_z = x_{v_0} · Π x_{v_i} / d_x(u_i)` over the consecutive length-`m`
/// subpaths `v_i` of `z` and their overlaps `u_i`.
pub fn product_formula(x: &LevelVector, n: usize) -> Result<LevelVector> {
    let m = x.level;
    if m < 2 || n < m {
        return Err(Error::Unsupported("product formula needs 2 <= m <= n".into()));
    }
    let d = x.throughput();
    let mut coords = BTreeMap::new();
    x.chart.for_each_path(n, &mut |z| {
        let mut y = x.get(&z[..m]);
        for i in 1..=n - m {
            if y.is_zero() {
                break;
            }
            let xi = x.get(&z[i..i + m]);
            if xi.is_zero() {
                y = Q::zero();
                break;
            }
            y = y * xi / &d[&z[i..i + m - 1]];
        }
        if !y.is_zero() {
            coords.insert(z.to_vec(), y);
        }
    });
    Ok(LevelVector::from_raw(x.chart.clone(), n, coords))
}

/// `v ↦ v̄`, the reversed path with every edge reversed.
pub fn flip(x: &LevelVector) -> LevelVector {
    let coords = x.coords.iter().map(|(p, c)| (inverse_letters(p), c.clone())).collect();
    LevelVector::from_raw(x.chart.clone(), x.level, coords)
}

pub fn symmetrize(x: &LevelVector) -> LevelVector {
    x.add(&flip(x)).expect("same space").scale(&rational::q(1, 2))
}

/// The initial graph: vertices are paths of length `m - 1`, edges are paths
/// of length `m` labelled by their coordinate.
#[derive(Clone, Debug)]
pub struct InitialGraph {
    pub level: usize,
    pub vertices: Vec<Path>,
    pub edges: Vec<(Path, Q)>,
    pub throughput: BTreeMap<Path, Q>,
}

impl InitialGraph {
    /// Keeps positive edges and the vertices they touch.
    pub fn improved(&self) -> InitialGraph {
        let edges: Vec<(Path, Q)> = self.edges.iter().filter(|(_, x)| x.is_positive()).cloned().collect();
        let vertices: BTreeSet<Path> =
            edges.iter().flat_map(|(v, _)| [v[..v.len() - 1].to_vec(), v[1..].to_vec()]).collect();
        let throughput = self.throughput.iter().filter(|(_, d)| d.is_positive()).map(|(u, d)| (u.clone(), d.clone())).collect();
        InitialGraph { level: self.level, vertices: vertices.into_iter().collect(), edges, throughput }
    }

    /// Weak connectivity (equivalent to strong connectivity under the flow
    /// condition).
    pub fn is_connected(&self) -> bool {
        if self.vertices.is_empty() {
            return false;
        }
        let index: BTreeMap<&Path, usize> = self.vertices.iter().enumerate().map(|(i, v)| (v, i)).collect();
        let mut adj = vec![Vec::new(); self.vertices.len()];
        for (v, _) in &self.edges {
            let (a, b) = (index[&v[..v.len() - 1].to_vec()], index[&v[1..].to_vec()]);
            adj[a].push(b);
            adj[b].push(a);
        }
        let mut seen = vec![false; self.vertices.len()];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(a) = stack.pop() {
            for &b in &adj[a] {
                if !seen[b] {
                    seen[b] = true;
                    stack.push(b);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// A single directed simple cycle: every vertex has one edge in and out.
    pub fn is_simple_cycle(&self) -> bool {
        let mut indeg: BTreeMap<&[Letter], usize> = BTreeMap::new();
        let mut outdeg: BTreeMap<&[Letter], usize> = BTreeMap::new();
        for (v, _) in &self.edges {
            *outdeg.entry(&v[..v.len() - 1]).or_default() += 1;
            *indeg.entry(&v[1..]).or_default() += 1;
        }
        self.is_connected()
            && self.vertices.iter().all(|u| indeg.get(u.as_slice()) == Some(&1) && outdeg.get(u.as_slice()) == Some(&1))
    }
}

/// `Δ(x)` over all of `S(m - 1)` and `S(m)`.
pub fn initial_graph(x: &LevelVector) -> Result<InitialGraph> {
    if x.level < 2 {
        return Err(Error::Unsupported("initial graphs are defined from level 2 up".into()));
    }
    let vertices = x.chart.paths(x.level - 1);
    let edges = x.chart.paths(x.level).into_iter().map(|v| {
        let c = x.get(&v);
        (v, c)
    }).collect();
    let mut throughput: BTreeMap<Path, Q> = vertices.iter().map(|u| (u.clone(), Q::zero())).collect();
    for (u, d) in x.throughput() {
        throughput.insert(u, d);
    }
    Ok(InitialGraph { level: x.level, vertices, edges, throughput })
}

/// `Δ'(x)`, built from the support only.
pub fn improved_initial_graph(x: &LevelVector) -> Result<InitialGraph> {
    if x.level < 2 {
        return Err(Error::Unsupported("initial graphs are defined from level 2 up".into()));
    }
    let edges: Vec<(Path, Q)> = x.coords.iter().map(|(p, c)| (p.clone(), c.clone())).collect();
    let vertices: BTreeSet<Path> =
        edges.iter().flat_map(|(v, _)| [v[..v.len() - 1].to_vec(), v[1..].to_vec()]).collect();
    Ok(InitialGraph { level: x.level, vertices: vertices.into_iter().collect(), edges, throughput: x.throughput() })
}

/// Finds a cyclic word whose level-`m` coordinates are exactly `x`, via an
/// Euler circuit of `Δ'(x)` taken with multiplicities.
pub fn realize_integer_point(x: &LevelVector) -> Result<CyclicWord> {
    if x.level < 2 {
        return Err(Error::Unsupported("realization works from level 2 up".into()));
    }
    if !x.is_integral() {
        return Err(Error::invalid("coordinates must be integers"));
    }
    if x.is_zero() {
        return Err(Error::ZeroCurrent);
    }
    let g = improved_initial_graph(x)?;
    if !g.is_connected() {
        return Err(Error::NotRealizable("the positive part of the initial graph is disconnected".into()));
    }
    let circuit = euler_circuit(x)?;
    let last: Vec<Letter> = circuit.iter().map(|v| *v.last().expect("nonempty path")).collect();
    let c = Circuit::from_closed_path(&x.chart, &last)
        .ok_or_else(|| Error::NotRealizable("Euler circuit is null-homotopic".into()))?;
    x.chart
        .circuit_to_word(&c)
        .ok_or_else(|| Error::NotRealizable("circuit runs only through the tree".into()))
}

/// Hierholzer's algorithm, always leaving by the smallest unused edge.
fn euler_circuit(x: &LevelVector) -> Result<Vec<Path>> {
    let mut out: BTreeMap<Path, Vec<(Path, u64)>> = BTreeMap::new();
    for (v, c) in &x.coords {
        let n: u64 = c
            .to_integer()
            .try_into()
            .map_err(|_| Error::invalid("coordinate too large to realize"))?;
        out.entry(v[..v.len() - 1].to_vec()).or_default().push((v.clone(), n));
    }
    let mut cursor: BTreeMap<Path, usize> = out.keys().map(|u| (u.clone(), 0)).collect();
    let start = x.coords.keys().next().expect("nonzero")[..x.level - 1].to_vec();
    let mut stack: Vec<(Path, Option<Path>)> = vec![(start, None)];
    let mut circuit = Vec::new();
    while let Some((u, via)) = stack.last().cloned() {
        let edges = out.get_mut(&u);
        let next = edges.and_then(|es| {
            let i = cursor.get_mut(&u).expect("cursor per vertex");
            while *i < es.len() && es[*i].1 == 0 {
                *i += 1;
            }
            es.get_mut(*i).map(|(v, n)| {
                *n -= 1;
                v.clone()
            })
        });
        match next {
            Some(v) => stack.push((v[1..].to_vec(), Some(v))),
            None => {
                stack.pop();
                if let Some(v) = via {
                    circuit.push(v);
                }
            }
        }
    }
    circuit.reverse();
    Ok(circuit)
}

/// Extremal points of the weight-one slice: `Δ'(x)` is one directed simple
/// cycle carrying equal labels.
pub fn is_extremal(x: &LevelVector) -> Result<bool> {
    if x.level < 2 {
        return Err(Error::Unsupported("extremality is tested from level 2 up".into()));
    }
    if x.weight() != rational::one() {
        return Err(Error::invalid(format!("weight is {}, not 1", x.weight())));
    }
    let g = improved_initial_graph(x)?;
    let first = &g.edges[0].1;
    Ok(g.is_simple_cycle() && g.edges.iter().all(|(_, c)| c == first))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};
    use crate::words::{random_cyclic_word, trial_rng, Alphabet};
    use rand::Rng;

    fn b2() -> Arc<Chart> {
        Arc::new(Chart::bouquet(2).unwrap())
    }

    fn cw(s: &str) -> CyclicWord {
        s.parse().unwrap()
    }

    fn coords(chart: &Chart, pairs: &[(&str, Q)]) -> BTreeMap<Path, Q> {
        pairs.iter().map(|(p, x)| (chart.parse_path(p).unwrap(), x.clone())).collect()
    }

    /// A random point of `R_m`: a positive rational combination of rational
    /// currents, optionally extended.
    pub(crate) fn random_point(chart: &Arc<Chart>, m: usize, rng: &mut impl Rng) -> LevelVector {
        let alphabet = chart.alphabet();
        let mut x = LevelVector::zero(chart.clone(), m);
        for _ in 0..rng.gen_range(1..4) {
            let w = random_cyclic_word(&alphabet, 12, rng);
            let c = q(rng.gen_range(1..10), rng.gen_range(1..10));
            x = x.add(&rational_current(chart, &w, m).unwrap().scale(&c)).unwrap();
        }
        x
    }

    #[test]
    fn rational_current_examples() {
        let c = b2();
        let x = rational_current(&c, &cw("ab"), 2).unwrap();
        assert_eq!(x.coords(), &coords(&c, &[("ab", qi(1)), ("ba", qi(1))]));
        let y = rational_current(&c, &cw("aa"), 2).unwrap();
        assert_eq!(y.coords(), &coords(&c, &[("aa", qi(2))]));
        assert_eq!(y, rational_current(&c, &cw("a"), 2).unwrap().scale(&qi(2)));
        assert!(rational_current_of_word(&c, &Word::identity(), 2).is_err());
    }

    #[test]
    fn weight_equals_circuit_length() {
        let alphabet = Alphabet::new(2).unwrap();
        let mut rng = trial_rng(10, 0);
        for chart in Chart::builtins_for_rank(2) {
            let chart = Arc::new(chart);
            for _ in 0..100 {
                let w = random_cyclic_word(&alphabet, 30, &mut rng);
                let x = rational_current(&chart, &w, 3).unwrap();
                assert_eq!(x.weight(), qi(chart.word_to_circuit(&w).len() as i64));
                assert!(LevelVector::new(chart.clone(), 3, x.coords().clone()).is_ok());
            }
        }
    }

    #[test]
    fn uniform_examples() {
        let c = b2();
        let u2 = uniform_current(&c, 2).unwrap();
        assert_eq!(u2.coords().len(), 12);
        assert!(u2.coords().values().all(|x| *x == q(1, 12)));
        assert!(uniform_current(&c, 1).unwrap().coords().values().all(|x| *x == q(1, 4)));
        let c3 = Arc::new(Chart::bouquet(3).unwrap());
        assert!(uniform_current(&c3, 3).unwrap().coords().values().all(|x| *x == q(1, 150)));
        assert_eq!(u2.weight(), qi(1));
        assert_eq!(u2.normalize().unwrap(), u2);
        let err = uniform_current(&Arc::new(Chart::theta()), 2).unwrap_err();
        assert_eq!(err.name(), "Unsupported");
    }

    #[test]
    fn normalize_and_zero() {
        let c = b2();
        let x = rational_current(&c, &cw("ab"), 2).unwrap();
        assert_eq!(x.weight(), qi(2));
        assert!(x.normalize().unwrap().coords().values().all(|v| *v == q(1, 2)));
        assert_eq!(LevelVector::zero(c, 2).normalize().unwrap_err(), Error::ZeroCurrent);
    }

    #[test]
    fn project_examples() {
        let c = b2();
        let x = rational_current(&c, &cw("ab"), 2).unwrap();
        assert_eq!(project(&x).unwrap(), rational_current(&c, &cw("ab"), 1).unwrap());
        assert_eq!(project(&uniform_current(&c, 3).unwrap()).unwrap(), uniform_current(&c, 2).unwrap());
        assert!(project(&project(&x).unwrap()).is_err());
    }

    #[test]
    fn extend_examples() {
        let c = b2();
        assert_eq!(extend(&uniform_current(&c, 2).unwrap()).unwrap(), uniform_current(&c, 3).unwrap());
        let x = rational_current(&c, &cw("ab"), 2).unwrap();
        assert_eq!(extend(&x).unwrap(), rational_current(&c, &cw("ab"), 3).unwrap());
        assert_eq!(extend_to_level(&uniform_current(&c, 2).unwrap(), 5).unwrap(), uniform_current(&c, 5).unwrap());
        assert_eq!(extend_to_level(&x, 2).unwrap(), x);
        assert_eq!(extend(&uniform_current(&c, 1).unwrap()).unwrap_err().name(), "Unsupported");
        assert_eq!(extend(&LevelVector::zero(c, 2)).unwrap_err(), Error::ZeroCurrent);
    }

    #[test]
    fn section_and_product_formula_on_random_points() {
        let mut rng = trial_rng(11, 0);
        for chart in Chart::builtins_for_rank(2) {
            let chart = Arc::new(chart);
            for _ in 0..30 {
                let x = random_point(&chart, 2, &mut rng);
                let y = extend(&x).unwrap();
                assert!(LevelVector::new(chart.clone(), 3, y.coords().clone()).is_ok());
                assert_eq!(project(&y).unwrap(), x);
                assert_eq!(y.weight(), x.weight());
                assert_eq!(product_formula(&x, 5).unwrap(), extend_to_level(&x, 5).unwrap());
            }
        }
    }

    #[test]
    fn initial_graph_examples() {
        let c = b2();
        let x = rational_current(&c, &cw("ab"), 2).unwrap();
        let g = improved_initial_graph(&x).unwrap();
        assert_eq!((g.vertices.len(), g.edges.len()), (2, 2));
        assert!(g.is_simple_cycle());
        let y = LevelVector::new(c.clone(), 2, coords(&c, &[("aa", qi(1)), ("bb", qi(1))])).unwrap();
        assert!(!improved_initial_graph(&y).unwrap().is_connected());
        let full = initial_graph(&x).unwrap();
        assert_eq!((full.vertices.len(), full.edges.len()), (4, 12));
        assert_eq!(full.improved().edges.len(), 2);
        let total = full.throughput.values().fold(Q::zero(), |a, d| a + d);
        assert_eq!(total, x.weight());
        assert!(initial_graph(&project(&x).unwrap()).is_err());
    }

    #[test]
    fn realize_examples() {
        let c = b2();
        let x = LevelVector::new(c.clone(), 2, coords(&c, &[("ab", qi(1)), ("ba", qi(1))])).unwrap();
        assert_eq!(realize_integer_point(&x).unwrap(), cw("ab"));
        let y = LevelVector::new(c.clone(), 2, coords(&c, &[("aa", qi(2))])).unwrap();
        let g = realize_integer_point(&y).unwrap();
        assert_eq!(g, cw("aa"));
        assert_eq!(rational_current(&c, &g, 2).unwrap(), y);
        let z = LevelVector::new(c.clone(), 2, coords(&c, &[("aa", qi(1)), ("bb", qi(1))])).unwrap();
        assert_eq!(realize_integer_point(&z).unwrap_err().name(), "NotRealizable");
        assert_eq!(realize_integer_point(&x.scale(&q(1, 2))).unwrap_err().name(), "InvalidInput");
    }

    #[test]
    fn realization_round_trips_on_every_builtin() {
        let alphabet = Alphabet::new(2).unwrap();
        let mut rng = trial_rng(12, 0);
        for chart in Chart::builtins_for_rank(2) {
            let chart = Arc::new(chart);
            for _ in 0..100 {
                let m = rng.gen_range(2..5);
                let w = random_cyclic_word(&alphabet, 25, &mut rng);
                let x = rational_current(&chart, &w, m).unwrap();
                let g = realize_integer_point(&x).unwrap();
                assert_eq!(rational_current(&chart, &g, m).unwrap(), x);
            }
        }
    }

    #[test]
    fn extremality_examples() {
        let c = b2();
        let x = rational_current(&c, &cw("ab"), 2).unwrap().normalize().unwrap();
        assert!(is_extremal(&x).unwrap());
        let y = rational_current(&c, &cw("aab"), 2).unwrap().normalize().unwrap();
        assert!(!is_extremal(&y).unwrap());
        let z = rational_current(&c, &cw("b"), 2).unwrap().normalize().unwrap();
        let mid = x.add(&z).unwrap().scale(&q(1, 2));
        assert!(!is_extremal(&mid).unwrap());
        assert!(is_extremal(&rational_current(&c, &cw("ab"), 2).unwrap()).is_err());
    }

    #[test]
    fn flip_examples() {
        let c = b2();
        let alphabet = Alphabet::new(2).unwrap();
        let mut rng = trial_rng(13, 0);
        for _ in 0..50 {
            let w = random_cyclic_word(&alphabet, 20, &mut rng);
            let x = rational_current(&c, &w, 3).unwrap();
            assert_eq!(flip(&x), rational_current(&c, &w.inverse(), 3).unwrap());
            assert_eq!(flip(&flip(&x)), x);
            let s = symmetrize(&x);
            assert_eq!(symmetrize(&s), s);
        }
        let u = uniform_current(&c, 3).unwrap();
        assert_eq!(symmetrize(&u), u);
    }

    #[test]
    fn json_round_trip_and_validation() {
        let d = Arc::new(Chart::dumbbell());
        let x = rational_current(&d, &cw("abAB"), 3).unwrap();
        assert_eq!(LevelVector::from_json(&x.to_json()).unwrap(), x);
        let bad = json!({"chart": "bouquet2", "level": 2, "coords": {"ab": 1}});
        assert!(LevelVector::from_json(&bad).is_err());
        let neg = json!({"chart": "bouquet2", "level": 1, "coords": {"a": "-1"}});
        assert!(LevelVector::from_json(&neg).is_err());
    }

    #[test]
    fn additivity() {
        let c = b2();
        let x = rational_current(&c, &cw("ab"), 3).unwrap();
        let y = rational_current(&c, &cw("aBB"), 3).unwrap();
        assert_eq!(x.add(&y).unwrap().weight(), x.weight() + y.weight());
    }
}
