//! Generic stretching factors, the distortion functional and its extrema,
//! and randomized translation-equivalence testing.

use std::sync::Arc;

use num::{Signed, Zero};
use rand::Rng;
use rayon::prelude::*;

use crate::charts::{Chart, Metric};
use crate::currents::{realize_integer_point, LevelVector, Path};
use crate::error::{Error, Result};
use crate::morphisms::{random_nielsen, Endomorphism};
use crate::pairing::{length_local_formula, LocalFormulaTable, PulledBackLength, TableOptions};
use crate::rational::{self, q, qi, Q};
use crate::words::{random_reduced_word, trial_rng, Alphabet, CyclicWord, Letter, Word};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StretchResult {
    pub value: Q,
    pub window: usize,
    pub anchor: usize,
}

/// `λ_A(ℓ') = I(ℓ', n_A)`, summing `d(u)` over every reduced window of the
/// table's length against the uniform current. Windows are streamed, never
/// stored.
pub fn generic_stretch_exact(spec: &PulledBackLength, opts: &TableOptions) -> Result<StretchResult> {
    let source = spec.source().clone();
    if !source.is_bouquet() {
        return Err(Error::Unsupported("generic stretch is taken over a free basis (bouquet source)".into()));
    }
    let table = length_local_formula(spec, opts)?;
    let k = table.window();
    let counts = (0..source.alphabet().size() as u32)
        .into_par_iter()
        .map(|first| {
            let mut counts = vec![0u64; spec.map.target().edge_count()];
            let mut prefixes = vec![Vec::new()];
            let mut window = Vec::with_capacity(k);
            stream_windows(&table, Letter(first), &mut window, &mut prefixes, &mut counts);
            counts
        })
        .reduce(
            || vec![0u64; spec.map.target().edge_count()],
            |a, b| a.iter().zip(&b).map(|(x, y)| x + y).collect(),
        );
    let total = counts
        .iter()
        .zip(spec.metric.lengths())
        .fold(Q::zero(), |acc, (&c, l)| acc + l * qi(c as i64));
    let size = source.alphabet().size() as i64;
    let windows = size * num::pow(size - 1, k - 1);
    Ok(StretchResult { value: total / qi(windows), window: k, anchor: table.anchor() })
}

fn stream_windows(
    table: &LocalFormulaTable,
    next: Letter,
    window: &mut Vec<Letter>,
    prefixes: &mut Vec<Vec<Letter>>,
    counts: &mut [u64],
) {
    let map = table.map();
    let mut q = prefixes.last().expect("root prefix").clone();
    for &x in map.image(next) {
        crate::words::push_reduced(&mut q, x);
    }
    window.push(next);
    prefixes.push(q);
    if window.len() == table.window() {
        let g = prefixes.last().expect("nonempty");
        let lcp = |p: &[Letter]| p.iter().zip(g).take_while(|(a, b)| a == b).count();
        let a = table.anchor();
        let start = prefixes[..=a].iter().map(|p| lcp(p)).max().unwrap_or(0);
        let end = start.max(lcp(&prefixes[a + 1]));
        for l in &g[start..end] {
            counts[l.index()] += 1;
        }
    } else {
        for e in table.map().source().successors(next).collect::<Vec<_>>() {
            stream_windows(table, e, window, prefixes, counts);
        }
    }
    window.pop();
    prefixes.pop();
}

fn check_rank(k: usize) -> Result<i64> {
    if k < 2 {
        return Err(Error::invalid(format!("rank must be at least 2, got {k}")));
    }
    Ok(k as i64)
}

/// `λ_A(φ)` for `φ = στ²`:
/// `1 + 5/k − 4/(k(2k−1)) − 10/(k(2k−1)²) − 4/(k(2k−1)³)`.
pub fn closed_form_phi(k: usize) -> Result<Q> {
    let k = check_rank(k)?;
    let r = 2 * k - 1;
    Ok(qi(1) + q(5, k) - q(4, k * r) - q(10, k * r * r) - q(4, k * r * r * r))
}

/// The closed form `1 + 4/k − 6/(k(2k−1)) + 2/(k(2k−1)²) − 2/(k(2k−1)³) + 2/(k(2k−1)⁴)`
/// proposed for `λ_A(φ⁻¹)`. It disagrees with the exact value at every rank
/// (169/81 against 341/162 at `k = 2`); see
/// [`closed_form_phi_inverse_corrected`].
pub fn closed_form_phi_inverse(k: usize) -> Result<Q> {
    let k = check_rank(k)?;
    let r = 2 * k - 1;
    Ok(qi(1) + q(4, k) - q(6, k * r) + q(2, k * r * r) - q(2, k * r * r * r) + q(2, k * r * r * r * r))
}

/// `λ_A(φ⁻¹)` from the length identity
/// `|φ⁻¹w| = |w| + 3n(a) + 2n(b) − 6n(ab) − 4n(ba) + 4n(aba) + 2n(bab)
///  − 2n(abab) − 2n(baba) + 2n(ababa)`
/// evaluated at uniform frequencies:
/// `1 + 5/k − 10/(k(2k−1)) + 6/(k(2k−1)²) − 4/(k(2k−1)³) + 2/(k(2k−1)⁴)`.
pub fn closed_form_phi_inverse_corrected(k: usize) -> Result<Q> {
    let k = check_rank(k)?;
    let r = 2 * k - 1;
    Ok(qi(1) + q(5, k) - q(10, k * r) + q(6, k * r * r) - q(4, k * r * r * r) + q(2, k * r * r * r * r))
}

#[derive(Clone, Debug)]
pub struct MonteCarlo {
    pub mean: f64,
    /// Sample standard deviation over `√trials`; `None` for a single trial.
    pub stderr: Option<f64>,
    pub samples: Vec<f64>,
}

/// Mean over `trials` of `ℓ'(w) / |w|` for independent uniform random
/// reduced words `w` of length `n` (cyclic lengths on both sides).
pub fn generic_stretch_mc(spec: &PulledBackLength, n: usize, trials: usize, seed: u64) -> Result<MonteCarlo> {
    if n < 1000 {
        return Err(Error::invalid(format!("word length must be at least 1000, got {n}")));
    }
    if trials == 0 {
        return Err(Error::invalid("at least one trial is required"));
    }
    let source = spec.source();
    if !source.is_bouquet() {
        return Err(Error::Unsupported("sampling is over a free basis (bouquet source)".into()));
    }
    let alphabet = source.alphabet();
    let samples: Vec<f64> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let w = random_reduced_word(&alphabet, n, &mut trial_rng(seed, t)).expect("n >= 1000");
            let c = CyclicWord::from_word(&w).expect("long random words are nontrivial");
            rational::to_f64(&spec.length(&c)) / c.len() as f64
        })
        .collect();
    let mean = samples.iter().sum::<f64>() / trials as f64;
    let stderr = (trials > 1).then(|| {
        let var = samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (trials - 1) as f64;
        (var / trials as f64).sqrt()
    });
    Ok(MonteCarlo { mean, stderr, samples })
}

/// `δ(x) = I(ℓ', x) / I(ℓ, x)` with both lengths evaluated through their
/// local formulas on `x`.
pub fn distortion(x: &LevelVector, numerator: &PulledBackLength, denominator: &PulledBackLength, opts: &TableOptions) -> Result<Q> {
    if x.is_zero() {
        return Err(Error::ZeroCurrent);
    }
    let evaluate = |spec: &PulledBackLength| -> Result<Q> {
        if **spec.source() != **x.chart() {
            return Err(Error::ChartMismatch(format!("length defined on {}, current on {}", spec.source(), x.chart())));
        }
        length_local_formula(spec, opts)?.evaluate_length(x)
    };
    let den = evaluate(denominator)?;
    assert!(den.is_positive(), "positive metrics pair positively with nonzero currents");
    Ok(evaluate(numerator)? / den)
}

/// Directed graph with a numerator weight and a positive denominator weight
/// per edge.
#[derive(Clone, Debug)]
pub struct RatioGraph {
    pub nodes: usize,
    /// `(tail, head, weight, time)`
    pub edges: Vec<(usize, usize, Q, Q)>,
}

impl RatioGraph {
    fn out_lists(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.nodes];
        for (i, e) in self.edges.iter().enumerate() {
            out[e.0].push(i);
        }
        out
    }

    fn negated(&self) -> RatioGraph {
        let edges = self.edges.iter().map(|(a, b, f, t)| (*a, *b, -f, t.clone())).collect();
        RatioGraph { nodes: self.nodes, edges }
    }
}

/// Minimum cycle ratio `Σf / Σt` by exact policy iteration. Every node must
/// have an outgoing edge. Returns the optimum and the edges of an optimal
/// simple cycle in order.
pub fn min_ratio_cycle(g: &RatioGraph) -> Result<(Q, Vec<usize>)> {
    let out = g.out_lists();
    if let Some(v) = out.iter().position(Vec::is_empty) {
        return Err(Error::invalid(format!("node {v} has no outgoing edge")));
    }
    let ratio = |e: usize| &g.edges[e].2 / &g.edges[e].3;
    let mut policy: Vec<usize> = out
        .iter()
        .map(|es| {
            let mut best = es[0];
            for &e in &es[1..] {
                if ratio(e) < ratio(best) {
                    best = e;
                }
            }
            best
        })
        .collect();
    loop {
        let (eta, h) = evaluate_policy(g, &policy);
        let mut changed = false;
        for v in 0..g.nodes {
            let mut best = policy[v];
            for &e in &out[v] {
                if eta[g.edges[e].1] < eta[g.edges[best].1] {
                    best = e;
                }
            }
            if eta[g.edges[best].1] < eta[v] {
                policy[v] = best;
                changed = true;
            }
        }
        if changed {
            continue;
        }
        for v in 0..g.nodes {
            let value = |e: usize| {
                let (_, w, f, t) = &g.edges[e];
                f - &eta[v] * t + &h[*w]
            };
            let mut best = policy[v];
            let mut best_value = value(best);
            for &e in &out[v] {
                if eta[g.edges[e].1] != eta[v] {
                    continue;
                }
                let val = value(e);
                if val < best_value {
                    best = e;
                    best_value = val;
                }
            }
            if best != policy[v] && best_value < h[v] {
                policy[v] = best;
                changed = true;
            }
        }
        if !changed {
            let start = (0..g.nodes).min_by(|&a, &b| eta[a].cmp(&eta[b])).expect("nonempty graph");
            let cycle = policy_cycle(g, &policy, start);
            return Ok((eta[start].clone(), cycle));
        }
    }
}

/// Cycle ratio `η` reached from each node and the bias `h` under `policy`.
fn evaluate_policy(g: &RatioGraph, policy: &[usize]) -> (Vec<Q>, Vec<Q>) {
    let n = g.nodes;
    let succ: Vec<usize> = policy.iter().map(|&e| g.edges[e].1).collect();
    let mut eta: Vec<Option<Q>> = vec![None; n];
    let mut h: Vec<Option<Q>> = vec![None; n];
    // 0 = unseen, 1 = on current walk, 2 = done
    let mut state = vec![0u8; n];
    for s in 0..n {
        if state[s] != 0 {
            continue;
        }
        let mut walk = Vec::new();
        let mut v = s;
        while state[v] == 0 {
            state[v] = 1;
            walk.push(v);
            v = succ[v];
        }
        if state[v] == 1 {
            // new cycle starting at v
            let pos = walk.iter().position(|&x| x == v).expect("on walk");
            let cycle = &walk[pos..];
            let (f, t) = cycle.iter().fold((Q::zero(), Q::zero()), |(f, t), &x| {
                let e = &g.edges[policy[x]];
                (f + &e.2, t + &e.3)
            });
            let r = f / t;
            let root = *cycle.iter().min().expect("nonempty cycle");
            let rp = cycle.iter().position(|&x| x == root).expect("root on cycle");
            h[root] = Some(Q::zero());
            eta[root] = Some(r.clone());
            // walk the cycle backwards from the root
            for i in 1..cycle.len() {
                let x = cycle[(rp + cycle.len() - i) % cycle.len()];
                let e = &g.edges[policy[x]];
                let hv = &e.2 - &r * &e.3 + h[succ[x]].as_ref().expect("successor done");
                h[x] = Some(hv);
                eta[x] = Some(r.clone());
            }
            for &x in cycle {
                state[x] = 2;
            }
            walk.truncate(pos);
        }
        for &x in walk.iter().rev() {
            let e = &g.edges[policy[x]];
            let r = eta[succ[x]].clone().expect("successor done");
            let hv = &e.2 - &r * &e.3 + h[succ[x]].as_ref().expect("successor done");
            h[x] = Some(hv);
            eta[x] = Some(r);
            state[x] = 2;
        }
    }
    (
        eta.into_iter().map(|x| x.expect("all nodes evaluated")).collect(),
        h.into_iter().map(|x| x.expect("all nodes evaluated")).collect(),
    )
}

fn policy_cycle(g: &RatioGraph, policy: &[usize], start: usize) -> Vec<usize> {
    let mut seen = vec![false; g.nodes];
    let mut v = start;
    while !seen[v] {
        seen[v] = true;
        v = g.edges[policy[v]].1;
    }
    let mut cycle = Vec::new();
    let first = v;
    loop {
        cycle.push(policy[v]);
        v = g.edges[policy[v]].1;
        if v == first {
            return cycle;
        }
    }
}

/// A cycle ratio with the edge sequence attaining it.
pub type RatioWitness = (Q, Vec<usize>);

/// Minimum and maximum cycle ratio over all simple cycles by exhaustive
/// enumeration; an oracle for [`min_ratio_cycle`] on small graphs.
pub fn brute_force_ratio_extrema(g: &RatioGraph) -> Option<(RatioWitness, RatioWitness)> {
    let out = g.out_lists();
    let mut best: Option<(RatioWitness, RatioWitness)> = None;
    fn dfs(
        g: &RatioGraph,
        out: &[Vec<usize>],
        start: usize,
        v: usize,
        on_path: &mut Vec<bool>,
        path: &mut Vec<usize>,
        best: &mut Option<(RatioWitness, RatioWitness)>,
    ) {
        for &e in &out[v] {
            let w = g.edges[e].1;
            if w == start {
                path.push(e);
                let (f, t) = path.iter().fold((Q::zero(), Q::zero()), |(f, t), &e| (f + &g.edges[e].2, t + &g.edges[e].3));
                let r = f / t;
                match best {
                    None => *best = Some(((r.clone(), path.clone()), (r, path.clone()))),
                    Some((lo, hi)) => {
                        if r < lo.0 {
                            *lo = (r.clone(), path.clone());
                        }
                        if r > hi.0 {
                            *hi = (r, path.clone());
                        }
                    }
                }
                path.pop();
            } else if w > start && !on_path[w] {
                on_path[w] = true;
                path.push(e);
                dfs(g, out, start, w, on_path, path, best);
                path.pop();
                on_path[w] = false;
            }
        }
    }
    let mut on_path = vec![false; g.nodes];
    for s in 0..g.nodes {
        on_path[s] = true;
        dfs(g, &out, s, s, &mut on_path, &mut Vec::new(), &mut best);
        on_path[s] = false;
    }
    best
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatioCycleResult {
    pub optimum: Q,
    pub witness: CyclicWord,
    /// `δ` of the witness, equal to `optimum` whenever `exact` holds.
    pub witness_value: Q,
    pub level: usize,
    /// True when the level reaches the table window, so the optimum is
    /// global; otherwise `optimum` is only an outer bound.
    pub exact: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Extrema {
    pub min: RatioCycleResult,
    pub max: RatioCycleResult,
}

/// The de Bruijn-style graph of `S(level)` with weights from a length table
/// and denominators from a metric on the (bouquet) source.
pub struct DistortionGraph {
    pub level: usize,
    pub paths: Vec<Path>,
    pub graph: RatioGraph,
    pub graph_max: RatioGraph,
}

/// Builds the ratio graph at `level`. When the level is below the table
/// window each edge carries the minimum (resp. maximum) of `d'` over its
/// extensions, which bounds the true extrema from outside.
pub fn distortion_graph(table: &LocalFormulaTable, denominator: &Metric, level: usize) -> Result<DistortionGraph> {
    let chart = table.map().source().clone();
    if level < 2 {
        return Err(Error::invalid("the path graph needs level at least 2"));
    }
    let k = table.window();
    let nodes = chart.paths(level - 1);
    let index: std::collections::BTreeMap<&[Letter], usize> =
        nodes.iter().enumerate().map(|(i, p)| (p.as_slice(), i)).collect();
    let paths = chart.paths(level);
    let mut edges = Vec::with_capacity(paths.len());
    let mut edges_max = Vec::with_capacity(paths.len());
    let d_of = |u: &[Letter]| table.d(u).expect("window from the source chart");
    let ext_bounds = |v: &[Letter]| -> (Q, Q) {
        if v.len() >= k {
            let d = d_of(&v[..k]);
            return (d.clone(), d);
        }
        let mut lo: Option<Q> = None;
        let mut hi: Option<Q> = None;
        chart.for_each_path(k, &mut |u| {
            if u.starts_with(v) {
                let d = d_of(u);
                if lo.as_ref().is_none_or(|l| d < *l) {
                    lo = Some(d.clone());
                }
                if hi.as_ref().is_none_or(|h| d > *h) {
                    hi = Some(d);
                }
            }
        });
        (lo.expect("extensions exist"), hi.expect("extensions exist"))
    };
    for v in &paths {
        let tail = index[&v[..level - 1]];
        let head = index[&v[1..]];
        let t = denominator.length(v[0]).clone();
        let (lo, hi) = ext_bounds(v);
        edges.push((tail, head, lo, t.clone()));
        edges_max.push((tail, head, hi, t));
    }
    Ok(DistortionGraph {
        level,
        paths,
        graph: RatioGraph { nodes: nodes.len(), edges },
        graph_max: RatioGraph { nodes: nodes.len(), edges: edges_max },
    })
}

/// Extrema of `δ = ℓ'/ℓ` over projectivized currents, with `ℓ` a metric on
/// the source bouquet of `numerator`. The level is raised to the table
/// window unless `strict` is set.
pub fn distortion_extrema(
    numerator: &PulledBackLength,
    denominator: &Metric,
    level: usize,
    strict: bool,
    opts: &TableOptions,
) -> Result<Extrema> {
    let chart = numerator.source().clone();
    if !chart.is_bouquet() {
        return Err(Error::Unsupported("distortion extrema are computed over a bouquet".into()));
    }
    if denominator.lengths().len() != chart.edge_count() {
        return Err(Error::ChartMismatch("denominator metric does not match the source chart".into()));
    }
    let table = length_local_formula(numerator, opts)?;
    let m = if strict { level.max(2) } else { level.max(2).max(table.window()) };
    let exact = m >= table.window();
    let dg = distortion_graph(&table, denominator, m)?;
    let den = PulledBackLength::new(crate::pairing::PathMap::identity(&chart), denominator.clone())?;
    let witness = |cycle: &[usize]| -> Result<(CyclicWord, Q)> {
        let coords = cycle.iter().map(|&e| (dg.paths[e].clone(), rational::one())).collect();
        let x = LevelVector::new(chart.clone(), m, coords)?;
        let w = realize_integer_point(&x)?;
        let value = numerator.length(&w) / den.length(&w);
        Ok((w, value))
    };
    let (lo, lo_cycle) = min_ratio_cycle(&dg.graph)?;
    let (neg_hi, hi_cycle) = min_ratio_cycle(&dg.graph_max.negated())?;
    let (wlo, vlo) = witness(&lo_cycle)?;
    let (whi, vhi) = witness(&hi_cycle)?;
    if exact {
        debug_assert_eq!(vlo, lo);
        debug_assert_eq!(vhi, -neg_hi.clone());
    }
    Ok(Extrema {
        min: RatioCycleResult { optimum: lo, witness: wlo, witness_value: vlo, level: m, exact },
        max: RatioCycleResult { optimum: -neg_hi, witness: whi, witness_value: vhi, level: m, exact },
    })
}

#[allow(clippy::large_enum_variant)]
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TeqOutcome {
    /// A length function separating the pair: `ℓ(ψ g) ≠ ℓ(ψ h)`.
    Falsified {
        trial: u64,
        automorphism: Endomorphism,
        chart: Arc<Chart>,
        metric: Metric,
        lengths: (Q, Q),
    },
    /// No sampled length function separated the pair. This is evidence,
    /// not a proof of translation equivalence.
    PassedAllTrials { trials: u64 },
}

/// Samples length functions `g ↦ ℓ(ψ g)` with `ψ` a random Nielsen product
/// of length at most 30 and `ℓ` a random metric (edge lengths `p/q`,
/// `1 ≤ p, q ≤ 20`) on a random built-in chart of the right rank.
pub fn translation_equiv_test(g: &Word, h: &Word, k: usize, trials: u64, seed: u64) -> Result<TeqOutcome> {
    let alphabet = Alphabet::new(k)?;
    alphabet.check(g.letters())?;
    alphabet.check(h.letters())?;
    if g.is_empty() || h.is_empty() {
        return Err(Error::invalid("both elements must be nontrivial"));
    }
    let charts: Vec<Arc<Chart>> = Chart::builtins_for_rank(k).into_iter().map(Arc::new).collect();
    let results: Vec<Option<TeqOutcome>> = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<Option<TeqOutcome>> {
            let mut rng = trial_rng(seed, t);
            let psi = random_nielsen(k, 30, &mut rng)?;
            let chart = charts[rng.gen_range(0..charts.len())].clone();
            let lengths = (0..chart.edge_count())
                .map(|_| q(rng.gen_range(1..=20), rng.gen_range(1..=20)))
                .collect();
            let metric = Metric::new(&chart, lengths)?;
            let lg = chart.hyperbolic_length(&metric, &psi.apply(g)?);
            let lh = chart.hyperbolic_length(&metric, &psi.apply(h)?);
            Ok((lg != lh).then_some(TeqOutcome::Falsified { trial: t, automorphism: psi, chart, metric, lengths: (lg, lh) }))
        })
        .collect::<Result<_>>()?;
    Ok(results
        .into_iter()
        .flatten()
        .next()
        .unwrap_or(TeqOutcome::PassedAllTrials { trials }))
}

/// Shorthand for `ℓ_A ∘ f` on the rank-`k` bouquet.
pub fn pullback(f: &Endomorphism) -> Result<PulledBackLength> {
    PulledBackLength::of_endomorphism(f)
}
