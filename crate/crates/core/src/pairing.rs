//! The intersection form, local formulas and pushforward of currents.
//!
//! A [`PathMap`] sends each oriented edge of a source chart to a reduced
//! path in a target chart. A [`LocalFormulaTable`] expresses occurrence
//! counts in the image of a cyclic word through occurrence counts of windows
//! `u` of length `K` in the word itself:
//!
//! For a window `u = u_0 … u_{K-1}` let `Q_j` be the reduced image of its
//! first `j` letters and `G = Q_K`. The position `p_j = lcp(Q_j, G)` is where
//! the image of the prefix leaves the local geodesic `G`. The window's anchor
//! letter `u_A` is credited with the positions `P_A ≤ s < P_{A+1}` of `G`,
//! where `P_j = max(p_0, …, p_j)`, and with every target path starting at
//! such a position. The pair `(K, A)` is chosen adaptively: the first pair
//! whose table reproduces the brute-force counts on a fixed corpus is kept.

use std::collections::BTreeMap;
use std::sync::Arc;

use num::Zero;
use serde_json::{json, Value};

use crate::charts::{Chart, Circuit, Metric};
use crate::currents::{project, LevelVector, Path};
use crate::error::{Error, Result};
use crate::morphisms::Endomorphism;
use crate::rational::Q;
use crate::words::{
    all_cyclic_words, inverse_letters, necklace_windows, push_reduced, random_cyclic_word, trial_rng,
    CyclicWord, Letter, Word,
};

/// `I(ℓ, ν) = Σ_e ℓ(e) ⟨e, ν⟩`.
pub fn intersection_form(chart: &Chart, metric: &Metric, x: &LevelVector) -> Result<Q> {
    if **x.chart() != *chart {
        return Err(Error::ChartMismatch(format!("metric lives on {}, current on {}", chart, x.chart())));
    }
    Ok(x.coords().iter().fold(Q::zero(), |acc, (v, c)| acc + metric.length(*v.last().expect("nonempty")) * c))
}

/// A graph map given on oriented edges; the image of a reversed edge is the
/// reversed image.
#[derive(Clone, Debug)]
pub struct PathMap {
    source: Arc<Chart>,
    target: Arc<Chart>,
    images: Vec<Vec<Letter>>,
}

impl PathMap {
    /// `images[e]` is the image of edge `e` traversed forward.
    pub fn new(source: Arc<Chart>, target: Arc<Chart>, images: Vec<Vec<Letter>>) -> Result<Self> {
        if images.len() != source.edge_count() {
            return Err(Error::invalid("one image per source edge is required"));
        }
        for p in &images {
            if !p.is_empty() && !target.is_reduced_path(p) {
                return Err(Error::invalid(format!("image '{}' is not a reduced path", target.format_path(p))));
            }
        }
        let images = images.into_iter().flat_map(|p| [p.clone(), inverse_letters(&p)]).collect();
        Ok(PathMap { source, target, images })
    }

    /// A bouquet-to-bouquet map from generator images.
    pub fn from_endomorphism(f: &Endomorphism) -> Result<Self> {
        let source = Arc::new(Chart::bouquet(f.domain_rank().max(2))?);
        let target = Arc::new(Chart::bouquet(f.codomain_rank())?);
        if f.domain_rank() != source.rank() {
            return Err(Error::Unsupported("maps from rank 1 need an explicit source chart".into()));
        }
        PathMap::new(source, target, f.images().iter().map(|w| w.letters().to_vec()).collect())
    }

    /// Collapses the tree: a chart onto the bouquet of its marking.
    pub fn chart_to_bouquet(chart: &Arc<Chart>) -> Result<Self> {
        let target = Arc::new(Chart::bouquet(chart.rank())?);
        let images = (0..chart.edge_count())
            .map(|e| chart.generator_letter(Letter::generator(e)).into_iter().collect())
            .collect();
        PathMap::new(chart.clone(), target, images)
    }

    /// Sends each generator petal to its basis loop in `chart`.
    pub fn bouquet_to_chart(chart: &Arc<Chart>) -> Result<Self> {
        let source = Arc::new(Chart::bouquet(chart.rank())?);
        let images = (0..chart.rank()).map(|g| chart.basis_loop(g).to_vec()).collect();
        PathMap::new(source, chart.clone(), images)
    }

    pub fn identity(chart: &Arc<Chart>) -> Self {
        let images = (0..chart.edge_count()).map(|e| vec![Letter::generator(e)]).collect();
        PathMap::new(chart.clone(), chart.clone(), images).expect("identity is a valid map")
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &PathMap) -> Result<PathMap> {
        if *inner.target != *self.source {
            return Err(Error::ChartMismatch(format!("cannot compose: {} vs {}", inner.target, self.source)));
        }
        let images = (0..inner.source.edge_count())
            .map(|e| self.apply_path(inner.image(Letter::generator(e))))
            .collect();
        PathMap::new(inner.source.clone(), self.target.clone(), images)
    }

    pub fn source(&self) -> &Arc<Chart> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Chart> {
        &self.target
    }

    pub fn image(&self, l: Letter) -> &[Letter] {
        &self.images[l.0 as usize]
    }

    pub fn apply_path(&self, p: &[Letter]) -> Vec<Letter> {
        let mut out = Vec::new();
        for &l in p {
            for &x in self.image(l) {
                push_reduced(&mut out, x);
            }
        }
        out
    }

    pub fn apply_circuit(&self, c: &Circuit) -> Option<Circuit> {
        Circuit::from_closed_path(&self.target, &self.apply_path(c.edges()))
    }

    /// The induced homomorphism in the two markings.
    pub fn to_endomorphism(&self) -> Result<Endomorphism> {
        let images = (0..self.source.rank())
            .map(|g| {
                let p = self.apply_path(self.source.basis_loop(g));
                let w: Vec<Letter> = p.iter().filter_map(|&l| self.target.generator_letter(l)).collect();
                Word::from_letters(&w)
            })
            .collect();
        Endomorphism::new(self.source.rank(), self.target.rank(), images)
    }

    pub fn is_injective(&self) -> bool {
        self.to_endomorphism().map(|f| f.is_injective()).unwrap_or(false)
    }
}

/// Validation corpus and search limits for [`LocalFormulaTable::build`].
#[derive(Clone, Debug)]
pub struct TableOptions {
    pub max_window: usize,
    /// All cyclic words up to this length; `None` picks the largest length
    /// with at most 20000 reduced words.
    pub small_len: Option<usize>,
    pub random_words: usize,
    pub random_max_len: usize,
    pub seed: u64,
}

impl Default for TableOptions {
    fn default() -> Self {
        TableOptions { max_window: 12, small_len: None, random_words: 1000, random_max_len: 200, seed: 0x5eed }
    }
}

struct Segment {
    image: Vec<Letter>,
    start: usize,
    end: usize,
}

#[derive(Clone, Debug)]
pub struct LocalFormulaTable {
    map: PathMap,
    window: usize,
    anchor: usize,
    target_len: usize,
    metric: Option<Metric>,
}

impl LocalFormulaTable {
    /// Searches `(K, A)` in increasing order and keeps the first pair whose
    /// table reproduces `⟨v, map(w)⟩` for every target path `v` of length
    /// `target_len` on the corpus.
    pub fn build(map: &PathMap, target_len: usize, opts: &TableOptions) -> Result<Self> {
        if target_len == 0 {
            return Err(Error::invalid("target paths must have length at least 1"));
        }
        if !map.is_injective() {
            return Err(Error::NotInjective(format!("{}", map.to_endomorphism()?)));
        }
        let corpus = Corpus::new(map, target_len, opts);
        for window in 1..=opts.max_window {
            for anchor in 0..window {
                let table = LocalFormulaTable { map: map.clone(), window, anchor, target_len, metric: None };
                if corpus.accepts(&table) {
                    return Ok(table);
                }
            }
        }
        Err(Error::WindowExhausted { max_window: opts.max_window })
    }

    /// A table for an explicit `(K, A)`, checked against the same corpus.
    pub fn with_window(map: &PathMap, target_len: usize, window: usize, anchor: usize, opts: &TableOptions) -> Result<Self> {
        if anchor >= window {
            return Err(Error::invalid("anchor must lie inside the window"));
        }
        let table = LocalFormulaTable { map: map.clone(), window, anchor, target_len, metric: None };
        if Corpus::new(map, target_len, opts).accepts(&table) {
            Ok(table)
        } else {
            Err(Error::WindowExhausted { max_window: window })
        }
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn anchor(&self) -> usize {
        self.anchor
    }

    pub fn target_len(&self) -> usize {
        self.target_len
    }

    pub fn map(&self) -> &PathMap {
        &self.map
    }

    pub fn metric(&self) -> Option<&Metric> {
        self.metric.as_ref()
    }

    fn segment(&self, u: &[Letter]) -> Segment {
        let mut prefixes: Vec<Vec<Letter>> = Vec::with_capacity(u.len() + 1);
        prefixes.push(Vec::new());
        for &l in u {
            let mut next = prefixes.last().expect("nonempty").clone();
            for &x in self.map.image(l) {
                push_reduced(&mut next, x);
            }
            prefixes.push(next);
        }
        let image = prefixes.pop().expect("window is nonempty");
        prefixes.push(image.clone());
        let lcp = |q: &[Letter]| q.iter().zip(&image).take_while(|(a, b)| a == b).count();
        let start = prefixes[..=self.anchor].iter().map(|q| lcp(q)).max().unwrap_or(0);
        let end = start.max(lcp(&prefixes[self.anchor + 1]));
        Segment { image, start, end }
    }

    /// Target paths of length `r` credited to window `u`; `None` when a
    /// credited path runs past the local image.
    fn credited(&self, u: &[Letter], r: usize, mut f: impl FnMut(&[Letter])) -> bool {
        let seg = self.segment(u);
        for s in seg.start..seg.end {
            if s + r > seg.image.len() {
                return false;
            }
            f(&seg.image[s..s + r]);
        }
        true
    }

    /// `C(u, v)` for all target paths `v` of length `r ≤ target_len`.
    pub fn coefficients(&self, u: &[Letter], r: usize) -> Result<BTreeMap<Path, u64>> {
        self.check_window(u)?;
        if r == 0 || r > self.target_len {
            return Err(Error::invalid(format!("table covers target lengths 1..={}", self.target_len)));
        }
        let mut out: BTreeMap<Path, u64> = BTreeMap::new();
        let ok = self.credited(u, r, |v| *out.entry(v.to_vec()).or_default() += 1);
        debug_assert!(ok, "validated tables never overrun");
        Ok(out)
    }

    fn check_window(&self, u: &[Letter]) -> Result<()> {
        if u.len() != self.window || !self.map.source.is_reduced_path(u) {
            return Err(Error::invalid(format!(
                "'{}' is not a source path of length {}",
                self.map.source.format_path(u),
                self.window
            )));
        }
        Ok(())
    }

    /// Attaches a metric on the target chart, making `d(u)` available.
    pub fn with_metric(mut self, metric: Metric) -> Result<Self> {
        if metric.lengths().len() != self.map.target.edge_count() {
            return Err(Error::ChartMismatch("metric does not match the target chart".into()));
        }
        self.metric = Some(metric);
        Ok(self)
    }

    /// `d(u) = Σ_e ℓ(e) C(u, e)`.
    pub fn d(&self, u: &[Letter]) -> Result<Q> {
        self.check_window(u)?;
        let metric = self.metric.as_ref().ok_or_else(|| Error::invalid("table carries no metric"))?;
        let seg = self.segment(u);
        Ok(metric.path_length(&seg.image[seg.start..seg.end]))
    }

    /// `⟨v, φ_* ν⟩ = Σ_u C(u, v) ⟨u, ν⟩` for all `v` of length `target_len`.
    pub fn pushforward(&self, x: &LevelVector) -> Result<LevelVector> {
        if **x.chart() != *self.map.source {
            return Err(Error::ChartMismatch(format!("table source {} vs current on {}", self.map.source, x.chart())));
        }
        if x.level() < self.window {
            return Err(Error::LevelTooLow { needed: self.window, got: x.level() });
        }
        let mut y = x.clone();
        while y.level() > self.window {
            y = project(&y)?;
        }
        let mut coords: BTreeMap<Path, Q> = BTreeMap::new();
        for (u, c) in y.coords() {
            let ok = self.credited(u, self.target_len, |v| {
                *coords.entry(v.to_vec()).or_insert_with(Q::zero) += c;
            });
            if !ok {
                return Err(Error::WindowExhausted { max_window: self.window });
            }
        }
        LevelVector::new(self.map.target.clone(), self.target_len, coords)
    }

    /// `Σ_u d(u) ⟨u, ν⟩`.
    pub fn evaluate_length(&self, x: &LevelVector) -> Result<Q> {
        let metric = self.metric.as_ref().ok_or_else(|| Error::invalid("table carries no metric"))?;
        let pushed = self.pushforward(x)?;
        intersection_form(&self.map.target, metric, &pushed)
    }

    pub fn to_json(&self) -> Value {
        let src = &self.map.source;
        let tgt = &self.map.target;
        let mut coeffs = Vec::new();
        let mut ds = Vec::new();
        src.for_each_path(self.window, &mut |u| {
            let row = self.coefficients(u, self.target_len).expect("window from the source chart");
            for (v, c) in row {
                coeffs.push(json!({"u": src.format_path(u), "v": tgt.format_path(&v), "c": c}));
            }
            if self.metric.is_some() {
                let d = self.d(u).expect("metric present");
                ds.push(json!({"u": src.format_path(u), "d": d.to_string()}));
            }
        });
        let mut out = json!({
            "window_K": self.window,
            "anchor": self.anchor,
            "target_len": self.target_len,
            "source": src.to_json_ref(),
            "target": tgt.to_json_ref(),
            "coeffs": coeffs,
        });
        if self.metric.is_some() {
            out["d"] = json!(ds);
        }
        out
    }
}

struct Corpus {
    circuits: Vec<Circuit>,
    // multiset of length-r paths on each image necklace
    expected: Vec<BTreeMap<Path, u64>>,
    r: usize,
}

impl Corpus {
    fn new(map: &PathMap, r: usize, opts: &TableOptions) -> Self {
        let source = &map.source;
        let alphabet = source.alphabet();
        let size = alphabet.size() as u64;
        let small_len = opts.small_len.unwrap_or_else(|| {
            let mut l = 1;
            while size * (size - 1).pow(l as u32) <= 20_000 {
                l += 1;
            }
            l
        });
        let mut words = all_cyclic_words(&alphabet, small_len);
        let mut rng = trial_rng(opts.seed, 0);
        words.extend((0..opts.random_words).map(|_| random_cyclic_word(&alphabet, opts.random_max_len, &mut rng)));
        let mut circuits = Vec::with_capacity(words.len());
        let mut expected = Vec::with_capacity(words.len());
        for w in &words {
            let c = source.word_to_circuit(w);
            let image = map.apply_circuit(&c).expect("injective maps keep classes nontrivial");
            let mut counts: BTreeMap<Path, u64> = BTreeMap::new();
            necklace_windows(image.edges(), r, |v| *counts.entry(v.to_vec()).or_default() += 1);
            circuits.push(c);
            expected.push(counts);
        }
        Corpus { circuits, expected, r }
    }

    fn accepts(&self, table: &LocalFormulaTable) -> bool {
        let k = table.window;
        let mut u = Vec::with_capacity(k);
        for (c, expected) in self.circuits.iter().zip(&self.expected) {
            let e = c.edges();
            let n = e.len();
            let mut got: BTreeMap<Path, u64> = BTreeMap::new();
            for i in 0..n {
                u.clear();
                u.extend((0..k).map(|j| e[(i + j + n * k - table.anchor) % n]));
                if !table.credited(&u, self.r, |v| *got.entry(v.to_vec()).or_default() += 1) {
                    return false;
                }
            }
            if got != *expected {
                return false;
            }
        }
        true
    }
}

/// Length function `g ↦ ℓ(map(g))` for a metric `ℓ` on the target chart.
#[derive(Clone, Debug)]
pub struct PulledBackLength {
    pub map: PathMap,
    pub metric: Metric,
}

impl PulledBackLength {
    pub fn new(map: PathMap, metric: Metric) -> Result<Self> {
        if metric.lengths().len() != map.target.edge_count() {
            return Err(Error::ChartMismatch("metric does not match the target chart".into()));
        }
        Ok(PulledBackLength { map, metric })
    }

    /// `ℓ_A ∘ f` on the bouquet.
    pub fn of_endomorphism(f: &Endomorphism) -> Result<Self> {
        let map = PathMap::from_endomorphism(f)?;
        let metric = Metric::simplicial(&map.target);
        Ok(PulledBackLength { map, metric })
    }

    /// A metric on a chart, read on the bouquet of its marking.
    pub fn of_chart(chart: &Arc<Chart>, metric: Metric) -> Result<Self> {
        PulledBackLength::new(PathMap::bouquet_to_chart(chart)?, metric)
    }

    pub fn source(&self) -> &Arc<Chart> {
        &self.map.source
    }

    /// Direct evaluation on a conjugacy class of the source.
    pub fn length(&self, w: &CyclicWord) -> Q {
        let c = self.map.source.word_to_circuit(w);
        match self.map.apply_circuit(&c) {
            Some(image) => self.metric.path_length(image.edges()),
            None => Q::zero(),
        }
    }

    pub fn length_of_word(&self, g: &Word) -> Q {
        CyclicWord::from_word(g).map(|w| self.length(&w)).unwrap_or_else(Q::zero)
    }
}

/// Table with `d(u)` coefficients such that `ℓ'(g) = Σ_u d(u) ⟨u, g⟩`.
pub fn length_local_formula(spec: &PulledBackLength, opts: &TableOptions) -> Result<LocalFormulaTable> {
    LocalFormulaTable::build(&spec.map, 1, opts)?.with_metric(spec.metric.clone())
}

/// `φ_* x` at level `m`, building the table on the fly.
pub fn pushforward(map: &PathMap, x: &LevelVector, m: usize, opts: &TableOptions) -> Result<LevelVector> {
    LocalFormulaTable::build(map, m, opts)?.pushforward(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::currents::{extend_to_level, rational_current, uniform_current};
    use crate::rational::{self, q, qi};
    use crate::words::{count_occurrences, symmetric_count, Alphabet};

    fn quick() -> TableOptions {
        TableOptions { random_words: 200, random_max_len: 60, ..TableOptions::default() }
    }

    fn cw(s: &str) -> CyclicWord {
        s.parse().unwrap()
    }

    fn b2() -> Arc<Chart> {
        Arc::new(Chart::bouquet(2).unwrap())
    }

    #[test]
    fn intersection_form_examples() {
        let c = b2();
        let simp = Metric::simplicial(&c);
        let x = rational_current(&c, &cw("abAB"), 2).unwrap();
        assert_eq!(intersection_form(&c, &simp, &x).unwrap(), qi(4));
        let m = Metric::new(&c, vec![qi(1), qi(2)]).unwrap();
        let y = rational_current(&c, &cw("ab"), 1).unwrap();
        assert_eq!(intersection_form(&c, &m, &y).unwrap(), qi(3));
        assert_eq!(intersection_form(&c, &simp, &uniform_current(&c, 3).unwrap()).unwrap(), qi(1));
        let err = intersection_form(&Chart::theta(), &Metric::simplicial(&Chart::theta()), &x).unwrap_err();
        assert_eq!(err.name(), "ChartMismatch");
    }

    #[test]
    fn intersection_form_is_linear_and_homogeneous() {
        let c = b2();
        let m = Metric::new(&c, vec![q(3, 2), q(5, 7)]).unwrap();
        let x = rational_current(&c, &cw("abbA"), 2).unwrap();
        let y = rational_current(&c, &cw("aBaB"), 2).unwrap();
        let sum = intersection_form(&c, &m, &x.add(&y).unwrap()).unwrap();
        assert_eq!(sum, intersection_form(&c, &m, &x).unwrap() + intersection_form(&c, &m, &y).unwrap());
        let r = q(7, 3);
        assert_eq!(
            intersection_form(&c, &m.scaled(&r), &x).unwrap(),
            intersection_form(&c, &m, &x).unwrap() * &r
        );
    }

    #[test]
    fn identity_table_is_trivial() {
        let c = b2();
        let t = LocalFormulaTable::build(&PathMap::identity(&c), 1, &quick()).unwrap();
        assert_eq!((t.window(), t.anchor()), (1, 0));
        let t2 = LocalFormulaTable::build(&PathMap::identity(&c), 3, &quick()).unwrap();
        let u = c.parse_path("abA").unwrap();
        let row = t2.coefficients(&u, 3).unwrap();
        assert_eq!(row, BTreeMap::from([(u.clone(), 1)]));
    }

    #[test]
    fn tau_table_reproduces_length_identity() {
        let spec = PulledBackLength::of_endomorphism(&Endomorphism::tau(2).unwrap()).unwrap();
        let t = length_local_formula(&spec, &quick()).unwrap();
        let alphabet = Alphabet::new(2).unwrap();
        let c = b2();
        let mut rng = trial_rng(20, 0);
        let (b, ba) = ("b".parse::<Word>().unwrap(), "bA".parse::<Word>().unwrap());
        for _ in 0..200 {
            let w = random_cyclic_word(&alphabet, 80, &mut rng);
            let x = rational_current(&c, &w, t.window()).unwrap();
            let n = |v: &Word| qi(symmetric_count(v, &w).unwrap() as i64);
            let expected = qi(w.len() as i64) + n(&b) - qi(2) * n(&ba);
            assert_eq!(t.evaluate_length(&x).unwrap(), expected);
        }
        // v = a: the table count agrees with direct counting after τ
        let ta = LocalFormulaTable::build(&spec.map, 1, &quick()).unwrap();
        for _ in 0..100 {
            let w = random_cyclic_word(&alphabet, 60, &mut rng);
            let x = rational_current(&c, &w, ta.window()).unwrap();
            let pushed = ta.pushforward(&x).unwrap();
            let image = Endomorphism::tau(2).unwrap().apply_cyclic(&w).unwrap().unwrap();
            let a: Word = "a".parse().unwrap();
            assert_eq!(pushed.get(&[Letter(0)]), qi(count_occurrences(&a, &image).unwrap() as i64));
        }
    }

    #[test]
    fn length_tables_on_bouquet_metrics() {
        let c = b2();
        let spec = PulledBackLength::new(PathMap::identity(&c), Metric::new(&c, vec![qi(1), qi(2)]).unwrap()).unwrap();
        let t = length_local_formula(&spec, &quick()).unwrap();
        assert_eq!(t.window(), 1);
        assert_eq!(t.d(&[Letter(0)]).unwrap(), qi(1));
        assert_eq!(t.d(&[Letter(3)]).unwrap(), qi(2));
    }

    #[test]
    fn chart_lengths_through_tables() {
        let alphabet = Alphabet::new(2).unwrap();
        let mut rng = trial_rng(21, 0);
        for chart in [Chart::theta(), Chart::dumbbell()] {
            let chart = Arc::new(chart);
            let metric = Metric::new(&chart, vec![q(1, 2), q(3, 1), q(2, 5)]).unwrap();
            let spec = PulledBackLength::of_chart(&chart, metric.clone()).unwrap();
            let t = length_local_formula(&spec, &quick()).unwrap();
            for _ in 0..100 {
                let w = random_cyclic_word(&alphabet, 50, &mut rng);
                let x = rational_current(&b2(), &w, t.window()).unwrap();
                assert_eq!(t.evaluate_length(&x).unwrap(), chart.hyperbolic_length(&metric, &w.to_word()));
            }
        }
    }

    #[test]
    fn pushforward_matches_images() {
        let tau = Endomorphism::tau(2).unwrap();
        let map = PathMap::from_endomorphism(&tau).unwrap();
        let c = b2();
        let table = LocalFormulaTable::build(&map, 2, &quick()).unwrap();
        let x = rational_current(&c, &cw("bab"), table.window()).unwrap();
        assert_eq!(table.pushforward(&x).unwrap(), rational_current(&c, &cw("baaba"), 2).unwrap());
        let low = rational_current(&c, &cw("bab"), 1).unwrap();
        if table.window() > 1 {
            assert_eq!(table.pushforward(&low).unwrap_err().name(), "LevelTooLow");
        }
        let id = LocalFormulaTable::build(&PathMap::identity(&c), 2, &quick()).unwrap();
        let y = rational_current(&c, &cw("abAAB"), 4).unwrap();
        assert_eq!(id.pushforward(&y).unwrap(), extend_to_level(&y, 2).unwrap());
    }

    #[test]
    fn pushforward_of_uniform_current_matches_long_random_images() {
        let tau = Endomorphism::tau(2).unwrap();
        let map = PathMap::from_endomorphism(&tau).unwrap();
        let table = LocalFormulaTable::build(&map, 2, &quick()).unwrap();
        let c = b2();
        let pushed = table.pushforward(&uniform_current(&c, table.window()).unwrap()).unwrap();
        assert_eq!(pushed.weight(), q(7, 6));
        let alphabet = Alphabet::new(2).unwrap();
        let w = crate::words::random_reduced_word(&alphabet, 200_000, &mut trial_rng(22, 0)).unwrap();
        let w = CyclicWord::from_word(&w).unwrap();
        let image = tau.apply_cyclic(&w).unwrap().unwrap();
        let freq = rational_current(&c, &image, 2).unwrap();
        for v in c.paths(2) {
            let empirical = rational::to_f64(&freq.get(&v)) / w.len() as f64;
            assert!((empirical - rational::to_f64(&pushed.get(&v))).abs() < 0.01, "{}", c.format_path(&v));
        }
    }

    #[test]
    fn non_injective_maps_are_rejected() {
        let f = Endomorphism::parse("a=>a; b=>a", 2).unwrap();
        let err = LocalFormulaTable::build(&PathMap::from_endomorphism(&f).unwrap(), 1, &quick()).unwrap_err();
        assert_eq!(err.name(), "NotInjective");
    }

    #[test]
    fn inclusion_example_identifies_two_currents() {
        let f = Endomorphism::parse("a=>a; b=>baB", 2).unwrap();
        let map = PathMap::from_endomorphism(&f).unwrap();
        let c = b2();
        for m in 1..=3 {
            let t = LocalFormulaTable::build(&map, m, &quick()).unwrap();
            let xa = rational_current(&c, &cw("a"), t.window()).unwrap();
            let xb = rational_current(&c, &cw("b"), t.window()).unwrap();
            assert_eq!(t.pushforward(&xa).unwrap(), t.pushforward(&xb).unwrap());
        }
    }

    #[test]
    fn table_json_lists_coefficients() {
        let map = PathMap::from_endomorphism(&Endomorphism::tau(2).unwrap()).unwrap();
        let t = LocalFormulaTable::build(&map, 1, &quick()).unwrap().with_metric(Metric::simplicial(&b2())).unwrap();
        let j = t.to_json();
        assert_eq!(j["window_K"], json!(t.window()));
        let total: u64 = j["coeffs"].as_array().unwrap().iter().map(|c| c["c"].as_u64().unwrap()).sum();
        // average image length of a letter under τ, times the number of windows
        let windows = 4 * 3u64.pow(t.window() as u32 - 1);
        assert_eq!(qi(total as i64) / qi(windows as i64), q(7, 6));
        assert!(j["d"].is_array());
    }
}
