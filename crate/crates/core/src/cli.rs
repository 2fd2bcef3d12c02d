//! Command-line front end. Every subcommand prints one JSON object (or a CSV
//! table with `--emit csv`); rationals are `"p/q"` strings and only fields
//! named `float` or `stderr` carry floating point.

use std::io::{Read, Write};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::charts::{Chart, Metric};
use crate::currents::{self, LevelVector};
use crate::error::{Error, Result};
use crate::morphisms::Endomorphism;
use crate::pairing::{intersection_form, LocalFormulaTable, PathMap, PulledBackLength, TableOptions};
use crate::rational::{self, Q};
use crate::spectra::{self, TeqOutcome};
use crate::words::{self, Alphabet, CyclicWord, Word};

#[derive(Parser, Debug)]
#[command(name = "geocurrents", version, about = "Exact computations with geodesic currents on free groups")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Seed for every randomized step
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Rank of the free group
    #[arg(short = 'k', long = "rank", global = true, default_value_t = 2)]
    k: usize,
    /// Built-in chart name (bouquetK, theta, dumbbell), JSON file or inline JSON
    #[arg(long, global = true)]
    chart: Option<String>,
    /// Edge lengths as a JSON object of "p/q" strings, file or inline
    #[arg(long, global = true)]
    metric: Option<String>,
    /// Level m of the current or path graph
    #[arg(long, global = true)]
    level: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Emit::Json)]
    emit: Emit,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Emit {
    Json,
    Csv,
}

#[derive(Args, Debug)]
struct CurrentInput {
    /// LevelVector JSON (or the output of a current-producing subcommand); file, inline or "-"
    #[arg(long, conflicts_with = "coords")]
    input: Option<String>,
    /// Bare coordinate map such as '{"aa":1,"bb":1}' on --chart at --level
    #[arg(long)]
    coords: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Free and cyclic reduction of a word ("~" prefix for a cyclic word)
    Reduce {
        #[arg(short = 'w', long = "word")]
        word: String,
    },
    /// Occurrences of v in the cyclic word w
    Count {
        #[arg(short = 'v')]
        v: String,
        #[arg(short = 'w', long = "word")]
        word: String,
        /// Count v and its inverse
        #[arg(long)]
        symmetric: bool,
    },
    /// Length of a conjugacy class under --metric on --chart
    Length {
        #[arg(short = 'w', long = "word")]
        word: String,
    },
    /// Image of a word under an endomorphism expression
    Apply {
        #[arg(long)]
        map: String,
        #[arg(short = 'w', long = "word")]
        word: String,
    },
    /// Injectivity by Stallings folding
    InjectCheck {
        #[arg(long)]
        map: String,
    },
    /// Rational or uniform current at --level
    Current {
        #[arg(short = 'w', long = "word", required_unless_present = "uniform")]
        word: Option<String>,
        #[arg(long, conflicts_with = "word")]
        uniform: bool,
    },
    /// Projection to the previous level
    Project {
        #[command(flatten)]
        input: CurrentInput,
    },
    /// Random-walk extension to a higher level
    Extend {
        #[command(flatten)]
        input: CurrentInput,
        /// Target level (default: one more than the input)
        #[arg(long)]
        to: Option<usize>,
    },
    /// Cyclic word realizing an integral point
    Realize {
        #[command(flatten)]
        input: CurrentInput,
    },
    /// Extremality test for a weight-one point
    Extremal {
        #[command(flatten)]
        input: CurrentInput,
    },
    /// Intersection form I(l, x)
    Iform {
        #[command(flatten)]
        input: CurrentInput,
    },
    /// Local formula table of a length function or of a map
    Table {
        /// Endomorphism of the bouquet; without it the table reads --metric on --chart
        #[arg(long)]
        map: Option<String>,
        /// Emit pushforward coefficients onto target paths of this length instead of d(u)
        #[arg(long)]
        target_len: Option<usize>,
    },
    /// Pushforward of a current under an endomorphism
    Push {
        #[arg(long)]
        map: String,
        #[command(flatten)]
        input: CurrentInput,
        /// Target level (default: the input level)
        #[arg(long)]
        to: Option<usize>,
    },
    /// Generic stretching factor of l_A o f
    Stretch {
        #[arg(long)]
        map: String,
        #[arg(long, conflicts_with = "mc", required_unless_present = "mc")]
        exact: bool,
        #[arg(long)]
        mc: bool,
        /// Word length for Monte Carlo
        #[arg(long, default_value_t = 1_000_000)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        trials: usize,
    },
    /// Closed-form generic stretch of phi or phi_inv
    ClosedForm {
        #[arg(long)]
        map: String,
        /// For phi_inv, the form derived from the verified length identity
        #[arg(long)]
        corrected: bool,
    },
    /// Distortion l'(x)/l(x) with l' = --metric o --map and l = --den-metric
    Distortion {
        #[arg(long, default_value = "id")]
        map: String,
        #[arg(long)]
        den_metric: Option<String>,
        #[command(flatten)]
        input: CurrentInput,
    },
    /// Minimum and maximum distortion with witnesses
    Extrema {
        #[arg(long, default_value = "id")]
        map: String,
        #[arg(long)]
        den_metric: Option<String>,
        /// Keep the requested level even below the table window
        #[arg(long)]
        strict: bool,
    },
    /// Randomized translation-equivalence falsification
    Teq {
        g: String,
        h: String,
        #[arg(long, default_value_t = 100)]
        trials: u64,
    },
    /// Subword frequencies in a random cyclic word against the uniform current
    Freq {
        #[arg(long, default_value_t = 100_000)]
        n: usize,
        /// Subword length
        #[arg(long, default_value_t = 2)]
        m: usize,
    },
}

impl Cmd {
    fn name(&self) -> &'static str {
        match self {
            Cmd::Reduce { .. } => "reduce",
            Cmd::Count { .. } => "count",
            Cmd::Length { .. } => "length",
            Cmd::Apply { .. } => "apply",
            Cmd::InjectCheck { .. } => "inject-check",
            Cmd::Current { .. } => "current",
            Cmd::Project { .. } => "project",
            Cmd::Extend { .. } => "extend",
            Cmd::Realize { .. } => "realize",
            Cmd::Extremal { .. } => "extremal",
            Cmd::Iform { .. } => "iform",
            Cmd::Table { .. } => "table",
            Cmd::Push { .. } => "push",
            Cmd::Stretch { .. } => "stretch",
            Cmd::ClosedForm { .. } => "closed-form",
            Cmd::Distortion { .. } => "distortion",
            Cmd::Extrema { .. } => "extrema",
            Cmd::Teq { .. } => "teq",
            Cmd::Freq { .. } => "freq",
        }
    }
}

/// Parses `args` (without the program name), runs the subcommand and writes
/// its output. Returns the process exit code: 0 on success, 1 for domain
/// errors, 2 for usage errors.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let args: Vec<String> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(std::iter::once("geocurrents".to_string()).chain(args.iter().cloned())) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    let mut ctx = Context { cli: &cli, digest: Sha256::new() };
    for a in &args {
        ctx.digest.update(a.as_bytes());
        ctx.digest.update([0]);
    }
    match ctx.dispatch() {
        Ok(report) => {
            let digest = hex::encode(std::mem::take(&mut ctx.digest).finalize());
            let text = match cli.emit {
                Emit::Json => {
                    let mut obj = Map::new();
                    obj.insert("command".into(), json!(cli.cmd.name()));
                    obj.insert("argv".into(), json!(args));
                    obj.insert("inputs_digest".into(), json!(digest));
                    obj.extend(report.fields);
                    format!("{}\n", Value::Object(obj))
                }
                Emit::Csv => report.csv(),
            };
            match out.write_all(text.as_bytes()) {
                Ok(()) => 0,
                Err(e) => {
                    let _ = writeln!(err, "{}", Error::from(e));
                    1
                }
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}

#[derive(Default)]
struct Report {
    fields: Map<String, Value>,
    table: Option<(Vec<&'static str>, Vec<Vec<String>>)>,
}

impl Report {
    fn set(mut self, key: &str, v: Value) -> Self {
        self.fields.insert(key.into(), v);
        self
    }

    fn value(self, x: &Q) -> Self {
        self.set("value", json!(x.to_string())).set("float", json!(rational::to_f64(x)))
    }

    fn current(self, x: &LevelVector) -> Self {
        let rows = x.coords().iter().map(|(p, c)| vec![x.chart().format_path(p), c.to_string()]).collect();
        let mut r = self.set("current", x.to_json()).set("weight", json!(x.weight().to_string()));
        r.table = Some((vec!["path", "coordinate"], rows));
        r
    }

    fn csv(&self) -> String {
        let mut s = String::new();
        match &self.table {
            Some((head, rows)) => {
                s.push_str(&head.join(","));
                s.push('\n');
                for r in rows {
                    s.push_str(&r.join(","));
                    s.push('\n');
                }
            }
            None => {
                s.push_str("field,value\n");
                for (k, v) in &self.fields {
                    match v {
                        Value::String(t) => s.push_str(&format!("{k},{t}\n")),
                        Value::Number(_) | Value::Bool(_) => s.push_str(&format!("{k},{v}\n")),
                        _ => {}
                    }
                }
            }
        }
        s
    }
}

struct Context<'a> {
    cli: &'a Cli,
    digest: Sha256,
}

impl Context<'_> {
    /// Reads `-` from stdin, an existing file, or takes the text literally.
    fn load(&mut self, s: &str) -> Result<String> {
        let text = if s == "-" {
            let mut buf = String::new();
            std::io::stdin().read_to_string(&mut buf)?;
            buf
        } else if std::path::Path::new(s).is_file() {
            std::fs::read_to_string(s)?
        } else {
            return Ok(s.to_string());
        };
        self.digest.update(text.as_bytes());
        Ok(text)
    }

    fn load_json(&mut self, s: &str) -> Result<Value> {
        let text = self.load(s)?;
        Ok(serde_json::from_str(&text)?)
    }

    fn alphabet(&self) -> Result<Alphabet> {
        Alphabet::new(self.cli.k)
    }

    fn word(&self, text: &str) -> Result<Word> {
        Word::parse(&self.alphabet()?, text)
    }

    fn cyclic(&self, text: &str) -> Result<CyclicWord> {
        CyclicWord::parse(&self.alphabet()?, text)
    }

    fn endo(&self, expr: &str) -> Result<Endomorphism> {
        Endomorphism::parse(expr, self.cli.k)
    }

    fn chart(&mut self) -> Result<Arc<Chart>> {
        let chart = match self.cli.chart.clone() {
            None => Chart::bouquet(self.cli.k)?,
            Some(s) => {
                let text = self.load(&s)?;
                if text.trim_start().starts_with('{') {
                    Chart::from_json(&serde_json::from_str(&text)?)?
                } else {
                    Chart::builtin(text.trim())?
                }
            }
        };
        Ok(Arc::new(chart))
    }

    fn metric_from(&mut self, arg: Option<String>, chart: &Chart) -> Result<Metric> {
        match arg {
            None => Ok(Metric::simplicial(chart)),
            Some(s) => {
                let v = self.load_json(&s)?;
                Metric::from_json(chart, &v)
            }
        }
    }

    fn metric(&mut self, chart: &Chart) -> Result<Metric> {
        self.metric_from(self.cli.metric.clone(), chart)
    }

    fn current(&mut self, input: &CurrentInput) -> Result<LevelVector> {
        if let Some(s) = &input.input {
            let v = self.load_json(s)?;
            return LevelVector::from_json(v.get("current").unwrap_or(&v));
        }
        let coords = input.coords.as_ref().ok_or_else(|| Error::invalid("give --input or --coords"))?;
        let coords = self.load_json(coords)?;
        let chart = self.chart()?;
        LevelVector::from_coords_json(chart, self.cli.level, &coords)
    }

    /// `ℓ' = metric ∘ f` on the rank-k bouquet.
    fn pulled_back(&mut self, expr: &str) -> Result<PulledBackLength> {
        let map = PathMap::from_endomorphism(&self.endo(expr)?)?;
        let metric = self.metric(&map.target().clone())?;
        PulledBackLength::new(map, metric)
    }

    fn dispatch(&mut self) -> Result<Report> {
        let opts = TableOptions::default();
        let level = self.cli.level;
        let r = Report::default();
        Ok(match &self.cli.cmd {
            Cmd::Reduce { word } => {
                if word.starts_with('~') {
                    let w = self.cyclic(word)?;
                    r.set("value", json!(w.to_string()))
                } else {
                    let w = self.word(word)?;
                    let (core, conj) = words::cyclic_reduce(&w);
                    let cyclic = core.map(|c| c.to_string()).unwrap_or_else(|| "~".into());
                    r.set("value", json!(w.to_string())).set("cyclic", json!(cyclic)).set("conjugator", json!(conj.to_string()))
                }
            }
            Cmd::Count { v, word, symmetric } => {
                let v = self.word(v)?;
                let w = self.cyclic(word)?;
                let n = if *symmetric { words::symmetric_count(&v, &w)? } else { words::count_occurrences(&v, &w)? };
                r.set("value", json!(n.to_string()))
            }
            Cmd::Length { word } => {
                let chart = self.chart()?;
                let metric = self.metric(&chart)?;
                let w = Word::parse(&chart.alphabet(), word.trim_start_matches('~'))?;
                r.value(&chart.hyperbolic_length(&metric, &w))
            }
            Cmd::Apply { map, word } => {
                let f = self.endo(map)?;
                if word.starts_with('~') {
                    let image = f.apply_cyclic(&self.cyclic(word)?)?;
                    r.set("value", json!(image.map(|c| c.to_string()).unwrap_or_else(|| "~".into())))
                } else {
                    r.set("value", json!(f.apply(&self.word(word)?)?.to_string()))
                }
            }
            Cmd::InjectCheck { map } => {
                let f = self.endo(map)?;
                let inj = f.is_injective();
                r.set("value", json!(inj.to_string())).set("map", json!(f.to_string()))
            }
            Cmd::Current { word, uniform } => {
                let chart = self.chart()?;
                let m = level.unwrap_or(2);
                let x = if *uniform {
                    currents::uniform_current(&chart, m)?
                } else {
                    let text = word.as_deref().unwrap_or_default();
                    let w = CyclicWord::parse(&chart.alphabet(), text)?;
                    currents::rational_current(&chart, &w, m)?
                };
                r.current(&x)
            }
            Cmd::Project { input } => {
                let x = self.current(input)?;
                r.current(&currents::project(&x)?)
            }
            Cmd::Extend { input, to } => {
                let x = self.current(input)?;
                let n = to.unwrap_or(x.level() + 1);
                r.current(&currents::extend_to_level(&x, n)?)
            }
            Cmd::Realize { input } => {
                let x = self.current(input)?;
                let w = currents::realize_integer_point(&x)?;
                r.set("value", json!(w.to_string())).set("witness", json!(w.to_string()))
            }
            Cmd::Extremal { input } => {
                let x = self.current(input)?;
                r.set("value", json!(currents::is_extremal(&x)?.to_string()))
            }
            Cmd::Iform { input } => {
                let x = self.current(input)?;
                let metric = self.metric(&x.chart().clone())?;
                r.value(&intersection_form(x.chart(), &metric, &x)?)
            }
            Cmd::Table { map, target_len } => {
                let table = match (map, target_len) {
                    (Some(m), Some(len)) => {
                        LocalFormulaTable::build(&PathMap::from_endomorphism(&self.endo(m)?)?, *len, &opts)?
                    }
                    (Some(m), None) => {
                        let spec = self.pulled_back(m)?;
                        crate::pairing::length_local_formula(&spec, &opts)?
                    }
                    (None, _) => {
                        let chart = self.chart()?;
                        let metric = self.metric(&chart)?;
                        let spec = PulledBackLength::of_chart(&chart, metric)?;
                        match target_len {
                            Some(len) => LocalFormulaTable::build(&spec.map, *len, &opts)?,
                            None => crate::pairing::length_local_formula(&spec, &opts)?,
                        }
                    }
                };
                r.set("table", table.to_json())
                    .set("window_K", json!(table.window()))
                    .set("anchor", json!(table.anchor()))
            }
            Cmd::Push { map, input, to } => {
                let f = PathMap::from_endomorphism(&self.endo(map)?)?;
                let x = self.current(input)?;
                let m = to.unwrap_or(x.level());
                r.current(&crate::pairing::pushforward(&f, &x, m, &opts)?)
            }
            Cmd::Stretch { map, exact, mc: _, n, trials } => {
                let spec = self.pulled_back(map)?;
                if *exact {
                    let s = spectra::generic_stretch_exact(&spec, &opts)?;
                    r.value(&s.value).set("exact", json!(true)).set("window_K", json!(s.window))
                } else {
                    let mc = spectra::generic_stretch_mc(&spec, *n, *trials, self.cli.seed)?;
                    let mut running = 0.0;
                    let rows = mc
                        .samples
                        .iter()
                        .enumerate()
                        .map(|(i, s)| {
                            running += s;
                            vec![i.to_string(), s.to_string(), (running / (i + 1) as f64).to_string()]
                        })
                        .collect();
                    let mut r = r.set("float", json!(mc.mean)).set("exact", json!(false));
                    if let Some(se) = mc.stderr {
                        r = r.set("stderr", json!(se));
                    }
                    r.table = Some((vec!["trial", "sample", "running_mean"], rows));
                    r
                }
            }
            Cmd::ClosedForm { map, corrected } => {
                let k = self.cli.k;
                let v = match (map.as_str(), corrected) {
                    ("phi", _) => spectra::closed_form_phi(k)?,
                    ("phi_inv", false) => spectra::closed_form_phi_inverse(k)?,
                    ("phi_inv", true) => spectra::closed_form_phi_inverse_corrected(k)?,
                    (other, _) => return Err(Error::Unsupported(format!("no closed form for '{other}'"))),
                };
                r.value(&v)
            }
            Cmd::Distortion { map, den_metric, input } => {
                let num = self.pulled_back(map)?;
                let x = self.current(input)?;
                let den_m = self.metric_from(den_metric.clone(), x.chart())?;
                let den = PulledBackLength::new(PathMap::identity(x.chart()), den_m)?;
                r.value(&spectra::distortion(&x, &num, &den, &opts)?)
            }
            Cmd::Extrema { map, den_metric, strict } => {
                let num = self.pulled_back(map)?;
                let den = self.metric_from(den_metric.clone(), &num.source().clone())?;
                let ex = spectra::distortion_extrema(&num, &den, level.unwrap_or(2), *strict, &opts)?;
                let side = |c: &spectra::RatioCycleResult| {
                    json!({
                        "value": c.optimum.to_string(),
                        "float": rational::to_f64(&c.optimum),
                        "witness": c.witness.to_string(),
                        "witness_value": c.witness_value.to_string(),
                    })
                };
                let rows = vec![
                    vec!["min".into(), ex.min.optimum.to_string(), ex.min.witness.to_string()],
                    vec!["max".into(), ex.max.optimum.to_string(), ex.max.witness.to_string()],
                ];
                let mut r = r
                    .set("min", side(&ex.min))
                    .set("max", side(&ex.max))
                    .set("level", json!(ex.min.level))
                    .set("exact", json!(ex.min.exact));
                r.table = Some((vec!["extremum", "value", "witness"], rows));
                r
            }
            Cmd::Teq { g, h, trials } => {
                let (g, h) = (self.word(g)?, self.word(h)?);
                match spectra::translation_equiv_test(&g, &h, self.cli.k, *trials, self.cli.seed)? {
                    TeqOutcome::PassedAllTrials { trials } => r
                        .set("value", json!("PassedAllTrials"))
                        .set("trials", json!(trials))
                        .set("note", json!("no sampled length function separated the pair; this is evidence, not proof")),
                    TeqOutcome::Falsified { trial, automorphism, chart, metric, lengths } => r
                        .set("value", json!("Falsified"))
                        .set("trial", json!(trial))
                        .set("automorphism", json!(automorphism.to_string()))
                        .set("chart", chart.to_json_ref())
                        .set("metric", metric.to_json(&chart))
                        .set("lengths", json!([lengths.0.to_string(), lengths.1.to_string()])),
                }
            }
            Cmd::Freq { n, m } => {
                let chart = self.chart()?;
                if !chart.is_bouquet() {
                    return Err(Error::Unsupported("frequencies are sampled over a free basis".into()));
                }
                let w = words::random_reduced_word(&chart.alphabet(), *n, &mut words::trial_rng(self.cli.seed, 0))?;
                let w = CyclicWord::from_word(&w).ok_or(Error::ZeroCurrent)?;
                let x = currents::rational_current(&chart, &w, *m)?;
                let u = currents::uniform_current(&chart, *m)?;
                let len = w.len() as f64;
                let mut worst = 0f64;
                let rows = chart
                    .paths(*m)
                    .into_iter()
                    .map(|p| {
                        let f = rational::to_f64(&x.get(&p)) / len;
                        let e = rational::to_f64(&u.get(&p));
                        worst = worst.max((f - e).abs());
                        vec![chart.format_path(&p), x.get(&p).to_string(), f.to_string(), e.to_string()]
                    })
                    .collect();
                let mut r = r.set("length", json!(w.len())).set("max_deviation", json!(worst));
                r.table = Some((vec!["path", "count", "frequency", "expected"], rows));
                r
            }
        })
    }
}
