//! Report bodies for the command-line front end.
//!
//! Every command produces a [`Report`]: a header carrying the toolkit
//! version, the command and its full configuration, followed by a body that
//! depends only on that configuration. Wall-clock figures live in the header
//! so bodies of repeated runs compare byte for byte.

use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::genkit::{characteristic_poly, GeneratorSpec, LinearGenerator, Seed, SmallDenseSpec};
use crate::lattice::{DefectProfile, DualLattice};
use crate::merit::{enumerate_min_weight, shortest_relations, verify_relation, LinearRelation, MeritReport};
use crate::oracle::{random_generators, selftest};
use crate::stats::{birthday_spacings, BirthdayParams, BirthdayReport};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Tsv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Tsv => "tsv",
            Format::Json => "json",
        }
    }
}

/// Summary fields plus one table.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Body {
    pub summary: Vec<(String, Value)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Body {
    fn with_columns(columns: &[&str]) -> Self {
        Body {
            summary: Vec::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    fn put(&mut self, key: &str, value: impl Into<Value>) {
        self.summary.push((key.to_string(), value.into()));
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.summary.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    fn to_tsv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.summary {
            out.push_str(&format!("{k}\t{}\n", cell(v)));
        }
        if !self.columns.is_empty() {
            if !self.summary.is_empty() {
                out.push('\n');
            }
            out.push_str(&self.columns.join("\t"));
            out.push('\n');
            for row in &self.rows {
                let cells: Vec<String> = row.iter().map(cell).collect();
                out.push_str(&cells.join("\t"));
                out.push('\n');
            }
        }
        out
    }

    fn to_value(&self) -> Value {
        let summary: serde_json::Map<String, Value> = self.summary.iter().cloned().collect();
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| Value::Object(self.columns.iter().cloned().zip(r.iter().cloned()).collect()))
            .collect();
        json!({ "summary": summary, "rows": rows })
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => "-".into(),
        Value::String(s) => s.clone(),
        Value::Array(xs) => xs.iter().map(cell).collect::<Vec<_>>().join(","),
        other => other.to_string(),
    }
}

#[derive(Clone, Debug)]
pub struct Report {
    pub command: String,
    pub config: Value,
    pub body: Body,
    /// False when the command found a failed check.
    pub ok: bool,
    pub elapsed_secs: f64,
}

impl Report {
    fn new(command: &str, body: Body, ok: bool, started: Instant) -> Self {
        Report {
            command: command.to_string(),
            config: Value::Null,
            body,
            ok,
            elapsed_secs: started.elapsed().as_secs_f64(),
        }
    }

    pub fn body_text(&self, format: Format) -> String {
        match format {
            Format::Tsv => self.body.to_tsv(),
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.body.to_value()).expect("json body");
                s.push('\n');
                s
            }
        }
    }

    pub fn render(&self, format: Format) -> String {
        let header = json!({
            "toolkit": "f2lin",
            "version": VERSION,
            "command": self.command,
            "config": self.config,
            "status": if self.ok { "ok" } else { "failed" },
            "elapsed_secs": (self.elapsed_secs * 1e3).round() / 1e3,
        });
        match format {
            Format::Tsv => {
                let mut out = format!("# f2lin {VERSION}\n# command: {}\n", self.command);
                out.push_str(&format!("# config: {}\n", self.config));
                out.push_str(&format!("# status: {}\n", header["status"].as_str().unwrap_or("")));
                out.push_str(&format!("# elapsed_secs: {}\n", header["elapsed_secs"]));
                out.push_str(&self.body_text(format));
                out
            }
            Format::Json => {
                let doc = json!({ "header": header, "body": self.body.to_value() });
                let mut s = serde_json::to_string_pretty(&doc).expect("json report");
                s.push('\n');
                s
            }
        }
    }
}

/// The body of a rendered report, header lines and fields removed.
pub fn strip_header(text: &str, format: Format) -> Result<String> {
    match format {
        Format::Tsv => Ok(text
            .lines()
            .filter(|l| !l.starts_with('#'))
            .map(|l| format!("{l}\n"))
            .collect()),
        Format::Json => {
            let doc: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
            let mut s = serde_json::to_string_pretty(&doc["body"]).expect("json body");
            s.push('\n');
            Ok(s)
        }
    }
}

/// A built-in generator name, or a path to a dense generator TOML file.
pub fn load_generator(selector: &str) -> Result<GeneratorSpec> {
    match GeneratorSpec::builtin(selector) {
        Ok(spec) => Ok(spec),
        Err(err) => {
            let path = Path::new(selector);
            if !path.is_file() {
                return Err(err);
            }
            let text = std::fs::read_to_string(path)?;
            Ok(GeneratorSpec::SmallDense(Arc::new(SmallDenseSpec::from_toml(&text)?)))
        }
    }
}

fn check_v(spec: &GeneratorSpec, v: usize) -> Result<()> {
    if v == 0 || v > spec.w() as usize {
        return Err(Error::Dimension { v, w: spec.w() });
    }
    Ok(())
}

/// `k(v)`, `d(v)`, the successive minima and `N_v` for `v = 1..=v_max`.
/// `N_v` is filled in only where the `2^{v'} - 1` shortest vectors fit in
/// `budget`.
pub fn analyze(spec: &GeneratorSpec, v_max: usize, budget: u64) -> Result<Report> {
    let started = Instant::now();
    check_v(spec, v_max)?;
    let poly = characteristic_poly(spec)?;
    let reduced = DualLattice::new(&spec.reference_state(), &poly)?.reduce_up_to(v_max)?;
    let profile = DefectProfile::from_reduced(spec.p(), &reduced);
    let mut body = Body::with_columns(&["v", "k", "d", "vprime", "n_v", "minima"]);
    body.put("generator", spec.name());
    body.put("p", spec.p());
    body.put("w", spec.w());
    body.put("v_max", v_max);
    body.put("delta", profile.delta());
    for (row, r) in profile.rows.iter().zip(&reduced) {
        let vprime = r.vprime();
        let n_v = if vprime < 63 && (1u64 << vprime) - 1 < budget {
            log::debug!("N_{} over 2^{} - 1 shortest vectors", row.v, vprime);
            Value::from(enumerate_min_weight(r, budget)?.n_v)
        } else {
            Value::Null
        };
        body.rows.push(vec![
            row.v.into(),
            row.k.into(),
            row.d.into(),
            vprime.into(),
            n_v,
            Value::from(row.minima.clone()),
        ]);
    }
    Ok(Report::new("analyze", body, true, started))
}

/// `N_v` by Gray-code enumeration of the shortest vectors. Without
/// `allow_sampling`, a space larger than `budget` is an error.
pub fn merit(spec: &GeneratorSpec, v: usize, budget: u64, allow_sampling: bool) -> Result<(Report, MeritReport)> {
    let started = Instant::now();
    check_v(spec, v)?;
    let poly = characteristic_poly(spec)?;
    let reduced = DualLattice::new(&spec.reference_state(), &poly)?
        .reduce_up_to(v)?
        .pop()
        .expect("v >= 1");
    let vprime = reduced.vprime();
    let exact = vprime < 63 && (1u64 << vprime) - 1 < budget;
    if !exact && !allow_sampling {
        return Err(Error::BudgetExceeded { vprime, budget });
    }
    log::info!("v = {v}: enumerating over v' = {vprime}");
    let m = enumerate_min_weight(&reduced, budget)?;
    let mut body = Body::with_columns(&["weight", "lags", "relation"]);
    body.put("generator", spec.name());
    body.put("v", m.v);
    body.put("k", m.k);
    body.put("vprime", m.vprime);
    body.put("shortest_vectors", m.shortest_vectors);
    body.put("enumerated", m.enumerated);
    body.put("n_v", m.n_v);
    body.put("exact", m.exact);
    body.put("bound", if m.exact { "exact" } else { "upper bound (sampled)" });
    body.put("argmin_count", m.argmin_count);
    for rel in &m.relations {
        body.rows.push(relation_row(rel));
    }
    Ok((Report::new("merit", body, true, started), m))
}

fn relation_row(rel: &LinearRelation) -> Vec<Value> {
    vec![rel.weight.into(), Value::from(rel.lags()), rel.to_string().into()]
}

/// Every shortest vector of the dual lattice at `v`, as a relation.
pub fn relations(spec: &GeneratorSpec, v: usize, limit: u64) -> Result<(Report, Vec<LinearRelation>)> {
    let started = Instant::now();
    check_v(spec, v)?;
    let poly = characteristic_poly(spec)?;
    let reduced = DualLattice::new(&spec.reference_state(), &poly)?
        .reduce_up_to(v)?
        .pop()
        .expect("v >= 1");
    let rels = shortest_relations(&reduced, limit)?;
    let mut body = Body::with_columns(&["weight", "lags", "relation"]);
    body.put("generator", spec.name());
    body.put("v", v);
    body.put("k", reduced.k());
    body.put("vprime", reduced.vprime());
    body.put("count", rels.len());
    for rel in &rels {
        body.rows.push(relation_row(rel));
    }
    Ok((Report::new("relations", body, true, started), rels))
}

/// A relation file: a JSON array of relations, or a single relation.
pub fn parse_relations(text: &str) -> Result<Vec<LinearRelation>> {
    let value: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let items = match value {
        Value::Array(xs) => xs,
        single => vec![single],
    };
    items
        .iter()
        .map(|x| LinearRelation::from_json(&x.to_string()))
        .collect()
}

pub fn relations_to_json(rels: &[LinearRelation]) -> String {
    let mut s = serde_json::to_string_pretty(rels).expect("relations serialize");
    s.push('\n');
    s
}

/// Checks each relation over `steps` consecutive indices from each seed.
pub fn verify(spec: &GeneratorSpec, rels: &[LinearRelation], steps: usize, seeds: &[u32]) -> Result<Report> {
    let started = Instant::now();
    let mut body = Body::with_columns(&["relation", "seed", "holds"]);
    body.put("generator", spec.name());
    body.put("steps", steps);
    let mut all = true;
    for rel in rels {
        if rel.terms.iter().any(|t| t.bit >= spec.w() as usize) {
            return Err(Error::BitIndex {
                index: rel.terms.iter().map(|t| t.bit).max().unwrap_or(0),
                w: spec.w(),
            });
        }
        for &s in seeds {
            let gen = spec.make(&Seed::Integer(s))?;
            let holds = verify_relation(&gen, rel, steps)?;
            all &= holds;
            body.rows.push(vec![rel.to_string().into(), s.into(), holds.into()]);
        }
    }
    body.put("all_hold", all);
    Ok(Report::new("verify", body, all, started))
}

pub fn birthday(spec: &GeneratorSpec, params: &BirthdayParams) -> Result<(Report, BirthdayReport)> {
    let started = Instant::now();
    params.validate(spec.w())?;
    let r = birthday_spacings(|s| spec.make(&Seed::Integer(s)), params)?;
    let mut body = Body::with_columns(&["replication", "seed", "collisions"]);
    body.put("generator", spec.name());
    body.put("reps", params.reps);
    body.put("n", params.n);
    body.put("log2d", params.log2d);
    body.put("t", params.t());
    body.put("lags", Value::from(params.lags.clone()));
    body.put("base_seed", params.base_seed);
    body.put("lambda", r.lambda);
    body.put("mean", r.mean);
    body.put("total", r.total);
    body.put("p_value", r.p_value);
    body.put("ln_p_value", r.ln_p_value);
    for (i, (seed, y)) in params.seeds().zip(&r.counts).enumerate() {
        body.rows.push(vec![i.into(), seed.into(), (*y).into()]);
    }
    Ok((Report::new("birthday", body, true, started), r))
}

/// Lattice results against brute-force oracles on random small generators.
pub fn oracle_selftest(
    count: usize,
    p_range: std::ops::RangeInclusive<usize>,
    w_range: std::ops::RangeInclusive<u32>,
    seed: u64,
) -> Result<Report> {
    let started = Instant::now();
    if p_range.is_empty() || w_range.is_empty() || *p_range.end() > 16 || *w_range.start() == 0 {
        return Err(Error::InvalidParams(format!(
            "need nonempty ranges with p <= 16 and w >= 1, got {p_range:?} and {w_range:?}"
        )));
    }
    let specs = random_generators(count, p_range, w_range, seed);
    let cases = selftest(&specs)?;
    let mut body = Body::with_columns(&["index", "p", "w", "counted", "status", "disagreements"]);
    body.put("generators", count);
    body.put("seed", seed);
    let failed = cases.iter().filter(|c| !c.passed()).count();
    body.put("passed", count - failed);
    body.put("failed", failed);
    for c in &cases {
        let detail: Vec<Value> = c
            .disagreements
            .iter()
            .map(|d| Value::from(format!("v={} {}: lattice {:?} oracle {:?}", d.v, d.what, d.lattice, d.oracle)))
            .collect();
        body.rows.push(vec![
            c.index.into(),
            c.p.into(),
            c.w.into(),
            c.counted.into(),
            if c.passed() { "pass" } else { "FAIL" }.into(),
            Value::from(detail),
        ]);
    }
    Ok(Report::new("oracle-selftest", body, failed == 0, started))
}

/// Generation speed; the body is timing-dependent by nature.
pub fn speed(spec: &GeneratorSpec, count: u64, seed: u32) -> Result<Report> {
    let started = Instant::now();
    let mut gen = spec.make(&Seed::Integer(seed))?;
    let t = Instant::now();
    let mut acc = 0u64;
    for _ in 0..count {
        acc ^= gen.next_word();
    }
    let secs = t.elapsed().as_secs_f64();
    let mut body = Body::default();
    body.put("generator", spec.name());
    body.put("words", count);
    body.put("seconds", secs);
    body.put("words_per_second", if secs > 0.0 { count as f64 / secs } else { f64::INFINITY });
    body.put("checksum", format!("{acc:#018x}"));
    Ok(Report::new("speed", body, true, started))
}
