use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use staircase_core::atf::{limit_run, associate, AtfError, TraceStep, Vertex};
use staircase_core::classes::{obstruction_mu, parse_center, QuasiPerfect};
use staircase_core::scalar::{parse_rational, Exact, ExactSign, QuadExt, Sign};
use staircase_core::triples::{
    tree_enumerate, triple_at, GeneratingTriple, IdentityReport, MutationWord, TripleError, TripleReport,
};
use staircase_core::{Rational, SpecializedQuad};

use crate::output::{emit, float17, to_json, write_atomic};
use crate::svg;

pub const DEFAULT_MAX_DEPTH: u32 = 20;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Domain(String),
    #[error("{0}")]
    Verification(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Domain(_) => 2,
            CliError::Verification(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

fn domain(e: impl std::fmt::Display) -> CliError {
    CliError::Domain(e.to_string())
}

fn triple_error(e: TripleError) -> CliError {
    match e {
        TripleError::Verification { .. } | TripleError::InvariantViolation(_) => CliError::Verification(e.to_string()),
        _ => domain(e),
    }
}

fn parse_word(s: &str) -> Result<MutationWord, CliError> {
    s.parse().map_err(domain)
}

/// The depth guard, overridable through `STAIRCASE_MAX_DEPTH`.
pub fn max_depth() -> Result<u32, CliError> {
    match std::env::var("STAIRCASE_MAX_DEPTH") {
        Ok(v) => v.trim().parse().map_err(|_| domain(format!("STAIRCASE_MAX_DEPTH={v:?} is not a depth"))),
        Err(_) => Ok(DEFAULT_MAX_DEPTH),
    }
}

fn check_depth(depth: u32) -> Result<(), CliError> {
    let max = max_depth()?;
    if depth > max {
        return Err(domain(format!("depth {depth} exceeds the guard {max}; set STAIRCASE_MAX_DEPTH to raise it")));
    }
    Ok(())
}

pub fn class(center: &str) -> Result<(), CliError> {
    let (p, q) = parse_center(center).map_err(domain)?;
    let e = QuasiPerfect::from_center(p, q).map_err(domain)?;
    emit(None, &serde_json::to_string(&e).expect("class serializes"))?;
    Ok(())
}

#[derive(Serialize, Deserialize)]
pub struct TreeEntry {
    pub triple: GeneratingTriple,
    pub report: TripleReport,
    pub identities: IdentityReport,
}

#[derive(Serialize, Deserialize)]
pub struct TreeOutput {
    pub n: u32,
    pub depth: u32,
    pub count: usize,
    pub all_pass: bool,
    pub failures: Vec<String>,
    pub triples: Vec<TreeEntry>,
}

pub fn tree(n: u32, depth: u32, out: Option<&Path>) -> Result<(), CliError> {
    check_depth(depth)?;
    let ts = tree_enumerate(n, depth).map_err(triple_error)?;
    let mut failures = Vec::new();
    let triples: Vec<TreeEntry> = ts
        .into_iter()
        .map(|t| {
            let report = t.verify();
            let identities = t.identity_suite();
            if !report.all_pass() || !identities.all_pass() {
                failures.push(format!("{:?}: {:?} {:?}", t.word.as_str(), report.failures(), identities));
            }
            TreeEntry { triple: t, report, identities }
        })
        .collect();
    let result = TreeOutput { n, depth, count: triples.len(), all_pass: failures.is_empty(), failures, triples };
    emit(out, &to_json(&result))?;
    if !result.all_pass {
        return Err(CliError::Verification(format!("{} triples fail verification", result.failures.len())));
    }
    Ok(())
}

#[derive(Serialize, Deserialize)]
pub struct IntervalOutput {
    pub owner: QuasiPerfect,
    pub lower: QuadExt,
    pub upper: QuadExt,
}

#[derive(Serialize, Deserialize)]
pub struct Approx {
    pub b_e: f64,
    pub z_e: f64,
    pub volume: f64,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct LimitsOutput {
    pub n: u32,
    pub word: MutationWord,
    pub b_E: QuadExt,
    pub z_E: QuadExt,
    pub V: QuadExt,
    pub interval: IntervalOutput,
    pub approx: Approx,
}

pub fn limits(n: u32, word: &str, out: Option<&Path>) -> Result<(), CliError> {
    let w = parse_word(word)?;
    let t = triple_at(n, &w).map_err(triple_error)?;
    let (b, z) = t.staircase_limits().map_err(triple_error)?;
    let j = t.blocked_interval().map_err(triple_error)?;
    let v = j.volume_at_lower().map_err(triple_error)?;
    let approx = Approx {
        b_e: b.to_f64(),
        z_e: z.to_f64(),
        volume: v.to_f64(),
        lower: j.lower.to_f64(),
        upper: j.upper.to_f64(),
    };
    let result = LimitsOutput {
        n,
        word: w,
        b_E: b,
        z_E: z,
        V: v,
        interval: IntervalOutput { owner: j.owner, lower: j.lower, upper: j.upper },
        approx,
    };
    emit(out, &to_json(&result))?;
    Ok(())
}

fn atf_error(e: AtfError) -> CliError {
    match e {
        AtfError::Triple(t) => triple_error(t),
        AtfError::Class(c) => domain(c),
        other => CliError::Verification(other.to_string()),
    }
}

/// `k_max` y-mutations starting from `q`.
fn y_run(q: SpecializedQuad, k_max: usize) -> Result<Vec<SpecializedQuad>, AtfError> {
    let mut quads = vec![q];
    for _ in 0..k_max {
        let next = quads.last().expect("nonempty").mutate(Vertex::Y, &Exact)?.0;
        quads.push(next);
    }
    Ok(quads)
}

pub struct AtfArgs<'a> {
    pub n: u32,
    pub word: &'a str,
    pub k_max: usize,
    pub out: &'a Path,
    pub svg: bool,
    pub b: Option<&'a str>,
}

#[derive(Serialize, Deserialize)]
pub struct AtfSummary {
    pub steps: usize,
    pub b: QuadExt,
    pub xv_decreasing: bool,
    pub trace: PathBuf,
    pub svg: Vec<PathBuf>,
}

pub fn atf(args: AtfArgs<'_>) -> Result<(), CliError> {
    let w = parse_word(args.word)?;
    let t = triple_at(args.n, &w).map_err(triple_error)?;
    let (b, quads) = match args.b {
        None => {
            let run = limit_run(&t, args.k_max).map_err(atf_error)?;
            if !(run.ox_constant() && run.ox_is_inverse_volume() && run.matches_associate) {
                return Err(CliError::Verification("limit run does not reproduce the associated quadrilaterals".into()));
            }
            (run.b, run.quads)
        }
        Some(s) => {
            let b = QuadExt::from_rational(parse_rational(s).map_err(domain)?);
            let q = associate(&t).map_err(atf_error)?.specialize(&b);
            q.check_invariants(&Exact)
                .map_err(|e| CliError::Verification(format!("quadrilateral at b = {b}: {e}")))?;
            (b, y_run(q, args.k_max).map_err(atf_error)?)
        }
    };
    let trace: Vec<TraceStep> = quads.iter().enumerate().map(|(k, q)| TraceStep::new(k, q)).collect();
    let trace_path = args.out.join("trace.json");
    write_atomic(&trace_path, to_json(&trace).as_bytes())?;
    let mut svg_paths = Vec::new();
    if args.svg {
        for (k, q) in quads.iter().enumerate() {
            let p = args.out.join(format!("step_{k:03}.svg"));
            write_atomic(&p, svg::render(q, k).as_bytes())?;
            svg_paths.push(p);
        }
    }
    let xv_decreasing = quads.windows(2).all(|w| w[1].len_xv.cmp_exact(&w[0].len_xv) == Ok(Ordering::Less));
    let summary = AtfSummary { steps: trace.len(), b, xv_decreasing, trace: trace_path, svg: svg_paths };
    emit(None, &to_json(&summary))?;
    Ok(())
}

pub struct EnvelopeArgs<'a> {
    pub b: &'a str,
    pub z_min: &'a str,
    pub z_max: &'a str,
    pub samples: usize,
    pub n: u32,
    pub depth: u32,
    pub no_classes: bool,
    pub out: Option<&'a Path>,
}

/// One envelope sample.
#[derive(Clone, Debug, PartialEq)]
pub struct EnvelopeRow {
    pub z: QuadExt,
    pub volume: f64,
    pub best: Option<(QuadExt, QuasiPerfect)>,
}

/// `sqrt(z / (1 - b^2))`, exact when the root lies in the field of `z`.
fn volume_f64(b: &Rational, z: &QuadExt) -> Result<f64, CliError> {
    let one_minus = Rational::from_integer(1.into()) - b * b;
    let w = z.scale(&(Rational::from_integer(1.into()) / one_minus));
    if w.sign() == Sign::Negative {
        return Err(domain(format!("z = {z} is negative")));
    }
    Ok(match w.sqrt() {
        Some(r) => r.to_f64(),
        None => w.to_f64().sqrt(),
    })
}

/// The classes of the tree of level `n` up to `depth`, without repeats.
pub fn family_classes(n: u32, depth: u32) -> Result<Vec<QuasiPerfect>, CliError> {
    let mut seen = BTreeMap::new();
    for t in tree_enumerate(n, depth).map_err(triple_error)? {
        for e in [t.left, t.mid, t.right] {
            seen.entry(e.to_string()).or_insert(e);
        }
    }
    Ok(seen.into_values().collect())
}

pub fn envelope_rows(args: &EnvelopeArgs<'_>) -> Result<Vec<EnvelopeRow>, CliError> {
    check_depth(args.depth)?;
    let b = parse_rational(args.b).map_err(domain)?;
    if b < Rational::from_integer(0.into()) || b >= Rational::from_integer(1.into()) {
        return Err(domain(format!("b = {b} is outside [0, 1)")));
    }
    let z_min: QuadExt = args.z_min.parse().map_err(domain)?;
    let z_max: QuadExt = args.z_max.parse().map_err(domain)?;
    if args.samples == 0 {
        return Err(domain("samples must be at least 1"));
    }
    let span = z_max.checked_sub(&z_min).map_err(domain)?;
    let classes = if args.no_classes { Vec::new() } else { family_classes(args.n, args.depth)? };
    let bq = QuadExt::from_rational(b.clone());
    let mut rows = Vec::with_capacity(args.samples);
    for i in 0..args.samples {
        let frac = if args.samples == 1 {
            Rational::from_integer(0.into())
        } else {
            Rational::new((i as i64).into(), ((args.samples - 1) as i64).into())
        };
        let z = z_min.checked_add(&span.scale(&frac)).map_err(domain)?;
        let volume = volume_f64(&b, &z)?;
        let mut best: Option<(QuadExt, QuasiPerfect)> = None;
        for e in &classes {
            let den = Rational::from_integer(e.d().clone()) - &b * Rational::from_integer(e.m().clone());
            if den <= Rational::from_integer(0.into()) {
                continue;
            }
            let mu = obstruction_mu(e, &bq, &z).map_err(domain)?;
            let better = match &best {
                None => true,
                Some((m, _)) => mu.cmp_exact(m).map_err(domain)? == Ordering::Greater,
            };
            if better {
                best = Some((mu, e.clone()));
            }
        }
        rows.push(EnvelopeRow { z, volume, best });
    }
    Ok(rows)
}

pub const ENVELOPE_HEADER: [&str; 4] = ["z", "volume", "best_mu", "best_class"];

pub fn envelope(args: EnvelopeArgs<'_>) -> Result<(), CliError> {
    let rows = envelope_rows(&args)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(ENVELOPE_HEADER).map_err(|e| CliError::Io(e.into()))?;
    for r in &rows {
        let (mu, class) = match &r.best {
            Some((mu, e)) => (float17(mu.to_f64()), e.to_string()),
            None => (String::new(), String::new()),
        };
        w.write_record([float17(r.z.to_f64()), float17(r.volume), mu, class])
            .map_err(|e| CliError::Io(e.into()))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
    emit(args.out, &String::from_utf8(bytes).expect("csv output is utf-8"))?;
    Ok(())
}
