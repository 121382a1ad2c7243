//! Command drivers behind the thin binary: compute reports, run convergence
//! studies, verify witness files and run the axiom suite.
//!
//! Every output embeds the full run configuration, so rerunning an emitted
//! config reproduces the output byte for byte in exact mode.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};

use crate::engines::{
    axiom_check, mityagin_candidate_rho, report, Axiom, AxiomReport, InstanceSampler, Report,
    SNumberKind, SearchBudget, WitnessRecord,
};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::operators::{
    op_norm, operator_from_matrix, read_matrix, summation_matrix, volterra_matrix, OperatorMatrix,
    SampleScheme, VolterraGrid,
};
use crate::scalar::{Scalar, ScalarMode};
use crate::witnesses::{
    build_factorization_discrete, build_factorization_volterra, pigeonhole_lower_gelfand,
    pigeonhole_lower_kolmogorov, rank_one_approximant, read_witness_file, verify_factorization,
    verify_record, CollisionDemo, FactorizationWitness, PigeonholeTranscript,
};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "SNUMBERS_OUT_DIR";

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OperatorSpec {
    Summation { n: usize },
    Volterra { cells: usize, scheme: String },
    MatrixFile { path: PathBuf },
}

impl OperatorSpec {
    /// Parse `summation:5`, `volterra:9:right` or `volterra:8:mid`.
    pub fn parse(text: &str) -> Result<OperatorSpec> {
        let mut parts = text.split(':');
        match parts.next() {
            Some("summation") => {
                let n: usize = parts
                    .next()
                    .and_then(|t| t.parse().ok())
                    .filter(|&n| n >= 1)
                    .ok_or_else(|| Error::Parse(format!("bad operator spec `{text}`")))?;
                Ok(OperatorSpec::Summation { n })
            }
            Some("volterra") => {
                let cells: usize = parts
                    .next()
                    .and_then(|t| t.parse().ok())
                    .filter(|&n| n >= 1)
                    .ok_or_else(|| Error::Parse(format!("bad operator spec `{text}`")))?;
                let scheme = parts.next().unwrap_or("right").to_string();
                if !matches!(scheme.as_str(), "right" | "mid" | "midpoint") {
                    return Err(Error::Parse(format!("unknown sample scheme `{scheme}`")));
                }
                Ok(OperatorSpec::Volterra { cells, scheme })
            }
            _ => Err(Error::Parse(format!("bad operator spec `{text}`"))),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            OperatorSpec::Summation { n } => format!("summation:{n}"),
            OperatorSpec::Volterra { cells, scheme } => format!("volterra:{cells}:{scheme}"),
            OperatorSpec::MatrixFile { path } => format!("matrix:{}", path.display()),
        }
    }

    pub fn build(&self, mode: ScalarMode) -> Result<OperatorMatrix> {
        match self {
            OperatorSpec::Summation { n } => Ok(summation_matrix(mode, *n)),
            OperatorSpec::Volterra { cells, scheme } => {
                let scheme = match scheme.as_str() {
                    "right" => SampleScheme::RightEndpoint,
                    "mid" | "midpoint" => SampleScheme::Midpoint,
                    other => return Err(Error::Parse(format!("unknown scheme `{other}`"))),
                };
                volterra_matrix(&VolterraGrid::new(mode, *cells, scheme)?)
            }
            OperatorSpec::MatrixFile { path } => {
                let text = std::fs::read(path)?;
                let m = read_matrix(&mut text.as_slice())?;
                let m = match (m.mode(), mode) {
                    (a, b) if a == b => m,
                    (ScalarMode::Exact, ScalarMode::Float) => {
                        Matrix::from_fn(ScalarMode::Float, m.rows, m.cols, |i, j| {
                            Scalar::from_f64(m[(i, j)].to_f64())
                        })
                    }
                    _ => {
                        return Err(Error::MixedModes(
                            "matrix file holds decimal literals; exact mode needs rationals"
                                .into(),
                        ))
                    }
                };
                operator_from_matrix(m)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn parse(s: &str) -> Result<OutputFormat> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::Parse(format!("unknown format `{other}`"))),
        }
    }
}

/// Full configuration of one compute run; serialized verbatim into every
/// output.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub operator: OperatorSpec,
    pub kinds: Vec<SNumberKind>,
    pub n_min: usize,
    pub n_max: usize,
    pub mode: ScalarMode,
    pub budget: SearchBudget,
    pub format: OutputFormat,
}

impl RunConfig {
    pub fn config_json(&self) -> Value {
        json!({
            "operator": self.operator.describe(),
            "kinds": self.kinds.iter().map(|k| k.letter().to_string()).collect::<Vec<_>>(),
            "n_min": self.n_min,
            "n_max": self.n_max,
            "mode": self.mode.to_string(),
            "candidates": self.budget.candidates,
            "refine_rounds": self.budget.refine_rounds,
            "seed": self.budget.seed,
            "workers": self.budget.workers,
            "format": match self.format { OutputFormat::Csv => "csv", OutputFormat::Json => "json" },
        })
    }
}

/// Parse `2` or `1..3` into an inclusive range.
pub fn parse_n_range(text: &str) -> Result<(usize, usize)> {
    if let Some((a, b)) = text.split_once("..") {
        let lo: usize = a
            .parse()
            .map_err(|_| Error::Parse(format!("bad range `{text}`")))?;
        let hi: usize = b
            .parse()
            .map_err(|_| Error::Parse(format!("bad range `{text}`")))?;
        if lo == 0 || hi < lo {
            return Err(Error::Parse(format!("bad range `{text}`")));
        }
        Ok((lo, hi))
    } else {
        let n: usize = text
            .parse()
            .map_err(|_| Error::Parse(format!("bad range `{text}`")))?;
        if n == 0 {
            return Err(Error::Parse("s-number index starts at 1".into()));
        }
        Ok((n, n))
    }
}

/// Parse kind letters: `all`, `bmi`, or comma separated letters.
pub fn parse_kinds(text: &str) -> Result<Vec<SNumberKind>> {
    if text == "all" {
        return Ok(SNumberKind::ALL.to_vec());
    }
    let mut out = Vec::new();
    for c in text.chars().filter(|c| *c != ',' && !c.is_whitespace()) {
        let kind = SNumberKind::from_letter(c)
            .ok_or_else(|| Error::Parse(format!("unknown s-number letter `{c}`")))?;
        if !out.contains(&kind) {
            out.push(kind);
        }
    }
    if out.is_empty() {
        return Err(Error::Parse("no kinds requested".into()));
    }
    Ok(out)
}

fn scalar_json(s: &Scalar) -> Value {
    match s {
        Scalar::Exact(_) => Value::String(s.to_string()),
        Scalar::Float(x) => json!(x),
    }
}

fn matrix_json(m: &Matrix) -> Value {
    json!({
        "rows": m.rows,
        "cols": m.cols,
        "entries": (0..m.rows)
            .map(|i| m.row(i).iter().map(scalar_json).collect::<Vec<_>>())
            .collect::<Vec<_>>(),
    })
}

fn vector_json(v: &[Scalar]) -> Value {
    Value::Array(v.iter().map(scalar_json).collect())
}

fn factorization_json(w: &FactorizationWitness) -> Value {
    json!({
        "type": "factorization",
        "n": w.n,
        "e_kind": match w.e_space.kind() {
            crate::spaces::NormKind::Linf => "linf",
            crate::spaces::NormKind::L1 => "l1w",
        },
        "e_dim": w.e_space.dim,
        "norm_a": scalar_json(&w.norm_a),
        "norm_b": scalar_json(&w.norm_b),
        "a": matrix_json(&w.a),
        "b": matrix_json(&w.b),
    })
}

fn transcript_json(t: &PigeonholeTranscript) -> Value {
    let demo = t.demo.as_ref().map(|d: &CollisionDemo| {
        json!({
            "pair": [d.pair.0, d.pair.1],
            "gap": scalar_json(&d.gap),
            "subspace": matrix_json(&d.subspace),
        })
    });
    json!({
        "type": "pigeonhole",
        "kind": match t.kind {
            crate::witnesses::PigeonholeKind::Gelfand => "gelfand",
            crate::witnesses::PigeonholeKind::Kolmogorov => "kolmogorov",
        },
        "n": t.n,
        "trials": t.trial_count,
        "quotient_dim": t.quotient_dim,
        "radius": scalar_json(&t.radius),
        "separation": t.separation,
        "eps": scalar_json(&t.eps),
        "gamma": scalar_json(&t.gamma),
        "op_norm": scalar_json(&t.op_norm),
        "bound": scalar_json(&t.bound),
        "note": t.note,
        "demo": demo.unwrap_or(Value::Null),
    })
}

fn witness_json(w: &WitnessRecord) -> Value {
    match w {
        WitnessRecord::Factorization(f) => factorization_json(f),
        WitnessRecord::Approximant(a) => json!({
            "type": "approximant",
            "rank_bound": a.rank_bound,
            "deviation": scalar_json(&a.deviation),
            "f": matrix_json(&a.f),
        }),
        WitnessRecord::Pigeonhole(t) => transcript_json(t),
        WitnessRecord::GelfandSubspace {
            constraints,
            attaining,
        } => json!({
            "type": "gelfand-subspace",
            "constraints": matrix_json(constraints),
            "attaining_vertex": vector_json(attaining),
        }),
        WitnessRecord::KolmogorovSubspace {
            basis,
            worst_extreme,
        } => json!({
            "type": "kolmogorov-subspace",
            "basis": matrix_json(basis),
            "worst_extreme": worst_extreme,
        }),
        WitnessRecord::BernsteinSubspace { basis, minimizer } => json!({
            "type": "bernstein-subspace",
            "basis": matrix_json(basis),
            "minimizer": vector_json(minimizer),
        }),
        WitnessRecord::MityaginQuotient { map, rho } => json!({
            "type": "mityagin-quotient",
            "map": matrix_json(map),
            "rho": scalar_json(rho),
        }),
        WitnessRecord::Norm { extreme_point } => json!({
            "type": "operator-norm",
            "extreme_point": vector_json(extreme_point),
        }),
        WitnessRecord::LimitTruncation { value } => json!({
            "type": "limit-truncation",
            "value": scalar_json(value),
        }),
    }
}

/// One emitted report: the CSV text and its JSON mirror (with embedded
/// witness transcripts), agreeing field for field.
#[derive(Debug, Clone)]
pub struct ComputeOutput {
    pub csv: String,
    pub json: Value,
}

pub fn run_compute(config: &RunConfig) -> Result<ComputeOutput> {
    let op = config.operator.build(config.mode)?;
    let rep: Report = report(&op, config.n_max, &config.budget)?;

    let mut csv = String::new();
    let config_json = config.config_json();
    writeln!(csv, "# config {config_json}").unwrap();
    writeln!(
        csv,
        "kind,n,lower,upper,lower_witness_id,upper_witness_id,method,heuristic_flag"
    )
    .unwrap();

    let mut rows_json = Vec::new();
    let mut witnesses = Map::new();
    let mut next_id = 0usize;

    for kind in &config.kinds {
        for n in config.n_min..=config.n_max {
            let iv = rep.interval(*kind, n);
            let mut assign = |w: &Option<WitnessRecord>| match w {
                Some(rec) => {
                    next_id += 1;
                    let id = format!("w{next_id}");
                    witnesses.insert(id.clone(), witness_json(rec));
                    id
                }
                None => String::new(),
            };
            let lower_id = assign(&iv.lower.witness);
            let upper_id = assign(&iv.upper.witness);
            let method = format!("{}|{}", iv.lower.method, iv.upper.method);
            writeln!(
                csv,
                "{},{},{},{},{},{},{},{}",
                kind.tag(),
                n,
                iv.lower.value,
                iv.upper.value,
                lower_id,
                upper_id,
                method,
                iv.heuristic
            )
            .unwrap();
            rows_json.push(json!({
                "kind": kind.tag(),
                "n": n,
                "lower": scalar_json(&iv.lower.value),
                "upper": scalar_json(&iv.upper.value),
                "lower_witness_id": lower_id,
                "upper_witness_id": upper_id,
                "method": method,
                "heuristic_flag": iv.heuristic,
            }));
        }
    }

    let json = json!({
        "config": config_json,
        "rows": rows_json,
        "witnesses": Value::Object(witnesses),
    });
    Ok(ComputeOutput { csv, json })
}

/// Witness-side bound column of the convergence table: the canonical witness
/// family for the kind, evaluated at one size.
fn witness_column(kind: SNumberKind, op: &OperatorMatrix, n: usize) -> Option<Scalar> {
    let mode = op.mode();
    match kind {
        SNumberKind::Approximation => rank_one_approximant(op).ok().map(|w| w.deviation),
        SNumberKind::Gelfand => pigeonhole_lower_gelfand(op, n, None).ok().map(|(b, _)| b),
        SNumberKind::Kolmogorov => pigeonhole_lower_kolmogorov(op, n, None)
            .ok()
            .map(|(b, _)| b),
        SNumberKind::Bernstein | SNumberKind::Isomorphism => {
            let w = build_factorization_discrete(mode, n, op.domain.dim)
                .ok()
                .or_else(|| build_factorization_volterra(mode, n, op.domain.dim).ok())?;
            let v = verify_factorization(&w, op).ok()?;
            v.ok.then_some(v.bound)
        }
        SNumberKind::Mityagin => {
            if 2 * n - 1 > op.codomain.dim {
                return None;
            }
            let odd: Vec<usize> = (0..n).map(|k| 2 * k).collect();
            let q = Matrix::from_fn(mode, n, op.codomain.dim, |i, j| {
                if odd[i] == j {
                    mode.one()
                } else {
                    mode.zero()
                }
            });
            mityagin_candidate_rho(op, &q).ok()
        }
    }
}

#[derive(Debug, Clone)]
pub struct ConvergenceRow {
    pub size: usize,
    pub lower: Scalar,
    pub upper: Scalar,
    pub pigeonhole: Option<Scalar>,
    pub witness_bound: Option<Scalar>,
}

#[derive(Debug, Clone)]
pub struct ConvergenceOutput {
    pub csv: String,
    pub json: Value,
    pub rows: Vec<ConvergenceRow>,
}

/// Interval per size plus the pigeonhole column; lower-side witness bounds
/// must be nondecreasing across sizes or the run aborts (a bug, never a
/// tolerance issue).
pub fn run_convergence(
    kind: SNumberKind,
    n: usize,
    dims: &[usize],
    family: &OperatorSpec,
    mode: ScalarMode,
    budget: &SearchBudget,
) -> Result<ConvergenceOutput> {
    if dims.is_empty() {
        return Err(Error::Parse("empty size list".into()));
    }
    let mut rows = Vec::new();
    for &size in dims {
        let spec = match family {
            OperatorSpec::Summation { .. } => OperatorSpec::Summation { n: size },
            OperatorSpec::Volterra { scheme, .. } => OperatorSpec::Volterra {
                cells: size,
                scheme: scheme.clone(),
            },
            OperatorSpec::MatrixFile { .. } => {
                return Err(Error::Parse(
                    "convergence needs an operator family, not a matrix file".into(),
                ))
            }
        };
        let op = spec.build(mode)?;
        let row = crate::engines::compute_row(&op, n, budget)?;
        let iv = row.get(kind);
        let pigeonhole = match kind {
            SNumberKind::Approximation => {
                let g = pigeonhole_lower_gelfand(&op, n, None).ok().map(|(b, _)| b);
                let k = pigeonhole_lower_kolmogorov(&op, n, None)
                    .ok()
                    .map(|(b, _)| b);
                match (g, k) {
                    (Some(a), Some(b)) => Some(a.max_of(b)),
                    (x, None) => x,
                    (None, y) => y,
                }
            }
            SNumberKind::Gelfand => pigeonhole_lower_gelfand(&op, n, None).ok().map(|(b, _)| b),
            SNumberKind::Kolmogorov => pigeonhole_lower_kolmogorov(&op, n, None)
                .ok()
                .map(|(b, _)| b),
            _ => None,
        };
        rows.push(ConvergenceRow {
            size,
            lower: iv.lower.value.clone(),
            upper: iv.upper.value.clone(),
            pigeonhole,
            witness_bound: witness_column(kind, &op, n),
        });
    }

    // nondecreasing witness-backed columns across growing sizes; the
    // approximation witness is an upper bound, so its direction is skipped
    if kind != SNumberKind::Approximation {
        for get in [
            (|r: &ConvergenceRow| r.pigeonhole.clone()) as fn(&ConvergenceRow) -> Option<Scalar>,
            |r: &ConvergenceRow| r.witness_bound.clone(),
        ] {
            let mut prev: Option<(usize, Scalar)> = None;
            for row in &rows {
                if let Some(v) = get(row) {
                    if let Some((psize, pv)) = &prev {
                        if *psize < row.size && v.cmp_strict(pv) == std::cmp::Ordering::Less {
                            return Err(Error::Inconsistency(format!(
                                "witness-side bound decreased from {pv} (N={psize}) to {v} (N={})",
                                row.size
                            )));
                        }
                    }
                    prev = Some((row.size, v));
                }
            }
        }
    }

    let mut csv = String::new();
    let config = json!({
        "command": "convergence",
        "kind": kind.letter().to_string(),
        "n": n,
        "dims": dims,
        "operator_family": family.describe(),
        "mode": mode.to_string(),
        "seed": budget.seed,
        "candidates": budget.candidates,
        "refine_rounds": budget.refine_rounds,
        "workers": budget.workers,
    });
    writeln!(csv, "# config {config}").unwrap();
    writeln!(csv, "N,lower,upper,pigeonhole_lower,witness_bound").unwrap();
    let fmt_opt = |o: &Option<Scalar>| o.as_ref().map(|s| s.to_string()).unwrap_or_default();
    let mut json_rows = Vec::new();
    for r in &rows {
        writeln!(
            csv,
            "{},{},{},{},{}",
            r.size,
            r.lower,
            r.upper,
            fmt_opt(&r.pigeonhole),
            fmt_opt(&r.witness_bound)
        )
        .unwrap();
        json_rows.push(json!({
            "N": r.size,
            "lower": scalar_json(&r.lower),
            "upper": scalar_json(&r.upper),
            "pigeonhole_lower": r.pigeonhole.as_ref().map(scalar_json).unwrap_or(Value::Null),
            "witness_bound": r.witness_bound.as_ref().map(scalar_json).unwrap_or(Value::Null),
        }));
    }
    let json = json!({ "config": config, "rows": json_rows });
    Ok(ConvergenceOutput { csv, json, rows })
}

#[derive(Debug, Clone)]
pub struct VerifyOutcome {
    pub record: usize,
    pub ok: bool,
    pub detail: String,
}

pub fn run_verify(
    witness_path: &Path,
    operator: &OperatorSpec,
    mode: ScalarMode,
) -> Result<Vec<VerifyOutcome>> {
    let text = std::fs::read_to_string(witness_path)?;
    let records = read_witness_file(&text, mode)?;
    if records.is_empty() {
        return Err(Error::Parse("witness file holds no records".into()));
    }
    let op = operator.build(mode)?;
    Ok(records
        .iter()
        .enumerate()
        .map(|(i, rec)| match verify_record(rec, &op) {
            Ok(detail) => VerifyOutcome {
                record: i,
                ok: true,
                detail,
            },
            Err(e) => VerifyOutcome {
                record: i,
                ok: false,
                detail: e.to_string(),
            },
        })
        .collect())
}

#[derive(Debug, Clone)]
pub struct AxiomRun {
    pub axiom: Axiom,
    pub report: AxiomReport,
}

/// The axiom suite over random square matrices of the given sizes; S5 runs
/// on a rank-deficient sampler and S6 on identities.
pub fn run_axioms(
    trials: usize,
    sizes: &[usize],
    seed: u64,
    budget: &SearchBudget,
) -> Result<Vec<AxiomRun>> {
    let mut out = Vec::new();
    for axiom in Axiom::ALL {
        let mut total = AxiomReport::default();
        for &size in sizes {
            let sampler = match axiom {
                Axiom::S5 => InstanceSampler::RankDeficient {
                    rows: size,
                    cols: size,
                    rank: size - 1,
                },
                Axiom::S6 => InstanceSampler::Identity { dim: size },
                _ => InstanceSampler::RandomRational {
                    rows: size,
                    cols: size,
                },
            };
            let trials_here = if axiom == Axiom::S6 { 1 } else { trials };
            let rep = axiom_check(axiom, sampler, trials_here, seed, budget)?;
            total.pass += rep.pass;
            total.indeterminate += rep.indeterminate;
            total.fail += rep.fail;
            total.unsupported += rep.unsupported;
            total.failures.extend(rep.failures);
        }
        out.push(AxiomRun {
            axiom,
            report: total,
        });
    }
    Ok(out)
}

/// Resolve an output path against `SNUMBERS_OUT_DIR` when relative.
pub fn resolve_output_path(path: &Path) -> PathBuf {
    if path.is_absolute() {
        return path.to_path_buf();
    }
    match std::env::var_os(OUT_DIR_ENV) {
        Some(dir) if !dir.is_empty() => PathBuf::from(dir).join(path),
        _ => path.to_path_buf(),
    }
}

/// `op_norm` row for a bare matrix (`compute --matrix file --n 1`).
pub fn norm_row(op: &OperatorMatrix) -> (Scalar, Vec<Scalar>) {
    let w = op_norm(op);
    (w.value, w.extreme_point)
}
