//! JSON documents. Integers are written as decimal strings and rationals as
//! `num/den`; on input, JSON numbers, integer strings, fractions and finite
//! decimals are all accepted.

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::blocks::{Block, BlockError, BlockKind};
use crate::charts::{ChartError, Check, DecompositionCertificate, DistributionWitness, PlPath, SpectralChart};
use crate::kkcalc::{Diagram, KkError};
use crate::ktheory::KTheoryData;
use crate::lifting::{FinDimDecomposition, LiftVerdict};
use crate::num::{fmt_rat, parse_int, parse_rat, Int, IntMatrix, Rat};
use crate::spectra::{Alignment, EigMultiset, SpectraError, Spectrum};

#[derive(Debug, Error)]
pub enum DocError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("missing field `{0}`")]
    Missing(String),
    #[error("field `{field}`: expected {expected}")]
    Type { field: String, expected: &'static str },
    #[error("field `{field}`: {msg}")]
    Number { field: String, msg: String },
    #[error(transparent)]
    Block(#[from] BlockError),
    #[error(transparent)]
    Kk(#[from] KkError),
    #[error(transparent)]
    Spectra(#[from] SpectraError),
    #[error(transparent)]
    Chart(#[from] ChartError),
}

type Result<T> = std::result::Result<T, DocError>;

fn field<'a>(v: &'a Value, name: &str) -> Result<&'a Value> {
    v.get(name).ok_or_else(|| DocError::Missing(name.to_string()))
}

fn array<'a>(v: &'a Value, name: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| DocError::Type { field: name.to_string(), expected: "an array" })
}

fn number_text(v: &Value, name: &str) -> Result<String> {
    match v {
        Value::Number(n) => Ok(n.to_string()),
        Value::String(s) => Ok(s.clone()),
        _ => Err(DocError::Type { field: name.to_string(), expected: "a number or numeric string" }),
    }
}

pub fn int_from(v: &Value, name: &str) -> Result<Int> {
    let s = number_text(v, name)?;
    parse_int(&s).map_err(|e| DocError::Number { field: name.to_string(), msg: e.to_string() })
}

pub fn rat_from(v: &Value, name: &str) -> Result<Rat> {
    let s = number_text(v, name)?;
    parse_rat(&s).map_err(|e| DocError::Number { field: name.to_string(), msg: e.to_string() })
}

pub fn ints_from(v: &Value, name: &str) -> Result<Vec<Int>> {
    array(v, name)?.iter().map(|x| int_from(x, name)).collect()
}

pub fn rats_from(v: &Value, name: &str) -> Result<Vec<Rat>> {
    array(v, name)?.iter().map(|x| rat_from(x, name)).collect()
}

pub fn int_json(x: &Int) -> Value {
    Value::String(x.to_string())
}

pub fn ints_json(v: &[Int]) -> Value {
    Value::Array(v.iter().map(int_json).collect())
}

pub fn rat_json(x: &Rat) -> Value {
    Value::String(fmt_rat(x))
}

pub fn rats_json(v: &[Rat]) -> Value {
    Value::Array(v.iter().map(rat_json).collect())
}

pub fn matrix_json(m: &IntMatrix) -> Value {
    Value::Array(m.to_rows().iter().map(|r| ints_json(r)).collect())
}

pub fn parse(text: &str) -> Result<Value> {
    Ok(serde_json::from_str(text)?)
}

pub fn block_from(v: &Value) -> Result<Block> {
    let kind = field(v, "kind")?.as_str().ok_or(DocError::Type { field: "kind".into(), expected: "a string" })?;
    let k = ints_from(field(v, "k")?, "k")?;
    match kind {
        "interval" => {
            let n = int_from(field(v, "n")?, "n")?;
            let alpha = ints_from(field(v, "alpha")?, "alpha")?;
            let beta = ints_from(field(v, "beta")?, "beta")?;
            Ok(Block::interval(k, n, alpha, beta)?)
        }
        "finite_dim" => Ok(Block::finite_dim(k)?),
        _ => Err(DocError::Type { field: "kind".into(), expected: "\"interval\" or \"finite_dim\"" }),
    }
}

pub fn block_json(b: &Block) -> Value {
    match b.kind() {
        BlockKind::Interval => json!({
            "kind": "interval",
            "k": ints_json(b.k()),
            "n": int_json(b.n().expect("interval")),
            "alpha": ints_json(b.alpha().expect("interval")),
            "beta": ints_json(b.beta().expect("interval")),
        }),
        BlockKind::FiniteDim => json!({ "kind": "finite_dim", "k": ints_json(b.k()) }),
    }
}

pub fn diagram_from(v: &Value) -> Result<Diagram> {
    let source = block_from(field(v, "source")?)?;
    let target = block_from(field(v, "target")?)?;
    let rows = array(field(v, "lambda0")?, "lambda0")?
        .iter()
        .map(|r| ints_from(r, "lambda0"))
        .collect::<Result<Vec<_>>>()?;
    let lambda0 = IntMatrix::from_rows(rows, source.p())
        .ok_or(DocError::Type { field: "lambda0".into(), expected: "rows of length p" })?;
    let lambda1 = match v.get("lambda1") {
        Some(x) => int_from(x, "lambda1")?,
        None => Int::from(0),
    };
    Ok(Diagram::new(source, target, lambda0, lambda1)?)
}

pub fn diagram_json(d: &Diagram) -> Value {
    json!({
        "source": block_json(d.source()),
        "target": block_json(d.target()),
        "lambda0": matrix_json(d.lambda0()),
        "lambda1": int_json(d.lambda1()),
    })
}

pub fn spectrum_from(v: &Value) -> Result<Spectrum> {
    let block = block_from(field(v, "block")?)?;
    let base = ints_from(field(v, "base")?, "base")?;
    let interior = match v.get("interior") {
        Some(x) => rats_from(x, "interior")?,
        None => Vec::new(),
    };
    Ok(Spectrum::new(block, base, interior)?)
}

pub fn spectrum_json(s: &Spectrum) -> Value {
    json!({
        "block": block_json(s.block()),
        "base": ints_json(s.base()),
        "interior": rats_json(s.interior()),
    })
}

pub fn path_from(v: &Value) -> Result<PlPath> {
    let points = array(v, "paths")?
        .iter()
        .map(|pt| {
            let xy = array(pt, "paths")?;
            if xy.len() != 2 {
                return Err(DocError::Type { field: "paths".into(), expected: "[x, y] pairs" });
            }
            Ok((rat_from(&xy[0], "paths")?, rat_from(&xy[1], "paths")?))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PlPath::new(points)?)
}

pub fn path_json(p: &PlPath) -> Value {
    Value::Array(p.points().iter().map(|(x, y)| json!([rat_json(x), rat_json(y)])).collect())
}

pub fn chart_from(v: &Value) -> Result<SpectralChart> {
    let source = block_from(field(v, "source")?)?;
    let target = block_from(field(v, "target")?)?;
    let base_fibers = array(field(v, "base_fibers")?, "base_fibers")?
        .iter()
        .map(spectrum_from)
        .collect::<Result<Vec<_>>>()?;
    let t = ints_from(field(v, "t")?, "t")?;
    let paths = array(field(v, "paths")?, "paths")?.iter().map(path_from).collect::<Result<Vec<_>>>()?;
    Ok(SpectralChart::new(source, target, base_fibers, t, paths)?)
}

pub fn chart_json(c: &SpectralChart) -> Value {
    json!({
        "source": block_json(c.source()),
        "target": block_json(c.target()),
        "base_fibers": c.base_fibers().iter().map(spectrum_json).collect::<Vec<_>>(),
        "t": ints_json(c.t()),
        "paths": c.paths().iter().map(path_json).collect::<Vec<_>>(),
    })
}

fn small(v: &Value, name: &str) -> Result<u64> {
    let x = int_from(v, name)?;
    u64::try_from(&x).map_err(|_| DocError::Number { field: name.to_string(), msg: "out of range".into() })
}

pub fn witness_from(v: &Value) -> Result<DistributionWitness> {
    let intervals = array(field(v, "intervals")?, "intervals")?
        .iter()
        .map(|pair| {
            let ab = array(pair, "intervals")?;
            if ab.len() != 2 {
                return Err(DocError::Type { field: "intervals".into(), expected: "[a, b] pairs" });
            }
            Ok((int_from(&ab[0], "intervals")?, int_from(&ab[1], "intervals")?))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DistributionWitness {
        mesh: int_from(field(v, "mesh")?, "mesh")?,
        k: small(field(v, "k")?, "k")?,
        l: small(field(v, "l")?, "l")?,
        intervals,
    })
}

pub fn witness_json(w: &DistributionWitness) -> Value {
    json!({
        "mesh": int_json(&w.mesh),
        "eta": rat_json(&w.eta()),
        "k": w.k.to_string(),
        "l": w.l.to_string(),
        "intervals": w.intervals.iter().map(|(a, b)| json!([int_json(a), int_json(b)])).collect::<Vec<_>>(),
    })
}

/// `{"psi_f1_unit", "psi_f1_diagram"?, "psi_int_unit", "psi_r_diagram", "g_vectors"}`.
pub fn decomposition_input_from(v: &Value) -> Result<FinDimDecomposition> {
    let psi_f1_diagram = match v.get("psi_f1_diagram") {
        Some(Value::Null) | None => None,
        Some(d) => Some(diagram_from(d)?),
    };
    Ok(FinDimDecomposition {
        psi_f1_unit: ints_from(field(v, "psi_f1_unit")?, "psi_f1_unit")?,
        psi_f1_diagram,
        psi_int_unit: ints_from(field(v, "psi_int_unit")?, "psi_int_unit")?,
        psi_r_diagram: diagram_from(field(v, "psi_r_diagram")?)?,
        psi_int_g_vectors: array(field(v, "g_vectors")?, "g_vectors")?
            .iter()
            .map(|g| ints_from(g, "g_vectors"))
            .collect::<Result<Vec<_>>>()?,
    })
}

pub fn ktheory_json(k: &KTheoryData) -> Value {
    json!({
        "k0_rank": k.k0_rank,
        "k0_basis": k.k0_basis.iter().map(|r| ints_json(r)).collect::<Vec<_>>(),
        "k1": k.k1.to_string(),
        "unit": ints_json(&k.unit_class),
    })
}

pub fn verdict_json(v: &LiftVerdict) -> Value {
    json!({
        "status": v.status.name(),
        "criterion": v.criterion.name(),
        "witness_rows": v.rows.iter().map(|r| json!({
            "name": r.name,
            "values": ints_json(&r.values),
            "holds": r.holds(),
        })).collect::<Vec<_>>(),
        "diagram": diagram_json(&v.diagram),
        "unital": v.unital,
        "note": v.note,
    })
}

pub fn eig_json(e: &EigMultiset) -> Value {
    Value::Array(e.runs().map(|(v, m)| json!([rat_json(v), int_json(m)])).collect())
}

pub fn alignment_json(a: &Alignment) -> Value {
    json!({
        "c": int_json(&a.c),
        "left": spectrum_json(&a.left),
        "right": spectrum_json(&a.right),
        "pairing": a.pairing.iter().map(|(x, y)| json!([rat_json(x), rat_json(y)])).collect::<Vec<_>>(),
        "maxdist": rat_json(&a.maxdist),
        "max_move": rat_json(&a.max_move),
        "bound": rat_json(&a.bound),
    })
}

pub fn check_json(c: &Check) -> Value {
    json!({
        "name": c.name,
        "lhs": ints_json(&c.lhs),
        "rhs": ints_json(&c.rhs),
        "margin": ints_json(&c.margin()),
        "holds": c.holds(),
    })
}

pub fn certificate_json(c: &DecompositionCertificate) -> Value {
    let intervals = |v: &[(Rat, Rat)]| v.iter().map(|(a, b)| json!([rat_json(a), rat_json(b)])).collect::<Vec<_>>();
    let mut m = Map::new();
    m.insert("eta".into(), rat_json(&c.eta));
    m.insert("v".into(), Value::Array(intervals(&c.v)));
    m.insert("w".into(), Value::Array(intervals(&c.w)));
    m.insert("p_classes".into(), Value::Array(c.p_classes.iter().map(|x| ints_json(x)).collect()));
    m.insert("q_classes".into(), Value::Array(c.q_classes.iter().map(|x| ints_json(x)).collect()));
    m.insert("r_class".into(), ints_json(&c.r_class));
    m.insert("q".into(), ints_json(&c.q));
    m.insert("nu_unit".into(), ints_json(&c.nu_unit));
    m.insert("rho_unit".into(), ints_json(&c.rho_unit));
    m.insert("unit".into(), ints_json(&c.unit));
    m.insert("checks".into(), Value::Array(c.checks.iter().map(check_json).collect()));
    Value::Object(m)
}
