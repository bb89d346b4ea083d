//! JSON documents for structures, weights, scores and count data, and JSON
//! renderings of every report. Rationals are written as `"p/q"` strings,
//! floats as numbers rounded to 12 significant digits.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;
use serde_json::{json, Map, Value as J};

use crate::bounds::{CycleBounds, RegionReport};
use crate::empirical::{AnalysisReport, CountData, ReconstructedWeight, SingleValuednessReport};
use crate::error::{Error, Result};
use crate::logic::{cycle_logic, EventStructure};
use crate::numeric::{round12, Mode, Rational, Value};
use crate::softmax::{
    BoundaryStep, ContextDistributionFamily, GluingReport, LinkFunction, MaxEntSolution, MultiplicativeReport,
    ScoreAssignment,
};
use crate::states::{enumerate_two_valued_states, Membership, MembershipResult, TwoValuedState};
use crate::weights::{AdmissibilityReport, Weight};

fn schema(e: serde_json::Error) -> Error {
    Error::Schema(e.to_string())
}

pub fn float(x: f64) -> J {
    if x.is_finite() {
        serde_json::Number::from_f64(round12(x)).map_or(J::Null, J::Number)
    } else if x.is_nan() {
        J::String("nan".into())
    } else if x > 0.0 {
        J::String("inf".into())
    } else {
        J::String("-inf".into())
    }
}

pub fn rational(r: &Rational) -> J {
    J::String(r.to_string())
}

pub fn value(v: &Value) -> J {
    match v {
        Value::Rational(r) => rational(r),
        Value::Float(x) => float(*x),
    }
}

fn mode_str(m: Mode) -> &'static str {
    match m {
        Mode::Rational => "rational",
        Mode::Float => "float",
    }
}

fn value_from_json(v: &J, mode: Mode, what: &str) -> Result<Value> {
    match v {
        J::String(s) => Value::parse(s, mode),
        J::Number(n) => match mode {
            Mode::Rational => Value::parse(&n.to_string(), mode),
            Mode::Float => n
                .as_f64()
                .map(Value::Float)
                .ok_or_else(|| Error::BadNumber(n.to_string())),
        },
        other => Err(Error::Schema(format!(
            "{what}: expected a number or numeric string, got {other}"
        ))),
    }
}

fn names(e: &EventStructure, atoms: &[usize]) -> Vec<String> {
    atoms.iter().map(|&a| e.atom_name(a).to_string()).collect()
}

fn atom_map<T>(e: &EventStructure, atoms: &[usize], vals: &[T], f: impl Fn(&T) -> J) -> J {
    let mut m = Map::new();
    for (&a, v) in atoms.iter().zip(vals) {
        m.insert(e.atom_name(a).to_string(), f(v));
    }
    J::Object(m)
}

fn all_atoms(e: &EventStructure) -> Vec<usize> {
    (0..e.atom_count()).collect()
}

// ---- event structures ----

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct StructureDoc {
    atoms: Vec<String>,
    contexts: Vec<ContextDoc>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ContextDoc {
    #[serde(default)]
    name: Option<String>,
    atoms: Vec<String>,
}

pub fn structure_from_json(v: &J) -> Result<EventStructure> {
    let doc: StructureDoc = serde_json::from_value(v.clone()).map_err(schema)?;
    let contexts = doc
        .contexts
        .into_iter()
        .enumerate()
        .map(|(i, c)| (c.name.unwrap_or_else(|| format!("C{}", i + 1)), c.atoms))
        .collect();
    EventStructure::with_names(doc.atoms, contexts)
}

pub fn structure_from_str(s: &str) -> Result<EventStructure> {
    structure_from_json(&serde_json::from_str(s).map_err(schema)?)
}

pub fn structure_to_json(e: &EventStructure) -> J {
    let contexts: Vec<J> = e
        .contexts()
        .iter()
        .map(|c| json!({"name": c.name(), "atoms": names(e, c.atoms())}))
        .collect();
    json!({"atoms": names(e, &all_atoms(e)), "contexts": contexts})
}

/// `cycle:N` or a path to a structure document (relative paths resolve
/// against `base` when given).
pub fn resolve_structure(spec: &str, base: Option<&Path>) -> Result<EventStructure> {
    if let Some(n) = spec.strip_prefix("cycle:") {
        let n: usize = n
            .trim()
            .parse()
            .map_err(|_| Error::Schema(format!("bad cycle size in `{spec}`")))?;
        return cycle_logic(n);
    }
    let path = match base {
        Some(b) if Path::new(spec).is_relative() => b.join(spec),
        _ => Path::new(spec).to_path_buf(),
    };
    let text = std::fs::read_to_string(&path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    structure_from_str(&text)
}

// ---- weights ----

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct WeightDoc {
    #[serde(default)]
    mode: Option<Mode>,
    values: BTreeMap<String, J>,
}

/// Reads `{"mode": ..., "values": {atom: value}}`. `mode` overrides the
/// document's own mode when given; documents without a mode are rational.
pub fn weight_from_json(e: &EventStructure, v: &J, mode: Option<Mode>) -> Result<Weight> {
    let doc: WeightDoc = serde_json::from_value(v.clone()).map_err(schema)?;
    let doc_mode = doc.mode.unwrap_or(Mode::Rational);
    let mut pairs = Vec::with_capacity(doc.values.len());
    for (atom, raw) in &doc.values {
        pairs.push((atom.clone(), value_from_json(raw, doc_mode, atom)?));
    }
    let w = Weight::from_named(e, pairs)?;
    match mode {
        Some(m) if m != doc_mode => w.to_mode(m),
        _ => Ok(w),
    }
}

pub fn weight_from_str(e: &EventStructure, s: &str, mode: Option<Mode>) -> Result<Weight> {
    weight_from_json(e, &serde_json::from_str(s).map_err(schema)?, mode)
}

pub fn weight_to_json(e: &EventStructure, p: &Weight) -> J {
    json!({"mode": mode_str(p.mode()), "values": atom_map(e, &all_atoms(e), p.values(), value)})
}

// ---- scores, links, families ----

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum ScoreDoc {
    Global {
        values: BTreeMap<String, J>,
    },
    PerContext {
        values: BTreeMap<String, BTreeMap<String, J>>,
    },
}

/// `{"kind": "global", "values": {atom: u}}` or
/// `{"kind": "per_context", "values": {context: {atom: u}}}`.
pub fn scores_from_json(e: &EventStructure, v: &J, mode: Mode) -> Result<ScoreAssignment> {
    let doc: ScoreDoc = serde_json::from_value(v.clone()).map_err(schema)?;
    match doc {
        ScoreDoc::Global { values } => {
            let mut pairs = Vec::with_capacity(values.len());
            for (atom, raw) in &values {
                pairs.push((atom.clone(), value_from_json(raw, mode, atom)?));
            }
            Ok(ScoreAssignment::Global(Weight::from_named(e, pairs)?.values().to_vec()))
        }
        ScoreDoc::PerContext { values } => {
            for name in values.keys() {
                if e.context_index(name).is_none() {
                    return Err(Error::UnknownContext(name.clone()));
                }
            }
            let mut out = Vec::with_capacity(e.contexts().len());
            for c in e.contexts() {
                let block = values
                    .get(c.name())
                    .ok_or_else(|| Error::Schema(format!("no scores for context `{}`", c.name())))?;
                let mut row = vec![None; c.len()];
                for (atom, raw) in block {
                    let pos = e
                        .atom_index(atom)
                        .and_then(|a| c.atoms().iter().position(|&x| x == a))
                        .ok_or_else(|| Error::UnknownAtom(format!("{atom} (context {})", c.name())))?;
                    row[pos] = Some(value_from_json(raw, mode, atom)?);
                }
                let row = row
                    .into_iter()
                    .zip(c.atoms())
                    .map(|(v, &a)| v.ok_or_else(|| Error::MissingAtomValue(e.atom_name(a).to_string())))
                    .collect::<Result<Vec<_>>>()?;
                out.push(row);
            }
            Ok(ScoreAssignment::PerContext(out))
        }
    }
}

pub fn scores_to_json(e: &EventStructure, s: &ScoreAssignment) -> J {
    match s {
        ScoreAssignment::Global(u) => json!({"kind": "global", "values": atom_map(e, &all_atoms(e), u, value)}),
        ScoreAssignment::PerContext(u) => {
            let mut m = Map::new();
            for (c, row) in e.contexts().iter().zip(u) {
                m.insert(c.name().to_string(), atom_map(e, c.atoms(), row, value));
            }
            json!({"kind": "per_context", "values": m})
        }
    }
}

pub fn link_from_json(v: &J) -> Result<LinkFunction> {
    let link: LinkFunction = serde_json::from_value(v.clone()).map_err(schema)?;
    // serde does not reject extra fields on the unit variant
    if link == LinkFunction::Identity && v.as_object().is_some_and(|o| o.len() > 1) {
        return Err(Error::Schema("identity link takes no parameters".into()));
    }
    link.validate()?;
    Ok(link)
}

/// Parses `exponential[:beta]`, `identity`, `power:k` or a JSON link object.
pub fn link_from_str(s: &str) -> Result<LinkFunction> {
    let s = s.trim();
    if s.starts_with('{') {
        return link_from_json(&serde_json::from_str(s).map_err(schema)?);
    }
    let (kind, arg) = match s.split_once(':') {
        Some((k, a)) => (k, Some(a)),
        None => (s, None),
    };
    let num = |a: Option<&str>, default: Option<f64>| -> Result<f64> {
        match a {
            Some(a) => a.trim().parse().map_err(|_| Error::InvalidLink(s.to_string())),
            None => default.ok_or_else(|| Error::InvalidLink(s.to_string())),
        }
    };
    let link = match kind {
        "exponential" | "exp" => LinkFunction::Exponential {
            beta: num(arg, Some(1.0))?,
        },
        "identity" if arg.is_none() => LinkFunction::Identity,
        "power" => LinkFunction::Power { k: num(arg, None)? },
        _ => return Err(Error::InvalidLink(s.to_string())),
    };
    link.validate()?;
    Ok(link)
}

pub fn link_to_json(link: &LinkFunction) -> J {
    serde_json::to_value(link).expect("link serialises")
}

pub fn family_to_json(e: &EventStructure, f: &ContextDistributionFamily) -> J {
    let contexts: Vec<J> = e
        .contexts()
        .iter()
        .zip(&f.contexts)
        .map(|(c, d)| {
            json!({
                "name": c.name(),
                "coordinates": atom_map(e, c.atoms(), &d.coordinates, value),
                "normalizer": value(&d.normalizer),
                "probabilities": atom_map(e, c.atoms(), &d.probabilities, value),
            })
        })
        .collect();
    json!({"mode": mode_str(f.mode), "contexts": contexts})
}

// ---- reports ----

pub fn admissibility_to_json(e: &EventStructure, r: &AdmissibilityReport) -> J {
    let sums: Vec<J> = e
        .contexts()
        .iter()
        .zip(&r.context_sums)
        .map(|(c, s)| json!({"context": c.name(), "sum": value(s)}))
        .collect();
    json!({
        "mode": mode_str(r.mode),
        "admissible": r.admissible,
        "tolerance": float(r.tolerance),
        "max_deviation": value(&r.max_deviation),
        "context_sums": sums,
        "out_of_range": names(e, &r.out_of_range),
    })
}

pub fn state_to_json(e: &EventStructure, v: &TwoValuedState) -> J {
    json!(names(e, &v.true_atoms()))
}

pub fn states_to_json(e: &EventStructure, states: &[TwoValuedState]) -> J {
    let list: Vec<J> = states.iter().map(|v| state_to_json(e, v)).collect();
    json!({"count": states.len(), "states": list})
}

/// `states` must be the enumeration the decomposition indexes into.
pub fn membership_to_json(e: &EventStructure, m: &MembershipResult, states: &[TwoValuedState]) -> J {
    let point = atom_map(e, &all_atoms(e), &m.point, rational);
    match &m.membership {
        Membership::Classical { decomposition } => {
            let terms: Vec<J> = decomposition
                .iter()
                .map(|(k, l)| json!({"lambda": rational(l), "state": state_to_json(e, &states[*k])}))
                .collect();
            json!({"classical": true, "point": point, "decomposition": terms})
        }
        Membership::NotClassical { witness, bound } => {
            let value_at_point: Rational = witness.iter().zip(&m.point).map(|(c, p)| c * p).sum();
            json!({
                "classical": false,
                "point": point,
                "witness": atom_map(e, &all_atoms(e), witness, rational),
                "witness_at_point": rational(&value_at_point),
                "bound": rational(bound),
            })
        }
    }
}

pub fn cycle_bounds_to_json(b: &CycleBounds) -> J {
    json!({
        "n": b.n,
        "classical_bound": rational(&b.classical_bound),
        "theta": float(b.theta),
        "half_weight_value": rational(&b.half_weight_value),
        "degenerate": b.degenerate,
    })
}

pub fn region_to_json(e: &EventStructure, r: &RegionReport) -> Result<J> {
    let membership = match &r.membership {
        Some(m) => {
            let states = if m.is_classical() {
                enumerate_two_valued_states(e, None)?
            } else {
                Vec::new()
            };
            membership_to_json(e, m, &states)
        }
        None => J::Null,
    };
    Ok(json!({
        "label": r.label.as_str(),
        "admissible": r.admissible,
        "classical": r.classical,
        "beyond_theta": r.beyond_theta,
        "cyclic_sum": r.cyclic_sum.as_ref().map(value),
        "cycle": r.cycle.as_ref().map(cycle_bounds_to_json),
        "admissibility": admissibility_to_json(e, &r.admissibility),
        "membership": membership,
        "notes": r.notes,
    }))
}

pub fn gluing_to_json(e: &EventStructure, g: &GluingReport) -> J {
    let ctx = |i: usize| e.contexts()[i].name().to_string();
    let atoms: Vec<J> = g
        .atoms
        .iter()
        .map(|d| {
            json!({
                "atom": e.atom_name(d.atom),
                "contexts": d.contexts.iter().map(|&c| ctx(c)).collect::<Vec<_>>(),
                "discrepancy": value(&d.discrepancy),
            })
        })
        .collect();
    let pairs: Vec<J> = g
        .pairs
        .iter()
        .map(|p| {
            let ratios: Vec<J> = p
                .coordinate_ratios
                .iter()
                .map(|(a, v)| json!({"atom": e.atom_name(*a), "ratio": value(v)}))
                .collect();
            json!({
                "first": ctx(p.first),
                "second": ctx(p.second),
                "normalizer_ratio": value(&p.normalizer_ratio),
                "coordinate_ratios": ratios,
                "deviation": value(&p.deviation),
                "consistent": p.consistent,
            })
        })
        .collect();
    let cycles: Vec<J> = g
        .cycles
        .iter()
        .map(|c| {
            json!({
                "contexts": c.contexts.iter().map(|&i| ctx(i)).collect::<Vec<_>>(),
                "product": value(&c.product),
                "deviation": value(&c.deviation),
            })
        })
        .collect();
    json!({
        "glued": g.glued,
        "mode": mode_str(g.mode),
        "tolerance": float(g.tolerance),
        "max_discrepancy": value(&g.max_discrepancy),
        "atoms": atoms,
        "pairs": pairs,
        "cycles": cycles,
    })
}

pub fn boundary_steps_to_json(e: &EventStructure, steps: &[BoundaryStep]) -> J {
    let list: Vec<J> = steps
        .iter()
        .map(|s| {
            json!({
                "r": float(s.r),
                "distance": float(s.distance),
                "max_atom_distance": float(s.max_atom_distance),
                "reconstruction_error": float(s.reconstruction_error),
                "weight": weight_to_json(e, &s.weight),
            })
        })
        .collect();
    J::Array(list)
}

pub fn maxent_to_json(m: &MaxEntSolution) -> J {
    json!({
        "beta": float(m.beta),
        "mean": float(m.mean),
        "distribution": m.distribution.iter().map(|&x| float(x)).collect::<Vec<_>>(),
    })
}

pub fn multiplicative_to_json(r: &MultiplicativeReport) -> J {
    json!({
        "passed": r.passed,
        "tolerance": float(r.tolerance),
        "residuals": r.residuals.iter().map(|&x| float(x)).collect::<Vec<_>>(),
    })
}

fn single_valuedness_to_json(e: &EventStructure, s: &SingleValuednessReport) -> J {
    let ctx = |i: usize| e.contexts()[i].name().to_string();
    let comparisons: Vec<J> = s
        .comparisons
        .iter()
        .map(|c| {
            json!({
                "atom": e.atom_name(c.atom),
                "first": ctx(c.first),
                "second": ctx(c.second),
                "frequency_first": float(c.frequency_first),
                "frequency_second": float(c.frequency_second),
                "gap": float(c.gap),
                "pooled": float(c.pooled),
                "z": float(c.z),
            })
        })
        .collect();
    let atoms: Vec<J> = s
        .atoms
        .iter()
        .map(|v| json!({"atom": e.atom_name(v.atom), "max_abs_z": float(v.max_abs_z), "passed": v.passed}))
        .collect();
    json!({
        "passed": s.passed,
        "threshold": float(s.threshold),
        "max_abs_z": float(s.max_abs_z),
        "atoms": atoms,
        "comparisons": comparisons,
    })
}

fn reconstruction_to_json(e: &EventStructure, r: &ReconstructedWeight) -> J {
    let residuals: Vec<J> = e
        .contexts()
        .iter()
        .zip(&r.residuals)
        .map(|(c, v)| json!({"context": c.name(), "residual": rational(v)}))
        .collect();
    json!({
        "pooled": atom_map(e, &all_atoms(e), &r.pooled, rational),
        "residuals": residuals,
        "projected": weight_to_json(e, &r.projected),
        "pinned": names(e, &r.pinned),
        "box_violations": names(e, &r.box_violations),
        "max_adjustment": rational(&r.max_adjustment),
    })
}

pub fn analysis_to_json(e: &EventStructure, a: &AnalysisReport) -> Result<J> {
    let frequencies: Vec<J> = e
        .contexts()
        .iter()
        .zip(&a.frequencies.contexts)
        .map(|(c, f)| json!({"context": c.name(), "frequencies": atom_map(e, c.atoms(), f, rational)}))
        .collect();
    Ok(json!({
        "frequencies": frequencies,
        "single_valuedness": single_valuedness_to_json(e, &a.single_valuedness),
        "reconstruction": reconstruction_to_json(e, &a.reconstruction),
        "classification": a.classification.as_ref().map(|r| region_to_json(e, r)).transpose()?,
        "withheld": a.withheld,
        "caveat": a.caveat,
    }))
}

// ---- count documents ----

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CountDoc {
    structure: J,
    counts: BTreeMap<String, BTreeMap<String, i64>>,
}

/// `{"structure": <structure document or reference>, "counts": {context: {atom: n}}}`.
/// A string structure is a `cycle:N` shorthand or a path relative to `base`.
pub fn count_document_from_str(s: &str, base: Option<&Path>) -> Result<(EventStructure, CountData)> {
    let doc: CountDoc = serde_json::from_str(s).map_err(schema)?;
    let e = match &doc.structure {
        J::String(r) => resolve_structure(r, base)?,
        v @ J::Object(_) => structure_from_json(v)?,
        other => {
            return Err(Error::Schema(format!(
                "structure must be an object or a reference, got {other}"
            )))
        }
    };
    let d = CountData::from_named(&e, &doc.counts)?;
    Ok((e, d))
}

pub fn count_data_to_json(e: &EventStructure, d: &CountData) -> J {
    let mut counts = Map::new();
    for (i, c) in e.contexts().iter().enumerate() {
        counts.insert(c.name().to_string(), atom_map(e, c.atoms(), d.counts(i), |&n| json!(n)));
    }
    json!({"structure": structure_to_json(e), "counts": counts})
}
