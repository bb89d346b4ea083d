//! Generalized softmax over contexts with a positive link function.
//!
//! A link `g` turns a score `u` into a positive coordinate `q = g(u)`; each
//! context normalises its coordinates separately. Whether the per-context
//! distributions agree on shared atoms (glue) is a separate question,
//! answered by [`gluing_check`].

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::logic::{fundamental_cycles, EventStructure};
use crate::numeric::{Mode, Rational, Value, DEFAULT_TOL};
use crate::weights::{check_admissible, path_weight, Weight};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum LinkFunction {
    /// `x -> exp(beta x)` on all reals, `beta != 0`.
    Exponential { beta: f64 },
    /// `x -> x` on `(0, inf)`.
    Identity,
    /// `x -> x^k` on `(0, inf)`, `k > 0`.
    Power { k: f64 },
}

impl LinkFunction {
    pub fn validate(&self) -> Result<()> {
        match *self {
            LinkFunction::Exponential { beta } if !beta.is_finite() || beta == 0.0 => Err(Error::InvalidLink(format!(
                "exponential link needs finite non-zero beta, got {beta}"
            ))),
            LinkFunction::Power { k } if !(k.is_finite() && k > 0.0) => Err(Error::InvalidLink(format!(
                "power link needs finite positive k, got {k}"
            ))),
            _ => Ok(()),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            LinkFunction::Exponential { .. } => "exponential",
            LinkFunction::Identity => "identity",
            LinkFunction::Power { .. } => "power",
        }
    }

    pub fn in_domain(&self, x: f64) -> bool {
        match self {
            LinkFunction::Exponential { .. } => x.is_finite(),
            LinkFunction::Identity | LinkFunction::Power { .. } => x.is_finite() && x > 0.0,
        }
    }

    pub fn evaluate(&self, x: f64) -> f64 {
        match *self {
            LinkFunction::Exponential { beta } => (beta * x).exp(),
            LinkFunction::Identity => x,
            LinkFunction::Power { k } => x.powf(k),
        }
    }

    /// Inverse on the range `(0, inf)`.
    pub fn inverse(&self, y: f64) -> f64 {
        match *self {
            LinkFunction::Exponential { beta } => y.ln() / beta,
            LinkFunction::Identity => y,
            LinkFunction::Power { k } => y.powf(1.0 / k),
        }
    }

    /// Radius `r` with `(0, r)` inside the range; every catalog link covers
    /// `(0, inf)`, so the representation only uses `(0, 1)`.
    pub fn range_radius(&self) -> f64 {
        1.0
    }

    /// Whether 0 lies in the closure of the range, which is what lets
    /// boundary weights be approached. True for every catalog link.
    pub fn reaches_zero(&self) -> bool {
        true
    }

    fn eval_value(&self, x: &Value) -> Value {
        match (self, x) {
            (LinkFunction::Identity, Value::Rational(r)) => Value::Rational(r.clone()),
            _ => Value::Float(self.evaluate(x.to_f64())),
        }
    }

    fn check_score(&self, label: impl FnOnce() -> String, x: &Value) -> Result<()> {
        let ok = match (self, x) {
            (LinkFunction::Identity | LinkFunction::Power { .. }, Value::Rational(r)) => r.is_positive(),
            _ => self.in_domain(x.to_f64()),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::ScoreOutOfDomain {
                atom: label(),
                value: x.to_string(),
                link: self.name().into(),
            })
        }
    }
}

/// Scores either shared by all contexts (`Global`, aligned with the atom
/// order) or chosen per context (`PerContext`, aligned with each context's
/// atom list).
#[derive(Clone, Debug, PartialEq)]
pub enum ScoreAssignment {
    Global(Vec<Value>),
    PerContext(Vec<Vec<Value>>),
}

impl ScoreAssignment {
    pub fn global_f64(scores: Vec<f64>) -> Self {
        ScoreAssignment::Global(scores.into_iter().map(Value::Float).collect())
    }

    pub fn per_context_f64(scores: Vec<Vec<f64>>) -> Self {
        ScoreAssignment::PerContext(
            scores
                .into_iter()
                .map(|c| c.into_iter().map(Value::Float).collect())
                .collect(),
        )
    }

    /// Score of `atom` as seen from context `ci`.
    pub fn score(&self, e: &EventStructure, ci: usize, atom: usize) -> &Value {
        match self {
            ScoreAssignment::Global(u) => &u[atom],
            ScoreAssignment::PerContext(u) => {
                let pos = e.contexts()[ci]
                    .atoms()
                    .iter()
                    .position(|&a| a == atom)
                    .expect("atom in context");
                &u[ci][pos]
            }
        }
    }

    pub fn check_shape(&self, e: &EventStructure) -> Result<()> {
        match self {
            ScoreAssignment::Global(u) if u.len() != e.atom_count() => Err(Error::ScoreShape(format!(
                "{} global scores for {} atoms",
                u.len(),
                e.atom_count()
            ))),
            ScoreAssignment::PerContext(u) => {
                if u.len() != e.contexts().len() {
                    return Err(Error::ScoreShape(format!(
                        "{} score blocks for {} contexts",
                        u.len(),
                        e.contexts().len()
                    )));
                }
                for (c, s) in e.contexts().iter().zip(u) {
                    if c.len() != s.len() {
                        return Err(Error::ScoreShape(format!(
                            "context `{}` has {} atoms but {} scores",
                            c.name(),
                            c.len(),
                            s.len()
                        )));
                    }
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    fn all_values(&self) -> Box<dyn Iterator<Item = &Value> + '_> {
        match self {
            ScoreAssignment::Global(u) => Box::new(u.iter()),
            ScoreAssignment::PerContext(u) => Box::new(u.iter().flatten()),
        }
    }
}

/// One context's positive coordinates, normaliser and distribution, aligned
/// with the context's atom list.
#[derive(Clone, Debug, PartialEq)]
pub struct ContextDistribution {
    pub coordinates: Vec<Value>,
    pub normalizer: Value,
    pub probabilities: Vec<Value>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ContextDistributionFamily {
    pub mode: Mode,
    pub contexts: Vec<ContextDistribution>,
}

impl ContextDistributionFamily {
    /// Builds a family from positive coordinates, one vector per context.
    pub fn from_coordinates(e: &EventStructure, coordinates: Vec<Vec<Value>>) -> Result<Self> {
        if coordinates.len() != e.contexts().len() {
            return Err(Error::ScoreShape("one coordinate block per context expected".into()));
        }
        let exact = coordinates.iter().flatten().all(|v| v.mode() == Mode::Rational);
        let mode = if exact { Mode::Rational } else { Mode::Float };
        let mut contexts = Vec::with_capacity(coordinates.len());
        for (c, q) in e.contexts().iter().zip(coordinates) {
            if q.len() != c.len() {
                return Err(Error::ScoreShape(format!("context `{}` coordinate count", c.name())));
            }
            let q: Vec<Value> = q.iter().map(|v| v.to_mode(mode)).collect::<Result<_>>()?;
            if let Some(bad) = q
                .iter()
                .position(|v| v.is_negative() || v.is_zero() || !v.to_f64().is_finite())
            {
                return Err(Error::ScoreOutOfDomain {
                    atom: e.atom_name(c.atoms()[bad]).into(),
                    value: q[bad].to_string(),
                    link: "coordinate".into(),
                });
            }
            let normalizer = q.iter().fold(Value::zero(mode), |acc, v| acc.add(v));
            let probabilities = q.iter().map(|v| v.div(&normalizer)).collect();
            contexts.push(ContextDistribution {
                coordinates: q,
                normalizer,
                probabilities,
            });
        }
        Ok(ContextDistributionFamily { mode, contexts })
    }

    /// Probability of `atom` in context `ci`.
    pub fn probability(&self, e: &EventStructure, ci: usize, atom: usize) -> Option<&Value> {
        let pos = e.contexts()[ci].atoms().iter().position(|&a| a == atom)?;
        Some(&self.contexts[ci].probabilities[pos])
    }

    pub fn coordinate(&self, e: &EventStructure, ci: usize, atom: usize) -> Option<&Value> {
        let pos = e.contexts()[ci].atoms().iter().position(|&a| a == atom)?;
        Some(&self.contexts[ci].coordinates[pos])
    }
}

/// `P_C(a) = g(u_C(a)) / Σ_{b∈C} g(u_C(b))` for every context. Exact when the
/// link is the identity and all scores are rational.
pub fn context_softmax(
    e: &EventStructure,
    scores: &ScoreAssignment,
    link: &LinkFunction,
) -> Result<ContextDistributionFamily> {
    link.validate()?;
    scores.check_shape(e)?;
    let exact = matches!(link, LinkFunction::Identity) && scores.all_values().all(|v| v.mode() == Mode::Rational);
    let mode = if exact { Mode::Rational } else { Mode::Float };
    let mut contexts = Vec::with_capacity(e.contexts().len());
    for (ci, c) in e.contexts().iter().enumerate() {
        let u: Vec<&Value> = c.atoms().iter().map(|&a| scores.score(e, ci, a)).collect();
        for (&a, s) in c.atoms().iter().zip(&u) {
            link.check_score(|| e.atom_name(a).to_string(), s)?;
        }
        let coordinates: Vec<Value> = u
            .iter()
            .map(|s| link.eval_value(s).to_mode(mode))
            .collect::<Result<_>>()?;
        let normalizer = coordinates.iter().fold(Value::zero(mode), |acc, v| acc.add(v));
        let probabilities = match (mode, link) {
            (Mode::Float, LinkFunction::Exponential { beta }) => {
                // shift by the max exponent so probabilities survive overflow of q
                let x: Vec<f64> = u.iter().map(|s| beta * s.to_f64()).collect();
                let m = x.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                let w: Vec<f64> = x.iter().map(|v| (v - m).exp()).collect();
                let z: f64 = w.iter().sum();
                w.into_iter().map(|v| Value::Float(v / z)).collect()
            }
            _ => coordinates.iter().map(|q| q.div(&normalizer)).collect(),
        };
        contexts.push(ContextDistribution {
            coordinates,
            normalizer,
            probabilities,
        });
    }
    Ok(ContextDistributionFamily { mode, contexts })
}

#[derive(Clone, Debug, PartialEq)]
pub struct AtomDiscrepancy {
    pub atom: usize,
    pub contexts: Vec<usize>,
    /// `max |P_C(a) - P_C'(a)|` over the containing contexts.
    pub discrepancy: Value,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PairRatio {
    pub first: usize,
    pub second: usize,
    /// `Z_C / Z_C'`.
    pub normalizer_ratio: Value,
    /// `(a, q_C(a) / q_C'(a))` for every shared atom.
    pub coordinate_ratios: Vec<(usize, Value)>,
    /// Largest `|q-ratio / Z-ratio - 1|`.
    pub deviation: Value,
    pub consistent: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CycleProduct {
    /// Closed walk of context indices.
    pub contexts: Vec<usize>,
    /// Product of coordinate ratios along the walk.
    pub product: Value,
    pub deviation: Value,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GluingReport {
    pub mode: Mode,
    pub tolerance: f64,
    pub atoms: Vec<AtomDiscrepancy>,
    pub max_discrepancy: Value,
    pub pairs: Vec<PairRatio>,
    pub cycles: Vec<CycleProduct>,
    pub glued: bool,
}

fn within(v: &Value, tol: f64) -> bool {
    match v {
        Value::Rational(r) => r.is_zero(),
        Value::Float(x) => *x <= tol,
    }
}

/// Checks whether the per-context distributions agree on every shared atom,
/// together with the equivalent normaliser-ratio and cycle-product forms.
/// Exact families are compared exactly and `tol` is ignored.
pub fn gluing_check(e: &EventStructure, family: &ContextDistributionFamily, tol: f64) -> Result<GluingReport> {
    if family.contexts.len() != e.contexts().len() {
        return Err(Error::ScoreShape("family does not match the structure".into()));
    }
    if !(tol >= 0.0 && tol.is_finite()) {
        return Err(Error::BadTolerance);
    }
    let mode = family.mode;
    let inc = e.incidence();
    let one = Value::one(mode);

    let mut atoms = Vec::new();
    let mut max_discrepancy = Value::zero(mode);
    for a in 0..e.atom_count() {
        let cs = inc.contexts_of(a);
        if cs.len() < 2 {
            continue;
        }
        let probs: Vec<&Value> = cs
            .iter()
            .map(|&c| family.probability(e, c, a).expect("member"))
            .collect();
        let mut d = Value::zero(mode);
        for (i, p) in probs.iter().enumerate() {
            for q in &probs[i + 1..] {
                d = d.max(p.sub(q).abs());
            }
        }
        max_discrepancy = max_discrepancy.max(d.clone());
        atoms.push(AtomDiscrepancy {
            atom: a,
            contexts: cs.to_vec(),
            discrepancy: d,
        });
    }

    let ratio = |c1: usize, c2: usize, a: usize| -> Value {
        family
            .coordinate(e, c1, a)
            .expect("member")
            .div(family.coordinate(e, c2, a).expect("member"))
    };
    let mut pairs = Vec::new();
    for (c1, c2, shared) in inc.overlapping_pairs() {
        let normalizer_ratio = family.contexts[c1].normalizer.div(&family.contexts[c2].normalizer);
        let coordinate_ratios: Vec<(usize, Value)> = shared.iter().map(|&a| (a, ratio(c1, c2, a))).collect();
        let deviation = coordinate_ratios.iter().fold(Value::zero(mode), |acc, (_, r)| {
            acc.max(r.div(&normalizer_ratio).sub(&one).abs())
        });
        let consistent = within(&deviation, tol);
        pairs.push(PairRatio {
            first: c1,
            second: c2,
            normalizer_ratio,
            coordinate_ratios,
            deviation,
            consistent,
        });
    }

    let mut cycles = Vec::new();
    for walk in fundamental_cycles(e, &inc) {
        let product = walk.windows(2).fold(one.clone(), |acc, w| {
            let a = inc.shared_atoms(w[0], w[1])[0];
            acc.mul(&ratio(w[0], w[1], a))
        });
        let deviation = product.sub(&one).abs();
        cycles.push(CycleProduct {
            contexts: walk,
            product,
            deviation,
        });
    }

    let glued = within(&max_discrepancy, tol)
        && pairs.iter().all(|p| p.consistent)
        && cycles.iter().all(|c| within(&c.deviation, tol));
    let tolerance = if mode == Mode::Rational { 0.0 } else { tol };
    Ok(GluingReport {
        mode,
        tolerance,
        atoms,
        max_discrepancy,
        pairs,
        cycles,
        glued,
    })
}

/// Glues a single-valued family into a weight, reading each atom from the
/// first context that contains it.
pub fn glue_to_weight(e: &EventStructure, family: &ContextDistributionFamily, tol: f64) -> Result<Weight> {
    let report = gluing_check(e, family, tol)?;
    if !report.glued {
        return Err(Error::NotGlued(Box::new(report)));
    }
    let inc = e.incidence();
    let values = (0..e.atom_count())
        .map(|a| family.probability(e, inc.contexts_of(a)[0], a).expect("member").clone())
        .collect();
    Weight::from_values(values)
}

/// Global scores `u(a) = g⁻¹(α p(a))` reproducing a strictly positive
/// admissible weight. Without `alpha`, `α = r/2 · min(1, 1/max p)` with `r`
/// the link's range radius. Rational weights with the identity link yield
/// exact rational scores.
pub fn represent_weight(
    e: &EventStructure,
    p: &Weight,
    link: &LinkFunction,
    alpha: Option<Value>,
) -> Result<ScoreAssignment> {
    link.validate()?;
    let report = check_admissible(e, p, DEFAULT_TOL)?;
    if !report.admissible {
        return Err(Error::NotAdmissible {
            max_deviation: report.max_deviation.to_string(),
        });
    }
    let zeros: Vec<String> = (0..p.len())
        .filter(|&a| p.get(a).is_negative() || p.get(a).is_zero())
        .map(|a| e.atom_name(a).to_string())
        .collect();
    if !zeros.is_empty() {
        return Err(Error::NotStrictlyPositive { atoms: zeros });
    }

    let exact = matches!(link, LinkFunction::Identity) && p.mode() == Mode::Rational;
    let alpha = match alpha {
        Some(a) => a,
        None => {
            let max = p.values().iter().cloned().fold(Value::zero(p.mode()), Value::max);
            let half_r = Value::Rational(Rational::from_float(link.range_radius() / 2.0).expect("finite radius"));
            let one = Value::Rational(Rational::one());
            let inv = one.div(&max);
            let scale = match one.compare(&inv) {
                Some(std::cmp::Ordering::Greater) => inv,
                _ => one,
            };
            half_r.mul(&scale)
        }
    };
    if alpha.is_negative() || alpha.is_zero() || !alpha.to_f64().is_finite() {
        return Err(Error::AlphaOutOfRange(alpha.to_string()));
    }

    if exact {
        let alpha = alpha.to_rational()?;
        let scores = p
            .values()
            .iter()
            .map(|v| Value::Rational(&alpha * v.as_rational().expect("rational")))
            .collect();
        return Ok(ScoreAssignment::Global(scores));
    }
    let af = alpha.to_f64();
    let mut scores = Vec::with_capacity(p.len());
    for a in 0..p.len() {
        let y = af * p.get(a).to_f64();
        let u = link.inverse(y);
        if !(y > 0.0 && y.is_finite()) || !link.in_domain(u) {
            return Err(Error::AlphaOutOfRange(alpha.to_string()));
        }
        scores.push(Value::Float(u));
    }
    Ok(ScoreAssignment::Global(scores))
}

#[derive(Clone, Debug, PartialEq)]
pub struct GaugeShift {
    pub scores: ScoreAssignment,
    /// Factor `exp(beta * shift)` applied to the component's coordinates.
    pub coordinate_scale: f64,
}

/// Adds `shift` to the global scores of one connected component. Only the
/// exponential link turns this into a common rescaling of coordinates; other
/// links use [`scale_coordinates`].
pub fn gauge_shift(
    e: &EventStructure,
    scores: &ScoreAssignment,
    shift: f64,
    component: &[usize],
    link: &LinkFunction,
) -> Result<GaugeShift> {
    let LinkFunction::Exponential { beta } = *link else {
        return Err(Error::GaugeNeedsExponential);
    };
    link.validate()?;
    scores.check_shape(e)?;
    let ScoreAssignment::Global(u) = scores else {
        return Err(Error::ScoreShape("gauge shifts act on global scores".into()));
    };
    check_component(e, component)?;
    let mut shifted = u.clone();
    for &a in component {
        shifted[a] = Value::Float(u[a].to_f64() + shift);
    }
    Ok(GaugeShift {
        scores: ScoreAssignment::Global(shifted),
        coordinate_scale: (beta * shift).exp(),
    })
}

fn check_component(e: &EventStructure, component: &[usize]) -> Result<()> {
    let mut sorted = component.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != component.len() || !e.connected_components().contains(&sorted) {
        return Err(Error::NotAComponent);
    }
    Ok(())
}

/// Multiplies the coordinates of every context inside `component` by
/// `factor > 0` and renormalises. Works for any link.
pub fn scale_coordinates(
    e: &EventStructure,
    family: &ContextDistributionFamily,
    component: &[usize],
    factor: &Value,
) -> Result<ContextDistributionFamily> {
    check_component(e, component)?;
    if factor.is_negative() || factor.is_zero() {
        return Err(Error::AlphaOutOfRange(factor.to_string()));
    }
    let coordinates = e
        .contexts()
        .iter()
        .zip(&family.contexts)
        .map(|(c, d)| {
            if component.contains(&c.atoms()[0]) {
                d.coordinates.iter().map(|q| q.mul(factor)).collect()
            } else {
                d.coordinates.clone()
            }
        })
        .collect();
    ContextDistributionFamily::from_coordinates(e, coordinates)
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryStep {
    pub r: f64,
    pub weight: Weight,
    /// `max |p_r(a) - 1/2|` over the cyclic atoms.
    pub distance: f64,
    /// `max_a |p_r(a) - h(a)|` over every atom, midpoints included.
    pub max_atom_distance: f64,
    /// Largest per-atom error of `context_softmax(represent_weight(p_r))`.
    pub reconstruction_error: f64,
}

/// Walks the path family towards the half-weight for positive, strictly
/// decreasing `r`; each point is strictly positive and represented through `link`.
pub fn boundary_path(e: &EventStructure, link: &LinkFunction, rs: &[f64]) -> Result<Vec<BoundaryStep>> {
    let ok = rs.iter().all(|r| r.is_finite() && *r > 0.0) && rs.windows(2).all(|w| w[1] < w[0]);
    if !ok {
        return Err(Error::BadPathParameters);
    }
    let view = e.as_cycle()?;
    let mut half = vec![0.0; e.atom_count()];
    for &a in &view.cyclic {
        half[a] = 0.5;
    }
    let mut steps = Vec::with_capacity(rs.len());
    for &r in rs {
        let weight = path_weight(e, &Value::Float(r))?;
        let pf = weight.to_f64_vec();
        let distance = view.cyclic.iter().map(|&a| (pf[a] - 0.5).abs()).fold(0.0, f64::max);
        let max_atom_distance = pf.iter().zip(&half).map(|(p, h)| (p - h).abs()).fold(0.0, f64::max);
        let scores = represent_weight(e, &weight, link, None)?;
        let family = context_softmax(e, &scores, link)?;
        let reconstruction_error = max_family_error(e, &family, &pf);
        steps.push(BoundaryStep {
            r,
            weight,
            distance,
            max_atom_distance,
            reconstruction_error,
        });
    }
    Ok(steps)
}

/// Largest `|P_C(a) - p(a)|` over all contexts and atoms.
pub fn max_family_error(e: &EventStructure, family: &ContextDistributionFamily, p: &[f64]) -> f64 {
    e.contexts()
        .iter()
        .zip(&family.contexts)
        .flat_map(|(c, d)| {
            c.atoms()
                .iter()
                .zip(&d.probabilities)
                .map(|(&a, v)| (v.to_f64() - p[a]).abs())
        })
        .fold(0.0, f64::max)
}

#[derive(Clone, Debug, PartialEq)]
pub struct MaxEntSolution {
    pub beta: f64,
    pub distribution: Vec<f64>,
    pub mean: f64,
}

fn softmax_at(scores: &[f64], beta: f64) -> Vec<f64> {
    let x: Vec<f64> = scores.iter().map(|u| beta * u).collect();
    let m = x.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = x.iter().map(|v| (v - m).exp()).collect();
    let z: f64 = w.iter().sum();
    w.into_iter().map(|v| v / z).collect()
}

fn mean_at(scores: &[f64], beta: f64) -> f64 {
    softmax_at(scores, beta).iter().zip(scores).map(|(p, u)| p * u).sum()
}

/// Maximum-entropy distribution over one context with a fixed expected score.
/// The mean is strictly increasing in `beta`, so the bracket `[-1, 1]` is
/// doubled until it straddles the target and then bisected.
pub fn maxent_softmax(scores: &[f64], target_mean: f64, tol: f64) -> Result<MaxEntSolution> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::BadTolerance);
    }
    if let Some(&bad) = scores.iter().find(|u| !u.is_finite()) {
        return Err(Error::NonFinite(bad));
    }
    let min = scores.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if scores.len() < 2 || min == max {
        return Err(Error::DegenerateScores);
    }
    if !(target_mean > min && target_mean < max) {
        return Err(Error::TargetOutOfRange {
            target: target_mean,
            min,
            max,
        });
    }
    const LIMIT: f64 = (1u64 << 40) as f64;
    let (mut lo, mut hi) = (-1.0f64, 1.0f64);
    while mean_at(scores, hi) < target_mean {
        lo = hi;
        hi *= 2.0;
        if hi > LIMIT {
            return Err(Error::BracketExhausted);
        }
    }
    while mean_at(scores, lo) > target_mean {
        hi = lo;
        lo *= 2.0;
        if lo < -LIMIT {
            return Err(Error::BracketExhausted);
        }
    }
    // bisect to machine resolution; the tolerance only gates the answer
    let mut best = (f64::INFINITY, 0.0);
    for _ in 0..256 {
        let mid = 0.5 * (lo + hi);
        let m = mean_at(scores, mid);
        let gap = (m - target_mean).abs();
        if gap < best.0 {
            best = (gap, mid);
        }
        if gap == 0.0 || hi - lo <= f64::EPSILON * mid.abs().max(1.0) {
            break;
        }
        if m < target_mean {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (gap, beta) = best;
    if gap > tol {
        return Err(Error::BracketExhausted);
    }
    let distribution = softmax_at(scores, beta);
    let mean = mean_at(scores, beta);
    Ok(MaxEntSolution {
        beta,
        distribution,
        mean,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct MultiplicativeReport {
    /// `|g(u+v) - g(u) g(v)| / |g(u) g(v)|` per pair.
    pub residuals: Vec<f64>,
    pub tolerance: f64,
    pub passed: bool,
}

/// Tests the composition law `g(u+v) = g(u) g(v)` on sample pairs.
pub fn check_multiplicative_link(link: &LinkFunction, pairs: &[(f64, f64)], tol: f64) -> Result<MultiplicativeReport> {
    link.validate()?;
    if !(tol >= 0.0 && tol.is_finite()) {
        return Err(Error::BadTolerance);
    }
    let mut residuals = Vec::with_capacity(pairs.len());
    for &(u, v) in pairs {
        for (label, x) in [("u", u), ("v", v), ("u+v", u + v)] {
            if !link.in_domain(x) {
                return Err(Error::ScoreOutOfDomain {
                    atom: label.into(),
                    value: x.to_string(),
                    link: link.name().into(),
                });
            }
        }
        let prod = link.evaluate(u) * link.evaluate(v);
        residuals.push((link.evaluate(u + v) - prod).abs() / prod.abs());
    }
    let passed = residuals.iter().all(|r| *r <= tol);
    Ok(MultiplicativeReport {
        residuals,
        tolerance: tol,
        passed,
    })
}
