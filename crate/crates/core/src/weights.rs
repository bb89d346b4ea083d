//! Candidate weights on a structure and the admissibility test.

use std::collections::BTreeSet;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::logic::EventStructure;
use crate::numeric::{int, Mode, Rational, Value};

/// Map atom -> probability, aligned with the structure's atom order and
/// homogeneous in arithmetic mode.
#[derive(Clone, Debug, PartialEq)]
pub struct Weight {
    mode: Mode,
    values: Vec<Value>,
}

impl Weight {
    pub fn rational(values: Vec<Rational>) -> Self {
        Weight {
            mode: Mode::Rational,
            values: values.into_iter().map(Value::Rational).collect(),
        }
    }

    pub fn float(values: Vec<f64>) -> Self {
        Weight {
            mode: Mode::Float,
            values: values.into_iter().map(Value::Float).collect(),
        }
    }

    pub fn from_values(values: Vec<Value>) -> Result<Self> {
        let mode = values.first().map(Value::mode).unwrap_or(Mode::Rational);
        if values.iter().any(|v| v.mode() != mode) {
            return Err(Error::MixedModes);
        }
        Ok(Weight { mode, values })
    }

    /// Builds a weight from `(atom name, value)` pairs; every atom must be
    /// covered exactly once.
    pub fn from_named<I, S>(e: &EventStructure, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, Value)>,
        S: AsRef<str>,
    {
        let mut slots: Vec<Option<Value>> = vec![None; e.atom_count()];
        for (name, v) in pairs {
            let i = e
                .atom_index(name.as_ref())
                .ok_or_else(|| Error::UnknownAtom(name.as_ref().to_string()))?;
            slots[i] = Some(v);
        }
        let values = slots
            .into_iter()
            .enumerate()
            .map(|(i, v)| v.ok_or_else(|| Error::MissingAtomValue(e.atom_name(i).to_string())))
            .collect::<Result<Vec<_>>>()?;
        Self::from_values(values)
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn values(&self) -> &[Value] {
        &self.values
    }

    pub fn get(&self, atom: usize) -> &Value {
        &self.values[atom]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn to_f64_vec(&self) -> Vec<f64> {
        self.values.iter().map(Value::to_f64).collect()
    }

    /// Exact rational copy; floats are decomposed bit-exactly.
    pub fn to_rational_vec(&self) -> Result<Vec<Rational>> {
        self.values.iter().map(Value::to_rational).collect()
    }

    pub fn to_mode(&self, mode: Mode) -> Result<Weight> {
        Ok(Weight {
            mode,
            values: self.values.iter().map(|v| v.to_mode(mode)).collect::<Result<_>>()?,
        })
    }

    pub(crate) fn check_size(&self, e: &EventStructure) -> Result<()> {
        if self.values.len() != e.atom_count() {
            return Err(Error::SizeMismatch {
                expected: e.atom_count(),
                got: self.values.len(),
            });
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AdmissibilityReport {
    pub mode: Mode,
    /// Sum of the weight over each context, in context order.
    pub context_sums: Vec<Value>,
    /// Largest `|sum - 1|` over contexts.
    pub max_deviation: Value,
    /// Atoms whose value falls outside `[-tol, 1 + tol]`.
    pub out_of_range: Vec<usize>,
    /// Tolerance applied; always zero in rational mode.
    pub tolerance: f64,
    pub admissible: bool,
}

/// Checks membership of `p` in the admissible-weight polytope. Rational
/// weights are checked exactly and `tol` is ignored.
pub fn check_admissible(e: &EventStructure, p: &Weight, tol: f64) -> Result<AdmissibilityReport> {
    p.check_size(e)?;
    if !(tol >= 0.0 && tol.is_finite()) {
        return Err(Error::BadTolerance);
    }
    let mode = p.mode();
    let tolerance = if mode == Mode::Rational { 0.0 } else { tol };
    let one = Value::one(mode);
    let mut context_sums = Vec::with_capacity(e.contexts().len());
    let mut max_deviation = Value::zero(mode);
    for c in e.contexts() {
        let s = c.atoms().iter().fold(Value::zero(mode), |acc, &a| acc.add(p.get(a)));
        max_deviation = max_deviation.max(s.sub(&one).abs());
        context_sums.push(s);
    }
    let out_of_range: Vec<usize> = match mode {
        Mode::Rational => (0..p.len())
            .filter(|&a| {
                let r = p.get(a).as_rational().expect("homogeneous weight");
                *r < Rational::zero() || *r > Rational::one()
            })
            .collect(),
        Mode::Float => (0..p.len())
            .filter(|&a| {
                let x = p.get(a).to_f64();
                !(x >= -tol && x <= 1.0 + tol)
            })
            .collect(),
    };
    let sums_ok = match &max_deviation {
        Value::Rational(r) => r.is_zero(),
        Value::Float(x) => *x <= tol,
    };
    Ok(AdmissibilityReport {
        mode,
        context_sums,
        max_deviation,
        out_of_range: out_of_range.clone(),
        tolerance,
        admissible: sums_ok && out_of_range.is_empty(),
    })
}

/// `p(ai) = 1/2`, `p(xi) = 0` on a cycle logic.
pub fn half_weight(e: &EventStructure) -> Result<Weight> {
    path_weight(e, &Value::Rational(Rational::zero()))
}

/// The path family `p(ai) = 1/(2+r)`, `p(xi) = r/(2+r)`, exact when `r` is rational.
pub fn path_weight(e: &EventStructure, r: &Value) -> Result<Weight> {
    if r.is_negative() {
        return Err(Error::NegativeR(r.to_string()));
    }
    if let Value::Float(x) = r {
        if !x.is_finite() {
            return Err(Error::NonFinite(*x));
        }
    }
    let view = e.as_cycle()?;
    let mode = r.mode();
    let denom = Value::Rational(int(2)).to_mode(mode)?.add(r);
    let cyc = Value::one(mode).div(&denom);
    let mid = r.div(&denom);
    let mut values = vec![Value::zero(mode); e.atom_count()];
    for &a in &view.cyclic {
        values[a] = cyc.clone();
    }
    for &x in &view.midpoint {
        values[x] = mid.clone();
    }
    Weight::from_values(values)
}

/// Same value on every atom.
pub fn constant_weight(e: &EventStructure, v: Value) -> Weight {
    Weight {
        mode: v.mode(),
        values: vec![v; e.atom_count()],
    }
}

/// Two-valued weight putting all mass on the private atoms of a cycle logic.
pub fn midpoint_weight(e: &EventStructure) -> Result<Weight> {
    let view = e.as_cycle()?;
    let mut values = vec![Rational::zero(); e.atom_count()];
    for &x in &view.midpoint {
        values[x] = Rational::one();
    }
    Ok(Weight::rational(values))
}

/// Sum over the shared (cyclic) atoms of a cycle logic.
pub fn cyclic_sum(e: &EventStructure, p: &Weight) -> Result<Value> {
    p.check_size(e)?;
    let view = e.as_cycle()?;
    Ok(view
        .cyclic
        .iter()
        .fold(Value::zero(p.mode()), |acc, &a| acc.add(p.get(a))))
}

/// Atoms with positive value (rational) or value above `tol` (float).
pub fn support(p: &Weight, tol: f64) -> BTreeSet<usize> {
    (0..p.len())
        .filter(|&a| match p.get(a) {
            Value::Rational(r) => *r > Rational::zero(),
            Value::Float(x) => *x > tol,
        })
        .collect()
}
