//! Closed-form bounds for cycle logics and the region classifier.

use std::f64::consts::PI;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::logic::EventStructure;
use crate::numeric::{int, rat, Rational, Value, DEFAULT_TOL};
use crate::states::{classical_membership, enumerate_two_valued_states, MembershipResult};
use crate::weights::{check_admissible, cyclic_sum, AdmissibilityReport, Weight};

#[derive(Clone, Debug, PartialEq)]
pub struct CycleBounds {
    pub n: usize,
    /// Independence number of the n-cycle: `(n-1)/2` for odd n, `n/2` for even.
    pub classical_bound: Rational,
    /// `n cos(π/n) / (1 + cos(π/n))`.
    pub theta: f64,
    /// Cyclic sum of the half-weight, `n/2`.
    pub half_weight_value: Rational,
    /// The triangle is K3; no KCBS-type comparison there.
    pub degenerate: bool,
}

impl CycleBounds {
    /// The theta comparison is only meaningful on odd cycles of length >= 5.
    pub fn theta_applies(&self) -> bool {
        self.n % 2 == 1 && self.n >= 5
    }
}

pub fn lovasz_theta_cycle(n: usize) -> f64 {
    let c = (PI / n as f64).cos();
    n as f64 * c / (1.0 + c)
}

pub fn cycle_bounds(n: usize) -> Result<CycleBounds> {
    if n < 3 {
        return Err(Error::InvalidN(n));
    }
    Ok(CycleBounds {
        n,
        classical_bound: int((n / 2) as i64),
        theta: lovasz_theta_cycle(n),
        half_weight_value: rat(n as i64, 2),
        degenerate: n == 3,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct PathThresholds {
    /// Path weights exceed the classical bound iff `r < r_classical`.
    pub r_classical: Rational,
    /// Path weights exceed theta iff `r < r_theta`; odd `n >= 5` only.
    pub r_theta: Option<f64>,
}

/// Thresholds on the path parameter `r`, from `n/(2+r) > bound`.
pub fn path_thresholds(n: usize) -> Result<PathThresholds> {
    let b = cycle_bounds(n)?;
    let r_classical = int(n as i64) / &b.classical_bound - int(2);
    let r_theta = b.theta_applies().then(|| n as f64 / b.theta - 2.0);
    Ok(PathThresholds { r_classical, r_theta })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RegionLabel {
    NotAdmissible,
    Classical,
    AdmissibleNonclassical,
    BeyondTheta,
}

impl RegionLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            RegionLabel::NotAdmissible => "not_admissible",
            RegionLabel::Classical => "classical",
            RegionLabel::AdmissibleNonclassical => "admissible_nonclassical",
            RegionLabel::BeyondTheta => "beyond_theta",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RegionReport {
    pub admissibility: AdmissibilityReport,
    /// Certificate from the exact LP; absent when not admissible or when the
    /// structure has no two-valued states.
    pub membership: Option<MembershipResult>,
    pub admissible: bool,
    pub classical: bool,
    /// Cycle structures only.
    pub cycle: Option<CycleBounds>,
    pub cyclic_sum: Option<Value>,
    /// Cyclic sum compared with theta; odd cycles with n >= 5 only.
    pub beyond_theta: Option<bool>,
    pub label: RegionLabel,
    pub notes: Vec<String>,
}

/// Admissibility, then exact classical membership, then (odd cycles) the
/// cyclic sum against the theta value. Float weights use `tol` for the
/// admissibility stage.
pub fn classify_weight(e: &EventStructure, p: &Weight, tol: f64) -> Result<RegionReport> {
    let admissibility = check_admissible(e, p, tol)?;
    let cycle = e.as_cycle().ok().map(|v| cycle_bounds(v.n)).transpose()?;
    let mut notes = Vec::new();
    if !admissibility.admissible {
        return Ok(RegionReport {
            admissibility,
            membership: None,
            admissible: false,
            classical: false,
            cycle,
            cyclic_sum: None,
            beyond_theta: None,
            label: RegionLabel::NotAdmissible,
            notes,
        });
    }

    let states = enumerate_two_valued_states(e, None)?;
    let membership = if states.is_empty() {
        notes.push("no two-valued states: the classical hull is empty".into());
        None
    } else {
        // the LP re-checks admissibility at the default tolerance
        let q = if tol > DEFAULT_TOL {
            p.to_rational_vec().map(Weight::rational)?
        } else {
            p.clone()
        };
        match classical_membership(e, &q, Some(&states)) {
            Ok(m) => Some(m),
            Err(Error::NotAdmissible { .. }) => {
                notes.push("admissible only within the float tolerance; decided at the exact point".into());
                let exact = p.to_rational_vec()?;
                Some(exact_outside_affine_hull(e, exact, &states))
            }
            Err(other) => return Err(other),
        }
    };
    let classical = membership.as_ref().is_some_and(MembershipResult::is_classical);

    let (sum, beyond_theta) = match &cycle {
        Some(b) => {
            let s = cyclic_sum(e, p)?;
            let beyond = b.theta_applies().then(|| s.to_f64() > b.theta);
            if b.degenerate {
                notes.push("n = 3: theta comparison suppressed (triangle is not a KCBS scenario)".into());
            }
            (Some(s), beyond)
        }
        None => (None, None),
    };
    let label = if classical {
        RegionLabel::Classical
    } else if beyond_theta == Some(true) {
        RegionLabel::BeyondTheta
    } else {
        RegionLabel::AdmissibleNonclassical
    };
    Ok(RegionReport {
        admissibility,
        membership,
        admissible: true,
        classical,
        cycle,
        cyclic_sum: sum,
        beyond_theta,
        label,
        notes,
    })
}

/// Separation for a point that misses some context equation exactly: the
/// functional `±Σ_{a∈C} p(a)` of the worst context separates it from every
/// two-valued state, which sums to exactly 1.
fn exact_outside_affine_hull(
    e: &EventStructure,
    point: Vec<Rational>,
    states: &[crate::states::TwoValuedState],
) -> MembershipResult {
    use crate::states::{evaluate, Membership};
    let one = int(1);
    let (c, dev) = e
        .contexts()
        .iter()
        .map(|c| {
            let s: Rational = c.atoms().iter().map(|&a| point[a].clone()).sum();
            (c, s - &one)
        })
        .find(|(_, d)| !d.is_zero())
        .expect("point violates some context sum");
    let sign = if dev > Rational::zero() { int(1) } else { int(-1) };
    let mut witness = vec![Rational::zero(); e.atom_count()];
    for &a in c.atoms() {
        witness[a] = sign.clone();
    }
    let bound = states.iter().map(|v| evaluate(&witness, v)).max().expect("non-empty");
    MembershipResult {
        point,
        membership: Membership::NotClassical { witness, bound },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::cycle_logic;
    use crate::numeric::Mode;
    use crate::weights::{half_weight, midpoint_weight, path_weight};

    #[test]
    fn pentagon_bounds() {
        let b = cycle_bounds(5).unwrap();
        assert_eq!(b.classical_bound, int(2));
        assert!((b.theta - 5f64.sqrt()).abs() < 1e-12);
        assert_eq!(b.half_weight_value, rat(5, 2));
        assert!(!b.degenerate);
    }

    #[test]
    fn triangle_and_heptagon() {
        let t = cycle_bounds(3).unwrap();
        assert_eq!(
            (t.classical_bound.clone(), t.half_weight_value.clone(), t.degenerate),
            (int(1), rat(3, 2), true)
        );
        let h = cycle_bounds(7).unwrap();
        assert_eq!(h.classical_bound, int(3));
        assert!((h.theta - 3.317667207394096).abs() < 1e-12);
        assert!(matches!(cycle_bounds(2), Err(Error::InvalidN(2))));
    }

    #[test]
    fn odd_cycle_ordering() {
        for n in (5..=15).step_by(2) {
            let b = cycle_bounds(n).unwrap();
            let c = crate::numeric::rational_to_f64(&b.classical_bound);
            assert!(c + 1e-9 < b.theta && b.theta + 1e-9 < n as f64 / 2.0, "n = {n}");
        }
        for n in (4..=12).step_by(2) {
            let b = cycle_bounds(n).unwrap();
            assert_eq!(b.classical_bound, b.half_weight_value);
        }
    }

    #[test]
    fn thresholds() {
        let t = path_thresholds(5).unwrap();
        assert_eq!(t.r_classical, rat(1, 2));
        assert!((t.r_theta.unwrap() - (5f64.sqrt() - 2.0)).abs() < 1e-12);
        let t = path_thresholds(3).unwrap();
        assert_eq!((t.r_classical, t.r_theta), (int(1), None));
        assert_eq!(path_thresholds(4).unwrap().r_classical, int(0));
        assert!((path_thresholds(7).unwrap().r_theta.unwrap() - 0.1099162641747422).abs() < 1e-12);
    }

    #[test]
    fn classify_pentagon_regimes() {
        let e = cycle_logic(5).unwrap();
        let r = classify_weight(&e, &half_weight(&e).unwrap(), DEFAULT_TOL).unwrap();
        assert_eq!(r.label, RegionLabel::BeyondTheta);
        assert!(r
            .membership
            .as_ref()
            .unwrap()
            .verify(&enumerate_two_valued_states(&e, None).unwrap()));

        let p = path_weight(&e, &Value::Rational(rat(2, 5))).unwrap();
        let r = classify_weight(&e, &p, DEFAULT_TOL).unwrap();
        assert_eq!(r.label, RegionLabel::AdmissibleNonclassical);
        assert_eq!(r.beyond_theta, Some(false));

        let r = classify_weight(&e, &midpoint_weight(&e).unwrap(), DEFAULT_TOL).unwrap();
        assert_eq!(r.label, RegionLabel::Classical);

        let bad = crate::weights::constant_weight(&e, Value::Rational(rat(1, 2)));
        assert_eq!(
            classify_weight(&e, &bad, DEFAULT_TOL).unwrap().label,
            RegionLabel::NotAdmissible
        );
    }

    #[test]
    fn triangle_suppresses_theta() {
        let e = cycle_logic(3).unwrap();
        let r = classify_weight(&e, &half_weight(&e).unwrap(), DEFAULT_TOL).unwrap();
        assert_eq!(r.label, RegionLabel::AdmissibleNonclassical);
        assert_eq!(r.beyond_theta, None);
    }

    #[test]
    fn half_weights_by_parity() {
        for n in 3..=9 {
            let e = cycle_logic(n).unwrap();
            let r = classify_weight(&e, &half_weight(&e).unwrap(), DEFAULT_TOL).unwrap();
            assert_eq!(r.classical, n % 2 == 0, "n = {n}");
        }
    }

    #[test]
    fn float_point_off_the_affine_hull() {
        let e = cycle_logic(5).unwrap();
        let thirds = crate::weights::constant_weight(&e, Value::Float(1.0 / 3.0));
        let r = classify_weight(&e, &thirds, 1e-9).unwrap();
        assert!(r.admissible);
        let m = r.membership.unwrap();
        assert!(m.verify(&enumerate_two_valued_states(&e, None).unwrap()));
        // the same weight in exact mode is classical
        let exact = crate::weights::constant_weight(&e, Value::Rational(rat(1, 3)));
        assert_eq!(classify_weight(&e, &exact, 0.0).unwrap().label, RegionLabel::Classical);
        assert_eq!(exact.mode(), Mode::Rational);
    }
}
