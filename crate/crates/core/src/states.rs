//! Two-valued states and exact classical-hull membership.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::logic::EventStructure;
use crate::numeric::{Rational, DEFAULT_TOL};
use crate::simplex::{phase_one, Feasibility};
use crate::weights::{check_admissible, Weight};

pub const DEFAULT_STATE_LIMIT: usize = 1_000_000;

/// A dispersion-free weight: exactly one atom of every context is true.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TwoValuedState {
    values: Vec<bool>,
}

impl TwoValuedState {
    pub fn new(values: Vec<bool>) -> Self {
        TwoValuedState { values }
    }

    pub fn values(&self) -> &[bool] {
        &self.values
    }

    pub fn get(&self, atom: usize) -> bool {
        self.values[atom]
    }

    /// Atoms valued one, in structure order.
    pub fn true_atoms(&self) -> Vec<usize> {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, v)| **v)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn is_valid_for(&self, e: &EventStructure) -> bool {
        self.values.len() == e.atom_count()
            && e.contexts()
                .iter()
                .all(|c| c.atoms().iter().filter(|&&a| self.values[a]).count() == 1)
    }

    pub fn to_weight(&self) -> Weight {
        Weight::rational(
            self.values
                .iter()
                .map(|&v| if v { Rational::one() } else { Rational::zero() })
                .collect(),
        )
    }
}

/// All two-valued states, by backtracking over contexts in index order and
/// picking the true atom in structure order. `limit` defaults to
/// [`DEFAULT_STATE_LIMIT`].
pub fn enumerate_two_valued_states(e: &EventStructure, limit: Option<usize>) -> Result<Vec<TwoValuedState>> {
    let limit = limit.unwrap_or(DEFAULT_STATE_LIMIT);
    let mut search = Search {
        e,
        limit,
        assign: vec![None; e.atom_count()],
        out: Vec::new(),
    };
    search.run(0)?;
    Ok(search.out)
}

struct Search<'a> {
    e: &'a EventStructure,
    limit: usize,
    assign: Vec<Option<bool>>,
    out: Vec<TwoValuedState>,
}

impl Search<'_> {
    fn run(&mut self, ci: usize) -> Result<()> {
        let contexts = self.e.contexts();
        if ci == contexts.len() {
            if self.out.len() == self.limit {
                return Err(Error::EnumerationLimitExceeded { limit: self.limit });
            }
            // every atom lies in some context, so all are assigned here
            self.out.push(TwoValuedState::new(
                self.assign.iter().map(|v| v.unwrap_or(false)).collect(),
            ));
            return Ok(());
        }
        let atoms = contexts[ci].atoms();
        let ones = atoms.iter().filter(|&&a| self.assign[a] == Some(true)).count();
        if ones > 1 {
            return Ok(());
        }
        let free: Vec<usize> = atoms.iter().copied().filter(|&a| self.assign[a].is_none()).collect();
        if ones == 1 {
            self.set(&free, None);
            self.run(ci + 1)?;
        } else {
            for &chosen in &free {
                self.set(&free, Some(chosen));
                self.run(ci + 1)?;
            }
        }
        for &a in &free {
            self.assign[a] = None;
        }
        Ok(())
    }

    fn set(&mut self, free: &[usize], chosen: Option<usize>) {
        for &a in free {
            self.assign[a] = Some(Some(a) == chosen);
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Membership {
    /// `p = Σ λ_k v_k` over the listed state indices, `λ_k > 0`, `Σ λ_k = 1`.
    Classical { decomposition: Vec<(usize, Rational)> },
    /// `c·p > bound >= c·v` for every two-valued state `v`.
    NotClassical { witness: Vec<Rational>, bound: Rational },
}

#[derive(Clone, Debug, PartialEq)]
pub struct MembershipResult {
    /// The exact point that was decided (floats decomposed bit-exactly).
    pub point: Vec<Rational>,
    pub membership: Membership,
}

impl MembershipResult {
    pub fn is_classical(&self) -> bool {
        matches!(self.membership, Membership::Classical { .. })
    }

    /// Re-checks the certificate by direct exact arithmetic.
    pub fn verify(&self, states: &[TwoValuedState]) -> bool {
        match &self.membership {
            Membership::Classical { decomposition } => {
                let total: Rational = decomposition.iter().map(|(_, l)| l.clone()).sum();
                if !total.is_one()
                    || decomposition
                        .iter()
                        .any(|(k, l)| !l.is_positive() || *k >= states.len())
                {
                    return false;
                }
                (0..self.point.len()).all(|a| {
                    let s: Rational = decomposition
                        .iter()
                        .filter(|(k, _)| states[*k].get(a))
                        .map(|(_, l)| l.clone())
                        .sum();
                    s == self.point[a]
                })
            }
            Membership::NotClassical { witness, bound } => {
                let cp: Rational = witness.iter().zip(&self.point).map(|(c, p)| c * p).sum();
                cp > *bound && states.iter().all(|v| evaluate(witness, v) <= *bound)
            }
        }
    }
}

/// `c·v` for a two-valued state.
pub fn evaluate(witness: &[Rational], v: &TwoValuedState) -> Rational {
    witness
        .iter()
        .zip(v.values())
        .filter(|(_, &b)| b)
        .map(|(c, _)| c.clone())
        .sum()
}

/// Decides whether `p` lies in the convex hull of the two-valued states by
/// exact phase-one simplex. Float weights must pass the admissibility check
/// at the default tolerance and are then decided at their exact binary value.
pub fn classical_membership(
    e: &EventStructure,
    p: &Weight,
    states: Option<&[TwoValuedState]>,
) -> Result<MembershipResult> {
    let report = check_admissible(e, p, DEFAULT_TOL)?;
    if !report.admissible {
        return Err(Error::NotAdmissible {
            max_deviation: report.max_deviation.to_string(),
        });
    }
    let owned;
    let states = match states {
        Some(s) => s,
        None => {
            owned = enumerate_two_valued_states(e, None)?;
            &owned
        }
    };
    if states.is_empty() {
        return Err(Error::NoTwoValuedStates);
    }
    let point = p.to_rational_vec()?;

    // rows: one per atom, then the normalisation row
    let n_atoms = e.atom_count();
    let mut a: Vec<Vec<Rational>> = (0..n_atoms)
        .map(|atom| {
            states
                .iter()
                .map(|v| if v.get(atom) { Rational::one() } else { Rational::zero() })
                .collect()
        })
        .collect();
    a.push(vec![Rational::one(); states.len()]);
    let mut b = point.clone();
    b.push(Rational::one());

    let membership = match phase_one(&a, &b) {
        Feasibility::Feasible(lambda) => Membership::Classical {
            decomposition: lambda
                .into_iter()
                .enumerate()
                .filter(|(_, l)| l.is_positive())
                .collect(),
        },
        Feasibility::Infeasible(y) => {
            // c·v + y0 <= 0 for all states, c·p + y0 > 0
            let witness = normalise(&y[..n_atoms]);
            let bound = states.iter().map(|v| evaluate(&witness, v)).max().expect("non-empty");
            Membership::NotClassical { witness, bound }
        }
    };
    Ok(MembershipResult { point, membership })
}

/// Scales a functional to coprime integer coefficients (positive scale only).
fn normalise(c: &[Rational]) -> Vec<Rational> {
    use num_integer::Integer;
    let lcm = c.iter().fold(num_bigint::BigInt::one(), |acc, v| acc.lcm(v.denom()));
    let ints: Vec<num_bigint::BigInt> = c
        .iter()
        .map(|v| (v * Rational::from_integer(lcm.clone())).to_integer())
        .collect();
    let gcd = ints.iter().fold(num_bigint::BigInt::zero(), |acc, v| acc.gcd(v));
    if gcd.is_zero() {
        return c.to_vec();
    }
    ints.into_iter().map(|v| Rational::from_integer(v / &gcd)).collect()
}

/// Largest number of cyclic atoms a two-valued state can make true.
pub fn max_cyclic_value(e: &EventStructure, states: &[TwoValuedState]) -> Result<usize> {
    let view = e.as_cycle()?;
    Ok(states
        .iter()
        .map(|v| view.cyclic.iter().filter(|&&a| v.get(a)).count())
        .max()
        .unwrap_or(0))
}
