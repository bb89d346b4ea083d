//! Three-stage analysis of per-context outcome counts: estimate each
//! context's frequencies, test whether shared atoms agree across contexts,
//! then reconstruct one global weight and classify it.

use std::collections::BTreeMap;
use std::io::Read;

use num_traits::{Signed, Zero};
use rand::Rng;
use rand_distr::{Binomial, Distribution};

use crate::bounds::{classify_weight, RegionReport};
use crate::error::{Error, Result};
use crate::logic::EventStructure;
use crate::numeric::{int, rational_to_f64, Rational};
use crate::weights::Weight;

pub const DEFAULT_Z_THRESHOLD: f64 = 1.96;

const BETWEEN_SUBJECTS_CAVEAT: &str = "Each context was estimated from its own sample. If contexts were measured on \
different subjects or sessions, agreement on shared atoms is an assumption about the population, and a failed \
single-valuedness test may reflect genuine disturbance or a mis-specified exclusivity structure rather than noise.";

/// Outcome counts per context, aligned with each context's atom list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountData {
    counts: Vec<Vec<u64>>,
    totals: Vec<u64>,
}

impl CountData {
    pub fn new(e: &EventStructure, counts: Vec<Vec<u64>>) -> Result<Self> {
        if counts.len() != e.contexts().len() {
            return Err(Error::Schema(format!(
                "{} count blocks for {} contexts",
                counts.len(),
                e.contexts().len()
            )));
        }
        let mut totals = Vec::with_capacity(counts.len());
        for (c, k) in e.contexts().iter().zip(&counts) {
            if k.len() != c.len() {
                return Err(Error::Schema(format!(
                    "context `{}` has {} atoms but {} counts",
                    c.name(),
                    c.len(),
                    k.len()
                )));
            }
            let n: u64 = k.iter().sum();
            if n == 0 {
                return Err(Error::EmptyContextSample(c.name().to_string()));
            }
            totals.push(n);
        }
        Ok(CountData { counts, totals })
    }

    /// From `context name -> atom name -> count`. Every context must be
    /// present; atoms omitted inside a context count as zero.
    pub fn from_named(e: &EventStructure, named: &BTreeMap<String, BTreeMap<String, i64>>) -> Result<Self> {
        for name in named.keys() {
            if e.context_index(name).is_none() {
                return Err(Error::UnknownContext(name.clone()));
            }
        }
        let mut counts = Vec::with_capacity(e.contexts().len());
        for c in e.contexts() {
            let block = named
                .get(c.name())
                .ok_or_else(|| Error::Schema(format!("no counts for context `{}`", c.name())))?;
            let mut k = vec![0u64; c.len()];
            for (atom, &n) in block {
                let pos = e
                    .atom_index(atom)
                    .and_then(|a| c.atoms().iter().position(|&x| x == a))
                    .ok_or_else(|| Error::UnknownAtom(format!("{atom} (context {})", c.name())))?;
                if n < 0 {
                    return Err(Error::NegativeCount {
                        context: c.name().into(),
                        atom: atom.clone(),
                        count: n,
                    });
                }
                k[pos] = n as u64;
            }
            counts.push(k);
        }
        Self::new(e, counts)
    }

    /// Rows `context,atom,count`; a leading header row is skipped. Repeated
    /// rows for the same cell are added.
    pub fn from_csv<R: Read>(e: &EventStructure, reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut named: BTreeMap<String, BTreeMap<String, i64>> = BTreeMap::new();
        for (i, row) in rdr.records().enumerate() {
            let row = row?;
            if row.len() != 3 {
                return Err(Error::Schema(format!(
                    "csv row {} has {} fields, expected 3",
                    i + 1,
                    row.len()
                )));
            }
            let n = match row[2].parse::<i64>() {
                Ok(n) => n,
                Err(_) if i == 0 => continue,
                Err(_) => return Err(Error::Schema(format!("csv row {}: bad count `{}`", i + 1, &row[2]))),
            };
            *named
                .entry(row[0].to_string())
                .or_default()
                .entry(row[1].to_string())
                .or_default() += n;
        }
        Self::from_named(e, &named)
    }

    pub fn counts(&self, ci: usize) -> &[u64] {
        &self.counts[ci]
    }

    pub fn total(&self, ci: usize) -> u64 {
        self.totals[ci]
    }

    pub fn context_count(&self) -> usize {
        self.counts.len()
    }

    fn count_of(&self, e: &EventStructure, ci: usize, atom: usize) -> u64 {
        let pos = e.contexts()[ci]
            .atoms()
            .iter()
            .position(|&a| a == atom)
            .expect("member");
        self.counts[ci][pos]
    }
}

/// Draws `n` outcomes per context from the weight's restriction to that
/// context, by sequential conditional binomials.
pub fn sample_counts<R: Rng + ?Sized>(e: &EventStructure, p: &Weight, n: u64, rng: &mut R) -> Result<CountData> {
    p.check_size(e)?;
    let pf = p.to_f64_vec();
    let mut counts = Vec::with_capacity(e.contexts().len());
    for c in e.contexts() {
        let probs: Vec<f64> = c.atoms().iter().map(|&a| pf[a].max(0.0)).collect();
        let mut mass: f64 = probs.iter().sum();
        let mut left = n;
        let mut k = Vec::with_capacity(probs.len());
        for (i, &q) in probs.iter().enumerate() {
            let draw = if i + 1 == probs.len() {
                left
            } else if left == 0 || q <= 0.0 {
                0
            } else {
                let share = (q / mass).clamp(0.0, 1.0);
                Binomial::new(left, share).expect("valid binomial").sample(rng)
            };
            k.push(draw);
            left -= draw;
            mass -= q;
        }
        counts.push(k);
    }
    CountData::new(e, counts)
}

/// `f_C(a) = count / N_C`, exact.
#[derive(Clone, Debug, PartialEq)]
pub struct FrequencyEstimates {
    pub contexts: Vec<Vec<Rational>>,
}

pub fn estimate_frequencies(d: &CountData) -> FrequencyEstimates {
    let contexts = d
        .counts
        .iter()
        .zip(&d.totals)
        .map(|(k, &n)| k.iter().map(|&x| Rational::new(x.into(), n.into())).collect())
        .collect();
    FrequencyEstimates { contexts }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PairComparison {
    pub atom: usize,
    pub first: usize,
    pub second: usize,
    pub frequency_first: f64,
    pub frequency_second: f64,
    pub gap: f64,
    pub pooled: f64,
    /// Pooled two-proportion z; `±inf` when the pooled proportion is 0 or 1
    /// and the frequencies still differ.
    pub z: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AtomVerdict {
    pub atom: usize,
    pub max_abs_z: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SingleValuednessReport {
    pub comparisons: Vec<PairComparison>,
    pub atoms: Vec<AtomVerdict>,
    pub max_abs_z: f64,
    pub threshold: f64,
    pub passed: bool,
}

/// Pairwise pooled two-proportion z tests for every shared atom and every
/// pair of contexts containing it.
pub fn single_valuedness_test(e: &EventStructure, d: &CountData, z_threshold: f64) -> SingleValuednessReport {
    let inc = e.incidence();
    let mut comparisons = Vec::new();
    let mut atoms = Vec::new();
    for a in 0..e.atom_count() {
        let cs = inc.contexts_of(a);
        if cs.len() < 2 {
            continue;
        }
        let mut worst = 0.0f64;
        for (i, &c1) in cs.iter().enumerate() {
            for &c2 in &cs[i + 1..] {
                let (k1, n1) = (d.count_of(e, c1, a) as f64, d.total(c1) as f64);
                let (k2, n2) = (d.count_of(e, c2, a) as f64, d.total(c2) as f64);
                let (f1, f2) = (k1 / n1, k2 / n2);
                let pooled = (k1 + k2) / (n1 + n2);
                let var = pooled * (1.0 - pooled) * (1.0 / n1 + 1.0 / n2);
                let diff = f1 - f2;
                let z = if var > 0.0 {
                    diff / var.sqrt()
                } else if diff == 0.0 {
                    0.0
                } else {
                    f64::INFINITY.copysign(diff)
                };
                worst = worst.max(z.abs());
                comparisons.push(PairComparison {
                    atom: a,
                    first: c1,
                    second: c2,
                    frequency_first: f1,
                    frequency_second: f2,
                    gap: diff.abs(),
                    pooled,
                    z,
                });
            }
        }
        atoms.push(AtomVerdict {
            atom: a,
            max_abs_z: worst,
            passed: worst <= z_threshold,
        });
    }
    let max_abs_z = atoms.iter().map(|v| v.max_abs_z).fold(0.0, f64::max);
    SingleValuednessReport {
        comparisons,
        atoms,
        max_abs_z,
        threshold: z_threshold,
        passed: max_abs_z <= z_threshold,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReconstructedWeight {
    /// Count-weighted average of each atom's frequencies over its contexts.
    pub pooled: Vec<Rational>,
    /// `Σ_{a∈C} p̂(a) - 1` per context.
    pub residuals: Vec<Rational>,
    /// Least-squares projection of `p̂` onto the context-sum equations.
    pub projected: Weight,
    /// Atoms never observed anywhere; held at zero by the projection.
    pub pinned: Vec<usize>,
    /// Atoms of `projected` outside `[0, 1]`.
    pub box_violations: Vec<usize>,
    pub max_adjustment: Rational,
}

/// Pools the frequencies and projects them onto `{p : Σ_{a∈C} p(a) = 1 ∀C}`
/// by solving the KKT system exactly. Atoms with zero counts in every
/// context are held at zero; if that makes the equations inconsistent the
/// plain projection is used.
pub fn reconstruct_weight(e: &EventStructure, d: &CountData) -> Result<ReconstructedWeight> {
    if d.context_count() != e.contexts().len() {
        return Err(Error::Schema("count data does not match the structure".into()));
    }
    let inc = e.incidence();
    let pooled: Vec<Rational> = (0..e.atom_count())
        .map(|a| {
            let cs = inc.contexts_of(a);
            let k: u64 = cs.iter().map(|&c| d.count_of(e, c, a)).sum();
            let n: u64 = cs.iter().map(|&c| d.total(c)).sum();
            Rational::new(k.into(), n.into())
        })
        .collect();
    let residuals: Vec<Rational> = e
        .contexts()
        .iter()
        .map(|c| c.atoms().iter().map(|&a| pooled[a].clone()).sum::<Rational>() - int(1))
        .collect();

    let unobserved: Vec<usize> = (0..e.atom_count()).filter(|&a| pooled[a].is_zero()).collect();
    let (projected, pinned) = match project(e, &pooled, &unobserved) {
        Ok(p) => (p, unobserved),
        Err(Error::SingularKkt) if !unobserved.is_empty() => (project(e, &pooled, &[])?, Vec::new()),
        Err(other) => return Err(other),
    };
    let box_violations = (0..projected.len())
        .filter(|&a| projected[a].is_negative() || projected[a] > int(1))
        .collect();
    let max_adjustment = projected
        .iter()
        .zip(&pooled)
        .map(|(x, y)| (x - y).abs())
        .max()
        .unwrap_or_else(Rational::zero);
    Ok(ReconstructedWeight {
        pooled,
        residuals,
        projected: Weight::rational(projected),
        pinned,
        box_violations,
        max_adjustment,
    })
}

/// `argmin ||p - target||²` subject to the context sums and `p(a) = 0` for
/// pinned atoms.
pub(crate) fn project(e: &EventStructure, target: &[Rational], pinned: &[usize]) -> Result<Vec<Rational>> {
    let free: Vec<usize> = (0..e.atom_count()).filter(|a| !pinned.contains(a)).collect();
    let col = |a: usize| free.iter().position(|&f| f == a);
    let rows: Vec<Vec<Rational>> = e
        .contexts()
        .iter()
        .map(|c| {
            let mut r = vec![Rational::zero(); free.len()];
            for &a in c.atoms() {
                if let Some(j) = col(a) {
                    r[j] = int(1);
                }
            }
            r
        })
        .collect();
    let keep = independent_rows(&rows, &vec![int(1); rows.len()])?;

    // [I Aᵀ; A 0] [p; μ] = [target; 1]
    let (n, m) = (free.len(), keep.len());
    let mut kkt = vec![vec![Rational::zero(); n + m + 1]; n + m];
    for i in 0..n {
        kkt[i][i] = int(1);
        kkt[i][n + m] = target[free[i]].clone();
    }
    for (k, &r) in keep.iter().enumerate() {
        for j in 0..n {
            kkt[i_row(n, k)][j] = rows[r][j].clone();
            kkt[j][n + k] = rows[r][j].clone();
        }
        kkt[i_row(n, k)][n + m] = int(1);
    }
    let sol = solve_dense(kkt).ok_or(Error::SingularKkt)?;
    let mut p = vec![Rational::zero(); e.atom_count()];
    for (i, &a) in free.iter().enumerate() {
        p[a] = sol[i].clone();
    }
    Ok(p)
}

fn i_row(n: usize, k: usize) -> usize {
    n + k
}

/// Indices of a maximal independent subset of the equations `rows · x = rhs`,
/// or `SingularKkt` when a dependent row contradicts the others.
fn independent_rows(rows: &[Vec<Rational>], rhs: &[Rational]) -> Result<Vec<usize>> {
    let mut basis: Vec<(usize, Vec<Rational>, Rational)> = Vec::new(); // (pivot column, row, rhs)
    let mut keep = Vec::new();
    for (i, (row, b)) in rows.iter().zip(rhs).enumerate() {
        let mut r = row.clone();
        let mut v = b.clone();
        for (pc, br, bb) in &basis {
            if !r[*pc].is_zero() {
                let f = r[*pc].clone() / &br[*pc];
                for (x, y) in r.iter_mut().zip(br) {
                    *x -= &f * y;
                }
                v -= &f * bb;
            }
        }
        match r.iter().position(|x| !x.is_zero()) {
            Some(pc) => {
                basis.push((pc, r, v));
                keep.push(i);
            }
            None if !v.is_zero() => return Err(Error::SingularKkt),
            None => {}
        }
    }
    Ok(keep)
}

/// Gaussian elimination with partial pivoting (largest magnitude) on an
/// augmented square system.
fn solve_dense(mut a: Vec<Vec<Rational>>) -> Option<Vec<Rational>> {
    let n = a.len();
    for k in 0..n {
        let piv = (k..n)
            .filter(|&i| !a[i][k].is_zero())
            .max_by(|&i, &j| a[i][k].abs().cmp(&a[j][k].abs()))?;
        a.swap(k, piv);
        let p = a[k][k].clone();
        for i in k + 1..n {
            if a[i][k].is_zero() {
                continue;
            }
            let f = &a[i][k] / &p;
            let (top, bottom) = a.split_at_mut(i);
            for (x, y) in bottom[0][k..].iter_mut().zip(&top[k][k..]) {
                *x -= &f * y;
            }
        }
    }
    let mut x = vec![Rational::zero(); n];
    for k in (0..n).rev() {
        let s: Rational = (k + 1..n).map(|j| &a[k][j] * &x[j]).sum();
        x[k] = (&a[k][n] - s) / &a[k][k];
    }
    Some(x)
}

#[derive(Clone, Debug, PartialEq)]
pub struct AnalysisReport {
    pub frequencies: FrequencyEstimates,
    pub single_valuedness: SingleValuednessReport,
    pub reconstruction: ReconstructedWeight,
    pub classification: Option<RegionReport>,
    pub withheld: Option<String>,
    pub caveat: String,
}

/// Estimate, test single-valuedness, reconstruct, classify. Classification
/// is withheld when the test fails or the projection leaves `[0, 1]`.
pub fn analyze(e: &EventStructure, d: &CountData, z_threshold: f64, tol: f64) -> Result<AnalysisReport> {
    let frequencies = estimate_frequencies(d);
    let single_valuedness = single_valuedness_test(e, d, z_threshold);
    let reconstruction = reconstruct_weight(e, d)?;
    let withheld = if !single_valuedness.passed {
        Some(format!(
            "single-valuedness rejected: max |z| = {} exceeds {}",
            crate::numeric::format_float(single_valuedness.max_abs_z),
            z_threshold
        ))
    } else if !reconstruction.box_violations.is_empty() {
        let names: Vec<&str> = reconstruction.box_violations.iter().map(|&a| e.atom_name(a)).collect();
        Some(format!("projected weight leaves [0, 1] at {}", names.join(", ")))
    } else {
        None
    };
    let classification = match withheld {
        None => Some(classify_weight(e, &reconstruction.projected, tol)?),
        Some(_) => None,
    };
    Ok(AnalysisReport {
        frequencies,
        single_valuedness,
        reconstruction,
        classification,
        withheld,
        caveat: BETWEEN_SUBJECTS_CAVEAT.to_string(),
    })
}

/// Float view of a reconstruction, handy for reports.
pub fn projected_f64(r: &ReconstructedWeight) -> Vec<f64> {
    r.projected
        .values()
        .iter()
        .map(|v| rational_to_f64(&v.to_rational().expect("rational")))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::cycle_logic;
    use crate::numeric::{rat, Value};
    use crate::weights::{check_admissible, half_weight, path_weight};
    use rand::SeedableRng;

    fn pentagon_counts(e: &EventStructure, p: &Weight, n: u64) -> CountData {
        // exact expected counts
        let counts = e
            .contexts()
            .iter()
            .map(|c| {
                c.atoms()
                    .iter()
                    .map(|&a| {
                        let v = p.get(a).to_rational().unwrap() * Rational::from_integer(n.into());
                        assert!(v.is_integer());
                        v.to_integer().try_into().unwrap()
                    })
                    .collect()
            })
            .collect();
        CountData::new(e, counts).unwrap()
    }

    #[test]
    fn named_ingest_and_errors() {
        let e = cycle_logic(5).unwrap();
        let mut named: BTreeMap<String, BTreeMap<String, i64>> = BTreeMap::new();
        for c in e.contexts() {
            named.insert(
                c.name().into(),
                c.atoms().iter().map(|&a| (e.atom_name(a).to_string(), 10)).collect(),
            );
        }
        named.insert(
            "C1".into(),
            [("a1", 50), ("a2", 48), ("x1", 2)]
                .map(|(a, n)| (a.to_string(), n))
                .into(),
        );
        let d = CountData::from_named(&e, &named).unwrap();
        assert_eq!(d.total(0), 100);
        let f = estimate_frequencies(&d);
        assert_eq!(f.contexts[0], vec![rat(1, 2), rat(12, 25), rat(1, 50)]);

        let mut bad = named.clone();
        bad.get_mut("C1").unwrap().insert("a3".into(), 1);
        assert!(matches!(CountData::from_named(&e, &bad), Err(Error::UnknownAtom(_))));
        let mut bad = named.clone();
        bad.get_mut("C1").unwrap().insert("a1".into(), -1);
        assert!(matches!(
            CountData::from_named(&e, &bad),
            Err(Error::NegativeCount { .. })
        ));
        let mut bad = named.clone();
        bad.insert("C2".into(), [("a2".to_string(), 0)].into());
        assert!(matches!(
            CountData::from_named(&e, &bad),
            Err(Error::EmptyContextSample(_))
        ));
        let mut bad = named.clone();
        bad.remove("C3");
        assert!(matches!(CountData::from_named(&e, &bad), Err(Error::Schema(_))));
    }

    #[test]
    fn single_outcome_context() {
        let e = EventStructure::new(["a"], [["a"]]).unwrap();
        let d = CountData::new(&e, vec![vec![1]]).unwrap();
        assert_eq!(estimate_frequencies(&d).contexts, vec![vec![int(1)]]);
    }

    #[test]
    fn csv_ingest() {
        let e = cycle_logic(3).unwrap();
        let text = "context,atom,count\nC1,a1,3\nC1,x1,1\nC2,a2,4\nC3,x3,2\nC3,a3,2\n";
        let d = CountData::from_csv(&e, text.as_bytes()).unwrap();
        assert_eq!(d.counts(0), &[3, 0, 1]);
        assert_eq!(d.total(2), 4);
        assert!(CountData::from_csv(&e, "C1,a1,x\n".as_bytes()).is_err());
    }

    #[test]
    fn z_statistic_hand_value() {
        let e = EventStructure::new(["s", "b", "c"], [["s", "b"], ["s", "c"]]).unwrap();
        let d = CountData::new(&e, vec![vec![60, 40], vec![40, 60]]).unwrap();
        let rep = single_valuedness_test(&e, &d, 1.96);
        assert_eq!(rep.comparisons.len(), 1);
        let c = &rep.comparisons[0];
        assert!((c.gap - 0.2).abs() < 1e-15 && (c.pooled - 0.5).abs() < 1e-15);
        assert!((c.z - 2.8284271247461903).abs() < 1e-12);
        assert!(!rep.passed);

        let same = CountData::new(&e, vec![vec![60, 40], vec![60, 40]]).unwrap();
        let rep = single_valuedness_test(&e, &same, 1.96);
        assert_eq!(rep.max_abs_z, 0.0);
        assert!(rep.passed);

        let degenerate = CountData::new(&e, vec![vec![0, 10], vec![0, 10]]).unwrap();
        assert_eq!(single_valuedness_test(&e, &degenerate, 1.96).max_abs_z, 0.0);
    }

    #[test]
    fn exact_data_reconstructs_identically() {
        let e = cycle_logic(5).unwrap();
        for p in [
            path_weight(&e, &Value::Rational(int(1))).unwrap(),
            half_weight(&e).unwrap(),
        ] {
            let d = pentagon_counts(&e, &p, 600);
            let r = reconstruct_weight(&e, &d).unwrap();
            assert_eq!(r.projected, p);
            assert_eq!(r.pooled, p.to_rational_vec().unwrap());
            assert!(r.residuals.iter().all(Zero::is_zero));
            assert!(r.max_adjustment.is_zero());
        }
    }

    #[test]
    fn perturbed_context_is_repaired() {
        let e = cycle_logic(5).unwrap();
        let h = half_weight(&e).unwrap();
        let mut counts: Vec<Vec<u64>> = e
            .contexts()
            .iter()
            .map(|c| {
                c.atoms()
                    .iter()
                    .map(|&a| if h.get(a).is_zero() { 0 } else { 50 })
                    .collect()
            })
            .collect();
        // C1 = (a1, a2, x1): a1 observed at 0.52
        counts[0] = vec![52, 48, 0];
        let d = CountData::new(&e, counts).unwrap();
        let r = reconstruct_weight(&e, &d).unwrap();
        assert!(check_admissible(&e, &r.projected, 0.0).unwrap().admissible);
        assert!(r.max_adjustment <= rat(2, 100));
    }

    #[test]
    fn projection_drops_redundant_equations() {
        // {a,b}, {c,d}, {a,c}, {b,d}: rank 3 of 4 equations
        let e = EventStructure::new(["a", "b", "c", "d"], [["a", "b"], ["c", "d"], ["a", "c"], ["b", "d"]]).unwrap();
        let target = vec![rat(1, 2), rat(1, 3), rat(1, 4), rat(1, 5)];
        let p = project(&e, &target, &[]).unwrap();
        for c in e.contexts() {
            assert_eq!(c.atoms().iter().map(|&a| p[a].clone()).sum::<Rational>(), int(1));
        }
        // {a,b}, {a,b,c} force c = 0 whatever the target says
        let e = EventStructure::new(["a", "b", "c"], [vec!["a", "b"], vec!["a", "b", "c"]]).unwrap();
        assert_eq!(project(&e, &[rat(1, 2), rat(1, 2), int(1)], &[]).unwrap()[2], int(0));
        let e2 = EventStructure::new(["a", "b"], [vec!["a"], vec!["b"], vec!["a", "b"]]).unwrap();
        assert!(matches!(project(&e2, &[int(1), int(1)], &[]), Err(Error::SingularKkt)));
    }

    #[test]
    fn sampling_is_seeded() {
        let e = cycle_logic(5).unwrap();
        let p = half_weight(&e).unwrap();
        let mut r1 = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let mut r2 = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let d1 = sample_counts(&e, &p, 100_000, &mut r1).unwrap();
        assert_eq!(d1, sample_counts(&e, &p, 100_000, &mut r2).unwrap());
        let f = estimate_frequencies(&d1);
        for (c, fs) in e.contexts().iter().zip(&f.contexts) {
            for (&a, v) in c.atoms().iter().zip(fs) {
                assert!((rational_to_f64(v) - p.get(a).to_f64()).abs() < 0.01);
            }
            assert_eq!(fs.iter().sum::<Rational>(), int(1));
        }
    }

    #[test]
    fn withheld_on_disturbance() {
        let e = EventStructure::new(["s", "b", "c"], [["s", "b"], ["s", "c"]]).unwrap();
        let d = CountData::new(&e, vec![vec![900, 100], vec![100, 900]]).unwrap();
        let rep = analyze(&e, &d, 1.96, 1e-9).unwrap();
        assert!(rep.classification.is_none());
        assert!(rep.withheld.unwrap().contains("single-valuedness"));
    }
}
