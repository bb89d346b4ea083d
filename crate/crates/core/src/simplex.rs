//! Exact phase-1 simplex for `{x >= 0 : A x = b}` over the rationals.
//!
//! Dense tableau, Bland's rule for both entering and leaving variables.
//! Infeasibility comes with a Farkas vector `y` such that `yᵀA <= 0`
//! componentwise and `yᵀb > 0`.

use num_traits::{Signed, Zero};

use crate::numeric::Rational;

#[derive(Clone, Debug, PartialEq)]
pub enum Feasibility {
    Feasible(Vec<Rational>),
    Infeasible(Vec<Rational>),
}

/// `a` is row-major with `rows` rows, each of length `cols`.
pub fn phase_one(a: &[Vec<Rational>], b: &[Rational]) -> Feasibility {
    let m = a.len();
    assert_eq!(b.len(), m, "rhs length");
    let n = a.first().map_or(0, Vec::len);
    let width = n + m + 1;
    let rhs = width - 1;

    let sign: Vec<bool> = b.iter().map(|v| v.is_negative()).collect();
    let mut t: Vec<Vec<Rational>> = (0..=m).map(|_| vec![Rational::zero(); width]).collect();
    for i in 0..m {
        for j in 0..n {
            t[i][j] = if sign[i] { -a[i][j].clone() } else { a[i][j].clone() };
        }
        t[i][n + i] = Rational::from_integer(1.into());
        t[i][rhs] = b[i].abs();
    }
    // reduced-cost row for min sum(artificials)
    for j in (0..n).chain([rhs]) {
        let s: Rational = (0..m).map(|i| t[i][j].clone()).sum();
        t[m][j] = -s;
    }
    let mut basis: Vec<usize> = (n..n + m).collect();

    while let Some(enter) = (0..n + m).find(|&j| t[m][j].is_negative()) {
        let mut leave: Option<(usize, Rational)> = None;
        for i in 0..m {
            if t[i][enter].is_positive() {
                let ratio = &t[i][rhs] / &t[i][enter];
                let better = match &leave {
                    None => true,
                    Some((li, best)) => ratio < *best || (ratio == *best && basis[i] < basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        // phase one is bounded below by zero, so some row always qualifies
        let (row, _) = leave.expect("phase-one objective is bounded");
        pivot(&mut t, row, enter);
        basis[row] = enter;
    }

    let objective = -t[m][rhs].clone();
    if objective.is_zero() {
        let mut x = vec![Rational::zero(); n];
        for (i, &j) in basis.iter().enumerate() {
            if j < n {
                x[j] = t[i][rhs].clone();
            }
        }
        Feasibility::Feasible(x)
    } else {
        // reduced cost of artificial k is 1 - y_k
        let one = Rational::from_integer(1.into());
        let y = (0..m)
            .map(|k| {
                let yk = &one - &t[m][n + k];
                if sign[k] {
                    -yk
                } else {
                    yk
                }
            })
            .collect();
        Feasibility::Infeasible(y)
    }
}

fn pivot(t: &mut [Vec<Rational>], row: usize, col: usize) {
    let p = t[row][col].clone();
    for v in t[row].iter_mut() {
        *v = &*v / &p;
    }
    let pivot_row = t[row].clone();
    for (i, r) in t.iter_mut().enumerate() {
        if i == row || r[col].is_zero() {
            continue;
        }
        let f = r[col].clone();
        for (v, pv) in r.iter_mut().zip(&pivot_row) {
            if !pv.is_zero() {
                *v -= &f * pv;
            }
        }
    }
}
