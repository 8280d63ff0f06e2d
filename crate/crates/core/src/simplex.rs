//! Phase-1 simplex in exact rational arithmetic with Bland's anti-cycling
//! rule, for the feasibility system  A x = b, x >= 0  with b >= 0.
//!
//! Feasible systems yield a basic feasible solution; infeasible ones yield
//! the Farkas dual vector y with y.A <= 0 componentwise and y.b > 0.

use num_traits::{Signed, Zero};

use crate::rational::Rational;

#[derive(Debug)]
pub enum Phase1Outcome {
    /// Basic feasible solution: (column index, value) for the structural
    /// columns that are basic with any value (zeros included).
    Feasible { basic: Vec<(usize, Rational)> },
    /// Farkas certificate of infeasibility.
    Infeasible { dual: Vec<Rational> },
}

/// `columns[j]` is the j-th structural column of A (length m). Panics if
/// some b_i < 0; callers normalize first (probabilities already are >= 0).
pub fn phase1(columns: &[Vec<Rational>], b: &[Rational]) -> Phase1Outcome {
    let m = b.len();
    let n = columns.len();
    for (j, col) in columns.iter().enumerate() {
        assert_eq!(col.len(), m, "column {j} has wrong length");
    }
    assert!(b.iter().all(|v| !v.is_negative()), "b must be nonnegative");

    // tableau over structural + artificial columns
    let total = n + m;
    let mut t: Vec<Vec<Rational>> = Vec::with_capacity(m);
    for i in 0..m {
        let mut row: Vec<Rational> = (0..n).map(|j| columns[j][i].clone()).collect();
        for k in 0..m {
            row.push(if k == i { Rational::from_integer(1.into()) } else { Rational::zero() });
        }
        t.push(row);
    }
    let mut rhs: Vec<Rational> = b.to_vec();
    let mut basis: Vec<usize> = (n..total).collect();

    // phase-1 reduced costs: r_j = c_j - y.A_j with initial y = (1, ..., 1)
    let mut r: Vec<Rational> = Vec::with_capacity(total);
    for j in 0..n {
        let mut s = Rational::zero();
        for i in 0..m {
            s += &t[i][j];
        }
        r.push(-s);
    }
    for _ in 0..m {
        r.push(Rational::zero());
    }
    let mut obj: Rational = rhs.iter().sum();

    loop {
        // Bland: entering = lowest-index column with negative reduced cost
        let entering = match (0..total).find(|&j| r[j] < Rational::zero()) {
            Some(j) => j,
            None => break,
        };
        // ratio test; ties broken by smallest basis variable index
        let mut pivot_row: Option<usize> = None;
        let mut best: Option<Rational> = None;
        for i in 0..m {
            if t[i][entering] > Rational::zero() {
                let ratio = &rhs[i] / &t[i][entering];
                let better = match &best {
                    None => true,
                    Some(b) => {
                        ratio < *b || (ratio == *b && basis[i] < basis[pivot_row.unwrap()])
                    }
                };
                if better {
                    best = Some(ratio);
                    pivot_row = Some(i);
                }
            }
        }
        // phase-1 objective is bounded below by 0, so a pivot row always exists
        let pr = pivot_row.expect("phase-1 LP cannot be unbounded");

        // pivot
        let piv = t[pr][entering].clone();
        for v in t[pr].iter_mut() {
            *v /= &piv;
        }
        rhs[pr] /= &piv;
        for i in 0..m {
            if i != pr && !t[i][entering].is_zero() {
                let factor = t[i][entering].clone();
                for j in 0..total {
                    let delta = &factor * &t[pr][j];
                    t[i][j] -= delta;
                }
                let delta = &factor * &rhs[pr];
                rhs[i] -= delta;
            }
        }
        if !r[entering].is_zero() {
            let factor = r[entering].clone();
            for j in 0..total {
                let delta = &factor * &t[pr][j];
                r[j] -= delta;
            }
            let delta = &factor * &rhs[pr];
            obj += delta;
        }
        basis[pr] = entering;
    }

    if obj.is_zero() {
        let mut basic = Vec::new();
        for i in 0..m {
            if basis[i] < n {
                basic.push((basis[i], rhs[i].clone()));
            }
        }
        basic.sort_by_key(|(j, _)| *j);
        Phase1Outcome::Feasible { basic }
    } else {
        // r[artificial_i] = 1 - y_i at optimum
        let one = Rational::from_integer(1.into());
        let dual: Vec<Rational> = (0..m).map(|i| &one - &r[n + i]).collect();
        Phase1Outcome::Infeasible { dual }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn cols(raw: &[&[i64]]) -> Vec<Vec<Rational>> {
        raw.iter()
            .map(|c| c.iter().map(|&v| rat(v, 1)).collect())
            .collect()
    }

    #[test]
    fn feasible_convex_combination() {
        // x1 * (1,0) + x2 * (0,1) = (1/2, 1/2), x >= 0
        let columns = cols(&[&[1, 0], &[0, 1]]);
        let b = vec![rat(1, 2), rat(1, 2)];
        match phase1(&columns, &b) {
            Phase1Outcome::Feasible { basic } => {
                assert_eq!(basic, vec![(0, rat(1, 2)), (1, rat(1, 2))]);
            }
            _ => panic!("expected feasible"),
        }
    }

    #[test]
    fn infeasible_yields_farkas_dual() {
        // single column (1), target 2 with convexity row: x = 2, x = 1 impossible
        let columns = cols(&[&[1, 1]]);
        let b = vec![rat(2, 1), rat(1, 1)];
        match phase1(&columns, &b) {
            Phase1Outcome::Infeasible { dual } => {
                // y.A_j <= 0 and y.b > 0
                let ya = &dual[0] + &dual[1];
                assert!(ya <= rat(0, 1));
                let yb = &dual[0] * &rat(2, 1) + &dual[1];
                assert!(yb > rat(0, 1));
            }
            _ => panic!("expected infeasible"),
        }
    }

    #[test]
    fn degenerate_target_on_vertex() {
        // target equals a single column exactly
        let columns = cols(&[&[1, 1, 1], &[0, 1, 1]]);
        let b = vec![rat(1, 1), rat(1, 1), rat(1, 1)];
        match phase1(&columns, &b) {
            Phase1Outcome::Feasible { basic } => {
                let nonzero: Vec<_> =
                    basic.into_iter().filter(|(_, v)| !v.is_zero()).collect();
                assert_eq!(nonzero, vec![(0, rat(1, 1))]);
            }
            _ => panic!("expected feasible"),
        }
    }
}
