#![allow(dead_code)] // each test target compiles its own copy

//! Shared helpers for the integration suites: frozen expected values for
//! the default scenario, Bell-vector constructors, and membership oracles
//! that are independent of the simplex path.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use corrpoly::event_space::{Event, EventSpace, PairSet, Role, Side};
use corrpoly::polytope::enumerate_vertices;
use corrpoly::rational::{rat, Rational};
use corrpoly::vector::CorrelationVector;

/// The 36 entries of the default 8-event vector, reconstructed by hand
/// from the generation rules and frozen: singles A, A', B, B', a, a', b, b'
/// then the 28 pairs in lexicographic order.
pub fn paper_flat_expected() -> Vec<Rational> {
    let q = || rat(1, 4);
    let h = || rat(1, 2);
    let e = || rat(1, 8);
    let t = || rat(3, 32);
    let z = || rat(0, 1);
    vec![
        q(), q(), q(), q(), h(), h(), h(), h(), // singles
        z(), t(), t(), q(), z(), e(), e(), // A&A', A&B, A&B', A&a, A&a', A&b, A&b'
        z(), t(), z(), q(), e(), e(), // A'&B, A'&B', A'&a, A'&a', A'&b, A'&b'
        z(), e(), e(), q(), z(), // B&B', B&a, B&a', B&b, B&b'
        e(), e(), z(), q(), // B'&a, B'&a', B'&b, B'&b'
        z(), q(), q(), // a&a', a&b, a&b'
        q(), q(), // a'&b, a'&b'
        z(), // b&b'
    ]
}

/// Conditional 4-event Bell vector (1/2, 1/2, 1/2, 1/2; 3/8, 3/8, 0, 3/8).
pub fn conditional_paper_vector() -> CorrelationVector {
    bell_vector(
        [rat(1, 2), rat(1, 2), rat(1, 2), rat(1, 2)],
        [rat(3, 8), rat(3, 8), rat(0, 1), rat(3, 8)],
    )
}

/// Restricted absolute vector (1/4, ...; 3/32, 3/32, 0, 3/32).
pub fn restricted_paper_vector() -> CorrelationVector {
    bell_vector(
        [rat(1, 4), rat(1, 4), rat(1, 4), rat(1, 4)],
        [rat(3, 32), rat(3, 32), rat(0, 1), rat(3, 32)],
    )
}

/// 4-event Bell-scenario vector; pairs in order (A,B), (A,B'), (A',B), (A',B').
pub fn bell_vector(singles: [Rational; 4], pairs: [Rational; 4]) -> CorrelationVector {
    let mk = |l: &str, side| Event {
        label: l.into(),
        role: Role::Outcome,
        side: Some(side),
    };
    let space = EventSpace::new(vec![
        mk("A", Side::Left),
        mk("A'", Side::Left),
        mk("B", Side::Right),
        mk("B'", Side::Right),
    ])
    .unwrap();
    let set = PairSet::bell4();
    let mut map = BTreeMap::new();
    for (k, pr) in set.iter().enumerate() {
        map.insert(pr, pairs[k].clone());
    }
    CorrelationVector::new(space, set, singles.to_vec(), map).unwrap()
}

/// Generic n-event space for polytope-only tests.
pub fn generic_space(n: usize) -> EventSpace {
    EventSpace::new(
        (0..n)
            .map(|i| Event {
                label: format!("e{i}"),
                role: Role::Outcome,
                side: None,
            })
            .collect(),
    )
    .unwrap()
}

// ---------------------------------------------------------------------------
// independent membership oracles

/// Gaussian elimination over the rationals: unique solution of M x = b for
/// an m x k system, or None when inconsistent or underdetermined.
fn solve_unique(matrix: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    let m = matrix.len();
    let k = if m == 0 { return None } else { matrix[0].len() };
    let mut aug: Vec<Vec<Rational>> = matrix
        .iter()
        .zip(b.iter())
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let mut pivot_cols = Vec::new();
    let mut row = 0;
    for col in 0..k {
        let pivot = (row..m).find(|&i| !aug[i][col].is_zero());
        let Some(p) = pivot else { continue };
        aug.swap(row, p);
        let piv = aug[row][col].clone();
        for v in aug[row].iter_mut() {
            *v /= &piv;
        }
        for i in 0..m {
            if i != row && !aug[i][col].is_zero() {
                let f = aug[i][col].clone();
                for j in 0..=k {
                    let d = &f * &aug[row][j];
                    aug[i][j] -= d;
                }
            }
        }
        pivot_cols.push(col);
        row += 1;
        if row == m {
            break;
        }
    }
    if pivot_cols.len() < k {
        return None; // underdetermined within this subset; a smaller one covers it
    }
    for i in row..m {
        if !aug[i][k].is_zero() {
            return None; // inconsistent
        }
    }
    let mut x = vec![Rational::zero(); k];
    for (r, &c) in pivot_cols.iter().enumerate() {
        x[c] = aug[r][k].clone();
    }
    Some(x)
}

fn combinations(pool: usize, size: usize, f: &mut impl FnMut(&[usize]) -> bool) -> bool {
    fn rec(
        start: usize,
        pool: usize,
        current: &mut Vec<usize>,
        size: usize,
        f: &mut impl FnMut(&[usize]) -> bool,
    ) -> bool {
        if current.len() == size {
            return f(current);
        }
        for i in start..pool {
            current.push(i);
            if rec(i + 1, pool, current, size, f) {
                return true;
            }
            current.pop();
        }
        false
    }
    rec(0, pool, &mut Vec::new(), size, f)
}

/// Caratheodory brute force: p is in C(n, S) iff some subset of at most
/// dim+1 vertices carries a nonnegative convex combination hitting p
/// exactly. Exponential; intended for n <= 3.
pub fn brute_force_inside(p: &CorrelationVector) -> bool {
    let n = p.n();
    let vertices = enumerate_vertices(n, &p.pair_set, 20).unwrap();
    let mut target = p.flatten();
    target.push(Rational::one());
    let m = target.len();
    let cols: Vec<Vec<Rational>> = vertices
        .iter()
        .map(|(_, u)| {
            let mut c: Vec<Rational> = u.iter().map(|&v| rat(v as i64, 1)).collect();
            c.push(Rational::one());
            c
        })
        .collect();
    for size in 1..=m.min(cols.len()) {
        let found = combinations(cols.len(), size, &mut |subset| {
            let matrix: Vec<Vec<Rational>> = (0..m)
                .map(|row| subset.iter().map(|&j| cols[j][row].clone()).collect())
                .collect();
            match solve_unique(&matrix, &target) {
                Some(x) => x.iter().all(|v| v >= &Rational::zero()),
                None => false,
            }
        });
        if found {
            return true;
        }
    }
    false
}

/// Fine's criterion for the 4-event Bell scenario: the trivial facets plus
/// the Clauser-Horne inequalities decide membership in C(4, S_bell).
pub fn bell_facet_inside(p: &CorrelationVector) -> bool {
    assert!(p.pair_set.is_bell4());
    let one = Rational::one();
    for i in 0..4 {
        let s = p.single(i);
        if s < &Rational::zero() || s > &one {
            return false;
        }
    }
    for (i, j) in p.pair_set.iter() {
        let pij = p.pair(i, j);
        if pij < &Rational::zero()
            || pij > p.single(i)
            || pij > p.single(j)
            || &(p.single(i) + p.single(j) - pij) > &one
        {
            return false;
        }
    }
    corrpoly::ch::evaluate_ch(p)
        .unwrap()
        .iter()
        .all(|(_, _, violated)| !violated)
}
