//! Clauser-Horne facet catalogue for the 4-event Bell scenario with pair
//! set {(1,3),(1,4),(2,3),(2,4)} (1-based), i.e. events 1,2 on the left
//! wing and 3,4 on the right.
//!
//! Canonical form: -1 <= p13 + p14 + p24 - p23 - p1 - p4 <= 0. There are
//! four homogeneous coefficient vectors (one per choice of negated pair,
//! with the complementary events' singles subtracted); each carries a
//! lower and an upper bound, giving the eight CH inequalities.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::polytope::Certificate;
use crate::rational::{rat, Rational};
use crate::vector::CorrelationVector;
use crate::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundSide {
    /// value >= -1
    Lower,
    /// value <= 0
    Upper,
}

/// One CH inequality: a linear form over (p1..p4, p13, p14, p23, p24) with
/// one of the two bounds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChInequality {
    pub label: String,
    /// coefficients of p1..p4
    pub singles: [i64; 4],
    /// coefficients of p13, p14, p23, p24 (lexicographic pair order)
    pub pairs: [i64; 4],
    pub side: BoundSide,
}

impl ChInequality {
    pub fn value(&self, p: &CorrelationVector) -> Result<Rational, Error> {
        if p.n() != 4 || !p.pair_set.is_bell4() {
            return Err(Error::Invalid(
                "CH evaluation needs 4 events over the Bell pair set".into(),
            ));
        }
        let flat = p.flatten(); // p1..p4, p13, p14, p23, p24
        let mut v = Rational::zero();
        for k in 0..4 {
            v += rat(self.singles[k], 1) * &flat[k];
            v += rat(self.pairs[k], 1) * &flat[4 + k];
        }
        Ok(v)
    }

    pub fn violated_by(&self, value: &Rational) -> bool {
        match self.side {
            BoundSide::Lower => value < &rat(-1, 1),
            BoundSide::Upper => value > &rat(0, 1),
        }
    }

    /// The inequality as a separating hyperplane over the 8 coordinates.
    /// Lower bounds are negated so the certificate direction is always
    /// "c.p > bound".
    pub fn as_certificate(&self) -> Certificate {
        let (sign, bound) = match self.side {
            BoundSide::Upper => (1i64, BigInt::from(0)),
            BoundSide::Lower => (-1i64, BigInt::from(1)),
        };
        let mut coefficients = Vec::with_capacity(8);
        for c in self.singles {
            coefficients.push(BigInt::from(sign * c));
        }
        for c in self.pairs {
            coefficients.push(BigInt::from(sign * c));
        }
        Certificate { coefficients, bound }
    }
}

/// The eight CH inequalities: four coefficient forms, each with its lower
/// and upper bound. The first entry is the canonical upper form.
pub fn catalogue() -> Vec<ChInequality> {
    // (negated pair, singles) per form; pair order is p13, p14, p23, p24
    let forms: [(usize, [i64; 4], [i64; 4]); 4] = [
        // canonical: -p23, singles -p1 -p4
        (2, [-1, 0, 0, -1], [1, 1, -1, 1]),
        // -p13, singles -p2 -p4
        (0, [0, -1, 0, -1], [-1, 1, 1, 1]),
        // -p14, singles -p2 -p3
        (1, [0, -1, -1, 0], [1, -1, 1, 1]),
        // -p24, singles -p1 -p3
        (3, [-1, 0, -1, 0], [1, 1, 1, -1]),
    ];
    let pair_names = ["13", "14", "23", "24"];
    let mut out = Vec::new();
    for (k, (neg, singles, pairs)) in forms.iter().enumerate() {
        for side in [BoundSide::Upper, BoundSide::Lower] {
            let suffix = match side {
                BoundSide::Upper => "<=0",
                BoundSide::Lower => ">=-1",
            };
            out.push(ChInequality {
                label: format!("CH{} (-p{}) {}", k + 1, pair_names[*neg], suffix),
                singles: *singles,
                pairs: *pairs,
                side,
            });
        }
    }
    out
}

/// Evaluates all eight CH inequalities against a 4-event Bell vector.
pub fn evaluate_ch(
    p: &CorrelationVector,
) -> Result<Vec<(ChInequality, Rational, bool)>, Error> {
    catalogue()
        .into_iter()
        .map(|ineq| {
            let value = ineq.value(p)?;
            let violated = ineq.violated_by(&value);
            Ok((ineq, value, violated))
        })
        .collect()
}
