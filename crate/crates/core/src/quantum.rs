//! EPR/Aspect scenario generation: measurement directions, switch
//! distribution, and the singlet joint-detection law, producing the full
//! 8-event correlation vector in exact rationals.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::event_space::{epr_event_space, PairSet};
use crate::rational::{approx_rational, format_rational, parse_rational, rat, Rational};
use crate::vector::CorrelationVector;
use crate::Error;

/// Denominator bound for converting irrational joint values to rationals
/// before they enter the exact LP.
pub const APPROX_DENOMINATOR: u64 = 1_000_000_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    /// 1/2 sin^2(theta), the law as printed.
    Paper,
    /// 1/2 sin^2(theta/2), the standard singlet joint-detection law.
    Standard,
}

/// Joint probability at relative angle theta; exact where sin^2 is rational.
#[derive(Debug, Clone, PartialEq)]
pub enum JointValue {
    Exact(Rational),
    Approx(f64),
}

impl JointValue {
    pub fn to_f64(&self) -> f64 {
        match self {
            JointValue::Exact(r) => crate::rational::rational_to_f64(r),
            JointValue::Approx(x) => *x,
        }
    }

    /// Exact value when available, otherwise rounded to denominator
    /// [`APPROX_DENOMINATOR`].
    pub fn to_rational(&self) -> Rational {
        match self {
            JointValue::Exact(r) => r.clone(),
            JointValue::Approx(x) => approx_rational(*x, APPROX_DENOMINATOR),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, JointValue::Exact(_))
    }
}

/// Reduces an angle difference to the separation in [0, 180] degrees.
pub fn separation_degrees(alpha: f64, beta: f64) -> f64 {
    let d = (alpha - beta).rem_euclid(360.0);
    if d > 180.0 {
        360.0 - d
    } else {
        d
    }
}

/// sin^2 of an angle in degrees, exact at the multiples of 30 and 45.
fn sin2_exact(theta: f64) -> Option<Rational> {
    let t = theta.rem_euclid(180.0);
    const EPS: f64 = 1e-9;
    let table: [(f64, (i64, i64)); 8] = [
        (0.0, (0, 1)),
        (30.0, (1, 4)),
        (45.0, (1, 2)),
        (60.0, (3, 4)),
        (90.0, (1, 1)),
        (120.0, (3, 4)),
        (135.0, (1, 2)),
        (150.0, (1, 4)),
    ];
    for (angle, (n, d)) in table {
        if (t - angle).abs() < EPS || (t - angle - 180.0).abs() < EPS {
            return Some(rat(n, d));
        }
    }
    None
}

/// The joint-detection law at relative angle theta (degrees).
pub fn joint_probability(convention: Convention, theta: f64) -> JointValue {
    let arg = match convention {
        Convention::Paper => theta,
        Convention::Standard => theta / 2.0,
    };
    match sin2_exact(arg) {
        Some(s2) => JointValue::Exact(s2 / rat(2, 1)),
        None => JointValue::Approx(0.5 * arg.to_radians().sin().powi(2)),
    }
}

/// Four measurement directions, a switch distribution over the four
/// setting pairs, and a joint-law convention.
#[derive(Debug, Clone, PartialEq)]
pub struct EprScenario {
    /// Coplanar direction angles in degrees: a, a', b, b'.
    pub angles: [f64; 4],
    /// q(a&b), q(a&b'), q(a'&b), q(a'&b'); nonnegative, sums to 1.
    pub switch_distribution: [Rational; 4],
    pub convention: Convention,
}

impl Default for EprScenario {
    /// The paper's setup: angle(a,a') = angle(a',b) = angle(a,b') = 120,
    /// angle(b,a') = 0, independent uniform switches.
    fn default() -> Self {
        Self {
            angles: [0.0, 120.0, 120.0, 240.0],
            switch_distribution: [rat(1, 4), rat(1, 4), rat(1, 4), rat(1, 4)],
            convention: Convention::Paper,
        }
    }
}

impl EprScenario {
    pub fn validate(&self) -> Result<(), Error> {
        let mut sum = Rational::zero();
        for q in &self.switch_distribution {
            if q < &Rational::zero() {
                return Err(Error::Invalid(format!(
                    "switch probability {} is negative",
                    format_rational(q)
                )));
            }
            sum += q;
        }
        if !sum.is_one() {
            return Err(Error::Invalid(format!(
                "switch distribution sums to {}, not 1",
                format_rational(&sum)
            )));
        }
        Ok(())
    }

    fn angle(&self, setting: usize) -> f64 {
        // setting indices: 0 = a, 1 = a', 2 = b, 3 = b'
        self.angles[setting].rem_euclid(360.0)
    }

    /// q(x&y) for left setting x in {0,1} (a, a') and right y in {0,1} (b, b').
    fn switch(&self, left: usize, right: usize) -> &Rational {
        &self.switch_distribution[left * 2 + right]
    }

    /// Builds the full 8-event correlation vector over S^max (28 pairs).
    ///
    /// Generation rules: setting singles are switch marginals; rival
    /// same-side settings never coincide; an outcome carries half of its
    /// own setting's probability and occurs only with it; outcome pairs
    /// across sides follow the joint law weighted by the switch law.
    pub fn build_vector(&self) -> Result<CorrelationVector, Error> {
        self.validate()?;
        let space = epr_event_space();
        let pair_set = PairSet::full(8);
        let half = rat(1, 2);

        // event indices: 0 A, 1 A', 2 B, 3 B', 4 a, 5 a', 6 b, 7 b'
        let p_setting = [
            self.switch(0, 0) + self.switch(0, 1), // a
            self.switch(1, 0) + self.switch(1, 1), // a'
            self.switch(0, 0) + self.switch(1, 0), // b
            self.switch(0, 1) + self.switch(1, 1), // b'
        ];
        let p_outcome: Vec<Rational> = p_setting.iter().map(|p| p * &half).collect();

        let mut singles = p_outcome.clone();
        singles.extend(p_setting.iter().cloned());

        // own setting index (into p_setting order a, a', b, b') per outcome
        let own = [0usize, 1, 2, 3];
        let side = |s: usize| s / 2; // 0 left, 1 right

        let mut pairs = BTreeMap::new();
        for (i, j) in pair_set.iter() {
            let value = match (i < 4, j < 4) {
                (true, true) => {
                    // outcome-outcome
                    let (sx, sy) = (own[i], own[j]);
                    if side(sx) == side(sy) {
                        Rational::zero()
                    } else {
                        let theta = separation_degrees(self.angle(sx), self.angle(sy));
                        let law = joint_probability(self.convention, theta).to_rational();
                        law * self.switch(sx, sy - 2)
                    }
                }
                (true, false) => {
                    // outcome-setting
                    let sx = own[i];
                    let sy = j - 4;
                    if sy == sx {
                        singles[i].clone() // p(X & x) = p(X)
                    } else if side(sy) == side(sx) {
                        Rational::zero() // rival setting
                    } else {
                        let (l, r) = if side(sx) == 0 { (sx, sy - 2) } else { (sy, sx - 2) };
                        &half * self.switch(l, r)
                    }
                }
                (false, false) => {
                    // setting-setting
                    let (sx, sy) = (i - 4, j - 4);
                    if side(sx) == side(sy) {
                        Rational::zero()
                    } else {
                        self.switch(sx, sy - 2).clone()
                    }
                }
                (false, true) => unreachable!("pair order is lexicographic"),
            };
            pairs.insert((i, j), value);
        }
        CorrelationVector::new(space, pair_set, singles, pairs)
    }
}

// ---------------------------------------------------------------------------
// scenario file format

#[derive(Serialize, Deserialize)]
struct AnglesFile {
    a: f64,
    a_prime: f64,
    b: f64,
    b_prime: f64,
}

#[derive(Serialize, Deserialize)]
struct ScenarioFile {
    #[serde(default)]
    angles: Option<AnglesFile>,
    #[serde(default)]
    switch_distribution: Option<BTreeMap<String, String>>,
    #[serde(default)]
    convention: Option<Convention>,
}

pub fn read_scenario(reader: impl Read) -> Result<EprScenario, Error> {
    let file: ScenarioFile =
        serde_json::from_reader(reader).map_err(|e| Error::Parse(format!("scenario file: {e}")))?;
    let mut s = EprScenario::default();
    if let Some(a) = file.angles {
        s.angles = [a.a, a.a_prime, a.b, a.b_prime];
    }
    if let Some(sw) = file.switch_distribution {
        let keys = ["ab", "ab'", "a'b", "a'b'"];
        for (slot, key) in keys.iter().enumerate() {
            let raw = sw
                .get(*key)
                .ok_or_else(|| Error::Parse(format!("missing switch entry {key:?}")))?;
            s.switch_distribution[slot] = parse_rational(raw)?;
        }
    }
    if let Some(c) = file.convention {
        s.convention = c;
    }
    s.validate()?;
    Ok(s)
}

pub fn write_scenario(s: &EprScenario, writer: impl Write) -> Result<(), Error> {
    let keys = ["ab", "ab'", "a'b", "a'b'"];
    let file = ScenarioFile {
        angles: Some(AnglesFile {
            a: s.angles[0],
            a_prime: s.angles[1],
            b: s.angles[2],
            b_prime: s.angles[3],
        }),
        switch_distribution: Some(
            keys.iter()
                .enumerate()
                .map(|(i, k)| (k.to_string(), format_rational(&s.switch_distribution[i])))
                .collect(),
        ),
        convention: Some(s.convention),
    };
    serde_json::to_writer_pretty(writer, &file).map_err(|e| Error::Io(e.to_string()))
}
