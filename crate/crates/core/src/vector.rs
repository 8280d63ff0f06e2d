//! Correlation vectors: exact-rational single and pairwise event
//! probabilities over an indexed event space.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use serde_json::Map;

use crate::event_space::{Event, EventSpace, PairSet, Role, Side};
use crate::rational::{format_rational, parse_rational, Rational};
use crate::Error;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorrelationVector {
    pub space: EventSpace,
    pub pair_set: PairSet,
    singles: Vec<Rational>,
    pairs: BTreeMap<(usize, usize), Rational>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValidationLevel {
    /// 0 <= p_i <= 1 and p_ij >= 0 only.
    Range,
    /// Range plus p_ij <= min(p_i, p_j).
    Monotone,
}

#[derive(Debug, Clone)]
pub enum Violation {
    SingleOutOfRange { index: usize, value: Rational },
    PairNegative { pair: (usize, usize), value: Rational },
    PairAboveMargin { pair: (usize, usize), value: Rational, bound: Rational },
}

/// Violations are report content, not failures.
#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn describe(&self, space: &EventSpace) -> Vec<String> {
        self.violations
            .iter()
            .map(|v| match v {
                Violation::SingleOutOfRange { index, value } => format!(
                    "p({}) = {} outside [0, 1]",
                    space.label(*index),
                    format_rational(value)
                ),
                Violation::PairNegative { pair: (i, j), value } => format!(
                    "p({}) = {} negative",
                    space.pair_label(*i, *j),
                    format_rational(value)
                ),
                Violation::PairAboveMargin { pair: (i, j), value, bound } => format!(
                    "p({}) = {} exceeds min margin {}",
                    space.pair_label(*i, *j),
                    format_rational(value),
                    format_rational(bound)
                ),
            })
            .collect()
    }
}

impl CorrelationVector {
    pub fn new(
        space: EventSpace,
        pair_set: PairSet,
        singles: Vec<Rational>,
        pairs: BTreeMap<(usize, usize), Rational>,
    ) -> Result<Self, Error> {
        if pair_set.n() != space.n() {
            return Err(Error::Invalid(format!(
                "pair set is over n = {} but space has {} events",
                pair_set.n(),
                space.n()
            )));
        }
        if singles.len() != space.n() {
            return Err(Error::Invalid(format!(
                "{} singles for {} events",
                singles.len(),
                space.n()
            )));
        }
        for (i, j) in pair_set.iter() {
            if !pairs.contains_key(&(i, j)) {
                return Err(Error::Invalid(format!(
                    "missing pair probability for ({i}, {j})"
                )));
            }
        }
        for key in pairs.keys() {
            if !pair_set.contains(key.0, key.1) {
                return Err(Error::Invalid(format!(
                    "pair probability for ({}, {}) not in the pair set",
                    key.0, key.1
                )));
            }
        }
        Ok(Self { space, pair_set, singles, pairs })
    }

    pub fn single(&self, i: usize) -> &Rational {
        &self.singles[i]
    }

    pub fn pair(&self, i: usize, j: usize) -> &Rational {
        &self.pairs[&(i.min(j), i.max(j))]
    }

    pub fn n(&self) -> usize {
        self.space.n()
    }

    /// n + |S|, the dimension of the flattened vector.
    pub fn dim(&self) -> usize {
        self.n() + self.pair_set.len()
    }

    pub fn validate(&self, level: ValidationLevel) -> ValidationReport {
        let mut report = ValidationReport::default();
        let one = Rational::from_integer(1.into());
        for (i, p) in self.singles.iter().enumerate() {
            if p < &Rational::zero() || p > &one {
                report.violations.push(Violation::SingleOutOfRange {
                    index: i,
                    value: p.clone(),
                });
            }
        }
        for ((i, j), p) in &self.pairs {
            if p < &Rational::zero() {
                report.violations.push(Violation::PairNegative {
                    pair: (*i, *j),
                    value: p.clone(),
                });
            } else if level == ValidationLevel::Monotone {
                let bound = self.singles[*i].clone().min(self.singles[*j].clone());
                if p > &bound {
                    report.violations.push(Violation::PairAboveMargin {
                        pair: (*i, *j),
                        value: p.clone(),
                        bound,
                    });
                }
            }
        }
        report
    }

    /// n singles in event order, then pairs in lexicographic (i, j) order.
    pub fn flatten(&self) -> Vec<Rational> {
        let mut out = self.singles.clone();
        for (i, j) in self.pair_set.iter() {
            out.push(self.pairs[&(i, j)].clone());
        }
        out
    }

    /// Coordinate labels in flatten order: event labels then "L1&L2" pair labels.
    pub fn coordinate_labels(&self) -> Vec<String> {
        let mut out: Vec<String> = (0..self.n()).map(|i| self.space.label(i).to_string()).collect();
        for (i, j) in self.pair_set.iter() {
            out.push(self.space.pair_label(i, j));
        }
        out
    }

    /// Sub-vector over a subset of events; keeps every pair with both
    /// endpoints retained.
    pub fn restrict(&self, keep: &[usize]) -> Result<Self, Error> {
        if keep.is_empty() {
            return Err(Error::Invalid("restriction to an empty event subset".into()));
        }
        let mut sorted = keep.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        for &i in &sorted {
            if i >= self.n() {
                return Err(Error::Invalid(format!("event index {i} out of range")));
            }
        }
        let remap: BTreeMap<usize, usize> =
            sorted.iter().enumerate().map(|(new, &old)| (old, new)).collect();
        let events: Vec<Event> = sorted
            .iter()
            .map(|&i| self.space.events()[i].clone())
            .collect();
        let space = EventSpace::new(events)?;
        let mut new_pairs = BTreeMap::new();
        let mut pair_list = Vec::new();
        for (i, j) in self.pair_set.iter() {
            if let (Some(&ni), Some(&nj)) = (remap.get(&i), remap.get(&j)) {
                pair_list.push((ni, nj));
                new_pairs.insert((ni, nj), self.pairs[&(i, j)].clone());
            }
        }
        let pair_set = PairSet::new(space.n(), pair_list)?;
        let singles = sorted.iter().map(|&i| self.singles[i].clone()).collect();
        CorrelationVector::new(space, pair_set, singles, new_pairs)
    }

    pub fn restrict_labels(&self, keep: &[&str]) -> Result<Self, Error> {
        let idx: Result<Vec<usize>, Error> = keep
            .iter()
            .map(|l| {
                self.space
                    .index_of(l)
                    .ok_or_else(|| Error::Invalid(format!("unknown event {l:?}")))
            })
            .collect();
        self.restrict(&idx?)
    }

    /// Passes from absolute probabilities to setting-conditional ones:
    /// singles p(X|x) = p(X & x)/p(x), pairs p(X & Y | x & y) = p(X & Y)/p(x & y).
    ///
    /// `outcome_setting` associates each retained outcome with its own
    /// setting; `pair_settings` names, for each retained outcome pair, the
    /// setting pair to condition on. The result's pair set is the outcome
    /// cross pairs, reindexed over the retained outcomes.
    pub fn conditionalize(
        &self,
        outcome_setting: &[(usize, usize)],
        pair_settings: &[((usize, usize), (usize, usize))],
    ) -> Result<Self, Error> {
        let mut singles = Vec::new();
        let mut events = Vec::new();
        let mut remap = BTreeMap::new();
        for (new, &(outcome, setting)) in outcome_setting.iter().enumerate() {
            let p_setting = &self.singles[setting];
            if p_setting.is_zero() {
                return Err(Error::DivisionByZero(format!(
                    "setting {} has probability 0",
                    self.space.label(setting)
                )));
            }
            let joint = self.pair(outcome, setting);
            singles.push(joint / p_setting);
            events.push(self.space.events()[outcome].clone());
            remap.insert(outcome, new);
        }
        let space = EventSpace::new(events)?;
        let mut pairs = BTreeMap::new();
        let mut pair_list = Vec::new();
        for &((ox, oy), (sx, sy)) in pair_settings {
            let q = self.pair(sx, sy);
            if q.is_zero() {
                return Err(Error::DivisionByZero(format!(
                    "setting pair {} has probability 0",
                    self.space.pair_label(sx.min(sy), sx.max(sy))
                )));
            }
            let (ni, nj) = (remap[&ox], remap[&oy]);
            let (ni, nj) = (ni.min(nj), ni.max(nj));
            pair_list.push((ni, nj));
            pairs.insert((ni, nj), self.pair(ox, oy) / q);
        }
        let pair_set = PairSet::new(space.n(), pair_list)?;
        CorrelationVector::new(space, pair_set, singles, pairs)
    }

    /// The paper's conditionalization: each outcome conditions on the
    /// same-side setting with the same position, outcome cross pairs on the
    /// corresponding setting pairs. Requires role/side metadata.
    pub fn conditionalize_by_roles(&self) -> Result<Self, Error> {
        let left_out = self.space.indices_where(Role::Outcome, Some(Side::Left));
        let right_out = self.space.indices_where(Role::Outcome, Some(Side::Right));
        let left_set = self.space.indices_where(Role::Setting, Some(Side::Left));
        let right_set = self.space.indices_where(Role::Setting, Some(Side::Right));
        if left_out.len() != left_set.len() || right_out.len() != right_set.len() {
            return Err(Error::Invalid(
                "outcome/setting counts differ per side; cannot conditionalize".into(),
            ));
        }
        let mut assoc: Vec<(usize, usize)> = Vec::new();
        assoc.extend(left_out.iter().copied().zip(left_set.iter().copied()));
        assoc.extend(right_out.iter().copied().zip(right_set.iter().copied()));
        let setting_of: BTreeMap<usize, usize> = assoc.iter().copied().collect();
        let mut pair_settings = Vec::new();
        for &ox in &left_out {
            for &oy in &right_out {
                let (sx, sy) = (setting_of[&ox], setting_of[&oy]);
                pair_settings.push(((ox, oy), (sx.min(sy), sx.max(sy))));
            }
        }
        self.conditionalize(&assoc, &pair_settings)
    }
}

// ---------------------------------------------------------------------------
// JSON file format

#[derive(Serialize, Deserialize)]
struct EventEntry {
    label: String,
    role: Role,
    #[serde(skip_serializing_if = "Option::is_none")]
    side: Option<Side>,
    #[serde(flatten)]
    extra: Map<String, serde_json::Value>,
}

#[derive(Serialize, Deserialize)]
struct VectorFile {
    events: Vec<EventEntry>,
    singles: BTreeMap<String, String>,
    pairs: BTreeMap<String, String>,
    #[serde(flatten)]
    extra: Map<String, serde_json::Value>,
}

/// Parses the correlation-vector file format. Unknown fields are collected
/// as warnings, not errors.
pub fn read_vector(reader: impl Read) -> Result<(CorrelationVector, Vec<String>), Error> {
    let file: VectorFile =
        serde_json::from_reader(reader).map_err(|e| Error::Parse(format!("vector file: {e}")))?;
    let mut warnings: Vec<String> = file
        .extra
        .keys()
        .map(|k| format!("ignoring unknown field {k:?}"))
        .collect();
    let mut events = Vec::new();
    for e in &file.events {
        for k in e.extra.keys() {
            warnings.push(format!("ignoring unknown event field {k:?}"));
        }
        events.push(Event {
            label: e.label.clone(),
            role: e.role,
            side: e.side,
        });
    }
    let space = EventSpace::new(events)?;
    let mut singles = Vec::new();
    for i in 0..space.n() {
        let label = space.label(i);
        let raw = file
            .singles
            .get(label)
            .ok_or_else(|| Error::Parse(format!("missing single probability for {label:?}")))?;
        singles.push(parse_rational(raw)?);
    }
    let mut pair_list = Vec::new();
    let mut pairs = BTreeMap::new();
    for (key, raw) in &file.pairs {
        let (l1, l2) = key
            .split_once('&')
            .ok_or_else(|| Error::Parse(format!("bad pair key {key:?}")))?;
        let i = space
            .index_of(l1)
            .ok_or_else(|| Error::Parse(format!("unknown event {l1:?} in pair {key:?}")))?;
        let j = space
            .index_of(l2)
            .ok_or_else(|| Error::Parse(format!("unknown event {l2:?} in pair {key:?}")))?;
        if i == j {
            return Err(Error::Parse(format!("pair {key:?} repeats an event")));
        }
        let (i, j) = (i.min(j), i.max(j));
        if pairs.insert((i, j), parse_rational(raw)?).is_some() {
            return Err(Error::Parse(format!("duplicate pair {key:?}")));
        }
        pair_list.push((i, j));
    }
    let pair_set = PairSet::new(space.n(), pair_list)?;
    let v = CorrelationVector::new(space, pair_set, singles, pairs)?;
    Ok((v, warnings))
}

pub fn write_vector(v: &CorrelationVector, writer: impl Write) -> Result<(), Error> {
    let events = v
        .space
        .events()
        .iter()
        .map(|e| EventEntry {
            label: e.label.clone(),
            role: e.role,
            side: e.side,
            extra: Map::new(),
        })
        .collect();
    let singles = (0..v.n())
        .map(|i| (v.space.label(i).to_string(), format_rational(v.single(i))))
        .collect();
    let pairs = v
        .pair_set
        .iter()
        .map(|(i, j)| (v.space.pair_label(i, j), format_rational(v.pair(i, j))))
        .collect();
    let file = VectorFile {
        events,
        singles,
        pairs,
        extra: Map::new(),
    };
    serde_json::to_writer_pretty(writer, &file).map_err(|e| Error::Io(e.to_string()))
}
