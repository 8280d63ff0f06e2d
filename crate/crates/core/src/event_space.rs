//! Event spaces and pair sets: the index bookkeeping underneath
//! correlation vectors and polytope vertices.
//!
//! Roles (outcome vs setting) and sides are metadata here; the polytope
//! machinery is fully generic in `(n, S)`. They gain meaning in the EPR
//! generator and the simulator's conditional tables.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Outcome,
    Setting,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Event {
    pub label: String,
    pub role: Role,
    pub side: Option<Side>,
}

/// Ordered list of distinct events. Indices are 0-based throughout the crate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventSpace {
    events: Vec<Event>,
    index: HashMap<String, usize>,
}

impl EventSpace {
    pub fn new(events: Vec<Event>) -> Result<Self, Error> {
        if events.is_empty() {
            return Err(Error::Invalid("event space must have n >= 1".into()));
        }
        let mut index = HashMap::new();
        for (i, e) in events.iter().enumerate() {
            if e.label.is_empty() {
                return Err(Error::Invalid("empty event label".into()));
            }
            if index.insert(e.label.clone(), i).is_some() {
                return Err(Error::Invalid(format!("duplicate event label {:?}", e.label)));
            }
        }
        Ok(Self { events, index })
    }

    pub fn n(&self) -> usize {
        self.events.len()
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn label(&self, i: usize) -> &str {
        &self.events[i].label
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn pair_label(&self, i: usize, j: usize) -> String {
        format!("{}&{}", self.label(i), self.label(j))
    }

    /// Event indices matching a role (and side, when given).
    pub fn indices_where(&self, role: Role, side: Option<Side>) -> Vec<usize> {
        self.events
            .iter()
            .enumerate()
            .filter(|(_, e)| e.role == role && (side.is_none() || e.side == side))
            .map(|(i, _)| i)
            .collect()
    }
}

/// A set of index pairs (i, j), i < j, over an n-element event space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairSet {
    n: usize,
    pairs: BTreeSet<(usize, usize)>,
}

impl PairSet {
    pub fn new(n: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, Error> {
        let mut set = BTreeSet::new();
        for (i, j) in pairs {
            if i >= j {
                return Err(Error::Invalid(format!("pair ({i}, {j}) must have i < j")));
            }
            if j >= n {
                return Err(Error::Invalid(format!("pair ({i}, {j}) out of range for n = {n}")));
            }
            if !set.insert((i, j)) {
                return Err(Error::Invalid(format!("duplicate pair ({i}, {j})")));
            }
        }
        Ok(Self { n, pairs: set })
    }

    /// All n(n-1)/2 pairs; `S^max` in the polytope literature.
    pub fn full(n: usize) -> Self {
        let mut pairs = BTreeSet::new();
        for i in 0..n {
            for j in (i + 1)..n {
                pairs.insert((i, j));
            }
        }
        Self { n, pairs }
    }

    /// The 4-event Bell scenario pair set {(1,3),(1,4),(2,3),(2,4)} (1-based),
    /// i.e. the four cross pairs between {0,1} and {2,3}.
    pub fn bell4() -> Self {
        Self::new(4, [(0, 2), (0, 3), (1, 2), (1, 3)]).unwrap()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.pairs.contains(&(i.min(j), i.max(j)))
    }

    /// Pairs in lexicographic (i, j) order; this is the canonical flatten order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.pairs.iter().copied()
    }

    pub fn is_bell4(&self) -> bool {
        self.n == 4 && *self == Self::bell4()
    }
}

/// The paper's 8-event Aspect/EPR space: outcomes A, A', B, B' then
/// settings a, a', b, b'.
pub fn epr_event_space() -> EventSpace {
    let mk = |label: &str, role: Role, side: Side| Event {
        label: label.to_string(),
        role,
        side: Some(side),
    };
    EventSpace::new(vec![
        mk("A", Role::Outcome, Side::Left),
        mk("A'", Role::Outcome, Side::Left),
        mk("B", Role::Outcome, Side::Right),
        mk("B'", Role::Outcome, Side::Right),
        mk("a", Role::Setting, Side::Left),
        mk("a'", Role::Setting, Side::Left),
        mk("b", Role::Setting, Side::Right),
        mk("b'", Role::Setting, Side::Right),
    ])
    .unwrap()
}
