//! Correlation polytopes, Clauser-Horne inequalities, and deterministic
//! hidden-variable models for the EPR/Aspect scenario.
//!
//! The library reproduces, in exact rational arithmetic, the two sides of
//! a classicality check: the extended 8-event correlation vector (outcome
//! and setting events together) lies inside the classical correlation
//! polytope C(8, S^max) and so admits an explicit local deterministic
//! hidden-variable model, while the setting-conditional 4-event vector
//! violates the Clauser-Horne inequalities.

pub mod ch;
pub mod event_space;
pub mod oracle;
pub mod polytope;
pub mod quantum;
pub mod rational;
pub mod simplex;
pub mod simulate;
pub mod vector;

use thiserror::Error as ThisError;

#[derive(Debug, ThisError)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("division by zero: {0}")]
    DivisionByZero(String),
    #[error("validation failed: {}", .0.join("; "))]
    Validation(Vec<String>),
    #[error("io error: {0}")]
    Io(String),
}

pub use ch::{catalogue as ch_catalogue, evaluate_ch, ChInequality};
pub use event_space::{epr_event_space, Event, EventSpace, PairSet, Role, Side};
pub use polytope::{
    enumerate_vertices, membership, verify_certificate, Certificate, DeterministicWorld,
    HiddenVariableModel, MembershipReport, Verdict,
};
pub use quantum::{joint_probability, Convention, EprScenario, JointValue};
pub use rational::{format_rational, parse_rational, Rational};
pub use simulate::{compare, run_simulation, EmpiricalSummary, SimOptions};
pub use vector::{CorrelationVector, ValidationLevel, ValidationReport};
