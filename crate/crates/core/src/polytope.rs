//! Correlation-polytope machinery: 0/1 deterministic worlds, vertex
//! enumeration, exact LP membership with hidden-variable model extraction,
//! and separating-hyperplane certificates.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use serde_json::Map;

use crate::event_space::{EventSpace, PairSet};
use crate::rational::{format_rational, parse_rational, Rational};
use crate::simplex::{phase1, Phase1Outcome};
use crate::vector::{CorrelationVector, ValidationLevel};
use crate::Error;

/// Default cap on n for 2^n vertex enumeration.
pub const DEFAULT_VERTEX_BOUND: usize = 20;

/// A 0/1 truth assignment to all n events. Bit i is the truth value of
/// event i in event order; worlds are ordered by their index, with event 0
/// as the most significant bit.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct DeterministicWorld {
    bits: Vec<bool>,
}

impl DeterministicWorld {
    pub fn from_index(index: usize, n: usize) -> Self {
        let bits = (0..n).map(|i| (index >> (n - 1 - i)) & 1 == 1).collect();
        Self { bits }
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    pub fn from_bitstring(s: &str) -> Result<Self, Error> {
        let bits: Result<Vec<bool>, Error> = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::Parse(format!("bad bit {c:?} in world {s:?}"))),
            })
            .collect();
        Ok(Self { bits: bits? })
    }

    pub fn n(&self) -> usize {
        self.bits.len()
    }

    pub fn get(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn index(&self) -> usize {
        self.bits.iter().fold(0, |acc, &b| (acc << 1) | b as usize)
    }

    pub fn bitstring(&self) -> String {
        self.bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }

    /// u(eps): n single bits then eps_i * eps_j over the pair set.
    pub fn vertex_vector(&self, pair_set: &PairSet) -> Vec<u8> {
        let mut u: Vec<u8> = self.bits.iter().map(|&b| b as u8).collect();
        for (i, j) in pair_set.iter() {
            u.push((self.bits[i] && self.bits[j]) as u8);
        }
        u
    }
}

/// All 2^n worlds with their vertex vectors, in increasing binary order.
pub fn enumerate_vertices(
    n: usize,
    pair_set: &PairSet,
    bound: usize,
) -> Result<Vec<(DeterministicWorld, Vec<u8>)>, Error> {
    if n > bound {
        return Err(Error::Invalid(format!(
            "n = {n} exceeds the vertex enumeration bound {bound}"
        )));
    }
    if pair_set.n() != n {
        return Err(Error::Invalid("pair set does not match n".into()));
    }
    Ok((0..(1usize << n))
        .map(|k| {
            let w = DeterministicWorld::from_index(k, n);
            let u = w.vertex_vector(pair_set);
            (w, u)
        })
        .collect())
}

/// Finitely supported distribution over deterministic worlds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HiddenVariableModel {
    atoms: Vec<(DeterministicWorld, Rational)>,
}

impl HiddenVariableModel {
    pub fn new(mut atoms: Vec<(DeterministicWorld, Rational)>) -> Result<Self, Error> {
        if atoms.is_empty() {
            return Err(Error::Invalid("model has no atoms".into()));
        }
        let n = atoms[0].0.n();
        let mut sum = Rational::zero();
        for (w, weight) in &atoms {
            if w.n() != n {
                return Err(Error::Invalid("atoms over different event counts".into()));
            }
            if weight <= &Rational::zero() {
                return Err(Error::Invalid(format!(
                    "weight {} is not positive",
                    format_rational(weight)
                )));
            }
            sum += weight;
        }
        if !sum.is_one() {
            return Err(Error::Invalid(format!(
                "weights sum to {}, not 1",
                format_rational(&sum)
            )));
        }
        atoms.sort_by_key(|(w, _)| w.index());
        Ok(Self { atoms })
    }

    pub fn point_mass(world: DeterministicWorld) -> Self {
        Self {
            atoms: vec![(world, Rational::one())],
        }
    }

    pub fn atoms(&self) -> &[(DeterministicWorld, Rational)] {
        &self.atoms
    }

    pub fn n(&self) -> usize {
        self.atoms[0].0.n()
    }

    pub fn support_size(&self) -> usize {
        self.atoms.len()
    }

    /// Exact weighted sum of vertex vectors, reshaped into a correlation
    /// vector over the given space and pair set.
    pub fn mixture_project(
        &self,
        space: &EventSpace,
        pair_set: &PairSet,
    ) -> Result<CorrelationVector, Error> {
        if space.n() != self.n() || pair_set.n() != self.n() {
            return Err(Error::Invalid("space/pair set do not match the model".into()));
        }
        let mut singles = vec![Rational::zero(); self.n()];
        let mut pairs: BTreeMap<(usize, usize), Rational> =
            pair_set.iter().map(|p| (p, Rational::zero())).collect();
        for (w, weight) in &self.atoms {
            for i in 0..self.n() {
                if w.get(i) {
                    singles[i] += weight;
                }
            }
            for (i, j) in pair_set.iter() {
                if w.get(i) && w.get(j) {
                    *pairs.get_mut(&(i, j)).unwrap() += weight;
                }
            }
        }
        CorrelationVector::new(space.clone(), pair_set.clone(), singles, pairs)
    }
}

/// Integer separating hyperplane: c.u(eps) <= bound for every vertex,
/// c.p > bound for the tested vector. Coefficients have collective gcd 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub coefficients: Vec<BigInt>,
    pub bound: BigInt,
}

impl Certificate {
    pub fn violation(&self, p: &CorrelationVector) -> Rational {
        let flat = p.flatten();
        let mut value = Rational::zero();
        for (c, x) in self.coefficients.iter().zip(flat.iter()) {
            value += Rational::from_integer(c.clone()) * x;
        }
        value - Rational::from_integer(self.bound.clone())
    }
}

#[derive(Debug, Clone)]
pub enum Verdict {
    Inside(HiddenVariableModel),
    Outside(Certificate),
}

#[derive(Debug, Clone)]
pub struct MembershipReport {
    pub verdict: Verdict,
}

impl MembershipReport {
    pub fn is_inside(&self) -> bool {
        matches!(self.verdict, Verdict::Inside(_))
    }
}

/// Decides p in C(n, S) by exact phase-1 simplex over the 2^n vertex
/// columns augmented with a convexity row.
pub fn membership(p: &CorrelationVector, bound: usize) -> Result<MembershipReport, Error> {
    let report = p.validate(ValidationLevel::Range);
    if !report.passed() {
        return Err(Error::Validation(report.describe(&p.space)));
    }
    let n = p.n();
    let vertices = enumerate_vertices(n, &p.pair_set, bound)?;
    let dim = p.dim();

    let columns: Vec<Vec<Rational>> = vertices
        .iter()
        .map(|(_, u)| {
            let mut col: Vec<Rational> = u
                .iter()
                .map(|&v| Rational::from_integer(BigInt::from(v)))
                .collect();
            col.push(Rational::one()); // convexity row
            col
        })
        .collect();
    let mut b = p.flatten();
    b.push(Rational::one());

    match phase1(&columns, &b) {
        Phase1Outcome::Feasible { basic } => {
            let atoms: Vec<(DeterministicWorld, Rational)> = basic
                .into_iter()
                .filter(|(_, v)| !v.is_zero())
                .map(|(col, v)| (vertices[col].0.clone(), v))
                .collect();
            let model = HiddenVariableModel::new(atoms)?;
            debug_assert!(model.support_size() <= dim + 1);
            Ok(MembershipReport {
                verdict: Verdict::Inside(model),
            })
        }
        Phase1Outcome::Infeasible { dual } => {
            // y = (c, -bound): scale to integers, reduce by gcd
            let mut lcm = BigInt::one();
            for y in &dual {
                lcm = lcm.lcm(y.denom());
            }
            let scaled: Vec<BigInt> = dual
                .iter()
                .map(|y| (y * Rational::from_integer(lcm.clone())).to_integer())
                .collect();
            let mut gcd = BigInt::zero();
            for v in &scaled {
                gcd = gcd.gcd(v);
            }
            if gcd.is_zero() {
                gcd = BigInt::one();
            }
            let reduced: Vec<BigInt> = scaled.iter().map(|v| v / &gcd).collect();
            let coefficients = reduced[..dim].to_vec();
            let bound_val = -reduced[dim].clone();
            let cert = Certificate {
                coefficients,
                bound: bound_val,
            };
            debug_assert!(cert.violation(p).is_positive());
            Ok(MembershipReport {
                verdict: Verdict::Outside(cert),
            })
        }
    }
}

/// Exhaustive soundness check: c.u(eps) <= bound over all 2^n vertices and
/// c.p > bound, in exact arithmetic.
pub fn verify_certificate(
    cert: &Certificate,
    p: &CorrelationVector,
    bound_n: usize,
) -> Result<bool, Error> {
    let vertices = enumerate_vertices(p.n(), &p.pair_set, bound_n)?;
    if cert.coefficients.len() != p.dim() {
        return Ok(false);
    }
    for (_, u) in &vertices {
        let mut value = BigInt::zero();
        for (c, &x) in cert.coefficients.iter().zip(u.iter()) {
            if x != 0 {
                value += c;
            }
        }
        if value > cert.bound {
            return Ok(false);
        }
    }
    Ok(cert.violation(p).is_positive())
}

// ---------------------------------------------------------------------------
// membership report file format

#[derive(Serialize, Deserialize)]
struct ModelAtomFile {
    world: String,
    weight: String,
}

#[derive(Serialize, Deserialize)]
struct CertificateFile {
    coefficients: BTreeMap<String, String>,
    bound: String,
    violation: String,
}

#[derive(Serialize, Deserialize)]
struct ReportFile {
    verdict: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    model: Option<Vec<ModelAtomFile>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    certificate: Option<CertificateFile>,
    #[serde(skip_serializing_if = "Option::is_none")]
    meta: Option<serde_json::Value>,
    #[serde(flatten)]
    extra: Map<String, serde_json::Value>,
}

/// Writes a membership report; coordinate labels come from the input
/// vector's event order.
pub fn write_report(
    report: &MembershipReport,
    p: &CorrelationVector,
    meta: Option<serde_json::Value>,
    writer: impl Write,
) -> Result<(), Error> {
    let file = match &report.verdict {
        Verdict::Inside(model) => ReportFile {
            verdict: "inside".into(),
            model: Some(
                model
                    .atoms()
                    .iter()
                    .map(|(w, weight)| ModelAtomFile {
                        world: w.bitstring(),
                        weight: format_rational(weight),
                    })
                    .collect(),
            ),
            certificate: None,
            meta,
            extra: Map::new(),
        },
        Verdict::Outside(cert) => {
            let labels = p.coordinate_labels();
            ReportFile {
                verdict: "outside".into(),
                model: None,
                certificate: Some(CertificateFile {
                    coefficients: labels
                        .iter()
                        .zip(cert.coefficients.iter())
                        .map(|(l, c)| (l.clone(), c.to_string()))
                        .collect(),
                    bound: cert.bound.to_string(),
                    violation: format_rational(&cert.violation(p)),
                }),
                meta,
                extra: Map::new(),
            }
        }
    };
    serde_json::to_writer_pretty(writer, &file).map_err(|e| Error::Io(e.to_string()))
}

/// Reads the model part of a membership report ("inside" verdicts only).
pub fn read_model(reader: impl Read) -> Result<(HiddenVariableModel, Vec<String>), Error> {
    let file: ReportFile =
        serde_json::from_reader(reader).map_err(|e| Error::Parse(format!("model file: {e}")))?;
    let mut warnings: Vec<String> = file
        .extra
        .keys()
        .map(|k| format!("ignoring unknown field {k:?}"))
        .collect();
    if file.verdict != "inside" {
        return Err(Error::Parse(format!(
            "report verdict is {:?}; no model to simulate",
            file.verdict
        )));
    }
    let atoms_file = file
        .model
        .ok_or_else(|| Error::Parse("inside report without a model".into()))?;
    let mut atoms = Vec::new();
    for a in atoms_file {
        atoms.push((
            DeterministicWorld::from_bitstring(&a.world)?,
            parse_rational(&a.weight)?,
        ));
    }
    if file.certificate.is_some() {
        warnings.push("ignoring certificate on an inside report".into());
    }
    Ok((HiddenVariableModel::new(atoms)?, warnings))
}
