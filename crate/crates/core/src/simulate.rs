//! Monte Carlo realization of a deterministic universe: draw worlds from a
//! hidden-variable model with a seeded generator, count event frequencies,
//! and compare them against a target vector with binomial z-scores.
//!
//! Reproducibility contract: trial t draws from ChaCha12 stream t of the
//! run seed, so results are identical for any shard count.

use std::collections::BTreeMap;
use std::io::Write;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::Serialize;

use crate::event_space::{EventSpace, PairSet, Role, Side};
use crate::polytope::{DeterministicWorld, HiddenVariableModel};
use crate::rational::{draw_below, format_rational, rational_to_f64, Rational};
use crate::vector::CorrelationVector;
use crate::Error;

/// Name recorded in output files for the trial generator.
pub const GENERATOR_NAME: &str = "chacha12/per-trial-stream";

pub const DEFAULT_Z_THRESHOLD: f64 = 4.0;

/// One sampled trial; derived setting/detector fields come straight from
/// the world's bits.
#[derive(Debug, Clone, Serialize)]
pub struct TrialRecord {
    pub trial: u64,
    pub world: String,
    pub left_setting: String,
    pub right_setting: String,
}

/// Sampler over the model's atoms: weights scaled to a common denominator,
/// cumulative inversion on an exact uniform draw.
pub struct WorldSampler {
    seed: u64,
    denominator: BigUint,
    cumulative: Vec<BigUint>,
    worlds: Vec<DeterministicWorld>,
}

impl WorldSampler {
    pub fn new(model: &HiddenVariableModel, seed: u64) -> Self {
        let mut denom = BigInt::one();
        for (_, w) in model.atoms() {
            denom = denom.lcm(w.denom());
        }
        let mut cumulative = Vec::new();
        let mut acc = BigInt::zero();
        let mut worlds = Vec::new();
        for (world, weight) in model.atoms() {
            acc += (weight * Rational::from_integer(denom.clone())).to_integer();
            cumulative.push(acc.to_biguint().unwrap());
            worlds.push(world.clone());
        }
        Self {
            seed,
            denominator: denom.to_biguint().unwrap(),
            cumulative,
            worlds,
        }
    }

    /// World for trial index t; independent of any other trial.
    pub fn draw(&self, trial: u64) -> &DeterministicWorld {
        let mut rng = ChaCha12Rng::seed_from_u64(self.seed);
        rng.set_stream(trial);
        let r = draw_below(&self.denominator, &mut rng);
        // first atom whose cumulative weight exceeds the draw
        let k = self.cumulative.partition_point(|c| *c <= r);
        &self.worlds[k]
    }
}

/// Exact counts over N trials.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmpiricalSummary {
    pub samples: u64,
    pub space: EventSpace,
    pub pair_set: PairSet,
    pub single_counts: Vec<u64>,
    pub pair_counts: BTreeMap<(usize, usize), u64>,
    /// count(X & Y & x & y) keyed by ((outcome_i, outcome_j), (setting_i, setting_j))
    pub quad_counts: BTreeMap<((usize, usize), (usize, usize)), u64>,
}

impl EmpiricalSummary {
    fn empty(space: EventSpace, pair_set: PairSet) -> Self {
        let n = space.n();
        let pair_counts = pair_set.iter().map(|p| (p, 0)).collect();
        Self {
            samples: 0,
            space,
            pair_set,
            single_counts: vec![0; n],
            pair_counts,
            quad_counts: BTreeMap::new(),
        }
    }

    fn record(&mut self, world: &DeterministicWorld) {
        self.samples += 1;
        for i in 0..world.n() {
            if world.get(i) {
                self.single_counts[i] += 1;
            }
        }
        for (i, j) in self.pair_set.iter() {
            if world.get(i) && world.get(j) {
                *self.pair_counts.get_mut(&(i, j)).unwrap() += 1;
            }
        }
    }

    fn merge(&mut self, other: &EmpiricalSummary) {
        self.samples += other.samples;
        for (a, b) in self.single_counts.iter_mut().zip(&other.single_counts) {
            *a += b;
        }
        for (k, v) in &other.pair_counts {
            *self.pair_counts.get_mut(k).unwrap() += v;
        }
        for (k, v) in &other.quad_counts {
            *self.quad_counts.entry(*k).or_insert(0) += v;
        }
    }

    /// counts / N as exact rationals.
    pub fn empirical_vector(&self) -> Result<CorrelationVector, Error> {
        if self.samples == 0 {
            return Err(Error::Invalid("empty summary".into()));
        }
        let n = BigInt::from(self.samples);
        let singles = self
            .single_counts
            .iter()
            .map(|&c| Rational::new(BigInt::from(c), n.clone()))
            .collect();
        let pairs = self
            .pair_counts
            .iter()
            .map(|(&k, &c)| (k, Rational::new(BigInt::from(c), n.clone())))
            .collect();
        CorrelationVector::new(self.space.clone(), self.pair_set.clone(), singles, pairs)
    }

    /// Conditional frequency table: p(X | x) and p(X & Y | x & y) as exact
    /// count ratios. Entries with zero denominator are absent.
    pub fn conditionals(&self) -> BTreeMap<String, Rational> {
        let mut out = BTreeMap::new();
        let left_out = self.space.indices_where(Role::Outcome, Some(Side::Left));
        let right_out = self.space.indices_where(Role::Outcome, Some(Side::Right));
        let left_set = self.space.indices_where(Role::Setting, Some(Side::Left));
        let right_set = self.space.indices_where(Role::Setting, Some(Side::Right));
        if left_out.len() != left_set.len() || right_out.len() != right_set.len() {
            return out;
        }
        let assoc: BTreeMap<usize, usize> = left_out
            .iter()
            .copied()
            .zip(left_set.iter().copied())
            .chain(right_out.iter().copied().zip(right_set.iter().copied()))
            .collect();
        for (&outcome, &setting) in &assoc {
            let denom = self.single_counts[setting];
            if denom == 0 {
                continue;
            }
            let joint = self.pair_counts[&(outcome.min(setting), outcome.max(setting))];
            out.insert(
                format!("{}|{}", self.space.label(outcome), self.space.label(setting)),
                Rational::new(BigInt::from(joint), BigInt::from(denom)),
            );
        }
        for (&ox, &sx) in assoc.iter().filter(|(o, _)| left_out.contains(o)) {
            for (&oy, &sy) in assoc.iter().filter(|(o, _)| right_out.contains(o)) {
                let skey = (sx.min(sy), sx.max(sy));
                let denom = self.pair_counts[&skey];
                if denom == 0 {
                    continue;
                }
                let quad = self
                    .quad_counts
                    .get(&((ox, oy), skey))
                    .copied()
                    .unwrap_or(0);
                out.insert(
                    format!(
                        "{}&{}|{}&{}",
                        self.space.label(ox),
                        self.space.label(oy),
                        self.space.label(skey.0),
                        self.space.label(skey.1)
                    ),
                    Rational::new(BigInt::from(quad), BigInt::from(denom)),
                );
            }
        }
        out
    }
}

fn setting_label(space: &EventSpace, world: &DeterministicWorld, side: Side) -> String {
    let chosen: Vec<&str> = space
        .indices_where(Role::Setting, Some(side))
        .into_iter()
        .filter(|&i| world.get(i))
        .map(|i| space.label(i))
        .collect();
    if chosen.is_empty() {
        "none".to_string()
    } else {
        chosen.join("+")
    }
}

pub struct SimOptions {
    pub samples: u64,
    pub seed: u64,
    pub shards: u32,
}

/// Runs N trials, sharded into contiguous trial ranges; the merged summary
/// is independent of the shard count.
pub fn run_simulation(
    model: &HiddenVariableModel,
    space: &EventSpace,
    pair_set: &PairSet,
    opts: &SimOptions,
    mut trace: Option<&mut dyn Write>,
) -> Result<EmpiricalSummary, Error> {
    if opts.samples == 0 {
        return Err(Error::Invalid("sample count must be >= 1".into()));
    }
    if space.n() != model.n() || pair_set.n() != model.n() {
        return Err(Error::Invalid("model does not match the event space".into()));
    }
    let shards = opts.shards.max(1) as u64;
    let sampler = WorldSampler::new(model, opts.seed);

    // quad-count keys needed for the conditional table
    let left_out = space.indices_where(Role::Outcome, Some(Side::Left));
    let right_out = space.indices_where(Role::Outcome, Some(Side::Right));
    let left_set = space.indices_where(Role::Setting, Some(Side::Left));
    let right_set = space.indices_where(Role::Setting, Some(Side::Right));
    let mut quad_keys: Vec<((usize, usize), (usize, usize))> = Vec::new();
    if left_out.len() == left_set.len() && right_out.len() == right_set.len() {
        for (k, &ox) in left_out.iter().enumerate() {
            for (l, &oy) in right_out.iter().enumerate() {
                let (sx, sy) = (left_set[k], right_set[l]);
                quad_keys.push(((ox, oy), (sx.min(sy), sx.max(sy))));
            }
        }
    }

    let per_shard = opts.samples / shards;
    let remainder = opts.samples % shards;
    let mut total = EmpiricalSummary::empty(space.clone(), pair_set.clone());
    let mut start = 0u64;
    for shard in 0..shards {
        let count = per_shard + if shard < remainder { 1 } else { 0 };
        let mut summary = EmpiricalSummary::empty(space.clone(), pair_set.clone());
        for t in start..start + count {
            let world = sampler.draw(t);
            summary.record(world);
            for &((ox, oy), (sx, sy)) in &quad_keys {
                if world.get(ox) && world.get(oy) && world.get(sx) && world.get(sy) {
                    *summary.quad_counts.entry(((ox, oy), (sx, sy))).or_insert(0) += 1;
                }
            }
            if let Some(w) = trace.as_deref_mut() {
                let record = TrialRecord {
                    trial: t,
                    world: world.bitstring(),
                    left_setting: setting_label(space, world, Side::Left),
                    right_setting: setting_label(space, world, Side::Right),
                };
                serde_json::to_writer(&mut *w, &record)
                    .map_err(|e| Error::Io(e.to_string()))?;
                writeln!(w).map_err(|e| Error::Io(e.to_string()))?;
            }
        }
        total.merge(&summary);
        start += count;
    }
    debug_assert_eq!(total.samples, opts.samples);
    Ok(total)
}

// ---------------------------------------------------------------------------
// statistical comparison

#[derive(Debug, Clone, Serialize)]
pub struct ComparisonEntry {
    pub label: String,
    pub target: String,
    pub observed: String,
    pub deviation: f64,
    pub z: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ComparisonReport {
    pub z_threshold: f64,
    pub entries: Vec<ComparisonEntry>,
    pub pass: bool,
}

/// Per-entry deviation and z-score against the binomial standard error
/// sqrt(p(1-p)/N). Entries with zero standard error pass only when the
/// deviation is exactly 0.
pub fn compare(
    summary: &EmpiricalSummary,
    target: &CorrelationVector,
    z_threshold: f64,
) -> Result<ComparisonReport, Error> {
    if summary.space != target.space || summary.pair_set != target.pair_set {
        return Err(Error::Invalid("summary and target shapes differ".into()));
    }
    let empirical = summary.empirical_vector()?;
    let n = summary.samples as f64;
    let labels = target.coordinate_labels();
    let t_flat = target.flatten();
    let e_flat = empirical.flatten();
    let mut entries = Vec::new();
    let mut pass = true;
    for ((label, t), e) in labels.into_iter().zip(t_flat.iter()).zip(e_flat.iter()) {
        let p = rational_to_f64(t);
        let se = (p * (1.0 - p) / n).sqrt();
        let exact_dev = e - t;
        let deviation = rational_to_f64(&exact_dev.abs());
        let (z, ok) = if se == 0.0 {
            (if exact_dev.is_zero() { 0.0 } else { f64::INFINITY },
             exact_dev.is_zero())
        } else {
            let z = deviation / se;
            (z, z <= z_threshold)
        };
        pass &= ok;
        entries.push(ComparisonEntry {
            label,
            target: format_rational(t),
            observed: format_rational(e),
            deviation,
            z,
            pass: ok,
        });
    }
    Ok(ComparisonReport {
        z_threshold,
        entries,
        pass,
    })
}

// ---------------------------------------------------------------------------
// simulation output file

#[derive(Serialize)]
pub struct SimulationFile {
    pub seed: u64,
    pub generator: String,
    pub samples: u64,
    pub shards: u32,
    pub counts: SimulationCounts,
    pub conditionals: BTreeMap<String, String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub comparison: Option<ComparisonReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub meta: Option<serde_json::Value>,
}

#[derive(Serialize)]
pub struct SimulationCounts {
    pub singles: BTreeMap<String, u64>,
    pub pairs: BTreeMap<String, u64>,
}

pub fn simulation_file(
    summary: &EmpiricalSummary,
    opts: &SimOptions,
    comparison: Option<ComparisonReport>,
    meta: Option<serde_json::Value>,
) -> SimulationFile {
    let singles = summary
        .single_counts
        .iter()
        .enumerate()
        .map(|(i, &c)| (summary.space.label(i).to_string(), c))
        .collect();
    let pairs = summary
        .pair_counts
        .iter()
        .map(|(&(i, j), &c)| (summary.space.pair_label(i, j), c))
        .collect();
    let conditionals = summary
        .conditionals()
        .into_iter()
        .map(|(k, v)| (k, format_rational(&v)))
        .collect();
    SimulationFile {
        seed: opts.seed,
        generator: GENERATOR_NAME.to_string(),
        samples: opts.samples,
        shards: opts.shards,
        counts: SimulationCounts { singles, pairs },
        conditionals,
        comparison,
        meta,
    }
}
