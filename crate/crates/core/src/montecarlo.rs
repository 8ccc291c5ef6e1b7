//! Seeded Monte Carlo over the probabilistic five-qubit construction.
//!
//! Every fusion succeeds with probability 1/2. Before each fusion attempt the
//! whole pool of stored chains is dephased with the storage strength for that
//! attempt. Fresh primitives are unlimited and are dephased once with the
//! primitive strength when they are created.
//!
//! Sample `i` draws from `ChaCha8Rng::seed_from_u64(seed)` with stream `i`,
//! so results do not depend on how samples are scheduled across threads.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::closed_forms::ConstructionMethod;
use crate::cluster::{fresh_primitive, ClusterChain, LabelAllocator};
use crate::error::{Error, Result};
use crate::fusion::{aggregate_failure, fuse, success_branch};
use crate::noise::{dephase_all, DephasingStrength};
use crate::strategies::TARGET_LENGTH;

pub const HISTOGRAM_BINS: usize = 20;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct McPolicy {
    pub method: ConstructionMethod,
    /// Keep failure remnants of length two or more. Without recycling a
    /// sample is abandoned at its first failed fusion.
    pub recycle: bool,
    /// Cap on fusion attempts per sample; samples hitting it count as failures.
    pub max_attempts: u32,
    pub primitive_strength: DephasingStrength,
    /// Storage strength before attempt `k` is entry `k`; the last entry
    /// repeats. Empty means no storage dephasing.
    pub storage_strengths: Vec<DephasingStrength>,
    /// Carry density matrices and report fidelities. Off, only chain
    /// lengths are tracked.
    pub track_states: bool,
}

impl McPolicy {
    pub fn new(method: ConstructionMethod, recycle: bool) -> Self {
        Self {
            method,
            recycle,
            max_attempts: 64,
            primitive_strength: DephasingStrength::ZERO,
            storage_strengths: Vec::new(),
            track_states: true,
        }
    }

    fn storage(&self, attempt: u32) -> DephasingStrength {
        let k = (attempt as usize).min(self.storage_strengths.len().saturating_sub(1));
        self.storage_strengths
            .get(k)
            .copied()
            .unwrap_or(DephasingStrength::ZERO)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct McReport {
    pub samples: u64,
    pub seed: u64,
    pub successes: u64,
    /// Samples that stopped early: a failure without recycling, or the attempt cap.
    pub aborted: u64,
    pub success_rate: f64,
    pub fusion_attempts: u64,
    pub fusion_successes: u64,
    /// Mean fidelity of the successful samples (tracked states only).
    pub mean_fidelity: Option<f64>,
    /// Counts of successful-sample fidelities in equal bins over `[0, 1]`.
    pub fidelity_histogram: Option<Vec<u64>>,
    /// Number of samples by primitives consumed.
    pub primitives_consumed: BTreeMap<u32, u64>,
}

impl McReport {
    pub fn fusion_success_rate(&self) -> f64 {
        if self.fusion_attempts == 0 {
            return 0.0;
        }
        self.fusion_successes as f64 / self.fusion_attempts as f64
    }
}

/// A chain in the pool, with or without its state.
#[derive(Clone, Debug)]
enum Piece {
    Length(usize),
    Chain(ClusterChain),
}

impl Piece {
    fn len(&self) -> usize {
        match self {
            Piece::Length(n) => *n,
            Piece::Chain(c) => c.len(),
        }
    }
}

#[derive(Clone, Debug, Default)]
struct SampleResult {
    fidelity: Option<f64>,
    built: bool,
    aborted: bool,
    attempts: u32,
    successes: u32,
    primitives: u32,
}

struct Sampler<'a> {
    policy: &'a McPolicy,
    rng: ChaCha8Rng,
    labels: LabelAllocator,
    pool: Vec<Piece>,
    out: SampleResult,
}

impl<'a> Sampler<'a> {
    fn new(policy: &'a McPolicy, seed: u64, index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index);
        Self {
            policy,
            rng,
            labels: LabelAllocator::new(),
            pool: Vec::new(),
            out: SampleResult::default(),
        }
    }

    fn primitive(&mut self) -> Piece {
        self.out.primitives += 1;
        if self.policy.track_states {
            Piece::Chain(dephase_all(
                &fresh_primitive(&mut self.labels),
                self.policy.primitive_strength,
            ))
        } else {
            Piece::Length(2)
        }
    }

    /// Removes the first stored chain of the given length.
    fn take(&mut self, len: usize) -> Option<Piece> {
        let at = self.pool.iter().position(|c| c.len() == len)?;
        Some(self.pool.remove(at))
    }

    fn count(&self, len: usize) -> usize {
        self.pool.iter().filter(|c| c.len() == len).count()
    }

    /// Stores, dephases the pool, then fuses the tail of `a` with the head of
    /// `b`. Returns whether the fusion succeeded; products go to the pool.
    fn attempt(&mut self, a: Piece, b: Piece) -> Result<bool> {
        let storage = self.policy.storage(self.out.attempts);
        self.out.attempts += 1;
        let dephase = |piece: Piece| match piece {
            Piece::Chain(c) if storage.value() > 0.0 => Piece::Chain(dephase_all(&c, storage)),
            other => other,
        };
        self.pool = std::mem::take(&mut self.pool).into_iter().map(dephase).collect();
        let (a, b) = (dephase(a), dephase(b));
        let success = self.rng.random_bool(0.5);
        let products = match (a, b) {
            (Piece::Chain(a), Piece::Chain(b)) => {
                let (ea, eb) = (
                    a.tail().expect("pool chains are non-empty"),
                    b.head().expect("non-empty"),
                );
                let outcomes = fuse(&a, &b, ea, eb, &mut self.labels)?;
                if success {
                    let hit = success_branch(&outcomes).ok_or(Error::ZeroProbability)?;
                    vec![Piece::Chain(hit.chains[0].clone())]
                } else {
                    let (ra, rb, _) = aggregate_failure(&outcomes)?;
                    vec![Piece::Chain(ra), Piece::Chain(rb)]
                }
            }
            (a, b) if success => vec![Piece::Length(a.len() + b.len() - 1)],
            (a, b) => vec![Piece::Length(a.len() - 1), Piece::Length(b.len() - 1)],
        };
        if success {
            self.out.successes += 1;
            self.pool.extend(products);
        } else if self.policy.recycle {
            self.pool.extend(products.into_iter().filter(|c| c.len() >= 2));
        } else {
            self.out.aborted = true;
        }
        Ok(success)
    }

    /// A stored chain of length `len`, else a fresh primitive.
    fn stored_or_primitive(&mut self, len: usize) -> Piece {
        self.take(len).unwrap_or_else(|| self.primitive())
    }

    /// One step of the three-three construction.
    fn step_three_three(&mut self) -> Result<()> {
        if self.count(3) >= 2 {
            let a = self.take(3).expect("counted");
            let b = self.take(3).expect("counted");
            self.attempt(a, b)?;
        } else {
            let a = self.stored_or_primitive(2);
            let b = self.stored_or_primitive(2);
            self.attempt(a, b)?;
        }
        Ok(())
    }

    /// One step of the growing construction: extend the longest stored chain.
    fn step_four_two(&mut self) -> Result<()> {
        let longest = self.pool.iter().map(Piece::len).max().unwrap_or(0);
        let a = if longest >= 2 {
            self.take(longest).expect("present")
        } else {
            self.primitive()
        };
        let b = self.primitive();
        self.attempt(a, b)?;
        Ok(())
    }

    fn run(mut self) -> Result<SampleResult> {
        loop {
            if let Some(done) = self.take(TARGET_LENGTH) {
                self.out.built = true;
                if let Piece::Chain(c) = done {
                    self.out.fidelity = Some(c.fidelity());
                }
                return Ok(self.out);
            }
            if self.out.aborted {
                return Ok(self.out);
            }
            if self.out.attempts >= self.policy.max_attempts {
                self.out.aborted = true;
                return Ok(self.out);
            }
            match self.policy.method {
                ConstructionMethod::ThreeThree => self.step_three_three()?,
                ConstructionMethod::FourTwo => self.step_four_two()?,
            }
        }
    }
}

pub fn monte_carlo(policy: &McPolicy, samples: u64, seed: u64) -> Result<McReport> {
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be at least 1".into()));
    }
    if policy.max_attempts == 0 {
        return Err(Error::InvalidArgument("max_attempts must be at least 1".into()));
    }
    let results: Vec<SampleResult> = (0..samples)
        .into_par_iter()
        .map(|i| Sampler::new(policy, seed, i).run())
        .collect::<Result<_>>()?;

    let mut report = McReport {
        samples,
        seed,
        successes: 0,
        aborted: 0,
        success_rate: 0.0,
        fusion_attempts: 0,
        fusion_successes: 0,
        mean_fidelity: None,
        fidelity_histogram: policy.track_states.then(|| vec![0; HISTOGRAM_BINS]),
        primitives_consumed: BTreeMap::new(),
    };
    let mut fidelity_sum = 0.0;
    for r in &results {
        report.successes += u64::from(r.built);
        report.aborted += u64::from(r.aborted);
        report.fusion_attempts += u64::from(r.attempts);
        report.fusion_successes += u64::from(r.successes);
        *report.primitives_consumed.entry(r.primitives).or_default() += 1;
        if let (Some(f), Some(hist)) = (r.fidelity, report.fidelity_histogram.as_mut()) {
            fidelity_sum += f;
            let bin = ((f.clamp(0.0, 1.0) * HISTOGRAM_BINS as f64) as usize).min(HISTOGRAM_BINS - 1);
            hist[bin] += 1;
        }
    }
    report.success_rate = report.successes as f64 / samples as f64;
    if policy.track_states && report.successes > 0 {
        report.mean_fidelity = Some(fidelity_sum / report.successes as f64);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lengths_only(method: ConstructionMethod, recycle: bool) -> McPolicy {
        McPolicy {
            track_states: false,
            ..McPolicy::new(method, recycle)
        }
    }

    #[test]
    fn without_recycling_exactly_three_fusions_are_needed() {
        for method in [ConstructionMethod::ThreeThree, ConstructionMethod::FourTwo] {
            let r = monte_carlo(&lengths_only(method, false), 4000, 7).unwrap();
            assert_eq!(r.successes + r.aborted, r.samples);
            let se = (0.125f64 * 0.875 / 4000.0).sqrt();
            assert!(
                (r.success_rate - 0.125).abs() < 4.0 * se,
                "{method:?}: {}",
                r.success_rate
            );
        }
    }

    #[test]
    fn recycling_always_finishes_with_enough_attempts() {
        let mut policy = lengths_only(ConstructionMethod::ThreeThree, true);
        policy.max_attempts = 10_000;
        let r = monte_carlo(&policy, 500, 1).unwrap();
        assert_eq!(r.successes, 500);
        assert_eq!(r.aborted, 0);
    }

    #[test]
    fn noiseless_tracked_samples_are_perfect() {
        let policy = McPolicy::new(ConstructionMethod::ThreeThree, true);
        let r = monte_carlo(&policy, 200, 3).unwrap();
        assert!((r.mean_fidelity.unwrap() - 1.0).abs() < 1e-10);
        let hist = r.fidelity_histogram.unwrap();
        assert_eq!(hist.iter().sum::<u64>(), r.successes);
        assert_eq!(hist[HISTOGRAM_BINS - 1], r.successes);
    }

    #[test]
    fn reports_are_reproducible() {
        let mut policy = McPolicy::new(ConstructionMethod::FourTwo, true);
        policy.storage_strengths = vec![DephasingStrength::new(0.05).unwrap()];
        let a = monte_carlo(&policy, 300, 99).unwrap();
        let b = monte_carlo(&policy, 300, 99).unwrap();
        assert_eq!(a, b);
        let c = monte_carlo(&policy, 300, 100).unwrap();
        assert_ne!(a.fusion_attempts, c.fusion_attempts);
    }

    #[test]
    fn tracked_and_untracked_runs_share_outcomes() {
        let policy = McPolicy::new(ConstructionMethod::ThreeThree, true);
        let tracked = monte_carlo(&policy, 100, 5).unwrap();
        let bare = monte_carlo(
            &McPolicy {
                track_states: false,
                ..policy
            },
            100,
            5,
        )
        .unwrap();
        assert_eq!(tracked.fusion_attempts, bare.fusion_attempts);
        assert_eq!(tracked.successes, bare.successes);
        assert_eq!(tracked.primitives_consumed, bare.primitives_consumed);
    }

    #[test]
    fn zero_samples_rejected() {
        assert!(monte_carlo(&McPolicy::new(ConstructionMethod::ThreeThree, true), 0, 0).is_err());
    }
}
