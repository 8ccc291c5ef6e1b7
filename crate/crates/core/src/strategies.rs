//! Deterministic construction storylines for the five-qubit linear cluster.
//!
//! Each [`ScenarioKind`] is a fixed sequence of storage dephasing and fusion
//! events in which the outcome of every fusion is prescribed. The resulting
//! state is conditioned on those outcomes; the product of their Born
//! probabilities is reported alongside it.
//!
//! Conventions: chains are read head to tail, a primitive is always attached
//! at the tail of a growing chain, and a failed fusion hands the observer the
//! outcome-averaged remnants (see [`aggregate_failure`]).

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::closed_forms::{
    failure_fidelity, no_failure_fidelity, ConstructionMethod, FailureCase, FailureStrengths, Transcription,
};
use crate::cluster::{fresh_primitive, ClusterChain, Label, LabelAllocator};
use crate::error::{Error, Result};
use crate::fusion::{aggregate_failure, fuse, success_branch};
use crate::noise::{dephase_all, DephasingStrength};

pub const TARGET_LENGTH: usize = 5;

/// A named storage interval.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Interval {
    P1,
    P2,
    P3,
    P4,
    P5,
    Wait,
}

impl Interval {
    pub const ALL: [Interval; 6] = [Self::P1, Self::P2, Self::P3, Self::P4, Self::P5, Self::Wait];

    pub fn name(self) -> &'static str {
        match self {
            Self::P1 => "p1",
            Self::P2 => "p2",
            Self::P3 => "p3",
            Self::P4 => "p4",
            Self::P5 => "p5",
            Self::Wait => "p_wait",
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Strength per storage interval. Intervals not set are simply absent.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Strengths(BTreeMap<Interval, DephasingStrength>);

impl Strengths {
    pub fn new() -> Self {
        Self::default()
    }

    /// Every interval set to `p`.
    pub fn uniform(p: DephasingStrength) -> Self {
        Self(Interval::ALL.iter().map(|&i| (i, p)).collect())
    }

    /// Undephased primitives, every storage interval at `p`.
    pub fn fresh_primitives(p: DephasingStrength) -> Self {
        Self::uniform(p).with(Interval::P1, DephasingStrength::ZERO)
    }

    pub fn with(mut self, interval: Interval, p: DephasingStrength) -> Self {
        self.0.insert(interval, p);
        self
    }

    pub fn set(&mut self, interval: Interval, p: DephasingStrength) {
        self.0.insert(interval, p);
    }

    pub fn get(&self, interval: Interval) -> Option<DephasingStrength> {
        self.0.get(&interval).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Interval, DephasingStrength)> + '_ {
        self.0.iter().map(|(&i, &p)| (i, p))
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum ScenarioKind {
    /// Four primitives fused pairwise into two 3-chains, which are then fused.
    Method1AllSuccess,
    /// A 3-chain grown by one primitive at a time.
    Method2AllSuccess,
    /// As `Method1AllSuccess`, but one 3-chain waits before the final fusion.
    Method1Wait,
    /// The 3+3 fusion fails; its remnants are fused into a recycled 3-chain
    /// which is then joined with a fresh 3-chain.
    Method1FailFresh,
    /// Two recycled 3-chains, each made as in `Method1FailFresh`, are fused.
    Method1FailFail,
    /// The growing chain loses its fusion with a primitive at the 3-chain stage.
    Method2Fail3,
    /// The growing chain loses its fusion with a primitive at the 4-chain stage.
    Method2Fail4,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 7] = [
        Self::Method1AllSuccess,
        Self::Method2AllSuccess,
        Self::Method1Wait,
        Self::Method1FailFresh,
        Self::Method1FailFail,
        Self::Method2Fail3,
        Self::Method2Fail4,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Method1AllSuccess => "method1-all-success",
            Self::Method2AllSuccess => "method2-all-success",
            Self::Method1Wait => "method1-wait",
            Self::Method1FailFresh => "method1-fail-fresh",
            Self::Method1FailFail => "method1-fail-fail",
            Self::Method2Fail3 => "method2-fail3",
            Self::Method2Fail4 => "method2-fail4",
        }
    }

    pub fn required(self) -> &'static [Interval] {
        use Interval::*;
        match self {
            Self::Method1AllSuccess => &[P1, P2],
            Self::Method2AllSuccess => &[P1, P2, P3],
            Self::Method1Wait => &[P1, P2, Wait],
            Self::Method1FailFresh | Self::Method1FailFail => &[P1, P2, P3, P4, Wait],
            Self::Method2Fail3 | Self::Method2Fail4 => &[P1, P2, P3, P4, P5],
        }
    }

    fn failure_case(self) -> Option<FailureCase> {
        match self {
            Self::Method1AllSuccess | Self::Method2AllSuccess => None,
            Self::Method1Wait => Some(FailureCase::Method1Wait),
            Self::Method1FailFresh => Some(FailureCase::Method1FailFresh),
            Self::Method1FailFail => Some(FailureCase::Method1FailFail),
            Self::Method2Fail3 => Some(FailureCase::Method2Fail3),
            Self::Method2Fail4 => Some(FailureCase::Method2Fail4),
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScenarioKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::UnknownName {
                kind: "scenario",
                value: s.to_owned(),
            })
    }
}

/// A scenario with all of its required strengths present.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Scenario {
    kind: ScenarioKind,
    strengths: Strengths,
}

impl Scenario {
    pub fn new(kind: ScenarioKind, strengths: Strengths) -> Result<Self> {
        for &interval in kind.required() {
            if strengths.get(interval).is_none() {
                return Err(Error::MissingStrength {
                    scenario: kind.name(),
                    interval: interval.name(),
                });
            }
        }
        Ok(Self { kind, strengths })
    }

    pub fn kind(&self) -> ScenarioKind {
        self.kind
    }

    pub fn strengths(&self) -> &Strengths {
        &self.strengths
    }

    fn p(&self, interval: Interval) -> DephasingStrength {
        // presence checked in `new`; unused intervals are never read
        self.strengths.get(interval).unwrap_or(DephasingStrength::ZERO)
    }

    /// The analytic fidelity for this scenario, if one exists. The failure
    /// and waiting expressions assume undephased primitives, so they are
    /// unavailable when `p1 != 0`.
    pub fn closed_form(&self, reading: Transcription) -> Option<f64> {
        use Interval::*;
        let (p1, p2, p3) = (self.p(P1), self.p(P2), self.p(P3));
        match self.kind {
            ScenarioKind::Method1AllSuccess => Some(no_failure_fidelity(ConstructionMethod::ThreeThree, p1, p2, p3)),
            ScenarioKind::Method2AllSuccess => Some(no_failure_fidelity(ConstructionMethod::FourTwo, p1, p2, p3)),
            kind => {
                if p1.value() != 0.0 {
                    return None;
                }
                let st = FailureStrengths {
                    p2,
                    p3,
                    p4: self.p(P4),
                    p5: self.p(P5),
                    p_wait: self.p(Wait),
                };
                Some(failure_fidelity(kind.failure_case()?, &st, reading))
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct ScenarioRun {
    pub chain: ClusterChain,
    pub fidelity: f64,
    /// Product of the Born probabilities of the prescribed fusion outcomes.
    pub branch_probability: f64,
    pub fusion_attempts: usize,
    pub primitives_used: usize,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
enum End {
    Head,
    Tail,
}

impl End {
    fn of(self, chain: &ClusterChain) -> Result<Label> {
        match self {
            End::Head => chain.head(),
            End::Tail => chain.tail(),
        }
        .ok_or(Error::Bookkeeping { expected: 1, actual: 0 })
    }
}

/// Running state of one storyline.
struct Workbench {
    labels: LabelAllocator,
    primitive_strength: DephasingStrength,
    probability: f64,
    attempts: usize,
    primitives: usize,
}

impl Workbench {
    fn new(primitive_strength: DephasingStrength) -> Self {
        Self {
            labels: LabelAllocator::new(),
            primitive_strength,
            probability: 1.0,
            attempts: 0,
            primitives: 0,
        }
    }

    fn primitive(&mut self) -> ClusterChain {
        self.primitives += 1;
        dephase_all(&fresh_primitive(&mut self.labels), self.primitive_strength)
    }

    fn join(&mut self, a: &ClusterChain, ea: End, b: &ClusterChain, eb: End) -> Result<ClusterChain> {
        self.attempts += 1;
        let outcomes = fuse(a, b, ea.of(a)?, eb.of(b)?, &mut self.labels)?;
        let hit = success_branch(&outcomes).ok_or(Error::ZeroProbability)?;
        self.probability *= hit.probability;
        let chain = hit.chains[0].clone();
        expect_len(&chain, a.len() + b.len() - 1)?;
        Ok(chain)
    }

    fn fail(&mut self, a: &ClusterChain, ea: End, b: &ClusterChain, eb: End) -> Result<(ClusterChain, ClusterChain)> {
        self.attempts += 1;
        let outcomes = fuse(a, b, ea.of(a)?, eb.of(b)?, &mut self.labels)?;
        let (ra, rb, probability) = aggregate_failure(&outcomes)?;
        self.probability *= probability;
        expect_len(&ra, a.len() - 1)?;
        expect_len(&rb, b.len() - 1)?;
        Ok((ra, rb))
    }

    /// Two primitives fused into a 3-chain.
    fn three_chain(&mut self) -> Result<ClusterChain> {
        let (a, b) = (self.primitive(), self.primitive());
        self.join(&a, End::Tail, &b, End::Head)
    }

    /// Attaches a fresh primitive at the tail.
    fn grow(&mut self, chain: &ClusterChain) -> Result<ClusterChain> {
        let p = self.primitive();
        self.join(chain, End::Tail, &p, End::Head)
    }

    /// A 3+3 fusion that fails, its remnants refused into a 3-chain. The
    /// first 3-chain waits `p_wait` before the common `p2`.
    fn recycled_three_chain(&mut self, s: &Scenario) -> Result<ClusterChain> {
        use Interval::*;
        let a = self.three_chain()?;
        let b = self.three_chain()?;
        let a = dephase_all(&dephase_all(&a, s.p(Wait)), s.p(P2));
        let b = dephase_all(&b, s.p(P2));
        let (ra, rb) = self.fail(&a, End::Tail, &b, End::Head)?;
        let (ra, rb) = (dephase_all(&ra, s.p(P3)), dephase_all(&rb, s.p(P3)));
        self.join(&ra, End::Tail, &rb, End::Head)
    }

    fn finish(self, chain: ClusterChain) -> Result<ScenarioRun> {
        expect_len(&chain, TARGET_LENGTH)?;
        Ok(ScenarioRun {
            fidelity: chain.fidelity(),
            chain,
            branch_probability: self.probability,
            fusion_attempts: self.attempts,
            primitives_used: self.primitives,
        })
    }
}

fn expect_len(chain: &ClusterChain, expected: usize) -> Result<()> {
    if chain.len() == expected {
        Ok(())
    } else {
        Err(Error::Bookkeeping {
            expected,
            actual: chain.len(),
        })
    }
}

/// Runs the storyline of `s` and returns the conditioned five-qubit chain.
pub fn run_scenario(s: &Scenario) -> Result<ScenarioRun> {
    use Interval::*;
    let mut w = Workbench::new(s.p(P1));
    let chain = match s.kind {
        ScenarioKind::Method1AllSuccess | ScenarioKind::Method1Wait => {
            let a = w.three_chain()?;
            let b = w.three_chain()?;
            let a = if s.kind == ScenarioKind::Method1Wait {
                dephase_all(&a, s.p(Wait))
            } else {
                a
            };
            let (a, b) = (dephase_all(&a, s.p(P2)), dephase_all(&b, s.p(P2)));
            w.join(&a, End::Tail, &b, End::Head)?
        }
        ScenarioKind::Method2AllSuccess => {
            let t = dephase_all(&w.three_chain()?, s.p(P2));
            let four = dephase_all(&w.grow(&t)?, s.p(P3));
            w.grow(&four)?
        }
        ScenarioKind::Method1FailFresh => {
            let r = dephase_all(&w.recycled_three_chain(s)?, s.p(P4));
            let fresh = dephase_all(&w.three_chain()?, s.p(P4));
            w.join(&r, End::Tail, &fresh, End::Head)?
        }
        ScenarioKind::Method1FailFail => {
            let r1 = dephase_all(&w.recycled_three_chain(s)?, s.p(P4));
            let r2 = dephase_all(&w.recycled_three_chain(s)?, s.p(P4));
            w.join(&r1, End::Tail, &r2, End::Head)?
        }
        ScenarioKind::Method2Fail3 => {
            let t = dephase_all(&w.three_chain()?, s.p(P2));
            let lost = w.primitive();
            let (rest, _) = w.fail(&t, End::Tail, &lost, End::Head)?;
            let mut c = rest;
            for interval in [P3, P4, P5] {
                c = w.grow(&dephase_all(&c, s.p(interval)))?;
            }
            c
        }
        ScenarioKind::Method2Fail4 => {
            let t = dephase_all(&w.three_chain()?, s.p(P2));
            let four = dephase_all(&w.grow(&t)?, s.p(P3));
            let lost = w.primitive();
            // the lost attempt is made at the head of the 4-chain
            let (_, rest) = w.fail(&lost, End::Tail, &four, End::Head)?;
            let c = w.grow(&dephase_all(&rest, s.p(P4)))?;
            w.grow(&dephase_all(&c, s.p(P5)))?
        }
    };
    w.finish(chain)
}

/// How the three strengths of the no-failure constructions follow a grid value.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Binding {
    /// `p1 = p2 = p3 = p`.
    Equal,
    /// `p1 = 0`, `p2 = p3 = p`.
    FreshPrimitives,
}

impl Binding {
    pub fn strengths(self, p: DephasingStrength) -> Strengths {
        match self {
            Binding::Equal => Strengths::uniform(p),
            Binding::FreshPrimitives => Strengths::fresh_primitives(p),
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize)]
pub struct MethodComparison {
    pub p: f64,
    pub three_three: f64,
    pub four_two: f64,
    /// `three_three - four_two`.
    pub difference: f64,
}

/// Simulated five-qubit fidelities of both no-failure methods per grid point.
pub fn compare_methods(grid: &[DephasingStrength], binding: Binding) -> Result<Vec<MethodComparison>> {
    grid.par_iter()
        .map(|&p| {
            let st = binding.strengths(p);
            let m1 = run_scenario(&Scenario::new(ScenarioKind::Method1AllSuccess, st.clone())?)?.fidelity;
            let m2 = run_scenario(&Scenario::new(ScenarioKind::Method2AllSuccess, st)?)?.fidelity;
            Ok(MethodComparison {
                p: p.value(),
                three_three: m1,
                four_two: m2,
                difference: m1 - m2,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn st(p: f64) -> DephasingStrength {
        DephasingStrength::new(p).unwrap()
    }

    #[test]
    fn names_round_trip() {
        for kind in ScenarioKind::ALL {
            assert_eq!(kind.name().parse::<ScenarioKind>().unwrap(), kind);
        }
        assert!(matches!(
            "method3".parse::<ScenarioKind>(),
            Err(Error::UnknownName { .. })
        ));
    }

    #[test]
    fn missing_strength_is_reported() {
        let s = Strengths::new().with(Interval::P1, st(0.1));
        assert_eq!(
            Scenario::new(ScenarioKind::Method1AllSuccess, s),
            Err(Error::MissingStrength {
                scenario: "method1-all-success",
                interval: "p2"
            })
        );
    }

    #[test]
    fn noiseless_scenarios_are_perfect() {
        for kind in ScenarioKind::ALL {
            let run = run_scenario(&Scenario::new(kind, Strengths::uniform(st(0.0))).unwrap()).unwrap();
            assert!((run.fidelity - 1.0).abs() < 1e-10, "{kind}");
            assert!(run.branch_probability > 0.0 && run.branch_probability <= 1.0);
        }
    }

    #[test]
    fn attempts_and_branch_probabilities() {
        let expect = [
            (ScenarioKind::Method1AllSuccess, 3, 4),
            (ScenarioKind::Method2AllSuccess, 3, 4),
            (ScenarioKind::Method1Wait, 3, 4),
            (ScenarioKind::Method1FailFresh, 6, 6),
            (ScenarioKind::Method1FailFail, 9, 8),
            (ScenarioKind::Method2Fail3, 5, 6),
            (ScenarioKind::Method2Fail4, 5, 6),
        ];
        for (kind, attempts, prims) in expect {
            let run = run_scenario(&Scenario::new(kind, Strengths::uniform(st(0.2))).unwrap()).unwrap();
            assert_eq!(run.fusion_attempts, attempts, "{kind}");
            assert_eq!(run.primitives_used, prims, "{kind}");
            // every fusion, failed or not, is a coin flip on these inputs
            let want = 0.5f64.powi(attempts as i32);
            assert!((run.branch_probability - want).abs() < 1e-12, "{kind}");
        }
    }

    #[test]
    fn simulation_matches_closed_forms() {
        for kind in ScenarioKind::ALL {
            for i in 0..5 {
                let p = st(0.05 + 0.2 * i as f64);
                let s = Scenario::new(kind, Strengths::fresh_primitives(p)).unwrap();
                let sim = run_scenario(&s).unwrap().fidelity;
                let formula = s.closed_form(Transcription::Corrected).unwrap();
                assert!(
                    (sim - formula).abs() < 1e-9,
                    "{kind} p={}: {sim} vs {formula}",
                    p.value()
                );
            }
        }
    }

    #[test]
    fn failure_forms_need_fresh_primitives() {
        let s = Scenario::new(ScenarioKind::Method2Fail3, Strengths::uniform(st(0.1))).unwrap();
        assert_eq!(s.closed_form(Transcription::Corrected), None);
        let s = Scenario::new(ScenarioKind::Method2AllSuccess, Strengths::uniform(st(0.1))).unwrap();
        assert!(s.closed_form(Transcription::Corrected).is_some());
    }

    #[test]
    fn comparison_at_zero() {
        let rows = compare_methods(&[st(0.0), st(0.5)], Binding::Equal).unwrap();
        assert_eq!(rows.len(), 2);
        assert!((rows[0].three_three - 1.0).abs() < 1e-12);
        assert!(rows[0].difference.abs() < 1e-12);
        assert!((rows[1].difference - (rows[1].three_three - rows[1].four_two)).abs() < 1e-15);
    }
}
