//! Photon loss during fusion, tracked at the level of chain topology.
//!
//! A fusion attempt joins the edge photon of chain A (length `m`) with the
//! edge photon of chain B (length `n`). The detector model:
//!
//! * with both photons present, the fusion succeeds with probability 1/2 and
//!   sends one photon to the detector; otherwise it fails and sends both;
//! * with one photon missing, the survivor reaches the detector with
//!   probability 1/2;
//! * every photon that reaches the detector fires it with probability
//!   `detector_efficiency`.
//!
//! One click reads as success and zero or two clicks as failure, so a missing
//! photon goes unnoticed with probability `1 - efficiency / 2`.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
pub enum LostPhoton {
    None,
    EdgeA,
    EdgeB,
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize)]
pub struct LossScenario {
    m: usize,
    n: usize,
    lost: LostPhoton,
    detector_efficiency: f64,
}

impl LossScenario {
    pub fn new(m: usize, n: usize, lost: LostPhoton, detector_efficiency: f64) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::LengthOutOfRange {
                got: m.min(n),
                min: 1,
                max: usize::MAX,
            });
        }
        if !(0.0..=1.0).contains(&detector_efficiency) {
            return Err(Error::InvalidArgument(format!(
                "detector efficiency {detector_efficiency} is outside [0, 1]"
            )));
        }
        Ok(Self {
            m,
            n,
            lost,
            detector_efficiency,
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn lost(&self) -> LostPhoton {
        self.lost
    }

    pub fn detector_efficiency(&self) -> f64 {
        self.detector_efficiency
    }

    /// Probability that the attempt is read as a failure.
    pub fn perceived_failure_probability(&self) -> f64 {
        let eta = self.detector_efficiency;
        match self.lost {
            LostPhoton::None => 0.5 * (1.0 - eta) + 0.5 * (eta * eta + (1.0 - eta) * (1.0 - eta)),
            LostPhoton::EdgeA | LostPhoton::EdgeB => 1.0 - 0.5 * eta,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Perceived {
    Success,
    Failure,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Actual {
    /// One chain of length `m + n - 1`, as after an ordinary success.
    Connected,
    /// Two separate chains.
    Disconnected,
    /// A success that was read as a failure: one chain of length `m + n - 1`
    /// that the observer believes to be two.
    SilentlyMerged,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LossEventOutcome {
    pub perceived: Perceived,
    pub actual: Actual,
    /// Lengths of the chains that physically exist afterwards.
    pub resulting_lengths: Vec<usize>,
    /// 1-based chain position holding two mutually bonded photons.
    pub doubled_node: Option<usize>,
    /// 1-based positions (in the pre-attempt chain) of photons lost.
    pub lost_positions: Vec<usize>,
}

impl LossEventOutcome {
    /// The observer's picture matches the physical chains.
    pub fn is_harmless(&self) -> bool {
        matches!(
            (self.perceived, self.actual),
            (Perceived::Success, Actual::Connected) | (Perceived::Failure, Actual::Disconnected)
        )
    }
}

/// Uniform draws in `[0, 1)` resolving one attempt.
#[derive(Copy, Clone, Debug, PartialEq, Serialize)]
pub struct LossDraws {
    /// Below 1/2: the fusion succeeds (both photons present) or the surviving
    /// photon reaches the detector (one photon missing).
    pub route: f64,
    /// One draw per photon that can reach the detector; a photon clicks when
    /// its draw is below the efficiency.
    pub clicks: [f64; 2],
}

pub fn classify_fusion_with_loss(s: &LossScenario, draws: &LossDraws) -> LossEventOutcome {
    let (m, n, eta) = (s.m, s.n, s.detector_efficiency);
    let click = |k: usize| draws.clicks[k] < eta;
    let first_route = draws.route < 0.5;
    let split = vec![m - 1, n - 1];
    let outcome = |perceived, actual, resulting_lengths| LossEventOutcome {
        perceived,
        actual,
        resulting_lengths,
        doubled_node: None,
        lost_positions: Vec::new(),
    };
    match s.lost {
        LostPhoton::None if first_route => {
            if click(0) {
                outcome(Perceived::Success, Actual::Connected, vec![m + n - 1])
            } else {
                outcome(Perceived::Failure, Actual::SilentlyMerged, vec![m + n - 1])
            }
        }
        LostPhoton::None => {
            let clicks = usize::from(click(0)) + usize::from(click(1));
            let perceived = if clicks == 1 {
                Perceived::Success
            } else {
                Perceived::Failure
            };
            outcome(perceived, Actual::Disconnected, split)
        }
        LostPhoton::EdgeA | LostPhoton::EdgeB => {
            let perceived = if first_route && click(0) {
                Perceived::Success
            } else {
                Perceived::Failure
            };
            outcome(perceived, Actual::Disconnected, split)
        }
    }
}

/// A silently merged chain of length `m + n - 1` is fused again at the
/// photons believed to be its ends, positions `m - 1` and `m + 1`.
pub fn retry_after_false_failure(m: usize, n: usize, second_success: bool) -> Result<LossEventOutcome> {
    if m < 2 || n < 2 {
        return Err(Error::LengthOutOfRange {
            got: m.min(n),
            min: 2,
            max: usize::MAX,
        });
    }
    Ok(if second_success {
        LossEventOutcome {
            perceived: Perceived::Success,
            actual: Actual::Connected,
            resulting_lengths: vec![m + n - 3],
            doubled_node: Some(m - 1),
            lost_positions: Vec::new(),
        }
    } else {
        LossEventOutcome {
            perceived: Perceived::Failure,
            actual: Actual::Disconnected,
            resulting_lengths: vec![m - 2, n - 2],
            doubled_node: None,
            lost_positions: vec![m - 1, m, m + 1],
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn draws(route: f64, a: f64, b: f64) -> LossDraws {
        LossDraws { route, clicks: [a, b] }
    }

    #[test]
    fn missing_partner_and_no_click_is_harmless() {
        let s = LossScenario::new(4, 3, LostPhoton::EdgeB, 0.9).unwrap();
        let out = classify_fusion_with_loss(&s, &draws(0.7, 0.0, 0.0));
        assert_eq!(out.perceived, Perceived::Failure);
        assert_eq!(out.resulting_lengths, vec![3, 2]);
        assert!(out.is_harmless());
    }

    #[test]
    fn missing_partner_with_click_looks_like_success() {
        let s = LossScenario::new(4, 3, LostPhoton::EdgeB, 0.9).unwrap();
        let out = classify_fusion_with_loss(&s, &draws(0.2, 0.1, 0.99));
        assert_eq!((out.perceived, out.actual), (Perceived::Success, Actual::Disconnected));
        assert!(!out.is_harmless());
    }

    #[test]
    fn missed_click_on_success_merges_silently() {
        let s = LossScenario::new(3, 4, LostPhoton::None, 0.8).unwrap();
        let out = classify_fusion_with_loss(&s, &draws(0.1, 0.95, 0.0));
        assert_eq!(
            (out.perceived, out.actual),
            (Perceived::Failure, Actual::SilentlyMerged)
        );
        assert_eq!(out.resulting_lengths, vec![6]);
    }

    #[test]
    fn one_of_two_clicks_reads_as_success() {
        let s = LossScenario::new(3, 3, LostPhoton::None, 0.5).unwrap();
        let out = classify_fusion_with_loss(&s, &draws(0.9, 0.1, 0.9));
        assert_eq!((out.perceived, out.actual), (Perceived::Success, Actual::Disconnected));
    }

    #[test]
    fn perfect_detectors_give_ordinary_outcomes() {
        let s = LossScenario::new(3, 5, LostPhoton::None, 1.0).unwrap();
        for route in [0.0, 0.3, 0.5, 0.99] {
            for a in [0.0, 0.5, 0.999] {
                let out = classify_fusion_with_loss(&s, &draws(route, a, a));
                assert!(out.is_harmless());
            }
        }
        assert_eq!(s.perceived_failure_probability(), 0.5);
    }

    #[test]
    fn retry_arithmetic() {
        let ok = retry_after_false_failure(3, 3, true).unwrap();
        assert_eq!((ok.resulting_lengths.clone(), ok.doubled_node), (vec![3], Some(2)));
        assert_eq!(
            retry_after_false_failure(2, 2, true).unwrap().resulting_lengths,
            vec![1]
        );
        let bad = retry_after_false_failure(3, 3, false).unwrap();
        assert_eq!(bad.lost_positions, vec![2, 3, 4]);
        assert!(retry_after_false_failure(1, 3, true).is_err());
    }

    #[test]
    fn invalid_scenarios() {
        assert!(LossScenario::new(0, 3, LostPhoton::None, 0.5).is_err());
        assert!(LossScenario::new(2, 3, LostPhoton::None, 1.5).is_err());
    }
}
