//! Linear cluster states and labelled chains.

use std::collections::HashSet;
use std::fmt;

use serde::Serialize;

use crate::densmat::{fidelity_pure, DensityMatrix, PureState, MAX_QUBITS};
use crate::error::{Error, Result};

/// Identity of a physical qubit (photon) across fusions.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Label(pub u32);

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "q{}", self.0)
    }
}

/// Monotonic label source, one per simulation run.
#[derive(Debug, Default, Clone)]
pub struct LabelAllocator {
    next: u32,
}

impl LabelAllocator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn next_label(&mut self) -> Label {
        let label = Label(self.next);
        self.next += 1;
        label
    }

    pub fn issued(&self) -> u32 {
        self.next
    }
}

/// `prod_i CZ_{i,i+1}` applied to `|+>^n`.
pub fn linear_cluster(n: usize) -> Result<PureState> {
    if !(1..=MAX_QUBITS).contains(&n) {
        return Err(Error::LengthOutOfRange {
            got: n,
            min: 1,
            max: MAX_QUBITS,
        });
    }
    let dim = 1usize << n;
    let amp = (dim as f64).sqrt().recip();
    let top = dim - 1;
    let amps: Vec<f64> = (0..dim)
        .map(|x: usize| {
            // each CZ on neighbours (i, i+1) contributes a sign when both bits are set
            let links = (x & (x >> 1) & (top >> 1)).count_ones();
            if links.is_multiple_of(2) {
                amp
            } else {
                -amp
            }
        })
        .collect();
    PureState::from_real(&amps)
}

/// An ordered chain of labelled qubits together with their joint state.
/// Position `k` of `labels` is qubit `k + 1` of `state`.
#[derive(Clone, Debug, PartialEq)]
pub struct ClusterChain {
    labels: Vec<Label>,
    state: DensityMatrix,
}

impl ClusterChain {
    pub fn new(labels: Vec<Label>, state: DensityMatrix) -> Result<Self> {
        if labels.len() != state.qubits() {
            return Err(Error::LabelCount {
                labels: labels.len(),
                qubits: state.qubits(),
            });
        }
        let mut seen = HashSet::with_capacity(labels.len());
        for &l in &labels {
            if !seen.insert(l) {
                return Err(Error::DuplicateLabel(l));
            }
        }
        Ok(Self { labels, state })
    }

    /// What remains when a failed fusion consumes a length-1 chain.
    pub fn empty() -> Self {
        Self {
            labels: Vec::new(),
            state: DensityMatrix::scalar(),
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn state(&self) -> &DensityMatrix {
        &self.state
    }

    pub fn into_parts(self) -> (Vec<Label>, DensityMatrix) {
        (self.labels, self.state)
    }

    pub fn head(&self) -> Option<Label> {
        self.labels.first().copied()
    }

    pub fn tail(&self) -> Option<Label> {
        self.labels.last().copied()
    }

    pub fn position(&self, label: Label) -> Option<usize> {
        self.labels.iter().position(|&l| l == label)
    }

    pub fn is_endpoint(&self, label: Label) -> bool {
        self.head() == Some(label) || self.tail() == Some(label)
    }

    /// Same chain read from the other end.
    pub fn reversed(&self) -> Self {
        let mut labels = self.labels.clone();
        labels.reverse();
        Self {
            labels,
            state: self.state.reversed(),
        }
    }

    pub(crate) fn with_state(&self, state: DensityMatrix) -> Self {
        debug_assert_eq!(state.qubits(), self.labels.len());
        Self {
            labels: self.labels.clone(),
            state,
        }
    }

    /// Fidelity against the canonical linear cluster of the same length.
    pub fn fidelity(&self) -> f64 {
        if self.is_empty() {
            return 1.0;
        }
        let target = linear_cluster(self.len()).expect("chain length is within register bounds");
        fidelity_pure(&self.state, &target).expect("dimensions agree by construction")
    }
}

/// A fresh, undephased two-qubit cluster `(|00> + |01> + |10> - |11>) / 2`.
pub fn fresh_primitive(labels: &mut LabelAllocator) -> ClusterChain {
    let state = DensityMatrix::from_pure(&linear_cluster(2).expect("n = 2 is in range"));
    ClusterChain {
        labels: vec![labels.next_label(), labels.next_label()],
        state,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::densmat::{negativity, partial_trace, purity};

    #[test]
    fn two_qubit_cluster_amplitudes() {
        let psi = linear_cluster(2).unwrap();
        let amps: Vec<f64> = psi.amplitudes().iter().map(|z| z.re).collect();
        assert_eq!(amps, vec![0.5, 0.5, 0.5, -0.5]);
    }

    #[test]
    fn one_qubit_cluster_is_plus() {
        let psi = linear_cluster(1).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!(psi.amplitudes().iter().all(|z| (z.re - h).abs() < 1e-15 && z.im == 0.0));
    }

    /// Independent construction: `sum_b H|b> (x) |b> (x) H|b> / sqrt 2`.
    #[test]
    fn three_qubit_cluster_matches_hadamard_expansion() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let hb = |b: usize| if b == 0 { [h, h] } else { [h, -h] };
        let mut want = [0.0; 8];
        for b in 0..2 {
            for x in 0..2 {
                for z in 0..2 {
                    want[(x << 2) | (b << 1) | z] += hb(b)[x] * hb(b)[z] * h;
                }
            }
        }
        let psi = linear_cluster(3).unwrap();
        for (a, w) in psi.amplitudes().iter().zip(want) {
            assert!((a.re - w).abs() < 1e-15);
        }
    }

    #[test]
    fn out_of_range_lengths() {
        assert!(linear_cluster(0).is_err());
        assert!(linear_cluster(11).is_err());
        assert!(linear_cluster(10).is_ok());
    }

    #[test]
    fn norms_are_one() {
        for n in 1..=10 {
            let norm = linear_cluster(n).unwrap().amplitudes().norm_squared();
            assert!((norm - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn every_single_qubit_marginal_is_maximally_mixed() {
        for n in 3..=5 {
            let rho = DensityMatrix::from_pure(&linear_cluster(n).unwrap());
            for k in 1..=n {
                let others: Vec<usize> = (1..=n).filter(|&j| j != k).collect();
                let red = partial_trace(&rho, &others).unwrap();
                let want = DensityMatrix::maximally_mixed(1).unwrap();
                assert!((red.matrix() - want.matrix()).norm() < 1e-12, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn primitive_properties() {
        let mut alloc = LabelAllocator::new();
        let p = fresh_primitive(&mut alloc);
        assert_eq!(p.labels(), &[Label(0), Label(1)]);
        assert!((p.fidelity() - 1.0).abs() < 1e-15);
        assert!((purity(p.state()) - 1.0).abs() < 1e-15);
        assert!((negativity(p.state(), &[2]).unwrap() + 0.5).abs() < 1e-12);
        let q = fresh_primitive(&mut alloc);
        assert_eq!(q.labels(), &[Label(2), Label(3)]);
    }

    #[test]
    fn chain_invariants_are_enforced() {
        let state = DensityMatrix::from_pure(&linear_cluster(2).unwrap());
        assert!(matches!(
            ClusterChain::new(vec![Label(1)], state.clone()),
            Err(Error::LabelCount { labels: 1, qubits: 2 })
        ));
        assert_eq!(
            ClusterChain::new(vec![Label(4), Label(4)], state),
            Err(Error::DuplicateLabel(Label(4)))
        );
    }
}
