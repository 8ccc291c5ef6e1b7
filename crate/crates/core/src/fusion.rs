//! Type I fusion of two chain ends as a three-outcome measurement.
//!
//! The two edge qubits are measured with
//!
//! * success `K_s = |0><00| + |1><11|`: the pair collapses onto one surviving
//!   qubit, joining the chains into one of length `m + n - 1`;
//! * failure `<01|` or `<10|`: both qubits are removed, leaving chains of
//!   length `m - 1` and `n - 1`. A `Z` is applied to the chain neighbour of
//!   each measured qubit that read `1`, so ideal inputs leave canonical
//!   cluster remnants.
//!
//! On canonical inputs the success branch has probability 1/2 and each
//! failure branch 1/4.

use num_complex::Complex64;

use crate::cluster::{ClusterChain, Label, LabelAllocator};
use crate::densmat::{apply_local, partial_trace, tensor, CMatrix, DensityMatrix};
use crate::error::{Error, Result};
use crate::tol;

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum FusionKind {
    Success,
    /// Failure branch; the computational-basis readings of the two edge qubits.
    Failure {
        bit_a: u8,
        bit_b: u8,
    },
}

#[derive(Clone, Debug)]
pub struct FusionOutcome {
    pub kind: FusionKind,
    pub probability: f64,
    /// One merged chain on success; the two remnants (a's, then b's) on failure.
    pub chains: Vec<ClusterChain>,
    /// Label of the surviving fused qubit. Freshly allocated per call, so it
    /// also identifies which `fuse` call produced the outcome.
    pub fused_label: Label,
    /// The edge labels that were measured.
    pub parents: (Label, Label),
}

impl FusionOutcome {
    pub fn is_success(&self) -> bool {
        self.kind == FusionKind::Success
    }
}

/// The measurement operators on the two edge qubits (edge of `a` first).
#[derive(Clone, Debug)]
pub struct FusionMeasurement {
    pub success: CMatrix,
    pub failures: [((u8, u8), CMatrix); 2],
}

impl FusionMeasurement {
    pub fn new() -> Self {
        let c = |x: f64| Complex64::new(x, 0.0);
        let bra = |idx: usize| CMatrix::from_fn(1, 4, |_, col| c(if col == idx { 1.0 } else { 0.0 }));
        let success = CMatrix::from_fn(2, 4, |row, col| {
            c(if (row, col) == (0, 0b00) || (row, col) == (1, 0b11) {
                1.0
            } else {
                0.0
            })
        });
        let m = Self {
            success,
            failures: [((0, 1), bra(0b01)), ((1, 0), bra(0b10))],
        };
        debug_assert!(m.completeness_defect() < tol::STRUCTURAL);
        m
    }

    /// Max deviation of `sum K^dagger K` from the 4x4 identity.
    pub fn completeness_defect(&self) -> f64 {
        let mut sum = self.success.adjoint() * &self.success;
        for (_, k) in &self.failures {
            sum += k.adjoint() * k;
        }
        (sum - CMatrix::identity(4, 4)).iter().fold(0.0, |w, z| w.max(z.norm()))
    }
}

impl Default for FusionMeasurement {
    fn default() -> Self {
        Self::new()
    }
}

fn pauli_z() -> CMatrix {
    CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
        Complex64::new(1.0, 0.0),
        Complex64::new(-1.0, 0.0),
    ]))
}

fn oriented(chain: &ClusterChain, edge: Label, edge_last: bool) -> (ClusterChain, bool) {
    let at_wanted_end = if edge_last { chain.tail() } else { chain.head() } == Some(edge);
    if at_wanted_end {
        (chain.clone(), false)
    } else {
        (chain.reversed(), true)
    }
}

fn remnant(labels: &[Label], state: DensityMatrix, flip_back: bool) -> Result<ClusterChain> {
    let chain = ClusterChain::new(labels.to_vec(), state)?;
    Ok(if flip_back { chain.reversed() } else { chain })
}

/// Fuses the end `edge_a` of chain `a` with the end `edge_b` of chain `b`.
///
/// Returns every branch with non-negligible Born probability, each with its
/// renormalized post-measurement chains. The merged chain lists `a`'s labels
/// (read so that `edge_a` comes last, with `edge_a` replaced by the fused
/// label) followed by `b`'s labels after `edge_b`. Failure remnants keep the
/// reading direction of their parent chains.
pub fn fuse(
    a: &ClusterChain,
    b: &ClusterChain,
    edge_a: Label,
    edge_b: Label,
    labels: &mut LabelAllocator,
) -> Result<Vec<FusionOutcome>> {
    if !a.is_endpoint(edge_a) {
        return Err(Error::NotEndpoint(edge_a));
    }
    if !b.is_endpoint(edge_b) {
        return Err(Error::NotEndpoint(edge_b));
    }
    if let Some(&shared) = a.labels().iter().find(|l| b.labels().contains(l)) {
        return Err(Error::OverlappingChains(shared));
    }

    let (a_or, flip_a) = oriented(a, edge_a, true);
    let (b_or, flip_b) = oriented(b, edge_b, false);
    let (m, n) = (a.len(), b.len());
    let joint = tensor(a_or.state(), b_or.state())?;
    let fused_label = labels.next_label();
    let meas = FusionMeasurement::new();
    let mut outcomes = Vec::with_capacity(3);

    let post = apply_local(&joint, m, std::slice::from_ref(&meas.success))?;
    let probability = post.trace();
    if probability > tol::STRUCTURAL {
        let mut merged: Vec<Label> = a_or.labels()[..m - 1].to_vec();
        merged.push(fused_label);
        merged.extend_from_slice(&b_or.labels()[1..]);
        let chain = ClusterChain::new(merged, post.normalized()?)?;
        outcomes.push(FusionOutcome {
            kind: FusionKind::Success,
            probability,
            chains: vec![chain],
            fused_label,
            parents: (edge_a, edge_b),
        });
    }

    let z = [pauli_z()];
    for ((bit_a, bit_b), bra) in &meas.failures {
        let mut post = apply_local(&joint, m, std::slice::from_ref(bra))?;
        let probability = post.trace();
        if probability <= tol::STRUCTURAL {
            continue;
        }
        // Z byproducts on the qubits that were bonded to a measured `1`
        if *bit_a == 1 && m >= 2 {
            post = apply_local(&post, m - 1, &z)?;
        }
        if *bit_b == 1 && n >= 2 {
            post = apply_local(&post, m, &z)?;
        }
        let post = post.normalized()?;
        // the two sides are in a product state, so the marginals are exact
        let b_side: Vec<usize> = (m..m + n - 1).collect();
        let a_side: Vec<usize> = (1..m).collect();
        let rem_a = remnant(&a_or.labels()[..m - 1], partial_trace(&post, &b_side)?, flip_a)?;
        let rem_b = remnant(&b_or.labels()[1..], partial_trace(&post, &a_side)?, flip_b)?;
        outcomes.push(FusionOutcome {
            kind: FusionKind::Failure {
                bit_a: *bit_a,
                bit_b: *bit_b,
            },
            probability,
            chains: vec![rem_a, rem_b],
            fused_label,
            parents: (edge_a, edge_b),
        });
    }
    Ok(outcomes)
}

/// The success branch, if it occurred with non-zero probability.
pub fn success_branch(outcomes: &[FusionOutcome]) -> Option<&FusionOutcome> {
    outcomes.iter().find(|o| o.is_success())
}

/// Mixes the failure branches of one `fuse` call into the two remnant chains
/// an observer who only learns "failed" would hold. Returns the remnants and
/// the total failure probability.
pub fn aggregate_failure(outcomes: &[FusionOutcome]) -> Result<(ClusterChain, ClusterChain, f64)> {
    let failures: Vec<&FusionOutcome> = outcomes.iter().filter(|o| !o.is_success()).collect();
    let first = *failures.first().ok_or(Error::NoFailureBranch)?;
    if failures.iter().any(|o| o.fused_label != first.fused_label) {
        return Err(Error::MixedFusionCalls);
    }
    let total: f64 = failures.iter().map(|o| o.probability).sum();
    if total <= 0.0 {
        return Err(Error::ZeroProbability);
    }
    let mix = |side: usize| -> Result<ClusterChain> {
        let template = &first.chains[side];
        let mut acc = CMatrix::zeros(template.state().dim(), template.state().dim());
        for o in &failures {
            if o.chains[side].labels() != template.labels() {
                return Err(Error::MixedFusionCalls);
            }
            acc += o.chains[side].state().matrix() * Complex64::new(o.probability / total, 0.0);
        }
        ClusterChain::new(template.labels().to_vec(), DensityMatrix::from_matrix(acc)?)
    };
    Ok((mix(0)?, mix(1)?, total))
}
