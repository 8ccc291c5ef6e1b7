//! Closed-form fidelities and negativities of fused, dephased clusters.
//!
//! Every expression here has a density-matrix counterpart in
//! [`crate::strategies`]; the simulation is the ground truth of the model.
//! A few expressions have a second, literal form that disagrees with the
//! simulation (unbalanced parentheses, a stray symbol, one polynomial that
//! matches no construction). Those come in two readings, selected by
//! [`Transcription`]:
//!
//! * `Literal` evaluates the literal form with the least intrusive repair
//!   that makes it parse;
//! * `Corrected` is the expression that reproduces the simulation.

use serde::Serialize;

use crate::densmat::MAX_QUBITS;
use crate::error::{Error, Result};
use crate::noise::DephasingStrength;

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub enum Transcription {
    Literal,
    #[default]
    Corrected,
}

/// Fidelity of a `q`-qubit chain fused (always successfully) from two-qubit
/// primitives that were each dephased with strength `p`:
/// `|2^-q (2 + 2 sqrt(1-p) - p) (p-2)^(q-2)|`.
pub fn chain_fidelity(q: usize, p: DephasingStrength) -> Result<f64> {
    if !(2..=MAX_QUBITS).contains(&q) {
        return Err(Error::LengthOutOfRange {
            got: q,
            min: 2,
            max: MAX_QUBITS,
        });
    }
    let p = p.value();
    let head = 2.0 + 2.0 * (1.0 - p).sqrt() - p;
    Ok((head * (p - 2.0).powi(q as i32 - 2) / f64::from(1u32 << q)).abs())
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize)]
pub struct Rho2Metrics {
    pub fidelity: f64,
    pub purity: f64,
    /// Minimum eigenvalue of the partial transpose.
    pub negativity: f64,
}

pub fn rho2_metrics(p: DephasingStrength) -> Rho2Metrics {
    let p = p.value();
    let r = (1.0 - p).sqrt();
    Rho2Metrics {
        fidelity: 0.25 * (2.0 + 2.0 * r - p),
        purity: 0.25 * (p - 2.0).powi(2),
        negativity: 0.25 * (p - 2.0 * r),
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize)]
pub struct Rho3Metrics {
    pub fidelity: f64,
    /// Partial transpose on an end qubit (1 or 3).
    pub negativity_edge: f64,
    /// Partial transpose on the middle qubit.
    pub negativity_middle: f64,
}

/// Metrics of the three-qubit chain fused from two primitives dephased by `p`.
pub fn rho3_metrics(p: DephasingStrength) -> Rho3Metrics {
    rho3_metrics_with(p, Transcription::Corrected)
}

/// The literal middle-qubit negativity is `-2 sqrt(1-p)(p-2)^2)` with a
/// stray parenthesis. `Literal` reads it as `sqrt(1-p) * (p-2)^2`;
/// `Corrected` reads it as `sqrt((1-p)(p-2)^2) = (2-p) sqrt(1-p)`, which
/// matches the simulation and vanishes at `p = 2(sqrt 2 - 1)`.
pub fn rho3_metrics_with(p: DephasingStrength, reading: Transcription) -> Rho3Metrics {
    let p = p.value();
    let r = (1.0 - p).sqrt();
    let middle_root_term = match reading {
        Transcription::Literal => r * (p - 2.0).powi(2),
        Transcription::Corrected => r * (2.0 - p),
    };
    Rho3Metrics {
        fidelity: ((2.0 + 2.0 * r - p) * (p - 2.0) / 8.0).abs(),
        negativity_edge: (-2.0 * (1.0 + (1.0 - p).powf(1.5)) + p * (4.0 - p)) / 8.0,
        negativity_middle: (-2.0 * middle_root_term + 2.0 * p - p * p) / 8.0,
    }
}

/// Bisection for a sign change of `f` on `[lo, hi]`, stopping once the
/// bracket is narrower than `width`. `None` if the endpoints share a sign.
pub fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, width: f64) -> Option<f64> {
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Some(lo);
    }
    if f_hi == 0.0 {
        return Some(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return None;
    }
    while hi - lo > width {
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Some(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Bracket width used for entanglement-death points.
pub const ROOT_WIDTH: f64 = 1e-10;

fn strength(p: f64) -> DephasingStrength {
    DephasingStrength::new(p.clamp(0.0, 1.0)).expect("clamped into range")
}

/// Dephasing strength at which the end-qubit negativity of the fused
/// three-qubit chain reaches zero (about 0.7044).
pub fn edge_death_point() -> f64 {
    bisect(|p| rho3_metrics(strength(p)).negativity_edge, 0.0, 1.0, ROOT_WIDTH)
        .expect("negativity changes sign on [0, 1]")
}

/// Same for the middle qubit; analytically `2(sqrt 2 - 1)`.
pub fn middle_death_point() -> f64 {
    bisect(|p| rho3_metrics(strength(p)).negativity_middle, 0.0, 1.0, ROOT_WIDTH)
        .expect("negativity changes sign on [0, 1]")
}

/// How a five-qubit chain is assembled when every fusion succeeds.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
pub enum ConstructionMethod {
    /// Two three-qubit chains, each fused from two primitives.
    ThreeThree,
    /// Primitives fused one at a time onto a growing chain.
    FourTwo,
}

/// Five-qubit fidelity with no fusion failures.
///
/// `p1` dephases every primitive; `p2` is the storage before the second
/// fusion round, `p3` before the third (`FourTwo` only; ignored otherwise).
pub fn no_failure_fidelity(
    method: ConstructionMethod,
    p1: DephasingStrength,
    p2: DephasingStrength,
    p3: DephasingStrength,
) -> f64 {
    let (a, b, c) = (p1.complement(), p2.complement(), p3.complement());
    let s = f64::sqrt;
    match method {
        ConstructionMethod::ThreeThree => {
            (1.0 + 2.0 * a.powf(3.5) * b.powf(2.5)
                + a.powi(4) * b.powi(3)
                + 2.0 * s(a * b)
                + 2.0 * a.powf(2.5) * (b.powf(1.5) + b * b)
                + 2.0 * a.powi(3) * (b * b + b.powf(2.5))
                + 2.0 * a * (s(b) + b) * (1.0 + s(a * b))
                + a * a * b * (1.0 + b + 2.0 * s(a) * b)
                + 2.0 * a.powf(1.5) * (b + 2.0 * s(a) * b.powf(1.5)))
                / 32.0
        }
        ConstructionMethod::FourTwo => {
            (1.0 + s(a))
                * (1.0
                    + s(a * b * c)
                    + s(a)
                        * (a.powf(1.5) * (s(b) + b) * c
                            + a * (2.0 * b + s(a * b)) * c
                            + a.powi(3) * b.powf(1.5) * c * c
                            + s(a * c)
                            + s(a * b * c)
                            + s(a) * (s(a * b) * c + s(b * c))
                            + a * a * b * c * (2.0 * s(c) + s(a * c) + s(b * c))))
                / 32.0
        }
    }
}

/// Five-qubit constructions that involve waiting or a failed fusion.
/// All assume undephased primitives (`p1 = 0`).
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
pub enum FailureCase {
    /// Two three-qubit chains, one of which waited `p_wait` for the other.
    Method1Wait,
    /// The three-three fusion failed; the remnants were refused into a
    /// recycled chain, then joined with a fresh three-qubit chain.
    Method1FailFresh,
    /// As above, but both three-qubit chains are recycled.
    Method1FailFail,
    /// Growing chain: the primitive fusion onto the three-qubit chain failed.
    Method2Fail3,
    /// Growing chain: the primitive fusion onto the four-qubit chain failed.
    Method2Fail4,
}

/// Storage strengths for [`failure_fidelity`]; unused entries are ignored.
#[derive(Copy, Clone, Debug, PartialEq, Serialize)]
pub struct FailureStrengths {
    pub p2: DephasingStrength,
    pub p3: DephasingStrength,
    pub p4: DephasingStrength,
    pub p5: DephasingStrength,
    pub p_wait: DephasingStrength,
}

impl FailureStrengths {
    pub fn uniform(p: DephasingStrength) -> Self {
        Self {
            p2: p,
            p3: p,
            p4: p,
            p5: p,
            p_wait: p,
        }
    }
}

/// Monomials `(k_s, k_t, k_u, coeff)` of `32 F` for two recycled chains, in
/// `s = sqrt((1-p2)(1-p3))`, `t = sqrt(1-p4)`, `u = sqrt(1-p_wait)`. Derived
/// symbolically from the density-matrix construction.
const RECYCLED_PAIR_TERMS: [(i32, i32, i32, f64); 21] = [
    (0, 0, 0, 1.0),
    (1, 1, 0, 1.0),
    (1, 1, 1, 1.0),
    (2, 1, 1, 2.0),
    (2, 2, 1, 2.0),
    (3, 2, 1, 2.0),
    (3, 2, 2, 2.0),
    (3, 3, 1, 1.0),
    (3, 3, 2, 1.0),
    (4, 2, 2, 1.0),
    (4, 3, 2, 4.0),
    (4, 4, 2, 1.0),
    (5, 3, 2, 1.0),
    (5, 3, 3, 1.0),
    (5, 4, 2, 2.0),
    (5, 4, 3, 2.0),
    (6, 4, 3, 2.0),
    (6, 5, 3, 2.0),
    (7, 5, 3, 1.0),
    (7, 5, 4, 1.0),
    (8, 6, 4, 1.0),
];

pub fn failure_fidelity(case: FailureCase, st: &FailureStrengths, reading: Transcription) -> f64 {
    let b = st.p2.complement();
    let c = st.p3.complement();
    let d = st.p4.complement();
    let e = st.p5.complement();
    let w = st.p_wait.complement();
    let s = f64::sqrt;
    let x = b * c;
    match case {
        FailureCase::Method1Wait => {
            (1.0 + s(b)).powi(2) * (1.0 + b * w + 2.0 * s(b * w) + b * s(w) + b.powf(1.5) * w * (2.0 + s(b * w))) / 32.0
        }
        FailureCase::Method1FailFresh => {
            (1.0 + s(d)).powi(2)
                * (1.0
                    + s(x) * d
                    + x.powf(1.5) * d * w
                    + x * x * d * d * w
                    + (x + s(x)) * s(x * w) * d.powf(1.5)
                    + x * s(d * w)
                    + s(x * d * w))
                / 32.0
        }
        FailureCase::Method1FailFail => match reading {
            Transcription::Literal => {
                (x.powi(4) * (1.0 + s(x * d)) * d.powf(2.5) * w * w
                    + x.powi(3) * d * d * w * (1.0 + 2.0 * s(x * w) + (2.0 + s(x)) * s(x * d * w))
                    + x * x * d * s(w) * (2.0 + s(d) + s(d * w) + 2.0 * s(x * d * w))
                    + s(x)
                        * (1.0
                            + s(x * d)
                            + 2.0 * x * s(d * w)
                            + s(x * d * w)
                            + 2.0 * x * d * s(w)
                            + x.powf(1.5) * d * w
                            + x * x
                                * d
                                * w
                                * (1.0
                                    + s(x)
                                    + 2.0 * s(x * d)
                                    + s(x) * d * (1.0 + s(x * w))
                                    + x * s(d) * (1.0 + s(w))
                                    + x * d * (1.0 + s(w)))))
                    / (32.0 * s(x))
            }
            Transcription::Corrected => {
                let (ss, t, u) = (s(x), s(d), s(w));
                RECYCLED_PAIR_TERMS
                    .iter()
                    .map(|&(ks, kt, ku, coeff)| coeff * ss.powi(ks) * t.powi(kt) * u.powi(ku))
                    .sum::<f64>()
                    / 32.0
            }
        },
        FailureCase::Method2Fail3 => {
            ((16.0 * x + 5.0 * s(x)) * d * e.powf(1.5)
                + 8.0 * x * d.powf(1.5) * e * e
                + 2.0 * s(e) * (8.0 + d * s(x * e))
                + 2.0 * (8.0 + 8.0 * s(d * e) + 16.0 * s(x * d * e) + s(x * d) * e + s(x) * d * e)
                + e * (16.0 * s(d)
                    + 2.0 * (15.0 * s(x * d) + s(x) * d + 2.0 * s(x * e) * d)
                    + d * (26.0 * s(x) + 23.0 * s(x * e) + 8.0 * x * (2.0 + 2.0 * s(d * e) + s(d) * e))))
                / 256.0
        }
        FailureCase::Method2Fail4 => {
            (8.0 + 8.0 * s(e)
                + (3.0 * s(b) + 8.0 * b) * c * d * e.powf(1.5)
                + 4.0 * b * (c * d).powf(1.5) * e * e
                + 8.0 * s(c * d * e)
                + 16.0 * s(b * c * d * e)
                + s(b * c * d) * e
                + e * (8.0 * s(c * d)
                    + 15.0 * s(b * c * d)
                    + c * d * (16.0 * s(b) + 13.0 * s(b * e) + 4.0 * b * (2.0 + 2.0 * s(c * d * e) + s(c * d) * e))))
                / 128.0
        }
    }
}
