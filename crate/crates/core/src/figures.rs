//! Tabulated curves for the standard plots, simulated and analytic side by side.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::closed_forms::{chain_fidelity, rho2_metrics, rho3_metrics, Transcription};
use crate::cluster::{fresh_primitive, ClusterChain, LabelAllocator};
use crate::densmat::negativity;
use crate::error::{Error, Result};
use crate::fusion::{fuse, success_branch};
use crate::noise::{dephase_all, DephasingStrength};
use crate::strategies::{run_scenario, Binding, Scenario, ScenarioKind, Strengths};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
pub enum FigureId {
    /// Chain fidelity for lengths 2 to 7.
    Fig1,
    /// Partial-transpose minimum eigenvalues of 2- to 5-qubit chains.
    Fig2,
    /// Both no-failure constructions with all strengths equal.
    Fig3Left,
    /// Both no-failure constructions with undephased primitives.
    Fig3Right,
    /// Three-three constructions with waiting or a recycled chain.
    Fig4Left,
    /// Growing constructions with one failed fusion.
    Fig4Right,
}

impl FigureId {
    pub const ALL: [FigureId; 6] = [
        Self::Fig1,
        Self::Fig2,
        Self::Fig3Left,
        Self::Fig3Right,
        Self::Fig4Left,
        Self::Fig4Right,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Fig1 => "fig1",
            Self::Fig2 => "fig2",
            Self::Fig3Left => "fig3-left",
            Self::Fig3Right => "fig3-right",
            Self::Fig4Left => "fig4-left",
            Self::Fig4Right => "fig4-right",
        }
    }
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FigureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::UnknownName {
                kind: "figure",
                value: s.to_owned(),
            })
    }
}

/// Named columns of numbers, one row per grid point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }
}

/// `steps` evenly spaced points from `lo` to `hi` inclusive.
pub fn grid(lo: f64, hi: f64, steps: usize) -> Result<Vec<DephasingStrength>> {
    if steps == 0 || lo.is_nan() || hi.is_nan() || lo > hi {
        return Err(Error::InvalidArgument(format!(
            "bad grid {lo}..{hi} with {steps} steps"
        )));
    }
    if steps == 1 {
        return Ok(vec![DephasingStrength::new(lo)?]);
    }
    (0..steps)
        .map(|i| DephasingStrength::new(lo + (hi - lo) * i as f64 / (steps - 1) as f64))
        .collect()
}

/// A `q`-qubit chain grown by successful tail fusions of primitives that were
/// each dephased with strength `p`.
pub fn primitive_chain(q: usize, p: DephasingStrength) -> Result<ClusterChain> {
    if q < 2 {
        return Err(Error::LengthOutOfRange {
            got: q,
            min: 2,
            max: crate::densmat::MAX_QUBITS,
        });
    }
    let mut labels = LabelAllocator::new();
    let mut chain = dephase_all(&fresh_primitive(&mut labels), p);
    while chain.len() < q {
        let next = dephase_all(&fresh_primitive(&mut labels), p);
        let tail = chain.tail().expect("non-empty");
        let outcomes = fuse(&chain, &next, tail, next.head().expect("non-empty"), &mut labels)?;
        chain = success_branch(&outcomes).ok_or(Error::ZeroProbability)?.chains[0].clone();
    }
    Ok(chain)
}

fn tabulate(
    columns: Vec<String>,
    points: &[DephasingStrength],
    row: impl Fn(DephasingStrength) -> Result<Vec<f64>> + Sync,
) -> Result<Table> {
    let rows = points
        .par_iter()
        .map(|&p| {
            let mut r = vec![p.value()];
            r.extend(row(p)?);
            Ok(r)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut all = vec!["p".to_owned()];
    all.extend(columns);
    Ok(Table { columns: all, rows })
}

fn scenario_pair(kind: ScenarioKind, st: Strengths) -> Result<[f64; 2]> {
    let s = Scenario::new(kind, st)?;
    let sim = run_scenario(&s)?.fidelity;
    Ok([sim, s.closed_form(Transcription::Corrected).unwrap_or(f64::NAN)])
}

pub fn figure(id: FigureId, points: &[DephasingStrength]) -> Result<Table> {
    let cols = |names: &[&str]| names.iter().map(|s| s.to_string()).collect::<Vec<_>>();
    match id {
        FigureId::Fig1 => {
            let columns = (2..=7)
                .flat_map(|q| [format!("sim_q{q}"), format!("formula_q{q}")])
                .collect();
            tabulate(columns, points, |p| {
                let mut r = Vec::with_capacity(12);
                for q in 2..=7 {
                    r.push(primitive_chain(q, p)?.fidelity());
                    r.push(chain_fidelity(q, p)?);
                }
                Ok(r)
            })
        }
        FigureId::Fig2 => {
            let columns = cols(&[
                "sim_q2_pt2",
                "formula_q2_pt2",
                "sim_q3_pt1",
                "formula_q3_pt1",
                "sim_q3_pt2",
                "formula_q3_pt2",
                "sim_q4_pt1",
                "sim_q4_pt2",
                "sim_q4_pt12",
                "sim_q5_pt1",
            ]);
            tabulate(columns, points, |p| {
                let (c2, c3, c4, c5) = (
                    primitive_chain(2, p)?,
                    primitive_chain(3, p)?,
                    primitive_chain(4, p)?,
                    primitive_chain(5, p)?,
                );
                let (r2, r3) = (rho2_metrics(p), rho3_metrics(p));
                Ok(vec![
                    negativity(c2.state(), &[2])?,
                    r2.negativity,
                    negativity(c3.state(), &[1])?,
                    r3.negativity_edge,
                    negativity(c3.state(), &[2])?,
                    r3.negativity_middle,
                    negativity(c4.state(), &[1])?,
                    negativity(c4.state(), &[2])?,
                    negativity(c4.state(), &[1, 2])?,
                    negativity(c5.state(), &[1])?,
                ])
            })
        }
        FigureId::Fig3Left | FigureId::Fig3Right => {
            let binding = if id == FigureId::Fig3Left {
                Binding::Equal
            } else {
                Binding::FreshPrimitives
            };
            let columns = cols(&["sim_method1", "formula_method1", "sim_method2", "formula_method2"]);
            tabulate(columns, points, |p| {
                let st = binding.strengths(p);
                let [a, b] = scenario_pair(ScenarioKind::Method1AllSuccess, st.clone())?;
                let [c, d] = scenario_pair(ScenarioKind::Method2AllSuccess, st)?;
                Ok(vec![a, b, c, d])
            })
        }
        FigureId::Fig4Left | FigureId::Fig4Right => {
            let kinds: &[ScenarioKind] = if id == FigureId::Fig4Left {
                &[
                    ScenarioKind::Method1AllSuccess,
                    ScenarioKind::Method1Wait,
                    ScenarioKind::Method1FailFresh,
                    ScenarioKind::Method1FailFail,
                ]
            } else {
                &[
                    ScenarioKind::Method2AllSuccess,
                    ScenarioKind::Method2Fail3,
                    ScenarioKind::Method2Fail4,
                ]
            };
            let columns = kinds
                .iter()
                .flat_map(|k| [format!("sim_{k}"), format!("formula_{k}")])
                .collect();
            tabulate(columns, points, |p| {
                let st = Strengths::fresh_primitives(p);
                let mut r = Vec::with_capacity(2 * kinds.len());
                for &k in kinds {
                    r.extend(scenario_pair(k, st.clone())?);
                }
                Ok(r)
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for id in FigureId::ALL {
            assert_eq!(id.name().parse::<FigureId>().unwrap(), id);
        }
        assert!("fig5".parse::<FigureId>().is_err());
    }

    #[test]
    fn grid_endpoints() {
        let g = grid(0.0, 1.0, 11).unwrap();
        assert_eq!(g.len(), 11);
        assert_eq!(g[10].value(), 1.0);
        assert!((g[3].value() - 0.3).abs() < 1e-15);
        assert!(grid(0.5, 0.2, 3).is_err());
        assert!(grid(0.0, 1.0, 0).is_err());
        assert!(grid(0.0, 1.5, 2).is_err());
    }

    #[test]
    fn simulated_and_formula_columns_agree() {
        let pts = grid(0.0, 1.0, 6).unwrap();
        for id in FigureId::ALL {
            let t = figure(id, &pts).unwrap();
            assert_eq!(t.rows.len(), 6);
            for (k, name) in t.columns.iter().enumerate() {
                let Some(rest) = name.strip_prefix("sim_") else {
                    continue;
                };
                let Some(f) = t.columns.iter().position(|c| c == &format!("formula_{rest}")) else {
                    continue;
                };
                for row in &t.rows {
                    // the analytic negativity tracks one eigenvalue; past its
                    // zero crossing another one is the minimum
                    if name.contains("_pt") && row[f] >= 0.0 {
                        assert!(row[k] <= row[f] + 1e-9, "{id} {name} p={}", row[0]);
                    } else {
                        assert!((row[k] - row[f]).abs() < 1e-9, "{id} {name} p={}", row[0]);
                    }
                }
            }
        }
    }

    #[test]
    fn fig4_left_is_one_at_zero() {
        let t = figure(FigureId::Fig4Left, &grid(0.0, 0.0, 1).unwrap()).unwrap();
        assert!(t.rows[0][1..].iter().all(|v| (v - 1.0).abs() < 1e-10));
    }
}
