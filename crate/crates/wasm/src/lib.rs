//! WebAssembly bindings behind the static demo page in `www/`.
//!
//! Each exported function returns a JSON string. The plain Rust functions in
//! [`api`] do the work and are what the native tests call.

use wasm_bindgen::prelude::*;

pub mod api {
    use clusterfuse::closed_forms::{ConstructionMethod, Transcription};
    use clusterfuse::error::{Error, Result};
    use clusterfuse::figures::{figure, grid, FigureId, Table};
    use clusterfuse::montecarlo::{monte_carlo, McPolicy, McReport};
    use clusterfuse::noise::DephasingStrength;
    use clusterfuse::strategies::{run_scenario, Interval, Scenario, ScenarioKind, Strengths};
    use serde::Serialize;

    /// Largest grid the page may request.
    pub const MAX_STEPS: usize = 201;
    pub const MAX_SAMPLES: u64 = 200_000;

    pub fn figure_table(id: &str, steps: usize) -> Result<Table> {
        if !(2..=MAX_STEPS).contains(&steps) {
            return Err(Error::InvalidArgument(format!("steps must be in 2..={MAX_STEPS}")));
        }
        let id: FigureId = id.parse()?;
        figure(id, &grid(0.0, 1.0, steps)?)
    }

    #[derive(Clone, Debug, PartialEq, Serialize)]
    pub struct ScenarioResult {
        pub scenario: String,
        pub fidelity_sim: f64,
        pub fidelity_formula: Option<f64>,
        pub branch_probability: f64,
        pub fusion_attempts: usize,
        pub primitives_used: usize,
    }

    /// Strengths are given in `Interval::ALL` order; `None` leaves one unset.
    pub fn scenario(name: &str, strengths: [Option<f64>; 6]) -> Result<ScenarioResult> {
        let kind: ScenarioKind = name.parse()?;
        let mut st = Strengths::new();
        for (interval, p) in Interval::ALL.into_iter().zip(strengths) {
            if let Some(p) = p {
                st.set(interval, DephasingStrength::new(p)?);
            }
        }
        let s = Scenario::new(kind, st)?;
        let run = run_scenario(&s)?;
        Ok(ScenarioResult {
            scenario: kind.name().to_owned(),
            fidelity_sim: run.fidelity,
            fidelity_formula: s.closed_form(Transcription::Corrected),
            branch_probability: run.branch_probability,
            fusion_attempts: run.fusion_attempts,
            primitives_used: run.primitives_used,
        })
    }

    pub fn sample(method: u8, recycle: bool, samples: u64, seed: u64, storage: f64) -> Result<McReport> {
        let method = match method {
            1 => ConstructionMethod::ThreeThree,
            2 => ConstructionMethod::FourTwo,
            _ => return Err(Error::InvalidArgument(format!("method must be 1 or 2, got {method}"))),
        };
        if samples > MAX_SAMPLES {
            return Err(Error::InvalidArgument(format!("at most {MAX_SAMPLES} samples")));
        }
        let mut policy = McPolicy::new(method, recycle);
        policy.storage_strengths = vec![DephasingStrength::new(storage)?];
        monte_carlo(&policy, samples, seed)
    }
}

fn to_json<T: serde::Serialize>(r: clusterfuse::error::Result<T>) -> Result<String, JsError> {
    let value = r.map_err(|e| JsError::new(&e.to_string()))?;
    serde_json::to_string(&value).map_err(|e| JsError::new(&e.to_string()))
}

/// `{"columns": [...], "rows": [[...], ...]}` for a named figure on `steps`
/// points spanning [0, 1].
#[wasm_bindgen(js_name = figureTable)]
pub fn figure_table(id: &str, steps: usize) -> Result<String, JsError> {
    to_json(api::figure_table(id, steps))
}

#[wasm_bindgen(js_name = runScenario)]
#[allow(clippy::too_many_arguments)]
pub fn run_scenario(
    name: &str,
    p1: Option<f64>,
    p2: Option<f64>,
    p3: Option<f64>,
    p4: Option<f64>,
    p5: Option<f64>,
    p_wait: Option<f64>,
) -> Result<String, JsError> {
    to_json(api::scenario(name, [p1, p2, p3, p4, p5, p_wait]))
}

#[wasm_bindgen(js_name = monteCarlo)]
pub fn monte_carlo(method: u8, recycle: bool, samples: u32, seed: u32, storage: f64) -> Result<String, JsError> {
    to_json(api::sample(
        method,
        recycle,
        u64::from(samples),
        u64::from(seed),
        storage,
    ))
}
