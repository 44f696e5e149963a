//! WebAssembly bindings for the browser demo. Every export returns a JSON
//! string; failures come back as `{"error": "..."}`.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use symplectic_index::czindex::{cz_lagrangian, cz_periodic, Flavor};
use symplectic_index::doubling::{verify_index_theorem, HalfPathData};
use symplectic_index::maslov::{CrossingOptions, CrossingPosition, SymplecticPathSpec};
use symplectic_index::novikov::{self, PushforwardTable};
use symplectic_index::random::{random_half_path, trial_rng, DEFAULT_SEED};
use symplectic_index::HalfInt;

#[derive(Serialize)]
struct Failure {
    error: String,
}

fn to_json<T: Serialize>(result: Result<T, String>) -> String {
    match result {
        Ok(v) => serde_json::to_string(&v),
        Err(error) => serde_json::to_string(&Failure { error }),
    }
    .unwrap_or_else(|e| format!("{{\"error\":\"{e}\"}}"))
}

#[derive(Serialize)]
struct CrossingView {
    time: f64,
    position: &'static str,
    dimension: usize,
    signature: i64,
}

#[derive(Serialize)]
struct ScanView {
    flavor: Flavor,
    index: HalfInt,
    crossings: Vec<CrossingView>,
}

/// Index of the rotation `e^{iθt}` on `ℂⁿ` over `[0, duration]`, with its crossings.
#[wasm_bindgen]
pub fn rotation_index(n: usize, theta: f64, duration: f64, flavor: &str) -> String {
    to_json(rotation_scan(n, theta, duration, flavor))
}

fn rotation_scan(n: usize, theta: f64, duration: f64, flavor: &str) -> Result<ScanView, String> {
    if !(1..=4).contains(&n) {
        return Err("n must be between 1 and 4".into());
    }
    if !(duration.is_finite() && duration > 0.0 && theta.is_finite()) {
        return Err("duration must be positive and theta finite".into());
    }
    let flavor: Flavor = flavor.parse()?;
    let path = SymplecticPathSpec::rotation(n, theta, duration);
    let opts = CrossingOptions::default();
    let report = match flavor {
        Flavor::Lagrangian => cz_lagrangian(&path, &opts),
        Flavor::Periodic => cz_periodic(&path, false, &opts),
    }
    .map_err(|e| e.to_string())?;
    let crossings = report
        .crossings
        .iter()
        .map(|c| CrossingView {
            time: c.time,
            position: match c.position {
                CrossingPosition::Start => "start",
                CrossingPosition::Interior => "interior",
                CrossingPosition::Joint => "joint",
                CrossingPosition::End => "end",
            },
            dimension: c.dimension(),
            signature: c.signature.value(),
        })
        .collect();
    Ok(ScanView { flavor, index: report.value, crossings })
}

/// Doubles a random half-path and checks `μ(F) + μ(F⁻) - μ(loop) = ½ sign Q`.
#[wasm_bindgen]
pub fn doubling_defect(n: usize, trial: u32) -> String {
    to_json(doubling(n, trial))
}

fn doubling(n: usize, trial: u32) -> Result<serde_json::Value, String> {
    if !(1..=3).contains(&n) {
        return Err("n must be between 1 and 3".into());
    }
    let mut rng = trial_rng(DEFAULT_SEED, "web-doubling", trial as u64);
    let half = random_half_path(n, &mut rng);
    let data = HalfPathData::standard(half).map_err(|e| e.to_string())?;
    let report = verify_index_theorem(&data, &CrossingOptions::default()).map_err(|e| e.to_string())?;
    let mut v = serde_json::to_value(report).map_err(|e| e.to_string())?;
    v["pass"] = serde_json::Value::Bool(report.pass());
    Ok(v)
}

#[derive(Serialize)]
struct PushView {
    input: String,
    output: String,
}

/// Parses a Novikov element on `M` and pushes it forward to `X`.
#[wasm_bindgen]
pub fn novikov_pushforward(text: &str) -> String {
    to_json(pushforward(text))
}

fn pushforward(text: &str) -> Result<PushView, String> {
    let e = novikov::parse_element(text.trim()).map_err(|e| e.to_string())?;
    let out = novikov::albers_delta1_pushforward(&e, &PushforwardTable::default()).map_err(|e| e.to_string())?;
    Ok(PushView { input: e.to_string(), output: out.to_string() })
}
