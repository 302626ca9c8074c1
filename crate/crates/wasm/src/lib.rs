//! wasm-bindgen entry points for the browser demo. Each returns a JSON
//! string; errors become thrown JS strings.

pub mod demo;

use serde::Serialize;
use wasm_bindgen::prelude::*;

use demo::Problem;

fn to_json<T: Serialize>(value: demo::DemoResult<T>) -> Result<String, JsError> {
    let value = value.map_err(|e| JsError::new(&e))?;
    serde_json::to_string(&value).map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn kernel_curves(
    m: u32,
    potential: &str,
    gamma: f64,
    half_width: f64,
    nodes: usize,
    x: f64,
    t_min: f64,
    t_max: f64,
    count: usize,
) -> Result<String, JsError> {
    to_json(Problem::new(m, potential, gamma, half_width, nodes).and_then(|p| demo::kernel_curves(&p, x, t_min, t_max, count)))
}

#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn bump_profile(
    m: u32,
    potential: &str,
    gamma: f64,
    half_width: f64,
    nodes: usize,
    x: f64,
    beta: f64,
    t_min: f64,
    t_max: f64,
    count: usize,
) -> Result<String, JsError> {
    to_json(
        Problem::new(m, potential, gamma, half_width, nodes)
            .and_then(|p| demo::bump_profile(&p, x, beta, t_min, t_max, count)),
    )
}

#[wasm_bindgen]
pub fn lemma_curves(alpha: f64, lambda: f64, count: usize) -> Result<String, JsError> {
    to_json(demo::lemma_curves(alpha, lambda, count))
}
