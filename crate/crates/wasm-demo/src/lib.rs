//! Thin wasm bindings for the browser demo. Every entry point takes plain
//! numbers and returns a JSON string; the page does the plotting.

use wasm_bindgen::prelude::*;

use watalign::config::{RunConfig, Species};
use watalign::dynamics::{PulseSequence, TimeGrid};
use watalign::interaction::{kick_strengths, PulseSpec};
use watalign::rotor::build_eigentable;
use watalign::scenario;

fn err_to_js(err: watalign::Error) -> JsValue {
    JsValue::from_str(&err.to_string())
}

/// Thermal-ensemble alignment traces for both isomers. `delay_ps <= 0`
/// means a single pulse; otherwise a second identical pulse follows the
/// first after the delay.
#[wasm_bindgen]
pub fn alignment_trace(
    intensity_w_cm2: f64,
    sigma_fs: f64,
    temperature_k: f64,
    jmax: i32,
    t_end_ps: f64,
    dt_ps: f64,
    delay_ps: f64,
) -> Result<String, JsValue> {
    let mut pulses = vec![PulseSpec {
        peak_intensity_w_cm2: intensity_w_cm2,
        sigma_fs,
        t0_ps: 0.0,
    }];
    if delay_ps > 0.0 {
        let mut second = pulses[0];
        second.t0_ps = delay_ps;
        pulses.push(second);
    }
    let mut config = RunConfig::default();
    config.thermal.temperature_k = temperature_k;
    config.thermal.j_max = jmax;
    config.pulses = PulseSequence::new(pulses).map_err(err_to_js)?;
    config.grid = TimeGrid {
        t_start_ps: 0.0,
        t_end_ps,
        dt_ps,
    };
    config.species = Species::Both;
    let (trace, summary) = scenario::simulate(&config).map_err(err_to_js)?;
    let body = serde_json::json!({
        "times_ps": trace.times_ps,
        "para": trace.para.as_ref().map(|t| &t.cos2),
        "ortho": trace.ortho.as_ref().map(|t| &t.cos2),
        "e_para_cm1": trace.para.as_ref().map(|t| &t.energy_cm1),
        "e_ortho_cm1": trace.ortho.as_ref().map(|t| &t.energy_cm1),
        "summary": summary,
    });
    Ok(body.to_string())
}

/// Dimensionless kick strengths β₁, β₂ for a Gaussian pulse.
#[wasm_bindgen]
pub fn pulse_kick_strengths(intensity_w_cm2: f64, sigma_fs: f64) -> Result<String, JsValue> {
    let pulse = PulseSpec {
        peak_intensity_w_cm2: intensity_w_cm2,
        sigma_fs,
        t0_ps: 0.0,
    };
    let molecule = watalign::MolecularSpec::water();
    pulse.validate().map_err(err_to_js)?;
    let betas = kick_strengths(&pulse, &molecule);
    Ok(serde_json::json!({ "beta1": betas.beta1, "beta2": betas.beta2 }).to_string())
}

/// Classified rotational levels up to `jmax` as a JSON array.
#[wasm_bindgen]
pub fn level_table(jmax: i32) -> Result<String, JsValue> {
    let table =
        build_eigentable(&watalign::MolecularSpec::water(), jmax).map_err(err_to_js)?;
    let rows: Vec<_> = table
        .levels()
        .iter()
        .map(|l| {
            serde_json::json!({
                "j": l.j,
                "tau": l.tau,
                "energy_cm1": l.energy_cm1,
                "symmetry": l.symmetry.to_string(),
                "isomer": l.isomer.to_string(),
            })
        })
        .collect();
    Ok(serde_json::Value::Array(rows).to_string())
}
