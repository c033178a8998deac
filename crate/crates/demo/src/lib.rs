//! Browser bindings: maximal disks, 2×2 logarithms and blow-up radii.

use magnus::bounds::{self, IvpSystem};
use magnus::gl2::{self, Mat2};
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Boundary of `exp D̄(0, p)` and the maximal disk touching it at angle `t`, as JSON.
pub fn maximal_disk_json(p: f64, t: f64, samples: usize) -> Result<String, String> {
    if !(p > 0.0 && p < std::f64::consts::PI) {
        return Err(format!("p must lie in (0, π), got {p}"));
    }
    let n = samples.clamp(16, 4096);
    let curve: Vec<[f64; 2]> = (0..=n)
        .map(|i| {
            let th = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
            let r = (p * th.cos()).exp();
            let a = p * th.sin();
            [r * a.cos(), r * a.sin()]
        })
        .collect();
    let d = gl2::maximal_disk(p, t);
    Ok(json!({
        "curve": curve,
        "disk": d,
        "tangency": gl2::maximal_disk_tangency(p, t),
    })
    .to_string())
}

/// Logarithm, norms, disks, class and Magnus exponent of `[[a, b], [c, d]]`, as JSON.
pub fn matrix_json(a: f64, b: f64, c: f64, d: f64) -> Result<String, String> {
    let m = Mat2::new(a, b, c, d);
    if !m.is_finite() {
        return Err("matrix entries must be finite".into());
    }
    let log = gl2::log2x2(&m).map_err(|e| e.to_string());
    let mp = gl2::magnus_exponent(&m).map_err(|e| e.to_string());
    let class = gl2::classify(&m).map(|c| c.to_string()).map_err(|e| e.to_string());
    Ok(json!({
        "norm": gl2::norm2(&m),
        "conorm": gl2::conorm_signed(&m),
        "chiral_disk": gl2::chiral_disk(&m),
        "log": log.as_ref().map(|l| [[l.a, l.b], [l.c, l.d]]).ok(),
        "log_norm": log.as_ref().map(gl2::norm2).ok(),
        "log_error": log.err(),
        "mp": mp.as_ref().ok(),
        "class": class.as_ref().ok(),
        "mp_error": mp.err(),
    })
    .to_string())
}

/// Blow-up radius of a named majorizing system, as JSON.
pub fn blowup_json(name: &str) -> Result<String, String> {
    let sys = IvpSystem::builtin(name).ok_or_else(|| format!("unknown system {name:?}"))?;
    let r = bounds::blowup_radius(&sys).map_err(|e| e.to_string())?;
    Ok(json!({"name": name, "radius": r.radius, "est_error": r.est_error}).to_string())
}

#[wasm_bindgen]
pub fn maximal_disk(p: f64, t: f64, samples: usize) -> Result<String, JsValue> {
    maximal_disk_json(p, t, samples).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn matrix_report(a: f64, b: f64, c: f64, d: f64) -> Result<String, JsValue> {
    matrix_json(a, b, c, d).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn blowup(name: &str) -> Result<String, JsValue> {
    blowup_json(name).map_err(|e| JsValue::from_str(&e))
}
