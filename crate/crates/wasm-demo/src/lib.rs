//! Browser bindings for the MPF playground. Each exported function wraps a
//! library routine and returns its result as a JSON string for the page
//! script to render; inputs small enough to stay interactive in debug-speed
//! wasm are enforced here.

use wasm_bindgen::prelude::*;

use mpf_core::experiments::{ising_magnetization_demo, IsingDemoParams, S1_THRESHOLD};
use mpf_core::mpf::{solve_weights, ExponentSequence, WeightReport};
use mpf_core::noise::zne_round_trip;
use mpf_core::propagators::ProductFormula;
use mpf_core::{Error, Result};

fn parse_k_list(raw: &str) -> Result<Vec<u64>> {
    raw.split(',')
        .map(|s| {
            s.trim()
                .parse::<u64>()
                .map_err(|_| Error::InvalidInput(format!("invalid Trotter exponent '{s}'")))
        })
        .collect()
}

fn to_json(value: &serde_json::Value) -> Result<String> {
    serde_json::to_string(value).map_err(|e| Error::Internal(format!("serialization: {e}")))
}

fn js_err(err: Error) -> JsValue {
    JsValue::from_str(&err.to_string())
}

/// Solve extrapolation weights for a comma-separated exponent list.
///
/// Returns `{k, base, weights_exact, weights, norm1_exact, norm1,
/// well_conditioned, threshold}`.
pub fn weights_report(k_csv: &str, base: &str) -> Result<String> {
    let k = parse_k_list(k_csv)?;
    let base: ProductFormula = base.parse()?;
    let seq = ExponentSequence::new(k, base)?;
    let w = solve_weights(&seq)?;
    let report = WeightReport::new(&seq, &w);
    let threshold = if base.is_symmetric() {
        mpf_core::experiments::S2_THRESHOLD
    } else {
        S1_THRESHOLD
    };
    let mut doc = serde_json::to_value(&report)
        .map_err(|e| Error::Internal(format!("serialization: {e}")))?;
    let obj = doc.as_object_mut().expect("report is an object");
    obj.insert("threshold".into(), threshold.into());
    obj.insert(
        "well_conditioned".into(),
        (report.norm1 <= threshold).into(),
    );
    to_json(&doc)
}

#[wasm_bindgen]
pub fn weights_json(k_csv: &str, base: &str) -> std::result::Result<String, JsValue> {
    weights_report(k_csv, base).map_err(js_err)
}

/// Run the Ising magnetization pipeline at interactive scale.
pub fn ising_report(
    n_spins: usize,
    coupling: f64,
    field: f64,
    time: f64,
    eps_prime: f64,
    k_max: u64,
    sequences_csv: &str,
) -> Result<String> {
    if n_spins > 8 {
        return Err(Error::Capacity(
            "the browser demo caps the chain at 8 spins".into(),
        ));
    }
    if k_max > 30 {
        return Err(Error::Capacity("the browser demo caps k_max at 30".into()));
    }
    let sequences = if sequences_csv.trim().is_empty() {
        IsingDemoParams::default().sequences
    } else {
        sequences_csv
            .split(';')
            .filter(|s| !s.trim().is_empty())
            .map(parse_k_list)
            .collect::<Result<_>>()?
    };
    let demo = ising_magnetization_demo(&IsingDemoParams {
        n_spins,
        coupling,
        field,
        time,
        k_max,
        eps_prime,
        sequences,
        ..IsingDemoParams::default()
    })?;
    let doc =
        serde_json::to_value(&demo).map_err(|e| Error::Internal(format!("serialization: {e}")))?;
    to_json(&doc)
}

#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn ising_json(
    n_spins: u32,
    coupling: f64,
    field: f64,
    time: f64,
    eps_prime: f64,
    k_max: u32,
    sequences_csv: &str,
) -> std::result::Result<String, JsValue> {
    ising_report(
        n_spins as usize,
        coupling,
        field,
        time,
        eps_prime,
        k_max as u64,
        sequences_csv,
    )
    .map_err(js_err)
}

/// Synthetic ZNE round trip: sample a noisy decay curve and fit it.
pub fn zne_report(e_ideal: f64, b: f64, d: f64, shots_per_point: u32, seed: u32) -> Result<String> {
    let fit = zne_round_trip(
        e_ideal,
        b,
        d,
        shots_per_point as u64,
        mpf_core::noise::DEFAULT_STRETCH_POINTS,
        mpf_core::noise::DEFAULT_STRETCH_MIN,
        mpf_core::noise::DEFAULT_STRETCH_MAX,
        seed as u64,
    )?;
    let mut doc =
        serde_json::to_value(&fit).map_err(|e| Error::Internal(format!("serialization: {e}")))?;
    doc.as_object_mut()
        .expect("fit is an object")
        .insert("e_ideal".into(), e_ideal.into());
    to_json(&doc)
}

#[wasm_bindgen]
pub fn zne_json(
    e_ideal: f64,
    b: f64,
    d: f64,
    shots_per_point: u32,
    seed: u32,
) -> std::result::Result<String, JsValue> {
    zne_report(e_ideal, b, d, shots_per_point, seed).map_err(js_err)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    #[test]
    fn weights_payload_shape() {
        let json: Value = serde_json::from_str(&weights_report("1,2,7", "s1").unwrap()).unwrap();
        assert_eq!(json["weights_exact"][2], "49/30");
        assert_eq!(json["well_conditioned"], true);
        let json: Value = serde_json::from_str(&weights_report("6,7", "s1").unwrap()).unwrap();
        assert_eq!(json["well_conditioned"], false);
    }

    #[test]
    fn weights_rejects_bad_input() {
        assert!(weights_report("2,2", "s1").is_err());
        assert!(weights_report("1,2", "s3").is_err());
        assert!(weights_report("", "s1").is_err());
    }

    #[test]
    fn ising_payload_shape() {
        let json: Value =
            serde_json::from_str(&ising_report(3, 0.5, 1.0, 0.5, 1e-3, 5, "1,2").unwrap()).unwrap();
        assert_eq!(json["pf"].as_array().unwrap().len(), 5);
        assert_eq!(json["mpf"].as_array().unwrap().len(), 2);
        assert!(json["exact"].as_f64().is_some());
    }

    #[test]
    fn ising_caps_enforced() {
        assert!(ising_report(9, 0.5, 1.0, 0.5, 0.0, 5, "").is_err());
        assert!(ising_report(3, 0.5, 1.0, 0.5, 0.0, 31, "").is_err());
    }

    #[test]
    fn zne_payload_shape() {
        let json: Value =
            serde_json::from_str(&zne_report(0.54, 0.5, 0.0, 100_000, 7).unwrap()).unwrap();
        assert_eq!(json["points"].as_array().unwrap().len(), 20);
        let extrapolated = json["extrapolated"].as_f64().unwrap();
        assert!((extrapolated - 0.54).abs() < 0.05);
    }
}
