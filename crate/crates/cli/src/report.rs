//! JSON summary structures. Field declaration order is the serialized key
//! order, which downstream diffing relies on.

use serde::Serialize;

#[derive(Serialize)]
pub struct Summary {
    pub name: String,
    pub model: String,
    pub mode: String,
    pub seed: u64,
    pub parameters: Parameters,
    pub results: serde_json::Value,
    pub verdict: &'static str,
    /// Excluded from reproducibility comparisons.
    pub timestamp_unix: u64,
}

#[derive(Serialize)]
pub struct Parameters {
    pub outcomes: Vec<String>,
    pub weights: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub minds: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub repetitions: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub levels: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
}

#[derive(Serialize)]
pub struct OutcomeStats {
    pub outcome: String,
    pub theoretical: String,
    pub theoretical_f64: f64,
    pub empirical: f64,
    pub band_3_sigma: f64,
    pub within_band: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub predicted_fluctuation: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub observed_fluctuation: Option<f64>,
}

pub fn timestamp_unix() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

pub fn verdict(pass: bool) -> &'static str {
    if pass {
        "pass"
    } else {
        "fail"
    }
}
