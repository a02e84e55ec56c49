//! `born-lab check`: one-shot verification reports printed as JSON.

use anyhow::{anyhow, Result};
use serde_json::json;

use born_lab_core::{
    frequency_expectation_all, schmidt_state, verify_envariance, wallace_chain, Amplitude,
    BranchLabel, BranchState, Error, ExpectationMethod, Symbol, SystemSpec, Weight,
};

fn parse_weights(text: &str) -> Result<Vec<Weight>> {
    text.split(',')
        .map(|w| Weight::parse(w).map_err(anyhow::Error::from))
        .collect()
}

fn spec_from_flags(weights: &str, outcomes: Option<&str>) -> Result<SystemSpec> {
    let weights = parse_weights(weights)?;
    let outcomes: Vec<Symbol> = match outcomes {
        Some(names) => names.split(',').map(|s| Symbol::new(s.trim())).collect(),
        None if weights.len() == 2 => vec![Symbol::new("↑"), Symbol::new("↓")],
        None => (1..=weights.len())
            .map(|i| Symbol::new(format!("o{i}")))
            .collect(),
    };
    if outcomes.len() != weights.len() {
        return Err(anyhow!("outcomes and weights differ in length"));
    }
    Ok(SystemSpec::new(outcomes.into_iter().zip(weights).collect())?)
}

/// `check envariance --T k`: swap/counterswap fidelity on the Schmidt state.
pub fn check_envariance(levels: usize) -> Result<(serde_json::Value, bool)> {
    let state = schmidt_state(levels)?;
    let alphabet = state.system_alphabet();
    let mut pairs = Vec::new();
    let mut all_envariant = true;
    for i in 0..alphabet.len() {
        for j in (i + 1)..alphabet.len() {
            let report = verify_envariance(&state, &alphabet[i], &alphabet[j])?;
            all_envariant &= report.envariant;
            pairs.push(json!({
                "alpha": alphabet[i].to_string(),
                "beta": alphabet[j].to_string(),
                "fidelity": report.fidelity.to_string(),
                "fidelity_f64": report.fidelity.to_f64(),
                "envariant": report.envariant,
            }));
        }
    }
    let value = json!({
        "check": "envariance",
        "levels": levels,
        "state": state.to_string(),
        "pairs": pairs,
        "all_envariant": all_envariant,
    });
    Ok((value, all_envariant))
}

/// `check frequency --weights … --N n`: enumerated ⟨Q̂_α⟩ against weights.
pub fn check_frequency(weights: &str, n: u32, outcomes: Option<&str>) -> Result<(serde_json::Value, bool)> {
    let spec = spec_from_flags(weights, outcomes)?;
    let (expectations, method) =
        match frequency_expectation_all(&spec, n, ExpectationMethod::default()) {
            Ok(e) => (e, "enumeration"),
            Err(Error::EnumerationCap { .. }) => (
                frequency_expectation_all(&spec, n, ExpectationMethod::ClosedForm)?,
                "closed-form",
            ),
            Err(e) => return Err(e.into()),
        };
    let mut rows = Vec::new();
    let mut pass = true;
    for (a, e) in expectations.iter().enumerate() {
        let w = spec.weight(a);
        let error = (e.to_f64() - w.to_f64()).abs();
        let ok = if spec.is_exact() { e == w } else { error < 1e-12 };
        pass &= ok;
        rows.push(json!({
            "outcome": spec.outcomes()[a].to_string(),
            "weight": w.to_string(),
            "expectation": e.to_string(),
            "error": error,
            "matches": ok,
        }));
    }
    let value = json!({
        "check": "frequency",
        "n": n,
        "method": method,
        "expectations": rows,
        "all_match": pass,
    });
    Ok((value, pass))
}

/// `check wallace --weights p,q`: the counterswap/erasure chain verdict.
pub fn check_wallace(weights: &str, outcomes: Option<&str>) -> Result<(serde_json::Value, bool)> {
    let spec = spec_from_flags(weights, outcomes)?;
    if spec.len() != 2 {
        return Err(anyhow!("wallace check needs exactly two outcomes"));
    }
    let alpha = &spec.outcomes()[0];
    let beta = &spec.outcomes()[1];
    let state = BranchState::from_branches([
        (
            BranchLabel::new()
                .with_system(alpha.clone())
                .with_env(format!("Alex_{alpha}").as_str()),
            Amplitude::sqrt_weight(spec.weight(0)),
        ),
        (
            BranchLabel::new()
                .with_system(beta.clone())
                .with_env(format!("Alex_{beta}").as_str()),
            Amplitude::sqrt_weight(spec.weight(1)),
        ),
    ])?;
    let report = wallace_chain(&state, alpha, beta)?;
    let pass = report.labels_match && (report.branch_indifference == report.weights_equal);
    let value = json!({
        "check": "wallace",
        "original": state.to_string(),
        "erased": report.erased.to_string(),
        "erased_counterswapped": report.erased_counterswapped.to_string(),
        "labels_match": report.labels_match,
        "branch_indifference": report.branch_indifference,
        "measure_alpha": report.measure_alpha.to_string(),
        "measure_beta": report.measure_beta.to_string(),
        "weights_equal": report.weights_equal,
        "equality_verdict": if report.weights_equal {
            "P(α,Alex_α) = P(β,Alex_β)"
        } else {
            "indifference premise not met: unequal branch weights"
        },
    });
    Ok((value, pass))
}
