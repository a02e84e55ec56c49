//! `born-lab run`: executes one scenario file and writes its artifacts.

use std::path::Path;

use anyhow::{anyhow, Result};
use serde::Serialize;
use serde_json::json;

use born_lab_core::{
    approximate_weights, coarse_probability, equiprobability_from_symmetry,
    exact_tally_distribution, fine_grain, frequency_expectation_all, maverick_measure,
    relative_fluctuation, run_experiment, sample_minds_batch, tally_pmf, typicality_error,
    verify_envariance, wallace_chain, Amplitude, BranchLabel, BranchState, Error,
    ExpectationMethod, ExperimentScenario, MindTally, RunMode, SeededRng, SystemSpec,
    Weight,
};

use crate::output::{empty_csv, tallies_csv, write_atomic};
use crate::report::{timestamp_unix, verdict, OutcomeStats, Parameters, Summary};
use crate::scenario::{Mode, Model, Scenario};

/// Runs the scenario and writes the CSV/JSON artifacts under `out_dir`.
/// Returns whether the statistical verdict passed.
pub fn run_scenario(scenario: &Scenario, out_dir: &Path) -> Result<bool> {
    let spec = scenario.spec()?;
    let (results, pass, tallies) = match scenario.model {
        Model::EverettFrequency => everett_frequency(scenario, &spec)?,
        Model::MmiStochastic => mmi_stochastic(scenario, &spec)?,
        Model::MmiUnitary => mmi_unitary(scenario, &spec)?,
        Model::EnvarianceCheck => envariance_check(&spec)?,
        Model::WallaceChain => wallace_chain_model(&spec)?,
    };

    let csv_bytes = match &tallies {
        Some(list) => tallies_csv(spec.outcomes(), list)?,
        None => empty_csv()?,
    };
    let summary = Summary {
        name: scenario.name.clone(),
        model: scenario.model.name().to_string(),
        mode: scenario.mode.name().to_string(),
        seed: scenario.seed,
        parameters: Parameters {
            outcomes: spec.outcomes().iter().map(|s| s.to_string()).collect(),
            weights: spec.weights().iter().map(|w| w.to_string()).collect(),
            minds: scenario.minds,
            repetitions: scenario.repetitions,
            levels: scenario.levels,
            epsilon: scenario.epsilon,
        },
        results,
        verdict: verdict(pass),
        timestamp_unix: timestamp_unix(),
    };
    let mut json_bytes = serde_json::to_vec_pretty(&summary)?;
    json_bytes.push(b'\n');

    std::fs::create_dir_all(out_dir)?;
    write_atomic(&out_dir.join(&scenario.csv_path), &csv_bytes)?;
    write_atomic(&out_dir.join(&scenario.json_path), &json_bytes)?;
    Ok(pass)
}

fn band_3_sigma(weight: f64, minds: u64) -> f64 {
    3.0 * (weight * (1.0 - weight) / minds as f64).sqrt()
}

/// Per-outcome statistics of a batch of tallies against the system weights.
fn outcome_stats(
    spec: &SystemSpec,
    minds: u64,
    tallies: &[MindTally],
    predicted_fluctuations: &[Option<f64>],
) -> (Vec<OutcomeStats>, bool) {
    let reps = tallies.len() as f64;
    let mut rows = Vec::with_capacity(spec.len());
    let mut all_within = true;
    for (a, outcome) in spec.outcomes().iter().enumerate() {
        let w = spec.weight(a).to_f64();
        let mean_count: f64 = tallies.iter().map(|t| t.count(a) as f64).sum::<f64>() / reps;
        let empirical = mean_count / minds as f64;
        let band = band_3_sigma(w, minds);
        let within = (empirical - w).abs() <= band;
        all_within &= within;
        let observed_fluctuation = if tallies.len() >= 2 && mean_count > 0.0 {
            let var: f64 = tallies
                .iter()
                .map(|t| (t.count(a) as f64 - mean_count).powi(2))
                .sum::<f64>()
                / (reps - 1.0);
            Some(var.sqrt() / mean_count)
        } else {
            None
        };
        rows.push(OutcomeStats {
            outcome: outcome.to_string(),
            theoretical: spec.weight(a).to_string(),
            theoretical_f64: w,
            empirical,
            band_3_sigma: band,
            within_band: within,
            predicted_fluctuation: predicted_fluctuations[a],
            observed_fluctuation,
        });
    }
    (rows, all_within)
}

fn hulk_census(spec: &SystemSpec, tallies: &[MindTally]) -> u64 {
    let positive: Vec<usize> = (0..spec.len())
        .filter(|&a| !spec.weight(a).is_zero())
        .collect();
    tallies
        .iter()
        .filter(|t| positive.iter().any(|&a| t.count(a) == 0))
        .count() as u64
}

type ModelOutput = (serde_json::Value, bool, Option<Vec<MindTally>>);

#[derive(Serialize)]
struct ExpectationRow {
    outcome: String,
    weight: String,
    expectation: String,
    error: f64,
    exact_match: bool,
}

fn everett_frequency(scenario: &Scenario, spec: &SystemSpec) -> Result<ModelOutput> {
    let n = scenario.minds()?;
    match scenario.mode {
        Mode::Exact => {
            let n32 = u32::try_from(n).map_err(|_| anyhow!("minds too large for enumeration"))?;
            let (expectations, method) =
                match frequency_expectation_all(spec, n32, ExpectationMethod::default()) {
                    Ok(e) => (e, "enumeration"),
                    Err(Error::EnumerationCap { .. }) => (
                        frequency_expectation_all(spec, n32, ExpectationMethod::ClosedForm)?,
                        "closed-form",
                    ),
                    Err(e) => return Err(e.into()),
                };
            let mut rows = Vec::new();
            let mut pass = true;
            for (a, e) in expectations.iter().enumerate() {
                let w = spec.weight(a);
                let error = (e.to_f64() - w.to_f64()).abs();
                let exact_match = e == w;
                pass &= if spec.is_exact() { exact_match } else { error < 1e-12 };
                rows.push(ExpectationRow {
                    outcome: spec.outcomes()[a].to_string(),
                    weight: w.to_string(),
                    expectation: e.to_string(),
                    error,
                    exact_match,
                });
            }
            let mavericks = maverick_table(scenario, spec, n)?;
            let typicality = typicality_table(spec, n);
            Ok((
                json!({
                    "method": method,
                    "frequency_expectations": rows,
                    "maverick_measures": mavericks,
                    "typicality_errors": typicality,
                }),
                pass,
                None,
            ))
        }
        Mode::MonteCarlo => {
            let histories = scenario.repetitions()?;
            let tallies = sample_minds_batch(spec, n, histories, &SeededRng::new(scenario.seed), 0);
            let predicted: Vec<Option<f64>> = (0..spec.len())
                .map(|a| typicality_error(spec, n, &spec.outcomes()[a]).ok())
                .collect();
            let (rows, pass) = outcome_stats(spec, n, &tallies, &predicted);
            let mavericks = maverick_table(scenario, spec, n)?;
            Ok((
                json!({
                    "history_statistics": rows,
                    "maverick_measures": mavericks,
                }),
                pass,
                Some(tallies),
            ))
        }
    }
}

fn maverick_table(
    scenario: &Scenario,
    spec: &SystemSpec,
    n: u64,
) -> Result<Vec<serde_json::Value>> {
    let Some(eps) = scenario.epsilon else {
        return Ok(Vec::new());
    };
    let mut rows = Vec::new();
    for outcome in spec.outcomes() {
        let m = maverick_measure(spec, n, outcome, eps)?;
        rows.push(json!({
            "outcome": outcome.to_string(),
            "epsilon": eps,
            "measure": m.to_string(),
            "measure_f64": m.to_f64(),
        }));
    }
    Ok(rows)
}

fn typicality_table(spec: &SystemSpec, n: u64) -> Vec<serde_json::Value> {
    spec.outcomes()
        .iter()
        .filter_map(|o| {
            typicality_error(spec, n, o).ok().map(|e| {
                json!({
                    "outcome": o.to_string(),
                    "relative_error": e,
                })
            })
        })
        .collect()
}

fn mmi_stochastic(scenario: &Scenario, spec: &SystemSpec) -> Result<ModelOutput> {
    let minds = scenario.minds()?;
    match scenario.mode {
        Mode::MonteCarlo => {
            let trials = scenario.repetitions()?;
            let tallies = sample_minds_batch(spec, minds, trials, &SeededRng::new(scenario.seed), 0);
            let predicted: Vec<Option<f64>> = spec
                .outcomes()
                .iter()
                .map(|o| relative_fluctuation(spec, minds, o).ok())
                .collect();
            let (rows, pass) = outcome_stats(spec, minds, &tallies, &predicted);
            let hulks = hulk_census(spec, &tallies);
            Ok((
                json!({
                    "mind_statistics": rows,
                    "hulk_trials": hulks,
                }),
                pass,
                Some(tallies),
            ))
        }
        Mode::Exact => {
            let mode = born_lab_core::mode_tally(spec, minds)?;
            let mode_pmf = tally_pmf(spec, minds, &mode)?;
            let hulks: Vec<serde_json::Value> = spec
                .outcomes()
                .iter()
                .map(|o| {
                    let h = born_lab_core::hulk_probability(spec, minds, o).unwrap();
                    json!({
                        "outcome": o.to_string(),
                        "probability": h.to_string(),
                        "probability_f64": h.to_f64(),
                    })
                })
                .collect();
            let fluctuations: Vec<serde_json::Value> = spec
                .outcomes()
                .iter()
                .filter_map(|o| {
                    relative_fluctuation(spec, minds, o).ok().map(|f| {
                        json!({ "outcome": o.to_string(), "relative_fluctuation": f })
                    })
                })
                .collect();
            Ok((
                json!({
                    "mode_tally": mode.counts(),
                    "mode_probability": mode_pmf.to_string(),
                    "hulk_probabilities": hulks,
                    "relative_fluctuations": fluctuations,
                }),
                true,
                None,
            ))
        }
    }
}

fn mmi_unitary(scenario: &Scenario, spec: &SystemSpec) -> Result<ModelOutput> {
    let minds = scenario.minds()?;
    let experiment = ExperimentScenario {
        spec: spec.clone(),
        minds,
        repetitions: scenario.repetitions.unwrap_or(0),
        levels: scenario.levels,
        seed: scenario.seed,
        mode: match scenario.mode {
            Mode::Exact => RunMode::Exact,
            Mode::MonteCarlo => RunMode::MonteCarlo,
        },
    };
    let report = run_experiment(&experiment)?;
    let (rows, pass) = outcome_stats(
        spec,
        minds,
        &report.tallies,
        &report.predicted_fluctuations,
    );
    let mut results = json!({
        "levels": report.levels,
        "mind_statistics": rows,
        "hulk_repetitions": report.hulk_repetitions,
        "hulk_by_outcome": report.hulk_by_outcome,
    });
    if scenario.mode == Mode::Exact {
        let (map, _) = experiment.grain()?;
        let distribution = exact_tally_distribution(
            &map,
            usize::try_from(minds).map_err(|_| anyhow!("minds too large"))?,
        )?;
        let listed: Vec<serde_json::Value> = distribution
            .iter()
            .map(|(tally, w)| {
                json!({
                    "tally": tally.counts(),
                    "weight": w.to_string(),
                    "multinomial_pmf": tally_pmf(spec, minds, tally).unwrap().to_string(),
                })
            })
            .collect();
        results["exact_tally_distribution"] = serde_json::Value::Array(listed);
    }
    let tallies = match scenario.mode {
        Mode::MonteCarlo => Some(report.tallies),
        Mode::Exact => None,
    };
    Ok((results, pass, tallies))
}

fn envariance_check(spec: &SystemSpec) -> Result<ModelOutput> {
    // decimal weights are rationalized first (max error 1e-6)
    let (spec, approximated) = if spec.is_exact() {
        (spec.clone(), false)
    } else {
        let rationals = approximate_weights(&spec.weights_f64(), 10_000, 1e-6)?;
        let pairs = spec.outcomes().iter().cloned().zip(rationals).collect();
        (SystemSpec::from_rationals(pairs)?, true)
    };
    let (map, state) = fine_grain(&spec)?;
    let alphabet = state.system_alphabet();
    let t = alphabet.len();

    // all pairs up to T = 64, the star anchored at the first grain beyond
    let star_only = t > 64;
    let mut pairs = Vec::new();
    let mut all_envariant = true;
    for i in 0..t {
        for j in (i + 1)..t {
            if star_only && i > 0 {
                continue;
            }
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

    let symmetry = equiprobability_from_symmetry(&state)?;
    let mut fine_probs = vec![Weight::zero(); map.levels()];
    for (symbol, p) in symmetry {
        let idx = map
            .fine()
            .iter()
            .position(|f| *f == symbol)
            .ok_or_else(|| anyhow!("fine symbol missing from map"))?;
        fine_probs[idx] = p;
    }
    let coarse = coarse_probability(&map, &fine_probs)?;
    let round_trip_exact = coarse
        .iter()
        .zip(spec.weights())
        .all(|(c, w)| c == w);

    let pass = all_envariant && round_trip_exact;
    Ok((
        json!({
            "levels": map.levels(),
            "group_sizes": map.sizes(),
            "weights_approximated": approximated,
            "pair_strategy": if star_only { "star" } else { "all" },
            "pairs": pairs,
            "coarse_round_trip": coarse.iter().map(|w| w.to_string()).collect::<Vec<_>>(),
            "round_trip_exact": round_trip_exact,
            "state": state.to_string(),
        }),
        pass,
        None,
    ))
}

fn wallace_chain_model(spec: &SystemSpec) -> Result<ModelOutput> {
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
    let consistent = report.branch_indifference == report.weights_equal;
    let pass = report.labels_match && consistent;
    Ok((
        json!({
            "original": state.to_string(),
            "counterswapped": report.counterswapped.to_string(),
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
        }),
        pass,
        None,
    ))
}
