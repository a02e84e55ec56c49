//! The deterministic unitary many-minds model: a molecular-chaos gas of
//! T-level qubits routes each mind slot into exactly one branch of the
//! measurement superposition. Everything downstream of the gas draw is a
//! pure function, so all randomness in this module enters through
//! [`QubitGas::sample`].

use rand::Rng;
use rayon::prelude::*;

use crate::envariance::{fine_grain, fine_grain_with_levels, FineGrainMap};
use crate::error::{Error, Result};
use crate::frequency::SystemSpec;
use crate::label::{BranchLabel, MindSlot, Symbol};
use crate::rng::SeededRng;
use crate::state::BranchState;
use crate::stochastic::MindTally;
use crate::weight::Weight;

use num_bigint::BigInt;
use num_rational::BigRational;

/// Ceiling on `T^N` for exact gas-ensemble enumeration.
pub const DEFAULT_ASSIGNMENT_CAP: u64 = 1 << 20;

/// Qubit symbols driving the minds: `♠/♥` for two levels, tilde-marked
/// fine outcomes otherwise.
pub fn qubit_symbols(fine_alphabet: &[Symbol]) -> Vec<Symbol> {
    if fine_alphabet.len() == 2 {
        vec![Symbol::new("♠"), Symbol::new("♥")]
    } else {
        fine_alphabet
            .iter()
            .map(|s| Symbol::new(format!("~{s}")))
            .collect()
    }
}

fn env_tag(outcome: &Symbol) -> Symbol {
    Symbol::new(format!("E_{outcome}"))
}

/// Sampled molecular-chaos initial conditions: one qubit value per
/// (mind family, repetition), i.i.d. uniform over the T levels.
#[derive(Clone, Debug)]
pub struct QubitGas {
    levels: u16,
    minds: usize,
    repetitions: usize,
    /// Repetition-major: `values[k·N + i]` is mind `i` in repetition `k`.
    values: Vec<u16>,
    master_seed: u64,
}

impl QubitGas {
    /// Draws the full gas from per-repetition streams of the master seed.
    /// A single-level gas is the degenerate deterministic case (all zeros).
    pub fn sample(levels: u16, minds: usize, repetitions: usize, seeds: &SeededRng) -> Result<Self> {
        if levels == 0 {
            return Err(Error::InvalidScenario("gas needs at least one level".into()));
        }
        if minds == 0 || repetitions == 0 {
            return Err(Error::InvalidScenario(
                "gas needs at least one mind and one repetition".into(),
            ));
        }
        let mut values = vec![0u16; minds * repetitions];
        values
            .par_chunks_mut(minds)
            .enumerate()
            .for_each(|(rep, column)| {
                let mut rng = seeds.stream(rep as u64);
                for v in column.iter_mut() {
                    *v = rng.gen_range(0..levels);
                }
            });
        Ok(QubitGas {
            levels,
            minds,
            repetitions,
            values,
            master_seed: seeds.master(),
        })
    }

    pub fn levels(&self) -> u16 {
        self.levels
    }

    pub fn minds(&self) -> usize {
        self.minds
    }

    pub fn repetitions(&self) -> usize {
        self.repetitions
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    /// All mind qubits of one repetition.
    pub fn column(&self, repetition: usize) -> &[u16] {
        &self.values[repetition * self.minds..(repetition + 1) * self.minds]
    }

    pub fn value(&self, mind: usize, repetition: usize) -> u16 {
        self.values[repetition * self.minds + mind]
    }

    /// Symbol frequencies across the whole gas.
    pub fn symbol_frequencies(&self) -> Vec<f64> {
        let mut counts = vec![0u64; self.levels as usize];
        for &v in &self.values {
            counts[v as usize] += 1;
        }
        let total = self.values.len() as f64;
        counts.into_iter().map(|c| c as f64 / total).collect()
    }

    /// Symbol frequencies of one mind family across repetitions.
    pub fn family_frequencies(&self, mind: usize) -> Vec<f64> {
        let mut counts = vec![0u64; self.levels as usize];
        for rep in 0..self.repetitions {
            counts[self.value(mind, rep) as usize] += 1;
        }
        counts
            .into_iter()
            .map(|c| c as f64 / self.repetitions as f64)
            .collect()
    }
}

/// Single-mind measurement step for the symmetric two-outcome system.
/// A `♠` qubit routes the mind into the first branch, `♥` into the second;
/// the branch the mind skips keeps an empty memory slot.
pub fn evolve_single_mind(spec: &SystemSpec, qubit: &Symbol) -> Result<BranchState> {
    let half = Weight::ratio(1, 2);
    let symmetric = spec.len() == 2
        && spec.weights().iter().all(|w| w.approx_eq(&half, 1e-12));
    if !symmetric {
        return Err(Error::InvalidScenario(
            "single-mind evolution needs a symmetric two-outcome system".into(),
        ));
    }
    let symbols = qubit_symbols(spec.outcomes());
    let idx = symbols
        .iter()
        .position(|s| s == qubit)
        .ok_or(Error::WrongAlphabet)?;
    evolve_for_alphabet(spec.outcomes(), &[idx as u16])
}

/// Single-mind step for a T-level driving qubit: the mind becomes aware in
/// branch β exactly when the qubit is `β̃`, and every other branch keeps an
/// empty slot.
pub fn evolve_t_level(fine_alphabet: &[Symbol], qubit_index: usize) -> Result<BranchState> {
    if qubit_index >= fine_alphabet.len() {
        return Err(Error::WrongAlphabet);
    }
    evolve_for_alphabet(fine_alphabet, &[qubit_index as u16])
}

/// N-mind evolution: mind `i` is aware in branch β iff its qubit is `β̃`.
/// The qubit labels ride along unchanged (they factor out of the sum).
pub fn evolve_many_minds(fine_alphabet: &[Symbol], qubits: &[u16]) -> Result<BranchState> {
    if qubits.is_empty() {
        return Err(Error::InvalidScenario("at least one mind is required".into()));
    }
    evolve_for_alphabet(fine_alphabet, qubits)
}

fn evolve_for_alphabet(alphabet: &[Symbol], qubits: &[u16]) -> Result<BranchState> {
    let t = alphabet.len();
    if t == 0 {
        return Err(Error::EmptyAlphabet);
    }
    if qubits.iter().any(|&q| q as usize >= t) {
        return Err(Error::WrongAlphabet);
    }
    let symbols = qubit_symbols(alphabet);
    let qubit_field: Vec<Symbol> = qubits.iter().map(|&q| symbols[q as usize].clone()).collect();
    let amp = crate::amplitude::Amplitude::sqrt_ratio(BigRational::new(
        BigInt::from(1),
        BigInt::from(t as i64),
    ));
    BranchState::from_branches((0..t).map(|j| {
        let outcome = &alphabet[j];
        let minds: Vec<MindSlot> = qubits
            .iter()
            .map(|&q| {
                if q as usize == j {
                    MindSlot::Aware(outcome.clone())
                } else {
                    MindSlot::Empty
                }
            })
            .collect();
        (
            BranchLabel::new()
                .with_system(outcome.clone())
                .with_env(env_tag(outcome))
                .with_minds(minds)
                .with_qubits(qubit_field.clone()),
            amp.clone(),
        )
    }))
}

/// Reads the per-branch aware-mind counts off an evolved state, checking
/// that each mind is aware in exactly one branch and that awareness always
/// matches the branch outcome.
pub fn branch_tally(state: &BranchState, fine_alphabet: &[Symbol]) -> Result<Vec<u64>> {
    let mut counts = vec![0u64; fine_alphabet.len()];
    let mut per_mind: Option<Vec<u32>> = None;
    for (label, _) in state.iter() {
        let outcome = label.system.as_ref().ok_or(Error::MissingField("system"))?;
        let j = fine_alphabet
            .iter()
            .position(|s| s == outcome)
            .ok_or_else(|| Error::UnknownSymbol(outcome.clone()))?;
        let minds = label.minds.as_ref().ok_or(Error::MissingField("minds"))?;
        let tracker = per_mind.get_or_insert_with(|| vec![0u32; minds.len()]);
        for (i, slot) in minds.iter().enumerate() {
            match slot {
                MindSlot::Aware(s) if s == outcome => {
                    counts[j] += 1;
                    tracker[i] += 1;
                }
                MindSlot::Aware(_) => return Err(Error::InconsistentTally),
                MindSlot::Empty => {}
                MindSlot::Ready => return Err(Error::InconsistentTally),
            }
        }
    }
    match per_mind {
        Some(tracker) if tracker.iter().all(|&c| c == 1) => Ok(counts),
        _ => Err(Error::InconsistentTally),
    }
}

/// How an experiment evaluates its gas ensemble.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RunMode {
    /// Sample M gas columns from the seed.
    MonteCarlo,
    /// Enumerate all T^N gas assignments as equally weighted repetitions.
    Exact,
}

/// A complete experiment: system, fine-graining level, gas size and seed.
#[derive(Clone, Debug)]
pub struct ExperimentScenario {
    pub spec: SystemSpec,
    pub minds: u64,
    pub repetitions: u64,
    /// Fine-graining denominator T; `None` picks the lcm of the weight
    /// denominators.
    pub levels: Option<u32>,
    pub seed: u64,
    pub mode: RunMode,
}

impl ExperimentScenario {
    pub fn grain(&self) -> Result<(FineGrainMap, BranchState)> {
        match self.levels {
            Some(t) => fine_grain_with_levels(&self.spec, t),
            None => fine_grain(&self.spec),
        }
    }
}

/// Mind-occupancy statistics across the repetitions of one scenario.
#[derive(Clone, Debug)]
pub struct ConvergenceReport {
    pub outcomes: Vec<Symbol>,
    pub minds: u64,
    pub repetitions: u64,
    pub levels: u32,
    /// `T_a/T` per coarse outcome.
    pub theoretical: Vec<Weight>,
    /// Coarse per-repetition tallies.
    pub tallies: Vec<MindTally>,
    pub mean_fractions: Vec<f64>,
    /// Observed std/mean of `N_a` across repetitions (`None` for an
    /// outcome that never received a mind or with fewer than 2 repetitions).
    pub empirical_fluctuations: Vec<Option<f64>>,
    /// `(1/√N)·√((1−p)/p)` per outcome (`None` for zero weight).
    pub predicted_fluctuations: Vec<Option<f64>>,
    /// Repetitions in which some positive-weight outcome had zero minds.
    pub hulk_repetitions: u64,
    pub hulk_by_outcome: Vec<u64>,
}

/// One row of the probability table: the symmetry-derived value versus the
/// observed mind frequency.
#[derive(Clone, Debug)]
pub struct ProbabilityRow {
    pub outcome: Symbol,
    pub theoretical: Weight,
    pub empirical: f64,
}

impl ConvergenceReport {
    /// Identifies `P(O_a)` with the gas symbol frequency feeding the
    /// branch: theoretical `T_a/T` next to the observed mean fraction.
    pub fn probability_table(&self) -> Vec<ProbabilityRow> {
        self.outcomes
            .iter()
            .zip(self.theoretical.iter())
            .zip(self.mean_fractions.iter())
            .map(|((outcome, theoretical), &empirical)| ProbabilityRow {
                outcome: outcome.clone(),
                theoretical: theoretical.clone(),
                empirical,
            })
            .collect()
    }
}

/// Theoretical vs empirical mind probabilities of a finished run.
pub fn mind_probability_table(report: &ConvergenceReport) -> Vec<ProbabilityRow> {
    report.probability_table()
}

/// Runs the scenario: evolves each repetition's gas column, tallies aware
/// minds per branch on the evolved state, groups them by coarse outcome
/// and aggregates convergence statistics.
pub fn run_experiment(scenario: &ExperimentScenario) -> Result<ConvergenceReport> {
    let (map, _) = scenario.grain()?;
    let minds = usize::try_from(scenario.minds)
        .map_err(|_| Error::InvalidScenario("mind count too large".into()))?;
    if minds == 0 {
        return Err(Error::InvalidScenario("at least one mind is required".into()));
    }

    let tallies: Vec<MindTally> = match scenario.mode {
        RunMode::MonteCarlo => {
            let reps = usize::try_from(scenario.repetitions)
                .map_err(|_| Error::InvalidScenario("repetition count too large".into()))?;
            if reps == 0 {
                return Err(Error::InvalidScenario(
                    "at least one repetition is required".into(),
                ));
            }
            let gas = QubitGas::sample(
                map.levels() as u16,
                minds,
                reps,
                &SeededRng::new(scenario.seed),
            )?;
            (0..reps)
                .into_par_iter()
                .map(|k| coarse_tally_of_column(&map, gas.column(k)))
                .collect::<Result<Vec<_>>>()?
        }
        RunMode::Exact => {
            let mut tallies = Vec::new();
            for_each_assignment(map.levels(), minds, DEFAULT_ASSIGNMENT_CAP, &mut |column| {
                tallies.push(coarse_tally_of_column(&map, column));
            })?;
            tallies.into_iter().collect::<Result<Vec<_>>>()?
        }
    };

    Ok(summarize(&map, scenario, tallies))
}

fn coarse_tally_of_column(map: &FineGrainMap, column: &[u16]) -> Result<MindTally> {
    let state = evolve_many_minds(map.fine(), column)?;
    let fine_counts = branch_tally(&state, map.fine())?;
    Ok(MindTally::new(map.coarsen_counts(&fine_counts)?))
}

fn summarize(
    map: &FineGrainMap,
    scenario: &ExperimentScenario,
    tallies: Vec<MindTally>,
) -> ConvergenceReport {
    let outcomes = scenario.spec.outcomes().to_vec();
    let k = outcomes.len();
    let n = scenario.minds as f64;
    let reps = tallies.len();
    let sizes = map.sizes();

    let mut means = vec![0.0f64; k];
    for tally in &tallies {
        for (m, &c) in means.iter_mut().zip(tally.counts()) {
            *m += c as f64;
        }
    }
    for m in means.iter_mut() {
        *m /= reps as f64;
    }

    let mut empirical = vec![None; k];
    if reps >= 2 {
        for a in 0..k {
            if means[a] > 0.0 {
                let var: f64 = tallies
                    .iter()
                    .map(|t| (t.count(a) as f64 - means[a]).powi(2))
                    .sum::<f64>()
                    / (reps as f64 - 1.0);
                empirical[a] = Some(var.sqrt() / means[a]);
            }
        }
    }

    let predicted: Vec<Option<f64>> = map
        .coarse_weights()
        .iter()
        .map(|w| {
            let p = w.to_f64();
            (p > 0.0).then(|| ((1.0 - p) / p).sqrt() / n.sqrt())
        })
        .collect();

    let mut hulk_by_outcome = vec![0u64; k];
    let mut hulk_repetitions = 0u64;
    for tally in &tallies {
        let mut any = false;
        for a in 0..k {
            if sizes[a] > 0 && tally.count(a) == 0 {
                hulk_by_outcome[a] += 1;
                any = true;
            }
        }
        if any {
            hulk_repetitions += 1;
        }
    }

    ConvergenceReport {
        outcomes,
        minds: scenario.minds,
        repetitions: reps as u64,
        levels: map.levels() as u32,
        theoretical: map.coarse_weights(),
        mean_fractions: means.iter().map(|m| m / n).collect(),
        empirical_fluctuations: empirical,
        predicted_fluctuations: predicted,
        hulk_repetitions,
        hulk_by_outcome,
        tallies,
    }
}

/// The exact coarse-tally distribution induced by enumerating every one of
/// the T^N equally likely gas assignments through the unitary evolution.
pub fn exact_tally_distribution(
    map: &FineGrainMap,
    minds: usize,
) -> Result<Vec<(MindTally, Weight)>> {
    use std::collections::BTreeMap;
    let mut counts: BTreeMap<Vec<u64>, u64> = BTreeMap::new();
    let mut total: u64 = 0;
    for_each_assignment(map.levels(), minds, DEFAULT_ASSIGNMENT_CAP, &mut |column| {
        let tally = coarse_tally_of_column(map, column).expect("evolution of a valid column");
        *counts.entry(tally.counts().to_vec()).or_insert(0) += 1;
        total += 1;
    })?;
    Ok(counts
        .into_iter()
        .map(|(c, occurrences)| {
            let w = Weight::Exact(BigRational::new(
                BigInt::from(occurrences),
                BigInt::from(total),
            ));
            (MindTally::new(c), w)
        })
        .collect())
}

/// Visits every base-T assignment of qubits to `minds` minds.
fn for_each_assignment(
    levels: usize,
    minds: usize,
    cap: u64,
    visit: &mut impl FnMut(&[u16]),
) -> Result<()> {
    if minds == 0 {
        return Err(Error::InvalidScenario("at least one mind is required".into()));
    }
    let required = (levels as u128)
        .checked_pow(minds as u32)
        .unwrap_or(u128::MAX);
    if required > cap as u128 {
        return Err(Error::EnumerationCap { required, cap });
    }
    let mut column = vec![0u16; minds];
    loop {
        visit(&column);
        let mut i = 0;
        loop {
            if i == minds {
                return Ok(());
            }
            column[i] += 1;
            if (column[i] as usize) < levels {
                break;
            }
            column[i] = 0;
            i += 1;
        }
    }
}
