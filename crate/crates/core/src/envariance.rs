//! Environment-assisted invariance and its consequences: Schmidt states,
//! swap/counterswap checks, the strong symmetry condition, symmetry-derived
//! equiprobability, fine-graining of rational weights into equal-weight
//! branches, additive coarse probabilities, and the erasure chain.
//!
//! Probabilities produced here come from the swap-group symmetry, not from
//! reading amplitudes; amplitude-derived measures appear only as the
//! reported cross-checks.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

use crate::amplitude::Amplitude;
use crate::error::{Error, Result};
use crate::frequency::SystemSpec;
use crate::label::{BranchLabel, Symbol};
use crate::state::{BranchState, LabelUnitary, SymbolField, DEFAULT_TOLERANCE};
use crate::weight::Weight;

/// Default ceiling on the fine-graining denominator T.
pub const DEFAULT_FINE_GRAIN_CAP: u64 = 10_000;

/// Partition of the fine alphabet Δ into per-outcome groups Δ_a.
#[derive(Clone, Debug)]
pub struct FineGrainMap {
    coarse: Vec<Symbol>,
    fine: Vec<Symbol>,
    groups: Vec<Vec<usize>>,
}

impl FineGrainMap {
    pub fn new(coarse: Vec<Symbol>, fine: Vec<Symbol>, groups: Vec<Vec<usize>>) -> Result<Self> {
        if groups.len() != coarse.len() {
            return Err(Error::PartitionMismatch);
        }
        let mut seen = vec![false; fine.len()];
        for group in &groups {
            for &idx in group {
                if idx >= fine.len() || seen[idx] {
                    return Err(Error::PartitionMismatch);
                }
                seen[idx] = true;
            }
        }
        if seen.iter().any(|&s| !s) {
            return Err(Error::PartitionMismatch);
        }
        Ok(FineGrainMap {
            coarse,
            fine,
            groups,
        })
    }

    /// Total number of fine outcomes, T.
    pub fn levels(&self) -> usize {
        self.fine.len()
    }

    /// Group sizes T_a in coarse-outcome order.
    pub fn sizes(&self) -> Vec<usize> {
        self.groups.iter().map(|g| g.len()).collect()
    }

    pub fn coarse(&self) -> &[Symbol] {
        &self.coarse
    }

    pub fn fine(&self) -> &[Symbol] {
        &self.fine
    }

    pub fn group(&self, coarse_index: usize) -> &[usize] {
        &self.groups[coarse_index]
    }

    /// Index of the coarse outcome owning fine outcome `fine_index`.
    pub fn coarse_of(&self, fine_index: usize) -> usize {
        self.groups
            .iter()
            .position(|g| g.contains(&fine_index))
            .expect("partition covers all fine indices")
    }

    /// Sums a per-fine-outcome count vector into coarse groups.
    pub fn coarsen_counts(&self, fine_counts: &[u64]) -> Result<Vec<u64>> {
        if fine_counts.len() != self.levels() {
            return Err(Error::PartitionMismatch);
        }
        Ok(self
            .groups
            .iter()
            .map(|g| g.iter().map(|&i| fine_counts[i]).sum())
            .collect())
    }

    /// The theoretical coarse weights T_a/T.
    pub fn coarse_weights(&self) -> Vec<Weight> {
        let t = self.levels() as i64;
        self.groups
            .iter()
            .map(|g| Weight::ratio(g.len() as i64, t))
            .collect()
    }
}

/// The Schmidt-symmetric state `√(1/T) Σ_α |α⟩⊗|ε_α⟩` on default symbols.
pub fn schmidt_state(levels: usize) -> Result<BranchState> {
    if levels < 2 {
        return Err(Error::InvalidScenario(
            "a Schmidt state needs at least two branches".into(),
        ));
    }
    let amp = Amplitude::sqrt_ratio(BigRational::new(BigInt::from(1), BigInt::from(levels as i64)));
    BranchState::from_branches((1..=levels).map(|j| {
        (
            BranchLabel::new()
                .with_system(format!("α{j}").as_str())
                .with_env(format!("ε_{j}").as_str()),
            amp.clone(),
        )
    }))
}

/// The environment tag perfectly correlated with system outcome `alpha`.
/// Errors if the outcome is absent or carries more than one tag.
fn env_partner(state: &BranchState, alpha: &Symbol) -> Result<Symbol> {
    let mut tags: BTreeSet<Symbol> = BTreeSet::new();
    for label in state.labels() {
        if label.system.as_ref() == Some(alpha) {
            if let Some(env) = &label.env {
                tags.insert(env.clone());
            }
        }
    }
    match tags.len() {
        0 => Err(Error::UnknownSymbol(alpha.clone())),
        1 => Ok(tags.into_iter().next().expect("one tag")),
        _ => Err(Error::NotSchmidtCorrelated(alpha.clone())),
    }
}

/// Outcome of a swap/counterswap test on one outcome pair.
#[derive(Clone, Debug)]
pub struct EnvarianceReport {
    pub swapped: BranchState,
    pub counterswapped: BranchState,
    /// `|⟨Û⁽ᴱ⁾Û⁽ˢ⁾Ψ|Ψ⟩|²`.
    pub fidelity: Weight,
    pub envariant: bool,
    /// False when both outcomes share one environment tag (no entanglement
    /// between the pair, so the counterswap is vacuous).
    pub distinct_tags: bool,
}

/// Applies the swap `α↔β` on the system and the counterswap on the
/// environment, and reports the fidelity with the original state.
pub fn verify_envariance(
    state: &BranchState,
    alpha: &Symbol,
    beta: &Symbol,
) -> Result<EnvarianceReport> {
    let tag_a = env_partner(state, alpha)?;
    let tag_b = env_partner(state, beta)?;
    let swap = LabelUnitary::swap(SymbolField::System, alpha.clone(), beta.clone());
    let counterswap = LabelUnitary::swap(SymbolField::Env, tag_a.clone(), tag_b.clone());
    let swapped = state.apply(&swap)?;
    let counterswapped = swapped.apply(&counterswap)?;
    let fidelity = counterswapped.fidelity(state)?;
    let envariant = fidelity.approx_eq(&Weight::one(), state.tolerance());
    Ok(EnvarianceReport {
        swapped,
        counterswapped,
        fidelity,
        envariant,
        distinct_tags: tag_a != tag_b,
    })
}

/// Result of the projector-expectation equality test.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SymmetryCheck {
    pub holds: bool,
    /// Both outcomes carry the same environment tag: the equality is
    /// vacuous because nothing distinguishes the swapped branches.
    pub no_correlation: bool,
}

/// The strong symmetry condition behind the equiprobability step: the
/// measure of `(S=α, E=ε_α)` in the state equals the measure of
/// `(S=β, E=ε_α)` once the counterswap `ε_α↔ε_β` has acted on the
/// environment. Schmidt-symmetric states pass for every pair; a weight
/// imbalance between the two branches makes the equality fail.
pub fn strong_symmetry_check(
    state: &BranchState,
    alpha: &Symbol,
    beta: &Symbol,
) -> Result<SymmetryCheck> {
    let tag_a = env_partner(state, alpha)?;
    let tag_b = env_partner(state, beta)?;
    let counterswap = LabelUnitary::swap(SymbolField::Env, tag_a.clone(), tag_b.clone());
    let counterswapped = state.apply(&counterswap)?;
    let lhs = state.measure_of(|l| {
        l.system.as_ref() == Some(alpha) && l.env.as_ref() == Some(&tag_a)
    });
    let rhs = counterswapped.measure_of(|l| {
        l.system.as_ref() == Some(beta) && l.env.as_ref() == Some(&tag_a)
    });
    Ok(SymmetryCheck {
        holds: lhs.approx_eq(&rhs, state.tolerance()),
        no_correlation: tag_a == tag_b,
    })
}

/// Assigns probabilities from the swap symmetry alone: the swap orbit must
/// leave the state invariant for every outcome pair, and then each of the T
/// branches receives exactly 1/T. Refuses states whose symmetry is broken.
///
/// Pairwise weight equality is transitive, so checking the star of pairs
/// anchored at the first outcome decides every pair without the O(T²) walk.
pub fn equiprobability_from_symmetry(state: &BranchState) -> Result<Vec<(Symbol, Weight)>> {
    let alphabet = state.system_alphabet();
    if alphabet.is_empty() {
        return Err(Error::MissingField("system"));
    }
    for sym in &alphabet {
        env_partner(state, sym)?;
    }
    for other in alphabet.iter().skip(1) {
        let report = verify_envariance(state, &alphabet[0], other)?;
        if !report.envariant {
            return Err(Error::NotEnvariant(alphabet[0].clone(), other.clone()));
        }
    }
    let t = alphabet.len() as i64;
    Ok(alphabet
        .into_iter()
        .map(|s| (s, Weight::ratio(1, t)))
        .collect())
}

/// Fine-grains a rational spec into T = lcm(denominators) equal branches.
/// Returns the partition and the resulting Schmidt-symmetric state.
pub fn fine_grain(spec: &SystemSpec) -> Result<(FineGrainMap, BranchState)> {
    let (_, denom) = spec
        .common_denominator()
        .ok_or(Error::RequiresRationalApproximation)?;
    let t = denom
        .to_u64()
        .filter(|&t| t <= DEFAULT_FINE_GRAIN_CAP)
        .ok_or_else(|| Error::FineGrainCap {
            denominator: denom.to_u128().unwrap_or(u128::MAX),
            cap: DEFAULT_FINE_GRAIN_CAP,
        })?;
    fine_grain_for_denominator(spec, t)
}

/// Fine-grains with a caller-chosen T; every weight must be an integer
/// multiple of 1/T.
pub fn fine_grain_with_levels(
    spec: &SystemSpec,
    levels: u32,
) -> Result<(FineGrainMap, BranchState)> {
    if levels == 0 {
        return Err(Error::FineGrainingMismatch { levels });
    }
    fine_grain_for_denominator(spec, levels as u64)
}

fn fine_grain_for_denominator(spec: &SystemSpec, t: u64) -> Result<(FineGrainMap, BranchState)> {
    let t_big = BigRational::from_integer(BigInt::from(t));
    let mut sizes = Vec::with_capacity(spec.len());
    for w in spec.weights() {
        let r = w.as_exact().ok_or(Error::RequiresRationalApproximation)?;
        let scaled = r * &t_big;
        if !scaled.denom().is_one() {
            return Err(Error::FineGrainingMismatch { levels: t as u32 });
        }
        sizes.push(scaled.numer().to_u64().expect("weight in [0,1] times t"));
    }

    let mut fine: Vec<Symbol> = Vec::with_capacity(t as usize);
    let mut groups: Vec<Vec<usize>> = Vec::with_capacity(spec.len());
    for (a, &t_a) in sizes.iter().enumerate() {
        let coarse_sym = &spec.outcomes()[a];
        let mut group = Vec::with_capacity(t_a as usize);
        for j in 1..=t_a {
            let sym = if t_a == 1 {
                coarse_sym.clone()
            } else {
                Symbol::new(format!("{coarse_sym}.{j}"))
            };
            group.push(fine.len());
            fine.push(sym);
        }
        groups.push(group);
    }
    let unique: BTreeSet<&Symbol> = fine.iter().collect();
    if unique.len() != fine.len() {
        return Err(Error::DuplicateOutcome);
    }
    let map = FineGrainMap::new(spec.outcomes().to_vec(), fine, groups)?;

    // Pre-relabel state: each grain still carries its coarse tag e_a.
    let amp = Amplitude::sqrt_ratio(BigRational::new(BigInt::from(1), BigInt::from(t)));
    let coarse_tag = |a: usize| Symbol::new(format!("e_{}", spec.outcomes()[a]));
    let correlated = BranchState::from_branches((0..map.levels()).map(|j| {
        (
            BranchLabel::new()
                .with_system(map.fine()[j].clone())
                .with_env(coarse_tag(map.coarse_of(j))),
            amp.clone(),
        )
    }))?;

    // Global relabeling |δ_j⟩⊗|e_a⟩ → |δ_j⟩⊗|ε_j⟩, realized as a unitary
    // permutation of joint (system, env) pairs.
    let mut relabel = BTreeMap::new();
    for j in 0..map.levels() {
        let sys = map.fine()[j].clone();
        let old = coarse_tag(map.coarse_of(j));
        let new = Symbol::new(format!("ε_{}", j + 1));
        relabel.insert((sys.clone(), old.clone()), (sys.clone(), new.clone()));
        relabel.insert((sys.clone(), new), (sys, old));
    }
    let state = correlated.apply(&LabelUnitary::system_env_permutation(relabel)?)?;

    debug_assert!({
        let probs: Vec<Weight> = (0..map.levels())
            .map(|j| state.measure_of(|l| l.system.as_ref() == Some(&map.fine()[j])))
            .collect();
        coarse_probability(&map, &probs)
            .map(|coarse| {
                coarse
                    .iter()
                    .zip(spec.weights())
                    .all(|(c, w)| c.approx_eq(w, DEFAULT_TOLERANCE))
            })
            .unwrap_or(false)
    });

    Ok((map, state))
}

/// Rational weights `T_a/T` with a common denominator `T ≤ max_denominator`
/// approximating the given floats to within `tol` each.
pub fn approximate_weights(
    weights: &[f64],
    max_denominator: u64,
    tol: f64,
) -> Result<Vec<BigRational>> {
    if weights.is_empty() {
        return Err(Error::EmptyAlphabet);
    }
    if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
        return Err(Error::NegativeWeight);
    }
    for t in 1..=max_denominator {
        let t_f = t as f64;
        let rounded: Vec<u64> = weights.iter().map(|w| (w * t_f).round() as u64).collect();
        if rounded.iter().sum::<u64>() != t {
            continue;
        }
        let fits = weights
            .iter()
            .zip(&rounded)
            .all(|(w, &r)| (w - r as f64 / t_f).abs() <= tol);
        if fits {
            return Ok(rounded
                .into_iter()
                .map(|r| BigRational::new(BigInt::from(r), BigInt::from(t)))
                .collect());
        }
    }
    Err(Error::FineGrainCap {
        denominator: max_denominator as u128 + 1,
        cap: max_denominator,
    })
}

/// Additivity: sums fine-branch probabilities over each group Δ_a.
pub fn coarse_probability(map: &FineGrainMap, fine_probs: &[Weight]) -> Result<Vec<Weight>> {
    if fine_probs.len() != map.levels() {
        return Err(Error::PartitionMismatch);
    }
    let total = fine_probs
        .iter()
        .fold(Weight::zero(), |acc, p| acc.add(p));
    if !total.approx_eq(&Weight::one(), DEFAULT_TOLERANCE) {
        return Err(Error::WeightsNotNormalized);
    }
    Ok(map
        .groups
        .iter()
        .map(|g| {
            g.iter()
                .fold(Weight::zero(), |acc, &i| acc.add(&fine_probs[i]))
        })
        .collect())
}

/// The four states of the erasure chain plus the verdicts they support.
#[derive(Clone, Debug)]
pub struct WallaceReport {
    pub counterswapped: BranchState,
    pub erased: BranchState,
    pub erased_counterswapped: BranchState,
    /// Erased states agree label-for-label (they always do once erasure
    /// succeeds: the counterswap only permutes the surviving tags).
    pub labels_match: bool,
    /// Branch-for-branch amplitude agreement of the two erased states —
    /// the operational content of branch indifference. Holds exactly when
    /// the two branches entered with equal amplitudes.
    pub branch_indifference: bool,
    pub measure_alpha: Weight,
    pub measure_beta: Weight,
    /// The implied equality `P(α, Alex_α) = P(β, Alex_β)`.
    pub weights_equal: bool,
}

/// Runs the counterswap → erase chain on a state holding records
/// `(α, Alex_α)` and `(β, Alex_β)` with distinct environment tags, and
/// reports whether branch indifference and the weight equality hold.
pub fn wallace_chain(
    state: &BranchState,
    alpha: &Symbol,
    beta: &Symbol,
) -> Result<WallaceReport> {
    let tag_a = env_partner(state, alpha)?;
    let tag_b = env_partner(state, beta)?;
    if tag_a == tag_b {
        return Err(Error::SharedEnvironmentTag);
    }
    let counterswap = LabelUnitary::swap(SymbolField::Env, tag_a.clone(), tag_b.clone());
    let counterswapped = state.apply(&counterswap)?;

    let targets: BTreeSet<Symbol> = [alpha.clone(), beta.clone()].into();
    let erased = state.erase(&targets)?;
    let erased_counterswapped = counterswapped.erase(&targets)?;

    let tol = state.tolerance();
    let labels_match = erased.len() == erased_counterswapped.len()
        && erased
            .labels()
            .all(|l| erased_counterswapped.amplitude(l).is_some());
    let branch_indifference = erased.approx_eq(&erased_counterswapped, tol);

    let measure_alpha = state.measure_of(|l| {
        l.system.as_ref() == Some(alpha) && l.env.as_ref() == Some(&tag_a)
    });
    let measure_beta = state.measure_of(|l| {
        l.system.as_ref() == Some(beta) && l.env.as_ref() == Some(&tag_b)
    });
    let weights_equal = measure_alpha.approx_eq(&measure_beta, tol);

    Ok(WallaceReport {
        counterswapped,
        erased,
        erased_counterswapped,
        labels_match,
        branch_indifference,
        measure_alpha,
        measure_beta,
        weights_equal,
    })
}
