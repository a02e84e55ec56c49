//! Long-run frequency statistics: history states, the frequency-operator
//! eigenvalue/expectation identities, maverick-history measures and the
//! typicality error, plus the decision-theoretic value function.
//!
//! Expectations over all `alphabet^N` histories are computed by exact
//! enumeration below a configurable cap; above it the closed forms take
//! over (binomial tail sums, and the analytic identity `⟨Q̂_α⟩ = ‖Ψ_α‖²`).

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::amplitude::Amplitude;
use crate::comb;
use crate::error::{Error, Result};
use crate::label::{BranchLabel, Symbol};
use crate::state::BranchState;
use crate::weight::{rational_from_f64, Weight};

/// Default ceiling on `alphabet^N` for exact history enumeration.
pub const DEFAULT_ENUMERATION_CAP: u64 = 1 << 20;

/// The measured system: an outcome alphabet with normalized weights.
#[derive(Clone, Debug)]
pub struct SystemSpec {
    outcomes: Vec<Symbol>,
    weights: Vec<Weight>,
}

impl SystemSpec {
    pub fn new(pairs: Vec<(Symbol, Weight)>) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::EmptyAlphabet);
        }
        let mut seen = std::collections::BTreeSet::new();
        for (sym, w) in &pairs {
            if !seen.insert(sym.clone()) {
                return Err(Error::DuplicateOutcome);
            }
            if w.is_negative() {
                return Err(Error::NegativeWeight);
            }
        }
        let (outcomes, weights): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
        let sum = weights.iter().fold(Weight::zero(), |acc, w| acc.add(w));
        let normalized = if weights.iter().all(Weight::is_exact) {
            sum.is_one()
        } else {
            (sum.to_f64() - 1.0).abs() <= 1e-12
        };
        if !normalized {
            return Err(Error::WeightsNotNormalized);
        }
        Ok(SystemSpec { outcomes, weights })
    }

    pub fn from_rationals(pairs: Vec<(Symbol, BigRational)>) -> Result<Self> {
        Self::new(
            pairs
                .into_iter()
                .map(|(s, r)| (s, Weight::Exact(r)))
                .collect(),
        )
    }

    pub fn from_floats(pairs: Vec<(Symbol, f64)>) -> Result<Self> {
        Self::new(
            pairs
                .into_iter()
                .map(|(s, x)| (s, Weight::Float(x)))
                .collect(),
        )
    }

    /// Equal exact weights `1/k` on the given outcomes.
    pub fn uniform(outcomes: Vec<Symbol>) -> Result<Self> {
        let k = outcomes.len() as i64;
        if k == 0 {
            return Err(Error::EmptyAlphabet);
        }
        Self::new(
            outcomes
                .into_iter()
                .map(|s| (s, Weight::ratio(1, k)))
                .collect(),
        )
    }

    pub fn outcomes(&self) -> &[Symbol] {
        &self.outcomes
    }

    pub fn weights(&self) -> &[Weight] {
        &self.weights
    }

    pub fn weight(&self, index: usize) -> &Weight {
        &self.weights[index]
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn index_of(&self, symbol: &Symbol) -> Result<usize> {
        self.outcomes
            .iter()
            .position(|s| s == symbol)
            .ok_or_else(|| Error::UnknownSymbol(symbol.clone()))
    }

    pub fn is_exact(&self) -> bool {
        self.weights.iter().all(Weight::is_exact)
    }

    pub fn weights_f64(&self) -> Vec<f64> {
        self.weights.iter().map(Weight::to_f64).collect()
    }

    /// `√weight` amplitude of one outcome (default zero phase).
    pub fn amplitude(&self, index: usize) -> Amplitude {
        Amplitude::sqrt_weight(&self.weights[index])
    }

    /// The system-only superposition `Σ √w_α |α⟩`.
    pub fn branch_state(&self) -> BranchState {
        BranchState::from_branches(self.outcomes.iter().enumerate().map(|(i, s)| {
            (
                BranchLabel::new().with_system(s.clone()),
                self.amplitude(i),
            )
        }))
        .expect("spec has at least one positive weight")
    }

    /// Exact weights as numerators over one common denominator.
    /// `None` if any weight is a float.
    pub fn common_denominator(&self) -> Option<(Vec<BigInt>, BigInt)> {
        let mut denom = BigInt::one();
        for w in &self.weights {
            denom = denom.lcm(w.as_exact()?.denom());
        }
        let numerators = self
            .weights
            .iter()
            .map(|w| {
                let r = w.as_exact().expect("checked above");
                r.numer() * (&denom / r.denom())
            })
            .collect();
        Some((numerators, denom))
    }
}

/// A recorded sequence of outcomes from repeated identical measurements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct History {
    outcomes: Vec<Symbol>,
}

impl History {
    pub fn new(outcomes: Vec<Symbol>) -> Result<Self> {
        if outcomes.is_empty() {
            return Err(Error::EmptyHistory);
        }
        Ok(History { outcomes })
    }

    pub fn from_strs(names: &[&str]) -> Result<Self> {
        Self::new(names.iter().map(Symbol::new).collect())
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Symbol> {
        self.outcomes.iter()
    }
}

/// Counts, measure and relative frequencies of one history.
#[derive(Clone, Debug)]
pub struct HistoryStats {
    pub counts: Vec<u64>,
    pub n: u64,
    pub measure: Weight,
}

impl HistoryStats {
    /// `N_α(h)/N` as an exact rational.
    pub fn frequency(&self, index: usize) -> BigRational {
        BigRational::new(BigInt::from(self.counts[index]), BigInt::from(self.n))
    }
}

/// Counts and measure `Π_α w_α^{N_α(h)}` of the history state `|Ψ(h)⟩`.
pub fn history_state(spec: &SystemSpec, h: &History) -> Result<HistoryStats> {
    let mut counts = vec![0u64; spec.len()];
    for sym in h.iter() {
        counts[spec.index_of(sym)?] += 1;
    }
    let mut measure = Weight::one();
    for (i, &c) in counts.iter().enumerate() {
        if c > 0 {
            measure = measure.mul(&spec.weight(i).pow(c));
        }
    }
    Ok(HistoryStats {
        counts,
        n: h.len() as u64,
        measure,
    })
}

/// The frequency-operator eigenvalue `N_α(h)/N` on the history state.
pub fn frequency_eigenvalue(h: &History, alpha: &Symbol) -> BigRational {
    let count = h.iter().filter(|s| *s == alpha).count();
    BigRational::new(BigInt::from(count), BigInt::from(h.len()))
}

/// How `frequency_expectation` evaluates the history sum.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExpectationMethod {
    /// Brute-force sum over all `alphabet^N` histories (capped).
    Enumerate { cap: u64 },
    /// The analytic value `‖Ψ_α‖²` of the averaged projector.
    ClosedForm,
}

impl Default for ExpectationMethod {
    fn default() -> Self {
        ExpectationMethod::Enumerate {
            cap: DEFAULT_ENUMERATION_CAP,
        }
    }
}

/// `⟨Ψ_N|Q̂_α|Ψ_N⟩ = Σ_h (N_α(h)/N)·‖Ψ(h)‖²` for every outcome at once.
pub fn frequency_expectation_all(
    spec: &SystemSpec,
    n: u32,
    method: ExpectationMethod,
) -> Result<Vec<Weight>> {
    if n == 0 {
        return Err(Error::EmptyHistory);
    }
    match method {
        ExpectationMethod::ClosedForm => Ok(spec.weights().to_vec()),
        ExpectationMethod::Enumerate { cap } => {
            check_cap(spec.len(), n, cap)?;
            match spec.common_denominator() {
                Some((numerators, denom)) => {
                    // Σ_h N_α(h)·Π p over integer numerators; the common
                    // denominator D^N and the 1/N factor divide out at the end.
                    let k = spec.len();
                    let mut sums = vec![BigInt::zero(); k];
                    let mut counts = vec![0u64; k];
                    dfs_exact(&numerators, n, &mut counts, &BigInt::one(), &mut |counts, prod| {
                        for (s, &c) in sums.iter_mut().zip(counts.iter()) {
                            if c > 0 {
                                *s += prod * c;
                            }
                        }
                    });
                    let scale = BigInt::from(n) * pow_bigint(&denom, n);
                    Ok(sums
                        .into_iter()
                        .map(|s| Weight::Exact(BigRational::new(s, scale.clone())))
                        .collect())
                }
                None => {
                    let weights = spec.weights_f64();
                    let k = weights.len();
                    let mut sums = vec![Kahan::default(); k];
                    let mut counts = vec![0u64; k];
                    dfs_float(&weights, n, &mut counts, 1.0, &mut |counts, prod| {
                        for (s, &c) in sums.iter_mut().zip(counts.iter()) {
                            if c > 0 {
                                s.add(prod * c as f64);
                            }
                        }
                    });
                    Ok(sums
                        .into_iter()
                        .map(|s| Weight::Float(s.value() / n as f64))
                        .collect())
                }
            }
        }
    }
}

/// Single-outcome frequency expectation.
pub fn frequency_expectation(
    spec: &SystemSpec,
    n: u32,
    alpha: &Symbol,
    method: ExpectationMethod,
) -> Result<Weight> {
    let idx = spec.index_of(alpha)?;
    Ok(frequency_expectation_all(spec, n, method)?.swap_remove(idx))
}

/// Total measure of maverick histories: those with `|N_α(h)/N − w_α| > ε`.
///
/// Below the enumeration cap this sums the measure of every violating
/// history directly; above it, the fact that only `N_α` matters reduces the
/// sum to an exact binomial tail in the marginal `N_α ~ B(N, w_α)`.
pub fn maverick_measure(spec: &SystemSpec, n: u64, alpha: &Symbol, epsilon: f64) -> Result<Weight> {
    if epsilon.is_nan() || epsilon <= 0.0 {
        return Err(Error::InvalidEpsilon);
    }
    if n == 0 {
        return Err(Error::EmptyHistory);
    }
    let idx = spec.index_of(alpha)?;
    let exact_zero = || {
        if spec.is_exact() {
            Weight::zero()
        } else {
            Weight::Float(0.0)
        }
    };
    if epsilon >= 1.0 {
        return Ok(exact_zero());
    }

    let table = violation_table(spec.weight(idx), n, epsilon);
    let violates = |j: u64| table[j as usize];

    let fits_cap = u32::try_from(n)
        .ok()
        .map(|n32| check_cap(spec.len(), n32, DEFAULT_ENUMERATION_CAP).is_ok())
        .unwrap_or(false);

    if fits_cap {
        let n32 = n as u32;
        match spec.common_denominator() {
            Some((numerators, denom)) => {
                let mut sum = BigInt::zero();
                let mut counts = vec![0u64; spec.len()];
                dfs_exact(&numerators, n32, &mut counts, &BigInt::one(), &mut |counts, prod| {
                    if violates(counts[idx]) {
                        sum += prod;
                    }
                });
                return Ok(Weight::Exact(BigRational::new(sum, pow_bigint(&denom, n32))));
            }
            None => {
                let weights = spec.weights_f64();
                let mut sum = Kahan::default();
                let mut counts = vec![0u64; spec.len()];
                dfs_float(&weights, n32, &mut counts, 1.0, &mut |counts, prod| {
                    if violates(counts[idx]) {
                        sum.add(prod);
                    }
                });
                return Ok(Weight::Float(sum.value()));
            }
        }
    }

    // Binomial-tail route.
    match spec.weight(idx) {
        Weight::Exact(w) => {
            if w.is_zero() || w.is_one() {
                // Degenerate marginal: all mass at N_α = w·N.
                let j = if w.is_zero() { 0 } else { n };
                return Ok(if violates(j) { Weight::one() } else { Weight::zero() });
            }
            let q = BigRational::one() - w;
            let step = w / &q;
            let mut coeff = num_bigint::BigUint::one();
            let mut run = pow_rational(&q, n); // w^j·q^(n−j) at j = 0
            let mut sum = BigRational::zero();
            for j in 0..=n {
                if j > 0 {
                    coeff = coeff * (n - j + 1) / j;
                    run *= &step;
                }
                if violates(j) {
                    sum += &run * BigRational::from_integer(BigInt::from(coeff.clone()));
                }
            }
            Ok(Weight::Exact(sum))
        }
        Weight::Float(w) => {
            let w = *w;
            if w <= 0.0 || w >= 1.0 {
                let j = if w <= 0.0 { 0 } else { n };
                return Ok(Weight::Float(if violates(j) { 1.0 } else { 0.0 }));
            }
            let (ln_w, ln_q) = (w.ln(), (1.0 - w).ln());
            let mut sum = Kahan::default();
            for j in 0..=n {
                if violates(j) {
                    let t = comb::ln_binomial(n, j) + j as f64 * ln_w + (n - j) as f64 * ln_q;
                    sum.add(t.exp());
                }
            }
            Ok(Weight::Float(sum.value()))
        }
    }
}

/// Table of `|j/n − w| > ε` for `j = 0..=n`, decided exactly when the
/// weight is exact (every finite `f64` ε is itself an exact rational).
fn violation_table(weight: &Weight, n: u64, epsilon: f64) -> Vec<bool> {
    match weight.as_exact().cloned().zip(rational_from_f64(epsilon)) {
        Some((w, eps)) => (0..=n)
            .map(|j| {
                let f = BigRational::new(BigInt::from(j), BigInt::from(n));
                (f - &w).abs() > eps
            })
            .collect(),
        None => {
            let w = weight.to_f64();
            (0..=n)
                .map(|j| (j as f64 / n as f64 - w).abs() > epsilon)
                .collect()
        }
    }
}

/// The typicality error `ΔN_α/N_α = (1/√N)·√((1−w_α)/w_α)`.
pub fn typicality_error(spec: &SystemSpec, n: u64, alpha: &Symbol) -> Result<f64> {
    if n == 0 {
        return Err(Error::EmptyHistory);
    }
    let w = spec.weight(spec.index_of(alpha)?).to_f64();
    if w <= 0.0 {
        return Err(Error::DegenerateOutcome);
    }
    Ok(((1.0 - w) / w).sqrt() / (n as f64).sqrt())
}

/// The value function `V_Ψ({x_α}) = Σ_α x_α·w_α`.
pub fn value_function(payoffs: &[f64], spec: &SystemSpec) -> Result<f64> {
    if payoffs.len() != spec.len() {
        return Err(Error::LengthMismatch);
    }
    Ok(payoffs
        .iter()
        .zip(spec.weights())
        .map(|(x, w)| x * w.to_f64())
        .sum())
}

fn check_cap(alphabet: usize, n: u32, cap: u64) -> Result<()> {
    let mut required: u128 = 1;
    for _ in 0..n {
        required = required.saturating_mul(alphabet as u128);
        if required > cap as u128 {
            return Err(Error::EnumerationCap { required, cap });
        }
    }
    Ok(())
}

fn pow_bigint(base: &BigInt, exp: u32) -> BigInt {
    num_traits::Pow::pow(base, exp)
}

fn pow_rational(base: &BigRational, exp: u64) -> BigRational {
    let mut acc = BigRational::one();
    let mut b = base.clone();
    let mut e = exp;
    while e > 0 {
        if e & 1 == 1 {
            acc *= &b;
        }
        b = &b * &b;
        e >>= 1;
    }
    acc
}

/// Depth-first walk over all histories, carrying the integer numerator
/// product of the measure. One multiplication per tree node.
fn dfs_exact(
    numerators: &[BigInt],
    remaining: u32,
    counts: &mut [u64],
    prod: &BigInt,
    leaf: &mut impl FnMut(&[u64], &BigInt),
) {
    if remaining == 0 {
        leaf(counts, prod);
        return;
    }
    for (a, p) in numerators.iter().enumerate() {
        if p.is_zero() {
            continue; // zero-weight branches contribute nothing
        }
        counts[a] += 1;
        let next = prod * p;
        dfs_exact(numerators, remaining - 1, counts, &next, leaf);
        counts[a] -= 1;
    }
}

fn dfs_float(
    weights: &[f64],
    remaining: u32,
    counts: &mut [u64],
    prod: f64,
    leaf: &mut impl FnMut(&[u64], f64),
) {
    if remaining == 0 {
        leaf(counts, prod);
        return;
    }
    for (a, &w) in weights.iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        counts[a] += 1;
        dfs_float(weights, remaining - 1, counts, prod * w, leaf);
        counts[a] -= 1;
    }
}

/// Compensated (Kahan) summation for the float history sums.
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct Kahan {
    sum: f64,
    carry: f64,
}

impl Kahan {
    pub fn add(&mut self, x: f64) {
        let y = x - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weight::big_ratio;

    fn sym(s: &str) -> Symbol {
        Symbol::new(s)
    }

    fn spec_thirds() -> SystemSpec {
        SystemSpec::from_rationals(vec![
            (sym("↑"), big_ratio(1, 3)),
            (sym("↓"), big_ratio(2, 3)),
        ])
        .unwrap()
    }

    fn spec_halves() -> SystemSpec {
        SystemSpec::from_rationals(vec![
            (sym("↑"), big_ratio(1, 2)),
            (sym("↓"), big_ratio(1, 2)),
        ])
        .unwrap()
    }

    #[test]
    fn spec_validation() {
        assert_eq!(
            SystemSpec::from_rationals(vec![
                (sym("a"), big_ratio(1, 2)),
                (sym("b"), big_ratio(1, 3)),
            ])
            .unwrap_err(),
            Error::WeightsNotNormalized
        );
        assert_eq!(
            SystemSpec::from_rationals(vec![
                (sym("a"), big_ratio(1, 2)),
                (sym("a"), big_ratio(1, 2)),
            ])
            .unwrap_err(),
            Error::DuplicateOutcome
        );
    }

    #[test]
    fn history_measure_and_counts() {
        let h = History::from_strs(&["↑", "↓", "↑"]).unwrap();
        let stats = history_state(&spec_halves(), &h).unwrap();
        assert_eq!(stats.measure, Weight::ratio(1, 8));
        assert_eq!(stats.counts, vec![2, 1]);

        // deterministic system
        let det = SystemSpec::from_rationals(vec![
            (sym("↑"), big_ratio(1, 1)),
            (sym("↓"), big_ratio(0, 1)),
        ])
        .unwrap();
        let h2 = History::from_strs(&["↑", "↑"]).unwrap();
        assert!(history_state(&det, &h2).unwrap().measure.is_one());

        // exact rational product
        let h3 = History::from_strs(&["↓", "↓"]).unwrap();
        assert_eq!(
            history_state(&spec_thirds(), &h3).unwrap().measure,
            Weight::ratio(4, 9)
        );

        // unknown symbols are rejected
        let h4 = History::from_strs(&["↑", "x"]).unwrap();
        assert!(matches!(
            history_state(&spec_halves(), &h4).unwrap_err(),
            Error::UnknownSymbol(_)
        ));
    }

    #[test]
    fn eigenvalue_is_the_relative_count() {
        let h = History::from_strs(&["↑", "↓", "↑", "↑"]).unwrap();
        assert_eq!(frequency_eigenvalue(&h, &sym("↑")), big_ratio(3, 4));
        let all_down = History::from_strs(&["↓", "↓"]).unwrap();
        assert!(frequency_eigenvalue(&all_down, &sym("↑")).is_zero());
        // partition over the alphabet
        let total = frequency_eigenvalue(&h, &sym("↑")) + frequency_eigenvalue(&h, &sym("↓"));
        assert!(total.is_one());
    }

    #[test]
    fn eigenvalue_law_matches_branchwise_projector_average() {
        // averaging the per-position projector indicators in exact rational
        // arithmetic reproduces the eigenvalue for every history
        let histories = [
            vec!["↑"],
            vec!["↑", "↓", "↑", "↑", "↓"],
            vec!["↓", "↓", "↓"],
            vec!["↑", "↓", "↑", "↓", "↑", "↓", "↑"],
        ];
        for names in &histories {
            let h = History::from_strs(names).unwrap();
            for alpha in [sym("↑"), sym("↓")] {
                let n = BigInt::from(h.len());
                let mut branchwise = BigRational::zero();
                for outcome in h.iter() {
                    if *outcome == alpha {
                        branchwise += BigRational::new(BigInt::one(), n.clone());
                    }
                }
                assert_eq!(branchwise, frequency_eigenvalue(&h, &alpha));
            }
        }
    }

    #[test]
    fn expectation_reproduces_the_weight_exactly() {
        // 32 histories summed by hand equal 1/3
        let e = frequency_expectation(&spec_thirds(), 5, &sym("↑"), ExpectationMethod::default())
            .unwrap();
        assert_eq!(e, Weight::ratio(1, 3));

        // deterministic spec
        let det = SystemSpec::from_rationals(vec![
            (sym("↑"), big_ratio(1, 1)),
            (sym("↓"), big_ratio(0, 1)),
        ])
        .unwrap();
        for n in [1u32, 3, 7] {
            let e = frequency_expectation(&det, n, &sym("↑"), ExpectationMethod::default())
                .unwrap();
            assert!(e.is_one());
        }

        // three outcomes, 729 histories
        let spec3 = SystemSpec::from_rationals(vec![
            (sym("a"), big_ratio(1, 4)),
            (sym("b"), big_ratio(1, 4)),
            (sym("c"), big_ratio(1, 2)),
        ])
        .unwrap();
        let e3 = frequency_expectation(&spec3, 6, &sym("c"), ExpectationMethod::default())
            .unwrap();
        assert_eq!(e3, Weight::ratio(1, 2));
    }

    #[test]
    fn expectation_float_path_matches_within_tolerance() {
        let spec = SystemSpec::from_floats(vec![(sym("↑"), 1.0 / 3.0), (sym("↓"), 2.0 / 3.0)])
            .unwrap();
        let e = frequency_expectation(&spec, 9, &sym("↑"), ExpectationMethod::default()).unwrap();
        assert!((e.to_f64() - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn expectation_cap_and_closed_form() {
        let err =
            frequency_expectation(&spec_halves(), 25, &sym("↑"), ExpectationMethod::default())
                .unwrap_err();
        assert!(matches!(err, Error::EnumerationCap { .. }));
        let e = frequency_expectation(&spec_halves(), 25, &sym("↑"), ExpectationMethod::ClosedForm)
            .unwrap();
        assert_eq!(e, Weight::ratio(1, 2));
    }

    #[test]
    fn maverick_small_n_exact() {
        // N=4, ε=0.3: only the all-↑ and all-↓ histories violate → 2/16
        let m = maverick_measure(&spec_halves(), 4, &sym("↑"), 0.3).unwrap();
        assert_eq!(m, Weight::ratio(1, 8));
    }

    #[test]
    fn maverick_epsilon_one_is_zero() {
        let m = maverick_measure(&spec_halves(), 10, &sym("↑"), 1.0).unwrap();
        assert!(m.is_zero());
        assert!(maverick_measure(&spec_halves(), 10, &sym("↑"), 0.0).is_err());
        assert!(maverick_measure(&spec_halves(), 10, &sym("↑"), -0.5).is_err());
    }

    #[test]
    fn maverick_tail_matches_brute_force() {
        // cross-check the binomial-tail route against full enumeration at a
        // size where both run (force the tail route via a tiny test spec).
        let spec = spec_thirds();
        let n = 10u64;
        let eps = 0.2;
        let enumerated = maverick_measure(&spec, n, &sym("↑"), eps).unwrap();

        // independent binomial tail: Σ_{|j/10 − 1/3| > 0.2} C(10,j)(1/3)^j(2/3)^(10−j)
        let mut tail = BigRational::zero();
        for j in 0..=n {
            if (j as f64 / n as f64 - 1.0 / 3.0).abs() > eps {
                let c = BigRational::from_integer(BigInt::from(comb::binomial(n, j)));
                let term = c * pow_rational(&big_ratio(1, 3), j) * pow_rational(&big_ratio(2, 3), n - j);
                tail += term;
            }
        }
        assert_eq!(enumerated, Weight::Exact(tail));
    }

    #[test]
    fn maverick_and_complement_partition_the_measure() {
        // violating and complying histories together carry measure 1,
        // exactly on the rational path
        for (spec, n, eps) in [
            (spec_halves(), 8u64, 0.2),
            (spec_thirds(), 9, 0.15),
            (spec_thirds(), 1000, 0.05),
        ] {
            let maverick = maverick_measure(&spec, n, &sym("↑"), eps).unwrap();
            let complement = complying_measure(&spec, n, eps);
            assert!(maverick.add(&complement).is_one(), "n = {n}");
        }
    }

    /// Test-side oracle: exact binomial mass of the non-violating counts.
    fn complying_measure(spec: &SystemSpec, n: u64, eps: f64) -> Weight {
        let w = spec.weight(0).as_exact().unwrap().clone();
        let q = BigRational::one() - &w;
        let eps = crate::weight::rational_from_f64(eps).unwrap();
        let mut total = BigRational::zero();
        for j in 0..=n {
            let f = BigRational::new(BigInt::from(j), BigInt::from(n));
            if (f - &w).abs() <= eps {
                let c = BigRational::from_integer(BigInt::from(comb::binomial(n, j)));
                total += c * pow_rational(&w, j) * pow_rational(&q, n - j);
            }
        }
        Weight::Exact(total)
    }

    #[test]
    fn typicality_error_values() {
        let e = typicality_error(&spec_halves(), 100, &sym("↑")).unwrap();
        assert!((e - 0.1).abs() < 1e-15);

        let e = typicality_error(&spec_thirds(), 100, &sym("↑")).unwrap();
        assert!((e - 0.1 * 2f64.sqrt()).abs() < 1e-15);

        // quadrupling N halves the error
        let e1 = typicality_error(&spec_thirds(), 50, &sym("↓")).unwrap();
        let e2 = typicality_error(&spec_thirds(), 200, &sym("↓")).unwrap();
        assert!((e1 / e2 - 2.0).abs() < 1e-12);

        let det = SystemSpec::from_rationals(vec![
            (sym("↑"), big_ratio(1, 1)),
            (sym("↓"), big_ratio(0, 1)),
        ])
        .unwrap();
        assert_eq!(
            typicality_error(&det, 10, &sym("↓")).unwrap_err(),
            Error::DegenerateOutcome
        );
    }

    #[test]
    fn value_function_is_the_expectation() {
        let v = value_function(&[0.0, 1.0], &spec_thirds()).unwrap();
        assert!((v - 2.0 / 3.0).abs() < 1e-15);

        let c = value_function(&[2.5, 2.5], &spec_thirds()).unwrap();
        assert!((c - 2.5).abs() < 1e-15);

        // permuting outcomes and payoffs together changes nothing
        let flipped = SystemSpec::from_rationals(vec![
            (sym("↓"), big_ratio(2, 3)),
            (sym("↑"), big_ratio(1, 3)),
        ])
        .unwrap();
        let v2 = value_function(&[1.0, 0.0], &flipped).unwrap();
        assert!((v - v2).abs() < 1e-15);

        assert_eq!(
            value_function(&[1.0], &spec_thirds()).unwrap_err(),
            Error::LengthMismatch
        );
    }
}
