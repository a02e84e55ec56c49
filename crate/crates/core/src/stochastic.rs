//! The stochastic many-minds model: each of N minds is independently
//! driven into one outcome branch with the Born weight as its probability.
//! Exact binomial/multinomial distributions, the mindless-hulk probability,
//! fluctuation scaling, and the N ~ 2^M inter-observer bound.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use rayon::prelude::*;

use crate::comb;
use crate::error::{Error, Result};
use crate::frequency::{history_state, History, SystemSpec};
use crate::label::Symbol;
use crate::rng::SeededRng;
use crate::weight::Weight;

/// Per-outcome counts of minds, `Σ_α N_α = N`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MindTally {
    counts: Vec<u64>,
}

impl MindTally {
    pub fn new(counts: Vec<u64>) -> Self {
        MindTally { counts }
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn count(&self, index: usize) -> u64 {
        self.counts[index]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn fraction(&self, index: usize) -> f64 {
        self.counts[index] as f64 / self.total() as f64
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }
}

/// Assigns each of `minds` minds to an outcome branch, independently with
/// the system weights, and returns the per-branch counts.
pub fn sample_minds(spec: &SystemSpec, minds: u64, rng: &mut impl Rng) -> MindTally {
    let thresholds = cumulative(&spec.weights_f64());
    let mut counts = vec![0u64; spec.len()];
    for _ in 0..minds {
        counts[pick(&thresholds, rng.gen::<f64>())] += 1;
    }
    MindTally::new(counts)
}

/// The per-mind outcome indices of one stochastic move — the resolved
/// alternative itself rather than its census.
pub fn sample_mind_assignments(spec: &SystemSpec, minds: u64, rng: &mut impl Rng) -> Vec<usize> {
    let thresholds = cumulative(&spec.weights_f64());
    (0..minds)
        .map(|_| pick(&thresholds, rng.gen::<f64>()))
        .collect()
}

/// Runs `trials` independent tallies on derived streams
/// `master.stream(stream_offset + t)`; scheduling never affects the result.
pub fn sample_minds_batch(
    spec: &SystemSpec,
    minds: u64,
    trials: u64,
    seeds: &SeededRng,
    stream_offset: u64,
) -> Vec<MindTally> {
    (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = seeds.stream(stream_offset + t);
            sample_minds(spec, minds, &mut rng)
        })
        .collect()
}

fn cumulative(weights: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    weights
        .iter()
        .map(|w| {
            acc += w;
            acc
        })
        .collect()
}

fn pick(thresholds: &[f64], u: f64) -> usize {
    for (i, &t) in thresholds.iter().enumerate() {
        if u < t {
            return i;
        }
    }
    thresholds.len() - 1
}

/// The multinomial pmf `N!/Π N_α! · Π w_α^{N_α}`, exact for exact weights.
pub fn tally_pmf(spec: &SystemSpec, minds: u64, tally: &MindTally) -> Result<Weight> {
    if tally.len() != spec.len() || tally.total() != minds {
        return Err(Error::InconsistentTally);
    }
    let coeff = comb::multinomial(tally.counts());
    if spec.is_exact() {
        let mut p = BigRational::from_integer(BigInt::from(coeff));
        for (i, &c) in tally.counts().iter().enumerate() {
            if c > 0 {
                let w = spec.weight(i).as_exact().expect("exact spec");
                if w.is_zero() {
                    return Ok(Weight::zero());
                }
                p *= pow_rational(w, c);
            }
        }
        Ok(Weight::Exact(p))
    } else {
        let mut ln_p = ln_biguint(&coeff);
        for (i, &c) in tally.counts().iter().enumerate() {
            if c > 0 {
                let w = spec.weight(i).to_f64();
                if w == 0.0 {
                    return Ok(Weight::Float(0.0));
                }
                ln_p += c as f64 * w.ln();
            }
        }
        Ok(Weight::Float(ln_p.exp()))
    }
}

/// A pmf-maximizing tally; ties break toward the lexicographically
/// smallest counts vector. Enumerates the whole tally simplex, so the
/// simplex size `C(N+k−1, k−1)` is capped.
pub fn mode_tally(spec: &SystemSpec, minds: u64) -> Result<MindTally> {
    const SIMPLEX_CAP: u64 = 1 << 22;
    if minds == 0 {
        return Err(Error::InconsistentTally);
    }
    let size = simplex_size(minds, spec.len());
    if size > SIMPLEX_CAP as u128 {
        return Err(Error::EnumerationCap {
            required: size,
            cap: SIMPLEX_CAP,
        });
    }
    let mut best: Option<(MindTally, Weight)> = None;
    let mut current = vec![0u64; spec.len()];
    for_each_composition(minds, spec.len(), &mut current, 0, &mut |counts| {
        let tally = MindTally::new(counts.to_vec());
        let p = tally_pmf(spec, minds, &tally).expect("consistent by construction");
        let better = match &best {
            None => true,
            Some((_, best_p)) => greater(&p, best_p),
        };
        if better {
            best = Some((tally, p));
        }
    });
    Ok(best.expect("simplex is non-empty").0)
}

fn greater(a: &Weight, b: &Weight) -> bool {
    match (a.as_exact(), b.as_exact()) {
        (Some(x), Some(y)) => x > y,
        _ => a.to_f64() > b.to_f64(),
    }
}

fn simplex_size(n: u64, k: usize) -> u128 {
    comb::binomial(n + k as u64 - 1, k as u64 - 1)
        .to_u128()
        .unwrap_or(u128::MAX)
}

/// Visits compositions of `n` into `k` parts in lexicographic order.
fn for_each_composition(
    n: u64,
    k: usize,
    current: &mut Vec<u64>,
    index: usize,
    visit: &mut impl FnMut(&[u64]),
) {
    if index == k - 1 {
        current[index] = n;
        visit(current);
        return;
    }
    for c in 0..=n {
        current[index] = c;
        for_each_composition(n - c, k, current, index + 1, visit);
    }
}

/// Probability that branch `alpha` ends with zero minds: `(1−w_α)^N`.
pub fn hulk_probability(spec: &SystemSpec, minds: u64, alpha: &Symbol) -> Result<Weight> {
    let idx = spec.index_of(alpha)?;
    let one = Weight::one();
    Ok(one.sub(spec.weight(idx)).pow(minds))
}

/// Relative fluctuation of the branch population,
/// `ΔN_α/Ñ_α = (1/√N)·√((1−w_α)/w_α)`.
pub fn relative_fluctuation(spec: &SystemSpec, minds: u64, alpha: &Symbol) -> Result<f64> {
    if minds == 0 {
        return Err(Error::InconsistentTally);
    }
    let w = spec.weight(spec.index_of(alpha)?).to_f64();
    if w <= 0.0 {
        return Err(Error::DegenerateOutcome);
    }
    Ok(((1.0 - w) / w).sqrt() / (minds as f64).sqrt())
}

/// Minimum mind count for the expected number of minds recording history
/// `h` to reach one: `ceil(1/P_h)` with `P_h = Π_α w_α^{M_α(h)}`.
pub fn history_support_bound(spec: &SystemSpec, h: &History) -> Result<BigUint> {
    let stats = history_state(spec, h)?;
    match &stats.measure {
        Weight::Exact(p) => {
            if p.is_zero() {
                return Err(Error::ImpossibleHistory);
            }
            let r = p.recip();
            Ok(r.ceil().numer().magnitude().clone())
        }
        Weight::Float(p) => {
            use num_traits::FromPrimitive;
            if *p <= 0.0 {
                return Err(Error::ImpossibleHistory);
            }
            BigUint::from_f64((1.0 / p).ceil()).ok_or(Error::ImpossibleHistory)
        }
    }
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

fn ln_biguint(x: &BigUint) -> f64 {
    // ln via bit-length split so huge coefficients do not overflow f64
    let bits = x.bits();
    if bits <= 52 {
        return x.to_f64().unwrap_or(1.0).ln();
    }
    let shift = bits - 52;
    let top = (x >> shift).to_f64().unwrap_or(1.0);
    top.ln() + shift as f64 * std::f64::consts::LN_2
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

    #[test]
    fn single_mind_matches_the_first_alternative_probability() {
        // fraction of 10^5 seeded trials assigning the one mind to ↑
        let spec = spec_thirds();
        let seeds = SeededRng::new(11);
        let tallies = sample_minds_batch(&spec, 1, 100_000, &seeds, 0);
        let ups: u64 = tallies.iter().map(|t| t.count(0)).sum();
        let f = ups as f64 / 100_000.0;
        assert!((f - 1.0 / 3.0).abs() < 0.01, "f = {f}");
    }

    #[test]
    fn deterministic_weight_sends_every_mind_up() {
        let spec = SystemSpec::from_rationals(vec![
            (sym("↑"), big_ratio(1, 1)),
            (sym("↓"), big_ratio(0, 1)),
        ])
        .unwrap();
        let mut rng = SeededRng::new(3).stream(0);
        let tally = sample_minds(&spec, 64, &mut rng);
        assert_eq!(tally.counts(), &[64, 0]);
    }

    #[test]
    fn two_mind_alternatives_follow_the_four_probabilities() {
        // (N↑,N↓) ∈ {(2,0),(1,1),(0,2)} with probabilities 1/9, 4/9, 4/9;
        // the (1,1) bucket combines the two ordered alternatives of 2/9 each.
        let spec = spec_thirds();
        let seeds = SeededRng::new(29);
        let trials = 100_000u64;
        let tallies = sample_minds_batch(&spec, 2, trials, &seeds, 0);
        let mut observed = [0u64; 3];
        for t in &tallies {
            observed[t.count(1) as usize] += 1;
        }
        let expected = [
            trials as f64 / 9.0,
            4.0 * trials as f64 / 9.0,
            4.0 * trials as f64 / 9.0,
        ];
        let chi2: f64 = observed
            .iter()
            .zip(&expected)
            .map(|(&o, &e)| (o as f64 - e).powi(2) / e)
            .sum();
        let p = chi_square_p(chi2, 2.0);
        assert!(p > 0.001, "chi2 = {chi2}, p = {p}");
    }

    pub(super) fn chi_square_p(stat: f64, dof: f64) -> f64 {
        use statrs::distribution::{ChiSquared, ContinuousCDF};
        1.0 - ChiSquared::new(dof).unwrap().cdf(stat)
    }

    #[test]
    fn pmf_values_from_the_two_mind_display() {
        let spec = spec_thirds();
        let p02 = tally_pmf(&spec, 2, &MindTally::new(vec![0, 2])).unwrap();
        assert_eq!(p02, Weight::ratio(4, 9));
        // (1,1) combines the two ordered 2/9 alternatives
        let p11 = tally_pmf(&spec, 2, &MindTally::new(vec![1, 1])).unwrap();
        assert_eq!(p11, Weight::ratio(4, 9));
        let p20 = tally_pmf(&spec, 2, &MindTally::new(vec![2, 0])).unwrap();
        assert_eq!(p20, Weight::ratio(1, 9));

        assert!(tally_pmf(&spec, 3, &MindTally::new(vec![1, 1])).is_err());
    }

    #[test]
    fn pmf_sums_to_one_over_the_simplex() {
        let spec = SystemSpec::from_rationals(vec![
            (sym("a"), big_ratio(1, 6)),
            (sym("b"), big_ratio(1, 3)),
            (sym("c"), big_ratio(1, 2)),
        ])
        .unwrap();
        for n in [1u64, 2, 7, 20, 50] {
            let mut total = Weight::zero();
            let mut current = vec![0u64; 3];
            for_each_composition(n, 3, &mut current, 0, &mut |counts| {
                let t = MindTally::new(counts.to_vec());
                total = total.add(&tally_pmf(&spec, n, &t).unwrap());
            });
            assert!(total.is_one(), "n = {n}");
        }
    }

    #[test]
    fn mode_maximizes_the_pmf() {
        let spec = spec_thirds();
        assert_eq!(mode_tally(&spec, 3).unwrap().counts(), &[1, 2]);
        assert_eq!(mode_tally(&spec, 300).unwrap().counts(), &[100, 200]);

        let det = SystemSpec::from_rationals(vec![
            (sym("↑"), big_ratio(1, 1)),
            (sym("↓"), big_ratio(0, 1)),
        ])
        .unwrap();
        assert_eq!(mode_tally(&det, 17).unwrap().counts(), &[17, 0]);
    }

    #[test]
    fn hulk_probability_values() {
        let spec = spec_thirds();
        assert_eq!(
            hulk_probability(&spec, 2, &sym("↑")).unwrap(),
            Weight::ratio(4, 9)
        );
        let det = SystemSpec::from_rationals(vec![
            (sym("↑"), big_ratio(1, 1)),
            (sym("↓"), big_ratio(0, 1)),
        ])
        .unwrap();
        assert!(hulk_probability(&det, 5, &sym("↑")).unwrap().is_zero());

        let tiny = hulk_probability(&spec, 50, &sym("↑")).unwrap();
        assert_eq!(tiny, Weight::ratio(2, 3).pow(50));
        assert!((tiny.to_f64() - 1.57e-9).abs() < 0.02e-9);
    }

    #[test]
    fn hulk_probability_is_the_zero_count_marginal() {
        // (1−w)^N equals the marginal P(N_α = 0) of the multinomial exactly
        let spec = SystemSpec::from_rationals(vec![
            (sym("a"), big_ratio(1, 6)),
            (sym("b"), big_ratio(1, 3)),
            (sym("c"), big_ratio(1, 2)),
        ])
        .unwrap();
        let n = 9u64;
        let hulk = hulk_probability(&spec, n, &sym("b")).unwrap();
        let mut marginal = Weight::zero();
        let mut current = vec![0u64; 3];
        for_each_composition(n, 3, &mut current, 0, &mut |counts| {
            if counts[1] == 0 {
                let t = MindTally::new(counts.to_vec());
                marginal = marginal.add(&tally_pmf(&spec, n, &t).unwrap());
            }
        });
        assert_eq!(hulk, marginal);
    }

    #[test]
    fn fluctuation_formula_and_scaling() {
        let half = SystemSpec::from_rationals(vec![
            (sym("↑"), big_ratio(1, 2)),
            (sym("↓"), big_ratio(1, 2)),
        ])
        .unwrap();
        assert!((relative_fluctuation(&half, 100, &sym("↑")).unwrap() - 0.1).abs() < 1e-15);

        let thirds = spec_thirds();
        let f = relative_fluctuation(&thirds, 100, &sym("↑")).unwrap();
        assert!((f - 0.1 * 2f64.sqrt()).abs() < 1e-15);

        let f1 = relative_fluctuation(&thirds, 200, &sym("↑")).unwrap();
        let f2 = relative_fluctuation(&thirds, 800, &sym("↑")).unwrap();
        assert!((f1 / f2 - 2.0).abs() < 1e-12);
    }

    #[test]
    fn support_bound_values() {
        let half = SystemSpec::from_rationals(vec![
            (sym("↑"), big_ratio(1, 2)),
            (sym("↓"), big_ratio(1, 2)),
        ])
        .unwrap();
        let h = History::new(vec![sym("↑"); 10]).unwrap();
        assert_eq!(history_support_bound(&half, &h).unwrap(), BigUint::from(1024u32));

        let det = SystemSpec::from_rationals(vec![
            (sym("↑"), big_ratio(1, 1)),
            (sym("↓"), big_ratio(0, 1)),
        ])
        .unwrap();
        let h_up = History::from_strs(&["↑", "↑", "↑"]).unwrap();
        assert_eq!(history_support_bound(&det, &h_up).unwrap(), BigUint::one());

        let h_down = History::from_strs(&["↓"]).unwrap();
        assert_eq!(
            history_support_bound(&det, &h_down).unwrap_err(),
            Error::ImpossibleHistory
        );

        // ceil(9/4) = 3 for the ↓↓ history at weights (⅓,⅔)
        let h2 = History::from_strs(&["↓", "↓"]).unwrap();
        assert_eq!(
            history_support_bound(&spec_thirds(), &h2).unwrap(),
            BigUint::from(3u32)
        );
    }
}
