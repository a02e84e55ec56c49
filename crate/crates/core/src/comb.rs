//! Exact combinatorics used by the pmf and tail-sum computations.

use num_bigint::BigUint;
use num_traits::{One, Zero};

/// `n!` as a big integer.
pub fn factorial(n: u64) -> BigUint {
    let mut acc = BigUint::one();
    for i in 2..=n {
        acc *= i;
    }
    acc
}

/// Binomial coefficient `C(n, k)` via the multiplicative formula.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Multinomial coefficient `(Σcounts)! / Π counts_i!`.
pub fn multinomial(counts: &[u64]) -> BigUint {
    let mut acc = BigUint::one();
    let mut seen = 0u64;
    for &c in counts {
        seen += c;
        acc *= binomial(seen, c);
    }
    acc
}

/// `ln n!` by direct summation; adequate for the float pmf path.
pub fn ln_factorial(n: u64) -> f64 {
    (2..=n).map(|i| (i as f64).ln()).sum()
}

/// `ln C(n, k)`.
pub fn ln_binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}
