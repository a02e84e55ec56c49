//! Complex amplitudes with an exact-valued fast path.
//!
//! Every amplitude the toy models produce is of the form `±√(p/q)`, so the
//! exact variant stores the squared magnitude as a rational plus a sign.
//! Sums that leave that form (the cross term `√(m₁m₂)` is irrational) and
//! multiplications by non-real phases demote to ordinary `Complex64`.

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::weight::{big_ratio_to_f64, exact_sqrt, Weight};

#[derive(Clone, Debug)]
pub enum Amplitude {
    /// `sign · √mag2` with `mag2 ≥ 0` exact.
    Exact { mag2: BigRational, negative: bool },
    Float(Complex64),
}

impl Amplitude {
    pub fn zero() -> Self {
        Amplitude::Exact {
            mag2: BigRational::zero(),
            negative: false,
        }
    }

    pub fn one() -> Self {
        Amplitude::Exact {
            mag2: BigRational::from_integer(1.into()),
            negative: false,
        }
    }

    /// `√r` for a non-negative rational, kept exact.
    pub fn sqrt_ratio(r: BigRational) -> Self {
        debug_assert!(!r.is_negative());
        Amplitude::Exact {
            mag2: r,
            negative: false,
        }
    }

    /// `√w`: exact weights stay exact, floats take the float path.
    pub fn sqrt_weight(w: &Weight) -> Self {
        match w {
            Weight::Exact(r) => Amplitude::sqrt_ratio(r.clone()),
            Weight::Float(x) => Amplitude::Float(Complex64::new(x.sqrt(), 0.0)),
        }
    }

    pub fn from_re(x: f64) -> Self {
        Amplitude::Float(Complex64::new(x, 0.0))
    }

    pub fn from_complex(z: Complex64) -> Self {
        Amplitude::Float(z)
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Amplitude::Exact { .. })
    }

    pub fn conj(&self) -> Amplitude {
        match self {
            Amplitude::Exact { .. } => self.clone(),
            Amplitude::Float(z) => Amplitude::Float(z.conj()),
        }
    }

    pub fn neg(&self) -> Amplitude {
        match self {
            Amplitude::Exact { mag2, negative } => Amplitude::Exact {
                mag2: mag2.clone(),
                negative: !negative && !mag2.is_zero(),
            },
            Amplitude::Float(z) => Amplitude::Float(-z),
        }
    }

    pub fn mul(&self, rhs: &Amplitude) -> Amplitude {
        match (self, rhs) {
            (
                Amplitude::Exact { mag2: m1, negative: s1 },
                Amplitude::Exact { mag2: m2, negative: s2 },
            ) => {
                let mag2 = m1 * m2;
                let negative = (s1 != s2) && !mag2.is_zero();
                Amplitude::Exact { mag2, negative }
            }
            _ => Amplitude::Float(self.to_complex() * rhs.to_complex()),
        }
    }

    /// Sum, staying exact whenever `√(m₁·m₂)` is rational (this covers all
    /// merges of equal-magnitude branches and all `⟨s|s⟩` accumulations).
    pub fn add(&self, rhs: &Amplitude) -> Amplitude {
        match (self, rhs) {
            (
                Amplitude::Exact { mag2: m1, negative: s1 },
                Amplitude::Exact { mag2: m2, negative: s2 },
            ) => {
                if m1.is_zero() {
                    return rhs.clone();
                }
                if m2.is_zero() {
                    return self.clone();
                }
                match exact_sqrt(&(m1 * m2)) {
                    Some(root) => {
                        let cross = root * BigRational::from_integer(2.into());
                        let same_sign = s1 == s2;
                        let mag2 = if same_sign {
                            m1 + m2 + cross
                        } else {
                            m1 + m2 - cross
                        };
                        if mag2.is_zero() {
                            return Amplitude::zero();
                        }
                        // on a sign clash the larger magnitude wins
                        let negative = if same_sign || m1 > m2 { *s1 } else { *s2 };
                        Amplitude::Exact { mag2, negative }
                    }
                    None => Amplitude::Float(self.to_complex() + rhs.to_complex()),
                }
            }
            _ => Amplitude::Float(self.to_complex() + rhs.to_complex()),
        }
    }

    /// `|a|²` as a weight (exact for exact amplitudes).
    pub fn norm_sqr(&self) -> Weight {
        match self {
            Amplitude::Exact { mag2, .. } => Weight::Exact(mag2.clone()),
            Amplitude::Float(z) => Weight::Float(z.norm_sqr()),
        }
    }

    pub fn to_complex(&self) -> Complex64 {
        match self {
            Amplitude::Exact { mag2, negative } => {
                let m = big_ratio_to_f64(mag2).sqrt();
                Complex64::new(if *negative { -m } else { m }, 0.0)
            }
            Amplitude::Float(z) => *z,
        }
    }

    pub fn abs(&self) -> f64 {
        match self {
            Amplitude::Exact { mag2, .. } => big_ratio_to_f64(mag2).sqrt(),
            Amplitude::Float(z) => z.norm(),
        }
    }

    pub fn is_finite(&self) -> bool {
        match self {
            Amplitude::Exact { .. } => true,
            Amplitude::Float(z) => z.re.is_finite() && z.im.is_finite(),
        }
    }

    /// Multiplies by a unit phase; `±1` keeps exactness.
    pub fn mul_phase(&self, phase: Complex64) -> Amplitude {
        if phase == Complex64::new(1.0, 0.0) {
            self.clone()
        } else if phase == Complex64::new(-1.0, 0.0) {
            self.neg()
        } else {
            Amplitude::Float(self.to_complex() * phase)
        }
    }

    pub fn approx_eq(&self, rhs: &Amplitude, tol: f64) -> bool {
        match (self, rhs) {
            (
                Amplitude::Exact { mag2: m1, negative: s1 },
                Amplitude::Exact { mag2: m2, negative: s2 },
            ) => m1 == m2 && (s1 == s2 || m1.is_zero()),
            _ => (self.to_complex() - rhs.to_complex()).norm() <= tol,
        }
    }
}

impl std::fmt::Display for Amplitude {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Amplitude::Exact { mag2, negative } => {
                let sign = if *negative { "-" } else { "" };
                match exact_sqrt(mag2) {
                    Some(root) if root.denom() == &1.into() => write!(f, "{sign}{}", root.numer()),
                    _ => write!(f, "{sign}√({})", Weight::Exact(mag2.clone())),
                }
            }
            Amplitude::Float(z) => {
                if z.im == 0.0 {
                    write!(f, "{}", z.re)
                } else {
                    write!(f, "{}+{}i", z.re, z.im)
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weight::big_ratio;

    #[test]
    fn exact_products_and_sums() {
        let a = Amplitude::sqrt_ratio(big_ratio(1, 3));
        let b = Amplitude::sqrt_ratio(big_ratio(2, 3));
        // √⅓·√⅔ = √(2/9), and doubling it stays exact: (2√(2/9))² = 8/9
        let prod = a.mul(&b);
        let doubled = prod.add(&prod);
        assert_eq!(doubled.norm_sqr(), Weight::ratio(8, 9));
    }

    #[test]
    fn opposite_signs_cancel() {
        let a = Amplitude::sqrt_ratio(big_ratio(1, 2));
        let sum = a.add(&a.neg());
        assert!(sum.norm_sqr().is_zero());
    }

    #[test]
    fn irrational_cross_term_demotes_to_float() {
        let a = Amplitude::sqrt_ratio(big_ratio(1, 3));
        let b = Amplitude::sqrt_ratio(big_ratio(1, 2));
        let sum = a.add(&b);
        assert!(!sum.is_exact());
        let expect = (1f64 / 3.0).sqrt() + 0.5f64.sqrt();
        assert!((sum.to_complex().re - expect).abs() < 1e-15);
    }

    #[test]
    fn unequal_magnitude_difference_keeps_sign_of_larger() {
        // √(9/4) − √(1/4) = 3/2 − 1/2 = 1
        let a = Amplitude::sqrt_ratio(big_ratio(9, 4));
        let b = Amplitude::sqrt_ratio(big_ratio(1, 4)).neg();
        let sum = a.add(&b);
        assert_eq!(sum.norm_sqr(), Weight::one());
        assert!((sum.to_complex().re - 1.0).abs() < 1e-15);

        // and the mirrored difference is −1
        let diff = a.neg().add(&b.neg());
        assert!((diff.to_complex().re + 1.0).abs() < 1e-15);
    }

    #[test]
    fn phase_handling() {
        let a = Amplitude::sqrt_ratio(big_ratio(1, 2));
        assert!(a.mul_phase(Complex64::new(1.0, 0.0)).is_exact());
        assert!(a.mul_phase(Complex64::new(-1.0, 0.0)).is_exact());
        let rotated = a.mul_phase(Complex64::new(0.0, 1.0));
        assert!(!rotated.is_exact());
        assert!((rotated.to_complex().im - 0.5f64.sqrt()).abs() < 1e-15);
    }
}
