//! Complex "clock-pointer" arithmetic shared by every experiment module.
//!
//! A [`Phasor`] is a complex value stored in Cartesian form. Unit-modulus
//! phasors represent the rotating pointer `e^{iφ}` that each path
//! contributes to an amplitude; general phasors carry intermediate sums
//! and products. Probabilities come from `|amplitude|²` divided by a
//! scenario normalization.
//!
//! Sums accumulate strictly in input order with Neumaier compensation, so
//! a fixed input sequence always produces the same bits and reordering
//! errors stay at a few ulps even for long, partially cancelling sums.

use std::f64::consts::TAU;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Result, SimError};

/// Slack allowed on `|amplitude|² / normalization` before the scenario is
/// declared mis-specified.
pub const PROBABILITY_SLACK: f64 = 1e-9;

/// A complex value `re + i·im`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Phasor {
    pub re: f64,
    pub im: f64,
}

impl Phasor {
    pub const ZERO: Phasor = Phasor { re: 0.0, im: 0.0 };
    pub const ONE: Phasor = Phasor { re: 1.0, im: 0.0 };
    /// The quarter-turn factor picked up on reflection.
    pub const I: Phasor = Phasor { re: 0.0, im: 1.0 };

    pub fn new(re: f64, im: f64) -> Self {
        Phasor { re, im }
    }

    /// Construct from modulus and phase.
    ///
    /// The modulus of the result matches `modulus` to within 1e-12 for any
    /// finite phase (cos² + sin² rounds to 1 at f64 precision).
    pub fn from_polar(modulus: f64, phase: f64) -> Self {
        Phasor {
            re: modulus * phase.cos(),
            im: modulus * phase.sin(),
        }
    }

    pub fn modulus_sq(self) -> f64 {
        self.re * self.re + self.im * self.im
    }

    pub fn modulus(self) -> f64 {
        self.modulus_sq().sqrt()
    }

    /// Phase in `[0, 2π)`.
    pub fn phase(self) -> f64 {
        let raw = self.im.atan2(self.re);
        if raw < 0.0 {
            raw + TAU
        } else {
            raw
        }
    }

    pub fn conj(self) -> Self {
        Phasor {
            re: self.re,
            im: -self.im,
        }
    }

    pub fn scale(self, k: f64) -> Self {
        Phasor {
            re: k * self.re,
            im: k * self.im,
        }
    }

    /// `i^k`, computed exactly from the quarter-turn table.
    pub fn i_pow(k: u32) -> Self {
        match k % 4 {
            0 => Phasor::ONE,
            1 => Phasor::I,
            2 => Phasor::new(-1.0, 0.0),
            _ => Phasor::new(0.0, -1.0),
        }
    }

    pub fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

impl Add for Phasor {
    type Output = Phasor;
    fn add(self, rhs: Phasor) -> Phasor {
        Phasor::new(self.re + rhs.re, self.im + rhs.im)
    }
}

impl Sub for Phasor {
    type Output = Phasor;
    fn sub(self, rhs: Phasor) -> Phasor {
        Phasor::new(self.re - rhs.re, self.im - rhs.im)
    }
}

impl Neg for Phasor {
    type Output = Phasor;
    fn neg(self) -> Phasor {
        Phasor::new(-self.re, -self.im)
    }
}

impl Mul for Phasor {
    type Output = Phasor;
    fn mul(self, rhs: Phasor) -> Phasor {
        Phasor::new(
            self.re * rhs.re - self.im * rhs.im,
            self.re * rhs.im + self.im * rhs.re,
        )
    }
}

/// The dimensionless phase accumulated along a path.
///
/// The full value is retained; [`ActionPhase::reduced`] folds it into
/// `[0, 2π)` for reporting and for building unit phasors without losing
/// precision to additions at large magnitude.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ActionPhase {
    radians: f64,
}

impl ActionPhase {
    pub fn new(radians: f64) -> Result<Self> {
        if !radians.is_finite() {
            return Err(SimError::NonFinite {
                what: "action phase",
                value: radians,
            });
        }
        Ok(ActionPhase { radians })
    }

    /// Full accumulated phase in radians.
    pub fn radians(self) -> f64 {
        self.radians
    }

    /// Phase folded into `[0, 2π)`.
    pub fn reduced(self) -> f64 {
        let r = self.radians.rem_euclid(TAU);
        // rem_euclid can land exactly on TAU after rounding near multiples.
        if r >= TAU {
            r - TAU
        } else {
            r
        }
    }
}

/// Unit phasor at the given phase.
pub fn phasor_from_phase(phase: f64) -> Result<Phasor> {
    if !phase.is_finite() {
        return Err(SimError::NonFinite {
            what: "phase",
            value: phase,
        });
    }
    Ok(Phasor::new(phase.cos(), phase.sin()))
}

/// Optical phase accumulated along a straight segment: `2π · length / wavelength`.
pub fn segment_phase(length: f64, wavelength: f64) -> Result<f64> {
    if !wavelength.is_finite() || wavelength <= 0.0 {
        return Err(SimError::InvalidWavelength(wavelength));
    }
    if !length.is_finite() {
        return Err(SimError::NonFinite {
            what: "segment length",
            value: length,
        });
    }
    if length < 0.0 {
        return Err(SimError::NegativeLength(length));
    }
    Ok(TAU * (length / wavelength))
}

/// Neumaier-compensated accumulator for phasor sums.
///
/// Additions happen strictly in call order; `value()` folds the
/// compensation in, so prefix values observed mid-sum agree exactly with
/// the final sum of the same sequence.
#[derive(Clone, Copy, Debug, Default)]
pub struct PhasorAccumulator {
    re_sum: f64,
    re_comp: f64,
    im_sum: f64,
    im_comp: f64,
}

fn neumaier_step(sum: f64, comp: &mut f64, x: f64) -> f64 {
    let t = sum + x;
    if sum.abs() >= x.abs() {
        *comp += (sum - t) + x;
    } else {
        *comp += (x - t) + sum;
    }
    t
}

impl PhasorAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, p: Phasor) {
        self.re_sum = neumaier_step(self.re_sum, &mut self.re_comp, p.re);
        self.im_sum = neumaier_step(self.im_sum, &mut self.im_comp, p.im);
    }

    pub fn value(&self) -> Phasor {
        Phasor::new(self.re_sum + self.re_comp, self.im_sum + self.im_comp)
    }
}

/// Component-wise sum of a phasor sequence, accumulated in input order.
///
/// An empty sequence sums to zero.
pub fn sum_phasors<I>(phasors: I) -> Phasor
where
    I: IntoIterator<Item = Phasor>,
{
    let mut acc = PhasorAccumulator::new();
    for p in phasors {
        acc.add(p);
    }
    acc.value()
}

/// Probability of the event with the given amplitude: `|amplitude|² / normalization`,
/// clamped to `[0, 1]`.
///
/// A ratio beyond `1 + `[`PROBABILITY_SLACK`] signals a mis-specified
/// scenario and is reported as an error rather than clamped.
pub fn probability(amplitude: Phasor, normalization: f64) -> Result<f64> {
    if !normalization.is_finite() || normalization <= 0.0 {
        return Err(SimError::InvalidNormalization(normalization));
    }
    if !amplitude.is_finite() {
        return Err(SimError::NonFinite {
            what: "amplitude modulus",
            value: amplitude.modulus_sq(),
        });
    }
    let ratio = amplitude.modulus_sq() / normalization;
    if ratio > 1.0 + PROBABILITY_SLACK {
        return Err(SimError::NormalizationExceeded {
            ratio,
            normalization,
            slack: PROBABILITY_SLACK,
        });
    }
    Ok(ratio.clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn unit_phasor_identity_cases() {
        let p = phasor_from_phase(0.0).unwrap();
        assert_eq!(p, Phasor::ONE);

        let p = phasor_from_phase(PI).unwrap();
        assert!((p.re + 1.0).abs() < 1e-15);
        assert!(p.im.abs() < 1e-15);

        // Quarter turn: the reflection factor i.
        let p = phasor_from_phase(FRAC_PI_2).unwrap();
        assert!(p.re.abs() < 1e-15);
        assert!((p.im - 1.0).abs() < 1e-15);
    }

    #[test]
    fn non_finite_phase_rejected() {
        assert!(phasor_from_phase(f64::NAN).is_err());
        assert!(phasor_from_phase(f64::INFINITY).is_err());
    }

    #[test]
    fn segment_phase_examples() {
        let lambda = 6.33e-7;
        assert_eq!(segment_phase(lambda, lambda).unwrap(), TAU);
        assert_eq!(segment_phase(0.0, lambda).unwrap(), 0.0);
        assert_eq!(segment_phase(lambda / 2.0, lambda).unwrap(), PI);
        assert!(segment_phase(1.0, 0.0).is_err());
        assert!(segment_phase(1.0, -1.0).is_err());
        assert!(segment_phase(-1.0, 1.0).is_err());
    }

    #[test]
    fn sum_cancellation_and_constructive() {
        let s = sum_phasors([Phasor::ONE, Phasor::new(-1.0, 0.0)]);
        assert_eq!(s, Phasor::ZERO);

        // Opposite quarter-turn pointers cancel.
        let s = sum_phasors([
            phasor_from_phase(FRAC_PI_2).unwrap(),
            phasor_from_phase(3.0 * FRAC_PI_2).unwrap(),
        ]);
        assert!(s.modulus() < 1e-12);

        let s = sum_phasors(std::iter::repeat_n(Phasor::ONE, 100));
        assert_eq!(s, Phasor::new(100.0, 0.0));

        assert_eq!(sum_phasors(std::iter::empty()), Phasor::ZERO);
    }

    #[test]
    fn probability_examples() {
        assert_eq!(probability(Phasor::ZERO, 4.0).unwrap(), 0.0);

        // Modulus-2 amplitude at an arbitrary phase saturates the normalization.
        let amp = Phasor::from_polar(2.0, 1.2345);
        assert!((probability(amp, 4.0).unwrap() - 1.0).abs() < 1e-12);

        let amp = Phasor::new(2.0_f64.sqrt(), 0.0);
        assert!((probability(amp, 4.0).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn probability_guards() {
        assert!(probability(Phasor::new(3.0, 0.0), 4.0).is_err());
        assert!(probability(Phasor::ONE, 0.0).is_err());
        assert!(probability(Phasor::ONE, -2.0).is_err());
        assert!(probability(Phasor::new(f64::NAN, 0.0), 4.0).is_err());
    }

    #[test]
    fn i_pow_table_is_exact() {
        assert_eq!(Phasor::i_pow(0), Phasor::ONE);
        assert_eq!(Phasor::i_pow(1), Phasor::I);
        assert_eq!(Phasor::i_pow(2), Phasor::new(-1.0, 0.0));
        assert_eq!(Phasor::i_pow(3), Phasor::new(0.0, -1.0));
        assert_eq!(Phasor::i_pow(7), Phasor::i_pow(3));
    }

    #[test]
    fn action_phase_reduction() {
        let a = ActionPhase::new(20.0 * PI).unwrap();
        assert_eq!(a.radians(), 20.0 * PI);
        assert!(a.reduced() < TAU);
        assert!(a.reduced() >= 0.0);
        assert!(ActionPhase::new(f64::NAN).is_err());
    }

    #[test]
    fn from_polar_modulus_matches() {
        for &(r, th) in &[(1.0, 0.3), (2.5, -7.9), (0.0, 4.0), (13.0, 1e6)] {
            let p = Phasor::from_polar(r, th);
            assert!((p.modulus() - r).abs() < 1e-12 * r.max(1.0));
        }
    }

    #[test]
    fn phase_is_normalized() {
        let p = Phasor::new(0.0, -1.0);
        let ph = p.phase();
        assert!((0.0..TAU).contains(&ph));
        assert!((ph - 3.0 * FRAC_PI_2).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn triangle_inequality(phases in proptest::collection::vec(-1e3..1e3f64, 0..64),
                               moduli in proptest::collection::vec(0.0..10.0f64, 0..64)) {
            let ps: Vec<Phasor> = phases.iter().zip(moduli.iter())
                .map(|(&th, &r)| Phasor::from_polar(r, th))
                .collect();
            let total: f64 = ps.iter().map(|p| p.modulus()).sum();
            prop_assert!(sum_phasors(ps.iter().copied()).modulus() <= total + 1e-9);
        }

        #[test]
        fn unit_phasors_multiply_by_adding_phases(a in -1e3..1e3f64, b in -1e3..1e3f64) {
            let lhs = phasor_from_phase(a).unwrap() * phasor_from_phase(b).unwrap();
            let rhs = phasor_from_phase(a + b).unwrap();
            prop_assert!((lhs - rhs).modulus() < 1e-12);
        }

        #[test]
        fn probability_is_global_phase_invariant(r in 0.0..2.0f64,
                                                 th in -1e3..1e3f64,
                                                 global in -1e3..1e3f64) {
            let amp = Phasor::from_polar(r, th);
            let rotated = amp * phasor_from_phase(global).unwrap();
            let p0 = probability(amp, 4.0).unwrap();
            let p1 = probability(rotated, 4.0).unwrap();
            prop_assert!((p0 - p1).abs() < 1e-12);
        }
    }
}
