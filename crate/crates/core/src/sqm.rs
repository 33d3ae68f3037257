//! Minimal state-vector oracle used to cross-check the path-sum results.
//!
//! Everything here is computed by explicit matrix evolution on small
//! complex vectors, never by closed-form correlation formulas, so
//! agreement with the phasor-sum modules is a genuine two-route check.

use crate::error::{Result, SimError};
use crate::paths::Arm;
use crate::phasor::Phasor;

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Dense square complex matrix, row-major.
#[derive(Clone, Debug)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Phasor>,
}

impl ComplexMatrix {
    pub fn from_rows(rows: Vec<Vec<Phasor>>) -> Self {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            assert_eq!(row.len(), dim, "matrix must be square");
            data.extend(row);
        }
        ComplexMatrix { dim, data }
    }

    pub fn identity(dim: usize) -> Self {
        let mut data = vec![Phasor::ZERO; dim * dim];
        for i in 0..dim {
            data[i * dim + i] = Phasor::ONE;
        }
        ComplexMatrix { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn at(&self, row: usize, col: usize) -> Phasor {
        self.data[row * self.dim + col]
    }

    pub fn mul_vec(&self, v: &[Phasor]) -> Vec<Phasor> {
        assert_eq!(v.len(), self.dim);
        (0..self.dim)
            .map(|r| {
                let row = &self.data[r * self.dim..(r + 1) * self.dim];
                row.iter()
                    .zip(v)
                    .fold(Phasor::ZERO, |acc, (&m, &x)| acc + m * x)
            })
            .collect()
    }

    pub fn mul(&self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, other.dim);
        let dim = self.dim;
        let mut data = vec![Phasor::ZERO; dim * dim];
        for r in 0..dim {
            for c in 0..dim {
                let mut acc = Phasor::ZERO;
                for k in 0..dim {
                    acc = acc + self.at(r, k) * other.at(k, c);
                }
                data[r * dim + c] = acc;
            }
        }
        ComplexMatrix { dim, data }
    }

    pub fn dagger(&self) -> ComplexMatrix {
        let dim = self.dim;
        let mut data = vec![Phasor::ZERO; dim * dim];
        for r in 0..dim {
            for c in 0..dim {
                data[c * dim + r] = self.at(r, c).conj();
            }
        }
        ComplexMatrix { dim, data }
    }

    pub fn kron(&self, other: &ComplexMatrix) -> ComplexMatrix {
        let dim = self.dim * other.dim;
        let mut data = vec![Phasor::ZERO; dim * dim];
        for ar in 0..self.dim {
            for ac in 0..self.dim {
                for br in 0..other.dim {
                    for bc in 0..other.dim {
                        let r = ar * other.dim + br;
                        let c = ac * other.dim + bc;
                        data[r * dim + c] = self.at(ar, ac) * other.at(br, bc);
                    }
                }
            }
        }
        ComplexMatrix { dim, data }
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        let product = self.mul(&self.dagger());
        for r in 0..self.dim {
            for c in 0..self.dim {
                let expect = if r == c { Phasor::ONE } else { Phasor::ZERO };
                if (product.at(r, c) - expect).modulus() > tol {
                    return false;
                }
            }
        }
        true
    }
}

/// A normalized state on a labeled finite basis.
#[derive(Clone, Debug)]
pub struct StateVector {
    amplitudes: Vec<Phasor>,
    basis_labels: Vec<String>,
}

impl StateVector {
    pub fn new(amplitudes: Vec<Phasor>, basis_labels: Vec<String>) -> Result<Self> {
        if amplitudes.len() != basis_labels.len() || amplitudes.is_empty() {
            return Err(SimError::InvalidStream(
                "state amplitudes and labels must be non-empty and equal length".into(),
            ));
        }
        let norm_sq: f64 = amplitudes.iter().map(|a| a.modulus_sq()).sum();
        if (norm_sq - 1.0).abs() > 1e-9 {
            return Err(SimError::InvalidStream(format!(
                "state norm² = {norm_sq}, expected 1 within 1e-9"
            )));
        }
        Ok(StateVector {
            amplitudes,
            basis_labels,
        })
    }

    pub fn amplitudes(&self) -> &[Phasor] {
        &self.amplitudes
    }

    pub fn basis_labels(&self) -> &[String] {
        &self.basis_labels
    }

    pub fn norm_sq(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.modulus_sq()).sum()
    }

    pub fn probability(&self, index: usize) -> f64 {
        self.amplitudes[index].modulus_sq()
    }

    /// Evolve through a unitary; basis labels are kept by the caller's
    /// convention for the output ports.
    pub fn apply(&self, u: &ComplexMatrix) -> Result<StateVector> {
        if u.dim() != self.amplitudes.len() {
            return Err(SimError::InvalidStream(format!(
                "matrix dimension {} does not match state dimension {}",
                u.dim(),
                self.amplitudes.len()
            )));
        }
        StateVector::new(u.mul_vec(&self.amplitudes), self.basis_labels.clone())
    }
}

/// Symmetric 50-50 beamsplitter: transmit `1/√2`, reflect `i/√2`.
pub fn beamsplitter_unitary() -> ComplexMatrix {
    let t = Phasor::new(FRAC_1_SQRT_2, 0.0);
    let r = Phasor::new(0.0, FRAC_1_SQRT_2);
    ComplexMatrix::from_rows(vec![vec![t, r], vec![r, t]])
}

fn phase_diag(phases: &[f64]) -> ComplexMatrix {
    let dim = phases.len();
    let mut data = vec![Phasor::ZERO; dim * dim];
    for (i, &p) in phases.iter().enumerate() {
        data[i * dim + i] = Phasor::from_polar(1.0, p);
    }
    ComplexMatrix { dim, data }
}

/// One photon through beamsplitter – phase shifter – beamsplitter.
///
/// Basis order is (upper arm, lower arm); the relative phase sits on the
/// upper arm. A blocked arm routes that arm's probability to the third
/// output instead of the detectors. Returns `(P_D1, P_D2, P_absorbed)`.
pub fn sqm_mzi(relative_arm_phase: f64, arm_block: Option<Arm>) -> Result<(f64, f64, f64)> {
    if !relative_arm_phase.is_finite() {
        return Err(SimError::NonFinite {
            what: "relative arm phase",
            value: relative_arm_phase,
        });
    }
    let bs = beamsplitter_unitary();
    let mut state = bs.mul_vec(&[Phasor::ONE, Phasor::ZERO]);
    state = phase_diag(&[relative_arm_phase, 0.0]).mul_vec(&state);

    let mut absorbed = 0.0;
    if let Some(arm) = arm_block {
        let idx = match arm {
            Arm::Upper => 0,
            Arm::Lower => 1,
        };
        absorbed = state[idx].modulus_sq();
        state[idx] = Phasor::ZERO;
    }

    let out = bs.mul_vec(&state);
    Ok((out[0].modulus_sq(), out[1].modulus_sq(), absorbed))
}

/// Joint same-detector probability for the two-particle interferometer,
/// obtained by evolving the entangled state through per-side phase
/// shifters and beamsplitters.
///
/// Joint basis order: left ⊗ right with per-side order (upper, lower) in
/// and (up detector, down detector) out. The initial state pairs each
/// side's upper with the other side's lower.
pub fn sqm_rt_joint(alpha: f64, beta: f64) -> f64 {
    let inv = Phasor::new(FRAC_1_SQRT_2, 0.0);
    let state = StateVector::new(
        vec![Phasor::ZERO, inv, inv, Phasor::ZERO],
        vec![
            "upper⊗upper'".into(),
            "upper⊗lower'".into(),
            "lower⊗upper'".into(),
            "lower⊗lower'".into(),
        ],
    )
    .expect("normalized by construction");

    let left_shift = phase_diag(&[alpha, 0.0]);
    let right_shift = phase_diag(&[beta, 0.0]);
    let shifters = left_shift.kron(&right_shift);
    let bs = beamsplitter_unitary();
    let joint_bs = bs.kron(&bs);

    let evolved = state
        .apply(&shifters)
        .and_then(|s| s.apply(&joint_bs))
        .expect("unitary evolution preserves the norm");

    // Same-detector outcomes: both up (index 0) or both down (index 3).
    // Rounding can push the sum a few ulps past 1; it is a probability.
    (evolved.probability(0) + evolved.probability(3)).min(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::{PI, TAU};

    #[test]
    fn beamsplitter_is_unitary_and_balanced() {
        let bs = beamsplitter_unitary();
        assert!(bs.is_unitary(1e-12));
        let out = bs.mul_vec(&[Phasor::ONE, Phasor::ZERO]);
        assert!((out[0].modulus_sq() - 0.5).abs() < 1e-12);
        assert!((out[1].modulus_sq() - 0.5).abs() < 1e-12);
    }

    /// Oracle by direct 2×2 multiplication: two beamsplitters in a row
    /// swap the ports up to a global phase.
    #[test]
    fn double_beamsplitter_swaps_ports() {
        let bs = beamsplitter_unitary();
        let twice = bs.mul(&bs);
        let out = twice.mul_vec(&[Phasor::ONE, Phasor::ZERO]);
        assert!(out[0].modulus_sq() < 1e-12);
        assert!((out[1].modulus_sq() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mzi_balanced_routes_everything_to_d2() {
        let (d1, d2, abs) = sqm_mzi(0.0, None).unwrap();
        assert!(d1 < 1e-12);
        assert!((d2 - 1.0).abs() < 1e-12);
        assert_eq!(abs, 0.0);
    }

    #[test]
    fn mzi_pi_phase_routes_everything_to_d1() {
        let (d1, d2, _) = sqm_mzi(PI, None).unwrap();
        assert!((d1 - 1.0).abs() < 1e-12);
        assert!(d2 < 1e-12);
    }

    #[test]
    fn mzi_blocked_lower_quarters() {
        let (d1, d2, abs) = sqm_mzi(0.0, Some(Arm::Lower)).unwrap();
        assert!((d1 - 0.25).abs() < 1e-12);
        assert!((d2 - 0.25).abs() < 1e-12);
        assert!((abs - 0.5).abs() < 1e-12);
    }

    #[test]
    fn rt_joint_examples() {
        assert!((sqm_rt_joint(0.7, 0.7) - 1.0).abs() < 1e-12);
        assert!(sqm_rt_joint(PI, 0.0) < 1e-12);
        assert!((sqm_rt_joint(PI / 2.0, 0.0) - 0.5).abs() < 1e-12);
        // Matches the half-angle cosine-squared correlation.
        let (a, b) = (2.0 * PI / 3.0, 0.0);
        assert!((sqm_rt_joint(a, b) - 0.25).abs() < 1e-12);
    }

    #[test]
    fn state_vector_validation() {
        assert!(StateVector::new(vec![Phasor::ONE], vec![]).is_err());
        assert!(StateVector::new(
            vec![Phasor::new(0.9, 0.0)],
            vec!["a".into()]
        )
        .is_err());
    }

    proptest! {
        #[test]
        fn evolution_preserves_norm(alpha in 0.0..TAU, beta in 0.0..TAU) {
            let inv = Phasor::new(FRAC_1_SQRT_2, 0.0);
            let state = StateVector::new(
                vec![Phasor::ZERO, inv, inv, Phasor::ZERO],
                vec!["a".into(), "b".into(), "c".into(), "d".into()],
            ).unwrap();
            let u = phase_diag(&[alpha, 0.0]).kron(&phase_diag(&[beta, 0.0]));
            let bs2 = beamsplitter_unitary().kron(&beamsplitter_unitary());
            let evolved = state.apply(&u).unwrap().apply(&bs2).unwrap();
            prop_assert!((evolved.norm_sq() - 1.0).abs() < 1e-9);
        }

        #[test]
        fn rt_joint_depends_only_on_setting_difference(
            alpha in 0.0..TAU,
            beta in 0.0..TAU,
            offset in 0.0..TAU,
        ) {
            let p0 = sqm_rt_joint(alpha, beta);
            let p1 = sqm_rt_joint(alpha + offset, beta + offset);
            prop_assert!((p0 - p1).abs() < 1e-9);
        }
    }
}
