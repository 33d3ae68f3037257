//! Classical twin clock-pointer system.
//!
//! Two objects leave a common source carrying pointers set to the same
//! random angle. A measurement setting on each side rotates that side's
//! pointer by the setting before it reaches a fork; an identical bivalent
//! rule then sends each object up or down depending on which half-circle
//! its pointer lies in. The same-branch probability is 1 for equal
//! settings and drops linearly with the circular gap between them:
//! `1 − Δ′/π`. For the three allowed settings every unequal pair gives
//! exactly 1/3 — and that holds for *both* possible gaps (2π/3 and 4π/3),
//! since their circular distance is the same. The Monte Carlo here is the
//! independent cross-check of that closed form.

use std::f64::consts::{PI, TAU};
use std::io::Write;

use rand::Rng;
use serde::Serialize;

use crate::error::{Result, SimError};
use crate::seeding::{chunk_ranges, stream, trial_rng};

/// The three allowed measurement settings.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ToySetting {
    Zero,
    TwoThirdsPi,
    FourThirdsPi,
}

impl ToySetting {
    pub const ALL: [ToySetting; 3] = [
        ToySetting::Zero,
        ToySetting::TwoThirdsPi,
        ToySetting::FourThirdsPi,
    ];

    pub fn radians(self) -> f64 {
        match self {
            ToySetting::Zero => 0.0,
            ToySetting::TwoThirdsPi => TAU / 3.0,
            ToySetting::FourThirdsPi => 2.0 * TAU / 3.0,
        }
    }

    /// Snap an angle to the nearest allowed setting within `tol` radians.
    pub fn from_radians(angle: f64, tol: f64) -> Result<Self> {
        if !angle.is_finite() {
            return Err(SimError::NonFinite {
                what: "toy setting",
                value: angle,
            });
        }
        for s in Self::ALL {
            let gap = circular_distance(angle - s.radians());
            if gap <= tol {
                return Ok(s);
            }
        }
        Err(SimError::InvalidSetting(format!(
            "{angle} is not within {tol} of any allowed setting (0, 2π/3, 4π/3)"
        )))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    Upper,
    Lower,
}

/// One trial's shared angle and the two branch outcomes it produces.
#[derive(Clone, Copy, Debug)]
pub struct ToyTrial {
    pub shared_angle: f64,
    pub left_branch: Branch,
    pub right_branch: Branch,
}

impl ToyTrial {
    /// Evaluate the bivalent rule on both sides for a given shared angle.
    pub fn evaluate(shared_angle: f64, left_setting: f64, right_setting: f64) -> Self {
        ToyTrial {
            shared_angle,
            left_branch: toy_branch(shared_angle + left_setting),
            right_branch: toy_branch(shared_angle + right_setting),
        }
    }

    pub fn same_branch(&self) -> bool {
        self.left_branch == self.right_branch
    }
}

/// The bivalent fork rule: upper iff the pointer (mod 2π) lies in `(0, π]`.
///
/// The boundary goes to the upper branch — a measure-zero convention that
/// the uniform-angle probabilities never see.
pub fn toy_branch(pointer: f64) -> Branch {
    let p = pointer.rem_euclid(TAU);
    if p > 0.0 && p <= PI {
        Branch::Upper
    } else {
        Branch::Lower
    }
}

/// Circular distance of an angle difference to the nearest multiple of 2π:
/// `min(|Δ| mod 2π, 2π − |Δ| mod 2π)`.
pub fn circular_distance(delta: f64) -> f64 {
    let d = delta.abs().rem_euclid(TAU);
    d.min(TAU - d)
}

/// Same-branch probability for arbitrary setting angles: `1 − Δ′/π`.
pub fn same_probability_for_angles(alpha: f64, beta: f64) -> f64 {
    1.0 - circular_distance(alpha - beta) / PI
}

/// Same-branch probability for the allowed settings: 1 when equal,
/// 1/3 for every unequal pair (both possible gaps have Δ′ = 2π/3).
pub fn toy_same_probability(alpha: ToySetting, beta: ToySetting) -> f64 {
    if alpha == beta {
        1.0
    } else {
        same_probability_for_angles(alpha.radians(), beta.radians())
    }
}

/// Monte Carlo estimate of the same-branch probability: draw the shared
/// angle uniformly, rotate each side's pointer by its own setting, apply
/// the fork rule, count matches.
pub fn toy_monte_carlo(
    alpha: ToySetting,
    beta: ToySetting,
    n_trials: u64,
    seed: u64,
    threads: usize,
) -> Result<f64> {
    if n_trials == 0 {
        return Err(SimError::InvalidTrialCount("need at least 1 trial".into()));
    }
    let (a, b) = (alpha.radians(), beta.radians());

    let worker = |range: std::ops::Range<u64>| -> u64 {
        let mut same = 0;
        for i in range {
            let mut rng = trial_rng(seed, stream::TOY, i);
            let gamma = rng.random::<f64>() * TAU;
            if ToyTrial::evaluate(gamma, a, b).same_branch() {
                same += 1;
            }
        }
        same
    };

    let ranges = chunk_ranges(n_trials, threads);
    let same: u64 = if ranges.len() == 1 {
        worker(ranges.into_iter().next().unwrap())
    } else {
        std::thread::scope(|scope| {
            let handles: Vec<_> = ranges
                .into_iter()
                .map(|r| scope.spawn(move || worker(r)))
                .collect();
            handles.into_iter().map(|h| h.join().expect("worker")).sum()
        })
    };
    Ok(same as f64 / n_trials as f64)
}

/// One analytic-vs-Monte-Carlo comparison row.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ToyReportRow {
    pub alpha: f64,
    pub beta: f64,
    pub p_analytic: f64,
    pub p_mc: f64,
    pub n_trials: u64,
    pub abs_err: f64,
}

/// Evaluate the analytic probability and its Monte Carlo cross-check on
/// each settings pair.
pub fn toy_report(
    pairs: &[(ToySetting, ToySetting)],
    n_trials: u64,
    seed: u64,
    threads: usize,
) -> Result<Vec<ToyReportRow>> {
    pairs
        .iter()
        .map(|&(a, b)| {
            let p_analytic = toy_same_probability(a, b);
            let p_mc = toy_monte_carlo(a, b, n_trials, seed, threads)?;
            Ok(ToyReportRow {
                alpha: a.radians(),
                beta: b.radians(),
                p_analytic,
                p_mc,
                n_trials,
                abs_err: (p_mc - p_analytic).abs(),
            })
        })
        .collect()
}

/// All nine ordered settings pairs.
pub fn all_setting_pairs() -> Vec<(ToySetting, ToySetting)> {
    let mut pairs = Vec::with_capacity(9);
    for a in ToySetting::ALL {
        for b in ToySetting::ALL {
            pairs.push((a, b));
        }
    }
    pairs
}

/// CSV schema: `alpha,beta,p_analytic,p_mc,n_trials,abs_err`.
pub fn write_toy_csv<W: Write>(rows: &[ToyReportRow], mut out: W) -> Result<()> {
    writeln!(out, "alpha,beta,p_analytic,p_mc,n_trials,abs_err")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            r.alpha, r.beta, r.p_analytic, r.p_mc, r.n_trials, r.abs_err
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn branch_rule_examples() {
        assert_eq!(toy_branch(FRAC_PI_2), Branch::Upper);
        assert_eq!(toy_branch(3.0 * FRAC_PI_2), Branch::Lower);
        assert_eq!(toy_branch(TAU / 3.0 + TAU), Branch::Upper);
        // Boundary convention: 0 is lower, π is upper.
        assert_eq!(toy_branch(0.0), Branch::Lower);
        assert_eq!(toy_branch(PI), Branch::Upper);
    }

    #[test]
    fn analytic_values() {
        assert_eq!(
            toy_same_probability(ToySetting::TwoThirdsPi, ToySetting::TwoThirdsPi),
            1.0
        );
        let third = 1.0 / 3.0;
        for (a, b) in [
            (ToySetting::Zero, ToySetting::TwoThirdsPi),
            (ToySetting::Zero, ToySetting::FourThirdsPi),
            (ToySetting::TwoThirdsPi, ToySetting::FourThirdsPi),
            (ToySetting::FourThirdsPi, ToySetting::Zero),
        ] {
            assert!((toy_same_probability(a, b) - third).abs() < 1e-15);
        }
    }

    /// Both unequal gaps (2π/3 and 4π/3) have the same circular distance,
    /// hence the same probability — not zero for the larger gap.
    #[test]
    fn both_unequal_gaps_give_one_third() {
        let small_gap = same_probability_for_angles(0.0, TAU / 3.0);
        let large_gap = same_probability_for_angles(0.0, 2.0 * TAU / 3.0);
        assert!((small_gap - large_gap).abs() < 1e-15);
        assert!((small_gap - 1.0 / 3.0).abs() < 1e-15);
        assert!(large_gap > 0.3, "the larger gap is 1/3 as well, not 0");
    }

    #[test]
    fn monte_carlo_equal_settings_is_exactly_one() {
        let p = toy_monte_carlo(ToySetting::Zero, ToySetting::Zero, 100_000, 3, 2).unwrap();
        assert_eq!(p, 1.0);
    }

    #[test]
    fn monte_carlo_matches_analytic_at_one_million() {
        let p = toy_monte_carlo(ToySetting::Zero, ToySetting::TwoThirdsPi, 1_000_000, 7, 4)
            .unwrap();
        assert!((p - 1.0 / 3.0).abs() < 0.002, "got {p}");

        let p = toy_monte_carlo(
            ToySetting::TwoThirdsPi,
            ToySetting::FourThirdsPi,
            1_000_000,
            11,
            4,
        )
        .unwrap();
        assert!((p - 1.0 / 3.0).abs() < 0.002, "got {p}");
    }

    #[test]
    fn monte_carlo_converges_at_binomial_rate() {
        let expected = 1.0 / 3.0;
        for (n, seed) in [(10_000u64, 21u64), (100_000, 22), (1_000_000, 23)] {
            let p = toy_monte_carlo(ToySetting::Zero, ToySetting::FourThirdsPi, n, seed, 4)
                .unwrap();
            let sigma = (expected * (1.0 - expected) / n as f64).sqrt();
            assert!(
                (p - expected).abs() < 3.0 * sigma,
                "n={n}: {p} deviates beyond 3σ={}",
                3.0 * sigma
            );
        }
    }

    #[test]
    fn monte_carlo_is_deterministic_and_thread_invariant() {
        let a = toy_monte_carlo(ToySetting::Zero, ToySetting::TwoThirdsPi, 40_000, 5, 1).unwrap();
        let b = toy_monte_carlo(ToySetting::Zero, ToySetting::TwoThirdsPi, 40_000, 5, 7).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn setting_snap() {
        assert_eq!(
            ToySetting::from_radians(2.0944, 1e-3).unwrap(),
            ToySetting::TwoThirdsPi
        );
        assert_eq!(ToySetting::from_radians(0.0, 1e-3).unwrap(), ToySetting::Zero);
        assert!(ToySetting::from_radians(1.0, 1e-3).is_err());
        assert!(ToySetting::from_radians(f64::NAN, 1e-3).is_err());
    }

    #[test]
    fn trial_rotation_invariance_on_fixed_grid() {
        // Shifting the shared angle while unshifting both settings leaves
        // each trial's branch pair unchanged (the pointers are unchanged).
        for &gamma in &[0.1, 0.9, 2.4, 3.3, 4.7, 6.1] {
            for &offset in &[0.25, 0.5, 1.5, 3.0] {
                for a in ToySetting::ALL {
                    for b in ToySetting::ALL {
                        let base = ToyTrial::evaluate(gamma, a.radians(), b.radians());
                        let moved = ToyTrial::evaluate(
                            gamma + offset,
                            a.radians() - offset,
                            b.radians() - offset,
                        );
                        assert_eq!(base.left_branch, moved.left_branch);
                        assert_eq!(base.right_branch, moved.right_branch);
                    }
                }
            }
        }
    }

    #[test]
    fn report_covers_requested_pairs_and_csv_schema_holds() {
        let rows = toy_report(&all_setting_pairs(), 10_000, 13, 2).unwrap();
        assert_eq!(rows.len(), 9);
        let mut buf = Vec::new();
        write_toy_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("alpha,beta,p_analytic,p_mc,n_trials,abs_err\n"));
        assert_eq!(text.lines().count(), 10);
    }

    proptest! {
        #[test]
        fn symmetry_in_the_settings(i in 0usize..3, j in 0usize..3) {
            let (a, b) = (ToySetting::ALL[i], ToySetting::ALL[j]);
            prop_assert_eq!(toy_same_probability(a, b), toy_same_probability(b, a));
        }

        #[test]
        fn general_formula_is_shift_invariant(
            alpha in 0.0..TAU,
            beta in 0.0..TAU,
            offset in 0.0..TAU,
        ) {
            let p0 = same_probability_for_angles(alpha, beta);
            let p1 = same_probability_for_angles(alpha + offset, beta + offset);
            prop_assert!((p0 - p1).abs() < 1e-12);
        }
    }
}
