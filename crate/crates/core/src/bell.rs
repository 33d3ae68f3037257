//! Inequality evaluators applied uniformly to any same-outcome backend.
//!
//! A backend maps a settings pair to the probability that the two wings
//! signal the same way; outcomes map to ±1 (up → +1, down → −1), giving
//! the correlation `E = 2·P_same − 1`. The two headline quantities:
//!
//! * the four-setting combination `S = |E(a,b) − E(a,b′) + E(a′,b) + E(a′,b′)|`,
//!   bounded by 2 for the classical pointer model and reaching `2√2` for
//!   the half-angle cosine correlation, and
//! * the average same-outcome probability over the nine pairs of the three
//!   fixed settings (0.5 for the cosine correlation, 5/9 for the toy model).

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, TAU};
use std::io::Write;

use serde::Serialize;

use crate::error::{Result, SimError};
use crate::events::{run_trials, GammaConfig};
use crate::rarity::{joint_probability, RaritySpec, RtGeometry};
use crate::sqm::sqm_rt_joint;
use crate::toybell::same_probability_for_angles;

/// Standard settings `(a, a′, b, b′)` maximizing the cosine correlation's S.
pub const CHSH_STANDARD_SETTINGS: [f64; 4] =
    [0.0, FRAC_PI_2, FRAC_PI_4, 3.0 * FRAC_PI_4];

/// The three fixed analyzer angles used for the nine-pair average.
pub const THREE_SETTINGS: [f64; 3] = [0.0, TAU / 3.0, 2.0 * TAU / 3.0];

/// A source of same-outcome probabilities over settings pairs.
pub trait CorrelationBackend {
    fn label(&self) -> &'static str;
    fn p_same(&self, alpha: f64, beta: f64) -> Result<f64>;
}

/// Live path-sum amplitude backend (family sums, not the closed form).
pub struct AmplitudeBackend {
    pub n_source_points: usize,
    pub geometry: RtGeometry,
}

impl Default for AmplitudeBackend {
    fn default() -> Self {
        AmplitudeBackend {
            n_source_points: 128,
            geometry: RtGeometry::standard(),
        }
    }
}

impl CorrelationBackend for AmplitudeBackend {
    fn label(&self) -> &'static str {
        "amplitude"
    }

    fn p_same(&self, alpha: f64, beta: f64) -> Result<f64> {
        joint_probability(&RaritySpec {
            alpha,
            beta,
            n_source_points: self.n_source_points,
            geometry: self.geometry,
        })
    }
}

/// Matrix-evolution oracle backend.
pub struct SqmBackend;

impl CorrelationBackend for SqmBackend {
    fn label(&self) -> &'static str {
        "sqm"
    }

    fn p_same(&self, alpha: f64, beta: f64) -> Result<f64> {
        Ok(sqm_rt_joint(alpha, beta))
    }
}

/// Classical pointer model, generalized to arbitrary angles.
pub struct ToyBackend;

impl CorrelationBackend for ToyBackend {
    fn label(&self) -> &'static str {
        "toy"
    }

    fn p_same(&self, alpha: f64, beta: f64) -> Result<f64> {
        Ok(same_probability_for_angles(alpha, beta))
    }
}

/// Event-level Monte Carlo backend.
pub struct EventBackend {
    pub trials: u64,
    pub seed: u64,
    pub gammas: GammaConfig,
    pub threads: usize,
}

impl CorrelationBackend for EventBackend {
    fn label(&self) -> &'static str {
        "event"
    }

    fn p_same(&self, alpha: f64, beta: f64) -> Result<f64> {
        let counts = run_trials(alpha, beta, self.trials, self.seed, self.gammas, self.threads)?;
        counts.p_same().ok_or(SimError::DegenerateLocalSum {
            setting: alpha,
            modulus: 0.0,
        })
    }
}

/// `E = 2·P_same − 1` for ±1-valued outcomes.
pub fn correlation_from_same_prob(p_same: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p_same) {
        return Err(SimError::ProbabilityOutOfRange(p_same));
    }
    Ok(2.0 * p_same - 1.0)
}

fn correlation(backend: &dyn CorrelationBackend, a: f64, b: f64) -> Result<f64> {
    correlation_from_same_prob(backend.p_same(a, b)?)
}

/// Four-setting combination `|E(a,b) − E(a,b′) + E(a′,b) + E(a′,b′)|`.
pub fn chsh(backend: &dyn CorrelationBackend, a: f64, a_prime: f64, b: f64, b_prime: f64) -> Result<f64> {
    for (what, v) in [("a", a), ("a'", a_prime), ("b", b), ("b'", b_prime)] {
        if !v.is_finite() {
            return Err(SimError::NonFinite { what, value: v });
        }
    }
    let s = correlation(backend, a, b)? - correlation(backend, a, b_prime)?
        + correlation(backend, a_prime, b)?
        + correlation(backend, a_prime, b_prime)?;
    Ok(s.abs())
}

/// Best S found by a coarse grid over the four settings followed by
/// coordinate-descent refinement (step halving down to 1e-4 rad, giving S
/// to well under the 1e-3 tolerance for smooth backends).
pub fn chsh_max(backend: &dyn CorrelationBackend, coarse_steps: usize) -> Result<(f64, [f64; 4])> {
    let steps = coarse_steps.max(2);
    let grid: Vec<f64> = (0..steps).map(|k| k as f64 * TAU / steps as f64).collect();

    // E depends only on the pair, so precompute the coarse matrix.
    let mut e = vec![vec![0.0; steps]; steps];
    for (i, &x) in grid.iter().enumerate() {
        for (j, &y) in grid.iter().enumerate() {
            e[i][j] = correlation(backend, x, y)?;
        }
    }

    let mut best = (f64::MIN, [0.0; 4]);
    for ia in 0..steps {
        for iap in 0..steps {
            for ib in 0..steps {
                for ibp in 0..steps {
                    let s = (e[ia][ib] - e[ia][ibp] + e[iap][ib] + e[iap][ibp]).abs();
                    if s > best.0 {
                        best = (s, [grid[ia], grid[iap], grid[ib], grid[ibp]]);
                    }
                }
            }
        }
    }

    let mut settings = best.1;
    let mut s_best = best.0;
    let mut step = TAU / steps as f64;
    while step > 1e-4 {
        let mut improved = false;
        for k in 0..4 {
            for dir in [-1.0, 1.0] {
                let mut candidate = settings;
                candidate[k] += dir * step;
                let s = chsh(backend, candidate[0], candidate[1], candidate[2], candidate[3])?;
                if s > s_best {
                    s_best = s;
                    settings = candidate;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    Ok((s_best, settings))
}

/// Mean same-outcome probability over the nine pairs of [`THREE_SETTINGS`].
pub fn mermin_average(backend: &dyn CorrelationBackend) -> Result<f64> {
    let mut total = 0.0;
    for &a in &THREE_SETTINGS {
        for &b in &THREE_SETTINGS {
            total += backend.p_same(a, b)?;
        }
    }
    Ok(total / 9.0)
}

/// One correlation-table row.
#[derive(Clone, Debug, Serialize)]
pub struct CorrelationRow {
    pub alpha: f64,
    pub beta: f64,
    pub backend: String,
    pub p_same: f64,
    pub e: f64,
}

/// Rows of `(α, β, backend, p_same, E)` with `E = 2·p_same − 1` per row.
#[derive(Clone, Debug, Default, Serialize)]
pub struct CorrelationTable {
    pub rows: Vec<CorrelationRow>,
}

impl CorrelationTable {
    pub fn extend_from_backend(
        &mut self,
        backend: &dyn CorrelationBackend,
        pairs: &[(f64, f64)],
    ) -> Result<()> {
        for &(alpha, beta) in pairs {
            let p_same = backend.p_same(alpha, beta)?;
            self.rows.push(CorrelationRow {
                alpha,
                beta,
                backend: backend.label().to_string(),
                p_same,
                e: correlation_from_same_prob(p_same)?,
            });
        }
        Ok(())
    }

    /// CSV schema: `alpha,beta,backend,p_same,e`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "alpha,beta,backend,p_same,e")?;
        for r in &self.rows {
            writeln!(out, "{},{},{},{},{}", r.alpha, r.beta, r.backend, r.p_same, r.e)?;
        }
        Ok(())
    }
}

/// Summary entry for one backend.
#[derive(Clone, Debug, Serialize)]
pub struct BellReport {
    pub backend: String,
    pub chsh_settings: [f64; 4],
    #[serde(rename = "S")]
    pub s: f64,
    pub mermin_avg: f64,
    /// Best S found by grid search plus refinement; skipped for Monte Carlo
    /// backends where the search would resample noise.
    pub s_max: Option<f64>,
}

/// Evaluate S at the standard settings and the nine-pair average for one backend.
pub fn bell_report(backend: &dyn CorrelationBackend, search_max: bool) -> Result<BellReport> {
    let [a, ap, b, bp] = CHSH_STANDARD_SETTINGS;
    let s = chsh(backend, a, ap, b, bp)?;
    let mermin_avg = mermin_average(backend)?;
    let s_max = if search_max {
        Some(chsh_max(backend, 24)?.0)
    } else {
        None
    };
    Ok(BellReport {
        backend: backend.label().to_string(),
        chsh_settings: CHSH_STANDARD_SETTINGS,
        s,
        mermin_avg,
        s_max,
    })
}
