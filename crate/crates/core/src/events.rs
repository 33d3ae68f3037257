//! Event-level Monte Carlo realization of the local decision rule.
//!
//! Each trial emits shared hidden variables at the source — a pointer
//! angle (identical on both wings) and the upper tangible's path class.
//! Each wing then decides up/down through [`wing_decide`], a pure function
//! of a [`WingInput`] that *by type* contains nothing about the remote
//! wing's setting or device: the wing's two-family sum direction
//! `θ₀ + phase(e^{i·setting} + 1)` is thresholded against the device's
//! rotated half-circle.
//!
//! The fidelity report compares the correlations this rule actually
//! produces against the amplitude-level prediction `cos²((α−β)/2)`. The
//! module measures that gap; it does not assert agreement — the direction
//! rule yields a piecewise-linear correlation, and the report quantifies
//! how far that sits from the cosine form.
//!
//! A local setting of exactly π makes the two-family sum's modulus vanish
//! and leaves the direction undefined; such trials are rejected and
//! tallied as `degenerate`, never tie-broken.

use std::f64::consts::{PI, TAU};
use std::io::Write;

use rand::Rng;
use serde::Serialize;

use crate::error::{Result, SimError};
use crate::phasor::Phasor;
use crate::seeding::{chunk_ranges, stream, trial_rng};

/// Modulus below which the two-family sum direction is declared undefined.
pub const DEGENERATE_LOCAL_SUM_TOL: f64 = 1e-12;

/// Which class the upper tangible takes in a two-particle run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PathChoice {
    LeftUpper,
    RightUpper,
}

/// Hidden variables emitted once per trial and shared by both wings.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct HiddenVariables {
    /// Shared initial pointer direction, in `[0, 2π)`.
    pub pointer_angle: f64,
    /// The upper tangible's path class for this trial.
    pub upper_path: PathChoice,
}

/// Per-device rotation of the unit circle that thresholds transmit/reflect.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct BeamsplitterParam {
    pub rotation: f64,
    pub fixed_per_device: bool,
}

impl BeamsplitterParam {
    pub fn fixed(rotation: f64) -> Self {
        BeamsplitterParam {
            rotation,
            fixed_per_device: true,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Side {
    Left,
    Right,
}

/// Everything one wing may consult: the shared hidden variables, its own
/// setting, and its own device. No remote field exists.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct WingInput {
    pub hidden: HiddenVariables,
    pub local_setting: f64,
    pub device: BeamsplitterParam,
    pub side: Side,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum WingOutcome {
    Up,
    Down,
}

/// Draw one trial's hidden variables: pointer angle uniform on `[0, 2π)`,
/// path class a fair coin.
pub fn source_emit<R: Rng>(rng: &mut R) -> HiddenVariables {
    HiddenVariables {
        pointer_angle: rng.random::<f64>() * TAU,
        upper_path: if rng.random::<bool>() {
            PathChoice::LeftUpper
        } else {
            PathChoice::RightUpper
        },
    }
}

/// The wing's two-family sum `e^{iθ₀}·(e^{i·setting} + 1)`: the shifted arm
/// plus the unshifted arm, rotated by the shared pointer angle.
///
/// Its direction drives [`wing_decide`]; its modulus is available here for
/// diagnostics but never enters the up/down rule.
pub fn wing_local_sum(input: &WingInput) -> Result<Phasor> {
    let setting = input.local_setting;
    if !setting.is_finite() {
        return Err(SimError::NonFinite {
            what: "local setting",
            value: setting,
        });
    }
    let two_family = Phasor::from_polar(1.0, setting) + Phasor::ONE;
    Ok(Phasor::from_polar(1.0, input.hidden.pointer_angle) * two_family)
}

/// The local decision rule.
///
/// The outcome is `Up` iff the two-family sum's direction falls in the
/// device's rotated half-circle `(0, π]`. Only the direction enters the
/// rule; the modulus is checked solely to detect the degenerate setting-π
/// case, where the direction is undefined.
pub fn wing_decide(input: &WingInput) -> Result<WingOutcome> {
    let local_sum = wing_local_sum(input)?;
    let modulus = local_sum.modulus();
    if modulus < DEGENERATE_LOCAL_SUM_TOL {
        return Err(SimError::DegenerateLocalSum {
            setting: input.local_setting,
            modulus,
        });
    }
    let rotated = (local_sum.phase() - input.device.rotation).rem_euclid(TAU);
    Ok(if rotated > 0.0 && rotated <= PI {
        WingOutcome::Up
    } else {
        WingOutcome::Down
    })
}

/// Device rotations for the two wings, optionally redrawn per trial.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct GammaConfig {
    pub left: f64,
    pub right: f64,
    /// When set, both rotations are redrawn uniformly each trial
    /// (sensitivity analysis); the default is one fixed rotation per device.
    pub redraw_per_trial: bool,
}

impl Default for GammaConfig {
    fn default() -> Self {
        GammaConfig {
            left: 0.0,
            right: 0.0,
            redraw_per_trial: false,
        }
    }
}

/// Tallies over one settings pair.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct TrialCounts {
    pub n: u64,
    pub same: u64,
    pub different: u64,
    pub degenerate: u64,
    pub left_up: u64,
    pub right_up: u64,
}

impl TrialCounts {
    fn merge(&mut self, other: &TrialCounts) {
        self.n += other.n;
        self.same += other.same;
        self.different += other.different;
        self.degenerate += other.degenerate;
        self.left_up += other.left_up;
        self.right_up += other.right_up;
    }

    pub fn valid(&self) -> u64 {
        self.same + self.different
    }

    /// Fraction of equal outcomes over non-degenerate trials; `None` when
    /// every trial was degenerate.
    pub fn p_same(&self) -> Option<f64> {
        let valid = self.valid();
        (valid > 0).then(|| self.same as f64 / valid as f64)
    }

    pub fn left_up_fraction(&self) -> Option<f64> {
        let valid = self.valid();
        (valid > 0).then(|| self.left_up as f64 / valid as f64)
    }
}

/// Run `n` trials: emit hidden variables, evaluate each wing independently,
/// tally equal/unequal outcomes. Degenerate trials (a wing's setting at
/// exactly π) are counted separately and excluded from the fraction.
///
/// Tallies depend only on `(alpha, beta, n, seed, gammas)` — never on the
/// thread count.
pub fn run_trials(
    alpha: f64,
    beta: f64,
    n: u64,
    seed: u64,
    gammas: GammaConfig,
    threads: usize,
) -> Result<TrialCounts> {
    if n == 0 {
        return Err(SimError::InvalidTrialCount("need at least 1 trial".into()));
    }
    for (what, v) in [("alpha", alpha), ("beta", beta)] {
        if !v.is_finite() {
            return Err(SimError::NonFinite { what, value: v });
        }
    }

    let worker = |range: std::ops::Range<u64>| -> TrialCounts {
        let mut counts = TrialCounts::default();
        for i in range {
            let mut rng = trial_rng(seed, stream::EVENTS, i);
            let hidden = source_emit(&mut rng);
            let (gamma_left, gamma_right) = if gammas.redraw_per_trial {
                (rng.random::<f64>() * TAU, rng.random::<f64>() * TAU)
            } else {
                (gammas.left, gammas.right)
            };
            let left = WingInput {
                hidden,
                local_setting: alpha,
                device: BeamsplitterParam::fixed(gamma_left),
                side: Side::Left,
            };
            let right = WingInput {
                hidden,
                local_setting: beta,
                device: BeamsplitterParam::fixed(gamma_right),
                side: Side::Right,
            };
            counts.n += 1;
            match (wing_decide(&left), wing_decide(&right)) {
                (Ok(l), Ok(r)) => {
                    if l == WingOutcome::Up {
                        counts.left_up += 1;
                    }
                    if r == WingOutcome::Up {
                        counts.right_up += 1;
                    }
                    if l == r {
                        counts.same += 1;
                    } else {
                        counts.different += 1;
                    }
                }
                _ => counts.degenerate += 1,
            }
        }
        counts
    };

    let ranges = chunk_ranges(n, threads);
    let mut total = TrialCounts::default();
    if ranges.len() == 1 {
        total = worker(ranges.into_iter().next().unwrap());
    } else {
        let partials: Vec<TrialCounts> = std::thread::scope(|scope| {
            let handles: Vec<_> = ranges
                .into_iter()
                .map(|r| scope.spawn(move || worker(r)))
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("worker panicked"))
                .collect()
        });
        for p in &partials {
            total.merge(p);
        }
    }
    Ok(total)
}

/// Amplitude-level prediction the event rule is compared against.
pub fn cosine_prediction(alpha: f64, beta: f64) -> f64 {
    ((alpha - beta) / 2.0).cos().powi(2)
}

/// One fidelity cell. `p_event` is `None` when every trial was degenerate
/// (a setting at exactly π); such cells are excluded from the summary.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct FidelityRow {
    pub alpha: f64,
    pub beta: f64,
    pub p_event: Option<f64>,
    pub p_eq7: f64,
    pub abs_dev: Option<f64>,
    pub n: u64,
    pub degenerate_count: u64,
}

/// Event-rule-vs-amplitude comparison over a settings grid.
#[derive(Clone, Debug, Serialize)]
pub struct FidelityReport {
    pub rows: Vec<FidelityRow>,
    /// Largest deviation over cells with a defined event fraction.
    pub max_abs_dev: f64,
}

/// Evaluate every `(alpha, beta)` pair with `n` trials each and report the
/// deviation from the amplitude prediction, rows sorted by `(alpha, beta)`.
pub fn fidelity_report(
    pairs: &[(f64, f64)],
    n: u64,
    seed: u64,
    gammas: GammaConfig,
    threads: usize,
) -> Result<FidelityReport> {
    if pairs.is_empty() {
        return Err(SimError::InvalidSetting("empty settings grid".into()));
    }
    let mut sorted: Vec<(f64, f64)> = pairs.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite settings"));

    let mut rows = Vec::with_capacity(sorted.len());
    let mut max_abs_dev: f64 = 0.0;
    for (cell, &(alpha, beta)) in sorted.iter().enumerate() {
        let cell_seed = crate::seeding::derive_seed(seed, stream::EVENTS, cell as u64 + 1);
        let counts = run_trials(alpha, beta, n, cell_seed, gammas, threads)?;
        let p_event = counts.p_same();
        let p_eq7 = cosine_prediction(alpha, beta);
        let abs_dev = p_event.map(|p| (p - p_eq7).abs());
        if let Some(d) = abs_dev {
            max_abs_dev = max_abs_dev.max(d);
        }
        rows.push(FidelityRow {
            alpha,
            beta,
            p_event,
            p_eq7,
            abs_dev,
            n,
            degenerate_count: counts.degenerate,
        });
    }
    Ok(FidelityReport { rows, max_abs_dev })
}

/// CSV schema: `alpha,beta,p_event,p_eq7,abs_dev,n,degenerate_count`.
/// Fully degenerate cells print `NaN` for the undefined columns.
pub fn write_fidelity_csv<W: Write>(report: &FidelityReport, mut out: W) -> Result<()> {
    writeln!(out, "alpha,beta,p_event,p_eq7,abs_dev,n,degenerate_count")?;
    for r in &report.rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.alpha,
            r.beta,
            r.p_event.unwrap_or(f64::NAN),
            r.p_eq7,
            r.abs_dev.unwrap_or(f64::NAN),
            r.n,
            r.degenerate_count
        )?;
    }
    Ok(())
}

/// JSON variant of the fidelity report, carrying the `max_abs_dev` summary.
pub fn write_fidelity_json<W: Write>(report: &FidelityReport, mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, report)
        .map_err(|e| SimError::InvalidStream(format!("json serialization failed: {e}")))?;
    writeln!(out)?;
    Ok(())
}
