//! Two-particle interferometer with floor/ceiling mirrors on each side.
//!
//! Each source point on a small vertical segment spawns one upper and one
//! lower path per side (via the ceiling and floor mirrors) ending at that
//! side's beamsplitter, giving four path families. The right-hand geometry
//! is the exact mirror image of the left, built by IEEE sign flips, so
//! corresponding left/right paths have bit-identical segment lengths and
//! the two lower-family sums are bit-for-bit equal. That congruence is the
//! whole coordination mechanism: the joint same-detector probability
//! reduces to `cos²((α−β)/2)` for any family size, which refinement tests
//! confirm.
//!
//! Phase shifters sit on the upper arms only: `α` on the left, `β` on the
//! right. Beamsplitter reflection contributes the quarter-turn factor `i`;
//! mirror bounces are common to all four families and stay inside the
//! shared path phase.

use std::io::Write;

use serde::Serialize;

use crate::error::{Result, SimError};
use crate::paths::{
    congruent, stream_sum, Arm, HomotopyTag, PathPolyline, ShadowStream, StreamLabel, ENDPOINT_TOL,
};
use crate::phasor::{probability, Phasor};
use crate::sqm::sqm_rt_joint;

/// Modulus below which a family sum cannot be used as a normalization.
pub const DEGENERATE_SUM_TOL: f64 = 1e-9;

/// Symmetric planar geometry: source segment on the vertical axis, mirrors
/// at `(±mirror_x, ±mirror_y)`, beamsplitters at `(±beamsplitter_x, 0)`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct RtGeometry {
    /// Half-height of the source segment (the positional uncertainty).
    pub source_half_height: f64,
    pub mirror_x: f64,
    pub mirror_y: f64,
    pub beamsplitter_x: f64,
    pub wavelength: f64,
}

impl RtGeometry {
    /// Meter-scale arms with a sub-nanometer source segment: the paths of a
    /// family then share their endpoints within the stream tolerance while
    /// still being genuinely distinct.
    pub fn standard() -> Self {
        RtGeometry {
            source_half_height: 4e-10,
            mirror_x: 1.0,
            mirror_y: 0.5,
            beamsplitter_x: 2.0,
            wavelength: 1e-6,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (what, v) in [
            ("source half-height", self.source_half_height),
            ("mirror x", self.mirror_x),
            ("mirror y", self.mirror_y),
            ("beamsplitter x", self.beamsplitter_x),
        ] {
            if !v.is_finite() {
                return Err(SimError::NonFinite { what, value: v });
            }
        }
        if !self.wavelength.is_finite() || self.wavelength <= 0.0 {
            return Err(SimError::InvalidWavelength(self.wavelength));
        }
        if self.source_half_height <= 0.0 {
            return Err(SimError::DegenerateGeometry(
                "source segment needs positive height (positional uncertainty)".into(),
            ));
        }
        if 2.0 * self.source_half_height > ENDPOINT_TOL {
            return Err(SimError::DegenerateGeometry(format!(
                "source segment spread {} exceeds the stream endpoint tolerance {ENDPOINT_TOL}",
                2.0 * self.source_half_height
            )));
        }
        if self.mirror_x <= 0.0 || self.mirror_y <= 0.0 {
            return Err(SimError::DegenerateGeometry(
                "mirrors must sit strictly off both axes".into(),
            ));
        }
        if self.beamsplitter_x <= self.mirror_x {
            return Err(SimError::DegenerateGeometry(
                "beamsplitters must sit beyond the mirrors".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug)]
pub struct RaritySpec {
    /// Left upper-arm phase shifter.
    pub alpha: f64,
    /// Right upper-arm phase shifter.
    pub beta: f64,
    pub n_source_points: usize,
    pub geometry: RtGeometry,
}

impl RaritySpec {
    pub fn new(alpha: f64, beta: f64, n_source_points: usize) -> Self {
        RaritySpec {
            alpha,
            beta,
            n_source_points,
            geometry: RtGeometry::standard(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.geometry.validate()?;
        if self.n_source_points < 2 {
            return Err(SimError::DegenerateGeometry(format!(
                "need at least 2 source points, got {}",
                self.n_source_points
            )));
        }
        for (what, v) in [("alpha", self.alpha), ("beta", self.beta)] {
            if !v.is_finite() {
                return Err(SimError::NonFinite { what, value: v });
            }
        }
        Ok(())
    }
}

/// The four generated families.
#[derive(Clone, Debug)]
pub struct RtStreams {
    pub left_upper: ShadowStream,
    pub left_lower: ShadowStream,
    pub right_upper: ShadowStream,
    pub right_lower: ShadowStream,
}

/// Source offsets, exactly antisymmetric: `y[n-1-i] == -y[i]` bit-for-bit.
fn source_offsets(n: usize, half_height: f64) -> Vec<f64> {
    let denom = (n - 1) as f64;
    (0..n)
        .map(|i| {
            let k = 2 * i as i64 - (n as i64 - 1);
            half_height * (k as f64) / denom
        })
        .collect()
}

/// Generate the four families for one spec.
///
/// Per source point `s`: `s → mirror → beamsplitter`, with the upper
/// families tagged `Arm::Upper` and carrying the phase shifter.
pub fn rt_streams(spec: &RaritySpec) -> Result<RtStreams> {
    spec.validate()?;
    let g = spec.geometry;
    let ys = source_offsets(spec.n_source_points, g.source_half_height);

    let family = |mirror: [f64; 2], bs: [f64; 2], arm: Arm| -> Result<Vec<PathPolyline>> {
        ys.iter()
            .map(|&y| PathPolyline::new(vec![[0.0, y], mirror, bs], HomotopyTag::Arm(arm)))
            .collect()
    };

    let left_upper = family([-g.mirror_x, g.mirror_y], [-g.beamsplitter_x, 0.0], Arm::Upper)?;
    let left_lower = family([-g.mirror_x, -g.mirror_y], [-g.beamsplitter_x, 0.0], Arm::Lower)?;
    let right_upper = family([g.mirror_x, g.mirror_y], [g.beamsplitter_x, 0.0], Arm::Upper)?;
    let right_lower = family([g.mirror_x, -g.mirror_y], [g.beamsplitter_x, 0.0], Arm::Lower)?;

    Ok(RtStreams {
        left_upper: ShadowStream::new(left_upper, g.wavelength, spec.alpha, StreamLabel::LeftUpper)?,
        left_lower: ShadowStream::new(left_lower, g.wavelength, 0.0, StreamLabel::LeftLower)?,
        right_upper: ShadowStream::new(right_upper, g.wavelength, spec.beta, StreamLabel::RightUpper)?,
        right_lower: ShadowStream::new(right_lower, g.wavelength, 0.0, StreamLabel::RightLower)?,
    })
}

/// Check the left/right pairwise congruence that coordinates the two sides.
pub fn rt_families_congruent(streams: &RtStreams, tol: f64) -> bool {
    let pairwise = |a: &ShadowStream, b: &ShadowStream| {
        a.len() == b.len()
            && a.paths()
                .iter()
                .zip(b.paths().iter())
                .all(|(x, y)| congruent(x, y, tol))
    };
    pairwise(&streams.left_lower, &streams.right_lower)
        && pairwise(&streams.left_upper, &streams.right_upper)
}

fn four_sums(streams: &RtStreams) -> (Phasor, Phasor, Phasor, Phasor) {
    (
        stream_sum(&streams.left_upper),
        stream_sum(&streams.left_lower),
        stream_sum(&streams.right_upper),
        stream_sum(&streams.right_lower),
    )
}

/// Amplitude for both detectors signalling the same way: one beamsplitter
/// reflection factor `i` per pairing of a shifted family with the opposite
/// side's unshifted family.
pub fn rt_amplitude_same(streams: &RtStreams) -> Phasor {
    let (lu, ll, ru, rl) = four_sums(streams);
    Phasor::I * (lu * rl + ru * ll)
}

/// Amplitude for the detectors signalling opposite ways: the transmitted
/// pairing minus the doubly-reflected one (`i² = −1`).
pub fn rt_amplitude_different(streams: &RtStreams) -> Phasor {
    let (lu, ll, ru, rl) = four_sums(streams);
    lu * rl - ru * ll
}

/// The locality-form amplitude: one addend built from the left families
/// only, one from the right families only.
pub fn rt_locality_form(streams: &RtStreams) -> Phasor {
    let (lu, ll, ru, rl) = four_sums(streams);
    Phasor::I * (lu * ll + ru * rl)
}

fn normalization(streams: &RtStreams) -> Result<f64> {
    let r = stream_sum(&streams.left_lower).modulus();
    if r < DEGENERATE_SUM_TOL {
        return Err(SimError::DegenerateStreamSum { modulus: r });
    }
    Ok(4.0 * r.powi(4))
}

/// Joint same-detector probability: `|amplitude_same|² / (4r⁴)` with
/// `r` the modulus of the lower-family sum.
pub fn rt_joint_probability(streams: &RtStreams) -> Result<f64> {
    probability(rt_amplitude_same(streams), normalization(streams)?)
}

/// Complementary different-detector probability under the same normalization.
pub fn rt_probability_different(streams: &RtStreams) -> Result<f64> {
    probability(rt_amplitude_different(streams), normalization(streams)?)
}

/// Convenience: generate the four families and return the joint probability.
pub fn joint_probability(spec: &RaritySpec) -> Result<f64> {
    rt_joint_probability(&rt_streams(spec)?)
}

/// One sweep row comparing the path-sum and matrix-oracle predictions.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct RtSweepRow {
    pub alpha: f64,
    pub beta: f64,
    pub p_same_sp: f64,
    pub p_same_sqm: f64,
    pub abs_diff: f64,
}

/// Evaluate the joint probability on every settings pair via both routes.
pub fn rt_sweep(pairs: &[(f64, f64)], n_source_points: usize) -> Result<Vec<RtSweepRow>> {
    rt_sweep_with_geometry(pairs, n_source_points, RtGeometry::standard())
}

/// [`rt_sweep`] over a custom geometry.
pub fn rt_sweep_with_geometry(
    pairs: &[(f64, f64)],
    n_source_points: usize,
    geometry: RtGeometry,
) -> Result<Vec<RtSweepRow>> {
    pairs
        .iter()
        .map(|&(alpha, beta)| {
            let sp = joint_probability(&RaritySpec {
                alpha,
                beta,
                n_source_points,
                geometry,
            })?;
            let sqm = sqm_rt_joint(alpha, beta);
            Ok(RtSweepRow {
                alpha,
                beta,
                p_same_sp: sp,
                p_same_sqm: sqm,
                abs_diff: (sp - sqm).abs(),
            })
        })
        .collect()
}

/// CSV schema: `alpha,beta,p_same_sp,p_same_sqm,abs_diff`.
pub fn write_rt_sweep_csv<W: Write>(rows: &[RtSweepRow], mut out: W) -> Result<()> {
    writeln!(out, "alpha,beta,p_same_sp,p_same_sqm,abs_diff")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            r.alpha, r.beta, r.p_same_sp, r.p_same_sqm, r.abs_diff
        )?;
    }
    Ok(())
}
