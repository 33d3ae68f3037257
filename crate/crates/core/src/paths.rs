//! Generated path families and their phase sums.
//!
//! A [`ShadowStream`] is a finite, explicitly generated family of
//! polyline paths standing in for a continuum of alternatives between a
//! source and a destination. No weight or measure is ever attached to a
//! path family: every generated path contributes exactly one unit-modulus
//! phasor, and normalization happens only at the probability step.
//! Convergence is checked by refining the family, never by assuming a
//! measure over path space.
//!
//! The mirror-sweep generator reproduces the classic head-to-tail picture:
//! paths reflecting near the specular point carry nearly stationary phase
//! and dominate the sum, while the fan's outer portions curl up and cancel.
//! (Paths that skip the mirror entirely are not generated.)

use std::f64::consts::TAU;
use std::io::Write;
use std::ops::Range;

use crate::error::{Result, SimError};
use crate::phasor::{segment_phase, ActionPhase, Phasor, PhasorAccumulator};

/// Tolerance for "all paths share the same endpoints" (meters).
pub const ENDPOINT_TOL: f64 = 1e-9;

/// Tolerance for declaring an angle loop closed (radians, mod 2π).
pub const LOOP_CLOSURE_TOL: f64 = 1e-9;

/// Interferometer arm labels.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Arm {
    Upper,
    Lower,
}

/// Topological class assigned by the generator that built the path.
///
/// Generators know the topology; tags are never inferred from geometry.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HomotopyTag {
    Generic,
    Arm(Arm),
    Winding(i64),
}

/// Which of the four two-particle streams a family belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StreamLabel {
    LeftUpper,
    LeftLower,
    RightUpper,
    RightLower,
    Generic,
}

/// A piecewise-linear path in the plane.
#[derive(Clone, Debug, PartialEq)]
pub struct PathPolyline {
    vertices: Vec<[f64; 2]>,
    pub homotopy_tag: HomotopyTag,
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    let dx = b[0] - a[0];
    let dy = b[1] - a[1];
    (dx * dx + dy * dy).sqrt()
}

impl PathPolyline {
    /// A path needs at least two vertices and positive total length.
    pub fn new(vertices: Vec<[f64; 2]>, homotopy_tag: HomotopyTag) -> Result<Self> {
        if vertices.len() < 2 {
            return Err(SimError::DegeneratePath(format!(
                "need at least 2 vertices, got {}",
                vertices.len()
            )));
        }
        for v in &vertices {
            if !v[0].is_finite() || !v[1].is_finite() {
                return Err(SimError::DegeneratePath("non-finite vertex".into()));
            }
        }
        let path = PathPolyline {
            vertices,
            homotopy_tag,
        };
        if path.total_length() <= 0.0 {
            return Err(SimError::DegeneratePath(
                "total length must be positive".into(),
            ));
        }
        Ok(path)
    }

    pub fn vertices(&self) -> &[[f64; 2]] {
        &self.vertices
    }

    pub fn first(&self) -> [f64; 2] {
        self.vertices[0]
    }

    pub fn last(&self) -> [f64; 2] {
        *self.vertices.last().expect("non-empty by construction")
    }

    pub fn segment_lengths(&self) -> Vec<f64> {
        self.vertices.windows(2).map(|w| dist(w[0], w[1])).collect()
    }

    pub fn total_length(&self) -> f64 {
        self.segment_lengths().iter().sum()
    }
}

/// A finite generated family of paths plus its arm phase-shift setting.
#[derive(Clone, Debug)]
pub struct ShadowStream {
    paths: Vec<PathPolyline>,
    wavelength: f64,
    phase_shift: f64,
    pub label: StreamLabel,
}

impl ShadowStream {
    pub fn new(
        paths: Vec<PathPolyline>,
        wavelength: f64,
        phase_shift: f64,
        label: StreamLabel,
    ) -> Result<Self> {
        if paths.is_empty() {
            return Err(SimError::InvalidStream("stream has no paths".into()));
        }
        if !wavelength.is_finite() || wavelength <= 0.0 {
            return Err(SimError::InvalidWavelength(wavelength));
        }
        if !phase_shift.is_finite() {
            return Err(SimError::NonFinite {
                what: "phase shift",
                value: phase_shift,
            });
        }
        let src = paths[0].first();
        let dst = paths[0].last();
        for p in &paths {
            if dist(p.first(), src) > ENDPOINT_TOL || dist(p.last(), dst) > ENDPOINT_TOL {
                return Err(SimError::InvalidStream(format!(
                    "paths do not share endpoints within {ENDPOINT_TOL} m"
                )));
            }
        }
        Ok(ShadowStream {
            paths,
            wavelength,
            phase_shift,
            label,
        })
    }

    pub fn paths(&self) -> &[PathPolyline] {
        &self.paths
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    pub fn phase_shift(&self) -> f64 {
        self.phase_shift
    }

    /// Same family, different phase-shift setting.
    pub fn with_phase_shift(&self, phase_shift: f64) -> Result<Self> {
        ShadowStream::new(
            self.paths.clone(),
            self.wavelength,
            phase_shift,
            self.label,
        )
    }
}

fn side_of_line(a: [f64; 2], b: [f64; 2], p: [f64; 2]) -> f64 {
    (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0])
}

/// Sweep `n_paths` reflection points along a mirror segment, producing the
/// two-segment fan `source → mᵢ → sink` in segment order.
///
/// Source and sink must lie strictly on the same side of the mirror line,
/// and the mirror segment must have positive length.
pub fn mirror_paths(
    source: [f64; 2],
    sink: [f64; 2],
    mirror: ([f64; 2], [f64; 2]),
    n_paths: usize,
    wavelength: f64,
) -> Result<ShadowStream> {
    let (m0, m1) = mirror;
    if n_paths < 2 {
        return Err(SimError::DegenerateGeometry(format!(
            "mirror sweep needs at least 2 paths, got {n_paths}"
        )));
    }
    if dist(m0, m1) <= 0.0 {
        return Err(SimError::DegenerateGeometry(
            "mirror segment has zero length".into(),
        ));
    }
    let same_side = side_of_line(m0, m1, source) * side_of_line(m0, m1, sink);
    if !same_side.is_finite() || same_side <= 0.0 {
        return Err(SimError::DegenerateGeometry(
            "source and sink must lie strictly on the same side of the mirror line".into(),
        ));
    }
    let denom = (n_paths - 1) as f64;
    let mut paths = Vec::with_capacity(n_paths);
    for i in 0..n_paths {
        let t = i as f64 / denom;
        let m = [m0[0] + t * (m1[0] - m0[0]), m0[1] + t * (m1[1] - m0[1])];
        paths.push(PathPolyline::new(
            vec![source, m, sink],
            HomotopyTag::Generic,
        )?);
    }
    ShadowStream::new(paths, wavelength, 0.0, StreamLabel::Generic)
}

/// Canonical symmetric mirror fan used by the demo and the self-checks:
/// source and sink one unit above a flat mirror of half-width 0.5,
/// horizontally offset by ±1.
pub fn symmetric_mirror_family(n_paths: usize, wavelength: f64) -> Result<ShadowStream> {
    mirror_paths(
        [-1.0, 1.0],
        [1.0, 1.0],
        ([-0.5, 0.0], [0.5, 0.0]),
        n_paths,
        wavelength,
    )
}

/// Default wavelength for [`symmetric_mirror_family`]; puts roughly ten
/// stationary-phase zones across the mirror so the fan's tails curl up.
pub const MIRROR_DEMO_WAVELENGTH: f64 = 2e-3;

/// Total phase accumulated along a path: the sum of its segment phases.
pub fn path_phase(path: &PathPolyline, wavelength: f64) -> Result<ActionPhase> {
    let mut total = 0.0;
    for len in path.segment_lengths() {
        total += segment_phase(len, wavelength)?;
    }
    ActionPhase::new(total)
}

fn unit_term(path: &PathPolyline, wavelength: f64, phase_shift: f64) -> Phasor {
    let phase = path_phase(path, wavelength)
        .expect("stream was validated at construction")
        .reduced();
    // Reduce before adding the shifter so the addition happens at O(1)
    // magnitude rather than at the raw optical phase.
    Phasor::from_polar(1.0, phase + phase_shift)
}

/// Sum of unit phasors over the whole family, in path order, with the
/// stream's phase shift applied to every term.
pub fn stream_sum(stream: &ShadowStream) -> Phasor {
    let mut acc = PhasorAccumulator::new();
    for path in stream.paths() {
        acc.add(unit_term(path, stream.wavelength, stream.phase_shift));
    }
    acc.value()
}

/// Head-to-tail prefix sums of the family's unit phasors, starting at the
/// origin; `n_paths + 1` points in total. The final point equals
/// [`stream_sum`] exactly (same accumulation order and compensation).
pub fn cornu_partial_sums(stream: &ShadowStream) -> Vec<[f64; 2]> {
    let mut acc = PhasorAccumulator::new();
    let mut out = Vec::with_capacity(stream.len() + 1);
    out.push([0.0, 0.0]);
    for path in stream.paths() {
        acc.add(unit_term(path, stream.wavelength, stream.phase_shift));
        let v = acc.value();
        out.push([v.re, v.im]);
    }
    out
}

/// Sum over a contiguous sub-family only. An empty range sums to zero.
pub fn restricted_sum(stream: &ShadowStream, range: Range<usize>) -> Result<Phasor> {
    if range.start > range.end || range.end > stream.len() {
        return Err(SimError::RangeOutOfBounds {
            start: range.start,
            end: range.end,
            len: stream.len(),
        });
    }
    let mut acc = PhasorAccumulator::new();
    for path in &stream.paths()[range] {
        acc.add(unit_term(path, stream.wavelength, stream.phase_shift));
    }
    Ok(acc.value())
}

/// Congruence up to rigid motion: the ordered segment-length sequences
/// match within `tol` per segment.
pub fn congruent(a: &PathPolyline, b: &PathPolyline, tol: f64) -> bool {
    assert!(tol > 0.0, "congruence tolerance must be positive");
    let la = a.segment_lengths();
    let lb = b.segment_lengths();
    la.len() == lb.len()
        && la
            .iter()
            .zip(lb.iter())
            .all(|(x, y)| (x - y).abs() <= tol)
}

fn wrap_to_half_open(d: f64) -> f64 {
    // Map to (-π, π]; a step of exactly π counts as counterclockwise.
    let r = d.rem_euclid(TAU);
    if r > std::f64::consts::PI {
        r - TAU
    } else {
        r
    }
}

/// Signed number of net counterclockwise turns of a closed angle loop.
///
/// The loop must close (first ≡ last mod 2π) and be sampled densely enough
/// that the summed wrapped steps land on a whole number of turns.
pub fn winding_number(angles: &[f64]) -> Result<i64> {
    let (first, last) = match (angles.first(), angles.last()) {
        (Some(&f), Some(&l)) => (f, l),
        _ => return Err(SimError::InvalidStream("empty angle loop".into())),
    };
    let closure = wrap_to_half_open(last - first).abs();
    // π is the wrap point, so a closed loop shows a gap near 0 only.
    if closure > LOOP_CLOSURE_TOL {
        return Err(SimError::OpenLoop { gap: closure });
    }
    let mut total = 0.0;
    for w in angles.windows(2) {
        total += wrap_to_half_open(w[1] - w[0]);
    }
    let turns = (total / TAU).round();
    if (total - turns * TAU).abs() > 1e-6 {
        return Err(SimError::OpenLoop {
            gap: (total - turns * TAU).abs(),
        });
    }
    Ok(turns as i64)
}

/// Write the head-to-tail trace as CSV: `index,partial_re,partial_im,path_phase`.
///
/// Row 0 is the origin and has no generating path; its phase column is 0.
/// Row `i > 0` carries the full (unreduced) phase of path `i - 1`.
pub fn write_cornu_csv<W: Write>(stream: &ShadowStream, mut out: W) -> Result<()> {
    writeln!(out, "index,partial_re,partial_im,path_phase")?;
    let partials = cornu_partial_sums(stream);
    for (i, p) in partials.iter().enumerate() {
        let phase = if i == 0 {
            0.0
        } else {
            path_phase(&stream.paths()[i - 1], stream.wavelength())?.radians()
        };
        writeln!(out, "{},{},{},{}", i, p[0], p[1], phase)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phasor::phasor_from_phase;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn straight(len: f64) -> PathPolyline {
        PathPolyline::new(vec![[0.0, 0.0], [len, 0.0]], HomotopyTag::Generic).unwrap()
    }

    #[test]
    fn polyline_validation() {
        assert!(PathPolyline::new(vec![[0.0, 0.0]], HomotopyTag::Generic).is_err());
        assert!(PathPolyline::new(vec![[1.0, 1.0], [1.0, 1.0]], HomotopyTag::Generic).is_err());
        assert!(PathPolyline::new(vec![[0.0, 0.0], [f64::NAN, 0.0]], HomotopyTag::Generic).is_err());
    }

    #[test]
    fn mirror_paths_symmetric_middle_is_specular() {
        let stream = symmetric_mirror_family(3, MIRROR_DEMO_WAVELENGTH).unwrap();
        let lengths: Vec<f64> = stream.paths().iter().map(|p| p.total_length()).collect();
        assert!(lengths[1] < lengths[0]);
        assert!(lengths[1] < lengths[2]);
        // Specular reflection point of the symmetric setup is the mirror center.
        assert_eq!(stream.paths()[1].vertices()[1], [0.0, 0.0]);
    }

    #[test]
    fn mirror_paths_two_gives_extremes() {
        let stream = symmetric_mirror_family(2, MIRROR_DEMO_WAVELENGTH).unwrap();
        assert_eq!(stream.paths()[0].vertices()[1], [-0.5, 0.0]);
        assert_eq!(stream.paths()[1].vertices()[1], [0.5, 0.0]);
    }

    #[test]
    fn mirror_paths_rejects_degenerate_setups() {
        let m = ([-0.5, 0.0], [0.5, 0.0]);
        assert!(mirror_paths([-1.0, 1.0], [1.0, 1.0], m, 1, 1.0).is_err());
        assert!(mirror_paths([-1.0, 1.0], [1.0, -1.0], m, 4, 1.0).is_err());
        assert!(mirror_paths([-1.0, 0.0], [1.0, 1.0], m, 4, 1.0).is_err());
        let degenerate = ([0.3, 0.0], [0.3, 0.0]);
        assert!(mirror_paths([-1.0, 1.0], [1.0, 1.0], degenerate, 4, 1.0).is_err());
    }

    /// Independent oracle: recompute every fan length straight from the
    /// geometry and check the sequence is convex with its minimum at the
    /// central (specular) index.
    #[test]
    fn mirror_fan_lengths_convex_with_central_minimum() {
        let n = 1001;
        let stream = symmetric_mirror_family(n, MIRROR_DEMO_WAVELENGTH).unwrap();
        let mut oracle = Vec::with_capacity(n);
        for i in 0..n {
            let t = i as f64 / (n - 1) as f64;
            let mx = -0.5 + t;
            let l1 = ((mx + 1.0).powi(2) + 1.0).sqrt();
            let l2 = ((1.0 - mx).powi(2) + 1.0).sqrt();
            oracle.push(l1 + l2);
        }
        for (p, o) in stream.paths().iter().zip(oracle.iter()) {
            assert!((p.total_length() - o).abs() < 1e-12);
        }
        let argmin = oracle
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap()
            .0;
        assert_eq!(argmin, n / 2);
        for w in oracle.windows(3) {
            assert!(w[2] - w[1] >= w[1] - w[0] - 1e-12, "not convex");
        }
    }

    #[test]
    fn path_phase_examples() {
        let lambda = 1.0;
        assert!((path_phase(&straight(lambda), lambda).unwrap().radians() - TAU).abs() < 1e-12);

        let two_halves = PathPolyline::new(
            vec![[0.0, 0.0], [0.5, 0.0], [1.0, 0.0]],
            HomotopyTag::Generic,
        )
        .unwrap();
        assert!((path_phase(&two_halves, lambda).unwrap().radians() - TAU).abs() < 1e-12);

        // Symmetric fan whose specular path has total length 10λ (3-4-5 triangles).
        let stream = mirror_paths([-3.0, 4.0], [3.0, 4.0], ([-1.0, 0.0], [1.0, 0.0]), 3, 1.0)
            .unwrap();
        let specular = &stream.paths()[1];
        assert_eq!(specular.total_length(), 10.0);
        assert_eq!(
            path_phase(specular, 1.0).unwrap().radians(),
            20.0 * PI
        );
    }

    #[test]
    fn stream_sum_single_path_and_shift() {
        let lambda = 0.75;
        let path = straight(1.3);
        let phase = path_phase(&path, lambda).unwrap().reduced();
        let stream =
            ShadowStream::new(vec![path.clone()], lambda, 0.0, StreamLabel::Generic).unwrap();
        let s = stream_sum(&stream);
        assert!((s - phasor_from_phase(phase).unwrap()).modulus() < 1e-12);
        assert!((s.modulus() - 1.0).abs() < 1e-12);

        let alpha = 0.8128;
        let shifted = stream.with_phase_shift(alpha).unwrap();
        let expected = s * phasor_from_phase(alpha).unwrap();
        assert!((stream_sum(&shifted) - expected).modulus() < 1e-12);
    }

    #[test]
    fn congruent_streams_have_equal_sums() {
        // Mirror-image fans: exact sign flips keep every length bit-identical.
        let left = mirror_paths(
            [-2.0, 1.0],
            [-0.25, 1.5],
            ([-1.5, 0.0], [-0.5, 0.0]),
            64,
            3e-3,
        )
        .unwrap();
        let right = mirror_paths(
            [2.0, 1.0],
            [0.25, 1.5],
            ([1.5, 0.0], [0.5, 0.0]),
            64,
            3e-3,
        )
        .unwrap();
        for (a, b) in left.paths().iter().zip(right.paths().iter()) {
            assert!(congruent(a, b, 1e-12));
        }
        let sl = stream_sum(&left);
        let sr = stream_sum(&right);
        assert!((sl - sr).modulus() < 1e-12);
    }

    #[test]
    fn cornu_single_path() {
        let lambda = 0.5;
        let path = straight(0.8);
        let phase = path_phase(&path, lambda).unwrap().reduced();
        let stream = ShadowStream::new(vec![path], lambda, 0.0, StreamLabel::Generic).unwrap();
        let trace = cornu_partial_sums(&stream);
        assert_eq!(trace.len(), 2);
        assert_eq!(trace[0], [0.0, 0.0]);
        let unit = phasor_from_phase(phase).unwrap();
        assert!((trace[1][0] - unit.re).abs() < 1e-15);
        assert!((trace[1][1] - unit.im).abs() < 1e-15);
    }

    #[test]
    fn cornu_final_point_equals_stream_sum_exactly() {
        let stream = symmetric_mirror_family(501, MIRROR_DEMO_WAVELENGTH).unwrap();
        let trace = cornu_partial_sums(&stream);
        let s = stream_sum(&stream);
        let last = trace.last().unwrap();
        assert_eq!(last[0], s.re);
        assert_eq!(last[1], s.im);
    }

    #[test]
    fn cornu_trace_is_point_symmetric_about_midpoint() {
        // Symmetric fan lengths satisfy L_i = L_{n-1-i}, so partial sums obey
        // S_k + S_{n-k} = S_n up to rounding.
        let n = 2001;
        let stream = symmetric_mirror_family(n, MIRROR_DEMO_WAVELENGTH).unwrap();
        let trace = cornu_partial_sums(&stream);
        let full = trace[n];
        for k in 0..=n {
            let a = trace[k];
            let b = trace[n - k];
            assert!((a[0] + b[0] - full[0]).abs() < 1e-6);
            assert!((a[1] + b[1] - full[1]).abs() < 1e-6);
        }
    }

    #[test]
    fn restricted_sum_full_range_matches_stream_sum() {
        let stream = symmetric_mirror_family(301, MIRROR_DEMO_WAVELENGTH).unwrap();
        let full = restricted_sum(&stream, 0..stream.len()).unwrap();
        let s = stream_sum(&stream);
        assert_eq!(full.re, s.re);
        assert_eq!(full.im, s.im);

        assert_eq!(restricted_sum(&stream, 10..10).unwrap(), Phasor::ZERO);
        assert!(restricted_sum(&stream, 0..stream.len() + 1).is_err());
    }

    /// Independent oracle for the stationary-phase split: raw loop over the
    /// fan geometry with plain (uncompensated) accumulation, no stream types.
    fn oracle_partial(n: usize, lambda: f64, range: Range<usize>) -> Phasor {
        let mut re = 0.0;
        let mut im = 0.0;
        for i in range {
            let t = i as f64 / (n - 1) as f64;
            let mx = -0.5 + t;
            let l1 = ((mx + 1.0).powi(2) + 1.0).sqrt();
            let l2 = ((1.0 - mx).powi(2) + 1.0).sqrt();
            let phase = (TAU * ((l1 + l2) / lambda)).rem_euclid(TAU);
            re += phase.cos();
            im += phase.sin();
        }
        Phasor::new(re, im)
    }

    #[test]
    fn stationary_phase_dominance_thresholds() {
        let n = 10_001;
        let lambda = MIRROR_DEMO_WAVELENGTH;
        let stream = symmetric_mirror_family(n, lambda).unwrap();
        let full = stream_sum(&stream);
        let tenth = n / 10;
        let central = restricted_sum(&stream, (n / 2 - tenth / 2)..(n / 2 + tenth / 2)).unwrap();
        let left_tail = restricted_sum(&stream, 0..tenth).unwrap();
        let right_tail = restricted_sum(&stream, (n - tenth)..n).unwrap();

        // Implementation agrees with the independent oracle.
        assert!((full - oracle_partial(n, lambda, 0..n)).modulus() < 1e-9 * full.modulus());
        assert!(
            (central - oracle_partial(n, lambda, (n / 2 - tenth / 2)..(n / 2 + tenth / 2)))
                .modulus()
                < 1e-9 * full.modulus()
        );

        assert!(central.modulus() >= 0.5 * full.modulus());
        assert!(left_tail.modulus() <= 0.2 * full.modulus());
        assert!(right_tail.modulus() <= 0.2 * full.modulus());
    }

    #[test]
    fn refinement_stabilizes_sum_direction() {
        let coarse = symmetric_mirror_family(10_000, MIRROR_DEMO_WAVELENGTH).unwrap();
        let fine = symmetric_mirror_family(20_000, MIRROR_DEMO_WAVELENGTH).unwrap();
        let a = stream_sum(&coarse).phase();
        let b = stream_sum(&fine).phase();
        let diff = wrap_to_half_open(a - b).abs();
        assert!(diff < 1e-3, "direction moved by {diff} rad under refinement");
    }

    #[test]
    fn congruence_examples() {
        let path = PathPolyline::new(
            vec![[0.0, 0.0], [1.0, 1.0], [2.5, 0.5]],
            HomotopyTag::Generic,
        )
        .unwrap();
        let mirrored = PathPolyline::new(
            vec![[0.0, 0.0], [-1.0, 1.0], [-2.5, 0.5]],
            HomotopyTag::Generic,
        )
        .unwrap();
        let scaled = PathPolyline::new(
            vec![[0.0, 0.0], [2.0, 2.0], [5.0, 1.0]],
            HomotopyTag::Generic,
        )
        .unwrap();
        assert!(congruent(&path, &mirrored, 1e-12));
        assert!(!congruent(&path, &scaled, 1e-12));
        assert!(!congruent(&path, &straight(1.0), 1e-12));
    }

    #[test]
    fn winding_number_examples() {
        assert_eq!(winding_number(&[0.4, 0.4, 0.4]).unwrap(), 0);

        let ccw: Vec<f64> = (0..=8).map(|i| i as f64 * TAU / 8.0).collect();
        assert_eq!(winding_number(&ccw).unwrap(), 1);

        let cw2: Vec<f64> = (0..=16).map(|i| -(i as f64) * TAU / 8.0).collect();
        assert_eq!(winding_number(&cw2).unwrap(), -2);

        assert!(winding_number(&[0.0, 1.0]).is_err());
        assert!(winding_number(&[]).is_err());
    }

    #[test]
    fn cornu_csv_schema() {
        let stream = symmetric_mirror_family(4, MIRROR_DEMO_WAVELENGTH).unwrap();
        let mut buf = Vec::new();
        write_cornu_csv(&stream, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "index,partial_re,partial_im,path_phase");
        assert_eq!(lines.count(), 5);
    }

    fn loop_with_winding(base: f64, turns: i64, samples: usize) -> Vec<f64> {
        let steps = samples.max(4 * turns.unsigned_abs() as usize + 4);
        (0..=steps)
            .map(|i| base + TAU * turns as f64 * i as f64 / steps as f64)
            .collect()
    }

    proptest! {
        #[test]
        fn winding_is_additive_under_concatenation(
            w1 in -5i64..5,
            w2 in -5i64..5,
            base in 0.0..TAU,
        ) {
            let mut a = loop_with_winding(base, w1, 32);
            let b = loop_with_winding(base, w2, 32);
            prop_assert_eq!(winding_number(&a).unwrap(), w1);
            prop_assert_eq!(winding_number(&b).unwrap(), w2);
            a.extend_from_slice(&b);
            prop_assert_eq!(winding_number(&a).unwrap(), w1 + w2);
        }

        #[test]
        fn congruent_paths_have_close_phases(
            seg_a in 0.1..5.0f64,
            seg_b in 0.1..5.0f64,
            bump_a in -0.5e-7..0.5e-7f64,
            bump_b in -0.5e-7..0.5e-7f64,
            lambda in 0.01..2.0f64,
        ) {
            // Perturb each segment by at most tol/k so the total length
            // difference stays within tol.
            let tol = 1e-7;
            let a = PathPolyline::new(
                vec![[0.0, 0.0], [seg_a, 0.0], [seg_a, seg_b]],
                HomotopyTag::Generic,
            ).unwrap();
            let b = PathPolyline::new(
                vec![[0.0, 0.0], [seg_a + bump_a, 0.0], [seg_a + bump_a, seg_b + bump_b]],
                HomotopyTag::Generic,
            ).unwrap();
            prop_assert!(congruent(&a, &b, tol));
            let pa = path_phase(&a, lambda).unwrap().radians();
            let pb = path_phase(&b, lambda).unwrap().radians();
            prop_assert!((pa - pb).abs() < TAU * tol / lambda);
        }
    }
}
