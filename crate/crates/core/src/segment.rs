//! Envelope-based heart-sound detection: peak finding, adaptive peak
//! filtration, S1/S2 sorting by inter-peak delays, and conversion of
//! peaks to (start, peak, end) boundaries.

use crate::error::{Error, Result};
use crate::io::SoundKind;
use crate::signal::Signal;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Detected peak times with optional per-peak classification.
#[derive(Debug, Clone, Default)]
pub struct DetectionSet {
    peaks_s: Vec<f64>,
    kinds: Vec<Option<SoundKind>>,
}

impl DetectionSet {
    /// Unclassified detections; times must be strictly increasing.
    pub fn new(peaks_s: Vec<f64>) -> Result<Self> {
        let kinds = vec![None; peaks_s.len()];
        Self::with_kinds(peaks_s, kinds)
    }

    pub fn with_kinds(peaks_s: Vec<f64>, kinds: Vec<Option<SoundKind>>) -> Result<Self> {
        if kinds.len() != peaks_s.len() {
            return Err(Error::InvalidParam(
                "kinds length must match peak count".into(),
            ));
        }
        if peaks_s.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParam(
                "peak times must be strictly increasing".into(),
            ));
        }
        Ok(Self { peaks_s, kinds })
    }

    pub fn peaks_s(&self) -> &[f64] {
        &self.peaks_s
    }

    pub fn kinds(&self) -> &[Option<SoundKind>] {
        &self.kinds
    }

    pub fn len(&self) -> usize {
        self.peaks_s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.peaks_s.is_empty()
    }

    /// Times of peaks classified as `kind`.
    pub fn times_of(&self, kind: SoundKind) -> Vec<f64> {
        self.peaks_s
            .iter()
            .zip(&self.kinds)
            .filter(|(_, k)| **k == Some(kind))
            .map(|(t, _)| *t)
            .collect()
    }
}

/// Kind of a segmented region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RegionKind {
    S1,
    S2,
    Systole,
    Diastole,
    Cycle,
    Unknown,
}

impl From<SoundKind> for RegionKind {
    fn from(k: SoundKind) -> Self {
        match k {
            SoundKind::S1 => RegionKind::S1,
            SoundKind::S2 => RegionKind::S2,
        }
    }
}

impl fmt::Display for RegionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            RegionKind::S1 => "S1",
            RegionKind::S2 => "S2",
            RegionKind::Systole => "systole",
            RegionKind::Diastole => "diastole",
            RegionKind::Cycle => "cycle",
            RegionKind::Unknown => "unknown",
        };
        write!(f, "{s}")
    }
}

/// One segmented event: boundaries and peak location in seconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentEvent {
    pub start_s: f64,
    pub peak_s: f64,
    pub end_s: f64,
    pub kind: RegionKind,
}

/// Per-sound boundaries produced by segmentation.
#[derive(Debug, Clone, Default)]
pub struct SegmentSet {
    events: Vec<SegmentEvent>,
}

impl SegmentSet {
    /// Sorts by start time and validates `start <= peak <= end` plus
    /// non-overlap of events of equal kind.
    pub fn new(mut events: Vec<SegmentEvent>) -> Result<Self> {
        for e in &events {
            if !(e.start_s <= e.peak_s && e.peak_s <= e.end_s) {
                return Err(Error::InvalidParam(format!(
                    "event must satisfy start <= peak <= end, got {e:?}"
                )));
            }
        }
        events.sort_by(|a, b| a.start_s.partial_cmp(&b.start_s).unwrap());
        let mut last_end: std::collections::HashMap<RegionKind, f64> =
            std::collections::HashMap::new();
        for e in &events {
            if let Some(end) = last_end.get(&e.kind) {
                if e.start_s < *end - 1e-12 {
                    return Err(Error::InvalidParam(format!(
                        "overlapping {} events at {:.4}s",
                        e.kind, e.start_s
                    )));
                }
            }
            last_end.insert(e.kind, e.end_s);
        }
        Ok(Self { events })
    }

    pub fn events(&self) -> &[SegmentEvent] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn events_of(&self, kind: RegionKind) -> impl Iterator<Item = &SegmentEvent> {
        self.events.iter().filter(move |e| e.kind == kind)
    }

    /// Peak times of events of `kind`, in order.
    pub fn peaks_of(&self, kind: RegionKind) -> Vec<f64> {
        self.events_of(kind).map(|e| e.peak_s).collect()
    }
}

fn check_envelope(env: &Signal) -> Result<()> {
    if env.samples().iter().any(|v| *v < -1e-12) {
        return Err(Error::InvalidParam(
            "detector input must be a non-negative envelope".into(),
        ));
    }
    Ok(())
}

/// Interior local maxima; plateaus report their center sample.
fn local_maxima(env: &[f64], include_edges: bool) -> Vec<usize> {
    let n = env.len();
    let mut peaks = Vec::new();
    if n < 2 {
        return peaks;
    }
    if include_edges && env[0] > env[1] {
        peaks.push(0);
    }
    let mut i = 1;
    while i + 1 < n {
        if env[i] > env[i - 1] {
            // Possible plateau start.
            let start = i;
            while i + 1 < n && env[i + 1] == env[i] {
                i += 1;
            }
            if i + 1 < n && env[i + 1] < env[i] {
                peaks.push((start + i) / 2);
            } else if i + 1 == n && include_edges {
                peaks.push((start + i) / 2);
            }
        }
        i += 1;
    }
    if include_edges && n >= 2 && env[n - 1] > env[n - 2] {
        peaks.push(n - 1);
    }
    peaks
}

/// Simple local-maxima detection: peaks above `height` (as a fraction of
/// the envelope maximum) kept greedily in descending height order subject
/// to a minimum spacing. Defaults: 270 ms spacing, height 0.3.
pub fn naive_detect(env: &Signal, min_distance_s: f64, height: f64) -> Result<DetectionSet> {
    check_envelope(env)?;
    if !(min_distance_s >= 0.0) {
        return Err(Error::InvalidParam("minimum distance must be >= 0".into()));
    }
    let samples = env.samples();
    let max = samples.iter().cloned().fold(f64::MIN, f64::max);
    let threshold = height * max;
    let mut candidates: Vec<usize> = local_maxima(samples, false)
        .into_iter()
        .filter(|&i| samples[i] > threshold)
        .collect();
    // Tallest first; ties resolved by earlier time for determinism.
    candidates.sort_by(|&a, &b| {
        samples[b]
            .partial_cmp(&samples[a])
            .unwrap()
            .then(a.cmp(&b))
    });
    let min_dist = (min_distance_s * env.fs()).round() as i64;
    let mut kept: Vec<i64> = Vec::new();
    for &c in &candidates {
        if kept.iter().all(|&k| (c as i64 - k).abs() >= min_dist) {
            kept.push(c as i64);
        }
    }
    kept.sort_unstable();
    DetectionSet::new(kept.iter().map(|&i| i as f64 / env.fs()).collect())
}

/// Adaptive peak filtration: every local maximum is a candidate, and a
/// candidate is confirmed once the envelope drops below `drop_fraction`
/// of its value before a higher candidate appears; a higher candidate
/// supersedes a pending lower one. The criterion is a ratio, so the
/// result is invariant to envelope scaling.
pub fn adaptive_detect(env: &Signal, drop_fraction: f64) -> Result<DetectionSet> {
    check_envelope(env)?;
    if !(0.0 < drop_fraction && drop_fraction < 1.0) {
        return Err(Error::InvalidParam(format!(
            "drop fraction must be in (0,1), got {drop_fraction}"
        )));
    }
    let samples = env.samples();
    let candidate_idx = local_maxima(samples, true);
    let mut is_candidate = vec![false; samples.len()];
    for &i in &candidate_idx {
        is_candidate[i] = true;
    }

    let mut confirmed: Vec<usize> = Vec::new();
    let mut pending: Option<(usize, f64)> = None;
    for (i, &v) in samples.iter().enumerate() {
        if let Some((_, pv)) = pending {
            if v < drop_fraction * pv {
                let (pi, _) = pending.take().unwrap();
                confirmed.push(pi);
            }
        }
        if is_candidate[i] {
            match pending {
                None => pending = Some((i, v)),
                Some((_, pv)) if v > pv => pending = Some((i, v)),
                _ => {}
            }
        }
    }
    if let Some((pi, _)) = pending {
        confirmed.push(pi);
    }
    DetectionSet::new(confirmed.iter().map(|&i| i as f64 / env.fs()).collect())
}

/// Classify peaks as S1/S2 from consecutive delays: a delay shorter than
/// its predecessor is a systole, labeling its endpoints (S1, S2); longer
/// is a diastole, labeling (S2, S1). Conflicting assignments resolve by
/// majority vote; tied comparisons leave peaks unknown.
pub fn sort_peaks(det: &DetectionSet) -> Result<DetectionSet> {
    let peaks = det.peaks_s();
    let n = peaks.len();
    if n < 3 {
        return Err(Error::Unsupported(
            "insufficient peaks to sort (need >= 3)".into(),
        ));
    }
    const TIE_TOL: f64 = 1e-9;
    #[derive(Clone, Copy, PartialEq)]
    enum Interval {
        Systole,
        Diastole,
        Tie,
    }
    let delays: Vec<f64> = peaks.windows(2).map(|w| w[1] - w[0]).collect();
    let mut types = vec![Interval::Tie; delays.len()];
    for i in 1..delays.len() {
        types[i] = if delays[i] < delays[i - 1] - TIE_TOL {
            Interval::Systole
        } else if delays[i] > delays[i - 1] + TIE_TOL {
            Interval::Diastole
        } else {
            Interval::Tie
        };
    }
    // The first interval has no predecessor; infer it from the second,
    // since interval types alternate in a clean recording.
    if delays.len() >= 2 {
        types[0] = match types[1] {
            Interval::Systole => Interval::Diastole,
            Interval::Diastole => Interval::Systole,
            Interval::Tie => Interval::Tie,
        };
    }

    let ties = types.iter().filter(|t| **t == Interval::Tie).count();
    if ties > 0 {
        log::warn!(
            "sort_peaks: {ties}/{} ambiguous equal-delay intervals left unlabeled",
            types.len()
        );
    }

    let mut s1_votes = vec![0i32; n];
    let mut s2_votes = vec![0i32; n];
    for (i, t) in types.iter().enumerate() {
        match t {
            Interval::Systole => {
                s1_votes[i] += 1;
                s2_votes[i + 1] += 1;
            }
            Interval::Diastole => {
                s2_votes[i] += 1;
                s1_votes[i + 1] += 1;
            }
            Interval::Tie => {}
        }
    }
    let kinds: Vec<Option<SoundKind>> = (0..n)
        .map(|i| {
            if s1_votes[i] > s2_votes[i] {
                Some(SoundKind::S1)
            } else if s2_votes[i] > s1_votes[i] {
                Some(SoundKind::S2)
            } else {
                None
            }
        })
        .collect();
    DetectionSet::with_kinds(peaks.to_vec(), kinds)
}

/// Convert detected peaks to (start, peak, end) events by walking out
/// from each peak to the times where the envelope drops below
/// `level_fraction` of the peak value (sub-sample linear interpolation).
/// Boundaries are clipped at the signal edges and at midpoints to
/// neighboring detections.
pub fn peaks_to_boundaries(
    env: &Signal,
    det: &DetectionSet,
    level_fraction: f64,
) -> Result<SegmentSet> {
    check_envelope(env)?;
    if !(0.0 < level_fraction && level_fraction <= 1.0) {
        return Err(Error::InvalidParam(format!(
            "level fraction must be in (0,1], got {level_fraction}"
        )));
    }
    let samples = env.samples();
    let fs = env.fs();
    let n = samples.len();
    let duration = env.duration_s();
    let mut events = Vec::with_capacity(det.len());
    for (k, &t_peak) in det.peaks_s().iter().enumerate() {
        let idx = ((t_peak * fs).round() as usize).min(n - 1);
        if !(0.0..=duration).contains(&t_peak) {
            return Err(Error::InvalidParam(format!(
                "detection at {t_peak}s lies outside the envelope"
            )));
        }
        let peak_val = samples[idx];
        let thr = level_fraction * peak_val;
        let left_clip = if k > 0 {
            0.5 * (det.peaks_s()[k - 1] + t_peak)
        } else {
            0.0
        };
        let right_clip = if k + 1 < det.len() {
            0.5 * (det.peaks_s()[k + 1] + t_peak)
        } else {
            duration
        };

        // Walk left for the last time before the peak below threshold.
        let mut start = left_clip;
        let mut j = idx;
        let mut found = false;
        while j > 0 {
            j -= 1;
            if samples[j] < thr {
                let denom = samples[j + 1] - samples[j];
                let frac = if denom > 0.0 {
                    (thr - samples[j]) / denom
                } else {
                    1.0
                };
                start = (j as f64 + frac) / fs;
                found = true;
                break;
            }
        }
        if !found || start < left_clip {
            start = left_clip;
        }

        // Walk right for the first time after the peak below threshold.
        let mut end = right_clip;
        let mut j = idx;
        let mut found = false;
        while j + 1 < n {
            j += 1;
            if samples[j] < thr {
                let denom = samples[j - 1] - samples[j];
                let frac = if denom > 0.0 {
                    (samples[j - 1] - thr) / denom
                } else {
                    0.0
                };
                end = (j as f64 - 1.0 + frac) / fs;
                found = true;
                break;
            }
        }
        if !found || end > right_clip {
            end = right_clip;
        }

        let start = start.min(t_peak);
        let end = end.max(t_peak);
        let kind = det.kinds()[k].map_or(RegionKind::Unknown, RegionKind::from);
        events.push(SegmentEvent {
            start_s: start,
            peak_s: t_peak,
            end_s: end,
            kind,
        });
    }
    SegmentSet::new(events)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn env_signal(samples: Vec<f64>, fs: f64) -> Signal {
        Signal::new(samples, fs).unwrap()
    }

    fn gaussian_bumps(centers: &[(usize, f64)], n: usize, sigma: f64) -> Vec<f64> {
        (0..n)
            .map(|i| {
                centers
                    .iter()
                    .map(|&(c, a)| {
                        let t = (i as f64 - c as f64) / sigma;
                        a * (-0.5 * t * t).exp()
                    })
                    .sum()
            })
            .collect()
    }

    #[test]
    fn naive_keeps_well_separated_bumps() {
        let fs = 1000.0;
        let env = env_signal(gaussian_bumps(&[(300, 1.0), (730, 1.0)], 1200, 30.0), fs);
        let det = naive_detect(&env, 0.270, 0.3).unwrap();
        assert_eq!(det.len(), 2);
        assert!((det.peaks_s()[0] - 0.3).abs() < 0.005);
        assert!((det.peaks_s()[1] - 0.73).abs() < 0.005);
    }

    #[test]
    fn naive_drops_close_smaller_peak() {
        let fs = 1000.0;
        let env = env_signal(gaussian_bumps(&[(300, 1.0), (480, 0.8)], 900, 25.0), fs);
        let det = naive_detect(&env, 0.270, 0.3).unwrap();
        assert_eq!(det.len(), 1);
        assert!((det.peaks_s()[0] - 0.3).abs() < 0.005);
    }

    #[test]
    fn naive_empty_on_flat_zero() {
        let env = env_signal(vec![0.0; 500], 1000.0);
        let det = naive_detect(&env, 0.270, 0.3).unwrap();
        assert!(det.is_empty());
    }

    #[test]
    fn adaptive_finds_unequal_bumps_with_deep_valleys() {
        let fs = 1000.0;
        // S1-like (1.0) and S2-like (0.6) bumps; valleys go to ~0.
        let env = env_signal(
            gaussian_bumps(&[(250, 1.0), (500, 0.6), (750, 1.0), (1000, 0.6)], 1300, 25.0),
            fs,
        );
        let det = adaptive_detect(&env, 0.5).unwrap();
        assert_eq!(det.len(), 4);
        for (got, want) in det.peaks_s().iter().zip([0.25, 0.5, 0.75, 1.0]) {
            assert!((got - want).abs() < 0.01, "{got} vs {want}");
        }
    }

    #[test]
    fn adaptive_monotone_ramp_detects_final_max() {
        let env = env_signal((0..400).map(|i| i as f64).collect(), 1000.0);
        let det = adaptive_detect(&env, 0.5).unwrap();
        assert_eq!(det.len(), 1);
        assert!((det.peaks_s()[0] - 0.399).abs() < 1e-9);
    }

    #[test]
    fn adaptive_ignores_ripple_on_bump() {
        let fs = 1000.0;
        let n = 1000;
        // Main bump with a shallow ripple riding on it; ripple valleys stay
        // above 50% of the ripple peaks.
        let base = gaussian_bumps(&[(500, 1.0)], n, 80.0);
        let env: Vec<f64> = base
            .iter()
            .enumerate()
            .map(|(i, v)| v * (1.0 + 0.05 * (i as f64 / 12.0).sin()))
            .collect();
        let det = adaptive_detect(&env_signal(env, fs), 0.5).unwrap();
        assert_eq!(det.len(), 1, "peaks at {:?}", det.peaks_s());
        assert!((det.peaks_s()[0] - 0.5).abs() < 0.05);
    }

    #[test]
    fn adaptive_is_scale_invariant() {
        let fs = 500.0;
        let env = gaussian_bumps(&[(200, 0.9), (400, 0.4), (600, 0.95)], 800, 20.0);
        let d1 = adaptive_detect(&env_signal(env.clone(), fs), 0.5).unwrap();
        let scaled: Vec<f64> = env.iter().map(|v| 37.5 * v).collect();
        let d2 = adaptive_detect(&env_signal(scaled, fs), 0.5).unwrap();
        assert_eq!(d1.peaks_s(), d2.peaks_s());
    }

    #[test]
    fn sort_peaks_alternating_delays() {
        // Delays: 0.181, 0.257, 0.181, 0.257, ... starting with a systole.
        let mut times = vec![0.5];
        for i in 0..7 {
            let d = if i % 2 == 0 { 0.181 } else { 0.257 };
            times.push(times.last().unwrap() + d);
        }
        let det = DetectionSet::new(times).unwrap();
        let sorted = sort_peaks(&det).unwrap();
        let expect = [
            SoundKind::S1,
            SoundKind::S2,
            SoundKind::S1,
            SoundKind::S2,
            SoundKind::S1,
            SoundKind::S2,
            SoundKind::S1,
            SoundKind::S2,
        ];
        for (i, k) in sorted.kinds().iter().enumerate() {
            assert_eq!(*k, Some(expect[i]), "peak {i}");
        }
    }

    #[test]
    fn sort_peaks_equal_delays_all_unknown() {
        let det = DetectionSet::new(vec![0.2, 0.4, 0.6, 0.8]).unwrap();
        let sorted = sort_peaks(&det).unwrap();
        assert!(sorted.kinds().iter().all(|k| k.is_none()));
    }

    #[test]
    fn sort_peaks_needs_three() {
        let det = DetectionSet::new(vec![0.2, 0.4]).unwrap();
        assert!(sort_peaks(&det).is_err());
    }

    #[test]
    fn boundaries_of_triangle_bump() {
        let fs = 1000.0;
        let n = 600;
        // Triangle centered at 300, half-width 100 samples.
        let env: Vec<f64> = (0..n)
            .map(|i| (1.0 - (i as f64 - 300.0).abs() / 100.0).max(0.0))
            .collect();
        let det = DetectionSet::new(vec![0.3]).unwrap();
        let segs = peaks_to_boundaries(&env_signal(env, fs), &det, 0.5).unwrap();
        let e = &segs.events()[0];
        assert!((e.start_s - 0.25).abs() <= 0.001, "start {}", e.start_s);
        assert!((e.end_s - 0.35).abs() <= 0.001, "end {}", e.end_s);
        assert_eq!(e.kind, RegionKind::Unknown);
    }

    #[test]
    fn boundaries_level_one_collapses_to_peak() {
        let fs = 1000.0;
        let env: Vec<f64> = gaussian_bumps(&[(250, 1.0)], 500, 40.0);
        let det = DetectionSet::new(vec![0.25]).unwrap();
        let segs = peaks_to_boundaries(&env_signal(env, fs), &det, 1.0).unwrap();
        let e = &segs.events()[0];
        assert!((e.start_s - 0.25).abs() < 1.5 / fs);
        assert!((e.end_s - 0.25).abs() < 1.5 / fs);
    }

    #[test]
    fn boundaries_clip_at_edges_and_midpoints() {
        let fs = 100.0;
        // Peak right at the start: left boundary clips to 0.
        let mut env = vec![0.0; 200];
        for (i, v) in env.iter_mut().enumerate() {
            *v = 1.0 / (1.0 + i as f64 / 10.0);
        }
        let det = DetectionSet::new(vec![0.0]).unwrap();
        let segs = peaks_to_boundaries(&env_signal(env, fs), &det, 0.6).unwrap();
        assert_eq!(segs.events()[0].start_s, 0.0);

        // Two overlapping wide bumps: boundary clipped at the midpoint.
        let env = gaussian_bumps(&[(400, 1.0), (500, 1.0)], 1000, 120.0);
        let det = DetectionSet::new(vec![4.0, 5.0]).unwrap();
        let segs = peaks_to_boundaries(&env_signal(env, fs), &det, 0.9).unwrap();
        let a = &segs.events()[0];
        let b = &segs.events()[1];
        assert!(a.end_s <= 4.5 + 1e-9);
        assert!(b.start_s >= 4.5 - 1e-9);
        assert!(a.start_s <= a.peak_s && a.peak_s <= a.end_s);
    }

    #[test]
    fn detectors_reject_negative_envelope() {
        let env = Signal::new(vec![0.5, -0.2, 0.4], 10.0).unwrap();
        assert!(naive_detect(&env, 0.1, 0.3).is_err());
        assert!(adaptive_detect(&env, 0.5).is_err());
    }

    #[test]
    fn detection_times_strictly_increasing_and_are_maxima() {
        let fs = 1000.0;
        let env = gaussian_bumps(&[(200, 0.8), (520, 1.0), (840, 0.5)], 1100, 30.0);
        let sig = env_signal(env.clone(), fs);
        for det in [
            naive_detect(&sig, 0.1, 0.2).unwrap(),
            adaptive_detect(&sig, 0.5).unwrap(),
        ] {
            let times = det.peaks_s();
            assert!(times.windows(2).all(|w| w[1] > w[0]));
            for &t in times {
                let i = (t * fs).round() as usize;
                assert!(env[i] >= env[i.saturating_sub(1)] && env[i] >= env[(i + 1).min(1099)]);
            }
        }
    }
}
