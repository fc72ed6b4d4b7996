//! The signal object and the chainable processing pipeline.
//!
//! A [`Signal`] couples raw samples with their sampling rate and a log of the
//! processing steps that produced it. Every operation in this crate consumes
//! signals by reference and returns new ones; nothing is modified in place,
//! so signals can be shared freely across threads.

use crate::error::{Error, Result};
use std::fmt;
use std::sync::Arc;

/// Immutable sampled signal: samples, sampling rate, processing log.
#[derive(Debug, Clone)]
pub struct Signal {
    samples: Vec<f64>,
    fs: f64,
    log: Vec<String>,
}

impl Signal {
    /// Create a signal, validating the structural invariants: `fs > 0`,
    /// at least one sample, all samples finite.
    pub fn new(samples: Vec<f64>, fs: f64) -> Result<Self> {
        if !(fs > 0.0) || !fs.is_finite() {
            return Err(Error::InvalidSignal(format!(
                "sampling rate must be positive and finite, got {fs}"
            )));
        }
        if samples.is_empty() {
            return Err(Error::InvalidSignal("signal has no samples".into()));
        }
        if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidSignal(format!(
                "non-finite sample at index {i}"
            )));
        }
        Ok(Self {
            samples,
            fs,
            log: Vec::new(),
        })
    }

    /// Consume an owned signal, appending one log entry.
    pub(crate) fn with_log_entry(mut self, entry: String) -> Self {
        self.log.push(entry);
        self
    }

    /// Successor signal: new samples and rate, parent log plus one entry.
    ///
    /// Used by processing operations; the caller guarantees the samples are
    /// finite and non-empty.
    pub(crate) fn derive(&self, samples: Vec<f64>, fs: f64, log_entry: String) -> Self {
        debug_assert!(!samples.is_empty());
        debug_assert!(samples.iter().all(|v| v.is_finite()));
        let mut log = self.log.clone();
        log.push(log_entry);
        Self { samples, fs, log }
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn fs(&self) -> f64 {
        self.fs
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Applied processing steps, oldest first.
    pub fn log(&self) -> &[String] {
        &self.log
    }

    /// Signal length in seconds: `len / fs`.
    pub fn duration_s(&self) -> f64 {
        self.samples.len() as f64 / self.fs
    }

    /// Cut into fixed-length windows of `window_s` seconds with fractional
    /// overlap in `[0, 1)`. The hop is `window * (1 - overlap)`; a trailing
    /// partial window is discarded. Slices inherit the sampling rate and the
    /// parent log plus a `slice(...)` entry.
    pub fn slice(&self, window_s: f64, overlap_fraction: f64) -> Result<Vec<Signal>> {
        if !(0.0..1.0).contains(&overlap_fraction) {
            return Err(Error::InvalidParam(format!(
                "overlap fraction must be in [0,1), got {overlap_fraction}"
            )));
        }
        if !(window_s > 0.0) {
            return Err(Error::InvalidParam(format!(
                "window must be positive, got {window_s} s"
            )));
        }
        let win = (window_s * self.fs).round() as usize;
        if win == 0 || win > self.samples.len() {
            return Err(Error::InvalidParam("window exceeds signal".into()));
        }
        let hop = ((win as f64) * (1.0 - overlap_fraction)).round().max(1.0) as usize;
        let mut out = Vec::new();
        let mut start = 0usize;
        while start + win <= self.samples.len() {
            let entry = format!(
                "slice(window_s={window_s},overlap={overlap_fraction},index={})",
                out.len()
            );
            out.push(self.derive(self.samples[start..start + win].to_vec(), self.fs, entry));
            start += hop;
        }
        Ok(out)
    }
}

/// One preconfigured processing step: a name, its parameters, and a pure
/// `Signal -> Signal` function.
#[derive(Clone)]
pub struct PipelineStep {
    name: String,
    params: Vec<(String, String)>,
    apply: Arc<dyn Fn(&Signal) -> Result<Signal> + Send + Sync>,
}

impl PipelineStep {
    pub fn new<F>(name: impl Into<String>, params: Vec<(String, String)>, apply: F) -> Self
    where
        F: Fn(&Signal) -> Result<Signal> + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            params,
            apply: Arc::new(apply),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn params(&self) -> &[(String, String)] {
        &self.params
    }

    /// Human-readable `name(k=v,...)` form used in signal logs.
    pub fn describe(&self) -> String {
        let params = self
            .params
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(",");
        format!("{}({params})", self.name)
    }

    pub fn run(&self, sig: &Signal) -> Result<Signal> {
        (self.apply)(sig)
    }
}

impl fmt::Debug for PipelineStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PipelineStep({})", self.describe())
    }
}

/// An ordered chain of steps, reusable across inputs.
#[derive(Debug, Clone, Default)]
pub struct Pipeline {
    steps: Vec<PipelineStep>,
}

impl Pipeline {
    pub fn new(steps: Vec<PipelineStep>) -> Self {
        Self { steps }
    }

    pub fn push(&mut self, step: PipelineStep) {
        self.steps.push(step);
    }

    pub fn steps(&self) -> &[PipelineStep] {
        &self.steps
    }

    /// Run every step left to right. The output log carries one entry per
    /// step; the first failing step aborts with its index and name.
    pub fn run(&self, sig: &Signal) -> Result<Signal> {
        let mut current = sig.clone();
        for (index, step) in self.steps.iter().enumerate() {
            current = step.run(&current).map_err(|e| Error::PipelineStep {
                index,
                name: step.name().to_string(),
                source: Box::new(e),
            })?;
        }
        Ok(current)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tone(n: usize, fs: f64) -> Signal {
        let samples = (0..n)
            .map(|i| (2.0 * std::f64::consts::PI * 5.0 * i as f64 / fs).sin())
            .collect();
        Signal::new(samples, fs).unwrap()
    }

    #[test]
    fn duration_from_len_and_fs() {
        assert_eq!(tone(60_000, 1000.0).duration_s(), 60.0);
        assert_eq!(tone(333, 333.0).duration_s(), 1.0);
        assert_eq!(Signal::new(vec![0.5], 2.0).unwrap().duration_s(), 0.5);
    }

    #[test]
    fn constructor_rejects_bad_input() {
        assert!(Signal::new(vec![], 100.0).is_err());
        assert!(Signal::new(vec![1.0], 0.0).is_err());
        assert!(Signal::new(vec![1.0], -5.0).is_err());
        assert!(Signal::new(vec![f64::NAN], 100.0).is_err());
        assert!(Signal::new(vec![f64::INFINITY], 100.0).is_err());
    }

    #[test]
    fn slice_counts() {
        let sig = tone(60_000, 1000.0);
        // floor((60-10)/5)+1 = 11 windows of 10 s at 50% overlap.
        assert_eq!(sig.slice(10.0, 0.5).unwrap().len(), 11);

        let sig = tone(10_000, 1000.0);
        assert_eq!(sig.slice(10.0, 0.0).unwrap().len(), 1);

        let sig = tone(9_000, 1000.0);
        assert!(sig.slice(10.0, 0.0).is_err());
    }

    #[test]
    fn slice_zero_overlap_covers_prefix_exactly() {
        let sig = tone(10_500, 1000.0);
        let slices = sig.slice(1.0, 0.0).unwrap();
        assert_eq!(slices.len(), 10);
        let mut glued = Vec::new();
        for s in &slices {
            assert_eq!(s.len(), 1000);
            assert_eq!(s.fs(), 1000.0);
            assert_eq!(s.log().len(), 1);
            glued.extend_from_slice(s.samples());
        }
        assert_eq!(&glued[..], &sig.samples()[..10_000]);
    }

    #[test]
    fn empty_pipeline_is_identity() {
        let sig = tone(100, 100.0);
        let out = Pipeline::default().run(&sig).unwrap();
        assert_eq!(out.samples(), sig.samples());
        assert_eq!(out.log(), sig.log());
    }

    #[test]
    fn pipeline_equals_manual_composition_and_logs_steps() {
        let double = PipelineStep::new("double", vec![], |s: &Signal| {
            Ok(s.derive(
                s.samples().iter().map(|v| v * 2.0).collect(),
                s.fs(),
                "double()".into(),
            ))
        });
        let add_one = PipelineStep::new("add_one", vec![], |s: &Signal| {
            Ok(s.derive(
                s.samples().iter().map(|v| v + 1.0).collect(),
                s.fs(),
                "add_one()".into(),
            ))
        });
        let sig = tone(64, 64.0);
        let pipe = Pipeline::new(vec![double.clone(), add_one.clone()]);
        let chained = pipe.run(&sig).unwrap();
        let manual = add_one.run(&double.run(&sig).unwrap()).unwrap();
        assert_eq!(chained.samples(), manual.samples());
        assert_eq!(chained.log().len(), 2);
        assert_eq!(chained.log()[0], "double()");
        assert_eq!(chained.log()[1], "add_one()");
        // Deterministic across repeat runs.
        let again = pipe.run(&sig).unwrap();
        assert_eq!(again.samples(), chained.samples());
    }

    #[test]
    fn pipeline_error_carries_step_index() {
        let ok = PipelineStep::new("ok", vec![], |s: &Signal| Ok(s.clone()));
        let bad = PipelineStep::new("bad", vec![], |_: &Signal| {
            Err(Error::InvalidParam("boom".into()))
        });
        let pipe = Pipeline::new(vec![ok, bad]);
        let err = pipe.run(&tone(16, 16.0)).unwrap_err();
        match err {
            Error::PipelineStep { index, name, .. } => {
                assert_eq!(index, 1);
                assert_eq!(name, "bad");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }
}
