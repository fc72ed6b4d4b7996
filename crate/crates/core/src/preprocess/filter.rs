//! Butterworth IIR design and (zero-phase) filtering.
//!
//! Filters are designed in the analog domain from the Butterworth pole
//! prototype, frequency-transformed, mapped with the bilinear transform
//! (pre-warped), and realized as a cascade of second-order sections.
//! Zero-phase filtering applies the cascade forward and backward over an
//! odd-reflection padded signal with steady-state initial conditions, the
//! standard way to remove group delay without losing the edges.

use crate::error::{Error, Result};
use rustfft::num_complex::Complex64;
use std::f64::consts::PI;

/// Filter response type.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FilterKind {
    Lowpass { cutoff_hz: f64 },
    Highpass { cutoff_hz: f64 },
    Bandpass { low_hz: f64, high_hz: f64 },
}

/// Butterworth design request: order, band, and phase handling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterSpec {
    pub order: usize,
    pub kind: FilterKind,
    pub zero_phase: bool,
}

impl FilterSpec {
    pub fn lowpass(order: usize, cutoff_hz: f64) -> Self {
        Self {
            order,
            kind: FilterKind::Lowpass { cutoff_hz },
            zero_phase: true,
        }
    }

    pub fn highpass(order: usize, cutoff_hz: f64) -> Self {
        Self {
            order,
            kind: FilterKind::Highpass { cutoff_hz },
            zero_phase: true,
        }
    }

    pub fn bandpass(order: usize, low_hz: f64, high_hz: f64) -> Self {
        Self {
            order,
            kind: FilterKind::Bandpass { low_hz, high_hz },
            zero_phase: true,
        }
    }

    pub fn single_pass(mut self) -> Self {
        self.zero_phase = false;
        self
    }

    fn validate(&self, fs: f64) -> Result<()> {
        if self.order == 0 {
            return Err(Error::InvalidParam("filter order must be >= 1".into()));
        }
        let nyquist = fs / 2.0;
        let check = |f: f64, name: &str| -> Result<()> {
            if !(f > 0.0) {
                return Err(Error::InvalidParam(format!(
                    "{name} cutoff must be positive, got {f} Hz"
                )));
            }
            if f >= nyquist {
                return Err(Error::InvalidParam(format!(
                    "{name} cutoff {f} Hz is not below the Nyquist frequency {nyquist} Hz"
                )));
            }
            Ok(())
        };
        match self.kind {
            FilterKind::Lowpass { cutoff_hz } => check(cutoff_hz, "lowpass"),
            FilterKind::Highpass { cutoff_hz } => check(cutoff_hz, "highpass"),
            FilterKind::Bandpass { low_hz, high_hz } => {
                check(low_hz, "bandpass low")?;
                check(high_hz, "bandpass high")?;
                if low_hz >= high_hz {
                    return Err(Error::InvalidParam(format!(
                        "bandpass requires low < high, got {low_hz}..{high_hz} Hz"
                    )));
                }
                Ok(())
            }
        }
    }

    pub fn describe(&self) -> String {
        let band = match self.kind {
            FilterKind::Lowpass { cutoff_hz } => format!("kind=lowpass,cutoff={cutoff_hz}"),
            FilterKind::Highpass { cutoff_hz } => format!("kind=highpass,cutoff={cutoff_hz}"),
            FilterKind::Bandpass { low_hz, high_hz } => {
                format!("kind=bandpass,low={low_hz},high={high_hz}")
            }
        };
        format!(
            "order={},{band},zero_phase={}",
            self.order, self.zero_phase
        )
    }
}

/// One biquad: y[n] = b0 x[n] + b1 x[n-1] + b2 x[n-2] - a1 y[n-1] - a2 y[n-2].
#[derive(Debug, Clone, Copy)]
pub(crate) struct Biquad {
    b: [f64; 3],
    a: [f64; 3], // a[0] == 1
}

impl Biquad {
    fn dc_gain(&self) -> f64 {
        (self.b[0] + self.b[1] + self.b[2]) / (self.a[0] + self.a[1] + self.a[2])
    }

    /// Steady-state direct-form-II-transposed state for unit constant input.
    fn steady_state(&self) -> [f64; 2] {
        let k = self.dc_gain();
        [k - self.b[0], self.b[2] - self.a[2] * k]
    }

    fn response_at(&self, z_inv: Complex64) -> Complex64 {
        let num = Complex64::new(self.b[0], 0.0)
            + z_inv * (Complex64::new(self.b[1], 0.0) + z_inv * self.b[2]);
        let den = Complex64::new(self.a[0], 0.0)
            + z_inv * (Complex64::new(self.a[1], 0.0) + z_inv * self.a[2]);
        num / den
    }
}

/// A designed digital filter: cascade of second-order sections.
#[derive(Debug, Clone)]
pub struct FilterDesign {
    sections: Vec<Biquad>,
    fs: f64,
    zero_phase: bool,
}

/// Design the digital Butterworth cascade for `spec` at sampling rate `fs`.
pub fn design_butterworth(spec: &FilterSpec, fs: f64) -> Result<FilterDesign> {
    spec.validate(fs)?;
    let n = spec.order;

    // Analog lowpass prototype poles on the unit circle, left half-plane.
    let prototype: Vec<Complex64> = (0..n)
        .map(|k| {
            let theta = PI * (2.0 * k as f64 + n as f64 + 1.0) / (2.0 * n as f64);
            Complex64::new(theta.cos(), theta.sin())
        })
        .collect();

    let warp = |f: f64| 2.0 * fs * (PI * f / fs).tan();

    // Frequency transform in the s-domain; zeros listed explicitly, gain tracked.
    let mut poles: Vec<Complex64>;
    let mut zeros: Vec<Complex64> = Vec::new();
    let mut gain = 1.0f64;
    match spec.kind {
        FilterKind::Lowpass { cutoff_hz } => {
            let wc = warp(cutoff_hz);
            poles = prototype.iter().map(|p| p * wc).collect();
            gain = wc.powi(n as i32);
        }
        FilterKind::Highpass { cutoff_hz } => {
            let wc = warp(cutoff_hz);
            poles = prototype.iter().map(|p| wc / p).collect();
            // Prototype polynomial has unit constant term, so the gain
            // correction prod(-p) equals 1.
            zeros = vec![Complex64::new(0.0, 0.0); n];
        }
        FilterKind::Bandpass { low_hz, high_hz } => {
            let w1 = warp(low_hz);
            let w2 = warp(high_hz);
            let w0 = (w1 * w2).sqrt();
            let bw = w2 - w1;
            poles = Vec::with_capacity(2 * n);
            for p in &prototype {
                let pb = p * bw / 2.0;
                let disc = (pb * pb - Complex64::new(w0 * w0, 0.0)).sqrt();
                poles.push(pb + disc);
                poles.push(pb - disc);
            }
            zeros = vec![Complex64::new(0.0, 0.0); n];
            gain = bw.powi(n as i32);
        }
    }

    // Bilinear transform with fs2 = 2 fs; zeros at infinity map to z = -1.
    let fs2 = 2.0 * fs;
    let mut num = Complex64::new(1.0, 0.0);
    let mut den = Complex64::new(1.0, 0.0);
    let z_poles: Vec<Complex64> = poles
        .iter()
        .map(|p| {
            den *= fs2 - p;
            (fs2 + p) / (fs2 - p)
        })
        .collect();
    let mut z_zeros: Vec<Complex64> = zeros
        .iter()
        .map(|z| {
            num *= fs2 - z;
            (fs2 + z) / (fs2 - z)
        })
        .collect();
    while z_zeros.len() < z_poles.len() {
        z_zeros.push(Complex64::new(-1.0, 0.0));
    }
    let gain = gain * (num / den).re;

    let sections = pair_into_sections(&z_poles, &z_zeros, gain)?;
    Ok(FilterDesign {
        sections,
        fs,
        zero_phase: spec.zero_phase,
    })
}

/// Group conjugate pole/zero sets into real-coefficient biquads.
fn pair_into_sections(poles: &[Complex64], zeros: &[Complex64], gain: f64) -> Result<Vec<Biquad>> {
    const TOL: f64 = 1e-10;
    let split = |vals: &[Complex64]| -> (Vec<Complex64>, Vec<f64>) {
        let mut cplx = Vec::new();
        let mut real = Vec::new();
        for v in vals {
            if v.im.abs() < TOL {
                real.push(v.re);
            } else if v.im > 0.0 {
                cplx.push(*v);
            }
        }
        real.sort_by(|a, b| a.partial_cmp(b).unwrap());
        (cplx, real)
    };
    let (cp, rp) = split(poles);
    let (cz, rz) = split(zeros);
    if 2 * cp.len() + rp.len() != poles.len() {
        return Err(Error::InvalidParam(
            "pole set is not closed under conjugation".into(),
        ));
    }

    // Quadratic factors: conjugate pairs first, then real values two at a time.
    fn quads(cplx: &[Complex64], real: &[f64]) -> Vec<[f64; 3]> {
        let mut out = Vec::new();
        for c in cplx {
            out.push([1.0, -2.0 * c.re, c.norm_sqr()]);
        }
        let mut i = 0;
        while i + 1 < real.len() {
            out.push([1.0, -(real[i] + real[i + 1]), real[i] * real[i + 1]]);
            i += 2;
        }
        if i < real.len() {
            out.push([1.0, -real[i], 0.0]);
        }
        out
    }
    let pole_q = quads(&cp, &rp);
    let mut zero_q = quads(&cz, &rz);
    while zero_q.len() < pole_q.len() {
        zero_q.push([1.0, 0.0, 0.0]);
    }

    let mut sections: Vec<Biquad> = pole_q
        .iter()
        .zip(zero_q.iter())
        .map(|(a, b)| Biquad { b: *b, a: *a })
        .collect();
    for v in sections[0].b.iter_mut() {
        *v *= gain;
    }
    Ok(sections)
}

impl FilterDesign {
    pub fn fs(&self) -> f64 {
        self.fs
    }

    /// Complex frequency response of one cascade pass at `freq_hz`.
    pub fn response_at(&self, freq_hz: f64) -> Complex64 {
        let w = 2.0 * PI * freq_hz / self.fs;
        let z_inv = Complex64::new(w.cos(), -w.sin());
        self.sections
            .iter()
            .fold(Complex64::new(1.0, 0.0), |acc, s| acc * s.response_at(z_inv))
    }

    /// Magnitude response of the filter as applied (squared if zero-phase).
    pub fn magnitude_at(&self, freq_hz: f64) -> f64 {
        let m = self.response_at(freq_hz).norm();
        if self.zero_phase {
            m * m
        } else {
            m
        }
    }

    fn run_cascade(&self, x: &[f64], scale_state: f64) -> Vec<f64> {
        let mut y = x.to_vec();
        let mut input_level = scale_state;
        for s in &self.sections {
            let zi = s.steady_state();
            let mut z1 = zi[0] * input_level;
            let mut z2 = zi[1] * input_level;
            for v in y.iter_mut() {
                let x_n = *v;
                let y_n = s.b[0] * x_n + z1;
                z1 = s.b[1] * x_n - s.a[1] * y_n + z2;
                z2 = s.b[2] * x_n - s.a[2] * y_n;
                *v = y_n;
            }
            input_level *= s.dc_gain();
        }
        y
    }

    /// Apply the filter to raw samples.
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() < 2 {
            return Err(Error::Unsupported(
                "signal too short to filter (need >= 2 samples)".into(),
            ));
        }
        if !self.zero_phase {
            return Ok(self.run_cascade(x, x[0]));
        }

        // filtfilt: odd-reflection padding, forward pass, reversed backward pass.
        let padlen = (3 * (2 * self.sections.len() + 1)).min(x.len() - 1);
        let n = x.len();
        let mut ext = Vec::with_capacity(n + 2 * padlen);
        for i in (1..=padlen).rev() {
            ext.push(2.0 * x[0] - x[i]);
        }
        ext.extend_from_slice(x);
        let last = x[n - 1];
        for i in 1..=padlen {
            ext.push(2.0 * last - x[n - 1 - i]);
        }

        let fwd = self.run_cascade(&ext, ext[0]);
        let mut rev: Vec<f64> = fwd.into_iter().rev().collect();
        rev = self.run_cascade(&rev, rev[0]);
        rev.reverse();
        Ok(rev[padlen..padlen + n].to_vec())
    }
}
