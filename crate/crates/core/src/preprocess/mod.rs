//! Whole-signal transforms: resampling, Butterworth filtering, envelope
//! extraction, and wavelet-domain denoising. Each transform is a pure
//! `Signal -> Signal` function, and each has a [`PipelineStep`] builder so
//! configured chains can be reused across inputs.

mod envelope;
mod filter;
mod resample;

pub use envelope::{hilbert_envelope, homomorphic_envelope, homomorphic_envelope_default};
pub use filter::{design_butterworth, FilterDesign, FilterKind, FilterSpec};

pub(crate) use envelope::{hilbert_envelope_samples, homomorphic_envelope_samples};

use crate::error::{Error, Result};
use crate::signal::{PipelineStep, Signal};
use crate::wavelet::{dwt, idwt, Wavelet};

/// Polyphase rational resampling to `target_fs` (windowed-sinc
/// anti-aliasing, reflected edges). Output length is `round(N·target/fs)`.
pub fn resample(sig: &Signal, target_fs: f64) -> Result<Signal> {
    let (samples, _, _) = resample::resample_samples(sig.samples(), sig.fs(), target_fs)?;
    Ok(sig.derive(samples, target_fs, format!("resample(target_fs={target_fs})")))
}

/// Butterworth filtering per `spec`; zero-phase by default.
pub fn butterworth(sig: &Signal, spec: &FilterSpec) -> Result<Signal> {
    let design = design_butterworth(spec, sig.fs())?;
    let samples = design.apply(sig.samples())?;
    Ok(sig.derive(samples, sig.fs(), format!("butterworth({})", spec.describe())))
}

/// Soft-threshold wavelet denoising.
///
/// Decomposes `levels` deep, soft-thresholds every detail level, and
/// reconstructs. With `threshold = None` the universal threshold
/// `sigma * sqrt(2 ln N)` is used, `sigma` estimated from the median
/// absolute value of the finest detail level divided by 0.6745.
pub fn wavelet_denoise(
    sig: &Signal,
    levels: usize,
    wavelet: Wavelet,
    threshold: Option<f64>,
) -> Result<Signal> {
    let mut dec = dwt(sig, wavelet, levels)?;
    let t = match threshold {
        Some(t) => {
            if t < 0.0 {
                return Err(Error::InvalidParam(format!("negative threshold {t}")));
            }
            t
        }
        None => {
            let mut abs: Vec<f64> = dec.details[0].iter().map(|v| v.abs()).collect();
            abs.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let median = if abs.is_empty() {
                0.0
            } else if abs.len() % 2 == 1 {
                abs[abs.len() / 2]
            } else {
                0.5 * (abs[abs.len() / 2 - 1] + abs[abs.len() / 2])
            };
            let sigma = median / 0.6745;
            sigma * (2.0 * (sig.len() as f64).ln()).sqrt()
        }
    };
    for level in dec.details.iter_mut() {
        for v in level.iter_mut() {
            let mag = (v.abs() - t).max(0.0);
            *v = v.signum() * mag;
        }
    }
    let rec = idwt(&dec)?;
    Ok(sig.derive(
        rec.samples().to_vec(),
        sig.fs(),
        format!(
            "wavelet_denoise(levels={levels},wavelet={wavelet},threshold={})",
            threshold.map_or("auto".to_string(), |t| t.to_string())
        ),
    ))
}

/// Savitzky-Golay least-squares polynomial smoothing of raw samples.
///
/// Windows are clamped at the edges and the fitted polynomial is evaluated
/// at the sample position, so polynomials of degree <= `degree` pass
/// through unchanged everywhere.
pub fn savgol_filter(x: &[f64], window: usize, degree: usize) -> Result<Vec<f64>> {
    if window <= degree {
        return Err(Error::InvalidParam(format!(
            "window ({window}) must exceed polynomial degree ({degree})"
        )));
    }
    let n = x.len();
    if n <= degree {
        return Err(Error::Unsupported(format!(
            "signal too short ({n} samples) for degree {degree}"
        )));
    }
    let w = window.min(n);
    let p = degree + 1;

    // Weight vector for evaluating the LS fit at offset `at` within a
    // window of positions 0..w: solve (V^T V) c = V^T e and take the row
    // of the smoothing matrix.
    let weights_for = |at: f64| -> Vec<f64> {
        // Normal matrix of the Vandermonde system on positions 0..w.
        let mut ata = vec![vec![0.0f64; p]; p];
        for j in 0..w {
            let mut pow = vec![1.0f64; 2 * p - 1];
            for q in 1..2 * p - 1 {
                pow[q] = pow[q - 1] * j as f64;
            }
            for r in 0..p {
                for c in 0..p {
                    ata[r][c] += pow[r + c];
                }
            }
        }
        // Invert by Gaussian elimination against the identity.
        let mut aug: Vec<Vec<f64>> = ata
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let mut r = row.clone();
                r.extend((0..p).map(|j| if i == j { 1.0 } else { 0.0 }));
                r
            })
            .collect();
        for col in 0..p {
            let pivot = (col..p)
                .max_by(|&a, &b| aug[a][col].abs().partial_cmp(&aug[b][col].abs()).unwrap())
                .unwrap();
            aug.swap(col, pivot);
            let d = aug[col][col];
            for v in aug[col].iter_mut() {
                *v /= d;
            }
            for r in 0..p {
                if r != col {
                    let f = aug[r][col];
                    for c in 0..2 * p {
                        aug[r][c] -= f * aug[col][c];
                    }
                }
            }
        }
        // c = inv(A^T A) A^T y evaluated at `at`: weight[j] = sum_r at^r * inv[r]·A^T[.,j]
        let mut at_pow = vec![1.0f64; p];
        for q in 1..p {
            at_pow[q] = at_pow[q - 1] * at;
        }
        (0..w)
            .map(|j| {
                let mut jp = vec![1.0f64; p];
                for q in 1..p {
                    jp[q] = jp[q - 1] * j as f64;
                }
                let mut acc = 0.0;
                for r in 0..p {
                    let inv_row = &aug[r][p..];
                    let coeff_r: f64 = (0..p).map(|c| inv_row[c] * jp[c]).sum();
                    acc += at_pow[r] * coeff_r;
                }
                acc
            })
            .collect()
    };

    let mut cache: Vec<Option<Vec<f64>>> = vec![None; w];
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let half = (w - 1) / 2;
        let start = i.saturating_sub(half).min(n - w);
        let at = (i - start) as f64;
        let slot = i - start;
        if cache[slot].is_none() {
            cache[slot] = Some(weights_for(at));
        }
        let weights = cache[slot].as_ref().unwrap();
        let mut acc = 0.0;
        for (j, wj) in weights.iter().enumerate() {
            acc += wj * x[start + j];
        }
        out.push(acc);
    }
    Ok(out)
}

/// Smooth each DWT detail level with a Savitzky-Golay filter, then
/// reconstruct (defaults: window 10 samples, degree 3).
pub fn savgol_smooth_levels(
    sig: &Signal,
    levels: usize,
    wavelet: Wavelet,
    window: usize,
    degree: usize,
) -> Result<Signal> {
    if window <= degree {
        return Err(Error::InvalidParam(format!(
            "window ({window}) must exceed polynomial degree ({degree})"
        )));
    }
    let mut dec = dwt(sig, wavelet, levels)?;
    for level in dec.details.iter_mut() {
        *level = savgol_filter(level, window, degree)?;
    }
    let rec = idwt(&dec)?;
    Ok(sig.derive(
        rec.samples().to_vec(),
        sig.fs(),
        format!("savgol_smooth_levels(levels={levels},wavelet={wavelet},window={window},degree={degree})"),
    ))
}

// ---- pipeline step builders ----

pub fn resample_step(target_fs: f64) -> PipelineStep {
    PipelineStep::new(
        "resample",
        vec![("target_fs".into(), target_fs.to_string())],
        move |sig| resample(sig, target_fs),
    )
}

pub fn butterworth_step(spec: FilterSpec) -> PipelineStep {
    let params = vec![("spec".into(), spec.describe())];
    PipelineStep::new("butterworth", params, move |sig| butterworth(sig, &spec))
}

pub fn hilbert_envelope_step() -> PipelineStep {
    PipelineStep::new("hilbert_envelope", vec![], hilbert_envelope)
}

pub fn homomorphic_envelope_step(lpf_cutoff_hz: f64, lpf_order: usize) -> PipelineStep {
    PipelineStep::new(
        "homomorphic_envelope",
        vec![
            ("cutoff".into(), lpf_cutoff_hz.to_string()),
            ("order".into(), lpf_order.to_string()),
        ],
        move |sig| homomorphic_envelope(sig, lpf_cutoff_hz, lpf_order),
    )
}

pub fn wavelet_denoise_step(levels: usize, wavelet: Wavelet, threshold: Option<f64>) -> PipelineStep {
    PipelineStep::new(
        "wavelet_denoise",
        vec![
            ("levels".into(), levels.to_string()),
            ("wavelet".into(), wavelet.to_string()),
            (
                "threshold".into(),
                threshold.map_or("auto".into(), |t| t.to_string()),
            ),
        ],
        move |sig| wavelet_denoise(sig, levels, wavelet, threshold),
    )
}

pub fn savgol_step(levels: usize, wavelet: Wavelet, window: usize, degree: usize) -> PipelineStep {
    PipelineStep::new(
        "savgol_smooth_levels",
        vec![
            ("levels".into(), levels.to_string()),
            ("wavelet".into(), wavelet.to_string()),
            ("window".into(), window.to_string()),
            ("degree".into(), degree.to_string()),
        ],
        move |sig| savgol_smooth_levels(sig, levels, wavelet, window, degree),
    )
}
