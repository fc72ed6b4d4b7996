//! Continuous and discrete wavelet transforms.
//!
//! The DWT is the classic cascade of quadrature-mirror filtering and
//! downsampling; boundaries are handled by symmetric extension and the
//! per-level coefficient arrays keep the extra boundary taps, which makes
//! the transform exactly invertible for every family and depth.
//! The CWT correlates the signal with scaled copies of a complex Morlet
//! wavelet and stores the coefficient modulus per (scale, time) cell.

mod family;

pub use family::{FilterBank, Wavelet};

use crate::error::{Error, Result};
use crate::signal::Signal;

/// Symmetric (half-point) extension: index fold with period 2N.
#[inline]
fn sym_index(i: isize, n: usize) -> usize {
    let period = 2 * n as isize;
    let mut j = i.rem_euclid(period);
    if j >= n as isize {
        j = period - 1 - j;
    }
    j as usize
}

/// Single-level analysis: returns (approximation, detail), each of length
/// `(n + filter_len - 1) / 2`.
fn dwt_level(x: &[f64], bank: &FilterBank) -> (Vec<f64>, Vec<f64>) {
    let n = x.len();
    let f = bank.dec_lo.len();
    let out_len = (n + f - 1) / 2;
    let mut approx = vec![0.0; out_len];
    let mut detail = vec![0.0; out_len];
    for i in 0..out_len {
        let base = 2 * i as isize + 1;
        let mut a = 0.0;
        let mut d = 0.0;
        for k in 0..f {
            let v = x[sym_index(base - k as isize, n)];
            a += bank.dec_lo[k] * v;
            d += bank.dec_hi[k] * v;
        }
        approx[i] = a;
        detail[i] = d;
    }
    (approx, detail)
}

/// Single-level synthesis to exactly `target_len` samples.
fn idwt_level(
    approx: &[f64],
    detail: &[f64],
    bank: &FilterBank,
    target_len: usize,
) -> Result<Vec<f64>> {
    let l = approx.len();
    if detail.len() != l {
        return Err(Error::InvalidParam(format!(
            "coefficient length mismatch: approximation {l}, detail {}",
            detail.len()
        )));
    }
    let f = bank.rec_lo.len();
    let full_len = 2 * l + f - 2;
    if full_len < target_len + f - 2 {
        return Err(Error::InvalidParam(
            "coefficient arrays too short for requested length".into(),
        ));
    }
    let mut out = vec![0.0; target_len];
    // out[n] = sum_i cA[i]*rec_lo[n + F - 2 - 2i] + cD[i]*rec_hi[n + F - 2 - 2i]
    for (n, slot) in out.iter_mut().enumerate() {
        let idx = n as isize + f as isize - 2;
        let i_min = ((idx - (f as isize - 1)) + 1) / 2; // ceil((idx-F+1)/2)
        let i_min = i_min.max(0) as usize;
        let i_max = (idx / 2).min(l as isize - 1);
        let mut acc = 0.0;
        let mut i = i_min as isize;
        while i <= i_max {
            let k = (idx - 2 * i) as usize;
            if k < f {
                acc += approx[i as usize] * bank.rec_lo[k] + detail[i as usize] * bank.rec_hi[k];
            }
            i += 1;
        }
        *slot = acc;
    }
    Ok(out)
}

/// Multi-level wavelet decomposition.
///
/// `details[0]` is the first (finest) detail level D1; `approx` is the
/// final approximation A_k. `lengths[l]` records the input length of
/// stage `l`, which pins the reconstruction sizes.
#[derive(Debug, Clone)]
pub struct DwtResult {
    pub details: Vec<Vec<f64>>,
    pub approx: Vec<f64>,
    pub wavelet: Wavelet,
    lengths: Vec<usize>,
    fs: f64,
}

impl DwtResult {
    pub fn level_count(&self) -> usize {
        self.details.len()
    }

    /// Length of the originally analyzed signal.
    pub fn signal_len(&self) -> usize {
        self.lengths[0]
    }

    pub fn fs(&self) -> f64 {
        self.fs
    }

    /// Detail coefficients for `level` in 1..=level_count.
    pub fn detail(&self, level: usize) -> Result<&[f64]> {
        if level == 0 || level > self.details.len() {
            return Err(Error::InvalidParam(format!(
                "detail level {level} out of range 1..={}",
                self.details.len()
            )));
        }
        Ok(&self.details[level - 1])
    }

    /// Replicate the coefficients of `level` up to the signal length so a
    /// per-sample index can select them (nearest replication by 2^level).
    pub fn upsample_level_to_signal(&self, level: usize) -> Result<Vec<f64>> {
        let coeffs = self.detail(level)?;
        let n = self.signal_len();
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let j = (i >> level).min(coeffs.len() - 1);
            out.push(coeffs[j]);
        }
        Ok(out)
    }

    /// Inverse transform on raw coefficient arrays.
    pub fn reconstruct(&self) -> Result<Vec<f64>> {
        if self.details.is_empty() {
            return Err(Error::InvalidParam("decomposition has no levels".into()));
        }
        let bank = self.wavelet.filters()?;
        let levels = self.details.len();
        let expected = self.lengths[levels];
        if self.approx.len() != expected {
            return Err(Error::InvalidParam(format!(
                "corrupted approximation length {} (expected {expected})",
                self.approx.len()
            )));
        }
        let mut current = self.approx.clone();
        for l in (0..levels).rev() {
            current = idwt_level(&current, &self.details[l], &bank, self.lengths[l])?;
        }
        Ok(current)
    }

    /// Reconstruction with the detail levels zeroed (approximation only).
    pub fn reconstruct_approx_only(&self) -> Result<Vec<f64>> {
        let mut copy = self.clone();
        for d in copy.details.iter_mut() {
            d.iter_mut().for_each(|v| *v = 0.0);
        }
        copy.reconstruct()
    }
}

/// Maximum useful decomposition depth for `n` samples.
pub fn max_levels(n: usize) -> usize {
    if n < 2 {
        0
    } else {
        (n as f64).log2().floor() as usize
    }
}

/// Cascaded filter-and-downsample decomposition of raw samples.
pub fn dwt_samples(x: &[f64], wavelet: Wavelet, levels: usize, fs: f64) -> Result<DwtResult> {
    if x.is_empty() {
        return Err(Error::InvalidParam("empty input".into()));
    }
    if levels == 0 {
        return Err(Error::InvalidParam("levels must be >= 1".into()));
    }
    if levels > max_levels(x.len()) {
        return Err(Error::InvalidParam(format!(
            "levels {levels} too deep for {} samples (max {})",
            x.len(),
            max_levels(x.len())
        )));
    }
    let bank = wavelet.filters()?;
    let mut details = Vec::with_capacity(levels);
    let mut lengths = Vec::with_capacity(levels + 1);
    let mut current = x.to_vec();
    for _ in 0..levels {
        lengths.push(current.len());
        let (a, d) = dwt_level(&current, &bank);
        details.push(d);
        current = a;
    }
    lengths.push(current.len());
    Ok(DwtResult {
        details,
        approx: current,
        wavelet,
        lengths,
        fs,
    })
}

/// Decomposition of a signal object.
pub fn dwt(sig: &Signal, wavelet: Wavelet, levels: usize) -> Result<DwtResult> {
    dwt_samples(sig.samples(), wavelet, levels, sig.fs())
}

/// Inverse transform back to a signal.
pub fn idwt(res: &DwtResult) -> Result<Signal> {
    Signal::new(res.reconstruct()?, res.fs())
}

/// Mother wavelet for the continuous transform.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CwtWavelet {
    /// Complex Morlet with the given center angular frequency.
    Morlet { omega0: f64 },
}

impl Default for CwtWavelet {
    fn default() -> Self {
        CwtWavelet::Morlet { omega0: 6.0 }
    }
}

impl CwtWavelet {
    /// Center frequency in cycles per unit time (scale 1).
    pub fn center_frequency(&self) -> f64 {
        match self {
            CwtWavelet::Morlet { omega0 } => omega0 / (2.0 * std::f64::consts::PI),
        }
    }

    /// Nominal frequency in Hz represented by `scale` at sampling rate `fs`.
    pub fn pseudofrequency(&self, scale: f64, fs: f64) -> f64 {
        self.center_frequency() * fs / scale
    }

    /// Scale whose pseudofrequency equals `freq_hz` at sampling rate `fs`.
    pub fn scale_for_frequency(&self, freq_hz: f64, fs: f64) -> f64 {
        self.center_frequency() * fs / freq_hz
    }
}

/// Continuous wavelet transform result: modulus of the coefficients, one
/// row per scale, one column per sample.
#[derive(Debug, Clone)]
pub struct CwtResult {
    pub coefficients: Vec<Vec<f64>>,
    pub scales: Vec<f64>,
    pub fs: f64,
    pub wavelet: CwtWavelet,
}

impl CwtResult {
    /// Pseudofrequency of row `row`.
    pub fn pseudofrequency(&self, row: usize) -> f64 {
        self.wavelet.pseudofrequency(self.scales[row], self.fs)
    }
}

/// Correlate the signal with scaled, conjugated copies of the mother
/// wavelet, normalized by 1/sqrt(scale). Boundaries use symmetric
/// extension.
pub fn cwt(sig: &Signal, scales: &[f64], wavelet: CwtWavelet) -> Result<CwtResult> {
    cwt_samples(sig.samples(), sig.fs(), scales, wavelet)
}

pub fn cwt_samples(
    x: &[f64],
    fs: f64,
    scales: &[f64],
    wavelet: CwtWavelet,
) -> Result<CwtResult> {
    if scales.is_empty() {
        return Err(Error::InvalidParam("empty scale list".into()));
    }
    if let Some(bad) = scales.iter().find(|s| !(**s > 0.0)) {
        return Err(Error::InvalidParam(format!("non-positive scale {bad}")));
    }
    let n = x.len();
    let CwtWavelet::Morlet { omega0 } = wavelet;
    let norm = std::f64::consts::PI.powf(-0.25);
    let mut coefficients = Vec::with_capacity(scales.len());
    for &a in scales {
        // The Gaussian envelope is negligible beyond |t| = 5 standard widths.
        let half = (5.0 * a).ceil() as isize;
        let mut ker_re = Vec::with_capacity((2 * half + 1) as usize);
        let mut ker_im = Vec::with_capacity((2 * half + 1) as usize);
        for k in -half..=half {
            let t = k as f64 / a;
            let env = norm * (-0.5 * t * t).exp();
            // conj(psi)(t) = env * exp(-i*omega0*t)
            ker_re.push(env * (omega0 * t).cos());
            ker_im.push(-env * (omega0 * t).sin());
        }
        let scale_norm = 1.0 / a.sqrt();
        let mut row = Vec::with_capacity(n);
        for b in 0..n as isize {
            let mut re = 0.0;
            let mut im = 0.0;
            for (j, k) in (-half..=half).enumerate() {
                let v = x[sym_index(b + k, n)];
                re += v * ker_re[j];
                im += v * ker_im[j];
            }
            row.push(scale_norm * (re * re + im * im).sqrt());
        }
        coefficients.push(row);
    }
    Ok(CwtResult {
        coefficients,
        scales: scales.to_vec(),
        fs,
        wavelet,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn rms(a: &[f64], b: &[f64]) -> f64 {
        assert_eq!(a.len(), b.len());
        let sum: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
        (sum / a.len() as f64).sqrt()
    }

    #[test]
    fn roundtrip_all_families_and_depths() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for &n_samples in &[64usize, 100, 127, 255, 513] {
            let x: Vec<f64> = (0..n_samples).map(|_| rng.gen_range(-1.0..1.0)).collect();
            for db in 1..=10 {
                for levels in 1..=4usize.min(max_levels(n_samples)) {
                    let res =
                        dwt_samples(&x, Wavelet::Daubechies(db), levels, 1.0).unwrap();
                    let back = res.reconstruct().unwrap();
                    let err = rms(&x, &back);
                    assert!(
                        err < 1e-8,
                        "db{db} levels={levels} n={n_samples} rms={err:e}"
                    );
                }
            }
        }
    }

    #[test]
    fn constant_signal_has_vanishing_details() {
        let x = vec![3.25; 256];
        let res = dwt_samples(&x, Wavelet::Daubechies(4), 3, 1.0).unwrap();
        for d in &res.details {
            // Interior coefficients: skip the boundary-affected taps.
            let f = res.wavelet.filter_len();
            for &v in &d[f..d.len().saturating_sub(f)] {
                assert!(v.abs() < 1e-10, "detail {v}");
            }
        }
    }

    #[test]
    fn impulse_energy_is_preserved() {
        // Parseval for an orthogonal family: sum of coefficient energies
        // equals input energy. Use an interior impulse so the symmetric
        // boundary does not duplicate any mass.
        let mut x = vec![0.0; 256];
        x[128] = 1.0;
        let res = dwt_samples(&x, Wavelet::Daubechies(3), 3, 1.0).unwrap();
        let mut energy: f64 = res.approx.iter().map(|v| v * v).sum();
        for d in &res.details {
            energy += d.iter().map(|v| v * v).sum::<f64>();
        }
        assert!((energy - 1.0).abs() < 1e-8, "energy {energy}");
    }

    #[test]
    fn zeroed_details_give_smooth_reconstruction() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x: Vec<f64> = (0..300)
            .map(|i| (i as f64 / 25.0).sin() + 0.3 * rng.gen_range(-1.0..1.0))
            .collect();
        let res = dwt_samples(&x, Wavelet::Daubechies(6), 3, 1.0).unwrap();
        let smooth = res.reconstruct_approx_only().unwrap();
        assert_eq!(smooth.len(), x.len());
        // Smoothing must reduce first-difference energy.
        let rough = |v: &[f64]| -> f64 { v.windows(2).map(|w| (w[1] - w[0]).powi(2)).sum() };
        assert!(rough(&smooth) < rough(&x));
    }

    #[test]
    fn depth_and_corruption_errors() {
        let x = vec![1.0; 16];
        assert!(dwt_samples(&x, Wavelet::Daubechies(2), 9, 1.0).is_err());
        let mut res = dwt_samples(&x, Wavelet::Daubechies(2), 2, 1.0).unwrap();
        res.details[0].pop();
        assert!(res.reconstruct().is_err());
    }

    #[test]
    fn upsample_level_replicates_coefficients() {
        let x: Vec<f64> = (0..32).map(|i| i as f64).collect();
        let res = dwt_samples(&x, Wavelet::Daubechies(1), 2, 1.0).unwrap();
        let up1 = res.upsample_level_to_signal(1).unwrap();
        assert_eq!(up1.len(), 32);
        let d1 = res.detail(1).unwrap();
        for (i, v) in up1.iter().enumerate() {
            assert_eq!(*v, d1[(i / 2).min(d1.len() - 1)]);
        }
        assert!(res.upsample_level_to_signal(3).is_err());
        assert!(res.upsample_level_to_signal(0).is_err());
    }

    #[test]
    fn cwt_linearity_and_tone_localization() {
        let fs = 1000.0;
        let n = 1024;
        let x: Vec<f64> = (0..n)
            .map(|i| (2.0 * std::f64::consts::PI * 30.0 * i as f64 / fs).sin())
            .collect();
        let sig = Signal::new(x.clone(), fs).unwrap();
        let wavelet = CwtWavelet::default();
        // Scales spanning 10..90 Hz.
        let scales: Vec<f64> = (0..17)
            .map(|i| wavelet.scale_for_frequency(10.0 + 5.0 * i as f64, fs))
            .collect();
        let res = cwt(&sig, &scales, wavelet).unwrap();

        // Interior columns: argmax over scales should map near 30 Hz.
        for col in (100..n - 100).step_by(97) {
            let best = (0..scales.len())
                .max_by(|&a, &b| {
                    res.coefficients[a][col]
                        .partial_cmp(&res.coefficients[b][col])
                        .unwrap()
                })
                .unwrap();
            let freq = res.pseudofrequency(best);
            assert!((freq - 30.0).abs() <= 5.0 + 1e-9, "col {col}: {freq} Hz");
        }

        // Linearity: doubling amplitude doubles the modulus.
        let sig2 = Signal::new(x.iter().map(|v| 2.0 * v).collect(), fs).unwrap();
        let res2 = cwt(&sig2, &scales, wavelet).unwrap();
        for (r1, r2) in res.coefficients.iter().zip(&res2.coefficients) {
            for (a, b) in r1.iter().zip(r2) {
                assert!((2.0 * a - b).abs() < 1e-9);
            }
        }

        // Zero input gives zero coefficients.
        let zeros = Signal::new(vec![0.0; 64], fs).unwrap();
        let res0 = cwt(&zeros, &scales, wavelet).unwrap();
        assert!(res0
            .coefficients
            .iter()
            .all(|row| row.iter().all(|v| *v == 0.0)));

        assert!(cwt(&sig, &[], wavelet).is_err());
        assert!(cwt(&sig, &[-1.0], wavelet).is_err());
    }

    #[test]
    fn cwt_time_covariance() {
        let fs = 500.0;
        let n = 600;
        let mut x = vec![0.0; n];
        // A short burst centered at sample 200.
        for i in 0..n {
            let t = (i as f64 - 200.0) / 10.0;
            x[i] = (-0.5 * t * t).exp() * (2.0 * std::f64::consts::PI * 40.0 * i as f64 / fs).cos();
        }
        let wavelet = CwtWavelet::default();
        let scales = vec![wavelet.scale_for_frequency(40.0, fs)];
        let shift = 57usize;
        let mut y = vec![0.0; n];
        for i in shift..n {
            y[i] = x[i - shift];
        }
        let rx = cwt_samples(&x, fs, &scales, wavelet).unwrap();
        let ry = cwt_samples(&y, fs, &scales, wavelet).unwrap();
        let argmax = |row: &[f64]| {
            row.iter()
                .enumerate()
                .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
                .unwrap()
                .0
        };
        let ax = argmax(&rx.coefficients[0]);
        let ay = argmax(&ry.coefficients[0]);
        assert_eq!(ay, ax + shift);
    }
}
