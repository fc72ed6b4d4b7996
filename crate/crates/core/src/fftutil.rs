//! Internal FFT helpers shared by envelopes, spectra, and correlation code.

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

pub(crate) fn next_pow2(n: usize) -> usize {
    n.next_power_of_two()
}

/// Forward FFT in place.
pub(crate) fn fft_inplace(buf: &mut [Complex64]) {
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(buf.len()).process(buf);
}

/// Inverse FFT in place, scaled by 1/N.
pub(crate) fn ifft_inplace(buf: &mut [Complex64]) {
    let n = buf.len();
    let mut planner = FftPlanner::new();
    planner.plan_fft_inverse(n).process(buf);
    let scale = 1.0 / n as f64;
    for v in buf.iter_mut() {
        *v *= scale;
    }
}

/// Complex spectrum of a real sequence, zero-padded to `nfft`.
pub(crate) fn fft_real(x: &[f64], nfft: usize) -> Vec<Complex64> {
    let mut buf = vec![Complex64::new(0.0, 0.0); nfft];
    for (b, &v) in buf.iter_mut().zip(x.iter()) {
        b.re = v;
    }
    fft_inplace(&mut buf);
    buf
}

/// Analytic signal via the DFT method: negative frequencies zeroed,
/// positive doubled, DC and Nyquist untouched.
pub(crate) fn analytic_signal(x: &[f64]) -> Vec<Complex64> {
    let n = x.len();
    let nfft = next_pow2(n);
    let mut buf = fft_real(x, nfft);
    let half = nfft / 2;
    for v in buf.iter_mut().take(half).skip(1) {
        *v *= 2.0;
    }
    for v in buf.iter_mut().skip(half + 1) {
        *v = Complex64::new(0.0, 0.0);
    }
    ifft_inplace(&mut buf);
    buf.truncate(n);
    buf
}

/// Raw (biased, unnormalized) autocorrelation `r[l] = sum_n x[n] x[n-l]`
/// for lags `0..=max_lag`, computed with FFTs.
pub(crate) fn autocorrelation(x: &[f64], max_lag: usize) -> Vec<f64> {
    let n = x.len();
    let max_lag = max_lag.min(n - 1);
    let nfft = next_pow2(n + max_lag + 1);
    let mut buf = fft_real(x, nfft);
    for v in buf.iter_mut() {
        let mag2 = v.re * v.re + v.im * v.im;
        *v = Complex64::new(mag2, 0.0);
    }
    ifft_inplace(&mut buf);
    buf.iter().take(max_lag + 1).map(|c| c.re).collect()
}

/// Cross-correlation `r[l] = sum_n a[n+l] * conj(b[n])` for lags `0..=max_lag`.
pub(crate) fn cross_correlation_complex(
    a: &[Complex64],
    b: &[Complex64],
    max_lag: usize,
) -> Vec<Complex64> {
    let n = a.len().max(b.len());
    let nfft = next_pow2(n + max_lag + 1);
    let mut fa = vec![Complex64::new(0.0, 0.0); nfft];
    fa[..a.len()].copy_from_slice(a);
    let mut fb = vec![Complex64::new(0.0, 0.0); nfft];
    fb[..b.len()].copy_from_slice(b);
    fft_inplace(&mut fa);
    fft_inplace(&mut fb);
    for (va, vb) in fa.iter_mut().zip(fb.iter()) {
        *va *= vb.conj();
    }
    ifft_inplace(&mut fa);
    fa.truncate(max_lag + 1);
    fa
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn autocorrelation_matches_direct_sum() {
        let x: Vec<f64> = (0..50).map(|i| ((i * 7919) % 13) as f64 - 6.0).collect();
        let r = autocorrelation(&x, 10);
        for lag in 0..=10 {
            let direct: f64 = (lag..x.len()).map(|i| x[i] * x[i - lag]).sum();
            assert!((r[lag] - direct).abs() < 1e-9, "lag {lag}");
        }
    }

    #[test]
    fn analytic_signal_preserves_real_part() {
        let x: Vec<f64> = (0..128)
            .map(|i| (2.0 * std::f64::consts::PI * 5.0 * i as f64 / 128.0).sin())
            .collect();
        let a = analytic_signal(&x);
        for (ai, xi) in a.iter().zip(x.iter()) {
            assert!((ai.re - xi).abs() < 1e-9);
        }
    }
}
