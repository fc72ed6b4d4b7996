//! Rational (polyphase) resampling with a windowed-sinc anti-aliasing filter.

use crate::error::{Error, Result};

/// Best rational approximation p/q of `x` with q bounded, via continued
/// fractions.
fn rationalize(x: f64, max_den: u64, rel_tol: f64) -> Option<(u64, u64)> {
    let mut a = x.floor() as u64;
    let (mut h0, mut h1) = (1u64, a);
    let (mut k0, mut k1) = (0u64, 1u64);
    let mut frac = x - a as f64;
    for _ in 0..64 {
        if ((h1 as f64 / k1 as f64) - x).abs() <= rel_tol * x {
            return Some((h1, k1));
        }
        if frac.abs() < 1e-15 {
            break;
        }
        let inv = 1.0 / frac;
        a = inv.floor() as u64;
        frac = inv - a as f64;
        let h2 = a.checked_mul(h1)?.checked_add(h0)?;
        let k2 = a.checked_mul(k1)?.checked_add(k0)?;
        if k2 > max_den {
            break;
        }
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
    }
    if ((h1 as f64 / k1 as f64) - x).abs() <= rel_tol * x {
        Some((h1, k1))
    } else {
        None
    }
}

/// Modified Bessel function of the first kind, order zero (series form).
fn bessel_i0(x: f64) -> f64 {
    let mut sum = 1.0;
    let mut term = 1.0;
    let half_sq = x * x / 4.0;
    for k in 1..=30 {
        term *= half_sq / (k as f64 * k as f64);
        sum += term;
        if term < 1e-16 * sum {
            break;
        }
    }
    sum
}

/// Resample raw samples from `fs` to `target_fs`; returns (samples, L, M).
pub(crate) fn resample_samples(x: &[f64], fs: f64, target_fs: f64) -> Result<(Vec<f64>, u64, u64)> {
    if !(target_fs > 0.0) {
        return Err(Error::InvalidParam(format!(
            "target sampling rate must be positive, got {target_fs}"
        )));
    }
    let ratio = target_fs / fs;
    if (ratio - 1.0).abs() < 1e-12 {
        return Ok((x.to_vec(), 1, 1));
    }
    let (l, m) = rationalize(ratio, 10_000, 1e-9).ok_or_else(|| {
        Error::InvalidParam(format!(
            "resampling ratio {target_fs}/{fs} has no small rational form"
        ))
    })?;

    let n = x.len();
    let out_len = ((n as f64) * ratio).round().max(1.0) as usize;

    // Kaiser-windowed sinc lowpass at the upsampled rate; cutoff at the
    // narrower of the two Nyquist bands.
    let max_lm = l.max(m) as usize;
    let half = 10 * max_lm;
    let taps = 2 * half + 1;
    let beta = 5.0;
    let fc = 0.5 / max_lm as f64; // cycles per (upsampled) sample
    let i0b = bessel_i0(beta);
    let mut h = Vec::with_capacity(taps);
    for i in 0..taps {
        let t = i as f64 - half as f64;
        let sinc = if t == 0.0 {
            2.0 * fc
        } else {
            (2.0 * std::f64::consts::PI * fc * t).sin() / (std::f64::consts::PI * t)
        };
        let r = t / half as f64;
        let win = bessel_i0(beta * (1.0 - r * r).max(0.0).sqrt()) / i0b;
        h.push(sinc * win * l as f64);
    }

    // y[j] = sum_i x[i] h[j*M - i*L + half], with reflected edges.
    let fold = |i: isize| -> f64 {
        let period = 2 * n as isize;
        let mut j = i.rem_euclid(period);
        if j >= n as isize {
            j = period - 1 - j;
        }
        x[j as usize]
    };
    let l_i = l as isize;
    let m_i = m as isize;
    let half_i = half as isize;
    let taps_i = taps as isize;
    let mut out = Vec::with_capacity(out_len);
    for j in 0..out_len as isize {
        let pos = j * m_i + half_i;
        // valid i: 0 <= pos - i*L < taps
        let i_min = (pos - taps_i + l_i).div_euclid(l_i);
        let i_max = pos.div_euclid(l_i);
        let mut acc = 0.0;
        for i in i_min..=i_max {
            let k = pos - i * l_i;
            if k >= 0 && k < taps_i {
                acc += fold(i) * h[k as usize];
            }
        }
        out.push(acc);
    }
    Ok((out, l, m))
}
