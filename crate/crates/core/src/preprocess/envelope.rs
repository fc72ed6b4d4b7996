//! Hilbert and homomorphic envelope extraction.

use crate::error::{Error, Result};
use crate::fftutil::analytic_signal;
use crate::preprocess::filter::{design_butterworth, FilterSpec};
use crate::signal::Signal;

pub(crate) fn hilbert_envelope_samples(x: &[f64]) -> Result<Vec<f64>> {
    if x.len() < 2 {
        return Err(Error::Unsupported(
            "hilbert envelope needs at least 2 samples".into(),
        ));
    }
    Ok(analytic_signal(x).iter().map(|c| c.norm()).collect())
}

/// Instantaneous amplitude: magnitude of the analytic signal.
pub fn hilbert_envelope(sig: &Signal) -> Result<Signal> {
    let env = hilbert_envelope_samples(sig.samples())?;
    Ok(sig.derive(env, sig.fs(), "hilbert_envelope()".into()))
}

pub(crate) fn homomorphic_envelope_samples(
    x: &[f64],
    fs: f64,
    lpf_cutoff_hz: f64,
    lpf_order: usize,
) -> Result<Vec<f64>> {
    let env = hilbert_envelope_samples(x)?;
    let max = env.iter().cloned().fold(0.0f64, f64::max);
    // The log stage is undefined at zero; floor the envelope first.
    let eps = 1e-12 * max.max(1.0);
    let logged: Vec<f64> = env.iter().map(|v| v.max(eps).ln()).collect();
    let design = design_butterworth(&FilterSpec::lowpass(lpf_order, lpf_cutoff_hz), fs)?;
    let smoothed = design.apply(&logged)?;
    Ok(smoothed.iter().map(|v| v.exp()).collect())
}

/// Homomorphic envelope: `exp(LPF(log(hilbert_envelope)))` with a
/// zero-phase Butterworth lowpass (defaults: first order, 8 Hz).
pub fn homomorphic_envelope(sig: &Signal, lpf_cutoff_hz: f64, lpf_order: usize) -> Result<Signal> {
    let env = homomorphic_envelope_samples(sig.samples(), sig.fs(), lpf_cutoff_hz, lpf_order)?;
    Ok(sig.derive(
        env,
        sig.fs(),
        format!("homomorphic_envelope(cutoff={lpf_cutoff_hz},order={lpf_order})"),
    ))
}

/// Default homomorphic envelope (8 Hz, first order).
pub fn homomorphic_envelope_default(sig: &Signal) -> Result<Signal> {
    homomorphic_envelope(sig, 8.0, 1)
}
