//! Phonocardiogram (PCG) analysis toolkit.
//!
//! The crate follows the conventional heart-sound processing chain:
//! input handling, signal quality indices, preprocessing and envelope
//! extraction, heart-sound segmentation, per-segment feature extraction,
//! and summary statistics, plus the accuracy machinery used to validate
//! segmentations against manual labels.
//!
//! The unit flowing through every stage is the immutable [`Signal`];
//! preprocessing steps are pure `Signal -> Signal` functions that can be
//! preconfigured and chained with a [`Pipeline`].

pub mod error;
mod fftutil;
pub mod io;
pub mod preprocess;
pub mod signal;
pub mod wavelet;

pub use error::{Error, Result};
pub use signal::{Pipeline, PipelineStep, Signal};
