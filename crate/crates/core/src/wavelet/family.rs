//! Orthogonal wavelet filter banks (Daubechies family).

use crate::error::{Error, Result};
use std::fmt;
use std::str::FromStr;

/// Daubechies scaling coefficients, normalized so the sum is sqrt(2).
/// `DB_COEFFS[n-1]` holds the dbN lowpass reconstruction filter.
const DB_COEFFS: [&[f64]; 10] = [
    // db1 (haar)
    &[0.7071067811865476, 0.7071067811865476],
    // db2
    &[
        0.482962913144534,
        0.836516303737808,
        0.224143868042013,
        -0.129409522551260,
    ],
    // db3
    &[
        0.332670552950083,
        0.806891509311092,
        0.459877502118491,
        -0.135011020010255,
        -0.085441273882027,
        0.035226291882100,
    ],
    // db4
    &[
        0.230377813308855,
        0.714846570552542,
        0.630880767929590,
        -0.027983769416984,
        -0.187034811717090,
        0.030841381835987,
        0.032883011666983,
        -0.010597401784997,
    ],
    // db5
    &[
        0.160102397974125,
        0.603829269797473,
        0.724308528437772,
        0.138428145901320,
        -0.242294887066190,
        -0.032244869585030,
        0.077571493840065,
        -0.006241490213012,
        -0.012580751999016,
        0.003335725285002,
    ],
    // db6
    &[
        0.111540743350109,
        0.494623890398453,
        0.751133908021093,
        0.315250351709195,
        -0.226264693965169,
        -0.129766867567262,
        0.097501605587079,
        0.027522865530016,
        -0.031582039317674,
        0.000553842201161,
        0.004777257511010,
        -0.001077301085308,
    ],
    // db7
    &[
        0.077852054085062,
        0.396539319482306,
        0.729132090846555,
        0.469782287405359,
        -0.143906003929106,
        -0.224036184994166,
        0.071309219267050,
        0.080612609151065,
        -0.038029936935034,
        -0.016574541631250,
        0.012550998556013,
        0.000429577973205,
        -0.001801640704047,
        0.000353713799974,
    ],
    // db8
    &[
        0.054415842243082,
        0.312871590914466,
        0.675630736297212,
        0.585354683654869,
        -0.015829105256023,
        -0.284015542962428,
        0.000472484573552,
        0.128747426620186,
        -0.017369301002022,
        -0.044088253931064,
        0.013981027917015,
        0.008746094047015,
        -0.004870352993452,
        -0.000391740373376,
        0.000675449406450,
        -0.000117476784124,
    ],
    // db9
    &[
        0.038077947363167,
        0.243834674612604,
        0.604823123690815,
        0.657288078051201,
        0.133197385825413,
        -0.293273783279725,
        -0.096840783220879,
        0.148540749338375,
        0.030725681478323,
        -0.067632829061523,
        0.000250947114831,
        0.022361662123515,
        -0.004723204757894,
        -0.004281503681904,
        0.001847646883056,
        0.000230385763524,
        -0.000251963188750,
        0.000039347319995,
    ],
    // db10
    &[
        0.026670057900950,
        0.188176800077641,
        0.527201188931997,
        0.688459039453662,
        0.281172343660850,
        -0.249846424327358,
        -0.195946274377605,
        0.127369340335789,
        0.093057364603806,
        -0.071394147165860,
        -0.029457536821945,
        0.033212674058933,
        0.003606553567204,
        -0.010733175482979,
        0.001395351747052,
        0.001992405295185,
        -0.000685856695305,
        -0.000116466855151,
        0.000093588670001,
        -0.000013264203002,
    ],
];

/// An orthogonal wavelet family usable for decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Wavelet {
    /// Daubechies wavelet with `n` vanishing moments (db1 = Haar).
    Daubechies(usize),
}

impl Wavelet {
    pub fn filter_len(&self) -> usize {
        match self {
            Wavelet::Daubechies(n) => 2 * n,
        }
    }

    /// Analysis/synthesis filter quadruple for this family.
    pub fn filters(&self) -> Result<FilterBank> {
        match self {
            Wavelet::Daubechies(n) => {
                if *n == 0 || *n > DB_COEFFS.len() {
                    return Err(Error::InvalidParam(format!(
                        "unsupported wavelet db{n}; available: db1..db{}",
                        DB_COEFFS.len()
                    )));
                }
                Ok(FilterBank::orthogonal(DB_COEFFS[n - 1]))
            }
        }
    }
}

impl FromStr for Wavelet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        if lower == "haar" {
            return Ok(Wavelet::Daubechies(1));
        }
        if let Some(num) = lower.strip_prefix("db") {
            if let Ok(n) = num.parse::<usize>() {
                if n >= 1 && n <= DB_COEFFS.len() {
                    return Ok(Wavelet::Daubechies(n));
                }
            }
        }
        Err(Error::InvalidParam(format!("unknown wavelet family: {s}")))
    }
}

impl fmt::Display for Wavelet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Wavelet::Daubechies(n) => write!(f, "db{n}"),
        }
    }
}

/// Decomposition and reconstruction filters of a two-channel bank.
pub struct FilterBank {
    pub dec_lo: Vec<f64>,
    pub dec_hi: Vec<f64>,
    pub rec_lo: Vec<f64>,
    pub rec_hi: Vec<f64>,
}

impl FilterBank {
    /// Build the four filters from an orthogonal scaling filter via the
    /// quadrature mirror relation `g[k] = (-1)^k h[F-1-k]`.
    fn orthogonal(scaling: &[f64]) -> Self {
        let f = scaling.len();
        let rec_lo: Vec<f64> = scaling.to_vec();
        let rec_hi: Vec<f64> = (0..f)
            .map(|k| {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                sign * scaling[f - 1 - k]
            })
            .collect();
        let dec_lo: Vec<f64> = rec_lo.iter().rev().copied().collect();
        let dec_hi: Vec<f64> = rec_hi.iter().rev().copied().collect();
        Self {
            dec_lo,
            dec_hi,
            rec_lo,
            rec_hi,
        }
    }
}
