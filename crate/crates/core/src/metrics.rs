//! Beam-squint figures of merit read off a [`BeamPattern`].
//!
//! All metrics share the interpolated peak from [`BeamPattern::peak`], so
//! AD, PD and the gain ratio are mutually consistent.

use alloc::string::String;
use alloc::vec::Vec;

use num_traits::Float;

use crate::beampattern::BeamPattern;
use crate::{Error, EvalModel, Result};

/// Angle distortion `θpeak(f) − θpeak(fc)`, degrees.
pub fn angle_distortion(pattern: &BeamPattern, f_ghz: f64) -> Result<f64> {
    let fc = pattern.peak(pattern.fc_ghz())?;
    Ok(pattern.peak(f_ghz)?.theta_deg - fc.theta_deg)
}

/// Power difference `Dpeak(f) − Dpeak(fc)`, dB.
pub fn power_difference(pattern: &BeamPattern, f_ghz: f64) -> Result<f64> {
    let fc = pattern.peak(pattern.fc_ghz())?;
    Ok(pattern.peak(f_ghz)?.dbi - fc.dbi)
}

/// Half-power beamwidth of the main lobe at `f_ghz`, degrees.
///
/// Crossings are located by linear interpolation in dB between the grid
/// samples that bracket `peak − 3 dB`.
pub fn hpbw(pattern: &BeamPattern, f_ghz: f64) -> Result<f64> {
    let pk = pattern.peak(f_ghz)?;
    let row = pattern.row(f_ghz)?;
    let grid = pattern.grid();
    let level = pk.dbi - 3.0;
    let crossing = |a: usize, b: usize| {
        let t = (row[a] - level) / (row[a] - row[b]);
        grid.angle(a) + t * (grid.angle(b) - grid.angle(a))
    };
    let mut i = pk.index;
    let left = loop {
        if i == 0 {
            return Err(Error::BeamTooBroad { side: "lower" });
        }
        if row[i - 1] < level {
            break crossing(i, i - 1);
        }
        i -= 1;
    };
    let mut j = pk.index;
    let right = loop {
        if j + 1 >= row.len() {
            return Err(Error::BeamTooBroad { side: "upper" });
        }
        if row[j + 1] < level {
            break crossing(j, j + 1);
        }
        j += 1;
    };
    Ok(right - left)
}

/// Gain at `f` in the centre-frequency beam direction relative to the
/// centre-frequency gain there, percent.
pub fn bf_gain_ratio(pattern: &BeamPattern, f_ghz: f64) -> Result<f64> {
    let fc_idx = pattern.freq_index(pattern.fc_ghz())?;
    let fi = pattern.freq_index(f_ghz)?;
    let pk = pattern.peak(pattern.fc_ghz())?;
    let at_f = pattern.sample_dbi_around(fi, pk.index, pk.theta_deg);
    let at_fc = pattern.sample_dbi_around(fc_idx, pk.index, pk.theta_deg);
    Ok(100.0 * 10.0.powf((at_f - at_fc) / 10.0))
}

/// One (AoD, frequency) cell of a squint table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SquintCell {
    pub aod_deg: f64,
    pub freq_ghz: f64,
    pub ad_deg: f64,
    pub pd_db: f64,
    pub hpbw_deg: f64,
    pub bf_gain_ratio_pct: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SquintReport {
    pub antenna: String,
    pub eval_model: EvalModel,
    pub fc_ghz: f64,
    pub band_ghz: Vec<f64>,
    /// Row-major over the input patterns, then `band_ghz`.
    pub cells: Vec<SquintCell>,
}

impl SquintReport {
    pub fn cell(&self, aod_deg: f64, freq_ghz: f64) -> Option<&SquintCell> {
        self.cells
            .iter()
            .find(|c| (c.aod_deg - aod_deg).abs() < 1e-9 && (c.freq_ghz - freq_ghz).abs() < 1e-9)
    }

    pub fn max_abs_ad(&self) -> f64 {
        self.cells.iter().map(|c| c.ad_deg.abs()).fold(0.0, f64::max)
    }

    pub fn max_abs_pd(&self) -> f64 {
        self.cells.iter().map(|c| c.pd_db.abs()).fold(0.0, f64::max)
    }

    pub fn min_ratio(&self) -> f64 {
        self.cells
            .iter()
            .map(|c| c.bf_gain_ratio_pct)
            .fold(f64::INFINITY, f64::min)
    }
}

/// All four metrics for each pattern (one per design AoD) and band frequency.
pub fn squint_report(antenna: &str, patterns: &[BeamPattern], band_ghz: &[f64]) -> Result<SquintReport> {
    let first = patterns
        .first()
        .ok_or_else(|| Error::InvalidConfig("squint report needs at least one pattern".into()))?;
    let eval_model = first.eval_model();
    let fc_ghz = first.fc_ghz();
    let mut cells = Vec::with_capacity(patterns.len() * band_ghz.len());
    for p in patterns {
        if p.eval_model() != eval_model {
            return Err(Error::InvalidConfig("squint report mixes evaluation models".into()));
        }
        for &f in band_ghz {
            cells.push(SquintCell {
                aod_deg: p.steering().aod_design_deg,
                freq_ghz: f,
                ad_deg: angle_distortion(p, f)?,
                pd_db: power_difference(p, f)?,
                hpbw_deg: hpbw(p, f)?,
                bf_gain_ratio_pct: bf_gain_ratio(p, f)?,
            });
        }
    }
    Ok(SquintReport {
        antenna: antenna.into(),
        eval_model,
        fc_ghz,
        band_ghz: band_ghz.to_vec(),
        cells,
    })
}
