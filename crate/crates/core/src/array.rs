//! Uniform linear array geometry, element gain models and analog steering.

use alloc::format;
use alloc::vec::Vec;

use num_traits::Float;

use crate::{wavelength_m, Error, Result, SPEED_OF_LIGHT};

/// Radiating element behaviour across angle and frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ElementModel {
    /// Unit gain at every frequency and angle.
    Ideal,
    /// `G0 · cos(θ)^q`, reduced by a rolloff quadratic in frequency offset
    /// that reaches `edge_rolloff_db` at the band edges.
    NarrowbandPatch { g0_dbi: f64, q: f64, edge_rolloff_db: f64 },
}

impl ElementModel {
    pub const DEFAULT_G0_DBI: f64 = 5.0;
    pub const DEFAULT_Q: f64 = 1.5;
    pub const DEFAULT_EDGE_ROLLOFF_DB: f64 = 0.4;

    /// Patch element with the default shape parameters.
    pub fn default_patch() -> Self {
        ElementModel::NarrowbandPatch {
            g0_dbi: Self::DEFAULT_G0_DBI,
            q: Self::DEFAULT_Q,
            edge_rolloff_db: Self::DEFAULT_EDGE_ROLLOFF_DB,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let ElementModel::NarrowbandPatch {
            g0_dbi,
            q,
            edge_rolloff_db,
        } = *self
        {
            if !g0_dbi.is_finite() {
                return Err(Error::InvalidArray(format!(
                    "element g0_dbi must be finite, got {g0_dbi}"
                )));
            }
            if !(q >= 0.0 && q.is_finite()) {
                return Err(Error::InvalidArray(format!("element q must be >= 0, got {q}")));
            }
            if !(edge_rolloff_db >= 0.0 && edge_rolloff_db.is_finite()) {
                return Err(Error::InvalidArray(format!(
                    "element edge_rolloff_db must be >= 0, got {edge_rolloff_db}"
                )));
            }
        }
        Ok(())
    }
}

/// Linear power gain of one element at frequency `f_ghz` and angle `theta_deg`.
///
/// `band_ghz` supplies the edge frequencies used by the patch rolloff; it is
/// expected sorted ascending.
pub fn element_gain(model: &ElementModel, f_ghz: f64, theta_deg: f64, fc_ghz: f64, band_ghz: &[f64]) -> f64 {
    match *model {
        ElementModel::Ideal => 1.0,
        ElementModel::NarrowbandPatch {
            g0_dbi,
            q,
            edge_rolloff_db,
        } => {
            let c = theta_deg.to_radians().cos().max(0.0);
            let shape = if q == 0.0 { 1.0 } else { c.powf(q) };
            let rolloff_db = edge_rolloff(edge_rolloff_db, f_ghz, fc_ghz, band_ghz);
            10.0.powf((g0_dbi - rolloff_db) / 10.0) * shape
        }
    }
}

fn edge_rolloff(edge_db: f64, f: f64, fc: f64, band: &[f64]) -> f64 {
    if f == fc || band.is_empty() {
        return 0.0;
    }
    let edge = if f > fc {
        band.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    } else {
        band.iter().copied().fold(f64::INFINITY, f64::min)
    };
    if edge == fc {
        return 0.0;
    }
    let x = (f - fc) / (edge - fc);
    edge_db * x * x
}

/// Uniform linear array along `x`, element `m` at `x = m·d`.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrayConfig {
    pub n_elements: usize,
    /// Element spacing in wavelengths at `fc_ghz`.
    pub spacing_lambda: f64,
    pub fc_ghz: f64,
    /// Operating frequencies, strictly increasing.
    pub band_ghz: Vec<f64>,
    pub element: ElementModel,
}

impl ArrayConfig {
    pub fn new(
        n_elements: usize,
        spacing_lambda: f64,
        fc_ghz: f64,
        band_ghz: Vec<f64>,
        element: ElementModel,
    ) -> Result<Self> {
        let cfg = Self {
            n_elements,
            spacing_lambda,
            fc_ghz,
            band_ghz,
            element,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// 28 elements at half-wavelength spacing, 28.5 GHz centre, with the
    /// 27–30 GHz table frequencies.
    pub fn reference(element: ElementModel) -> Self {
        Self {
            n_elements: 28,
            spacing_lambda: 0.5,
            fc_ghz: 28.5,
            band_ghz: alloc::vec![27.0, 27.5, 28.0, 29.0, 29.5, 30.0],
            element,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_elements == 0 {
            return Err(Error::InvalidArray("n_elements must be >= 1".into()));
        }
        if !(self.spacing_lambda > 0.0 && self.spacing_lambda.is_finite()) {
            return Err(Error::InvalidArray(format!(
                "spacing must be positive, got {}",
                self.spacing_lambda
            )));
        }
        if !(self.fc_ghz > 0.0 && self.fc_ghz.is_finite()) {
            return Err(Error::InvalidArray(format!("fc must be positive, got {}", self.fc_ghz)));
        }
        if self.band_ghz.is_empty() {
            return Err(Error::InvalidArray("band must not be empty".into()));
        }
        if self.band_ghz.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidArray(
                "band frequencies must be strictly increasing".into(),
            ));
        }
        let lo = self.band_ghz[0];
        let hi = self.band_ghz[self.band_ghz.len() - 1];
        if lo <= 0.0 || self.fc_ghz < lo || self.fc_ghz > hi {
            return Err(Error::InvalidArray(format!(
                "fc {} GHz must lie inside the band [{lo}, {hi}] GHz",
                self.fc_ghz
            )));
        }
        self.element.validate()
    }

    /// Element spacing in meters.
    pub fn spacing_m(&self) -> f64 {
        self.spacing_lambda * wavelength_m(self.fc_ghz)
    }

    /// Band frequencies plus `fc`, sorted and deduplicated.
    pub fn pattern_frequencies(&self) -> Vec<f64> {
        let mut f = self.band_ghz.clone();
        if !f.contains(&self.fc_ghz) {
            f.push(self.fc_ghz);
            f.sort_by(|a, b| a.total_cmp(b));
        }
        f
    }
}

fn check_aod(aod_deg: f64) -> Result<()> {
    if !(aod_deg.abs() < 90.0) {
        return Err(Error::InvalidArray(format!(
            "steering angle must satisfy |aod| < 90, got {aod_deg}"
        )));
    }
    Ok(())
}

/// Phase-shifter weights frozen at the centre frequency, in radians.
///
/// `φ_m = −2π (fc/c) d m sin(aod)`. Applying the same phases at other
/// frequencies is what makes the beam squint.
pub fn steering_phases(cfg: &ArrayConfig, aod_deg: f64) -> Result<Vec<f64>> {
    check_aod(aod_deg)?;
    let k = crate::wavenumber(cfg.fc_ghz);
    let step = -k * cfg.spacing_m() * aod_deg.to_radians().sin();
    Ok((0..cfg.n_elements).map(|m| step * m as f64).collect())
}

/// True-time-delay weights in seconds: `τ_m = d m sin(aod) / c`.
pub fn ttd_delays(cfg: &ArrayConfig, aod_deg: f64) -> Result<Vec<f64>> {
    check_aod(aod_deg)?;
    let step = cfg.spacing_m() * aod_deg.to_radians().sin() / SPEED_OF_LIGHT;
    Ok((0..cfg.n_elements).map(|m| step * m as f64).collect())
}
