//! Frequency-dependent complex permittivity of lens dielectrics.
//!
//! Three models are supported: a constant permittivity, a tabulated
//! permittivity/loss-tangent curve with linear interpolation, and a
//! Drude–Lorentz sum of damped resonances. All queries are pure.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::{Error, Result};

/// One `(frequency, eps_r, tan_delta)` knot of a tabulated material.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaterialSample {
    pub f_ghz: f64,
    pub eps_r: f64,
    pub tan_delta: f64,
}

/// A single Lorentz oscillator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Resonance {
    /// Oscillator strength (dimensionless).
    pub delta_eps: f64,
    /// Resonance frequency, GHz.
    pub f0_ghz: f64,
    /// Damping constant, GHz.
    pub gamma_ghz: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum MaterialModel {
    Constant { eps_r: f64, tan_delta: f64 },
    Tabulated(Vec<MaterialSample>),
    DrudeLorentz { eps_inf: f64, resonances: Vec<Resonance> },
}

impl MaterialModel {
    pub fn kind(&self) -> &'static str {
        match self {
            MaterialModel::Constant { .. } => "constant",
            MaterialModel::Tabulated(_) => "tabulated",
            MaterialModel::DrudeLorentz { .. } => "drude_lorentz",
        }
    }
}

/// A named dielectric with a declared validity band.
#[derive(Debug, Clone, PartialEq)]
pub struct DispersiveMaterial {
    name: String,
    band_ghz: (f64, f64),
    model: MaterialModel,
}

impl DispersiveMaterial {
    /// Builds a material after checking the model invariants.
    ///
    /// For tabulated materials the band must lie inside the sampled range.
    pub fn new(name: impl Into<String>, band_ghz: (f64, f64), model: MaterialModel) -> Result<Self> {
        let name = name.into();
        let invalid = |reason: String| Error::InvalidMaterial {
            material: name.clone(),
            reason,
        };
        let (lo, hi) = band_ghz;
        if lo.is_nan() || hi.is_nan() || lo < 0.0 || lo >= hi {
            return Err(invalid(format!("band [{lo}, {hi}] GHz is empty or negative")));
        }
        match &model {
            MaterialModel::Constant { eps_r, tan_delta } => {
                check_point(*eps_r, *tan_delta).map_err(invalid)?;
            }
            MaterialModel::Tabulated(samples) => {
                if samples.len() < 2 {
                    return Err(invalid("tabulated material needs at least 2 samples".to_string()));
                }
                for w in samples.windows(2) {
                    if !(w[1].f_ghz > w[0].f_ghz) {
                        return Err(invalid(format!(
                            "sample frequencies must be strictly increasing ({} then {})",
                            w[0].f_ghz, w[1].f_ghz
                        )));
                    }
                }
                for s in samples {
                    if !s.f_ghz.is_finite() {
                        return Err(invalid("non-finite sample frequency".to_string()));
                    }
                    check_point(s.eps_r, s.tan_delta).map_err(|r| invalid(format!("at {} GHz: {r}", s.f_ghz)))?;
                }
                let first = samples[0].f_ghz;
                let last = samples[samples.len() - 1].f_ghz;
                if lo < first || hi > last {
                    return Err(invalid(format!(
                        "band [{lo}, {hi}] GHz exceeds the tabulated range [{first}, {last}] GHz"
                    )));
                }
            }
            MaterialModel::DrudeLorentz { eps_inf, resonances } => {
                if !(eps_inf.is_finite() && *eps_inf > 0.0) {
                    return Err(invalid(format!("eps_inf must be positive, got {eps_inf}")));
                }
                for r in resonances {
                    if !(r.f0_ghz > 0.0 && r.f0_ghz.is_finite()) {
                        return Err(invalid(format!(
                            "resonance frequency must be positive, got {}",
                            r.f0_ghz
                        )));
                    }
                    if !(r.gamma_ghz >= 0.0 && r.gamma_ghz.is_finite()) {
                        return Err(invalid(format!("damping must be non-negative, got {}", r.gamma_ghz)));
                    }
                    if !(r.delta_eps >= 0.0 && r.delta_eps.is_finite()) {
                        return Err(invalid(format!("strength must be non-negative, got {}", r.delta_eps)));
                    }
                }
            }
        }
        Ok(Self { name, band_ghz, model })
    }

    /// Lossless constant material valid at every frequency.
    pub fn constant(name: impl Into<String>, eps_r: f64, tan_delta: f64) -> Result<Self> {
        Self::new(name, (0.0, f64::INFINITY), MaterialModel::Constant { eps_r, tan_delta })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn band_ghz(&self) -> (f64, f64) {
        self.band_ghz
    }

    pub fn model(&self) -> &MaterialModel {
        &self.model
    }

    fn check_band(&self, f_ghz: f64) -> Result<()> {
        let (lo, hi) = self.band_ghz;
        if f_ghz.is_nan() || f_ghz < lo || f_ghz > hi {
            return Err(Error::BandViolation {
                material: self.name.clone(),
                f_ghz,
                lo_ghz: lo,
                hi_ghz: hi,
            });
        }
        Ok(())
    }

    /// Complex relative permittivity `eps' - j eps''` at `f_ghz`.
    pub fn permittivity(&self, f_ghz: f64) -> Result<Complex64> {
        self.check_band(f_ghz)?;
        Ok(match &self.model {
            MaterialModel::Constant { eps_r, tan_delta } => Complex64::new(*eps_r, -eps_r * tan_delta),
            MaterialModel::Tabulated(samples) => {
                let (eps_r, tan_delta) = interpolate(samples, f_ghz);
                Complex64::new(eps_r, -eps_r * tan_delta)
            }
            MaterialModel::DrudeLorentz { eps_inf, resonances } => {
                // Lorentz term d*f0^2 / (f0^2 - f^2 + j*gamma*f); the +j keeps loss
                // in the negative imaginary half-plane under e^{+jwt}.
                resonances.iter().fold(Complex64::new(*eps_inf, 0.0), |acc, r| {
                    let den = Complex64::new(r.f0_ghz * r.f0_ghz - f_ghz * f_ghz, r.gamma_ghz * f_ghz);
                    acc + Complex64::new(r.delta_eps * r.f0_ghz * r.f0_ghz, 0.0) / den
                })
            }
        })
    }

    /// Loss tangent `eps'' / eps'`.
    pub fn loss_tangent(&self, f_ghz: f64) -> Result<f64> {
        let eps = self.permittivity(f_ghz)?;
        Ok(-eps.im / eps.re)
    }

    /// Real refractive index `sqrt(Re eps)` (low-loss approximation).
    pub fn refractive_index(&self, f_ghz: f64) -> Result<f64> {
        let eps = self.permittivity(f_ghz)?;
        if eps.re < 1.0 {
            return Err(Error::IndexBelowUnity {
                material: self.name.clone(),
                f_ghz,
                eps_real: eps.re,
            });
        }
        Ok(eps.re.sqrt())
    }

    /// Relative spread `(max - min) / mean` of `Re eps` over `[lo, hi]`,
    /// sampled on `points` equally spaced frequencies.
    pub fn eps_spread(&self, lo_ghz: f64, hi_ghz: f64, points: usize) -> Result<f64> {
        let points = points.max(2);
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        let mut sum = 0.0;
        for i in 0..points {
            let f = lo_ghz + (hi_ghz - lo_ghz) * i as f64 / (points - 1) as f64;
            let e = self.permittivity(f)?.re;
            min = min.min(e);
            max = max.max(e);
            sum += e;
        }
        Ok((max - min) / (sum / points as f64))
    }
}

fn check_point(eps_r: f64, tan_delta: f64) -> core::result::Result<(), String> {
    if !(eps_r.is_finite() && eps_r >= 1.0) {
        return Err(format!("eps_r must be >= 1, got {eps_r}"));
    }
    if !(tan_delta.is_finite() && tan_delta >= 0.0) {
        return Err(format!("tan_delta must be >= 0, got {tan_delta}"));
    }
    Ok(())
}

/// Linear interpolation of `(eps_r, tan_delta)`; `f` must be inside the table.
fn interpolate(samples: &[MaterialSample], f: f64) -> (f64, f64) {
    let hi = samples.partition_point(|s| s.f_ghz < f).clamp(1, samples.len() - 1);
    let (a, b) = (samples[hi - 1], samples[hi]);
    let t = (f - a.f_ghz) / (b.f_ghz - a.f_ghz);
    (
        a.eps_r + t * (b.eps_r - a.eps_r),
        a.tan_delta + t * (b.tan_delta - a.tan_delta),
    )
}
