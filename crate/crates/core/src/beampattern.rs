//! Far-field directivity patterns over an (frequency × azimuth) grid.
//!
//! A [`BeamPattern`] is built from raw radiated power rows and normalised to
//! dBi over the azimuth cut. With `u = sin θ`, the cut integral
//! `∫ P cos θ dθ` equals `∫ P du`, so the normalisation
//! `D = 2 P / ∫ P cos θ dθ` is the exact directivity of a line source and
//! gives 0 dBi for an isotropic row.

use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Float;

use crate::array::{element_gain, steering_phases, ttd_delays, ArrayConfig};
use crate::{wavenumber, Error, EvalModel, Result};

/// Linear directivity floor; keeps exact nulls finite in dB.
pub const DIRECTIVITY_FLOOR: f64 = 1e-20;

const FREQ_MATCH_TOL_GHZ: f64 = 1e-9;

/// Uniform azimuth grid `start + i·step`, `i < len`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaGrid {
    pub start_deg: f64,
    pub step_deg: f64,
    pub len: usize,
}

impl ThetaGrid {
    pub const DEFAULT_STEP_DEG: f64 = 0.01;

    /// `[-90, 90]` with the given step; `180 / step` must be an integer.
    pub fn full(step_deg: f64) -> Result<Self> {
        let n = 180.0 / step_deg;
        let rounded = n.round();
        if !(step_deg > 0.0) || (n - rounded).abs() > 1e-6 || rounded < 2.0 {
            return Err(Error::InvalidConfig(format!(
                "theta step {step_deg} deg must divide 180 deg into at least 2 intervals"
            )));
        }
        Ok(Self {
            start_deg: -90.0,
            step_deg,
            len: rounded as usize + 1,
        })
    }

    pub fn angle(&self, i: usize) -> f64 {
        self.start_deg + self.step_deg * i as f64
    }

    pub fn end_deg(&self) -> f64 {
        self.angle(self.len - 1)
    }

    pub fn angles(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len).map(move |i| self.angle(i))
    }

    /// Index of the grid point nearest `theta_deg`, clamped to the grid.
    pub fn nearest(&self, theta_deg: f64) -> usize {
        let x = ((theta_deg - self.start_deg) / self.step_deg).round();
        if x <= 0.0 {
            0
        } else {
            (x as usize).min(self.len - 1)
        }
    }
}

impl Default for ThetaGrid {
    fn default() -> Self {
        Self::full(Self::DEFAULT_STEP_DEG).expect("default grid")
    }
}

/// Complex per-element excitation of a ULA.
#[derive(Debug, Clone, PartialEq)]
pub enum Weights {
    /// Phase-shifter phases in radians, identical at every frequency.
    Phases(Vec<f64>),
    /// True-time delays in seconds.
    Delays(Vec<f64>),
}

impl Weights {
    pub fn len(&self) -> usize {
        match self {
            Weights::Phases(v) | Weights::Delays(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn excitation(&self, f_ghz: f64) -> Vec<Complex64> {
        match self {
            Weights::Phases(p) => p.iter().map(|&phi| Complex64::cis(phi)).collect(),
            Weights::Delays(d) => {
                let w = core::f64::consts::TAU * f_ghz * 1e9;
                d.iter().map(|&tau| Complex64::cis(-w * tau)).collect()
            }
        }
    }
}

/// Array factor `Σ a_m e^{j k d m sin θ}` at one frequency and angle.
pub fn array_factor(cfg: &ArrayConfig, weights: &Weights, f_ghz: f64, theta_deg: f64) -> Result<Complex64> {
    if weights.len() != cfg.n_elements {
        return Err(Error::LengthMismatch {
            expected: cfg.n_elements,
            got: weights.len(),
        });
    }
    let kd_s = wavenumber(f_ghz) * cfg.spacing_m() * theta_deg.to_radians().sin();
    Ok(weights
        .excitation(f_ghz)
        .iter()
        .enumerate()
        .map(|(m, a)| a * Complex64::cis(kd_s * m as f64))
        .sum())
}

/// `|AF|²` over a whole grid using Horner evaluation in `z = e^{j k d sin θ}`.
fn array_power_row(cfg: &ArrayConfig, weights: &Weights, f_ghz: f64, grid: &ThetaGrid) -> Vec<f64> {
    let a = weights.excitation(f_ghz);
    let kd = wavenumber(f_ghz) * cfg.spacing_m();
    grid.angles()
        .map(|theta| {
            let z = Complex64::cis(kd * theta.to_radians().sin());
            let af = a.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &am| acc * z + am);
            af.norm_sqr()
        })
        .collect()
}

/// How frequency rows are scaled to dBi.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Normalization {
    /// Every row divided by the centre-frequency row's radiated power, so
    /// peak-gain differences between frequencies are preserved.
    #[default]
    CenterReference,
    /// Each row normalised by its own radiated power (true per-frequency
    /// directivity of the cut).
    PerFrequency,
}

/// Trapezoid estimate of `∫ P(θ) cos θ dθ` (θ in radians) over the grid.
pub fn radiated_integral(raw: &[f64], grid: &ThetaGrid) -> f64 {
    let h = grid.step_deg.to_radians();
    let w = |i: usize| raw[i] * grid.angle(i).to_radians().cos().max(0.0);
    let n = raw.len().min(grid.len);
    if n < 2 {
        return 0.0;
    }
    let inner: f64 = (1..n - 1).map(w).sum();
    h * (inner + 0.5 * (w(0) + w(n - 1)))
}

fn to_dbi(raw: &[f64], integral: f64) -> Vec<f64> {
    raw.iter()
        .map(|&p| 10.0 * (2.0 * p / integral).max(DIRECTIVITY_FLOOR).log10())
        .collect()
}

/// Normalises one raw power row over `[-90, 90]` to dBi.
pub fn normalize_directivity(raw: &[f64], grid: &ThetaGrid) -> Result<Vec<f64>> {
    if raw.len() != grid.len {
        return Err(Error::InvalidConfig(format!(
            "power row has {} samples, grid has {}",
            raw.len(),
            grid.len
        )));
    }
    if raw.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
        return Err(Error::InvalidConfig(
            "power samples must be finite and non-negative".into(),
        ));
    }
    let integral = radiated_integral(raw, grid);
    if !(integral > 0.0) {
        return Err(Error::DegeneratePattern);
    }
    Ok(to_dbi(raw, integral))
}

/// How the beam was steered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mechanism {
    Phase,
    Ttd,
    LensFeed,
}

impl Mechanism {
    pub fn as_str(self) -> &'static str {
        match self {
            Mechanism::Phase => "phase",
            Mechanism::Ttd => "ttd",
            Mechanism::LensFeed => "lens-feed",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Steering {
    pub mechanism: Mechanism,
    pub aod_design_deg: f64,
}

/// Interpolated main-lobe peak of one frequency row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    /// Grid index of the discrete maximum.
    pub index: usize,
    pub theta_deg: f64,
    pub dbi: f64,
}

/// Directivity (dBi) for one steering state over `freqs × grid`.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamPattern {
    grid: ThetaGrid,
    freqs_ghz: Vec<f64>,
    fc_ghz: f64,
    directivity_dbi: Vec<Vec<f64>>,
    steering: Steering,
    eval_model: EvalModel,
}

impl BeamPattern {
    /// Normalises raw power rows (one per frequency, `freqs_ghz` ascending
    /// and containing `fc_ghz`) into a pattern.
    pub fn from_power_rows(
        grid: ThetaGrid,
        freqs_ghz: Vec<f64>,
        fc_ghz: f64,
        rows: Vec<Vec<f64>>,
        steering: Steering,
        eval_model: EvalModel,
        normalization: Normalization,
    ) -> Result<Self> {
        if rows.len() != freqs_ghz.len() || freqs_ghz.is_empty() {
            return Err(Error::InvalidConfig(format!(
                "{} power rows for {} frequencies",
                rows.len(),
                freqs_ghz.len()
            )));
        }
        let fc_idx = freqs_ghz
            .iter()
            .position(|&f| (f - fc_ghz).abs() < FREQ_MATCH_TOL_GHZ)
            .ok_or(Error::MissingFrequency { f_ghz: fc_ghz })?;
        let directivity_dbi = match normalization {
            Normalization::PerFrequency => rows
                .iter()
                .map(|r| normalize_directivity(r, &grid))
                .collect::<Result<Vec<_>>>()?,
            Normalization::CenterReference => {
                // validates the centre row and fixes the common scale
                normalize_directivity(&rows[fc_idx], &grid)?;
                let integral = radiated_integral(&rows[fc_idx], &grid);
                rows.iter()
                    .map(|r| {
                        if r.len() != grid.len || r.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
                            return Err(Error::InvalidConfig("malformed power row".into()));
                        }
                        Ok(to_dbi(r, integral))
                    })
                    .collect::<Result<Vec<_>>>()?
            }
        };
        Ok(Self {
            grid,
            freqs_ghz,
            fc_ghz,
            directivity_dbi,
            steering,
            eval_model,
        })
    }

    pub fn grid(&self) -> &ThetaGrid {
        &self.grid
    }

    pub fn freqs_ghz(&self) -> &[f64] {
        &self.freqs_ghz
    }

    pub fn fc_ghz(&self) -> f64 {
        self.fc_ghz
    }

    pub fn steering(&self) -> Steering {
        self.steering
    }

    pub fn eval_model(&self) -> EvalModel {
        self.eval_model
    }

    pub fn freq_index(&self, f_ghz: f64) -> Result<usize> {
        self.freqs_ghz
            .iter()
            .position(|&f| (f - f_ghz).abs() < FREQ_MATCH_TOL_GHZ)
            .ok_or(Error::MissingFrequency { f_ghz })
    }

    pub fn row(&self, f_ghz: f64) -> Result<&[f64]> {
        Ok(&self.directivity_dbi[self.freq_index(f_ghz)?])
    }

    pub fn row_at(&self, idx: usize) -> &[f64] {
        &self.directivity_dbi[idx]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.directivity_dbi
    }

    /// Interpolated peak of the row at `f_ghz`.
    ///
    /// Ties between equal grid maxima go to the one nearest the design AoD;
    /// the location is refined by a 3-point parabola through the dB values.
    pub fn peak(&self, f_ghz: f64) -> Result<Peak> {
        let row = self.row(f_ghz)?;
        let target = self.steering.aod_design_deg;
        let mut best = 0usize;
        for (i, &v) in row.iter().enumerate() {
            let b = row[best];
            if v > b || (v == b && (self.grid.angle(i) - target).abs() < (self.grid.angle(best) - target).abs()) {
                best = i;
            }
        }
        if best == 0 || best + 1 == row.len() {
            return Ok(Peak {
                index: best,
                theta_deg: self.grid.angle(best),
                dbi: row[best],
            });
        }
        let (y0, y1, y2) = (row[best - 1], row[best], row[best + 1]);
        let curv = y0 - 2.0 * y1 + y2;
        let delta = if curv < 0.0 {
            (0.5 * (y0 - y2) / curv).clamp(-0.5, 0.5)
        } else {
            0.0
        };
        Ok(Peak {
            index: best,
            theta_deg: self.grid.angle(best) + delta * self.grid.step_deg,
            dbi: y1 - 0.25 * (y0 - y2) * delta,
        })
    }

    /// Parabolic dB interpolation of row `fi` at `theta_deg`, using the three
    /// grid points centred on `center`.
    pub fn sample_dbi_around(&self, fi: usize, center: usize, theta_deg: f64) -> f64 {
        let row = &self.directivity_dbi[fi];
        let c = center.clamp(1, row.len() - 2);
        let t = (theta_deg - self.grid.angle(c)) / self.grid.step_deg;
        let (y0, y1, y2) = (row[c - 1], row[c], row[c + 1]);
        y1 + 0.5 * t * (y2 - y0) + 0.5 * t * t * (y0 - 2.0 * y1 + y2)
    }

    /// Linear directivity of row `fi` at an arbitrary angle, interpolated
    /// linearly in power. Angles outside the grid get the floor value.
    pub fn linear_at(&self, fi: usize, theta_deg: f64) -> f64 {
        let row = &self.directivity_dbi[fi];
        let x = (theta_deg - self.grid.start_deg) / self.grid.step_deg;
        if !(x >= 0.0) || x > (self.grid.len - 1) as f64 {
            return DIRECTIVITY_FLOOR;
        }
        let i = (x.floor() as usize).min(self.grid.len - 2);
        let t = x - i as f64;
        let a = 10.0.powf(row[i] / 10.0);
        let b = 10.0.powf(row[i + 1] / 10.0);
        a + t * (b - a)
    }
}

/// Grid and normalisation choices shared by all pattern builders.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PatternOptions {
    pub grid: ThetaGrid,
    pub normalization: Normalization,
}

/// Raw power rows of a steered ULA: `|AF|²` times the element gain under
/// EM1, `|AF|²` alone under EM2.
pub fn phased_power_rows(
    cfg: &ArrayConfig,
    mechanism: Mechanism,
    aod_deg: f64,
    eval_model: EvalModel,
    grid: &ThetaGrid,
    freqs_ghz: &[f64],
) -> Result<Vec<Vec<f64>>> {
    cfg.validate()?;
    let weights = match mechanism {
        Mechanism::Phase => Weights::Phases(steering_phases(cfg, aod_deg)?),
        Mechanism::Ttd => Weights::Delays(ttd_delays(cfg, aod_deg)?),
        Mechanism::LensFeed => {
            return Err(Error::InvalidConfig("lens-feed steering is not a ULA mechanism".into()));
        }
    };
    Ok(freqs_ghz
        .iter()
        .map(|&f| {
            let mut row = array_power_row(cfg, &weights, f, grid);
            if eval_model == EvalModel::Em1 {
                for (p, theta) in row.iter_mut().zip(grid.angles()) {
                    *p *= element_gain(&cfg.element, f, theta, cfg.fc_ghz, &cfg.band_ghz);
                }
            }
            row
        })
        .collect())
}

/// Steered ULA pattern over the band plus centre frequency.
pub fn phased_pattern(
    cfg: &ArrayConfig,
    mechanism: Mechanism,
    aod_deg: f64,
    eval_model: EvalModel,
    opts: &PatternOptions,
) -> Result<BeamPattern> {
    let freqs = cfg.pattern_frequencies();
    let rows = phased_power_rows(cfg, mechanism, aod_deg, eval_model, &opts.grid, &freqs)?;
    BeamPattern::from_power_rows(
        opts.grid,
        freqs,
        cfg.fc_ghz,
        rows,
        Steering {
            mechanism,
            aod_design_deg: aod_deg,
        },
        eval_model,
        opts.normalization,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::array::ElementModel;
    use alloc::vec;
    use approx::assert_relative_eq;

    fn ula(element: ElementModel) -> ArrayConfig {
        ArrayConfig::reference(element)
    }

    #[test]
    fn grid_shape() {
        let g = ThetaGrid::default();
        assert_eq!(g.len, 18001);
        assert_eq!(g.angle(0), -90.0);
        assert_relative_eq!(g.end_deg(), 90.0, epsilon = 1e-9);
        assert_eq!(g.nearest(0.004), 9000);
        assert!(ThetaGrid::full(0.07).is_err());
    }

    #[test]
    fn coherent_sum_at_broadside() {
        let cfg = ula(ElementModel::Ideal);
        let w = Weights::Phases(steering_phases(&cfg, 0.0).unwrap());
        for f in [27.0, 28.5, 30.0] {
            assert_relative_eq!(array_factor(&cfg, &w, f, 0.0).unwrap().norm(), 28.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn weight_length_mismatch() {
        let cfg = ula(ElementModel::Ideal);
        let w = Weights::Phases(vec![0.0; 3]);
        assert!(matches!(
            array_factor(&cfg, &w, 28.5, 0.0),
            Err(Error::LengthMismatch { expected: 28, got: 3 })
        ));
    }

    #[test]
    fn horner_row_matches_direct_sum() {
        let cfg = ula(ElementModel::Ideal);
        let w = Weights::Phases(steering_phases(&cfg, 18.0).unwrap());
        let grid = ThetaGrid::full(1.0).unwrap();
        let row = array_power_row(&cfg, &w, 27.5, &grid);
        for (i, theta) in grid.angles().enumerate() {
            let direct = array_factor(&cfg, &w, 27.5, theta).unwrap().norm_sqr();
            assert_relative_eq!(row[i], direct, epsilon = 1e-9, max_relative = 1e-9);
        }
    }

    #[test]
    fn isotropic_row_is_zero_dbi() {
        let grid = ThetaGrid::full(0.01).unwrap();
        let d = normalize_directivity(&vec![1.0; grid.len], &grid).unwrap();
        for v in d {
            assert!(v.abs() < 1e-6, "{v}");
        }
    }

    #[test]
    fn normalisation_is_scale_invariant() {
        let grid = ThetaGrid::full(0.5).unwrap();
        let raw: Vec<f64> = grid.angles().map(|t| 1.0 + t.to_radians().cos().powi(3)).collect();
        let doubled: Vec<f64> = raw.iter().map(|p| 2.0 * p).collect();
        let a = normalize_directivity(&raw, &grid).unwrap();
        let b = normalize_directivity(&doubled, &grid).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_relative_eq!(x, y, epsilon = 1e-12);
        }
    }

    #[test]
    fn zero_pattern_is_degenerate() {
        let grid = ThetaGrid::full(1.0).unwrap();
        assert_eq!(
            normalize_directivity(&vec![0.0; grid.len], &grid),
            Err(Error::DegeneratePattern)
        );
    }

    #[test]
    fn broadside_symmetry() {
        let cfg = ula(ElementModel::default_patch());
        let p = phased_pattern(&cfg, Mechanism::Phase, 0.0, EvalModel::Em1, &PatternOptions::default()).unwrap();
        for row in p.rows() {
            let n = row.len();
            for i in 0..n / 2 {
                let a = 10.0.powf(row[i] / 10.0);
                let b = 10.0.powf(row[n - 1 - i] / 10.0);
                assert!((a - b).abs() < 1e-9, "asymmetry {a} vs {b} at {i}");
            }
        }
    }

    #[test]
    fn em_distinction_collapses_for_ideal_elements() {
        let cfg = ula(ElementModel::Ideal);
        let opts = PatternOptions::default();
        let a = phased_pattern(&cfg, Mechanism::Phase, 24.0, EvalModel::Em1, &opts).unwrap();
        let b = phased_pattern(&cfg, Mechanism::Phase, 24.0, EvalModel::Em2, &opts).unwrap();
        assert_eq!(a.rows(), b.rows());
    }

    #[test]
    fn tie_breaks_towards_design_aod() {
        let grid = ThetaGrid::full(1.0).unwrap();
        let mut raw = vec![1.0; grid.len];
        raw[grid.nearest(-20.0)] = 5.0;
        raw[grid.nearest(25.0)] = 5.0;
        let p = BeamPattern::from_power_rows(
            grid,
            vec![28.5],
            28.5,
            vec![raw],
            Steering {
                mechanism: Mechanism::Phase,
                aod_design_deg: 20.0,
            },
            EvalModel::Em2,
            Normalization::CenterReference,
        )
        .unwrap();
        assert_eq!(p.peak(28.5).unwrap().theta_deg, 25.0);
    }

    #[test]
    fn centre_reference_keeps_gain_offsets() {
        let grid = ThetaGrid::full(1.0).unwrap();
        let base: Vec<f64> = grid.angles().map(|t| t.to_radians().cos().powi(2)).collect();
        let half: Vec<f64> = base.iter().map(|p| 0.5 * p).collect();
        let steering = Steering {
            mechanism: Mechanism::Phase,
            aod_design_deg: 0.0,
        };
        let p = BeamPattern::from_power_rows(
            grid,
            vec![28.0, 28.5],
            28.5,
            vec![half.clone(), base.clone()],
            steering,
            EvalModel::Em1,
            Normalization::CenterReference,
        )
        .unwrap();
        let d = p.peak(28.0).unwrap().dbi - p.peak(28.5).unwrap().dbi;
        assert_relative_eq!(d, -3.0103, epsilon = 1e-4);
        let q = BeamPattern::from_power_rows(
            grid,
            vec![28.0, 28.5],
            28.5,
            vec![half, base],
            steering,
            EvalModel::Em1,
            Normalization::PerFrequency,
        )
        .unwrap();
        assert!((q.peak(28.0).unwrap().dbi - q.peak(28.5).unwrap().dbi).abs() < 1e-9);
    }

    #[test]
    fn missing_centre_row_is_rejected() {
        let grid = ThetaGrid::full(1.0).unwrap();
        let r = BeamPattern::from_power_rows(
            grid,
            vec![27.0],
            28.5,
            vec![vec![1.0; grid.len]],
            Steering {
                mechanism: Mechanism::Phase,
                aod_design_deg: 0.0,
            },
            EvalModel::Em2,
            Normalization::CenterReference,
        );
        assert!(matches!(r, Err(Error::MissingFrequency { .. })));
    }
}
