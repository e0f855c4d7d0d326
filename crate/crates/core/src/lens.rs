//! Plano-hyperbolic dielectric lens with a switched feed plane.
//!
//! Geometry lives in the azimuth plane: `x` across the aperture, `z` along
//! the optical axis. The focus sits at the origin, the hyperbolic surface
//! faces the feeds with its apex at `z = F`, and the flat exit face is the
//! plane `z = exit_z`. Feeds sit on the focal plane `z = 0`.
//!
//! A feed *offset* is measured opposite to the beam: a feed at `x = −s`
//! steers the beam towards positive azimuth, so offsets and steering angles
//! share their sign.

use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::array::{element_gain, ElementModel};
use crate::beampattern::{BeamPattern, Mechanism, PatternOptions, Steering, ThetaGrid};
use crate::materials::DispersiveMaterial;
use crate::{wavelength_m, wavenumber, Error, EvalModel, Result};

/// Fraction of TIR-discarded rays above which tracing fails.
pub const MAX_DISCARD_FRACTION: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vec2 {
    pub x: f64,
    pub z: f64,
}

impl Vec2 {
    pub const fn new(x: f64, z: f64) -> Self {
        Self { x, z }
    }

    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.z * o.z
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.z)
    }

    pub fn normalized(self) -> Vec2 {
        let n = self.norm();
        Vec2::new(self.x / n, self.z / n)
    }

    pub fn scale(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.z * s)
    }
}

impl core::ops::Add for Vec2 {
    type Output = Vec2;

    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.z + o.z)
    }
}

impl core::ops::Sub for Vec2 {
    type Output = Vec2;

    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.z - o.z)
    }
}

/// A traced ray after it left the exit face.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ray {
    pub origin: Vec2,
    pub direction: Vec2,
    /// Accumulated `Σ n·length` from the feed, meters.
    pub optical_path: f64,
    /// Linear field amplitude (square root of carried power).
    pub amplitude: f64,
}

/// Vector form of Snell's law.
///
/// `normal` may point to either side of the interface; it is flipped to face
/// the incident ray. Fails with the critical angle on total internal
/// reflection.
pub fn refract(incident: Vec2, normal: Vec2, n1: f64, n2: f64) -> Result<Vec2> {
    let mut nrm = normal.normalized();
    let mut cos_i = -nrm.dot(incident);
    if cos_i < 0.0 {
        nrm = nrm.scale(-1.0);
        cos_i = -cos_i;
    }
    let eta = n1 / n2;
    let k = 1.0 - eta * eta * (1.0 - cos_i * cos_i);
    if k < 0.0 {
        return Err(Error::TotalInternalReflection {
            critical_angle_deg: (n2 / n1).asin().to_degrees(),
        });
    }
    Ok((incident.scale(eta) + nrm.scale(eta * cos_i - k.sqrt())).normalized())
}

/// Sampled front surface of a plano-hyperbolic lens.
#[derive(Debug, Clone, PartialEq)]
pub struct LensProfile {
    pub diameter_m: f64,
    pub focal_length_m: f64,
    pub n_design: f64,
    /// `(x, z)` samples, `x` ascending over `[-D/2, D/2]`.
    pub samples: Vec<(f64, f64)>,
}

impl LensProfile {
    pub const MIN_SAMPLES: usize = 1001;

    /// Distance from the focus to the surface at polar angle `phi` (radians)
    /// off the axis: `r = (n−1) F / (n cos φ − 1)`.
    pub fn radius_at(&self, phi: f64) -> f64 {
        hyperbola_radius(self.n_design, self.focal_length_m, phi)
    }

    /// Surface `z` at lateral position `x`.
    pub fn sag(&self, x: f64) -> f64 {
        hyperbola_z(self.n_design, self.focal_length_m, x)
    }

    pub fn rim_z(&self) -> f64 {
        self.sag(0.5 * self.diameter_m)
    }
}

fn hyperbola_radius(n: f64, f: f64, phi: f64) -> f64 {
    (n - 1.0) * f / (n * phi.cos() - 1.0)
}

/// Root of `(n²−1) z² − 2n(n−1)F z + (n−1)²F² − x² = 0` on the branch
/// through the apex `z = F`.
fn hyperbola_z(n: f64, f: f64, x: f64) -> f64 {
    let a = n * n - 1.0;
    let b = n * (n - 1.0) * f;
    let c = (n - 1.0) * (n - 1.0) * f * f - x * x;
    (b + (b * b - a * c).sqrt()) / a
}

/// Samples the hyperbolic surface for a lens of the given aperture.
pub fn hyperbolic_profile(diameter_m: f64, focal_length_m: f64, n_design: f64) -> Result<LensProfile> {
    if !(n_design > 1.0) {
        return Err(Error::NoRefraction { n: n_design });
    }
    if !(diameter_m > 0.0 && diameter_m.is_finite()) {
        return Err(Error::LensGeometry(format!(
            "diameter must be positive, got {diameter_m}"
        )));
    }
    if !(focal_length_m > 0.0 && focal_length_m.is_finite()) {
        return Err(Error::LensGeometry(format!(
            "focal length must be positive, got {focal_length_m}"
        )));
    }
    let half = 0.5 * diameter_m;
    // the rim must be reached before the asymptote at cos φ = 1/n
    let phi_max = (1.0 / n_design).acos();
    let rim_x = |phi: f64| hyperbola_radius(n_design, focal_length_m, phi) * phi.sin();
    let (mut lo, mut hi) = (0.0, phi_max * (1.0 - 1e-12));
    if !(rim_x(hi) > half) {
        return Err(Error::LensGeometry(format!(
            "aperture {diameter_m} m exceeds what the hyperbola supports for F = {focal_length_m} m"
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if rim_x(mid) < half {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let rim_z = hyperbola_radius(n_design, focal_length_m, lo) * lo.cos();
    if !rim_z.is_finite() {
        return Err(Error::LensGeometry("rim lies at infinity".into()));
    }
    let n = LensProfile::MIN_SAMPLES;
    let samples = (0..n)
        .map(|i| {
            let x = -half + diameter_m * i as f64 / (n - 1) as f64;
            (x, hyperbola_z(n_design, focal_length_m, x))
        })
        .collect();
    Ok(LensProfile {
        diameter_m,
        focal_length_m,
        n_design,
        samples,
    })
}

/// One switchable feed on the focal plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Feed {
    /// Steering offset in meters; the feed sits at `x = −offset_m`.
    pub offset_m: f64,
    pub element: ElementModel,
    /// Intended beam direction, used for peak tie-breaking.
    pub design_aod_deg: f64,
}

/// Construction parameters for a [`LensAssembly`].
#[derive(Debug, Clone, PartialEq)]
pub struct LensDesign {
    pub diameter_lambda: f64,
    pub focal_over_diameter: f64,
    pub fc_ghz: f64,
    pub band_ghz: Vec<f64>,
    /// Lens thickness at the rim, wavelengths at `fc`.
    pub rim_thickness_lambda: f64,
    pub ray_count: usize,
    /// Spacing of the resampled exit aperture, wavelengths at `fc`.
    pub aperture_step_lambda: f64,
    /// Largest feed offset the focal plane allows, in focal lengths.
    pub scan_limit_focal: f64,
}

impl LensDesign {
    pub const DEFAULT_RAYS: usize = 2001;

    pub fn new(diameter_lambda: f64, fc_ghz: f64, band_ghz: Vec<f64>) -> Self {
        Self {
            diameter_lambda,
            focal_over_diameter: 1.0,
            fc_ghz,
            band_ghz,
            rim_thickness_lambda: 0.5,
            ray_count: Self::DEFAULT_RAYS,
            aperture_step_lambda: 0.1,
            scan_limit_focal: 1.0,
        }
    }
}

/// Lens, material and switched feed array.
#[derive(Debug, Clone, PartialEq)]
pub struct LensAssembly {
    design: LensDesign,
    material: DispersiveMaterial,
    profile: LensProfile,
    exit_z: f64,
    feeds: Vec<Feed>,
    active_feed: usize,
}

impl LensAssembly {
    /// Designs the profile for `material` at `fc` and attaches the feeds.
    pub fn new(design: LensDesign, material: DispersiveMaterial, feeds: Vec<Feed>, active_feed: usize) -> Result<Self> {
        if feeds.is_empty() || active_feed >= feeds.len() {
            return Err(Error::LensGeometry(format!(
                "active feed {active_feed} out of range for {} feeds",
                feeds.len()
            )));
        }
        for f in &feeds {
            f.element.validate()?;
        }
        if design.ray_count < 3 {
            return Err(Error::LensGeometry("need at least 3 rays".into()));
        }
        if !(design.aperture_step_lambda > 0.0) || !(design.rim_thickness_lambda >= 0.0) {
            return Err(Error::LensGeometry(
                "aperture step and rim thickness must be positive".into(),
            ));
        }
        if !(design.scan_limit_focal > 0.0) {
            return Err(Error::LensGeometry("scan limit must be positive".into()));
        }
        if design.band_ghz.windows(2).any(|w| !(w[1] > w[0])) || design.band_ghz.is_empty() {
            return Err(Error::LensGeometry(
                "band must be non-empty and strictly increasing".into(),
            ));
        }
        let lambda = wavelength_m(design.fc_ghz);
        let diameter = design.diameter_lambda * lambda;
        let focal = design.focal_over_diameter * diameter;
        let n_design = material.refractive_index(design.fc_ghz)?;
        let profile = hyperbolic_profile(diameter, focal, n_design)?;
        let exit_z = profile.rim_z() + design.rim_thickness_lambda * lambda;
        Ok(Self {
            design,
            material,
            profile,
            exit_z,
            feeds,
            active_feed,
        })
    }

    pub fn design(&self) -> &LensDesign {
        &self.design
    }

    pub fn material(&self) -> &DispersiveMaterial {
        &self.material
    }

    pub fn profile(&self) -> &LensProfile {
        &self.profile
    }

    pub fn exit_z(&self) -> f64 {
        self.exit_z
    }

    pub fn feeds(&self) -> &[Feed] {
        &self.feeds
    }

    pub fn active_feed(&self) -> &Feed {
        &self.feeds[self.active_feed]
    }

    pub fn diameter_m(&self) -> f64 {
        self.profile.diameter_m
    }

    pub fn focal_length_m(&self) -> f64 {
        self.profile.focal_length_m
    }

    pub fn scan_limit_m(&self) -> f64 {
        self.design.scan_limit_focal * self.profile.focal_length_m
    }

    /// Same lens with a single feed at `offset_m`.
    pub fn with_feed(&self, feed: Feed) -> Self {
        Self {
            feeds: alloc::vec![feed],
            active_feed: 0,
            ..self.clone()
        }
    }

    pub fn with_active(&self, active_feed: usize) -> Result<Self> {
        if active_feed >= self.feeds.len() {
            return Err(Error::LensGeometry(format!("no feed {active_feed}")));
        }
        Ok(Self {
            active_feed,
            ..self.clone()
        })
    }

    /// Same geometry with a different material; the profile is kept, so
    /// a mismatch against the design index shows up as aberration.
    pub fn with_material_keep_profile(&self, material: DispersiveMaterial) -> Self {
        Self {
            material,
            ..self.clone()
        }
    }

    fn surface_hit(&self, origin: Vec2, dir: Vec2) -> Option<Vec2> {
        let n = self.profile.n_design;
        let f = self.profile.focal_length_m;
        let a2 = n * n - 1.0;
        let qa = a2 * dir.z * dir.z - dir.x * dir.x;
        let qb = 2.0 * a2 * origin.z * dir.z - 2.0 * n * (n - 1.0) * f * dir.z - 2.0 * origin.x * dir.x;
        let qc = a2 * origin.z * origin.z - 2.0 * n * (n - 1.0) * f * origin.z + (n - 1.0) * (n - 1.0) * f * f
            - origin.x * origin.x;
        let mut roots = [f64::NAN; 2];
        if qa.abs() < 1e-14 * (qb.abs() + qc.abs()) {
            roots[0] = -qc / qb;
        } else {
            let disc = qb * qb - 4.0 * qa * qc;
            if disc < 0.0 {
                return None;
            }
            let s = disc.sqrt();
            // numerically stable pair
            let q = -0.5 * (qb + qb.signum() * s);
            roots = [q / qa, qc / q];
        }
        let mut best: Option<(f64, Vec2)> = None;
        for t in roots {
            if !(t > 0.0) || !t.is_finite() {
                continue;
            }
            let p = origin + dir.scale(t);
            if n * p.z - (n - 1.0) * f < -1e-12 * f {
                continue;
            }
            if best.is_none_or(|(bt, _)| t < bt) {
                best = Some((t, p));
            }
        }
        best.map(|(_, p)| p)
    }

    /// Traces the active feed's ray fan at `f_ghz`.
    pub fn trace(&self, f_ghz: f64, eval_model: EvalModel) -> Result<ApertureTrace> {
        let n_f = self.material.refractive_index(f_ghz)?;
        let tan_delta = self.material.loss_tangent(f_ghz)?;
        let alpha = core::f64::consts::PI * f_ghz * 1e9 * n_f * tan_delta / crate::SPEED_OF_LIGHT;
        let feed = *self.active_feed();
        let origin = Vec2::new(-feed.offset_m, 0.0);
        let half = 0.5 * self.diameter_m();
        let rim_z = self.profile.rim_z();
        let psi_lo = (-half - origin.x).atan2(rim_z);
        let psi_hi = (half - origin.x).atan2(rim_z);
        let count = self.design.ray_count;
        let dpsi = (psi_hi - psi_lo) / count as f64;

        let mut out = ApertureTrace {
            rays: Vec::with_capacity(count),
            launched_power: 0.0,
            tir_discarded: 0,
            spilled: 0,
            total: count,
        };
        for i in 0..count {
            let psi = psi_lo + (i as f64 + 0.5) * dpsi;
            let gain = match eval_model {
                EvalModel::Em1 => element_gain(
                    &feed.element,
                    f_ghz,
                    psi.to_degrees(),
                    self.design.fc_ghz,
                    &self.design.band_ghz,
                ),
                EvalModel::Em2 => 1.0,
            };
            let power = gain * dpsi;
            out.launched_power += power;
            let dir = Vec2::new(psi.sin(), psi.cos());
            let Some(p1) = self.surface_hit(origin, dir) else {
                out.spilled += 1;
                continue;
            };
            if p1.x.abs() > half * (1.0 + 1e-12) {
                out.spilled += 1;
                continue;
            }
            let rho = p1.norm();
            let normal = Vec2::new(-p1.x / rho, self.profile.n_design - p1.z / rho);
            let d2 = refract(dir, normal, 1.0, n_f)?;
            if !(d2.z > 0.0) {
                out.spilled += 1;
                continue;
            }
            let t2 = (self.exit_z - p1.z) / d2.z;
            let p2 = p1 + d2.scale(t2);
            if p2.x.abs() > half {
                out.spilled += 1;
                continue;
            }
            let d3 = match refract(d2, Vec2::new(0.0, 1.0), n_f, 1.0) {
                Ok(d) => d,
                Err(Error::TotalInternalReflection { .. }) => {
                    out.tir_discarded += 1;
                    continue;
                }
                Err(e) => return Err(e),
            };
            let internal = t2;
            out.rays.push(Ray {
                origin: p2,
                direction: d3,
                optical_path: (p1 - origin).norm() + n_f * internal,
                amplitude: power.sqrt() * (-alpha * internal).exp(),
            });
        }
        if out.tir_discarded as f64 > MAX_DISCARD_FRACTION * count as f64 {
            return Err(Error::ExcessiveDiscard {
                discarded: out.tir_discarded,
                total: count,
            });
        }
        if out.rays.len() < 3 {
            return Err(Error::LensGeometry("fewer than 3 rays reached the exit face".into()));
        }
        Ok(out)
    }

    /// Raw far-field power `|F(θ)|²` over `grid` at `f_ghz`.
    pub fn far_field_power(&self, f_ghz: f64, grid: &ThetaGrid, eval_model: EvalModel) -> Result<Vec<f64>> {
        let aperture = self
            .trace(f_ghz, eval_model)?
            .resample(self.design.aperture_step_lambda * wavelength_m(self.design.fc_ghz))?;
        Ok(grid.angles().map(|t| aperture.power(f_ghz, t)).collect())
    }

    /// Beam direction at `fc` (EM2), refined to ~1e-4 deg.
    fn beam_direction(&self) -> Result<f64> {
        let fc = self.design.fc_ghz;
        let aperture = self
            .trace(fc, EvalModel::Em2)?
            .resample(self.design.aperture_step_lambda * wavelength_m(fc))?;
        let coarse = ThetaGrid::full(0.05)?;
        let mut best = (f64::NEG_INFINITY, 0.0);
        for t in coarse.angles() {
            let p = aperture.power(fc, t);
            if p > best.0 {
                best = (p, t);
            }
        }
        let step = 0.001;
        let mut fine = (f64::NEG_INFINITY, best.1);
        for i in -60..=60 {
            let t = best.1 + step * i as f64;
            let p = aperture.power(fc, t);
            if p > fine.0 {
                fine = (p, t);
            }
        }
        let (y0, y1, y2) = (
            aperture.power(fc, fine.1 - step).log10(),
            fine.0.log10(),
            aperture.power(fc, fine.1 + step).log10(),
        );
        let curv = y0 - 2.0 * y1 + y2;
        let delta = if curv < 0.0 {
            (0.5 * (y0 - y2) / curv).clamp(-0.5, 0.5)
        } else {
            0.0
        };
        Ok(fine.1 + delta * step)
    }

    /// Centre-frequency beam direction with the active feed moved to `offset_m`.
    pub fn beam_direction_for(&self, offset_m: f64) -> Result<f64> {
        let feed = Feed {
            offset_m,
            ..*self.active_feed()
        };
        self.with_feed(feed).beam_direction()
    }
}

/// Rays leaving the exit face plus bookkeeping counters.
#[derive(Debug, Clone, PartialEq)]
pub struct ApertureTrace {
    pub rays: Vec<Ray>,
    /// `Σ` launched ray power.
    pub launched_power: f64,
    pub tir_discarded: usize,
    /// Rays that missed the lens or left through its side.
    pub spilled: usize,
    pub total: usize,
}

impl ApertureTrace {
    /// `Σ amplitude²` over the exit rays.
    pub fn exit_power(&self) -> f64 {
        self.rays.iter().map(|r| r.amplitude * r.amplitude).sum()
    }

    /// Converts ray samples into a uniformly sampled aperture field.
    ///
    /// Each ray carries power over its tube width on the exit plane, giving
    /// a field density `sqrt(p / Δx)`; density and optical path are then
    /// interpolated linearly onto a grid of spacing `step_m`.
    pub fn resample(&self, step_m: f64) -> Result<ApertureField> {
        let rays = &self.rays;
        let n = rays.len();
        if rays.windows(2).any(|w| !(w[1].origin.x > w[0].origin.x)) {
            return Err(Error::LensGeometry("exit rays cross (caustic inside the lens)".into()));
        }
        let xs: Vec<f64> = rays.iter().map(|r| r.origin.x).collect();
        let density: Vec<f64> = (0..n)
            .map(|k| {
                let width = match k {
                    0 => xs[1] - xs[0],
                    k if k == n - 1 => xs[n - 1] - xs[n - 2],
                    k => 0.5 * (xs[k + 1] - xs[k - 1]),
                };
                rays[k].amplitude / width.sqrt()
            })
            .collect();
        let x0 = xs[0];
        let span = xs[n - 1] - x0;
        let m = (span / step_m).floor() as usize + 1;
        let mut samples = Vec::with_capacity(m);
        let mut k = 0usize;
        for j in 0..m {
            let x = x0 + j as f64 * step_m;
            while k + 2 < n && xs[k + 1] < x {
                k += 1;
            }
            let t = ((x - xs[k]) / (xs[k + 1] - xs[k])).clamp(0.0, 1.0);
            let a = density[k] + t * (density[k + 1] - density[k]);
            let opl = rays[k].optical_path + t * (rays[k + 1].optical_path - rays[k].optical_path);
            samples.push((a * step_m, opl));
        }
        Ok(ApertureField { x0, step_m, samples })
    }
}

/// Uniformly sampled exit-aperture field: `(weight, optical path)` pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct ApertureField {
    pub x0: f64,
    pub step_m: f64,
    pub samples: Vec<(f64, f64)>,
}

impl ApertureField {
    /// `|Σ_j w_j e^{−jk·OPL_j} e^{jk x_j sin θ}|²`.
    pub fn power(&self, f_ghz: f64, theta_deg: f64) -> f64 {
        let k = wavenumber(f_ghz);
        let s = theta_deg.to_radians().sin();
        let z = Complex64::cis(k * self.step_m * s);
        self.samples
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &(w, opl)| {
                acc * z + Complex64::from_polar(w, -k * opl)
            })
            .norm_sqr()
    }
}

/// Far-field power row of the active feed; the row is raw power, to be
/// normalised by [`BeamPattern::from_power_rows`].
pub fn lens_far_field(
    assembly: &LensAssembly,
    f_ghz: f64,
    grid: &ThetaGrid,
    eval_model: EvalModel,
) -> Result<Vec<f64>> {
    assembly.far_field_power(f_ghz, grid, eval_model)
}

/// Frequencies at which lens patterns are evaluated: band plus `fc`.
pub fn lens_frequencies(assembly: &LensAssembly) -> Vec<f64> {
    let d = assembly.design();
    let mut f = d.band_ghz.clone();
    if !f.contains(&d.fc_ghz) {
        f.push(d.fc_ghz);
        f.sort_by(|a, b| a.total_cmp(b));
    }
    f
}

/// Assembles a full pattern from precomputed rows (one per
/// [`lens_frequencies`] entry).
pub fn lens_pattern_from_rows(
    assembly: &LensAssembly,
    eval_model: EvalModel,
    opts: &PatternOptions,
    rows: Vec<Vec<f64>>,
) -> Result<BeamPattern> {
    BeamPattern::from_power_rows(
        opts.grid,
        lens_frequencies(assembly),
        assembly.design().fc_ghz,
        rows,
        Steering {
            mechanism: Mechanism::LensFeed,
            aod_design_deg: assembly.active_feed().design_aod_deg,
        },
        eval_model,
        opts.normalization,
    )
}

/// Pattern of the active feed over the band plus `fc`.
pub fn lens_pattern(assembly: &LensAssembly, eval_model: EvalModel, opts: &PatternOptions) -> Result<BeamPattern> {
    let rows = lens_frequencies(assembly)
        .iter()
        .map(|&f| lens_far_field(assembly, f, &opts.grid, eval_model))
        .collect::<Result<Vec<_>>>()?;
    lens_pattern_from_rows(assembly, eval_model, opts, rows)
}

/// Residual tolerance of the switched-beam solver, degrees.
pub const SWITCH_TOLERANCE_DEG: f64 = 0.05;

/// Feed offsets whose centre-frequency beam points at each target.
///
/// Offsets are found by bisection on the monotone offset→angle map over the
/// assembly's scan limit.
pub fn switched_beam_table(assembly: &LensAssembly, targets_deg: &[f64]) -> Result<Vec<f64>> {
    let limit = assembly.scan_limit_m();
    let max_deg = assembly.beam_direction_for(limit)?;
    targets_deg
        .iter()
        .map(|&target| {
            let mag = target.abs();
            if mag == 0.0 {
                return Ok(0.0);
            }
            if mag > max_deg {
                return Err(Error::ScanRange {
                    target_deg: target,
                    max_deg,
                });
            }
            let (mut lo, mut hi) = (0.0, limit);
            for _ in 0..48 {
                let mid = 0.5 * (lo + hi);
                if assembly.beam_direction_for(mid)? < mag {
                    lo = mid;
                } else {
                    hi = mid;
                }
                if hi - lo < 1e-9 {
                    break;
                }
            }
            let offset = 0.5 * (lo + hi);
            let residual = assembly.beam_direction_for(offset)? - mag;
            if residual.abs() >= SWITCH_TOLERANCE_DEG {
                return Err(Error::LensGeometry(format!(
                    "switched beam for {target} deg did not converge (residual {residual} deg)"
                )));
            }
            Ok(offset.copysign(target))
        })
        .collect()
}
