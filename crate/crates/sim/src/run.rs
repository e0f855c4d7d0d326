//! Experiment runners. Each returns in-memory results; writing is left to
//! [`crate::output`].

use rayon::prelude::*;
use squint_core::beampattern::{phased_pattern, BeamPattern, Mechanism};
use squint_core::lens::{
    lens_far_field, lens_frequencies, lens_pattern_from_rows, switched_beam_table, Feed, LensAssembly, LensDesign,
};
use squint_core::metrics::{bf_gain_ratio, squint_report, SquintReport};
use squint_core::raytrace::{empirical_cdf, sls_point, SlsResult};
use squint_core::EvalModel;

use crate::config::{AntennaSpec, FeedSpec, LoadedScenario};
use crate::error::{Result, SimError};

/// Steering state of one antenna: nothing for arrays, solved feeds for lenses.
#[derive(Debug, Clone)]
pub enum Prepared {
    Array,
    Lens {
        assembly: Box<LensAssembly>,
        feeds: Vec<Feed>,
    },
}

impl LoadedScenario {
    fn antenna(&self, i: usize) -> &AntennaSpec {
        &self.spec.antennas[i]
    }

    pub fn antenna_index(&self, label: &str) -> Result<usize> {
        self.spec
            .antennas
            .iter()
            .position(|a| a.label() == label)
            .ok_or_else(|| SimError::config("/antennas", format!("no antenna labelled \"{label}\"")))
    }

    /// Builds the lens and solves its feed offsets for `aods` (auto feeds)
    /// or places the configured feed row.
    pub fn prepare(&self, i: usize, aods: &[f64]) -> Result<Prepared> {
        let AntennaSpec::Lens {
            diameter_lambda,
            focal_over_diameter,
            feeds,
            element,
            ray_count,
            rim_thickness_lambda,
            aperture_step_lambda,
            scan_limit_focal,
            ..
        } = self.antenna(i)
        else {
            return Ok(Prepared::Array);
        };
        let sc = &self.spec;
        let design = LensDesign {
            diameter_lambda: *diameter_lambda,
            focal_over_diameter: *focal_over_diameter,
            fc_ghz: sc.fc_ghz,
            band_ghz: sc.band_ghz.clone(),
            rim_thickness_lambda: *rim_thickness_lambda,
            ray_count: *ray_count,
            aperture_step_lambda: *aperture_step_lambda,
            scan_limit_focal: *scan_limit_focal,
        };
        let element = element.to_model();
        let material = self.materials[i].clone().expect("lens material resolved at load");
        let centre = Feed {
            offset_m: 0.0,
            element,
            design_aod_deg: 0.0,
        };
        let assembly = LensAssembly::new(design, material, vec![centre], 0)?;
        let feeds = match feeds {
            FeedSpec::Auto(_) => {
                if aods.is_empty() {
                    return Err(SimError::config("/aods_deg", "auto lens feeds need aods_deg or beams"));
                }
                let offsets = aods
                    .par_iter()
                    .map(|&a| Ok(switched_beam_table(&assembly, &[a])?[0]))
                    .collect::<Result<Vec<_>>>()?;
                offsets
                    .iter()
                    .zip(aods)
                    .map(|(&offset_m, &a)| Feed {
                        offset_m,
                        element,
                        design_aod_deg: a,
                    })
                    .collect()
            }
            FeedSpec::Pitch {
                count,
                pitch_mm,
                active_feed,
            } => {
                let all: Vec<usize> = match active_feed {
                    Some(k) => vec![*k],
                    None => (0..*count).collect(),
                };
                all.par_iter()
                    .map(|&k| {
                        let offset_m = (k as f64 - 0.5 * (*count as f64 - 1.0)) * pitch_mm * 1e-3;
                        Ok(Feed {
                            offset_m,
                            element,
                            design_aod_deg: assembly.beam_direction_for(offset_m)?,
                        })
                    })
                    .collect::<Result<Vec<_>>>()?
            }
        };
        Ok(Prepared::Lens {
            assembly: Box::new(assembly),
            feeds,
        })
    }

    /// Patterns of antenna `i` for every AoD (arrays) or prepared feed (lenses).
    pub fn beam_set(&self, i: usize, prepared: &Prepared, em: EvalModel, aods: &[f64]) -> Result<Vec<BeamPattern>> {
        let sc = &self.spec;
        let opts = sc.pattern_options()?;
        match (self.antenna(i), prepared) {
            (
                AntennaSpec::Phased {
                    n_elements,
                    spacing_lambda,
                    element,
                    ..
                }
                | AntennaSpec::Ttd {
                    n_elements,
                    spacing_lambda,
                    element,
                    ..
                },
                _,
            ) => {
                let cfg = sc.array_config(*n_elements, *spacing_lambda, element)?;
                let mech = if matches!(self.antenna(i), AntennaSpec::Ttd { .. }) {
                    Mechanism::Ttd
                } else {
                    Mechanism::Phase
                };
                aods.par_iter()
                    .map(|&a| Ok(phased_pattern(&cfg, mech, a, em, &opts)?))
                    .collect()
            }
            (AntennaSpec::Lens { .. }, Prepared::Lens { assembly, feeds }) => feeds
                .par_iter()
                .map(|&feed| {
                    let lens = assembly.with_feed(feed);
                    let rows = lens_frequencies(&lens)
                        .par_iter()
                        .map(|&f| lens_far_field(&lens, f, &opts.grid, em))
                        .collect::<squint_core::Result<Vec<_>>>()?;
                    Ok(lens_pattern_from_rows(&lens, em, &opts, rows)?)
                })
                .collect(),
            (AntennaSpec::Lens { .. }, Prepared::Array) => unreachable!("lens antennas are prepared as lenses"),
        }
    }
}

/// Squint tables for every antenna and evaluation model.
pub fn run_squint_table(sc: &LoadedScenario) -> Result<Vec<SquintReport>> {
    let aods = sc.spec.aods();
    if aods.is_empty()
        && sc.spec.antennas.iter().any(|a| {
            !matches!(
                a,
                AntennaSpec::Lens {
                    feeds: FeedSpec::Pitch { .. },
                    ..
                }
            )
        })
    {
        return Err(SimError::config("/aods_deg", "squint tables need aods_deg or beams"));
    }
    let band = sc.spec.report_band();
    let mut out = Vec::new();
    for i in 0..sc.spec.antennas.len() {
        let prepared = sc.prepare(i, &aods)?;
        for em in sc.spec.eval_models() {
            let beams = sc.beam_set(i, &prepared, em, &aods)?;
            out.push(squint_report(sc.antenna(i).label(), &beams, &band)?);
        }
    }
    Ok(out)
}

/// One BF-gain-ratio curve over the band including `fc`.
#[derive(Debug, Clone, PartialEq)]
pub struct GainCurve {
    pub antenna: String,
    pub eval_model: EvalModel,
    pub aod_deg: f64,
    pub freqs_ghz: Vec<f64>,
    pub ratio_pct: Vec<f64>,
}

impl GainCurve {
    /// EM1 curves are drawn solid and EM2 curves dashed.
    pub fn line_style(&self) -> &'static str {
        match self.eval_model {
            EvalModel::Em1 => "solid",
            EvalModel::Em2 => "dashed",
        }
    }

    pub fn at(&self, f_ghz: f64) -> Option<f64> {
        self.freqs_ghz
            .iter()
            .position(|&f| (f - f_ghz).abs() < 1e-9)
            .map(|k| self.ratio_pct[k])
    }
}

pub fn run_gain_ratio(sc: &LoadedScenario) -> Result<Vec<GainCurve>> {
    let aods = sc.spec.aods();
    let mut out = Vec::new();
    for i in 0..sc.spec.antennas.len() {
        let prepared = sc.prepare(i, &aods)?;
        for em in sc.spec.eval_models() {
            for p in sc.beam_set(i, &prepared, em, &aods)? {
                let freqs = p.freqs_ghz().to_vec();
                let ratio_pct = freqs
                    .iter()
                    .map(|&f| bf_gain_ratio(&p, f))
                    .collect::<squint_core::Result<_>>()?;
                out.push(GainCurve {
                    antenna: sc.antenna(i).label().to_owned(),
                    eval_model: em,
                    aod_deg: p.steering().aod_design_deg,
                    freqs_ghz: freqs,
                    ratio_pct,
                });
            }
        }
    }
    Ok(out)
}

/// SLS outcome of one (antenna, evaluation model) combination.
#[derive(Debug, Clone)]
pub struct SlsRun {
    pub antenna: String,
    pub kind: &'static str,
    pub eval_model: EvalModel,
    pub result: SlsResult,
}

pub fn run_sls(sc: &LoadedScenario) -> Result<Vec<SlsRun>> {
    let map = sc
        .map
        .as_ref()
        .ok_or_else(|| SimError::config("/sls", "the sls subcommand needs an sls section"))?;
    let budget = sc.spec.link_budget().expect("sls section present");
    let aods = sc.spec.aods();
    let rx = sc.rx_points();
    if rx.is_empty() {
        return Err(SimError::config("/sls/map", "rx grid is empty"));
    }
    let band = &sc.spec.band_ghz;
    let mut out = Vec::new();
    for i in 0..sc.spec.antennas.len() {
        let prepared = sc.prepare(i, &aods)?;
        for em in sc.spec.eval_models() {
            let beams = sc.beam_set(i, &prepared, em, &aods)?;
            if beams.is_empty() {
                return Err(SimError::config("/beams", "beam set is empty"));
            }
            let points = rx
                .par_iter()
                .map(|&p| sls_point(map, p, &beams, band, &budget))
                .collect::<squint_core::Result<Vec<_>>>()?;
            out.push(SlsRun {
                antenna: sc.antenna(i).label().to_owned(),
                kind: sc.antenna(i).kind(),
                eval_model: em,
                result: SlsResult {
                    band_ghz: band.clone(),
                    beam_count: beams.len(),
                    points,
                },
            });
        }
    }
    Ok(out)
}

/// Single pattern for `pattern` dumps.
pub fn run_pattern(
    sc: &LoadedScenario,
    label: Option<&str>,
    aod_deg: f64,
    em: EvalModel,
) -> Result<(String, BeamPattern)> {
    let i = match label {
        Some(l) => sc.antenna_index(l)?,
        None => 0,
    };
    let prepared = sc.prepare(i, &[aod_deg])?;
    let p = sc.beam_set(i, &prepared, em, &[aod_deg])?.swap_remove(0);
    Ok((sc.antenna(i).label().to_owned(), p))
}

/// `n` evenly spaced quantiles of the empirical CDF as `(value, probability)`.
pub fn cdf_samples(values: &[f64], n: usize) -> Vec<(f64, f64)> {
    let cdf = empirical_cdf(values);
    if cdf.is_empty() || n == 0 {
        return Vec::new();
    }
    (0..n)
        .map(|k| {
            let p = if n == 1 { 1.0 } else { k as f64 / (n - 1) as f64 };
            let idx = ((p * cdf.len() as f64).ceil() as usize).clamp(1, cdf.len()) - 1;
            (cdf[idx].0, p)
        })
        .collect()
}
