//! Scenario schema (version "1") and its validation.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use squint_core::array::{ArrayConfig, ElementModel};
use squint_core::beampattern::{Normalization, PatternOptions, ThetaGrid};
use squint_core::lens::LensDesign;
use squint_core::materials::DispersiveMaterial;
use squint_core::raytrace::{IndoorMap, LinkBudget, NoiseModel, Point, Summation};
use squint_core::EvalModel;

use crate::data::{self, MapFile, MaterialFile};
use crate::error::{Result, SimError};

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EvalModelName {
    #[serde(rename = "EM1")]
    Em1,
    #[serde(rename = "EM2")]
    Em2,
}

impl From<EvalModelName> for EvalModel {
    fn from(e: EvalModelName) -> Self {
        match e {
            EvalModelName::Em1 => EvalModel::Em1,
            EvalModelName::Em2 => EvalModel::Em2,
        }
    }
}

fn both_models() -> Vec<EvalModelName> {
    vec![EvalModelName::Em1, EvalModelName::Em2]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ElementSpec {
    Ideal,
    Patch {
        #[serde(default = "default_g0")]
        g0_dbi: f64,
        #[serde(default = "default_q")]
        q: f64,
        #[serde(default = "default_rolloff")]
        edge_rolloff_db: f64,
    },
}

fn default_g0() -> f64 {
    ElementModel::DEFAULT_G0_DBI
}
fn default_q() -> f64 {
    ElementModel::DEFAULT_Q
}
fn default_rolloff() -> f64 {
    ElementModel::DEFAULT_EDGE_ROLLOFF_DB
}

impl Default for ElementSpec {
    fn default() -> Self {
        Self::Patch {
            g0_dbi: default_g0(),
            q: default_q(),
            edge_rolloff_db: default_rolloff(),
        }
    }
}

impl ElementSpec {
    pub fn to_model(&self) -> ElementModel {
        match *self {
            Self::Ideal => ElementModel::Ideal,
            Self::Patch {
                g0_dbi,
                q,
                edge_rolloff_db,
            } => ElementModel::NarrowbandPatch {
                g0_dbi,
                q,
                edge_rolloff_db,
            },
        }
    }
}

/// A bundled name or a file path relative to the scenario file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DataRef {
    Builtin(String),
    File { file: PathBuf },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FeedSpec {
    /// `"auto"`: offsets solved for each requested AoD.
    Auto(AutoFeeds),
    Pitch {
        count: usize,
        pitch_mm: f64,
        #[serde(default)]
        active_feed: Option<usize>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AutoFeeds {
    Auto,
}

impl Default for FeedSpec {
    fn default() -> Self {
        Self::Auto(AutoFeeds::Auto)
    }
}

fn default_n() -> usize {
    28
}
fn default_spacing() -> f64 {
    0.5
}
fn default_fd() -> f64 {
    1.0
}
fn default_rays() -> usize {
    LensDesign::DEFAULT_RAYS
}
fn default_rim() -> f64 {
    0.5
}
fn default_aperture_step() -> f64 {
    0.1
}
fn default_scan_limit() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AntennaSpec {
    Phased {
        label: String,
        #[serde(default = "default_n")]
        n_elements: usize,
        #[serde(default = "default_spacing")]
        spacing_lambda: f64,
        #[serde(default)]
        element: ElementSpec,
    },
    Ttd {
        label: String,
        #[serde(default = "default_n")]
        n_elements: usize,
        #[serde(default = "default_spacing")]
        spacing_lambda: f64,
        #[serde(default)]
        element: ElementSpec,
    },
    Lens {
        label: String,
        diameter_lambda: f64,
        #[serde(default = "default_fd")]
        focal_over_diameter: f64,
        material: DataRef,
        #[serde(default)]
        feeds: FeedSpec,
        #[serde(default)]
        element: ElementSpec,
        #[serde(default = "default_rays")]
        ray_count: usize,
        #[serde(default = "default_rim")]
        rim_thickness_lambda: f64,
        #[serde(default = "default_aperture_step")]
        aperture_step_lambda: f64,
        #[serde(default = "default_scan_limit")]
        scan_limit_focal: f64,
    },
}

impl AntennaSpec {
    pub fn label(&self) -> &str {
        match self {
            Self::Phased { label, .. } | Self::Ttd { label, .. } | Self::Lens { label, .. } => label,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::Phased { .. } => "phased",
            Self::Ttd { .. } => "ttd",
            Self::Lens { .. } => "lens",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BeamSetSpec {
    pub count: usize,
    pub span_deg: [f64; 2],
}

impl BeamSetSpec {
    /// `count` AoDs uniformly covering `span_deg`, endpoints included.
    pub fn aods(&self) -> Vec<f64> {
        let [a, b] = self.span_deg;
        if self.count == 1 {
            return vec![a];
        }
        (0..self.count)
            .map(|i| a + (b - a) * i as f64 / (self.count - 1) as f64)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum NormalizationName {
    #[default]
    CenterReference,
    PerFrequency,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    #[serde(default = "default_step")]
    pub step_deg: f64,
    #[serde(default)]
    pub normalization: NormalizationName,
}

fn default_step() -> f64 {
    ThetaGrid::DEFAULT_STEP_DEG
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            step_deg: default_step(),
            normalization: NormalizationName::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SummationName {
    #[default]
    Incoherent,
    Coherent,
}

fn default_tx_power() -> f64 {
    10.0
}
fn default_nf() -> f64 {
    7.0
}
fn default_subband() -> f64 {
    100e6
}
fn default_reflections() -> usize {
    2
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SlsSpec {
    pub map: DataRef,
    #[serde(default = "default_tx_power")]
    pub tx_power_dbm: f64,
    #[serde(default)]
    pub rx_gain_dbi: f64,
    #[serde(default = "default_nf")]
    pub noise_figure_db: f64,
    #[serde(default = "default_subband")]
    pub subband_hz: f64,
    #[serde(default = "default_reflections")]
    pub max_reflections: usize,
    #[serde(default)]
    pub summation: SummationName,
    /// Overrides the map's rx grid step.
    #[serde(default)]
    pub grid_step_m: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

fn default_dir() -> PathBuf {
    PathBuf::from("out")
}
fn default_formats() -> Vec<Format> {
    vec![Format::Csv, Format::Json]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default = "default_dir")]
    pub dir: PathBuf,
    #[serde(default = "default_formats")]
    pub formats: Vec<Format>,
}

impl Default for OutputSpec {
    fn default() -> Self {
        Self {
            dir: default_dir(),
            formats: default_formats(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema_version: String,
    pub name: String,
    pub fc_ghz: f64,
    pub band_ghz: Vec<f64>,
    #[serde(default = "both_models")]
    pub eval_models: Vec<EvalModelName>,
    pub antennas: Vec<AntennaSpec>,
    #[serde(default)]
    pub aods_deg: Vec<f64>,
    #[serde(default)]
    pub beams: Option<BeamSetSpec>,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub sls: Option<SlsSpec>,
    #[serde(default)]
    pub outputs: OutputSpec,
}

/// A validated scenario with every external reference resolved.
#[derive(Debug, Clone)]
pub struct LoadedScenario {
    pub spec: Scenario,
    /// Directory that relative file references resolve against.
    pub base_dir: PathBuf,
    pub materials: Vec<Option<DispersiveMaterial>>,
    pub map: Option<IndoorMap>,
    /// Bytes of the scenario file as read (empty for in-memory scenarios).
    pub source: Vec<u8>,
}

fn finite_positive(v: f64) -> bool {
    v.is_finite() && v > 0.0
}

fn check(cond: bool, path: impl Into<String>, msg: impl Into<String>) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(SimError::config(path, msg))
    }
}

fn check_element(e: &ElementSpec, path: &str) -> Result<()> {
    if let ElementSpec::Patch {
        g0_dbi,
        q,
        edge_rolloff_db,
    } = *e
    {
        check(g0_dbi.is_finite(), format!("{path}/g0_dbi"), "must be finite")?;
        check(q.is_finite() && q >= 0.0, format!("{path}/q"), "must be non-negative")?;
        check(
            edge_rolloff_db.is_finite() && edge_rolloff_db >= 0.0,
            format!("{path}/edge_rolloff_db"),
            "must be non-negative",
        )?;
    }
    Ok(())
}

impl Scenario {
    /// AoDs of the beam set: explicit `aods_deg`, else the `beams` sweep.
    pub fn aods(&self) -> Vec<f64> {
        if !self.aods_deg.is_empty() {
            self.aods_deg.clone()
        } else {
            self.beams.as_ref().map(BeamSetSpec::aods).unwrap_or_default()
        }
    }

    pub fn eval_models(&self) -> Vec<EvalModel> {
        self.eval_models.iter().map(|&e| e.into()).collect()
    }

    pub fn pattern_options(&self) -> Result<PatternOptions> {
        Ok(PatternOptions {
            grid: ThetaGrid::full(self.grid.step_deg).map_err(|e| SimError::config("/grid/step_deg", e.to_string()))?,
            normalization: match self.grid.normalization {
                NormalizationName::CenterReference => Normalization::CenterReference,
                NormalizationName::PerFrequency => Normalization::PerFrequency,
            },
        })
    }

    /// Band frequencies other than `fc`: the columns of squint tables.
    pub fn report_band(&self) -> Vec<f64> {
        self.band_ghz
            .iter()
            .copied()
            .filter(|&f| (f - self.fc_ghz).abs() > 1e-9)
            .collect()
    }

    pub fn array_config(&self, n_elements: usize, spacing_lambda: f64, element: &ElementSpec) -> Result<ArrayConfig> {
        Ok(ArrayConfig::new(
            n_elements,
            spacing_lambda,
            self.fc_ghz,
            self.band_ghz.clone(),
            element.to_model(),
        )?)
    }

    pub fn link_budget(&self) -> Option<LinkBudget> {
        self.sls.as_ref().map(|s| LinkBudget {
            tx_power_dbm: s.tx_power_dbm,
            rx_gain_dbi: s.rx_gain_dbi,
            noise: NoiseModel {
                noise_figure_db: s.noise_figure_db,
                subband_hz: s.subband_hz,
            },
            summation: match s.summation {
                SummationName::Incoherent => Summation::Incoherent,
                SummationName::Coherent => Summation::Coherent,
            },
            max_reflections: s.max_reflections,
        })
    }

    /// Structural checks that need no file access.
    pub fn validate(&self) -> Result<()> {
        check(
            self.schema_version == SCHEMA_VERSION,
            "/schema_version",
            format!("expected \"{SCHEMA_VERSION}\", got \"{}\"", self.schema_version),
        )?;
        check(!self.name.is_empty(), "/name", "must not be empty")?;
        check(finite_positive(self.fc_ghz), "/fc_ghz", "must be positive")?;
        check(!self.band_ghz.is_empty(), "/band_ghz", "must not be empty")?;
        for (i, &f) in self.band_ghz.iter().enumerate() {
            check(finite_positive(f), format!("/band_ghz/{i}"), "must be positive")?;
        }
        check(
            self.band_ghz.windows(2).all(|w| w[1] > w[0]),
            "/band_ghz",
            "must be strictly increasing",
        )?;
        let (lo, hi) = (self.band_ghz[0], *self.band_ghz.last().unwrap());
        check(
            self.fc_ghz >= lo && self.fc_ghz <= hi,
            "/band_ghz",
            format!("band {lo}-{hi} GHz does not contain fc {}", self.fc_ghz),
        )?;
        check(!self.eval_models.is_empty(), "/eval_models", "must not be empty")?;
        for (i, e) in self.eval_models.iter().enumerate() {
            check(
                !self.eval_models[..i].contains(e),
                format!("/eval_models/{i}"),
                "duplicate evaluation model",
            )?;
        }
        check(!self.antennas.is_empty(), "/antennas", "must not be empty")?;
        for (i, a) in self.antennas.iter().enumerate() {
            let p = format!("/antennas/{i}");
            check(!a.label().is_empty(), format!("{p}/label"), "must not be empty")?;
            check(
                !self.antennas[..i].iter().any(|b| b.label() == a.label()),
                format!("{p}/label"),
                format!("duplicate label \"{}\"", a.label()),
            )?;
            match a {
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
                } => {
                    check(*n_elements >= 1, format!("{p}/n_elements"), "must be at least 1")?;
                    check(
                        finite_positive(*spacing_lambda),
                        format!("{p}/spacing_lambda"),
                        "must be positive",
                    )?;
                    check_element(element, &format!("{p}/element"))?;
                }
                AntennaSpec::Lens {
                    diameter_lambda,
                    focal_over_diameter,
                    feeds,
                    element,
                    ray_count,
                    rim_thickness_lambda,
                    aperture_step_lambda,
                    scan_limit_focal,
                    ..
                } => {
                    check(
                        finite_positive(*diameter_lambda),
                        format!("{p}/diameter_lambda"),
                        "must be positive",
                    )?;
                    check(
                        finite_positive(*focal_over_diameter),
                        format!("{p}/focal_over_diameter"),
                        "must be positive",
                    )?;
                    check(*ray_count >= 3, format!("{p}/ray_count"), "must be at least 3")?;
                    check(
                        rim_thickness_lambda.is_finite() && *rim_thickness_lambda >= 0.0,
                        format!("{p}/rim_thickness_lambda"),
                        "must be non-negative",
                    )?;
                    check(
                        finite_positive(*aperture_step_lambda),
                        format!("{p}/aperture_step_lambda"),
                        "must be positive",
                    )?;
                    check(
                        finite_positive(*scan_limit_focal),
                        format!("{p}/scan_limit_focal"),
                        "must be positive",
                    )?;
                    if let FeedSpec::Pitch {
                        count,
                        pitch_mm,
                        active_feed,
                    } = feeds
                    {
                        check(*count >= 1, format!("{p}/feeds/count"), "must be at least 1")?;
                        check(
                            finite_positive(*pitch_mm),
                            format!("{p}/feeds/pitch_mm"),
                            "must be positive",
                        )?;
                        if let Some(k) = active_feed {
                            check(*k < *count, format!("{p}/feeds/active_feed"), "out of range")?;
                        }
                    }
                    check_element(element, &format!("{p}/element"))?;
                }
            }
        }
        for (i, &a) in self.aods_deg.iter().enumerate() {
            check(
                a.is_finite() && a.abs() < 90.0,
                format!("/aods_deg/{i}"),
                "must lie in (-90, 90)",
            )?;
        }
        if let Some(b) = &self.beams {
            check(b.count >= 1, "/beams/count", "must be at least 1")?;
            check(
                b.span_deg.iter().all(|a| a.is_finite() && a.abs() < 90.0) && b.span_deg[1] >= b.span_deg[0],
                "/beams/span_deg",
                "must be an ascending pair inside (-90, 90)",
            )?;
        }
        let grid_ok = finite_positive(self.grid.step_deg) && ThetaGrid::full(self.grid.step_deg).is_ok();
        check(
            grid_ok,
            "/grid/step_deg",
            "must divide 180 into a whole number of steps",
        )?;
        if let Some(s) = &self.sls {
            check(s.tx_power_dbm.is_finite(), "/sls/tx_power_dbm", "must be finite")?;
            check(s.rx_gain_dbi.is_finite(), "/sls/rx_gain_dbi", "must be finite")?;
            check(s.noise_figure_db.is_finite(), "/sls/noise_figure_db", "must be finite")?;
            check(finite_positive(s.subband_hz), "/sls/subband_hz", "must be positive")?;
            check(
                s.max_reflections <= squint_core::raytrace::MAX_REFLECTION_ORDER,
                "/sls/max_reflections",
                format!("must be at most {}", squint_core::raytrace::MAX_REFLECTION_ORDER),
            )?;
            if let Some(step) = s.grid_step_m {
                check(finite_positive(step), "/sls/grid_step_m", "must be positive")?;
            }
        }
        check(
            !self.outputs.formats.is_empty(),
            "/outputs/formats",
            "must name at least one format",
        )?;
        Ok(())
    }

    /// Validates and resolves material and map references.
    pub fn load(self, base_dir: &Path, source: Vec<u8>) -> Result<LoadedScenario> {
        self.validate()?;
        let mut materials = Vec::with_capacity(self.antennas.len());
        for (i, a) in self.antennas.iter().enumerate() {
            materials.push(match a {
                AntennaSpec::Lens { material, .. } => Some(resolve_material(
                    material,
                    base_dir,
                    &format!("/antennas/{i}/material"),
                    &self,
                )?),
                _ => None,
            });
        }
        let map = match &self.sls {
            Some(s) => Some(resolve_map(&s.map, base_dir, s.grid_step_m)?),
            None => None,
        };
        Ok(LoadedScenario {
            spec: self,
            base_dir: base_dir.to_owned(),
            materials,
            map,
            source,
        })
    }
}

fn resolve_material(r: &DataRef, base: &Path, path: &str, sc: &Scenario) -> Result<DispersiveMaterial> {
    let file: MaterialFile = match r {
        DataRef::Builtin(name) => data::builtin_material_file(name).ok_or_else(|| {
            let known: Vec<_> = data::builtin_material_names().collect();
            SimError::config(
                path,
                format!("unknown material \"{name}\" (bundled: {})", known.join(", ")),
            )
        })?,
        DataRef::File { file } => {
            let p = base.join(file);
            data::parse_json(&data::read_text(&p)?, &p.display().to_string())?
        }
    };
    let m = file.to_material().map_err(|e| SimError::config(path, e.to_string()))?;
    let (lo, hi) = m.band_ghz();
    let (blo, bhi) = (sc.band_ghz[0], *sc.band_ghz.last().unwrap());
    check(
        blo >= lo && bhi <= hi,
        path,
        format!("material band {lo}-{hi} GHz does not cover scenario band {blo}-{bhi} GHz"),
    )?;
    Ok(m)
}

fn resolve_map(r: &DataRef, base: &Path, step: Option<f64>) -> Result<IndoorMap> {
    let file: MapFile = match r {
        DataRef::Builtin(name) => data::builtin_map_file(name).ok_or_else(|| {
            let known: Vec<_> = data::builtin_map_names().collect();
            SimError::config(
                "/sls/map",
                format!("unknown map \"{name}\" (bundled: {})", known.join(", ")),
            )
        })?,
        DataRef::File { file } => {
            let p = base.join(file);
            data::parse_json(&data::read_text(&p)?, &p.display().to_string())?
        }
    };
    let mut map = file.to_map().map_err(|e| SimError::config("/sls/map", e.to_string()))?;
    if let Some(s) = step {
        map.rx_region.step_m = s;
    }
    check(!map.rx_region.points().is_empty(), "/sls/map", "rx grid is empty")?;
    Ok(map)
}

impl LoadedScenario {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = data::read_text(path)?;
        let spec: Scenario = data::parse_json(&text, "")?;
        let base = path.parent().map(Path::to_owned).unwrap_or_default();
        spec.load(&base, text.into_bytes())
    }

    pub fn from_str(text: &str, base_dir: &Path) -> Result<Self> {
        let spec: Scenario = data::parse_json(text, "")?;
        spec.load(base_dir, text.as_bytes().to_vec())
    }

    pub fn rx_points(&self) -> Vec<Point> {
        self.map.as_ref().map(|m| m.rx_region.points()).unwrap_or_default()
    }
}
