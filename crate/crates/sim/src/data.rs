//! File formats for materials and maps, and the bundled data set.

use std::path::Path;

use serde::{Deserialize, Serialize};
use squint_core::materials::{DispersiveMaterial, MaterialModel, MaterialSample, Resonance};
use squint_core::raytrace::{IndoorMap, Point, RxRegion, Segment, Transmitter, Wall};

use crate::error::{Result, SimError};

const MATERIALS: &[(&str, &str)] = &[
    ("teflon_a", include_str!("../data/materials/teflon_a.json")),
    ("polyethylene", include_str!("../data/materials/polyethylene.json")),
    ("polycarbonate", include_str!("../data/materials/polycarbonate.json")),
    ("boron_nitride", include_str!("../data/materials/boron_nitride.json")),
    ("mgo", include_str!("../data/materials/mgo.json")),
    ("ideal_constant", include_str!("../data/materials/ideal_constant.json")),
];

const MAPS: &[(&str, &str)] = &[
    ("example_office", include_str!("../data/maps/example_office.json")),
    ("free_space_link", include_str!("../data/maps/free_space_link.json")),
    ("small_room", include_str!("../data/maps/small_room.json")),
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleFile {
    pub f_ghz: f64,
    pub eps_r: f64,
    pub tan_delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResonanceFile {
    pub delta_eps: f64,
    pub f0_ghz: f64,
    pub gamma_ghz: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelFile {
    Constant {
        eps_r: f64,
        tan_delta: f64,
    },
    Tabulated {
        samples: Vec<SampleFile>,
    },
    DrudeLorentz {
        eps_inf: f64,
        resonances: Vec<ResonanceFile>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialFile {
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub band_ghz: [f64; 2],
    pub model: ModelFile,
}

impl MaterialFile {
    pub fn to_material(&self) -> squint_core::Result<DispersiveMaterial> {
        let model = match &self.model {
            ModelFile::Constant { eps_r, tan_delta } => MaterialModel::Constant {
                eps_r: *eps_r,
                tan_delta: *tan_delta,
            },
            ModelFile::Tabulated { samples } => MaterialModel::Tabulated(
                samples
                    .iter()
                    .map(|s| MaterialSample {
                        f_ghz: s.f_ghz,
                        eps_r: s.eps_r,
                        tan_delta: s.tan_delta,
                    })
                    .collect(),
            ),
            ModelFile::DrudeLorentz { eps_inf, resonances } => MaterialModel::DrudeLorentz {
                eps_inf: *eps_inf,
                resonances: resonances
                    .iter()
                    .map(|r| Resonance {
                        delta_eps: r.delta_eps,
                        f0_ghz: r.f0_ghz,
                        gamma_ghz: r.gamma_ghz,
                    })
                    .collect(),
            },
        };
        DispersiveMaterial::new(self.name.clone(), (self.band_ghz[0], self.band_ghz[1]), model)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentFile {
    pub x1: f64,
    pub y1: f64,
    pub x2: f64,
    pub y2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WallFile {
    pub x1: f64,
    pub y1: f64,
    pub x2: f64,
    pub y2: f64,
    pub loss_db: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TxFile {
    pub x: f64,
    pub y: f64,
    pub azimuth_deg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RxRegionFile {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
    pub step_m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapFile {
    pub walls: Vec<WallFile>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub obstacles: Vec<SegmentFile>,
    pub tx: TxFile,
    pub rx_region: RxRegionFile,
}

impl MapFile {
    pub fn to_map(&self) -> squint_core::Result<IndoorMap> {
        let seg = |x1, y1, x2, y2| Segment::new(Point::new(x1, y1), Point::new(x2, y2));
        let map = IndoorMap {
            walls: self
                .walls
                .iter()
                .map(|w| Wall {
                    segment: seg(w.x1, w.y1, w.x2, w.y2),
                    reflection_loss_db: w.loss_db,
                })
                .collect(),
            tx: Transmitter {
                position: Point::new(self.tx.x, self.tx.y),
                azimuth_deg: self.tx.azimuth_deg,
            },
            rx_region: RxRegion {
                x0: self.rx_region.x0,
                y0: self.rx_region.y0,
                x1: self.rx_region.x1,
                y1: self.rx_region.y1,
                step_m: self.rx_region.step_m,
            },
            obstacles: self.obstacles.iter().map(|o| seg(o.x1, o.y1, o.x2, o.y2)).collect(),
        };
        map.validate()?;
        Ok(map)
    }
}

/// Parses JSON, reporting failures with the JSON pointer of the bad field.
pub fn parse_json<T: serde::de::DeserializeOwned>(text: &str, origin: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        use serde_path_to_error::Segment;
        let pointer: String = e
            .path()
            .iter()
            .map(|s| match s {
                Segment::Seq { index } => format!("/{index}"),
                Segment::Map { key } => format!("/{key}"),
                Segment::Enum { variant } => format!("/{variant}"),
                Segment::Unknown => "/?".to_string(),
            })
            .collect();
        SimError::config(format!("{origin}{pointer}"), e.into_inner().to_string())
    })
}

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| SimError::Read {
        path: path.to_owned(),
        source,
    })
}

pub fn builtin_material_names() -> impl Iterator<Item = &'static str> {
    MATERIALS.iter().map(|(n, _)| *n)
}

pub fn builtin_map_names() -> impl Iterator<Item = &'static str> {
    MAPS.iter().map(|(n, _)| *n)
}

pub fn builtin_material_file(name: &str) -> Option<MaterialFile> {
    MATERIALS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(n, text)| parse_json(text, n).expect("bundled material parses"))
}

pub fn builtin_material(name: &str) -> Option<DispersiveMaterial> {
    builtin_material_file(name).map(|f| f.to_material().expect("bundled material is valid"))
}

pub fn builtin_map_file(name: &str) -> Option<MapFile> {
    MAPS.iter()
        .find(|(n, _)| *n == name)
        .map(|(n, text)| parse_json(text, n).expect("bundled map parses"))
}

pub fn builtin_map(name: &str) -> Option<IndoorMap> {
    builtin_map_file(name).map(|f| f.to_map().expect("bundled map is valid"))
}

/// Raw bytes of every bundled data file, in a fixed order, for hashing.
pub fn bundled_bytes() -> impl Iterator<Item = (&'static str, &'static [u8])> {
    MATERIALS.iter().chain(MAPS).map(|(n, t)| (*n, t.as_bytes()))
}

/// One line of the material listing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialSummary {
    pub material: MaterialFile,
    /// `(max − min) / mean` of `Re ε` over the listing band.
    pub eps_spread: f64,
    pub eps_at_fc: f64,
    pub tan_delta_at_fc: f64,
}

/// Listing band and centre frequency for [`describe_materials`].
pub const LISTING_BAND_GHZ: (f64, f64) = (27.0, 30.0);
pub const LISTING_FC_GHZ: f64 = 28.5;

pub fn describe_materials() -> Vec<MaterialSummary> {
    MATERIALS
        .iter()
        .map(|(name, _)| {
            let file = builtin_material_file(name).unwrap();
            let m = file.to_material().unwrap();
            let (lo, hi) = LISTING_BAND_GHZ;
            MaterialSummary {
                eps_spread: m.eps_spread(lo, hi, 61).unwrap(),
                eps_at_fc: m.permittivity(LISTING_FC_GHZ).unwrap().re,
                tan_delta_at_fc: m.loss_tangent(LISTING_FC_GHZ).unwrap(),
                material: file,
            }
        })
        .collect()
}

pub fn format_material_table(rows: &[MaterialSummary]) -> String {
    let mut out = format!(
        "{:<16} {:<14} {:>13} {:>10} {:>10} {:>12}\n",
        "material", "model", "band_ghz", "eps@fc", "tand@fc", "spread_pct"
    );
    for r in rows {
        let kind = match r.material.model {
            ModelFile::Constant { .. } => "constant",
            ModelFile::Tabulated { .. } => "tabulated",
            ModelFile::DrudeLorentz { .. } => "drude_lorentz",
        };
        out.push_str(&format!(
            "{:<16} {:<14} {:>13} {:>10.4} {:>10.2e} {:>12.4}\n",
            r.material.name,
            kind,
            format!("{}-{}", r.material.band_ghz[0], r.material.band_ghz[1]),
            r.eps_at_fc,
            r.tan_delta_at_fc,
            100.0 * r.eps_spread
        ));
    }
    out
}
