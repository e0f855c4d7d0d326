//! Result files. All numbers are written with fixed precision so reruns are
//! byte-identical; every file is recorded in a hashed manifest.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};
use squint_core::beampattern::BeamPattern;
use squint_core::metrics::SquintReport;

use crate::config::{Format, LoadedScenario};
use crate::data;
use crate::error::{Result, SimError};
use crate::run::{cdf_samples, GainCurve, SlsRun};

/// Collects output files and writes them in one place.
#[derive(Debug)]
pub struct OutputDir {
    dir: PathBuf,
    formats: Vec<Format>,
    written: BTreeMap<String, String>,
}

fn write_err(path: &Path) -> impl FnOnce(std::io::Error) -> SimError + '_ {
    move |source| SimError::Write {
        path: path.to_owned(),
        source,
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().fold(String::with_capacity(bytes.len() * 2), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex(&Sha256::digest(bytes))
}

fn csv_bytes(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| SimError::Write {
        path: PathBuf::from("<csv>"),
        source: std::io::Error::other(e),
    };
    w.write_record(header).map_err(err)?;
    for r in rows {
        w.write_record(&r).map_err(err)?;
    }
    w.into_inner().map_err(|e| SimError::Write {
        path: PathBuf::from("<csv>"),
        source: std::io::Error::other(e.to_string()),
    })
}

fn f(v: f64, digits: usize) -> String {
    format!("{v:.digits$}")
}

impl OutputDir {
    pub fn create(dir: &Path, formats: &[Format]) -> Result<Self> {
        std::fs::create_dir_all(dir).map_err(write_err(dir))?;
        Ok(Self {
            dir: dir.to_owned(),
            formats: formats.to_vec(),
            written: BTreeMap::new(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn wants(&self, f: Format) -> bool {
        self.formats.contains(&f)
    }

    pub fn files(&self) -> impl Iterator<Item = &str> {
        self.written.keys().map(String::as_str)
    }

    pub fn put(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        let path = self.dir.join(name);
        std::fs::write(&path, bytes).map_err(write_err(&path))?;
        self.written.insert(name.to_owned(), sha256_hex(bytes));
        Ok(())
    }

    fn put_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut bytes = serde_json::to_vec_pretty(value).expect("results serialize");
        bytes.push(b'\n');
        self.put(name, &bytes)
    }

    /// Long-form squint CSV per antenna plus Table-1-shaped AD and PD pivots.
    pub fn write_squint(&mut self, reports: &[SquintReport]) -> Result<()> {
        if !self.wants(Format::Csv) && !self.wants(Format::Json) {
            return Ok(());
        }
        let mut by_antenna: BTreeMap<&str, Vec<&SquintReport>> = BTreeMap::new();
        for r in reports {
            by_antenna.entry(&r.antenna).or_default().push(r);
        }
        for (label, reps) in &by_antenna {
            if self.wants(Format::Csv) {
                let rows = reps.iter().flat_map(|r| {
                    r.cells.iter().map(move |c| {
                        vec![
                            r.antenna.clone(),
                            r.eval_model.to_string(),
                            f(c.aod_deg, 2),
                            f(c.freq_ghz, 2),
                            f(c.ad_deg, 4),
                            f(c.pd_db, 4),
                            f(c.hpbw_deg, 4),
                            f(c.bf_gain_ratio_pct, 3),
                        ]
                    })
                });
                let bytes = csv_bytes(
                    &[
                        "antenna",
                        "eval_model",
                        "aod_deg",
                        "freq_ghz",
                        "ad_deg",
                        "pd_db",
                        "hpbw_deg",
                        "bf_gain_ratio_pct",
                    ],
                    rows,
                )?;
                self.put(&format!("squint_{label}.csv"), &bytes)?;
                for r in reps {
                    for (metric, pick) in [
                        ("ad", (|c: &squint_core::metrics::SquintCell| c.ad_deg) as fn(&_) -> f64),
                        ("pd", |c| c.pd_db),
                    ] {
                        let mut header = vec!["aod_deg".to_owned()];
                        header.extend(r.band_ghz.iter().map(|b| format!("{b:.1}GHz")));
                        let mut aods: Vec<f64> = Vec::new();
                        for c in &r.cells {
                            if !aods.contains(&c.aod_deg) {
                                aods.push(c.aod_deg);
                            }
                        }
                        let rows = aods.iter().map(|&a| {
                            let mut row = vec![f(a, 2)];
                            row.extend(r.band_ghz.iter().map(|&b| f(pick(r.cell(a, b).unwrap()), 2)));
                            row
                        });
                        let h: Vec<&str> = header.iter().map(String::as_str).collect();
                        let bytes = csv_bytes(&h, rows)?;
                        self.put(&format!("table_{label}_{}_{metric}.csv", r.eval_model), &bytes)?;
                    }
                }
            }
        }
        if self.wants(Format::Json) {
            let summary: Vec<_> = reports
                .iter()
                .map(|r| {
                    serde_json::json!({
                        "antenna": r.antenna,
                        "eval_model": r.eval_model.as_str(),
                        "max_abs_ad_deg": r.max_abs_ad(),
                        "max_abs_pd_db": r.max_abs_pd(),
                        "min_bf_gain_ratio_pct": r.min_ratio(),
                        "cells": r.cells.len(),
                    })
                })
                .collect();
            self.put_json("squint_summary.json", &summary)?;
        }
        Ok(())
    }

    pub fn write_gain_ratio(&mut self, curves: &[GainCurve]) -> Result<()> {
        if self.wants(Format::Csv) {
            let rows = curves.iter().flat_map(|c| {
                c.freqs_ghz.iter().zip(&c.ratio_pct).map(move |(&fr, &r)| {
                    vec![
                        c.antenna.clone(),
                        c.eval_model.to_string(),
                        c.line_style().to_owned(),
                        f(c.aod_deg, 2),
                        f(fr, 2),
                        f(r, 3),
                    ]
                })
            });
            let bytes = csv_bytes(
                &[
                    "antenna",
                    "eval_model",
                    "line_style",
                    "aod_deg",
                    "freq_ghz",
                    "bf_gain_ratio_pct",
                ],
                rows,
            )?;
            self.put("gain_ratio.csv", &bytes)?;
        }
        if self.wants(Format::Svg) {
            let aod = curves.iter().map(|c| c.aod_deg).fold(f64::NEG_INFINITY, f64::max);
            let series: Vec<Series> = curves
                .iter()
                .filter(|c| c.aod_deg == aod)
                .map(|c| Series {
                    name: format!("{} {}", c.antenna, c.eval_model),
                    dashed: c.line_style() == "dashed",
                    points: c.freqs_ghz.iter().copied().zip(c.ratio_pct.iter().copied()).collect(),
                })
                .collect();
            let svg = line_chart(
                &format!("BF gain ratio, AoD {aod:.0} deg"),
                "frequency (GHz)",
                "ratio (%)",
                &series,
            );
            self.put("gain_ratio.svg", svg.as_bytes())?;
        }
        Ok(())
    }

    pub fn write_sls(&mut self, scenario: &str, runs: &[SlsRun]) -> Result<()> {
        for run in runs {
            if self.wants(Format::Csv) {
                let rows = run.result.points.iter().map(|p| {
                    vec![
                        f(p.rx.x, 3),
                        f(p.rx.y, 3),
                        p.beam.to_string(),
                        f(p.se_squint, 6),
                        f(p.se_baseline, 6),
                        f(p.power_ratio_pct(), 4),
                    ]
                });
                let bytes = csv_bytes(&["x", "y", "beam", "se_squint", "se_baseline", "power_ratio_pct"], rows)?;
                self.put(&format!("sls_{}_{}.csv", run.antenna, run.eval_model), &bytes)?;
            }
        }
        if self.wants(Format::Json) {
            let entries: Vec<_> = runs.iter().map(sls_entry).collect();
            self.put_json(
                "sls_summary.json",
                &serde_json::json!({ "scenario": scenario, "entries": entries }),
            )?;
        }
        if self.wants(Format::Svg) {
            let mut series = Vec::new();
            for r in runs {
                series.push(Series {
                    name: format!("{} {}", r.antenna, r.eval_model),
                    dashed: true,
                    points: cdf_samples(&r.result.se_squint(), 101),
                });
            }
            if let Some(r) = runs.first() {
                series.push(Series {
                    name: format!("{} no squint", r.antenna),
                    dashed: false,
                    points: cdf_samples(&r.result.se_baseline(), 101),
                });
            }
            let svg = line_chart("Spectral efficiency CDF", "SE (bit/s/Hz)", "CDF", &series);
            self.put("sls_cdf.svg", svg.as_bytes())?;
        }
        Ok(())
    }

    /// `{mechanism}_{aod}deg_{em}.csv`: one dBi column per frequency.
    pub fn write_pattern(&mut self, pattern: &BeamPattern) -> Result<String> {
        let s = pattern.steering();
        let name = format!(
            "{}_{}deg_{}.csv",
            s.mechanism.as_str(),
            s.aod_design_deg,
            pattern.eval_model()
        );
        let mut header = vec!["theta_deg".to_owned()];
        header.extend(pattern.freqs_ghz().iter().map(|f| format!("d_{f:.2}ghz_dbi")));
        let grid = pattern.grid();
        let rows = (0..grid.len).map(|i| {
            let mut row = vec![f(grid.angle(i), 4)];
            row.extend(pattern.rows().iter().map(|r| f(r[i], 6)));
            row
        });
        let h: Vec<&str> = header.iter().map(String::as_str).collect();
        let bytes = csv_bytes(&h, rows)?;
        self.put(&name, &bytes)?;
        Ok(name)
    }

    /// Records config, bundled data and code version hashes plus every
    /// written file.
    pub fn write_manifest(&mut self, sc: &LoadedScenario, command: &str) -> Result<()> {
        let mut data_hash = Sha256::new();
        for (name, bytes) in data::bundled_bytes() {
            data_hash.update(name.as_bytes());
            data_hash.update(bytes);
        }
        let manifest = serde_json::json!({
            "schema_version": crate::config::SCHEMA_VERSION,
            "command": command,
            "scenario": sc.spec.name,
            "code_version": env!("CARGO_PKG_VERSION"),
            "config_sha256": sha256_hex(&sc.source),
            "bundled_data_sha256": hex(&data_hash.finalize()),
            "files": self.written,
        });
        let mut bytes = serde_json::to_vec_pretty(&manifest).expect("manifest serializes");
        bytes.push(b'\n');
        let path = self.dir.join("manifest.json");
        std::fs::write(&path, bytes).map_err(write_err(&path))
    }
}

fn sls_entry(r: &SlsRun) -> serde_json::Value {
    let res = &r.result;
    let per_freq: Vec<_> = res
        .band_ghz
        .iter()
        .map(|&fr| serde_json::json!({ "freq_ghz": fr, "pct": res.power_ratio_at(fr).unwrap() }))
        .collect();
    let cdf = |v: Vec<f64>| -> Vec<[f64; 2]> { cdf_samples(&v, 101).into_iter().map(|(x, p)| [x, p]).collect() };
    let mean_deg = res.points.iter().map(|p| p.degradation_db()).sum::<f64>() / res.points.len() as f64;
    serde_json::json!({
        "antenna": r.antenna,
        "kind": r.kind,
        "eval_model": r.eval_model.as_str(),
        "points": res.points.len(),
        "beam_count": res.beam_count,
        "median_se": res.median_se(),
        "median_se_baseline": res.median_se_baseline(),
        "median_degradation_db": res.median_degradation_db(),
        "mean_point_degradation_db": mean_deg,
        "max_point_degradation_db": res.max_point_degradation_db(),
        "power_ratio_pct": res.power_ratio_pct(),
        "power_ratio_by_freq": per_freq,
        "cdf_se_squint": cdf(res.se_squint()),
        "cdf_se_baseline": cdf(res.se_baseline()),
    })
}

struct Series {
    name: String,
    dashed: bool,
    points: Vec<(f64, f64)>,
}

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#7f7f7f",
];

/// Minimal self-contained SVG line chart.
fn line_chart(title: &str, xlabel: &str, ylabel: &str, series: &[Series]) -> String {
    let (w, h, ml, mr, mt, mb) = (720.0, 480.0, 70.0, 190.0, 40.0, 50.0);
    let all = series.iter().flat_map(|s| s.points.iter());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in all {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if x1 <= x0 {
        x1 = x0 + 1.0;
    }
    if y1 <= y0 {
        y1 = y0 + 1.0;
    }
    let pw = w - ml - mr;
    let ph = h - mt - mb;
    let sx = |x: f64| ml + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| mt + ph - (y - y0) / (y1 - y0) * ph;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{title}</text>"#,
        ml + pw / 2.0
    );
    let _ = writeln!(
        s,
        r#"<rect x="{ml}" y="{mt}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    for k in 0..=4 {
        let t = k as f64 / 4.0;
        let (xv, yv) = (x0 + t * (x1 - x0), y0 + t * (y1 - y0));
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{xv:.2}</text>"#,
            sx(xv),
            mt + ph + 16.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{yv:.2}</text>"#,
            ml - 6.0,
            sy(yv) + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{xlabel}</text>"#,
        ml + pw / 2.0,
        h - 10.0
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{:.1}" text-anchor="middle" transform="rotate(-90 16 {:.1})">{ylabel}</text>"#,
        mt + ph / 2.0,
        mt + ph / 2.0
    );
    for (k, se) in series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let pts: Vec<String> = se
            .points
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        let dash = if se.dashed { r#" stroke-dasharray="6 4""# } else { "" };
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5"{dash} points="{}"/>"#,
            pts.join(" ")
        );
        let ly = mt + 14.0 + 18.0 * k as f64;
        let _ = writeln!(
            s,
            r#"<line x1="{:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{color}" stroke-width="1.5"{dash}/>"#,
            w - mr + 10.0,
            w - mr + 40.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}">{}</text>"#,
            w - mr + 46.0,
            ly + 4.0,
            se.name
        );
    }
    s.push_str("</svg>\n");
    s
}
