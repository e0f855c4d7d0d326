//! 2D floor-plan propagation by the image method, link budget and
//! spectral-efficiency statistics over a receiver grid.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Float;

use crate::beampattern::BeamPattern;
use crate::{wavenumber, Error, Result, SPEED_OF_LIGHT};

/// Received power reported when no path reaches the receiver, dBm.
pub const NO_PATH_DBM: f64 = -999.0;

/// Deepest reflection order the tracer accepts.
pub const MAX_REFLECTION_ORDER: usize = 3;

const EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dist(self, o: Point) -> f64 {
        (self.x - o.x).hypot(self.y - o.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub a: Point,
    pub b: Point,
}

impl Segment {
    pub const fn new(a: Point, b: Point) -> Self {
        Self { a, b }
    }

    pub fn length(&self) -> f64 {
        self.a.dist(self.b)
    }

    /// Mirror image of `p` across the segment's supporting line.
    pub fn mirror(&self, p: Point) -> Point {
        let (dx, dy) = (self.b.x - self.a.x, self.b.y - self.a.y);
        let l2 = dx * dx + dy * dy;
        let t = ((p.x - self.a.x) * dx + (p.y - self.a.y) * dy) / l2;
        let (fx, fy) = (self.a.x + t * dx, self.a.y + t * dy);
        Point::new(2.0 * fx - p.x, 2.0 * fy - p.y)
    }

    /// Signed side of `p` (cross product sign), scaled by segment length.
    pub fn side(&self, p: Point) -> f64 {
        ((self.b.x - self.a.x) * (p.y - self.a.y) - (self.b.y - self.a.y) * (p.x - self.a.x)) / self.length()
    }

    /// Parameters `(t, u)` where `p + t(q − p)` meets `a + u(b − a)`, or
    /// `None` for parallel lines.
    fn intersect(&self, p: Point, q: Point) -> Option<(f64, f64)> {
        let (rx, ry) = (q.x - p.x, q.y - p.y);
        let (sx, sy) = (self.b.x - self.a.x, self.b.y - self.a.y);
        let den = rx * sy - ry * sx;
        if den.abs() < 1e-15 * (rx.hypot(ry) * sx.hypot(sy)) {
            return None;
        }
        let (wx, wy) = (self.a.x - p.x, self.a.y - p.y);
        Some(((wx * sy - wy * sx) / den, (wx * ry - wy * rx) / den))
    }

    /// True when the open segment `p→q` crosses this segment.
    pub fn blocks(&self, p: Point, q: Point) -> bool {
        let span = p.dist(q);
        match self.intersect(p, q) {
            Some((t, u)) => {
                let tol = EPS / span.max(EPS);
                t > tol && t < 1.0 - tol && (-EPS..=1.0 + EPS).contains(&u)
            }
            None => false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wall {
    pub segment: Segment,
    pub reflection_loss_db: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transmitter {
    pub position: Point,
    /// Boresight of the antenna's 0° direction, degrees from +x.
    pub azimuth_deg: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RxRegion {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
    pub step_m: f64,
}

impl RxRegion {
    fn axis(lo: f64, hi: f64, step: f64) -> usize {
        ((hi - lo) / step + 1e-9).floor() as usize + 1
    }

    /// Grid points, row-major with `x` varying fastest.
    pub fn points(&self) -> Vec<Point> {
        let nx = Self::axis(self.x0, self.x1, self.step_m);
        let ny = Self::axis(self.y0, self.y1, self.step_m);
        let mut out = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                out.push(Point::new(
                    self.x0 + i as f64 * self.step_m,
                    self.y0 + j as f64 * self.step_m,
                ));
            }
        }
        out
    }

    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.x0 - EPS && p.x <= self.x1 + EPS && p.y >= self.y0 - EPS && p.y <= self.y1 + EPS
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IndoorMap {
    pub walls: Vec<Wall>,
    pub tx: Transmitter,
    pub rx_region: RxRegion,
    /// Segments that block but do not reflect.
    pub obstacles: Vec<Segment>,
}

impl IndoorMap {
    pub fn validate(&self) -> Result<()> {
        for (i, w) in self.walls.iter().enumerate() {
            if !(w.segment.length() > 0.0) {
                return Err(Error::InvalidMap(format!("wall {i} has zero length")));
            }
            if !(w.reflection_loss_db >= 0.0) {
                return Err(Error::InvalidMap(format!("wall {i} has negative reflection loss")));
            }
            if w.segment.side(self.tx.position).abs() < EPS
                && Segment::new(w.segment.a, self.tx.position).length()
                    + Segment::new(self.tx.position, w.segment.b).length()
                    - w.segment.length()
                    < EPS
            {
                return Err(Error::InvalidMap(format!("transmitter lies on wall {i}")));
            }
        }
        for (i, o) in self.obstacles.iter().enumerate() {
            if !(o.length() > 0.0) {
                return Err(Error::InvalidMap(format!("obstacle {i} has zero length")));
            }
        }
        let r = &self.rx_region;
        if !(r.step_m > 0.0) {
            return Err(Error::InvalidMap("rx grid step must be positive".into()));
        }
        if !(r.x1 >= r.x0 && r.y1 >= r.y0) {
            return Err(Error::InvalidMap("rx region corners are reversed".into()));
        }
        Ok(())
    }

    fn blocked(&self, p: Point, q: Point) -> bool {
        self.walls.iter().any(|w| w.segment.blocks(p, q)) || self.obstacles.iter().any(|o| o.blocks(p, q))
    }

    /// Same map with the transmitter moved to `p`.
    pub fn with_tx_at(&self, p: Point) -> Self {
        Self {
            tx: Transmitter { position: p, ..self.tx },
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropagationPath {
    /// Transmitter, reflection points in order, receiver.
    pub vertices: Vec<Point>,
    /// Wall index of each reflection.
    pub walls: Vec<usize>,
    pub length: f64,
    pub reflections: usize,
    /// Launch direction relative to the transmitter azimuth, in `(−180, 180]`.
    pub departure_angle_deg: f64,
    pub loss_db: f64,
}

fn wrap_deg(a: f64) -> f64 {
    let mut x = a % 360.0;
    if x > 180.0 {
        x -= 360.0;
    } else if x <= -180.0 {
        x += 360.0;
    }
    x
}

/// LoS and specular paths up to `max_reflections` bounces, sorted by length.
pub fn trace_paths(map: &IndoorMap, rx: Point, max_reflections: usize) -> Result<Vec<PropagationPath>> {
    if max_reflections > MAX_REFLECTION_ORDER {
        return Err(Error::InvalidMap(format!(
            "max_reflections {max_reflections} exceeds {MAX_REFLECTION_ORDER}"
        )));
    }
    let tx = map.tx.position;
    let mut paths = Vec::new();
    let mut seq = Vec::with_capacity(max_reflections);
    let mut images = vec![tx];
    visit(map, rx, max_reflections, &mut seq, &mut images, &mut paths);
    paths.sort_by(|a: &PropagationPath, b| a.length.total_cmp(&b.length).then_with(|| a.walls.cmp(&b.walls)));
    Ok(paths)
}

fn visit(
    map: &IndoorMap,
    rx: Point,
    depth_left: usize,
    seq: &mut Vec<usize>,
    images: &mut Vec<Point>,
    out: &mut Vec<PropagationPath>,
) {
    if let Some(p) = realize(map, rx, seq, images) {
        out.push(p);
    }
    if depth_left == 0 {
        return;
    }
    for w in 0..map.walls.len() {
        if seq.last() == Some(&w) {
            continue;
        }
        let img = map.walls[w].segment.mirror(*images.last().unwrap());
        seq.push(w);
        images.push(img);
        visit(map, rx, depth_left - 1, seq, images, out);
        seq.pop();
        images.pop();
    }
}

/// Back-propagates from `rx` through the image chain; `None` if any
/// reflection point misses its wall or a leg is blocked.
fn realize(map: &IndoorMap, rx: Point, seq: &[usize], images: &[Point]) -> Option<PropagationPath> {
    let k = seq.len();
    let mut pts = vec![rx; k + 2];
    let mut target = rx;
    for i in (0..k).rev() {
        let wall = &map.walls[seq[i]].segment;
        let (t, u) = wall.intersect(images[i + 1], target)?;
        if !(t > EPS && t < 1.0 - EPS && u > -EPS && u < 1.0 + EPS) {
            return None;
        }
        let p = Point::new(
            images[i + 1].x + t * (target.x - images[i + 1].x),
            images[i + 1].y + t * (target.y - images[i + 1].y),
        );
        pts[i + 1] = p;
        target = p;
    }
    pts[0] = images[0];
    if pts.windows(2).any(|w| w[0].dist(w[1]) < EPS || map.blocked(w[0], w[1])) {
        return None;
    }
    let length = pts.windows(2).map(|w| w[0].dist(w[1])).sum();
    let dep = (pts[1].y - pts[0].y).atan2(pts[1].x - pts[0].x).to_degrees();
    Some(PropagationPath {
        departure_angle_deg: wrap_deg(dep - map.tx.azimuth_deg),
        loss_db: seq.iter().map(|&w| map.walls[w].reflection_loss_db).sum(),
        reflections: k,
        walls: seq.to_vec(),
        vertices: pts,
        length,
    })
}

/// Free-space path loss, dB.
pub fn fspl_db(length_m: f64, f_ghz: f64) -> f64 {
    20.0 * (4.0 * core::f64::consts::PI * length_m * f_ghz * 1e9 / SPEED_OF_LIGHT).log10()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Summation {
    #[default]
    Incoherent,
    /// Phasor sum with `e^{−jkL}` per path and a sign flip per bounce.
    Coherent,
}

/// Power of a single path from a pattern row, linear mW.
fn path_power_mw(
    path: &PropagationPath,
    pattern: &BeamPattern,
    fi: usize,
    f_ghz: f64,
    tx_dbm: f64,
    rx_dbi: f64,
) -> f64 {
    let d = pattern.linear_at(fi, path.departure_angle_deg);
    let db = tx_dbm + 10.0 * d.log10() + rx_dbi - fspl_db(path.length, f_ghz) - path.loss_db;
    10.0.powf(db / 10.0)
}

/// Received power at `f_ghz` using row `row_f_ghz` of `pattern`, dBm.
///
/// Passing a `row_f_ghz` different from `f_ghz` evaluates the channel at
/// `f_ghz` with the antenna frozen at another frequency; the no-squint
/// baseline uses the centre-frequency row this way.
pub fn received_power_with_row(
    paths: &[PropagationPath],
    pattern: &BeamPattern,
    f_ghz: f64,
    row_f_ghz: f64,
    tx_power_dbm: f64,
    rx_gain_dbi: f64,
    summation: Summation,
) -> Result<f64> {
    let fi = pattern.freq_index(row_f_ghz)?;
    if paths.is_empty() {
        return Ok(NO_PATH_DBM);
    }
    let mw = match summation {
        Summation::Incoherent => paths
            .iter()
            .map(|p| path_power_mw(p, pattern, fi, f_ghz, tx_power_dbm, rx_gain_dbi))
            .sum::<f64>(),
        Summation::Coherent => {
            let k = wavenumber(f_ghz);
            paths
                .iter()
                .map(|p| {
                    let amp = path_power_mw(p, pattern, fi, f_ghz, tx_power_dbm, rx_gain_dbi).sqrt();
                    let sign = if p.reflections % 2 == 1 { -1.0 } else { 1.0 };
                    Complex64::from_polar(sign * amp, -k * p.length)
                })
                .sum::<Complex64>()
                .norm_sqr()
        }
    };
    if mw > 0.0 {
        Ok(10.0 * mw.log10())
    } else {
        Ok(NO_PATH_DBM)
    }
}

/// Received power at `f_ghz`, dBm; [`NO_PATH_DBM`] without paths.
pub fn received_power(
    paths: &[PropagationPath],
    pattern: &BeamPattern,
    f_ghz: f64,
    tx_power_dbm: f64,
    rx_gain_dbi: f64,
    summation: Summation,
) -> Result<f64> {
    received_power_with_row(paths, pattern, f_ghz, f_ghz, tx_power_dbm, rx_gain_dbi, summation)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    pub noise_figure_db: f64,
    pub subband_hz: f64,
}

impl Default for NoiseModel {
    fn default() -> Self {
        Self {
            noise_figure_db: 7.0,
            subband_hz: 100e6,
        }
    }
}

impl NoiseModel {
    /// `−174 dBm/Hz + 10 log10(B) + NF`.
    pub fn floor_dbm(&self) -> f64 {
        -174.0 + 10.0 * self.subband_hz.log10() + self.noise_figure_db
    }
}

/// Mean over subbands of `log2(1 + SNR)`, bit/s/Hz.
pub fn spectral_efficiency(powers_dbm: &[f64], noise: &NoiseModel) -> f64 {
    if powers_dbm.is_empty() {
        return 0.0;
    }
    let floor = noise.floor_dbm();
    powers_dbm
        .iter()
        .map(|&p| (1.0 + 10.0.powf((p - floor) / 10.0)).log2())
        .sum::<f64>()
        / powers_dbm.len() as f64
}

/// Index of the beam with the highest received power at `fc`; ties go to
/// the lower index.
pub fn best_beam_selection(
    beams: &[BeamPattern],
    paths: &[PropagationPath],
    tx_power_dbm: f64,
    rx_gain_dbi: f64,
    summation: Summation,
) -> Result<usize> {
    let first = beams
        .first()
        .ok_or_else(|| Error::InvalidConfig("beam set is empty".into()))?;
    let fc = first.fc_ghz();
    let mut best = (0usize, f64::NEG_INFINITY);
    for (i, b) in beams.iter().enumerate() {
        if b.fc_ghz() != fc {
            return Err(Error::InvalidConfig("beams disagree on the centre frequency".into()));
        }
        let p = received_power(paths, b, fc, tx_power_dbm, rx_gain_dbi, summation)?;
        if p > best.1 {
            best = (i, p);
        }
    }
    Ok(best.0)
}

/// Link-level settings shared by every receiver point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget {
    pub tx_power_dbm: f64,
    pub rx_gain_dbi: f64,
    pub noise: NoiseModel,
    pub summation: Summation,
    pub max_reflections: usize,
}

impl Default for LinkBudget {
    fn default() -> Self {
        Self {
            tx_power_dbm: 10.0,
            rx_gain_dbi: 0.0,
            noise: NoiseModel::default(),
            summation: Summation::Incoherent,
            max_reflections: 2,
        }
    }
}

/// Outcome at one receiver point.
#[derive(Debug, Clone, PartialEq)]
pub struct SlsPoint {
    pub rx: Point,
    pub beam: usize,
    /// Per band frequency, squinted beam.
    pub power_dbm: Vec<f64>,
    /// Per band frequency, centre-frequency row reused.
    pub baseline_dbm: Vec<f64>,
    pub se_squint: f64,
    pub se_baseline: f64,
}

fn dbm_to_mw(p: f64) -> f64 {
    if p <= NO_PATH_DBM {
        0.0
    } else {
        10.0.powf(p / 10.0)
    }
}

impl SlsPoint {
    /// Wideband received power relative to the baseline, percent.
    pub fn power_ratio_pct(&self) -> f64 {
        let s: f64 = self.power_dbm.iter().map(|&p| dbm_to_mw(p)).sum();
        let b: f64 = self.baseline_dbm.iter().map(|&p| dbm_to_mw(p)).sum();
        if b > 0.0 {
            100.0 * s / b
        } else {
            100.0
        }
    }

    /// SINR-equivalent SE loss, dB.
    pub fn degradation_db(&self) -> f64 {
        se_degradation_db(self.se_baseline, self.se_squint)
    }
}

/// Effective-SNR gap `10 log10((2^SE_b − 1)/(2^SE_s − 1))`; 0 when both
/// efficiencies are equal.
pub fn se_degradation_db(se_baseline: f64, se_squint: f64) -> f64 {
    if se_baseline == se_squint {
        return 0.0;
    }
    let b = se_baseline.exp2() - 1.0;
    let s = se_squint.exp2() - 1.0;
    if s <= 0.0 {
        return f64::INFINITY;
    }
    10.0 * (b / s).log10()
}

/// Evaluates one receiver point against a beam set.
pub fn sls_point(
    map: &IndoorMap,
    rx: Point,
    beams: &[BeamPattern],
    band_ghz: &[f64],
    budget: &LinkBudget,
) -> Result<SlsPoint> {
    let paths = trace_paths(map, rx, budget.max_reflections)?;
    let beam = best_beam_selection(beams, &paths, budget.tx_power_dbm, budget.rx_gain_dbi, budget.summation)?;
    let pat = &beams[beam];
    let fc = pat.fc_ghz();
    let mut power_dbm = Vec::with_capacity(band_ghz.len());
    let mut baseline_dbm = Vec::with_capacity(band_ghz.len());
    for &f in band_ghz {
        power_dbm.push(received_power(
            &paths,
            pat,
            f,
            budget.tx_power_dbm,
            budget.rx_gain_dbi,
            budget.summation,
        )?);
        baseline_dbm.push(received_power_with_row(
            &paths,
            pat,
            f,
            fc,
            budget.tx_power_dbm,
            budget.rx_gain_dbi,
            budget.summation,
        )?);
    }
    Ok(SlsPoint {
        rx,
        beam,
        se_squint: spectral_efficiency(&power_dbm, &budget.noise),
        se_baseline: spectral_efficiency(&baseline_dbm, &budget.noise),
        power_dbm,
        baseline_dbm,
    })
}

/// Per-point results over a receiver grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SlsResult {
    pub band_ghz: Vec<f64>,
    pub beam_count: usize,
    pub points: Vec<SlsPoint>,
}

/// Median of a sample; mean of the middle pair for even sizes.
pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Empirical CDF as sorted `(value, probability)` pairs.
pub fn empirical_cdf(values: &[f64]) -> Vec<(f64, f64)> {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len() as f64;
    v.into_iter()
        .enumerate()
        .map(|(i, x)| (x, (i + 1) as f64 / n))
        .collect()
}

impl SlsResult {
    pub fn se_squint(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.se_squint).collect()
    }

    pub fn se_baseline(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.se_baseline).collect()
    }

    pub fn median_se(&self) -> f64 {
        median(&self.se_squint())
    }

    pub fn median_se_baseline(&self) -> f64 {
        median(&self.se_baseline())
    }

    /// Degradation between the medians of the two SE distributions, dB.
    pub fn median_degradation_db(&self) -> f64 {
        se_degradation_db(self.median_se_baseline(), self.median_se())
    }

    pub fn max_point_degradation_db(&self) -> f64 {
        self.points.iter().map(|p| p.degradation_db().abs()).fold(0.0, f64::max)
    }

    /// Aggregate wideband power over all points relative to the baseline, percent.
    pub fn power_ratio_pct(&self) -> f64 {
        let (mut s, mut b) = (0.0, 0.0);
        for p in &self.points {
            s += p.power_dbm.iter().map(|&x| dbm_to_mw(x)).sum::<f64>();
            b += p.baseline_dbm.iter().map(|&x| dbm_to_mw(x)).sum::<f64>();
        }
        if b > 0.0 {
            100.0 * s / b
        } else {
            100.0
        }
    }

    /// Aggregate power at one band frequency relative to the baseline, percent.
    pub fn power_ratio_at(&self, f_ghz: f64) -> Result<f64> {
        let fi = self
            .band_ghz
            .iter()
            .position(|&f| (f - f_ghz).abs() < 1e-9)
            .ok_or(Error::MissingFrequency { f_ghz })?;
        let s: f64 = self.points.iter().map(|p| dbm_to_mw(p.power_dbm[fi])).sum();
        let b: f64 = self.points.iter().map(|p| dbm_to_mw(p.baseline_dbm[fi])).sum();
        Ok(if b > 0.0 { 100.0 * s / b } else { 100.0 })
    }
}

/// Serial run over an explicit list of receiver points.
pub fn sls_run(
    map: &IndoorMap,
    rx_points: &[Point],
    beams: &[BeamPattern],
    band_ghz: &[f64],
    budget: &LinkBudget,
) -> Result<SlsResult> {
    map.validate()?;
    if rx_points.is_empty() {
        return Err(Error::InvalidConfig("rx grid is empty".into()));
    }
    let points = rx_points
        .iter()
        .map(|&rx| sls_point(map, rx, beams, band_ghz, budget))
        .collect::<Result<Vec<_>>>()?;
    Ok(SlsResult {
        band_ghz: band_ghz.to_vec(),
        beam_count: beams.len(),
        points,
    })
}
