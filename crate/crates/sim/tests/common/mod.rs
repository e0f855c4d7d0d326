//! Brute-force specular path enumerator used as an oracle for the
//! image-method tracer.
//!
//! Every wall sequence without immediate repeats is tried. The reflection
//! points are found by minimising total path length over the wall
//! parameters (Fermat's principle); the length is jointly convex in those
//! parameters, so nested golden-section search finds the global minimum. A
//! minimum strictly inside every wall with both neighbours on the reflecting
//! side and no blocked leg is a specular path.

#![allow(dead_code)]

use squint_core::raytrace::{IndoorMap, Point};

const EDGE: f64 = 1e-7;
const TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct OraclePath {
    pub walls: Vec<usize>,
    pub length: f64,
}

fn lerp(a: Point, b: Point, t: f64) -> Point {
    Point::new(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y))
}

fn cross(o: Point, a: Point, b: Point) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

/// Golden-section minimum of a convex function on `[0, 1]`.
fn golden(f: &dyn Fn(f64) -> f64) -> (f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (0.0, 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > 1e-13 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    let t = 0.5 * (a + b);
    (t, f(t))
}

/// Minimises the polyline length over one parameter per wall in `seq`.
fn shortest(map: &IndoorMap, rx: Point, seq: &[usize]) -> Vec<f64> {
    let tx = map.tx.position;
    let wall = |i: usize, t: f64| {
        let s = map.walls[seq[i]].segment;
        lerp(s.a, s.b, t)
    };
    match seq.len() {
        0 => vec![],
        1 => {
            let (t, _) = golden(&|t| {
                let p = wall(0, t);
                tx.dist(p) + p.dist(rx)
            });
            vec![t]
        }
        2 => {
            let inner = |t1: f64| {
                let p1 = wall(0, t1);
                golden(&|t2| {
                    let p2 = wall(1, t2);
                    tx.dist(p1) + p1.dist(p2) + p2.dist(rx)
                })
            };
            let (t1, _) = golden(&|t1| inner(t1).1);
            vec![t1, inner(t1).0]
        }
        n => panic!("oracle supports at most 2 reflections, got {n}"),
    }
}

fn crosses(p: Point, q: Point, a: Point, b: Point) -> bool {
    let (d1, d2) = (cross(a, b, p), cross(a, b, q));
    let (d3, d4) = (cross(p, q, a), cross(p, q, b));
    let scale = p.dist(q) * a.dist(b);
    let strict = |x: f64, y: f64| (x > TOL * scale && y < -TOL * scale) || (x < -TOL * scale && y > TOL * scale);
    let touch = |x: f64, y: f64| strict(x, y) || x.abs() <= TOL * scale || y.abs() <= TOL * scale;
    strict(d1, d2) && touch(d3, d4)
}

fn visible(map: &IndoorMap, p: Point, q: Point) -> bool {
    map.walls
        .iter()
        .map(|w| w.segment)
        .chain(map.obstacles.iter().copied())
        .all(|s| !crosses(p, q, s.a, s.b))
}

/// All specular paths with up to `max_reflections` (≤ 2) bounces.
pub fn brute_force_paths(map: &IndoorMap, rx: Point, max_reflections: usize) -> Vec<OraclePath> {
    let n = map.walls.len();
    let mut seqs: Vec<Vec<usize>> = vec![vec![]];
    let mut frontier = seqs.clone();
    for _ in 0..max_reflections {
        frontier = frontier
            .iter()
            .flat_map(|s| {
                (0..n).filter(move |w| s.last() != Some(w)).map(move |w| {
                    let mut v = s.clone();
                    v.push(w);
                    v
                })
            })
            .collect();
        seqs.extend(frontier.iter().cloned());
    }
    let tx = map.tx.position;
    let mut out = Vec::new();
    'seq: for seq in seqs {
        let ts = shortest(map, rx, &seq);
        let mut pts = vec![tx];
        for (i, &t) in ts.iter().enumerate() {
            if !(EDGE..=1.0 - EDGE).contains(&t) {
                continue 'seq;
            }
            let s = map.walls[seq[i]].segment;
            pts.push(lerp(s.a, s.b, t));
        }
        pts.push(rx);
        for (i, &w) in seq.iter().enumerate() {
            let s = map.walls[w].segment;
            let (before, after) = (cross(s.a, s.b, pts[i]), cross(s.a, s.b, pts[i + 2]));
            if before * after <= 0.0 {
                continue 'seq;
            }
        }
        if pts
            .windows(2)
            .any(|w| w[0].dist(w[1]) < TOL || !visible(map, w[0], w[1]))
        {
            continue;
        }
        let length = pts.windows(2).map(|w| w[0].dist(w[1])).sum();
        out.push(OraclePath { walls: seq, length });
    }
    out.sort_by(|a, b| a.length.total_cmp(&b.length).then_with(|| a.walls.cmp(&b.walls)));
    out
}

/// Compares the tracer with the oracle at `rx`; `Err` describes the first
/// mismatch.
pub fn compare_with_tracer(map: &IndoorMap, rx: Point, max_reflections: usize) -> Result<usize, String> {
    let traced = squint_core::raytrace::trace_paths(map, rx, max_reflections).map_err(|e| e.to_string())?;
    let oracle = brute_force_paths(map, rx, max_reflections);
    let mut a: Vec<(Vec<usize>, f64)> = traced.iter().map(|p| (p.walls.clone(), p.length)).collect();
    let mut b: Vec<(Vec<usize>, f64)> = oracle.iter().map(|p| (p.walls.clone(), p.length)).collect();
    a.sort_by(|x, y| x.0.cmp(&y.0));
    b.sort_by(|x, y| x.0.cmp(&y.0));
    let seqs = |v: &[(Vec<usize>, f64)]| v.iter().map(|p| p.0.clone()).collect::<Vec<_>>();
    if seqs(&a) != seqs(&b) {
        return Err(format!("rx {rx:?}: tracer {:?} oracle {:?}", seqs(&a), seqs(&b)));
    }
    for (x, y) in a.iter().zip(&b) {
        if (x.1 - y.1).abs() > 1e-9 {
            return Err(format!("rx {rx:?} walls {:?}: tracer {} oracle {}", x.0, x.1, y.1));
        }
    }
    Ok(a.len())
}
