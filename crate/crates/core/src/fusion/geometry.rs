//! Planar segment and polyline primitives.

use serde::{Deserialize, Serialize};

/// A point in metres in an arbitrary planar frame. Serialised as `[x, y]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl From<[f64; 2]> for Point {
    fn from([x, y]: [f64; 2]) -> Self {
        Point { x, y }
    }
}

impl From<Point> for [f64; 2] {
    fn from(p: Point) -> Self {
        [p.x, p.y]
    }
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn distance(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn translated(self, dx: f64, dy: f64) -> Point {
        Point::new(self.x + dx, self.y + dy)
    }

    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }

    fn lerp(self, o: Point, t: f64) -> Point {
        Point::new(self.x + (o.x - self.x) * t, self.y + (o.y - self.y) * t)
    }

    fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }
}

fn cross(a: Point, b: Point) -> f64 {
    a.x * b.y - a.y * b.x
}

fn dot(a: Point, b: Point) -> f64 {
    a.x * b.x + a.y * b.y
}

const PARAM_EPS: f64 = 1e-9;
const PARALLEL_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SegmentHit {
    None,
    Point(Point),
    /// Collinear segments sharing a stretch of positive length.
    Overlap(Point, Point),
}

/// Intersection of segments `p0p1` and `q0q1`, endpoints included.
pub fn segment_intersection(p0: Point, p1: Point, q0: Point, q1: Point) -> SegmentHit {
    let r = p1.sub(p0);
    let s = q1.sub(q0);
    let qp = q0.sub(p0);
    let denom = cross(r, s);
    let (rn, sn) = (r.norm(), s.norm());
    if denom.abs() <= PARALLEL_EPS * rn * sn {
        // Parallel; overlapping only if collinear.
        if cross(qp, r).abs() > PARALLEL_EPS * rn * qp.norm().max(sn) {
            return SegmentHit::None;
        }
        let rr = dot(r, r);
        let t0 = dot(qp, r) / rr;
        let t1 = dot(q1.sub(p0), r) / rr;
        let (lo, hi) = (t0.min(t1).max(0.0), t0.max(t1).min(1.0));
        if hi < lo - PARAM_EPS {
            return SegmentHit::None;
        }
        if (hi - lo) * rn <= PARAM_EPS * rn.max(1.0) {
            return SegmentHit::Point(p0.lerp(p1, lo.clamp(0.0, 1.0)));
        }
        return SegmentHit::Overlap(p0.lerp(p1, lo), p0.lerp(p1, hi));
    }
    let t = cross(qp, s) / denom;
    let u = cross(qp, r) / denom;
    if (-PARAM_EPS..=1.0 + PARAM_EPS).contains(&t) && (-PARAM_EPS..=1.0 + PARAM_EPS).contains(&u) {
        SegmentHit::Point(p0.lerp(p1, t.clamp(0.0, 1.0)))
    } else {
        SegmentHit::None
    }
}

pub fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let ab = b.sub(a);
    let len2 = dot(ab, ab);
    if len2 == 0.0 {
        return p.distance(a);
    }
    let t = (dot(p.sub(a), ab) / len2).clamp(0.0, 1.0);
    p.distance(a.lerp(b, t))
}

pub fn polyline_length(line: &[Point]) -> f64 {
    line.windows(2).map(|w| w[0].distance(w[1])).sum()
}

/// `n >= 2` points evenly spaced by arc length, endpoints included.
pub fn resample(line: &[Point], n: usize) -> Vec<Point> {
    assert!(n >= 2 && line.len() >= 2);
    let total = polyline_length(line);
    let mut out = Vec::with_capacity(n);
    let mut seg = 0;
    let mut seg_start = 0.0;
    for k in 0..n {
        let target = total * k as f64 / (n - 1) as f64;
        while seg < line.len() - 2 && seg_start + line[seg].distance(line[seg + 1]) < target {
            seg_start += line[seg].distance(line[seg + 1]);
            seg += 1;
        }
        let len = line[seg].distance(line[seg + 1]);
        let t = if len > 0.0 { ((target - seg_start) / len).clamp(0.0, 1.0) } else { 0.0 };
        out.push(line[seg].lerp(line[seg + 1], t));
    }
    *out.last_mut().expect("n >= 2") = *line.last().expect("len >= 2");
    out
}

/// Discrete Fréchet distance between two point sequences.
pub fn discrete_frechet(a: &[Point], b: &[Point]) -> f64 {
    let (n, m) = (a.len(), b.len());
    let mut prev = vec![0.0f64; m];
    let mut cur = vec![0.0f64; m];
    for i in 0..n {
        for j in 0..m {
            let d = a[i].distance(b[j]);
            cur[j] = match (i, j) {
                (0, 0) => d,
                (0, _) => cur[j - 1].max(d),
                (_, 0) => prev[0].max(d),
                _ => prev[j].min(prev[j - 1]).min(cur[j - 1]).max(d),
            };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[m - 1]
}

/// Proximity of two polylines: discrete Fréchet distance after resampling
/// both to the same number of arc-length-spaced points, taking the better of
/// the two digitising directions. `spacing` bounds the resampling step.
pub fn polyline_proximity(a: &[Point], b: &[Point], spacing: f64) -> f64 {
    const MAX_SAMPLES: usize = 400;
    let longest = polyline_length(a).max(polyline_length(b));
    let n = ((longest / spacing.max(f64::MIN_POSITIVE)).ceil() as usize + 1).clamp(2, MAX_SAMPLES);
    let ra = resample(a, n);
    let rb = resample(b, n);
    let forward = discrete_frechet(&ra, &rb);
    let mut rev = rb;
    rev.reverse();
    forward.min(discrete_frechet(&ra, &rev))
}
