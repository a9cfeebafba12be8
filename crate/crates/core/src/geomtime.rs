//! Geometry of station placement and light-travel timing.
//!
//! Distance bounds are the only physical leverage the verification stations
//! have: a response cannot return faster than light. This module provides
//! the round-trip-time arithmetic, the betweenness test used by collinear
//! deployments, and the placement-soundness criterion — the claimed
//! location must lie strictly inside the convex hull of the stations,
//! otherwise some other point is at least as close to every station and
//! timing can never distinguish the two.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Slack used by strict geometric predicates, in meters. Points closer than
/// this to a hull boundary are treated as on it.
pub const PLACEMENT_MARGIN: f64 = 1e-9;

/// Coplanarity tolerance for station configurations, in meters.
const PLANE_TOL: f64 = 1e-6;

/// A point in 3-dimensional space, meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Location {
    pub x: f64,
    #[serde(default)]
    pub y: f64,
    #[serde(default)]
    pub z: f64,
}

impl Location {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Location { x, y, z }
    }

    /// A point on the x-axis, for collinear deployments.
    pub fn on_line(x: f64) -> Self {
        Location { x, y: 0.0, z: 0.0 }
    }

    /// A point in the z = 0 plane.
    pub fn in_plane(x: f64, y: f64) -> Self {
        Location { x, y, z: 0.0 }
    }

    pub fn distance_to(&self, other: &Location) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        let dz = self.z - other.z;
        (dx * dx + dy * dy + dz * dz).sqrt()
    }

    fn sub(&self, other: &Location) -> [f64; 3] {
        [self.x - other.x, self.y - other.y, self.z - other.z]
    }
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn norm(a: [f64; 3]) -> f64 {
    dot(a, a).sqrt()
}

fn scale(a: [f64; 3], s: f64) -> [f64; 3] {
    [a[0] * s, a[1] * s, a[2] * s]
}

fn sub3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

/// A verification station: a named site that emits classical reveals and
/// receives timed responses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Station {
    pub name: String,
    pub location: Location,
}

impl Station {
    pub fn new(name: impl Into<String>, location: Location) -> Self {
        Station {
            name: name.into(),
            location,
        }
    }
}

/// One-way light travel time between two points, seconds.
pub fn light_time(a: &Location, b: &Location) -> f64 {
    a.distance_to(b) / SPEED_OF_LIGHT
}

/// Round trip light travel time from a station to a point and back, seconds.
pub fn expected_rtt(station: &Location, point: &Location) -> f64 {
    2.0 * light_time(station, point)
}

/// Whether `v` lies on the segment between `a` and `b`, judged in time:
/// the detour `τ(a,v) + τ(v,b) - τ(a,b)` must not exceed `tol` seconds.
pub fn check_betweenness(a: &Location, b: &Location, v: &Location, tol: f64) -> bool {
    let detour = light_time(a, v) + light_time(v, b) - light_time(a, b);
    detour.abs() <= tol
}

/// Expected and observed round trip for one station.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingRecord {
    pub station: String,
    /// Light-limited round trip to the claimed location, seconds.
    pub expected_rtt: f64,
    /// Round trip actually measured, seconds.
    pub observed_rtt: f64,
}

impl TimingRecord {
    /// Observed minus expected round trip, seconds. Positive means late.
    pub fn excess(&self) -> f64 {
        self.observed_rtt - self.expected_rtt
    }
}

/// Outcome of checking a set of timing records against a tolerance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum TimingVerdict {
    Pass,
    /// One message per offending station.
    Fail(Vec<String>),
}

impl TimingVerdict {
    pub fn passed(&self) -> bool {
        matches!(self, TimingVerdict::Pass)
    }
}

/// Check every record's round trip against the claimed location.
///
/// A record fails when it is late by more than `tol` seconds — or early,
/// which no honest device can be; an early response means the interaction
/// did not happen at the claimed location.
pub fn verify_timing(records: &[TimingRecord], tol: f64) -> Result<TimingVerdict> {
    if records.is_empty() {
        return Err(Error::EmptyInput("timing records"));
    }
    if !tol.is_finite() || tol < 0.0 {
        return Err(Error::InvalidConfig(format!(
            "timing tolerance must be finite and non-negative, got {tol}"
        )));
    }
    let mut failures = Vec::new();
    for rec in records {
        if !rec.observed_rtt.is_finite() || !rec.expected_rtt.is_finite() {
            failures.push(format!("station {}: non-finite round trip", rec.station));
            continue;
        }
        let excess = rec.excess();
        if excess.abs() > tol {
            let kind = if excess > 0.0 { "late" } else { "early" };
            failures.push(format!(
                "station {}: response {} by {:.3e} s (tolerance {:.3e} s)",
                rec.station, kind, excess.abs(), tol
            ));
        }
    }
    if failures.is_empty() {
        Ok(TimingVerdict::Pass)
    } else {
        Ok(TimingVerdict::Fail(failures))
    }
}

/// Whether timing can pin a device to `claimed` at all: the point must lie
/// strictly inside the convex hull of the stations (for collinear stations,
/// strictly between the extreme pair, on their line).
///
/// If `claimed` is outside or on the hull boundary, some other point is at
/// least as close to every station, so a device there could answer every
/// challenge at least as fast and the protocol cannot tell them apart. The
/// converse placement admits no such point.
///
/// Station sets of any size are accepted as long as they are coplanar;
/// non-coplanar configurations return [`Error::InvalidConfig`].
pub fn placement_sound(stations: &[Station], claimed: &Location) -> Result<bool> {
    if stations.len() < 2 {
        return Err(Error::InvalidConfig(format!(
            "placement analysis needs at least 2 stations, got {}",
            stations.len()
        )));
    }
    let pts: Vec<Location> = stations.iter().map(|s| s.location).collect();
    let p0 = pts[0];

    // The hull's affine span: find the point farthest from p0.
    let (far_idx, far_dist) = pts
        .iter()
        .enumerate()
        .map(|(i, p)| (i, p.distance_to(&p0)))
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .expect("station list is non-empty");
    if far_dist <= PLANE_TOL {
        // All stations coincide; nothing can be pinned down.
        return Ok(false);
    }
    let u = scale(pts[far_idx].sub(&p0), 1.0 / far_dist);

    // Farthest point from the p0 + t·u line decides line versus plane.
    let off_line = |p: &Location| -> f64 {
        let d = p.sub(&p0);
        norm(sub3(d, scale(u, dot(d, u))))
    };
    let (plane_idx, plane_dist) = pts
        .iter()
        .enumerate()
        .map(|(i, p)| (i, off_line(p)))
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .expect("station list is non-empty");

    if plane_dist <= PLANE_TOL {
        // Collinear stations: hull is a segment along u.
        if off_line(claimed) > PLACEMENT_MARGIN {
            return Ok(false);
        }
        let ts: Vec<f64> = pts.iter().map(|p| dot(p.sub(&p0), u)).collect();
        let t_min = ts.iter().cloned().fold(f64::INFINITY, f64::min);
        let t_max = ts.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let t = dot(claimed.sub(&p0), u);
        return Ok(t > t_min + PLACEMENT_MARGIN && t < t_max - PLACEMENT_MARGIN);
    }

    // Planar stations: build an orthonormal in-plane basis (u, w).
    let d_plane = pts[plane_idx].sub(&p0);
    let w_raw = sub3(d_plane, scale(u, dot(d_plane, u)));
    let w = scale(w_raw, 1.0 / norm(w_raw));
    let n = cross(u, w);

    for (s, p) in stations.iter().zip(&pts) {
        if dot(p.sub(&p0), n).abs() > PLANE_TOL {
            return Err(Error::InvalidConfig(format!(
                "station {} is out of the plane of the others; \
                 placement analysis supports coplanar stations only",
                s.name
            )));
        }
    }
    if dot(claimed.sub(&p0), n).abs() > PLACEMENT_MARGIN {
        return Ok(false);
    }

    let to_2d = |p: &Location| -> (f64, f64) {
        let d = p.sub(&p0);
        (dot(d, u), dot(d, w))
    };
    let pts2: Vec<(f64, f64)> = pts.iter().map(to_2d).collect();
    let hull = convex_hull_2d(&pts2);
    let (vx, vy) = to_2d(claimed);

    // Strictly inside a counterclockwise hull: positive perpendicular
    // distance from the line of every edge.
    for i in 0..hull.len() {
        let (ax, ay) = hull[i];
        let (bx, by) = hull[(i + 1) % hull.len()];
        let (ex, ey) = (bx - ax, by - ay);
        let edge_len = (ex * ex + ey * ey).sqrt();
        let cross2 = ex * (vy - ay) - ey * (vx - ax);
        if cross2 / edge_len <= PLACEMENT_MARGIN {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Monotone-chain convex hull, counterclockwise, no repeated endpoint.
/// Expects a genuinely 2-dimensional point set (guaranteed by the caller).
fn convex_hull_2d(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    pts.dedup();

    let turn = |o: (f64, f64), a: (f64, f64), b: (f64, f64)| -> f64 {
        (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
    };

    let mut lower: Vec<(f64, f64)> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && turn(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<(f64, f64)> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && turn(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}
