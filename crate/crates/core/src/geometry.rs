//! Planar geometry primitives shared by the loaders, the grid builder and the rasterizer.
//!
//! Coordinates are `[x, y]` pairs: degrees `[lon, lat]` for WGS84 inputs and meters for
//! local projected frames. Rings are stored open (the closing vertex is not repeated).

use serde::{Deserialize, Serialize};

pub type Coord = [f64; 2];

/// Mean Earth radius in meters (IUGG).
pub const EARTH_RADIUS_M: f64 = 6_371_008.8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polygon {
    pub exterior: Vec<Coord>,
    pub holes: Vec<Vec<Coord>>,
}

impl Polygon {
    pub fn new(exterior: Vec<Coord>, holes: Vec<Vec<Coord>>) -> Self {
        Polygon { exterior, holes }
    }

    pub fn rings(&self) -> impl Iterator<Item = &Vec<Coord>> {
        std::iter::once(&self.exterior).chain(self.holes.iter())
    }

    pub fn map_coords(&self, f: impl Fn(Coord) -> Coord + Copy) -> Polygon {
        Polygon {
            exterior: self.exterior.iter().map(|&c| f(c)).collect(),
            holes: self
                .holes
                .iter()
                .map(|h| h.iter().map(|&c| f(c)).collect())
                .collect(),
        }
    }

    /// Planar area with holes subtracted.
    pub fn area(&self) -> f64 {
        ring_signed_area(&self.exterior).abs()
            - self
                .holes
                .iter()
                .map(|h| ring_signed_area(h).abs())
                .sum::<f64>()
    }

    /// Even-odd containment over all rings.
    pub fn contains(&self, p: Coord) -> bool {
        self.rings().filter(|r| ring_crosses_ray(r, p)).count() % 2 == 1
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiPolygon(pub Vec<Polygon>);

impl MultiPolygon {
    pub fn area(&self) -> f64 {
        self.0.iter().map(Polygon::area).sum()
    }

    pub fn contains(&self, p: Coord) -> bool {
        self.0.iter().any(|poly| poly.contains(p))
    }

    pub fn map_coords(&self, f: impl Fn(Coord) -> Coord + Copy) -> MultiPolygon {
        MultiPolygon(self.0.iter().map(|p| p.map_coords(f)).collect())
    }

    pub fn vertices(&self) -> impl Iterator<Item = Coord> + '_ {
        self.0.iter().flat_map(|p| p.rings().flatten().copied())
    }

    pub fn bbox(&self) -> Option<BBox> {
        BBox::from_points(self.vertices())
    }

    /// Area-weighted centroid; falls back to the bounding-box center for degenerate input.
    pub fn centroid(&self) -> Coord {
        let (mut a, mut cx, mut cy) = (0.0, 0.0, 0.0);
        for poly in &self.0 {
            for (i, ring) in poly.rings().enumerate() {
                let (ra, rx, ry) = ring_moments(ring);
                // holes subtract regardless of their winding
                let sign = if (i == 0) == (ra >= 0.0) { 1.0 } else { -1.0 };
                a += sign * ra;
                cx += sign * rx;
                cy += sign * ry;
            }
        }
        if a.abs() > f64::EPSILON {
            [cx / (3.0 * a), cy / (3.0 * a)]
        } else {
            self.bbox().map(|b| b.center()).unwrap_or([0.0, 0.0])
        }
    }
}

/// Any vector geometry an exclusion layer may carry.
#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    Point(Coord),
    Line(Vec<Coord>),
    Area(Polygon),
}

impl Shape {
    pub fn map_coords(&self, f: impl Fn(Coord) -> Coord + Copy) -> Shape {
        match self {
            Shape::Point(c) => Shape::Point(f(*c)),
            Shape::Line(cs) => Shape::Line(cs.iter().map(|&c| f(c)).collect()),
            Shape::Area(p) => Shape::Area(p.map_coords(f)),
        }
    }

    pub fn bbox(&self) -> Option<BBox> {
        match self {
            Shape::Point(c) => BBox::from_points([*c]),
            Shape::Line(cs) => BBox::from_points(cs.iter().copied()),
            Shape::Area(p) => BBox::from_points(p.exterior.iter().copied()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BBox {
    pub min: Coord,
    pub max: Coord,
}

impl BBox {
    pub fn from_points(points: impl IntoIterator<Item = Coord>) -> Option<BBox> {
        let mut it = points.into_iter();
        let first = it.next()?;
        let mut b = BBox {
            min: first,
            max: first,
        };
        for p in it {
            b.min[0] = b.min[0].min(p[0]);
            b.min[1] = b.min[1].min(p[1]);
            b.max[0] = b.max[0].max(p[0]);
            b.max[1] = b.max[1].max(p[1]);
        }
        Some(b)
    }

    pub fn center(&self) -> Coord {
        [
            0.5 * (self.min[0] + self.max[0]),
            0.5 * (self.min[1] + self.max[1]),
        ]
    }

    pub fn expand(&self, d: f64) -> BBox {
        BBox {
            min: [self.min[0] - d, self.min[1] - d],
            max: [self.max[0] + d, self.max[1] + d],
        }
    }

    pub fn intersects(&self, other: &BBox) -> bool {
        self.min[0] <= other.max[0]
            && other.min[0] <= self.max[0]
            && self.min[1] <= other.max[1]
            && other.min[1] <= self.max[1]
    }
}

/// Equirectangular projection with cos(latitude) scaling, anchored at a fixed point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalProjection {
    pub anchor: Coord,
    m_per_deg_lon: f64,
    m_per_deg_lat: f64,
}

impl LocalProjection {
    pub fn new(anchor: Coord) -> Self {
        let m_per_deg_lat = EARTH_RADIUS_M * std::f64::consts::PI / 180.0;
        LocalProjection {
            anchor,
            m_per_deg_lon: m_per_deg_lat * anchor[1].to_radians().cos(),
            m_per_deg_lat,
        }
    }

    pub fn forward(&self, lonlat: Coord) -> Coord {
        [
            (lonlat[0] - self.anchor[0]) * self.m_per_deg_lon,
            (lonlat[1] - self.anchor[1]) * self.m_per_deg_lat,
        ]
    }

    pub fn inverse(&self, xy: Coord) -> Coord {
        [
            self.anchor[0] + xy[0] / self.m_per_deg_lon,
            self.anchor[1] + xy[1] / self.m_per_deg_lat,
        ]
    }
}

pub fn ring_signed_area(ring: &[Coord]) -> f64 {
    ring_moments(ring).0
}

/// (signed area, 3·A·cx, 3·A·cy) accumulated by the shoelace formula.
fn ring_moments(ring: &[Coord]) -> (f64, f64, f64) {
    let n = ring.len();
    let (mut a, mut cx, mut cy) = (0.0, 0.0, 0.0);
    for i in 0..n {
        let [x0, y0] = ring[i];
        let [x1, y1] = ring[(i + 1) % n];
        let cross = x0 * y1 - x1 * y0;
        a += cross;
        cx += (x0 + x1) * cross;
        cy += (y0 + y1) * cross;
    }
    (0.5 * a, cx / 2.0, cy / 2.0)
}

fn ring_crosses_ray(ring: &[Coord], p: Coord) -> bool {
    let n = ring.len();
    let mut inside = false;
    let mut j = n.wrapping_sub(1);
    for i in 0..n {
        let (a, b) = (ring[i], ring[j]);
        if (a[1] > p[1]) != (b[1] > p[1]) {
            let x = a[0] + (p[1] - a[1]) / (b[1] - a[1]) * (b[0] - a[0]);
            if p[0] < x {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

/// x-coordinates where the horizontal line `y` crosses polygon edges, sorted.
///
/// Uses the half-open rule `(a.y > y) != (b.y > y)`, identical to [`Polygon::contains`],
/// so scanline fills agree with point queries at cell centers.
pub fn scanline_crossings(rings: &[&[Coord]], y: f64, out: &mut Vec<f64>) {
    out.clear();
    for ring in rings {
        let n = ring.len();
        let mut j = n.wrapping_sub(1);
        for i in 0..n {
            let (a, b) = (ring[i], ring[j]);
            if (a[1] > y) != (b[1] > y) {
                out.push(a[0] + (y - a[1]) / (b[1] - a[1]) * (b[0] - a[0]));
            }
            j = i;
        }
    }
    out.sort_by(f64::total_cmp);
}

fn orient(a: Coord, b: Coord, c: Coord) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

fn on_segment(a: Coord, b: Coord, p: Coord) -> bool {
    p[0] >= a[0].min(b[0])
        && p[0] <= a[0].max(b[0])
        && p[1] >= a[1].min(b[1])
        && p[1] <= a[1].max(b[1])
}

pub fn segments_intersect(p1: Coord, p2: Coord, q1: Coord, q2: Coord) -> bool {
    let d1 = orient(q1, q2, p1);
    let d2 = orient(q1, q2, p2);
    let d3 = orient(p1, p2, q1);
    let d4 = orient(p1, p2, q2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    (d1 == 0.0 && on_segment(q1, q2, p1))
        || (d2 == 0.0 && on_segment(q1, q2, p2))
        || (d3 == 0.0 && on_segment(p1, p2, q1))
        || (d4 == 0.0 && on_segment(p1, p2, q2))
}

/// First pair of non-adjacent edges that intersect, if any.
pub fn ring_self_intersection(ring: &[Coord]) -> Option<(usize, usize)> {
    let n = ring.len();
    if n < 4 {
        return None;
    }
    for i in 0..n {
        let (a, b) = (ring[i], ring[(i + 1) % n]);
        for j in (i + 2)..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            let (c, d) = (ring[j], ring[(j + 1) % n]);
            if segments_intersect(a, b, c, d) {
                return Some((i, j));
            }
        }
    }
    None
}
