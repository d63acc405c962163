//! Brute-force reference implementations used to check the fast paths.

#![allow(dead_code)]

use saltcav_core::geometry::{Coord, Shape};
use saltcav_core::LocalGrid;

/// Hydrogen Z from the NIST standardized correlation, written out term by term.
#[allow(clippy::approx_constant)]
pub fn lemmon_z(p_mpa: f64, t_k: f64) -> f64 {
    let terms: [(f64, f64, f64); 9] = [
        (0.058_884_60, 1.325, 1.0),
        (-0.061_361_11, 1.87, 1.0),
        (-0.002_650_473, 2.5, 2.0),
        (0.002_731_125, 2.8, 2.0),
        (0.001_802_374, 2.938, 2.42),
        (-0.001_150_707, 3.14, 2.63),
        (0.958_852_8e-4, 3.37, 3.0),
        (-0.110_904_0e-6, 3.75, 4.0),
        (0.126_440_3e-9, 4.0, 5.0),
    ];
    let tau = 100.0 / t_k;
    let mut z = 1.0;
    for (a, b, c) in terms {
        z += a * tau.powf(b) * p_mpa.powf(c);
    }
    z
}

/// Row-major cell flags, `cells[r * width + c]`.
pub type Cells = Vec<bool>;

fn cell_box(grid: &LocalGrid, r: usize, c: usize) -> (f64, f64, f64, f64) {
    let s = grid.cell_size_m;
    (
        grid.x0 + c as f64 * s,
        grid.y0 + r as f64 * s,
        grid.x0 + (c + 1) as f64 * s,
        grid.y0 + (r + 1) as f64 * s,
    )
}

fn center(grid: &LocalGrid, r: usize, c: usize) -> Coord {
    let s = grid.cell_size_m;
    [
        grid.x0 + (c as f64 + 0.5) * s,
        grid.y0 + (r as f64 + 0.5) * s,
    ]
}

/// Whether segment ab meets the axis-aligned box, by the separating-axis test.
pub fn segment_hits_box(a: Coord, b: Coord, bx: (f64, f64, f64, f64)) -> bool {
    let (x0, y0, x1, y1) = bx;
    if a[0].max(b[0]) < x0 || a[0].min(b[0]) > x1 || a[1].max(b[1]) < y0 || a[1].min(b[1]) > y1 {
        return false;
    }
    let side = |p: Coord| (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]);
    let s = [side([x0, y0]), side([x1, y0]), side([x1, y1]), side([x0, y1])];
    !(s.iter().all(|&v| v > 0.0) || s.iter().all(|&v| v < 0.0))
}

/// Even-odd point in polygon over all rings.
pub fn inside_rings(rings: &[&[Coord]], p: Coord) -> bool {
    let mut inside = false;
    for ring in rings {
        let n = ring.len();
        for i in 0..n {
            let (a, b) = (ring[i], ring[(i + 1) % n]);
            if (a[1] > p[1]) != (b[1] > p[1]) {
                let x = a[0] + (p[1] - a[1]) / (b[1] - a[1]) * (b[0] - a[0]);
                if p[0] < x {
                    inside = !inside;
                }
            }
        }
    }
    inside
}

/// Footprint of projected shapes: the cell holding a point, every cell a line passes
/// through, every cell whose center is inside a polygon.
pub fn footprint(grid: &LocalGrid, shapes: &[Shape]) -> Cells {
    let mut out = vec![false; grid.width * grid.height];
    for r in 0..grid.height {
        for c in 0..grid.width {
            let bx = cell_box(grid, r, c);
            let hit = shapes.iter().any(|s| match s {
                Shape::Point(p) => p[0] >= bx.0 && p[0] < bx.2 && p[1] >= bx.1 && p[1] < bx.3,
                Shape::Line(pts) => pts.windows(2).any(|w| segment_hits_box(w[0], w[1], bx)),
                Shape::Area(poly) => {
                    let rings: Vec<&[Coord]> = poly.rings().map(|r| r.as_slice()).collect();
                    inside_rings(&rings, center(grid, r, c))
                }
            });
            out[r * grid.width + c] = hit;
        }
    }
    out
}

/// Cells whose center lies within `radius_m` of some seed cell center.
pub fn dilate(grid: &LocalGrid, seeds: &Cells, radius_m: f64) -> Cells {
    let w = grid.width;
    let seed_cells: Vec<(i64, i64)> = seeds
        .iter()
        .enumerate()
        .filter(|(_, &s)| s)
        .map(|(i, _)| ((i / w) as i64, (i % w) as i64))
        .collect();
    let s2 = grid.cell_size_m * grid.cell_size_m;
    let r2 = radius_m * radius_m;
    (0..seeds.len())
        .map(|i| {
            let (r, c) = ((i / w) as i64, (i % w) as i64);
            seed_cells
                .iter()
                .any(|&(sr, sc)| (((r - sr).pow(2) + (c - sc).pow(2)) as f64) * s2 <= r2)
        })
        .collect()
}

pub fn buffered(grid: &LocalGrid, shapes: &[Shape], buffer_m: f64) -> Cells {
    dilate(grid, &footprint(grid, shapes), buffer_m)
}

pub fn and_not(a: &Cells, b: &Cells) -> Cells {
    a.iter().zip(b).map(|(x, y)| *x && !*y).collect()
}

pub fn or(a: &Cells, b: &Cells) -> Cells {
    a.iter().zip(b).map(|(x, y)| *x || *y).collect()
}

pub fn and(a: &Cells, b: &Cells) -> Cells {
    a.iter().zip(b).map(|(x, y)| *x && *y).collect()
}

pub fn count(a: &Cells) -> usize {
    a.iter().filter(|&&v| v).count()
}

/// Number of lattice nodes `k · pitch` in `[0, extent)`.
pub fn lattice_nodes(extent_m: f64, pitch_m: f64) -> usize {
    let mut k = 0usize;
    while (k as f64) * pitch_m < extent_m {
        k += 1;
    }
    k
}

/// Reference capacity in GWh, evaluated from scratch with the bilinear lookup done by hand.
pub fn capacity_gwh(volume_m3: f64, phi: f64, top_m: f64, height_m: f64, z: impl Fn(f64, f64) -> f64) -> f64 {
    let p_lith = 2550.0 * 9.81 * top_m;
    let p_max = 0.8 * p_lith;
    let p_min = 0.3 * p_max;
    let t = 288.15 + 0.03 * (top_m + height_m / 2.0);
    let r_specific = 8.314 / 0.002_015_9;
    let mass = volume_m3 * (1.0 - phi) * (p_max / z(p_max, t) - p_min / z(p_min, t)) / (r_specific * t);
    mass * 119.96e6 / 3.6e12
}

/// Bilinear interpolation on a (pressure MPa × temperature K) node grid read straight
/// from the CSV text.
pub struct ZGrid {
    pub p: Vec<f64>,
    pub t: Vec<f64>,
    pub z: Vec<Vec<f64>>,
}

impl ZGrid {
    pub fn from_csv(text: &str) -> ZGrid {
        let mut lines = text.lines();
        let t = lines.next().unwrap().split(',').skip(1).map(|v| v.parse().unwrap()).collect();
        let mut p = Vec::new();
        let mut z = Vec::new();
        for l in lines.filter(|l| !l.is_empty()) {
            let mut v = l.split(',').map(|v| v.parse::<f64>().unwrap());
            p.push(v.next().unwrap());
            z.push(v.collect());
        }
        ZGrid { p, t, z }
    }

    pub fn at(&self, p_pa: f64, t_k: f64) -> f64 {
        let p = p_pa / 1e6;
        let i = (0..self.p.len() - 1).find(|&i| p <= self.p[i + 1]).unwrap();
        let j = (0..self.t.len() - 1).find(|&j| t_k <= self.t[j + 1]).unwrap();
        let u = (p - self.p[i]) / (self.p[i + 1] - self.p[i]);
        let v = (t_k - self.t[j]) / (self.t[j + 1] - self.t[j]);
        let lo = self.z[i][j] + v * (self.z[i][j + 1] - self.z[i][j]);
        let hi = self.z[i + 1][j] + v * (self.z[i + 1][j + 1] - self.z[i + 1][j]);
        lo + u * (hi - lo)
    }
}
