//! Burning vector geometry into cell masks.
//!
//! Footprint rules: a point marks the cell that contains it, a line marks every cell it
//! passes through, and an area marks the cells whose center lies inside it.

use super::mask::Mask;
use crate::geodata_io::LocalGrid;
use crate::geometry::{scanline_crossings, Coord, MultiPolygon, Polygon, Shape};

/// Marks cells whose center lies inside `poly` (even-odd over all rings).
pub fn fill_polygon(grid: &LocalGrid, poly: &Polygon, mask: &mut Mask) {
    let rings: Vec<&[Coord]> = poly.rings().map(Vec::as_slice).collect();
    let Some(bbox) = crate::geometry::BBox::from_points(poly.exterior.iter().copied()) else {
        return;
    };
    let s = grid.cell_size_m;
    let row_lo = (((bbox.min[1] - grid.y0) / s - 0.5).floor().max(0.0)) as usize;
    let row_hi = ((((bbox.max[1] - grid.y0) / s - 0.5).ceil() + 1.0).max(0.0) as usize).min(grid.height);
    let mut xs = Vec::new();
    for row in row_lo..row_hi {
        let y = grid.cell_center(row, 0)[1];
        scanline_crossings(&rings, y, &mut xs);
        for span in xs.chunks_exact(2) {
            let (xa, xb) = (span[0], span[1]);
            // first column whose center is >= xa, then walk while center < xb
            let guess = ((xa - grid.x0) / s - 0.5).ceil() - 1.0;
            let mut col = guess.max(0.0) as usize;
            while col < grid.width && grid.cell_center(row, col)[0] < xa {
                col += 1;
            }
            while col < grid.width && grid.cell_center(row, col)[0] < xb {
                mask.set(row, col, true);
                col += 1;
            }
        }
    }
}

pub fn fill_multipolygon(grid: &LocalGrid, mp: &MultiPolygon) -> Mask {
    let mut mask = Mask::new(grid.width, grid.height);
    for poly in &mp.0 {
        fill_polygon(grid, poly, &mut mask);
    }
    mask
}

/// Liang–Barsky clip of a segment in cell coordinates to `[0, w] × [0, h]`.
fn clip(a: Coord, b: Coord, w: f64, h: f64) -> Option<(Coord, Coord)> {
    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
    let (mut t0, mut t1) = (0.0f64, 1.0f64);
    for (p, q) in [(-dx, a[0]), (dx, w - a[0]), (-dy, a[1]), (dy, h - a[1])] {
        if p == 0.0 {
            if q < 0.0 {
                return None;
            }
        } else {
            let t = q / p;
            if p < 0.0 {
                t0 = t0.max(t);
            } else {
                t1 = t1.min(t);
            }
        }
    }
    (t0 <= t1).then(|| {
        (
            [a[0] + t0 * dx, a[1] + t0 * dy],
            [a[0] + t1 * dx, a[1] + t1 * dy],
        )
    })
}

/// Marks every cell a segment passes through (Amanatides–Woo traversal).
pub fn burn_segment(grid: &LocalGrid, a: Coord, b: Coord, mask: &mut Mask) {
    let s = grid.cell_size_m;
    let to_cell = |p: Coord| [(p[0] - grid.x0) / s, (p[1] - grid.y0) / s];
    let (w, h) = (grid.width as f64, grid.height as f64);
    let Some((p, q)) = clip(to_cell(a), to_cell(b), w, h) else {
        return;
    };
    let cell = |v: f64, n: usize| (v.floor().max(0.0) as usize).min(n - 1);
    let (mut cx, mut cy) = (cell(p[0], grid.width), cell(p[1], grid.height));
    let (ex, ey) = (cell(q[0], grid.width), cell(q[1], grid.height));
    let (dx, dy) = (q[0] - p[0], q[1] - p[1]);
    let step_x: isize = if dx > 0.0 { 1 } else { -1 };
    let step_y: isize = if dy > 0.0 { 1 } else { -1 };
    let next_boundary = |c: usize, d: f64| if d > 0.0 { c as f64 + 1.0 } else { c as f64 };
    let mut t_max_x = if dx != 0.0 { (next_boundary(cx, dx) - p[0]) / dx } else { f64::INFINITY };
    let mut t_max_y = if dy != 0.0 { (next_boundary(cy, dy) - p[1]) / dy } else { f64::INFINITY };
    let t_dx = if dx != 0.0 { 1.0 / dx.abs() } else { f64::INFINITY };
    let t_dy = if dy != 0.0 { 1.0 / dy.abs() } else { f64::INFINITY };
    let steps = ex.abs_diff(cx) + ey.abs_diff(cy);
    mask.set(cy, cx, true);
    for _ in 0..steps {
        let move_x = if cx == ex {
            false
        } else if cy == ey {
            true
        } else {
            t_max_x < t_max_y
        };
        if move_x {
            cx = cx.wrapping_add_signed(step_x);
            t_max_x += t_dx;
        } else {
            cy = cy.wrapping_add_signed(step_y);
            t_max_y += t_dy;
        }
        mask.set(cy, cx, true);
    }
}

/// Seed cells of a set of shapes.
pub fn footprint(grid: &LocalGrid, shapes: &[Shape]) -> Mask {
    let mut mask = Mask::new(grid.width, grid.height);
    for shape in shapes {
        match shape {
            Shape::Point(p) => {
                if let Some((r, c)) = grid.cell_of(*p) {
                    mask.set(r, c, true);
                }
            }
            Shape::Line(pts) => {
                if pts.len() == 1 {
                    if let Some((r, c)) = grid.cell_of(pts[0]) {
                        mask.set(r, c, true);
                    }
                }
                for seg in pts.windows(2) {
                    burn_segment(grid, seg[0], seg[1], &mut mask);
                }
            }
            Shape::Area(poly) => fill_polygon(grid, poly, &mut mask),
        }
    }
    mask
}
