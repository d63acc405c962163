//! Exact squared Euclidean distance transform (Felzenszwalb & Huttenlocher, separable
//! lower envelope of parabolas). Distances are in cell units between cell centers, so
//! every finite output is an integer and comparisons against squared radii are exact.

use super::mask::Mask;

const INF: f64 = 1e20;

fn transform_1d(f: &[f64], d: &mut [f64], v: &mut [usize], z: &mut [f64]) {
    let n = f.len();
    if n == 0 {
        return;
    }
    let mut k = 0usize;
    v[0] = 0;
    z[0] = f64::NEG_INFINITY;
    z[1] = f64::INFINITY;
    for q in 1..n {
        let fq = f[q] + (q * q) as f64;
        let mut s;
        loop {
            let p = v[k];
            s = (fq - (f[p] + (p * p) as f64)) / (2.0 * q as f64 - 2.0 * p as f64);
            // z[0] is -inf, so k never underflows
            if s <= z[k] {
                k -= 1;
            } else {
                break;
            }
        }
        k += 1;
        v[k] = q;
        z[k] = s;
        z[k + 1] = f64::INFINITY;
    }
    k = 0;
    for (q, out) in d.iter_mut().enumerate() {
        while z[k + 1] < q as f64 {
            k += 1;
        }
        let p = v[k];
        let dq = q as f64 - p as f64;
        *out = dq * dq + f[p];
    }
}

/// Squared distance from each cell center to the nearest set cell center of `seeds`.
/// Returns `None` when `seeds` is empty.
pub fn squared_distance(seeds: &Mask) -> Option<Vec<f64>> {
    if seeds.is_empty() {
        return None;
    }
    let (w, h) = seeds.dims();
    let mut grid: Vec<f64> = seeds.cells().iter().map(|&b| if b { 0.0 } else { INF }).collect();
    let n = w.max(h);
    let mut f = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut v = vec![0usize; n];
    let mut z = vec![0.0; n + 1];

    for c in 0..w {
        for r in 0..h {
            f[r] = grid[r * w + c];
        }
        transform_1d(&f[..h], &mut d[..h], &mut v, &mut z);
        for r in 0..h {
            grid[r * w + c] = d[r];
        }
    }
    for r in 0..h {
        let row = &mut grid[r * w..(r + 1) * w];
        f[..w].copy_from_slice(row);
        transform_1d(&f[..w], &mut d[..w], &mut v, &mut z);
        row.copy_from_slice(&d[..w]);
    }
    Some(grid)
}

/// Cells whose center lies within `radius_m` (Euclidean, center to center) of a seed.
pub fn dilate(seeds: &Mask, radius_m: f64, cell_size_m: f64) -> Mask {
    let (w, h) = seeds.dims();
    if radius_m <= 0.0 {
        return seeds.clone();
    }
    match squared_distance(seeds) {
        None => Mask::new(w, h),
        Some(d2) => {
            let (r2, s2) = (radius_m * radius_m, cell_size_m * cell_size_m);
            Mask::from_fn(w, h, |r, c| d2[r * w + c] * s2 <= r2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute(seeds: &Mask) -> Vec<f64> {
        let (w, h) = seeds.dims();
        let pts: Vec<(i64, i64)> = (0..h)
            .flat_map(|r| (0..w).map(move |c| (r, c)))
            .filter(|&(r, c)| seeds.get(r, c))
            .map(|(r, c)| (r as i64, c as i64))
            .collect();
        let mut out = Vec::with_capacity(w * h);
        for r in 0..h as i64 {
            for c in 0..w as i64 {
                let best = pts
                    .iter()
                    .map(|&(pr, pc)| ((pr - r).pow(2) + (pc - c).pow(2)) as f64)
                    .fold(f64::INFINITY, f64::min);
                out.push(best);
            }
        }
        out
    }

    #[test]
    fn single_seed_disk_count() {
        let mut m = Mask::new(61, 61);
        m.set(30, 30, true);
        // lattice points with i² + j² <= 400
        assert_eq!(dilate(&m, 2000.0, 100.0).count(), 1257);
    }

    #[test]
    fn empty_seeds() {
        assert!(squared_distance(&Mask::new(4, 4)).is_none());
        assert!(dilate(&Mask::new(4, 4), 10.0, 1.0).is_empty());
    }

    proptest! {
        #[test]
        fn matches_brute_force(w in 1usize..24, h in 1usize..24, bits in proptest::collection::vec(proptest::bool::weighted(0.08), 576)) {
            let m = Mask::from_fn(w, h, |r, c| bits[r * 24 + c]);
            prop_assume!(!m.is_empty());
            prop_assert_eq!(squared_distance(&m).unwrap(), brute(&m));
        }
    }
}
