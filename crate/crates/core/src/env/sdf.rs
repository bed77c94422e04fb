//! Exact Euclidean signed distance transform on cell grids.
//!
//! Two-pass lower-envelope distance transform (exact, not chamfer). The sign
//! convention places the zero level set halfway between a marked and an
//! unmarked cell center: `+d - cell/2` outside, `-(d - cell/2)` inside, where
//! `d` is the distance to the nearest cell center of the opposite kind.

use super::{GridGeometry, ScalarField2D};

/// Squared-distance sentinel for "no feature anywhere".
const FAR: f64 = 1e20;

/// Clamp applied to degenerate inputs (all marked / none marked):
/// ten map diagonals, positive outside and negative inside.
pub fn degenerate_clamp(geometry: &GridGeometry) -> f64 {
    10.0 * geometry.extent().norm()
}

/// Signed Euclidean distance to the marked region, sampled at cell centers.
/// Negative strictly inside, positive strictly outside. An all-false input
/// returns the positive clamp everywhere; all-true returns the negative
/// clamp.
pub fn signed_distance(marked: &[bool], geometry: &GridGeometry) -> ScalarField2D {
    assert_eq!(marked.len(), geometry.len());
    let any_marked = marked.iter().any(|&m| m);
    let all_marked = marked.iter().all(|&m| m);
    let clamp = degenerate_clamp(geometry);
    if !any_marked {
        return ScalarField2D {
            geometry: *geometry,
            values: vec![clamp; geometry.len()],
        };
    }
    if all_marked {
        return ScalarField2D {
            geometry: *geometry,
            values: vec![-clamp; geometry.len()],
        };
    }

    let d2_to_marked = squared_distance_field(marked, geometry, true);
    let d2_to_unmarked = squared_distance_field(marked, geometry, false);
    let cell = geometry.cell_size;
    let half = 0.5 * cell;
    let values = marked
        .iter()
        .zip(d2_to_marked.iter().zip(d2_to_unmarked.iter()))
        .map(|(&m, (&dm, &du))| {
            if m {
                -(du.sqrt() * cell - half)
            } else {
                dm.sqrt() * cell - half
            }
        })
        .collect();
    ScalarField2D {
        geometry: *geometry,
        values,
    }
}

/// Squared distance (in cell units) from each cell center to the nearest
/// cell with `marked == feature_value`.
fn squared_distance_field(marked: &[bool], geometry: &GridGeometry, feature_value: bool) -> Vec<f64> {
    let w = geometry.width_cells;
    let h = geometry.height_cells;
    let mut field: Vec<f64> = marked
        .iter()
        .map(|&m| if m == feature_value { 0.0 } else { FAR })
        .collect();

    // Pass 1: 1-D transform along rows.
    let mut row = vec![0.0; w];
    let mut out = vec![0.0; w];
    for iy in 0..h {
        row.copy_from_slice(&field[iy * w..(iy + 1) * w]);
        dt1d(&row, &mut out);
        field[iy * w..(iy + 1) * w].copy_from_slice(&out);
    }

    // Pass 2: along columns.
    let mut col = vec![0.0; h];
    let mut out = vec![0.0; h];
    for ix in 0..w {
        for iy in 0..h {
            col[iy] = field[iy * w + ix];
        }
        dt1d(&col, &mut out);
        for iy in 0..h {
            field[iy * w + ix] = out[iy];
        }
    }
    field
}

/// 1-D squared-distance transform via the lower envelope of parabolas.
fn dt1d(f: &[f64], d: &mut [f64]) {
    let n = f.len();
    let mut v = vec![0usize; n];
    let mut z = vec![0.0f64; n + 1];
    let mut k = 0usize;
    v[0] = 0;
    z[0] = f64::NEG_INFINITY;
    z[1] = f64::INFINITY;
    for q in 1..n {
        let fq = f[q] + (q * q) as f64;
        loop {
            let p = v[k];
            let s = (fq - (f[p] + (p * p) as f64)) / (2.0 * (q as f64 - p as f64));
            if s <= z[k] {
                k -= 1;
            } else {
                k += 1;
                v[k] = q;
                z[k] = s;
                z[k + 1] = f64::INFINITY;
                break;
            }
        }
    }
    k = 0;
    for q in 0..n {
        while z[k + 1] < q as f64 {
            k += 1;
        }
        let p = v[k];
        let dq = q as f64 - p as f64;
        d[q] = dq * dq + f[p];
    }
}
