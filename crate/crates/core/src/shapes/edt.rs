//! Exact Euclidean distance transform by separable lower envelopes of parabolas.

use super::GridSet;

const FAR: f64 = 1e12;

fn envelope(f: &[f64], out: &mut [f64], v: &mut Vec<usize>, z: &mut Vec<f64>) {
    let n = f.len();
    v.clear();
    z.clear();
    v.push(0);
    z.push(f64::NEG_INFINITY);
    z.push(f64::INFINITY);
    for q in 1..n {
        loop {
            let p = *v.last().unwrap();
            let qf = q as f64;
            let pf = p as f64;
            let s = ((f[q] + qf * qf) - (f[p] + pf * pf)) / (2.0 * (qf - pf));
            if s <= z[v.len() - 1] {
                v.pop();
                z.pop();
                if v.is_empty() {
                    v.push(q);
                    z.push(f64::NEG_INFINITY);
                    z.push(f64::INFINITY);
                    break;
                }
            } else {
                v.push(q);
                *z.last_mut().unwrap() = s;
                z.push(f64::INFINITY);
                break;
            }
        }
    }
    let mut k = 0;
    for (q, o) in out.iter_mut().enumerate() {
        let qf = q as f64;
        while z[k + 1] < qf {
            k += 1;
        }
        let d = qf - v[k] as f64;
        *o = d * d + f[v[k]];
    }
}

/// Squared distance, in cell units, from every cell centre to the nearest
/// complement cell centre. The ring of cells around the grid counts as
/// complement. Returned on the grid padded by one cell on every side.
fn squared_distance(set: &GridSet) -> (Vec<f64>, usize, usize) {
    let s = set.spec();
    let (w, h) = (s.cells_x + 2, s.cells_y + 2);
    let mut g = vec![0.0; w * h];
    for (ix, iy) in set.cells() {
        g[(iy + 1) * w + ix + 1] = FAR;
    }
    let mut v = Vec::new();
    let mut z = Vec::new();
    let mut col = vec![0.0; h];
    let mut res = vec![0.0; h];
    for x in 0..w {
        for y in 0..h {
            col[y] = g[y * w + x];
        }
        envelope(&col, &mut res, &mut v, &mut z);
        for y in 0..h {
            g[y * w + x] = res[y];
        }
    }
    let mut row = vec![0.0; w];
    for y in 0..h {
        envelope(&g[y * w..(y + 1) * w], &mut row, &mut v, &mut z);
        g[y * w..(y + 1) * w].copy_from_slice(&row);
    }
    (g, w, h)
}

/// Distance of each true cell centre to the complement, row-major on the grid.
pub fn distance_to_complement(set: &GridSet) -> Vec<f64> {
    let s = set.spec();
    let (g, w, _) = squared_distance(set);
    let mut out = vec![0.0; s.len()];
    for iy in 0..s.cells_y {
        for ix in 0..s.cells_x {
            out[s.index(ix, iy)] = g[(iy + 1) * w + ix + 1].sqrt() * s.spacing;
        }
    }
    out
}

/// Radius of the largest ball inside the set: the largest centre-to-complement
/// distance less half a cell, since the complement cell reaches half a cell
/// towards the set.
pub fn inscribed_radius(set: &GridSet) -> f64 {
    if set.is_empty() {
        return 0.0;
    }
    let d = distance_to_complement(set);
    let m = d.iter().cloned().fold(0.0, f64::max);
    (m - 0.5 * set.spec().spacing).max(0.0)
}
