//! Central finite differences.

use nalgebra::DMatrix;

/// Jacobian `J[i][h] = ∂fᵢ/∂x_h` by central differences.
pub fn jacobian<F>(f: F, x: &[f64], h: f64) -> DMatrix<f64>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let n = x.len();
    let mut xp = x.to_vec();
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(n);
    for j in 0..n {
        xp[j] = x[j] + h;
        let fp = f(&xp);
        xp[j] = x[j] - h;
        let fm = f(&xp);
        xp[j] = x[j];
        cols.push(
            fp.iter()
                .zip(&fm)
                .map(|(a, b)| (a - b) / (2.0 * h))
                .collect(),
        );
    }
    let m = cols.first().map_or(0, Vec::len);
    DMatrix::from_fn(m, n, |i, j| cols[j][i])
}

/// Derivative along coordinate `axis` of a flat array-valued function.
pub fn partial<F>(f: &F, x: &[f64], axis: usize, h: f64) -> Vec<f64>
where
    F: Fn(&[f64]) -> Vec<f64> + ?Sized,
{
    let mut xp = x.to_vec();
    xp[axis] = x[axis] + h;
    let fp = f(&xp);
    xp[axis] = x[axis] - h;
    let fm = f(&xp);
    fp.iter()
        .zip(&fm)
        .map(|(a, b)| (a - b) / (2.0 * h))
        .collect()
}

/// Third derivatives `f_{abc}` of a scalar function, flattened as
/// `[a][b][c]`, by nested central differences with one Richardson step
/// (`(4 D(h/2) − D(h)) / 3`).
pub fn third_derivatives<F>(f: &F, x: &[f64], h: f64) -> Vec<f64>
where
    F: Fn(&[f64]) -> f64 + ?Sized,
{
    let coarse = third_derivatives_plain(f, x, h);
    let fine = third_derivatives_plain(f, x, h / 2.0);
    coarse
        .iter()
        .zip(&fine)
        .map(|(c, f)| (4.0 * f - c) / 3.0)
        .collect()
}

fn third_derivatives_plain<F>(f: &F, x: &[f64], h: f64) -> Vec<f64>
where
    F: Fn(&[f64]) -> f64 + ?Sized,
{
    let n = x.len();
    let mut out = vec![0.0; n * n * n];
    let mut p = x.to_vec();
    for a in 0..n {
        for b in a..n {
            for c in b..n {
                // Sum over the 8 sign patterns of a product stencil.
                let mut s = 0.0;
                for mask in 0..8u32 {
                    p.copy_from_slice(x);
                    let mut sign = 1.0;
                    for (bit, axis) in [a, b, c].into_iter().enumerate() {
                        if mask & (1 << bit) != 0 {
                            p[axis] -= h;
                            sign = -sign;
                        } else {
                            p[axis] += h;
                        }
                    }
                    s += sign * f(&p);
                }
                let v = s / (8.0 * h * h * h);
                for (i, j, k) in [
                    (a, b, c),
                    (a, c, b),
                    (b, a, c),
                    (b, c, a),
                    (c, a, b),
                    (c, b, a),
                ] {
                    out[(i * n + j) * n + k] = v;
                }
            }
        }
    }
    out
}
