//! Differentiability over a commutative algebra.
//!
//! A map `f: Aᵐ → Aⁿ`, written as a real map on coordinates, is
//! A-differentiable at a point exactly when every `r × r` block of its real
//! Jacobian commutes with the multiplication operators `L_{e_j}` of the basis
//! elements. In structure constants:
//!
//! `Σ_h (∂yᵢ/∂x_h) Cʰⱼₖ = Σ_h Cⁱⱼₕ (∂y_h/∂xₖ)` for all `i, j, k`.
//!
//! The residual of that system is what [`cauchy_riemann_residual_with`]
//! returns.

use super::StructureConstants;
use crate::numdiff::jacobian;

/// Default central-difference step.
pub const DEFAULT_STEP: f64 = 1e-4;

/// Residual for maps over the paracomplex numbers. Coordinates are ordered
/// `(x₁, y₁, x₂, y₂, …)` in the `(1, ε)` basis.
pub fn cauchy_riemann_residual<F>(f: F, point: &[f64], h: f64) -> f64
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    cauchy_riemann_residual_with(&StructureConstants::paracomplex(), f, point, h)
}

/// Residual over an arbitrary commutative algebra of rank `r`.
///
/// # Panics
///
/// When `point.len()` or the output length is not a multiple of `r`.
pub fn cauchy_riemann_residual_with<F>(sc: &StructureConstants, f: F, point: &[f64], h: f64) -> f64
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let r = sc.rank();
    assert!(
        point.len().is_multiple_of(r),
        "input length must be a multiple of the rank"
    );
    let jac = jacobian(&f, point, h);
    assert!(
        jac.nrows().is_multiple_of(r),
        "output length must be a multiple of the rank"
    );
    let (m, n) = (point.len() / r, jac.nrows() / r);

    let mut worst: f64 = 0.0;
    for out in 0..n {
        for inp in 0..m {
            let block = jac.view((out * r, inp * r), (r, r));
            for i in 0..r {
                for j in 0..r {
                    for k in 0..r {
                        let lhs: f64 = (0..r).map(|hh| block[(i, hh)] * sc.get(hh, j, k)).sum();
                        let rhs: f64 = (0..r).map(|hh| sc.get(i, j, hh) * block[(hh, k)]).sum();
                        worst = worst.max((lhs - rhs).abs());
                    }
                }
            }
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Para64;

    fn square(v: &[f64]) -> Vec<f64> {
        let z = Para64::new(v[0], v[1]);
        let w = z * z;
        vec![w.x, w.y]
    }

    #[test]
    fn square_is_paraholomorphic() {
        for p in [[0.3, -1.2], [2.0, 0.5], [-0.7, 0.0]] {
            assert!(cauchy_riemann_residual(square, &p, DEFAULT_STEP) <= 1e-6);
        }
    }

    #[test]
    fn projection_is_not() {
        let r = cauchy_riemann_residual(|v| vec![v[0], 0.0], &[1.0, 1.0], DEFAULT_STEP);
        assert!(r >= 0.5, "residual {r}");
    }

    #[test]
    fn identity_and_conjugation() {
        assert!(cauchy_riemann_residual(|v| v.to_vec(), &[0.2, 0.9], DEFAULT_STEP) <= 1e-10);
        // ε-conjugation is real-linear but not A-linear.
        assert!(cauchy_riemann_residual(|v| vec![v[0], -v[1]], &[0.2, 0.9], DEFAULT_STEP) > 0.5);
    }

    #[test]
    fn several_variables() {
        // (z, w) ↦ (z w, z + w²) is paraholomorphic in both variables.
        let f = |v: &[f64]| {
            let (z, w) = (Para64::new(v[0], v[1]), Para64::new(v[2], v[3]));
            let a = z * w;
            let b = z + w * w;
            vec![a.x, a.y, b.x, b.y]
        };
        assert!(cauchy_riemann_residual(f, &[0.1, 0.4, -0.3, 0.8], DEFAULT_STEP) <= 1e-6);
    }

    #[test]
    fn complex_squaring_under_complex_constants() {
        let sc = StructureConstants::complex();
        let f = |v: &[f64]| vec![v[0] * v[0] - v[1] * v[1], 2.0 * v[0] * v[1]];
        assert!(cauchy_riemann_residual_with(&sc, f, &[0.4, -0.6], DEFAULT_STEP) <= 1e-6);
        // Paracomplex squaring is not holomorphic in the complex sense.
        assert!(cauchy_riemann_residual_with(&sc, square, &[0.4, -0.6], DEFAULT_STEP) > 0.1);
    }
}
