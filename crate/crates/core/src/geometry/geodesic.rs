use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::fields::{check_point, ConnectionField, MetricField};
use crate::error::{Error, Result};

/// Samples of a geodesic `t ↦ (x(t), ẋ(t))`.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub points: Vec<DVector<f64>>,
    pub velocities: Vec<DVector<f64>>,
    /// Integration stopped early because the curve left the chart domain.
    pub hit_boundary: bool,
}

impl Trajectory {
    pub fn end(&self) -> &DVector<f64> {
        self.points.last().expect("nonempty trajectory")
    }

    /// `max_t |g(ẋ, ẋ)(t) − g(ẋ, ẋ)(0)|`.
    pub fn energy_drift<M: MetricField + ?Sized>(&self, g: &M) -> Result<f64> {
        let energy =
            |x: &DVector<f64>, v: &DVector<f64>| -> Result<f64> { Ok((g.metric(x)? * v).dot(v)) };
        let e0 = energy(&self.points[0], &self.velocities[0])?;
        let mut worst: f64 = 0.0;
        for (x, v) in self.points.iter().zip(&self.velocities) {
            worst = worst.max((energy(x, v)? - e0).abs());
        }
        Ok(worst)
    }

    /// Header `t,x1,…,xd,v1,…,vd`, one row per sample.
    pub fn to_csv(&self) -> Result<String> {
        let d = self.points.first().map_or(0, |p| p.len());
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["t".to_string()];
        header.extend((1..=d).map(|i| format!("x{i}")));
        header.extend((1..=d).map(|i| format!("v{i}")));
        w.write_record(&header)?;
        for ((t, x), v) in self.times.iter().zip(&self.points).zip(&self.velocities) {
            let mut row = vec![format!("{t:e}")];
            row.extend(x.iter().map(|c| format!("{c:e}")));
            row.extend(v.iter().map(|c| format!("{c:e}")));
            w.write_record(&row)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("ascii"))
    }
}

fn acceleration<C: ConnectionField + ?Sized>(
    conn: &C,
    x: &DVector<f64>,
    v: &DVector<f64>,
) -> Option<DVector<f64>> {
    if !conn.in_domain(x) {
        return None;
    }
    conn.christoffel(x).ok().map(|g| -g.contract(v, v))
}

/// Integrates `ẍᵏ + Γᵏᵢⱼ ẋⁱ ẋʲ = 0` with classical fourth-order Runge–Kutta
/// from `t = 0` to `t_end`, using `⌈t_end/dt⌉` equal steps. If a stage
/// leaves the domain of `conn`, the trajectory is truncated at the last
/// complete step and flagged.
pub fn geodesic<C: ConnectionField + ?Sized>(
    conn: &C,
    x0: &DVector<f64>,
    v0: &DVector<f64>,
    t_end: f64,
    dt: f64,
) -> Result<Trajectory> {
    let d = conn.dim();
    check_point(d, x0)?;
    check_point(d, v0)?;
    if !(dt > 0.0) || !(t_end >= 0.0) || !t_end.is_finite() {
        return Err(Error::InvalidInput(format!(
            "need dt > 0 and t_end ≥ 0, got dt={dt}, t_end={t_end}"
        )));
    }
    let steps = ((t_end / dt) - 1e-9).ceil().max(0.0) as usize;
    let h = if steps == 0 {
        0.0
    } else {
        t_end / steps as f64
    };
    let mut traj = Trajectory {
        times: vec![0.0],
        points: vec![x0.clone()],
        velocities: vec![v0.clone()],
        hit_boundary: false,
    };
    if acceleration(conn, x0, v0).is_none() {
        traj.hit_boundary = true;
        return Ok(traj);
    }
    let (mut x, mut v) = (x0.clone(), v0.clone());
    for n in 0..steps {
        let stage = || -> Option<(DVector<f64>, DVector<f64>)> {
            let a1 = acceleration(conn, &x, &v)?;
            let (x2, v2) = (&x + &v * (h / 2.0), &v + &a1 * (h / 2.0));
            let a2 = acceleration(conn, &x2, &v2)?;
            let (x3, v3) = (&x + &v2 * (h / 2.0), &v + &a2 * (h / 2.0));
            let a3 = acceleration(conn, &x3, &v3)?;
            let (x4, v4) = (&x + &v3 * h, &v + &a3 * h);
            let a4 = acceleration(conn, &x4, &v4)?;
            let xn = &x + (&v + &v2 * 2.0 + &v3 * 2.0 + &v4) * (h / 6.0);
            let vn = &v + (&a1 + &a2 * 2.0 + &a3 * 2.0 + &a4) * (h / 6.0);
            conn.in_domain(&xn).then_some((xn, vn))
        };
        match stage() {
            Some((xn, vn)) => {
                x = xn;
                v = vn;
                traj.times.push((n + 1) as f64 * h);
                traj.points.push(x.clone());
                traj.velocities.push(v.clone());
            }
            None => {
                traj.hit_boundary = true;
                break;
            }
        }
    }
    Ok(traj)
}

/// `{origin + B s}` for a `d × m` matrix `B` of full column rank.
#[derive(Clone, Debug)]
pub struct AffineSubspace {
    pub origin: DVector<f64>,
    pub basis: DMatrix<f64>,
    projector: DMatrix<f64>,
}

impl AffineSubspace {
    pub fn new(origin: DVector<f64>, basis: DMatrix<f64>) -> Result<Self> {
        if basis.nrows() != origin.len() {
            return Err(Error::DimensionMismatch {
                expected: origin.len(),
                got: basis.nrows(),
            });
        }
        let gram = basis.transpose() * &basis;
        let inv = gram
            .try_inverse()
            .ok_or_else(|| Error::InvalidInput("subspace basis is rank deficient".into()))?;
        let projector = &basis * inv * basis.transpose();
        Ok(Self {
            origin,
            basis,
            projector,
        })
    }

    /// Coordinate subspace through `origin` spanned by the listed axes.
    pub fn coordinate(origin: DVector<f64>, axes: &[usize]) -> Result<Self> {
        let d = origin.len();
        if let Some(a) = axes.iter().find(|a| **a >= d) {
            return Err(Error::InvalidInput(format!("axis {a} out of range")));
        }
        let basis = DMatrix::from_fn(d, axes.len(), |i, j| if axes[j] == i { 1.0 } else { 0.0 });
        Self::new(origin, basis)
    }

    pub fn point(&self, s: &DVector<f64>) -> DVector<f64> {
        &self.origin + &self.basis * s
    }

    pub fn tangent(&self, u: &DVector<f64>) -> DVector<f64> {
        &self.basis * u
    }

    /// `‖(I − P)(x − origin)‖∞` with `P` the orthogonal projector onto the
    /// span of the basis.
    pub fn deviation(&self, x: &DVector<f64>) -> f64 {
        let r = x - &self.origin;
        (&r - &self.projector * &r).amax()
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TotallyGeodesicReport {
    pub samples: usize,
    pub max_deviation: f64,
    pub deviations: Vec<f64>,
    /// Trajectories cut short at the domain boundary.
    pub truncated: usize,
    pub tolerance: f64,
    pub pass: bool,
}

/// Integrates the ambient geodesic from each `(s, u)` start over
/// `[0, t_end]` and records the largest orthogonal distance of the
/// trajectory from the subspace. A start is the point `origin + B s` with
/// velocity `B u`.
pub fn totally_geodesic_check<C: ConnectionField + ?Sized>(
    conn: &C,
    sub: &AffineSubspace,
    starts: &[(DVector<f64>, DVector<f64>)],
    t_end: f64,
    dt: f64,
    tol: f64,
) -> Result<TotallyGeodesicReport> {
    let runs: Vec<(f64, bool)> = starts
        .par_iter()
        .map(|(s, u)| {
            let traj = geodesic(conn, &sub.point(s), &sub.tangent(u), t_end, dt)?;
            let dev = traj
                .points
                .iter()
                .map(|x| sub.deviation(x))
                .fold(0.0, f64::max);
            Ok((dev, traj.hit_boundary))
        })
        .collect::<Result<_>>()?;
    let deviations: Vec<f64> = runs.iter().map(|r| r.0).collect();
    let max_deviation = deviations.iter().copied().fold(0.0, f64::max);
    Ok(TotallyGeodesicReport {
        samples: starts.len(),
        max_deviation,
        truncated: runs.iter().filter(|r| r.1).count(),
        tolerance: tol,
        pass: max_deviation <= tol,
        deviations,
    })
}
