use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{ParaMatrix, StructureConstants};
use crate::error::{Error, Result};
use crate::table::{parse_table, write_table, RawTable};

const ASSOCIATIVITY_TOL: f64 = 1e-10;

/// How the coordinates of a [`JordanAlgebra`] relate to a concrete model.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Model {
    /// Only the product table is known.
    Table,
    /// `ℝ ⊕ ℝⁿ` with `(a, v)•(b, w) = (ab + v·w, aw + bv)`.
    SpinFactor(usize),
    /// Real symmetric `n × n` matrices; coordinates are the upper triangle
    /// in row-major order, basis `Eᵢᵢ` and `Eᵢⱼ + Eⱼᵢ`.
    Symmetric(usize),
    /// Complex Hermitian `n × n` matrices; coordinates are `Mᵢᵢ`, then
    /// `(Re Mᵢⱼ, Im Mᵢⱼ)` for `i < j`, in row-major order.
    HermitianComplex(usize),
    /// Paracomplex Hermitian `n × n` matrices `X e₊ + Xᵀ e₋`; coordinates
    /// are the entries of `X` in row-major order.
    HermitianParacomplex(usize),
}

/// A finite-dimensional commutative algebra given by its product table.
#[derive(Clone, Debug)]
pub struct JordanAlgebra {
    dim: usize,
    c: Vec<f64>,
    model: Model,
}

/// An associative (not necessarily commutative) algebra.
#[derive(Clone, Debug)]
pub struct AssociativeAlgebra {
    dim: usize,
    c: Vec<f64>,
}

fn product_with(dim: usize, c: &[f64], x: &[f64], y: &[f64]) -> DVector<f64> {
    let mut out = DVector::zeros(dim);
    for i in 0..dim {
        if x[i] == 0.0 {
            continue;
        }
        for j in 0..dim {
            let xy = x[i] * y[j];
            if xy == 0.0 {
                continue;
            }
            for k in 0..dim {
                out[k] += c[RawTable::idx(dim, k, i, j)] * xy;
            }
        }
    }
    out
}

/// Tabulates a bilinear product given on basis elements.
fn tabulate(dim: usize, basis_product: impl Fn(usize, usize) -> DVector<f64>) -> Vec<f64> {
    let mut c = vec![0.0; dim * dim * dim];
    for i in 0..dim {
        for j in 0..dim {
            let p = basis_product(i, j);
            for k in 0..dim {
                c[RawTable::idx(dim, k, i, j)] = p[k];
            }
        }
    }
    c
}

fn unit_vector(dim: usize, i: usize) -> DVector<f64> {
    let mut v = DVector::zeros(dim);
    v[i] = 1.0;
    v
}

impl AssociativeAlgebra {
    pub fn new(dim: usize, c: Vec<f64>) -> Result<Self> {
        if c.len() != dim * dim * dim || dim == 0 {
            return Err(Error::DimensionMismatch {
                expected: dim * dim * dim,
                got: c.len(),
            });
        }
        Ok(Self { dim, c })
    }

    /// Full `n × n` real matrix algebra, basis `Eᵢⱼ` in row-major order.
    pub fn full_matrix(n: usize) -> Self {
        let dim = n * n;
        let c = tabulate(dim, |a, b| {
            let (i, j) = (a / n, a % n);
            let (k, l) = (b / n, b % n);
            if j == k {
                unit_vector(dim, i * n + l)
            } else {
                DVector::zeros(dim)
            }
        });
        Self { dim, c }
    }

    pub fn from_structure(sc: &StructureConstants) -> Self {
        Self {
            dim: sc.rank(),
            c: sc.raw().to_vec(),
        }
    }

    /// Reads the structure-constant text format without mirroring indices.
    pub fn parse(text: &str) -> Result<Self> {
        let t = parse_table(text, false)?;
        Self::new(t.dim, t.c)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn product(&self, x: &[f64], y: &[f64]) -> DVector<f64> {
        product_with(self.dim, &self.c, x, y)
    }

    /// `max |(eᵢeⱼ)eₖ − eᵢ(eⱼeₖ)|` over basis triples.
    pub fn associativity_residual(&self) -> f64 {
        let d = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..d {
            let ei = unit_vector(d, i);
            for j in 0..d {
                let ej = unit_vector(d, j);
                let eij = self.product(ei.as_slice(), ej.as_slice());
                for k in 0..d {
                    let ek = unit_vector(d, k);
                    let left = self.product(eij.as_slice(), ek.as_slice());
                    let ejk = self.product(ej.as_slice(), ek.as_slice());
                    let right = self.product(ei.as_slice(), ejk.as_slice());
                    worst = worst.max((left - right).amax());
                }
            }
        }
        worst
    }
}

/// Symmetrized product `x•y = ½(xy + yx)`.
pub fn jordan_from_associative(assoc: &AssociativeAlgebra) -> Result<JordanAlgebra> {
    let residual = assoc.associativity_residual();
    if residual > ASSOCIATIVITY_TOL {
        return Err(Error::NotAssociative { residual });
    }
    let d = assoc.dim;
    let mut c = vec![0.0; d * d * d];
    for k in 0..d {
        for i in 0..d {
            for j in 0..d {
                c[RawTable::idx(d, k, i, j)] =
                    0.5 * (assoc.c[RawTable::idx(d, k, i, j)] + assoc.c[RawTable::idx(d, k, j, i)]);
            }
        }
    }
    Ok(JordanAlgebra {
        dim: d,
        c,
        model: Model::Table,
    })
}

impl JordanAlgebra {
    /// Wraps a product table. Only commutativity is enforced here; use
    /// [`JordanAlgebra::jordan_identity_residual`] to test the Jordan identity.
    pub fn from_table(dim: usize, c: Vec<f64>) -> Result<Self> {
        let sc = StructureConstants::new(dim, c)?;
        Ok(Self::from_structure(&sc))
    }

    pub fn from_structure(sc: &StructureConstants) -> Self {
        Self {
            dim: sc.rank(),
            c: sc.raw().to_vec(),
            model: Model::Table,
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let t = parse_table(text, true)?;
        Self::from_table(t.dim, t.c)
    }

    pub fn to_text(&self) -> String {
        write_table(&RawTable {
            dim: self.dim,
            c: self.c.clone(),
        })
    }

    pub fn spin_factor(n: usize) -> Self {
        let dim = n + 1;
        let c = tabulate(dim, |i, j| match (i, j) {
            (0, j) => unit_vector(dim, j),
            (i, 0) => unit_vector(dim, i),
            (i, j) if i == j => unit_vector(dim, 0),
            _ => DVector::zeros(dim),
        });
        Self {
            dim,
            c,
            model: Model::SpinFactor(n),
        }
    }

    pub fn symmetric(n: usize) -> Self {
        let dim = n * (n + 1) / 2;
        let c = tabulate(dim, |a, b| {
            let x = sym_matrix(n, unit_vector(dim, a).as_slice());
            let y = sym_matrix(n, unit_vector(dim, b).as_slice());
            sym_coords(&((&x * &y + &y * &x) * 0.5))
        });
        Self {
            dim,
            c,
            model: Model::Symmetric(n),
        }
    }

    pub fn hermitian_complex(n: usize) -> Self {
        let dim = n * n;
        let c = tabulate(dim, |a, b| {
            let x = herm_matrix(n, unit_vector(dim, a).as_slice());
            let y = herm_matrix(n, unit_vector(dim, b).as_slice());
            herm_coords(&((&x * &y + &y * &x) * Complex64::new(0.5, 0.0)))
        });
        Self {
            dim,
            c,
            model: Model::HermitianComplex(n),
        }
    }

    pub fn hermitian_paracomplex(n: usize) -> Self {
        let dim = n * n;
        let c = tabulate(dim, |a, b| {
            let x = DMatrix::from_row_slice(n, n, unit_vector(dim, a).as_slice());
            let y = DMatrix::from_row_slice(n, n, unit_vector(dim, b).as_slice());
            let p = (&x * &y + &y * &x) * 0.5;
            DVector::from_iterator(dim, p.transpose().iter().copied())
        });
        Self {
            dim,
            c,
            model: Model::HermitianParacomplex(n),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn model(&self) -> Model {
        self.model
    }

    pub fn raw(&self) -> &[f64] {
        &self.c
    }

    pub fn product(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        product_with(self.dim, &self.c, x.as_slice(), y.as_slice())
    }

    /// Matrix of `L_a : x ↦ a•x`.
    pub fn mult_operator(&self, a: &DVector<f64>) -> DMatrix<f64> {
        let d = self.dim;
        DMatrix::from_fn(d, d, |k, j| {
            (0..d)
                .map(|i| a[i] * self.c[RawTable::idx(d, k, i, j)])
                .sum()
        })
    }

    pub fn unit(&self) -> Option<DVector<f64>> {
        StructureConstants::new(self.dim, self.c.clone())
            .ok()?
            .unit()
            .map(DVector::from_vec)
    }

    /// `max |x•(x²•y) − x²•(x•y)|` over random pairs with entries in `[−1, 1]`.
    pub fn jordan_identity_residual(&self, samples: usize, seed: u64) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst: f64 = 0.0;
        for _ in 0..samples {
            let x = DVector::from_fn(self.dim, |_, _| rng.random_range(-1.0..1.0));
            let y = DVector::from_fn(self.dim, |_, _| rng.random_range(-1.0..1.0));
            let x2 = self.product(&x, &x);
            let lhs = self.product(&x, &self.product(&x2, &y));
            let rhs = self.product(&x2, &self.product(&x, &y));
            worst = worst.max((lhs - rhs).amax());
        }
        worst
    }

    /// Quadratic representation `U_u x = 2u•(u•x) − u²•x`.
    pub fn quadratic_representation(&self, u: &DVector<f64>) -> DMatrix<f64> {
        let lu = self.mult_operator(u);
        let lu2 = self.mult_operator(&self.product(u, u));
        &lu * &lu * 2.0 - lu2
    }
}

/// Coordinates of a symmetric matrix in the [`Model::Symmetric`] basis.
pub fn sym_coords(m: &DMatrix<f64>) -> DVector<f64> {
    let n = m.nrows();
    let mut v = Vec::with_capacity(n * (n + 1) / 2);
    for i in 0..n {
        for j in i..n {
            v.push(m[(i, j)]);
        }
    }
    DVector::from_vec(v)
}

pub fn sym_matrix(n: usize, coords: &[f64]) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(n, n);
    let mut idx = 0;
    for i in 0..n {
        for j in i..n {
            m[(i, j)] = coords[idx];
            m[(j, i)] = coords[idx];
            idx += 1;
        }
    }
    m
}

/// Coordinates of a Hermitian matrix in the [`Model::HermitianComplex`] basis.
pub fn herm_coords(m: &DMatrix<Complex64>) -> DVector<f64> {
    let n = m.nrows();
    let mut v = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in i..n {
            if i == j {
                v.push(m[(i, i)].re);
            } else {
                v.push(m[(i, j)].re);
                v.push(m[(i, j)].im);
            }
        }
    }
    DVector::from_vec(v)
}

pub fn herm_matrix(n: usize, coords: &[f64]) -> DMatrix<Complex64> {
    let mut m = DMatrix::zeros(n, n);
    let mut idx = 0;
    for i in 0..n {
        for j in i..n {
            if i == j {
                m[(i, i)] = Complex64::new(coords[idx], 0.0);
                idx += 1;
            } else {
                let z = Complex64::new(coords[idx], coords[idx + 1]);
                m[(i, j)] = z;
                m[(j, i)] = z.conj();
                idx += 2;
            }
        }
    }
    m
}

/// Coordinates (entries of `X`) of the Hermitian paracomplex matrix `X e₊ + Xᵀ e₋`.
pub fn para_herm_coords(x: &DMatrix<f64>) -> DVector<f64> {
    DVector::from_iterator(x.len(), x.transpose().iter().copied())
}

/// The paracomplex matrix `X e₊ + Xᵀ e₋` with `X` read from coordinates.
pub fn para_herm_matrix(n: usize, coords: &[f64]) -> ParaMatrix {
    let x = DMatrix::from_row_slice(n, n, coords);
    ParaMatrix::from_canonical(&x, &x.transpose()).expect("square by construction")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_matrix_jordanization() {
        let m2 = AssociativeAlgebra::full_matrix(2);
        assert_eq!(m2.associativity_residual(), 0.0);
        let j = jordan_from_associative(&m2).unwrap();
        // E₁₁•E₁₂ = ½E₁₂ ; coordinates are row-major (E₁₁, E₁₂, E₂₁, E₂₂).
        let p = j.product(&unit_vector(4, 0), &unit_vector(4, 1));
        assert_eq!(p.as_slice(), &[0.0, 0.5, 0.0, 0.0]);
        assert!(j.jordan_identity_residual(200, 1) <= 1e-12);
    }

    #[test]
    fn commutative_input_is_unchanged() {
        let sc = StructureConstants::paracomplex();
        let j = jordan_from_associative(&AssociativeAlgebra::from_structure(&sc)).unwrap();
        assert_eq!(j.raw(), sc.raw());
    }

    #[test]
    fn rejects_non_associative() {
        // e₁e₁ = e₁ + e₂, e₂e₂ = e₁: (e₁e₁)e₂ = e₁ but e₁(e₁e₂) = 0.
        let mut c = vec![0.0; 8];
        c[RawTable::idx(2, 0, 0, 0)] = 1.0;
        c[RawTable::idx(2, 1, 0, 0)] = 1.0;
        c[RawTable::idx(2, 0, 1, 1)] = 1.0;
        let a = AssociativeAlgebra::new(2, c).unwrap();
        assert!(a.associativity_residual() > 0.1);
        assert!(matches!(
            jordan_from_associative(&a),
            Err(Error::NotAssociative { .. })
        ));
    }

    #[test]
    fn shipped_models_satisfy_jordan_identity() {
        let models = [
            JordanAlgebra::spin_factor(1),
            JordanAlgebra::spin_factor(4),
            JordanAlgebra::symmetric(2),
            JordanAlgebra::symmetric(4),
            JordanAlgebra::hermitian_complex(3),
            JordanAlgebra::hermitian_paracomplex(3),
        ];
        for j in &models {
            assert!(
                j.jordan_identity_residual(300, 7) <= 1e-10,
                "{:?}",
                j.model()
            );
            let e = j.unit().expect("unital");
            let x = DVector::from_fn(j.dim(), |i, _| (i as f64 * 0.37).sin());
            assert!((j.product(&e, &x) - &x).amax() < 1e-12);
        }
    }

    #[test]
    fn non_jordan_table_fails_identity() {
        // Commutative but not Jordan: e₁e₁ = e₂, e₁e₂ = e₁.
        let mut c = vec![0.0; 8];
        c[RawTable::idx(2, 1, 0, 0)] = 1.0;
        c[RawTable::idx(2, 0, 0, 1)] = 1.0;
        c[RawTable::idx(2, 0, 1, 0)] = 1.0;
        let j = JordanAlgebra::from_table(2, c).unwrap();
        assert!(j.jordan_identity_residual(50, 3) > 1e-3);
    }

    #[test]
    fn spin_factor_one_is_paracomplex() {
        assert_eq!(
            JordanAlgebra::spin_factor(1).raw(),
            StructureConstants::paracomplex().raw()
        );
    }

    #[test]
    fn model_coordinates_round_trip() {
        let s = DMatrix::from_row_slice(3, 3, &[1.0, 2.0, 3.0, 2.0, 4.0, 5.0, 3.0, 5.0, 6.0]);
        assert_eq!(sym_matrix(3, sym_coords(&s).as_slice()), s);
        let coords = [1.0, 0.5, -0.25, 2.0];
        let h = herm_matrix(2, &coords);
        assert_eq!(herm_coords(&h).as_slice(), &coords);
        let p = para_herm_matrix(2, &[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(p.conj_transpose(), p);
    }

    #[test]
    fn text_format_round_trip() {
        let j = JordanAlgebra::symmetric(2);
        let back = JordanAlgebra::parse(&j.to_text()).unwrap();
        assert_eq!(back.raw(), j.raw());
    }
}
