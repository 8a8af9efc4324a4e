//! Dense complex linear algebra for small Hermitian systems.
//!
//! Levels are labelled `1..=dim` in every public accessor, matching the usual
//! `|1>, |2>, ...` ket notation. Internally everything is a column-major
//! `nalgebra` matrix with zero-based indices.

use std::fmt;
use std::ops::Mul;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

pub use num_complex::Complex64 as C64;

/// Structural checks (Hermiticity, normalization, unitarity).
pub const STRUCTURAL_TOL: f64 = 1e-12;
/// Quantities derived through an eigendecomposition.
pub const DERIVED_TOL: f64 = 1e-10;
/// Agreement between the spectral propagator and an independent integrator.
pub const ORACLE_TOL: f64 = 1e-8;

/// Components below this magnitude are skipped when fixing the gauge.
const GAUGE_CUTOFF: f64 = 1e-9;

#[inline]
pub(crate) fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix(DMatrix<C64>);

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self(DMatrix::zeros(dim, dim))
    }

    pub fn identity(dim: usize) -> Self {
        Self(DMatrix::identity(dim, dim))
    }

    /// Builds a matrix from zero-based `f(row, col)`.
    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        Self(DMatrix::from_fn(dim, dim, f))
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::param("rows", "matrix must have at least one row"));
        }
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: row.len(),
                });
            }
        }
        Ok(Self::from_fn(dim, |i, j| rows[i][j]))
    }

    pub fn from_nalgebra(m: DMatrix<C64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                found: m.ncols(),
            });
        }
        Ok(Self(m))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    /// Entry `(i, j)` with one-based level labels.
    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.0[(i - 1, j - 1)]
    }

    pub fn as_nalgebra(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_nalgebra(self) -> DMatrix<C64> {
        self.0
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn conj(&self) -> Self {
        Self(self.0.map(|z| z.conj()))
    }

    pub fn hermiticity_residual(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.0[(i, j)] - self.0[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        assert_eq!(self.dim(), other.dim(), "max_abs_diff: dimension mismatch");
        self.0
            .iter()
            .zip(other.0.iter())
            .fold(0.0, |m, (a, b)| m.max((a - b).norm()))
    }

    /// Deviation from unitarity, `max|U^dagger U - I|`.
    pub fn unitarity_residual(&self) -> f64 {
        let prod = self.adjoint() * self;
        prod.max_abs_diff(&ComplexMatrix::identity(self.dim()))
    }

    pub fn apply(&self, psi: &StateVector) -> Result<DVector<C64>> {
        check_dim(self.dim(), psi.dim())?;
        Ok(&self.0 * &psi.amplitudes)
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 * &rhs.0)
    }
}

impl Mul<&ComplexMatrix> for ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(self.0 * &rhs.0)
    }
}

impl fmt::Display for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.dim() {
            let row: Vec<String> = (0..self.dim())
                .map(|j| {
                    let z = self.0[(i, j)];
                    format!("{:+.6}{:+.6}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Rotating-frame Hamiltonian (hbar = 1). Exactly Hermitian.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator(ComplexMatrix);

impl HermitianOperator {
    /// Accepts `m` if `max|m - m^dagger| <= 1e-12`, then makes it exactly Hermitian
    /// by averaging the two triangles.
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        let residual = m.hermiticity_residual();
        if !(residual <= STRUCTURAL_TOL) {
            return Err(Error::NotHermitian { residual });
        }
        Ok(Self::symmetrized(m))
    }

    /// Builds from the upper triangle (`i <= j`, zero-based) only; the lower
    /// triangle is the conjugate mirror and the diagonal keeps its real part.
    pub fn from_upper(dim: usize, mut upper: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = DMatrix::zeros(dim, dim);
        for i in 0..dim {
            m[(i, i)] = c(upper(i, i).re, 0.0);
            for j in (i + 1)..dim {
                let z = upper(i, j);
                m[(i, j)] = z;
                m[(j, i)] = z.conj();
            }
        }
        Self(ComplexMatrix(m))
    }

    fn symmetrized(m: ComplexMatrix) -> Self {
        let n = m.dim();
        let src = m.0;
        Self::from_upper(n, |i, j| {
            if i == j {
                src[(i, i)]
            } else {
                (src[(i, j)] + src[(j, i)].conj()) * 0.5
            }
        })
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.0.entry(i, j)
    }

    /// Entrywise complex conjugate, `H -> H*`.
    pub fn conj(&self) -> Self {
        Self(self.0.conj())
    }

    /// Largest entry modulus; the natural frequency scale of the problem.
    pub fn scale(&self) -> f64 {
        self.0.max_abs()
    }

    pub fn max_imag(&self) -> f64 {
        self.0 .0.iter().fold(0.0, |m, z| m.max(z.im.abs()))
    }
}

impl From<HermitianOperator> for ComplexMatrix {
    fn from(h: HermitianOperator) -> Self {
        h.0
    }
}

/// Normalized complex amplitude vector with a basis tag.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amplitudes: DVector<C64>,
    basis: String,
}

impl StateVector {
    /// Requires `|sum |a_i|^2 - 1| <= 1e-12`.
    pub fn new(amplitudes: Vec<C64>, basis: impl Into<String>) -> Result<Self> {
        let v = DVector::from_vec(amplitudes);
        let norm_sqr = v.norm_squared();
        if !((norm_sqr - 1.0).abs() <= STRUCTURAL_TOL) {
            return Err(Error::NotNormalized { norm_sqr });
        }
        Ok(Self {
            amplitudes: v,
            basis: basis.into(),
        })
    }

    /// Rescales to unit norm; rejects vectors with norm below 1e-12.
    pub fn normalized(amplitudes: Vec<C64>, basis: impl Into<String>) -> Result<Self> {
        Self::from_dvector(DVector::from_vec(amplitudes), basis)
    }

    pub(crate) fn from_dvector(v: DVector<C64>, basis: impl Into<String>) -> Result<Self> {
        let norm = v.norm();
        if !(norm >= STRUCTURAL_TOL) || v.is_empty() {
            return Err(Error::param(
                "amplitudes",
                format!("norm {norm:e} is too small"),
            ));
        }
        Ok(Self {
            amplitudes: v / c(norm, 0.0),
            basis: basis.into(),
        })
    }

    pub fn from_real(components: &[f64]) -> Result<Self> {
        Self::normalized(components.iter().map(|&x| c(x, 0.0)).collect(), "natural")
    }

    /// Natural-basis ket `|level>`, one-based.
    pub fn basis_state(dim: usize, level: usize) -> Self {
        assert!(
            (1..=dim).contains(&level),
            "level {level} outside 1..={dim}"
        );
        let mut v = DVector::zeros(dim);
        v[level - 1] = c(1.0, 0.0);
        Self {
            amplitudes: v,
            basis: "natural".into(),
        }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn basis(&self) -> &str {
        &self.basis
    }

    pub fn with_basis(mut self, basis: impl Into<String>) -> Self {
        self.basis = basis.into();
        self
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn to_vec(&self) -> Vec<C64> {
        self.amplitudes.iter().copied().collect()
    }

    /// Amplitude on `|level>`, one-based.
    pub fn amplitude(&self, level: usize) -> C64 {
        self.amplitudes[level - 1]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.norm_squared()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        check_dim(self.dim(), other.dim())?;
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    pub fn overlap(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm())
    }

    pub fn conj(&self) -> Self {
        Self {
            amplitudes: self.amplitudes.map(|z| z.conj()),
            basis: self.basis.clone(),
        }
    }

    /// Rotates the global phase so that the first component with modulus above
    /// 1e-9 is real and positive.
    pub fn canonical_gauge(mut self) -> Self {
        if let Some(z) = self.amplitudes.iter().find(|z| z.norm() > GAUGE_CUTOFF) {
            let phase = z.conj() / z.norm();
            self.amplitudes *= phase;
        }
        self
    }

    /// Largest componentwise deviation after removing the relative global phase.
    pub fn distance_up_to_phase(&self, other: &StateVector) -> Result<f64> {
        let ov = self.inner(other)?;
        let phase = if ov.norm() > 0.0 {
            ov / ov.norm()
        } else {
            c(1.0, 0.0)
        };
        let aligned = &self.amplitudes * phase;
        Ok(aligned
            .iter()
            .zip(other.amplitudes.iter())
            .fold(0.0, |m, (a, b)| m.max((a - b).norm())))
    }
}

/// Ordered, complete, orthonormal list of states with display labels.
#[derive(Clone, Debug, PartialEq)]
pub struct OrthonormalBasis {
    vectors: Vec<StateVector>,
    labels: Vec<String>,
}

impl OrthonormalBasis {
    pub fn new(vectors: Vec<StateVector>, labels: Vec<String>) -> Result<Self> {
        let dim = vectors.first().map(StateVector::dim).unwrap_or(0);
        if dim == 0 {
            return Err(Error::IncompleteBasis { dim: 0, found: 0 });
        }
        if labels.len() != vectors.len() {
            return Err(Error::DimensionMismatch {
                expected: vectors.len(),
                found: labels.len(),
            });
        }
        for v in &vectors {
            check_dim(dim, v.dim())?;
        }
        if vectors.len() != dim {
            return Err(Error::IncompleteBasis {
                dim,
                found: vectors.len(),
            });
        }
        let residual = gram_residual(&vectors);
        if !(residual <= DERIVED_TOL) {
            return Err(Error::NotOrthonormal { residual });
        }
        Ok(Self { vectors, labels })
    }

    /// Labels default to `"1"`, `"2"`, ...
    pub fn unlabeled(vectors: Vec<StateVector>) -> Result<Self> {
        let labels = (1..=vectors.len()).map(|k| k.to_string()).collect();
        Self::new(vectors, labels)
    }

    pub fn natural(dim: usize) -> Self {
        let vectors = (1..=dim)
            .map(|k| StateVector::basis_state(dim, k))
            .collect();
        let labels = (1..=dim).map(|k| k.to_string()).collect();
        Self { vectors, labels }
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[StateVector] {
        &self.vectors
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn get(&self, label: &str) -> Option<&StateVector> {
        self.labels
            .iter()
            .position(|l| l == label)
            .map(|k| &self.vectors[k])
    }

    /// The mirrored basis used for the `-Phi` run of a conjugated-frame comparison.
    pub fn conj(&self) -> Self {
        Self {
            vectors: self.vectors.iter().map(StateVector::conj).collect(),
            labels: self.labels.clone(),
        }
    }

    /// Matrix with the basis vectors as columns.
    pub fn columns(&self) -> DMatrix<C64> {
        let n = self.dim();
        DMatrix::from_fn(n, n, |i, j| self.vectors[j].amplitudes[i])
    }
}

/// `max_{ij} |<v_i|v_j> - delta_ij|`.
pub fn gram_residual(vectors: &[StateVector]) -> f64 {
    let mut worst = 0.0_f64;
    for (i, a) in vectors.iter().enumerate() {
        for (j, b) in vectors.iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            let ip = a.amplitudes.dotc(&b.amplitudes);
            worst = worst.max((ip - c(target, 0.0)).norm());
        }
    }
    worst
}

/// Eigenvalues ascending, eigenvectors orthonormal and in canonical gauge.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<StateVector>,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0, |m, l| m.max(l.abs()))
    }

    /// `U(t) = sum_k exp(-i lambda_k t) |v_k><v_k|`.
    pub fn propagator(&self, t: f64) -> ComplexMatrix {
        let n = self.dim();
        let mut u = DMatrix::zeros(n, n);
        for (lambda, v) in self.eigenvalues.iter().zip(&self.eigenvectors) {
            let phase = C64::from_polar(1.0, -lambda * t);
            let a = &v.amplitudes;
            for i in 0..n {
                let ai = a[i] * phase;
                for j in 0..n {
                    u[(i, j)] += ai * a[j].conj();
                }
            }
        }
        ComplexMatrix(u)
    }

    /// `U(t) psi` without forming the propagator.
    pub fn evolve(&self, psi: &StateVector, t: f64) -> Result<StateVector> {
        check_dim(self.dim(), psi.dim())?;
        let mut out = DVector::zeros(self.dim());
        for (lambda, v) in self.eigenvalues.iter().zip(&self.eigenvectors) {
            let coeff = v.amplitudes.dotc(&psi.amplitudes) * C64::from_polar(1.0, -lambda * t);
            out.axpy(coeff, &v.amplitudes, c(1.0, 0.0));
        }
        Ok(StateVector {
            amplitudes: out,
            basis: psi.basis.clone(),
        })
    }

    /// `max_k |H v_k - lambda_k v_k|`.
    pub fn residual(&self, h: &HermitianOperator) -> f64 {
        self.eigenvalues
            .iter()
            .zip(&self.eigenvectors)
            .map(|(l, v)| {
                let hv = &h.matrix().0 * &v.amplitudes;
                (hv - &v.amplitudes * c(*l, 0.0)).norm()
            })
            .fold(0.0, f64::max)
    }
}

/// Hermitian eigendecomposition.
///
/// Eigenvalues are sorted ascending. Eigenvalues closer than
/// `1e-9 * (1 + max|lambda|)` form a cluster; the cluster's subspace is
/// re-spanned deterministically by projecting `|1>, |2>, ...` onto it and
/// applying modified Gram-Schmidt, so degenerate eigenvectors do not depend on
/// the solver's internal choices.
pub fn eig_hermitian(h: &HermitianOperator) -> Result<SpectralDecomposition> {
    let n = h.dim();
    let eig = SymmetricEigen::try_new(h.matrix().0.clone(), f64::EPSILON, 10_000)
        .ok_or(Error::NoConvergence)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors: Vec<DVector<C64>> = order
        .iter()
        .map(|&k| eig.eigenvectors.column(k).into_owned())
        .collect();

    let scale = 1.0 + eigenvalues.iter().fold(0.0_f64, |m, l| m.max(l.abs()));
    let cluster_tol = 1e-9 * scale;
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && eigenvalues[end] - eigenvalues[end - 1] <= cluster_tol {
            end += 1;
        }
        if end - start > 1 {
            let span = deterministic_span(&vectors[start..end]);
            vectors.splice(start..end, span);
        }
        start = end;
    }

    let eigenvectors = vectors
        .into_iter()
        .map(|v| {
            StateVector::from_dvector(v, "eigen")
                .expect("eigenvectors have unit norm")
                .canonical_gauge()
        })
        .collect();
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// Orthonormal basis of `span(vs)` built from the projections of the natural
/// basis vectors, in index order.
pub(crate) fn deterministic_span(vs: &[DVector<C64>]) -> Vec<DVector<C64>> {
    let Some(n) = vs.first().map(|v| v.len()) else {
        return Vec::new();
    };
    let m = vs.len();
    let mut out: Vec<DVector<C64>> = Vec::with_capacity(m);
    for k in 0..n {
        if out.len() == m {
            break;
        }
        let mut w: DVector<C64> = DVector::zeros(n);
        for v in vs {
            w.axpy(v[k].conj(), v, c(1.0, 0.0));
        }
        for u in &out {
            let proj = u.dotc(&w);
            w.axpy(-proj, u, c(1.0, 0.0));
        }
        let norm = w.norm();
        // Some remaining projection always has norm >= 1/sqrt(n).
        if norm > 1e-3 {
            out.push(w / c(norm, 0.0));
        }
    }
    out
}

pub fn propagator(h: &HermitianOperator, t: f64) -> Result<ComplexMatrix> {
    Ok(eig_hermitian(h)?.propagator(t))
}

/// `H'_{ij} = <b_i|H|b_j>`.
pub fn change_basis(h: &HermitianOperator, basis: &OrthonormalBasis) -> Result<HermitianOperator> {
    check_dim(h.dim(), basis.dim())?;
    let b = basis.columns();
    let m = b.adjoint() * &h.matrix().0 * &b;
    Ok(HermitianOperator::symmetrized(ComplexMatrix(m)))
}

/// `p_i = |<b_i|psi>|^2`.
pub fn populations(psi: &StateVector, basis: &OrthonormalBasis) -> Result<Vec<f64>> {
    check_dim(basis.dim(), psi.dim())?;
    Ok(basis
        .vectors
        .iter()
        .map(|b| b.amplitudes.dotc(&psi.amplitudes).norm_sqr())
        .collect())
}

/// `<bra|O|ket>`.
pub fn matrix_element(bra: &StateVector, op: &ComplexMatrix, ket: &StateVector) -> Result<C64> {
    check_dim(op.dim(), bra.dim())?;
    check_dim(op.dim(), ket.dim())?;
    Ok(bra.amplitudes.dotc(&(&op.0 * &ket.amplitudes)))
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
