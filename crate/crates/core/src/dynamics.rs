//! Time evolution, phase-inversion comparisons and the checkerboard
//! structure of resonant even-level loops.
//!
//! All evolution is exact: states are propagated through the spectral
//! decomposition, `U(t) = sum_k exp(-i lambda_k t) |v_k><v_k|`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::drive::{build, build_diamond, conjugate_phase, DiamondDrive, DriveConfig};
use crate::error::{Error, Result};
use crate::operator::{
    c, check_dim, eig_hermitian, populations, ComplexMatrix, HermitianOperator, OrthonormalBasis,
    SpectralDecomposition, StateVector, C64,
};

/// Populations equal within this bound count as phase-symmetric.
pub const DEFAULT_PHASE_THRESHOLD: f64 = 1e-9;
/// Uniform sampling used by the figure presets.
pub const DEFAULT_POINTS: usize = 1001;
pub const DEFAULT_T_END: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub t_start: f64,
    pub t_end: f64,
    pub n_points: usize,
}

impl TimeGrid {
    pub fn new(t_start: f64, t_end: f64, n_points: usize) -> Result<Self> {
        if !(t_start.is_finite() && t_end.is_finite()) {
            return Err(Error::param("grid", "time bounds must be finite"));
        }
        if !(t_end > t_start) {
            return Err(Error::param(
                "grid",
                format!("t_end ({t_end}) must be greater than t_start ({t_start})"),
            ));
        }
        if n_points < 2 {
            return Err(Error::param(
                "grid",
                format!("n_points = {n_points}, need at least 2"),
            ));
        }
        Ok(Self {
            t_start,
            t_end,
            n_points,
        })
    }

    /// `[0, 0.5]` with 1001 points.
    pub fn figure_default() -> Self {
        Self::new(0.0, DEFAULT_T_END, DEFAULT_POINTS).expect("valid default grid")
    }

    pub fn step(&self) -> f64 {
        (self.t_end - self.t_start) / (self.n_points - 1) as f64
    }

    /// `k`-th point; the last point is exactly `t_end`.
    pub fn at(&self, k: usize) -> f64 {
        if k + 1 == self.n_points {
            self.t_end
        } else {
            self.t_start + k as f64 * self.step()
        }
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n_points).map(|k| self.at(k)).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub grid: TimeGrid,
    pub basis_labels: Vec<String>,
    /// `populations[k][i]` at time `grid.at(k)` on basis state `i`.
    pub populations: Vec<Vec<f64>>,
    /// Natural-basis amplitudes, when requested.
    pub amplitudes: Option<Vec<Vec<C64>>>,
}

impl Trajectory {
    pub fn times(&self) -> Vec<f64> {
        self.grid.points()
    }

    pub fn column(&self, i: usize) -> Vec<f64> {
        self.populations.iter().map(|row| row[i]).collect()
    }

    /// Index of the most populated basis state at each time, with consecutive
    /// repeats collapsed. Describes circulation, e.g. `[0, 1, 2, 0, ...]`.
    pub fn dominant_sequence(&self) -> Vec<usize> {
        let mut seq: Vec<usize> = Vec::new();
        for row in &self.populations {
            let top = row
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.total_cmp(b.1))
                .map(|(i, _)| i)
                .unwrap_or(0);
            if seq.last() != Some(&top) {
                seq.push(top);
            }
        }
        seq
    }
}

fn run(
    decomposition: &SpectralDecomposition,
    psi0: &StateVector,
    grid: &TimeGrid,
    basis: &OrthonormalBasis,
    keep_amplitudes: bool,
) -> Result<Trajectory> {
    check_dim(decomposition.dim(), psi0.dim())?;
    check_dim(decomposition.dim(), basis.dim())?;
    let mut pops = Vec::with_capacity(grid.n_points);
    let mut amps = keep_amplitudes.then(|| Vec::with_capacity(grid.n_points));
    for t in grid.points() {
        let psi = decomposition.evolve(psi0, t)?;
        pops.push(populations(&psi, basis)?);
        if let Some(a) = amps.as_mut() {
            a.push(psi.to_vec());
        }
    }
    Ok(Trajectory {
        grid: *grid,
        basis_labels: basis.labels().to_vec(),
        populations: pops,
        amplitudes: amps,
    })
}

/// `populations[k][i] = |<b_i|U(t_k)|psi0>|^2`.
pub fn evolve(
    h: &HermitianOperator,
    psi0: &StateVector,
    grid: &TimeGrid,
    basis: &OrthonormalBasis,
) -> Result<Trajectory> {
    run(&eig_hermitian(h)?, psi0, grid, basis, false)
}

pub fn evolve_with_amplitudes(
    h: &HermitianOperator,
    psi0: &StateVector,
    grid: &TimeGrid,
    basis: &OrthonormalBasis,
) -> Result<Trajectory> {
    run(&eig_hermitian(h)?, psi0, grid, basis, true)
}

/// How the `-Phi` run is set up relative to the `+Phi` run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseFrame {
    /// Same initial state and measurement basis for both signs.
    #[default]
    Fixed,
    /// The `-Phi` run starts from `psi0*` and measures in the conjugated
    /// basis, i.e. the `+-` sign variants of complex reference states.
    /// Identical to `Fixed` when `psi0` and the basis are real.
    Conjugated,
}

impl PhaseFrame {
    pub fn as_str(self) -> &'static str {
        match self {
            PhaseFrame::Fixed => "fixed",
            PhaseFrame::Conjugated => "conjugated",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PhaseSymmetryReport {
    /// `max_{k,i} |P+_i(t_k) - P-_i(t_k)|`.
    pub max_pop_deviation: f64,
    pub symmetric: bool,
    pub per_state_deviation: Vec<f64>,
    pub threshold: f64,
}

impl PhaseSymmetryReport {
    pub fn compare(plus: &Trajectory, minus: &Trajectory, threshold: f64) -> Self {
        let dim = plus.basis_labels.len();
        let mut per_state = vec![0.0_f64; dim];
        for (a, b) in plus.populations.iter().zip(&minus.populations) {
            for i in 0..dim {
                per_state[i] = per_state[i].max((a[i] - b[i]).abs());
            }
        }
        let max_pop_deviation = per_state.iter().copied().fold(0.0, f64::max);
        Self {
            max_pop_deviation,
            symmetric: max_pop_deviation < threshold,
            per_state_deviation: per_state,
            threshold,
        }
    }
}

/// Both trajectories of a `+-Phi` comparison together with the report.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseComparison {
    pub plus: Trajectory,
    pub minus: Trajectory,
    pub report: PhaseSymmetryReport,
}

pub fn phase_comparison(
    config: &DriveConfig,
    psi0: &StateVector,
    grid: &TimeGrid,
    basis: &OrthonormalBasis,
    threshold: f64,
    frame: PhaseFrame,
) -> Result<PhaseComparison> {
    let plus = evolve(&build(config), psi0, grid, basis)?;
    let h_minus = build(&conjugate_phase(config));
    let minus = match frame {
        PhaseFrame::Fixed => evolve(&h_minus, psi0, grid, basis)?,
        PhaseFrame::Conjugated => evolve(&h_minus, &psi0.conj(), grid, &basis.conj())?,
    };
    let report = PhaseSymmetryReport::compare(&plus, &minus, threshold);
    Ok(PhaseComparison {
        plus,
        minus,
        report,
    })
}

/// Evolves under `build(config)` and `build(conjugate_phase(config))` and
/// compares the populations.
pub fn phase_symmetry_check(
    config: &DriveConfig,
    psi0: &StateVector,
    grid: &TimeGrid,
    basis: &OrthonormalBasis,
    threshold: f64,
    frame: PhaseFrame,
) -> Result<PhaseSymmetryReport> {
    Ok(phase_comparison(config, psi0, grid, basis, threshold, frame)?.report)
}

#[derive(Clone, Debug, PartialEq)]
pub struct FidelitySeries {
    pub grid: TimeGrid,
    pub values: Vec<f64>,
}

struct PhasePair {
    plus: SpectralDecomposition,
    minus: SpectralDecomposition,
}

impl PhasePair {
    fn new(config: &DriveConfig) -> Result<Self> {
        Ok(Self {
            plus: eig_hermitian(&build(config))?,
            minus: eig_hermitian(&build(&conjugate_phase(config)))?,
        })
    }

    fn fidelity(&self, psi0: &StateVector, t: f64) -> Result<f64> {
        let a = self.minus.evolve(psi0, t)?;
        let b = self.plus.evolve(psi0, t)?;
        Ok(a.inner(&b)?.norm_sqr())
    }
}

/// `F(t) = |<psi_-Phi(t)|psi_+Phi(t)>|^2` from a common initial state.
pub fn fidelity_series(
    config: &DriveConfig,
    psi0: &StateVector,
    grid: &TimeGrid,
) -> Result<FidelitySeries> {
    check_dim(config.dim(), psi0.dim())?;
    let pair = PhasePair::new(config)?;
    let values = grid
        .points()
        .into_iter()
        .map(|t| pair.fidelity(psi0, t))
        .collect::<Result<Vec<_>>>()?;
    Ok(FidelitySeries {
        grid: *grid,
        values,
    })
}

/// Highest fidelity revival after the start of the grid: every interior
/// local maximum of the sampled series is refined by golden-section search.
/// Returns `(t, F(t))`, or `None` when the series has no interior maximum.
pub fn best_fidelity_revival(
    config: &DriveConfig,
    psi0: &StateVector,
    grid: &TimeGrid,
) -> Result<Option<(f64, f64)>> {
    let series = fidelity_series(config, psi0, grid)?;
    let pair = PhasePair::new(config)?;
    let f = |t: f64| pair.fidelity(psi0, t).unwrap_or(f64::NAN);
    let v = &series.values;
    let mut best: Option<(f64, f64)> = None;
    for k in 1..v.len() {
        let rising = v[k] >= v[k - 1];
        let falling = k + 1 == v.len() || v[k] >= v[k + 1];
        if !(rising && falling) {
            continue;
        }
        let lo = grid.at(k - 1);
        let hi = if k + 1 < v.len() {
            grid.at(k + 1)
        } else {
            grid.at(k)
        };
        let candidate = golden_max(&f, lo, hi);
        let candidate = if candidate.1 >= v[k] {
            candidate
        } else {
            (grid.at(k), v[k])
        };
        if best.is_none_or(|b| candidate.1 > b.1) {
            best = Some(candidate);
        }
    }
    Ok(best)
}

fn golden_max(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let inv_phi = (5.0_f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..200 {
        if (b - a).abs() < 1e-15 * (1.0 + a.abs()) {
            break;
        }
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        }
    }
    if f1 > f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// `<bra|rho(t)|ket> + <ket|rho(t)|bra>` for `rho(t) = |psi(t)><psi(t)|`
/// evolved under `build(config)`.
pub fn coherence_series(
    config: &DriveConfig,
    psi0: &StateVector,
    grid: &TimeGrid,
    bra: &StateVector,
    ket: &StateVector,
) -> Result<Vec<C64>> {
    check_dim(config.dim(), psi0.dim())?;
    check_dim(config.dim(), bra.dim())?;
    check_dim(config.dim(), ket.dim())?;
    let decomposition = eig_hermitian(&build(config))?;
    grid.points()
        .into_iter()
        .map(|t| {
            let psi = decomposition.evolve(psi0, t)?;
            let a = bra.inner(&psi)?;
            let b = ket.inner(&psi)?;
            Ok(a * b.conj() + b * a.conj())
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckerboardClass {
    /// Zero wherever `i + j` is even.
    Odd,
    /// Zero wherever `i + j` is odd.
    Even,
    Neither,
}

impl CheckerboardClass {
    pub fn as_str(self) -> &'static str {
        match self {
            CheckerboardClass::Odd => "odd",
            CheckerboardClass::Even => "even",
            CheckerboardClass::Neither => "neither",
        }
    }
}

/// A matrix satisfying both conditions (the zero matrix) reports `Even`.
pub fn checkerboard_class(m: &ComplexMatrix, tol: f64) -> CheckerboardClass {
    let n = m.dim();
    let vanishes_where = |parity: usize| {
        (1..=n).all(|i| (1..=n).all(|j| (i + j) % 2 != parity || m.entry(i, j).norm() <= tol))
    };
    if vanishes_where(1) {
        CheckerboardClass::Even
    } else if vanishes_where(0) {
        CheckerboardClass::Odd
    } else {
        CheckerboardClass::Neither
    }
}

/// `J_ij = delta_ij (-1)^(j+1)` with one-based `j`: `diag(1, -1, 1, -1, ...)`.
pub fn parity_operator(dim: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(dim, |i, j| {
        if i != j {
            C64::default()
        } else if i % 2 == 0 {
            c(1.0, 0.0)
        } else {
            c(-1.0, 0.0)
        }
    })
}

/// `max|H J + J H|`.
pub fn anticommutator_residual(m: &ComplexMatrix) -> f64 {
    let j = parity_operator(m.dim());
    let hj = m * &j;
    let jh = &j * m;
    let sum = ComplexMatrix::from_fn(m.dim(), |a, b| {
        hj.as_nalgebra()[(a, b)] + jh.as_nalgebra()[(a, b)]
    });
    sum.max_abs()
}

/// True iff the sorted spectrum is symmetric about zero within `tol` and,
/// when `H` is odd-checkerboard, `H J = -J H` within `tol`.
pub fn eigenvalue_pairing_check(h: &HermitianOperator, tol: f64) -> Result<bool> {
    let spectrum = eig_hermitian(h)?.eigenvalues;
    let n = spectrum.len();
    let paired = (0..n).all(|i| (spectrum[i] + spectrum[n - 1 - i]).abs() <= tol);
    let anticommutes = match checkerboard_class(h.matrix(), tol) {
        CheckerboardClass::Odd => anticommutator_residual(h.matrix()) <= tol,
        _ => true,
    };
    Ok(paired && anticommutes)
}

/// Closed-form `U(t)|1>` for a resonant diamond, built from the two
/// positive-energy eigenvectors `c`, `c'` (energies `l1 > l2 > 0`) and their
/// parity partners `J c`, `J c'` (energies `-l1`, `-l2`):
///
/// ```text
/// psi(t) ~ 2 (c1 cos l1 t + chi c'1 cos l2 t) |1> + 2 (c3 cos l1 t + chi c'3 cos l2 t) |3>
///        - 2i (c2 sin l1 t + chi c'2 sin l2 t) |2> - 2i (c4 sin l1 t + chi c'4 sin l2 t) |4>
/// ```
///
/// with `chi = -c3 / c'3`, rescaled so that `psi(0) = |1>` exactly.
pub fn analytic_deltazero_state(d: &DiamondDrive, t: f64) -> Result<StateVector> {
    if !d.is_resonant() {
        return Err(Error::Precondition(
            "closed-form evolution needs delta_1 = delta_3 = delta_4 = 0".into(),
        ));
    }
    let h = build_diamond(d);
    let spectrum = eig_hermitian(&h)?;
    let ev = &spectrum.eigenvalues;
    let gap_tol = 1e-9 * (1.0 + spectrum.spectral_radius());
    let (l1, l2) = (ev[3], ev[2]);
    if l2 <= gap_tol || l1 - l2 <= gap_tol {
        return Err(Error::Precondition(format!(
            "positive eigenvalues {l2:e}, {l1:e} must be nonzero and distinct"
        )));
    }
    let up1 = spectrum.eigenvectors[3].to_vec();
    let up2 = spectrum.eigenvectors[2].to_vec();
    if up2[2].norm() < 1e-12 {
        return Err(Error::Precondition(format!(
            "mixing ratio undefined: |c'_3| = {:e}",
            up2[2].norm()
        )));
    }
    let chi = -up1[2] / up2[2];
    let (cos1, sin1) = ((l1 * t).cos(), (l1 * t).sin());
    let (cos2, sin2) = ((l2 * t).cos(), (l2 * t).sin());
    let minus_2i = c(0.0, -2.0);
    let psi = [
        (up1[0] * cos1 + chi * up2[0] * cos2) * 2.0,
        minus_2i * (up1[1] * sin1 + chi * up2[1] * sin2),
        (up1[2] * cos1 + chi * up2[2] * cos2) * 2.0,
        minus_2i * (up1[3] * sin1 + chi * up2[3] * sin2),
    ];
    let at_zero = (up1[0] + chi * up2[0]) * 2.0;
    if at_zero.norm() < 1e-12 {
        return Err(Error::Precondition("expansion of |1> is singular".into()));
    }
    StateVector::new(psi.iter().map(|z| z / at_zero).collect(), "natural")
}

/// For odd-checkerboard `H` and a diagonal initial density matrix, checks
/// `diag rho(t) = diag rho(-t)` within 1e-10 on every grid point, with
/// `rho(t) = U(t) rho0 U(t)^dagger` computed exactly.
pub fn diagonal_time_symmetry_check(
    h: &HermitianOperator,
    rho0_diagonal: &[f64],
    grid: &TimeGrid,
) -> Result<bool> {
    let n = h.dim();
    if checkerboard_class(h.matrix(), 1e-12 * (1.0 + h.scale())) != CheckerboardClass::Odd {
        return Err(Error::Precondition(
            "time-inversion symmetry of the populations needs an odd-checkerboard Hamiltonian"
                .into(),
        ));
    }
    check_dim(n, rho0_diagonal.len())?;
    if rho0_diagonal.iter().any(|p| !p.is_finite() || *p < 0.0) {
        return Err(Error::param(
            "rho0",
            "diagonal entries must be finite and nonnegative",
        ));
    }
    let trace: f64 = rho0_diagonal.iter().sum();
    if (trace - 1.0).abs() > 1e-12 {
        return Err(Error::param(
            "rho0",
            format!("trace is {trace}, expected 1"),
        ));
    }
    let rho0 = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            c(rho0_diagonal[i], 0.0)
        } else {
            C64::default()
        }
    });
    let spectrum = eig_hermitian(h)?;
    let diag_at = |t: f64| -> Vec<f64> {
        let u = spectrum.propagator(t).into_nalgebra();
        let rho = &u * &rho0 * u.adjoint();
        (0..n).map(|i| rho[(i, i)].re).collect()
    };
    Ok(grid.points().into_iter().all(|t| {
        diag_at(t)
            .iter()
            .zip(diag_at(-t))
            .all(|(a, b)| (a - b).abs() <= 1e-10)
    }))
}
