//! Zero-eigenvalue (dark) states of the loop Hamiltonians.

use crate::cpt::double_dark_basis;
use crate::drive::{build_triangle, DiamondDrive, Drive, DriveConfig, TriangleDrive};
use crate::error::{Error, Result};
use crate::operator::{c, deterministic_span, eig_hermitian, HermitianOperator, StateVector, C64};
use crate::preset::preset;

/// Traces of the first `n` powers of `H`: `c[k - 1] = Tr(H^k)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CasimirSet {
    pub n: usize,
    pub c: Vec<f64>,
}

impl CasimirSet {
    /// `Tr(H^k)` for `1 <= k <= n`.
    pub fn get(&self, k: usize) -> f64 {
        self.c[k - 1]
    }
}

pub fn casimir_invariants(h: &HermitianOperator) -> CasimirSet {
    let n = h.dim();
    let m = h.matrix().as_nalgebra();
    let mut power = m.clone();
    let mut c = Vec::with_capacity(n);
    for k in 1..=n {
        if k > 1 {
            power = &power * m;
        }
        c.push(power.trace().re);
    }
    CasimirSet { n, c }
}

/// `delta_1 W23^2 + delta_3 W12^2 + W12 W23 W31 cos(Phi)`, which equals
/// `4 det H`.
pub fn dark_residual_triangle(d: &TriangleDrive) -> f64 {
    d.delta_1 * d.omega_23.powi(2)
        + d.delta_3 * d.omega_12.powi(2)
        + d.omega_12 * d.omega_23 * d.omega_31 * d.phi.cos()
}

/// Closed-form residual of the diamond, equal to `16 det H`.
pub fn dark_residual_diamond(d: &DiamondDrive) -> f64 {
    let (w12, w23, w34, w41) = (d.omega_12, d.omega_23, d.omega_34, d.omega_41);
    let (d1, d3, d4) = (d.delta_1, d.delta_3, d.delta_4);
    (w12 * w34).powi(2) + (w23 * w41).powi(2)
        - 2.0 * w12 * w23 * w34 * w41 * d.phi.cos()
        - 4.0 * d1 * d4 * w23.powi(2)
        - 4.0 * d3 * d4 * w12.powi(2)
}

#[derive(Clone, Debug, PartialEq)]
pub struct DarkStateReport {
    pub exists: bool,
    /// `det H` for [`find_dark_states`], the closed-form residual for
    /// [`dark_report`].
    pub residual: f64,
    pub dark_states: Vec<StateVector>,
    pub bright_states: Vec<StateVector>,
    pub degeneracy: usize,
    pub tolerance: f64,
}

pub fn default_dark_tolerance(spectral_radius: f64) -> f64 {
    1e-9 * (1.0 + spectral_radius)
}

/// Eigenvectors whose eigenvalue is within `tol` of zero. The default
/// tolerance is `1e-9 (1 + spectral radius)`.
pub fn find_dark_states(h: &HermitianOperator, tol: Option<f64>) -> Result<DarkStateReport> {
    let spectrum = eig_hermitian(h)?;
    let tol = tol.unwrap_or_else(|| default_dark_tolerance(spectrum.spectral_radius()));
    let mut dark = Vec::new();
    let mut bright = Vec::new();
    for (lambda, v) in spectrum.eigenvalues.iter().zip(&spectrum.eigenvectors) {
        if lambda.abs() <= tol {
            dark.push(v.amplitudes().clone());
        } else {
            bright.push(v.clone());
        }
    }
    let dark_states = deterministic_span(&dark)
        .into_iter()
        .map(|v| StateVector::normalized(v.iter().copied().collect(), "natural"))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .map(StateVector::canonical_gauge)
        .collect::<Vec<_>>();
    let bright_states = bright
        .into_iter()
        .map(|v| v.with_basis("natural"))
        .collect();
    let residual = spectrum.eigenvalues.iter().product();
    Ok(DarkStateReport {
        exists: !dark_states.is_empty(),
        residual,
        degeneracy: dark_states.len(),
        dark_states,
        bright_states,
        tolerance: tol,
    })
}

/// Like [`find_dark_states`] but reports the closed-form residual of the
/// topology (`det H` for the double-Lambda variant).
pub fn dark_report(config: &DriveConfig) -> Result<DarkStateReport> {
    let mut report = find_dark_states(&config.build(), None)?;
    match &config.drive {
        Drive::Triangle(d) => report.residual = dark_residual_triangle(d),
        Drive::Diamond(d) => report.residual = dark_residual_diamond(d),
        Drive::DoubleLambdaAlt(_) => {}
    }
    Ok(report)
}

/// Closed-form dark state(s) of a named case. Figure presets resolve to the
/// case they instantiate. Two states are returned for the double-Lambda
/// variant.
pub fn dark_state_closed_form(name: &str) -> Result<Vec<StateVector>> {
    let p = preset(name)?;
    let unnormalized: Vec<Vec<C64>> = match (p.case, &p.config.drive) {
        ("Δ-D-1" | "Δ-D-2", Drive::Triangle(d)) => {
            vec![vec![
                c(d.omega_12, 0.0),
                c(0.0, d.omega_31 * d.phi.sin()),
                c(-d.omega_12, 0.0),
            ]]
        }
        ("Δ-D-3", Drive::Triangle(d)) => {
            vec![vec![c(2.0, 0.0), c(0.0, 3.0 * d.phi.sin()), c(-1.0, 0.0)]]
        }
        ("DΛ-D-1", _) => vec![crate::preset::reference::dlambda_d1_dark()],
        ("DΛ-D-2", _) => vec![crate::preset::reference::dlambda_d2_dark()],
        ("DΛ-D-4", Drive::DoubleLambdaAlt(d)) => {
            let b = double_dark_basis(d)?;
            return Ok(vec![b.dark1, b.dark2]);
        }
        _ => return Err(Error::NoClosedForm(p.name.to_string())),
    };
    unnormalized
        .into_iter()
        .map(|v| StateVector::normalized(v, "natural"))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DetuningConstraint {
    /// `delta_1 = delta_3`.
    EqualDeltas,
    /// `delta_1 = r delta_3`.
    Ratio(f64),
}

/// Detunings `(delta_1, delta_3)` that put a triangle on the dark manifold
/// under the given constraint.
pub fn solve_dark_detunings_triangle(
    omega_12: f64,
    omega_23: f64,
    omega_31: f64,
    phi: f64,
    constraint: DetuningConstraint,
) -> Result<(f64, f64)> {
    let r = match constraint {
        DetuningConstraint::EqualDeltas => 1.0,
        DetuningConstraint::Ratio(r) if r.is_finite() => r,
        DetuningConstraint::Ratio(_) => return Err(Error::param("ratio", "must be finite")),
    };
    let denominator = r * omega_23.powi(2) + omega_12.powi(2);
    if denominator.abs() < 1e-12 * (1.0 + omega_12.powi(2) + omega_23.powi(2)) {
        return Err(Error::Precondition(
            "no solution: r W23^2 + W12^2 vanishes".into(),
        ));
    }
    let delta_3 = -omega_12 * omega_23 * omega_31 * phi.cos() / denominator;
    Ok((r * delta_3, delta_3))
}

#[derive(Clone, Debug, PartialEq)]
pub struct UnbalancedLambdaDark {
    /// Required `delta_1 - delta_3`.
    pub detuning_difference: f64,
    pub eigenvalue: f64,
    /// `(W23 |1> - W12 |3>) / W_cpt`.
    pub dark: StateVector,
    /// `max|H D - lambda D|`, present when the drive already satisfies the
    /// detuning condition.
    pub eigen_residual: Option<f64>,
}

/// Condition under which the Lambda dark state of an unbalanced triangle
/// with a real closing coupling stays an eigenvector. The closing coupling
/// enters with sign `cos(Phi) = +-1`.
pub fn unbalanced_lambda_dark(d: &TriangleDrive) -> Result<UnbalancedLambdaDark> {
    if d.omega_12 <= 0.0 || d.omega_23 <= 0.0 {
        return Err(Error::Precondition(
            "both Lambda couplings must be positive".into(),
        ));
    }
    if d.phi.sin().abs() > 1e-12 {
        return Err(Error::Precondition(format!(
            "closing coupling must be real, got Phi = {}",
            d.phi
        )));
    }
    let (w12, w23) = (d.omega_12, d.omega_23);
    let w31 = d.omega_31 * d.phi.cos().signum();
    let detuning_difference = w31 * (w23 * w23 - w12 * w12) / (2.0 * w12 * w23);
    let eigenvalue = -d.delta_1 - w31 * w12 / (2.0 * w23);
    let norm = w12.hypot(w23);
    let dark = StateVector::new(
        vec![c(w23 / norm, 0.0), C64::default(), c(-w12 / norm, 0.0)],
        "natural",
    )?;
    let scale = 1.0 + w12.max(w23).max(d.omega_31) + d.delta_1.abs().max(d.delta_3.abs());
    let satisfied = (d.delta_1 - d.delta_3 - detuning_difference).abs() <= 1e-12 * scale;
    let eigen_residual = if satisfied {
        let hd = build_triangle(d).matrix().apply(&dark)?;
        Some(
            hd.iter()
                .zip(dark.amplitudes().iter())
                .map(|(a, b)| (a - b * eigenvalue).norm())
                .fold(0.0, f64::max),
        )
    } else {
        None
    };
    Ok(UnbalancedLambdaDark {
        detuning_difference,
        eigenvalue,
        dark,
        eigen_residual,
    })
}
