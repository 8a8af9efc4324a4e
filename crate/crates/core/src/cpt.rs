//! Bright/dark (coherent population trapping) bases and the open-loop form
//! of the closed-loop Hamiltonians.
//!
//! The CPT vectors follow the textbook sign convention
//! `|B> = (O12|1> + O23|3>)/O_cpt`, `|D> = (O23|1> - O12|3>)/O_cpt` and are
//! never re-gauged: they are definitions, not solver output.

use std::f64::consts::SQRT_2;

use crate::drive::{build_triangle, unit_phase, DiamondDrive, DoubleLambdaAltDrive, TriangleDrive};
use crate::error::{Error, Result};
use crate::operator::{c, change_basis, HermitianOperator, OrthonormalBasis, StateVector, C64};

pub const BRIGHT: &str = "BL";
pub const DARK: &str = "DL";

#[derive(Clone, Debug, PartialEq)]
pub struct CptBasis3 {
    pub bright: StateVector,
    pub dark: StateVector,
    pub excited: StateVector,
    pub omega_cpt: f64,
}

impl CptBasis3 {
    /// Ordered `(|B>, |2>, |D>)`.
    pub fn basis(&self) -> OrthonormalBasis {
        OrthonormalBasis::new(
            vec![self.bright.clone(), self.excited.clone(), self.dark.clone()],
            vec![BRIGHT.into(), "2".into(), DARK.into()],
        )
        .expect("CPT triple is orthonormal")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CptBasis4 {
    pub bright: StateVector,
    pub excited2: StateVector,
    pub dark: StateVector,
    pub state4: StateVector,
    pub omega_cpt: f64,
}

impl CptBasis4 {
    /// Ordered `(|B>, |2>, |D>, |4>)`.
    pub fn basis(&self) -> OrthonormalBasis {
        OrthonormalBasis::new(
            vec![
                self.bright.clone(),
                self.excited2.clone(),
                self.dark.clone(),
                self.state4.clone(),
            ],
            vec![BRIGHT.into(), "2".into(), DARK.into(), "4".into()],
        )
        .expect("CPT quadruple is orthonormal")
    }
}

fn omega_cpt(omega_12: f64, omega_23: f64) -> Result<f64> {
    let w = omega_12.hypot(omega_23);
    if !(w > 0.0) || !w.is_finite() {
        return Err(Error::param(
            "omega_12/omega_23",
            "CPT basis needs at least one nonzero Lambda coupling",
        ));
    }
    Ok(w)
}

fn real_state(components: &[f64], basis: &str) -> StateVector {
    StateVector::new(components.iter().map(|&x| c(x, 0.0)).collect(), basis)
        .expect("components are normalized")
}

pub fn cpt_states(omega_12: f64, omega_23: f64) -> Result<CptBasis3> {
    let w = omega_cpt(omega_12, omega_23)?;
    let (a, b) = (omega_12 / w, omega_23 / w);
    Ok(CptBasis3 {
        bright: real_state(&[a, 0.0, b], "natural"),
        dark: real_state(&[b, 0.0, -a], "natural"),
        excited: StateVector::basis_state(3, 2),
        omega_cpt: w,
    })
}

pub fn cpt_states_4(omega_12: f64, omega_23: f64) -> Result<CptBasis4> {
    let w = omega_cpt(omega_12, omega_23)?;
    let (a, b) = (omega_12 / w, omega_23 / w);
    Ok(CptBasis4 {
        bright: real_state(&[a, 0.0, b, 0.0], "natural"),
        excited2: StateVector::basis_state(4, 2),
        dark: real_state(&[b, 0.0, -a, 0.0], "natural"),
        state4: StateVector::basis_state(4, 4),
        omega_cpt: w,
    })
}

fn equal_detunings(delta_1: f64, delta_3: f64) -> Result<f64> {
    let scale = 1.0_f64.max(delta_1.abs()).max(delta_3.abs());
    if (delta_1 - delta_3).abs() > 1e-12 * scale {
        return Err(Error::Precondition(format!(
            "the CPT transformation needs delta_1 == delta_3 (got {delta_1} and {delta_3})"
        )));
    }
    Ok(delta_1)
}

/// Triangle Hamiltonian in the `(|B>, |2>, |D>)` basis.
///
/// With `omega_12 == omega_23` the closed-form matrix is assembled directly:
/// diagonal `(-d + O31 cos(Phi)/2, 0, -d - O31 cos(Phi)/2)`, `B-2` coupling
/// `O/sqrt(2)` and `B-D` coupling `-i O31 sin(Phi)/2`. Unbalanced drives go
/// through a basis change with the unbalanced CPT states.
pub fn to_cpt_hamiltonian_3(d: &TriangleDrive) -> Result<HermitianOperator> {
    let delta = equal_detunings(d.delta_1, d.delta_3)?;
    let cpt = cpt_states(d.omega_12, d.omega_23)?;
    if d.omega_12 != d.omega_23 {
        return change_basis(&build_triangle(d), &cpt.basis());
    }
    let phase = unit_phase(d.phi);
    let half_loop = 0.5 * d.omega_31;
    let (cos, sin) = (phase.re, phase.im);
    Ok(HermitianOperator::from_upper(3, |i, j| match (i, j) {
        (0, 0) => c(-delta + half_loop * cos, 0.0),
        (0, 1) => c(d.omega_12 / SQRT_2, 0.0),
        (0, 2) => c(0.0, -half_loop * sin),
        (2, 2) => c(-delta - half_loop * cos, 0.0),
        _ => C64::default(),
    }))
}

/// Diamond Hamiltonian in the `(|B>, |2>, |D>, |4>)` basis. Only `|4>`
/// couples to both CPT states, so the loop is open.
pub fn to_cpt_hamiltonian_4(d: &DiamondDrive) -> Result<HermitianOperator> {
    let delta = equal_detunings(d.delta_1, d.delta_3)?;
    let w = omega_cpt(d.omega_12, d.omega_23)?;
    let loop41 = unit_phase(d.phi) * d.omega_41;
    let bright_4 = (loop41 * d.omega_12 + c(d.omega_23 * d.omega_34, 0.0)) / (2.0 * w);
    let dark_4 = (loop41 * d.omega_23 - c(d.omega_12 * d.omega_34, 0.0)) / (2.0 * w);
    Ok(HermitianOperator::from_upper(4, |i, j| match (i, j) {
        (0, 0) | (2, 2) => c(-delta, 0.0),
        (0, 1) => c(0.5 * w, 0.0),
        (0, 3) => bright_4,
        (2, 3) => dark_4,
        (3, 3) => c(-d.delta_4, 0.0),
        _ => C64::default(),
    }))
}

/// Bright state and the two zero-energy dark states of the phase-split
/// double-Lambda drive.
#[derive(Clone, Debug, PartialEq)]
pub struct DoubleDarkBasis {
    pub bright: StateVector,
    pub dark1: StateVector,
    pub dark2: StateVector,
    /// Normalization of `dark2`, `O_dl * sqrt(4 delta^2 + 2 O_dl^2)`.
    pub theta: f64,
    /// `sqrt(O_p^2 + O_s^2)`.
    pub omega_dl: f64,
}

/// `bright` is the ground-state combination that couples to `|2>`; it is
/// orthogonal to `dark1` always and to `dark2` only at `delta = 0` (for
/// `delta != 0`, `dark2` carries a ground-state component along `bright`).
pub fn double_dark_basis(d: &DoubleLambdaAltDrive) -> Result<DoubleDarkBasis> {
    let w = d.omega_p.hypot(d.omega_s);
    if !(w > 0.0) || !w.is_finite() {
        return Err(Error::param(
            "omega_p/omega_s",
            "total Rabi frequency is zero",
        ));
    }
    let phase = unit_phase(d.phi_small);
    let bright = StateVector::new(
        vec![
            phase * (d.omega_p / w),
            C64::default(),
            c(d.omega_s / w, 0.0),
            C64::default(),
        ],
        "natural",
    )?;
    let dark1 = StateVector::new(
        vec![
            phase * (d.omega_s / w),
            C64::default(),
            c(-d.omega_p / w, 0.0),
            C64::default(),
        ],
        "natural",
    )?;
    let w2 = w * w;
    let theta = w * (4.0 * d.delta * d.delta + 2.0 * w2).sqrt();
    let dark2 = StateVector::new(
        vec![
            phase * (2.0 * d.delta * d.omega_p / theta),
            c(w2 / theta, 0.0),
            c(2.0 * d.delta * d.omega_s / theta, 0.0),
            c(-w2 / theta, 0.0),
        ],
        "natural",
    )?;
    Ok(DoubleDarkBasis {
        bright,
        dark1,
        dark2,
        theta,
        omega_dl: w,
    })
}

/// True iff the graph with an edge wherever `|H_ij| > tol` (`i != j`) has no
/// cycle. `tol` defaults to `1e-10 * (1 + max|H_ij|)`.
pub fn coupling_graph_is_open(h: &HermitianOperator, tol: Option<f64>) -> bool {
    let tol = tol.unwrap_or_else(|| 1e-10 * (1.0 + h.scale()));
    let n = h.dim();
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(parent: &mut [usize], mut k: usize) -> usize {
        while parent[k] != k {
            parent[k] = parent[parent[k]];
            k = parent[k];
        }
        k
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if h.entry(i + 1, j + 1).norm() <= tol {
                continue;
            }
            let (ri, rj) = (root(&mut parent, i), root(&mut parent, j));
            if ri == rj {
                return false;
            }
            parent[ri] = rj;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::drive::build_diamond;
    use crate::operator::eig_hermitian;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_3};

    fn assert_state(v: &StateVector, want: &[f64]) {
        for (k, w) in want.iter().enumerate() {
            assert!(
                (v.amplitude(k + 1) - c(*w, 0.0)).norm() < 1e-15,
                "{v:?} vs {want:?}"
            );
        }
    }

    #[test]
    fn balanced_cpt_states() {
        let b = cpt_states(2.5, 2.5).unwrap();
        assert_state(&b.bright, &[FRAC_1_SQRT_2, 0.0, FRAC_1_SQRT_2]);
        assert_state(&b.dark, &[FRAC_1_SQRT_2, 0.0, -FRAC_1_SQRT_2]);
    }

    #[test]
    fn limiting_and_pythagorean_cpt_states() {
        let b = cpt_states(1.0, 0.0).unwrap();
        assert_state(&b.bright, &[1.0, 0.0, 0.0]);
        assert_state(&b.dark, &[0.0, 0.0, -1.0]);
        let b = cpt_states(3.0, 4.0).unwrap();
        assert_state(&b.bright, &[0.6, 0.0, 0.8]);
        assert_eq!(b.omega_cpt, 5.0);
        assert!(cpt_states(0.0, 0.0).is_err());
    }

    #[test]
    fn balanced_literal_matches_basis_change() {
        let d = TriangleDrive::new(1.7, 1.7, 0.6, -0.3, -0.3, 1.1).unwrap();
        let literal = to_cpt_hamiltonian_3(&d).unwrap();
        let rotated =
            change_basis(&build_triangle(&d), &cpt_states(1.7, 1.7).unwrap().basis()).unwrap();
        assert!(literal.matrix().max_abs_diff(rotated.matrix()) < 1e-14);
    }

    #[test]
    fn cpt3_special_phases() {
        let zero = TriangleDrive::new(1.0, 1.0, 1.0, 0.2, 0.2, 0.0).unwrap();
        let h = to_cpt_hamiltonian_3(&zero).unwrap();
        assert_eq!(h.entry(1, 3), C64::default());
        assert_eq!(h.entry(2, 3), C64::default());
        let quarter = TriangleDrive::new(1.0, 1.0, 1.0, 0.2, 0.2, FRAC_PI_2).unwrap();
        let h = to_cpt_hamiltonian_3(&quarter).unwrap();
        assert_eq!(h.entry(1, 1), c(-0.2, 0.0));
        assert_eq!(h.entry(3, 3), c(-0.2, 0.0));
    }

    #[test]
    fn unequal_detunings_rejected() {
        let d = TriangleDrive::new(1.0, 1.0, 1.0, 0.2, 0.1, FRAC_PI_3).unwrap();
        assert!(matches!(
            to_cpt_hamiltonian_3(&d),
            Err(Error::Precondition(_))
        ));
        let d4 = DiamondDrive::new(1.0, 1.0, 1.0, 1.0, 0.2, 0.1, 0.0, 0.0).unwrap();
        assert!(matches!(
            to_cpt_hamiltonian_4(&d4),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn cpt4_literal_matches_basis_change() {
        let d = DiamondDrive::new(1.3, 0.4, 2.2, 0.9, 0.5, 0.5, -0.8, 2.0).unwrap();
        let literal = to_cpt_hamiltonian_4(&d).unwrap();
        let rotated =
            change_basis(&build_diamond(&d), &cpt_states_4(1.3, 0.4).unwrap().basis()).unwrap();
        assert!(literal.matrix().max_abs_diff(rotated.matrix()) < 1e-14);
        assert!(coupling_graph_is_open(&literal, None));
        assert!(!coupling_graph_is_open(&build_diamond(&d), None));
    }

    #[test]
    fn cpt4_decouplings_at_real_phase() {
        // Phi = 0 with O12 O34 = O23 O41: the dark state decouples from |4>
        let d = DiamondDrive::new(1.0, 2.0, 2.0, 1.0, 0.3, 0.3, 0.7, 0.0).unwrap();
        let h = to_cpt_hamiltonian_4(&d).unwrap();
        assert!(h.entry(3, 4).norm() < 1e-15);
        // Phi = pi with O23 O34 = O12 O41: the bright state decouples from |4>
        let d = DiamondDrive::new(1.0, 2.0, 1.0, 2.0, 0.3, 0.3, 0.7, std::f64::consts::PI).unwrap();
        let h = to_cpt_hamiltonian_4(&d).unwrap();
        assert!(h.entry(1, 4).norm() < 1e-15);
    }

    #[test]
    fn cpt4_spectrum_is_preserved() {
        let d = DiamondDrive::new(0.7, 1.9, 1.1, 2.4, -0.4, -0.4, 1.2, -2.2).unwrap();
        let a = eig_hermitian(&build_diamond(&d)).unwrap().eigenvalues;
        let b = eig_hermitian(&to_cpt_hamiltonian_4(&d).unwrap())
            .unwrap()
            .eigenvalues;
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn double_dark_resonant_symmetric() {
        let b = double_dark_basis(&DoubleLambdaAltDrive::new(1.0, 1.0, 0.0, 0.0).unwrap()).unwrap();
        assert_state(&b.dark2, &[0.0, FRAC_1_SQRT_2, 0.0, -FRAC_1_SQRT_2]);
    }

    #[test]
    fn double_dark_detuned_example() {
        let b = double_dark_basis(&DoubleLambdaAltDrive::new(1.0, 1.0, 1.0, 0.0).unwrap()).unwrap();
        assert!((b.theta - 4.0).abs() < 1e-15);
        assert_state(&b.dark2, &[0.5, 0.5, 0.5, -0.5]);
    }

    #[test]
    fn triangle_graph_is_closed() {
        let h = build_triangle(&TriangleDrive::new(1.0, 1.0, 1.0, 0.0, 0.0, 0.3).unwrap());
        assert!(!coupling_graph_is_open(&h, None));
        let cpt = to_cpt_hamiltonian_3(&TriangleDrive::new(1.0, 1.0, 1.0, 0.0, 0.0, 0.3).unwrap())
            .unwrap();
        assert!(coupling_graph_is_open(&cpt, None));
    }
}
