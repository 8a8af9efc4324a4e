//! Rotating-frame Hamiltonians for the closed-loop triangle and diamond drives.
//!
//! Energies are referenced to `|2> = 0`; every coupling carries a factor 1/2
//! on the Rabi frequency and the loop-closing coupling carries the global
//! phase `exp(+i Phi)` above the diagonal.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{c, HermitianOperator, C64};

/// Reduces an angle into `(-pi, pi]`. Angles already in range are returned
/// bit-for-bit unchanged.
pub fn reduce_phase(phi: f64) -> f64 {
    if phi > -PI && phi <= PI {
        return phi;
    }
    let r = phi.rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

/// `exp(i phi)`, exact at `0`, `pi` and `+-pi/2` so that real Hamiltonians
/// come out with imaginary parts that are exactly zero.
pub fn unit_phase(phi: f64) -> C64 {
    if phi == 0.0 {
        c(1.0, 0.0)
    } else if phi == PI || phi == -PI {
        c(-1.0, 0.0)
    } else if phi == FRAC_PI_2 {
        c(0.0, 1.0)
    } else if phi == -FRAC_PI_2 {
        c(0.0, -1.0)
    } else {
        c(phi.cos(), phi.sin())
    }
}

fn check_rabi(name: &'static str, value: f64) -> Result<()> {
    if !value.is_finite() {
        return Err(Error::param(name, "must be finite"));
    }
    if value < 0.0 {
        return Err(Error::param(
            name,
            format!("Rabi frequency {value} is negative; encode signs in the phase"),
        ));
    }
    Ok(())
}

fn check_finite(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::param(name, "must be finite"))
    }
}

/// Three-level loop `1-2-3-1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TriangleDrive {
    pub omega_12: f64,
    pub omega_23: f64,
    pub omega_31: f64,
    #[serde(default)]
    pub delta_1: f64,
    #[serde(default)]
    pub delta_3: f64,
    #[serde(default)]
    pub phi: f64,
}

impl TriangleDrive {
    pub fn new(
        omega_12: f64,
        omega_23: f64,
        omega_31: f64,
        delta_1: f64,
        delta_3: f64,
        phi: f64,
    ) -> Result<Self> {
        Self {
            omega_12,
            omega_23,
            omega_31,
            delta_1,
            delta_3,
            phi,
        }
        .validated()
    }

    /// Checks the parameter ranges and reduces `phi` into `(-pi, pi]`.
    pub fn validated(mut self) -> Result<Self> {
        check_rabi("omega_12", self.omega_12)?;
        check_rabi("omega_23", self.omega_23)?;
        check_rabi("omega_31", self.omega_31)?;
        check_finite("delta_1", self.delta_1)?;
        check_finite("delta_3", self.delta_3)?;
        check_finite("phi", self.phi)?;
        self.phi = reduce_phase(self.phi);
        Ok(self)
    }
}

/// Four-level loop `1-2-3-4-1` (diamond / double-Lambda).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiamondDrive {
    pub omega_12: f64,
    pub omega_23: f64,
    pub omega_34: f64,
    pub omega_41: f64,
    #[serde(default)]
    pub delta_1: f64,
    #[serde(default)]
    pub delta_3: f64,
    #[serde(default)]
    pub delta_4: f64,
    #[serde(default)]
    pub phi: f64,
}

impl DiamondDrive {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        omega_12: f64,
        omega_23: f64,
        omega_34: f64,
        omega_41: f64,
        delta_1: f64,
        delta_3: f64,
        delta_4: f64,
        phi: f64,
    ) -> Result<Self> {
        Self {
            omega_12,
            omega_23,
            omega_34,
            omega_41,
            delta_1,
            delta_3,
            delta_4,
            phi,
        }
        .validated()
    }

    pub fn validated(mut self) -> Result<Self> {
        check_rabi("omega_12", self.omega_12)?;
        check_rabi("omega_23", self.omega_23)?;
        check_rabi("omega_34", self.omega_34)?;
        check_rabi("omega_41", self.omega_41)?;
        check_finite("delta_1", self.delta_1)?;
        check_finite("delta_3", self.delta_3)?;
        check_finite("delta_4", self.delta_4)?;
        check_finite("phi", self.phi)?;
        self.phi = reduce_phase(self.phi);
        Ok(self)
    }

    pub fn is_resonant(&self) -> bool {
        self.delta_1 == 0.0 && self.delta_3 == 0.0 && self.delta_4 == 0.0
    }
}

/// Double-Lambda written with the phase on both pump couplings and the zero
/// of energy on `|1>, |3>`. Pump `omega_p` drives 1-2 and 1-4, Stokes
/// `omega_s` drives 2-3 and 3-4; `|2>` and `|4>` sit at `-delta` and `+delta`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DoubleLambdaAltDrive {
    pub omega_p: f64,
    pub omega_s: f64,
    #[serde(default)]
    pub delta: f64,
    #[serde(default)]
    pub phi_small: f64,
}

impl DoubleLambdaAltDrive {
    pub fn new(omega_p: f64, omega_s: f64, delta: f64, phi_small: f64) -> Result<Self> {
        Self {
            omega_p,
            omega_s,
            delta,
            phi_small,
        }
        .validated()
    }

    pub fn validated(mut self) -> Result<Self> {
        check_rabi("omega_p", self.omega_p)?;
        check_rabi("omega_s", self.omega_s)?;
        check_finite("delta", self.delta)?;
        check_finite("phi_small", self.phi_small)?;
        self.phi_small = reduce_phase(self.phi_small);
        Ok(self)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Topology {
    Triangle,
    Diamond,
    DoubleLambdaAlt,
}

impl Topology {
    pub fn as_str(self) -> &'static str {
        match self {
            Topology::Triangle => "triangle",
            Topology::Diamond => "diamond",
            Topology::DoubleLambdaAlt => "double_lambda_alt",
        }
    }

    pub fn dim(self) -> usize {
        match self {
            Topology::Triangle => 3,
            Topology::Diamond | Topology::DoubleLambdaAlt => 4,
        }
    }
}

/// Parameters tagged by topology; the variant is the topology.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "topology", rename_all = "snake_case")]
pub enum Drive {
    Triangle(TriangleDrive),
    Diamond(DiamondDrive),
    DoubleLambdaAlt(DoubleLambdaAltDrive),
}

impl Drive {
    pub fn topology(&self) -> Topology {
        match self {
            Drive::Triangle(_) => Topology::Triangle,
            Drive::Diamond(_) => Topology::Diamond,
            Drive::DoubleLambdaAlt(_) => Topology::DoubleLambdaAlt,
        }
    }

    pub fn phase(&self) -> f64 {
        match self {
            Drive::Triangle(d) => d.phi,
            Drive::Diamond(d) => d.phi,
            Drive::DoubleLambdaAlt(d) => d.phi_small,
        }
    }

    pub fn validated(self) -> Result<Self> {
        Ok(match self {
            Drive::Triangle(d) => Drive::Triangle(d.validated()?),
            Drive::Diamond(d) => Drive::Diamond(d.validated()?),
            Drive::DoubleLambdaAlt(d) => Drive::DoubleLambdaAlt(d.validated()?),
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DriveConfig {
    pub drive: Drive,
    pub label: Option<String>,
}

impl DriveConfig {
    pub fn new(drive: Drive) -> Self {
        Self { drive, label: None }
    }

    pub fn labeled(drive: Drive, label: impl Into<String>) -> Self {
        Self {
            drive,
            label: Some(label.into()),
        }
    }

    pub fn topology(&self) -> Topology {
        self.drive.topology()
    }

    pub fn dim(&self) -> usize {
        self.topology().dim()
    }

    pub fn phase(&self) -> f64 {
        self.drive.phase()
    }

    pub fn build(&self) -> HermitianOperator {
        build(self)
    }
}

impl From<TriangleDrive> for DriveConfig {
    fn from(d: TriangleDrive) -> Self {
        DriveConfig::new(Drive::Triangle(d))
    }
}

impl From<DiamondDrive> for DriveConfig {
    fn from(d: DiamondDrive) -> Self {
        DriveConfig::new(Drive::Diamond(d))
    }
}

impl From<DoubleLambdaAltDrive> for DriveConfig {
    fn from(d: DoubleLambdaAltDrive) -> Self {
        DriveConfig::new(Drive::DoubleLambdaAlt(d))
    }
}

fn real(x: f64) -> C64 {
    c(x, 0.0)
}

pub fn build_triangle(d: &TriangleDrive) -> HermitianOperator {
    let loop_coupling = unit_phase(d.phi) * (0.5 * d.omega_31);
    HermitianOperator::from_upper(3, |i, j| match (i, j) {
        (0, 0) => real(-d.delta_1),
        (0, 1) => real(0.5 * d.omega_12),
        (0, 2) => loop_coupling,
        (1, 2) => real(0.5 * d.omega_23),
        (2, 2) => real(-d.delta_3),
        _ => C64::default(),
    })
}

pub fn build_diamond(d: &DiamondDrive) -> HermitianOperator {
    let loop_coupling = unit_phase(d.phi) * (0.5 * d.omega_41);
    HermitianOperator::from_upper(4, |i, j| match (i, j) {
        (0, 0) => real(-d.delta_1),
        (0, 1) => real(0.5 * d.omega_12),
        (0, 3) => loop_coupling,
        (1, 2) => real(0.5 * d.omega_23),
        (2, 2) => real(-d.delta_3),
        (2, 3) => real(0.5 * d.omega_34),
        (3, 3) => real(-d.delta_4),
        _ => C64::default(),
    })
}

pub fn build_double_lambda_alt(d: &DoubleLambdaAltDrive) -> HermitianOperator {
    let pump = unit_phase(d.phi_small) * (0.5 * d.omega_p);
    HermitianOperator::from_upper(4, |i, j| match (i, j) {
        (0, 1) | (0, 3) => pump,
        (1, 1) => real(-d.delta),
        (1, 2) | (2, 3) => real(0.5 * d.omega_s),
        (3, 3) => real(d.delta),
        _ => C64::default(),
    })
}

pub fn build(config: &DriveConfig) -> HermitianOperator {
    match &config.drive {
        Drive::Triangle(d) => build_triangle(d),
        Drive::Diamond(d) => build_diamond(d),
        Drive::DoubleLambdaAlt(d) => build_double_lambda_alt(d),
    }
}

/// `Phi -> -Phi`. Building the result gives the entrywise conjugate of
/// building `config`.
pub fn conjugate_phase(config: &DriveConfig) -> DriveConfig {
    let flip = |phi: f64| reduce_phase(-phi);
    let drive = match config.drive {
        Drive::Triangle(d) => Drive::Triangle(TriangleDrive {
            phi: flip(d.phi),
            ..d
        }),
        Drive::Diamond(d) => Drive::Diamond(DiamondDrive {
            phi: flip(d.phi),
            ..d
        }),
        Drive::DoubleLambdaAlt(d) => Drive::DoubleLambdaAlt(DoubleLambdaAltDrive {
            phi_small: flip(d.phi_small),
            ..d
        }),
    };
    DriveConfig {
        drive,
        label: config.label.clone(),
    }
}
