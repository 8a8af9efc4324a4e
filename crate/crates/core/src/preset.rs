//! Named drive configurations with their reference states and measurement
//! bases.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, PI, SQRT_2};

use crate::cpt::{cpt_states, cpt_states_4};
use crate::drive::{DiamondDrive, DoubleLambdaAltDrive, Drive, DriveConfig, TriangleDrive};
use crate::dynamics::PhaseFrame;
use crate::error::{Error, Result};
use crate::operator::{OrthonormalBasis, StateVector};

/// Reference bright and dark vectors in the natural basis.
pub mod reference {
    use crate::operator::{c, OrthonormalBasis, StateVector, C64};

    fn unit_phase_deg(deg: f64) -> C64 {
        C64::from_polar(1.0, deg.to_radians())
    }

    fn state(v: Vec<C64>) -> StateVector {
        StateVector::normalized(v, "natural")
            .expect("reference vector is nonzero")
            .canonical_gauge()
    }

    fn labels(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    pub fn delta_d1_dark() -> Vec<C64> {
        vec![c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0)]
    }

    /// `(D, B1, B2)` for the triangle with `Phi = pi/2`, zero detunings.
    pub fn delta_d1_basis() -> OrthonormalBasis {
        OrthonormalBasis::new(
            vec![
                state(delta_d1_dark()),
                state(vec![c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]),
                state(vec![c(1.0, 0.0), c(0.0, -2.0), c(-1.0, 0.0)]),
            ],
            labels(&["D", "B1", "B2"]),
        )
        .expect("orthonormal")
    }

    pub fn delta_d2_dark() -> Vec<C64> {
        vec![c(2.0, 0.0), c(0.0, 3f64.sqrt()), c(-2.0, 0.0)]
    }

    /// `(D, B1, B2)` for the triangle with `Phi = pi/3`, `delta = -Omega/4`.
    pub fn delta_d2_basis() -> OrthonormalBasis {
        let s3 = 3f64.sqrt();
        OrthonormalBasis::new(
            vec![
                state(delta_d2_dark()),
                state(vec![c(s3, 0.0), c(0.0, -2.0), c(0.0, 0.0)]),
                state(vec![c(4.0, 0.0), c(0.0, 2.0 * s3), c(7.0, 0.0)]),
            ],
            labels(&["D", "B1", "B2"]),
        )
        .expect("orthonormal")
    }

    pub fn dlambda_d1_dark() -> Vec<C64> {
        let s3 = 3f64.sqrt();
        vec![
            c(1.0, 0.0),
            c(0.0, 2.0 * s3),
            c(-1.0, 0.0),
            c(-2.0, -2.0 * s3),
        ]
    }

    /// `(D, B1, B2, B3)` for the diamond with `Phi = pi/3`,
    /// `delta_1 = delta_3 = Omega`, `delta_4 = Omega/8`.
    pub fn dlambda_d1_basis() -> OrthonormalBasis {
        let one = c(1.0, 0.0);
        OrthonormalBasis::new(
            vec![
                state(dlambda_d1_dark()),
                state(vec![
                    c(0.0, 0.0),
                    c(2.0, 0.0),
                    c(0.0, 0.0),
                    one + unit_phase_deg(-60.0),
                ]),
                state(vec![one, c(0.0, 0.0), one, c(0.0, 0.0)]),
                state(vec![
                    unit_phase_deg(120.0) * 7.0,
                    one + unit_phase_deg(60.0),
                    unit_phase_deg(120.0) * -7.0,
                    c(-2.0, 0.0),
                ]),
            ],
            labels(&["D", "B1", "B2", "B3"]),
        )
        .expect("orthonormal")
    }

    pub fn dlambda_d2_dark() -> Vec<C64> {
        vec![c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BasisKind {
    Natural,
    Cpt,
    Table,
}

impl BasisKind {
    pub fn as_str(self) -> &'static str {
        match self {
            BasisKind::Natural => "natural",
            BasisKind::Cpt => "cpt",
            BasisKind::Table => "table1",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Preset {
    pub name: &'static str,
    /// Named case whose parameter family this preset instantiates.
    pub case: &'static str,
    pub config: DriveConfig,
    /// Labeled initial states; the first one is the default.
    pub states: Vec<(String, StateVector)>,
    pub measurement: OrthonormalBasis,
    pub measurement_kind: BasisKind,
    pub frame: PhaseFrame,
    /// Bra/ket labels for the coherence series.
    pub coherence_pair: Option<(&'static str, &'static str)>,
    pub parameters: &'static str,
    pub purpose: &'static str,
}

impl Preset {
    pub fn initial_state(&self) -> &StateVector {
        &self.states[0].1
    }

    /// Looks up a labeled state: preset states first, then the measurement
    /// basis, then natural levels `"1"`..`"n"`.
    pub fn state(&self, label: &str) -> Option<StateVector> {
        if let Some((_, s)) = self.states.iter().find(|(l, _)| l == label) {
            return Some(s.clone());
        }
        if let Some(s) = self.measurement.get(label) {
            return Some(s.clone());
        }
        let dim = self.config.dim();
        match label.parse::<usize>() {
            Ok(k) if (1..=dim).contains(&k) => Some(StateVector::basis_state(dim, k)),
            _ => None,
        }
    }

    pub fn table_basis(&self) -> Option<OrthonormalBasis> {
        table_basis(self.case)
    }
}

/// Bright/dark reference basis of a named case, if one is tabulated.
pub fn table_basis(case: &str) -> Option<OrthonormalBasis> {
    match case {
        "Δ-D-1" => Some(reference::delta_d1_basis()),
        "Δ-D-2" => Some(reference::delta_d2_basis()),
        "DΛ-D-1" => Some(reference::dlambda_d1_basis()),
        _ => None,
    }
}

/// CPT basis built from the `1-2` and `2-3` couplings of a triangle or diamond.
pub fn cpt_basis_for(config: &DriveConfig) -> Result<OrthonormalBasis> {
    match &config.drive {
        Drive::Triangle(d) => Ok(cpt_states(d.omega_12, d.omega_23)?.basis()),
        Drive::Diamond(d) => Ok(cpt_states_4(d.omega_12, d.omega_23)?.basis()),
        Drive::DoubleLambdaAlt(_) => Err(Error::Precondition(
            "no CPT basis is defined for the double-Lambda variant".into(),
        )),
    }
}

pub const PRESET_NAMES: [&str; 20] = [
    "Δ-D-1",
    "Δ-D-2",
    "Δ-D-3",
    "DΛ-D-1",
    "DΛ-D-2",
    "DΛ-D-3",
    "DΛ-D-4",
    "Δ-0Φ-1",
    "Δ-0Φ-2",
    "DΛ-0Φ-1",
    "DΛ-0Φ-2",
    "fig2a",
    "fig2b",
    "fig2c",
    "fig3a",
    "fig3b",
    "fig4a",
    "fig4b",
    "fig4c",
    "fig5",
];

fn normalize(name: &str) -> String {
    name.replace('Δ', "delta")
        .replace('Λ', "lambda")
        .replace('Φ', "phi")
        .to_lowercase()
        .chars()
        .filter(|ch| ch.is_ascii_alphanumeric())
        .collect()
}

/// Resolves a preset by name. ASCII spellings such as `Delta-D-1`,
/// `DLambda-D-2` or `Delta-0Phi-1` are accepted.
pub fn preset(name: &str) -> Result<Preset> {
    let key = normalize(name);
    let canonical = PRESET_NAMES
        .iter()
        .find(|n| normalize(n) == key)
        .ok_or_else(|| Error::UnknownPreset {
            name: name.to_string(),
            valid: PRESET_NAMES.iter().map(|s| s.to_string()).collect(),
        })?;
    Ok(build_preset(canonical))
}

pub fn all_presets() -> Vec<Preset> {
    PRESET_NAMES.iter().map(|n| build_preset(n)).collect()
}

/// One line per preset: name, topology, parameters and purpose.
pub fn list_presets() -> String {
    let mut out = String::new();
    for p in all_presets() {
        out.push_str(&format!(
            "{:<9} {:<17} {}  ({})\n",
            p.name,
            p.config.topology().as_str(),
            p.parameters,
            p.purpose
        ));
    }
    out
}

fn tri(o12: f64, o23: f64, o31: f64, d1: f64, d3: f64, phi: f64) -> DriveConfig {
    TriangleDrive::new(o12, o23, o31, d1, d3, phi)
        .expect("valid preset")
        .into()
}

#[allow(clippy::too_many_arguments)]
fn dia(o12: f64, o23: f64, o34: f64, o41: f64, d1: f64, d3: f64, d4: f64, phi: f64) -> DriveConfig {
    DiamondDrive::new(o12, o23, o34, o41, d1, d3, d4, phi)
        .expect("valid preset")
        .into()
}

fn labeled(config: DriveConfig, name: &str) -> DriveConfig {
    DriveConfig::labeled(config.drive, name)
}

struct PresetDef {
    case: &'static str,
    config: DriveConfig,
    states: &'static [&'static str],
    kind: BasisKind,
    frame: PhaseFrame,
    coherence_pair: Option<(&'static str, &'static str)>,
    parameters: &'static str,
    purpose: &'static str,
}

fn definition(name: &str) -> PresetDef {
    let natural = |case, config, states, parameters, purpose| PresetDef {
        case,
        config,
        states,
        kind: BasisKind::Natural,
        frame: PhaseFrame::Fixed,
        coherence_pair: None,
        parameters,
        purpose,
    };
    match name {
        "Δ-D-1" => PresetDef {
            kind: BasisKind::Table,
            ..natural(
                "Δ-D-1",
                tri(1.0, 1.0, 1.0, 0.0, 0.0, FRAC_PI_2),
                &["DL", "1", "D", "B1", "B2"],
                "Ω12=Ω23=Ω31=Ω=1, δ1=δ3=0, Φ=π/2",
                "resonant triangle with dark state [1, i, -1]/√3",
            )
        },
        "Δ-D-2" => PresetDef {
            kind: BasisKind::Table,
            coherence_pair: Some(("BL", "DL")),
            ..natural(
                "Δ-D-2",
                tri(1.0, 1.0, 1.0, -0.25, -0.25, FRAC_PI_3),
                &["BL", "B1", "D", "B2", "DL"],
                "Ω12=Ω23=Ω31=Ω=1, δ1=δ3=−Ω cosΦ/2=−1/4, Φ=π/3",
                "detuned triangle with dark state [2, i√3, -2]/√11",
            )
        },
        "Δ-D-3" => natural(
            "Δ-D-3",
            tri(1.0, 2.0, 3.0, -0.375, -1.5, FRAC_PI_3),
            &["2"],
            "Ω12=Ω, Ω23=2Ω, Ω31=3Ω (Ω=1), δ1=−(3/4)Ω cosΦ=−3/8, δ3=−3Ω cosΦ=−3/2, Φ=π/3",
            "unequal couplings, dark state [2, 3i sinΦ, -1]/√(5+9sin²Φ)",
        ),
        "DΛ-D-1" => PresetDef {
            kind: BasisKind::Table,
            ..natural(
                "DΛ-D-1",
                dia(1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 0.125, FRAC_PI_3),
                &["B1", "D", "B2", "B3"],
                "Ω12=Ω23=Ω34=Ω41=Ω=1, δ1=δ3=Ω, δ4=Ω/8, Φ=π/3",
                "diamond with a dark state and three bright states",
            )
        },
        "DΛ-D-2" => natural(
            "DΛ-D-2",
            dia(1.0, 1.0, 1.0, SQRT_2, 0.5, 0.0, 0.5, FRAC_PI_4),
            &["1"],
            "Ω12=Ω23=Ω34=Ω=1, Ω41=√2Ω, δ1=δ4=Ω/2, δ3=0, Φ=π/4",
            "diamond with dark state [1, i, -1, -i]/2",
        ),
        "DΛ-D-3" => natural(
            "DΛ-D-3",
            dia(1.0, 2.0, 3.0, 4.0, 0.0, 0.0, 0.0, FRAC_PI_2),
            &["1"],
            "Ω12=Ω, Ω23=2Ω, Ω34=3Ω, Ω41=4Ω (Ω=1), δ1=δ3=δ4=0, Φ=π/2",
            "resonant diamond without dark state",
        ),
        "DΛ-D-4" => natural(
            "DΛ-D-4",
            DoubleLambdaAltDrive::new(1.0, 1.0, 0.5, FRAC_PI_3)
                .expect("valid preset")
                .into(),
            &["2"],
            "Ωp=Ωs=1, δ=1/2, φ=π/3",
            "double-Lambda variant with two dark states",
        ),
        "Δ-0Φ-1" => PresetDef {
            kind: BasisKind::Cpt,
            ..natural(
                "Δ-0Φ-1",
                tri(1.0, 1.0, 1.0, 0.5, 0.5, 0.0),
                &["BL", "DL"],
                "Ω12=Ω23=Ω31=1, δ1=δ3=1/2, Φ=0",
                "real triangle, CPT dark state decoupled",
            )
        },
        "Δ-0Φ-2" => PresetDef {
            kind: BasisKind::Cpt,
            ..natural(
                "Δ-0Φ-2",
                tri(1.0, 2.0, 1.0, 0.0, -0.75, 0.0),
                &["BL", "DL"],
                "Ω12=1, Ω23=2, Ω31=1, δ1=0, δ3=−3/4 (δ1-δ3=Ω31(Ω23²-Ω12²)/(2Ω12Ω23)), Φ=0",
                "unbalanced real triangle, CPT dark state is an eigenstate",
            )
        },
        "DΛ-0Φ-1" => PresetDef {
            kind: BasisKind::Cpt,
            ..natural(
                "DΛ-0Φ-1",
                dia(1.0, 2.0, 2.0, 1.0, 0.5, 0.5, 1.0, 0.0),
                &["BL", "DL"],
                "Ω12=1, Ω23=2, Ω34=2, Ω41=1 (Ω12Ω34=Ω23Ω41), δ1=δ3=1/2, δ4=1, Φ=0",
                "real diamond, CPT dark state decoupled",
            )
        },
        "DΛ-0Φ-2" => PresetDef {
            kind: BasisKind::Cpt,
            ..natural(
                "DΛ-0Φ-2",
                dia(1.0, 2.0, 1.0, 2.0, 0.5, 0.5, 1.0, PI),
                &["BL", "DL"],
                "Ω12=1, Ω23=2, Ω34=1, Ω41=2 (Ω23Ω34=Ω12Ω41), δ1=δ3=1/2, δ4=1, Φ=π",
                "real diamond, CPT bright state decoupled from level 4",
            )
        },
        "fig2a" => natural(
            "Δ-D-1",
            tri(20.0, 20.0, 20.0, 0.0, 0.0, FRAC_PI_2),
            &["1"],
            "Ω12=Ω23=Ω31=20, δ1=δ3=0, Φ=±π/2",
            "chiral circulation, populations differ under Φ→-Φ",
        ),
        "fig2b" => natural(
            "Δ-D-2",
            tri(20.0, 20.0, 20.0, -5.0, -5.0, FRAC_PI_3),
            &["2"],
            "Ω12=Ω23=Ω31=20, δ1=δ3=−5, Φ=±π/3",
            "detuned triangle, populations differ under Φ→-Φ",
        ),
        "fig2c" => natural(
            "DΛ-D-2",
            dia(10.0, 10.0, 10.0, 10.0 * SQRT_2, 5.0, 0.0, 5.0, FRAC_PI_4),
            &["1"],
            "Ω12=Ω23=Ω34=10, Ω41=10√2, δ1=δ4=5, δ3=0, Φ=±π/4",
            "detuned diamond, populations differ under Φ→-Φ",
        ),
        "fig3a" => PresetDef {
            kind: BasisKind::Table,
            frame: PhaseFrame::Conjugated,
            coherence_pair: Some(("BL", "DL")),
            ..natural(
                "Δ-D-2",
                tri(20.0, 20.0, 20.0, -5.0, -5.0, FRAC_PI_3),
                &["B1", "BL", "D", "B2", "DL"],
                "Ω12=Ω23=Ω31=Ω=20, δ1=δ3=−5, Φ=π/3",
                "bright initial state, evolution confined to the bright subspace",
            )
        },
        "fig3b" => PresetDef {
            kind: BasisKind::Table,
            frame: PhaseFrame::Conjugated,
            ..natural(
                "DΛ-D-1",
                dia(16.0, 16.0, 16.0, 16.0, 16.0, 16.0, 2.0, FRAC_PI_3),
                &["B1", "D", "B2", "B3"],
                "Ω12=Ω23=Ω34=Ω41=Ω=16, δ1=δ3=16, δ4=2, Φ=π/3",
                "bright initial state in the diamond, dark state unpopulated",
            )
        },
        "fig4a" => PresetDef {
            kind: BasisKind::Cpt,
            ..natural(
                "Δ-D-1",
                tri(20.0, 20.0, 20.0, 0.0, 0.0, FRAC_PI_2),
                &["DL"],
                "Ω12=Ω23=Ω31=20, δ1=δ3=0, Φ=±π/2",
                "CPT basis, open-loop symmetry from the Lambda dark state",
            )
        },
        "fig4b" => PresetDef {
            kind: BasisKind::Cpt,
            ..natural(
                "Δ-D-2",
                tri(20.0, 20.0, 20.0, -5.0, -5.0, FRAC_PI_3),
                &["2"],
                "Ω12=Ω23=Ω31=20, δ1=δ3=−5, Φ=±π/3",
                "CPT basis, open-loop symmetry from level 2",
            )
        },
        "fig4c" => PresetDef {
            kind: BasisKind::Cpt,
            ..natural(
                "DΛ-D-1",
                dia(16.0, 16.0, 16.0, 16.0, 16.0, 16.0, 2.0, FRAC_PI_3),
                &["BL"],
                "Ω12=Ω23=Ω34=Ω41=16, δ1=δ3=16, δ4=2, Φ=±π/3",
                "CPT basis of the diamond, open-loop symmetry",
            )
        },
        "fig5" => natural(
            "DΛ-D-3",
            dia(10.0, 20.0, 30.0, 40.0, 0.0, 0.0, 0.0, FRAC_PI_2),
            &["1"],
            "Ω12=10, Ω23=20, Ω34=30, Ω41=40, δ1=δ3=δ4=0, Φ=±π/2",
            "resonant diamond, symmetric populations without a dark state",
        ),
        other => unreachable!("unlisted preset {other}"),
    }
}

fn build_preset(name: &'static str) -> Preset {
    let s = definition(name);
    let config = labeled(s.config, name);
    let measurement = match s.kind {
        BasisKind::Natural => OrthonormalBasis::natural(config.dim()),
        BasisKind::Cpt => cpt_basis_for(&config).expect("preset has a CPT basis"),
        BasisKind::Table => table_basis(s.case).expect("preset has a table basis"),
    };
    let mut p = Preset {
        name,
        case: s.case,
        config,
        states: Vec::new(),
        measurement,
        measurement_kind: s.kind,
        frame: s.frame,
        coherence_pair: s.coherence_pair,
        parameters: s.parameters,
        purpose: s.purpose,
    };
    let cpt = cpt_basis_for(&p.config).ok();
    let table = table_basis(s.case);
    p.states = s
        .states
        .iter()
        .map(|label| {
            let v = table
                .as_ref()
                .and_then(|b| b.get(label).cloned())
                .or_else(|| cpt.as_ref().and_then(|b| b.get(label).cloned()))
                .or_else(|| p.state(label))
                .expect("preset state label resolves");
            (label.to_string(), v)
        })
        .collect();
    p
}
