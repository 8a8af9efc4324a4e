mod common;

use std::f64::consts::{FRAC_PI_3, PI};

use closedloop::preset::{all_presets, table_basis};
use closedloop::{
    analytic_deltazero_state, build, build_diamond, change_basis, coherence_series,
    conjugate_phase, cpt_states, dark_state_closed_form, double_dark_basis, eig_hermitian, evolve,
    find_dark_states, phase_comparison, phase_symmetry_check, preset, to_cpt_hamiltonian_3,
    unbalanced_lambda_dark, Drive, OrthonormalBasis, PhaseFrame, StateVector, TimeGrid,
    TriangleDrive, C64,
};

fn grid() -> TimeGrid {
    TimeGrid::figure_default()
}

#[test]
fn chiral_circulation_matches_integrator() {
    let p = preset("fig2a").unwrap();
    let h = p.config.build();
    let basis = OrthonormalBasis::natural(3);
    let traj = evolve(&h, p.initial_state(), &grid(), &basis).unwrap();
    let seq = traj.dominant_sequence();
    assert_eq!(&seq[..4], &[0, 2, 1, 0]);

    let minus = evolve(
        &build(&conjugate_phase(&p.config)),
        p.initial_state(),
        &grid(),
        &basis,
    )
    .unwrap();
    assert_eq!(&minus.dominant_sequence()[..4], &[0, 1, 2, 0]);

    // Grid step 5e-4 is 50 integrator steps.
    let samples = common::rk4(&h, p.initial_state(), 1e-5, 50_000, 50);
    for (k, (_, psi)) in samples.iter().enumerate() {
        for i in 0..3 {
            assert!((psi[i].norm_sqr() - traj.populations[k][i]).abs() < 1e-8);
        }
    }
}

#[test]
fn closed_form_resonant_state_matches_propagation() {
    let p = preset("DΛ-D-3").unwrap();
    let Drive::Diamond(d) = p.config.drive else {
        unreachable!()
    };
    let one = StateVector::basis_state(4, 1);
    let s = eig_hermitian(&p.config.build()).unwrap();
    for t in [0.0, 0.1, 0.3, 0.5, 2.0] {
        let analytic = analytic_deltazero_state(&d, t).unwrap();
        let spectral = s.evolve(&one, t).unwrap();
        assert!(
            common::max_diff(&analytic.to_vec(), &spectral.to_vec()) < 1e-10,
            "t={t}"
        );
        let back = analytic_deltazero_state(&d, -t).unwrap();
        for k in 1..=4 {
            assert!(
                (analytic.amplitude(k).norm_sqr() - back.amplitude(k).norm_sqr()).abs() < 1e-12
            );
        }
    }
    let fig5 = preset("fig5").unwrap();
    let Drive::Diamond(d5) = fig5.config.drive else {
        unreachable!()
    };
    let rk = common::rk4(&fig5.config.build(), &one, 1e-5, 30_000, 30_000);
    let analytic = analytic_deltazero_state(&d5, 0.3).unwrap();
    assert!(common::max_diff(&analytic.to_vec(), &rk[1].1) < 1e-8);
}

#[test]
fn bright_states_keep_populations_symmetric() {
    for name in ["Δ-D-1", "Δ-D-2", "DΛ-D-1", "fig3a", "fig3b"] {
        let p = preset(name).unwrap();
        let basis = table_basis(p.case).unwrap();
        for (label, psi) in basis.labels().iter().zip(basis.vectors()).skip(1) {
            let r = phase_symmetry_check(
                &p.config,
                psi,
                &grid(),
                &basis,
                1e-9,
                PhaseFrame::Conjugated,
            )
            .unwrap();
            assert!(r.symmetric, "{name}/{label}: {}", r.max_pop_deviation);
        }
    }
}

#[test]
fn fixed_frame_breaks_symmetry_for_complex_bright_states() {
    let p = preset("fig3a").unwrap();
    let r = phase_symmetry_check(
        &p.config,
        p.initial_state(),
        &grid(),
        &p.measurement,
        1e-9,
        PhaseFrame::Fixed,
    )
    .unwrap();
    assert!(!r.symmetric);
}

#[test]
fn dark_population_of_fig3a_vanishes() {
    let p = preset("fig3a").unwrap();
    let traj = evolve(
        &p.config.build(),
        p.initial_state(),
        &grid(),
        &p.measurement,
    )
    .unwrap();
    assert_eq!(traj.basis_labels[0], "D");
    assert!(traj.column(0).iter().all(|x| *x < 1e-18));
}

#[test]
fn every_preset_runs_quickly_end_to_end() {
    for p in all_presets() {
        let start = std::time::Instant::now();
        let cmp = phase_comparison(
            &p.config,
            p.initial_state(),
            &grid(),
            &p.measurement,
            1e-9,
            p.frame,
        )
        .unwrap();
        assert_eq!(cmp.plus.populations.len(), 1001);
        assert!(start.elapsed().as_secs_f64() < 1.0, "{}", p.name);
    }
}

#[test]
fn cpt_hamiltonian_closed_form_agrees_with_rotation() {
    for name in ["fig4a", "fig4b", "Δ-0Φ-1"] {
        let p = preset(name).unwrap();
        let Drive::Triangle(d) = p.config.drive else {
            unreachable!()
        };
        let literal = to_cpt_hamiltonian_3(&d).unwrap();
        let rotated = change_basis(
            &build(&p.config),
            &cpt_states(d.omega_12, d.omega_23).unwrap().basis(),
        )
        .unwrap();
        assert!(
            literal.matrix().max_abs_diff(rotated.matrix()) < 1e-12,
            "{name}"
        );
    }
    let bad = TriangleDrive::new(1.0, 1.0, 1.0, 0.0, 0.5, 0.0).unwrap();
    assert!(to_cpt_hamiltonian_3(&bad).is_err());
}

#[test]
fn real_closing_coupling_keeps_lambda_dark_state() {
    let p = preset("Δ-0Φ-2").unwrap();
    let Drive::Triangle(d) = p.config.drive else {
        unreachable!()
    };
    let u = unbalanced_lambda_dark(&d).unwrap();
    assert!(u.eigen_residual.unwrap() < 1e-12);
    let dl = p.state("DL").unwrap();
    assert!(dl.distance_up_to_phase(&u.dark).unwrap() < 1e-12);
    let traj = evolve(&p.config.build(), &dl, &grid(), &p.measurement).unwrap();
    let i = p
        .measurement
        .labels()
        .iter()
        .position(|l| l == "DL")
        .unwrap();
    assert!(traj.column(i).iter().all(|x| (x - 1.0).abs() < 1e-12));
}

#[test]
fn coherence_between_levels_one_and_two_is_available() {
    let p = preset("Δ-D-2").unwrap();
    let (one, two) = (
        StateVector::basis_state(3, 1),
        StateVector::basis_state(3, 2),
    );
    let psi = p.initial_state();
    let plus = coherence_series(&p.config, psi, &grid(), &one, &two).unwrap();
    let minus = coherence_series(&conjugate_phase(&p.config), psi, &grid(), &one, &two).unwrap();
    assert_eq!(plus.len(), 1001);
    assert!(plus.iter().all(|z| z.im.abs() < 1e-12));
    assert!(minus.iter().all(|z| z.im.abs() < 1e-12));
    let traj = evolve(
        &p.config.build(),
        psi,
        &grid(),
        &OrthonormalBasis::natural(3),
    )
    .unwrap();
    let diag = coherence_series(&p.config, psi, &grid(), &one, &one).unwrap();
    for (z, row) in diag.iter().zip(&traj.populations) {
        assert!((z.re / 2.0 - row[0]).abs() < 1e-12);
    }
}

#[test]
fn double_lambda_dark_pair() {
    let p = preset("DΛ-D-4").unwrap();
    let Drive::DoubleLambdaAlt(d) = p.config.drive else {
        unreachable!()
    };
    let b = double_dark_basis(&d).unwrap();
    let h = p.config.build();
    for v in [&b.dark1, &b.dark2] {
        let hv = h.matrix().apply(v).unwrap();
        assert!(hv.iter().map(|z| z.norm()).fold(0.0, f64::max) < 1e-10);
    }
    let report = find_dark_states(&h, None).unwrap();
    assert_eq!(report.degeneracy, 2);
    let closed = dark_state_closed_form("DLambda-D-4").unwrap();
    for v in &closed {
        let in_span: f64 = report
            .dark_states
            .iter()
            .map(|d| d.inner(v).unwrap().norm_sqr())
            .sum();
        assert!((in_span - 1.0).abs() < 1e-10);
    }
}

#[test]
fn delta_d3_closed_form_follows_the_phase() {
    for phi in [0.3, FRAC_PI_3, 1.2, PI / 2.0] {
        let (o, d1, d3) = (1.0, -0.75 * phi.cos(), -3.0 * phi.cos());
        let drive = TriangleDrive::new(o, 2.0 * o, 3.0 * o, d1, d3, phi).unwrap();
        let found = find_dark_states(&build(&drive.into()), None).unwrap();
        assert_eq!(found.degeneracy, 1);
        let want = StateVector::normalized(
            vec![
                C64::new(2.0, 0.0),
                C64::new(0.0, 3.0 * phi.sin()),
                C64::new(-1.0, 0.0),
            ],
            "natural",
        )
        .unwrap();
        assert!(found.dark_states[0].distance_up_to_phase(&want).unwrap() < 1e-10);
    }
}

#[test]
fn detuned_diamond_loses_pairing() {
    let p = preset("DΛ-D-1").unwrap();
    assert!(!closedloop::eigenvalue_pairing_check(&p.config.build(), 1e-9).unwrap());
    let Drive::Diamond(mut d) = p.config.drive else {
        unreachable!()
    };
    d.delta_1 = 0.0;
    d.delta_3 = 0.0;
    d.delta_4 = 0.0;
    assert!(closedloop::eigenvalue_pairing_check(&build_diamond(&d), 1e-12).unwrap());
}
