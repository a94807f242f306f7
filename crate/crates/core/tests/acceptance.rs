//! Acceptance gate: one test per criterion, each printing a single
//! pass/fail line. Run with `cargo test --test acceptance`.

use watalign::angular::quadrature::dmatrix_quadrature_oracle;
use watalign::angular::{dmatrix_element, AngularIndices};
use watalign::config::default_pulse;
use watalign::dynamics::{PulseSequence, TimeGrid, WavepacketState};
use watalign::ensemble::{boltzmann_weights, converge_jmax, thermal_trace, ThermalSpec};
use watalign::interaction::{
    apply_kick_exact, apply_kick_ode, build_kick_generator, field_from_intensity,
    kick_strengths, DEFAULT_ODE_STEPS,
};
use watalign::rotor::{build_eigentable, MolecularSpec, SpinIsomer, SymmetryLabel};

fn report(n: u32, name: &str, ok: bool, detail: &str) {
    let verdict = if ok { "PASS" } else { "FAIL" };
    println!("criterion {n:2} [{verdict}] {name}: {detail}");
    assert!(ok, "criterion {n} failed: {detail}");
}

fn thermal(t: f64, j_max: i32) -> ThermalSpec {
    ThermalSpec {
        temperature_k: t,
        j_max,
        convergence_tol: 1e-4,
    }
}

#[test]
fn criterion_01_kick_strengths() {
    let betas = kick_strengths(&default_pulse(), &MolecularSpec::water());
    let ok = (-0.180..=-0.168).contains(&betas.beta1) && (-0.067..=-0.063).contains(&betas.beta2);
    report(
        1,
        "kick strengths",
        ok,
        &format!("beta1 = {:.4}, beta2 = {:.4}", betas.beta1, betas.beta2),
    );
}

#[test]
fn criterion_02_field_convention() {
    let e0 = field_from_intensity(3e13);
    let ok = (e0 - 1.5e10).abs() / 1.5e10 < 0.01;
    report(2, "field convention", ok, &format!("eps0 = {e0:.4e} V/m"));
}

#[test]
fn criterion_03_classification_table() {
    let table = build_eigentable(&MolecularSpec::water(), 3).unwrap();
    use SymmetryLabel::*;
    let expected = [
        (0, 0, A1),
        (1, -1, B1),
        (1, 0, A2),
        (1, 1, B2),
        (2, -2, A1),
        (2, -1, B2),
        (2, 0, A2),
        (2, 1, B1),
        (2, 2, A1),
        (3, -3, B1),
        (3, -2, A2),
        (3, -1, B2),
        (3, 0, A1),
        (3, 1, B1),
        (3, 2, A2),
        (3, 3, B2),
    ];
    let mut bad = Vec::new();
    for (j, tau, label) in expected {
        let lvl = table.level(j, tau);
        if lvl.symmetry != label || lvl.isomer != label.isomer() {
            bad.push(format!("({j},{tau}): got {}", lvl.symmetry));
        }
    }
    report(
        3,
        "classification table",
        bad.is_empty(),
        &if bad.is_empty() {
            "all 16 levels match".into()
        } else {
            bad.join("; ")
        },
    );
}

#[test]
fn criterion_04_j1_energies_and_planarity() {
    let spec = MolecularSpec::water();
    let planarity = (spec.i_c - spec.i_a - spec.i_b).abs() / spec.i_c;
    let (a, b, c) = spec.rotational_constants();
    let table = build_eigentable(&spec, 1).unwrap();
    let expected = [(-1, b + c), (0, a + c), (1, a + b)];
    let mut max_rel: f64 = 0.0;
    for (tau, want) in expected {
        let got = table.level(1, tau).energy_cm1;
        max_rel = max_rel.max((got - want).abs() / want);
    }
    let ok = max_rel < 1e-10 && planarity < 1e-3;
    report(
        4,
        "J=1 energies + planarity",
        ok,
        &format!("max rel err = {max_rel:.2e}, planarity = {planarity:.2e}"),
    );
}

#[test]
fn criterion_05_angular_oracle() {
    let mut max_err: f64 = 0.0;
    let mut checked = 0u32;
    for j in 0..=4 {
        for jp in 0..=4 {
            for m in -j.min(jp)..=j.min(jp) {
                for k in -j..=j {
                    for kp in -jp..=jp {
                        for s in [-2, 0, 2] {
                            let bra = AngularIndices::new(j, k, m).unwrap();
                            let ket = AngularIndices::new(jp, kp, m).unwrap();
                            let fast = dmatrix_element(bra, s, ket).unwrap();
                            let slow = dmatrix_quadrature_oracle(bra, s, ket).unwrap();
                            max_err = max_err.max((fast - slow).abs());
                            checked += 1;
                        }
                    }
                }
            }
        }
    }
    report(
        5,
        "angular quadrature oracle",
        max_err < 1e-8,
        &format!("{checked} elements, max |diff| = {max_err:.2e}"),
    );
}

#[test]
fn criterion_06_forbidden_transitions() {
    let table = build_eigentable(&MolecularSpec::water(), 12).unwrap();
    let betas = kick_strengths(&default_pulse(), &MolecularSpec::water());
    let mut max_cross: f64 = 0.0;
    for m in 0..=12 {
        let gen = build_kick_generator(&betas, &table, m).unwrap();
        let idx = table.basis_for_m(m);
        for (r, &ri) in idx.iter().enumerate() {
            for (c, &ci) in idx.iter().enumerate() {
                if table.levels()[ri].isomer != table.levels()[ci].isomer {
                    max_cross = max_cross.max(gen.matrix[(r, c)].abs());
                }
            }
        }
    }
    report(
        6,
        "cross-isomer blocks vanish",
        max_cross < 1e-12,
        &format!("max cross-isomer element = {max_cross:.2e} at J_max = 12"),
    );
}

#[test]
fn criterion_07_isotropy_baseline() {
    let molecule = MolecularSpec::water();
    let table = build_eigentable(&molecule, 10).unwrap();
    let grid = TimeGrid {
        t_start_ps: 0.0,
        t_end_ps: 1.0,
        dt_ps: 0.1,
    };
    let seq = PulseSequence::empty();
    let mut max_dev: f64 = 0.0;
    for t in [5.0, 20.0, 100.0] {
        for isomer in [SpinIsomer::Para, SpinIsomer::Ortho] {
            let ens = boltzmann_weights(&table, isomer, &thermal(t, 10)).unwrap();
            let trace = thermal_trace(&ens, &seq, &grid, &table, &molecule).unwrap();
            for v in trace.cos2 {
                max_dev = max_dev.max((v - 1.0 / 3.0).abs());
            }
        }
    }
    report(
        7,
        "zero-pulse isotropy",
        max_dev < 1e-6,
        &format!("max |<cos2> - 1/3| = {max_dev:.2e} over T = 5, 20, 100 K"),
    );
}

#[test]
fn criterion_08_ode_vs_exact_kick() {
    let molecule = MolecularSpec::water();
    let table = build_eigentable(&molecule, 8).unwrap();
    let betas = kick_strengths(&default_pulse(), &molecule);
    let mut max_diff: f64 = 0.0;
    let mut max_drift: f64 = 0.0;
    for (j, tau, m) in [(0, 0, 0), (1, -1, 0), (1, -1, 1), (2, 0, 2)] {
        let state = WavepacketState::from_eigenstate(&table, j, tau, m).unwrap();
        let gen = build_kick_generator(&betas, &table, m).unwrap();
        let exact = apply_kick_exact(&state, &gen);
        let ode = apply_kick_ode(&state, &gen, DEFAULT_ODE_STEPS).unwrap();
        max_diff = max_diff.max((&exact.amplitudes - &ode.amplitudes).camax());
        max_drift = max_drift
            .max((exact.norm() - 1.0).abs())
            .max((ode.norm() - 1.0).abs());
    }
    let ok = max_diff < 1e-8 && max_drift < 1e-10;
    report(
        8,
        "ODE matches exact kick",
        ok,
        &format!("max amp diff = {max_diff:.2e}, max norm drift = {max_drift:.2e}"),
    );
}

#[test]
fn criterion_09_single_pulse_isomer_selectivity() {
    let molecule = MolecularSpec::water();
    let seq = PulseSequence::new(vec![default_pulse()]).unwrap();
    let grid = TimeGrid {
        t_start_ps: 0.0,
        t_end_ps: 2.5,
        dt_ps: 0.005,
    };
    let (jmax, _, para, ortho) =
        converge_jmax(&molecule, &seq, &grid, &thermal(20.0, 4), 4).unwrap();
    let times = grid.times();
    let best = times
        .iter()
        .enumerate()
        .filter(|(_, &t)| (1.7..=2.3).contains(&t))
        .map(|(i, &t)| {
            let margin = (para.cos2[i] - 1.0 / 3.0).min(1.0 / 3.0 - ortho.cos2[i]);
            (margin, t)
        })
        .max_by(|a, b| a.0.total_cmp(&b.0))
        .unwrap();
    report(
        9,
        "para aligned, ortho anti-aligned",
        best.0 > 0.005,
        &format!(
            "margin {:.4} at t = {:.3} ps (J_max = {jmax})",
            best.0, best.1
        ),
    );
}

#[test]
fn criterion_10_second_pulse_suppresses_ortho() {
    let molecule = MolecularSpec::water();
    let grid = TimeGrid {
        t_start_ps: 0.0,
        t_end_ps: 5.0,
        dt_ps: 0.005,
    };
    let mut second = default_pulse();
    second.t0_ps = 1.9;
    let single = PulseSequence::new(vec![default_pulse()]).unwrap();
    let double = PulseSequence::new(vec![default_pulse(), second]).unwrap();
    let (_, _, para1, ortho1) =
        converge_jmax(&molecule, &single, &grid, &thermal(20.0, 4), 4).unwrap();
    let (_, _, para2, ortho2) =
        converge_jmax(&molecule, &double, &grid, &thermal(20.0, 4), 4).unwrap();
    let times = grid.times();

    // (a) energy strictly reduced for ortho, raised for para
    let i_pre = times.iter().position(|&t| t >= 1.0).unwrap();
    let last = times.len() - 1;
    let e_ok = ortho2.energy_cm1[last] < ortho2.energy_cm1[i_pre]
        && para2.energy_cm1[last] > para2.energy_cm1[i_pre];

    // (b) post-second-pulse ortho alignment deviation shrinks, para grows
    let window: Vec<usize> = times
        .iter()
        .enumerate()
        .filter(|(_, &t)| t > 2.0)
        .map(|(i, _)| i)
        .collect();
    let dev = |trace: &watalign::ensemble::IsomerTrace| {
        window
            .iter()
            .map(|&i| (trace.cos2[i] - 1.0 / 3.0).abs())
            .fold(0.0, f64::max)
    };
    let (do1, do2, dp1, dp2) = (dev(&ortho1), dev(&ortho2), dev(&para1), dev(&para2));
    let align_ok = do2 < do1 && dp2 > dp1;
    report(
        10,
        "second pulse at 1.9 ps",
        e_ok && align_ok,
        &format!(
            "dE_ortho = {:+.3}, dE_para = {:+.3} cm-1; ortho dev {:.4} -> {:.4}, para dev {:.4} -> {:.4}",
            ortho2.energy_cm1[last] - ortho2.energy_cm1[i_pre],
            para2.energy_cm1[last] - para2.energy_cm1[i_pre],
            do1, do2, dp1, dp2
        ),
    );
}

#[test]
fn criterion_11_scan_and_convergence() {
    // regression constant: single-pulse 20 K trace converges at J_max = 6
    let molecule = MolecularSpec::water();
    let seq = PulseSequence::new(vec![default_pulse()]).unwrap();
    let grid = TimeGrid {
        t_start_ps: 0.0,
        t_end_ps: 5.0,
        dt_ps: 0.005,
    };
    let (jmax, ..) = converge_jmax(&molecule, &seq, &grid, &thermal(20.0, 4), 4).unwrap();
    let conv_ok = jmax <= 14 && jmax == 6;

    let config = watalign::config::parse_config(
        r#"{
            "temperature_k": 20, "jmax": 8,
            "scan": { "delay_min_ps": 1.5, "delay_max_ps": 2.3, "delay_step_ps": 0.05,
                      "objective": "ortho_energy_suppression" }
        }"#,
    )
    .unwrap();
    let watalign::config::Config::Scan(scan) = config else {
        panic!("expected scan config")
    };
    let result = watalign::scenario::scan_delay(&scan).unwrap();
    let scan_ok = (result.best_delay_ps - 1.9).abs() <= 0.2;
    report(
        11,
        "delay scan + convergence",
        conv_ok && scan_ok,
        &format!(
            "best delay = {:.2} ps (objective {:+.3e}), converged J_max = {jmax}",
            result.best_delay_ps, result.best_objective_value
        ),
    );
}
