use ince_volkov::inceop::{build_operator, SolutionFamily, SolutionKind};
use ince_volkov::solve_spectrum;
use ince_volkov::verify::{
    on_shell_momentum, pde_residual_fd, pde_sample_points, plane_wave_stencil_defect,
    AssembledWave, DEFAULT_SEED, PDE_POINTS, PDE_STEP,
};
use ince_volkov::wavefn::ModulationFunction;

const N_M: f64 = 0.768_538;

fn modes(kind: SolutionKind, n: u32, a: f64) -> Vec<ModulationFunction<f64>> {
    let dec =
        solve_spectrum(&build_operator(SolutionFamily::new(kind, n).unwrap(), a).unwrap()).unwrap();
    (1..=dec.dim())
        .map(|k| ModulationFunction::from_decomposition(&dec, k).unwrap())
        .collect()
}

#[test]
fn eigenmodes_converge_at_second_order() {
    let pts = pde_sample_points(N_M, PDE_POINTS, DEFAULT_SEED);
    for kind in [
        SolutionKind::KgCosEven,
        SolutionKind::DiracPlus,
        SolutionKind::DiracMinus,
    ] {
        for m in modes(kind, 2, 5.0) {
            if m.eta < 0.0 {
                continue;
            }
            let (p, kappa_sq) = on_shell_momentum(&m, m.eta, N_M).unwrap();
            let rep = pde_residual_fd(&m, &p, N_M, kappa_sq, &pts, PDE_STEP).unwrap();

            assert!((rep.order - 2.0).abs() <= 0.2, "{rep:?}");
        }
    }
}

#[test]
fn wrong_eta_does_not_converge() {
    let pts = pde_sample_points(N_M, PDE_POINTS, DEFAULT_SEED);
    for kind in [SolutionKind::KgCosEven, SolutionKind::DiracPlus] {
        let m = &modes(kind, 2, 5.0)[0];
        let (p, kappa_sq) = on_shell_momentum(m, m.eta + 0.5, N_M).unwrap();
        let rep = pde_residual_fd(m, &p, N_M, kappa_sq, &pts, PDE_STEP).unwrap();
        assert!(rep.order.abs() < 0.5, "{rep:?}");
    }
}

#[test]
fn free_plane_wave_matches_stencil_defect() {
    // At a = 0 each exponential mode is a single plane wave, whose
    // central-difference residual is known exactly.
    let pts = pde_sample_points(N_M, PDE_POINTS, DEFAULT_SEED);
    for kind in [SolutionKind::DiracPlus, SolutionKind::DiracMinus] {
        for m in modes(kind, 3, 0.0) {
            let (p, kappa_sq) = on_shell_momentum(&m, m.eta, N_M).unwrap();
            let rep = pde_residual_fd(&m, &p, N_M, kappa_sq, &pts, PDE_STEP).unwrap();
            let wave = AssembledWave::new(&m, &p, N_M);
            let j = m.coefficients.iter().position(|&c| c == 1.0).unwrap();
            let half_m = m.family.frequencies()[j] as f64 / 2.0;
            let [p0, px, py, _] = wave.transverse;
            let freq = [p0 + half_m * wave.k0, px, py + half_m * wave.k0 * N_M];
            let defect = plane_wave_stencil_defect(freq, PDE_STEP);
            assert!((rep.wave_scale - 1.0).abs() < 1e-15);
            assert!(
                (rep.residual_h - defect).abs() < 1e-9,
                "{kind} k={} {} vs {defect}",
                m.k_index,
                rep.residual_h
            );
        }
    }
}
