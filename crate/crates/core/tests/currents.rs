use std::sync::Arc;

use nalgebra::Vector4;
use num_complex::Complex64;
use tbdkit::currents::{
    bilinear, closed_form_divergences, completion_sweep, conservation_sweep, defects, defects_of, gauge_check,
    green_function, green_functions, j_add, j_free, single_particle_current, verify_conservation, Advanced, GaugePhase,
    GreenFunction, GridCurrent, Retarded,
};
use tbdkit::grid::{Grid3, SpinorGrid};
use tbdkit::kinematics::{FourVector, MassPair};
use tbdkit::operators::{product_spinor, EnergyMode, InternalField, PlaneWaveState, TwoBodyDiracSystem};
use tbdkit::potentials::{Constant, Potential, YukawaTanh, Zero};
use tbdkit::scalar_product::{build_kernel, interacting_inner_product, SazdjianKernel};
use tbdkit::spinor::{GammaSet, Spinor16};

fn system(potential: impl Potential + 'static, m: f64) -> TwoBodyDiracSystem {
    TwoBodyDiracSystem::new(MassPair::equal(m).unwrap(), Arc::new(potential), GammaSet::default())
}

fn spinor(seed: u64) -> Spinor16 {
    Spinor16::from_fn(|i, _| {
        let x = (seed as f64 + 1.0) * (i as f64 + 0.7);
        Complex64::new(x.sin(), (1.3 * x).cos())
    })
}

/// A generic element of the solution space with relative momentum `p`.
fn solution(sys: &TwoBodyDiracSystem, p: [f64; 3], seed: u64) -> PlaneWaveState {
    let weights: Vec<Complex64> = (0..4)
        .map(|k| Complex64::new((seed as f64 + k as f64).cos(), 0.3 * (k as f64 + 1.0)))
        .collect();
    sys.solution_with_momentum(p, &weights).unwrap()
}

#[test]
fn free_density_is_real_and_nonnegative() {
    let g = GammaSet::default();
    for seed in 0..5 {
        let u = spinor(seed);
        let j = bilinear(&g, &u, &u);
        assert!(j[0][0].im.abs() < 1e-14);
        assert!((j[0][0].re - u.norm_squared()).abs() < 1e-12);
    }
}

#[test]
fn bilinear_is_sesquilinear() {
    let g = GammaSet::default();
    let (a, b) = (spinor(1), spinor(2));
    let ab = bilinear(&g, &a, &b);
    let ba = bilinear(&g, &b, &a);
    let c = Complex64::new(0.4, -1.1);
    let cb = bilinear(&g, &a, &(b * c));
    let ca = bilinear(&g, &(a * c), &b);
    for mu in 0..4 {
        for nu in 0..4 {
            assert!((ab[mu][nu] - ba[mu][nu].conj()).norm() < 1e-12);
            assert!((cb[mu][nu] - c * ab[mu][nu]).norm() < 1e-12);
            assert!((ca[mu][nu] - c.conj() * ab[mu][nu]).norm() < 1e-12);
        }
    }
}

#[test]
fn product_states_factorize_into_single_particle_currents() {
    let g = GammaSet::default();
    let four = |s: f64| Vector4::from_fn(|i, _| Complex64::new((s * (i as f64 + 1.0)).sin(), (s + i as f64).cos()));
    let (a1, a2, b1, b2) = (four(0.3), four(1.7), four(2.9), four(-0.8));
    let j = bilinear(&g, &product_spinor(&a1, &a2), &product_spinor(&b1, &b2));
    let s1 = single_particle_current(&g, &a1, &b1);
    let s2 = single_particle_current(&g, &a2, &b2);
    for mu in 0..4 {
        for nu in 0..4 {
            assert!((j[mu][nu] - s1[mu] * s2[nu]).norm() < 1e-12);
        }
    }
}

#[test]
fn free_solutions_give_conserved_current() {
    let sys = system(Zero, 1.0);
    let a = solution(&sys, [1.0, 0.0, 0.0], 1);
    let b = solution(&sys, [0.0, 1.0, 1.0], 2);
    let j = j_free(&sys.gammas, &a, &b);
    assert!(j.divergence1().max_abs() <= 1e-12);
    assert!(j.divergence2().max_abs() <= 1e-12);
    assert!(verify_conservation(&j, 1e-12).passed);
    let d = defects(&sys, &a, &b).unwrap();
    assert!(d.max_abs() <= 1e-12);
    let add = j_add(&d, &Advanced, &Advanced, 1e-3).unwrap();
    assert!(add.max_abs() <= 1e-12);
}

/// Constant `v` only renormalizes the masses: every solution has
/// `γ₁.p₁ u = αu` and `γ₂.p₂ u = -βu`, so the surviving term cancels.
#[test]
fn constant_coupling_solutions_keep_the_free_current_conserved() {
    for (v, m1, m2) in [(0.3, 1.0, 1.0), (0.3, 1.0, 1.4), (-0.5, 0.7, 1.0)] {
        let sys = TwoBodyDiracSystem::new(
            MassPair::new(m1, m2).unwrap(),
            Arc::new(Constant { value: v }),
            GammaSet::default(),
        );
        let a = solution(&sys, [1.0, 0.0, 0.0], 1);
        let b = solution(&sys, [0.0, 1.0, 1.0], 2);
        let j = j_free(&sys.gammas, &a, &b);
        let (c1, c2) = closed_form_divergences(&sys.gammas, v, &a, &b);
        assert!(j.divergence1().max_abs_diff(&c1) <= 1e-12);
        assert!(j.divergence2().max_abs_diff(&c2) <= 1e-12);
        assert!(c1.max_abs().max(c2.max_abs()) <= 1e-12);
        let (alpha, beta) = sys.effective_masses().unwrap();
        let g = &sys.gammas;
        assert!((g.slash1(&a.p1).apply(&a.u) - a.u * Complex64::new(alpha, 0.0)).norm() < 1e-9);
        assert!((g.slash2(&a.p2).apply(&a.u) + a.u * Complex64::new(beta, 0.0)).norm() < 1e-9);
    }
}

/// Each closed-form term is nonzero on its own; only its action on
/// solutions cancels.
#[test]
fn surviving_term_is_nonzero_off_shell() {
    let g = GammaSet::default();
    let total = FourVector::at_rest(2.8);
    let a =
        PlaneWaveState::from_total_relative(total, FourVector::from_parts(0.1, [1.0, 0.0, 0.0]), spinor(1)).unwrap();
    let b =
        PlaneWaveState::from_total_relative(total, FourVector::from_parts(-0.2, [0.0, 1.0, 0.0]), spinor(2)).unwrap();
    let (c1, c2) = closed_form_divergences(&g, 0.3, &a, &b);
    assert!(c1.max_abs() > 1e-3 && c2.max_abs() > 1e-3);
}

#[test]
fn equal_total_momentum_divergence_matches_closed_form() {
    let v = 0.25;
    let sys = system(Constant { value: v }, 1.0);
    let a = solution(&sys, [0.0, 0.0, 1.0], 3);
    let b = solution(&sys, [1.0, 0.0, 0.0], 4);
    assert!((a.total() - b.total()).euclidean_norm_sq() < 1e-24);
    let j = j_free(&sys.gammas, &a, &b);
    let (c1, _) = closed_form_divergences(&sys.gammas, v, &a, &b);
    assert!(j.divergence1().max_abs_diff(&c1) <= 1e-12);
}

#[test]
fn defects_are_consistent_and_reject_non_solutions() {
    let v = 0.3;
    let sys = system(Constant { value: v }, 1.0);
    let a = solution(&sys, [1.0, 0.0, 0.0], 1);
    let b = solution(&sys, [0.0, 1.0, 1.0], 2);
    let d = defects(&sys, &a, &b).unwrap();
    assert!(d.mixed_consistency() <= 1e-9, "{}", d.mixed_consistency());
    assert!(d.max_abs() <= 1e-12);
    let generic = defects_of(&j_free(&sys.gammas, &off_shell(&a), &b));
    assert!(generic.max_abs() > 1e-3);
    assert!(generic.mixed_consistency() <= 1e-12 * generic.max_abs().max(1.0));
    assert!(defects(&sys, &off_shell(&a), &b).is_err());
}

fn off_shell(a: &PlaneWaveState) -> PlaneWaveState {
    PlaneWaveState::from_total_relative(a.total(), FourVector::from_parts(0.2, [1.0, 0.0, 0.0]), a.u).unwrap()
}

#[test]
fn green_functions_invert_the_wave_operator() {
    let q = FourVector::new(0.7, 0.2, -0.4, 1.1);
    for g in [green_function("advanced").unwrap(), green_function("retarded").unwrap()] {
        let m = g.multiplier(&q, 0.0).unwrap();
        // □ e^{-iq.x} = -q² e^{-iq.x}
        assert!((m * -q.square() - 1.0).norm() < 1e-14);
    }
    let adv = Advanced.multiplier(&q, 1e-2).unwrap();
    let ret = Retarded.multiplier(&q, 1e-2).unwrap();
    assert!((adv - ret.conj()).norm() < 1e-14);
    let null = FourVector::new(1.0, 1.0, 0.0, 0.0);
    assert!(Advanced.multiplier(&null, 0.0).is_err());
    assert!(green_function("feynman").is_err());
    assert_eq!(green_functions().names(), vec!["advanced", "retarded"]);
}

#[test]
fn constant_coupling_pair_is_conserved_after_completion() {
    let v = 0.3;
    let sys = system(Constant { value: v }, 1.0);
    let a = solution(&sys, [1.0, 0.0, 0.0], 1);
    let b = solution(&sys, [0.0, 1.0, 1.0], 2);
    let eps = [1e-2, 1e-3, 1e-4];
    let sweep = conservation_sweep(&sys, &a, &b, &Advanced, &Advanced, &eps, 1e-8).unwrap();
    assert!(sweep.passed, "{sweep:?}");
    assert!(conservation_sweep(&sys, &a, &b, &Advanced, &Advanced, &[0.0], 1e-8).is_err());
}

/// The completion only uses the current's own divergences, so it can be
/// exercised on a current with large defects.
#[test]
fn completion_conserves_currents_with_nonzero_defects() {
    let g = GammaSet::default();
    let a = PlaneWaveState::from_total_relative(
        FourVector::at_rest(2.8),
        FourVector::from_parts(0.1, [1.0, 0.0, 0.0]),
        spinor(1),
    )
    .unwrap();
    let b = PlaneWaveState::from_total_relative(
        FourVector::at_rest(3.1),
        FourVector::from_parts(-0.2, [0.0, 1.0, -1.0]),
        spinor(2),
    )
    .unwrap();
    let j = j_free(&g, &a, &b);
    let eps = [1e-2, 1e-3, 1e-4];
    for (g1, g2) in [
        (&Advanced as &dyn GreenFunction, &Advanced as &dyn GreenFunction),
        (&Retarded, &Retarded),
        (&Advanced, &Retarded),
    ] {
        let sweep = completion_sweep(&j, g1, g2, &eps, 1e-8).unwrap();
        assert!(sweep.passed, "{sweep:?}");
        assert!(sweep.free_divergence > 1e-1);
        assert!(sweep.divergence1.windows(2).all(|w| w[1] < w[0]), "{sweep:?}");
        assert!(sweep.divergence2.windows(2).all(|w| w[1] < w[0]), "{sweep:?}");
    }
    let d = defects_of(&j);
    let finite = j.add(&j_add(&d, &Advanced, &Advanced, 1e-3).unwrap()).unwrap();
    let report = verify_conservation(&finite, 1e-8);
    assert!(!report.passed && report.divergence1 < 1e-1 * d.f1.max_abs());
}

#[test]
fn grid_divergence_matches_plane_wave_divergence() {
    let v = 0.3;
    let sys = system(Constant { value: v }, 1.0);
    let a = solution(&sys, [1.0, 0.0, 0.0], 1);
    let b = solution(&sys, [0.0, 1.0, -1.0], 2);
    let grid = Grid3::centered(8, 2.0 * std::f64::consts::PI).unwrap();
    let fa = InternalField::from_plane_wave(grid, &a).unwrap();
    let fb = InternalField::from_plane_wave(grid, &b).unwrap();
    let current = GridCurrent::new(&sys.gammas, &fa, &fb).unwrap();
    let pw = j_free(&sys.gammas, &a, &b);
    let (d1, d2) = (pw.divergence1(), pw.divergence2());
    let g1 = current.divergence(1).unwrap();
    let g2 = current.divergence(2).unwrap();
    let mut err: f64 = 0.0;
    for idx in 0..grid.points() {
        let x = grid.position(idx);
        let x1 = FourVector::from_parts(0.0, [0.5 * x[0], 0.5 * x[1], 0.5 * x[2]]);
        let x2 = FourVector::from_parts(0.0, [-0.5 * x[0], -0.5 * x[1], -0.5 * x[2]]);
        let phase = pw.at(&x1, &x2)[0][0] / pw.coeff[0][0];
        let direct = pw.at(&x1, &x2);
        for mu in 0..4 {
            err = err.max((d1.coeff[mu] * phase - g1[mu][idx]).norm());
            err = err.max((d2.coeff[mu] * phase - g2[mu][idx]).norm());
            for nu in 0..4 {
                err = err.max((direct[mu][nu] - current.at(idx)[mu][nu]).norm());
            }
        }
    }
    assert!(err < 1e-12, "{err:e}");
    assert!(current.divergence(3).is_err());
    let mut csv = Vec::new();
    current.write_csv(&mut csv).unwrap();
    let text = String::from_utf8(csv).unwrap();
    assert_eq!(text.lines().count(), grid.points() + 1);
    assert!(text.starts_with("x,y,z,j00_re,j00_im,j01_re"));
}

fn gaussian_field(grid: Grid3, p0_total: f64) -> InternalField {
    let u = spinor(9);
    let chi = SpinorGrid::from_fn(grid, move |x| {
        let r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
        u * Complex64::from_polar((-r2 / 2.0).exp(), 0.8 * x[1])
    });
    let chi2 = chi.scaled(Complex64::new(0.2, 0.4));
    InternalField::new(
        FourVector::at_rest(p0_total),
        vec![EnergyMode { p0: 0.1, chi }, EnergyMode { p0: -0.3, chi: chi2 }],
    )
    .unwrap()
}

#[test]
fn relative_phases_leave_the_kernel_invariant() {
    let grid = Grid3::centered(12, 8.0).unwrap();
    let field = gaussian_field(grid, 2.5);
    let yukawa = YukawaTanh::new(1.2, 1.5, 1.0).unwrap();
    let g = GammaSet::default();
    for phase in [
        GaugePhase::RelativeOnly {
            constant: 0.7,
            c: [0.0; 4],
        },
        GaugePhase::RelativeOnly {
            constant: -0.2,
            c: [0.3, 0.5, -1.0, 0.25],
        },
    ] {
        let report = gauge_check(&SazdjianKernel, &yukawa, &g, &field, phase).unwrap();
        assert_eq!(report.total_before, report.total_after);
        assert!(report.kernel_change.abs() <= 1e-10, "{report:?}");
    }
}

#[test]
fn total_momentum_phases_shift_the_kernel() {
    let grid = Grid3::centered(12, 8.0).unwrap();
    let field = gaussian_field(grid, 2.5);
    let yukawa = YukawaTanh::new(1.2, 1.5, 1.0).unwrap();
    let g = GammaSet::default();
    let report = gauge_check(
        &SazdjianKernel,
        &yukawa,
        &g,
        &field,
        GaugePhase::TotalDependent {
            a: [0.4, 0.0, 0.0, 0.0],
        },
    )
    .unwrap();
    assert_eq!(report.total_after, FourVector::at_rest(2.9));

    let shifted = InternalField::new(FourVector::at_rest(2.9), field.modes().to_vec()).unwrap();
    let k_after = build_kernel(&SazdjianKernel, &yukawa, &FourVector::at_rest(2.9), &grid, &g).unwrap();
    let k_before = build_kernel(&SazdjianKernel, &yukawa, &FourVector::at_rest(2.5), &grid, &g).unwrap();
    let expected = interacting_inner_product(&k_after, &shifted, &shifted).unwrap().re
        - interacting_inner_product(&k_before, &field, &field).unwrap().re;
    assert!(report.kernel_change.abs() > 1e-6, "{report:?}");
    assert!((report.kernel_change - expected).abs() <= 1e-12);

    let constant = gauge_check(
        &SazdjianKernel,
        &Constant { value: 0.3 },
        &g,
        &field,
        GaugePhase::TotalDependent {
            a: [0.4, 0.0, 0.0, 0.0],
        },
    )
    .unwrap();
    assert!(constant.kernel_change.abs() <= 1e-12);

    let boost = GaugePhase::TotalDependent {
        a: [0.0, 0.1, 0.0, 0.0],
    };
    assert!(gauge_check(&SazdjianKernel, &yukawa, &g, &field, boost).is_err());
}

#[test]
fn gauge_phase_config_round_trips() {
    let p: GaugePhase = serde_json::from_str(r#"{"kind":"total_dependent","a":[0.5,0,0,0]}"#).unwrap();
    assert_eq!(
        p,
        GaugePhase::TotalDependent {
            a: [0.5, 0.0, 0.0, 0.0]
        }
    );
    assert!(serde_json::from_str::<GaugePhase>(r#"{"kind":"total_dependent","a":[0,0,0,0],"x":1}"#).is_err());
}

#[test]
fn plane_wave_current_serializes() {
    let sys = system(Zero, 1.0);
    let a = solution(&sys, [1.0, 0.0, 0.0], 1);
    let json = j_free(&sys.gammas, &a, &a).to_json();
    assert!(json.get("coeff").is_some() && json.get("q1").is_some());
}
