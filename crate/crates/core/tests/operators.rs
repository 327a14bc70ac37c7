use std::sync::Arc;

use nalgebra::Vector4;
use num_complex::Complex64;
use tbdkit::grid::{Grid3, SpinorGrid};
use tbdkit::kinematics::{FourVector, MassPair};
use tbdkit::operators::{
    dirac_null_space, general_compatibility_check, product_spinor, EnergyMode, InternalField, LongitudinalProbe,
    PlaneWaveState, ScanWindow, TransverseScalar, TwoBodyDiracSystem,
};
use tbdkit::potentials::{Constant, GFunction, Potential, TanhOfG, YukawaTanh, Zero};
use tbdkit::spinor::{act1, act2, GammaSet, Mat4, Spinor16};

fn system(potential: impl Potential + 'static, m1: f64, m2: f64) -> TwoBodyDiracSystem {
    TwoBodyDiracSystem::new(MassPair::new(m1, m2).unwrap(), Arc::new(potential), GammaSet::default())
}

fn tanh_gaussian() -> TanhOfG {
    TanhOfG {
        g: GFunction::Gaussian {
            amplitude: 0.8,
            width: 1.0,
        },
    }
}

fn spinor(seed: u64) -> Spinor16 {
    Spinor16::from_fn(|i, _| {
        let x = (seed as f64 + 1.0) * (i as f64 + 0.7);
        Complex64::new(x.sin(), (1.3 * x).cos())
    })
}

#[test]
fn free_plane_wave_is_annihilated() {
    let g = GammaSet::default();
    let total = FourVector::at_rest(2.0 * (1.0f64 + 1.0).sqrt());
    let rel = FourVector::new(0.0, 1.0, 0.0, 0.0);
    let p1 = total * 0.5 + rel;
    let p2 = total * 0.5 - rel;
    let u1 = dirac_null_space(&g, &p1, 1.0);
    assert_eq!(u1.len(), 2);
    let u = product_spinor(
        &u1[0],
        &Vector4::new(
            Complex64::new(0.3, 0.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(-0.5, 0.2),
            Complex64::new(0.1, 0.0),
        ),
    );
    let state = PlaneWaveState::new(u, p1, p2).unwrap();
    let grid = Grid3::centered(8, 2.0 * std::f64::consts::PI).unwrap();
    let field = InternalField::from_plane_wave(grid, &state).unwrap();
    let sys = system(Zero, 1.0, 1.0);
    let out = sys.apply_d1(&field).unwrap();
    assert!(out.norm() / field.norm() < 1e-13);
}

#[test]
fn spectral_action_on_plane_waves_matches_matrix_form() {
    let grid = Grid3::centered(12, 2.0 * std::f64::consts::PI).unwrap();
    let sys = system(Constant { value: 0.3 }, 1.0, 1.4);
    let total = FourVector::at_rest(2.7);
    for (seed, k) in [(1u64, [1.0, 0.0, 0.0]), (2, [2.0, -1.0, 3.0]), (3, [0.0, 0.0, -5.0])] {
        let rel = FourVector::from_parts(0.37, k);
        let state = PlaneWaveState::from_total_relative(total, rel, spinor(seed)).unwrap();
        let field = InternalField::from_plane_wave(grid, &state).unwrap();
        let (m1, m2) = sys.plane_wave_matrices(0.3, &total, &rel);
        let d1 = sys.apply_d1(&field).unwrap();
        let d2 = sys.apply_d2(&field).unwrap();
        let e1 = SpinorGrid::plane_wave(grid, &m1.apply(&state.u), k).unwrap();
        let e2 = SpinorGrid::plane_wave(grid, &m2.apply(&state.u), k).unwrap();
        assert!(d1.modes()[0].chi.sub(&e1).unwrap().max_abs() < 1e-12);
        assert!(d2.modes()[0].chi.sub(&e2).unwrap().max_abs() < 1e-12);
    }
}

/// Fourth-order central differences applied to the analytic closure.
fn fd_d1(sys: &TwoBodyDiracSystem, total: f64, p0: f64, chi: &dyn Fn([f64; 3]) -> Spinor16, x: [f64; 3]) -> Spinor16 {
    let g = &sys.gammas;
    let h = 1e-3;
    let v = |y: [f64; 3]| {
        let r2 = y[0] * y[0] + y[1] * y[1] + y[2] * y[2];
        sys.potential.value(-r2, total * total).unwrap()
    };
    let vchi = |y: [f64; 3]| chi(y) * Complex64::new(v(y), 0.0);
    let deriv = |f: &dyn Fn([f64; 3]) -> Spinor16, axis: usize| {
        let at = |s: f64| {
            let mut y = x;
            y[axis] += s * h;
            f(y)
        };
        (at(-2.0) - at(-1.0) * Complex64::new(8.0, 0.0) + at(1.0) * Complex64::new(8.0, 0.0) - at(2.0))
            / Complex64::new(12.0 * h, 0.0)
    };
    let i = Complex64::new(0.0, 1.0);
    let c = |s: f64| Complex64::new(s, 0.0);
    let g0 = g.gamma(0).unwrap();
    // particle 1: γ⁰(P⁰/2 + p⁰) - Σ γ^j (-i ∂_j), minus m₁
    let mut out = act1(
        &(g0 * c(0.5 * total + p0) - Mat4::identity() * c(sys.masses.m1)),
        &chi(x),
    );
    // particle 2 on Vχ: γ⁰(P⁰/2 - p⁰) - Σ γ^j (i ∂_j), minus m₂
    out += act2(
        &(g0 * c(0.5 * total - p0) - Mat4::identity() * c(sys.masses.m2)),
        &vchi(x),
    );
    for j in 0..3 {
        let gj = g.gamma(j + 1).unwrap();
        out -= act1(gj, &(deriv(chi, j) * (-i)));
        out -= act2(gj, &(deriv(&vchi, j) * i));
    }
    out
}

#[test]
fn d1_matches_finite_difference_oracle() {
    let sys = system(tanh_gaussian(), 1.0, 1.3);
    let total = 2.9;
    let p0 = 0.21;
    let u = spinor(5) / Complex64::new(spinor(5).norm(), 0.0);
    let sigma = 0.6;
    let chi = move |x: [f64; 3]| {
        let r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
        let phase = Complex64::from_polar((-r2 / (2.0 * sigma * sigma)).exp(), 1.5 * x[0] - 0.5 * x[2]);
        u * phase
    };
    let grid = Grid3::centered(32, 8.0).unwrap();
    let field = InternalField::single(FourVector::at_rest(total), p0, SpinorGrid::from_fn(grid, chi)).unwrap();
    let spectral = sys.apply_d1(&field).unwrap();
    let s = &spectral.modes()[0].chi;
    let (mut diff, mut norm) = (0.0, 0.0);
    for idx in 0..grid.points() {
        let fd = fd_d1(&sys, total, p0, &chi, grid.position(idx));
        diff += (s.point(idx) - fd).norm_squared();
        norm += fd.norm_squared();
    }
    let rel = (diff / norm).sqrt();
    assert!(rel < 1e-6, "relative error {rel:e}");
}

fn random_field(grid: Grid3, seed: u64) -> InternalField {
    let modes = [-0.4, 0.1, 0.55]
        .iter()
        .enumerate()
        .map(|(k, &p0)| EnergyMode {
            p0,
            chi: SpinorGrid::random_band_limited(grid, grid.n / 6, seed * 10 + k as u64),
        })
        .collect();
    InternalField::new(FourVector::at_rest(2.6), modes).unwrap()
}

#[test]
fn compatibility_identity_free_and_constant() {
    let grid = Grid3::centered(16, 8.0).unwrap();
    let field = random_field(grid, 3);
    let free = system(Zero, 1.0, 1.2).compatibility_residual(&field).unwrap();
    assert!(free.residual < 1e-12 && free.commutator < 1e-12, "{free:?}");
    let constant = system(Constant { value: 0.4 }, 1.0, 1.2)
        .compatibility_residual(&field)
        .unwrap();
    assert!(constant.residual <= 1e-10, "{constant:?}");
    assert!(!constant.aliasing_warning);
}

#[test]
fn compatibility_identity_tanh_gaussian() {
    let grid = Grid3::centered(32, 8.0).unwrap();
    let sys = system(tanh_gaussian(), 1.0, 1.2);
    let report = sys.compatibility_residual(&random_field(grid, 11)).unwrap();
    assert!(report.residual <= 1e-8, "{report:?}");
    assert!(report.commutator > 1e-2, "the identity must be nontrivial: {report:?}");
    assert!(!report.aliasing_warning);
}

#[test]
fn aliasing_guard_flags_rough_fields() {
    let grid = Grid3::centered(16, 8.0).unwrap();
    let rough = SpinorGrid::random_band_limited(grid, 8, 4);
    let field = InternalField::single(FourVector::at_rest(2.6), 0.0, rough).unwrap();
    let report = system(tanh_gaussian(), 1.0, 1.0)
        .compatibility_residual(&field)
        .unwrap();
    assert!(report.aliasing_warning);
}

pub fn gaussian_field(grid: Grid3) -> tbdkit::Result<InternalField> {
    let u = spinor(9);
    let sigma = 0.5;
    let chi = SpinorGrid::from_fn(grid, move |x| {
        let r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
        u * Complex64::from_polar((-r2 / (2.0 * sigma * sigma)).exp(), 0.8 * x[1])
    });
    InternalField::new(FourVector::at_rest(2.6), vec![EnergyMode { p0: 0.15, chi }])
}

#[test]
fn commutator_converges_spectrally() {
    let sys = system(tanh_gaussian(), 1.0, 1.2);
    let study = sys
        .compatibility_convergence(8.0, &[16, 24, 32], 48, gaussian_field)
        .unwrap();
    println!("{study:?}");
    assert!(study.observed_order >= 4.0, "{study:?}");
    assert!(study.identity_residuals.iter().all(|&r| r <= 1e-8));
}

#[test]
fn yukawa_grid_with_origin_is_rejected() {
    let grid = Grid3::new(8, 4.0, 0.0).unwrap();
    let field = InternalField::single(FourVector::at_rest(2.0), 0.0, SpinorGrid::zeros(grid)).unwrap();
    let sys = system(YukawaTanh::new(1.0, 1.0, 1.0).unwrap(), 1.0, 1.0);
    assert!(sys.apply_d1(&field).is_err());
    let moving = InternalField::single(FourVector::new(2.0, 0.1, 0.0, 0.0), 0.0, SpinorGrid::zeros(grid));
    assert!(moving.is_err());
}

#[test]
fn transverse_potentials_pass_directional_check() {
    let yukawa = YukawaTanh::new(2.0, 1.5, 0.7).unwrap();
    let mut samples = Vec::new();
    for k in 0..100 {
        let t = k as f64;
        let total = FourVector::new(
            3.0 + (0.37 * t).sin(),
            0.8 * (0.11 * t).cos(),
            0.5 * (0.23 * t).sin(),
            -0.4 * (0.7 * t).cos(),
        );
        let x = FourVector::new(
            (0.3 * t).cos(),
            1.0 + (0.5 * t).sin(),
            0.4 * (1.7 * t).cos(),
            -0.6 * (0.9 * t).sin(),
        );
        samples.push((x, total));
    }
    let check = general_compatibility_check(&TransverseScalar(&yukawa), &samples).unwrap();
    assert!(check.passed, "{check:?}");
    let tanh = tanh_gaussian();
    assert!(
        general_compatibility_check(&TransverseScalar(&tanh), &samples)
            .unwrap()
            .passed
    );
    let probe = general_compatibility_check(&LongitudinalProbe { strength: 0.2 }, &samples).unwrap();
    assert!(!probe.passed);
}

fn window() -> ScanWindow {
    ScanWindow {
        p0_min: -1.0,
        p0_max: 1.0,
        steps: 401,
    }
}

#[test]
fn free_roots_have_product_null_space() {
    let sys = system(Constant { value: 0.0 }, 1.0, 1.0);
    let p = [0.5, 0.0, 0.0];
    let total = FourVector::at_rest(2.0 * (1.0f64 + 0.25).sqrt());
    let roots = sys.plane_wave_solutions(&total, p, &window()).unwrap();
    assert_eq!(roots.len(), 1);
    assert!(roots[0].p0.abs() < 1e-10);
    assert_eq!(roots[0].basis.len(), 4);
    for u in &roots[0].basis {
        let state = PlaneWaveState::from_total_relative(total, FourVector::from_parts(roots[0].p0, p), *u).unwrap();
        assert!(sys.plane_wave_residual(&state).unwrap() <= 1e-8);
    }
}

#[test]
fn sigma_min_at_off_shell_point() {
    // P = (2.5, 0) with p = 0 puts both particles at energy 1.25 > m = 1,
    // so the stacked free matrix keeps a finite smallest singular value.
    let sys = system(Zero, 1.0, 1.0);
    let s = sys.stacked_sigma_min(&FourVector::at_rest(2.5), [0.0; 3], 0.0).unwrap();
    // on joint eigenvectors of γ₁⁰, γ₂⁰ with eigenvalues s₁, s₂ the stacked matrix
    // has column norm √((1.25s₁ - 1)² + (1.25s₂ + 1)²), smallest at s₁ = 1, s₂ = -1
    assert!((s - 0.353_553_390_593_273_8).abs() < 1e-14, "{s}");
    assert!(sys
        .plane_wave_solutions(&FourVector::at_rest(2.5), [0.0; 3], &window())
        .unwrap()
        .is_empty());
}

#[test]
fn interacting_roots_match_brute_force_scan() {
    let v = 0.3;
    let sys = system(Constant { value: v }, 1.0, 1.0);
    let p = [0.5, 0.0, 0.0];
    let a = (1.0 + v) / (1.0 - v);
    let total = FourVector::at_rest(2.0 * (a * a + 0.25f64).sqrt());
    let roots = sys.plane_wave_solutions(&total, p, &window()).unwrap();
    // brute force: Δp⁰ = 1e-4 over the same window
    let step = 1e-4;
    let n = ((window().p0_max - window().p0_min) / step).round() as usize;
    let sig: Vec<f64> = (0..=n)
        .map(|i| {
            sys.stacked_sigma_min(&total, p, window().p0_min + i as f64 * step)
                .unwrap()
        })
        .collect();
    let mut brute = Vec::new();
    for i in 1..n {
        if sig[i] < sig[i - 1] && sig[i] <= sig[i + 1] && sig[i] < 1e-2 {
            brute.push(window().p0_min + i as f64 * step);
        }
    }
    assert_eq!(roots.len(), brute.len());
    for (r, b) in roots.iter().zip(&brute) {
        assert!((r.p0 - b).abs() <= step, "{} vs {b}", r.p0);
        assert_eq!(r.basis.len(), 4);
        for u in &r.basis {
            let state = PlaneWaveState::from_total_relative(total, FourVector::from_parts(r.p0, p), *u).unwrap();
            assert!(sys.plane_wave_residual(&state).unwrap() <= 1e-8);
        }
    }
}

#[test]
fn unequal_mass_root_sits_at_energy_split() {
    let (m1, m2, v) = (1.0, 1.7, 0.2);
    let sys = system(Constant { value: v }, m1, m2);
    let alpha = (m1 * (1.0 + v * v) + 2.0 * v * m2) / (1.0 - v * v);
    let beta = (m2 * (1.0 + v * v) + 2.0 * v * m1) / (1.0 - v * v);
    let p = [0.0, 0.3, 0.4];
    let e1 = (alpha * alpha + 0.25f64).sqrt();
    let e2 = (beta * beta + 0.25f64).sqrt();
    let total = FourVector::at_rest(e1 + e2);
    let roots = sys
        .plane_wave_solutions(
            &total,
            p,
            &ScanWindow {
                p0_min: -2.0,
                p0_max: 2.0,
                steps: 801,
            },
        )
        .unwrap();
    assert_eq!(roots.len(), 1);
    assert!((roots[0].p0 - 0.5 * (e1 - e2)).abs() < 1e-9, "{:?}", roots[0].p0);
}
