use num_complex::Complex64;
use serde_json::{json, Value};
use tbdkit::grid::Grid3;
use tbdkit::positivity::{
    eigenvalue_map, h_function, h_function_simplified, scalar_bound_check, scan, violation_radius, write_csv,
    yukawa_radius, Branch,
};
use tbdkit::potentials::{EnergyIndependent, GFunction, Potential, TanhOfG, YukawaTanh, Zero};
use tbdkit::scalar_product::{CraterKernel, FreeKernel, SazdjianKernel};
use tbdkit::spinor::GammaSet;

const OMEGA: f64 = 0.567_143_290_409_783_8;

/// `V = f(-x⊥²)` with no energy dependence and no bound on `|f|`.
#[derive(Debug)]
struct Profiled(GFunction);

impl Potential for Profiled {
    fn name(&self) -> &'static str {
        "profiled"
    }
    fn record(&self) -> Value {
        json!({"kind": "profiled"})
    }
    fn value(&self, x_perp_sq: f64, _: f64) -> tbdkit::Result<f64> {
        Ok(self.0.eval(-x_perp_sq))
    }
    fn d_value_d_p_sq(&self, _: f64, _: f64) -> tbdkit::Result<f64> {
        Ok(0.0)
    }
    fn value_complex(&self, x_perp_sq: f64, _: Complex64) -> tbdkit::Result<Complex64> {
        Ok(Complex64::new(self.0.eval(-x_perp_sq), 0.0))
    }
    fn depends_on_energy(&self) -> bool {
        false
    }
}

fn unit_yukawa() -> YukawaTanh {
    let g = (4.0 * std::f64::consts::PI).sqrt();
    YukawaTanh::new(g, g, 1.0).unwrap()
}

#[test]
fn tanh_family_passes() {
    let g = GammaSet::default();
    let grid = Grid3::centered(12, 6.0).unwrap();
    for amplitude in [0.5, 2.0, 8.0] {
        let potential = TanhOfG {
            g: GFunction::Gaussian { amplitude, width: 1.0 },
        };
        let report = scan(&SazdjianKernel, &potential, &[1.0, 4.0, 9.0], &grid, &g).unwrap();
        assert!(
            report.passed && report.violation_set.is_empty(),
            "{}",
            report.min_eigenvalue
        );
        assert!(report.analytic_radius.is_none());
    }
}

#[test]
fn free_kernel_passes() {
    let g = GammaSet::default();
    let grid = Grid3::centered(8, 4.0).unwrap();
    for flavor in [
        &FreeKernel as &dyn tbdkit::scalar_product::KernelFlavor,
        &SazdjianKernel,
        &CraterKernel,
    ] {
        let report = scan(flavor, &Zero, &[2.0], &grid, &g).unwrap();
        assert!(report.passed);
        assert_eq!(report.min_eigenvalue, 1.0);
    }
}

#[test]
fn yukawa_violation_region_matches_the_analytic_radius() {
    let g = GammaSet::default();
    let grid = Grid3::centered(24, 3.0).unwrap();
    let spacing = grid.spacing();
    let report = scan(&SazdjianKernel, &unit_yukawa(), &[1.0], &grid, &g).unwrap();
    assert!(!report.passed && !report.violation_set.is_empty());
    let r_star = report.analytic_radius.unwrap();
    assert!((r_star - OMEGA).abs() <= 1e-9);
    assert!(report.violation_set.iter().all(|p| p.r < r_star));
    let b = report.boundaries[0];
    assert!(r_star - b.max_violating_r.unwrap() <= spacing);
    assert!(report.argmin.r < r_star && report.argmin.min_eigenvalue == report.min_eigenvalue);

    let crater = scan(&CraterKernel, &unit_yukawa(), &[1.0], &grid, &g).unwrap();
    assert_eq!(crater.violation_set.len(), report.violation_set.len());
}

#[test]
fn larger_total_energy_shrinks_the_violation_region() {
    let g = GammaSet::default();
    let grid = Grid3::centered(16, 3.0).unwrap();
    let report = scan(&SazdjianKernel, &unit_yukawa(), &[1.0, 4.0, 16.0], &grid, &g).unwrap();
    let radii: Vec<f64> = report.boundaries.iter().map(|b| b.analytic_radius.unwrap()).collect();
    assert!(radii.windows(2).all(|w| w[1] < w[0]));
    assert_eq!(report.analytic_radius, Some(radii[0]));
    for b in &report.boundaries {
        if let Some(r) = b.max_violating_r {
            assert!(r < b.analytic_radius.unwrap());
        }
    }
}

#[test]
fn scan_errors_propagate() {
    let g = GammaSet::default();
    let with_origin = Grid3::new(8, 2.0, 0.0).unwrap();
    assert!(scan(&SazdjianKernel, &unit_yukawa(), &[1.0], &with_origin, &g).is_err());
    let grid = Grid3::centered(8, 2.0).unwrap();
    assert!(scan(&SazdjianKernel, &Zero, &[], &grid, &g).is_err());
    assert!(scan(&SazdjianKernel, &Zero, &[-1.0], &grid, &g).is_err());
}

#[test]
fn h_function_examples() {
    assert_eq!(h_function(0.0, Branch::Minus), 1.0);
    assert!(h_function(0.5, Branch::Minus).abs() <= 1e-12);
    assert!(h_function(1.0, Branch::Minus) < 0.0);
    for i in 1..=100 {
        let y = 0.5 + 0.05 * i as f64;
        assert!(h_function(y, Branch::Minus) < 0.0);
        assert!(h_function(y, Branch::Plus) > 0.0);
    }
    for i in 0..=1000 {
        let y = 0.01 * i as f64;
        for branch in [Branch::Plus, Branch::Minus] {
            assert!((h_function(y, branch) - h_function_simplified(y, branch)).abs() <= 1e-14);
        }
    }
}

#[test]
fn violation_radius_examples() {
    let four_pi = 4.0 * std::f64::consts::PI;
    let r = violation_radius(four_pi.sqrt(), four_pi.sqrt(), 1.0, 1.0).unwrap();
    assert!((r - OMEGA).abs() <= 1e-9, "{r}");
    assert!((r * r.exp() - 1.0).abs() <= 1e-11);

    let c = 0.37;
    let r0 = violation_radius(four_pi * c, 1.0, 0.0, 1.0).unwrap();
    assert!((r0 - c).abs() <= 1e-12);

    let r2 = violation_radius(four_pi.sqrt(), four_pi.sqrt(), 1.0, 2.0).unwrap();
    assert!(r2 < r);
    assert_eq!(violation_radius(-1.0, 2.0, 1.0, 1.0).unwrap(), 0.0);
    assert_eq!(violation_radius(0.0, 2.0, 1.0, 1.0).unwrap(), 0.0);
    assert_eq!(
        violation_radius(1.0, 1.0, 1.0, -1.0).unwrap(),
        violation_radius(1.0, 1.0, 1.0, 1.0).unwrap()
    );
    assert!(violation_radius(1.0, 1.0, 1.0, 0.0).is_err());
    assert_eq!(yukawa_radius(&unit_yukawa(), 1.0).unwrap(), r);
}

#[test]
fn scalar_bound_examples() {
    let tanh = TanhOfG {
        g: GFunction::Polynomial {
            coeffs: vec![3.0, -2.0, 0.5],
        },
    };
    let view = EnergyIndependent::new(&tanh).unwrap();
    assert!(scalar_bound_check(&view, 25.0, 1001).unwrap().passed());

    let big = GFunction::Gaussian {
        amplitude: 1.5,
        width: 1.0,
    };
    assert!(!scalar_bound_check(&big, 25.0, 1001).unwrap().passed());

    let one = GFunction::Constant { value: 1.0 };
    let bound = scalar_bound_check(&one, 25.0, 11).unwrap();
    assert!(bound.within_closed_bound && !bound.within_open_bound);

    assert!(EnergyIndependent::new(&unit_yukawa()).is_err());
    assert!(scalar_bound_check(&one, 0.0, 11).is_err());
}

#[test]
fn scan_agrees_with_scalar_bound_for_energy_independent_potentials() {
    let g = GammaSet::default();
    let grid = Grid3::centered(10, 5.0).unwrap();
    let s_max = (0..grid.points()).map(|i| grid.radius_sq(i)).fold(0.0, f64::max);
    for f in [
        GFunction::Gaussian {
            amplitude: 0.9,
            width: 1.0,
        },
        GFunction::Gaussian {
            amplitude: 1.5,
            width: 1.0,
        },
        GFunction::Gaussian {
            amplitude: -1.5,
            width: 2.0,
        },
        GFunction::Polynomial {
            coeffs: vec![0.2, 0.05],
        },
        GFunction::Polynomial { coeffs: vec![0.2, 0.5] },
        GFunction::Polynomial {
            coeffs: vec![0.2, 0.06],
        },
        GFunction::Constant { value: 1.0 },
        GFunction::Constant { value: -0.99 },
    ] {
        let potential = Profiled(f.clone());
        let report = scan(&SazdjianKernel, &potential, &[1.0, 2.0, 5.0], &grid, &g).unwrap();
        // sample the profile exactly where the grid does
        let on_grid = (0..grid.points())
            .map(|i| f.eval(grid.radius_sq(i)).abs())
            .fold(0.0, f64::max);
        let bound = scalar_bound_check(&f, s_max, 2001).unwrap();
        assert_eq!(report.passed, on_grid <= 1.0, "{f:?}");
        assert_eq!(report.passed, bound.passed(), "{f:?}");
    }
}

#[test]
fn eigenvalue_map_exports_csv() {
    let g = GammaSet::default();
    let grid = Grid3::centered(4, 2.0).unwrap();
    let points = eigenvalue_map(&SazdjianKernel, &unit_yukawa(), 1.0, &grid, &g).unwrap();
    let mut out = Vec::new();
    write_csv(&points, &mut out).unwrap();
    let text = String::from_utf8(out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,y,z,r,p_sq,min_eigenvalue"));
    assert_eq!(lines.count(), 64);
}

#[test]
fn report_serializes() {
    let g = GammaSet::default();
    let grid = Grid3::centered(4, 2.0).unwrap();
    let report = scan(&SazdjianKernel, &unit_yukawa(), &[1.0], &grid, &g).unwrap();
    let json = serde_json::to_value(&report).unwrap();
    assert_eq!(json["flavor"], "sazdjian");
    assert_eq!(json["potential"]["kind"], "yukawa_tanh");
    assert_eq!(json["passed"], false);
}
