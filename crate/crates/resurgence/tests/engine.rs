//! Cross-method and monodromy checks for the continuation engine.

use num::complex::Complex64;
use resurgence::convolution::{
    continued_unit_convolution, deconvolve_unit, unit_prepend_convolution, ContinuationSettings,
    Method,
};
use resurgence::germ::Germ;
use resurgence::omega::{OmegaSet, SurfacePath};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn loop_around_one(end: (f64, f64)) -> SurfacePath {
    SurfacePath::from_points(&[
        (0.0, 0.0),
        (0.4, -0.5),
        (1.6, -0.5),
        (1.6, 0.5),
        (0.4, 0.5),
        end,
    ])
    .unwrap()
}

/// Branch-tracked direct path integral of a closed-form integrand along a
/// polyline: the independent oracle for continued values of `1 * phi`.
fn path_integral_oracle<F>(path: &SurfacePath, mut integrand: F) -> Complex64
where
    F: FnMut(Complex64, &mut f64) -> Complex64,
{
    // `theta` carries the accumulated argument of (1 - u) along the path,
    // which the integrand uses for its branch; fine trapezoid sampling keeps
    // it continuous.
    let mut acc = Complex64::new(0.0, 0.0);
    let mut theta = 0.0f64; // arg(1 - u) starts at arg(1) = 0
    for seg in path.vertices().windows(2) {
        let (a, b) = (seg[0], seg[1]);
        let steps = 4000;
        let mut seg_acc = Complex64::new(0.0, 0.0);
        let mut prev_u = a;
        let mut prev_f = integrand(prev_u, &mut theta);
        for k in 1..=steps {
            let u = a + (b - a) * (k as f64 / steps as f64);
            let f = integrand(u, &mut theta);
            seg_acc += (f + prev_f) * 0.5 * (u - prev_u);
            prev_u = u;
            prev_f = f;
        }
        acc += seg_acc;
    }
    acc
}

#[test]
fn monodromy_single_geometric_factor() {
    // 1 * (1/(1-zeta)) = -log(1-zeta); a positive loop around 1 to 0.5 picks
    // up -2 pi i.
    let omega = OmegaSet::nonnegative_integers(12.0).unwrap();
    let path = loop_around_one((0.5, 0.0));
    let settings = ContinuationSettings {
        grid_level: 3,
        tol: 1e-6,
        ..Default::default()
    };
    let got = continued_unit_convolution(&[Germ::Geometric], &path, &omega, &settings).unwrap();
    assert_eq!(got.method, Method::FlowDeformation);
    let expect = -(c(0.5, 0.0).ln()) - c(0.0, std::f64::consts::TAU);
    assert!(
        (got.value - expect).norm() < 1e-6,
        "got {} expected {expect} (err {:.2e})",
        got.value,
        (got.value - expect).norm()
    );
}

#[test]
fn flow_agrees_with_principal_formula_on_principal_paths() {
    let omega = OmegaSet::integer_window(12.0).unwrap();
    let path = SurfacePath::from_points(&[(0.0, 0.0), (0.3, 0.55), (0.62, 0.3)]).unwrap();
    for n in 1..=3usize {
        let germs = vec![Germ::Geometric; n];
        let settings = ContinuationSettings {
            grid_level: 3,
            tol: 1e-5,
            force_flow: true,
            ..Default::default()
        };
        let flowed = continued_unit_convolution(&germs, &path, &omega, &settings).unwrap();
        assert_eq!(flowed.method, Method::FlowDeformation);
        let direct = unit_prepend_convolution(&germs, c(0.62, 0.3), 1e-9, &omega).unwrap();
        assert!(
            (flowed.value - direct).norm() < 1e-5,
            "n = {n}: flow {} vs principal {direct} (err {:.2e})",
            flowed.value,
            (flowed.value - direct).norm()
        );
    }
}

#[test]
fn monodromy_two_geometric_factors_vs_path_integral_oracle() {
    // 1 * phi * phi with phi = 1/(1-zeta): the derivative is the branch
    // continuation of -2 log(1-zeta)/(2-zeta), so the unit-prepended value
    // equals its branch-tracked path integral.
    let omega = OmegaSet::nonnegative_integers(12.0).unwrap();
    let path = loop_around_one((0.5, 0.0));
    let settings = ContinuationSettings {
        grid_level: 3,
        tol: 1e-5,
        ..Default::default()
    };
    let got =
        continued_unit_convolution(&[Germ::Geometric, Germ::Geometric], &path, &omega, &settings)
            .unwrap();

    let mut prev = c(1.0, 0.0); // 1 - u at u = 0
    let oracle = path_integral_oracle(&path, |u, theta| {
        let w = c(1.0, 0.0) - u;
        *theta += (w / prev).arg();
        prev = w;
        let log_branch = c(w.norm().ln(), *theta);
        -2.0 * log_branch / (c(2.0, 0.0) - u)
    });
    assert!(
        (got.value - oracle).norm() < 1e-5,
        "flow {} vs oracle {oracle} (err {:.2e})",
        got.value,
        (got.value - oracle).norm()
    );
}

#[test]
fn deformation_independence_of_homotopic_paths() {
    let omega = OmegaSet::nonnegative_integers(12.0).unwrap();
    let a = loop_around_one((0.5, 0.0));
    let b = SurfacePath::from_points(&[
        (0.0, 0.0),
        (0.55, -0.62),
        (1.45, -0.62),
        (1.72, 0.0),
        (1.45, 0.58),
        (0.42, 0.45),
        (0.5, 0.0),
    ])
    .unwrap();
    // Same winding data.
    assert_eq!(
        a.winding_vector(&omega).unwrap(),
        b.winding_vector(&omega).unwrap()
    );
    let settings = ContinuationSettings {
        grid_level: 3,
        tol: 1e-5,
        ..Default::default()
    };
    let va = continued_unit_convolution(&[Germ::Geometric], &a, &omega, &settings).unwrap();
    let vb = continued_unit_convolution(&[Germ::Geometric], &b, &omega, &settings).unwrap();
    assert!(
        (va.value - vb.value).norm() <= 2.0 * (va.error_estimate + vb.error_estimate) + 2e-6,
        "va {} vs vb {}",
        va.value,
        vb.value
    );
}

#[test]
fn deconvolve_recovers_single_factor_on_second_sheet() {
    // phi * (nothing else): deconvolving 1 * phi on a circle recovers the
    // continued phi itself, here the single-valued 1/(1-zeta) after a loop.
    let omega = OmegaSet::nonnegative_integers(12.0).unwrap();
    let base = loop_around_one((0.5, 0.0));
    let settings = ContinuationSettings {
        grid_level: 2,
        tol: 1e-5,
        ..Default::default()
    };
    let radius = 0.08;
    let value = deconvolve_unit(
        |z| {
            let mut verts: Vec<(f64, f64)> = base
                .vertices()
                .iter()
                .map(|v| (v.re, v.im))
                .collect();
            verts.push((z.re, z.im));
            let path = SurfacePath::from_points(&verts).unwrap();
            continued_unit_convolution(&[Germ::Geometric], &path, &omega, &settings)
                .map(|v| v.value)
        },
        c(0.5, 0.0),
        radius,
        16,
    )
    .unwrap();
    let expect = Germ::Geometric
        .continue_along(&base, &omega)
        .unwrap();
    assert!(
        (value - expect).norm() < 1e-4,
        "deconvolved {value} vs {expect}"
    );
}
