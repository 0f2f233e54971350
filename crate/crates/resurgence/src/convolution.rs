//! Convolution of germs: principal-sheet values by iterated simplex
//! quadrature, and continuation to arbitrary sheets by integrating the
//! deformed-simplex representation produced by the flow.

use num::complex::Complex64;
use num::Zero;

use crate::error::{Error, Result};
use crate::flow::{
    complex_determinant, flow_single_node, FlowField, FlowParams, TailPath,
};
use crate::germ::Germ;
use crate::omega::{segment_point_distance, OmegaSet, SurfacePath};
use crate::quad::adaptive_gk;
use crate::simplex::SimplexGrid;

/// Settings for sheet-continued convolution values.
#[derive(Debug, Clone)]
pub struct ContinuationSettings {
    pub grid_level: u32,
    pub tol: f64,
    pub flow: FlowParams,
    /// Use the flow even on principal-sheet paths (cross-method checks).
    pub force_flow: bool,
}

impl Default for ContinuationSettings {
    fn default() -> Self {
        ContinuationSettings {
            grid_level: 3,
            tol: 1e-6,
            flow: FlowParams::default(),
            force_flow: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    PrincipalFormula,
    FlowDeformation,
}

#[derive(Debug, Clone)]
pub struct ContinuedValue {
    pub value: Complex64,
    pub error_estimate: f64,
    pub method: Method,
}

/// Verify that every singular point of each germ (inside `within`) is an
/// enumerated point of the singularity set.
pub fn check_germ_singularities(germs: &[Germ], omega: &OmegaSet, within: f64) -> Result<()> {
    let tol = 1e-6 * omega.rho();
    for g in germs {
        for w in g.singular_points(within.min(omega.radius())) {
            if !omega.points().iter().any(|p| (p - w).norm() <= tol) {
                return Err(Error::domain(format!(
                    "germ {g:?} has a singular point at {w} outside the declared singularity set"
                )));
            }
        }
    }
    Ok(())
}

fn principal_germ_value(germ: &Germ, zeta: Complex64) -> Result<Complex64> {
    match germ {
        Germ::Taylor(t) => {
            let r = germ.validity_radius();
            if zeta.norm() > 0.8 * r {
                return Err(Error::OutOfDisc {
                    modulus: zeta.norm(),
                    radius: 0.8 * r,
                });
            }
            let mut acc = Complex64::zero();
            for b in t.coeffs().iter().rev() {
                acc = acc * zeta + b;
            }
            Ok(acc)
        }
        g => Ok(g.eval_branch(zeta, &Default::default())),
    }
}

/// Check that the segment `[0, zeta]` stays inside the star-shaped cut plane
/// and clear of the germs' singular points.
fn check_segment_clear(germs: &[Germ], zeta: Complex64, omega: &OmegaSet) -> Result<()> {
    let tol = omega.touch_tolerance();
    for w in omega.points() {
        if w.norm() <= tol {
            continue;
        }
        if segment_point_distance(Complex64::zero(), zeta, *w) <= tol {
            return Err(Error::PathBlocked {
                omega: (w.re, w.im),
            });
        }
    }
    for g in germs {
        for w in g.singular_points(zeta.norm() + 1.0) {
            if segment_point_distance(Complex64::zero(), zeta, w) <= tol {
                return Err(Error::PathBlocked {
                    omega: (w.re, w.im),
                });
            }
        }
    }
    Ok(())
}

/// Axis sizes tried per refinement round, by integration dimension.
fn refinement_schedule(dim: usize) -> &'static [usize] {
    match dim {
        0 | 1 => &[8, 16, 24, 32, 48, 64],
        2 => &[6, 10, 16, 24, 32],
        3 => &[4, 8, 12, 16],
        _ => &[4, 6, 8, 10],
    }
}

/// Iterated quadrature over the simplex of the given dimension, refined
/// until two successive rules agree within `tol`.
fn refine_simplex_quadrature<F>(dim: usize, tol: f64, mut integrand: F) -> Result<(Complex64, f64)>
where
    F: FnMut(&[f64]) -> Result<Complex64>,
{
    let mut previous: Option<Complex64> = None;
    let mut best = Complex64::zero();
    let mut err = f64::INFINITY;
    for &m in refinement_schedule(dim) {
        let grid = SimplexGrid::with_points_per_axis(dim, m, 0);
        let mut acc = Complex64::zero();
        for node in grid.nodes() {
            acc += integrand(&node.s)? * node.weight;
        }
        if let Some(prev) = previous {
            err = (acc - prev).norm();
            best = acc;
            if err <= tol {
                return Ok((best, err));
            }
        } else {
            best = acc;
        }
        previous = Some(acc);
    }
    Err(Error::ToleranceNotMet {
        requested: tol,
        achieved: err,
    })
}

/// Principal-sheet value of `phi_1 * ... * phi_n` at `zeta` by the iterated
/// integral over the (n-1)-simplex; requires the segment `[0, zeta]` inside
/// the cut plane.
pub fn principal_convolution(
    germs: &[Germ],
    zeta: Complex64,
    tol: f64,
    omega: &OmegaSet,
) -> Result<Complex64> {
    if germs.is_empty() {
        return Err(Error::domain("at least one germ is required"));
    }
    check_segment_clear(germs, zeta, omega)?;
    let n = germs.len();
    if n == 1 {
        return principal_germ_value(&germs[0], zeta);
    }
    let (value, _) = refine_simplex_quadrature(n - 1, tol, |s| {
        let mut rest = 1.0;
        let mut prod = Complex64::new(1.0, 0.0);
        for (j, sj) in s.iter().enumerate() {
            prod *= principal_germ_value(&germs[j], sj * zeta)?;
            rest -= sj;
        }
        prod *= principal_germ_value(&germs[n - 1], rest * zeta)?;
        Ok(prod)
    })?;
    // The change of variables zeta_j = s_j zeta contributes zeta^{n-1}.
    Ok(value * zeta.powi(n as i32 - 1))
}

/// Principal-sheet value of `1 * phi_1 * ... * phi_n` at `zeta` via the
/// n-simplex form `zeta^n int_{Delta_n} prod phi_j(s_j zeta) ds`.
pub fn unit_prepend_convolution(
    germs: &[Germ],
    zeta: Complex64,
    tol: f64,
    omega: &OmegaSet,
) -> Result<Complex64> {
    if germs.is_empty() {
        return Err(Error::domain("at least one germ is required"));
    }
    check_segment_clear(germs, zeta, omega)?;
    let n = germs.len();
    let (value, _) = refine_simplex_quadrature(n, tol, |s| {
        let mut prod = Complex64::new(1.0, 0.0);
        for (j, sj) in s.iter().enumerate() {
            prod *= principal_germ_value(&germs[j], sj * zeta)?;
        }
        Ok(prod)
    })?;
    Ok(value * zeta.powi(n as i32))
}

/// Split a continuation path into its in-disc head and the flow tail
/// starting at the first crossing of `|gamma| = r0`.
pub(crate) fn split_flow_tail(path: &SurfacePath, r0: f64) -> Option<Vec<Complex64>> {
    let verts = path.vertices();
    for (k, w) in verts.windows(2).enumerate() {
        let (a, b) = (w[0], w[1]);
        if b.norm() < r0 && a.norm() < r0 {
            continue;
        }
        // First segment reaching |gamma| = r0: solve |a + t(b-a)| = r0.
        let d = b - a;
        let aa = d.norm_sqr();
        let bb = 2.0 * (a.re * d.re + a.im * d.im);
        let cc = a.norm_sqr() - r0 * r0;
        let disc = bb * bb - 4.0 * aa * cc;
        if disc < 0.0 {
            continue;
        }
        let t = (-bb + disc.sqrt()) / (2.0 * aa);
        if !(0.0..=1.0).contains(&t) {
            continue;
        }
        let start = a + d * t;
        let mut tail = vec![start];
        if (b - start).norm() > 1e-12 {
            tail.push(b);
        }
        tail.extend_from_slice(&verts[k + 2..]);
        return Some(tail);
    }
    None
}

/// Continuation of `1 * phi_1 * ... * phi_n` along a path of the spread
/// surface. Principal-sheet paths evaluate through the star-shaped formula;
/// other sheets (or `force_flow`) run the deformed-simplex flow: the path is
/// split into a straight head ending on `|zeta| = 0.45 rho` (homotopic to the
/// in-disc part) and an admissible tail along which the simplex is
/// transported, and the value is the quadrature of
/// `prod phi_j(xi_j(s)) det[d xi_i / d s_j]` over the deformed simplex.
pub fn continued_unit_convolution(
    germs: &[Germ],
    path: &SurfacePath,
    omega: &OmegaSet,
    settings: &ContinuationSettings,
) -> Result<ContinuedValue> {
    path.validate(omega)?;
    check_germ_singularities(germs, omega, path.max_extent() + 1.0)?;
    let principal = path.is_principal_sheet(omega)?;
    if principal && !settings.force_flow {
        let value = unit_prepend_convolution(germs, path.endpoint(), settings.tol, omega)?;
        return Ok(ContinuedValue {
            value,
            error_estimate: settings.tol,
            method: Method::PrincipalFormula,
        });
    }

    let n = germs.len();
    let rho = omega.rho();
    let r0 = 0.45 * rho;
    let tail_vertices = match split_flow_tail(path, r0) {
        Some(v) => v,
        None => {
            // The whole path stays inside the half-rho disc: principal.
            let value = unit_prepend_convolution(germs, path.endpoint(), settings.tol, omega)?;
            return Ok(ContinuedValue {
                value,
                error_estimate: settings.tol,
                method: Method::PrincipalFormula,
            });
        }
    };
    let tail = TailPath::new(tail_vertices)?;
    let measured = tail.min_distance_to(omega);
    let delta = measured.min(0.8 * r0) * 0.999;
    if delta <= 32.0 * omega.touch_tolerance() {
        return Err(Error::DeltaViolated {
            measured,
            delta,
            t: 0.0,
        });
    }

    // The deformed-simplex integrand is only piecewise smooth (the flow map
    // inherits the kinks of the distance function), so a fixed tensor rule
    // stalls; adaptive panels per nested axis concentrate the work at the
    // creases and at the pinch points where the contour approaches the
    // singularity set.
    let integrator = DeformedSimplexIntegrand {
        germs,
        tail: &tail,
        omega,
        delta,
        params: &settings.flow,
        n,
    };
    let (value, err) = integrator.integrate(settings.tol * 0.5)?;
    if err > settings.tol {
        return Err(Error::ToleranceNotMet {
            requested: settings.tol,
            achieved: err,
        });
    }
    Ok(ContinuedValue {
        value,
        error_estimate: err,
        method: Method::FlowDeformation,
    })
}

struct DeformedSimplexIntegrand<'a> {
    germs: &'a [Germ],
    tail: &'a TailPath,
    omega: &'a OmegaSet,
    delta: f64,
    params: &'a FlowParams,
    n: usize,
}

impl DeformedSimplexIntegrand<'_> {
    /// `prod_j phi_j(xi_j(s)) det[d xi_i / d s_j]` at one simplex node.
    fn leaf(&self, s: &[f64]) -> Result<Complex64> {
        let node = flow_single_node(self.tail, self.n, s, self.omega, self.delta, self.params)?;
        let mut prod = complex_determinant(&node.jacobian, self.n);
        if prod.norm() == 0.0 {
            return Ok(Complex64::zero());
        }
        for (i, germ) in self.germs.iter().enumerate() {
            let vertices = component_continuation_path(node.trajectories[i].as_slice());
            prod *= germ.continue_along_vertices(&vertices, self.omega)?;
        }
        Ok(prod)
    }

    fn integrate(&self, tol: f64) -> Result<(Complex64, f64)> {
        let mut prefix = Vec::with_capacity(self.n);
        self.integrate_axis(&mut prefix, 1.0, tol)
    }

    /// Adaptive Gauss-Kronrod along one nested axis; inner axes get a
    /// tighter budget so their error is subdominant.
    fn integrate_axis(
        &self,
        prefix: &mut Vec<f64>,
        remaining: f64,
        tol: f64,
    ) -> Result<(Complex64, f64)> {
        let axis = prefix.len();
        if remaining <= 0.0 {
            return Ok((Complex64::zero(), 0.0));
        }
        if axis + 1 == self.n {
            let mut f = |x: f64| -> Result<Complex64> {
                prefix.push(x);
                let v = self.leaf(prefix);
                prefix.pop();
                v
            };
            return adaptive_gk(&mut f, 0.0, remaining, tol);
        }
        let inner_tol = (tol * 0.25 / remaining.max(1e-3)).max(1e-13);
        let mut inner_err_max = 0.0f64;
        let mut f = |x: f64| -> Result<Complex64> {
            prefix.push(x);
            let r = self.integrate_axis(prefix, remaining - x, inner_tol);
            prefix.pop();
            let (v, e) = r?;
            inner_err_max = inner_err_max.max(e);
            Ok(v)
        };
        let (v, e_outer) = adaptive_gk(&mut f, 0.0, remaining, tol)?;
        Ok((v, e_outer + inner_err_max * remaining))
    }
}

/// Quadrature of `prod_j phi_j(xi_j) det J` over a completed flow field.
pub fn sum_flow_field(germs: &[Germ], field: &FlowField, omega: &OmegaSet) -> Result<Complex64> {
    let n = field.n;
    assert_eq!(germs.len(), n);
    let mut acc = Complex64::zero();
    for node in &field.nodes {
        let mut prod = complex_determinant(&node.jacobian, n);
        if prod.norm() == 0.0 {
            continue;
        }
        for (i, germ) in germs.iter().enumerate() {
            let vertices = component_continuation_path(node.trajectories[i].as_slice());
            prod *= germ.continue_along_vertices(&vertices, omega)?;
        }
        acc += prod * node.weight;
    }
    Ok(acc)
}

/// Full continuation path of one component: the straight run from the origin
/// to `s_i gamma(a)` followed by the recorded trajectory.
fn component_continuation_path(trajectory: &[Complex64]) -> Vec<Complex64> {
    let mut vertices = Vec::with_capacity(trajectory.len() + 1);
    vertices.push(Complex64::zero());
    for p in trajectory {
        if (p - vertices.last().unwrap()).norm() > 0.0 {
            vertices.push(*p);
        }
    }
    if vertices.len() == 1 {
        // Component pinned at the origin for the whole flow.
        vertices.push(Complex64::zero());
    }
    vertices
}

/// Recover `phi_1 * ... * phi_n (center)` from values of the unit-prepended
/// product on a circle around `center`, through the derivative relation:
/// trapezoidal Cauchy integral on `m` equispaced points (spectral accuracy).
pub fn deconvolve_unit<F>(
    mut field: F,
    center: Complex64,
    radius: f64,
    m: usize,
) -> Result<Complex64>
where
    F: FnMut(Complex64) -> Result<Complex64>,
{
    if !(radius > 0.0) || m < 4 {
        return Err(Error::domain(
            "deconvolution needs a positive radius and at least 4 points",
        ));
    }
    let mut acc = Complex64::zero();
    for k in 0..m {
        let theta = std::f64::consts::TAU * k as f64 / m as f64;
        let dir = Complex64::from_polar(1.0, theta);
        let v = field(center + dir * radius)?;
        acc += v / dir;
    }
    Ok(acc / (m as f64 * radius))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn om() -> OmegaSet {
        OmegaSet::integer_window(12.0).unwrap()
    }

    /// Closed form of geometric * geometric by partial fractions.
    fn geometric_pair_oracle(zeta: Complex64) -> Complex64 {
        -2.0 * (c(1.0, 0.0) - zeta).ln() / (c(2.0, 0.0) - zeta)
    }

    #[test]
    fn convolving_ones_integrates_to_zeta() {
        let omega = om();
        let z = c(0.4, 0.2);
        let v = principal_convolution(&[Germ::One, Germ::One], z, 1e-12, &omega).unwrap();
        assert!((v - z).norm() < 1e-11, "1*1 = {v}");
        let u = unit_prepend_convolution(&[Germ::One], z, 1e-12, &omega).unwrap();
        assert!((u - z).norm() < 1e-12, "1*1 via unit prepend = {u}");
    }

    #[test]
    fn geometric_squared_matches_closed_form() {
        let omega = om();
        let z = c(0.5, 0.0);
        let v =
            principal_convolution(&[Germ::Geometric, Germ::Geometric], z, 1e-10, &omega).unwrap();
        let oracle = geometric_pair_oracle(z);
        assert!((v - oracle).norm() < 1e-9, "{v} vs {oracle}");
        assert!((oracle - c(0.9241962, 0.0)).norm() < 1e-6);
    }

    #[test]
    fn monomial_convolution_rule() {
        // B(z^{-a-1} z^{-b-1}): (zeta^a/a!) * (zeta^b/b!) = zeta^{a+b+1}/(a+b+1)!
        // with a = 1, b = 2 via Taylor germs.
        let omega = om();
        let mut ca = vec![c(0.0, 0.0); 8];
        ca[1] = c(1.0, 0.0); // zeta / 1!
        let mut cb = vec![c(0.0, 0.0); 8];
        cb[2] = c(0.5, 0.0); // zeta^2 / 2!
        let ga = Germ::Taylor(crate::germ::TaylorGerm::new(ca, 1.0));
        let gb = Germ::Taylor(crate::germ::TaylorGerm::new(cb, 1.0));
        let z = c(0.3, 0.1);
        let v = principal_convolution(&[ga, gb], z, 1e-12, &omega).unwrap();
        let expect = z.powi(4) / 24.0;
        assert!((v - expect).norm() < 1e-12, "{v} vs {expect}");
    }

    #[test]
    fn unit_prepend_of_geometric_is_minus_log() {
        let omega = om();
        let z = c(0.5, 0.0);
        let v = unit_prepend_convolution(&[Germ::Geometric], z, 1e-12, &omega).unwrap();
        let expect = -(c(1.0, 0.0) - z).ln();
        assert!((v - expect).norm() < 1e-11, "{v} vs {expect}");
    }

    #[test]
    fn unit_prepend_derivative_recovers_integrand() {
        // d/dzeta (1 * phi) = phi at interior points, central differences.
        let omega = om();
        let z = c(0.4, 0.1);
        let h = 1e-5;
        let f = |p: Complex64| unit_prepend_convolution(&[Germ::Euler], p, 1e-12, &omega);
        let d = (f(z + c(h, 0.0)).unwrap() - f(z - c(h, 0.0)).unwrap()) / (2.0 * h);
        let expect = Germ::Euler.eval_branch(z, &Default::default());
        assert!((d - expect).norm() < 1e-8, "{d} vs {expect}");
    }

    #[test]
    fn blocked_segment_is_rejected() {
        let omega = om();
        assert!(matches!(
            principal_convolution(&[Germ::Geometric], c(1.5, 0.0), 1e-8, &omega),
            Err(Error::PathBlocked { .. })
        ));
    }

    #[test]
    fn deconvolve_unit_examples() {
        // field zeta -> zeta: derivative 1.
        let v = deconvolve_unit(|z| Ok(z), c(0.3, 0.2), 0.1, 16).unwrap();
        assert!((v - c(1.0, 0.0)).norm() < 1e-12);
        // field zeta -> -log(1-zeta) at 0.5: derivative 2.
        let f = |z: Complex64| Ok(-(c(1.0, 0.0) - z).ln());
        let v = deconvolve_unit(f, c(0.5, 0.0), 0.1, 32).unwrap();
        assert!((v - c(2.0, 0.0)).norm() < 1e-10, "{v}");
        // field zeta -> zeta^2/2 at 0.3: derivative 0.3.
        let v = deconvolve_unit(|z| Ok(z * z / 2.0), c(0.3, 0.0), 0.1, 16).unwrap();
        assert!((v - c(0.3, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn principal_dispatch_agrees_with_direct_formula() {
        let omega = om();
        let path = SurfacePath::from_points(&[(0.0, 0.0), (0.2, 0.4), (0.5, 0.1)]).unwrap();
        let settings = ContinuationSettings {
            tol: 1e-9,
            ..Default::default()
        };
        let via_path = continued_unit_convolution(
            &[Germ::Geometric, Germ::Geometric],
            &path,
            &omega,
            &settings,
        )
        .unwrap();
        assert_eq!(via_path.method, Method::PrincipalFormula);
        let direct = unit_prepend_convolution(
            &[Germ::Geometric, Germ::Geometric],
            c(0.5, 0.1),
            1e-9,
            &omega,
        )
        .unwrap();
        assert!((via_path.value - direct).norm() < 1e-12);
    }
}
