//! Evaluable analytic germs at the origin with continuation along paths.
//!
//! Closed-form germs carry their singular set and an explicit monodromy
//! action expressed through integer branch offsets per singular point;
//! Taylor germs are continued by re-expansion along a chain of discs.

use std::sync::Arc;

use num::complex::Complex64;
use num::Zero;

use crate::error::{Error, Result};
use crate::omega::{segment_arg_increment, segment_point_distance, OmegaSet, SurfacePath};
use crate::scalar::bernoulli_numbers;

/// Branch data accumulated while continuing a germ along a path: one integer
/// offset per singular point, `continued log = principal log + 2 pi i k`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BranchState {
    pub offsets: Vec<i64>,
}

/// A user-registered closed-form germ: evaluation given branch offsets, plus
/// its singular set. Without a monodromy action only Taylor continuation is
/// possible, so all three pieces are required.
pub trait CustomGerm: Send + Sync {
    fn name(&self) -> &str;
    fn singular_points(&self) -> Vec<Complex64>;
    /// Value at `zeta` on the branch described by `offsets` (aligned with
    /// `singular_points`).
    fn eval(&self, zeta: Complex64, offsets: &[i64]) -> Complex64;
}

#[derive(Clone)]
pub enum Germ {
    /// Constant germ 1.
    One,
    /// `1/(1+zeta)`, the Borel transform of the Euler series.
    Euler,
    /// `1/(1-zeta)`.
    Geometric,
    /// `zeta^{-2} (zeta/2 coth zeta/2 - 1)`, the Borel transform of the
    /// Stirling series; removable singularity at the origin.
    Stirling,
    /// `-log(1-zeta)/zeta`; all branches but the principal one have a simple
    /// pole at the origin.
    LogOverZeta,
    Taylor(TaylorGerm),
    Custom(Arc<dyn CustomGerm>),
}

impl std::fmt::Debug for Germ {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Germ::One => write!(f, "Germ::One"),
            Germ::Euler => write!(f, "Germ::Euler"),
            Germ::Geometric => write!(f, "Germ::Geometric"),
            Germ::Stirling => write!(f, "Germ::Stirling"),
            Germ::LogOverZeta => write!(f, "Germ::LogOverZeta"),
            Germ::Taylor(t) => write!(f, "Germ::Taylor(order={})", t.coeffs.len() - 1),
            Germ::Custom(c) => write!(f, "Germ::Custom({})", c.name()),
        }
    }
}

/// A germ known through finitely many Taylor coefficients at 0, continued by
/// disc chaining against a supplied singular set.
#[derive(Debug, Clone)]
pub struct TaylorGerm {
    coeffs: Vec<Complex64>,
    /// Estimated convergence radius (distance to the nearest singularity).
    radius: f64,
    /// The germ's own singular points when known; otherwise the enumerated
    /// singularity set is used as the conservative stand-in.
    own_singularities: Option<Vec<Complex64>>,
}

impl TaylorGerm {
    pub fn new(coeffs: Vec<Complex64>, radius: f64) -> Self {
        assert!(!coeffs.is_empty() && radius > 0.0);
        TaylorGerm {
            coeffs,
            radius,
            own_singularities: None,
        }
    }

    pub fn with_singularities(coeffs: Vec<Complex64>, singularities: Vec<Complex64>) -> Self {
        let radius = singularities
            .iter()
            .map(|w| w.norm())
            .fold(f64::INFINITY, f64::min);
        assert!(radius > 0.0 && radius.is_finite());
        TaylorGerm {
            coeffs,
            radius,
            own_singularities: Some(singularities),
        }
    }

    /// Radius estimated from coefficient growth, `1/limsup |b_n|^{1/n}`.
    pub fn from_coeffs(coeffs: Vec<Complex64>) -> Self {
        let n = coeffs.len();
        let mut r_est = f64::INFINITY;
        for (k, b) in coeffs.iter().enumerate().skip(n / 2) {
            let m = b.norm();
            if m > 0.0 {
                r_est = r_est.min(m.powf(-1.0 / k as f64));
            }
        }
        if !r_est.is_finite() {
            r_est = 1.0;
        }
        TaylorGerm::new(coeffs, r_est)
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }
}

const STIRLING_TAYLOR_ORDER: usize = 40;

fn stirling_taylor_coeffs(order: usize) -> Vec<Complex64> {
    // zeta^{-2}(zeta/2 coth zeta/2 - 1) = sum_{k>=1} B_{2k} zeta^{2k-2}/(2k)!
    let bern = bernoulli_numbers::<Complex64>(order + 4);
    let mut fact = 1.0f64;
    let mut coeffs = vec![Complex64::zero(); order + 1];
    for m in 1..=(order + 2) {
        fact *= m as f64;
        if m >= 2 && m % 2 == 0 && m - 2 <= order {
            coeffs[m - 2] = bern[m] / fact;
        }
    }
    coeffs
}

fn stirling_eval_principal(zeta: Complex64) -> Complex64 {
    if zeta.norm() < 0.5 {
        // The closed form is numerically indeterminate near the removable
        // singularity; the Taylor polynomial converges fast there.
        let coeffs = stirling_taylor_coeffs(STIRLING_TAYLOR_ORDER);
        let mut acc = Complex64::zero();
        for b in coeffs.iter().rev() {
            acc = acc * zeta + b;
        }
        acc
    } else {
        let w = zeta / 2.0;
        let coth = w.cosh() / w.sinh();
        (w * coth - Complex64::new(1.0, 0.0)) / (zeta * zeta)
    }
}

impl Germ {
    /// Look up a registry germ by name.
    pub fn from_name(name: &str) -> Option<Germ> {
        match name {
            "one" => Some(Germ::One),
            "euler" => Some(Germ::Euler),
            "geometric" => Some(Germ::Geometric),
            "stirling" => Some(Germ::Stirling),
            "log_over_zeta" => Some(Germ::LogOverZeta),
            _ => None,
        }
    }

    /// Singular points inside the disc of radius `within`.
    pub fn singular_points(&self, within: f64) -> Vec<Complex64> {
        match self {
            Germ::One => vec![],
            Germ::Euler => vec![Complex64::new(-1.0, 0.0)],
            Germ::Geometric => vec![Complex64::new(1.0, 0.0)],
            Germ::Stirling => {
                let mut pts = Vec::new();
                let mut k = 1.0f64;
                while std::f64::consts::TAU * k <= within {
                    pts.push(Complex64::new(0.0, std::f64::consts::TAU * k));
                    pts.push(Complex64::new(0.0, -std::f64::consts::TAU * k));
                    k += 1.0;
                }
                pts
            }
            Germ::LogOverZeta => vec![Complex64::new(1.0, 0.0)],
            Germ::Taylor(_) => vec![],
            Germ::Custom(c) => c.singular_points(),
        }
    }

    /// Validity radius about the origin (principal branch).
    pub fn validity_radius(&self) -> f64 {
        match self {
            Germ::One => f64::INFINITY,
            Germ::Euler | Germ::Geometric | Germ::LogOverZeta => 1.0,
            Germ::Stirling => std::f64::consts::TAU,
            Germ::Taylor(t) => t.radius,
            Germ::Custom(c) => c
                .singular_points()
                .iter()
                .map(|w| w.norm())
                .fold(f64::INFINITY, f64::min),
        }
    }

    /// Taylor coefficients of the principal branch at the origin.
    pub fn taylor_coeffs(&self, order: usize) -> Vec<Complex64> {
        match self {
            Germ::One => {
                let mut v = vec![Complex64::zero(); order + 1];
                v[0] = Complex64::new(1.0, 0.0);
                v
            }
            Germ::Euler => (0..=order)
                .map(|n| Complex64::new(if n % 2 == 0 { 1.0 } else { -1.0 }, 0.0))
                .collect(),
            Germ::Geometric => vec![Complex64::new(1.0, 0.0); order + 1],
            Germ::Stirling => stirling_taylor_coeffs(order),
            Germ::LogOverZeta => (0..=order)
                .map(|n| Complex64::new(1.0 / (n as f64 + 1.0), 0.0))
                .collect(),
            Germ::Taylor(t) => {
                let mut v = t.coeffs.clone();
                v.resize(order + 1, Complex64::zero());
                v
            }
            Germ::Custom(_) => panic!("custom germs do not expose Taylor data"),
        }
    }

    /// Principal-branch value inside the validity disc.
    pub fn eval_at_origin_disc(&self, zeta: Complex64) -> Result<Complex64> {
        let r = self.validity_radius();
        if zeta.norm() >= r {
            return Err(Error::OutOfDisc {
                modulus: zeta.norm(),
                radius: r,
            });
        }
        Ok(self.eval_branch(zeta, &BranchState::default()))
    }

    /// Value of the branch selected by `state` at a projected point. For
    /// Taylor germs only the principal branch is available this way.
    pub fn eval_branch(&self, zeta: Complex64, state: &BranchState) -> Complex64 {
        let off = |i: usize| -> f64 {
            state.offsets.get(i).copied().unwrap_or(0) as f64
        };
        match self {
            Germ::One => Complex64::new(1.0, 0.0),
            Germ::Euler => 1.0 / (Complex64::new(1.0, 0.0) + zeta),
            Germ::Geometric => 1.0 / (Complex64::new(1.0, 0.0) - zeta),
            Germ::Stirling => stirling_eval_principal(zeta),
            Germ::LogOverZeta => {
                let log_branch = (Complex64::new(1.0, 0.0) - zeta).ln()
                    + Complex64::new(0.0, std::f64::consts::TAU * off(0));
                if zeta.norm() < 1e-8 {
                    if state.offsets.iter().any(|&k| k != 0) {
                        // Non-principal branches have a simple pole at 0;
                        // excluded from the operation domain.
                        return Complex64::new(f64::NAN, f64::NAN);
                    }
                    // -log(1-z)/z -> 1 + z/2 + ...
                    return Complex64::new(1.0, 0.0) + zeta / 2.0 + zeta * zeta / 3.0;
                }
                -log_branch / zeta
            }
            Germ::Taylor(t) => {
                let mut acc = Complex64::zero();
                for b in t.coeffs.iter().rev() {
                    acc = acc * zeta + b;
                }
                acc
            }
            Germ::Custom(c) => c.eval(zeta, &state.offsets),
        }
    }

    fn is_single_valued(&self) -> bool {
        matches!(self, Germ::One | Germ::Euler | Germ::Geometric | Germ::Stirling)
    }

    /// Continue the germ along a polyline path (vertices, starting at 0) and
    /// return the value at the endpoint on the branch the path determines.
    /// Closed-form germs use exact integer branch bookkeeping; Taylor germs
    /// use disc chaining against `omega` as the conservative singular set.
    pub fn continue_along_vertices(
        &self,
        vertices: &[Complex64],
        omega: &OmegaSet,
    ) -> Result<Complex64> {
        if vertices.is_empty() {
            return Err(Error::InvalidPath("empty path".into()));
        }
        let end = *vertices.last().unwrap();
        match self {
            Germ::Taylor(t) => disc_chain(t, vertices, omega).map(|r| r.value),
            g if g.is_single_valued() => {
                let tol = omega.touch_tolerance();
                // The value is path-independent but the path must still clear
                // the germ's singular set.
                let extent = vertices.iter().map(|v| v.norm()).fold(0.0, f64::max);
                for w in g.singular_points(extent + 1.0) {
                    for seg in vertices.windows(2) {
                        let d = segment_point_distance(seg[0], seg[1], w);
                        if d <= tol {
                            return Err(Error::SingularityOnPath {
                                omega: (w.re, w.im),
                                distance: d,
                            });
                        }
                    }
                }
                Ok(g.eval_branch(end, &BranchState::default()))
            }
            _ => {
                let state = self.branch_state_along(vertices, omega)?;
                Ok(self.eval_branch(end, &state))
            }
        }
    }

    pub fn continue_along(&self, path: &SurfacePath, omega: &OmegaSet) -> Result<Complex64> {
        self.continue_along_vertices(path.vertices(), omega)
    }

    /// Disc-chained continuation with its tracked error bound; only
    /// meaningful for Taylor germs (closed forms are exact up to branch
    /// bookkeeping).
    pub fn chain_along_vertices(
        &self,
        vertices: &[Complex64],
        omega: &OmegaSet,
    ) -> Result<ChainResult> {
        match self {
            Germ::Taylor(t) => disc_chain(t, vertices, omega),
            other => {
                let value = other.continue_along_vertices(vertices, omega)?;
                Ok(ChainResult {
                    value,
                    error_bound: 1e-12 * (1.0 + value.norm()),
                    final_degree: 0,
                    steps: 0,
                })
            }
        }
    }

    /// Integer branch offsets picked up along the path: for each singular
    /// point `w`, the continued `log(w - zeta)` equals the principal value
    /// plus `2 pi i k_w`.
    pub fn branch_state_along(
        &self,
        vertices: &[Complex64],
        omega: &OmegaSet,
    ) -> Result<BranchState> {
        let tol = omega.touch_tolerance();
        let extent = vertices.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let end = *vertices.last().unwrap();
        let mut offsets = Vec::new();
        for w in self.singular_points(extent + 1.0) {
            // Track arg(w - gamma(t)) continuously; its increments equal
            // those of arg(gamma(t) - w), the two differing by the constant
            // rotation -1.
            let mut theta = (w - vertices[0]).arg();
            for seg in vertices.windows(2) {
                theta += segment_arg_increment(seg[0], seg[1], w, tol)?;
            }
            let principal = (w - end).arg();
            let k = ((theta - principal) / std::f64::consts::TAU).round();
            if ((theta - principal) / std::f64::consts::TAU - k).abs() > 1e-6 {
                return Err(Error::UndecidableNearOmega {
                    omega: (w.re, w.im),
                    distance: 0.0,
                });
            }
            offsets.push(k as i64);
        }
        Ok(BranchState { offsets })
    }
}

/// Weierstrass disc chaining of truncated Taylor data, with tracked error
/// bounds.
///
/// Re-expanding a degree-N polynomial is an exact polynomial identity, so a
/// naive chain would just evaluate the original truncation at the endpoint.
/// What makes continuation meaningful is dropping the re-expanded
/// coefficients whose recentering sums have not converged by order N. The
/// chain therefore carries, per coefficient, a running error bound made of
/// three parts: propagated bounds from the previous step, a model tail for
/// the discarded true coefficients (|f_k| <= U / rho^k with U read off the
/// radius-normalized data), and an arithmetic roundoff term. Coefficients
/// whose bound reaches half their magnitude are discarded, which tapers the
/// carried degree along the path; the value's final bound is reported.
///
/// Degree decays like exp(-e * length / rho), so far continuations need a
/// large stored order and honest targets; the returned bound says what was
/// actually achieved.
pub struct ChainResult {
    pub value: Complex64,
    pub error_bound: f64,
    pub final_degree: usize,
    pub steps: usize,
}

fn disc_chain(
    germ: &TaylorGerm,
    vertices: &[Complex64],
    omega: &OmegaSet,
) -> Result<ChainResult> {
    let tol = omega.touch_tolerance();
    // Conservative local singular set: the germ's own, if declared, else the
    // enumerated set without the origin. If the path winds (or its sheet is
    // not decidable), the continued branch may be singular at the origin,
    // which is then added back.
    let mut sing: Vec<Complex64> = match &germ.own_singularities {
        Some(s) => s.clone(),
        None => omega
            .points()
            .iter()
            .copied()
            .filter(|w| w.norm() > tol)
            .collect(),
    };
    let principal = crate::omega::SurfacePath::new(vertices.to_vec())
        .and_then(|p| p.is_principal_sheet(omega))
        .unwrap_or(false);
    if !principal {
        sing.push(Complex64::zero());
    }
    let local_rho = |c: Complex64, sing: &[Complex64]| -> f64 {
        sing.iter()
            .map(|w| (c - w).norm())
            .fold(f64::INFINITY, f64::min)
    };

    let mut center = vertices[0];
    let mut rho = local_rho(center, &sing).min(germ.radius);
    if !(rho > 16.0 * tol) {
        return Err(Error::DiscChainUnderflow {
            center: (center.re, center.im),
            radius: rho,
        });
    }
    // Normalized coefficients u_k = c_k rho^k and their error bounds.
    let mut u: Vec<Complex64> = Vec::with_capacity(germ.coeffs.len());
    let mut pw = 1.0f64;
    for (k, c) in germ.coeffs.iter().enumerate() {
        if k > 0 {
            pw *= rho;
        }
        u.push(c * pw);
    }
    let mut ue = vec![0.0f64; u.len()];
    let mut steps = 0usize;

    // Each re-expansion trades reach for carried order, so steps take the
    // full allowed fraction of the local disc and the walk finishes by a
    // direct polynomial evaluation once the whole remaining path fits
    // inside the current disc of trust.
    const STEP_FRACTION: f64 = 1.0 / 3.0;
    const EVAL_FRACTION: f64 = 0.55;

    let end = *vertices.last().unwrap();
    let mut seg_idx = 0usize;
    loop {
        while seg_idx + 2 < vertices.len()
            && (vertices[seg_idx + 1] - center).norm() <= 1e-13 * (1.0 + center.norm())
        {
            seg_idx += 1;
        }
        // Once every remaining waypoint sits inside the disc of trust, path
        // details no longer matter (the disc is a simply connected piece of
        // the branch's domain) and a single evaluation finishes the walk.
        let remaining_fits = vertices[seg_idx + 1..]
            .iter()
            .all(|v| (v - center).norm() <= EVAL_FRACTION * rho);
        if remaining_fits {
            let z = (end - center) / rho;
            let az = z.norm();
            let u_hat = 2.0
                * u.iter()
                    .zip(&ue)
                    .map(|(a, e)| a.norm() + e)
                    .fold(0.0, f64::max);
            let mut value = Complex64::zero();
            let mut err = 0.0f64;
            let mut zp = Complex64::new(1.0, 0.0);
            for (k, (a, e)) in u.iter().zip(&ue).enumerate() {
                if k > 0 {
                    zp *= z;
                }
                value += a * zp;
                err += e * zp.norm();
            }
            // True tail beyond the carried degree.
            err += u_hat * az.powi(u.len() as i32) / (1.0 - az).max(1e-6);
            err += 4e-15 * u.len() as f64 * value.norm().max(1.0);
            return Ok(ChainResult {
                value,
                error_bound: err,
                final_degree: u.len() - 1,
                steps,
            });
        }

        let target = vertices[seg_idx + 1];
        if u.len() < 3 {
            return Err(Error::DiscChainUnderflow {
                center: (center.re, center.im),
                radius: rho,
            });
        }
        let cap = rho * STEP_FRACTION;
        let rem = target - center;
        let h = if rem.norm() <= cap { rem } else { rem / rem.norm() * cap };
        let new_center = center + h;
        let rho2 = local_rho(new_center, &sing);
        if !(rho2 > 16.0 * tol) {
            return Err(Error::DiscChainUnderflow {
                center: (new_center.re, new_center.im),
                radius: rho2,
            });
        }
        let (nu, nue) = reexpand_tapered(&u, &ue, h / rho, rho2 / rho);
        u = nu;
        ue = nue;
        center = new_center;
        rho = rho2;
        steps += 1;
    }
}

/// One radius-normalized re-expansion `u'_j = rr^j sum_k C(k,j) x^{k-j} u_k`
/// with error propagation and taper.
fn reexpand_tapered(
    u: &[Complex64],
    ue: &[f64],
    x: Complex64,
    rr: f64,
) -> (Vec<Complex64>, Vec<f64>) {
    let n = u.len() - 1;
    let ax = x.norm();
    // Data-driven bound on the normalized true coefficients.
    let u_hat = 2.0
        * u.iter()
            .zip(ue)
            .map(|(a, e)| a.norm() + e)
            .fold(0.0, f64::max);

    let mut d = Vec::with_capacity(n + 1);
    let mut de = Vec::with_capacity(n + 1);
    let mut rrj = 1.0f64;
    let mut prefix_scale = 0.0f64;
    for j in 0..=n {
        if j > 0 {
            rrj *= rr;
        }
        let mut acc = Complex64::zero();
        let mut eacc = 0.0f64;
        let mut mag = 0.0f64;
        let mut t = Complex64::new(1.0, 0.0);
        for k in j..=n {
            if k > j {
                t *= x * (k as f64) / ((k - j) as f64);
            }
            acc += u[k] * t;
            let tn = t.norm();
            eacc += ue[k] * tn;
            mag += u[k].norm() * tn;
            if mag > 1e280 {
                break;
            }
        }
        // Model tail for the true coefficients beyond order n.
        let mut term = {
            // C(n, j) ax^{n-j}
            let mut v = 1.0f64;
            for k in (j + 1)..=n {
                v *= ax * (k as f64) / ((k - j) as f64);
                if v > 1e280 {
                    break;
                }
            }
            v
        };
        let mut tail = 0.0f64;
        let mut m = n - j;
        while m < n + 4000 {
            m += 1;
            term *= ax * ((j + m) as f64) / (m as f64);
            tail += term;
            if tail > 1e280 {
                break;
            }
            if term < 1e-17 * tail.max(1e-300) {
                break;
            }
        }
        let roundoff = 4e-15 * (n - j + 1) as f64 * mag;
        let dj = acc * rrj;
        let dej = (eacc + u_hat * tail + roundoff) * rrj;
        prefix_scale = prefix_scale.max(dj.norm());
        // Taper: stop at the first coefficient whose bound reaches half its
        // magnitude (with a noise floor relative to the clean prefix).
        if j >= 1 && dej > 0.5 * dj.norm().max(1e-13 * prefix_scale) {
            break;
        }
        d.push(dj);
        de.push(dej);
        if mag > 1e280 || tail > 1e280 {
            break;
        }
    }
    while d.len() < 2 {
        d.push(Complex64::zero());
        de.push(f64::INFINITY);
    }
    (d, de)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::omega::OmegaSet;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn loop_around_one(end: Complex64) -> Vec<Complex64> {
        vec![
            c(0.0, 0.0),
            c(0.4, -0.5),
            c(1.6, -0.5),
            c(1.6, 0.5),
            c(0.4, 0.5),
            end,
        ]
    }

    #[test]
    fn principal_values_in_disc() {
        assert!((Germ::Geometric.eval_at_origin_disc(c(0.5, 0.0)).unwrap() - c(2.0, 0.0)).norm() < 1e-15);
        assert!((Germ::Euler.eval_at_origin_disc(c(0.0, 0.0)).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
        let s = Germ::Stirling.eval_at_origin_disc(c(0.0, 0.0)).unwrap();
        assert!((s - c(1.0 / 12.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn stirling_matches_bernoulli_taylor_against_closed_form() {
        // Taylor polynomial at a point where the closed coth form is stable.
        let z = c(0.9, 0.3);
        let poly = {
            let coeffs = stirling_taylor_coeffs(40);
            let mut acc = Complex64::zero();
            for b in coeffs.iter().rev() {
                acc = acc * z + b;
            }
            acc
        };
        let w = z / 2.0;
        let closed = (w * w.cosh() / w.sinh() - c(1.0, 0.0)) / (z * z);
        assert!((poly - closed).norm() < 1e-12);
    }

    #[test]
    fn out_of_disc_is_an_error() {
        assert!(matches!(
            Germ::Geometric.eval_at_origin_disc(c(1.5, 0.0)),
            Err(Error::OutOfDisc { .. })
        ));
    }

    #[test]
    fn single_valued_germ_is_path_independent() {
        let om = OmegaSet::integer_window(10.0).unwrap();
        let end = c(0.5, 0.0);
        let detour = vec![c(0.0, 0.0), c(0.2, 0.7), c(0.5, 0.3), end];
        let looped = loop_around_one(end);
        let v1 = Germ::Geometric.continue_along_vertices(&detour, &om).unwrap();
        let v2 = Germ::Geometric.continue_along_vertices(&looped, &om).unwrap();
        assert!((v1 - c(2.0, 0.0)).norm() < 1e-14);
        assert!((v2 - c(2.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn log_over_zeta_monodromy_around_one() {
        // One positive loop around 1 ending at 0.5. Residue oracle:
        // d log(1-gamma) = d gamma / (gamma - 1) integrates to 2 pi i per
        // positive loop, so the continued value is
        // -(Log(1-0.5) + 2 pi i)/0.5 = principal value - 2 pi i / 0.5.
        let om = OmegaSet::integer_window(10.0).unwrap();
        let v = Germ::LogOverZeta
            .continue_along_vertices(&loop_around_one(c(0.5, 0.0)), &om)
            .unwrap();
        let zeta = c(0.5, 0.0);
        let principal = -((c(1.0, 0.0) - zeta).ln()) / zeta;
        let expect = principal + c(0.0, -std::f64::consts::TAU) / zeta;
        assert!((v - expect).norm() < 1e-12, "v = {v}, expect = {expect}");
    }

    #[test]
    fn branch_offsets_are_integers() {
        let om = OmegaSet::integer_window(10.0).unwrap();
        let state = Germ::LogOverZeta
            .branch_state_along(&loop_around_one(c(0.5, 0.0)), &om)
            .unwrap();
        assert_eq!(state.offsets, vec![1]);
        let seg = vec![c(0.0, 0.0), c(0.5, 0.0)];
        let state0 = Germ::LogOverZeta.branch_state_along(&seg, &om).unwrap();
        assert_eq!(state0.offsets, vec![0]);
    }

    #[test]
    fn homotopic_paths_agree() {
        let om = OmegaSet::integer_window(10.0).unwrap();
        let a = loop_around_one(c(0.5, 0.0));
        let mut b = a.clone();
        // Perturb interior vertices within the same homotopy class.
        b[1] += c(0.05, -0.1);
        b[2] += c(0.1, 0.05);
        b[3] += c(-0.02, 0.08);
        let va = Germ::LogOverZeta.continue_along_vertices(&a, &om).unwrap();
        let vb = Germ::LogOverZeta.continue_along_vertices(&b, &om).unwrap();
        assert!((va - vb).norm() < 1e-8);
    }

    #[test]
    fn taylor_chain_inside_disc_is_sharp() {
        let om = OmegaSet::integer_window(10.0).unwrap();
        let coeffs = vec![c(1.0, 0.0); 61];
        let germ = Germ::Taylor(TaylorGerm::new(coeffs, 1.0));
        let path = vec![c(0.0, 0.0), c(0.3, 0.4), c(0.6, 0.2)];
        let r = germ.chain_along_vertices(&path, &om).unwrap();
        let expect = 1.0 / (c(1.0, 0.0) - c(0.6, 0.2));
        assert!((r.value - expect).norm() < 1e-7, "value = {}", r.value);
        assert!((r.value - expect).norm() <= r.error_bound + 1e-12);
    }

    fn geometric_taylor(order: usize) -> Germ {
        Germ::Taylor(TaylorGerm::with_singularities(
            vec![c(1.0, 0.0); order + 1],
            vec![c(1.0, 0.0)],
        ))
    }

    #[test]
    fn taylor_chain_off_axis_reach() {
        // Away from the straight run to the singularity the chain recenters
        // and beats direct evaluation by orders of magnitude.
        let om = OmegaSet::integer_window(10.0).unwrap();
        let germ = geometric_taylor(500);
        let target = c(0.95, 0.25);
        let path = vec![c(0.0, 0.0), target];
        let r = germ.chain_along_vertices(&path, &om).unwrap();
        let expect = 1.0 / (c(1.0, 0.0) - target);
        let dev = (r.value - expect).norm();
        assert!(dev < 1e-9, "dev = {dev:.3e}");
        assert!(dev <= r.error_bound + 1e-12);
    }

    #[test]
    fn taylor_chain_far_target_reports_honest_bound() {
        // Truncated data cannot cover the conformal distance to 2.5 at f64;
        // what the chain must do is say so: the tracked bound covers the
        // true deviation instead of silently returning garbage.
        let om = OmegaSet::integer_window(10.0).unwrap();
        let germ = geometric_taylor(500);
        let path = vec![c(0.0, 0.0), c(0.5, 1.1), c(2.0, 1.1), c(2.5, 0.0)];
        match germ.chain_along_vertices(&path, &om) {
            Ok(r) => {
                let expect = 1.0 / (c(1.0, 0.0) - c(2.5, 0.0));
                let dev = (r.value - expect).norm();
                assert!(
                    dev <= r.error_bound + 1e-12,
                    "bound {:.3e} does not cover deviation {dev:.3e}",
                    r.error_bound
                );
            }
            // Degree exhaustion is the other legitimate outcome.
            Err(Error::DiscChainUnderflow { .. }) => {}
            Err(e) => panic!("unexpected error {e}"),
        }
    }

    #[test]
    fn taylor_chain_agrees_with_closed_form_cross_check() {
        let om = OmegaSet::integer_window(10.0).unwrap();
        let germ = geometric_taylor(500);
        let target = c(0.85, -0.2);
        let path = vec![c(0.0, 0.0), c(0.4, -0.3), target];
        let chained = germ.continue_along_vertices(&path, &om).unwrap();
        let closed = Germ::Geometric.continue_along_vertices(&path, &om).unwrap();
        assert!(
            (chained - closed).norm() < 1e-6,
            "chained = {chained}, closed = {closed}"
        );
    }

    #[test]
    fn taylor_chain_homotopy_invariance() {
        let om = OmegaSet::integer_window(10.0).unwrap();
        let germ = geometric_taylor(500);
        let target = c(0.85, 0.2);
        let a = vec![c(0.0, 0.0), c(0.4, 0.3), target];
        let b = vec![c(0.0, 0.0), c(0.3, 0.35), c(0.55, 0.3), target];
        let va = germ.continue_along_vertices(&a, &om).unwrap();
        let vb = germ.continue_along_vertices(&b, &om).unwrap();
        assert!((va - vb).norm() < 1e-6, "va = {va}, vb = {vb}");
    }

    #[test]
    fn continuation_consistent_with_disc_evaluation() {
        let om = OmegaSet::integer_window(10.0).unwrap();
        let seg = vec![c(0.0, 0.0), c(0.4, 0.2)];
        for germ in [Germ::Euler, Germ::Geometric, Germ::Stirling, Germ::LogOverZeta] {
            let a = germ.continue_along_vertices(&seg, &om).unwrap();
            let b = germ.eval_at_origin_disc(c(0.4, 0.2)).unwrap();
            assert!((a - b).norm() < 1e-12, "{germ:?}");
        }
    }

    #[test]
    fn registry_names() {
        assert!(Germ::from_name("euler").is_some());
        assert!(Germ::from_name("stirling").is_some());
        assert!(Germ::from_name("geometric").is_some());
        assert!(Germ::from_name("one").is_some());
        assert!(Germ::from_name("log_over_zeta").is_some());
        assert!(Germ::from_name("unknown").is_none());
    }
}
