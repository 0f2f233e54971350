//! The singularity set, admissible paths, sheet identification and the
//! explicit constants controlling convolution bounds.
//!
//! The (infinite, addition-stable) singularity set is represented by its
//! generators together with a radius-bounded enumeration of the additive
//! semigroup they span; every metric query carries a radius precondition so
//! that a missing far-away point can never silently corrupt a distance.

use num::complex::Complex64;
use num::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance (in units of `rho`) below which a path is considered to
/// touch a singular point and operations fail loudly.
pub const TOUCH_TOL: f64 = 1e-9;

/// Closed discrete addition-stable singularity set, enumerated inside a disc.
#[derive(Debug, Clone)]
pub struct OmegaSet {
    generators: Vec<Complex64>,
    radius: f64,
    points: Vec<Complex64>,
    rho: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OmegaSpec {
    pub generators: Vec<[f64; 2]>,
    pub radius: f64,
}

impl OmegaSet {
    /// Enumerate the additive semigroup of `generators` (plus 0) inside the
    /// disc of the given radius. The walk keeps a slack margin of twice the
    /// largest generator modulus so that sums just outside the disc still
    /// witness addition stability inside it; generator sets whose members can
    /// cancel over long excursions (none of the lattice windows used here do)
    /// would need a larger slack.
    pub fn new(generators: Vec<Complex64>, radius: f64) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::domain("at least one generator is required"));
        }
        if !(radius > 0.0) {
            return Err(Error::domain("enumeration radius must be positive"));
        }
        let mut max_gen: f64 = 0.0;
        for g in &generators {
            if g.norm() == 0.0 {
                return Err(Error::domain("generators must be nonzero"));
            }
            max_gen = max_gen.max(g.norm());
        }
        if generators.iter().all(|g| g.norm() > radius) {
            // Enumeration would be {0}; rho would be undefined.
            return Err(Error::domain(
                "no generator lies within the enumeration radius",
            ));
        }
        let work_radius = radius + 2.0 * max_gen;
        let dedup_tol = 1e-9 * generators.iter().map(|g| g.norm()).fold(f64::INFINITY, f64::min);

        let mut points: Vec<Complex64> = vec![Complex64::zero()];
        let mut frontier: Vec<Complex64> = vec![Complex64::zero()];
        while let Some(p) = frontier.pop() {
            for g in &generators {
                let q = p + g;
                if q.norm() <= work_radius
                    && !points.iter().any(|r| (r - q).norm() <= dedup_tol)
                {
                    points.push(q);
                    frontier.push(q);
                }
            }
        }
        points.retain(|p| p.norm() <= radius);
        points.sort_by(|a, b| {
            (a.norm(), a.re, a.im)
                .partial_cmp(&(b.norm(), b.re, b.im))
                .unwrap()
        });

        let rho = points
            .iter()
            .filter(|p| p.norm() > dedup_tol)
            .map(|p| p.norm())
            .fold(f64::INFINITY, f64::min);
        if !rho.is_finite() {
            return Err(Error::domain("enumeration produced no nonzero point"));
        }
        Ok(OmegaSet {
            generators,
            radius,
            points,
            rho,
        })
    }

    pub fn from_spec(spec: &OmegaSpec) -> Result<Self> {
        OmegaSet::new(
            spec.generators
                .iter()
                .map(|g| Complex64::new(g[0], g[1]))
                .collect(),
            spec.radius,
        )
    }

    /// The integer window `Z` within `[-radius, radius]`.
    pub fn integer_window(radius: f64) -> Result<Self> {
        OmegaSet::new(vec![Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)], radius)
    }

    /// The non-negative integers `{0, 1, 2, ...}` within the radius.
    pub fn nonnegative_integers(radius: f64) -> Result<Self> {
        OmegaSet::new(vec![Complex64::new(1.0, 0.0)], radius)
    }

    pub fn generators(&self) -> &[Complex64] {
        &self.generators
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// All enumerated points; 0 is always among them.
    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    /// Minimum modulus of a nonzero enumerated point.
    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn touch_tolerance(&self) -> f64 {
        TOUCH_TOL * self.rho
    }

    /// Queries at `xi` are only trusted when the nearest set point provably
    /// lies inside the enumeration window, which holds for `|xi| <= radius/2`
    /// (the nearest point is within `|xi|` of `xi` since 0 belongs to the set).
    pub fn check_query_radius(&self, xi: Complex64) -> Result<()> {
        let safe = self.radius / 2.0;
        if xi.norm() > safe {
            return Err(Error::RadiusExceeded {
                modulus: xi.norm(),
                safe_radius: safe,
            });
        }
        Ok(())
    }

    /// `eta(xi) = dist(xi, Omega)`; zero exactly on the set.
    pub fn eta(&self, xi: Complex64) -> Result<f64> {
        self.check_query_radius(xi)?;
        Ok(self.eta_unchecked(xi))
    }

    pub(crate) fn eta_unchecked(&self, xi: Complex64) -> f64 {
        let mut best = f64::INFINITY;
        for w in &self.points {
            let d = (xi - w).norm_sqr();
            if d < best {
                best = d;
            }
        }
        best.sqrt()
    }

    /// `dist(xi, Omega \ {0})`.
    pub fn dist_nonzero(&self, xi: Complex64) -> Result<f64> {
        self.check_query_radius(xi)?;
        let tol = self.touch_tolerance();
        Ok(self
            .points
            .iter()
            .filter(|w| w.norm() > tol)
            .map(|w| (xi - w).norm())
            .fold(f64::INFINITY, f64::min))
    }

    /// Verify addition stability of the enumerated window: any pairwise sum
    /// that lands back inside the radius must already be enumerated.
    pub fn verify_addition_stability(&self) -> bool {
        let tol = self.touch_tolerance();
        for a in &self.points {
            for b in &self.points {
                let s = a + b;
                if s.norm() <= self.radius
                    && !self.points.iter().any(|p| (p - s).norm() <= tol)
                {
                    return false;
                }
            }
        }
        true
    }
}

/// Accumulated argument of `p - pole` along a segment, with subdivision so
/// each increment stays well below pi. Fails when the segment passes within
/// `tol` of the pole.
pub(crate) fn segment_arg_increment(
    from: Complex64,
    to: Complex64,
    pole: Complex64,
    tol: f64,
) -> Result<f64> {
    let d = segment_point_distance(from, to, pole);
    if d <= tol {
        return Err(Error::SingularityOnPath {
            omega: (pole.re, pole.im),
            distance: d,
        });
    }
    // Subdivide so that each chord is shorter than half the distance to the
    // pole; the subtended angle per step is then < pi/2.
    let steps = (((to - from).norm() / (0.5 * d)).ceil() as usize).max(1);
    let mut total = 0.0;
    let mut prev = from - pole;
    for k in 1..=steps {
        let t = k as f64 / steps as f64;
        let cur = from + (to - from) * t - pole;
        total += (cur / prev).arg();
        prev = cur;
    }
    Ok(total)
}

/// Euclidean distance from `p` to the segment `[a, b]`.
pub(crate) fn segment_point_distance(a: Complex64, b: Complex64, p: Complex64) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = ((p - a).re * ab.re + (p - a).im * ab.im) / len2;
    let t = t.clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}

/// A polyline path from the origin avoiding the singularity set off its
/// start; represents a point of the spread surface over the plane.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfacePath {
    vertices: Vec<Complex64>,
}

impl SurfacePath {
    /// Build from vertices; the first must be the origin.
    pub fn new(vertices: Vec<Complex64>) -> Result<Self> {
        if vertices.len() < 2 {
            return Err(Error::InvalidPath(
                "a path needs the origin and at least one more vertex".into(),
            ));
        }
        if vertices[0].norm() > 0.0 {
            return Err(Error::InvalidPath("path must start at the origin".into()));
        }
        Ok(SurfacePath { vertices })
    }

    pub fn from_points(points: &[(f64, f64)]) -> Result<Self> {
        SurfacePath::new(points.iter().map(|&(re, im)| Complex64::new(re, im)).collect())
    }

    /// Straight segment from 0 to `end`.
    pub fn segment(end: Complex64) -> Result<Self> {
        SurfacePath::new(vec![Complex64::zero(), end])
    }

    pub fn vertices(&self) -> &[Complex64] {
        &self.vertices
    }

    pub fn endpoint(&self) -> Complex64 {
        *self.vertices.last().unwrap()
    }

    pub fn arc_length(&self) -> f64 {
        self.vertices
            .windows(2)
            .map(|w| (w[1] - w[0]).norm())
            .sum()
    }

    pub fn max_extent(&self) -> f64 {
        self.vertices.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Check that the path stays off the set after its start: every segment
    /// clears every enumerated point (the initial segment is exempt from the
    /// origin itself), and the whole path fits the safe query window.
    pub fn validate(&self, omega: &OmegaSet) -> Result<()> {
        let tol = omega.touch_tolerance();
        omega.check_query_radius(
            self.vertices
                .iter()
                .cloned()
                .max_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap())
                .unwrap(),
        )?;
        if self.vertices[1].norm() <= tol {
            return Err(Error::InvalidPath(
                "path does not leave the origin".into(),
            ));
        }
        for (k, w) in self.vertices.windows(2).enumerate() {
            for omega_pt in omega.points() {
                if k == 0 && omega_pt.norm() <= tol {
                    continue; // the start segment leaves 0, which is in the set
                }
                let d = segment_point_distance(w[0], w[1], *omega_pt);
                if d <= tol {
                    return Err(Error::SingularityOnPath {
                        omega: (omega_pt.re, omega_pt.im),
                        distance: d,
                    });
                }
            }
        }
        Ok(())
    }

    /// True iff the straight segment from the origin to the endpoint clears
    /// the nonzero enumerated points (the endpoint lies in the cut plane).
    pub fn segment_to_endpoint_clear(&self, omega: &OmegaSet) -> bool {
        let tol = omega.touch_tolerance();
        let end = self.endpoint();
        omega
            .points()
            .iter()
            .filter(|w| w.norm() > tol)
            .all(|w| segment_point_distance(Complex64::zero(), end, *w) > tol)
    }

    /// Winding number of the closed loop "path followed by the reversed
    /// straight segment" about each nonzero enumerated point. Only defined
    /// when the closing segment clears the set.
    pub fn winding_vector(&self, omega: &OmegaSet) -> Result<Vec<(Complex64, i64)>> {
        let tol = omega.touch_tolerance();
        let end = self.endpoint();
        let mut out = Vec::new();
        for &w in omega.points() {
            if w.norm() <= tol {
                continue;
            }
            let mut total = 0.0;
            for seg in self.vertices.windows(2) {
                total += segment_arg_increment(seg[0], seg[1], w, tol).map_err(|e| match e {
                    Error::SingularityOnPath { omega, distance } => {
                        Error::UndecidableNearOmega { omega, distance }
                    }
                    other => other,
                })?;
            }
            total += segment_arg_increment(end, Complex64::zero(), w, tol).map_err(|e| match e {
                Error::SingularityOnPath { omega, distance } => {
                    Error::UndecidableNearOmega { omega, distance }
                }
                other => other,
            })?;
            let winding = (total / std::f64::consts::TAU).round();
            if (total / std::f64::consts::TAU - winding).abs() > 1e-6 {
                return Err(Error::UndecidableNearOmega {
                    omega: (w.re, w.im),
                    distance: 0.0,
                });
            }
            out.push((w, winding as i64));
        }
        Ok(out)
    }

    /// True iff the path is homotopic (endpoints fixed, off the set after the
    /// start) to the straight segment to its endpoint. When the segment is
    /// blocked by the set, no segment representative exists and the point is
    /// off the principal sheet outright; otherwise the test is that the
    /// concatenated loop winds around no enumerated point.
    pub fn is_principal_sheet(&self, omega: &OmegaSet) -> Result<bool> {
        if !self.segment_to_endpoint_clear(omega) {
            return Ok(false);
        }
        Ok(self.winding_vector(omega)?.iter().all(|&(_, n)| n == 0))
    }

    /// Distance from the endpoint to the closest possibly singular point:
    /// the origin is not counted on the principal sheet.
    pub fn r_omega(&self, omega: &OmegaSet) -> Result<f64> {
        let end = self.endpoint();
        if self.is_principal_sheet(omega)? {
            omega.dist_nonzero(end)
        } else {
            omega.eta(end)
        }
    }

    /// Arc-length positions of the vertices.
    pub fn cumulative_lengths(&self) -> Vec<f64> {
        let mut cum = Vec::with_capacity(self.vertices.len());
        let mut acc = 0.0;
        cum.push(0.0);
        for w in self.vertices.windows(2) {
            acc += (w[1] - w[0]).norm();
            cum.push(acc);
        }
        cum
    }

    /// Point at arc-length parameter `t` in `[0, arc_length]`.
    pub fn point_at(&self, t: f64) -> Complex64 {
        let cum = self.cumulative_lengths();
        let total = *cum.last().unwrap();
        let t = t.clamp(0.0, total);
        for (k, w) in self.vertices.windows(2).enumerate() {
            if t <= cum[k + 1] || k + 2 == self.vertices.len() {
                let seg_len = cum[k + 1] - cum[k];
                if seg_len == 0.0 {
                    return w[0];
                }
                let s = ((t - cum[k]) / seg_len).clamp(0.0, 1.0);
                return w[0] + (w[1] - w[0]) * s;
            }
        }
        self.endpoint()
    }

    /// The truncated path ending at arc-length `t` (vertices up to `t` plus
    /// the interpolated point).
    pub fn truncated_at(&self, t: f64) -> SurfacePath {
        let cum = self.cumulative_lengths();
        let mut vertices = vec![self.vertices[0]];
        for (k, v) in self.vertices.iter().enumerate().skip(1) {
            if cum[k] < t {
                vertices.push(*v);
            } else {
                break;
            }
        }
        let p = self.point_at(t);
        if (p - *vertices.last().unwrap()).norm() > 0.0 {
            vertices.push(p);
        }
        if vertices.len() == 1 {
            vertices.push(self.vertices[1] * 1e-12);
        }
        SurfacePath { vertices }
    }

    /// Sampled profile of `R_Omega` along the path at arc-length steps of at
    /// most `max_step`: pairs `(t, R_Omega(path restricted to [0, t]))`.
    pub fn r_omega_profile(&self, omega: &OmegaSet, max_step: f64) -> Result<Vec<(f64, f64)>> {
        let total = self.arc_length();
        let n = ((total / max_step).ceil() as usize).max(1);
        let mut out = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let t = total * k as f64 / n as f64;
            let sub = self.truncated_at(t.max(total * 1e-12));
            out.push((t, sub.r_omega(omega)?));
        }
        Ok(out)
    }
}

/// Membership witness for the compact `K_{delta, L}`: a path plus the claimed
/// admissibility levels.
#[derive(Debug, Clone)]
pub struct AdmissibilityWitness {
    pub path: SurfacePath,
    pub delta: f64,
    pub length_budget: f64,
}

impl AdmissibilityWitness {
    pub fn new(path: SurfacePath, delta: f64, length_budget: f64) -> Self {
        AdmissibilityWitness {
            path,
            delta,
            length_budget,
        }
    }

    /// One-sided sufficient test: arc length within budget and the sampled
    /// minimum of `R_Omega` (step at most `delta/4`) at least `delta`.
    /// Comparisons carry a hair of relative slack so exact boundary cases
    /// are not lost to rounding.
    pub fn check_membership(&self, omega: &OmegaSet) -> Result<bool> {
        if self.path.arc_length() > self.length_budget * (1.0 + 1e-12) {
            return Ok(false);
        }
        self.path.validate(omega)?;
        let profile = self.path.r_omega_profile(omega, self.delta / 4.0)?;
        Ok(profile
            .iter()
            .all(|&(_, r)| r >= self.delta * (1.0 - 1e-12)))
    }
}

/// Explicit constants `(C, delta', L')` controlling the n-factor convolution
/// bound: `C = rho e^{3 + 6L/delta}`, `delta' = rho/2 e^{-2 - 4L/delta}`,
/// `L' = L + delta/2`. Requires `0 < delta < rho`.
pub fn theorem1_constants(delta: f64, length: f64, rho: f64) -> Result<(f64, f64, f64)> {
    if !(delta > 0.0 && length > 0.0 && rho > 0.0) {
        return Err(Error::domain("delta, L, rho must be positive"));
    }
    if delta >= rho {
        return Err(Error::domain(format!(
            "delta = {delta} must be smaller than rho = {rho}"
        )));
    }
    let c = rho * (3.0 + 6.0 * length / delta).exp();
    let delta_prime = 0.5 * rho * (-2.0 - 4.0 * length / delta).exp();
    let l_prime = length + delta / 2.0;
    Ok((c, delta_prime, l_prime))
}

/// Constants of the unit-prepended bound: per-factor growth `rho e^{3L/delta}`
/// and inner level `delta' = rho/2 e^{-2L/delta}`. Requires `delta < rho/2`.
pub fn theorem1_prime_constants(delta: f64, length: f64, rho: f64) -> Result<(f64, f64)> {
    if !(delta > 0.0 && length > 0.0 && rho > 0.0) {
        return Err(Error::domain("delta, L, rho must be positive"));
    }
    if delta >= rho / 2.0 {
        return Err(Error::domain(format!(
            "delta = {delta} must be smaller than rho/2 = {}",
            rho / 2.0
        )));
    }
    let factor = rho * (3.0 * length / delta).exp();
    let delta_prime = 0.5 * rho * (-2.0 * length / delta).exp();
    Ok((factor, delta_prime))
}
