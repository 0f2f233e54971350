//! Flow of the simplex-deforming vector field.
//!
//! Along an arc-length parametrized path `gamma` staying at distance at
//! least `delta` from the singularity set, each of the `n` components moves
//! with velocity `eta(xi_i)/D * gamma'(t)`, where
//! `D = eta(xi_0) + eta(xi_1) + ... + eta(xi_n)` and
//! `xi_0 = gamma(t) - (xi_1 + ... + xi_n)`. The right-hand side is only
//! Lipschitz (eta is a distance function), so the stepper is an explicit
//! midpoint with Richardson step control, restarted at the polyline corners
//! of `gamma`; no high-order smooth method is warranted.
//!
//! The variational data d(xi_i)/d(s_j) is produced by co-integrating a bundle
//! of centrally perturbed nodes with a shared step sequence, never by
//! differentiating the non-smooth field.

use num::complex::Complex64;
use num::Zero;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::omega::OmegaSet;
use crate::simplex::SimplexGrid;

#[derive(Debug, Clone)]
pub struct FlowParams {
    /// Richardson per-step absolute tolerance.
    pub step_tol: f64,
    /// Central-difference spacing in the simplex coordinates.
    pub fd_spacing: f64,
}

impl Default for FlowParams {
    fn default() -> Self {
        FlowParams {
            step_tol: 1e-10,
            fd_spacing: 1e-4,
        }
    }
}

/// The tail of a continuation path: an arc-length parametrized polyline that
/// starts off the origin (inside the punctured half-rho disc in practice).
#[derive(Debug, Clone)]
pub struct TailPath {
    vertices: Vec<Complex64>,
    cum: Vec<f64>,
}

impl TailPath {
    pub fn new(vertices: Vec<Complex64>) -> Result<Self> {
        if vertices.len() < 2 {
            return Err(Error::InvalidPath("flow tail needs at least one segment".into()));
        }
        if vertices[0].norm() == 0.0 {
            return Err(Error::InvalidPath("flow tail must start off the origin".into()));
        }
        let mut cum = Vec::with_capacity(vertices.len());
        let mut acc = 0.0;
        cum.push(0.0);
        for w in vertices.windows(2) {
            let len = (w[1] - w[0]).norm();
            if len == 0.0 {
                return Err(Error::InvalidPath("degenerate zero-length segment".into()));
            }
            acc += len;
            cum.push(acc);
        }
        Ok(TailPath { vertices, cum })
    }

    pub fn start(&self) -> Complex64 {
        self.vertices[0]
    }

    pub fn end(&self) -> Complex64 {
        *self.vertices.last().unwrap()
    }

    pub fn total_length(&self) -> f64 {
        *self.cum.last().unwrap()
    }

    pub fn vertices(&self) -> &[Complex64] {
        &self.vertices
    }

    fn segment_count(&self) -> usize {
        self.vertices.len() - 1
    }

    fn segment_span(&self, k: usize) -> (f64, f64) {
        (self.cum[k], self.cum[k + 1])
    }

    /// Unit derivative on segment `k`.
    fn direction(&self, k: usize) -> Complex64 {
        let d = self.vertices[k + 1] - self.vertices[k];
        d / d.norm()
    }

    fn point(&self, k: usize, t: f64) -> Complex64 {
        self.vertices[k] + self.direction(k) * (t - self.cum[k])
    }

    /// Point at arc-length parameter `t` in `[0, total_length]`.
    pub fn point_at(&self, t: f64) -> Complex64 {
        let t = t.clamp(0.0, self.total_length());
        for k in 0..self.segment_count() {
            if t <= self.cum[k + 1] || k + 1 == self.segment_count() {
                return self.point(k, t.max(self.cum[k]).min(self.cum[k + 1]));
            }
        }
        self.end()
    }

    /// Minimum distance of the polyline to the enumerated singularity set.
    pub fn min_distance_to(&self, omega: &OmegaSet) -> f64 {
        let mut min_d = f64::INFINITY;
        for w in self.vertices.windows(2) {
            for p in omega.points() {
                min_d = min_d.min(crate::omega::segment_point_distance(w[0], w[1], *p));
            }
        }
        min_d
    }
}

/// Sampled state of one node's flow at a recorded time.
#[derive(Debug, Clone)]
pub struct FlowSample {
    pub t: f64,
    pub xi: Vec<Complex64>,
    pub d: f64,
    /// Central-difference Jacobian d(xi_i)/d(s_j) at this time, row-major.
    pub jacobian: Vec<Complex64>,
}

/// Completed flow of one simplex node and its variational bundle.
#[derive(Debug, Clone)]
pub struct NodeFlow {
    pub s: Vec<f64>,
    pub weight: f64,
    /// Projected endpoint components.
    pub endpoint: Vec<Complex64>,
    /// Jacobian at the final time, row-major `[i * n + j]`.
    pub jacobian: Vec<Complex64>,
    /// Recorded polyline of each component's projected trajectory,
    /// starting at `s_i * gamma(a)`.
    pub trajectories: Vec<Vec<Complex64>>,
    pub samples: Vec<FlowSample>,
    pub min_d: f64,
    pub accepted_steps: usize,
}

/// Flow of every node of a grid (or explicit node list) along one tail.
#[derive(Debug, Clone)]
pub struct FlowField {
    pub n: usize,
    pub delta: f64,
    /// `|gamma(a)| + (b - a)`, the length budget of the witness paths.
    pub length_bound: f64,
    pub start: Complex64,
    pub nodes: Vec<NodeFlow>,
}

pub fn integrate_isotopy(
    tail: &TailPath,
    grid: &SimplexGrid,
    omega: &OmegaSet,
    delta: f64,
    params: &FlowParams,
) -> Result<FlowField> {
    let nodes: Vec<(Vec<f64>, f64)> = grid
        .nodes()
        .iter()
        .map(|p| (p.s.clone(), p.weight))
        .collect();
    integrate_isotopy_nodes(tail, grid.n(), &nodes, omega, delta, params)
}

pub fn integrate_isotopy_nodes(
    tail: &TailPath,
    n: usize,
    s_nodes: &[(Vec<f64>, f64)],
    omega: &OmegaSet,
    delta: f64,
    params: &FlowParams,
) -> Result<FlowField> {
    if !(delta > 0.0) {
        return Err(Error::domain("flow delta must be positive"));
    }
    if n == 0 || n > 5 {
        return Err(Error::domain("flow supports 1 to 5 convolution factors"));
    }
    let reach = tail.start().norm() + tail.total_length();
    omega.check_query_radius(Complex64::new(reach, 0.0))?;
    let measured = tail.min_distance_to(omega);
    if measured < delta * (1.0 - 1e-9) {
        return Err(Error::DeltaViolated {
            measured,
            delta,
            t: f64::NAN,
        });
    }
    let results: Vec<Result<NodeFlow>> = s_nodes
        .par_iter()
        .map(|(s, w)| integrate_node(tail, n, s, *w, omega, delta, params))
        .collect();
    let mut nodes = Vec::with_capacity(results.len());
    for r in results {
        nodes.push(r?);
    }
    Ok(FlowField {
        n,
        delta,
        length_bound: reach,
        start: tail.start(),
        nodes,
    })
}

/// Flow of a single simplex node (plus variational companions), for callers
/// that drive their own quadrature.
pub fn flow_single_node(
    tail: &TailPath,
    n: usize,
    s: &[f64],
    omega: &OmegaSet,
    delta: f64,
    params: &FlowParams,
) -> Result<NodeFlow> {
    integrate_node(tail, n, s, 1.0, omega, delta, params)
}

/// One node plus its 2n centrally perturbed companions, integrated with a
/// shared adaptive step sequence.
fn integrate_node(
    tail: &TailPath,
    n: usize,
    s: &[f64],
    weight: f64,
    omega: &OmegaSet,
    delta: f64,
    params: &FlowParams,
) -> Result<NodeFlow> {
    assert_eq!(s.len(), n);
    let members = 2 * n + 1;
    let h_fd = params.fd_spacing;
    let start = tail.start();

    // state[m * n + i] = component i of member m; member 0 is the center,
    // members 2j+1 / 2j+2 are s + h e_j and s - h e_j.
    let mut state: Vec<Complex64> = Vec::with_capacity(members * n);
    for m in 0..members {
        for i in 0..n {
            let mut si = s[i];
            if m > 0 {
                let j = (m - 1) / 2;
                if i == j {
                    si += if m % 2 == 1 { h_fd } else { -h_fd };
                }
            }
            state.push(start * si);
        }
    }

    let h_max = 0.5 * delta;
    let h_min = 1e-12 * (1.0 + tail.total_length());
    let mut samples: Vec<FlowSample> = Vec::new();
    let mut trajectories: Vec<Vec<Complex64>> = (0..n).map(|i| vec![state[i]]).collect();
    let mut arc_since_record = vec![0.0f64; n];
    let mut min_d = f64::INFINITY;
    let mut accepted_steps = 0usize;

    let jac_of = |state: &[Complex64]| -> Vec<Complex64> {
        let mut jac = vec![Complex64::zero(); n * n];
        for i in 0..n {
            for j in 0..n {
                let plus = state[(2 * j + 1) * n + i];
                let minus = state[(2 * j + 2) * n + i];
                jac[i * n + j] = (plus - minus) / (2.0 * h_fd);
            }
        }
        jac
    };

    let record =
        |t: f64, state: &[Complex64], d: f64, samples: &mut Vec<FlowSample>, trajectories: &mut [Vec<Complex64>]| {
            samples.push(FlowSample {
                t,
                xi: state[..n].to_vec(),
                d,
                jacobian: jac_of(state),
            });
            for (i, traj) in trajectories.iter_mut().enumerate() {
                let p = state[i];
                if (p - *traj.last().unwrap()).norm() > 0.0 {
                    traj.push(p);
                }
            }
        };

    {
        let d0 = denominator(&state[..n], tail.point(0, 0.0), omega);
        min_d = min_d.min(d0);
        record(0.0, &state, d0, &mut samples, &mut trajectories);
    }

    let mut work = StepWork::new(state.len());
    for k in 0..tail.segment_count() {
        let (t_begin, t_end) = tail.segment_span(k);
        let dir = tail.direction(k);
        let mut t = t_begin;
        let mut h = (h_max).min(t_end - t_begin);
        while t < t_end - 1e-14 * (1.0 + t_end) {
            let h_trial = h.min(t_end - t);
            work.full_and_double_half(&state, t, h_trial, dir, tail, k, n, omega);
            let err = work
                .full
                .iter()
                .zip(&work.two)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            if err <= params.step_tol {
                // Per-component arc movement of the center member.
                for i in 0..n {
                    arc_since_record[i] += (work.two[i] - state[i]).norm();
                }
                state.copy_from_slice(&work.two);
                t += h_trial;
                accepted_steps += 1;

                let gamma_t = tail.point(k, t);
                let d = denominator(&state[..n], gamma_t, omega);
                min_d = min_d.min(d);
                if d < delta * (1.0 - 1e-9) {
                    return Err(Error::DeltaViolated {
                        measured: d,
                        delta,
                        t,
                    });
                }
                // Record densely enough that each recorded chord provably
                // stays on the right side of every singular point: trigger
                // before any component has moved half its clearance.
                let mut need_record = t >= t_end - 1e-14 * (1.0 + t_end);
                for i in 0..n {
                    if state[i].norm() == 0.0 {
                        continue;
                    }
                    let clearance = omega.eta_unchecked(state[i]).min(0.5 * delta);
                    if arc_since_record[i] >= 0.5 * clearance.max(1e-6) {
                        need_record = true;
                    }
                }
                if need_record {
                    record(t, &state, d, &mut samples, &mut trajectories);
                    arc_since_record.iter_mut().for_each(|a| *a = 0.0);
                }
                let grow = if err > 0.0 {
                    0.9 * (params.step_tol / err).powf(1.0 / 3.0)
                } else {
                    4.0
                };
                h = (h * grow.clamp(0.5, 4.0)).min(h_max);
            } else {
                h *= 0.9 * (params.step_tol / err).powf(1.0 / 3.0).clamp(0.1, 0.9);
                if h < h_min {
                    return Err(Error::StepUnderflow { t, h });
                }
            }
        }
    }

    let last_t = tail.total_length();
    if samples.last().map(|s| s.t) != Some(last_t) {
        let d = denominator(&state[..n], tail.end(), omega);
        record(last_t, &state, d, &mut samples, &mut trajectories);
    }
    // Make sure every trajectory polyline reaches the exact endpoint state.
    for (i, traj) in trajectories.iter_mut().enumerate() {
        if (state[i] - *traj.last().unwrap()).norm() > 0.0 {
            traj.push(state[i]);
        }
    }

    Ok(NodeFlow {
        s: s.to_vec(),
        weight,
        endpoint: state[..n].to_vec(),
        jacobian: jac_of(&state),
        trajectories,
        samples,
        min_d,
        accepted_steps,
    })
}

fn denominator(xi: &[Complex64], gamma_t: Complex64, omega: &OmegaSet) -> f64 {
    let mut sum = Complex64::zero();
    let mut d = 0.0;
    for x in xi {
        sum += x;
        d += omega.eta_unchecked(*x);
    }
    d + omega.eta_unchecked(gamma_t - sum)
}

/// Reusable buffers for the stepper's trial computations.
struct StepWork {
    k: Vec<Complex64>,
    mid: Vec<Complex64>,
    full: Vec<Complex64>,
    half: Vec<Complex64>,
    two: Vec<Complex64>,
}

impl StepWork {
    fn new(dim: usize) -> Self {
        StepWork {
            k: vec![Complex64::zero(); dim],
            mid: vec![Complex64::zero(); dim],
            full: vec![Complex64::zero(); dim],
            half: vec![Complex64::zero(); dim],
            two: vec![Complex64::zero(); dim],
        }
    }

    /// Fill `full` with one midpoint step of size `h` from `state`, and
    /// `two` with two consecutive midpoint half-steps.
    #[allow(clippy::too_many_arguments)]
    fn full_and_double_half(
        &mut self,
        state: &[Complex64],
        t: f64,
        h: f64,
        dir: Complex64,
        tail: &TailPath,
        seg: usize,
        n: usize,
        omega: &OmegaSet,
    ) {
        midpoint_into(state, t, h, dir, tail, seg, n, omega, &mut self.k, &mut self.mid, &mut self.full);
        midpoint_into(state, t, 0.5 * h, dir, tail, seg, n, omega, &mut self.k, &mut self.mid, &mut self.half);
        let half = std::mem::take(&mut self.half);
        midpoint_into(&half, t + 0.5 * h, 0.5 * h, dir, tail, seg, n, omega, &mut self.k, &mut self.mid, &mut self.two);
        self.half = half;
    }
}

/// One explicit midpoint step of the whole bundle, written into `out`.
#[allow(clippy::too_many_arguments)]
fn midpoint_into(
    state: &[Complex64],
    t: f64,
    h: f64,
    dir: Complex64,
    tail: &TailPath,
    seg: usize,
    n: usize,
    omega: &OmegaSet,
    k: &mut [Complex64],
    mid: &mut [Complex64],
    out: &mut [Complex64],
) {
    rhs_into(state, tail.point(seg, t), dir, n, omega, k);
    for ((m, x), v) in mid.iter_mut().zip(state).zip(k.iter()) {
        *m = x + v * (0.5 * h);
    }
    rhs_into(mid, tail.point(seg, t + 0.5 * h), dir, n, omega, k);
    for ((o, x), v) in out.iter_mut().zip(state).zip(k.iter()) {
        *o = x + v * h;
    }
}

fn rhs_into(
    state: &[Complex64],
    gamma_t: Complex64,
    dir: Complex64,
    n: usize,
    omega: &OmegaSet,
    out: &mut [Complex64],
) {
    let members = state.len() / n;
    let mut etas = [0.0f64; 8];
    for m in 0..members {
        let xi = &state[m * n..(m + 1) * n];
        let mut sum = Complex64::zero();
        let mut d = 0.0;
        for (i, x) in xi.iter().enumerate() {
            sum += x;
            let e = omega.eta_unchecked(*x);
            etas[i] = e;
            d += e;
        }
        d += omega.eta_unchecked(gamma_t - sum);
        for i in 0..n {
            out[m * n + i] = dir * (etas[i] / d);
        }
    }
}

/// Complex determinant by Gaussian elimination with partial pivoting.
pub fn complex_determinant(a: &[Complex64], n: usize) -> Complex64 {
    assert_eq!(a.len(), n * n);
    let mut m = a.to_vec();
    let mut det = Complex64::new(1.0, 0.0);
    for col in 0..n {
        let mut pivot = col;
        let mut best = m[col * n + col].norm();
        for row in (col + 1)..n {
            let v = m[row * n + col].norm();
            if v > best {
                best = v;
                pivot = row;
            }
        }
        if best == 0.0 {
            return Complex64::zero();
        }
        if pivot != col {
            for j in 0..n {
                m.swap(col * n + j, pivot * n + j);
            }
            det = -det;
        }
        let diag = m[col * n + col];
        det *= diag;
        for row in (col + 1)..n {
            let f = m[row * n + col] / diag;
            for j in col..n {
                let v = m[col * n + j];
                m[row * n + j] -= f * v;
            }
        }
    }
    det
}
