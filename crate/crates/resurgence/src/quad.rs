//! Quadrature building blocks: Gauss-Legendre nodes and an adaptive
//! Gauss-Kronrod rule for complex-valued integrands on real intervals.

use num::complex::Complex64;
use num::Zero;

use crate::error::{Error, Result};

/// Gauss-Legendre nodes and weights on `[-1, 1]`, by Newton iteration on the
/// Legendre recurrence.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(m >= 1);
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_with_derivative(m, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(m, x);
        nodes[m - 1 - i] = x;
        weights[m - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

/// Gauss-Legendre rule mapped to `[0, 1]`.
pub fn gauss_legendre_unit(m: usize) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(m);
    (
        x.iter().map(|t| 0.5 * (t + 1.0)).collect(),
        w.iter().map(|v| 0.5 * v).collect(),
    )
}

fn legendre_with_derivative(m: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=m {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let dp = m as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

// 7-15 Gauss-Kronrod pair on [-1, 1].
const XGK: [f64; 8] = [
    0.991455371120813,
    0.949107912342759,
    0.864864423359769,
    0.741531185599394,
    0.586087235467691,
    0.405845151377397,
    0.207784955007898,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529,
    0.063092092629979,
    0.104790010322250,
    0.140653259715525,
    0.169004726639267,
    0.190350578064785,
    0.204432940075298,
    0.209482141084728,
];
const WG: [f64; 4] = [
    0.129484966168870,
    0.279705391489277,
    0.381830050505119,
    0.417959183673469,
];

/// One Gauss-Kronrod 7-15 panel; returns (kronrod value, error estimate).
fn gk15<F>(f: &mut F, a: f64, b: f64) -> Result<(Complex64, f64)>
where
    F: FnMut(f64) -> Result<Complex64>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center)?;
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx)?;
        let f2 = f(center + dx)?;
        kronrod += (f1 + f2) * WGK[j];
        if j % 2 == 1 {
            gauss += (f1 + f2) * WG[j / 2];
        }
    }
    kronrod *= half;
    gauss *= half;
    Ok((kronrod, (kronrod - gauss).norm()))
}

/// Adaptive Gauss-Kronrod integration of a complex integrand on `[a, b]`
/// to absolute tolerance `tol`.
pub fn adaptive_gk<F>(mut f: F, a: f64, b: f64, tol: f64) -> Result<(Complex64, f64)>
where
    F: FnMut(f64) -> Result<Complex64>,
{
    struct Panel {
        a: f64,
        b: f64,
        value: Complex64,
        err: f64,
    }
    let (value, err) = gk15(&mut f, a, b)?;
    let mut panels = vec![Panel { a, b, value, err }];
    let max_panels = 4096;
    loop {
        let total_err: f64 = panels.iter().map(|p| p.err).sum();
        if total_err <= tol || panels.len() >= max_panels {
            let total: Complex64 = panels.iter().map(|p| p.value).fold(Complex64::zero(), |s, v| s + v);
            if total_err > tol {
                return Err(Error::ToleranceNotMet {
                    requested: tol,
                    achieved: total_err,
                });
            }
            return Ok((total, total_err));
        }
        // Split the worst panel.
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.err.partial_cmp(&y.1.err).unwrap())
            .map(|(i, _)| i)
            .unwrap();
        let Panel { a, b, .. } = panels.swap_remove(worst);
        let mid = 0.5 * (a + b);
        let (v1, e1) = gk15(&mut f, a, mid)?;
        let (v2, e2) = gk15(&mut f, mid, b)?;
        panels.push(Panel { a, b: mid, value: v1, err: e1 });
        panels.push(Panel { a: mid, b, value: v2, err: e2 });
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gl_nodes_integrate_polynomials_exactly() {
        let (x, w) = gauss_legendre(8);
        // degree 15 monomial on [-1,1]\: odd vanishes, even = 2/(k+1)
        for k in 0..=15usize {
            let q: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(k as i32)).sum();
            let exact = if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
            assert!((q - exact).abs() < 1e-13, "k = {k}: {q} vs {exact}");
        }
    }

    #[test]
    fn gl_unit_weights_sum_to_one() {
        for m in [1, 2, 5, 16, 32] {
            let (_, w) = gauss_legendre_unit(m);
            let s: f64 = w.iter().sum();
            assert!((s - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn adaptive_gk_oscillatory() {
        // int_0^1 e^{i 40 x} dx = (e^{40i} - 1)/(40 i)
        let f = |x: f64| Ok(Complex64::new(0.0, 40.0 * x).exp());
        let (v, _) = adaptive_gk(f, 0.0, 1.0, 1e-12).unwrap();
        let exact = (Complex64::new(0.0, 40.0).exp() - 1.0) / Complex64::new(0.0, 40.0);
        assert!((v - exact).norm() < 1e-11);
    }

    #[test]
    fn adaptive_gk_endpoint_peak() {
        // int_0^1 1/sqrt(x+1e-4) dx
        let f = |x: f64| Ok(Complex64::new(1.0 / (x + 1e-4).sqrt(), 0.0));
        let (v, _) = adaptive_gk(f, 0.0, 1.0, 1e-10).unwrap();
        let exact = 2.0 * ((1.0f64 + 1e-4).sqrt() - 1e-2);
        assert!((v.re - exact).abs() < 1e-9);
    }
}
