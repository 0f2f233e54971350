//! Tensorized Gauss-Legendre quadrature over the standard simplex
//! `{s_1,...,s_n >= 0, s_1 + ... + s_n <= 1}`, in its nested description
//! `s_1 in [0,1], s_2 in [0, 1-s_1], ...`.

use crate::quad::gauss_legendre_unit;

/// Quadrature nodes and weights over the n-simplex at a refinement level;
/// weights sum to the simplex volume `1/n!`.
#[derive(Debug, Clone)]
pub struct SimplexGrid {
    n: usize,
    level: u32,
    nodes: Vec<SimplexNode>,
}

#[derive(Debug, Clone)]
pub struct SimplexNode {
    pub s: Vec<f64>,
    pub weight: f64,
}

/// Points per axis at a refinement level; level 3 is the default 16.
pub fn points_per_axis(level: u32) -> usize {
    2usize.pow(level + 1)
}

impl SimplexGrid {
    pub fn new(n: usize, level: u32) -> Self {
        assert!(n >= 1, "simplex dimension must be at least 1");
        assert!(level <= 6, "refinement level capped at 6 (128 points per axis)");
        let m = points_per_axis(level);
        Self::with_points_per_axis(n, m, level)
    }

    pub fn with_points_per_axis(n: usize, m: usize, level: u32) -> Self {
        let (x, w) = gauss_legendre_unit(m);
        let mut nodes = Vec::with_capacity(m.pow(n as u32));
        let mut s = vec![0.0; n];
        build(&x, &w, &mut s, 0, 1.0, 1.0, &mut nodes);
        SimplexGrid { n, level, nodes }
    }

    /// The grid one level coarser, for refinement comparisons.
    pub fn coarser(&self) -> Option<SimplexGrid> {
        if self.level == 0 {
            None
        } else {
            Some(SimplexGrid::new(self.n, self.level - 1))
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn nodes(&self) -> &[SimplexNode] {
        &self.nodes
    }

    pub fn weight_sum(&self) -> f64 {
        self.nodes.iter().map(|p| p.weight).sum()
    }
}

fn build(
    x: &[f64],
    w: &[f64],
    s: &mut Vec<f64>,
    axis: usize,
    remaining: f64,
    weight: f64,
    out: &mut Vec<SimplexNode>,
) {
    let n = s.len();
    if axis == n {
        out.push(SimplexNode {
            s: s.clone(),
            weight,
        });
        return;
    }
    for (xi, wi) in x.iter().zip(w) {
        s[axis] = remaining * xi;
        build(
            x,
            w,
            s,
            axis + 1,
            remaining * (1.0 - xi),
            weight * wi * remaining,
            out,
        );
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factorial(n: usize) -> f64 {
        (1..=n).map(|k| k as f64).product()
    }

    #[test]
    fn weights_sum_to_simplex_volume() {
        for n in 1..=4usize {
            for level in 0..=3u32 {
                let g = SimplexGrid::new(n, level);
                let vol = 1.0 / factorial(n);
                assert!(
                    (g.weight_sum() - vol).abs() < 1e-12,
                    "n = {n}, level = {level}: {} vs {vol}",
                    g.weight_sum()
                );
            }
        }
    }

    #[test]
    fn nodes_lie_in_the_open_simplex() {
        let g = SimplexGrid::new(3, 2);
        for p in g.nodes() {
            assert!(p.s.iter().all(|&si| si > 0.0));
            assert!(p.s.iter().sum::<f64>() < 1.0);
        }
    }

    #[test]
    fn integrates_symmetric_monomial() {
        // int_{Delta_2} s1 s2 = 1/24
        let g = SimplexGrid::new(2, 2);
        let q: f64 = g.nodes().iter().map(|p| p.weight * p.s[0] * p.s[1]).sum();
        assert!((q - 1.0 / 24.0).abs() < 1e-13);
        // int_{Delta_3} s1 = 1/24 as well
        let g3 = SimplexGrid::new(3, 2);
        let q3: f64 = g3.nodes().iter().map(|p| p.weight * p.s[0]).sum();
        assert!((q3 - 1.0 / 24.0).abs() < 1e-13);
    }
}
