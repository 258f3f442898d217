//! Gauss rules on [0, 1] and on the reference triangle (0,0), (1,0), (0,1).
//!
//! Triangle rules are collapsed (Duffy) tensor products of Gauss-Legendre
//! rules, exact for every polynomial up to the requested degree.

use std::sync::OnceLock;

#[derive(Debug, Clone)]
pub struct LineRule {
    /// Nodes in [0, 1].
    pub points: Vec<f64>,
    /// Weights summing to 1.
    pub weights: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct TriangleRule {
    /// Reference coordinates (xi, eta).
    pub points: Vec<[f64; 2]>,
    /// Weights summing to 1/2, the reference area.
    pub weights: Vec<f64>,
}

/// Gauss-Legendre rule with `n` points mapped to [0, 1].
pub fn gauss_legendre(n: usize) -> LineRule {
    assert!(n >= 1);
    let mut points = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        points[i] = 0.5 * (1.0 - x);
        points[n - 1 - i] = 0.5 * (1.0 + x);
        weights[i] = 0.5 * w;
        weights[n - 1 - i] = 0.5 * w;
    }
    LineRule { points, weights }
}

/// Value and derivative of the Legendre polynomial of degree `n` at `x`.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Line rule exact for polynomials of degree `degree`.
pub fn line_rule(degree: usize) -> &'static LineRule {
    static RULES: OnceLock<Vec<LineRule>> = OnceLock::new();
    let rules = RULES.get_or_init(|| (1..=MAX_POINTS).map(gauss_legendre).collect());
    let n = (degree + 2) / 2;
    &rules[n.clamp(1, MAX_POINTS) - 1]
}

const MAX_POINTS: usize = 24;

/// Triangle rule exact for polynomials of total degree `degree`.
pub fn triangle_rule(degree: usize) -> &'static TriangleRule {
    static RULES: OnceLock<Vec<TriangleRule>> = OnceLock::new();
    let rules = RULES.get_or_init(|| (1..=MAX_POINTS).map(collapsed).collect());
    // the collapse adds one power of the second coordinate
    let n = (degree + 3) / 2;
    assert!(n <= MAX_POINTS, "quadrature degree {degree} too high");
    &rules[n - 1]
}

fn collapsed(n: usize) -> TriangleRule {
    let g = gauss_legendre(n);
    let mut points = Vec::with_capacity(n * n);
    let mut weights = Vec::with_capacity(n * n);
    for (&v, &wv) in g.points.iter().zip(&g.weights) {
        for (&u, &wu) in g.points.iter().zip(&g.weights) {
            points.push([u * (1.0 - v), v]);
            weights.push(wu * wv * (1.0 - v));
        }
    }
    TriangleRule { points, weights }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factorial(n: u32) -> f64 {
        (1..=n).map(|k| k as f64).product()
    }

    #[test]
    fn triangle_monomials_exact() {
        // integral of xi^a eta^b over the reference triangle is a! b! / (a + b + 2)!
        for degree in 0..=14usize {
            let rule = triangle_rule(degree);
            for a in 0..=degree as u32 {
                let b = degree as u32 - a;
                let q: f64 = rule
                    .points
                    .iter()
                    .zip(&rule.weights)
                    .map(|(p, w)| w * p[0].powi(a as i32) * p[1].powi(b as i32))
                    .sum();
                let exact = factorial(a) * factorial(b) / factorial(a + b + 2);
                assert!((q - exact).abs() < 1e-15, "degree {degree}, a {a}: {q} vs {exact}");
            }
        }
    }

    #[test]
    fn line_monomials_exact() {
        for degree in 0..=20usize {
            let rule = line_rule(degree);
            let q: f64 = rule.points.iter().zip(&rule.weights).map(|(x, w)| w * x.powi(degree as i32)).sum();
            assert!((q - 1.0 / (degree as f64 + 1.0)).abs() < 1e-15);
        }
    }
}
