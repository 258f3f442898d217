use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use crate::mesh::Point;

/// First Dirichlet eigenvalue of the L-shaped domain (-1,1)^2 minus [0,1) x (-1,0].
///
/// Published method-of-particular-solutions value (Trefethen and Betcke, 2006).
/// Cross-checked by `examples/lshape_reference.rs`: the last four of six
/// uniform P3 levels, extrapolated with [`extrapolate_known_rate`] using the
/// exponents 4/3, 2 and 8/3, land within 4e-7. The test `lshape_reference_reproduces`
/// repeats a four-level version of that check.
pub const LSHAPE_LAMBDA1: f64 = 9.6397238440219;

/// Closed-form eigenfunction `scale * sin(m pi x) sin(n pi y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RefFunction {
    SineProduct { m: u32, n: u32, scale: f64 },
}

impl RefFunction {
    pub fn value(&self, p: Point) -> f64 {
        match *self {
            RefFunction::SineProduct { m, n, scale } => {
                scale * (m as f64 * PI * p[0]).sin() * (n as f64 * PI * p[1]).sin()
            }
        }
    }

    pub fn grad(&self, p: Point) -> [f64; 2] {
        match *self {
            RefFunction::SineProduct { m, n, scale } => {
                let (a, b) = (m as f64 * PI, n as f64 * PI);
                [scale * a * (a * p[0]).cos() * (b * p[1]).sin(), scale * b * (a * p[0]).sin() * (b * p[1]).cos()]
            }
        }
    }
}

/// Reference data attached to an eigenvalue index.
#[derive(Debug, Clone, PartialEq)]
pub struct Reference {
    /// The continuous eigenvalue with the requested index.
    pub eigenvalue: f64,
    /// Known leading part of the continuous spectrum, ascending, repeated by multiplicity.
    pub spectrum: Vec<f64>,
    /// b-orthonormal basis of the eigenspace, empty when not available in closed form.
    pub basis: Vec<RefFunction>,
}

impl Reference {
    /// Multiplicity of `eigenvalue` within the known spectrum.
    pub fn multiplicity(&self) -> usize {
        self.spectrum.iter().filter(|&&l| (l - self.eigenvalue).abs() <= 1e-12 * self.eigenvalue).count()
    }

    /// 1-based index of the first spectrum entry closest to `lambda`.
    pub fn closest_index(&self, lambda: f64) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for (i, &l) in self.spectrum.iter().enumerate() {
            let d = (l - lambda).abs();
            if best.is_none_or(|(_, bd)| d < bd) {
                best = Some((i + 1, d));
            }
        }
        best.map(|(i, _)| i)
    }
}

/// Sorted values of `m^2 + n^2`, m, n >= 1, long enough to cover index `j`.
pub(super) fn square_sums(j: usize) -> Vec<u64> {
    let count = (j + 1).max(64);
    let mut n = 8u64;
    loop {
        let mut sums: Vec<u64> = (1..=n).flat_map(|a| (1..=n).map(move |b| a * a + b * b)).collect();
        sums.sort_unstable();
        // complete below (n + 1)^2 + 1, the smallest sum involving an index > n
        let bound = (n + 1) * (n + 1) + 1;
        let complete = sums.iter().take_while(|&&s| s < bound).count();
        if complete >= count {
            sums.truncate(complete);
            return sums;
        }
        n *= 2;
    }
}

pub(super) fn unit_square(j: usize) -> Reference {
    let sums = square_sums(j);
    let target = sums[j - 1];
    let root = (target as f64).sqrt() as u64 + 1;
    let basis = (1..=root)
        .flat_map(|m| (1..=root).map(move |n| (m, n)))
        .filter(|&(m, n)| m * m + n * n == target)
        .map(|(m, n)| RefFunction::SineProduct { m: m as u32, n: n as u32, scale: 2.0 })
        .collect();
    Reference {
        eigenvalue: PI * PI * target as f64,
        spectrum: sums.iter().take(j.max(20) + 8).map(|&s| PI * PI * s as f64).collect(),
        basis,
    }
}

/// Least-squares fit of `values[i] = L + sum_k c_k h[i]^exponents[k]` and
/// returns the limit `L`. With `exponents.len() + 1` levels the fit is exact.
pub fn extrapolate_known_rate(h: &[f64], values: &[f64], exponents: &[f64]) -> f64 {
    assert_eq!(h.len(), values.len());
    assert!(h.len() > exponents.len(), "need more levels than correction terms");
    // scale the columns so the normal matrix is well conditioned
    let cols = exponents.len() + 1;
    let mut a = DMatrix::zeros(h.len(), cols);
    for (i, &hi) in h.iter().enumerate() {
        a[(i, 0)] = 1.0;
        for (k, &p) in exponents.iter().enumerate() {
            a[(i, k + 1)] = (hi / h[0]).powf(p);
        }
    }
    let b = DVector::from_column_slice(values);
    let svd = a.svd(true, true);
    let x = svd.solve(&b, 1e-14).expect("svd solve");
    x[0]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_spectrum_prefix() {
        let s = square_sums(10);
        assert_eq!(&s[..8], &[2, 5, 5, 8, 10, 10, 13, 13]);
        let r = unit_square(4);
        assert_eq!(r.basis, vec![RefFunction::SineProduct { m: 2, n: 2, scale: 2.0 }]);
        assert_eq!(r.closest_index(8.1 * PI * PI), Some(4));
    }

    #[test]
    fn extrapolation_recovers_limit() {
        let h = [0.5, 0.25, 0.125, 0.0625];
        let values: Vec<f64> = h.iter().map(|&x: &f64| 3.0 + 0.7 * x.powf(4.0 / 3.0) - 0.2 * x * x).collect();
        let l = extrapolate_known_rate(&h, &values, &[4.0 / 3.0, 2.0]);
        assert!((l - 3.0).abs() < 1e-12);
    }

    #[test]
    fn sine_gradient_matches_differences() {
        let f = RefFunction::SineProduct { m: 2, n: 1, scale: 2.0 };
        let p = [0.3, 0.6];
        let d = 1e-6;
        let fd = [
            (f.value([p[0] + d, p[1]]) - f.value([p[0] - d, p[1]])) / (2.0 * d),
            (f.value([p[0], p[1] + d]) - f.value([p[0], p[1] - d])) / (2.0 * d),
        ];
        let g = f.grad(p);
        assert!((g[0] - fd[0]).abs() < 1e-7 && (g[1] - fd[1]).abs() < 1e-7);
    }
}
