//! Coefficient fields, problem definitions and the builtin benchmarks.

mod file;
mod poly;
mod reference;

pub use file::{load_problem, parse_problem};
pub use poly::{Monomial, Poly};
pub use reference::{extrapolate_known_rate, RefFunction, Reference, LSHAPE_LAMBDA1};

use std::collections::BTreeMap;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::marking::MarkConfig;
use crate::mesh::{lshape_grid, unit_square_grid, Point, Triangulation};

/// Symmetric diffusion tensor `[[a11, a12], [a12, a22]]` and scalar weight `b`
/// on one region of the initial mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionCoefficients {
    pub a11: Poly,
    pub a12: Poly,
    pub a22: Poly,
    pub b: Poly,
}

impl RegionCoefficients {
    pub fn isotropic(alpha: f64, beta: f64) -> Self {
        Self { a11: Poly::constant(alpha), a12: Poly::zero(), a22: Poly::constant(alpha), b: Poly::constant(beta) }
    }

    pub fn a(&self, p: Point) -> [[f64; 2]; 2] {
        let off = self.a12.eval(p);
        [[self.a11.eval(p), off], [off, self.a22.eval(p)]]
    }

    /// Row-wise divergence, entry i is the sum over j of d_j A_ij.
    pub fn div_a(&self, p: Point) -> [f64; 2] {
        [self.a11.dx().eval(p) + self.a12.dy().eval(p), self.a12.dx().eval(p) + self.a22.dy().eval(p)]
    }

    pub fn b(&self, p: Point) -> f64 {
        self.b.eval(p)
    }

    fn degree_a(&self) -> u32 {
        self.a11.degree().max(self.a12.degree()).max(self.a22.degree())
    }
}

/// Declared bounds: eigenvalues of A within `a`, values of B within `b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    pub a: [f64; 2],
    pub b: [f64; 2],
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientField {
    regions: BTreeMap<u32, RegionCoefficients>,
    pub bounds: Bounds,
}

impl CoefficientField {
    pub fn new(regions: BTreeMap<u32, RegionCoefficients>, bounds: Bounds) -> Self {
        Self { regions, bounds }
    }

    /// `A = I`, `B = 1` on every listed region.
    pub fn laplace(regions: &[u32]) -> Self {
        let map = regions.iter().map(|&r| (r, RegionCoefficients::isotropic(1.0, 1.0))).collect();
        Self::new(map, Bounds { a: [1.0, 1.0], b: [1.0, 1.0] })
    }

    pub fn region(&self, id: u32) -> Result<&RegionCoefficients> {
        self.regions.get(&id).ok_or(Error::UnknownRegion(id))
    }

    pub fn regions(&self) -> impl Iterator<Item = (u32, &RegionCoefficients)> {
        self.regions.iter().map(|(&k, v)| (k, v))
    }

    pub fn eval_a(&self, region: u32, p: Point) -> Result<[[f64; 2]; 2]> {
        Ok(self.region(region)?.a(p))
    }

    pub fn eval_div_a(&self, region: u32, p: Point) -> Result<[f64; 2]> {
        Ok(self.region(region)?.div_a(p))
    }

    pub fn eval_b(&self, region: u32, p: Point) -> Result<f64> {
        Ok(self.region(region)?.b(p))
    }

    /// Largest polynomial degree among A entries.
    pub fn degree_a(&self) -> u32 {
        self.regions.values().map(|r| r.degree_a()).max().unwrap_or(0)
    }

    pub fn degree_b(&self) -> u32 {
        self.regions.values().map(|r| r.b.degree()).max().unwrap_or(0)
    }

    /// Checks region coverage and samples ellipticity and the B bounds at 64
    /// quasi-random points per region.
    pub fn check(&self, mesh: &Triangulation) -> Result<()> {
        let Bounds { a: [a1, a2], b: [b1, b2] } = self.bounds;
        if !(a1 > 0.0 && a1 <= a2 && b1 > 0.0 && b1 <= b2) {
            return Err(Error::Coefficient(format!("invalid bounds a=[{a1}, {a2}] b=[{b1}, {b2}]")));
        }
        let mut by_region: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
        for (t, el) in mesh.elements().iter().enumerate() {
            by_region.entry(el.region).or_default().push(t);
        }
        let slack = 1e-12;
        for (&region, elems) in &by_region {
            let coeffs = self.region(region)?;
            for i in 0..64 {
                let t = elems[i % elems.len()];
                let (mut s, mut r) = (halton(i + 1, 2), halton(i + 1, 3));
                if s + r > 1.0 {
                    (s, r) = (1.0 - s, 1.0 - r);
                }
                let c = mesh.element_coords(t);
                let p = [
                    c[0][0] + s * (c[1][0] - c[0][0]) + r * (c[2][0] - c[0][0]),
                    c[0][1] + s * (c[1][1] - c[0][1]) + r * (c[2][1] - c[0][1]),
                ];
                let a = coeffs.a(p);
                let (lo, hi) = sym_eigenvalues(a);
                if lo < a1 * (1.0 - slack) || hi > a2 * (1.0 + slack) {
                    return Err(Error::Coefficient(format!(
                        "A at ({}, {}) in region {region} has eigenvalues [{lo}, {hi}] outside [{a1}, {a2}]",
                        p[0], p[1]
                    )));
                }
                let b = coeffs.b(p);
                if b < b1 * (1.0 - slack) || b > b2 * (1.0 + slack) {
                    return Err(Error::Coefficient(format!(
                        "B at ({}, {}) in region {region} is {b}, outside [{b1}, {b2}]",
                        p[0], p[1]
                    )));
                }
            }
        }
        Ok(())
    }
}

fn sym_eigenvalues(a: [[f64; 2]; 2]) -> (f64, f64) {
    let mean = 0.5 * (a[0][0] + a[1][1]);
    let rad = (0.25 * (a[0][0] - a[1][1]).powi(2) + a[0][1] * a[0][1]).sqrt();
    (mean - rad, mean + rad)
}

fn halton(mut i: usize, base: usize) -> f64 {
    let (mut f, mut r) = (1.0, 0.0);
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

/// Where reference eigenvalues come from.
#[derive(Debug, Clone, PartialEq)]
pub enum ReferenceSource {
    None,
    /// Dirichlet Laplacian on the unit square, closed form.
    UnitSquareLaplace,
    /// Leading eigenvalues known from an external computation.
    Tabulated(Vec<f64>),
}

#[derive(Debug, Clone)]
pub struct ProblemDef {
    pub name: String,
    pub mesh: Triangulation,
    pub coefficients: CoefficientField,
    pub degree: usize,
    pub eig_index: usize,
    pub reference: ReferenceSource,
    /// Marking configuration carried by a problem file, if any.
    pub marking: Option<MarkConfig>,
}

impl ProblemDef {
    pub fn validate(&self) -> Result<()> {
        if !(1..=3).contains(&self.degree) {
            return Err(Error::Config(format!("polynomial degree {} not in 1..=3", self.degree)));
        }
        if self.eig_index == 0 {
            return Err(Error::Config("eigenvalue index must be at least 1".into()));
        }
        self.coefficients.check(&self.mesh)
    }

    pub fn with_degree(mut self, degree: usize) -> Self {
        self.degree = degree;
        self
    }

    pub fn with_eig_index(mut self, j: usize) -> Self {
        self.eig_index = j;
        self
    }

    /// Reference data for the selected eigenvalue index, if known.
    pub fn reference(&self) -> Option<Reference> {
        match &self.reference {
            ReferenceSource::None => None,
            ReferenceSource::UnitSquareLaplace => Some(reference::unit_square(self.eig_index)),
            ReferenceSource::Tabulated(list) => list.get(self.eig_index - 1).map(|&eigenvalue| Reference {
                eigenvalue,
                spectrum: list.clone(),
                basis: Vec::new(),
            }),
        }
    }
}

/// Default diffusion ratio of the `interface` benchmark.
pub const INTERFACE_ALPHA: f64 = 10.0;

/// Builtin benchmark by name: `square`, `lshape`, `interface` or `interface:<alpha>`.
/// All start with degree 1 and eigenvalue index 1.
pub fn builtin(name: &str) -> Result<ProblemDef> {
    let (mesh, coefficients, reference) = match name {
        "square" => (unit_square_grid(2), CoefficientField::laplace(&[0, 1]), ReferenceSource::UnitSquareLaplace),
        "lshape" => (lshape_grid(2), CoefficientField::laplace(&[0]), ReferenceSource::Tabulated(vec![LSHAPE_LAMBDA1])),
        _ => {
            let alpha = match name.strip_prefix("interface") {
                Some("") => INTERFACE_ALPHA,
                Some(rest) => rest
                    .strip_prefix(':')
                    .and_then(|a| a.parse::<f64>().ok())
                    .filter(|a| *a > 0.0)
                    .ok_or_else(|| Error::UnknownProblem(name.to_string()))?,
                None => return Err(Error::UnknownProblem(name.to_string())),
            };
            return Ok(interface(alpha));
        }
    };
    Ok(ProblemDef { name: name.to_string(), mesh, coefficients, degree: 1, eig_index: 1, reference, marking: None })
}

/// Unit square with `A = alpha I` for x < 1/2 and `A = I` for x > 1/2, `B = 1`.
/// The interface x = 1/2 is a mesh line of the initial grid.
pub fn interface(alpha: f64) -> ProblemDef {
    let mut regions = BTreeMap::new();
    regions.insert(0, RegionCoefficients::isotropic(alpha, 1.0));
    regions.insert(1, RegionCoefficients::isotropic(1.0, 1.0));
    let bounds = Bounds { a: [alpha.min(1.0), alpha.max(1.0)], b: [1.0, 1.0] };
    ProblemDef {
        name: format!("interface:{alpha}"),
        mesh: unit_square_grid(2),
        coefficients: CoefficientField::new(regions, bounds),
        degree: 1,
        eig_index: 1,
        reference: ReferenceSource::None,
        marking: None,
    }
}

/// `lambda_j` of the unit-square Dirichlet Laplacian, `pi^2 (m^2 + n^2)`.
pub fn unit_square_eigenvalue(j: usize) -> f64 {
    PI * PI * reference::square_sums(j)[j - 1] as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn square_reference_values() {
        let p = builtin("square").unwrap();
        let r = p.reference().unwrap();
        assert_relative_eq!(r.eigenvalue, 19.739208802178716, max_relative = 1e-15);
        let r2 = p.clone().with_eig_index(2).reference().unwrap();
        assert_relative_eq!(r2.eigenvalue, 5.0 * PI * PI, max_relative = 1e-15);
        assert_relative_eq!(r2.eigenvalue, 49.34802200544679, max_relative = 1e-14);
        assert_eq!(r2.basis.len(), 2);
        assert_eq!(r2.multiplicity(), 2);
    }

    #[test]
    fn lshape_reference_is_tabulated() {
        let p = builtin("lshape").unwrap();
        assert_relative_eq!(p.reference().unwrap().eigenvalue, 9.6397238, max_relative = 1e-7);
        assert!(p.clone().with_eig_index(2).reference().is_none());
    }

    #[test]
    fn coefficient_evaluation() {
        let field = CoefficientField::laplace(&[0]);
        assert_eq!(field.eval_a(0, [0.3, 0.7]).unwrap(), [[1.0, 0.0], [0.0, 1.0]]);
        assert_eq!(field.eval_div_a(0, [0.3, 0.7]).unwrap(), [0.0, 0.0]);
        assert!(matches!(field.eval_b(3, [0.0, 0.0]), Err(Error::UnknownRegion(3))));

        let graded = RegionCoefficients {
            a11: Poly::new(vec![Monomial(0, 0, 1.0), Monomial(1, 0, 1.0)]),
            a12: Poly::zero(),
            a22: Poly::constant(1.0),
            b: Poly::constant(1.0),
        };
        assert_eq!(graded.div_a([0.4, 0.2]), [1.0, 0.0]);

        let p = interface(100.0);
        assert_eq!(p.coefficients.eval_a(0, [0.25, 0.5]).unwrap(), [[100.0, 0.0], [0.0, 100.0]]);
        p.validate().unwrap();
    }

    #[test]
    fn ellipticity_violation_is_caught() {
        let mut p = builtin("square").unwrap();
        p.coefficients.bounds.a = [2.0, 3.0];
        assert!(matches!(p.validate(), Err(Error::Coefficient(_))));
    }

    #[test]
    fn unknown_name() {
        assert!(matches!(builtin("disk"), Err(Error::UnknownProblem(_))));
        assert!(builtin("interface:2.5").is_ok());
    }

    #[test]
    fn builtins_validate() {
        for name in ["square", "lshape", "interface"] {
            builtin(name).unwrap().validate().unwrap();
        }
    }
}
