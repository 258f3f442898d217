use serde::{Deserialize, Serialize};

/// One monomial `c * x^px * y^py`, written `[px, py, c]` in problem files.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Monomial(pub u32, pub u32, pub f64);

/// Polynomial in `(x, y)` stored as a sum of monomials.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Poly {
    terms: Vec<Monomial>,
}

impl Poly {
    pub fn new(terms: Vec<Monomial>) -> Self {
        Self { terms }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: f64) -> Self {
        Self { terms: vec![Monomial(0, 0, c)] }
    }

    pub fn terms(&self) -> &[Monomial] {
        &self.terms
    }

    pub fn degree(&self) -> u32 {
        self.terms.iter().filter(|m| m.2 != 0.0).map(|m| m.0 + m.1).max().unwrap_or(0)
    }

    pub fn eval(&self, p: [f64; 2]) -> f64 {
        self.terms.iter().map(|&Monomial(i, j, c)| c * p[0].powi(i as i32) * p[1].powi(j as i32)).sum()
    }

    pub fn dx(&self) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .filter(|m| m.0 > 0)
                .map(|&Monomial(i, j, c)| Monomial(i - 1, j, c * i as f64))
                .collect(),
        }
    }

    pub fn plus(&self, other: &Poly) -> Poly {
        Poly { terms: self.terms.iter().chain(&other.terms).copied().collect() }
    }

    pub fn dy(&self) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .filter(|m| m.1 > 0)
                .map(|&Monomial(i, j, c)| Monomial(i, j - 1, c * j as f64))
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivatives() {
        // 1 + 2x + 3xy^2
        let p = Poly::new(vec![Monomial(0, 0, 1.0), Monomial(1, 0, 2.0), Monomial(1, 2, 3.0)]);
        assert_eq!(p.degree(), 3);
        assert_eq!(p.eval([2.0, 1.0]), 1.0 + 4.0 + 6.0);
        assert_eq!(p.dx().eval([2.0, 1.0]), 2.0 + 3.0);
        assert_eq!(p.dy().eval([2.0, 1.0]), 12.0);
        assert_eq!(Poly::constant(4.0).dx().eval([1.0, 1.0]), 0.0);
    }
}
