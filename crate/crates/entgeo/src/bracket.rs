//! Certified norm brackets and shared solver options.

use crate::error::{Error, Result};
use crate::state::ProductVector;
use nalgebra::DVector;
use num_complex::Complex64;

/// One term of a finite product decomposition: `coefficient * (p_1 (x) ... (x) p_N)`.
#[derive(Debug, Clone)]
pub struct DecompositionTerm {
    pub coefficient: Complex64,
    pub product: ProductVector,
}

/// A finite representation `sum_k c_k * p_k` of a vector by decomposable
/// vectors; its l1 coefficient cost upper-bounds the projective norm.
#[derive(Debug, Clone)]
pub struct ProductDecomposition {
    pub terms: Vec<DecompositionTerm>,
    /// Euclidean norm of `target - sum_k c_k p_k`, recorded at construction.
    pub residual: f64,
}

impl ProductDecomposition {
    pub fn cost(&self) -> f64 {
        self.terms.iter().map(|t| t.coefficient.norm()).sum()
    }

    /// Dense sum of the terms.
    pub fn reconstruct(&self, dim: usize) -> Result<DVector<Complex64>> {
        let mut acc = DVector::zeros(dim);
        for t in &self.terms {
            let expanded = crate::state::expand_product(&t.product)?;
            if expanded.amplitudes().len() != dim {
                return Err(Error::Shape("decomposition term has wrong dimension".into()));
            }
            acc += expanded.amplitudes() * t.coefficient;
        }
        Ok(acc)
    }
}

/// Constructive evidence attached to a bracket endpoint.
#[derive(Debug, Clone)]
pub enum BracketCertificate {
    /// A decomposable vector achieving the lower endpoint of an injective bracket.
    Product(ProductVector),
    /// A product decomposition whose cost is the upper endpoint of a projective bracket.
    Decomposition(ProductDecomposition),
    /// A dual vector `eta` with a certified injective upper bound; the ratio
    /// `|<xi, eta>| / injective_upper` is the lower endpoint it certifies.
    Dual {
        vector: DVector<Complex64>,
        injective_upper: f64,
    },
}

/// Certified interval `[lower, upper]` around a norm value.
#[derive(Debug, Clone)]
pub struct NormBracket {
    pub lower: f64,
    pub upper: f64,
    pub lower_certificate: Option<BracketCertificate>,
    /// Human-readable description of the bound that produced `upper`.
    pub upper_certificate: String,
    pub iterations: usize,
    pub restarts_used: usize,
}

impl NormBracket {
    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        if !(lower.is_finite() && upper.is_finite()) || lower < 0.0 || upper < 0.0 {
            return Err(Error::Invariant(format!(
                "bracket endpoints must be finite and nonnegative, got [{lower}, {upper}]"
            )));
        }
        if lower > upper + 1e-12 {
            return Err(Error::Invariant(format!(
                "bracket lower {lower} exceeds upper {upper}"
            )));
        }
        Ok(Self {
            lower,
            upper: upper.max(lower),
            lower_certificate: None,
            upper_certificate: String::new(),
            iterations: 0,
            restarts_used: 0,
        })
    }

    /// Exact value known to full precision.
    pub fn exact(value: f64, certificate: &str) -> Self {
        Self {
            lower: value,
            upper: value,
            lower_certificate: None,
            upper_certificate: certificate.to_string(),
            iterations: 0,
            restarts_used: 0,
        }
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }

    pub fn contains(&self, value: f64, tol: f64) -> bool {
        value >= self.lower - tol && value <= self.upper + tol
    }

    /// Applies a monotone decreasing map, swapping endpoints.
    pub fn map_decreasing(&self, f: impl Fn(f64) -> f64, certificate: &str) -> Self {
        Self {
            lower: f(self.upper),
            upper: f(self.lower),
            lower_certificate: None,
            upper_certificate: certificate.to_string(),
            iterations: self.iterations,
            restarts_used: self.restarts_used,
        }
    }

    /// Squares both endpoints (valid for nonnegative brackets).
    pub fn squared(&self) -> Self {
        Self {
            lower: self.lower * self.lower,
            upper: self.upper * self.upper,
            lower_certificate: self.lower_certificate.clone(),
            upper_certificate: self.upper_certificate.clone(),
            iterations: self.iterations,
            restarts_used: self.restarts_used,
        }
    }
}

/// Knobs shared by every iterative solver in the crate. All randomized
/// work derives per-task seeds from `seed`, so runs are reproducible.
#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    pub restarts: usize,
    pub max_iterations: usize,
    pub tolerance: f64,
    pub seed: u64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            restarts: 64,
            max_iterations: 500,
            tolerance: 1e-10,
            seed: 0,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::Invariant("restarts must be >= 1".into()));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::Invariant("tolerance must be positive".into()));
        }
        Ok(())
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    /// Seed for the `index`-th independent subtask.
    pub fn derived_seed(&self, index: u64) -> u64 {
        // splitmix64 step keeps derived streams well separated.
        let mut z = self
            .seed
            .wrapping_add(0x9E37_79B9_7F4A_7C15u64.wrapping_mul(index.wrapping_add(1)));
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bracket_ordering_enforced() {
        assert!(NormBracket::new(1.0, 0.5).is_err());
        assert!(NormBracket::new(0.5, 1.0).is_ok());
        assert!(NormBracket::new(-0.1, 1.0).is_err());
        // tiny inversion within float slack is tolerated and clamped
        let b = NormBracket::new(1.0, 1.0 - 1e-13).unwrap();
        assert!(b.upper >= b.lower);
    }

    #[test]
    fn decreasing_map_swaps_endpoints() {
        let b = NormBracket::new(0.5, 0.8).unwrap();
        let d = b.map_decreasing(|t| (2.0 - 2.0 * t).max(0.0).sqrt(), "distance map");
        assert!(d.lower < d.upper);
        assert!((d.lower - (2.0f64 - 1.6).sqrt()).abs() < 1e-12);
        assert!((d.upper - (2.0f64 - 1.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn derived_seeds_differ() {
        let opts = SolverOptions::default().with_seed(9);
        let a = opts.derived_seed(0);
        let b = opts.derived_seed(1);
        assert_ne!(a, b);
        assert_eq!(a, opts.derived_seed(0));
    }
}
