//! Multipartite space shapes and row-major index arithmetic.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Hard cap on the flattened dimension of any shape we materialize densely.
///
/// 2^21 complex amplitudes is 32 MiB; enough for the largest divergence
/// truncation (1364 x 1364) while keeping everything dense.
pub const MAX_TOTAL_DIM: usize = 1 << 21;

/// Ordered list of factor dimensions `(n_1, ..., n_N)` of a tensor product
/// of `N >= 2` finite-dimensional spaces.
///
/// The slot order is meaningful (flattening is slot-1 slowest); no ordering
/// of the dimensions is enforced.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpaceShape {
    dims: Vec<usize>,
}

impl SpaceShape {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.len() < 2 {
            return Err(Error::Shape(format!(
                "need at least 2 tensor slots, got {}",
                dims.len()
            )));
        }
        if dims.iter().any(|&d| d == 0) {
            return Err(Error::Shape("factor dimensions must be >= 1".into()));
        }
        let mut total: usize = 1;
        for &d in &dims {
            total = total
                .checked_mul(d)
                .filter(|&t| t <= MAX_TOTAL_DIM)
                .ok_or_else(|| {
                    Error::SizeCap(format!(
                        "total dimension of {dims:?} exceeds {MAX_TOTAL_DIM}"
                    ))
                })?;
        }
        Ok(Self { dims })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Number of tensor slots `N`.
    pub fn num_slots(&self) -> usize {
        self.dims.len()
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    /// Product of all dimensions except the last slot.
    pub fn leading_product(&self) -> usize {
        self.dims[..self.dims.len() - 1].iter().product()
    }

    pub fn last_dim(&self) -> usize {
        *self.dims.last().unwrap()
    }

    /// Same dimensions sorted ascending. Norm extrema are invariant under
    /// slot permutation, so closed-form criteria are evaluated on this.
    pub fn sorted(&self) -> SpaceShape {
        let mut dims = self.dims.clone();
        dims.sort_unstable();
        SpaceShape { dims }
    }

    /// Whether the closed-form inner radius applies: the largest factor
    /// dimension dominates the product of the others.
    pub fn has_dominant_factor(&self) -> bool {
        let sorted = self.sorted();
        sorted.last_dim() >= sorted.leading_product()
    }

    /// Grouped bipartite shape `(m, n_N)` with the first `N-1` slots merged.
    pub fn coarse_split(&self) -> SpaceShape {
        SpaceShape {
            dims: vec![self.leading_product(), self.last_dim()],
        }
    }

    /// Row-major flat index of a multi-index (slot 1 slowest).
    pub fn flatten_index(&self, multi_index: &[usize]) -> Result<usize> {
        if multi_index.len() != self.dims.len() {
            return Err(Error::Bounds(format!(
                "multi-index has {} entries for {} slots",
                multi_index.len(),
                self.dims.len()
            )));
        }
        let mut flat = 0usize;
        for (k, (&i, &n)) in multi_index.iter().zip(&self.dims).enumerate() {
            if i >= n {
                return Err(Error::Bounds(format!(
                    "index {i} out of range for slot {} of dimension {n}",
                    k + 1
                )));
            }
            flat = flat * n + i;
        }
        Ok(flat)
    }

    /// Inverse of [`flatten_index`](Self::flatten_index).
    pub fn unflatten_index(&self, mut flat: usize) -> Result<Vec<usize>> {
        if flat >= self.total_dim() {
            return Err(Error::Bounds(format!(
                "flat index {flat} out of range for total dimension {}",
                self.total_dim()
            )));
        }
        let mut multi = vec![0usize; self.dims.len()];
        for k in (0..self.dims.len()).rev() {
            multi[k] = flat % self.dims[k];
            flat /= self.dims[k];
        }
        Ok(multi)
    }

    /// Row and column dimensions of the matricization splitting after slot `k`
    /// (1-based): slots `1..=k` index rows, `k+1..=N` index columns.
    pub fn split_dims(&self, split: usize) -> Result<(usize, usize)> {
        if split == 0 || split >= self.dims.len() {
            return Err(Error::Bounds(format!(
                "split {split} out of range 1..={}",
                self.dims.len() - 1
            )));
        }
        let rows = self.dims[..split].iter().product();
        let cols = self.dims[split..].iter().product();
        Ok((rows, cols))
    }
}

impl std::fmt::Display for SpaceShape {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (i, d) in self.dims.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{d}")?;
        }
        write!(f, ")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flatten_examples() {
        let s22 = SpaceShape::new(vec![2, 2]).unwrap();
        assert_eq!(s22.flatten_index(&[0, 0]).unwrap(), 0);
        assert_eq!(s22.flatten_index(&[1, 0]).unwrap(), 2);
        let s234 = SpaceShape::new(vec![2, 3, 4]).unwrap();
        assert_eq!(s234.flatten_index(&[1, 2, 3]).unwrap(), 23);
    }

    #[test]
    fn flatten_rejects_out_of_range() {
        let s = SpaceShape::new(vec![2, 3]).unwrap();
        assert!(s.flatten_index(&[2, 0]).is_err());
        assert!(s.flatten_index(&[0, 0, 0]).is_err());
    }

    #[test]
    fn roundtrip_small_shapes() {
        for dims in [vec![2, 2], vec![2, 3, 4], vec![4, 4, 4, 4], vec![16, 16]] {
            let s = SpaceShape::new(dims).unwrap();
            assert!(s.total_dim() <= 256);
            for flat in 0..s.total_dim() {
                let multi = s.unflatten_index(flat).unwrap();
                assert_eq!(s.flatten_index(&multi).unwrap(), flat);
            }
        }
    }

    #[test]
    fn shape_validation() {
        assert!(SpaceShape::new(vec![2]).is_err());
        assert!(SpaceShape::new(vec![2, 0]).is_err());
        assert!(SpaceShape::new(vec![1 << 11, 1 << 11]).is_err());
    }

    #[test]
    fn dominant_factor() {
        assert!(SpaceShape::new(vec![2, 2]).unwrap().has_dominant_factor());
        assert!(SpaceShape::new(vec![2, 2, 4]).unwrap().has_dominant_factor());
        assert!(SpaceShape::new(vec![4, 2, 2]).unwrap().has_dominant_factor());
        assert!(!SpaceShape::new(vec![2, 2, 2]).unwrap().has_dominant_factor());
        assert!(!SpaceShape::new(vec![2, 2, 3]).unwrap().has_dominant_factor());
    }
}
