//! Pure states, product vectors, and density operators over a [`SpaceShape`],
//! with the dense tensor operations the norm solvers are built on.

use crate::error::{Error, Result};
use crate::linalg::inner;
use crate::space::SpaceShape;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

/// Unit-norm tolerance for values constructed by this crate.
pub const CONSTRUCT_TOL: f64 = 1e-9;
/// Unit-norm tolerance for externally loaded data.
pub const LOAD_TOL: f64 = 1e-8;

/// A unit vector of `H_1 (x) ... (x) H_N`, flattened slot-1 slowest.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    shape: SpaceShape,
    amplitudes: DVector<Complex64>,
}

impl PureState {
    /// Builds a state, enforcing the unit-norm invariant at `tol`.
    pub fn new_with_tol(
        shape: SpaceShape,
        amplitudes: Vec<Complex64>,
        tol: f64,
    ) -> Result<Self> {
        if amplitudes.len() != shape.total_dim() {
            return Err(Error::Shape(format!(
                "amplitude count {} does not match total dimension {} of {shape}",
                amplitudes.len(),
                shape.total_dim()
            )));
        }
        let v = DVector::from_vec(amplitudes);
        let norm = v.norm();
        if (norm - 1.0).abs() > tol {
            return Err(Error::Invariant(format!(
                "state norm {norm} deviates from 1 beyond tolerance {tol}"
            )));
        }
        Ok(Self {
            shape,
            amplitudes: v,
        })
    }

    pub fn new(shape: SpaceShape, amplitudes: Vec<Complex64>) -> Result<Self> {
        Self::new_with_tol(shape, amplitudes, CONSTRUCT_TOL)
    }

    /// Normalizes an arbitrary nonzero amplitude vector into a state.
    pub fn normalized(shape: SpaceShape, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != shape.total_dim() {
            return Err(Error::Shape(format!(
                "amplitude count {} does not match total dimension {} of {shape}",
                amplitudes.len(),
                shape.total_dim()
            )));
        }
        let mut v = DVector::from_vec(amplitudes);
        let norm = v.norm();
        if norm < 1e-300 {
            return Err(Error::Invariant("cannot normalize the zero vector".into()));
        }
        v /= Complex64::new(norm, 0.0);
        Ok(Self {
            shape,
            amplitudes: v,
        })
    }

    pub fn shape(&self) -> &SpaceShape {
        &self.shape
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    pub fn overlap(&self, other: &PureState) -> Complex64 {
        inner(&self.amplitudes, &other.amplitudes)
    }

    /// The same amplitudes viewed under a different shape with equal total
    /// dimension. Merging adjacent slots is the common use; the row-major
    /// layout makes that a no-op on the data.
    pub fn reshaped(&self, shape: SpaceShape) -> Result<PureState> {
        if shape.total_dim() != self.shape.total_dim() {
            return Err(Error::Shape(format!(
                "cannot view {} amplitudes as shape {shape}",
                self.shape.total_dim()
            )));
        }
        Ok(PureState {
            shape,
            amplitudes: self.amplitudes.clone(),
        })
    }

    /// Matricization splitting after slot `split` (1-based): entry `(r, c)`
    /// is the amplitude whose leading slots flatten to `r` and trailing
    /// slots flatten to `c`.
    pub fn matricize(&self, split: usize) -> Result<DMatrix<Complex64>> {
        let (rows, cols) = self.shape.split_dims(split)?;
        // Row-major flattening means flat = r * cols + c.
        let mut m = DMatrix::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                m[(r, c)] = self.amplitudes[r * cols + c];
            }
        }
        Ok(m)
    }

    /// Projector `|xi><xi|` as a density operator.
    pub fn projector(&self) -> DensityOperator {
        let d = self.shape.total_dim();
        let mut m = DMatrix::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                m[(i, j)] = self.amplitudes[i] * self.amplitudes[j].conj();
            }
        }
        DensityOperator {
            shape: self.shape.clone(),
            matrix: m,
        }
    }

    /// Applies a unitary acting on the last slot only.
    pub fn apply_last_slot(&self, u: &DMatrix<Complex64>) -> Result<PureState> {
        let n_last = self.shape.last_dim();
        if u.nrows() != n_last || u.ncols() != n_last {
            return Err(Error::Shape(format!(
                "operator is {}x{}, last slot has dimension {n_last}",
                u.nrows(),
                u.ncols()
            )));
        }
        let m = self.shape.leading_product();
        let mut out = DVector::zeros(self.shape.total_dim());
        for r in 0..m {
            for i in 0..n_last {
                let mut acc = Complex64::new(0.0, 0.0);
                for j in 0..n_last {
                    acc += u[(i, j)] * self.amplitudes[r * n_last + j];
                }
                out[r * n_last + i] = acc;
            }
        }
        Ok(PureState {
            shape: self.shape.clone(),
            amplitudes: out,
        })
    }

    /// Applies one unitary per slot.
    pub fn apply_local(&self, locals: &[DMatrix<Complex64>]) -> Result<PureState> {
        if locals.len() != self.shape.num_slots() {
            return Err(Error::Shape(format!(
                "{} local operators for {} slots",
                locals.len(),
                self.shape.num_slots()
            )));
        }
        let dims = self.shape.dims().to_vec();
        let total = self.shape.total_dim();
        let mut data: Vec<Complex64> = self.amplitudes.iter().copied().collect();
        // Contract slot k: with strides, index = pre * dims[k] * post_stride ...
        for (k, u) in locals.iter().enumerate() {
            let n = dims[k];
            if u.nrows() != n || u.ncols() != n {
                return Err(Error::Shape(format!(
                    "local operator {k} is {}x{}, slot dimension is {n}",
                    u.nrows(),
                    u.ncols()
                )));
            }
            let post: usize = dims[k + 1..].iter().product();
            let pre = total / (n * post);
            let mut next = vec![Complex64::new(0.0, 0.0); total];
            for p in 0..pre {
                for q in 0..post {
                    for i in 0..n {
                        let mut acc = Complex64::new(0.0, 0.0);
                        for j in 0..n {
                            acc += u[(i, j)] * data[(p * n + j) * post + q];
                        }
                        next[(p * n + i) * post + q] = acc;
                    }
                }
            }
            data = next;
        }
        Ok(PureState {
            shape: self.shape.clone(),
            amplitudes: DVector::from_vec(data),
        })
    }

    /// Reorders the tensor slots by `perm`, where slot `k` of the result is
    /// slot `perm[k]` of `self`.
    pub fn permute_slots(&self, perm: &[usize]) -> Result<PureState> {
        let n = self.shape.num_slots();
        if perm.len() != n {
            return Err(Error::Shape("permutation length mismatch".into()));
        }
        let mut seen = vec![false; n];
        for &p in perm {
            if p >= n || seen[p] {
                return Err(Error::Shape("invalid slot permutation".into()));
            }
            seen[p] = true;
        }
        let new_dims: Vec<usize> = perm.iter().map(|&p| self.shape.dims()[p]).collect();
        let new_shape = SpaceShape::new(new_dims)?;
        let mut out = DVector::zeros(self.shape.total_dim());
        for flat in 0..self.shape.total_dim() {
            let multi = self.shape.unflatten_index(flat).unwrap();
            let new_multi: Vec<usize> = perm.iter().map(|&p| multi[p]).collect();
            let new_flat = new_shape.flatten_index(&new_multi).unwrap();
            out[new_flat] = self.amplitudes[flat];
        }
        Ok(PureState {
            shape: new_shape,
            amplitudes: out,
        })
    }
}

/// One unit factor per tensor slot; represents a decomposable vector
/// `xi_1 (x) ... (x) xi_N` up to per-factor phases.
#[derive(Debug, Clone)]
pub struct ProductVector {
    factors: Vec<DVector<Complex64>>,
}

impl ProductVector {
    pub fn new(factors: Vec<DVector<Complex64>>) -> Result<Self> {
        if factors.len() < 2 {
            return Err(Error::Shape("need at least 2 factors".into()));
        }
        for (k, f) in factors.iter().enumerate() {
            let norm = f.norm();
            if (norm - 1.0).abs() > CONSTRUCT_TOL {
                return Err(Error::Invariant(format!(
                    "factor {k} has norm {norm}, expected 1"
                )));
            }
        }
        Ok(Self { factors })
    }

    /// Normalizes each factor; rejects zero factors.
    pub fn normalized(factors: Vec<DVector<Complex64>>) -> Result<Self> {
        let mut out = Vec::with_capacity(factors.len());
        for f in factors {
            let norm = f.norm();
            if norm < 1e-300 {
                return Err(Error::Invariant("zero factor in product vector".into()));
            }
            out.push(f / Complex64::new(norm, 0.0));
        }
        Self::new(out)
    }

    pub fn factors(&self) -> &[DVector<Complex64>] {
        &self.factors
    }

    pub fn shape(&self) -> Result<SpaceShape> {
        SpaceShape::new(self.factors.iter().map(|f| f.len()).collect())
    }

    /// Dense expansion: amplitude at `(i_1, ..., i_N)` is the product of the
    /// factor entries. The result is a unit vector (cross-norm of unit factors).
    pub fn expand(&self, shape: &SpaceShape) -> Result<PureState> {
        let dims = shape.dims();
        if dims.len() != self.factors.len()
            || self
                .factors
                .iter()
                .zip(dims)
                .any(|(f, &d)| f.len() != d)
        {
            return Err(Error::Shape(format!(
                "factor lengths {:?} do not match shape {shape}",
                self.factors.iter().map(|f| f.len()).collect::<Vec<_>>()
            )));
        }
        let total = shape.total_dim();
        let mut amps = vec![Complex64::new(1.0, 0.0); 1];
        for f in &self.factors {
            let mut next = Vec::with_capacity(amps.len() * f.len());
            for a in &amps {
                for x in f.iter() {
                    next.push(a * x);
                }
            }
            amps = next;
        }
        debug_assert_eq!(amps.len(), total);
        PureState::new_with_tol(shape.clone(), amps, LOAD_TOL)
    }

    /// `|<self, other>| = prod_k |<a_k, b_k>|`, the phase-stable overlap.
    pub fn abs_overlap(&self, other: &ProductVector) -> f64 {
        self.factors
            .iter()
            .zip(&other.factors)
            .map(|(a, b)| inner(a, b).norm())
            .product()
    }
}

/// Convenience: expand against the shape implied by the factor lengths.
pub fn expand_product(p: &ProductVector) -> Result<PureState> {
    let shape = p.shape()?;
    p.expand(&shape)
}

/// A positive unit-trace operator on the full tensor product space.
#[derive(Debug, Clone)]
pub struct DensityOperator {
    shape: SpaceShape,
    matrix: DMatrix<Complex64>,
}

impl DensityOperator {
    pub fn new_with_tol(shape: SpaceShape, matrix: DMatrix<Complex64>, tol: f64) -> Result<Self> {
        let d = shape.total_dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::Shape(format!(
                "matrix is {}x{}, expected {d}x{d} for {shape}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let mut herm_dev: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                herm_dev = herm_dev.max((matrix[(i, j)] - matrix[(j, i)].conj()).norm());
            }
        }
        if herm_dev > tol {
            return Err(Error::Invariant(format!(
                "density matrix deviates from Hermitian by {herm_dev}"
            )));
        }
        let trace: Complex64 = (0..d).map(|i| matrix[(i, i)]).sum();
        if (trace.re - 1.0).abs() > tol || trace.im.abs() > tol {
            return Err(Error::Invariant(format!(
                "density matrix trace {trace} deviates from 1"
            )));
        }
        let min_eig = crate::linalg::eigh(&matrix)
            .0
            .last()
            .copied()
            .unwrap_or(0.0);
        if min_eig < -1e-8 {
            return Err(Error::Invariant(format!(
                "density matrix has negative eigenvalue {min_eig}"
            )));
        }
        Ok(Self { shape, matrix })
    }

    pub fn new(shape: SpaceShape, matrix: DMatrix<Complex64>) -> Result<Self> {
        Self::new_with_tol(shape, matrix, CONSTRUCT_TOL)
    }

    /// Convex mixture `sum_k w_k |psi_k><psi_k|`.
    pub fn mixture(weights: &[f64], states: &[PureState]) -> Result<Self> {
        if weights.len() != states.len() || states.is_empty() {
            return Err(Error::Shape("mixture needs matching weights and states".into()));
        }
        let shape = states[0].shape().clone();
        let d = shape.total_dim();
        let mut m = DMatrix::zeros(d, d);
        let total_w: f64 = weights.iter().sum();
        for (w, s) in weights.iter().zip(states) {
            if *w < 0.0 {
                return Err(Error::Invariant("mixture weights must be nonnegative".into()));
            }
            if s.shape() != &shape {
                return Err(Error::Shape("mixture states live on different shapes".into()));
            }
            let a = s.amplitudes();
            for i in 0..d {
                for j in 0..d {
                    m[(i, j)] += Complex64::new(w / total_w, 0.0) * a[i] * a[j].conj();
                }
            }
        }
        Self::new(shape, m)
    }

    pub fn shape(&self) -> &SpaceShape {
        &self.shape
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    /// Expectation value `<xi| rho |xi>` (real for Hermitian rho).
    pub fn expectation(&self, xi: &PureState) -> f64 {
        let v = xi.amplitudes();
        let mv = &self.matrix * v;
        inner(&mv, v).re
    }

    /// Reduced operator over slots `1..N-1`, tracing out the last slot.
    pub fn partial_trace_last(&self) -> Result<DensityOperator> {
        let m = self.shape.leading_product();
        let n_last = self.shape.last_dim();
        let mut reduced = DMatrix::zeros(m, m);
        for r in 0..m {
            for rp in 0..m {
                let mut acc = Complex64::new(0.0, 0.0);
                for j in 0..n_last {
                    acc += self.matrix[(r * n_last + j, rp * n_last + j)];
                }
                reduced[(r, rp)] = acc;
            }
        }
        let reduced_shape = if self.shape.num_slots() > 2 {
            SpaceShape::new(self.shape.dims()[..self.shape.num_slots() - 1].to_vec())?
        } else {
            // A single remaining slot is not a tensor product; keep a (m, 1)
            // shape so downstream code sees a valid SpaceShape.
            SpaceShape::new(vec![m, 1])?
        };
        DensityOperator::new_with_tol(reduced_shape, reduced, LOAD_TOL)
    }

    /// Trace distance induced norm: `||rho||_1 = sum |eigenvalues|`.
    pub fn trace_norm_of_difference(&self, other: &DensityOperator) -> f64 {
        let diff = &self.matrix - &other.matrix;
        crate::linalg::eigh(&diff).0.iter().map(|l| l.abs()).sum()
    }
}

/// A Hermitian test operator on the full space.
#[derive(Debug, Clone)]
pub struct HermitianOperator {
    shape: SpaceShape,
    matrix: DMatrix<Complex64>,
}

impl HermitianOperator {
    pub fn new(shape: SpaceShape, matrix: DMatrix<Complex64>) -> Result<Self> {
        let d = shape.total_dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::Shape(format!(
                "matrix is {}x{}, expected {d}x{d} for {shape}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let mut dev: f64 = 0.0;
        for i in 0..d {
            for j in 0..=i {
                dev = dev.max((matrix[(i, j)] - matrix[(j, i)].conj()).norm());
            }
        }
        if dev > CONSTRUCT_TOL {
            return Err(Error::Invariant(format!(
                "operator deviates from Hermitian by {dev}"
            )));
        }
        Ok(Self { shape, matrix })
    }

    pub fn identity(shape: SpaceShape) -> Self {
        let d = shape.total_dim();
        Self {
            shape,
            matrix: DMatrix::identity(d, d),
        }
    }

    pub fn shape(&self) -> &SpaceShape {
        &self.shape
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }
}

/// Deterministic generator underlying all seeded sampling in this crate.
pub fn seeded_rng(seed: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed)
}

pub(crate) fn complex_gaussian_vec<R: Rng>(n: usize, rng: &mut R) -> DVector<Complex64> {
    DVector::from_fn(n, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im)
    })
}

/// A state drawn from the unitarily invariant distribution: independent
/// standard complex Gaussian amplitudes, normalized. Deterministic per seed.
pub fn random_state(shape: &SpaceShape, seed: u64) -> PureState {
    let mut rng = seeded_rng(seed);
    loop {
        let v = complex_gaussian_vec(shape.total_dim(), &mut rng);
        if v.norm() > 1e-12 {
            let data: Vec<Complex64> = v.iter().copied().collect();
            return PureState::normalized(shape.clone(), data).unwrap();
        }
    }
}

/// A product vector with each factor drawn as in [`random_state`].
pub fn random_product(shape: &SpaceShape, seed: u64) -> ProductVector {
    let mut rng = seeded_rng(seed);
    loop {
        let factors: Vec<DVector<Complex64>> = shape
            .dims()
            .iter()
            .map(|&d| complex_gaussian_vec(d, &mut rng))
            .collect();
        if factors.iter().all(|f| f.norm() > 1e-12) {
            return ProductVector::normalized(factors).unwrap();
        }
    }
}

/// Haar-distributed `n x n` unitary, deterministic per generator state.
pub fn random_unitary<R: Rng>(n: usize, rng: &mut R) -> DMatrix<Complex64> {
    let g = DMatrix::from_fn(n, n, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im)
    });
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    // Fix column phases so the distribution is Haar rather than QR-skewed.
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / Complex64::new(d.norm(), 0.0)
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn basis(n: usize, i: usize) -> DVector<Complex64> {
        DVector::from_fn(n, |k, _| if k == i { c(1.0, 0.0) } else { c(0.0, 0.0) })
    }

    pub(crate) fn bell_state() -> PureState {
        let shape = SpaceShape::new(vec![2, 2]).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        PureState::new(
            shape,
            vec![c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)],
        )
        .unwrap()
    }

    #[test]
    fn expand_basis_product() {
        let p = ProductVector::new(vec![basis(2, 0), basis(2, 0)]).unwrap();
        let s = expand_product(&p).unwrap();
        assert_eq!(s.amplitudes()[0], c(1.0, 0.0));
        assert_eq!(s.amplitudes()[1], c(0.0, 0.0));
        assert_eq!(s.amplitudes()[2], c(0.0, 0.0));
        assert_eq!(s.amplitudes()[3], c(0.0, 0.0));
    }

    #[test]
    fn expand_superposed_factor() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let f0 = DVector::from_vec(vec![c(s, 0.0), c(0.0, s)]);
        let p = ProductVector::new(vec![f0, basis(2, 1)]).unwrap();
        let st = expand_product(&p).unwrap();
        assert_abs_diff_eq!(st.amplitudes()[0].norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(st.amplitudes()[1].re, s, epsilon = 1e-15);
        assert_abs_diff_eq!(st.amplitudes()[2].norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(st.amplitudes()[3].im, s, epsilon = 1e-15);
        assert_abs_diff_eq!(st.amplitudes().norm(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn expand_shape_mismatch() {
        let p = ProductVector::new(vec![basis(2, 0), basis(3, 0)]).unwrap();
        let wrong = SpaceShape::new(vec![2, 2]).unwrap();
        assert!(p.expand(&wrong).is_err());
    }

    #[test]
    fn matricize_bell() {
        let bell = bell_state();
        let m = bell.matricize(1).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!(m[(0, 0)].re, s, epsilon = 1e-15);
        assert_abs_diff_eq!(m[(1, 1)].re, s, epsilon = 1e-15);
        assert_abs_diff_eq!(m[(0, 1)].norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(m[(1, 0)].norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(m.norm(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn matricize_ghz_split2() {
        let shape = SpaceShape::new(vec![2, 2, 2]).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut amps = vec![c(0.0, 0.0); 8];
        amps[0] = c(s, 0.0);
        amps[7] = c(s, 0.0);
        let ghz = PureState::new(shape, amps).unwrap();
        let m = ghz.matricize(2).unwrap();
        assert_eq!((m.nrows(), m.ncols()), (4, 2));
        assert_abs_diff_eq!(m[(0, 0)].re, s, epsilon = 1e-15);
        assert_abs_diff_eq!(m[(3, 1)].re, s, epsilon = 1e-15);
    }

    #[test]
    fn matricize_product_is_rank_one() {
        let p = ProductVector::new(vec![basis(2, 1), basis(2, 0)]).unwrap();
        let s = expand_product(&p).unwrap();
        let m = s.matricize(1).unwrap();
        let svals = crate::linalg::svd(&m).1;
        assert_abs_diff_eq!(svals[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(svals[1], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn matricize_split_out_of_range() {
        let bell = bell_state();
        assert!(bell.matricize(0).is_err());
        assert!(bell.matricize(2).is_err());
    }

    #[test]
    fn partial_trace_product_state() {
        let p = ProductVector::new(vec![basis(2, 0), basis(2, 0)]).unwrap();
        let rho = expand_product(&p).unwrap().projector();
        let red = rho.partial_trace_last().unwrap();
        assert_abs_diff_eq!(red.matrix()[(0, 0)].re, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(red.matrix()[(1, 1)].norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn partial_trace_bell_is_maximally_mixed() {
        let rho = bell_state().projector();
        let red = rho.partial_trace_last().unwrap();
        assert_abs_diff_eq!(red.matrix()[(0, 0)].re, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(red.matrix()[(1, 1)].re, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(red.matrix()[(0, 1)].norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn random_state_deterministic_and_normalized() {
        let shape = SpaceShape::new(vec![3, 4]).unwrap();
        let a = random_state(&shape, 42);
        let b = random_state(&shape, 42);
        assert_eq!(a.amplitudes(), b.amplitudes());
        assert_abs_diff_eq!(a.amplitudes().norm(), 1.0, epsilon = 1e-12);
        let c_state = random_state(&shape, 43);
        assert!((a.overlap(&c_state)).norm() < 0.999);
    }

    #[test]
    fn random_amplitude_statistics() {
        // Law of large numbers: mean |amplitude|^2 at a fixed index over many
        // draws approaches 1/total_dim.
        let shape = SpaceShape::new(vec![2, 3]).unwrap();
        let draws = 10_000;
        let mut acc = 0.0;
        for seed in 0..draws {
            let s = random_state(&shape, 900_000 + seed);
            acc += s.amplitudes()[2].norm_sqr();
        }
        let mean = acc / draws as f64;
        let expect = 1.0 / shape.total_dim() as f64;
        assert!(
            (mean - expect).abs() < 0.05 * expect,
            "mean {mean} vs {expect}"
        );
    }

    #[test]
    fn random_unitary_is_unitary() {
        let mut rng = seeded_rng(7);
        let u = random_unitary(5, &mut rng);
        let eye = DMatrix::<Complex64>::identity(5, 5);
        assert!((u.adjoint() * &u - eye).norm() < 1e-10);
    }

    #[test]
    fn permute_slots_roundtrip() {
        let shape = SpaceShape::new(vec![2, 3, 4]).unwrap();
        let s = random_state(&shape, 5);
        let p = s.permute_slots(&[2, 0, 1]).unwrap();
        assert_eq!(p.shape().dims(), &[4, 2, 3]);
        let back = p.permute_slots(&[1, 2, 0]).unwrap();
        assert_eq!(back.shape().dims(), shape.dims());
        assert!((back.overlap(&s).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mixture_builds_valid_density() {
        let shape = SpaceShape::new(vec![2, 2]).unwrap();
        let a = random_state(&shape, 1);
        let b = random_state(&shape, 2);
        let rho = DensityOperator::mixture(&[0.25, 0.75], &[a, b]).unwrap();
        let tr: Complex64 = (0..4).map(|i| rho.matrix()[(i, i)]).sum();
        assert_abs_diff_eq!(tr.re, 1.0, epsilon = 1e-12);
    }
}
