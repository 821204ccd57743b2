//! The injective norm: the largest overlap a state has with any decomposable
//! unit vector, bracketed by alternating maximization from below and grouped
//! spectral bounds from above. Bipartite inputs are exact via the singular
//! value decomposition.

use crate::bracket::{BracketCertificate, NormBracket, SolverOptions};
use crate::error::{Error, Result};
use crate::linalg::{sigma_max, svd};
use crate::space::SpaceShape;
use crate::state::{random_product, ProductVector, PureState};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// Contracts all slots of `amps` except `free`, each against the conjugate of
/// its factor. The result is the vector whose normalization is the optimal
/// free factor.
fn contract_fixed_slots(
    amps: &DVector<Complex64>,
    dims: &[usize],
    factors: &[DVector<Complex64>],
    free: usize,
) -> DVector<Complex64> {
    let mut data: Vec<Complex64> = amps.iter().copied().collect();
    let mut live: Vec<usize> = (0..dims.len()).collect();
    while live.len() > 1 {
        // Contract the first live slot that is not the free one.
        let pos = if live[0] == free { 1 } else { 0 };
        let slot = live[pos];
        let n = dims[slot];
        let post: usize = live[pos + 1..].iter().map(|&s| dims[s]).product();
        let pre: usize = data.len() / (n * post);
        let f = &factors[slot];
        let mut next = vec![Complex64::new(0.0, 0.0); pre * post];
        for p in 0..pre {
            for i in 0..n {
                let fi = f[i].conj();
                if fi.norm_sqr() == 0.0 {
                    continue;
                }
                let base = (p * n + i) * post;
                let out = p * post;
                for q in 0..post {
                    next[out + q] += data[base + q] * fi;
                }
            }
        }
        data = next;
        live.remove(pos);
    }
    DVector::from_vec(data)
}

/// One alternating-maximization run from a given starting product.
///
/// Each update replaces a factor by the normalized contraction of the state
/// against the others, which maximizes the overlap with that factor free.
/// Returns the attained overlap, the product, and sweeps used.
fn alternating_max(
    xi: &PureState,
    start: ProductVector,
    opts: &SolverOptions,
) -> (f64, ProductVector, usize) {
    let dims = xi.shape().dims().to_vec();
    let n_slots = dims.len();
    let mut factors: Vec<DVector<Complex64>> = start.factors().to_vec();
    let mut value = 0.0f64;
    let mut sweeps = 0;
    for sweep in 0..opts.max_iterations {
        sweeps = sweep + 1;
        let mut sweep_value = value;
        for k in 0..n_slots {
            let c = contract_fixed_slots(xi.amplitudes(), &dims, &factors, k);
            let norm = c.norm();
            if norm > 1e-300 {
                factors[k] = c / Complex64::new(norm, 0.0);
                sweep_value = norm;
            }
        }
        if sweep_value - value < opts.tolerance {
            value = sweep_value;
            break;
        }
        value = sweep_value;
    }
    let product = ProductVector::new(factors).expect("factors stay unit norm");
    (value, product, sweeps)
}

/// Best overlap over `opts.restarts` seeded alternating-maximization runs.
/// Ties keep the first attained result.
fn multi_start_lower(
    xi: &PureState,
    opts: &SolverOptions,
) -> (f64, ProductVector, usize, usize) {
    let mut best_value = f64::NEG_INFINITY;
    let mut best_product = None;
    let mut total_iters = 0;
    for r in 0..opts.restarts {
        let start = random_product(xi.shape(), opts.derived_seed(r as u64));
        let (value, product, iters) = alternating_max(xi, start, opts);
        total_iters += iters;
        if value > best_value {
            best_value = value;
            best_product = Some(product);
        }
    }
    (
        best_value.max(0.0),
        best_product.expect("at least one restart"),
        total_iters,
        opts.restarts,
    )
}

/// Largest singular values of every contiguous matricization, with the split
/// achieving the minimum. Any grouped split dominates the fine-partition
/// supremum, so the minimum is a certified upper bound.
fn split_upper(xi: &PureState) -> Result<(f64, usize)> {
    let n_slots = xi.shape().num_slots();
    let mut best = f64::INFINITY;
    let mut best_split = 1;
    for k in 1..n_slots {
        let m = xi.matricize(k)?;
        let s = sigma_max(&m);
        if s < best {
            best = s;
            best_split = k;
        }
    }
    Ok((best.min(1.0), best_split))
}

/// Certified bracket for the injective norm of `xi`.
///
/// Bipartite states are exact (both endpoints the top singular value).
/// For three or more slots the lower endpoint is the best alternating
/// maximization value and the upper endpoint the best grouped split bound.
pub fn injective_norm(xi: &PureState, opts: &SolverOptions) -> Result<NormBracket> {
    opts.validate()?;
    if xi.shape().num_slots() == 2 {
        let m = xi.matricize(1)?;
        let (u, s, vh) = svd(&m);
        let value = s[0];
        let mut bracket = NormBracket::exact(value, "top singular value of the (1|2) split");
        bracket.lower_certificate = Some(BracketCertificate::Product(top_singular_product(
            &u, &vh,
        )?));
        return Ok(bracket);
    }
    let (lower, product, iterations, restarts_used) = multi_start_lower(xi, opts);
    let (upper, split) = split_upper(xi)?;
    let mut bracket = NormBracket::new(lower.min(upper + 1e-12), upper)?;
    bracket.lower = lower;
    bracket.upper = upper.max(lower - 1e-12);
    bracket.lower_certificate = Some(BracketCertificate::Product(product));
    bracket.upper_certificate = format!(
        "minimum over grouped splits of the top singular value, attained at split {split}"
    );
    bracket.iterations = iterations;
    bracket.restarts_used = restarts_used;
    Ok(bracket)
}

fn top_singular_product(
    u: &DMatrix<Complex64>,
    vh: &DMatrix<Complex64>,
) -> Result<ProductVector> {
    let a: DVector<Complex64> = u.column(0).into_owned();
    // Row 0 of vh holds conj(v1); the optimal right factor is conj(v1) itself.
    let b: DVector<Complex64> = DVector::from_fn(vh.ncols(), |j, _| vh[(0, j)]);
    ProductVector::normalized(vec![a, b])
}

/// The decomposable unit vector achieving the lower endpoint of
/// [`injective_norm`], together with that overlap.
pub fn nearest_product(xi: &PureState, opts: &SolverOptions) -> Result<(ProductVector, f64)> {
    let bracket = injective_norm(xi, opts)?;
    match bracket.lower_certificate {
        Some(BracketCertificate::Product(p)) => Ok((p, bracket.lower)),
        _ => Err(Error::Invariant(
            "injective bracket carried no product certificate".into(),
        )),
    }
}

/// Distance from `xi` to the decomposable unit vectors,
/// `d(xi)^2 = 2 - 2 ||xi||_V`, bracketed by mapping the injective bracket.
pub fn distance_to_v(xi: &PureState, opts: &SolverOptions) -> Result<NormBracket> {
    let inj = injective_norm(xi, opts)?;
    let mut d = inj.map_decreasing(
        |t| (2.0 - 2.0 * t).max(0.0).sqrt(),
        "monotone image of the injective bracket",
    );
    d.iterations = inj.iterations;
    d.restarts_used = inj.restarts_used;
    Ok(d)
}

// ---------------------------------------------------------------------------
// Certified grid bound for tripartite shapes with a qubit slot
// ---------------------------------------------------------------------------

/// Covering slack per unit of ring spacing for the latitude/longitude grid
/// below: any Bloch state is within `0.75 * h` (chordal norm) of a grid state.
const GRID_COVER_FACTOR: f64 = 0.75;

fn bloch_state(theta: f64, phi: f64) -> [Complex64; 2] {
    [
        Complex64::new((theta / 2.0).cos(), 0.0),
        Complex64::from_polar((theta / 2.0).sin(), phi),
    ]
}

fn sigma_max_small(m: &DMatrix<Complex64>) -> f64 {
    // With a side of length <= 2 the Gram matrix is at most 2x2 and its top
    // eigenvalue has a closed form.
    if m.nrows().min(m.ncols()) <= 2 {
        let (r, c) = (m.nrows(), m.ncols());
        let thin = r <= c;
        let dim = if thin { r } else { c };
        if dim == 1 {
            return m.norm();
        }
        let mut g00 = 0.0f64;
        let mut g11 = 0.0f64;
        let mut g01 = Complex64::new(0.0, 0.0);
        let len = if thin { c } else { r };
        for t in 0..len {
            let (x, y) = if thin {
                (m[(0, t)], m[(1, t)])
            } else {
                (m[(t, 0)], m[(t, 1)])
            };
            g00 += x.norm_sqr();
            g11 += y.norm_sqr();
            g01 += x * y.conj();
        }
        let tr = g00 + g11;
        let disc = ((g00 - g11) * (g00 - g11) + 4.0 * g01.norm_sqr())
            .max(0.0)
            .sqrt();
        return ((tr + disc) / 2.0).max(0.0).sqrt();
    }
    sigma_max(m)
}

/// Certified upper bound on the injective norm of a tripartite state with at
/// least one two-dimensional slot.
///
/// Fixing a unit vector in the qubit slot leaves a bipartite problem solved
/// exactly by the top singular value of the contraction; that value is
/// 1-Lipschitz in the fixed vector, so sweeping a Bloch grid of ring spacing
/// `resolution` and adding the covering slack certifies the supremum.
/// Returns `None` for shapes the method does not cover.
pub fn certified_tripartite_upper(xi: &PureState, resolution: f64) -> Option<f64> {
    let dims = xi.shape().dims();
    if dims.len() != 3 {
        return None;
    }
    let slot = dims.iter().position(|&d| d == 2)?;
    let view = if slot == 0 {
        xi.clone()
    } else {
        let mut perm = vec![slot];
        perm.extend((0..3).filter(|&k| k != slot));
        xi.permute_slots(&perm).ok()?
    };
    let (a, b) = (view.shape().dims()[1], view.shape().dims()[2]);
    let amps = view.amplitudes();
    let block = a * b;
    let slice = |i: usize| -> DMatrix<Complex64> {
        DMatrix::from_fn(a, b, |r, c| amps[i * block + r * b + c])
    };
    let (a0, a1) = (slice(0), slice(1));

    let h = resolution;
    let mut best: f64 = 0.0;
    let rings = (std::f64::consts::PI / h).ceil() as usize;
    let mut m = DMatrix::zeros(a, b);
    for i in 0..rings {
        let theta = (i as f64 + 0.5) * h;
        let theta_top = ((i as f64 + 1.0) * h).min(std::f64::consts::PI);
        let s_i = (theta_top / 2.0).sin().max(1e-9);
        let count = ((2.0 * std::f64::consts::PI * s_i) / h).ceil() as usize;
        for j in 0..count {
            let phi = (j as f64 + 0.5) * 2.0 * std::f64::consts::PI / count as f64;
            let p = bloch_state(theta, phi);
            let (c0, c1) = (p[0].conj(), p[1].conj());
            for r in 0..a {
                for c in 0..b {
                    m[(r, c)] = c0 * a0[(r, c)] + c1 * a1[(r, c)];
                }
            }
            let s = sigma_max_small(&m);
            if s > best {
                best = s;
            }
        }
    }
    Some((best + GRID_COVER_FACTOR * h).min(1.0))
}

// ---------------------------------------------------------------------------
// Operator injective norm
// ---------------------------------------------------------------------------

fn expand_factors(factors: &[DVector<Complex64>]) -> DVector<Complex64> {
    let mut amps = vec![Complex64::new(1.0, 0.0)];
    for f in factors {
        let mut next = Vec::with_capacity(amps.len() * f.len());
        for a in &amps {
            for x in f.iter() {
                next.push(a * x);
            }
        }
        amps = next;
    }
    DVector::from_vec(amps)
}

/// Rearranges `x` across the split after slot `k`: row block indices pair
/// with column block indices, so the top singular value of the result bounds
/// every product-across-the-split matrix element of `x`.
fn realign(x: &DMatrix<Complex64>, shape: &SpaceShape, split: usize) -> Result<DMatrix<Complex64>> {
    let (d_a, d_b) = shape.split_dims(split)?;
    let mut m = DMatrix::zeros(d_a * d_a, d_b * d_b);
    for ra in 0..d_a {
        for rb in 0..d_b {
            for ca in 0..d_a {
                for cb in 0..d_b {
                    m[(ra * d_a + ca, rb * d_b + cb)] = x[(ra * d_b + rb, ca * d_b + cb)];
                }
            }
        }
    }
    Ok(m)
}

/// Certified bracket for the operator norm over decomposable vectors,
/// `sup { |<X xi, eta>| : xi, eta decomposable units }`.
///
/// The lower endpoint is alternating maximization over the `2N` factor
/// vectors; the upper endpoint is the smaller of the operator norm and the
/// split realignment bounds.
pub fn operator_injective_norm(
    x: &DMatrix<Complex64>,
    shape: &SpaceShape,
    opts: &SolverOptions,
) -> Result<NormBracket> {
    opts.validate()?;
    let d = shape.total_dim();
    if x.nrows() != d || x.ncols() != d {
        return Err(Error::Shape(format!(
            "operator is {}x{}, expected {d}x{d} for {shape}",
            x.nrows(),
            x.ncols()
        )));
    }
    let dims = shape.dims().to_vec();
    let n_slots = dims.len();

    let mut best = 0.0f64;
    let mut total_iters = 0;
    for r in 0..opts.restarts {
        let seed = opts.derived_seed(r as u64);
        let ket_start = random_product(shape, seed);
        let bra_start = random_product(shape, seed ^ 0x5555_5555_5555_5555);
        let mut ket: Vec<DVector<Complex64>> = ket_start.factors().to_vec();
        let mut bra: Vec<DVector<Complex64>> = bra_start.factors().to_vec();
        let mut value = 0.0f64;
        for sweep in 0..opts.max_iterations {
            total_iters += 1;
            let mut sweep_value = value;
            // Ket side: F = sum_c z[c] * prod_j ket_j[c_j] with z = conj(X^H bra).
            let bra_exp = expand_factors(&bra);
            let z_vec: DVector<Complex64> = (x.adjoint() * &bra_exp).map(|v| v.conj());
            for k in 0..n_slots {
                let e = contract_linear(&z_vec, &dims, &ket, k);
                let norm = e.norm();
                if norm > 1e-300 {
                    ket[k] = e.map(|v| v.conj()) / Complex64::new(norm, 0.0);
                    sweep_value = norm;
                }
            }
            // Bra side: F = sum_r w[r] * prod_j conj(bra_j[r_j]) with w = X ket.
            let ket_exp = expand_factors(&ket);
            let w_vec: DVector<Complex64> = x * &ket_exp;
            for k in 0..n_slots {
                let d_vec = contract_fixed_slots(&w_vec, &dims, &bra, k);
                let norm = d_vec.norm();
                if norm > 1e-300 {
                    bra[k] = d_vec / Complex64::new(norm, 0.0);
                    sweep_value = norm;
                }
            }
            if sweep_value - value < opts.tolerance {
                value = sweep_value;
                break;
            }
            value = sweep_value;
        }
        if value > best {
            best = value;
        }
    }

    let mut upper = sigma_max(x);
    let mut upper_desc = "operator norm".to_string();
    for k in 1..n_slots {
        let m = realign(x, shape, k)?;
        let s = sigma_max(&m);
        if s < upper {
            upper = s;
            upper_desc = format!("realignment bound at split {k}");
        }
    }

    let mut bracket = NormBracket::new(best.min(upper + 1e-12), upper.max(best - 1e-12))?;
    bracket.lower = best;
    bracket.upper = upper.max(best - 1e-12);
    bracket.upper_certificate = upper_desc;
    bracket.iterations = total_iters;
    bracket.restarts_used = opts.restarts;
    Ok(bracket)
}

// Linear-contraction twin of `contract_fixed_slots`: no conjugation on the
// fixed factors.
fn contract_linear(
    kernel: &DVector<Complex64>,
    dims: &[usize],
    factors: &[DVector<Complex64>],
    free: usize,
) -> DVector<Complex64> {
    let mut data: Vec<Complex64> = kernel.iter().copied().collect();
    let mut live: Vec<usize> = (0..dims.len()).collect();
    while live.len() > 1 {
        let pos = if live[0] == free { 1 } else { 0 };
        let slot = live[pos];
        let n = dims[slot];
        let post: usize = live[pos + 1..].iter().map(|&s| dims[s]).product();
        let pre: usize = data.len() / (n * post);
        let f = &factors[slot];
        let mut next = vec![Complex64::new(0.0, 0.0); pre * post];
        for p in 0..pre {
            for i in 0..n {
                let fi = f[i];
                if fi.norm_sqr() == 0.0 {
                    continue;
                }
                let base = (p * n + i) * post;
                let out = p * post;
                for q in 0..post {
                    next[out + q] += data[base + q] * fi;
                }
            }
        }
        data = next;
        live.remove(pos);
    }
    DVector::from_vec(data)
}
