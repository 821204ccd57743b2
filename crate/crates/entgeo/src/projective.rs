//! The projective (greatest cross) norm: the cheapest l1 cost of writing a
//! vector as a combination of decomposable vectors. Bipartite inputs are the
//! singular value sum; beyond that the upper endpoint comes from explicit
//! decompositions (basis fiber expansions, recursive Schmidt splits, greedy
//! atom pursuit with joint least-squares refitting) and the lower endpoint
//! from dual vectors normalized by their certified injective upper bounds.

use crate::bracket::{
    BracketCertificate, DecompositionTerm, NormBracket, ProductDecomposition, SolverOptions,
};
use crate::error::{Error, Result};
use crate::injective;
use crate::linalg::{inner, svd};
use crate::space::SpaceShape;
use crate::state::{expand_product, random_state, ProductVector, PureState};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// Verdict of the convex-hull membership test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum HullVerdict {
    Inside,
    Outside,
    Undecided,
}

/// A-priori cap on the projective norm of a unit vector: the square root of
/// the product of all factor dimensions except the largest.
pub fn projective_cap(shape: &SpaceShape) -> f64 {
    (shape.sorted().leading_product() as f64).sqrt()
}

fn split_injective_upper(xi: &PureState) -> Result<f64> {
    let inj = injective::injective_norm(
        xi,
        &SolverOptions {
            restarts: 1,
            max_iterations: 1,
            tolerance: 1e-6,
            seed: 0,
        },
    )?;
    Ok(inj.upper)
}

/// Expands the state in the computational basis of every slot except `fiber`,
/// producing one product term per basis multi-index with the slot-`fiber`
/// fiber as its remaining factor. Cost is the sum of fiber norms.
fn fiber_decomposition(xi: &PureState, fiber: usize) -> Result<ProductDecomposition> {
    let dims = xi.shape().dims().to_vec();
    let shape = xi.shape();
    let mut terms = Vec::new();
    let outer_dims: Vec<usize> = dims
        .iter()
        .enumerate()
        .filter(|&(k, _)| k != fiber)
        .map(|(_, &d)| d)
        .collect();
    let outer_total: usize = outer_dims.iter().product();
    for outer_flat in 0..outer_total {
        // unflatten outer_flat across the non-fiber slots in slot order
        let mut rem = outer_flat;
        let mut outer_idx = vec![0usize; outer_dims.len()];
        for k in (0..outer_dims.len()).rev() {
            outer_idx[k] = rem % outer_dims[k];
            rem /= outer_dims[k];
        }
        let mut fiber_vec = DVector::zeros(dims[fiber]);
        for i in 0..dims[fiber] {
            let mut multi = Vec::with_capacity(dims.len());
            let mut o = 0;
            for k in 0..dims.len() {
                if k == fiber {
                    multi.push(i);
                } else {
                    multi.push(outer_idx[o]);
                    o += 1;
                }
            }
            fiber_vec[i] = xi.amplitudes()[shape.flatten_index(&multi)?];
        }
        let norm = fiber_vec.norm();
        if norm < 1e-15 {
            continue;
        }
        let mut factors = Vec::with_capacity(dims.len());
        let mut o = 0;
        for k in 0..dims.len() {
            if k == fiber {
                factors.push(fiber_vec.clone() / Complex64::new(norm, 0.0));
            } else {
                factors.push(DVector::from_fn(dims[k], |r, _| {
                    if r == outer_idx[o] {
                        Complex64::new(1.0, 0.0)
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                }));
                o += 1;
            }
        }
        let _ = {
            o = 0;
            o
        };
        terms.push(DecompositionTerm {
            coefficient: Complex64::new(norm, 0.0),
            product: ProductVector::new(factors)?,
        });
    }
    Ok(ProductDecomposition {
        terms,
        residual: 0.0,
    })
}

/// Fiber expansion of the state rotated into its per-slot singular bases.
/// The rotations are absorbed into the product factors, so the terms still
/// decompose the original state.
fn rotated_fiber_decomposition(xi: &PureState, fiber: usize) -> Result<ProductDecomposition> {
    let dims = xi.shape().dims().to_vec();
    let n = dims.len();
    // Per-slot singular basis: left factor of the slot-k unfolding.
    let mut rotations: Vec<DMatrix<Complex64>> = Vec::with_capacity(n);
    for k in 0..n {
        if k == fiber {
            rotations.push(DMatrix::identity(dims[k], dims[k]));
            continue;
        }
        let unfolded = unfold(xi, k)?;
        let (u, _, _) = svd(&unfolded);
        let mut full = DMatrix::identity(dims[k], dims[k]);
        for c in 0..u.ncols().min(dims[k]) {
            full.set_column(c, &u.column(c));
        }
        rotations.push(full);
    }
    let adjoints: Vec<DMatrix<Complex64>> = rotations.iter().map(|u| u.adjoint()).collect();
    let rotated = xi.apply_local(&adjoints)?;
    let base = fiber_decomposition(&rotated, fiber)?;
    // Undo the rotation inside each product factor.
    let mut terms = Vec::with_capacity(base.terms.len());
    for t in base.terms {
        let factors: Vec<DVector<Complex64>> = t
            .product
            .factors()
            .iter()
            .enumerate()
            .map(|(k, f)| &rotations[k] * f)
            .collect();
        terms.push(DecompositionTerm {
            coefficient: t.coefficient,
            product: ProductVector::normalized(factors)?,
        });
    }
    Ok(ProductDecomposition {
        terms,
        residual: 0.0,
    })
}

/// Mode-`k` unfolding: rows indexed by slot `k`, columns by the rest.
fn unfold(xi: &PureState, k: usize) -> Result<DMatrix<Complex64>> {
    let dims = xi.shape().dims();
    let n = dims.len();
    let mut perm = vec![k];
    perm.extend((0..n).filter(|&j| j != k));
    let permuted = xi.permute_slots(&perm)?;
    permuted.matricize(1)
}

/// Schmidt split at the last slot, with each left factor recursively
/// decomposed into products.
fn recursive_schmidt_decomposition(xi: &PureState) -> Result<ProductDecomposition> {
    let n = xi.shape().num_slots();
    if n == 2 {
        let m = xi.matricize(1)?;
        let (u, s, vh) = svd(&m);
        let mut terms = Vec::new();
        for (i, &si) in s.iter().enumerate() {
            if si < 1e-15 {
                continue;
            }
            let a: DVector<Complex64> = u.column(i).into_owned();
            let b: DVector<Complex64> = DVector::from_fn(vh.ncols(), |j, _| vh[(i, j)]);
            terms.push(DecompositionTerm {
                coefficient: Complex64::new(si, 0.0),
                product: ProductVector::normalized(vec![a, b])?,
            });
        }
        return Ok(ProductDecomposition {
            terms,
            residual: 0.0,
        });
    }
    let split = n - 1;
    let m = xi.matricize(split)?;
    let (u, s, vh) = svd(&m);
    let left_shape = SpaceShape::new(xi.shape().dims()[..split].to_vec());
    let mut terms = Vec::new();
    for (i, &si) in s.iter().enumerate() {
        if si < 1e-15 {
            continue;
        }
        let right: DVector<Complex64> = DVector::from_fn(vh.ncols(), |j, _| vh[(i, j)]);
        let left_amps: Vec<Complex64> = (0..u.nrows()).map(|r| u[(r, i)]).collect();
        match &left_shape {
            Ok(ls) => {
                let left_state = PureState::normalized(ls.clone(), left_amps)?;
                let inner_dec = recursive_schmidt_decomposition(&left_state)?;
                for t in inner_dec.terms {
                    let mut factors = t.product.factors().to_vec();
                    factors.push(right.clone());
                    terms.push(DecompositionTerm {
                        coefficient: Complex64::new(si, 0.0) * t.coefficient,
                        product: ProductVector::new(factors)?,
                    });
                }
            }
            Err(_) => {
                // split == 1: the left part is a single slot, already a factor
                let left = DVector::from_vec(left_amps);
                terms.push(DecompositionTerm {
                    coefficient: Complex64::new(si, 0.0),
                    product: ProductVector::normalized(vec![left, right.clone()])?,
                });
            }
        }
    }
    Ok(ProductDecomposition {
        terms,
        residual: 0.0,
    })
}

/// Joint least-squares refit of the coefficients over the current dictionary.
fn refit_coefficients(
    xi: &PureState,
    atoms: &[ProductVector],
) -> Result<(Vec<Complex64>, f64)> {
    let d = xi.shape().total_dim();
    let k = atoms.len();
    let mut a = DMatrix::zeros(d, k);
    for (j, atom) in atoms.iter().enumerate() {
        let col = expand_product(atom)?;
        a.set_column(j, col.amplitudes());
    }
    let svd = a.clone().svd(true, true);
    let coeffs = svd
        .solve(xi.amplitudes(), 1e-12)
        .map_err(|e| Error::Invariant(format!("least squares failed: {e}")))?;
    let residual = (xi.amplitudes() - a * &coeffs).norm();
    Ok((coeffs.iter().copied().collect(), residual))
}

fn decomposition_from(atoms: &[ProductVector], coeffs: &[Complex64], residual: f64) -> ProductDecomposition {
    let terms = atoms
        .iter()
        .zip(coeffs)
        .filter(|(_, c)| c.norm() > 1e-14)
        .map(|(p, c)| DecompositionTerm {
            coefficient: *c,
            product: p.clone(),
        })
        .collect();
    ProductDecomposition { terms, residual }
}

/// Sound upper bound certified by a decomposition: its cost plus the cap
/// applied to whatever residual remains.
fn certified_cost(dec: &ProductDecomposition, shape: &SpaceShape) -> f64 {
    dec.cost() + projective_cap(shape) * dec.residual
}

/// Greedy atom pursuit: start from the best constructive decomposition,
/// repeatedly add the nearest product of the residual and refit all
/// coefficients jointly.
fn pursue(
    xi: &PureState,
    seed_atoms: Vec<ProductVector>,
    opts: &SolverOptions,
) -> Result<ProductDecomposition> {
    let shape = xi.shape();
    let budget = 4 * shape.sorted().leading_product();
    let mut atoms = seed_atoms;
    atoms.truncate(budget);
    let inner_opts = SolverOptions {
        restarts: opts.restarts.clamp(4, 16),
        max_iterations: 200,
        tolerance: 1e-12,
        seed: opts.derived_seed(0xA70),
    };
    let (mut coeffs, mut residual) = refit_coefficients(xi, &atoms)?;
    let mut best = decomposition_from(&atoms, &coeffs, residual);
    let mut best_cost = certified_cost(&best, shape);
    while residual > 1e-10 && atoms.len() < budget {
        let res_vec = xi.amplitudes()
            - best
                .reconstruct(shape.total_dim())
                .unwrap_or_else(|_| DVector::zeros(shape.total_dim()));
        let res_norm = res_vec.norm();
        if res_norm < 1e-12 {
            break;
        }
        let res_state = PureState::normalized(
            shape.clone(),
            res_vec.iter().copied().collect(),
        )?;
        let (atom, _) = injective::nearest_product(&res_state, &inner_opts)?;
        atoms.push(atom);
        let (c2, r2) = refit_coefficients(xi, &atoms)?;
        if r2 > residual - 1e-14 && atoms.len() > 1 {
            // no progress; stop rather than loop on a stale dictionary
            atoms.pop();
            break;
        }
        coeffs = c2;
        residual = r2;
        let cand = decomposition_from(&atoms, &coeffs, residual);
        let cost = certified_cost(&cand, shape);
        if cost < best_cost || cand.residual < best.residual {
            best = cand;
            best_cost = cost;
        }
    }
    Ok(best)
}

/// Certified bracket for the projective norm of a unit vector.
pub fn projective_norm(xi: &PureState, opts: &SolverOptions) -> Result<NormBracket> {
    opts.validate()?;
    let shape = xi.shape();
    if shape.num_slots() == 2 {
        let m = xi.matricize(1)?;
        let s = svd(&m).1;
        let value: f64 = s.iter().sum();
        let mut bracket = NormBracket::exact(value, "singular value sum of the (1|2) split");
        bracket.lower_certificate = Some(BracketCertificate::Decomposition(
            recursive_schmidt_decomposition(xi)?,
        ));
        return Ok(bracket);
    }

    // Upper endpoint: best explicit decomposition.
    let mut candidates: Vec<ProductDecomposition> = Vec::new();
    for fiber in (0..shape.num_slots()).rev() {
        candidates.push(fiber_decomposition(xi, fiber)?);
        candidates.push(rotated_fiber_decomposition(xi, fiber)?);
    }
    candidates.push(recursive_schmidt_decomposition(xi)?);
    let seed_atoms: Vec<ProductVector> = candidates
        .iter()
        .min_by(|a, b| {
            certified_cost(a, shape)
                .partial_cmp(&certified_cost(b, shape))
                .unwrap()
        })
        .map(|d| d.terms.iter().map(|t| t.product.clone()).collect())
        .unwrap_or_default();
    candidates.push(pursue(xi, seed_atoms, opts)?);

    let (mut best_dec, mut upper) = (None, projective_cap(shape));
    let mut upper_desc = "dimension cap".to_string();
    for dec in candidates {
        let cost = certified_cost(&dec, shape);
        if cost < upper {
            upper = cost;
            best_dec = Some(dec);
            upper_desc = "explicit product decomposition cost".to_string();
        }
    }

    // Lower endpoint: dual vectors scored against certified injective uppers.
    // Everything is scored with the cheap split bounds first; only the single
    // best candidate pays for the grid certification where it applies.
    let mut duals: Vec<PureState> = vec![xi.clone()];
    for split in 1..shape.num_slots() {
        if let Ok(eta) = schmidt_dual(xi, split) {
            duals.push(eta);
        }
    }
    for r in 0..opts.restarts.min(16) {
        duals.push(random_state(shape, opts.derived_seed(0xD0 + r as u64)));
    }
    let mut scored: Vec<(f64, f64, usize)> = Vec::new();
    for (i, eta) in duals.iter().enumerate() {
        let u = split_injective_upper(eta)?;
        if u > 1e-12 {
            scored.push((xi.overlap(eta).norm() / u, u, i));
        }
    }
    scored.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    let mut lower: f64 = 0.0;
    let mut lower_cert = None;
    for (rank, &(ratio, split_u, idx)) in scored.iter().enumerate() {
        // Grid certification can tighten a loose split bound, so the top few
        // candidates get it; beyond that the preliminary ratio is final.
        let refine = rank < 3 || idx == 0;
        let eta = &duals[idx];
        let mut best_u = split_u;
        let mut best_ratio = ratio;
        if refine {
            if let Some(grid_u) = injective::certified_tripartite_upper(eta, 5e-3) {
                if grid_u < best_u {
                    best_u = grid_u;
                    best_ratio = xi.overlap(eta).norm() / best_u;
                }
            }
        }
        if best_ratio > lower {
            lower = best_ratio;
            lower_cert = Some(BracketCertificate::Dual {
                vector: eta.amplitudes().clone(),
                injective_upper: best_u,
            });
        }
    }
    lower = lower.max(1.0 - 1e-12); // unit vectors never fall below the ambient norm

    let mut bracket = NormBracket::new(lower.min(upper + 1e-12), upper.max(lower - 1e-12))?;
    bracket.lower = lower;
    bracket.upper = upper.max(lower - 1e-12);
    bracket.lower_certificate = lower_cert;
    bracket.upper_certificate = upper_desc;
    bracket.restarts_used = opts.restarts;
    if let Some(dec) = best_dec {
        bracket.iterations = dec.terms.len();
        // keep the decomposition reachable for callers that need the terms
        if bracket.lower_certificate.is_none() {
            bracket.lower_certificate = Some(BracketCertificate::Decomposition(dec));
        } else {
            bracket.upper_certificate = format!(
                "{} ({} terms, residual {:.2e})",
                bracket.upper_certificate,
                dec.terms.len(),
                dec.residual
            );
        }
    }
    Ok(bracket)
}

/// The witnessing decomposition behind the projective upper endpoint.
pub fn projective_decomposition(
    xi: &PureState,
    opts: &SolverOptions,
) -> Result<ProductDecomposition> {
    let shape = xi.shape();
    if shape.num_slots() == 2 {
        return recursive_schmidt_decomposition(xi);
    }
    let mut candidates: Vec<ProductDecomposition> = Vec::new();
    for fiber in (0..shape.num_slots()).rev() {
        candidates.push(fiber_decomposition(xi, fiber)?);
        candidates.push(rotated_fiber_decomposition(xi, fiber)?);
    }
    candidates.push(recursive_schmidt_decomposition(xi)?);
    let seed_atoms: Vec<ProductVector> = candidates
        .iter()
        .min_by(|a, b| {
            certified_cost(a, shape)
                .partial_cmp(&certified_cost(b, shape))
                .unwrap()
        })
        .map(|d| d.terms.iter().map(|t| t.product.clone()).collect())
        .unwrap_or_default();
    candidates.push(pursue(xi, seed_atoms, opts)?);
    candidates
        .into_iter()
        .min_by(|a, b| {
            certified_cost(a, shape)
                .partial_cmp(&certified_cost(b, shape))
                .unwrap()
        })
        .ok_or_else(|| Error::Invariant("no decomposition candidates".into()))
}

/// Dual vector of the split-`k` Schmidt form: the partial isometry built from
/// the singular pairs, reshaped to a state. Its overlap with `xi` is the
/// split's singular value sum while its grouped injective norm is 1.
fn schmidt_dual(xi: &PureState, split: usize) -> Result<PureState> {
    let m = xi.matricize(split)?;
    let (u, s, vh) = svd(&m);
    let rank = s.iter().filter(|&&x| x > 1e-13).count().max(1);
    let mut d = DMatrix::<Complex64>::zeros(m.nrows(), m.ncols());
    for i in 0..rank {
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                d[(r, c)] += u[(r, i)] * vh[(i, c)];
            }
        }
    }
    let amps: Vec<Complex64> = (0..m.nrows() * m.ncols())
        .map(|flat| d[(flat / m.ncols(), flat % m.ncols())])
        .collect();
    PureState::normalized(xi.shape().clone(), amps)
}

/// Membership of `xi` (with certificate) in the decomposable unit vectors:
/// equivalent to the injective norm reaching 1.
pub fn is_decomposable(
    xi: &PureState,
    opts: &SolverOptions,
    tol: f64,
) -> Result<(bool, Option<ProductVector>)> {
    let (product, overlap) = injective::nearest_product(xi, opts)?;
    if overlap >= 1.0 - tol {
        Ok((true, Some(product)))
    } else {
        Ok((false, None))
    }
}

/// Hull membership of an arbitrary vector: the closed convex hull of the
/// decomposable unit vectors is the projective unit ball.
pub fn hull_membership(
    shape: &SpaceShape,
    vector: &DVector<Complex64>,
    opts: &SolverOptions,
) -> Result<HullVerdict> {
    if vector.len() != shape.total_dim() {
        return Err(Error::Shape(format!(
            "vector length {} does not match {shape}",
            vector.len()
        )));
    }
    let norm = vector.norm();
    if norm <= 1e-12 {
        return Ok(HullVerdict::Inside);
    }
    let unit = PureState::normalized(shape.clone(), vector.iter().copied().collect())?;
    let bracket = projective_norm(&unit, opts)?;
    let (lower, upper) = (bracket.lower * norm, bracket.upper * norm);
    if upper <= 1.0 + 1e-9 {
        Ok(HullVerdict::Inside)
    } else if lower > 1.0 + 1e-9 {
        Ok(HullVerdict::Outside)
    } else {
        Ok(HullVerdict::Undecided)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::random_product;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn shape(dims: &[usize]) -> SpaceShape {
        SpaceShape::new(dims.to_vec()).unwrap()
    }

    fn bell() -> PureState {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        PureState::new(
            shape(&[2, 2]),
            vec![c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)],
        )
        .unwrap()
    }

    fn ghz() -> PureState {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut amps = vec![c(0.0, 0.0); 8];
        amps[0] = c(s, 0.0);
        amps[7] = c(s, 0.0);
        PureState::new(shape(&[2, 2, 2]), amps).unwrap()
    }

    fn w_state() -> PureState {
        let t = 1.0 / 3.0f64.sqrt();
        let mut amps = vec![c(0.0, 0.0); 8];
        amps[1] = c(t, 0.0);
        amps[2] = c(t, 0.0);
        amps[4] = c(t, 0.0);
        PureState::new(shape(&[2, 2, 2]), amps).unwrap()
    }

    #[test]
    fn product_vector_cost_is_one() {
        let opts = SolverOptions::default().with_seed(21);
        for seed in 0..5 {
            let p = random_product(&shape(&[2, 2, 3]), seed);
            let xi = expand_product(&p).unwrap();
            let b = projective_norm(&xi, &opts).unwrap();
            assert!(b.upper <= 1.0 + 1e-8, "upper {}", b.upper);
            assert!(b.lower >= 1.0 - 1e-8);
        }
    }

    #[test]
    fn bell_is_sqrt_two() {
        let b = projective_norm(&bell(), &SolverOptions::default()).unwrap();
        assert_abs_diff_eq!(b.lower, 2.0f64.sqrt(), epsilon = 1e-10);
        assert_abs_diff_eq!(b.upper, 2.0f64.sqrt(), epsilon = 1e-10);
    }

    #[test]
    fn ghz_bracket_pins_sqrt_two() {
        let b = projective_norm(&ghz(), &SolverOptions::default().with_seed(2)).unwrap();
        assert_abs_diff_eq!(b.lower, 2.0f64.sqrt(), epsilon = 1e-6);
        assert_abs_diff_eq!(b.upper, 2.0f64.sqrt(), epsilon = 1e-6);
    }

    #[test]
    fn w_bracket_contains_frozen_oracle_value() {
        // Frozen from the pre-build oracle: a three-term decomposition of cost
        // 3/2 whose dual bound matches, so the true value is exactly 1.5.
        let b = projective_norm(&w_state(), &SolverOptions::default().with_seed(3)).unwrap();
        assert!(b.lower <= 1.5 + 1e-9 && 1.5 <= b.upper + 1e-9);
        assert!(b.lower >= 1.49, "dual lower bound too weak: {}", b.lower);
        assert!(b.upper <= 1.74, "upper bound too weak: {}", b.upper);
    }

    #[test]
    fn decomposition_certificate_reconstructs() {
        let xi = crate::state::random_state(&shape(&[2, 2, 2]), 77);
        let dec =
            projective_decomposition(&xi, &SolverOptions::default().with_seed(1)).unwrap();
        let rec = dec.reconstruct(8).unwrap();
        let err = (xi.amplitudes() - rec).norm();
        assert!(err <= 1e-8, "reconstruction residual {err}");
        assert!(dec.terms.len() <= 4 * 4);
    }

    #[test]
    fn sandwich_between_injective_and_projective() {
        let opts = SolverOptions::default().with_seed(5);
        for seed in 0..10 {
            let xi = crate::state::random_state(&shape(&[2, 2, 2]), 300 + seed);
            let inj = injective::injective_norm(&xi, &opts).unwrap();
            let proj = projective_norm(&xi, &opts).unwrap();
            assert!(inj.lower <= 1.0 + 1e-8);
            assert!(proj.upper >= 1.0 - 1e-8);
        }
    }

    #[test]
    fn cap_holds() {
        let opts = SolverOptions::default().with_seed(6);
        for seed in 0..10 {
            let xi = crate::state::random_state(&shape(&[2, 2, 4]), 400 + seed);
            let b = projective_norm(&xi, &opts).unwrap();
            assert!(b.upper <= 2.0 + 1e-8);
        }
    }

    #[test]
    fn bipartite_generic_path_matches_fast_path() {
        // run the generic machinery by viewing a (3,4) state as (3,4) vs
        // reshaped (3,2,2); the fine-partition value can only grow, but the
        // (3,4) nuclear norm must match the fast path on the same shape.
        let opts = SolverOptions::default().with_seed(7);
        for seed in 0..5 {
            let xi = crate::state::random_state(&shape(&[3, 4]), 500 + seed);
            let fast = projective_norm(&xi, &opts).unwrap();
            let m = xi.matricize(1).unwrap();
            let oracle: f64 = svd(&m).1.iter().sum();
            assert_abs_diff_eq!(fast.lower, oracle, epsilon = 1e-10);
            assert_abs_diff_eq!(fast.upper, oracle, epsilon = 1e-10);
        }
    }

    #[test]
    fn decomposability_detection() {
        let opts = SolverOptions::default().with_seed(8);
        let p = random_product(&shape(&[2, 2]), 3);
        let xi = expand_product(&p).unwrap();
        let (yes, cert) = is_decomposable(&xi, &opts, 1e-6).unwrap();
        assert!(yes);
        assert!(cert.is_some());
        let (no, _) = is_decomposable(&bell(), &opts, 1e-6).unwrap();
        assert!(!no);
    }

    #[test]
    fn near_product_threshold_behavior() {
        // normalize(e00 + 0.01 e11): top singular value 1/sqrt(1+1e-4)
        let n = (1.0f64 + 1e-4).sqrt();
        let xi = PureState::new(
            shape(&[2, 2]),
            vec![
                c(1.0 / n, 0.0),
                c(0.0, 0.0),
                c(0.0, 0.0),
                c(0.01 / n, 0.0),
            ],
        )
        .unwrap();
        let opts = SolverOptions::default();
        let (coarse, _) = is_decomposable(&xi, &opts, 1e-3).unwrap();
        assert!(coarse);
        let (fine, _) = is_decomposable(&xi, &opts, 1e-7).unwrap();
        assert!(!fine);
    }

    #[test]
    fn hull_examples() {
        let opts = SolverOptions::default().with_seed(9);
        let s = shape(&[2, 2]);
        let p = random_product(&s, 4);
        let half_product = expand_product(&p).unwrap().amplitudes() * c(0.5, 0.0);
        assert_eq!(
            hull_membership(&s, &half_product, &opts).unwrap(),
            HullVerdict::Inside
        );
        assert_eq!(
            hull_membership(&s, bell().amplitudes(), &opts).unwrap(),
            HullVerdict::Outside
        );
        // radius 1/sqrt2 ball vector: exactly on the hull boundary
        let boundary = bell().amplitudes() * c(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let verdict = hull_membership(&s, &boundary, &opts).unwrap();
        assert_ne!(verdict, HullVerdict::Outside);
        let zero = DVector::zeros(4);
        assert_eq!(hull_membership(&s, &zero, &opts).unwrap(), HullVerdict::Inside);
    }

    #[test]
    fn cross_norm_property() {
        let opts = SolverOptions::default().with_seed(10);
        for seed in 0..8 {
            let p = random_product(&shape(&[2, 3, 2]), 600 + seed);
            let xi = expand_product(&p).unwrap();
            let b = projective_norm(&xi, &opts).unwrap();
            assert!((b.upper - 1.0).abs() <= 1e-8, "upper {}", b.upper);
        }
    }
}
