//! The convexity criterion: tangency constraints, the real quadratic form
//! `J_f(z, b)`, and Monte-Carlo scans over the constraint manifold.
//!
//! For `z` in the domain and a direction `b` satisfying
//! `Re{ sum_j p_j |z_j/rho|^{p_j} b_j / z_j } = 0`, convexity of the image is
//! characterized by
//!
//! ```text
//! J_f(z,b) = Re{ sum_j p_j^2/2 |z_j|^{p_j-2} / rho^{p_j} |b_j|^2
//!              + sum_j p_j (p_j/2 - 1) |z_j/rho|^{p_j} (b_j/z_j)^2
//!              - 2 sum_j p_j/rho |z_j/rho|^{p_j} <Df^{-1} D^2f(b,b), drho/dz̄> }
//!            >= 0.
//! ```
//!
//! Coordinates with `z_j = 0` enter by continuous extension: the first sum
//! uses `|0|^0 = 1` when `p_j = 2`, the second sum contributes nothing, and
//! the weights `|z_j/rho|^{p_j}` vanish. These are the removable limits of the
//! displayed formula, valid because `p_j >= 2`.
//!
//! Sampling can only gather evidence; a scan never proves nonnegativity.
//! Violations, however, are conclusive: any admissible pair with `J < 0`
//! disproves convexity of the image.

use num_complex::Complex64;

use crate::geometry::{minkowski, rho_bar_gradient, sample_interior, DomainSpec};
use crate::mappings::{derivatives, hessian_action, MappingSpec};
use crate::numerics::{hermitian_inner, sample_complex_gaussian, solve_linear, ComplexVector};
use crate::task;
use crate::{Error, Result};

/// How many of the lowest-J samples a scan keeps for warm-starting searches.
pub(crate) const WORST_KEPT: usize = 10;

/// The real-linear tangency constraint at an anchor point.
///
/// `c_j = p_j |z_j / rho|^{p_j} / z_j` (zero where `z_j = 0`); admissible
/// directions satisfy `L(b) = Re(sum_j c_j b_j) = 0`.
#[derive(Debug, Clone)]
pub struct TangentConstraint {
    c: ComplexVector,
    at: ComplexVector,
    rho: f64,
}

impl TangentConstraint {
    pub fn coefficients(&self) -> &ComplexVector {
        &self.c
    }

    pub fn anchor(&self) -> &ComplexVector {
        &self.at
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// The constraint functional `L(b)`.
    pub fn functional(&self, b: &ComplexVector) -> f64 {
        self.c
            .iter()
            .zip(b.iter())
            .map(|(cj, bj)| (cj * bj).re)
            .sum()
    }
}

/// Builds the tangency constraint at `z != 0`.
pub fn tangency(dom: &DomainSpec, z: &ComplexVector) -> Result<TangentConstraint> {
    dom.require_criterion_exponents()?;
    if z.len() != dom.n() {
        return Err(Error::DimensionMismatch {
            left: dom.n(),
            right: z.len(),
        });
    }
    if !z.is_finite() {
        return Err(Error::NonFiniteInput);
    }
    if z.is_zero() {
        return Err(Error::ZeroPoint);
    }
    let rho = minkowski(dom, z)?.rho;
    let c = dom
        .exponents()
        .iter()
        .zip(z.iter())
        .map(|(&pj, zj)| {
            if zj.re == 0.0 && zj.im == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(pj * (zj.norm() / rho).powf(pj), 0.0) / zj
            }
        })
        .collect();
    Ok(TangentConstraint {
        c,
        at: z.clone(),
        rho,
    })
}

/// Orthogonal projection of `b_raw` onto the constraint hyperplane:
/// `b = b_raw - (L(b_raw) / sum_j |c_j|^2) conj(c)`.
pub fn project_tangent(tc: &TangentConstraint, b_raw: &ComplexVector) -> Result<ComplexVector> {
    if b_raw.len() != tc.c.len() {
        return Err(Error::DimensionMismatch {
            left: tc.c.len(),
            right: b_raw.len(),
        });
    }
    let norm_sq: f64 = tc.c.iter().map(|cj| cj.norm_sqr()).sum();
    if norm_sq < 1e-28 {
        return Err(Error::DegenerateConstraint { norm_sq });
    }
    let factor = tc.functional(b_raw) / norm_sq;
    Ok(tc
        .c
        .iter()
        .zip(b_raw.iter())
        .map(|(cj, bj)| bj - factor * cj.conj())
        .collect())
}

/// One evaluation of the criterion form at a `(z, b)` pair.
#[derive(Debug, Clone, PartialEq)]
pub struct CriterionEvaluation {
    pub z: ComplexVector,
    pub b: ComplexVector,
    pub j_value: f64,
    /// Value of the tangency functional `L(b)` at the pair.
    pub constraint_residual: f64,
    pub rho: f64,
}

/// Evaluates `J_f(z, b)`.
///
/// Requires `z != 0` in the domain and a nonsingular `Df(z)`; `b` need not be
/// admissible — the constraint functional's value is reported alongside.
pub fn evaluate_j(
    dom: &DomainSpec,
    spec: &MappingSpec,
    z: &ComplexVector,
    b: &ComplexVector,
) -> Result<CriterionEvaluation> {
    dom.require_criterion_exponents()?;
    if spec.n() != dom.n() {
        return Err(Error::DimensionMismatch {
            left: dom.n(),
            right: spec.n(),
        });
    }
    if z.len() != dom.n() || b.len() != dom.n() {
        return Err(Error::DimensionMismatch {
            left: dom.n(),
            right: if z.len() != dom.n() { z.len() } else { b.len() },
        });
    }
    if !z.is_finite() || !b.is_finite() {
        return Err(Error::NonFiniteInput);
    }
    if z.is_zero() {
        return Err(Error::ZeroPoint);
    }

    let rho = minkowski(dom, z)?.rho;
    let bundle = derivatives(spec, z);
    let action = hessian_action(&bundle, b)?;
    let w = solve_linear(&bundle.jacobian, &action).map_err(|e| match e {
        Error::SingularMatrix { .. } => Error::SingularJacobian,
        other => other,
    })?;
    let grad = rho_bar_gradient(dom, z)?;
    let bracket = hermitian_inner(&w, &grad)?;

    let mut sum1 = 0.0;
    let mut sum2 = Complex64::new(0.0, 0.0);
    let mut weight = 0.0;
    let mut residual = 0.0;
    for ((&pj, zj), bj) in dom.exponents().iter().zip(z.iter()).zip(b.iter()) {
        let abs_z = zj.norm();
        // |z_j|^{p_j - 2} with powf's 0^0 = 1 covering the p_j = 2 limit.
        sum1 += 0.5 * pj * pj * abs_z.powf(pj - 2.0) / rho.powf(pj) * bj.norm_sqr();
        if abs_z > 0.0 {
            let ratio = (abs_z / rho).powf(pj);
            let dir = bj / zj;
            sum2 += pj * (0.5 * pj - 1.0) * ratio * dir * dir;
            weight += pj * ratio;
            residual += pj * ratio * dir.re;
        }
    }
    let j_value = sum1 + sum2.re - 2.0 * weight / rho * bracket.re;
    if !j_value.is_finite() {
        return Err(Error::NonFiniteInput);
    }
    Ok(CriterionEvaluation {
        z: z.clone(),
        b: b.clone(),
        j_value,
        constraint_residual: residual,
        rho,
    })
}

/// Outcome of a Monte-Carlo scan.
#[derive(Debug, Clone)]
pub struct ScanReport {
    pub min_j: f64,
    pub witness: CriterionEvaluation,
    /// Samples with `J < -tol`.
    pub below_tol: usize,
    /// Draws skipped because `Df` was singular there.
    pub singular_skips: usize,
    pub samples_used: usize,
    pub seed: u64,
    pub rho_floor: f64,
    pub tol: f64,
}

struct ChunkOutcome {
    // (J, index within chunk, evaluation), lowest J first, at most WORST_KEPT
    worst: Vec<(f64, usize, CriterionEvaluation)>,
    below_tol: usize,
    singular: usize,
    evaluated: usize,
}

fn scan_chunk(
    dom: &DomainSpec,
    spec: &MappingSpec,
    range: std::ops::Range<usize>,
    rng: &mut rand_chacha::ChaCha8Rng,
    rho_floor: f64,
    tol: f64,
) -> ChunkOutcome {
    let n = dom.n();
    let mut out = ChunkOutcome {
        worst: Vec::new(),
        below_tol: 0,
        singular: 0,
        evaluated: 0,
    };
    for (idx, _) in range.enumerate() {
        let z = sample_interior(dom, rng, rho_floor);
        let tc = match tangency(dom, &z) {
            Ok(tc) => tc,
            Err(_) => continue,
        };
        let mut b = None;
        for _ in 0..16 {
            let raw = sample_complex_gaussian(n, rng);
            let projected = match project_tangent(&tc, &raw) {
                Ok(p) => p,
                Err(_) => continue,
            };
            let norm = projected.norm();
            if norm > 1e-9 {
                b = Some(projected.scaled(Complex64::new(1.0 / norm, 0.0)));
                break;
            }
        }
        let Some(b) = b else { continue };
        match evaluate_j(dom, spec, &z, &b) {
            Ok(eval) => {
                out.evaluated += 1;
                if eval.j_value < -tol {
                    out.below_tol += 1;
                }
                let pos = out
                    .worst
                    .partition_point(|(j, i, _)| (*j, *i) < (eval.j_value, idx));
                if pos < WORST_KEPT {
                    out.worst.insert(pos, (eval.j_value, idx, eval));
                    out.worst.truncate(WORST_KEPT);
                }
            }
            Err(Error::SingularJacobian) => out.singular += 1,
            Err(_) => out.singular += 1,
        }
    }
    out
}

pub(crate) fn scan_detailed(
    dom: &DomainSpec,
    spec: &MappingSpec,
    samples: usize,
    seed: u64,
    rho_floor: f64,
    tol: f64,
    threads: usize,
) -> Result<(ScanReport, Vec<CriterionEvaluation>)> {
    dom.require_criterion_exponents()?;
    if spec.n() != dom.n() {
        return Err(Error::DimensionMismatch {
            left: dom.n(),
            right: spec.n(),
        });
    }
    if samples == 0 {
        return Err(Error::ParamOutOfRange("samples must be >= 1".into()));
    }
    if !(0.0..1.0).contains(&rho_floor) {
        return Err(Error::ParamOutOfRange(format!(
            "rho_floor must lie in [0, 1), got {rho_floor}"
        )));
    }

    let chunks = task::run_chunked(samples, threads, seed, |_, range, rng| {
        scan_chunk(dom, spec, range, rng, rho_floor, tol)
    });

    let mut below_tol = 0;
    let mut singular = 0;
    let mut evaluated = 0;
    // (J, chunk, index) orders the merged worst list deterministically.
    let mut worst: Vec<(f64, usize, usize, CriterionEvaluation)> = Vec::new();
    for (ci, chunk) in chunks.into_iter().enumerate() {
        below_tol += chunk.below_tol;
        singular += chunk.singular;
        evaluated += chunk.evaluated;
        for (j, idx, eval) in chunk.worst {
            worst.push((j, ci, idx, eval));
        }
    }
    if evaluated == 0 {
        return Err(Error::AllSamplesSingular);
    }
    worst.sort_by(|a, b| {
        (a.0, a.1, a.2)
            .partial_cmp(&(b.0, b.1, b.2))
            .expect("J values are finite")
    });
    worst.truncate(WORST_KEPT);
    let witness = worst[0].3.clone();
    let report = ScanReport {
        min_j: witness.j_value,
        witness,
        below_tol,
        singular_skips: singular,
        samples_used: samples,
        seed,
        rho_floor,
        tol,
    };
    Ok((report, worst.into_iter().map(|(_, _, _, e)| e).collect()))
}

/// Scans `samples` constrained pairs, drawing `z` from the interior law and
/// `b` by projecting a Gaussian draw onto the tangency hyperplane (normalized
/// to unit length; the sign of `J` is scale-free by quadratic homogeneity).
///
/// Deterministic for a fixed seed, independently of `threads`.
pub fn scan(
    dom: &DomainSpec,
    spec: &MappingSpec,
    samples: usize,
    seed: u64,
    rho_floor: f64,
    tol: f64,
    threads: usize,
) -> Result<ScanReport> {
    scan_detailed(dom, spec, samples, seed, rho_floor, tol, threads).map(|(r, _)| r)
}
