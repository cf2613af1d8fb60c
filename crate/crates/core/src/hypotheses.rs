//! Pointwise checkers for the built-in sufficient-condition systems T1-T4 and
//! validators for the coefficient bounds of the example families E1-E4.
//!
//! The condition systems quantify over all nonzero points of the domain; the
//! checkers sample them. Right-hand sides of the form `p_j |z_j|^{p_j-2}`
//! collapse as `z_j -> 0` when `p_j > 2`, so violations concentrate near
//! coordinate hyperplanes: every run therefore probes axis points and
//! small-coordinate shells in addition to the random draws. A sampled pass is
//! evidence, not proof; a negative margin at a concrete point is conclusive.

use num_complex::Complex64;

use crate::geometry::{sample_interior, DomainSpec};
use crate::mappings::{derivatives, DerivativeBundle, Family, MappingSpec};
use crate::numerics::ComplexVector;
use crate::task;
use crate::{Error, Result};

/// Margins at or above this value count as satisfied; the slack absorbs
/// rounding on exactly-boundary instances.
pub const PASS_THRESHOLD: f64 = -1e-12;

/// Reserved generator stream for the probe points, distinct from the sample
/// chunk streams.
const PROBE_STREAM: u64 = u64::MAX;

/// Worst observed margin of one condition: `margin = RHS - LHS`, so
/// nonnegative means satisfied.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionMargin {
    pub condition_id: String,
    pub margin: f64,
    /// Point where the margin was worst; absent for point-free conditions.
    pub witness_z: Option<ComplexVector>,
}

/// Result of one checker or validator run.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub theorem: String,
    pub passed: bool,
    pub margins: Vec<ConditionMargin>,
    pub samples_used: usize,
    pub seed: u64,
    pub notes: Vec<String>,
}

impl CheckReport {
    fn from_margins(
        theorem: &str,
        margins: Vec<ConditionMargin>,
        samples_used: usize,
        seed: u64,
        notes: Vec<String>,
    ) -> Self {
        let passed = margins.iter().all(|m| m.margin >= PASS_THRESHOLD);
        Self {
            theorem: theorem.to_string(),
            passed,
            margins,
            samples_used,
            seed,
            notes,
        }
    }
}

/// Keeps divide-by-zero fallout representable: margins stay finite.
fn finite_margin(v: f64) -> f64 {
    if v.is_nan() {
        -1e300
    } else {
        v.clamp(-1e300, 1e300)
    }
}

fn mag(z: Complex64) -> f64 {
    z.norm()
}

/// Axis points and near-axis shells where the condition right-hand sides are
/// smallest, plus deterministic random anchors.
fn probe_points(dom: &DomainSpec, seed: u64) -> Vec<ComplexVector> {
    let n = dom.n();
    let mut rng = task::derived_rng(seed, PROBE_STREAM);
    let phases = [
        Complex64::new(1.0, 0.0),
        Complex64::new(-1.0, 0.0),
        Complex64::new(0.0, 1.0),
    ];
    let mut points = Vec::new();
    for j in 0..n {
        for &r in &[1e-3, 0.35, 0.9] {
            for &phase in &phases {
                let mut z = ComplexVector::zeros(n);
                z[j] = phase * r;
                points.push(z);
            }
        }
    }
    for j in 0..n {
        for &delta in &[0.0, 1e-3, 1e-2] {
            let base = sample_interior(dom, &mut rng, 0.85);
            let mut z = base.clone();
            let phase = if mag(base[j]) > 0.0 {
                base[j] / mag(base[j])
            } else {
                Complex64::new(1.0, 0.0)
            };
            z[j] = phase * delta;
            if !z.is_zero() {
                points.push(z);
            }
        }
    }
    points
}

/// Shared sampling loop: evaluates `margins_at` on the probes, any injected
/// extra points, and `samples` random interior draws, keeping the minimum
/// margin and its witness per condition. Deterministic for a fixed seed,
/// independently of the thread count.
fn run_sampled_check<F>(
    theorem: &str,
    dom: &DomainSpec,
    samples: usize,
    seed: u64,
    threads: usize,
    ids: Vec<String>,
    extra_points: &[ComplexVector],
    notes: Vec<String>,
    margins_at: F,
) -> CheckReport
where
    F: Fn(&ComplexVector) -> Vec<f64> + Sync,
{
    let slots = ids.len();
    let mut probes = probe_points(dom, seed);
    probes.extend(extra_points.iter().cloned());

    let mut best: Vec<(f64, Option<ComplexVector>)> = vec![(f64::INFINITY, None); slots];
    for z in &probes {
        let margins = margins_at(z);
        debug_assert_eq!(margins.len(), slots);
        for (slot, &m) in margins.iter().enumerate() {
            if m < best[slot].0 {
                best[slot] = (m, Some(z.clone()));
            }
        }
    }

    let chunk_minima = task::run_chunked(samples, threads, seed, |_, range, rng| {
        let mut local: Vec<(f64, Option<ComplexVector>)> = vec![(f64::INFINITY, None); slots];
        for _ in range {
            let z = sample_interior(dom, rng, 0.0);
            let margins = margins_at(&z);
            for (slot, &m) in margins.iter().enumerate() {
                if m < local[slot].0 {
                    local[slot] = (m, Some(z.clone()));
                }
            }
        }
        local
    });
    for chunk in chunk_minima {
        for (slot, (m, z)) in chunk.into_iter().enumerate() {
            if m < best[slot].0 {
                best[slot] = (m, z);
            }
        }
    }

    let margins = ids
        .into_iter()
        .zip(best)
        .map(|(condition_id, (margin, witness_z))| ConditionMargin {
            condition_id,
            margin,
            witness_z,
        })
        .collect();
    CheckReport::from_margins(theorem, margins, samples + probes.len(), seed, notes)
}

fn require_same_dims(dom: &DomainSpec, spec: &MappingSpec) -> Result<()> {
    if dom.n() != spec.n() {
        return Err(Error::DimensionMismatch {
            left: dom.n(),
            right: spec.n(),
        });
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Theorem 1: f = (f_1(z_1..z_n), f_2(z_2..z_n), f_3(z_3), ..., f_n(z_n))
// ---------------------------------------------------------------------------

fn require_shape_t1(spec: &MappingSpec) -> Result<()> {
    let n = spec.n();
    if n < 2 {
        return Err(Error::ShapeMismatch("T1 needs n >= 2".into()));
    }
    let dep = spec.dependence();
    if dep[1][0] {
        return Err(Error::ShapeMismatch(
            "T1: component 2 must not depend on z_1".into(),
        ));
    }
    for i in 2..n {
        for (j, &used) in dep[i].iter().enumerate() {
            if used && j != i {
                return Err(Error::ShapeMismatch(format!(
                    "T1: component {} must be a function of z_{} only",
                    i + 1,
                    i + 1
                )));
            }
        }
    }
    Ok(())
}

fn t1_margins(p: &[f64], z: &ComplexVector, b: &DerivativeBundle) -> Vec<f64> {
    let n = p.len();
    let jac = &b.jacobian;
    let t = &b.hessian;
    let j00 = mag(jac.get(0, 0));
    let j11 = mag(jac.get(1, 1));

    // (1): nonvanishing diagonal product and the Schwarz-type bound on the
    // single-variable components.
    let mut prod = 1.0;
    for i in 0..n {
        prod *= mag(jac.get(i, i));
    }
    let mut m1 = prod;
    for j in 2..n {
        m1 = m1.min(mag(jac.get(j, j)) - mag(z[j]) * mag(t.get(j, j, j)));
    }

    // (2)
    let sum_row0: f64 = (0..n).map(|l| mag(z[0]) * mag(t.get(0, 0, l))).sum();
    let sum_row1: f64 = (1..n).map(|l| mag(z[1]) * mag(t.get(1, 1, l))).sum();
    let m2 = (j00 - sum_row0).min(j11 - sum_row1);

    // (3)
    let s_f1_2l: f64 = (0..n).map(|l| mag(t.get(0, 1, l))).sum();
    let s_f2_2l: f64 = (1..n).map(|l| mag(t.get(1, 1, l))).sum();
    let lhs3 = p[0] * (s_f1_2l / j00 + mag(jac.get(0, 1)) / j11 * s_f2_2l / j00);
    let rhs3 = (1.0 - mag(z[1]) * s_f2_2l / j11) * p[1] * mag(z[1]).powf(p[1] - 2.0);
    let m3 = rhs3 - lhs3;

    let mut margins = vec![finite_margin(m1), finite_margin(m2), finite_margin(m3)];

    // (4) over the single-variable components
    if n >= 3 {
        let mut m4 = f64::INFINITY;
        for j in 2..n {
            let fpp = mag(t.get(j, j, j));
            let fp = mag(jac.get(j, j));
            let curvature = fpp / fp;
            let s1: f64 = (0..n).map(|l| mag(t.get(0, j, l))).sum();
            let s2: f64 = (1..n).map(|l| mag(t.get(1, j, l))).sum();
            let lhs = p[0]
                * (s1 / j00
                    + mag(jac.get(0, 1)) / j11 * s2 / j00
                    + mag(jac.get(0, 1)) / j00 * mag(jac.get(1, j)) / j11 * curvature
                    + mag(jac.get(0, j)) / j00 * curvature)
                + p[1] * (s2 / j11 + mag(jac.get(1, j)) / j11 * curvature);
            let rhs = p[j] * mag(z[j]).powf(p[j] - 2.0) * (1.0 - mag(z[j]) * curvature);
            m4 = m4.min(rhs - lhs);
        }
        margins.push(finite_margin(m4));
    }
    margins
}

pub fn check_theorem1(
    dom: &DomainSpec,
    spec: &MappingSpec,
    samples: usize,
    seed: u64,
    threads: usize,
) -> Result<CheckReport> {
    check_theorem1_with_probes(dom, spec, samples, seed, threads, &[])
}

/// As [`check_theorem1`] with caller-injected points prepended to the sample
/// stream.
pub fn check_theorem1_with_probes(
    dom: &DomainSpec,
    spec: &MappingSpec,
    samples: usize,
    seed: u64,
    threads: usize,
    extra_points: &[ComplexVector],
) -> Result<CheckReport> {
    dom.require_criterion_exponents()?;
    require_same_dims(dom, spec)?;
    require_shape_t1(spec)?;
    let n = dom.n();
    let mut ids: Vec<String> = vec!["T1.1".into(), "T1.2".into(), "T1.3".into()];
    if n >= 3 {
        ids.push("T1.4".into());
    }
    let p = dom.exponents().to_vec();
    let notes = vec![
        "T1.3: the cross factor |df1/dz2 / df2/dz2| multiplies each |d2f2/dz2 dzl| / |df1/dz1| \
         summand; the l-independent reading of that sum is rejected as a display typo."
            .into(),
    ];
    Ok(run_sampled_check(
        "T1",
        dom,
        samples,
        seed,
        threads,
        ids,
        extra_points,
        notes,
        move |z| t1_margins(&p, z, &derivatives(spec, z)),
    ))
}

// ---------------------------------------------------------------------------
// Theorem 2: f = (p_1(z_1..z_n), p_2(z_2, z_n), ..., p_{n-1}(z_{n-1}, z_n),
//                 p_n(z_n))
// ---------------------------------------------------------------------------

fn require_shape_t2(spec: &MappingSpec) -> Result<()> {
    let n = spec.n();
    if n < 2 {
        return Err(Error::ShapeMismatch("T2 needs n >= 2".into()));
    }
    let dep = spec.dependence();
    let last = n - 1;
    for i in 1..last {
        for (j, &used) in dep[i].iter().enumerate() {
            if used && j != i && j != last {
                return Err(Error::ShapeMismatch(format!(
                    "T2: component {} may depend on z_{} and z_{n} only",
                    i + 1,
                    i + 1
                )));
            }
        }
    }
    for (j, &used) in dep[last].iter().enumerate() {
        if used && j != last {
            return Err(Error::ShapeMismatch(format!(
                "T2: component {n} must be a function of z_{n} only"
            )));
        }
    }
    Ok(())
}

fn t2_margins(p: &[f64], z: &ComplexVector, b: &DerivativeBundle) -> Vec<f64> {
    let n = p.len();
    let last = n - 1;
    let jac = &b.jacobian;
    let t = &b.hessian;
    let j00 = mag(jac.get(0, 0));
    let jll = mag(jac.get(last, last));
    let tail_curvature = mag(t.get(last, last, last)) / jll;

    // (1)
    let mut prod = 1.0;
    for i in 0..n {
        prod *= mag(jac.get(i, i));
    }
    let m1 = prod.min(jll - mag(z[last]) * mag(t.get(last, last, last)));

    // (2)
    let sum_row0: f64 = (0..n).map(|l| mag(z[0]) * mag(t.get(0, 0, l))).sum();
    let mut m2 = j00 - sum_row0;
    for j in 1..last {
        let own = mag(z[j]) * (mag(t.get(j, j, j)) + mag(t.get(j, j, last)));
        m2 = m2.min(mag(jac.get(j, j)) - own);
    }

    let mut margins = vec![finite_margin(m1), finite_margin(m2)];

    // (3) for the middle components
    if n >= 3 {
        let mut m3 = f64::INFINITY;
        for j in 1..last {
            let jjj = mag(jac.get(j, j));
            let own = mag(t.get(j, j, j)) + mag(t.get(j, j, last));
            let s: f64 = (0..n).map(|l| mag(t.get(0, j, l))).sum();
            let lhs = p[0] / j00 * (mag(jac.get(0, j)) * own / jjj + s);
            let rhs = p[j] * mag(z[j]).powf(p[j] - 2.0) * (1.0 - mag(z[j]) * own / jjj);
            m3 = m3.min(rhs - lhs);
        }
        margins.push(finite_margin(m3));
    }

    // (4) for the shared tail coordinate
    let mut lhs4 = 0.0;
    for j in 1..last {
        let jjj = mag(jac.get(j, j));
        lhs4 += p[j] / jjj
            * (mag(t.get(j, j, last))
                + mag(t.get(j, last, last))
                + mag(jac.get(j, last)) * tail_curvature);
    }
    let mut p1_group: f64 = (0..n).map(|l| mag(t.get(0, last, l))).sum();
    for j in 1..last {
        let jjj = mag(jac.get(j, j));
        p1_group += mag(jac.get(0, j)) * (mag(t.get(j, j, last)) + mag(t.get(j, last, last))) / jjj;
        p1_group += mag(jac.get(0, j)) * mag(jac.get(j, last)) / jjj * tail_curvature;
    }
    p1_group += mag(jac.get(0, last)) * tail_curvature;
    lhs4 += p[0] / j00 * p1_group;
    let rhs4 = p[last] * mag(z[last]).powf(p[last] - 2.0) * (1.0 - mag(z[last]) * tail_curvature);
    margins.push(finite_margin(rhs4 - lhs4));

    margins
}

pub fn check_theorem2(
    dom: &DomainSpec,
    spec: &MappingSpec,
    samples: usize,
    seed: u64,
    threads: usize,
) -> Result<CheckReport> {
    check_theorem2_with_probes(dom, spec, samples, seed, threads, &[])
}

pub fn check_theorem2_with_probes(
    dom: &DomainSpec,
    spec: &MappingSpec,
    samples: usize,
    seed: u64,
    threads: usize,
    extra_points: &[ComplexVector],
) -> Result<CheckReport> {
    dom.require_criterion_exponents()?;
    require_same_dims(dom, spec)?;
    require_shape_t2(spec)?;
    let n = dom.n();
    let mut ids: Vec<String> = vec!["T2.1".into(), "T2.2".into()];
    if n >= 3 {
        ids.push("T2.3".into());
    }
    ids.push("T2.4".into());
    let p = dom.exponents().to_vec();
    Ok(run_sampled_check(
        "T2",
        dom,
        samples,
        seed,
        threads,
        ids,
        extra_points,
        Vec::new(),
        move |z| t2_margins(&p, z, &derivatives(spec, z)),
    ))
}

// ---------------------------------------------------------------------------
// Theorem 3: f = (p_1(z), ..., p_j(z_j) + f_j(z_k), ..., p_k(z_k), ...)
// ---------------------------------------------------------------------------

fn require_shape_t3(spec: &MappingSpec, k0: usize) -> Result<()> {
    let n = spec.n();
    if n < 2 {
        return Err(Error::ShapeMismatch("T3 needs n >= 2".into()));
    }
    if k0 == 0 || k0 >= n {
        return Err(Error::ParamOutOfRange(format!(
            "coupling index must satisfy 2 <= k <= n, got k = {}",
            k0 + 1
        )));
    }
    let dep = spec.dependence();
    for (j, &used) in dep[k0].iter().enumerate() {
        if used && j != k0 {
            return Err(Error::ShapeMismatch(format!(
                "T3: component {} must be a function of z_{} only",
                k0 + 1,
                k0 + 1
            )));
        }
    }
    for i in 1..n {
        if i == k0 {
            continue;
        }
        for (j, &used) in dep[i].iter().enumerate() {
            if used && j != i && j != k0 {
                return Err(Error::ShapeMismatch(format!(
                    "T3: component {} may depend on z_{} and z_{} only",
                    i + 1,
                    i + 1,
                    k0 + 1
                )));
            }
        }
        if !spec.mixed_term_free(i, i, k0) {
            return Err(Error::ShapeMismatch(format!(
                "T3: component {} must be additively split between z_{} and z_{}",
                i + 1,
                i + 1,
                k0 + 1
            )));
        }
    }
    Ok(())
}

fn t3_margins(p: &[f64], k0: usize, z: &ComplexVector, b: &DerivativeBundle) -> Vec<f64> {
    let n = p.len();
    let jac = &b.jacobian;
    let t = &b.hessian;
    let j00 = mag(jac.get(0, 0));
    let jkk = mag(jac.get(k0, k0));
    let k_curvature = mag(t.get(k0, k0, k0)) / jkk;

    // (1)
    let mut prod = 1.0;
    for i in 0..n {
        prod *= mag(jac.get(i, i));
    }
    let mut m1 = prod;
    for j in 1..n {
        m1 = m1.min(mag(jac.get(j, j)) - mag(z[j]) * mag(t.get(j, j, j)));
    }

    // (2)
    let sum_row0: f64 = (0..n).map(|l| mag(z[0]) * mag(t.get(0, 0, l))).sum();
    let m2 = j00 - sum_row0;

    let mut margins = vec![finite_margin(m1), finite_margin(m2)];

    // (3) for every uncoupled direction; also covers the last coordinate when
    // k < n (directional completeness, stricter than the narrowest reading).
    let dirs: Vec<usize> = (1..n).filter(|&j| j != k0).collect();
    if !dirs.is_empty() {
        let mut m3 = f64::INFINITY;
        for &j in &dirs {
            let jjj = mag(jac.get(j, j));
            let curvature = mag(t.get(j, j, j)) / jjj;
            let s: f64 = (0..n).map(|l| mag(t.get(0, j, l))).sum();
            let lhs = p[0] * mag(jac.get(0, j)) * curvature / j00 + p[0] * s / j00;
            let rhs = p[j] * mag(z[j]).powf(p[j] - 2.0) * (1.0 - mag(z[j]) * curvature);
            m3 = m3.min(rhs - lhs);
        }
        margins.push(finite_margin(m3));
    }

    // (4) for the coupling direction
    let mut lhs4 = 0.0;
    for &j in &dirs {
        let jjj = mag(jac.get(j, j));
        let coupling_second = mag(t.get(j, k0, k0)) / jjj;
        let coupling_first = mag(jac.get(j, k0)) / jjj;
        lhs4 += p[j] * coupling_second;
        lhs4 += p[j] * coupling_first * k_curvature;
        lhs4 += p[0] * coupling_second * mag(jac.get(0, j)) / j00;
        lhs4 += p[0] * coupling_first * k_curvature * mag(jac.get(0, j)) / j00;
    }
    let s: f64 = (0..n).map(|l| mag(t.get(0, l, k0))).sum();
    lhs4 += p[0] * s / j00;
    lhs4 += p[0] * k_curvature * mag(jac.get(0, k0)) / j00;
    let rhs4 = (1.0 - mag(z[k0]) * k_curvature) * p[k0] * mag(z[k0]).powf(p[k0] - 2.0);
    margins.push(finite_margin(rhs4 - lhs4));

    margins
}

/// Checks the k-coupled condition system; `coupling` is the 1-based index of
/// the coordinate the off-diagonal tails share.
pub fn check_theorem3(
    dom: &DomainSpec,
    spec: &MappingSpec,
    coupling: usize,
    samples: usize,
    seed: u64,
    threads: usize,
) -> Result<CheckReport> {
    check_theorem3_with_probes(dom, spec, coupling, samples, seed, threads, &[])
}

pub fn check_theorem3_with_probes(
    dom: &DomainSpec,
    spec: &MappingSpec,
    coupling: usize,
    samples: usize,
    seed: u64,
    threads: usize,
    extra_points: &[ComplexVector],
) -> Result<CheckReport> {
    dom.require_criterion_exponents()?;
    require_same_dims(dom, spec)?;
    if coupling < 2 || coupling > dom.n() {
        return Err(Error::ParamOutOfRange(format!(
            "coupling index must satisfy 2 <= k <= n, got k = {coupling}"
        )));
    }
    let k0 = coupling - 1;
    require_shape_t3(spec, k0)?;
    let n = dom.n();
    let mut ids: Vec<String> = vec!["T3.1".into(), "T3.2".into()];
    if (1..n).any(|j| j != k0) {
        ids.push("T3.3".into());
    }
    ids.push("T3.4".into());
    let p = dom.exponents().to_vec();
    let notes = vec![
        "T3.3 ranges over every direction except the coupling coordinate, including the last \
         one when k < n."
            .into(),
    ];
    Ok(run_sampled_check(
        "T3",
        dom,
        samples,
        seed,
        threads,
        ids,
        extra_points,
        notes,
        move |z| t3_margins(&p, k0, z, &derivatives(spec, z)),
    ))
}

// ---------------------------------------------------------------------------
// Theorem 4: the quadratic family on the two-dimensional equal-exponent ball
// ---------------------------------------------------------------------------

/// Evaluates the two coefficient inequalities of the quadratic family.
/// Point-free and deterministic: repeated calls return identical reports.
pub fn check_theorem4(spec: &MappingSpec) -> Result<CheckReport> {
    let Family::Theorem4Quadratic { a1, a2, a1p, a2p } = spec.family() else {
        return Err(Error::ShapeMismatch(
            "T4 applies to the quadratic family only".into(),
        ));
    };
    let (a1, a2, a1p, a2p) = (a1.norm(), a2.norm(), a1p.norm(), a2p.norm());
    let lhs_first = 4.0 * a1
        + 2.0 * a2p
        + 8.0 * a1 * a2p
        + 2.0 * a2
        + 4.0 * a1 * a2
        + 8.0 * a1p * a2
        + 4.0 * a1 * a2;
    let lhs_second = 2.0 * a1
        + 2.0 * a1p
        + 4.0 * a1p * a2p
        + 4.0 * a2p
        + 8.0 * a1 * a2p
        + 4.0 * a1p * a2p
        + 8.0 * a1p * a2;
    let margins = vec![
        ConditionMargin {
            condition_id: "T4.1".into(),
            margin: 1.0 - lhs_first,
            witness_z: None,
        },
        ConditionMargin {
            condition_id: "T4.2".into(),
            margin: 1.0 - lhs_second,
            witness_z: None,
        },
    ];
    let notes = vec![
        "T4 conditions are exponent-free; corroborate p > 2 domains with a criterion scan \
         (flat axis points leave no curvature margin there)."
            .into(),
    ];
    Ok(CheckReport::from_margins("T4", margins, 0, 0, notes))
}

// ---------------------------------------------------------------------------
// Example validators: exact arithmetic on the displayed coefficient bounds
// ---------------------------------------------------------------------------

fn require_ordered_exponents(p: &[f64]) -> Result<()> {
    if p[0] < 2.0 {
        return Err(Error::ParamOutOfRange(format!(
            "p_1 = {} must be >= 2",
            p[0]
        )));
    }
    for (j, &pj) in p.iter().enumerate().skip(1) {
        if pj < p[0] {
            return Err(Error::ParamOutOfRange(format!(
                "exponent ordering violated: p_{} = {pj} < p_1 = {}",
                j + 1,
                p[0]
            )));
        }
    }
    Ok(())
}

fn require_k_bracket(p: &[f64], k: u32) -> Result<()> {
    let pmax = p.iter().copied().fold(0.0, f64::max);
    let kf = k as f64;
    if !(kf < pmax && pmax <= kf + 1.0) {
        return Err(Error::ParamOutOfRange(format!(
            "k = {k} must satisfy k < max p_j <= k + 1 (max p_j = {pmax})"
        )));
    }
    Ok(())
}

fn max_mag(coeffs: &[Complex64]) -> f64 {
    coeffs.iter().map(|a| a.norm()).fold(0.0, f64::max)
}

/// Shared tail inequality of the first two example families:
/// `[(p_1 + p_2)/(1 - 2a) + p_1 (k+1) a / (1 - 2a)^2] |a_j| <= rhs_j`.
fn quadratic_family_tail_margins(
    p: &[f64],
    a: f64,
    k: u32,
    coeffs: &[Complex64],
    rhs_for: impl Fn(usize, f64) -> f64,
) -> Option<f64> {
    let n = p.len();
    if n < 3 {
        return None;
    }
    let kf = k as f64;
    let denom = 1.0 - 2.0 * a;
    let factor = (p[0] + p[1]) / denom + p[0] * (kf + 1.0) * a / (denom * denom);
    let mut worst = f64::INFINITY;
    for j in 2..n {
        let aj = coeffs[j].norm();
        let rhs = rhs_for(j, aj);
        worst = worst.min(finite_margin(rhs - factor * aj));
    }
    Some(worst)
}

/// Validates the coefficient bounds of the exponential-tail family E1:
/// `a <= (1 - |lambda|) / ((k+1)^2 + 4)` plus the per-coordinate tail
/// inequality.
pub fn validate_example1(dom: &DomainSpec, spec: &MappingSpec) -> Result<CheckReport> {
    require_same_dims(dom, spec)?;
    let Family::Example1 { a, lambda, k } = spec.family() else {
        return Err(Error::ShapeMismatch(
            "validator E1 expects the example1 family".into(),
        ));
    };
    let p = dom.exponents();
    require_ordered_exponents(p)?;
    require_k_bracket(p, *k)?;
    let lam = lambda.norm();
    let kf = *k as f64;
    let amax = max_mag(a);

    let bound = (1.0 - lam) / ((kf + 1.0) * (kf + 1.0) + 4.0);
    let mut margins = vec![ConditionMargin {
        condition_id: "E1.1".into(),
        margin: bound - amax,
        witness_z: None,
    }];
    if let Some(m) = quadratic_family_tail_margins(p, amax, *k, a, |j, _| {
        p[j] * (1.0 - lam) / ((kf + 1.0) * (kf + lam))
    }) {
        margins.push(ConditionMargin {
            condition_id: "E1.2".into(),
            margin: m,
            witness_z: None,
        });
    }
    Ok(CheckReport::from_margins("E1", margins, 0, 0, Vec::new()))
}

/// Validates the all-polynomial family E2: `a <= 1 / ((k+1)^2 + 4)` plus the
/// tail inequality with `2|a_j| / (1 - 2|a_j|)` in place of `|lambda|`.
pub fn validate_example2(dom: &DomainSpec, spec: &MappingSpec) -> Result<CheckReport> {
    require_same_dims(dom, spec)?;
    let Family::Example2 { a, k } = spec.family() else {
        return Err(Error::ShapeMismatch(
            "validator E2 expects the example2 family".into(),
        ));
    };
    let p = dom.exponents();
    require_ordered_exponents(p)?;
    require_k_bracket(p, *k)?;
    let kf = *k as f64;
    let amax = max_mag(a);

    let bound = 1.0 / ((kf + 1.0) * (kf + 1.0) + 4.0);
    let mut margins = vec![ConditionMargin {
        condition_id: "E2.1".into(),
        margin: bound - amax,
        witness_z: None,
    }];
    if let Some(m) = quadratic_family_tail_margins(p, amax, *k, a, |j, aj| {
        let mu = 2.0 * aj / (1.0 - 2.0 * aj);
        p[j] * (1.0 - mu) / ((kf + 1.0) * (kf + mu))
    }) {
        margins.push(ConditionMargin {
            condition_id: "E2.2".into(),
            margin: m,
            witness_z: None,
        });
    }
    let notes = vec![
        "E2: second-component tail read as sum_j a_j z_j^2; the repeated-z_3 variant is \
         rejected as an index typo."
            .into(),
        "E2: the quadratic tail has constant curvature in the later coordinates; for \
         max p_j > 2 corroborate with a condition check or a criterion scan."
            .into(),
    ];
    Ok(CheckReport::from_margins("E2", margins, 0, 0, notes))
}

/// Shared second inequality of the coupled-tail families E3 and E4, with
/// `mu` standing for `|lambda|` (E3) or `2|a_n| / (1 - 2|a_n|)` (E4).
fn coupled_tail_margins(p: &[f64], k: u32, tail: &[Complex64], mu: f64) -> (f64, f64) {
    let n = p.len();
    let kf = k as f64;
    let amax = max_mag(tail);
    let mut middle_sum = 0.0;
    let mut middle_ratio_sum = 0.0;
    for (i, aj) in tail.iter().enumerate().take(n.saturating_sub(2)) {
        // tail[i] couples coordinate i + 1 (middle components only).
        let a = aj.norm();
        middle_sum += p[i + 1] * a / (1.0 - a);
        middle_ratio_sum += a / (1.0 - a);
    }
    let lhs = middle_sum + amax * p[0] / (1.0 - amax) * (1.0 + (kf + 1.0) * middle_ratio_sum);
    let rhs = p[n - 1] * (1.0 - mu) / ((kf + 1.0) * (kf + 1.0 + mu));
    (amax, finite_margin(rhs - lhs))
}

/// Validates the coupled family E3 with exponential tail:
/// `a <= (1 - |lambda|) / (2(k+1)^2 (k+1+|lambda|) + 1 + |lambda|)` plus the
/// aggregate tail inequality.
pub fn validate_example3(dom: &DomainSpec, spec: &MappingSpec) -> Result<CheckReport> {
    require_same_dims(dom, spec)?;
    let Family::Example3 { a_tail, lambda, k } = spec.family() else {
        return Err(Error::ShapeMismatch(
            "validator E3 expects the example3 family".into(),
        ));
    };
    let p = dom.exponents();
    require_ordered_exponents(p)?;
    require_k_bracket(p, *k)?;
    let lam = lambda.norm();
    let kf = *k as f64;

    let bound = (1.0 - lam) / (2.0 * (kf + 1.0) * (kf + 1.0) * (kf + 1.0 + lam) + 1.0 + lam);
    let (amax, tail_margin) = coupled_tail_margins(p, *k, a_tail, lam);
    let margins = vec![
        ConditionMargin {
            condition_id: "E3.1".into(),
            margin: bound - amax,
            witness_z: None,
        },
        ConditionMargin {
            condition_id: "E3.2".into(),
            margin: tail_margin,
            witness_z: None,
        },
    ];
    let notes = vec![
        "E3.1 uses the +1+|lambda| denominator, the stricter of the two displayed variants.".into(),
    ];
    Ok(CheckReport::from_margins("E3", margins, 0, 0, notes))
}

/// Validates the coupled family E4, where `mu = 2|a_n| / (1 - 2|a_n|)` plays
/// the role of `|lambda|`. Requires `0 < |a_n| <= 1/4`.
pub fn validate_example4(dom: &DomainSpec, spec: &MappingSpec) -> Result<CheckReport> {
    require_same_dims(dom, spec)?;
    let Family::Example4 { a_tail, k } = spec.family() else {
        return Err(Error::ShapeMismatch(
            "validator E4 expects the example4 family".into(),
        ));
    };
    let p = dom.exponents();
    require_ordered_exponents(p)?;
    require_k_bracket(p, *k)?;
    let an = a_tail.last().expect("family has n >= 2").norm();
    if !(an > 0.0 && an <= 0.25) {
        return Err(Error::ParamOutOfRange(format!(
            "E4 requires 0 < |a_n| <= 1/4, got |a_n| = {an}"
        )));
    }
    let kf = *k as f64;
    let mu = 2.0 * an / (1.0 - 2.0 * an);

    let bound = (1.0 - mu) / (2.0 * (kf + 1.0) * (kf + 1.0) * (kf + 1.0 + mu) + 1.0 - mu);
    let (amax, tail_margin) = coupled_tail_margins(p, *k, a_tail, mu);
    let margins = vec![
        ConditionMargin {
            condition_id: "E4.1".into(),
            margin: bound - amax,
            witness_z: None,
        },
        ConditionMargin {
            condition_id: "E4.2".into(),
            margin: tail_margin,
            witness_z: None,
        },
    ];
    let notes = vec![
        "E4: second component read as z_2 + a_2 z_2 z_n^{k+1}, uniform with its siblings.".into(),
    ];
    Ok(CheckReport::from_margins("E4", margins, 0, 0, notes))
}
