//! Targeted minimization of `J_f` over the tangency manifold: multi-start
//! derivative-free simplex descent that either produces a concrete violation
//! witness or strengthens nonnegativity evidence.
//!
//! A point in search space is 4n reals: the first 2n parametrize the anchor
//! through a direction vector `v` and the radial squash
//! `r = floor + (ceiling - floor) * rho(v) / (1 + rho(v))`, `z = v * r/rho(v)`,
//! which sweeps the open shell `rho in (floor, ceiling)` without boundary
//! penalties. The last 2n reals give a raw direction that is re-projected
//! onto the tangency hyperplane of the current anchor at every evaluation
//! (the constraint twists with `z`) and normalized. Singular-Jacobian points
//! cost a flat penalty, steering the simplex away; they can never be
//! returned as witnesses.

use num_complex::Complex64;

use crate::criterion::{
    evaluate_j, project_tangent, scan_detailed, tangency, CriterionEvaluation, ScanReport,
};
use crate::geometry::{minkowski, DomainSpec};
use crate::mappings::MappingSpec;
use crate::numerics::ComplexVector;
use crate::task;
use crate::{Error, Result};

/// Objective value charged for singular or otherwise unusable points.
const PENALTY: f64 = 1e6;

/// Multi-start search parameters.
#[derive(Debug, Clone)]
pub struct SearchConfig {
    pub restarts: usize,
    pub iterations: usize,
    pub seed: u64,
    pub rho_floor: f64,
    pub rho_ceiling: f64,
    pub simplex_tol: f64,
    pub threads: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            restarts: 50,
            iterations: 500,
            seed: 42,
            rho_floor: 0.05,
            rho_ceiling: 0.95,
            simplex_tol: 1e-10,
            threads: 1,
        }
    }
}

impl SearchConfig {
    fn validate(&self) -> Result<()> {
        if self.restarts == 0 || self.iterations == 0 {
            return Err(Error::ParamOutOfRange(
                "restarts and iterations must be >= 1".into(),
            ));
        }
        if !(self.rho_floor > 0.0 && self.rho_floor < self.rho_ceiling && self.rho_ceiling < 1.0) {
            return Err(Error::ParamOutOfRange(format!(
                "need 0 < rho_floor < rho_ceiling < 1, got ({}, {})",
                self.rho_floor, self.rho_ceiling
            )));
        }
        Ok(())
    }
}

/// Best violation candidate found by a search.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    pub min_j: f64,
    pub witness: CriterionEvaluation,
    pub restarts_converged: usize,
    pub singular_hits: usize,
}

/// Scan-plus-search verdict.
#[derive(Debug, Clone)]
pub struct CampaignReport {
    pub scan: ScanReport,
    pub search: SearchResult,
    pub min_j: f64,
    pub violation_found: bool,
    pub tol: f64,
}

struct Probe<'a> {
    dom: &'a DomainSpec,
    spec: &'a MappingSpec,
    floor: f64,
    ceiling: f64,
}

enum ProbeOutcome {
    Valid(CriterionEvaluation),
    Singular,
    Degenerate,
}

impl Probe<'_> {
    fn pair_from_params(&self, x: &[f64]) -> Option<(ComplexVector, ComplexVector)> {
        let n = self.dom.n();
        let v: ComplexVector = (0..n)
            .map(|i| Complex64::new(x[2 * i], x[2 * i + 1]))
            .collect();
        if !v.is_finite() {
            return None;
        }
        let rho_v = minkowski(self.dom, &v).ok()?.rho;
        if rho_v < 1e-12 {
            return None;
        }
        let r = self.floor + (self.ceiling - self.floor) * rho_v / (1.0 + rho_v);
        let z = v.scaled(Complex64::new(r / rho_v, 0.0));

        let tc = tangency(self.dom, &z).ok()?;
        let raw: ComplexVector = (0..n)
            .map(|i| Complex64::new(x[2 * n + 2 * i], x[2 * n + 2 * i + 1]))
            .collect();
        if !raw.is_finite() {
            return None;
        }
        let projected = project_tangent(&tc, &raw).ok()?;
        let norm = projected.norm();
        if norm < 1e-10 {
            return None;
        }
        Some((z, projected.scaled(Complex64::new(1.0 / norm, 0.0))))
    }

    fn eval(&self, x: &[f64]) -> ProbeOutcome {
        let Some((z, b)) = self.pair_from_params(x) else {
            return ProbeOutcome::Degenerate;
        };
        match evaluate_j(self.dom, self.spec, &z, &b) {
            Ok(eval) => ProbeOutcome::Valid(eval),
            Err(Error::SingularJacobian) => ProbeOutcome::Singular,
            Err(_) => ProbeOutcome::Degenerate,
        }
    }

    /// Inverse of the radial squash, for warm starts: parameters whose anchor
    /// reproduces `z` (with rho clamped into the open shell) and whose raw
    /// direction is `b`.
    fn params_from_pair(&self, z: &ComplexVector, b: &ComplexVector) -> Option<Vec<f64>> {
        let rho_z = minkowski(self.dom, z).ok()?.rho;
        if rho_z <= 0.0 {
            return None;
        }
        let pad = 1e-6 * (self.ceiling - self.floor);
        let r = rho_z.clamp(self.floor + pad, self.ceiling - pad);
        let target = (r - self.floor) / (self.ceiling - r);
        let v = z.scaled(Complex64::new(target / rho_z, 0.0));
        let mut x = Vec::with_capacity(4 * z.len());
        for entry in v.iter() {
            x.push(entry.re);
            x.push(entry.im);
        }
        for entry in b.iter() {
            x.push(entry.re);
            x.push(entry.im);
        }
        Some(x)
    }
}

/// Standard Nelder-Mead with adaptive bookkeeping of the best valid point.
/// Returns whether the simplex spread met `tol` within the iteration budget.
fn nelder_mead<F>(mut f: F, x0: &[f64], step: f64, iterations: usize, tol: f64) -> bool
where
    F: FnMut(&[f64]) -> f64,
{
    let dim = x0.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    let fx0 = f(x0);
    simplex.push((x0.to_vec(), fx0));
    for i in 0..dim {
        let mut xi = x0.to_vec();
        xi[i] += step;
        let fxi = f(&xi);
        simplex.push((xi, fxi));
    }

    for _ in 0..iterations {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].1;
        let worst = simplex[dim].1;
        if (worst - best).abs() <= tol * (best.abs() + tol) {
            return true;
        }

        let mut centroid = vec![0.0; dim];
        for (x, _) in simplex.iter().take(dim) {
            for (c, xi) in centroid.iter_mut().zip(x.iter()) {
                *c += xi / dim as f64;
            }
        }
        let worst_x = simplex[dim].0.clone();
        let reflect: Vec<f64> = centroid
            .iter()
            .zip(worst_x.iter())
            .map(|(c, w)| c + (c - w))
            .collect();
        let f_reflect = f(&reflect);

        if f_reflect < best {
            let expand: Vec<f64> = centroid
                .iter()
                .zip(worst_x.iter())
                .map(|(c, w)| c + 2.0 * (c - w))
                .collect();
            let f_expand = f(&expand);
            simplex[dim] = if f_expand < f_reflect {
                (expand, f_expand)
            } else {
                (reflect, f_reflect)
            };
        } else if f_reflect < simplex[dim - 1].1 {
            simplex[dim] = (reflect, f_reflect);
        } else {
            let (contract, f_contract) = if f_reflect < worst {
                let outside: Vec<f64> = centroid
                    .iter()
                    .zip(reflect.iter())
                    .map(|(c, r)| c + 0.5 * (r - c))
                    .collect();
                let fo = f(&outside);
                (outside, fo)
            } else {
                let inside: Vec<f64> = centroid
                    .iter()
                    .zip(worst_x.iter())
                    .map(|(c, w)| c + 0.5 * (w - c))
                    .collect();
                let fi = f(&inside);
                (inside, fi)
            };
            if f_contract < worst.min(f_reflect) {
                simplex[dim] = (contract, f_contract);
            } else {
                let best_x = simplex[0].0.clone();
                for entry in simplex.iter_mut().skip(1) {
                    let shrunk: Vec<f64> = best_x
                        .iter()
                        .zip(entry.0.iter())
                        .map(|(b, x)| b + 0.5 * (x - b))
                        .collect();
                    let fs = f(&shrunk);
                    *entry = (shrunk, fs);
                }
            }
        }
    }
    false
}

struct RestartOutcome {
    best: Option<(f64, CriterionEvaluation)>,
    converged: bool,
    singular: usize,
}

fn run_restart(probe: &Probe<'_>, x0: &[f64], iterations: usize, tol: f64) -> RestartOutcome {
    let mut best: Option<(f64, CriterionEvaluation)> = None;
    let mut singular = 0usize;
    let converged = {
        let objective = |x: &[f64]| -> f64 {
            match probe.eval(x) {
                ProbeOutcome::Valid(eval) => {
                    let j = eval.j_value;
                    if best.as_ref().is_none_or(|(bj, _)| j < *bj) {
                        best = Some((j, eval));
                    }
                    j
                }
                ProbeOutcome::Singular => {
                    singular += 1;
                    PENALTY
                }
                ProbeOutcome::Degenerate => PENALTY,
            }
        };
        nelder_mead(objective, x0, 0.5, iterations, tol)
    };
    RestartOutcome {
        best,
        converged,
        singular,
    }
}

fn minimize_with_warm_starts(
    dom: &DomainSpec,
    spec: &MappingSpec,
    cfg: &SearchConfig,
    warm: &[(ComplexVector, ComplexVector)],
) -> Result<SearchResult> {
    dom.require_criterion_exponents()?;
    if dom.n() != spec.n() {
        return Err(Error::DimensionMismatch {
            left: dom.n(),
            right: spec.n(),
        });
    }
    cfg.validate()?;
    let probe = Probe {
        dom,
        spec,
        floor: cfg.rho_floor,
        ceiling: cfg.rho_ceiling,
    };
    let dim = 4 * dom.n();

    let outcomes = task::run_indexed(cfg.restarts, cfg.threads, cfg.seed, |i, rng| {
        let x0 = warm
            .get(i)
            .and_then(|(z, b)| probe.params_from_pair(z, b))
            .unwrap_or_else(|| {
                use rand_distr::StandardNormal;
                (0..dim)
                    .map(|_| rand::Rng::sample(rng, StandardNormal))
                    .collect()
            });
        run_restart(&probe, &x0, cfg.iterations, cfg.simplex_tol)
    });

    let mut best: Option<(f64, CriterionEvaluation)> = None;
    let mut converged = 0usize;
    let mut singular = 0usize;
    // Restart order breaks ties, so the merge is order-independent.
    for outcome in outcomes {
        if outcome.converged {
            converged += 1;
        }
        singular += outcome.singular;
        if let Some((j, eval)) = outcome.best {
            if best.as_ref().is_none_or(|(bj, _)| j < *bj) {
                best = Some((j, eval));
            }
        }
    }
    let Some((min_j, witness)) = best else {
        return Err(Error::AllSamplesSingular);
    };
    Ok(SearchResult {
        min_j,
        witness,
        restarts_converged: converged,
        singular_hits: singular,
    })
}

/// Multi-start simplex minimization of `J_f` over the shell
/// `rho in (rho_floor, rho_ceiling)`. Deterministic for a fixed seed.
pub fn minimize_j(
    dom: &DomainSpec,
    spec: &MappingSpec,
    cfg: &SearchConfig,
) -> Result<SearchResult> {
    minimize_with_warm_starts(dom, spec, cfg, &[])
}

/// Runs a scan with 90% of the budget, then seeds the simplex search from the
/// ten worst scan samples with the remainder.
pub fn certify_campaign(
    dom: &DomainSpec,
    spec: &MappingSpec,
    budget: usize,
    seed: u64,
    rho_floor: f64,
    tol: f64,
    threads: usize,
) -> Result<CampaignReport> {
    if budget < 1000 {
        return Err(Error::ParamOutOfRange(format!(
            "campaign budget must be >= 1000, got {budget}"
        )));
    }
    let scan_samples = budget * 9 / 10;
    let (scan, worst) = scan_detailed(dom, spec, scan_samples, seed, rho_floor, tol, threads)?;

    let warm: Vec<(ComplexVector, ComplexVector)> =
        worst.iter().map(|e| (e.z.clone(), e.b.clone())).collect();
    let restarts = warm.len().max(1);
    let cfg = SearchConfig {
        restarts,
        iterations: ((budget - scan_samples) / restarts).max(50),
        seed,
        rho_floor: rho_floor.max(1e-3),
        rho_ceiling: 0.95f64.max(0.5 * (1.0 + rho_floor)),
        simplex_tol: 1e-10,
        threads,
    };
    let search = minimize_with_warm_starts(dom, spec, &cfg, &warm)?;

    let min_j = scan.min_j.min(search.min_j);
    Ok(CampaignReport {
        scan,
        search,
        min_j,
        violation_found: min_j < -tol,
        tol,
    })
}
