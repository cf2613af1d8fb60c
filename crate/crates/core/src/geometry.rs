//! The domain `D_p^n = { z : sum_j |z_j|^{p_j} < 1 }`: Minkowski functional,
//! its conjugate-Wirtinger gradient, membership, and interior sampling.
//!
//! For `z != 0` the Minkowski functional `rho(z)` is the unique positive root
//! of the strictly decreasing map `g(t) = sum_j |z_j / t|^{p_j} = 1`. The root
//! is bracketed by `max_j |z_j| <= rho(z) <= n^(1/min_j p_j) * max_j |z_j|`
//! (termwise comparison forces both bounds), located by bisection and then
//! polished with Newton steps.

use num_complex::Complex64;
use rand::Rng;

use crate::numerics::{sample_complex_gaussian, ComplexVector};
use crate::{Error, Result};

/// Absolute tolerance on the root of the defining equation.
const ROOT_TOL: f64 = 1e-12;

/// The exponent vector defining `D_p^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainSpec {
    p: Vec<f64>,
}

impl DomainSpec {
    /// Requires every exponent to be finite and strictly greater than 1.
    pub fn new(p: Vec<f64>) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::InvalidDomain("exponent vector is empty".into()));
        }
        for (j, &pj) in p.iter().enumerate() {
            if !pj.is_finite() {
                return Err(Error::InvalidDomain(format!("p_{} is not finite", j + 1)));
            }
            if pj <= 1.0 {
                return Err(Error::InvalidDomain(format!(
                    "p_{} = {pj} must be > 1",
                    j + 1
                )));
            }
        }
        Ok(Self { p })
    }

    /// Equal-exponent ball `B^n_p`.
    pub fn ball(n: usize, p: f64) -> Result<Self> {
        Self::new(vec![p; n])
    }

    pub fn n(&self) -> usize {
        self.p.len()
    }

    pub fn exponents(&self) -> &[f64] {
        &self.p
    }

    pub fn min_exponent(&self) -> f64 {
        self.p.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_exponent(&self) -> f64 {
        self.p.iter().copied().fold(0.0, f64::max)
    }

    /// The criterion and the theorem checkers are stated for p_j >= 2 only.
    pub fn require_criterion_exponents(&self) -> Result<()> {
        for (j, &pj) in self.p.iter().enumerate() {
            if pj < 2.0 {
                return Err(Error::UnsupportedExponent {
                    index: j + 1,
                    value: pj,
                });
            }
        }
        Ok(())
    }

    fn check_point(&self, z: &ComplexVector) -> Result<()> {
        if z.len() != self.n() {
            return Err(Error::DimensionMismatch {
                left: self.n(),
                right: z.len(),
            });
        }
        if !z.is_finite() {
            return Err(Error::NonFiniteInput);
        }
        Ok(())
    }
}

/// Value of the Minkowski functional together with the defect of the
/// defining equation at the returned root.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RhoResult {
    pub rho: f64,
    /// `sum_j |z_j / rho|^{p_j} - 1`; zero by convention when `rho = 0`.
    pub residual: f64,
}

fn defining_sum(p: &[f64], z: &ComplexVector, t: f64) -> f64 {
    p.iter()
        .zip(z.iter())
        .map(|(&pj, zj)| (zj.norm() / t).powf(pj))
        .sum()
}

fn weighted_sum(p: &[f64], z: &ComplexVector, t: f64) -> f64 {
    p.iter()
        .zip(z.iter())
        .map(|(&pj, zj)| pj * (zj.norm() / t).powf(pj))
        .sum()
}

/// Minkowski functional of `D_p^n` at `z`.
pub fn minkowski(dom: &DomainSpec, z: &ComplexVector) -> Result<RhoResult> {
    dom.check_point(z)?;
    let p = dom.exponents();
    let m = z.norm_inf();
    if m == 0.0 {
        return Ok(RhoResult {
            rho: 0.0,
            residual: 0.0,
        });
    }

    let mut lo = m;
    let mut hi = m * (dom.n() as f64).powf(1.0 / dom.min_exponent());
    // g is strictly decreasing, g(lo) >= 1 >= g(hi).
    for _ in 0..80 {
        if hi - lo <= ROOT_TOL * lo.max(1.0) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if defining_sum(p, z, mid) >= 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    // Newton polish: g'(t) = -(1/t) sum_j p_j |z_j/t|^{p_j}.
    let mut t = 0.5 * (lo + hi);
    for _ in 0..8 {
        let h = defining_sum(p, z, t) - 1.0;
        let w = weighted_sum(p, z, t);
        if w == 0.0 {
            break;
        }
        let step = h * t / w;
        let t_next = (t + step).clamp(lo, hi);
        let done = (t_next - t).abs() <= f64::EPSILON * t;
        t = t_next;
        if done || h.abs() < 1e-15 {
            break;
        }
    }

    Ok(RhoResult {
        rho: t,
        residual: defining_sum(p, z, t) - 1.0,
    })
}

/// Gradient of `rho` with respect to the conjugated coordinates:
/// component `l` is `p_l |z_l|^{p_l} / (2 conj(z_l) rho^{p_l - 1} S)` with
/// `S = sum_j p_j |z_j/rho|^{p_j}`, extended by 0 where `z_l = 0`.
pub fn rho_bar_gradient(dom: &DomainSpec, z: &ComplexVector) -> Result<ComplexVector> {
    dom.check_point(z)?;
    if z.is_zero() {
        return Err(Error::ZeroPoint);
    }
    let rho = minkowski(dom, z)?.rho;
    let s = weighted_sum(dom.exponents(), z, rho);
    let grad = dom
        .exponents()
        .iter()
        .zip(z.iter())
        .map(|(&pl, zl)| {
            if zl.re == 0.0 && zl.im == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                // |z_l|^{p_l} / conj(z_l) = z_l |z_l|^{p_l - 2}
                zl * pl * zl.norm().powf(pl - 2.0) / (2.0 * rho.powf(pl - 1.0) * s)
            }
        })
        .collect();
    Ok(grad)
}

/// Strict membership `sum_j |z_j|^{p_j} < 1`.
pub fn contains(dom: &DomainSpec, z: &ComplexVector) -> bool {
    if z.len() != dom.n() || !z.is_finite() {
        return false;
    }
    defining_sum(dom.exponents(), z, 1.0) < 1.0
}

/// Draws a point with `rho_floor < rho(z) < 1`: the direction comes from a
/// normalized complex Gaussian and the radius is uniform on `(rho_floor, 1)`,
/// concentrating draws where the criterion is tightest.
pub fn sample_interior<R: Rng + ?Sized>(
    dom: &DomainSpec,
    rng: &mut R,
    rho_floor: f64,
) -> ComplexVector {
    assert!(
        (0.0..1.0).contains(&rho_floor),
        "rho_floor must lie in [0, 1)"
    );
    loop {
        let w = sample_complex_gaussian(dom.n(), rng);
        let rho_w = match minkowski(dom, &w) {
            Ok(r) => r.rho,
            Err(_) => continue,
        };
        if rho_w <= 1e-12 {
            continue;
        }
        let u: f64 = rng.random_range(0.0..1.0);
        if u == 0.0 {
            continue;
        }
        let r = rho_floor + (1.0 - rho_floor) * u;
        return w.scaled(Complex64::new(r / rho_w, 0.0));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::task::derived_rng;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn dom(p: &[f64]) -> DomainSpec {
        DomainSpec::new(p.to_vec()).unwrap()
    }

    fn v(entries: &[Complex64]) -> ComplexVector {
        ComplexVector::new(entries.to_vec())
    }

    /// Independent scalar oracle: plain bisection on the defining equation,
    /// run far past the library's tolerance.
    fn rho_bisect_oracle(p: &[f64], z: &ComplexVector) -> f64 {
        let m = z.norm_inf();
        if m == 0.0 {
            return 0.0;
        }
        let pmin = p.iter().copied().fold(f64::INFINITY, f64::min);
        let (mut lo, mut hi) = (m, m * (p.len() as f64).powf(1.0 / pmin));
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let g: f64 = p
                .iter()
                .zip(z.iter())
                .map(|(&pj, zj)| (zj.norm() / mid).powf(pj))
                .sum();
            if g >= 1.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Conjugate-Wirtinger finite differences of the Minkowski functional.
    fn gradient_fd_oracle(d: &DomainSpec, z: &ComplexVector, h: f64) -> ComplexVector {
        let rho_at = |pt: &ComplexVector| minkowski(d, pt).unwrap().rho;
        (0..z.len())
            .map(|l| {
                let mut zp = z.clone();
                let mut zm = z.clone();
                zp[l] += c(h, 0.0);
                zm[l] -= c(h, 0.0);
                let dx = (rho_at(&zp) - rho_at(&zm)) / (2.0 * h);
                let mut zp = z.clone();
                let mut zm = z.clone();
                zp[l] += c(0.0, h);
                zm[l] -= c(0.0, h);
                let dy = (rho_at(&zp) - rho_at(&zm)) / (2.0 * h);
                0.5 * c(dx, dy)
            })
            .collect()
    }

    #[test]
    fn rho_of_zero_is_zero() {
        let d = dom(&[2.0, 2.0]);
        let r = minkowski(&d, &ComplexVector::zeros(2)).unwrap();
        assert_eq!(r.rho, 0.0);
        assert_eq!(r.residual, 0.0);
    }

    #[test]
    fn rho_is_euclidean_norm_for_p_two() {
        let d = dom(&[2.0, 2.0]);
        let r = minkowski(&d, &v(&[c(0.6, 0.0), c(0.0, 0.8)])).unwrap();
        assert!((r.rho - 1.0).abs() < 1e-12);
        assert!(r.residual.abs() < 1e-10);
    }

    #[test]
    fn rho_matches_bisection_oracle() {
        let d = dom(&[2.0, 4.0]);
        let z = v(&[c(0.5, 0.0), c(0.5, 0.0)]);
        let expected = rho_bisect_oracle(d.exponents(), &z);
        let r = minkowski(&d, &z).unwrap();
        assert!((r.rho - expected).abs() < 1e-10);
        assert!(r.residual.abs() < 1e-10);
    }

    #[test]
    fn rho_rejects_non_finite_points() {
        let d = dom(&[2.0, 2.0]);
        let z = v(&[c(f64::NAN, 0.0), c(0.0, 0.0)]);
        assert!(matches!(minkowski(&d, &z), Err(Error::NonFiniteInput)));
    }

    #[test]
    fn defining_residual_and_bracket_on_random_points() {
        let mut rng = derived_rng(11, 0);
        for trial in 0..10_000 {
            let n = 1 + trial % 6;
            let p: Vec<f64> = (0..n).map(|_| rng.random_range(2.0..6.0)).collect();
            let d = dom(&p);
            let z = sample_complex_gaussian(n, &mut rng);
            let r = minkowski(&d, &z).unwrap();
            assert!(r.residual.abs() <= 1e-10, "residual {:.3e}", r.residual);
            let m = z.norm_inf();
            let hi = m * (n as f64).powf(1.0 / d.min_exponent());
            assert!(m <= r.rho * (1.0 + 1e-12) && r.rho <= hi * (1.0 + 1e-12));
        }
    }

    #[test]
    fn homogeneity_under_complex_scaling() {
        let mut rng = derived_rng(12, 0);
        let d = dom(&[2.0, 3.0, 4.5]);
        let lambdas = [c(0.5, 0.0), c(2.0, 0.0), c(0.0, 1.0), c(-1.0, 1.0)];
        for _ in 0..200 {
            let z = sample_complex_gaussian(3, &mut rng);
            let rho = minkowski(&d, &z).unwrap().rho;
            for lam in lambdas {
                let scaled = z.scaled(lam);
                let rho_scaled = minkowski(&d, &scaled).unwrap().rho;
                assert!(
                    (rho_scaled - lam.norm() * rho).abs() <= 1e-10,
                    "homogeneity defect {:.3e}",
                    (rho_scaled - lam.norm() * rho).abs()
                );
            }
        }
    }

    #[test]
    fn gradient_euclidean_case() {
        let d = dom(&[2.0, 2.0]);
        let g = rho_bar_gradient(&d, &v(&[c(0.3, 0.0), c(0.4, 0.0)])).unwrap();
        assert!((g[0] - c(0.3, 0.0)).norm() < 1e-12);
        assert!((g[1] - c(0.4, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn gradient_vanishing_coordinate() {
        let d = dom(&[2.0, 4.0]);
        let g = rho_bar_gradient(&d, &v(&[c(0.5, 0.0), c(0.0, 0.0)])).unwrap();
        assert_eq!(g[1], c(0.0, 0.0));
    }

    #[test]
    fn gradient_rejects_zero_point() {
        let d = dom(&[2.0, 4.0]);
        assert!(matches!(
            rho_bar_gradient(&d, &ComplexVector::zeros(2)),
            Err(Error::ZeroPoint)
        ));
    }

    #[test]
    fn gradient_matches_wirtinger_finite_differences() {
        let d = dom(&[2.0, 4.0]);
        let z = v(&[c(0.5, 0.0), c(0.3, 0.2)]);
        let g = rho_bar_gradient(&d, &z).unwrap();
        let fd = gradient_fd_oracle(&d, &z, 1e-6);
        for l in 0..2 {
            let denom = fd[l].norm().max(1e-12);
            assert!(
                (g[l] - fd[l]).norm() / denom <= 1e-6,
                "component {l}: {} vs {}",
                g[l],
                fd[l]
            );
        }
    }

    #[test]
    fn gradient_matches_finite_differences_on_random_points() {
        let mut rng = derived_rng(13, 0);
        let mut tested = 0;
        while tested < 300 {
            let n = 2 + tested % 3;
            let p: Vec<f64> = (0..n).map(|_| rng.random_range(2.0..6.0)).collect();
            let d = dom(&p);
            let z = sample_interior(&d, &mut rng, 0.2);
            if z.iter().any(|zj| zj.norm() <= 1e-3) {
                continue;
            }
            let g = rho_bar_gradient(&d, &z).unwrap();
            let fd = gradient_fd_oracle(&d, &z, 1e-6);
            // vector-relative: tiny components sit below the oracle's own
            // absolute error floor
            let err = g.sub(&fd).norm();
            assert!(
                err <= 1e-6 * fd.norm().max(1e-9),
                "n={n}: |g - fd| = {err:.3e}, |fd| = {:.3e}",
                fd.norm()
            );
            tested += 1;
        }
    }

    #[test]
    fn contains_examples() {
        let d22 = dom(&[2.0, 2.0]);
        assert!(contains(&d22, &ComplexVector::zeros(2)));
        assert!(!contains(&d22, &v(&[c(1.0, 0.0), c(0.0, 0.0)])));
        let d33 = dom(&[3.0, 3.0]);
        assert!(contains(&d33, &v(&[c(0.7, 0.0), c(0.7, 0.0)])));
    }

    #[test]
    fn containment_matches_rho_less_than_one() {
        let mut rng = derived_rng(14, 0);
        let d = dom(&[2.0, 3.0, 4.0]);
        for _ in 0..2000 {
            let w = sample_complex_gaussian(3, &mut rng);
            let scale: f64 = rng.random_range(0.0..1.4);
            let rho_w = minkowski(&d, &w).unwrap().rho;
            if rho_w == 0.0 {
                continue;
            }
            let z = w.scaled(c(scale / rho_w, 0.0));
            let rho = minkowski(&d, &z).unwrap().rho;
            if (rho - 1.0).abs() <= 1e-9 {
                continue; // boundary shell excluded
            }
            assert_eq!(contains(&d, &z), rho < 1.0);
        }
    }

    #[test]
    fn interior_samples_respect_floor_and_membership() {
        let d = dom(&[2.0, 3.0]);
        let mut rng = derived_rng(15, 0);
        for _ in 0..500 {
            let z = sample_interior(&d, &mut rng, 0.3);
            let rho = minkowski(&d, &z).unwrap().rho;
            assert!(contains(&d, &z));
            assert!(rho > 0.3 && rho < 1.0, "rho = {rho}");
        }
    }

    #[test]
    fn interior_sampling_is_deterministic() {
        let d = dom(&[2.0, 2.0, 2.0]);
        let mut r1 = derived_rng(99, 3);
        let mut r2 = derived_rng(99, 3);
        for _ in 0..10 {
            assert_eq!(
                sample_interior(&d, &mut r1, 0.1),
                sample_interior(&d, &mut r2, 0.1)
            );
        }
    }

    #[test]
    fn interior_radial_law_mean() {
        let d = dom(&[2.0, 4.0]);
        let mut rng = derived_rng(16, 0);
        let mut sum = 0.0;
        let count = 10_000;
        for _ in 0..count {
            sum += minkowski(&d, &sample_interior(&d, &mut rng, 0.0))
                .unwrap()
                .rho;
        }
        let mean = sum / count as f64;
        assert!((mean - 0.5).abs() <= 0.02, "mean rho = {mean}");
    }
}
