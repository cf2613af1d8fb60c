//! Built-in holomorphic mapping families with exact first and second Frechet
//! derivatives, plus an independent finite-difference oracle.
//!
//! Every family is normalized so that `f(0) = 0` and `Df(0) = I` by
//! construction: constant terms are absent and the linear part is the
//! identity. Single-variable building blocks are restricted to polynomials up
//! to degree 8 and the scaled exponential `(e^{lambda z} - 1) / lambda`, which
//! cover all built-in families while keeping closed-form derivatives exact.

use num_complex::Complex64;

use crate::numerics::{ComplexMatrix, ComplexVector};
use crate::{Error, Result};

/// Maximum total degree accepted for custom monomials and the built-in
/// polynomial atoms.
pub const MAX_DEGREE: u32 = 8;

/// Default finite-difference step before scaling by `max(1, |z_j|)`.
pub const DEFAULT_FD_STEP: f64 = 1e-5;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `z^k` with the `z^0 = 1` convention for every `z`.
fn zpow(z: Complex64, k: u32) -> Complex64 {
    if k == 0 {
        c(1.0, 0.0)
    } else {
        z.powu(k)
    }
}

/// One term `coeff * prod_j z_j^{e_j}` of a custom component.
#[derive(Debug, Clone, PartialEq)]
pub struct Monomial {
    pub coeff: Complex64,
    pub exponents: Vec<u32>,
}

impl Monomial {
    fn degree(&self) -> u32 {
        self.exponents.iter().sum()
    }

    fn eval(&self, z: &ComplexVector) -> Complex64 {
        let mut v = self.coeff;
        for (j, &e) in self.exponents.iter().enumerate() {
            v *= zpow(z[j], e);
        }
        v
    }

    /// First partial with respect to coordinate `j`.
    fn d1(&self, z: &ComplexVector, j: usize) -> Complex64 {
        let ej = self.exponents[j];
        if ej == 0 {
            return c(0.0, 0.0);
        }
        let mut v = self.coeff * ej as f64 * zpow(z[j], ej - 1);
        for (l, &e) in self.exponents.iter().enumerate() {
            if l != j {
                v *= zpow(z[l], e);
            }
        }
        v
    }

    /// Second partial with respect to coordinates `j` and `l`.
    fn d2(&self, z: &ComplexVector, j: usize, l: usize) -> Complex64 {
        let mut v = self.coeff;
        if j == l {
            let ej = self.exponents[j];
            if ej < 2 {
                return c(0.0, 0.0);
            }
            v *= (ej * (ej - 1)) as f64 * zpow(z[j], ej - 2);
            for (m, &e) in self.exponents.iter().enumerate() {
                if m != j {
                    v *= zpow(z[m], e);
                }
            }
        } else {
            let (ej, el) = (self.exponents[j], self.exponents[l]);
            if ej == 0 || el == 0 {
                return c(0.0, 0.0);
            }
            v *= (ej * el) as f64 * zpow(z[j], ej - 1) * zpow(z[l], el - 1);
            for (m, &e) in self.exponents.iter().enumerate() {
                if m != j && m != l {
                    v *= zpow(z[m], e);
                }
            }
        }
        v
    }
}

/// The supported mapping families and their coefficients.
///
/// Coefficient vectors are zero-indexed against the coordinates:
/// `a[i]` couples to coordinate `i`. The tail families (`Example3`,
/// `Example4`) have no coefficient for the first coordinate, so their
/// `a_tail[i]` couples to coordinate `i + 1`.
#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    Identity,
    /// `(z_1 + a_1 z_1^2 + sum_{j>=2} a_j z_j^{k+1},
    ///   z_2 + a_2 z_2^2 + sum_{j>=3} a_j z_j^{k+1},
    ///   (e^{lambda z_3}-1)/lambda, ..., (e^{lambda z_n}-1)/lambda)`
    Example1 {
        a: Vec<Complex64>,
        lambda: Complex64,
        k: u32,
    },
    /// As `Example1` but the second component's tail is quadratic
    /// (`a_j z_j^2`) and the later components are `z_j + a_j z_j^2`.
    Example2 {
        a: Vec<Complex64>,
        k: u32,
    },
    /// `(z_1 + sum_{2<=j<=n-1} a_j z_j^{k+1} + a_n z_1 z_n^{k+1},
    ///   z_j + a_j z_j z_n^{k+1} (2<=j<=n-1),
    ///   (e^{lambda z_n}-1)/lambda)`
    Example3 {
        a_tail: Vec<Complex64>,
        lambda: Complex64,
        k: u32,
    },
    /// As `Example3` with last component `z_n + a_n z_n^2`.
    Example4 {
        a_tail: Vec<Complex64>,
        k: u32,
    },
    /// `(z_1 + a_1 z_1^2 + a1p z_2^2, a_2 z_1^2 + z_2 + a2p z_2^2)` on n = 2.
    Theorem4Quadratic {
        a1: Complex64,
        a2: Complex64,
        a1p: Complex64,
        a2p: Complex64,
    },
    /// `f_i = z_i + (monomials in z_i..z_n of total degree >= 2)`.
    CustomTriangular {
        components: Vec<Vec<Monomial>>,
    },
}

/// A mapping family instantiated at a fixed dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct MappingSpec {
    n: usize,
    family: Family,
}

fn require_finite(label: &str, v: Complex64) -> Result<()> {
    if v.re.is_finite() && v.im.is_finite() {
        Ok(())
    } else {
        Err(Error::ParamOutOfRange(format!("{label} is not finite")))
    }
}

fn require_unit_lambda(lambda: Complex64) -> Result<()> {
    require_finite("lambda", lambda)?;
    let m = lambda.norm();
    if m <= 0.0 || m > 1.0 {
        return Err(Error::ParamOutOfRange(format!(
            "lambda must satisfy 0 < |lambda| <= 1, got |lambda| = {m}"
        )));
    }
    Ok(())
}

fn require_k(k: u32) -> Result<()> {
    if k == 0 || k + 1 > MAX_DEGREE {
        return Err(Error::ParamOutOfRange(format!(
            "k must be a positive integer with k + 1 <= {MAX_DEGREE}, got {k}"
        )));
    }
    Ok(())
}

impl MappingSpec {
    pub fn identity(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidMapping("dimension must be >= 1".into()));
        }
        Ok(Self {
            n,
            family: Family::Identity,
        })
    }

    pub fn example1(n: usize, a: Vec<Complex64>, lambda: Complex64, k: u32) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidMapping("Example1 needs n >= 2".into()));
        }
        if a.len() != n {
            return Err(Error::InvalidMapping(format!(
                "Example1 expects {n} coefficients, got {}",
                a.len()
            )));
        }
        for (i, &ai) in a.iter().enumerate() {
            require_finite(&format!("a_{}", i + 1), ai)?;
        }
        require_unit_lambda(lambda)?;
        require_k(k)?;
        Ok(Self {
            n,
            family: Family::Example1 { a, lambda, k },
        })
    }

    pub fn example2(n: usize, a: Vec<Complex64>, k: u32) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidMapping("Example2 needs n >= 2".into()));
        }
        if a.len() != n {
            return Err(Error::InvalidMapping(format!(
                "Example2 expects {n} coefficients, got {}",
                a.len()
            )));
        }
        for (i, &ai) in a.iter().enumerate() {
            require_finite(&format!("a_{}", i + 1), ai)?;
        }
        require_k(k)?;
        Ok(Self {
            n,
            family: Family::Example2 { a, k },
        })
    }

    pub fn example3(n: usize, a_tail: Vec<Complex64>, lambda: Complex64, k: u32) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidMapping("Example3 needs n >= 2".into()));
        }
        if a_tail.len() != n - 1 {
            return Err(Error::InvalidMapping(format!(
                "Example3 expects {} coefficients (a_2..a_n), got {}",
                n - 1,
                a_tail.len()
            )));
        }
        for (i, &ai) in a_tail.iter().enumerate() {
            require_finite(&format!("a_{}", i + 2), ai)?;
        }
        require_unit_lambda(lambda)?;
        require_k(k)?;
        Ok(Self {
            n,
            family: Family::Example3 { a_tail, lambda, k },
        })
    }

    pub fn example4(n: usize, a_tail: Vec<Complex64>, k: u32) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidMapping("Example4 needs n >= 2".into()));
        }
        if a_tail.len() != n - 1 {
            return Err(Error::InvalidMapping(format!(
                "Example4 expects {} coefficients (a_2..a_n), got {}",
                n - 1,
                a_tail.len()
            )));
        }
        for (i, &ai) in a_tail.iter().enumerate() {
            require_finite(&format!("a_{}", i + 2), ai)?;
        }
        require_k(k)?;
        Ok(Self {
            n,
            family: Family::Example4 { a_tail, k },
        })
    }

    pub fn theorem4_quadratic(
        a1: Complex64,
        a2: Complex64,
        a1p: Complex64,
        a2p: Complex64,
    ) -> Result<Self> {
        for (label, v) in [("a_1", a1), ("a_2", a2), ("a'_1", a1p), ("a'_2", a2p)] {
            require_finite(label, v)?;
        }
        Ok(Self {
            n: 2,
            family: Family::Theorem4Quadratic { a1, a2, a1p, a2p },
        })
    }

    pub fn custom_triangular(components: Vec<Vec<Monomial>>) -> Result<Self> {
        let n = components.len();
        if n == 0 {
            return Err(Error::InvalidMapping("no components".into()));
        }
        for (i, comp) in components.iter().enumerate() {
            for m in comp {
                if m.exponents.len() != n {
                    return Err(Error::InvalidMapping(format!(
                        "component {} monomial has {} exponents, expected {n}",
                        i + 1,
                        m.exponents.len()
                    )));
                }
                if m.exponents[..i].iter().any(|&e| e > 0) {
                    return Err(Error::InvalidMapping(format!(
                        "component {} depends on a coordinate below the diagonal",
                        i + 1
                    )));
                }
                let deg = m.degree();
                if !(2..=MAX_DEGREE).contains(&deg) {
                    return Err(Error::InvalidMapping(format!(
                        "monomial degree {deg} outside 2..={MAX_DEGREE}"
                    )));
                }
                require_finite("monomial coefficient", m.coeff)?;
            }
        }
        Ok(Self {
            n,
            family: Family::CustomTriangular { components },
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn family_name(&self) -> &'static str {
        match self.family {
            Family::Identity => "identity",
            Family::Example1 { .. } => "example1",
            Family::Example2 { .. } => "example2",
            Family::Example3 { .. } => "example3",
            Family::Example4 { .. } => "example4",
            Family::Theorem4Quadratic { .. } => "theorem4_quadratic",
            Family::CustomTriangular { .. } => "custom_triangular",
        }
    }

    /// Structural dependence pattern: `pattern[i][j]` is true when component
    /// `i` may depend on coordinate `j`.
    pub fn dependence(&self) -> Vec<Vec<bool>> {
        let n = self.n;
        let mut pat = vec![vec![false; n]; n];
        for (i, row) in pat.iter_mut().enumerate() {
            row[i] = true;
        }
        match &self.family {
            Family::Identity => {}
            Family::Example1 { .. } | Family::Example2 { .. } => {
                for j in 0..n {
                    pat[0][j] = true;
                }
                for j in 1..n {
                    pat[1][j] = true;
                }
            }
            Family::Example3 { .. } | Family::Example4 { .. } => {
                for j in 0..n {
                    pat[0][j] = true;
                }
                for row in pat.iter_mut().take(n - 1).skip(1) {
                    row[n - 1] = true;
                }
            }
            Family::Theorem4Quadratic { .. } => {
                pat[0][1] = true;
                pat[1][0] = true;
            }
            Family::CustomTriangular { components } => {
                for (i, comp) in components.iter().enumerate() {
                    for m in comp {
                        for (j, &e) in m.exponents.iter().enumerate() {
                            if e > 0 {
                                pat[i][j] = true;
                            }
                        }
                    }
                }
            }
        }
        pat
    }

    /// True when component `i` has no structural mixed term in coordinates
    /// `a` and `b`, i.e. its `(a, b)` second partial vanishes identically.
    pub fn mixed_term_free(&self, i: usize, a: usize, b: usize) -> bool {
        if a == b {
            return true;
        }
        match &self.family {
            Family::Identity
            | Family::Example1 { .. }
            | Family::Example2 { .. }
            | Family::Theorem4Quadratic { .. } => true,
            Family::Example3 { .. } | Family::Example4 { .. } => {
                let last = self.n - 1;
                let couples = (i == 0 && (a == 0 && b == last || a == last && b == 0))
                    || (i > 0 && i < last && (a == i && b == last || a == last && b == i));
                !couples
            }
            Family::CustomTriangular { components } => components[i]
                .iter()
                .all(|m| m.exponents[a] == 0 || m.exponents[b] == 0),
        }
    }
}

/// Symmetric second-derivative tensor with entry `(i, j, l)` equal to
/// `d^2 f_i / (dz_j dz_l)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HessianTensor {
    n: usize,
    data: Vec<Complex64>,
}

impl HessianTensor {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![c(0.0, 0.0); n * n * n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize, l: usize) -> Complex64 {
        self.data[(i * self.n + j) * self.n + l]
    }

    pub fn set(&mut self, i: usize, j: usize, l: usize, v: Complex64) {
        self.data[(i * self.n + j) * self.n + l] = v;
    }

    /// Writes both index orders so symmetry holds by construction.
    pub fn set_sym(&mut self, i: usize, j: usize, l: usize, v: Complex64) {
        self.set(i, j, l, v);
        self.set(i, l, j, v);
    }

    pub fn max_magnitude(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Value, Jacobian, and full second-derivative tensor at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivativeBundle {
    pub value: ComplexVector,
    pub jacobian: ComplexMatrix,
    pub hessian: HessianTensor,
}

/// Evaluates the mapping. Callers must pass a point of the mapping's dimension.
pub fn evaluate(spec: &MappingSpec, z: &ComplexVector) -> ComplexVector {
    let n = spec.n();
    assert_eq!(z.len(), n, "point dimension mismatch");
    match spec.family() {
        Family::Identity => z.clone(),
        Family::Example1 { a, lambda, k } => {
            let kp1 = k + 1;
            (0..n)
                .map(|i| match i {
                    0 | 1 => {
                        let mut v = z[i] + a[i] * z[i] * z[i];
                        for j in i + 1..n {
                            v += a[j] * zpow(z[j], kp1);
                        }
                        v
                    }
                    _ => ((*lambda * z[i]).exp() - 1.0) / lambda,
                })
                .collect()
        }
        Family::Example2 { a, k } => {
            let kp1 = k + 1;
            (0..n)
                .map(|i| match i {
                    0 => {
                        let mut v = z[0] + a[0] * z[0] * z[0];
                        for j in 1..n {
                            v += a[j] * zpow(z[j], kp1);
                        }
                        v
                    }
                    1 => {
                        let mut v = z[1] + a[1] * z[1] * z[1];
                        for j in 2..n {
                            v += a[j] * z[j] * z[j];
                        }
                        v
                    }
                    _ => z[i] + a[i] * z[i] * z[i],
                })
                .collect()
        }
        Family::Example3 { a_tail, lambda, k } => {
            let kp1 = k + 1;
            let a = |j: usize| a_tail[j - 1];
            let last = n - 1;
            (0..n)
                .map(|i| {
                    if i == 0 {
                        let mut v = z[0] + a(last) * z[0] * zpow(z[last], kp1);
                        for j in 1..last {
                            v += a(j) * zpow(z[j], kp1);
                        }
                        v
                    } else if i < last {
                        z[i] + a(i) * z[i] * zpow(z[last], kp1)
                    } else {
                        ((*lambda * z[last]).exp() - 1.0) / lambda
                    }
                })
                .collect()
        }
        Family::Example4 { a_tail, k } => {
            let kp1 = k + 1;
            let a = |j: usize| a_tail[j - 1];
            let last = n - 1;
            (0..n)
                .map(|i| {
                    if i == 0 {
                        let mut v = z[0] + a(last) * z[0] * zpow(z[last], kp1);
                        for j in 1..last {
                            v += a(j) * zpow(z[j], kp1);
                        }
                        v
                    } else if i < last {
                        z[i] + a(i) * z[i] * zpow(z[last], kp1)
                    } else {
                        z[last] + a(last) * z[last] * z[last]
                    }
                })
                .collect()
        }
        Family::Theorem4Quadratic { a1, a2, a1p, a2p } => ComplexVector::new(vec![
            z[0] + a1 * z[0] * z[0] + a1p * z[1] * z[1],
            a2 * z[0] * z[0] + z[1] + a2p * z[1] * z[1],
        ]),
        Family::CustomTriangular { components } => (0..n)
            .map(|i| {
                let mut v = z[i];
                for m in &components[i] {
                    v += m.eval(z);
                }
                v
            })
            .collect(),
    }
}

/// Closed-form Jacobian and second-derivative tensor.
pub fn derivatives(spec: &MappingSpec, z: &ComplexVector) -> DerivativeBundle {
    let n = spec.n();
    assert_eq!(z.len(), n, "point dimension mismatch");
    let value = evaluate(spec, z);
    let mut jac = ComplexMatrix::identity(n);
    let mut hess = HessianTensor::zeros(n);

    match spec.family() {
        Family::Identity => {}
        Family::Example1 { a, lambda, k } => {
            let kf = *k as f64;
            for i in 0..2.min(n) {
                jac.set(i, i, c(1.0, 0.0) + 2.0 * a[i] * z[i]);
                hess.set_sym(i, i, i, 2.0 * a[i]);
                for j in i + 1..n {
                    jac.set(i, j, (kf + 1.0) * a[j] * zpow(z[j], *k));
                    // d^2/dz_j^2 of a_j z_j^{k+1}; stacked on top of any
                    // diagonal entry already written for j < 2.
                    let v = hess.get(i, j, j) + kf * (kf + 1.0) * a[j] * zpow(z[j], k - 1);
                    hess.set_sym(i, j, j, v);
                }
            }
            for i in 2..n {
                let e = (*lambda * z[i]).exp();
                jac.set(i, i, e);
                hess.set_sym(i, i, i, lambda * e);
            }
        }
        Family::Example2 { a, k } => {
            let kf = *k as f64;
            jac.set(0, 0, c(1.0, 0.0) + 2.0 * a[0] * z[0]);
            hess.set_sym(0, 0, 0, 2.0 * a[0]);
            for j in 1..n {
                jac.set(0, j, (kf + 1.0) * a[j] * zpow(z[j], *k));
                let v = hess.get(0, j, j) + kf * (kf + 1.0) * a[j] * zpow(z[j], k - 1);
                hess.set_sym(0, j, j, v);
            }
            if n >= 2 {
                jac.set(1, 1, c(1.0, 0.0) + 2.0 * a[1] * z[1]);
                hess.set_sym(1, 1, 1, 2.0 * a[1]);
                for j in 2..n {
                    jac.set(1, j, 2.0 * a[j] * z[j]);
                    hess.set_sym(1, j, j, 2.0 * a[j]);
                }
            }
            for i in 2..n {
                jac.set(i, i, c(1.0, 0.0) + 2.0 * a[i] * z[i]);
                hess.set_sym(i, i, i, 2.0 * a[i]);
            }
        }
        Family::Example3 { a_tail, lambda, k } => {
            let kf = *k as f64;
            let a = |j: usize| a_tail[j - 1];
            let last = n - 1;
            jac.set(0, 0, c(1.0, 0.0) + a(last) * zpow(z[last], k + 1));
            hess.set_sym(0, 0, last, (kf + 1.0) * a(last) * zpow(z[last], *k));
            for j in 1..last {
                jac.set(0, j, (kf + 1.0) * a(j) * zpow(z[j], *k));
                hess.set_sym(0, j, j, kf * (kf + 1.0) * a(j) * zpow(z[j], k - 1));
            }
            {
                let v = hess.get(0, last, last)
                    + kf * (kf + 1.0) * a(last) * z[0] * zpow(z[last], k - 1);
                hess.set_sym(0, last, last, v);
                jac.set(0, last, (kf + 1.0) * a(last) * z[0] * zpow(z[last], *k));
            }
            for i in 1..last {
                jac.set(i, i, c(1.0, 0.0) + a(i) * zpow(z[last], k + 1));
                jac.set(i, last, (kf + 1.0) * a(i) * z[i] * zpow(z[last], *k));
                hess.set_sym(i, i, last, (kf + 1.0) * a(i) * zpow(z[last], *k));
                hess.set_sym(
                    i,
                    last,
                    last,
                    kf * (kf + 1.0) * a(i) * z[i] * zpow(z[last], k - 1),
                );
            }
            let e = (*lambda * z[last]).exp();
            jac.set(last, last, e);
            hess.set_sym(last, last, last, lambda * e);
        }
        Family::Example4 { a_tail, k } => {
            let kf = *k as f64;
            let a = |j: usize| a_tail[j - 1];
            let last = n - 1;
            jac.set(0, 0, c(1.0, 0.0) + a(last) * zpow(z[last], k + 1));
            hess.set_sym(0, 0, last, (kf + 1.0) * a(last) * zpow(z[last], *k));
            for j in 1..last {
                jac.set(0, j, (kf + 1.0) * a(j) * zpow(z[j], *k));
                hess.set_sym(0, j, j, kf * (kf + 1.0) * a(j) * zpow(z[j], k - 1));
            }
            {
                let v = hess.get(0, last, last)
                    + kf * (kf + 1.0) * a(last) * z[0] * zpow(z[last], k - 1);
                hess.set_sym(0, last, last, v);
                jac.set(0, last, (kf + 1.0) * a(last) * z[0] * zpow(z[last], *k));
            }
            for i in 1..last {
                jac.set(i, i, c(1.0, 0.0) + a(i) * zpow(z[last], k + 1));
                jac.set(i, last, (kf + 1.0) * a(i) * z[i] * zpow(z[last], *k));
                hess.set_sym(i, i, last, (kf + 1.0) * a(i) * zpow(z[last], *k));
                hess.set_sym(
                    i,
                    last,
                    last,
                    kf * (kf + 1.0) * a(i) * z[i] * zpow(z[last], k - 1),
                );
            }
            jac.set(last, last, c(1.0, 0.0) + 2.0 * a(last) * z[last]);
            let v = hess.get(last, last, last) + 2.0 * a(last);
            hess.set_sym(last, last, last, v);
        }
        Family::Theorem4Quadratic { a1, a2, a1p, a2p } => {
            jac.set(0, 0, c(1.0, 0.0) + 2.0 * a1 * z[0]);
            jac.set(0, 1, 2.0 * a1p * z[1]);
            jac.set(1, 0, 2.0 * a2 * z[0]);
            jac.set(1, 1, c(1.0, 0.0) + 2.0 * a2p * z[1]);
            hess.set_sym(0, 0, 0, 2.0 * *a1);
            hess.set_sym(0, 1, 1, 2.0 * *a1p);
            hess.set_sym(1, 0, 0, 2.0 * *a2);
            hess.set_sym(1, 1, 1, 2.0 * *a2p);
        }
        Family::CustomTriangular { components } => {
            for (i, comp) in components.iter().enumerate() {
                for m in comp {
                    for j in 0..n {
                        let d = m.d1(z, j);
                        if d != c(0.0, 0.0) {
                            jac.set(i, j, jac.get(i, j) + d);
                        }
                    }
                    for j in 0..n {
                        for l in j..n {
                            let d = m.d2(z, j, l);
                            if d != c(0.0, 0.0) {
                                let v = hess.get(i, j, l) + d;
                                hess.set_sym(i, j, l, v);
                            }
                        }
                    }
                }
            }
        }
    }

    DerivativeBundle {
        value,
        jacobian: jac,
        hessian: hess,
    }
}

/// Double contraction `D^2 f(z)(b, b)`: component `i` is
/// `sum_j sum_l tensor[i][j][l] b_l b_j`.
pub fn hessian_action(bundle: &DerivativeBundle, b: &ComplexVector) -> Result<ComplexVector> {
    let n = bundle.hessian.n();
    if b.len() != n {
        return Err(Error::DimensionMismatch {
            left: n,
            right: b.len(),
        });
    }
    Ok((0..n)
        .map(|i| {
            let mut acc = c(0.0, 0.0);
            for j in 0..n {
                for l in 0..n {
                    acc += bundle.hessian.get(i, j, l) * b[l] * b[j];
                }
            }
            acc
        })
        .collect())
}

/// Central finite differences of [`evaluate`] only; never touches the closed
/// forms, so it stays an independent oracle for [`derivatives`].
///
/// Requires the whole stencil to stay inside the unit polydisk:
/// `2h < 1 - max_j |z_j|`.
pub fn derivatives_fd(spec: &MappingSpec, z: &ComplexVector, h: f64) -> Result<DerivativeBundle> {
    let n = spec.n();
    if z.len() != n {
        return Err(Error::DimensionMismatch {
            left: n,
            right: z.len(),
        });
    }
    if !z.is_finite() {
        return Err(Error::NonFiniteInput);
    }
    if !(h > 0.0) {
        return Err(Error::ParamOutOfRange(format!(
            "step must be positive, got {h}"
        )));
    }
    let margin = 1.0 - z.norm_inf();
    if 2.0 * h >= margin {
        return Err(Error::StepTooLarge { step: h, margin });
    }

    let value = evaluate(spec, z);
    let shifted = |j: usize, dj: f64, l: usize, dl: f64| -> ComplexVector {
        let mut w = z.clone();
        w[j] += c(dj, 0.0);
        w[l] += c(dl, 0.0);
        evaluate(spec, &w)
    };

    let mut jac = ComplexMatrix::zeros(n);
    for k in 0..n {
        let fp = shifted(k, h, k, 0.0);
        let fm = shifted(k, -h, k, 0.0);
        for i in 0..n {
            jac.set(i, k, (fp[i] - fm[i]) / (2.0 * h));
        }
    }

    let mut hess = HessianTensor::zeros(n);
    for j in 0..n {
        let fp = shifted(j, h, j, 0.0);
        let fm = shifted(j, -h, j, 0.0);
        for i in 0..n {
            hess.set(i, j, j, (fp[i] - 2.0 * value[i] + fm[i]) / (h * h));
        }
        for l in j + 1..n {
            let fpp = shifted(j, h, l, h);
            let fpm = shifted(j, h, l, -h);
            let fmp = shifted(j, -h, l, h);
            let fmm = shifted(j, -h, l, -h);
            for i in 0..n {
                hess.set_sym(i, j, l, (fpp[i] - fpm[i] - fmp[i] + fmm[i]) / (4.0 * h * h));
            }
        }
    }

    Ok(DerivativeBundle {
        value,
        jacobian: jac,
        hessian: hess,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::determinant;
    use crate::task::derived_rng;
    use rand::Rng;

    fn v(entries: &[Complex64]) -> ComplexVector {
        ComplexVector::new(entries.to_vec())
    }

    fn re(x: f64) -> Complex64 {
        c(x, 0.0)
    }

    #[test]
    fn identity_evaluates_to_input() {
        let spec = MappingSpec::identity(3).unwrap();
        let z = v(&[c(0.1, 0.2), c(-0.3, 0.0), c(0.0, 0.4)]);
        assert_eq!(evaluate(&spec, &z), z);
        let b = derivatives(&spec, &z);
        assert_eq!(b.jacobian, ComplexMatrix::identity(3));
        assert_eq!(b.hessian.max_magnitude(), 0.0);
    }

    #[test]
    fn theorem4_quadratic_value() {
        let spec = MappingSpec::theorem4_quadratic(re(0.1), re(0.1), re(0.1), re(0.1)).unwrap();
        let f = evaluate(&spec, &v(&[re(1.0), re(1.0)]));
        assert!((f[0] - re(1.2)).norm() < 1e-14);
        assert!((f[1] - re(1.2)).norm() < 1e-14);
    }

    #[test]
    fn example1_exponential_tail() {
        let spec = MappingSpec::example1(3, vec![re(0.0); 3], re(0.5), 2).unwrap();
        let f = evaluate(&spec, &v(&[re(0.0), re(0.0), re(0.2)]));
        let expected = (0.1f64.exp() - 1.0) / 0.5;
        assert!((f[2] - re(expected)).norm() < 1e-14);
    }

    #[test]
    fn normalization_holds_for_every_family() {
        for spec in sample_specs() {
            let zero = ComplexVector::zeros(spec.n());
            let f0 = evaluate(&spec, &zero);
            assert!(
                f0.norm_inf() < 1e-15,
                "{} not zero at 0",
                spec.family_name()
            );
            let b = derivatives(&spec, &zero);
            for i in 0..spec.n() {
                for j in 0..spec.n() {
                    let expected = if i == j { 1.0 } else { 0.0 };
                    assert!(
                        (b.jacobian.get(i, j) - re(expected)).norm() < 1e-15,
                        "{} Df(0) != I",
                        spec.family_name()
                    );
                }
            }
        }
    }

    #[test]
    fn hessian_action_examples() {
        let spec =
            MappingSpec::theorem4_quadratic(re(0.2), re(0.3), re(-0.1), c(0.0, 0.25)).unwrap();
        let z = v(&[c(0.1, 0.1), c(-0.2, 0.05)]);
        let bundle = derivatives(&spec, &z);

        let zero = ComplexVector::zeros(2);
        assert_eq!(hessian_action(&bundle, &zero).unwrap(), zero);

        // (2 a_1 b_1^2 + 2 a'_1 b_2^2, 2 a_2 b_1^2 + 2 a'_2 b_2^2)
        let b = v(&[c(0.3, -0.1), c(0.2, 0.4)]);
        let act = hessian_action(&bundle, &b).unwrap();
        let b1sq = b[0] * b[0];
        let b2sq = b[1] * b[1];
        assert!((act[0] - (2.0 * re(0.2) * b1sq + 2.0 * re(-0.1) * b2sq)).norm() < 1e-14);
        assert!((act[1] - (2.0 * re(0.3) * b1sq + 2.0 * c(0.0, 0.25) * b2sq)).norm() < 1e-14);

        // quadratic homogeneity
        let act2 = hessian_action(&bundle, &b.scaled(re(2.0))).unwrap();
        for i in 0..2 {
            assert!((act2[i] - 4.0 * act[i]).norm() < 1e-13);
        }
    }

    #[test]
    fn hessian_is_symmetric_and_action_matches_naive_loop() {
        let mut rng = derived_rng(21, 0);
        for spec in sample_specs() {
            let n = spec.n();
            let z = small_point(n, &mut rng);
            let bundle = derivatives(&spec, &z);
            for i in 0..n {
                for j in 0..n {
                    for l in 0..n {
                        assert_eq!(
                            bundle.hessian.get(i, j, l),
                            bundle.hessian.get(i, l, j),
                            "{} tensor asymmetric",
                            spec.family_name()
                        );
                    }
                }
            }
            let b = crate::numerics::sample_complex_gaussian(n, &mut rng);
            let act = hessian_action(&bundle, &b).unwrap();
            for i in 0..n {
                let mut acc = c(0.0, 0.0);
                for j in 0..n {
                    for l in 0..n {
                        acc += bundle.hessian.get(i, j, l) * b[l] * b[j];
                    }
                }
                assert!((act[i] - acc).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn triangular_families_have_triangular_jacobians() {
        let mut rng = derived_rng(22, 0);
        for spec in sample_specs() {
            let lower_must_vanish = matches!(
                spec.family(),
                Family::Identity
                    | Family::Example1 { .. }
                    | Family::Example2 { .. }
                    | Family::Example3 { .. }
                    | Family::Example4 { .. }
                    | Family::CustomTriangular { .. }
            );
            if !lower_must_vanish {
                continue;
            }
            let n = spec.n();
            let z = small_point(n, &mut rng);
            let bundle = derivatives(&spec, &z);
            for i in 0..n {
                for j in 0..i {
                    assert_eq!(
                        bundle.jacobian.get(i, j),
                        c(0.0, 0.0),
                        "{} has a subdiagonal Jacobian entry",
                        spec.family_name()
                    );
                }
            }
        }
    }

    #[test]
    fn theorem4_determinant_matches_closed_form() {
        let (a1, a2, a1p, a2p) = (c(0.11, 0.02), c(-0.07, 0.05), c(0.04, -0.03), c(0.09, 0.0));
        let spec = MappingSpec::theorem4_quadratic(a1, a2, a1p, a2p).unwrap();
        let mut rng = derived_rng(23, 0);
        for _ in 0..50 {
            let z = small_point(2, &mut rng);
            let det = determinant(&derivatives(&spec, &z).jacobian);
            let a = 4.0 * a1 * a2p * z[0] * z[1] - 4.0 * a1p * a2 * z[0] * z[1]
                + 1.0
                + 2.0 * a2p * z[1]
                + 2.0 * a1 * z[0];
            assert!((det - a).norm() <= 1e-10, "det {det} vs A {a}");
        }
    }

    #[test]
    fn fd_jacobian_of_identity_is_identity() {
        let spec = MappingSpec::identity(3).unwrap();
        let z = v(&[c(0.3, 0.1), c(-0.2, 0.2), c(0.05, -0.4)]);
        let fd = derivatives_fd(&spec, &z, 1e-5).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((fd.jacobian.get(i, j) - re(expected)).norm() <= 1e-10);
            }
        }
    }

    #[test]
    fn fd_hessian_of_identity_vanishes() {
        let spec = MappingSpec::identity(2).unwrap();
        // Binary-exact coordinates and a power-of-two step make the identity
        // stencil cancel exactly.
        let z = v(&[re(0.25), c(-0.125, 0.5)]);
        let fd = derivatives_fd(&spec, &z, 2f64.powi(-14)).unwrap();
        assert!(fd.hessian.max_magnitude() <= 1e-8);
    }

    #[test]
    fn fd_matches_closed_form_for_theorem4() {
        let spec = MappingSpec::theorem4_quadratic(re(0.05), re(0.05), re(0.05), re(0.05)).unwrap();
        let z = v(&[re(0.1), re(0.1)]);
        let fd = derivatives_fd(&spec, &z, 1e-5).unwrap();
        let cf = derivatives(&spec, &z);
        for i in 0..2 {
            for j in 0..2 {
                assert!((fd.jacobian.get(i, j) - cf.jacobian.get(i, j)).norm() <= 1e-6);
                for l in 0..2 {
                    assert!((fd.hessian.get(i, j, l) - cf.hessian.get(i, j, l)).norm() <= 1e-6);
                }
            }
        }
    }

    #[test]
    fn fd_matches_closed_form_for_example3() {
        let spec =
            MappingSpec::example3(3, vec![c(0.04, 0.01), c(-0.03, 0.02)], c(0.4, 0.2), 2).unwrap();
        let mut rng = derived_rng(24, 0);
        for _ in 0..20 {
            let z = small_point(3, &mut rng);
            let fd = derivatives_fd(&spec, &z, 2f64.powi(-13)).unwrap();
            let cf = derivatives(&spec, &z);
            let scale = cf.jacobian.max_magnitude().max(1.0);
            for i in 0..3 {
                for j in 0..3 {
                    assert!((fd.jacobian.get(i, j) - cf.jacobian.get(i, j)).norm() <= 1e-6 * scale);
                }
            }
            let hscale = cf.hessian.max_magnitude().max(1.0);
            for i in 0..3 {
                for j in 0..3 {
                    for l in 0..3 {
                        assert!(
                            (fd.hessian.get(i, j, l) - cf.hessian.get(i, j, l)).norm()
                                <= 1e-6 * hscale
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn fd_rejects_oversized_steps() {
        let spec = MappingSpec::identity(2).unwrap();
        let z = v(&[re(0.99), re(0.0)]);
        assert!(matches!(
            derivatives_fd(&spec, &z, 0.01),
            Err(Error::StepTooLarge { .. })
        ));
    }

    #[test]
    fn custom_triangular_rejects_bad_shapes() {
        // component 2 depending on z_1 violates triangularity
        let bad = MappingSpec::custom_triangular(vec![
            vec![],
            vec![Monomial {
                coeff: re(1.0),
                exponents: vec![2, 0],
            }],
        ]);
        assert!(bad.is_err());

        // degree-1 monomial would break the normalization
        let bad = MappingSpec::custom_triangular(vec![vec![Monomial {
            coeff: re(1.0),
            exponents: vec![1, 0],
        }]]);
        assert!(bad.is_err());
    }

    #[test]
    fn lambda_range_is_enforced() {
        assert!(MappingSpec::example1(3, vec![re(0.0); 3], re(0.0), 2).is_err());
        assert!(MappingSpec::example1(3, vec![re(0.0); 3], re(1.5), 2).is_err());
    }

    fn small_point(n: usize, rng: &mut impl Rng) -> ComplexVector {
        (0..n)
            .map(|_| c(rng.random_range(-0.35..0.35), rng.random_range(-0.35..0.35)))
            .collect()
    }

    fn sample_specs() -> Vec<MappingSpec> {
        vec![
            MappingSpec::identity(3).unwrap(),
            MappingSpec::example1(
                3,
                vec![c(0.03, 0.01), c(-0.02, 0.02), c(0.025, 0.0)],
                c(0.4, 0.3),
                2,
            )
            .unwrap(),
            MappingSpec::example2(4, vec![re(0.05), re(0.04), c(0.01, 0.03), re(-0.06)], 2)
                .unwrap(),
            MappingSpec::example3(4, vec![re(0.05), c(0.0, 0.04), re(0.03)], re(0.5), 2).unwrap(),
            MappingSpec::example4(3, vec![c(0.02, -0.01), re(0.05)], 3).unwrap(),
            MappingSpec::theorem4_quadratic(re(0.05), c(0.02, 0.03), re(-0.04), re(0.05)).unwrap(),
            MappingSpec::custom_triangular(vec![
                vec![
                    Monomial {
                        coeff: re(0.5),
                        exponents: vec![2, 0, 0],
                    },
                    Monomial {
                        coeff: c(0.1, 0.2),
                        exponents: vec![1, 1, 1],
                    },
                ],
                vec![Monomial {
                    coeff: re(-0.3),
                    exponents: vec![0, 0, 3],
                }],
                vec![Monomial {
                    coeff: c(0.0, 0.2),
                    exponents: vec![0, 0, 2],
                }],
            ])
            .unwrap(),
        ]
    }
}
