//! Compressed shifts on the model space `K_φ = H² ⊖ φH²` of a finite
//! Blaschke product.
//!
//! Works in the Takenaka–Malmquist basis
//! `e_k(z) = √(1−|a_k|²)/(1−ā_k z)·∏_{j<k} b_{a_j}(z)`, with every inner
//! product evaluated by the uniform rule on the unit circle. The
//! conjugation is `[Cf](z) = conj(f(z)·z)·φ(z)` on the boundary.

use nalgebra::DVector;
use num_complex::Complex;

use crate::conjugation::{csym_residual, symmetrize, Conjugation};
use crate::error::{Error, Result};
use crate::json::{from_pair, pair, BlaschkeJson};
use crate::linalg::{frobenius, identity, pairwise_sum, unitarity_residual};
use crate::scalar::{cis, lit, modulus, phase, to_f64, ComplexMatrix, ComplexVector, Cx, Real};
use crate::tolerance::Tolerance;

pub const DEFAULT_QUADRATURE: usize = 2048;
/// Fewest quadrature nodes accepted; the rule must at least resolve degree-8 products.
pub const MIN_QUADRATURE: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct BlaschkeProduct<T: Real> {
    zeros: Vec<Cx<T>>,
    factor: Cx<T>,
}

fn factor_at<T: Real>(a: Cx<T>, z: Cx<T>) -> Cx<T> {
    (z - a) / (Complex::new(T::one(), T::zero()) - a.conj() * z)
}

impl<T: Real> BlaschkeProduct<T> {
    pub fn new(zeros: Vec<Cx<T>>, factor: Cx<T>) -> Result<Self> {
        if zeros.is_empty() {
            return Err(Error::InvalidParams("a Blaschke product needs at least one zero".into()));
        }
        if let Some(a) = zeros.iter().find(|a| !(modulus(**a) < T::one())) {
            return Err(Error::InvalidParams(format!("zero {a} is not in the open unit disk")));
        }
        if !((modulus(factor) - T::one()).abs() <= lit(1e-12)) {
            return Err(Error::InvalidParams(format!("factor {factor} is not unimodular")));
        }
        Ok(Self { zeros, factor })
    }

    pub fn zeros(&self) -> &[Cx<T>] {
        &self.zeros
    }

    pub fn factor(&self) -> Cx<T> {
        self.factor
    }

    pub fn degree(&self) -> usize {
        self.zeros.len()
    }

    pub fn eval(&self, z: Cx<T>) -> Cx<T> {
        self.zeros.iter().fold(self.factor, |acc, &a| acc * factor_at(a, z))
    }

    pub fn to_json(&self) -> BlaschkeJson {
        BlaschkeJson {
            zeros: self.zeros.iter().map(|&a| pair(a)).collect(),
            factor: pair(self.factor),
        }
    }

    pub fn from_json(j: &BlaschkeJson) -> Result<Self> {
        let zeros = j.zeros.iter().map(|&p| from_pair(p)).collect::<Result<Vec<_>>>()?;
        Self::new(zeros, from_pair(j.factor)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Alpha<T: Real> {
    /// `α = −φ(λ)/|φ(λ)|`.
    Canonical,
    Value(Cx<T>),
}

/// Residuals of the identities the bundle must satisfy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelSpaceChecks<T: Real> {
    pub gram: T,
    pub unitarity: T,
    /// `‖q − C k‖`
    pub q_vs_ck: T,
    /// `‖S − U + (α + φ(λ))·k⊗q‖`; skipped when `φ(λ) = 0`.
    pub rank_one_identity: Option<T>,
    /// `‖S q + φ(λ)·k‖`
    pub shift_identity: T,
    pub csym_s: T,
    pub csym_u: T,
    pub k_norm: T,
    pub q_norm: T,
}

impl<T: Real> ModelSpaceChecks<T> {
    /// Largest deviation among the checks.
    pub fn worst(&self) -> T {
        let norms = (self.k_norm - T::one()).abs().max((self.q_norm - T::one()).abs());
        [
            self.gram,
            self.unitarity,
            self.q_vs_ck,
            self.rank_one_identity.unwrap_or_else(T::zero),
            self.shift_identity,
            self.csym_s,
            self.csym_u,
            norms,
        ]
        .into_iter()
        .fold(T::zero(), |a, b| a.max(b))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpaceBundle<T: Real> {
    pub degree: usize,
    pub phi: BlaschkeProduct<T>,
    pub lambda: Cx<T>,
    pub alpha: Cx<T>,
    pub phi_at_lambda: Cx<T>,
    pub u_lambda: ComplexMatrix<T>,
    pub s_lambda: ComplexMatrix<T>,
    pub c: Conjugation<T>,
    pub k_lambda: ComplexVector<T>,
    pub q_lambda: ComplexVector<T>,
    pub checks: ModelSpaceChecks<T>,
}

/// Basis values: `values[k][m] = e_k(z_m)`.
fn basis_values<T: Real>(zeros: &[Cx<T>], z: Cx<T>) -> Vec<Cx<T>> {
    let one = Complex::new(T::one(), T::zero());
    let mut prefix = one;
    zeros
        .iter()
        .map(|&a| {
            let norm = (T::one() - a.norm_sqr()).sqrt();
            let e = prefix * norm / (one - a.conj() * z);
            prefix *= factor_at(a, z);
            e
        })
        .collect()
}

/// `⟨f, g⟩ = (1/N)·Σ f(z_m)·conj(g(z_m))`.
fn quad_inner<T: Real>(f: &[Cx<T>], g: &[Cx<T>]) -> Cx<T> {
    let terms: Vec<Cx<T>> = f.iter().zip(g).map(|(&x, &y)| x * y.conj()).collect();
    pairwise_sum(&terms) / lit::<T>(f.len() as f64)
}

pub fn blaschke_model_space<T: Real>(
    phi: &BlaschkeProduct<T>,
    lambda: Cx<T>,
    alpha: Alpha<T>,
    quadrature_points: usize,
    tol: &Tolerance<T>,
) -> Result<ModelSpaceBundle<T>> {
    if !(modulus(lambda) < T::one()) {
        return Err(Error::InvalidLambda(to_f64(modulus(lambda))));
    }
    if quadrature_points < MIN_QUADRATURE {
        return Err(Error::InvalidParams(format!(
            "need at least {MIN_QUADRATURE} quadrature points, got {quadrature_points}"
        )));
    }
    let phi_l = phi.eval(lambda);
    let alpha = match alpha {
        Alpha::Canonical => {
            if modulus(phi_l) <= tol.abs {
                return Err(Error::CanonicalAlphaUndefined);
            }
            -phase(phi_l)
        }
        Alpha::Value(a) => {
            if !((modulus(a) - T::one()).abs() <= tol.rel) {
                return Err(Error::InvalidParams(format!("alpha {a} is not unimodular")));
            }
            a
        }
    };

    let d = phi.degree();
    let nq = quadrature_points;
    let tau = lit::<T>(std::f64::consts::TAU) / lit::<T>(nq as f64);
    let nodes: Vec<Cx<T>> = (0..nq).map(|m| cis(tau * lit::<T>(m as f64))).collect();
    let per_node: Vec<Vec<Cx<T>>> = nodes.iter().map(|&z| basis_values(phi.zeros(), z)).collect();
    let e: Vec<Vec<Cx<T>>> = (0..d).map(|k| per_node.iter().map(|v| v[k]).collect()).collect();

    let gram = ComplexMatrix::from_fn(d, d, |j, k| quad_inner(&e[k], &e[j]));
    let gram_err = frobenius(&(gram - identity::<T>(d)));
    if !(gram_err <= tol.rel) {
        return Err(Error::QuadratureTooCoarse(to_f64(gram_err)));
    }

    let b_lambda: Vec<Cx<T>> = nodes.iter().map(|&z| factor_at(lambda, z)).collect();
    let phi_nodes: Vec<Cx<T>> = nodes.iter().map(|&z| phi.eval(z)).collect();
    let shifted: Vec<Vec<Cx<T>>> = e
        .iter()
        .map(|f| f.iter().zip(&b_lambda).map(|(&x, &b)| x * b).collect())
        .collect();
    let c_images: Vec<Vec<Cx<T>>> = e
        .iter()
        .map(|f| {
            f.iter()
                .zip(&nodes)
                .zip(&phi_nodes)
                .map(|((&x, &z), &p)| (x * z).conj() * p)
                .collect()
        })
        .collect();
    let s_lambda = ComplexMatrix::from_fn(d, d, |j, k| quad_inner(&shifted[k], &e[j]));
    let s_conj = ComplexMatrix::from_fn(d, d, |j, k| quad_inner(&c_images[k], &e[j]));
    let c = Conjugation::from_exact(symmetrize(&s_conj));

    // Reproducing property: ⟨K_λ, e_j⟩ = conj(e_j(λ)).
    let k_raw = DVector::from_iterator(d, basis_values(phi.zeros(), lambda).into_iter().map(|x| x.conj()));
    let k_lambda = &k_raw / Complex::new(k_raw.norm(), T::zero());
    // (φ(z) − φ(λ))/(z − λ), evaluated independently of C.
    let q_fn: Vec<Cx<T>> = nodes
        .iter()
        .zip(&phi_nodes)
        .map(|(&z, &p)| (p - phi_l) / (z - lambda))
        .collect();
    let q_raw = DVector::from_iterator(d, e.iter().map(|f| quad_inner(&q_fn, f)));
    let q_lambda = &q_raw / Complex::new(q_raw.norm(), T::zero());

    let id = identity::<T>(d);
    let kq = &k_lambda * q_lambda.adjoint();
    let u_lambda = &s_lambda * (&id - &q_lambda * q_lambda.adjoint()) + &kq * alpha;

    let ck = s_conj_apply(&c, &k_lambda);
    let rank_one_identity = (modulus(phi_l) > tol.abs)
        .then(|| frobenius(&(&s_lambda - &u_lambda + &kq * (alpha + phi_l))));
    let checks = ModelSpaceChecks {
        gram: gram_err,
        unitarity: unitarity_residual(&u_lambda),
        q_vs_ck: (&q_lambda - ck).norm(),
        rank_one_identity,
        shift_identity: (&s_lambda * &q_lambda + &k_lambda * phi_l).norm(),
        csym_s: csym_residual(&s_lambda, &c)?,
        csym_u: csym_residual(&u_lambda, &c)?,
        k_norm: k_lambda.norm(),
        q_norm: q_lambda.norm(),
    };
    let worst = checks.worst();
    if !(worst <= tol.rel) {
        return Err(Error::QuadratureTooCoarse(to_f64(worst)));
    }
    Ok(ModelSpaceBundle {
        degree: d,
        phi: phi.clone(),
        lambda,
        alpha,
        phi_at_lambda: phi_l,
        u_lambda,
        s_lambda,
        c,
        k_lambda,
        q_lambda,
        checks,
    })
}

fn s_conj_apply<T: Real>(c: &Conjugation<T>, x: &ComplexVector<T>) -> ComplexVector<T> {
    c.matrix() * x.map(|z| z.conj())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostics::is_partial_isometry;
    fn cx(re: f64, im: f64) -> num_complex::Complex<f64> {
        num_complex::Complex::new(re, im)
    }
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn build(zeros: Vec<Cx<f64>>, lambda: Cx<f64>, alpha: Alpha<f64>) -> Result<ModelSpaceBundle<f64>> {
        let phi = BlaschkeProduct::new(zeros, cx(1., 0.))?;
        blaschke_model_space(&phi, lambda, alpha, DEFAULT_QUADRATURE, &Tolerance::default())
    }

    #[test]
    fn z_power_gives_truncated_shift() {
        let b = build(vec![cx(0., 0.); 4], cx(0., 0.), Alpha::Value(cx(1., 0.))).unwrap();
        // Basis is 1, z, z², z³ and S₀ is multiplication by z: a Jordan block.
        for i in 0..4 {
            for j in 0..4 {
                let expect = if i == j + 1 { 1.0 } else { 0.0 };
                assert!((b.s_lambda[(i, j)] - cx(expect, 0.)).norm() < 1e-14, "S[{i}][{j}]");
                let flip = if i + j == 3 { 1.0 } else { 0.0 };
                assert!((b.c.matrix()[(i, j)] - cx(flip, 0.)).norm() < 1e-14, "C[{i}][{j}]");
            }
        }
        assert!(is_partial_isometry(&b.s_lambda, &Tolerance::default()));
        assert!(b.checks.rank_one_identity.is_none());
    }

    #[test]
    fn degree_one_at_origin_is_zero() {
        let b = build(vec![cx(0., 0.)], cx(0., 0.), Alpha::Value(cx(1., 0.))).unwrap();
        assert_eq!(b.s_lambda.shape(), (1, 1));
        assert!(b.s_lambda[(0, 0)].norm() < 1e-15);
    }

    #[test]
    fn stated_example_identity() {
        let b = build(vec![cx(0.5, 0.), cx(0., -0.3)], cx(0.2, 0.), Alpha::Canonical).unwrap();
        assert!(b.checks.rank_one_identity.unwrap() <= 1e-10);
        assert!((b.k_lambda.norm() - 1.0).abs() <= 1e-10);
        assert!((b.q_lambda.norm() - 1.0).abs() <= 1e-10);
        // φ(0.2) = (−0.3/0.9)·(0.2+0.3i)/(1−0.06i)
        let direct = cx(-0.3, 0.) / cx(0.9, 0.) * (cx(0.2, 0.3) / (cx(1., 0.) - cx(0., 0.3) * cx(0.2, 0.)));
        assert!((b.phi_at_lambda - direct).norm() < 1e-15);
        assert!((b.alpha + b.phi_at_lambda / b.phi_at_lambda.norm()).norm() < 1e-15);
    }

    #[test]
    fn precondition_errors() {
        assert!(matches!(build(vec![cx(0.5, 0.)], cx(1.0, 0.), Alpha::Canonical), Err(Error::InvalidLambda(_))));
        assert!(matches!(build(vec![cx(0.5, 0.)], cx(0.5, 0.), Alpha::Canonical), Err(Error::CanonicalAlphaUndefined)));
        let phi = BlaschkeProduct::new(vec![cx(0.95, 0.), cx(-0.9, 0.2)], cx(1., 0.)).unwrap();
        assert!(matches!(
            blaschke_model_space(&phi, cx(0., 0.), Alpha::Canonical, 32, &Tolerance::default()),
            Err(Error::QuadratureTooCoarse(_))
        ));
        assert!(BlaschkeProduct::<f64>::new(vec![], cx(1., 0.)).is_err());
        assert!(BlaschkeProduct::new(vec![cx(1., 0.)], cx(1., 0.)).is_err());
        assert!(BlaschkeProduct::new(vec![cx(0., 0.)], cx(2., 0.)).is_err());
    }

    #[test]
    fn json_round_trip() {
        let phi = BlaschkeProduct::new(vec![cx(0.1, 0.2)], cx(0., 1.)).unwrap();
        let text = serde_json::to_string(&phi.to_json()).unwrap();
        assert_eq!(text, r#"{"zeros":[[0.1,0.2]],"factor":[0.0,1.0]}"#);
        let back = BlaschkeProduct::<f64>::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back, phi);
    }

    fn random_disk<R: Rng>(rng: &mut R, radius: f64) -> Cx<f64> {
        let r = radius * rng.random::<f64>().sqrt();
        cis(rng.random_range(0.0..std::f64::consts::TAU)) * r
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(256))]

        #[test]
        fn random_products_satisfy_identities(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let d = rng.random_range(1..=8);
            let zeros: Vec<Cx<f64>> = (0..d).map(|_| random_disk(&mut rng, 0.9)).collect();
            let factor = cis(rng.random_range(0.0..std::f64::consts::TAU));
            let lambda = random_disk(&mut rng, 0.9);
            let phi = BlaschkeProduct::new(zeros, factor).unwrap();
            let b = blaschke_model_space(&phi, lambda, Alpha::Canonical, DEFAULT_QUADRATURE, &Tolerance::default()).unwrap();
            prop_assert!(b.checks.shift_identity <= 1e-10);
            prop_assert!(b.checks.csym_s <= 1e-10);
            prop_assert!(b.checks.csym_u <= 1e-10);
            prop_assert!(b.checks.unitarity <= 1e-10);
            prop_assert!(b.checks.q_vs_ck <= 1e-10);
        }
    }
}
