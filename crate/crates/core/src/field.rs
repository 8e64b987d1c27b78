//! Scalar fields whose zero level set is the surface under study.
//!
//! Networks are one implementor; the analytic surfaces here (spheres, torus,
//! products, a genus-2 pretzel) have known geometry and serve as oracles for
//! extraction, curvature and topology.

use crate::derivatives::DerivativeBundle;
use crate::error::Result;
use crate::network::MlpNetwork;
use crate::tensor::Tensor3;
use nalgebra::{DMatrix, DVector};

/// A smooth scalar field `f: R^d -> R`.
///
/// `eval` and `bundle_at` expect `x.len() == dim()`; entry points that accept
/// user data validate dimensions before the hot loops run.
pub trait ScalarField: Sync {
    fn dim(&self) -> usize;

    fn eval(&self, x: &[f64]) -> f64;

    /// Value, gradient, Hessian and optionally the third-order tensor at `x`.
    fn bundle_at(&self, x: &[f64], want_third: bool) -> Result<DerivativeBundle>;

    fn grad_at(&self, x: &[f64]) -> Result<DVector<f64>> {
        Ok(self.bundle_at(x, false)?.grad)
    }
}

impl<T: ScalarField + ?Sized> ScalarField for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn eval(&self, x: &[f64]) -> f64 {
        (**self).eval(x)
    }
    fn bundle_at(&self, x: &[f64], want_third: bool) -> Result<DerivativeBundle> {
        (**self).bundle_at(x, want_third)
    }
}

impl ScalarField for MlpNetwork {
    fn dim(&self) -> usize {
        self.input_dim()
    }

    fn eval(&self, x: &[f64]) -> f64 {
        self.value(x).expect("input dimension validated by caller")
    }

    fn bundle_at(&self, x: &[f64], want_third: bool) -> Result<DerivativeBundle> {
        crate::derivatives::bundle(self, x, want_third)
    }

    fn grad_at(&self, x: &[f64]) -> Result<DVector<f64>> {
        crate::derivatives::gradient(self, x)
    }
}

/// `f(x) = |x - center|^2 - radius^2` in any dimension.
#[derive(Debug, Clone)]
pub struct Sphere {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl Sphere {
    pub fn unit(dim: usize) -> Self {
        Sphere {
            center: vec![0.0; dim],
            radius: 1.0,
        }
    }

    pub fn centered(dim: usize, radius: f64) -> Self {
        Sphere {
            center: vec![0.0; dim],
            radius,
        }
    }
}

impl ScalarField for Sphere {
    fn dim(&self) -> usize {
        self.center.len()
    }

    fn eval(&self, x: &[f64]) -> f64 {
        let mut s = -self.radius * self.radius;
        for (xi, ci) in x.iter().zip(&self.center) {
            s += (xi - ci) * (xi - ci);
        }
        s
    }

    fn bundle_at(&self, x: &[f64], want_third: bool) -> Result<DerivativeBundle> {
        let d = self.dim();
        let grad = DVector::from_fn(d, |i, _| 2.0 * (x[i] - self.center[i]));
        let hess = DMatrix::from_diagonal_element(d, d, 2.0);
        let third = want_third.then(|| Tensor3::zeros(d));
        Ok(DerivativeBundle::from_parts(
            self.eval(x),
            grad,
            hess,
            third,
        ))
    }
}

/// Torus around the z axis: `f = (sqrt(x^2 + y^2) - major)^2 + z^2 - minor^2`.
#[derive(Debug, Clone)]
pub struct Torus {
    pub major: f64,
    pub minor: f64,
}

impl ScalarField for Torus {
    fn dim(&self) -> usize {
        3
    }

    fn eval(&self, x: &[f64]) -> f64 {
        let rho = (x[0] * x[0] + x[1] * x[1]).sqrt();
        let dr = rho - self.major;
        dr * dr + x[2] * x[2] - self.minor * self.minor
    }

    fn bundle_at(&self, x: &[f64], want_third: bool) -> Result<DerivativeBundle> {
        let (px, py, pz) = (x[0], x[1], x[2]);
        let rho2 = px * px + py * py;
        let rho = rho2.sqrt();
        let r = self.major;
        // derivatives are singular on the torus axis rho = 0; the surface
        // itself stays well away from it for minor < major
        let grad = DVector::from_vec(vec![
            2.0 * px - 2.0 * r * px / rho,
            2.0 * py - 2.0 * r * py / rho,
            2.0 * pz,
        ]);
        let rho3 = rho2 * rho;
        let mut hess = DMatrix::zeros(3, 3);
        hess[(0, 0)] = 2.0 - 2.0 * r * py * py / rho3;
        hess[(1, 1)] = 2.0 - 2.0 * r * px * px / rho3;
        hess[(0, 1)] = 2.0 * r * px * py / rho3;
        hess[(1, 0)] = hess[(0, 1)];
        hess[(2, 2)] = 2.0;
        let third = want_third.then(|| {
            let rho5 = rho3 * rho2;
            let mut t = Tensor3::zeros(3);
            let sym3 = |t: &mut Tensor3, i: usize, j: usize, k: usize, v: f64| {
                t.set(i, j, k, v);
                t.set(i, k, j, v);
                t.set(j, i, k, v);
                t.set(j, k, i, v);
                t.set(k, i, j, v);
                t.set(k, j, i, v);
            };
            sym3(&mut t, 0, 0, 0, 6.0 * r * px * py * py / rho5);
            sym3(&mut t, 0, 0, 1, 2.0 * r * py * (py * py - 2.0 * px * px) / rho5);
            sym3(&mut t, 0, 1, 1, 2.0 * r * px * (px * px - 2.0 * py * py) / rho5);
            sym3(&mut t, 1, 1, 1, 6.0 * r * px * px * py / rho5);
            t
        });
        Ok(DerivativeBundle::from_parts(
            self.eval(x),
            grad,
            hess,
            third,
        ))
    }
}

/// Affine field `f(x) = normal . x - offset`; its zero set is a hyperplane.
#[derive(Debug, Clone)]
pub struct Hyperplane {
    pub normal: Vec<f64>,
    pub offset: f64,
}

impl ScalarField for Hyperplane {
    fn dim(&self) -> usize {
        self.normal.len()
    }

    fn eval(&self, x: &[f64]) -> f64 {
        x.iter().zip(&self.normal).map(|(a, b)| a * b).sum::<f64>() - self.offset
    }

    fn bundle_at(&self, x: &[f64], want_third: bool) -> Result<DerivativeBundle> {
        let d = self.dim();
        Ok(DerivativeBundle::from_parts(
            self.eval(x),
            DVector::from_vec(self.normal.clone()),
            DMatrix::zeros(d, d),
            want_third.then(|| Tensor3::zeros(d)),
        ))
    }
}

/// Product `f = u * v` of two fields over the same space; the zero set is
/// the union of the factors' zero sets.
#[derive(Debug, Clone)]
pub struct ProductField<U, V> {
    pub u: U,
    pub v: V,
}

impl<U: ScalarField, V: ScalarField> ScalarField for ProductField<U, V> {
    fn dim(&self) -> usize {
        self.u.dim()
    }

    fn eval(&self, x: &[f64]) -> f64 {
        self.u.eval(x) * self.v.eval(x)
    }

    fn bundle_at(&self, x: &[f64], want_third: bool) -> Result<DerivativeBundle> {
        let d = self.dim();
        let bu = self.u.bundle_at(x, want_third)?;
        let bv = self.v.bundle_at(x, want_third)?;
        let value = bu.value * bv.value;
        let grad = &bu.grad * bv.value + &bv.grad * bu.value;
        let mut hess = &bu.hess * bv.value + &bv.hess * bu.value;
        hess += &bu.grad * bv.grad.transpose() + &bv.grad * bu.grad.transpose();
        let third = if want_third {
            let tu = bu.third.as_ref().expect("requested third");
            let tv = bv.third.as_ref().expect("requested third");
            let mut t = Tensor3::zeros(d);
            for p in 0..d {
                for q in 0..d {
                    for r in 0..d {
                        let v = tu.get(p, q, r) * bv.value
                            + tv.get(p, q, r) * bu.value
                            + bu.hess[(p, q)] * bv.grad[r]
                            + bu.hess[(p, r)] * bv.grad[q]
                            + bu.hess[(q, r)] * bv.grad[p]
                            + bv.hess[(p, q)] * bu.grad[r]
                            + bv.hess[(p, r)] * bu.grad[q]
                            + bv.hess[(q, r)] * bu.grad[p];
                        t.set(p, q, r, v);
                    }
                }
            }
            Some(t)
        } else {
            None
        };
        Ok(DerivativeBundle::from_parts(value, grad, hess, third))
    }
}

/// Genus-2 "pretzel": `f = (x^4 - x^2 + y^2)^2 + z^2 - level`.
///
/// The inner curve `x^4 - x^2 + y^2 = 0` is a figure eight; thickening it by
/// `sqrt(level) < 1/2` produces a closed orientable surface with two handles
/// (Euler characteristic -2).
#[derive(Debug, Clone)]
pub struct Genus2 {
    pub level: f64,
}

impl ScalarField for Genus2 {
    fn dim(&self) -> usize {
        3
    }

    fn eval(&self, x: &[f64]) -> f64 {
        let g = x[0].powi(4) - x[0] * x[0] + x[1] * x[1];
        g * g + x[2] * x[2] - self.level
    }

    fn bundle_at(&self, x: &[f64], want_third: bool) -> Result<DerivativeBundle> {
        let (px, py, pz) = (x[0], x[1], x[2]);
        let g = px.powi(4) - px * px + py * py;
        let gx = 4.0 * px.powi(3) - 2.0 * px;
        let gy = 2.0 * py;
        let gxx = 12.0 * px * px - 2.0;
        let gxxx = 24.0 * px;
        let grad = DVector::from_vec(vec![2.0 * g * gx, 2.0 * g * gy, 2.0 * pz]);
        let mut hess = DMatrix::zeros(3, 3);
        hess[(0, 0)] = 2.0 * (gx * gx + g * gxx);
        hess[(0, 1)] = 2.0 * gx * gy;
        hess[(1, 0)] = hess[(0, 1)];
        hess[(1, 1)] = 2.0 * gy * gy + 4.0 * g;
        hess[(2, 2)] = 2.0;
        let third = want_third.then(|| {
            let mut t = Tensor3::zeros(3);
            let sym3 = |t: &mut Tensor3, i: usize, j: usize, k: usize, v: f64| {
                t.set(i, j, k, v);
                t.set(i, k, j, v);
                t.set(j, i, k, v);
                t.set(j, k, i, v);
                t.set(k, i, j, v);
                t.set(k, j, i, v);
            };
            sym3(&mut t, 0, 0, 0, 2.0 * (3.0 * gx * gxx + g * gxxx));
            sym3(&mut t, 0, 0, 1, 2.0 * gy * gxx);
            sym3(&mut t, 0, 1, 1, 4.0 * gx);
            sym3(&mut t, 1, 1, 1, 24.0 * py);
            t
        });
        Ok(DerivativeBundle::from_parts(
            self.eval(x),
            grad,
            hess,
            third,
        ))
    }
}
