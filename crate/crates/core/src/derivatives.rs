//! Exact input-space derivatives of the network output.
//!
//! The gradient is one reverse sweep through the cached pre-activations.
//! The Hessian is propagated forward: for every layer we carry the Jacobian
//! of the pre-activations with respect to the input together with one small
//! `d×d` Hessian block per neuron, so second derivatives stay exact for any
//! depth. Only the third-order tensor falls back to central differences of
//! the analytic Hessian when the network has more than one hidden layer —
//! the one-hidden-layer case has a closed form.

use crate::error::{Error, Result};
use crate::network::{LayerPreactivations, MlpNetwork};
use crate::tensor::Tensor3;
use nalgebra::{DMatrix, DVector};
use serde::Serialize;

/// Central-difference step for gradient validation.
pub const GRAD_FD_STEP: f64 = 1e-5;
/// Central-difference step for Hessian validation.
pub const HESS_FD_STEP: f64 = 1e-4;
/// Step for the third-order tensor, both for the deep-network fallback and
/// for validation.
pub const THIRD_FD_STEP: f64 = 1e-4;

/// How the third-order tensor in a [`DerivativeBundle`] was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThirdMethod {
    Exact,
    FiniteDifference,
}

/// Value, gradient, Hessian and (optionally) third-order tensor of `f` at a
/// single point. The Hessian is built symmetric; the third tensor is fully
/// symmetric under index permutation.
#[derive(Debug, Clone)]
pub struct DerivativeBundle {
    pub value: f64,
    pub grad: DVector<f64>,
    pub hess: DMatrix<f64>,
    pub third: Option<Tensor3>,
    pub third_method: Option<ThirdMethod>,
}

impl DerivativeBundle {
    pub fn dim(&self) -> usize {
        self.grad.len()
    }

    pub fn grad_norm(&self) -> f64 {
        self.grad.norm()
    }

    /// Bundle assembled from externally computed parts (analytic reference
    /// surfaces, test oracles).
    pub fn from_parts(
        value: f64,
        grad: DVector<f64>,
        hess: DMatrix<f64>,
        third: Option<Tensor3>,
    ) -> Self {
        let third_method = third.as_ref().map(|_| ThirdMethod::Exact);
        DerivativeBundle {
            value,
            grad,
            hess,
            third,
            third_method,
        }
    }
}

/// Gradient of `f` at `x`: one forward pass plus one reverse sweep.
pub fn gradient(net: &MlpNetwork, x: &[f64]) -> Result<DVector<f64>> {
    let (_, cache) = net.forward(x)?;
    Ok(gradient_with_cache(net, &cache))
}

/// Reverse sweep reusing cached pre-activations:
/// `grad = (W^1)ᵀ J(x^1) ⋯ (W^L)ᵀ J(x^L) a`.
pub fn gradient_with_cache(net: &MlpNetwork, cache: &LayerPreactivations) -> DVector<f64> {
    let act = net.activation();
    let mut v: DVector<f64> = net.output_weights().clone();
    for (layer, pre) in net.layers().iter().zip(cache.pre.iter()).rev() {
        for i in 0..v.len() {
            v[i] *= act.d1(pre[i]);
        }
        v = layer.weight.tr_mul(&v);
    }
    v
}

/// Exact Hessian of `f` at `x` for any depth.
pub fn hessian(net: &MlpNetwork, x: &[f64]) -> Result<DMatrix<f64>> {
    let (_, cache) = net.forward(x)?;
    Ok(hessian_with_cache(net, &cache))
}

pub fn hessian_with_cache(net: &MlpNetwork, cache: &LayerPreactivations) -> DMatrix<f64> {
    let act = net.activation();
    let d = net.input_dim();
    let depth = net.depth();

    // Jacobian of the current pre-activation w.r.t. x, and one d×d Hessian
    // block per neuron of the current pre-activation.
    let mut jac: DMatrix<f64> = net.layers()[0].weight.clone();
    let mut blocks: Vec<DMatrix<f64>> = vec![DMatrix::zeros(d, d); jac.nrows()];

    for l in 0..depth {
        let pre = &cache.pre[l];
        let width = pre.len();

        // Jacobian rows and Hessian blocks of the activated outputs h = σ(z).
        let mut h_blocks: Vec<DMatrix<f64>> = Vec::with_capacity(width);
        for i in 0..width {
            let row = jac.row(i).transpose();
            let outer = &row * row.transpose();
            h_blocks.push(outer * act.d2(pre[i]) + &blocks[i] * act.d1(pre[i]));
        }

        if l + 1 == depth {
            let a = net.output_weights();
            let mut hess = DMatrix::<f64>::zeros(d, d);
            for i in 0..width {
                hess += &h_blocks[i] * a[i];
            }
            // enforce bit-exact symmetry
            for p in 0..d {
                for q in (p + 1)..d {
                    let v = 0.5 * (hess[(p, q)] + hess[(q, p)]);
                    hess[(p, q)] = v;
                    hess[(q, p)] = v;
                }
            }
            return hess;
        }

        let next_w = &net.layers()[l + 1].weight;
        let mut h_jac = jac.clone();
        for i in 0..width {
            let s = act.d1(pre[i]);
            for j in 0..d {
                h_jac[(i, j)] *= s;
            }
        }
        jac = next_w * h_jac;
        let mut next_blocks: Vec<DMatrix<f64>> = vec![DMatrix::zeros(d, d); next_w.nrows()];
        for i in 0..next_w.nrows() {
            for j in 0..width {
                let w = next_w[(i, j)];
                if w != 0.0 {
                    next_blocks[i] += &h_blocks[j] * w;
                }
            }
        }
        blocks = next_blocks;
    }
    unreachable!("network depth is at least 1");
}

/// Third-order derivative tensor `f_{pqr}`. Closed form for one hidden
/// layer; central differences of the analytic Hessian otherwise.
pub fn third_derivatives(net: &MlpNetwork, x: &[f64]) -> Result<(Tensor3, ThirdMethod)> {
    net.check_input(x)?;
    let d = net.input_dim();
    if net.depth() == 1 {
        let (_, cache) = net.forward(x)?;
        let act = net.activation();
        let layer = &net.layers()[0];
        let a = net.output_weights();
        let mut t = Tensor3::zeros(d);
        for i in 0..layer.weight.nrows() {
            let coeff = a[i] * act.d3(cache.pre[0][i]);
            if coeff == 0.0 {
                continue;
            }
            for p in 0..d {
                let wp = layer.weight[(i, p)];
                for q in 0..d {
                    let wq = wp * layer.weight[(i, q)];
                    for r in 0..d {
                        let v = t.get(p, q, r) + coeff * wq * layer.weight[(i, r)];
                        t.set(p, q, r, v);
                    }
                }
            }
        }
        Ok((t, ThirdMethod::Exact))
    } else {
        let h = THIRD_FD_STEP;
        let mut t = Tensor3::zeros(d);
        let mut xp = x.to_vec();
        for r in 0..d {
            xp[r] = x[r] + h;
            let hp = hessian(net, &xp)?;
            xp[r] = x[r] - h;
            let hm = hessian(net, &xp)?;
            xp[r] = x[r];
            for p in 0..d {
                for q in 0..d {
                    t.set(p, q, r, (hp[(p, q)] - hm[(p, q)]) / (2.0 * h));
                }
            }
        }
        t.symmetrize();
        Ok((t, ThirdMethod::FiniteDifference))
    }
}

/// Aggregate value, gradient, Hessian and optional third tensor sharing one
/// forward cache.
pub fn bundle(net: &MlpNetwork, x: &[f64], want_third: bool) -> Result<DerivativeBundle> {
    let (value, cache) = net.forward(x)?;
    let grad = gradient_with_cache(net, &cache);
    let hess = hessian_with_cache(net, &cache);
    let (third, third_method) = if want_third {
        let (t, m) = third_derivatives(net, x)?;
        (Some(t), Some(m))
    } else {
        (None, None)
    };
    Ok(DerivativeBundle {
        value,
        grad,
        hess,
        third,
        third_method,
    })
}

/// Maximum relative discrepancies between the analytic derivatives and
/// central finite differences at one point. Never fails on large
/// discrepancies — it reports them.
#[derive(Debug, Clone, Serialize)]
pub struct FdReport {
    pub grad_step: f64,
    pub hess_step: f64,
    pub third_step: f64,
    pub grad_rel_err: f64,
    pub hess_rel_err: f64,
    pub third_rel_err: f64,
}

fn rel_scale_err(diff_max: f64, scale_max: f64) -> f64 {
    diff_max / (scale_max + 1e-12)
}

/// Compare analytic gradient/Hessian/third against central differences.
///
/// The gradient check uses step `h`, the Hessian check `10h` (differencing
/// the analytic gradient) and the third-order check `100h` (cross second
/// difference of the analytic gradient, which is independent of the
/// Hessian-differencing path used for deep networks).
pub fn fd_check(net: &MlpNetwork, x: &[f64], h: f64) -> Result<FdReport> {
    if !(h > 0.0) {
        return Err(Error::contract("fd step must be positive"));
    }
    let d = net.input_dim();
    let b = bundle(net, x, true)?;

    let mut xp = x.to_vec();
    let mut grad_diff = 0.0f64;
    for i in 0..d {
        xp[i] = x[i] + h;
        let fp = net.value(&xp)?;
        xp[i] = x[i] - h;
        let fm = net.value(&xp)?;
        xp[i] = x[i];
        grad_diff = grad_diff.max(((fp - fm) / (2.0 * h) - b.grad[i]).abs());
    }
    let grad_rel_err = rel_scale_err(grad_diff, b.grad.amax());

    let hh = 10.0 * h;
    let mut hess_diff = 0.0f64;
    for j in 0..d {
        xp[j] = x[j] + hh;
        let gp = gradient(net, &xp)?;
        xp[j] = x[j] - hh;
        let gm = gradient(net, &xp)?;
        xp[j] = x[j];
        for i in 0..d {
            hess_diff = hess_diff.max(((gp[i] - gm[i]) / (2.0 * hh) - b.hess[(i, j)]).abs());
        }
    }
    let hess_rel_err = rel_scale_err(hess_diff, b.hess.amax());

    let h3 = 100.0 * h;
    let third = b.third.as_ref().expect("bundle was built with third");
    let mut third_diff = 0.0f64;
    for q in 0..d {
        for r in q..d {
            let probe = |sq: f64, sr: f64| -> Result<DVector<f64>> {
                let mut y = x.to_vec();
                y[q] += sq * h3;
                y[r] += sr * h3;
                gradient(net, &y)
            };
            let gpp = probe(1.0, 1.0)?;
            let gpm = probe(1.0, -1.0)?;
            let gmp = probe(-1.0, 1.0)?;
            let gmm = probe(-1.0, -1.0)?;
            for p in 0..d {
                let fd = (gpp[p] - gpm[p] - gmp[p] + gmm[p]) / (4.0 * h3 * h3);
                third_diff = third_diff.max((fd - third.get(p, q, r)).abs());
            }
        }
    }
    let third_rel_err = rel_scale_err(third_diff, third.max_abs());

    Ok(FdReport {
        grad_step: h,
        hess_step: hh,
        third_step: h3,
        grad_rel_err,
        hess_rel_err,
        third_rel_err,
    })
}
