//! Closed-form curvature of the implicit boundary in 2D and 3D input space.
//!
//! Both formulas treat the boundary as a graph over a chart that solves one
//! coordinate (the one with the largest gradient component) in terms of the
//! others. Curvature is geometric: its value must not depend on which
//! solvable axis the chart picks, and the chart-invariance tests enforce
//! that.

use crate::derivatives::DerivativeBundle;
use crate::error::{Error, Result};
use crate::field::ScalarField;
use serde::Serialize;

/// Relative singularity threshold: a sample is rejected when
/// `|grad f| < SINGULAR_EPS * (1 + |f|)`, since every curvature denominator
/// vanishes with the gradient.
pub const SINGULAR_EPS: f64 = 1e-8;

/// Samples whose gradient is within this factor of the singularity
/// threshold are flagged marginal instead of being silently computed.
pub const MARGINAL_EPS: f64 = 1e-4;

/// Local chart: the dependent axis is solved as a function of the others.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChartFrame {
    /// Axis solved by the implicit function theorem.
    pub dependent_axis: usize,
    /// Permutation of `0..d`: tangent axes in ascending order, dependent last.
    pub order: Vec<usize>,
}

impl ChartFrame {
    /// Chart solving for `axis` in a `dim`-dimensional space.
    pub fn solving_for(axis: usize, dim: usize) -> Result<Self> {
        if axis >= dim {
            return Err(Error::contract(format!(
                "dependent axis {axis} out of range for dimension {dim}"
            )));
        }
        let mut order: Vec<usize> = (0..dim).filter(|&i| i != axis).collect();
        order.push(axis);
        Ok(ChartFrame {
            dependent_axis: axis,
            order,
        })
    }

    pub fn dim(&self) -> usize {
        self.order.len()
    }
}

/// Threshold below which a gradient counts as singular at value scale `f`.
pub fn singular_threshold(value: f64) -> f64 {
    SINGULAR_EPS * (1.0 + value.abs())
}

fn ensure_not_singular(bundle: &DerivativeBundle) -> Result<()> {
    let threshold = singular_threshold(bundle.value);
    let grad_norm = bundle.grad_norm();
    if grad_norm < threshold {
        return Err(Error::SingularPoint {
            grad_norm,
            threshold,
        });
    }
    Ok(())
}

/// Chart with the largest-magnitude gradient component as dependent axis;
/// ties break to the lowest index.
pub fn select_chart(grad: &[f64]) -> Result<ChartFrame> {
    let mut best = 0usize;
    let mut best_abs = 0.0f64;
    for (i, g) in grad.iter().enumerate() {
        if g.abs() > best_abs {
            best_abs = g.abs();
            best = i;
        }
    }
    if best_abs == 0.0 {
        return Err(Error::SingularPoint {
            grad_norm: 0.0,
            threshold: 0.0,
        });
    }
    ChartFrame::solving_for(best, grad.len())
}

fn chart_component(bundle: &DerivativeBundle, frame: &ChartFrame) -> Result<()> {
    let dep = frame.dependent_axis;
    let fd = bundle.grad[dep];
    if fd.abs() < singular_threshold(bundle.value) {
        return Err(Error::ChartDegenerate {
            axis: dep,
            dep_component: fd,
        });
    }
    Ok(())
}

/// Planar curvature `k >= 0` of the boundary curve in 2D.
pub fn planar_curvature(bundle: &DerivativeBundle) -> Result<f64> {
    ensure_not_singular(bundle)?;
    let frame = select_chart(bundle.grad.as_slice())?;
    planar_curvature_in_chart(bundle, &frame)
}

/// Planar curvature evaluated in an explicitly chosen chart.
pub fn planar_curvature_in_chart(bundle: &DerivativeBundle, frame: &ChartFrame) -> Result<f64> {
    if bundle.dim() != 2 || frame.dim() != 2 {
        return Err(Error::contract("planar curvature requires dimension 2"));
    }
    chart_component(bundle, frame)?;
    let (ix, iy) = (frame.order[0], frame.order[1]);
    let fx = bundle.grad[ix];
    let fy = bundle.grad[iy];
    let fxx = bundle.hess[(ix, ix)];
    let fxy = bundle.hess[(ix, iy)];
    let fyy = bundle.hess[(iy, iy)];
    let numerator = fxx * fy * fy - 2.0 * fx * fy * fxy + fx * fx * fyy;
    let slope = fx / fy;
    Ok((numerator / (fy * fy * fy)).abs() * (1.0 + slope * slope).powf(-1.5))
}

/// Signed planar curvature with respect to the orientation whose tangent is
/// the gradient rotated a quarter turn counterclockwise (the positive region
/// lies to the right of the traversal). The magnitude equals
/// [`planar_curvature`]; the sign convention is this library's choice.
pub fn signed_planar_curvature(bundle: &DerivativeBundle) -> Result<f64> {
    if bundle.dim() != 2 {
        return Err(Error::contract("signed curvature requires dimension 2"));
    }
    ensure_not_singular(bundle)?;
    let fx = bundle.grad[0];
    let fy = bundle.grad[1];
    let numerator = bundle.hess[(0, 0)] * fy * fy - 2.0 * fx * fy * bundle.hess[(0, 1)]
        + bundle.hess[(1, 1)] * fx * fx;
    Ok(numerator / bundle.grad_norm().powi(3))
}

/// Gaussian curvature `K` of the boundary surface in 3D (sign-carrying).
pub fn gaussian_curvature(bundle: &DerivativeBundle) -> Result<f64> {
    ensure_not_singular(bundle)?;
    let frame = select_chart(bundle.grad.as_slice())?;
    gaussian_curvature_in_chart(bundle, &frame)
}

/// Gaussian curvature evaluated in an explicitly chosen chart.
pub fn gaussian_curvature_in_chart(bundle: &DerivativeBundle, frame: &ChartFrame) -> Result<f64> {
    if bundle.dim() != 3 || frame.dim() != 3 {
        return Err(Error::contract("Gaussian curvature requires dimension 3"));
    }
    chart_component(bundle, frame)?;
    let (ix, iy, iz) = (frame.order[0], frame.order[1], frame.order[2]);
    let fx = bundle.grad[ix];
    let fy = bundle.grad[iy];
    let fz = bundle.grad[iz];
    let fxx = bundle.hess[(ix, ix)];
    let fyy = bundle.hess[(iy, iy)];
    let fzz = bundle.hess[(iz, iz)];
    let fxy = bundle.hess[(ix, iy)];
    let fxz = bundle.hess[(ix, iz)];
    let fyz = bundle.hess[(iy, iz)];
    let term_x = 2.0 * fx * fz * fxz - fxx * fz * fz - fzz * fx * fx;
    let term_y = 2.0 * fy * fz * fyz - fyy * fz * fz - fzz * fy * fy;
    let cross = fx * fz * fyz + fy * fz * fxz - fx * fy * fzz - fxy * fz * fz;
    let grad_sq = fx * fx + fy * fy + fz * fz;
    Ok((term_x * term_y - cross * cross) / (fz * fz * grad_sq * grad_sq))
}

/// Quality of the chart at a sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ChartQuality {
    Good,
    /// Gradient within [`MARGINAL_EPS`] of the singularity scale; the value
    /// is reported but numerically fragile.
    Marginal,
}

/// Curvature (`k` in 2D, `K` in 3D) evaluated at one boundary point.
#[derive(Debug, Clone, Serialize)]
pub struct CurvatureSample {
    pub point: Vec<f64>,
    pub curvature: f64,
    pub grad_norm: f64,
    pub dependent_axis: usize,
    pub quality: ChartQuality,
}

/// Evaluate curvature of the field's boundary at `point` (dimension decides
/// between planar and Gaussian curvature).
pub fn sample_curvature<F: ScalarField>(field: &F, point: &[f64]) -> Result<CurvatureSample> {
    if point.len() != field.dim() {
        return Err(Error::contract(format!(
            "point dimension {} != field dimension {}",
            point.len(),
            field.dim()
        )));
    }
    let bundle = field.bundle_at(point, false)?;
    ensure_not_singular(&bundle)?;
    let frame = select_chart(bundle.grad.as_slice())?;
    let curvature = match field.dim() {
        2 => planar_curvature_in_chart(&bundle, &frame)?,
        3 => gaussian_curvature_in_chart(&bundle, &frame)?,
        d => {
            return Err(Error::UnsupportedDimension {
                dim: d,
                reason: "closed-form curvature exists for input dimension 2 and 3".into(),
            })
        }
    };
    let grad_norm = bundle.grad_norm();
    let quality = if grad_norm < MARGINAL_EPS * (1.0 + bundle.value.abs()) {
        ChartQuality::Marginal
    } else {
        ChartQuality::Good
    };
    Ok(CurvatureSample {
        point: point.to_vec(),
        curvature,
        grad_norm,
        dependent_axis: frame.dependent_axis,
        quality,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{Hyperplane, Sphere, Torus};
    use crate::network::{ActivationKind, Layer, MlpNetwork};
    use approx::assert_relative_eq;
    use nalgebra::{DMatrix, DVector};

    #[test]
    fn circle_curvature_is_inverse_radius() {
        let circle = Sphere::centered(2, 2.0);
        for angle in [0.0f64, 0.4, 1.1, 2.9, 4.4] {
            let p = [2.0 * angle.cos(), 2.0 * angle.sin()];
            let b = circle.bundle_at(&p, false).unwrap();
            let k = planar_curvature(&b).unwrap();
            assert_relative_eq!(k, 0.5, max_relative = 1e-12);
        }
    }

    #[test]
    fn line_has_zero_curvature() {
        let line = Hyperplane {
            normal: vec![3.0, 4.0],
            offset: 1.0,
        };
        let p = [1.0, -0.5];
        let b = line.bundle_at(&p, false).unwrap();
        assert_eq!(planar_curvature(&b).unwrap(), 0.0);
        assert_eq!(signed_planar_curvature(&b).unwrap(), 0.0);
    }

    #[test]
    fn sphere_gaussian_curvature() {
        let sphere = Sphere::centered(3, 2.0);
        for p in [
            [2.0, 0.0, 0.0],
            [0.0, 0.0, -2.0],
            [2.0 / 3.0_f64.sqrt(), 2.0 / 3.0_f64.sqrt(), 2.0 / 3.0_f64.sqrt()],
        ] {
            let b = sphere.bundle_at(&p, false).unwrap();
            assert_relative_eq!(gaussian_curvature(&b).unwrap(), 0.25, max_relative = 1e-12);
        }
    }

    #[test]
    fn torus_curvature_signs_and_values() {
        let torus = Torus {
            major: 2.0,
            minor: 0.5,
        };
        // classical parametric value: K = cos(theta) / (minor (major + minor cos(theta)))
        let outer = torus.bundle_at(&[2.5, 0.0, 0.0], false).unwrap();
        let k_outer = gaussian_curvature(&outer).unwrap();
        assert!(k_outer > 0.0);
        assert_relative_eq!(k_outer, 1.0 / (0.5 * 2.5), max_relative = 1e-10);

        let inner = torus.bundle_at(&[1.5, 0.0, 0.0], false).unwrap();
        let k_inner = gaussian_curvature(&inner).unwrap();
        assert!(k_inner < 0.0);
        assert_relative_eq!(k_inner, -1.0 / (0.5 * 1.5), max_relative = 1e-10);

        // a generic point, against the same classical formula
        let theta: f64 = 0.9;
        let phi: f64 = 0.6;
        let rho = 2.0 + 0.5 * theta.cos();
        let p = [rho * phi.cos(), rho * phi.sin(), 0.5 * theta.sin()];
        let b = torus.bundle_at(&p, false).unwrap();
        assert_relative_eq!(
            gaussian_curvature(&b).unwrap(),
            theta.cos() / (0.5 * rho),
            max_relative = 1e-9
        );
    }

    #[test]
    fn select_chart_examples() {
        let f = select_chart(&[0.1, -3.0, 0.5]).unwrap();
        assert_eq!(f.dependent_axis, 1);
        assert_eq!(f.order, vec![0, 2, 1]);
        let f = select_chart(&[1.0, 1.0]).unwrap();
        assert_eq!(f.dependent_axis, 0);
        assert!(select_chart(&[0.0, 0.0]).is_err());
    }

    #[test]
    fn unsigned_curvature_never_negative() {
        let net = MlpNetwork::random(&[2, 9], ActivationKind::Tanh, 1.2, 40).unwrap();
        let mut s = 0.9f64;
        for _ in 0..200 {
            let x: Vec<f64> = (0..2)
                .map(|_| {
                    s = (s * 631.3).sin();
                    1.5 * s
                })
                .collect();
            let b = crate::derivatives::bundle(&net, &x, false).unwrap();
            if let Ok(k) = planar_curvature(&b) {
                assert!(k >= 0.0);
                assert_relative_eq!(
                    k,
                    signed_planar_curvature(&b).unwrap().abs(),
                    max_relative = 1e-10,
                    epsilon = 1e-12
                );
            }
        }
    }

    #[test]
    fn chart_invariance_where_both_axes_are_solvable() {
        for seed in 0..20u64 {
            let net = MlpNetwork::random(&[3, 8], ActivationKind::Tanh, 1.0, 100 + seed).unwrap();
            let mut s = 0.31 + seed as f64;
            let mut checked = 0;
            while checked < 5 {
                let x: Vec<f64> = (0..3)
                    .map(|_| {
                        s = (s * 881.7).sin();
                        1.2 * s
                    })
                    .collect();
                let b = crate::derivatives::bundle(&net, &x, false).unwrap();
                let gnorm = b.grad_norm();
                if gnorm < 1e-3 {
                    continue;
                }
                let solvable: Vec<usize> = (0..3)
                    .filter(|&i| b.grad[i].abs() > 0.1 * gnorm)
                    .collect();
                if solvable.len() < 2 {
                    continue;
                }
                let k0 = gaussian_curvature_in_chart(
                    &b,
                    &ChartFrame::solving_for(solvable[0], 3).unwrap(),
                )
                .unwrap();
                let k1 = gaussian_curvature_in_chart(
                    &b,
                    &ChartFrame::solving_for(solvable[1], 3).unwrap(),
                )
                .unwrap();
                assert_relative_eq!(k0, k1, max_relative = 1e-8, epsilon = 1e-12);
                checked += 1;
            }
        }
    }

    #[test]
    fn planar_chart_invariance() {
        let net = MlpNetwork::random(&[2, 8], ActivationKind::Sigmoid, 1.4, 8).unwrap();
        let mut s = 0.77f64;
        let mut checked = 0;
        while checked < 20 {
            let x: Vec<f64> = (0..2)
                .map(|_| {
                    s = (s * 417.9).sin();
                    1.5 * s
                })
                .collect();
            let b = crate::derivatives::bundle(&net, &x, false).unwrap();
            let gnorm = b.grad_norm();
            if gnorm < 1e-3
                || b.grad[0].abs() <= 0.1 * gnorm
                || b.grad[1].abs() <= 0.1 * gnorm
            {
                continue;
            }
            let k0 =
                planar_curvature_in_chart(&b, &ChartFrame::solving_for(0, 2).unwrap()).unwrap();
            let k1 =
                planar_curvature_in_chart(&b, &ChartFrame::solving_for(1, 2).unwrap()).unwrap();
            assert_relative_eq!(k0, k1, max_relative = 1e-8, epsilon = 1e-12);
            checked += 1;
        }
    }

    #[test]
    fn level_scaling_leaves_curvature_unchanged() {
        let net = MlpNetwork::random(&[3, 7], ActivationKind::Tanh, 0.9, 51).unwrap();
        let scaled = net.scaled_output(37.5);
        let x = [0.2, -0.1, 0.4];
        let b1 = crate::derivatives::bundle(&net, &x, false).unwrap();
        let b2 = crate::derivatives::bundle(&scaled, &x, false).unwrap();
        let k1 = gaussian_curvature(&b1).unwrap();
        let k2 = gaussian_curvature(&b2).unwrap();
        assert_relative_eq!(k1, k2, max_relative = 1e-12);
    }

    #[test]
    fn rigid_rotation_leaves_curvature_unchanged() {
        // absorb a rotation R into the first layer: W1 -> W1 R evaluates the
        // original network at R x
        let net = MlpNetwork::random(&[3, 7], ActivationKind::Tanh, 0.9, 52).unwrap();
        let angle: f64 = 0.83;
        let rot = DMatrix::from_row_slice(
            3,
            3,
            &[
                angle.cos(),
                -angle.sin(),
                0.0,
                angle.sin(),
                angle.cos(),
                0.0,
                0.0,
                0.0,
                1.0,
            ],
        );
        let rotated = MlpNetwork::new(
            vec![Layer {
                weight: &net.layers()[0].weight * &rot,
                bias: net.layers()[0].bias.clone(),
            }],
            net.output_weights().clone(),
            net.output_bias(),
            net.activation(),
        )
        .unwrap();
        let x = DVector::from_vec(vec![0.3, 0.1, -0.2]);
        let rx = &rot * &x;
        let b_orig = crate::derivatives::bundle(&net, rx.as_slice(), false).unwrap();
        let b_rot = crate::derivatives::bundle(&rotated, x.as_slice(), false).unwrap();
        assert_relative_eq!(
            gaussian_curvature(&b_orig).unwrap(),
            gaussian_curvature(&b_rot).unwrap(),
            max_relative = 1e-8
        );
    }

    #[test]
    fn osculating_circle_matches_planar_curvature() {
        // boundary of a small trained-like net, curvature vs the circle
        // through three nearby boundary points
        let net = MlpNetwork::random(&[2, 6], ActivationKind::Tanh, 1.1, 64).unwrap();
        // find a boundary crossing along a vertical line by bisection
        let locate = |x0: f64| -> Option<[f64; 2]> {
            let (mut lo, mut hi) = (-2.0f64, 2.0f64);
            let flo = net.value(&[x0, lo]).unwrap();
            let fhi = net.value(&[x0, hi]).unwrap();
            if flo.signum() == fhi.signum() {
                return None;
            }
            let (mut lo_v, _) = (flo, fhi);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                let fm = net.value(&[x0, mid]).unwrap();
                if fm.signum() == lo_v.signum() {
                    lo = mid;
                    lo_v = fm;
                } else {
                    hi = mid;
                }
            }
            Some([x0, 0.5 * (lo + hi)])
        };
        let delta = 2e-3;
        let (mut found, mut tested) = (0, 0);
        let mut x0 = -0.9;
        while tested < 40 && found < 3 {
            tested += 1;
            x0 += 0.045;
            let (Some(p0), Some(pm), Some(pp)) =
                (locate(x0), locate(x0 - delta), locate(x0 + delta))
            else {
                continue;
            };
            let b = crate::derivatives::bundle(&net, &p0, false).unwrap();
            if b.grad[1].abs() < 0.3 * b.grad_norm() {
                continue; // steep boundary: vertical-line neighbors are far apart
            }
            let k = planar_curvature(&b).unwrap();
            if k < 1e-3 {
                continue;
            }
            // circumradius of the three points
            let (ax, ay) = (pm[0], pm[1]);
            let (bx, by) = (p0[0], p0[1]);
            let (cx, cy) = (pp[0], pp[1]);
            let area2 = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax);
            let la = ((bx - cx).powi(2) + (by - cy).powi(2)).sqrt();
            let lb = ((ax - cx).powi(2) + (ay - cy).powi(2)).sqrt();
            let lc = ((ax - bx).powi(2) + (ay - by).powi(2)).sqrt();
            let radius = la * lb * lc / (2.0 * area2.abs());
            assert_relative_eq!(k, 1.0 / radius, max_relative = 5e-3);
            found += 1;
        }
        assert!(found >= 1, "no usable boundary points found");
    }
}
