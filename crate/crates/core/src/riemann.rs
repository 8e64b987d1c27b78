//! Intrinsic geometry of the boundary as a (d-1)-manifold: metric tensor,
//! Christoffel symbols, Riemann curvature tensor, curvature 2-form and the
//! Euler-form density.
//!
//! The boundary is treated as a graph over the chart's tangent axes, with
//! the dependent coordinate solved implicitly. Derivatives *along* the
//! manifold therefore differ from ambient partials: for any ambient
//! function `φ`, `D_k φ = φ_k - φ_d f_k / f_d`. All tensors below live in
//! chart indices `0..m` where `m = d - 1`.
//!
//! Index conventions (upper; lower...):
//!   gamma[(m, i, k)]      = Γ^m_{ik}
//!   dgamma[(i, a, k, b)]  = ∂_i Γ^a_{kb}
//!   riemann[(a, b, i, k)] = R^a_{bik}
//!   two_form[(a, b, i, k)] = Ω_{ab,ik} (coefficient of dx^i ∧ dx^k)
//!
//! The connection derivative ∂Γ is the error-prone core, so it has two
//! independent computation paths: an analytic one through third
//! derivatives of `f`, and a finite-difference one that steps along the
//! manifold and re-solves the dependent coordinate. A cross-check helper
//! compares them.

use crate::curvature::{singular_threshold, ChartFrame};
use crate::derivatives::DerivativeBundle;
use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::tensor::{signed_permutations, Tensor3, Tensor4};
use nalgebra::DMatrix;
use serde::Serialize;
use std::f64::consts::PI;

/// Default step for the manifold finite-difference path.
pub const DEFAULT_MANIFOLD_STEP: f64 = 1e-4;

/// First fundamental form data at a point.
#[derive(Debug, Clone)]
pub struct MetricData {
    pub g: DMatrix<f64>,
    pub g_inv: DMatrix<f64>,
    pub det_g: f64,
    /// `dg[(k, i, j)] = ∂_k g_ij`
    pub dg: Tensor3,
}

/// Riemannian connection data at a point.
#[derive(Debug, Clone)]
pub struct ConnectionData {
    pub gamma: Tensor3,
    pub dgamma: Tensor4,
}

/// Curvature tensors at a point.
#[derive(Debug, Clone)]
pub struct CurvatureData {
    pub riemann: Tensor4,
    pub two_form: Tensor4,
    /// Present only when the boundary dimension is even (2 or 4).
    pub euler_density: Option<f64>,
}

/// How to obtain the connection derivative.
#[derive(Debug, Clone, Copy)]
pub enum DgammaPath {
    /// Assemble ∂Γ from exact manifold derivatives of the metric; requires
    /// third derivatives of `f`.
    Analytic,
    /// Central differences of Γ along the manifold, re-solving the
    /// dependent coordinate at each probe.
    ManifoldFd { step: f64 },
}

// Chart-permuted view of a derivative bundle: index m is the dependent axis.
struct ChartView {
    m: usize,
    f: Vec<f64>,
    h: Vec<Vec<f64>>,
    t: Option<Vec<Vec<Vec<f64>>>>,
}

impl ChartView {
    fn new(bundle: &DerivativeBundle, frame: &ChartFrame) -> Result<Self> {
        let d = frame.dim();
        if bundle.dim() != d {
            return Err(Error::contract("bundle and chart dimensions differ"));
        }
        let p = &frame.order;
        let f: Vec<f64> = p.iter().map(|&i| bundle.grad[i]).collect();
        let fd = f[d - 1];
        if fd.abs() < singular_threshold(bundle.value) {
            return Err(Error::ChartDegenerate {
                axis: frame.dependent_axis,
                dep_component: fd,
            });
        }
        let h: Vec<Vec<f64>> = p
            .iter()
            .map(|&i| p.iter().map(|&j| bundle.hess[(i, j)]).collect())
            .collect();
        let t = bundle.third.as_ref().map(|t3| {
            p.iter()
                .map(|&i| {
                    p.iter()
                        .map(|&j| p.iter().map(|&k| t3.get(i, j, k)).collect())
                        .collect()
                })
                .collect()
        });
        Ok(ChartView { m: d - 1, f, h, t })
    }

    #[inline]
    fn fd(&self) -> f64 {
        self.f[self.m]
    }

    /// Manifold derivative of the gradient component `f_i` along tangent
    /// coordinate `k`.
    #[inline]
    fn df(&self, k: usize, i: usize) -> f64 {
        self.h[i][k] - self.h[i][self.m] * self.f[k] / self.fd()
    }
}

/// Metric tensor, inverse, determinant and first manifold derivative from
/// first and second derivatives of `f`.
pub fn metric_at(bundle: &DerivativeBundle, frame: &ChartFrame) -> Result<MetricData> {
    let view = ChartView::new(bundle, frame)?;
    let m = view.m;
    let fd = view.fd();
    let q = 1.0 / (fd * fd);

    let mut g = DMatrix::<f64>::identity(m, m);
    for i in 0..m {
        for j in 0..m {
            g[(i, j)] += view.f[i] * view.f[j] * q;
        }
    }

    // g = I + v v^T is symmetric positive definite by construction; the
    // factorization failing means the chart itself is broken.
    let chol = g.clone().cholesky().ok_or_else(|| {
        Error::Numerical("induced metric is not positive definite".into())
    })?;
    let g_inv = chol.inverse();
    let det_g = g.determinant();
    let identity_err = (&g * &g_inv - DMatrix::<f64>::identity(m, m)).amax();
    if identity_err > 1e-10 {
        return Err(Error::Numerical(format!(
            "metric inverse failed: |g g^-1 - I| = {identity_err:.3e}"
        )));
    }

    let mut dg = Tensor3::zeros(m);
    for k in 0..m {
        let dq = -2.0 * view.df(k, m) / (fd * fd * fd);
        for i in 0..m {
            for j in i..m {
                let v = view.df(k, i) * view.f[j] * q
                    + view.f[i] * view.df(k, j) * q
                    + view.f[i] * view.f[j] * dq;
                dg.set(k, i, j, v);
                dg.set(k, j, i, v);
            }
        }
    }

    Ok(MetricData { g, g_inv, det_g, dg })
}

/// Christoffel symbols `Γ^m_{ik} = ½ Σ_j g^{mj} (∂_k g_ij + ∂_i g_kj - ∂_j g_ik)`.
pub fn christoffel(metric: &MetricData) -> Tensor3 {
    let m = metric.g.nrows();
    let mut gamma = Tensor3::zeros(m);
    for a in 0..m {
        for i in 0..m {
            for k in i..m {
                let mut sum = 0.0;
                for j in 0..m {
                    sum += metric.g_inv[(a, j)]
                        * (metric.dg.get(k, i, j) + metric.dg.get(i, k, j)
                            - metric.dg.get(j, i, k));
                }
                gamma.set(a, i, k, 0.5 * sum);
                gamma.set(a, k, i, 0.5 * sum);
            }
        }
    }
    gamma
}

/// Analytic connection derivative: second manifold derivatives of the
/// metric assembled from third derivatives of `f`, plus the inverse-metric
/// derivative `∂g^{-1} = -g^{-1} (∂g) g^{-1}`.
pub fn christoffel_derivative_analytic(
    bundle: &DerivativeBundle,
    frame: &ChartFrame,
) -> Result<Tensor4> {
    if bundle.third.is_none() {
        return Err(Error::contract(
            "analytic connection derivative requires third derivatives",
        ));
    }
    let view = ChartView::new(bundle, frame)?;
    let metric = metric_at(bundle, frame)?;
    let m = view.m;
    let fd = view.fd();
    let q = 1.0 / (fd * fd);
    let t = view.t.as_ref().unwrap();

    // slopes and their manifold derivatives
    let s: Vec<f64> = (0..m).map(|k| view.f[k] / fd).collect();
    let df = |k: usize, i: usize| view.df(k, i);
    let ds = |l: usize, k: usize| (df(l, k) - s[k] * df(l, m)) / fd;
    // D_l D_k f_i with all chart indices, i may include the dependent axis
    let ddf = |l: usize, k: usize, i: usize| -> f64 {
        (t[i][k][l] - t[i][k][m] * s[l]) - (t[i][m][l] - t[i][m][m] * s[l]) * s[k]
            - view.h[i][m] * ds(l, k)
    };

    let dq: Vec<f64> = (0..m).map(|k| -2.0 * df(k, m) / (fd * fd * fd)).collect();
    let ddq = |l: usize, k: usize| -> f64 {
        -2.0 * ddf(l, k, m) / (fd * fd * fd) + 6.0 * df(k, m) * df(l, m) / (fd * fd * fd * fd)
    };

    // second manifold derivative of the metric, ddg[l][k][(i,j)]
    let mut ddg = vec![vec![DMatrix::<f64>::zeros(m, m); m]; m];
    for l in 0..m {
        for k in 0..m {
            for i in 0..m {
                for j in 0..m {
                    let v = ddf(l, k, i) * view.f[j] * q
                        + df(k, i) * df(l, j) * q
                        + df(k, i) * view.f[j] * dq[l]
                        + df(l, i) * df(k, j) * q
                        + view.f[i] * ddf(l, k, j) * q
                        + view.f[i] * df(k, j) * dq[l]
                        + df(l, i) * view.f[j] * dq[k]
                        + view.f[i] * df(l, j) * dq[k]
                        + view.f[i] * view.f[j] * ddq(l, k);
                    ddg[l][k][(i, j)] = v;
                }
            }
        }
    }

    // inverse-metric derivative per chart direction
    let mut dginv = Vec::with_capacity(m);
    for i in 0..m {
        let mut dgm = DMatrix::<f64>::zeros(m, m);
        for a in 0..m {
            for b in 0..m {
                dgm[(a, b)] = metric.dg.get(i, a, b);
            }
        }
        dginv.push(-(&metric.g_inv * dgm * &metric.g_inv));
    }

    let mut dgamma = Tensor4::zeros(m);
    for i in 0..m {
        for a in 0..m {
            for k in 0..m {
                for b in 0..m {
                    let mut sum = 0.0;
                    for j in 0..m {
                        let bracket = metric.dg.get(b, k, j) + metric.dg.get(k, b, j)
                            - metric.dg.get(j, k, b);
                        let dbracket = ddg[i][b][(k, j)] + ddg[i][k][(b, j)] - ddg[i][j][(k, b)];
                        sum += dginv[i][(a, j)] * bracket + metric.g_inv[(a, j)] * dbracket;
                    }
                    dgamma.set(i, a, k, b, 0.5 * sum);
                }
            }
        }
    }
    Ok(dgamma)
}

/// Move from `x` along tangent coordinate `tangent` of the chart by `step`
/// and re-solve the dependent coordinate so the field value stays at the
/// level of `x` (safeguarded Newton).
pub fn chart_neighbor<F: ScalarField>(
    field: &F,
    x: &[f64],
    frame: &ChartFrame,
    tangent: usize,
    step: f64,
) -> Result<Vec<f64>> {
    let dep = frame.dependent_axis;
    let target = field.eval(x);
    let mut y = x.to_vec();
    y[frame.order[tangent]] += step;
    let tol = 1e-12 * (1.0 + target.abs() + step.abs());
    for _ in 0..60 {
        let fy = field.eval(&y) - target;
        if fy.abs() <= tol {
            return Ok(y);
        }
        let grad = field.grad_at(&y)?;
        let gd = grad[dep];
        if gd.abs() < 1e-14 {
            return Err(Error::ChartDegenerate {
                axis: dep,
                dep_component: gd,
            });
        }
        let mut delta = -fy / gd;
        let cap = 4.0 * step.abs().max(1e-3);
        if delta.abs() > cap {
            delta = delta.signum() * cap;
        }
        y[dep] += delta;
    }
    Err(Error::Numerical(format!(
        "dependent-coordinate solve did not converge near {x:?}"
    )))
}

/// Finite-difference connection derivative: central differences of Γ taken
/// at chart neighbors on the same level set, in the *same* frame.
pub fn christoffel_derivative_fd<F: ScalarField>(
    field: &F,
    x: &[f64],
    frame: &ChartFrame,
    step: f64,
) -> Result<Tensor4> {
    if !(step > 0.0) {
        return Err(Error::contract("manifold step must be positive"));
    }
    let m = frame.dim() - 1;
    let mut dgamma = Tensor4::zeros(m);
    for i in 0..m {
        let xp = chart_neighbor(field, x, frame, i, step)?;
        let xm = chart_neighbor(field, x, frame, i, -step)?;
        let gp = christoffel(&metric_at(&field.bundle_at(&xp, false)?, frame)?);
        let gm = christoffel(&metric_at(&field.bundle_at(&xm, false)?, frame)?);
        for a in 0..m {
            for k in 0..m {
                for b in 0..m {
                    dgamma.set(i, a, k, b, (gp.get(a, k, b) - gm.get(a, k, b)) / (2.0 * step));
                }
            }
        }
    }
    Ok(dgamma)
}

/// Connection derivative via the requested path.
pub fn christoffel_derivative<F: ScalarField>(
    field: &F,
    x: &[f64],
    frame: &ChartFrame,
    path: DgammaPath,
) -> Result<Tensor4> {
    match path {
        DgammaPath::Analytic => {
            let bundle = field.bundle_at(x, true)?;
            christoffel_derivative_analytic(&bundle, frame)
        }
        DgammaPath::ManifoldFd { step } => christoffel_derivative_fd(field, x, frame, step),
    }
}

/// Largest relative discrepancy between the two ∂Γ paths at a point.
pub fn dgamma_cross_check<F: ScalarField>(
    field: &F,
    x: &[f64],
    frame: &ChartFrame,
    step: f64,
) -> Result<f64> {
    let analytic = christoffel_derivative(field, x, frame, DgammaPath::Analytic)?;
    let fd = christoffel_derivative(field, x, frame, DgammaPath::ManifoldFd { step })?;
    let m = analytic.n();
    let scale = analytic.max_abs().max(fd.max_abs());
    let mut worst = 0.0f64;
    for i in 0..m {
        for a in 0..m {
            for k in 0..m {
                for b in 0..m {
                    worst = worst.max((analytic.get(i, a, k, b) - fd.get(i, a, k, b)).abs());
                }
            }
        }
    }
    Ok(worst / (scale + 1e-12))
}

/// Riemann tensor
/// `R^a_{bik} = ∂_i Γ^a_{kb} - ∂_k Γ^a_{ib} + Σ_c Γ^a_{ic} Γ^c_{kb} - Σ_c Γ^a_{kc} Γ^c_{ib}`.
pub fn riemann_tensor(conn: &ConnectionData) -> Tensor4 {
    let m = conn.gamma.n();
    let mut r = Tensor4::zeros(m);
    for a in 0..m {
        for b in 0..m {
            for i in 0..m {
                for k in 0..m {
                    let mut v = conn.dgamma.get(i, a, k, b) - conn.dgamma.get(k, a, i, b);
                    for c in 0..m {
                        v += conn.gamma.get(a, i, c) * conn.gamma.get(c, k, b)
                            - conn.gamma.get(a, k, c) * conn.gamma.get(c, i, b);
                    }
                    r.set(a, b, i, k, v);
                }
            }
        }
    }
    r
}

/// Curvature 2-form coefficients `Ω_{ab,ik} = Σ_n g_{an} R^n_{bik}`.
pub fn curvature_two_form(metric: &MetricData, riemann: &Tensor4) -> Tensor4 {
    let m = riemann.n();
    let mut omega = Tensor4::zeros(m);
    for a in 0..m {
        for b in 0..m {
            for i in 0..m {
                for k in 0..m {
                    let mut v = 0.0;
                    for n in 0..m {
                        v += metric.g[(a, n)] * riemann.get(n, b, i, k);
                    }
                    omega.set(a, b, i, k, v);
                }
            }
        }
    }
    omega
}

/// Euler-form density `e` such that `χ = ∫ e` over the chart coordinate
/// volume. Supported for boundary dimension `2n` with `n ∈ {1, 2}`; for
/// `n = 1` it reduces to `K √det g / (2π)`.
pub fn euler_form_density(metric: &MetricData, two_form: &Tensor4) -> Result<f64> {
    let m = two_form.n();
    if m % 2 != 0 || m == 0 || m > 4 {
        return Err(Error::UnsupportedDimension {
            dim: m,
            reason: if m % 2 != 0 {
                "Euler characteristic of an odd-dimensional closed manifold is 0; \
                 no integration is performed"
                    .into()
            } else {
                "Euler form supported for boundary dimension 2 and 4".into()
            },
        });
    }
    let n = m / 2;

    // raise both form indices: Ω^{ab}_{ik} = Σ_{cd} g^{ac} g^{bd} Ω_{cd,ik}
    let mut raised = Tensor4::zeros(m);
    for a in 0..m {
        for b in 0..m {
            for i in 0..m {
                for k in 0..m {
                    let mut v = 0.0;
                    for c in 0..m {
                        for dd in 0..m {
                            v += metric.g_inv[(a, c)]
                                * metric.g_inv[(b, dd)]
                                * two_form.get(c, dd, i, k);
                        }
                    }
                    raised.set(a, b, i, k, v);
                }
            }
        }
    }

    // e = 1/(2^n (2π)^n n!) Σ_a ε_a Ω^{a1 a2} ∧ ... ; the wedge coefficient
    // over the coordinate volume carries one ½ per 2-form.
    let perms = signed_permutations(m);
    let mut sum = 0.0;
    for (ap, asign) in &perms {
        if *asign == 0 {
            continue;
        }
        for (ip, isign) in &perms {
            if *isign == 0 {
                continue;
            }
            let mut prod = 1.0;
            for t in 0..n {
                prod *= raised.get(ap[2 * t], ap[2 * t + 1], ip[2 * t], ip[2 * t + 1]);
            }
            sum += (*asign * *isign) as f64 * prod;
        }
    }
    let factorial_n: f64 = (1..=n).map(|v| v as f64).product();
    // one 2^n from the theorem's prefactor, one from the ½ carried by each
    // of the n curvature 2-forms
    let norm = 2.0f64.powi(n as i32) * (2.0 * PI).powi(n as i32) * factorial_n
        * 2.0f64.powi(n as i32);
    Ok(metric.det_g.sqrt() * sum / norm)
}

/// Violations of the structural tensor identities, reported as absolute
/// maxima together with the tensor scale.
#[derive(Debug, Clone, Serialize)]
pub struct SymmetryReport {
    /// max |R^a_{bik} + R^a_{bki}|
    pub antisym_last_pair: f64,
    /// max |R_{abik} + R_{baik}| over the lowered tensor
    pub antisym_lowered_pair: f64,
    /// max |Σ_cyc(b,i,k) R^a_{bik}|
    pub bianchi_first: f64,
    /// max |R^a_{bik}|
    pub riemann_scale: f64,
}

impl SymmetryReport {
    /// All violations within `tol` relative to the tensor scale.
    pub fn within(&self, tol: f64) -> bool {
        let bound = tol * (self.riemann_scale + 1e-12);
        self.antisym_last_pair <= bound
            && self.antisym_lowered_pair <= bound
            && self.bianchi_first <= bound
    }
}

pub fn check_symmetries(metric: &MetricData, riemann: &Tensor4) -> SymmetryReport {
    let m = riemann.n();
    let lowered = curvature_two_form(metric, riemann);
    let mut last = 0.0f64;
    let mut low = 0.0f64;
    let mut bianchi = 0.0f64;
    for a in 0..m {
        for b in 0..m {
            for i in 0..m {
                for k in 0..m {
                    last = last.max((riemann.get(a, b, i, k) + riemann.get(a, b, k, i)).abs());
                    low = low.max((lowered.get(a, b, i, k) + lowered.get(b, a, i, k)).abs());
                    bianchi = bianchi.max(
                        (riemann.get(a, b, i, k)
                            + riemann.get(a, i, k, b)
                            + riemann.get(a, k, b, i))
                        .abs(),
                    );
                }
            }
        }
    }
    SymmetryReport {
        antisym_last_pair: last,
        antisym_lowered_pair: low,
        bianchi_first: bianchi,
        riemann_scale: riemann.max_abs(),
    }
}

/// Full tensor chain at one boundary point.
#[derive(Debug, Clone)]
pub struct PointTensors {
    pub frame: ChartFrame,
    pub metric: MetricData,
    pub connection: ConnectionData,
    pub curvature: CurvatureData,
    pub symmetry: SymmetryReport,
}

/// Evaluate metric, connection, Riemann tensor, 2-form and (when the
/// boundary dimension is even) the Euler-form density at `x`.
pub fn boundary_tensors<F: ScalarField>(
    field: &F,
    x: &[f64],
    path: DgammaPath,
) -> Result<PointTensors> {
    if x.len() != field.dim() {
        return Err(Error::contract(format!(
            "point dimension {} != field dimension {}",
            x.len(),
            field.dim()
        )));
    }
    let d = field.dim();
    if !(2..=5).contains(&d) {
        return Err(Error::UnsupportedDimension {
            dim: d.saturating_sub(1),
            reason: "supported boundary dimensions are 1 through 4".into(),
        });
    }
    let want_third = matches!(path, DgammaPath::Analytic);
    let bundle = field.bundle_at(x, want_third)?;
    let threshold = singular_threshold(bundle.value);
    if bundle.grad_norm() < threshold {
        return Err(Error::SingularPoint {
            grad_norm: bundle.grad_norm(),
            threshold,
        });
    }
    let frame = crate::curvature::select_chart(bundle.grad.as_slice())?;
    let metric = metric_at(&bundle, &frame)?;
    let gamma = christoffel(&metric);
    let dgamma = match path {
        DgammaPath::Analytic => christoffel_derivative_analytic(&bundle, &frame)?,
        DgammaPath::ManifoldFd { step } => christoffel_derivative_fd(field, x, &frame, step)?,
    };
    let connection = ConnectionData { gamma, dgamma };
    let riemann = riemann_tensor(&connection);
    let two_form = curvature_two_form(&metric, &riemann);
    let euler_density = euler_form_density(&metric, &two_form).ok();
    let symmetry = check_symmetries(&metric, &riemann);
    Ok(PointTensors {
        frame,
        metric,
        connection,
        curvature: CurvatureData {
            riemann,
            two_form,
            euler_density,
        },
        symmetry,
    })
}

/// JSON-friendly dump of the tensor chain at a point.
#[derive(Debug, Clone, Serialize)]
pub struct TensorReport {
    pub dependent_axis: usize,
    pub chart_order: Vec<usize>,
    pub g: Vec<Vec<f64>>,
    pub g_inv: Vec<Vec<f64>>,
    pub det_g: f64,
    /// `gamma[m][i][k] = Γ^m_{ik}`
    pub gamma: Vec<Vec<Vec<f64>>>,
    /// `riemann[a][b][i][k] = R^a_{bik}`
    pub riemann: Vec<Vec<Vec<Vec<f64>>>>,
    /// `two_form[a][b][i][k] = Ω_{ab,ik}`
    pub two_form: Vec<Vec<Vec<Vec<f64>>>>,
    pub euler_density: Option<f64>,
    pub symmetry: SymmetryReport,
}

impl PointTensors {
    pub fn to_report(&self) -> TensorReport {
        let m = self.metric.g.nrows();
        let mat = |g: &DMatrix<f64>| -> Vec<Vec<f64>> {
            (0..m).map(|i| (0..m).map(|j| g[(i, j)]).collect()).collect()
        };
        let t3 = |t: &Tensor3| -> Vec<Vec<Vec<f64>>> {
            (0..m)
                .map(|a| {
                    (0..m)
                        .map(|i| (0..m).map(|k| t.get(a, i, k)).collect())
                        .collect()
                })
                .collect()
        };
        let t4 = |t: &Tensor4| -> Vec<Vec<Vec<Vec<f64>>>> {
            (0..m)
                .map(|a| {
                    (0..m)
                        .map(|b| {
                            (0..m)
                                .map(|i| (0..m).map(|k| t.get(a, b, i, k)).collect())
                                .collect()
                        })
                        .collect()
                })
                .collect()
        };
        TensorReport {
            dependent_axis: self.frame.dependent_axis,
            chart_order: self.frame.order.clone(),
            g: mat(&self.metric.g),
            g_inv: mat(&self.metric.g_inv),
            det_g: self.metric.det_g,
            gamma: t3(&self.connection.gamma),
            riemann: t4(&self.curvature.riemann),
            two_form: t4(&self.curvature.two_form),
            euler_density: self.curvature.euler_density,
            symmetry: self.symmetry.clone(),
        }
    }
}

/// Intrinsic Gaussian curvature of a 2D boundary: `R_{1212} / det g`
/// (Theorema Egregium). Cross-oracle for the 3D closed-form curvature.
pub fn intrinsic_gaussian_curvature(tensors: &PointTensors) -> Result<f64> {
    let m = tensors.metric.g.nrows();
    if m != 2 {
        return Err(Error::contract(
            "intrinsic Gaussian curvature needs a 2D boundary",
        ));
    }
    let lowered = &tensors.curvature.two_form;
    Ok(lowered.get(0, 1, 0, 1) / tensors.metric.det_g)
}
