//! Sufficient weight conditions for flat or developable decision
//! boundaries, their checkers, and constructive generators that realize
//! each condition exactly.
//!
//! The conditions are algebraic identities on stored weights, so the
//! tolerance is machine-noise scale. Constructed networks satisfy their
//! condition with violation exactly zero: proportional rows are built as
//! power-of-two multiples of a common vector, which makes every 2x2 minor
//! evaluate to exactly 0.0 in floating point.
//!
//! The theorems are sufficient, not necessary: a "violated" verdict makes
//! no claim that the boundary is curved. The random-case tests sample
//! curvature to confirm non-flatness empirically instead of asserting it.

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::network::{ActivationKind, Layer, MlpNetwork};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Tolerance for the algebraic weight conditions.
pub const TOL_COND: f64 = 1e-12;

/// Which sufficient condition a verdict refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TheoremCase {
    /// 2D, one hidden layer: `a_i W_i1 = 0` or `a_i W_i2 = 0` for every unit.
    T61a,
    /// 2D, one hidden layer: all `a_i a_j (W_i1 W_j2 - W_i2 W_j1) = 0`.
    T61b,
    /// 3D, one hidden layer: some input column is dead for every unit.
    T63a,
    /// 3D, one hidden layer: columns 2 and 3 pairwise proportional.
    T63b,
    /// Deep: a first-layer unit is unreachable and the remaining first-layer
    /// rows are pairwise proportional (linear boundary).
    T64Linear,
    /// Deep: a first-layer unit is unreachable and the remaining rows have a
    /// zero column `q` (boundary straight along axis `q`).
    T64Axis(usize),
}

impl std::fmt::Display for TheoremCase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TheoremCase::T61a => write!(f, "T6.1a"),
            TheoremCase::T61b => write!(f, "T6.1b"),
            TheoremCase::T63a => write!(f, "T6.3a"),
            TheoremCase::T63b => write!(f, "T6.3b"),
            TheoremCase::T64Linear => write!(f, "T6.4-linear"),
            TheoremCase::T64Axis(q) => write!(f, "T6.4-axis({q})"),
        }
    }
}

/// Outcome of checking one condition: `satisfied` iff
/// `max_violation <= TOL_COND`; `witness` locates the worst index tuple.
#[derive(Debug, Clone, Serialize)]
pub struct ConditionVerdict {
    pub case: TheoremCase,
    pub satisfied: bool,
    pub max_violation: f64,
    pub witness: Option<Vec<usize>>,
}

fn verdict(case: TheoremCase, max_violation: f64, witness: Option<Vec<usize>>) -> ConditionVerdict {
    ConditionVerdict {
        case,
        satisfied: max_violation <= TOL_COND,
        max_violation,
        witness,
    }
}

fn require_shallow(net: &MlpNetwork, dim: usize) -> Result<(&DMatrix<f64>, &DVector<f64>)> {
    if net.depth() != 1 || net.input_dim() != dim {
        return Err(Error::contract(format!(
            "checker expects one hidden layer with {dim}D input, got depth {} and input {}",
            net.depth(),
            net.input_dim()
        )));
    }
    Ok((&net.layers()[0].weight, net.output_weights()))
}

/// Per-unit disjunction: for each unit, the smallest `|a_i W_ic|` over the
/// given columns must vanish.
fn column_disjunction(w: &DMatrix<f64>, a: &DVector<f64>) -> (f64, Option<Vec<usize>>) {
    let mut worst = 0.0f64;
    let mut witness = None;
    for i in 0..w.nrows() {
        let v = (0..w.ncols())
            .map(|c| (a[i] * w[(i, c)]).abs())
            .fold(f64::INFINITY, f64::min);
        if v > worst {
            worst = v;
            witness = Some(vec![i]);
        }
    }
    (worst, witness)
}

/// Largest `|a_i a_j (W_ic1 W_jc2 - W_ic2 W_jc1)|` over unit pairs.
fn weighted_minor_max(
    w: &DMatrix<f64>,
    a: Option<&DVector<f64>>,
    c1: usize,
    c2: usize,
) -> (f64, Option<Vec<usize>>) {
    let mut worst = 0.0f64;
    let mut witness = None;
    for i in 0..w.nrows() {
        for j in (i + 1)..w.nrows() {
            let minor = w[(i, c1)] * w[(j, c2)] - w[(i, c2)] * w[(j, c1)];
            let v = match a {
                Some(a) => (a[i] * a[j] * minor).abs(),
                None => minor.abs(),
            };
            if v > worst {
                worst = v;
                witness = Some(vec![i, j]);
            }
        }
    }
    (worst, witness)
}

/// Conditions of the 2D one-hidden-layer theorem.
pub fn check_t61(net: &MlpNetwork) -> Result<Vec<ConditionVerdict>> {
    let (w, a) = require_shallow(net, 2)?;
    let (va, wa) = column_disjunction(w, a);
    let (vb, wb) = weighted_minor_max(w, Some(a), 0, 1);
    Ok(vec![
        verdict(TheoremCase::T61a, va, wa),
        verdict(TheoremCase::T61b, vb, wb),
    ])
}

/// Conditions of the 3D one-hidden-layer theorem.
pub fn check_t63(net: &MlpNetwork) -> Result<Vec<ConditionVerdict>> {
    let (w, a) = require_shallow(net, 3)?;
    let (va, wa) = column_disjunction(w, a);
    let (vb, wb) = weighted_minor_max(w, Some(a), 1, 2);
    Ok(vec![
        verdict(TheoremCase::T63a, va, wa),
        verdict(TheoremCase::T63b, vb, wb),
    ])
}

/// Largest `|a_i W^L_{ij} ... W^2_{mn}|` for every first-layer unit `n`.
///
/// A cheap screen first: the sum `|a|^T |W^L| ... |W^2|` bounds every chain
/// product, so a column whose screen is already below tolerance needs no
/// further work. Otherwise the exact per-column maximum comes from a
/// max-product sweep.
fn chain_products(net: &MlpNetwork) -> Vec<f64> {
    let layers = net.layers();
    let depth = layers.len();
    let mut screen: Vec<f64> = net.output_weights().iter().map(|v| v.abs()).collect();
    for l in (1..depth).rev() {
        let w = &layers[l].weight;
        let mut next = vec![0.0f64; w.ncols()];
        for (j, slot) in next.iter_mut().enumerate() {
            for i in 0..w.nrows() {
                *slot += screen[i] * w[(i, j)].abs();
            }
        }
        screen = next;
    }
    let needs_exact = screen.iter().any(|&s| s > TOL_COND);
    if !needs_exact {
        return screen;
    }
    let mut exact: Vec<f64> = net.output_weights().iter().map(|v| v.abs()).collect();
    for l in (1..depth).rev() {
        let w = &layers[l].weight;
        let mut next = vec![0.0f64; w.ncols()];
        for (j, slot) in next.iter_mut().enumerate() {
            for i in 0..w.nrows() {
                *slot = slot.max(exact[i] * w[(i, j)].abs());
            }
        }
        exact = next;
    }
    exact
}

/// Conditions of the deep-network theorem: the linear-boundary case and the
/// straight-along-axis case for every axis.
pub fn check_t64(net: &MlpNetwork) -> Result<Vec<ConditionVerdict>> {
    if net.depth() < 2 {
        return Err(Error::contract(
            "deep-network checker needs at least two hidden layers; use the one-layer checkers",
        ));
    }
    let chains = chain_products(net);
    let w1 = &net.layers()[0].weight;
    let d1 = w1.nrows();
    let d = w1.ncols();

    let mut verdicts = Vec::with_capacity(1 + d);

    // linear case: best neutralized unit n, remaining rows pairwise
    // proportional (every 2x2 minor of the remaining rows vanishes)
    let mut best = f64::INFINITY;
    let mut best_witness = None;
    for n in 0..d1 {
        let mut rank_violation = 0.0f64;
        for i in 0..d1 {
            if i == n {
                continue;
            }
            for j in (i + 1)..d1 {
                if j == n {
                    continue;
                }
                for c1 in 0..d {
                    for c2 in (c1 + 1)..d {
                        let minor = w1[(i, c1)] * w1[(j, c2)] - w1[(i, c2)] * w1[(j, c1)];
                        rank_violation = rank_violation.max(minor.abs());
                    }
                }
            }
        }
        let v = chains[n].max(rank_violation);
        if v < best {
            best = v;
            best_witness = Some(vec![n]);
        }
    }
    verdicts.push(verdict(TheoremCase::T64Linear, best, best_witness));

    for q in 0..d {
        let mut best = f64::INFINITY;
        let mut best_witness = None;
        for n in 0..d1 {
            let mut col = 0.0f64;
            for l in 0..d1 {
                if l != n {
                    col = col.max(w1[(l, q)].abs());
                }
            }
            let v = chains[n].max(col);
            if v < best {
                best = v;
                best_witness = Some(vec![n]);
            }
        }
        verdicts.push(verdict(TheoremCase::T64Axis(q), best, best_witness));
    }
    Ok(verdicts)
}

/// Run the checkers appropriate for the architecture.
pub fn check_conditions(net: &MlpNetwork) -> Result<Vec<ConditionVerdict>> {
    if net.depth() >= 2 {
        check_t64(net)
    } else {
        match net.input_dim() {
            2 => check_t61(net),
            3 => check_t63(net),
            d => Err(Error::contract(format!(
                "no one-hidden-layer flatness conditions for input dimension {d}"
            ))),
        }
    }
}

// --------------------------------------------------------------------------
// Constructive generators
// --------------------------------------------------------------------------

/// A signed power of two; multiplying by it is exact in floating point, so
/// proportional rows built this way have exactly vanishing minors.
fn pow2_coeff(rng: &mut ChaCha8Rng) -> f64 {
    let exp = rng.gen_range(-2i32..=2);
    let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    sign * (2.0f64).powi(exp)
}

fn unit_direction(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.3 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

/// Tune the output bias so the boundary crosses the unit box: probe `f`
/// along candidate directions through the origin, center the range, and
/// verify a sign change brackets a root.
fn tune_output_bias(net: &mut MlpNetwork) -> Result<()> {
    let d = net.input_dim();
    let mut directions: Vec<Vec<f64>> = (0..d)
        .map(|axis| {
            let mut e = vec![0.0; d];
            e[axis] = 1.0;
            e
        })
        .collect();
    directions.push(vec![1.0 / (d as f64).sqrt(); d]);

    for u in &directions {
        let samples: Vec<f64> = (0..=60)
            .map(|s| {
                let t = -0.9 + 1.8 * s as f64 / 60.0;
                let p: Vec<f64> = u.iter().map(|ui| t * ui).collect();
                net.value(&p).expect("dimension consistent")
            })
            .collect();
        let (min, max) = samples
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            });
        if max - min < 1e-9 {
            continue;
        }
        let shift = -0.5 * (min + max);
        let shifted = MlpNetwork::new(
            net.layers().to_vec(),
            net.output_weights().clone(),
            net.output_bias() + shift,
            net.activation(),
        )?;
        // bracketing check: consecutive probes must change sign
        let crosses = samples
            .windows(2)
            .any(|w| (w[0] + shift > 0.0) != (w[1] + shift > 0.0));
        if crosses {
            *net = shifted;
            return Ok(());
        }
    }
    Err(Error::Construction(
        "could not bracket a boundary crossing inside the unit box".into(),
    ))
}

/// Construct a network that satisfies the named condition exactly and whose
/// boundary crosses the unit box. `dims = [d, d_1, ..., d_L]`.
pub fn make_flat_network(case: TheoremCase, dims: &[usize], seed: u64) -> Result<MlpNetwork> {
    if dims.len() < 2 {
        return Err(Error::contract("dims must list input and hidden widths"));
    }
    let d = dims[0];
    let depth = dims.len() - 1;
    let shallow_dim = |want: usize| -> Result<()> {
        if depth != 1 || d != want {
            return Err(Error::contract(format!(
                "{case} needs dims [{want}, h], got {dims:?}"
            )));
        }
        Ok(())
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut net = match case {
        TheoremCase::T61a => {
            shallow_dim(2)?;
            let h = dims[1];
            let weight = DMatrix::from_fn(h, 2, |_, c| {
                if c == 0 {
                    0.0
                } else {
                    rng.gen_range(0.5..1.5)
                }
            });
            shallow_net(weight, h, &mut rng)?
        }
        TheoremCase::T61b => {
            shallow_dim(2)?;
            let h = dims[1];
            let v = unit_direction(&mut rng, 2);
            let coeffs: Vec<f64> = (0..h).map(|_| pow2_coeff(&mut rng)).collect();
            let weight = DMatrix::from_fn(h, 2, |i, c| coeffs[i] * v[c]);
            shallow_net(weight, h, &mut rng)?
        }
        TheoremCase::T63a => {
            shallow_dim(3)?;
            let h = dims[1];
            let weight = DMatrix::from_fn(h, 3, |_, c| {
                if c == 0 {
                    0.0
                } else {
                    rng.gen_range(-1.5..1.5)
                }
            });
            shallow_net(weight, h, &mut rng)?
        }
        TheoremCase::T63b => {
            shallow_dim(3)?;
            let h = dims[1];
            let tail = unit_direction(&mut rng, 2);
            let coeffs: Vec<f64> = (0..h).map(|_| pow2_coeff(&mut rng)).collect();
            let weight = DMatrix::from_fn(h, 3, |i, c| {
                if c == 0 {
                    rng.gen_range(-1.0..1.0)
                } else {
                    coeffs[i] * tail[c - 1]
                }
            });
            shallow_net(weight, h, &mut rng)?
        }
        TheoremCase::T64Linear => {
            let base = deep_dims_check(case, dims)?;
            let direction = unit_direction(&mut rng, d);
            let coeffs: Vec<f64> = (0..dims[1]).map(|_| pow2_coeff(&mut rng)).collect();
            // unit 0 is neutralized by a zero column in layer 2; the other
            // rows are exact multiples of one direction
            let w1 = DMatrix::from_fn(dims[1], d, |i, c| {
                if i == 0 {
                    rng.gen_range(-1.0..1.0)
                } else {
                    coeffs[i] * direction[c]
                }
            });
            deep_net(base, w1, 0, &mut rng)?
        }
        TheoremCase::T64Axis(q) => {
            let base = deep_dims_check(case, dims)?;
            if q >= d {
                return Err(Error::contract(format!(
                    "axis {q} out of range for input dimension {d}"
                )));
            }
            let w1 = DMatrix::from_fn(dims[1], d, |i, c| {
                if i == 0 {
                    if c == q {
                        rng.gen_range(0.5..1.5)
                    } else {
                        rng.gen_range(-1.0..1.0)
                    }
                } else if c == q {
                    0.0
                } else {
                    rng.gen_range(-1.0..1.0)
                }
            });
            deep_net(base, w1, 0, &mut rng)?
        }
    };
    tune_output_bias(&mut net)?;
    Ok(net)
}

fn shallow_net(weight: DMatrix<f64>, h: usize, rng: &mut ChaCha8Rng) -> Result<MlpNetwork> {
    let bias = DVector::from_fn(h, |_, _| rng.gen_range(-0.3..0.3));
    let a = DVector::from_fn(h, |_, _| rng.gen_range(0.5..1.5));
    MlpNetwork::new(vec![Layer { weight, bias }], a, 0.0, ActivationKind::Tanh)
}

fn deep_dims_check(case: TheoremCase, dims: &[usize]) -> Result<Vec<usize>> {
    if dims.len() < 3 {
        return Err(Error::contract(format!(
            "{case} needs at least two hidden layers, got dims {dims:?}"
        )));
    }
    Ok(dims.to_vec())
}

/// Assemble a deep network whose layer-2 column `dead_unit` is zero; layers
/// past the first are generic.
fn deep_net(
    dims: Vec<usize>,
    w1: DMatrix<f64>,
    dead_unit: usize,
    rng: &mut ChaCha8Rng,
) -> Result<MlpNetwork> {
    let depth = dims.len() - 1;
    let mut layers = Vec::with_capacity(depth);
    layers.push(Layer {
        weight: w1,
        bias: DVector::from_fn(dims[1], |_, _| rng.gen_range(-0.3..0.3)),
    });
    for l in 2..=depth {
        let weight = DMatrix::from_fn(dims[l], dims[l - 1], |_, c| {
            if l == 2 && c == dead_unit {
                0.0
            } else {
                rng.gen_range(-0.8..0.8)
            }
        });
        layers.push(Layer {
            weight,
            bias: DVector::from_fn(dims[l], |_, _| rng.gen_range(-0.3..0.3)),
        });
    }
    let a = DVector::from_fn(dims[depth], |_, _| rng.gen_range(0.5..1.5));
    MlpNetwork::new(layers, a, 0.0, ActivationKind::Tanh)
}

/// Boundary points found by bisecting random segments with opposite signs;
/// useful where no mesh extraction exists (input dimension above 3).
pub fn random_boundary_points<F: ScalarField>(
    field: &F,
    count: usize,
    half_width: f64,
    seed: u64,
) -> Result<Vec<Vec<f64>>> {
    let d = field.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(count);
    let mut tries = 0usize;
    while points.len() < count {
        tries += 1;
        if tries > 40_000 {
            return Err(Error::Numerical(format!(
                "found only {} of {count} boundary points by random bisection",
                points.len()
            )));
        }
        let p: Vec<f64> = (0..d).map(|_| rng.gen_range(-half_width..half_width)).collect();
        let q: Vec<f64> = (0..d).map(|_| rng.gen_range(-half_width..half_width)).collect();
        let (fp, fq) = (field.eval(&p), field.eval(&q));
        if (fp > 0.0) == (fq > 0.0) {
            continue;
        }
        let (mut lo, mut flo, mut hi) = (0.0f64, fp, 1.0f64);
        let at = |t: f64| -> Vec<f64> {
            p.iter()
                .zip(&q)
                .map(|(pi, qi)| pi + t * (qi - pi))
                .collect()
        };
        let mut found = None;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let fm = field.eval(&at(mid));
            if fm.abs() <= crate::levelset::REFINE_TOL {
                found = Some(at(mid));
                break;
            }
            if (fm > 0.0) == (flo > 0.0) {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
        if let Some(pt) = found {
            points.push(pt);
        }
    }
    Ok(points)
}
