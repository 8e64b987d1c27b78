//! Level-set extraction: sample the field on a uniform grid, then
//! polygonize the zero set — marching squares in 2D, marching cubes in 3D.
//!
//! Polygonization traces the iso-contour across cell faces: every cell face
//! independently decides how its edge crossings connect (an ambiguous face
//! with four crossings is resolved by one extra field evaluation at the
//! face center), and the per-cell polygons are chained from those face
//! segments. Because the decision is face-local, the two cells sharing a
//! face always agree, which keeps the mesh watertight and consistently
//! oriented. Vertices lie on cell edges by linear interpolation and are
//! welded through global edge keys.
//!
//! Cells are processed in lexicographic index order, so output ordering is
//! deterministic.

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::mesh::{triangle_area, PlanarBoundary, TriMesh, DEGENERATE_AREA};
use rayon::prelude::*;
use std::collections::HashMap;

/// Default cap on the number of grid cells.
pub const DEFAULT_CELL_CAP: u64 = 64_000_000;

/// Bisection refinement target: representative points satisfy
/// `|f| <= REFINE_TOL`.
pub const REFINE_TOL: f64 = 1e-10;

/// Uniform sampling grid: per-axis bounds and spacing `lambda`.
#[derive(Debug, Clone)]
pub struct GridSpec {
    pub bounds: Vec<(f64, f64)>,
    pub lambda: f64,
}

impl GridSpec {
    pub fn new(bounds: Vec<(f64, f64)>, lambda: f64) -> Result<Self> {
        let spec = GridSpec { bounds, lambda };
        spec.validate()?;
        Ok(spec)
    }

    /// Bounding box of `points` inflated by `inflate` (fraction of the
    /// half-range per axis, e.g. 0.25 for 25%).
    pub fn around_points(points: &[Vec<f64>], lambda: f64, inflate: f64) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::contract("cannot infer bounds from no points"));
        }
        let dim = points[0].len();
        let mut bounds = vec![(f64::INFINITY, f64::NEG_INFINITY); dim];
        for p in points {
            for (axis, &v) in p.iter().enumerate() {
                bounds[axis].0 = bounds[axis].0.min(v);
                bounds[axis].1 = bounds[axis].1.max(v);
            }
        }
        for b in &mut bounds {
            let center = 0.5 * (b.0 + b.1);
            let half = (0.5 * (b.1 - b.0)).max(lambda) * (1.0 + inflate);
            *b = (center - half, center + half);
        }
        GridSpec::new(bounds, lambda)
    }

    fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0) {
            return Err(Error::contract("grid spacing must be positive"));
        }
        for (axis, &(lo, hi)) in self.bounds.iter().enumerate() {
            if !(lo < hi) {
                return Err(Error::contract(format!(
                    "axis {axis}: bounds ({lo}, {hi}) are not increasing"
                )));
            }
            if self.axis_points(axis) < 2 {
                return Err(Error::contract(format!(
                    "axis {axis}: fewer than 2 grid points at spacing {}",
                    self.lambda
                )));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.bounds.len()
    }

    pub fn axis_points(&self, axis: usize) -> usize {
        let (lo, hi) = self.bounds[axis];
        ((hi - lo) / self.lambda).floor() as usize + 1
    }

    pub fn coord(&self, axis: usize, index: usize) -> f64 {
        self.bounds[axis].0 + self.lambda * index as f64
    }

    pub fn cell_count(&self) -> u64 {
        (0..self.dim())
            .map(|a| (self.axis_points(a) - 1) as u64)
            .product()
    }
}

/// Field values sampled on a [`GridSpec`].
#[derive(Debug, Clone)]
pub struct ScalarGrid {
    pub spec: GridSpec,
    pub shape: Vec<usize>,
    values: Vec<f64>,
}

impl ScalarGrid {
    #[inline]
    pub fn value3(&self, i: usize, j: usize, k: usize) -> f64 {
        self.values[(i * self.shape[1] + j) * self.shape[2] + k]
    }

    #[inline]
    pub fn value2(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.shape[1] + j]
    }
}

/// Evaluate the field at every grid point (parallel over the first axis,
/// deterministic layout). Values exactly equal to zero are nudged to the
/// smallest positive double so that grid points never sit on the level set
/// and cell classification stays unambiguous.
pub fn sample_grid<F: ScalarField>(field: &F, spec: &GridSpec) -> Result<ScalarGrid> {
    sample_grid_with_cap(field, spec, DEFAULT_CELL_CAP)
}

pub fn sample_grid_with_cap<F: ScalarField>(
    field: &F,
    spec: &GridSpec,
    cap: u64,
) -> Result<ScalarGrid> {
    spec.validate()?;
    let dim = spec.dim();
    if dim != field.dim() {
        return Err(Error::contract(format!(
            "grid dimension {dim} != field dimension {}",
            field.dim()
        )));
    }
    if !(dim == 2 || dim == 3) {
        return Err(Error::contract(
            "grid sampling supports 2 and 3 dimensions",
        ));
    }
    let cells = spec.cell_count();
    if cells > cap {
        return Err(Error::GridTooLarge { cells, cap });
    }
    let shape: Vec<usize> = (0..dim).map(|a| spec.axis_points(a)).collect();
    let snap = |v: f64| if v == 0.0 { f64::MIN_POSITIVE } else { v };
    let values: Vec<f64> = if dim == 3 {
        let (ny, nz) = (shape[1], shape[2]);
        let slabs: Vec<Vec<f64>> = (0..shape[0])
            .into_par_iter()
            .map(|i| {
                let x = spec.coord(0, i);
                let mut slab = Vec::with_capacity(ny * nz);
                let mut p = [x, 0.0, 0.0];
                for j in 0..ny {
                    p[1] = spec.coord(1, j);
                    for k in 0..nz {
                        p[2] = spec.coord(2, k);
                        slab.push(snap(field.eval(&p)));
                    }
                }
                slab
            })
            .collect();
        slabs.into_iter().flatten().collect()
    } else {
        let ny = shape[1];
        let slabs: Vec<Vec<f64>> = (0..shape[0])
            .into_par_iter()
            .map(|i| {
                let x = spec.coord(0, i);
                let mut slab = Vec::with_capacity(ny);
                let mut p = [x, 0.0];
                for j in 0..ny {
                    p[1] = spec.coord(1, j);
                    slab.push(snap(field.eval(&p)));
                }
                slab
            })
            .collect();
        slabs.into_iter().flatten().collect()
    };
    Ok(ScalarGrid {
        spec: spec.clone(),
        shape,
        values,
    })
}

// --------------------------------------------------------------------------
// Marching cubes
// --------------------------------------------------------------------------

// Corner c of a cell has offset (c & 1, c >> 1 & 1, c >> 2 & 1).
const CORNER_OFFSET: [[usize; 3]; 8] = [
    [0, 0, 0],
    [1, 0, 0],
    [0, 1, 0],
    [1, 1, 0],
    [0, 0, 1],
    [1, 0, 1],
    [0, 1, 1],
    [1, 1, 1],
];

// The 12 cell edges as (lower corner, upper corner, axis).
const EDGES: [(usize, usize, usize); 12] = [
    (0, 1, 0),
    (2, 3, 0),
    (4, 5, 0),
    (6, 7, 0),
    (0, 2, 1),
    (1, 3, 1),
    (4, 6, 1),
    (5, 7, 1),
    (0, 4, 2),
    (1, 5, 2),
    (2, 6, 2),
    (3, 7, 2),
];

// Cell faces: 4 corners in counterclockwise order viewed from outside.
const FACES: [[usize; 4]; 6] = [
    [0, 4, 6, 2], // x = 0
    [1, 3, 7, 5], // x = 1
    [0, 1, 5, 4], // y = 0
    [2, 6, 7, 3], // y = 1
    [0, 2, 3, 1], // z = 0
    [4, 5, 7, 6], // z = 1
];

#[inline]
fn edge_index(a: usize, b: usize) -> usize {
    let lo = a.min(b);
    match a ^ b {
        1 => lo >> 1,
        2 => 4 + (lo & 1) + ((lo >> 2) << 1),
        _ => 8 + lo,
    }
}

/// Crossings this close (in interpolation parameter) to a cell corner are
/// welded onto it, so near-tangent grid points cannot spawn sliver
/// triangles that would puncture the mesh.
const WELD_T: f64 = 1e-9;

/// Pair the crossings of one face walk into directed segments (start at a
/// `+→-` crossing, end at a `-→+` crossing). `crossings` lists
/// `(edge, is_start)` in walk order; an ambiguous face provides
/// `center_positive` from a field sample at its center.
fn pair_face_crossings(
    crossings: &[(usize, bool)],
    center_positive: impl FnOnce() -> bool,
    out: &mut [Option<usize>; 12],
) {
    match crossings.len() {
        0 => {}
        2 => {
            let (s, e) = if crossings[0].1 { (0, 1) } else { (1, 0) };
            out[crossings[s].0] = Some(crossings[e].0);
        }
        4 => {
            // alternating start/end around the walk
            let offset = if crossings[0].1 { 0 } else { 1 };
            // positive center isolates the negative corners: each start
            // connects to the end right after it; otherwise to the one before
            let delta = if center_positive() { 1 } else { 3 };
            for t in 0..2 {
                let s = (offset + 2 * t) % 4;
                let e = (s + delta) % 4;
                out[crossings[s].0] = Some(crossings[e].0);
            }
        }
        _ => unreachable!("a quadrilateral face walk has 0, 2 or 4 sign changes"),
    }
}

/// Marching-cubes triangulation of the zero level set of a sampled field.
///
/// Face normals point toward `f > 0`. An empty level set yields an empty
/// mesh.
pub fn extract_surface_3d<F: ScalarField>(field: &F, grid: &ScalarGrid) -> Result<TriMesh> {
    if grid.spec.dim() != 3 {
        return Err(Error::contract("surface extraction requires a 3D grid"));
    }
    let (nx, ny, nz) = (grid.shape[0], grid.shape[1], grid.shape[2]);
    let spec = &grid.spec;
    let mut mesh = TriMesh::default();
    // welded vertex ids: axis 0..2 keys an edge interior, 3 keys the grid
    // corner itself
    let mut edge_ids: HashMap<u64, u32> = HashMap::new();
    let key_of = |gi: usize, gj: usize, gk: usize, axis: usize| -> u64 {
        (((gi * ny + gj) * nz + gk) * 4 + axis) as u64
    };

    let mut corner_val = [0.0f64; 8];
    let mut positive = [false; 8];

    for ci in 0..nx - 1 {
        for cj in 0..ny - 1 {
            for ck in 0..nz - 1 {
                let mut mask = 0u8;
                for c in 0..8 {
                    let [dx, dy, dz] = CORNER_OFFSET[c];
                    let v = grid.value3(ci + dx, cj + dy, ck + dz);
                    corner_val[c] = v;
                    positive[c] = v > 0.0;
                    if positive[c] {
                        mask |= 1 << c;
                    }
                }
                if mask == 0 || mask == 0xFF {
                    continue;
                }

                // vertices on crossing edges, welded via global edge keys
                let mut edge_vertex = [u32::MAX; 12];
                for (e, &(a, b, axis)) in EDGES.iter().enumerate() {
                    if positive[a] == positive[b] {
                        continue;
                    }
                    let [dx, dy, dz] = CORNER_OFFSET[a];
                    let (gi, gj, gk) = (ci + dx, cj + dy, ck + dz);
                    let va = corner_val[a];
                    let vb = corner_val[b];
                    let t = va / (va - vb);
                    let (key, pos) = if t < WELD_T {
                        (
                            key_of(gi, gj, gk, 3),
                            [spec.coord(0, gi), spec.coord(1, gj), spec.coord(2, gk)],
                        )
                    } else if t > 1.0 - WELD_T {
                        let mut up = [gi, gj, gk];
                        up[axis] += 1;
                        (
                            key_of(up[0], up[1], up[2], 3),
                            [
                                spec.coord(0, up[0]),
                                spec.coord(1, up[1]),
                                spec.coord(2, up[2]),
                            ],
                        )
                    } else {
                        let mut p = [
                            spec.coord(0, gi),
                            spec.coord(1, gj),
                            spec.coord(2, gk),
                        ];
                        p[axis] += t * spec.lambda;
                        (key_of(gi, gj, gk, axis), p)
                    };
                    let id = *edge_ids.entry(key).or_insert_with(|| {
                        mesh.vertices.push(pos);
                        (mesh.vertices.len() - 1) as u32
                    });
                    edge_vertex[e] = id;
                }

                // directed segments per face
                let mut next_edge: [Option<usize>; 12] = [None; 12];
                for (fi, face) in FACES.iter().enumerate() {
                    let mut crossings: Vec<(usize, bool)> = Vec::with_capacity(4);
                    for s in 0..4 {
                        let a = face[s];
                        let b = face[(s + 1) % 4];
                        if positive[a] != positive[b] {
                            crossings.push((edge_index(a, b), positive[a]));
                        }
                    }
                    pair_face_crossings(
                        &crossings,
                        || {
                            // one extra field evaluation at the face center
                            let mut p = [
                                spec.coord(0, ci),
                                spec.coord(1, cj),
                                spec.coord(2, ck),
                            ];
                            let fixed_axis = fi / 2;
                            for axis in 0..3 {
                                if axis == fixed_axis {
                                    p[axis] += (fi % 2) as f64 * spec.lambda;
                                } else {
                                    p[axis] += 0.5 * spec.lambda;
                                }
                            }
                            field.eval(&p) > 0.0
                        },
                        &mut next_edge,
                    );
                }

                // chain segments into polygons and fan-triangulate
                let mut visited = [false; 12];
                for start in 0..12 {
                    if visited[start] || next_edge[start].is_none() {
                        continue;
                    }
                    let mut cycle = Vec::with_capacity(7);
                    let mut e = start;
                    loop {
                        visited[e] = true;
                        cycle.push(edge_vertex[e]);
                        e = next_edge[e].expect("crossing edges chain into cycles");
                        if e == start {
                            break;
                        }
                    }
                    // welded crossings may repeat; keep one of each run
                    cycle.dedup();
                    while cycle.len() > 1 && cycle.first() == cycle.last() {
                        cycle.pop();
                    }
                    let len = cycle.len();
                    if len < 3 {
                        continue;
                    }
                    // Removing any triangle would unpair its edges against
                    // the neighbors and puncture the mesh, so every fan
                    // triangle is emitted. The fan root is chosen to avoid
                    // near-collinear splits where possible; a genuinely
                    // tiny face (surface shaving a cell corner) is kept and
                    // counted -- it contributes nothing to area or
                    // curvature but is needed for closedness.
                    let fan_min_area = |root: usize| -> f64 {
                        let mut min = f64::INFINITY;
                        for t in 1..len - 1 {
                            min = min.min(triangle_area(
                                &mesh.vertices[cycle[root] as usize],
                                &mesh.vertices[cycle[(root + t) % len] as usize],
                                &mesh.vertices[cycle[(root + t + 1) % len] as usize],
                            ));
                        }
                        min
                    };
                    let mut root = 0usize;
                    if len > 3 && fan_min_area(0) <= DEGENERATE_AREA {
                        let mut best = f64::NEG_INFINITY;
                        for candidate in 0..len {
                            let v = fan_min_area(candidate);
                            if v > best {
                                best = v;
                                root = candidate;
                            }
                        }
                    }
                    for t in 1..len - 1 {
                        let tri = [
                            cycle[root],
                            cycle[(root + t) % len],
                            cycle[(root + t + 1) % len],
                        ];
                        if tri[0] == tri[1] || tri[1] == tri[2] || tri[2] == tri[0] {
                            continue; // pinched through a welded corner
                        }
                        let area = triangle_area(
                            &mesh.vertices[tri[0] as usize],
                            &mesh.vertices[tri[1] as usize],
                            &mesh.vertices[tri[2] as usize],
                        );
                        if area <= DEGENERATE_AREA {
                            mesh.degenerate_faces += 1;
                        }
                        mesh.faces.push(tri);
                        mesh.face_areas.push(area);
                    }
                }
            }
        }
    }
    Ok(mesh)
}

// --------------------------------------------------------------------------
// Marching squares
// --------------------------------------------------------------------------

/// Marching-squares extraction of the zero level set in 2D: closed loops
/// away from the window edges, plus open chains that are clipped by the
/// window and flagged as such.
pub fn extract_curve_2d<F: ScalarField>(field: &F, grid: &ScalarGrid) -> Result<PlanarBoundary> {
    if grid.spec.dim() != 2 {
        return Err(Error::contract("curve extraction requires a 2D grid"));
    }
    let (nx, ny) = (grid.shape[0], grid.shape[1]);
    let spec = &grid.spec;

    let mut edge_ids: HashMap<u64, u32> = HashMap::new();
    let mut vertices: Vec<[f64; 2]> = Vec::new();
    // segments as from-vertex -> to-vertex; every vertex has at most one of
    // each because the two cells sharing a grid edge give it opposite roles
    let mut out_of: HashMap<u32, u32> = HashMap::new();
    let mut has_in: HashMap<u32, bool> = HashMap::new();
    let key_of = |gi: usize, gj: usize, axis: usize| -> u64 { ((gi * ny + gj) * 2 + axis) as u64 };

    // cell corners counterclockwise; edge of corner pair (s, s+1)
    let corner_off = [[0usize, 0usize], [1, 0], [1, 1], [0, 1]];

    for ci in 0..nx - 1 {
        for cj in 0..ny - 1 {
            let vals = [
                grid.value2(ci, cj),
                grid.value2(ci + 1, cj),
                grid.value2(ci + 1, cj + 1),
                grid.value2(ci, cj + 1),
            ];
            let pos = [vals[0] > 0.0, vals[1] > 0.0, vals[2] > 0.0, vals[3] > 0.0];
            if pos.iter().all(|&p| p) || !pos.iter().any(|&p| p) {
                continue;
            }
            let mut crossings: Vec<(usize, bool)> = Vec::with_capacity(4);
            let mut vertex_of_side = [u32::MAX; 4];
            for s in 0..4 {
                let a = s;
                let b = (s + 1) % 4;
                if pos[a] == pos[b] {
                    continue;
                }
                let (oa, ob) = (corner_off[a], corner_off[b]);
                let (lo, axis) = if oa[0] != ob[0] {
                    ([oa[0].min(ob[0]), oa[1]], 0usize)
                } else {
                    ([oa[0], oa[1].min(ob[1])], 1usize)
                };
                let (gi, gj) = (ci + lo[0], cj + lo[1]);
                let key = key_of(gi, gj, axis);
                let id = *edge_ids.entry(key).or_insert_with(|| {
                    // interpolate from the lower corner along the axis
                    let (va, vb) = if (axis == 0 && oa[0] < ob[0]) || (axis == 1 && oa[1] < ob[1])
                    {
                        (vals[a], vals[b])
                    } else {
                        (vals[b], vals[a])
                    };
                    let t = va / (va - vb);
                    let mut p = [spec.coord(0, gi), spec.coord(1, gj)];
                    p[axis] += t * spec.lambda;
                    vertices.push(p);
                    (vertices.len() - 1) as u32
                });
                vertex_of_side[s] = id;
                crossings.push((s, pos[a]));
            }
            let mut pairing: [Option<usize>; 12] = [None; 12];
            pair_face_crossings(
                &crossings,
                || {
                    let p = [
                        spec.coord(0, ci) + 0.5 * spec.lambda,
                        spec.coord(1, cj) + 0.5 * spec.lambda,
                    ];
                    field.eval(&p) > 0.0
                },
                &mut pairing,
            );
            for (s, target) in pairing.iter().enumerate().take(4) {
                if let Some(e) = target {
                    let from = vertex_of_side[s];
                    let to = vertex_of_side[*e];
                    out_of.insert(from, to);
                    has_in.insert(to, true);
                }
            }
        }
    }

    // open chains start at vertices with no incoming segment
    let mut boundary = PlanarBoundary::default();
    let mut visited: std::collections::HashSet<u32> = std::collections::HashSet::new();
    let mut starts: Vec<u32> = out_of
        .keys()
        .filter(|v| !has_in.get(v).copied().unwrap_or(false))
        .copied()
        .collect();
    starts.sort_unstable();
    for s in starts {
        let mut chain = Vec::new();
        let mut cur = s;
        loop {
            visited.insert(cur);
            push_distinct(&mut chain, vertices[cur as usize]);
            match out_of.get(&cur) {
                Some(&next) => cur = next,
                None => break,
            }
        }
        if chain.len() >= 2 {
            boundary.open_chains.push(chain);
        }
    }
    // remaining segments form loops
    let mut loop_starts: Vec<u32> = out_of
        .keys()
        .filter(|v| !visited.contains(v))
        .copied()
        .collect();
    loop_starts.sort_unstable();
    for s in loop_starts {
        if visited.contains(&s) {
            continue;
        }
        let mut lp = Vec::new();
        let mut cur = s;
        loop {
            visited.insert(cur);
            push_distinct(&mut lp, vertices[cur as usize]);
            cur = out_of[&cur];
            if cur == s {
                break;
            }
        }
        if lp.len() >= 3 {
            boundary.loops.push(lp);
        }
    }
    Ok(boundary)
}

fn push_distinct(points: &mut Vec<[f64; 2]>, p: [f64; 2]) {
    if points.last().map(|q| q[0] == p[0] && q[1] == p[1]) != Some(true) {
        points.push(p);
    }
}

// --------------------------------------------------------------------------
// Representative-point refinement
// --------------------------------------------------------------------------

/// Project `start` onto the level set by bracketing along the gradient
/// direction (within `2 lambda`) and bisecting until `|f| <= REFINE_TOL`.
/// `None` when no sign change brackets the boundary.
pub fn refine_to_boundary<F: ScalarField>(
    field: &F,
    start: &[f64],
    lambda: f64,
) -> Option<Vec<f64>> {
    let f0 = field.eval(start);
    if f0.abs() <= REFINE_TOL {
        return Some(start.to_vec());
    }
    let grad = field.grad_at(start).ok()?;
    let norm = grad.norm();
    if norm < 1e-14 {
        return None;
    }
    let dir: Vec<f64> = grad.iter().map(|g| g / norm).collect();
    let probe = |t: f64| -> f64 {
        let p: Vec<f64> = start.iter().zip(&dir).map(|(s, d)| s + t * d).collect();
        field.eval(&p)
    };
    let mut bracket: Option<(f64, f64, f64)> = None;
    for delta in [0.25 * lambda, 0.5 * lambda, lambda, 2.0 * lambda] {
        let fp = probe(delta);
        if opposite(f0, fp) {
            bracket = Some((0.0, f0, delta));
            break;
        }
        let fm = probe(-delta);
        if opposite(fm, f0) {
            bracket = Some((-delta, fm, 0.0));
            break;
        }
        if opposite(fm, fp) {
            bracket = Some((-delta, fm, delta));
            break;
        }
    }
    let (mut lo, mut flo, mut hi) = bracket?;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        let fm = probe(mid);
        if fm.abs() <= REFINE_TOL {
            return Some(start.iter().zip(&dir).map(|(s, d)| s + mid * d).collect());
        }
        if opposite(flo, fm) {
            hi = mid;
        } else {
            lo = mid;
            flo = fm;
        }
    }
    None
}

#[inline]
fn opposite(a: f64, b: f64) -> bool {
    (a > 0.0) != (b > 0.0)
}

/// Per-face representative points of a mesh, refined onto the level set.
/// `points[i]` is `None` when face `i` could not be refined; `dropped`
/// counts those.
#[derive(Debug, Clone)]
pub struct RefinedFacePoints {
    pub points: Vec<Option<Vec<f64>>>,
    pub dropped: usize,
}

pub fn refine_mesh_points<F: ScalarField>(
    field: &F,
    mesh: &TriMesh,
    lambda: f64,
) -> RefinedFacePoints {
    let points: Vec<Option<Vec<f64>>> = (0..mesh.faces.len())
        .into_par_iter()
        .map(|fi| refine_to_boundary(field, &mesh.face_centroid(fi), lambda))
        .collect();
    let dropped = points.iter().filter(|p| p.is_none()).count();
    RefinedFacePoints { points, dropped }
}

/// Refined midpoints of the segments of a polyline (closed when `closed`).
pub fn refine_polyline_midpoints<F: ScalarField>(
    field: &F,
    points: &[[f64; 2]],
    closed: bool,
    lambda: f64,
) -> RefinedFacePoints {
    let n = points.len();
    let seg_count = if closed { n } else { n.saturating_sub(1) };
    let refined: Vec<Option<Vec<f64>>> = (0..seg_count)
        .map(|s| {
            let a = points[s];
            let b = points[(s + 1) % n];
            let mid = [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])];
            refine_to_boundary(field, &mid, lambda)
        })
        .collect();
    let dropped = refined.iter().filter(|p| p.is_none()).count();
    RefinedFacePoints {
        points: refined,
        dropped,
    }
}
