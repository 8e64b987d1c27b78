//! Extracted boundary geometry: triangle meshes in 3D, polylines in 2D,
//! with the combinatorial checks (orientability, closedness, components,
//! V - E + F) needed before any Gauss-Bonnet integration is trusted.

use crate::error::Result;
use serde::Serialize;
use std::collections::HashMap;
use std::io::Write;
use std::path::Path;

/// Faces at or below this area count as degenerate. They are kept in the
/// mesh (removing a face would unpair its edges and puncture the surface)
/// but tracked, and they contribute nothing measurable to area or
/// curvature integrals.
pub const DEGENERATE_AREA: f64 = 1e-14;

/// Triangle mesh of a 3D level set. Faces are consistently oriented with
/// normals pointing toward the positive side of the field.
#[derive(Debug, Clone, Default)]
pub struct TriMesh {
    pub vertices: Vec<[f64; 3]>,
    pub faces: Vec<[u32; 3]>,
    pub face_areas: Vec<f64>,
    /// Faces at or below [`DEGENERATE_AREA`], kept for closedness.
    pub degenerate_faces: usize,
}

/// Edge-pairing summary of a mesh.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct EdgeReport {
    /// Every edge is shared by exactly two faces.
    pub closed: bool,
    /// Every interior edge is traversed once in each direction.
    pub oriented: bool,
    /// Edges incident to exactly one face (mesh clipped at the window).
    pub boundary_edges: usize,
    /// Edges incident to more than two faces.
    pub nonmanifold_edges: usize,
}

pub fn triangle_area(a: &[f64; 3], b: &[f64; 3], c: &[f64; 3]) -> f64 {
    let u = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
    let v = [c[0] - a[0], c[1] - a[1], c[2] - a[2]];
    let cx = u[1] * v[2] - u[2] * v[1];
    let cy = u[2] * v[0] - u[0] * v[2];
    let cz = u[0] * v[1] - u[1] * v[0];
    0.5 * (cx * cx + cy * cy + cz * cz).sqrt()
}

impl TriMesh {
    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }

    pub fn total_area(&self) -> f64 {
        self.face_areas.iter().sum()
    }

    pub fn face_centroid(&self, face: usize) -> [f64; 3] {
        let [a, b, c] = self.faces[face];
        let (a, b, c) = (
            &self.vertices[a as usize],
            &self.vertices[b as usize],
            &self.vertices[c as usize],
        );
        [
            (a[0] + b[0] + c[0]) / 3.0,
            (a[1] + b[1] + c[1]) / 3.0,
            (a[2] + b[2] + c[2]) / 3.0,
        ]
    }

    /// Unnormalized face normal from the winding order.
    pub fn face_normal(&self, face: usize) -> [f64; 3] {
        let [a, b, c] = self.faces[face];
        let (a, b, c) = (
            &self.vertices[a as usize],
            &self.vertices[b as usize],
            &self.vertices[c as usize],
        );
        let u = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
        let v = [c[0] - a[0], c[1] - a[1], c[2] - a[2]];
        [
            u[1] * v[2] - u[2] * v[1],
            u[2] * v[0] - u[0] * v[2],
            u[0] * v[1] - u[1] * v[0],
        ]
    }

    pub fn edge_report(&self) -> EdgeReport {
        let mut directed: HashMap<(u32, u32), u32> = HashMap::new();
        for f in &self.faces {
            for e in [(f[0], f[1]), (f[1], f[2]), (f[2], f[0])] {
                *directed.entry(e).or_insert(0) += 1;
            }
        }
        let mut undirected: HashMap<(u32, u32), (u32, u32)> = HashMap::new();
        for (&(u, v), &count) in &directed {
            let key = (u.min(v), u.max(v));
            let entry = undirected.entry(key).or_insert((0, 0));
            if (u, v) == key {
                entry.0 += count;
            } else {
                entry.1 += count;
            }
        }
        let mut boundary = 0usize;
        let mut nonmanifold = 0usize;
        let mut oriented = true;
        for &(fwd, bwd) in undirected.values() {
            let total = fwd + bwd;
            match total {
                1 => boundary += 1,
                2 => {
                    if fwd != 1 || bwd != 1 {
                        oriented = false;
                    }
                }
                _ => nonmanifold += 1,
            }
        }
        EdgeReport {
            closed: boundary == 0 && nonmanifold == 0,
            oriented: oriented && nonmanifold == 0,
            boundary_edges: boundary,
            nonmanifold_edges: nonmanifold,
        }
    }

    fn referenced_vertices(&self) -> usize {
        let mut seen = vec![false; self.vertices.len()];
        for f in &self.faces {
            for &v in f {
                seen[v as usize] = true;
            }
        }
        seen.iter().filter(|&&s| s).count()
    }

    fn edge_count(&self) -> usize {
        let mut edges: std::collections::HashSet<(u32, u32)> = std::collections::HashSet::new();
        for f in &self.faces {
            for (u, v) in [(f[0], f[1]), (f[1], f[2]), (f[2], f[0])] {
                edges.insert((u.min(v), u.max(v)));
            }
        }
        edges.len()
    }

    /// Combinatorial Euler characteristic `V - E + F` (edges deduplicated
    /// as unordered vertex pairs; only vertices used by faces count).
    pub fn euler_characteristic(&self) -> i64 {
        self.referenced_vertices() as i64 - self.edge_count() as i64 + self.faces.len() as i64
    }

    /// Connected components of the face graph (union-find over shared
    /// vertices).
    pub fn component_count(&self) -> usize {
        if self.faces.is_empty() {
            return 0;
        }
        let mut parent: Vec<u32> = (0..self.vertices.len() as u32).collect();
        fn find(parent: &mut [u32], mut x: u32) -> u32 {
            while parent[x as usize] != x {
                parent[x as usize] = parent[parent[x as usize] as usize];
                x = parent[x as usize];
            }
            x
        }
        for f in &self.faces {
            let a = find(&mut parent, f[0]);
            for &v in &f[1..] {
                let b = find(&mut parent, v);
                parent[b as usize] = a;
            }
        }
        let mut roots = std::collections::HashSet::new();
        let mut seen = vec![false; self.vertices.len()];
        for f in &self.faces {
            for &v in f {
                if !seen[v as usize] {
                    seen[v as usize] = true;
                    roots.insert(find(&mut parent, v));
                }
            }
        }
        roots.len()
    }

    /// Wavefront OBJ: `v x y z` lines then 1-based `f i j k` lines.
    pub fn write_obj<W: Write>(&self, mut w: W) -> Result<()> {
        for v in &self.vertices {
            writeln!(w, "v {} {} {}", v[0], v[1], v[2])?;
        }
        for f in &self.faces {
            writeln!(w, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1)?;
        }
        Ok(())
    }

    pub fn save_obj(&self, path: impl AsRef<Path>) -> Result<()> {
        let file = std::fs::File::create(path)?;
        self.write_obj(std::io::BufWriter::new(file))
    }
}

/// 2D level-set geometry: closed loops plus any chains clipped open at the
/// sampling window.
#[derive(Debug, Clone, Default)]
pub struct PlanarBoundary {
    /// Closed loops; the segment from the last vertex back to the first is
    /// implied.
    pub loops: Vec<Vec<[f64; 2]>>,
    /// Open chains that end on the window boundary.
    pub open_chains: Vec<Vec<[f64; 2]>>,
}

impl PlanarBoundary {
    pub fn is_empty(&self) -> bool {
        self.loops.is_empty() && self.open_chains.is_empty()
    }

    pub fn loop_perimeter(&self, index: usize) -> f64 {
        polyline_length(&self.loops[index], true)
    }

    /// CSV rows `curve_id,kind,x,y`, loops first.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "curve_id,kind,x,y")?;
        let mut id = 0usize;
        for l in &self.loops {
            for p in l {
                writeln!(w, "{id},closed,{},{}", p[0], p[1])?;
            }
            id += 1;
        }
        for c in &self.open_chains {
            for p in c {
                writeln!(w, "{id},open,{},{}", p[0], p[1])?;
            }
            id += 1;
        }
        Ok(())
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let file = std::fs::File::create(path)?;
        self.write_csv(std::io::BufWriter::new(file))
    }
}

pub fn polyline_length(points: &[[f64; 2]], closed: bool) -> f64 {
    let mut len = 0.0;
    for w in points.windows(2) {
        len += ((w[1][0] - w[0][0]).powi(2) + (w[1][1] - w[0][1]).powi(2)).sqrt();
    }
    if closed && points.len() > 1 {
        let (a, b) = (points[points.len() - 1], points[0]);
        len += ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt();
    }
    len
}
