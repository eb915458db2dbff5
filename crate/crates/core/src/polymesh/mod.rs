//! Polygonal meshes of the unit square: the mesh data model with derived edge
//! topology, the generated mesh families, fan sub-triangulation, and JSON I/O.

mod generators;
mod io;
mod subtri;

use std::collections::HashMap;

use nalgebra::{Point2, Vector2};
use thiserror::Error;

pub use generators::{
    generate, generate_hex_grid, generate_quad_grid, generate_square_grid, MeshFamily,
    MAX_GENERATOR_LEVEL,
};
pub use io::{mesh_from_json, mesh_to_json, read_mesh, write_mesh, MeshFile};
pub use subtri::{triangulate_cell, SubTriangulation};

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("only dim = 2 meshes are supported, got dim = {0}")]
    UnsupportedDimension(usize),
    #[error("cell {cell}: vertex index {index} out of range ({count} vertices)")]
    VertexOutOfRange {
        cell: usize,
        index: usize,
        count: usize,
    },
    #[error("cell {cell}: polygon needs at least 3 vertices, got {count}")]
    TooFewVertices { cell: usize, count: usize },
    #[error("cell {cell}: vertex {index} repeated in the cycle")]
    RepeatedVertex { cell: usize, index: usize },
    #[error("cell {cell}: orientation is not counterclockwise (signed area {signed_area:e})")]
    Orientation { cell: usize, signed_area: f64 },
    #[error("cell {cell}: polygon boundary self-intersects")]
    SelfIntersecting { cell: usize },
    #[error("cell {cell}: edge ({a}, {b}) is shared inconsistently (non-manifold or same orientation)")]
    NonManifoldEdge { cell: usize, a: usize, b: usize },
    #[error("cell {cell} is not star-shaped with respect to its first vertex; re-anchor the cycle")]
    NotStarShaped { cell: usize },
    #[error("level {level} out of range (1..={max})")]
    LevelOutOfRange { level: usize, max: usize },
    #[error("malformed mesh JSON: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("mesh I/O: {0}")]
    Io(#[from] std::io::Error),
}

/// A mesh edge. `vertices` are ordered as traversed counterclockwise by
/// `left`, the lower-indexed adjacent cell, so the stored normal points from
/// `left` into `right` (outward on the boundary).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub vertices: [usize; 2],
    pub left: usize,
    pub right: Option<usize>,
}

impl Edge {
    pub fn is_boundary(&self) -> bool {
        self.right.is_none()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellGeometry {
    pub area: f64,
    pub centroid: Point2<f64>,
    pub diameter: f64,
}

/// Immutable polygonal mesh. Edges are derived from the cell cycles; local
/// edge `j` of a cell joins its cycle vertices `j` and `j + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyMesh {
    vertices: Vec<Point2<f64>>,
    cells: Vec<Vec<usize>>,
    edges: Vec<Edge>,
    cell_edges: Vec<Vec<usize>>,
    geometry: Vec<CellGeometry>,
}

pub(crate) fn signed_area(points: &[Point2<f64>]) -> f64 {
    let n = points.len();
    0.5 * (0..n)
        .map(|i| {
            let p = points[i];
            let q = points[(i + 1) % n];
            p.x * q.y - q.x * p.y
        })
        .sum::<f64>()
}

fn polygon_centroid(points: &[Point2<f64>], area: f64) -> Point2<f64> {
    let n = points.len();
    let mut c = Vector2::zeros();
    for i in 0..n {
        let p = points[i];
        let q = points[(i + 1) % n];
        let cross = p.x * q.y - q.x * p.y;
        c += (p.coords + q.coords) * cross;
    }
    Point2::from(c / (6.0 * area))
}

fn orient(a: Point2<f64>, b: Point2<f64>, c: Point2<f64>) -> f64 {
    (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
}

/// Proper or touching intersection of closed segments `pq` and `rs`.
fn segments_intersect(p: Point2<f64>, q: Point2<f64>, r: Point2<f64>, s: Point2<f64>) -> bool {
    let scale = (q - p).norm().max((s - r).norm());
    let eps = 1e-14 * scale * scale;
    let d1 = orient(r, s, p);
    let d2 = orient(r, s, q);
    let d3 = orient(p, q, r);
    let d4 = orient(p, q, s);
    if ((d1 > eps && d2 < -eps) || (d1 < -eps && d2 > eps))
        && ((d3 > eps && d4 < -eps) || (d3 < -eps && d4 > eps))
    {
        return true;
    }
    let on = |a: Point2<f64>, b: Point2<f64>, c: Point2<f64>, d: f64| {
        d.abs() <= eps
            && c.x >= a.x.min(b.x) - 1e-14
            && c.x <= a.x.max(b.x) + 1e-14
            && c.y >= a.y.min(b.y) - 1e-14
            && c.y <= a.y.max(b.y) + 1e-14
    };
    on(r, s, p, d1) || on(r, s, q, d2) || on(p, q, r, d3) || on(p, q, s, d4)
}

fn is_simple(points: &[Point2<f64>]) -> bool {
    let n = points.len();
    for i in 0..n {
        for j in (i + 1)..n {
            // adjacent edges share a vertex by construction
            if j == i + 1 || (i == 0 && j == n - 1) {
                continue;
            }
            if segments_intersect(points[i], points[(i + 1) % n], points[j], points[(j + 1) % n]) {
                return false;
            }
        }
    }
    true
}

impl PolyMesh {
    /// Builds and validates a mesh from vertex coordinates and CCW cell cycles.
    pub fn new(vertices: Vec<Point2<f64>>, cells: Vec<Vec<usize>>) -> Result<Self, MeshError> {
        let nv = vertices.len();
        let mut geometry = Vec::with_capacity(cells.len());
        for (c, cell) in cells.iter().enumerate() {
            if cell.len() < 3 {
                return Err(MeshError::TooFewVertices {
                    cell: c,
                    count: cell.len(),
                });
            }
            if let Some(&index) = cell.iter().find(|&&i| i >= nv) {
                return Err(MeshError::VertexOutOfRange {
                    cell: c,
                    index,
                    count: nv,
                });
            }
            for (i, &vi) in cell.iter().enumerate() {
                if cell[i + 1..].contains(&vi) {
                    return Err(MeshError::RepeatedVertex { cell: c, index: vi });
                }
            }
            let points: Vec<_> = cell.iter().map(|&i| vertices[i]).collect();
            let area = signed_area(&points);
            if area <= 0.0 {
                return Err(MeshError::Orientation {
                    cell: c,
                    signed_area: area,
                });
            }
            if !is_simple(&points) {
                return Err(MeshError::SelfIntersecting { cell: c });
            }
            let diameter = points
                .iter()
                .enumerate()
                .flat_map(|(i, p)| points[i + 1..].iter().map(move |q| (p - q).norm()))
                .fold(0.0, f64::max);
            geometry.push(CellGeometry {
                area,
                centroid: polygon_centroid(&points, area),
                diameter,
            });
        }

        let mut edges: Vec<Edge> = Vec::new();
        let mut lookup: HashMap<(usize, usize), usize> = HashMap::new();
        let mut cell_edges = Vec::with_capacity(cells.len());
        for (c, cell) in cells.iter().enumerate() {
            let n = cell.len();
            let mut local = Vec::with_capacity(n);
            for j in 0..n {
                let a = cell[j];
                let b = cell[(j + 1) % n];
                let key = (a.min(b), a.max(b));
                match lookup.get(&key) {
                    None => {
                        lookup.insert(key, edges.len());
                        local.push(edges.len());
                        edges.push(Edge {
                            vertices: [a, b],
                            left: c,
                            right: None,
                        });
                    }
                    Some(&e) => {
                        let edge = &mut edges[e];
                        // the neighbour must traverse the edge in the opposite direction
                        if edge.right.is_some() || edge.vertices != [b, a] || edge.left == c {
                            return Err(MeshError::NonManifoldEdge { cell: c, a, b });
                        }
                        edge.right = Some(c);
                        local.push(e);
                    }
                }
            }
            cell_edges.push(local);
        }

        Ok(Self {
            vertices,
            cells,
            edges,
            cell_edges,
            geometry,
        })
    }

    pub fn dim(&self) -> usize {
        2
    }

    pub fn vertices(&self) -> &[Point2<f64>] {
        &self.vertices
    }

    pub fn cells(&self) -> &[Vec<usize>] {
        &self.cells
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn cell(&self, c: usize) -> &[usize] {
        &self.cells[c]
    }

    /// Mesh edge indices of cell `c`, aligned with its cycle.
    pub fn cell_edges(&self, c: usize) -> &[usize] {
        &self.cell_edges[c]
    }

    pub fn edge(&self, e: usize) -> &Edge {
        &self.edges[e]
    }

    pub fn boundary_flags(&self) -> Vec<bool> {
        self.edges.iter().map(Edge::is_boundary).collect()
    }

    pub fn geometry(&self, c: usize) -> &CellGeometry {
        &self.geometry[c]
    }

    pub fn cell_area(&self, c: usize) -> f64 {
        self.geometry[c].area
    }

    /// Diameter `h_T` of cell `c`.
    pub fn cell_diameter(&self, c: usize) -> f64 {
        self.geometry[c].diameter
    }

    /// Mesh size `h = max_T h_T`.
    pub fn mesh_size(&self) -> f64 {
        self.geometry.iter().map(|g| g.diameter).fold(0.0, f64::max)
    }

    pub fn cell_points(&self, c: usize) -> Vec<Point2<f64>> {
        self.cells[c].iter().map(|&i| self.vertices[i]).collect()
    }

    pub fn triangle_points(&self, t: [usize; 3]) -> [Point2<f64>; 3] {
        t.map(|i| self.vertices[i])
    }

    pub fn edge_points(&self, e: usize) -> [Point2<f64>; 2] {
        self.edges[e].vertices.map(|i| self.vertices[i])
    }

    pub fn edge_length(&self, e: usize) -> f64 {
        let [a, b] = self.edge_points(e);
        (b - a).norm()
    }

    /// Unit normal of edge `e` in its stored orientation.
    pub fn edge_normal(&self, e: usize) -> Vector2<f64> {
        let [a, b] = self.edge_points(e);
        let t = (b - a).normalize();
        Vector2::new(t.y, -t.x)
    }

    /// Unit normal of edge `e` pointing out of cell `c`.
    pub fn outward_normal(&self, c: usize, e: usize) -> Vector2<f64> {
        let n = self.edge_normal(e);
        if self.edges[e].left == c {
            n
        } else {
            -n
        }
    }

    /// Interior angles (radians) of cell `c`, in cycle order.
    pub fn interior_angles(&self, c: usize) -> Vec<f64> {
        let p = self.cell_points(c);
        let n = p.len();
        (0..n)
            .map(|i| {
                let prev = p[(i + n - 1) % n] - p[i];
                let next = p[(i + 1) % n] - p[i];
                // angle swept clockwise from `next` to `prev` for a CCW polygon
                let cross = next.x * prev.y - next.y * prev.x;
                let dot = next.dot(&prev);
                let a = cross.atan2(dot);
                if a < 0.0 {
                    a + 2.0 * std::f64::consts::PI
                } else {
                    a
                }
            })
            .collect()
    }

    pub fn total_area(&self) -> f64 {
        self.geometry.iter().map(|g| g.area).sum()
    }
}
