use super::{signed_area, MeshError, PolyMesh};

/// Fan triangulation of one polygonal cell anchored at its first vertex.
///
/// Triangle `i` is `(v0, v_{i+1}, v_{i+2})`. Internal edge `i` is
/// `(v_{i+2}, v0)`, shared by triangles `i` and `i + 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubTriangulation {
    pub parent_cell: usize,
    /// Global vertex indices, counterclockwise.
    pub triangles: Vec<[usize; 3]>,
    /// Global vertex indices of each internal edge, oriented towards the anchor.
    pub internal_edges: Vec<[usize; 2]>,
    /// `(left, right)` triangles of each internal edge. `left` traverses the
    /// edge in its stored direction, so the clockwise-rotated tangent is
    /// `left`'s outward normal.
    pub internal_edge_triangles: Vec<[usize; 2]>,
    /// For each local polygon edge `j`, the sub-triangle containing it.
    pub boundary_edge_map: Vec<usize>,
}

impl SubTriangulation {
    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }
}

/// Fan-triangulates cell `cell` from its first vertex. Fails if any fan
/// triangle is degenerate or inverted.
pub fn triangulate_cell(mesh: &PolyMesh, cell: usize) -> Result<SubTriangulation, MeshError> {
    let cyc = mesh.cell(cell);
    let n = cyc.len();
    let scale = mesh.cell_diameter(cell).powi(2);
    let triangles: Vec<[usize; 3]> = (0..n - 2).map(|i| [cyc[0], cyc[i + 1], cyc[i + 2]]).collect();
    for t in &triangles {
        if signed_area(&mesh.triangle_points(*t)) <= 1e-14 * scale {
            return Err(MeshError::NotStarShaped { cell });
        }
    }
    // triangle i traverses its side v_{i+2} -> v0 counterclockwise
    let internal_edges = (0..n.saturating_sub(3))
        .map(|i| [cyc[i + 2], cyc[0]])
        .collect();
    let internal_edge_triangles = (0..n.saturating_sub(3)).map(|i| [i, i + 1]).collect();
    let boundary_edge_map = (0..n)
        .map(|j| match j {
            0 => 0,
            j if j == n - 1 => n - 3,
            j => j - 1,
        })
        .collect();
    Ok(SubTriangulation {
        parent_cell: cell,
        triangles,
        internal_edges,
        internal_edge_triangles,
        boundary_edge_map,
    })
}
