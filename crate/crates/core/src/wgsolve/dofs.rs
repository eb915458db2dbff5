use crate::localspaces::scalar_dim;
use crate::polymesh::PolyMesh;

/// Global numbering of the weak Galerkin unknowns: all cell-interior blocks
/// first, then all edge blocks. Boundary-edge unknowns are constrained and
/// excluded from the free numbering.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DofMap {
    pub k: usize,
    pub num_cells: usize,
    pub num_edges: usize,
    pub cell_block: usize,
    pub edge_block: usize,
    pub boundary_edges: Vec<bool>,
    /// Global index -> free index.
    pub free_index: Vec<Option<usize>>,
    /// Free index -> global index.
    pub free_dofs: Vec<usize>,
}

impl DofMap {
    pub fn new(mesh: &PolyMesh, k: usize) -> Self {
        let num_cells = mesh.num_cells();
        let num_edges = mesh.num_edges();
        let cell_block = scalar_dim(k);
        let edge_block = k + 1;
        let boundary_edges = mesh.boundary_flags();
        let total = num_cells * cell_block + num_edges * edge_block;
        let mut free_index = vec![None; total];
        let mut free_dofs = Vec::with_capacity(total);
        for (g, slot) in free_index.iter_mut().enumerate() {
            let constrained = g >= num_cells * cell_block
                && boundary_edges[(g - num_cells * cell_block) / edge_block];
            if !constrained {
                *slot = Some(free_dofs.len());
                free_dofs.push(g);
            }
        }
        Self {
            k,
            num_cells,
            num_edges,
            cell_block,
            edge_block,
            boundary_edges,
            free_index,
            free_dofs,
        }
    }

    pub fn total(&self) -> usize {
        self.num_cells * self.cell_block + self.num_edges * self.edge_block
    }

    pub fn num_free(&self) -> usize {
        self.free_dofs.len()
    }

    pub fn cell_range(&self, c: usize) -> std::ops::Range<usize> {
        c * self.cell_block..(c + 1) * self.cell_block
    }

    pub fn edge_range(&self, e: usize) -> std::ops::Range<usize> {
        let base = self.num_cells * self.cell_block + e * self.edge_block;
        base..base + self.edge_block
    }

    pub fn is_constrained(&self, g: usize) -> bool {
        self.free_index[g].is_none()
    }

    /// Global indices of the local unknowns of cell `c` (interior block, then
    /// each local edge block in cycle order).
    pub fn local_to_global(&self, mesh: &PolyMesh, c: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self.cell_range(c).collect();
        for &e in mesh.cell_edges(c) {
            out.extend(self.edge_range(e));
        }
        out
    }

    /// Preconditioner blocks in free numbering: one per cell interior and one
    /// per interior edge.
    pub fn free_blocks(&self) -> Vec<Vec<usize>> {
        let cells = (0..self.num_cells).map(|c| self.cell_range(c));
        let edges = (0..self.num_edges)
            .filter(|&e| !self.boundary_edges[e])
            .map(|e| self.edge_range(e));
        cells
            .chain(edges)
            .map(|r| r.map(|g| self.free_index[g].expect("free block")).collect())
            .collect()
    }
}
