use std::fs;
use std::path::Path;

use nalgebra::Point2;
use serde::{Deserialize, Serialize};

use super::{MeshError, PolyMesh};

/// On-disk mesh layout: `{"dim":2,"vertices":[[x,y],...],"cells":[[i0,i1,...],...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeshFile {
    pub dim: usize,
    pub vertices: Vec<[f64; 2]>,
    pub cells: Vec<Vec<usize>>,
}

impl From<&PolyMesh> for MeshFile {
    fn from(mesh: &PolyMesh) -> Self {
        MeshFile {
            dim: 2,
            vertices: mesh.vertices().iter().map(|p| [p.x, p.y]).collect(),
            cells: mesh.cells().to_vec(),
        }
    }
}

impl TryFrom<MeshFile> for PolyMesh {
    type Error = MeshError;

    fn try_from(file: MeshFile) -> Result<Self, Self::Error> {
        if file.dim != 2 {
            return Err(MeshError::UnsupportedDimension(file.dim));
        }
        let vertices = file.vertices.iter().map(|v| Point2::new(v[0], v[1])).collect();
        PolyMesh::new(vertices, file.cells)
    }
}

pub fn mesh_to_json(mesh: &PolyMesh) -> String {
    serde_json::to_string(&MeshFile::from(mesh)).expect("mesh serialization cannot fail")
}

pub fn mesh_from_json(text: &str) -> Result<PolyMesh, MeshError> {
    let file: MeshFile = serde_json::from_str(text)?;
    PolyMesh::try_from(file)
}

pub fn write_mesh(mesh: &PolyMesh, path: impl AsRef<Path>) -> Result<(), MeshError> {
    fs::write(path, mesh_to_json(mesh))?;
    Ok(())
}

pub fn read_mesh(path: impl AsRef<Path>) -> Result<PolyMesh, MeshError> {
    mesh_from_json(&fs::read_to_string(path)?)
}
