use std::fmt;
use std::str::FromStr;

use nalgebra::Point2;

use super::{MeshError, PolyMesh};

/// Generators refuse levels above this to bound memory use.
pub const MAX_GENERATOR_LEVEL: usize = 12;

/// Relative vertical shift of the odd interior rows in the trapezoid family.
const QUAD_SHIFT: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MeshFamily {
    Square,
    Quad,
    Hex,
}

impl MeshFamily {
    pub const ALL: [MeshFamily; 3] = [MeshFamily::Square, MeshFamily::Quad, MeshFamily::Hex];

    pub fn name(self) -> &'static str {
        match self {
            MeshFamily::Square => "square",
            MeshFamily::Quad => "quad",
            MeshFamily::Hex => "hex",
        }
    }
}

impl fmt::Display for MeshFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MeshFamily {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "square" => Ok(MeshFamily::Square),
            "quad" => Ok(MeshFamily::Quad),
            "hex" => Ok(MeshFamily::Hex),
            other => Err(format!("unknown mesh family '{other}' (square|quad|hex)")),
        }
    }
}

pub fn generate(family: MeshFamily, level: usize) -> Result<PolyMesh, MeshError> {
    match family {
        MeshFamily::Square => generate_square_grid(level),
        MeshFamily::Quad => generate_quad_grid(level),
        MeshFamily::Hex => generate_hex_grid(level),
    }
}

fn check_level(level: usize) -> Result<(), MeshError> {
    if level == 0 || level > MAX_GENERATOR_LEVEL {
        return Err(MeshError::LevelOutOfRange {
            level,
            max: MAX_GENERATOR_LEVEL,
        });
    }
    Ok(())
}

fn grid_cells(n: usize) -> Vec<Vec<usize>> {
    let id = |i: usize, j: usize| j * (n + 1) + i;
    (0..n)
        .flat_map(|j| (0..n).map(move |i| vec![id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)]))
        .collect()
}

/// Uniform `2^(level-1) x 2^(level-1)` grid of squares on the unit square.
pub fn generate_square_grid(level: usize) -> Result<PolyMesh, MeshError> {
    check_level(level)?;
    let n = 1usize << (level - 1);
    let h = 1.0 / n as f64;
    let vertices = (0..=n)
        .flat_map(|j| (0..=n).map(move |i| Point2::new(i as f64 * h, j as f64 * h)))
        .collect();
    PolyMesh::new(vertices, grid_cells(n))
}

/// `2^(level-1) x 2^(level-1)` grid of congruent trapezoids.
///
/// Vertices on odd interior rows are lifted by `0.2 h` on even columns and
/// lowered by `0.2 h` on odd columns, so every cell has two vertical sides of
/// lengths `(1 +- 0.2) h` and area `h^2`. The cell shape is the same on every
/// level from 2 on; level 1 is the unperturbed square.
pub fn generate_quad_grid(level: usize) -> Result<PolyMesh, MeshError> {
    check_level(level)?;
    let n = 1usize << (level - 1);
    let h = 1.0 / n as f64;
    let vertices = (0..=n)
        .flat_map(|j| {
            (0..=n).map(move |i| {
                let shift = if j % 2 == 1 && j < n {
                    if i % 2 == 0 {
                        QUAD_SHIFT * h
                    } else {
                        -QUAD_SHIFT * h
                    }
                } else {
                    0.0
                };
                Point2::new(i as f64 * h, j as f64 * h + shift)
            })
        })
        .collect();
    PolyMesh::new(vertices, grid_cells(n))
}

/// Brick-pattern mesh from the `2^level x 2^level` square grid.
///
/// Even rows are tiled by `2h x h` bricks, odd rows are offset by `h` and
/// closed with `h x h` squares at both ends. Each brick keeps the midpoints of
/// its long sides as vertices (they are corners of the bricks in the
/// neighbouring rows), so bricks are hexagons and the end pieces are
/// quadrilaterals. Hexagon cycles start at the bottom midpoint so that the fan
/// triangulation from the first vertex is non-degenerate.
pub fn generate_hex_grid(level: usize) -> Result<PolyMesh, MeshError> {
    check_level(level)?;
    let n = 1usize << level;
    let h = 1.0 / n as f64;
    let id = |i: usize, j: usize| j * (n + 1) + i;
    let vertices = (0..=n)
        .flat_map(|j| (0..=n).map(move |i| Point2::new(i as f64 * h, j as f64 * h)))
        .collect();
    let mut cells = Vec::with_capacity(hex_cell_count(level));
    for r in 0..n {
        let mut spans = Vec::new();
        if r % 2 == 0 {
            spans.extend((0..n / 2).map(|m| (2 * m, 2)));
        } else {
            spans.push((0, 1));
            spans.extend((0..n / 2 - 1).map(|m| (2 * m + 1, 2)));
            spans.push((n - 1, 1));
        }
        for (c0, width) in spans {
            if width == 2 {
                cells.push(vec![
                    id(c0 + 1, r),
                    id(c0 + 2, r),
                    id(c0 + 2, r + 1),
                    id(c0 + 1, r + 1),
                    id(c0, r + 1),
                    id(c0, r),
                ]);
            } else {
                cells.push(vec![id(c0, r), id(c0 + 1, r), id(c0 + 1, r + 1), id(c0, r + 1)]);
            }
        }
    }
    PolyMesh::new(vertices, cells)
}

/// Number of cells of the brick mesh at `level`: `N^2/2 + N/2` with `N = 2^level`.
pub(crate) fn hex_cell_count(level: usize) -> usize {
    let n = 1usize << level;
    n * n / 2 + n / 2
}
