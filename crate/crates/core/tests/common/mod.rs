#![allow(dead_code)]

use nalgebra::{Point2, Vector2};
use rand::Rng;
use wg_sfem::polymesh::{generate, MeshFamily, PolyMesh};

/// Dense bivariate polynomial `sum c_ab x^a y^b` with `a + b <= degree`.
#[derive(Debug, Clone)]
pub struct Poly {
    pub terms: Vec<(usize, usize, f64)>,
}

impl Poly {
    pub fn random(degree: usize, rng: &mut impl Rng) -> Self {
        let mut terms = Vec::new();
        for a in 0..=degree {
            for b in 0..=degree - a {
                terms.push((a, b, rng.gen_range(-1.0..1.0)));
            }
        }
        Poly { terms }
    }

    pub fn eval(&self, p: Point2<f64>) -> f64 {
        self.terms
            .iter()
            .map(|&(a, b, c)| c * p.x.powi(a as i32) * p.y.powi(b as i32))
            .sum()
    }

    pub fn grad(&self, p: Point2<f64>) -> Vector2<f64> {
        self.terms
            .iter()
            .map(|&(a, b, c)| {
                let dx = if a == 0 { 0.0 } else { a as f64 * p.x.powi(a as i32 - 1) * p.y.powi(b as i32) };
                let dy = if b == 0 { 0.0 } else { b as f64 * p.x.powi(a as i32) * p.y.powi(b as i32 - 1) };
                c * Vector2::new(dx, dy)
            })
            .sum()
    }
}

/// Meshes covering every cell shape the generators produce.
pub fn shape_meshes() -> Vec<(String, PolyMesh)> {
    let mut out = Vec::new();
    for family in MeshFamily::ALL {
        for level in 1..=3 {
            out.push((format!("{family}-{level}"), generate(family, level).unwrap()));
        }
    }
    out.push((
        "triangle".to_string(),
        PolyMesh::new(
            vec![Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), Point2::new(0.3, 0.8)],
            vec![vec![0, 1, 2]],
        )
        .unwrap(),
    ));
    out
}

/// A representative subset of cells: first, last and a middle cell of each
/// shape mesh.
pub fn sample_cells(mesh: &PolyMesh) -> Vec<usize> {
    let n = mesh.num_cells();
    let mut cells = vec![0, n / 2, n - 1];
    // the hex meshes mix arities; make sure every arity is present
    for arity in [3, 4, 6] {
        if let Some(c) = (0..n).find(|&c| mesh.cell(c).len() == arity) {
            cells.push(c);
        }
    }
    cells.sort_unstable();
    cells.dedup();
    cells
}

pub fn rel_diff(a: &nalgebra::DVector<f64>, b: &nalgebra::DVector<f64>) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

/// Extremes of `|||v||| / ||v||_{1,h}` over `samples` random `v` in `V_h^0`
/// on the square grid of `level`.
pub fn norm_ratio_range(level: usize, k: usize, samples: usize, rng: &mut impl Rng) -> (f64, f64) {
    use wg_sfem::localspaces::build_local_spaces;
    use wg_sfem::wgsolve::{discrete_h1_norm, energy_norm, DofMap};

    let mesh = generate(MeshFamily::Square, level).unwrap();
    let spaces = build_local_spaces(&mesh, k).unwrap();
    let dofs = DofMap::new(&mesh, k);
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for _ in 0..samples {
        let v = nalgebra::DVector::from_fn(dofs.total(), |g, _| {
            if dofs.is_constrained(g) {
                0.0
            } else {
                rng.gen_range(-1.0..1.0)
            }
        });
        let r = energy_norm(&mesh, &spaces, &dofs, &v) / discrete_h1_norm(&mesh, &spaces, &dofs, &v);
        lo = lo.min(r);
        hi = hi.max(r);
    }
    (lo, hi)
}
