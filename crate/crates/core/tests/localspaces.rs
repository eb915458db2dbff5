mod common;

use std::f64::consts::PI;

use common::{rel_diff, sample_cells, shape_meshes, Poly};
use nalgebra::{DMatrix, DVector, Point2, Vector2};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wg_sfem::localspaces::*;
use wg_sfem::polymesh::{generate, generate_square_grid, MeshFamily, PolyMesh};
use wg_sfem::quadrature::{segment_points, triangle_points};

fn sin2(p: Point2<f64>) -> f64 {
    (PI * p.x).sin() * (PI * p.y).sin()
}

fn sin2_grad(p: Point2<f64>) -> Vector2<f64> {
    PI * Vector2::new((PI * p.x).cos() * (PI * p.y).sin(), (PI * p.x).sin() * (PI * p.y).cos())
}

#[test]
fn dimension_law_holds_on_every_generated_cell() {
    for (name, mesh) in shape_meshes() {
        for k in 0..=MAX_DEGREE {
            for c in 0..mesh.num_cells() {
                let s = CellSpace::new(&mesh, c, k).unwrap_or_else(|e| panic!("{name} cell {c} k={k}: {e}"));
                let n_v = mesh.cell(c).len();
                assert_eq!(s.lambda_dim(), lambda_dimension(n_v, k), "{name} cell {c} k={k}");
                assert_eq!(s.rt.stacked_dim(), (n_v - 2) * (k + 1) * (k + 3));
            }
        }
    }
}

#[test]
fn triangle_lambda_is_rt() {
    let mesh = PolyMesh::new(
        vec![Point2::new(0.0, 0.0), Point2::new(2.0, 0.0), Point2::new(0.5, 1.0)],
        vec![vec![0, 1, 2]],
    )
    .unwrap();
    for k in 0..=MAX_DEGREE {
        let s = CellSpace::new(&mesh, 0, k).unwrap();
        assert_eq!(s.lambda_dim(), (k + 1) * (k + 3));
        assert_eq!(s.lambda.constraints.nrows(), 0);
    }
}

#[test]
fn lambda_columns_are_pointwise_members() {
    for (name, mesh) in shape_meshes() {
        for k in 0..=3 {
            for c in sample_cells(&mesh) {
                let s = CellSpace::new(&mesh, c, k).unwrap();
                let sub = &s.rt.subtri;
                for col in 0..s.lambda_dim() {
                    let coeffs = s.lambda.coefficients.column(col).into_owned();
                    let scale = coeffs.amax();
                    // continuous normal component across internal sub-edges
                    for (verts, [l, r]) in sub.internal_edges.iter().zip(&sub.internal_edge_triangles) {
                        let a = mesh.vertices()[verts[0]];
                        let b = mesh.vertices()[verts[1]];
                        let t = b - a;
                        let n = Vector2::new(t.y, -t.x).normalize();
                        for (p, _) in segment_points(a, b, 6).unwrap() {
                            let jump = (s.rt.eval_field(coeffs.as_slice(), *l, p)
                                - s.rt.eval_field(coeffs.as_slice(), *r, p))
                            .dot(&n);
                            assert!(jump.abs() < 1e-10 * scale, "{name} c{c} k{k} jump {jump:e}");
                        }
                    }
                    // one divergence polynomial: every piece's divergence,
                    // extended to the whole cell, agrees with piece 0
                    let d = s.rt.local.dim();
                    let div = |t: usize, p: Point2<f64>| -> f64 {
                        s.rt.local
                            .eval_divergence(&s.scalar, p)
                            .iter()
                            .zip(&coeffs.as_slice()[t * d..(t + 1) * d])
                            .map(|(a, b)| a * b)
                            .sum()
                    };
                    let h = mesh.cell_diameter(c);
                    for tri in &sub.triangles {
                        for (p, _) in triangle_points(mesh.triangle_points(*tri), 4).unwrap() {
                            for t in 1..sub.num_triangles() {
                                let diff = div(t, p) - div(0, p);
                                assert!(diff.abs() * h < 1e-10 * scale, "{name} c{c} k{k} div {diff:e}");
                            }
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn vector_polynomials_lie_in_lambda() {
    for (name, mesh) in shape_meshes() {
        for k in 0..=MAX_DEGREE {
            for c in sample_cells(&mesh) {
                let s = CellSpace::new(&mesh, c, k).unwrap();
                let z = &s.lambda.coefficients;
                let m = s.rt.mass();
                for comp in 0..2 {
                    for idx in 0..scalar_dim(k) {
                        let v = vector_monomial_coefficients(&s.rt, comp, idx);
                        let resid = &v - z * (z.transpose() * (&m * &v));
                        let r = (resid.dot(&(&m * &resid)) / v.dot(&(&m * &v))).sqrt();
                        assert!(r < 1e-10, "{name} c{c} k{k} ({comp},{idx}) {r:e}");
                    }
                }
            }
        }
    }
}

#[test]
fn mass_times_operator_equals_moments() {
    for (name, mesh) in shape_meshes() {
        for k in 0..=MAX_DEGREE {
            for c in sample_cells(&mesh) {
                let s = CellSpace::new(&mesh, c, k).unwrap();
                let wg = &s.weak_gradient;
                assert_eq!(wg.matrix.shape(), (s.lambda_dim(), s.local_dim()));
                let r = (&wg.mass * &wg.matrix - &wg.moments).norm() / wg.moments.norm();
                assert!(r < 1e-12, "{name} c{c} k{k}: {r:e}");
                assert!(wg.mass_condition < ILL_CONDITIONED, "{name} c{c} k{k}");
            }
        }
    }
}

#[test]
fn weak_gradient_of_x_is_unit_vector() {
    for (name, mesh) in shape_meshes() {
        for k in 0..=MAX_DEGREE {
            for c in sample_cells(&mesh) {
                let s = CellSpace::new(&mesh, c, k).unwrap();
                let v = project_qh(&mesh, &s, |p| p.x).unwrap();
                let g = s.apply_weak_gradient(&v);
                let e1 = project_lambda(&mesh, &s, |_| Vector2::new(1.0, 0.0)).unwrap();
                assert!((&g - &e1).amax() < 1e-12 * e1.amax().max(1.0), "{name} c{c} k{k} {:e} {:e}", (&g - &e1).amax(), e1.amax());
                for tri in 0..s.rt.num_triangles() {
                    let p = mesh.triangle_points(s.rt.subtri.triangles[tri]);
                    let centre = Point2::from((p[0].coords + p[1].coords + p[2].coords) / 3.0);
                    assert!((s.eval_lambda(&g, tri, centre) - Vector2::new(1.0, 0.0)).norm() < 1e-11);
                }
            }
        }
    }
}

#[test]
fn commuting_identity_for_random_polynomials_and_sine() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for (name, mesh) in shape_meshes() {
        for k in 0..=3 {
            for c in sample_cells(&mesh) {
                let s = CellSpace::new(&mesh, c, k).unwrap();
                for trial in 0..3 {
                    let poly = Poly::random(k + 2, &mut rng);
                    let lhs = s.apply_weak_gradient(&project_qh(&mesh, &s, |p| poly.eval(p)).unwrap());
                    let rhs = project_lambda(&mesh, &s, |p| poly.grad(p)).unwrap();
                    let r = rel_diff(&lhs, &rhs);
                    assert!(r <= 1e-10, "{name} c{c} k{k} trial {trial}: {r:e}");
                }
            }
        }
    }
}

/// For non-polynomial data the identity holds up to the error of the data
/// quadrature, so it is checked on level-4 meshes, which contain every cell
/// shape the generators produce.
#[test]
fn commuting_identity_for_sine_on_fine_cells() {
    for family in MeshFamily::ALL {
        let mesh = generate(family, 4).unwrap();
        for k in 0..=3 {
            for c in sample_cells(&mesh) {
                let s = CellSpace::new(&mesh, c, k).unwrap();
                let lhs = s.apply_weak_gradient(&project_qh(&mesh, &s, sin2).unwrap());
                let rhs = project_lambda(&mesh, &s, sin2_grad).unwrap();
                let r = rel_diff(&lhs, &rhs);
                assert!(r <= 1e-10, "{family} c{c} k{k}: {r:e}");
            }
        }
    }
}

#[test]
fn weak_gradient_is_exact_for_degree_k_plus_one() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for (name, mesh) in shape_meshes() {
        for k in 0..=MAX_DEGREE {
            for c in sample_cells(&mesh) {
                let s = CellSpace::new(&mesh, c, k).unwrap();
                let poly = Poly::random(k + 1, &mut rng);
                let g = s.apply_weak_gradient(&project_qh(&mesh, &s, |p| poly.eval(p)).unwrap());
                for (t, tri) in s.rt.subtri.triangles.iter().enumerate() {
                    for (p, _) in triangle_points(mesh.triangle_points(*tri), 3).unwrap() {
                        let exact = poly.grad(p);
                        let err = (s.eval_lambda(&g, t, p) - exact).norm();
                        assert!(err < 1e-10 * exact.norm().max(1.0), "{name} c{c} k{k}: {err:e}");
                    }
                }
            }
        }
    }
}

#[test]
fn stiffness_kernel_is_the_constants() {
    for (name, mesh) in shape_meshes() {
        for k in 0..=MAX_DEGREE {
            for c in sample_cells(&mesh) {
                let s = CellSpace::new(&mesh, c, k).unwrap();
                let kt = &s.weak_gradient.stiffness;
                assert!((kt - kt.transpose()).amax() <= 1e-14 * kt.amax());
                let eig = kt.clone().symmetric_eigen().eigenvalues;
                let max = eig.amax();
                let small = eig.iter().filter(|&&l| l.abs() <= 1e-10 * max).count();
                assert_eq!(small, 1, "{name} c{c} k{k}: {eig:?}");
                assert!(eig.min() > -1e-10 * max);
            }
        }
    }
}

#[test]
fn q0_of_sine_on_corner_cell() {
    // cell (0, 1/2)^2: mean of sin(pi x) sin(pi y) is 4 (1/pi)^2 = 4 / pi^2,
    // and Q_0 preserves the mean because constants lie in P_k
    let mesh = generate_square_grid(2).unwrap();
    let c = (0..4)
        .find(|&c| mesh.geometry(c).centroid.coords.norm() < 0.4)
        .unwrap();
    let s = CellSpace::new(&mesh, c, MAX_DEGREE).unwrap();
    let q0 = project_q0(&mesh, &s, sin2).unwrap();
    let integral: f64 = s
        .rt
        .subtri
        .triangles
        .iter()
        .flat_map(|t| triangle_points(mesh.triangle_points(*t), MAX_DEGREE).unwrap())
        .map(|(p, w)| w * s.scalar.eval_combination(q0.as_slice(), p))
        .sum();
    let mean = integral / mesh.cell_area(c);
    assert!((mean - 4.0 / (PI * PI)).abs() < 1e-12, "{:e}", mean - 4.0 / (PI * PI));
}

#[test]
fn projections_are_idempotent_on_their_spaces() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for (name, mesh) in shape_meshes() {
        for k in 0..=MAX_DEGREE {
            let c = sample_cells(&mesh)[0];
            let s = CellSpace::new(&mesh, c, k).unwrap();
            let coeffs = DVector::from_fn(s.scalar_dim(), |_, _| rand::Rng::gen_range(&mut rng, -1.0..1.0));
            let q = project_q0(&mesh, &s, |p| s.scalar.eval_combination(coeffs.as_slice(), p)).unwrap();
            // the degree-4 scalar mass matrix costs one digit
            let tol = if k < 4 { 1e-12 } else { 1e-11 };
            assert!(rel_diff(&q, &coeffs) < tol, "{name} k{k} {:e}", rel_diff(&q, &coeffs));
            let e = mesh.cell_edges(c)[0];
            let eb = &s.edges[0];
            let ec = DVector::from_fn(k + 1, |_, _| rand::Rng::gen_range(&mut rng, -1.0..1.0));
            let q = project_qb(&mesh, e, k, |p| eb.eval_combination(ec.as_slice(), p)).unwrap();
            assert!(rel_diff(&q, &ec) < 1e-12, "{name} k{k} edge");
            let lc = DVector::from_fn(s.lambda_dim(), |_, _| rand::Rng::gen_range(&mut rng, -1.0..1.0));
            let stacked = s.stacked(&lc);
            let sub = &s.rt.subtri;
            // the field is piecewise; locate the piece by barycentric test
            let field = |p: Point2<f64>| {
                let t = (0..sub.num_triangles())
                    .find(|&t| inside(mesh.triangle_points(sub.triangles[t]), p))
                    .unwrap_or(0);
                s.rt.eval_field(stacked.as_slice(), t, p)
            };
            let q = project_lambda(&mesh, &s, field).unwrap();
            assert!(rel_diff(&q, &lc) < 1e-10, "{name} k{k} lambda {:e}", rel_diff(&q, &lc));
        }
    }
}

fn inside(t: [Point2<f64>; 3], p: Point2<f64>) -> bool {
    let cross = |a: Point2<f64>, b: Point2<f64>| (b - a).perp(&(p - a));
    let d = [cross(t[0], t[1]), cross(t[1], t[2]), cross(t[2], t[0])];
    d.iter().all(|&x| x >= -1e-14)
}

/// Least-squares oracle: fit the Lambda basis fields to `F` at weighted
/// quadrature points with an SVD solve, independent of the mass matrix.
#[test]
fn lambda_projection_matches_least_squares_oracle() {
    for (name, mesh) in shape_meshes() {
        for k in 0..=2 {
            let c = *sample_cells(&mesh).last().unwrap();
            let s = CellSpace::new(&mesh, c, k).unwrap();
            let n = s.lambda_dim();
            let mut rows: Vec<(Vec<f64>, f64)> = Vec::new();
            for (t, tri) in s.rt.subtri.triangles.iter().enumerate() {
                for (p, w) in triangle_points(mesh.triangle_points(*tri), data_degree(k)).unwrap() {
                    let sw = w.sqrt();
                    let f = sin2_grad(p);
                    let fields: Vec<Vector2<f64>> = (0..n)
                        .map(|j| s.eval_lambda(&DVector::from_fn(n, |i, _| f64::from(i == j)), t, p))
                        .collect();
                    rows.push((fields.iter().map(|v| sw * v.x).collect(), sw * f.x));
                    rows.push((fields.iter().map(|v| sw * v.y).collect(), sw * f.y));
                }
            }
            let a = DMatrix::from_fn(rows.len(), n, |i, j| rows[i].0[j]);
            let b = DVector::from_iterator(rows.len(), rows.iter().map(|r| r.1));
            let oracle = a.svd(true, true).solve(&b, 1e-14).unwrap();
            let got = project_lambda(&mesh, &s, sin2_grad).unwrap();
            assert!(rel_diff(&got, &oracle) < 1e-10, "{name} k{k}: {:e}", rel_diff(&got, &oracle));
        }
    }
}

/// Unit square, k = 0, fan through (0,0)-(1,1). A hand-built basis of
/// Lambda_0 is (1,0), (0,1), (x,y) and the indicator of the lower triangle
/// times (1,1): normal continuity across the diagonal only constrains the
/// constant parts along (1,-1), and equal divergence ties the radial parts.
#[test]
fn unit_square_weak_gradient_against_hand_basis() {
    let mesh = generate_square_grid(1).unwrap();
    let s = CellSpace::new(&mesh, 0, 0).unwrap();
    let basis = |p: Point2<f64>, on_lower: bool| -> [Vector2<f64>; 4] {
        let ind = if on_lower { 1.0 } else { 0.0 };
        [
            Vector2::new(1.0, 0.0),
            Vector2::new(0.0, 1.0),
            Vector2::new(p.x, p.y),
            Vector2::new(ind, ind),
        ]
    };
    let div = [0.0, 0.0, 2.0, 0.0];
    let tris = [
        [Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), Point2::new(1.0, 1.0)],
        [Point2::new(0.0, 0.0), Point2::new(1.0, 1.0), Point2::new(0.0, 1.0)],
    ];
    let mut m = DMatrix::<f64>::zeros(4, 4);
    for (ti, tri) in tris.iter().enumerate() {
        for (p, w) in triangle_points(*tri, 4).unwrap() {
            let q = basis(p, ti == 0);
            for i in 0..4 {
                for j in 0..4 {
                    m[(i, j)] += w * q[i].dot(&q[j]);
                }
            }
        }
    }
    // moments of each local dof: v_0 = 1 and v_b = indicator of edge j
    let local = s.local_dim();
    let mut b = DMatrix::<f64>::zeros(4, local);
    for tri in &tris {
        for (_, w) in triangle_points(*tri, 2).unwrap() {
            for i in 0..4 {
                b[(i, 0)] -= w * div[i];
            }
        }
    }
    for (j, &e) in mesh.cell_edges(0).iter().enumerate() {
        let [a, bb] = mesh.edge_points(e);
        let n = mesh.outward_normal(0, e);
        // bottom and right edges bound the lower triangle
        let on_lower = a.x + bb.x >= a.y + bb.y;
        for (p, w) in segment_points(a, bb, 4).unwrap() {
            let q = basis(p, on_lower);
            for i in 0..4 {
                b[(i, s.edge_offset(j))] += w * q[i].dot(&n);
            }
        }
    }
    let g = m.clone().cholesky().unwrap().solve(&b);
    let k_hand = b.transpose() * &g;
    assert!((&k_hand - &s.weak_gradient.stiffness).amax() < 1e-12, "{k_hand}\n{}", s.weak_gradient.stiffness);

    // fields agree pointwise for every local dof
    for dof in 0..local {
        let e = DVector::from_fn(local, |i, _| f64::from(i == dof));
        let lib = s.apply_weak_gradient(&e);
        for (ti, tri) in tris.iter().enumerate() {
            for (p, _) in triangle_points(*tri, 3).unwrap() {
                let q = basis(p, ti == 0);
                let hand: Vector2<f64> = (0..4).map(|i| g[(i, dof)] * q[i]).sum();
                assert!((s.eval_lambda(&lib, ti, p) - hand).norm() < 1e-12, "dof {dof}");
            }
        }
    }
    // bottom-edge indicator: its mean weak gradient is (0, -1) / |T|
    let bottom = (0..4)
        .find(|&j| mesh.edge_points(mesh.cell_edges(0)[j]).iter().all(|p| p.y == 0.0))
        .unwrap();
    let col = g.column(s.edge_offset(bottom)).into_owned();
    let mut mean = Vector2::zeros();
    for (ti, tri) in tris.iter().enumerate() {
        for (p, w) in triangle_points(*tri, 2).unwrap() {
            let q = basis(p, ti == 0);
            mean += w * (0..4).map(|i| col[i] * q[i]).sum::<Vector2<f64>>();
        }
    }
    assert!((mean - Vector2::new(0.0, -1.0)).norm() < 1e-13);
}
