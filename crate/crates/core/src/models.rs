//! Mesh generators and model families: triangulated S¹, S², S³ = ∂Δ⁴ and
//! S²×S¹, the winding family on the circle, and the monopole family
//! realizing gerbe charge k through a Pauli-vector field around a marked
//! point.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::family::{Band, EnhancedGraph, Frame, MatrixFamilySample, SpectralWindow,
                    DEFAULT_DEGENERACY_TOL};
use crate::linalg::{fix_phase, CMatrix};
use crate::mesh::{sort_sign, ParamMesh, SimplicialMap};

// ---------------------------------------------------------------------------
// meshes
// ---------------------------------------------------------------------------

/// Triangulated circle with angular coordinate θ ∈ [0, 2π).
pub fn circle_mesh(n: usize) -> ParamMesh {
    assert!(n >= 3);
    let positions = (0..n).map(|v| vec![2.0 * PI * v as f64 / n as f64]).collect();
    let edges = (0..n).map(|v| [v, (v + 1) % n]).collect();
    let fundamental_loop = (0..n).collect();
    ParamMesh::new(positions, edges, Vec::new(), Vec::new(), None, vec![fundamental_loop])
        .expect("circle mesh is valid")
}

pub fn circle_angle(mesh: &ParamMesh, v: usize) -> f64 {
    mesh.positions()[v][0]
}

/// Simplicial degree-d covering map from a circle with d·n vertices onto one
/// with n vertices.
pub fn circle_cover_map(
    fine: Arc<ParamMesh>,
    coarse: Arc<ParamMesh>,
    degree: usize,
) -> Result<SimplicialMap> {
    let n = coarse.vertex_count();
    if fine.vertex_count() != degree * n {
        return Err(Error::Invalid(
            "fine circle must have degree × coarse vertices".into(),
        ));
    }
    let map = (0..fine.vertex_count()).map(|v| v % n).collect();
    SimplicialMap::new(fine, coarse, map)
}

fn normalize(p: &mut [f64]) {
    let n = p.iter().map(|x| x * x).sum::<f64>().sqrt();
    for x in p.iter_mut() {
        *x /= n;
    }
}

fn edges_from_faces(faces: &[[usize; 3]]) -> Vec<[usize; 2]> {
    let mut set: HashSet<[usize; 2]> = HashSet::new();
    for f in faces {
        for (a, b) in [(f[0], f[1]), (f[0], f[2]), (f[1], f[2])] {
            set.insert(if a < b { [a, b] } else { [b, a] });
        }
    }
    let mut edges: Vec<[usize; 2]> = set.into_iter().collect();
    edges.sort_unstable();
    edges
}

/// Octahedron-based triangulated 2-sphere, triangles oriented outward.
pub fn s2_sphere(refinements: usize) -> ParamMesh {
    let mut positions: Vec<Vec<f64>> = vec![
        vec![1.0, 0.0, 0.0],
        vec![-1.0, 0.0, 0.0],
        vec![0.0, 1.0, 0.0],
        vec![0.0, -1.0, 0.0],
        vec![0.0, 0.0, 1.0],
        vec![0.0, 0.0, -1.0],
    ];
    let mut triangles: Vec<[usize; 3]> = Vec::new();
    for sx in 0..2 {
        for sy in 0..2 {
            for sz in 0..2 {
                let (a, b, c) = (sx, 2 + sy, 4 + sz);
                if (sx + sy + sz) % 2 == 0 {
                    triangles.push([a, b, c]);
                } else {
                    triangles.push([a, c, b]);
                }
            }
        }
    }
    for _ in 0..refinements {
        let mut midpoints: HashMap<[usize; 2], usize> = HashMap::new();
        let mut next = Vec::with_capacity(triangles.len() * 4);
        for t in &triangles {
            let mid = |positions: &mut Vec<Vec<f64>>,
                       midpoints: &mut HashMap<[usize; 2], usize>,
                       a: usize,
                       b: usize| {
                let key = if a < b { [a, b] } else { [b, a] };
                *midpoints.entry(key).or_insert_with(|| {
                    let mut p: Vec<f64> = positions[a]
                        .iter()
                        .zip(&positions[b])
                        .map(|(x, y)| 0.5 * (x + y))
                        .collect();
                    normalize(&mut p);
                    positions.push(p);
                    positions.len() - 1
                })
            };
            let [a, b, c] = *t;
            let ab = mid(&mut positions, &mut midpoints, a, b);
            let ac = mid(&mut positions, &mut midpoints, a, c);
            let bc = mid(&mut positions, &mut midpoints, b, c);
            next.push([a, ab, ac]);
            next.push([b, bc, ab]);
            next.push([c, ac, bc]);
            next.push([ab, bc, ac]);
        }
        triangles = next;
    }
    let edges = edges_from_faces(&triangles);
    ParamMesh::new(positions, edges, triangles, Vec::new(), None, Vec::new())
        .expect("sphere mesh is valid")
}

/// Refined boundary of the 4-simplex: a triangulated S³ with an oriented
/// fundamental cycle, barycentric coordinates relative to the five coarse
/// vertices, and a marked point at coarse vertex 0.
pub struct S3Geometry {
    pub mesh: Arc<ParamMesh>,
    pub barycentric: Vec<[f64; 5]>,
    pub marked: usize,
}

pub fn s3_sphere(refinements: usize) -> S3Geometry {
    // five unit vectors in R^4 with pairwise inner product -1/4
    let mut raw: Vec<[f64; 5]> = Vec::new();
    for i in 0..5 {
        let mut p = [-0.2f64; 5];
        p[i] += 1.0;
        let norm = p.iter().map(|x| x * x).sum::<f64>().sqrt();
        for x in p.iter_mut() {
            *x /= norm;
        }
        raw.push(p);
    }
    // orthonormal basis of the sum-zero hyperplane
    let mut basis: Vec<[f64; 5]> = Vec::new();
    for i in 0..4 {
        let mut v = [0.0f64; 5];
        v[i] = 1.0;
        v[4] = -1.0;
        for b in &basis {
            let d: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
            for (x, y) in v.iter_mut().zip(b) {
                *x -= d * y;
            }
        }
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        for x in v.iter_mut() {
            *x /= n;
        }
        basis.push(v);
    }
    let mut positions: Vec<Vec<f64>> = raw
        .iter()
        .map(|p| basis.iter().map(|b| p.iter().zip(b).map(|(x, y)| x * y).sum()).collect())
        .collect();
    for p in &mut positions {
        normalize(p);
    }
    let mut barycentric: Vec<[f64; 5]> = (0..5)
        .map(|i| {
            let mut b = [0.0; 5];
            b[i] = 1.0;
            b
        })
        .collect();

    // boundary of [0,1,2,3,4]: face omitting m carries sign (-1)^m
    let mut tets: Vec<[usize; 4]> = Vec::new();
    let mut coeffs: Vec<i32> = Vec::new();
    for m in 0..5 {
        let mut t = [0usize; 4];
        let mut k = 0;
        for v in 0..5 {
            if v != m {
                t[k] = v;
                k += 1;
            }
        }
        tets.push(t);
        coeffs.push(if m % 2 == 0 { 1 } else { -1 });
    }

    for _ in 0..refinements {
        let mut midpoints: HashMap<[usize; 2], usize> = HashMap::new();
        let mut next_tets = Vec::with_capacity(tets.len() * 8);
        let mut next_coeffs = Vec::with_capacity(tets.len() * 8);
        for (t, &s) in tets.iter().zip(&coeffs) {
            let [a, b, c, d] = *t;
            let mut mid = |x: usize, y: usize| -> usize {
                let key = if x < y { [x, y] } else { [y, x] };
                *midpoints.entry(key).or_insert_with(|| {
                    let mut p: Vec<f64> = positions[x]
                        .iter()
                        .zip(&positions[y])
                        .map(|(u, v)| 0.5 * (u + v))
                        .collect();
                    normalize(&mut p);
                    positions.push(p);
                    let mut bc = [0.0f64; 5];
                    for i in 0..5 {
                        bc[i] = 0.5 * (barycentric[x][i] + barycentric[y][i]);
                    }
                    barycentric.push(bc);
                    positions.len() - 1
                })
            };
            let (ab, ac, ad) = (mid(a, b), mid(a, c), mid(a, d));
            let (bc, bd, cd) = (mid(b, c), mid(b, d), mid(c, d));
            // corner tets plus octahedron around the (ac, bd) diagonal,
            // vertex orders chosen orientation-positive in reference coords
            let children = [
                [a, ab, ac, ad],
                [ab, b, bc, bd],
                [ac, bc, c, cd],
                [ad, bd, cd, d],
                [ac, bd, ad, ab],
                [ac, bd, cd, ad],
                [ac, bd, bc, cd],
                [ac, bd, ab, bc],
            ];
            for child in children {
                next_tets.push(child);
                next_coeffs.push(s);
            }
        }
        tets = next_tets;
        coeffs = next_coeffs;
    }

    let mut tri_set: HashSet<[usize; 3]> = HashSet::new();
    for t in &tets {
        for skip in 0..4 {
            let mut f = [0usize; 3];
            let mut k = 0;
            for (i, &v) in t.iter().enumerate() {
                if i != skip {
                    f[k] = v;
                    k += 1;
                }
            }
            f.sort_unstable();
            tri_set.insert(f);
        }
    }
    let mut triangles: Vec<[usize; 3]> = tri_set.into_iter().collect();
    triangles.sort_unstable();
    let edges = edges_from_faces(&triangles);

    let fundamental: Vec<(usize, i32)> = coeffs.iter().cloned().enumerate().collect();
    let mesh = ParamMesh::new(positions, edges, triangles, tets, Some(fundamental), Vec::new())
        .expect("refined boundary of the 4-simplex is valid");
    S3Geometry {
        mesh: Arc::new(mesh),
        barycentric,
        marked: 0,
    }
}

/// Product triangulation S² × S¹ with an oriented fundamental cycle, a
/// marked fiber loop, and the simplicial fiber projection onto the circle.
pub struct ProductGeometry {
    pub mesh: Arc<ParamMesh>,
    pub circle: Arc<ParamMesh>,
    pub sphere: Arc<ParamMesh>,
    pub s2_of: Vec<usize>,
    pub s1_of: Vec<usize>,
}

pub fn s2_x_s1(s2_refinements: usize, circle_n: usize) -> ProductGeometry {
    let sphere = Arc::new(s2_sphere(s2_refinements));
    let circle = Arc::new(circle_mesh(circle_n));
    let ns2 = sphere.vertex_count();
    let n = circle_n;
    let idx = |a: usize, b: usize| a * n + b;

    let mut positions = Vec::with_capacity(ns2 * n);
    let mut s2_of = Vec::with_capacity(ns2 * n);
    let mut s1_of = Vec::with_capacity(ns2 * n);
    for a in 0..ns2 {
        for b in 0..n {
            let psi = circle_angle(&circle, b);
            let mut p = sphere.positions()[a].clone();
            p.push(psi.cos());
            p.push(psi.sin());
            positions.push(p);
            s2_of.push(a);
            s1_of.push(b);
        }
    }

    let mut tets: Vec<[usize; 4]> = Vec::new();
    let mut coeffs: Vec<i32> = Vec::new();
    for tri in sphere.triangles() {
        let mut sorted = *tri;
        sorted.sort_unstable();
        let or_sign = sort_sign(*tri);
        for b in 0..n {
            let (b0, b1) = (b, (b + 1) % n);
            let [a0, a1, a2] = sorted;
            let prism = [
                [idx(a0, b0), idx(a0, b1), idx(a1, b1), idx(a2, b1)],
                [idx(a0, b0), idx(a1, b0), idx(a1, b1), idx(a2, b1)],
                [idx(a0, b0), idx(a1, b0), idx(a2, b0), idx(a2, b1)],
            ];
            for (m, t) in prism.into_iter().enumerate() {
                tets.push(t);
                let shuffle = if m % 2 == 0 { 1 } else { -1 };
                coeffs.push(or_sign * shuffle);
            }
        }
    }

    let mut tri_set: HashSet<[usize; 3]> = HashSet::new();
    for t in &tets {
        for skip in 0..4 {
            let mut f = [0usize; 3];
            let mut k = 0;
            for (i, &v) in t.iter().enumerate() {
                if i != skip {
                    f[k] = v;
                    k += 1;
                }
            }
            f.sort_unstable();
            tri_set.insert(f);
        }
    }
    let mut triangles: Vec<[usize; 3]> = tri_set.into_iter().collect();
    triangles.sort_unstable();
    let edges = edges_from_faces(&triangles);
    let fiber_loop: Vec<usize> = (0..n).map(|b| idx(0, b)).collect();
    let fundamental: Vec<(usize, i32)> = coeffs.iter().cloned().enumerate().collect();
    let mesh = ParamMesh::new(
        positions,
        edges,
        triangles,
        tets,
        Some(fundamental),
        vec![fiber_loop],
    )
    .expect("product mesh is valid");
    ProductGeometry {
        mesh: Arc::new(mesh),
        circle,
        sphere,
        s2_of,
        s1_of,
    }
}

impl ProductGeometry {
    pub fn fiber_projection(&self) -> SimplicialMap {
        let map = self.s1_of.clone();
        SimplicialMap::new(self.mesh.clone(), self.circle.clone(), map)
            .expect("fiber projection is simplicial")
    }
}

// ---------------------------------------------------------------------------
// ball charts
// ---------------------------------------------------------------------------

/// Geodesic-ball coordinates near a marked point: radius and a unit chart
/// direction per vertex.
pub struct BallChart {
    pub center: usize,
    pub radius: Vec<f64>,
    pub direction: Vec<[f64; 3]>,
}

pub fn s3_ball_chart(geom: &S3Geometry) -> BallChart {
    let mesh = &geom.mesh;
    let p = &mesh.positions()[geom.marked];
    let dim = p.len();
    // orthonormal tangent frame at p from coordinate axes
    let mut frame: Vec<Vec<f64>> = Vec::new();
    for i in 0..dim {
        let mut v = vec![0.0; dim];
        v[i] = 1.0;
        let dp: f64 = v.iter().zip(p).map(|(x, y)| x * y).sum();
        for (x, y) in v.iter_mut().zip(p) {
            *x -= dp * y;
        }
        for b in &frame {
            let d: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
            for (x, y) in v.iter_mut().zip(b) {
                *x -= d * y;
            }
        }
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-8 {
            for x in v.iter_mut() {
                *x /= n;
            }
            frame.push(v);
            if frame.len() == 3 {
                break;
            }
        }
    }
    assert_eq!(frame.len(), 3);

    let mut radius = Vec::with_capacity(mesh.vertex_count());
    let mut direction = Vec::with_capacity(mesh.vertex_count());
    for x in mesh.positions() {
        let cosr: f64 = x.iter().zip(p).map(|(a, b)| a * b).sum::<f64>().clamp(-1.0, 1.0);
        let r = cosr.acos();
        radius.push(r);
        let sinr = (1.0 - cosr * cosr).sqrt();
        if sinr < 1e-12 {
            direction.push([0.0, 0.0, 1.0]);
            continue;
        }
        let mut d = [0.0f64; 3];
        for (k, b) in frame.iter().enumerate() {
            d[k] = x.iter().zip(b).map(|(a, c)| a * c).sum::<f64>() / sinr;
        }
        let n = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
        direction.push([d[0] / n, d[1] / n, d[2] / n]);
    }
    BallChart {
        center: geom.marked,
        radius,
        direction,
    }
}

/// Product chart around (sphere north pole, circle angle 0):
/// y = (ϑ cos ϕ, ϑ sin ϕ, ψ) with ϑ, ϕ polar coordinates on S² and ψ the
/// signed circle angle.
pub fn product_ball_chart(geom: &ProductGeometry) -> BallChart {
    // vertex 4 of the octahedron is the +z pole and survives refinement
    let north = 4usize;
    let n = geom.circle.vertex_count();
    let center = north * n;
    let mut radius = Vec::with_capacity(geom.mesh.vertex_count());
    let mut direction = Vec::with_capacity(geom.mesh.vertex_count());
    for v in 0..geom.mesh.vertex_count() {
        let sp = &geom.sphere.positions()[geom.s2_of[v]];
        let theta = sp[2].clamp(-1.0, 1.0).acos();
        let phi = sp[1].atan2(sp[0]);
        let mut psi = circle_angle(&geom.circle, geom.s1_of[v]);
        if psi > PI {
            psi -= 2.0 * PI;
        }
        let y = [theta * phi.cos(), theta * phi.sin(), psi];
        let r = (y[0] * y[0] + y[1] * y[1] + y[2] * y[2]).sqrt();
        radius.push(r);
        if r < 1e-12 {
            direction.push([0.0, 0.0, 1.0]);
        } else {
            direction.push([y[0] / r, y[1] / r, y[2] / r]);
        }
    }
    BallChart {
        center,
        radius,
        direction,
    }
}

// ---------------------------------------------------------------------------
// model families
// ---------------------------------------------------------------------------

/// Winding family on the circle: bands gₙ(θ) = n + w·θ/2π, with the band
/// relabeling across the seam θ = 2π recorded as an edge matching, so the
/// graph is a well-defined subset of S¹ × ℝ.
pub fn winding_family(mesh: Arc<ParamMesh>, w: i64, window: SpectralWindow) -> Result<EnhancedGraph> {
    let n = mesh.vertex_count();
    let lo = window.lo.floor() as i64 - w.abs() - 1;
    let hi = window.hi.ceil() as i64 + w.abs() + 1;
    let rungs: Vec<i64> = (lo..=hi)
        .filter(|&r| {
            let a = r.min(r + w) as f64;
            let b = r.max(r + w) as f64;
            window.lo < a && b < window.hi
        })
        .collect();
    if rungs.len() < 3 {
        return Err(Error::WindowTooNarrow {
            found: rungs.len(),
            need: 3,
        });
    }
    let bands: Vec<Band> = rungs
        .iter()
        .map(|&r| Band {
            values: (0..n)
                .map(|v| r as f64 + w as f64 * circle_angle(&mesh, v) / (2.0 * PI))
                .collect(),
            frames: BTreeMap::new(),
        })
        .collect();
    // seam: band n at θ→2π continues as band n+w at θ=0
    let mut edge_matchings = BTreeMap::new();
    if w != 0 {
        let seam = mesh.edge_id(n - 1, 0).expect("circle seam edge");
        let m: Vec<Option<usize>> = rungs
            .iter()
            .map(|&r| rungs.iter().position(|&s| s == r + w))
            .collect();
        edge_matchings.insert(seam, m);
    }
    EnhancedGraph::new(mesh, window, bands, edge_matchings, 1, DEFAULT_DEGENERACY_TOL)
}

/// Constant family with the given sorted values and one constant frame per
/// band along the coordinate axes of the auxiliary space.
pub fn constant_family(
    mesh: Arc<ParamMesh>,
    values: &[f64],
    window: SpectralWindow,
) -> Result<EnhancedGraph> {
    let n = mesh.vertex_count();
    let aux = values.len().max(1);
    let bands = values
        .iter()
        .enumerate()
        .map(|(k, &val)| {
            let mut frame = vec![Complex64::default(); aux];
            frame[k] = Complex64::new(1.0, 0.0);
            Band {
                values: vec![val; n],
                frames: (0..n).map(|v| (v, frame.clone())).collect(),
            }
        })
        .collect();
    EnhancedGraph::new(mesh, window, bands, BTreeMap::new(), aux, DEFAULT_DEGENERACY_TOL)
}

/// Constant integer ladder offset by `offset`.
pub fn ladder_family(
    mesh: Arc<ParamMesh>,
    offset: f64,
    window: SpectralWindow,
) -> Result<EnhancedGraph> {
    let lo = window.lo.floor() as i64 - 1;
    let hi = window.hi.ceil() as i64 + 1;
    let values: Vec<f64> = (lo..=hi)
        .map(|r| r as f64 + offset)
        .filter(|&v| window.contains(v))
        .collect();
    constant_family(mesh, &values, window)
}

/// Degree-k winding applied to a unit direction: the suspension of φ ↦ kφ.
fn wind_direction(dir: [f64; 3], k: i64) -> [f64; 3] {
    let sin_theta = (dir[0] * dir[0] + dir[1] * dir[1]).sqrt();
    if sin_theta < 1e-15 {
        return [0.0, 0.0, dir[2].signum()];
    }
    let phi = dir[1].atan2(dir[0]);
    let (s, c) = (k as f64 * phi).sin_cos();
    [sin_theta * c, sin_theta * s, dir[2]]
}

/// Eigenvectors (u₋, u₊) of ŵ·σ for a unit vector ŵ, phase-fixed.
fn pauli_eigenvectors(w: [f64; 3]) -> (Frame, Frame) {
    let (wx, wy, wz) = (w[0], w[1], w[2]);
    let (mut plus, mut minus) = if wz >= 0.0 {
        (
            vec![Complex64::new(1.0 + wz, 0.0), Complex64::new(wx, wy)],
            vec![Complex64::new(-wx, wy), Complex64::new(1.0 + wz, 0.0)],
        )
    } else {
        (
            vec![Complex64::new(wx, -wy), Complex64::new(1.0 - wz, 0.0)],
            vec![Complex64::new(1.0 - wz, 0.0), Complex64::new(-wx, -wy)],
        )
    };
    for v in [&mut plus, &mut minus] {
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in v.iter_mut() {
            *z /= norm;
        }
        fix_phase(v);
    }
    (minus, plus)
}

pub struct MonopoleParams {
    pub k: i64,
    pub ball_radius: f64,
    pub plateau: f64,
    pub window: SpectralWindow,
}

impl Default for MonopoleParams {
    fn default() -> Self {
        MonopoleParams {
            k: 1,
            ball_radius: 2.0,
            plateau: 1.0,
            window: SpectralWindow { lo: -2.5, hi: 2.5 },
        }
    }
}

/// Pauli-vector field of the monopole family: vanishes exactly at the chart
/// center, winds with degree k over small spheres around it, and is the
/// constant (0, 0, plateau) outside the ball.
fn monopole_vector(chart: &BallChart, params: &MonopoleParams, v: usize) -> [f64; 3] {
    let r = chart.radius[v];
    let m = r.min(params.plateau);
    if params.k == 0 || r >= params.ball_radius {
        return [0.0, 0.0, params.plateau];
    }
    let w = wind_direction(chart.direction[v], params.k);
    [m * w[0], m * w[1], m * w[2]]
}

/// Enhanced-graph monopole family: middle bands ±‖v(x)‖ with frames stored
/// throughout the ball closure, remaining bands constant ladder levels at
/// ±2, ±3, … inside the window.
pub fn monopole_family(
    mesh: Arc<ParamMesh>,
    chart: &BallChart,
    params: &MonopoleParams,
) -> Result<EnhancedGraph> {
    validate_monopole_params(chart, params)?;
    let n = mesh.vertex_count();
    let ladder: Vec<i64> = ladder_rungs(&params.window);
    let aux = 2 + ladder.len();

    let mut band_specs: Vec<(f64, usize)> = Vec::new(); // (constant value, aux index) for ladder
    for (j, &r) in ladder.iter().enumerate() {
        band_specs.push((r as f64, 2 + j));
    }

    let mut lower = Band {
        values: vec![0.0; n],
        frames: BTreeMap::new(),
    };
    let mut upper = Band {
        values: vec![0.0; n],
        frames: BTreeMap::new(),
    };
    for v in 0..n {
        let vec3 = monopole_vector(chart, params, v);
        let m = (vec3[0] * vec3[0] + vec3[1] * vec3[1] + vec3[2] * vec3[2]).sqrt();
        lower.values[v] = -m;
        upper.values[v] = m;
        let store = params.k == 0 || chart.radius[v] <= params.ball_radius + 1e-12;
        if store {
            let dir = if m > 0.0 {
                [vec3[0] / m, vec3[1] / m, vec3[2] / m]
            } else {
                [0.0, 0.0, 1.0]
            };
            let (minus, plus) = pauli_eigenvectors(dir);
            lower.frames.insert(v, embed2(&minus, aux));
            upper.frames.insert(v, embed2(&plus, aux));
        }
    }

    let mut bands: Vec<(f64, Band)> = vec![
        (lower.values.iter().cloned().fold(f64::INFINITY, f64::min), lower),
        (upper.values.iter().cloned().fold(f64::INFINITY, f64::min), upper),
    ];
    for (val, axis) in band_specs {
        let mut frame = vec![Complex64::default(); aux];
        frame[axis] = Complex64::new(1.0, 0.0);
        bands.push((
            val,
            Band {
                values: vec![val; n],
                frames: (0..n).map(|v| (v, frame.clone())).collect(),
            },
        ));
    }
    bands.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let bands: Vec<Band> = bands.into_iter().map(|(_, b)| b).collect();

    EnhancedGraph::new(mesh, params.window, bands, BTreeMap::new(), aux, DEFAULT_DEGENERACY_TOL)
}

/// The same family realized as Hermitian matrices v(x)·σ ⊕ diag(ladder),
/// for cross-checking ingestion against the model.
pub fn monopole_sample(
    mesh: Arc<ParamMesh>,
    chart: &BallChart,
    params: &MonopoleParams,
) -> Result<MatrixFamilySample> {
    validate_monopole_params(chart, params)?;
    let ladder = ladder_rungs(&params.window);
    let dim = 2 + ladder.len();
    let matrices = (0..mesh.vertex_count())
        .map(|v| {
            let w = monopole_vector(chart, params, v);
            let mut m = CMatrix::zeros(dim, dim);
            m[(0, 0)] = Complex64::new(w[2], 0.0);
            m[(0, 1)] = Complex64::new(w[0], -w[1]);
            m[(1, 0)] = Complex64::new(w[0], w[1]);
            m[(1, 1)] = Complex64::new(-w[2], 0.0);
            for (j, &r) in ladder.iter().enumerate() {
                m[(2 + j, 2 + j)] = Complex64::new(r as f64, 0.0);
            }
            m
        })
        .collect();
    Ok(MatrixFamilySample {
        mesh,
        matrices,
        window: params.window,
    })
}

fn validate_monopole_params(chart: &BallChart, params: &MonopoleParams) -> Result<()> {
    if !(params.plateau > 0.0) {
        return Err(Error::Invalid("plateau must be positive".into()));
    }
    if params.plateau > params.ball_radius {
        return Err(Error::Invalid(
            "plateau must not exceed the ball radius".into(),
        ));
    }
    if params.plateau >= 2.0 {
        return Err(Error::Invalid(
            "plateau must stay below the first ladder rung".into(),
        ));
    }
    if !params.window.contains(params.plateau) || !params.window.contains(-params.plateau) {
        return Err(Error::Invalid("window must contain ±plateau".into()));
    }
    if chart.radius[chart.center] != 0.0 {
        return Err(Error::Invalid("chart center must have radius 0".into()));
    }
    Ok(())
}

fn ladder_rungs(window: &SpectralWindow) -> Vec<i64> {
    let lo = window.lo.floor() as i64 - 1;
    let hi = window.hi.ceil() as i64 + 1;
    (lo..=hi)
        .filter(|&r| r.abs() >= 2 && window.contains(r as f64))
        .collect()
}

fn embed2(f: &[Complex64], aux: usize) -> Frame {
    let mut out = vec![Complex64::default(); aux];
    out[..2].copy_from_slice(f);
    out
}

/// v(x)·σ sample on a 2-sphere mesh with v the degree-k direction field,
/// bands ±1 everywhere.
pub fn pauli_sphere_sample(
    mesh: Arc<ParamMesh>,
    k: i64,
    window: SpectralWindow,
) -> MatrixFamilySample {
    let matrices = (0..mesh.vertex_count())
        .map(|v| {
            let p = &mesh.positions()[v];
            let w = wind_direction([p[0], p[1], p[2]], k);
            pauli_matrix(w)
        })
        .collect();
    MatrixFamilySample {
        mesh,
        matrices,
        window,
    }
}

/// v(x)·σ with v(x) = x − north pole: vanishes exactly at the pole.
pub fn pauli_shifted_sample(mesh: Arc<ParamMesh>, window: SpectralWindow) -> MatrixFamilySample {
    let matrices = (0..mesh.vertex_count())
        .map(|v| {
            let p = &mesh.positions()[v];
            pauli_matrix([p[0], p[1], p[2] - 1.0])
        })
        .collect();
    MatrixFamilySample {
        mesh,
        matrices,
        window,
    }
}

pub fn pauli_matrix(w: [f64; 3]) -> CMatrix {
    let mut m = CMatrix::zeros(2, 2);
    m[(0, 0)] = Complex64::new(w[2], 0.0);
    m[(0, 1)] = Complex64::new(w[0], -w[1]);
    m[(1, 0)] = Complex64::new(w[0], w[1]);
    m[(1, 1)] = Complex64::new(-w[2], 0.0);
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn winding_band_count_and_seam() {
        let mesh = Arc::new(circle_mesh(16));
        let w = winding_family(mesh.clone(), 1, SpectralWindow { lo: -3.2, hi: 3.2 }).unwrap();
        assert!(w.band_count() >= 3);
        let seam = mesh.edge_id(15, 0).unwrap();
        assert!(w.edge_matchings().contains_key(&seam));
        // too narrow a window errors
        assert!(matches!(
            winding_family(mesh, 3, SpectralWindow { lo: -1.0, hi: 1.0 }),
            Err(Error::WindowTooNarrow { .. })
        ));
    }

    #[test]
    fn winding_zero_is_flat_ladder() {
        let mesh = Arc::new(circle_mesh(8));
        let w = winding_family(mesh, 0, SpectralWindow { lo: -2.5, hi: 2.5 }).unwrap();
        for band in w.bands() {
            let first = band.values[0];
            assert!(band.values.iter().all(|&v| v == first));
            assert!((first - first.round()).abs() < 1e-14);
        }
        assert!(w.edge_matchings().is_empty());
    }

    #[test]
    fn s3_refinement_counts() {
        let geom = s3_sphere(3);
        assert_eq!(geom.mesh.tets().len(), 5 * 8 * 8 * 8);
        assert!(geom.mesh.tets().len() >= 600);
        // barycentric coordinates stay affine
        for b in &geom.barycentric {
            let s: f64 = b.iter().sum();
            assert!((s - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn monopole_multiplicity_two_exactly_at_marked_point() {
        let geom = s3_sphere(2);
        let chart = s3_ball_chart(&geom);
        let fam = monopole_family(geom.mesh.clone(), &chart, &MonopoleParams::default()).unwrap();
        let p = geom.marked;
        // locate the middle pair
        let lower = fam
            .bands()
            .iter()
            .position(|b| b.values[p].abs() < 1e-12)
            .unwrap();
        assert_eq!(fam.multiplicity(p, lower), 2);
        for v in 0..geom.mesh.vertex_count() {
            if v != p {
                assert_eq!(fam.multiplicity(v, lower), 1, "vertex {v}");
            }
        }
    }

    #[test]
    fn product_mesh_fundamental_cycle_closes() {
        let geom = s2_x_s1(1, 6);
        let fc = geom.mesh.fundamental_cycle().unwrap();
        let boundary = geom.mesh.tet_chain_boundary(fc);
        assert!(boundary.is_empty());
        assert_eq!(geom.mesh.loops().len(), 1);
        geom.fiber_projection();
    }
}
