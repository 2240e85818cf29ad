//! Spectral-gap covers {(Uᵢ, λᵢ)}, their nerve, and the simplicial
//! machinery carrying mesh cycles onto the nerve.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::cochain::Chain;
use crate::error::{Error, Result};
use crate::family::EnhancedGraph;
use crate::mesh::{sort_sign, ParamMesh};
use crate::models::{ProductGeometry, S3Geometry};

pub const DEFAULT_GAP_MARGIN: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct CoverSet {
    pub vertices: BTreeSet<usize>,
    pub level: f64,
}

#[derive(Debug, Clone)]
pub struct NerveSimplex {
    /// Ascending cover indices.
    pub verts: Vec<usize>,
    /// Mesh vertices in the common intersection, ascending.
    pub intersection: Vec<usize>,
    /// Lowest-index mesh vertex of the intersection: the recorded sample point.
    pub witness: usize,
    /// Connected components of the intersection subcomplex.
    pub components: Vec<Vec<usize>>,
}

#[derive(Debug, Clone)]
pub struct Nerve {
    dims: [Vec<NerveSimplex>; 4],
    index: [HashMap<Vec<usize>, usize>; 4],
}

impl Nerve {
    pub fn simplices(&self, degree: usize) -> &[NerveSimplex] {
        &self.dims[degree]
    }

    pub fn simplex_id(&self, sorted_verts: &[usize]) -> Option<usize> {
        let d = sorted_verts.len() - 1;
        if d > 3 {
            return None;
        }
        self.index[d].get(sorted_verts).copied()
    }

    pub fn f_vector(&self) -> [usize; 4] {
        [
            self.dims[0].len(),
            self.dims[1].len(),
            self.dims[2].len(),
            self.dims[3].len(),
        ]
    }
}

#[derive(Debug, Clone)]
pub struct SpectralCover {
    pub sets: Vec<CoverSet>,
    /// Mesh vertex → index of a cover set containing it.
    pub assignment: Vec<usize>,
    pub nerve: Nerve,
    pub gap_margin: f64,
}

/// Nerve of the cover: a p-simplex per (p+1)-fold intersection containing at
/// least one full mesh simplex, up to dimension 3, oriented by sorted index
/// order. Witness components are recorded for downstream sampling.
pub fn build_nerve(mesh: &ParamMesh, sets: &[CoverSet]) -> Nerve {
    let mut membership: Vec<Vec<usize>> = vec![Vec::new(); mesh.vertex_count()];
    for (i, set) in sets.iter().enumerate() {
        for &v in &set.vertices {
            membership[v].push(i);
        }
    }
    let mut intersections: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
    for (v, owners) in membership.iter().enumerate() {
        let m = owners.len();
        for size in 1..=m.min(4) {
            let mut combo = vec![0usize; size];
            enumerate_combinations(owners, size, &mut combo, 0, 0, &mut |simplex| {
                intersections.entry(simplex.to_vec()).or_default().push(v);
            });
        }
    }
    let mut dims: [Vec<NerveSimplex>; 4] = Default::default();
    let mut index: [HashMap<Vec<usize>, usize>; 4] = Default::default();
    for (verts, intersection) in intersections {
        let d = verts.len() - 1;
        let vset: BTreeSet<usize> = intersection.iter().cloned().collect();
        let components = mesh.components_within(&vset);
        let witness = intersection[0];
        index[d].insert(verts.clone(), dims[d].len());
        dims[d].push(NerveSimplex {
            verts,
            intersection,
            witness,
            components,
        });
    }
    Nerve { dims, index }
}

fn enumerate_combinations(
    owners: &[usize],
    size: usize,
    combo: &mut Vec<usize>,
    depth: usize,
    start: usize,
    emit: &mut impl FnMut(&[usize]),
) {
    if depth == size {
        emit(combo);
        return;
    }
    for i in start..owners.len() {
        combo[depth] = owners[i];
        enumerate_combinations(owners, size, combo, depth + 1, i + 1, emit);
    }
}

/// Cover validation report: hard violations and soft warnings.
#[derive(Debug, Clone, Default)]
pub struct CoverReport {
    pub violations: Vec<String>,
    pub warnings: Vec<String>,
}

impl CoverReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn validate_cover(family: &EnhancedGraph, cover: &SpectralCover) -> CoverReport {
    let mut report = CoverReport::default();
    let mesh = family.mesh();
    let n = mesh.vertex_count();
    let mut covered = vec![false; n];
    for set in &cover.sets {
        for &v in &set.vertices {
            if v >= n {
                report.violations.push(format!("vertex {v} out of range"));
                return report;
            }
            covered[v] = true;
        }
    }
    if let Some(v) = covered.iter().position(|c| !c) {
        report
            .violations
            .push(format!("vertex {v} not covered by any set"));
    }
    if cover.assignment.len() != n {
        report.violations.push("assignment length mismatch".into());
    } else {
        for (v, &i) in cover.assignment.iter().enumerate() {
            if i >= cover.sets.len() || !cover.sets[i].vertices.contains(&v) {
                report
                    .violations
                    .push(format!("assignment of vertex {v} to set {i} is invalid"));
            }
        }
    }
    let zone = family.level_zone();
    for (i, set) in cover.sets.iter().enumerate() {
        if mesh.components_within(&set.vertices).len() != 1 {
            report
                .violations
                .push(format!("cover set {i} induces a disconnected subcomplex"));
        }
        if !(set.level > zone.0 && set.level < zone.1) {
            report.violations.push(format!(
                "level {} of set {i} lies within one median band-gap of the window edge",
                set.level
            ));
        }
        for &v in &set.vertices {
            for k in 0..family.band_count() {
                let val = family.value(k, v);
                if (val - set.level).abs() <= cover.gap_margin {
                    report.violations.push(format!(
                        "gap violation: band {k} value {val} within {} of level {} at vertex {v} (set {i})",
                        cover.gap_margin, set.level
                    ));
                }
            }
        }
        match euler_characteristic(mesh, &set.vertices) {
            1 => {}
            chi => report.warnings.push(format!(
                "set {i}: induced Euler characteristic {chi}; contractibility not certified"
            )),
        }
    }
    for d in 1..4 {
        for s in cover.nerve.simplices(d) {
            let vset: BTreeSet<usize> = s.intersection.iter().cloned().collect();
            match euler_characteristic(mesh, &vset) {
                1 => {}
                chi => report.warnings.push(format!(
                    "overlap {:?}: induced Euler characteristic {chi}; contractibility not certified",
                    s.verts
                )),
            }
        }
    }
    report
}

fn euler_characteristic(mesh: &ParamMesh, verts: &BTreeSet<usize>) -> i64 {
    let v = verts.len() as i64;
    let e = mesh
        .edges()
        .iter()
        .filter(|e| verts.contains(&e[0]) && verts.contains(&e[1]))
        .count() as i64;
    let f = mesh
        .triangles()
        .iter()
        .filter(|t| t.iter().all(|x| verts.contains(x)))
        .count() as i64;
    let t = mesh
        .tets()
        .iter()
        .filter(|t| t.iter().all(|x| verts.contains(x)))
        .count() as i64;
    v - e + f - t
}

/// Midpoints of maximal spectral gaps over a vertex set, clipped to the
/// family's admissible level zone. Returns (level, width) candidates sorted
/// widest first with deterministic tie-breaks.
fn gap_candidates(family: &EnhancedGraph, verts: &BTreeSet<usize>) -> Vec<(f64, f64)> {
    let (zlo, zhi) = family.level_zone();
    if zlo >= zhi {
        return Vec::new();
    }
    let mut values: Vec<f64> = Vec::new();
    for &v in verts {
        for k in 0..family.band_count() {
            values.push(family.value(k, v));
        }
    }
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    values.dedup();
    let mut cuts = vec![zlo];
    cuts.extend(values.iter().cloned().filter(|&v| v > zlo && v < zhi));
    cuts.push(zhi);
    let mut gaps: Vec<(f64, f64)> = cuts
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| ((w[0] + w[1]) / 2.0, w[1] - w[0]))
        .collect();
    gaps.sort_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .unwrap()
            .then(a.0.partial_cmp(&b.0).unwrap())
    });
    gaps
}

fn level_valid(family: &EnhancedGraph, vertex: usize, level: f64, margin: f64) -> bool {
    (0..family.band_count()).all(|k| (family.value(k, vertex) - level).abs() > margin)
}

/// A gap midpoint is structural over a vertex set when no matched band pair
/// crosses it along any mesh edge inside the set. Gaps between adjacent
/// sampled values of one sweeping band fail this and are rejected.
fn gap_is_structural(family: &EnhancedGraph, verts: &BTreeSet<usize>, mid: f64) -> bool {
    for (e, &[u, v]) in family.mesh().edges().iter().enumerate() {
        let _ = e;
        if !(verts.contains(&u) && verts.contains(&v)) {
            continue;
        }
        let Ok(pairs) = family.matched_pairs(u, v) else {
            return false;
        };
        for (i, j) in pairs {
            if (family.value(i, u) - mid) * (family.value(j, v) - mid) < 0.0 {
                return false;
            }
        }
    }
    true
}

/// Widest structural gap level over a vertex set; errors when no gap clears
/// the margin.
fn pick_widest_level(
    family: &EnhancedGraph,
    verts: &BTreeSet<usize>,
    margin: f64,
    set_index: usize,
) -> Result<f64> {
    gap_candidates(family, verts)
        .into_iter()
        .filter(|(_, w)| *w > 2.0 * margin)
        .find(|(mid, _)| gap_is_structural(family, verts, *mid))
        .map(|(mid, _)| mid)
        .ok_or(Error::NoValidLevel { set: set_index })
}

/// Level in the structural gap whose midpoint lies nearest the designated
/// crossing value; ties resolve to the positive side. Used by the star
/// covers, whose levels must slice through the monopole's middle gap.
fn pick_level_near(
    family: &EnhancedGraph,
    verts: &BTreeSet<usize>,
    margin: f64,
    target: f64,
    set_index: usize,
) -> Result<f64> {
    let mut gaps: Vec<(f64, f64)> = gap_candidates(family, verts)
        .into_iter()
        .filter(|(_, w)| *w > 2.0 * margin)
        .collect();
    gaps.sort_by(|a, b| {
        let da = (a.0 - target).abs();
        let db = (b.0 - target).abs();
        da.partial_cmp(&db)
            .unwrap()
            .then(b.0.partial_cmp(&a.0).unwrap())
    });
    gaps.into_iter()
        .find(|(mid, _)| gap_is_structural(family, verts, *mid))
        .map(|(mid, _)| mid)
        .ok_or(Error::NoValidLevel { set: set_index })
}

pub enum CoverStrategy<'a> {
    /// Seed sets from vertex stars, pick the widest-gap level, grow greedily
    /// while the gap persists; sets are capped at a fraction of the mesh.
    Auto { max_set_fraction: f64 },
    /// Validate user-supplied sets; levels left `None` are picked
    /// automatically as widest-gap midpoints.
    User(&'a [(BTreeSet<usize>, Option<f64>)]),
}

pub fn build_cover(
    family: &EnhancedGraph,
    strategy: CoverStrategy,
    gap_margin: f64,
) -> Result<SpectralCover> {
    let mesh = family.mesh();
    let n = mesh.vertex_count();
    let mut sets: Vec<CoverSet> = Vec::new();
    match strategy {
        CoverStrategy::Auto { max_set_fraction } => {
            let cap = ((n as f64 * max_set_fraction).ceil() as usize).max(2);
            let mut uncovered: BTreeSet<usize> = (0..n).collect();
            while let Some(&seed) = uncovered.iter().next() {
                let mut verts: BTreeSet<usize> = BTreeSet::from([seed]);
                verts.extend(mesh.neighbors(seed).iter().cloned());
                let level = pick_widest_level(family, &verts, gap_margin, sets.len())?;
                // grow while the gap persists and the cap allows
                loop {
                    let mut frontier: Vec<usize> = verts
                        .iter()
                        .flat_map(|&v| mesh.neighbors(v).iter().cloned())
                        .filter(|v| !verts.contains(v))
                        .collect();
                    frontier.sort_unstable();
                    frontier.dedup();
                    let mut grew = false;
                    for v in frontier {
                        if verts.len() >= cap.max(verts.len().min(cap)) && verts.len() >= cap {
                            break;
                        }
                        if level_valid(family, v, level, gap_margin) {
                            verts.insert(v);
                            grew = true;
                        }
                    }
                    if !grew || verts.len() >= cap {
                        break;
                    }
                }
                for &v in &verts {
                    uncovered.remove(&v);
                }
                sets.push(CoverSet { vertices: verts, level });
            }
        }
        CoverStrategy::User(user_sets) => {
            for (i, (verts, level)) in user_sets.iter().enumerate() {
                let level = match level {
                    Some(l) => {
                        for &v in verts {
                            if !level_valid(family, v, *l, gap_margin) {
                                let bad = (0..family.band_count())
                                    .map(|k| family.value(k, v))
                                    .min_by(|a, b| {
                                        (a - l).abs().partial_cmp(&(b - l).abs()).unwrap()
                                    })
                                    .unwrap();
                                return Err(Error::GapViolation {
                                    vertex: v,
                                    value: bad,
                                    level: *l,
                                    margin: gap_margin,
                                });
                            }
                        }
                        *l
                    }
                    None => pick_widest_level(family, verts, gap_margin, i)?,
                };
                sets.push(CoverSet {
                    vertices: verts.clone(),
                    level,
                });
            }
        }
    }
    let assignment = lowest_assignment(n, &sets)?;
    finish_cover(family, sets, assignment, gap_margin)
}

fn lowest_assignment(n: usize, sets: &[CoverSet]) -> Result<Vec<usize>> {
    (0..n)
        .map(|v| {
            sets.iter()
                .position(|s| s.vertices.contains(&v))
                .ok_or_else(|| Error::CoverInvalid(format!("vertex {v} uncovered")))
        })
        .collect()
}

fn finish_cover(
    family: &EnhancedGraph,
    sets: Vec<CoverSet>,
    assignment: Vec<usize>,
    gap_margin: f64,
) -> Result<SpectralCover> {
    let nerve = build_nerve(family.mesh(), &sets);
    let cover = SpectralCover {
        sets,
        assignment,
        nerve,
        gap_margin,
    };
    let report = validate_cover(family, &cover);
    if !report.is_valid() {
        return Err(Error::CoverInvalid(report.violations.join("; ")));
    }
    Ok(cover)
}

/// The 5-set star cover of a refined ∂Δ⁴: Uᵢ = {barycentric bᵢ ≥ τ}, with
/// the four sets away from the marked vertex trimmed by b₀ ≤ 1 − 3τ so
/// their overlaps keep a bounded distance from the marked point (where the
/// monopole eigenframes rotate fastest). Any vertex with b₀ ≤ 1 − 3τ has
/// another coordinate ≥ τ, so the five sets still cover. Levels are picked
/// in the structural gap nearest the crossing value 0 and the assignment
/// is by largest barycentric coordinate.
pub fn star_cover(
    family: &EnhancedGraph,
    geom: &S3Geometry,
    tau: f64,
    gap_margin: f64,
) -> Result<SpectralCover> {
    let n = family.mesh().vertex_count();
    if geom.barycentric.len() != n {
        return Err(Error::Invalid("geometry does not match family mesh".into()));
    }
    if !(tau > 0.0 && tau <= 0.25) {
        return Err(Error::Invalid("star threshold must lie in (0, 1/4]".into()));
    }
    let cut = 1.0 - 3.0 * tau;
    let mut sets = Vec::with_capacity(5);
    for i in 0..5 {
        let verts: BTreeSet<usize> = (0..n)
            .filter(|&v| {
                geom.barycentric[v][i] >= tau && (i == 0 || geom.barycentric[v][0] <= cut)
            })
            .collect();
        let level = pick_level_near(family, &verts, gap_margin, 0.0, i)?;
        sets.push(CoverSet {
            vertices: verts,
            level,
        });
    }
    let assignment = (0..n)
        .map(|v| {
            let b = &geom.barycentric[v];
            (0..5)
                .filter(|&i| sets[i].vertices.contains(&v))
                .max_by(|&i, &j| b[i].partial_cmp(&b[j]).unwrap().then(j.cmp(&i)))
                .ok_or_else(|| Error::CoverInvalid(format!("vertex {v} uncovered")))
        })
        .collect::<Result<Vec<usize>>>()?;
    finish_cover(family, sets, assignment, gap_margin)
}

/// Product cover of S² × S¹: six spherical caps times overlapping circle
/// arcs, levels nearest the crossing value.
pub fn product_cover(
    family: &EnhancedGraph,
    geom: &ProductGeometry,
    cap_threshold: f64,
    n_arcs: usize,
    arc_slack: f64,
    gap_margin: f64,
) -> Result<SpectralCover> {
    use std::f64::consts::PI;
    let n = family.mesh().vertex_count();
    let directions: [[f64; 3]; 6] = [
        [1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
        [0.0, -1.0, 0.0],
        [0.0, 0.0, 1.0],
        [0.0, 0.0, -1.0],
    ];
    let cap_score = |v: usize, c: usize| -> f64 {
        let p = &geom.sphere.positions()[geom.s2_of[v]];
        p[0] * directions[c][0] + p[1] * directions[c][1] + p[2] * directions[c][2]
    };
    let half_arc = PI / n_arcs as f64 + arc_slack;
    let arc_dist = |v: usize, a: usize| -> f64 {
        let psi = crate::models::circle_angle(&geom.circle, geom.s1_of[v]);
        let center = 2.0 * PI * a as f64 / n_arcs as f64;
        let mut d = (psi - center).abs() % (2.0 * PI);
        if d > PI {
            d = 2.0 * PI - d;
        }
        d
    };
    let mut sets = Vec::new();
    let mut set_of = Vec::new();
    for c in 0..6 {
        for a in 0..n_arcs {
            let verts: BTreeSet<usize> = (0..n)
                .filter(|&v| cap_score(v, c) >= cap_threshold && arc_dist(v, a) <= half_arc)
                .collect();
            if verts.is_empty() {
                return Err(Error::CoverInvalid(format!("empty product set ({c}, {a})")));
            }
            let level = pick_level_near(family, &verts, gap_margin, 0.0, sets.len())?;
            set_of.push((c, a));
            sets.push(CoverSet {
                vertices: verts,
                level,
            });
        }
    }
    let assignment = (0..n)
        .map(|v| {
            (0..sets.len())
                .filter(|&s| sets[s].vertices.contains(&v))
                .max_by(|&s, &t| {
                    let key = |s: usize| {
                        let (c, a) = set_of[s];
                        (cap_score(v, c), -arc_dist(v, a))
                    };
                    let (ks, kt) = (key(s), key(t));
                    ks.0.partial_cmp(&kt.0)
                        .unwrap()
                        .then(ks.1.partial_cmp(&kt.1).unwrap())
                        .then(t.cmp(&s))
                })
                .ok_or_else(|| Error::CoverInvalid(format!("vertex {v} uncovered")))
        })
        .collect::<Result<Vec<usize>>>()?;
    finish_cover(family, sets, assignment, gap_margin)
}

/// Push the fundamental 3-cycle onto the nerve: each mesh tet maps to the
/// nerve simplex spanned by its vertices' assignments, degenerate images
/// dropped. The result must be a cycle.
pub fn pushforward_fundamental(cover: &SpectralCover, mesh: &ParamMesh) -> Result<Chain> {
    let fc = mesh
        .fundamental_cycle()
        .ok_or_else(|| Error::Mesh("mesh carries no fundamental 3-cycle".into()))?;
    let mut chain = Chain::new(3);
    for &(tid, sign) in fc {
        let t = mesh.tets()[tid];
        let images = [
            cover.assignment[t[0]],
            cover.assignment[t[1]],
            cover.assignment[t[2]],
            cover.assignment[t[3]],
        ];
        let parity = sort_sign(images);
        if parity == 0 {
            continue;
        }
        let mut sorted = images;
        sorted.sort_unstable();
        let id = cover
            .nerve
            .simplex_id(&sorted)
            .ok_or(Error::MissingNerveSimplex {
                simplex: sorted.to_vec(),
            })?;
        chain.add(id, (sign * parity) as i64);
    }
    if !chain.boundary(&cover.nerve)?.is_zero() {
        return Err(Error::NotACycle);
    }
    Ok(chain)
}

/// Image of a mesh loop on the nerve: assignments with consecutive
/// duplicates compressed; every step must be a nerve edge.
pub fn pushforward_loop(cover: &SpectralCover, mesh_loop: &[usize]) -> Result<Vec<usize>> {
    if mesh_loop.is_empty() {
        return Err(Error::NotALoop);
    }
    let mut out: Vec<usize> = Vec::new();
    for &v in mesh_loop {
        let a = cover.assignment[v];
        if out.last() != Some(&a) {
            out.push(a);
        }
    }
    while out.len() > 1 && out.first() == out.last() {
        out.pop();
    }
    for t in 0..out.len() {
        let (a, b) = (out[t], out[(t + 1) % out.len()]);
        if a == b {
            continue;
        }
        let key = if a < b { vec![a, b] } else { vec![b, a] };
        if cover.nerve.simplex_id(&key).is_none() {
            return Err(Error::MissingNerveSimplex { simplex: key });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::SpectralWindow;
    use crate::models::*;
    use std::sync::Arc;

    #[test]
    fn single_set_cover_for_constant_family() {
        let mesh = Arc::new(circle_mesh(12));
        let fam = constant_family(mesh, &[-1.0, 1.0], SpectralWindow { lo: -2.0, hi: 2.0 }).unwrap();
        let cover = build_cover(
            &fam,
            CoverStrategy::Auto {
                max_set_fraction: 2.0,
            },
            DEFAULT_GAP_MARGIN,
        )
        .unwrap();
        assert_eq!(cover.sets.len(), 1);
        assert!((cover.sets[0].level - 0.0).abs() < 1e-12);
    }

    #[test]
    fn auto_cover_of_winding_has_at_least_three_arcs() {
        let mesh = Arc::new(circle_mesh(64));
        let fam = winding_family(mesh, 1, SpectralWindow { lo: -3.2, hi: 3.2 }).unwrap();
        let cover = build_cover(
            &fam,
            CoverStrategy::Auto {
                max_set_fraction: 1.0 / 3.0,
            },
            DEFAULT_GAP_MARGIN,
        )
        .unwrap();
        assert!(cover.sets.len() >= 3, "got {} arcs", cover.sets.len());
        // gap condition holds exhaustively
        for (i, set) in cover.sets.iter().enumerate() {
            for &v in &set.vertices {
                for k in 0..fam.band_count() {
                    assert!(
                        (fam.value(k, v) - set.level).abs() > DEFAULT_GAP_MARGIN,
                        "set {i} vertex {v}"
                    );
                }
            }
        }
    }

    #[test]
    fn star_cover_nerve_is_boundary_of_4_simplex() {
        let geom = s3_sphere(3);
        let chart = s3_ball_chart(&geom);
        let fam = monopole_family(geom.mesh.clone(), &chart, &MonopoleParams::default()).unwrap();
        let cover = star_cover(&fam, &geom, 0.125, DEFAULT_GAP_MARGIN).unwrap();
        assert_eq!(cover.nerve.f_vector(), [5, 10, 10, 5]);
        // the marked point lies only in U_0, whose level sits in the upper gap
        assert!(cover.sets[0].vertices.contains(&geom.marked));
        for i in 1..5 {
            assert!(!cover.sets[i].vertices.contains(&geom.marked));
            assert!(cover.sets[i].level.abs() < 0.5, "level {}", cover.sets[i].level);
        }
        assert!(cover.sets[0].level.abs() > 1.0);
    }

    #[test]
    fn pushforward_of_star_cover_is_fundamental_cycle_of_nerve() {
        let geom = s3_sphere(3);
        let chart = s3_ball_chart(&geom);
        let fam = monopole_family(geom.mesh.clone(), &chart, &MonopoleParams::default()).unwrap();
        let cover = star_cover(&fam, &geom, 0.125, DEFAULT_GAP_MARGIN).unwrap();
        let chain = pushforward_fundamental(&cover, fam.mesh()).unwrap();
        assert_eq!(chain.coeffs.len(), 5);
        for (&id, &c) in &chain.coeffs {
            assert_eq!(c.abs(), 1, "simplex {id} has coefficient {c}");
        }
        // alternating signs: faces omitting m carry (-1)^m up to a global flip
        let mut signs = vec![0i64; 5];
        for (&id, &c) in &chain.coeffs {
            let verts = &cover.nerve.simplices(3)[id].verts;
            let omitted = (0..5).find(|m| !verts.contains(m)).unwrap();
            signs[omitted] = c;
        }
        let global = signs[0];
        for (m, &s) in signs.iter().enumerate() {
            let expected = if m % 2 == 0 { global } else { -global };
            assert_eq!(s, expected, "face omitting {m}");
        }
    }

    #[test]
    fn disjoint_sets_have_no_nerve_edge() {
        let mesh = Arc::new(circle_mesh(12));
        let sets = vec![
            CoverSet {
                vertices: (0..4).collect(),
                level: 0.0,
            },
            CoverSet {
                vertices: (6..10).collect(),
                level: 0.0,
            },
        ];
        let nerve = build_nerve(&mesh, &sets);
        assert_eq!(nerve.f_vector(), [2, 0, 0, 0]);
    }

    #[test]
    fn two_arc_overlap_in_two_components_is_one_edge() {
        let mesh = Arc::new(circle_mesh(12));
        let sets = vec![
            CoverSet {
                vertices: (0..8).collect(),
                level: 0.0,
            },
            CoverSet {
                vertices: (6..12).chain(0..2).collect(),
                level: 0.0,
            },
        ];
        let nerve = build_nerve(&mesh, &sets);
        assert_eq!(nerve.f_vector(), [2, 1, 0, 0]);
        assert_eq!(nerve.simplices(1)[0].components.len(), 2);
    }
}
