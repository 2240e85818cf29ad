//! The enhanced-graph surgery calculus: condition checks (A)/(B), the
//! flatten and scale moves, separation detection, clutching-degree
//! extraction and standard-form decomposition.

use std::collections::{BTreeMap, BTreeSet};

use crate::cochain::Chain;
use crate::cover::{
    build_cover, pushforward_fundamental, pushforward_loop, CoverStrategy, SpectralCover,
};
use crate::error::{Error, Result};
use crate::family::{Band, EnhancedGraph};
use crate::gerbe::{build_gerbe_cocycle, berry_chern_oracle, dd_pair, flux_chern, GaugeOptions};
use crate::linalg::{self, CMatrix};
use crate::mesh::ParamMesh;
use crate::spectral_flow::{build_sf_cocycle, crossing_oracle, evaluate_on_loop, oracle_levels};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};

/// Closed ball subcomplex B with an inner shrinking B′, its oriented
/// boundary sphere, and the bump profile used by the moves: 1 on B′,
/// mesh-distance linear decay to 0 across B ∖ B′, 0 outside.
#[derive(Debug, Clone)]
pub struct BallRegion {
    pub vertices: BTreeSet<usize>,
    pub inner: BTreeSet<usize>,
    pub boundary: Vec<[usize; 3]>,
    bump: Vec<f64>,
}

impl BallRegion {
    pub fn new(mesh: &ParamMesh, vertices: BTreeSet<usize>, inner: BTreeSet<usize>) -> Result<Self> {
        if inner.is_empty() {
            return Err(Error::Invalid("inner region must be nonempty".into()));
        }
        if !inner.is_subset(&vertices) {
            return Err(Error::Invalid("inner region must lie inside the ball".into()));
        }
        if mesh.components_within(&vertices).len() != 1 {
            return Err(Error::Invalid("ball region is disconnected".into()));
        }
        // ballness heuristics: the boundary must be a single 2-sphere
        let boundary = mesh.boundary_sphere(&vertices)?;
        let outside: BTreeSet<usize> = (0..mesh.vertex_count())
            .filter(|v| !vertices.contains(v))
            .collect();
        let d_in = mesh.distances_from(&inner);
        let d_out = mesh.distances_from(&outside);
        let bump = (0..mesh.vertex_count())
            .map(|v| {
                if inner.contains(&v) {
                    1.0
                } else if !vertices.contains(&v) {
                    0.0
                } else {
                    d_out[v] / (d_in[v] + d_out[v])
                }
            })
            .collect();
        Ok(BallRegion {
            vertices,
            inner,
            boundary,
            bump,
        })
    }

    /// Ball of mesh-geodesic radius `outer` around a center vertex, with the
    /// inner shrinking at radius `inner`.
    pub fn from_center(mesh: &ParamMesh, center: usize, outer: f64, inner: f64) -> Result<Self> {
        let dist = mesh.distances_from(&BTreeSet::from([center]));
        BallRegion::from_scalar_field(mesh, &dist, outer, inner)
    }

    /// Sublevel-set ball of a scalar field, regularized until its boundary
    /// is a clean sphere.
    pub fn from_scalar_field(
        mesh: &ParamMesh,
        field: &[f64],
        outer: f64,
        inner: f64,
    ) -> Result<Self> {
        let verts: BTreeSet<usize> = (0..mesh.vertex_count())
            .filter(|&v| field[v] <= outer)
            .collect();
        let verts = mesh.regularize_solid(&verts);
        let core: BTreeSet<usize> = (0..mesh.vertex_count())
            .filter(|&v| field[v] <= inner && verts.contains(&v))
            .collect();
        BallRegion::new(mesh, verts, core)
    }

    pub fn bump(&self, v: usize) -> f64 {
        self.bump[v]
    }
}

/// Vertices where two bands coincide within the degeneracy tolerance.
#[derive(Debug, Clone)]
pub struct CrossingLocus {
    pub bands: (usize, usize),
    pub vertices: BTreeSet<usize>,
    pub multiplicity: BTreeMap<usize, usize>,
}

pub fn crossing_locus(family: &EnhancedGraph, a: usize, b: usize) -> CrossingLocus {
    let tol = family.degeneracy_tol();
    let mut vertices = BTreeSet::new();
    let mut multiplicity = BTreeMap::new();
    for v in 0..family.mesh().vertex_count() {
        if (family.value(a, v) - family.value(b, v)).abs() <= tol {
            vertices.insert(v);
            multiplicity.insert(v, family.multiplicity(v, a));
        }
    }
    CrossingLocus {
        bands: (a, b),
        vertices,
        multiplicity,
    }
}

/// The two trivial-family branches of the dichotomy: empty crossing locus
/// (disconnected graph) or locus covering the whole mesh at constant
/// multiplicity 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrivialDichotomy {
    DisconnectedGraph,
    ConstantMultiplicityTwo,
}

#[derive(Debug, Clone)]
pub struct ConditionAReport {
    pub designated: usize,
    pub passes: bool,
    pub upper_locus: CrossingLocus,
    pub lower_locus: Option<CrossingLocus>,
    pub violations: Vec<String>,
    pub dichotomy: Option<TrivialDichotomy>,
}

/// Condition (A): the designated band meets only its immediate neighbors,
/// and never both at the same vertex.
pub fn check_condition_a(family: &EnhancedGraph, band0: usize) -> ConditionAReport {
    let tol = family.degeneracy_tol();
    let count = family.band_count();
    let mut violations = Vec::new();
    for j in 0..count {
        if j == band0 || j + 1 == band0 || j == band0 + 1 {
            continue;
        }
        for v in 0..family.mesh().vertex_count() {
            if (family.value(j, v) - family.value(band0, v)).abs() <= tol {
                violations.push(format!(
                    "band {band0} meets non-adjacent band {j} at vertex {v}"
                ));
                break;
            }
        }
    }
    let upper_locus = if band0 + 1 < count {
        crossing_locus(family, band0, band0 + 1)
    } else {
        CrossingLocus {
            bands: (band0, band0 + 1),
            vertices: BTreeSet::new(),
            multiplicity: BTreeMap::new(),
        }
    };
    let lower_locus = (band0 > 0).then(|| crossing_locus(family, band0 - 1, band0));
    if let Some(lower) = &lower_locus {
        let mut both = upper_locus.vertices.intersection(&lower.vertices);
        if let Some(v) = both.next() {
            violations.push(format!(
                "band {band0} meets both neighbors at vertex {v}"
            ));
        }
    }
    let n = family.mesh().vertex_count();
    let dichotomy = if upper_locus.vertices.is_empty() {
        Some(TrivialDichotomy::DisconnectedGraph)
    } else if upper_locus.vertices.len() == n
        && upper_locus.multiplicity.values().all(|&m| m == 2)
    {
        Some(TrivialDichotomy::ConstantMultiplicityTwo)
    } else {
        None
    };
    ConditionAReport {
        designated: band0,
        passes: violations.is_empty(),
        upper_locus,
        lower_locus,
        violations,
        dichotomy,
    }
}

#[derive(Debug, Clone)]
pub struct ConditionBReport {
    pub passes: bool,
    pub upper_inside: bool,
    pub lower_outside: bool,
    pub witness: Option<usize>,
    pub dichotomy: Option<TrivialDichotomy>,
}

/// Condition (B): the (band0, band0+1) locus lies in the ball and the
/// (band0−1, band0) locus in its complement.
pub fn check_condition_b(
    family: &EnhancedGraph,
    band0: usize,
    ball: &BallRegion,
) -> ConditionBReport {
    let a = check_condition_a(family, band0);
    let mut witness = None;
    let upper_inside = a
        .upper_locus
        .vertices
        .iter()
        .all(|v| ball.vertices.contains(v));
    if !upper_inside {
        witness = a
            .upper_locus
            .vertices
            .iter()
            .find(|v| !ball.vertices.contains(v))
            .cloned();
    }
    let lower_outside = a
        .lower_locus
        .as_ref()
        .map(|l| l.vertices.iter().all(|v| !ball.vertices.contains(v)))
        .unwrap_or(true);
    if lower_outside == false && witness.is_none() {
        witness = a
            .lower_locus
            .as_ref()
            .and_then(|l| l.vertices.iter().find(|v| ball.vertices.contains(v)).cloned());
    }
    ConditionBReport {
        passes: upper_inside && lower_outside,
        upper_inside,
        lower_outside,
        witness,
        dichotomy: a.dichotomy,
    }
}

/// Flatten one band to a constant value on B′, blended to its original
/// values across B ∖ B′ by the mesh-distance bump. Frames are untouched;
/// creating an inversion against a neighboring band is an error.
pub fn flatten(
    family: &EnhancedGraph,
    band: usize,
    ball: &BallRegion,
    value: f64,
) -> Result<EnhancedGraph> {
    let n = family.mesh().vertex_count();
    if band >= family.band_count() {
        return Err(Error::Invalid(format!("no band {band}")));
    }
    if !family.window().contains(value) {
        return Err(Error::Invalid("flatten value outside the window".into()));
    }
    let mut bands: Vec<Band> = family.bands().to_vec();
    for v in 0..n {
        let w = ball.bump(v);
        if w == 0.0 {
            continue;
        }
        let new = (1.0 - w) * bands[band].values[v] + w * value;
        if band > 0 && new < bands[band - 1].values[v] - 1e-12 {
            return Err(Error::IllegalCrossing {
                op: "flatten",
                band,
                vertex: v,
            });
        }
        if band + 1 < bands.len() && new > bands[band + 1].values[v] + 1e-12 {
            return Err(Error::IllegalCrossing {
                op: "flatten",
                band,
                vertex: v,
            });
        }
        bands[band].values[v] = new;
    }
    EnhancedGraph::new(
        family.mesh().clone(),
        family.window(),
        bands,
        family.edge_matchings().clone(),
        family.aux_dim(),
        family.degeneracy_tol(),
    )
}

#[derive(Debug, Clone)]
pub struct ScaleCertificate {
    pub eps: f64,
    pub total_chern: i64,
    pub sweeps: usize,
    pub min_alignment: f64,
}

const GAUGE_MAX_SWEEPS: usize = 1000;
const GAUGE_CONVERGENCE: f64 = 1e-6;
/// Minimum Re tr(G†·transport)/N over ball edges. A continuous gauge on a
/// coarse mesh stays well above this; a branch flip drives one column's
/// contribution to −1 and the alignment to ≤ 0.
const GAUGE_MIN_ALIGNMENT: f64 = 0.25;

/// Raise the bands of a selected subbundle by ε·bump. The selected bands'
/// frames over the ball are replaced by a continuous global frame of their
/// span, whose existence is certified by a vanishing total Chern number
/// over ∂B followed by numerical gauge fixing; remaining cluster bands get
/// the orthogonal complement.
pub fn scale(
    family: &EnhancedGraph,
    selected: &[usize],
    eps: Option<f64>,
    ball: &BallRegion,
) -> Result<(EnhancedGraph, ScaleCertificate)> {
    if selected.is_empty() {
        return Err(Error::Invalid("no bands selected".into()));
    }
    let mut sel = selected.to_vec();
    sel.sort_unstable();
    sel.dedup();
    for w in sel.windows(2) {
        if w[1] != w[0] + 1 {
            return Err(Error::Invalid("selected bands must be contiguous".into()));
        }
    }
    let top = *sel.last().unwrap();
    let n_sel = sel.len();
    let tol = family.degeneracy_tol();

    // ε against the gap to the next band above, over the ball
    let gap = if top + 1 < family.band_count() {
        ball.vertices
            .iter()
            .map(|&v| family.value(top + 1, v) - family.value(top, v))
            .fold(f64::INFINITY, f64::min)
    } else {
        ball.vertices
            .iter()
            .map(|&v| family.window().hi - family.value(top, v))
            .fold(f64::INFINITY, f64::min)
    };
    let eps = eps.unwrap_or(0.1 * gap);
    if eps == 0.0 {
        return Ok((
            family.clone(),
            ScaleCertificate {
                eps,
                total_chern: 0,
                sweeps: 0,
                min_alignment: 1.0,
            },
        ));
    }
    if !(eps > 0.0) {
        return Err(Error::Invalid("epsilon must be positive".into()));
    }
    if eps >= gap / 2.0 {
        return Err(Error::EpsilonTooLarge { eps, gap });
    }

    // obstruction: total Chern number of the selected subbundle over ∂B
    let total_chern = flux_chern(family, &ball.boundary, &sel)?;
    if total_chern != 0 {
        return Err(Error::ChernObstruction { chern: total_chern });
    }

    // Where the selected bands stay split from the rest of their cluster the
    // gauge span is forced; inside the degenerate core it may widen into the
    // whole cluster space. The widening ramps up with hop depth into the
    // core, because the forced span field is typically singular deep inside
    // (that is what the scale move repairs).
    let ball_verts: Vec<usize> = ball.vertices.iter().cloned().collect();
    let in_ball: BTreeSet<usize> = ball.vertices.clone();
    let aux = family.aux_dim();
    let mut narrow: BTreeMap<usize, CMatrix> = BTreeMap::new();
    let mut wide: BTreeMap<usize, CMatrix> = BTreeMap::new();
    let mut forced: BTreeMap<usize, bool> = BTreeMap::new();
    let band_frame = |bands: &[usize], v: usize| -> Result<CMatrix> {
        let mut m = CMatrix::zeros(aux, bands.len());
        for (c, &k) in bands.iter().enumerate() {
            let f = family
                .frame(k, v)
                .ok_or(Error::FramesMissing { band: k, vertex: v })?;
            for (r, &z) in f.iter().enumerate() {
                m[(r, c)] = z;
            }
        }
        Ok(m)
    };
    for &v in &ball_verts {
        let sel_val_lo = family.value(sel[0], v);
        let sel_val_hi = family.value(top, v);
        let cluster: Vec<usize> = (0..family.band_count())
            .filter(|&k| {
                sel.contains(&k)
                    || (family.value(k, v) - sel_val_lo).abs() <= tol
                    || (family.value(k, v) - sel_val_hi).abs() <= tol
            })
            .collect();
        forced.insert(v, cluster.len() == n_sel);
        narrow.insert(v, band_frame(&sel, v)?);
        wide.insert(v, band_frame(&cluster, v)?);
    }
    // hop depth into the free core
    let mut depth: BTreeMap<usize, usize> = BTreeMap::new();
    let mut queue: std::collections::VecDeque<usize> = ball_verts
        .iter()
        .cloned()
        .filter(|v| forced[v])
        .inspect(|&v| {
            depth.insert(v, 0);
        })
        .collect();
    let all_free = queue.is_empty();
    if all_free {
        for &v in &ball_verts {
            depth.insert(v, 1);
        }
    }
    while let Some(u) = queue.pop_front() {
        for &w in family.mesh().neighbors(u) {
            if in_ball.contains(&w) && !depth.contains_key(&w) {
                depth.insert(w, depth[&u] + 1);
                queue.push_back(w);
            }
        }
    }
    if depth.len() != ball_verts.len() {
        return Err(Error::GaugeFixingFailed("ball is disconnected".into()));
    }
    let max_depth = *depth.values().max().unwrap() as f64;
    let widening = |v: usize| -> f64 {
        if forced[&v] {
            0.0
        } else if all_free {
            1.0
        } else {
            (((depth[&v] as f64) - 1.0) / (max_depth - 2.0).max(1.0)).clamp(0.0, 1.0)
        }
    };
    // A(v) m = P_selected m + s(v) (P_cluster − P_selected) m
    let apply = |v: usize, m: &CMatrix| -> CMatrix {
        let n = &narrow[&v];
        let narrow_part = n * (n.adjoint() * m);
        let s = widening(v);
        if s == 0.0 {
            narrow_part
        } else {
            let c = &wide[&v];
            let wide_part = c * (c.adjoint() * m);
            &narrow_part + (wide_part - &narrow_part) * nalgebra::Complex::new(s, 0.0)
        }
    };

    // project a fixed generic reference frame; retry with fresh references
    // if it degenerates somewhere
    let mut gauge: BTreeMap<usize, CMatrix> = BTreeMap::new();
    let mut seeded_ok = false;
    'attempt: for attempt in 0..16u64 {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0xCEC4_F10E + attempt);
        let raw = CMatrix::from_fn(aux, n_sel, |_, _| {
            nalgebra::Complex::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        });
        let reference = match linalg::orthonormalize(&raw) {
            Ok(r) => r,
            Err(_) => continue,
        };
        gauge.clear();
        for &v in &ball_verts {
            let projected = apply(v, &reference);
            if linalg::smallest_singular_value(&projected) < 0.05 {
                continue 'attempt;
            }
            match linalg::orthonormalize(&projected) {
                Ok(g) => {
                    gauge.insert(v, g);
                }
                Err(_) => continue 'attempt,
            }
        }
        seeded_ok = true;
        break;
    }
    if !seeded_ok {
        return Err(Error::GaugeFixingFailed(
            "no reference frame stays nondegenerate over the ball".into(),
        ));
    }

    // worst transport alignment over ball edges
    let edge_alignment = |gauge: &BTreeMap<usize, CMatrix>| -> Result<f64> {
        let mut worst = 1.0f64;
        for &u in &ball_verts {
            for &w in family.mesh().neighbors(u) {
                if w <= u || !in_ball.contains(&w) {
                    continue;
                }
                let transported = linalg::orthonormalize(&apply(w, &gauge[&u]))?;
                let tr: Complex64 = (gauge[&w].adjoint() * transported).trace();
                worst = worst.min(tr.re / n_sel as f64);
            }
        }
        Ok(worst)
    };
    let projected_alignment = edge_alignment(&gauge)?;

    // phase/rotation smoothing sweeps; kept only if they improve the gauge
    let mut smoothed = gauge.clone();
    let mut sweeps = 0;
    for _ in 0..GAUGE_MAX_SWEEPS {
        sweeps += 1;
        let mut max_change = 0.0f64;
        for &v in &ball_verts {
            let mut acc = CMatrix::zeros(aux, n_sel);
            let mut any = false;
            for &w in family.mesh().neighbors(v) {
                if in_ball.contains(&w) {
                    acc += &smoothed[&w];
                    any = true;
                }
            }
            if !any {
                continue;
            }
            let projected = apply(v, &acc);
            if linalg::smallest_singular_value(&projected) < 0.05 {
                continue;
            }
            let updated = linalg::orthonormalize(&projected)?;
            let change = (&updated - &smoothed[&v]).norm();
            max_change = max_change.max(change);
            smoothed.insert(v, updated);
        }
        if max_change < GAUGE_CONVERGENCE {
            break;
        }
    }
    let smoothed_alignment = edge_alignment(&smoothed)?;
    let mut min_alignment = projected_alignment;
    if smoothed_alignment > projected_alignment {
        gauge = smoothed;
        min_alignment = smoothed_alignment;
    }
    if min_alignment < GAUGE_MIN_ALIGNMENT {
        return Err(Error::GaugeFixingFailed(format!(
            "frame alignment {min_alignment:.3} after {sweeps} sweeps"
        )));
    }

    // assemble the deformed family
    let mut bands: Vec<Band> = family.bands().to_vec();
    for v in 0..family.mesh().vertex_count() {
        let w = ball.bump(v);
        if w == 0.0 {
            continue;
        }
        for &k in &sel {
            bands[k].values[v] += eps * w;
        }
        if top + 1 < bands.len() && bands[top].values[v] > bands[top + 1].values[v] + 1e-12 {
            return Err(Error::IllegalCrossing {
                op: "scale",
                band: top,
                vertex: v,
            });
        }
    }
    for &v in &ball_verts {
        let g = &gauge[&v];
        for (c, &k) in sel.iter().enumerate() {
            let col: Vec<num_complex::Complex64> = g.column(c).iter().cloned().collect();
            bands[k].frames.insert(v, col);
        }
        if !forced[&v] {
            // orthogonal complement within the cluster for the bands left at
            // the old value
            let others: Vec<usize> = (0..family.band_count())
                .filter(|k| {
                    !sel.contains(k)
                        && (family.value(*k, v) - family.value(sel[0], v)).abs() <= tol
                })
                .collect();
            if !others.is_empty() {
                let mut raw = CMatrix::zeros(family.aux_dim(), others.len());
                for (c, &k) in others.iter().enumerate() {
                    let f = family
                        .frame(k, v)
                        .ok_or(Error::FramesMissing { band: k, vertex: v })?;
                    for (r, &z) in f.iter().enumerate() {
                        raw[(r, c)] = z;
                    }
                }
                let projected = &raw - g * (g.adjoint() * &raw);
                let ortho = linalg::orthonormalize(&projected)?;
                for (c, &k) in others.iter().enumerate() {
                    let col: Vec<num_complex::Complex64> = ortho.column(c).iter().cloned().collect();
                    bands[k].frames.insert(v, col);
                }
            }
        }
    }

    let family = EnhancedGraph::new(
        family.mesh().clone(),
        family.window(),
        bands,
        family.edge_matchings().clone(),
        family.aux_dim(),
        family.degeneracy_tol(),
    )?;
    Ok((
        family,
        ScaleCertificate {
            eps,
            total_chern,
            sweeps,
            min_alignment,
        },
    ))
}

/// True iff the lower band stays strictly below the upper one everywhere,
/// by more than the degeneracy tolerance.
pub fn is_separated(family: &EnhancedGraph, lower: usize, upper: usize) -> bool {
    (0..family.mesh().vertex_count())
        .all(|v| family.value(upper, v) - family.value(lower, v) > family.degeneracy_tol())
}

/// Berry-flux Chern number of the lower eigenline of the designated pair
/// over ∂B, cross-checked against the upper one.
pub fn clutching_degree(
    family: &EnhancedGraph,
    ball: &BallRegion,
    pair: (usize, usize),
) -> Result<i64> {
    let c0 = berry_chern_oracle(family, &ball.boundary, pair.0)?;
    let c1 = berry_chern_oracle(family, &ball.boundary, pair.1)?;
    if c0 + c1 != 0 {
        return Err(Error::Invalid(format!(
            "eigenline degrees over the boundary sphere do not cancel: {c0} + {c1}"
        )));
    }
    Ok(c0)
}

#[derive(Debug, Clone)]
pub struct StandardFormReport {
    pub condition_a: ConditionAReport,
    pub condition_b: Option<ConditionBReport>,
    pub sf_loop_evaluations: Vec<i64>,
    pub oracle_evaluations: Vec<i64>,
    pub clutching: Option<i64>,
    pub dd: Option<i64>,
    /// Loop evaluations minus oracle counts; zero when the cocycle class
    /// matches the crossing picture.
    pub residual_sf: Vec<i64>,
    /// Dixmier–Douady pairing minus the clutching integer; zero certifies
    /// the standard-form decomposition.
    pub residual_dd: Option<i64>,
}

/// Decompose a family into its standard-form data: spectral-flow loop
/// evaluations plus the clutching integer of the designated pair, with the
/// Poincaré-dual cross-check against the Dixmier–Douady pairing.
pub fn standard_form_decompose(
    family: &EnhancedGraph,
    cover: Option<&SpectralCover>,
    ball: Option<&BallRegion>,
    band0: usize,
) -> Result<StandardFormReport> {
    let condition_a = check_condition_a(family, band0);
    if !condition_a.passes {
        return Err(Error::ConditionA(condition_a.violations.join("; ")));
    }
    let built;
    let cover = match cover {
        Some(c) => c,
        None => {
            built = build_cover(
                family,
                CoverStrategy::Auto {
                    max_set_fraction: 1.0 / 3.0,
                },
                crate::cover::DEFAULT_GAP_MARGIN,
            )?;
            &built
        }
    };
    let (sf, _) = build_sf_cocycle(family, cover)?;
    let mut sf_loop_evaluations = Vec::new();
    let mut oracle_evaluations = Vec::new();
    for mesh_loop in family.mesh().loops() {
        let nerve_loop = pushforward_loop(cover, mesh_loop)?;
        sf_loop_evaluations.push(evaluate_on_loop(cover, &sf, &nerve_loop)?);
        let level = oracle_levels(family, mesh_loop, 1)
            .into_iter()
            .next()
            .ok_or_else(|| Error::Invalid("no oracle level available".into()))?;
        oracle_evaluations.push(crossing_oracle(family, mesh_loop, level)?);
    }
    let residual_sf: Vec<i64> = sf_loop_evaluations
        .iter()
        .zip(&oracle_evaluations)
        .map(|(a, b)| a - b)
        .collect();

    let mut condition_b = None;
    let mut clutching = None;
    if let Some(ball) = ball {
        let report = check_condition_b(family, band0, ball);
        if report.passes {
            clutching = Some(clutching_degree(family, ball, (band0, band0 + 1))?);
        }
        condition_b = Some(report);
    }
    let mut dd = None;
    if family.mesh().fundamental_cycle().is_some() {
        let gc = build_gerbe_cocycle(family, cover, &GaugeOptions::default())?;
        let fclass: Chain = pushforward_fundamental(cover, family.mesh())?;
        dd = Some(dd_pair(cover, &gc, &fclass)?);
    }
    let residual_dd = match (clutching, dd) {
        (Some(k), Some(d)) => {
            if k != d {
                return Err(Error::InvariantMismatch { clutching: k, dd: d });
            }
            Some(d - k)
        }
        _ => None,
    };
    Ok(StandardFormReport {
        condition_a,
        condition_b,
        sf_loop_evaluations,
        oracle_evaluations,
        clutching,
        dd,
        residual_sf,
        residual_dd,
    })
}
