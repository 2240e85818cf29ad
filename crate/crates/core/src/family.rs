//! Enhanced spectral graphs: indexed band functions over a mesh plus
//! eigenframe fields into a fixed auxiliary space, valid inside a
//! spectral window. Families of Hermitian matrix samples are ingested
//! into this form; model families are built directly.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::mesh::{ParamMesh, SimplicialMap};

pub const DEFAULT_DEGENERACY_TOL: f64 = 1e-8;
const FRAME_ORTHO_TOL: f64 = 1e-10;
/// Frames are required wherever adjacent bands come closer than this
/// multiple of the degeneracy tolerance.
pub const PROXIMITY_FACTOR: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralWindow {
    pub lo: f64,
    pub hi: f64,
}

impl SpectralWindow {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::Invalid(format!("bad spectral window [{lo}, {hi}]")));
        }
        Ok(SpectralWindow { lo, hi })
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo < v && v < self.hi
    }

    pub fn reflected(&self) -> SpectralWindow {
        SpectralWindow {
            lo: -self.hi,
            hi: -self.lo,
        }
    }

    pub fn intersect(&self, other: &SpectralWindow) -> Option<SpectralWindow> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo < hi).then_some(SpectralWindow { lo, hi })
    }
}

pub type Frame = Vec<Complex64>;

/// One spectral band: a value per mesh vertex, frames where stored.
#[derive(Debug, Clone)]
pub struct Band {
    pub values: Vec<f64>,
    pub frames: BTreeMap<usize, Frame>,
}

/// Band matching across one mesh edge, from bands at `edges[id][0]` to
/// bands at `edges[id][1]`. Absent entries mean the identity matching.
pub type EdgeMatching = Vec<Option<usize>>;

#[derive(Debug, Clone)]
pub struct EnhancedGraph {
    mesh: Arc<ParamMesh>,
    window: SpectralWindow,
    bands: Vec<Band>,
    edge_matchings: BTreeMap<usize, EdgeMatching>,
    aux_dim: usize,
    degeneracy_tol: f64,
}

impl EnhancedGraph {
    pub fn new(
        mesh: Arc<ParamMesh>,
        window: SpectralWindow,
        bands: Vec<Band>,
        edge_matchings: BTreeMap<usize, EdgeMatching>,
        aux_dim: usize,
        degeneracy_tol: f64,
    ) -> Result<Self> {
        let graph = EnhancedGraph {
            mesh,
            window,
            bands,
            edge_matchings,
            aux_dim,
            degeneracy_tol,
        };
        graph.validate()?;
        Ok(graph)
    }

    fn validate(&self) -> Result<()> {
        let n = self.mesh.vertex_count();
        for (k, band) in self.bands.iter().enumerate() {
            if band.values.len() != n {
                return Err(Error::Invalid(format!("band {k} has wrong length")));
            }
            for (v, &val) in band.values.iter().enumerate() {
                if !val.is_finite() {
                    return Err(Error::Invalid(format!("band {k} non-finite at {v}")));
                }
                if !self.window.contains(val) {
                    return Err(Error::BandOutsideWindow { band: k });
                }
                if k + 1 < self.bands.len() {
                    let next = self.bands[k + 1].values[v];
                    if val > next + 1e-12 {
                        return Err(Error::Invalid(format!(
                            "bands unsorted at vertex {v}: g_{k} = {val} > g_{} = {next}",
                            k + 1
                        )));
                    }
                }
            }
            for (&v, f) in &band.frames {
                if v >= n || f.len() != self.aux_dim {
                    return Err(Error::Invalid(format!("bad frame on band {k}")));
                }
                let norm: f64 = f.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                if (norm - 1.0).abs() > FRAME_ORTHO_TOL {
                    return Err(Error::Invalid(format!(
                        "frame of band {k} at vertex {v} has norm {norm}"
                    )));
                }
            }
        }
        // frames of distinct bands at the same vertex must be orthogonal
        for k in 0..self.bands.len() {
            for j in (k + 1)..self.bands.len() {
                for (&v, f) in &self.bands[k].frames {
                    if let Some(g) = self.bands[j].frames.get(&v) {
                        let ov = linalg::dot(f, g).norm();
                        if ov > FRAME_ORTHO_TOL {
                            return Err(Error::Invalid(format!(
                                "frames of bands {k} and {j} overlap ({ov:.2e}) at vertex {v}"
                            )));
                        }
                    }
                }
            }
        }
        for (&e, m) in &self.edge_matchings {
            if e >= self.mesh.edges().len() || m.len() != self.bands.len() {
                return Err(Error::Invalid(format!("bad edge matching on edge {e}")));
            }
            let mut seen = vec![false; self.bands.len()];
            for target in m.iter().flatten() {
                if *target >= self.bands.len() || seen[*target] {
                    return Err(Error::Invalid(format!("edge {e} matching not injective")));
                }
                seen[*target] = true;
            }
        }
        Ok(())
    }

    /// Non-fatal diagnostics: frames absent where band proximity asks for them.
    pub fn frame_warnings(&self) -> Vec<String> {
        let mut warnings = Vec::new();
        let radius = PROXIMITY_FACTOR * self.degeneracy_tol;
        for k in 0..self.bands.len() {
            for v in 0..self.mesh.vertex_count() {
                let close_below =
                    k > 0 && self.bands[k].values[v] - self.bands[k - 1].values[v] < radius;
                let close_above = k + 1 < self.bands.len()
                    && self.bands[k + 1].values[v] - self.bands[k].values[v] < radius;
                if (close_below || close_above) && !self.bands[k].frames.contains_key(&v) {
                    warnings.push(format!("band {k} lacks a frame at vertex {v}"));
                }
            }
        }
        warnings
    }

    pub fn mesh(&self) -> &Arc<ParamMesh> {
        &self.mesh
    }

    pub fn window(&self) -> SpectralWindow {
        self.window
    }

    pub fn band_count(&self) -> usize {
        self.bands.len()
    }

    pub fn bands(&self) -> &[Band] {
        &self.bands
    }

    pub fn aux_dim(&self) -> usize {
        self.aux_dim
    }

    pub fn degeneracy_tol(&self) -> f64 {
        self.degeneracy_tol
    }

    pub fn edge_matchings(&self) -> &BTreeMap<usize, EdgeMatching> {
        &self.edge_matchings
    }

    pub fn value(&self, band: usize, vertex: usize) -> f64 {
        self.bands[band].values[vertex]
    }

    pub fn frame(&self, band: usize, vertex: usize) -> Option<&Frame> {
        self.bands[band].frames.get(&vertex)
    }

    /// Number of bands sharing band `k`'s value at `vertex`, within tolerance.
    pub fn multiplicity(&self, vertex: usize, band: usize) -> usize {
        let v = self.bands[band].values[vertex];
        self.bands
            .iter()
            .filter(|b| (b.values[vertex] - v).abs() <= self.degeneracy_tol)
            .count()
    }

    /// Band pairs matched across the edge (u, v), in the (u, v) direction.
    pub fn matched_pairs(&self, u: usize, v: usize) -> Result<Vec<(usize, usize)>> {
        let id = self
            .mesh
            .edge_id(u, v)
            .ok_or_else(|| Error::Invalid(format!("no edge ({u}, {v})")))?;
        let [a, _b] = self.mesh.edges()[id];
        let pairs = match self.edge_matchings.get(&id) {
            None => (0..self.bands.len()).map(|i| (i, i)).collect(),
            Some(m) => {
                let forward: Vec<(usize, usize)> = m
                    .iter()
                    .enumerate()
                    .filter_map(|(i, t)| t.map(|j| (i, j)))
                    .collect();
                if a == u {
                    forward
                } else {
                    let mut inv: Vec<(usize, usize)> =
                        forward.into_iter().map(|(i, j)| (j, i)).collect();
                    inv.sort_unstable();
                    inv
                }
            }
        };
        Ok(pairs)
    }

    /// Median gap between consecutive bands over all vertices. Falls back to
    /// a quarter window for families with fewer than two bands.
    pub fn median_band_gap(&self) -> f64 {
        let mut gaps = Vec::new();
        for k in 0..self.bands.len().saturating_sub(1) {
            for v in 0..self.mesh.vertex_count() {
                gaps.push(self.bands[k + 1].values[v] - self.bands[k].values[v]);
            }
        }
        if gaps.is_empty() {
            return (self.window.hi - self.window.lo) / 4.0;
        }
        gaps.sort_by(|a, b| a.partial_cmp(b).unwrap());
        gaps[gaps.len() / 2]
    }

    /// Levels must stay inside this zone: more than one median band-gap
    /// away from either window edge. The margin is capped at a quarter
    /// window so sparse-band families keep a nonempty zone.
    pub fn level_zone(&self) -> (f64, f64) {
        let margin = self
            .median_band_gap()
            .min((self.window.hi - self.window.lo) / 4.0);
        (self.window.lo + margin, self.window.hi - margin)
    }

    /// Direct sum on a shared mesh: band multisets merge, multiplicities add,
    /// frames embed into the orthogonal sum of auxiliary spaces.
    pub fn direct_sum(&self, other: &EnhancedGraph) -> Result<EnhancedGraph> {
        if !Arc::ptr_eq(&self.mesh, &other.mesh) && *self.mesh != *other.mesh {
            return Err(Error::MeshMismatch);
        }
        let window = self
            .window
            .intersect(&other.window)
            .ok_or_else(|| Error::Invalid("windows do not intersect".into()))?;
        let keep = |g: &EnhancedGraph| -> Vec<usize> {
            (0..g.band_count())
                .filter(|&k| g.bands[k].values.iter().all(|&v| window.contains(v)))
                .collect()
        };
        let kept_a = keep(self);
        let kept_b = keep(other);
        let n = self.mesh.vertex_count();
        let aux = self.aux_dim + other.aux_dim;
        let total = kept_a.len() + kept_b.len();

        // provenance[v][rank] = (summand, index into kept list)
        let mut provenance: Vec<Vec<(u8, usize)>> = Vec::with_capacity(n);
        for v in 0..n {
            let mut entries: Vec<(f64, u8, usize)> = Vec::with_capacity(total);
            for (pos, &k) in kept_a.iter().enumerate() {
                entries.push((self.bands[k].values[v], 0, pos));
            }
            for (pos, &k) in kept_b.iter().enumerate() {
                entries.push((other.bands[k].values[v], 1, pos));
            }
            entries.sort_by(|a, b| {
                a.0.partial_cmp(&b.0)
                    .unwrap()
                    .then(a.1.cmp(&b.1))
                    .then(a.2.cmp(&b.2))
            });
            provenance.push(entries.into_iter().map(|(_, s, p)| (s, p)).collect());
        }
        let rank_of = |v: usize, summand: u8, pos: usize| -> usize {
            provenance[v]
                .iter()
                .position(|&(s, p)| s == summand && p == pos)
                .unwrap()
        };

        let mut bands: Vec<Band> = (0..total)
            .map(|_| Band {
                values: vec![0.0; n],
                frames: BTreeMap::new(),
            })
            .collect();
        for v in 0..n {
            for (rank, &(summand, pos)) in provenance[v].iter().enumerate() {
                let (g, kept, offset): (&EnhancedGraph, &[usize], usize) = if summand == 0 {
                    (self, &kept_a, 0)
                } else {
                    (other, &kept_b, self.aux_dim)
                };
                let k = kept[pos];
                bands[rank].values[v] = g.bands[k].values[v];
                if let Some(f) = g.bands[k].frames.get(&v) {
                    let mut embedded = vec![Complex64::default(); aux];
                    embedded[offset..offset + g.aux_dim].copy_from_slice(f);
                    bands[rank].frames.insert(v, embedded);
                }
            }
        }

        // edge matchings follow each summand's own continuation
        let mut edge_matchings = BTreeMap::new();
        for (e, &[eu, ev]) in self.mesh.edges().iter().enumerate() {
            let mut m: EdgeMatching = vec![None; total];
            for (rank_u, &(summand, pos)) in provenance[eu].iter().enumerate() {
                let (g, kept): (&EnhancedGraph, &[usize]) = if summand == 0 {
                    (self, &kept_a)
                } else {
                    (other, &kept_b)
                };
                let k = kept[pos];
                let partner = g
                    .matched_pairs(eu, ev)?
                    .iter()
                    .find(|&&(i, _)| i == k)
                    .map(|&(_, j)| j);
                if let Some(j) = partner {
                    if let Some(pos_v) = kept.iter().position(|&kk| kk == j) {
                        m[rank_u] = Some(rank_of(ev, summand, pos_v));
                    }
                }
            }
            let identity = m.len() == total && m.iter().enumerate().all(|(i, t)| *t == Some(i));
            if !identity {
                edge_matchings.insert(e, m);
            }
        }

        EnhancedGraph::new(
            self.mesh.clone(),
            window,
            bands,
            edge_matchings,
            aux,
            self.degeneracy_tol.max(other.degeneracy_tol),
        )
    }

    /// Reverse the signs of all bands, re-indexing so sortedness holds.
    pub fn negate(&self) -> EnhancedGraph {
        let count = self.band_count();
        let bands: Vec<Band> = (0..count)
            .map(|k| {
                let src = &self.bands[count - 1 - k];
                Band {
                    values: src.values.iter().map(|v| -v).collect(),
                    frames: src.frames.clone(),
                }
            })
            .collect();
        let edge_matchings = self
            .edge_matchings
            .iter()
            .map(|(&e, m)| {
                let mut flipped: EdgeMatching = vec![None; count];
                for (i, t) in m.iter().enumerate() {
                    if let Some(j) = t {
                        flipped[count - 1 - i] = Some(count - 1 - j);
                    }
                }
                (e, flipped)
            })
            .collect();
        EnhancedGraph {
            mesh: self.mesh.clone(),
            window: self.window.reflected(),
            bands,
            edge_matchings,
            aux_dim: self.aux_dim,
            degeneracy_tol: self.degeneracy_tol,
        }
    }

    /// Pull the family back along a simplicial map into this family's mesh.
    pub fn pullback(&self, map: &SimplicialMap) -> Result<EnhancedGraph> {
        if *map.target != *self.mesh {
            return Err(Error::MeshMismatch);
        }
        let n = map.source.vertex_count();
        let bands: Vec<Band> = self
            .bands
            .iter()
            .map(|band| {
                let values = (0..n).map(|v| band.values[map.apply(v)]).collect();
                let frames = (0..n)
                    .filter_map(|v| band.frames.get(&map.apply(v)).map(|f| (v, f.clone())))
                    .collect();
                Band { values, frames }
            })
            .collect();
        let mut edge_matchings = BTreeMap::new();
        for (e, &[u, v]) in map.source.edges().iter().enumerate() {
            let (fu, fv) = (map.apply(u), map.apply(v));
            if fu == fv {
                continue;
            }
            let pairs = self.matched_pairs(fu, fv)?;
            let identity = pairs.len() == self.band_count()
                && pairs.iter().enumerate().all(|(i, &(a, b))| a == i && b == i);
            if !identity {
                let mut m: EdgeMatching = vec![None; self.band_count()];
                for (i, j) in pairs {
                    m[i] = Some(j);
                }
                edge_matchings.insert(e, m);
            }
        }
        EnhancedGraph::new(
            map.source.clone(),
            self.window,
            bands,
            edge_matchings,
            self.aux_dim,
            self.degeneracy_tol,
        )
    }
}

/// Hermitian matrix family sampled on mesh vertices.
#[derive(Debug, Clone)]
pub struct MatrixFamilySample {
    pub mesh: Arc<ParamMesh>,
    pub matrices: Vec<CMatrix>,
    pub window: SpectralWindow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FramePolicy {
    /// Store frames only where adjacent bands come within the proximity radius.
    NearDegeneracy,
    /// Store every eigenframe.
    All,
}

const HERMITICITY_TOL: f64 = 1e-12;
const MATCH_AMBIGUITY_TOL: f64 = 1e-6;

/// Build an enhanced graph from sampled Hermitian matrices: sorted
/// eigenvalues per vertex, matched across edges by eigenvector-overlap
/// maximization; global consistency of the matching is certified around
/// every mesh cycle.
pub fn ingest_matrix_family(
    sample: &MatrixFamilySample,
    degeneracy_tol: f64,
    policy: FramePolicy,
) -> Result<EnhancedGraph> {
    let mesh = &sample.mesh;
    let n = mesh.vertex_count();
    if sample.matrices.len() != n {
        return Err(Error::Invalid("one matrix per vertex required".into()));
    }
    for (v, m) in sample.matrices.iter().enumerate() {
        let dev = linalg::hermiticity_deviation(m);
        if dev > HERMITICITY_TOL {
            return Err(Error::NonHermitian {
                vertex: v,
                deviation: dev,
            });
        }
    }
    let aux_dim = sample.matrices[0].nrows();
    if sample.matrices.iter().any(|m| m.nrows() != aux_dim) {
        return Err(Error::Invalid("matrix dimensions differ across vertices".into()));
    }

    let decomposed: Vec<(Vec<f64>, Vec<Frame>)> = sample
        .matrices
        .par_iter()
        .map(linalg::hermitian_eig)
        .collect();

    // restrict to the window; the in-window count must be uniform
    let mut per_vertex: Vec<(Vec<f64>, Vec<Frame>)> = Vec::with_capacity(n);
    let mut count = None;
    for (v, (vals, vecs)) in decomposed.into_iter().enumerate() {
        let inside: Vec<usize> = (0..vals.len())
            .filter(|&k| sample.window.contains(vals[k]))
            .collect();
        match count {
            None => count = Some(inside.len()),
            Some(c) if c != inside.len() => {
                return Err(Error::Invalid(format!(
                    "in-window band count changes at vertex {v}: {c} vs {}",
                    inside.len()
                )))
            }
            _ => {}
        }
        let vals_in: Vec<f64> = inside.iter().map(|&k| vals[k]).collect();
        let vecs_in: Vec<Frame> = inside.iter().map(|&k| vecs[k].clone()).collect();
        per_vertex.push((vals_in, vecs_in));
    }
    let band_count = count.unwrap_or(0);
    if band_count == 0 {
        return Err(Error::WindowTooNarrow { found: 0, need: 1 });
    }

    // eigenvector-overlap matching per edge
    let mut edge_matchings: BTreeMap<usize, EdgeMatching> = BTreeMap::new();
    let mut perms: Vec<Vec<usize>> = Vec::with_capacity(mesh.edges().len());
    for (e, &[u, v]) in mesh.edges().iter().enumerate() {
        let score: Vec<Vec<f64>> = (0..band_count)
            .map(|i| {
                (0..band_count)
                    .map(|j| linalg::dot(&per_vertex[u].1[i], &per_vertex[v].1[j]).norm_sqr())
                    .collect()
            })
            .collect();
        let assignment = linalg::best_assignment(&score);
        if band_count > 1 && assignment.score - assignment.runner_up < MATCH_AMBIGUITY_TOL {
            return Err(Error::MatchingAmbiguity {
                u,
                v,
                gap: assignment.score - assignment.runner_up,
            });
        }
        if assignment.perm.iter().enumerate().any(|(i, &j)| i != j) {
            edge_matchings.insert(e, assignment.perm.iter().map(|&j| Some(j)).collect());
        }
        perms.push(assignment.perm);
    }

    // global consistency: relabelings propagated along a spanning tree must
    // agree with every edge's own matching
    let mut relabel: Vec<Option<Vec<usize>>> = vec![None; n];
    relabel[0] = Some((0..band_count).collect());
    let mut queue = std::collections::VecDeque::from([0usize]);
    while let Some(u) = queue.pop_front() {
        let here = relabel[u].clone().unwrap();
        for &w in mesh.neighbors(u) {
            if relabel[w].is_some() {
                continue;
            }
            let e = mesh.edge_id(u, w).unwrap();
            let perm = oriented_perm(&perms[e], mesh.edges()[e], u);
            relabel[w] = Some(here.iter().map(|&g| perm[g]).collect());
            queue.push_back(w);
        }
    }
    for (e, &[u, v]) in mesh.edges().iter().enumerate() {
        let perm = oriented_perm(&perms[e], mesh.edges()[e], u);
        let (ru, rv) = (relabel[u].as_ref().unwrap(), relabel[v].as_ref().unwrap());
        for g in 0..band_count {
            if perm[ru[g]] != rv[g] {
                return Err(Error::LoopInconsistency { u, v });
            }
        }
    }

    let radius = PROXIMITY_FACTOR * degeneracy_tol;
    let mut bands: Vec<Band> = (0..band_count)
        .map(|_| Band {
            values: vec![0.0; n],
            frames: BTreeMap::new(),
        })
        .collect();
    for v in 0..n {
        let (vals, vecs) = &per_vertex[v];
        for k in 0..band_count {
            bands[k].values[v] = vals[k];
            let close_below = k > 0 && vals[k] - vals[k - 1] < radius;
            let close_above = k + 1 < band_count && vals[k + 1] - vals[k] < radius;
            if policy == FramePolicy::All || close_below || close_above {
                bands[k].frames.insert(v, vecs[k].clone());
            }
        }
    }

    EnhancedGraph::new(
        mesh.clone(),
        sample.window,
        bands,
        edge_matchings,
        aux_dim,
        degeneracy_tol,
    )
}

fn oriented_perm(perm: &[usize], edge: [usize; 2], from: usize) -> Vec<usize> {
    if edge[0] == from {
        perm.to_vec()
    } else {
        let mut inv = vec![0usize; perm.len()];
        for (i, &j) in perm.iter().enumerate() {
            inv[j] = i;
        }
        inv
    }
}
