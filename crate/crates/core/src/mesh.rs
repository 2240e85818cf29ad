//! Oriented simplicial complexes modeling the parameter manifold.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap, HashMap, HashSet, VecDeque};
use std::sync::Arc;

use crate::error::{Error, Result};

/// Oriented simplicial complex with model coordinates, simplices up to
/// dimension 3, an optional fundamental 3-cycle and optional representative
/// 1-cycles.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamMesh {
    positions: Vec<Vec<f64>>,
    edges: Vec<[usize; 2]>,
    triangles: Vec<[usize; 3]>,
    tets: Vec<[usize; 4]>,
    fundamental_cycle: Option<Vec<(usize, i32)>>,
    loops: Vec<Vec<usize>>,
    neighbors: Vec<Vec<usize>>,
    edge_index: HashMap<[usize; 2], usize>,
}

fn sorted2(a: usize, b: usize) -> [usize; 2] {
    if a < b {
        [a, b]
    } else {
        [b, a]
    }
}

fn sorted3(t: [usize; 3]) -> [usize; 3] {
    let mut s = t;
    s.sort_unstable();
    s
}

/// Parity of the permutation sorting `v`, as +1/-1. Returns 0 on repeats.
pub fn sort_sign<const N: usize>(v: [usize; N]) -> i32 {
    let mut s = v;
    let mut sign = 1i32;
    for i in 0..N {
        for j in (i + 1)..N {
            if s[i] == s[j] {
                return 0;
            }
            if s[i] > s[j] {
                s.swap(i, j);
                sign = -sign;
            }
        }
    }
    sign
}

impl ParamMesh {
    pub fn new(
        positions: Vec<Vec<f64>>,
        edges: Vec<[usize; 2]>,
        triangles: Vec<[usize; 3]>,
        tets: Vec<[usize; 4]>,
        fundamental_cycle: Option<Vec<(usize, i32)>>,
        loops: Vec<Vec<usize>>,
    ) -> Result<Self> {
        let n = positions.len();
        let mut neighbors = vec![Vec::new(); n];
        let mut edge_index = HashMap::new();
        for (id, e) in edges.iter().enumerate() {
            if e[0] >= n || e[1] >= n || e[0] == e[1] {
                return Err(Error::Mesh(format!("bad edge {:?}", e)));
            }
            let key = sorted2(e[0], e[1]);
            if edge_index.insert(key, id).is_some() {
                return Err(Error::Mesh(format!("duplicate edge {:?}", e)));
            }
            neighbors[e[0]].push(e[1]);
            neighbors[e[1]].push(e[0]);
        }
        for nb in &mut neighbors {
            nb.sort_unstable();
        }
        let mesh = ParamMesh {
            positions,
            edges,
            triangles,
            tets,
            fundamental_cycle,
            loops,
            neighbors,
            edge_index,
        };
        mesh.validate()?;
        Ok(mesh)
    }

    pub fn vertex_count(&self) -> usize {
        self.positions.len()
    }

    pub fn positions(&self) -> &[Vec<f64>] {
        &self.positions
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn tets(&self) -> &[[usize; 4]] {
        &self.tets
    }

    pub fn fundamental_cycle(&self) -> Option<&[(usize, i32)]> {
        self.fundamental_cycle.as_deref()
    }

    pub fn loops(&self) -> &[Vec<usize>] {
        &self.loops
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.neighbors[v]
    }

    pub fn edge_id(&self, u: usize, v: usize) -> Option<usize> {
        self.edge_index.get(&sorted2(u, v)).copied()
    }

    pub fn edge_length(&self, id: usize) -> f64 {
        let [u, v] = self.edges[id];
        self.positions[u]
            .iter()
            .zip(&self.positions[v])
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    fn validate(&self) -> Result<()> {
        let n = self.vertex_count();
        if n == 0 {
            return Err(Error::Mesh("empty mesh".into()));
        }
        let dim = self.positions[0].len();
        for (v, p) in self.positions.iter().enumerate() {
            if p.len() != dim {
                return Err(Error::Mesh(format!("inconsistent coordinate dim at {v}")));
            }
            if p.iter().any(|x| !x.is_finite()) {
                return Err(Error::Mesh(format!("non-finite coordinate at {v}")));
            }
        }
        // face closure
        for t in &self.triangles {
            for (a, b) in [(t[0], t[1]), (t[0], t[2]), (t[1], t[2])] {
                if self.edge_id(a, b).is_none() {
                    return Err(Error::Mesh(format!(
                        "triangle {:?} misses edge ({a}, {b})",
                        t
                    )));
                }
            }
        }
        let tri_set: HashSet<[usize; 3]> =
            self.triangles.iter().map(|t| sorted3(*t)).collect();
        if tri_set.len() != self.triangles.len() {
            return Err(Error::Mesh("duplicate triangle".into()));
        }
        for t in &self.tets {
            for skip in 0..4 {
                let mut f = [0usize; 3];
                let mut k = 0;
                for (i, &v) in t.iter().enumerate() {
                    if i != skip {
                        f[k] = v;
                        k += 1;
                    }
                }
                if !tri_set.contains(&sorted3(f)) {
                    return Err(Error::Mesh(format!("tet {:?} misses face {:?}", t, f)));
                }
            }
        }
        // connected 1-skeleton
        if self.component_of(0).len() != n {
            return Err(Error::Mesh("1-skeleton is not connected".into()));
        }
        // fundamental cycle closes
        if let Some(fc) = &self.fundamental_cycle {
            let boundary = self.tet_chain_boundary(fc);
            if let Some((key, coeff)) = boundary.iter().find(|(_, &c)| c != 0) {
                return Err(Error::Mesh(format!(
                    "fundamental cycle has boundary {coeff} on triangle {:?}",
                    key
                )));
            }
        }
        // loops walk along edges
        for lp in &self.loops {
            if lp.len() < 3 {
                return Err(Error::Mesh("loop too short".into()));
            }
            for i in 0..lp.len() {
                let (u, v) = (lp[i], lp[(i + 1) % lp.len()]);
                if self.edge_id(u, v).is_none() {
                    return Err(Error::Mesh(format!("loop uses missing edge ({u}, {v})")));
                }
            }
        }
        Ok(())
    }

    /// Boundary of a signed tet chain, keyed by sorted triangle.
    pub fn tet_chain_boundary(&self, chain: &[(usize, i32)]) -> BTreeMap<[usize; 3], i64> {
        let mut boundary: BTreeMap<[usize; 3], i64> = BTreeMap::new();
        for &(tid, coeff) in chain {
            let t = self.tets[tid];
            for skip in 0..4 {
                let mut f = [0usize; 3];
                let mut k = 0;
                for (i, &v) in t.iter().enumerate() {
                    if i != skip {
                        f[k] = v;
                        k += 1;
                    }
                }
                let parity = if skip % 2 == 0 { 1 } else { -1 };
                let sign = sort_sign(f) * parity;
                *boundary.entry(sorted3(f)).or_insert(0) += (coeff * sign) as i64;
            }
        }
        boundary.retain(|_, c| *c != 0);
        boundary
    }

    fn component_of(&self, start: usize) -> Vec<usize> {
        let mut seen = vec![false; self.vertex_count()];
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        let mut out = Vec::new();
        while let Some(v) = queue.pop_front() {
            out.push(v);
            for &w in self.neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        out
    }

    /// Connected components of the subcomplex induced by `verts`,
    /// each sorted ascending; components ordered by smallest member.
    pub fn components_within(&self, verts: &BTreeSet<usize>) -> Vec<Vec<usize>> {
        let mut seen: HashSet<usize> = HashSet::new();
        let mut components = Vec::new();
        for &start in verts {
            if seen.contains(&start) {
                continue;
            }
            let mut comp = Vec::new();
            let mut queue = VecDeque::from([start]);
            seen.insert(start);
            while let Some(v) = queue.pop_front() {
                comp.push(v);
                for &w in self.neighbors(v) {
                    if verts.contains(&w) && !seen.contains(&w) {
                        seen.insert(w);
                        queue.push_back(w);
                    }
                }
            }
            comp.sort_unstable();
            components.push(comp);
        }
        components
    }

    /// Multi-source Dijkstra over the 1-skeleton with Euclidean edge lengths.
    pub fn distances_from(&self, sources: &BTreeSet<usize>) -> Vec<f64> {
        let mut dist = vec![f64::INFINITY; self.vertex_count()];
        let mut heap: BinaryHeap<Reverse<(u64, usize)>> = BinaryHeap::new();
        for &s in sources {
            dist[s] = 0.0;
            heap.push(Reverse((0, s)));
        }
        while let Some(Reverse((dbits, v))) = heap.pop() {
            let d = f64::from_bits(dbits);
            if d > dist[v] {
                continue;
            }
            for &w in self.neighbors(v) {
                let id = self.edge_id(v, w).unwrap();
                let cand = d + self.edge_length(id);
                if cand < dist[w] {
                    dist[w] = cand;
                    heap.push(Reverse((cand.to_bits(), w)));
                }
            }
        }
        dist
    }

    /// Shrink a vertex set until the solid it induces has a clean boundary:
    /// no isolated vertices, no non-manifold boundary edges, no pinch
    /// vertices whose boundary link is disconnected.
    pub fn regularize_solid(&self, set: &BTreeSet<usize>) -> BTreeSet<usize> {
        let mut set = set.clone();
        for _ in 0..64 {
            let tets_in: Vec<&[usize; 4]> = self
                .tets
                .iter()
                .filter(|t| t.iter().all(|v| set.contains(v)))
                .collect();
            let mut in_solid: HashSet<usize> = HashSet::new();
            for t in &tets_in {
                in_solid.extend(t.iter());
            }
            // boundary faces: odd-count faces of the in-set tets
            let mut face_count: HashMap<[usize; 3], usize> = HashMap::new();
            for t in &tets_in {
                for skip in 0..4 {
                    let mut f = [0usize; 3];
                    let mut k = 0;
                    for (i, &v) in t.iter().enumerate() {
                        if i != skip {
                            f[k] = v;
                            k += 1;
                        }
                    }
                    *face_count.entry(sorted3(f)).or_insert(0) += 1;
                }
            }
            let boundary: Vec<[usize; 3]> = face_count
                .iter()
                .filter(|(_, &c)| c == 1)
                .map(|(f, _)| *f)
                .collect();
            let mut bad: BTreeSet<usize> = set
                .iter()
                .cloned()
                .filter(|v| !in_solid.contains(v))
                .collect();
            let mut edge_count: HashMap<[usize; 2], usize> = HashMap::new();
            let mut link: HashMap<usize, Vec<[usize; 2]>> = HashMap::new();
            for t in &boundary {
                for (a, b) in [(t[0], t[1]), (t[0], t[2]), (t[1], t[2])] {
                    *edge_count.entry(sorted2(a, b)).or_insert(0) += 1;
                }
                link.entry(t[0]).or_default().push(sorted2(t[1], t[2]));
                link.entry(t[1]).or_default().push(sorted2(t[0], t[2]));
                link.entry(t[2]).or_default().push(sorted2(t[0], t[1]));
            }
            for (e, c) in &edge_count {
                if *c != 2 {
                    bad.extend(e.iter());
                }
            }
            for (&v, edges) in &link {
                // the boundary link of v must be a single cycle
                let mut adj: HashMap<usize, Vec<usize>> = HashMap::new();
                for e in edges {
                    adj.entry(e[0]).or_default().push(e[1]);
                    adj.entry(e[1]).or_default().push(e[0]);
                }
                let start = *adj.keys().next().unwrap();
                let mut seen: HashSet<usize> = [start].into();
                let mut queue = VecDeque::from([start]);
                while let Some(u) = queue.pop_front() {
                    for &w in &adj[&u] {
                        if seen.insert(w) {
                            queue.push_back(w);
                        }
                    }
                }
                if seen.len() != adj.len() {
                    bad.insert(v);
                }
            }
            if bad.is_empty() {
                return set;
            }
            for v in bad {
                set.remove(&v);
            }
        }
        set
    }

    /// Oriented boundary surface of the tets induced by a vertex set, with
    /// orientation inherited from the fundamental cycle. Errors unless the
    /// result is a closed connected surface with Euler characteristic 2.
    pub fn boundary_sphere(&self, ball: &BTreeSet<usize>) -> Result<Vec<[usize; 3]>> {
        let fc = self
            .fundamental_cycle
            .as_ref()
            .ok_or_else(|| Error::Mesh("mesh carries no fundamental 3-cycle".into()))?;
        let chain: Vec<(usize, i32)> = fc
            .iter()
            .filter(|(tid, _)| self.tets[*tid].iter().all(|v| ball.contains(v)))
            .cloned()
            .collect();
        if chain.is_empty() {
            return Err(Error::Mesh("ball contains no tets".into()));
        }
        if chain.len() == fc.len() {
            return Err(Error::Mesh("ball swallows the whole mesh".into()));
        }
        let boundary = self.tet_chain_boundary(&chain);
        let mut tris = Vec::new();
        for (key, coeff) in &boundary {
            match coeff {
                1 => tris.push(*key),
                -1 => tris.push([key[0], key[2], key[1]]),
                _ => {
                    return Err(Error::Mesh(format!(
                        "boundary coefficient {coeff} on {:?}",
                        key
                    )))
                }
            }
        }
        // closed surface checks
        let mut edge_count: HashMap<[usize; 2], usize> = HashMap::new();
        let mut verts: BTreeSet<usize> = BTreeSet::new();
        for t in &tris {
            verts.extend(t.iter());
            for (a, b) in [(t[0], t[1]), (t[0], t[2]), (t[1], t[2])] {
                *edge_count.entry(sorted2(a, b)).or_insert(0) += 1;
            }
        }
        if edge_count.values().any(|&c| c != 2) {
            return Err(Error::Mesh("boundary surface is not closed".into()));
        }
        let euler = verts.len() as i64 - edge_count.len() as i64 + tris.len() as i64;
        if euler != 2 {
            return Err(Error::Mesh(format!(
                "boundary surface has Euler characteristic {euler}, expected 2"
            )));
        }
        if self.components_within(&verts).len() != 1 {
            return Err(Error::Mesh("boundary surface is disconnected".into()));
        }
        Ok(tris)
    }
}

/// Simplicial map between meshes, given by its action on vertices.
#[derive(Debug, Clone)]
pub struct SimplicialMap {
    pub source: Arc<ParamMesh>,
    pub target: Arc<ParamMesh>,
    pub vertex_map: Vec<usize>,
}

impl SimplicialMap {
    pub fn new(source: Arc<ParamMesh>, target: Arc<ParamMesh>, vertex_map: Vec<usize>) -> Result<Self> {
        if vertex_map.len() != source.vertex_count() {
            return Err(Error::Invalid("vertex map length mismatch".into()));
        }
        if let Some(&bad) = vertex_map.iter().find(|&&v| v >= target.vertex_count()) {
            return Err(Error::Invalid(format!("vertex image {bad} out of range")));
        }
        for e in source.edges() {
            let (fu, fv) = (vertex_map[e[0]], vertex_map[e[1]]);
            if fu != fv && target.edge_id(fu, fv).is_none() {
                return Err(Error::NotSimplicial {
                    u: e[0],
                    v: e[1],
                    fu,
                    fv,
                });
            }
        }
        Ok(SimplicialMap {
            source,
            target,
            vertex_map,
        })
    }

    pub fn identity(mesh: Arc<ParamMesh>) -> Self {
        let n = mesh.vertex_count();
        SimplicialMap {
            source: mesh.clone(),
            target: mesh,
            vertex_map: (0..n).collect(),
        }
    }

    pub fn apply(&self, v: usize) -> usize {
        self.vertex_map[v]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{circle_mesh, s3_sphere};

    #[test]
    fn circle_is_valid_and_connected() {
        let m = circle_mesh(8);
        assert_eq!(m.vertex_count(), 8);
        assert_eq!(m.edges().len(), 8);
        assert_eq!(m.loops().len(), 1);
    }

    #[test]
    fn fundamental_cycle_closes_on_s3() {
        let geom = s3_sphere(1);
        let fc = geom.mesh.fundamental_cycle().unwrap();
        assert_eq!(fc.len(), 40);
        let boundary = geom.mesh.tet_chain_boundary(fc);
        assert!(boundary.is_empty());
    }

    #[test]
    fn boundary_sphere_of_ball_is_closed() {
        let geom = s3_sphere(2);
        let dist = geom
            .mesh
            .distances_from(&BTreeSet::from([geom.marked]));
        let ball: BTreeSet<usize> = (0..geom.mesh.vertex_count())
            .filter(|&v| dist[v] <= 1.0)
            .collect();
        let tris = geom.mesh.boundary_sphere(&ball).unwrap();
        assert!(tris.len() > 4);
    }

    #[test]
    fn non_simplicial_map_rejected() {
        let m = Arc::new(circle_mesh(8));
        let bad: Vec<usize> = (0..8).map(|v| (2 * v) % 8).collect();
        assert!(SimplicialMap::new(m.clone(), m.clone(), bad).is_err());
        let rot: Vec<usize> = (0..8).map(|v| (v + 1) % 8).collect();
        assert!(SimplicialMap::new(m.clone(), m, rot).is_ok());
    }
}
