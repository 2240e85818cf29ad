//! JSON file formats: meshes, families, matrix samples, covers, ball
//! regions, deformation scripts and expected-value files. Frames and
//! matrices serialize as interleaved re/im arrays.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cover::{build_nerve, CoverSet, SpectralCover};
use crate::deform::BallRegion;
use crate::error::{Error, Result};
use crate::family::{Band, EnhancedGraph, MatrixFamilySample, SpectralWindow};
use crate::linalg::CMatrix;
use crate::mesh::ParamMesh;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct MeshFile {
    pub positions: Vec<Vec<f64>>,
    pub edges: Vec<[usize; 2]>,
    #[serde(default)]
    pub triangles: Vec<[usize; 3]>,
    #[serde(default)]
    pub tets: Vec<[usize; 4]>,
    #[serde(default)]
    pub fundamental_cycle: Option<Vec<(usize, i32)>>,
    #[serde(default)]
    pub loops: Vec<Vec<usize>>,
}

impl MeshFile {
    pub fn from_mesh(mesh: &ParamMesh) -> Self {
        MeshFile {
            positions: mesh.positions().to_vec(),
            edges: mesh.edges().to_vec(),
            triangles: mesh.triangles().to_vec(),
            tets: mesh.tets().to_vec(),
            fundamental_cycle: mesh.fundamental_cycle().map(|c| c.to_vec()),
            loops: mesh.loops().to_vec(),
        }
    }

    pub fn into_mesh(self) -> Result<ParamMesh> {
        ParamMesh::new(
            self.positions,
            self.edges,
            self.triangles,
            self.tets,
            self.fundamental_cycle,
            self.loops,
        )
    }
}

fn interleave(zs: &[Complex64]) -> Vec<f64> {
    zs.iter().flat_map(|z| [z.re, z.im]).collect()
}

fn deinterleave(xs: &[f64]) -> Result<Vec<Complex64>> {
    if xs.len() % 2 != 0 {
        return Err(Error::Invalid("interleaved array has odd length".into()));
    }
    Ok(xs.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BandFile {
    pub values: Vec<f64>,
    /// vertex → interleaved re/im frame entries
    #[serde(default)]
    pub frames: BTreeMap<usize, Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FamilyFile {
    pub mesh: MeshFile,
    pub window: SpectralWindow,
    pub aux_dim: usize,
    pub degeneracy_tol: f64,
    pub bands: Vec<BandFile>,
    #[serde(default)]
    pub edge_matchings: BTreeMap<usize, Vec<Option<usize>>>,
}

impl FamilyFile {
    pub fn from_family(family: &EnhancedGraph) -> Self {
        FamilyFile {
            mesh: MeshFile::from_mesh(family.mesh()),
            window: family.window(),
            aux_dim: family.aux_dim(),
            degeneracy_tol: family.degeneracy_tol(),
            bands: family
                .bands()
                .iter()
                .map(|b| BandFile {
                    values: b.values.clone(),
                    frames: b.frames.iter().map(|(&v, f)| (v, interleave(f))).collect(),
                })
                .collect(),
            edge_matchings: family.edge_matchings().clone(),
        }
    }

    pub fn into_family(self) -> Result<EnhancedGraph> {
        let mesh = Arc::new(self.mesh.into_mesh()?);
        let bands = self
            .bands
            .into_iter()
            .map(|b| {
                let frames = b
                    .frames
                    .into_iter()
                    .map(|(v, xs)| Ok((v, deinterleave(&xs)?)))
                    .collect::<Result<BTreeMap<_, _>>>()?;
                Ok(Band {
                    values: b.values,
                    frames,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        EnhancedGraph::new(
            mesh,
            self.window,
            bands,
            self.edge_matchings,
            self.aux_dim,
            self.degeneracy_tol,
        )
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixSampleFile {
    pub mesh: MeshFile,
    pub window: SpectralWindow,
    /// one row-major interleaved n×n matrix per vertex
    pub matrices: Vec<Vec<f64>>,
}

impl MatrixSampleFile {
    pub fn from_sample(sample: &MatrixFamilySample) -> Self {
        MatrixSampleFile {
            mesh: MeshFile::from_mesh(&sample.mesh),
            window: sample.window,
            matrices: sample
                .matrices
                .iter()
                .map(|m| {
                    let n = m.nrows();
                    let mut out = Vec::with_capacity(2 * n * n);
                    for r in 0..n {
                        for c in 0..n {
                            out.push(m[(r, c)].re);
                            out.push(m[(r, c)].im);
                        }
                    }
                    out
                })
                .collect(),
        }
    }

    pub fn into_sample(self) -> Result<MatrixFamilySample> {
        let mesh = Arc::new(self.mesh.into_mesh()?);
        let matrices = self
            .matrices
            .into_iter()
            .map(|xs| {
                let zs = deinterleave(&xs)?;
                let n = (zs.len() as f64).sqrt() as usize;
                if n * n != zs.len() {
                    return Err(Error::Invalid("matrix entries are not square".into()));
                }
                Ok(CMatrix::from_fn(n, n, |r, c| zs[r * n + c]))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(MatrixFamilySample {
            mesh,
            matrices,
            window: self.window,
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoverSetFile {
    pub vertices: Vec<usize>,
    pub level: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoverFile {
    pub sets: Vec<CoverSetFile>,
    pub assignment: Vec<usize>,
    pub gap_margin: f64,
    /// nerve simplices by dimension, ascending index tuples
    pub nerve: Vec<Vec<Vec<usize>>>,
}

impl CoverFile {
    pub fn from_cover(cover: &SpectralCover) -> Self {
        CoverFile {
            sets: cover
                .sets
                .iter()
                .map(|s| CoverSetFile {
                    vertices: s.vertices.iter().cloned().collect(),
                    level: s.level,
                })
                .collect(),
            assignment: cover.assignment.clone(),
            gap_margin: cover.gap_margin,
            nerve: (0..4)
                .map(|d| {
                    cover
                        .nerve
                        .simplices(d)
                        .iter()
                        .map(|s| s.verts.clone())
                        .collect()
                })
                .collect(),
        }
    }

    /// Rebuild the cover; the stored nerve must agree with the recomputed
    /// one.
    pub fn into_cover(self, mesh: &ParamMesh) -> Result<SpectralCover> {
        let sets: Vec<CoverSet> = self
            .sets
            .into_iter()
            .map(|s| CoverSet {
                vertices: s.vertices.into_iter().collect(),
                level: s.level,
            })
            .collect();
        let nerve = build_nerve(mesh, &sets);
        for (d, stored) in self.nerve.iter().enumerate() {
            let rebuilt: Vec<Vec<usize>> =
                nerve.simplices(d).iter().map(|s| s.verts.clone()).collect();
            if *stored != rebuilt {
                return Err(Error::CoverInvalid(format!(
                    "stored nerve disagrees with the recomputed one in dimension {d}"
                )));
            }
        }
        Ok(SpectralCover {
            sets,
            assignment: self.assignment,
            nerve,
            gap_margin: self.gap_margin,
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BallFile {
    pub vertices: Vec<usize>,
    pub inner: Vec<usize>,
}

impl BallFile {
    pub fn from_ball(ball: &BallRegion) -> Self {
        BallFile {
            vertices: ball.vertices.iter().cloned().collect(),
            inner: ball.inner.iter().cloned().collect(),
        }
    }

    pub fn into_ball(self, mesh: &ParamMesh) -> Result<BallRegion> {
        BallRegion::new(
            mesh,
            self.vertices.into_iter().collect(),
            self.inner.into_iter().collect(),
        )
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum MoveFile {
    Flatten {
        band: usize,
        value: f64,
    },
    Scale {
        bands: Vec<usize>,
        #[serde(default)]
        eps: Option<f64>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScriptFile {
    pub moves: Vec<MoveFile>,
}

/// Expected invariants for the `verify` subcommand.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ExpectedFile {
    #[serde(default)]
    pub sf_loops: Option<Vec<i64>>,
    #[serde(default)]
    pub dd: Option<i64>,
    #[serde(default)]
    pub berry: Option<i64>,
    #[serde(default)]
    pub clutching: Option<i64>,
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &std::path::Path) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

pub fn write_json<T: Serialize>(path: &std::path::Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    std::fs::write(path, text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::SpectralWindow;
    use crate::models::{circle_mesh, winding_family};

    #[test]
    fn family_roundtrip_is_byte_identical() {
        let mesh = Arc::new(circle_mesh(16));
        let fam = winding_family(mesh, 2, SpectralWindow { lo: -4.2, hi: 4.2 }).unwrap();
        let file = FamilyFile::from_family(&fam);
        let text1 = serde_json::to_string_pretty(&file).unwrap();
        let parsed: FamilyFile = serde_json::from_str(&text1).unwrap();
        let reparsed = parsed.clone().into_family().unwrap();
        let text2 = serde_json::to_string_pretty(&FamilyFile::from_family(&reparsed)).unwrap();
        assert_eq!(text1, text2);
    }
}
