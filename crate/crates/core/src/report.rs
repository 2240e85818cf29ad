//! Invariant reports: the full pipeline run on one family, with oracle
//! cross-checks, certificates and tolerances. Reports are pure functions
//! of their inputs up to the timing block.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::cover::{pushforward_fundamental, pushforward_loop, SpectralCover};
use crate::deform::{clutching_degree, BallRegion};
use crate::error::Result;
use crate::family::EnhancedGraph;
use crate::gerbe::{berry_chern_oracle, build_gerbe_cocycle, dd_pair, GaugeOptions};
use crate::io::{ExpectedFile, FamilyFile};
use crate::spectral_flow::{build_sf_cocycle, crossing_oracle, evaluate_on_loop, oracle_levels};

/// FNV-1a over the canonical serialization, doubled with distinct offset
/// bases for a 128-bit hex fingerprint.
pub fn fingerprint(family: &EnhancedGraph) -> String {
    let canonical =
        serde_json::to_string(&FamilyFile::from_family(family)).expect("family serializes");
    let fnv = |offset: u64| -> u64 {
        let mut h = offset;
        for b in canonical.as_bytes() {
            h ^= *b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
        h
    };
    format!("{:016x}{:016x}", fnv(0xcbf29ce484222325), fnv(0x9e3779b97f4a7c15))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SfReport {
    /// (i, j, c(i,j)) on nerve edges.
    pub cocycle: Vec<(usize, usize, i64)>,
    pub loop_evaluations: Vec<i64>,
    /// crossing-oracle counts per loop per probed level
    pub oracle_values: Vec<Vec<i64>>,
    pub oracle_levels: Vec<Vec<f64>>,
    pub matches_oracle: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GerbeReport {
    pub dd_pair: i64,
    pub berry: Option<i64>,
    pub clutching: Option<i64>,
    pub max_lift_residual: f64,
    pub max_coboundary_residual: f64,
    pub section_min_singular: f64,
    pub max_witness_jump: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Tolerances {
    pub degeneracy_tol: f64,
    pub gap_margin: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InvariantReport {
    pub fingerprint: String,
    pub vertex_count: usize,
    pub band_count: usize,
    pub tolerances: Tolerances,
    pub sf: Option<SfReport>,
    pub gerbe: Option<GerbeReport>,
    /// wall-clock timings; excluded from determinism guarantees
    pub timings_ms: BTreeMap<String, f64>,
}

/// Run the full invariant suite: spectral flow over the mesh's recorded
/// loops with the crossing oracle at three levels each, and, on 3-manifolds,
/// the gerbe pairing with the Berry/clutching cross-checks over a supplied
/// ball.
pub fn invariant_report(
    family: &EnhancedGraph,
    cover: &SpectralCover,
    ball: Option<&BallRegion>,
    pair: Option<(usize, usize)>,
) -> Result<InvariantReport> {
    let mut timings = BTreeMap::new();

    let t = Instant::now();
    let (sf_cochain, _) = build_sf_cocycle(family, cover)?;
    let mut loop_evaluations = Vec::new();
    let mut oracle_values = Vec::new();
    let mut levels_used = Vec::new();
    for mesh_loop in family.mesh().loops() {
        let nerve_loop = pushforward_loop(cover, mesh_loop)?;
        loop_evaluations.push(evaluate_on_loop(cover, &sf_cochain, &nerve_loop)?);
        let levels = oracle_levels(family, mesh_loop, 3);
        let counts = levels
            .iter()
            .map(|&l| crossing_oracle(family, mesh_loop, l))
            .collect::<Result<Vec<_>>>()?;
        oracle_values.push(counts);
        levels_used.push(levels);
    }
    let matches_oracle = loop_evaluations
        .iter()
        .zip(&oracle_values)
        .all(|(e, os)| os.iter().all(|o| o == e));
    let cocycle = cover
        .nerve
        .simplices(1)
        .iter()
        .enumerate()
        .map(|(id, s)| (s.verts[0], s.verts[1], sf_cochain.get(id)))
        .collect();
    timings.insert("sf_ms".into(), t.elapsed().as_secs_f64() * 1e3);
    let sf = Some(SfReport {
        cocycle,
        loop_evaluations,
        oracle_values,
        oracle_levels: levels_used,
        matches_oracle,
    });

    let gerbe = if family.mesh().fundamental_cycle().is_some() {
        let t = Instant::now();
        let gc = build_gerbe_cocycle(family, cover, &GaugeOptions::default())?;
        let fclass = pushforward_fundamental(cover, family.mesh())?;
        let dd = dd_pair(cover, &gc, &fclass)?;
        let (berry, clutching) = match (ball, pair) {
            (Some(ball), Some(pair)) => (
                Some(berry_chern_oracle(family, &ball.boundary, pair.0)?),
                Some(clutching_degree(family, ball, pair)?),
            ),
            _ => (None, None),
        };
        timings.insert("gerbe_ms".into(), t.elapsed().as_secs_f64() * 1e3);
        Some(GerbeReport {
            dd_pair: dd,
            berry,
            clutching,
            max_lift_residual: gc.certificates.max_lift_residual,
            max_coboundary_residual: gc.certificates.max_coboundary_residual,
            section_min_singular: gc.certificates.section_min_singular,
            max_witness_jump: gc.certificates.max_witness_jump,
        })
    } else {
        None
    };

    Ok(InvariantReport {
        fingerprint: fingerprint(family),
        vertex_count: family.mesh().vertex_count(),
        band_count: family.band_count(),
        tolerances: Tolerances {
            degeneracy_tol: family.degeneracy_tol(),
            gap_margin: cover.gap_margin,
        },
        sf,
        gerbe,
        timings_ms: timings,
    })
}

/// Compare a report against expected values; returns human-readable
/// failure lines, empty when everything matches.
pub fn verify_against(report: &InvariantReport, expected: &ExpectedFile) -> Vec<String> {
    let mut failures = Vec::new();
    if let Some(sf) = &report.sf {
        if !sf.matches_oracle {
            failures.push("spectral flow disagrees with the crossing oracle".into());
        }
        if let Some(want) = &expected.sf_loops {
            if sf.loop_evaluations != *want {
                failures.push(format!(
                    "sf loop evaluations {:?} != expected {:?}",
                    sf.loop_evaluations, want
                ));
            }
        }
    } else if expected.sf_loops.is_some() {
        failures.push("expected spectral flow but none was computed".into());
    }
    match (&report.gerbe, expected.dd) {
        (Some(g), Some(want)) if g.dd_pair != want => {
            failures.push(format!("dd pairing {} != expected {}", g.dd_pair, want));
        }
        (None, Some(_)) => failures.push("expected a dd pairing but none was computed".into()),
        _ => {}
    }
    if let (Some(g), Some(want)) = (&report.gerbe, expected.berry) {
        if g.berry != Some(want) {
            failures.push(format!("berry oracle {:?} != expected {}", g.berry, want));
        }
    }
    if let (Some(g), Some(want)) = (&report.gerbe, expected.clutching) {
        if g.clutching != Some(want) {
            failures.push(format!(
                "clutching degree {:?} != expected {}",
                g.clutching, want
            ));
        }
    }
    if let Some(g) = &report.gerbe {
        if let (Some(b), Some(c)) = (g.berry, g.clutching) {
            if b != c {
                failures.push(format!("berry {b} != clutching {c}"));
            }
        }
        if g.dd_pair != 0 || g.clutching.is_some() {
            if let Some(c) = g.clutching {
                if c != g.dd_pair {
                    failures.push(format!(
                        "clutching {c} != dd pairing {} (Poincaré-dual consistency)",
                        g.dd_pair
                    ));
                }
            }
        }
    }
    failures
}
