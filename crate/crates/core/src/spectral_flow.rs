//! The spectral-flow class: essential-codimension Čech 1-cocycle, loop
//! evaluation, and an independent crossing-count oracle.

use crate::cochain::Cochain;
use crate::cover::SpectralCover;
use crate::error::{Error, Result};
use crate::family::EnhancedGraph;

/// Global orientation fixed so that the winding family with w = +1 has
/// flow +1 along the circle traversed in increasing θ. Frozen by the
/// golden tests against the crossing oracle.
const SF_ORIENTATION: i64 = -1;

/// Signed count of band values strictly between the two levels at a witness
/// vertex: ec(Pᵢ, Pⱼ) = rank(Pᵢ) − rank(Pⱼ) relatively, positive when
/// λⱼ > λᵢ. Errors when a band value sits within the gap margin of either
/// level.
pub fn essential_codimension(
    family: &EnhancedGraph,
    cover: &SpectralCover,
    i: usize,
    j: usize,
    vertex: usize,
) -> Result<i64> {
    let li = cover.sets[i].level;
    let lj = cover.sets[j].level;
    ec_at(family, li, lj, vertex, cover.gap_margin)
}

fn ec_at(family: &EnhancedGraph, li: f64, lj: f64, vertex: usize, margin: f64) -> Result<i64> {
    let lo = li.min(lj);
    let hi = li.max(lj);
    let mut count = 0i64;
    for k in 0..family.band_count() {
        let v = family.value(k, vertex);
        if (v - li).abs() <= margin || (v - lj).abs() <= margin {
            return Err(Error::GapViolation {
                vertex,
                value: v,
                level: if (v - li).abs() <= margin { li } else { lj },
                margin,
            });
        }
        if lo < v && v < hi {
            count += 1;
        }
    }
    Ok(if lj > li { count } else { -count })
}

#[derive(Debug, Clone, Default)]
pub struct SfCertificates {
    /// Nerve 2-simplices on which the cocycle identity was verified.
    pub cocycle_checks: usize,
    /// Overlap components on which ec constancy was verified.
    pub constancy_checks: usize,
}

/// The essential-codimension 1-cocycle c(i, j) on the nerve. The value is
/// computed at every witness component of each overlap and must agree
/// across them; the cocycle identity c(i,j) + c(j,k) = c(i,k) is verified
/// exactly on every nerve 2-simplex.
pub fn build_sf_cocycle(
    family: &EnhancedGraph,
    cover: &SpectralCover,
) -> Result<(Cochain<i64>, SfCertificates)> {
    let mut cochain = Cochain::new(1);
    let mut certs = SfCertificates::default();
    for (id, simplex) in cover.nerve.simplices(1).iter().enumerate() {
        let (i, j) = (simplex.verts[0], simplex.verts[1]);
        let mut value: Option<i64> = None;
        for comp in &simplex.components {
            let witness = comp[0];
            let ec = essential_codimension(family, cover, i, j, witness)?;
            match value {
                None => value = Some(ec),
                Some(prev) if prev != ec => {
                    return Err(Error::WitnessDisagreement {
                        i,
                        j,
                        a: prev,
                        b: ec,
                    })
                }
                _ => {}
            }
            certs.constancy_checks += 1;
        }
        cochain.values.insert(id, value.unwrap_or(0));
    }
    // Prop: c is a cocycle — verified on every 2-simplex at its witness
    for simplex in cover.nerve.simplices(2) {
        let (i, j, k) = (simplex.verts[0], simplex.verts[1], simplex.verts[2]);
        let x = simplex.witness;
        let cij = essential_codimension(family, cover, i, j, x)?;
        let cjk = essential_codimension(family, cover, j, k, x)?;
        let cik = essential_codimension(family, cover, i, k, x)?;
        if cij + cjk != cik {
            return Err(Error::CocycleIdentity {
                simplex: simplex.verts.clone(),
            });
        }
        // the stored edge values agree with the witness values
        for (pair, expected) in [([i, j], cij), ([j, k], cjk), ([i, k], cik)] {
            let id = cover.nerve.simplex_id(&pair).unwrap();
            if cochain.get(id) != expected {
                return Err(Error::WitnessDisagreement {
                    i: pair[0],
                    j: pair[1],
                    a: cochain.get(id),
                    b: expected,
                });
            }
        }
        certs.cocycle_checks += 1;
    }
    Ok((cochain, certs))
}

/// Evaluate a degree-1 integer cochain along a closed nerve loop, with the
/// calibrated global orientation. Cohomologous cocycles give equal values.
pub fn evaluate_on_loop(
    cover: &SpectralCover,
    cochain: &Cochain<i64>,
    nerve_loop: &[usize],
) -> Result<i64> {
    if nerve_loop.is_empty() {
        return Err(Error::NotALoop);
    }
    let mut sum = 0i64;
    for t in 0..nerve_loop.len() {
        let (a, b) = (nerve_loop[t], nerve_loop[(t + 1) % nerve_loop.len()]);
        if a == b {
            continue;
        }
        sum += cochain.eval(&cover.nerve, &[a, b])?;
    }
    Ok(SF_ORIENTATION * sum)
}

/// Net signed count of band crossings of a level along a mesh loop, using
/// linear interpolation on edges. Band continuation across each edge follows
/// the stored matchings, which handles the winding family's seam relabeling.
pub fn crossing_oracle(family: &EnhancedGraph, mesh_loop: &[usize], level: f64) -> Result<i64> {
    if mesh_loop.len() < 2 {
        return Err(Error::NotALoop);
    }
    let margin = 1e-9;
    for &v in mesh_loop {
        for k in 0..family.band_count() {
            if (family.value(k, v) - level).abs() <= margin {
                return Err(Error::GapViolation {
                    vertex: v,
                    value: family.value(k, v),
                    level,
                    margin,
                });
            }
        }
    }
    let mut flow = 0i64;
    for t in 0..mesh_loop.len() {
        let (u, v) = (mesh_loop[t], mesh_loop[(t + 1) % mesh_loop.len()]);
        if u == v {
            continue;
        }
        for (i, j) in family.matched_pairs(u, v)? {
            let a = family.value(i, u);
            let b = family.value(j, v);
            if a < level && level < b {
                flow += 1;
            } else if b < level && level < a {
                flow -= 1;
            }
        }
    }
    Ok(flow)
}

/// Levels usable by the crossing oracle along a loop: spaced through the
/// admissible zone, avoiding all band values at loop vertices.
pub fn oracle_levels(family: &EnhancedGraph, mesh_loop: &[usize], count: usize) -> Vec<f64> {
    let (zlo, zhi) = family.level_zone();
    let mut out = Vec::new();
    let samples = 4 * count.max(1) + 3;
    for s in 0..samples {
        let level = zlo + (zhi - zlo) * (s as f64 + 0.5) / samples as f64;
        let ok = mesh_loop.iter().all(|&v| {
            (0..family.band_count()).all(|k| (family.value(k, v) - level).abs() > 1e-3)
        });
        if ok {
            out.push(level);
            if out.len() == count {
                break;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover::{build_cover, pushforward_loop, CoverStrategy, DEFAULT_GAP_MARGIN};
    use crate::family::SpectralWindow;
    use crate::models::{circle_mesh, constant_family, winding_family};
    use std::sync::Arc;

    fn winding_setup(w: i64) -> (EnhancedGraph, SpectralCover) {
        let mesh = Arc::new(circle_mesh(64));
        let fam = winding_family(
            mesh,
            w,
            SpectralWindow {
                lo: -3.2 - w.abs() as f64,
                hi: 3.2 + w.abs() as f64,
            },
        )
        .unwrap();
        let cover = build_cover(
            &fam,
            CoverStrategy::Auto {
                max_set_fraction: 1.0 / 3.0,
            },
            DEFAULT_GAP_MARGIN,
        )
        .unwrap();
        (fam, cover)
    }

    #[test]
    fn winding_one_has_flow_one() {
        let (fam, cover) = winding_setup(1);
        let (c, _) = build_sf_cocycle(&fam, &cover).unwrap();
        let nerve_loop = pushforward_loop(&cover, &fam.mesh().loops()[0]).unwrap();
        assert_eq!(evaluate_on_loop(&cover, &c, &nerve_loop).unwrap(), 1);
        assert_eq!(crossing_oracle(&fam, &fam.mesh().loops()[0], 0.4).unwrap(), 1);
    }

    #[test]
    fn crossing_oracle_counts_winding() {
        let mesh = Arc::new(circle_mesh(32));
        for w in [-2i64, 0, 3] {
            let fam = winding_family(
                mesh.clone(),
                w,
                SpectralWindow {
                    lo: -4.2 - w.abs() as f64,
                    hi: 4.2 + w.abs() as f64,
                },
            )
            .unwrap();
            for level in [0.2613, 0.5441, -0.7223] {
                assert_eq!(
                    crossing_oracle(&fam, &mesh.loops()[0], level).unwrap(),
                    w,
                    "w = {w}, level = {level}"
                );
            }
        }
    }

    #[test]
    fn constant_family_has_zero_cocycle() {
        let mesh = Arc::new(circle_mesh(16));
        let fam =
            constant_family(mesh, &[-1.0, 1.0], SpectralWindow { lo: -2.0, hi: 2.0 }).unwrap();
        let cover = build_cover(
            &fam,
            CoverStrategy::Auto {
                max_set_fraction: 1.0 / 3.0,
            },
            DEFAULT_GAP_MARGIN,
        )
        .unwrap();
        let (c, _) = build_sf_cocycle(&fam, &cover).unwrap();
        assert!(c.values.values().all(|&v| v == 0));
        let nerve_loop = pushforward_loop(&cover, &fam.mesh().loops()[0]).unwrap();
        assert_eq!(evaluate_on_loop(&cover, &c, &nerve_loop).unwrap(), 0);
    }

    #[test]
    fn ec_antisymmetric_and_additive() {
        let (fam, cover) = winding_setup(2);
        for simplex in cover.nerve.simplices(2) {
            let (i, j, k) = (simplex.verts[0], simplex.verts[1], simplex.verts[2]);
            let x = simplex.witness;
            let cij = essential_codimension(&fam, &cover, i, j, x).unwrap();
            let cji = essential_codimension(&fam, &cover, j, i, x).unwrap();
            assert_eq!(cij, -cji);
            let cjk = essential_codimension(&fam, &cover, j, k, x).unwrap();
            let cik = essential_codimension(&fam, &cover, i, k, x).unwrap();
            assert_eq!(cij + cjk, cik);
        }
    }

    #[test]
    fn loop_evaluation_invariant_under_coboundary() {
        let (fam, cover) = winding_setup(1);
        let (c, _) = build_sf_cocycle(&fam, &cover).unwrap();
        let nerve_loop = pushforward_loop(&cover, &fam.mesh().loops()[0]).unwrap();
        let base = evaluate_on_loop(&cover, &c, &nerve_loop).unwrap();
        // perturb by the coboundary of a 0-cochain
        let mut b = Cochain::<i64>::new(0);
        for (id, _) in cover.nerve.simplices(0).iter().enumerate() {
            b.values.insert(id, (id as i64 * 7) % 5 - 2);
        }
        let db = b.coboundary(&cover.nerve).unwrap();
        let mut shifted = c.clone();
        for (id, v) in shifted.values.iter_mut() {
            *v += db.get(*id);
        }
        assert_eq!(evaluate_on_loop(&cover, &shifted, &nerve_loop).unwrap(), base);
    }
}
