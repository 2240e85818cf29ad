use cechflow::cover::{pushforward_fundamental, star_cover, DEFAULT_GAP_MARGIN};
use cechflow::gerbe::{build_gerbe_cocycle, dd_pair, berry_chern_oracle, GaugeOptions};
use cechflow::models::*;
use std::collections::BTreeSet;

fn main() {
    let geom = s3_sphere(4);
    let chart = s3_ball_chart(&geom);
    for k in [-2i64, -1, 0, 1, 2] {
        let t0 = std::time::Instant::now();
        let params = MonopoleParams { k, ..Default::default() };
        let fam = monopole_family(geom.mesh.clone(), &chart, &params).unwrap();
        let cover = star_cover(&fam, &geom, 0.125, DEFAULT_GAP_MARGIN).unwrap();
        let gc = match build_gerbe_cocycle(&fam, &cover, &GaugeOptions::default()) {
            Ok(gc) => gc,
            Err(e) => { println!("k = {k}: gerbe FAILED: {e}"); continue; }
        };
        let fclass = pushforward_fundamental(&cover, fam.mesh()).unwrap();
        let dd = dd_pair(&cover, &gc, &fclass).unwrap();
        // berry over a ball boundary at r = 0.8
        let dist: Vec<f64> = chart.radius.clone();
        let ball: BTreeSet<usize> = (0..fam.mesh().vertex_count()).filter(|&v| dist[v] <= 0.8).collect();
        let sphere = fam.mesh().boundary_sphere(&ball).unwrap();
        let lower_idx = fam.bands().iter().position(|b| {
            b.values.iter().all(|v| v.abs() <= params.plateau + 1e-9)
        }).unwrap();
        let berry = berry_chern_oracle(&fam, &sphere, lower_idx);
        println!(
            "k = {k:+}: dd = {dd:+}, berry(L0 over dB) = {:?}, lift_residual = {:.2e}, cob_residual = {:.2e}, min_sv = {:.3}, t = {:?}",
            berry, gc.certificates.max_lift_residual, gc.certificates.max_coboundary_residual,
            gc.certificates.section_min_singular, t0.elapsed()
        );
    }
}
