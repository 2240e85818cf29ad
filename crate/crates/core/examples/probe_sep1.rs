use cechflow::cover::{pushforward_fundamental, star_cover, DEFAULT_GAP_MARGIN};
use cechflow::deform::*;
use cechflow::gerbe::{build_gerbe_cocycle, dd_pair, GaugeOptions};
use cechflow::models::*;

fn dd_of(fam: &cechflow::family::EnhancedGraph, geom: &S3Geometry) -> i64 {
    let cover = star_cover(fam, geom, 0.125, DEFAULT_GAP_MARGIN).unwrap();
    let gc = build_gerbe_cocycle(fam, &cover, &GaugeOptions::default()).unwrap();
    let fclass = pushforward_fundamental(&cover, fam.mesh()).unwrap();
    dd_pair(&cover, &gc, &fclass).unwrap()
}

fn main() {
    let geom = s3_sphere(4);
    let chart = s3_ball_chart(&geom);
    for k in [1i64, 2] {
        let t0 = std::time::Instant::now();
        let a = monopole_family(geom.mesh.clone(), &chart, &MonopoleParams { k, ..Default::default() }).unwrap();
        let b = monopole_family(geom.mesh.clone(), &chart, &MonopoleParams { k: -k, ..Default::default() }).unwrap();
        let sum = a.direct_sum(&b).unwrap();
        println!("k = {k}: sum has {} bands, dd(sum) = {}", sum.band_count(), dd_of(&sum, &geom));
        let ball = BallRegion::from_scalar_field(geom.mesh.as_ref(), &chart.radius, 1.6, 0.8).unwrap();
        // flatten the four middle bands to 0 on B' (order keeps sortedness)
        let mut fam = sum.clone();
        for band in [3usize, 2, 4, 5] {
            fam = flatten(&fam, band, &ball, 0.0).unwrap();
            println!("  after flatten band {band}: dd = {}", dd_of(&fam, &geom));
        }
        let (scaled, cert) = scale(&fam, &[4, 5], None, &ball).unwrap();
        println!(
            "  scale: eps = {:.3}, chern = {}, sweeps = {}, alignment = {:.3}, dd = {}",
            cert.eps, cert.total_chern, cert.sweeps, cert.min_alignment, dd_of(&scaled, &geom)
        );
        println!("  separated(3,4) = {}", is_separated(&scaled, 3, 4));
        // obstructed variant: single monopole, scale only the upper line
        let mut single = a.clone();
        for band in [1usize, 2] {
            single = flatten(&single, band, &ball, 0.0).unwrap();
        }
        match scale(&single, &[2], None, &ball) {
            Err(cechflow::Error::ChernObstruction { chern }) => {
                println!("  obstructed variant: ChernObstruction({chern})")
            }
            other => println!("  obstructed variant UNEXPECTED: {:?}", other.map(|_| ())),
        }
        println!("  total {:?}", t0.elapsed());
    }
}
