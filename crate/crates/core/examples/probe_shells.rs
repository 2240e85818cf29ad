use cechflow::deform::*;
use cechflow::models::*;

fn main() {
    let geom = s3_sphere(4);
    let chart = s3_ball_chart(&geom);
    for (inner, outer) in [(0.45, 1.5), (0.6, 1.5), (0.7, 1.4), (0.8, 1.6), (1.0, 1.6), (0.9, 1.7)] {
        for k in [1i64, 2] {
            let a = monopole_family(geom.mesh.clone(), &chart, &MonopoleParams { k, ..Default::default() }).unwrap();
            let b = monopole_family(geom.mesh.clone(), &chart, &MonopoleParams { k: -k, ..Default::default() }).unwrap();
            let sum = a.direct_sum(&b).unwrap();
            let ball = match BallRegion::from_scalar_field(geom.mesh.as_ref(), &chart.radius, outer, inner) {
                Ok(b) => b,
                Err(e) => { println!("shell ({inner}, {outer}) k={k}: ball failed: {e}"); continue; }
            };
            let mut fam = sum.clone();
            let mut ok = true;
            for band in [3usize, 2, 4, 5] {
                match flatten(&fam, band, &ball, 0.0) {
                    Ok(f) => fam = f,
                    Err(e) => { println!("shell ({inner}, {outer}) k={k}: flatten {band} failed: {e}"); ok = false; break; }
                }
            }
            if !ok { continue; }
            match scale(&fam, &[4, 5], None, &ball) {
                Ok((scaled, cert)) => println!(
                    "shell ({inner}, {outer}) k={k}: alignment {:.3}, sweeps {}, separated {}",
                    cert.min_alignment, cert.sweeps, is_separated(&scaled, 3, 4)
                ),
                Err(e) => println!("shell ({inner}, {outer}) k={k}: scale failed: {e}"),
            }
            // obstructed variant
            let mut single = a.clone();
            for band in [1usize, 2] {
                single = flatten(&single, band, &ball, 0.0).unwrap();
            }
            match scale(&single, &[2], None, &ball) {
                Err(cechflow::Error::ChernObstruction { chern }) => println!("    obstructed: ChernObstruction({chern})"),
                Err(e) => println!("    obstructed: WRONG ERROR {e}"),
                Ok(_) => println!("    obstructed: WRONGLY SUCCEEDED"),
            }
        }
    }
}
