use cechflow::models::*;

fn main() {
    let geom = s3_sphere(3);
    let chart = s3_ball_chart(&geom);
    for v in [313usize, 359] {
        let b = geom.barycentric[v];
        println!(
            "vertex {v}: r = {:.3}, dir = {:?}, bary = {:?}",
            chart.radius[v],
            chart.direction[v].map(|x| (x * 1000.0).round() / 1000.0),
            b.map(|x| (x * 1000.0).round() / 1000.0),
        );
    }
    // direction angle between them after winding by 2
    let wind = |d: [f64; 3], k: i64| -> [f64; 3] {
        let st = (d[0] * d[0] + d[1] * d[1]).sqrt();
        if st < 1e-15 { return [0.0, 0.0, d[2].signum()]; }
        let phi = d[1].atan2(d[0]);
        let (s, c) = (k as f64 * phi).sin_cos();
        [st * c, st * s, d[2]]
    };
    let (a, b) = (wind(chart.direction[313], 2), wind(chart.direction[359], 2));
    let dot = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    println!("wound angle between = {:.3} rad", dot.clamp(-1.0, 1.0).acos());
    let edge_len: f64 = geom.mesh.positions()[313].iter().zip(geom.mesh.positions()[359].iter()).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
    println!("edge chord length = {:.3}", edge_len);
}
