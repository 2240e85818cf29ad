use cechflow::models::s3_sphere;

fn main() {
    for refinements in [3usize, 4] {
        let geom = s3_sphere(refinements);
        let m = &geom.mesh;
        let lens: Vec<f64> = (0..m.edges().len()).map(|e| m.edge_length(e)).collect();
        let min = lens.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = lens.iter().cloned().fold(0.0f64, f64::max);
        let mean = lens.iter().sum::<f64>() / lens.len() as f64;
        println!(
            "refine {refinements}: V = {}, T = {}, edge min/mean/max = {:.3}/{:.3}/{:.3}",
            m.vertex_count(), m.tets().len(), min, mean, max
        );
    }
}
