//! Distance field and LIDAR likelihood grid around a single wall.

use embr::world_model::{build_likelihood_grid, nearest_occupied_distance_field, VoxelGrid};
use embr::Vec3;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut map = VoxelGrid::new(Vec3::zeros(), 0.25, [40, 8, 1])?;
    map.fill_box(Vec3::new(5.0, 0.0, 0.0), Vec3::new(5.25, 2.0, 0.25), true);
    let df = nearest_occupied_distance_field(&map)?;
    let lk = build_likelihood_grid(&map, 0.2, 0.6)?;
    println!("sigma {} m, truncation {} m, peak {:.4}", lk.sigma(), lk.truncation_radius(), lk.peak());
    println!("{:>6} {:>8} {:>10}", "x", "dist", "likelihood");
    for x in 0..40 {
        let c = [x, 4, 0];
        println!("{:6.3} {:8.3} {:10.5}", map.geometry().cell_center(c).x, df.at(c), lk.at(c));
    }
    Ok(())
}
