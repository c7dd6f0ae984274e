//! Generates a two-floor building, writes it as a map file and prints a
//! few slices.

use embr::sim::{generate_building, BuildingParams, Opening, Side};
use embr::world_model::{read_map_file, write_map_file};
use embr::Vec3;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "building.map".into());
    let params = BuildingParams {
        extent: Vec3::new(20.0, 20.0, 7.25),
        floors: 2,
        windows_per_side: 2,
        doors: vec![Opening { side: Side::West, center: 10.0, width: 1.5, sill: 0.0, height: 2.25 }],
        seed: 3,
        ..BuildingParams::default()
    };
    let map = generate_building(&params)?;
    write_map_file(&map, &out)?;
    let back = read_map_file(&out)?;
    assert_eq!(back, map);
    println!("{:?} cells, {} occupied, written to {out}", map.dims(), map.occupied_count());

    for z in [0.5, 1.5, 4.5] {
        let layer = map.layer_of(z).expect("inside the map");
        println!("\nz = {z}");
        let [nx, ny, _] = map.dims();
        for y in (0..ny).rev().step_by(2) {
            let row: String = (0..nx).step_by(2).map(|x| if map.is_occupied([x, y, layer]) { '#' } else { '.' }).collect();
            println!("{row}");
        }
    }
    Ok(())
}
