//! Flies the indoor/outdoor loop under several seeds and prints the
//! localization error over the second half of each run.

use embr::geometry::angle_diff;
use embr::sim::{Scenario, Simulation};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let base = Scenario::load(concat!(env!("CARGO_MANIFEST_DIR"), "/data/mcl_loop.scn"))?;
    for seed in 1..=5u64 {
        let mut s = base.clone();
        s.seed = seed;
        let mut sim = Simulation::new(&s)?;
        let t0 = std::time::Instant::now();
        sim.run(None)?;
        let h = sim.history("uav").expect("robot exists");
        let n = h.trace.len();
        let (mut ep, mut ey) = (0.0, 0.0);
        for i in n / 2..n {
            let (e, t) = (&h.trace[i].estimate, &h.truth[i]);
            ep += (e.x - t.x).powi(2) + (e.y - t.y).powi(2) + (e.z - t.z).powi(2);
            ey += angle_diff(e.yaw, t.yaw).powi(2);
        }
        let m = (n - n / 2) as f64;
        println!(
            "seed {seed}: {n} ticks, position rmse {:.3} m, yaw rmse {:.2} deg, {:.1} s",
            (ep / m).sqrt(),
            (ey / m).sqrt().to_degrees(),
            t0.elapsed().as_secs_f64()
        );
    }
    Ok(())
}
