use super::{if_update, merge_beliefs, FireBelief, FireError, FireMeasurement};
use crate::geometry::Vec3;
use nalgebra::Matrix3;
use std::io::Write;

pub const FIRE_REPORT_HEADER: &str = "id,x,y,z,cov_xx,cov_xy,cov_xz,cov_yx,cov_yy,cov_yz,cov_zx,cov_zy,cov_zz,measurement_count,last_update_tick";

#[derive(Debug, Clone, PartialEq)]
pub struct TrackedFire {
    pub id: u32,
    pub belief: FireBelief,
    pub last_update_tick: u64,
}

impl TrackedFire {
    pub fn estimate(&self) -> Option<Vec3> {
        self.belief.estimate()
    }
}

fn mahalanobis(mu: &Vec3, p: &Matrix3<f64>, z: &Vec3, r: &Matrix3<f64>) -> f64 {
    let e = z - mu;
    match (p + r).try_inverse() {
        Some(s) => (e.transpose() * s * e)[0].max(0.0).sqrt(),
        None => f64::INFINITY,
    }
}

/// Index of the gated track closest in Mahalanobis distance.
fn best_gate<'a>(
    fires: impl Iterator<Item = (usize, &'a FireBelief)>,
    z: &Vec3,
    r: &Matrix3<f64>,
    gate: f64,
) -> Option<usize> {
    let mut best: Option<(f64, usize)> = None;
    for (i, b) in fires {
        let (Some(mu), Some(p)) = (b.estimate(), b.covariance()) else { continue };
        let d = mahalanobis(&mu, &p, z, r);
        if d <= gate && best.is_none_or(|(bd, _)| d < bd) {
            best = Some((d, i));
        }
    }
    best.map(|(_, i)| i)
}

/// Per-robot set of fire beliefs with gated data association.
#[derive(Debug, Clone, Default)]
pub struct FireTracker {
    fires: Vec<TrackedFire>,
    next_id: u32,
    gate: f64,
}

impl FireTracker {
    pub fn new(gate: f64) -> Self {
        Self { fires: Vec::new(), next_id: 0, gate }
    }

    pub fn fires(&self) -> &[TrackedFire] {
        &self.fires
    }

    /// Fuses into the best gated belief, or starts a new one. Returns the id.
    pub fn ingest(&mut self, m: &FireMeasurement, tick: u64) -> Result<u32, FireError> {
        let z = m.position();
        let hit = best_gate(self.fires.iter().map(|f| &f.belief).enumerate(), &z, &m.covariance, self.gate);
        match hit {
            Some(i) => {
                let f = &mut self.fires[i];
                f.belief = if_update(&f.belief, m)?;
                f.last_update_tick = tick;
                Ok(f.id)
            }
            None => {
                let belief = if_update(&FireBelief::new(), m)?;
                let id = self.next_id;
                self.next_id += 1;
                self.fires.push(TrackedFire { id, belief, last_update_tick: tick });
                Ok(id)
            }
        }
    }
}

/// Team-level picture from several robots' independent trackers: beliefs
/// that gate together are merged, others kept. Ids are reassigned in order.
pub fn fuse_tracks(sources: &[&[TrackedFire]], gate: f64) -> Vec<TrackedFire> {
    let mut out: Vec<TrackedFire> = Vec::new();
    for f in sources.iter().flat_map(|s| s.iter()) {
        let (Some(z), Some(r)) = (f.belief.estimate(), f.belief.covariance()) else { continue };
        match best_gate(out.iter().map(|t| &t.belief).enumerate(), &z, &r, gate) {
            Some(i) => {
                let t = &mut out[i];
                t.belief = merge_beliefs(&t.belief, &f.belief);
                t.last_update_tick = t.last_update_tick.max(f.last_update_tick);
            }
            None => out.push(TrackedFire { id: out.len() as u32, ..f.clone() }),
        }
    }
    out
}

pub fn write_fire_report<W: Write>(fires: &[TrackedFire], mut w: W) -> std::io::Result<()> {
    writeln!(w, "{FIRE_REPORT_HEADER}")?;
    for f in fires {
        let (Some(p), Some(c)) = (f.belief.estimate(), f.belief.covariance()) else { continue };
        write!(w, "{},{},{},{}", f.id, p.x, p.y, p.z)?;
        for r in 0..3 {
            for k in 0..3 {
                write!(w, ",{}", c[(r, k)])?;
            }
        }
        writeln!(w, ",{},{}", f.belief.measurement_count, f.last_update_tick)?;
    }
    Ok(())
}
