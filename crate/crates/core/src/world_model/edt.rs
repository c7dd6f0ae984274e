use super::{Cell, GridGeometry, VoxelGrid, WorldError};

/// Exact Euclidean distance (meters) from every cell center to the nearest
/// occupied cell center.
#[derive(Debug, Clone)]
pub struct DistanceField {
    geometry: GridGeometry,
    values: Vec<f64>,
}

impl DistanceField {
    pub fn geometry(&self) -> &GridGeometry {
        &self.geometry
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn at(&self, c: Cell) -> f64 {
        self.values[self.geometry.linear(c)]
    }

    pub fn at_world(&self, p: &crate::geometry::Vec3) -> Option<f64> {
        self.geometry.world_to_cell(p).map(|c| self.at(c))
    }
}

/// Lower envelope of parabolas (Felzenszwalb & Huttenlocher) on one line of
/// squared distances. `f` holds the input samples, `out` receives
/// `min_q (p - q)^2 + f[q]`. Infinite samples are not sites.
fn envelope_1d(f: &[f64], out: &mut [f64], sites: &mut Vec<usize>, bounds: &mut Vec<f64>) {
    let n = f.len();
    sites.clear();
    bounds.clear();
    for q in 0..n {
        if !f[q].is_finite() {
            continue;
        }
        loop {
            let Some(&v) = sites.last() else { break };
            let s = intersection(f, v, q);
            if s <= *bounds.last().unwrap() {
                sites.pop();
                bounds.pop();
            } else {
                sites.push(q);
                bounds.push(s);
                break;
            }
        }
        if sites.is_empty() {
            sites.push(q);
            bounds.push(f64::NEG_INFINITY);
        }
    }
    if sites.is_empty() {
        out.iter_mut().for_each(|o| *o = f64::INFINITY);
        return;
    }
    let mut k = 0;
    for (p, o) in out.iter_mut().enumerate() {
        let pf = p as f64;
        while k + 1 < sites.len() && bounds[k + 1] < pf {
            k += 1;
        }
        let q = sites[k];
        let d = pf - q as f64;
        *o = d * d + f[q];
    }
}

#[inline]
fn intersection(f: &[f64], v: usize, q: usize) -> f64 {
    let (vf, qf) = (v as f64, q as f64);
    ((f[q] + qf * qf) - (f[v] + vf * vf)) / (2.0 * (qf - vf))
}

/// Three separable passes (x, then y, then z) of the exact 1-D squared
/// distance transform. Squared distances stay integral in voxel units, so
/// the result is exact before the final square root.
pub fn nearest_occupied_distance_field(map: &VoxelGrid) -> Result<DistanceField, WorldError> {
    if map.occupied_count() == 0 {
        return Err(WorldError::EmptyMap);
    }
    let g = *map.geometry();
    let [nx, ny, nz] = g.dims;
    let mut sq: Vec<f64> = map
        .occupancy()
        .iter()
        .map(|&o| if o { 0.0 } else { f64::INFINITY })
        .collect();

    let longest = nx.max(ny).max(nz);
    let mut line = vec![0.0; longest];
    let mut out = vec![0.0; longest];
    let mut sites = Vec::with_capacity(longest);
    let mut bounds = Vec::with_capacity(longest);

    let mut pass = |sq: &mut Vec<f64>, len: usize, stride: usize, starts: &mut dyn Iterator<Item = usize>| {
        for start in starts {
            for i in 0..len {
                line[i] = sq[start + i * stride];
            }
            envelope_1d(&line[..len], &mut out[..len], &mut sites, &mut bounds);
            for i in 0..len {
                sq[start + i * stride] = out[i];
            }
        }
    };

    // x lines: start at (0, y, z)
    let mut xs = (0..ny * nz).map(|yz| yz * nx);
    pass(&mut sq, nx, 1, &mut xs);
    // y lines: start at (x, 0, z)
    let mut ys = (0..nz).flat_map(|z| (0..nx).map(move |x| x + z * nx * ny));
    pass(&mut sq, ny, nx, &mut ys);
    // z lines: start at (x, y, 0)
    let mut zs = 0..nx * ny;
    pass(&mut sq, nz, nx * ny, &mut zs);

    let res = g.resolution;
    let values = sq.into_iter().map(|d2| d2.sqrt() * res).collect();
    Ok(DistanceField { geometry: g, values })
}
