use super::ThermalImage;
use std::collections::VecDeque;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FireDetection {
    pub u: f64,
    pub v: f64,
    pub pixel_count: usize,
    pub max_temp: f64,
}

/// 8-connected components of pixels at or above `threshold` with at least
/// `min_pixels` members, in row-major order of their first pixel.
pub fn segment_fire(img: &ThermalImage, threshold: f64, min_pixels: usize) -> Vec<FireDetection> {
    let (w, h) = (img.width, img.height);
    let hot: Vec<bool> = img.temperatures.iter().map(|&t| t >= threshold).collect();
    let mut seen = vec![false; w * h];
    let mut out = Vec::new();
    let mut queue = VecDeque::new();
    for start in 0..w * h {
        if !hot[start] || seen[start] {
            continue;
        }
        seen[start] = true;
        queue.push_back(start);
        let (mut su, mut sv, mut n, mut tmax) = (0usize, 0usize, 0usize, f64::NEG_INFINITY);
        while let Some(i) = queue.pop_front() {
            let (u, v) = (i % w, i / w);
            su += u;
            sv += v;
            n += 1;
            tmax = tmax.max(img.temperatures[i]);
            for dv in -1i64..=1 {
                for du in -1i64..=1 {
                    let (nu, nv) = (u as i64 + du, v as i64 + dv);
                    if nu < 0 || nv < 0 || nu >= w as i64 || nv >= h as i64 {
                        continue;
                    }
                    let j = nv as usize * w + nu as usize;
                    if hot[j] && !seen[j] {
                        seen[j] = true;
                        queue.push_back(j);
                    }
                }
            }
        }
        if n >= min_pixels {
            out.push(FireDetection {
                u: su as f64 / n as f64,
                v: sv as f64 / n as f64,
                pixel_count: n,
                max_temp: tmax,
            });
        }
    }
    out
}
