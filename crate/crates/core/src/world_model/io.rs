//! `EMBRMAP1` map files: one ASCII header line
//! `EMBRMAP1 <nx> <ny> <nz> <resolution> <ox> <oy> <oz>` followed by
//! `nx*ny*nz` bytes (x fastest), `0x00` free and `0x01` occupied.

use super::{GridGeometry, VoxelGrid, WorldError};
use crate::geometry::Vec3;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

pub const MAP_MAGIC: &str = "EMBRMAP1";

pub fn write_map<W: Write>(map: &VoxelGrid, mut w: W) -> Result<(), WorldError> {
    let g = map.geometry();
    writeln!(
        w,
        "{MAP_MAGIC} {} {} {} {} {} {} {}",
        g.dims[0], g.dims[1], g.dims[2], g.resolution, g.origin.x, g.origin.y, g.origin.z
    )?;
    let bytes: Vec<u8> = map.occupancy().iter().map(|&o| o as u8).collect();
    w.write_all(&bytes)?;
    Ok(())
}

pub fn read_map<R: Read>(r: R) -> Result<VoxelGrid, WorldError> {
    let mut r = BufReader::new(r);
    let mut header = Vec::new();
    r.read_until(b'\n', &mut header)?;
    if header.last() != Some(&b'\n') {
        return Err(WorldError::Format("missing header line".into()));
    }
    header.pop();
    let header = std::str::from_utf8(&header)
        .map_err(|_| WorldError::Format("header is not ASCII".into()))?;
    let fields: Vec<&str> = header.split(' ').collect();
    if fields.len() != 8 || fields[0] != MAP_MAGIC {
        return Err(WorldError::Format(format!("bad header `{header}`")));
    }
    let dim = |s: &str| {
        s.parse::<usize>()
            .map_err(|_| WorldError::Format(format!("bad dimension `{s}`")))
    };
    let real = |s: &str| {
        s.parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| WorldError::Format(format!("bad number `{s}`")))
    };
    let dims = [dim(fields[1])?, dim(fields[2])?, dim(fields[3])?];
    let resolution = real(fields[4])?;
    let origin = Vec3::new(real(fields[5])?, real(fields[6])?, real(fields[7])?);
    let geometry = GridGeometry::new(origin, resolution, dims)?;

    let mut body = Vec::with_capacity(geometry.len());
    r.read_to_end(&mut body)?;
    if body.len() != geometry.len() {
        return Err(WorldError::Format(format!(
            "expected {} voxel bytes, found {}",
            geometry.len(),
            body.len()
        )));
    }
    let occupancy = body
        .iter()
        .enumerate()
        .map(|(i, &b)| match b {
            0 => Ok(false),
            1 => Ok(true),
            other => Err(WorldError::Format(format!(
                "invalid voxel byte 0x{other:02x} at offset {i}"
            ))),
        })
        .collect::<Result<Vec<_>, _>>()?;
    VoxelGrid::from_occupancy(geometry, occupancy)
}

pub fn write_map_file(map: &VoxelGrid, path: impl AsRef<Path>) -> Result<(), WorldError> {
    let f = std::fs::File::create(path)?;
    let mut w = std::io::BufWriter::new(f);
    write_map(map, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn read_map_file(path: impl AsRef<Path>) -> Result<VoxelGrid, WorldError> {
    read_map(std::fs::File::open(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_layout_is_exact() {
        let mut m = VoxelGrid::new(Vec3::new(-1.5, 0.0, 2.25), 0.25, [2, 1, 2]).unwrap();
        m.set([1, 0, 1], true);
        let mut buf = Vec::new();
        write_map(&m, &mut buf).unwrap();
        let expect = b"EMBRMAP1 2 1 2 0.25 -1.5 0 2.25\n\x00\x00\x00\x01";
        assert_eq!(buf, expect);
        assert_eq!(read_map(&buf[..]).unwrap(), m);
    }

    #[test]
    fn rejects_bad_bytes_and_lengths() {
        let bad = b"EMBRMAP1 2 1 1 1 0 0 0\n\x00\x02";
        assert!(matches!(read_map(&bad[..]), Err(WorldError::Format(_))));
        let short = b"EMBRMAP1 2 1 1 1 0 0 0\n\x00";
        assert!(matches!(read_map(&short[..]), Err(WorldError::Format(_))));
        let magic = b"EMBRMAP2 1 1 1 1 0 0 0\n\x00";
        assert!(matches!(read_map(&magic[..]), Err(WorldError::Format(_))));
        let zero = b"EMBRMAP1 0 1 1 1 0 0 0\n";
        assert!(read_map(&zero[..]).is_err());
    }
}
