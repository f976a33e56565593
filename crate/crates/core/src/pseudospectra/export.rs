//! CSV and 16-bit PGM output for grids, CSV input/output for point clouds.

use std::io::{self, BufRead, Write};

use num_complex::Complex64;

use super::{PointCloud, PseudospectrumGrid};

pub const PGM_LOG10_MIN: f64 = -8.0;
pub const PGM_LOG10_MAX: f64 = 2.0;

/// `re,im,sigma_min` per sample, row-major (`i` fastest), 17 significant
/// digits.
pub fn write_grid_csv<W: Write>(grid: &PseudospectrumGrid, mut out: W) -> io::Result<()> {
    writeln!(out, "re,im,sigma_min")?;
    let nx = grid.resolution.nx;
    for (k, v) in grid.values.iter().enumerate() {
        let l = grid.lambda(k % nx, k / nx);
        writeln!(out, "{:.16e},{:.16e},{:.16e}", l.re, l.im, v)?;
    }
    out.flush()
}

/// Gray level of one sample:
/// `round((clamp(log₁₀ σ, −8, 2) + 8) / 10 · 65535)`, with `σ = 0` mapped
/// to 0.
pub fn pgm_level(sigma: f64) -> u16 {
    let l = if sigma > 0.0 { sigma.log10().clamp(PGM_LOG10_MIN, PGM_LOG10_MAX) } else { PGM_LOG10_MIN };
    ((l - PGM_LOG10_MIN) / (PGM_LOG10_MAX - PGM_LOG10_MIN) * 65535.0).round() as u16
}

/// Binary PGM (`P5`, maxval 65535, big-endian samples). The first image row
/// is `im = im_max` so the picture has the usual orientation.
pub fn write_grid_pgm<W: Write>(grid: &PseudospectrumGrid, mut out: W) -> io::Result<()> {
    let (nx, ny) = (grid.resolution.nx, grid.resolution.ny);
    write!(out, "P5\n{nx} {ny}\n65535\n")?;
    let mut row = Vec::with_capacity(2 * nx);
    for j in (0..ny).rev() {
        row.clear();
        for i in 0..nx {
            row.extend_from_slice(&pgm_level(grid.value(i, j)).to_be_bytes());
        }
        out.write_all(&row)?;
    }
    out.flush()
}

impl PointCloud {
    /// `re,im` per point, 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "re,im")?;
        for z in &self.points {
            writeln!(out, "{:.16e},{:.16e}", z.re, z.im)?;
        }
        out.flush()
    }
}

/// Inverse of [`PointCloud::write_csv`].
pub fn read_cloud_csv<R: BufRead>(input: R, label: impl Into<String>) -> io::Result<PointCloud> {
    let bad = |msg: String| io::Error::new(io::ErrorKind::InvalidData, msg);
    let mut lines = input.lines();
    match lines.next() {
        Some(Ok(h)) if h.trim() == "re,im" => {}
        Some(Err(e)) => return Err(e),
        _ => return Err(bad("missing re,im header".into())),
    }
    let mut points = Vec::new();
    for (n, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let (re, im) = line.split_once(',').ok_or_else(|| bad(format!("line {}: expected two fields", n + 2)))?;
        let parse = |s: &str| s.trim().parse::<f64>().map_err(|e| bad(format!("line {}: {e}", n + 2)));
        points.push(Complex64::new(parse(re)?, parse(im)?));
    }
    Ok(PointCloud::new(points, label))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matmodel::CMatrix;
    use crate::pseudospectra::{compute_grid, GridParams, Region, Resolution};

    #[test]
    fn gray_levels() {
        assert_eq!(pgm_level(0.0), 0);
        assert_eq!(pgm_level(1e-9), 0);
        assert_eq!(pgm_level(1e-8), 0);
        assert_eq!(pgm_level(100.0), 65535);
        assert_eq!(pgm_level(1e5), 65535);
        assert_eq!(pgm_level(1.0), 52428);
        assert_eq!(pgm_level(1e-3), 32768);
    }

    #[test]
    fn csv_and_pgm_layout() {
        let a = CMatrix::from_real_diagonal(&[0.0]);
        let g = compute_grid(&a, GridParams::new(Region::new(0.0, 1.0, 0.0, 2.0), Resolution::new(2, 3))).unwrap();
        let mut csv = Vec::new();
        write_grid_csv(&g, &mut csv).unwrap();
        let text = String::from_utf8(csv).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 7);
        assert_eq!(lines[0], "re,im,sigma_min");
        assert_eq!(lines[2], "1.0000000000000000e0,0.0000000000000000e0,1.0000000000000000e0");
        assert!(lines[3].starts_with("0.0000000000000000e0,1.0000000000000000e0,"));

        let mut pgm = Vec::new();
        write_grid_pgm(&g, &mut pgm).unwrap();
        let header = b"P5\n2 3\n65535\n";
        assert_eq!(&pgm[..header.len()], header);
        assert_eq!(pgm.len(), header.len() + 2 * 6);
        // last image row is im_min, whose first sample is λ = 0
        assert_eq!(&pgm[pgm.len() - 4..pgm.len() - 2], &[0, 0]);
    }

    #[test]
    fn cloud_round_trip() {
        let cloud = PointCloud::new(
            vec![Complex64::new(0.1, -1.0 / 3.0), Complex64::new(std::f64::consts::PI, 1e-300), Complex64::new(-0.0, 5e-324)],
            "x",
        );
        let mut buf = Vec::new();
        cloud.write_csv(&mut buf).unwrap();
        let back = read_cloud_csv(&buf[..], "x").unwrap();
        assert_eq!(back.points.len(), 3);
        for (a, b) in back.points.iter().zip(&cloud.points) {
            assert_eq!(a.re.to_bits(), b.re.to_bits());
            assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
    }
}
