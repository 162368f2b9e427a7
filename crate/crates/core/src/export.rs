//! Plain-text exporters for meshes and sampled fields.

use std::io::{self, Write};

use crate::heisenberg::HPoint;

/// Formats a float with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Wavefront OBJ of an `nu × nv` vertex grid stored row-major (`u` fastest),
/// with one quad per grid cell.
pub fn write_obj<W: Write>(out: &mut W, vertices: &[HPoint], nu: usize, nv: usize) -> io::Result<()> {
    if vertices.len() != nu * nv {
        return Err(io::Error::new(
            io::ErrorKind::InvalidInput,
            format!("{} vertices do not form a {nu} x {nv} grid", vertices.len()),
        ));
    }
    for p in vertices {
        writeln!(out, "v {} {} {}", fmt_f64(p.x), fmt_f64(p.y), fmt_f64(p.z))?;
    }
    for j in 0..nv.saturating_sub(1) {
        for i in 0..nu.saturating_sub(1) {
            let a = j * nu + i + 1;
            writeln!(out, "f {} {} {} {}", a, a + 1, a + nu + 1, a + nu)?;
        }
    }
    Ok(())
}

/// CSV with a header row; every row must have one value per column.
pub fn write_csv<W: Write>(out: &mut W, header: &[&str], rows: &[Vec<f64>]) -> io::Result<()> {
    writeln!(out, "{}", header.join(","))?;
    for row in rows {
        if row.len() != header.len() {
            return Err(io::Error::new(io::ErrorKind::InvalidInput, "row length differs from header"));
        }
        let cells: Vec<String> = row.iter().map(|&x| fmt_f64(x)).collect();
        writeln!(out, "{}", cells.join(","))?;
    }
    Ok(())
}
