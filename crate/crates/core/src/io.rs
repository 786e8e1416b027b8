//! CSV encoders. Every file starts with the schema line [`CSV_SCHEMA`];
//! floats are written with 17 significant digits so they round-trip.

use std::io::{self, Write};

use crate::contour::ContourCurve;
use crate::greens::DensityGrid;
use crate::C64;

pub const CSV_SCHEMA: &str = "# qfree-csv v1";

/// `x` in scientific notation with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn header<W: Write>(w: &mut W, columns: &str) -> io::Result<()> {
    writeln!(w, "{CSV_SCHEMA}")?;
    writeln!(w, "{columns}")
}

/// `re,im,rho,valid` at cell centres, row-major from the lower-left cell.
pub fn write_density_csv<W: Write>(w: &mut W, d: &DensityGrid) -> io::Result<()> {
    header(w, "re,im,rho,valid")?;
    let g = &d.grid;
    for iy in 0..g.ny {
        for ix in 0..g.nx {
            let z = g.center(ix, iy);
            let i = g.index(ix, iy);
            writeln!(w, "{},{},{},{}", fmt_f64(z.re), fmt_f64(z.im), fmt_f64(d.values[i]), u8::from(d.valid[i]))?;
        }
    }
    Ok(())
}

/// `branch,phi,r,re,im`, one row per sample.
pub fn write_contour_csv<W: Write>(w: &mut W, c: &ContourCurve) -> io::Result<()> {
    header(w, "branch,phi,r,re,im")?;
    for (k, b) in c.branches.iter().enumerate() {
        for s in &b.samples {
            let z = s.z();
            writeln!(w, "{k},{},{},{},{}", fmt_f64(s.phi), fmt_f64(s.r), fmt_f64(z.re), fmt_f64(z.im))?;
        }
    }
    Ok(())
}

/// `rep,index,re,im` for repetition-major eigenvalues of `n × n` draws.
pub fn write_eigenvalue_csv<W: Write>(w: &mut W, n: usize, eigs: &[C64]) -> io::Result<()> {
    header(w, "rep,index,re,im")?;
    for (i, z) in eigs.iter().enumerate() {
        writeln!(w, "{},{},{},{}", i / n, i % n, fmt_f64(z.re), fmt_f64(z.im))?;
    }
    Ok(())
}

/// Generic table: a header line of column names and rows of cells.
pub fn write_table<W: Write>(w: &mut W, columns: &[&str], rows: &[Vec<String>]) -> io::Result<()> {
    header(w, &columns.join(","))?;
    for r in rows {
        writeln!(w, "{}", r.join(","))?;
    }
    Ok(())
}
