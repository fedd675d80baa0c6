//! Field serialization.
//!
//! Binary layout (all little-endian): `d`, `n`, `P` as `u64`, followed by
//! `n^d` pairs of `f64` (real, imaginary) in storage order.
//! CSV layout: header `x0[,x1[,x2]],re,im`, one row per lattice point.

use std::io::{BufRead, Read, Write};

use num_complex::Complex64;

use super::{Field, GridSpec};
use crate::error::{Error, Result};

pub fn write_binary<W: Write>(f: &Field, mut w: W) -> Result<()> {
    let g = f.grid();
    for v in [g.dim(), g.n(), g.period_scale()] {
        w.write_all(&(v as u64).to_le_bytes())?;
    }
    for z in f.values() {
        w.write_all(&z.re.to_le_bytes())?;
        w.write_all(&z.im.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_binary<R: Read>(mut r: R) -> Result<Field> {
    let mut word = [0u8; 8];
    let mut header = [0usize; 3];
    for slot in &mut header {
        r.read_exact(&mut word)?;
        *slot =
            usize::try_from(u64::from_le_bytes(word)).map_err(|_| Error::Format("header value too large".into()))?;
    }
    let grid = GridSpec::new(header[0], header[1], header[2])?;
    let mut values = Vec::with_capacity(grid.len());
    for _ in 0..grid.len() {
        r.read_exact(&mut word)?;
        let re = f64::from_le_bytes(word);
        r.read_exact(&mut word)?;
        let im = f64::from_le_bytes(word);
        values.push(Complex64::new(re, im));
    }
    if r.read(&mut word)? != 0 {
        return Err(Error::Format("trailing bytes after field data".into()));
    }
    let real = values.iter().all(|z| z.im == 0.0);
    let f = Field::from_values(grid, values)?;
    Ok(if real { f.project_real() } else { f })
}

pub fn write_csv<W: Write>(f: &Field, mut w: W) -> Result<()> {
    let g = f.grid();
    writeln!(w, "# d = {}", g.dim())?;
    writeln!(w, "# n = {}", g.n())?;
    writeln!(w, "# P = {}", g.period_scale())?;
    let coords: Vec<String> = (0..g.dim()).map(|a| format!("x{a}")).collect();
    writeln!(w, "{},re,im", coords.join(","))?;
    for (flat, z) in f.values().iter().enumerate() {
        let x = g.position(flat);
        for xi in &x[..g.dim()] {
            write!(w, "{xi:e},")?;
        }
        writeln!(w, "{:e},{:e}", z.re, z.im)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: BufRead>(r: R) -> Result<Field> {
    let mut meta = [None; 3];
    let mut values = Vec::new();
    let mut saw_header = false;
    for line in r.lines() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            if let Some((k, v)) = rest.split_once('=') {
                let slot = match k.trim() {
                    "d" => 0,
                    "n" => 1,
                    "P" => 2,
                    _ => continue,
                };
                let v: usize = v.trim().parse().map_err(|_| Error::Format(format!("bad header: {line}")))?;
                meta[slot] = Some(v);
            }
            continue;
        }
        if !saw_header {
            saw_header = true;
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() < 2 {
            return Err(Error::Format(format!("short row: {line}")));
        }
        let parse = |s: &str| s.trim().parse::<f64>().map_err(|_| Error::Format(format!("bad number: {s}")));
        values.push(Complex64::new(parse(cols[cols.len() - 2])?, parse(cols[cols.len() - 1])?));
    }
    let [Some(d), Some(n), Some(p)] = meta else {
        return Err(Error::Format("missing d, n or P header".into()));
    };
    let f = Field::from_values(GridSpec::new(d, n, p)?, values)?;
    let real = f.values().iter().all(|z| z.im == 0.0);
    Ok(if real { f.project_real() } else { f })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binary_round_trip_is_bit_exact() {
        let g = GridSpec::new(2, 4, 3).unwrap();
        let f = Field::from_fn(g, |x| Complex64::new(x[0].sin(), x[1].cos() / 3.0));
        let mut buf = Vec::new();
        write_binary(&f, &mut buf).unwrap();
        assert_eq!(buf.len(), 24 + 16 * 16);
        assert_eq!(&buf[..8], &2u64.to_le_bytes());
        let back = read_binary(buf.as_slice()).unwrap();
        assert_eq!(back.values(), f.values());
        assert_eq!(back.grid(), g);
    }

    #[test]
    fn binary_rejects_truncated_input() {
        let f = Field::zeros(GridSpec::new(1, 8, 1).unwrap());
        let mut buf = Vec::new();
        write_binary(&f, &mut buf).unwrap();
        buf.truncate(buf.len() - 3);
        assert!(read_binary(buf.as_slice()).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let g = GridSpec::new(1, 16, 2).unwrap();
        let f = Field::from_real_fn(g, |x| (x[0] / 3.0).sin());
        let mut buf = Vec::new();
        write_csv(&f, &mut buf).unwrap();
        let back = read_csv(buf.as_slice()).unwrap();
        assert!(back.is_real());
        for (a, b) in back.values().iter().zip(f.values()) {
            assert_eq!(a, b);
        }
    }
}
