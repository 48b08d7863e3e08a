//! Field dumps: a flat little-endian `f64` binary with a one-line text
//! header `"<n> <M>\n"`, and a CSV for plotting.

use std::io::{self, BufRead, Write};

use super::FieldSet;

pub fn write_field_binary<W: Write>(mut out: W, u: &FieldSet) -> io::Result<()> {
    writeln!(out, "{} {}", u.n(), u.resolution)?;
    for v in u.values.iter().flatten() {
        out.write_all(&v.to_le_bytes())?;
    }
    out.flush()
}

pub fn read_field_binary<R: BufRead>(mut input: R) -> io::Result<FieldSet> {
    let bad = |msg: &str| io::Error::new(io::ErrorKind::InvalidData, msg.to_string());
    let mut header = String::new();
    input.read_line(&mut header)?;
    let mut parts = header.split_whitespace().map(str::parse::<usize>);
    let (n, m) = match (parts.next(), parts.next(), parts.next()) {
        (Some(Ok(n)), Some(Ok(m)), None) => (n, m),
        _ => return Err(bad("field header must be \"<n> <M>\"")),
    };
    let mut values = Vec::with_capacity(n);
    let mut buf = [0u8; 8];
    for _ in 0..n {
        let mut comp = Vec::with_capacity(m * m);
        for _ in 0..m * m {
            input.read_exact(&mut buf)?;
            comp.push(f64::from_le_bytes(buf));
        }
        values.push(comp);
    }
    if input.read(&mut buf)? != 0 {
        return Err(bad("trailing data after field values"));
    }
    Ok(FieldSet { resolution: m, values })
}

pub fn write_field_csv<W: Write>(mut out: W, u: &FieldSet) -> io::Result<()> {
    let m = u.resolution;
    writeln!(out, "component,i,j,x,y,u")?;
    for (c, comp) in u.values.iter().enumerate() {
        for (idx, v) in comp.iter().enumerate() {
            let (i, j) = (idx / m, idx % m);
            writeln!(out, "{c},{i},{j},{},{},{v:e}", i as f64 / m as f64, j as f64 / m as f64)?;
        }
    }
    out.flush()
}
