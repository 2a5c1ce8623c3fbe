use serde_json::json;

use crate::error::{Error, Result};
use crate::gff::LatticeField;
use crate::raster::BitGrid;
use crate::topology::AdjacencyGraph;
use crate::trace::Trace;

/// CSV with a header row and LF line endings.
pub fn write_csv<S: AsRef<str>>(header: &[S], rows: &[Vec<String>]) -> Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::Io(std::io::Error::other(e));
    w.write_record(header.iter().map(|h| h.as_ref())).map_err(csv_err)?;
    for r in rows {
        w.write_record(r).map_err(csv_err)?;
    }
    w.into_inner().map_err(|e| Error::Io(std::io::Error::other(e.to_string())))
}

/// `t,x,y` rows of a trace.
pub fn trace_csv(trace: &Trace) -> Result<Vec<u8>> {
    let rows: Vec<Vec<String>> = trace
        .times
        .iter()
        .zip(&trace.points)
        .map(|(t, z)| vec![super::format_g12(*t), super::format_g12(z.re), super::format_g12(z.im)])
        .collect();
    write_csv(&["t", "x", "y"], &rows)
}

/// One JSON header line, then the values as little-endian `f64` in row
/// order (`y = 0` first).
pub fn field_binary(field: &LatticeField) -> Vec<u8> {
    let header = json!({"nx": field.nx, "ny": field.ny, "spacing": field.spacing, "dtype": "f64le", "order": "row-major, y=0 first"});
    let mut out = super::canonical_json(&header).into_bytes();
    out.push(b'\n');
    out.reserve(8 * field.values.len());
    for v in &field.values {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

/// Inverse of [`field_binary`]: `(nx, ny, values)`.
pub fn read_field_binary(bytes: &[u8]) -> Result<(usize, usize, Vec<f64>)> {
    let nl = bytes
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| Error::Domain("field file has no header line".into()))?;
    let header: serde_json::Value = serde_json::from_slice(&bytes[..nl])?;
    let dim = |k: &str| header[k].as_u64().map(|v| v as usize).ok_or_else(|| Error::Domain(format!("field header lacks `{k}`")));
    let (nx, ny) = (dim("nx")?, dim("ny")?);
    let body = &bytes[nl + 1..];
    if body.len() != 8 * nx * ny {
        return Err(Error::Domain(format!("field body has {} bytes, expected {}", body.len(), 8 * nx * ny)));
    }
    let values = body.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes"))).collect();
    Ok((nx, ny, values))
}

/// `u,v` rows of the adjacency graph edges.
pub fn edge_list(g: &AdjacencyGraph) -> Result<Vec<u8>> {
    let rows: Vec<Vec<String>> = g.edges.iter().map(|(u, v)| vec![u.to_string(), v.to_string()]).collect();
    write_csv(&["u", "v"], &rows)
}

/// Colour of a component label; 0 (unlabelled) is `None`.
pub fn label_colour(label: u32) -> Option<[u8; 3]> {
    if label == 0 {
        return None;
    }
    // splitmix64 finalizer
    let mut z = (label as u64).wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^= z >> 31;
    // keep clear of pure white, which marks the fan
    Some([(z & 0xFF) as u8 % 224, ((z >> 8) & 0xFF) as u8 % 224, ((z >> 16) & 0xFF) as u8 % 224])
}

/// What to draw, layered bottom to top: field grayscale (black without a
/// field), hashed label colours (label 0 shows the layer below), then the
/// fan in white.
#[derive(Debug, Clone, Copy, Default)]
pub struct Layers<'a> {
    pub field: Option<&'a LatticeField>,
    pub labels: Option<&'a [u32]>,
    pub fan: Option<&'a BitGrid>,
}

/// Binary PPM (P6): header `P6\n<w> <h>\n255\n`, then RGB rows from the top
/// row (`y = ny-1`) down.
pub fn render_image(nx: usize, ny: usize, layers: Layers<'_>) -> Result<Vec<u8>> {
    if nx == 0 || ny == 0 {
        return Err(Error::param("cannot render an empty grid"));
    }
    let n = nx * ny;
    if layers.field.is_some_and(|f| f.values.len() != n)
        || layers.labels.is_some_and(|l| l.len() != n)
        || layers.fan.is_some_and(|g| g.bits.len() != n)
    {
        return Err(Error::param(format!("layers do not match the {nx}×{ny} grid")));
    }
    let gray = layers.field.map(|f| {
        let lo = f.values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = f.values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let span = hi - lo;
        move |i: usize| -> u8 {
            if span > 0.0 && span.is_finite() {
                (((f.values[i] - lo) / span) * 255.0).round().clamp(0.0, 255.0) as u8
            } else {
                128
            }
        }
    });
    let mut out = format!("P6\n{nx} {ny}\n255\n").into_bytes();
    out.reserve(3 * n);
    for y in (0..ny).rev() {
        for x in 0..nx {
            let i = y * nx + x;
            let mut rgb = match &gray {
                Some(g) => [g(i); 3],
                None => [0; 3],
            };
            if let Some(c) = layers.labels.and_then(|l| label_colour(l[i])) {
                rgb = c;
            }
            if layers.fan.is_some_and(|g| g.bits[i]) {
                rgb = [255; 3];
            }
            out.extend_from_slice(&rgb);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_black_pixel() {
        let labels = [0u32];
        let img = render_image(1, 1, Layers { labels: Some(&labels), ..Layers::default() }).unwrap();
        assert_eq!(img, b"P6\n1 1\n255\n\0\0\0");
    }

    #[test]
    fn rows_run_top_down() {
        let mut fan = BitGrid::new(2, 2);
        fan.set(0, 1);
        let img = render_image(2, 2, Layers { fan: Some(&fan), ..Layers::default() }).unwrap();
        let body = &img[img.len() - 12..];
        assert_eq!(&body[..3], &[255, 255, 255]);
        assert!(body[3..].iter().all(|&b| b == 0));
    }

    #[test]
    fn csv_layout() {
        let b = write_csv(&["a", "b"], &[vec!["1".into(), "x,y".into()]]).unwrap();
        assert_eq!(String::from_utf8(b).unwrap(), "a,b\n1,\"x,y\"\n");
    }
}
