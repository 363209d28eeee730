//! File formats: CSV tables, JSON documents and the SVG phase diagram.

use std::fmt::Write as _;

use brine_core::variational::PhaseBoundary;
use serde::Serialize;

use crate::CliError;

/// Full-precision float formatting for CSV cells (17 significant digits).
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// CSV with a header and one row of floats per record.
pub fn float_csv(
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<f64>>,
) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.write_record(row.into_iter().map(fmt_f64))
            .map_err(csv_err)?;
    }
    w.into_inner().map_err(|e| CliError::Format(e.to_string()))
}

/// CSV of serializable records; the header comes from the field names.
pub fn records_csv<T: Serialize>(records: &[T]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in records {
        w.serialize(r).map_err(csv_err)?;
    }
    w.into_inner().map_err(|e| CliError::Format(e.to_string()))
}

/// Reads a magnetization table with the header `h,m`.
pub fn read_table(bytes: &[u8]) -> Result<Vec<(f64, f64)>, CliError> {
    let mut r = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(bytes);
    let header = r.headers().map_err(csv_err)?;
    if header.len() != 2 || &header[0] != "h" || &header[1] != "m" {
        return Err(CliError::Config(format!(
            "magnetization table must start with the header \"h,m\", found \"{}\"",
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut rows = Vec::new();
    for record in r.deserialize() {
        let row: (f64, f64) = record.map_err(csv_err)?;
        rows.push(row);
    }
    Ok(rows)
}

pub fn json<T: Serialize>(value: &T) -> Result<Vec<u8>, CliError> {
    let mut out = serde_json::to_vec_pretty(value).map_err(|e| CliError::Format(e.to_string()))?;
    out.push(b'\n');
    Ok(out)
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Format(e.to_string())
}

/// Plot of `h-(c)` and `h+(c)` with `h` horizontal and `c` vertical; the
/// phase-separation band between the curves is shaded.
pub fn phase_diagram_svg(boundary: &PhaseBoundary) -> String {
    const W: f64 = 640.0;
    const H: f64 = 480.0;
    const PAD: f64 = 60.0;
    let rows = &boundary.rows;
    let (mut h_lo, mut h_hi) = (0.0f64, 0.0f64);
    let (mut c_lo, mut c_hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for r in rows {
        h_lo = h_lo.min(r.h_minus).min(r.h_plus);
        h_hi = h_hi.max(r.h_minus).max(r.h_plus);
        c_lo = c_lo.min(r.c);
        c_hi = c_hi.max(r.c);
    }
    if c_hi <= c_lo || c_hi.is_nan() {
        c_lo = c_lo.min(0.0);
        c_hi = c_lo + 1.0;
    }
    if h_hi - h_lo < 1e-12 {
        h_lo -= 0.5;
        h_hi += 0.5;
    }
    let margin = 0.05 * (h_hi - h_lo);
    let (h_lo, h_hi) = (h_lo - margin, h_hi + margin);
    let x = |h: f64| PAD + (h - h_lo) / (h_hi - h_lo) * (W - 2.0 * PAD);
    let y = |c: f64| H - PAD - (c - c_lo) / (c_hi - c_lo) * (H - 2.0 * PAD);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let band: Vec<String> = rows
        .iter()
        .map(|r| format!("{:.3},{:.3}", x(r.h_minus), y(r.c)))
        .chain(
            rows.iter()
                .rev()
                .map(|r| format!("{:.3},{:.3}", x(r.h_plus), y(r.c))),
        )
        .collect();
    let _ = writeln!(
        s,
        r##"<polygon class="band" points="{}" fill="#9ecae1" fill-opacity="0.6" stroke="none"/>"##,
        band.join(" ")
    );
    for (class, pick, color) in [
        (
            "h-minus",
            (|r: &brine_core::variational::BoundaryRow| r.h_minus) as fn(&_) -> f64,
            "#08519c",
        ),
        ("h-plus", |r| r.h_plus, "#cb181d"),
    ] {
        let pts: Vec<String> = rows
            .iter()
            .map(|r| format!("{:.3},{:.3}", x(pick(r)), y(r.c)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline class="{class}" points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
            pts.join(" ")
        );
    }
    // axes
    let (x0, x1, y0, y1) = (PAD, W - PAD, H - PAD, PAD);
    let _ = writeln!(
        s,
        r#"<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/>"#
    );
    let _ = writeln!(
        s,
        r#"<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black"/>"#
    );
    if h_lo < 0.0 && h_hi > 0.0 {
        let xz = x(0.0);
        let _ = writeln!(
            s,
            r##"<line x1="{xz:.3}" y1="{y0}" x2="{xz:.3}" y2="{y1}" stroke="#888" stroke-dasharray="4 4"/>"##
        );
    }
    for k in 0..=4 {
        let t = k as f64 / 4.0;
        let h = h_lo + t * (h_hi - h_lo);
        let c = c_lo + t * (c_hi - c_lo);
        let _ = writeln!(
            s,
            r#"<text x="{:.3}" y="{}" text-anchor="middle">{h:.3}</text>"#,
            x(h),
            y0 + 18.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{:.3}" text-anchor="end">{c:.3}</text>"#,
            x0 - 6.0,
            y(c) + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">h</text>"#,
        W / 2.0,
        H - 15.0
    );
    let _ = writeln!(
        s,
        r#"<text x="15" y="{}" text-anchor="middle">c</text>"#,
        H / 2.0
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="30" text-anchor="middle">phase boundaries (m* = {:.5}, kappa = {})</text>"#,
        W / 2.0,
        boundary.m_star,
        boundary.kappa
    );
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use brine_core::variational::BoundaryRow;

    #[test]
    fn csv_cells_keep_seventeen_digits() {
        let x = 0.1 + 0.2;
        let cell = fmt_f64(x);
        assert_eq!(cell.parse::<f64>().unwrap(), x);
        assert_eq!(cell, "3.0000000000000004e-1");
    }

    #[test]
    fn table_header_is_required() {
        assert!(read_table(b"0.1,0.5\n0.2,0.6\n").is_err());
        let rows = read_table(b"h,m\n0.1, 0.5\n0.2,0.6\n").unwrap();
        assert_eq!(rows, vec![(0.1, 0.5), (0.2, 0.6)]);
    }

    #[test]
    fn svg_shades_band() {
        let b = PhaseBoundary {
            m_star: 0.9,
            kappa: 1.0,
            rows: vec![
                BoundaryRow {
                    c: 0.0,
                    h_minus: 0.0,
                    h_plus: 0.0,
                },
                BoundaryRow {
                    c: 0.1,
                    h_minus: -0.1,
                    h_plus: -0.02,
                },
            ],
        };
        let svg = phase_diagram_svg(&b);
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains(r#"class="band""#));
        assert_eq!(svg.matches("<polyline").count(), 2);
    }
}
