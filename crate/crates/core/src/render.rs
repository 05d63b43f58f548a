//! SVG output: single polygons and left-to-right galleries.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::{Point, SimplePolygon};
use crate::synthetic::bounds;

/// Gallery cell size in SVG user units.
pub const CELL: f64 = 256.0;

/// Maps points uniformly into `[x0 + pad, x0 + size - pad]`-style box, flipping y.
fn fit(points: &[Point], x0: f64, y0: f64, size: f64, pad: f64) -> Vec<Point> {
    let (lo, hi) = bounds(points);
    let span = (hi.x - lo.x).max(hi.y - lo.y).max(f64::MIN_POSITIVE);
    let scale = (size - 2.0 * pad) / span;
    let cx = (lo.x + hi.x) / 2.0;
    let cy = (lo.y + hi.y) / 2.0;
    points
        .iter()
        .map(|p| {
            Point::new(
                x0 + size / 2.0 + (p.x - cx) * scale,
                y0 + size / 2.0 - (p.y - cy) * scale,
            )
        })
        .collect()
}

fn path_data(points: &[Point]) -> String {
    let mut d = String::new();
    for (i, p) in points.iter().enumerate() {
        let _ = write!(
            d,
            "{}{:.2},{:.2} ",
            if i == 0 { "M" } else { "L" },
            p.x,
            p.y
        );
    }
    d.push('Z');
    d
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// One polygon scaled into a 512×512 view box with a 5% margin.
pub fn polygon_svg(points: &[Point]) -> String {
    let size = 512.0;
    let placed = fit(points, 0.0, 0.0, size, 0.05 * size);
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 512 512\" width=\"512\" height=\"512\">\n\
         <path d=\"{}\" fill=\"#cfd8e3\" stroke=\"#1f3a5f\" stroke-width=\"2\"/>\n</svg>\n",
        path_data(&placed)
    )
}

/// Polygons laid out left to right, one `CELL`-sized cell each, label beneath.
pub fn gallery_svg(polygons: &[SimplePolygon], labels: &[String]) -> Result<String> {
    if polygons.is_empty() {
        return Err(Error::NothingToRender);
    }
    let width = CELL * polygons.len() as f64;
    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {width} {CELL}\" width=\"{width}\" height=\"{CELL}\">\n"
    );
    for (i, poly) in polygons.iter().enumerate() {
        let x0 = CELL * i as f64;
        // leave the bottom strip for the label
        let placed = fit(poly.vertices(), x0, 0.0, CELL - 24.0, 16.0);
        let _ = writeln!(
            out,
            "<rect x=\"{x0}\" y=\"0\" width=\"{CELL}\" height=\"{CELL}\" fill=\"none\" stroke=\"#bbbbbb\"/>"
        );
        let _ = writeln!(
            out,
            "<path d=\"{}\" fill=\"#cfd8e3\" stroke=\"#1f3a5f\" stroke-width=\"2\"/>",
            path_data(&placed)
        );
        if let Some(label) = labels.get(i) {
            let _ = writeln!(
                out,
                "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\">{}</text>",
                x0 + CELL / 2.0,
                CELL - 8.0,
                escape(label)
            );
        }
    }
    out.push_str("</svg>\n");
    Ok(out)
}

pub fn render_svg(polygons: &[SimplePolygon], labels: &[String], out: &Path) -> Result<()> {
    let svg = gallery_svg(polygons, labels)?;
    std::fs::write(out, svg).map_err(|e| Error::io(out, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::validate_polygon;

    fn square() -> SimplePolygon {
        validate_polygon(&[
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(0.0, 1.0),
        ])
        .unwrap()
    }

    #[test]
    fn one_square_one_cell() {
        let svg = gallery_svg(&[square()], &["sq <1>".to_string()]).unwrap();
        assert!(svg.contains("viewBox=\"0 0 256 256\""));
        assert_eq!(svg.matches("<path").count(), 1);
        assert!(svg.contains('Z'));
        assert!(svg.contains("sq &lt;1&gt;"));
    }

    #[test]
    fn six_cells_in_a_row() {
        let polys = vec![square(); 6];
        let labels: Vec<String> = (0..6).map(|i| format!("#{i}")).collect();
        let svg = gallery_svg(&polys, &labels).unwrap();
        assert!(svg.contains(&format!("viewBox=\"0 0 {} 256\"", 6 * 256)));
        assert_eq!(svg.matches("<path").count(), 6);
        assert_eq!(svg.matches("<text").count(), 6);
    }

    #[test]
    fn empty_gallery_fails() {
        assert!(matches!(gallery_svg(&[], &[]), Err(Error::NothingToRender)));
    }

    #[test]
    fn single_polygon_margin() {
        let svg = polygon_svg(square().vertices());
        assert!(svg.contains("M25.60,486.40"));
        assert!(svg.contains("486.40,25.60"));
    }
}
