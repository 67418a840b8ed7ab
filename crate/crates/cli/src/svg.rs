//! SVG figure of a polygon with its Delaunay edges and extremal neighboring
//! circles.

use std::fmt::Write as _;

use esph::exactnum::rational_to_f64;
use esph::polygon2d::boundary_cycle;
use esph::report::Analysis;
use esph::spheres::SphereClass;
use esph::{Point, Result, Scalar};

const SIZE: f64 = 800.0;
const MARGIN: f64 = 0.05 * SIZE;

const STYLE: &str = "\
.polygon { fill: #f6f6f2; stroke: #222; stroke-width: 2; }
.dt-edge { stroke: #999; stroke-width: 1; }
.empty { fill: none; stroke: #2a6fb0; stroke-width: 1.2; }
.full { fill: none; stroke: #c0392b; stroke-width: 1.2; }
.ear { stroke-width: 3; }
.label { font: 14px sans-serif; fill: #222; }
";

/// Maps polygon coordinates into the square viewBox, y axis up.
struct Frame {
    min: [f64; 2],
    scale: f64,
    offset: [f64; 2],
}

impl Frame {
    fn fit(points: &[[f64; 2]]) -> Frame {
        let mut min = [f64::INFINITY; 2];
        let mut max = [f64::NEG_INFINITY; 2];
        for p in points {
            for k in 0..2 {
                min[k] = min[k].min(p[k]);
                max[k] = max[k].max(p[k]);
            }
        }
        let extent = (max[0] - min[0])
            .max(max[1] - min[1])
            .max(f64::MIN_POSITIVE);
        let scale = (SIZE - 2.0 * MARGIN) / extent;
        let offset = [
            MARGIN + (SIZE - 2.0 * MARGIN - (max[0] - min[0]) * scale) / 2.0,
            MARGIN + (SIZE - 2.0 * MARGIN - (max[1] - min[1]) * scale) / 2.0,
        ];
        Frame { min, scale, offset }
    }

    fn map(&self, p: [f64; 2]) -> (f64, f64) {
        (
            self.offset[0] + (p[0] - self.min[0]) * self.scale,
            SIZE - (self.offset[1] + (p[1] - self.min[1]) * self.scale),
        )
    }
}

fn approx(p: &Point) -> [f64; 2] {
    [rational_to_f64(&p[0]), rational_to_f64(&p[1])]
}

pub fn render(points: &[Point], analysis: &Analysis<Scalar>) -> Result<String> {
    let coords: Vec<[f64; 2]> = points.iter().map(approx).collect();
    let frame = Frame::fit(&coords);
    let mut out = String::new();
    let w = &mut out;
    // Writing into a String cannot fail.
    let _ = writeln!(w, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {SIZE} {SIZE}" width="{SIZE}" height="{SIZE}">"#
    );
    let _ = writeln!(w, "<style>\n{STYLE}</style>");

    let ring: Vec<String> = boundary_cycle(points)?
        .into_iter()
        .map(|i| {
            let (x, y) = frame.map(coords[i]);
            format!("{x:.3},{y:.3}")
        })
        .collect();
    let _ = writeln!(
        w,
        r#"<polygon class="polygon" points="{}"/>"#,
        ring.join(" ")
    );

    let mut edges = std::collections::BTreeSet::new();
    for tri in &analysis.lifted.dt.simplices {
        for (a, b) in [(tri[0], tri[1]), (tri[0], tri[2]), (tri[1], tri[2])] {
            edges.insert((a, b));
        }
    }
    let _ = writeln!(w, r#"<g class="dt-edges">"#);
    for (a, b) in edges {
        let (x1, y1) = frame.map(coords[a]);
        let (x2, y2) = frame.map(coords[b]);
        let _ = writeln!(
            w,
            r#"<line class="dt-edge" x1="{x1:.3}" y1="{y1:.3}" x2="{x2:.3}" y2="{y2:.3}"/>"#
        );
    }
    let _ = writeln!(w, "</g>");

    let d_ears = analysis.d_ears.simplices(&analysis.lifted.dt);
    let ud_ears = analysis.ud_ears.simplices(&analysis.lifted.udt);
    let _ = writeln!(w, r#"<g class="circles">"#);
    for rec in &analysis.spheres.records {
        let (class, ears) = match rec.class {
            SphereClass::Empty => ("empty", &d_ears),
            SphereClass::Full => ("full", &ud_ears),
            SphereClass::Neither => continue,
        };
        let ear = if ears.contains(&rec.vertex_ids) {
            " ear"
        } else {
            ""
        };
        let (cx, cy) = frame.map(approx(&rec.sphere.center));
        let r = rational_to_f64(&rec.sphere.radius_sq).sqrt() * frame.scale;
        let ids: Vec<String> = rec.vertex_ids.iter().map(|i| i.to_string()).collect();
        let _ = writeln!(
            w,
            r#"<circle class="{class}{ear}" data-vertices="{}" cx="{cx:.3}" cy="{cy:.3}" r="{r:.3}"/>"#,
            ids.join(",")
        );
    }
    let _ = writeln!(w, "</g>");

    let _ = writeln!(w, r#"<g class="labels">"#);
    for (i, &c) in coords.iter().enumerate() {
        let (x, y) = frame.map(c);
        let _ = writeln!(
            w,
            r#"<text class="label" x="{:.3}" y="{:.3}">{i}</text>"#,
            x + 6.0,
            y - 6.0
        );
    }
    let _ = writeln!(w, "</g>");
    let _ = writeln!(w, "</svg>");
    Ok(out)
}
