//! Hand-written SVG for planar images: the image curve (or point cloud),
//! an extremal witness circle, and the extremal pair on the domain circle.

use std::fmt::Write;

use crate::domains::{DomainKind, SampledDomain};
use crate::geom::Sphere;
use crate::maps::ImageSet;

const PANEL: f64 = 400.0;
const PAD: f64 = 20.0;

struct Viewport {
    lo: [f64; 2],
    scale: f64,
    x0: f64,
}

impl Viewport {
    fn fit(points: impl Iterator<Item = [f64; 2]>, x0: f64) -> Self {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for p in points {
            for k in 0..2 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        let span = (hi[0] - lo[0]).max(hi[1] - lo[1]);
        let scale = if span > 0.0 { (PANEL - 2.0 * PAD) / span } else { 1.0 };
        Self { lo, scale, x0 }
    }

    fn map(&self, p: [f64; 2]) -> (f64, f64) {
        (
            self.x0 + PAD + (p[0] - self.lo[0]) * self.scale,
            PANEL - PAD - (p[1] - self.lo[1]) * self.scale,
        )
    }
}

/// Two panels: the image in ℝ² on the left, the domain on the right (only
/// drawn for S¹). Samples are joined in angular order on S¹, otherwise drawn
/// as dots.
pub fn neighbors_svg(
    domain: &SampledDomain,
    images: &ImageSet,
    witness: Option<&Sphere>,
    pair: Option<(usize, usize)>,
) -> Option<String> {
    if images.dim() != 2 {
        return None;
    }
    let circle = domain.kind() == DomainKind::Sphere(1);
    let width = if circle { 2.0 * PANEL } else { PANEL };
    let pt = |i: usize| [images.get(i)[0], images.get(i)[1]];

    let mut fit: Vec<[f64; 2]> = (0..images.len()).map(pt).collect();
    if let Some(w) = witness {
        let c = w.center.coords();
        fit.push([c[0] - w.radius, c[1] - w.radius]);
        fit.push([c[0] + w.radius, c[1] + w.radius]);
    }
    let vp = Viewport::fit(fit.into_iter(), 0.0);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{PANEL}" viewBox="0 0 {width} {PANEL}">"#
    );
    let _ = writeln!(s, r#"<rect width="{width}" height="{PANEL}" fill="white"/>"#);

    let order: Vec<usize> = if circle {
        let mut o: Vec<usize> = (0..domain.len()).collect();
        let angle = |i: usize| domain.sample(i)[1].atan2(domain.sample(i)[0]);
        o.sort_by(|&a, &b| angle(a).total_cmp(&angle(b)));
        o
    } else {
        (0..images.len()).collect()
    };
    if circle {
        let mut d = String::new();
        for (k, &i) in order.iter().enumerate() {
            let (x, y) = vp.map(pt(i));
            let _ = write!(d, "{}{x:.2},{y:.2} ", if k == 0 { "M" } else { "L" });
        }
        let _ = writeln!(s, r#"<path d="{d}Z" fill="none" stroke="black" stroke-width="1"/>"#);
    } else {
        for &i in &order {
            let (x, y) = vp.map(pt(i));
            let _ = writeln!(s, r#"<circle cx="{x:.2}" cy="{y:.2}" r="1" fill="black"/>"#);
        }
    }
    if let Some(w) = witness {
        let c = w.center.coords();
        let (x, y) = vp.map([c[0], c[1]]);
        let r = w.radius * vp.scale;
        let _ = writeln!(
            s,
            r#"<circle cx="{x:.2}" cy="{y:.2}" r="{r:.2}" fill="none" stroke="steelblue" stroke-dasharray="4 3"/>"#
        );
    }
    if let Some((a, b)) = pair {
        for i in [a, b] {
            let (x, y) = vp.map(pt(i));
            let _ = writeln!(s, r#"<circle cx="{x:.2}" cy="{y:.2}" r="4" fill="crimson"/>"#);
        }
    }

    if circle {
        let dp = Viewport::fit([[-1.0, -1.0], [1.0, 1.0]].into_iter(), PANEL);
        let (cx, cy) = dp.map([0.0, 0.0]);
        let _ = writeln!(
            s,
            r#"<circle cx="{cx:.2}" cy="{cy:.2}" r="{:.2}" fill="none" stroke="gray"/>"#,
            dp.scale
        );
        if let Some((a, b)) = pair {
            let pa = dp.map([domain.sample(a)[0], domain.sample(a)[1]]);
            let pb = dp.map([domain.sample(b)[0], domain.sample(b)[1]]);
            let _ = writeln!(
                s,
                r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="crimson"/>"#,
                pa.0, pa.1, pb.0, pb.1
            );
            for (x, y) in [pa, pb] {
                let _ = writeln!(s, r#"<circle cx="{x:.2}" cy="{y:.2}" r="4" fill="crimson"/>"#);
            }
        }
    }
    s.push_str("</svg>\n");
    Some(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::{sample_sphere, SamplingScheme};
    use crate::geom::Point;
    use crate::maps::{evaluate, MapSpec};

    #[test]
    fn identity_circle_drawing() {
        let d = sample_sphere(1, 32, 0, SamplingScheme::QuasiUniform).unwrap();
        let img = evaluate(&MapSpec::identity(2), &d).unwrap();
        let w = Sphere {
            center: Point::new(vec![0.0, 0.0]).unwrap(),
            radius: 1.0,
        };
        let svg = neighbors_svg(&d, &img, Some(&w), Some((0, 16))).unwrap();
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("fill=\"crimson\"").count(), 4);
        assert!(svg.contains("stroke-dasharray"));
    }

    #[test]
    fn only_planar_images() {
        let d = sample_sphere(1, 8, 0, SamplingScheme::QuasiUniform).unwrap();
        let img = evaluate(&MapSpec::identity(3), &d).unwrap();
        assert!(neighbors_svg(&d, &img, None, None).is_none());
    }
}
