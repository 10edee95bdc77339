use crate::commands::num;
use octabif_core::fibres::{BouquetGraph, ReducedFibre};
use octabif_core::singular::WilliamsonType;
use std::fmt::Write as _;

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

/// Static SVG 1.1 of the reduced chart: slice boundary, axes, level-set polylines and singular points.
pub fn render(f: Option<&ReducedFibre>, g: Option<&BouquetGraph>) -> String {
    let r = f.map(|f| f.r_max).unwrap_or(1.0).max(1e-9);
    let pad = 0.08 * r;
    let ext = r + pad;
    let lw = r / 300.0;
    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="600" height="600" viewBox="{} {} {} {}">"#,
        num(-ext),
        num(-ext),
        num(2.0 * ext),
        num(2.0 * ext)
    );
    let _ = writeln!(s, r#"<rect x="{}" y="{}" width="{}" height="{}" fill="white"/>"#, num(-ext), num(-ext), num(2.0 * ext), num(2.0 * ext));
    let _ = writeln!(s, r##"<g stroke="#999999" stroke-width="{}" fill="none">"##, num(lw));
    let _ = writeln!(s, r#"<line x1="{}" y1="0" x2="{}" y2="0"/>"#, num(-ext), num(ext));
    let _ = writeln!(s, r#"<line x1="0" y1="{}" x2="0" y2="{}"/>"#, num(-ext), num(ext));
    let _ = writeln!(s, r#"<circle cx="0" cy="0" r="{}"/>"#, num(r));
    if let Some(f) = f {
        if f.r_min > 0.0 {
            let _ = writeln!(s, r#"<circle cx="0" cy="0" r="{}"/>"#, num(f.r_min));
        }
    }
    s.push_str("</g>\n");
    if let (Some(f), Some(g)) = (f, g) {
        let _ = writeln!(s, r#"<g fill="none" stroke-width="{}">"#, num(2.0 * lw));
        for (i, pl) in f.polylines.iter().enumerate() {
            let colour = PALETTE[g.polyline_component[i] % PALETTE.len()];
            let pts: Vec<String> = pl.points.iter().map(|p| format!("{},{}", num(p[0]), num(-p[1]))).collect();
            let tag = if pl.closed { "polygon" } else { "polyline" };
            let _ = writeln!(s, r#"<{tag} stroke="{colour}" points="{}"/>"#, pts.join(" "));
        }
        s.push_str("</g>\n");
    }
    if let Some(f) = f {
        let d = 4.0 * lw;
        for rec in &f.singular_all {
            let Some((u, v)) = rec.uv() else { continue };
            let (x, y) = (u, -v);
            match rec.wtype {
                WilliamsonType::EllipticRegular => {
                    let _ = writeln!(s, r#"<circle cx="{}" cy="{}" r="{}" fill="black"/>"#, num(x), num(y), num(d));
                }
                _ => {
                    let _ = writeln!(
                        s,
                        r#"<path d="M{} {}L{} {}M{} {}L{} {}" stroke="black" stroke-width="{}"/>"#,
                        num(x - d),
                        num(y - d),
                        num(x + d),
                        num(y + d),
                        num(x - d),
                        num(y + d),
                        num(x + d),
                        num(y - d),
                        num(lw * 1.5)
                    );
                }
            }
        }
    }
    s.push_str("</svg>\n");
    s
}
