//! SVG output. Coordinates stay exact until they are written.

use std::fmt::Write as _;

use thiserror::Error;

use crate::geometry::{Isometry, Point};
use crate::patch::Patch;
use crate::protoset::{EdgeLabel, PlacedTile, Protoset, ProtosetError, WorldTile};
use crate::scalar::Scalar;

#[derive(Debug, Error)]
pub enum RenderError {
    #[error("scale must be positive")]
    Scale,
    #[error("nothing to draw")]
    Empty,
    #[error(transparent)]
    Protoset(#[from] ProtosetError),
}

#[derive(Clone, Debug)]
pub struct RenderStyle {
    /// Pixels per unit length.
    pub scale: Scalar,
    pub stroke_width: f64,
    pub show_marks: bool,
    pub show_labels: bool,
    pub decimals: usize,
}

impl Default for RenderStyle {
    fn default() -> Self {
        RenderStyle { scale: Scalar::int(100), stroke_width: 1.0, show_marks: false, show_labels: false, decimals: 9 }
    }
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

struct Canvas {
    min: (f64, f64),
    max: (f64, f64),
    scale: f64,
    margin: f64,
    decimals: usize,
}

impl Canvas {
    fn num(&self, v: f64) -> String {
        let s = format!("{:.*}", self.decimals, v);
        // avoid "-0.000..."
        if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
            s.trim_start_matches('-').to_string()
        } else {
            s
        }
    }

    fn xy(&self, p: &Point) -> String {
        let (x, y) = p.to_f64();
        let sx = (x - self.min.0) * self.scale + self.margin;
        let sy = (self.max.1 - y) * self.scale + self.margin;
        format!("{} {}", self.num(sx), self.num(sy))
    }

    fn size(&self) -> (String, String) {
        let w = (self.max.0 - self.min.0) * self.scale + 2.0 * self.margin;
        let h = (self.max.1 - self.min.1) * self.scale + 2.0 * self.margin;
        (self.num(w), self.num(h))
    }
}

fn label_text(l: &EdgeLabel) -> Option<String> {
    match l {
        EdgeLabel::Plain => None,
        EdgeLabel::Bump { key } => Some(format!("+{}", key.0)),
        EdgeLabel::Nick { key } => Some(format!("-{}", key.0)),
    }
}

fn draw(ps: &Protoset, tiles: &[PlacedTile], style: &RenderStyle) -> Result<String, RenderError> {
    if !style.scale.is_positive() {
        return Err(RenderError::Scale);
    }
    let world: Vec<WorldTile> = tiles.iter().map(|t| ps.world_unchecked(t).ok_or_else(|| ProtosetError::UnknownTile(t.prototile.0.clone()))).collect::<Result<_, _>>()?;
    if world.is_empty() {
        return Err(RenderError::Empty);
    }
    let mut min = (f64::INFINITY, f64::INFINITY);
    let mut max = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for w in &world {
        for p in &w.pts {
            let (x, y) = p.to_f64();
            min = (min.0.min(x), min.1.min(y));
            max = (max.0.max(x), max.1.max(y));
        }
    }
    let scale = style.scale.to_f64();
    let c = Canvas { min, max, scale, margin: 2.0 * style.stroke_width.max(1.0), decimals: style.decimals };
    let (w, h) = c.size();
    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#);
    let _ = writeln!(out, r##"<g class="tiles" stroke="#000000" stroke-width="{}" stroke-linejoin="round">"##, c.num(style.stroke_width));
    for (t, wt) in tiles.iter().zip(&world) {
        let proto = ps.tile(&t.prototile)?;
        let fill = if proto.color.is_empty() { "#cccccc".to_string() } else { esc(&proto.color) };
        let mut d = String::new();
        for (i, p) in wt.pts.iter().enumerate() {
            let _ = write!(d, "{}{}", if i == 0 { "M " } else { " L " }, c.xy(p));
        }
        let _ = writeln!(out, r#"<path data-tile="{}" fill="{fill}" d="{d} Z"/>"#, esc(&t.prototile.0));
    }
    let _ = writeln!(out, "</g>");
    if style.show_marks {
        let _ = writeln!(out, r##"<g class="marks" stroke="#e00000" stroke-width="{}" fill="none">"##, c.num(style.stroke_width * 2.0));
        for t in tiles {
            let proto = ps.tile(&t.prototile)?;
            for m in &proto.marks {
                let (a, b) = (t.pose.apply(&m.0), t.pose.apply(&m.1));
                let _ = writeln!(out, r#"<path d="M {} L {}"/>"#, c.xy(&a), c.xy(&b));
            }
        }
        let _ = writeln!(out, "</g>");
    }
    if style.show_labels {
        let _ = writeln!(out, r#"<g class="labels" font-family="sans-serif" font-size="{}" text-anchor="middle">"#, c.num(scale * 0.08));
        for wt in &world {
            for k in 0..wt.pts.len() {
                let Some(txt) = label_text(&wt.labels[k]) else { continue };
                let (p, q) = wt.edge(k);
                let xy = c.xy(&p.midpoint(q));
                let (x, y) = xy.split_once(' ').expect("two numbers");
                let _ = writeln!(out, r#"<text x="{x}" y="{y}">{}</text>"#, esc(&txt));
            }
        }
        let _ = writeln!(out, "</g>");
    }
    let _ = writeln!(out, "</svg>");
    Ok(out)
}

pub fn render_patch(ps: &Protoset, patch: &Patch, style: &RenderStyle) -> Result<String, RenderError> {
    draw(ps, &patch.tiles, style)
}

/// Prototiles side by side in their own frames, left to right.
pub fn render_protoset(ps: &Protoset, style: &RenderStyle) -> Result<String, RenderError> {
    let mut placed = Vec::new();
    let mut x = Scalar::zero();
    let gap = Scalar::frac(1, 4);
    for t in &ps.tiles {
        let lo = t.boundary.iter().map(|p| p.x.clone()).min().ok_or(RenderError::Empty)?;
        let hi = t.boundary.iter().map(|p| p.x.clone()).max().ok_or(RenderError::Empty)?;
        placed.push(PlacedTile { prototile: t.name.clone(), pose: Isometry::translation(Point::new(&x - &lo, Scalar::zero())) });
        x = &(&x + &(&hi - &lo)) + &gap;
    }
    draw(ps, &placed, style)
}
