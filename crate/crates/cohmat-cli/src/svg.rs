//! Minimal hand-rolled SVG output: axes, polylines, filled regions, dots.
//! CSV remains the primary artifact; these plots are a convenience.

use crate::gfmt::g12;
use std::fmt::Write as _;

pub const W: f64 = 640.0;
pub const H: f64 = 480.0;
const ML: f64 = 60.0;
const MR: f64 = 20.0;
const MT: f64 = 20.0;
const MB: f64 = 50.0;

pub struct Plot {
    body: String,
    x_range: (f64, f64),
    y_range: (f64, f64),
}

impl Plot {
    pub fn new(x_range: (f64, f64), y_range: (f64, f64)) -> Self {
        Self {
            body: String::new(),
            x_range,
            y_range,
        }
    }

    fn sx(&self, x: f64) -> f64 {
        ML + (x - self.x_range.0) / (self.x_range.1 - self.x_range.0) * (W - ML - MR)
    }

    fn sy(&self, y: f64) -> f64 {
        H - MB - (y - self.y_range.0) / (self.y_range.1 - self.y_range.0) * (H - MT - MB)
    }

    pub fn polyline(&mut self, pts: &[(f64, f64)], color: &str, width: f64) {
        if pts.is_empty() {
            return;
        }
        let coords: Vec<String> = pts
            .iter()
            .map(|&(x, y)| format!("{},{}", g12(self.sx(x)), g12(self.sy(y))))
            .collect();
        let _ = writeln!(
            self.body,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="{width}"/>"#,
            coords.join(" ")
        );
    }

    pub fn filled(&mut self, pts: &[(f64, f64)], color: &str, opacity: f64) {
        if pts.is_empty() {
            return;
        }
        let coords: Vec<String> = pts
            .iter()
            .map(|&(x, y)| format!("{},{}", g12(self.sx(x)), g12(self.sy(y))))
            .collect();
        let _ = writeln!(
            self.body,
            r#"<polygon points="{}" fill="{color}" fill-opacity="{opacity}" stroke="none"/>"#,
            coords.join(" ")
        );
    }

    pub fn dot(&mut self, x: f64, y: f64, color: &str, r: f64) {
        let _ = writeln!(
            self.body,
            r#"<circle cx="{}" cy="{}" r="{r}" fill="{color}"/>"#,
            g12(self.sx(x)),
            g12(self.sy(y))
        );
    }

    pub fn label(&mut self, x: f64, y: f64, text: &str, color: &str) {
        let _ = writeln!(
            self.body,
            r#"<text x="{}" y="{}" font-size="12" fill="{color}">{text}</text>"#,
            g12(self.sx(x)),
            g12(self.sy(y))
        );
    }

    pub fn finish(self, x_label: &str, y_label: &str) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
        );
        let _ = writeln!(out, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
        out.push_str(&self.body);
        // axes on top of the plotted content
        let x0 = ML;
        let x1 = W - MR;
        let y0 = H - MB;
        let y1 = MT;
        let _ = writeln!(
            out,
            r#"<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black" stroke-width="1"/>"#
        );
        let _ = writeln!(
            out,
            r#"<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black" stroke-width="1"/>"#
        );
        for i in 0..=5 {
            let fx = self.x_range.0 + (self.x_range.1 - self.x_range.0) * i as f64 / 5.0;
            let fy = self.y_range.0 + (self.y_range.1 - self.y_range.0) * i as f64 / 5.0;
            let px = ML + (W - ML - MR) * i as f64 / 5.0;
            let py = H - MB - (H - MT - MB) * i as f64 / 5.0;
            let _ = writeln!(
                out,
                r#"<line x1="{px}" y1="{y0}" x2="{px}" y2="{}" stroke="black"/>"#,
                y0 + 4.0
            );
            let _ = writeln!(
                out,
                r#"<text x="{px}" y="{}" font-size="11" text-anchor="middle">{}</text>"#,
                y0 + 18.0,
                trim2(fx)
            );
            let _ = writeln!(
                out,
                r#"<line x1="{}" y1="{py}" x2="{x0}" y2="{py}" stroke="black"/>"#,
                x0 - 4.0
            );
            let _ = writeln!(
                out,
                r#"<text x="{}" y="{}" font-size="11" text-anchor="end">{}</text>"#,
                x0 - 8.0,
                py + 4.0,
                trim2(fy)
            );
        }
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" font-size="13" text-anchor="middle">{x_label}</text>"#,
            (ML + W - MR) / 2.0,
            H - 12.0
        );
        let _ = writeln!(
            out,
            r#"<text x="16" y="{}" font-size="13" text-anchor="middle" transform="rotate(-90 16 {})">{y_label}</text>"#,
            (MT + H - MB) / 2.0,
            (MT + H - MB) / 2.0
        );
        out.push_str("</svg>\n");
        out
    }
}

fn trim2(x: f64) -> String {
    let s = format!("{x:.2}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}
