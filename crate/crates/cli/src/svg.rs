//! Square-ring schematic. One square per η, nested from the outside in;
//! the pair starts at the bottom-left corner and meets at the top-right.

use std::fmt::Write as _;

use qsr_core::sweep::{ArmColoring, ArmId, ColoredSegment, SegmentColor};
use qsr_core::BellFamilyState;

const SIZE: f64 = 512.0;
const MARGIN: f64 = 56.0;
const BLUE: &str = "#1f77b4";
const RED: &str = "#d62728";
const GRAY: &str = "#7f7f7f";
const CONTINUOUS: &str = "#2ca02c";

fn point(arm: ArmId, x0: f64, y0: f64, side: f64, t: f64) -> (f64, f64) {
    let bottom = y0 + side;
    match arm {
        ArmId::Eta1 => (x0 + t * side, bottom),
        ArmId::Delta1 => (x0 + side, bottom - t * side),
        ArmId::Eta2 => (x0, bottom - t * side),
        ArmId::Delta2 => (x0 + t * side, y0),
    }
}

fn stroke(color: SegmentColor) -> (&'static str, &'static str) {
    match color {
        SegmentColor::Zero => (BLUE, ""),
        SegmentColor::Pi => (RED, ""),
        SegmentColor::Continuous => (CONTINUOUS, ""),
        SegmentColor::Undefined => (GRAY, r#" stroke-dasharray="6 4""#),
    }
}

fn segment(
    s: &mut String,
    arm: ArmId,
    seg: &ColoredSegment,
    eta: f64,
    x0: f64,
    y0: f64,
    side: f64,
) {
    let (a, b) = (seg.start / eta, seg.end / eta);
    let (color, dash) = stroke(seg.color);
    let (x1, y1) = point(arm, x0, y0, side, a);
    if seg.start == seg.end {
        // singular point
        let _ = writeln!(
            s,
            r#"  <circle cx="{x1:.2}" cy="{y1:.2}" r="5" fill="white" stroke="{GRAY}" stroke-width="2" stroke-dasharray="3 2"/>"#
        );
        return;
    }
    let (x2, y2) = point(arm, x0, y0, side, b);
    let _ = writeln!(
        s,
        r#"  <line x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}" stroke="{color}" stroke-width="4"{dash}/>"#
    );
}

pub fn render(state: &BellFamilyState, rings: &[ArmColoring]) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="512" height="512" viewBox="0 0 512 512">"#
    );
    let _ = writeln!(s, r#"  <rect width="512" height="512" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"  <text x="256" y="28" font-family="sans-serif" font-size="16" text-anchor="middle">{state}</text>"#
    );
    let full = SIZE - 2.0 * MARGIN;
    let step = (160.0 / rings.len().max(1) as f64).min(40.0);
    for (i, ring) in rings.iter().enumerate() {
        let inset = i as f64 * step;
        let (x0, y0, side) = (MARGIN + inset, MARGIN + inset, full - 2.0 * inset);
        let eta = ring.eta.radians();
        let _ = writeln!(s, r#"  <g id="ring-{i}">"#);
        for arm in &ring.arms {
            let (lines, markers): (Vec<_>, Vec<_>) =
                arm.segments.iter().partition(|g| g.start != g.end);
            for g in lines.into_iter().chain(markers) {
                segment(&mut s, arm.arm, g, eta, x0, y0, side);
            }
        }
        let _ = writeln!(
            s,
            r#"  <text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="12">eta = {}</text>"#,
            x0 + 6.0,
            y0 + side - 8.0,
            ring.eta
        );
        let _ = writeln!(s, "  </g>");
    }
    let legend = [
        (BLUE, "", "geometric phase 0"),
        (RED, "", "geometric phase pi"),
        (CONTINUOUS, "", "continuous"),
        (GRAY, r#" stroke-dasharray="6 4""#, "undefined"),
    ];
    let y = SIZE - 22.0;
    for (k, (color, dash, label)) in legend.iter().enumerate() {
        let x = 24.0 + 124.0 * k as f64;
        let _ = writeln!(
            s,
            r#"  <line x1="{x:.0}" y1="{y:.0}" x2="{:.0}" y2="{y:.0}" stroke="{color}" stroke-width="4"{dash}/>"#,
            x + 24.0
        );
        let _ = writeln!(
            s,
            r#"  <text x="{:.0}" y="{:.0}" font-family="sans-serif" font-size="11">{label}</text>"#,
            x + 30.0,
            y + 4.0
        );
    }
    s.push_str("</svg>\n");
    s
}
