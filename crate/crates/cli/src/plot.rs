//! SVG route map.
//!
//! Targets are circles whose radius is proportional to their reward, blue
//! when collected and red otherwise; the depot is black. Each UAV's
//! collected prefix is one polyline starting at the depot. Elements carry
//! `data-*` attributes so the picture can be checked mechanically.

use std::fmt::Write as _;

use etop::{Instance, Point, Solution};

use crate::error::CliResult;

const MARGIN: f64 = 24.0;
const MAX_RADIUS: f64 = 10.0;
const DEPOT_RADIUS: f64 = 5.0;
const PALETTE: [&str; 8] = [
    "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf", "#bcbd22", "#7f7f7f",
];

fn route_color(k: usize) -> String {
    match PALETTE.get(k) {
        Some(c) => (*c).to_string(),
        None => format!("hsl({}, 60%, 40%)", (k * 47) % 360),
    }
}

struct Frame {
    min_x: f64,
    max_y: f64,
    scale: f64,
}

impl Frame {
    fn map(&self, p: Point) -> (f64, f64) {
        (
            MARGIN + (p.x - self.min_x) * self.scale,
            MARGIN + (self.max_y - p.y) * self.scale,
        )
    }
}

pub fn render(instance: &Instance, solution: &Solution, size: f64) -> CliResult<String> {
    let eval = instance.evaluate(solution)?;
    let kept = solution.collected_prefix(&eval);

    let points: Vec<Point> = std::iter::once(instance.depot())
        .chain(instance.targets().iter().map(|t| t.position))
        .collect();
    let min_x = points.iter().map(|p| p.x).fold(f64::INFINITY, f64::min);
    let max_x = points.iter().map(|p| p.x).fold(f64::NEG_INFINITY, f64::max);
    let min_y = points.iter().map(|p| p.y).fold(f64::INFINITY, f64::min);
    let max_y = points.iter().map(|p| p.y).fold(f64::NEG_INFINITY, f64::max);
    let span = (max_x - min_x).max(max_y - min_y);
    let span = if span > 0.0 { span } else { 1.0 };
    let frame = Frame {
        min_x,
        max_y,
        scale: (size - 2.0 * MARGIN).max(1.0) / span,
    };
    let width = 2.0 * MARGIN + (max_x - min_x) * frame.scale;
    let height = 2.0 * MARGIN + (max_y - min_y) * frame.scale;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.3} {height:.3}">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);

    let depot = frame.map(instance.depot());
    for (k, route) in kept.routes.iter().enumerate() {
        if route.is_empty() {
            continue;
        }
        let mut pts = format!("{:.3},{:.3}", depot.0, depot.1);
        for &id in route {
            let (x, y) = frame.map(instance.targets()[id - 1].position);
            let _ = write!(pts, " {x:.3},{y:.3}");
        }
        let ids: Vec<String> = route.iter().map(|id| id.to_string()).collect();
        let _ = writeln!(
            out,
            r#"<polyline class="route" data-uav="{k}" data-targets="{}" points="{pts}" fill="none" stroke="{}" stroke-width="2"/>"#,
            ids.join(" "),
            route_color(k),
        );
    }

    let max_reward = instance
        .targets()
        .iter()
        .map(|t| t.reward)
        .fold(0.0, f64::max);
    for t in instance.targets() {
        let (x, y) = frame.map(t.position);
        let reached = eval.collected[t.id - 1];
        let r = MAX_RADIUS * t.reward / max_reward;
        let _ = writeln!(
            out,
            r#"<circle class="target {}" data-id="{}" data-reward="{}" cx="{x:.3}" cy="{y:.3}" r="{r:.6}" fill="{}" fill-opacity="0.8"/>"#,
            if reached { "reached" } else { "unreached" },
            t.id,
            t.reward,
            if reached { "blue" } else { "red" },
        );
    }
    let _ = writeln!(
        out,
        r#"<circle class="depot" cx="{:.3}" cy="{:.3}" r="{DEPOT_RADIUS}" fill="black"/>"#,
        depot.0, depot.1
    );
    out.push_str("</svg>\n");
    Ok(out)
}
