//! Static SVG figures. Output is plain text built with `write!`, with
//! coordinates rounded to two decimals so figures are reproducible.

use std::collections::{HashMap, VecDeque};
use std::fmt::Write;

use crate::flood::FloodScene;
use crate::fusion::{OverlayScene, Point};
use crate::translation::{ChangeMap, NumericGrid};

fn header(out: &mut String, w: f64, h: f64) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.0} {h:.0}">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Parcels in columns by flow depth, shaded by interval width (darker is
/// tighter), with flow arrows.
pub fn flood(scene: &FloodScene) -> String {
    let n = scene.parcels().len();
    let edges: Vec<(usize, usize)> = scene
        .flows()
        .iter()
        .map(|f| (scene.index_of(&f.from).expect("valid"), scene.index_of(&f.to).expect("valid")))
        .collect();
    let mut indegree = vec![0usize; n];
    for &(_, b) in &edges {
        indegree[b] += 1;
    }
    let mut depth = vec![usize::MAX; n];
    let mut queue: VecDeque<usize> = (0..n).filter(|&i| indegree[i] == 0).collect();
    for &i in &queue {
        depth[i] = 0;
    }
    while let Some(u) = queue.pop_front() {
        for &(a, b) in &edges {
            if a == u && depth[b] == usize::MAX {
                depth[b] = depth[u] + 1;
                queue.push_back(b);
            }
        }
    }
    for d in depth.iter_mut() {
        if *d == usize::MAX {
            *d = 0;
        }
    }
    let mut rows: HashMap<usize, usize> = HashMap::new();
    let mut pos = vec![(0.0, 0.0); n];
    for i in 0..n {
        let r = rows.entry(depth[i]).or_insert(0);
        pos[i] = (40.0 + depth[i] as f64 * 160.0, 40.0 + *r as f64 * 70.0);
        *r += 1;
    }
    let cols = depth.iter().max().map_or(1, |d| d + 1);
    let max_rows = rows.values().max().copied().unwrap_or(1);
    let (w, h) = (cols as f64 * 160.0 + 40.0, max_rows as f64 * 70.0 + 40.0);
    let global = scene.global_bounds().width().unwrap_or(i64::MAX).max(1) as f64;

    let mut out = String::new();
    header(&mut out, w, h);
    let _ = writeln!(
        out,
        r##"<defs><marker id="arrow" markerWidth="8" markerHeight="8" refX="8" refY="4" orient="auto"><path d="M0,0 L8,4 L0,8 z" fill="#335"/></marker></defs>"##
    );
    for &(a, b) in &edges {
        let (x1, y1) = (pos[a].0 + 110.0, pos[a].1 + 20.0);
        let (x2, y2) = (pos[b].0, pos[b].1 + 20.0);
        let _ = writeln!(
            out,
            r##"<line x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}" stroke="#335" marker-end="url(#arrow)"/>"##
        );
    }
    for (i, p) in scene.parcels().iter().enumerate() {
        let tight = match p.current.width() {
            Some(wd) => 1.0 - (wd as f64 / global).clamp(0.0, 1.0),
            None => 0.0,
        };
        let shade = (235.0 - tight * 170.0).round() as u8;
        let (x, y) = pos[i];
        let stroke = if p.observed.is_some() { "#000" } else { "#888" };
        let _ = writeln!(
            out,
            r#"<rect x="{x:.2}" y="{y:.2}" width="110" height="40" fill="rgb({shade},{shade},255)" stroke="{stroke}"/>"#
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-size="12" font-family="sans-serif">{} {}</text>"#,
            x + 6.0,
            y + 25.0,
            escape(&p.id),
            escape(&p.current.to_string())
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Roads grey, streams blue, observed bridges filled, inferred bridges hollow.
pub fn overlay(scene: &OverlayScene) -> String {
    let pts: Vec<Point> = scene
        .features()
        .flat_map(|f| f.polyline.iter().copied())
        .chain(scene.bridges.iter().map(|b| b.location))
        .collect();
    let (mut minx, mut miny, mut maxx, mut maxy) = (0.0f64, 0.0f64, 1.0f64, 1.0f64);
    if let Some(p) = pts.first() {
        (minx, miny, maxx, maxy) = (p.x, p.y, p.x, p.y);
        for p in &pts {
            minx = minx.min(p.x);
            miny = miny.min(p.y);
            maxx = maxx.max(p.x);
            maxy = maxy.max(p.y);
        }
    }
    let span = (maxx - minx).max(maxy - miny).max(1e-9);
    let scale = 560.0 / span;
    let tx = |p: Point| (20.0 + (p.x - minx) * scale, 20.0 + (maxy - p.y) * scale);
    let mut out = String::new();
    header(&mut out, 600.0, 600.0);
    for (list, colour, width) in [(&scene.roads, "#777", 3), (&scene.streams, "#2a6fdb", 2)] {
        for f in list {
            let d: Vec<String> = f
                .polyline
                .iter()
                .map(|&p| {
                    let (x, y) = tx(p);
                    format!("{x:.2},{y:.2}")
                })
                .collect();
            let _ = writeln!(
                out,
                r#"<polyline points="{}" fill="none" stroke="{colour}" stroke-width="{width}"><title>{}</title></polyline>"#,
                d.join(" "),
                escape(&f.id)
            );
        }
    }
    for b in &scene.bridges {
        let (x, y) = tx(b.location);
        let fill = if b.inferred { "none" } else { "#c33" };
        let _ = writeln!(
            out,
            r##"<circle cx="{x:.2}" cy="{y:.2}" r="5" fill="{fill}" stroke="#c33" stroke-width="2"><title>{}</title></circle>"##,
            escape(&b.id)
        );
    }
    out.push_str("</svg>\n");
    out
}

const CELL: f64 = 24.0;

/// Changed cells red, unchanged grey, conflicts hatched.
pub fn change_map(map: &ChangeMap) -> String {
    let mut out = String::new();
    header(&mut out, map.width as f64 * CELL, map.height as f64 * CELL);
    let _ = writeln!(
        out,
        r##"<defs><pattern id="hatch" width="6" height="6" patternUnits="userSpaceOnUse" patternTransform="rotate(45)"><rect width="6" height="6" fill="#fff"/><line x1="0" y1="0" x2="0" y2="6" stroke="#555" stroke-width="2"/></pattern></defs>"##
    );
    for (i, c) in map.cells.iter().enumerate() {
        let (x, y) = ((i % map.width) as f64 * CELL, (i / map.width) as f64 * CELL);
        let fill = if c.is_conflict() {
            "url(#hatch)"
        } else if c.changed {
            "#d33"
        } else {
            "#ddd"
        };
        let _ = writeln!(
            out,
            r##"<rect x="{x:.2}" y="{y:.2}" width="{CELL}" height="{CELL}" fill="{fill}" stroke="#fff"/>"##
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Grey ramp from 0 (white) to the grid maximum (black).
pub fn numeric(grid: &NumericGrid) -> String {
    let max = grid.cells.iter().cloned().fold(0.0f64, f64::max);
    let mut out = String::new();
    header(&mut out, grid.width as f64 * CELL, grid.height as f64 * CELL);
    for (i, v) in grid.cells.iter().enumerate() {
        let (x, y) = ((i % grid.width) as f64 * CELL, (i / grid.width) as f64 * CELL);
        let t = if max > 0.0 { (v / max).clamp(0.0, 1.0) } else { 0.0 };
        let g = (255.0 * (1.0 - t)).round() as u8;
        let _ = writeln!(
            out,
            r#"<rect x="{x:.2}" y="{y:.2}" width="{CELL}" height="{CELL}" fill="rgb({g},{g},{g})"/>"#
        );
    }
    out.push_str("</svg>\n");
    out
}
