//! Browser demo: a handful of library operations exposed through
//! wasm-bindgen for `www/index.html`. Each export is a thin wrapper around a
//! plain Rust function of the same name so the logic is testable natively.

use std::fmt::Write;

use bratteli::constructions::claim1_pair;
use bratteli::rperm::RationalPermutation;
use bratteli::value::format_rational;
use bratteli::{Alpha, BratteliDiagram, IntMatrix, Perm};
use wasm_bindgen::prelude::*;

const WIDTH: f64 = 640.0;
const ROW: f64 = 80.0;
const MARGIN: f64 = 30.0;

/// The diagrams offered by the page.
pub fn named_diagram(name: &str) -> Result<BratteliDiagram, String> {
    match name {
        "odometer2" => BratteliDiagram::odometer(2).map_err(|e| e.to_string()),
        "odometer3" => BratteliDiagram::odometer(3).map_err(|e| e.to_string()),
        "br" => Ok(BratteliDiagram::br()),
        "fibonacci" => {
            let f = IntMatrix::from_rows(vec![vec![1, 1], vec![1, 0]]);
            BratteliDiagram::stationary(vec![1, 1], f).map_err(|e| e.to_string())
        }
        other => Err(format!("unknown diagram {other:?}")),
    }
}

fn vertex_xy(n: usize, v: usize, k: usize) -> (f64, f64) {
    (WIDTH * (v + 1) as f64 / (k + 1) as f64, MARGIN + ROW * n as f64)
}

/// SVG drawing of levels `0..=depth`. Multi-edges fan out as curves; vertex
/// labels show the number of paths from the root.
pub fn diagram_svg(name: &str, depth: usize) -> Result<String, String> {
    let depth = depth.min(6);
    let d = named_diagram(name)?;
    let height = 2.0 * MARGIN + ROW * depth as f64;
    let mut s = String::new();
    let _ = write!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" viewBox="0 0 {WIDTH} {height}">"#
    );
    let mut counts = Vec::with_capacity(depth + 1);
    for n in 0..=depth {
        counts.push(d.path_counts(n).map_err(|e| e.to_string())?);
    }
    for n in 0..depth {
        let f = d.incidence(n).map_err(|e| e.to_string())?;
        for w in 0..f.nrows() {
            for v in 0..f.ncols() {
                let m = f.get(w, v);
                let (x0, y0) = vertex_xy(n, v, f.ncols());
                let (x1, y1) = vertex_xy(n + 1, w, f.nrows());
                // more than a few parallel edges are drawn as one labelled line
                if m > 4 {
                    let _ = write!(
                        s,
                        r##"<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y1}" stroke="#555" stroke-width="2"/><text x="{}" y="{}" font-size="11">{m}</text>"##,
                        (x0 + x1) / 2.0 + 4.0,
                        (y0 + y1) / 2.0
                    );
                    continue;
                }
                for e in 0..m {
                    let bend = (e as f64 - (m as f64 - 1.0) / 2.0) * 18.0;
                    let (cx, cy) = ((x0 + x1) / 2.0 + bend, (y0 + y1) / 2.0);
                    let _ = write!(
                        s,
                        r##"<path d="M{x0},{y0} Q{cx},{cy} {x1},{y1}" fill="none" stroke="#555"/>"##
                    );
                }
            }
        }
    }
    for (n, level) in counts.iter().enumerate() {
        for (v, h) in level.iter().enumerate() {
            let (x, y) = vertex_xy(n, v, level.len());
            let _ = write!(
                s,
                r##"<circle cx="{x}" cy="{y}" r="12" fill="#fff" stroke="#222"/><text x="{x}" y="{}" font-size="10" text-anchor="middle">{h}</text>"##,
                y + 4.0
            );
        }
    }
    s.push_str("</svg>");
    Ok(s)
}

fn parse_images(text: &str) -> Result<Vec<usize>, String> {
    text.split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|_| format!("{t:?} is not an index")))
        .collect()
}

/// Cycles, fixed-set measure and χ_k of a rational permutation given by the
/// images of its blocks, e.g. `"1,0,2"` and `k = "2"` or `"inf"`.
pub fn rperm_report(images: &str, k: &str) -> Result<String, String> {
    let perm = Perm::from_images(parse_images(images)?).map_err(|e| e.to_string())?;
    let g = RationalPermutation::new(perm).map_err(|e| e.to_string())?;
    let alpha = match k.trim() {
        "inf" => Alpha::Infinite,
        s => Alpha::Finite(s.parse().map_err(|_| format!("k = {s:?} is not a natural number or inf"))?),
    };
    Ok(format!(
        "blocks of length 1/{}\ncycles {}\nλ(Fix g) = {}\nχ_{}(g) = {}",
        g.denominator(),
        g.perm(),
        format_rational(&g.fix_measure()),
        k.trim(),
        format_rational(&g.char_r(alpha)),
    ))
}

/// The two p-cycles whose quotient has only even cycles.
pub fn claim1_report(p: usize) -> Result<String, String> {
    if !(2..=40).contains(&p) {
        return Err("p must lie in 2..=40".into());
    }
    let c = claim1_pair(p).map_err(|e| e.to_string())?;
    let q = c.h0.compose(&c.h1.inverse());
    Ok(format!(
        "acting on {} points\nh0 = {}\nh1 = {}\nh0 h1⁻¹ = {}\ncycle type {:?}",
        c.m,
        c.h0,
        c.h1,
        q,
        q.cycle_type()
    ))
}

#[wasm_bindgen(js_name = diagramSvg)]
pub fn diagram_svg_js(name: &str, depth: usize) -> Result<String, JsError> {
    diagram_svg(name, depth).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = rpermReport)]
pub fn rperm_report_js(images: &str, k: &str) -> Result<String, JsError> {
    rperm_report(images, k).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = claim1Report)]
pub fn claim1_report_js(p: usize) -> Result<String, JsError> {
    claim1_report(p).map_err(|e| JsError::new(&e))
}
