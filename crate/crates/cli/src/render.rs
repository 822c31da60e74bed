use std::fmt::Write;

use bratteli::value::{format_rational, Rational};
use bratteli::{BratteliDiagram, Result, Value};
use num::ToPrimitive;
use serde_json::{json, Value as Json};

/// `"p/q"` for exact values, `{"lo", "hi"}` for intervals; with `float`,
/// a decimal approximation and a bound on its error is added.
pub fn value(v: &Value, float: bool) -> Json {
    let exact = match v.as_exact() {
        Some(r) => json!(format_rational(r)),
        None => json!({"lo": format_rational(v.lo()), "hi": format_rational(v.hi())}),
    };
    if !float {
        return exact;
    }
    let approx = v.to_f64();
    // half the interval width plus the rounding of the midpoint
    let half = (v.width() / Rational::from_integer(2.into())).to_f64().unwrap_or(f64::INFINITY);
    let bound = half + approx.abs() * f64::EPSILON;
    json!({"exact": exact, "float": approx, "error_bound": bound})
}

pub fn rational(r: &Rational) -> Json {
    json!(format_rational(r))
}

pub fn values(vs: &[Value], float: bool) -> Json {
    Json::Array(vs.iter().map(|v| value(v, float)).collect())
}

pub fn matrix(m: &[Vec<Value>], float: bool) -> Json {
    Json::Array(m.iter().map(|r| values(r, float)).collect())
}

/// DOT digraph of levels `0..=depth`, one rank per level.
pub fn dot(d: &BratteliDiagram, depth: usize, collapse: bool) -> Result<String> {
    let mut s = String::new();
    writeln!(s, "digraph bratteli {{").unwrap();
    writeln!(s, "  rankdir=TB;").unwrap();
    writeln!(s, "  node [shape=circle, label=\"\", width=0.25];").unwrap();
    for n in 0..=depth {
        let k = d.vertex_count(n)?;
        let names: Vec<String> = (0..k).map(|v| format!("v{n}_{v}")).collect();
        writeln!(s, "  {{ rank=same; {}; }}", names.join("; ")).unwrap();
    }
    for n in 0..depth {
        let f = d.incidence(n)?;
        for w in 0..f.nrows() {
            for v in 0..f.ncols() {
                let m = f.get(w, v);
                if m == 0 {
                    continue;
                }
                if collapse {
                    writeln!(s, "  v{n}_{v} -> v{}_{w} [label=\"{m}\"];", n + 1).unwrap();
                } else {
                    for e in 0..m {
                        writeln!(s, "  v{n}_{v} -> v{}_{w} [label=\"{e}\"];", n + 1).unwrap();
                    }
                }
            }
        }
    }
    writeln!(s, "}}").unwrap();
    Ok(s)
}
