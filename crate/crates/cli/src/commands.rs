use std::path::{Path, PathBuf};

use bratteli::character::{psd_check_exact, psd_check_numeric, Alpha, CharacterSpec, PsdVerdict};
use bratteli::constructions::{claim1_pair, make_hn, si_family};
use bratteli::files::{
    read_json, CharacterFile, ClopenFile, DiagramFile, ElementFile, MatrixFile, MeasureFile,
};
use bratteli::group::metric_d;
use bratteli::rperm::{to_rperm_at, RationalPermutation};
use bratteli::value::{format_rational, parse_rational, Rational};
use bratteli::{
    BratteliDiagram, ClopenSet, Conjugacy, Cuts, Edge, Error, EvenTelescoping, GroupElement, InvariantMeasure,
    Perm, Simplicity,
};
use num::ToPrimitive;
use serde_json::{json, Value as Json};

use crate::render;
use crate::{CharArgs, CharCmd, Command, DiagramCmd, GroupCmd, MeasureCmd, RpermCmd};

pub enum Output {
    Json(Json),
    Text(String),
}

pub enum Failure {
    /// A library error; reported with its variant name.
    Domain(Error),
    /// A negative answer that still has output (e.g. a PSD witness).
    Verdict(Json),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        Failure::Domain(e)
    }
}

type Out = std::result::Result<Output, Failure>;

fn ok(j: Json) -> Out {
    Ok(Output::Json(j))
}

fn diagram(path: &Path) -> bratteli::Result<BratteliDiagram> {
    read_json::<DiagramFile>(path)?.to_diagram()
}

fn element(d: &BratteliDiagram, path: &Path) -> bratteli::Result<GroupElement> {
    read_json::<ElementFile>(path)?.to_element(d)
}

fn set(d: &BratteliDiagram, path: &Path) -> bratteli::Result<ClopenSet> {
    read_json::<ClopenFile>(path)?.to_set(d)
}

fn measure(d: &BratteliDiagram, path: Option<&Path>) -> bratteli::Result<InvariantMeasure> {
    match path {
        Some(p) => read_json::<MeasureFile>(p)?.to_measure(d),
        None => InvariantMeasure::builtin(d),
    }
}

fn character(c: &CharArgs) -> bratteli::Result<(BratteliDiagram, CharacterSpec)> {
    let d = diagram(&c.diagram)?;
    let base = c.character.parent().map(Path::to_path_buf).unwrap_or_default();
    let spec = read_json::<CharacterFile>(&c.character)?.to_spec(&d, &base)?;
    Ok((d, spec))
}

fn rational_arg(s: &str) -> std::result::Result<Rational, Failure> {
    parse_rational(s).map_err(|_| Failure::Usage(format!("{s:?} is not a rational number")))
}

fn element_json(g: &GroupElement) -> Json {
    serde_json::to_value(ElementFile::from_element(g)).expect("json")
}

fn set_json(a: &ClopenSet) -> Json {
    serde_json::to_value(ClopenFile::from_set(a)).expect("json")
}

fn edges_json(edges: &[Edge]) -> Json {
    Json::Array(edges.iter().map(|e| json!([e.source, e.target, e.index])).collect())
}

pub fn run(cmd: Command, float: bool) -> Out {
    match cmd {
        Command::Diagram(c) => diagram_cmd(c),
        Command::Measure(c) => measure_cmd(c, float),
        Command::Group(c) => group_cmd(c, float),
        Command::Char(c) => char_cmd(c, float),
        Command::Rperm(c) => rperm_cmd(c),
    }
}

fn diagram_cmd(cmd: DiagramCmd) -> Out {
    match cmd {
        DiagramCmd::Validate { file, depth } => {
            let d = diagram(&file)?;
            let depth = d.depth().map_or(depth, |x| x.min(depth));
            let counts = (0..=depth).map(|n| d.vertex_count(n)).collect::<bratteli::Result<Vec<_>>>()?;
            let paths = (0..=depth).map(|n| d.path_counts(n)).collect::<bratteli::Result<Vec<_>>>()?;
            ok(json!({
                "valid": true,
                "depth": d.depth(),
                "vertex_counts": counts,
                "path_counts": paths,
            }))
        }
        DiagramCmd::Paths {
            file,
            level,
            vertex,
            index,
            edges,
        } => {
            let d = diagram(&file)?;
            if let Some(text) = edges {
                let triples: Vec<(usize, usize, usize)> = bratteli::files::parse_json(&text)?;
                let path: Vec<Edge> = triples
                    .into_iter()
                    .map(|(source, target, index)| Edge { source, target, index })
                    .collect();
                let (v, i) = d.index_of_path(&path)?;
                return ok(json!({"level": path.len(), "vertex": v, "index": i}));
            }
            match (vertex, index) {
                (Some(v), Some(i)) => ok(json!({
                    "level": level, "vertex": v, "index": i,
                    "edges": edges_json(&d.path_of_index(level, v, i)?),
                })),
                _ => ok(json!({"level": level, "path_counts": d.path_counts(level)?})),
            }
        }
        DiagramCmd::Telescope {
            file,
            cuts,
            every,
            depth,
        } => {
            let d = diagram(&file)?;
            let cuts = match every {
                Some(k) => Cuts::every(k)?,
                None => Cuts::finite(cuts)?,
            };
            let t = d.telescope(&cuts)?;
            let depth = t.depth().map_or(depth, |x| x.min(depth));
            ok(serde_json::to_value(DiagramFile::from_diagram(&t, depth)?).expect("json"))
        }
        DiagramCmd::Simple { file, bound } => {
            let d = diagram(&file)?;
            ok(match d.is_simple(bound) {
                Simplicity::Simple(w) => json!({"verdict": "Simple", "witnesses": w}),
                Simplicity::Unknown(b) => json!({"verdict": "Unknown", "bound": b}),
                Simplicity::NotSimple(w) => {
                    json!({"verdict": "NotSimple", "level": w.level, "reason": w.reason})
                }
            })
        }
        DiagramCmd::EvenTelescope { file, bound } => {
            let d = diagram(&file)?;
            ok(match d.find_even_telescoping(bound) {
                EvenTelescoping::Found(cuts) => json!({"verdict": "Found", "cuts": cuts}),
                EvenTelescoping::NotFound(b) => json!({"verdict": "NotFound", "bound": b}),
            })
        }
        DiagramCmd::Dot {
            file,
            depth,
            collapse_multiedges,
        } => {
            let d = diagram(&file)?;
            let depth = d.depth().map_or(depth, |x| x.min(depth));
            Ok(Output::Text(render::dot(&d, depth, collapse_multiedges)?))
        }
    }
}

fn weights_json(m: &InvariantMeasure, depth: usize, float: bool) -> bratteli::Result<Json> {
    let mut levels = serde_json::Map::new();
    for n in 0..=depth {
        levels.insert(n.to_string(), render::values(&m.weights(n)?, float));
    }
    Ok(json!({"exact": m.is_exact(), "weights": levels}))
}

fn measure_cmd(cmd: MeasureCmd, float: bool) -> Out {
    match cmd {
        MeasureCmd::Validate { d, measure: path } => {
            let dg = diagram(&d.diagram)?;
            let file: MeasureFile = read_json(&path)?;
            let m = file.to_measure(&dg)?;
            let depth = file.table()?.len().saturating_sub(1);
            let mut out = weights_json(&m, depth, float)?;
            out["valid"] = json!(true);
            ok(out)
        }
        MeasureCmd::Builtin { d, depth } => {
            let dg = diagram(&d.diagram)?;
            let depth = dg.depth().map_or(depth, |x| x.min(depth));
            ok(weights_json(&InvariantMeasure::builtin(&dg)?, depth, float)?)
        }
        MeasureCmd::Of { d, set: s, measure: m } => {
            let dg = diagram(&d.diagram)?;
            let a = set(&dg, &s)?;
            let mu = measure(&dg, m.as_deref())?;
            ok(json!({"measure": render::value(&mu.measure_of(&a)?, float)}))
        }
    }
}

fn group_cmd(cmd: GroupCmd, float: bool) -> Out {
    match cmd {
        GroupCmd::Compose { d, g, h } => {
            let dg = diagram(&d.diagram)?;
            let gh = element(&dg, &g)?.compose(&dg, &element(&dg, &h)?)?;
            ok(element_json(&gh))
        }
        GroupCmd::Fix { d, g } => {
            let dg = diagram(&d.diagram)?;
            ok(set_json(&element(&dg, &g)?.fix()))
        }
        GroupCmd::Support { d, g } => {
            let dg = diagram(&d.diagram)?;
            ok(set_json(&element(&dg, &g)?.support()))
        }
        GroupCmd::Cycles { d, g } => {
            let dg = diagram(&d.diagram)?;
            let g = element(&dg, &g)?;
            let cd = g.cycle_data();
            let cycles: Vec<Vec<Vec<usize>>> = g.perms().iter().map(Perm::cycles).collect();
            ok(json!({
                "level": cd.level,
                "cycle_types": cd.cycle_types,
                "cycles": cycles,
                "even_cycles": cd.even_cycles(),
            }))
        }
        GroupCmd::Conjugate { d, g, h, level } => {
            let dg = diagram(&d.diagram)?;
            let (g, h) = (element(&dg, &g)?, element(&dg, &h)?);
            let level = level.unwrap_or(g.level().max(h.level()));
            match g.conjugate_at_level(&dg, &h, level)? {
                Conjugacy::Conjugate(q) => ok(json!({"conjugate": true, "level": level, "witness": element_json(&q)})),
                Conjugacy::NotAtThisLevel => Err(Failure::Verdict(json!({"conjugate": false, "level": level}))),
            }
        }
        GroupCmd::Hn { d, set: s, level } => {
            let dg = diagram(&d.diagram)?;
            let a = set(&dg, &s)?;
            let hn = make_hn(&dg, &a, level)?;
            let bundles: Vec<Json> = hn
                .bundles
                .iter()
                .map(|b| {
                    json!({"source": b.source, "target": b.target, "size": b.size,
                           "fixed_fraction": render::rational(&b.fixed_fraction)})
                })
                .collect();
            ok(json!({
                "element": element_json(&hn.element),
                "bundles": bundles,
                "max_fixed_fraction": render::rational(&hn.max_fixed_fraction()),
            }))
        }
        GroupCmd::Claim1 { p } => {
            let c = claim1_pair(p)?;
            let q = c.h0.compose(&c.h1.inverse());
            ok(json!({
                "p": p, "m": c.m,
                "h0": c.h0.to_string(), "h1": c.h1.to_string(),
                "quotient": q.to_string(), "quotient_cycle_type": q.cycle_type(),
            }))
        }
        GroupCmd::SiFamily { d, s, r, eps, verify } => {
            let dg = diagram(&d.diagram)?;
            let s = element(&dg, &s)?;
            let eps = rational_arg(&eps)?;
            let fam = si_family(&dg, &s, r, &eps)?;
            let elements: Vec<Json> = fam
                .elements
                .iter()
                .map(|(a, g)| json!({"a": a, "element": element_json(g)}))
                .collect();
            let depth = fam.elements.iter().map(|(_, g)| g.level()).max().unwrap_or(1);
            let mut out = json!({
                "cuts": fam.cuts.listed(),
                "telescoped": serde_json::to_value(DiagramFile::from_diagram(&fam.diagram, depth)?).expect("json"),
                "base": element_json(&fam.base),
                "elements": elements,
            });
            if verify {
                let check = fam.verify(&[InvariantMeasure::builtin(&dg)?])?;
                let pairs: Vec<Json> = check
                    .pairs
                    .iter()
                    .map(|p| {
                        json!({"a": p.a, "b": p.b, "even_cycles": p.even_cycles,
                               "defects": render::values(&p.defects, float),
                               "defect_below_eps": p.defect_below_eps})
                    })
                    .collect();
                out["verification"] = json!({
                    "all_hold": check.all_hold(),
                    "conjugate": check.conjugate,
                    "same_support": check.same_support,
                    "pairs": pairs,
                });
                if !check.all_hold() {
                    return Err(Failure::Verdict(out));
                }
            }
            ok(out)
        }
        GroupCmd::Metric { d, g, h, measure: paths } => {
            let dg = diagram(&d.diagram)?;
            let measures = if paths.is_empty() {
                vec![InvariantMeasure::builtin(&dg)?]
            } else {
                paths
                    .iter()
                    .map(|p| measure(&dg, Some(p)))
                    .collect::<bratteli::Result<Vec<_>>>()?
            };
            let v = metric_d(&dg, &element(&dg, &g)?, &element(&dg, &h)?, &measures)?;
            ok(json!({"distance": render::value(&v, float)}))
        }
    }
}

fn elements(d: &BratteliDiagram, paths: &[PathBuf]) -> bratteli::Result<Vec<GroupElement>> {
    paths.iter().map(|p| element(d, p)).collect()
}

fn char_cmd(cmd: CharCmd, float: bool) -> Out {
    match cmd {
        CharCmd::Eval { c, element: e } => {
            let (d, spec) = character(&c)?;
            ok(json!({"value": render::value(&spec.eval(&element(&d, &e)?)?, float)}))
        }
        CharCmd::Trace { c, set: s } => {
            let (d, spec) = character(&c)?;
            ok(json!({"value": render::value(&spec.trace_projection(&set(&d, &s)?)?, float)}))
        }
        CharCmd::Gram { c, elements: paths } => {
            let (d, spec) = character(&c)?;
            let m = spec.gram_matrix(&d, &elements(&d, &paths)?)?;
            ok(json!({"matrix": render::matrix(&m, float)}))
        }
        CharCmd::Psd { matrix, tolerance } => {
            let m = read_json::<MatrixFile>(&matrix)?.to_matrix()?;
            let verdict = if float {
                let approx: Vec<Vec<f64>> = m
                    .iter()
                    .map(|r| r.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect())
                    .collect();
                psd_check_numeric(&approx, tolerance)?
            } else {
                psd_check_exact(&m)?
            };
            match verdict {
                PsdVerdict::Psd => ok(json!({"verdict": "PSD"})),
                PsdVerdict::NotPsd(x) => {
                    let witness = format!("({})", x.iter().map(format_rational).collect::<Vec<_>>().join(","));
                    let value = bratteli::character::quadratic_form(&m, &x);
                    Err(Failure::Verdict(json!({
                        "verdict": "NotPSD",
                        "witness": witness,
                        "quadratic_form": render::rational(&value),
                    })))
                }
            }
        }
        CharCmd::Central { c, elements: paths } => {
            let (d, spec) = character(&c)?;
            let report = spec.centrality_check(&d, &elements(&d, &paths)?)?;
            let violations: Vec<Json> = report
                .violations
                .iter()
                .map(|(i, j, a, b)| json!({"i": i, "j": j, "chi_gh": render::value(a, float), "chi_hg": render::value(b, float)}))
                .collect();
            let out = json!({"pairs_checked": report.pairs_checked, "central": violations.is_empty(), "violations": violations});
            if report.violations.is_empty() {
                ok(out)
            } else {
                Err(Failure::Verdict(out))
            }
        }
        CharCmd::Mult {
            c,
            element: e,
            targets,
            from,
            to,
            tolerance,
        } => {
            let (d, spec) = character(&c)?;
            let g = element(&d, &e)?;
            let targets = targets.iter().map(|t| rational_arg(t)).collect::<Result<Vec<_>, _>>()?;
            let tol = rational_arg(&tolerance)?;
            let steps = spec.multiplicativity_harness(&d, &g, &targets, from..=to, &tol)?;
            let rows: Vec<Json> = steps
                .iter()
                .map(|s| {
                    json!({
                        "n": s.n,
                        "set_level": s.set_level,
                        "achieved": render::values(&s.achieved, float),
                        "chi_g_hn": render::value(&s.chi_gh, float),
                        "predicted": render::value(&s.predicted, float),
                        "defect": render::value(&s.defect, float),
                    })
                })
                .collect();
            ok(json!({"steps": rows}))
        }
        CharCmd::ProjLimit { c, set: s, from, to } => {
            let (d, spec) = character(&c)?;
            let a = set(&d, &s)?;
            let steps = spec.projection_limit_check(&d, &a, from..=to)?;
            let rows: Vec<Json> = steps
                .iter()
                .map(|s| {
                    json!({
                        "n": s.n,
                        "chi_hn": render::value(&s.chi_h, float),
                        "trace": render::value(&s.trace, float),
                        "defect": render::value(&s.defect, float),
                        "bound": render::value(&s.bound, float),
                        "within_bound": s.within_bound,
                    })
                })
                .collect();
            ok(json!({"steps": rows}))
        }
    }
}

fn rperm(images: Vec<usize>) -> bratteli::Result<RationalPermutation> {
    RationalPermutation::new(Perm::from_images(images)?)
}

fn rperm_json(g: &RationalPermutation) -> Json {
    json!({"denominator": g.denominator(), "perm": g.perm().images(), "cycles": g.perm().to_string()})
}

fn rperm_cmd(cmd: RpermCmd) -> Out {
    match cmd {
        RpermCmd::Refine { perm, m } => ok(rperm_json(&rperm(perm)?.refine(m)?)),
        RpermCmd::Compose { g, h } => ok(rperm_json(&rperm(g)?.compose(&rperm(h)?))),
        RpermCmd::Fix { perm } => ok(json!({"fix_measure": render::rational(&rperm(perm)?.fix_measure())})),
        RpermCmd::Char { perm, k } => {
            let alpha = match k.as_str() {
                "inf" => Alpha::Infinite,
                s => Alpha::Finite(s.parse().map_err(|_| Failure::Usage(format!("k = {s:?} is not a natural number or inf")))?),
            };
            ok(json!({"value": render::rational(&rperm(perm)?.char_r(alpha))}))
        }
        RpermCmd::FromBr { d, element: e, level } => {
            let dg = diagram(&d.diagram)?;
            let g = element(&dg, &e)?;
            let level = level.unwrap_or(g.level());
            ok(rperm_json(&to_rperm_at(&dg, &g, level)?))
        }
    }
}
