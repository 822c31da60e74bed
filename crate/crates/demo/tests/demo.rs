use bratteli_demo::{claim1_report, diagram_svg, rperm_report};

#[test]
fn svg_has_one_circle_per_vertex_and_one_curve_per_edge() {
    // the 2-odometer has one vertex per level and two edges between levels
    let svg = diagram_svg("odometer2", 3).unwrap();
    assert!(svg.starts_with("<svg") && svg.ends_with("</svg>"));
    assert_eq!(svg.matches("<circle").count(), 4);
    assert_eq!(svg.matches("<path").count(), 6);
    // B_R levels 0..=2 have 1, 2 and 3 vertices
    let svg = diagram_svg("br", 2).unwrap();
    assert_eq!(svg.matches("<circle").count(), 6);
    assert!(diagram_svg("nope", 2).is_err());
}

#[test]
fn rperm_report_matches_hand_count() {
    // a transposition of 2 of 3 blocks fixes one third of [0, 1)
    let r = rperm_report("1,0,2", "2").unwrap();
    assert!(r.contains("λ(Fix g) = 1/3"), "{r}");
    assert!(r.contains("χ_2(g) = 1/9"), "{r}");
    let r = rperm_report("1,0,2", "inf").unwrap();
    assert!(r.contains("= 0"), "{r}");
    assert!(rperm_report("0,0", "1").is_err());
    assert!(rperm_report("1,0", "x").is_err());
}

#[test]
fn claim1_report_lists_even_cycles() {
    let r = claim1_report(3).unwrap();
    assert!(r.contains("cycle type [2, 2]"), "{r}");
    assert!(claim1_report(1).is_err());
}
