//! Subgroup constructions across fields: hyperfocus verification, focus
//! line classification, focus-set identities, and the filter soundness
//! of every induced factorization.

mod common;

use common::fixture2;
use hyperfocus_core::arcs::{
    cyclic_subgroup_arc, find_focus_lines, hyperconic_12_arc, induced_factorization,
    is_hyperfocused, mult_subgroup_arc, Arc,
};
use hyperfocus_core::filters::{c4_filter, k4e_filter};
use hyperfocus_core::gf2m::{FieldCtx, FieldElem};
use hyperfocus_core::onefact::isomorphic;
use hyperfocus_core::pg2::{Conic, LineClass, ProjPoint};

fn ctx(m: u32) -> FieldCtx {
    FieldCtx::new(m).unwrap()
}

#[test]
fn mult_subgroup_family() {
    // d | q-1, arcs of size d+1 hyperfocused on the secant line x = 0
    for (h, d) in [(2u32, 3u32), (4, 3), (4, 5), (4, 15), (6, 9), (6, 7)] {
        let f = ctx(h);
        let (arc, line) = mult_subgroup_arc(&f, d).unwrap();
        assert_eq!(arc.len(), (d + 1) as usize);
        let focus = is_hyperfocused(&f, &arc, &line).expect("hyperfocused by construction");
        assert_eq!(focus.focus_points.len(), d as usize);
        assert_eq!(
            Conic::standard(&f).classify_line(&f, &line).unwrap(),
            LineClass::Secant
        );
        // focus set is the subgroup column {(0,h,1)}
        let subgroup = f.mult_subgroup(d).unwrap();
        let mut expect: Vec<ProjPoint> = subgroup
            .iter()
            .map(|&s| ProjPoint::new(&f, [FieldElem::ZERO, s, FieldElem::ONE]).unwrap())
            .collect();
        let mut got = focus.focus_points.clone();
        expect.sort();
        got.sort();
        assert_eq!(expect, got);
    }
}

#[test]
fn mult_subgroup_focus_lines_found_by_scan() {
    let f = ctx(4);
    let (arc, line) = mult_subgroup_arc(&f, 5).unwrap();
    let found = find_focus_lines(&f, &arc).unwrap();
    assert!(found.iter().any(|(l, _)| *l == line));
}

#[test]
fn cyclic_subgroup_family() {
    // d | q+1, arcs of size d+1 hyperfocused on an external line
    for (h, d) in [(3u32, 3u32), (5, 3), (5, 11), (6, 5), (6, 13)] {
        let f = ctx(h);
        let (arc, line) = cyclic_subgroup_arc(&f, d).unwrap();
        assert_eq!(arc.len(), (d + 1) as usize);
        assert!(is_hyperfocused(&f, &arc, &line).is_some());
        assert_eq!(
            Conic::standard(&f).classify_line(&f, &line).unwrap(),
            LineClass::External
        );
    }
    // d = q+1 would be the whole hyperconic; rejected, not built
    assert_eq!(
        cyclic_subgroup_arc(&ctx(5), 33),
        Err(hyperfocus_core::arcs::ArcError::HyperovalBoundary)
    );
}

#[test]
fn embeddable_k8_classes_are_among_filter_survivors() {
    use hyperfocus_core::onefact::{canonical_form, enumerate};
    let survivors: Vec<String> = enumerate(8)
        .unwrap()
        .into_iter()
        .filter(|f| c4_filter(f).is_none())
        .map(|f| f.to_compact())
        .collect();
    // 8-arcs exist on the hyperconic for q = 8 (d = 7 | q-1) and q = 64
    for h in [3u32, 6] {
        let f = ctx(h);
        let (arc, line) = mult_subgroup_arc(&f, 7).unwrap();
        let focus = is_hyperfocused(&f, &arc, &line).unwrap();
        let induced = induced_factorization(&arc, &focus).unwrap();
        let class = canonical_form(&induced).to_compact();
        assert!(survivors.contains(&class), "embeddable class must survive");
    }
}

#[test]
fn twelve_point_constructions_match_the_unique_embeddable_class() {
    // multiplicative: 11 | 2^10 - 1
    let f10 = ctx(10);
    let (arc_m, line_m) = mult_subgroup_arc(&f10, 11).unwrap();
    assert_eq!(arc_m.len(), 12);
    let focus_m = is_hyperfocused(&f10, &arc_m, &line_m).unwrap();
    assert_eq!(
        Conic::standard(&f10).classify_line(&f10, &line_m).unwrap(),
        LineClass::Secant
    );
    let induced_m = induced_factorization(&arc_m, &focus_m).unwrap();
    assert!(isomorphic(&induced_m, &fixture2()).is_some());

    // cyclic: 11 | 2^5 + 1
    let f5 = ctx(5);
    let (arc_c, line_c) = cyclic_subgroup_arc(&f5, 11).unwrap();
    assert_eq!(arc_c.len(), 12);
    let focus_c = is_hyperfocused(&f5, &arc_c, &line_c).unwrap();
    assert_eq!(
        Conic::standard(&f5).classify_line(&f5, &line_c).unwrap(),
        LineClass::External
    );
    let induced_c = induced_factorization(&arc_c, &focus_c).unwrap();
    assert!(isomorphic(&induced_c, &fixture2()).is_some());
}

#[test]
fn induced_factorizations_pass_both_filters() {
    // both checks are necessary conditions, so every constructed
    // hyperfocused arc must induce a passing factorization
    let mut cases: Vec<(FieldCtx, Arc, hyperfocus_core::pg2::ProjLine)> = Vec::new();
    for (h, d) in [(4u32, 5u32), (6, 9), (10, 11)] {
        let f = ctx(h);
        let (arc, line) = mult_subgroup_arc(&f, d).unwrap();
        cases.push((f, arc, line));
    }
    for (h, d) in [(3u32, 3u32), (5, 11), (6, 5)] {
        let f = ctx(h);
        let (arc, line) = cyclic_subgroup_arc(&f, d).unwrap();
        cases.push((f, arc, line));
    }
    {
        let f = ctx(5);
        let t = hyperconic_12_arc(&f).unwrap();
        cases.push((f, t.arc, t.focus_line));
    }
    for (f, arc, line) in cases {
        let focus = is_hyperfocused(&f, &arc, &line).expect("hyperfocused");
        let induced = induced_factorization(&arc, &focus).unwrap();
        assert_eq!(c4_filter(&induced), None);
        assert_eq!(k4e_filter(&induced), None);
    }
}

#[test]
fn twelve_arc_exists_in_every_field_containing_gf32() {
    // the coordinates work over GF(2^(5k)); k = 3 exercises the 15-bit
    // arithmetic paths, and the odd tower keeps the focus line external
    let f = ctx(15);
    let t = hyperconic_12_arc(&f).unwrap();
    let focus = is_hyperfocused(&f, &t.arc, &t.focus_line).unwrap();
    assert_eq!(focus.focus_points.len(), 11);
    assert_eq!(
        Conic::standard(&f).classify_line(&f, &t.focus_line).unwrap(),
        LineClass::External
    );
    assert_eq!(f.trace(FieldElem::ONE), 1);
    assert_eq!(f.trace(t.a), 1);
}

#[test]
fn conic_through_five_of_the_twelve_arc_points_contains_the_rest() {
    let f = ctx(5);
    let t = hyperconic_12_arc(&f).unwrap();
    let pts = t.arc.points();
    let five: [ProjPoint; 5] = [pts[1], pts[2], pts[3], pts[4], pts[5]];
    let conic = hyperfocus_core::pg2::fit_conic(&f, &five).unwrap();
    assert!(conic.is_nondegenerate(&f));
    for p in &pts[1..] {
        assert!(conic.contains(&f, p));
    }
    assert_eq!(conic.nucleus(&f).unwrap(), pts[0]);
    assert!(!conic.contains(&f, &pts[0]));
}

#[test]
fn size_bound_holds_for_scanned_hyperfocused_arcs() {
    // every hyperfocused arc located by a scan with 4 <= k and
    // k not in {q, q+2} obeys k <= q/2
    for (h, d) in [(4u32, 3u32), (4, 5), (6, 7), (6, 9)] {
        let f = ctx(h);
        let q = f.order();
        let (arc, _) = mult_subgroup_arc(&f, d).unwrap();
        let k = arc.len() as u32;
        if !find_focus_lines(&f, &arc).unwrap().is_empty() && k >= 4 && k != q && k != q + 2 {
            assert!(k <= q / 2, "k={k} q={q}");
        }
    }
}
