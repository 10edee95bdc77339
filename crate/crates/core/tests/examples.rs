//! Worked examples: reference values and hand-derived oracles.

use octabif_core::bifurcation::{export_flap_swallowtail_data, scan_diagram, DiagramKind, FamilyPath};
use octabif_core::energies::{eval_h, eval_j};
use octabif_core::fibres::{
    count_fibre_components, fibre_graph, max_hyperbolic_at, max_hyperbolic_audit, reduced_level_set,
};
use octabif_core::geometry::InvariantPoint;
use octabif_core::numerics::{rank_one_poly, real_roots, Poly};
use octabif_core::singular::{
    classify_rank_one, classify_rank_zero, degenerate_rank_one_locus, find_rank_one, invariant_points,
    nonneg_det_check, rank_zero_operator, WilliamsonType,
};
use octabif_core::ParamT;

const TWO: ParamT = ParamT::new(0.25, 1.0 / 3.0, 1.0 / 3.0, 1.0);
const THREE: ParamT = ParamT::new(0.5, 0.5, 1.0 / 3.0, 1.0);

fn four() -> ParamT {
    let tau = -12.045;
    ParamT::new(0.5, tau / 2.0, tau / 3.0, tau)
}

fn family(tau: f64) -> ParamT {
    ParamT::new(tau / 2.0, tau / 2.0, tau / 3.0, tau)
}

fn assert_coeffs(t: &ParamT, reference: &[f64]) {
    let p = rank_one_poly(t, 2.0).unwrap();
    assert_eq!(p.coeffs.len(), reference.len());
    for (k, (a, b)) in p.coeffs.iter().zip(reference).enumerate() {
        assert!(((a - b) / b).abs() < 1e-4, "s^{k}: {a} vs {b}");
    }
}

#[test]
fn three_stack_coefficients() {
    assert_coeffs(
        &THREE,
        &[
            2621.44, -366594.0, 966351.0, -1.12567e6, 761534.0, -332674.0, 98714.3, -20343.5, 2917.25, -285.733,
            18.2302, -0.682667, 0.0113778,
        ],
    );
}

#[test]
fn four_stack_coefficients() {
    assert_coeffs(
        &four(),
        &[
            2621.44, -5.11466e7, 1.35995e8, -1.59003e8, 1.07988e8, -4.73907e7, 1.41302e7, -2.92511e6, 421026.0,
            -41351.0, 2642.8, -99.0427, 1.65071,
        ],
    );
}

#[test]
fn leading_coefficient_scales_with_t3_squared() {
    // Reference lead 0.0113778 = 64 t3^2 / 625 at t3 = 1/3.
    for t3 in [-2.0, -0.3, 0.7, 5.0] {
        let t = ParamT::new(0.4, 1.1, t3, -0.6);
        let p = rank_one_poly(&t, 1.3).unwrap();
        assert_eq!(p.degree(), 12);
        assert!((p.lead() / (64.0 * t3 * t3 / 625.0) - 1.0).abs() < 1e-12);
    }
}

#[test]
fn two_stack_roots_in_s() {
    let p = rank_one_poly(&TWO, 2.0).unwrap();
    let roots: Vec<f64> = real_roots(&p, 2.0, 8.0).unwrap().iter().map(|r| r.x).collect();
    // A third root sits on the chart edge s = 8 and is not a rank-one point.
    assert_eq!(roots.len(), 3, "{roots:?}");
    assert!((roots[0] - 1.48116f64.powi(2)).abs() < 1e-4);
    assert!((roots[1] - 1.66216f64.powi(2)).abs() < 1e-4);
    assert!(roots[2] > 7.999);
    assert_eq!(find_rank_one(&TWO, 2.0).unwrap().len(), 2);
}

#[test]
fn planted_roots_recovered() {
    let planted = [-2.5, -0.75, 0.1, 1.3, 2.2, 4.0];
    let p = Poly::from_roots(&planted).scale(3.7);
    let got: Vec<f64> = real_roots(&p, -5.0, 5.0).unwrap().iter().map(|r| r.x).collect();
    assert_eq!(got.len(), planted.len());
    for (a, b) in got.iter().zip(planted) {
        assert!((a - b).abs() < 1e-10, "{a} vs {b}");
    }
}

#[test]
fn rank_one_types_in_examples() {
    let cases: [(&ParamT, f64, WilliamsonType); 6] = [
        (&TWO, 1.48116, WilliamsonType::HyperbolicRegular),
        (&TWO, -1.66216, WilliamsonType::EllipticRegular),
        (&THREE, 1.56842, WilliamsonType::HyperbolicRegular),
        (&THREE, 2.74592, WilliamsonType::HyperbolicRegular),
        (&THREE, 2.23607, WilliamsonType::EllipticRegular),
        (&THREE, -2.23607, WilliamsonType::EllipticRegular),
    ];
    for (t, u, want) in cases {
        let pts = find_rank_one(t, 2.0).unwrap();
        let near = pts.iter().find(|p| (p.u().unwrap() - u).abs() < 1e-3).unwrap_or_else(|| panic!("no point near {u}"));
        assert_eq!(near.wtype, want, "u = {u}");
        let (w, _) = classify_rank_one(t, 2.0, near.u().unwrap()).unwrap();
        assert_eq!(w, want, "u = {u}");
    }
}

#[test]
fn invariant_point_values() {
    let js: Vec<f64> = InvariantPoint::ALL.iter().map(|p| eval_j(&p.ambient())).collect();
    let hs: Vec<f64> = InvariantPoint::ALL.iter().map(|p| eval_h(&p.ambient())).collect();
    for (a, b) in js.iter().zip([1.0, 2.0, 2.0, 1.0]) {
        assert!((a - b).abs() < 1e-12);
    }
    for (a, b) in hs.iter().zip([0.0, 0.0, 3.0, 3.0]) {
        assert!((a - b).abs() < 1e-12);
    }
    let flap = invariant_points(&ParamT::new(0.35, 0.35, 7.0 / 30.0, 0.7));
    assert!((flap[0].h - 5.152).abs() < 1e-12);
}

#[test]
fn rank_zero_types_along_family() {
    assert_eq!(classify_rank_zero(&family(0.3), InvariantPoint::P2, 3), WilliamsonType::EllipticElliptic);
    assert_eq!(classify_rank_zero(&family(0.45), InvariantPoint::P2, 3), WilliamsonType::FocusFocus);
    assert_eq!(classify_rank_zero(&family(25.0 / 69.0), InvariantPoint::P2, 3), WilliamsonType::Degenerate);
    assert_eq!(classify_rank_zero(&family(5.0 / 9.0), InvariantPoint::P2, 3), WilliamsonType::Degenerate);
}

#[test]
fn semitoric_family_regimes() {
    let t = |t1| ParamT::new(t1, 0.0, 0.0, 0.0);
    for t1 in [0.05, 0.1, 0.2, 0.3, 0.33] {
        assert_eq!(classify_rank_zero(&t(t1), InvariantPoint::P2, 3), WilliamsonType::EllipticElliptic, "{t1}");
    }
    for t1 in [0.35, 0.5, 0.7, 0.9, 0.95] {
        assert_eq!(classify_rank_zero(&t(t1), InvariantPoint::P2, 3), WilliamsonType::FocusFocus, "{t1}");
    }
    for t1 in [0.97, 1.1, 1.5, 2.0, 3.0] {
        assert_eq!(classify_rank_zero(&t(t1), InvariantPoint::P2, 3), WilliamsonType::EllipticElliptic, "{t1}");
    }
}

#[test]
fn hessian_spectrum_along_family() {
    // Closed-form eigenvalues of omega^-1 d2H_t at phi2: lambda^2 = (A +- B sqrt(D)) / 625.
    for tau in [-0.4, 0.17, 0.48, 0.83] {
        let a = -625.0 / 2.0 - 4575.0 * tau - 91017.0 * tau * tau / 2.0;
        let b = 25.0 / 2.0 + 423.0 / 2.0 * tau;
        let d = 625.0 - 2850.0 * tau + 3105.0 * tau * tau;
        let m = rank_zero_operator(&family(tau), InvariantPoint::P2, 0.0, 1.0).unwrap();
        let m2 = m * m;
        let sum = 2.0 * a / 625.0;
        let prod = (a * a - b * b * d) / (625.0 * 625.0);
        let s = sum.abs().max(1e-3);
        assert!(m.trace().abs() < 1e-8 * s.sqrt());
        assert!((m2.trace() - 2.0 * sum).abs() < 1e-8 * s, "tau {tau}: {} vs {}", m2.trace(), 2.0 * sum);
        assert!((m2 * m).trace().abs() < 1e-8 * s.powf(1.5));
        assert!((m.determinant() - prod).abs() < 1e-8 * s * s, "tau {tau}");
    }
}

#[test]
fn determinants_match_reference_polynomials() {
    let dets = nonneg_det_check(&ParamT::default(), 1.0, 0.0).unwrap();
    for d in dets {
        assert!((d - 1.0).abs() < 1e-9, "{d}");
    }
    for (t, c1, c2) in [
        (ParamT::new(0.3, -1.1, 0.8, 0.45), 0.6, 0.8),
        (ParamT::new(-1.7, 0.2, 1.4, -0.9), -0.28, 0.96),
        (ParamT::new(0.05, 1.9, -0.6, 1.3), 0.8, -0.6),
    ] {
        let (t1, t4) = (t.t1, t.t4);
        let f3 = 625.0 * c1 * c1 - 25.0 * c1 * c2 * (-25.0 + 50.0 * t1 + 168.0 * t4)
            + 72.0 * c2 * c2 * (2.0 * t1 * t1 + 50.0 * t1 * t4 + t4 * (-25.0 + 96.0 * t4));
        let want = f3 * f3 / 390625.0;
        let got = nonneg_det_check(&t, c1, c2).unwrap()[1];
        assert!((got - want).abs() < 1e-8 * want.abs().max(1.0), "{got} vs {want}");
    }
}

#[test]
fn parabolic_loop_candidate() {
    // u grows like sqrt(j - j*) past the cusp, so the rounded j shifts u by ~1e-3.
    let us = degenerate_rank_one_locus(&THREE, 0.664405).unwrap();
    assert!(us.iter().any(|u| (u.abs() - 0.470033).abs() < 2e-3), "{us:?}");
    let pts = find_rank_one(&THREE, 0.664405).unwrap();
    assert!(
        pts.iter().any(|p| p.wtype == WilliamsonType::HyperbolicRegular && (p.u().unwrap().abs() - 0.470033).abs() < 1e-4),
        "{pts:?}"
    );
    assert!(degenerate_rank_one_locus(&TWO, 2.0).unwrap().is_empty());
}

fn graph_at(t: &ParamT, h: f64) -> octabif_core::fibres::BouquetGraph {
    fibre_graph(&reduced_level_set(t, 2.0, h, 64).unwrap()).unwrap()
}

#[test]
fn bouquet_counts() {
    let h2 = find_rank_one(&TWO, 2.0).unwrap().iter().find(|r| r.wtype == WilliamsonType::HyperbolicRegular).unwrap().h;
    let g = graph_at(&TWO, h2);
    assert_eq!((g.vertices.len(), g.edges.len(), g.faces), (1, 2, 3));
    assert!((g.vertices[0][0] - 1.48116).abs() < 1e-3);

    let h3 = find_rank_one(&THREE, 2.0).unwrap().iter().find(|r| r.wtype == WilliamsonType::HyperbolicRegular).unwrap().h;
    let g = graph_at(&THREE, h3);
    assert_eq!((g.vertices.len(), g.edges.len(), g.faces), (2, 4, 4));

    let g = graph_at(&four(), -14.7267);
    assert_eq!((g.vertices.len(), g.edges.len(), g.faces), (3, 6, 5));
    assert_eq!(g.faces_with_singular, g.faces);

    let g = graph_at(&TWO, 1e3);
    assert_eq!((g.vertices.len(), g.edges.len(), g.faces), (0, 0, 1));
    assert!(!g.is_hyperbolic());
}

#[test]
fn hyperbolic_multiplicity() {
    assert_eq!(max_hyperbolic_audit(&TWO, 60).unwrap(), 1);
    assert_eq!(max_hyperbolic_at(&THREE, 2.0).unwrap(), 2);
    assert_eq!(max_hyperbolic_at(&four(), 2.0).unwrap(), 3);
}

#[test]
fn component_counts() {
    assert_eq!(count_fibre_components(&THREE, 1.65125, 2.77).unwrap(), (2, false));
    let near_toric = ParamT::new(1e-3, 0.0, 0.0, 0.0);
    assert_eq!(count_fibre_components(&near_toric, 1.5, 0.9).unwrap().0, 1);
    assert_eq!(count_fibre_components(&THREE, 2.0, 1e3).unwrap().0, 0);
}

#[test]
fn flap_vertex() {
    let t = ParamT::new(0.35, 0.35, 7.0 / 30.0, 0.7);
    let pts = scan_diagram(&t, 0.5, 1.5, 300).unwrap();
    let hyp: Vec<f64> = pts.iter().filter(|p| p.kind == DiagramKind::HyperbolicRegularValue).map(|p| p.j).collect();
    assert!(!hyp.is_empty());
    let (lo, hi) = hyp.iter().fold((f64::MAX, f64::MIN), |(a, b), &j| (a.min(j), b.max(j)));
    assert!(lo < 1.0 && hi > 1.0 && lo > 0.5 && hi < 1.5, "segment [{lo}, {hi}]");
    let ee = pts
        .iter()
        .find(|p| p.kind == DiagramKind::RankZeroValue(WilliamsonType::EllipticElliptic))
        .unwrap();
    assert!((ee.j - 1.0).abs() < 1e-12 && (ee.h - 5.152).abs() < 1e-9);
    let cusps: Vec<f64> = pts.iter().filter(|p| p.kind == DiagramKind::ParabolicCandidate).map(|p| p.j).collect();
    assert!(cusps.iter().any(|j| (j - lo).abs() < 0.01) && cusps.iter().any(|j| (j - hi).abs() < 0.01), "{cusps:?}");
}

#[test]
fn double_flap_and_near_toric() {
    let fam = FamilyPath::parse("tau/2,tau/2,tau/3,tau", 0.1, 0.9).unwrap();
    let snaps = export_flap_swallowtail_data(&fam, 1, 300).unwrap();
    assert!(snaps[0].flap_markers.is_empty() && snaps[0].overlap_markers.is_empty());
    assert!(snaps[0].points.iter().all(|p| p.kind != DiagramKind::HyperbolicRegularValue));
    let js: Vec<f64> = snaps[1].flap_markers.iter().map(|m| m.0).collect();
    assert!(js.iter().any(|j| (j - 1.0).abs() < 1e-9) && js.iter().any(|j| (j - 2.0).abs() < 1e-9), "{js:?}");

    let pts = scan_diagram(&ParamT::new(1e-3, 0.0, 0.0, 0.0), 0.0, 3.0, 300).unwrap();
    assert!(pts.iter().all(|p| p.kind != DiagramKind::HyperbolicRegularValue));
}

#[test]
fn flap_swallowtail_window() {
    let fam = FamilyPath::parse("tau/2,tau/2,tau/3,tau", 1.19, 1.2).unwrap();
    let snaps = export_flap_swallowtail_data(&fam, 4, 600).unwrap();
    let counts: Vec<usize> = snaps.iter().map(|s| s.overlap_markers.len()).collect();
    assert!(counts.windows(2).any(|w| w[0] != w[1]), "overlap counts {counts:?}");
}
