use dirac_bounds_core::curvature::{Factor, TorusSpin};
use dirac_bounds_core::pipeline::{analyze, verify, AnalyzeOptions};
use dirac_bounds_core::{Family, ManifoldSpec};
use std::f64::consts::PI;

fn opts() -> AnalyzeOptions {
    AnalyzeOptions::default()
}

#[test]
fn spheres_are_sharp_for_every_family() {
    for n in 2..=6 {
        for r in [0.5, 1.0, 2.0] {
            let rep = analyze(&ManifoldSpec::Sphere { n, r }, &opts(), None).unwrap();
            let l1 = rep.oracle.as_ref().unwrap().spectrum.lambda1_sq;
            let f = rep.bound(Family::Friedrich).value;
            assert!((f - l1).abs() < 1e-12 * l1.max(1.0), "n={n} r={r}: {f} vs {l1}");
            for b in rep.bounds.iter().filter(|b| b.applicable) {
                assert!((b.value - l1).abs() < 1e-6 * l1, "n={n} r={r} {:?}", b);
            }
            assert!(verify(&rep).passed(), "{:?}", verify(&rep));
        }
    }
}

fn tori() -> Vec<ManifoldSpec> {
    let mut out = Vec::new();
    for n in 2..=5 {
        for spin in [TorusSpin::Trivial, TorusSpin::Antiperiodic] {
            out.push(ManifoldSpec::Torus { n, period: 2.0 * PI, spin });
        }
    }
    out
}

#[test]
fn tori_bounds_vanish_and_criteria_false() {
    for spec in tori() {
        let rep = analyze(&spec, &opts(), None).unwrap();
        for b in &rep.bounds {
            assert!(b.value.abs() < 1e-15, "{spec:?} {b:?}");
        }
        assert!(rep.vanishing.values().all(|c| !c.holds));
        let o = rep.oracle.as_ref().unwrap();
        let trivial = matches!(spec, ManifoldSpec::Torus { spin: TorusSpin::Trivial, .. });
        assert_eq!(o.spectrum.kernel_dim > 0, trivial);
        assert!(verify(&rep).passed());
    }
}

fn s2(r: f64) -> Factor {
    Factor::Sphere { n: 2, r }
}

#[test]
fn products_respect_the_spectrum() {
    let specs = [
        ManifoldSpec::Product { factors: vec![s2(1.0), s2(1.0)] },
        ManifoldSpec::Product { factors: vec![s2(1.0), s2(2.0)] },
        ManifoldSpec::Product {
            factors: vec![
                s2(1.0),
                Factor::Torus { n: 2, period: 2.0 * PI, spin: TorusSpin::Trivial },
            ],
        },
        ManifoldSpec::Product {
            factors: vec![
                s2(1.0),
                Factor::Torus { n: 2, period: 2.0 * PI, spin: TorusSpin::Antiperiodic },
            ],
        },
    ];
    let expected = [2.0, 1.25, 1.0, 1.5];
    for (spec, l1) in specs.iter().zip(expected) {
        let rep = analyze(spec, &opts(), None).unwrap();
        let o = rep.oracle.as_ref().unwrap();
        assert!((o.spectrum.lambda1_sq - l1).abs() < 1e-12);
        let v = verify(&rep);
        assert!(v.passed(), "{spec:?}: {v:?}");
    }
}

#[test]
fn s2xs2_weyl_bound_improves_on_friedrich() {
    let spec = ManifoldSpec::Product { factors: vec![s2(1.0), s2(1.0)] };
    let rep = analyze(&spec, &opts(), None).unwrap();
    let inv = &rep.invariants;
    assert!((inv.nu0 - 2.0 / 3.0).abs() < 1e-9 && (inv.mu - 1.0 / 3.0).abs() < 1e-3, "{inv:?}");
    let f = rep.bound(Family::Friedrich).value;
    let w = rep.bound(Family::WeylThm41);
    assert!(w.applicable && w.value > f + 1e-6 && w.value <= 2.0 + 1e-9, "{w:?}");
    let closed = rep.bound(Family::WeylCor42).value;
    assert!((closed - w.value).abs() < 1e-6 * closed);
    assert!(rep.bound(Family::FullThm52P2).improvement > 0.0);
}

#[test]
fn conformal_torus_identities_within_grid_tolerance() {
    let spec = ManifoldSpec::ConformalTorus { n: 3, amplitude: 0.05, nodes: 16, transverse: 5 };
    let o = AnalyzeOptions { grid_refine: true, ..opts() };
    let rep = analyze(&spec, &o, None).unwrap();
    assert!(rep.oracle.is_none());
    assert!(rep.identities.failures.is_empty(), "{:?}", rep.identities);
    let r = rep.refinement.as_ref().unwrap();
    assert!(r.scalar_ratio.unwrap() > 3.5 && r.residual_ratio > 3.5, "{r:?}");
    assert!(!rep.invariants.exact && !rep.invariants.hypotheses.harmonic_curvature);
    assert!(verify(&rep).passed());
}
