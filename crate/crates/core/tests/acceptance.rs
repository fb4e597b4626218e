//! Acceptance gate: one test per release criterion, each printing a single
//! PASS line on success. Tolerances are part of the contract — do not relax
//! them.

use std::path::PathBuf;
use std::time::Instant;

use ias_core::caustic::{
    caustic_points, parametric_caustic, singular_locus, CausticConfig, CausticSample,
    Window,
};
use ias_core::classify::{classify_at, ClassLabel};
use ias_core::construct::{gen_family, Builtin, IasMap, Kind};
use ias_core::germ::LagrangianGerm;
use ias_core::random::{random_germ, rng_from_seed};
use ias_core::svg::{render_svg, Curve};
use ias_core::verify::{
    check_family_consistency, check_hamiltonian, check_monge_ampere, check_shell,
    Residual,
};
use ias_core::versal::{
    is_versal, stability_check, standard_catalog, Mode, OddDeformation, Verdict,
};
use ias_core::QPoly;

fn fixture(name: &str) -> LagrangianGerm {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures/germs")
        .join(name);
    let text = std::fs::read_to_string(&path)
        .unwrap_or_else(|e| panic!("fixture {}: {e}", path.display()));
    serde_json::from_str(&text)
        .unwrap_or_else(|e| panic!("fixture {}: {e}", path.display()))
}

fn exact_pass(residual: &Residual) -> bool {
    matches!(residual, Residual::ExactPass)
}

const BOTH: [Kind; 2] = [Kind::CenterChord, Kind::Special];

/// Criterion 1 — the regression corpus maps onto the full class table in
/// exact arithmetic, in under a second.
#[test]
fn acceptance_1_classifier_regression_table() {
    let start = Instant::now();
    // (fixture, expected class per kind)
    let table: [(&str, [ClassLabel; 2]); 9] = [
        ("a22.json", [ClassLabel::A22, ClassLabel::A22]),
        ("a42.json", [ClassLabel::A42, ClassLabel::A42]),
        ("d42_plus.json", [ClassLabel::D42Plus, ClassLabel::D42Plus]),
        ("d42_minus.json", [ClassLabel::D42Minus, ClassLabel::D42Minus]),
        // the one entry whose sign swaps between the two constructions
        ("d62_plus.json", [ClassLabel::D62Plus, ClassLabel::D62Minus]),
        ("d62_minus.json", [ClassLabel::D62Minus, ClassLabel::D62Plus]),
        ("d82_plus.json", [ClassLabel::D82Plus, ClassLabel::D82Plus]),
        ("d82_minus.json", [ClassLabel::D82Minus, ClassLabel::D82Minus]),
        ("e82.json", [ClassLabel::E82, ClassLabel::E82]),
    ];
    for (name, want) in &table {
        let germ = fixture(name);
        let point = germ.basepoint().to_vec();
        for (kind, want) in BOTH.iter().zip(want) {
            let c = classify_at(&germ, &point, *kind).expect(name);
            assert_eq!(
                c.label,
                *want,
                "{name} ({}): got {}, fired {:?}",
                kind.as_str(),
                c.label.as_str(),
                c.fired
            );
        }
    }
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs_f64() < 1.0,
        "classification table took {elapsed:?}, budget 1 s"
    );
    println!("acceptance 1 (classifier regression table): PASS ({elapsed:?})");
}

/// Criterion 2 — the quintic-curve caustic at 512x512: every sample sits on
/// the shell (|beta| < 1e-10) or on the second branch
/// (|3q + 30q^2 + 10 beta^2| < 1e-8), both branches are present, an SVG
/// renders, all inside 10 s.
#[test]
fn acceptance_2_quintic_caustic_residuals_and_figure() {
    let start = Instant::now();
    let germ = fixture("a42.json");
    let fam = gen_family(&germ, Kind::CenterChord);
    let window = Window::new(vec![-0.15, -0.12], vec![0.05, 0.12]).unwrap();
    let cfg = CausticConfig::default();
    let locus = singular_locus(&fam, &window, 512, &cfg).unwrap();
    assert!(!locus.degenerate);
    let samples = caustic_points(&fam, &locus, &cfg).unwrap();
    assert!(samples.len() > 500, "only {} samples", samples.len());

    let (mut shell, mut cusp) = (0usize, 0usize);
    for s in &samples {
        let q = s.param[0];
        let beta = s.param[1];
        if beta.abs() < 1e-10 {
            shell += 1;
        } else {
            let residual = (3.0 * q + 30.0 * q * q + 10.0 * beta * beta).abs();
            assert!(
                residual < 1e-8,
                "off-shell sample at (q,beta)=({q},{beta}) misses the branch: {residual:e}"
            );
            cusp += 1;
        }
    }
    assert!(shell > 50, "shell branch undersampled: {shell}");
    assert!(cusp > 50, "cusp branch undersampled: {cusp}");

    // Branch-colored figure with the shell overlay.
    let mut curves = branch_curves(&samples);
    assert!(curves.len() >= 2);
    curves.push(Curve {
        label: "L".into(),
        points: (0..=256)
            .map(|k| {
                let q = -0.15 + 0.20 * (k as f64) / 256.0;
                (q, 5.0 * q.powi(4) + q.powi(3))
            })
            .collect(),
        ordered: true,
    });
    let svg = render_svg(&curves, "quintic-curve caustic");
    assert!(svg.starts_with("<svg"));
    assert!(svg.contains("polyline"));

    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs_f64() < 10.0,
        "caustic pipeline took {elapsed:?}, budget 10 s"
    );
    println!(
        "acceptance 2 (quintic caustic at 512^2): PASS \
         ({shell} shell + {cusp} cusp samples, {elapsed:?})"
    );
}

fn branch_curves(samples: &[CausticSample]) -> Vec<Curve> {
    let mut branches: Vec<usize> = samples.iter().map(|s| s.branch).collect();
    branches.sort_unstable();
    branches.dedup();
    branches
        .into_iter()
        .map(|b| Curve {
            label: format!("branch {b}"),
            points: samples
                .iter()
                .filter(|s| s.branch == b)
                .map(|s| (s.x[0], s.x[1]))
                .collect(),
            ordered: false,
        })
        .collect()
}

/// Distance from one circle block to {unit circle} ∪ {origin}.
fn block_deviation(x: &[f64], n: usize, block: usize) -> f64 {
    let r = (x[block].powi(2) + x[n + block].powi(2)).sqrt();
    ((r - 1.0).abs()).min(r)
}

/// Criterion 3 — builtin caustics land on the known singular sets and the
/// affine support function vanishes along the shell.
#[test]
fn acceptance_3_builtin_caustics() {
    let cfg = CausticConfig::default();

    // Circle, both constructions.
    let cc = IasMap::builtin_map(Builtin::parse("circle").unwrap(), Kind::CenterChord);
    let window = Window::new(vec![-3.3, -3.3], vec![3.3, 3.3]).unwrap();
    let samples = parametric_caustic(&cc, &window, 96, &cfg).unwrap();
    assert!(samples.len() > 100);
    for s in &samples {
        let r = (s.x[0].powi(2) + s.x[1].powi(2)).sqrt();
        assert!(
            (r - 1.0).abs() < 1e-6 || r < 1e-6,
            "cc circle sample off {{|x|=1}} ∪ {{0}}: r = {r}"
        );
    }

    let sp = IasMap::builtin_map(Builtin::parse("circle").unwrap(), Kind::Special);
    let window = Window::new(vec![-3.3, -1.0], vec![3.3, 1.0]).unwrap();
    let samples = parametric_caustic(&sp, &window, 128, &cfg).unwrap();
    assert!(samples.len() > 100);
    for s in &samples {
        let r = (s.x[0].powi(2) + s.x[1].powi(2)).sqrt();
        assert!(
            (r - 1.0).abs() < 1e-6,
            "sp circle sample off the unit circle: r = {r}"
        );
    }

    // Torus: some block must be singular (on its unit circle, or at its
    // origin for the center-chord case).
    let torus = Builtin::parse("torus:2").unwrap();
    let cc = IasMap::builtin_map(torus, Kind::CenterChord);
    let window = Window::new(vec![-3.2; 4], vec![3.2; 4]).unwrap();
    let samples = parametric_caustic(&cc, &window, 12, &cfg).unwrap();
    assert!(samples.len() > 100);
    for s in &samples {
        let dev = block_deviation(&s.x, 2, 0).min(block_deviation(&s.x, 2, 1));
        assert!(dev < 1e-6, "cc torus sample has no singular block: {dev:e}");
    }

    let sp = IasMap::builtin_map(torus, Kind::Special);
    let window =
        Window::new(vec![-3.2, -3.2, -1.0, -1.0], vec![3.2, 3.2, 1.0, 1.0]).unwrap();
    let samples = parametric_caustic(&sp, &window, 12, &cfg).unwrap();
    assert!(samples.len() > 100);
    for s in &samples {
        let unit = |b: usize| {
            ((s.x[b].powi(2) + s.x[2 + b].powi(2)).sqrt() - 1.0).abs()
        };
        assert!(
            unit(0).min(unit(1)) < 1e-6,
            "sp torus sample has no block on its unit circle"
        );
    }

    // f vanishes along the shell for every builtin and kind.
    for b in ["circle", "torus:2"] {
        let b = Builtin::parse(b).unwrap();
        let n = b.n();
        for kind in BOTH {
            let map = IasMap::builtin_map(b, kind);
            for k in 0..=100 {
                let a = -3.0 + 6.0 * (k as f64) / 100.0;
                let param: Vec<f64> = match kind {
                    Kind::CenterChord => {
                        (0..n).map(|_| a).chain((0..n).map(|_| a)).collect()
                    }
                    Kind::Special => {
                        (0..n).map(|_| a).chain((0..n).map(|_| 0.0)).collect()
                    }
                };
                let f = map.eval_f(&param);
                assert!(
                    f.abs() < 1e-10,
                    "{} ({}) shell f({a}) = {f:e}",
                    b.name(),
                    kind.as_str()
                );
            }
        }
    }
    println!("acceptance 3 (builtin caustics on known sets): PASS");
}

/// Criterion 4 — unimodularity: |det Dy| matches |det Dx| to 1e-6 with
/// J⁻¹·Dy·Dx⁻¹ symmetric to 1e-6, on the circle (both kinds, with the
/// stated signs) and on 20 random germs.
#[test]
fn acceptance_4_monge_ampere() {
    let circle = Builtin::parse("circle").unwrap();

    let cc = IasMap::builtin_map(circle, Kind::CenterChord);
    let window = Window::new(vec![0.3, -0.3], vec![2.8, 0.3]).unwrap();
    let report = check_monge_ampere(&cc, &window, 48).unwrap();
    assert!(report.passed, "{report:?}");
    match report.residual {
        Residual::Max(r) => assert!(r < 1e-6, "cc circle residual {r:e}"),
        other => panic!("unexpected residual {other:?}"),
    }
    let signs: Vec<&String> = report
        .notes
        .iter()
        .filter(|n| n.starts_with("component"))
        .collect();
    assert!(!signs.is_empty());
    assert!(
        signs.iter().all(|n| n.contains("sign -1")),
        "center-chord circle must have sign -1: {signs:?}"
    );

    let sp = IasMap::builtin_map(circle, Kind::Special);
    let window = Window::new(vec![-3.0, 0.1], vec![3.0, 1.0]).unwrap();
    let report = check_monge_ampere(&sp, &window, 48).unwrap();
    assert!(report.passed, "{report:?}");
    match report.residual {
        Residual::Max(r) => assert!(r < 1e-6, "sp circle residual {r:e}"),
        other => panic!("unexpected residual {other:?}"),
    }
    let signs: Vec<&String> = report
        .notes
        .iter()
        .filter(|n| n.starts_with("component"))
        .collect();
    assert!(
        signs.iter().all(|n| n.contains("sign +1")),
        "special circle must have sign +1: {signs:?}"
    );

    // 20 random polynomial germs, n alternating 1 and 2, degree <= 5, on a
    // window of regular points away from the shell.
    let mut rng = rng_from_seed(20260814);
    let mut checked = 0;
    for i in 0..20 {
        let n = 1 + i % 2;
        let germ = random_germ(&mut rng, n, 5);
        let window = if n == 1 {
            Window::new(vec![0.2, 0.3], vec![0.9, 1.0]).unwrap()
        } else {
            Window::new(vec![0.2, 0.3, 0.25, 0.35], vec![0.9, 1.0, 0.95, 1.05]).unwrap()
        };
        for kind in BOTH {
            let map = match kind {
                Kind::CenterChord => {
                    ias_core::construct::center_chord_maps(&germ).unwrap()
                }
                Kind::Special => ias_core::construct::special_maps(&germ).unwrap(),
            };
            match check_monge_ampere(&map, &window, 4) {
                Ok(report) => {
                    assert!(report.passed, "germ {i} {}: {report:?}", kind.as_str());
                    if let Residual::Max(r) = report.residual {
                        assert!(r < 1e-6, "germ {i} {}: {r:e}", kind.as_str());
                    }
                    checked += 1;
                }
                Err(ias_core::Error::NoRegularPoints) => {
                    panic!("germ {i} ({}): window fully singular", kind.as_str())
                }
                Err(e) => panic!("germ {i}: {e}"),
            }
        }
    }
    assert_eq!(checked, 40);
    println!("acceptance 4 (unimodularity, circle + 20 random germs): PASS");
}

/// Criterion 5 — the structural identity suite holds exactly on 100
/// seed-pinned random germs: oddness and the coefficient exchange between
/// the two families, the differential pairing df = omega(dx, y), the
/// pluriharmonic extension, and shell membership with its degenerate
/// transverse Hessian.
#[test]
fn acceptance_5_identity_suite() {
    let mut rng = rng_from_seed(20260814);
    let window1 = Window::new(vec![-1.0, -1.0], vec![1.0, 1.0]).unwrap();
    let window2 = Window::new(vec![-1.0; 4], vec![1.0; 4]).unwrap();
    for i in 0..100 {
        let n = 1 + i % 2;
        let germ = random_germ(&mut rng, n, 6);
        let window = if n == 1 { &window1 } else { &window2 };

        let family = check_family_consistency(&germ).unwrap();
        assert!(
            family.passed && exact_pass(&family.residual),
            "germ {i}: family consistency {family:?}"
        );

        for kind in BOTH {
            let map = match kind {
                Kind::CenterChord => {
                    ias_core::construct::center_chord_maps(&germ).unwrap()
                }
                Kind::Special => ias_core::construct::special_maps(&germ).unwrap(),
            };
            let ham = check_hamiltonian(&map, window, 2, 1e-4).unwrap();
            assert!(
                ham.passed && exact_pass(&ham.residual),
                "germ {i} {}: pairing {ham:?}",
                kind.as_str()
            );
            let shell = check_shell(&map, window, 2).unwrap();
            assert!(
                shell.passed && exact_pass(&shell.residual),
                "germ {i} {}: shell {shell:?}",
                kind.as_str()
            );
        }
    }
    println!("acceptance 5 (identity suite, 100 seeded germs): PASS");
}

/// Criterion 6 — versality: the full catalog passes at cutoff 9, deleting
/// any single direction breaks it with a concrete missing monomial, the
/// example families are stable, and S = q^5 is not (beta^3 missing).
#[test]
fn acceptance_6_versality() {
    let catalog = standard_catalog();
    assert_eq!(catalog.len(), 13);
    for entry in &catalog {
        let d = entry.deformation(9).unwrap();
        let verdict = is_versal(&d, Mode::Full).unwrap();
        assert_eq!(verdict, Verdict::Versal, "{}", entry.label);

        for skip in 0..entry.directions.len() {
            let dirs: Vec<QPoly> = entry
                .directions
                .iter()
                .enumerate()
                .filter(|(l, _)| *l != skip)
                .map(|(_, d)| d.clone())
                .collect();
            let d = OddDeformation::new(entry.normal_form.clone(), dirs, 9).unwrap();
            match is_versal(&d, Mode::Full).unwrap() {
                Verdict::NotVersal { missing } => {
                    assert!(
                        !missing.is_empty(),
                        "{} minus direction {skip}: empty missing list",
                        entry.label
                    );
                }
                other => panic!(
                    "{} minus direction {skip} still {other:?}",
                    entry.label
                ),
            }
        }
    }

    // Stability of the example families, both kinds.
    for name in [
        "a22.json",
        "a42.json",
        "d42_plus.json",
        "d42_minus.json",
        "d62_plus.json",
        "d62_minus.json",
        "d82_plus.json",
        "d82_minus.json",
        "e82.json",
    ] {
        let germ = fixture(name);
        for kind in BOTH {
            let fam = gen_family(&germ, kind);
            let verdict = stability_check(&fam, 9).unwrap();
            assert_eq!(
                verdict,
                Verdict::Versal,
                "{name} ({}) should be stable",
                kind.as_str()
            );
        }
    }

    // The bare quintic lacks the cubic fiber direction.
    let quintic = fixture("quintic_pure.json");
    let fam = gen_family(&quintic, Kind::CenterChord);
    match stability_check(&fam, 9).unwrap() {
        Verdict::NotVersal { missing } => assert_eq!(missing, vec!["b1^3"]),
        other => panic!("bare quintic: {other:?}"),
    }
    println!("acceptance 6 (versality catalog and stability): PASS");
}

/// Criterion 7 — a strongly convex curve has no caustic beyond the shell:
/// for S = q^3 + q (third derivative never zero on the window) the locus
/// scan around the diagonal produces the shell branch only.
#[test]
fn acceptance_7_strong_convexity_shell_only() {
    let germ = fixture("convex_cubic.json");
    let germ = germ.recenter(germ.basepoint()).unwrap();
    let window = Window::new(vec![-0.5, -0.5], vec![0.5, 0.5]).unwrap();
    let cfg = CausticConfig::default();
    for kind in BOTH {
        let fam = gen_family(&germ, kind);
        let locus = singular_locus(&fam, &window, 128, &cfg).unwrap();
        assert!(!locus.degenerate);
        let samples = caustic_points(&fam, &locus, &cfg).unwrap();
        assert!(samples.len() > 50, "{}: {}", kind.as_str(), samples.len());
        let branches: std::collections::BTreeSet<usize> =
            samples.iter().map(|s| s.branch).collect();
        assert_eq!(
            branches.len(),
            1,
            "{}: expected the shell only, got branches {branches:?}",
            kind.as_str()
        );
        for s in &samples {
            assert!(
                s.param[1].abs() < 1e-10,
                "{}: off-shell sample beta = {:e}",
                kind.as_str(),
                s.param[1]
            );
            // the caustic coincides with the curve x = (q, 3q^2), z = 0
            assert!((s.x[1] - 3.0 * s.x[0] * s.x[0]).abs() < 1e-8);
            assert!(s.z.abs() < 1e-12);
        }
    }
    println!("acceptance 7 (strong convexity leaves the shell only): PASS");
}
