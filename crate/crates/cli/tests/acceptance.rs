//! Acceptance suite: one test per criterion, each printing a pass/fail
//! line with its elapsed time (visible with `-- --nocapture`). Runtime
//! budgets and tolerances are pinned in code; everything asserted here is
//! exact arithmetic.

use lspace_core::contfrac::{
    blend, cfe, check_claim3, check_claim4, mediant_pred, r_value, truncation_value, Orientation,
    PosRational, Slope,
};
use lspace_core::linkdiag::{
    brm_free, chain_cover_orders, diagram_contains, twist_chain, Diagram,
};
use lspace_core::signmat::{canonical_form, class_le, is_strong_pair, IntMatrix, SignMatrix};
use lspace_core::surgery::{
    build_l3, h1_order, is_alternating_weighted, kirby_reduce, AwTree, AwVertex, Kind3, SlopeSet3,
};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use std::collections::BTreeSet;
use std::process::Command;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

fn report(criterion: &str, elapsed: Duration, budget: Duration) {
    println!("criterion {criterion}: PASS ({elapsed:.2?}, budget {budget:.2?})");
    assert!(
        elapsed <= budget,
        "criterion {criterion} exceeded its runtime budget: {elapsed:.2?} > {budget:.2?}"
    );
}

fn a2() -> SignMatrix {
    "+ +; - +".parse().unwrap()
}

fn a3() -> SignMatrix {
    "+ + +; - + +; 0 - +".parse().unwrap()
}

fn a3_prime() -> SignMatrix {
    "+ 0 +; - + 0; 0 - +".parse().unwrap()
}

fn run_enumerate(g: u32) -> (Vec<String>, Duration) {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_lspace"))
        .args(["signmat", "enumerate", "--g", &g.to_string(), "--maximal"])
        .output()
        .expect("binary runs");
    let elapsed = start.elapsed();
    assert!(out.status.success(), "enumerate --g {g} failed");
    let lines: Vec<String> = String::from_utf8(out.stdout)
        .unwrap()
        .lines()
        .map(str::to_owned)
        .collect();
    (lines, elapsed)
}

#[test]
fn criterion_01_me2_uniqueness() {
    let (lines, elapsed) = run_enumerate(2);
    assert_eq!(lines.len(), 2, "one class plus the footer: {lines:?}");
    assert_eq!(lines[0], canonical_form(&a2()).to_string());
    assert_eq!(lines[1], "total: 1");
    report("1 (ME2 uniqueness)", elapsed, Duration::from_secs(1));
}

#[test]
fn criterion_02_me3_uniqueness() {
    let (lines, elapsed) = run_enumerate(3);
    assert_eq!(lines.len(), 2, "one class plus the footer: {lines:?}");
    assert_eq!(lines[0], canonical_form(&a3()).to_string());
    assert_eq!(lines[1], "total: 1");
    report("2 (ME3 uniqueness)", elapsed, Duration::from_secs(10));
}

#[test]
fn criterion_03_order_fact() {
    let start = Instant::now();
    assert!(class_le(&a3_prime(), &a3()).unwrap());
    assert!(!class_le(&a3(), &a3_prime()).unwrap());
    report("3 (order fact)", start.elapsed(), Duration::from_secs(10));
}

/// Signed determinant over i64 by direct permutation expansion.
fn det3_oracle(m: &[i64; 9]) -> i64 {
    m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6])
        + m[2] * (m[3] * m[7] - m[4] * m[6])
}

/// Permanent of absolute values over i64 by direct expansion.
fn perm3_oracle(m: &[i64; 9]) -> i64 {
    let a: Vec<i64> = m.iter().map(|x| x.abs()).collect();
    a[0] * (a[4] * a[8] + a[5] * a[7])
        + a[1] * (a[3] * a[8] + a[5] * a[6])
        + a[2] * (a[3] * a[7] + a[4] * a[6])
}

#[test]
fn criterion_04_det_perm_oracle() {
    let start = Instant::now();
    let mut entries = [-2i64; 9];
    let mut checked = 0u64;
    loop {
        let a = IntMatrix::from_i64(3, &entries).unwrap();
        let lib = is_strong_pair(&a, &a.abs()).unwrap();
        let oracle = det3_oracle(&entries).abs() == perm3_oracle(&entries);
        assert_eq!(
            lib, oracle,
            "disagreement at {entries:?}: library {lib}, expansion {oracle}"
        );
        checked += 1;
        // Odometer over {-2..2}^9.
        let mut pos = 0;
        loop {
            if pos == 9 {
                assert_eq!(checked, 5u64.pow(9));
                report(
                    "4 (determinant/permanent oracle)",
                    start.elapsed(),
                    Duration::from_secs(120),
                );
                return;
            }
            if entries[pos] < 2 {
                entries[pos] += 1;
                break;
            }
            entries[pos] = -2;
            pos += 1;
        }
    }
}

#[test]
fn criterion_05_claim3_sweep() {
    let start = Instant::now();
    let rep = check_claim3(60, 12);
    assert_eq!(rep.violations(), 0, "claim 3 sweep found violations");
    assert!(rep.evaluated() > 50_000, "sweep evaluated {}", rep.evaluated());
    report("5 (claim 3 sweep)", start.elapsed(), Duration::from_secs(60));
}

#[test]
fn criterion_06_claim4_sweep() {
    let start = Instant::now();
    let rep = check_claim4(60, 12);
    assert_eq!(rep.violations(), 0, "claim 4 sweep found violations");
    assert_eq!(rep.skips(), 0, "orientation -1 always has a mediant pair");
    report("6 (claim 4 sweep)", start.elapsed(), Duration::from_secs(60));
}

#[test]
fn criterion_07_truncation_identity() {
    let start = Instant::now();
    let mut both = 0u32;
    for p in 2u64..=200 {
        for q in 1..p {
            if p.gcd(&q) != 1 {
                continue;
            }
            let r = PosRational::new(p, q).unwrap();
            let ks = cfe(&r).unwrap();
            for orientation in [Orientation::Plus, Orientation::Minus] {
                let t = truncation_value(&ks, orientation);
                match mediant_pred(&r, orientation) {
                    Ok(mp) => {
                        assert!(!t.empty_truncation, "flag mismatch at {p}/{q}");
                        assert_eq!(t.value, mp.value(), "mismatch at {p}/{q}");
                        both += 1;
                    }
                    Err(_) => assert!(t.empty_truncation, "missing flag at {p}/{q}"),
                }
            }
        }
    }
    assert!(both > 20_000);
    report("7 (truncation identity)", start.elapsed(), Duration::from_secs(60));
}

/// The reduction grid shared by criteria 8 and 9: all companion fractions
/// p2/q2 with p2 <= 40, partner slopes from blends with d1, d2 <= 8, both
/// genus-three families.
struct GridOutcome {
    cases: usize,
    elapsed: Duration,
}

static GRID: OnceLock<GridOutcome> = OnceLock::new();

fn reduction_grid() -> &'static GridOutcome {
    GRID.get_or_init(|| {
        let start = Instant::now();
        let mut cases = 0usize;
        let mut zs: Vec<BigRational> = Vec::new();
        {
            let mut seen = BTreeSet::new();
            for d1 in 1i64..=8 {
                for d2 in 1i64..=8 {
                    let z = BigRational::new(BigInt::from(d2), BigInt::from(d1));
                    if seen.insert(z.clone()) {
                        zs.push(z);
                    }
                }
            }
        }
        // Residual and spectator slopes rotate through fixed choices so the
        // endpoint identities are seen on varied surrounding data.
        let residuals: [PosRational; 3] = [
            "3/1".parse().unwrap(),
            "5/2".parse().unwrap(),
            "7/3".parse().unwrap(),
        ];
        let beta_tails = [Slope::from_int(-2), Slope::from_frac(-5, 2)];
        for p in 2u64..=40 {
            for q in 1..p {
                if p.gcd(&q) != 1 {
                    continue;
                }
                let r = PosRational::new(p, q).unwrap();
                let ks = cfe(&r).unwrap();
                for (kind, orientation) in [
                    (Kind3::PositiveChain, Orientation::Plus),
                    (Kind3::NegativeChain, Orientation::Minus),
                ] {
                    let Ok(mp) = mediant_pred(&r, orientation) else {
                        continue;
                    };
                    for (zi, z) in zs.iter().enumerate() {
                        let partner = blend(&r, &mp, z);
                        if !partner.gt_one() {
                            continue;
                        }
                        let p1q1 = residuals[(p as usize + zi) % residuals.len()].clone();
                        let tail = beta_tails[(q as usize + zi) % beta_tails.len()].clone();
                        let slopes = SlopeSet3 {
                            kind,
                            p1q1: p1q1.clone(),
                            p2q2: r.clone(),
                            partner: partner.clone(),
                            p3q3: "2/1".parse().unwrap(),
                            r_beta: [
                                match kind {
                                    Kind3::PositiveChain => Slope::from_int(2),
                                    Kind3::NegativeChain => Slope::from_int(-2),
                                },
                                Slope::from_int(-2),
                                tail,
                            ],
                        };
                        let l3 = build_l3(&slopes).unwrap();
                        let reduced = kirby_reduce(&l3).unwrap();

                        // Criterion 8: endpoint slopes in closed form and
                        // homology invariance, all exact.
                        let expected_chain = l3.chain_slope()
                            - BigRational::from(BigInt::from(p + q - 1));
                        assert_eq!(reduced.chain_final, expected_chain, "{p}/{q} {kind:?} {z}");
                        let residual_signed = match kind {
                            Kind3::PositiveChain => p1q1.to_ratio(),
                            Kind3::NegativeChain => -p1q1.to_ratio(),
                        };
                        assert_eq!(reduced.chain_final, residual_signed, "{p}/{q} {kind:?} {z}");
                        let expected_partner = r_value(&ks, &partner).unwrap();
                        assert_eq!(
                            reduced.partner_final, expected_partner,
                            "{p}/{q} {kind:?} {z}"
                        );
                        let input_h1 = l3.h1_order();
                        assert_eq!(h1_order(&reduced.link), input_h1, "{p}/{q} {kind:?} {z}");
                        for stage in &reduced.stages {
                            assert_eq!(h1_order(stage), input_h1, "{p}/{q} {kind:?} {z}");
                        }

                        // Criterion 9: the reduced link is an alternating
                        // weighted forest.
                        assert!(
                            is_alternating_weighted(&reduced.link),
                            "{p}/{q} {kind:?} {z}"
                        );
                        cases += 1;
                    }
                }
            }
        }
        GridOutcome {
            cases,
            elapsed: start.elapsed(),
        }
    })
}

#[test]
fn criterion_08_kirby_endpoint_identities() {
    let grid = reduction_grid();
    assert!(grid.cases > 30_000, "grid ran {} cases", grid.cases);
    report(
        "8 (reduction endpoints and homology)",
        grid.elapsed,
        Duration::from_secs(120),
    );
}

#[test]
fn criterion_09_alternation_theorem() {
    let grid = reduction_grid();
    assert!(grid.cases > 30_000);
    report(
        "9 (alternation of reduced links)",
        grid.elapsed,
        Duration::from_secs(120),
    );
}

#[test]
fn criterion_10_cross_cover_consistency() {
    let start = Instant::now();
    let mut cases = 0;
    for len in 1..=5usize {
        let mut counters = vec![1u64; len];
        loop {
            let tree = AwTree {
                vertices: counters
                    .iter()
                    .enumerate()
                    .map(|(i, &w)| AwVertex {
                        id: i as u32,
                        sign: if i % 2 == 0 { 1 } else { -1 },
                        weight: Slope::from_int(w as i64),
                    })
                    .collect(),
                edges: (1..len).map(|i| ((i - 1) as u32, i as u32)).collect(),
            };
            let (goeritz, h1) = chain_cover_orders(&tree).unwrap();
            match h1 {
                lspace_core::surgery::H1Order::Finite(n) => assert_eq!(
                    n, goeritz,
                    "cover orders disagree for weights {counters:?}"
                ),
                lspace_core::surgery::H1Order::Infinite => {
                    assert!(goeritz.to_string() == "0", "weights {counters:?}")
                }
            }
            cases += 1;
            let mut pos = 0;
            loop {
                if pos == len {
                    break;
                }
                if counters[pos] < 4 {
                    counters[pos] += 1;
                    break;
                }
                counters[pos] = 1;
                pos += 1;
            }
            if counters.iter().all(|&w| w == 1) {
                break;
            }
        }
    }
    assert_eq!(cases, 4 + 16 + 64 + 256 + 1024);
    report("10 (cross-cover consistency)", start.elapsed(), Duration::from_secs(30));
}

#[test]
fn criterion_11_containment_sanity() {
    let start = Instant::now();
    assert!(diagram_contains(&Diagram::hopf(), &Diagram::trefoil()).unwrap());
    assert!(!diagram_contains(&Diagram::trefoil(), &Diagram::hopf()).unwrap());
    assert!(!brm_free(&Diagram::borromean()).unwrap());

    // Fixture corpus: 50 alternating diagrams with at most 10 crossings.
    let mut corpus: Vec<Diagram> = vec![
        Diagram::unknot(),
        Diagram::hopf(),
        Diagram::trefoil(),
        Diagram::borromean(),
    ];
    let mut vectors: Vec<Vec<u64>> = Vec::new();
    for a in 2..=10u64 {
        vectors.push(vec![a]);
    }
    for a in 1..=6u64 {
        for b in 1..=6u64 {
            if a + b <= 10 && (a, b) != (1, 1) {
                vectors.push(vec![a, b]);
            }
        }
    }
    for a in 1..=4u64 {
        for b in 1..=4u64 {
            for c in 1..=4u64 {
                if a + b + c <= 9 {
                    vectors.push(vec![a, b, c]);
                }
            }
        }
    }
    for v in vectors {
        if corpus.len() >= 50 {
            break;
        }
        corpus.push(twist_chain(&v).unwrap());
    }
    assert_eq!(corpus.len(), 50);
    assert!(corpus.iter().all(|d| d.crossing_count() <= 10));

    // Crossing-count monotonicity of containment on evaluated pairs.
    let mut evaluated = 0;
    for d2 in corpus.iter().filter(|d| d.crossing_count() <= 7) {
        for d1 in &corpus {
            if diagram_contains(d1, d2).unwrap() {
                assert!(
                    d1.crossing_count() <= d2.crossing_count(),
                    "containment with more crossings"
                );
            }
            evaluated += 1;
        }
    }
    assert!(evaluated >= 1000, "evaluated {evaluated} pairs");
    report("11 (containment sanity)", start.elapsed(), Duration::from_secs(120));
}
