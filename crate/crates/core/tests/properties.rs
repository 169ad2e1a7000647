//! Property tests for the invariants that hold across random inputs, plus
//! the independent-oracle agreements that pin the implementations against
//! brute-force expansions living only in this file.

use lspace_core::contfrac::{
    blend, cfe, eval_cfrac, mediant_pred, r_value, truncation_value, CFrac, Orientation,
    PosRational, Slope,
};
use lspace_core::linkdiag::{
    brm_free, diagram_contains, from_braid_closure, goeritz_h1_all_choices, smooth,
    validate_diagram, Diagram, SmoothMode, SmoothingChoice,
};
use lspace_core::signmat::{
    are_equivalent, canonical_form, class_le, det_exact, enumerate_effective_classes,
    enumerate_maximal_effective_classes, is_effective, is_maximal, is_strong_pair, perm_abs,
    IntMatrix, Sign, SignMatrix,
};
use lspace_core::surgery::{
    blow_up_pair, erase_infinity, h1_order, is_alternating_weighted, presentation_matrix,
    tree_to_framed_link, AwTree, AwVertex, FramedComponent, FramedLink, LinkEdge,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

// ---------------------------------------------------------------------------
// Test-side oracles, independent of the library implementations.
// ---------------------------------------------------------------------------

/// Signed determinant by direct symmetric-group expansion over i64.
fn det_oracle(n: usize, m: &[i64]) -> i64 {
    fn rec(n: usize, m: &[i64], row: usize, used: &mut [bool], sign: i64) -> i64 {
        if row == n {
            return sign;
        }
        let mut acc = 0;
        let mut parity = sign;
        for col in 0..n {
            if used[col] {
                continue;
            }
            if m[row * n + col] != 0 {
                used[col] = true;
                acc += m[row * n + col] * rec(n, m, row + 1, used, parity);
                used[col] = false;
            }
            parity = -parity;
            let _ = parity;
            // Parity handled below by counting skipped live columns.
        }
        acc
    }
    // The closure above does not track parity correctly; use a plain
    // permutation enumeration instead.
    let _ = rec;
    let mut perm: Vec<usize> = (0..n).collect();
    let mut total = 0i64;
    permute(&mut perm, 0, &mut |p| {
        let mut prod = 1i64;
        for (i, &j) in p.iter().enumerate() {
            prod *= m[i * n + j];
            if prod == 0 {
                break;
            }
        }
        total += parity_of(p) * prod;
    });
    total
}

/// Permanent of absolute values by direct expansion over i64.
fn perm_oracle(n: usize, m: &[i64]) -> i64 {
    let mut perm: Vec<usize> = (0..n).collect();
    let mut total = 0i64;
    permute(&mut perm, 0, &mut |p| {
        let mut prod = 1i64;
        for (i, &j) in p.iter().enumerate() {
            prod *= m[i * n + j].abs();
            if prod == 0 {
                break;
            }
        }
        total += prod;
    });
    total
}

fn permute(perm: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
    if k == perm.len() {
        f(perm);
        return;
    }
    for i in k..perm.len() {
        perm.swap(k, i);
        permute(perm, k + 1, f);
        perm.swap(k, i);
    }
}

fn parity_of(p: &[usize]) -> i64 {
    let mut seen = vec![false; p.len()];
    let mut sign = 1i64;
    for i in 0..p.len() {
        if seen[i] {
            continue;
        }
        let mut j = i;
        let mut len = 0;
        while !seen[j] {
            seen[j] = true;
            j = p[j];
            len += 1;
        }
        if len % 2 == 0 {
            sign = -sign;
        }
    }
    sign
}

// ---------------------------------------------------------------------------
// Strategies
// ---------------------------------------------------------------------------

fn sign_matrix(g: usize) -> impl Strategy<Value = SignMatrix> {
    prop::collection::vec(prop_oneof![Just(Sign::Minus), Just(Sign::Zero), Just(Sign::Plus)], g * g)
        .prop_map(move |entries| SignMatrix::new(g, entries).unwrap())
}

fn int_matrix(g: usize, bound: i64) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-bound..=bound, g * g)
}

fn pos_rational() -> impl Strategy<Value = PosRational> {
    (2u64..400, 1u64..400)
        .prop_filter("p > q and coprime handled by reduction", |(p, q)| p > q)
        .prop_map(|(p, q)| PosRational::new(p, q).unwrap())
}

/// A random generator word applied to a sign matrix: row/column swaps and
/// negations plus transpose.
fn apply_generator(s: &SignMatrix, which: u8, i: usize, j: usize) -> SignMatrix {
    let g = s.g();
    let (i, j) = (i % g, j % g);
    let mut out = s.clone();
    match which % 5 {
        0 => {
            if i != j {
                for c in 0..g {
                    let (a, b) = (s.get(i, c), s.get(j, c));
                    out.set(i, c, b);
                    out.set(j, c, a);
                }
            }
        }
        1 => {
            if i != j {
                for r in 0..g {
                    let (a, b) = (s.get(r, i), s.get(r, j));
                    out.set(r, i, b);
                    out.set(r, j, a);
                }
            }
        }
        2 => {
            for c in 0..g {
                out.set(i, c, s.get(i, c).negate());
            }
        }
        3 => {
            for r in 0..g {
                out.set(r, i, s.get(r, i).negate());
            }
        }
        _ => out = s.transpose(),
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn canonical_form_is_idempotent(s in sign_matrix(3)) {
        let c = canonical_form(&s);
        prop_assert_eq!(canonical_form(&c), c);
    }

    #[test]
    fn canonical_form_is_orbit_invariant(
        s in sign_matrix(3),
        word in prop::collection::vec((0u8..5, 0usize..3, 0usize..3), 1..6)
    ) {
        let mut t = s.clone();
        for (which, i, j) in word {
            t = apply_generator(&t, which, i, j);
        }
        prop_assert_eq!(canonical_form(&s), canonical_form(&t));
        prop_assert!(are_equivalent(&s, &t).unwrap());
    }

    #[test]
    fn effectiveness_is_orbit_invariant(
        s in sign_matrix(3),
        word in prop::collection::vec((0u8..5, 0usize..3, 0usize..3), 1..6)
    ) {
        let mut t = s.clone();
        for (which, i, j) in word {
            t = apply_generator(&t, which, i, j);
        }
        prop_assert_eq!(is_effective(&s), is_effective(&t));
        if is_effective(&s) {
            prop_assert_eq!(is_maximal(&s).unwrap(), is_maximal(&t).unwrap());
        }
    }

    #[test]
    fn strong_pair_matches_independent_expansion(entries in int_matrix(3, 3)) {
        let a = IntMatrix::from_i64(3, &entries).unwrap();
        let b = a.abs();
        let lib = is_strong_pair(&a, &b).unwrap();
        let oracle = det_oracle(3, &entries).abs() == perm_oracle(3, &entries);
        prop_assert_eq!(lib, oracle);
        // The two-condition form must agree as well: sign pattern
        // effective and |a_ij| = b_ij wherever b_ij > 0 (true for abs(A)).
        prop_assert_eq!(lib, is_effective(&SignMatrix::of_int(&a)));
    }

    #[test]
    fn strong_pair_directions_against_two_condition_form(
        entries in int_matrix(3, 2),
        bumps in prop::collection::vec(0i64..2, 9)
    ) {
        // For geometric data B >= |A|: an exact entrywise match with an
        // effective sign pattern always gives the equality, and the
        // equality always forces effectiveness together with
        // perm(B) = perm(|A|). The literal entrywise converse can fail
        // when a bumped entry lies on no surviving permutation term, so
        // only these directions are asserted.
        let a = IntMatrix::from_i64(3, &entries).unwrap();
        let bumped: Vec<i64> = entries.iter().zip(&bumps).map(|(x, b)| x.abs() + b).collect();
        let b = IntMatrix::from_i64(3, &bumped).unwrap();
        let strong = is_strong_pair(&a, &b).unwrap();
        if bumps.iter().all(|&x| x == 0) && is_effective(&SignMatrix::of_int(&a)) {
            prop_assert!(strong);
        }
        if strong {
            prop_assert!(is_effective(&SignMatrix::of_int(&a)));
            prop_assert_eq!(perm_abs(&b), perm_abs(&a.abs()));
        }
    }

    #[test]
    fn strong_pair_matches_expansion_g4(entries in int_matrix(4, 2)) {
        let a = IntMatrix::from_i64(4, &entries).unwrap();
        let lib = is_strong_pair(&a, &a.abs()).unwrap();
        let oracle = det_oracle(4, &entries).abs() == perm_oracle(4, &entries);
        prop_assert_eq!(lib, oracle);
    }

    #[test]
    fn triangle_bound(entries in int_matrix(3, 4)) {
        let a = IntMatrix::from_i64(3, &entries).unwrap();
        prop_assert!(det_exact(&a).abs() <= perm_abs(&a.abs()));
    }

    #[test]
    fn permanent_routes_agree_past_the_crossover(entries in int_matrix(6, 2)) {
        // perm_abs switches from direct expansion to inclusion-exclusion
        // at g = 6; both routes must produce the same value there.
        let a = IntMatrix::from_i64(6, &entries).unwrap();
        let direct = {
            let mut total = BigInt::from(0);
            let mut perm: Vec<usize> = (0..6).collect();
            permute(&mut perm, 0, &mut |p| {
                let mut prod = 1i64;
                for (i, &j) in p.iter().enumerate() {
                    prod *= entries[i * 6 + j].abs();
                    if prod == 0 {
                        break;
                    }
                }
                total += BigInt::from(prod);
            });
            total
        };
        prop_assert_eq!(perm_abs(&a), direct);
    }

    #[test]
    fn class_le_implies_zero_count_order(s1 in sign_matrix(2), s2 in sign_matrix(2)) {
        prop_assume!(is_effective(&s1) && is_effective(&s2));
        if class_le(&s1, &s2).unwrap() {
            prop_assert!(canonical_form(&s1).zero_count() >= canonical_form(&s2).zero_count());
        }
    }

    #[test]
    fn cfe_eval_roundtrip(r in pos_rational()) {
        let ks = cfe(&r).unwrap();
        prop_assert_eq!(eval_cfrac(&ks), r);
    }

    #[test]
    fn eval_cfe_roundtrip(digits in prop::collection::vec(1u64..9, 0..8), last in 2u64..9) {
        let mut ds = digits;
        ds.push(last);
        let ks = CFrac::new(ds).unwrap();
        let r = eval_cfrac(&ks);
        prop_assert_eq!(cfe(&r).unwrap(), ks);
    }

    #[test]
    fn mediant_satisfies_congruence(r in pos_rational()) {
        for orientation in [Orientation::Plus, Orientation::Minus] {
            if let Ok(mp) = mediant_pred(&r, orientation) {
                let lhs = BigInt::from(mp.pbar.clone()) * BigInt::from(r.denom().clone())
                    - BigInt::from(mp.qbar.clone()) * BigInt::from(r.numer().clone());
                prop_assert_eq!(lhs, BigInt::from(orientation.sign()));
                prop_assert!(mp.pbar <= *r.numer() && mp.qbar <= *r.denom());
            }
        }
    }

    #[test]
    fn blend_is_strictly_between(r in pos_rational(), d1 in 1u64..12, d2 in 1u64..12) {
        let z = BigRational::new(BigInt::from(d2), BigInt::from(d1));
        if let Ok(mp) = mediant_pred(&r, Orientation::Plus) {
            let b = blend(&r, &mp, &z);
            prop_assert!(r < b && b < mp.value());
        }
        if let Ok(mp) = mediant_pred(&r, Orientation::Minus) {
            let b = blend(&r, &mp, &z);
            prop_assert!(mp.value() < b && b < r);
        }
    }

    #[test]
    fn r_value_is_admissible_on_blends(r in pos_rational(), d1 in 1u64..8, d2 in 1u64..8) {
        let ks = cfe(&r).unwrap();
        let z = BigRational::new(BigInt::from(d2), BigInt::from(d1));
        for orientation in [Orientation::Plus, Orientation::Minus] {
            if let Ok(mp) = mediant_pred(&r, orientation) {
                let rp = blend(&r, &mp, &z);
                prop_assert!(r_value(&ks, &rp).is_ok());
            }
        }
    }

    #[test]
    fn blow_up_preserves_h1(
        f1n in -9i64..10, f1d in 1i64..5,
        f2n in -9i64..10, f2d in 1i64..5,
        lk in prop_oneof![Just(1i64), Just(-1i64)]
    ) {
        let link = FramedLink::new(
            vec![
                FramedComponent { id: 0, framing: Slope::from_frac(f1n, f1d) },
                FramedComponent { id: 1, framing: Slope::from_frac(f2n, f2d) },
            ],
            vec![LinkEdge { a: 0, b: 1, lk }],
        ).unwrap();
        let after = blow_up_pair(&link, (0, 1)).unwrap();
        prop_assert_eq!(h1_order(&after), h1_order(&link));
    }

    #[test]
    fn forest_and_bareiss_determinants_agree(
        framings in prop::collection::vec((-9i64..10, 1i64..5), 2..7),
        shape in prop::collection::vec(0usize..6, 1..6),
        lks in prop::collection::vec(prop_oneof![Just(1i64), Just(-1i64)], 6)
    ) {
        // Random forest: attach vertex i+1 to a random earlier vertex.
        let n = framings.len();
        let components: Vec<FramedComponent> = framings.iter().enumerate().map(|(i, &(p, q))| {
            FramedComponent { id: i as u32, framing: Slope::from_frac(p, q) }
        }).collect();
        let links: Vec<LinkEdge> = (1..n).map(|i| LinkEdge {
            a: (shape[(i - 1) % shape.len()] % i) as u32,
            b: i as u32,
            lk: lks[(i - 1) % lks.len()],
        }).collect();
        let link = FramedLink::new(components, links).unwrap();
        // h1_order takes the leaf-elimination route for forests; compare
        // with the dense fraction-free determinant directly.
        let dense = det_exact(&presentation_matrix(&link).unwrap());
        let by_h1 = h1_order(&link);
        match by_h1 {
            lspace_core::surgery::H1Order::Finite(m) => {
                prop_assert_eq!(m, dense.magnitude().clone());
            }
            lspace_core::surgery::H1Order::Infinite => prop_assert!(dense.is_zero()),
        }
    }

    #[test]
    fn erase_infinity_is_idempotent(
        framings in prop::collection::vec(
            prop_oneof![
                (1i64..9, 1i64..4).prop_map(|(p, q)| Slope::from_frac(p, q)),
                Just(Slope::Infinity)
            ],
            1..6
        )
    ) {
        let n = framings.len();
        let components: Vec<FramedComponent> = framings.into_iter().enumerate()
            .map(|(i, framing)| FramedComponent { id: i as u32, framing })
            .collect();
        let links: Vec<LinkEdge> = (1..n)
            .map(|i| LinkEdge { a: (i - 1) as u32, b: i as u32, lk: 1 })
            .collect();
        let link = FramedLink::new(components, links).unwrap();
        let once = erase_infinity(&link);
        prop_assert_eq!(erase_infinity(&once), once);
    }

    #[test]
    fn tree_links_alternate(weights in prop::collection::vec((1u64..9, 1u64..4), 1..6)) {
        let tree = AwTree {
            vertices: weights.iter().enumerate().map(|(i, &(p, q))| AwVertex {
                id: i as u32,
                sign: if i % 2 == 0 { 1 } else { -1 },
                weight: Slope::from_frac(p as i64, q as i64),
            }).collect(),
            edges: (1..weights.len()).map(|i| ((i - 1) as u32, i as u32)).collect(),
        };
        let link = tree_to_framed_link(&tree).unwrap();
        prop_assert!(is_alternating_weighted(&link));
    }

    #[test]
    fn smoothing_shrinks_and_validates(word in prop::collection::vec(
        prop_oneof![Just(1i32), Just(-1i32), Just(2i32), Just(-2i32)], 2..7
    )) {
        let Ok(d) = from_braid_closure(3, &word) else {
            // Words whose closure is not alternating-realizable are skipped.
            return Ok(());
        };
        prop_assume!(validate_diagram(&d).is_ok());
        for c in 0..d.crossing_count() {
            for mode in [SmoothMode::A, SmoothMode::B] {
                let s = smooth(&d, SmoothingChoice { crossing: c, mode }).unwrap();
                prop_assert_eq!(s.crossing_count(), d.crossing_count() - 1);
                prop_assert!(validate_diagram(&s).is_ok());
            }
        }
    }

    #[test]
    fn goeritz_choices_agree_on_braids(word in prop::collection::vec(
        prop_oneof![Just(1i32), Just(-2i32)], 2..7
    )) {
        let Ok(d) = from_braid_closure(3, &word) else { return Ok(()); };
        prop_assume!(validate_diagram(&d).is_ok());
        prop_assume!(d.free_loops == 0 && d.crossing_count() > 0);
        let pieces = lspace_core::linkdiag::connected_components(&d);
        prop_assume!(pieces.len() == 1);
        let all = goeritz_h1_all_choices(&d).unwrap();
        let first = all[0].clone();
        prop_assert!(all.iter().all(|x| *x == first));
    }
}

// ---------------------------------------------------------------------------
// Exhaustive small-domain facts that are cheap enough for unit testing.
// ---------------------------------------------------------------------------

#[test]
fn truncation_equals_mediant_for_all_small_slopes() {
    use num_integer::Integer;
    for p in 2u64..=120 {
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
                        assert!(!t.empty_truncation);
                        assert_eq!(t.value, mp.value(), "mismatch at {p}/{q}");
                    }
                    Err(_) => assert!(t.empty_truncation),
                }
            }
        }
    }
}

#[test]
fn every_small_effective_class_sits_below_a_maximal_one() {
    // Vacuously effective classes (no surviving permutation term) cannot
    // come from strong diagrams and are excluded from the maximal
    // enumeration, so the order fact is checked on the complement.
    use lspace_core::signmat::has_nonzero_term;
    for g in 1..=3usize {
        let classes = enumerate_effective_classes(g).unwrap();
        let maximal = enumerate_maximal_effective_classes(g).unwrap();
        for c in classes.iter().filter(|c| has_nonzero_term(c)) {
            assert!(
                maximal.iter().any(|m| class_le(c, m).unwrap()),
                "g={g}: class {c} is not below any maximal class"
            );
        }
    }
}

#[test]
fn containment_is_reflexive_and_transitive_on_fixtures() {
    let fixtures: Vec<Diagram> = vec![
        Diagram::unknot(),
        Diagram::hopf(),
        Diagram::trefoil(),
        lspace_core::linkdiag::twist_chain(&[2, 2]).unwrap(),
        lspace_core::linkdiag::twist_chain(&[4]).unwrap(),
        lspace_core::linkdiag::twist_chain(&[5]).unwrap(),
    ];
    let n = fixtures.len();
    let mut rel = vec![vec![false; n]; n];
    for i in 0..n {
        for j in 0..n {
            rel[i][j] = diagram_contains(&fixtures[i], &fixtures[j]).unwrap();
        }
        assert!(rel[i][i], "containment must be reflexive");
    }
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if rel[i][j] && rel[j][k] {
                    assert!(rel[i][k], "transitivity broken at ({i},{j},{k})");
                }
            }
        }
    }
}

#[test]
fn brm_freeness_is_monotone_on_fixtures() {
    // diagram_contains(d1, d2) and !brm_free(d1) imply !brm_free(d2).
    let with_brm = Diagram::borromean();
    let fixtures = [Diagram::trefoil(), Diagram::borromean(), Diagram::hopf()];
    for d2 in &fixtures {
        for d1 in &fixtures {
            if diagram_contains(d1, d2).unwrap() && !brm_free(d1).unwrap() {
                assert!(!brm_free(d2).unwrap());
            }
        }
    }
    assert!(!brm_free(&with_brm).unwrap());
}
