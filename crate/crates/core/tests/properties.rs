use adjsurf_core::adjoint::{AdjointSquare, InvariantRecord};
use adjsurf_core::classify::{
    classify, internal_projection_closure, solve_class1, solve_class2, solve_class3, Assumption,
    Case,
};
use adjsurf_core::connectedness::{
    analyze_decompositions, ConfiguredDivisor, SplitTable, DEFAULT_BUDGET,
};
use adjsurf_core::lattice::{
    arithmetic_genus, intersect, is_nef, DivisorClass, SurfaceModel,
};
use proptest::prelude::*;

fn model() -> impl Strategy<Value = SurfaceModel> {
    prop_oneof![
        Just(SurfaceModel::ProjectivePlane),
        (0u32..8).prop_map(|e| SurfaceModel::Hirzebruch { e }),
        (0u32..9).prop_map(|points| SurfaceModel::BlowupOfPlane { points, curvilinear: false }),
        (0u32..4, 0u32..4).prop_map(|(e, points)| SurfaceModel::BlownUpHirzebruch { e, points }),
        (1u32..5, -1i64..6).prop_map(|(q, e)| SurfaceModel::NumericallyRuled { q, e }),
    ]
}

fn classes(n: usize) -> impl Strategy<Value = (SurfaceModel, Vec<Vec<i64>>)> {
    model().prop_flat_map(move |m| {
        let one = prop::collection::vec(-50i64..50, m.rank());
        (Just(m), prop::collection::vec(one, n))
    })
}

fn rational_divisor(mults: Vec<u32>, gram: Vec<Vec<i64>>) -> ConfiguredDivisor {
    let k = (0..gram.len()).map(|i| -2 - gram[i][i]).collect();
    ConfiguredDivisor::new(mults, gram, k).unwrap()
}

/// Up to four components, multiplicities up to 3.
fn configured() -> impl Strategy<Value = ConfiguredDivisor> {
    (1usize..=4).prop_flat_map(|n| {
        (
            prop::collection::vec(1u32..=3, n),
            prop::collection::vec(-4i64..=3, n),
            prop::collection::vec(0i64..=3, n * n),
        )
            .prop_map(move |(mults, diag, off)| {
                let mut gram = vec![vec![0; n]; n];
                for a in 0..n {
                    gram[a][a] = diag[a];
                    for b in a + 1..n {
                        gram[a][b] = off[a * n + b];
                        gram[b][a] = off[a * n + b];
                    }
                }
                rational_divisor(mults, gram)
            })
    })
}

fn min_or_inf(d: &ConfiguredDivisor) -> i128 {
    analyze_decompositions(d, DEFAULT_BUDGET).unwrap().min_value.unwrap_or(i128::MAX)
}

proptest! {
    #[test]
    fn intersection_is_symmetric_and_bilinear((m, v) in classes(3)) {
        let c: Vec<DivisorClass> = v.iter().map(|x| DivisorClass::from_i64(m, x).unwrap()).collect();
        prop_assert_eq!(intersect(&c[0], &c[1]).unwrap(), intersect(&c[1], &c[0]).unwrap());
        let sum = c[0].checked_add(&c[1]).unwrap();
        prop_assert_eq!(
            intersect(&sum, &c[2]).unwrap(),
            intersect(&c[0], &c[2]).unwrap() + intersect(&c[1], &c[2]).unwrap()
        );
    }

    #[test]
    fn genus_of_a_sum((m, v) in classes(2)) {
        let a = DivisorClass::from_i64(m, &v[0]).unwrap();
        let b = DivisorClass::from_i64(m, &v[1]).unwrap();
        let lhs = arithmetic_genus(&a.checked_add(&b).unwrap()).unwrap();
        let rhs = arithmetic_genus(&a).unwrap() + arithmetic_genus(&b).unwrap()
            + intersect(&a, &b).unwrap() - 1;
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn pullback_preserves_intersections(
        r in 0u32..5,
        a in prop::collection::vec(-20i64..20, 6),
        b in prop::collection::vec(-20i64..20, 6),
        extra in 1u32..4,
    ) {
        let m = SurfaceModel::BlowupOfPlane { points: r, curvilinear: false };
        let rank = m.rank();
        let x = DivisorClass::from_i64(m, &a[..rank]).unwrap();
        let y = DivisorClass::from_i64(m, &b[..rank]).unwrap();
        let zeros = vec![0i64; extra as usize];
        let (px, py) = (x.blown_up(&zeros).unwrap(), y.blown_up(&zeros).unwrap());
        prop_assert_eq!(intersect(&px, &py).unwrap(), intersect(&x, &y).unwrap());
    }

    #[test]
    fn split_table_matches_direct_search(d in configured()) {
        let slow = analyze_decompositions(&d, DEFAULT_BUDGET).unwrap();
        let table = SplitTable::new(&d, DEFAULT_BUDGET).unwrap();
        let fast = table.min_split(d.mults());
        prop_assert_eq!(slow.min_value, fast.as_ref().map(|f| f.0));
        prop_assert_eq!(slow.witness.map(|w| w.0), fast.map(|f| f.1));
    }

    #[test]
    fn witness_attains_the_minimum(d in configured()) {
        let r = analyze_decompositions(&d, DEFAULT_BUDGET).unwrap();
        if let (Some(m), Some((a, b))) = (r.min_value, r.witness) {
            prop_assert_eq!(d.dot(&a, &b).unwrap(), m);
            prop_assert_eq!(d.dot(&b, &a).unwrap(), m);
            prop_assert!(a.iter().any(|&x| x > 0) && b.iter().any(|&x| x > 0));
        }
    }

    /// A new component C meeting every old one non-negatively: a split of
    /// D + C either isolates C (value C.D) or adds a non-negative C.D_2 to
    /// a split of D.
    #[test]
    fn adding_a_component_is_bounded_below(
        d in configured(),
        self_int in -4i64..=3,
        meets in prop::collection::vec(0i64..=3, 4),
    ) {
        let n = d.len();
        let mut gram: Vec<Vec<i64>> = d.gram().to_vec();
        for (row, &c) in gram.iter_mut().zip(&meets) {
            row.push(c);
        }
        let mut last = meets[..n].to_vec();
        last.push(self_int);
        gram.push(last);
        let mut mults = d.mults().to_vec();
        mults.push(1);
        let c_dot_d: i128 = d.mults().iter().zip(&meets).map(|(&m, &c)| i128::from(m) * i128::from(c)).sum();
        let bigger = rational_divisor(mults, gram);
        prop_assert!(min_or_inf(&bigger) >= min_or_inf(&d).min(c_dot_d));
    }

    #[test]
    fn classify_always_explains_an_empty_answer(
        q in 0i64..4,
        g in 0i64..25,
        d in 1i64..110,
        shift in 0i64..5,
        k2 in prop::option::of(-30i64..10),
        mu in prop::option::of(1i64..6),
    ) {
        let n = d - g + 1 - q + shift.min(q);
        let mut rec = InvariantRecord::new(d, n, g, q);
        rec.k2 = k2;
        rec.mu = mu;
        if let Ok(c) = classify(&rec) {
            prop_assert!(c.is_feasible() || !c.rejections.is_empty());
            let keys: Vec<_> = c.outcomes.iter().map(|o| (o.case, o.assumptions.clone())).collect();
            let mut sorted = keys.clone();
            sorted.sort();
            prop_assert_eq!(keys, sorted);
            for o in &c.outcomes {
                prop_assert_ne!(o.verified, Some(false));
                if matches!(o.case, Case::ConicBundle { .. }) {
                    let zero = matches!(AdjointSquare::of(&rec), AdjointSquare::Known(0))
                        || rec.adjoint_square().is_none();
                    prop_assert!(zero, "conic bundle with (K+H)^2 = {:?}", rec.adjoint_square());
                }
            }
        }
    }
}

#[test]
fn adding_a_component_can_lower_the_minimum() {
    // D = A + B with A.B = 3; C meets A once: the split C | D has value 1.
    let d = rational_divisor(vec![1, 1], vec![vec![-1, 3], vec![3, -1]]);
    let bigger = rational_divisor(
        vec![1, 1, 1],
        vec![vec![-1, 3, 1], vec![3, -1, 0], vec![1, 0, -1]],
    );
    assert_eq!(min_or_inf(&d), 3);
    assert_eq!(min_or_inf(&bigger), 1);
}

#[test]
fn every_solved_family_member_verifies() {
    for g in 1..=20i64 {
        for d in (2 * g - 1).max(3)..=(4 * g + 12) {
            let mut all = solve_class1(d, g).unwrap();
            all.extend(solve_class2(d, g).unwrap());
            all.extend(solve_class3(d, g).unwrap());
            for o in all {
                assert_eq!(o.verified, Some(true), "{:?} at ({d}, {g})", o.case);
                assert_eq!((o.d, o.g), (d, g));
            }
        }
    }
}

#[test]
fn minimal_degree_gives_only_minimal_degree_cases() {
    for d in 2..=40 {
        let c = classify(&InvariantRecord::new(d, d + 1, 0, 0)).unwrap();
        assert!(c.is_feasible());
        assert!(c.cases().all(|c| matches!(c, Case::VeroneseV2 | Case::Scroll { .. })));
        let cones: Vec<_> = c.cases().filter(|c| matches!(c, Case::Scroll { cone: true, .. })).collect();
        assert_eq!(cones, vec![&Case::Scroll { q: 0, cone: true, e: Some(d as u32) }]);
    }
}

#[test]
fn documented_examples() {
    let c = classify(&InvariantRecord::new(4, 5, 0, 0)).unwrap();
    assert!(c.cases().any(|c| *c == Case::VeroneseV2));

    let found = solve_class1(24, 5).unwrap();
    let es: Vec<u32> = found
        .iter()
        .filter_map(|o| match o.case {
            Case::Class1Hyperelliptic { e, .. } => Some(e),
            _ => None,
        })
        .collect();
    assert_eq!(es, (0..=6).collect::<Vec<_>>());

    let found = solve_class3(49, 15).unwrap();
    assert!(found.iter().any(|o| o.case == Case::Class3Plane7 { s: 0, t: 0 }));
    let found = solve_class3(60, 20).unwrap();
    assert!(found.iter().any(|o| o.case == Case::Class3Plane8 { s: 1, t: 0 }));

    let v5 = solve_class1(25, 6).unwrap().into_iter().find(|o| o.case == Case::Class1V5 { b: 0 }).unwrap();
    let closure = internal_projection_closure(&v5, 17).unwrap();
    assert_eq!(closure.len(), 18);
    for o in &closure {
        let b = 25 - o.d;
        assert_eq!(o.warnings.iter().any(|w| w.contains("conic")), b >= 15, "b = {b}");
    }
    assert_eq!(internal_projection_closure(&v5, 0).unwrap().len(), 1);
}

#[test]
fn undecided_branches_are_labelled() {
    // q = 0, g = 4, d = 9: nothing fixes (K+H)^2 or the biadjoint.
    let c = classify(&InvariantRecord::new(9, 6, 4, 0)).unwrap();
    assert!(c.is_feasible());
    for o in &c.outcomes {
        assert!(!o.assumptions.is_empty(), "{:?}", o.case);
    }
    assert!(c
        .outcomes
        .iter()
        .any(|o| o.assumptions.contains(&Assumption::AdjointSquareZero)));
}

/// Fibres of the pencil of lines through a point of the plane blown up in
/// three general points: `D = L - E_i = (L - E_i - E_j) + E_j`.
#[test]
fn reducible_fibres_of_low_degree_polarizations() {
    let m = SurfaceModel::BlowupOfPlane { points: 3, curvilinear: false };
    let class = |v: [i64; 4]| DivisorClass::from_i64(m, &v).unwrap();
    let mut curves = Vec::new();
    for k in 1..4 {
        let mut e = [0; 4];
        e[k] = 1;
        curves.push(class(e));
        let mut line = [1, -1, -1, -1];
        line[k] = 0;
        curves.push(class(line));
    }
    let dot = |a: &DivisorClass, b: &DivisorClass| -> i64 {
        intersect(a, b).unwrap().try_into().unwrap()
    };
    let mut instances = 0;
    for a in 2..=7i64 {
        for b1 in 0..a {
            for b2 in 0..a {
                for b3 in 0..a {
                    let pol = class([a, -b1, -b2, -b3]);
                    if !is_nef(&pol, Some(&curves)).unwrap().is_nef() || dot(&pol, &pol) < 3 {
                        continue;
                    }
                    for i in 1..4usize {
                        let mut fibre = [1, 0, 0, 0];
                        fibre[i] = -1;
                        let fibre = class(fibre);
                        if dot(&pol, &fibre) != 1 {
                            continue;
                        }
                        for j in (1..4usize).filter(|&j| j != i) {
                            let mut e = [0; 4];
                            e[j] = 1;
                            let mut line = [1, 0, 0, 0];
                            line[i] = -1;
                            line[j] = -1;
                            let (ea, lb) = (class(e), class(line));
                            let gram = vec![
                                vec![dot(&ea, &ea), dot(&ea, &lb)],
                                vec![dot(&lb, &ea), dot(&lb, &lb)],
                            ];
                            assert_eq!(dot(&fibre, &fibre), 0);
                            let d = rational_divisor(vec![1, 1], gram);
                            let r = analyze_decompositions(&d, DEFAULT_BUDGET).unwrap();
                            assert_eq!(r.min_value, Some(1));
                            let (x, y) = r.witness.unwrap();
                            let sq = |v: &[u32]| d.dot(v, v).unwrap();
                            assert_eq!((sq(&x), sq(&y)), (-1, -1));
                            let deg = |v: &[u32]| {
                                let parts = [&ea, &lb];
                                v.iter().zip(parts).map(|(&k, c)| i64::from(k) * dot(&pol, c)).sum::<i64>()
                            };
                            assert!(deg(&x) == 0 || deg(&y) == 0);
                            instances += 1;
                        }
                    }
                }
            }
        }
    }
    assert!(instances > 10, "only {instances} instances");
}
