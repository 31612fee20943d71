use approx::assert_relative_eq;
use proptest::prelude::*;

use softfix_core::descriptor::{parse_descriptor, SpaceDescriptor};
use softfix_core::fixed_point::{
    brute_force_fixed_points, estimate_coefficient, ContractionKind, PairPlan,
};
use softfix_core::mapping::TableMapping;
use softfix_core::metric::{repair_to_metric, DistanceTable, SoftMetric, TabulatedSpace, ETA};
use softfix_core::soft_real::{geometric_tail_bound, ParamSet, SoftReal};
use softfix_core::soft_set::{assemble, decompose, SoftPoint, SoftSet, Universe};
use softfix_core::topology::{
    closure, interior, is_closed, is_open, region_set, separate_closed_sets, Region,
};

fn soft_real(k: usize) -> impl Strategy<Value = SoftReal> {
    prop::collection::vec(-100.0..100.0_f64, k).prop_map(|v| SoftReal::new(v).unwrap())
}

/// Raw tables with a sprinkling of zeros and asymmetric entries.
fn raw_table(n_points: usize, components: usize) -> impl Strategy<Value = DistanceTable> {
    prop::collection::vec(
        prop_oneof![1 => Just(0.0), 9 => 0.0..10.0_f64],
        n_points * n_points * components,
    )
    .prop_map(move |v| {
        DistanceTable::from_fn(n_points, components, |i, j, k| {
            v[(i * n_points + j) * components + k]
        })
    })
}

fn space(n_elements: usize, n_labels: usize, raw: &DistanceTable) -> TabulatedSpace {
    let universe = Universe::new((0..n_elements).map(|i| format!("x{i}"))).unwrap();
    let params = ParamSet::labels((0..n_labels).map(|i| format!("e{i}"))).unwrap();
    repair_to_metric(params, universe, raw).unwrap()
}

/// (elements, labels, repaired space).
fn any_space() -> impl Strategy<Value = (usize, usize, TabulatedSpace)> {
    (1..=4usize, 1..=3usize).prop_flat_map(|(ne, nl)| {
        raw_table(ne * nl, nl).prop_map(move |raw| (ne, nl, space(ne, nl, &raw)))
    })
}

fn mask_set(ne: usize, nl: usize) -> impl Strategy<Value = SoftSet> {
    any::<u64>().prop_map(move |m| SoftSet::from_mask(ne, nl, m))
}

fn member(s: &SoftSet, e: usize, l: usize) -> bool {
    s.contains(&SoftPoint::new(e, l))
}

proptest! {
    #[test]
    fn order_is_a_partial_order(a in soft_real(3), b in soft_real(3), c in soft_real(3)) {
        let ab = a.compare(&b, 0.0).unwrap();
        let ba = b.compare(&a, 0.0).unwrap();
        prop_assert_eq!(ab.le, ba.ge);
        prop_assert!(a.compare(&a, 0.0).unwrap().eq);
        if ab.le && ba.le {
            prop_assert_eq!(&a, &b);
        }
        if ab.le && b.compare(&c, 0.0).unwrap().le {
            prop_assert!(a.compare(&c, 0.0).unwrap().le);
        }
        if ab.lt {
            prop_assert!(ab.le && a.lt(&b).unwrap());
        }
        prop_assert_eq!(ab.incomparable, !ab.le && !ab.ge);
        let expected = a.entries().iter().zip(b.entries()).all(|(x, y)| x <= y);
        prop_assert_eq!(ab.le, expected);
    }

    #[test]
    fn arithmetic_is_componentwise(a in soft_real(4), b in soft_real(4)) {
        let sum = a.add(&b).unwrap();
        let back = sum.sub(&b).unwrap();
        for k in 0..4 {
            prop_assert_eq!(sum.get(k), a.get(k) + b.get(k));
            assert_relative_eq!(back.get(k), a.get(k), epsilon = 1e-12, max_relative = 1e-12);
        }
        prop_assert!(a.min(&b).unwrap().le_within(&a.max(&b).unwrap(), 0.0).unwrap());
    }

    #[test]
    fn tail_bound_dominates_the_series(alpha in prop::collection::vec(0.0..0.95_f64, 2), m in 0usize..30, base in 0.0..5.0_f64) {
        let a = SoftReal::new(alpha.clone()).unwrap();
        let b = SoftReal::constant(2, base);
        let bound = geometric_tail_bound(&a, m, &b).unwrap();
        for (k, &ak) in alpha.iter().enumerate() {
            // Partial sums of base * (a^m + a^{m+1} + ...) stay below the bound.
            let partial: f64 = (m..m + 2_000).map(|j| base * ak.powi(j as i32)).sum();
            prop_assert!(partial <= bound.get(k) * (1.0 + 1e-12) + 1e-300);
            assert_relative_eq!(bound.get(k), base * ak.powi(m as i32) / (1.0 - ak), max_relative = 1e-12);
        }
    }

    #[test]
    fn set_algebra(a in mask_set(5, 3), b in mask_set(5, 3), c in mask_set(5, 3)) {
        let u = a.union(&b).unwrap();
        let i = a.intersect(&b).unwrap();
        prop_assert_eq!(u.complement(), a.complement().intersect(&b.complement()).unwrap());
        prop_assert_eq!(i.complement(), a.complement().union(&b.complement()).unwrap());
        prop_assert_eq!(a.complement().complement(), a.clone());
        prop_assert_eq!(
            a.intersect(&b.union(&c).unwrap()).unwrap(),
            i.union(&a.intersect(&c).unwrap()).unwrap()
        );
        prop_assert_eq!(a.is_subset(&b).unwrap(), u == b);
        prop_assert_eq!(a.difference(&b).unwrap(), a.intersect(&b.complement()).unwrap());
        for e in 0..5 {
            for l in 0..3 {
                prop_assert_eq!(member(&u, e, l), member(&a, e, l) || member(&b, e, l));
                prop_assert_eq!(member(&i, e, l), member(&a, e, l) && member(&b, e, l));
            }
        }
    }

    #[test]
    fn decomposition_round_trips(a in mask_set(5, 3)) {
        let points = decompose(&a);
        prop_assert_eq!(points.len(), a.len());
        prop_assert!(points.iter().all(|p| a.contains(p)));
        prop_assert_eq!(assemble(5, 3, &points).unwrap(), a.clone());
        prop_assert_eq!(a.is_null(), points.is_empty());
    }

    #[test]
    fn repair_yields_a_metric_and_is_idempotent((ne, nl) in (1..=4usize, 1..=3usize), seed in any::<u64>()) {
        let raw = DistanceTable::from_fn(ne * nl, nl, |i, j, k| {
            let h = seed.wrapping_mul(6364136223846793005).wrapping_add(((i * 31 + j) * 7 + k) as u64);
            ((h >> 33) % 1000) as f64 / 100.0
        });
        let s = space(ne, nl, &raw);
        prop_assert!(s.check_axioms(ETA).holds());
        let again = repair_to_metric(s.params().clone(), s.universe().clone(), s.table()).unwrap();
        prop_assert_eq!(again.table(), s.table());
        // Positive entries never rise above the smaller orientation.
        for i in 0..s.n_points() {
            for j in 0..s.n_points() {
                for k in 0..nl {
                    if i != j && raw.get(i, j)[k] > 0.0 {
                        prop_assert!(s.table().get(i, j)[k] <= raw.get(i, j)[k].min(raw.get(j, i)[k]) + ETA);
                    }
                }
            }
        }
    }

    #[test]
    fn every_slice_of_a_soft_metric_is_a_metric((_, nl, s) in any_space()) {
        for label in 0..nl {
            let slice = s.project(label).unwrap();
            prop_assert!(slice.check_axioms(ETA).holds());
            for x in 0..slice.len() {
                prop_assert_eq!(slice.get(x, x), 0.0);
            }
        }
    }

    #[test]
    fn regions_are_consistent(((ne, nl, s), mask) in (any_space(), any::<u64>())) {
        let set = SoftSet::from_mask(ne, nl, mask);
        let cl = closure(&s, &set).unwrap();
        let int = interior(&s, &set).unwrap();
        let boundary = region_set(&s, &set, Region::Boundary).unwrap();
        prop_assert!(set.is_subset(&cl).unwrap());
        prop_assert!(int.is_subset(&set).unwrap());
        prop_assert_eq!(boundary, cl.difference(&int).unwrap());
        prop_assert_eq!(is_open(&s, &set).unwrap().open, int == set);
        prop_assert_eq!(is_closed(&s, &set).unwrap(), cl == set);
        // Interior of the complement is the complement of the closure.
        prop_assert_eq!(interior(&s, &set.complement()).unwrap(), cl.complement());
    }

    #[test]
    fn separation_of_disjoint_sets(((ne, nl, s), m1, m2) in (any_space(), any::<u64>(), any::<u64>())) {
        let f1 = SoftSet::from_mask(ne, nl, m1);
        let f2 = SoftSet::from_mask(ne, nl, m2).difference(&f1).unwrap();
        prop_assume!(!f1.is_null() && !f2.is_null());
        let sep = separate_closed_sets(&s, &f1, &f2).unwrap();
        prop_assert!(f1.is_subset(&sep.u).unwrap());
        prop_assert!(f2.is_subset(&sep.v).unwrap());
        prop_assert!(sep.u.intersect(&sep.v).unwrap().is_null());
        prop_assert!(is_open(&s, &sep.u).unwrap().open);
        prop_assert!(is_open(&s, &sep.v).unwrap().open);
    }

    #[test]
    fn image_and_preimage(
        (ne, nl) in (1..=4usize, 1..=3usize),
        f_seed in prop::collection::vec(0usize..4, 4),
        phi_seed in prop::collection::vec(0usize..3, 3),
        ma in any::<u64>(),
        mb in any::<u64>(),
    ) {
        let (ce, cl) = (4, 3);
        let m = TableMapping::new(f_seed[..ne].to_vec(), phi_seed[..nl].to_vec(), ce, cl).unwrap();
        let a = SoftSet::from_mask(ne, nl, ma);
        let b = SoftSet::from_mask(ce, cl, mb);
        prop_assert!(a.is_subset(&m.preimage(&m.image(&a).unwrap()).unwrap()).unwrap());
        prop_assert!(m.image(&m.preimage(&b).unwrap()).unwrap().is_subset(&b).unwrap());
        prop_assert_eq!(m.preimage(&b.complement()).unwrap(), m.preimage(&b).unwrap().complement());
        for p in decompose(&a) {
            let q = SoftPoint::new(m.f()[p.element], m.phi()[p.label]);
            prop_assert!(m.image(&a).unwrap().contains(&q));
        }
    }

    #[test]
    fn feasible_banach_maps_have_at_most_one_fixed_point(
        (ne, nl, s) in any_space(),
        f_seed in prop::collection::vec(0usize..4, 4),
        phi_seed in prop::collection::vec(0usize..3, 3),
    ) {
        let f = f_seed.iter().take(ne).map(|&y| y % ne).collect();
        let phi = phi_seed.iter().take(nl).map(|&l| l % nl).collect();
        let m = TableMapping::new(f, phi, ne, nl).unwrap();
        prop_assume!(s.n_points() > 1);
        let report = estimate_coefficient(&s, &m, ContractionKind::Banach, &PairPlan::Exhaustive).unwrap();
        let fixed = brute_force_fixed_points(&s, &m).unwrap();
        if report.feasible {
            prop_assert!(fixed.len() <= 1);
        }
        for p in &fixed {
            prop_assert_eq!(s.distance(p, p).unwrap().sup(), 0.0);
        }
    }

    #[test]
    fn descriptor_round_trip((_, _, s) in any_space()) {
        let d = SpaceDescriptor::from_tabulated(&s, None);
        let parsed = parse_descriptor(&d.to_json()).unwrap();
        prop_assert_eq!(&parsed, &d);
        let rebuilt = match parsed.build().unwrap() {
            softfix_core::descriptor::Model::Tabulated { space, .. } => space,
            _ => unreachable!(),
        };
        prop_assert_eq!(rebuilt.table(), s.table());
    }
}
