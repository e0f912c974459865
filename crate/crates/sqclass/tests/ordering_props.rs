mod common;

use std::collections::BTreeSet;

use common::*;
use proptest::prelude::*;
use sqclass::ordering::enumerate_subgroups;
use sqclass::{F2Subspace, Level, OrderingTag, SquareClass, SubgroupT};

const MODELS: &[&str] = &["Fq:7", "Qp:2", "Qp:3", "Qp:5", "R", "QS:2,3", "Tower(R;X)", "Tower(Tower(R;X);Y)", "Tower(Qp:3;t)"];

/// A model descriptor, generators of a subgroup and one more class.
fn subgroup_case() -> impl Strategy<Value = (String, Vec<u64>, u64)> {
    prop::sample::select(MODELS).prop_flat_map(|d| {
        let n = model(d).num_classes();
        (Just(d.to_string()), prop::collection::vec(0..n, 0..4), 0..n)
    })
}

fn subgroup(d: &str, gens: &[u64]) -> SubgroupT {
    let m = model(d);
    let classes: Vec<SquareClass> = gens.iter().map(|&g| SquareClass(g)).collect();
    SubgroupT::span(m, &classes).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn t_plus_at_is_a_union_of_t_cosets((d, gens, a) in subgroup_case()) {
        let t = subgroup(&d, &gens);
        let a = SquareClass(a);
        let s = t.plus_a(a).unwrap();
        for c in t.classes() {
            prop_assert!(s.contains(&c) && s.contains(&c.mul(a)));
        }
        for &x in &s {
            for c in t.classes() {
                prop_assert!(s.contains(&x.mul(c)));
            }
        }
        // T + aT depends only on the coset aT
        for c in t.classes() {
            prop_assert_eq!(&t.plus_a(a.mul(c)).unwrap(), &s);
        }
        // a(T + aT) = aT + T
        let scaled: BTreeSet<SquareClass> = s.iter().map(|x| x.mul(a)).collect();
        prop_assert_eq!(scaled, s);
    }

    #[test]
    fn level_is_monotone_in_t((d, gens, a) in subgroup_case()) {
        let t = subgroup(&d, &gens);
        let bigger = t.with(SquareClass(a));
        prop_assert!(bigger.level() <= t.level());
        if t.contains(t.model().minus_one()) {
            prop_assert_eq!(t.level(), Level::Finite(1));
        }
        let sigma = t.sigma();
        prop_assert_eq!(sigma.contains(&t.model().minus_one()), t.level() != Level::Infinite);
    }

    #[test]
    fn preorderings_are_rigid_or_sums_closed((d, gens, _a) in subgroup_case()) {
        let t = subgroup(&d, &gens);
        if t.is_preordering() {
            prop_assert_eq!(t.level(), Level::Infinite);
            prop_assert_eq!(t.sigma(), t.class_set());
        }
    }

    #[test]
    fn classification_is_deterministic_and_consistent((d, gens, _a) in subgroup_case()) {
        let t = subgroup(&d, &gens);
        prop_assume!(t.is_proper());
        let c = t.classify().unwrap();
        prop_assert_eq!(t.classify().unwrap(), c.clone());
        prop_assert_eq!(c.index, t.index());
        match c.tag {
            OrderingTag::C2 => prop_assert!(c.preordering && c.index == 2),
            OrderingTag::C4Level1 => prop_assert_eq!(c.level, Level::Finite(1)),
            OrderingTag::C4Level2 => prop_assert_eq!(c.level, Level::Finite(2)),
            OrderingTag::CI(k) => prop_assert!(c.rigid && c.level == Level::Finite(1) && c.index == 1 << (k + 1)),
            OrderingTag::SI(k) => prop_assert!(c.rigid && c.level == Level::Finite(2) && c.index == 1 << (k + 1)),
            OrderingTag::DI(k) => prop_assert!(c.level == Level::Infinite && c.index == 1 << (k + 1)),
            OrderingTag::DFan2 => prop_assert!(c.level == Level::Infinite && c.index == 4),
            OrderingTag::C2StarC4 | OrderingTag::C4StarC4 => prop_assert!(!c.rigid && c.index == 4),
            OrderingTag::NonRigidOther => {}
        }
    }
}

#[test]
fn enumeration_counts_match_gaussian_binomials() {
    // subspaces of F_2^4 of dimension k: 1, 15, 35, 15, 1
    let m = model("QS:2,3,5");
    assert_eq!(m.dim(), 4);
    let counts: Vec<usize> = [1u64, 2, 4, 8, 16]
        .iter()
        .map(|&i| enumerate_subgroups(&m, i, None).unwrap().len())
        .collect();
    assert_eq!(counts, [1, 15, 35, 15, 1]);
    assert_eq!(F2Subspace::enumerate(4, 2).len(), 35);
}

#[test]
fn q3_sums() {
    // in Q_3, -2 = 1 mod 3 is a square, so 1 + u covers every class
    let q3 = model("Qp:3");
    let u = q3.parse_class("-1").unwrap();
    let t = SubgroupT::squares(q3.clone());
    assert_eq!(t.plus_a(SquareClass::ONE).unwrap().len(), 2);
    assert_eq!(t.plus_a(u).unwrap().len(), 4);
    assert!(hensel_isotropic(&[1, 1, 2], 3));
}
