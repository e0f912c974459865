mod common;

use common::*;
use proptest::prelude::*;
use sqclass::cgroup::phi_dim;
use sqclass::valuation::ValuationData;
use sqclass::witt::WittRing;
use sqclass::{CElem, CGroup, F2Subspace, SquareClass, SubgroupT};

/// A group `F(n)/R` and three of its elements.
fn group_case() -> impl Strategy<Value = (CGroup, CElem, CElem, CElem)> {
    (1usize..=4).prop_flat_map(|n| {
        let phi = phi_dim(n);
        let elem = (0u64..(1 << n), 0u64..(1 << phi)).prop_map(|(h, t)| CElem { head: h, tail: t });
        (prop::collection::vec(0u64..(1 << phi), 0..3), elem.clone(), elem.clone(), elem).prop_map(
            move |(rels, x, y, z)| {
                let g = CGroup::new(n, F2Subspace::new(phi, &rels).unwrap()).unwrap();
                let (x, y, z) = (g.elem(x.head, x.tail), g.elem(y.head, y.tail), g.elem(z.head, z.tail));
                (g, x, y, z)
            },
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn group_axioms((g, x, y, z) in group_case()) {
        let e = g.identity();
        prop_assert_eq!(g.mul(g.mul(x, y), z), g.mul(x, g.mul(y, z)));
        prop_assert_eq!(g.mul(x, e), x);
        prop_assert_eq!(g.mul(x, g.inv(x)), e);
        prop_assert_eq!(g.pow(x, 4), e);
    }

    #[test]
    fn squares_and_commutators_are_central((g, x, y, z) in group_case()) {
        let sq = g.mul(x, x);
        let c = g.commutator(x, y);
        prop_assert_eq!(sq.head, 0);
        prop_assert_eq!(c.head, 0);
        prop_assert_eq!(g.mul(sq, z), g.mul(z, sq));
        prop_assert_eq!(g.mul(c, z), g.mul(z, c));
        // commutators are bilinear in this category
        prop_assert_eq!(g.commutator(g.mul(x, z), y), g.mul(g.commutator(x, y), g.commutator(z, y)));
    }

    #[test]
    fn subgroup_closure_matches_bfs((g, x, y, _z) in group_case()) {
        let h = g.subgroup_closure(&[x, y]);
        let mut gens = h.generators().to_vec();
        gens.extend(h.kernel().basis().iter().map(|&k| g.central(k)));
        let bfs = bfs_closure(&g, &[x, y]);
        prop_assert_eq!(bfs.len() as u128, h.order());
        prop_assert_eq!(bfs_closure(&g, &gens).len() as u128, h.order());
        for e in &bfs {
            prop_assert!(h.contains(*e));
        }
    }

    #[test]
    fn order_matches_enumeration((g, _x, _y, _z) in group_case()) {
        prop_assume!(g.order_log2() <= 12);
        let inv = brute_invariants(&g);
        prop_assert_eq!(inv.order as u128, g.order());
        prop_assert_eq!(inv.abelian, g.is_abelian());
        prop_assert_eq!(inv.involutions_and_one as u128, g.count_square_roots_of_one());
        prop_assert!(g.is_isomorphic(&g).unwrap());
    }
}

fn witt_case() -> impl Strategy<Value = (String, Vec<u64>)> {
    prop::sample::select(vec!["Qp:2", "Qp:3", "Qp:5", "Fq:7", "R", "Tower(R;X)", "QS:2,3"]).prop_flat_map(|d| {
        let n = model(d).num_classes();
        (Just(d.to_string()), prop::collection::vec(0..n, 0..3))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn witt_relations_form_an_ideal((d, gens) in witt_case()) {
        let m = model(&d);
        let classes: Vec<SquareClass> = gens.iter().map(|&g| SquareClass(g)).collect();
        let t = SubgroupT::span(m, &classes).unwrap();
        let w = WittRing::new(&t).unwrap();
        prop_assert_eq!(w.rank() as u64, t.index());
        prop_assert!(w.relations_form_ideal());
        // [a] + [-a] = 0
        for c in t.coset_reps() {
            let mut v = w.unit_vector(c);
            let u = w.unit_vector(c.mul(t.model().minus_one()));
            for (a, b) in v.iter_mut().zip(u) {
                *a += b;
            }
            prop_assert!(w.is_zero(&v));
        }
        // the table is a group law on cosets
        let table = w.multiplication_table();
        for i in 0..w.rank() {
            prop_assert_eq!(table[0][i], i);
            for j in 0..w.rank() {
                prop_assert_eq!(table[i][j], table[j][i]);
            }
        }
    }

    #[test]
    fn valuation_round_trips((d, gens) in prop::sample::select(vec!["Qp:3", "Qp:5", "Qp:2", "Tower(R;X)", "Tower(Tower(R;X);Y)", "Tower(Qp:3;t)"])
        .prop_flat_map(|d| { let n = model(d).num_classes(); (Just(d.to_string()), prop::collection::vec(0..n, 0..3)) }))
    {
        let m = model(&d);
        for v in ValuationData::builtins(&m).unwrap() {
            // value and residue are homomorphisms on units
            for a in m.all_classes() {
                for b in m.all_classes() {
                    prop_assert_eq!(v.value(a.mul(b)), v.value(a) ^ v.value(b));
                    if v.is_unit(a) && v.is_unit(b) {
                        let r = v.residue(a.mul(b)).unwrap();
                        prop_assert_eq!(r, v.residue(a).unwrap().mul(v.residue(b).unwrap()));
                    }
                }
            }
            let classes: Vec<SquareClass> = gens.iter().map(|&g| SquareClass(g)).collect();
            let t = SubgroupT::span(m.clone(), &classes).unwrap().sum(
                &SubgroupT::new(m.clone(), v.principal_units()).unwrap(),
            ).unwrap();
            prop_assert!(v.is_compatible(&t).unwrap());
            let t0 = v.residue_ordering(&t).unwrap();
            if v.lift_kind(&t0).is_ok() {
                let up = v.lift_ordering(&t0).unwrap();
                prop_assert_eq!(v.residue_ordering(&up).unwrap(), t0);
            }
        }
    }
}
