//! Acceptance suite. Runs without the libtest harness and prints one
//! `criterion N: PASS|FAIL - name` line per criterion.

mod common;

use std::collections::{BTreeSet, HashMap};
use std::panic;
use std::process::ExitCode;

use common::*;
use sqclass::cgroup::{dictionary_check, two_generator_census, Cyclic, WGroup};
use sqclass::local_global::{ordering_for_prime_in, QForm};
use sqclass::ordering::{enumerate_subgroups, intersect_c0, C0Intersection};
use sqclass::valuation::ValuationData;
use sqclass::witt::{c0_kernel_check, ring_iso, WittRing};
use sqclass::{CGroup, F2Subspace, FieldModel, Level, OrderingTag, Place, SquareClass, SubgroupT};

const TEN_MODELS: [&str; 10] = [
    "Fq:5",
    "Fq:7",
    "Qp:3",
    "Qp:5",
    "Qp:7",
    "Qp:13",
    "Qp:2",
    "R",
    "Tower(R;X)",
    "Tower(Tower(R;X);Y)",
];

fn label_set(m: &FieldModel, s: impl IntoIterator<Item = SquareClass>) -> BTreeSet<String> {
    s.into_iter().map(|c| m.class_label(c)).collect()
}

fn strings(items: &[&str]) -> BTreeSet<String> {
    items.iter().map(|s| s.to_string()).collect()
}

fn q2_example() {
    let q2 = model("Qp:2");
    let t = SubgroupT::parse(q2.clone(), "1,5").unwrap();
    let expected = strings(&["1", "2", "5", "10", "-2", "-10"]);

    let oracle: BTreeSet<String> = q2_sums(&[1, 5], 40).into_iter().map(|c| q2_label(c).to_string()).collect();
    assert_eq!(oracle, expected, "integer sampling of T+T");
    let tt = t.plus_a(SquareClass::ONE).unwrap();
    assert_eq!(label_set(&q2, tt), expected);

    // -1 is not a sum of two elements of T, but 1 + 1 + 5 = 7 is in its class
    assert!(!oracle.contains("-1"));
    assert_eq!(q2_coords(1 + 1 + 5), 0b001);
    assert_eq!(t.level(), Level::Finite(3));
    assert_eq!(t.classify().unwrap().tag, OrderingTag::C4StarC4);
}

fn q2_wgroup() {
    let w = WGroup::from_model(model("Qp:2")).unwrap();
    let g = w.group();
    assert_eq!(brute_invariants(g).order, 256, "elements generated by -1, 2, 5");
    assert_eq!(g.order(), 256);
    assert_eq!(w.relation_words(), ["sq(-1) + com(2,5)"]);

    // {[(C4 x C2) : C4] x C2} : C4, read left to right
    let factors = [Cyclic::C4, Cyclic::C2, Cyclic::C4, Cyclic::C2, Cyclic::C4];
    let mut orders = Vec::new();
    let mut acc = 1u128;
    for f in factors {
        acc *= if f == Cyclic::C4 { 4 } else { 2 };
        orders.push(acc);
    }
    assert_eq!(orders, [4, 8, 32, 64, 256]);
    let chain = g.semidirect_chain().unwrap();
    assert_eq!(chain.iter().map(|c| c.0).collect::<Vec<_>>(), orders);
    assert_eq!(chain.iter().map(|c| c.1).collect::<Vec<_>>(), factors);
}

fn census() {
    let census = two_generator_census().unwrap();
    let flagged: BTreeSet<String> = census.iter().filter(|e| e.flagged).map(|e| e.name.clone()).collect();
    assert_eq!(flagged, strings(&["D", "C2*C4", "C4*C4", "C4xC4", "C4:C4"]));
    // every relation subspace of the 3-dimensional Frattini quotient is counted once
    assert_eq!(census.iter().map(|e| e.presentations).sum::<usize>(), 16);

    let q = CGroup::named("Q").unwrap();
    let inv = brute_invariants(&q);
    assert_eq!(inv, GroupInvariants { order: 8, involutions_and_one: 2, abelian: false });
    assert!(!q.is_split_group().unwrap());
    let d = brute_invariants(&CGroup::named("D").unwrap());
    assert_eq!(d, GroupInvariants { order: 8, involutions_and_one: 6, abelian: false });
    for e in census.iter().filter(|e| e.flagged) {
        assert_eq!(brute_invariants(&e.group).order as u128, e.group.order(), "{}", e.name);
    }
}

fn quaternary() {
    let coeffs = [1i64, 1, -7, -31];
    let q = QForm::from_ints(&coeffs).unwrap();
    let v = q.hasse_minkowski();
    assert!(!v.isotropic);
    assert_eq!(v.failures, [Place::Prime(2)]);

    assert!(!primitive_zero_mod(&coeffs, 16, 2), "no primitive zero mod 16");
    assert!(!hensel_isotropic(&coeffs, 2));
    assert!(q.local_isotropic(Place::Infinity));
    assert!(coeffs.iter().any(|&c| c > 0) && coeffs.iter().any(|&c| c < 0));
    let mut primes = odd_primes_upto(50);
    primes.push(31);
    for p in primes {
        assert!(hensel_isotropic(&coeffs, p), "oracle at {p}");
        assert!(q.local_isotropic(Place::Prime(p)), "library at {p}");
    }
    assert_eq!(q.rational_point_oracle(12).unwrap(), None);
}

fn padic_dictionary() {
    for p in odd_primes_upto(50) {
        let m = model(&format!("Qp:{p}"));
        let minus_one_square = (1..p).any(|x| (x * x) % p == p - 1);
        let tag = SubgroupT::squares(m.clone()).classify().unwrap().tag;
        let w = WGroup::from_model(m).unwrap();
        let inv = brute_invariants(w.group());
        assert_eq!(inv.order, 16, "Q_{p}");
        if minus_one_square {
            assert_eq!(tag, OrderingTag::CI(1), "Q_{p}");
            assert!(inv.abelian);
            assert!(w.group().is_isomorphic(&CGroup::named("C4xC4").unwrap()).unwrap());
        } else {
            assert_eq!(tag, OrderingTag::SI(1), "Q_{p}");
            assert!(!inv.abelian);
            assert!(w.group().is_isomorphic(&CGroup::named("C4:C4").unwrap()).unwrap());
        }
        assert_eq!(minus_one_square, p % 4 == 1);
    }
}

fn round_trip() {
    for d in ["Qp:2", "Qp:3", "Qp:13", "Tower(R;X)"] {
        let m = model(d);
        let w = WGroup::from_model(m.clone()).unwrap();
        let mut proper = 0;
        for t in 0..(1u64 << (1 << m.dim())) {
            // subsets of the class group that are proper subgroups, by brute force
            let set: Vec<SquareClass> = (0..m.num_classes()).filter(|&c| t >> c & 1 == 1).map(SquareClass).collect();
            let closed = set.contains(&SquareClass::ONE)
                && set.iter().all(|&a| set.iter().all(|&b| set.contains(&a.mul(b))));
            if !closed || set.len() as u64 == m.num_classes() {
                continue;
            }
            proper += 1;
            let p = SubgroupT::span(m.clone(), &set).unwrap();
            assert_eq!(p.classes().len(), set.len());
            let h = w.essential_from_subgroup(&p).unwrap();
            assert!(h.is_essential(), "{d}");
            let g = w.group();
            let mut gens = h.generators().to_vec();
            gens.extend(h.kernel().basis().iter().map(|&k| g.central(k)));
            assert_eq!(bfs_closure(g, &gens).len() as u128, h.order(), "{d}: |H|");
            assert_eq!(w.p_h(&h).unwrap(), p, "{d}: P_H(H_P) = P");
            let h2 = w.essential_from_subgroup(&w.p_h(&h).unwrap()).unwrap();
            assert_eq!(h2.head_space(), h.head_space(), "{d}: H Phi");
        }
        let expected: usize = (0..m.dim()).map(|k| F2Subspace::enumerate(m.dim(), k).len()).sum();
        assert_eq!(proper, expected, "{d}");
    }
}

fn dictionary() {
    for d in TEN_MODELS {
        let w = WGroup::from_model(model(d)).unwrap();
        assert_eq!(brute_invariants(w.group()).order as u128, w.group().order(), "{d}");
        let failures = dictionary_check(&w).unwrap();
        assert!(failures.is_empty(), "{d}: {failures:?}");
    }
}

/// `T + aT` from the definition, through the model's binary forms.
fn sums(m: &FieldModel, t: &[SquareClass], a: SquareClass) -> BTreeSet<SquareClass> {
    let mut out = BTreeSet::new();
    for &r in t {
        for &s in t {
            out.extend(m.binary_values(r, a.mul(s)));
        }
    }
    out
}

fn brute_level(m: &FieldModel, t: &[SquareClass]) -> Level {
    let mut reach: BTreeSet<SquareClass> = t.iter().copied().collect();
    for s in 1..=64 {
        if reach.contains(&m.minus_one()) {
            return Level::Finite(s);
        }
        let next: BTreeSet<SquareClass> = reach
            .iter()
            .flat_map(|&x| t.iter().flat_map(move |&r| m.binary_values(x, r)))
            .chain(reach.iter().copied())
            .collect();
        if next == reach {
            break;
        }
        reach = next;
    }
    Level::Infinite
}

fn rigid_levels() {
    let mut rigid_seen = 0;
    for d in sqclass::selftest::BUILTIN_MODELS {
        let m = model(d);
        for index in [2u64, 4, 8] {
            if index > m.num_classes() {
                continue;
            }
            for t in enumerate_subgroups(&m, index, None).unwrap() {
                let cls = t.classes();
                let pm: BTreeSet<SquareClass> = cls.iter().flat_map(|&c| [c, c.mul(m.minus_one())]).collect();
                let rigid = m.all_classes().into_iter().filter(|a| !pm.contains(a)).all(|a| {
                    sums(&m, &cls, a).iter().all(|&c| t.contains(c) || t.contains(c.mul(a)))
                });
                assert_eq!(rigid, t.is_rigid(), "{d} {t}");
                let level = brute_level(&m, &cls);
                assert_eq!(level, t.level(), "{d} {t}");
                if !rigid {
                    continue;
                }
                rigid_seen += 1;
                assert!(matches!(level, Level::Finite(1) | Level::Finite(2) | Level::Infinite), "{d} {t}: {level}");
                if level == Level::Finite(2) {
                    let tt = sums(&m, &cls, SquareClass::ONE);
                    assert_eq!(tt, pm, "{d} {t}");
                }
            }
        }
    }
    assert!(rigid_seen > 0);
}

fn valuation_lifting() {
    let cases = [
        ("Qp:3", "3"),
        ("Qp:5", "5"),
        ("Qp:7", "7"),
        ("Qp:13", "13"),
        ("Tower(R;X)", "X"),
        ("Tower(Tower(R;X);Y)", "Y"),
        ("Tower(Tower(R;X);Y)", "Y+X"),
    ];
    for (d, name) in cases {
        let m = model(d);
        let v = ValuationData::select(&m, name).unwrap();
        let r = v.residue_model().clone();
        let mut lifted = 0;
        for k in 0..=r.dim() {
            for s in F2Subspace::enumerate(r.dim(), k) {
                let t0 = SubgroupT::new(r.clone(), s.annihilator()).unwrap();
                if v.lift_kind(&t0).is_err() {
                    continue;
                }
                let t = v.lift_ordering(&t0).unwrap();
                assert!(v.is_compatible(&t).unwrap(), "{d} {name}: lift not compatible");
                assert_eq!(v.residue_ordering(&t).unwrap(), t0, "{d} {name}");
                lifted += 1;
            }
        }
        assert!(lifted > 0, "{d} {name}: nothing lifted");
    }

    let rxy = model("Tower(Tower(R;X);Y)");
    let v = ValuationData::select(&rxy, "Y+X").unwrap();
    let t = v.lift_ordering(&SubgroupT::squares(model("R"))).unwrap();
    let c = t.classify().unwrap();
    assert_eq!(c.tag, OrderingTag::DI(2));
    assert_eq!(c.level, Level::Infinite);
    assert!(c.preordering);

    let q3 = model("Qp:3");
    let v = ValuationData::select(&q3, "3").unwrap();
    let t = v.lift_ordering(&SubgroupT::squares(v.residue_model().clone())).unwrap();
    // a unit of Z_3 is a square iff its residue is
    assert_eq!(t, SubgroupT::squares(q3));
    assert_eq!(t.classify().unwrap().tag, OrderingTag::SI(1));
}

fn witt_identities() {
    for d in ["Qp:2", "Qp:5", "Qp:13", "Fq:5", "Fq:13"] {
        let k = c0_kernel_check(&model(d)).unwrap();
        assert!(k.passed(), "{d}: {k:?}");
        assert!(k.orderings > 0, "{d}");
    }
    let qs = model("QS:2,3,5,7,13");
    let (t13, _) = ordering_for_prime_in(&qs, 13).unwrap();
    // T_13 holds exactly the classes that are squares in Q_13
    let q13 = model("Qp:13");
    for c in qs.all_classes() {
        let n = class_rep(&qs, c);
        let (v, u) = split(n, 13);
        let square = v % 2 == 0 && (1..13).any(|x| (x * x - u).rem_euclid(13) == 0);
        assert_eq!(t13.contains(c), square, "{n}");
    }
    let global = WittRing::new(&t13).unwrap();
    let local = WittRing::of_model(q13).unwrap();
    assert_eq!(global.invariants(), local.invariants());
    assert!(ring_iso(&global, &local).unwrap());
}

fn example_sums_of_two_squares() {
    let q2 = model("Qp:2");
    let oracle: BTreeSet<String> = q2_sums(&[1], 60).into_iter().map(|c| q2_label(c).to_string()).collect();
    let expected = strings(&["1", "2", "5", "10"]);
    assert_eq!(oracle.iter().filter(|l| *l != "1").count(), 3);
    let mut with_squares = oracle.clone();
    with_squares.insert("1".into());
    assert_eq!(with_squares, expected);
    let sos = q2.sum_of_squares_classes(2).unwrap();
    assert_eq!(label_set(&q2, sos.iter().copied()), expected);
    let t = SubgroupT::span(q2, &sos.into_iter().collect::<Vec<_>>()).unwrap();
    assert_eq!(t.classify().unwrap().tag, OrderingTag::C4Level2);
    assert!(!t.is_liftable_c4().unwrap());
}

fn c0_intersection() {
    for d in ["Qp:2", "Qp:13"] {
        let m = model(d);
        let expected = SubgroupT::parse(m.clone(), "-1").unwrap();
        assert_eq!(intersect_c0(&m).unwrap(), C0Intersection::Classes(expected.clone()), "{d}");
        let labels = label_set(&m, expected.classes());
        if d == "Qp:2" {
            assert_eq!(labels, strings(&["1", "-1"]));
        } else {
            // 5^2 = -1 mod 13
            assert_eq!(labels, strings(&["1"]));
        }
    }
    let f13 = model("Fq:13");
    assert_eq!(intersect_c0(&f13).unwrap(), C0Intersection::Classes(SubgroupT::squares(f13)));
}

/// Canonical representative of the class of `n` in `Q_p`.
fn local_rep(n: i64, p: i64) -> i64 {
    let (v, u) = split(n, p);
    let modulus = if p == 2 { 8 } else { p };
    p.pow(v % 2) * u.rem_euclid(modulus)
}

fn symbol_engine() {
    for p in [2u64, 3, 5, 7, 13] {
        let m = model(&format!("Qp:{p}"));
        for a in m.all_classes() {
            for b in m.all_classes() {
                let oracle = hilbert_oracle(class_rep(&m, a), class_rep(&m, b), p);
                assert_eq!(m.hilbert_symbol(a, b).unwrap(), oracle, "Q_{p} {a:?} {b:?}");
            }
        }
    }
    let qs = model("QS:2,3,5,7,13");
    let mut cache: HashMap<(u64, i64, i64), i8> = HashMap::new();
    for a in qs.all_classes() {
        for b in qs.all_classes() {
            let (x, y) = (class_rep(&qs, a), class_rep(&qs, b));
            let real = if x < 0 && y < 0 { -1 } else { 1 };
            let mut product = real;
            let lib: HashMap<Place, i8> = qs.local_symbols(a, b).unwrap().into_iter().collect();
            assert_eq!(lib.get(&Place::Infinity).copied().unwrap_or(1), real);
            for p in [2u64, 3, 5, 7, 13] {
                let key = (p, local_rep(x, p as i64), local_rep(y, p as i64));
                let s = *cache.entry(key).or_insert_with(|| hilbert_oracle(key.1, key.2, p));
                assert_eq!(lib.get(&Place::Prime(p)).copied().unwrap_or(1), s, "({x},{y})_{p}");
                product *= s;
            }
            assert_eq!(product, 1, "({x},{y})");
            let lib_product: i8 = lib.values().product();
            assert_eq!(lib_product, 1);
        }
    }
}

fn pythagorean() {
    let rx = model("Tower(R;X)");
    let w = WGroup::from_model(rx.clone()).unwrap();
    assert!(w.group().is_isomorphic(&CGroup::named("D").unwrap()).unwrap());
    assert_eq!(
        brute_invariants(w.group()),
        GroupInvariants { order: 8, involutions_and_one: 6, abelian: false }
    );
    // orderings: index-2 subgroups, as kernels of functionals, without -1 and closed under sums
    let positive_cones = (1..rx.num_classes())
        .filter(|&f| {
            let cls: Vec<SquareClass> =
                rx.all_classes().into_iter().filter(|c| (c.bits() & f).count_ones() % 2 == 0).collect();
            !cls.contains(&rx.minus_one())
                && sums(&rx, &cls, SquareClass::ONE).iter().all(|s| cls.contains(s))
        })
        .count();
    assert_eq!(positive_cones, 2);
    assert_eq!(enumerate_subgroups(&rx, 2, Some(OrderingTag::C2)).unwrap().len(), 2);
    assert_eq!(rx.sum_of_squares_classes(2).unwrap(), BTreeSet::from([SquareClass::ONE]));
}

fn main() -> ExitCode {
    let criteria: [(&str, fn()); 14] = [
        ("T+T, classification and level of {1,5} in Q_2", q2_example),
        ("W-group of Q_2: order, relation, semidirect chain", q2_wgroup),
        ("census of two-generator groups", census),
        ("<1,1,-7,-31> fails only at Q_2", quaternary),
        ("squares of Q_p and W(Q_p) for odd p <= 50", padic_dictionary),
        ("essential subgroup round trip", round_trip),
        ("Galois/additive dictionary on ten models", dictionary),
        ("rigid level trichotomy", rigid_levels),
        ("valuation lifting", valuation_lifting),
        ("Witt ring identities", witt_identities),
        ("sums of two squares in Q_2", example_sums_of_two_squares),
        ("intersection of C(0)-orderings", c0_intersection),
        ("symbol engine against exhaustive oracle", symbol_engine),
        ("R((X)) is pythagorean with two orderings", pythagorean),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let ok = panic::catch_unwind(f).is_ok();
        println!("criterion {}: {} - {name}", i + 1, if ok { "PASS" } else { "FAIL" });
        failed += usize::from(!ok);
    }
    println!("{} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
