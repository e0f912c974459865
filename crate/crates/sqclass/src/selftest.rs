//! Built-in consistency suite, run by the `selftest` command.

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::cgroup::{dictionary_check, two_generator_census, CGroup, Cyclic, WGroup};
use crate::field::{FieldModel, Level, Place, SquareClass};
use crate::local_global::{ordering_for_prime_in, QForm};
use crate::ordering::{enumerate_subgroups, intersect_c0, C0Intersection, OrderingTag, SubgroupT};
use crate::valuation::ValuationData;
use crate::witt::{c0_kernel_check, ring_iso, WittRing};
use crate::F2Subspace;

/// Models swept by the Galois/additive dictionary.
pub const DICTIONARY_MODELS: &[&str] = &[
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

/// Every built-in model family at the sizes used by the sweeps.
pub const BUILTIN_MODELS: &[&str] = &[
    "Fq:3",
    "Fq:5",
    "Fq:7",
    "Fq:9",
    "Fq:13",
    "Qp:2",
    "Qp:3",
    "Qp:5",
    "Qp:7",
    "Qp:13",
    "R",
    "QS:2,3",
    "QS:2,3,5,7,13",
    "Tower(R;X)",
    "Tower(Tower(R;X);Y)",
    "Tower(Qp:3;t)",
    "Tower(Fq:5;t)",
];

#[derive(Clone, Debug)]
pub struct CriterionResult {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

type Check = std::result::Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

pub fn model(desc: &str) -> std::result::Result<Arc<FieldModel>, String> {
    FieldModel::parse(desc).map(Arc::new).map_err(err)
}

fn labels(m: &FieldModel, s: &BTreeSet<SquareClass>) -> BTreeSet<String> {
    s.iter().map(|&c| m.class_label(c)).collect()
}

fn set(items: &[&str]) -> BTreeSet<String> {
    items.iter().map(|s| s.to_string()).collect()
}

fn q2_additive() -> Check {
    let q2 = model("Qp:2")?;
    let t = SubgroupT::parse(q2.clone(), "1,5").map_err(err)?;
    let tt = t.plus_a(SquareClass::ONE).map_err(err)?;
    ensure!(labels(&q2, &tt) == set(&["1", "2", "5", "10", "-2", "-10"]), "T+T = {:?}", labels(&q2, &tt));
    let c = t.classify().map_err(err)?;
    ensure!(c.tag == OrderingTag::C4StarC4, "classified {}", c.tag);
    ensure!(t.level() == Level::Finite(3), "level {}", t.level());
    Ok(())
}

fn q2_wgroup() -> Check {
    let w = WGroup::from_model(model("Qp:2")?).map_err(err)?;
    ensure!(w.group().order() == 256, "order {}", w.group().order());
    ensure!(w.relation_words() == ["sq(-1) + com(2,5)"], "relations {:?}", w.relation_words());
    let chain = w.group().semidirect_chain().map_err(err)?;
    let orders: Vec<u128> = chain.iter().map(|c| c.0).collect();
    ensure!(orders == [4, 8, 32, 64, 256], "chain orders {orders:?}");
    let factors: Vec<Cyclic> = chain.iter().map(|c| c.1).collect();
    ensure!(
        factors == [Cyclic::C4, Cyclic::C2, Cyclic::C4, Cyclic::C2, Cyclic::C4],
        "chain factors {factors:?}"
    );
    Ok(())
}

fn census() -> Check {
    let census = two_generator_census().map_err(err)?;
    let flagged: BTreeSet<String> =
        census.iter().filter(|e| e.flagged).map(|e| e.name.clone()).collect();
    ensure!(flagged == set(&["D", "C2*C4", "C4*C4", "C4xC4", "C4:C4"]), "flagged {flagged:?}");
    ensure!(!CGroup::named("Q").map_err(err)?.is_split_group().map_err(err)?, "Q is split");
    Ok(())
}

fn quaternary_form() -> Check {
    let q = QForm::from_ints(&[1, 1, -7, -31]).map_err(err)?;
    let v = q.hasse_minkowski();
    ensure!(!v.isotropic && v.failures == [Place::Prime(2)], "verdict {v}");
    for p in [Place::Infinity, Place::Prime(7), Place::Prime(31)] {
        ensure!(q.local_isotropic(p), "anisotropic at {p}");
    }
    for p in (3..=50u64).filter(|&p| crate::arith::is_prime(p)) {
        ensure!(q.local_isotropic(Place::Prime(p)), "anisotropic at Q_{p}");
    }
    Ok(())
}

fn padic_orderings() -> Check {
    for p in (3..=50u64).filter(|&p| crate::arith::is_prime(p)) {
        let m = model(&format!("Qp:{p}"))?;
        let tag = SubgroupT::squares(m.clone()).classify().map_err(err)?.tag;
        let (want_tag, want_group) =
            if p % 4 == 1 { (OrderingTag::CI(1), "C4xC4") } else { (OrderingTag::SI(1), "C4:C4") };
        ensure!(tag == want_tag, "Q_{p}: {tag}");
        let w = WGroup::from_model(m).map_err(err)?;
        ensure!(w.group().order() == 16, "Q_{p}: W-group order {}", w.group().order());
        let expected = CGroup::named(want_group).map_err(err)?;
        ensure!(w.group().is_isomorphic(&expected).map_err(err)?, "Q_{p}: W-group is not {want_group}");
    }
    Ok(())
}

fn essential_round_trip() -> Check {
    for d in ["Qp:2", "Qp:3", "Qp:13", "Tower(R;X)"] {
        let m = model(d)?;
        let w = WGroup::from_model(m.clone()).map_err(err)?;
        for k in 1..=m.dim() {
            for s in F2Subspace::enumerate(m.dim(), k) {
                let p = SubgroupT::new(m.clone(), s.annihilator()).map_err(err)?;
                let h = w.essential_from_subgroup(&p).map_err(err)?;
                ensure!(h.is_essential(), "{d}: H not essential");
                let back = w.p_h(&h).map_err(err)?;
                ensure!(back == p, "{d}: P_H differs from P");
                let h2 = w.essential_from_subgroup(&back).map_err(err)?;
                ensure!(h2.head_space() == h.head_space(), "{d}: H Φ differs");
            }
        }
    }
    Ok(())
}

fn dictionary() -> Check {
    for d in DICTIONARY_MODELS {
        let w = WGroup::from_model(model(d)?).map_err(err)?;
        let failures = dictionary_check(&w).map_err(err)?;
        ensure!(failures.is_empty(), "{d}: {failures:?}");
    }
    Ok(())
}

fn rigid_levels() -> Check {
    for d in BUILTIN_MODELS {
        let m = model(d)?;
        for index in [2u64, 4, 8] {
            if index > m.num_classes() {
                continue;
            }
            for t in enumerate_subgroups(&m, index, None).map_err(err)? {
                if !t.is_rigid() {
                    continue;
                }
                match t.level() {
                    Level::Finite(1) | Level::Infinite => {}
                    Level::Finite(2) => {
                        let tt = t.plus_a(SquareClass::ONE).map_err(err)?;
                        ensure!(tt == t.with_minus_one().class_set(), "{d}: level-2 rigid T+T != T u -T");
                    }
                    l => return Err(format!("{d}: rigid T of level {l}")),
                }
            }
        }
    }
    Ok(())
}

fn valuation_lifts() -> Check {
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
        let m = model(d)?;
        let v = ValuationData::select(&m, name).map_err(err)?;
        let r = v.residue_model().clone();
        for k in 0..=r.dim() {
            for s in F2Subspace::enumerate(r.dim(), k) {
                let t0 = SubgroupT::new(r.clone(), s.annihilator()).map_err(err)?;
                if v.lift_kind(&t0).is_err() {
                    continue;
                }
                let t = v.lift_ordering(&t0).map_err(err)?;
                let back = v.residue_ordering(&t).map_err(err)?;
                ensure!(back == t0, "{d} ({name}): residue of lift differs");
            }
        }
    }
    let rxy = model("Tower(Tower(R;X);Y)")?;
    let v = ValuationData::select(&rxy, "Y+X").map_err(err)?;
    let t = v.lift_ordering(&SubgroupT::squares(model("R")?)).map_err(err)?;
    let tag = t.classify().map_err(err)?.tag;
    ensure!(tag == OrderingTag::DI(2), "R positives into R((X))((Y)): {tag}");
    let q3 = model("Qp:3")?;
    let v = ValuationData::select(&q3, "3").map_err(err)?;
    let t = v.lift_ordering(&SubgroupT::squares(v.residue_model().clone())).map_err(err)?;
    let tag = t.classify().map_err(err)?.tag;
    ensure!(tag == OrderingTag::SI(1), "F_3 squares into Q_3: {tag}");
    Ok(())
}

fn witt_identities() -> Check {
    for d in ["Qp:2", "Qp:5", "Qp:13", "Fq:5", "Fq:13"] {
        let k = c0_kernel_check(&model(d)?).map_err(err)?;
        ensure!(k.passed(), "{d}: {k:?}");
    }
    let qs = model("QS:2,3,5,7,13")?;
    let (t13, _) = ordering_for_prime_in(&qs, 13).map_err(err)?;
    let global = WittRing::new(&t13).map_err(err)?;
    let local = WittRing::of_model(model("Qp:13")?).map_err(err)?;
    ensure!(ring_iso(&global, &local).map_err(err)?, "W_T13(Q) and W(Q_13) not isomorphic");
    Ok(())
}

fn sums_of_two_squares() -> Check {
    let q2 = model("Qp:2")?;
    let sos = q2.sum_of_squares_classes(2).map_err(err)?;
    ensure!(labels(&q2, &sos) == set(&["1", "2", "5", "10"]), "F^2+F^2 = {:?}", labels(&q2, &sos));
    let t = SubgroupT::span(q2, &sos.into_iter().collect::<Vec<_>>()).map_err(err)?;
    let tag = t.classify().map_err(err)?.tag;
    ensure!(tag == OrderingTag::C4Level2, "classified {tag}");
    ensure!(!t.is_liftable_c4().map_err(err)?, "reported liftable");
    Ok(())
}

fn c0_intersections() -> Check {
    for d in ["Qp:2", "Qp:13"] {
        let m = model(d)?;
        let want = SubgroupT::span(m.clone(), &[m.minus_one()]).map_err(err)?;
        ensure!(intersect_c0(&m).map_err(err)? == C0Intersection::Classes(want), "{d}");
    }
    let f13 = model("Fq:13")?;
    ensure!(
        intersect_c0(&f13).map_err(err)? == C0Intersection::Classes(SubgroupT::squares(f13)),
        "F_13"
    );
    Ok(())
}

/// Whether `ax^2 + by^2 = z^2` has a primitive solution modulo `p^k`.
fn primitive_solution_mod(a: i64, b: i64, p: u64, k: u32) -> bool {
    let m = p.pow(k) as i64;
    let md = |x: i64| x.rem_euclid(m);
    // squares of units and of arbitrary residues
    let mut unit_sq = vec![false; m as usize];
    let mut any_sq = vec![false; m as usize];
    for z in 0..m {
        let s = md(z * z) as usize;
        any_sq[s] = true;
        if z % p as i64 != 0 {
            unit_sq[s] = true;
        }
    }
    let f = |x: i64, y: i64| md(md(a * md(x * x)) + md(b * md(y * y))) as usize;
    // x a unit, scaled to 1
    if (0..m).any(|y| any_sq[f(1, y)]) {
        return true;
    }
    // x non-unit, y a unit scaled to 1
    if (0..m).step_by(p as usize).any(|x| any_sq[f(x, 1)]) {
        return true;
    }
    // x, y non-units, z a unit
    (0..m).step_by(p as usize).any(|x| (0..m).step_by(p as usize).any(|y| unit_sq[f(x, y)]))
}

fn class_rep(m: &FieldModel, c: SquareClass) -> i64 {
    (0..m.dim())
        .filter(|&i| c.bits() >> i & 1 == 1)
        .map(|i| i64::try_from(m.basis_rep(i).expect("basis representative")).expect("small rep"))
        .product()
}

fn symbol_engine() -> Check {
    for p in [2u64, 3, 5, 7, 13] {
        let m = model(&format!("Qp:{p}"))?;
        let k = if p == 2 { 6 } else { 3 };
        for a in m.all_classes() {
            for b in m.all_classes() {
                let s = m.hilbert_symbol(a, b).map_err(err)?;
                let oracle = primitive_solution_mod(class_rep(&m, a), class_rep(&m, b), p, k);
                ensure!((s == 1) == oracle, "Q_{p}: ({a:?},{b:?}) = {s}, oracle says {oracle}");
            }
        }
    }
    let qs = model("QS:2,3,5,7,13")?;
    for a in qs.all_classes() {
        for b in qs.all_classes() {
            let prod: i8 = qs.local_symbols(a, b).map_err(err)?.iter().map(|x| x.1).product();
            ensure!(prod == 1, "product formula fails");
        }
    }
    Ok(())
}

fn pythagorean_tower() -> Check {
    let rx = model("Tower(R;X)")?;
    let w = WGroup::from_model(rx.clone()).map_err(err)?;
    ensure!(w.group().is_isomorphic(&CGroup::named("D").map_err(err)?).map_err(err)?, "W-group is not D");
    let c2 = enumerate_subgroups(&rx, 2, Some(OrderingTag::C2)).map_err(err)?;
    ensure!(c2.len() == 2, "{} C2-orderings", c2.len());
    let sos = rx.sum_of_squares_classes(2).map_err(err)?;
    ensure!(sos == BTreeSet::from([SquareClass::ONE]), "sums of two squares are not squares");
    Ok(())
}

pub fn run_all() -> Vec<CriterionResult> {
    let checks: [(&'static str, fn() -> Check); 14] = [
        ("Q_2 additive structure of {1,5}", q2_additive),
        ("W-group of Q_2 and its semidirect chain", q2_wgroup),
        ("two-generator census", census),
        ("quaternary form <1,1,-7,-31>", quaternary_form),
        ("orderings and W-groups of Q_p", padic_orderings),
        ("essential subgroup round trip", essential_round_trip),
        ("Galois/additive dictionary", dictionary),
        ("rigid level trichotomy", rigid_levels),
        ("valuation lifting", valuation_lifts),
        ("Witt ring identities", witt_identities),
        ("sums of two squares in Q_2", sums_of_two_squares),
        ("intersection of C(0)-orderings", c0_intersections),
        ("symbol engine", symbol_engine),
        ("pythagorean field with two orderings", pythagorean_tower),
    ];
    checks
        .iter()
        .enumerate()
        .map(|(i, &(name, f))| {
            let r = f();
            CriterionResult {
                id: i as u32 + 1,
                name,
                passed: r.is_ok(),
                detail: r.err().unwrap_or_default(),
            }
        })
        .collect()
}
