//! Independent oracles shared by the integration tests. Nothing here calls
//! the symbol tables or the closed-form formulas of the library; the checks
//! go back to integer arithmetic and exhaustive search.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::sync::Arc;

use sqclass::{CElem, CGroup, FieldModel, SquareClass};

pub fn model(desc: &str) -> Arc<FieldModel> {
    Arc::new(FieldModel::parse(desc).unwrap_or_else(|e| panic!("{desc}: {e}")))
}

pub fn odd_primes_upto(n: u64) -> Vec<u64> {
    (3..=n).filter(|&p| (2..p).take_while(|d| d * d <= p).all(|d| p % d != 0)).collect()
}

/// `(v, u)` with `n = p^v u`, `p` not dividing `u`.
pub fn split(mut n: i64, p: i64) -> (u32, i64) {
    assert!(n != 0);
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    (v, n)
}

/// Square class of a nonzero integer in Q_2 as coordinates on `(-1, 2, 5)`,
/// read off from the 2-adic valuation and the odd part mod 8.
pub fn q2_coords(n: i64) -> u64 {
    let (v, u) = split(n, 2);
    let unit = match u.rem_euclid(8) {
        1 => 0b000,
        7 => 0b001,
        5 => 0b100,
        3 => 0b101,
        _ => unreachable!(),
    };
    unit | u64::from(v % 2) << 1
}

pub fn q2_label(c: u64) -> &'static str {
    ["1", "-1", "2", "-2", "5", "-5", "10", "-10"][c as usize]
}

/// Integer representative of a class of `Q_p` given by the library's
/// basis representatives.
pub fn class_rep(m: &FieldModel, c: SquareClass) -> i64 {
    (0..m.dim())
        .filter(|&i| c.bits() >> i & 1 == 1)
        .map(|i| i64::try_from(m.basis_rep(i).unwrap()).unwrap())
        .product()
}

fn pval(n: i64, p: i64) -> u32 {
    if n == 0 {
        u32::MAX
    } else {
        split(n, p).0
    }
}

/// Whether the diagonal form `sum c_i x_i^2` has a zero over `Q_p`.
///
/// A primitive zero can be scaled so that its first unit coordinate `x_L`
/// is 1. Hensel's lemma makes a point with `v(f) >= 2 v(2 c_L) + 1` a
/// certificate, and the search mod `p^(2 v(2 c_L) + 1)` for one is exhaustive.
/// The last coordinate is matched through a table of its possible values.
pub fn hensel_isotropic(coeffs: &[i64], p: u64) -> bool {
    let p = p as i64;
    let n = coeffs.len();
    for lead in 0..n {
        let e = pval(2 * coeffs[lead], p);
        let m = p.pow(2 * e + 1);
        // (step, count) of each coordinate mod m: multiples of p before the lead
        let range = |i: usize| if i < lead { (p, m / p) } else { (1, m) };
        let last = n - 1;
        let table: Option<HashSet<i64>> = (lead != last).then(|| {
            let (step, count) = range(last);
            (0..count).map(|j| (coeffs[last] * ((j * step).pow(2) % m)).rem_euclid(m)).collect()
        });
        let free: Vec<usize> = (0..n).filter(|&i| i != lead && (table.is_none() || i != last)).collect();
        let mut idx = vec![0i64; free.len()];
        loop {
            let mut f = coeffs[lead].rem_euclid(m);
            for (k, &i) in free.iter().enumerate() {
                let x = idx[k] * range(i).0;
                f = (f + coeffs[i] * (x * x % m)).rem_euclid(m);
            }
            let hit = match &table {
                Some(t) => t.contains(&(-f).rem_euclid(m)),
                None => f == 0,
            };
            if hit {
                return true;
            }
            let mut k = 0;
            while k < free.len() {
                idx[k] += 1;
                if idx[k] < range(free[k]).1 {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if k == free.len() {
                break;
            }
        }
    }
    false
}

/// Hilbert symbol `(a, b)_p` via isotropy of `<a, b, -1>`.
pub fn hilbert_oracle(a: i64, b: i64, p: u64) -> i8 {
    if hensel_isotropic(&[a, b, -1], p) {
        1
    } else {
        -1
    }
}

/// Whether `sum c_i x_i^2 = 0` has a primitive solution mod `m`.
pub fn primitive_zero_mod(coeffs: &[i64], m: i64, p: i64) -> bool {
    let n = coeffs.len() as u32;
    (0..m.pow(n)).any(|idx| {
        let mut x = Vec::with_capacity(n as usize);
        let mut r = idx;
        for _ in 0..n {
            x.push(r % m);
            r /= m;
        }
        x.iter().any(|xi| xi % p != 0)
            && x.iter().zip(coeffs).map(|(&xi, &c)| c * xi * xi).sum::<i64>().rem_euclid(m) == 0
    })
}

/// Classes of `Q_2` hit by `t1 x^2 + t2 y^2` for small integers, with
/// `t1`, `t2` ranging over the given representatives.
pub fn q2_sums(reps: &[i64], range: i64) -> BTreeSet<u64> {
    let mut out = BTreeSet::new();
    for &t1 in reps {
        for &t2 in reps {
            for x in 1..=range {
                for y in 1..=range {
                    let s = t1 * x * x + t2 * y * y;
                    if s != 0 {
                        out.insert(q2_coords(s));
                    }
                }
            }
        }
    }
    out
}

/// All elements generated by `gens`, by breadth-first multiplication.
pub fn bfs_closure(g: &CGroup, gens: &[CElem]) -> HashSet<CElem> {
    let mut seen = HashSet::from([g.identity()]);
    let mut queue = VecDeque::from([g.identity()]);
    while let Some(x) = queue.pop_front() {
        for &s in gens {
            let y = g.mul(x, s);
            if seen.insert(y) {
                queue.push_back(y);
            }
        }
    }
    seen
}

/// Order, number of elements with `x^2 = 1`, and commutativity, all by
/// brute force over the generated elements.
#[derive(Debug, PartialEq, Eq)]
pub struct GroupInvariants {
    pub order: usize,
    pub involutions_and_one: usize,
    pub abelian: bool,
}

pub fn brute_invariants(g: &CGroup) -> GroupInvariants {
    let gens: Vec<CElem> = (0..g.n()).map(|i| g.gen(i)).collect();
    let elems = bfs_closure(g, &gens);
    let one = g.identity();
    let inv = elems.iter().filter(|&&x| g.mul(x, x) == one).count();
    let abelian = gens.iter().all(|&x| gens.iter().all(|&y| g.mul(x, y) == g.mul(y, x)));
    GroupInvariants { order: elems.len(), involutions_and_one: inv, abelian }
}
