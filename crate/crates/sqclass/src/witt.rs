//! The rings `W_T(F) = Z[F*/T] / J`.
//!
//! `J` is spanned by `[g] + [-g]` and by `[a] + [b] - [c] - [abc]` whenever
//! the coset `c` contains a value `s + t` with `s ∈ aT`, `t ∈ bT`. Both
//! families are stable under multiplication by group elements, so their
//! Z-span is already an ideal and the multiplication of `Z[F*/T]` descends.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::field::{FieldModel, SquareClass};
use crate::ordering::{intersect_c0, enumerate_subgroups, C0Intersection, OrderingTag, SubgroupT};
use crate::snf::IntLattice;
use crate::{Error, Result};

/// Largest `|F*/T|` accepted by [`ring_iso`].
pub const MAX_ISO_INDEX: usize = 16;
/// Largest `|F*/T|` accepted when building a ring.
pub const MAX_RING_INDEX: usize = 256;

#[derive(Clone, Debug)]
pub struct WittRing {
    t: SubgroupT,
    /// Coset representatives; basis element `i` is `[reps[i] T]`.
    reps: Vec<SquareClass>,
    index_of: HashMap<u64, usize>,
    relations: IntLattice,
    torsion: Vec<BigInt>,
    free_rank: usize,
}

impl WittRing {
    pub fn new(t: &SubgroupT) -> Result<Self> {
        let reps = t.coset_reps();
        let m = reps.len();
        if m > MAX_RING_INDEX {
            return Err(Error::TooLarge(format!("{m} cosets exceed {MAX_RING_INDEX}")));
        }
        let index_of: HashMap<u64, usize> =
            reps.iter().enumerate().map(|(i, r)| (r.bits(), i)).collect();
        let idx = |c: SquareClass| index_of[&t.coset_rep(c).bits()];
        let m1 = t.model().minus_one();

        let mut rows: BTreeSet<Vec<i64>> = BTreeSet::new();
        let mut unit = |pairs: &[(usize, i64)]| {
            let mut r = vec![0i64; m];
            for &(i, x) in pairs {
                r[i] += x;
            }
            if r.iter().any(|&x| x != 0) {
                rows.insert(r);
            }
        };
        for &g in &reps {
            unit(&[(idx(g), 1), (idx(g.mul(m1)), 1)]);
        }
        // values of aT + bT are a · (T + abT)
        let mut sums: HashMap<usize, BTreeSet<usize>> = HashMap::new();
        for &d in &reps {
            let vals = t.plus_a(d)?.into_iter().map(idx).collect();
            sums.insert(idx(d), vals);
        }
        for &a in &reps {
            for &b in &reps {
                let ab = a.mul(b);
                for &c in &sums[&idx(ab)] {
                    let c = a.mul(reps[c]);
                    unit(&[(idx(a), 1), (idx(b), 1), (idx(c), -1), (idx(ab.mul(c)), -1)]);
                }
            }
        }
        let rows: Vec<Vec<i64>> = rows.into_iter().collect();
        let relations = IntLattice::from_rows(m, &rows);
        let (torsion, free_rank) = relations.quotient_invariants();
        let ring = Self { t: t.clone(), reps, index_of, relations, torsion, free_rank };
        if !ring.relations_form_ideal() {
            return Err(Error::Precondition("relation lattice is not an ideal".into()));
        }
        Ok(ring)
    }

    /// `W(F)`, i.e. `T` = squares.
    pub fn of_model(model: Arc<FieldModel>) -> Result<Self> {
        Self::new(&SubgroupT::squares(model))
    }

    pub fn subgroup(&self) -> &SubgroupT {
        &self.t
    }

    pub fn model(&self) -> &Arc<FieldModel> {
        self.t.model()
    }

    pub fn rank(&self) -> usize {
        self.reps.len()
    }

    pub fn basis(&self) -> &[SquareClass] {
        &self.reps
    }

    pub fn basis_labels(&self) -> Vec<String> {
        self.reps.iter().map(|&r| format!("[{}]", self.model().class_label(r))).collect()
    }

    pub fn index_of(&self, c: SquareClass) -> usize {
        self.index_of[&self.t.coset_rep(c).bits()]
    }

    pub fn relations(&self) -> &IntLattice {
        &self.relations
    }

    /// Invariant factors of the additive group other than 1.
    pub fn torsion(&self) -> &[BigInt] {
        &self.torsion
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    /// Additive invariants, with a `0` for each free summand.
    pub fn invariants(&self) -> Vec<BigInt> {
        let mut v = self.torsion.clone();
        v.extend(std::iter::repeat_n(BigInt::zero(), self.free_rank));
        v
    }

    pub fn order(&self) -> Option<BigInt> {
        (self.free_rank == 0).then(|| self.torsion.iter().product())
    }

    /// `basis[i] · basis[j]` as a basis index.
    pub fn mul_index(&self, i: usize, j: usize) -> usize {
        self.index_of(self.reps[i].mul(self.reps[j]))
    }

    pub fn multiplication_table(&self) -> Vec<Vec<usize>> {
        let m = self.rank();
        (0..m).map(|i| (0..m).map(|j| self.mul_index(i, j)).collect()).collect()
    }

    /// Product of two elements in basis coordinates.
    pub fn mul(&self, x: &[BigInt], y: &[BigInt]) -> Vec<BigInt> {
        let m = self.rank();
        let mut out = vec![BigInt::zero(); m];
        for i in 0..m {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..m {
                if !y[j].is_zero() {
                    out[self.mul_index(i, j)] += &x[i] * &y[j];
                }
            }
        }
        out
    }

    pub fn is_zero(&self, x: &[BigInt]) -> bool {
        self.relations.contains(x)
    }

    /// Smallest `k > 0` with `k x = 0`, or `None` if `x` has infinite order.
    pub fn additive_order(&self, x: &[BigInt]) -> Option<u64> {
        let bound = self.torsion.last().and_then(|d| d.to_u64()).unwrap_or(1);
        (1..=bound).find(|&k| {
            bound.is_multiple_of(k) && {
                let kx: Vec<BigInt> = x.iter().map(|v| v * BigInt::from(k)).collect();
                self.relations.contains(&kx)
            }
        })
    }

    pub fn unit_vector(&self, c: SquareClass) -> Vec<BigInt> {
        let mut v = vec![BigInt::zero(); self.rank()];
        v[self.index_of(c)] = BigInt::from(1);
        v
    }

    /// Additive order of `[1]`.
    pub fn characteristic(&self) -> Option<u64> {
        self.additive_order(&self.unit_vector(SquareClass::ONE))
    }

    /// `g · r ∈ J` for every group element `g` and basis row `r` of `J`.
    pub fn relations_form_ideal(&self) -> bool {
        let m = self.rank();
        (0..m).all(|g| {
            self.relations.basis().iter().all(|r| {
                let mut w = vec![BigInt::zero(); m];
                for (j, x) in r.iter().enumerate() {
                    w[self.mul_index(g, j)] += x;
                }
                self.relations.contains(&w)
            })
        })
    }

    /// The ring with its basis reordered by a coordinate permutation that
    /// comes from a group automorphism; used to test labelling independence.
    pub fn relabelled_lattice(&self, perm: &[usize]) -> IntLattice {
        self.relations.permuted(perm)
    }
}

impl fmt::Display for WittRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let inv: Vec<String> = self.invariants().iter().map(|d| d.to_string()).collect();
        write!(f, "W_T over {} cosets, additive invariants ({})", self.rank(), inv.join(", "))
    }
}

/// Whether some isomorphism of the coset groups carries one relation
/// lattice onto the other; such a map is a ring isomorphism sending group
/// elements to group elements.
pub fn ring_iso(w1: &WittRing, w2: &WittRing) -> Result<bool> {
    let m = w1.rank();
    if m > MAX_ISO_INDEX || w2.rank() > MAX_ISO_INDEX {
        return Err(Error::TooLarge(format!("more than {MAX_ISO_INDEX} cosets")));
    }
    if m != w2.rank() || w1.torsion != w2.torsion || w1.free_rank != w2.free_rank {
        return Ok(false);
    }
    if w1.characteristic() != w2.characteristic() {
        return Ok(false);
    }
    // coset groups are F_2^k; send the generators of w1's coset group to
    // independent cosets of w2 in all possible ways
    let k = m.trailing_zeros() as usize;
    // representatives are supported on the free coordinates of T
    let support = w1.reps.iter().fold(0u64, |acc, r| acc | r.bits());
    let free: Vec<usize> = (0..64).filter(|&i| (support >> i) & 1 == 1).collect();
    debug_assert_eq!(free.len(), k);
    let mut images = Vec::with_capacity(k);
    Ok(iso_rec(w1, w2, &free, &mut images))
}

fn iso_rec(w1: &WittRing, w2: &WittRing, free: &[usize], images: &mut Vec<usize>) -> bool {
    if images.len() == free.len() {
        let m = w1.rank();
        // basis element with bits b (in w1's coset coordinates) maps to the product of images
        let mut perm = vec![0usize; m];
        for (i, p) in perm.iter_mut().enumerate() {
            let mut c = SquareClass::ONE;
            let r = w1.reps[i].bits();
            for (&col, &img) in free.iter().zip(images.iter()) {
                if (r >> col) & 1 == 1 {
                    c = c.mul(w2.reps[img]);
                }
            }
            *p = w2.index_of(c);
        }
        let mut seen = perm.clone();
        seen.sort_unstable();
        seen.dedup();
        return seen.len() == m && w1.relations.permuted(&perm) == w2.relations;
    }
    for cand in 1..w2.rank() {
        // the image must stay independent of the earlier images
        let mut span: BTreeSet<u64> = BTreeSet::from([0]);
        for &img in images.iter() {
            let b = w2.reps[img].bits();
            let more: Vec<u64> = span.iter().map(|&s| s ^ b).collect();
            span.extend(more);
        }
        if span.contains(&w2.reps[cand].bits()) {
            continue;
        }
        images.push(cand);
        if iso_rec(w1, w2, free, images) {
            return true;
        }
        images.pop();
    }
    false
}

/// Result of comparing `ker φ` with `I^2 F + 2 W(F)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelCheck {
    pub orderings: usize,
    /// `φ` vanishes on `J`.
    pub phi_kills_relations: bool,
    /// Each signature map respects products of basis elements.
    pub multiplicative: bool,
    pub i2_plus_2w_in_kernel: bool,
    pub kernel_in_i2_plus_2w: bool,
}

impl KernelCheck {
    pub fn passed(&self) -> bool {
        self.phi_kills_relations
            && self.multiplicative
            && self.i2_plus_2w_in_kernel
            && self.kernel_in_i2_plus_2w
    }
}

/// Compares the kernel of `W(F) -> Π_T C_2[ε]/(ε^2)` over the C(∅)-orderings
/// `T` (`⟨f⟩ ↦ 1` for `f ∈ T`, `1 + ε` otherwise) with `I^2 F + 2 W(F)`.
pub fn c0_kernel_check(model: &Arc<FieldModel>) -> Result<KernelCheck> {
    let c0 = enumerate_subgroups(model, 2, Some(OrderingTag::C4Level1))?;
    if c0.is_empty() || intersect_c0(model)? == C0Intersection::EmptyFamily {
        return Err(Error::Precondition(format!("{} has no C(∅)-ordering", model.name())));
    }
    let w = WittRing::of_model(model.clone())?;
    let m = w.rank();
    if m > 64 {
        return Err(Error::TooLarge(format!("{m} square classes exceed 64")));
    }
    let classes = w.basis().to_vec();

    // kernel of φ on Z^G: the 1-coefficient and every ε-coefficient are even
    let mut conditions: Vec<Vec<i64>> = vec![vec![1; m]];
    for t in &c0 {
        conditions.push(classes.iter().map(|&g| i64::from(!t.contains(g))).collect());
    }
    let kernel = even_solutions(m, &conditions);

    let phi_kills_relations = w.relations.basis().iter().all(|r| {
        conditions.iter().all(|c| {
            let s: BigInt = r.iter().zip(c).map(|(x, &y)| x * BigInt::from(y)).sum();
            (s % 2u32).is_zero()
        })
    });
    let multiplicative = c0.iter().all(|t| {
        classes.iter().all(|&g| {
            classes.iter().all(|&h| t.contains(g.mul(h)) == (t.contains(g) == t.contains(h)))
        })
    });

    let mut target = w.relations.clone();
    for i in 0..m {
        let mut r = vec![0i64; m];
        r[i] = 2;
        target.insert_small(&r);
    }
    for &g in &classes {
        for &a in &classes {
            for &b in &classes {
                let mut r = vec![0i64; m];
                for c in [g, g.mul(a), g.mul(b), g.mul(a).mul(b)] {
                    r[w.index_of(c)] += 1;
                }
                target.insert_small(&r);
            }
        }
    }
    Ok(KernelCheck {
        orderings: c0.len(),
        phi_kills_relations,
        multiplicative,
        i2_plus_2w_in_kernel: kernel.contains_lattice(&target),
        kernel_in_i2_plus_2w: target.contains_lattice(&kernel),
    })
}

/// `{v ∈ Z^m : c · v ≡ 0 (mod 2) for every c}` with 0/1 condition vectors.
fn even_solutions(m: usize, conditions: &[Vec<i64>]) -> IntLattice {
    let mut lattice = IntLattice::new(m);
    for i in 0..m {
        let mut r = vec![0i64; m];
        r[i] = 2;
        lattice.insert_small(&r);
    }
    // add the F_2 kernel of the condition matrix, lifted to 0/1 vectors
    let rows: Vec<u64> = conditions
        .iter()
        .map(|c| c.iter().enumerate().fold(0u64, |acc, (i, &x)| acc | ((x as u64 & 1) << i)))
        .collect();
    let mat = crate::f2::F2Matrix::new(m, rows).expect("at most 64 cosets");
    for &v in mat.kernel().basis() {
        let r: Vec<i64> = (0..m).map(|i| ((v >> i) & 1) as i64).collect();
        lattice.insert_small(&r);
    }
    lattice
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(d: &str) -> Arc<FieldModel> {
        Arc::new(FieldModel::parse(d).unwrap())
    }

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn real_witt_ring_is_z() {
        let w = WittRing::of_model(model("R")).unwrap();
        assert_eq!(w.invariants(), ints(&[0]));
        assert_eq!(w.characteristic(), None);
    }

    #[test]
    fn finite_field_rings() {
        let w13 = WittRing::of_model(model("Fq:13")).unwrap();
        assert_eq!(w13.order(), Some(BigInt::from(4)));
        assert_eq!(w13.characteristic(), Some(2));
        assert_eq!(w13.torsion(), &ints(&[2, 2])[..]);
        let w7 = WittRing::of_model(model("Fq:7")).unwrap();
        assert_eq!(w7.torsion(), &ints(&[4])[..]);
        assert_eq!(w7.characteristic(), Some(4));
    }

    #[test]
    fn padic_rings() {
        let q13 = WittRing::of_model(model("Qp:13")).unwrap();
        assert_eq!(q13.torsion(), &ints(&[2, 2, 2, 2])[..]);
        let q7 = WittRing::of_model(model("Qp:7")).unwrap();
        assert_eq!(q7.torsion(), &ints(&[4, 4])[..]);
        let q2 = WittRing::of_model(model("Qp:2")).unwrap();
        assert_eq!(q2.order(), Some(BigInt::from(32)));
        assert_eq!(q2.characteristic(), Some(8));
        assert!(ring_iso(&q13, &q13).unwrap());
        assert!(!ring_iso(&q13, &q7).unwrap());
        let r = WittRing::of_model(model("R")).unwrap();
        assert!(ring_iso(&r, &r).unwrap());
    }

    #[test]
    fn kernel_identity() {
        for d in ["Qp:2", "Qp:13", "Fq:5"] {
            let k = c0_kernel_check(&model(d)).unwrap();
            assert!(k.passed(), "{d}: {k:?}");
        }
        assert!(c0_kernel_check(&model("R")).is_err());
    }

    #[test]
    fn prime_ordering_ring_matches_local_ring() {
        let qs = model("QS:2,3,5,7,13");
        let (t13, _) = crate::local_global::ordering_for_prime_in(&qs, 13).unwrap();
        let global = WittRing::new(&t13).unwrap();
        let local = WittRing::of_model(model("Qp:13")).unwrap();
        assert!(ring_iso(&global, &local).unwrap());
        let (t7, _) = crate::local_global::ordering_for_prime_in(&qs, 7).unwrap();
        assert!(ring_iso(&WittRing::new(&t7).unwrap(), &WittRing::of_model(model("Qp:7")).unwrap()).unwrap());
        assert!(!ring_iso(&global, &WittRing::new(&t7).unwrap()).unwrap());
    }
}
