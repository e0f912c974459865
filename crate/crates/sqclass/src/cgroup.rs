//! Finite groups in the category C: 2-groups of exponent dividing 4 whose
//! squares and commutators are central.
//!
//! A group on `n` generators is a quotient of the free object `F(n)` by a
//! subspace `ν` of its Frattini subgroup. The Frattini subgroup of `F(n)` is
//! elementary abelian with basis `sq_i` (`x_i^2`) and `com_{i,j}` for `i < j`
//! (the commutator picked up when `x_j` is moved past `x_i`). Elements are
//! kept in collected form `x_1^{a_1} ... x_n^{a_n} z` as a pair `(a, z)`:
//!
//! ```text
//! (a, u) (b, v) = (a + b, u + v + q(a, b))
//! q(a, b) = Σ_i a_i b_i sq_i + Σ_{i<j} a_j b_i com_{i,j}
//! ```
//!
//! Subgroups are stored structurally: an echelon section over their head
//! space plus their intersection with the Frattini subgroup. Isomorphism and
//! quotient questions reduce to linear conditions on head matrices, because
//! squares and commutators only depend on heads.

use std::fmt;
use std::sync::Arc;

use crate::f2::{dot, F2Matrix, F2Subspace};
use crate::field::{FieldModel, SquareClass};
use crate::ordering::{OrderingTag, SubgroupT};
use crate::snf::IntLattice;
use crate::{Error, Result};

/// Generator bound for `free_c_group`.
pub const MAX_FREE_GENS: usize = 5;
/// Internal generator bound; keeps the Frattini space inside one `u64`.
pub const MAX_GENS: usize = 10;

pub fn phi_dim(n: usize) -> usize {
    n + n * n.saturating_sub(1) / 2
}

/// Position of `com_{i,j}` (`i < j`) in the Frattini basis of `F(n)`.
pub fn com_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    n + i * (2 * n - i - 1) / 2 + (j - i - 1)
}

fn bit(v: u64, i: usize) -> bool {
    (v >> i) & 1 == 1
}

/// Cocycle `q(a, b)` of `F(n)`.
fn cocycle(n: usize, a: u64, b: u64) -> u64 {
    let mut v = a & b;
    for j in 0..n {
        if !bit(a, j) {
            continue;
        }
        for i in 0..j {
            if bit(b, i) {
                v ^= 1 << com_index(n, i, j);
            }
        }
    }
    v
}

#[derive(Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CElem {
    pub head: u64,
    pub tail: u64,
}

impl fmt::Debug for CElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:b} | {:b})", self.head, self.tail)
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Cyclic {
    C2,
    C4,
}

impl fmt::Display for Cyclic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cyclic::C2 => write!(f, "C2"),
            Cyclic::C4 => write!(f, "C4"),
        }
    }
}

/// Quotient targets for [`CGroup::has_quotient`].
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum QuotientTarget {
    C4,
    D,
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CGroup {
    n: usize,
    relations: F2Subspace,
}

/// Named groups used for identification; relations over `F(1)` or `F(2)`
/// with `sq1 = 1`, `sq2 = 2`, `com = 4`.
const REFERENCE_GROUPS: &[(&str, usize, &[u64])] = &[
    ("C2", 1, &[0b1]),
    ("C4", 1, &[]),
    ("C2xC2", 2, &[0b001, 0b010, 0b100]),
    ("C4xC2", 2, &[0b010, 0b100]),
    ("D", 2, &[0b001, 0b010]),
    ("Q", 2, &[0b011, 0b101]),
    ("C2*C4", 2, &[0b001]),
    ("C4xC4", 2, &[0b100]),
    ("C4:C4", 2, &[0b101]),
    ("C4*C4", 2, &[]),
];

impl CGroup {
    /// `F(n)`, the free object on `n` generators.
    pub fn free(n: usize) -> Result<Self> {
        if !(1..=MAX_FREE_GENS).contains(&n) {
            return Err(Error::TooLarge(format!(
                "free group on {n} generators (allowed 1..={MAX_FREE_GENS})"
            )));
        }
        Ok(Self { n, relations: F2Subspace::zero(phi_dim(n)) })
    }

    pub fn new(n: usize, relations: F2Subspace) -> Result<Self> {
        if n > MAX_GENS {
            return Err(Error::TooLarge(format!("{n} generators exceed {MAX_GENS}")));
        }
        if relations.ambient_dim() != phi_dim(n) {
            return Err(Error::Precondition(format!(
                "relations live in dimension {}, Frattini space has dimension {}",
                relations.ambient_dim(),
                phi_dim(n)
            )));
        }
        Ok(Self { n, relations })
    }

    pub fn from_relations(n: usize, rels: &[u64]) -> Result<Self> {
        let relations = F2Subspace::new(phi_dim(n), rels)?;
        Self::new(n, relations)
    }

    pub fn trivial() -> Self {
        Self { n: 0, relations: F2Subspace::zero(0) }
    }

    /// One of the reference groups `C2, C4, C2xC2, C4xC2, D, Q, C2*C4,
    /// C4xC4, C4:C4, C4*C4`.
    pub fn named(name: &str) -> Result<Self> {
        let (_, n, rels) = REFERENCE_GROUPS
            .iter()
            .find(|(k, _, _)| *k == name)
            .ok_or_else(|| Error::Parse(format!("unknown group name {name:?}")))?;
        Self::from_relations(*n, rels)
    }

    pub fn reference_names() -> Vec<&'static str> {
        REFERENCE_GROUPS.iter().map(|r| r.0).collect()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn phi_dim(&self) -> usize {
        phi_dim(self.n)
    }

    pub fn relations(&self) -> &F2Subspace {
        &self.relations
    }

    pub fn order_log2(&self) -> usize {
        self.n + self.phi_dim() - self.relations.dim()
    }

    pub fn order(&self) -> u128 {
        1u128 << self.order_log2()
    }

    pub fn sq_index(&self, i: usize) -> usize {
        i
    }

    pub fn com_index(&self, i: usize, j: usize) -> usize {
        com_index(self.n, i.min(j), i.max(j))
    }

    pub fn quotient(&self, extra: &F2Subspace) -> Result<Self> {
        if extra.ambient_dim() != self.phi_dim() {
            return Err(Error::Precondition("relations outside the Frattini space".into()));
        }
        Ok(Self { n: self.n, relations: self.relations.sum(extra) })
    }

    pub fn cocycle(&self, a: u64, b: u64) -> u64 {
        cocycle(self.n, a, b)
    }

    /// Tail of `x^2` for any `x` with head `a`.
    pub fn square_tail(&self, a: u64) -> u64 {
        self.relations.reduce(cocycle(self.n, a, a))
    }

    /// Tail of the commutator of any two elements with heads `a`, `b`.
    pub fn commutator_tail(&self, a: u64, b: u64) -> u64 {
        self.relations.reduce(cocycle(self.n, a, b) ^ cocycle(self.n, b, a))
    }

    pub fn elem(&self, head: u64, tail: u64) -> CElem {
        let hmask = if self.n == 64 { u64::MAX } else { (1u64 << self.n) - 1 };
        CElem { head: head & hmask, tail: self.relations.reduce(tail) }
    }

    pub fn identity(&self) -> CElem {
        CElem { head: 0, tail: 0 }
    }

    pub fn gen(&self, i: usize) -> CElem {
        self.elem(1 << i, 0)
    }

    /// The central element given by a Frattini vector.
    pub fn central(&self, tail: u64) -> CElem {
        self.elem(0, tail)
    }

    pub fn mul(&self, x: CElem, y: CElem) -> CElem {
        CElem {
            head: x.head ^ y.head,
            tail: self.relations.reduce(x.tail ^ y.tail ^ cocycle(self.n, x.head, y.head)),
        }
    }

    pub fn inv(&self, x: CElem) -> CElem {
        CElem { head: x.head, tail: self.relations.reduce(x.tail ^ cocycle(self.n, x.head, x.head)) }
    }

    pub fn pow(&self, x: CElem, k: u32) -> CElem {
        (0..k % 4).fold(self.identity(), |acc, _| self.mul(acc, x))
    }

    /// `x^{-1} y^{-1} x y`.
    pub fn commutator(&self, x: CElem, y: CElem) -> CElem {
        let a = self.mul(self.inv(x), self.inv(y));
        self.mul(a, self.mul(x, y))
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.n).all(|j| (0..j).all(|i| self.commutator_tail(1 << i, 1 << j) == 0))
    }

    /// All elements; refused beyond `2^16`.
    pub fn elements(&self) -> Result<Vec<CElem>> {
        if self.order_log2() > 16 {
            return Err(Error::TooLarge(format!("group of order 2^{}", self.order_log2())));
        }
        let tails = self.relations.coset_reps();
        let mut out = Vec::with_capacity(1 << self.order_log2());
        for head in 0..(1u64 << self.n) {
            for &t in &tails {
                out.push(CElem { head, tail: t });
            }
        }
        Ok(out)
    }

    /// Span of all commutators, as a subspace of the Frattini space
    /// (including the relations).
    fn commutator_span(&self) -> F2Subspace {
        let mut s = self.relations.clone();
        for j in 0..self.n {
            for i in 0..j {
                s = s.with(1 << com_index(self.n, i, j));
            }
        }
        s
    }

    /// Span of the squares and commutators of elements with heads in `heads`
    /// (plus the relations).
    fn square_span(&self, heads: &[u64]) -> F2Subspace {
        let mut s = self.relations.clone();
        for (k, &a) in heads.iter().enumerate() {
            s = s.with(cocycle(self.n, a, a));
            for &b in &heads[..k] {
                s = s.with(cocycle(self.n, a, b) ^ cocycle(self.n, b, a));
            }
        }
        s
    }

    pub fn subgroup_closure(&self, gens: &[CElem]) -> CSubgroup {
        CSubgroup::closure(self, gens)
    }

    pub fn whole(&self) -> CSubgroup {
        let gens: Vec<CElem> = (0..self.n).map(|i| self.gen(i)).collect();
        CSubgroup::closure(self, &gens)
    }

    pub fn frattini(&self) -> CSubgroup {
        self.whole().frattini()
    }

    /// Image of a Frattini vector of `self` under the homomorphism sending
    /// generator `i` to an element of `target` with head `images[i]`.
    fn frattini_image(&self, target: &CGroup, images: &[u64], v: u64) -> u64 {
        let mut out = 0;
        for i in 0..self.n {
            if bit(v, i) {
                out ^= cocycle(target.n, images[i], images[i]);
            }
            for j in (i + 1)..self.n {
                if bit(v, com_index(self.n, i, j)) {
                    out ^= cocycle(target.n, images[i], images[j])
                        ^ cocycle(target.n, images[j], images[i]);
                }
            }
        }
        out
    }

    /// Searches head matrices `F_2^n -> F_2^m` of full rank `m` whose
    /// induced homomorphism `F(n) -> target` kills `ν`. With `injective`,
    /// only invertible matrices are tried (requires `n = m`).
    fn hom_search(&self, target: &CGroup, injective: bool) -> bool {
        let m = target.n;
        if m > self.n {
            return false;
        }
        // relations checked as soon as their last generator is assigned
        let mut by_last: Vec<Vec<u64>> = vec![Vec::new(); self.n];
        for &v in self.relations.basis() {
            let mut last = 0;
            for i in 0..self.n {
                if bit(v, i) {
                    last = last.max(i);
                }
                for j in (i + 1)..self.n {
                    if bit(v, com_index(self.n, i, j)) {
                        last = last.max(j);
                    }
                }
            }
            if self.n > 0 {
                by_last[last].push(v);
            }
        }
        let mut images = vec![0u64; self.n];
        self.hom_rec(target, injective, &by_last, &mut images, 0, &F2Subspace::zero(m))
    }

    fn hom_rec(
        &self,
        target: &CGroup,
        injective: bool,
        by_last: &[Vec<u64>],
        images: &mut Vec<u64>,
        k: usize,
        span: &F2Subspace,
    ) -> bool {
        let m = target.n;
        if k == self.n {
            return span.dim() == m;
        }
        // remaining generators cannot raise the rank enough
        if span.dim() + (self.n - k) < m {
            return false;
        }
        for b in 0..(1u64 << m) {
            if injective && span.contains(b) {
                continue;
            }
            images[k] = b;
            let ok = by_last[k]
                .iter()
                .all(|&v| target.relations.contains(self.frattini_image(target, images, v)));
            if ok && self.hom_rec(target, injective, by_last, images, k + 1, &span.with(b)) {
                return true;
            }
        }
        false
    }

    fn check_search_size(&self) -> Result<()> {
        if self.n > 6 {
            return Err(Error::TooLarge(format!("search over {} generators", self.n)));
        }
        Ok(())
    }

    pub fn is_isomorphic(&self, other: &CGroup) -> Result<bool> {
        if self.n != other.n || self.relations.dim() != other.relations.dim() {
            return Ok(false);
        }
        self.check_search_size()?;
        Ok(self.hom_search(other, true))
    }

    /// Whether `target` is a quotient of `self`.
    pub fn has_quotient_group(&self, target: &CGroup) -> Result<bool> {
        self.check_search_size()?;
        Ok(self.hom_search(target, false))
    }

    pub fn has_quotient(&self, target: QuotientTarget) -> Result<bool> {
        match target {
            QuotientTarget::C4 => Ok(self.abelianization().contains(&4)),
            QuotientTarget::D => self.has_quotient_group(&CGroup::named("D")?),
        }
    }

    /// Invariant factors of `G / [G, G]`, each 2 or 4.
    pub fn abelianization(&self) -> Vec<u64> {
        let n = self.n;
        let mut rows: Vec<Vec<i64>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 4 } else { 0 }).collect())
            .collect();
        for &v in self.relations.basis() {
            rows.push((0..n).map(|i| if bit(v, i) { 2 } else { 0 }).collect());
        }
        let lattice = IntLattice::from_rows(n, &rows);
        let (torsion, _free) = lattice.quotient_invariants();
        torsion.iter().map(|t| u64::try_from(t).expect("invariant is 2 or 4")).collect()
    }

    /// Number of elements `x` with `x^2 = 1`, including the identity.
    pub fn count_square_roots_of_one(&self) -> u128 {
        let kernel_size = 1u128 << (self.phi_dim() - self.relations.dim());
        let heads = (0..(1u64 << self.n)).filter(|&a| self.square_tail(a) == 0).count() as u128;
        heads * kernel_size
    }

    /// Split test: some ordered minimal generating set `x_1, ..., x_n` has
    /// `<x_1> ∩ [G,G]<x_2, ..., x_n> = 1`.
    pub fn is_split_group(&self) -> Result<bool> {
        self.check_search_size()?;
        Ok(self.n == 0 || !self.split_candidates().is_empty())
    }

    /// Pairs `(x_1 head, hyperplane W of heads)` meeting the split condition.
    fn split_candidates(&self) -> Vec<(u64, F2Subspace)> {
        let n = self.n;
        let comm = self.commutator_span();
        let mut out = Vec::new();
        for a1 in 1..(1u64 << n) {
            let sq = self.square_tail(a1);
            for phi in 1..(1u64 << n) {
                if !dot(phi, a1) {
                    continue;
                }
                let w = F2Subspace::new(n, &[phi]).expect("n <= 64").annihilator();
                let span = comm.sum(&self.square_span(w.basis()));
                if sq == 0 || !span.contains(sq) {
                    out.push((a1, w));
                }
            }
        }
        out
    }

    /// A chain `G_0 ⊆ ... ⊆ G_k = G`, each step a direct or semidirect
    /// product with a cyclic group, as `(order of G_i, cyclic factor)`.
    pub fn semidirect_chain(&self) -> Result<Vec<(u128, Cyclic)>> {
        self.check_search_size()?;
        self.chain_rec()?.ok_or_else(|| Error::Precondition("not a split group".into()))
    }

    fn chain_rec(&self) -> Result<Option<Vec<(u128, Cyclic)>>> {
        if self.n == 0 {
            return Ok(Some(Vec::new()));
        }
        let comm = self.commutator_span();
        for (a1, w) in self.split_candidates() {
            let sub = self.subgroup_closure(
                &w.basis().iter().map(|&h| self.elem(h, 0)).collect::<Vec<_>>(),
            );
            let h = sub.as_group()?;
            let Some(mut chain) = h.chain_rec()? else { continue };
            let n_phi = comm.sum(&self.square_span(w.basis()));
            let h_phi = self.square_span(w.basis());
            let extra = n_phi.dim() - h_phi.dim();
            let mut order = h.order();
            for _ in 0..extra {
                order *= 2;
                chain.push((order, Cyclic::C2));
            }
            let factor = if self.square_tail(a1) == 0 { Cyclic::C2 } else { Cyclic::C4 };
            let step = if factor == Cyclic::C2 { 2 } else { 4 };
            debug_assert_eq!(order * step, self.order());
            chain.push((self.order(), factor));
            return Ok(Some(chain));
        }
        Ok(None)
    }

    /// Whether `G ≅ H × C_2` for some `H`: some central involution lies
    /// outside the Frattini subgroup.
    pub fn has_c2_factor(&self) -> bool {
        (1..(1u64 << self.n)).any(|h| {
            self.square_tail(h) == 0 && (0..self.n).all(|k| self.commutator_tail(h, 1 << k) == 0)
        })
    }

    /// Coproduct in C.
    pub fn free_product(&self, other: &CGroup) -> Result<CGroup> {
        let n = self.n + other.n;
        if n > MAX_FREE_GENS {
            return Err(Error::TooLarge(format!("free product on {n} generators")));
        }
        let mut rels = Vec::new();
        for &v in self.relations.basis() {
            rels.push(embed_frattini(v, self.n, 0, n));
        }
        for &v in other.relations.basis() {
            rels.push(embed_frattini(v, other.n, self.n, n));
        }
        CGroup::from_relations(n, &rels)
    }

    /// Name of an isomorphic reference group, if any.
    pub fn identify(&self) -> Option<&'static str> {
        REFERENCE_GROUPS.iter().find_map(|&(name, n, rels)| {
            if n != self.n {
                return None;
            }
            let g = CGroup::from_relations(n, rels).ok()?;
            self.is_isomorphic(&g).ok()?.then_some(name)
        })
    }

    /// Frattini vector as a sum of `sq(..)` and `com(..,..)` terms.
    pub fn describe_frattini(&self, v: u64, labels: &[String]) -> String {
        let mut terms = Vec::new();
        for i in 0..self.n {
            if bit(v, i) {
                terms.push(format!("sq({})", labels[i]));
            }
        }
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                if bit(v, com_index(self.n, i, j)) {
                    terms.push(format!("com({},{})", labels[i], labels[j]));
                }
            }
        }
        if terms.is_empty() {
            "1".into()
        } else {
            terms.join(" + ")
        }
    }

    pub fn default_labels(&self) -> Vec<String> {
        (1..=self.n).map(|i| format!("x{i}")).collect()
    }
}

/// Moves a Frattini vector of `F(k)` to `F(n)` with generators shifted by `offset`.
fn embed_frattini(v: u64, k: usize, offset: usize, n: usize) -> u64 {
    let mut out = 0;
    for i in 0..k {
        if bit(v, i) {
            out |= 1 << (i + offset);
        }
        for j in (i + 1)..k {
            if bit(v, com_index(k, i, j)) {
                out |= 1 << com_index(n, i + offset, j + offset);
            }
        }
    }
    out
}

impl fmt::Debug for CGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for CGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels = self.default_labels();
        let rels: Vec<String> =
            self.relations.basis().iter().map(|&v| self.describe_frattini(v, &labels)).collect();
        write!(f, "F({})/<{}> of order 2^{}", self.n, rels.join(", "), self.order_log2())
    }
}

/// A subgroup, stored as an echelon section over its head space together
/// with its intersection with the Frattini subgroup.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CSubgroup {
    parent: CGroup,
    section: Vec<CElem>,
    kernel: F2Subspace,
}

impl CSubgroup {
    pub fn closure(g: &CGroup, gens: &[CElem]) -> CSubgroup {
        let gens: Vec<CElem> = gens.iter().map(|x| g.elem(x.head, x.tail)).collect();
        let heads: Vec<u64> = gens.iter().map(|x| x.head).collect();
        let mut kernel = g.square_span(&heads);
        let mut section: Vec<CElem> = Vec::new();
        for &x in &gens {
            let x = reduce_by(g, &section, x);
            if x.head == 0 {
                kernel = kernel.with(x.tail);
            } else {
                section.push(x);
            }
        }
        // full reduction so that equal subgroups compare equal
        section.sort_by_key(|s| s.head.trailing_zeros());
        for i in 0..section.len() {
            for j in 0..section.len() {
                let p = section[j].head.trailing_zeros();
                if i != j && bit(section[i].head, p as usize) {
                    section[i] = g.mul(section[i], section[j]);
                }
            }
        }
        for s in &mut section {
            s.tail = kernel.reduce(s.tail);
        }
        CSubgroup { parent: g.clone(), section, kernel }
    }

    pub fn parent(&self) -> &CGroup {
        &self.parent
    }

    pub fn heads(&self) -> Vec<u64> {
        self.section.iter().map(|s| s.head).collect()
    }

    pub fn head_space(&self) -> F2Subspace {
        F2Subspace::new(self.parent.n, &self.heads()).expect("head width")
    }

    pub fn generators(&self) -> &[CElem] {
        &self.section
    }

    /// `H ∩ Φ(G)` as a subspace of the Frattini space, relations included.
    pub fn kernel(&self) -> &F2Subspace {
        &self.kernel
    }

    pub fn order_log2(&self) -> usize {
        self.section.len() + self.kernel.dim() - self.parent.relations.dim()
    }

    pub fn order(&self) -> u128 {
        1u128 << self.order_log2()
    }

    pub fn contains(&self, x: CElem) -> bool {
        let x = reduce_by(&self.parent, &self.section, self.parent.elem(x.head, x.tail));
        x.head == 0 && self.kernel.contains(x.tail)
    }

    pub fn elements(&self) -> Result<Vec<CElem>> {
        if self.order_log2() > 16 {
            return Err(Error::TooLarge(format!("subgroup of order 2^{}", self.order_log2())));
        }
        let g = &self.parent;
        let mut tails: Vec<u64> =
            self.kernel.elements().into_iter().map(|t| g.relations.reduce(t)).collect();
        tails.sort_unstable();
        tails.dedup();
        let mut out = Vec::new();
        for mask in 0..(1u64 << self.section.len()) {
            let mut x = g.identity();
            for (k, &s) in self.section.iter().enumerate() {
                if bit(mask, k) {
                    x = g.mul(x, s);
                }
            }
            for &t in &tails {
                out.push(g.mul(x, g.central(t)));
            }
        }
        Ok(out)
    }

    /// `Φ(H)`, generated by the squares of `H`.
    pub fn frattini(&self) -> CSubgroup {
        let kernel = self.parent.square_span(&self.heads());
        CSubgroup { parent: self.parent.clone(), section: Vec::new(), kernel }
    }

    /// `Φ(H) = H ∩ Φ(G)`.
    pub fn is_essential(&self) -> bool {
        self.parent.square_span(&self.heads()) == self.kernel
    }

    pub fn is_abelian(&self) -> bool {
        let h = self.heads();
        (0..h.len()).all(|j| (0..j).all(|i| self.parent.commutator_tail(h[i], h[j]) == 0))
    }

    /// A presentation of `H` as a quotient of a free object: generators are
    /// the section elements followed by central involutions spanning a
    /// complement of `Φ(H)` in `H ∩ Φ(G)`.
    pub fn as_group(&self) -> Result<CGroup> {
        let g = &self.parent;
        let heads = self.heads();
        let k = heads.len();
        let mut span = g.square_span(&heads);
        let mut extra = Vec::new();
        for &b in self.kernel.basis() {
            if !span.contains(b) {
                extra.push(b);
                span = span.with(b);
            }
        }
        let n = k + extra.len();
        if n > MAX_GENS {
            return Err(Error::TooLarge(format!("subgroup needs {n} generators")));
        }
        // Frattini map F(n) -> Φ(G)/ν; extra generators square and commute trivially
        let mut images = Vec::with_capacity(phi_dim(n));
        for i in 0..n {
            images.push(if i < k { g.square_tail(heads[i]) } else { 0 });
        }
        for i in 0..n {
            for j in (i + 1)..n {
                images.push(if j < k { g.commutator_tail(heads[i], heads[j]) } else { 0 });
            }
        }
        let phi = phi_dim(n);
        if phi == 0 {
            return Ok(CGroup::trivial());
        }
        let map = F2Matrix::new(g.phi_dim(), images)?.transpose()?;
        let kernel = F2Subspace::new(phi, map.kernel().basis())?;
        CGroup::new(n, kernel)
    }

    /// `H_0 = {h ∈ H : head(h) pairs trivially with c}`.
    pub fn stabilizer_of(&self, c: SquareClass) -> CSubgroup {
        let g = &self.parent;
        let mut gens: Vec<CElem> = Vec::new();
        let mut odd: Option<CElem> = None;
        for &s in &self.section {
            if !dot(s.head, c.bits()) {
                gens.push(s);
            } else if let Some(o) = odd {
                gens.push(g.mul(s, o));
            } else {
                odd = Some(s);
            }
        }
        gens.extend(self.kernel.basis().iter().map(|&t| g.central(t)));
        CSubgroup::closure(g, &gens)
    }
}

fn reduce_by(g: &CGroup, section: &[CElem], mut x: CElem) -> CElem {
    for &s in section {
        let p = s.head.trailing_zeros() as usize;
        if bit(x.head, p) {
            x = g.mul(x, s);
        }
    }
    x
}

/// The W-group of a field model: `F(n) / ν` with one generator per basis
/// square class, `ν` dual to the span of the quaternion symbols.
#[derive(Clone, Debug)]
pub struct WGroup {
    model: Arc<FieldModel>,
    group: CGroup,
    symbol_span_dim: usize,
}

impl WGroup {
    pub fn from_model(model: Arc<FieldModel>) -> Result<Self> {
        let n = model.dim();
        if n > MAX_FREE_GENS {
            return Err(Error::TooLarge(format!("square-class dimension {n} exceeds {MAX_FREE_GENS}")));
        }
        let phi = phi_dim(n);
        // column f of M is the symbol vector of the Frattini basis element f
        let mut cols = vec![0u64; phi];
        for i in 0..n {
            let a = SquareClass::basis(i);
            cols[i] = model.symbol(a, a);
            for j in (i + 1)..n {
                cols[com_index(n, i, j)] = model.symbol(a, SquareClass::basis(j));
            }
        }
        let mut rows = Vec::new();
        for k in 0..model.symbol_dim() {
            let row = (0..phi).filter(|&f| bit(cols[f], k)).fold(0u64, |r, f| r | 1 << f);
            rows.push(row);
        }
        let relations = F2Subspace::new(phi, &rows)?;
        let symbol_span = F2Subspace::new(model.symbol_dim(), &cols)?;
        let group = CGroup::new(n, relations)?;
        Ok(Self { model, group, symbol_span_dim: symbol_span.dim() })
    }

    pub fn model(&self) -> &Arc<FieldModel> {
        &self.model
    }

    pub fn group(&self) -> &CGroup {
        &self.group
    }

    /// Generator `i` corresponds to basis class `i`.
    pub fn labels(&self) -> &[String] {
        self.model.labels()
    }

    pub fn symbol_span_dim(&self) -> usize {
        self.symbol_span_dim
    }

    pub fn relation_words(&self) -> Vec<String> {
        self.group
            .relations()
            .basis()
            .iter()
            .map(|&v| self.group.describe_frattini(v, self.labels()))
            .collect()
    }

    /// Classes fixed by every element of `h` under the Kummer pairing.
    pub fn p_h(&self, h: &CSubgroup) -> Result<SubgroupT> {
        if *h.parent() != self.group {
            return Err(Error::ModelMismatch);
        }
        let space = h.head_space().annihilator();
        SubgroupT::new(self.model.clone(), space)
    }

    /// Essential subgroup `H` with `P_H = P`.
    pub fn essential_from_subgroup(&self, p: &SubgroupT) -> Result<CSubgroup> {
        if **p.model() != *self.model {
            return Err(Error::ModelMismatch);
        }
        let heads = p.space().annihilator();
        let gens: Vec<CElem> = heads.basis().iter().map(|&h| self.group.elem(h, 0)).collect();
        Ok(self.group.subgroup_closure(&gens))
    }

    pub fn dump(&self) -> String {
        let mut out = String::new();
        let gens: Vec<String> =
            self.labels().iter().enumerate().map(|(i, l)| format!("x{} = {l}", i + 1)).collect();
        out.push_str(&format!("model: {}\n", self.model.name()));
        out.push_str(&format!("generators: {}\n", gens.join(", ")));
        out.push_str("relations:\n");
        for w in self.relation_words() {
            out.push_str(&format!("  {w}\n"));
        }
        out.push_str(&format!("order: 2^{} = {}\n", self.group.order_log2(), self.group.order()));
        out
    }
}

/// Expected group for a classified subgroup of index at most 4.
pub fn expected_group(tag: OrderingTag) -> Option<&'static str> {
    match tag {
        OrderingTag::C2 => Some("C2"),
        OrderingTag::C4Level1 | OrderingTag::C4Level2 => Some("C4"),
        OrderingTag::DFan2 | OrderingTag::DI(1) => Some("D"),
        OrderingTag::CI(1) => Some("C4xC4"),
        OrderingTag::SI(1) => Some("C4:C4"),
        OrderingTag::C2StarC4 => Some("C2*C4"),
        OrderingTag::C4StarC4 => Some("C4*C4"),
        _ => None,
    }
}

/// One failed equivalence found by [`dictionary_check`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DictionaryFailure {
    pub subgroup: String,
    pub property: &'static str,
}

/// Compares Galois-side and additive-side properties over the essential
/// subgroups on at most two generators and the whole group.
pub fn dictionary_check(w: &WGroup) -> Result<Vec<DictionaryFailure>> {
    let g = w.group();
    let n = g.n();
    let m1 = w.model().minus_one();
    let mut head_spaces: Vec<F2Subspace> = Vec::new();
    for k in 1..=n.min(2) {
        head_spaces.extend(F2Subspace::enumerate(n, k));
    }
    if n > 2 {
        head_spaces.push(F2Subspace::full(n));
    }
    let mut failures = Vec::new();
    for heads in head_spaces {
        let gens: Vec<CElem> = heads.basis().iter().map(|&h| g.elem(h, 0)).collect();
        let h = g.subgroup_closure(&gens);
        let t = w.p_h(&h)?;
        let hg = h.as_group()?;
        let name = format!("{:?}", heads);
        let mut fail = |property| failures.push(DictionaryFailure { subgroup: name.clone(), property });

        let tt_closed = t.plus_a(SquareClass::ONE)?.iter().all(|&c| t.contains(c));
        if hg.has_quotient(QuotientTarget::C4)? == tt_closed {
            fail("C4 quotient vs T+T != T");
        }
        if t.contains(m1) {
            let rigid = t.is_rigid();
            let abelian = h.is_abelian();
            let no_d = !hg.has_quotient(QuotientTarget::D)?;
            if rigid != abelian || abelian != no_d {
                fail("rigid vs abelian vs no D quotient");
            }
        } else {
            let h0 = h.stabilizer_of(m1);
            let rigid = t.with_minus_one().is_rigid();
            let abelian = h0.is_abelian();
            let no_d = !h0.as_group()?.has_quotient(QuotientTarget::D)?;
            if rigid != abelian || abelian != no_d {
                fail("(T u -T)-rigid vs H0 abelian vs no D quotient of H0");
            }
        }
        if heads.dim() <= 2 {
            let tag = t.classify()?.tag;
            if let Some(expected) = expected_group(tag) {
                if !hg.is_isomorphic(&CGroup::named(expected)?)? {
                    fail("group type vs ordering class");
                }
            }
        }
    }
    Ok(failures)
}

/// One isomorphism class of quotients of `F(2)`.
#[derive(Clone, Debug)]
pub struct CensusEntry {
    pub name: String,
    pub group: CGroup,
    /// Number of relation subspaces giving this group.
    pub presentations: usize,
    pub split: bool,
    pub has_c2_factor: bool,
    /// Split, without a C_2 direct factor (unless C_2 itself), not Q.
    pub flagged: bool,
}

/// All quotients of `F(2)` by subspaces of its Frattini subgroup, up to isomorphism.
pub fn two_generator_census() -> Result<Vec<CensusEntry>> {
    let f2 = CGroup::free(2)?;
    let mut entries: Vec<CensusEntry> = Vec::new();
    for k in 0..=3 {
        for rel in F2Subspace::enumerate(3, k) {
            let g = f2.quotient(&rel)?;
            let mut found = false;
            for e in &mut entries {
                if e.group.is_isomorphic(&g)? {
                    e.presentations += 1;
                    found = true;
                    break;
                }
            }
            if found {
                continue;
            }
            let name = g
                .identify()
                .map(str::to_string)
                .unwrap_or_else(|| format!("G{}#{}", g.order(), entries.len()));
            let split = g.is_split_group()?;
            let has_c2_factor = g.has_c2_factor();
            let is_c2 = name == "C2";
            let flagged = split && (!has_c2_factor || is_c2) && name != "Q";
            entries.push(CensusEntry { name, group: g, presentations: 1, split, has_c2_factor, flagged });
        }
    }
    entries.sort_by(|a, b| a.group.order().cmp(&b.group.order()).then(a.name.cmp(&b.name)));
    Ok(entries)
}


#[cfg(test)]
mod dictionary_tests {
    use super::*;

    #[test]
    fn dictionary_holds_on_small_models() {
        for d in ["Fq:5", "Fq:7", "Qp:3", "Qp:5", "Qp:7", "Qp:13", "Qp:2", "R", "Tower(R;X)", "Tower(Tower(R;X);Y)"] {
            let w = WGroup::from_model(Arc::new(FieldModel::parse(d).unwrap())).unwrap();
            assert_eq!(dictionary_check(&w).unwrap(), vec![], "{d}");
        }
    }
}
