//! Subgroups `T` of the square-class group and their additive structure.
//!
//! Sums are handled at the level of square classes: since `T` contains all
//! squares, every set such as `T + aT` is a union of square classes, and a
//! class `c` lies in `T + aT` exactly when some binary form `<s, at>` with
//! `s, t` in `T` represents it.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::f2::F2Subspace;
use crate::field::{FieldModel, Level, SquareClass};
use crate::{Error, Result};

pub type ClassSet = BTreeSet<SquareClass>;

/// Largest square-class dimension accepted by subgroup enumeration.
pub const MAX_ENUM_DIM: usize = 10;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubgroupT {
    model: Arc<FieldModel>,
    space: F2Subspace,
}

impl SubgroupT {
    pub fn new(model: Arc<FieldModel>, space: F2Subspace) -> Result<Self> {
        if space.ambient_dim() != model.dim() {
            return Err(Error::ModelMismatch);
        }
        Ok(Self { model, space })
    }

    /// The subgroup of squares, i.e. the identity class alone.
    pub fn squares(model: Arc<FieldModel>) -> Self {
        let space = F2Subspace::zero(model.dim());
        Self { model, space }
    }

    pub fn whole(model: Arc<FieldModel>) -> Self {
        let space = F2Subspace::full(model.dim());
        Self { model, space }
    }

    pub fn span(model: Arc<FieldModel>, classes: &[SquareClass]) -> Result<Self> {
        for &c in classes {
            model.check(c)?;
        }
        let gens: Vec<u64> = classes.iter().map(|c| c.bits()).collect();
        let space = F2Subspace::new(model.dim(), &gens)?;
        Ok(Self { model, space })
    }

    /// Parses a comma-separated list of class labels or elements; the
    /// subgroup is their span.
    pub fn parse(model: Arc<FieldModel>, list: &str) -> Result<Self> {
        let classes = list
            .split(',')
            .filter(|s| !s.trim().is_empty())
            .map(|s| model.parse_class(s))
            .collect::<Result<Vec<_>>>()?;
        Self::span(model, &classes)
    }

    pub fn model(&self) -> &Arc<FieldModel> {
        &self.model
    }

    pub fn space(&self) -> &F2Subspace {
        &self.space
    }

    pub fn contains(&self, c: SquareClass) -> bool {
        self.space.contains(c.bits())
    }

    /// `log2 [F* : T]`.
    pub fn codim(&self) -> usize {
        self.space.codim()
    }

    pub fn index(&self) -> u64 {
        1u64 << self.codim()
    }

    pub fn is_proper(&self) -> bool {
        self.codim() > 0
    }

    pub fn classes(&self) -> Vec<SquareClass> {
        let mut v: Vec<SquareClass> = self.space.elements().into_iter().map(SquareClass).collect();
        v.sort_unstable();
        v
    }

    pub fn class_set(&self) -> ClassSet {
        self.classes().into_iter().collect()
    }

    /// One representative per coset of `T`.
    pub fn coset_reps(&self) -> Vec<SquareClass> {
        self.space.coset_reps().into_iter().map(SquareClass).collect()
    }

    pub fn coset_rep(&self, c: SquareClass) -> SquareClass {
        SquareClass(self.space.reduce(c.bits()))
    }

    /// `T ∪ -T`.
    #[must_use]
    pub fn with_minus_one(&self) -> SubgroupT {
        self.with(self.model.minus_one())
    }

    #[must_use]
    pub fn with(&self, c: SquareClass) -> SubgroupT {
        Self { model: self.model.clone(), space: self.space.with(c.bits()) }
    }

    pub fn sum(&self, other: &SubgroupT) -> Result<SubgroupT> {
        self.same_model(other)?;
        Ok(Self { model: self.model.clone(), space: self.space.sum(&other.space) })
    }

    pub fn intersection(&self, other: &SubgroupT) -> Result<SubgroupT> {
        self.same_model(other)?;
        Ok(Self { model: self.model.clone(), space: self.space.intersection(&other.space) })
    }

    pub fn same_model(&self, other: &SubgroupT) -> Result<()> {
        if Arc::ptr_eq(&self.model, &other.model) || self.model == other.model {
            Ok(())
        } else {
            Err(Error::ModelMismatch)
        }
    }

    pub fn labels(&self) -> Vec<String> {
        self.classes().into_iter().map(|c| self.model.class_label(c)).collect()
    }

    /// `T + aT` as a set of square classes.
    pub fn plus_a(&self, a: SquareClass) -> Result<ClassSet> {
        self.model.check(a)?;
        Ok(self.plus_a_unchecked(a))
    }

    fn plus_a_unchecked(&self, a: SquareClass) -> ClassSet {
        // <s, a t> = s <1, a s t>, so T + aT = T · ⋃_{r in T} D<1, a r>
        let m = &*self.model;
        let t = self.classes();
        let mut values = ClassSet::new();
        for &r in &t {
            values.extend(m.binary_values(SquareClass::ONE, a.mul(r)));
        }
        let mut out = ClassSet::new();
        for &v in &values {
            for &s in &t {
                out.insert(v.mul(s));
            }
        }
        out.extend(t.iter().copied());
        out.extend(t.iter().map(|&s| s.mul(a)));
        out
    }

    /// `S + T` for a union `S` of `T`-cosets.
    fn add_set(&self, s: &ClassSet) -> ClassSet {
        let reps: BTreeSet<SquareClass> = s.iter().map(|&c| self.coset_rep(c)).collect();
        let mut out = s.clone();
        for a in reps {
            out.extend(self.plus_a_unchecked(a));
        }
        out
    }

    /// All finite sums of elements of `T`.
    pub fn sigma(&self) -> ClassSet {
        let mut s = self.class_set();
        loop {
            let next = self.add_set(&s);
            if next == s {
                return s;
            }
            s = next;
        }
    }

    pub fn level(&self) -> Level {
        let m1 = self.model.minus_one();
        let mut s = self.class_set();
        let mut k = 1u32;
        loop {
            if s.contains(&m1) {
                return Level::Finite(k);
            }
            let next = self.add_set(&s);
            if next == s {
                return Level::Infinite;
            }
            s = next;
            k += 1;
        }
    }

    /// `T + aT ⊆ T ∪ aT` for every `a ∉ T ∪ -T`.
    pub fn is_rigid(&self) -> bool {
        let pm = self.with_minus_one();
        self.coset_reps().into_iter().filter(|&a| !pm.contains(a)).all(|a| {
            self.plus_a_unchecked(a)
                .iter()
                .all(|&c| self.contains(c) || self.contains(c.mul(a)))
        })
    }

    /// `-1 ∉ T` and `T + T = T`.
    pub fn is_preordering(&self) -> bool {
        !self.contains(self.model.minus_one())
            && self.plus_a_unchecked(SquareClass::ONE).iter().all(|&c| self.contains(c))
    }

    pub fn classify(&self) -> Result<OrderingClass> {
        if !self.is_proper() {
            return Err(Error::NotProper);
        }
        let level = self.level();
        let rigid = self.is_rigid();
        let preordering = self.is_preordering();
        let codim = self.codim();
        let m1 = self.model.minus_one();
        let tag = if codim == 1 {
            match (preordering, level) {
                (true, _) => OrderingTag::C2,
                (false, Level::Finite(1)) => OrderingTag::C4Level1,
                (false, Level::Finite(2)) => OrderingTag::C4Level2,
                _ => OrderingTag::NonRigidOther,
            }
        } else if rigid {
            let card = (codim - 1) as u32;
            match level {
                Level::Finite(1) => OrderingTag::CI(card),
                Level::Finite(2) => OrderingTag::SI(card),
                Level::Infinite if card == 1 => OrderingTag::DFan2,
                Level::Infinite => OrderingTag::DI(card),
                Level::Finite(_) => OrderingTag::NonRigidOther,
            }
        } else if codim == 2 {
            let sigma = self.sigma();
            let tt = self.plus_a_unchecked(SquareClass::ONE);
            let closed = tt.iter().all(|&c| self.contains(c));
            let pm = self.with_minus_one();
            let tt_is_pm = tt == pm.class_set();
            if !sigma.contains(&m1) && !closed {
                OrderingTag::C2StarC4
            } else if self.contains(m1) || (sigma.contains(&m1) && !tt_is_pm) {
                OrderingTag::C4StarC4
            } else if preordering {
                OrderingTag::DFan2
            } else {
                OrderingTag::NonRigidOther
            }
        } else {
            OrderingTag::NonRigidOther
        };
        Ok(OrderingClass { tag, level, rigid, preordering, index: self.index() })
    }

    /// Whether a C_4-ordering is liftable: some sum of two squares lies outside `T`.
    pub fn is_liftable_c4(&self) -> Result<bool> {
        let class = self.classify()?;
        if !matches!(class.tag, OrderingTag::C4Level1 | OrderingTag::C4Level2) {
            return Err(Error::Precondition(format!("{} is not a C_4-ordering", class.tag)));
        }
        Ok(self.model.sum_of_squares_classes(2)?.iter().any(|&c| !self.contains(c)))
    }
}

impl fmt::Display for SubgroupT {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.labels().join(", "))
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OrderingTag {
    C2,
    C4Level1,
    C4Level2,
    DFan2,
    CI(u32),
    SI(u32),
    DI(u32),
    C2StarC4,
    C4StarC4,
    NonRigidOther,
}

impl fmt::Display for OrderingTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrderingTag::C2 => write!(f, "C2"),
            OrderingTag::C4Level1 => write!(f, "C4_LEVEL1"),
            OrderingTag::C4Level2 => write!(f, "C4_LEVEL2"),
            OrderingTag::DFan2 => write!(f, "D_FAN2"),
            OrderingTag::CI(k) => write!(f, "C_I({k})"),
            OrderingTag::SI(k) => write!(f, "S_I({k})"),
            OrderingTag::DI(k) => write!(f, "D_I({k})"),
            OrderingTag::C2StarC4 => write!(f, "C2_STAR_C4"),
            OrderingTag::C4StarC4 => write!(f, "C4_STAR_C4"),
            OrderingTag::NonRigidOther => write!(f, "NON_RIGID_OTHER"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderingClass {
    pub tag: OrderingTag,
    pub level: Level,
    pub rigid: bool,
    pub preordering: bool,
    pub index: u64,
}

impl fmt::Display for OrderingClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} (index {}, level {}, rigid {})",
            self.tag, self.index, self.level, self.rigid
        )
    }
}

/// All subgroups of the given index (a power of two), optionally only those
/// with a given classification tag.
pub fn enumerate_subgroups(
    model: &Arc<FieldModel>,
    index: u64,
    filter: Option<OrderingTag>,
) -> Result<Vec<SubgroupT>> {
    if model.dim() > MAX_ENUM_DIM {
        return Err(Error::TooLarge(format!(
            "square-class dimension {} exceeds {MAX_ENUM_DIM}",
            model.dim()
        )));
    }
    if !index.is_power_of_two() {
        return Err(Error::Precondition(format!("index {index} is not a power of two")));
    }
    let k = index.trailing_zeros() as usize;
    let mut out = Vec::new();
    for w in F2Subspace::enumerate(model.dim(), k) {
        let t = SubgroupT { model: model.clone(), space: w.annihilator() };
        if let Some(tag) = filter {
            if t.classify()?.tag != tag {
                continue;
            }
        }
        out.push(t);
    }
    out.sort_by(|a, b| a.space.cmp(&b.space));
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum C0Intersection {
    Classes(SubgroupT),
    /// No C(∅)-ordering exists, so `F* = F*^2 ∪ -F*^2` holds instead.
    EmptyFamily,
}

/// Intersection of all index-2 subgroups classified `C4_LEVEL1`.
pub fn intersect_c0(model: &Arc<FieldModel>) -> Result<C0Intersection> {
    let family = enumerate_subgroups(model, 2, Some(OrderingTag::C4Level1))?;
    let mut it = family.into_iter();
    let Some(first) = it.next() else {
        return Ok(C0Intersection::EmptyFamily);
    };
    let mut acc = first;
    for t in it {
        acc = acc.intersection(&t)?;
    }
    Ok(C0Intersection::Classes(acc))
}
