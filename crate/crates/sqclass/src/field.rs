//! Field models presented through their square-class groups.
//!
//! Every model fixes an ordered basis of `F*/F*^2`; a [`SquareClass`] is the
//! coordinate vector on that basis. Quaternion symbols are stored as vectors
//! in a small F_2 space standing in for the 2-torsion of the Brauer group,
//! and the Hilbert symbol is `+1` exactly when that vector vanishes.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{self, hilbert_local, least_nonresidue, split_valuation};
use crate::{Error, Result};

/// An element of `F*/F*^2`; bit `i` is the exponent of basis class `i`.
#[derive(Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct SquareClass(pub u64);

impl SquareClass {
    pub const ONE: SquareClass = SquareClass(0);

    #[inline]
    pub fn bits(self) -> u64 {
        self.0
    }

    #[inline]
    #[must_use]
    pub fn mul(self, other: SquareClass) -> SquareClass {
        SquareClass(self.0 ^ other.0)
    }

    pub fn is_one(self) -> bool {
        self.0 == 0
    }

    pub fn basis(i: usize) -> SquareClass {
        SquareClass(1 << i)
    }
}

impl fmt::Debug for SquareClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:b}]", self.0)
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Place {
    Infinity,
    Prime(u64),
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Infinity => write!(f, "R"),
            Place::Prime(p) => write!(f, "Q_{p}"),
        }
    }
}

/// Least `s` such that `-1` is a sum of `s` elements, or infinite.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Level {
    Finite(u32),
    Infinite,
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Level::Finite(s) => write!(f, "{s}"),
            Level::Infinite => write!(f, "inf"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModelKind {
    FiniteField { q: u64 },
    PAdic { p: u64 },
    Real,
    RationalS { primes: Vec<u64> },
    Tower { base: Box<FieldModel>, var: String },
}

#[derive(Clone, Debug)]
pub struct FieldModel {
    kind: ModelKind,
    labels: Vec<String>,
    // integer representative of each basis class, when one exists
    reps: Vec<Option<BigInt>>,
    minus_one: SquareClass,
    places: Vec<Place>,
    sym_dim: usize,
    sym_table: Vec<Vec<u64>>,
    // tower variables, innermost first
    vars: Vec<String>,
}

impl PartialEq for FieldModel {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

impl Eq for FieldModel {}

impl FieldModel {
    pub fn finite_field(q: u64) -> Result<Self> {
        let (p, k) = arith::prime_power(q)
            .ok_or_else(|| Error::InvalidModel(format!("{q} is not a prime power")))?;
        let (labels, reps) = if p == 2 {
            (vec![], vec![])
        } else if k % 2 == 1 {
            let n = least_nonresidue(p);
            (vec![n.to_string()], vec![Some(BigInt::from(n))])
        } else {
            (vec!["u".to_string()], vec![None])
        };
        let minus_one =
            if p == 2 || q % 4 == 1 { SquareClass::ONE } else { SquareClass::basis(0) };
        let dim = labels.len();
        Ok(Self {
            kind: ModelKind::FiniteField { q },
            labels,
            reps,
            minus_one,
            places: vec![],
            sym_dim: 0,
            sym_table: vec![vec![0; dim]; dim],
            vars: vec![],
        })
    }

    pub fn padic(p: u64) -> Result<Self> {
        if !arith::is_prime(p) {
            return Err(Error::InvalidModel(format!("{p} is not prime")));
        }
        let reps: Vec<BigInt> = if p == 2 {
            vec![BigInt::from(-1), BigInt::from(2), BigInt::from(5)]
        } else {
            vec![BigInt::from(least_nonresidue(p)), BigInt::from(p)]
        };
        let place = Place::Prime(p);
        let table = reps
            .iter()
            .map(|a| reps.iter().map(|b| u64::from(hilbert_local(a, b, place) == -1)).collect())
            .collect();
        let mut m = Self {
            kind: ModelKind::PAdic { p },
            labels: reps.iter().map(ToString::to_string).collect(),
            reps: reps.into_iter().map(Some).collect(),
            minus_one: SquareClass::ONE,
            places: vec![],
            sym_dim: 1,
            sym_table: table,
            vars: vec![],
        };
        m.minus_one = m.class_of_integer(&BigInt::from(-1))?;
        Ok(m)
    }

    pub fn real() -> Self {
        Self {
            kind: ModelKind::Real,
            labels: vec!["-1".into()],
            reps: vec![Some(BigInt::from(-1))],
            minus_one: SquareClass::basis(0),
            places: vec![],
            sym_dim: 1,
            sym_table: vec![vec![1]],
            vars: vec![],
        }
    }

    /// The S-supported rationals: classes generated by `-1` and the primes of `S`.
    pub fn rational_s(primes: &[u64]) -> Result<Self> {
        let mut s: Vec<u64> = primes.to_vec();
        s.sort_unstable();
        s.dedup();
        if s.len() != primes.len() {
            return Err(Error::InvalidModel("repeated prime in S".into()));
        }
        if let Some(&bad) = s.iter().find(|&&p| !arith::is_prime(p)) {
            return Err(Error::InvalidModel(format!("{bad} is not prime")));
        }
        if s.len() + 1 > 64 {
            return Err(Error::TooWide { cols: s.len() + 1 });
        }
        let mut reps = vec![BigInt::from(-1)];
        reps.extend(s.iter().map(|&p| BigInt::from(p)));
        let mut places = vec![Place::Infinity, Place::Prime(2)];
        places.extend(s.iter().filter(|&&p| p != 2).map(|&p| Place::Prime(p)));
        let table = reps
            .iter()
            .map(|a| {
                reps.iter()
                    .map(|b| {
                        places.iter().enumerate().fold(0u64, |acc, (k, &pl)| {
                            if hilbert_local(a, b, pl) == -1 {
                                acc | 1 << k
                            } else {
                                acc
                            }
                        })
                    })
                    .collect()
            })
            .collect();
        Ok(Self {
            kind: ModelKind::RationalS { primes: s },
            labels: reps.iter().map(ToString::to_string).collect(),
            reps: reps.into_iter().map(Some).collect(),
            minus_one: SquareClass::basis(0),
            sym_dim: places.len(),
            places,
            sym_table: table,
            vars: vec![],
        })
    }

    /// The Laurent series field `base((var))`.
    pub fn tower(base: FieldModel, var: &str) -> Result<Self> {
        if var.is_empty() || !var.chars().all(|c| c.is_ascii_alphabetic()) {
            return Err(Error::InvalidModel(format!("bad variable name {var:?}")));
        }
        if base.vars.iter().any(|v| v == var) || base.labels.iter().any(|l| l == var) {
            return Err(Error::InvalidModel(format!("variable {var} already in use")));
        }
        if base.residue_characteristic_two() {
            return Err(Error::InvalidModel("base field has characteristic 2".into()));
        }
        let bd = base.dim();
        if bd + 1 > 64 || base.sym_dim + bd > 64 {
            return Err(Error::TooWide { cols: base.sym_dim + bd });
        }
        let mut labels = base.labels.clone();
        labels.push(var.to_string());
        let mut reps = base.reps.clone();
        reps.push(None);
        let mut vars = base.vars.clone();
        vars.push(var.to_string());
        let mut m = Self {
            kind: ModelKind::Tower { base: Box::new(base), var: var.to_string() },
            labels,
            reps,
            minus_one: SquareClass::ONE,
            places: vec![],
            sym_dim: 0,
            sym_table: vec![],
            vars,
        };
        let ModelKind::Tower { base, .. } = &m.kind else { unreachable!() };
        m.minus_one = base.minus_one;
        m.sym_dim = base.sym_dim + bd;
        let n = bd + 1;
        m.sym_table = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| tower_symbol(base, SquareClass::basis(i), SquareClass::basis(j)))
                    .collect()
            })
            .collect();
        Ok(m)
    }

    fn residue_characteristic_two(&self) -> bool {
        matches!(self.kind, ModelKind::FiniteField { q } if q % 2 == 0)
    }

    /// Parses `Fq:<q>`, `Qp:<p>`, `R`, `QS:<p1,p2,...>` or `Tower(<base>;<var>)`.
    pub fn parse(desc: &str) -> Result<Self> {
        let d = desc.trim();
        let num = |s: &str| -> Result<u64> {
            s.trim().parse::<u64>().map_err(|_| Error::Parse(format!("bad number {s:?}")))
        };
        if d == "R" {
            return Ok(Self::real());
        }
        if let Some(rest) = d.strip_prefix("Fq:") {
            return Self::finite_field(num(rest)?);
        }
        if let Some(rest) = d.strip_prefix("Qp:") {
            return Self::padic(num(rest)?);
        }
        if let Some(rest) = d.strip_prefix("QS:") {
            let primes = if rest.trim().is_empty() {
                vec![]
            } else {
                rest.split(',').map(num).collect::<Result<Vec<_>>>()?
            };
            return Self::rational_s(&primes);
        }
        if let Some(inner) = d.strip_prefix("Tower(").and_then(|r| r.strip_suffix(')')) {
            let split = inner
                .rfind(';')
                .ok_or_else(|| Error::Parse(format!("missing ';' in {desc:?}")))?;
            let base = Self::parse(&inner[..split])?;
            return Self::tower(base, inner[split + 1..].trim());
        }
        Err(Error::Parse(format!("unknown model descriptor {desc:?}")))
    }

    pub fn descriptor(&self) -> String {
        match &self.kind {
            ModelKind::FiniteField { q } => format!("Fq:{q}"),
            ModelKind::PAdic { p } => format!("Qp:{p}"),
            ModelKind::Real => "R".into(),
            ModelKind::RationalS { primes } => {
                let ps: Vec<String> = primes.iter().map(ToString::to_string).collect();
                format!("QS:{}", ps.join(","))
            }
            ModelKind::Tower { base, var } => format!("Tower({};{var})", base.descriptor()),
        }
    }

    /// Conventional name, e.g. `Q_2` or `R((X))((Y))`.
    pub fn name(&self) -> String {
        match &self.kind {
            ModelKind::FiniteField { q } => format!("F_{q}"),
            ModelKind::PAdic { p } => format!("Q_{p}"),
            ModelKind::Real => "R".into(),
            ModelKind::RationalS { primes } => {
                let ps: Vec<String> = primes.iter().map(ToString::to_string).collect();
                format!("Q[S={{{}}}]", ps.join(","))
            }
            ModelKind::Tower { base, var } => format!("{}(({var}))", base.name()),
        }
    }

    pub fn kind(&self) -> &ModelKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Integer representative of basis class `i`, if it has one.
    pub fn basis_rep(&self, i: usize) -> Option<&BigInt> {
        self.reps.get(i).and_then(Option::as_ref)
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn is_formally_real(&self) -> bool {
        match &self.kind {
            ModelKind::Real | ModelKind::RationalS { .. } => true,
            ModelKind::Tower { base, .. } => base.is_formally_real(),
            _ => false,
        }
    }

    /// Places carrying the local symbols of an S-supported rational model.
    pub fn places(&self) -> &[Place] {
        &self.places
    }

    pub fn symbol_dim(&self) -> usize {
        self.sym_dim
    }

    pub fn minus_one(&self) -> SquareClass {
        self.minus_one
    }

    pub fn num_classes(&self) -> u64 {
        1u64 << self.dim()
    }

    pub fn all_classes(&self) -> Vec<SquareClass> {
        (0..self.num_classes()).map(SquareClass).collect()
    }

    pub fn check(&self, c: SquareClass) -> Result<SquareClass> {
        if self.dim() < 64 && c.0 >> self.dim() != 0 {
            return Err(Error::ClassOutOfRange(c.0));
        }
        Ok(c)
    }

    // ---- symbols -------------------------------------------------------

    /// Quaternion symbol `(a, b)` as a vector in the model's symbol space.
    pub fn symbol(&self, a: SquareClass, b: SquareClass) -> u64 {
        let mut out = 0;
        let mut x = a.0;
        while x != 0 {
            let i = x.trailing_zeros() as usize;
            x &= x - 1;
            let row = &self.sym_table[i];
            let mut y = b.0;
            while y != 0 {
                let j = y.trailing_zeros() as usize;
                y &= y - 1;
                out ^= row[j];
            }
        }
        out
    }

    /// `+1` when the quaternion algebra `(a, b)` splits, `-1` otherwise.
    pub fn hilbert_symbol(&self, a: SquareClass, b: SquareClass) -> Result<i8> {
        self.check(a)?;
        self.check(b)?;
        Ok(if self.symbol(a, b) == 0 { 1 } else { -1 })
    }

    /// Local symbols at each place of an S-supported rational model.
    pub fn local_symbols(&self, a: SquareClass, b: SquareClass) -> Result<Vec<(Place, i8)>> {
        self.check(a)?;
        self.check(b)?;
        let s = self.symbol(a, b);
        Ok(self
            .places
            .iter()
            .enumerate()
            .map(|(k, &pl)| (pl, if s >> k & 1 == 1 { -1 } else { 1 }))
            .collect())
    }

    /// Whether `<a, b>` represents an element of class `c`, i.e. whether
    /// `<a, b, -c>` is isotropic, i.e. whether `(ac, bc)` splits.
    #[inline]
    pub(crate) fn represents(&self, c: SquareClass, a: SquareClass, b: SquareClass) -> bool {
        self.symbol(a.mul(c), b.mul(c)) == 0
    }

    pub fn represents_binary(&self, c: SquareClass, a: SquareClass, b: SquareClass) -> Result<bool> {
        self.check(a)?;
        self.check(b)?;
        self.check(c)?;
        Ok(self.represents(c, a, b))
    }

    /// Classes represented by `<a, b>`.
    pub fn binary_values(&self, a: SquareClass, b: SquareClass) -> Vec<SquareClass> {
        (0..self.num_classes())
            .map(SquareClass)
            .filter(|&c| self.represents(c, a, b))
            .collect()
    }

    /// Classes represented by the `k`-fold form `<1, ..., 1>`.
    pub fn sum_of_squares_classes(&self, k: u32) -> Result<BTreeSet<SquareClass>> {
        if k == 0 {
            return Err(Error::Precondition("k must be at least 1".into()));
        }
        let mut set = BTreeSet::from([SquareClass::ONE]);
        for _ in 1..k {
            let next: BTreeSet<SquareClass> = set
                .iter()
                .flat_map(|&s| self.binary_values(SquareClass::ONE, s))
                .chain(set.iter().copied())
                .collect();
            if next == set {
                break;
            }
            set = next;
        }
        Ok(set)
    }

    pub fn level(&self) -> Level {
        let mut set = BTreeSet::from([SquareClass::ONE]);
        let mut s = 1u32;
        loop {
            if set.contains(&self.minus_one) {
                return Level::Finite(s);
            }
            let next: BTreeSet<SquareClass> = set
                .iter()
                .flat_map(|&x| self.binary_values(SquareClass::ONE, x))
                .chain(set.iter().copied())
                .collect();
            if next == set {
                return Level::Infinite;
            }
            set = next;
            s += 1;
        }
    }

    // ---- elements and labels -------------------------------------------

    /// Square class of a nonzero integer in a model without variables.
    pub fn class_of_integer(&self, n: &BigInt) -> Result<SquareClass> {
        self.class_of_rational(&BigRational::from_integer(n.clone()))
    }

    pub fn class_of_rational(&self, r: &BigRational) -> Result<SquareClass> {
        if r.is_zero() {
            return Err(Error::ZeroElement);
        }
        // a/b and ab lie in the same square class
        let n = r.numer() * r.denom();
        match &self.kind {
            ModelKind::FiniteField { q } => {
                let (p, k) = arith::prime_power(*q).expect("validated at construction");
                let pb = BigInt::from(p);
                if (r.numer() % &pb).is_zero() {
                    return Err(Error::ZeroElement);
                }
                if (r.denom() % &pb).is_zero() {
                    return Err(Error::Parse(format!("{r} has no image in F_{q}")));
                }
                if p == 2 || k % 2 == 0 {
                    return Ok(SquareClass::ONE);
                }
                Ok(SquareClass(u64::from(arith::legendre(&n, p) == -1)))
            }
            ModelKind::PAdic { p: 2 } => {
                let (v, u) = split_valuation(&n, 2);
                let u8 = (u % BigInt::from(8) + BigInt::from(8)) % BigInt::from(8);
                let unit = match u8.to_u64().expect("small") {
                    1 => 0b000,
                    5 => 0b100,
                    7 => 0b001,
                    3 => 0b101,
                    _ => unreachable!("odd residue"),
                };
                Ok(SquareClass(unit | u64::from(v % 2) << 1))
            }
            ModelKind::PAdic { p } => {
                let (v, u) = split_valuation(&n, *p);
                Ok(SquareClass(u64::from(arith::legendre(&u, *p) == -1) | u64::from(v % 2) << 1))
            }
            ModelKind::Real => Ok(SquareClass(u64::from(n.is_negative()))),
            ModelKind::RationalS { primes } => {
                let mut bits = u64::from(n.is_negative());
                let mut rest = n.abs();
                for (i, &p) in primes.iter().enumerate() {
                    let (v, u) = split_valuation(&rest, p);
                    rest = u;
                    bits |= u64::from(v % 2) << (i + 1);
                }
                if !rest.is_one() {
                    return Err(Error::OutsideSupport(r.to_string()));
                }
                Ok(SquareClass(bits))
            }
            ModelKind::Tower { base, .. } => Ok(base.class_of_rational(r)?),
        }
    }

    /// Square class of a symbolic element (a Laurent polynomial in the tower
    /// variables): the class of its lowest-order term, read variable by
    /// variable from the outermost one.
    pub fn square_class(&self, e: &Element) -> Result<SquareClass> {
        if e.terms.is_empty() {
            return Err(Error::ZeroElement);
        }
        if e.nvars != self.vars.len() {
            return Err(Error::ModelMismatch);
        }
        match &self.kind {
            ModelKind::Tower { base, .. } => {
                let k = self.vars.len() - 1;
                let low = e.terms.keys().map(|x| x[k]).min().expect("nonempty");
                let mut sub = Element { nvars: k, terms: BTreeMap::new() };
                for (exps, c) in &e.terms {
                    if exps[k] == low {
                        sub.terms.insert(exps[..k].to_vec(), c.clone());
                    }
                }
                let inner = base.square_class(&sub)?;
                Ok(SquareClass(inner.0 | (low.rem_euclid(2) as u64) << base.dim()))
            }
            _ => {
                let c = e.terms.get(&vec![0; e.nvars]).ok_or(Error::ZeroElement)?;
                self.class_of_rational(c)
            }
        }
    }

    pub fn parse_element(&self, s: &str) -> Result<Element> {
        Element::parse(s, &self.vars)
    }

    /// Resolves a class label (`-10`, `u`, `-X`, ...) or any element
    /// expression to its square class.
    pub fn parse_class(&self, s: &str) -> Result<SquareClass> {
        let t = s.trim().replace('\u{2212}', "-");
        if let Some(c) = self.all_classes().into_iter().find(|&c| self.class_label(c) == t) {
            return Ok(c);
        }
        self.square_class(&self.parse_element(&t)?)
    }

    /// Human-readable name of a class, built from the basis labels.
    pub fn class_label(&self, c: SquareClass) -> String {
        if let ModelKind::Tower { base, var } = &self.kind {
            let bd = base.dim();
            let inner = base.class_label(SquareClass(c.0 & ((1u64 << bd) - 1)));
            if c.0 >> bd & 1 == 0 {
                return inner;
            }
            return match inner.as_str() {
                "1" => var.clone(),
                "-1" => format!("-{var}"),
                _ => format!("{inner}{var}"),
            };
        }
        if self.reps.iter().all(Option::is_some) {
            let mut prod = BigInt::one();
            for (i, r) in self.reps.iter().enumerate() {
                if c.0 >> i & 1 == 1 {
                    prod *= r.as_ref().expect("checked");
                }
            }
            return prod.to_string();
        }
        let parts: Vec<&str> = (0..self.dim())
            .filter(|&i| c.0 >> i & 1 == 1)
            .map(|i| self.labels[i].as_str())
            .collect();
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("*")
        }
    }
}

fn tower_symbol(base: &FieldModel, a: SquareClass, b: SquareClass) -> u64 {
    // (u t^alpha, v t^beta) = (u, v) + [t-part], the t-part recorded as the
    // class beta*u + alpha*v + alpha*beta*(-1) in the residue square classes
    let bd = base.dim();
    let low = (1u64 << bd) - 1;
    let (u, alpha) = (SquareClass(a.0 & low), a.0 >> bd & 1 == 1);
    let (v, beta) = (SquareClass(b.0 & low), b.0 >> bd & 1 == 1);
    let mut res = 0u64;
    if beta {
        res ^= u.0;
    }
    if alpha {
        res ^= v.0;
    }
    if alpha && beta {
        res ^= base.minus_one.0;
    }
    base.symbol(u, v) | res << base.sym_dim
}

/// A Laurent polynomial with rational coefficients in the tower variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Element {
    nvars: usize,
    terms: BTreeMap<Vec<i64>, BigRational>,
}

impl Element {
    pub fn constant(nvars: usize, c: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(vec![0; nvars], c);
        }
        Self { nvars, terms }
    }

    pub fn integer(nvars: usize, n: i64) -> Self {
        Self::constant(nvars, BigRational::from_integer(BigInt::from(n)))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, exps: Vec<i64>, c: BigRational) {
        let entry = self.terms.entry(exps).or_insert_with(BigRational::zero);
        *entry += c;
        self.terms.retain(|_, v| !v.is_zero());
    }

    /// Grammar: signed sums of terms; a term is a product of rationals
    /// `a` or `a/b` and variables with optional `^n` exponents. Products may
    /// be written with `*` or by juxtaposition (`-3X^2Y`).
    pub fn parse(s: &str, vars: &[String]) -> Result<Self> {
        let chars: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
        if chars.is_empty() {
            return Err(Error::Parse("empty element".into()));
        }
        let nvars = vars.len();
        let mut out = Element { nvars, terms: BTreeMap::new() };
        let mut i = 0;
        let bad = |msg: &str| Error::Parse(format!("{msg} in {s:?}"));
        while i < chars.len() {
            let mut sign = 1i64;
            while i < chars.len() && (chars[i] == '+' || chars[i] == '-') {
                if chars[i] == '-' {
                    sign = -sign;
                }
                i += 1;
            }
            let mut coef = BigRational::from_integer(BigInt::from(sign));
            let mut exps = vec![0i64; nvars];
            let mut factors = 0;
            while i < chars.len() && chars[i] != '+' && chars[i] != '-' {
                if chars[i] == '*' {
                    i += 1;
                    continue;
                }
                if chars[i].is_ascii_digit() {
                    let (n, j) = read_int(&chars, i);
                    i = j;
                    let mut val = BigRational::from_integer(n);
                    if i < chars.len() && chars[i] == '/' {
                        if i + 1 >= chars.len() || !chars[i + 1].is_ascii_digit() {
                            return Err(bad("bad denominator"));
                        }
                        let (d, j) = read_int(&chars, i + 1);
                        i = j;
                        if d.is_zero() {
                            return Err(bad("zero denominator"));
                        }
                        val /= BigRational::from_integer(d);
                    }
                    coef *= val;
                } else if chars[i].is_ascii_alphabetic() {
                    let rest: String = chars[i..].iter().collect();
                    let (vi, len) = vars
                        .iter()
                        .enumerate()
                        .filter(|(_, v)| rest.starts_with(v.as_str()))
                        .map(|(k, v)| (k, v.chars().count()))
                        .max_by_key(|&(_, l)| l)
                        .ok_or_else(|| bad("unknown symbol"))?;
                    i += len;
                    let mut e = 1i64;
                    if i < chars.len() && chars[i] == '^' {
                        i += 1;
                        let neg = i < chars.len() && chars[i] == '-';
                        if neg {
                            i += 1;
                        }
                        if i >= chars.len() || !chars[i].is_ascii_digit() {
                            return Err(bad("bad exponent"));
                        }
                        let (n, j) = read_int(&chars, i);
                        i = j;
                        e = n.to_i64().ok_or_else(|| bad("exponent too large"))?;
                        if neg {
                            e = -e;
                        }
                    }
                    exps[vi] += e;
                } else {
                    return Err(bad("unexpected character"));
                }
                factors += 1;
            }
            if factors == 0 {
                return Err(bad("dangling sign"));
            }
            out.add_term(exps, coef);
        }
        Ok(out)
    }
}

fn read_int(chars: &[char], mut i: usize) -> (BigInt, usize) {
    let start = i;
    while i < chars.len() && chars[i].is_ascii_digit() {
        i += 1;
    }
    let s: String = chars[start..i].iter().collect();
    (s.parse().expect("digits"), i)
}
