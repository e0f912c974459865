//! Diagonal quadratic forms over Q: local isotropy, Hasse-Minkowski and the
//! orderings of Q attached to odd primes.
//!
//! Local isotropy uses the discriminant `d = a_1 ... a_n` and the Hasse
//! invariant `ε = Π_{i<j} (a_i, a_j)_v`.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{hilbert_local, is_local_square, is_prime, odd_prime_divisors};
use crate::f2::F2Matrix;
use crate::field::{FieldModel, ModelKind, Place, SquareClass};
use crate::ordering::{OrderingClass, SubgroupT};
use crate::{Error, Result};

pub const MAX_HEIGHT_BOUND: u64 = 10_000;

/// `<a_1, ..., a_n>` with squarefree integer entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QForm {
    entries: Vec<BigInt>,
}

impl QForm {
    /// Builds a form, replacing each entry by its squarefree part.
    pub fn new(entries: &[BigInt]) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Precondition("a form needs at least one entry".into()));
        }
        let entries = entries.iter().map(squarefree_part).collect::<Result<Vec<_>>>()?;
        Ok(Self { entries })
    }

    pub fn from_ints(entries: &[i64]) -> Result<Self> {
        Self::new(&entries.iter().map(|&a| BigInt::from(a)).collect::<Vec<_>>())
    }

    pub fn parse(items: &[&str]) -> Result<Self> {
        let entries = items
            .iter()
            .map(|s| {
                s.trim()
                    .replace('\u{2212}', "-")
                    .parse::<BigInt>()
                    .map_err(|_| Error::Parse(format!("not an integer: {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(&entries)
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn discriminant(&self) -> BigInt {
        self.entries.iter().product()
    }

    /// `Π_{i<j} (a_i, a_j)_v`.
    pub fn hasse_invariant(&self, place: Place) -> i8 {
        let mut e = 1;
        for (i, a) in self.entries.iter().enumerate() {
            for b in &self.entries[i + 1..] {
                e *= hilbert_local(a, b, place);
            }
        }
        e
    }

    /// `∞`, `2` and the odd primes dividing some entry.
    pub fn relevant_places(&self) -> Vec<Place> {
        let mut primes: Vec<u64> =
            self.entries.iter().flat_map(odd_prime_divisors).collect();
        primes.sort_unstable();
        primes.dedup();
        let mut out = vec![Place::Infinity, Place::Prime(2)];
        out.extend(primes.into_iter().map(Place::Prime));
        out
    }

    /// Indefinite over R.
    pub fn is_indefinite(&self) -> bool {
        self.entries.iter().any(Signed::is_positive) && self.entries.iter().any(Signed::is_negative)
    }

    pub fn local_isotropic(&self, place: Place) -> bool {
        let d = self.discriminant();
        match self.dim() {
            1 => false,
            2 => is_local_square(&-d, place),
            3 => hilbert_local(&BigInt::from(-1), &-d, place) == self.hasse_invariant(place),
            4 => {
                !is_local_square(&d, place)
                    || self.hasse_invariant(place) == hilbert_local(&(-1).into(), &(-1).into(), place)
            }
            _ => match place {
                Place::Infinity => self.is_indefinite(),
                Place::Prime(_) => true,
            },
        }
    }

    pub fn hasse_minkowski(&self) -> Verdict {
        let local: Vec<(Place, bool)> =
            self.relevant_places().into_iter().map(|v| (v, self.local_isotropic(v))).collect();
        let failures: Vec<Place> = local.iter().filter(|(_, ok)| !ok).map(|&(v, _)| v).collect();
        Verdict { isotropic: failures.is_empty(), failures, local }
    }

    /// For a ternary form, whether the number of anisotropic places is even.
    pub fn reciprocity_audit(&self) -> Result<bool> {
        if self.dim() != 3 {
            return Err(Error::Precondition(format!("form has dimension {}, expected 3", self.dim())));
        }
        Ok(self.hasse_minkowski().failures.len().is_multiple_of(2))
    }

    /// A primitive integer zero whose coordinates are bounded by
    /// `height_bound`, searched by increasing height.
    pub fn rational_point_oracle(&self, height_bound: u64) -> Result<Option<Vec<i64>>> {
        if height_bound > MAX_HEIGHT_BOUND {
            return Err(Error::TooLarge(format!("height bound {height_bound} exceeds {MAX_HEIGHT_BOUND}")));
        }
        let a: Vec<i128> = self
            .entries
            .iter()
            .map(|x| x.to_i128().ok_or_else(|| Error::TooLarge(format!("entry {x}"))))
            .collect::<Result<_>>()?;
        let n = a.len();
        if n == 1 {
            return Ok(None);
        }
        let last = a[n - 1];
        let mut x = vec![0i64; n - 1];
        for h in 0..=height_bound as i64 {
            // vectors of the first n-1 coordinates in [0, h] with maximum exactly h
            x.iter_mut().for_each(|v| *v = 0);
            loop {
                if x.iter().copied().max() == Some(h) {
                    let s: i128 = x.iter().zip(&a).map(|(&v, &c)| c * i128::from(v) * i128::from(v)).sum();
                    if -s % last == 0 {
                        let y = -s / last;
                        if y >= 0 {
                            let r = (y as u128).sqrt();
                            if r * r == y as u128 && r <= u128::from(height_bound) {
                                let mut w: Vec<i64> = x.clone();
                                w.push(r as i64);
                                if w.iter().any(|&v| v != 0) {
                                    let g = w.iter().fold(0i64, |g, &v| g.gcd(&v));
                                    return Ok(Some(w.into_iter().map(|v| v / g).collect()));
                                }
                            }
                        }
                    }
                }
                // odometer over [0, h]^(n-1)
                let mut k = 0;
                while k < x.len() && x[k] == h {
                    x[k] = 0;
                    k += 1;
                }
                if k == x.len() {
                    break;
                }
                x[k] += 1;
            }
        }
        Ok(None)
    }
}

impl fmt::Display for QForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let e: Vec<String> = self.entries.iter().map(ToString::to_string).collect();
        write!(f, "<{}>", e.join(", "))
    }
}

fn squarefree_part(a: &BigInt) -> Result<BigInt> {
    if a.is_zero() {
        return Err(Error::ZeroElement);
    }
    let sign = if a.is_negative() { -1 } else { 1 };
    let mut n = a.abs();
    let mut out = BigInt::one();
    let mut d = BigInt::from(2);
    while &d * &d <= n {
        let mut e = 0;
        while (&n % &d).is_zero() {
            n /= &d;
            e += 1;
        }
        if e % 2 == 1 {
            out *= &d;
        }
        d += 1;
    }
    Ok(out * n * sign)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub isotropic: bool,
    /// Places where the form is anisotropic.
    pub failures: Vec<Place>,
    pub local: Vec<(Place, bool)>,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.isotropic {
            write!(f, "isotropic")
        } else {
            let places: Vec<String> = self.failures.iter().map(ToString::to_string).collect();
            write!(f, "anisotropic; local failures: {}", places.join(", "))
        }
    }
}

/// `T_p`: the classes of `Q(S)` that are squares in `Q_p`, with its
/// classification. Requires `p` odd and `p, 2 ∈ S`.
pub fn ordering_for_prime(p: u64, primes: &[u64]) -> Result<(SubgroupT, OrderingClass)> {
    let model = Arc::new(FieldModel::rational_s(primes)?);
    ordering_for_prime_in(&model, p)
}

pub fn ordering_for_prime_in(model: &Arc<FieldModel>, p: u64) -> Result<(SubgroupT, OrderingClass)> {
    let ModelKind::RationalS { primes } = model.kind() else {
        return Err(Error::InvalidModel(format!("{} is not a model of Q", model.name())));
    };
    if p == 2 || !is_prime(p) {
        return Err(Error::Precondition(format!("{p} is not an odd prime")));
    }
    if !primes.contains(&p) {
        return Err(Error::OutsideSupport(format!("{p} is not in S")));
    }
    if !primes.contains(&2) {
        return Err(Error::Precondition("S must contain 2".into()));
    }
    let qp = FieldModel::padic(p)?;
    let n = model.dim();
    let images: Vec<SquareClass> = (0..n)
        .map(|i| qp.class_of_integer(model.basis_rep(i).expect("rational basis has integers")))
        .collect::<Result<_>>()?;
    let rows: Vec<u64> = (0..qp.dim())
        .map(|k| (0..n).filter(|&i| (images[i].bits() >> k) & 1 == 1).fold(0u64, |r, i| r | 1 << i))
        .collect();
    let kernel = F2Matrix::new(n, rows)?.kernel();
    let t = SubgroupT::new(model.clone(), kernel)?;
    let class = t.classify()?;
    Ok((t, class))
}
