//! Elementary arithmetic over Z and the completions of Q.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::field::Place;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// `q = p^k` with `p` prime, or `None`.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q.is_multiple_of(*d))?;
    let (mut r, mut k) = (q, 0u32);
    while r % p == 0 {
        r /= p;
        k += 1;
    }
    (r == 1).then_some((p, k))
}

/// Splits `a = p^v * u` with `p` not dividing `u`. `a` must be nonzero.
pub fn split_valuation(a: &BigInt, p: u64) -> (u32, BigInt) {
    debug_assert!(!a.is_zero());
    let pb = BigInt::from(p);
    let mut u = a.clone();
    let mut v = 0;
    loop {
        let (q, r) = u.div_rem(&pb);
        if !r.is_zero() {
            break;
        }
        u = q;
        v += 1;
    }
    (v, u)
}

/// Legendre symbol `(a/p)` for an odd prime `p`; 0 when `p | a`.
pub fn legendre(a: &BigInt, p: u64) -> i8 {
    let pb = BigInt::from(p);
    let r = a.mod_floor(&pb);
    if r.is_zero() {
        return 0;
    }
    let e = BigInt::from((p - 1) / 2);
    if r.modpow(&e, &pb).is_one() {
        1
    } else {
        -1
    }
}

pub fn least_nonresidue(p: u64) -> u64 {
    (2..p).find(|&n| legendre(&BigInt::from(n), p) == -1).expect("odd prime has a nonresidue")
}

fn mod8(u: &BigInt) -> u64 {
    u.mod_floor(&BigInt::from(8)).to_u64().expect("residue mod 8")
}

/// Local Hilbert symbol `(a, b)_v` of two nonzero integers.
pub fn hilbert_local(a: &BigInt, b: &BigInt, place: Place) -> i8 {
    match place {
        Place::Infinity => {
            if a.is_negative() && b.is_negative() {
                -1
            } else {
                1
            }
        }
        Place::Prime(2) => {
            let (alpha, u) = split_valuation(a, 2);
            let (beta, v) = split_valuation(b, 2);
            let (u, v) = (mod8(&u), mod8(&v));
            let eps = |x: u64| ((x - 1) / 2) & 1;
            let omega = |x: u64| ((x * x - 1) / 8) & 1;
            let e = eps(u) * eps(v) + u64::from(alpha) * omega(v) + u64::from(beta) * omega(u);
            if e % 2 == 0 {
                1
            } else {
                -1
            }
        }
        Place::Prime(p) => {
            let (alpha, u) = split_valuation(a, p);
            let (beta, v) = split_valuation(b, p);
            let eps = ((p - 1) / 2) & 1;
            let mut s: i8 =
                if (u64::from(alpha) * u64::from(beta) * eps) % 2 == 1 { -1 } else { 1 };
            if beta % 2 == 1 {
                s *= legendre(&u, p);
            }
            if alpha % 2 == 1 {
                s *= legendre(&v, p);
            }
            s
        }
    }
}

/// Whether a nonzero integer is a square in the completion at `place`.
pub fn is_local_square(a: &BigInt, place: Place) -> bool {
    match place {
        Place::Infinity => a.is_positive(),
        Place::Prime(2) => {
            let (v, u) = split_valuation(a, 2);
            v % 2 == 0 && mod8(&u) == 1
        }
        Place::Prime(p) => {
            let (v, u) = split_valuation(a, p);
            v % 2 == 0 && legendre(&u, p) == 1
        }
    }
}

/// Odd prime divisors of a nonzero integer, ascending.
pub fn odd_prime_divisors(a: &BigInt) -> Vec<u64> {
    let mut n = a.abs();
    let mut out = Vec::new();
    while n.is_even() && !n.is_zero() {
        n /= 2;
    }
    let mut d = 3u64;
    while BigInt::from(d) * BigInt::from(d) <= n {
        let db = BigInt::from(d);
        if (&n % &db).is_zero() {
            out.push(d);
            while (&n % &db).is_zero() {
                n /= &db;
            }
        }
        d += 2;
    }
    if n > BigInt::one() {
        out.push(n.to_u64().expect("prime factor fits in u64"));
    }
    out
}
