//! Exact arithmetic and enumeration for prime fields `F_p` and extensions `F_{p^n}`.
//!
//! Elements are stored as their canonical encode value: `encode(e) = Σ coeffs[i]·p^i`
//! over the polynomial basis, a bijection `F_q ↔ {0..q−1}` used for every
//! deterministic ordering in the crate. The modulus is canonical (first
//! irreducible monic polynomial in encode order), so two constructions of
//! `F_{p^n}` are always the same field and caches stay portable.

use crate::{Error, Result};
use std::sync::OnceLock;

/// Default cap on field size; protects census memory budgets.
pub const DEFAULT_FIELD_CAP: u64 = 1 << 16;

/// Fields at most this large get dense multiplication/inverse tables.
const TABLE_CAP: u64 = 1 << 10;

/// A field element, stored as its encode value in `0..q`.
///
/// The element does not carry its field; it is interpreted under the
/// [`FieldSpec`] passed to each operation. The canonical modulus makes
/// `(p, n)` determine the field, so equality of encodes is equality of
/// elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Fe(pub u32);

impl Fe {
    pub const ZERO: Fe = Fe(0);
    pub const ONE: Fe = Fe(1);

    #[inline]
    pub fn encode(self) -> u64 {
        self.0 as u64
    }
}

struct Tables {
    mul: Vec<u32>,
    add: Vec<u32>,
    inv: Vec<u32>,
    neg: Vec<u32>,
}

/// Arithmetic in `F_{p^n}` with the canonical irreducible modulus.
pub struct FieldSpec {
    p: u64,
    n: u32,
    q: u64,
    /// Monic modulus, length n+1, coefficients in `0..p`; equals `x` for n=1.
    modulus: Vec<u64>,
    tables: OnceLock<Tables>,
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.n == other.n
    }
}
impl Eq for FieldSpec {}

impl std::fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "FieldSpec({})", self.id_string())
    }
}

impl FieldSpec {
    /// Builds `F_{p^n}` under the default size cap.
    pub fn new(p: u64, n: u32) -> Result<FieldSpec> {
        FieldSpec::with_cap(p, n, DEFAULT_FIELD_CAP)
    }

    /// Builds `F_{p^n}` with an explicit size cap.
    pub fn with_cap(p: u64, n: u32, cap: u64) -> Result<FieldSpec> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if n == 0 {
            return Err(Error::InvalidInput("extension degree must be ≥ 1".into()));
        }
        let mut q: u128 = 1;
        for _ in 0..n {
            q *= p as u128;
            if q > cap as u128 {
                return Err(Error::FieldCapExceeded { q, cap });
            }
        }
        let q = q as u64;
        let modulus = canonical_modulus(p, n);
        debug_assert!(poly_is_irreducible(&modulus, p));
        Ok(FieldSpec {
            p,
            n,
            q,
            modulus,
            tables: OnceLock::new(),
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }
    pub fn n(&self) -> u32 {
        self.n
    }
    pub fn q(&self) -> u64 {
        self.q
    }
    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    /// Field identification string `p^n#<modulus-encode>` used in caches and
    /// reports. The modulus encode includes the leading monic coefficient.
    pub fn id_string(&self) -> String {
        let enc: u64 = self
            .modulus
            .iter()
            .rev()
            .fold(0u64, |acc, &c| acc * self.p + c);
        format!("{}^{}#{}", self.p, self.n, enc)
    }

    /// All `q` elements in ascending encode order, starting at 0.
    pub fn elements(&self) -> impl Iterator<Item = Fe> {
        (0..self.q as u32).map(Fe)
    }

    /// Coefficient view of an element (length n, base-p digits of the encode).
    pub fn coeffs(&self, a: Fe) -> Vec<u64> {
        let mut v = Vec::with_capacity(self.n as usize);
        let mut x = a.encode();
        for _ in 0..self.n {
            v.push(x % self.p);
            x /= self.p;
        }
        v
    }

    pub fn from_coeffs(&self, coeffs: &[u64]) -> Fe {
        let mut enc = 0u64;
        for &c in coeffs.iter().rev() {
            enc = enc * self.p + c % self.p;
        }
        Fe(enc as u32)
    }

    /// Embeds an integer via reduction mod p (prime subfield).
    pub fn from_int(&self, k: i64) -> Fe {
        let p = self.p as i64;
        Fe(k.rem_euclid(p) as u32)
    }

    #[inline]
    fn check(&self, a: Fe) {
        debug_assert!(a.encode() < self.q, "element out of field range");
    }

    #[inline]
    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        self.check(a);
        self.check(b);
        if self.n == 1 {
            return Fe(((a.encode() + b.encode()) % self.p) as u32);
        }
        if self.p == 2 {
            return Fe(a.0 ^ b.0);
        }
        if let Some(t) = self.try_tables() {
            return Fe(t.add[(a.encode() * self.q + b.encode()) as usize]);
        }
        self.add_digits(a, b)
    }

    fn add_digits(&self, a: Fe, b: Fe) -> Fe {
        let (mut x, mut y) = (a.encode(), b.encode());
        let mut enc = 0u64;
        let mut place = 1u64;
        for _ in 0..self.n {
            enc += ((x % self.p + y % self.p) % self.p) * place;
            x /= self.p;
            y /= self.p;
            place *= self.p;
        }
        Fe(enc as u32)
    }

    #[inline]
    pub fn neg(&self, a: Fe) -> Fe {
        self.check(a);
        if self.n == 1 {
            return Fe(((self.p - a.encode()) % self.p) as u32);
        }
        if self.p == 2 {
            return a;
        }
        if let Some(t) = self.try_tables() {
            return Fe(t.neg[a.0 as usize]);
        }
        let mut x = a.encode();
        let mut enc = 0u64;
        let mut place = 1u64;
        for _ in 0..self.n {
            enc += ((self.p - x % self.p) % self.p) * place;
            x /= self.p;
            place *= self.p;
        }
        Fe(enc as u32)
    }

    #[inline]
    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        self.check(a);
        self.check(b);
        if self.n == 1 {
            return Fe((a.encode() * b.encode() % self.p) as u32);
        }
        if let Some(t) = self.try_tables() {
            return Fe(t.mul[(a.encode() * self.q + b.encode()) as usize]);
        }
        self.mul_generic(a, b)
    }

    fn mul_generic(&self, a: Fe, b: Fe) -> Fe {
        let pa = self.coeffs(a);
        let pb = self.coeffs(b);
        let prod = poly_mul_mod(&pa, &pb, &self.modulus, self.p);
        self.from_coeffs(&prod)
    }

    /// Multiplicative inverse; errors on zero.
    pub fn inv(&self, a: Fe) -> Result<Fe> {
        self.check(a);
        if a == Fe::ZERO {
            return Err(Error::DivisionByZero);
        }
        if self.n == 1 {
            return Ok(Fe(mod_inv_prime(a.encode(), self.p) as u32));
        }
        if let Some(t) = self.try_tables() {
            return Ok(Fe(t.inv[a.0 as usize]));
        }
        // extended Euclid on polynomials over F_p
        let pa = self.coeffs(a);
        let inv = poly_inv_mod(&pa, &self.modulus, self.p)?;
        Ok(self.from_coeffs(&inv))
    }

    /// `a^k` by square-and-multiply; negative exponents invert first.
    pub fn pow(&self, a: Fe, k: i64) -> Result<Fe> {
        let (base, mut e) = if k < 0 {
            (self.inv(a)?, k.unsigned_abs())
        } else {
            (a, k as u64)
        };
        let mut acc = Fe::ONE;
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, sq);
            }
            sq = self.mul(sq, sq);
            e >>= 1;
        }
        Ok(acc)
    }

    /// The Frobenius endomorphism `a ↦ a^p`.
    pub fn frobenius(&self, a: Fe) -> Fe {
        self.pow(a, self.p as i64).expect("positive exponent")
    }

    pub fn two(&self) -> Fe {
        self.from_int(2)
    }

    pub fn minus_two(&self) -> Fe {
        self.from_int(-2)
    }

    fn try_tables(&self) -> Option<&Tables> {
        if self.q > TABLE_CAP {
            return None;
        }
        Some(self.tables.get_or_init(|| self.build_tables()))
    }

    fn build_tables(&self) -> Tables {
        let q = self.q as usize;
        let mut mul = vec![0u32; q * q];
        let mut add = vec![0u32; q * q];
        let mut inv = vec![0u32; q];
        let mut neg = vec![0u32; q];
        for a in 0..q as u32 {
            for b in 0..q as u32 {
                mul[a as usize * q + b as usize] = self.mul_generic(Fe(a), Fe(b)).0;
                add[a as usize * q + b as usize] = self.add_digits(Fe(a), Fe(b)).0;
            }
        }
        for a in 0..q as u32 {
            neg[a as usize] = {
                let mut x = Fe(a).encode();
                let mut enc = 0u64;
                let mut place = 1u64;
                for _ in 0..self.n {
                    enc += ((self.p - x % self.p) % self.p) * place;
                    x /= self.p;
                    place *= self.p;
                }
                enc as u32
            };
            if a != 0 {
                // scan for the inverse once; table is built a single time
                for b in 1..q as u32 {
                    if mul[a as usize * q + b as usize] == 1 {
                        inv[a as usize] = b;
                        break;
                    }
                }
            }
        }
        Tables { mul, add, inv, neg }
    }
}

/// Trial-division primality; sufficient for the supported p range.
pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn mod_inv_prime(a: u64, p: u64) -> u64 {
    // extended Euclid on integers
    let (mut t, mut new_t) = (0i128, 1i128);
    let (mut r, mut new_r) = (p as i128, a as i128);
    while new_r != 0 {
        let quot = r / new_r;
        (t, new_t) = (new_t, t - quot * new_t);
        (r, new_r) = (new_r, r - quot * new_r);
    }
    debug_assert_eq!(r, 1);
    t.rem_euclid(p as i128) as u64
}

// ---------------------------------------------------------------------------
// polynomial helpers over F_p (coefficient vectors, lowest degree first)
// ---------------------------------------------------------------------------

fn poly_trim(a: &mut Vec<u64>) {
    while a.len() > 1 && *a.last().unwrap() == 0 {
        a.pop();
    }
}

fn poly_mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    out
}

/// Remainder of `a` modulo monic `m` over F_p.
fn poly_rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut r: Vec<u64> = a.to_vec();
    poly_trim(&mut r);
    let dm = m.len() - 1;
    debug_assert_eq!(m[dm], 1, "modulus must be monic");
    while r.len() > dm || (r.len() == dm + 1 && dm == 0) {
        if r.len() < dm + 1 {
            break;
        }
        let lead = *r.last().unwrap();
        if lead == 0 {
            r.pop();
            continue;
        }
        let shift = r.len() - 1 - dm;
        for i in 0..=dm {
            let sub = lead * m[i] % p;
            let idx = shift + i;
            r[idx] = (r[idx] + p - sub) % p;
        }
        poly_trim(&mut r);
        if r.len() == 1 && r[0] == 0 {
            break;
        }
        if r.len() <= dm {
            break;
        }
    }
    if r.len() > dm {
        r.truncate(dm.max(1));
    }
    r
}

fn poly_mul_mod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    poly_rem(&poly_mul(a, b, p), m, p)
}

fn poly_is_zero(a: &[u64]) -> bool {
    a.iter().all(|&c| c == 0)
}

/// Extended Euclid: inverse of `a` modulo monic irreducible `m`.
fn poly_inv_mod(a: &[u64], m: &[u64], p: u64) -> Result<Vec<u64>> {
    let (mut r0, mut r1) = (m.to_vec(), a.to_vec());
    poly_trim(&mut r1);
    if poly_is_zero(&r1) {
        return Err(Error::DivisionByZero);
    }
    let (mut t0, mut t1) = (vec![0u64], vec![1u64]);
    while !poly_is_zero(&r1) && !(r1.len() == 1 && r1[0] != 0) {
        let (quot, rem) = poly_divmod(&r0, &r1, p);
        let qt1 = poly_mul(&quot, &t1, p);
        let mut nt = poly_sub(&t0, &qt1, p);
        poly_trim(&mut nt);
        (r0, r1) = (r1, rem);
        (t0, t1) = (t1, nt);
    }
    // r1 is a nonzero constant c; inverse is t1 / c
    let c = r1[0];
    let cinv = mod_inv_prime(c, p);
    let mut out: Vec<u64> = t1.iter().map(|&x| x * cinv % p).collect();
    let rem = poly_rem(&out, m, p);
    out = rem;
    Ok(out)
}

fn poly_sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let len = a.len().max(b.len());
    let mut out = vec![0u64; len];
    for i in 0..len {
        let x = a.get(i).copied().unwrap_or(0);
        let y = b.get(i).copied().unwrap_or(0);
        out[i] = (x + p - y) % p;
    }
    out
}

fn poly_divmod(a: &[u64], b: &[u64], p: u64) -> (Vec<u64>, Vec<u64>) {
    let mut r: Vec<u64> = a.to_vec();
    poly_trim(&mut r);
    let mut bb: Vec<u64> = b.to_vec();
    poly_trim(&mut bb);
    let db = bb.len() - 1;
    let lead_inv = mod_inv_prime(bb[db], p);
    if r.len() < bb.len() {
        return (vec![0], r);
    }
    let mut quot = vec![0u64; r.len() - db];
    while r.len() >= bb.len() && !poly_is_zero(&r) {
        let dr = r.len() - 1;
        let coef = r[dr] * lead_inv % p;
        if coef != 0 {
            quot[dr - db] = coef;
            for i in 0..=db {
                let sub = coef * bb[i] % p;
                r[dr - db + i] = (r[dr - db + i] + p - sub) % p;
            }
        }
        poly_trim(&mut r);
        if r.len() == 1 && r[0] == 0 {
            break;
        }
        if r.len() <= db {
            break;
        }
    }
    (quot, r)
}

/// Irreducibility by trial division against all monic polynomials of degree ≤ n/2.
fn poly_is_irreducible(m: &[u64], p: u64) -> bool {
    let n = m.len() - 1;
    if n == 1 {
        return true;
    }
    for d in 1..=n / 2 {
        // monic divisors of degree d, coefficients (c_0..c_{d-1})
        let count = (p as u128).pow(d as u32);
        for enc in 0..count {
            let mut div = Vec::with_capacity(d + 1);
            let mut x = enc;
            for _ in 0..d {
                div.push((x % p as u128) as u64);
                x /= p as u128;
            }
            div.push(1);
            let rem = poly_rem(m, &div, p);
            if poly_is_zero(&rem) {
                return false;
            }
        }
    }
    true
}

/// The canonical modulus: first irreducible monic degree-n polynomial in
/// ascending base-p integer encode of `(c_0,…,c_{n−1})`.
fn canonical_modulus(p: u64, n: u32) -> Vec<u64> {
    let n = n as usize;
    let count = (p as u128).pow(n as u32);
    for enc in 0..count {
        let mut m = Vec::with_capacity(n + 1);
        let mut x = enc;
        for _ in 0..n {
            m.push((x % p as u128) as u64);
            x /= p as u128;
        }
        m.push(1);
        if poly_is_irreducible(&m, p) {
            return m;
        }
    }
    unreachable!("an irreducible polynomial of every degree exists over F_p")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_moduli_match_known_fields() {
        let f7 = FieldSpec::new(7, 1).unwrap();
        assert_eq!(f7.q(), 7);
        assert_eq!(f7.modulus(), &[0, 1]); // x
        let f4 = FieldSpec::new(2, 2).unwrap();
        assert_eq!(f4.modulus(), &[1, 1, 1]); // x^2+x+1, the only choice
        assert_eq!(f4.id_string(), "2^2#7");
        let f9 = FieldSpec::new(3, 2).unwrap();
        assert_eq!(f9.modulus(), &[1, 0, 1]); // x^2+1, first in scan order
        assert!(poly_is_irreducible(f9.modulus(), 3));
        let f8 = FieldSpec::new(2, 3).unwrap();
        assert_eq!(f8.modulus(), &[1, 1, 0, 1]); // x^3+x+1
    }

    #[test]
    fn field_make_rejects_bad_input() {
        assert!(matches!(FieldSpec::new(6, 1), Err(Error::NotPrime(6))));
        assert!(matches!(
            FieldSpec::new(2, 20),
            Err(Error::FieldCapExceeded { .. })
        ));
        // idempotent and deterministic
        let a = FieldSpec::new(5, 2).unwrap();
        let b = FieldSpec::new(5, 2).unwrap();
        assert_eq!(a.modulus(), b.modulus());
    }

    #[test]
    fn prime_field_arithmetic() {
        let f5 = FieldSpec::new(5, 1).unwrap();
        assert_eq!(f5.mul(Fe(3), Fe(4)), Fe(2));
        let f7 = FieldSpec::new(7, 1).unwrap();
        assert_eq!(f7.inv(Fe(3)).unwrap(), Fe(5));
        let f2 = FieldSpec::new(2, 1).unwrap();
        assert_eq!(f2.inv(Fe(1)).unwrap(), Fe(1));
        assert!(matches!(f5.inv(Fe::ZERO), Err(Error::DivisionByZero)));
    }

    #[test]
    fn f4_multiplication_forced_by_modulus() {
        let f4 = FieldSpec::new(2, 2).unwrap();
        // x·x = x+1: encodes x=2, x+1=3
        assert_eq!(f4.mul(Fe(2), Fe(2)), Fe(3));
        // enumeration order 0,1,x,x+1
        let elems: Vec<Fe> = f4.elements().collect();
        assert_eq!(elems, vec![Fe(0), Fe(1), Fe(2), Fe(3)]);
    }

    #[test]
    fn f8_frobenius_squared_is_suzuki_twist() {
        let f8 = FieldSpec::new(2, 3).unwrap();
        for a in f8.elements() {
            let theta = |x: Fe| f8.pow(x, 4).unwrap(); // frobenius^2 on F_8
            assert_eq!(theta(theta(a)), f8.mul(a, a));
            assert_eq!(f8.frobenius(f8.frobenius(a)), theta(a));
        }
    }

    #[test]
    fn inverses_exhaustive_small_fields() {
        for (p, n) in [(2u64, 1u32), (3, 1), (5, 1), (7, 1), (2, 2), (3, 2), (2, 3)] {
            let f = FieldSpec::new(p, n).unwrap();
            for a in f.elements().skip(1) {
                assert_eq!(f.mul(a, f.inv(a).unwrap()), Fe::ONE, "{}", f.id_string());
            }
        }
    }

    #[test]
    fn ring_axioms_exhaustive_q_le_9() {
        for (p, n) in [(2u64, 2u32), (3, 2), (5, 1), (7, 1), (2, 3)] {
            let f = FieldSpec::new(p, n).unwrap();
            let elems: Vec<Fe> = f.elements().collect();
            for &a in &elems {
                for &b in &elems {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    for &c in &elems {
                        assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                        assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                        assert_eq!(
                            f.mul(a, f.add(b, c)),
                            f.add(f.mul(a, b), f.mul(a, c))
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn a_pow_q_fixed_exhaustive_q_le_64() {
        for (p, n) in [
            (2u64, 1u32),
            (3, 1),
            (5, 1),
            (7, 1),
            (11, 1),
            (13, 1),
            (2, 2),
            (2, 3),
            (2, 4),
            (2, 5),
            (2, 6),
            (3, 2),
            (3, 3),
            (5, 2),
            (7, 2),
        ] {
            let f = FieldSpec::new(p, n).unwrap();
            for a in f.elements() {
                assert_eq!(f.pow(a, f.q() as i64).unwrap(), a);
            }
        }
    }

    #[test]
    fn frobenius_is_homomorphism_q_le_16() {
        for (p, n) in [(2u64, 2u32), (2, 3), (2, 4), (3, 2), (13, 1)] {
            let f = FieldSpec::new(p, n).unwrap();
            let elems: Vec<Fe> = f.elements().collect();
            for &a in &elems {
                for &b in &elems {
                    assert_eq!(
                        f.frobenius(f.add(a, b)),
                        f.add(f.frobenius(a), f.frobenius(b))
                    );
                    assert_eq!(
                        f.frobenius(f.mul(a, b)),
                        f.mul(f.frobenius(a), f.frobenius(b))
                    );
                }
            }
        }
    }

    #[test]
    fn f9_inverse_of_x() {
        let f9 = FieldSpec::new(3, 2).unwrap();
        let x = Fe(3); // digits (0,1)
        let xinv = f9.inv(x).unwrap();
        assert_eq!(f9.mul(x, xinv), Fe::ONE);
    }

    #[test]
    fn larger_field_generic_path() {
        // q = 2^11 exceeds the table cap, exercising the generic arms
        let f = FieldSpec::new(2, 11).unwrap();
        let a = Fe(1234);
        let b = Fe(987);
        let ab = f.mul(a, b);
        assert_eq!(f.mul(ab, f.inv(b).unwrap()), a);
        assert_eq!(f.pow(a, (f.q() - 1) as i64).unwrap(), Fe::ONE);
    }

    #[test]
    fn negative_pow_uses_inverse() {
        let f = FieldSpec::new(7, 1).unwrap();
        assert_eq!(f.pow(Fe(3), -1).unwrap(), Fe(5));
        assert_eq!(f.pow(Fe(3), -2).unwrap(), f.mul(Fe(5), Fe(5)));
        assert!(f.pow(Fe::ZERO, -1).is_err());
    }
}
