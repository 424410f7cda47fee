//! Symbolic trace-polynomial compiler for two-letter words on SL(2), exact
//! sparse polynomial arithmetic over unbounded integers, Dickson polynomials,
//! permutation-polynomial tests, and the numeric seven-coordinate trace
//! relation for three letters.
//!
//! Compilation works in the basis (1, X, Y, XY) of the generic 2×2 setting:
//! every intermediate value is a 4-vector of polynomials in s = tr x,
//! u = tr(xy), t = tr y. The ten nontrivial basis products are generated
//! from the two classical identities
//!
//! ```text
//! A² = tr(A)·A − I                      (Cayley–Hamilton, det 1)
//! AB + BA = (tr(AB) − tr A tr B)·I + tr(B)·A + tr(A)·B
//! ```
//!
//! by rewriting, never entered by hand, and are checked against a numeric
//! oracle on random SL(2,q) pairs in the test suite.

use crate::ff::{Fe, FieldSpec};
use crate::grp::{GroupElement, GroupSpec};
use crate::word::Word;
use crate::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

/// Sparse exact-integer polynomial in s, u, t. Keys are exponent triples
/// (e_s, e_u, e_t); zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TracePoly {
    terms: BTreeMap<(u32, u32, u32), BigInt>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    S,
    U,
    T,
}

impl TracePoly {
    pub fn zero() -> TracePoly {
        TracePoly::default()
    }

    pub fn constant(c: i64) -> TracePoly {
        TracePoly::from_big(BigInt::from(c))
    }

    pub fn from_big(c: BigInt) -> TracePoly {
        let mut p = TracePoly::default();
        if !c.is_zero() {
            p.terms.insert((0, 0, 0), c);
        }
        p
    }

    pub fn var(v: Var) -> TracePoly {
        let key = match v {
            Var::S => (1, 0, 0),
            Var::U => (0, 1, 0),
            Var::T => (0, 0, 1),
        };
        let mut p = TracePoly::default();
        p.terms.insert(key, BigInt::one());
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32, u32), &BigInt)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    fn add_term(&mut self, key: (u32, u32, u32), c: &BigInt) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(key).or_insert_with(BigInt::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn add(&self, other: &TracePoly) -> TracePoly {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(*k, c);
        }
        out
    }

    pub fn neg(&self) -> TracePoly {
        TracePoly {
            terms: self.terms.iter().map(|(k, c)| (*k, -c)).collect(),
        }
    }

    pub fn sub(&self, other: &TracePoly) -> TracePoly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &TracePoly) -> TracePoly {
        let mut out = TracePoly::default();
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                let key = (ka.0 + kb.0, ka.1 + kb.1, ka.2 + kb.2);
                out.add_term(key, &(ca * cb));
            }
        }
        out
    }

    pub fn scale(&self, c: i64) -> TracePoly {
        if c == 0 {
            return TracePoly::zero();
        }
        let c = BigInt::from(c);
        TracePoly {
            terms: self.terms.iter().map(|(k, x)| (*k, x * &c)).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> TracePoly {
        let mut acc = TracePoly::constant(1);
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Largest exponent of the given variable.
    pub fn degree_in(&self, v: Var) -> u32 {
        self.terms
            .keys()
            .map(|k| match v {
                Var::S => k.0,
                Var::U => k.1,
                Var::T => k.2,
            })
            .max()
            .unwrap_or(0)
    }

    /// Coefficient list (ascending degree) of a univariate polynomial;
    /// errors if more than one variable occurs.
    pub fn univariate_coeffs(&self) -> Result<Vec<BigInt>> {
        let mut var: Option<usize> = None;
        for k in self.terms.keys() {
            for (i, e) in [k.0, k.1, k.2].into_iter().enumerate() {
                if e > 0 {
                    match var {
                        None => var = Some(i),
                        Some(prev) if prev == i => {}
                        Some(_) => {
                            return Err(Error::InvalidInput(
                                "polynomial is not univariate".into(),
                            ))
                        }
                    }
                }
            }
        }
        let deg = self
            .terms
            .keys()
            .map(|k| k.0 + k.1 + k.2)
            .max()
            .unwrap_or(0);
        let mut coeffs = vec![BigInt::zero(); deg as usize + 1];
        for (k, c) in &self.terms {
            coeffs[(k.0 + k.1 + k.2) as usize] = c.clone();
        }
        Ok(coeffs)
    }

    /// Outer composition h ∘ inner for univariate h.
    pub fn compose(h: &TracePoly, inner: &TracePoly) -> Result<TracePoly> {
        let coeffs = h.univariate_coeffs()?;
        // Horner
        let mut acc = TracePoly::zero();
        for c in coeffs.iter().rev() {
            acc = acc.mul(inner).add(&TracePoly::from_big(c.clone()));
        }
        Ok(acc)
    }

    /// Reduces coefficients mod p and evaluates at (s, u, t).
    pub fn eval(&self, field: &FieldSpec, s: Fe, u: Fe, t: Fe) -> Fe {
        self.specialize(field).eval(field, s, u, t)
    }

    /// Coefficients reduced into F_q once, for fast repeated evaluation.
    pub fn specialize(&self, field: &FieldSpec) -> FePoly {
        let p = BigInt::from(field.p());
        let terms = self
            .terms
            .iter()
            .filter_map(|(k, c)| {
                let r = c.mod_floor(&p);
                let enc: u64 = (&r).try_into().expect("0 ≤ r < p");
                if enc == 0 {
                    None
                } else {
                    Some((*k, Fe(enc as u32)))
                }
            })
            .collect();
        FePoly { terms }
    }
}

/// A trace polynomial with coefficients reduced into a fixed field.
#[derive(Debug, Clone)]
pub struct FePoly {
    terms: Vec<((u32, u32, u32), Fe)>,
}

impl FePoly {
    pub fn eval(&self, field: &FieldSpec, s: Fe, u: Fe, t: Fe) -> Fe {
        let mut acc = Fe::ZERO;
        for &((es, eu, et), c) in &self.terms {
            let mut term = c;
            if es > 0 {
                term = field.mul(term, field.pow(s, es as i64).expect("nonneg"));
            }
            if eu > 0 {
                term = field.mul(term, field.pow(u, eu as i64).expect("nonneg"));
            }
            if et > 0 {
                term = field.mul(term, field.pow(t, et as i64).expect("nonneg"));
            }
            acc = field.add(acc, term);
        }
        acc
    }
}

/// Terms ordered for printing: largest single-variable exponent first, then
/// total degree, then exponents of (s, t, u); the constant term last. This
/// prints the commutator polynomial as `s^2 + t^2 + u^2 - s*u*t - 2` and
/// univariate polynomials in conventional descending order.
fn display_key(k: &(u32, u32, u32)) -> (u32, u32, u32, u32, u32) {
    let height = k.0.max(k.1).max(k.2);
    let total = k.0 + k.1 + k.2;
    (height, total, k.0, k.2, k.1)
}

impl fmt::Display for TracePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut keys: Vec<&(u32, u32, u32)> = self.terms.keys().collect();
        keys.sort_by(|a, b| display_key(b).cmp(&display_key(a)));
        let mut first = true;
        for k in keys {
            let c = &self.terms[k];
            let mono = {
                let mut parts = Vec::new();
                for (name, e) in [("s", k.0), ("u", k.1), ("t", k.2)] {
                    match e {
                        0 => {}
                        1 => parts.push(name.to_string()),
                        _ => parts.push(format!("{name}^{e}")),
                    }
                }
                parts.join("*")
            };
            let abs = c.abs();
            let coef = if mono.is_empty() {
                abs.to_string()
            } else if abs.is_one() {
                mono.clone()
            } else {
                format!("{abs}*{mono}")
            };
            if first {
                if c.is_negative() {
                    write!(f, "-{coef}")?;
                } else {
                    write!(f, "{coef}")?;
                }
                first = false;
            } else if c.is_negative() {
                write!(f, " - {coef}")?;
            } else {
                write!(f, " + {coef}")?;
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// the (1, X, Y, XY) representation
// ---------------------------------------------------------------------------

/// c₀·1 + c₁·X + c₂·Y + c₃·XY with trace-polynomial coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuatRep {
    pub c: [TracePoly; 4],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum L {
    X,
    Y,
}

/// Normal forms of words in X, Y under the rewrite rules: 1, X, Y, XY.
const BASIS: [&[L]; 4] = [&[], &[L::X], &[L::Y], &[L::X, L::Y]];

fn s() -> TracePoly {
    TracePoly::var(Var::S)
}
fn u() -> TracePoly {
    TracePoly::var(Var::U)
}
fn t() -> TracePoly {
    TracePoly::var(Var::T)
}

/// Rewrites a word in X, Y into a combination of the four basis words,
/// applying XX → sX − 1, YY → tY − 1, YX → (u−st)·1 + tX + sY − XY at the
/// leftmost reducible position. Terminates: each rule lowers (inversions,
/// length) lexicographically.
fn reduce_word(word: &[L]) -> Vec<(TracePoly, Vec<L>)> {
    let bad = (0..word.len().saturating_sub(1)).find(|&i| {
        matches!(
            (word[i], word[i + 1]),
            (L::X, L::X) | (L::Y, L::Y) | (L::Y, L::X)
        )
    });
    let Some(i) = bad else {
        return vec![(TracePoly::constant(1), word.to_vec())];
    };
    let (head, tail) = (&word[..i], &word[i + 2..]);
    let expansion: Vec<(TracePoly, Vec<L>)> = match (word[i], word[i + 1]) {
        (L::X, L::X) => vec![(s(), vec![L::X]), (TracePoly::constant(-1), vec![])],
        (L::Y, L::Y) => vec![(t(), vec![L::Y]), (TracePoly::constant(-1), vec![])],
        (L::Y, L::X) => vec![
            (u().sub(&s().mul(&t())), vec![]),
            (t(), vec![L::X]),
            (s(), vec![L::Y]),
            (TracePoly::constant(-1), vec![L::X, L::Y]),
        ],
        _ => unreachable!(),
    };
    let mut out = Vec::new();
    for (coef, mid) in expansion {
        let mut w: Vec<L> = head.to_vec();
        w.extend_from_slice(&mid);
        w.extend_from_slice(tail);
        for (c2, nf) in reduce_word(&w) {
            out.push((coef.mul(&c2), nf));
        }
    }
    out
}

fn collect(reduced: Vec<(TracePoly, Vec<L>)>) -> QuatRep {
    let mut c: [TracePoly; 4] = Default::default();
    for (coef, nf) in reduced {
        let idx = BASIS
            .iter()
            .position(|b| *b == nf.as_slice())
            .expect("rewriting lands in the basis");
        c[idx] = c[idx].add(&coef);
    }
    QuatRep { c }
}

/// The 4×4 basis product table, generated once from the rewrite rules.
fn basis_table() -> &'static [[QuatRep; 4]; 4] {
    static TABLE: OnceLock<[[QuatRep; 4]; 4]> = OnceLock::new();
    TABLE.get_or_init(|| {
        std::array::from_fn(|i| {
            std::array::from_fn(|j| {
                let mut w: Vec<L> = BASIS[i].to_vec();
                w.extend_from_slice(BASIS[j]);
                collect(reduce_word(&w))
            })
        })
    })
}

impl QuatRep {
    pub fn one() -> QuatRep {
        QuatRep {
            c: [
                TracePoly::constant(1),
                TracePoly::zero(),
                TracePoly::zero(),
                TracePoly::zero(),
            ],
        }
    }

    /// The representation of a single letter or its inverse:
    /// x ↦ X, x⁻¹ ↦ s·1 − X, y ↦ Y, y⁻¹ ↦ t·1 − Y.
    pub fn letter(generator: usize, inverse: bool) -> QuatRep {
        let (trace, idx) = match generator {
            1 => (s(), 1),
            2 => (t(), 2),
            _ => panic!("two-letter alphabet"),
        };
        let mut c: [TracePoly; 4] = Default::default();
        if inverse {
            c[0] = trace;
            c[idx] = TracePoly::constant(-1);
        } else {
            c[idx] = TracePoly::constant(1);
        }
        QuatRep { c }
    }

    pub fn mul(&self, other: &QuatRep) -> QuatRep {
        let table = basis_table();
        let mut c: [TracePoly; 4] = Default::default();
        for i in 0..4 {
            if self.c[i].is_zero() {
                continue;
            }
            for j in 0..4 {
                if other.c[j].is_zero() {
                    continue;
                }
                let coef = self.c[i].mul(&other.c[j]);
                for (k, entry) in table[i][j].c.iter().enumerate() {
                    if !entry.is_zero() {
                        c[k] = c[k].add(&coef.mul(entry));
                    }
                }
            }
        }
        QuatRep { c }
    }

    pub fn pow(&self, k: u32) -> QuatRep {
        let mut acc = QuatRep::one();
        let mut sq = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&sq);
            }
            sq = sq.mul(&sq);
            e >>= 1;
        }
        acc
    }

    /// tr(c₀·1 + c₁X + c₂Y + c₃XY) = 2c₀ + s·c₁ + t·c₂ + u·c₃.
    pub fn trace(&self) -> TracePoly {
        self.c[0]
            .scale(2)
            .add(&s().mul(&self.c[1]))
            .add(&t().mul(&self.c[2]))
            .add(&u().mul(&self.c[3]))
    }

    /// Evaluates the representation at concrete SL(2,q) elements.
    pub fn eval_matrix(
        &self,
        spec: &GroupSpec,
        x: &GroupElement,
        y: &GroupElement,
    ) -> [[Fe; 2]; 2] {
        let f = spec.field();
        let s_v = spec.trace(x);
        let t_v = spec.trace(y);
        let xy = spec.mul(x, y);
        let u_v = spec.trace(&xy);
        let id = spec.identity();
        let basis = [id, *x, *y, xy];
        let mut out = [[Fe::ZERO; 2]; 2];
        for (k, b) in basis.iter().enumerate() {
            let coef = self.c[k].eval(f, s_v, u_v, t_v);
            for i in 0..2 {
                for j in 0..2 {
                    out[i][j] = f.add(out[i][j], f.mul(coef, b.at(2, i, j)));
                }
            }
        }
        out
    }
}

/// Compiles a word over ≤ 2 letters to its trace polynomial f_w with
/// tr(w(x,y)) = f_w(tr x, tr(xy), tr y).
pub fn compile_trace2(w: &Word) -> Result<TracePoly> {
    if w.alphabet() > 2 {
        return Err(Error::InvalidInput(
            "trace compilation needs a word over two letters".into(),
        ));
    }
    let mut acc = QuatRep::one();
    for &(g, e) in w.syllables() {
        let base = QuatRep::letter(g, e < 0);
        acc = acc.mul(&base.pow(e.unsigned_abs() as u32));
    }
    Ok(acc.trace())
}

/// Verifies every basis product against matrix arithmetic on `trials`
/// seeded-random SL(2,q) pairs: full 2×2 equality, not just traces.
pub fn verify_basis_table(q: u64, trials: usize, seed: u64) -> Result<()> {
    use rand::{Rng, SeedableRng};
    let field = FieldSpec::new(q, 1)?;
    let spec = GroupSpec::sl2(field);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut random_sl2 = || loop {
        let e: Vec<Fe> = (0..4).map(|_| Fe(rng.gen_range(0..q) as u32)).collect();
        let g = GroupElement::from_entries(&e);
        if spec.det(&g) == Fe::ONE {
            return g;
        }
    };
    let table = basis_table();
    for _ in 0..trials {
        let x = random_sl2();
        let y = random_sl2();
        let id = spec.identity();
        let xy = spec.mul(&x, &y);
        let basis = [id, x, y, xy];
        for i in 0..4 {
            for j in 0..4 {
                let direct = spec.mul(&basis[i], &basis[j]);
                let symbolic = table[i][j].eval_matrix(&spec, &x, &y);
                for r in 0..2 {
                    for c in 0..2 {
                        if symbolic[r][c] != direct.at(2, r, c) {
                            return Err(Error::InvalidInput(format!(
                                "basis product ({i},{j}) disagrees with the matrix oracle"
                            )));
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Dickson polynomials and permutation polynomials
// ---------------------------------------------------------------------------

/// Dickson polynomial D_n with D_n(z + 1/z) = zⁿ + z⁻ⁿ, as a univariate
/// trace polynomial in s. D₀ = 2, D₁ = s, D_{n+1} = s·D_n − D_{n−1};
/// D_{−n} = D_n.
pub fn dickson(n: i64) -> TracePoly {
    let n = n.unsigned_abs();
    let mut prev = TracePoly::constant(2);
    if n == 0 {
        return prev;
    }
    let mut cur = s();
    for _ in 1..n {
        let next = s().mul(&cur).sub(&prev);
        prev = cur;
        cur = next;
    }
    cur
}

#[derive(Debug, Clone)]
pub struct PermPolyReport {
    /// h ≡ a·x^{p^k} + b (a ≠ 0) after reduction mod p: a permutation
    /// polynomial of every finite extension.
    pub structural: bool,
    /// (extension degree over the given field, exhaustively bijective).
    pub empirical: Vec<(u32, bool)>,
}

/// Structural and empirical permutation-polynomial tests for a univariate
/// integer polynomial over F_{p^n} and its listed extensions.
pub fn perm_poly_test(
    h: &TracePoly,
    base: &FieldSpec,
    extensions: &[u32],
) -> Result<PermPolyReport> {
    let coeffs = h.univariate_coeffs()?;
    let p = BigInt::from(base.p());
    let reduced: Vec<(usize, BigInt)> = coeffs
        .iter()
        .enumerate()
        .map(|(e, c)| (e, c.mod_floor(&p)))
        .filter(|(_, c)| !c.is_zero())
        .collect();
    if reduced.iter().all(|(e, _)| *e == 0) {
        return Err(Error::InvalidInput(
            "permutation test needs a nonconstant polynomial".into(),
        ));
    }
    let positive: Vec<usize> = reduced
        .iter()
        .filter(|(e, _)| *e > 0)
        .map(|(e, _)| *e)
        .collect();
    let structural = positive.len() == 1 && is_power_of(positive[0] as u64, base.p());
    let mut empirical = Vec::new();
    for &ext in extensions {
        let field = FieldSpec::new(base.p(), base.n() * ext)?;
        let fe_coeffs: Vec<Fe> = coeffs
            .iter()
            .map(|c| {
                let r = c.mod_floor(&p);
                let enc: u64 = (&r).try_into().expect("0 ≤ r < p");
                Fe(enc as u32)
            })
            .collect();
        let mut seen = vec![false; field.q() as usize];
        let mut bijective = true;
        for z in field.elements() {
            // Horner
            let mut acc = Fe::ZERO;
            for c in fe_coeffs.iter().rev() {
                acc = field.add(field.mul(acc, z), *c);
            }
            let slot = &mut seen[acc.encode() as usize];
            if *slot {
                bijective = false;
                break;
            }
            *slot = true;
        }
        empirical.push((ext, bijective));
    }
    Ok(PermPolyReport {
        structural,
        empirical,
    })
}

fn is_power_of(mut e: u64, p: u64) -> bool {
    if e == 0 {
        return false;
    }
    while e % p == 0 {
        e /= p;
    }
    e == 1
}

// ---------------------------------------------------------------------------
// three-letter numeric traces
// ---------------------------------------------------------------------------

/// The 7-coordinate trace tuple of a triple in SL(2,q) together with the
/// residual of the quadratic relation it must satisfy:
///
/// ```text
/// a₁₂₃² − a₁₂₃(a₁₂a₃ + a₁₃a₂ + a₂₃a₁ − a₁a₂a₃)
///       + (a₁²+a₂²+a₃²+a₁₂²+a₁₃²+a₂₃² − a₁a₂a₁₂ − a₁a₃a₁₃ − a₂a₃a₂₃
///           + a₁₂a₁₃a₂₃ − 4) = 0
/// ```
pub fn trace7_relation(
    spec: &GroupSpec,
    x: &GroupElement,
    y: &GroupElement,
    z: &GroupElement,
) -> Result<([Fe; 7], Fe)> {
    if spec.dim() != 2 {
        return Err(Error::UnsupportedGroup(
            "seven-coordinate traces need SL(2,q)".into(),
        ));
    }
    let f = spec.field();
    let a1 = spec.trace(x);
    let a2 = spec.trace(y);
    let a3 = spec.trace(z);
    let a12 = spec.trace(&spec.mul(x, y));
    let a13 = spec.trace(&spec.mul(x, z));
    let a23 = spec.trace(&spec.mul(y, z));
    let a123 = spec.trace(&spec.mul(&spec.mul(x, y), z));
    let sq = |a: Fe| f.mul(a, a);
    let linear = {
        let mut acc = f.mul(a12, a3);
        acc = f.add(acc, f.mul(a13, a2));
        acc = f.add(acc, f.mul(a23, a1));
        f.sub(acc, f.mul(f.mul(a1, a2), a3))
    };
    let mut constant = Fe::ZERO;
    for v in [a1, a2, a3, a12, a13, a23] {
        constant = f.add(constant, sq(v));
    }
    constant = f.sub(constant, f.mul(f.mul(a1, a2), a12));
    constant = f.sub(constant, f.mul(f.mul(a1, a3), a13));
    constant = f.sub(constant, f.mul(f.mul(a2, a3), a23));
    constant = f.add(constant, f.mul(f.mul(a12, a13), a23));
    constant = f.sub(constant, f.from_int(4));
    let residual = f.add(f.sub(sq(a123), f.mul(a123, linear)), constant);
    Ok(([a1, a2, a3, a12, a13, a23, a123], residual))
}
