//! Free-group words: parsing, reduction, algebra, evaluation on matrix
//! groups, and the named recursive sequences.
//!
//! Grammar (whitespace insignificant):
//!
//! ```text
//! word := term { term } ;
//! term := atom [ "^" int ] ;
//! atom := gen | "(" word ")" | "[" word "," word "]" ;
//! gen  := "x" | "y" | "z" | "x" digits ;
//! int  := ["-"] digits, nonzero ;
//! ```
//!
//! `[a,b]` desugars to `a b a⁻¹ b⁻¹`; generators x, y, z alias x1, x2, x3.

use crate::grp::{GroupElement, GroupSpec};
use crate::{Error, Result};
use std::fmt;

/// A freely reduced word: syllables (generator index 1..=d, nonzero exponent).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Word {
    d: usize,
    syl: Vec<(usize, i64)>,
}

impl Word {
    pub fn identity(d: usize) -> Word {
        Word { d, syl: Vec::new() }
    }

    pub fn gen(i: usize, d: usize) -> Word {
        assert!(i >= 1 && i <= d);
        Word { d, syl: vec![(i, 1)] }
    }

    pub fn from_syllables(d: usize, syl: Vec<(usize, i64)>) -> Word {
        let mut w = Word { d, syl: Vec::new() };
        for (g, e) in syl {
            w.push_syllable(g, e);
        }
        w
    }

    pub fn alphabet(&self) -> usize {
        self.d
    }

    pub fn syllables(&self) -> &[(usize, i64)] {
        &self.syl
    }

    pub fn is_identity(&self) -> bool {
        self.syl.is_empty()
    }

    /// Word length: sum of |exponents|.
    pub fn len(&self) -> u64 {
        self.syl.iter().map(|&(_, e)| e.unsigned_abs()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.syl.is_empty()
    }

    fn push_syllable(&mut self, g: usize, e: i64) {
        if e == 0 {
            return;
        }
        if let Some(last) = self.syl.last_mut() {
            if last.0 == g {
                last.1 += e;
                if last.1 == 0 {
                    self.syl.pop();
                }
                return;
            }
        }
        self.syl.push((g, e));
    }

    /// Free product followed by reduction.
    pub fn mul(&self, other: &Word) -> Word {
        let d = self.d.max(other.d);
        let mut out = Word {
            d,
            syl: self.syl.clone(),
        };
        for &(g, e) in &other.syl {
            out.push_syllable(g, e);
        }
        out
    }

    pub fn inverse(&self) -> Word {
        Word {
            d: self.d,
            syl: self.syl.iter().rev().map(|&(g, e)| (g, -e)).collect(),
        }
    }

    pub fn pow(&self, k: i64) -> Word {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut out = Word::identity(self.d);
        for _ in 0..k.unsigned_abs() {
            out = out.mul(&base);
        }
        out
    }

    pub fn commutator(a: &Word, b: &Word) -> Word {
        a.mul(b).mul(&a.inverse()).mul(&b.inverse())
    }

    /// Homomorphic substitution x_i ↦ images[i-1], freely reduced.
    pub fn substitute(&self, images: &[Word]) -> Result<Word> {
        if images.len() != self.d {
            return Err(Error::ArityMismatch {
                expected: self.d,
                got: images.len(),
            });
        }
        let d = images.iter().map(|w| w.d).max().unwrap_or(1);
        let mut out = Word::identity(d);
        for &(g, e) in &self.syl {
            out = out.mul(&images[g - 1].pow(e));
        }
        Ok(out)
    }

    /// Evaluates the word at a tuple of group elements, square-and-multiply
    /// per syllable.
    pub fn evaluate(&self, spec: &GroupSpec, args: &[GroupElement]) -> Result<GroupElement> {
        if args.len() != self.d {
            return Err(Error::ArityMismatch {
                expected: self.d,
                got: args.len(),
            });
        }
        let mut acc = spec.identity();
        for &(g, e) in &self.syl {
            acc = spec.mul(&acc, &spec.pow(&args[g - 1], e));
        }
        Ok(acc)
    }

    /// Cyclic reduction: returns (conjugator c, core t) with `self = c t c⁻¹`
    /// and the core cyclically reduced (first and last syllables on distinct
    /// generators, or at most one syllable).
    pub fn cyclic_reduce(&self) -> (Word, Word) {
        let mut c = Word::identity(self.d);
        let mut t = self.clone();
        while t.syl.len() >= 2 && t.syl.first().unwrap().0 == t.syl.last().unwrap().0 {
            let last = *t.syl.last().unwrap();
            let last_word = Word {
                d: t.d,
                syl: vec![last],
            };
            t.syl.pop();
            t = last_word.clone().mul(&t);
            c = c.mul(&last_word.inverse());
        }
        (c, t)
    }

    /// Canonical alternating form x^{a₁} y^{b₁} … x^{a_r} y^{b_r} of the
    /// cyclic word, rotated to start at an x-syllable (the rotation with the
    /// lexicographically greatest exponent sequence when several x-syllables
    /// exist, which reads the word as written in the common cases). Errors
    /// on words with no alternating form.
    pub fn canon_form(&self) -> Result<CanonForm> {
        if self.is_identity() {
            return Err(Error::NotAlternating);
        }
        let (_, t) = self.cyclic_reduce();
        let syl = &t.syl;
        if syl.len() < 2 || syl.len() % 2 != 0 {
            return Err(Error::NotAlternating);
        }
        for (i, &(g, _)) in syl.iter().enumerate() {
            let expect = if i % 2 == syl[0].0 - 1 { 2 } else { 1 };
            // generators must alternate between 1 and 2 only
            if g > 2 || (i > 0 && g == syl[i - 1].0) {
                return Err(Error::NotAlternating);
            }
            let _ = expect;
        }
        // rotations starting at x-syllables
        let n = syl.len();
        let starts: Vec<usize> = (0..n).filter(|&i| syl[i].0 == 1).collect();
        if starts.is_empty() {
            return Err(Error::NotAlternating);
        }
        let rotation = |start: usize| -> Vec<i64> {
            (0..n).map(|k| syl[(start + k) % n].1).collect()
        };
        let best = starts
            .iter()
            .map(|&s| rotation(s))
            .max()
            .expect("nonempty starts");
        let a: Vec<i64> = best.iter().step_by(2).copied().collect();
        let b: Vec<i64> = best.iter().skip(1).step_by(2).copied().collect();
        let r = a.len();
        Ok(CanonForm { a, b, r })
    }

    /// Maximal k with the cyclic word equal to v^k; root v is primitive.
    /// Non-cyclically-reduced input is cyclically reduced first; the
    /// conjugator is reported so `self = conj · root^power · conj⁻¹`.
    pub fn power_decompose(&self) -> Result<PowerDecomposition> {
        if self.is_identity() {
            return Err(Error::InvalidInput(
                "power decomposition of the identity word".into(),
            ));
        }
        let (conj, t) = self.cyclic_reduce();
        if t.syl.len() == 1 {
            let (g, e) = t.syl[0];
            return Ok(PowerDecomposition {
                root: Word {
                    d: self.d,
                    syl: vec![(g, e.signum())],
                },
                power: e.unsigned_abs(),
                conjugator: conj,
            });
        }
        let n = t.syl.len();
        // smallest period among divisor lengths, by rotation equality
        for period in 1..=n {
            if n % period != 0 {
                continue;
            }
            if (0..n).all(|i| t.syl[i] == t.syl[(i + period) % n]) {
                return Ok(PowerDecomposition {
                    root: Word {
                        d: self.d,
                        syl: t.syl[..period].to_vec(),
                    },
                    power: (n / period) as u64,
                    conjugator: conj,
                });
            }
        }
        unreachable!("period n always matches")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonForm {
    pub a: Vec<i64>,
    pub b: Vec<i64>,
    pub r: usize,
}

#[derive(Debug, Clone)]
pub struct PowerDecomposition {
    pub root: Word,
    pub power: u64,
    pub conjugator: Word,
}

/// Trace similarity: equal complexity and matching multisets of |aᵢ|, |bᵢ|.
pub fn trace_similar(w: &Word, v: &Word) -> Result<bool> {
    let cw = w.canon_form()?;
    let cv = v.canon_form()?;
    if cw.r != cv.r {
        return Ok(false);
    }
    let sorted_abs = |xs: &[i64]| {
        let mut v: Vec<u64> = xs.iter().map(|x| x.unsigned_abs()).collect();
        v.sort_unstable();
        v
    };
    Ok(sorted_abs(&cw.a) == sorted_abs(&cv.a) && sorted_abs(&cw.b) == sorted_abs(&cv.b))
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.syl.is_empty() {
            return write!(f, "()");
        }
        let name = |g: usize| match g {
            1 => "x".to_string(),
            2 => "y".to_string(),
            3 => "z".to_string(),
            i => format!("x{i}"),
        };
        let parts: Vec<String> = self
            .syl
            .iter()
            .map(|&(g, e)| {
                if e == 1 {
                    name(g)
                } else {
                    format!("{}^{}", name(g), e)
                }
            })
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

// ---------------------------------------------------------------------------
// parser
// ---------------------------------------------------------------------------

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    d: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            pos: self.pos,
            msg: msg.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn word(&mut self) -> Result<Word> {
        let mut out = Word::identity(self.d);
        let mut any = false;
        while let Some(c) = self.peek() {
            if c == b')' || c == b']' || c == b',' {
                break;
            }
            out = out.mul(&self.term()?);
            any = true;
        }
        if !any {
            return self.err("expected a word");
        }
        Ok(out)
    }

    fn term(&mut self) -> Result<Word> {
        let atom = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let e = self.int()?;
            Ok(atom.pow(e))
        } else {
            Ok(atom)
        }
    }

    fn atom(&mut self) -> Result<Word> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let w = self.word()?;
                if self.peek() != Some(b')') {
                    return self.err("expected ')'");
                }
                self.pos += 1;
                Ok(w)
            }
            Some(b'[') => {
                self.pos += 1;
                let a = self.word()?;
                if self.peek() != Some(b',') {
                    return self.err("expected ',' in commutator");
                }
                self.pos += 1;
                let b = self.word()?;
                if self.peek() != Some(b']') {
                    return self.err("expected ']'");
                }
                self.pos += 1;
                Ok(Word::commutator(&a, &b))
            }
            Some(c) => {
                let idx = match c {
                    b'x' => {
                        self.pos += 1;
                        // optional digits: x12 is generator 12
                        let start = self.pos;
                        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                            self.pos += 1;
                        }
                        if self.pos > start {
                            let s = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                            let i: usize = s
                                .parse()
                                .map_err(|_| Error::Parse {
                                    pos: start,
                                    msg: "bad generator index".into(),
                                })?;
                            if i == 0 {
                                return self.err("generator index must be ≥ 1");
                            }
                            i
                        } else {
                            1
                        }
                    }
                    b'y' => {
                        self.pos += 1;
                        2
                    }
                    b'z' => {
                        self.pos += 1;
                        3
                    }
                    _ => return self.err(format!("unexpected character '{}'", c as char)),
                };
                if idx > self.d {
                    return self.err(format!(
                        "generator index {idx} exceeds alphabet size {}",
                        self.d
                    ));
                }
                Ok(Word::gen(idx, self.d))
            }
            None => self.err("unexpected end of input"),
        }
    }

    fn int(&mut self) -> Result<i64> {
        self.skip_ws();
        let start = self.pos;
        let neg = if self.src.get(self.pos) == Some(&b'-') {
            self.pos += 1;
            true
        } else {
            false
        };
        let dstart = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == dstart {
            return Err(Error::Parse {
                pos: start,
                msg: "expected an integer exponent".into(),
            });
        }
        let s = std::str::from_utf8(&self.src[dstart..self.pos]).unwrap();
        let v: i64 = s.parse().map_err(|_| Error::Parse {
            pos: start,
            msg: "exponent out of range".into(),
        })?;
        if v == 0 {
            return Err(Error::Parse {
                pos: start,
                msg: "zero exponent is not allowed".into(),
            });
        }
        Ok(if neg { -v } else { v })
    }
}

/// Parses a word over an alphabet of size d.
pub fn parse_word(text: &str, d: usize) -> Result<Word> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        d,
    };
    let w = p.word()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return p.err("trailing input");
    }
    Ok(w)
}

/// Parses a word, inferring the alphabet size from the generators used
/// (at least `min_d`).
pub fn parse_word_infer(text: &str, min_d: usize) -> Result<Word> {
    // parse under a large alphabet, then shrink to the generators used
    let w = parse_word(text, 64)?;
    let used = w.syl.iter().map(|&(g, _)| g).max().unwrap_or(0);
    Ok(Word {
        d: used.max(min_d).max(1),
        syl: w.syl,
    })
}

// ---------------------------------------------------------------------------
// recursive laws and named sequences
// ---------------------------------------------------------------------------

/// A recursive law (w₀, f): v₁ = w₀(x,y), v_{n+1} = f(x, y, v_n).
#[derive(Debug, Clone)]
pub struct RecursiveLaw {
    pub first: Word,
    pub f: Word,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LawReport {
    /// Number of variables occurring in f (z must be among them).
    pub valence: usize,
    /// f(x, y, 1) reduces to the identity word.
    pub engel_like: bool,
}

impl RecursiveLaw {
    pub fn new(first: Word, f: Word) -> Result<RecursiveLaw> {
        let law = RecursiveLaw { first, f };
        law.validate()?;
        Ok(law)
    }

    /// Valence and Engel-likeness. The "descends along the derived series"
    /// condition is not algorithmically checkable and is reported unchecked.
    pub fn validate(&self) -> Result<LawReport> {
        if self.f.alphabet() != 3 {
            return Err(Error::InvalidLaw("law must be a word over (x, y, z)".into()));
        }
        let occurs: std::collections::HashSet<usize> =
            self.f.syl.iter().map(|&(g, _)| g).collect();
        if !occurs.contains(&3) {
            return Err(Error::InvalidLaw("z must occur in the law".into()));
        }
        let x = Word::gen(1, 3);
        let y = Word::gen(2, 3);
        let one = Word::identity(3);
        let engel_like = self
            .f
            .substitute(&[x, y, one])
            .expect("arity 3")
            .is_identity();
        Ok(LawReport {
            valence: occurs.len(),
            engel_like,
        })
    }

    /// f does not involve x (so the system restricts to pairs (y, z)).
    pub fn is_two_valent(&self) -> bool {
        self.f.syl.iter().all(|&(g, _)| g != 1)
    }

    /// n-th term of the sequence as a reduced word over (x, y).
    pub fn term(&self, n: usize) -> Result<Word> {
        if n == 0 {
            return Err(Error::InvalidInput("sequence index starts at 1".into()));
        }
        let mut v = self.first.clone();
        let x = Word::gen(1, 2);
        let y = Word::gen(2, 2);
        for _ in 1..n {
            v = self.f.substitute(&[x.clone(), y.clone(), v])?;
        }
        Ok(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SequenceKind {
    Engel,
    U,
    S,
    R,
}

impl SequenceKind {
    pub fn parse(s: &str) -> Result<SequenceKind> {
        match s {
            "engel" => Ok(SequenceKind::Engel),
            "u" => Ok(SequenceKind::U),
            "s" => Ok(SequenceKind::S),
            "r" => Ok(SequenceKind::R),
            _ => Err(Error::InvalidInput(format!("unknown sequence '{s}'"))),
        }
    }

    pub fn law(self) -> RecursiveLaw {
        let (first, f) = match self {
            SequenceKind::Engel => ("[x,y]", "[z,y]"),
            SequenceKind::U => ("x^-2 y^-1 x", "[x z x^-1, y z y^-1]"),
            SequenceKind::S => ("x", "[y z y^-1, z^-1]"),
            SequenceKind::R => ("x", "[y^2 z y^-2, z^-1]"),
        };
        RecursiveLaw::new(
            parse_word(first, 2).expect("builtin law parses"),
            parse_word(f, 3).expect("builtin law parses"),
        )
        .expect("builtin law is valid")
    }
}

/// n-th term of a named sequence.
pub fn sequence_word(kind: SequenceKind, n: usize) -> Result<Word> {
    kind.law().term(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::FieldSpec;
    use proptest::prelude::*;

    fn w(s: &str, d: usize) -> Word {
        parse_word(s, d).unwrap()
    }

    #[test]
    fn commutator_convention() {
        assert_eq!(
            w("[x,y]", 2).syllables(),
            &[(1, 1), (2, 1), (1, -1), (2, -1)]
        );
    }

    #[test]
    fn free_reduction() {
        assert_eq!(w("x x^-1 y", 2).syllables(), &[(2, 1)]);
        assert_eq!(w("x^-2 y^-1 x", 2).syllables(), &[(1, -2), (2, -1), (1, 1)]);
        assert!(w("x x^-1", 2).is_identity());
    }

    #[test]
    fn parse_errors_carry_position() {
        match parse_word("x^0", 2) {
            Err(Error::Parse { pos, .. }) => assert_eq!(pos, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
        assert!(parse_word("z", 2).is_err()); // index 3 > alphabet 2
        assert!(parse_word("x (", 2).is_err());
        assert!(parse_word("x4", 3).is_err());
        assert!(parse_word("x4", 4).is_ok());
    }

    #[test]
    fn print_parse_fixed_point() {
        for s in ["[x,y]", "x^-2 y^-1 x", "x^42 y^42", "[x z x^-1, y z y^-1]"] {
            let a = w(s, 3);
            let b = parse_word(&a.to_string(), 3).unwrap();
            assert_eq!(a, b);
            assert_eq!(a.to_string(), b.to_string());
        }
    }

    #[test]
    fn substitution_engel_and_identity() {
        let f = w("[z,y]", 3);
        let x = Word::gen(1, 2);
        let y = Word::gen(2, 2);
        let e1 = w("[x,y]", 2);
        let e2 = f.substitute(&[x.clone(), y.clone(), e1.clone()]).unwrap();
        assert_eq!(e2, Word::commutator(&e1, &y));
        // identity images give the word back
        let any = w("x^3 y^-2 x", 2);
        assert_eq!(any.substitute(&[x, y]).unwrap(), any);
        // u-law collapses when z ↦ 1
        let u = w("[x z x^-1, y z y^-1]", 3);
        let img = u
            .substitute(&[Word::gen(1, 2), Word::gen(2, 2), Word::identity(2)])
            .unwrap();
        assert!(img.is_identity());
    }

    #[test]
    fn named_sequences() {
        assert_eq!(sequence_word(SequenceKind::Engel, 1).unwrap(), w("[x,y]", 2));
        assert_eq!(
            sequence_word(SequenceKind::U, 1).unwrap(),
            w("x^-2 y^-1 x", 2)
        );
        assert_eq!(
            sequence_word(SequenceKind::S, 2).unwrap(),
            w("[y x y^-1, x^-1]", 2)
        );
        // e_{n+1} = [e_n, y] through the law
        let e3 = sequence_word(SequenceKind::Engel, 3).unwrap();
        let e2 = sequence_word(SequenceKind::Engel, 2).unwrap();
        assert_eq!(e3, Word::commutator(&e2, &Word::gen(2, 2)));
    }

    #[test]
    fn law_validation() {
        let u = RecursiveLaw::new(w("x^-2 y^-1 x", 2), w("[x z x^-1, y z y^-1]", 3)).unwrap();
        assert_eq!(
            u.validate().unwrap(),
            LawReport {
                valence: 3,
                engel_like: true
            }
        );
        assert!(!u.is_two_valent());

        let engel = RecursiveLaw::new(w("[x,y]", 2), w("[z,y]", 3)).unwrap();
        assert_eq!(
            engel.validate().unwrap(),
            LawReport {
                valence: 2,
                engel_like: true
            }
        );

        let zx = RecursiveLaw::new(w("x", 2), w("z x", 3)).unwrap();
        assert!(!zx.validate().unwrap().engel_like);

        let no_z = RecursiveLaw::new(w("x", 2), parse_word("x y", 3).unwrap());
        assert!(no_z.is_err());
    }

    #[test]
    fn canon_form_examples() {
        let c = w("x^2 y^3 x^-1 y", 2).canon_form().unwrap();
        assert_eq!(c.r, 2);
        assert_eq!((c.a.clone(), c.b.clone()), (vec![2, -1], vec![3, 1]));

        let c = w("[x,y]", 2).canon_form().unwrap();
        assert_eq!(c.r, 2);
        assert_eq!((c.a, c.b), (vec![1, -1], vec![1, -1]));

        let c = w("y^2 x", 2).canon_form().unwrap();
        assert_eq!(c.r, 1);
        assert_eq!((c.a, c.b), (vec![1], vec![2]));

        assert!(matches!(
            w("x^3", 2).canon_form(),
            Err(Error::NotAlternating)
        ));
    }

    #[test]
    fn trace_similarity() {
        assert!(trace_similar(&w("[x,y]", 2), &w("x^-1 y x y^-1", 2)).unwrap());
        assert!(!trace_similar(&w("x y", 2), &w("x^2 y", 2)).unwrap());
        let v = w("x^2 y^-3 x y", 2);
        assert!(trace_similar(&v, &v).unwrap());
    }

    #[test]
    fn power_decomposition() {
        let p = w("x y x y x y", 2).power_decompose().unwrap();
        assert_eq!((p.root, p.power), (w("x y", 2), 3));
        let p = w("[x,y]", 2).power_decompose().unwrap();
        assert_eq!((p.root, p.power), (w("[x,y]", 2), 1));
        let p = w("x^2 y x^2 y", 2).power_decompose().unwrap();
        assert_eq!((p.root, p.power), (w("x^2 y", 2), 2));
        let p = w("x^6", 2).power_decompose().unwrap();
        assert_eq!((p.root, p.power), (w("x", 2), 6));
        // rotations of powers still decompose, and the conjugator
        // reconstructs non-cyclically-reduced input
        let v = w("y x^2 y x^2", 2);
        let p = v.power_decompose().unwrap();
        assert_eq!((p.root.clone(), p.power), (w("y x^2", 2), 2));
        let v = w("x^-1 (x^2 y)^2 x", 2);
        let p = v.power_decompose().unwrap();
        let recon = p
            .conjugator
            .mul(&p.root.pow(p.power as i64))
            .mul(&p.conjugator.inverse());
        assert_eq!(recon, v);
        assert_eq!(p.power, 2);
    }

    #[test]
    fn evaluate_homomorphism_and_equivariance() {
        let f5 = FieldSpec::new(5, 1).unwrap();
        let g = GroupSpec::sl2(f5);
        let elems = g.elements().unwrap();
        let (a, b, h) = (elems[17], elems[42], elems[99]);
        let w1 = w("x y^-1", 2);
        let w2 = w("y x^2", 2);
        let lhs = w1.mul(&w2).evaluate(&g, &[a, b]).unwrap();
        let rhs = g.mul(
            &w1.evaluate(&g, &[a, b]).unwrap(),
            &w2.evaluate(&g, &[a, b]).unwrap(),
        );
        assert_eq!(lhs, rhs);
        // conjugation equivariance
        let word = w("[x, y] x^2", 2);
        let conj = |m: &crate::grp::GroupElement| g.mul(&g.mul(&h, m), &g.inv(&h));
        assert_eq!(
            word.evaluate(&g, &[conj(&a), conj(&b)]).unwrap(),
            conj(&word.evaluate(&g, &[a, b]).unwrap())
        );
        // [x,y] with x=y is the identity
        assert_eq!(
            w("[x,y]", 2).evaluate(&g, &[a, a]).unwrap(),
            g.identity()
        );
    }

    proptest! {
        #[test]
        fn reduction_idempotent_and_roundtrips(ops in proptest::collection::vec((1usize..=2, -3i64..=3), 0..12)) {
            let word = Word::from_syllables(2, ops.into_iter().filter(|&(_, e)| e != 0).collect());
            // rebuilding from its own syllables is a fixed point
            let again = Word::from_syllables(2, word.syllables().to_vec());
            prop_assert_eq!(&again, &word);
            if !word.is_identity() {
                let back = parse_word(&word.to_string(), 2).unwrap();
                prop_assert_eq!(back, word);
            }
        }

        #[test]
        fn inverse_cancels(ops in proptest::collection::vec((1usize..=3, -3i64..=3), 0..10)) {
            let word = Word::from_syllables(3, ops.into_iter().filter(|&(_, e)| e != 0).collect());
            prop_assert!(word.mul(&word.inverse()).is_identity());
        }
    }
}
