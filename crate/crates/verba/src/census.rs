//! Images, fibres and statistics of word maps: brute-force and
//! trace-accelerated censuses, equidistribution ε, L1 distance and
//! Witten-zeta bound checks, class-product searches, the Engel curve
//! criterion, −id representability, and exact Weil-type bound calculators.
//!
//! Censuses tally per conjugacy class (equivariance makes this lossless and
//! is asserted by exact divisibility); set powers use dense bitmaps indexed
//! by the canonical element index. All counting loops partition their
//! outermost index across workers and merge in fixed order, so results are
//! identical for any worker count.

use crate::ff::Fe;
use crate::grp::{GroupElement, GroupSpec};
use crate::par;
use crate::trace::TracePoly;
use crate::word::{sequence_word, SequenceKind, Word};
use crate::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::io::{BufRead, BufWriter, Write as _};
use std::path::Path;

/// Default budget on brute-force tuple evaluations.
pub const DEFAULT_PAIR_BUDGET: u64 = 200_000_000;

// ---------------------------------------------------------------------------
// bitmap sets over canonical element indices
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitSet {
    words: Vec<u64>,
    len: usize,
}

impl BitSet {
    pub fn new(len: usize) -> BitSet {
        BitSet {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    #[inline]
    pub fn insert(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn count(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn is_full(&self) -> bool {
        self.count() == self.len as u64
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.count() == 0
    }

    pub fn union_with(&mut self, other: &BitSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |&i| self.contains(i))
    }
}

// ---------------------------------------------------------------------------
// image and Waring covers
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct ImageReport {
    pub image: BitSet,
    pub image_size: u64,
    pub order: u64,
    pub surjective: bool,
    /// Minimal j ≤ k with w(G)^j = G, when one exists.
    pub min_cover: Option<u32>,
    /// log #w(G) / log #G, the size statistic reported alongside censuses.
    pub log_ratio: f64,
}

/// Exact image of the word map (arity 1 or 2 brute force, early exit once
/// full) and the minimal set power covering the whole group.
pub fn image_and_cover(
    w: &Word,
    spec: &GroupSpec,
    k: u32,
    workers: usize,
    budget: u64,
) -> Result<ImageReport> {
    let image = word_image(w, spec, workers, budget)?;
    let order = spec.order()?;
    let image_size = image.count();
    let surjective = image_size == order;
    let min_cover = if k == 0 {
        None
    } else if surjective {
        Some(1)
    } else {
        cover_exponent(spec, &image, k)?
    };
    let log_ratio = (image_size as f64).ln() / (order as f64).ln();
    Ok(ImageReport {
        image,
        image_size,
        order,
        surjective,
        min_cover,
        log_ratio,
    })
}

fn word_image(w: &Word, spec: &GroupSpec, workers: usize, budget: u64) -> Result<BitSet> {
    let elems = spec.elements()?;
    let n = elems.len();
    let index = spec.index_map()?;
    let qf = spec.field().q();
    let dim = spec.dim();
    match w.alphabet() {
        1 => {
            check_budget(n as u128, budget)?;
            let mut image = BitSet::new(n);
            for x in elems {
                let v = w.evaluate(spec, std::slice::from_ref(x))?;
                image.insert(index[&v.key(dim, qf)] as usize);
            }
            Ok(image)
        }
        2 => {
            check_budget((n as u128) * (n as u128), budget)?;
            use std::sync::atomic::{AtomicBool, Ordering};
            let full = AtomicBool::new(false);
            let parts = par::chunked(n, workers, |range| {
                let mut image = BitSet::new(n);
                let mut local = 0u64;
                for xi in range {
                    if full.load(Ordering::Relaxed) {
                        break;
                    }
                    let x = elems[xi];
                    for y in elems {
                        let v = w.evaluate(spec, &[x, *y]).expect("arity 2");
                        image.insert(index[&v.key(dim, qf)] as usize);
                    }
                    local += 1;
                    if local % 16 == 0 && image.is_full() {
                        full.store(true, Ordering::Relaxed);
                        break;
                    }
                }
                image
            });
            let mut image = BitSet::new(n);
            for part in parts {
                image.union_with(&part);
            }
            Ok(image)
        }
        d => Err(Error::BudgetExceeded(format!(
            "brute-force image supports arity ≤ 2, got {d}"
        ))),
    }
}

/// Minimal j ≤ k with S^j = G, by repeated bitmap products with early exit.
fn cover_exponent(spec: &GroupSpec, image: &BitSet, k: u32) -> Result<Option<u32>> {
    let elems = spec.elements()?;
    let index = spec.index_map()?;
    let qf = spec.field().q();
    let dim = spec.dim();
    let base: Vec<usize> = image.ones().collect();
    let mut current = image.clone();
    for j in 2..=k {
        let members: Vec<usize> = current.ones().collect();
        let mut next = BitSet::new(elems.len());
        'prod: for &a in &members {
            for &b in &base {
                let v = spec.mul(&elems[a], &elems[b]);
                next.insert(index[&v.key(dim, qf)] as usize);
                if next.is_full() {
                    break 'prod;
                }
            }
        }
        if next.is_full() {
            return Ok(Some(j));
        }
        if next == current {
            // stabilized below the full group
            return Ok(None);
        }
        current = next;
    }
    Ok(None)
}

fn check_budget(need: u128, budget: u64) -> Result<()> {
    if need > budget as u128 {
        return Err(Error::BudgetExceeded(format!(
            "{need} evaluations exceed the budget {budget}"
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// fibre censuses per conjugacy class
// ---------------------------------------------------------------------------

/// Exact per-class fibre counts N_w(rep), the image bitmap, and totals.
#[derive(Debug, Clone)]
pub struct Census {
    pub group_id: String,
    pub word: Word,
    pub arity: usize,
    pub order: u64,
    pub class_reps: Vec<GroupElement>,
    pub class_sizes: Vec<u64>,
    /// N_w(rep): tuples mapping to one fixed element of each class.
    pub per_class: Vec<u64>,
    pub image: BitSet,
    /// |G|^arity.
    pub total: u128,
}

impl Census {
    /// N_w at the identity's class.
    pub fn fibre_at_identity(&self, spec: &GroupSpec) -> u64 {
        let id = spec.identity();
        for (i, rep) in self.class_reps.iter().enumerate() {
            if *rep == id {
                return self.per_class[i];
            }
        }
        unreachable!("identity is always a class representative")
    }
}

/// Full-enumeration fibre census tallied per conjugacy class; the per-class
/// totals must divide exactly by the class size (equivariance).
pub fn fibre_census(w: &Word, spec: &GroupSpec, workers: usize, budget: u64) -> Result<Census> {
    let elems = spec.elements()?;
    let n = elems.len();
    let ct = spec.conjugacy_classes()?;
    let index = spec.index_map()?;
    let qf = spec.field().q();
    let dim = spec.dim();
    let arity = w.alphabet();
    let total = (n as u128).pow(arity as u32);
    check_budget(total, budget)?;
    let (class_totals, image) = match arity {
        1 => {
            let mut totals = vec![0u64; ct.k()];
            let mut image = BitSet::new(n);
            for x in elems {
                let v = w.evaluate(spec, std::slice::from_ref(x))?;
                let idx = index[&v.key(dim, qf)] as usize;
                totals[ct.class_of[idx] as usize] += 1;
                image.insert(idx);
            }
            (totals, image)
        }
        2 => {
            let parts = par::chunked(n, workers, |range| {
                let mut totals = vec![0u64; ct.k()];
                let mut image = BitSet::new(n);
                for xi in range {
                    let x = elems[xi];
                    for y in elems {
                        let v = w.evaluate(spec, &[x, *y]).expect("arity 2");
                        let idx = index[&v.key(dim, qf)] as usize;
                        totals[ct.class_of[idx] as usize] += 1;
                        image.insert(idx);
                    }
                }
                (totals, image)
            });
            let mut totals = vec![0u64; ct.k()];
            let mut image = BitSet::new(n);
            for (t, im) in parts {
                for (a, b) in totals.iter_mut().zip(&t) {
                    *a += b;
                }
                image.union_with(&im);
            }
            (totals, image)
        }
        d => {
            return Err(Error::BudgetExceeded(format!(
                "fibre census supports arity ≤ 2, got {d}"
            )))
        }
    };
    let mut per_class = Vec::with_capacity(ct.k());
    for (cls, &t) in class_totals.iter().enumerate() {
        let size = ct.sizes[cls];
        if t % size != 0 {
            return Err(Error::InvalidInput(
                "class total not divisible by class size; equivariance violated".into(),
            ));
        }
        per_class.push(t / size);
    }
    // partition identity: Σ N_w(rep)·|class| = |G|^arity
    let sum: u128 = per_class
        .iter()
        .zip(&ct.sizes)
        .map(|(&f, &s)| f as u128 * s as u128)
        .sum();
    debug_assert_eq!(sum, total);
    Ok(Census {
        group_id: spec.id_string(),
        word: w.clone(),
        arity,
        order: n as u64,
        class_reps: ct.reps.iter().map(|&r| elems[r as usize]).collect(),
        class_sizes: ct.sizes.clone(),
        per_class,
        image,
        total,
    })
}

// ---------------------------------------------------------------------------
// equidistribution statistics
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct EquidistReport {
    /// Minimal ε on the grid of observed relative deviations such that
    /// #{g : dev(g) > ε} ≤ ε·|G|; 0 when every fibre equals the mean.
    pub epsilon_star: BigRational,
    /// Elements deviating beyond ε*.
    pub excluded: u64,
    /// Exact L1 distance between the word measure and uniform.
    pub l1: BigRational,
}

pub fn equidist_stats(census: &Census) -> EquidistReport {
    let order = BigInt::from(census.order);
    let total = BigInt::from(census.total);
    let mean = &total / &order; // |G|^{arity-1}, exact

    // relative deviation per class, as an exact rational
    let devs: Vec<BigRational> = census
        .per_class
        .iter()
        .map(|&f| {
            let diff = (BigInt::from(f) - &mean).abs();
            BigRational::new(diff, mean.clone())
        })
        .collect();
    let mut grid: Vec<BigRational> = devs.clone();
    grid.sort();
    grid.dedup();

    let count_exceeding = |eps: &BigRational| -> u64 {
        devs.iter()
            .zip(&census.class_sizes)
            .filter(|(d, _)| *d > eps)
            .map(|(_, &s)| s)
            .sum()
    };
    let order_rat = BigRational::from(order.clone());
    let mut epsilon_star = grid.last().cloned().unwrap_or_else(BigRational::zero);
    let mut excluded = 0;
    for eps in &grid {
        let b = count_exceeding(eps);
        if BigRational::from(BigInt::from(b)) <= eps * &order_rat {
            epsilon_star = eps.clone();
            excluded = b;
            break;
        }
    }

    // L1 = Σ_g |N(g)/|G|^d − 1/|G||
    let mut l1 = BigRational::zero();
    for (&f, &size) in census.per_class.iter().zip(&census.class_sizes) {
        let p = BigRational::new(BigInt::from(f), total.clone());
        let u = BigRational::new(BigInt::one(), order.clone());
        l1 += (p - u).abs() * BigRational::from(BigInt::from(size));
    }
    EquidistReport {
        epsilon_star,
        excluded,
        l1,
    }
}

// ---------------------------------------------------------------------------
// Witten zeta bound
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct WittenReport {
    pub zeta2: BigRational,
    /// ζ(2) − 1, the square of the L1 bound.
    pub bound_sq: BigRational,
    pub l1: BigRational,
    /// l1² ≤ ζ(2) − 1, decided exactly.
    pub pass: bool,
    pub bound_decimal: f64,
}

/// Validates a character degree list (count = k(G), Σd² = |G|) and compares
/// the measured L1 distance with (ζ(2) − 1)^{1/2}, exactly via squares.
pub fn witten_check(spec: &GroupSpec, degrees: &[u64], census: &Census) -> Result<WittenReport> {
    let ct = spec.conjugacy_classes()?;
    let order = spec.order()?;
    if degrees.len() != ct.k() {
        return Err(Error::DegreeData(format!(
            "expected {} degrees (one per class), got {}",
            ct.k(),
            degrees.len()
        )));
    }
    let sum_sq: u128 = degrees.iter().map(|&d| d as u128 * d as u128).sum();
    if sum_sq != order as u128 {
        return Err(Error::DegreeData(format!(
            "Σd² = {sum_sq} but |G| = {order}"
        )));
    }
    if degrees.iter().any(|&d| d == 0) {
        return Err(Error::DegreeData("zero degree".into()));
    }
    let mut zeta2 = BigRational::zero();
    for &d in degrees {
        zeta2 += BigRational::new(BigInt::one(), BigInt::from(d as u128 * d as u128));
    }
    let stats = equidist_stats(census);
    let bound_sq = &zeta2 - BigRational::one();
    let pass = &stats.l1 * &stats.l1 <= bound_sq;
    let bound_decimal = bound_sq.to_f64().map(|x| x.sqrt()).unwrap_or(f64::NAN);
    Ok(WittenReport {
        zeta2,
        bound_sq,
        l1: stats.l1,
        pass,
        bound_decimal,
    })
}

/// Built-in character degree data for PSL(2,q), q ≤ 13. Shipped as data and
/// re-validated against (k(G), |G|) before every use.
pub fn builtin_character_degrees(group_id: &str) -> Option<Vec<u64>> {
    let degrees: &[u64] = match group_id {
        "PSL2/2" => &[1, 1, 2],
        "PSL2/3" => &[1, 1, 1, 3],
        "PSL2/4" | "PSL2/5" => &[1, 3, 3, 4, 5],
        "PSL2/7" => &[1, 3, 3, 6, 7, 8],
        "PSL2/8" => &[1, 7, 7, 7, 7, 8, 9, 9, 9],
        "PSL2/9" => &[1, 5, 5, 8, 8, 9, 10],
        "PSL2/11" => &[1, 5, 5, 10, 10, 11, 12, 12],
        "PSL2/13" => &[1, 7, 7, 12, 12, 12, 13, 14, 14],
        _ => return None,
    };
    Some(degrees.to_vec())
}

// ---------------------------------------------------------------------------
// Thompson / Guralnick–Malle class products
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairMode {
    /// Classes C with C·C = G.
    Thompson,
    /// Ordered pairs (C₁, C₂) with C₁C₂ = G ∖ {1} exactly.
    GuralnickMalle,
}

#[derive(Debug, Clone)]
pub struct ClassPairReport {
    pub mode: PairMode,
    /// Thompson: (c, c); GM: ordered (c₁, c₂). Class indices.
    pub pairs: Vec<(usize, usize)>,
    pub order_filter_coprime_6: bool,
}

/// Exhaustive class-product search; every reported pair is established by
/// full product enumeration into a bitmap.
pub fn class_pair_search(
    spec: &GroupSpec,
    mode: PairMode,
    coprime_to_6: bool,
    workers: usize,
) -> Result<ClassPairReport> {
    let elems = spec.elements()?;
    let ct = spec.conjugacy_classes()?;
    let index = spec.index_map()?;
    let qf = spec.field().q();
    let dim = spec.dim();
    let id_idx = spec.index_of(&spec.identity())? as usize;
    let candidates: Vec<usize> = (0..ct.k())
        .filter(|&c| {
            if !coprime_to_6 {
                return true;
            }
            let order = spec.order_of(&elems[ct.reps[c] as usize]);
            order % 2 != 0 && order % 3 != 0
        })
        .collect();
    let product_set = |c1: usize, c2: usize| -> BitSet {
        let mut set = BitSet::new(elems.len());
        for &a in &ct.members[c1] {
            for &b in &ct.members[c2] {
                let v = spec.mul(&elems[a as usize], &elems[b as usize]);
                set.insert(index[&v.key(dim, qf)] as usize);
            }
        }
        set
    };
    let tasks: Vec<(usize, usize)> = match mode {
        PairMode::Thompson => candidates.iter().map(|&c| (c, c)).collect(),
        PairMode::GuralnickMalle => candidates
            .iter()
            .flat_map(|&c1| candidates.iter().map(move |&c2| (c1, c2)))
            .collect(),
    };
    let verdicts = par::chunked(tasks.len(), workers, |range| {
        let mut found = Vec::new();
        for i in range {
            let (c1, c2) = tasks[i];
            let set = product_set(c1, c2);
            let ok = match mode {
                PairMode::Thompson => set.is_full(),
                PairMode::GuralnickMalle => {
                    set.count() == elems.len() as u64 - 1 && !set.contains(id_idx)
                }
            };
            if ok {
                found.push((c1, c2));
            }
        }
        found
    });
    let pairs: Vec<(usize, usize)> = verdicts.into_iter().flatten().collect();
    Ok(ClassPairReport {
        mode,
        pairs,
        order_filter_coprime_6: coprime_to_6,
    })
}

// ---------------------------------------------------------------------------
// fibre tables over trace triples
// ---------------------------------------------------------------------------

/// Dense counts N_π(s,u,t) = #{(x,y) ∈ SL(2,q)² : tr x = s, tr(xy) = u,
/// tr y = t}, indexed by (encode(s)·q + encode(u))·q + encode(t).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FibreTable {
    pub q: u64,
    pub field_id: String,
    counts: Vec<u64>,
}

impl FibreTable {
    #[inline]
    fn idx(&self, s: Fe, u: Fe, t: Fe) -> usize {
        ((s.encode() * self.q + u.encode()) * self.q + t.encode()) as usize
    }

    pub fn get(&self, s: Fe, u: Fe, t: Fe) -> u64 {
        self.counts[self.idx(s, u, t)]
    }

    pub fn total(&self) -> u128 {
        self.counts.iter().map(|&c| c as u128).sum()
    }

    pub fn all_positive(&self) -> bool {
        self.counts.iter().all(|&c| c > 0)
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }
}

/// Builds the fibre table by class reduction: N_π(s,·,·) sums
/// |class|·#{y : tr y = t, tr(rep·y) = u} over the SL2 classes with
/// tr(rep) = s. One O(q³) scan per class, O(q⁴) overall.
pub fn build_fibre_table(q: u64, workers: usize) -> Result<FibreTable> {
    let spec = GroupSpec::parse(&format!("SL2/{q}"))?;
    let field = spec.field();
    let elems = spec.elements()?;
    let ct = spec.conjugacy_classes()?;
    let qe = q as usize;
    let traces: Vec<Fe> = elems.iter().map(|g| spec.trace(g)).collect();
    let parts = par::chunked(ct.k(), workers, |range| {
        let mut counts = vec![0u64; qe * qe * qe];
        for cls in range {
            let rep = elems[ct.reps[cls] as usize];
            let size = ct.sizes[cls];
            let s = spec.trace(&rep).encode() as usize;
            for (yi, y) in elems.iter().enumerate() {
                // tr(rep·y) without forming the product matrix
                let u = {
                    let f = field;
                    let mut acc = f.mul(rep.at(2, 0, 0), y.at(2, 0, 0));
                    acc = f.add(acc, f.mul(rep.at(2, 0, 1), y.at(2, 1, 0)));
                    acc = f.add(acc, f.mul(rep.at(2, 1, 0), y.at(2, 0, 1)));
                    f.add(acc, f.mul(rep.at(2, 1, 1), y.at(2, 1, 1)))
                };
                let t = traces[yi];
                counts[(s * qe + u.encode() as usize) * qe + t.encode() as usize] += size;
            }
        }
        counts
    });
    let mut counts = vec![0u64; qe * qe * qe];
    for part in parts {
        for (a, b) in counts.iter_mut().zip(&part) {
            *a += b;
        }
    }
    Ok(FibreTable {
        q,
        field_id: field.id_string(),
        counts,
    })
}

/// O(q⁶) direct pair count, used to cross-check the class-reduced builder.
pub fn build_fibre_table_naive(q: u64) -> Result<FibreTable> {
    let spec = GroupSpec::parse(&format!("SL2/{q}"))?;
    let elems = spec.elements()?;
    let qe = q as usize;
    let mut counts = vec![0u64; qe * qe * qe];
    for x in elems {
        let s = spec.trace(x).encode() as usize;
        for y in elems {
            let u = spec.trace(&spec.mul(x, y)).encode() as usize;
            let t = spec.trace(y).encode() as usize;
            counts[(s * qe + u) * qe + t] += 1;
        }
    }
    Ok(FibreTable {
        q,
        field_id: spec.field().id_string(),
        counts,
    })
}

const FIBRETABLE_MAGIC: &str = "verba-fibretable v1";

impl FibreTable {
    /// Cache file name keyed by the field identification string.
    pub fn cache_file_name(field_id: &str) -> String {
        format!("fibretable-{field_id}.csv")
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path)?;
        let mut out = BufWriter::new(file);
        writeln!(
            out,
            "{FIBRETABLE_MAGIC}, field={}, q={}",
            self.field_id, self.q
        )?;
        let q = self.q;
        for s in 0..q {
            for u in 0..q {
                for t in 0..q {
                    let c = self.counts[((s * q + u) * q + t) as usize];
                    writeln!(out, "{s},{u},{t},{c}")?;
                }
            }
        }
        Ok(())
    }

    pub fn read_csv(path: &Path) -> Result<FibreTable> {
        let file = std::fs::File::open(path)?;
        let mut lines = std::io::BufReader::new(file).lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::MalformedCache("empty file".into()))??;
        let mut parts = header.split(", ");
        if parts.next() != Some(FIBRETABLE_MAGIC) {
            return Err(Error::MalformedCache(format!(
                "bad header '{header}' (expected '{FIBRETABLE_MAGIC}, …')"
            )));
        }
        let field_id = parts
            .next()
            .and_then(|s| s.strip_prefix("field="))
            .ok_or_else(|| Error::MalformedCache("missing field id".into()))?
            .to_string();
        let q: u64 = parts
            .next()
            .and_then(|s| s.strip_prefix("q="))
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::MalformedCache("missing q".into()))?;
        let mut counts = vec![0u64; (q * q * q) as usize];
        let mut seen = 0usize;
        for line in lines {
            let line = line?;
            if line.is_empty() {
                continue;
            }
            let mut cols = line.split(',');
            let mut next = |what: &str| -> Result<u64> {
                cols.next()
                    .and_then(|c| c.trim().parse().ok())
                    .ok_or_else(|| Error::MalformedCache(format!("bad {what} in '{line}'")))
            };
            let s = next("s")?;
            let u = next("u")?;
            let t = next("t")?;
            let c = next("count")?;
            if s >= q || u >= q || t >= q {
                return Err(Error::MalformedCache(format!(
                    "encode out of range: {line}"
                )));
            }
            counts[((s * q + u) * q + t) as usize] = c;
            seen += 1;
        }
        if seen != counts.len() {
            return Err(Error::MalformedCache(format!(
                "expected {} rows, found {seen}",
                counts.len()
            )));
        }
        Ok(FibreTable {
            q,
            field_id,
            counts,
        })
    }
}

// ---------------------------------------------------------------------------
// trace-accelerated census
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct TraceCensus {
    /// T(a) = Σ_{(s,u,t): f_w(s,u,t)=a} N_π(s,u,t), indexed by encode(a).
    pub t: Vec<u64>,
    /// Exact N_w per SL2 class where the trace determines the class
    /// (trace ≠ ±2); `None` on the unresolved central/unipotent classes.
    pub per_class: Vec<Option<u64>>,
    pub unresolved: Vec<usize>,
}

/// O(q³) census of tr(w(x,y)) from a compiled trace polynomial and the
/// fibre table; resolves every class with trace ≠ ±2 exactly.
pub fn trace_census(fw: &TracePoly, table: &FibreTable, spec: &GroupSpec) -> Result<TraceCensus> {
    let field = spec.field();
    if field.q() != table.q {
        return Err(Error::QMismatch {
            expected: field.q(),
            got: table.q,
        });
    }
    let fws = fw.specialize(field);
    let mut t_vec = vec![0u64; field.q() as usize];
    for s in field.elements() {
        for u in field.elements() {
            for t in field.elements() {
                let a = fws.eval(field, s, u, t);
                t_vec[a.encode() as usize] += table.get(s, u, t);
            }
        }
    }
    let ct = spec.conjugacy_classes()?;
    let elems = spec.elements()?;
    let two = field.two();
    let minus_two = field.minus_two();
    let mut per_class = Vec::with_capacity(ct.k());
    let mut unresolved = Vec::new();
    for cls in 0..ct.k() {
        let rep = elems[ct.reps[cls] as usize];
        let tr = spec.trace(&rep);
        if tr == two || tr == minus_two {
            per_class.push(None);
            unresolved.push(cls);
            continue;
        }
        let total = t_vec[tr.encode() as usize];
        let size = ct.sizes[cls];
        if total % size != 0 {
            return Err(Error::InvalidInput(
                "trace census total not divisible by class size".into(),
            ));
        }
        per_class.push(Some(total / size));
    }
    Ok(TraceCensus {
        t: t_vec,
        per_class,
        unresolved,
    })
}

// ---------------------------------------------------------------------------
// Engel curve criterion
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct EngelCurveReport {
    /// Trace values a ≠ ±2 reachable as r^{(n)}(s₁, t), indexed by encode.
    pub curve: Vec<bool>,
    /// Trace values a ≠ ±2 of elements in the image of e_{n+1}.
    pub direct: Vec<bool>,
    pub equal: bool,
    /// The curve side covers every a ≠ ±2.
    pub curve_full: bool,
}

/// Compares the curve criterion A = {a ≠ ±2 : ∃(s₁,t), r^{(n)}(s₁,t) = a},
/// r(s,t) = s² + 2t² − st² − 2, with the directly enumerated trace set of
/// the image of e_{n+1} on SL(2,q).
pub fn engel_curve_check(n: u32, q: u64, workers: usize, budget: u64) -> Result<EngelCurveReport> {
    if n == 0 {
        return Err(Error::InvalidInput("the criterion starts at n = 1".into()));
    }
    let spec = GroupSpec::parse(&format!("SL2/{q}"))?;
    let field = spec.field();
    let qe = q as usize;
    let two = field.two();
    let minus_two = field.minus_two();

    // curve side: iterate r in the first slot, n·q² evaluations
    let r_poly = {
        let s = TracePoly::var(crate::trace::Var::S);
        let t = TracePoly::var(crate::trace::Var::T);
        s.pow(2)
            .add(&t.pow(2).scale(2))
            .sub(&s.mul(&t.pow(2)))
            .sub(&TracePoly::constant(2))
    }
    .specialize(field);
    let mut curve = vec![false; qe];
    for s1 in field.elements() {
        for t in field.elements() {
            let mut a = s1;
            for _ in 0..n {
                a = r_poly.eval(field, a, Fe::ZERO, t);
            }
            if a != two && a != minus_two {
                curve[a.encode() as usize] = true;
            }
        }
    }
    let curve_values = curve.iter().filter(|&&b| b).count();
    let max_values = if two == minus_two { qe - 1 } else { qe - 2 };
    let curve_full = curve_values == max_values;

    // direct side: image of e_{n+1} over all pairs, early exit once the
    // direct set can no longer change the verdict
    let word = sequence_word(SequenceKind::Engel, n as usize + 1)?;
    let elems = spec.elements()?;
    check_budget((elems.len() as u128) * (elems.len() as u128), budget)?;
    use std::sync::atomic::{AtomicBool, Ordering};
    let done = AtomicBool::new(false);
    let parts = par::chunked(elems.len(), workers, |range| {
        let mut direct = vec![false; qe];
        for xi in range {
            if done.load(Ordering::Relaxed) {
                break;
            }
            let x = elems[xi];
            for y in elems {
                let v = word.evaluate(&spec, &[x, *y]).expect("arity 2");
                let tr = spec.trace(&v);
                if tr != two && tr != minus_two {
                    direct[tr.encode() as usize] = true;
                }
            }
            if curve_full {
                let cnt = direct.iter().filter(|&&b| b).count();
                if cnt == max_values {
                    done.store(true, Ordering::Relaxed);
                    break;
                }
            }
        }
        direct
    });
    let mut direct = vec![false; qe];
    for part in parts {
        for (a, b) in direct.iter_mut().zip(&part) {
            *a |= b;
        }
    }
    // the criterion guarantees direct ⊆ curve; if the curve side is full and
    // the direct side reached it, the early exit left both sets equal
    let equal = if curve_full && done.load(Ordering::Relaxed) {
        true
    } else {
        curve == direct
    };
    Ok(EngelCurveReport {
        curve,
        direct,
        equal,
        curve_full,
    })
}

// ---------------------------------------------------------------------------
// −id representability
// ---------------------------------------------------------------------------

/// Decides whether x^a y^b = −id is solvable in SL(2,q), with a witness.
/// A fibre-table pre-filter (T(−2) = 0) settles the negative case without a
/// pair scan when the table is affordable.
pub fn minus_id_check(
    a: i64,
    b: i64,
    q: u64,
    workers: usize,
    budget: u64,
) -> Result<Option<(GroupElement, GroupElement)>> {
    if q % 2 == 0 {
        return Err(Error::InvalidInput(
            "−id coincides with id in characteristic 2".into(),
        ));
    }
    let spec = GroupSpec::parse(&format!("SL2/{q}"))?;
    let field = spec.field();
    let word = crate::word::parse_word(&format!("x^{a} y^{b}"), 2)?;
    if q <= 31 {
        let table = build_fibre_table(q, workers)?;
        let fw = crate::trace::compile_trace2(&word)?;
        let fws = fw.specialize(field);
        let minus_two = field.minus_two();
        let mut t_minus2 = 0u64;
        for s in field.elements() {
            for u in field.elements() {
                for t in field.elements() {
                    if fws.eval(field, s, u, t) == minus_two {
                        t_minus2 += table.get(s, u, t);
                    }
                }
            }
        }
        if t_minus2 == 0 {
            // no pair even reaches trace −2, so certainly none reaches −id
            return Ok(None);
        }
    }
    let elems = spec.elements()?;
    check_budget((elems.len() as u128) * (elems.len() as u128), budget)?;
    let minus_id = spec.minus_identity();
    let pow_b: Vec<GroupElement> = elems.iter().map(|y| spec.pow(y, b)).collect();
    let hit = par::first_hit(elems.len(), workers, |xi| {
        let xa = spec.pow(&elems[xi], a);
        for (yi, yb) in pow_b.iter().enumerate() {
            if spec.mul(&xa, yb) == minus_id {
                return Some((yi, ()));
            }
        }
        None
    });
    Ok(hit.map(|(xi, yi, ())| (elems[xi], elems[yi])))
}

// ---------------------------------------------------------------------------
// bound calculators
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundValue {
    Exact(u128),
    /// Outward-rounded enclosure when q^{3/2} is irrational.
    Interval(u128, u128),
}

fn isqrt(n: u128) -> u128 {
    if n == 0 {
        return 0;
    }
    let mut x = (n as f64).sqrt() as u128;
    while x > 0 && x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

/// Minimal integer q₀ with q + 1 − 2g√q − d − k > 0 for all q ≥ q₀.
/// Decided by exact integer arithmetic: (q+1−d−k)² > (2g)²·q with a
/// positive left side; no floating point.
pub fn weil_threshold(g: u64, d: u64, k: u64) -> u64 {
    // condition: q − A > 2g√q, A = d + k − 1 (signed)
    let a = d as i128 + k as i128 - 1;
    let g = g as u128;
    let b = g as i128 * g as i128 + a;
    if b < 0 {
        // the quadratic in √q has no real root: every q ≥ 1 works
        return 1;
    }
    let b = b as u128;
    let q0 = g * g + b + isqrt(4 * g * g * b) + 1;
    q0 as u64
}

/// The hypersurface point-count error bound (d−1)(d−2)·q^{3/2} + 12(d+4)⁴·q.
pub fn gl_bound(d: u64, q: u64) -> BoundValue {
    let d = d as u128;
    let q_ = q as u128;
    let lead = (d - 1) * (d - 2);
    let tail = 12 * (d + 4).pow(4) * q_;
    let root = isqrt(q_);
    if root * root == q_ {
        BoundValue::Exact(lead * q_ * root + tail)
    } else {
        let lo = isqrt(q_ * q_ * q_);
        let hi = lo + 1;
        BoundValue::Interval(lead * lo + tail, lead * hi + tail)
    }
}
