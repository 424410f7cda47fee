//! Matrix groups as finite point sets: SL(2,q), PSL(2,q), SL(3,3) and the
//! parametrized Suzuki family; element arithmetic, deterministic enumeration,
//! conjugacy classes.
//!
//! Enumeration order is pinned so every census and search is reproducible:
//! SL2 loops (a,b,c) in field-encode order solving for d (the a=0 branch
//! runs inside the same a-loop), PSL2 keeps the canonical representative of
//! {M, −M}, SL3 scans entry tuples in ascending encode order. All census
//! arrays are indexed by the position in this order.

use crate::ff::{Fe, FieldSpec};
use crate::{Error, Result};
use std::collections::HashMap;
use std::sync::OnceLock;

/// Default cap on full group enumeration.
pub const DEFAULT_ENUM_CAP: u64 = 100_000;

/// Default cap on dense multiplication tables (memory is order² × 2 bytes).
pub const DEFAULT_MULTABLE_CAP: u64 = 6_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    Sl2,
    Psl2,
    Sl3,
    /// The parametrized family inside Sz(2^{2m+1}); no full enumeration.
    Suzuki {
        m: u32,
    },
}

/// A matrix-group element: row-major entries, first dim² slots used, the
/// rest zero. Interpreted under the [`GroupSpec`] passed to each operation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GroupElement {
    e: [Fe; 16],
}

impl GroupElement {
    pub fn from_entries(entries: &[Fe]) -> GroupElement {
        let mut e = [Fe::ZERO; 16];
        e[..entries.len()].copy_from_slice(entries);
        GroupElement { e }
    }

    #[inline]
    pub fn entries(&self, dim: usize) -> &[Fe] {
        &self.e[..dim * dim]
    }

    #[inline]
    pub fn at(&self, dim: usize, i: usize, j: usize) -> Fe {
        self.e[i * dim + j]
    }

    #[inline]
    fn set(&mut self, dim: usize, i: usize, j: usize, v: Fe) {
        self.e[i * dim + j] = v;
    }

    /// Mixed-radix packing of the entry encodes; injective for dim² entries
    /// over any supported q.
    pub fn key(&self, dim: usize, q: u64) -> u128 {
        let mut k: u128 = 0;
        for idx in 0..dim * dim {
            k = k * q as u128 + self.e[idx].encode() as u128;
        }
        k
    }
}

pub struct GroupSpec {
    variant: Variant,
    field: FieldSpec,
    dim: usize,
    enum_cap: u64,
    elements: OnceLock<Vec<GroupElement>>,
    index: OnceLock<HashMap<u128, u32>>,
    classes: OnceLock<ClassTable>,
}

/// Conjugacy classes: deterministic representative = least element in
/// enumeration order per class.
pub struct ClassTable {
    pub reps: Vec<u32>,
    pub sizes: Vec<u64>,
    /// element index → class index
    pub class_of: Vec<u32>,
    /// element indices grouped by class, in enumeration order
    pub members: Vec<Vec<u32>>,
}

impl ClassTable {
    pub fn k(&self) -> usize {
        self.reps.len()
    }
}

impl GroupSpec {
    pub fn sl2(field: FieldSpec) -> GroupSpec {
        GroupSpec::with_variant(Variant::Sl2, field)
    }

    pub fn psl2(field: FieldSpec) -> GroupSpec {
        GroupSpec::with_variant(Variant::Psl2, field)
    }

    /// SL(3,q); restricted to q=3 unless the enumeration cap is raised.
    pub fn sl3(field: FieldSpec) -> Result<GroupSpec> {
        if field.q() != 3 {
            return Err(Error::UnsupportedGroup(format!(
                "SL3 is capped to q=3 by default (got q={})",
                field.q()
            )));
        }
        Ok(GroupSpec::with_variant(Variant::Sl3, field))
    }

    /// The Suzuki parameter family over F_{2^{2m+1}}.
    pub fn suzuki_family(m: u32) -> Result<GroupSpec> {
        let field = FieldSpec::new(2, 2 * m + 1)?;
        Ok(GroupSpec::with_variant(Variant::Suzuki { m }, field))
    }

    fn with_variant(variant: Variant, field: FieldSpec) -> GroupSpec {
        let dim = match variant {
            Variant::Sl2 | Variant::Psl2 => 2,
            Variant::Sl3 => 3,
            Variant::Suzuki { .. } => 4,
        };
        GroupSpec {
            variant,
            field,
            dim,
            enum_cap: DEFAULT_ENUM_CAP,
            elements: OnceLock::new(),
            index: OnceLock::new(),
            classes: OnceLock::new(),
        }
    }

    pub fn with_enum_cap(mut self, cap: u64) -> GroupSpec {
        self.enum_cap = cap;
        self
    }

    /// Parses "SL2/7", "PSL2/9", "SL3/3", "Sz-family/1".
    pub fn parse(s: &str) -> Result<GroupSpec> {
        let (name, param) = s
            .split_once('/')
            .ok_or_else(|| Error::InvalidInput(format!("bad group spec '{s}'")))?;
        let val: u64 = param
            .parse()
            .map_err(|_| Error::InvalidInput(format!("bad group parameter '{param}'")))?;
        match name {
            "SL2" | "sl2" => Ok(GroupSpec::sl2(field_of_size(val)?)),
            "PSL2" | "psl2" => Ok(GroupSpec::psl2(field_of_size(val)?)),
            "SL3" | "sl3" => GroupSpec::sl3(field_of_size(val)?),
            "Sz-family" | "sz-family" | "Sz" => GroupSpec::suzuki_family(val as u32),
            _ => Err(Error::InvalidInput(format!("unknown group '{name}'"))),
        }
    }

    /// Group identification string for reports.
    pub fn id_string(&self) -> String {
        match self.variant {
            Variant::Sl2 => format!("SL2/{}", self.field.q()),
            Variant::Psl2 => format!("PSL2/{}", self.field.q()),
            Variant::Sl3 => format!("SL3/{}", self.field.q()),
            Variant::Suzuki { m } => format!("Sz-family/{m}"),
        }
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }
    pub fn field(&self) -> &FieldSpec {
        &self.field
    }
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn identity(&self) -> GroupElement {
        let mut g = GroupElement::from_entries(&[]);
        for i in 0..self.dim {
            g.set(self.dim, i, i, Fe::ONE);
        }
        g
    }

    pub fn minus_identity(&self) -> GroupElement {
        let mut g = GroupElement::from_entries(&[]);
        let m1 = self.field.neg(Fe::ONE);
        for i in 0..self.dim {
            g.set(self.dim, i, i, m1);
        }
        if self.variant == Variant::Psl2 {
            self.canon(g)
        } else {
            g
        }
    }

    /// PSL2 canonical representative: the lexicographically smaller of
    /// {M, −M} under entry encodes. Identity on other variants.
    pub fn canon(&self, g: GroupElement) -> GroupElement {
        if self.variant != Variant::Psl2 || self.field.p() == 2 {
            return g;
        }
        let mut neg = g;
        for idx in 0..4 {
            neg.e[idx] = self.field.neg(g.e[idx]);
        }
        if neg.e[..4] < g.e[..4] {
            neg
        } else {
            g
        }
    }

    pub fn mul(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        let d = self.dim;
        let f = &self.field;
        let mut out = GroupElement::from_entries(&[]);
        for i in 0..d {
            for j in 0..d {
                let mut acc = Fe::ZERO;
                for k in 0..d {
                    acc = f.add(acc, f.mul(a.at(d, i, k), b.at(d, k, j)));
                }
                out.set(d, i, j, acc);
            }
        }
        self.canon(out)
    }

    pub fn inv(&self, g: &GroupElement) -> GroupElement {
        let d = self.dim;
        let f = &self.field;
        let out = if d == 2 {
            // adjugate of a determinant-1 matrix
            GroupElement::from_entries(&[
                g.at(2, 1, 1),
                f.neg(g.at(2, 0, 1)),
                f.neg(g.at(2, 1, 0)),
                g.at(2, 0, 0),
            ])
        } else {
            self.inv_gauss(g)
        };
        self.canon(out)
    }

    fn inv_gauss(&self, g: &GroupElement) -> GroupElement {
        let d = self.dim;
        let f = &self.field;
        // augmented [g | I], Gauss-Jordan
        let mut a = vec![Fe::ZERO; d * 2 * d];
        for i in 0..d {
            for j in 0..d {
                a[i * 2 * d + j] = g.at(d, i, j);
            }
            a[i * 2 * d + d + i] = Fe::ONE;
        }
        for col in 0..d {
            let pivot = (col..d)
                .find(|&r| a[r * 2 * d + col] != Fe::ZERO)
                .expect("group element is invertible");
            if pivot != col {
                for j in 0..2 * d {
                    a.swap(col * 2 * d + j, pivot * 2 * d + j);
                }
            }
            let pinv = f.inv(a[col * 2 * d + col]).expect("nonzero pivot");
            for j in 0..2 * d {
                a[col * 2 * d + j] = f.mul(a[col * 2 * d + j], pinv);
            }
            for r in 0..d {
                if r == col {
                    continue;
                }
                let factor = a[r * 2 * d + col];
                if factor == Fe::ZERO {
                    continue;
                }
                for j in 0..2 * d {
                    let sub = f.mul(factor, a[col * 2 * d + j]);
                    a[r * 2 * d + j] = f.sub(a[r * 2 * d + j], sub);
                }
            }
        }
        let mut out = GroupElement::from_entries(&[]);
        for i in 0..d {
            for j in 0..d {
                out.set(d, i, j, a[i * 2 * d + d + j]);
            }
        }
        out
    }

    pub fn trace(&self, g: &GroupElement) -> Fe {
        let mut t = Fe::ZERO;
        for i in 0..self.dim {
            t = self.field.add(t, g.at(self.dim, i, i));
        }
        t
    }

    pub fn det(&self, g: &GroupElement) -> Fe {
        let d = self.dim;
        let f = &self.field;
        if d == 2 {
            return f.sub(
                f.mul(g.at(2, 0, 0), g.at(2, 1, 1)),
                f.mul(g.at(2, 0, 1), g.at(2, 1, 0)),
            );
        }
        // Gauss elimination tracking the product of pivots
        let mut a = vec![Fe::ZERO; d * d];
        a.copy_from_slice(g.entries(d));
        let mut det = Fe::ONE;
        for col in 0..d {
            let pivot = match (col..d).find(|&r| a[r * d + col] != Fe::ZERO) {
                Some(r) => r,
                None => return Fe::ZERO,
            };
            if pivot != col {
                for j in 0..d {
                    a.swap(col * d + j, pivot * d + j);
                }
                det = f.neg(det);
            }
            let pv = a[col * d + col];
            det = f.mul(det, pv);
            let pinv = f.inv(pv).expect("nonzero pivot");
            for r in col + 1..d {
                let factor = f.mul(a[r * d + col], pinv);
                if factor == Fe::ZERO {
                    continue;
                }
                for j in col..d {
                    let sub = f.mul(factor, a[col * d + j]);
                    a[r * d + j] = f.sub(a[r * d + j], sub);
                }
            }
        }
        det
    }

    /// `g^k` by square-and-multiply; negative exponents invert first.
    pub fn pow(&self, g: &GroupElement, k: i64) -> GroupElement {
        let (base, mut e) = if k < 0 {
            (self.inv(g), k.unsigned_abs())
        } else {
            (*g, k as u64)
        };
        let mut acc = self.identity();
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &sq);
            }
            sq = self.mul(&sq, &sq);
            e >>= 1;
        }
        acc
    }

    /// Least k ≥ 1 with g^k = identity.
    pub fn order_of(&self, g: &GroupElement) -> u64 {
        let id = self.identity();
        let mut acc = *g;
        let mut k = 1u64;
        while acc != id {
            acc = self.mul(&acc, g);
            k += 1;
        }
        k
    }

    /// Central elements: {±I} in SL2, {I} elsewhere (PSL2 after canonization).
    pub fn is_central(&self, g: &GroupElement) -> bool {
        match self.variant {
            Variant::Sl2 => *g == self.identity() || *g == self.minus_identity(),
            _ => *g == self.identity(),
        }
    }

    /// Full element list in canonical order, materialized once.
    pub fn elements(&self) -> Result<&[GroupElement]> {
        let order = self.order_bound()?;
        if order > self.enum_cap as u128 {
            return Err(Error::GroupCapExceeded {
                order,
                cap: self.enum_cap,
            });
        }
        Ok(self
            .elements
            .get_or_init(|| self.iter_elements().expect("variant enumerable").collect()))
    }

    /// Streaming enumeration in canonical order (no cap).
    pub fn iter_elements(&self) -> Result<Box<dyn Iterator<Item = GroupElement> + '_>> {
        match self.variant {
            Variant::Sl2 => Ok(Box::new(self.iter_sl2().map(move |g| g))),
            Variant::Psl2 => Ok(Box::new(
                self.iter_sl2().filter(move |g| self.canon(*g) == *g),
            )),
            Variant::Sl3 => Ok(Box::new(self.iter_sl3())),
            Variant::Suzuki { .. } => Err(Error::UnsupportedGroup(
                "the Suzuki family is parametrized, not enumerated".into(),
            )),
        }
    }

    fn iter_sl2(&self) -> impl Iterator<Item = GroupElement> + '_ {
        let f = &self.field;
        f.elements().flat_map(move |a| {
            let out: Box<dyn Iterator<Item = GroupElement>> = if a == Fe::ZERO {
                // det = -bc = 1, so b ≠ 0, c = -b⁻¹, d free
                Box::new(f.elements().filter(|&b| b != Fe::ZERO).flat_map(move |b| {
                    let c = f.neg(f.inv(b).expect("b nonzero"));
                    f.elements()
                        .map(move |d| GroupElement::from_entries(&[a, b, c, d]))
                }))
            } else {
                let ainv = f.inv(a).expect("a nonzero");
                Box::new(f.elements().flat_map(move |b| {
                    f.elements().map(move |c| {
                        let d = f.mul(f.add(Fe::ONE, f.mul(b, c)), ainv);
                        GroupElement::from_entries(&[a, b, c, d])
                    })
                }))
            };
            out
        })
    }

    fn iter_sl3(&self) -> impl Iterator<Item = GroupElement> + '_ {
        let q = self.field.q();
        let total = q.pow(9);
        (0..total).filter_map(move |enc| {
            let mut e = [Fe::ZERO; 16];
            let mut x = enc;
            for item in e.iter_mut().take(9) {
                *item = Fe((x % q) as u32);
                x /= q;
            }
            // ascending encode order = entry 0 least significant
            let g = GroupElement { e };
            (self.det(&g) == Fe::ONE).then_some(g)
        })
    }

    fn order_bound(&self) -> Result<u128> {
        let q = self.field.q() as u128;
        match self.variant {
            Variant::Sl2 => Ok(q * (q * q - 1)),
            Variant::Psl2 => Ok(q * (q * q - 1) / if self.field.p() == 2 { 1 } else { 2 }),
            Variant::Sl3 => {
                let gl = (q.pow(3) - 1) * (q.pow(3) - q) * (q.pow(3) - q * q);
                Ok(gl / (q - 1))
            }
            Variant::Suzuki { .. } => Err(Error::UnsupportedGroup(
                "the Suzuki family is parametrized, not enumerated".into(),
            )),
        }
    }

    pub fn order(&self) -> Result<u64> {
        let n = self.elements()?.len() as u64;
        debug_assert_eq!(n as u128, self.order_bound()?, "enumeration count check");
        Ok(n)
    }

    /// Inverted map entry-tuple → enumeration index.
    pub fn index_map(&self) -> Result<&HashMap<u128, u32>> {
        let elems = self.elements()?;
        Ok(self.index.get_or_init(|| {
            let q = self.field.q();
            let mut m = HashMap::with_capacity(elems.len());
            for (i, g) in elems.iter().enumerate() {
                m.insert(g.key(self.dim, q), i as u32);
            }
            m
        }))
    }

    pub fn index_of(&self, g: &GroupElement) -> Result<u32> {
        let m = self.index_map()?;
        m.get(&g.key(self.dim, self.field.q()))
            .copied()
            .ok_or_else(|| Error::InvalidInput("element not in group".into()))
    }

    /// Conjugacy classes by breadth-first conjugation orbits over the full
    /// element list; computed once and cached.
    pub fn conjugacy_classes(&self) -> Result<&ClassTable> {
        self.elements()?;
        self.index_map()?;
        Ok(self.classes.get_or_init(|| {
            let elems = self.elements().expect("materialized above");
            let index = self.index_map().expect("materialized above");
            let q = self.field.q();
            let n = elems.len();
            let mut class_of = vec![u32::MAX; n];
            let mut reps = Vec::new();
            let mut sizes = Vec::new();
            let mut members: Vec<Vec<u32>> = Vec::new();
            for start in 0..n {
                if class_of[start] != u32::MAX {
                    continue;
                }
                let cls = reps.len() as u32;
                reps.push(start as u32);
                let mut queue = vec![start as u32];
                class_of[start] = cls;
                let mut head = 0;
                while head < queue.len() {
                    let g = elems[queue[head] as usize];
                    head += 1;
                    for h in elems {
                        let conj = self.mul(&self.mul(h, &g), &self.inv(h));
                        let idx = index[&conj.key(self.dim, q)];
                        if class_of[idx as usize] == u32::MAX {
                            class_of[idx as usize] = cls;
                            queue.push(idx);
                        }
                    }
                }
                queue.sort_unstable();
                sizes.push(queue.len() as u64);
                members.push(queue);
            }
            ClassTable {
                reps,
                sizes,
                class_of,
                members,
            }
        }))
    }
}

fn field_of_size(q: u64) -> Result<FieldSpec> {
    // factor q = p^n
    let mut p = 2u64;
    while p * p <= q {
        if q % p == 0 {
            let mut n = 0u32;
            let mut x = q;
            while x % p == 0 {
                x /= p;
                n += 1;
            }
            if x != 1 {
                return Err(Error::InvalidInput(format!("{q} is not a prime power")));
            }
            return FieldSpec::new(p, n);
        }
        p += 1;
    }
    if q < 2 {
        return Err(Error::InvalidInput(format!("{q} is not a prime power")));
    }
    FieldSpec::new(q, 1)
}

// ---------------------------------------------------------------------------
// Suzuki family
// ---------------------------------------------------------------------------

/// Parameters (a,b,c,d) with the twisted values applied, per the membership
/// condition a₀ = a^{2^{m+1}} (and likewise b₀, c₀, d₀).
#[derive(Debug, Clone, Copy)]
pub struct SuzukiParams {
    pub v: [Fe; 4],
    pub twisted: [Fe; 4],
}

/// Builds the parametrized pair (x(v), y(v)) of 4×4 matrices over
/// F_{2^{2m+1}}, the twist applied automatically.
pub fn suzuki_point(spec: &GroupSpec, v: [Fe; 4]) -> Result<(GroupElement, GroupElement, SuzukiParams)> {
    let m = match spec.variant() {
        Variant::Suzuki { m } => m,
        _ => {
            return Err(Error::UnsupportedGroup(
                "suzuki_point needs a Sz-family spec".into(),
            ))
        }
    };
    let f = spec.field();
    let twist = |x: Fe| f.pow(x, 1i64 << (m + 1)).expect("positive exponent");
    let [a, b, c, d] = v;
    let (a0, b0, c0, d0) = (twist(a), twist(b), twist(c), twist(d));
    let block = |a: Fe, b: Fe, a0: Fe, b0: Fe| {
        let a2a0 = f.mul(f.mul(a, a), a0);
        let top = f.add(f.add(a2a0, f.mul(a, b)), b0);
        let mid = f.add(f.mul(a, a0), b);
        GroupElement::from_entries(&[
            top,
            b,
            a,
            Fe::ONE,
            mid,
            a0,
            Fe::ONE,
            Fe::ZERO,
            a,
            Fe::ONE,
            Fe::ZERO,
            Fe::ZERO,
            Fe::ONE,
            Fe::ZERO,
            Fe::ZERO,
            Fe::ZERO,
        ])
    };
    let x = block(a, b, a0, b0);
    let y = block(c, d, c0, d0);
    Ok((
        x,
        y,
        SuzukiParams {
            v,
            twisted: [a0, b0, c0, d0],
        },
    ))
}

// ---------------------------------------------------------------------------
// Dense multiplication indexing
// ---------------------------------------------------------------------------

/// Dense index-level multiplication for groups small enough to afford
/// order² u16 entries; used by the SL(3,3) pair census.
pub struct MulTable {
    pub n: usize,
    table: Vec<u16>,
    inverse: Vec<u16>,
    pub id: u32,
}

impl MulTable {
    pub fn build(spec: &GroupSpec) -> Result<MulTable> {
        MulTable::build_with_cap(spec, DEFAULT_MULTABLE_CAP)
    }

    pub fn build_with_cap(spec: &GroupSpec, cap: u64) -> Result<MulTable> {
        let elems = spec.elements()?;
        let n = elems.len();
        if n as u64 > cap || n > u16::MAX as usize {
            return Err(Error::BudgetExceeded(format!(
                "multiplication table for order {n} exceeds cap {cap}"
            )));
        }
        let index = spec.index_map()?;
        let q = spec.field().q();
        let dim = spec.dim();
        let mut table = vec![0u16; n * n];
        for i in 0..n {
            for j in 0..n {
                let prod = spec.mul(&elems[i], &elems[j]);
                table[i * n + j] = index[&prod.key(dim, q)] as u16;
            }
        }
        let mut inverse = vec![0u16; n];
        for i in 0..n {
            let inv = spec.inv(&elems[i]);
            inverse[i] = index[&inv.key(dim, q)] as u16;
        }
        let id = index[&spec.identity().key(dim, q)];
        Ok(MulTable { n, table, inverse, id })
    }

    #[inline]
    pub fn mul(&self, i: u32, j: u32) -> u32 {
        self.table[i as usize * self.n + j as usize] as u32
    }

    #[inline]
    pub fn inv(&self, i: u32) -> u32 {
        self.inverse[i as usize] as u32
    }

    pub fn pow(&self, g: u32, k: i64) -> u32 {
        let (base, mut e) = if k < 0 {
            (self.inv(g), k.unsigned_abs())
        } else {
            (g, k as u64)
        };
        let mut acc = self.id;
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, sq);
            }
            sq = self.mul(sq, sq);
            e >>= 1;
        }
        acc
    }
}
