//! Finite fields `F_{p^r}` with log/antilog tables.
//!
//! Elements are stored as [`Elem`] indices: the coefficient vector
//! `(c_0, ..., c_{r-1})` of the polynomial-basis representation read as the
//! base-`p` integer `c_0 + c_1 p + ... + c_{r-1} p^{r-1}`. Zero is index 0
//! and has no logarithm.
//!
//! The modulus is the first monic irreducible polynomial of degree `r` when
//! monic polynomials are enumerated by that same integer encoding of their
//! lower coefficients, and the primitive element is the first element in
//! index order whose multiplicative order is `p^r - 1`. Both choices are
//! deterministic so every downstream block set and matrix is reproducible.

mod poly;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numtheory::{checked_pow, is_prime, prime_divisors};

/// Largest field that gets full log/antilog tables by default.
pub const DEFAULT_TABLE_CAP: u64 = 1 << 22;

/// A field element, identified by its base-`p` coefficient index.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Elem(u32);

impl Elem {
    pub const ZERO: Elem = Elem(0);

    pub fn index(self) -> u32 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Sub,
    Mul,
    Inv,
    Neg,
    Pow,
}

/// Second operand of [`FieldSpec::field_op`].
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Operand {
    None,
    Element(Elem),
    Integer(i64),
}

/// Serializable identity of a field: enough to rebuild it exactly.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldSummary {
    pub p: u32,
    pub r: u32,
    pub modulus: Vec<u32>,
    pub primitive: Vec<u32>,
}

/// A concrete model of `F_{p^r}`.
#[derive(Clone)]
pub struct FieldSpec {
    p: u32,
    r: u32,
    order: u32,
    modulus: Vec<u32>,
    primitive: Elem,
    // log[x - 1] for nonzero x
    log: Vec<u32>,
    antilog: Vec<Elem>,
    trace: Vec<u32>,
}

impl std::fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FieldSpec")
            .field("p", &self.p)
            .field("r", &self.r)
            .field("modulus", &self.modulus)
            .field("primitive", &self.coeffs(self.primitive))
            .finish()
    }
}

/// Builds `F_{p^r}` with the default table cap.
pub fn build_field(p: u64, r: u32) -> Result<FieldSpec> {
    build_field_capped(p, r, DEFAULT_TABLE_CAP)
}

pub fn build_field_capped(p: u64, r: u32, cap: u64) -> Result<FieldSpec> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if r == 0 {
        return Err(Error::InvalidParameter("extension degree must be positive".into()));
    }
    let order = check_order(p, r, cap)?;
    let p = p as u32;
    let r_us = r as usize;
    let modulus = (0..order)
        .map(|idx| {
            let mut m = digits(idx, p, r_us);
            m.push(1);
            m
        })
        .find(|m| poly::is_irreducible(m, p))
        .ok_or_else(|| Error::Internal(format!("no monic irreducible of degree {r} over F_{p}")))?;
    FieldSpec::from_modulus(p, modulus, None, cap)
}

fn check_order(p: u64, r: u32, cap: u64) -> Result<u32> {
    match checked_pow(p, r) {
        Some(q) if q <= cap && q <= u32::MAX as u64 => Ok(q as u32),
        Some(q) => Err(Error::OrderTooLarge { order: q as u128, cap }),
        None => Err(Error::OrderTooLarge { order: (p as u128).saturating_pow(r), cap }),
    }
}

fn digits(mut idx: u32, p: u32, r: usize) -> Vec<u32> {
    let mut out = Vec::with_capacity(r + 1);
    for _ in 0..r {
        out.push(idx % p);
        idx /= p;
    }
    out
}

impl FieldSpec {
    /// Builds a field from an explicit modulus. With `primitive = None` the
    /// first primitive element in index order is chosen; otherwise the given
    /// coefficient list is validated as primitive.
    pub fn from_modulus(p: u32, modulus: Vec<u32>, primitive: Option<&[u32]>, cap: u64) -> Result<FieldSpec> {
        if !is_prime(p as u64) {
            return Err(Error::NotPrime(p as u64));
        }
        if modulus.len() < 2 || modulus.last() != Some(&1) {
            return Err(Error::InvalidModulus("modulus must be monic of degree >= 1".into()));
        }
        if modulus.iter().any(|&c| c >= p) {
            return Err(Error::InvalidModulus("coefficient not reduced mod p".into()));
        }
        let r = (modulus.len() - 1) as u32;
        let order = check_order(p as u64, r, cap)?;
        if !poly::is_irreducible(&modulus, p) {
            return Err(Error::InvalidModulus(format!("{modulus:?} is reducible over F_{p}")));
        }
        let group = (order - 1) as u128;
        let factors = prime_divisors(group as u64);
        let is_primitive = |g: &[u32]| {
            if g.iter().all(|&c| c == 0) {
                return false;
            }
            if order == 2 {
                return true;
            }
            let one = poly::pow_mod_poly(g, 0, &modulus, p);
            factors.iter().all(|&l| poly::pow_mod_poly(g, group / l as u128, &modulus, p) != one)
        };
        let prim_coeffs = match primitive {
            Some(g) => {
                if g.len() != r as usize || g.iter().any(|&c| c >= p) {
                    return Err(Error::ElementFromWrongField);
                }
                if !is_primitive(g) {
                    return Err(Error::NotPrimitive { order: naive_order(g, &modulus, p), expected: group as u64 });
                }
                g.to_vec()
            }
            None => (1..order)
                .map(|idx| digits(idx, p, r as usize))
                .find(|g| is_primitive(g))
                .ok_or_else(|| Error::Internal("field has no primitive element".into()))?,
        };
        FieldSpec::tables_for(p, r, order, modulus, &prim_coeffs)
    }

    fn tables_for(p: u32, r: u32, order: u32, modulus: Vec<u32>, g: &[u32]) -> Result<FieldSpec> {
        let n = (order - 1) as usize;
        let mut log = vec![0u32; n];
        let mut seen = vec![false; n];
        let mut antilog = Vec::with_capacity(n);
        let mut cur = vec![0u32; r as usize];
        cur[0] = 1;
        for i in 0..n {
            let idx = coeffs_to_index(&cur, p);
            if idx == 0 || seen[idx as usize - 1] {
                return Err(Error::Internal("primitive element repeated a power".into()));
            }
            seen[idx as usize - 1] = true;
            log[idx as usize - 1] = i as u32;
            antilog.push(Elem(idx));
            cur = poly::mul_mod(&cur, g, &modulus, p);
        }
        let mut fs = FieldSpec {
            p,
            r,
            order,
            modulus,
            primitive: Elem(coeffs_to_index(g, p)),
            log,
            antilog,
            trace: Vec::new(),
        };
        fs.trace = fs.build_trace_table();
        Ok(fs)
    }

    /// Trace of every element, from the traces of the basis `1, x, ..., x^{r-1}`.
    fn build_trace_table(&self) -> Vec<u32> {
        let p = self.p;
        let basis: Vec<u32> = (0..self.r)
            .map(|i| {
                let mut c = vec![0u32; self.r as usize];
                c[i as usize] = 1;
                self.frobenius_trace(Elem(coeffs_to_index(&c, p)))
            })
            .collect();
        let mut table = vec![0u32; self.order as usize];
        for (idx, slot) in table.iter_mut().enumerate() {
            let mut x = idx as u32;
            let mut acc = 0u64;
            for &t in &basis {
                acc += (x % p) as u64 * t as u64;
                x /= p;
            }
            *slot = (acc % p as u64) as u32;
        }
        table
    }

    /// `x + x^p + ... + x^{p^{r-1}}`, read off as a prime-field integer.
    fn frobenius_trace(&self, x: Elem) -> u32 {
        let mut acc = Elem::ZERO;
        let mut cur = x;
        for _ in 0..self.r {
            acc = self.add(acc, cur);
            cur = self.pow_u(cur, self.p as u64);
        }
        debug_assert!(acc.0 < self.p, "trace left the prime field");
        acc.0
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    /// Number of elements `q = p^r`.
    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn primitive(&self) -> Elem {
        self.primitive
    }

    pub fn one(&self) -> Elem {
        Elem(1)
    }

    pub fn summary(&self) -> FieldSummary {
        FieldSummary {
            p: self.p,
            r: self.r,
            modulus: self.modulus.clone(),
            primitive: self.coeffs(self.primitive),
        }
    }

    /// Rebuilds a field from its summary, validating modulus and primitive.
    pub fn from_summary(s: &FieldSummary, cap: u64) -> Result<FieldSpec> {
        if s.modulus.len() != s.r as usize + 1 {
            return Err(Error::InvalidModulus("modulus degree does not match r".into()));
        }
        FieldSpec::from_modulus(s.p, s.modulus.clone(), Some(&s.primitive), cap)
    }

    /// Two specs describe the same model of the field.
    pub fn same_field(&self, other: &FieldSpec) -> bool {
        std::ptr::eq(self, other)
            || (self.p == other.p && self.modulus == other.modulus && self.primitive == other.primitive)
    }

    pub fn contains(&self, x: Elem) -> bool {
        x.0 < self.order
    }

    fn check(&self, x: Elem) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(Error::ElementFromWrongField)
        }
    }

    pub fn element(&self, coeffs: &[u32]) -> Result<Elem> {
        if coeffs.len() != self.r as usize || coeffs.iter().any(|&c| c >= self.p) {
            return Err(Error::ElementFromWrongField);
        }
        Ok(Elem(coeffs_to_index(coeffs, self.p)))
    }

    pub fn from_index(&self, idx: u32) -> Result<Elem> {
        let e = Elem(idx);
        self.check(e)?;
        Ok(e)
    }

    /// Embeds an integer into the prime field.
    pub fn from_int(&self, n: i64) -> Elem {
        Elem(n.rem_euclid(self.p as i64) as u32)
    }

    pub fn coeffs(&self, x: Elem) -> Vec<u32> {
        digits(x.0, self.p, self.r as usize)
    }

    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        let p = self.p;
        if self.r == 1 {
            return Elem((a.0 + b.0) % p);
        }
        let (mut x, mut y) = (a.0, b.0);
        let mut out = 0;
        let mut place = 1;
        for _ in 0..self.r {
            out += (x % p + y % p) % p * place;
            x /= p;
            y /= p;
            place *= p;
        }
        Elem(out)
    }

    pub fn neg(&self, a: Elem) -> Elem {
        let p = self.p;
        let mut x = a.0;
        let mut out = 0;
        let mut place = 1;
        for _ in 0..self.r {
            out += (p - x % p) % p * place;
            x /= p;
            place *= p;
        }
        Elem(out)
    }

    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        if a.is_zero() || b.is_zero() {
            return Elem::ZERO;
        }
        let n = self.order - 1;
        let e = (self.log[a.0 as usize - 1] as u64 + self.log[b.0 as usize - 1] as u64) % n as u64;
        self.antilog[e as usize]
    }

    pub fn inv(&self, a: Elem) -> Result<Elem> {
        self.check(a)?;
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let n = self.order - 1;
        let l = self.log[a.0 as usize - 1];
        Ok(self.antilog[((n - l) % n) as usize])
    }

    pub fn pow(&self, a: Elem, e: i64) -> Result<Elem> {
        self.check(a)?;
        if a.is_zero() {
            return match e {
                0 => Ok(self.one()),
                e if e > 0 => Ok(Elem::ZERO),
                _ => Err(Error::DivisionByZero),
            };
        }
        let n = (self.order - 1) as i128;
        let l = self.log[a.0 as usize - 1] as i128;
        Ok(self.antilog[(l * e as i128).rem_euclid(n) as usize])
    }

    fn pow_u(&self, a: Elem, e: u64) -> Elem {
        let c = poly::pow_mod_poly(&self.coeffs(a), e as u128, &self.modulus, self.p);
        Elem(coeffs_to_index(&c, self.p))
    }

    /// `ω^i` for the primitive element `ω`; any integer exponent.
    pub fn exp(&self, i: i64) -> Elem {
        let n = (self.order - 1) as i64;
        self.antilog[i.rem_euclid(n) as usize]
    }

    pub fn log(&self, x: Elem) -> Result<u32> {
        self.check(x)?;
        if x.is_zero() {
            return Err(Error::ZeroHasNoLog);
        }
        Ok(self.log[x.0 as usize - 1])
    }

    /// Antilog table: `antilog()[i] = ω^i` for `i` in `0..q-1`.
    pub fn antilog(&self) -> &[Elem] {
        &self.antilog
    }

    /// Absolute trace to the prime field, as an integer in `0..p`.
    pub fn trace(&self, x: Elem) -> u32 {
        self.trace[x.0 as usize]
    }

    pub fn trace_to_prime(&self, x: Elem) -> Result<u32> {
        self.check(x)?;
        Ok(self.trace(x))
    }

    /// Trace of every element, indexed by element index.
    pub fn trace_table(&self) -> &[u32] {
        &self.trace
    }

    /// Checked arithmetic entry point.
    pub fn field_op(&self, op: FieldOp, a: Elem, b: Operand) -> Result<Elem> {
        self.check(a)?;
        let elem_b = |b: Operand| match b {
            Operand::Element(e) => self.check(e).map(|_| e),
            _ => Err(Error::InvalidParameter(format!("{op:?} needs an element operand"))),
        };
        match op {
            FieldOp::Add => Ok(self.add(a, elem_b(b)?)),
            FieldOp::Sub => Ok(self.sub(a, elem_b(b)?)),
            FieldOp::Mul => Ok(self.mul(a, elem_b(b)?)),
            FieldOp::Neg => Ok(self.neg(a)),
            FieldOp::Inv => self.inv(a),
            FieldOp::Pow => match b {
                Operand::Integer(e) => self.pow(a, e),
                _ => Err(Error::InvalidParameter("pow needs an integer exponent".into())),
            },
        }
    }
}

fn naive_order(g: &[u32], modulus: &[u32], p: u32) -> u64 {
    let one = poly::pow_mod_poly(g, 0, modulus, p);
    let mut x = g.to_vec();
    let mut k = 1;
    while x != one {
        x = poly::mul_mod(&x, g, modulus, p);
        k += 1;
    }
    k
}

pub(crate) fn coeffs_to_index(c: &[u32], p: u32) -> u32 {
    c.iter().rev().fold(0, |acc, &d| acc * p + d)
}

fn subfield_degree(ext: &FieldSpec, sub_order: u64) -> Result<u32> {
    let not_sub = || Error::NotASubfield { order: ext.order as u64, sub_order };
    let (p, r) = crate::numtheory::prime_power(sub_order).ok_or_else(not_sub)?;
    if p != ext.p as u64 || !ext.r.is_multiple_of(r) {
        return Err(not_sub());
    }
    Ok(r)
}

/// `ω^{(Q-1)/(q-1)}` for `Q = ext.order()` and `q = sub_order`: a primitive
/// element of the subfield of order `q`.
pub fn subfield_generator(ext: &FieldSpec, sub_order: u64) -> Result<Elem> {
    subfield_degree(ext, sub_order)?;
    let step = (ext.order as u64 - 1) / (sub_order - 1);
    Ok(ext.exp(step as i64))
}

/// A standalone model of the subfield of order `sub_order` whose primitive
/// element is the image of [`subfield_generator`]: the modulus is that
/// generator's minimal polynomial and the primitive element is the class of
/// `x`. Exponent `m` in the model corresponds to `ω^{m (Q-1)/(q-1)}` in `ext`.
pub fn subfield_model(ext: &FieldSpec, sub_order: u64) -> Result<FieldSpec> {
    let r = subfield_degree(ext, sub_order)?;
    let gamma = subfield_generator(ext, sub_order)?;
    // Π_{i<r} (X - γ^{p^i}), coefficients in ext, low-to-high.
    let mut minpoly = vec![ext.one()];
    let mut conj = gamma;
    for _ in 0..r {
        let mut next = vec![Elem::ZERO; minpoly.len() + 1];
        let neg_c = ext.neg(conj);
        for (i, &c) in minpoly.iter().enumerate() {
            next[i + 1] = ext.add(next[i + 1], c);
            next[i] = ext.add(next[i], ext.mul(c, neg_c));
        }
        minpoly = next;
        conj = ext.pow(conj, ext.p as i64)?;
    }
    if minpoly.iter().any(|c| c.0 >= ext.p) {
        return Err(Error::Internal("minimal polynomial left the prime field".into()));
    }
    let modulus: Vec<u32> = minpoly.iter().map(|c| c.0).collect();
    let x = poly::pow_mod_poly(&[0, 1], 1, &modulus, ext.p);
    FieldSpec::from_modulus(ext.p, modulus, Some(&x), u64::MAX)
}

/// Element map `base -> ext` sending `γ^m` to `ω^{m (Q-1)/(q-1)}`,
/// indexed by base element index. Fails unless the map is a field
/// embedding, i.e. unless `base`'s primitive element matches the
/// subfield generator of `ext`.
pub fn subfield_embedding(base: &FieldSpec, ext: &FieldSpec) -> Result<Vec<Elem>> {
    let not_sub = || Error::NotASubfield { order: ext.order as u64, sub_order: base.order as u64 };
    if base.p != ext.p || !ext.r.is_multiple_of(base.r) {
        return Err(not_sub());
    }
    let step = (ext.order as u64 - 1) / (base.order as u64 - 1);
    let mut map = vec![Elem::ZERO; base.order as usize];
    for (m, &x) in base.antilog.iter().enumerate() {
        map[x.0 as usize] = ext.exp((m as u64 * step) as i64);
    }
    // Multiplicative by construction; additive iff f(1 + y) = 1 + f(y).
    for &y in &base.antilog {
        let lhs = map[base.add(base.one(), y).0 as usize];
        let rhs = ext.add(ext.one(), map[y.0 as usize]);
        if lhs != rhs {
            return Err(not_sub());
        }
    }
    Ok(map)
}
