//! Cyclotomic classes and the skew blocks built from consecutive runs of them.
//!
//! Blocks are stored as sorted exponent sets relative to the field's
//! primitive element, so class membership is `exponent mod N` and negation
//! is a shift by `(q - 1) / 2`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::gf::{build_field_capped, subfield_embedding, subfield_model, Elem, FieldSpec, DEFAULT_TABLE_CAP};
use crate::numtheory::{checked_pow, mult_order, prime_power};

/// A subset of `F*`, as exponents of the primitive element.
#[derive(Clone, Debug)]
pub struct Block {
    field: Arc<FieldSpec>,
    exponents: Vec<u32>,
}

impl PartialEq for Block {
    fn eq(&self, other: &Self) -> bool {
        self.field.same_field(&other.field) && self.exponents == other.exponents
    }
}

impl Block {
    pub fn from_exponents(field: Arc<FieldSpec>, exponents: impl IntoIterator<Item = u32>) -> Result<Block> {
        let n = field.order() as u64 - 1;
        let mut exponents: Vec<u32> = exponents.into_iter().collect();
        if let Some(&bad) = exponents.iter().find(|&&e| e as u64 >= n) {
            return Err(Error::IndexOutOfRange { index: bad as i64, bound: n });
        }
        exponents.sort_unstable();
        exponents.dedup();
        Ok(Block { field, exponents })
    }

    pub fn from_elements(field: Arc<FieldSpec>, elements: impl IntoIterator<Item = Elem>) -> Result<Block> {
        let exps = elements.into_iter().map(|x| field.log(x)).collect::<Result<Vec<_>>>()?;
        Block::from_exponents(field, exps)
    }

    pub fn empty(field: Arc<FieldSpec>) -> Block {
        Block { field, exponents: Vec::new() }
    }

    pub fn field(&self) -> &Arc<FieldSpec> {
        &self.field
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    pub fn size(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> + '_ {
        self.exponents.iter().map(|&e| self.field.exp(e as i64))
    }

    pub fn contains(&self, x: Elem) -> bool {
        match self.field.log(x) {
            Ok(l) => self.exponents.binary_search(&l).is_ok(),
            Err(_) => false,
        }
    }

    /// `ω^shift · B`.
    pub fn scaled(&self, shift: i64) -> Block {
        let n = self.field.order() as i64 - 1;
        let mut exponents: Vec<u32> =
            self.exponents.iter().map(|&e| (e as i64 + shift).rem_euclid(n) as u32).collect();
        exponents.sort_unstable();
        Block { field: self.field.clone(), exponents }
    }

    /// `-B`. In odd characteristic `-1 = ω^{(q-1)/2}`.
    pub fn negated(&self) -> Block {
        if self.field.order().is_multiple_of(2) {
            return self.clone();
        }
        self.scaled((self.field.order() as i64 - 1) / 2)
    }

    /// Membership indexed by element index.
    pub fn indicator(&self) -> Vec<bool> {
        let mut out = vec![false; self.field.order() as usize];
        for x in self.elements() {
            out[x.index() as usize] = true;
        }
        out
    }
}

fn check_divisor(field: &FieldSpec, n: u32) -> Result<u64> {
    let group = field.order() as u64 - 1;
    if n == 0 || !group.is_multiple_of(n as u64) {
        return Err(Error::BadOrderDivisor { n: n as u64, order: field.order() as u64 });
    }
    Ok(group)
}

/// `C_i^{(N,q)} = γ^i ⟨γ^N⟩`.
pub fn cyclotomic_class(field: &Arc<FieldSpec>, n: u32, i: u32) -> Result<Block> {
    let group = check_divisor(field, n)?;
    if i >= n {
        return Err(Error::IndexOutOfRange { index: i as i64, bound: n as u64 });
    }
    Ok(Block {
        field: field.clone(),
        exponents: (i as u64..group).step_by(n as usize).map(|e| e as u32).collect(),
    })
}

/// Union of `count` consecutive classes of order `n` starting at `start`,
/// indices read mod `n`.
fn class_union(field: &Arc<FieldSpec>, n: u32, start: u32, count: u32) -> Result<Block> {
    check_divisor(field, n)?;
    if start >= n {
        return Err(Error::IndexOutOfRange { index: start as i64, bound: n as u64 });
    }
    let group = field.order() - 1;
    let exponents = (0..group).filter(|e| (e % n + n - start) % n < count).collect();
    Ok(Block { field: field.clone(), exponents })
}

/// `B_h`: the union of the `2^{u-1}` classes `C_h, ..., C_{h+2^{u-1}-1}` of
/// order `2^u` in `field`.
pub fn block_b(field: &Arc<FieldSpec>, u: u32, h: u32) -> Result<Block> {
    let n = 1u32 << u;
    class_union(field, n, h, n / 2)
}

/// The family `{B_0, ..., B_{2^{u-1}-1}}` over `field`.
pub fn family_b(field: &Arc<FieldSpec>, u: u32) -> Result<Vec<Block>> {
    (0..1u32 << (u - 1)).map(|h| block_b(field, u, h)).collect()
}

/// `j_{a,h} = (a + h + j) / 2^{t-u}` for the unique `j` in `0..2^{t-u}`
/// making the numerator divisible. Not reduced mod `2^u`.
pub fn j_index(t: u32, u: u32, a: u32, h: u32) -> Result<u32> {
    let n = 1u32 << t;
    for x in [a, h] {
        if x >= n {
            return Err(Error::IndexOutOfRange { index: x as i64, bound: n as u64 });
        }
    }
    let d = 1u32 << (t - u);
    Ok((a + h).div_ceil(d))
}

/// The frame `(q, u, t, N = 2^t, f = 2^{t-u})` with models of `F_q` and
/// `F_{q^f}` whose primitive elements satisfy `γ = ω^{(q^f-1)/(q-1)}`.
#[derive(Clone, Debug)]
pub struct CycParams {
    q: u64,
    u: u32,
    t: u32,
    base: Arc<FieldSpec>,
    ext: Arc<FieldSpec>,
}

/// Checks `q = 2^u + 1 (mod 2^{u+1})` and that `q` is a prime power.
pub fn check_congruence(q: u64, u: u32) -> Result<(u64, u32)> {
    if u < 2 {
        return Err(Error::InvalidParameter(format!("u must be at least 2, got {u}")));
    }
    let (p, r) = prime_power(q).ok_or(Error::NotPrimePower(q))?;
    let modulus = 1u64 << (u + 1);
    let residue = q % modulus;
    if residue != (1u64 << u) + 1 {
        return Err(Error::CongruenceViolation { q, u, modulus, residue });
    }
    Ok((p, r))
}

impl CycParams {
    pub fn new(q: u64, u: u32, t: u32) -> Result<CycParams> {
        CycParams::with_cap(q, u, t, DEFAULT_TABLE_CAP)
    }

    pub fn with_cap(q: u64, u: u32, t: u32, cap: u64) -> Result<CycParams> {
        let (p, r) = check_congruence(q, u)?;
        if t < u + 1 || t > 31 {
            return Err(Error::InvalidParameter(format!("t must satisfy u + 1 <= t <= 31, got t = {t}")));
        }
        let f = 1u32 << (t - u);
        let n = 1u64 << t;
        let ext_degree = r.checked_mul(f).ok_or(Error::OrderTooLarge { order: u128::MAX, cap })?;
        if checked_pow(p, ext_degree).is_none_or(|o| o > cap) {
            let order = (p as u128).checked_pow(ext_degree).unwrap_or(u128::MAX);
            return Err(Error::OrderTooLarge { order, cap });
        }
        let ext = build_field_capped(p, ext_degree, cap)?;
        let base = subfield_model(&ext, q)?;
        let qf = ext.order() as u64;
        if !(qf - 1).is_multiple_of(n) || mult_order(q % n, n) != Some(f as u64) {
            return Err(Error::Internal(format!("q = {q} does not have order {f} modulo {n}")));
        }
        subfield_embedding(&base, &ext)?;
        Ok(CycParams { q, u, t, base: Arc::new(base), ext: Arc::new(ext) })
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn u(&self) -> u32 {
        self.u
    }

    pub fn t(&self) -> u32 {
        self.t
    }

    /// `N = 2^t`.
    pub fn n(&self) -> u32 {
        1 << self.t
    }

    /// `f = 2^{t-u}`.
    pub fn f(&self) -> u32 {
        1 << (self.t - self.u)
    }

    pub fn base(&self) -> &Arc<FieldSpec> {
        &self.base
    }

    pub fn ext(&self) -> &Arc<FieldSpec> {
        &self.ext
    }

    pub fn block_b(&self, h: u32) -> Result<Block> {
        block_b(&self.base, self.u, h)
    }

    /// `D_h`: the union of the `N/2` classes `C_h, ..., C_{h+N/2-1}` of order
    /// `N` in `F_{q^f}`.
    pub fn block_d(&self, h: u32) -> Result<Block> {
        class_union(&self.ext, self.n(), h, self.n() / 2)
    }

    pub fn family_b(&self) -> Result<Vec<Block>> {
        family_b(&self.base, self.u)
    }

    /// `{D_0, D_f, D_{2f}, ..., D_{(2^{u-1}-1) f}}`.
    pub fn family_d(&self) -> Result<Vec<Block>> {
        (0..1u32 << (self.u - 1)).map(|l| self.block_d(l * self.f())).collect()
    }

    pub fn j_index(&self, a: u32, h: u32) -> Result<u32> {
        j_index(self.t, self.u, a, h)
    }
}
