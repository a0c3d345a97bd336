//! Difference families: certification and the end-to-end constructor.
//!
//! A family is certified three independent ways:
//!
//! 1. differences `x - y` counted pair by pair through Zech logarithms
//!    (`ω^i - ω^j = ω^j (ω^{i-j} - 1)`), a purely multiplicative route;
//! 2. `Σ_i |E_i ∩ (E_i + a)|` for every nonzero `a`, computed on bitsets
//!    laid out by additive coordinates so translation is a row permutation
//!    plus a word-parallel AND/popcount;
//! 3. `Σ_i |ψ(a E_i)|^2` over every nontrivial additive character.
//!
//! (1) and (2) are exact and must agree element by element; (3) is checked
//! against `kℓ - λ` within a tolerance.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::charsum::{root_of_unity, CompensatedSum};
use crate::cyclotomy::{check_congruence, family_b, Block, CycParams};
use crate::error::{Error, Result};
use crate::gf::{build_field_capped, Elem, FieldSpec, FieldSummary, DEFAULT_TABLE_CAP};
use crate::numtheory::{checked_pow, odd_part};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DesignParams {
    pub v: u64,
    pub k: u64,
    pub lambda: u64,
    pub ell: u64,
    /// `m` with `v = 2m + 1`, when `v` is odd.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<u64>,
}

impl DesignParams {
    fn new(v: u64, k: u64, lambda: u64, ell: u64) -> DesignParams {
        DesignParams { v, k, lambda, ell, m: (v % 2 == 1).then_some(v / 2) }
    }

    /// `ℓ k (k - 1) = λ (v - 1)`.
    pub fn satisfies_counting_law(&self) -> bool {
        self.ell * self.k * self.k.saturating_sub(1) == self.lambda * (self.v - 1)
    }
}

/// How a family was produced by [`construct_sdf`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub q: u64,
    pub u: u32,
    pub e: u32,
    /// Odd part of `e`.
    pub s: u32,
    /// `e = s 2^j`.
    pub j: u32,
    /// Classes of order `2^t` were used; `t = u` for the base-field family.
    pub t: u32,
}

#[derive(Clone, Debug)]
pub struct Family {
    field: Arc<FieldSpec>,
    blocks: Vec<Block>,
    params: DesignParams,
    provenance: Option<Provenance>,
}

impl Family {
    /// Wraps equal-size blocks of one field. `params.lambda` is the value
    /// forced by the counting law (rounded down when it is not integral).
    pub fn new(blocks: Vec<Block>, provenance: Option<Provenance>) -> Result<Family> {
        let first = blocks.first().ok_or_else(|| Error::InvalidParameter("family has no blocks".into()))?;
        let field = first.field().clone();
        if blocks.iter().any(|b| !b.field().same_field(&field)) {
            return Err(Error::MixedFields);
        }
        let k = first.size() as u64;
        if blocks.iter().any(|b| b.size() as u64 != k) {
            return Err(Error::InvalidParameter("blocks have different sizes".into()));
        }
        let v = field.order() as u64;
        let ell = blocks.len() as u64;
        let lambda = ell * k * k.saturating_sub(1) / (v - 1);
        Ok(Family { field, blocks, params: DesignParams::new(v, k, lambda, ell), provenance })
    }

    pub fn field(&self) -> &Arc<FieldSpec> {
        &self.field
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn params(&self) -> DesignParams {
        self.params
    }

    pub fn provenance(&self) -> Option<Provenance> {
        self.provenance
    }
}

/// Two nonzero elements with different difference counts.
pub type CountMismatch = ((Elem, u64), (Elem, u64));

/// Count of each nonzero element as an ordered in-block difference.
#[derive(Clone, Debug)]
pub struct DiffCounts {
    field: Arc<FieldSpec>,
    // by exponent of the difference
    counts: Vec<u64>,
}

impl DiffCounts {
    pub fn get(&self, x: Elem) -> Result<u64> {
        Ok(self.counts[self.field.log(x)? as usize])
    }

    /// `(element, count)` for every nonzero element, in exponent order.
    pub fn iter(&self) -> impl Iterator<Item = (Elem, u64)> + '_ {
        self.counts.iter().enumerate().map(|(i, &c)| (self.field.exp(i as i64), c))
    }

    /// The common count, or the first element whose count differs from that
    /// of `ω^0 = 1`.
    pub fn constant(&self) -> std::result::Result<u64, CountMismatch> {
        let c0 = self.counts[0];
        match self.counts.iter().position(|&c| c != c0) {
            None => Ok(c0),
            Some(i) => Err(((self.field.one(), c0), (self.field.exp(i as i64), self.counts[i]))),
        }
    }
}

fn check_same_field(field: &FieldSpec, blocks: &[Block]) -> Result<()> {
    if blocks.iter().any(|b| !b.field().same_field(field)) {
        return Err(Error::MixedFields);
    }
    Ok(())
}

/// Criterion (1): exact difference counts.
pub fn diff_counts(field: &Arc<FieldSpec>, blocks: &[Block]) -> Result<DiffCounts> {
    check_same_field(field, blocks)?;
    let n = field.order() as usize - 1;
    // zech[d] = log(ω^d - 1), d = 1..n
    let mut zech = vec![0u32; n];
    for (d, z) in zech.iter_mut().enumerate().skip(1) {
        *z = field.log(field.sub(field.exp(d as i64), field.one()))?;
    }
    let counts = blocks
        .par_iter()
        .flat_map(|b| {
            let exps = b.exponents();
            exps.par_iter().map(move |&i| (i, exps))
        })
        .fold(
            || vec![0u64; n],
            |mut acc, (i, exps)| {
                for &j in exps {
                    if i == j {
                        continue;
                    }
                    let d = if i >= j { i - j } else { i + n as u32 - j };
                    let mut e = j as usize + zech[d as usize] as usize;
                    if e >= n {
                        e -= n;
                    }
                    acc[e] += 1;
                }
                acc
            },
        )
        .reduce(
            || vec![0u64; n],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    Ok(DiffCounts { field: field.clone(), counts })
}

/// Bitset layout of `F_{p^r}` as `p_hi` rows of `p_lo` bits: element index
/// `x = hi * p_lo + lo`, where `lo` holds the low base-`p` digits.
struct AdditiveLayout {
    p: u32,
    lo_digits: u32,
    hi_digits: u32,
    p_lo: usize,
    p_hi: usize,
    words: usize,
}

impl AdditiveLayout {
    fn new(field: &FieldSpec) -> AdditiveLayout {
        let p = field.p();
        let mut lo_digits = 1;
        while lo_digits < field.r() && (p as u64).pow(lo_digits) < 64 {
            lo_digits += 1;
        }
        let p_lo = (p as usize).pow(lo_digits);
        let hi_digits = field.r() - lo_digits;
        AdditiveLayout { p, lo_digits, hi_digits, p_lo, p_hi: (p as usize).pow(hi_digits), words: p_lo.div_ceil(64) }
    }

    fn digit_add(&self, mut x: usize, mut y: usize, digits: u32) -> usize {
        let p = self.p as usize;
        let (mut out, mut place) = (0, 1);
        for _ in 0..digits {
            out += (x % p + y % p) % p * place;
            x /= p;
            y /= p;
            place *= p;
        }
        out
    }

    fn rows(&self, block: &Block) -> Vec<u64> {
        let mut rows = vec![0u64; self.p_hi * self.words];
        for x in block.elements() {
            let x = x.index() as usize;
            let (hi, lo) = (x / self.p_lo, x % self.p_lo);
            rows[hi * self.words + lo / 64] |= 1 << (lo % 64);
        }
        rows
    }

    /// `shifted[(al * p_hi + h) * words ..]` is row `h` translated by `al`.
    fn shifted_rows(&self, rows: &[u64]) -> Vec<u64> {
        let w = self.words;
        let mut out = vec![0u64; self.p_lo * self.p_hi * w];
        out.par_chunks_mut(self.p_hi * w).enumerate().for_each(|(al, chunk)| {
            for h in 0..self.p_hi {
                let src = &rows[h * w..(h + 1) * w];
                let dst = &mut chunk[h * w..(h + 1) * w];
                for (wi, &word) in src.iter().enumerate() {
                    let mut bits = word;
                    while bits != 0 {
                        let lo = wi * 64 + bits.trailing_zeros() as usize;
                        bits &= bits - 1;
                        let t = self.digit_add(lo, al, self.lo_digits);
                        dst[t / 64] |= 1 << (t % 64);
                    }
                }
            }
        });
        out
    }
}

/// Criterion (2): `Σ_i |E_i ∩ (E_i + a)|` for every element `a`, indexed
/// by element index (entry 0 is `Σ |E_i|`).
pub fn shifted_intersections(field: &Arc<FieldSpec>, blocks: &[Block]) -> Result<Vec<u64>> {
    check_same_field(field, blocks)?;
    let lay = AdditiveLayout::new(field);
    let w = lay.words;
    let prepared: Vec<(Vec<u64>, Vec<u64>)> = blocks
        .iter()
        .map(|b| {
            let rows = lay.rows(b);
            let shifted = lay.shifted_rows(&rows);
            (rows, shifted)
        })
        .collect();
    let out = (0..field.order() as usize)
        .into_par_iter()
        .map(|a| {
            let (ah, al) = (a / lay.p_lo, a % lay.p_lo);
            let mut total = 0u64;
            for h in 0..lay.p_hi {
                let target = lay.digit_add(h, ah, lay.hi_digits);
                for (rows, shifted) in &prepared {
                    let r = &rows[target * w..(target + 1) * w];
                    let s = &shifted[(al * lay.p_hi + h) * w..(al * lay.p_hi + h + 1) * w];
                    total += r.iter().zip(s).map(|(x, y)| (x & y).count_ones() as u64).sum::<u64>();
                }
            }
            total
        })
        .collect();
    Ok(out)
}

/// Certifies criteria (1) and (2) and returns the certified `(v, k, λ, ℓ)`.
pub fn verify_df(family: &Family) -> Result<DesignParams> {
    let field = family.field();
    let counts = diff_counts(field, family.blocks())?;
    let inter = shifted_intersections(field, family.blocks())?;
    for (x, c) in counts.iter() {
        let c2 = inter[x.index() as usize];
        if c != c2 {
            return Err(Error::CriteriaMismatch(format!(
                "element {}: {c} differences but {c2} shifted intersections",
                x.index()
            )));
        }
    }
    let lambda = counts.constant().map_err(|((x, cx), (y, cy))| Error::NotADifferenceFamily {
        first: x.index(),
        first_count: cx,
        second: y.index(),
        second_count: cy,
    })?;
    let p = family.params();
    let certified = DesignParams::new(p.v, p.k, lambda, p.ell);
    if !certified.satisfies_counting_law() {
        return Err(Error::Internal(format!("certified parameters {certified:?} violate the counting law")));
    }
    Ok(certified)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CharCriterionReport {
    /// `λ` read off from the character sums.
    pub lambda: u64,
    /// The common value `kℓ - λ`.
    pub value: f64,
    pub characters: u64,
    pub max_residual: f64,
}

/// Criterion (3): for every nonzero `a`, `Σ_i |ψ(a E_i)|^2 = kℓ - λ`.
pub fn verify_df_char(family: &Family, tol: f64) -> Result<CharCriterionReport> {
    let field = family.field();
    let p = field.p() as usize;
    let zeta: Vec<_> = (0..p as i64).map(|c| root_of_unity(p as u64, c)).collect();
    let trace_by_exp: Vec<u32> = field.antilog().iter().map(|&x| field.trace(x)).collect();
    let n = trace_by_exp.len();
    let values: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|m| {
            let mut total = 0.0;
            let mut counts = vec![0u64; p];
            for b in family.blocks() {
                counts.iter_mut().for_each(|c| *c = 0);
                for &e in b.exponents() {
                    let i = e as usize + m;
                    counts[trace_by_exp[if i >= n { i - n } else { i }] as usize] += 1;
                }
                let s: CompensatedSum =
                    counts.iter().zip(&zeta).filter(|(&c, _)| c > 0).map(|(&c, &z)| z * c as f64).collect();
                total += s.value().norm_sqr();
            }
            total
        })
        .collect();
    let prm = family.params();
    let kl = (prm.k * prm.ell) as f64;
    let lambda_f = kl - values[0];
    let lambda = lambda_f.round();
    let mut max_residual = (lambda_f - lambda).abs();
    if lambda < 0.0 || max_residual > tol {
        return Err(Error::ToleranceExceeded {
            check: "character criterion".into(),
            detail: format!("kℓ - Σ|ψ(E_i)|^2 = {lambda_f} is not a natural number"),
            residual: max_residual,
            tol,
        });
    }
    let value = kl - lambda;
    for (m, &s) in values.iter().enumerate() {
        let res = (s - value).abs();
        max_residual = max_residual.max(res);
        if res > tol {
            return Err(Error::ToleranceExceeded {
                check: "character criterion".into(),
                detail: format!("a = ω^{m}: Σ|ψ(aE_i)|^2 = {s}, expected {value}"),
                residual: res,
                tol,
            });
        }
    }
    Ok(CharCriterionReport { lambda: lambda as u64, value, characters: n as u64, max_residual })
}

/// `B ∩ -B = ∅` and `B ∪ -B = F*`.
pub fn is_skew(block: &Block) -> bool {
    let q = block.field().order();
    if q.is_multiple_of(2) || block.size() as u32 != (q - 1) / 2 {
        return false;
    }
    let half = (q - 1) / 2;
    let mut member = vec![false; (q - 1) as usize];
    for &e in block.exponents() {
        member[e as usize] = true;
    }
    block.exponents().iter().all(|&e| !member[((e + half) % (q - 1)) as usize])
}

/// Pass/fail record for a family: difference-family certification, per-block
/// skewness and, optionally, the character criterion.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SdfCertificate {
    pub v: u64,
    pub k: u64,
    pub ell: u64,
    /// Certified `λ`, present when the family is a difference family.
    pub lambda: Option<u64>,
    pub difference_family: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
    pub skew: Vec<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub character_criterion: Option<CharCriterionReport>,
    pub passed: bool,
    #[serde(skip)]
    error: Option<Error>,
}

impl SdfCertificate {
    /// The certified parameters, or the first failure.
    pub fn result(&self) -> Result<DesignParams> {
        if let Some(e) = &self.error {
            return Err(e.clone());
        }
        Ok(DesignParams::new(self.v, self.k, self.lambda.unwrap_or(0), self.ell))
    }
}

/// Certifies a skew Hadamard difference family.
pub fn verify_sdf(family: &Family) -> SdfCertificate {
    let p = family.params();
    let df = verify_df(family);
    let skew: Vec<bool> = family.blocks().iter().map(is_skew).collect();
    let error = match (&df, skew.iter().position(|s| !s)) {
        (Err(e), _) => Some(e.clone()),
        (Ok(_), Some(i)) => Some(Error::NotSkew(i)),
        (Ok(_), None) => None,
    };
    SdfCertificate {
        v: p.v,
        k: p.k,
        ell: p.ell,
        lambda: df.as_ref().ok().map(|d| d.lambda),
        difference_family: df.is_ok(),
        failure: error.as_ref().map(|e| e.to_string()),
        skew,
        character_criterion: None,
        passed: error.is_none(),
        error,
    }
}

/// [`verify_sdf`] plus criterion (3), which must agree with the certified `λ`.
pub fn verify_sdf_with_char(family: &Family, tol: f64) -> SdfCertificate {
    let mut cert = verify_sdf(family);
    match verify_df_char(family, tol) {
        Ok(rep) => {
            if cert.lambda.is_some_and(|l| l != rep.lambda) {
                let e = Error::CriteriaMismatch(format!(
                    "character criterion gives λ = {}, counting gives {:?}",
                    rep.lambda, cert.lambda
                ));
                cert.failure = Some(e.to_string());
                cert.error = Some(e);
                cert.passed = false;
            }
            cert.character_criterion = Some(rep);
        }
        Err(e) => {
            if cert.error.is_none() {
                cert.failure = Some(e.to_string());
                cert.error = Some(e);
            }
            cert.passed = false;
        }
    }
    cert
}

#[derive(Clone, Copy, Debug)]
pub struct ConstructOptions {
    /// Must equal `u + v_2(e)` when given.
    pub t: Option<u32>,
    pub cap: u64,
}

impl Default for ConstructOptions {
    fn default() -> Self {
        ConstructOptions { t: None, cap: DEFAULT_TABLE_CAP }
    }
}

/// A skew Hadamard difference family with `2^{u-1}` blocks in `F_{q^e}`.
///
/// With `e = s 2^j`, `s` odd, the base is `Q = q^s` (still `2^u + 1` mod
/// `2^{u+1}`). For `j = 0` the blocks are `B_0, ..., B_{2^{u-1}-1}` in `F_Q`;
/// otherwise `t = u + j`, `f = 2^j`, and the blocks are
/// `D_0, D_f, ..., D_{(2^{u-1}-1) f}` in `F_{Q^f}`.
pub fn construct_sdf(q: u64, u: u32, e: u32) -> Result<Family> {
    construct_sdf_with(q, u, e, ConstructOptions::default())
}

pub fn construct_sdf_with(q: u64, u: u32, e: u32, opts: ConstructOptions) -> Result<Family> {
    let (p, r) = check_congruence(q, u)?;
    if e == 0 {
        return Err(Error::InvalidParameter("e must be positive".into()));
    }
    let (s, j) = odd_part(e as u64);
    let s = s as u32;
    let degree = r as u64 * e as u64;
    match checked_pow(p, degree.min(u32::MAX as u64) as u32) {
        Some(order) if order <= opts.cap => {}
        other => {
            let order = other.map(|o| o as u128).unwrap_or(u128::MAX);
            return Err(Error::OrderTooLarge { order, cap: opts.cap });
        }
    }
    let t = u + j;
    if let Some(tt) = opts.t {
        if tt != t {
            return Err(Error::InvalidParameter(format!(
                "t = {tt} does not fit e = {e}: F_(q^e) needs f = 2^(t-u) = 2^{j}, i.e. t = {t}"
            )));
        }
    }
    let provenance = Some(Provenance { q, u, e, s, j, t });
    let base_order = q.pow(s);
    let blocks = if j == 0 {
        let field = Arc::new(build_field_capped(p, r * s, opts.cap)?);
        family_b(&field, u)?
    } else {
        CycParams::with_cap(base_order, u, t, opts.cap)?.family_d()?
    };
    Family::new(blocks, provenance)
}

/// On-disk form of a family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyJson {
    pub p: u32,
    pub r: u32,
    pub q: Option<u64>,
    pub u: Option<u32>,
    pub e: Option<u32>,
    pub s: Option<u32>,
    pub j: Option<u32>,
    pub t: Option<u32>,
    pub modulus: Vec<u32>,
    pub primitive: Vec<u32>,
    pub blocks: Vec<Vec<u32>>,
    pub params: DesignParams,
}

impl Family {
    pub fn to_json(&self) -> FamilyJson {
        let FieldSummary { p, r, modulus, primitive } = self.field.summary();
        let pv = self.provenance;
        FamilyJson {
            p,
            r,
            q: pv.map(|x| x.q),
            u: pv.map(|x| x.u),
            e: pv.map(|x| x.e),
            s: pv.map(|x| x.s),
            j: pv.map(|x| x.j),
            t: pv.map(|x| x.t),
            modulus,
            primitive,
            blocks: self.blocks.iter().map(|b| b.exponents().to_vec()).collect(),
            params: self.params,
        }
    }

    /// Rebuilds the field (validating modulus and primitive element) and the
    /// blocks. The stored `params` are not trusted; they are recomputed.
    pub fn from_json(doc: &FamilyJson, cap: u64) -> Result<Family> {
        let summary =
            FieldSummary { p: doc.p, r: doc.r, modulus: doc.modulus.clone(), primitive: doc.primitive.clone() };
        let field = Arc::new(FieldSpec::from_summary(&summary, cap)?);
        let blocks = doc
            .blocks
            .iter()
            .map(|b| Block::from_exponents(field.clone(), b.iter().copied()))
            .collect::<Result<Vec<_>>>()?;
        let provenance = match (doc.q, doc.u, doc.e, doc.s, doc.j, doc.t) {
            (Some(q), Some(u), Some(e), Some(s), Some(j), Some(t)) => Some(Provenance { q, u, e, s, j, t }),
            _ => None,
        };
        Family::new(blocks, provenance)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::build_field;

    fn f(p: u64, r: u32) -> Arc<FieldSpec> {
        Arc::new(build_field(p, r).unwrap())
    }

    fn block(field: &Arc<FieldSpec>, elems: &[u32]) -> Block {
        Block::from_elements(field.clone(), elems.iter().map(|&i| field.from_index(i).unwrap())).unwrap()
    }

    fn counts_by_elem(c: &DiffCounts) -> Vec<u64> {
        let mut v = vec![0; c.field.order() as usize];
        for (x, n) in c.iter() {
            v[x.index() as usize] = n;
        }
        v
    }

    #[test]
    fn diff_counts_examples() {
        let f5 = f(5, 1);
        let c = diff_counts(&f5, &[block(&f5, &[1, 2]), block(&f5, &[2, 4])]).unwrap();
        assert_eq!(counts_by_elem(&c), vec![0, 1, 1, 1, 1]);
        let c = diff_counts(&f5, &[block(&f5, &[1, 2])]).unwrap();
        assert_eq!(counts_by_elem(&c), vec![0, 1, 0, 0, 1]);
        let c = diff_counts(&f5, &[Block::empty(f5.clone())]).unwrap();
        assert_eq!(counts_by_elem(&c), vec![0; 5]);
        let f7 = f(7, 1);
        assert_eq!(diff_counts(&f5, &[block(&f7, &[1])]).unwrap_err(), Error::MixedFields);
    }

    #[test]
    fn shifted_intersections_match_counts() {
        for (p, r) in [(5, 1), (3, 3), (5, 3), (2, 7), (13, 1)] {
            let field = f(p, r);
            let n = field.order() - 1;
            let blocks = vec![
                Block::from_exponents(field.clone(), (0..n).filter(|e| e % 3 != 1)).unwrap(),
                Block::from_exponents(field.clone(), (0..n).step_by(2)).unwrap(),
            ];
            let c = counts_by_elem(&diff_counts(&field, &blocks).unwrap());
            let s = shifted_intersections(&field, &blocks).unwrap();
            assert_eq!(&c[1..], &s[1..], "p={p} r={r}");
        }
    }

    #[test]
    fn verify_df_examples() {
        let f5 = f(5, 1);
        let fam = Family::new(family_b(&f5, 2).unwrap(), None).unwrap();
        assert_eq!(verify_df(&fam).unwrap(), DesignParams::new(5, 2, 1, 2));
        let dup = Family::new(vec![block(&f5, &[1, 2]), block(&f5, &[1, 2])], None).unwrap();
        match verify_df(&dup).unwrap_err() {
            Error::NotADifferenceFamily { first, first_count, second, second_count } => {
                assert_eq!((first, first_count), (1, 2));
                assert_eq!(second_count, 0);
                assert!(second == 2 || second == 3);
            }
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn skewness() {
        let f5 = f(5, 1);
        assert!(is_skew(&block(&f5, &[1, 2])));
        assert!(!is_skew(&block(&f5, &[1, 4])));
        assert!(!is_skew(&block(&f5, &[1])));
        let f13 = f(13, 1);
        assert!(is_skew(&crate::cyclotomy::block_b(&f13, 2, 0).unwrap()));
        let f4 = f(2, 2);
        assert!(!is_skew(&block(&f4, &[1])));
    }

    #[test]
    fn two_skew_blocks_covering_each_difference_once() {
        // {1,2} gives differences ±1 and {1,3} gives ±2: a (5,2,1) family.
        let f5 = f(5, 1);
        let fam = Family::new(vec![block(&f5, &[1, 2]), block(&f5, &[1, 3])], None).unwrap();
        let cert = verify_sdf(&fam);
        assert!(cert.passed);
        assert_eq!(cert.skew, vec![true, true]);
        assert_eq!(cert.lambda, Some(1));
        let bad = Family::new(vec![block(&f5, &[1, 2]), block(&f5, &[2, 3])], None).unwrap();
        let cert = verify_sdf(&bad);
        assert!(!cert.passed);
        assert!(matches!(cert.result(), Err(Error::NotADifferenceFamily { .. })));
    }

    #[test]
    fn char_criterion_small() {
        let f5 = f(5, 1);
        let fam = Family::new(family_b(&f5, 2).unwrap(), None).unwrap();
        let rep = verify_df_char(&fam, 1e-9).unwrap();
        assert_eq!(rep.lambda, 1);
        assert!((rep.value - 3.0).abs() < 1e-12);
        assert_eq!(rep.characters, 4);
        let dup = Family::new(vec![block(&f5, &[1, 2]), block(&f5, &[1, 2])], None).unwrap();
        assert!(verify_df_char(&dup, 1e-9).is_err());
    }

    #[test]
    fn construct_small_cases() {
        let fam = construct_sdf(5, 2, 1).unwrap();
        let exps: Vec<Vec<u32>> = fam.blocks().iter().map(|b| b.exponents().to_vec()).collect();
        assert_eq!(exps, vec![vec![0, 1], vec![1, 2]]);
        let cert = verify_sdf(&fam);
        assert!(cert.passed);
        assert_eq!(cert.lambda, Some(1));

        let fam = construct_sdf(5, 2, 2).unwrap();
        assert_eq!(verify_sdf(&fam).result().unwrap(), DesignParams::new(25, 12, 11, 2));
        let pv = fam.provenance().unwrap();
        assert_eq!((pv.s, pv.j, pv.t), (1, 1, 3));

        assert!(matches!(construct_sdf(7, 2, 1), Err(Error::CongruenceViolation { .. })));
        assert!(matches!(construct_sdf(5, 2, 10), Err(Error::OrderTooLarge { .. })));
        let opts = ConstructOptions { t: Some(4), ..Default::default() };
        assert!(matches!(construct_sdf_with(5, 2, 2, opts), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn json_roundtrip() {
        let fam = construct_sdf(13, 2, 2).unwrap();
        let doc = fam.to_json();
        let text = serde_json::to_string(&doc).unwrap();
        let back = Family::from_json(&serde_json::from_str(&text).unwrap(), DEFAULT_TABLE_CAP).unwrap();
        assert_eq!(back.blocks(), fam.blocks());
        assert_eq!(verify_sdf(&back), verify_sdf(&fam));
    }
}
