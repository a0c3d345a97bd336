//! Group-developed ±1 matrices, the two- and four-block skew Hadamard
//! arrays, and exact certification.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::cyclotomy::Block;
use crate::design::{is_skew, verify_df, Family};
use crate::error::{Error, Result};
use crate::gf::{Elem, FieldSpec};

/// Above this order row products go through packed bit rows.
const PACKED_THRESHOLD: usize = 512;

/// Square matrix with entries in {+1, -1}, dense and row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct SignMatrix {
    n: usize,
    entries: Vec<i8>,
}

impl std::fmt::Debug for SignMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "SignMatrix({})\n{}", self.n, self.to_text())
    }
}

impl SignMatrix {
    pub fn new(n: usize, entries: Vec<i8>) -> Result<SignMatrix> {
        if entries.len() != n * n {
            return Err(Error::InvalidParameter(format!("{} entries for order {n}", entries.len())));
        }
        if entries.iter().any(|&x| x != 1 && x != -1) {
            return Err(Error::InvalidParameter("entries must be +1 or -1".into()));
        }
        Ok(SignMatrix { n, entries })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> bool) -> SignMatrix {
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                entries.push(if f(i, j) { 1 } else { -1 });
            }
        }
        SignMatrix { n, entries }
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> i8 {
        self.entries[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[i8] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn transpose(&self) -> SignMatrix {
        SignMatrix::from_fn(self.n, |i, j| self.get(j, i) == 1)
    }

    /// Exact integer product `self · other^T`.
    pub fn mul_transpose(&self, other: &SignMatrix) -> Vec<i64> {
        let n = self.n;
        let mut out = vec![0i64; n * n];
        for i in 0..n {
            for j in 0..n {
                out[i * n + j] = dot(self.row(i), other.row(j));
            }
        }
        out
    }

    /// One line per row, `+` for +1 and `-` for -1, LF-terminated.
    pub fn to_text(&self) -> String {
        let mut s = String::with_capacity(self.n * (self.n + 1));
        for i in 0..self.n {
            s.extend(self.row(i).iter().map(|&x| if x == 1 { '+' } else { '-' }));
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str) -> Result<SignMatrix> {
        let rows: Vec<&str> = text.lines().filter(|l| !l.is_empty()).collect();
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Parse(format!("row {i} has {} characters, expected {n}", row.len())));
            }
            for c in row.chars() {
                entries.push(match c {
                    '+' => 1,
                    '-' => -1,
                    other => return Err(Error::Parse(format!("unexpected character {other:?} in row {i}"))),
                });
            }
        }
        Ok(SignMatrix { n, entries })
    }

    fn packed(&self) -> (usize, Vec<u64>) {
        let words = self.n.div_ceil(64);
        let mut bits = vec![0u64; self.n * words];
        for i in 0..self.n {
            for (j, &x) in self.row(i).iter().enumerate() {
                if x == 1 {
                    bits[i * words + j / 64] |= 1 << (j % 64);
                }
            }
        }
        (words, bits)
    }
}

fn dot(a: &[i8], b: &[i8]) -> i64 {
    a.iter().zip(b).map(|(&x, &y)| (x as i64) * (y as i64)).sum()
}

/// Zero first, then `ω^0, ω^1, ..., ω^{v-2}`.
#[derive(Clone, Debug)]
pub struct GroupOrdering {
    field: Arc<FieldSpec>,
    elements: Vec<Elem>,
    position: Vec<u32>,
}

impl GroupOrdering {
    pub fn new(field: Arc<FieldSpec>) -> GroupOrdering {
        let mut elements = Vec::with_capacity(field.order() as usize);
        elements.push(Elem::ZERO);
        elements.extend_from_slice(field.antilog());
        let mut position = vec![0u32; elements.len()];
        for (i, x) in elements.iter().enumerate() {
            position[x.index() as usize] = i as u32;
        }
        GroupOrdering { field, elements, position }
    }

    pub fn field(&self) -> &Arc<FieldSpec> {
        &self.field
    }

    pub fn elements(&self) -> &[Elem] {
        &self.elements
    }

    pub fn position(&self, x: Elem) -> usize {
        self.position[x.index() as usize] as usize
    }

    /// SHA-256 of the element indices in order, hex encoded.
    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        for x in &self.elements {
            h.update(x.index().to_le_bytes());
        }
        format!("{:x}", h.finalize())
    }

    fn member(&self, x: &Block) -> Result<Vec<bool>> {
        if !x.field().same_field(&self.field) {
            return Err(Error::MixedFields);
        }
        Ok(x.indicator())
    }
}

/// `m_{ij} = +1` iff `g_j - g_i ∈ X`.
pub fn type1(ord: &GroupOrdering, x: &Block) -> Result<SignMatrix> {
    let member = ord.member(x)?;
    let f = &ord.field;
    let g = &ord.elements;
    Ok(SignMatrix::from_fn(g.len(), |i, j| member[f.sub(g[j], g[i]).index() as usize]))
}

/// `n_{ij} = +1` iff `g_j + g_i ∈ X`; symmetric.
pub fn type2(ord: &GroupOrdering, x: &Block) -> Result<SignMatrix> {
    let member = ord.member(x)?;
    let f = &ord.field;
    let g = &ord.elements;
    Ok(SignMatrix::from_fn(g.len(), |i, j| member[f.add(g[j], g[i]).index() as usize]))
}

enum Cell<'a> {
    Ones(i8),
    Mat(i8, &'a SignMatrix, bool),
}

use Cell::{Mat, Ones};

fn assemble(sizes: &[usize], cells: &[Vec<Cell<'_>>]) -> SignMatrix {
    let offsets: Vec<usize> = sizes.iter().scan(0, |acc, &s| Some(std::mem::replace(acc, *acc + s))).collect();
    let n: usize = sizes.iter().sum();
    let mut entries = vec![0i8; n * n];
    for (bi, row) in cells.iter().enumerate() {
        for (bj, cell) in row.iter().enumerate() {
            for i in 0..sizes[bi] {
                for j in 0..sizes[bj] {
                    let v = match *cell {
                        Ones(s) => s,
                        Mat(s, m, false) => s * m.get(i, j),
                        Mat(s, m, true) => s * m.get(j, i),
                    };
                    entries[(offsets[bi] + i) * n + offsets[bj] + j] = v;
                }
            }
        }
    }
    SignMatrix { n, entries }
}

fn check_array_precondition(blocks: &[&Block], lambda_of_m: impl Fn(u64) -> u64) -> Result<()> {
    let fam = Family::new(blocks.iter().map(|&b| b.clone()).collect(), None)?;
    let params = verify_df(&fam).map_err(|e| Error::PreconditionFailed(e.to_string()))?;
    let m = params.m.ok_or_else(|| Error::PreconditionFailed("group order is even".into()))?;
    if params.k != m || params.lambda != lambda_of_m(m) {
        return Err(Error::PreconditionFailed(format!(
            "parameters ({}, {}, {}) do not have the form (2m+1, m, {})",
            params.v,
            params.k,
            params.lambda,
            lambda_of_m(m)
        )));
    }
    if !is_skew(blocks[0]) {
        return Err(Error::PreconditionFailed("first block is not skew".into()));
    }
    Ok(())
}

fn two_block_array(ord: &GroupOrdering, b1: &Block, b2: &Block) -> Result<SignMatrix> {
    let m1 = type1(ord, b1)?;
    let m2 = type2(ord, b2)?;
    let v = ord.elements.len();
    Ok(assemble(
        &[1, 1, v, v],
        &[
            vec![Ones(1), Ones(1), Ones(1), Ones(1)],
            vec![Ones(-1), Ones(1), Ones(1), Ones(-1)],
            vec![Ones(-1), Ones(-1), Mat(-1, &m1, false), Mat(-1, &m2, false)],
            vec![Ones(-1), Ones(1), Mat(1, &m2, false), Mat(-1, &m1, false)],
        ],
    ))
}

fn four_block_array(ord: &GroupOrdering, b: [&Block; 4]) -> Result<SignMatrix> {
    let m1 = type1(ord, b[0])?;
    let m2 = type1(ord, b[1])?;
    let m3 = type2(ord, b[2])?;
    let m4 = type1(ord, b[3])?;
    let v = ord.elements.len();
    fn row<'a>(s: [i8; 4], rest: [Cell<'a>; 4]) -> Vec<Cell<'a>> {
        s.map(Ones).into_iter().chain(rest).collect()
    }
    Ok(assemble(
        &[1, 1, 1, 1, v, v, v, v],
        &[
            row([1, -1, -1, -1], [Ones(-1), Ones(-1), Ones(-1), Ones(-1)]),
            row([1, 1, 1, -1], [Ones(1), Ones(-1), Ones(1), Ones(-1)]),
            row([1, -1, 1, 1], [Ones(1), Ones(-1), Ones(-1), Ones(1)]),
            row([1, 1, -1, 1], [Ones(1), Ones(1), Ones(-1), Ones(-1)]),
            row([1, -1, -1, -1], [Mat(-1, &m1, false), Mat(-1, &m2, false), Mat(-1, &m3, false), Mat(-1, &m4, false)]),
            row([1, 1, 1, -1], [Mat(1, &m2, true), Mat(-1, &m1, true), Mat(1, &m4, false), Mat(-1, &m3, false)]),
            row([1, -1, 1, 1], [Mat(1, &m3, false), Mat(-1, &m4, true), Mat(-1, &m1, false), Mat(1, &m2, true)]),
            row([1, 1, -1, 1], [Mat(1, &m4, true), Mat(1, &m3, false), Mat(-1, &m2, false), Mat(-1, &m1, true)]),
        ],
    ))
}

/// The order-`4(m+1)` array from a `(2m+1, m, m-1)` family `{B1, B2}` with
/// `B1` skew: `M1` type-1 of `B1`, `M2` type-2 of `B2`.
pub fn assemble_2block(ord: &GroupOrdering, b1: &Block, b2: &Block) -> Result<SignMatrix> {
    check_array_precondition(&[b1, b2], |m| m - 1)?;
    two_block_array(ord, b1, b2)
}

/// The order-`8(m+1)` array from a `(2m+1, m, 2(m-1))` family with `B1`
/// skew: `M1, M2, M4` type-1 and `M3` type-2.
pub fn assemble_4block(ord: &GroupOrdering, b: [&Block; 4]) -> Result<SignMatrix> {
    check_array_precondition(&b, |m| 2 * (m - 1))?;
    four_block_array(ord, b)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certification {
    pub order: usize,
    pub is_hadamard: bool,
    pub is_skew_type: bool,
    /// First row pair `(i, j)`, `i <= j`, violating `H H^T = nI`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hadamard_violation: Option<(usize, usize)>,
    /// First `(i, j)` violating `H + H^T = 2I`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub skew_violation: Option<(usize, usize)>,
    /// Number of sampled row pairs, or `None` for an exhaustive check.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sampled_pairs: Option<usize>,
}

impl Certification {
    pub fn passed(&self) -> bool {
        self.is_hadamard && self.is_skew_type
    }
}

fn skew_violation(h: &SignMatrix) -> Option<(usize, usize)> {
    let n = h.n;
    (0..n).into_par_iter().find_map_first(|i| {
        if h.get(i, i) != 1 {
            return Some((i, i));
        }
        (i + 1..n).find(|&j| h.get(i, j) != -h.get(j, i)).map(|j| (i, j))
    })
}

fn row_product(h: &SignMatrix, packed: &Option<(usize, Vec<u64>)>, i: usize, j: usize) -> i64 {
    match packed {
        Some((w, bits)) => {
            let a = &bits[i * w..(i + 1) * w];
            let b = &bits[j * w..(j + 1) * w];
            let diff: u32 = a.iter().zip(b).map(|(x, y)| (x ^ y).count_ones()).sum();
            h.n as i64 - 2 * diff as i64
        }
        None => dot(h.row(i), h.row(j)),
    }
}

fn expected_product(h: &SignMatrix, i: usize, j: usize) -> i64 {
    if i == j {
        h.n as i64
    } else {
        0
    }
}

/// Exhaustive exact certification of `H H^T = nI` and `H + H^T = 2I`.
pub fn certify(h: &SignMatrix) -> Certification {
    let n = h.n;
    let packed = (n > PACKED_THRESHOLD).then(|| h.packed());
    let hadamard_violation = (0..n).into_par_iter().find_map_first(|i| {
        (i..n).find(|&j| row_product(h, &packed, i, j) != expected_product(h, i, j)).map(|j| (i, j))
    });
    let skew_violation = skew_violation(h);
    Certification {
        order: n,
        is_hadamard: hadamard_violation.is_none(),
        is_skew_type: skew_violation.is_none(),
        hadamard_violation,
        skew_violation,
        sampled_pairs: None,
    }
}

/// Orthogonality checked on `pairs` random distinct row pairs (seeded);
/// skewness is still checked exhaustively.
pub fn certify_sampled(h: &SignMatrix, pairs: usize, seed: u64) -> Certification {
    let n = h.n;
    let packed = Some(h.packed());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut violation = None;
    if n > 1 {
        for _ in 0..pairs {
            let i = rng.gen_range(0..n);
            let mut j = rng.gen_range(0..n - 1);
            if j >= i {
                j += 1;
            }
            if row_product(h, &packed, i, j) != 0 {
                violation = Some((i.min(j), i.max(j)));
                break;
            }
        }
    }
    let skew_violation = skew_violation(h);
    Certification {
        order: n,
        is_hadamard: violation.is_none(),
        is_skew_type: skew_violation.is_none(),
        hadamard_violation: violation,
        skew_violation,
        sampled_pairs: Some(pairs),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CertifyMode {
    Full,
    Sampled { pairs: usize, seed: u64 },
}

impl CertifyMode {
    pub fn run(self, h: &SignMatrix) -> Certification {
        match self {
            CertifyMode::Full => certify(h),
            CertifyMode::Sampled { pairs, seed } => certify_sampled(h, pairs, seed),
        }
    }
}

/// A certified matrix and the block-to-slot assignment that produced it.
#[derive(Clone, Debug)]
pub struct Assembled {
    pub matrix: SignMatrix,
    /// `assignment[slot]` is the index of the family block placed in array
    /// slot `slot` (slot 0 holds `B1`).
    pub assignment: Vec<usize>,
    /// Assignments tried, including the winning one.
    pub attempts: usize,
    pub certification: Certification,
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for (i, &x) in items.iter().enumerate() {
        let mut rest = items.to_vec();
        rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, x);
            out.push(tail);
        }
    }
    out
}

/// Slot assignments in search order: identity first, then permutations of
/// the slots after the first, then the same with the first slot rotated.
pub fn assignment_order(ell: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for rot in 0..ell {
        let rest: Vec<usize> = (1..ell).map(|i| (rot + i) % ell).collect();
        for tail in permutations(&rest) {
            let mut a = vec![rot];
            a.extend(tail);
            out.push(a);
        }
    }
    out
}

/// Builds the skew Hadamard matrix for a 2- or 4-block family, trying block
/// assignments in [`assignment_order`] until one certifies.
pub fn hadamard_from_family(family: &Family, mode: CertifyMode) -> Result<Assembled> {
    let ell = family.blocks().len();
    let lambda_of_m: fn(u64) -> u64 = match ell {
        2 => |m| m - 1,
        4 => |m| 2 * (m - 1),
        other => return Err(Error::UnsupportedBlockCount(other)),
    };
    let blocks: Vec<&Block> = family.blocks().iter().collect();
    check_array_precondition(&blocks, lambda_of_m)?;
    let ord = GroupOrdering::new(family.field().clone());
    for (attempt, a) in assignment_order(ell).into_iter().enumerate() {
        if !is_skew(blocks[a[0]]) {
            continue;
        }
        let matrix = match ell {
            2 => two_block_array(&ord, blocks[a[0]], blocks[a[1]])?,
            _ => four_block_array(&ord, [blocks[a[0]], blocks[a[1]], blocks[a[2]], blocks[a[3]]])?,
        };
        let certification = mode.run(&matrix);
        if certification.passed() {
            return Ok(Assembled { matrix, assignment: a, attempts: attempt + 1, certification });
        }
    }
    Err(Error::AssemblyMismatch)
}
