//! Additive and multiplicative characters, Gauss sums, and numeric checks of
//! the Gauss-sum identities the construction relies on.
//!
//! Characters are normalized against the field's primitive element: the
//! character of order `N` sends `ω` to `ζ_N = exp(2πi/N)`, and `ψ(x) =
//! ζ_p^{Tr(x)}` is the canonical additive character. Sums are accumulated as
//! exact integer counts per (character value, trace) bucket first, then
//! combined with compensated floating-point summation.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cyclotomy::{Block, CycParams};
use crate::error::{Error, Result};
use crate::gf::{subfield_embedding, Elem, FieldSpec};

/// `exp(2πi k / n)` with `k` reduced first.
pub fn root_of_unity(n: u64, k: i64) -> Complex64 {
    let k = k.rem_euclid(n as i64) as f64;
    Complex64::from_polar(1.0, TAU * k / n as f64)
}

/// Neumaier-compensated complex accumulator.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    re: (f64, f64),
    im: (f64, f64),
}

fn neumaier(acc: &mut (f64, f64), x: f64) {
    let (sum, comp) = acc;
    let t = *sum + x;
    if sum.abs() >= x.abs() {
        *comp += (*sum - t) + x;
    } else {
        *comp += (x - t) + *sum;
    }
    *sum = t;
}

impl CompensatedSum {
    pub fn add(&mut self, z: Complex64) {
        neumaier(&mut self.re, z.re);
        neumaier(&mut self.im, z.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.0 + self.re.1, self.im.0 + self.im.1)
    }
}

impl FromIterator<Complex64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = Complex64>>(iter: I) -> Self {
        let mut s = CompensatedSum::default();
        for z in iter {
            s.add(z);
        }
        s
    }
}

/// Characters of one field: `ψ` and the cyclic group of multiplicative
/// characters of order dividing `N`.
#[derive(Clone, Debug)]
pub struct CharSystem {
    spec: Arc<FieldSpec>,
    order: u32,
    zeta_n: Vec<Complex64>,
    zeta_p: Vec<Complex64>,
    // Tr(ω^i)
    trace_by_exp: Vec<u32>,
}

impl CharSystem {
    pub fn new(spec: Arc<FieldSpec>, order: u32) -> Result<CharSystem> {
        let q = spec.order() as u64;
        if order == 0 || !(q - 1).is_multiple_of(order as u64) {
            return Err(Error::BadOrderDivisor { n: order as u64, order: q });
        }
        let p = spec.p() as u64;
        let zeta_n = (0..order as i64).map(|k| root_of_unity(order as u64, k)).collect();
        let zeta_p = (0..p as i64).map(|k| root_of_unity(p, k)).collect();
        let trace_by_exp = spec.antilog().iter().map(|&x| spec.trace(x)).collect();
        Ok(CharSystem { spec, order, zeta_n, zeta_p, trace_by_exp })
    }

    pub fn spec(&self) -> &Arc<FieldSpec> {
        &self.spec
    }

    /// `N`.
    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn zeta_n(&self) -> Complex64 {
        self.zeta_n[1 % self.order as usize]
    }

    pub fn zeta_p(&self) -> Complex64 {
        self.zeta_p[1 % self.zeta_p.len()]
    }

    /// `ψ(x) = ζ_p^{Tr(x)}`.
    pub fn additive_char(&self, x: Elem) -> Result<Complex64> {
        Ok(self.zeta_p[self.spec.trace_to_prime(x)? as usize])
    }

    /// `χ_N^k(x) = ζ_N^{k log x}`.
    pub fn mult_char(&self, k: u32, x: Elem) -> Result<Complex64> {
        if k >= self.order {
            return Err(Error::IndexOutOfRange { index: k as i64, bound: self.order as u64 });
        }
        if x.is_zero() {
            return Err(Error::ZeroArgument);
        }
        let l = self.spec.log(x)? as u64;
        Ok(self.zeta_n[(k as u64 * l % self.order as u64) as usize])
    }

    fn weighted(&self, counts: &[u64], stride: usize, k: u32) -> Complex64 {
        let n = self.order as u64;
        let mut acc = CompensatedSum::default();
        for (slot, &c) in counts.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let (a, b) = (slot / stride, slot % stride);
            let z = self.zeta_n[(k as u64 * a as u64 % n) as usize] * self.zeta_p[b];
            acc.add(z * c as f64);
        }
        acc.value()
    }

    /// `counts[a * p + b]` = #{x in F*: log x = a (mod N), Tr x = b}.
    fn class_trace_counts(&self) -> Vec<u64> {
        let p = self.zeta_p.len();
        let n = self.order as usize;
        let mut counts = vec![0u64; n * p];
        for (i, &tr) in self.trace_by_exp.iter().enumerate() {
            counts[(i % n) * p + tr as usize] += 1;
        }
        counts
    }

    /// `G(χ_N^k) = Σ_{x ∈ F*} χ_N^k(x) ψ(x)`.
    pub fn gauss_sum(&self, k: u32) -> Result<Complex64> {
        if k >= self.order {
            return Err(Error::IndexOutOfRange { index: k as i64, bound: self.order as u64 });
        }
        Ok(self.weighted(&self.class_trace_counts(), self.zeta_p.len(), k))
    }

    /// All `G(χ_N^k)`, `k = 0..N`.
    pub fn gauss_sums(&self) -> Vec<Complex64> {
        let counts = self.class_trace_counts();
        (0..self.order).map(|k| self.weighted(&counts, self.zeta_p.len(), k)).collect()
    }

    /// `ψ(ω^shift · B)`, the additive character summed over a scaled block.
    pub fn block_char(&self, block: &Block, shift: i64) -> Result<Complex64> {
        if !block.field().same_field(&self.spec) {
            return Err(Error::MixedFields);
        }
        let n = self.trace_by_exp.len() as i64;
        let mut counts = vec![0u64; self.zeta_p.len()];
        let s = shift.rem_euclid(n) as usize;
        for &e in block.exponents() {
            let i = e as usize + s;
            let i = if i >= n as usize { i - n as usize } else { i };
            counts[self.trace_by_exp[i] as usize] += 1;
        }
        Ok(self.weighted(&counts, counts.len(), 0))
    }

    /// `ψ(C_i)` through the orthogonality expansion
    /// `(1/N) Σ_j G(χ^j) χ^{-j}(γ^i)`.
    pub fn class_char_via_gauss(&self, gauss: &[Complex64], i: u32) -> Complex64 {
        let n = self.order as i64;
        let s: CompensatedSum = (0..n)
            .map(|j| gauss[j as usize] * self.zeta_n[(-j * i as i64).rem_euclid(n) as usize])
            .collect();
        s.value() / n as f64
    }
}

fn exceeded(check: &str, detail: String, residual: f64, tol: f64) -> Error {
    Error::ToleranceExceeded { check: check.into(), detail, residual, tol }
}

/// Worst residuals of the four basic Gauss-sum properties.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GaussPropertyReport {
    pub field_order: u32,
    pub char_order: u32,
    /// `|G(χ)|^2 = q` for nontrivial `χ`.
    pub norm: f64,
    /// `G(χ^{-1}) = χ(-1) conj(G(χ))`.
    pub inverse: f64,
    /// `G(1) = -1`.
    pub trivial: f64,
    /// `G(χ^p) = G(χ)`.
    pub frobenius: f64,
}

pub fn check_gauss_properties(sys: &CharSystem, tol: f64) -> Result<GaussPropertyReport> {
    let g = sys.gauss_sums();
    let n = sys.order();
    let q = sys.spec().order() as f64;
    let p = sys.spec().p();
    let minus_one = sys.spec().neg(sys.spec().one());
    let mut rep = GaussPropertyReport {
        field_order: sys.spec().order(),
        char_order: n,
        norm: 0.0,
        inverse: 0.0,
        trivial: (g[0] + 1.0).norm(),
        frobenius: 0.0,
    };
    if rep.trivial > tol {
        return Err(exceeded("G(trivial) = -1", "k = 0".into(), rep.trivial, tol));
    }
    for k in 0..n {
        let inv_k = ((n - k) % n) as usize;
        let chi_minus_one = sys.mult_char(k, minus_one)?;
        let res = (g[inv_k] - chi_minus_one * g[k as usize].conj()).norm();
        rep.inverse = rep.inverse.max(res);
        if res > tol {
            return Err(exceeded("G(χ^-1) = χ(-1) conj G(χ)", format!("k = {k}"), res, tol));
        }
        let pk = (p as u64 * k as u64 % n as u64) as usize;
        let res = (g[pk] - g[k as usize]).norm();
        rep.frobenius = rep.frobenius.max(res);
        if res > tol {
            return Err(exceeded("G(χ^p) = G(χ)", format!("k = {k}"), res, tol));
        }
        if k != 0 {
            let res = (g[k as usize].norm_sqr() - q).abs();
            rep.norm = rep.norm.max(res);
            if res > tol {
                return Err(exceeded("|G(χ)|^2 = q", format!("k = {k}"), res, tol));
            }
        }
    }
    Ok(rep)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LiftingReport {
    pub base_order: u32,
    pub ext_order: u32,
    pub degree: u32,
    pub char_order: u32,
    pub max_residual: f64,
}

/// Lifting identity `G_{q^f}(χ) = (-1)^{f-1} G_q(χ')^f` for every nontrivial
/// `χ'` of order dividing `n`, where `χ(x) = χ'(x^{(q^f-1)/(q-1)})`.
///
/// `base` must be embedded in `ext` with its primitive element equal to
/// `ω^{(q^f-1)/(q-1)}`; with that normalization the lift of `χ'^k` is the
/// order-`n` character `χ^k` of `ext`.
pub fn check_lifting(base: &Arc<FieldSpec>, ext: &Arc<FieldSpec>, n: u32, tol: f64) -> Result<LiftingReport> {
    subfield_embedding(base, ext)?;
    let f = ext.r() / base.r();
    let gb = CharSystem::new(base.clone(), n)?.gauss_sums();
    let ge = CharSystem::new(ext.clone(), n)?.gauss_sums();
    let sign = if f % 2 == 1 { 1.0 } else { -1.0 };
    let mut max_residual: f64 = 0.0;
    for k in 1..n as usize {
        let rhs = gb[k].powu(f) * sign;
        let res = (ge[k] - rhs).norm();
        max_residual = max_residual.max(res);
        if res > tol {
            return Err(exceeded("lifting", format!("k = {k}, f = {f}"), res, tol));
        }
    }
    Ok(LiftingReport { base_order: base.order(), ext_order: ext.order(), degree: f, char_order: n, max_residual })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProductReport {
    pub ell: u32,
    pub char_order: u32,
    /// Exponents `k` of the characters `χ_N^k` that were checked.
    pub checked: Vec<u32>,
    /// Checked characters for which some `χ η^i` or `χ^ℓ` is trivial; those
    /// factors enter as `G(1) = -1`.
    pub degenerate: Vec<u32>,
    pub max_residual: f64,
}

/// Product identity
/// `G(χ) = G(χ^ℓ) / χ^ℓ(ℓ) · Π_{i=1}^{ℓ-1} G(η^i) / G(χ η^i)` for every
/// nontrivial `χ` of order dividing `N`, with `η = χ_N^{N/ℓ}` of order `ℓ`.
pub fn check_product(sys: &CharSystem, ell: u32, tol: f64) -> Result<ProductReport> {
    let n = sys.order();
    if ell < 2 || !n.is_multiple_of(ell) {
        return Err(Error::InvalidParameter(format!("ell = {ell} must be > 1 and divide N = {n}")));
    }
    let g = sys.gauss_sums();
    let step = n / ell;
    let ell_elem = sys.spec().from_int(ell as i64);
    let mut rep = ProductReport { ell, char_order: n, checked: Vec::new(), degenerate: Vec::new(), max_residual: 0.0 };
    for k in 1..n {
        let k_ell = (k as u64 * ell as u64 % n as u64) as u32;
        let mut rhs = g[k_ell as usize] / sys.mult_char(k_ell, ell_elem)?;
        let mut degenerate = k_ell == 0;
        for i in 1..ell {
            let twisted = (k + i * step) % n;
            degenerate |= twisted == 0;
            rhs *= g[(i * step) as usize] / g[twisted as usize];
        }
        let res = (g[k as usize] - rhs).norm();
        rep.checked.push(k);
        if degenerate {
            rep.degenerate.push(k);
        }
        rep.max_residual = rep.max_residual.max(res);
        if res > tol {
            return Err(exceeded("product formula", format!("k = {k}, ell = {ell}"), res, tol));
        }
    }
    Ok(rep)
}

/// Gauss sums of `F_{q^f}` and the root of unity `ε = χ'(γ^{-b})` relating
/// `G_{q^f}(χ_N)` to `q^{f/2-1} G_q(χ'_{2^u}) G_q(η')`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GaussReport {
    pub q: u64,
    pub u: u32,
    pub t: u32,
    pub n: u32,
    pub f: u32,
    /// `G_{q^f}(χ_N^k)` keyed by `k`.
    pub gauss_values: BTreeMap<u32, Complex64>,
    /// `G_q(χ'_{2^u})`.
    pub base_gauss_chi: Complex64,
    /// `G_q(η')`.
    pub base_gauss_eta: Complex64,
    pub epsilon: Complex64,
    /// `ε = ζ_{2^u}^{epsilon_index}`.
    pub epsilon_index: u32,
    pub b: u32,
    /// Distance from the computed ratio to the nearest `2^u`-th root of unity.
    pub residual: f64,
    /// `|ε - χ'(γ^{-b})|`, evaluated through the base field's character.
    pub b_residual: f64,
}

pub fn epsilon_b(params: &CycParams, tol: f64) -> Result<GaussReport> {
    let m = 1u32 << params.u();
    let ext_sys = CharSystem::new(params.ext().clone(), params.n())?;
    let base_sys = CharSystem::new(params.base().clone(), m)?;
    let gauss = ext_sys.gauss_sums();
    let g_chi = base_sys.gauss_sum(1)?;
    let g_eta = base_sys.gauss_sum(m / 2)?;
    let scale = (params.q() as f64).powi(params.f() as i32 / 2 - 1);
    let ratio = gauss[1] / (g_chi * g_eta * scale);
    let steps = ratio.arg() / TAU * m as f64;
    let epsilon_index = (steps.round() as i64).rem_euclid(m as i64) as u32;
    let snapped = root_of_unity(m as u64, epsilon_index as i64);
    let residual = (ratio - snapped).norm();
    if !(residual < tol) {
        return Err(Error::EpsilonNotRootOfUnity { order: m as u64, residual });
    }
    let b = (m - epsilon_index) % m;
    let gamma = params.base().primitive();
    let gamma_inv_b = params.base().pow(gamma, -(b as i64))?;
    let b_residual = (ratio - base_sys.mult_char(1, gamma_inv_b)?).norm();
    if !(b_residual < tol) {
        return Err(exceeded("ε = χ'(γ^-b)", format!("b = {b}"), b_residual, tol));
    }
    Ok(GaussReport {
        q: params.q(),
        u: params.u(),
        t: params.t(),
        n: params.n(),
        f: params.f(),
        gauss_values: gauss.into_iter().enumerate().map(|(k, g)| (k as u32, g)).collect(),
        base_gauss_chi: g_chi,
        base_gauss_eta: g_eta,
        epsilon: ratio,
        epsilon_index,
        b,
        residual,
        b_residual,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CharValueReport {
    pub pairs: usize,
    /// Worst residual of the expression of `ψ(ω^a D_h)` through `ψ(γ^{b+j} B_0)`.
    pub max_value_residual: f64,
    /// Worst residual of the matching identity for `|ψ(ω^a D_h)|^2`.
    pub max_norm_residual: f64,
}

/// For every `(a, h)` in `[0, N)^2`, compares `ψ(ω^a D_h)` summed directly
/// over `F_{q^f}` with
/// `(-1 + c G_q(η'))/2 + c G_q(η') ψ_q(γ^{b + j_{a,h}} B_0)`, `c = q^{f/2-1}`,
/// and `|ψ(ω^a D_h)|^2` with
/// `(1 - q^{f-1})/4 + q^{f-1} |ψ_q(γ^{b + j_{a,h}} B_0)|^2`.
pub fn check_char_value_d(params: &CycParams, report: &GaussReport, tol: f64) -> Result<CharValueReport> {
    let n = params.n();
    let q = params.q() as f64;
    let f = params.f() as i32;
    let ext_sys = CharSystem::new(params.ext().clone(), n)?;
    let base_sys = CharSystem::new(params.base().clone(), 1 << params.u())?;
    let c_eta = q.powi(f / 2 - 1) * report.base_gauss_eta;
    let b0 = params.block_b(0)?;
    let d_blocks = (0..n).map(|h| params.block_d(h)).collect::<Result<Vec<_>>>()?;
    let mut rep = CharValueReport { pairs: 0, max_value_residual: 0.0, max_norm_residual: 0.0 };
    for a in 0..n {
        for (h, d) in d_blocks.iter().enumerate() {
            let lhs = ext_sys.block_char(d, a as i64)?;
            let j = params.j_index(a, h as u32)?;
            let base_val = base_sys.block_char(&b0, report.b as i64 + j as i64)?;
            let rhs = (c_eta - 1.0) / 2.0 + c_eta * base_val;
            let res = (lhs - rhs).norm();
            rep.max_value_residual = rep.max_value_residual.max(res);
            if res > tol {
                return Err(exceeded("character value of D_h", format!("a = {a}, h = {h}"), res, tol));
            }
            let qf1 = q.powi(f - 1);
            let norm_rhs = (1.0 - qf1) / 4.0 + qf1 * base_val.norm_sqr();
            let res = (lhs.norm_sqr() - norm_rhs).abs();
            rep.max_norm_residual = rep.max_norm_residual.max(res);
            if res > tol {
                return Err(exceeded("modulus of D_h character value", format!("a = {a}, h = {h}"), res, tol));
            }
            rep.pairs += 1;
        }
    }
    Ok(rep)
}
