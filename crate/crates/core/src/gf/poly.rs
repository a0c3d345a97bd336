//! Dense polynomials over a prime field, coefficients low-to-high.
//!
//! Only what field construction needs: reduction modulo a monic polynomial,
//! modular powers, gcd, and Rabin's irreducibility test.

use crate::numtheory::{pow_mod, prime_divisors};

fn trim(mut v: Vec<u32>) -> Vec<u32> {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

fn inv_mod(a: u32, p: u32) -> u32 {
    pow_mod(a as u64, p as u64 - 2, p as u64) as u32
}

/// Product of `a` and `b` reduced modulo the monic `modulus`; output has
/// exactly `deg(modulus)` coefficients.
pub(crate) fn mul_mod(a: &[u32], b: &[u32], modulus: &[u32], p: u32) -> Vec<u32> {
    let r = modulus.len() - 1;
    let p64 = p as u64;
    let mut prod = vec![0u64; a.len() + b.len()];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p64;
        }
    }
    reduce(prod, modulus, p, r)
}

fn reduce(mut prod: Vec<u64>, modulus: &[u32], p: u32, r: usize) -> Vec<u32> {
    let p64 = p as u64;
    for top in (r..prod.len()).rev() {
        let c = prod[top] % p64;
        if c == 0 {
            continue;
        }
        prod[top] = 0;
        // x^top = x^(top-r) * x^r and x^r = -(m_0 + ... + m_{r-1} x^{r-1})
        for (i, &m) in modulus[..r].iter().enumerate() {
            let k = top - r + i;
            prod[k] = (prod[k] + c * (p64 - m as u64 % p64)) % p64;
        }
    }
    let mut out: Vec<u32> = prod.iter().take(r).map(|&c| (c % p64) as u32).collect();
    out.resize(r, 0);
    out
}

/// `base^exp mod modulus`.
pub(crate) fn pow_mod_poly(base: &[u32], mut exp: u128, modulus: &[u32], p: u32) -> Vec<u32> {
    let r = modulus.len() - 1;
    let mut acc = vec![0u32; r];
    acc[0] = 1 % p;
    if r == 0 {
        return acc;
    }
    let mut b = reduce(base.iter().map(|&c| c as u64).collect(), modulus, p, r);
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(&acc, &b, modulus, p);
        }
        b = mul_mod(&b, &b, modulus, p);
        exp >>= 1;
    }
    acc
}

fn rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut a = trim(a.to_vec());
    let b = trim(b.to_vec());
    let db = b.len() - 1;
    let lead_inv = inv_mod(b[db], p) as u64;
    let p64 = p as u64;
    while a.len() > db {
        let da = a.len() - 1;
        let c = a[da] as u64 * lead_inv % p64;
        for (i, &bc) in b.iter().enumerate() {
            let k = da - db + i;
            a[k] = ((a[k] as u64 + p64 - c * bc as u64 % p64) % p64) as u32;
        }
        a = trim(a);
    }
    a
}

/// Greatest common divisor, not normalized.
pub(crate) fn gcd(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut x = trim(a.to_vec());
    let mut y = trim(b.to_vec());
    while !y.is_empty() {
        let r = rem(&x, &y, p);
        x = y;
        y = r;
    }
    x
}

/// Rabin's test for a monic polynomial of degree `r >= 1`.
pub(crate) fn is_irreducible(modulus: &[u32], p: u32) -> bool {
    let r = modulus.len() - 1;
    if r == 1 {
        return true;
    }
    let mut x = vec![0u32; r];
    x[1] = 1;
    // frob[k] = x^(p^k) mod m
    let mut frob = Vec::with_capacity(r + 1);
    let mut cur = x.clone();
    frob.push(cur.clone());
    for _ in 0..r {
        cur = pow_mod_poly(&cur, p as u128, modulus, p);
        frob.push(cur.clone());
    }
    if frob[r] != x {
        return false;
    }
    for d in prime_divisors(r as u64) {
        let k = r / d as usize;
        let mut diff = frob[k].clone();
        diff[1] = (diff[1] + p - 1) % p;
        let g = gcd(modulus, &diff, p);
        if g.len() != 1 {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Root-existence oracle, valid for degree 2 and 3.
    fn has_root(m: &[u32], p: u32) -> bool {
        (0..p).any(|x| {
            let mut acc = 0u64;
            for &c in m.iter().rev() {
                acc = (acc * x as u64 + c as u64) % p as u64;
            }
            acc == 0
        })
    }

    #[test]
    fn rabin_matches_root_test_for_small_degrees() {
        for p in [2u32, 3, 5, 7] {
            for r in 2..=3usize {
                let count = (p as usize).pow(r as u32);
                for idx in 0..count {
                    let mut m: Vec<u32> = (0..r)
                        .map(|i| (idx / (p as usize).pow(i as u32) % p as usize) as u32)
                        .collect();
                    m.push(1);
                    assert_eq!(is_irreducible(&m, p), !has_root(&m, p), "p={p} m={m:?}");
                }
            }
        }
    }

    #[test]
    fn counts_irreducible_quartics_over_f2() {
        // There are (2^4 - 2^2) / 4 = 3 monic irreducible quartics over F_2.
        let n = (0..16u32)
            .filter(|idx| {
                let mut m: Vec<u32> = (0..4).map(|i| (idx >> i) & 1).collect();
                m.push(1);
                is_irreducible(&m, 2)
            })
            .count();
        assert_eq!(n, 3);
    }

    #[test]
    fn reduction_in_f25() {
        // x * x mod (x^2 + 2) = -2 = 3
        assert_eq!(mul_mod(&[0, 1], &[0, 1], &[2, 0, 1], 5), vec![3, 0]);
    }
}
