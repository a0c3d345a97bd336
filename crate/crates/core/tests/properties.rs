use std::sync::{Arc, OnceLock};

use proptest::prelude::*;
use skewhad::charsum::CharSystem;
use skewhad::cyclotomy::{block_b, cyclotomic_class, j_index, Block, CycParams};
use skewhad::design::{construct_sdf, verify_df, Family};
use skewhad::gf::{build_field, subfield_generator, Elem, FieldSpec};
use skewhad::hadamard::{type1, type2, GroupOrdering};

const FIELDS: &[(u64, u32)] = &[(2, 1), (2, 4), (2, 6), (3, 3), (3, 4), (5, 2), (5, 3), (7, 2), (13, 2), (31, 1)];

fn fields() -> &'static Vec<Arc<FieldSpec>> {
    static CELL: OnceLock<Vec<Arc<FieldSpec>>> = OnceLock::new();
    CELL.get_or_init(|| FIELDS.iter().map(|&(p, r)| Arc::new(build_field(p, r).unwrap())).collect())
}

fn field_and_elems(count: usize) -> impl Strategy<Value = (Arc<FieldSpec>, Vec<u32>)> {
    (0..FIELDS.len()).prop_flat_map(move |i| {
        let f = fields()[i].clone();
        let q = f.order();
        (Just(f), proptest::collection::vec(0..q, count))
    })
}

fn nonzero(f: &FieldSpec, i: u32) -> Elem {
    f.from_index(1 + i % (f.order() - 1)).unwrap()
}

// (q, u) with q = 2^u + 1 mod 2^(u+1)
const ADMISSIBLE: &[(u64, u32)] = &[(5, 2), (13, 2), (29, 2), (37, 2), (53, 2), (9, 3), (25, 3), (41, 3), (17, 4)];

fn admissible_field(q: u64) -> Arc<FieldSpec> {
    let (p, r) = skewhad::numtheory::prime_power(q).unwrap();
    Arc::new(build_field(p, r).unwrap())
}

fn cyc_params() -> &'static Vec<CycParams> {
    static CELL: OnceLock<Vec<CycParams>> = OnceLock::new();
    CELL.get_or_init(|| {
        [(5, 2, 3), (5, 2, 4), (13, 2, 3), (9, 3, 4), (17, 4, 5), (29, 2, 3)]
            .iter()
            .map(|&(q, u, t)| CycParams::new(q, u, t).unwrap())
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn log_is_a_homomorphism((f, xs) in field_and_elems(2)) {
        let (x, y) = (nonzero(&f, xs[0]), nonzero(&f, xs[1]));
        let m = f.order() - 1;
        let lhs = f.log(f.mul(x, y)).unwrap();
        prop_assert_eq!(lhs, (f.log(x).unwrap() + f.log(y).unwrap()) % m);
    }

    #[test]
    fn frobenius_fixes_the_trace((f, xs) in field_and_elems(1)) {
        let x = f.from_index(xs[0]).unwrap();
        let xp = f.pow(x, f.p() as i64).unwrap();
        prop_assert_eq!(f.trace_to_prime(x).unwrap(), f.trace_to_prime(xp).unwrap());
    }

    #[test]
    fn additive_exponent_is_p((f, xs) in field_and_elems(1)) {
        let x = f.from_index(xs[0]).unwrap();
        let mut acc = Elem::ZERO;
        for _ in 0..f.p() {
            acc = f.add(acc, x);
        }
        prop_assert!(acc.is_zero());
    }

    #[test]
    fn classes_partition_and_shift(i in 0..FIELDS.len(), pick in any::<prop::sample::Index>(), c in 0u32..64) {
        let f = &fields()[i];
        let m = f.order() - 1;
        let divisors: Vec<u32> = (1..=m).filter(|d| m.is_multiple_of(*d)).collect();
        let n = divisors[pick.index(divisors.len())];
        let classes: Vec<Block> = (0..n).map(|i| cyclotomic_class(f, n, i).unwrap()).collect();
        let mut seen = vec![false; f.order() as usize];
        for class in &classes {
            prop_assert_eq!(class.size() as u32, m / n);
            for x in class.elements() {
                prop_assert!(!seen[x.index() as usize]);
                seen[x.index() as usize] = true;
            }
        }
        prop_assert!(!seen[0] && seen[1..].iter().all(|&s| s));
        let i = c % n;
        let shifted: Vec<Elem> = classes[i as usize].elements().map(|x| f.mul(f.primitive(), x)).collect();
        let shifted = Block::from_elements(f.clone(), shifted).unwrap();
        prop_assert_eq!(&shifted, &classes[((i + 1) % n) as usize]);
    }

    #[test]
    fn b_blocks_are_skew_halves(pick in 0..ADMISSIBLE.len(), h in 0u32..64) {
        let (q, u) = ADMISSIBLE[pick];
        let f = admissible_field(q);
        let m = 1u32 << u;
        let h = h % m;
        let b = block_b(&f, u, h).unwrap();
        let opposite = block_b(&f, u, (h + m / 2) % m).unwrap();
        prop_assert_eq!(&b.negated(), &opposite);
        prop_assert_eq!(b.size() as u64, (q - 1) / 2);
        let both: std::collections::BTreeSet<u32> =
            b.exponents().iter().chain(opposite.exponents()).copied().collect();
        prop_assert_eq!(both.len() as u64, q - 1);
    }

    #[test]
    fn d_blocks_are_skew_halves(pick in 0..6usize, h in 0u32..1024) {
        let params = &cyc_params()[pick];
        let n = params.n();
        let h = h % n;
        let d = params.block_d(h).unwrap();
        let opposite = params.block_d((h + n / 2) % n).unwrap();
        prop_assert_eq!(&d.negated(), &opposite);
        let v = params.ext().order() as usize;
        prop_assert_eq!(d.size(), (v - 1) / 2);
        let both: std::collections::BTreeSet<u32> =
            d.exponents().iter().chain(opposite.exponents()).copied().collect();
        prop_assert_eq!(both.len(), v - 1);
    }

    #[test]
    fn j_index_steps_by_one(u in 2u32..4, extra in 1u32..5, a in 0u32..512, h in 0u32..512, ell in 0u32..64) {
        let t = u + extra;
        let n = 1u32 << t;
        let step = 1u32 << (t - u);
        let (a, h) = (a % n, h % n);
        let ell = ell % ((n - 1 - h) / step + 1);
        prop_assert_eq!(j_index(t, u, a, h + step * ell).unwrap(), j_index(t, u, a, h).unwrap() + ell);
    }

    #[test]
    fn skew_block_characters_sum_to_minus_one(i in 0..FIELDS.len(), bits in proptest::collection::vec(any::<bool>(), 1024)) {
        let f = &fields()[i];
        prop_assume!(f.p() != 2);
        let half = (f.order() - 1) / 2;
        // pick x or -x for each exponent pair {i, i + half}
        let exps = (0..half).map(|i| if bits[i as usize % bits.len()] { i } else { i + half });
        let b = Block::from_exponents(f.clone(), exps).unwrap();
        let sys = CharSystem::new(f.clone(), 1).unwrap();
        let total = sys.block_char(&b, 0).unwrap() + sys.block_char(&b.negated(), 0).unwrap();
        prop_assert!((total + 1.0).norm() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn type_matrices_commute(q_pick in 0..4usize, xs in proptest::collection::vec(any::<bool>(), 32), ys in proptest::collection::vec(any::<bool>(), 32)) {
        let f = &fields()[[1, 4, 5, 7][q_pick]];
        let ord = GroupOrdering::new(f.clone());
        let q = f.order() as usize;
        let pick = |bits: &[bool]| {
            Block::from_elements(f.clone(), (1..q).filter(|&i| bits[i % 32]).map(|i| f.from_index(i as u32).unwrap())).unwrap()
        };
        let (x, y) = (pick(&xs), pick(&ys));
        let m1 = type1(&ord, &x).unwrap();
        let n2 = type2(&ord, &y).unwrap();
        prop_assert_eq!(m1.mul_transpose(&n2), n2.mul_transpose(&m1));
        // type1 · type1^T depends only on g_i - g_j
        let prod = m1.mul_transpose(&type1(&ord, &y).unwrap());
        let g = ord.elements();
        let mut by_diff = std::collections::HashMap::new();
        for i in 0..q {
            for j in 0..q {
                let d = f.sub(g[i], g[j]);
                let v = prod[i * q + j];
                prop_assert_eq!(*by_diff.entry(d).or_insert(v), v);
            }
        }
    }
}

#[test]
fn subfield_generators_have_exact_order() {
    for &(p, r, sub) in &[(2u64, 6u32, 4u64), (2, 6, 8), (3, 4, 9), (5, 2, 5), (5, 4, 25), (2, 4, 2)] {
        let ext = build_field(p, r).unwrap();
        let g = subfield_generator(&ext, sub).unwrap();
        let m = sub - 1;
        assert_eq!(ext.pow(g, m as i64).unwrap(), ext.one());
        for k in 1..m {
            assert_ne!(ext.pow(g, k as i64).unwrap(), ext.one(), "order divides {k}");
        }
    }
}

#[test]
fn class_sums_match_gauss_expansion() {
    for &(p, r, n) in &[(5u64, 2u32, 8u32), (13, 2, 8), (3, 4, 16), (41, 1, 8), (31, 1, 6)] {
        let f = Arc::new(build_field(p, r).unwrap());
        let sys = CharSystem::new(f.clone(), n).unwrap();
        let gauss = sys.gauss_sums();
        for i in 0..n {
            let direct = sys.block_char(&cyclotomic_class(&f, n, i).unwrap(), 0).unwrap();
            let via = sys.class_char_via_gauss(&gauss, i);
            assert!((direct - via).norm() < 1e-9, "({p},{r}) N={n} i={i}");
        }
        let all = Block::from_exponents(f.clone(), 0..f.order() - 1).unwrap();
        assert!((sys.block_char(&all, 0).unwrap() + 1.0).norm() < 1e-9);
    }
}

#[test]
fn quadratic_gauss_sum_squares_to_q() {
    for &(p, r) in &[(5u64, 1u32), (13, 1), (29, 1), (5, 2), (3, 2), (41, 1)] {
        let f = Arc::new(build_field(p, r).unwrap());
        let sys = CharSystem::new(f.clone(), 2).unwrap();
        let g = sys.gauss_sum(1).unwrap();
        assert!((g * g - f.order() as f64).norm() < 1e-9, "q = {}", f.order());
    }
}

#[test]
fn b_and_d_families_certify_with_exact_parameter_law() {
    for &(q, u) in ADMISSIBLE {
        let f = admissible_field(q);
        let fam = Family::new(skewhad::cyclotomy::family_b(&f, u).unwrap(), None).unwrap();
        let d = verify_df(&fam).unwrap();
        assert_eq!(d.ell as u64 * d.k * (d.k - 1), d.lambda * (d.v - 1), "q = {q}, u = {u}");
    }
    for params in cyc_params() {
        let fam = Family::new(params.family_d().unwrap(), None).unwrap();
        let d = verify_df(&fam).unwrap();
        assert_eq!(d.ell * d.k * (d.k - 1), d.lambda * (d.v - 1));
        assert_eq!(d.ell, 1 << (params.u() - 1));
    }
    let fam = construct_sdf(13, 2, 2).unwrap();
    assert_eq!(fam.blocks().len(), 2);
    assert_eq!(fam.field().order(), 169);
}
