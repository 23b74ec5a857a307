//! Exact bias computation and the inequality checks around it.
//!
//! The bias of `φ : A_1 × … × A_k → T` is the average of `e(φ(x))` over
//! the whole domain. Two independent exact algorithms are provided:
//!
//! * the *kernel method* ([`bias`]): for multilinear φ, marginalizing the
//!   axis `i` with the largest domain turns the average into the
//!   probability that the restriction `φ_{x_I}` (a linear map on `A_i`)
//!   vanishes identically, so the bias is a fraction with denominator
//!   dividing `|A_I|`;
//! * the *oracle* ([`bias_oracle`], [`bias_oracle_affine`]): the literal
//!   average of `e(φ(x))` as an exact cyclotomic value, which also covers
//!   multiaffine maps, where the bias is genuinely complex.
//!
//! Everything downstream (bounds, subadditivity, the main-term
//! inequality) compares exact rationals, or cyclotomic values through
//! exact-equality-then-certified-interval comparison.

use crate::cyclo::CycloValue;
use crate::enclose::{compare_real, PREC_CAP};
use crate::group::{FinAbGroup, GroupElement};
use crate::map::{domain_tuples, total_points, MultiAffine, MultiMapT};
use crate::torus::TorusValue;
use crate::{Budget, Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::cmp::Ordering;
use std::collections::BTreeMap;

/// An exact bias: rational for maps linear in some argument, cyclotomic
/// in general.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BiasValue {
    Rational(BigRational),
    Cyclo(CycloValue),
}

impl BiasValue {
    pub fn as_cyclo(&self) -> CycloValue {
        match self {
            BiasValue::Rational(r) => CycloValue::from_rational(r),
            BiasValue::Cyclo(c) => c.clone(),
        }
    }
}

impl std::fmt::Display for BiasValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BiasValue::Rational(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            BiasValue::Cyclo(c) => write!(f, "{c}"),
        }
    }
}

/// Exact bias of a multilinear map by the kernel method: with `I` the
/// complement of the largest axis, `bias(φ) = P_{x_I}(φ_{x_I} ≡ 0)`.
/// Vanishing of the linear restriction is tested on generators.
pub fn bias(phi: &MultiMapT) -> BigRational {
    let k = phi.arity();
    // drop the axis with the largest order (first among ties)
    let axis = (0..k)
        .max_by(|&a, &b| {
            phi.domains()[a].order().cmp(&phi.domains()[b].order()).then(b.cmp(&a))
        })
        .expect("arity >= 1");
    let rest: Vec<usize> = (0..k).filter(|&i| i != axis).collect();
    let rest_domains: Vec<FinAbGroup> = rest.iter().map(|&i| phi.domains()[i].clone()).collect();
    let fe = phi.fast_eval();
    let gens: Vec<GroupElement> =
        (0..phi.domains()[axis].rank()).map(|j| phi.domains()[axis].generator(j)).collect();
    let mut count: u128 = 0;
    let mut total: u128 = 0;
    for x_rest in domain_tuples(&rest_domains) {
        total += 1;
        let vanishes = gens.iter().all(|g| {
            let mut x: Vec<GroupElement> = Vec::with_capacity(k);
            let mut it = x_rest.iter();
            for i in 0..k {
                if i == axis {
                    x.push(g.clone());
                } else {
                    x.push(it.next().unwrap().clone());
                }
            }
            fe.value_num(&x) == 0
        });
        if vanishes {
            count += 1;
        }
    }
    BigRational::new(BigInt::from(count), BigInt::from(total))
}

/// Histogram of φ(x) over the whole domain, keyed by the numerator over
/// the common torsion modulus.
fn value_histogram(
    values: impl Iterator<Item = u64>,
) -> BTreeMap<u64, u128> {
    let mut hist: BTreeMap<u64, u128> = BTreeMap::new();
    for v in values {
        *hist.entry(v).or_insert(0) += 1;
    }
    hist
}

fn histogram_average(hist: &BTreeMap<u64, u128>, modulus: u64, total: u128) -> CycloValue {
    let mut acc = CycloValue::zero();
    for (&num, &count) in hist {
        let t = TorusValue::new(num as i128, modulus as i128).expect("modulus positive");
        let root = CycloValue::root_of_unity(&t);
        acc = acc.add(&root.scale_int(&BigInt::from(count)));
    }
    acc.scale_rational(&BigRational::new(BigInt::one(), BigInt::from(total)))
}

/// The literal averaging oracle `E_x e(φ(x))` for a multilinear map,
/// as an exact cyclotomic value.
pub fn bias_oracle(phi: &MultiMapT, budget: &Budget) -> Result<CycloValue> {
    let total = total_points(phi.domains());
    if total > budget.max_points {
        return Err(Error::budget(format!(
            "oracle domain has {total} points, budget {}",
            budget.max_points
        )));
    }
    let fe = phi.fast_eval();
    let hist = value_histogram(domain_tuples(phi.domains()).map(|x| fe.value_num(&x)));
    Ok(histogram_average(&hist, fe.modulus(), total))
}

/// The averaging oracle for a multiaffine map.
pub fn bias_oracle_affine(phi: &MultiAffine, budget: &Budget) -> Result<CycloValue> {
    let total = total_points(phi.domains());
    if total > budget.max_points {
        return Err(Error::budget(format!(
            "oracle domain has {total} points, budget {}",
            budget.max_points
        )));
    }
    // one fast evaluator per term, values folded over the lcm modulus
    let parts: Vec<(Vec<usize>, crate::map::FastEvalT)> = phi
        .terms()
        .iter()
        .map(|(&mask, term)| (crate::map::mask_axes(mask), term.fast_eval()))
        .collect();
    let modulus = parts.iter().fold(1u64, |acc, (_, fe)| acc.lcm(&fe.modulus()));
    let hist = value_histogram(domain_tuples(phi.domains()).map(|x| {
        let mut acc: u128 = 0;
        for (axes, fe) in &parts {
            let sub: Vec<GroupElement> = axes.iter().map(|&i| x[i].clone()).collect();
            let v = fe.value_num(&sub) as u128 * (modulus / fe.modulus()) as u128;
            acc = (acc + v) % modulus as u128;
        }
        acc as u64
    }));
    Ok(histogram_average(&hist, modulus, total))
}

/// Checks the recursion `bias(φ) = E_{x_I} bias(φ_{x_I})` by exact
/// averaging of restricted biases over `A_I`.
pub fn bias_recursion_check(phi: &MultiMapT, axes: &[usize], budget: &Budget) -> Result<bool> {
    if axes.is_empty() {
        return Ok(true);
    }
    if axes.len() >= phi.arity() {
        return Err(Error::invalid("recursion check needs a proper subset of axes"));
    }
    let sub_domains: Vec<FinAbGroup> =
        axes.iter().map(|&i| phi.domains()[i].clone()).collect();
    let points = total_points(&sub_domains);
    if points > budget.max_points {
        return Err(Error::budget(format!("recursion check over {points} points exceeds budget")));
    }
    let mut acc = BigRational::zero();
    for fixed in domain_tuples(&sub_domains) {
        let restricted = phi.restrict_fix(axes, &fixed)?;
        acc += bias(&restricted);
    }
    let average = acc / BigRational::from_integer(BigInt::from(points));
    Ok(average == bias(phi))
}

/// The two elementary bounds `1 − Π_{j≠i}(1 − 1/|A_j|) ≤ bias(φ)` and,
/// for nontrivial φ, `bias(φ) ≤ 1 − Π_{j≠i}(1 − 1/p_j)` with `p_j` the
/// smallest prime divisor of `|A_j|`.
#[derive(Debug, Clone)]
pub struct TrivialBounds {
    pub lower: BigRational,
    pub upper: BigRational,
    /// Set when φ is the zero map; the upper bound is then reported as 1
    /// and carries no content.
    pub zero_map: bool,
}

pub fn trivial_bounds(phi: &MultiMapT, axis: usize) -> TrivialBounds {
    let one = BigRational::one();
    let mut lower_prod = BigRational::one();
    for (j, g) in phi.domains().iter().enumerate() {
        if j == axis {
            continue;
        }
        lower_prod *= &one - BigRational::new(BigInt::one(), BigInt::from(g.order()));
    }
    let lower = &one - &lower_prod;
    if phi.is_zero() {
        return TrivialBounds { lower, upper: one, zero_map: true };
    }
    let mut upper_prod = BigRational::one();
    for (j, g) in phi.domains().iter().enumerate() {
        if j == axis {
            continue;
        }
        // nontrivial φ forces every other axis nontrivial; the factor
        // list is sorted by prime, so the first factor names p_j
        let (p, _) = crate::group::prime_power_base(g.factors()[0]).expect("canonical factor");
        upper_prod *= &one - BigRational::new(BigInt::one(), BigInt::from(p));
    }
    TrivialBounds { lower, upper: &one - &upper_prod, zero_map: false }
}

///`bias(φ) ≤ (n+1)^{k−2}/q` where `q = p^n` is the largest entry order.
/// The entry realizing `q` is itself a value of φ, so the image contains
/// an element of order exactly `q`.
pub fn exponent_bound(phi: &MultiMapT) -> Result<(u64, BigRational)> {
    if phi.is_zero() {
        return Err(Error::invalid("exponent bound needs a nonzero map"));
    }
    if phi.arity() < 2 {
        return Err(Error::invalid("exponent bound needs arity >= 2"));
    }
    let q = phi.max_entry_order();
    let (_, n) = crate::group::prime_power_base(q).expect("entry orders are prime powers");
    let k = phi.arity() as u32;
    let bound = BigRational::new(BigInt::from(n as u64 + 1).pow(k - 2), BigInt::from(q));
    Ok((q, bound))
}

/// `bias(φ + ψ) ≥ bias(φ)·bias(ψ)`, decided exactly.
pub fn subadditivity_check(phi: &MultiMapT, psi: &MultiMapT) -> Result<bool> {
    let sum = phi.add(psi)?;
    Ok(bias(&sum) >= bias(phi) * bias(psi))
}

/// Witness data for a failed inequality check: both exact values printed.
#[derive(Debug, Clone)]
pub struct InequalityWitness {
    pub lhs: String,
    pub rhs: String,
}

/// The main-term inequality `|bias(φ)| ≤ bias(φ_J)` for a multiaffine φ
/// whose terms all live on subsets of `J` or incomparable subsets
/// (hypothesis: `φ_I = 0` for every `I ⊋ J`). Decided through the
/// squares: exact equality first, certified intervals otherwise.
pub fn main_term_check(phi: &MultiAffine, j_mask: u32, budget: &Budget) -> Result<bool> {
    let k = phi.arity() as u32;
    if j_mask >= 1u32 << k {
        return Err(Error::invalid("main term subset out of range"));
    }
    for (&mask, term) in phi.terms() {
        if term.is_zero() {
            continue;
        }
        if mask & j_mask == j_mask && mask != j_mask {
            return Err(Error::precondition(format!(
                "term on axes {:?} strictly contains J",
                crate::map::mask_axes(mask)
            )));
        }
    }
    let lhs_sq = bias_oracle_affine(phi, budget)?.abs_sq();
    let rhs = match phi.term(j_mask) {
        Some(term) => bias(term),
        None => BigRational::one(), // the zero map has bias 1
    };
    let rhs_sq = CycloValue::from_rational(&(&rhs * &rhs));
    match compare_real(&lhs_sq, &rhs_sq)? {
        Ordering::Greater => Ok(false),
        _ => Ok(true),
    }
}

/// Compares `|bias value|` against a nonnegative rational, exact-first.
pub fn certified_modulus_le(value: &CycloValue, bound: &BigRational) -> Result<bool> {
    let lhs = value.abs_sq();
    let rhs = CycloValue::from_rational(&(bound * bound));
    match compare_real(&lhs, &rhs)? {
        Ordering::Greater => Ok(false),
        _ => Ok(true),
    }
}

/// True when the certified modulus of `value` is within `tol` of `target`
/// (used for golden-value checks on complex biases).
pub fn modulus_within(value: &CycloValue, target_sq: &BigRational, tol: &BigRational) -> bool {
    // |v| and √target_sq both enclosed, then interval distance ≤ tol
    let mut prec = 128u32;
    while prec <= PREC_CAP {
        let enc = crate::enclose::enclose(value, prec);
        let modulus = enc.modulus();
        let target = crate::enclose::RealEnc::from_rational(target_sq, prec).sqrt();
        let dist_hi = {
            let d1 = &modulus.hi - &target.lo;
            let d2 = &target.hi - &modulus.lo;
            d1.max(d2)
        };
        let tol_scaled = crate::enclose::RealEnc::from_rational(tol, prec);
        if dist_hi <= tol_scaled.lo {
            return true;
        }
        // distance certainly exceeds tol only when even the optimistic
        // reading is too large
        let dist_lo = {
            let d1 = &modulus.lo - &target.hi;
            let d2 = &target.lo - &modulus.hi;
            d1.max(d2)
        };
        if dist_lo > tol_scaled.hi {
            return false;
        }
        prec *= 2;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map::{m_q, random_map_t, MultiMapG};
    use crate::torus::TorusValue;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeMap;

    fn tv(n: i128, d: i128) -> TorusValue {
        TorusValue::new(n, d).unwrap()
    }

    fn z(n: u64) -> FinAbGroup {
        FinAbGroup::cyclic(n).unwrap()
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    /// Independent oracle: count pairs of (Z/q)² with xy ≡ 0 mod q.
    fn mq_bias_by_counting(q: u64) -> BigRational {
        let mut count = 0u64;
        for x in 0..q {
            for y in 0..q {
                if x * y % q == 0 {
                    count += 1;
                }
            }
        }
        // for the bilinear pairing, bias = P(x·y/q generates 0 for all y)
        // = P(x = 0) = q/q²; the counting above is the recursion route:
        // E_x P_y(xy ≡ 0) which must agree with 1/q only after dividing
        // by q²... both routes are kept for cross-checking
        BigRational::new(count.into(), (q * q).into())
    }

    #[test]
    fn bias_of_multiplication_maps() {
        for q in [2u64, 3, 4, 5, 7, 8, 9, 16] {
            let m = m_q(q).unwrap();
            assert_eq!(bias(&m), rat(1, q as i64), "bias(m_{q})");
            // literal complex average agrees
            let oracle = bias_oracle(&m, &Budget::default()).unwrap();
            assert_eq!(oracle.as_rational(), Some(rat(1, q as i64)));
        }
    }

    #[test]
    fn counting_oracle_cross_check() {
        // Σ_x P_y(xy ≡ 0 mod q) / q = bias by the recursion at I = {1};
        // the full pair count over q² is E_x E_y [xy ≡ 0] ≥ 1/q, while the
        // kernel expression at I = {1} gives exactly 1/q. For prime q the
        // two collapse: xy ≡ 0 iff x = 0 or y = 0.
        assert_eq!(mq_bias_by_counting(2), rat(3, 4));
        assert_eq!(bias(&m_q(2).unwrap()), rat(1, 2));
    }

    #[test]
    fn bias_edge_cases() {
        let zero = MultiMapT::zero(vec![z(4), z(4)]).unwrap();
        assert_eq!(bias(&zero), rat(1, 1));

        // xyz/2 on (Z/2)³: bias = P(xy ≡ 0 mod 2) = 3/4
        let t = MultiMapT::new(vec![z(2), z(2), z(2)], vec![tv(1, 2)]).unwrap();
        assert_eq!(bias(&t), rat(3, 4));

        // k = 1 linear: nontrivial has bias 0, zero has bias 1
        let lin = MultiMapT::new(vec![z(4)], vec![tv(1, 4)]).unwrap();
        assert_eq!(bias(&lin), rat(0, 1));
        let lin0 = MultiMapT::zero(vec![z(4)]).unwrap();
        assert_eq!(bias(&lin0), rat(1, 1));
    }

    #[test]
    fn oracle_matches_kernel_on_samples() {
        let shapes: Vec<Vec<FinAbGroup>> = vec![
            vec![z(4), z(4)],
            vec![z(2), z(2), z(2)],
            vec![z(6), z(6)],
            vec![FinAbGroup::new(&[2, 4]).unwrap(), z(8)],
            vec![z(3), z(9)],
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for domains in &shapes {
            for _ in 0..10 {
                let m = random_map_t(domains, &mut rng);
                let kernel = bias(&m);
                let oracle = bias_oracle(&m, &Budget::default()).unwrap();
                assert_eq!(oracle.as_rational(), Some(kernel), "oracle/kernel split on {m:?}");
            }
        }
    }

    #[test]
    fn gauss_map_bias() {
        // φ(x,y,z) = (xy+xz+yz)/3 on (Z/3)³ has bias 3^{-2}·conj(G(3))
        let g3 = z(3);
        let xy = MultiMapT::new(vec![g3.clone(), g3.clone()], vec![tv(1, 3)]).unwrap();
        let mut terms = BTreeMap::new();
        terms.insert(0b011u32, xy.clone());
        terms.insert(0b101u32, xy.clone());
        terms.insert(0b110u32, xy.clone());
        let phi = MultiAffine::new(vec![g3.clone(); 3], terms).unwrap();
        let b = bias_oracle_affine(&phi, &Budget::default()).unwrap();
        // G(3) = 1 + 2ζ_3, so conj(G(3))/9 = (1 + 2ζ_3²)/9
        let expected = CycloValue::one()
            .add(
                &CycloValue::root_of_unity(&tv(2, 3)).scale_int(&BigInt::from(2)),
            )
            .scale_rational(&rat(1, 9));
        assert_eq!(b, expected);
        // |bias|² = 3^{-3}
        assert_eq!(b.abs_sq().as_rational(), Some(rat(1, 27)));
    }

    #[test]
    fn degree_one_affine_bias_vanishes() {
        // φ(x) = x/2 on Z/2 as a degree-1 multiaffine map
        let lin = MultiMapT::new(vec![z(2)], vec![tv(1, 2)]).unwrap();
        let phi = MultiAffine::from_linear(lin);
        let b = bias_oracle_affine(&phi, &Budget::default()).unwrap();
        assert!(b.is_zero());
    }

    #[test]
    fn recursion_check_examples() {
        let m = m_q(4).unwrap();
        assert!(bias_recursion_check(&m, &[], &Budget::default()).unwrap());
        assert!(bias_recursion_check(&m, &[0], &Budget::default()).unwrap());
        assert!(bias_recursion_check(&m, &[1], &Budget::default()).unwrap());
        let zero = MultiMapT::zero(vec![z(4), z(4)]).unwrap();
        assert!(bias_recursion_check(&zero, &[0], &Budget::default()).unwrap());
        let t = MultiMapT::new(vec![z(2), z(2), z(2)], vec![tv(1, 2)]).unwrap();
        for axes in [vec![0], vec![1], vec![2], vec![0, 1], vec![0, 2], vec![1, 2]] {
            assert!(bias_recursion_check(&t, &axes, &Budget::default()).unwrap());
        }
    }

    #[test]
    fn trivial_bounds_examples() {
        let m2 = m_q(2).unwrap();
        let b = trivial_bounds(&m2, 0);
        assert_eq!(b.lower, rat(1, 2));
        assert_eq!(b.upper, rat(1, 2));
        assert!(!b.zero_map);
        assert!(b.lower <= bias(&m2) && bias(&m2) <= b.upper);

        for q in [3u64, 5, 7] {
            let m = m_q(q).unwrap();
            let b = trivial_bounds(&m, 0);
            assert_eq!(b.lower, rat(1, q as i64));
            assert_eq!(b.upper, rat(1, q as i64));
        }

        // k = 1 nontrivial: lower = upper = 0 (empty products)
        let lin = MultiMapT::new(vec![z(4)], vec![tv(1, 4)]).unwrap();
        let b = trivial_bounds(&lin, 0);
        assert_eq!(b.lower, rat(0, 1));
        assert_eq!(b.upper, rat(0, 1));
        assert_eq!(bias(&lin), rat(0, 1));

        let zero = MultiMapT::zero(vec![z(4), z(4)]).unwrap();
        let b = trivial_bounds(&zero, 0);
        assert!(b.zero_map);
        assert_eq!(b.upper, rat(1, 1));
    }

    #[test]
    fn exponent_bound_examples() {
        let m4 = m_q(4).unwrap();
        let (q, bound) = exponent_bound(&m4).unwrap();
        assert_eq!(q, 4);
        assert_eq!(bound, rat(1, 4));
        assert!(bias(&m4) <= bound);

        // ψ(x,y,z) = xyz/4 on (Z/4)³: q = 4, bound (2+1)/4 = 3/4;
        // exact bias = P(xy ≡ 0 mod 4) = 8/16 = 1/2 by direct count
        let psi = MultiMapT::new(vec![z(4); 3], vec![tv(1, 4)]).unwrap();
        let (q, bound) = exponent_bound(&psi).unwrap();
        assert_eq!(q, 4);
        assert_eq!(bound, rat(3, 4));
        let mut count = 0;
        for x in 0..4u64 {
            for y in 0..4u64 {
                if x * y % 4 == 0 {
                    count += 1;
                }
            }
        }
        assert_eq!(count, 8);
        assert_eq!(bias(&psi), rat(1, 2));
        assert!(bias(&psi) <= bound);

        // image of exponent 2 at k = 3: bound (1+1)/2 = 1
        let t = MultiMapT::new(vec![z(2); 3], vec![tv(1, 2)]).unwrap();
        let (q, bound) = exponent_bound(&t).unwrap();
        assert_eq!(q, 2);
        assert_eq!(bound, rat(1, 1));

        assert!(exponent_bound(&MultiMapT::zero(vec![z(4), z(4)]).unwrap()).is_err());
    }

    #[test]
    fn subadditivity_examples() {
        let m4 = m_q(4).unwrap();
        let zero = MultiMapT::zero(m4.domains().to_vec()).unwrap();
        assert!(subadditivity_check(&m4, &zero).unwrap());
        // bias(m_4 + m_4) = bias(xy/2 on (Z/4)²) = 1/2 ≥ 1/16
        assert!(subadditivity_check(&m4, &m4).unwrap());
        assert_eq!(bias(&m4.add(&m4).unwrap()), rat(1, 2));
        // bias(m_2 + m_2) = bias(0) = 1 ≥ 1/4
        let m2 = m_q(2).unwrap();
        assert!(subadditivity_check(&m2, &m2).unwrap());
    }

    #[test]
    fn main_term_examples() {
        // purely multilinear with J = [k]: equality
        let m2 = m_q(2).unwrap();
        let phi = MultiAffine::from_linear(m2.clone());
        assert!(main_term_check(&phi, 0b11, &Budget::default()).unwrap());

        // Gauss map, J = {0,1}: |bias| = 3^{-3/2} ≤ bias(xy/3) = 1/3
        let g3 = z(3);
        let xy = MultiMapT::new(vec![g3.clone(), g3.clone()], vec![tv(1, 3)]).unwrap();
        let mut terms = BTreeMap::new();
        terms.insert(0b011u32, xy.clone());
        terms.insert(0b101u32, xy.clone());
        terms.insert(0b110u32, xy.clone());
        let gauss = MultiAffine::new(vec![g3.clone(); 3], terms).unwrap();
        assert!(main_term_check(&gauss, 0b011, &Budget::default()).unwrap());
        // hypothesis violation: J = {0} but the degree-2 terms are nonzero
        assert!(main_term_check(&gauss, 0b001, &Budget::default()).is_err());

        // m_2 plus the linear term x/2: |bias| ≤ bias(m_2) = 1/2
        let lin = MultiMapT::new(vec![z(2)], vec![tv(1, 2)]).unwrap();
        let mut terms = BTreeMap::new();
        terms.insert(0b11u32, m2.clone());
        terms.insert(0b01u32, lin);
        let mixed = MultiAffine::new(vec![z(2), z(2)], terms).unwrap();
        assert!(main_term_check(&mixed, 0b11, &Budget::default()).unwrap());
    }

    #[test]
    fn probability_of_kernel_matches_bias() {
        // P(F = 0) = bias(from_group_map(F)) for F(x,y) = 2xy on (Z/4)²
        let g4 = z(4);
        let f =
            MultiMapG::new(vec![g4.clone(), g4.clone()], g4.clone(), vec![g4.element(&[2])])
                .unwrap();
        let phi = crate::map::from_group_map(&f).unwrap();
        let mut zeros = 0u64;
        let mut total = 0u64;
        for x in domain_tuples(f.domains()) {
            total += 1;
            if f.codomain().is_zero(&f.evaluate(&x).unwrap()) {
                zeros += 1;
            }
        }
        assert_eq!(
            BigRational::new(zeros.into(), total.into()),
            bias(&phi),
            "P(F=0) equals the bias of the dualized map"
        );
    }

    #[test]
    fn budget_is_enforced() {
        let m = m_q(16).unwrap();
        let tiny = Budget { max_points: 10, ..Budget::default() };
        assert!(matches!(bias_oracle(&m, &tiny), Err(Error::Budget(_))));
    }
}
