//! Desk-scale slices of the bias spectra B_k and B_{k,d}.
//!
//! `B_k` is the set of biases of all k-linear maps over all finite
//! abelian groups; `B_{k,d}` allows multiaffine maps of degree ≤ d with
//! zero constant term. This module enumerates every admissible map over
//! every canonical group tuple with axis orders up to a cap, collects the
//! exact bias values with one witness map per value, and reports the
//! finite slice. Nothing here claims anything about the infinite sets
//! beyond the enumerated range.
//!
//! Reports are deterministic: group tuples are enumerated in canonical
//! order, tensors in lexicographic order, and merging is ordered, so
//! the output is byte-identical across runs and thread counts.

use crate::bias::{bias, bias_oracle_affine, BiasValue};
use crate::cyclo::CycloValue;
use crate::enclose::{certified_decimal, compare_real, decimal_of_rational};
use crate::group::FinAbGroup;
use crate::map::{mask_axes, MultiAffine, MultiMapT, TensorShape};
use crate::torus::TorusValue;
use crate::{Budget, Error, Result};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::One;
use rayon::prelude::*;
use std::cmp::Ordering;
use std::collections::BTreeMap;

/// A witness map achieving a reported bias value.
#[derive(Debug, Clone)]
pub enum SpectrumWitness {
    Linear(MultiMapT),
    Affine(MultiAffine),
}

#[derive(Debug, Clone)]
pub struct SpectrumEntry {
    pub value: BiasValue,
    pub witness: SpectrumWitness,
}

/// The distinct exact bias values found in a finite enumeration, sorted
/// (rationals ascending; cyclotomic values by certified modulus, then by
/// canonical form), each with the first witness found in canonical order.
#[derive(Debug, Clone)]
pub struct SpectrumReport {
    pub k: usize,
    pub degree: Option<u32>,
    pub max_order: u64,
    pub entries: Vec<SpectrumEntry>,
}

fn partitions(n: u32) -> Vec<Vec<u32>> {
    fn rec(n: u32, max: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if n == 0 {
            out.push(prefix.clone());
            return;
        }
        for part in (1..=max.min(n)).rev() {
            prefix.push(part);
            rec(n - part, part, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    out
}

/// All canonical-form groups of order ≤ max_order, sorted by order and
/// then by factor list.
pub fn canonical_groups_up_to(max_order: u64) -> Vec<FinAbGroup> {
    let mut out = Vec::new();
    for order in 1..=max_order {
        let parts = crate::group::prime_power_parts(order);
        // per prime: the exponent partitions give the abelian groups
        let mut per_prime: Vec<Vec<Vec<u64>>> = Vec::new();
        for (p, q) in &parts {
            let e = q.ilog(*p);
            let choices: Vec<Vec<u64>> = partitions(e)
                .into_iter()
                .map(|lambda| lambda.into_iter().map(|a| p.pow(a)).collect())
                .collect();
            per_prime.push(choices);
        }
        let mut combos: Vec<Vec<u64>> = vec![Vec::new()];
        for choices in per_prime {
            let mut next = Vec::new();
            for combo in &combos {
                for choice in &choices {
                    let mut c = combo.clone();
                    c.extend_from_slice(choice);
                    next.push(c);
                }
            }
            combos = next;
        }
        let mut groups: Vec<FinAbGroup> = combos
            .into_iter()
            .map(|orders| FinAbGroup::new(&orders).expect("orders >= 1"))
            .collect();
        groups.sort();
        out.extend(groups);
    }
    out
}

fn tuples_of<T: Clone>(items: &[T], k: usize) -> Vec<Vec<T>> {
    let mut out: Vec<Vec<T>> = vec![Vec::new()];
    for _ in 0..k {
        let mut next = Vec::with_capacity(out.len() * items.len());
        for prefix in &out {
            for item in items {
                let mut t = prefix.clone();
                t.push(item.clone());
                next.push(t);
            }
        }
        out = next;
    }
    out
}

/// Numerators-over-g per tensor entry, in lexicographic order.
fn admissible_tensor_count(domains: &[FinAbGroup]) -> u128 {
    let shape = TensorShape::of(domains);
    let mut count: u128 = 1;
    for idx in shape.indices() {
        let g = idx
            .iter()
            .enumerate()
            .fold(0u64, |acc, (i, &j)| acc.gcd(&domains[i].factors()[j]));
        count = count.saturating_mul(g as u128);
    }
    count
}

/// Iterates all admissible tensors on the given domains, lexicographic
/// by entry (earlier entries most significant), calling `f` on each map.
fn for_each_tensor(domains: &[FinAbGroup], mut f: impl FnMut(&MultiMapT)) {
    let shape = TensorShape::of(domains);
    let gcds: Vec<u64> = shape
        .indices()
        .map(|idx| {
            idx.iter()
                .enumerate()
                .fold(0u64, |acc, (i, &j)| acc.gcd(&domains[i].factors()[j]))
        })
        .collect();
    let mut nums = vec![0u64; gcds.len()];
    loop {
        let tensor: Vec<TorusValue> = nums
            .iter()
            .zip(&gcds)
            .map(|(&n, &g)| TorusValue::new(n as i128, g as i128).expect("g >= 1"))
            .collect();
        let map = MultiMapT::new(domains.to_vec(), tensor).expect("admissible by construction");
        f(&map);
        let mut pos = nums.len();
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            nums[pos] += 1;
            if nums[pos] < gcds[pos] {
                break;
            }
            nums[pos] = 0;
        }
    }
}

fn run_jobs<T: Send, U: Send>(
    jobs: usize,
    items: Vec<T>,
    work: impl Fn(T) -> U + Sync + Send,
) -> Vec<U>
where
    T: Sync,
{
    if jobs <= 1 {
        items.into_iter().map(work).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .expect("thread pool");
        // ordered collect keeps the merge deterministic
        pool.install(|| items.into_par_iter().map(work).collect())
    }
}

/// Enumerates `B_k` over all group tuples with `|A_i| ≤ max_order`.
pub fn enumerate_bias_set(
    k: usize,
    max_order: u64,
    budget: &Budget,
    jobs: usize,
) -> Result<SpectrumReport> {
    if k == 0 {
        return Err(Error::invalid("spectrum needs k >= 1"));
    }
    let groups = canonical_groups_up_to(max_order);
    let tuples = tuples_of(&groups, k);
    let total: u128 = tuples.iter().map(|t| admissible_tensor_count(t)).sum();
    if total > budget.max_points {
        return Err(Error::budget(format!(
            "spectrum slice has {total} maps, budget {}",
            budget.max_points
        )));
    }
    let locals = run_jobs(jobs, tuples, |domains: Vec<FinAbGroup>| {
        let mut local: BTreeMap<BigRational, MultiMapT> = BTreeMap::new();
        for_each_tensor(&domains, |map| {
            let b = bias(map);
            local.entry(b).or_insert_with(|| map.clone());
        });
        local
    });
    let mut merged: BTreeMap<BigRational, MultiMapT> = BTreeMap::new();
    for local in locals {
        for (value, witness) in local {
            merged.entry(value).or_insert(witness);
        }
    }
    let entries = merged
        .into_iter()
        .map(|(value, witness)| SpectrumEntry {
            value: BiasValue::Rational(value),
            witness: SpectrumWitness::Linear(witness),
        })
        .collect();
    Ok(SpectrumReport { k, degree: None, max_order, entries })
}

/// Enumerates `B_{k,d}` over multiaffine maps of degree ≤ d with zero
/// constant term, over all group tuples with `|A_i| ≤ max_order`.
pub fn enumerate_bias_set_affine(
    k: usize,
    degree: u32,
    max_order: u64,
    budget: &Budget,
    jobs: usize,
) -> Result<SpectrumReport> {
    if k == 0 || degree == 0 {
        return Err(Error::invalid("affine spectrum needs k >= 1 and degree >= 1"));
    }
    let groups = canonical_groups_up_to(max_order);
    let tuples = tuples_of(&groups, k);
    // instance count: product over subsets of the per-term tensor counts
    let mut total: u128 = 0;
    for t in &tuples {
        let mut count: u128 = 1;
        for mask in 1u32..(1 << k) {
            if mask.count_ones() > degree {
                continue;
            }
            let sub: Vec<FinAbGroup> = mask_axes(mask).iter().map(|&i| t[i].clone()).collect();
            count = count.saturating_mul(admissible_tensor_count(&sub));
        }
        total = total.saturating_add(count);
    }
    if total > budget.max_points {
        return Err(Error::budget(format!(
            "affine spectrum slice has {total} maps, budget {}",
            budget.max_points
        )));
    }

    let oracle_budget = *budget;
    let locals = run_jobs(jobs, tuples, move |domains: Vec<FinAbGroup>| {
        let mut local: BTreeMap<CycloValue, MultiAffine> = BTreeMap::new();
        let masks: Vec<u32> =
            (1u32..(1 << k)).filter(|m| m.count_ones() <= degree).collect();
        // odometer over per-mask tensors, each lexicographic
        fn rec(
            domains: &[FinAbGroup],
            masks: &[u32],
            pos: usize,
            terms: &mut BTreeMap<u32, MultiMapT>,
            local: &mut BTreeMap<CycloValue, MultiAffine>,
            budget: &Budget,
        ) {
            if pos == masks.len() {
                let aff = MultiAffine::new(domains.to_vec(), terms.clone())
                    .expect("terms built on matching domains");
                let value = bias_oracle_affine(&aff, budget).expect("within budget");
                local.entry(value).or_insert(aff);
                return;
            }
            let mask = masks[pos];
            let sub: Vec<FinAbGroup> =
                mask_axes(mask).iter().map(|&i| domains[i].clone()).collect();
            for_each_tensor(&sub, |term| {
                if term.is_zero() {
                    terms.remove(&mask);
                } else {
                    terms.insert(mask, term.clone());
                }
                rec(domains, masks, pos + 1, terms, local, budget);
            });
            terms.remove(&mask);
        }
        let mut terms = BTreeMap::new();
        rec(&domains, &masks, 0, &mut terms, &mut local, &oracle_budget);
        local
    });
    let mut merged: BTreeMap<CycloValue, MultiAffine> = BTreeMap::new();
    for local in locals {
        for (value, witness) in local {
            merged.entry(value).or_insert(witness);
        }
    }
    // sort by certified modulus, ties by canonical form (the map order)
    let mut items: Vec<(CycloValue, MultiAffine)> = merged.into_iter().collect();
    let mut sorted: Vec<(CycloValue, MultiAffine)> = Vec::with_capacity(items.len());
    'outer: for item in items.drain(..) {
        for (pos, existing) in sorted.iter().enumerate() {
            match compare_real(&item.0.abs_sq(), &existing.0.abs_sq())? {
                Ordering::Less => {
                    sorted.insert(pos, item);
                    continue 'outer;
                }
                Ordering::Equal => {
                    if item.0 < existing.0 {
                        sorted.insert(pos, item);
                        continue 'outer;
                    }
                }
                Ordering::Greater => {}
            }
        }
        sorted.push(item);
    }
    let entries = sorted
        .into_iter()
        .map(|(value, witness)| SpectrumEntry {
            value: BiasValue::Cyclo(value),
            witness: SpectrumWitness::Affine(witness),
        })
        .collect();
    Ok(SpectrumReport { k, degree: Some(degree), max_order, entries })
}

impl SpectrumReport {
    /// Deterministic text rendering: one value per line, exact form then
    /// a certified 15-digit decimal.
    pub fn render(&self) -> String {
        let mut out = String::new();
        match self.degree {
            Some(d) => out.push_str(&format!(
                "# spectrum k={} degree={} max-order={}\n",
                self.k, d, self.max_order
            )),
            None => {
                out.push_str(&format!("# spectrum k={} max-order={}\n", self.k, self.max_order))
            }
        }
        out.push_str(&format!("# values {}\n", self.entries.len()));
        for e in &self.entries {
            match &e.value {
                BiasValue::Rational(r) => {
                    out.push_str(&format!("{}/{} {}\n", r.numer(), r.denom(),
                        decimal_of_rational(r, 15)));
                }
                BiasValue::Cyclo(c) => {
                    out.push_str(&format!("{} {}\n", c, certified_decimal(c, 15)));
                }
            }
        }
        out
    }
}

/// For a rational value in the report, the distance down to the next
/// smaller reported value (the "reverse gap"); none for the smallest
/// value or for values not present.
pub fn reverse_gap(report: &SpectrumReport, value: &BigRational) -> Option<BigRational> {
    let mut rationals: Vec<BigRational> = report
        .entries
        .iter()
        .filter_map(|e| match &e.value {
            BiasValue::Rational(r) => Some(r.clone()),
            BiasValue::Cyclo(_) => None,
        })
        .collect();
    rationals.sort();
    if !rationals.contains(value) {
        return None;
    }
    rationals.iter().rev().find(|r| *r < value).map(|below| value - below)
}

/// The quadratic Gauss sum `G(p) = Σ_{x mod p} e(x²/p)` for an odd prime.
pub fn gauss_sum(p: u64) -> Result<CycloValue> {
    if p < 3 || p % 2 == 0 || crate::group::prime_power_base(p) != Some((p, 1)) {
        return Err(Error::invalid(format!("Gauss sum needs an odd prime, got {p}")));
    }
    let mut acc = CycloValue::zero();
    for x in 0..p {
        let t = TorusValue::new((x as i128 * x as i128) % p as i128, p as i128)?;
        acc = acc.add(&CycloValue::root_of_unity(&t));
    }
    Ok(acc)
}

/// Certified check that every value in the report has modulus at most
/// `1 + 2^{-50}`.
pub fn moduli_within_unit_disc(report: &SpectrumReport) -> Result<bool> {
    let tol = BigRational::one()
        + BigRational::new(1.into(), num_bigint::BigInt::from(2u128.pow(50)));
    for e in &report.entries {
        let value = e.value.as_cyclo();
        if !crate::bias::certified_modulus_le(&value, &tol)? {
            return Ok(false);
        }
    }
    Ok(true)
}
