//! Seeded property batteries over random maps.
//!
//! These drive the main scientific claims of the crate: every inequality
//! and identity is checked exactly on seeded random instances, and any
//! violation is reported with a witness description (the instance and
//! both exact values). A fixed seed reproduces the identical run.

use crate::bias::{
    bias, bias_oracle, bias_recursion_check, exponent_bound, main_term_check,
    subadditivity_check, trivial_bounds,
};
use crate::group::{cyclic_subgroup, p_torsion, times_p_subgroup, FinAbGroup, GroupHom};
use crate::map::{
    compose_through, domain_tuples, from_group_map, mask_axes, random_map_g, random_map_t,
    MultiAffine, MultiMapG, MultiMapT, Partition,
};
use crate::structure::{
    extend_domain, extend_range, extend_rank_one, verify_certificate, CertTerm, RankCertificate,
    RankOneWitness, Verification,
};
use crate::{Budget, Result};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

#[derive(Debug, Clone)]
pub struct BatteryConfig {
    pub trials: u64,
    pub seed: u64,
    pub max_order: u64,
    pub max_k: usize,
    pub budget: Budget,
}

impl Default for BatteryConfig {
    fn default() -> Self {
        BatteryConfig {
            trials: 100,
            seed: 1,
            max_order: 16,
            max_k: 3,
            budget: Budget::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct LemmaStat {
    pub name: &'static str,
    pub checks: u64,
    pub violations: Vec<String>,
}

#[derive(Debug, Clone, Default)]
pub struct BatteryReport {
    pub stats: Vec<LemmaStat>,
}

impl BatteryReport {
    fn stat(&mut self, name: &'static str) -> &mut LemmaStat {
        if let Some(pos) = self.stats.iter().position(|s| s.name == name) {
            return &mut self.stats[pos];
        }
        self.stats.push(LemmaStat { name, checks: 0, violations: Vec::new() });
        self.stats.last_mut().unwrap()
    }

    fn record(&mut self, name: &'static str, ok: bool, witness: impl FnOnce() -> String) {
        let stat = self.stat(name);
        stat.checks += 1;
        if !ok {
            stat.violations.push(witness());
        }
    }

    pub fn total_violations(&self) -> u64 {
        self.stats.iter().map(|s| s.violations.len() as u64).sum()
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for s in &self.stats {
            out.push_str(&format!(
                "{:<28} {:>6} checks  {:>3} violations\n",
                s.name,
                s.checks,
                s.violations.len()
            ));
            for v in &s.violations {
                out.push_str(&format!("  VIOLATION {v}\n"));
            }
        }
        out
    }
}

/// A random canonical group of order ≤ max_order (possibly trivial).
pub fn random_group<R: Rng>(rng: &mut R, max_order: u64) -> FinAbGroup {
    let mut orders = Vec::new();
    let mut room = max_order;
    while room >= 2 {
        let o = rng.gen_range(1..=room);
        if o == 1 {
            break;
        }
        orders.push(o);
        room /= o;
    }
    FinAbGroup::new(&orders).expect("orders >= 1")
}

fn random_domains<R: Rng>(rng: &mut R, cfg: &BatteryConfig, min_k: usize) -> Vec<FinAbGroup> {
    let k = rng.gen_range(min_k..=cfg.max_k.max(min_k));
    if rng.gen_bool(0.5) {
        // share a prime across the axes so nonzero maps exist
        let p = [2u64, 3][rng.gen_range(0..2)];
        (0..k)
            .map(|_| {
                let g = random_p_group(rng, p, cfg.max_order);
                if g.is_trivial() {
                    FinAbGroup::cyclic(p).expect("prime")
                } else {
                    g
                }
            })
            .collect()
    } else {
        (0..k).map(|_| random_group(rng, cfg.max_order)).collect()
    }
}

fn describe(map: &MultiMapT) -> String {
    let doms: Vec<String> = map.domains().iter().map(|g| g.to_string()).collect();
    let entries: Vec<String> = map.tensor().iter().map(|t| t.to_string()).collect();
    format!("[{}] tensor [{}]", doms.join(" x "), entries.join(", "))
}

/// A random subgroup inclusion into `g`: the whole group, `pA`, `A[p]`,
/// or a cyclic subgroup on a random element.
fn random_subgroup<R: Rng>(rng: &mut R, g: &FinAbGroup) -> GroupHom {
    if g.is_trivial() {
        return g.identity_hom();
    }
    match rng.gen_range(0..4u32) {
        0 => g.identity_hom(),
        1 | 2 => {
            let primes: Vec<u64> = crate::group::prime_power_parts(g.exponent())
                .into_iter()
                .map(|(p, _)| p)
                .collect();
            let p = primes[rng.gen_range(0..primes.len())];
            if rng.gen_bool(0.5) {
                times_p_subgroup(g, p).1
            } else {
                p_torsion(g, p).1
            }
        }
        _ => {
            let coords: Vec<u64> =
                g.factors().iter().map(|&f| rng.gen_range(0..f)).collect();
            cyclic_subgroup(g, &g.element(&coords)).1
        }
    }
}

/// The nine multilinear identities and inequalities, checked exactly on
/// seeded random maps.
pub fn run_lemma_battery(cfg: &BatteryConfig) -> Result<BatteryReport> {
    let mut report = BatteryReport::default();
    for trial in 0..cfg.trials {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(trial));
        let domains = random_domains(&mut rng, cfg, 1);
        let phi = random_map_t(&domains, &mut rng);
        let k = phi.arity();
        let b = bias(&phi);

        // bias recursion over a random proper subset of the axes
        let axes: Vec<usize> = (0..k).filter(|_| rng.gen_bool(0.5)).collect();
        let axes = if axes.len() == k { axes[..k - 1].to_vec() } else { axes };
        let ok = bias_recursion_check(&phi, &axes, &cfg.budget)?;
        report.record("bias recursion", ok, || {
            format!("recursion fails for {} at axes {axes:?}", describe(&phi))
        });

        // elementary bounds on a random axis
        let axis = rng.gen_range(0..k);
        let bounds = trivial_bounds(&phi, axis);
        let ok = if bounds.zero_map {
            b == BigRational::one() && bounds.lower <= b
        } else {
            bounds.lower <= b && b <= bounds.upper
        };
        report.record("elementary bounds", ok, || {
            format!(
                "bias {b} outside [{}, {}] for {}",
                bounds.lower,
                bounds.upper,
                describe(&phi)
            )
        });

        // subadditivity against a second random map
        let psi = random_map_t(&domains, &mut rng);
        let ok = subadditivity_check(&phi, &psi)?;
        report.record("subadditivity", ok, || {
            format!("bias(φ+ψ) < bias(φ)bias(ψ) for {} and {}", describe(&phi), describe(&psi))
        });

        // factoring monotonicity: a random composite through random blocks
        {
            let blocks = random_partition(&mut rng, k);
            let codomains: Vec<FinAbGroup> =
                blocks.iter().map(|_| random_group(&mut rng, cfg.max_order)).collect();
            let outer = random_map_t(&codomains, &mut rng);
            let factors: Vec<MultiMapG> = blocks
                .iter()
                .zip(&codomains)
                .map(|(block, cod)| {
                    let doms: Vec<FinAbGroup> =
                        block.iter().map(|&i| domains[i].clone()).collect();
                    random_map_g(&doms, cod, &mut rng)
                })
                .collect();
            let part = Partition::new(blocks.clone(), k)?;
            let composite = compose_through(&outer, &part, &factors)?;
            let ok = bias(&composite) >= bias(&outer);
            report.record("factoring monotonicity", ok, || {
                format!(
                    "bias(composite) = {} < bias(outer) = {} for outer {}",
                    bias(&composite),
                    bias(&outer),
                    describe(&outer)
                )
            });
        }

        // certificate bound: a random verifying certificate's sum
        if k >= 2 {
            let cert = random_certificate(&mut rng, &domains);
            let sum = cert.term_sum(&domains)?;
            debug_assert!(matches!(
                verify_certificate(&sum, &cert)?,
                Verification::Verified
            ));
            let ok = bias(&sum) >= cert.bias_bound();
            report.record("certificate bound", ok, || {
                format!(
                    "bias {} below certificate bound {} (rank {})",
                    bias(&sum),
                    cert.bias_bound(),
                    cert.rank()
                )
            });
        }

        // restriction monotonicity along random subgroup inclusions
        {
            let inclusions: Vec<GroupHom> =
                domains.iter().map(|g| random_subgroup(&mut rng, g)).collect();
            let restricted = phi.precompose(&inclusions)?;
            let ok = bias(&restricted) >= b;
            report.record("restriction monotonicity", ok, || {
                format!(
                    "bias dropped from {b} to {} after restriction of {}",
                    bias(&restricted),
                    describe(&phi)
                )
            });
        }

        // exponent bound
        if k >= 2 && !phi.is_zero() {
            let (q, bound) = exponent_bound(&phi)?;
            let ok = b <= bound;
            report.record("exponent bound", ok, || {
                format!("bias {b} exceeds (n+1)^(k-2)/q = {bound} at q = {q} for {}", describe(&phi))
            });
        }

        // primary multiplicativity
        {
            let parts = phi.primary_split();
            let mut product = BigRational::one();
            for part in &parts {
                product *= bias(&part.part);
            }
            let ok = product == b;
            report.record("primary multiplicativity", ok, || {
                format!("Π_p bias(φ_p) = {product} differs from bias {b} for {}", describe(&phi))
            });
        }

        // kernel probability identity: P(F = 0) = bias(dualized F)
        {
            let f_domains = random_domains(&mut rng, cfg, 1);
            let codomain = random_group(&mut rng, cfg.max_order);
            let f = random_map_g(&f_domains, &codomain, &mut rng);
            let mut zeros: u64 = 0;
            let mut total: u64 = 0;
            for x in domain_tuples(f.domains()) {
                total += 1;
                if f.codomain().is_zero(&f.evaluate(&x)?) {
                    zeros += 1;
                }
            }
            let p_zero = BigRational::new(zeros.into(), total.into());
            let dual_bias = bias(&from_group_map(&f)?);
            let ok = p_zero == dual_bias;
            report.record("kernel probability", ok, || {
                format!("P(F=0) = {p_zero} but bias = {dual_bias}")
            });
        }

        // the two bias algorithms agree (within the oracle budget)
        if crate::map::total_points(&domains) <= cfg.budget.max_points {
            let oracle = bias_oracle(&phi, &cfg.budget)?;
            let ok = oracle.as_rational() == Some(b.clone());
            report.record("oracle equivalence", ok, || {
                format!("kernel bias {b} vs oracle {oracle} for {}", describe(&phi))
            });
        }
    }
    Ok(report)
}

fn random_partition<R: Rng>(rng: &mut R, k: usize) -> Vec<Vec<usize>> {
    let nblocks = rng.gen_range(1..=k);
    let mut blocks: Vec<Vec<usize>> = vec![Vec::new(); nblocks];
    for i in 0..k {
        blocks[rng.gen_range(0..nblocks)].push(i);
    }
    blocks.retain(|b| !b.is_empty());
    blocks
}

/// A random certificate over the given domains: up to two terms with
/// admissible random factor maps (the sum of the composites is then a
/// map with a verifying certificate by construction).
fn random_certificate<R: Rng>(rng: &mut R, domains: &[FinAbGroup]) -> RankCertificate {
    let k = domains.len();
    let rank = rng.gen_range(0..=2usize);
    let qs = [2u64, 3, 4, 5, 8, 9];
    let mut terms = Vec::with_capacity(rank);
    for _ in 0..rank {
        let q = qs[rng.gen_range(0..qs.len())];
        let mask = rng.gen_range(1..(1u32 << k) - 1);
        let i_axes = mask_axes(mask);
        let rest: Vec<usize> = (0..k).filter(|i| !i_axes.contains(i)).collect();
        let qg = FinAbGroup::cyclic(q).expect("prime power");
        let left_doms: Vec<FinAbGroup> = i_axes.iter().map(|&i| domains[i].clone()).collect();
        let right_doms: Vec<FinAbGroup> = rest.iter().map(|&i| domains[i].clone()).collect();
        let left = random_map_g(&left_doms, &qg, rng);
        let right = random_map_g(&right_doms, &qg, rng);
        terms.push(CertTerm { q, i_axes, left, right });
    }
    RankCertificate { terms }
}

/// The main-term inequality on random multiaffine maps built to satisfy
/// the hypothesis (no term strictly above J).
pub fn run_main_term_battery(cfg: &BatteryConfig) -> Result<BatteryReport> {
    let mut report = BatteryReport::default();
    for trial in 0..cfg.trials {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(0x5eed_0000 + trial));
        // keep domains small: the oracle walks the whole product
        let k = rng.gen_range(1..=cfg.max_k.min(3));
        let domains: Vec<FinAbGroup> =
            (0..k).map(|_| random_group(&mut rng, cfg.max_order.min(8))).collect();
        let j_mask = rng.gen_range(1..(1u32 << k));
        let mut terms = BTreeMap::new();
        for mask in 1u32..(1 << k) {
            if mask & !j_mask != 0 && mask != j_mask {
                // allowed only when not strictly above J; terms strictly
                // containing J are excluded by construction
                if mask & j_mask == j_mask {
                    continue;
                }
            }
            if mask & j_mask == j_mask && mask != j_mask {
                continue;
            }
            if rng.gen_bool(0.7) {
                let sub: Vec<FinAbGroup> =
                    mask_axes(mask).iter().map(|&i| domains[i].clone()).collect();
                let term = random_map_t(&sub, &mut rng);
                if !term.is_zero() {
                    terms.insert(mask, term);
                }
            }
        }
        let phi = MultiAffine::new(domains.clone(), terms)?;
        let ok = main_term_check(&phi, j_mask, &cfg.budget)?;
        report.record("main term (affine)", ok, || {
            format!("|bias| exceeds bias(φ_J) for J mask {j_mask:#b}, k = {k}")
        });
    }
    Ok(report)
}

/// Admissible random input for the extension lemmas: a map into `Z/q`
/// whose entries also vanish against the p-torsion of the listed axes.
pub fn random_extension_input<R: Rng>(
    domains: &[FinAbGroup],
    q: u64,
    p: u64,
    strengthened_axes: &[usize],
    rng: &mut R,
) -> MultiMapG {
    let cod = FinAbGroup::cyclic(q).expect("prime power");
    let shape = crate::map::TensorShape::of(domains);
    let mut tensor = Vec::with_capacity(shape.len());
    for idx in shape.indices() {
        // base constraint: q/gcd(q, m) | entry per axis order m;
        // strengthened axes add q/gcd(q, m/p) | entry
        let mut step = 1u64;
        for (i, &j) in idx.iter().enumerate() {
            let m = domains[i].factors()[j];
            step = step.lcm(&(q / q.gcd(&m)));
            if strengthened_axes.contains(&i) && m % p == 0 {
                step = step.lcm(&(q / q.gcd(&(m / p))));
            }
        }
        let choices = q / step;
        let value = step * rng.gen_range(0..choices);
        tensor.push(crate::group::GroupElement { coords: vec![value] })
    }
    MultiMapG::new(domains.to_vec(), cod, tensor).expect("admissible by construction")
}

fn random_p_group<R: Rng>(rng: &mut R, p: u64, max_order: u64) -> FinAbGroup {
    let mut orders = Vec::new();
    let mut room = max_order;
    while room >= p {
        let max_exp = room.ilog(p);
        let e = rng.gen_range(0..=max_exp);
        if e == 0 {
            break;
        }
        let o = p.pow(e);
        orders.push(o);
        room /= o;
    }
    FinAbGroup::new(&orders).expect("orders >= 1")
}

/// The three extension lemmas on seeded admissible inputs, checked
/// pointwise on the whole subdomain, plus lift determinism.
pub fn run_extension_battery(cfg: &BatteryConfig) -> Result<BatteryReport> {
    let mut report = BatteryReport::default();
    for trial in 0..cfg.trials {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(0xe7e2_0000 + trial));
        let p = [2u64, 3][rng.gen_range(0..2)];
        let q = p.pow(rng.gen_range(1..=2));
        let k = rng.gen_range(2..=cfg.max_k.max(2));
        // subdomain stays ≤ 4096 points: cap each axis around 16
        let a1 = {
            let mut g = random_p_group(&mut rng, p, cfg.max_order);
            if g.is_trivial() {
                g = FinAbGroup::cyclic(p * p).expect("prime power");
            }
            g
        };
        let rest: Vec<FinAbGroup> =
            (1..k).map(|_| random_p_group(&mut rng, p, cfg.max_order)).collect();

        // (1) domain enlargement
        {
            let (sub, incl) = times_p_subgroup(&a1, p);
            let mut domains = vec![sub.clone()];
            domains.extend(rest.iter().cloned());
            let strengthened: Vec<usize> = (1..k).collect();
            let phi = random_extension_input(&domains, q, p, &strengthened, &mut rng);
            let psi = extend_domain(&phi, &a1, p)?;
            let psi_again = extend_domain(&phi, &a1, p)?;
            report.record("lift determinism", psi == psi_again, || {
                "repeated domain enlargement differs".into()
            });
            let pq = p * q;
            let mut ok = true;
            'outer: for y in sub.elements() {
                let mut tail = domain_tuples(&rest);
                loop {
                    let Some(xs) = tail.next() else { break };
                    let mut args = vec![incl.apply(&y)];
                    args.extend(xs.iter().cloned());
                    let lhs = psi.evaluate(&args)?.coords[0];
                    let mut sub_args = vec![y.clone()];
                    sub_args.extend(xs.iter().cloned());
                    let rhs =
                        (phi.evaluate(&sub_args)?.coords[0] as u128 * p as u128 % pq as u128) as u64;
                    if lhs != rhs {
                        ok = false;
                        break 'outer;
                    }
                }
            }
            report.record("domain enlargement", ok, || {
                format!("commuting square fails for p={p}, q={q}, A1={a1}")
            });
        }

        // (2) range enlargement
        {
            let mut domains = vec![a1.clone()];
            domains.extend(rest.iter().cloned());
            let strengthened: Vec<usize> = (0..k).collect();
            let phi = random_extension_input(&domains, q, p, &strengthened, &mut rng);
            let psi = extend_range(&phi, p)?;
            let psi_again = extend_range(&phi, p)?;
            report.record("lift determinism", psi == psi_again, || {
                "repeated range enlargement differs".into()
            });
            let mut ok = true;
            for x in domain_tuples(&domains) {
                if psi.evaluate(&x)?.coords[0] % q != phi.evaluate(&x)?.coords[0] {
                    ok = false;
                    break;
                }
            }
            report.record("range enlargement", ok, || {
                format!("mod-q reduction fails for p={p}, q={q}")
            });
        }

        // (3) rank-one extension
        {
            let (sub, incl) = times_p_subgroup(&a1, p);
            let split = rng.gen_range(1..k);
            let left_axes: Vec<usize> = (0..split).collect();
            let mut left_doms = vec![sub.clone()];
            left_doms.extend(rest[..split - 1].iter().cloned());
            let right_doms: Vec<FinAbGroup> = rest[split - 1..].iter().cloned().collect();
            let strengthened_left: Vec<usize> = (1..split).collect();
            let strengthened_right: Vec<usize> = (0..right_doms.len()).collect();
            let left =
                random_extension_input(&left_doms, q, p, &strengthened_left, &mut rng);
            let right =
                random_extension_input(&right_doms, q, p, &strengthened_right, &mut rng);
            let witness = RankOneWitness { q, i_axes: left_axes, left, right };
            let phi = witness.composite(k)?;
            let (psi, new_witness) = extend_rank_one(&phi, &witness, &a1, p)?;
            report.record("rank-one q growth", new_witness.q == p * q, || {
                format!("expected q to grow to {} but got {}", p * q, new_witness.q)
            });
            let mut sub_domains = vec![sub.clone()];
            sub_domains.extend(rest.iter().cloned());
            let mut ok = true;
            for x in domain_tuples(&sub_domains) {
                let mut args = vec![incl.apply(&x[0])];
                args.extend(x[1..].iter().cloned());
                if psi.evaluate(&args)? != phi.evaluate(&x)? {
                    ok = false;
                    break;
                }
            }
            report.record("rank-one extension", ok, || {
                format!("extension disagrees on the subdomain for p={p}, q={q}")
            });
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lemma_battery_clean_and_deterministic() {
        let cfg = BatteryConfig { trials: 40, seed: 7, max_order: 12, max_k: 3, ..Default::default() };
        let a = run_lemma_battery(&cfg).unwrap();
        assert_eq!(a.total_violations(), 0, "{}", a.render());
        let b = run_lemma_battery(&cfg).unwrap();
        assert_eq!(a.render(), b.render());
        // every named lemma got exercised
        let names: Vec<&str> = a.stats.iter().map(|s| s.name).collect();
        for expect in [
            "bias recursion",
            "elementary bounds",
            "subadditivity",
            "factoring monotonicity",
            "certificate bound",
            "restriction monotonicity",
            "exponent bound",
            "primary multiplicativity",
            "kernel probability",
            "oracle equivalence",
        ] {
            assert!(names.contains(&expect), "missing {expect}");
        }
    }

    #[test]
    fn main_term_battery_clean() {
        let cfg = BatteryConfig { trials: 25, seed: 3, max_order: 8, max_k: 3, ..Default::default() };
        let r = run_main_term_battery(&cfg).unwrap();
        assert_eq!(r.total_violations(), 0, "{}", r.render());
        assert!(r.stats[0].checks >= 25);
    }

    #[test]
    fn extension_battery_clean() {
        let cfg = BatteryConfig { trials: 25, seed: 9, max_order: 16, max_k: 3, ..Default::default() };
        let r = run_extension_battery(&cfg).unwrap();
        assert_eq!(r.total_violations(), 0, "{}", r.render());
    }

    #[test]
    fn extension_sampler_respects_preconditions() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let g = FinAbGroup::new(&[4, 2]).unwrap();
        let domains = vec![g.clone(), g.clone()];
        for _ in 0..20 {
            let phi = random_extension_input(&domains, 4, 2, &[0, 1], &mut rng);
            // every entry must vanish against the 2-torsion of both axes
            assert!(extend_range(&phi, 2).is_ok());
        }
    }
}
