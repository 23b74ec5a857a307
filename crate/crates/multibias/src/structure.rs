//! Constructive structure theory: extension of multilinear maps across
//! subgroup and range enlargements, partition-rank certificates with
//! verification and bounded exhaustive search, the prime-support bound,
//! and crush-form rewriting of group-valued maps.
//!
//! A [`RankCertificate`] witnesses that a torus-valued map is a sum of
//! maps, each factoring through some multiplication pairing `m_q`:
//! `φ(x) = Σ_t m_{q_t}(left_t(x_{I_t}), right_t(x_{I_t^c}))`. Certificates
//! are only ever trusted after verification, which is a finite exact
//! check on generator tensors (complete by multilinearity).

use crate::bias::bias;
use crate::group::{p_torsion, quotient, times_p_subgroup, FinAbGroup, GroupElement, GroupHom};
use crate::map::{
    compose_through, compose_through_g, from_group_map, m_q, mask_axes, MultiMapG, MultiMapT,
    Partition,
};
use crate::{Budget, Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

// ---------------------------------------------------------------------------
// Extension of multilinear maps (domain, range, rank one)
// ---------------------------------------------------------------------------

fn cyclic_prime_power_codomain(map: &MultiMapG, p: u64) -> Result<u64> {
    let cod = map.codomain();
    if cod.rank() != 1 {
        return Err(Error::invalid("extension needs a cyclic prime-power codomain"));
    }
    let q = cod.factors()[0];
    match crate::group::prime_power_base(q) {
        Some((base, _)) if base == p => Ok(q),
        _ => Err(Error::invalid(format!("codomain order {q} is not a power of {p}"))),
    }
}

/// Verifies `φ(x) = 0 whenever p·x_i = 0` for the listed axes, by
/// scaling tensor entries with the torsion generators of each axis.
/// On failure returns the witness generator tuple.
fn check_vanishing_on_torsion(map: &MultiMapG, p: u64, axes: &[usize], q: u64) -> Result<()> {
    let shape = map.shape();
    for idx in shape.indices() {
        let entry = map.entry(&idx);
        let c = entry.coords[0];
        for &i in axes {
            let m = map.domains()[i].factors()[idx[i]];
            if m % p != 0 {
                continue;
            }
            // torsion generator (m/p)·e_j scales the entry by m/p
            if (m / p) as u128 * c as u128 % q as u128 != 0 {
                return Err(Error::precondition(format!(
                    "map does not vanish on p-torsion: axis {i}, generator tuple {idx:?}, \
                     entry {c} mod {q} survives scaling by {}",
                    m / p
                )));
            }
        }
    }
    Ok(())
}

/// Coordinates of `p·e_j ∈ A_1` inside `pA_1`, for each generator of A_1.
fn p_multiples_in_subgroup(a1: &FinAbGroup, p: u64) -> (FinAbGroup, GroupHom, Vec<GroupElement>) {
    let (sub, incl) = times_p_subgroup(a1, p);
    let reps = (0..a1.rank())
        .map(|j| {
            let target = a1.scale(p as i128, &a1.generator(j));
            if a1.is_zero(&target) {
                sub.zero()
            } else {
                let m = incl
                    .images
                    .iter()
                    .position(|img| *img == target)
                    .expect("p·e_j is a designated generator of pA_1");
                sub.generator(m)
            }
        })
        .collect();
    (sub, incl, reps)
}

/// Domain enlargement: extends `φ : pA_1 × A_[2,k] → Z/q` (vanishing on
/// the p-torsion of every later axis) to `ψ : A_[k] → Z/(pq)` with
/// `ψ|_{pA_1 × A_[2,k]} = p·φ`. Entries take the minimal nonnegative lift.
pub fn extend_domain(phi: &MultiMapG, a1: &FinAbGroup, p: u64) -> Result<MultiMapG> {
    let q = cyclic_prime_power_codomain(phi, p)?;
    let (sub, incl, reps) = p_multiples_in_subgroup(a1, p);
    if phi.domains()[0] != sub {
        return Err(Error::invalid(format!(
            "first domain {} is not p·({}) = {}",
            phi.domains()[0],
            a1,
            sub
        )));
    }
    let later: Vec<usize> = (1..phi.arity()).collect();
    check_vanishing_on_torsion(phi, p, &later, q)?;

    let pq = p.checked_mul(q).ok_or_else(|| Error::invalid("pq overflows"))?;
    let new_cod = FinAbGroup::cyclic(pq)?;
    let mut new_domains = phi.domains().to_vec();
    new_domains[0] = a1.clone();
    let new_shape = crate::map::TensorShape::of(&new_domains);
    let mut tensor = Vec::with_capacity(new_shape.len());
    for idx in new_shape.indices() {
        // φ_{j_1…j_k} = φ(p e_{1 j_1}, e_{2 j_2}, …); ψ entry is the
        // minimal solution of ψ ≡ φ (mod q)
        let mut args: Vec<GroupElement> = Vec::with_capacity(phi.arity());
        args.push(reps[idx[0]].clone());
        for (pos, &j) in idx.iter().enumerate().skip(1) {
            args.push(phi.domains()[pos].generator(j));
        }
        let val = phi.evaluate(&args)?;
        tensor.push(GroupElement { coords: vec![val.coords[0]] });
    }
    let psi = MultiMapG::new(new_domains, new_cod.clone(), tensor)
        .map_err(|e| Error::precondition(format!("lift violates an order constraint: {e}")))?;

    // the commuting square on generators (complete by multilinearity):
    // ψ(ι(y), x) = p·φ(y, x) in Z/(pq)
    let sub_domains: Vec<FinAbGroup> = phi.domains().to_vec();
    let sub_shape = crate::map::TensorShape::of(&sub_domains);
    for idx in sub_shape.indices() {
        let mut args_phi = Vec::with_capacity(phi.arity());
        let mut args_psi = Vec::with_capacity(phi.arity());
        for (pos, &j) in idx.iter().enumerate() {
            let g = sub_domains[pos].generator(j);
            if pos == 0 {
                args_psi.push(incl.apply(&g));
            } else {
                args_psi.push(g.clone());
            }
            args_phi.push(g);
        }
        let lhs = psi.evaluate(&args_psi)?;
        let rhs = (phi.evaluate(&args_phi)?.coords[0] as u128 * p as u128 % pq as u128) as u64;
        if lhs.coords[0] != rhs {
            return Err(Error::precondition(format!(
                "extension square fails at generator tuple {idx:?}: ψ gives {}, p·φ gives {rhs}",
                lhs.coords[0]
            )));
        }
    }
    Ok(psi)
}

/// Range enlargement: extends `φ : A_[k] → Z/q` (vanishing on the
/// p-torsion of every axis) to `ψ : A_[k] → Z/(pq)` with `ψ mod q = φ`.
pub fn extend_range(phi: &MultiMapG, p: u64) -> Result<MultiMapG> {
    let q = cyclic_prime_power_codomain(phi, p)?;
    let all: Vec<usize> = (0..phi.arity()).collect();
    check_vanishing_on_torsion(phi, p, &all, q)?;
    let pq = p.checked_mul(q).ok_or_else(|| Error::invalid("pq overflows"))?;
    let new_cod = FinAbGroup::cyclic(pq)?;
    let tensor = phi
        .tensor()
        .iter()
        .map(|e| GroupElement { coords: vec![e.coords[0]] })
        .collect();
    let psi = MultiMapG::new(phi.domains().to_vec(), new_cod.clone(), tensor)
        .map_err(|e| Error::precondition(format!("lift violates an order constraint: {e}")))?;
    // ψ mod q = φ on generators
    let reduction = GroupHom {
        domain: new_cod,
        codomain: phi.codomain().clone(),
        images: vec![phi.codomain().element(&[1])],
    };
    let reduced = psi.postcompose(&reduction)?;
    if reduced != *phi {
        return Err(Error::precondition("range extension does not reduce to the input"));
    }
    Ok(psi)
}

/// A factoring witness: `φ = m_q(left(x_I), right(x_{I^c}))`.
#[derive(Debug, Clone)]
pub struct RankOneWitness {
    pub q: u64,
    pub i_axes: Vec<usize>,
    pub left: MultiMapG,
    pub right: MultiMapG,
}

impl RankOneWitness {
    /// The composite map the witness describes.
    pub fn composite(&self, k: usize) -> Result<MultiMapT> {
        let part = Partition::two_block(&self.i_axes, k)?;
        compose_through(&m_q(self.q)?, &part, &[self.left.clone(), self.right.clone()])
    }
}

/// Rank-one extension: given `φ : pA_1 × A_[2,k] → T` factoring through
/// `m_q` with axis 1 on the left, extends to `ψ : A_[k] → T` factoring
/// through `m_{pq}` via domain enlargement of the left factor and range
/// enlargement of the right factor.
pub fn extend_rank_one(
    phi: &MultiMapT,
    witness: &RankOneWitness,
    a1: &FinAbGroup,
    p: u64,
) -> Result<(MultiMapT, RankOneWitness)> {
    let k = phi.arity();
    if witness.i_axes.first() != Some(&0) {
        return Err(Error::invalid("rank-one extension needs axis 1 in the left block"));
    }
    let composite = witness.composite(k)?;
    if composite != *phi {
        return Err(Error::invalid("witness does not reproduce the map"));
    }
    let psi_left = extend_domain(&witness.left, a1, p)?;
    let psi_right = extend_range(&witness.right, p)?;
    let pq = p * witness.q;
    let new_witness =
        RankOneWitness { q: pq, i_axes: witness.i_axes.clone(), left: psi_left, right: psi_right };
    let psi = new_witness.composite(k)?;

    // ψ extends φ on the subdomain pA_1 × A_[2,k]
    let (_, incl, _) = p_multiples_in_subgroup(a1, p);
    let mut homs: Vec<GroupHom> = Vec::with_capacity(k);
    homs.push(incl);
    for g in &phi.domains()[1..] {
        homs.push(g.identity_hom());
    }
    let restricted = psi.precompose(&homs)?;
    if restricted != *phi {
        return Err(Error::precondition("rank-one extension does not restrict to the input"));
    }
    Ok((psi, new_witness))
}

// ---------------------------------------------------------------------------
// Rank certificates
// ---------------------------------------------------------------------------

/// One certificate term: a map factoring through `m_q` on the variable
/// split `(I, I^c)`.
#[derive(Debug, Clone)]
pub struct CertTerm {
    pub q: u64,
    pub i_axes: Vec<usize>,
    pub left: MultiMapG,
    pub right: MultiMapG,
}

impl CertTerm {
    pub fn composite(&self, k: usize) -> Result<MultiMapT> {
        let part = Partition::two_block(&self.i_axes, k)?;
        compose_through(&m_q(self.q)?, &part, &[self.left.clone(), self.right.clone()])
    }
}

/// A verifiable partition-rank witness: the terms sum to the target map.
#[derive(Debug, Clone, Default)]
pub struct RankCertificate {
    pub terms: Vec<CertTerm>,
}

impl RankCertificate {
    pub fn rank(&self) -> usize {
        self.terms.len()
    }

    /// `Π 1/q_t`: a verified certificate forces `bias(φ) ≥` this value.
    pub fn bias_bound(&self) -> BigRational {
        self.terms
            .iter()
            .fold(BigRational::one(), |acc, t| acc / BigRational::from_integer(BigInt::from(t.q)))
    }

    /// The sum of the term composites on the given domains.
    pub fn term_sum(&self, domains: &[FinAbGroup]) -> Result<MultiMapT> {
        let mut acc = MultiMapT::zero(domains.to_vec())?;
        for term in &self.terms {
            let c = term.composite(domains.len())?;
            if c.domains() != domains {
                return Err(Error::invalid("certificate term domains do not match the target"));
            }
            acc = acc.add(&c)?;
        }
        Ok(acc)
    }
}

/// Outcome of an exact verification, with a witness point on failure.
#[derive(Debug, Clone)]
pub enum Verification {
    Verified,
    Failed(VerifyFailure),
}

impl Verification {
    pub fn is_verified(&self) -> bool {
        matches!(self, Verification::Verified)
    }
}

#[derive(Debug, Clone)]
pub struct VerifyFailure {
    /// A domain point where the two sides differ (a generator tuple).
    pub point: Vec<GroupElement>,
    pub expected: String,
    pub actual: String,
}

impl std::fmt::Display for VerifyFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let coords: Vec<String> =
            self.point.iter().map(|e| format!("({})", join_coords(&e.coords))).collect();
        write!(
            f,
            "witness point [{}]: expected {}, got {}",
            coords.join(", "),
            self.expected,
            self.actual
        )
    }
}

fn join_coords(c: &[u64]) -> String {
    c.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

/// Exact certificate verification by generator-tensor equality (complete
/// by multilinearity). Structural mismatches are errors; value mismatches
/// return a witness.
pub fn verify_certificate(phi: &MultiMapT, cert: &RankCertificate) -> Result<Verification> {
    let sum = cert.term_sum(phi.domains())?;
    let shape = phi.shape();
    for idx in shape.indices() {
        let expected = phi.entry(&idx);
        let actual = sum.entry(&idx);
        if expected != actual {
            let point: Vec<GroupElement> = idx
                .iter()
                .enumerate()
                .map(|(i, &j)| phi.domains()[i].generator(j))
                .collect();
            return Ok(Verification::Failed(VerifyFailure {
                point,
                expected: expected.to_string(),
                actual: actual.to_string(),
            }));
        }
    }
    Ok(Verification::Verified)
}

// ---------------------------------------------------------------------------
// Bounded exhaustive search
// ---------------------------------------------------------------------------

fn prime_powers_up_to(max: u64) -> Vec<u64> {
    (2..=max).filter(|&q| crate::group::prime_power_base(q).is_some()).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Shape {
    q: u64,
    mask: u32,
}

/// Per-entry admissible values for a factor map `A_axes → Z/q`: each
/// entry ranges over the multiples of `q/gcd(q, g)` where `g` is the gcd
/// of the generator orders indexing it.
struct FactorPlan {
    domains: Vec<FinAbGroup>,
    steps: Vec<u64>,
    counts: Vec<u64>,
}

fn factor_plan(domains: Vec<FinAbGroup>, q: u64) -> FactorPlan {
    let shape = crate::map::TensorShape::of(&domains);
    let mut steps = Vec::with_capacity(shape.len());
    let mut counts = Vec::with_capacity(shape.len());
    for idx in shape.indices() {
        let g = idx
            .iter()
            .enumerate()
            .fold(0u64, |acc, (i, &j)| acc.gcd(&domains[i].factors()[j]));
        let choices = q.gcd(&g);
        steps.push(q / choices);
        counts.push(choices);
    }
    FactorPlan { domains, steps, counts }
}

/// Searches for a verifying certificate in canonical order: increasing
/// rank, then increasing `Π q_t`, then lexicographic in the partition
/// shapes and in the tensors. Shape tuples whose Corollary-2.5 bound
/// `Π 1/q_t` exceeds the exact bias are pruned: no certificate with those
/// prime powers can verify.
pub fn search_decomposition(
    phi: &MultiMapT,
    max_q: u64,
    max_rank: usize,
    budget: &Budget,
) -> Result<Option<RankCertificate>> {
    let k = phi.arity();
    if k < 2 {
        return Err(Error::invalid("certificate search needs arity >= 2"));
    }
    let phi_bias = bias(phi);
    let e0 = phi.torsion_modulus();
    let shapes: Vec<Shape> = {
        let mut v = Vec::new();
        for q in prime_powers_up_to(max_q) {
            for mask in 1u32..(1 << k) - 1 {
                v.push(Shape { q, mask });
            }
        }
        v.sort();
        v
    };
    let mut steps_used: u64 = 0;

    for rank in 0..=max_rank {
        // all non-decreasing index tuples, ordered by (Π q, lexicographic)
        let mut tuples: Vec<Vec<usize>> = Vec::new();
        let mut stack: Vec<(Vec<usize>, usize)> = vec![(Vec::new(), 0)];
        while let Some((prefix, from)) = stack.pop() {
            if prefix.len() == rank {
                tuples.push(prefix);
                continue;
            }
            for s in (from..shapes.len()).rev() {
                let mut next = prefix.clone();
                next.push(s);
                stack.push((next, s));
            }
        }
        tuples.sort_by_key(|t| {
            let prod: u128 = t.iter().map(|&s| shapes[s].q as u128).product();
            (prod, t.clone())
        });

        for tuple in tuples {
            let qs: Vec<u64> = tuple.iter().map(|&s| shapes[s].q).collect();
            let q_prod = qs.iter().fold(BigRational::one(), |acc, &q| {
                acc / BigRational::from_integer(BigInt::from(q))
            });
            if q_prod > phi_bias {
                continue; // Corollary 2.5: bound above the bias is impossible
            }
            if let Some(cert) =
                search_tuple(phi, &shapes, &tuple, e0, budget, &mut steps_used)?
            {
                debug_assert!(verify_certificate(phi, &cert)?.is_verified());
                return Ok(Some(cert));
            }
        }
    }
    Ok(None)
}

/// Enumerates all tensor assignments for a fixed shape tuple, comparing
/// the candidate sums against the target tensor over a common modulus.
fn search_tuple(
    phi: &MultiMapT,
    shapes: &[Shape],
    tuple: &[usize],
    e0: u64,
    budget: &Budget,
    steps_used: &mut u64,
) -> Result<Option<RankCertificate>> {
    let k = phi.arity();
    let shape = phi.shape();
    let modulus = tuple.iter().fold(e0, |acc, &s| acc.lcm(&shapes[s].q));

    // target numerators over the common modulus
    let mut target = Vec::with_capacity(shape.len());
    for t in phi.tensor() {
        let den: u64 = t.order().expect("desk-scale order");
        let num: u64 = t.numer().try_into().expect("desk-scale numerator");
        target.push(num * (modulus / den));
    }

    struct TermPlan {
        q: u64,
        left_axes: Vec<usize>,
        right_axes: Vec<usize>,
        left: FactorPlan,
        right: FactorPlan,
        /// per target multi-index: (left flat index, right flat index)
        wiring: Vec<(usize, usize)>,
    }

    let mut plans: Vec<TermPlan> = Vec::with_capacity(tuple.len());
    for &s in tuple {
        let Shape { q, mask } = shapes[s];
        let left_axes = mask_axes(mask);
        let right_axes: Vec<usize> = (0..k).filter(|i| !left_axes.contains(i)).collect();
        let left_domains: Vec<FinAbGroup> =
            left_axes.iter().map(|&i| phi.domains()[i].clone()).collect();
        let right_domains: Vec<FinAbGroup> =
            right_axes.iter().map(|&i| phi.domains()[i].clone()).collect();
        let left = factor_plan(left_domains, q);
        let right = factor_plan(right_domains, q);
        let left_shape = crate::map::TensorShape::of(&left.domains);
        let right_shape = crate::map::TensorShape::of(&right.domains);
        let wiring = shape
            .indices()
            .map(|idx| {
                let li: Vec<usize> = left_axes.iter().map(|&i| idx[i]).collect();
                let ri: Vec<usize> = right_axes.iter().map(|&i| idx[i]).collect();
                (left_shape.flat(&li), right_shape.flat(&ri))
            })
            .collect();
        plans.push(TermPlan { q, left_axes, right_axes, left, right, wiring });
    }

    // flattened choice positions: (term, side 0/1, entry)
    let mut positions: Vec<(usize, u8, usize)> = Vec::new();
    for (t, plan) in plans.iter().enumerate() {
        for e in 0..plan.left.counts.len() {
            positions.push((t, 0, e));
        }
        for e in 0..plan.right.counts.len() {
            positions.push((t, 1, e));
        }
    }
    let mut choice = vec![0u64; positions.len()];
    let mut left_vals: Vec<Vec<u64>> =
        plans.iter().map(|p| vec![0u64; p.left.counts.len()]).collect();
    let mut right_vals: Vec<Vec<u64>> =
        plans.iter().map(|p| vec![0u64; p.right.counts.len()]).collect();

    loop {
        *steps_used += 1;
        if *steps_used > budget.max_search_steps {
            return Err(Error::budget(format!(
                "certificate search exceeded {} candidate tensors",
                budget.max_search_steps
            )));
        }
        // compare Σ_t m_{q_t}(l_t, r_t) with the target
        let mut ok = true;
        for (flat, expect) in target.iter().enumerate() {
            let mut acc: u128 = 0;
            for (t, plan) in plans.iter().enumerate() {
                let (li, ri) = plan.wiring[flat];
                let prod = left_vals[t][li] as u128 * right_vals[t][ri] as u128 % plan.q as u128;
                acc = (acc + prod * (modulus / plan.q) as u128) % modulus as u128;
            }
            if acc as u64 != *expect {
                ok = false;
                break;
            }
        }
        if ok {
            let mut terms = Vec::with_capacity(plans.len());
            for (t, plan) in plans.iter().enumerate() {
                let qg = FinAbGroup::cyclic(plan.q)?;
                let left = MultiMapG::new(
                    plan.left.domains.clone(),
                    qg.clone(),
                    left_vals[t].iter().map(|&v| GroupElement { coords: vec![v] }).collect(),
                )?;
                let right = MultiMapG::new(
                    plan.right.domains.clone(),
                    qg,
                    right_vals[t].iter().map(|&v| GroupElement { coords: vec![v] }).collect(),
                )?;
                debug_assert!(!plan.left_axes.is_empty() && !plan.right_axes.is_empty());
                terms.push(CertTerm {
                    q: plan.q,
                    i_axes: plan.left_axes.clone(),
                    left,
                    right,
                });
            }
            return Ok(Some(RankCertificate { terms }));
        }
        // odometer over choices (last position fastest)
        let mut pos = positions.len();
        loop {
            if pos == 0 {
                return Ok(None);
            }
            pos -= 1;
            let (t, side, e) = positions[pos];
            let (count, step, vals) = if side == 0 {
                (plans[t].left.counts[e], plans[t].left.steps[e], &mut left_vals[t])
            } else {
                (plans[t].right.counts[e], plans[t].right.steps[e], &mut right_vals[t])
            };
            choice[pos] += 1;
            if choice[pos] < count {
                vals[e] = choice[pos] * step;
                break;
            }
            choice[pos] = 0;
            vals[e] = 0;
        }
    }
}

// ---------------------------------------------------------------------------
// Prime-support bound
// ---------------------------------------------------------------------------

/// `⌊log ε⁻¹ / log(1 − 1/2^{k−1})⁻¹⌋`, computed as the largest `m ≥ 0`
/// with `(1 − 1/2^{k−1})^m ≥ ε`; only exact rational comparisons.
pub fn prime_support_bound(eps: &BigRational, k: u32) -> Result<u64> {
    if eps <= &BigRational::zero() || eps > &BigRational::one() {
        return Err(Error::invalid("prime-support bound needs 0 < eps <= 1"));
    }
    if k == 0 {
        return Err(Error::invalid("prime-support bound needs k >= 1"));
    }
    let r = BigRational::one()
        - BigRational::new(BigInt::one(), BigInt::one() << (k - 1) as usize);
    let mut m = 0u64;
    let mut acc = BigRational::one();
    loop {
        acc *= &r;
        if acc >= *eps {
            m += 1;
        } else {
            return Ok(m);
        }
        if m > 1_000_000 {
            return Err(Error::budget("prime-support bound iteration cap"));
        }
    }
}

// ---------------------------------------------------------------------------
// Crush decomposition (Corollary 1.3 form)
// ---------------------------------------------------------------------------

/// One crush term: variables `x_I` are compressed through a small group
/// `C_I` by `g_I`, then mapped with the rest into `B` by `G_I`.
#[derive(Debug, Clone)]
pub struct CrushTerm {
    pub i_axes: Vec<usize>,
    /// `g_I : A_I → C_I`
    pub compressor: MultiMapG,
    /// `G_I : C_I × A_{[k−1]∖I} → B`
    pub expander: MultiMapG,
}

/// `F(x) = Σ_I G_I(g_I(x_I), x_rest)`, one term per distinct `I`.
#[derive(Debug, Clone, Default)]
pub struct CrushDecomposition {
    pub terms: Vec<CrushTerm>,
}

impl CrushDecomposition {
    /// |cod(g_I)| per term.
    pub fn codomain_sizes(&self) -> Vec<u128> {
        self.terms.iter().map(|t| t.compressor.codomain().order()).collect()
    }
}

/// Rewrites a certificate for `from_group_map(F)` into crush form,
/// following the constructive proof: normalize each term so the dual
/// axis sits on the right, read off `G` from linearity in the dual
/// variable, then merge terms sharing the same `I` through the product
/// of their compressors.
pub fn crush_decomposition(f: &MultiMapG, cert: &RankCertificate) -> Result<CrushDecomposition> {
    let phi = from_group_map(f)?;
    match verify_certificate(&phi, cert)? {
        Verification::Verified => {}
        Verification::Failed(w) => {
            return Err(Error::invalid(format!("certificate does not verify: {w}")));
        }
    }
    let k = phi.arity();
    let dual_axis = k - 1;
    let b = f.codomain();

    // per term: (I, g = left factor on A_I, G built from the right factor)
    struct Piece {
        i_axes: Vec<usize>,
        q: u64,
        g: MultiMapG,
        expander: MultiMapG,
    }
    let mut pieces: Vec<Piece> = Vec::new();
    for term in &cert.terms {
        let (i_axes, left, right) = if term.i_axes.contains(&dual_axis) {
            // m_q is symmetric; swap so the dual variable is on the right
            let comp: Vec<usize> = (0..k).filter(|i| !term.i_axes.contains(i)).collect();
            (comp, term.right.clone(), term.left.clone())
        } else {
            (term.i_axes.clone(), term.left.clone(), term.right.clone())
        };
        let rest: Vec<usize> =
            (0..dual_axis).filter(|i| !i_axes.contains(i)).collect();
        // right lives on A_rest × dual(B), dual axis last in sorted order
        let q = term.q;
        let qg = FinAbGroup::cyclic(q)?;
        let mut exp_domains = vec![qg.clone()];
        exp_domains.extend(rest.iter().map(|&i| phi.domains()[i].clone()));
        let exp_shape = crate::map::TensorShape::of(&exp_domains);
        let right_shape = right.shape();
        let mut tensor = Vec::with_capacity(exp_shape.len());
        for idx in exp_shape.indices() {
            // idx[0] indexes the single generator of Z/q (value u = 1)
            let coords: Vec<u64> = (0..b.rank())
                .map(|c| {
                    let mut ridx: Vec<usize> = idx[1..].to_vec();
                    ridx.push(c);
                    let r = right.tensor()[right_shape.flat(&ridx)].coords[0];
                    let m_c = b.factors()[c];
                    // u·r·m_c/q mod m_c with u = 1; q | r·m_c by the
                    // order constraint of the right factor at the dual axis
                    ((r as u128 * m_c as u128 / q as u128) % m_c as u128) as u64
                })
                .collect();
            tensor.push(GroupElement { coords });
        }
        let expander = MultiMapG::new(exp_domains, b.clone(), tensor)?;
        pieces.push(Piece { i_axes, q, g: left, expander });
    }

    // merge pieces with equal I through the product of their codomains
    pieces.sort_by(|a, b| a.i_axes.cmp(&b.i_axes));
    let mut terms: Vec<CrushTerm> = Vec::new();
    let mut start = 0usize;
    while start < pieces.len() {
        let end = pieces[start..]
            .iter()
            .position(|p| p.i_axes != pieces[start].i_axes)
            .map(|off| start + off)
            .unwrap_or(pieces.len());
        let group = &pieces[start..end];
        let i_axes = group[0].i_axes.clone();
        if group.len() == 1 {
            let p = &group[0];
            terms.push(CrushTerm {
                i_axes,
                compressor: p.g.clone(),
                expander: p.expander.clone(),
            });
        } else {
            // product codomain in canonical order; the canonical sort is
            // stable, so slot s holds the s-th piece in (prime, q) order
            let qs: Vec<u64> = group.iter().map(|p| p.q).collect();
            let c_group = FinAbGroup::new(&qs)?;
            let mut order: Vec<usize> = (0..group.len()).collect();
            order.sort_by_key(|&t| {
                let (p, _) = crate::group::prime_power_base(qs[t]).expect("prime power");
                (p, qs[t])
            });
            // compressor: A_I → C, coordinate slot s is g_{order[s]}
            let g_domains = group[0].g.domains().to_vec();
            let g_shape = crate::map::TensorShape::of(&g_domains);
            let mut g_tensor = Vec::with_capacity(g_shape.len());
            for idx in g_shape.indices() {
                let coords: Vec<u64> = order
                    .iter()
                    .map(|&t| group[t].g.entry(&idx).coords[0])
                    .collect();
                g_tensor.push(GroupElement { coords });
            }
            let compressor = MultiMapG::new(g_domains, c_group.clone(), g_tensor)?;
            // expander: C × A_rest → B, generator slot s acts through
            // G_{order[s]}
            let mut exp_domains = vec![c_group.clone()];
            exp_domains.extend_from_slice(&group[0].expander.domains()[1..]);
            let exp_shape = crate::map::TensorShape::of(&exp_domains);
            let mut tensor = Vec::with_capacity(exp_shape.len());
            for idx in exp_shape.indices() {
                let piece = &group[order[idx[0]]];
                let mut sub = idx.clone();
                sub[0] = 0;
                tensor.push(piece.expander.entry(&sub).clone());
            }
            let expander = MultiMapG::new(exp_domains, b.clone(), tensor)?;
            terms.push(CrushTerm { i_axes, compressor, expander });
        }
        start = end;
    }
    let decomposition = CrushDecomposition { terms };
    match verify_crush(f, &decomposition)? {
        Verification::Verified => Ok(decomposition),
        Verification::Failed(w) => Err(Error::invalid(format!(
            "internal: crush decomposition does not reconstruct the map: {w}"
        ))),
    }
}

/// Exact check that `Σ_I G_I(g_I(x_I), x_rest) = F(x)` (generator-tensor
/// equality, complete by multilinearity).
pub fn verify_crush(f: &MultiMapG, d: &CrushDecomposition) -> Result<Verification> {
    let k = f.arity();
    let mut sum = MultiMapG::zero(f.domains().to_vec(), f.codomain().clone())?;
    for term in &d.terms {
        let rest: Vec<usize> = (0..k).filter(|i| !term.i_axes.contains(i)).collect();
        let mut blocks = vec![term.i_axes.clone()];
        let mut factors = vec![term.compressor.clone()];
        for &r in &rest {
            blocks.push(vec![r]);
            let g = &f.domains()[r];
            let ident = MultiMapG::new(
                vec![g.clone()],
                g.clone(),
                (0..g.rank()).map(|j| g.generator(j)).collect(),
            )?;
            factors.push(ident);
        }
        let part = Partition::new(blocks, k)?;
        let composite = compose_through_g(&term.expander, &part, &factors)?;
        sum = sum.add(&composite)?;
    }
    let shape = f.shape();
    for idx in shape.indices() {
        let expected = f.entry(&idx);
        let actual = sum.entry(&idx);
        if expected != actual {
            let point: Vec<GroupElement> =
                idx.iter().enumerate().map(|(i, &j)| f.domains()[i].generator(j)).collect();
            return Ok(Verification::Failed(VerifyFailure {
                point,
                expected: format!("({})", join_coords(&expected.coords)),
                actual: format!("({})", join_coords(&actual.coords)),
            }));
        }
    }
    Ok(Verification::Verified)
}

// ---------------------------------------------------------------------------
// One induction step of the structure theorem, as a pipeline
// ---------------------------------------------------------------------------

/// Decomposes by primary splitting plus one proof-style induction step
/// per primary part: restrict to `pA_1`, factor through the torsion
/// quotients, decompose that by search, extend each term with the
/// rank-one extension, subtract, and decompose the remainder (which
/// factors through `A_1/pA_1`) by search again. Elementary-abelian parts
/// go straight to search.
pub fn decompose_by_induction(
    phi: &MultiMapT,
    max_q: u64,
    max_rank: usize,
    budget: &Budget,
) -> Result<Option<RankCertificate>> {
    let parts = phi.primary_split();
    let mut terms: Vec<CertTerm> = Vec::new();
    for part in &parts {
        if part.is_zero {
            continue;
        }
        let Some(cert) = decompose_primary(&part.part, part.prime, max_q, max_rank, budget)?
        else {
            return Ok(None);
        };
        // pull the terms back along the primary projections
        for term in cert.terms {
            let left_homs: Vec<GroupHom> =
                term.i_axes.iter().map(|&i| part.projections[i].clone()).collect();
            let right_axes: Vec<usize> =
                (0..phi.arity()).filter(|i| !term.i_axes.contains(i)).collect();
            let right_homs: Vec<GroupHom> =
                right_axes.iter().map(|&i| part.projections[i].clone()).collect();
            terms.push(CertTerm {
                q: term.q,
                i_axes: term.i_axes,
                left: term.left.precompose(&left_homs)?,
                right: term.right.precompose(&right_homs)?,
            });
        }
    }
    let cert = RankCertificate { terms };
    match verify_certificate(phi, &cert)? {
        Verification::Verified => Ok(Some(cert)),
        Verification::Failed(w) => {
            Err(Error::invalid(format!("internal: induction pipeline produced a bad sum: {w}")))
        }
    }
}

fn quotient_with_lifts(
    g: &FinAbGroup,
    kernel_gens: &[GroupElement],
) -> Result<(FinAbGroup, GroupHom, Vec<GroupElement>)> {
    let (q, proj) = quotient(g, kernel_gens)?;
    let lifts = (0..q.rank())
        .map(|j| {
            let target = q.generator(j);
            g.elements().find(|x| proj.apply(x) == target).expect("projection is surjective")
        })
        .collect();
    Ok((q, proj, lifts))
}

fn decompose_primary(
    phi: &MultiMapT,
    p: u64,
    max_q: u64,
    max_rank: usize,
    budget: &Budget,
) -> Result<Option<RankCertificate>> {
    let k = phi.arity();
    if phi.is_zero() {
        return Ok(Some(RankCertificate::default()));
    }
    // pivot: first axis of exponent > p; none means elementary abelian
    let pivot = (0..k).find(|&i| phi.domains()[i].exponent() > p);
    let Some(pivot) = pivot else {
        return search_decomposition(phi, max_q, max_rank, budget);
    };
    if pivot != 0 {
        // move the pivot to the front, run the step, relabel the result
        let mut perm: Vec<usize> = vec![pivot];
        perm.extend((0..k).filter(|&i| i != pivot));
        let permuted = phi.permute_axes(&perm)?;
        let Some(cert) = decompose_primary(&permuted, p, max_q, max_rank, budget)? else {
            return Ok(None);
        };
        let mut relabeled = Vec::with_capacity(cert.terms.len());
        for term in cert.terms {
            relabeled.push(relabel_term(term, &perm)?);
        }
        return Ok(Some(RankCertificate { terms: relabeled }));
    }

    let a1 = phi.domains()[0].clone();
    let (_, incl) = times_p_subgroup(&a1, p);
    // φ_1 = φ restricted to pA_1 × A_[2,k]
    let mut homs = vec![incl];
    for g in &phi.domains()[1..] {
        homs.push(g.identity_hom());
    }
    let phi_1 = phi.precompose(&homs)?;

    // φ_1 factors through pA_1 × Π A_i/A_i[p]; build that quotient map
    let mut q_domains = vec![phi_1.domains()[0].clone()];
    let mut projections: Vec<GroupHom> = vec![phi_1.domains()[0].identity_hom()];
    let mut lifts: Vec<Vec<GroupElement>> =
        vec![(0..phi_1.domains()[0].rank()).map(|j| phi_1.domains()[0].generator(j)).collect()];
    for g in &phi.domains()[1..] {
        let (tor, tor_incl) = p_torsion(g, p);
        let gens: Vec<GroupElement> =
            (0..tor.rank()).map(|j| tor_incl.apply(&tor.generator(j))).collect();
        let (qg, proj, lift) = quotient_with_lifts(g, &gens)?;
        q_domains.push(qg);
        projections.push(proj);
        lifts.push(lift);
    }
    let q_shape = crate::map::TensorShape::of(&q_domains);
    let fe = phi_1.fast_eval();
    let mut q_tensor = Vec::with_capacity(q_shape.len());
    for idx in q_shape.indices() {
        let x: Vec<GroupElement> =
            idx.iter().enumerate().map(|(i, &j)| lifts[i][j].clone()).collect();
        q_tensor.push(fe.value(&x));
    }
    let phi_1_quot = MultiMapT::new(q_domains, q_tensor)?;

    // base decomposition of the quotient map by search
    let Some(base_cert) = search_decomposition(&phi_1_quot, max_q, max_rank, budget)? else {
        return Ok(None);
    };

    // pull back along the projections and extend each term
    let mut extended_terms: Vec<CertTerm> = Vec::new();
    let mut extended_sum = MultiMapT::zero(phi.domains().to_vec())?;
    for term in base_cert.terms {
        // normalize so axis 0 sits in the left block
        let (i_axes, left, right) = if term.i_axes.contains(&0) {
            (term.i_axes, term.left, term.right)
        } else {
            let comp: Vec<usize> = (0..k).filter(|i| !term.i_axes.contains(i)).collect();
            (comp, term.right, term.left)
        };
        let right_axes: Vec<usize> = (0..k).filter(|i| !i_axes.contains(i)).collect();
        let left_homs: Vec<GroupHom> =
            i_axes.iter().map(|&i| projections[i].clone()).collect();
        let right_homs: Vec<GroupHom> =
            right_axes.iter().map(|&i| projections[i].clone()).collect();
        let left = left.precompose(&left_homs)?;
        let right = right.precompose(&right_homs)?;
        let witness = RankOneWitness { q: term.q, i_axes, left, right };
        let phi_term = witness.composite(k)?;
        let (psi, new_witness) = extend_rank_one(&phi_term, &witness, &a1, p)?;
        extended_sum = extended_sum.add(&psi)?;
        extended_terms.push(CertTerm {
            q: new_witness.q,
            i_axes: new_witness.i_axes,
            left: new_witness.left,
            right: new_witness.right,
        });
    }

    // remainder factors through (A_1/pA_1) × A_[2,k]
    let phi_2 = phi.add(&extended_sum.negate())?;
    let p_gens: Vec<GroupElement> = {
        let (pa, pa_incl) = times_p_subgroup(&a1, p);
        (0..pa.rank()).map(|j| pa_incl.apply(&pa.generator(j))).collect()
    };
    let (q0, proj0, lifts0) = quotient_with_lifts(&a1, &p_gens)?;
    let mut rem_domains = vec![q0];
    rem_domains.extend_from_slice(&phi.domains()[1..]);
    let rem_shape = crate::map::TensorShape::of(&rem_domains);
    let fe2 = phi_2.fast_eval();
    let mut rem_tensor = Vec::with_capacity(rem_shape.len());
    for idx in rem_shape.indices() {
        let mut x: Vec<GroupElement> = Vec::with_capacity(k);
        x.push(lifts0[idx[0]].clone());
        for (pos, &j) in idx.iter().enumerate().skip(1) {
            x.push(phi.domains()[pos].generator(j));
        }
        rem_tensor.push(fe2.value(&x));
    }
    let phi_2_quot = MultiMapT::new(rem_domains, rem_tensor)?;
    let Some(rem_cert) = search_decomposition(&phi_2_quot, max_q, max_rank, budget)? else {
        return Ok(None);
    };
    for term in rem_cert.terms {
        // pull back to A_1 on axis 0, identity elsewhere
        let hom_for = |i: usize| -> GroupHom {
            if i == 0 {
                proj0.clone()
            } else {
                phi.domains()[i].identity_hom()
            }
        };
        let right_axes: Vec<usize> = (0..k).filter(|i| !term.i_axes.contains(i)).collect();
        let left_homs: Vec<GroupHom> = term.i_axes.iter().map(|&i| hom_for(i)).collect();
        let right_homs: Vec<GroupHom> = right_axes.iter().map(|&i| hom_for(i)).collect();
        extended_terms.push(CertTerm {
            q: term.q,
            i_axes: term.i_axes,
            left: term.left.precompose(&left_homs)?,
            right: term.right.precompose(&right_homs)?,
        });
    }
    Ok(Some(RankCertificate { terms: extended_terms }))
}

fn relabel_term(term: CertTerm, perm: &[usize]) -> Result<CertTerm> {
    // axis a of the permuted map is axis perm[a] of the original
    let relabel = |axes: &[usize]| -> (Vec<usize>, Vec<usize>) {
        let labels: Vec<usize> = axes.iter().map(|&a| perm[a]).collect();
        let mut order: Vec<usize> = (0..labels.len()).collect();
        order.sort_by_key(|&i| labels[i]);
        let sorted: Vec<usize> = order.iter().map(|&i| labels[i]).collect();
        (sorted, order)
    };
    let k = perm.len();
    let right_axes_old: Vec<usize> =
        (0..k).filter(|i| !term.i_axes.contains(i)).collect();
    let (new_i, left_order) = relabel(&term.i_axes);
    let (_, right_order) = relabel(&right_axes_old);
    Ok(CertTerm {
        q: term.q,
        i_axes: new_i,
        left: term.left.permute_axes(&left_order)?,
        right: term.right.permute_axes(&right_order)?,
    })
}
