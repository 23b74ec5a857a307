//! Multilinear and multiaffine maps.
//!
//! A k-linear map into the torus or into a finite abelian group is stored
//! as a dense tensor of values on generator tuples, in lexicographic
//! multi-index order (last axis fastest). The tensor determines the map by
//! multilinear extension, and the well-definedness condition is exactly
//! that each entry is killed by the order of every generator indexing it.
//!
//! Tensors are indexed by *generators*, not points: the structural
//! algorithms all operate on generator coefficients, and evaluation stays
//! cheap at the scales this crate targets.

use crate::group::{
    dual_group, pair, primary_component, quotient, FinAbGroup, GroupElement, GroupHom,
};
use crate::torus::TorusValue;
use crate::{Error, Result};
use num_integer::Integer;
use rand::Rng;
use std::collections::BTreeMap;

// ---------------------------------------------------------------------------
// tensor shapes
// ---------------------------------------------------------------------------

/// Dense lexicographic indexing over per-axis generator counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct TensorShape {
    pub counts: Vec<usize>,
}

impl TensorShape {
    pub fn of(domains: &[FinAbGroup]) -> Self {
        TensorShape { counts: domains.iter().map(|g| g.rank()).collect() }
    }

    pub fn len(&self) -> usize {
        self.counts.iter().product()
    }

    pub fn flat(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.counts.len());
        let mut out = 0usize;
        for (j, &c) in idx.iter().zip(&self.counts) {
            debug_assert!(*j < c);
            out = out * c + j;
        }
        out
    }

    /// All multi-indices in lexicographic order; empty if any axis has no
    /// generators.
    pub fn indices(&self) -> MultiIndexIter {
        let start = if self.counts.iter().any(|&c| c == 0) {
            None
        } else {
            Some(vec![0; self.counts.len()])
        };
        MultiIndexIter { counts: self.counts.clone(), next: start }
    }
}

pub(crate) struct MultiIndexIter {
    counts: Vec<usize>,
    next: Option<Vec<usize>>,
}

impl Iterator for MultiIndexIter {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let cur = self.next.take()?;
        let mut succ = cur.clone();
        let mut j = self.counts.len();
        loop {
            if j == 0 {
                self.next = None;
                break;
            }
            j -= 1;
            succ[j] += 1;
            if succ[j] < self.counts[j] {
                self.next = Some(succ);
                break;
            }
            succ[j] = 0;
        }
        Some(cur)
    }
}

/// Cartesian product of the domains, in lexicographic order.
pub fn domain_tuples(domains: &[FinAbGroup]) -> DomainTupleIter {
    let factors: Vec<Vec<u64>> = domains.iter().map(|g| g.factors().to_vec()).collect();
    DomainTupleIter { factors, next: Some(domains.iter().map(|g| g.zero()).collect()) }
}

pub struct DomainTupleIter {
    factors: Vec<Vec<u64>>,
    next: Option<Vec<GroupElement>>,
}

impl Iterator for DomainTupleIter {
    type Item = Vec<GroupElement>;

    fn next(&mut self) -> Option<Vec<GroupElement>> {
        let cur = self.next.take()?;
        let mut succ = cur.clone();
        'carry: {
            for i in (0..self.factors.len()).rev() {
                let coords = &mut succ[i].coords;
                for j in (0..coords.len()).rev() {
                    coords[j] += 1;
                    if coords[j] < self.factors[i][j] {
                        self.next = Some(succ);
                        break 'carry;
                    }
                    coords[j] = 0;
                }
            }
            self.next = None;
        }
        Some(cur)
    }
}

/// Total number of points of the product domain.
pub fn total_points(domains: &[FinAbGroup]) -> u128 {
    domains.iter().map(|g| g.order()).product()
}

// ---------------------------------------------------------------------------
// torus-valued multilinear maps
// ---------------------------------------------------------------------------

/// A multilinear map `A_1 × … × A_k → T`, k ≥ 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiMapT {
    domains: Vec<FinAbGroup>,
    tensor: Vec<TorusValue>,
}

impl MultiMapT {
    pub fn new(domains: Vec<FinAbGroup>, tensor: Vec<TorusValue>) -> Result<Self> {
        if domains.is_empty() {
            return Err(Error::invalid("multilinear map needs arity >= 1"));
        }
        let shape = TensorShape::of(&domains);
        if tensor.len() != shape.len() {
            return Err(Error::invalid(format!(
                "tensor has {} entries, expected {}",
                tensor.len(),
                shape.len()
            )));
        }
        for idx in shape.indices() {
            let entry = &tensor[shape.flat(&idx)];
            for (i, &j) in idx.iter().enumerate() {
                let order = domains[i].factors()[j];
                if !entry.scale_i128(order as i128).is_zero() {
                    return Err(Error::invalid(format!(
                        "entry {entry} at {idx:?} is not killed by generator order {order} (axis {i})"
                    )));
                }
            }
        }
        Ok(MultiMapT { domains, tensor })
    }

    pub fn zero(domains: Vec<FinAbGroup>) -> Result<Self> {
        let len = TensorShape::of(&domains).len();
        MultiMapT::new(domains, vec![TorusValue::zero(); len])
    }

    pub fn arity(&self) -> usize {
        self.domains.len()
    }

    pub fn domains(&self) -> &[FinAbGroup] {
        &self.domains
    }

    pub fn tensor(&self) -> &[TorusValue] {
        &self.tensor
    }

    pub(crate) fn shape(&self) -> TensorShape {
        TensorShape::of(&self.domains)
    }

    pub fn entry(&self, idx: &[usize]) -> &TorusValue {
        &self.tensor[self.shape().flat(idx)]
    }

    pub fn is_zero(&self) -> bool {
        self.tensor.iter().all(|t| t.is_zero())
    }

    /// The common torsion modulus: lcm of the entry denominators.
    pub(crate) fn torsion_modulus(&self) -> u64 {
        self.tensor.iter().fold(1u64, |acc, t| acc.lcm(&t.order().expect("desk-scale order")))
    }

    pub(crate) fn fast_eval(&self) -> FastEvalT {
        FastEvalT::of(self)
    }

    fn check_point(&self, x: &[GroupElement]) -> Result<()> {
        if x.len() != self.domains.len() {
            return Err(Error::invalid("arity mismatch in evaluation"));
        }
        for (i, (xi, g)) in x.iter().zip(&self.domains).enumerate() {
            if !g.contains(xi) {
                return Err(Error::invalid(format!("argument {i} is not an element of {g}")));
            }
        }
        Ok(())
    }

    /// Multilinear extension of the generator tensor.
    pub fn evaluate(&self, x: &[GroupElement]) -> Result<TorusValue> {
        self.check_point(x)?;
        Ok(self.fast_eval().value(x))
    }

    pub fn add(&self, other: &MultiMapT) -> Result<MultiMapT> {
        if self.domains != other.domains {
            return Err(Error::invalid("map addition requires identical domains"));
        }
        let tensor = self.tensor.iter().zip(&other.tensor).map(|(a, b)| a.add(b)).collect();
        MultiMapT::new(self.domains.clone(), tensor)
    }

    pub fn negate(&self) -> MultiMapT {
        let tensor = self.tensor.iter().map(|t| t.neg()).collect();
        MultiMapT { domains: self.domains.clone(), tensor }
    }

    /// Fixes the arguments in `axes` to `fixed` and returns the restricted
    /// map on the remaining axes. `axes` must be sorted, a strict subset.
    pub fn restrict_fix(&self, axes: &[usize], fixed: &[GroupElement]) -> Result<MultiMapT> {
        let k = self.arity();
        if axes.len() != fixed.len() {
            return Err(Error::invalid("restrict_fix: axes/values length mismatch"));
        }
        if axes.windows(2).any(|w| w[0] >= w[1]) || axes.iter().any(|&i| i >= k) {
            return Err(Error::invalid("restrict_fix: axes must be sorted and in range"));
        }
        if axes.len() == k {
            return Err(Error::invalid("restrict_fix: fixing every axis leaves no map"));
        }
        for (&i, a) in axes.iter().zip(fixed) {
            if !self.domains[i].contains(a) {
                return Err(Error::invalid(format!("restrict_fix: value for axis {i} not in domain")));
            }
        }
        let keep: Vec<usize> = (0..k).filter(|i| !axes.contains(i)).collect();
        let new_domains: Vec<FinAbGroup> = keep.iter().map(|&i| self.domains[i].clone()).collect();
        let new_shape = TensorShape::of(&new_domains);
        let e = self.torsion_modulus();
        let mut acc = vec![0u64; new_shape.len()];
        let shape = self.shape();
        for idx in shape.indices() {
            let num = scaled_numerator(&self.tensor[shape.flat(&idx)], e);
            if num == 0 {
                continue;
            }
            let mut coeff: u128 = num as u128;
            for (pos, &i) in axes.iter().enumerate() {
                coeff = coeff * (fixed[pos].coords[idx[i]] as u128) % e as u128;
            }
            if coeff == 0 {
                continue;
            }
            let sub: Vec<usize> = keep.iter().map(|&i| idx[i]).collect();
            let slot = new_shape.flat(&sub);
            acc[slot] = ((acc[slot] as u128 + coeff) % e as u128) as u64;
        }
        let tensor = acc
            .into_iter()
            .map(|n| TorusValue::new(n as i128, e as i128))
            .collect::<Result<_>>()?;
        MultiMapT::new(new_domains, tensor)
    }

    /// Precomposition with one homomorphism per axis: the pullback map on
    /// the homs' domains. With subgroup inclusions this is restriction.
    pub fn precompose(&self, homs: &[GroupHom]) -> Result<MultiMapT> {
        if homs.len() != self.arity() {
            return Err(Error::invalid("precompose: one homomorphism per axis required"));
        }
        for (i, h) in homs.iter().enumerate() {
            if h.codomain != self.domains[i] {
                return Err(Error::invalid(format!("precompose: codomain mismatch at axis {i}")));
            }
        }
        let new_domains: Vec<FinAbGroup> = homs.iter().map(|h| h.domain.clone()).collect();
        let new_shape = TensorShape::of(&new_domains);
        let fe = self.fast_eval();
        let mut tensor = Vec::with_capacity(new_shape.len());
        for idx in new_shape.indices() {
            let images: Vec<GroupElement> =
                idx.iter().enumerate().map(|(i, &j)| homs[i].images[j].clone()).collect();
            tensor.push(fe.value(&images));
        }
        MultiMapT::new(new_domains, tensor)
    }

    /// All `a ∈ A_i` whose restriction `φ_a` vanishes identically (tested
    /// on generators of the other axes, which suffices by linearity).
    pub fn kernel_subgroup(&self, axis: usize) -> Vec<GroupElement> {
        let fe = self.fast_eval();
        let gens: Vec<Vec<usize>> = {
            let counts: Vec<usize> = self
                .domains
                .iter()
                .enumerate()
                .map(|(i, g)| if i == axis { 1 } else { g.rank() })
                .collect();
            TensorShape { counts }.indices().collect()
        };
        self.domains[axis]
            .elements()
            .filter(|a| {
                gens.iter().all(|idx| {
                    let x: Vec<GroupElement> = idx
                        .iter()
                        .enumerate()
                        .map(|(i, &j)| {
                            if i == axis {
                                a.clone()
                            } else {
                                self.domains[i].generator(j)
                            }
                        })
                        .collect();
                    fe.value_num(&x) == 0
                })
            })
            .collect()
    }

    /// Quotients every axis by its kernel until the map is nondegenerate;
    /// returns the reduced map and the per-axis projections, so that
    /// `reduced ∘ projections = self` pointwise.
    pub fn nondegenerate_reduction(&self) -> Result<(MultiMapT, Vec<GroupHom>)> {
        let mut current = self.clone();
        let mut projections: Vec<GroupHom> =
            self.domains.iter().map(|g| g.identity_hom()).collect();
        loop {
            let kernels: Vec<Vec<GroupElement>> =
                (0..current.arity()).map(|i| current.kernel_subgroup(i)).collect();
            if kernels.iter().all(|k| k.len() == 1) {
                return Ok((current, projections));
            }
            let mut new_domains = Vec::with_capacity(current.arity());
            let mut steps = Vec::with_capacity(current.arity());
            for (i, k) in kernels.iter().enumerate() {
                let (q, proj) = quotient(&current.domains[i], k)?;
                new_domains.push(q);
                steps.push(proj);
            }
            // lift each quotient generator to evaluate the reduced tensor
            let lifts: Vec<Vec<GroupElement>> = steps
                .iter()
                .enumerate()
                .map(|(i, proj)| {
                    (0..new_domains[i].rank())
                        .map(|j| {
                            let target = new_domains[i].generator(j);
                            current.domains[i]
                                .elements()
                                .find(|x| proj.apply(x) == target)
                                .expect("projection is surjective")
                        })
                        .collect()
                })
                .collect();
            let fe = current.fast_eval();
            let new_shape = TensorShape::of(&new_domains);
            let mut tensor = Vec::with_capacity(new_shape.len());
            for idx in new_shape.indices() {
                let x: Vec<GroupElement> =
                    idx.iter().enumerate().map(|(i, &j)| lifts[i][j].clone()).collect();
                tensor.push(fe.value(&x));
            }
            current = MultiMapT::new(new_domains, tensor)?;
            projections =
                projections.iter().zip(&steps).map(|(old, step)| old.then(step)).collect();
        }
    }

    /// Splits the map along the primary decompositions of its domains.
    /// The parts satisfy `φ(x) = Σ_p φ_p(proj_p(x))` pointwise.
    pub fn primary_split(&self) -> Vec<PrimaryPart> {
        let mut primes: Vec<u64> = Vec::new();
        for g in &self.domains {
            for &f in g.factors() {
                let (p, _) = crate::group::prime_power_base(f).expect("canonical factor");
                if !primes.contains(&p) {
                    primes.push(p);
                }
            }
        }
        primes.sort_unstable();
        primes
            .into_iter()
            .map(|p| {
                let mut embeddings = Vec::new();
                let mut projections = Vec::new();
                for g in &self.domains {
                    let (_, emb, proj) = primary_component(g, p);
                    embeddings.push(emb);
                    projections.push(proj);
                }
                let part = self.precompose(&embeddings).expect("embeddings match domains");
                let is_zero = part.is_zero();
                PrimaryPart { prime: p, part, projections, is_zero }
            })
            .collect()
    }

    /// The largest entry order. Entries are values of the map on generator
    /// tuples, so this is the largest prime-power order of an element of
    /// the image.
    pub fn max_entry_order(&self) -> u64 {
        self.tensor.iter().map(|t| t.order().expect("desk-scale order")).max().unwrap_or(1)
    }

    /// Reorders the axes: new axis `i` is old axis `perm[i]`.
    pub fn permute_axes(&self, perm: &[usize]) -> Result<MultiMapT> {
        check_permutation(perm, self.arity())?;
        let new_domains: Vec<FinAbGroup> =
            perm.iter().map(|&i| self.domains[i].clone()).collect();
        let new_shape = TensorShape::of(&new_domains);
        let shape = self.shape();
        let mut tensor = Vec::with_capacity(new_shape.len());
        for idx in new_shape.indices() {
            let mut old = vec![0usize; self.arity()];
            for (pos, &axis) in perm.iter().enumerate() {
                old[axis] = idx[pos];
            }
            tensor.push(self.tensor[shape.flat(&old)].clone());
        }
        MultiMapT::new(new_domains, tensor)
    }
}

fn check_permutation(perm: &[usize], k: usize) -> Result<()> {
    let mut seen = vec![false; k];
    if perm.len() != k {
        return Err(Error::invalid("permutation length mismatch"));
    }
    for &i in perm {
        if i >= k || seen[i] {
            return Err(Error::invalid("not a permutation of the axes"));
        }
        seen[i] = true;
    }
    Ok(())
}

/// One p-primary part of a torus-valued map.
#[derive(Debug, Clone)]
pub struct PrimaryPart {
    pub prime: u64,
    pub part: MultiMapT,
    pub projections: Vec<GroupHom>,
    pub is_zero: bool,
}

fn scaled_numerator(t: &TorusValue, e: u64) -> u64 {
    let den = t.order().expect("desk-scale order");
    debug_assert_eq!(e % den, 0);
    let num: u64 = t.numer().try_into().expect("reduced numerator fits u64");
    num * (e / den)
}

/// Shared fast evaluator: all entries over the common torsion modulus E,
/// contraction in machine arithmetic mod E.
pub(crate) struct FastEvalT {
    modulus: u64,
    scaled: Vec<u64>,
    counts: Vec<usize>,
}

impl FastEvalT {
    fn of(map: &MultiMapT) -> FastEvalT {
        let e = map.torsion_modulus();
        FastEvalT {
            modulus: e,
            scaled: map.tensor.iter().map(|t| scaled_numerator(t, e)).collect(),
            counts: map.domains.iter().map(|g| g.rank()).collect(),
        }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// The numerator of φ(x) over the common modulus.
    pub fn value_num(&self, x: &[GroupElement]) -> u64 {
        if self.scaled.is_empty() {
            return 0;
        }
        let e = self.modulus as u128;
        let mut acc: u128 = 0;
        let mut idx = vec![0usize; self.counts.len()];
        let mut flat = 0usize;
        loop {
            let num = self.scaled[flat];
            if num != 0 {
                let mut coeff: u128 = num as u128;
                for (i, &j) in idx.iter().enumerate() {
                    coeff = coeff * (x[i].coords[j] as u128) % e;
                    if coeff == 0 {
                        break;
                    }
                }
                acc = (acc + coeff) % e;
            }
            // odometer
            let mut i = self.counts.len();
            loop {
                if i == 0 {
                    return acc as u64;
                }
                i -= 1;
                idx[i] += 1;
                if idx[i] < self.counts[i] {
                    break;
                }
                idx[i] = 0;
            }
            flat = 0;
            for (i, &j) in idx.iter().enumerate() {
                flat = flat * self.counts[i] + j;
            }
        }
    }

    pub fn value(&self, x: &[GroupElement]) -> TorusValue {
        TorusValue::new(self.value_num(x) as i128, self.modulus as i128)
            .expect("modulus is positive")
    }
}

/// The standard multiplication pairing `m_q(x, y) = xy/q mod 1` on
/// `(Z/q)²`, for `q` a prime power.
pub fn m_q(q: u64) -> Result<MultiMapT> {
    if crate::group::prime_power_base(q).is_none() {
        return Err(Error::invalid(format!("m_q requires a prime power, got {q}")));
    }
    let g = FinAbGroup::cyclic(q)?;
    MultiMapT::new(vec![g.clone(), g], vec![TorusValue::new(1, q as i128)?])
}

// ---------------------------------------------------------------------------
// group-valued multilinear maps
// ---------------------------------------------------------------------------

/// A multilinear map `A_1 × … × A_k → B` into a finite abelian group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiMapG {
    domains: Vec<FinAbGroup>,
    codomain: FinAbGroup,
    tensor: Vec<GroupElement>,
}

impl MultiMapG {
    pub fn new(
        domains: Vec<FinAbGroup>,
        codomain: FinAbGroup,
        tensor: Vec<GroupElement>,
    ) -> Result<Self> {
        if domains.is_empty() {
            return Err(Error::invalid("multilinear map needs arity >= 1"));
        }
        let shape = TensorShape::of(&domains);
        if tensor.len() != shape.len() {
            return Err(Error::invalid(format!(
                "tensor has {} entries, expected {}",
                tensor.len(),
                shape.len()
            )));
        }
        for idx in shape.indices() {
            let entry = &tensor[shape.flat(&idx)];
            if !codomain.contains(entry) {
                return Err(Error::invalid(format!("entry at {idx:?} is not in the codomain")));
            }
            for (i, &j) in idx.iter().enumerate() {
                let order = domains[i].factors()[j];
                if !codomain.is_zero(&codomain.scale(order as i128, entry)) {
                    return Err(Error::invalid(format!(
                        "entry at {idx:?} is not killed by generator order {order} (axis {i})"
                    )));
                }
            }
        }
        Ok(MultiMapG { domains, codomain, tensor })
    }

    pub fn zero(domains: Vec<FinAbGroup>, codomain: FinAbGroup) -> Result<Self> {
        let len = TensorShape::of(&domains).len();
        let z = codomain.zero();
        MultiMapG::new(domains, codomain, vec![z; len])
    }

    pub fn arity(&self) -> usize {
        self.domains.len()
    }

    pub fn domains(&self) -> &[FinAbGroup] {
        &self.domains
    }

    pub fn codomain(&self) -> &FinAbGroup {
        &self.codomain
    }

    pub fn tensor(&self) -> &[GroupElement] {
        &self.tensor
    }

    pub(crate) fn shape(&self) -> TensorShape {
        TensorShape::of(&self.domains)
    }

    pub fn entry(&self, idx: &[usize]) -> &GroupElement {
        &self.tensor[self.shape().flat(idx)]
    }

    pub fn is_zero(&self) -> bool {
        self.tensor.iter().all(|t| self.codomain.is_zero(t))
    }

    pub fn evaluate(&self, x: &[GroupElement]) -> Result<GroupElement> {
        if x.len() != self.domains.len() {
            return Err(Error::invalid("arity mismatch in evaluation"));
        }
        for (i, (xi, g)) in x.iter().zip(&self.domains).enumerate() {
            if !g.contains(xi) {
                return Err(Error::invalid(format!("argument {i} is not an element of {g}")));
            }
        }
        let exp = self.codomain.exponent().max(1) as u128;
        let shape = self.shape();
        let mut acc = self.codomain.zero();
        for idx in shape.indices() {
            let entry = &self.tensor[shape.flat(&idx)];
            if self.codomain.is_zero(entry) {
                continue;
            }
            let mut coeff: u128 = 1;
            for (i, &j) in idx.iter().enumerate() {
                coeff = coeff * (x[i].coords[j] as u128) % exp;
                if coeff == 0 {
                    break;
                }
            }
            if coeff != 0 {
                acc = self.codomain.add(&acc, &self.codomain.scale(coeff as i128, entry));
            }
        }
        Ok(acc)
    }

    pub fn add(&self, other: &MultiMapG) -> Result<MultiMapG> {
        if self.domains != other.domains || self.codomain != other.codomain {
            return Err(Error::invalid("map addition requires identical shapes"));
        }
        let tensor = self
            .tensor
            .iter()
            .zip(&other.tensor)
            .map(|(a, b)| self.codomain.add(a, b))
            .collect();
        MultiMapG::new(self.domains.clone(), self.codomain.clone(), tensor)
    }

    pub fn negate(&self) -> MultiMapG {
        let tensor = self.tensor.iter().map(|t| self.codomain.neg(t)).collect();
        MultiMapG { domains: self.domains.clone(), codomain: self.codomain.clone(), tensor }
    }

    pub fn precompose(&self, homs: &[GroupHom]) -> Result<MultiMapG> {
        if homs.len() != self.arity() {
            return Err(Error::invalid("precompose: one homomorphism per axis required"));
        }
        for (i, h) in homs.iter().enumerate() {
            if h.codomain != self.domains[i] {
                return Err(Error::invalid(format!("precompose: codomain mismatch at axis {i}")));
            }
        }
        let new_domains: Vec<FinAbGroup> = homs.iter().map(|h| h.domain.clone()).collect();
        let new_shape = TensorShape::of(&new_domains);
        let mut tensor = Vec::with_capacity(new_shape.len());
        for idx in new_shape.indices() {
            let images: Vec<GroupElement> =
                idx.iter().enumerate().map(|(i, &j)| homs[i].images[j].clone()).collect();
            tensor.push(self.evaluate(&images)?);
        }
        MultiMapG::new(new_domains, self.codomain.clone(), tensor)
    }

    /// Postcomposition with a homomorphism out of the codomain.
    pub fn postcompose(&self, h: &GroupHom) -> Result<MultiMapG> {
        if h.domain != self.codomain {
            return Err(Error::invalid("postcompose: domain must match codomain"));
        }
        let tensor = self.tensor.iter().map(|t| h.apply(t)).collect();
        MultiMapG::new(self.domains.clone(), h.codomain.clone(), tensor)
    }

    /// Reorders the axes: new axis `i` is old axis `perm[i]`.
    pub fn permute_axes(&self, perm: &[usize]) -> Result<MultiMapG> {
        check_permutation(perm, self.arity())?;
        let new_domains: Vec<FinAbGroup> =
            perm.iter().map(|&i| self.domains[i].clone()).collect();
        let new_shape = TensorShape::of(&new_domains);
        let shape = self.shape();
        let mut tensor = Vec::with_capacity(new_shape.len());
        for idx in new_shape.indices() {
            let mut old = vec![0usize; self.arity()];
            for (pos, &axis) in perm.iter().enumerate() {
                old[axis] = idx[pos];
            }
            tensor.push(self.tensor[shape.flat(&old)].clone());
        }
        MultiMapG::new(new_domains, self.codomain.clone(), tensor)
    }
}

// ---------------------------------------------------------------------------
// duality: group-valued maps as torus-valued maps with a dual axis
// ---------------------------------------------------------------------------

/// Converts `F : A_[k−1] → B` into `φ(x, χ) = ⟨χ, F(x)⟩` on
/// `A_[k−1] × dual(B)`.
pub fn from_group_map(f: &MultiMapG) -> Result<MultiMapT> {
    let b = f.codomain();
    let dual = dual_group(b);
    let mut domains = f.domains().to_vec();
    domains.push(dual.clone());
    let shape = TensorShape::of(&domains);
    let f_shape = f.shape();
    let mut tensor = vec![TorusValue::zero(); shape.len()];
    for idx in f_shape.indices() {
        let val = f.entry(&idx);
        for c in 0..dual.rank() {
            let mut full = idx.clone();
            full.push(c);
            tensor[shape.flat(&full)] =
                pair(b, &dual.generator(c), val).expect("matching factor lists");
        }
    }
    MultiMapT::new(domains, tensor)
}

/// Inverse translation: reads the chosen axis as the dual of `B` (the
/// group with the same factor list) and recovers `F` with
/// `φ(x, χ) = ⟨χ, F(x)⟩`.
pub fn to_group_map(phi: &MultiMapT, axis: usize) -> Result<MultiMapG> {
    let k = phi.arity();
    if axis >= k {
        return Err(Error::invalid("to_group_map: axis out of range"));
    }
    if k == 1 {
        return Err(Error::invalid("to_group_map: need at least one non-dual axis"));
    }
    let b = phi.domains()[axis].clone();
    let keep: Vec<usize> = (0..k).filter(|&i| i != axis).collect();
    let new_domains: Vec<FinAbGroup> = keep.iter().map(|&i| phi.domains()[i].clone()).collect();
    let new_shape = TensorShape::of(&new_domains);
    let shape = phi.shape();
    let mut tensor = Vec::with_capacity(new_shape.len());
    for idx in new_shape.indices() {
        let mut coords = Vec::with_capacity(b.rank());
        for c in 0..b.rank() {
            let mut full = vec![0usize; k];
            for (pos, &i) in keep.iter().enumerate() {
                full[i] = idx[pos];
            }
            full[axis] = c;
            let t = &phi.tensor()[shape.flat(&full)];
            // t = coord / f_c with den | f_c
            let f_c = b.factors()[c];
            let den = t.order().expect("desk-scale order");
            let num: u64 = t.numer().try_into().expect("reduced numerator fits u64");
            coords.push(num * (f_c / den) % f_c);
        }
        tensor.push(GroupElement { coords });
    }
    MultiMapG::new(new_domains, b, tensor)
}

// ---------------------------------------------------------------------------
// composition through a partition
// ---------------------------------------------------------------------------

/// An ordered set partition of the axis set `[k]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    pub blocks: Vec<Vec<usize>>,
}

impl Partition {
    pub fn new(blocks: Vec<Vec<usize>>, k: usize) -> Result<Self> {
        let mut seen = vec![false; k];
        for block in &blocks {
            if block.is_empty() {
                return Err(Error::invalid("partition blocks must be nonempty"));
            }
            if block.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::invalid("partition blocks must be sorted"));
            }
            for &i in block {
                if i >= k || seen[i] {
                    return Err(Error::invalid("partition blocks must be disjoint and in range"));
                }
                seen[i] = true;
            }
        }
        if !seen.iter().all(|&s| s) {
            return Err(Error::invalid("partition must cover every axis"));
        }
        Ok(Partition { blocks })
    }

    /// The two-block partition `(I, I^c)` of `[k]`.
    pub fn two_block(i_axes: &[usize], k: usize) -> Result<Self> {
        let comp: Vec<usize> = (0..k).filter(|i| !i_axes.contains(i)).collect();
        Partition::new(vec![i_axes.to_vec(), comp], k)
    }
}

/// `ψ(φ_{I_1}, …, φ_{I_l})`: the k-linear composite of an l-linear outer
/// map with one multilinear factor per block.
pub fn compose_through(
    psi: &MultiMapT,
    partition: &Partition,
    factors: &[MultiMapG],
) -> Result<MultiMapT> {
    if factors.len() != partition.blocks.len() || psi.arity() != factors.len() {
        return Err(Error::invalid("compose_through: block/factor count mismatch"));
    }
    for (j, f) in factors.iter().enumerate() {
        if psi.domains()[j] != *f.codomain() {
            return Err(Error::invalid(format!(
                "compose_through: factor {j} codomain does not match outer domain"
            )));
        }
        if f.arity() != partition.blocks[j].len() {
            return Err(Error::invalid(format!("compose_through: factor {j} arity mismatch")));
        }
    }
    let k: usize = partition.blocks.iter().map(|b| b.len()).sum();
    let mut domains: Vec<Option<FinAbGroup>> = vec![None; k];
    for (j, block) in partition.blocks.iter().enumerate() {
        for (pos, &axis) in block.iter().enumerate() {
            domains[axis] = Some(factors[j].domains()[pos].clone());
        }
    }
    let domains: Vec<FinAbGroup> = domains.into_iter().map(|d| d.expect("covered")).collect();
    let shape = TensorShape::of(&domains);
    let psi_fe = psi.fast_eval();
    let mut tensor = Vec::with_capacity(shape.len());
    for idx in shape.indices() {
        // each factor evaluated at a generator tuple is a tensor entry
        let args: Vec<GroupElement> = partition
            .blocks
            .iter()
            .zip(factors)
            .map(|(block, f)| {
                let sub: Vec<usize> = block.iter().map(|&axis| idx[axis]).collect();
                f.entry(&sub).clone()
            })
            .collect();
        tensor.push(psi_fe.value(&args));
    }
    MultiMapT::new(domains, tensor)
}

/// Group-codomain analogue: `G(g(x_I), x_rest)` assembled as one
/// multilinear map on the full axis list.
pub fn compose_through_g(
    outer: &MultiMapG,
    partition: &Partition,
    factors: &[MultiMapG],
) -> Result<MultiMapG> {
    if factors.len() != partition.blocks.len() || outer.arity() != factors.len() {
        return Err(Error::invalid("compose_through_g: block/factor count mismatch"));
    }
    for (j, f) in factors.iter().enumerate() {
        if outer.domains()[j] != *f.codomain() {
            return Err(Error::invalid(format!(
                "compose_through_g: factor {j} codomain does not match outer domain"
            )));
        }
        if f.arity() != partition.blocks[j].len() {
            return Err(Error::invalid(format!("compose_through_g: factor {j} arity mismatch")));
        }
    }
    let k: usize = partition.blocks.iter().map(|b| b.len()).sum();
    let mut domains: Vec<Option<FinAbGroup>> = vec![None; k];
    for (j, block) in partition.blocks.iter().enumerate() {
        for (pos, &axis) in block.iter().enumerate() {
            domains[axis] = Some(factors[j].domains()[pos].clone());
        }
    }
    let domains: Vec<FinAbGroup> = domains.into_iter().map(|d| d.expect("covered")).collect();
    let shape = TensorShape::of(&domains);
    let mut tensor = Vec::with_capacity(shape.len());
    for idx in shape.indices() {
        let args: Vec<GroupElement> = partition
            .blocks
            .iter()
            .zip(factors)
            .map(|(block, f)| {
                let sub: Vec<usize> = block.iter().map(|&axis| idx[axis]).collect();
                f.entry(&sub).clone()
            })
            .collect();
        tensor.push(outer.evaluate(&args)?);
    }
    MultiMapG::new(domains, outer.codomain().clone(), tensor)
}

// ---------------------------------------------------------------------------
// multiaffine maps
// ---------------------------------------------------------------------------

/// A multiaffine map with zero constant term: a sum `Σ_I φ_I(x_I)` over
/// nonempty subsets `I ⊆ [k]`, each `φ_I` multilinear on `A_I`.
/// Subsets are keyed by bitmask.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiAffine {
    domains: Vec<FinAbGroup>,
    terms: BTreeMap<u32, MultiMapT>,
}

impl MultiAffine {
    pub fn new(domains: Vec<FinAbGroup>, terms: BTreeMap<u32, MultiMapT>) -> Result<Self> {
        if domains.is_empty() {
            return Err(Error::invalid("multiaffine map needs arity >= 1"));
        }
        if domains.len() > 30 {
            return Err(Error::invalid("arity too large for subset masks"));
        }
        for (&mask, term) in &terms {
            if mask == 0 {
                return Err(Error::invalid("constant terms are fixed to zero"));
            }
            if mask >= 1u32 << domains.len() {
                return Err(Error::invalid("term subset out of range"));
            }
            let axes = mask_axes(mask);
            let expect: Vec<FinAbGroup> = axes.iter().map(|&i| domains[i].clone()).collect();
            if term.domains() != expect.as_slice() {
                return Err(Error::invalid(format!(
                    "term for subset {axes:?} has mismatched domains"
                )));
            }
        }
        Ok(MultiAffine { domains, terms })
    }

    pub fn from_linear(map: MultiMapT) -> Self {
        let domains = map.domains().to_vec();
        let mask = (1u32 << domains.len()) - 1;
        let mut terms = BTreeMap::new();
        if !map.is_zero() {
            terms.insert(mask, map);
        }
        MultiAffine { domains, terms }
    }

    pub fn arity(&self) -> usize {
        self.domains.len()
    }

    pub fn domains(&self) -> &[FinAbGroup] {
        &self.domains
    }

    pub fn terms(&self) -> &BTreeMap<u32, MultiMapT> {
        &self.terms
    }

    /// The term attached to a subset, if present and nonzero.
    pub fn term(&self, mask: u32) -> Option<&MultiMapT> {
        self.terms.get(&mask).filter(|t| !t.is_zero())
    }

    /// Largest |I| with a nontrivial term; 0 for the zero map.
    pub fn degree(&self) -> u32 {
        self.terms
            .iter()
            .filter(|(_, t)| !t.is_zero())
            .map(|(&m, _)| m.count_ones())
            .max()
            .unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.values().all(|t| t.is_zero())
    }

    pub fn evaluate(&self, x: &[GroupElement]) -> Result<TorusValue> {
        if x.len() != self.domains.len() {
            return Err(Error::invalid("arity mismatch in evaluation"));
        }
        let mut acc = TorusValue::zero();
        for (&mask, term) in &self.terms {
            let sub: Vec<GroupElement> = mask_axes(mask).iter().map(|&i| x[i].clone()).collect();
            acc = acc.add(&term.evaluate(&sub)?);
        }
        Ok(acc)
    }
}

/// The sorted axis list of a subset bitmask.
pub fn mask_axes(mask: u32) -> Vec<usize> {
    (0..32).filter(|i| mask & (1 << i) != 0).collect()
}

// ---------------------------------------------------------------------------
// seeded random maps
// ---------------------------------------------------------------------------

/// Uniformly random admissible torus-valued tensor: each entry uniform
/// over the torsion subgroup its generator orders allow.
pub fn random_map_t<R: Rng>(domains: &[FinAbGroup], rng: &mut R) -> MultiMapT {
    let shape = TensorShape::of(domains);
    let mut tensor = Vec::with_capacity(shape.len());
    for idx in shape.indices() {
        let g = idx
            .iter()
            .enumerate()
            .fold(0u64, |acc, (i, &j)| acc.gcd(&domains[i].factors()[j]));
        let num = rng.gen_range(0..g);
        tensor.push(TorusValue::new(num as i128, g as i128).expect("g >= 1"));
    }
    MultiMapT::new(domains.to_vec(), tensor).expect("construction is admissible")
}

/// Uniformly random admissible group-valued tensor.
pub fn random_map_g<R: Rng>(
    domains: &[FinAbGroup],
    codomain: &FinAbGroup,
    rng: &mut R,
) -> MultiMapG {
    let shape = TensorShape::of(domains);
    let mut tensor = Vec::with_capacity(shape.len());
    for idx in shape.indices() {
        let g = idx
            .iter()
            .enumerate()
            .fold(0u64, |acc, (i, &j)| acc.gcd(&domains[i].factors()[j]));
        let coords = codomain
            .factors()
            .iter()
            .map(|&m| {
                let allowed = m.gcd(&g);
                (m / allowed) * rng.gen_range(0..allowed)
            })
            .collect();
        tensor.push(GroupElement { coords });
    }
    MultiMapG::new(domains.to_vec(), codomain.clone(), tensor).expect("construction is admissible")
}

/// Uniformly random multiaffine map with terms drawn for every nonempty
/// subset of size ≤ max_degree.
pub fn random_affine<R: Rng>(domains: &[FinAbGroup], max_degree: u32, rng: &mut R) -> MultiAffine {
    let k = domains.len();
    let mut terms = BTreeMap::new();
    for mask in 1u32..(1 << k) {
        if mask.count_ones() > max_degree {
            continue;
        }
        let sub: Vec<FinAbGroup> = mask_axes(mask).iter().map(|&i| domains[i].clone()).collect();
        let term = random_map_t(&sub, rng);
        if !term.is_zero() {
            terms.insert(mask, term);
        }
    }
    MultiAffine::new(domains.to_vec(), terms).expect("terms built on matching domains")
}
