//! Finite abelian groups in prime-power canonical form.
//!
//! Every group is stored as an ordered list of cyclic factors, each of
//! prime-power order, sorted by prime and then by ascending exponent.
//! The trivial group is the empty list. Keeping groups canonical makes
//! the structural reductions (primary splitting, exponent extraction,
//! p-torsion, quotients) index arithmetic instead of structure discovery.

use crate::torus::TorusValue;
use crate::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// A finite abelian group `⊕_j Z/factors[j]`, each factor a prime power ≥ 2.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FinAbGroup {
    factors: Vec<u64>,
}

/// An element of a [`FinAbGroup`], one reduced residue per factor.
///
/// Elements do not carry a back-pointer to their group; operations that
/// need the factor list take the group as an argument.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement {
    pub coords: Vec<u64>,
}

/// A homomorphism between two groups, given by the image of each
/// generator of the domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupHom {
    pub domain: FinAbGroup,
    pub codomain: FinAbGroup,
    pub images: Vec<GroupElement>,
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Splits `n ≥ 1` into prime-power parts `(p, p^a)`.
pub fn prime_power_parts(n: u64) -> Vec<(u64, u64)> {
    let mut parts = Vec::new();
    let mut m = n;
    let mut p = 2u64;
    while p * p <= m {
        if m % p == 0 {
            let mut q = 1u64;
            while m % p == 0 {
                m /= p;
                q *= p;
            }
            parts.push((p, q));
        }
        p += 1;
    }
    if m > 1 {
        parts.push((m, m));
    }
    parts
}

/// The prime `p` with `n = p^a`, if `n` is a prime power ≥ 2.
pub fn prime_power_base(n: u64) -> Option<(u64, u32)> {
    let parts = prime_power_parts(n);
    match parts.as_slice() {
        [(p, q)] if *q == n => Some((*p, n.ilog(*p))),
        _ => None,
    }
}

impl FinAbGroup {
    /// Builds the canonical form of `⊕ Z/orders[i]`: each order is split
    /// into coprime prime-power factors, order-1 entries are dropped, and
    /// the factor list is sorted by prime then ascending exponent.
    pub fn new(orders: &[u64]) -> Result<Self> {
        let mut factors = Vec::new();
        for &o in orders {
            if o == 0 {
                return Err(Error::invalid("group order must be >= 1"));
            }
            for (_, q) in prime_power_parts(o) {
                factors.push(q);
            }
        }
        factors.sort_by_key(|&q| {
            let (p, _) = prime_power_base(q).expect("factor is a prime power");
            (p, q)
        });
        Ok(FinAbGroup { factors })
    }

    pub fn trivial() -> Self {
        FinAbGroup { factors: Vec::new() }
    }

    pub fn cyclic(order: u64) -> Result<Self> {
        FinAbGroup::new(&[order])
    }

    pub fn factors(&self) -> &[u64] {
        &self.factors
    }

    /// Number of generators (cyclic factors).
    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.factors.is_empty()
    }

    /// |A| = product of the factors.
    pub fn order(&self) -> u128 {
        self.factors.iter().map(|&f| f as u128).product()
    }

    /// lcm of the factors (1 for the trivial group).
    pub fn exponent(&self) -> u64 {
        self.factors.iter().fold(1u64, |acc, &f| acc.lcm(&f))
    }

    pub fn zero(&self) -> GroupElement {
        GroupElement { coords: vec![0; self.factors.len()] }
    }

    /// The `j`-th standard generator.
    pub fn generator(&self, j: usize) -> GroupElement {
        let mut coords = vec![0; self.factors.len()];
        coords[j] = 1;
        GroupElement { coords }
    }

    pub fn contains(&self, x: &GroupElement) -> bool {
        x.coords.len() == self.factors.len()
            && x.coords.iter().zip(&self.factors).all(|(&c, &f)| c < f)
    }

    pub fn element(&self, coords: &[u64]) -> GroupElement {
        assert_eq!(coords.len(), self.factors.len(), "coordinate count mismatch");
        let coords = coords.iter().zip(&self.factors).map(|(&c, &f)| c % f).collect();
        GroupElement { coords }
    }

    pub fn add(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        let coords = a
            .coords
            .iter()
            .zip(&b.coords)
            .zip(&self.factors)
            .map(|((&x, &y), &f)| (x + y) % f)
            .collect();
        GroupElement { coords }
    }

    pub fn neg(&self, a: &GroupElement) -> GroupElement {
        let coords = a
            .coords
            .iter()
            .zip(&self.factors)
            .map(|(&x, &f)| if x == 0 { 0 } else { f - x })
            .collect();
        GroupElement { coords }
    }

    pub fn sub(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        self.add(a, &self.neg(b))
    }

    /// `n·a` for any signed integer `n`.
    pub fn scale(&self, n: i128, a: &GroupElement) -> GroupElement {
        let coords = a
            .coords
            .iter()
            .zip(&self.factors)
            .map(|(&x, &f)| {
                let m = n.rem_euclid(f as i128) as u128;
                ((m * x as u128) % f as u128) as u64
            })
            .collect();
        GroupElement { coords }
    }

    /// `n·a` with a big-integer multiplier.
    pub fn scale_big(&self, n: &BigInt, a: &GroupElement) -> GroupElement {
        let coords = a
            .coords
            .iter()
            .zip(&self.factors)
            .map(|(&x, &f)| {
                let m = n.mod_floor(&BigInt::from(f));
                let m: u64 = (&m).try_into().expect("residue fits u64");
                ((m as u128 * x as u128) % f as u128) as u64
            })
            .collect();
        GroupElement { coords }
    }

    pub fn is_zero(&self, a: &GroupElement) -> bool {
        a.coords.iter().all(|&c| c == 0)
    }

    /// Additive order of `a`: lcm over coordinates of `f_j / gcd(f_j, a_j)`.
    pub fn element_order(&self, a: &GroupElement) -> u64 {
        a.coords
            .iter()
            .zip(&self.factors)
            .fold(1u64, |acc, (&c, &f)| acc.lcm(&(f / f.gcd(&c))))
    }

    /// All |A| elements in lexicographic coordinate order, starting from 0.
    pub fn elements(&self) -> ElementIter {
        ElementIter { factors: self.factors.clone(), next: Some(vec![0; self.factors.len()]) }
    }

    pub fn identity_hom(&self) -> GroupHom {
        let images = (0..self.rank()).map(|j| self.generator(j)).collect();
        GroupHom { domain: self.clone(), codomain: self.clone(), images }
    }
}

impl std::fmt::Display for FinAbGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.factors.iter().map(|q| format!("Z/{q}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Lexicographic element iterator; the leftmost coordinate is most
/// significant. The trivial group yields the single empty tuple.
pub struct ElementIter {
    factors: Vec<u64>,
    next: Option<Vec<u64>>,
}

impl Iterator for ElementIter {
    type Item = GroupElement;

    fn next(&mut self) -> Option<GroupElement> {
        let cur = self.next.take()?;
        let mut succ = cur.clone();
        let mut j = self.factors.len();
        loop {
            if j == 0 {
                self.next = None;
                break;
            }
            j -= 1;
            succ[j] += 1;
            if succ[j] < self.factors[j] {
                self.next = Some(succ);
                break;
            }
            succ[j] = 0;
        }
        Some(GroupElement { coords: cur })
    }
}

impl GroupHom {
    /// Checks that each generator's order annihilates its image.
    pub fn validate(&self) -> Result<()> {
        if self.images.len() != self.domain.rank() {
            return Err(Error::invalid("homomorphism image count mismatch"));
        }
        for (j, img) in self.images.iter().enumerate() {
            if !self.codomain.contains(img) {
                return Err(Error::invalid(format!("image of generator {j} not in codomain")));
            }
            let killed = self.codomain.scale(self.domain.factors[j] as i128, img);
            if !self.codomain.is_zero(&killed) {
                return Err(Error::invalid(format!(
                    "generator {j} of order {} maps to an element not killed by it",
                    self.domain.factors[j]
                )));
            }
        }
        Ok(())
    }

    pub fn apply(&self, x: &GroupElement) -> GroupElement {
        debug_assert!(self.domain.contains(x));
        let mut acc = self.codomain.zero();
        for (j, &c) in x.coords.iter().enumerate() {
            if c != 0 {
                acc = self.codomain.add(&acc, &self.codomain.scale(c as i128, &self.images[j]));
            }
        }
        acc
    }

    /// `other ∘ self` (apply `self` first).
    pub fn then(&self, other: &GroupHom) -> GroupHom {
        assert_eq!(self.codomain, other.domain, "composition domain mismatch");
        let images = self.images.iter().map(|img| other.apply(img)).collect();
        GroupHom { domain: self.domain.clone(), codomain: other.codomain.clone(), images }
    }

    pub fn is_identity(&self) -> bool {
        self.domain == self.codomain
            && self.images.iter().enumerate().all(|(j, img)| *img == self.domain.generator(j))
    }
}

/// The p-primary part `A^(p)` with its inclusion into `A` and the
/// projection `A → A^(p)`; projection ∘ inclusion is the identity.
pub fn primary_component(a: &FinAbGroup, p: u64) -> (FinAbGroup, GroupHom, GroupHom) {
    assert!(is_prime(p), "p must be prime");
    let idx: Vec<usize> = a
        .factors
        .iter()
        .enumerate()
        .filter(|(_, &f)| f % p == 0)
        .map(|(j, _)| j)
        .collect();
    let part = FinAbGroup { factors: idx.iter().map(|&j| a.factors[j]).collect() };
    let emb_images = idx.iter().map(|&j| a.generator(j)).collect();
    let embedding = GroupHom { domain: part.clone(), codomain: a.clone(), images: emb_images };
    let proj_images = (0..a.rank())
        .map(|j| match idx.iter().position(|&i| i == j) {
            Some(m) => part.generator(m),
            None => part.zero(),
        })
        .collect();
    let projection = GroupHom { domain: a.clone(), codomain: part.clone(), images: proj_images };
    (part, embedding, projection)
}

/// The subgroup `pA = {px : x ∈ A}` with its inclusion.
///
/// Factor by factor: `p·e_j` generates a cyclic subgroup of order
/// `f_j / gcd(f_j, p)`, so factors of order p vanish and factors coprime
/// to p survive whole (multiplication by p is an automorphism there).
pub fn times_p_subgroup(a: &FinAbGroup, p: u64) -> (FinAbGroup, GroupHom) {
    assert!(is_prime(p), "p must be prime");
    subgroup_from_generators_independent(
        a,
        (0..a.rank()).map(|j| a.scale(p as i128, &a.generator(j))).collect(),
    )
}

/// The p-torsion `A[p] = {x : px = 0}` with its inclusion; elementary
/// abelian of rank = number of factors divisible by p.
pub fn p_torsion(a: &FinAbGroup, p: u64) -> (FinAbGroup, GroupHom) {
    assert!(is_prime(p), "p must be prime");
    subgroup_from_generators_independent(
        a,
        (0..a.rank())
            .filter(|&j| a.factors[j] % p == 0)
            .map(|j| a.scale((a.factors[j] / p) as i128, &a.generator(j)))
            .collect(),
    )
}

/// Builds a subgroup presented by generators that live in pairwise
/// distinct coordinates (so the subgroup is the direct sum of the cyclic
/// groups they generate). Generators of order 1 are dropped.
fn subgroup_from_generators_independent(
    a: &FinAbGroup,
    gens: Vec<GroupElement>,
) -> (FinAbGroup, GroupHom) {
    let mut pairs: Vec<(u64, GroupElement)> = gens
        .into_iter()
        .map(|g| (a.element_order(&g), g))
        .filter(|(o, _)| *o > 1)
        .collect();
    // each order is a prime power because the ambient factors are
    pairs.sort_by_key(|(o, _)| {
        let (p, _) = prime_power_base(*o).expect("order is a prime power");
        (p, *o)
    });
    let sub = FinAbGroup { factors: pairs.iter().map(|(o, _)| *o).collect() };
    let images = pairs.into_iter().map(|(_, g)| g).collect();
    (sub.clone(), GroupHom { domain: sub, codomain: a.clone(), images })
}

/// The cyclic subgroup `⟨x⟩` with its inclusion into `A`.
pub fn cyclic_subgroup(a: &FinAbGroup, x: &GroupElement) -> (FinAbGroup, GroupHom) {
    let ord = a.element_order(x);
    let sub = FinAbGroup::new(&[ord]).expect("order >= 1");
    // canonical generator of the q-part of Z/ord corresponds to (ord/q)·x
    let images = sub.factors.iter().map(|&q| a.scale((ord / q) as i128, x)).collect();
    (sub.clone(), GroupHom { domain: sub, codomain: a.clone(), images })
}

/// The quotient `A/⟨K⟩` in canonical form together with the projection,
/// computed by diagonalizing the relation matrix (the group relations
/// stacked with the given generators of K) over Z.
pub fn quotient(a: &FinAbGroup, k: &[GroupElement]) -> Result<(FinAbGroup, GroupHom)> {
    let n = a.rank();
    for x in k {
        if !a.contains(x) {
            return Err(Error::invalid("quotient generator not an element of the group"));
        }
    }
    if n == 0 {
        return Ok((FinAbGroup::trivial(), a.identity_hom()));
    }
    let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(n + k.len());
    for j in 0..n {
        let mut row = vec![BigInt::zero(); n];
        row[j] = BigInt::from(a.factors[j]);
        rows.push(row);
    }
    for x in k {
        rows.push(x.coords.iter().map(|&c| BigInt::from(c)).collect());
    }
    let (diag, col_ops) = diagonalize(rows, n);

    // Z^n / L ≅ ⊕ Z/d_i in the basis given by the rows of V^{-1};
    // the coordinates of x in that basis are x·V.
    let mut cyclic_orders: Vec<u64> = Vec::new();
    for d in &diag {
        let d: u64 = d
            .try_into()
            .map_err(|_| Error::invalid("quotient invariant factor does not fit u64"))?;
        debug_assert!(d > 0, "relation matrix has full column rank");
        cyclic_orders.push(d);
    }

    // split each cyclic order into canonical prime-power factors, tracking
    // where generator i of the intermediate presentation lands
    let quot = FinAbGroup::new(&cyclic_orders)?;
    let mut slot_images: Vec<GroupElement> = Vec::with_capacity(cyclic_orders.len());
    {
        // factor list of quot is the multiset of all prime-power parts;
        // match each intermediate cyclic factor to its parts by value
        let mut used = vec![false; quot.rank()];
        for &d in &cyclic_orders {
            let mut img = quot.zero();
            for (_, q) in prime_power_parts(d) {
                let slot = quot
                    .factors
                    .iter()
                    .enumerate()
                    .position(|(j, &f)| f == q && !used[j])
                    .expect("prime-power part present in canonical factor list");
                used[slot] = true;
                img.coords[slot] = 1;
            }
            slot_images.push(img);
        }
    }

    let images = (0..n)
        .map(|j| {
            let mut acc = quot.zero();
            for (i, &d) in cyclic_orders.iter().enumerate() {
                let c = col_ops[j][i].mod_floor(&BigInt::from(d));
                let c: u64 = (&c).try_into().expect("residue fits u64");
                if c != 0 {
                    acc = quot.add(&acc, &quot.scale(c as i128, &slot_images[i]));
                }
            }
            acc
        })
        .collect();
    Ok((quot.clone(), GroupHom { domain: a.clone(), codomain: quot, images }))
}

/// Diagonalizes an integer matrix by elementary row and column operations,
/// returning the nonnegative diagonal and the accumulated column transform
/// V (as rows indexed by original column, columns by new coordinate).
fn diagonalize(mut m: Vec<Vec<BigInt>>, ncols: usize) -> (Vec<BigInt>, Vec<Vec<BigInt>>) {
    let nrows = m.len();
    let mut v: Vec<Vec<BigInt>> = (0..ncols)
        .map(|i| (0..ncols).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect();
    let rank = ncols.min(nrows);
    for t in 0..rank {
        loop {
            // find a pivot: smallest nonzero |entry| in the remaining block
            let mut pivot: Option<(usize, usize)> = None;
            for i in t..nrows {
                for j in t..ncols {
                    if !m[i][j].is_zero() {
                        let better = match &pivot {
                            None => true,
                            Some((pi, pj)) => m[i][j].abs() < m[*pi][*pj].abs(),
                        };
                        if better {
                            pivot = Some((i, j));
                        }
                    }
                }
            }
            let Some((pi, pj)) = pivot else { break };
            m.swap(t, pi);
            if pj != t {
                for row in m.iter_mut() {
                    row.swap(t, pj);
                }
                v.iter_mut().for_each(|r| r.swap(t, pj));
            }
            // clear column t with row ops, column t's row with col ops
            let mut dirty = false;
            for i in t + 1..nrows {
                if !m[i][t].is_zero() {
                    let f = &m[i][t] / &m[t][t];
                    for j in t..ncols {
                        let sub = &f * &m[t][j];
                        m[i][j] -= sub;
                    }
                    if !m[i][t].is_zero() {
                        dirty = true;
                    }
                }
            }
            for j in t + 1..ncols {
                if !m[t][j].is_zero() {
                    let f = &m[t][j] / &m[t][t];
                    for i in 0..nrows {
                        let sub = &f * &m[i][t];
                        m[i][j] -= sub;
                    }
                    for r in v.iter_mut() {
                        let sub = &f * &r[t];
                        r[j] -= sub;
                    }
                    if !m[t][j].is_zero() {
                        dirty = true;
                    }
                }
            }
            let cleared = (t + 1..nrows).all(|i| m[i][t].is_zero())
                && (t + 1..ncols).all(|j| m[t][j].is_zero());
            if cleared && !dirty {
                break;
            }
        }
        if m[t][t].is_negative() {
            for i in 0..nrows {
                m[i][t] = -m[i][t].clone();
            }
            for r in v.iter_mut() {
                r[t] = -r[t].clone();
            }
        }
    }
    let diag = (0..rank).map(|t| m[t][t].clone()).collect();
    (diag, v)
}

/// The Pontryagin dual: same factor list, paired with `B` by
/// `⟨chi, b⟩ = Σ_j chi_j b_j / f_j mod 1`.
pub fn dual_group(b: &FinAbGroup) -> FinAbGroup {
    b.clone()
}

/// The duality pairing; nondegenerate in both slots.
pub fn pair(b: &FinAbGroup, chi: &GroupElement, x: &GroupElement) -> Result<TorusValue> {
    if chi.coords.len() != b.rank() || x.coords.len() != b.rank() {
        return Err(Error::invalid("pairing requires matching factor lists"));
    }
    let mut acc = TorusValue::zero();
    for ((&c, &y), &f) in chi.coords.iter().zip(&x.coords).zip(&b.factors) {
        acc = acc.add(&TorusValue::new((c as u128 * y as u128) as i128, f as i128)?);
    }
    Ok(acc)
}
