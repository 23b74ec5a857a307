//! Exact cyclotomic arithmetic.
//!
//! A [`CycloValue`] is an element of `Q(ζ_N)` written as an integer
//! polynomial in the power basis `1, ζ_N, …, ζ_N^{φ(N)−1}` (reduced
//! modulo the N-th cyclotomic polynomial `Φ_N`) over a positive integer
//! denominator. Values are kept in a canonical form: basis-reduced,
//! content-free, and at the *smallest* level `M | N` whose field contains
//! the value. That makes equality a plain coefficient comparison and
//! sidesteps the vanishing-sums-of-roots-of-unity problem entirely.

use crate::torus::TorusValue;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

pub fn euler_phi(n: u64) -> u64 {
    crate::group::prime_power_parts(n)
        .into_iter()
        .map(|(p, q)| q - q / p)
        .product::<u64>()
        .max(1)
}

// ---------------------------------------------------------------------------
// integer polynomial helpers (ascending coefficients)
// ---------------------------------------------------------------------------

fn poly_trim(p: &mut Vec<BigInt>) {
    while p.len() > 1 && p.last().map(|c| c.is_zero()).unwrap_or(false) {
        p.pop();
    }
}

fn poly_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    poly_trim(&mut out);
    out
}

/// Remainder of `a` modulo a *monic* divisor.
fn poly_rem(a: &[BigInt], divisor: &[BigInt]) -> Vec<BigInt> {
    let d = divisor.len() - 1;
    debug_assert!(divisor[d].is_one(), "divisor must be monic");
    let mut r: Vec<BigInt> = a.to_vec();
    while r.len() > d {
        let lead = r.pop().unwrap();
        if lead.is_zero() {
            continue;
        }
        let shift = r.len() - d;
        for (i, c) in divisor[..d].iter().enumerate() {
            let sub = &lead * c;
            r[shift + i] -= sub;
        }
    }
    r.resize(d.max(1), BigInt::zero());
    r
}

/// Exact quotient `a / b` for polynomials known to divide evenly.
fn poly_divexact(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut r: Vec<BigInt> = a.to_vec();
    let db = b.len() - 1;
    let lead_b = &b[db];
    let mut q = vec![BigInt::zero(); r.len() - db];
    for k in (0..q.len()).rev() {
        let c = &r[k + db] / lead_b;
        debug_assert_eq!(&c * lead_b, r[k + db], "division must be exact");
        for (i, bc) in b.iter().enumerate() {
            let sub = &c * bc;
            r[k + i] -= sub;
        }
        q[k] = c;
    }
    debug_assert!(r.iter().all(|c| c.is_zero()));
    poly_trim(&mut q);
    q
}

/// The N-th cyclotomic polynomial, by iterated exact division of
/// `x^N − 1` by `Φ_d` over the proper divisors `d | N`. Memoized.
pub fn cyclotomic_polynomial(n: u64) -> Arc<Vec<BigInt>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<Vec<BigInt>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(hit) = cache.lock().unwrap().get(&n) {
        return hit.clone();
    }
    assert!(n >= 1, "cyclotomic level must be >= 1");
    let mut num = vec![BigInt::zero(); (n + 1) as usize];
    num[0] = -BigInt::one();
    num[n as usize] = BigInt::one();
    for d in 1..n {
        if n % d == 0 {
            let phi_d = cyclotomic_polynomial(d);
            num = poly_divexact(&num, &phi_d);
        }
    }
    let out = Arc::new(num);
    cache.lock().unwrap().insert(n, out.clone());
    out
}

// ---------------------------------------------------------------------------
// CycloValue
// ---------------------------------------------------------------------------

/// An exact element of a cyclotomic field: `(Σ_j coeffs[j] ζ_level^j) / den`
/// in canonical form (see module docs).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CycloValue {
    level: u64,
    coeffs: Vec<BigInt>,
    den: BigInt,
}

impl CycloValue {
    pub fn zero() -> Self {
        CycloValue { level: 1, coeffs: vec![BigInt::zero()], den: BigInt::one() }
    }

    pub fn one() -> Self {
        CycloValue { level: 1, coeffs: vec![BigInt::one()], den: BigInt::one() }
    }

    pub fn from_rational(r: &BigRational) -> Self {
        CycloValue::from_poly(1, vec![r.numer().clone()], r.denom().clone())
    }

    pub fn from_integer(n: i64) -> Self {
        CycloValue { level: 1, coeffs: vec![BigInt::from(n)], den: BigInt::one() }
    }

    /// `e(t) = exp(2πi t)`: the root of unity `ζ_den^num`, canonicalized.
    pub fn root_of_unity(t: &TorusValue) -> Self {
        let den: u64 = t.order().expect("torus denominator fits u64");
        let num: u64 = t.numer().try_into().expect("torus numerator fits u64");
        let mut poly = vec![BigInt::zero(); num as usize + 1];
        poly[num as usize] = BigInt::one();
        CycloValue::from_poly(den, poly, BigInt::one())
    }

    /// Canonicalizes an arbitrary polynomial in `ζ_level` over `den > 0`.
    pub fn from_poly(level: u64, poly: Vec<BigInt>, den: BigInt) -> Self {
        assert!(den.is_positive(), "denominator must be positive");
        let phi = cyclotomic_polynomial(level);
        let mut coeffs = poly_rem(&poly, &phi);
        coeffs.resize((euler_phi(level) as usize).max(1), BigInt::zero());
        let mut v = CycloValue { level, coeffs, den };
        v.normalize_content();
        v.descend();
        v
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn den(&self) -> &BigInt {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// The value as a rational number, when it is one (level 1).
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.level == 1 {
            Some(BigRational::new(self.coeffs[0].clone(), self.den.clone()))
        } else {
            None
        }
    }

    fn normalize_content(&mut self) {
        if self.is_zero() {
            self.level = 1;
            self.coeffs = vec![BigInt::zero()];
            self.den = BigInt::one();
            return;
        }
        let mut g = self.den.clone();
        for c in &self.coeffs {
            g = g.gcd(c);
        }
        if !g.is_one() {
            for c in &mut self.coeffs {
                *c = &*c / &g;
            }
            self.den = &self.den / &g;
        }
    }

    /// Repeatedly drops to `level/p` while the value lies in the smaller
    /// cyclotomic field; terminates at the minimal level.
    fn descend(&mut self) {
        'outer: loop {
            if self.level == 1 {
                return;
            }
            for (p, _) in crate::group::prime_power_parts(self.level) {
                if let Some((coeffs, extra_den)) = self.try_descend(self.level / p) {
                    let den = &self.den * extra_den;
                    self.level /= p;
                    self.coeffs = coeffs;
                    self.den = den;
                    self.normalize_content();
                    continue 'outer;
                }
            }
            return;
        }
    }

    /// Attempts to rewrite the numerator in the power basis of `ζ_m`
    /// (`m | level`). On success returns integer coordinates and the
    /// extra denominator factor they carry.
    fn try_descend(&self, m: u64) -> Option<(Vec<BigInt>, BigInt)> {
        let n = self.level;
        let step = n / m;
        let phi_n = euler_phi(n) as usize;
        let phi_m = euler_phi(m) as usize;
        let big_phi = cyclotomic_polynomial(n);
        // columns: ζ_n^{step·j} reduced into the level-n power basis
        let mut cols: Vec<Vec<BigInt>> = Vec::with_capacity(phi_m);
        for j in 0..phi_m {
            let e = (step as usize) * j;
            let mut poly = vec![BigInt::zero(); e + 1];
            poly[e] = BigInt::one();
            let mut reduced = poly_rem(&poly, &big_phi);
            reduced.resize(phi_n.max(1), BigInt::zero());
            cols.push(reduced);
        }
        let target: Vec<BigRational> =
            self.coeffs.iter().map(|c| BigRational::from_integer(c.clone())).collect();
        let sol = solve_columns(&cols, &target, phi_n)?;
        // clear denominators
        let mut w = BigInt::one();
        for c in &sol {
            w = w.lcm(c.denom());
        }
        let ints: Vec<BigInt> =
            sol.iter().map(|c| c.numer() * (&w / c.denom())).collect();
        Some((ints, w))
    }

    fn lift_to(&self, level: u64) -> (Vec<BigInt>, BigInt) {
        debug_assert_eq!(level % self.level, 0);
        let step = (level / self.level) as usize;
        let phi = cyclotomic_polynomial(level);
        let deg = euler_phi(level) as usize;
        let mut poly = vec![BigInt::zero(); (self.coeffs.len() - 1) * step + 1];
        for (j, c) in self.coeffs.iter().enumerate() {
            poly[j * step] = c.clone();
        }
        let mut reduced = poly_rem(&poly, &phi);
        reduced.resize(deg.max(1), BigInt::zero());
        (reduced, self.den.clone())
    }

    pub fn add(&self, other: &CycloValue) -> CycloValue {
        let level = self.level.lcm(&other.level);
        let (a, da) = self.lift_to(level);
        let (b, db) = other.lift_to(level);
        let coeffs: Vec<BigInt> =
            a.iter().zip(&b).map(|(x, y)| x * &db + y * &da).collect();
        CycloValue::from_poly(level, coeffs, da * db)
    }

    pub fn neg(&self) -> CycloValue {
        let mut out = self.clone();
        for c in &mut out.coeffs {
            *c = -c.clone();
        }
        out
    }

    pub fn sub(&self, other: &CycloValue) -> CycloValue {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &CycloValue) -> CycloValue {
        let level = self.level.lcm(&other.level);
        let (a, da) = self.lift_to(level);
        let (b, db) = other.lift_to(level);
        CycloValue::from_poly(level, poly_mul(&a, &b), da * db)
    }

    /// Complex conjugation: `ζ_N ↦ ζ_N^{N−1}`.
    pub fn conj(&self) -> CycloValue {
        if self.level == 1 {
            return self.clone();
        }
        let n = self.level as usize;
        let mut poly = vec![BigInt::zero(); (self.coeffs.len() - 1) * (n - 1) + 1];
        for (j, c) in self.coeffs.iter().enumerate() {
            poly[(j * (n - 1)) % n] += c;
        }
        CycloValue::from_poly(self.level, poly, self.den.clone())
    }

    /// `a · conj(a)`, a real (conjugation-fixed) value.
    pub fn abs_sq(&self) -> CycloValue {
        self.mul(&self.conj())
    }

    pub fn scale_rational(&self, r: &BigRational) -> CycloValue {
        let coeffs: Vec<BigInt> = self.coeffs.iter().map(|c| c * r.numer()).collect();
        CycloValue::from_poly(self.level, coeffs, &self.den * r.denom())
    }

    pub fn scale_int(&self, n: &BigInt) -> CycloValue {
        let coeffs: Vec<BigInt> = self.coeffs.iter().map(|c| c * n).collect();
        CycloValue::from_poly(self.level, coeffs, self.den.clone())
    }

    /// True if the value equals its own conjugate.
    pub fn is_real(&self) -> bool {
        *self == self.conj()
    }
}

impl std::fmt::Display for CycloValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let coeffs: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        write!(f, "cyclo level={} coeffs=[{}] den={}", self.level, coeffs.join(","), self.den)
    }
}

/// Solves `Σ_j cols[j]·x_j = target` over the rationals, or returns None
/// if the system is inconsistent.
fn solve_columns(
    cols: &[Vec<BigInt>],
    target: &[BigRational],
    nrows: usize,
) -> Option<Vec<BigRational>> {
    let ncols = cols.len();
    let mut aug: Vec<Vec<BigRational>> = (0..nrows)
        .map(|i| {
            let mut row: Vec<BigRational> = (0..ncols)
                .map(|j| BigRational::from_integer(cols[j][i].clone()))
                .collect();
            row.push(target[i].clone());
            row
        })
        .collect();
    let mut pivot_row = 0usize;
    let mut pivots: Vec<usize> = Vec::new();
    for col in 0..ncols {
        let Some(r) = (pivot_row..nrows).find(|&r| !aug[r][col].is_zero()) else {
            continue;
        };
        aug.swap(pivot_row, r);
        let inv = aug[pivot_row][col].clone();
        for x in aug[pivot_row].iter_mut() {
            *x = &*x / &inv;
        }
        for r2 in 0..nrows {
            if r2 != pivot_row && !aug[r2][col].is_zero() {
                let f = aug[r2][col].clone();
                for c2 in col..=ncols {
                    let sub = &f * &aug[pivot_row][c2];
                    aug[r2][c2] -= sub;
                }
            }
        }
        pivots.push(col);
        pivot_row += 1;
        if pivot_row == nrows {
            break;
        }
    }
    // consistency: rows with no pivot must have zero rhs
    for r in pivot_row..nrows {
        if !aug[r][ncols].is_zero() {
            return None;
        }
    }
    let mut sol = vec![BigRational::zero(); ncols];
    for (row, &col) in pivots.iter().enumerate() {
        sol[col] = aug[row][ncols].clone();
    }
    Some(sol)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn phi_vec(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&c| BigInt::from(c)).collect()
    }

    #[test]
    fn cyclotomic_polynomials() {
        assert_eq!(*cyclotomic_polynomial(1), phi_vec(&[-1, 1]));
        assert_eq!(*cyclotomic_polynomial(2), phi_vec(&[1, 1]));
        assert_eq!(*cyclotomic_polynomial(3), phi_vec(&[1, 1, 1]));
        assert_eq!(*cyclotomic_polynomial(4), phi_vec(&[1, 0, 1]));
        assert_eq!(*cyclotomic_polynomial(12), phi_vec(&[1, 0, -1, 0, 1]));
    }

    fn e(num: i128, den: i128) -> CycloValue {
        CycloValue::root_of_unity(&TorusValue::new(num, den).unwrap())
    }

    #[test]
    fn roots_of_unity_basics() {
        assert_eq!(e(0, 1), CycloValue::one());
        assert_eq!(e(1, 2), CycloValue::from_integer(-1));
        // ζ_4 = i stays at level 4, basis {1, ζ}
        let i = e(1, 4);
        assert_eq!(i.level(), 4);
        assert_eq!(i.coeffs(), &phi_vec(&[0, 1]));
        // ζ_4² = −1 descends to level 1
        assert_eq!(i.mul(&i), CycloValue::from_integer(-1));
        // ζ_6 = −ζ_3² lives at level 3 after canonicalization
        assert_eq!(e(1, 6).level(), 3);
    }

    #[test]
    fn orbit_sums_vanish() {
        for n in 2..=24u64 {
            let mut s = CycloValue::zero();
            for j in 0..n {
                s = s.add(&e(j as i128, n as i128));
            }
            assert!(s.is_zero(), "sum of all {n}-th roots of unity must vanish");
        }
        assert_eq!(e(0, 1), CycloValue::one());
    }

    #[test]
    fn character_property_exhaustive() {
        for den in 1..=24i128 {
            for a in 0..den {
                for b in 0..den {
                    let s = TorusValue::new(a, den).unwrap();
                    let t = TorusValue::new(b, den).unwrap();
                    let lhs = CycloValue::root_of_unity(&s.add(&t));
                    let rhs = CycloValue::root_of_unity(&s)
                        .mul(&CycloValue::root_of_unity(&t));
                    assert_eq!(lhs, rhs, "e({a}/{den} + {b}/{den})");
                }
            }
        }
    }

    #[test]
    fn gauss_value_squares() {
        // 1 + 2ζ_3 squares to −3
        let g3 = CycloValue::one().add(&e(1, 3).scale_int(&BigInt::from(2)));
        assert_eq!(g3.mul(&g3), CycloValue::from_integer(-3));
        assert_eq!(g3.abs_sq(), CycloValue::from_integer(3));
        // 1 + 2ζ_5 + 2ζ_5⁴ squares to 5
        let two = BigInt::from(2);
        let g5 = CycloValue::one()
            .add(&e(1, 5).scale_int(&two))
            .add(&e(4, 5).scale_int(&two));
        assert_eq!(g5.mul(&g5), CycloValue::from_integer(5));
    }

    #[test]
    fn conjugation_is_involutive_automorphism() {
        let vals = [
            e(1, 3),
            e(1, 4).add(&CycloValue::from_integer(2)),
            e(2, 5).sub(&e(1, 8)),
            CycloValue::from_rational(&BigRational::new(3.into(), 7.into())),
        ];
        for a in &vals {
            assert_eq!(a.conj().conj(), *a);
            for b in &vals {
                assert_eq!(a.add(b).conj(), a.conj().add(&b.conj()));
                assert_eq!(a.mul(b).conj(), a.conj().mul(&b.conj()));
            }
        }
    }

    #[test]
    fn abs_sq_of_roots_of_unity_is_one() {
        for n in 1..=16i128 {
            for j in 0..n {
                assert_eq!(e(j, n).abs_sq(), CycloValue::one());
            }
        }
    }

    #[test]
    fn rational_detection() {
        assert_eq!(
            e(1, 2).as_rational(),
            Some(BigRational::from_integer((-1).into()))
        );
        assert_eq!(e(1, 4).as_rational(), None);
        let half = CycloValue::from_rational(&BigRational::new(1.into(), 2.into()));
        assert_eq!(half.as_rational(), Some(BigRational::new(1.into(), 2.into())));
    }

    #[test]
    fn mixed_level_arithmetic() {
        // ζ_4 · ζ_3 = ζ_12^{3+4} = ζ_12^7
        assert_eq!(e(1, 4).mul(&e(1, 3)), e(7, 12));
        // 1 + (−1) = 0
        assert!(CycloValue::one().add(&CycloValue::from_integer(-1)).is_zero());
    }
}
