//! Exact integer, rational, and prime-field arithmetic.
//!
//! Everything downstream (polynomials, lattices, Groebner bases, point
//! enumeration) builds on the types here. All values are immutable after
//! construction and every operation is pure.

use std::fmt;
use std::sync::{Arc, OnceLock};

use num::{One, Signed, Zero};
use thiserror::Error;

/// Arbitrary-precision signed integer.
pub type Int = num::BigInt;
/// Arbitrary-precision rational, always reduced, denominator positive.
pub type Rat = num::BigRational;

/// Discrete-log tables are only built for fields up to this size.
pub const DLOG_LIMIT: u64 = 10_000;
/// Above [`DLOG_LIMIT`], root enumeration falls back to a brute-force scan,
/// but only up to this size; larger fields are refused.
pub const BRUTE_LIMIT: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactMathError {
    #[error("factorize requires a positive integer, got {0}")]
    NonPositive(Int),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("zero cannot be raised to a negative power")]
    ZeroToNegativePower,
    #[error("field F_{p} too large for root enumeration (limit {limit})")]
    FieldTooLarge { p: u64, limit: u64 },
    #[error("root degree must be at least 1")]
    ZeroRootDegree,
    #[error("F_{p} has no element of multiplicative order {order}")]
    NoSuchOrder { order: u64, p: u64 },
}

/// Nonnegative greatest common divisor, with `gcd(0, 0) = 0`.
pub fn gcd(a: &Int, b: &Int) -> Int {
    num::Integer::gcd(a, b)
}

pub fn gcd_u64(a: u64, b: u64) -> u64 {
    let (mut a, mut b) = (a, b);
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Extended Euclid: returns `(g, s, t)` with `s*a + t*b = g = gcd(a, b)`,
/// `g >= 0`. The coefficients are the ones produced by the standard
/// iterative algorithm, with a final sign flip when the raw gcd is negative.
pub fn ext_gcd(a: &Int, b: &Int) -> (Int, Int, Int) {
    let (mut old_r, mut r) = (a.clone(), b.clone());
    let (mut old_s, mut s) = (Int::one(), Int::zero());
    let (mut old_t, mut t) = (Int::zero(), Int::one());
    while !r.is_zero() {
        let q = &old_r / &r;
        (old_r, r) = (r.clone(), old_r - &q * &r);
        (old_s, s) = (s.clone(), old_s - &q * &s);
        (old_t, t) = (t.clone(), old_t - &q * &t);
    }
    if old_r.is_negative() {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

/// Prime factorization by trial division, primes strictly increasing.
/// Inputs are small family parameters, so no fancier method is warranted.
pub fn factorize(a: &Int) -> Result<Vec<(Int, u32)>, ExactMathError> {
    if !a.is_positive() {
        return Err(ExactMathError::NonPositive(a.clone()));
    }
    if let Some(v) = num::ToPrimitive::to_u64(a) {
        return Ok(factorize_u64(v)
            .into_iter()
            .map(|(p, k)| (Int::from(p), k))
            .collect());
    }
    let mut m = a.clone();
    let mut out = Vec::new();
    let mut d = Int::from(2u32);
    while &d * &d <= m {
        let mut k = 0u32;
        while (&m % &d).is_zero() {
            m /= &d;
            k += 1;
        }
        if k > 0 {
            out.push((d.clone(), k));
        }
        d += 1u32;
    }
    if m > Int::one() {
        out.push((m, 1));
    }
    Ok(out)
}

/// Trial-division factorization of a positive machine integer.
pub fn factorize_u64(a: u64) -> Vec<(u64, u32)> {
    assert!(a >= 1, "factorize_u64 requires a positive input");
    let mut m = a;
    let mut out = Vec::new();
    let mut d = 2u64;
    while d.saturating_mul(d) <= m {
        let mut k = 0u32;
        while m.is_multiple_of(d) {
            m /= d;
            k += 1;
        }
        if k > 0 {
            out.push((d, k));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if m > 1 {
        out.push((m, 1));
    }
    out
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += if d == 2 { 1 } else { 2 };
    }
    true
}

#[derive(Default)]
struct FieldTables {
    generator: OnceLock<u64>,
    // dlog[a] = k with g^k = a, for a in 1..p; index 0 is unused
    dlog: OnceLock<Vec<u32>>,
}

/// The prime field F_p. Cloning shares the cached generator and
/// discrete-log table.
#[derive(Clone)]
pub struct PrimeField {
    p: u64,
    tables: Arc<FieldTables>,
}

impl fmt::Debug for PrimeField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.p)
    }
}

impl fmt::Display for PrimeField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.p)
    }
}

impl PartialEq for PrimeField {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p
    }
}
impl Eq for PrimeField {}

impl std::hash::Hash for PrimeField {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.p.hash(state);
    }
}

/// An element of F_p, stored reduced, tagged with its modulus.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldElement {
    value: u64,
    p: u64,
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.value, self.p)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self, ExactMathError> {
        if !is_prime(p) {
            return Err(ExactMathError::NotPrime(p));
        }
        Ok(PrimeField {
            p,
            tables: Arc::new(FieldTables::default()),
        })
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn elem(&self, v: u64) -> FieldElement {
        FieldElement {
            value: v % self.p,
            p: self.p,
        }
    }

    pub fn elem_i64(&self, v: i64) -> FieldElement {
        let r = v.rem_euclid(self.p as i64);
        self.elem(r as u64)
    }

    pub fn elem_int(&self, v: &Int) -> FieldElement {
        let r = num::Integer::mod_floor(v, &Int::from(self.p));
        self.elem(num::ToPrimitive::to_u64(&r).expect("reduced residue fits u64"))
    }

    pub fn zero(&self) -> FieldElement {
        self.elem(0)
    }

    pub fn one(&self) -> FieldElement {
        self.elem(1)
    }

    /// All field elements, in increasing representative order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.p).map(|v| self.elem(v))
    }

    /// Smallest multiplicative generator of F_p^*.
    pub fn generator(&self) -> u64 {
        *self.tables.generator.get_or_init(|| {
            if self.p == 2 {
                return 1;
            }
            let order = self.p - 1;
            let prime_factors: Vec<u64> = factorize_u64(order).into_iter().map(|(q, _)| q).collect();
            (2..self.p)
                .find(|&g| {
                    prime_factors
                        .iter()
                        .all(|&q| self.elem(g).pow_u64(order / q).value != 1)
                })
                .expect("every prime field has a generator")
        })
    }

    /// An element of exact multiplicative order `m`; requires `m | p - 1`.
    pub fn element_of_order(&self, m: u64) -> Result<FieldElement, ExactMathError> {
        if m == 0 || !(self.p - 1).is_multiple_of(m) {
            return Err(ExactMathError::NoSuchOrder { order: m, p: self.p });
        }
        let g = self.elem(self.generator());
        Ok(g.pow_u64((self.p - 1) / m))
    }

    fn dlog_table(&self) -> Option<&[u32]> {
        if self.p > DLOG_LIMIT {
            return None;
        }
        Some(self.tables.dlog.get_or_init(|| {
            let g = self.generator();
            let mut table = vec![u32::MAX; self.p as usize];
            let mut acc = self.one();
            for k in 0..self.p - 1 {
                table[acc.value as usize] = k as u32;
                acc = acc * self.elem(g);
            }
            table
        }))
    }

    /// All x in F_p with `x^r = a`. The empty list means no r-th root exists
    /// in this field (callers may need an extension). Uses the discrete-log
    /// table for small p, a brute-force scan up to [`BRUTE_LIMIT`], and
    /// refuses larger fields.
    pub fn nth_roots(&self, a: FieldElement, r: u64) -> Result<Vec<FieldElement>, ExactMathError> {
        assert_eq!(a.p, self.p, "element from a different field");
        if r == 0 {
            return Err(ExactMathError::ZeroRootDegree);
        }
        if a.is_zero() {
            return Ok(vec![self.zero()]);
        }
        if let Some(table) = self.dlog_table() {
            let m = self.p - 1;
            let target = table[a.value as usize] as u64;
            let rr = r % m;
            // solve rr * k = target (mod m)
            let d = gcd_u64(rr, m);
            if !target.is_multiple_of(d) {
                return Ok(vec![]);
            }
            let m_d = m / d;
            let k0 = if m_d == 1 {
                0
            } else {
                let (_, s, _) = ext_gcd(&Int::from(rr / d), &Int::from(m_d));
                let inv = num::Integer::mod_floor(&s, &Int::from(m_d));
                let inv = num::ToPrimitive::to_u64(&inv).unwrap();
                (u128::from(target / d) * u128::from(inv) % u128::from(m_d)) as u64
            };
            let g = self.elem(self.generator());
            let mut roots: Vec<FieldElement> =
                (0..d).map(|j| g.pow_u64(k0 + j * m_d)).collect();
            roots.sort_by_key(|x| x.value);
            Ok(roots)
        } else if self.p <= BRUTE_LIMIT {
            let m = self.p - 1;
            let rr = r % m;
            let mut roots = Vec::new();
            for v in 1..self.p {
                if self.elem(v).pow_u64(rr).value == a.value {
                    roots.push(self.elem(v));
                }
            }
            Ok(roots)
        } else {
            Err(ExactMathError::FieldTooLarge {
                p: self.p,
                limit: BRUTE_LIMIT,
            })
        }
    }

    /// All r-th roots of unity, plus whether a primitive r-th root exists
    /// (true exactly when `r | p - 1`).
    pub fn roots_of_unity(&self, r: u64) -> Result<RootsOfUnity, ExactMathError> {
        let roots = self.nth_roots(self.one(), r)?;
        Ok(RootsOfUnity {
            has_primitive: (self.p - 1).is_multiple_of(r),
            roots,
        })
    }
}

#[derive(Debug, Clone)]
pub struct RootsOfUnity {
    pub roots: Vec<FieldElement>,
    pub has_primitive: bool,
}

impl FieldElement {
    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    pub fn inv(&self) -> Option<FieldElement> {
        if self.value == 0 {
            return None;
        }
        let (_, s, _) = ext_gcd(&Int::from(self.value), &Int::from(self.p));
        let inv = num::Integer::mod_floor(&s, &Int::from(self.p));
        Some(FieldElement {
            value: num::ToPrimitive::to_u64(&inv).unwrap(),
            p: self.p,
        })
    }

    /// Square-and-multiply; `pow_u64(0) = 1` for every base, including zero.
    pub fn pow_u64(&self, e: u64) -> FieldElement {
        let mut result = 1u128;
        let mut base = u128::from(self.value);
        let p = u128::from(self.p);
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = result * base % p;
            }
            base = base * base % p;
            e >>= 1;
        }
        FieldElement {
            value: result as u64,
            p: self.p,
        }
    }
}

/// `a^e` in F_p for an arbitrary-precision exponent, negative exponents
/// allowed for nonzero bases.
pub fn fp_pow(a: FieldElement, e: &Int) -> Result<FieldElement, ExactMathError> {
    if a.is_zero() {
        return if e.is_negative() {
            Err(ExactMathError::ZeroToNegativePower)
        } else if e.is_zero() {
            Ok(FieldElement { value: 1, p: a.p })
        } else {
            Ok(a)
        };
    }
    let m = Int::from(a.p - 1);
    let r = num::Integer::mod_floor(e, &m);
    Ok(a.pow_u64(num::ToPrimitive::to_u64(&r).expect("reduced exponent fits u64")))
}

macro_rules! checked_field_op {
    ($trait:ident, $method:ident, $body:expr) => {
        impl std::ops::$trait for FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: FieldElement) -> FieldElement {
                assert_eq!(self.p, rhs.p, "field elements from different fields");
                let f: fn(u128, u128, u128) -> u128 = $body;
                FieldElement {
                    value: f(u128::from(self.value), u128::from(rhs.value), u128::from(self.p))
                        as u64,
                    p: self.p,
                }
            }
        }
    };
}

checked_field_op!(Add, add, |a, b, p| (a + b) % p);
checked_field_op!(Sub, sub, |a, b, p| (a + p - b) % p);
checked_field_op!(Mul, mul, |a, b, p| a * b % p);

impl std::ops::Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement {
            value: if self.value == 0 { 0 } else { self.p - self.value },
            p: self.p,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int(v: i64) -> Int {
        Int::from(v)
    }

    #[test]
    fn gcd_examples() {
        assert_eq!(gcd(&int(2), &int(3)), int(1));
        assert_eq!(gcd(&int(0), &int(7)), int(7));
        assert_eq!(gcd(&int(12), &int(18)), int(6));
        assert_eq!(gcd(&int(0), &int(0)), int(0));
        assert_eq!(gcd(&int(-12), &int(18)), int(6));
    }

    #[test]
    fn ext_gcd_examples() {
        assert_eq!(ext_gcd(&int(2), &int(3)), (int(1), int(-1), int(1)));
        assert_eq!(ext_gcd(&int(1), &int(0)), (int(1), int(1), int(0)));
        assert_eq!(ext_gcd(&int(3), &int(5)), (int(1), int(2), int(-1)));
    }

    #[test]
    fn ext_gcd_identity_holds() {
        for a in -30i64..30 {
            for b in -30i64..30 {
                let (g, s, t) = ext_gcd(&int(a), &int(b));
                assert_eq!(&s * int(a) + &t * int(b), g);
                assert_eq!(g, gcd(&int(a), &int(b)));
            }
        }
    }

    #[test]
    fn factorize_examples() {
        assert_eq!(
            factorize(&int(6)).unwrap(),
            vec![(int(2), 1), (int(3), 1)]
        );
        assert_eq!(factorize(&int(1)).unwrap(), vec![]);
        assert_eq!(
            factorize(&int(12)).unwrap(),
            vec![(int(2), 2), (int(3), 1)]
        );
        assert!(factorize(&int(0)).is_err());
        assert!(factorize(&int(-4)).is_err());
    }

    #[test]
    fn factorize_recomposes() {
        for a in 1u64..2000 {
            let fs = factorize_u64(a);
            let back: u64 = fs.iter().map(|(p, k)| p.pow(*k)).product();
            assert_eq!(back, a);
            for w in fs.windows(2) {
                assert!(w[0].0 < w[1].0);
            }
        }
    }

    #[test]
    fn fp_pow_examples() {
        let f7 = PrimeField::new(7).unwrap();
        assert_eq!(fp_pow(f7.elem(3), &int(2)).unwrap().value(), 2);
        assert_eq!(fp_pow(f7.elem(5), &int(0)).unwrap().value(), 1);
        assert_eq!(fp_pow(f7.elem(3), &int(6)).unwrap().value(), 1);
        assert_eq!(fp_pow(f7.elem(3), &int(-1)).unwrap().value(), 5); // 3*5=15=1
        assert!(fp_pow(f7.elem(0), &int(-2)).is_err());
        assert_eq!(fp_pow(f7.elem(0), &int(5)).unwrap().value(), 0);
    }

    #[test]
    fn nth_roots_examples() {
        let f7 = PrimeField::new(7).unwrap();
        let roots: Vec<u64> = f7
            .nth_roots(f7.elem(2), 2)
            .unwrap()
            .iter()
            .map(|x| x.value())
            .collect();
        assert_eq!(roots, vec![3, 4]);

        let f5 = PrimeField::new(5).unwrap();
        let roots: Vec<u64> = f5
            .nth_roots(f5.elem(1), 1)
            .unwrap()
            .iter()
            .map(|x| x.value())
            .collect();
        assert_eq!(roots, vec![1]);
        assert!(f5.nth_roots(f5.elem(3), 2).unwrap().is_empty());
    }

    #[test]
    fn nth_roots_match_brute_force() {
        // independent oracle: x^r by repeated multiplication
        fn naive_pow(x: u64, r: u64, p: u64) -> u64 {
            (0..r).fold(1u64, |acc, _| acc * x % p)
        }
        for p in [2u64, 3, 5, 7, 11, 13, 101] {
            let field = PrimeField::new(p).unwrap();
            for r in 1u64..=12 {
                for a in 0..p {
                    let fast: Vec<u64> = field
                        .nth_roots(field.elem(a), r)
                        .unwrap()
                        .iter()
                        .map(|x| x.value())
                        .collect();
                    let slow: Vec<u64> = (0..p).filter(|&x| naive_pow(x, r, p) == a).collect();
                    assert_eq!(fast, slow, "p={p} r={r} a={a}");
                }
            }
        }
    }

    #[test]
    fn roots_of_unity_examples() {
        let f7 = PrimeField::new(7).unwrap();
        let r2 = f7.roots_of_unity(2).unwrap();
        assert_eq!(
            r2.roots.iter().map(|x| x.value()).collect::<Vec<_>>(),
            vec![1, 6]
        );
        assert!(r2.has_primitive);

        let r6 = f7.roots_of_unity(6).unwrap();
        assert_eq!(r6.roots.len(), 6);
        assert!(r6.has_primitive);

        let r4 = f7.roots_of_unity(4).unwrap();
        assert_eq!(
            r4.roots.iter().map(|x| x.value()).collect::<Vec<_>>(),
            vec![1, 6]
        );
        assert!(!r4.has_primitive);
    }

    #[test]
    fn roots_of_unity_count_divides_group_order() {
        for p in [3u64, 5, 7, 11, 13] {
            let field = PrimeField::new(p).unwrap();
            for r in 1u64..=10 {
                if r % p == 0 {
                    continue;
                }
                let count = field.roots_of_unity(r).unwrap().roots.len() as u64;
                assert_eq!((p - 1) % count, 0, "p={p} r={r}");
            }
        }
    }

    #[test]
    fn element_of_order_has_exact_order() {
        let f13 = PrimeField::new(13).unwrap();
        for m in [1u64, 2, 3, 4, 6, 12] {
            let z = f13.element_of_order(m).unwrap();
            assert_eq!(z.pow_u64(m).value(), 1);
            for k in 1..m {
                assert_ne!(z.pow_u64(k).value(), 1, "order divides {k} < {m}");
            }
        }
        assert!(f13.element_of_order(5).is_err());
    }

    #[test]
    fn nth_roots_brute_force_window_and_size_limit() {
        // 10007 > DLOG_LIMIT forces the brute-force scan
        let field = PrimeField::new(10_007).unwrap();
        let roots: Vec<u64> = field
            .nth_roots(field.elem(4), 2)
            .unwrap()
            .iter()
            .map(|x| x.value())
            .collect();
        assert_eq!(roots, vec![2, 10_005]);

        // above BRUTE_LIMIT the field is refused outright
        let big = PrimeField::new(1_000_003).unwrap();
        assert_eq!(
            big.nth_roots(big.elem(4), 2),
            Err(ExactMathError::FieldTooLarge {
                p: 1_000_003,
                limit: BRUTE_LIMIT
            })
        );

        let f7 = PrimeField::new(7).unwrap();
        assert_eq!(
            f7.nth_roots(f7.elem(2), 0),
            Err(ExactMathError::ZeroRootDegree)
        );
    }

    #[test]
    fn prime_field_rejects_composites() {
        assert!(PrimeField::new(1).is_err());
        assert!(PrimeField::new(4).is_err());
        assert!(PrimeField::new(91).is_err());
        assert!(PrimeField::new(2).is_ok());
    }

    #[test]
    fn field_element_ops() {
        let f5 = PrimeField::new(5).unwrap();
        assert_eq!((f5.elem(3) + f5.elem(4)).value(), 2);
        assert_eq!((f5.elem(1) - f5.elem(3)).value(), 3);
        assert_eq!((f5.elem(3) * f5.elem(4)).value(), 2);
        assert_eq!((-f5.elem(2)).value(), 3);
        assert_eq!(f5.elem(3).inv().unwrap().value(), 2);
        assert!(f5.elem(0).inv().is_none());
        assert_eq!(f5.elem_i64(-7).value(), 3);
    }
}
