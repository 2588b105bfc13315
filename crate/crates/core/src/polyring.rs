//! Multivariate polynomials in the 2n variables x_1..x_n, y_1..y_n (plus
//! auxiliary elimination variables) over Q or F_p, with term orders,
//! division with remainder, and a lossless text format.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num::{One, Signed, Zero};
use thiserror::Error;

use crate::exactmath::{fp_pow, FieldElement, Int, PrimeField, Rat};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("polynomials live in different rings")]
    RingMismatch,
    #[error("point has {got} coordinates, ring has {expected} variables")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("evaluation field F_{got} does not match the ring's F_{expected}")]
    FieldMismatch { expected: u64, got: u64 },
    #[error("cannot evaluate a rational-coefficient polynomial at prime-field points")]
    NotPrimeField,
    #[error("the zero vector does not define a binomial")]
    ZeroVector,
    #[error("vector length {got} does not match the ring's {expected} variables")]
    VectorLength { expected: usize, got: usize },
    #[error("parse error at byte {at}: {reason}")]
    Parse { at: usize, reason: String },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
}

/// Coefficient field descriptor: Q or F_p.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CoeffField {
    Q,
    Fp(PrimeField),
}

impl CoeffField {
    pub fn fp(p: u64) -> Result<Self, crate::exactmath::ExactMathError> {
        Ok(CoeffField::Fp(PrimeField::new(p)?))
    }

    pub fn zero(&self) -> Coeff {
        match self {
            CoeffField::Q => Coeff::Q(Rat::zero()),
            CoeffField::Fp(_) => Coeff::Fp(0),
        }
    }

    pub fn one(&self) -> Coeff {
        match self {
            CoeffField::Q => Coeff::Q(Rat::one()),
            CoeffField::Fp(_) => Coeff::Fp(1),
        }
    }

    pub fn from_int(&self, v: &Int) -> Coeff {
        match self {
            CoeffField::Q => Coeff::Q(Rat::from_integer(v.clone())),
            CoeffField::Fp(f) => Coeff::Fp(f.elem_int(v).value()),
        }
    }

    pub fn add(&self, a: &Coeff, b: &Coeff) -> Coeff {
        match (self, a, b) {
            (CoeffField::Q, Coeff::Q(x), Coeff::Q(y)) => Coeff::Q(x + y),
            (CoeffField::Fp(f), Coeff::Fp(x), Coeff::Fp(y)) => {
                Coeff::Fp((f.elem(*x) + f.elem(*y)).value())
            }
            _ => unreachable!("coefficient does not belong to this field"),
        }
    }

    pub fn neg(&self, a: &Coeff) -> Coeff {
        match (self, a) {
            (CoeffField::Q, Coeff::Q(x)) => Coeff::Q(-x),
            (CoeffField::Fp(f), Coeff::Fp(x)) => Coeff::Fp((-f.elem(*x)).value()),
            _ => unreachable!("coefficient does not belong to this field"),
        }
    }

    pub fn mul(&self, a: &Coeff, b: &Coeff) -> Coeff {
        match (self, a, b) {
            (CoeffField::Q, Coeff::Q(x), Coeff::Q(y)) => Coeff::Q(x * y),
            (CoeffField::Fp(f), Coeff::Fp(x), Coeff::Fp(y)) => {
                Coeff::Fp((f.elem(*x) * f.elem(*y)).value())
            }
            _ => unreachable!("coefficient does not belong to this field"),
        }
    }

    pub fn inv(&self, a: &Coeff) -> Coeff {
        match (self, a) {
            (CoeffField::Q, Coeff::Q(x)) => {
                assert!(!x.is_zero(), "inverse of zero");
                Coeff::Q(x.recip())
            }
            (CoeffField::Fp(f), Coeff::Fp(x)) => {
                Coeff::Fp(f.elem(*x).inv().expect("inverse of zero").value())
            }
            _ => unreachable!("coefficient does not belong to this field"),
        }
    }

    pub fn div(&self, a: &Coeff, b: &Coeff) -> Coeff {
        self.mul(a, &self.inv(b))
    }

    pub fn is_zero(&self, a: &Coeff) -> bool {
        match a {
            Coeff::Q(x) => x.is_zero(),
            Coeff::Fp(x) => *x == 0,
        }
    }
}

/// A coefficient value; the variant must agree with the ring's field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Coeff {
    Q(Rat),
    Fp(u64),
}

#[derive(Debug, PartialEq, Eq)]
struct RingData {
    field: CoeffField,
    names: Vec<String>,
}

/// A polynomial ring descriptor: coefficient field plus named variables.
/// Cheap to clone; equality is structural.
#[derive(Debug, Clone)]
pub struct Ring(Arc<RingData>);

impl PartialEq for Ring {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || *self.0 == *other.0
    }
}
impl Eq for Ring {}

impl Ring {
    pub fn new(field: CoeffField, names: Vec<String>) -> Self {
        let mut seen = std::collections::HashSet::new();
        for n in &names {
            assert!(seen.insert(n.clone()), "duplicate variable name {n}");
        }
        Ring(Arc::new(RingData { field, names }))
    }

    /// The standard ring for a family member: variables x1..xn, y1..yn.
    pub fn xy(n: usize, field: CoeffField) -> Self {
        let mut names: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
        names.extend((1..=n).map(|i| format!("y{i}")));
        Ring::new(field, names)
    }

    pub fn nvars(&self) -> usize {
        self.0.names.len()
    }

    pub fn field(&self) -> &CoeffField {
        &self.0.field
    }

    pub fn names(&self) -> &[String] {
        &self.0.names
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.0.names.iter().position(|n| n == name)
    }

    /// Extend the ring with one fresh auxiliary variable; returns the new
    /// ring and the index of the added variable.
    pub fn with_aux(&self) -> (Ring, usize) {
        let mut names = self.0.names.to_vec();
        let mut k = 0usize;
        loop {
            let cand = if k == 0 { "t".to_string() } else { format!("t{k}") };
            if !names.contains(&cand) {
                names.push(cand);
                break;
            }
            k += 1;
        }
        let idx = names.len() - 1;
        (Ring::new(self.0.field.clone(), names), idx)
    }

    /// The ring obtained by removing the variables in `drop` (sorted index
    /// list); used to restrict elimination ideals.
    pub fn without_vars(&self, drop: &[usize]) -> Ring {
        let names = self
            .0
            .names
            .iter()
            .enumerate()
            .filter(|(i, _)| !drop.contains(i))
            .map(|(_, n)| n.clone())
            .collect();
        Ring::new(self.0.field.clone(), names)
    }
}

/// Dense exponent vector. The structural `Ord` (used only for canonical
/// storage) is plain lexicographic on the vector and is unrelated to any
/// term order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(Vec<u64>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn from_exponents(exps: Vec<u64>) -> Self {
        Monomial(exps)
    }

    pub fn var(nvars: usize, i: usize, e: u64) -> Self {
        let mut m = Monomial::one(nvars);
        m.0[i] = e;
        m
    }

    pub fn exponents(&self) -> &[u64] {
        &self.0
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u64 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a.checked_add(*b).expect("exponent overflow"))
                .collect(),
        )
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `other / self` when `self` divides `other`.
    pub fn div_into(&self, other: &Monomial) -> Option<Monomial> {
        if self.divides(other) {
            Some(Monomial(
                other.0.iter().zip(&self.0).map(|(b, a)| b - a).collect(),
            ))
        } else {
            None
        }
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        Monomial(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| *a.max(b))
                .collect(),
        )
    }

    /// True when the supports are disjoint (gcd of the monomials is 1).
    pub fn coprime(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| *a == 0 || *b == 0)
    }
}

/// A total, multiplicative well-order on monomials.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TermOrder {
    Lex,
    Grevlex,
    /// Block order: the `heavy` variables dominate, with graded reverse
    /// lexicographic comparison inside each block. Used as an elimination
    /// order for the heavy block (auxiliary variables are appended last and
    /// listed here).
    Block { heavy: Vec<usize> },
}

fn grevlex_on(a: &[u64], b: &[u64], idx: impl DoubleEndedIterator<Item = usize> + Clone) -> Ordering {
    let da: u64 = idx.clone().map(|i| a[i]).sum();
    let db: u64 = idx.clone().map(|i| b[i]).sum();
    match da.cmp(&db) {
        Ordering::Equal => {
            for i in idx.rev() {
                match a[i].cmp(&b[i]) {
                    Ordering::Equal => continue,
                    // smaller exponent in the *last* differing slot wins
                    Ordering::Less => return Ordering::Greater,
                    Ordering::Greater => return Ordering::Less,
                }
            }
            Ordering::Equal
        }
        other => other,
    }
}

impl TermOrder {
    /// Elimination order with the given variables greatest.
    pub fn eliminating(heavy: impl IntoIterator<Item = usize>) -> TermOrder {
        let mut heavy: Vec<usize> = heavy.into_iter().collect();
        heavy.sort_unstable();
        heavy.dedup();
        TermOrder::Block { heavy }
    }

    pub fn cmp(&self, a: &Monomial, b: &Monomial) -> Ordering {
        debug_assert_eq!(a.nvars(), b.nvars());
        let n = a.nvars();
        match self {
            TermOrder::Lex => {
                for i in 0..n {
                    match a.0[i].cmp(&b.0[i]) {
                        Ordering::Equal => continue,
                        other => return other,
                    }
                }
                Ordering::Equal
            }
            TermOrder::Grevlex => grevlex_on(&a.0, &b.0, 0..n),
            TermOrder::Block { heavy } => {
                let heavy_cmp = grevlex_on(&a.0, &b.0, heavy.iter().copied().filter(|&i| i < n));
                if heavy_cmp != Ordering::Equal {
                    return heavy_cmp;
                }
                let light: Vec<usize> = (0..n).filter(|i| !heavy.contains(i)).collect();
                grevlex_on(&a.0, &b.0, light.into_iter())
            }
        }
    }

    pub fn max<'a>(&self, a: &'a Monomial, b: &'a Monomial) -> &'a Monomial {
        if self.cmp(a, b) == Ordering::Less {
            b
        } else {
            a
        }
    }
}

/// The integer vector (alpha, beta) of a binomial relation; alpha are the
/// x-exponents, beta the y-exponents, both signed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinomialVector {
    pub alpha: Vec<Int>,
    pub beta: Vec<Int>,
}

impl BinomialVector {
    pub fn new(alpha: Vec<Int>, beta: Vec<Int>) -> Self {
        assert_eq!(alpha.len(), beta.len(), "alpha and beta lengths differ");
        BinomialVector { alpha, beta }
    }

    pub fn from_flat(v: &[Int]) -> Self {
        assert!(v.len().is_multiple_of(2), "flat vector length must be even");
        let n = v.len() / 2;
        BinomialVector {
            alpha: v[..n].to_vec(),
            beta: v[n..].to_vec(),
        }
    }

    pub fn n(&self) -> usize {
        self.alpha.len()
    }

    pub fn flat(&self) -> Vec<Int> {
        self.alpha.iter().chain(self.beta.iter()).cloned().collect()
    }

    pub fn is_zero(&self) -> bool {
        self.alpha.iter().all(Zero::is_zero) && self.beta.iter().all(Zero::is_zero)
    }
}

/// The binomial x^{v+} y^{v+} - x^{v-} y^{v-} attached to an integer vector.
pub fn binomial_from_vector(ring: &Ring, v: &BinomialVector) -> Result<Polynomial, PolyError> {
    if v.is_zero() {
        return Err(PolyError::ZeroVector);
    }
    let flat = v.flat();
    if flat.len() != ring.nvars() {
        return Err(PolyError::VectorLength {
            expected: ring.nvars(),
            got: flat.len(),
        });
    }
    let mut plus = vec![0u64; flat.len()];
    let mut minus = vec![0u64; flat.len()];
    for (i, e) in flat.iter().enumerate() {
        if e.is_positive() {
            plus[i] = num::ToPrimitive::to_u64(e).expect("exponent fits u64");
        } else if e.is_negative() {
            minus[i] = num::ToPrimitive::to_u64(&-e).expect("exponent fits u64");
        }
    }
    let one = ring.field().one();
    let minus_one = ring.field().neg(&one);
    Ok(Polynomial::from_terms(
        ring.clone(),
        vec![
            (Monomial::from_exponents(plus), one),
            (Monomial::from_exponents(minus), minus_one),
        ],
    ))
}

/// Exact multivariate polynomial; terms are stored canonically and never
/// carry zero coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polynomial {
    ring: Ring,
    terms: BTreeMap<Monomial, Coeff>,
}

impl Polynomial {
    pub fn zero(ring: Ring) -> Self {
        Polynomial {
            ring,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(ring: Ring) -> Self {
        let one = ring.field().one();
        let m = Monomial::one(ring.nvars());
        Polynomial::from_terms(ring, vec![(m, one)])
    }

    pub fn constant(ring: Ring, c: Coeff) -> Self {
        let m = Monomial::one(ring.nvars());
        Polynomial::from_terms(ring, vec![(m, c)])
    }

    pub fn var(ring: Ring, i: usize) -> Self {
        let one = ring.field().one();
        let m = Monomial::var(ring.nvars(), i, 1);
        Polynomial::from_terms(ring, vec![(m, one)])
    }

    pub fn from_terms(ring: Ring, terms: impl IntoIterator<Item = (Monomial, Coeff)>) -> Self {
        let mut map: BTreeMap<Monomial, Coeff> = BTreeMap::new();
        for (m, c) in terms {
            assert_eq!(m.nvars(), ring.nvars(), "monomial arity mismatch");
            match map.entry(m) {
                std::collections::btree_map::Entry::Vacant(e) => {
                    e.insert(c);
                }
                std::collections::btree_map::Entry::Occupied(mut e) => {
                    let sum = ring.field().add(e.get(), &c);
                    if ring.field().is_zero(&sum) {
                        e.remove();
                    } else {
                        e.insert(sum);
                    }
                }
            }
        }
        map.retain(|_, c| !ring.field().is_zero(c));
        Polynomial { ring, terms: map }
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_binomial(&self) -> bool {
        self.terms.len() == 2
    }

    pub fn is_constant(&self) -> bool {
        self.terms.len() == 1 && self.terms.keys().next().unwrap().is_one()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Coeff)> {
        self.terms.iter()
    }

    /// Leading term under the given order, or None for the zero polynomial.
    pub fn leading(&self, order: &TermOrder) -> Option<(&Monomial, &Coeff)> {
        self.terms
            .iter()
            .max_by(|(a, _), (b, _)| order.cmp(a, b))
    }

    pub fn scalar_mul(&self, c: &Coeff) -> Polynomial {
        if self.ring.field().is_zero(c) {
            return Polynomial::zero(self.ring.clone());
        }
        Polynomial {
            ring: self.ring.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, v)| (m.clone(), self.ring.field().mul(v, c)))
                .collect(),
        }
    }

    /// Multiply by the single term c * m.
    pub fn term_mul(&self, m: &Monomial, c: &Coeff) -> Polynomial {
        if self.ring.field().is_zero(c) {
            return Polynomial::zero(self.ring.clone());
        }
        Polynomial {
            ring: self.ring.clone(),
            terms: self
                .terms
                .iter()
                .map(|(mm, v)| (mm.mul(m), self.ring.field().mul(v, c)))
                .collect(),
        }
    }

    /// Lift into a ring with extra trailing variables (exponents zero there).
    pub fn lift_to(&self, ring: &Ring) -> Polynomial {
        assert!(ring.nvars() >= self.ring.nvars());
        assert_eq!(ring.field(), self.ring.field());
        let extra = ring.nvars() - self.ring.nvars();
        Polynomial {
            ring: ring.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    let mut e = m.exponents().to_vec();
                    e.extend(std::iter::repeat_n(0, extra));
                    (Monomial::from_exponents(e), c.clone())
                })
                .collect(),
        }
    }

    /// Restrict into a ring with the `drop` variables removed; every dropped
    /// exponent must be zero.
    pub fn restrict_to(&self, ring: &Ring, drop: &[usize]) -> Polynomial {
        Polynomial {
            ring: ring.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    let e: Vec<u64> = m
                        .exponents()
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| !drop.contains(i))
                        .map(|(_, &e)| e)
                        .collect();
                    debug_assert!(m
                        .exponents()
                        .iter()
                        .enumerate()
                        .all(|(i, &e)| !drop.contains(&i) || e == 0));
                    (Monomial::from_exponents(e), c.clone())
                })
                .collect(),
        }
    }

    /// Monic over F_p; over Q, cleared of content with a positive leading
    /// coefficient. Canonical representative of the scalar class.
    pub fn normalized(&self, order: &TermOrder) -> Polynomial {
        if self.is_zero() {
            return self.clone();
        }
        match self.ring.field() {
            CoeffField::Fp(_) => {
                let (_, lc) = self.leading(order).unwrap();
                let inv = self.ring.field().inv(lc);
                self.scalar_mul(&inv)
            }
            CoeffField::Q => {
                // scale by the reciprocal of the content, sign from the lead
                let mut num_gcd = Int::zero();
                let mut den_lcm = Int::one();
                for c in self.terms.values() {
                    let Coeff::Q(r) = c else { unreachable!() };
                    num_gcd = crate::exactmath::gcd(&num_gcd, r.numer());
                    den_lcm = num::Integer::lcm(&den_lcm, r.denom());
                }
                let scale = Rat::new(den_lcm, num_gcd);
                let (_, lc) = self.leading(order).unwrap();
                let Coeff::Q(lc) = lc else { unreachable!() };
                let scale = if (lc * &scale).is_negative() { -scale } else { scale };
                self.scalar_mul(&Coeff::Q(scale))
            }
        }
    }

    /// Equality up to a nonzero scalar.
    pub fn proportional(&self, other: &Polynomial) -> bool {
        if self.ring != other.ring {
            return false;
        }
        if self.is_zero() || other.is_zero() {
            return self.is_zero() && other.is_zero();
        }
        let order = TermOrder::Grevlex;
        self.normalized(&order) == other.normalized(&order)
    }

    /// Exact evaluation at a prime-field point.
    pub fn evaluate(&self, point: &[FieldElement]) -> Result<FieldElement, PolyError> {
        let CoeffField::Fp(field) = self.ring.field() else {
            return Err(PolyError::NotPrimeField);
        };
        if point.len() != self.ring.nvars() {
            return Err(PolyError::DimensionMismatch {
                expected: self.ring.nvars(),
                got: point.len(),
            });
        }
        for x in point {
            if x.modulus() != field.modulus() {
                return Err(PolyError::FieldMismatch {
                    expected: field.modulus(),
                    got: x.modulus(),
                });
            }
        }
        let mut acc = field.zero();
        for (m, c) in &self.terms {
            let Coeff::Fp(c) = c else { unreachable!() };
            let mut t = field.elem(*c);
            for (i, &e) in m.exponents().iter().enumerate() {
                if e > 0 {
                    t = t * fp_pow(point[i], &Int::from(e)).expect("nonnegative exponent");
                }
            }
            acc = acc + t;
        }
        Ok(acc)
    }

    /// Terms sorted descending under `order`, leading term first.
    pub fn sorted_terms(&self, order: &TermOrder) -> Vec<(&Monomial, &Coeff)> {
        let mut ts: Vec<_> = self.terms.iter().collect();
        ts.sort_by(|(a, _), (b, _)| order.cmp(b, a));
        ts
    }

    /// Canonical text form under `order` (see the module's parse function
    /// for the grammar); round-trips losslessly.
    pub fn to_text(&self, order: &TermOrder) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (k, (m, c)) in self.sorted_terms(order).into_iter().enumerate() {
            let (neg, mag) = match c {
                Coeff::Q(r) => (r.is_negative(), {
                    let a = r.abs();
                    if a.is_integer() {
                        a.numer().to_string()
                    } else {
                        format!("{}/{}", a.numer(), a.denom())
                    }
                }),
                Coeff::Fp(v) => {
                    // balanced representative: matches the rational rendering
                    // of signed binomials across fields
                    let CoeffField::Fp(f) = self.ring.field() else {
                        unreachable!()
                    };
                    let p = f.modulus();
                    if *v > p / 2 {
                        (true, (p - v).to_string())
                    } else {
                        (false, v.to_string())
                    }
                }
            };
            if k == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mono = m
                .exponents()
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| {
                    if e == 1 {
                        self.ring.names()[i].clone()
                    } else {
                        format!("{}^{}", self.ring.names()[i], e)
                    }
                })
                .collect::<Vec<_>>()
                .join("*");
            if mono.is_empty() {
                out.push_str(&mag);
            } else if mag == "1" {
                out.push_str(&mono);
            } else {
                out.push_str(&mag);
                out.push('*');
                out.push_str(&mono);
            }
        }
        out
    }

    /// Parse the text format produced by [`Polynomial::to_text`].
    pub fn parse(ring: &Ring, input: &str) -> Result<Polynomial, PolyError> {
        parse_polynomial(ring, input)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text(&TermOrder::Grevlex))
    }
}

fn check_same_ring(a: &Polynomial, b: &Polynomial) {
    assert!(a.ring == b.ring, "polynomials live in different rings");
}

impl std::ops::Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        check_same_ring(self, rhs);
        Polynomial::from_terms(
            self.ring.clone(),
            self.terms
                .iter()
                .chain(rhs.terms.iter())
                .map(|(m, c)| (m.clone(), c.clone())),
        )
    }
}

impl std::ops::Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        check_same_ring(self, rhs);
        let field = self.ring.field();
        Polynomial::from_terms(
            self.ring.clone(),
            self.terms
                .iter()
                .map(|(m, c)| (m.clone(), c.clone()))
                .chain(rhs.terms.iter().map(|(m, c)| (m.clone(), field.neg(c)))),
        )
    }
}

impl std::ops::Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        let field = self.ring.field();
        Polynomial {
            ring: self.ring.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), field.neg(c)))
                .collect(),
        }
    }
}

impl std::ops::Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        check_same_ring(self, rhs);
        let field = self.ring.field();
        let mut terms = Vec::with_capacity(self.terms.len() * rhs.terms.len());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                terms.push((ma.mul(mb), field.mul(ca, cb)));
            }
        }
        Polynomial::from_terms(self.ring.clone(), terms)
    }
}

/// Multivariate division with remainder: `p = sum q_i d_i + r` where no term
/// of `r` is divisible by any divisor's leading monomial. The reducer is
/// always the first divisor (in list order) whose leading monomial divides
/// the current lead term.
pub fn divide(
    p: &Polynomial,
    divisors: &[Polynomial],
    order: &TermOrder,
) -> (Vec<Polynomial>, Polynomial) {
    let ring = p.ring().clone();
    let field = ring.field().clone();
    let mut quotients = vec![Polynomial::zero(ring.clone()); divisors.len()];
    let mut remainder = Polynomial::zero(ring.clone());
    let mut work = p.clone();
    while !work.is_zero() {
        let (lm, lc) = {
            let (m, c) = work.leading(order).unwrap();
            (m.clone(), c.clone())
        };
        let mut reduced = false;
        for (k, d) in divisors.iter().enumerate() {
            if d.is_zero() {
                continue;
            }
            let (dm, dc) = d.leading(order).unwrap();
            if let Some(q_mono) = dm.div_into(&lm) {
                let q_coeff = field.div(&lc, dc);
                let q_term = Polynomial::from_terms(
                    ring.clone(),
                    vec![(q_mono.clone(), q_coeff.clone())],
                );
                quotients[k] = &quotients[k] + &q_term;
                work = &work - &d.term_mul(&q_mono, &q_coeff);
                reduced = true;
                break;
            }
        }
        if !reduced {
            let t = Polynomial::from_terms(ring.clone(), vec![(lm.clone(), lc.clone())]);
            remainder = &remainder + &t;
            work = &work - &t;
        }
    }
    (quotients, remainder)
}

// ---------------------------------------------------------------------------
// text parsing

struct Lexer<'a> {
    bytes: &'a [u8],
    pos: usize,
}

#[derive(Debug, PartialEq)]
enum Tok {
    Num(Int),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    Slash,
    End,
}

impl<'a> Lexer<'a> {
    fn new(s: &'a str) -> Self {
        Lexer {
            bytes: s.as_bytes(),
            pos: 0,
        }
    }

    fn err<T>(&self, reason: &str) -> Result<T, PolyError> {
        Err(PolyError::Parse {
            at: self.pos,
            reason: reason.to_string(),
        })
    }

    fn next(&mut self) -> Result<Tok, PolyError> {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        if self.pos >= self.bytes.len() {
            return Ok(Tok::End);
        }
        let b = self.bytes[self.pos];
        match b {
            b'+' => {
                self.pos += 1;
                Ok(Tok::Plus)
            }
            b'-' => {
                self.pos += 1;
                Ok(Tok::Minus)
            }
            b'*' => {
                self.pos += 1;
                Ok(Tok::Star)
            }
            b'^' => {
                self.pos += 1;
                Ok(Tok::Caret)
            }
            b'/' => {
                self.pos += 1;
                Ok(Tok::Slash)
            }
            b'0'..=b'9' => {
                let start = self.pos;
                while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let s = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap();
                Ok(Tok::Num(s.parse::<Int>().unwrap()))
            }
            b if b.is_ascii_alphabetic() || b == b'_' => {
                let start = self.pos;
                while self.pos < self.bytes.len()
                    && (self.bytes[self.pos].is_ascii_alphanumeric() || self.bytes[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                Ok(Tok::Ident(
                    std::str::from_utf8(&self.bytes[start..self.pos])
                        .unwrap()
                        .to_string(),
                ))
            }
            _ => self.err("unexpected character"),
        }
    }

    fn peek(&mut self) -> Result<Tok, PolyError> {
        let save = self.pos;
        let t = self.next()?;
        self.pos = save;
        Ok(t)
    }
}

/// Grammar: poly := ['-'] term (('+' | '-') term)* ; term := factor ('*' factor)* ;
/// factor := number ['/' number] | ident ['^' number].
fn parse_polynomial(ring: &Ring, input: &str) -> Result<Polynomial, PolyError> {
    let mut lx = Lexer::new(input);
    let mut terms: Vec<(Monomial, Coeff)> = Vec::new();
    let mut sign_negative = false;
    match lx.peek()? {
        Tok::Minus => {
            lx.next()?;
            sign_negative = true;
        }
        Tok::End => return lx.err("empty input"),
        _ => {}
    }
    loop {
        let (m, c) = parse_term(ring, &mut lx, sign_negative)?;
        terms.push((m, c));
        match lx.next()? {
            Tok::Plus => sign_negative = false,
            Tok::Minus => sign_negative = true,
            Tok::End => break,
            _ => return lx.err("expected '+', '-' or end of input"),
        }
    }
    Ok(Polynomial::from_terms(ring.clone(), terms))
}

fn parse_term(
    ring: &Ring,
    lx: &mut Lexer<'_>,
    negative: bool,
) -> Result<(Monomial, Coeff), PolyError> {
    let field = ring.field();
    let mut coeff = field.one();
    let mut exps = vec![0u64; ring.nvars()];
    loop {
        match lx.next()? {
            Tok::Num(n) => {
                let mut c = field.from_int(&n);
                if let Tok::Slash = lx.peek()? {
                    lx.next()?;
                    match lx.next()? {
                        Tok::Num(d) => {
                            if d.is_zero() {
                                return lx.err("zero denominator");
                            }
                            c = field.mul(&c, &field.inv(&field.from_int(&d)));
                        }
                        _ => return lx.err("expected denominator"),
                    }
                }
                coeff = field.mul(&coeff, &c);
            }
            Tok::Ident(name) => {
                let idx = ring
                    .var_index(&name)
                    .ok_or(PolyError::UnknownVariable(name))?;
                let e = if let Tok::Caret = lx.peek()? {
                    lx.next()?;
                    match lx.next()? {
                        Tok::Num(n) => num::ToPrimitive::to_u64(&n)
                            .ok_or_else(|| PolyError::Parse {
                                at: 0,
                                reason: "exponent too large".into(),
                            })?,
                        _ => return lx.err("expected exponent"),
                    }
                } else {
                    1
                };
                exps[idx] = exps[idx]
                    .checked_add(e)
                    .expect("exponent overflow while parsing");
            }
            _ => return lx.err("expected a number or variable"),
        }
        match lx.peek()? {
            Tok::Star => {
                lx.next()?;
            }
            _ => break,
        }
    }
    if negative {
        coeff = field.neg(&coeff);
    }
    Ok((Monomial::from_exponents(exps), coeff))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qring(n: usize) -> Ring {
        Ring::xy(n, CoeffField::Q)
    }

    fn p(ring: &Ring, s: &str) -> Polynomial {
        Polynomial::parse(ring, s).unwrap()
    }

    #[test]
    fn arithmetic_examples() {
        let r = qring(1);
        // (x1 + y1) + (-x1) = y1
        let sum = &p(&r, "x1 + y1") + &p(&r, "-x1");
        assert_eq!(sum, p(&r, "y1"));
        // (x1 - y1)(x1 + y1) = x1^2 - y1^2
        let prod = &p(&r, "x1 - y1") * &p(&r, "x1 + y1");
        assert_eq!(prod, p(&r, "x1^2 - y1^2"));
        // 0 * p = 0
        let z = &Polynomial::zero(r.clone()) * &p(&r, "x1^2 + 3*y1");
        assert!(z.is_zero());
    }

    #[test]
    fn binomial_from_vector_examples() {
        let r = qring(3);
        let v = BinomialVector::from_flat(
            &[0, 0, -2, 1, 1, -1].map(Int::from),
        );
        let g = binomial_from_vector(&r, &v).unwrap();
        assert_eq!(g, p(&r, "y1*y2 - x3^2*y3"));

        let v = BinomialVector::from_flat(&[1, 0, 0, 0, 0, 0].map(Int::from));
        let b = binomial_from_vector(&r, &v).unwrap();
        assert_eq!(b, p(&r, "x1 - 1"));

        let v = BinomialVector::from_flat(&[-3, 0, -2, 2, 0, 0].map(Int::from));
        let b = binomial_from_vector(&r, &v).unwrap();
        assert_eq!(b, p(&r, "y1^2 - x1^3*x3^2"));

        let zero = BinomialVector::from_flat(&[0, 0, 0, 0, 0, 0].map(Int::from));
        assert_eq!(
            binomial_from_vector(&r, &zero),
            Err(PolyError::ZeroVector)
        );
    }

    #[test]
    fn evaluate_examples() {
        let f5 = PrimeField::new(5).unwrap();
        let r = Ring::xy(3, CoeffField::fp(5).unwrap());
        let f1 = p(&r, "y1^2 - x1^3*x3^2");
        let ones: Vec<FieldElement> = (0..6).map(|_| f5.one()).collect();
        assert_eq!(f1.evaluate(&ones).unwrap().value(), 0);

        let x1m1 = p(&r, "x1 - 1");
        let origin: Vec<FieldElement> = (0..6).map(|_| f5.zero()).collect();
        assert_eq!(x1m1.evaluate(&origin).unwrap().value(), 4);

        let pt: Vec<FieldElement> = [4u64, 1, 1, 2, 1, 1].iter().map(|&v| f5.elem(v)).collect();
        assert_eq!(f1.evaluate(&pt).unwrap().value(), 0);

        assert!(f1.evaluate(&ones[..3]).is_err());
    }

    #[test]
    fn divide_examples() {
        let r = qring(1);
        let order = TermOrder::Lex;

        let (q, rem) = divide(&p(&r, "x1^2"), &[p(&r, "x1")], &order);
        assert_eq!(q[0], p(&r, "x1"));
        assert!(rem.is_zero());

        let (_, rem) = divide(&p(&r, "x1*y1 + 1"), &[p(&r, "x1")], &order);
        assert_eq!(rem, p(&r, "1"));

        let f = p(&r, "x1^2*y1 - 3*x1 + y1");
        let (_, rem) = divide(&f, std::slice::from_ref(&f), &order);
        assert!(rem.is_zero());
    }

    #[test]
    fn divide_postcondition() {
        let r = qring(2);
        let order = TermOrder::Grevlex;
        let f = p(&r, "x1^3*y2 + x2^2 - y1*y2 + 7");
        let ds = [p(&r, "x1*y2 - 1"), p(&r, "x2 + y1")];
        let (qs, rem) = divide(&f, &ds, &order);
        let mut back = rem.clone();
        for (q, d) in qs.iter().zip(&ds) {
            back = &back + &(q * d);
        }
        assert_eq!(back, f);
        // no term of rem divisible by a leading monomial of the divisors
        for (m, _) in rem.terms() {
            for d in &ds {
                let (dm, _) = d.leading(&order).unwrap();
                assert!(!dm.divides(m));
            }
        }
    }

    #[test]
    fn grevlex_known_comparisons() {
        let o = TermOrder::Grevlex;
        let m = |v: &[u64]| Monomial::from_exponents(v.to_vec());
        // degree dominates
        assert_eq!(o.cmp(&m(&[3, 0, 2]), &m(&[0, 2, 0])), Ordering::Greater);
        // same degree: smaller last exponent wins (x1*x2 > x3^2... here
        // [1,1,0] vs [0,0,2]: last differing slot has 0 < 2, so Greater)
        assert_eq!(o.cmp(&m(&[1, 1, 0]), &m(&[0, 0, 2])), Ordering::Greater);
        assert_eq!(o.cmp(&m(&[2, 0, 0]), &m(&[1, 1, 0])), Ordering::Greater);
        assert_eq!(o.cmp(&m(&[0, 1, 1]), &m(&[0, 1, 1])), Ordering::Equal);
    }

    #[test]
    fn block_order_eliminates() {
        // heavy variable dominates regardless of degree
        let o = TermOrder::eliminating([2usize]);
        let m = |v: &[u64]| Monomial::from_exponents(v.to_vec());
        assert_eq!(o.cmp(&m(&[0, 0, 1]), &m(&[5, 5, 0])), Ordering::Greater);
        assert_eq!(o.cmp(&m(&[9, 0, 1]), &m(&[0, 0, 2])), Ordering::Less);
        // ties fall back to grevlex on the light block
        assert_eq!(o.cmp(&m(&[2, 0, 1]), &m(&[1, 1, 1])), Ordering::Greater);
    }

    #[test]
    fn text_round_trip() {
        let r = qring(3);
        for s in [
            "y1^2 - x1^3*x3^2",
            "-x1^3*x3^2 + y1^2",
            "x3^2*y3 - y1*y2",
            "1/2*x1 - 3",
            "0",
            "x1*x2*x3*y1*y2*y3",
            "7",
            "-y3^6 + 2/3",
        ] {
            let parsed = p(&r, s);
            let printed = parsed.to_text(&TermOrder::Grevlex);
            assert_eq!(p(&r, &printed), parsed, "round trip through {printed}");
        }
    }

    #[test]
    fn text_canonical_form() {
        let r = qring(3);
        let f = p(&r, "y1^2 - x1^3*x3^2");
        assert_eq!(f.to_text(&TermOrder::Grevlex), "-x1^3*x3^2 + y1^2");
        let g = p(&r, "x3^2*y3 - y1*y2");
        assert_eq!(g.to_text(&TermOrder::Grevlex), "x3^2*y3 - y1*y2");
    }

    #[test]
    fn parse_rejects_garbage() {
        let r = qring(1);
        assert!(Polynomial::parse(&r, "").is_err());
        assert!(Polynomial::parse(&r, "z9 + 1").is_err());
        assert!(Polynomial::parse(&r, "x1 +").is_err());
        assert!(Polynomial::parse(&r, "x1 ^ x1").is_err());
        assert!(Polynomial::parse(&r, "1/0").is_err());
    }

    #[test]
    fn normalized_canonicalizes_scalars() {
        let r = qring(1);
        let order = TermOrder::Grevlex;
        let f = p(&r, "2*x1^2 - 4*y1");
        let g = p(&r, "-3*x1^2 + 6*y1");
        assert_eq!(f.normalized(&order), g.normalized(&order));
        assert_eq!(f.normalized(&order), p(&r, "x1^2 - 2*y1"));
        assert!(f.proportional(&g));
        assert!(!f.proportional(&p(&r, "x1^2 + 2*y1")));
    }

    #[test]
    fn fp_coefficients_reduce() {
        let r = Ring::xy(1, CoeffField::fp(5).unwrap());
        let f = p(&r, "7*x1 - 3");
        assert_eq!(f.to_text(&TermOrder::Grevlex), "2*x1 + 2");
    }
}
