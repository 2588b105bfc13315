//! The parametric family of affine toric varieties: parameter validation,
//! the exponent matrix T, the monomial parametrization phi, and the n+1
//! binomials F_1..F_{n-1}, F, G built from Bezout coefficients.
//!
//! A member is given by n >= 3 and four vectors d, f, g, h of n-1 positive
//! integers with gcd(d_i, f_i) = gcd(d_i, h_i) = 1, the d_i pairwise
//! coprime, and at least two distinct primes dividing the d_i.

use std::fmt;
use std::str::FromStr;

use num::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactmath::{ext_gcd, factorize_u64, FieldElement, Int};
use crate::lattice::IntMatrix;
use crate::polyring::{binomial_from_vector, BinomialVector, CoeffField, Polynomial, Ring};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FamilyError {
    #[error("n must be at least 3, got {0}")]
    SmallN(usize),
    #[error("parameter vector `{name}` must have length n-1 = {expected}, got {got}")]
    BadLength {
        name: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("parameter `{name}[{index}]` must be a positive integer")]
    NonPositive { name: &'static str, index: usize },
    #[error("family parameters violate: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
    #[error("equation index {0} out of range 1..={1}")]
    IndexOutOfRange(usize, usize),
    #[error("parameter point has {got} coordinates, expected {expected}")]
    PointLength { expected: usize, got: usize },
    #[error("parameter point mixes different prime fields")]
    MixedModuli,
    #[error("unknown equation name `{0}` (expected F1..F{1}, F or G)")]
    UnknownEquation(String, usize),
}

/// A violated arithmetic condition; violations are data, not faults.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "condition", rename_all = "snake_case")]
pub enum Violation {
    /// condition (1): gcd(d_i, f_i) = 1
    DNotCoprimeToF { i: usize },
    /// condition (1b): gcd(d_i, h_i) = 1
    DNotCoprimeToH { i: usize },
    /// condition (2): gcd(d_i, d_j) = 1 for i != j
    DPairNotCoprime { i: usize, j: usize },
    /// no two distinct primes divide the d_i
    NoTwoPrimes,
}

impl fmt::Display for Violation {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DNotCoprimeToF { i } => {
                write!(out, "condition (1) violated at i={i}: gcd(d_{i}, f_{i}) != 1")
            }
            Violation::DNotCoprimeToH { i } => {
                write!(out, "condition (1b) violated at i={i}: gcd(d_{i}, h_{i}) != 1")
            }
            Violation::DPairNotCoprime { i, j } => {
                write!(out, "condition (2) violated at ({i},{j}): gcd(d_{i}, d_{j}) != 1")
            }
            Violation::NoTwoPrimes => {
                write!(out, "two-prime condition violated: no two distinct primes divide the d_i")
            }
        }
    }
}

/// Two distinct primes dividing entries of d, witnessing the two-prime
/// hypothesis. Indices are 1-based and may coincide.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PrimeWitness {
    pub p: u64,
    pub q: u64,
    pub i: usize,
    pub j: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawFamilyParams {
    n: usize,
    d: Vec<u64>,
    f: Vec<u64>,
    g: Vec<u64>,
    h: Vec<u64>,
}

/// The integer tuple (n; d; f; g; h) defining one family member.
/// Construction checks structure (lengths and positivity); the arithmetic
/// conditions are checked by [`FamilyParams::validate`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawFamilyParams", into = "RawFamilyParams")]
pub struct FamilyParams {
    n: usize,
    d: Vec<u64>,
    f: Vec<u64>,
    g: Vec<u64>,
    h: Vec<u64>,
}

impl TryFrom<RawFamilyParams> for FamilyParams {
    type Error = FamilyError;
    fn try_from(raw: RawFamilyParams) -> Result<Self, FamilyError> {
        FamilyParams::new(raw.n, raw.d, raw.f, raw.g, raw.h)
    }
}

impl From<FamilyParams> for RawFamilyParams {
    fn from(p: FamilyParams) -> RawFamilyParams {
        RawFamilyParams {
            n: p.n,
            d: p.d,
            f: p.f,
            g: p.g,
            h: p.h,
        }
    }
}

impl FamilyParams {
    pub fn new(
        n: usize,
        d: Vec<u64>,
        f: Vec<u64>,
        g: Vec<u64>,
        h: Vec<u64>,
    ) -> Result<Self, FamilyError> {
        if n < 3 {
            return Err(FamilyError::SmallN(n));
        }
        for (name, v) in [("d", &d), ("f", &f), ("g", &g), ("h", &h)] {
            if v.len() != n - 1 {
                return Err(FamilyError::BadLength {
                    name,
                    expected: n - 1,
                    got: v.len(),
                });
            }
            if let Some(index) = v.iter().position(|&x| x == 0) {
                return Err(FamilyError::NonPositive { name, index });
            }
        }
        Ok(FamilyParams { n, d, f, g, h })
    }

    /// Example 1 of the source family: n=3, d=(2,3), f=(3,5), g=(1,1),
    /// h=(3,5).
    pub fn example1() -> Self {
        FamilyParams::new(3, vec![2, 3], vec![3, 5], vec![1, 1], vec![3, 5]).unwrap()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> &[u64] {
        &self.d
    }

    pub fn f(&self) -> &[u64] {
        &self.f
    }

    pub fn g(&self) -> &[u64] {
        &self.g
    }

    pub fn h(&self) -> &[u64] {
        &self.h
    }

    /// Check conditions (1), (1b), (2) and the two-prime hypothesis.
    /// Reports every violated condition; on success returns a witness pair
    /// of distinct primes.
    pub fn validate(&self) -> Result<PrimeWitness, Vec<Violation>> {
        let mut violations = Vec::new();
        let k = self.n - 1;
        for i in 0..k {
            if crate::exactmath::gcd_u64(self.d[i], self.f[i]) != 1 {
                violations.push(Violation::DNotCoprimeToF { i: i + 1 });
            }
            if crate::exactmath::gcd_u64(self.d[i], self.h[i]) != 1 {
                violations.push(Violation::DNotCoprimeToH { i: i + 1 });
            }
        }
        for i in 0..k {
            for j in i + 1..k {
                if crate::exactmath::gcd_u64(self.d[i], self.d[j]) != 1 {
                    violations.push(Violation::DPairNotCoprime { i: i + 1, j: j + 1 });
                }
            }
        }
        // (prime, 1-based index) pairs, smallest prime first
        let mut candidates: Vec<(u64, usize)> = Vec::new();
        for (i, &di) in self.d.iter().enumerate() {
            for (p, _) in factorize_u64(di) {
                candidates.push((p, i + 1));
            }
        }
        candidates.sort_unstable();
        let witness = candidates.first().and_then(|&(p, i)| {
            candidates
                .iter()
                .find(|&&(q, _)| q != p)
                .map(|&(q, j)| PrimeWitness { p, q, i, j })
        });
        if witness.is_none() {
            violations.push(Violation::NoTwoPrimes);
        }
        match witness {
            Some(w) if violations.is_empty() => Ok(w),
            _ => Err(violations),
        }
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_ok()
    }

    /// The polynomial ring K[x_1..x_n, y_1..y_n] over the given field.
    pub fn ring(&self, field: &CoeffField) -> Ring {
        Ring::xy(self.n, field.clone())
    }
}

/// The n x 2n matrix whose columns are the semigroup generators, in the
/// variable order x_1..x_n, y_1..y_n:
/// d_1 e_1, ..., d_{n-1} e_{n-1}, e_n, f_1 e_1 + g_1 e_n, ...,
/// f_{n-1} e_{n-1} + g_{n-1} e_n, h_1 e_1 + ... + h_{n-1} e_{n-1}.
pub fn exponent_matrix(params: &FamilyParams) -> IntMatrix {
    let n = params.n;
    let mut m = IntMatrix::zeros(n, 2 * n);
    for i in 0..n - 1 {
        *m.at_mut(i, i) = Int::from(params.d[i]);
    }
    *m.at_mut(n - 1, n - 1) = Int::one();
    for i in 0..n - 1 {
        *m.at_mut(i, n + i) = Int::from(params.f[i]);
        *m.at_mut(n - 1, n + i) = Int::from(params.g[i]);
    }
    for i in 0..n - 1 {
        *m.at_mut(i, 2 * n - 1) = Int::from(params.h[i]);
    }
    m
}

/// The monomial parametrization: maps u in F_q^n to
/// (u_1^{d_1}, ..., u_{n-1}^{d_{n-1}}, u_n, u_1^{f_1} u_n^{g_1}, ...,
///  u_{n-1}^{f_{n-1}} u_n^{g_{n-1}}, u_1^{h_1} ... u_{n-1}^{h_{n-1}}).
pub fn phi(params: &FamilyParams, u: &[FieldElement]) -> Result<Vec<FieldElement>, FamilyError> {
    let n = params.n;
    if u.len() != n {
        return Err(FamilyError::PointLength {
            expected: n,
            got: u.len(),
        });
    }
    if u.iter().any(|x| x.modulus() != u[0].modulus()) {
        return Err(FamilyError::MixedModuli);
    }
    let mut w = Vec::with_capacity(2 * n);
    for (ui, &di) in u.iter().zip(&params.d) {
        w.push(ui.pow_u64(di));
    }
    w.push(u[n - 1]);
    for (i, ui) in u[..n - 1].iter().enumerate() {
        w.push(ui.pow_u64(params.f[i]) * u[n - 1].pow_u64(params.g[i]));
    }
    let mut yn = u[0].pow_u64(params.h[0]);
    for (ui, &hi) in u[1..n - 1].iter().zip(&params.h[1..]) {
        yn = yn * ui.pow_u64(hi);
    }
    w.push(yn);
    Ok(w)
}

/// One Bezout pair per index: h_i = alpha_i d_i + beta_i f_i with the
/// canonical choice beta_i in [0, d_i).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BezoutPair {
    pub alpha: Int,
    pub beta: Int,
}

pub fn bezout_pairs(params: &FamilyParams) -> Result<Vec<BezoutPair>, FamilyError> {
    let mut out = Vec::with_capacity(params.n - 1);
    for i in 0..params.n - 1 {
        let d = Int::from(params.d[i]);
        let f = Int::from(params.f[i]);
        let h = Int::from(params.h[i]);
        let (g, s, _) = ext_gcd(&f, &d);
        if !g.is_one() {
            return Err(FamilyError::Invalid(vec![Violation::DNotCoprimeToF {
                i: i + 1,
            }]));
        }
        // beta = h * f^{-1} mod d, reduced into [0, d)
        let beta = if d.is_one() {
            Int::zero()
        } else {
            num::Integer::mod_floor(&(&h * &s), &d)
        };
        let alpha = (&h - &beta * &f) / &d;
        debug_assert_eq!(&alpha * &d + &beta * &f, h);
        out.push(BezoutPair { alpha, beta });
    }
    Ok(out)
}

/// Exponent vector of F_i = y_i^{d_i} - x_i^{f_i} x_n^{d_i g_i}; `i` is
/// 1-based.
pub fn fi_vector(params: &FamilyParams, i: usize) -> Result<BinomialVector, FamilyError> {
    let n = params.n;
    if i == 0 || i >= n {
        return Err(FamilyError::IndexOutOfRange(i, n - 1));
    }
    let k = i - 1;
    let mut alpha = vec![Int::zero(); n];
    let mut beta = vec![Int::zero(); n];
    alpha[k] = -Int::from(params.f[k]);
    alpha[n - 1] = -(Int::from(params.d[k]) * Int::from(params.g[k]));
    beta[k] = Int::from(params.d[k]);
    Ok(BinomialVector::new(alpha, beta))
}

/// Exponent vector of F = y_n^{d_1...d_{n-1}} - prod_i x_i^{h_i prod_{k != i} d_k}.
pub fn f_vector(params: &FamilyParams) -> BinomialVector {
    let n = params.n;
    let mut alpha = vec![Int::zero(); n];
    let mut beta = vec![Int::zero(); n];
    let total: Int = params.d.iter().map(|&d| Int::from(d)).product();
    for (i, slot) in alpha[..n - 1].iter_mut().enumerate() {
        let others = &total / Int::from(params.d[i]);
        *slot = -(Int::from(params.h[i]) * others);
    }
    beta[n - 1] = total;
    BinomialVector::new(alpha, beta)
}

/// Exponent vector of G = B_{(alpha_1..alpha_{n-1}, -sum beta_i g_i,
/// beta_1..beta_{n-1}, -1)} from the canonical Bezout pairs.
pub fn g_vector(params: &FamilyParams) -> Result<BinomialVector, FamilyError> {
    let n = params.n;
    let pairs = bezout_pairs(params)?;
    let mut alpha = vec![Int::zero(); n];
    let mut beta = vec![Int::zero(); n];
    let mut gsum = Int::zero();
    for (i, pair) in pairs.iter().enumerate() {
        alpha[i] = pair.alpha.clone();
        beta[i] = pair.beta.clone();
        gsum += &pair.beta * Int::from(params.g[i]);
    }
    alpha[n - 1] = -gsum;
    beta[n - 1] = -Int::one();
    Ok(BinomialVector::new(alpha, beta))
}

/// F_i = y_i^{d_i} - x_i^{f_i} x_n^{d_i g_i} as a polynomial; `i` is 1-based.
pub fn build_fi(
    params: &FamilyParams,
    field: &CoeffField,
    i: usize,
) -> Result<Polynomial, FamilyError> {
    let ring = params.ring(field);
    let v = fi_vector(params, i)?;
    Ok(binomial_from_vector(&ring, &v).expect("F_i vector is nonzero"))
}

/// F = y_n^{d_1...d_{n-1}} - x_1^{h_1 d_2...d_{n-1}} ... x_{n-1}^{d_1...d_{n-2} h_{n-1}}.
pub fn build_f(params: &FamilyParams, field: &CoeffField) -> Polynomial {
    let ring = params.ring(field);
    binomial_from_vector(&ring, &f_vector(params)).expect("F vector is nonzero")
}

/// G, the Bezout correction binomial.
pub fn build_g(params: &FamilyParams, field: &CoeffField) -> Result<Polynomial, FamilyError> {
    let ring = params.ring(field);
    let v = g_vector(params)?;
    Ok(binomial_from_vector(&ring, &v).expect("G vector has beta_n = -1"))
}

/// codim V = n. Cross-checked against 2n - rank(T) in the test suites.
pub fn codim(params: &FamilyParams) -> usize {
    params.n
}

/// Identifies one of the n+1 equations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EquationId {
    /// F_i, 1-based, i in 1..=n-1
    Fi(usize),
    F,
    G,
}

impl fmt::Display for EquationId {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EquationId::Fi(i) => write!(out, "F{i}"),
            EquationId::F => write!(out, "F"),
            EquationId::G => write!(out, "G"),
        }
    }
}

impl FromStr for EquationId {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let up = s.trim().to_ascii_uppercase();
        match up.as_str() {
            "F" => Ok(EquationId::F),
            "G" => Ok(EquationId::G),
            _ => {
                if let Some(rest) = up.strip_prefix('F') {
                    if let Ok(i) = rest.parse::<usize>() {
                        if i >= 1 {
                            return Ok(EquationId::Fi(i));
                        }
                    }
                }
                Err(format!("unknown equation name `{s}`"))
            }
        }
    }
}

/// The n+1 binomials F_1, ..., F_{n-1}, F, G over a fixed field.
#[derive(Debug, Clone, PartialEq)]
pub struct EquationSet {
    ring: Ring,
    f_list: Vec<Polynomial>,
    f: Polynomial,
    g: Polynomial,
}

impl EquationSet {
    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn f_list(&self) -> &[Polynomial] {
        &self.f_list
    }

    pub fn f(&self) -> &Polynomial {
        &self.f
    }

    pub fn g(&self) -> &Polynomial {
        &self.g
    }

    /// Total count, always n+1.
    pub fn len(&self) -> usize {
        self.f_list.len() + 2
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn iter(&self) -> impl Iterator<Item = (EquationId, &Polynomial)> {
        self.f_list
            .iter()
            .enumerate()
            .map(|(k, p)| (EquationId::Fi(k + 1), p))
            .chain([(EquationId::F, &self.f), (EquationId::G, &self.g)])
    }

    pub fn get(&self, id: EquationId) -> Result<&Polynomial, FamilyError> {
        match id {
            EquationId::Fi(i) if i >= 1 && i <= self.f_list.len() => Ok(&self.f_list[i - 1]),
            EquationId::Fi(i) => Err(FamilyError::IndexOutOfRange(i, self.f_list.len())),
            EquationId::F => Ok(&self.f),
            EquationId::G => Ok(&self.g),
        }
    }

    pub fn all(&self) -> Vec<Polynomial> {
        self.iter().map(|(_, p)| p.clone()).collect()
    }

    /// All equations except the dropped one.
    pub fn without(&self, id: EquationId) -> Result<Vec<Polynomial>, FamilyError> {
        self.get(id)?;
        Ok(self
            .iter()
            .filter(|(name, _)| *name != id)
            .map(|(_, p)| p.clone())
            .collect())
    }
}

/// Build the full equation set for a validated family member.
pub fn equations(params: &FamilyParams, field: &CoeffField) -> Result<EquationSet, FamilyError> {
    params.validate().map_err(FamilyError::Invalid)?;
    let ring = params.ring(field);
    let f_list = (1..params.n)
        .map(|i| build_fi(params, field, i))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(EquationSet {
        ring,
        f: build_f(params, field),
        g: build_g(params, field)?,
        f_list,
    })
}
