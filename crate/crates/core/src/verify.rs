//! Machine verification of the set-theoretic definition at desk scale:
//! radical-membership certificates, exhaustive finite-field point-set
//! comparison, and the constructive root-of-unity lifting of solution
//! points back to parameters.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::exactmath::{gcd_u64, ExactMathError, FieldElement, PrimeField};
use crate::family::{equations, phi, EquationId, FamilyError, FamilyParams};
use crate::groebner::{BuchbergerConfig, GroebnerError, Ideal};
use crate::polyring::{Coeff, CoeffField, PolyError, Polynomial, TermOrder};
use crate::toricideal::{toric_ideal_with, ToricError};

/// Seed used by sampling runs unless overridden; always recorded in the
/// report.
pub const DEFAULT_SEED: u64 = 42;
/// Largest point count an exhaustive enumeration will attempt by default.
pub const DEFAULT_POINT_BUDGET: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error(transparent)]
    Groebner(#[from] GroebnerError),
    #[error(transparent)]
    Toric(#[from] ToricError),
    #[error(transparent)]
    Math(#[from] ExactMathError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("point has {got} coordinates, expected {expected}")]
    BadPoint { expected: usize, got: usize },
    #[error(
        "enumerating F_{q}^{dim} needs {needed} points, over the budget of {budget}; \
         use sampling instead"
    )]
    PointBudget {
        q: u64,
        dim: usize,
        needed: u128,
        budget: u64,
    },
    #[error("lift invariant violated: {0}")]
    LiftInvariant(String),
}

// ---------------------------------------------------------------------------
// compiled evaluation over F_q (u64 fast path for enumeration)

/// One polynomial compiled to coefficient/exponent form for fast modular
/// evaluation; exponents are reduced mod q-1 on nonzero bases via a power
/// table.
struct CompiledPoly {
    terms: Vec<(u64, Vec<(usize, u64)>)>,
}

pub(crate) struct CompiledSystem {
    q: u64,
    polys: Vec<CompiledPoly>,
    // pow[v][e] = v^e mod q, e up to the largest exponent appearing
    pow: Vec<Vec<u64>>,
}

impl CompiledSystem {
    pub(crate) fn new(polys: &[Polynomial], q: u64) -> Self {
        let mut max_exp = 1u64;
        let compiled: Vec<CompiledPoly> = polys
            .iter()
            .map(|p| {
                let CoeffField::Fp(field) = p.ring().field() else {
                    panic!("compiled evaluation needs prime-field polynomials");
                };
                assert_eq!(field.modulus(), q);
                CompiledPoly {
                    terms: p
                        .terms()
                        .map(|(m, c)| {
                            let Coeff::Fp(c) = c else { unreachable!() };
                            let vars: Vec<(usize, u64)> = m
                                .exponents()
                                .iter()
                                .enumerate()
                                .filter(|(_, &e)| e > 0)
                                .map(|(i, &e)| {
                                    max_exp = max_exp.max(e);
                                    (i, e)
                                })
                                .collect();
                            (*c, vars)
                        })
                        .collect(),
                }
            })
            .collect();
        let pow = (0..q)
            .map(|v| {
                let mut row = Vec::with_capacity(max_exp as usize + 1);
                let mut acc = 1u64;
                row.push(1);
                for _ in 0..max_exp {
                    acc = (u128::from(acc) * u128::from(v) % u128::from(q)) as u64;
                    row.push(acc);
                }
                row
            })
            .collect();
        CompiledSystem {
            q,
            polys: compiled,
            pow,
        }
    }

    fn eval_poly(&self, k: usize, point: &[u64]) -> u64 {
        let mut acc = 0u64;
        for (c, vars) in &self.polys[k].terms {
            let mut t = *c;
            for &(i, e) in vars {
                t = (u128::from(t) * u128::from(self.pow[point[i] as usize][e as usize])
                    % u128::from(self.q)) as u64;
            }
            acc = (acc + t) % self.q;
        }
        acc
    }

    /// True when every polynomial vanishes at the point.
    pub(crate) fn all_vanish(&self, point: &[u64]) -> bool {
        (0..self.polys.len()).all(|k| self.eval_poly(k, point) == 0)
    }
}

/// Visit every point of F_q^dim in lexicographic order.
fn for_each_point(q: u64, dim: usize, mut visit: impl FnMut(&[u64])) {
    let mut point = vec![0u64; dim];
    loop {
        visit(&point);
        let mut k = dim;
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            point[k] += 1;
            if point[k] < q {
                break;
            }
            point[k] = 0;
        }
    }
}

fn checked_budget(q: u64, dim: usize, budget: u64) -> Result<u64, VerifyError> {
    let needed = (0..dim).try_fold(1u128, |acc, _| acc.checked_mul(u128::from(q)));
    match needed {
        Some(n) if n <= u128::from(budget) => Ok(n as u64),
        n => Err(VerifyError::PointBudget {
            q,
            dim,
            needed: n.unwrap_or(u128::MAX),
            budget,
        }),
    }
}

// ---------------------------------------------------------------------------
// radical certificates

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CertStatus {
    InRadical,
    NotInRadical,
    BudgetExceeded { processed: u64, budget: u64 },
}

#[derive(Debug, Clone, Serialize)]
pub struct RadicalEntry {
    pub generator: String,
    #[serde(flatten)]
    pub status: CertStatus,
}

/// Per-generator radical membership of I(V) in the ideal of the n+1
/// equations. All booleans true means the equations cut out V
/// set-theoretically.
#[derive(Debug, Clone, Serialize)]
pub struct RadicalReport {
    pub field: String,
    pub dropped: Option<String>,
    pub entries: Vec<RadicalEntry>,
    pub all_in_radical: bool,
    pub elapsed_ms: u128,
}

pub fn radical_certificates(
    params: &FamilyParams,
    field: &CoeffField,
    drop: Option<EquationId>,
) -> Result<RadicalReport, VerifyError> {
    radical_certificates_with(params, field, drop, &BuchbergerConfig::default())
}

pub fn radical_certificates_with(
    params: &FamilyParams,
    field: &CoeffField,
    drop: Option<EquationId>,
    config: &BuchbergerConfig,
) -> Result<RadicalReport, VerifyError> {
    let start = Instant::now();
    let toric = toric_ideal_with(params, field, config)?;
    let eqs = equations(params, field)?;
    let gens = match drop {
        Some(id) => eqs.without(id)?,
        None => eqs.all(),
    };
    let candidate = Ideal::new(eqs.ring().clone(), gens)?;
    // opportunistically close the candidate ideal so every radical run can
    // seed from the cached basis; skipped silently when the closure itself
    // is more expensive than the trial budget allows
    let trial = BuchbergerConfig {
        spair_budget: config.spair_budget.min(100_000),
        ..config.clone()
    };
    let _ = candidate.groebner_basis_with(&TermOrder::Grevlex, &trial);
    let mut entries = Vec::new();
    for g in toric.ideal.generators() {
        let status = match candidate.radical_member_with(g, config) {
            Ok(true) => CertStatus::InRadical,
            Ok(false) => CertStatus::NotInRadical,
            Err(GroebnerError::BudgetExceeded { processed, budget }) => {
                CertStatus::BudgetExceeded { processed, budget }
            }
            Err(e) => return Err(e.into()),
        };
        entries.push(RadicalEntry {
            generator: g.to_text(&TermOrder::Grevlex),
            status,
        });
    }
    Ok(RadicalReport {
        field: match field {
            CoeffField::Q => "Q".to_string(),
            CoeffField::Fp(f) => format!("F{}", f.modulus()),
        },
        dropped: drop.map(|id| id.to_string()),
        all_in_radical: entries.iter().all(|e| e.status == CertStatus::InRadical),
        entries,
        elapsed_ms: start.elapsed().as_millis(),
    })
}

// ---------------------------------------------------------------------------
// point-set equality

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnumerationMode {
    Exhaustive,
    Sample { count: u64, seed: u64 },
}

/// F_q-point comparison between the n+1 equations and the full ideal
/// generators. `mismatches` lists points satisfying one system but not the
/// other; the set-theoretic statement predicts it stays empty.
#[derive(Debug, Clone, Serialize)]
pub struct PointSetReport {
    pub q: u64,
    pub mode: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub points_checked: u64,
    pub count_equations: u64,
    pub count_ideal: u64,
    pub mismatches: Vec<Vec<u64>>,
}

pub fn point_set_equality(
    params: &FamilyParams,
    q: u64,
    mode: EnumerationMode,
) -> Result<PointSetReport, VerifyError> {
    point_set_equality_with(params, q, mode, DEFAULT_POINT_BUDGET, &BuchbergerConfig::default())
}

pub fn point_set_equality_with(
    params: &FamilyParams,
    q: u64,
    mode: EnumerationMode,
    budget: u64,
    config: &BuchbergerConfig,
) -> Result<PointSetReport, VerifyError> {
    let field = CoeffField::fp(q)?;
    let eqs = equations(params, &field)?;
    let toric = toric_ideal_with(params, &field, config)?;
    let eq_system = CompiledSystem::new(&eqs.all(), q);
    let ideal_system = CompiledSystem::new(toric.ideal.generators(), q);
    let dim = 2 * params.n();

    let mut count_equations = 0u64;
    let mut count_ideal = 0u64;
    let mut mismatches: Vec<Vec<u64>> = Vec::new();
    let mut points_checked = 0u64;
    let mut check = |point: &[u64]| {
        points_checked += 1;
        let on_eqs = eq_system.all_vanish(point);
        let on_ideal = ideal_system.all_vanish(point);
        count_equations += u64::from(on_eqs);
        count_ideal += u64::from(on_ideal);
        if on_eqs != on_ideal {
            mismatches.push(point.to_vec());
        }
    };

    let (mode_name, seed) = match mode {
        EnumerationMode::Exhaustive => {
            checked_budget(q, dim, budget)?;
            for_each_point(q, dim, &mut check);
            ("exhaustive".to_string(), None)
        }
        EnumerationMode::Sample { count, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut point = vec![0u64; dim];
            for _ in 0..count {
                for slot in point.iter_mut() {
                    *slot = rng.random_range(0..q);
                }
                check(&point);
            }
            (format!("sample({count})"), Some(seed))
        }
    };
    mismatches.sort();
    Ok(PointSetReport {
        q,
        mode: mode_name,
        seed,
        points_checked,
        count_equations,
        count_ideal,
        mismatches,
    })
}

// ---------------------------------------------------------------------------
// constructive lifting (the proof of the set-theoretic statement, run
// forwards on concrete points)

/// Result of lifting a solution point through the parametrization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LiftOutcome {
    /// phi(u) equals the input point exactly.
    Lifted { u: Vec<FieldElement> },
    /// The named coordinate has no root of the required degree in F_q;
    /// the point is rational on V but needs a field extension to
    /// parametrize.
    NeedsExtension {
        /// 0-based index into x_1..x_{n-1}
        coordinate: usize,
        value: u64,
        root_degree: u64,
    },
    /// The point does not satisfy the n+1 equations.
    NotOnVariety,
}

/// Lift a point of V(F_1..F_{n-1}, F, G) back through phi, following the
/// constructive argument: take d_i-th roots of the x-coordinates, correct
/// the y_n coordinate by a product of roots of unity, then correct each
/// y_i by a d_i-th root of unity obtained from the coprimality of d_i and
/// f_i. The closing identity for y_n is forced by the Bezout relation.
pub fn lift_point(
    params: &FamilyParams,
    field: &PrimeField,
    w: &[FieldElement],
) -> Result<LiftOutcome, VerifyError> {
    let n = params.n();
    if w.len() != 2 * n {
        return Err(VerifyError::BadPoint {
            expected: 2 * n,
            got: w.len(),
        });
    }
    let coeff_field = CoeffField::Fp(field.clone());
    let eqs = equations(params, &coeff_field)?;
    for (_, e) in eqs.iter() {
        if !e.evaluate(w)?.is_zero() {
            return Ok(LiftOutcome::NotOnVariety);
        }
    }
    let q = field.modulus();
    let d = params.d();
    let f = params.f();
    let g = params.g();
    let h = params.h();

    // step 1: u_i is a d_i-th root of x_i (least representative), u_n = x_n
    let mut u: Vec<FieldElement> = Vec::with_capacity(n);
    for i in 0..n - 1 {
        let roots = field.nth_roots(w[i], d[i])?;
        match roots.first() {
            Some(r) => u.push(*r),
            None => {
                return Ok(LiftOutcome::NeedsExtension {
                    coordinate: i,
                    value: w[i].value(),
                    root_degree: d[i],
                })
            }
        }
    }
    u.push(w[n - 1]);

    // orders of the root-of-unity groups available in F_q
    let m: Vec<u64> = d.iter().map(|&di| gcd_u64(di, q - 1)).collect();

    // step 2: fix y_n. Only needed when all u_i are nonzero; otherwise F
    // forces y_n = 0 and the product vanishes as well.
    if u[..n - 1].iter().all(|x| !x.is_zero()) {
        let mut prod = field.one();
        for i in 0..n - 1 {
            prod = prod * u[i].pow_u64(h[i]);
        }
        let eta = w[2 * n - 1] * prod.inv().expect("product of nonzero elements");
        if eta.value() != 1 {
            // zeta_i generates the d_i-th roots of unity present in F_q;
            // by gcd(d_i, h_i) = 1 the product of zeta_i^{h_i} generates
            // the full group the correction must range over.
            let zetas: Vec<FieldElement> = m
                .iter()
                .map(|&mi| field.element_of_order(mi))
                .collect::<Result<_, _>>()?;
            let mut omega = field.one();
            for i in 0..n - 1 {
                omega = omega * zetas[i].pow_u64(h[i]);
            }
            let big_m: u64 = m.iter().product();
            let mut s = None;
            let mut acc = field.one();
            for k in 0..big_m {
                if acc == eta {
                    s = Some(k);
                    break;
                }
                acc = acc * omega;
            }
            let Some(s) = s else {
                return Err(VerifyError::LiftInvariant(format!(
                    "eta={} not a power of the correction generator",
                    eta.value()
                )));
            };
            for i in 0..n - 1 {
                u[i] = u[i] * zetas[i].pow_u64(s);
            }
        }
    }

    // step 3: fix each y_i when x_n != 0 (otherwise both sides vanish);
    // theta_i = omega_i^{f_i} for a d_i-th root of unity omega_i by
    // gcd(d_i, f_i) = 1, and replacing u_i by u_i*omega_i restores y_i.
    // The y_n identity survives via G and the Bezout relation.
    if !u[n - 1].is_zero() {
        for i in 0..n - 1 {
            if u[i].is_zero() {
                continue;
            }
            let expected = u[i].pow_u64(f[i]) * u[n - 1].pow_u64(g[i]);
            let theta = w[n + i] * expected.inv().expect("nonzero product");
            if theta.value() == 1 {
                continue;
            }
            // omega_i = theta^{f_i^{-1} mod m_i}
            let mi = m[i];
            let inv = invert_mod(f[i] % mi, mi).ok_or_else(|| {
                VerifyError::LiftInvariant(format!("f_{} not invertible mod {}", i + 1, mi))
            })?;
            let omega_i = theta.pow_u64(inv);
            u[i] = u[i] * omega_i;
        }
    }

    let image = phi(params, &u)?;
    if image != w {
        return Err(VerifyError::LiftInvariant(format!(
            "phi(u) != w after corrections (u = {:?})",
            u.iter().map(|x| x.value()).collect::<Vec<_>>()
        )));
    }
    Ok(LiftOutcome::Lifted { u })
}

fn invert_mod(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let (g, s, _) = crate::exactmath::ext_gcd(&crate::Int::from(a), &crate::Int::from(m));
    if g != crate::Int::from(1u32) {
        return None;
    }
    let r = num::Integer::mod_floor(&s, &crate::Int::from(m));
    num::ToPrimitive::to_u64(&r)
}

// ---------------------------------------------------------------------------
// exhaustive audit

/// Summary of a full lift audit over F_q: every solution point of the
/// equations either lifts with an exact round trip or provably needs a
/// field extension, and every parameter point maps into the solution set.
#[derive(Debug, Clone, Serialize)]
pub struct LiftAuditSummary {
    pub q: u64,
    pub total_points: u64,
    pub solution_count: u64,
    pub lifted: u64,
    pub needs_extension: u64,
    pub forward_points: u64,
    pub forward_failures: u64,
    pub unexplained: Vec<String>,
    pub pass: bool,
}

impl std::fmt::Display for LiftAuditSummary {
    fn fmt(&self, out: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            out,
            "{} lift-audit q={}: {} solutions, {} lifted, {} need extension, \
             {}/{} forward points on V, {} unexplained",
            if self.pass { "PASS" } else { "FAIL" },
            self.q,
            self.solution_count,
            self.lifted,
            self.needs_extension,
            self.forward_points - self.forward_failures,
            self.forward_points,
            self.unexplained.len()
        )
    }
}

pub fn exhaustive_lift_audit(params: &FamilyParams, q: u64) -> Result<LiftAuditSummary, VerifyError> {
    exhaustive_lift_audit_with(params, q, DEFAULT_POINT_BUDGET)
}

pub fn exhaustive_lift_audit_with(
    params: &FamilyParams,
    q: u64,
    budget: u64,
) -> Result<LiftAuditSummary, VerifyError> {
    let n = params.n();
    let dim = 2 * n;
    let total_points = checked_budget(q, dim, budget)?;
    let field = PrimeField::new(q)?;
    let coeff_field = CoeffField::Fp(field.clone());
    let eqs = equations(params, &coeff_field)?;
    let system = CompiledSystem::new(&eqs.all(), q);

    let mut solutions: Vec<Vec<u64>> = Vec::new();
    for_each_point(q, dim, |point| {
        if system.all_vanish(point) {
            solutions.push(point.to_vec());
        }
    });

    let mut lifted = 0u64;
    let mut needs_extension = 0u64;
    let mut unexplained: Vec<String> = Vec::new();
    for point in &solutions {
        let w: Vec<FieldElement> = point.iter().map(|&v| field.elem(v)).collect();
        match lift_point(params, &field, &w)? {
            LiftOutcome::Lifted { u } => {
                // round trip is rechecked independently of lift_point
                let image = phi(params, &u)?;
                if image == w {
                    lifted += 1;
                } else {
                    unexplained.push(format!("lift of {point:?} does not round-trip"));
                }
            }
            LiftOutcome::NeedsExtension {
                coordinate: _,
                value,
                root_degree,
            } => {
                // confirm the missing root by brute force
                let has_root = (0..q).any(|x| {
                    (0..root_degree)
                        .fold(1u64, |acc, _| (u128::from(acc) * u128::from(x) % u128::from(q)) as u64)
                        == value
                });
                if has_root {
                    unexplained.push(format!(
                        "claimed missing {root_degree}-th root of {value} exists (point {point:?})"
                    ));
                } else {
                    needs_extension += 1;
                }
            }
            LiftOutcome::NotOnVariety => {
                unexplained.push(format!(
                    "enumerated solution {point:?} rejected by exact evaluation"
                ));
            }
        }
    }

    // forward inclusion: every phi(u) satisfies the equations
    let mut forward_failures = 0u64;
    let mut forward_points = 0u64;
    for_each_point(q, n, |upoint| {
        forward_points += 1;
        let u: Vec<FieldElement> = upoint.iter().map(|&v| field.elem(v)).collect();
        let w = phi(params, &u).expect("parameter point is well-formed");
        let wv: Vec<u64> = w.iter().map(|x| x.value()).collect();
        if !system.all_vanish(&wv) {
            forward_failures += 1;
        }
    });

    let pass = unexplained.is_empty() && forward_failures == 0;
    Ok(LiftAuditSummary {
        q,
        total_points,
        solution_count: solutions.len() as u64,
        lifted,
        needs_extension,
        forward_points,
        forward_failures,
        unexplained,
        pass,
    })
}
