//! Buchberger's algorithm and the decision procedures derived from it:
//! ideal membership, ideal equality, elimination, saturation, and radical
//! membership via the Rabinowitsch trick.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap, HashSet};
use std::sync::{Arc, Mutex};

use thiserror::Error;

use crate::polyring::{Coeff, Monomial, PolyError, Polynomial, Ring, TermOrder};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroebnerError {
    #[error("S-pair budget exhausted after {processed} pairs (budget {budget})")]
    BudgetExceeded { processed: u64, budget: u64 },
    #[error("ideals live in different rings")]
    RingMismatch,
    #[error("saturation multiplier must be a single nonconstant term")]
    NotMonomial,
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Knobs for the Buchberger run. The S-pair budget makes pathological
/// inputs fail loudly instead of appearing to hang.
#[derive(Debug, Clone)]
pub struct BuchbergerConfig {
    pub spair_budget: u64,
    /// Buchberger's chain criterion; the coprime criterion is always on.
    pub use_chain_criterion: bool,
}

impl Default for BuchbergerConfig {
    fn default() -> Self {
        BuchbergerConfig {
            spair_budget: 1_000_000,
            use_chain_criterion: true,
        }
    }
}

#[derive(PartialEq, Eq)]
struct PairKey {
    degree: u64,
    lcm: Monomial,
    i: usize,
    j: usize,
}

impl Ord for PairKey {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // normal strategy: lcm degree, then lexicographic on the lcm
        // exponents, then pair indices
        self.degree
            .cmp(&other.degree)
            .then_with(|| self.lcm.cmp(&other.lcm))
            .then_with(|| (self.i, self.j).cmp(&(other.i, other.j)))
    }
}

impl PartialOrd for PairKey {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

fn leading_owned(p: &Polynomial, order: &TermOrder) -> (Monomial, Coeff) {
    let (m, c) = p.leading(order).expect("nonzero polynomial");
    (m.clone(), c.clone())
}

/// Full normal form of `p` modulo `basis` with precomputed leading terms.
fn normal_form_with(
    p: &Polynomial,
    basis: &[Polynomial],
    leads: &[(Monomial, Coeff)],
    order: &TermOrder,
) -> Polynomial {
    let ring = p.ring().clone();
    let field = ring.field().clone();
    let mut remainder = Polynomial::zero(ring.clone());
    let mut work = p.clone();
    'outer: while !work.is_zero() {
        let (lm, lc) = leading_owned(&work, order);
        for (k, (dm, dc)) in leads.iter().enumerate() {
            if let Some(q_mono) = dm.div_into(&lm) {
                let q_coeff = field.div(&lc, dc);
                work = &work - &basis[k].term_mul(&q_mono, &q_coeff);
                continue 'outer;
            }
        }
        let t = Polynomial::from_terms(ring.clone(), vec![(lm, lc)]);
        remainder = &remainder + &t;
        work = &work - &t;
    }
    remainder
}

/// Full normal form of `p` modulo a list of nonzero polynomials; the
/// reducer is the first divisor whose leading monomial divides the lead.
pub fn normal_form(p: &Polynomial, basis: &[Polynomial], order: &TermOrder) -> Polynomial {
    let kept: Vec<Polynomial> = basis.iter().filter(|b| !b.is_zero()).cloned().collect();
    let leads: Vec<_> = kept.iter().map(|b| leading_owned(b, order)).collect();
    normal_form_with(p, &kept, &leads, order)
}

fn s_polynomial(
    f: &Polynomial,
    g: &Polynomial,
    lf: &(Monomial, Coeff),
    lg: &(Monomial, Coeff),
) -> Polynomial {
    let field = f.ring().field().clone();
    let lcm = lf.0.lcm(&lg.0);
    let mf = lf.0.div_into(&lcm).expect("lcm divisible by lead");
    let mg = lg.0.div_into(&lcm).expect("lcm divisible by lead");
    let a = f.term_mul(&mf, &field.inv(&lf.1));
    let b = g.term_mul(&mg, &field.inv(&lg.1));
    &a - &b
}

/// The unique reduced Groebner basis of the ideal generated by `gens`,
/// sorted by increasing leading monomial. Elements are monic over F_p and
/// content-free with a positive leading coefficient over Q.
pub fn buchberger(
    gens: &[Polynomial],
    order: &TermOrder,
    config: &BuchbergerConfig,
) -> Result<Vec<Polynomial>, GroebnerError> {
    buchberger_seeded(&[], gens, order, config)
}

/// Buchberger with a seed: `prefix` must already be a Groebner basis (under
/// `order`) of the ideal it generates, so its internal S-pairs are known to
/// reduce to zero and are never scheduled. Used to extend a cached basis by
/// a few extra generators without redoing its work.
pub(crate) fn buchberger_seeded(
    prefix: &[Polynomial],
    extra: &[Polynomial],
    order: &TermOrder,
    config: &BuchbergerConfig,
) -> Result<Vec<Polynomial>, GroebnerError> {
    let mut basis: Vec<Polynomial> = prefix
        .iter()
        .chain(extra.iter())
        .filter(|p| !p.is_zero())
        .map(|p| p.normalized(order))
        .collect();
    if basis.is_empty() {
        return Ok(vec![]);
    }
    let prefix_len = prefix.iter().filter(|p| !p.is_zero()).count();
    let mut leads: Vec<(Monomial, Coeff)> =
        basis.iter().map(|p| leading_owned(p, order)).collect();

    let mut queue: BinaryHeap<Reverse<PairKey>> = BinaryHeap::new();
    // pairs not yet popped, with their lcms (for install-time pruning)
    let mut pending: HashMap<(usize, usize), Monomial> = HashMap::new();
    // pairs whose S-polynomial is known to reduce to zero over the current
    // basis: processed, coprime-skipped, chain-skipped, or prefix-internal
    let mut achieved: HashSet<(usize, usize)> = HashSet::new();
    // pending pairs cancelled by the install-time criterion; their
    // reduction is implied by pairs with properly smaller lcms
    let mut cancelled: HashSet<(usize, usize)> = HashSet::new();

    for j in 1..prefix_len {
        for i in 0..j {
            achieved.insert((i, j));
        }
    }

    // schedule all pairs (i, m); coprime-lead pairs are recorded as
    // achieved without being queued, and pending pairs made redundant by
    // the new lead are cancelled (both replacement pairs have properly
    // smaller lcms, so no circularity)
    let prune = config.use_chain_criterion;
    let install = |m: usize,
                   leads: &[(Monomial, Coeff)],
                   queue: &mut BinaryHeap<Reverse<PairKey>>,
                   pending: &mut HashMap<(usize, usize), Monomial>,
                   achieved: &mut HashSet<(usize, usize)>,
                   cancelled: &mut HashSet<(usize, usize)>| {
        let lm = &leads[m].0;
        if prune {
            for (&(i, j), lcm_ij) in pending.iter() {
                if cancelled.contains(&(i, j)) {
                    continue;
                }
                if lm.divides(lcm_ij)
                    && leads[i].0.lcm(lm) != *lcm_ij
                    && leads[j].0.lcm(lm) != *lcm_ij
                {
                    cancelled.insert((i, j));
                }
            }
        }
        for i in 0..m {
            if leads[i].0.coprime(lm) {
                achieved.insert((i, m));
                continue;
            }
            let lcm = leads[i].0.lcm(lm);
            queue.push(Reverse(PairKey {
                degree: lcm.degree(),
                lcm: lcm.clone(),
                i,
                j: m,
            }));
            pending.insert((i, m), lcm);
        }
    };

    for m in prefix_len.max(1)..basis.len() {
        install(m, &leads, &mut queue, &mut pending, &mut achieved, &mut cancelled);
    }

    let mut processed = 0u64;
    while let Some(Reverse(pair)) = queue.pop() {
        let (i, j) = (pair.i, pair.j);
        pending.remove(&(i, j));
        if cancelled.remove(&(i, j)) {
            continue;
        }
        // chain criterion: some k with LM_k | lcm(i,j) whose side pairs
        // are already known to reduce to zero
        if config.use_chain_criterion {
            let chained = (0..basis.len().min(CHAIN_SCAN_LIMIT)).any(|k| {
                k != i
                    && k != j
                    && leads[k].0.divides(&pair.lcm)
                    && achieved.contains(&(i.min(k), i.max(k)))
                    && achieved.contains(&(j.min(k), j.max(k)))
            });
            if chained {
                achieved.insert((i, j));
                continue;
            }
        }
        processed += 1;
        if processed > config.spair_budget {
            return Err(GroebnerError::BudgetExceeded {
                processed,
                budget: config.spair_budget,
            });
        }
        let s = s_polynomial(&basis[i], &basis[j], &leads[i], &leads[j]);
        let r = normal_form_with(&s, &basis, &leads, order);
        achieved.insert((i, j));
        if !r.is_zero() {
            let r = r.normalized(order);
            if r.is_constant() {
                // the ideal is the whole ring; nothing else matters
                return Ok(vec![Polynomial::one(r.ring().clone())]);
            }
            leads.push(leading_owned(&r, order));
            basis.push(r);
            install(
                basis.len() - 1,
                &leads,
                &mut queue,
                &mut pending,
                &mut achieved,
                &mut cancelled,
            );
        }
    }

    Ok(reduce_basis(basis, order))
}

/// The chain-criterion scan inspects at most this many basis elements per
/// pair; scanning fewer only skips fewer pairs, never affects correctness.
const CHAIN_SCAN_LIMIT: usize = 256;

/// Minimalize and fully inter-reduce a Groebner basis.
fn reduce_basis(mut basis: Vec<Polynomial>, order: &TermOrder) -> Vec<Polynomial> {
    basis.sort_by(|a, b| {
        let (ma, _) = a.leading(order).expect("nonzero");
        let (mb, _) = b.leading(order).expect("nonzero");
        order.cmp(ma, mb)
    });
    // minimal: keep only elements whose lead is not divisible by an earlier
    // kept lead
    let mut minimal: Vec<Polynomial> = Vec::new();
    for p in basis {
        let (lm, _) = leading_owned(&p, order);
        if !minimal
            .iter()
            .any(|q| q.leading(order).unwrap().0.divides(&lm))
        {
            minimal.push(p);
        }
    }
    // inter-reduce tails until stable
    loop {
        let mut changed = false;
        for k in 0..minimal.len() {
            let others: Vec<Polynomial> = minimal
                .iter()
                .enumerate()
                .filter(|(l, _)| *l != k)
                .map(|(_, q)| q.clone())
                .collect();
            let reduced = normal_form(&minimal[k], &others, order).normalized(order);
            if reduced != minimal[k] {
                debug_assert!(!reduced.is_zero(), "minimal element reduced to zero");
                minimal[k] = reduced;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    minimal
}

/// An ideal given by generators, with cached reduced Groebner bases per
/// term order.
#[derive(Debug)]
pub struct Ideal {
    ring: Ring,
    gens: Vec<Polynomial>,
    cache: Mutex<HashMap<TermOrder, Arc<Vec<Polynomial>>>>,
}

impl Clone for Ideal {
    fn clone(&self) -> Self {
        Ideal {
            ring: self.ring.clone(),
            gens: self.gens.clone(),
            cache: Mutex::new(self.cache.lock().unwrap().clone()),
        }
    }
}

impl Ideal {
    pub fn new(ring: Ring, gens: Vec<Polynomial>) -> Result<Self, GroebnerError> {
        if gens.iter().any(|p| *p.ring() != ring) {
            return Err(GroebnerError::RingMismatch);
        }
        Ok(Ideal {
            ring,
            gens,
            cache: Mutex::new(HashMap::new()),
        })
    }

    fn with_basis(ring: Ring, gens: Vec<Polynomial>, order: TermOrder) -> Self {
        let ideal = Ideal {
            ring,
            gens: gens.clone(),
            cache: Mutex::new(HashMap::new()),
        };
        ideal.cache.lock().unwrap().insert(order, Arc::new(gens));
        ideal
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn generators(&self) -> &[Polynomial] {
        &self.gens
    }

    /// The reduced Groebner basis under `order`, computed once and cached.
    pub fn groebner_basis(&self, order: &TermOrder) -> Result<Arc<Vec<Polynomial>>, GroebnerError> {
        self.groebner_basis_with(order, &BuchbergerConfig::default())
    }

    pub fn groebner_basis_with(
        &self,
        order: &TermOrder,
        config: &BuchbergerConfig,
    ) -> Result<Arc<Vec<Polynomial>>, GroebnerError> {
        if let Some(hit) = self.cache.lock().unwrap().get(order) {
            return Ok(hit.clone());
        }
        let basis = Arc::new(buchberger(&self.gens, order, config)?);
        self.cache
            .lock()
            .unwrap()
            .insert(order.clone(), basis.clone());
        Ok(basis)
    }

    /// Ideal membership: normal form modulo the reduced basis is zero.
    pub fn member(&self, p: &Polynomial, order: &TermOrder) -> Result<bool, GroebnerError> {
        if *p.ring() != self.ring {
            return Err(GroebnerError::RingMismatch);
        }
        let basis = self.groebner_basis(order)?;
        Ok(normal_form(p, &basis, order).is_zero())
    }

    /// Ideal equality via coincidence of reduced Groebner bases under a
    /// common order (grevlex).
    pub fn equals(&self, other: &Ideal) -> Result<bool, GroebnerError> {
        if self.ring != other.ring {
            return Err(GroebnerError::RingMismatch);
        }
        let order = TermOrder::Grevlex;
        let a = self.groebner_basis(&order)?;
        let b = other.groebner_basis(&order)?;
        Ok(*a == *b)
    }

    /// The elimination ideal: drop the given variables (they are made
    /// greatest in a block order) and restrict to the remaining ring.
    pub fn eliminate(&self, drop: &[usize]) -> Result<Ideal, GroebnerError> {
        self.eliminate_with(drop, &BuchbergerConfig::default())
    }

    pub fn eliminate_with(
        &self,
        drop: &[usize],
        config: &BuchbergerConfig,
    ) -> Result<Ideal, GroebnerError> {
        let mut drop: Vec<usize> = drop.to_vec();
        drop.sort_unstable();
        drop.dedup();
        let order = TermOrder::eliminating(drop.iter().copied());
        let basis = self.groebner_basis_with(&order, config)?;
        let small_ring = self.ring.without_vars(&drop);
        let kept: Vec<Polynomial> = basis
            .iter()
            .filter(|p| {
                p.terms()
                    .all(|(m, _)| drop.iter().all(|&v| m.exponents()[v] == 0))
            })
            .map(|p| p.restrict_to(&small_ring, &drop))
            .collect();
        // the restriction of the block-order basis is already the reduced
        // grevlex basis of the elimination ideal
        Ok(Ideal::with_basis(small_ring, kept, TermOrder::Grevlex))
    }

    /// The saturation I : m^infinity, computed with one auxiliary variable
    /// t via I + (t*m - 1) and elimination of t.
    pub fn saturate(&self, m: &Polynomial) -> Result<Ideal, GroebnerError> {
        self.saturate_with(m, &BuchbergerConfig::default())
    }

    pub fn saturate_with(
        &self,
        m: &Polynomial,
        config: &BuchbergerConfig,
    ) -> Result<Ideal, GroebnerError> {
        if *m.ring() != self.ring {
            return Err(GroebnerError::RingMismatch);
        }
        if m.num_terms() != 1 || m.is_constant() {
            return Err(GroebnerError::NotMonomial);
        }
        let (big_ring, aux) = self.ring.with_aux();
        let mut gens: Vec<Polynomial> = self.gens.iter().map(|p| p.lift_to(&big_ring)).collect();
        // t * m - 1, with m taken monic
        let (mono, _) = m.terms().next().unwrap();
        let mut exps = mono.exponents().to_vec();
        exps.push(1);
        let tm = Polynomial::from_terms(
            big_ring.clone(),
            vec![(Monomial::from_exponents(exps), big_ring.field().one())],
        );
        gens.push(&tm - &Polynomial::one(big_ring.clone()));
        let extended = Ideal::new(big_ring, gens)?;
        let eliminated = extended.eliminate_with(&[aux], config)?;
        // the eliminated ring equals the original ring structurally; rebuild
        // on the original handle
        debug_assert!(*eliminated.ring() == self.ring);
        Ok(Ideal::with_basis(
            self.ring.clone(),
            eliminated.gens,
            TermOrder::Grevlex,
        ))
    }

    /// Radical membership by the Rabinowitsch trick: p is in the radical of
    /// I exactly when 1 lies in I + (1 - t*p).
    pub fn radical_member(&self, p: &Polynomial) -> Result<bool, GroebnerError> {
        self.radical_member_with(p, &BuchbergerConfig::default())
    }

    /// The cached reduced basis for `order`, if one has been computed.
    pub fn cached_basis(&self, order: &TermOrder) -> Option<Arc<Vec<Polynomial>>> {
        self.cache.lock().unwrap().get(order).cloned()
    }

    pub fn radical_member_with(
        &self,
        p: &Polynomial,
        config: &BuchbergerConfig,
    ) -> Result<bool, GroebnerError> {
        if *p.ring() != self.ring {
            return Err(GroebnerError::RingMismatch);
        }
        if p.is_zero() {
            return Ok(true);
        }
        let (big_ring, aux) = self.ring.with_aux();
        let t = Polynomial::var(big_ring.clone(), aux);
        let one = Polynomial::one(big_ring.clone());
        let rabinowitsch = &one - &(&t * &p.lift_to(&big_ring));
        let order = TermOrder::eliminating([aux]);
        // when a grevlex basis is already cached, seed with it: its
        // elements keep their leading terms under the aux-greatest block
        // order, so it stays a Groebner basis of the lifted ideal and its
        // internal S-pairs need no reprocessing. Computing a basis here
        // would be wasted work: deriving 1 from the augmented system is
        // usually far cheaper than closing the base ideal.
        let basis = match self.cached_basis(&TermOrder::Grevlex) {
            Some(base) => {
                let prefix: Vec<Polynomial> =
                    base.iter().map(|g| g.lift_to(&big_ring)).collect();
                buchberger_seeded(&prefix, &[rabinowitsch], &order, config)?
            }
            None => {
                let mut gens: Vec<Polynomial> =
                    self.gens.iter().map(|g| g.lift_to(&big_ring)).collect();
                gens.push(rabinowitsch);
                buchberger(&gens, &order, config)?
            }
        };
        Ok(basis.len() == 1 && basis[0].is_constant())
    }
}
