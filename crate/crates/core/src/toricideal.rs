//! The full defining ideal I(V): lattice kernel, binomial generators,
//! saturation by the product of all variables, and generator-set checks.

use serde::Serialize;
use thiserror::Error;

use crate::family::{EquationSet, FamilyError, FamilyParams};
use crate::groebner::{BuchbergerConfig, GroebnerError, Ideal};
use crate::lattice::{kernel_basis, IntMatrix, LatticeBasis};
use crate::polyring::{binomial_from_vector, CoeffField, Monomial, Polynomial, Ring, TermOrder};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ToricError {
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error(transparent)]
    Groebner(#[from] GroebnerError),
    #[error("ring has {0} variables, expected an even count")]
    OddVariableCount(usize),
}

/// Record of the saturation run that produced the ideal.
#[derive(Debug, Clone, Serialize)]
pub struct SaturationCertificate {
    pub order: String,
    pub lattice_basis_size: usize,
    pub input_generators: usize,
    pub reduced_basis_size: usize,
}

/// The toric ideal together with the lattice data it came from. The
/// generators of `ideal` are its reduced grevlex Groebner basis.
#[derive(Debug, Clone)]
pub struct ToricIdealResult {
    pub ideal: Ideal,
    pub lattice_basis: LatticeBasis,
    pub certificate: SaturationCertificate,
}

impl ToricIdealResult {
    /// Generator strings in the canonical grevlex text form.
    pub fn generator_strings(&self) -> Vec<String> {
        self.ideal
            .generators()
            .iter()
            .map(|p| p.to_text(&TermOrder::Grevlex))
            .collect()
    }
}

/// The toric ideal of an arbitrary exponent matrix over the given ring:
/// kernel basis, one binomial per basis vector, then saturation by the
/// product of all variables.
pub fn toric_ideal_of_matrix(
    matrix: &IntMatrix,
    ring: &Ring,
    config: &BuchbergerConfig,
) -> Result<ToricIdealResult, ToricError> {
    if !matrix.cols().is_multiple_of(2) {
        return Err(ToricError::OddVariableCount(matrix.cols()));
    }
    assert_eq!(
        matrix.cols(),
        ring.nvars(),
        "matrix columns must match ring variables"
    );
    let basis = kernel_basis(matrix);
    let gens: Vec<Polynomial> = basis
        .vectors
        .iter()
        .map(|v| binomial_from_vector(ring, v).expect("kernel vectors are nonzero"))
        .collect();
    let input_generators = gens.len();
    let lattice_ideal = Ideal::new(ring.clone(), gens)?;
    let saturated = if input_generators == 0 {
        lattice_ideal
    } else {
        let all_vars = Polynomial::from_terms(
            ring.clone(),
            vec![(
                Monomial::from_exponents(vec![1; ring.nvars()]),
                ring.field().one(),
            )],
        );
        lattice_ideal.saturate_with(&all_vars, config)?
    };
    let reduced = saturated.groebner_basis_with(&TermOrder::Grevlex, config)?;
    debug_assert!(
        reduced.iter().all(|p| p.is_binomial()),
        "toric ideal basis must be binomial"
    );
    Ok(ToricIdealResult {
        certificate: SaturationCertificate {
            order: "grevlex".to_string(),
            lattice_basis_size: basis.len(),
            input_generators,
            reduced_basis_size: reduced.len(),
        },
        ideal: saturated,
        lattice_basis: basis,
    })
}

/// The defining ideal I(V) of a validated family member over Q or F_p.
pub fn toric_ideal(
    params: &FamilyParams,
    field: &CoeffField,
) -> Result<ToricIdealResult, ToricError> {
    toric_ideal_with(params, field, &BuchbergerConfig::default())
}

pub fn toric_ideal_with(
    params: &FamilyParams,
    field: &CoeffField,
    config: &BuchbergerConfig,
) -> Result<ToricIdealResult, ToricError> {
    params
        .validate()
        .map_err(|v| ToricError::Family(FamilyError::Invalid(v)))?;
    let matrix = crate::family::exponent_matrix(params);
    let ring = params.ring(field);
    toric_ideal_of_matrix(&matrix, &ring, config)
}

/// True when `gens` generate exactly `ideal` and no generator is redundant.
pub fn verify_minimal_generation(
    gens: &[Polynomial],
    ideal: &Ideal,
) -> Result<bool, GroebnerError> {
    let candidate = Ideal::new(ideal.ring().clone(), gens.to_vec())?;
    if !candidate.equals(ideal)? {
        return Ok(false);
    }
    let order = TermOrder::Grevlex;
    for k in 0..gens.len() {
        let rest: Vec<Polynomial> = gens
            .iter()
            .enumerate()
            .filter(|(l, _)| *l != k)
            .map(|(_, p)| p.clone())
            .collect();
        let sub = Ideal::new(ideal.ring().clone(), rest)?;
        if sub.member(&gens[k], &order)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// True when every member of the equation set lies in the ideal.
pub fn contains_equation_set(ideal: &Ideal, eqs: &EquationSet) -> Result<bool, GroebnerError> {
    let order = TermOrder::Grevlex;
    for (_, e) in eqs.iter() {
        if !ideal.member(e, &order)? {
            return Ok(false);
        }
    }
    Ok(true)
}
