//! Command-line driver: validate family parameters, print the n+1 defining
//! equations, compute the toric ideal, and run the verification suites.
//!
//! Exit codes: 0 success/verified, 1 domain violation or verification
//! failure, 2 input error, 3 resource budget exceeded.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use stci_core::family::{equations, EquationId, FamilyParams};
use stci_core::groebner::{BuchbergerConfig, GroebnerError};
use stci_core::polyring::{CoeffField, Polynomial, TermOrder};
use stci_core::toricideal::{toric_ideal_with, ToricError};
use stci_core::verify::{
    exhaustive_lift_audit_with, point_set_equality_with, radical_certificates_with,
    EnumerationMode, VerifyError, DEFAULT_POINT_BUDGET, DEFAULT_SEED,
};

const EXIT_FAIL: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_BUDGET: u8 = 3;

/// Environment variable overriding the Groebner S-pair budget.
const ENV_SPAIR_BUDGET: &str = "STCI_SPAIR_BUDGET";
/// Environment variable overriding the point-enumeration budget.
const ENV_POINT_BUDGET: &str = "STCI_POINT_BUDGET";

#[derive(Parser)]
#[command(
    name = "stci",
    about = "Construct and verify toric varieties cut out set-theoretically by codim+1 binomials",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug)]
enum FieldSpec {
    Q,
    Fp(u64),
}

impl FromStr for FieldSpec {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("q") {
            return Ok(FieldSpec::Q);
        }
        let rest = t
            .strip_prefix('f')
            .or_else(|| t.strip_prefix('F'))
            .ok_or_else(|| format!("expected `q` or `f<prime>`, got `{s}`"))?;
        let p: u64 = rest
            .parse()
            .map_err(|_| format!("expected `q` or `f<prime>`, got `{s}`"))?;
        Ok(FieldSpec::Fp(p))
    }
}

impl FieldSpec {
    fn coeff_field(self) -> Result<CoeffField, CliError> {
        match self {
            FieldSpec::Q => Ok(CoeffField::Q),
            FieldSpec::Fp(p) => {
                CoeffField::fp(p).map_err(|e| CliError::input(format!("bad field: {e}")))
            }
        }
    }
}

#[derive(Args)]
struct CommonArgs {
    /// Path to the family parameters JSON, e.g. {"n":3,"d":[2,3],...}
    params: PathBuf,
    /// Coefficient field: `q` or `f<prime>` (e.g. f5)
    #[arg(long, default_value = "q")]
    field: FieldSpec,
    /// Emit machine-readable JSON instead of text
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Check the family hypotheses; exit 0 exactly when they all hold
    Validate {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Print the n+1 defining binomials F_1..F_{n-1}, F, G
    Equations {
        #[command(flatten)]
        common: CommonArgs,
        /// Compare against (or with --bless, rewrite) a golden file
        #[arg(long)]
        golden: Option<PathBuf>,
        /// Regenerate the golden file instead of comparing
        #[arg(long)]
        bless: bool,
    },
    /// Compute the toric ideal I(V) and its saturation certificate
    Ideal {
        #[command(flatten)]
        common: CommonArgs,
        /// Compare against (or with --bless, rewrite) a golden file
        #[arg(long)]
        golden: Option<PathBuf>,
        /// Regenerate the golden file instead of comparing
        #[arg(long)]
        bless: bool,
    },
    /// Run verification: radical certificates and, with --q, point-set
    /// equality and the exhaustive lift audit
    Verify {
        #[command(flatten)]
        common: CommonArgs,
        /// Run the radical-membership certificates (default when no other
        /// stage is selected)
        #[arg(long)]
        radical: bool,
        /// Field size for point enumeration; enables the point stages
        #[arg(long)]
        q: Option<u64>,
        /// Exhaustive point enumeration (default when --q is given)
        #[arg(long)]
        exhaustive: bool,
        /// Sample this many random points instead of enumerating
        #[arg(long, conflicts_with = "exhaustive")]
        sample: Option<u64>,
        /// RNG seed for sampling
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Also run the constructive lift audit (default with --q and
        /// exhaustive enumeration)
        #[arg(long)]
        lift_audit: bool,
        /// Drop one equation (F1..Fk, F or G) before the radical run; the
        /// expected outcome is a reported failure
        #[arg(long)]
        drop_equation: Option<String>,
    },
}

struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn input(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }

    fn fail(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_FAIL,
            message: message.into(),
        }
    }

    fn budget(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_BUDGET,
            message: message.into(),
        }
    }
}

impl From<ToricError> for CliError {
    fn from(e: ToricError) -> Self {
        match e {
            ToricError::Groebner(GroebnerError::BudgetExceeded { .. }) => {
                CliError::budget(e.to_string())
            }
            ToricError::Family(_) => CliError::fail(e.to_string()),
            other => CliError::fail(other.to_string()),
        }
    }
}

impl From<GroebnerError> for CliError {
    fn from(e: GroebnerError) -> Self {
        match e {
            GroebnerError::BudgetExceeded { .. } => CliError::budget(e.to_string()),
            other => CliError::fail(other.to_string()),
        }
    }
}

impl From<VerifyError> for CliError {
    fn from(e: VerifyError) -> Self {
        match e {
            VerifyError::PointBudget { .. } => CliError::budget(e.to_string()),
            VerifyError::Groebner(GroebnerError::BudgetExceeded { .. }) => {
                CliError::budget(e.to_string())
            }
            VerifyError::Toric(t) => CliError::from(t),
            other => CliError::fail(other.to_string()),
        }
    }
}

fn env_u64(name: &str, default: u64) -> Result<u64, CliError> {
    match std::env::var(name) {
        Ok(v) => v
            .parse::<u64>()
            .map_err(|_| CliError::input(format!("{name} must be a positive integer, got `{v}`"))),
        Err(_) => Ok(default),
    }
}

fn buchberger_config() -> Result<BuchbergerConfig, CliError> {
    Ok(BuchbergerConfig {
        spair_budget: env_u64(ENV_SPAIR_BUDGET, BuchbergerConfig::default().spair_budget)?,
        ..BuchbergerConfig::default()
    })
}

fn load_params(path: &Path) -> Result<FamilyParams, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::input(format!("invalid parameter file {}: {e}", path.display())))
}

fn golden_check(path: &Path, content: &str, bless: bool) -> Result<Option<String>, CliError> {
    if bless {
        std::fs::write(path, content)
            .map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display())))?;
        return Ok(Some(format!("blessed {}", path.display())));
    }
    let expected = std::fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))?;
    if expected != content {
        return Err(CliError::fail(format!(
            "output drifted from golden file {}",
            path.display()
        )));
    }
    Ok(Some(format!("matches {}", path.display())))
}

fn cmd_validate(common: &CommonArgs) -> Result<(), CliError> {
    let params = load_params(&common.params)?;
    match params.validate() {
        Ok(w) => {
            if common.json {
                println!(
                    "{}",
                    json!({"ok": true, "witness": {"p": w.p, "q": w.q, "i": w.i, "j": w.j}})
                );
            } else {
                println!(
                    "ok: primes p={} (d_{}) and q={} (d_{}) witness the two-prime condition",
                    w.p, w.i, w.q, w.j
                );
            }
            Ok(())
        }
        Err(violations) => {
            if common.json {
                println!("{}", json!({"ok": false, "violations": violations}));
            } else {
                for v in &violations {
                    println!("{v}");
                }
            }
            Err(CliError {
                code: EXIT_FAIL,
                message: String::new(),
            })
        }
    }
}

fn equations_text(params: &FamilyParams, field: &CoeffField) -> Result<String, CliError> {
    let eqs = equations(params, field).map_err(|e| CliError::fail(e.to_string()))?;
    let order = TermOrder::Grevlex;
    let mut out = String::new();
    for (id, p) in eqs.iter() {
        writeln!(out, "{id} = {}", p.to_text(&order)).unwrap();
    }
    Ok(out)
}

fn cmd_equations(
    common: &CommonArgs,
    golden: Option<&Path>,
    bless: bool,
) -> Result<(), CliError> {
    let params = load_params(&common.params)?;
    let field = common.field.coeff_field()?;
    if common.json {
        let eqs = equations(&params, &field).map_err(|e| CliError::fail(e.to_string()))?;
        let order = TermOrder::Grevlex;
        let mut items = Vec::new();
        for (id, p) in eqs.iter() {
            let vector = match id {
                EquationId::Fi(i) => stci_core::family::fi_vector(&params, i).unwrap(),
                EquationId::F => stci_core::family::f_vector(&params),
                EquationId::G => stci_core::family::g_vector(&params).unwrap(),
            };
            let flat: Vec<i64> = vector
                .flat()
                .iter()
                .map(|v| i64::try_from(v.clone()).expect("desk-scale exponent"))
                .collect();
            items.push(json!({
                "name": id.to_string(),
                "text": p.to_text(&order),
                "vector": flat,
            }));
        }
        println!("{}", json!({"equations": items}));
        return Ok(());
    }
    let text = equations_text(&params, &field)?;
    print!("{text}");
    if let Some(path) = golden {
        if let Some(msg) = golden_check(path, &text, bless)? {
            eprintln!("{msg}");
        }
    }
    Ok(())
}

fn ideal_text(gens: &[Polynomial]) -> String {
    let order = TermOrder::Grevlex;
    let mut out = String::new();
    for g in gens {
        writeln!(out, "{}", g.to_text(&order)).unwrap();
    }
    out
}

fn cmd_ideal(common: &CommonArgs, golden: Option<&Path>, bless: bool) -> Result<(), CliError> {
    let params = load_params(&common.params)?;
    let field = common.field.coeff_field()?;
    let config = buchberger_config()?;
    let result = toric_ideal_with(&params, &field, &config)?;
    if common.json {
        let basis_vectors: Vec<Vec<i64>> = result
            .lattice_basis
            .vectors
            .iter()
            .map(|v| {
                v.flat()
                    .iter()
                    .map(|x| i64::try_from(x.clone()).expect("desk-scale entry"))
                    .collect()
            })
            .collect();
        println!(
            "{}",
            json!({
                "generators": result.generator_strings(),
                "lattice_basis": basis_vectors,
                "certificate": result.certificate,
            })
        );
        return Ok(());
    }
    let text = ideal_text(result.ideal.generators());
    print!("{text}");
    eprintln!(
        "lattice basis size {}, saturated under {} to a reduced basis of {}",
        result.certificate.lattice_basis_size,
        result.certificate.order,
        result.certificate.reduced_basis_size
    );
    if let Some(path) = golden {
        if let Some(msg) = golden_check(path, &text, bless)? {
            eprintln!("{msg}");
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_verify(
    common: &CommonArgs,
    radical: bool,
    q: Option<u64>,
    _exhaustive: bool,
    sample: Option<u64>,
    seed: u64,
    lift_audit: bool,
    drop_equation: Option<&str>,
) -> Result<(), CliError> {
    let params = load_params(&common.params)?;
    let field = common.field.coeff_field()?;
    let config = buchberger_config()?;
    let point_budget = env_u64(ENV_POINT_BUDGET, DEFAULT_POINT_BUDGET)?;
    let drop = drop_equation
        .map(|s| EquationId::from_str(s).map_err(CliError::input))
        .transpose()?;

    // default stage selection: radical always; point stages need --q
    let run_radical = radical || drop.is_some() || q.is_none();
    let run_points = q.is_some();
    let run_audit = lift_audit || (q.is_some() && sample.is_none());

    let mut all_ok = true;
    let mut out = serde_json::Map::new();
    let mut lines: Vec<String> = Vec::new();

    if run_radical {
        let report = radical_certificates_with(&params, &field, drop, &config)?;
        all_ok &= report.all_in_radical;
        lines.push(format!(
            "{} radical field={} dropped={} ({}/{} generators in radical, {} ms)",
            if report.all_in_radical { "PASS" } else { "FAIL" },
            report.field,
            report.dropped.clone().unwrap_or_else(|| "none".into()),
            report
                .entries
                .iter()
                .filter(|e| e.status == stci_core::verify::CertStatus::InRadical)
                .count(),
            report.entries.len(),
            report.elapsed_ms
        ));
        out.insert("radical".into(), serde_json::to_value(&report).unwrap());
    }

    if run_points {
        let q = q.unwrap();
        let mode = match sample {
            Some(count) => EnumerationMode::Sample { count, seed },
            None => EnumerationMode::Exhaustive,
        };
        let report = point_set_equality_with(&params, q, mode, point_budget, &config)?;
        let ok = report.mismatches.is_empty();
        all_ok &= ok;
        lines.push(format!(
            "{} points q={} mode={} ({} checked, {} on equations, {} on ideal, {} mismatches)",
            if ok { "PASS" } else { "FAIL" },
            report.q,
            report.mode,
            report.points_checked,
            report.count_equations,
            report.count_ideal,
            report.mismatches.len()
        ));
        out.insert("points".into(), serde_json::to_value(&report).unwrap());
    }

    if run_audit {
        let q = q.ok_or_else(|| CliError::input("--lift-audit requires --q"))?;
        let audit = exhaustive_lift_audit_with(&params, q, point_budget)?;
        all_ok &= audit.pass;
        lines.push(audit.to_string());
        out.insert("lift_audit".into(), serde_json::to_value(&audit).unwrap());
    }

    out.insert("pass".into(), serde_json::Value::Bool(all_ok));
    if common.json {
        println!("{}", serde_json::Value::Object(out));
    } else {
        for line in &lines {
            println!("{line}");
        }
        println!("{}", if all_ok { "PASS" } else { "FAIL" });
    }
    if all_ok {
        Ok(())
    } else {
        Err(CliError {
            code: EXIT_FAIL,
            message: String::new(),
        })
    }
}

fn run() -> Result<(), CliError> {
    let cli = Cli::parse();
    match &cli.command {
        Command::Validate { common } => cmd_validate(common),
        Command::Equations {
            common,
            golden,
            bless,
        } => cmd_equations(common, golden.as_deref(), *bless),
        Command::Ideal {
            common,
            golden,
            bless,
        } => cmd_ideal(common, golden.as_deref(), *bless),
        Command::Verify {
            common,
            radical,
            q,
            exhaustive,
            sample,
            seed,
            lift_audit,
            drop_equation,
        } => cmd_verify(
            common,
            *radical,
            *q,
            *exhaustive,
            *sample,
            *seed,
            *lift_audit,
            drop_equation.as_deref(),
        ),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if !e.message.is_empty() {
                eprintln!("error: {}", e.message);
            }
            ExitCode::from(e.code)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_spec_parses() {
        assert!(matches!(FieldSpec::from_str("q"), Ok(FieldSpec::Q)));
        assert!(matches!(FieldSpec::from_str("Q"), Ok(FieldSpec::Q)));
        assert!(matches!(FieldSpec::from_str("f7"), Ok(FieldSpec::Fp(7))));
        assert!(matches!(FieldSpec::from_str("F13"), Ok(FieldSpec::Fp(13))));
        assert!(FieldSpec::from_str("7").is_err());
        assert!(FieldSpec::from_str("fp").is_err());
    }
}
