//! Argument handling and suite dispatch for the `gks` binary.

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use nalgebra::DMatrix;
use serde_json::{json, Value};

use gks_core::clifford::build_rep;
use gks_core::constructions::classify::{elm_residual, grid};
use gks_core::constructions::{
    canonical_s7, dim15_obstruction, rho_module_check, s3_example, two_eig_classify, TwoEigData,
};
use gks_core::gks::{check_gks, eta_pipeline, verify_gks, SymEndField};
use gks_core::report::{tol, Check, Report};
use gks_core::sampling;
use gks_core::spinor::{killing_basis, spinor_dim, KillingSign, SpinorField, SpinorModel};
use gks_core::weitzenbock::{
    algebraic_identity, check_weitzenbock, harmonic_hessian_field, integral_identity, integral_identity_general,
    two_form_norm_inequality, SymTensorField,
};
use gks_core::GksError;

#[derive(Debug, Parser)]
#[command(name = "gks", version, about = "Numerical checks for generalized Killing spinors on round spheres")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Sample points per check.
    #[arg(long, global = true, default_value_t = 50, value_parser = clap::value_parser!(u64).range(1..))]
    pub samples: u64,
    #[arg(long, global = true, env = "GKS_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Print the JSON report instead of the table.
    #[arg(long, global = true)]
    pub json: bool,
    /// Also write the JSON report to this file.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Override the tolerance of a named check, e.g. `--tol gks_equation=1e-6`.
    #[arg(long = "tol", global = true, value_name = "CHECK=VALUE", value_parser = parse_tol)]
    pub tol: Vec<(String, f64)>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Clifford relations, skew-orthogonality and half-spinor ranks of Cl_m.
    Clifford {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=16))]
        n: u8,
    },
    /// The Killing spinor basis with constant c on S^n, checked against A = c·Id.
    Killing {
        #[arg(long, value_parser = clap::value_parser!(u8).range(2..=15))]
        sphere: u8,
        /// Killing constant, ±0.5.
        #[arg(long, allow_hyphen_values = true)]
        constant: f64,
        /// Check against A = c·Id for this c instead of the Killing constant.
        #[arg(long, allow_hyphen_values = true)]
        against: Option<f64>,
    },
    /// The two-eigenvalue spinor on S³.
    S3Example,
    /// The canonical spinor of the 3-Sasakian S⁷.
    S7Canonical,
    /// Chirality splitting of a Killing spinor on S^{8k}.
    Eta {
        #[arg(long)]
        sphere: u8,
    },
    /// Admissibility of two-eigenvalue data; without λ, μ, p, q sweeps the grid for this n.
    Classify {
        #[arg(long, value_parser = clap::value_parser!(u8).range(2..=64))]
        n: u8,
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        mu: Option<f64>,
        #[arg(long)]
        p: Option<usize>,
        #[arg(long)]
        q: Option<usize>,
        /// Grid eigenvalues are k/2 with |k| ≤ max-k.
        #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(i32).range(1..=20))]
        max_k: i32,
    },
    /// Cross products from Cl₇ spinors on S¹⁵ depend on the spinor.
    Dim15 {
        #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
    },
    /// Weitzenböck identity, algebraic identity, 2-form estimate and integral identity.
    Weitzenbock {
        #[arg(long, value_parser = clap::value_parser!(u8).range(2..=15))]
        n: u8,
        /// Random trace-free test fields.
        #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u64).range(1..))]
        fields: u64,
        /// Monte-Carlo samples for the integral identity.
        #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
        quadrature: u64,
        /// Random (ω, Φ) pairs in the Cl₈ module.
        #[arg(long, default_value_t = 500, value_parser = clap::value_parser!(u64).range(1..))]
        two_form_samples: u64,
    },
}

fn parse_tol(s: &str) -> Result<(String, f64), String> {
    let (name, value) = s.split_once('=').ok_or_else(|| format!("expected CHECK=VALUE, got `{s}`"))?;
    let v: f64 = value.parse().map_err(|_| format!("`{value}` is not a number"))?;
    if !(v.is_finite() && v >= 0.0) {
        return Err(format!("tolerance must be finite and non-negative, got {v}"));
    }
    Ok((name.to_string(), v))
}

/// Exit code classes.
#[derive(Debug)]
pub enum RunError {
    Usage(String),
    Failure(String),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Usage(_) => 2,
            RunError::Failure(_) => 1,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            RunError::Usage(m) | RunError::Failure(m) => m,
        }
    }
}

impl From<GksError> for RunError {
    fn from(e: GksError) -> Self {
        match e {
            GksError::OutOfRange { .. } | GksError::DimensionMismatch { .. } | GksError::Malformed(_) => {
                RunError::Usage(e.to_string())
            }
            _ => RunError::Failure(e.to_string()),
        }
    }
}

pub fn run(cli: &Cli) -> Result<Report, RunError> {
    let samples = cli.samples as usize;
    let seed = cli.seed;
    let mut report = match &cli.command {
        Command::Clifford { n } => clifford(*n as usize, seed)?,
        Command::Killing { sphere, constant, against } => killing(*sphere as usize, *constant, *against, samples, seed)?,
        Command::S3Example => s3(samples, seed)?,
        Command::S7Canonical => s7(samples, seed)?,
        Command::Eta { sphere } => eta(*sphere as usize, samples, seed)?,
        Command::Classify { n, lambda, mu, p, q, max_k } => classify(*n as usize, *lambda, *mu, *p, *q, *max_k, seed)?,
        Command::Dim15 { trials } => dim15(*trials as usize, seed)?,
        Command::Weitzenbock { n, fields, quadrature, two_form_samples } => weitzenbock(
            *n as usize,
            *fields as usize,
            *quadrature as usize,
            *two_form_samples as usize,
            samples,
            seed,
        )?,
    };
    for (name, value) in &cli.tol {
        if !report.override_tolerance(name, *value) {
            return Err(RunError::Usage(format!("no check named `{name}` in this report")));
        }
    }
    Ok(report)
}

fn clifford(m: usize, seed: u64) -> Result<Report, RunError> {
    let rep = build_rep(m)?;
    let mut r = Report::new("clifford", json!({ "n": m }), seed);
    r.push(Check::at_most("anticommutation", rep.anticommutator_defect(), tol::CLIFFORD));
    r.push(Check::at_most("skew_orthogonal", rep.skew_orthogonal_defect(), tol::CLIFFORD));
    let expected = gks_core::clifford::MODULE_DIMS[m - 1];
    r.push(Check::holds("module_dimension", rep.module_dim() == expected));
    let mut details = json!({
        "module_dim": rep.module_dim(),
        "volume_square": rep.volume_square_sign(),
    });
    if rep.volume_square_sign() == 1 {
        let split = rep.half_spinor_split()?;
        let half = rep.module_dim() / 2;
        r.push(Check::holds("half_spinor_ranks", split.rank_plus() == half && split.rank_minus() == half));
        details["half_spinor_ranks"] = json!([split.rank_plus(), split.rank_minus()]);
    }
    Ok(r.with_details(details))
}

fn killing(n: usize, constant: f64, against: Option<f64>, samples: usize, seed: u64) -> Result<Report, RunError> {
    let sign = KillingSign::from_constant(constant)
        .ok_or_else(|| RunError::Usage(format!("--constant must be 0.5 or -0.5, got {constant}")))?;
    let a_const = against.unwrap_or(constant);
    let model = SpinorModel::shared(n)?;
    let basis = killing_basis(&model, sign);
    let a = SymEndField::scalar(n + 1, a_const);
    let mut r = Report::new(
        "killing",
        json!({ "sphere": n, "constant": constant, "against": a_const, "samples": samples }),
        seed,
    );
    r.push(Check::holds("basis_count", basis.len() == spinor_dim(n)));
    // Full verification on the first spinor, the equation itself on every one.
    let full = verify_gks(&basis[0], &a, samples, seed)?;
    let mut worst = full.residual_gks;
    for (k, psi) in basis.iter().enumerate().skip(1) {
        worst = worst.max(check_gks(psi, &a, samples, sampling_seed(seed, k))?.max_residual);
    }
    r.extend(full.checks("").into_iter().filter(|c| c.name != "gks_equation"));
    r.push(Check::at_most("gks_equation", worst, full.tolerance));
    Ok(r.with_details(json!({ "basis_count": basis.len(), "subspace": format!("{:?}", model.kind()) })))
}

fn sampling_seed(seed: u64, k: usize) -> u64 {
    seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(k as u64)
}

fn s3(samples: usize, seed: u64) -> Result<Report, RunError> {
    let ex = s3_example()?;
    let rep = verify_gks(&ex.psi, &ex.a, samples, seed)?;
    let mut r = Report::new("s3-example", json!({ "samples": samples }), seed);
    r.extend(rep.checks(""));
    r.push(Check::at_most("spectrum", rep.spectrum_deviation(&[0.5, -1.5, -1.5]), tol::EXACT));
    // a² - tr A² = n(n-1)/4 = 3/2
    let x = gks_core::sphere::SpherePoint::normalized(sampling::sphere_point(&mut sampling::rng(seed), 4));
    let am = ex.a.eval(x.as_slice());
    let scal = am.trace().powi(2) - (&am * &am).trace();
    r.push(Check::at_most("scalar_constraint_value", (scal - 1.5).abs(), tol::EXACT));
    let rho = rho_module_check(&ex.psi, &ex.a, 0.5, -1.5, samples.min(20), seed)?;
    r.extend(rho.checks());
    Ok(r.with_details(json!({
        "eigenvalues": [0.5, -1.5, -1.5],
        "a_squared_minus_trace_a_squared": scal,
        "first_sample_spectrum": rep.spectrum.first(),
    })))
}

fn s7(samples: usize, seed: u64) -> Result<Report, RunError> {
    let c = canonical_s7()?;
    let mut r = Report::new("s7-canonical", json!({ "samples": samples }), seed);
    r.push(Check::holds("sp2_dimension_10", c.q.sp2_dimension() == 10));
    r.push(Check::holds("sp2_kernel_dim_3", c.psi1.sp2_kernel_dim == 3));
    r.push(Check::holds("kernel_dim_1", c.psi1.kernel_dim == 1));
    let rep = verify_gks(&c.psi0, &c.a, samples, seed)?;
    r.extend(rep.checks(""));
    let expected = [0.5, 0.5, 0.5, -1.5, -1.5, -1.5, -1.5];
    r.push(Check::at_most("spectrum", rep.spectrum_deviation(&expected), tol::EXACT));
    let points = gks_core::constructions::s7::sample_points(samples, seed);
    let cone = points.iter().map(|x| c.cone_residual(x)).fold(0.0, f64::max);
    r.push(Check::at_most("cone_lemma", cone, tol::EXACT));
    let modified = points.iter().map(|x| c.modified_connection_residual(x)).fold(0.0, f64::max);
    r.push(Check::at_most("modified_connection_invariance", modified, tol::RHO_MODULE));
    let sp2 = points
        .iter()
        .map(|x| c.sp2_form_defect(x.vector()))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .fold(0.0, f64::max);
    r.push(Check::at_most("sp2_form_annihilates_psi1", sp2, tol::EXACT));
    let sasaki = c.sasakian_field_defect(&mut sampling::substream(seed, 3), samples.min(20))?;
    r.push(Check::at_most("three_sasakian_relations", sasaki, tol::CLIFFORD));
    let rho = rho_module_check(&c.psi0, &c.a, 0.5, -1.5, samples.min(20), seed)?;
    r.extend(rho.checks());
    Ok(r.with_details(json!({
        "eigenvalues": expected,
        "multiplicities": { "0.5": 3, "-1.5": 4 },
        "psi1": c.psi1.spinor.as_slice(),
    })))
}

fn eta(n: usize, samples: usize, seed: u64) -> Result<Report, RunError> {
    if !n.is_multiple_of(8) || n == 0 || n > 15 {
        return Err(RunError::Usage(format!("--sphere must be a positive multiple of 8 within 2..=15, got {n}")));
    }
    let model = SpinorModel::shared(n)?;
    let s = sampling::unit_in_span(&mut sampling::substream(seed, 11), model.basis());
    let psi = SpinorField::constant(model, &s)?;
    let rep = eta_pipeline(&psi, &SymEndField::scalar(n + 1, 0.5), samples, seed)?;
    let mut r = Report::new("eta", json!({ "sphere": n, "samples": samples }), seed);
    r.extend(rep.checks());
    Ok(r.with_details(json!({
        "eta_zero_fraction": rep.eta_zero_fraction,
        "max_gram_condition": rep.max_gram_condition,
    })))
}

fn classify(
    n: usize,
    lambda: Option<f64>,
    mu: Option<f64>,
    p: Option<usize>,
    q: Option<usize>,
    max_k: i32,
    seed: u64,
) -> Result<Report, RunError> {
    match (lambda, mu, p, q) {
        (Some(lambda), Some(mu), Some(p), Some(q)) => {
            let data = TwoEigData { n, lambda, mu, p, q };
            let v = two_eig_classify(&data)?;
            let mut r = Report::new("classify", json!({ "n": n, "lambda": lambda, "mu": mu, "p": p, "q": q }), seed);
            r.push(Check::holds("classified", true));
            if v.admissible {
                r.push(Check::at_most("constraint_elm", elm_residual(&data).abs(), 1e-9));
            }
            Ok(r.with_details(json!({
                "admissible": v.admissible,
                "reason": v.reason,
                "explanation": v.reason.explanation(),
                "normalized": v.normalized,
                "killing": v.killing,
            })))
        }
        (None, None, None, None) => {
            let mut admissible: Vec<Value> = Vec::new();
            let mut counts = std::collections::BTreeMap::<&'static str, usize>::new();
            let data: Vec<TwoEigData> = grid(n, max_k).into_iter().filter(|d| d.n == n).collect();
            for d in &data {
                let v = two_eig_classify(d)?;
                *counts.entry(v.reason.label()).or_default() += 1;
                if v.admissible {
                    admissible.push(json!(d));
                }
            }
            let mut r = Report::new("classify", json!({ "n": n, "max_k": max_k }), seed);
            r.push(Check::holds("classified", true));
            Ok(r.with_details(json!({ "grid_size": data.len(), "admissible": admissible, "reasons": counts })))
        }
        _ => Err(RunError::Usage("--lambda, --mu, --p and --q must be given together".into())),
    }
}

fn dim15(trials: usize, seed: u64) -> Result<Report, RunError> {
    let rep = dim15_obstruction(trials, seed)?;
    let mut r = Report::new("dim15", json!({ "trials": trials }), seed);
    r.extend(rep.checks());
    Ok(r.with_details(json!(rep)))
}

/// `J = ⊕ [[0,-1],[1,0]]` on `ℝ^{2k}`.
fn block_complex_structure(m: usize) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(m, m);
    for b in 0..m / 2 {
        j[(2 * b + 1, 2 * b)] = 1.0;
        j[(2 * b, 2 * b + 1)] = -1.0;
    }
    j
}

fn weitzenbock(
    n: usize,
    fields: usize,
    quadrature: usize,
    two_form_samples: usize,
    samples: usize,
    seed: u64,
) -> Result<Report, RunError> {
    let mut r = Report::new(
        "weitzenbock",
        json!({ "n": n, "fields": fields, "quadrature": quadrature, "two_form_samples": two_form_samples, "samples": samples }),
        seed,
    );
    let mut rng = sampling::substream(seed, 21);
    let mut residual = 0.0f64;
    let mut curvature = 0.0f64;
    let points = samples.min(10);
    for k in 0..fields {
        let h = SymTensorField::random(n, 3, &mut rng)?;
        let rep = check_weitzenbock(&h, points, sampling_seed(seed, k))?;
        residual = residual.max(rep.residual);
        curvature = curvature.max(rep.curvature_terms);
    }
    r.push(Check::at_most("weitzenbock_residual", residual, tol::WEITZENBOCK));
    r.push(Check::at_most("curvature_terms", curvature, tol::EXACT));

    let mut alg = 0.0f64;
    for _ in 0..100 {
        let g = sampling::gaussian_vector(&mut rng, n * n);
        let g = DMatrix::from_column_slice(n, n, g.as_slice());
        let mut h = (&g + g.transpose()) * 0.5;
        let t = h.trace() / n as f64;
        for i in 0..n {
            h[(i, i)] -= t;
        }
        let (lhs, rhs) = algebraic_identity(&h, n)?;
        alg = alg.max((lhs - rhs).abs());
    }
    r.push(Check::at_most("algebraic_identity", alg, tol::ALGEBRAIC));

    let tf = two_form_norm_inequality(&build_rep(8)?, two_form_samples, seed)?;
    r.extend(tf.checks());

    let general = integral_identity_general(&harmonic_hessian_field(n)?, quadrature, seed)?;
    r.extend(general.checks("general_"));
    let mut details = json!({
        "two_form": tf,
        "integral_general": general,
    });
    if n % 2 == 1 {
        let tt = SymTensorField::hopf_tt(&block_complex_structure(n + 1))?;
        let strict = integral_identity(&tt, quadrature, seed)?;
        r.extend(strict.checks("tt_"));
        details["integral_tt"] = json!(strict);
    }
    Ok(r.with_details(details))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tolerance_argument() {
        assert_eq!(parse_tol("gks_equation=1e-6"), Ok(("gks_equation".to_string(), 1e-6)));
        assert!(parse_tol("gks_equation").is_err());
        assert!(parse_tol("gks_equation=abc").is_err());
        assert!(parse_tol("gks_equation=-1").is_err());
        assert!(parse_tol("gks_equation=inf").is_err());
    }

    #[test]
    fn block_structure_is_complex() {
        let j = block_complex_structure(6);
        assert_eq!(&j * &j, -DMatrix::<f64>::identity(6, 6));
        assert_eq!(j.transpose(), -&j);
    }

    #[test]
    fn error_classes() {
        assert_eq!(RunError::Usage(String::new()).exit_code(), 2);
        assert_eq!(RunError::Failure(String::new()).exit_code(), 1);
        let e: RunError = GksError::Malformed("x".into()).into();
        assert_eq!(e.exit_code(), 2);
        assert_ne!(sampling_seed(0, 1), sampling_seed(0, 2));
    }
}
