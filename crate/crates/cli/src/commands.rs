use std::fmt::Write as _;

use invforge::exprlang::{bind, parse, Binding};
use invforge::invcat::{
    basis_listing, basis_with, equation, equation_listing, BasisError, BasisFamily, EquationName, TensorName,
};
use invforge::jetspace::{FieldKind, Geometry, JetPoint};
use invforge::liealg::{catalog, generic_rank, prolong2, AlgebraName, AlgebraSpec, ProlongedOperator};
use invforge::verify::{
    check_absolute, check_on_manifold, completeness, independence_rank, InvarianceReport, Sampler, Verdict,
    VerifyError,
};
use invforge::C64;

use crate::config::{kind_name, RunConfig};
use crate::report::{CheckRecord, ReportDocument};
use crate::CliError;

/// Trials for generic ranks.
const RANK_TRIALS: usize = 5;

fn internal(e: VerifyError) -> CliError {
    CliError::Internal(e.to_string())
}

fn ops(spec: &AlgebraSpec) -> Result<Vec<ProlongedOperator>, CliError> {
    Ok(catalog(spec)
        .map_err(|e| CliError::Config(e.to_string()))?
        .iter()
        .map(prolong2)
        .collect())
}

fn family(config: &RunConfig, spec: &AlgebraSpec) -> Result<BasisFamily, CliError> {
    let family = basis_with(spec, config.reading).map_err(|e| match e {
        BasisError::Algebra(e) => CliError::Config(e.to_string()),
        BasisError::NoBasis(msg) => CliError::Config(msg),
    })?;
    Ok(match config.truncate {
        Some(k) => family.truncated(k),
        None => family,
    })
}

pub fn list(kind: &str) -> Result<String, CliError> {
    let mut out = String::new();
    match kind {
        "algebras" => {
            for a in AlgebraName::ALL {
                writeln!(out, "{:<14} {}", a.as_str(), a.description()).unwrap();
            }
        }
        "bases" => {
            for b in basis_listing() {
                writeln!(out, "{:<14} {}  [{}]", b.algebra.as_str(), b.title, b.params).unwrap();
            }
        }
        "equations" => {
            for (e, a, formula) in equation_listing() {
                writeln!(out, "{:<20} {:<14} {}", e.as_str(), a.as_str(), formula).unwrap();
            }
        }
        "tensors" => {
            for t in TensorName::ALL {
                writeln!(out, "{:<18} {}", t.as_str().replace('-', "_"), t.description()).unwrap();
            }
        }
        _ => {
            return Err(CliError::Usage(format!(
                "unknown list kind `{kind}`: expected algebras, bases, equations or tensors"
            )))
        }
    }
    Ok(out)
}

/// One record per function, failing when any operator fails.
fn invariance_records(report: &InvarianceReport, prefix: &str, anchor: &str) -> Vec<CheckRecord> {
    report
        .functions()
        .into_iter()
        .map(|label| {
            let (verdict, residual) = report.function_summary(&label);
            let mut rec = CheckRecord::new(format!("{prefix}/{label}"), anchor, verdict);
            rec.residual_max = Some(residual);
            rec.failing = report
                .entries
                .iter()
                .filter(|e| e.function == label && !e.verdict.is_pass())
                .map(|e| e.operator.clone())
                .collect();
            rec
        })
        .collect()
}

pub fn verify(config: &RunConfig) -> Result<(ReportDocument, String), CliError> {
    let target = config.target.as_deref().unwrap_or("basis");
    let mut summary = String::new();
    let checks = match target {
        "basis" => {
            let spec = config.spec()?;
            let fam = family(config, &spec)?;
            let report = check_absolute(&ops(&spec)?, &fam.members, &fam.sampler, config.samples, config.tol, config.seed)
                .map_err(internal)?;
            let mut checks = invariance_records(&report, "invariance", &fam.anchor);
            let rank = independence_rank(&fam.members, &fam.sampler, RANK_TRIALS, config.seed).map_err(internal)?;
            let mut rec = CheckRecord::new("independence-rank", &fam.anchor, rank.verdict);
            rec.rank = Some(rank.rank);
            rec.expected = Some(fam.members.len());
            checks.push(rec);
            let passed = checks.iter().filter(|c| c.name.starts_with("invariance/") && c.verdict.is_pass()).count();
            writeln!(
                summary,
                "{}: {passed}/{} invariants PASS, rank {} of {}",
                fam.name,
                fam.members.len(),
                rank.rank,
                fam.members.len()
            )
            .unwrap();
            checks
        }
        "equation" => {
            let name: EquationName = config
                .equation
                .as_deref()
                .ok_or_else(|| CliError::Config("no equation given (e.g. `verify equation heat`)".into()))?
                .parse()
                .map_err(CliError::Config)?;
            let eq = equation(name, &config.equation_params()).map_err(|e| CliError::Config(e.to_string()))?;
            let report = check_on_manifold(
                &ops(&eq.spec)?,
                &eq.residual,
                eq.solve_for,
                &eq.sampler,
                config.samples,
                config.tol,
                config.seed,
            )
            .map_err(internal)?;
            writeln!(summary, "{} under {}: {}", eq.residual.label(), eq.spec.name, report.verdict).unwrap();
            invariance_records(&report, "on-manifold", &eq.anchor)
        }
        "expression" => {
            let spec = config.spec()?;
            let f = bound_expression(config, &Binding::for_spec(&spec))?;
            let report = check_absolute(
                &ops(&spec)?,
                std::slice::from_ref(&f),
                &Sampler::for_spec(&spec),
                config.samples,
                config.tol,
                config.seed,
            )
            .map_err(internal)?;
            writeln!(summary, "{} under {}: {}", f.label(), spec.name, report.verdict).unwrap();
            invariance_records(&report, "invariance", "user expression")
        }
        other => {
            return Err(CliError::Usage(format!(
                "unknown verify target `{other}`: expected basis, equation or expression"
            )))
        }
    };
    for c in &checks {
        let res = c.residual_max.map(|r| format!("  residual {r:.2e}")).unwrap_or_default();
        let failing = if c.failing.is_empty() {
            String::new()
        } else {
            format!("  failing under {}", c.failing.join(", "))
        };
        writeln!(summary, "  {} {}{res}{failing}", c.verdict, c.name).unwrap();
    }
    let doc = ReportDocument::new(config.clone(), checks);
    writeln!(summary, "verdict {}", doc.verdict).unwrap();
    Ok((doc, summary))
}

fn bound_expression(config: &RunConfig, binding: &Binding) -> Result<invforge::invcat::ScalarJetFunction, CliError> {
    let text = config
        .expr
        .as_deref()
        .ok_or_else(|| CliError::Config("no expression given (use --expr)".into()))?;
    let expr = parse(text).map_err(|e| CliError::Config(format!("cannot parse expression\n{}", e.render(text))))?;
    bind(&expr, binding).map_err(|e| CliError::Config(e.to_string()))
}

/// Closed-form generic rank where one is known.
fn known_algebra_rank(spec: &AlgebraSpec) -> Option<usize> {
    (spec.name == AlgebraName::AO && spec.m == 1).then(|| spec.n * (spec.n - 1) / 2)
}

pub fn rank(config: &RunConfig) -> Result<(ReportDocument, String), CliError> {
    let spec = config.spec()?;
    let sampler = Sampler::for_spec(&spec);
    let r = generic_rank(&ops(&spec)?, None, |i| sampler.sample(config.seed, i), RANK_TRIALS);
    let expected = known_algebra_rank(&spec);
    let mut rec = CheckRecord::new(
        "algebra-rank",
        "generic rank of the prolonged algebra",
        Verdict::from_bool(expected.is_none_or(|e| e == r)),
    );
    rec.rank = Some(r);
    rec.expected = expected;
    let mut summary = format!("{r}\n");
    let mut checks = vec![rec];
    if let Some(text) = &config.expr {
        let f = bound_expression(config, &Binding::for_spec(&spec))?;
        let rr = independence_rank(std::slice::from_ref(&f), &sampler, RANK_TRIALS, config.seed).map_err(internal)?;
        let mut rec = CheckRecord::new(format!("independence-rank/{text}"), "user expression", rr.verdict);
        rec.rank = Some(rr.rank);
        rec.expected = Some(1);
        writeln!(summary, "expression rank {} of 1", rr.rank).unwrap();
        checks.push(rec);
    } else if let Ok(fam) = family(config, &spec) {
        let rr = independence_rank(&fam.members, &fam.sampler, RANK_TRIALS, config.seed).map_err(internal)?;
        let mut rec = CheckRecord::new("independence-rank", &fam.anchor, rr.verdict);
        rec.rank = Some(rr.rank);
        rec.expected = Some(fam.members.len());
        writeln!(summary, "{}: rank {} of {}", fam.name, rr.rank, fam.members.len()).unwrap();
        checks.push(rec);
    }
    let doc = ReportDocument::new(config.clone(), checks);
    writeln!(summary, "verdict {}", doc.verdict).unwrap();
    Ok((doc, summary))
}

pub fn completeness_cmd(config: &RunConfig) -> Result<(ReportDocument, String), CliError> {
    let spec = config.spec()?;
    let fam = family(config, &spec)?;
    let r = completeness(&spec, &fam, config.samples, config.tol, config.seed).map_err(internal)?;
    let mut rec = CheckRecord::new("completeness", &fam.anchor, r.verdict);
    rec.rank = Some(r.independence_rank);
    rec.expected = Some(r.expected);
    rec.detail = Some(r.to_string());
    let summary = format!(
        "{} − {} = {}, family {}, {}\n  {}: rank {}, invariance {}\n",
        r.n_jet_vars, r.algebra_rank, r.expected, r.family_size, r.verdict, fam.name, r.independence_rank, r.invariance
    );
    Ok((ReportDocument::new(config.clone(), vec![rec]), summary))
}

fn format_c64(z: C64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else {
        format!("{}{:+}i", z.re, z.im)
    }
}

pub fn eval(config: &RunConfig, explicit_samples: bool) -> Result<(ReportDocument, String), CliError> {
    let (binding, sampler) = match &config.algebra {
        Some(_) => {
            let spec = config.spec()?;
            (Binding::for_spec(&spec), Sampler::for_spec(&spec))
        }
        None => {
            let kind = config.field.unwrap_or(FieldKind::Real);
            let g = Geometry::Euclidean { n: config.n };
            (Binding::new(g, config.m, kind), Sampler::new(g.n_base(), config.m, kind))
        }
    };
    let f = bound_expression(config, &binding)?;
    let points: Vec<JetPoint> = match &config.point {
        Some(values) => {
            let p = JetPoint::from_values(
                sampler.n_base,
                sampler.n_fields,
                sampler.kind,
                values.iter().map(|&v| C64::new(v, 0.0)).collect(),
            )
            .map_err(|e| CliError::Config(format!("--point: {e}")))?;
            vec![if config.from_u { p.to_log_chart() } else { p }]
        }
        None => {
            let count = if explicit_samples { config.samples } else { 1 };
            (0..count as u64).map(|i| sampler.sample(config.seed, i)).collect()
        }
    };
    let mut summary = format!("{} ({} field)\n", f.label(), kind_name(binding.kind));
    let mut checks = Vec::new();
    for (i, p) in points.iter().enumerate() {
        let v = f.eval(p).map_err(|e| CliError::Internal(format!("evaluation failed at point {i}: {e}")))?;
        let mut rec = CheckRecord::new(format!("eval/{i:04}"), "user expression", Verdict::Pass);
        rec.detail = Some(format_c64(v));
        writeln!(summary, "  point {i}: {}", format_c64(v)).unwrap();
        checks.push(rec);
    }
    Ok((ReportDocument::new(config.clone(), checks), summary))
}
