//! Command implementations. Each writes its artefacts under `config.out` and
//! returns the written paths plus a short human-readable summary.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use centrolab_core::centro::{assert_centrosymmetric, sample_centro};
use centrolab_core::csv::{self, fmt17};
use centrolab_core::eig::{eigenvalues, spectral_radial_cdf};
use centrolab_core::fluctuation::{
    freedman_diaconis_histogram, moment_suite, run_clt, CltConfig, CltReport, MomentKind, MomentReport, KS_GATE,
};
use centrolab_core::oracle::convergence_table;
use centrolab_core::poly::Polynomial;
use centrolab_core::variance::{variance_report, KernelVariant, VarianceReport};
use centrolab_core::{Error, Result};
use serde_json::{json, Map, Value};

use crate::config::{Command, RunConfig};

pub const MATRIX_FILE: &str = "matrix.csv";
pub const SPECTRUM_FILE: &str = "spectrum.csv";
pub const RADIAL_FILE: &str = "spectrum_radial.json";
pub const CLT_REPORT_FILE: &str = "clt_report.json";
pub const CLT_HISTOGRAM_FILE: &str = "clt_histogram.csv";
pub const CLT_SAMPLES_FILE: &str = "clt_samples.csv";
pub const MOMENTS_FILE: &str = "moments.json";
pub const ORACLE_FILE: &str = "oracle_table.csv";
pub const VARIANCE_FILE: &str = "variance_report.json";

pub const RADIAL_GRID: [f64; 5] = [0.25, 0.5, 0.75, 1.0, 1.05];
/// Rows of the moment table with `|z| <= MOMENT_Z_GATE` are flagged PASS.
pub const MOMENT_Z_GATE: f64 = 4.0;

#[derive(Debug)]
pub struct CommandOutput {
    pub files: Vec<PathBuf>,
    pub summary: String,
}

/// JSON number carrying exactly 17 significant digits; non-finite values
/// become `null`.
pub fn num(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    serde_json::from_str(&fmt17(x)).expect("formatted float is valid JSON")
}

fn real_array(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| num(x)).collect())
}

fn insert_polynomial(obj: &mut Map<String, Value>, f: &Polynomial) {
    obj.insert("f".into(), real_array(&f.real_parts()));
    if !f.is_real() {
        obj.insert("f_imag".into(), real_array(&f.imag_parts()));
    }
}

fn create(dir: &Path, name: &str) -> Result<(PathBuf, BufWriter<File>)> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    let file = File::create(&path)?;
    Ok((path, BufWriter::new(file)))
}

fn write_json(dir: &Path, name: &str, value: &Value) -> Result<PathBuf> {
    let (path, mut w) = create(dir, name)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| Error::Io(e.into()))?;
    writeln!(w)?;
    w.flush()?;
    Ok(path)
}

pub fn run_command(cfg: &RunConfig) -> Result<CommandOutput> {
    match cfg.command {
        Command::Sample => cmd_sample(cfg),
        Command::Spectrum => cmd_spectrum(cfg),
        Command::Clt => cmd_clt(cfg).map(|(out, _)| out),
        Command::Moments => cmd_moments(cfg).map(|(out, _)| out),
        Command::Oracle => cmd_oracle(cfg),
        Command::Variance => cmd_variance(cfg).map(|(out, _)| out),
    }
}

pub fn cmd_sample(cfg: &RunConfig) -> Result<CommandOutput> {
    let m = sample_centro(cfg.n, cfg.dist, cfg.seed)?;
    let (path, mut w) = create(&cfg.out, MATRIX_FILE)?;
    csv::write_matrix(&mut w, m.matrix())?;
    w.flush()?;
    let symmetric = assert_centrosymmetric(m.matrix(), 0.0);
    Ok(CommandOutput {
        summary: format!("{}\ncentrosymmetric (tol=0): {symmetric}", path.display()),
        files: vec![path],
    })
}

/// Writes the spectrum even when the solver did not converge, then reports
/// [`Error::NotConverged`] so the caller can exit with the solver code.
pub fn cmd_spectrum(cfg: &RunConfig) -> Result<CommandOutput> {
    let m = sample_centro(cfg.n, cfg.dist, cfg.seed)?;
    let spec = eigenvalues(m.matrix(), cfg.max_sweeps)?;
    let (spec_path, mut w) = create(&cfg.out, SPECTRUM_FILE)?;
    csv::write_spectrum(&mut w, &spec)?;
    w.flush()?;
    let fractions = spectral_radial_cdf(&spec, &RADIAL_GRID);
    let summary = json!({
        "n": cfg.n,
        "seed": cfg.seed,
        "dist": cfg.dist.as_str(),
        "converged": spec.converged,
        "iterations": spec.iterations,
        "radii": real_array(&RADIAL_GRID),
        "fractions": real_array(&fractions),
    });
    let radial_path = write_json(&cfg.out, RADIAL_FILE, &summary)?;
    if !spec.converged {
        return Err(Error::NotConverged(format!(
            "QR iteration stalled after {} sweeps; partial spectrum written to {}",
            spec.iterations,
            spec_path.display()
        )));
    }
    let lines: Vec<String> = RADIAL_GRID
        .iter()
        .zip(&fractions)
        .map(|(r, f)| format!("  |lambda| <= {r:<4}: {f:.4}"))
        .collect();
    Ok(CommandOutput {
        summary: format!("{}\n{}\n{}", spec_path.display(), radial_path.display(), lines.join("\n")),
        files: vec![spec_path, radial_path],
    })
}

pub fn clt_report_json(report: &CltReport, include_runtime: bool) -> Value {
    let mut obj = Map::new();
    obj.insert("n".into(), json!(report.n));
    obj.insert("trials".into(), json!(report.trials));
    obj.insert("dist".into(), json!(report.dist.as_str()));
    obj.insert("seed".into(), json!(report.seed));
    insert_polynomial(&mut obj, &report.f);
    obj.insert("empirical_variance".into(), num(report.empirical_variance));
    obj.insert("theoretical_variance".into(), num(report.theoretical_variance));
    obj.insert("ks".into(), num(report.ks_statistic));
    if include_runtime {
        obj.insert("runtime_seconds".into(), num(report.runtime_seconds));
    }
    obj.insert("variance_re".into(), num(report.variance_re));
    obj.insert("variance_im".into(), num(report.variance_im));
    obj.insert("second_moment_abs".into(), num(report.second_moment_abs));
    obj.insert("ks_gate".into(), num(KS_GATE));
    Value::Object(obj)
}

pub fn cmd_clt(cfg: &RunConfig) -> Result<(CommandOutput, CltReport)> {
    let report = run_clt(&CltConfig {
        n: cfg.n,
        trials: cfg.trials,
        f: cfg.polynomial()?.clone(),
        dist: cfg.dist,
        master_seed: cfg.seed,
    })?;
    let report_path = write_json(&cfg.out, CLT_REPORT_FILE, &clt_report_json(&report, true))?;

    let (hist_path, mut w) = create(&cfg.out, CLT_HISTOGRAM_FILE)?;
    csv::write_histogram(&mut w, &freedman_diaconis_histogram(&report.real_samples()))?;
    w.flush()?;

    let (samples_path, mut w) = create(&cfg.out, CLT_SAMPLES_FILE)?;
    writeln!(w, "trial,re,im")?;
    for (t, z) in report.samples.iter().enumerate() {
        writeln!(w, "{t},{},{}", fmt17(z.re), fmt17(z.im))?;
    }
    w.flush()?;

    let summary = format!(
        "n={} trials={} dist={} f=[{}]\nempirical variance   {:.4}\ntheoretical variance {:.4}\nKS statistic         {:.4} (gate {KS_GATE})\nruntime              {:.1}s",
        report.n,
        report.trials,
        report.dist,
        report.f,
        report.empirical_variance,
        report.theoretical_variance,
        report.ks_statistic,
        report.runtime_seconds
    );
    Ok((
        CommandOutput {
            files: vec![report_path, hist_path, samples_path],
            summary,
        },
        report,
    ))
}

pub fn moment_report_json(report: &MomentReport) -> Value {
    let rows: Vec<Value> = report
        .rows
        .iter()
        .map(|r| {
            let (k, l) = match r.kind {
                MomentKind::Single { k } => (k, None),
                MomentKind::Joint { k, l } => (k, Some(l)),
            };
            json!({
                "k": k,
                "l": l,
                "estimate": num(r.estimate),
                "std_error": num(r.std_error),
                "target": num(r.target),
                "z_score": num(r.z_score),
                "status": if r.passes(MOMENT_Z_GATE) { "PASS" } else { "FAIL" },
            })
        })
        .collect();
    json!({
        "n": report.n,
        "trials": report.trials,
        "dist": report.dist.as_str(),
        "seed": report.seed,
        "kmax": report.k_max,
        "z_gate": num(MOMENT_Z_GATE),
        "all_pass": report.rows.iter().all(|r| r.passes(MOMENT_Z_GATE)),
        "rows": rows,
    })
}

pub fn cmd_moments(cfg: &RunConfig) -> Result<(CommandOutput, MomentReport)> {
    let report = moment_suite(cfg.n, cfg.trials, cfg.kmax, cfg.dist, cfg.seed)?;
    let path = write_json(&cfg.out, MOMENTS_FILE, &moment_report_json(&report))?;
    let mut lines = vec![format!("{:<14}{:>12}{:>10}{:>8}{:>9}", "moment", "estimate", "std err", "target", "z")];
    for r in &report.rows {
        let label = match r.kind {
            MomentKind::Single { k } => format!("E[T{k}]"),
            MomentKind::Joint { k, l } => format!("E[T{k} T{l}]"),
        };
        let status = if r.passes(MOMENT_Z_GATE) { "PASS" } else { "FAIL" };
        lines.push(format!(
            "{label:<14}{:>12.5}{:>10.5}{:>8}{:>9.3}  {status}",
            r.estimate, r.std_error, r.target, r.z_score
        ));
    }
    Ok((
        CommandOutput {
            summary: format!("{}\n{}", path.display(), lines.join("\n")),
            files: vec![path],
        },
        report,
    ))
}

pub fn cmd_oracle(cfg: &RunConfig) -> Result<CommandOutput> {
    let rows = convergence_table(&cfg.k_list, &cfg.l_list, &cfg.n_list, cfg.budget)?;
    let (path, mut w) = create(&cfg.out, ORACLE_FILE)?;
    csv::write_table(&mut w, &rows)?;
    w.flush()?;
    Ok(CommandOutput {
        summary: format!("{} ({} rows)", path.display(), rows.len()),
        files: vec![path],
    })
}

pub fn variance_report_json(report: &VarianceReport) -> Value {
    let quadrature: Vec<Value> = report
        .quadrature
        .iter()
        .map(|q| {
            json!({
                "variant": q.variant.as_str(),
                "radius": num(q.radius),
                "nodes": q.nodes,
                "value_re": num(q.value.re),
                "value_im": num(q.value.im),
            })
        })
        .collect();
    let mut discrepancy = Map::new();
    for v in KernelVariant::ALL {
        if let Some(d) = report.discrepancy(v) {
            discrepancy.insert(v.as_str().into(), num(d));
        }
    }
    let warnings: Vec<Value> = report
        .quadrature
        .iter()
        .filter_map(|q| q.warning.as_ref().map(|w| json!(format!("{}: {w}", q.variant))))
        .collect();
    let mut obj = Map::new();
    insert_polynomial(&mut obj, &report.f);
    obj.insert("closed_form".into(), num(report.closed_form));
    obj.insert("quadrature".into(), Value::Array(quadrature));
    obj.insert("discrepancy".into(), Value::Object(discrepancy));
    obj.insert("warnings".into(), Value::Array(warnings));
    Value::Object(obj)
}

pub fn cmd_variance(cfg: &RunConfig) -> Result<(CommandOutput, VarianceReport)> {
    let report = variance_report(cfg.polynomial()?, cfg.radius, cfg.nodes)?;
    let path = write_json(&cfg.out, VARIANCE_FILE, &variance_report_json(&report))?;
    let mut lines = vec![format!("closed form {:.12}", report.closed_form)];
    for q in &report.quadrature {
        lines.push(format!(
            "{:<16} {:.12}{:+.3e}i  discrepancy {:.3e}",
            q.variant.as_str(),
            q.value.re,
            q.value.im,
            report.discrepancy(q.variant).unwrap_or(f64::NAN)
        ));
        if let Some(w) = &q.warning {
            lines.push(format!("  warning: {w}"));
        }
    }
    Ok((
        CommandOutput {
            summary: format!("{}\n{}", path.display(), lines.join("\n")),
            files: vec![path],
        },
        report,
    ))
}
