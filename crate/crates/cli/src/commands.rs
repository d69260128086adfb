//! Command implementations.

use std::io::Write;

use serde::Serialize;
use ultrafrac::io::{MatrixRadialDoc, RadialDoc, VectorRadialDoc};
use ultrafrac::verify::run_all;
use ultrafrac::{
    apply_d as op_apply_d, apply_i as op_apply_i, constants as riesz_constants,
    d_zero_stabilization, gamma_k, residual as op_residual, solve_direct, solve_matrix,
    solve_picard, Alpha64, CauchyProblem, FieldParams, MatrixCauchyProblem, Radial64,
};

use crate::config::RunConfig;
use crate::{CliError, Format, Method};

/// 17 significant digits: enough to reproduce any f64 bit for bit.
fn f17(x: f64) -> String {
    format!("{:.16e}", x)
}

fn write_out(config: &RunConfig, text: &str) -> Result<(), CliError> {
    match &config.output {
        Some(path) => {
            let mut file = std::fs::File::create(path)?;
            file.write_all(text.as_bytes())?;
            if !text.ends_with('\n') {
                file.write_all(b"\n")?;
            }
        }
        None => {
            println!("{}", text.trim_end_matches('\n'));
        }
    }
    Ok(())
}

fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    serde_json::to_string_pretty(value)
        .map_err(|e| CliError::usage(format!("cannot serialize output: {e}")))
}

fn read_radial_doc(path: &std::path::Path) -> Result<RadialDoc, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::usage(format!("malformed document {}: {e}", path.display())))
}

/// Flags win over document metadata; documents must agree among themselves.
fn resolve_q(config: &RunConfig, doc_qs: &[u32]) -> Result<FieldParams, CliError> {
    if let Some(q) = config.q {
        return Ok(FieldParams::new(q)?);
    }
    match doc_qs {
        [] => Err(CliError::usage("missing --q")),
        [first, rest @ ..] => {
            if let Some(other) = rest.iter().find(|q| *q != first) {
                return Err(CliError::usage(format!(
                    "input documents disagree on q ({first} vs {other}); pass --q to override"
                )));
            }
            Ok(FieldParams::new(*first)?)
        }
    }
}

fn resolve_alpha(config: &RunConfig, doc_alphas: &[Option<f64>]) -> Result<Alpha64, CliError> {
    if let Some(alpha) = config.alpha {
        return Ok(ultrafrac::AlphaOrder::new(alpha)?);
    }
    if let Some(alpha) = doc_alphas.iter().flatten().next() {
        return Ok(ultrafrac::AlphaOrder::new(*alpha)?);
    }
    Err(CliError::usage(
        "missing --alpha (none of the input documents carries one)",
    ))
}

// ---------------------------------------------------------------- constants

#[derive(Serialize)]
struct ConstantsDoc {
    q: u32,
    alpha: f64,
    log_branch: bool,
    d_alpha: f64,
    c_alpha: Option<f64>,
    c_alpha_near_pole: bool,
    gamma_k_at_alpha: f64,
    gamma_k_at_minus_alpha: f64,
}

pub fn constants(config: RunConfig) -> Result<(), CliError> {
    let fp = config.require_q()?;
    let order = config.require_alpha()?;
    let k = riesz_constants(fp, order);
    let doc = ConstantsDoc {
        q: fp.q(),
        alpha: order.alpha(),
        log_branch: order.is_log_branch(),
        d_alpha: k.d_alpha(),
        c_alpha: k.c_alpha().ok(),
        c_alpha_near_pole: k.c_alpha_near_pole(),
        gamma_k_at_alpha: gamma_k(fp, order.alpha())?,
        gamma_k_at_minus_alpha: gamma_k(fp, -order.alpha())?,
    };
    let text = match config.format {
        Format::Json => to_json(&doc)?,
        Format::Csv => {
            let mut s = String::from("name,value\n");
            s.push_str(&format!("q,{}\n", doc.q));
            s.push_str(&format!("alpha,{}\n", f17(doc.alpha)));
            s.push_str(&format!("log_branch,{}\n", doc.log_branch as u8));
            s.push_str(&format!("d_alpha,{}\n", f17(doc.d_alpha)));
            match doc.c_alpha {
                Some(c) => s.push_str(&format!("c_alpha,{}\n", f17(c))),
                None => s.push_str("c_alpha,log-branch\n"),
            }
            s.push_str(&format!("gamma_k_at_alpha,{}\n", f17(doc.gamma_k_at_alpha)));
            s.push_str(&format!(
                "gamma_k_at_minus_alpha,{}\n",
                f17(doc.gamma_k_at_minus_alpha)
            ));
            s
        }
    };
    if order.is_log_branch() {
        eprintln!("note: alpha = 1 is the logarithmic branch; c_alpha is undefined there");
    }
    write_out(&config, &text)
}

// ---------------------------------------------------------------- integrate

#[derive(Serialize)]
struct IntegrateRow {
    n: i32,
    abs_x: f64,
    ball_volume: f64,
    sphere_volume: f64,
    sector_fixed_digit: f64,
    sector_excluded_digit: f64,
    ball_integral_power: f64,
    sphere_integral_shifted_power: f64,
    ball_integral_log: f64,
    sphere_integral_shifted_log: f64,
}

#[derive(Serialize)]
struct IntegrateDoc {
    q: u32,
    alpha: f64,
    rows: Vec<IntegrateRow>,
}

pub fn integrate(config: RunConfig) -> Result<(), CliError> {
    let fp = config.require_q()?;
    let order = config.require_alpha()?;
    let range = config.require_range()?;
    let alpha = order.alpha();

    let mut rows = Vec::with_capacity(range.len());
    for n in range.iter() {
        rows.push(IntegrateRow {
            n,
            abs_x: fp.q_powi::<f64>(n),
            ball_volume: fp.ball_volume(n),
            sphere_volume: fp.sphere_volume(n),
            sector_fixed_digit: fp.sector_volume_fixed_digit(n),
            sector_excluded_digit: fp.sector_volume_excluded_digit(n),
            ball_integral_power: fp.ball_integral_power(alpha, n)?,
            sphere_integral_shifted_power: fp.sphere_integral_shifted_power(alpha, n)?,
            ball_integral_log: fp.ball_integral_log(n),
            sphere_integral_shifted_log: fp.sphere_integral_shifted_log(n),
        });
    }
    let doc = IntegrateDoc {
        q: fp.q(),
        alpha,
        rows,
    };
    let text = match config.format {
        Format::Json => to_json(&doc)?,
        Format::Csv => {
            let mut s = String::from(
                "n,abs_x,ball_volume,sphere_volume,sector_fixed_digit,sector_excluded_digit,\
                 ball_integral_power,sphere_integral_shifted_power,ball_integral_log,\
                 sphere_integral_shifted_log\n",
            );
            for r in &doc.rows {
                s.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{},{}\n",
                    r.n,
                    f17(r.abs_x),
                    f17(r.ball_volume),
                    f17(r.sphere_volume),
                    f17(r.sector_fixed_digit),
                    f17(r.sector_excluded_digit),
                    f17(r.ball_integral_power),
                    f17(r.sphere_integral_shifted_power),
                    f17(r.ball_integral_log),
                    f17(r.sphere_integral_shifted_log),
                ));
            }
            s
        }
    };
    write_out(&config, &text)
}

// ------------------------------------------------------------- apply-d / -i

fn radial_table_csv(u: &Radial64, fp: FieldParams) -> String {
    let mut s = String::from("n,abs_x,re,im\n");
    for (i, n) in u.grid().iter().enumerate() {
        let z = u.values()[i];
        s.push_str(&format!(
            "{},{},{},{}\n",
            n,
            f17(fp.q_powi::<f64>(n)),
            f17(z.re),
            f17(z.im)
        ));
    }
    s
}

fn load_single_function(config: &RunConfig) -> Result<(Radial64, FieldParams, Alpha64), CliError> {
    if config.inputs.len() != 1 {
        return Err(CliError::usage(format!(
            "expected exactly one --input document, got {}",
            config.inputs.len()
        )));
    }
    let doc = read_radial_doc(&config.inputs[0])?;
    let fp = resolve_q(config, &[doc.q])?;
    let order = resolve_alpha(config, &[doc.alpha])?;
    let (u, _) = doc.to_function::<f64>()?;
    Ok((u, fp, order))
}

fn emit_function(
    config: &RunConfig,
    u: &Radial64,
    fp: FieldParams,
    order: Alpha64,
) -> Result<(), CliError> {
    let text = match config.format {
        Format::Json => {
            let doc = RadialDoc::from_function(u, fp, Some(order.alpha()))?;
            to_json(&doc)?
        }
        Format::Csv => radial_table_csv(u, fp),
    };
    write_out(config, &text)
}

pub fn apply_d(config: RunConfig) -> Result<(), CliError> {
    let (u, fp, order) = load_single_function(&config)?;
    let out = op_apply_d(fp, order, &u);
    if let Some(gap) = d_zero_stabilization(&out) {
        eprintln!(
            "note: D^alpha u(0) reported as the value at level {}; stabilization gap \
             |D(q^n_min) - D(q^(n_min+1))| = {:e}",
            out.grid().n_min(),
            gap
        );
    }
    emit_function(&config, &out, fp, order)
}

pub fn apply_i(config: RunConfig) -> Result<(), CliError> {
    let (u, fp, order) = load_single_function(&config)?;
    let out = op_apply_i(fp, order, &u);
    emit_function(&config, &out, fp, order)
}

// -------------------------------------------------------------------- solve

#[derive(Serialize)]
struct PicardDoc {
    iterations: usize,
    diff_norms: Vec<f64>,
}

#[derive(Serialize)]
struct ReportDoc {
    min_pivot: f64,
    residual_max: f64,
    head_truncation_estimate: Option<f64>,
    warnings: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    picard: Option<PicardDoc>,
}

#[derive(Serialize)]
struct SolveDoc {
    q: u32,
    alpha: f64,
    u0: [f64; 2],
    v: RadialDoc,
    u: RadialDoc,
    report: ReportDoc,
}

#[derive(Serialize)]
struct MatrixSolveDoc {
    q: u32,
    alpha: f64,
    dim: usize,
    u0: [f64; 2],
    v: VectorRadialDoc,
    u: VectorRadialDoc,
    report: ReportDoc,
}

pub fn solve(config: RunConfig) -> Result<(), CliError> {
    if config.dim.is_some() {
        return solve_matrix_mode(config);
    }
    if config.inputs.len() != 2 {
        return Err(CliError::usage(
            "solve expects two --input documents: the coefficient a, then the right-hand side f",
        ));
    }
    let a_doc = read_radial_doc(&config.inputs[0])?;
    let f_doc = read_radial_doc(&config.inputs[1])?;
    let fp = resolve_q(&config, &[a_doc.q, f_doc.q])?;
    let order = resolve_alpha(&config, &[a_doc.alpha, f_doc.alpha])?;
    let (a, _) = a_doc.to_function::<f64>()?;
    let (f, _) = f_doc.to_function::<f64>()?;
    let problem = CauchyProblem::new(fp, order, a, f, config.u0)?;

    let report = match config.method {
        Method::Direct => solve_direct(&problem)?,
        Method::Picard => solve_picard(&problem, config.max_iter, config.tol)?,
    };

    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    let text = match config.format {
        Format::Json => to_json(&SolveDoc {
            q: fp.q(),
            alpha: order.alpha(),
            u0: [config.u0.re, config.u0.im],
            v: RadialDoc::from_function(&report.v, fp, Some(order.alpha()))?,
            u: RadialDoc::from_function(&report.u, fp, Some(order.alpha()))?,
            report: ReportDoc {
                min_pivot: report.min_pivot,
                residual_max: report.residual_max,
                head_truncation_estimate: Some(report.head_truncation_estimate),
                warnings: report.warnings.clone(),
                picard: report.picard.as_ref().map(|p| PicardDoc {
                    iterations: p.iterations,
                    diff_norms: p.diff_norms.clone(),
                }),
            },
        })?,
        Format::Csv => {
            eprintln!(
                "min_pivot = {:e}; residual_max = {:e}",
                report.min_pivot, report.residual_max
            );
            let mut s = String::from("n,abs_x,v_re,v_im,u_re,u_im\n");
            for (i, n) in problem.grid().iter().enumerate() {
                let v = report.v.values()[i];
                let u = report.u.values()[i];
                s.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    n,
                    f17(fp.q_powi::<f64>(n)),
                    f17(v.re),
                    f17(v.im),
                    f17(u.re),
                    f17(u.im)
                ));
            }
            s
        }
    };
    write_out(&config, &text)
}

fn read_json<T: serde::de::DeserializeOwned>(path: &std::path::Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::usage(format!("malformed document {}: {e}", path.display())))
}

fn solve_matrix_mode(config: RunConfig) -> Result<(), CliError> {
    let dim = config.dim.unwrap_or(1);
    if config.inputs.len() != 2 {
        return Err(CliError::usage(
            "solve --dim expects two --input documents: the matrix coefficient a, then the \
             vector right-hand side f",
        ));
    }
    let a_doc: MatrixRadialDoc = read_json(&config.inputs[0])?;
    let f_doc: VectorRadialDoc = read_json(&config.inputs[1])?;
    if a_doc.dim != dim || f_doc.dim != dim {
        return Err(CliError::usage(format!(
            "--dim {dim} but documents declare a: {}, f: {}",
            a_doc.dim, f_doc.dim
        )));
    }
    let fp = resolve_q(&config, &[a_doc.q, f_doc.q])?;
    let order = resolve_alpha(&config, &[a_doc.alpha, f_doc.alpha])?;
    let (a, _) = a_doc.to_function::<f64>()?;
    let (f, _) = f_doc.to_function::<f64>()?;
    // the scalar initial value broadcasts over the components
    let u0 = vec![config.u0; dim];
    let problem = MatrixCauchyProblem::new(fp, order, a, f, u0)?;
    let report = solve_matrix(&problem)?;

    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    let text = match config.format {
        Format::Json => to_json(&MatrixSolveDoc {
            q: fp.q(),
            alpha: order.alpha(),
            dim,
            u0: [config.u0.re, config.u0.im],
            v: VectorRadialDoc::from_function(&report.v, fp, Some(order.alpha()))?,
            u: VectorRadialDoc::from_function(&report.u, fp, Some(order.alpha()))?,
            report: ReportDoc {
                min_pivot: report.min_pivot,
                residual_max: report.residual_max,
                head_truncation_estimate: None,
                warnings: report.warnings.clone(),
                picard: None,
            },
        })?,
        Format::Csv => {
            eprintln!(
                "min_pivot = {:e}; residual_max = {:e}",
                report.min_pivot, report.residual_max
            );
            let mut header = String::from("n,abs_x");
            for j in 0..dim {
                header.push_str(&format!(",v_re_{j},v_im_{j}"));
            }
            for j in 0..dim {
                header.push_str(&format!(",u_re_{j},u_im_{j}"));
            }
            header.push('\n');
            let mut s = header;
            for (i, n) in problem.grid().iter().enumerate() {
                s.push_str(&format!("{},{}", n, f17(fp.q_powi::<f64>(n))));
                for j in 0..dim {
                    let z = report.v.values()[i][j];
                    s.push_str(&format!(",{},{}", f17(z.re), f17(z.im)));
                }
                for j in 0..dim {
                    let z = report.u.values()[i][j];
                    s.push_str(&format!(",{},{}", f17(z.re), f17(z.im)));
                }
                s.push('\n');
            }
            s
        }
    };
    write_out(&config, &text)
}

// ----------------------------------------------------------------- residual

#[derive(Serialize)]
struct ResidualRow {
    n: i32,
    abs_x: f64,
    re: f64,
    im: f64,
    trusted: bool,
}

#[derive(Serialize)]
struct ResidualDoc {
    q: u32,
    alpha: f64,
    residual_max: f64,
    warnings: Vec<String>,
    rows: Vec<ResidualRow>,
}

pub fn residual(config: RunConfig) -> Result<(), CliError> {
    if config.inputs.len() != 3 {
        return Err(CliError::usage(
            "residual expects three --input documents: a, f, then the candidate u",
        ));
    }
    let a_doc = read_radial_doc(&config.inputs[0])?;
    let f_doc = read_radial_doc(&config.inputs[1])?;
    let u_doc = read_radial_doc(&config.inputs[2])?;
    let fp = resolve_q(&config, &[a_doc.q, f_doc.q, u_doc.q])?;
    let order = resolve_alpha(&config, &[a_doc.alpha, f_doc.alpha, u_doc.alpha])?;
    let (a, _) = a_doc.to_function::<f64>()?;
    let (f, _) = f_doc.to_function::<f64>()?;
    let (u, _) = u_doc.to_function::<f64>()?;
    let problem = CauchyProblem::new(fp, order, a, f, config.u0)?;
    let rep = op_residual(&problem, &u)?;

    for w in &rep.warnings {
        eprintln!("warning: {w}");
    }
    let rows: Vec<ResidualRow> = rep
        .levels
        .iter()
        .zip(&rep.values)
        .zip(&rep.trusted)
        .map(|((n, z), t)| ResidualRow {
            n: *n,
            abs_x: fp.q_powi::<f64>(*n),
            re: z.re,
            im: z.im,
            trusted: *t,
        })
        .collect();
    let text = match config.format {
        Format::Json => to_json(&ResidualDoc {
            q: fp.q(),
            alpha: order.alpha(),
            residual_max: rep.residual_max,
            warnings: rep.warnings.clone(),
            rows,
        })?,
        Format::Csv => {
            eprintln!("residual_max = {:e}", rep.residual_max);
            let mut s = String::from("n,abs_x,re,im,trusted\n");
            for r in &rows {
                s.push_str(&format!(
                    "{},{},{},{},{}\n",
                    r.n,
                    f17(r.abs_x),
                    f17(r.re),
                    f17(r.im),
                    r.trusted as u8
                ));
            }
            s
        }
    };
    write_out(&config, &text)
}

// ------------------------------------------------------------------- verify

#[derive(Serialize)]
struct VerifyRow {
    id: usize,
    name: String,
    passed: bool,
    detail: String,
}

pub fn verify(config: RunConfig) -> Result<(), CliError> {
    let results = run_all();
    // one pass/fail line per criterion, always on stdout
    for r in &results {
        println!("{r}");
    }
    // a structured report additionally lands in --output when requested
    if config.output.is_some() {
        let text = match config.format {
            Format::Json => {
                let rows: Vec<VerifyRow> = results
                    .iter()
                    .map(|r| VerifyRow {
                        id: r.id,
                        name: r.name.to_string(),
                        passed: r.passed,
                        detail: r.detail.clone(),
                    })
                    .collect();
                to_json(&rows)?
            }
            Format::Csv => {
                let mut s = String::from("id,passed,name,detail\n");
                for r in &results {
                    s.push_str(&format!(
                        "{},{},{},\"{}\"\n",
                        r.id, r.passed as u8, r.name, r.detail
                    ));
                }
                s
            }
        };
        write_out(&config, &text)?;
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    if failed > 0 {
        return Err(CliError::verification(failed));
    }
    Ok(())
}
