use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};

use crate::branching::branching_analysis;
use crate::cli::verify::{run_criterion, table, CRITERIA};
use crate::cli::{RunConfig, Subcommand, Format};
use crate::continuation::{branch_report, trace_branch, ContinuationOptions, Termination};
use crate::error::{invalid, Error, Result};
use crate::numerics::Grid;
use crate::similarity::{solve_f0, solve_fk_linear, F0Options, NonlinearEigenfunction};
use crate::spectral::kernel::fmt17;
use crate::spectral::{gaussian_bump, kernel_1d, kernel_radial, linear_eigenpair, rescaled_convergence, MultiIndex};
use crate::unstable::{exponents_unstable, p_critical, solve_f0_unstable};

/// Simplex mesh of the |β| = 2 perturbation samples in `lyapunov`.
const LYAPUNOV_SIMPLEX_STEP: f64 = 0.25;

pub(super) struct Outcome {
    /// Contents of the output file (standard output without --out).
    pub file: String,
    /// JSON record printed to standard output when the file goes to --out.
    pub record: Option<String>,
    pub ok: bool,
    /// JSON diagnostics for standard error when `ok` is false.
    pub diagnostics: Option<String>,
}

impl Outcome {
    pub fn emit(&self, out: Option<&Path>) -> Result<()> {
        match out {
            Some(path) => {
                std::fs::write(path, &self.file)?;
                if let Some(r) = &self.record {
                    println!("{r}");
                }
            }
            None => {
                // A closed pipe (`| head`) is not a failure.
                let mut stdout = std::io::stdout().lock();
                match stdout.write_all(self.file.as_bytes()).and_then(|_| stdout.flush()) {
                    Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => return Err(e.into()),
                    _ => {}
                }
            }
        }
        Ok(())
    }
}

fn wrap<T: Serialize>(config: &RunConfig, result: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(&json!({ "provenance": config.provenance(), "result": result }))?;
    s.push('\n');
    Ok(s)
}

fn header(config: &RunConfig) -> String {
    config.provenance().csv_header()
}

fn f0_options(config: &RunConfig) -> F0Options {
    F0Options { delta: config.delta, tol: config.shoot_tol, ivp_tol: config.ivp_tol, ..F0Options::default() }
}

pub(super) fn execute(sub: Subcommand, config: &RunConfig) -> Result<Outcome> {
    match sub {
        Subcommand::Kernel => kernel(config),
        Subcommand::Eigen => eigen(config),
        Subcommand::Shoot => shoot(config),
        Subcommand::Branch => branch(config),
        Subcommand::Lyapunov => lyapunov(config),
        Subcommand::Unstable => unstable(config),
        Subcommand::Evolve => evolve(config),
        Subcommand::Verify => verify(config),
    }
}

fn kernel(config: &RunConfig) -> Result<Outcome> {
    let grid = Grid::uniform(0.0, config.y_max, config.points)?;
    let k = if config.dim == 1 { kernel_1d(&grid)? } else { kernel_radial(config.dim, &grid)? };
    let mass = k.mass();
    let ok = (mass - 1.0).abs() <= 1e-8;
    let verdict = if ok { "pass" } else { "fail" };
    let file = match config.format {
        Format::Csv => format!(
            "{}{}# mass = {}\n# mass_check = {verdict} (|mass - 1| <= 1e-8)\n",
            header(config),
            k.to_csv(),
            fmt17(mass)
        ),
        Format::Json => wrap(
            config,
            &json!({
                "N": k.dim,
                "mass": mass,
                "mass_check": ok,
                "decay": k.decay,
                "residual": k.residual,
                "y": k.grid.points(),
                "F": k.values(),
            }),
        )?,
    };
    // A short window truncates the tail; the footer records that, it is not a solver failure.
    if !ok {
        eprintln!("{}", json!({ "warning": "mass check failed; increase --ymax", "mass": mass, "limit": 1e-8 }));
    }
    Ok(Outcome { file, record: None, ok: true, diagnostics: None })
}

fn eigen(config: &RunConfig) -> Result<Outcome> {
    if config.dim != 1 {
        return Err(Error::Unsupported(format!("eigen in dimension {}; use N = 1", config.dim)));
    }
    let grid = Grid::uniform(-config.y_max, config.y_max, config.points)?;
    let kernel = kernel_1d(&grid)?;
    let pair = linear_eigenpair(&MultiIndex::scalar(config.k), &kernel)?;
    let adjoint: Vec<String> = pair.psi_star.terms.iter().map(|(e, c)| format!("({c})*y^{}", e[0])).collect();
    let file = match config.format {
        Format::Csv => format!(
            "{}# k = {}\n# lambda = {}\n# adjoint = ({}) / sqrt({}!)\n{}",
            header(config),
            config.k,
            fmt17(pair.lambda),
            adjoint.join(" + "),
            config.k,
            pair.psi.to_csv()
        ),
        Format::Json => wrap(
            config,
            &json!({
                "k": config.k,
                "lambda": pair.lambda,
                "adjoint": pair.psi_star,
                "y": pair.psi.grid.points(),
                "psi": pair.psi.values(),
            }),
        )?,
    };
    Ok(Outcome { file, record: None, ok: true, diagnostics: None })
}

fn profile_outcome(config: &RunConfig, ef: &NonlinearEigenfunction) -> Result<Outcome> {
    let record = ef.to_json()?;
    let file = match config.format {
        Format::Csv => format!("{}{}", header(config), ef.profile.to_csv()),
        Format::Json => wrap(config, &serde_json::from_str::<Value>(&record)?)?,
    };
    let ok = ef.converged;
    Ok(Outcome {
        file,
        record: (config.format == Format::Csv).then(|| record.clone()),
        ok,
        diagnostics: (!ok).then_some(record),
    })
}

fn shoot(config: &RunConfig) -> Result<Outcome> {
    let ef = if config.n == 0.0 {
        let grid = Grid::uniform(-config.y_max, config.y_max, config.points)?;
        solve_fk_linear(config.k, config.dim, &grid)?
    } else {
        if config.k != 0 {
            return Err(Error::Unsupported(format!("f_k with k = {} is available at n = 0 only", config.k)));
        }
        solve_f0(config.n, config.dim, &f0_options(config))?
    };
    profile_outcome(config, &ef)
}

fn branch(config: &RunConfig) -> Result<Outcome> {
    let defaults = ContinuationOptions::default();
    if config.n <= defaults.n_start {
        return invalid(format!("branch needs n > {}, got {}", defaults.n_start, config.n));
    }
    let opts = ContinuationOptions { n_max: config.n, f0: f0_options(config), ..defaults };
    let b = trace_branch(config.dim, &opts)?;
    let file = match config.format {
        Format::Csv => format!("{}{}", header(config), branch_report(&b)),
        Format::Json => wrap(config, &b.points)?,
    };
    let ok = b.termination == Termination::ReachedEnd;
    let diagnostics = (!ok).then(|| {
        json!({ "termination": b.termination, "last_n": b.last().n, "diagnostics": b.diagnostics }).to_string()
    });
    Ok(Outcome { file, record: None, ok, diagnostics })
}

fn lyapunov(config: &RunConfig) -> Result<Outcome> {
    let r = branching_analysis(true, LYAPUNOV_SIMPLEX_STEP)?;
    let file = match config.format {
        Format::Json => wrap(config, &r)?,
        Format::Csv => {
            let mut rows: Vec<(String, String)> = Vec::new();
            for m in &r.mu10 {
                rows.push((format!("mu10_N{}", m.dim), fmt17(m.value)));
                rows.push((format!("mu10_N{}_exact", m.dim), fmt17(m.exact)));
                rows.push((format!("mu10_N{}_divergence_term", m.dim), fmt17(m.divergence_term)));
            }
            for i in 0..2 {
                for j in 0..2 {
                    rows.push((format!("dipole_P{}{}", i + 1, j + 1), fmt17(r.dipole.p(i, j))));
                }
            }
            rows.push(("dipole_nondegeneracy".into(), fmt17(r.dipole.nondegeneracy)));
            let s = &r.dipole_solution;
            rows.push(("mu11".into(), fmt17(s.coefficients.mu1)));
            rows.push(("dipole_c1".into(), fmt17(s.coefficients.c[0])));
            rows.push(("dipole_c2".into(), fmt17(s.coefficients.c[1])));
            rows.push(("dipole_residual".into(), fmt17(s.residual)));
            rows.push(("dipole_family".into(), s.family.to_string()));
            let q = &r.quadratic;
            for (name, v) in [("A", q.galerkin.a), ("B", q.galerkin.b), ("C", q.galerkin.c)] {
                rows.push((format!("quadratic_{name}"), fmt17(v)));
            }
            for (name, v) in ["A", "B", "C"].iter().zip(q.printed) {
                rows.push((format!("quadratic_{name}_printed"), fmt17(v)));
            }
            rows.push(("quadratic_case".into(), format!("{:?}", q.count.case)));
            rows.push(("quadratic_count".into(), q.count.count.map_or("none".into(), |c| c.to_string())));
            rows.push(("quadratic_omega_norm".into(), fmt17(q.galerkin.omega_norm)));
            if let Some(second) = &r.second {
                rows.push(("conic_count".into(), second.count.count.map_or("none".into(), |c| c.to_string())));
                rows.push(("conic_count_printed".into(), second.printed_count.count.map_or("none".into(), |c| c.to_string())));
                rows.push(("conic_omega_norm_1".into(), fmt17(second.omega_norms[0])));
                rows.push(("conic_omega_norm_2".into(), fmt17(second.omega_norms[1])));
            }
            let mut out = header(config);
            out.push_str("quantity,value\n");
            for (k, v) in rows {
                out.push_str(&format!("{k},{v}\n"));
            }
            out
        }
    };
    Ok(Outcome { file, record: None, ok: true, diagnostics: None })
}

#[derive(Serialize)]
struct UnstableRecord<'a> {
    exponents: crate::unstable::ExponentRecord,
    converged: Option<bool>,
    reached: Option<f64>,
    y0: Option<f64>,
    residual: Option<f64>,
    interior_residual: Option<f64>,
    ladder: Option<&'a [crate::unstable::LadderStep]>,
    notes: &'a [String],
}

fn unstable(config: &RunConfig) -> Result<Outcome> {
    let (n, dim) = (config.n, config.dim);
    let p0 = p_critical(n, dim);
    let p = config.p.unwrap_or(p0);
    let exponents = exponents_unstable(n, p, dim)?;
    let solve = n > 0.0 && (p - p0).abs() <= 1e-12 * p0;
    let solved = if solve { Some(solve_f0_unstable(n, dim, p, &f0_options(config))?) } else { None };
    let record = UnstableRecord {
        exponents: exponents.record(),
        converged: solved.as_ref().map(|u| u.converged),
        reached: solved.as_ref().map(|u| u.reached),
        y0: solved.as_ref().and_then(|u| u.profile.y0),
        residual: solved.as_ref().map(|u| u.profile.residual_norm()),
        interior_residual: solved.as_ref().map(|u| u.profile.interior_residual),
        ladder: solved.as_ref().map(|u| u.ladder.as_slice()),
        notes: solved.as_ref().map_or(&[], |u| u.notes.as_slice()),
    };
    let record_json = serde_json::to_string_pretty(&record)?;
    let ok = exponents.identities_ok() && solved.as_ref().is_none_or(|u| u.converged);
    let file = match (config.format, &solved) {
        (Format::Json, _) => wrap(config, &record)?,
        (Format::Csv, Some(u)) => format!("{}{}", header(config), u.profile.profile.to_csv()),
        (Format::Csv, None) => {
            let e = exponents.record();
            format!(
                "{}n,p,N,alpha,beta,p0,identities_ok\n{},{},{},{},{},{},{}\n",
                header(config),
                fmt17(e.n),
                fmt17(e.p),
                e.dim,
                fmt17(e.alpha),
                fmt17(e.beta),
                fmt17(e.p0),
                e.identities_ok
            )
        }
    };
    Ok(Outcome {
        file,
        record: (config.format == Format::Csv).then(|| record_json.clone()),
        ok,
        diagnostics: (!ok).then_some(record_json),
    })
}

fn evolve(config: &RunConfig) -> Result<Outcome> {
    if config.dim != 1 {
        return Err(Error::Unsupported(format!("evolve in dimension {}; use N = 1", config.dim)));
    }
    let grid = Grid::uniform(-config.y_max, config.y_max, config.points)?;
    let taus: Vec<f64> = (0..9).map(|i| 20.0 + 5.0 * i as f64).collect();
    let generic = rescaled_convergence(&gaussian_bump(&grid, 0.7, 1.0)?, &taus)?;
    let symmetric = rescaled_convergence(&gaussian_bump(&grid, 0.0, 1.0)?, &taus)?;
    let ok = (generic.rate - 0.1).abs() <= 0.01 && (symmetric.rate - 0.2).abs() <= 0.02;
    let file = match config.format {
        Format::Json => wrap(config, &json!({ "generic": generic, "symmetric": symmetric }))?,
        Format::Csv => {
            let mut out = header(config);
            out.push_str("tau,error_generic,error_symmetric\n");
            for (i, t) in taus.iter().enumerate() {
                out.push_str(&format!("{},{},{}\n", fmt17(*t), fmt17(generic.errors[i]), fmt17(symmetric.errors[i])));
            }
            out.push_str(&format!("# rate_generic = {} (target 0.1)\n", fmt17(generic.rate)));
            out.push_str(&format!("# rate_symmetric = {} (target 0.2)\n", fmt17(symmetric.rate)));
            out
        }
    };
    let diagnostics = (!ok).then(|| json!({ "rate_generic": generic.rate, "rate_symmetric": symmetric.rate }).to_string());
    Ok(Outcome { file, record: None, ok, diagnostics })
}

fn verify(config: &RunConfig) -> Result<Outcome> {
    let ids: Vec<usize> = match config.k {
        0 => (1..=CRITERIA).collect(),
        k if k <= CRITERIA => vec![k],
        k => return invalid(format!("no criterion {k}; choose 1..={CRITERIA} or 0 for all")),
    };
    let mut outcomes = Vec::new();
    for id in ids {
        let o = run_criterion(id);
        println!("{}", o.line());
        outcomes.push(o);
    }
    let summary = table(&outcomes);
    println!("{}", summary.lines().last().unwrap_or_default());
    let ok = outcomes.iter().all(|o| o.passed);
    let file = match (config.out.is_some(), config.format) {
        (false, _) => String::new(),
        (true, Format::Json) => wrap(config, &outcomes)?,
        (true, Format::Csv) => {
            let mut out = header(config);
            out.push_str("criterion,passed,seconds,title,detail\n");
            for o in &outcomes {
                out.push_str(&format!("{},{},{:.3},{},\"{}\"\n", o.id, o.passed, o.seconds, o.title, o.detail.replace('"', "'")));
            }
            out
        }
    };
    let failed: Vec<usize> = outcomes.iter().filter(|o| !o.passed).map(|o| o.id).collect();
    let diagnostics = (!ok).then(|| json!({ "failed_criteria": failed }).to_string());
    Ok(Outcome { file, record: None, ok, diagnostics })
}
