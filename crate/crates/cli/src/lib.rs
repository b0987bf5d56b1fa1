//! Command implementations behind the `structbe` binary. Each command
//! returns its report text and a status; the binary maps errors to exit
//! code 1 and infeasible results to 2.

pub mod manifest;
pub mod mtx;

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use structbe::experiments::{self, Experiment, SweepRow};
use structbe::wrls::compute_zeta_with;
use structbe::{
    compute_be_with, rigal_gaches, verify_perturbation, BeReport, CVector, PerturbationSet,
    Tolerances,
};

use manifest::{load_system, load_wrls};
use mtx::{read_matrix, read_vector, write_matrix, write_vector};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error(transparent)]
    Core(#[from] structbe::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    /// No admissible perturbation exists, or a verification failed.
    Infeasible,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::Infeasible => 2,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Output {
    pub text: String,
    pub status: Status,
}

/// 16 significant digits.
pub fn num(v: f64) -> String {
    format!("{v:.15e}")
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "undefined".to_string(), num)
}

/// Human-readable lines followed by a `key=value` block.
#[derive(Debug, Default)]
struct Report {
    title: String,
    fields: Vec<(String, String)>,
}

impl Report {
    fn new(title: impl Into<String>) -> Self {
        Self {
            title: title.into(),
            fields: Vec::new(),
        }
    }

    fn put(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.fields.push((key.to_string(), value.to_string()));
        self
    }

    fn render(&self) -> String {
        let width = self.fields.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        let mut out = format!("{}\n", self.title);
        for (k, v) in &self.fields {
            writeln!(out, "  {k:<width$}  {v}").unwrap();
        }
        out.push('\n');
        for (k, v) in &self.fields {
            writeln!(out, "{k}={v}").unwrap();
        }
        out
    }
}

/// Tolerances, with `STRUCTBE_RANK_TOL` and `STRUCTBE_CONSISTENCY_TOL`
/// overriding the defaults.
pub fn tolerances_from_env() -> Result<Tolerances, CliError> {
    let read = |name: &str| -> Result<Option<f64>, CliError> {
        match std::env::var(name) {
            Ok(v) => v
                .trim()
                .parse::<f64>()
                .ok()
                .filter(|x| *x >= 0.0 && x.is_finite())
                .map(Some)
                .ok_or_else(|| {
                    CliError::Input(format!("{name} must be a non-negative number, got '{v}'"))
                }),
            Err(_) => Ok(None),
        }
    };
    let mut tol = Tolerances::default();
    if let Some(t) = read("STRUCTBE_RANK_TOL")? {
        tol.rank_tol = Some(t);
    }
    if let Some(t) = read("STRUCTBE_CONSISTENCY_TOL")? {
        tol.consistency_tol = t;
    }
    Ok(tol)
}

fn read_solution(path: &Path, n: usize, m: usize) -> Result<(CVector, CVector), CliError> {
    let u = read_vector(path)?;
    if u.len() != n + m {
        return Err(CliError::Input(format!(
            "{}: solution has {} entries, expected n + m = {}",
            path.display(),
            u.len(),
            n + m
        )));
    }
    Ok(experiments::split(&u, n))
}

fn create_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))
}

pub fn dump_perturbations(dir: &Path, p: &PerturbationSet) -> Result<(), CliError> {
    create_dir(dir)?;
    write_matrix(&dir.join("dA.mtx"), &p.da)?;
    write_matrix(&dir.join("dB.mtx"), &p.db)?;
    write_matrix(&dir.join("dC.mtx"), &p.dc)?;
    write_vector(&dir.join("df.vec"), &p.df)?;
    write_vector(&dir.join("dg.vec"), &p.dg)
}

fn put_be(r: &mut Report, prefix: &str, be: &BeReport) {
    let p = &be.perturbations;
    r.put(&format!("{prefix}eta"), opt(be.eta))
        .put(&format!("{prefix}feasible"), be.feasible)
        .put(&format!("{prefix}norm_dA"), num(p.da.norm()))
        .put(&format!("{prefix}norm_dB"), num(p.db.norm()))
        .put(&format!("{prefix}norm_dC"), num(p.dc.norm()))
        .put(&format!("{prefix}norm_df"), num(p.df.norm()))
        .put(&format!("{prefix}norm_dg"), num(p.dg.norm()))
        .put(&format!("{prefix}verify_residual"), num(be.verify_residual))
        .put(
            &format!("{prefix}coefficient_shape"),
            format!("{}x{}", be.coefficient_shape.0, be.coefficient_shape.1),
        )
        .put(&format!("{prefix}coefficient_rank"), be.coefficient_rank)
        .put(&format!("{prefix}lsq_residual"), num(be.lsq_residual));
}

pub fn compute(manifest: &Path, solution: &Path, dump: Option<&Path>) -> Result<Output, CliError> {
    let input = load_system(manifest)?;
    let sys = &input.system;
    let (x, y) = read_solution(solution, sys.n(), sys.m())?;
    let tol = tolerances_from_env()?;
    let dense = compute_be_with(sys, &x, &y, &input.weights, input.class, false, &tol)?;
    let sparse = compute_be_with(sys, &x, &y, &input.weights, input.class, true, &tol)?;
    let selected = if input.sparse { &sparse } else { &dense };
    if let Some(dir) = dump {
        dump_perturbations(dir, &selected.perturbations)?;
    }

    let mode = if input.sparse {
        "sparsity-preserving"
    } else {
        "dense"
    };
    let mut r = Report::new(format!(
        "structured backward error, class {}, {mode}",
        input.class
    ));
    let rd = structbe::residual(sys, &x, &y)?.rd;
    r.put("n", sys.n())
        .put("m", sys.m())
        .put("class", input.class)
        .put("sparsity", if input.sparse { "sparse" } else { "dense" })
        .put("weights", input.weights.as_array().map(num).join(","))
        .put("residual_norm", num(rd.norm()))
        .put(
            "eta_unstructured",
            rigal_gaches(sys, &x, &y).map_or_else(|_| "undefined".into(), num),
        )
        .put("eta_class_dense", opt(dense.eta))
        .put("eta_class_sparse", opt(sparse.eta));
    put_be(&mut r, "", selected);
    let status = if selected.feasible {
        Status::Ok
    } else {
        Status::Infeasible
    };
    Ok(Output {
        text: r.render(),
        status,
    })
}

fn read_perturbations(
    dir: &Path,
    class: structbe::StructureClass,
    sparse: bool,
) -> Result<PerturbationSet, CliError> {
    Ok(PerturbationSet {
        da: read_matrix(&dir.join("dA.mtx"))?,
        db: read_matrix(&dir.join("dB.mtx"))?,
        dc: read_matrix(&dir.join("dC.mtx"))?,
        df: read_vector(&dir.join("df.vec"))?,
        dg: read_vector(&dir.join("dg.vec"))?,
        class,
        sparse,
    })
}

/// Relative bound on the perturbed residual for a verification to pass.
pub const VERIFY_TOL: f64 = 1e-10;

pub fn verify(manifest: &Path, solution: &Path, perturbations: &Path) -> Result<Output, CliError> {
    let input = load_system(manifest)?;
    let sys = &input.system;
    let (x, y) = read_solution(solution, sys.n(), sys.m())?;
    let pert = read_perturbations(perturbations, input.class, input.sparse)?;
    let v = verify_perturbation(sys, &x, &y, &pert, &input.weights)?;
    let scale =
        sys.coefficient_norm() * (x.norm_squared() + y.norm_squared()).sqrt() + sys.rhs().norm();
    let relative = if scale == 0.0 {
        v.residual_norm
    } else {
        v.residual_norm / scale
    };
    let verified = v.structure_ok && v.sparsity_ok && relative <= VERIFY_TOL;

    let mut r = Report::new(format!("perturbation check, class {}", input.class));
    r.put("residual_norm", num(v.residual_norm))
        .put("relative_residual", num(relative))
        .put("structure_ok", v.structure_ok)
        .put("sparsity_ok", v.sparsity_ok)
        .put("weighted_norm", num(v.weighted_norm))
        .put("verified", verified);
    Ok(Output {
        text: r.render(),
        status: if verified {
            Status::Ok
        } else {
            Status::Infeasible
        },
    })
}

pub fn wrls(manifest: &Path, solution: &Path, dump: Option<&Path>) -> Result<Output, CliError> {
    let input = load_wrls(manifest)?;
    let p = &input.problem;
    let (r, z) = read_solution(solution, p.n(), p.m())?;
    let tol = tolerances_from_env()?;
    let rep = compute_zeta_with(p, &r, &z, input.w2, input.w4, input.sparse, tol.rank_tol)?;
    if let Some(dir) = dump {
        create_dir(dir)?;
        write_matrix(&dir.join("dK.mtx"), &rep.dk)?;
        write_vector(&dir.join("df.vec"), &rep.df)?;
    }
    let mut out = Report::new(format!("WRLS backward error, K {}", p.kind()));
    out.put("n", p.n())
        .put("m", p.m())
        .put("lambda", num(p.lambda()))
        .put("sparsity", if input.sparse { "sparse" } else { "dense" })
        .put("zeta", opt(rep.zeta))
        .put("feasible", rep.feasible)
        .put("residual_f", num(rep.r_f.norm()))
        .put("residual_g", num(rep.r_g.norm()))
        .put("norm_dK", num(rep.dk.norm()))
        .put("norm_df", num(rep.df.norm()))
        .put("rank", rep.rank)
        .put("augmented_rank", rep.augmented_rank)
        .put("lsq_residual", num(rep.lsq_residual));
    Ok(Output {
        text: out.render(),
        status: if rep.feasible {
            Status::Ok
        } else {
            Status::Infeasible
        },
    })
}

pub fn sweep_csv(rows: &[SweepRow], structured: &str) -> String {
    let mut out = format!(
        "n,eta,eta_sps,eta_{structured},eta_{structured}_sps,gmres_iterations,gmres_rel_residual\n"
    );
    for row in rows {
        let v = row.values();
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            row.n,
            num(v[0]),
            num(v[1]),
            num(v[2]),
            num(v[3]),
            row.gmres_iterations,
            num(row.gmres_rel_residual)
        )
        .unwrap();
    }
    out
}

pub fn default_sizes(exp: Experiment) -> &'static str {
    match exp {
        Experiment::Ex72 => "8:4:100",
        _ => "8,16,32",
    }
}

/// Fixed instances produce a report, sweeps produce CSV (written to `out`
/// when given, otherwise returned as the text).
pub fn experiment(
    exp: Experiment,
    sizes: Option<&str>,
    seed: u64,
    out: Option<&Path>,
) -> Result<Output, CliError> {
    let tol = tolerances_from_env()?;
    let text = match exp {
        Experiment::Ex71 => {
            let sys = experiments::ill_scaled_toeplitz_system();
            let (x, y) = experiments::ill_scaled_reference_solution();
            let w = structbe::Weights::absolute();
            let be = |sparse| {
                compute_be_with(&sys, &x, &y, &w, structbe::StructureClass::S2, sparse, &tol)
            };
            let mut r =
                Report::new("ill-scaled Toeplitz system, LAPACK-style GEP solution, unit weights");
            r.put("eta_unstructured", num(rigal_gaches(&sys, &x, &y)?))
                .put("eta_s2", opt(be(false)?.eta))
                .put("eta_s2_sps", opt(be(true)?.eta));
            r.render()
        }
        Experiment::Ex56 => {
            let (sys, x, y) = experiments::kkt_reference_system();
            let w = experiments::kkt_reference_weights();
            let be = compute_be_with(&sys, &x, &y, &w, structbe::StructureClass::S0, false, &tol)?;
            let mut r = Report::new("4+2 KKT system, only B and f perturbed");
            r.put("weights", w.as_array().map(num).join(","));
            put_be(&mut r, "", &be);
            r.render()
        }
        Experiment::Ex72 | Experiment::Ex73 => {
            let sizes = experiments::parse_sizes(sizes.unwrap_or(default_sizes(exp)))?;
            let (rows, label) = if exp == Experiment::Ex72 {
                (experiments::sparse_toeplitz_sweep(&sizes, seed)?, "s2")
            } else {
                (experiments::gaussian_kernel_sweep(&sizes, seed)?, "s3")
            };
            sweep_csv(&rows, label)
        }
    };
    match out {
        Some(path) => {
            fs::write(path, &text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            Ok(Output {
                text: format!("wrote {}\n", path.display()),
                status: Status::Ok,
            })
        }
        None => Ok(Output {
            text,
            status: Status::Ok,
        }),
    }
}
