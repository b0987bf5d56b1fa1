//! Browser demo: a random sparse structured saddle system, the backward
//! errors of a noisy solution, and the minimal perturbation as a heatmap.
//!
//! The page in `www/` drives a [`Demo`]; everything returns flat `f64`
//! arrays so the JavaScript side only draws.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use structbe::experiments::solve_gep;
use structbe::structured::build;
use structbe::{
    compute_be, rigal_gaches, CMatrix, CVector, Complex64, SaddleSystem, StructureClass,
    StructureKind, Weights,
};
use wasm_bindgen::prelude::*;

fn random_block(
    rng: &mut ChaCha8Rng,
    kind: Option<StructureKind>,
    rows: usize,
    cols: usize,
    density: f64,
) -> CMatrix {
    let entry = |rng: &mut ChaCha8Rng| {
        if rng.random_bool(density) {
            Complex64::new(rng.random_range(-1.0..1.0), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    };
    match kind {
        Some(kind) => {
            let len = kind
                .generator_len(rows, cols)
                .expect("square where required");
            let mut gen = CVector::from_fn(len, |_, _| entry(rng));
            // keep the main diagonal so the system stays solvable
            let main = if kind == StructureKind::Toeplitz {
                rows - 1
            } else {
                0
            };
            gen[main] = Complex64::new(2.0 + rng.random::<f64>(), 0.0);
            build(kind, rows, cols, &gen).expect("generator length matches")
        }
        None => {
            let mut m = CMatrix::from_fn(rows, cols, |_, _| entry(rng));
            for i in 0..rows.min(cols) {
                m[(i, i)] = Complex64::new(2.0 + rng.random::<f64>(), 0.0);
            }
            m
        }
    }
}

fn class_for(kind: &str) -> Result<StructureClass, String> {
    match kind {
        "circulant" => Ok(StructureClass::S1),
        "toeplitz" => Ok(StructureClass::S2),
        "sym-toeplitz" => Ok(StructureClass::S3),
        other => Err(format!("unknown structure '{other}'")),
    }
}

#[wasm_bindgen]
pub struct Demo {
    system: SaddleSystem,
    class: StructureClass,
    exact: CVector,
    seed: u64,
}

impl Demo {
    pub fn create(kind: &str, n: usize, density: f64, seed: u64) -> Result<Demo, String> {
        if !(1..=24).contains(&n) {
            return Err(format!("n must be between 1 and 24, got {n}"));
        }
        if !(0.0..=1.0).contains(&density) {
            return Err(format!("density must be in [0, 1], got {density}"));
        }
        let class = class_for(kind)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let [ka, kb, kc] = class.block_kinds();
        let a = random_block(&mut rng, ka, n, n, density);
        let b = random_block(&mut rng, kb, n, n, density);
        let c = random_block(&mut rng, kc, n, n, density);
        let f = CVector::from_fn(n, |_, _| Complex64::new(rng.random_range(-1.0..1.0), 0.0));
        let g = CVector::from_fn(n, |_, _| Complex64::new(rng.random_range(-1.0..1.0), 0.0));
        let system = SaddleSystem::new(a, b, c, f, g).map_err(|e| e.to_string())?;
        let (x, y) = solve_gep(&system).map_err(|e| e.to_string())?;
        let exact = CVector::from_iterator(2 * n, x.iter().chain(y.iter()).copied());
        Ok(Demo {
            system,
            class,
            exact,
            seed,
        })
    }

    /// `ũ = u ⊙ (1 + 10^noise · r)` with `r` uniform in `[−1, 1]`.
    fn noisy(&self, noise_log10: f64) -> (CVector, CVector) {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ 0x9e37_79b9_7f4a_7c15);
        let scale = 10f64.powf(noise_log10);
        let u = self
            .exact
            .map(|z| z * (1.0 + scale * rng.random_range(-1.0..1.0)));
        let n = self.system.n();
        (u.rows(0, n).into_owned(), u.rows(n, n).into_owned())
    }

    pub fn errors(&self, noise_log10: f64) -> Result<Vec<f64>, String> {
        let (x, y) = self.noisy(noise_log10);
        let w = Weights::absolute();
        let eta = |class, sparse| -> Result<f64, String> {
            let r =
                compute_be(&self.system, &x, &y, &w, class, sparse).map_err(|e| e.to_string())?;
            Ok(r.eta.unwrap_or(f64::NAN))
        };
        Ok(vec![
            rigal_gaches(&self.system, &x, &y).unwrap_or(0.0),
            eta(StructureClass::S0, false)?,
            eta(StructureClass::S0, true)?,
            eta(self.class, false)?,
            eta(self.class, true)?,
        ])
    }

    pub fn perturbation(
        &self,
        noise_log10: f64,
        structured: bool,
        sparse: bool,
    ) -> Result<Vec<f64>, String> {
        let (x, y) = self.noisy(noise_log10);
        let class = if structured {
            self.class
        } else {
            StructureClass::S0
        };
        let r = compute_be(&self.system, &x, &y, &Weights::absolute(), class, sparse)
            .map_err(|e| e.to_string())?;
        let p = &r.perturbations;
        let delta = SaddleSystem::new(
            p.da.clone(),
            p.db.clone(),
            p.dc.clone(),
            p.df.clone(),
            p.dg.clone(),
        )
        .map_err(|e| e.to_string())?;
        Ok(magnitudes(&delta.coefficient_matrix()))
    }
}

/// Row-major `|a_ij|`.
fn magnitudes(m: &CMatrix) -> Vec<f64> {
    (0..m.nrows())
        .flat_map(|i| (0..m.ncols()).map(move |j| m[(i, j)].norm()))
        .collect()
}

#[wasm_bindgen]
impl Demo {
    /// `kind` is `circulant`, `toeplitz` or `sym-toeplitz`.
    #[wasm_bindgen(constructor)]
    pub fn new(kind: &str, n: usize, density: f64, seed: u64) -> Result<Demo, JsError> {
        Demo::create(kind, n, density, seed).map_err(|e| JsError::new(&e))
    }

    /// Side length of the assembled coefficient matrix.
    pub fn dim(&self) -> usize {
        self.system.n() + self.system.m()
    }

    pub fn class_name(&self) -> String {
        self.class.to_string()
    }

    /// `|𝒜|`, row-major.
    pub fn matrix(&self) -> Vec<f64> {
        magnitudes(&self.system.coefficient_matrix())
    }

    /// `[unstructured, S0, S0 sparse, class, class sparse]` for a solution
    /// with relative noise `10^noise_log10`. NaN marks an undefined error.
    pub fn backward_errors(&self, noise_log10: f64) -> Result<Vec<f64>, JsError> {
        self.errors(noise_log10).map_err(|e| JsError::new(&e))
    }

    /// `|Δ𝒜|` of the minimal perturbation, row-major.
    pub fn minimal_perturbation(
        &self,
        noise_log10: f64,
        structured: bool,
        sparse: bool,
    ) -> Result<Vec<f64>, JsError> {
        self.perturbation(noise_log10, structured, sparse)
            .map_err(|e| JsError::new(&e))
    }
}
