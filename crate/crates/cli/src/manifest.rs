//! Flat `key = value` manifests. Paths are resolved against the
//! manifest's directory.
//!
//! Saddle systems use `a_path`, `b_path`, `c_path`, `f_path`, `g_path`,
//! `class`, `sparsity`, `weights` (`absolute` or `relative`), optional
//! `w1`..`w5` overrides, optional `a_tag`/`b_tag`/`c_tag` and
//! `structure_tol`. WRLS problems use `w_path`, `k_path`, `f_path`,
//! `kind`, `lambda`, `w2`, `w4` and `sparsity`.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use structbe::wrls::WrlsProblem;
use structbe::{SaddleSystem, StructureClass, StructureKind, Weights};

use crate::mtx::{read_matrix, read_vector};
use crate::CliError;

const SYSTEM_KEYS: &[&str] = &[
    "a_path",
    "b_path",
    "c_path",
    "f_path",
    "g_path",
    "class",
    "sparsity",
    "weights",
    "w1",
    "w2",
    "w3",
    "w4",
    "w5",
    "a_tag",
    "b_tag",
    "c_tag",
    "structure_tol",
];
const WRLS_KEYS: &[&str] = &[
    "w_path", "k_path", "f_path", "kind", "lambda", "w2", "w4", "sparsity",
];

#[derive(Debug, Clone)]
pub struct Manifest {
    dir: PathBuf,
    entries: BTreeMap<String, String>,
}

impl Manifest {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::parse(&text, dir)
    }

    pub fn parse(text: &str, dir: PathBuf) -> Result<Self, CliError> {
        let mut entries = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Input(format!("manifest line {}: expected key = value", i + 1))
            })?;
            let key = key.trim().to_ascii_lowercase();
            if entries
                .insert(key.clone(), value.trim().to_string())
                .is_some()
            {
                return Err(CliError::Input(format!(
                    "manifest line {}: duplicate key '{key}'",
                    i + 1
                )));
            }
        }
        Ok(Self { dir, entries })
    }

    fn check_keys(&self, allowed: &[&str]) -> Result<(), CliError> {
        match self.entries.keys().find(|k| !allowed.contains(&k.as_str())) {
            Some(k) => Err(CliError::Input(format!("unknown manifest key '{k}'"))),
            None => Ok(()),
        }
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    fn require(&self, key: &str) -> Result<&str, CliError> {
        self.get(key)
            .ok_or_else(|| CliError::Input(format!("manifest is missing '{key}'")))
    }

    fn path(&self, key: &str) -> Result<PathBuf, CliError> {
        Ok(self.dir.join(self.require(key)?))
    }

    fn number(&self, key: &str) -> Result<Option<f64>, CliError> {
        self.get(key)
            .map(|v| {
                v.parse()
                    .map_err(|_| CliError::Input(format!("'{key}' is not a number: '{v}'")))
            })
            .transpose()
    }

    fn sparse(&self, default: bool) -> Result<bool, CliError> {
        match self.get("sparsity").map(str::to_ascii_lowercase).as_deref() {
            None => Ok(default),
            Some("sparse" | "true" | "yes" | "1") => Ok(true),
            Some("dense" | "false" | "no" | "0") => Ok(false),
            Some(other) => Err(CliError::Input(format!(
                "sparsity must be 'sparse' or 'dense', got '{other}'"
            ))),
        }
    }
}

/// A saddle system with the computation it asks for.
#[derive(Debug, Clone)]
pub struct SystemInput {
    pub system: SaddleSystem,
    pub class: StructureClass,
    pub sparse: bool,
    pub weights: Weights,
}

fn tag(value: &str) -> Result<Option<StructureKind>, CliError> {
    match value.to_ascii_lowercase().as_str() {
        "dense" | "none" | "" => Ok(None),
        other => Ok(Some(other.parse()?)),
    }
}

pub fn load_system(path: &Path) -> Result<SystemInput, CliError> {
    let m = Manifest::load(path)?;
    m.check_keys(SYSTEM_KEYS)?;
    let system = SaddleSystem::new(
        read_matrix(&m.path("a_path")?)?,
        read_matrix(&m.path("b_path")?)?,
        read_matrix(&m.path("c_path")?)?,
        read_vector(&m.path("f_path")?)?,
        read_vector(&m.path("g_path")?)?,
    )?;
    let system = match m.number("structure_tol")? {
        Some(tol) => system.with_structure_tol(tol)?,
        None => system,
    };
    let class: StructureClass = m.get("class").unwrap_or("S0").parse()?;

    let mut weights = match m.get("weights").unwrap_or("absolute") {
        "absolute" => Weights::absolute(),
        "relative" => Weights::relative(&system)?,
        other => {
            return Err(CliError::Input(format!(
                "weights must be 'absolute' or 'relative', got '{other}'"
            )))
        }
    };
    for part in 0..5 {
        if let Some(w) = m.number(&format!("w{}", part + 1))? {
            weights = weights.with(part, w)?;
        }
    }

    let mut tags = [None; 3];
    for (idx, key) in ["a_tag", "b_tag", "c_tag"].into_iter().enumerate() {
        let Some(value) = m.get(key) else { continue };
        tags[idx] = tag(value)?;
        if let (Some(t), Some(k)) = (tags[idx], class.block_kinds()[idx]) {
            if t != k && weights.get(idx) != 0.0 {
                return Err(CliError::Input(format!(
                    "{key} = {t} conflicts with class {class} ({k})"
                )));
            }
        }
    }
    let system = system.with_tags(tags)?;
    Ok(SystemInput {
        system,
        class,
        sparse: m.sparse(false)?,
        weights,
    })
}

#[derive(Debug, Clone)]
pub struct WrlsInput {
    pub problem: WrlsProblem,
    pub sparse: bool,
    pub w2: f64,
    pub w4: f64,
}

pub fn load_wrls(path: &Path) -> Result<WrlsInput, CliError> {
    let m = Manifest::load(path)?;
    m.check_keys(WRLS_KEYS)?;
    let kind: StructureKind = m.require("kind")?.parse()?;
    let lambda = m
        .number("lambda")?
        .ok_or_else(|| CliError::Input("manifest is missing 'lambda'".into()))?;
    let problem = WrlsProblem::new(
        read_matrix(&m.path("w_path")?)?,
        read_matrix(&m.path("k_path")?)?,
        kind,
        lambda,
        read_vector(&m.path("f_path")?)?,
    )?;
    Ok(WrlsInput {
        problem,
        sparse: m.sparse(true)?,
        w2: m.number("w2")?.unwrap_or(1.0),
        w4: m.number("w4")?.unwrap_or(1.0),
    })
}
