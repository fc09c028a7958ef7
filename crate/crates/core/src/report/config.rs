use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use super::Format;
use crate::error::{Error, Result};

/// Overridable tolerances and their defaults.
pub const TOLERANCES: &[(&str, f64)] = &[
    ("algebra.laws", 1e-12),
    ("algebra.eigensplit", 1e-12),
    ("algebra.idempotent", 1e-12),
    ("algebra.adapted", 1e-14),
    ("algebra.cauchy_riemann", 1e-6),
    ("algebra.cauchy_riemann_linear", 1e-10),
    ("algebra.cauchy_riemann_violation", 0.5),
    ("jordan.identity", 1e-10),
    ("jordan.peirce", 1e-10),
    ("jordan.reflection", 1e-10),
    ("jordan.rules", 1e-10),
    ("statman.fisher", 1e-10),
    ("statman.dual_basis", 1e-10),
    ("statman.centering", 1e-12),
    ("statman.legendre", 1e-8),
    ("statman.hessian_product", 1e-8),
    ("geometry.conjugacy", 1e-5),
    ("geometry.curvature", 1e-5),
    ("geometry.leaf", 1e-6),
    ("geometry.oblique", 1e-13),
    ("geometry.mirror", 1e-8),
    ("geometry.isometry", 1e-6),
    ("geometry.levi_civita", 1e-5),
    ("geometry.assembly", 1e-12),
    ("frobenius.wdvv", 1e-9),
    ("frobenius.unit", 1e-10),
    ("frobenius.pairing", 1e-10),
    ("frobenius.symmetry", 1e-12),
    ("frobenius.contraction", 1e-10),
    ("frobenius.pencil", 1e-5),
    ("frobenius.violation", 1e-4),
];

/// Overridable finite-difference steps and their defaults.
pub const FD_STEPS: &[(&str, f64)] = &[
    ("cauchy_riemann", 1e-4),
    ("conjugacy", 1e-4),
    ("curvature", 1e-4),
    ("hessian_product", 1e-4),
    ("isometry", 1e-4),
    ("pencil", 1e-4),
    ("geodesic_dt", 1e-3),
];

/// Seed, overrides and output settings for a suite run.
///
/// The text form is one `key = value` per line, `#` comments:
///
/// ```text
/// seed = 42
/// format = csv
/// output = report.csv
/// tol.frobenius.wdvv = 1e-10
/// fd.curvature = 5e-5
/// ```
#[derive(Clone, Debug, PartialEq)]
pub struct SuiteConfig {
    pub seed: u64,
    pub tolerances: BTreeMap<String, f64>,
    pub fd_steps: BTreeMap<String, f64>,
    pub output: Option<PathBuf>,
    pub format: Format,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            tolerances: BTreeMap::new(),
            fd_steps: BTreeMap::new(),
            output: None,
            format: Format::Json,
        }
    }
}

fn lookup(table: &[(&str, f64)], key: &str) -> Option<f64> {
    table.iter().find(|(k, _)| *k == key).map(|(_, v)| *v)
}

fn positive(kind: &str, key: &str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::InvalidInput(format!(
            "{kind} `{key}` must be positive and finite, got {value}"
        )))
    }
}

impl SuiteConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    /// Tolerance `key`, overridden or default.
    ///
    /// # Panics
    ///
    /// When `key` is not listed in [`TOLERANCES`].
    pub fn tol(&self, key: &str) -> f64 {
        self.tolerances
            .get(key)
            .copied()
            .or_else(|| lookup(TOLERANCES, key))
            .unwrap_or_else(|| panic!("unregistered tolerance {key}"))
    }

    /// Difference step `key`, overridden or default.
    ///
    /// # Panics
    ///
    /// When `key` is not listed in [`FD_STEPS`].
    pub fn fd(&self, key: &str) -> f64 {
        self.fd_steps
            .get(key)
            .copied()
            .or_else(|| lookup(FD_STEPS, key))
            .unwrap_or_else(|| panic!("unregistered step {key}"))
    }

    pub fn set_tol(&mut self, key: &str, value: f64) -> Result<()> {
        if lookup(TOLERANCES, key).is_none() {
            return Err(Error::InvalidInput(format!("unknown tolerance `{key}`")));
        }
        self.tolerances
            .insert(key.to_string(), positive("tolerance", key, value)?);
        Ok(())
    }

    pub fn set_fd(&mut self, key: &str, value: f64) -> Result<()> {
        if lookup(FD_STEPS, key).is_none() {
            return Err(Error::InvalidInput(format!("unknown step `{key}`")));
        }
        self.fd_steps
            .insert(key.to_string(), positive("step", key, value)?);
        Ok(())
    }

    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let num = || -> Result<f64> {
            value
                .parse()
                .map_err(|_| Error::InvalidInput(format!("`{key}`: bad number {value:?}")))
        };
        match key {
            "seed" => {
                self.seed = value
                    .parse()
                    .map_err(|_| Error::InvalidInput(format!("bad seed {value:?}")))?
            }
            "output" => self.output = Some(PathBuf::from(value)),
            "format" => self.format = value.parse()?,
            _ => {
                if let Some(k) = key.strip_prefix("tol.") {
                    self.set_tol(k, num()?)?;
                } else if let Some(k) = key.strip_prefix("fd.") {
                    self.set_fd(k, num()?)?;
                } else {
                    return Err(Error::InvalidInput(format!("unknown key `{key}`")));
                }
            }
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: n + 1,
                message: "expected `key = value`".into(),
            })?;
            cfg.set(k.trim(), v.trim()).map_err(|e| Error::Parse {
                line: n + 1,
                message: e.to_string(),
            })?;
        }
        Ok(cfg)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("seed = {}\nformat = {}\n", self.seed, self.format);
        if let Some(p) = &self.output {
            s += &format!("output = {}\n", p.display());
        }
        for (k, v) in &self.tolerances {
            s += &format!("tol.{k} = {v:e}\n");
        }
        for (k, v) in &self.fd_steps {
            s += &format!("fd.{k} = {v:e}\n");
        }
        s
    }
}
