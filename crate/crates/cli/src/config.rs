//! Experiment configuration: defaults, flat key=value config files, and
//! command-line overrides, with precedence CLI > file > defaults. The
//! merged configuration is recorded verbatim into every output file.

use std::collections::BTreeMap;
use std::path::PathBuf;

use anyhow::{bail, Context};
use serde::Serialize;
use ymloop_core::GroupSpec;

#[derive(Clone, Debug, Serialize)]
pub struct ExperimentConfig {
    /// "u1" or "su2".
    pub group: String,
    /// Lattice / path steps N.
    pub steps: usize,
    /// Monte-Carlo samples M.
    pub samples: usize,
    /// Planck-parameter set for the coherent-state checks.
    pub hbar_set: Vec<f64>,
    pub seed: u64,
    /// Logical shard count for reproducible parallel estimates.
    pub workers: usize,
    /// Heat-kernel evaluator: time floor for the coherent-state side.
    pub t_min: f64,
    /// Heat-kernel evaluator: certified eigenvalue-displacement bound.
    pub im_z_max: f64,
    /// Heat-kernel evaluator: tail bound of the truncated character sums.
    pub eps_tail: f64,
    /// Named tolerance overrides.
    pub tolerances: BTreeMap<String, f64>,
    /// Output directory for JSON/CSV records.
    pub out_dir: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            group: "su2".into(),
            steps: 200,
            samples: 100_000,
            hbar_set: vec![1.0, 0.5, 0.25, 0.1],
            seed: 20_240_817,
            workers: 4,
            t_min: 0.05,
            im_z_max: 2.0,
            eps_tail: 1e-12,
            tolerances: BTreeMap::new(),
            out_dir: PathBuf::from("out"),
        }
    }
}

impl ExperimentConfig {
    pub fn group_spec(&self) -> anyhow::Result<GroupSpec> {
        match self.group.as_str() {
            "u1" => Ok(GroupSpec::U1),
            "su2" => Ok(GroupSpec::Su2),
            other => bail!("unknown group {other:?} (expected u1 or su2)"),
        }
    }

    /// Tolerance lookup with a per-key default.
    pub fn tol(&self, key: &str, default: f64) -> f64 {
        self.tolerances.get(key).copied().unwrap_or(default)
    }

    /// Apply one key=value assignment (config-file line or CLI override).
    pub fn apply(&mut self, key: &str, value: &str, where_: &str) -> anyhow::Result<()> {
        let v = value.trim();
        match key.trim() {
            "group" => self.group = v.to_string(),
            "steps" => self.steps = v.parse().with_context(|| format!("{where_}: steps"))?,
            "samples" => self.samples = v.parse().with_context(|| format!("{where_}: samples"))?,
            "seed" => self.seed = v.parse().with_context(|| format!("{where_}: seed"))?,
            "workers" => self.workers = v.parse().with_context(|| format!("{where_}: workers"))?,
            "t_min" => self.t_min = v.parse().with_context(|| format!("{where_}: t_min"))?,
            "im_z_max" => self.im_z_max = v.parse().with_context(|| format!("{where_}: im_z_max"))?,
            "eps_tail" => self.eps_tail = v.parse().with_context(|| format!("{where_}: eps_tail"))?,
            "out" => self.out_dir = PathBuf::from(v),
            "hbar_set" => {
                self.hbar_set = v
                    .split(',')
                    .map(|s| s.trim().parse::<f64>())
                    .collect::<Result<_, _>>()
                    .with_context(|| format!("{where_}: hbar_set"))?;
            }
            k if k.starts_with("tolerance.") => {
                let name = k.trim_start_matches("tolerance.").to_string();
                let val: f64 = v.parse().with_context(|| format!("{where_}: {k}"))?;
                self.tolerances.insert(name, val);
            }
            other => bail!("{where_}: unknown configuration key {other:?}"),
        }
        Ok(())
    }

    /// Parse a flat key=value config file (# starts a comment).
    pub fn load_file(&mut self, path: &std::path::Path) -> anyhow::Result<()> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                bail!(
                    "{}:{}: expected key=value, got {raw:?}",
                    path.display(),
                    i + 1
                );
            };
            self.apply(key, value, &format!("{}:{}", path.display(), i + 1))?;
        }
        Ok(())
    }
}
