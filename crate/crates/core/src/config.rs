//! Run configuration in TOML.
//!
//! Every section and key is optional; missing keys take the library
//! defaults and unknown keys are rejected. `configs/default.toml` in the
//! repository lists every default explicitly.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dynamics::RobotSpec;
use crate::harness::{BenchmarkPlan, HarnessConfig, PlannerSuite};
use crate::navsys::NavsysConfig;
use crate::planners::{PlannerConfig, PlannerKind};
use crate::world::EnvParams;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Global seed; every episode seed is derived from it.
    pub seed: u64,
    pub robot: RobotSpec,
    pub env: EnvParams,
    pub harness: HarnessConfig,
    pub bench: BenchmarkPlan,
    pub dwa: PlannerConfig,
    pub mppi: PlannerConfig,
    pub log_mppi: PlannerConfig,
    pub navsys: NavsysConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        let suite = PlannerSuite::default();
        RunConfig {
            seed: 0,
            robot: RobotSpec::default(),
            env: EnvParams::default(),
            harness: HarnessConfig::default(),
            bench: BenchmarkPlan::default(),
            dwa: suite.dwa,
            mppi: suite.mppi,
            log_mppi: suite.log_mppi,
            navsys: suite.navsys,
        }
    }
}

impl RunConfig {
    /// Parses and validates. Syntax and schema errors carry the 1-based
    /// line of the offending key.
    ///
    /// Keys missing from a section fall back to that section's entry in
    /// [`RunConfig::default`], so a partial `[dwa]` table still describes
    /// a DWA planner.
    pub fn from_toml(text: &str) -> Result<Self> {
        // typed pass: reports unknown keys and type errors with a location
        toml::from_str::<RunConfig>(text).map_err(|e| {
            let line = e
                .span()
                .map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1)
                .unwrap_or(1);
            Error::parse(line, e.message().trim_end())
        })?;
        let overrides: toml::Table = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let mut merged = toml::Table::try_from(RunConfig::default()).expect("config serializes");
        merge(&mut merged, overrides);
        let cfg: RunConfig = toml::Value::Table(merged)
            .try_into()
            .map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        RunConfig::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        self.robot.validate()?;
        self.harness.validate()?;
        for (name, cfg, kind) in [
            ("dwa", &self.dwa, PlannerKind::Dwa),
            ("mppi", &self.mppi, PlannerKind::Mppi),
            ("log_mppi", &self.log_mppi, PlannerKind::LogMppi),
        ] {
            if cfg.kind != kind {
                return Err(Error::Config(format!("[{name}] must have kind = \"{}\"", kind.as_str())));
            }
            cfg.validate()?;
        }
        self.navsys.validate(&self.robot)?;
        if self.bench.repeats == 0 || self.bench.speeds.is_empty() {
            return Err(Error::Config("[bench] needs repeats >= 1 and at least one speed".into()));
        }
        for &v in &self.bench.speeds {
            self.navsys.validate(&self.robot.with_speed(v))?;
        }
        Ok(())
    }

    pub fn suite(&self) -> PlannerSuite {
        PlannerSuite {
            dwa: self.dwa.clone(),
            mppi: self.mppi.clone(),
            log_mppi: self.log_mppi.clone(),
            navsys: self.navsys.clone(),
        }
    }

    pub fn plan(&self) -> BenchmarkPlan {
        BenchmarkPlan {
            seed: self.seed,
            ..self.bench.clone()
        }
    }
}

fn merge(base: &mut toml::Table, over: toml::Table) {
    for (k, v) in over {
        match (base.get_mut(&k), v) {
            (Some(toml::Value::Table(b)), toml::Value::Table(o)) => merge(b, o),
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
}
