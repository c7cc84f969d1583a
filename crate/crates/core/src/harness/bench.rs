use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::RobotSpec;
use crate::navsys::{DdpNavigator, NavsysConfig};
use crate::planners::{DwaPlanner, LogMppiPlanner, MppiPlanner, Planner, PlannerConfig, PlannerKind};
use crate::world::OccupancyGrid;
use crate::{Error, Result};

use super::episode::{run_episode, EpisodeResult, HarnessConfig, Outcome};

/// Bit-exact header of the per-episode results CSV.
pub const RESULTS_HEADER: &str = "env_id,planner,ddp,speed,repeat,outcome,AT,OT,score,path_length";

/// Header of the aggregate table CSV.
pub const SUMMARY_HEADER: &str =
    "planner,ddp,speed,episodes,success_pct,collision_pct,timeout_pct,avg_time_success,avg_time_all,avg_score";

/// The seven planner variants of the benchmark.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PlannerVariant {
    Dwa,
    DwaDdp,
    Mppi,
    MppiDdp,
    LogMppi,
    LogMppiDdp,
    Navsys,
}

impl PlannerVariant {
    pub const ALL: [PlannerVariant; 7] = [
        PlannerVariant::Dwa,
        PlannerVariant::DwaDdp,
        PlannerVariant::Mppi,
        PlannerVariant::MppiDdp,
        PlannerVariant::LogMppi,
        PlannerVariant::LogMppiDdp,
        PlannerVariant::Navsys,
    ];

    pub fn id(&self) -> &'static str {
        match self {
            PlannerVariant::Dwa => "dwa",
            PlannerVariant::DwaDdp => "dwa-ddp",
            PlannerVariant::Mppi => "mppi",
            PlannerVariant::MppiDdp => "mppi-ddp",
            PlannerVariant::LogMppi => "log-mppi",
            PlannerVariant::LogMppiDdp => "log-mppi-ddp",
            PlannerVariant::Navsys => "navsys",
        }
    }

    pub fn ddp(&self) -> bool {
        !matches!(self, PlannerVariant::Dwa | PlannerVariant::Mppi | PlannerVariant::LogMppi)
    }

    /// Baseline and augmented variants share a family, and with it their
    /// episode seeds.
    fn family(&self) -> u64 {
        match self {
            PlannerVariant::Dwa | PlannerVariant::DwaDdp => 0,
            PlannerVariant::Mppi | PlannerVariant::MppiDdp => 1,
            PlannerVariant::LogMppi | PlannerVariant::LogMppiDdp => 2,
            PlannerVariant::Navsys => 3,
        }
    }

    /// Parses a comma-separated list; `all` expands to every variant.
    pub fn parse_list(s: &str) -> Result<Vec<PlannerVariant>> {
        let mut out = Vec::new();
        for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            if item == "all" {
                out.extend(PlannerVariant::ALL);
            } else {
                out.push(item.parse()?);
            }
        }
        if out.is_empty() {
            return Err(Error::invalid("empty planner list"));
        }
        Ok(out)
    }

    /// Instantiates the variant for one episode.
    pub fn build(&self, suite: &PlannerSuite, spec: &RobotSpec, seed: u64) -> Result<Box<dyn Planner>> {
        let pick = |cfg: &PlannerConfig, augment: bool| {
            let c = if augment { cfg.clone().augmented() } else { cfg.clone() };
            PlannerConfig { seed, ..c }
        };
        Ok(match self {
            PlannerVariant::Dwa => Box::new(DwaPlanner::new(pick(&suite.dwa, false), spec.clone())?),
            PlannerVariant::DwaDdp => Box::new(DwaPlanner::new(pick(&suite.dwa, true), spec.clone())?),
            PlannerVariant::Mppi => Box::new(MppiPlanner::new(pick(&suite.mppi, false), spec.clone())?),
            PlannerVariant::MppiDdp => Box::new(MppiPlanner::new(pick(&suite.mppi, true), spec.clone())?),
            PlannerVariant::LogMppi => Box::new(LogMppiPlanner::new(pick(&suite.log_mppi, false), spec.clone())?),
            PlannerVariant::LogMppiDdp => {
                Box::new(LogMppiPlanner::new(pick(&suite.log_mppi, true), spec.clone())?)
            }
            PlannerVariant::Navsys => Box::new(DdpNavigator::new(
                NavsysConfig {
                    seed,
                    ..suite.navsys.clone()
                },
                spec.clone(),
            )?),
        })
    }
}

impl FromStr for PlannerVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PlannerVariant::ALL
            .into_iter()
            .find(|v| v.id() == s)
            .ok_or_else(|| Error::invalid(format!("unknown planner '{s}'")))
    }
}

impl fmt::Display for PlannerVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// Base configurations the variants are derived from.
#[derive(Debug, Clone, PartialEq)]
pub struct PlannerSuite {
    pub dwa: PlannerConfig,
    pub mppi: PlannerConfig,
    pub log_mppi: PlannerConfig,
    pub navsys: NavsysConfig,
}

impl Default for PlannerSuite {
    fn default() -> Self {
        PlannerSuite {
            dwa: PlannerConfig::for_kind(PlannerKind::Dwa),
            mppi: PlannerConfig::for_kind(PlannerKind::Mppi),
            log_mppi: PlannerConfig::for_kind(PlannerKind::LogMppi),
            navsys: NavsysConfig::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct EnvEntry {
    pub id: String,
    pub grid: OccupancyGrid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchmarkPlan {
    pub speeds: Vec<f64>,
    pub repeats: usize,
    /// Global seed; set from the top-level config seed.
    #[serde(skip)]
    pub seed: u64,
    /// Worker threads; 0 picks one per core.
    pub threads: usize,
}

impl Default for BenchmarkPlan {
    fn default() -> Self {
        BenchmarkPlan {
            speeds: vec![1.0, 1.5, 2.0],
            repeats: 3,
            seed: 0,
            threads: 0,
        }
    }
}

/// Seed of one episode. Independent of the variant within a family, so a
/// baseline and its augmented twin see the same noise stream.
pub fn episode_seed(global: u64, env: usize, variant: PlannerVariant, speed: usize, repeat: usize) -> u64 {
    let mut h = global ^ 0x243F_6A88_85A3_08D3;
    for x in [env as u64, variant.family(), speed as u64, repeat as u64] {
        h = splitmix(h ^ x);
    }
    h
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, Copy)]
struct Job {
    env: usize,
    variant: PlannerVariant,
    speed: usize,
    repeat: usize,
}

/// Runs the full cross product of environments, variants, speeds and
/// repeats. `sink` receives every result in job order as episodes finish.
pub fn run_benchmark(
    envs: &[EnvEntry],
    variants: &[PlannerVariant],
    suite: &PlannerSuite,
    spec: &RobotSpec,
    harness: &HarnessConfig,
    plan: &BenchmarkPlan,
    mut sink: impl FnMut(&EpisodeResult) -> Result<()>,
) -> Result<BenchmarkTable> {
    if plan.repeats == 0 || plan.speeds.is_empty() {
        return Err(Error::invalid("benchmark needs at least one speed and one repeat"));
    }
    let mut jobs = Vec::new();
    for env in 0..envs.len() {
        for &variant in variants {
            for speed in 0..plan.speeds.len() {
                for repeat in 0..plan.repeats {
                    jobs.push(Job { env, variant, speed, repeat });
                }
            }
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(plan.threads)
        .build()
        .map_err(|e| Error::Config(e.to_string()))?;
    let chunk = 4 * pool.current_num_threads().max(1);

    let run = |job: &Job| -> Result<EpisodeResult> {
        let v_max = plan.speeds[job.speed];
        let robot = spec.with_speed(v_max);
        let seed = episode_seed(plan.seed, job.env, job.variant, job.speed, job.repeat);
        let mut planner = job.variant.build(suite, &robot, seed)?;
        let mut r = run_episode(&envs[job.env].grid, planner.as_mut(), &robot, harness)?;
        r.env_id = envs[job.env].id.clone();
        r.planner = job.variant.id().to_string();
        r.ddp = job.variant.ddp();
        r.speed = v_max;
        r.repeat = job.repeat;
        r.seed = seed;
        Ok(r)
    };

    let mut results = Vec::with_capacity(jobs.len());
    for batch in jobs.chunks(chunk) {
        let done: Vec<Result<EpisodeResult>> = pool.install(|| batch.par_iter().map(run).collect());
        for r in done {
            let r = r?;
            sink(&r)?;
            results.push(r);
        }
    }
    Ok(BenchmarkTable::from_results(&results, plan.repeats))
}

/// Aggregate metrics for one (planner, speed) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub planner: String,
    pub ddp: bool,
    pub speed: f64,
    pub episodes: usize,
    pub success_pct: f64,
    pub collision_pct: f64,
    pub timeout_pct: f64,
    /// Mean traversal time over successful episodes.
    pub avg_time_success: Option<f64>,
    /// Mean elapsed time over every episode.
    pub avg_time_all: f64,
    pub avg_score: f64,
}

impl TableRow {
    pub fn csv_row(&self) -> String {
        let avg_s = self.avg_time_success.map(|t| format!("{t:.3}")).unwrap_or_default();
        format!(
            "{},{},{},{},{:.2},{:.2},{:.2},{},{:.3},{:.4}",
            self.planner,
            self.ddp,
            self.speed,
            self.episodes,
            self.success_pct,
            self.collision_pct,
            self.timeout_pct,
            avg_s,
            self.avg_time_all,
            self.avg_score
        )
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BenchmarkTable {
    pub repeats: usize,
    pub rows: Vec<TableRow>,
}

fn planner_rank(id: &str) -> usize {
    PlannerVariant::ALL
        .iter()
        .position(|v| v.id() == id)
        .unwrap_or(PlannerVariant::ALL.len())
}

impl BenchmarkTable {
    /// Groups by (planner, speed). Row order follows the variant list then
    /// speed, whatever order the results arrive in.
    pub fn from_results(results: &[EpisodeResult], repeats: usize) -> Self {
        let mut groups: BTreeMap<(usize, String, u64), Vec<&EpisodeResult>> = BTreeMap::new();
        for r in results {
            let key = (planner_rank(&r.planner), r.planner.clone(), r.speed.to_bits());
            groups.entry(key).or_default().push(r);
        }
        let mut rows: Vec<TableRow> = groups.into_values().map(aggregate).collect();
        rows.sort_by(|a, b| {
            planner_rank(&a.planner)
                .cmp(&planner_rank(&b.planner))
                .then_with(|| a.planner.cmp(&b.planner))
                .then_with(|| a.speed.total_cmp(&b.speed))
        });
        BenchmarkTable { repeats, rows }
    }

    pub fn row(&self, planner: &str, speed: f64) -> Option<&TableRow> {
        self.rows.iter().find(|r| r.planner == planner && r.speed == speed)
    }

    pub fn to_csv(&self) -> String {
        let mut s = format!("{SUMMARY_HEADER}\n");
        for r in &self.rows {
            s.push_str(&r.csv_row());
            s.push('\n');
        }
        s
    }
}

fn aggregate(group: Vec<&EpisodeResult>) -> TableRow {
    let n = group.len();
    let pct = |o: Outcome| 100.0 * group.iter().filter(|r| r.outcome == o).count() as f64 / n as f64;
    let times: Vec<f64> = group.iter().filter_map(|r| r.at).collect();
    TableRow {
        planner: group[0].planner.clone(),
        ddp: group[0].ddp,
        speed: group[0].speed,
        episodes: n,
        success_pct: pct(Outcome::Success),
        collision_pct: pct(Outcome::Collision),
        timeout_pct: pct(Outcome::Timeout),
        avg_time_success: (!times.is_empty()).then(|| times.iter().sum::<f64>() / times.len() as f64),
        avg_time_all: group.iter().map(|r| r.elapsed).sum::<f64>() / n as f64,
        avg_score: group.iter().map(|r| r.score).sum::<f64>() / n as f64,
    }
}

impl fmt::Display for BenchmarkTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:<14} {:>5} {:>9} {:>9} {:>9} {:>9} {:>9}",
            "planner", "v_max", "success%", "collide%", "timeout%", "avg_t(s)", "score"
        )?;
        for r in &self.rows {
            let t = r.avg_time_success.map(|t| format!("{t:.2}")).unwrap_or_else(|| "-".into());
            writeln!(
                f,
                "{:<14} {:>5.2} {:>9.2} {:>9.2} {:>9.2} {:>9} {:>9.4}",
                r.planner, r.speed, r.success_pct, r.collision_pct, r.timeout_pct, t, r.avg_score
            )?;
        }
        Ok(())
    }
}

/// The `k` environments with the lowest mean score across every result,
/// ties broken by env id.
pub fn hardest_subset(results: &[EpisodeResult], k: usize) -> Vec<String> {
    let mut sums: BTreeMap<&str, (f64, usize)> = BTreeMap::new();
    for r in results {
        let e = sums.entry(r.env_id.as_str()).or_default();
        e.0 += r.score;
        e.1 += 1;
    }
    let mut ranked: Vec<(f64, &str)> = sums.into_iter().map(|(id, (s, n))| (s / n as f64, id)).collect();
    ranked.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(b.1)));
    ranked.into_iter().take(k).map(|(_, id)| id.to_string()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn result(env: &str, outcome: Outcome, score: f64) -> EpisodeResult {
        EpisodeResult {
            env_id: env.into(),
            planner: "mppi".into(),
            ddp: false,
            speed: 1.5,
            repeat: 0,
            seed: 0,
            outcome,
            at: (outcome == Outcome::Success).then_some(10.0),
            elapsed: 10.0,
            ot: 5.0,
            over_constrained: false,
            score,
            path_length: 0.0,
            modes: BTreeMap::new(),
            planning_calls: 0,
            point_evaluations: 0,
        }
    }

    #[test]
    fn hand_aggregation() {
        let log = [
            result("a", Outcome::Success, 0.5),
            result("a", Outcome::Success, 0.3),
            result("a", Outcome::Collision, 0.0),
            result("a", Outcome::Timeout, 0.0),
        ];
        let t = BenchmarkTable::from_results(&log, 1);
        let r = &t.rows[0];
        assert_eq!(r.success_pct, 50.0);
        assert_eq!(r.collision_pct + r.timeout_pct, 50.0);
        assert!((r.avg_score - 0.2).abs() < 1e-12);
        assert_eq!(r.avg_time_success, Some(10.0));
    }

    #[test]
    fn subset_ties_are_lexicographic() {
        let log = [
            result("b", Outcome::Collision, 0.0),
            result("a", Outcome::Collision, 0.0),
            result("c", Outcome::Success, 0.4),
        ];
        assert!(hardest_subset(&log, 0).is_empty());
        assert_eq!(hardest_subset(&log, 2), vec!["a", "b"]);
        assert_eq!(hardest_subset(&log, 3), vec!["a", "b", "c"]);
    }

    #[test]
    fn variant_lists() {
        assert_eq!(PlannerVariant::parse_list("all").unwrap().len(), 7);
        assert_eq!(
            PlannerVariant::parse_list("dwa, navsys").unwrap(),
            vec![PlannerVariant::Dwa, PlannerVariant::Navsys]
        );
        assert!(PlannerVariant::parse_list("teb").is_err());
        assert_eq!(PlannerVariant::ALL.iter().filter(|v| v.ddp()).count(), 4);
    }

    #[test]
    fn paired_seeds() {
        let a = episode_seed(7, 3, PlannerVariant::Mppi, 1, 2);
        assert_eq!(a, episode_seed(7, 3, PlannerVariant::MppiDdp, 1, 2));
        assert_ne!(a, episode_seed(7, 3, PlannerVariant::Mppi, 1, 1));
    }
}
