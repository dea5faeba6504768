//! RU placement search: per-UE best-SINR association, average-SINR scoring,
//! attenuation sweeps and heatmap export.

use std::fmt::Write as _;
use std::io::Write;

use itertools::Itertools;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linkbudget::{
    build_rssi_matrix, db_to_linear, linear_to_db, sinr_linear, NoiseModel, RssiMatrix, RuConfig, UeConfig,
    DEFAULT_SINR_FLOOR_DB, MAX_ATTENUATION_DB,
};
use crate::raytrace::ChannelMatrix;

pub const EXHAUSTIVE_LIMIT: u128 = 1_000_000;
pub const DEFAULT_SWEEP_DB: [f64; 6] = [0.0, 10.0, 20.0, 30.0, 40.0, 50.0];

/// Set of deployed RU grid indices, kept sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Deployment {
    ru_indices: Vec<usize>,
}

impl Deployment {
    pub fn new(mut ru_indices: Vec<usize>) -> Result<Self> {
        if ru_indices.is_empty() {
            return Err(Error::InvalidDeployment("a deployment needs at least one RU".into()));
        }
        ru_indices.sort_unstable();
        if ru_indices.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidDeployment(format!("duplicate RU index in {ru_indices:?}")));
        }
        Ok(Self { ru_indices })
    }

    pub fn ru_indices(&self) -> &[usize] {
        &self.ru_indices
    }

    pub fn len(&self) -> usize {
        self.ru_indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ru_indices.is_empty()
    }

    pub fn check_bounds(&self, n_locations: usize) -> Result<()> {
        match self.ru_indices.last() {
            Some(&max) if max < n_locations => Ok(()),
            _ => Err(Error::InvalidDeployment(format!(
                "{:?} out of range for {n_locations} locations",
                self.ru_indices
            ))),
        }
    }
}

impl std::fmt::Display for Deployment {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{}]", self.ru_indices.iter().join(", "))
    }
}

/// All unordered pairs of `n_locations` sites in lexicographic order.
pub fn enumerate_pairs(n_locations: usize) -> Vec<Deployment> {
    enumerate_deployments(n_locations, 2)
}

pub fn enumerate_deployments(n_locations: usize, m: usize) -> Vec<Deployment> {
    (0..n_locations)
        .combinations(m)
        .map(|ru_indices| Deployment { ru_indices })
        .collect()
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Averaging {
    /// Arithmetic mean of per-UE SINR in dB.
    #[default]
    Db,
    /// Mean of linear SINR, reported in dB.
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScoreOptions {
    /// Stand-in SINR for UEs with no usable link.
    pub sinr_floor_db: f64,
    pub averaging: Averaging,
}

impl Default for ScoreOptions {
    fn default() -> Self {
        Self {
            sinr_floor_db: DEFAULT_SINR_FLOOR_DB,
            averaging: Averaging::Db,
        }
    }
}

impl ScoreOptions {
    fn floored(&self, sinr_db: f64) -> f64 {
        if sinr_db.is_finite() {
            sinr_db
        } else {
            self.sinr_floor_db
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AssociationResult {
    /// Serving RU per UE.
    pub serving: Vec<usize>,
    /// Best SINR per UE in dB; `-inf` when every link is blocked.
    pub best_sinr_db: Vec<f64>,
}

/// Serves each UE from the deployed RU giving the highest SINR; ties go to
/// the lowest RU index.
pub fn associate(deployment: &Deployment, rssi: &RssiMatrix, noise: &NoiseModel, ue: &UeConfig) -> AssociationResult {
    let noise_mw = noise.effective_noise_mw(ue);
    let deployed = deployment.ru_indices();
    let (serving, best_sinr_db) = (0..rssi.n_ue())
        .map(|j| {
            let mut best = (deployed[0], f64::NEG_INFINITY);
            for &i in deployed {
                let g = sinr_linear(j, i, deployed, rssi, noise_mw);
                if g > best.1 {
                    best = (i, g);
                }
            }
            (best.0, linear_to_db(best.1))
        })
        .unzip();
    AssociationResult {
        serving,
        best_sinr_db,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoreRow {
    pub deployment: Deployment,
    /// Average SINR over all UEs, dB.
    pub score_db: f64,
    pub min_db: f64,
    pub max_db: f64,
}

pub fn score(
    deployment: &Deployment,
    rssi: &RssiMatrix,
    noise: &NoiseModel,
    ue: &UeConfig,
    opts: &ScoreOptions,
) -> ScoreRow {
    let assoc = associate(deployment, rssi, noise, ue);
    let values: Vec<f64> = assoc.best_sinr_db.iter().map(|&g| opts.floored(g)).collect();
    let n = values.len() as f64;
    let score_db = match opts.averaging {
        Averaging::Db => values.iter().sum::<f64>() / n,
        Averaging::Linear => linear_to_db(values.iter().map(|&g| db_to_linear(g)).sum::<f64>() / n),
    };
    ScoreRow {
        deployment: deployment.clone(),
        score_db,
        min_db: values.iter().copied().fold(f64::INFINITY, f64::min),
        max_db: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoreTable {
    pub attenuation_db: Option<f64>,
    pub rows: Vec<ScoreRow>,
}

impl ScoreTable {
    /// Highest-scoring row; ties go to the earliest row.
    pub fn best(&self) -> Option<&ScoreRow> {
        self.rows
            .iter()
            .reduce(|best, r| if r.score_db > best.score_db { r } else { best })
    }

    /// Lowest and highest deployment score across the table.
    pub fn score_range(&self) -> Option<(f64, f64)> {
        let lo = self.rows.iter().map(|r| r.score_db).reduce(f64::min)?;
        let hi = self.rows.iter().map(|r| r.score_db).reduce(f64::max)?;
        Some((lo, hi))
    }

    /// `ru_a,ru_b,attenuation_db,score_db,min_db,max_db`; deployments with more
    /// than two RUs list their indices separated by `;` in `ru_a`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "ru_a,ru_b,attenuation_db,score_db,min_db,max_db")?;
        let att = self.attenuation_db.map(|a| a.to_string()).unwrap_or_default();
        for r in &self.rows {
            let idx = r.deployment.ru_indices();
            let (a, b) = match idx {
                [a] => (a.to_string(), String::new()),
                [a, b] => (a.to_string(), b.to_string()),
                more => (more.iter().join(";"), String::new()),
            };
            writeln!(w, "{a},{b},{att},{},{},{}", r.score_db, r.min_db, r.max_db)?;
        }
        Ok(())
    }
}

/// Scores deployments in parallel; row order follows `deployments`.
pub fn score_all(
    deployments: &[Deployment],
    rssi: &RssiMatrix,
    noise: &NoiseModel,
    ue: &UeConfig,
    opts: &ScoreOptions,
) -> Result<ScoreTable> {
    for d in deployments {
        d.check_bounds(rssi.n_ru())?;
    }
    let rows = deployments
        .par_iter()
        .map(|d| score(d, rssi, noise, ue, opts))
        .collect();
    Ok(ScoreTable {
        attenuation_db: None,
        rows,
    })
}

/// Inputs shared by the sweep and the search.
#[derive(Debug, Clone)]
pub struct PlacementProblem<'a> {
    pub channel: &'a ChannelMatrix,
    /// RU configuration shared by every candidate location.
    pub ru: RuConfig,
    pub ue: UeConfig,
    pub noise: NoiseModel,
    pub options: ScoreOptions,
}

impl PlacementProblem<'_> {
    pub fn rssi_at(&self, attenuation_db: f64) -> Result<RssiMatrix> {
        let ru = self.ru.with_attenuation(attenuation_db);
        ru.validate()?;
        build_rssi_matrix(self.channel, &vec![ru; self.channel.n_tx()], &self.ue)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub attenuation_db: f64,
    pub table: ScoreTable,
    pub best: ScoreRow,
}

/// Scores every RU pair at each uniform attenuation value.
pub fn sweep_attenuation(problem: &PlacementProblem<'_>, values: &[f64]) -> Result<Vec<SweepPoint>> {
    let n = problem.channel.n_tx();
    if n < 2 {
        return Err(Error::Config("need >= 2 locations for pair search".into()));
    }
    if let Some(v) = values.iter().find(|v| !(0.0..=MAX_ATTENUATION_DB).contains(*v)) {
        return Err(Error::Config(format!("attenuation {v} dB outside [0, {MAX_ATTENUATION_DB}]")));
    }
    let pairs = enumerate_pairs(n);
    values
        .iter()
        .map(|&a| {
            let rssi = problem.rssi_at(a)?;
            let mut table = score_all(&pairs, &rssi, &problem.noise, &problem.ue, &problem.options)?;
            table.attenuation_db = Some(a);
            let best = table.best().cloned().expect("at least one pair");
            Ok(SweepPoint {
                attenuation_db: a,
                table,
                best,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchStrategy {
    #[default]
    Exhaustive,
    Greedy,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    pub best: ScoreRow,
    /// Every deployment evaluated by the search.
    pub table: ScoreTable,
}

pub fn search(
    rssi: &RssiMatrix,
    noise: &NoiseModel,
    ue: &UeConfig,
    opts: &ScoreOptions,
    m: usize,
    strategy: SearchStrategy,
) -> Result<SearchResult> {
    let n = rssi.n_ru();
    if m == 0 || m > n {
        return Err(Error::Config(format!("cannot deploy {m} RUs on {n} locations")));
    }
    match strategy {
        SearchStrategy::Exhaustive => {
            let count = binomial(n, m);
            if count > EXHAUSTIVE_LIMIT {
                return Err(Error::CombinatorialLimit {
                    n,
                    m,
                    count,
                    limit: EXHAUSTIVE_LIMIT,
                });
            }
            let table = score_all(&enumerate_deployments(n, m), rssi, noise, ue, opts)?;
            let best = table.best().cloned().expect("non-empty");
            Ok(SearchResult { best, table })
        }
        SearchStrategy::Greedy => {
            let mut chosen: Vec<usize> = Vec::with_capacity(m);
            let mut rows = Vec::new();
            let mut best: Option<ScoreRow> = None;
            for _ in 0..m {
                let candidates: Vec<Deployment> = (0..n)
                    .filter(|i| !chosen.contains(i))
                    .map(|i| Deployment::new(chosen.iter().copied().chain([i]).collect()).expect("distinct"))
                    .collect();
                let step = score_all(&candidates, rssi, noise, ue, opts)?;
                let step_best = step.best().cloned().expect("candidates remain");
                chosen = step_best.deployment.ru_indices().to_vec();
                rows.extend(step.rows);
                best = Some(step_best);
            }
            Ok(SearchResult {
                best: best.expect("m >= 1"),
                table: ScoreTable {
                    attenuation_db: None,
                    rows,
                },
            })
        }
    }
}

/// Symmetric `n x n` pair-score matrix; the diagonal and unscored pairs are empty.
#[derive(Debug, Clone, PartialEq)]
pub struct Heatmap {
    pub n: usize,
    pub values: Vec<Option<f64>>,
}

impl Heatmap {
    pub fn get(&self, a: usize, b: usize) -> Option<f64> {
        self.values[a * self.n + b]
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for a in 0..self.n {
            let line = (0..self.n)
                .map(|b| self.get(a, b).map(|v| v.to_string()).unwrap_or_default())
                .join(",");
            writeln!(w, "{line}")?;
        }
        Ok(())
    }
}

/// Builds the pair heatmap over `n_locations` sites. With `normalize`, scores
/// map linearly to [0, 1] (a table of equal scores maps to 0).
pub fn export_heatmap(table: &ScoreTable, n_locations: usize, normalize: bool) -> Result<Heatmap> {
    let mut values = vec![None; n_locations * n_locations];
    let (lo, hi) = table.score_range().unwrap_or((0.0, 0.0));
    for r in &table.rows {
        let &[a, b] = r.deployment.ru_indices() else {
            return Err(Error::InvalidDeployment(format!(
                "heatmaps need RU pairs, got {}",
                r.deployment
            )));
        };
        r.deployment.check_bounds(n_locations)?;
        let v = if normalize {
            if hi > lo {
                (r.score_db - lo) / (hi - lo)
            } else {
                0.0
            }
        } else {
            r.score_db
        };
        values[a * n_locations + b] = Some(v);
        values[b * n_locations + a] = Some(v);
    }
    Ok(Heatmap { n: n_locations, values })
}

/// Text table of the best pair per attenuation, with the best pair's per-UE
/// SINR range and the score range across all pairs.
pub fn format_best_table(sweep: &[SweepPoint]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:>8}  {:<14}  {:>10}  {:<22}  {:<22}",
        "A_RU[dB]", "best RUs", "E(G)[dB]", "[min,max] UE SINR[dB]", "[min,max] E(G)[dB]"
    );
    for p in sweep {
        let (lo, hi) = p.table.score_range().unwrap_or((f64::NAN, f64::NAN));
        let _ = writeln!(
            out,
            "{:>8}  {:<14}  {:>10.2}  {:<22}  {:<22}",
            p.attenuation_db,
            p.best.deployment.to_string(),
            p.best.score_db,
            format!("[{:.2}, {:.2}]", p.best.min_db, p.best.max_db),
            format!("[{lo:.2}, {hi:.2}]"),
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linkbudget::sinr;
    use crate::raytrace::TraceConfig;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_rssi(rng: &mut ChaCha8Rng, n_ru: usize, n_ue: usize) -> RssiMatrix {
        let v = (0..n_ru * n_ue).map(|_| rng.gen_range(-110.0..-40.0)).collect();
        RssiMatrix::from_dbm(n_ru, n_ue, v).unwrap()
    }

    #[test]
    fn pair_counts() {
        assert_eq!(enumerate_pairs(24).len(), 276);
        assert_eq!(enumerate_pairs(2).len(), 1);
        let four = enumerate_pairs(4);
        assert_eq!(four.len(), 6);
        assert_eq!(four[0].ru_indices(), &[0, 1]);
        assert_eq!(four[5].ru_indices(), &[2, 3]);
        assert_eq!(binomial(24, 2), 276);
        assert_eq!(binomial(24, 12), 2_704_156);
    }

    #[test]
    fn deployment_validation() {
        assert!(Deployment::new(vec![]).is_err());
        assert!(Deployment::new(vec![3, 3]).is_err());
        let d = Deployment::new(vec![5, 2]).unwrap();
        assert_eq!(d.ru_indices(), &[2, 5]);
        assert!(d.check_bounds(6).is_ok());
        assert!(d.check_bounds(5).is_err());
    }

    #[test]
    fn single_ru_serves_all() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let m = random_rssi(&mut rng, 3, 10);
        let d = Deployment::new(vec![1]).unwrap();
        let a = associate(&d, &m, &NoiseModel::default(), &UeConfig::default());
        assert!(a.serving.iter().all(|&s| s == 1));
    }

    #[test]
    fn dominant_row_wins() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let n_ue = 8;
        let a_row: Vec<f64> = (0..n_ue).map(|_| rng.gen_range(-100.0..-60.0)).collect();
        let b_row: Vec<f64> = a_row.iter().map(|r| r + 10.0).collect();
        let m = RssiMatrix::from_dbm(2, n_ue, [a_row, b_row].concat()).unwrap();
        let res = associate(&Deployment::new(vec![0, 1]).unwrap(), &m, &NoiseModel::default(), &UeConfig::default());
        assert!(res.serving.iter().all(|&s| s == 1));
    }

    /// Direct evaluation of the SINR formula for every (serving, UE) pair.
    fn brute_force(d: &[usize], rssi_dbm: &[Vec<f64>], noise_dbm: f64) -> Vec<(usize, f64)> {
        let n_ue = rssi_dbm[0].len();
        (0..n_ue)
            .map(|j| {
                let mut best = (usize::MAX, f64::NEG_INFINITY);
                for &i in d {
                    let num = 10f64.powf(rssi_dbm[i][j] / 10.0);
                    let mut den = 10f64.powf(noise_dbm / 10.0);
                    for &u in d {
                        if u != i {
                            den += 10f64.powf(rssi_dbm[u][j] / 10.0);
                        }
                    }
                    let g = 10.0 * (num / den).log10();
                    if best.0 == usize::MAX || g > best.1 {
                        best = (i, g);
                    }
                }
                best
            })
            .collect()
    }

    #[test]
    fn association_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let rows: Vec<Vec<f64>> = (0..4).map(|_| (0..6).map(|_| rng.gen_range(-100.0..-50.0)).collect()).collect();
        let m = RssiMatrix::from_dbm(4, 6, rows.concat()).unwrap();
        let noise = NoiseModel::default();
        let ue = UeConfig::default();
        let nf = noise.thermal_noise_dbm() + ue.noise_figure_db;
        for d in enumerate_deployments(4, 2).into_iter().chain(enumerate_deployments(4, 3)) {
            let got = associate(&d, &m, &noise, &ue);
            let want = brute_force(d.ru_indices(), &rows, nf);
            for (j, &(serving, best)) in want.iter().enumerate() {
                assert_eq!(got.serving[j], serving);
                assert!((got.best_sinr_db[j] - best).abs() < 1e-9);
                let via_api = sinr(j, got.serving[j], d.ru_indices(), &m, &noise, &ue).unwrap();
                assert!((via_api - got.best_sinr_db[j]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn constant_sinr_scores_itself() {
        // two RUs equally strong everywhere: every UE sees the same SINR
        let m = RssiMatrix::from_dbm(2, 52, vec![-70.0; 104]).unwrap();
        let row = score(
            &Deployment::new(vec![0, 1]).unwrap(),
            &m,
            &NoiseModel::default(),
            &UeConfig::default(),
            &ScoreOptions::default(),
        );
        assert!((row.score_db - row.min_db).abs() < 1e-12 && (row.max_db - row.min_db).abs() < 1e-12);
    }

    #[test]
    fn score_is_mean_of_52() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let m = random_rssi(&mut rng, 5, 52);
        let d = Deployment::new(vec![1, 4]).unwrap();
        let noise = NoiseModel::default();
        let ue = UeConfig::default();
        let row = score(&d, &m, &noise, &ue, &ScoreOptions::default());
        let assoc = associate(&d, &m, &noise, &ue);
        // compensated summation as an independent reference
        let (mut sum, mut comp) = (0.0f64, 0.0f64);
        for &v in &assoc.best_sinr_db {
            let y = v - comp;
            let t = sum + y;
            comp = (t - sum) - y;
            sum = t;
        }
        assert!((row.score_db - sum / 52.0).abs() < 1e-12);
    }

    #[test]
    fn blocked_ue_uses_floor() {
        // UE 0 unreachable, the rest at exactly 20 dB SINR with a single RU
        let noise = NoiseModel::default();
        let ue = UeConfig::default();
        let nf = noise.thermal_noise_dbm() + ue.noise_figure_db;
        let mut v = vec![nf + 20.0; 10];
        v[0] = f64::NEG_INFINITY;
        let m = RssiMatrix::from_dbm(1, 10, v).unwrap();
        let d = Deployment::new(vec![0]).unwrap();
        let assoc = associate(&d, &m, &noise, &ue);
        assert_eq!(assoc.best_sinr_db[0], f64::NEG_INFINITY);
        let row = score(&d, &m, &noise, &ue, &ScoreOptions::default());
        assert!((row.score_db - (9.0 * 20.0 - 30.0) / 10.0).abs() < 1e-9);
        assert_eq!(row.min_db, -30.0);
    }

    #[test]
    fn linear_averaging_flag() {
        let noise = NoiseModel::default();
        let ue = UeConfig::default();
        let nf = noise.thermal_noise_dbm() + ue.noise_figure_db;
        let m = RssiMatrix::from_dbm(1, 2, vec![nf + 10.0, nf + 20.0]).unwrap();
        let opts = ScoreOptions {
            averaging: Averaging::Linear,
            ..Default::default()
        };
        let row = score(&Deployment::new(vec![0]).unwrap(), &m, &noise, &ue, &opts);
        assert!((row.score_db - 10.0 * 55f64.log10()).abs() < 1e-9);
    }

    fn synthetic_channel(n_tx: usize, n_rx: usize, seed: u64) -> ChannelMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pl: Vec<f64> = (0..n_tx * n_rx).map(|_| rng.gen_range(45.0..95.0)).collect();
        ChannelMatrix::from_path_loss(n_tx, n_rx, &pl, TraceConfig::default()).unwrap()
    }

    #[test]
    fn sweep_is_monotone_and_complete() {
        let ch = synthetic_channel(24, 52, 5);
        let problem = PlacementProblem {
            channel: &ch,
            ru: RuConfig::default(),
            ue: UeConfig::default(),
            noise: NoiseModel::default(),
            options: ScoreOptions::default(),
        };
        let sweep = sweep_attenuation(&problem, &DEFAULT_SWEEP_DB).unwrap();
        assert_eq!(sweep.len(), 6);
        for w in sweep.windows(2) {
            assert!(w[1].best.score_db <= w[0].best.score_db);
            for (a, b) in w[0].table.rows.iter().zip(&w[1].table.rows) {
                assert!(b.score_db < a.score_db);
            }
        }
        for p in &sweep {
            assert_eq!(p.table.rows.len(), 276);
            assert_eq!(p.table.attenuation_db, Some(p.attenuation_db));
        }
        let text = format_best_table(&sweep);
        assert_eq!(text.lines().count(), 7);
        assert!(sweep_attenuation(&problem, &[60.0]).is_err());
        let one = synthetic_channel(1, 5, 1);
        let problem = PlacementProblem { channel: &one, ..problem };
        assert!(sweep_attenuation(&problem, &[0.0]).is_err());
    }

    #[test]
    fn heatmap_shape_and_normalization() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let m = random_rssi(&mut rng, 24, 52);
        let table = score_all(&enumerate_pairs(24), &m, &NoiseModel::default(), &UeConfig::default(), &ScoreOptions::default()).unwrap();
        let h = export_heatmap(&table, 24, false).unwrap();
        let filled_upper = (0..24).flat_map(|a| (a + 1..24).map(move |b| (a, b))).filter(|&(a, b)| h.get(a, b).is_some()).count();
        assert_eq!(filled_upper, 276);
        for a in 0..24 {
            assert!(h.get(a, a).is_none());
            for b in 0..24 {
                assert_eq!(h.get(a, b), h.get(b, a));
            }
        }
        let hn = export_heatmap(&table, 24, true).unwrap();
        let vals: Vec<f64> = hn.values.iter().flatten().copied().collect();
        assert_eq!(vals.iter().copied().fold(f64::INFINITY, f64::min), 0.0);
        assert_eq!(vals.iter().copied().fold(f64::NEG_INFINITY, f64::max), 1.0);
        let mut csv = Vec::new();
        h.write_csv(&mut csv).unwrap();
        let text = String::from_utf8(csv).unwrap();
        assert_eq!(text.lines().count(), 24);
        assert!(text.starts_with(','));

        let triples = score_all(&enumerate_deployments(4, 3), &m, &NoiseModel::default(), &UeConfig::default(), &ScoreOptions::default()).unwrap();
        assert!(export_heatmap(&triples, 24, false).is_err());
    }

    #[test]
    fn search_strategies() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let m = random_rssi(&mut rng, 8, 20);
        let (noise, ue, opts) = (NoiseModel::default(), UeConfig::default(), ScoreOptions::default());
        let ex = search(&m, &noise, &ue, &opts, 2, SearchStrategy::Exhaustive).unwrap();
        assert_eq!(ex.table.rows.len(), 28);
        let oracle = ex.table.rows.iter().map(|r| r.score_db).fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(ex.best.score_db, oracle);
        let gr = search(&m, &noise, &ue, &opts, 2, SearchStrategy::Greedy).unwrap();
        assert!(gr.best.score_db <= ex.best.score_db);
        assert_eq!(gr.best.deployment.len(), 2);

        let single = search(&m, &noise, &ue, &opts, 1, SearchStrategy::Exhaustive).unwrap();
        let nf = noise.effective_noise_mw(&ue);
        let best_alone = (0..8)
            .map(|i| (0..20).map(|j| linear_to_db(m.mw(i, j) / nf)).sum::<f64>() / 20.0)
            .fold(f64::NEG_INFINITY, f64::max);
        assert!((single.best.score_db - best_alone).abs() < 1e-9);

        let big = random_rssi(&mut rng, 24, 3);
        assert!(matches!(
            search(&big, &noise, &ue, &opts, 12, SearchStrategy::Exhaustive),
            Err(Error::CombinatorialLimit { .. })
        ));
        assert!(search(&big, &noise, &ue, &opts, 8, SearchStrategy::Greedy).is_ok());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn pair_order_does_not_matter(seed in 0u64..1000, a in 0usize..6, b in 0usize..6) {
            prop_assume!(a != b);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = random_rssi(&mut rng, 6, 12);
            let (noise, ue, opts) = (NoiseModel::default(), UeConfig::default(), ScoreOptions::default());
            let x = score(&Deployment::new(vec![a, b]).unwrap(), &m, &noise, &ue, &opts);
            let y = score(&Deployment::new(vec![b, a]).unwrap(), &m, &noise, &ue, &opts);
            prop_assert_eq!(x.score_db, y.score_db);
        }

        #[test]
        fn common_attenuation_never_raises_scores(seed in 0u64..1000, att in 0.0f64..40.0, delta in 0.1f64..10.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = random_rssi(&mut rng, 5, 10);
            let (noise, ue, opts) = (NoiseModel::default(), UeConfig::default(), ScoreOptions::default());
            let pairs = enumerate_pairs(5);
            let lo = score_all(&pairs, &m.attenuated(att), &noise, &ue, &opts).unwrap();
            let hi = score_all(&pairs, &m.attenuated(att + delta), &noise, &ue, &opts).unwrap();
            for (a, b) in lo.rows.iter().zip(&hi.rows) {
                prop_assert!(b.score_db < a.score_db);
            }
        }
    }
}
