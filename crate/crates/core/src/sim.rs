//! Monte Carlo logical error rates, exhaustive decoding fractions and
//! decoder timing.

use std::fmt;
use std::hint::black_box;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{build_complete_graph, DefectGraph, DistanceProvider};
use crate::lattice::{CodeLayout, ResidualClass, Syndrome};
use crate::mwpm::{mwpm_decode, mwpm_match, DEFAULT_CAP};
use crate::noise::{
    binomial, enumerate_errors, pattern_count, sample_error, stream_rng, NoiseModel,
};
use crate::pauli::{ErrorType, Pauli, PauliError};
use crate::rfire::{rfire_decode, rfire_match};
use crate::stm::{stm_decode, stm_match, StmConfig};

/// Resampling attempts per trial when the exact matcher refuses a syndrome.
pub const RESAMPLE_BUDGET: u32 = 100;

/// Largest pattern count `estimate_beta` enumerates.
pub const DEFAULT_BETA_BUDGET: u128 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Decoder {
    Stm(StmConfig),
    Rfire,
    Mwpm { cap: usize },
}

impl Decoder {
    pub fn stm() -> Self {
        Decoder::Stm(StmConfig::default())
    }

    pub fn mwpm() -> Self {
        Decoder::Mwpm { cap: DEFAULT_CAP }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Decoder::Stm(_) => "stm",
            Decoder::Rfire => "rfire",
            Decoder::Mwpm { .. } => "mwpm",
        }
    }

    pub fn decode(&self, layout: &CodeLayout, syndrome: &Syndrome) -> Result<PauliError> {
        match self {
            Decoder::Stm(c) => stm_decode(layout, syndrome, c),
            Decoder::Rfire => rfire_decode(layout, syndrome),
            Decoder::Mwpm { cap } => mwpm_decode(layout, syndrome, *cap),
        }
    }

    /// Matching step alone, from a ghost-free graph to a chosen solution.
    /// Returns the number of matched pairs.
    pub fn match_graph(&self, graph: &DefectGraph, t: u32) -> Result<usize> {
        Ok(match self {
            Decoder::Stm(c) => stm_match(graph, t, c)?.matching.pairs.len(),
            Decoder::Rfire => rfire_match(graph, t)?.matching.pairs.len(),
            Decoder::Mwpm { cap } => mwpm_match(graph, *cap)?.1.pairs.len(),
        })
    }
}

impl fmt::Display for Decoder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Decoder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "stm" => Ok(Decoder::stm()),
            "rfire" => Ok(Decoder::Rfire),
            "mwpm" => Ok(Decoder::mwpm()),
            _ => Err(Error::Parse(format!(
                "unknown decoder `{s}` (stm, rfire, mwpm)"
            ))),
        }
    }
}

/// Counts of each residual logical class over a run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ClassCounts {
    pub x_l: u64,
    pub z_l: u64,
    pub y_l: u64,
}

impl ClassCounts {
    fn add(&mut self, class: ResidualClass) {
        match class {
            ResidualClass::XL => self.x_l += 1,
            ResidualClass::ZL => self.z_l += 1,
            ResidualClass::YL => self.y_l += 1,
            _ => {}
        }
    }

    fn merge(self, o: Self) -> Self {
        Self {
            x_l: self.x_l + o.x_l,
            z_l: self.z_l + o.z_l,
            y_l: self.y_l + o.y_l,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimResult {
    pub code: String,
    pub decoder: String,
    pub p: f64,
    pub trials: u64,
    pub failures: u64,
    pub p_l: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub seed: u64,
    pub classes: ClassCounts,
    /// Syndromes redrawn because the exact matcher was over its cap.
    pub resampled: u64,
    /// Trials where tree matching hit an unsupported shape; counted as failures.
    pub structural: u64,
}

impl SimResult {
    /// Standard error of `p_l` under a binomial model.
    pub fn sigma(&self) -> f64 {
        (self.p_l * (1.0 - self.p_l) / self.trials as f64).sqrt()
    }
}

#[derive(Serialize)]
struct CsvRow<'a> {
    code: &'a str,
    decoder: &'a str,
    p: f64,
    trials: u64,
    failures: u64,
    p_l: f64,
    ci_low: f64,
    ci_high: f64,
    seed: u64,
}

pub const CSV_HEADER: &str = "code,decoder,p,trials,failures,p_l,ci_low,ci_high,seed";

pub fn write_csv<W: Write>(out: W, results: &[SimResult]) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in results {
        w.serialize(CsvRow {
            code: &r.code,
            decoder: &r.decoder,
            p: r.p,
            trials: r.trials,
            failures: r.failures,
            p_l: r.p_l,
            ci_low: r.ci_low,
            ci_high: r.ci_high,
            seed: r.seed,
        })?;
    }
    if results.is_empty() {
        w.write_record(CSV_HEADER.split(','))?;
    }
    w.flush()
}

/// Wilson score interval at 95% confidence.
pub fn wilson_interval(successes: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let z = 1.959_963_984_540_054;
    let n = trials as f64;
    let phat = successes as f64 / n;
    let denom = 1.0 + z * z / n;
    let centre = (phat + z * z / (2.0 * n)) / denom;
    let half = z * (phat * (1.0 - phat) / n + z * z / (4.0 * n * n)).sqrt() / denom;
    let lo = if successes == 0 {
        0.0
    } else {
        (centre - half).max(0.0)
    };
    let hi = if successes == trials {
        1.0
    } else {
        (centre + half).min(1.0)
    };
    (lo, hi)
}

#[derive(Clone, Copy, Default)]
struct Tally {
    failures: u64,
    classes: ClassCounts,
    resampled: u64,
    structural: u64,
}

impl Tally {
    fn merge(self, o: Self) -> Self {
        Self {
            failures: self.failures + o.failures,
            classes: self.classes.merge(o.classes),
            resampled: self.resampled + o.resampled,
            structural: self.structural + o.structural,
        }
    }
}

fn run_trial(
    layout: &CodeLayout,
    decoder: &Decoder,
    model: &NoiseModel,
    seed: u64,
    trial: u64,
) -> Result<Tally> {
    let mut rng = stream_rng(seed, trial);
    let mut tally = Tally::default();
    for _ in 0..=RESAMPLE_BUDGET {
        let e = sample_error(layout, model, &mut rng);
        let s = layout.extract_syndrome(&e);
        match decoder.decode(layout, &s) {
            Ok(c) => {
                let class = layout.residual_class(&e, &c);
                if class != ResidualClass::Identity {
                    tally.failures += 1;
                    tally.classes.add(class);
                }
                return Ok(tally);
            }
            Err(Error::Capacity { .. }) => tally.resampled += 1,
            Err(Error::Structural(_)) => {
                tally.failures += 1;
                tally.structural += 1;
                return Ok(tally);
            }
            Err(e) => return Err(e),
        }
    }
    Err(Error::Capacity {
        vertices: 0,
        cap: match decoder {
            Decoder::Mwpm { cap } => *cap,
            _ => 0,
        },
    })
}

/// Estimates the logical error rate with `trials` independent trials.
///
/// Trial `i` draws from RNG stream `i` of `seed`, so the result does not
/// depend on thread scheduling.
pub fn simulate(
    layout: &CodeLayout,
    decoder: &Decoder,
    p: f64,
    trials: u64,
    seed: u64,
) -> Result<SimResult> {
    let model = NoiseModel::depolarizing(p)?;
    let tally = (0..trials)
        .into_par_iter()
        .map(|i| run_trial(layout, decoder, &model, seed, i))
        .try_reduce(Tally::default, |a, b| Ok(a.merge(b)))?;
    let p_l = if trials == 0 {
        0.0
    } else {
        tally.failures as f64 / trials as f64
    };
    let (ci_low, ci_high) = wilson_interval(tally.failures, trials);
    Ok(SimResult {
        code: layout.spec.to_string(),
        decoder: decoder.name().to_string(),
        p,
        trials,
        failures: tally.failures,
        p_l,
        ci_low,
        ci_high,
        seed,
        classes: tally.classes,
        resampled: tally.resampled,
        structural: tally.structural,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BetaResult {
    pub code: String,
    pub decoder: String,
    pub weight: usize,
    pub total: u64,
    pub corrected: u64,
    pub beta: f64,
    /// Present for sampled estimates only.
    pub ci: Option<(f64, f64)>,
}

fn corrected(layout: &CodeLayout, decoder: &Decoder, e: &PauliError) -> Result<bool> {
    match decoder.decode(layout, &layout.extract_syndrome(e)) {
        Ok(c) => Ok(layout.residual_class(e, &c) == ResidualClass::Identity),
        Err(Error::Structural(_)) => Ok(false),
        Err(err) => Err(err),
    }
}

/// Fraction of all weight-`w` errors the decoder corrects, by enumeration.
pub fn estimate_beta(
    layout: &CodeLayout,
    decoder: &Decoder,
    weight: usize,
    budget: u128,
) -> Result<BetaResult> {
    let patterns = pattern_count(layout.n(), weight);
    if patterns > budget {
        return Err(Error::BudgetExceeded { patterns, budget });
    }
    let mut ok = 0u64;
    for e in enumerate_errors(layout, weight) {
        ok += corrected(layout, decoder, &e)? as u64;
    }
    let total = patterns as u64;
    Ok(BetaResult {
        code: layout.spec.to_string(),
        decoder: decoder.name().to_string(),
        weight,
        total,
        corrected: ok,
        beta: ok as f64 / total as f64,
        ci: None,
    })
}

/// Uniformly random error of exactly weight `w`.
pub fn sample_fixed_weight<R: Rng + ?Sized>(n: usize, weight: usize, rng: &mut R) -> PauliError {
    let mut e = PauliError::identity(n);
    for q in rand::seq::index::sample(rng, n, weight) {
        e.set(q, Pauli::NON_IDENTITY[rng.gen_range(0..3)]);
    }
    e
}

/// Sampled estimate of the corrected fraction, with a Wilson interval.
pub fn estimate_beta_sampled(
    layout: &CodeLayout,
    decoder: &Decoder,
    weight: usize,
    samples: u64,
    seed: u64,
) -> Result<BetaResult> {
    let ok = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, i);
            let e = sample_fixed_weight(layout.n(), weight, &mut rng);
            corrected(layout, decoder, &e).map(|b| b as u64)
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    Ok(BetaResult {
        code: layout.spec.to_string(),
        decoder: decoder.name().to_string(),
        weight,
        total: samples,
        corrected: ok,
        beta: ok as f64 / samples.max(1) as f64,
        ci: Some(wilson_interval(ok, samples)),
    })
}

/// Leading-order logical error rate `(1 - beta) * C(n, t+1) * p^(t+1)`.
pub fn predict_pl(n: usize, t: u32, beta: f64, p: f64) -> f64 {
    (1.0 - beta) * binomial(n as u64, t as u64 + 1) as f64 * p.powi(t as i32 + 1)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchResult {
    pub code: String,
    pub decoder: String,
    pub n_d: usize,
    pub repetitions: u64,
    pub mean_us: f64,
    pub median_us: f64,
}

/// Physical Z error rate used to draw benchmark syndromes.
pub const BENCH_P: f64 = 0.03;

const BENCH_GRAPHS: usize = 64;
const BENCH_BATCHES: usize = 16;

/// Defect graphs of the Z pass with exactly `n_d` defects, from i.i.d. Z
/// errors at rate [`BENCH_P`].
pub fn bench_graphs(layout: &CodeLayout, n_d: usize, count: usize, seed: u64) -> Vec<DefectGraph> {
    let mut rng = stream_rng(seed, u64::MAX);
    let n = layout.n();
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let mut e = PauliError::identity(n);
        for q in 0..n {
            if rng.gen::<f64>() < BENCH_P {
                e.set(q, Pauli::Z);
            }
        }
        let s = layout.extract_syndrome(&e);
        if s.x_defects.len() == n_d {
            out.push(build_complete_graph(
                layout,
                ErrorType::Z,
                &DistanceProvider::Manhattan,
                &s.x_defects,
            ));
        }
    }
    out
}

/// Times the matching step, graph construction excluded.
///
/// The work is split into batches over a fixed pool of graphs; the result
/// reports the mean and median of the per-call batch averages. One batch is
/// run first and discarded.
pub fn bench(
    layout: &CodeLayout,
    decoder: &Decoder,
    n_d: usize,
    repetitions: u64,
    seed: u64,
) -> Result<BenchResult> {
    let graphs = bench_graphs(layout, n_d, BENCH_GRAPHS, seed);
    let t = layout.t();
    let per_batch = (repetitions as usize).div_ceil(BENCH_BATCHES).max(1);
    let run_batch = |offset: usize| -> Result<f64> {
        let start = Instant::now();
        for i in 0..per_batch {
            let g = &graphs[(offset + i) % graphs.len()];
            black_box(decoder.match_graph(black_box(g), t)?);
        }
        Ok(start.elapsed().as_secs_f64() * 1e6 / per_batch as f64)
    };
    run_batch(0)?;
    let mut means = Vec::with_capacity(BENCH_BATCHES);
    for b in 0..BENCH_BATCHES {
        means.push(run_batch(b * per_batch)?);
    }
    let mean = means.iter().sum::<f64>() / means.len() as f64;
    means.sort_by(f64::total_cmp);
    let median = (means[(means.len() - 1) / 2] + means[means.len() / 2]) / 2.0;
    Ok(BenchResult {
        code: layout.spec.to_string(),
        decoder: decoder.name().to_string(),
        n_d,
        repetitions: (per_batch * BENCH_BATCHES) as u64,
        mean_us: mean,
        median_us: median,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{Family, GeneratorType};

    #[test]
    fn zero_noise_never_fails() {
        let layout = CodeLayout::new(Family::Standard, 3).unwrap();
        for d in [Decoder::stm(), Decoder::Rfire, Decoder::mwpm()] {
            let r = simulate(&layout, &d, 0.0, 500, 1).unwrap();
            assert_eq!((r.failures, r.p_l), (0, 0.0));
            assert!(r.ci_low <= r.p_l && r.p_l <= r.ci_high);
        }
    }

    #[test]
    fn simulation_is_deterministic() {
        let layout = CodeLayout::new(Family::Rotated, 3).unwrap();
        let a = simulate(&layout, &Decoder::stm(), 0.05, 3000, 9).unwrap();
        let b = simulate(&layout, &Decoder::stm(), 0.05, 3000, 9).unwrap();
        assert_eq!(a, b);
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(3)
            .build()
            .unwrap();
        let c = pool.install(|| simulate(&layout, &Decoder::stm(), 0.05, 3000, 9).unwrap());
        assert_eq!(a, c);
        assert_eq!(
            a.classes.x_l + a.classes.z_l + a.classes.y_l + a.structural,
            a.failures
        );
    }

    #[test]
    fn wilson_interval_values() {
        // 50 of 100 gives the textbook symmetric interval
        let (lo, hi) = wilson_interval(50, 100);
        assert!((lo - 0.4038).abs() < 1e-4 && (hi - 0.5962).abs() < 1e-4);
        let (lo, hi) = wilson_interval(0, 1000);
        assert_eq!(lo, 0.0);
        assert!((hi - 0.003827).abs() < 1e-5);
    }

    #[test]
    fn predict_pl_arithmetic() {
        assert_eq!(predict_pl(9, 1, 1.0, 0.01), 0.0);
        assert!((predict_pl(9, 1, 0.5, 0.001) - 1.8e-5).abs() < 1e-12);
        let mut rng = stream_rng(3, 0);
        for _ in 0..100 {
            let n = rng.gen_range(5..100usize);
            let t = rng.gen_range(1..4u32);
            let beta: f64 = rng.gen();
            let p: f64 = rng.gen_range(0.0..0.1);
            let mut c = 1.0;
            for i in 0..=t as usize {
                c *= (n - i) as f64 / (i + 1) as f64;
            }
            let direct = (1.0 - beta) * c * p.powi(t as i32 + 1);
            assert!((predict_pl(n, t, beta, p) - direct).abs() <= 1e-12 * direct.max(1e-300));
        }
    }

    #[test]
    fn beta_up_to_t_is_one() {
        let layout = CodeLayout::new(Family::Standard, 3).unwrap();
        for d in [Decoder::stm(), Decoder::Rfire, Decoder::mwpm()] {
            let r = estimate_beta(&layout, &d, 1, DEFAULT_BETA_BUDGET).unwrap();
            assert_eq!((r.total, r.corrected, r.beta), (39, 39, 1.0));
        }
        let big = CodeLayout::new(Family::Standard, 7).unwrap();
        assert!(matches!(
            estimate_beta(&big, &Decoder::Rfire, 4, DEFAULT_BETA_BUDGET),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn sampled_beta_brackets_exhaustive() {
        let layout = CodeLayout::new(Family::Standard, 3).unwrap();
        let exact = estimate_beta(&layout, &Decoder::mwpm(), 2, DEFAULT_BETA_BUDGET).unwrap();
        let sampled = estimate_beta_sampled(&layout, &Decoder::mwpm(), 2, 20_000, 4).unwrap();
        let (lo, hi) = sampled.ci.unwrap();
        let slack = 0.01;
        assert!(
            lo - slack <= exact.beta && exact.beta <= hi + slack,
            "{exact:?} {sampled:?}"
        );
    }

    #[test]
    fn csv_header_and_rows() {
        let layout = CodeLayout::new(Family::Standard, 3).unwrap();
        let r = simulate(&layout, &Decoder::Rfire, 0.01, 100, 5).unwrap();
        let mut buf = Vec::new();
        write_csv(&mut buf, &[r]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some(CSV_HEADER));
        assert!(lines
            .next()
            .unwrap()
            .starts_with("standard:3,rfire,0.01,100,"));
        let mut buf = Vec::new();
        write_csv(&mut buf, &[]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().trim(), CSV_HEADER);
    }

    #[test]
    fn bench_graphs_have_the_requested_defect_count() {
        let layout = CodeLayout::new(Family::Standard, 7).unwrap();
        for n_d in [0, 4, 7] {
            let gs = bench_graphs(&layout, n_d, 10, 1);
            assert!(gs.iter().all(|g| g.defect_count() == n_d));
        }
        let r = bench(&layout, &Decoder::Rfire, 4, 64, 1).unwrap();
        assert!(r.mean_us > 0.0 && r.repetitions >= 64);
    }

    /// Row-reduces the stabilizer generators over GF(2) and reports whether
    /// `op` lies in their span.
    fn in_stabilizer_group(layout: &CodeLayout, op: &PauliError) -> bool {
        let n = layout.n();
        let to_bits = |p: &PauliError| -> Vec<bool> {
            p.x_part.iter().chain(p.z_part.iter()).copied().collect()
        };
        let mut rows: Vec<Vec<bool>> = Vec::new();
        for kind in [GeneratorType::X, GeneratorType::Z] {
            for i in 0..layout.generators(kind).len() {
                rows.push(to_bits(&layout.generator_operator(kind, i)));
            }
        }
        let rank = |mut m: Vec<Vec<bool>>| -> usize {
            let mut r = 0;
            for col in 0..2 * n {
                if let Some(piv) = (r..m.len()).find(|&i| m[i][col]) {
                    m.swap(r, piv);
                    for i in 0..m.len() {
                        if i != r && m[i][col] {
                            let pivot = m[r].clone();
                            for (a, b) in m[i].iter_mut().zip(pivot) {
                                *a ^= b;
                            }
                        }
                    }
                    r += 1;
                }
            }
            r
        };
        let base = rank(rows.clone());
        rows.push(to_bits(op));
        rank(rows) == base
    }

    #[test]
    fn residual_class_agrees_with_stabilizer_membership() {
        for family in [Family::Standard, Family::Rotated] {
            let layout = CodeLayout::new(family, 5).unwrap();
            let model = NoiseModel::depolarizing(0.12).unwrap();
            let mut rng = stream_rng(17, 0);
            let mut logical = 0;
            for _ in 0..400 {
                let e = sample_error(&layout, &model, &mut rng);
                let c = Decoder::stm()
                    .decode(&layout, &layout.extract_syndrome(&e))
                    .unwrap();
                let r = e.compose(&c);
                assert!(layout.extract_syndrome(&r).is_empty());
                let identity = layout.residual_class(&e, &c) == ResidualClass::Identity;
                assert_eq!(identity, in_stabilizer_group(&layout, &r));
                logical += !identity as u32;
            }
            assert!(logical > 0);
        }
    }

    #[test]
    fn exact_matching_is_not_beaten_at_distance_five() {
        let layout = CodeLayout::new(Family::Standard, 5).unwrap();
        let m = simulate(&layout, &Decoder::mwpm(), 0.05, 20_000, 2).unwrap();
        for d in [Decoder::stm(), Decoder::Rfire] {
            let r = simulate(&layout, &d, 0.05, 20_000, 2).unwrap();
            let sigma = (m.sigma().powi(2) + r.sigma().powi(2)).sqrt();
            assert!(m.p_l <= r.p_l + 2.0 * sigma, "{m:?} {r:?}");
        }
    }

    #[test]
    fn error_rate_grows_with_p() {
        let layout = CodeLayout::new(Family::Standard, 3).unwrap();
        let mut last = 0.0;
        for p in [0.01, 0.03, 0.06, 0.1] {
            let r = simulate(&layout, &Decoder::Rfire, p, 10_000, 3).unwrap();
            assert!(r.ci_high >= last);
            last = r.p_l;
        }
    }
}
