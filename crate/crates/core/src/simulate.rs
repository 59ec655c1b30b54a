//! Seeded Monte Carlo harness for size and power checks.
//!
//! Every replication draws from its own ChaCha stream `(seed, replication)`,
//! so results do not depend on how replications are scheduled across threads.

use std::fmt;
use std::str::FromStr;

use chrono::NaiveDate;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ardl::{self, CriticalTable};
use crate::diagnostics;
use crate::error::{Error, Result};
use crate::ols::{self, DesignMatrix, OlsFit};
use crate::timeseries::{Dataset, Series};
use crate::unit_root::{self, Deterministic};

pub struct SimRng(ChaCha8Rng);

impl SimRng {
    pub fn for_replication(seed: u64, replication: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(replication);
        SimRng(rng)
    }

    pub fn normal(&mut self) -> f64 {
        self.sample(StandardNormal)
    }
}

impl RngCore for SimRng {
    fn next_u32(&mut self) -> u32 {
        self.0.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.0.fill_bytes(dst)
    }
}

const BURN_IN: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum Dgp {
    WhiteNoise,
    RandomWalk,
    Ar1 { rho: f64 },
    /// `x` a random walk; `Δy_t = speed (y_{t-1} - 2 - θ x_{t-1}) + ε_t`.
    CointegratedPair { theta: f64, speed: f64 },
    /// `y = 1 + 0.5x + e` with the intercept shifted by `size` error
    /// standard deviations from mid-sample on.
    CoefficientBreak { size: f64 },
    /// `y = 1 + x + γx² + e`, for RESET power.
    Quadratic { gamma: f64 },
    /// GARCH(1,1) innovations.
    Garch { omega: f64, alpha: f64, beta: f64 },
}

impl Dgp {
    /// Univariate draw of length `n`. For the pair this is `y`.
    pub fn generate(&self, rng: &mut SimRng, n: usize) -> Vec<f64> {
        match *self {
            Dgp::WhiteNoise => (0..n).map(|_| rng.normal()).collect(),
            Dgp::RandomWalk => {
                let mut level = 0.0;
                (0..n)
                    .map(|_| {
                        level += rng.normal();
                        level
                    })
                    .collect()
            }
            Dgp::Ar1 { rho } => {
                let mut v = 0.0;
                let mut out = Vec::with_capacity(n);
                for t in 0..n + BURN_IN {
                    v = rho * v + rng.normal();
                    if t >= BURN_IN {
                        out.push(v);
                    }
                }
                out
            }
            Dgp::Garch { omega, alpha, beta } => {
                let mut h = omega / (1.0 - alpha - beta).max(1e-6);
                let mut e = 0.0;
                let mut out = Vec::with_capacity(n);
                for t in 0..n + BURN_IN {
                    h = omega + alpha * e * e + beta * h;
                    e = h.sqrt() * rng.normal();
                    if t >= BURN_IN {
                        out.push(e);
                    }
                }
                out
            }
            Dgp::CointegratedPair { .. } => self.generate_pair(rng, n).0,
            Dgp::CoefficientBreak { .. } | Dgp::Quadratic { .. } => self.generate_regression(rng, n).0,
        }
    }

    /// `(y, x)` for the cointegrated pair.
    pub fn generate_pair(&self, rng: &mut SimRng, n: usize) -> (Vec<f64>, Vec<f64>) {
        let (theta, speed) = match *self {
            Dgp::CointegratedPair { theta, speed } => (theta, speed),
            _ => (0.0, 0.0),
        };
        if !matches!(self, Dgp::CointegratedPair { .. }) {
            // independent random walks
            let y = Dgp::RandomWalk.generate(rng, n);
            let x = Dgp::RandomWalk.generate(rng, n);
            return (y, x);
        }
        let mut x = Vec::with_capacity(n);
        let mut y = Vec::with_capacity(n);
        let mut xv = rng.normal();
        let mut yv = 2.0 + theta * xv + rng.normal();
        for _ in 0..n {
            let dev = yv - 2.0 - theta * xv;
            xv += rng.normal();
            yv += speed * dev + rng.normal();
            x.push(xv);
            y.push(yv);
        }
        (y, x)
    }

    /// `(y, x)` for a single-regressor static regression with errors from this DGP.
    pub fn generate_regression(&self, rng: &mut SimRng, n: usize) -> (Vec<f64>, Vec<f64>) {
        let x: Vec<f64> = (0..n).map(|_| rng.normal()).collect();
        let (errors, quad, shift) = match *self {
            Dgp::Quadratic { gamma } => (Dgp::WhiteNoise.generate(rng, n), gamma, 0.0),
            Dgp::CoefficientBreak { size } => (Dgp::WhiteNoise.generate(rng, n), 0.0, size),
            Dgp::Ar1 { .. } | Dgp::Garch { .. } => (self.generate(rng, n), 0.0, 0.0),
            _ => (Dgp::WhiteNoise.generate(rng, n), 0.0, 0.0),
        };
        let slope = if matches!(self, Dgp::Quadratic { .. }) { 1.0 } else { 0.5 };
        let y = (0..n)
            .map(|t| {
                let brk = if t >= n / 2 { shift } else { 0.0 };
                1.0 + brk + slope * x[t] + quad * x[t] * x[t] + errors[t]
            })
            .collect();
        (y, x)
    }
}

impl fmt::Display for Dgp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dgp::WhiteNoise => write!(f, "white_noise"),
            Dgp::RandomWalk => write!(f, "random_walk"),
            Dgp::Ar1 { rho } => write!(f, "ar1({rho})"),
            Dgp::CointegratedPair { theta, speed } => write!(f, "cointegrated_pair({theta},{speed})"),
            Dgp::CoefficientBreak { size } => write!(f, "coefficient_break({size})"),
            Dgp::Quadratic { gamma } => write!(f, "quadratic({gamma})"),
            Dgp::Garch { omega, alpha, beta } => write!(f, "garch({omega},{alpha},{beta})"),
        }
    }
}

impl FromStr for Dgp {
    type Err = Error;

    /// `name` or `name(a,b,..)`; omitted parameters take defaults.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, args) = match s.find('(') {
            Some(i) if s.ends_with(')') => (&s[..i], &s[i + 1..s.len() - 1]),
            Some(_) => return Err(Error::UnknownDgp(s.to_string())),
            None => (s, ""),
        };
        let nums: Vec<f64> = args
            .split(',')
            .map(str::trim)
            .filter(|a| !a.is_empty())
            .map(|a| a.parse::<f64>().map_err(|_| Error::UnknownDgp(s.to_string())))
            .collect::<Result<_>>()?;
        let arg = |i: usize, default: f64| nums.get(i).copied().unwrap_or(default);
        Ok(match name {
            "white_noise" => Dgp::WhiteNoise,
            "random_walk" => Dgp::RandomWalk,
            "ar1" => Dgp::Ar1 { rho: arg(0, 0.5) },
            "cointegrated_pair" => Dgp::CointegratedPair {
                theta: arg(0, 0.8),
                speed: arg(1, -0.5),
            },
            "coefficient_break" => Dgp::CoefficientBreak { size: arg(0, 5.0) },
            "quadratic" => Dgp::Quadratic { gamma: arg(0, 0.5) },
            "garch" => Dgp::Garch {
                omega: arg(0, 0.1),
                alpha: arg(1, 0.2),
                beta: arg(2, 0.7),
            },
            _ => return Err(Error::UnknownDgp(s.to_string())),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum McTest {
    Pp,
    Adf,
    /// Bounds F test on the pair; estimate is the long-run coefficient.
    Bounds,
    /// Second-stage ECM; estimate is the adjustment coefficient.
    Ecm,
    BreuschGodfrey,
    ArchLm,
    JarqueBera,
    Reset,
    Cusum,
}

impl FromStr for McTest {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim().to_ascii_lowercase().as_str() {
            "pp" => McTest::Pp,
            "adf" => McTest::Adf,
            "bounds" => McTest::Bounds,
            "ecm" => McTest::Ecm,
            "bg" | "breusch_godfrey" => McTest::BreuschGodfrey,
            "arch" | "arch_lm" => McTest::ArchLm,
            "jb" | "jarque_bera" => McTest::JarqueBera,
            "reset" => McTest::Reset,
            "cusum" => McTest::Cusum,
            other => return Err(Error::Config(format!("unknown Monte Carlo test `{other}`"))),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Experiment {
    pub dgp: Dgp,
    pub test: McTest,
    pub nobs: usize,
    pub replications: usize,
    pub seed: u64,
    pub deterministic: Deterministic,
    /// Max lag for ADF and the ARDL lag search.
    pub max_lag: usize,
    /// Lags for Breusch-Godfrey and ARCH-LM.
    pub lags: usize,
    pub table: CriticalTable,
    /// Worker threads; `None` uses the global pool. Not serialized, since
    /// results do not depend on it.
    #[serde(skip)]
    pub threads: Option<usize>,
}

impl Experiment {
    pub fn new(dgp: Dgp, test: McTest, nobs: usize, replications: usize, seed: u64) -> Self {
        Self {
            dgp,
            test,
            nobs,
            replications,
            seed,
            deterministic: Deterministic::Constant,
            max_lag: 4,
            lags: 4,
            table: CriticalTable::PssIII,
            threads: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Distribution {
    pub mean: f64,
    pub sd: f64,
    pub q05: f64,
    pub q50: f64,
    pub q95: f64,
}

impl Distribution {
    fn of(values: &[f64]) -> Option<Self> {
        let mut v: Vec<f64> = values.iter().copied().filter(|x| x.is_finite()).collect();
        if v.is_empty() {
            return None;
        }
        v.sort_by(f64::total_cmp);
        let n = v.len() as f64;
        let mean = v.iter().sum::<f64>() / n;
        let sd = if v.len() > 1 {
            (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        let q = |p: f64| v[((p * (n - 1.0)).round() as usize).min(v.len() - 1)];
        Some(Self {
            mean,
            sd,
            q05: q(0.05),
            q50: q(0.5),
            q95: q(0.95),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McSummary {
    pub experiment: Experiment,
    pub rejections: usize,
    pub failures: usize,
    pub rejection_rate: f64,
    pub statistic: Option<Distribution>,
    pub estimate: Option<Distribution>,
    /// Per-replication estimates where available, in replication order.
    pub estimates: Vec<f64>,
}

impl McSummary {
    /// Share of all replications whose estimate lies strictly inside `(lo, hi)`.
    pub fn share_within(&self, lo: f64, hi: f64) -> f64 {
        let hits = self.estimates.iter().filter(|e| **e > lo && **e < hi).count();
        hits as f64 / self.experiment.replications as f64
    }
}

struct Draw {
    statistic: f64,
    reject: bool,
    estimate: Option<f64>,
}

fn start_date() -> NaiveDate {
    NaiveDate::from_ymd_opt(2000, 1, 1).expect("valid date")
}

fn regression_fit(dgp: &Dgp, rng: &mut SimRng, n: usize) -> Result<OlsFit> {
    let (y, x) = dgp.generate_regression(rng, n);
    ols::fit(&DesignMatrix::with_intercept(vec![("x".into(), x)], n)?, &y)
}

fn one_replication(exp: &Experiment, rep: usize) -> Result<Draw> {
    let mut rng = SimRng::for_replication(exp.seed, rep as u64);
    let n = exp.nobs;
    let dgp = &exp.dgp;
    match exp.test {
        McTest::Pp | McTest::Adf => {
            let s = Series::from_values("sim", start_date(), dgp.generate(&mut rng, n))?;
            let r = if exp.test == McTest::Pp {
                unit_root::pp_test(&s, exp.deterministic, None)?
            } else {
                unit_root::adf_test(&s, exp.deterministic, exp.max_lag)?
            };
            Ok(Draw {
                statistic: r.statistic,
                reject: r.decisions.reject_5pct,
                estimate: None,
            })
        }
        McTest::Bounds | McTest::Ecm => {
            let (y, x) = dgp.generate_pair(&mut rng, n);
            let ds = Dataset::from_columns(start_date(), vec![("y", y), ("x", x)])?;
            let spec = ardl::select_lags_with(&ds, exp.max_lag, false)?.spec;
            let fit = ardl::fit_conditional_ecm(&ds, &spec)?;
            if exp.test == McTest::Bounds {
                let b = ardl::bounds_f_test(&fit, 0.05, exp.table)?;
                let theta = ardl::long_run(&fit).ok().and_then(|lr| lr.theta("x"));
                Ok(Draw {
                    statistic: b.f_statistic,
                    reject: b.conclusion == ardl::Conclusion::Cointegration,
                    estimate: theta,
                })
            } else {
                let e = ardl::fit_ecm(&fit)?;
                Ok(Draw {
                    statistic: e.theta_t.unwrap_or(f64::NAN),
                    reject: e.validated,
                    estimate: e.theta,
                })
            }
        }
        McTest::BreuschGodfrey => {
            let r = diagnostics::breusch_godfrey(&regression_fit(dgp, &mut rng, n)?, exp.lags)?;
            Ok(Draw { statistic: r.statistic, reject: r.reject, estimate: None })
        }
        McTest::ArchLm => {
            let r = diagnostics::arch_lm(&regression_fit(dgp, &mut rng, n)?.residuals, exp.lags)?;
            Ok(Draw { statistic: r.statistic, reject: r.reject, estimate: None })
        }
        McTest::JarqueBera => {
            let r = diagnostics::jarque_bera(&regression_fit(dgp, &mut rng, n)?.residuals)?;
            Ok(Draw { statistic: r.test.statistic, reject: r.test.reject, estimate: None })
        }
        McTest::Reset => {
            let r = diagnostics::ramsey_reset(&regression_fit(dgp, &mut rng, n)?, &[2, 3])?;
            Ok(Draw { statistic: r.test.statistic, reject: r.test.reject, estimate: None })
        }
        McTest::Cusum => {
            let c = diagnostics::cusum(&regression_fit(dgp, &mut rng, n)?)?;
            let peak = c
                .path
                .iter()
                .zip(&c.bounds)
                .map(|(p, b)| p.abs() / b)
                .fold(0.0, f64::max);
            Ok(Draw { statistic: peak, reject: !c.stable, estimate: None })
        }
    }
}

pub fn run(exp: &Experiment) -> Result<McSummary> {
    if exp.replications == 0 {
        return Err(Error::Config("replications must be at least 1".into()));
    }
    let work = || -> Vec<Option<Draw>> {
        (0..exp.replications)
            .into_par_iter()
            .map(|rep| one_replication(exp, rep).ok())
            .collect()
    };
    let draws = match exp.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?
            .install(work),
        None => work(),
    };
    let failures = draws.iter().filter(|d| d.is_none()).count();
    let ok: Vec<&Draw> = draws.iter().flatten().collect();
    let rejections = ok.iter().filter(|d| d.reject).count();
    let stats: Vec<f64> = ok.iter().map(|d| d.statistic).collect();
    let estimates: Vec<f64> = ok.iter().filter_map(|d| d.estimate).collect();
    Ok(McSummary {
        experiment: exp.clone(),
        rejections,
        failures,
        rejection_rate: rejections as f64 / exp.replications as f64,
        statistic: Distribution::of(&stats),
        estimate: Distribution::of(&estimates),
        estimates,
    })
}
