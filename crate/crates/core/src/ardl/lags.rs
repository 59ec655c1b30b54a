use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{cecm_design, ArdlSpec};
use crate::error::{Error, Result};
use crate::ols;
use crate::timeseries::Dataset;

/// Outcome of the exhaustive AIC search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LagSearch {
    pub spec: ArdlSpec,
    pub aic: f64,
    pub candidates: usize,
    /// Candidates skipped because they could not be estimated.
    pub skipped: usize,
}

fn candidate_orders(max_lag: usize, k: usize) -> Vec<Vec<usize>> {
    let dep: Vec<usize> = if max_lag == 0 { vec![0] } else { (1..=max_lag).collect() };
    let mut out: Vec<Vec<usize>> = dep.into_iter().map(|p| vec![p]).collect();
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..=max_lag).map(move |q| {
                    let mut v = prefix.clone();
                    v.push(q);
                    v
                })
            })
            .collect();
    }
    out
}

fn better(a: &(f64, usize, Vec<usize>), b: &(f64, usize, Vec<usize>)) -> Ordering {
    a.0.total_cmp(&b.0)
        .then(a.1.cmp(&b.1))
        .then_with(|| a.2.cmp(&b.2))
}

/// AIC-minimising lag orders: dependent `1..=max_lag`, each regressor
/// `0..=max_lag`, every candidate estimated on rows `max_lag + 1..`.
/// Ties go to fewer parameters, then to the lexicographically smaller order vector.
pub fn select_lags(dataset: &Dataset, max_lag: usize) -> Result<LagSearch> {
    select_lags_with(dataset, max_lag, true)
}

pub fn select_lags_with(dataset: &Dataset, max_lag: usize, parallel: bool) -> Result<LagSearch> {
    let k = dataset.regressors().count();
    let required = (k + 1) * (max_lag + 1) + 5;
    if dataset.len() <= required {
        return Err(Error::DegreesOfFreedom {
            observations: dataset.len(),
            parameters: required,
        });
    }
    let candidates = candidate_orders(max_lag, k);
    let evaluate = |orders: &Vec<usize>| -> Option<(f64, usize, Vec<usize>)> {
        let spec = ArdlSpec::new(dataset, max_lag, orders[0], orders[1..].to_vec()).ok()?;
        let (design, target, _, _) = cecm_design(dataset, &spec).ok()?;
        let fit = ols::fit(&design, &target).ok()?;
        Some((fit.aic, spec.nparams(), orders.clone()))
    };
    let scored: Vec<Option<(f64, usize, Vec<usize>)>> = if parallel {
        candidates.par_iter().map(evaluate).collect()
    } else {
        candidates.iter().map(evaluate).collect()
    };
    let skipped = scored.iter().filter(|s| s.is_none()).count();
    let best = scored
        .into_iter()
        .flatten()
        .filter(|s| !s.0.is_nan())
        .min_by(better)
        .ok_or_else(|| Error::Spec("no estimable candidate in lag search".into()))?;
    let spec = ArdlSpec::new(dataset, max_lag, best.2[0], best.2[1..].to_vec())?;
    Ok(LagSearch {
        spec,
        aic: best.0,
        candidates: candidates.len(),
        skipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulate::{Dgp, SimRng};
    use chrono::NaiveDate;

    fn start() -> NaiveDate {
        NaiveDate::from_ymd_opt(2020, 1, 1).unwrap()
    }

    #[test]
    fn enumerates_full_grid() {
        assert_eq!(candidate_orders(4, 3).len(), 4 * 125);
        assert_eq!(candidate_orders(0, 3), vec![vec![0, 0, 0, 0]]);
        assert_eq!(candidate_orders(1, 1), vec![vec![1, 0], vec![1, 1]]);
    }

    #[test]
    fn tie_break_prefers_fewer_parameters_then_lexicographic() {
        let a = (1.0, 5, vec![1, 2]);
        let b = (1.0, 4, vec![2, 0]);
        let c = (1.0, 4, vec![1, 1]);
        let mut v = [a, b, c];
        v.sort_by(better);
        assert_eq!(v[0].2, vec![1, 1]);
        assert_eq!(v[1].2, vec![2, 0]);
    }

    #[test]
    fn zero_max_lag_is_single_candidate() {
        let mut rng = SimRng::for_replication(1, 0);
        let (y, x) = Dgp::CointegratedPair { theta: 0.8, speed: -0.5 }.generate_pair(&mut rng, 40);
        let ds = Dataset::from_columns(start(), vec![("y", y), ("x", x)]).unwrap();
        let s = select_lags(&ds, 0).unwrap();
        assert_eq!(s.candidates, 1);
        assert_eq!(s.spec.orders(), vec![0, 0]);
    }

    #[test]
    fn too_short_panel() {
        let ds = Dataset::from_columns(start(), vec![("y", vec![1.0; 15]), ("x", vec![2.0; 15])]).unwrap();
        assert!(matches!(select_lags(&ds, 4), Err(Error::DegreesOfFreedom { .. })));
    }

    #[test]
    fn parallel_matches_sequential() {
        let mut rng = SimRng::for_replication(9, 0);
        let n = 60;
        let (y, x) = Dgp::CointegratedPair { theta: 0.8, speed: -0.5 }.generate_pair(&mut rng, n);
        let z = Dgp::RandomWalk.generate(&mut rng, n);
        let ds = Dataset::from_columns(start(), vec![("y", y), ("x", x), ("z", z)]).unwrap();
        let a = select_lags_with(&ds, 3, true).unwrap();
        let b = select_lags_with(&ds, 3, false).unwrap();
        assert_eq!(a, b);
    }
}
