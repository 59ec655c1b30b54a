//! Tail probabilities for the reference distributions used by the tests.

use statrs::distribution::{ChiSquared, ContinuousCDF, FisherSnedecor, Normal, StudentsT};

/// `P(|T| > |t|)` for Student-t with `df` degrees of freedom; `df = inf` gives the normal limit.
pub fn t_two_sided(t: f64, df: f64) -> f64 {
    if t.is_nan() {
        return f64::NAN;
    }
    if t.is_infinite() {
        return 0.0;
    }
    let tail = if df.is_infinite() {
        Normal::standard().sf(t.abs())
    } else {
        StudentsT::new(0.0, 1.0, df).expect("df > 0").sf(t.abs())
    };
    (2.0 * tail).clamp(0.0, 1.0)
}

pub fn chi2_sf(x: f64, df: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    if x.is_infinite() {
        return 0.0;
    }
    ChiSquared::new(df).expect("df > 0").sf(x).clamp(0.0, 1.0)
}

pub fn f_sf(x: f64, df1: f64, df2: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    if x.is_infinite() {
        return 0.0;
    }
    FisherSnedecor::new(df1, df2).expect("df > 0").sf(x).clamp(0.0, 1.0)
}

pub fn f_quantile(p: f64, df1: f64, df2: f64) -> f64 {
    FisherSnedecor::new(df1, df2).expect("df > 0").inverse_cdf(p)
}
