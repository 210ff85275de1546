//! Exact straight-line fits of entropy against boundary length.

use num_rational::Ratio;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

type Q = Ratio<i64>;

fn ratio_str<S: Serializer>(r: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

fn ratios_str<S: Serializer>(rs: &[Q], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(rs.iter().map(|r| r.to_string()))
}

/// `S = α L + c` fitted by exact rational least squares.
#[derive(Clone, Debug, Serialize)]
pub struct AreaLawFit {
    /// `(L, S)` pairs.
    pub samples: Vec<(usize, usize)>,
    pub boundary_components: usize,
    #[serde(serialize_with = "ratio_str")]
    pub slope: Q,
    #[serde(serialize_with = "ratio_str")]
    pub intercept: Q,
    /// `−c / n_b`: the constant correction per boundary component.
    #[serde(serialize_with = "ratio_str")]
    pub gamma: Q,
    #[serde(serialize_with = "ratios_str")]
    pub residuals: Vec<Q>,
    pub pass: bool,
    pub reason: Option<String>,
}

impl AreaLawFit {
    pub fn slope_f64(&self) -> f64 {
        *self.slope.numer() as f64 / *self.slope.denom() as f64
    }

    pub fn intercept_f64(&self) -> f64 {
        *self.intercept.numer() as f64 / *self.intercept.denom() as f64
    }
}

/// Fits `samples` exactly. Needs three distinct boundary lengths. The fit
/// passes only when every residual is zero and `α` is a positive multiple of ½.
pub fn fit_area_law(samples: &[(usize, usize)], boundary_components: usize) -> Result<AreaLawFit> {
    let mut lengths: Vec<usize> = samples.iter().map(|s| s.0).collect();
    lengths.sort_unstable();
    lengths.dedup();
    if lengths.len() < 3 {
        return Err(Error::AreaLaw(format!("need samples at three distinct lengths, got {}", lengths.len())));
    }
    if boundary_components == 0 {
        return Err(Error::AreaLaw("boundary component count must be positive".into()));
    }
    let n = Q::from_integer(samples.len() as i64);
    let (mut sl, mut ss, mut sll, mut sls) = (Q::from(0), Q::from(0), Q::from(0), Q::from(0));
    for &(l, s) in samples {
        let (l, s) = (Q::from(l as i64), Q::from(s as i64));
        sl += l;
        ss += s;
        sll += l * l;
        sls += l * s;
    }
    let slope = (n * sls - sl * ss) / (n * sll - sl * sl);
    let intercept = (ss - slope * sl) / n;
    let residuals: Vec<Q> =
        samples.iter().map(|&(l, s)| Q::from(s as i64) - slope * Q::from(l as i64) - intercept).collect();
    let gamma = -intercept / Q::from(boundary_components as i64);

    let reason = if let Some(r) = residuals.iter().find(|r| **r != Q::from(0)) {
        Some(format!("nonzero residual {r}"))
    } else if slope <= Q::from(0) {
        Some(format!("slope {slope} is not positive"))
    } else if !(slope * Q::from(2)).is_integer() {
        Some(format!("slope {slope} is not a multiple of 1/2"))
    } else {
        None
    };
    Ok(AreaLawFit {
        samples: samples.to_vec(),
        boundary_components,
        slope,
        intercept,
        gamma,
        residuals,
        pass: reason.is_none(),
        reason,
    })
}
