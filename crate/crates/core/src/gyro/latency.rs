use alloc::vec::Vec;

use super::GyroStream;
use crate::math;
use crate::{Error, Result};

/// Scalar signal sampled once per frame. `values[k]` describes the interval
/// that ends at `start + k * period`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameSeries {
    pub start: f64,
    pub period: f64,
    pub values: Vec<f64>,
}

impl FrameSeries {
    pub fn time(&self, k: usize) -> f64 {
        self.start + k as f64 * self.period
    }
}

/// Camera-to-gyro latency from a rotation sweep.
///
/// For every lag `l` frame periods in `[-max_lag, max_lag]`, the gyro rate
/// magnitude is averaged over each frame interval shifted by `l` periods onto
/// the gyro clock, and its normalized cross-correlation with the mean flow
/// magnitude is computed. The lag with the highest correlation is returned in
/// seconds (gyro clock minus camera clock); ties prefer the smaller `|l|`.
pub fn estimate_latency(flow: &FrameSeries, stream: &GyroStream, max_lag: f64) -> Result<f64> {
    if !(flow.period > 0.0) || flow.values.len() < 3 {
        return Err(Error::InsufficientData("flow series needs a positive period and 3 samples"));
    }
    let (g0, g1) = stream.span().ok_or(Error::InsufficientData("empty gyro stream"))?;
    let max_l = math::floor(max_lag / flow.period + 1e-9).max(0.0) as i64;

    let mut best: Option<(f64, i64)> = None;
    let mut lags: Vec<i64> = (-max_l..=max_l).collect();
    lags.sort_by_key(|l| (l.abs(), *l));
    for l in lags {
        let shift = l as f64 * flow.period;
        let mut f = Vec::new();
        let mut g = Vec::new();
        for (k, &v) in flow.values.iter().enumerate() {
            let b = flow.time(k) + shift;
            let a = b - flow.period;
            if a >= g0 && b <= g1 {
                f.push(v);
                g.push(stream.mean_magnitude(a, b));
            }
        }
        if f.len() < 3 {
            continue;
        }
        let Some(c) = normalized_correlation(&f, &g) else { continue };
        if best.is_none_or(|(bc, _)| c > bc) {
            best = Some((c, l));
        }
    }
    best.map(|(_, l)| l as f64 * flow.period)
        .ok_or(Error::Alignment("no lag with overlapping, non-constant series"))
}

fn normalized_correlation(a: &[f64], b: &[f64]) -> Option<f64> {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let mut sab = 0.0;
    let mut saa = 0.0;
    let mut sbb = 0.0;
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    let denom = math::sqrt(saa * sbb);
    (denom > 1e-12 * (1.0 + saa + sbb)).then(|| sab / denom)
}
