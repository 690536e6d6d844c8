use super::sim::RunRecord;

/// Table-style tracking metrics of one run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackingMetrics {
    /// `sqrt(mean (s_t - c_t)^2)`, kW.
    pub rmse: f64,
    /// RMSE over the average setpoint.
    pub relative_rmse: f64,
    /// `mean |s_t - c_t| / |s_t|`.
    pub mean_relative_tracking_error: f64,
    /// `mean |c_binary - c_relaxed| / c_relaxed` within the run.
    pub mean_randomization_gap: f64,
    pub mean_setpoint: f64,
}

pub fn rmse(setpoint: &[f64], consumption: &[f64]) -> f64 {
    assert_eq!(setpoint.len(), consumption.len());
    if setpoint.is_empty() {
        return 0.0;
    }
    let sq: f64 = setpoint
        .iter()
        .zip(consumption)
        .map(|(s, c)| (s - c).powi(2))
        .sum();
    (sq / setpoint.len() as f64).sqrt()
}

pub fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.iter().sum::<f64>() / values.len() as f64
}

pub fn relative_rmse(setpoint: &[f64], consumption: &[f64]) -> f64 {
    rmse(setpoint, consumption) / mean(setpoint)
}

pub fn mean_relative_tracking_error(setpoint: &[f64], consumption: &[f64]) -> f64 {
    let terms: Vec<f64> = setpoint
        .iter()
        .zip(consumption)
        .map(|(s, c)| relative_gap(*c, *s))
        .collect();
    mean(&terms)
}

/// `mean_t |a_t - b_t| / |b_t|`; a round where both are zero counts as zero.
pub fn consumption_gap(a: &[f64], reference: &[f64]) -> f64 {
    assert_eq!(a.len(), reference.len());
    let terms: Vec<f64> = a.iter().zip(reference).map(|(x, r)| relative_gap(*x, *r)).collect();
    mean(&terms)
}

fn relative_gap(x: f64, reference: f64) -> f64 {
    let d = (x - reference).abs();
    if d == 0.0 {
        0.0
    } else {
        d / reference.abs()
    }
}

pub fn tracking_metrics(record: &RunRecord) -> TrackingMetrics {
    let s: Vec<f64> = record.rounds.iter().map(|r| r.setpoint).collect();
    let c: Vec<f64> = record.rounds.iter().map(|r| r.consumption).collect();
    let cb: Vec<f64> = record.rounds.iter().map(|r| r.consumption_binary).collect();
    let cr: Vec<f64> = record.rounds.iter().map(|r| r.consumption_relaxed).collect();
    TrackingMetrics {
        rmse: rmse(&s, &c),
        relative_rmse: relative_rmse(&s, &c),
        mean_relative_tracking_error: mean_relative_tracking_error(&s, &c),
        mean_randomization_gap: consumption_gap(&cb, &cr),
        mean_setpoint: mean(&s),
    }
}

/// Counts load-rounds breaking the lockout rule in recorded histories: after
/// every positive-to-zero transition of a load's effective power, the next
/// `k` rounds must show zero power and no override.
pub fn lockout_violations(effective: &[Vec<f64>], overrides: &[Vec<bool>], k: u32) -> usize {
    let rounds = effective.len();
    let n = effective.first().map_or(0, Vec::len);
    let mut violations = 0;
    for i in 0..n {
        for t in 1..rounds {
            if effective[t - 1][i] > 0.0 && effective[t][i] == 0.0 {
                let end = (t + k as usize).min(rounds - 1);
                for s in t + 1..=end {
                    if effective[s][i] != 0.0 || overrides[s][i] {
                        violations += 1;
                    }
                }
            }
        }
    }
    violations
}
