//! Code distance, device size and runtime for a surface-code baseline
//! architecture and an active-volume photonic architecture.

use serde::Serialize;

/// Smallest code distance allowed.
pub const D_MIN: u32 = 3;

/// Failed runs are repeated, so the mean successful runtime is `10T/9`.
const RETRY_FACTOR: f64 = 10.0 / 9.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BaselineParams {
    /// Seconds per code cycle.
    pub code_cycle_time: f64,
    pub failure_budget: f64,
    pub t_per_toffoli: f64,
}

impl BaselineParams {
    pub const SUPERCONDUCTING: Self = Self::with_cycle(1e-6);
    pub const TRAPPED_ION: Self = Self::with_cycle(1e-3);

    pub const fn with_cycle(code_cycle_time: f64) -> Self {
        Self {
            code_cycle_time,
            failure_budget: 0.05,
            t_per_toffoli: 4.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AVParams {
    /// Resource states per second per interleaving module.
    pub r_im: f64,
    /// Fiber delay in seconds.
    pub delay: f64,
    /// Meters per second.
    pub c_fiber: f64,
    pub failure_budget: f64,
}

impl AVParams {
    pub const fn with_delay(delay: f64) -> Self {
        Self {
            r_im: 1e9,
            delay,
            c_fiber: 2e8,
            failure_budget: 0.05,
        }
    }

    /// Fiber length in meters.
    pub fn delay_length(&self) -> f64 {
        self.delay * self.c_fiber
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PhysicalEstimate {
    pub distance: u32,
    /// Physical qubits (baseline) or interleaving modules (active volume).
    pub device_size: f64,
    /// Mean runtime of a successful computation, seconds.
    pub runtime_avg: f64,
}

/// Smallest `d ≥ D_MIN` with `10^(−d/2)·V ≤ budget`.
pub fn solve_distance(volume: f64, budget: f64) -> u32 {
    let mut d = (2.0 * (volume / budget).log10()).ceil().max(D_MIN as f64) as u32;
    // Guard against log10 rounding either way.
    while d > D_MIN && 10f64.powf(-((d - 1) as f64) / 2.0) * volume <= budget {
        d -= 1;
    }
    while 10f64.powf(-(d as f64) / 2.0) * volume > budget {
        d += 1;
    }
    d
}

pub fn baseline_estimate(n_q: u64, toffoli: f64, p: &BaselineParams) -> PhysicalEstimate {
    let n_t = p.t_per_toffoli * toffoli;
    let nq = n_q as f64;
    let d = solve_distance(2.0 * nq * n_t, p.failure_budget);
    let df = d as f64;
    PhysicalEstimate {
        distance: d,
        device_size: 2.0 * nq * df * df,
        runtime_avg: RETRY_FACTOR * df * n_t * p.code_cycle_time,
    }
}

pub fn av_estimate(b_av: f64, n_q: u64, p: &AVParams) -> PhysicalEstimate {
    let v_a = 2.0 * b_av;
    let d = solve_distance(v_a, p.failure_budget);
    let df = d as f64;
    let qubits = 2.0 * n_q as f64;
    let n_im = (qubits * df * df * p.c_fiber / (p.r_im * p.delay_length())).ceil();
    PhysicalEstimate {
        distance: d,
        device_size: n_im,
        runtime_avg: RETRY_FACTOR * v_a * df.powi(3) / (n_im * p.r_im),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TimeUnit {
    S,
    Min,
    Days,
}

impl TimeUnit {
    pub fn seconds(self) -> f64 {
        match self {
            TimeUnit::S => 1.0,
            TimeUnit::Min => 60.0,
            TimeUnit::Days => 86400.0,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            TimeUnit::S => "s",
            TimeUnit::Min => "min",
            TimeUnit::Days => "days",
        }
    }
}

/// Display unit: seconds under a minute, minutes under a day, else days.
pub fn display_unit(seconds: f64) -> TimeUnit {
    if seconds < 60.0 {
        TimeUnit::S
    } else if seconds < 86400.0 {
        TimeUnit::Min
    } else {
        TimeUnit::Days
    }
}

/// Runtime in its display unit, one decimal.
pub fn format_runtime(seconds: f64) -> String {
    let u = display_unit(seconds);
    format!("{:.1} {}", seconds / u.seconds(), u.label())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distance_boundaries() {
        assert_eq!(solve_distance(0.05, 0.05), D_MIN);
        assert_eq!(solve_distance(1e-9, 0.05), D_MIN);
        // 10^(-d/2)·5e10 ≤ 0.05 ⇔ d ≥ 24.
        assert_eq!(solve_distance(5e10, 0.05), 24);
        assert_eq!(solve_distance(5.0001e10, 0.05), 25);
    }

    #[test]
    fn distance_monotone() {
        let mut last = 0;
        for e in 0..200 {
            let d = solve_distance(10f64.powf(e as f64 / 10.0), 0.05);
            assert!(d >= last);
            last = d;
        }
    }

    #[test]
    fn cycle_time_scales_runtime() {
        let a = baseline_estimate(2126, 2.05e6, &BaselineParams::SUPERCONDUCTING);
        let b = baseline_estimate(2126, 2.05e6, &BaselineParams::TRAPPED_ION);
        assert_eq!(a.distance, b.distance);
        assert!((b.runtime_avg / a.runtime_avg - 1000.0).abs() < 1e-9);
    }

    #[test]
    fn modules_scale_with_delay() {
        let a = av_estimate(9.5e8, 2126, &AVParams::with_delay(1e-6));
        let b = av_estimate(9.5e8, 2126, &AVParams::with_delay(1e-5));
        assert_eq!(a.device_size, 2058.0);
        assert_eq!(b.device_size, 206.0);
    }

    #[test]
    fn runtime_display() {
        assert_eq!(format_runtime(10.94), "10.9 s");
        assert_eq!(format_runtime(218.7), "3.6 min");
        assert_eq!(format_runtime(3846.0), "64.1 min");
        assert_eq!(format_runtime(2.5 * 86400.0), "2.5 days");
    }
}
