use rand::Rng;

use super::params::LoadParams;

/// Per-load availability rules.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AvailabilityRules {
    /// Lockout length `K` in rounds.
    pub lockout_rounds: u32,
    /// Per-load, per-round probability of a manual override.
    pub override_probability: f64,
    /// Rounds a triggered manual override lasts.
    pub override_duration: u32,
}

/// Which rule set a load's availability in the current round.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Availability {
    Lockout,
    TooCold,
    TooHot,
    ManualOverride,
    Available,
}

/// Online state of the fleet between rounds.
///
/// At the start of round `t`, `theta` holds `theta_{t-1}` and `mean_theta`
/// holds the average of `theta_1..theta_{t-1}`; `p`, `p_tilde` and `u` are
/// those of round `t` once [`FleetState::availability_update`] has run.
#[derive(Debug, Clone, PartialEq)]
pub struct FleetState {
    /// Completed rounds.
    pub round: u64,
    pub theta: Vec<f64>,
    pub mean_theta: Vec<f64>,
    pub lockout_remaining: Vec<u32>,
    pub override_remaining: Vec<u32>,
    pub u: Vec<bool>,
    pub p: Vec<f64>,
    pub p_tilde: Vec<f64>,
    pub status: Vec<Availability>,
    last_effective: Vec<f64>,
}

impl FleetState {
    /// Every load starts at its desired temperature, available and idle.
    pub fn new(loads: &[LoadParams]) -> Self {
        let n = loads.len();
        Self {
            round: 0,
            theta: loads.iter().map(|l| l.theta_d).collect(),
            mean_theta: vec![0.0; n],
            lockout_remaining: vec![0; n],
            override_remaining: vec![0; n],
            u: vec![false; n],
            p: vec![0.0; n],
            p_tilde: vec![0.0; n],
            status: vec![Availability::Available; n],
            last_effective: vec![0.0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }

    /// Effective draw `p(i) x(i) + p_tilde(i) u(i)` for a dispatch `x`.
    pub fn effective_power(&self, dispatch: &[f64]) -> Vec<f64> {
        self.p
            .iter()
            .zip(dispatch)
            .zip(self.p_tilde.iter().zip(&self.u))
            .map(|((p, x), (pt, &u))| p * x + if u { *pt } else { 0.0 })
            .collect()
    }

    /// `p_tilde^T u`.
    pub fn uncontrollable_power(&self) -> f64 {
        self.p_tilde
            .iter()
            .zip(&self.u)
            .filter(|(_, &u)| u)
            .map(|(p, _)| p)
            .sum()
    }

    /// Sets `p_t`, `p_tilde_t` and `u_t` from `theta_{t-1}`, the lockout
    /// counters and the manual-override draws, checking per load in order:
    /// lockout, too cold, too hot, manual override, available.
    ///
    /// When the override probability is positive, one uniform draw per load
    /// is taken from `rng` every round regardless of which rule applies.
    pub fn availability_update<R: Rng + ?Sized>(
        &mut self,
        loads: &[LoadParams],
        rules: &AvailabilityRules,
        rng: &mut R,
    ) {
        for (i, load) in loads.iter().enumerate() {
            let triggered =
                rules.override_probability > 0.0 && rng.random::<f64>() < rules.override_probability;
            let status = if self.lockout_remaining[i] > 0 {
                self.lockout_remaining[i] -= 1;
                Availability::Lockout
            } else if self.theta[i] < load.theta_min {
                Availability::TooCold
            } else if self.theta[i] > load.theta_max {
                Availability::TooHot
            } else {
                if triggered {
                    self.override_remaining[i] = rules.override_duration;
                }
                if self.override_remaining[i] > 0 {
                    self.override_remaining[i] -= 1;
                    Availability::ManualOverride
                } else {
                    Availability::Available
                }
            };
            let (p, u, p_tilde) = match status {
                Availability::Lockout | Availability::TooCold => (0.0, false, 0.0),
                Availability::TooHot | Availability::ManualOverride => (0.0, true, load.p_rated),
                Availability::Available => (load.p_rated, false, 0.0),
            };
            self.p[i] = p;
            self.u[i] = u;
            self.p_tilde[i] = p_tilde;
            self.status[i] = status;
        }
    }

    /// Closes round `t`: arms the lockout of every load whose effective power
    /// went from positive to zero, folds `theta_t` into the running mean and
    /// stores it as the current temperature.
    pub fn advance(&mut self, theta_next: Vec<f64>, effective: &[f64], lockout_rounds: u32) {
        for (i, &e) in effective.iter().enumerate() {
            if self.last_effective[i] > 0.0 && e == 0.0 {
                self.lockout_remaining[i] = lockout_rounds;
            }
            self.last_effective[i] = e;
        }
        self.round += 1;
        let t = self.round as f64;
        for (m, th) in self.mean_theta.iter_mut().zip(&theta_next) {
            *m = ((t - 1.0) / t) * *m + th / t;
        }
        self.theta = theta_next;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng_from_seed;

    fn load() -> LoadParams {
        LoadParams { r: 2.0, c: 2.0, theta_d: 22.0, theta_min: 21.5, theta_max: 22.5, p_rated: 5.0 }
    }

    fn rules(k: u32) -> AvailabilityRules {
        AvailabilityRules { lockout_rounds: k, override_probability: 0.0, override_duration: 1 }
    }

    #[test]
    fn shutdown_locks_out_for_exactly_k_rounds() {
        let loads = [load()];
        let mut state = FleetState::new(&loads);
        let mut rng = rng_from_seed(0);
        let k = 5;
        // Round 1: on.
        state.availability_update(&loads, &rules(k), &mut rng);
        assert_eq!(state.status[0], Availability::Available);
        let e = state.effective_power(&[1.0]);
        state.advance(vec![22.0], &e, k);
        // Round 2: turned off.
        state.availability_update(&loads, &rules(k), &mut rng);
        let e = state.effective_power(&[0.0]);
        state.advance(vec![22.0], &e, k);
        for _ in 0..k {
            state.availability_update(&loads, &rules(k), &mut rng);
            assert_eq!(state.status[0], Availability::Lockout);
            assert_eq!(state.p[0], 0.0);
            assert!(!state.u[0]);
            let e = state.effective_power(&[1.0]);
            assert_eq!(e[0], 0.0);
            state.advance(vec![22.0], &e, k);
        }
        state.availability_update(&loads, &rules(k), &mut rng);
        assert_eq!(state.status[0], Availability::Available);
        assert_eq!(state.p[0], 5.0);
    }

    #[test]
    fn lockout_beats_deadband_high() {
        let loads = [load()];
        let mut state = FleetState::new(&loads);
        state.lockout_remaining[0] = 2;
        state.theta[0] = 30.0;
        state.availability_update(&loads, &rules(5), &mut rng_from_seed(0));
        assert_eq!(state.status[0], Availability::Lockout);
        assert!(!state.u[0]);
        assert_eq!(state.effective_power(&[1.0])[0], 0.0);
    }

    #[test]
    fn too_hot_forces_override() {
        let loads = [load()];
        let mut state = FleetState::new(&loads);
        state.theta[0] = loads[0].theta_max + 0.1;
        state.availability_update(&loads, &rules(5), &mut rng_from_seed(0));
        assert!(state.u[0]);
        assert_eq!(state.p[0], 0.0);
        assert_eq!(state.p_tilde[0], 5.0);
        assert_eq!(state.uncontrollable_power(), 5.0);
    }

    #[test]
    fn too_cold_is_unavailable_and_off() {
        let loads = [load()];
        let mut state = FleetState::new(&loads);
        state.theta[0] = loads[0].theta_min - 0.1;
        state.availability_update(&loads, &rules(5), &mut rng_from_seed(0));
        assert_eq!(state.status[0], Availability::TooCold);
        assert_eq!(state.effective_power(&[1.0])[0], 0.0);
    }

    #[test]
    fn available_load_follows_dispatch() {
        let loads = [load()];
        let mut state = FleetState::new(&loads);
        state.availability_update(&loads, &rules(5), &mut rng_from_seed(0));
        assert_eq!(state.p[0], 5.0);
        assert!(!state.u[0]);
        assert_eq!(state.effective_power(&[1.0])[0], 5.0);
        assert_eq!(state.effective_power(&[0.0])[0], 0.0);
    }

    #[test]
    fn certain_manual_override_with_duration() {
        let loads = [load()];
        let mut state = FleetState::new(&loads);
        let r = AvailabilityRules { lockout_rounds: 5, override_probability: 1.0, override_duration: 3 };
        state.availability_update(&loads, &r, &mut rng_from_seed(0));
        assert_eq!(state.status[0], Availability::ManualOverride);
        assert_eq!(state.p[0], 0.0);
        assert!(state.u[0]);
        assert_eq!(state.override_remaining[0], 2);
    }

    #[test]
    fn running_mean_recursion() {
        let loads = [load(), load()];
        let mut state = FleetState::new(&loads);
        let temps = [[21.0, 23.0], [22.0, 24.0], [25.0, 20.0]];
        for (k, th) in temps.iter().enumerate() {
            state.advance(th.to_vec(), &[0.0, 0.0], 5);
            for i in 0..2 {
                let mean = temps[..=k].iter().map(|t| t[i]).sum::<f64>() / (k + 1) as f64;
                assert!((state.mean_theta[i] - mean).abs() < 1e-12);
            }
        }
    }
}
