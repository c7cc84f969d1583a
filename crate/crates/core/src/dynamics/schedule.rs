use crate::{Error, Result};

/// Per-step integration intervals and boundary-point masks for one rollout.
///
/// Step `t` integrates for `deltas[t]` seconds and then checks the points
/// flagged in `mask(t)`. Masks are nested prefixes of a fixed spread-out
/// ordering of the boundary points, so a dropped point never comes back.
#[derive(Debug, Clone, PartialEq)]
pub struct FidelitySchedule {
    steps: usize,
    horizon: f64,
    p: f64,
    n: usize,
    deltas: Vec<f64>,
    n_points: Vec<usize>,
    active: Vec<Vec<usize>>,
}

/// `Δ_t = horizon · [((t+1)/T)^p − (t/T)^p]` and
/// `N_t = round(n · (1 − (t/T)^p))`, with at least one point kept per step.
pub fn build_schedule(steps: usize, horizon: f64, p: f64, n: usize) -> Result<FidelitySchedule> {
    if steps == 0 {
        return Err(Error::invalid("schedule needs at least one step"));
    }
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::invalid(format!("horizon must be > 0, got {horizon}")));
    }
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::invalid(format!("exponent p must be > 0, got {p}")));
    }
    if n < 4 {
        return Err(Error::invalid(format!("need at least 4 boundary points, got {n}")));
    }
    let tf = steps as f64;
    let frac = |t: usize| (t as f64 / tf).powf(p);
    let deltas = if p == 1.0 {
        vec![horizon / tf; steps]
    } else {
        (0..steps).map(|t| horizon * (frac(t + 1) - frac(t))).collect()
    };
    let n_points: Vec<usize> = (0..steps)
        .map(|t| round_half_up(n as f64 * (1.0 - frac(t))))
        .collect();
    Ok(FidelitySchedule::assemble(steps, horizon, p, n, deltas, n_points))
}

fn round_half_up(x: f64) -> usize {
    // guard against 5.999999 style noise from powf
    (x + 0.5 + 1e-9).floor().max(0.0) as usize
}

/// Point indices ordered so that every prefix is spread around the
/// perimeter: bit-reversed order, front-center (index 0) first.
fn drop_order(n: usize) -> Vec<usize> {
    let bits = usize::BITS - (n - 1).leading_zeros();
    (0..1usize << bits)
        .map(|i| i.reverse_bits() >> (usize::BITS - bits))
        .filter(|&i| i < n)
        .collect()
}

impl FidelitySchedule {
    fn assemble(
        steps: usize,
        horizon: f64,
        p: f64,
        n: usize,
        deltas: Vec<f64>,
        n_points: Vec<usize>,
    ) -> Self {
        let order = drop_order(n);
        let active = n_points
            .iter()
            .map(|&k| {
                let mut idx = order[..k.clamp(1, n)].to_vec();
                idx.sort_unstable();
                idx
            })
            .collect();
        FidelitySchedule {
            steps,
            horizon,
            p,
            n,
            deltas,
            n_points,
            active,
        }
    }

    /// Uniform `Δ = horizon / T` with every point checked at every step.
    pub fn fixed(steps: usize, horizon: f64, n: usize) -> Result<Self> {
        build_schedule(steps, horizon, 1.0, n).map(FidelitySchedule::with_full_masks)
    }

    /// Same intervals, all points checked at every step.
    pub fn with_full_masks(self) -> Self {
        let n_points = vec![self.n; self.steps];
        FidelitySchedule::assemble(self.steps, self.horizon, self.p, self.n, self.deltas, n_points)
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn deltas(&self) -> &[f64] {
        &self.deltas
    }

    /// Unfloored point counts `N_t`.
    pub fn n_points(&self) -> &[usize] {
        &self.n_points
    }

    /// Indices of the points checked at step `t`, ascending.
    pub fn active(&self, t: usize) -> &[usize] {
        &self.active[t]
    }

    pub fn mask(&self, t: usize) -> Vec<bool> {
        let mut m = vec![false; self.n];
        for &i in &self.active[t] {
            m[i] = true;
        }
        m
    }

    /// Boundary-point evaluations one full rollout performs: `Σ_t max(N_t, 1)`.
    pub fn point_evaluations(&self) -> usize {
        self.active.iter().map(Vec::len).sum()
    }
}
