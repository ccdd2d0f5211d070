//! Exponential smoothing recursions shared by ETS and Holt-Winters.
//!
//! Smoothing parameters are mapped through a logistic so the simplex search
//! runs unconstrained; the initial level and trend are optimized with them.

use super::optim::nelder_mead;
use super::{require_len, Component, Family, ModelError};

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Config {
    pub family: Family,
    pub error: Component,
    pub trend: Component,
    pub damped: bool,
    pub seasonal: Component,
    pub period: usize,
}

const PHI_LOW: f64 = 0.8;
const PHI_HIGH: f64 = 0.98;

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Smoothing {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub phi: f64,
}

#[derive(Debug, Clone)]
pub(crate) struct SmoothingFit {
    cfg: Config,
    params: Smoothing,
    level: f64,
    slope: f64,
    season: Vec<f64>,
    n: usize,
    pub rmse: f64,
}

fn logistic(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

struct Run {
    objective: f64,
    sse: f64,
    level: f64,
    slope: f64,
    season: Vec<f64>,
}

fn combine(trend: Component, l: f64, b: f64, phi: f64) -> f64 {
    match trend {
        Component::None => l,
        Component::Additive => l + phi * b,
        Component::Multiplicative => l * b.powf(phi),
    }
}

fn run(y: &[f64], cfg: &Config, p: &Smoothing, l0: f64, b0: f64, season0: &[f64]) -> Run {
    let (mut l, mut b) = (l0, b0);
    let mut season = season0.to_vec();
    let m = season.len().max(1);
    let mut sse = 0.0;
    let mut rel_sse = 0.0;
    let mut log_abs = 0.0;
    let fail = || Run {
        objective: f64::INFINITY,
        sse: f64::INFINITY,
        level: f64::NAN,
        slope: f64::NAN,
        season: Vec::new(),
    };
    for (t, &obs) in y.iter().enumerate() {
        let base = combine(cfg.trend, l, b, p.phi);
        let s = season.get(t % m).copied().unwrap_or(0.0);
        let yhat = match cfg.seasonal {
            Component::None => base,
            Component::Additive => base + s,
            Component::Multiplicative => base * s,
        };
        if !yhat.is_finite() {
            return fail();
        }
        let e = obs - yhat;
        sse += e * e;
        if cfg.error == Component::Multiplicative {
            if yhat <= 0.0 {
                return fail();
            }
            rel_sse += (e / yhat).powi(2);
            log_abs += yhat.ln();
        }
        let deseason = match cfg.seasonal {
            Component::None => obs,
            Component::Additive => obs - s,
            Component::Multiplicative => obs / s,
        };
        let l_new = p.alpha * deseason + (1.0 - p.alpha) * base;
        b = match cfg.trend {
            Component::None => 0.0,
            Component::Additive => p.beta * (l_new - l) + (1.0 - p.beta) * p.phi * b,
            Component::Multiplicative => {
                if l <= 0.0 || l_new <= 0.0 {
                    return fail();
                }
                p.beta * (l_new / l) + (1.0 - p.beta) * b.powf(p.phi)
            }
        };
        match cfg.seasonal {
            Component::None => {}
            Component::Additive => season[t % m] = p.gamma * (obs - base) + (1.0 - p.gamma) * s,
            Component::Multiplicative => {
                if base == 0.0 {
                    return fail();
                }
                season[t % m] = p.gamma * (obs / base) + (1.0 - p.gamma) * s
            }
        }
        l = l_new;
    }
    let n = y.len() as f64;
    let objective = match cfg.error {
        Component::Multiplicative => n * rel_sse.ln() + 2.0 * log_abs,
        _ => sse,
    };
    Run {
        objective,
        sse,
        level: l,
        slope: b,
        season,
    }
}

fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

/// Heuristic starting level, trend and seasonal indices.
///
/// The level is the state before the first observation; seasonal indices
/// are the first cycle after removing the line through the first two cycle
/// means.
fn initial_states(y: &[f64], cfg: &Config) -> (f64, f64, Vec<f64>) {
    if cfg.seasonal == Component::None {
        return match cfg.trend {
            Component::Multiplicative => (y[0] * y[0] / y[1], y[1] / y[0], Vec::new()),
            Component::Additive => (2.0 * y[0] - y[1], y[1] - y[0], Vec::new()),
            Component::None => (y[0], 0.0, Vec::new()),
        };
    }
    let m = cfg.period;
    let first = mean(&y[..m]);
    let second = mean(&y[m..2 * m]);
    let mid = (m as f64 - 1.0) / 2.0;
    let (b0, trend_at): (f64, Box<dyn Fn(f64) -> f64>) = match cfg.trend {
        Component::Multiplicative => {
            let b = (second / first).powf(1.0 / m as f64);
            (b, Box::new(move |t| first * b.powf(t - mid)))
        }
        Component::Additive => {
            let b = (second - first) / m as f64;
            (b, Box::new(move |t| first + b * (t - mid)))
        }
        Component::None => (0.0, Box::new(move |_| first)),
    };
    let mut season: Vec<f64> = (0..m)
        .map(|i| match cfg.seasonal {
            Component::Multiplicative => y[i] / trend_at(i as f64),
            _ => y[i] - trend_at(i as f64),
        })
        .collect();
    let avg = mean(&season);
    for s in season.iter_mut() {
        if cfg.seasonal == Component::Multiplicative {
            *s /= avg;
        } else {
            *s -= avg;
        }
    }
    (trend_at(-1.0), b0, season)
}

pub(crate) fn fit(y: &[f64], cfg: &Config) -> Result<SmoothingFit, ModelError> {
    let family = cfg.family;
    if cfg.damped && cfg.trend == Component::None {
        return Err(ModelError::InvalidSpec("damped trend requires a trend component".into()));
    }
    let seasonal = cfg.seasonal != Component::None;
    if seasonal {
        if cfg.period < 2 {
            return Err(ModelError::InvalidSpec("seasonal period must be at least 2".into()));
        }
        require_len(family, 2 * cfg.period + 2, y.len())?;
    } else {
        require_len(family, 10, y.len())?;
    }
    let multiplicative = [cfg.error, cfg.trend, cfg.seasonal].contains(&Component::Multiplicative);
    if multiplicative && y.iter().any(|v| *v <= 0.0) {
        return Err(ModelError::NonPositiveData { family });
    }
    let has_trend = cfg.trend != Component::None;
    let (l0, b0, season0) = initial_states(y, cfg);

    let unpack = |x: &[f64]| -> (Smoothing, f64, f64) {
        let mut i = 0;
        let mut next = || {
            let v = x[i];
            i += 1;
            v
        };
        let alpha = logistic(next());
        let beta = if has_trend { logistic(next()) } else { 0.0 };
        let gamma = if seasonal { (1.0 - alpha) * logistic(next()) } else { 0.0 };
        let phi = if cfg.damped {
            PHI_LOW + (PHI_HIGH - PHI_LOW) * logistic(next())
        } else {
            1.0
        };
        let level = next();
        let slope = match cfg.trend {
            Component::None => 0.0,
            Component::Additive => next(),
            Component::Multiplicative => next().exp(),
        };
        (Smoothing { alpha, beta, gamma, phi }, level, slope)
    };
    let pack = |p: &Smoothing, level: f64, slope: f64| -> Vec<f64> {
        let mut x = vec![logit(p.alpha)];
        if has_trend {
            x.push(logit(p.beta));
        }
        if seasonal {
            x.push(logit(p.gamma / (1.0 - p.alpha)));
        }
        if cfg.damped {
            x.push(logit((p.phi - PHI_LOW) / (PHI_HIGH - PHI_LOW)));
        }
        x.push(level);
        match cfg.trend {
            Component::None => {}
            Component::Additive => x.push(slope),
            Component::Multiplicative => x.push(slope.ln()),
        }
        x
    };
    let objective = |x: &[f64]| {
        let (p, level, slope) = unpack(x);
        run(y, cfg, &p, level, slope, &season0).objective
    };

    // coarse grid over the smoothing weights at the heuristic initial states
    let betas: &[f64] = if has_trend { &[0.05, 0.2] } else { &[0.0] };
    let gammas: &[f64] = if seasonal { &[0.05, 0.3] } else { &[0.0] };
    let mut best: Option<(f64, Vec<f64>)> = None;
    for &alpha in &[0.1, 0.3, 0.5, 0.8] {
        for &beta in betas {
            for &g in gammas {
                let p = Smoothing {
                    alpha,
                    beta,
                    gamma: g * (1.0 - alpha),
                    phi: if cfg.damped { 0.9 } else { 1.0 },
                };
                let x = pack(&p, l0, b0);
                let v = objective(&x);
                if best.as_ref().is_none_or(|(bv, _)| v < *bv) {
                    best = Some((v, x));
                }
            }
        }
    }
    let (start_value, start) = best.expect("grid is non-empty");
    if !start_value.is_finite() {
        return Err(ModelError::FitFailed("no finite starting point for smoothing".into()));
    }
    let scale = {
        let m = mean(y);
        (y.iter().map(|v| (v - m).powi(2)).sum::<f64>() / y.len() as f64).sqrt().max(1e-8)
    };
    let steps: Vec<f64> = start
        .iter()
        .enumerate()
        .map(|(i, _)| {
            let n_smooth = 1 + usize::from(has_trend) + usize::from(seasonal) + usize::from(cfg.damped);
            if i < n_smooth {
                0.5
            } else if i == n_smooth {
                0.1 * scale
            } else if cfg.trend == Component::Multiplicative {
                0.01
            } else {
                0.01 * scale
            }
        })
        .collect();
    let min = nelder_mead(objective, &start, &steps);
    if !min.converged {
        return Err(ModelError::FitFailed(format!(
            "smoothing search did not converge in {} iterations",
            min.iterations
        )));
    }
    let (params, level, slope) = unpack(&min.x);
    let r = run(y, cfg, &params, level, slope, &season0);
    if !r.objective.is_finite() {
        return Err(ModelError::FitFailed("smoothing recursion diverged".into()));
    }
    Ok(SmoothingFit {
        cfg: *cfg,
        params,
        level: r.level,
        slope: r.slope,
        season: r.season,
        n: y.len(),
        rmse: (r.sse / y.len() as f64).sqrt(),
    })
}

impl SmoothingFit {
    pub fn params(&self) -> Smoothing {
        self.params
    }

    pub fn forecast(&self, h: usize) -> Vec<f64> {
        let m = self.season.len().max(1);
        let mut damp_sum = 0.0;
        let mut power = 1.0;
        (1..=h)
            .map(|k| {
                power *= self.params.phi;
                damp_sum += power;
                let base = match self.cfg.trend {
                    Component::None => self.level,
                    Component::Additive => self.level + damp_sum * self.slope,
                    Component::Multiplicative => self.level * self.slope.powf(damp_sum),
                };
                let s = self.season.get((self.n + k - 1) % m).copied().unwrap_or(0.0);
                match self.cfg.seasonal {
                    Component::None => base,
                    Component::Additive => base + s,
                    Component::Multiplicative => base * s,
                }
            })
            .collect()
    }
}
