//! Euler Monte Carlo for both models, used as an independent check on the
//! transform pricer.
//!
//! The variance follows full-truncation Euler: `V⁺ = max(V, 0)` appears in
//! both drift and diffusion while the stored `V` may go negative. Jumps in a
//! step are applied at the step end. Each path (or antithetic pair) owns one
//! ChaCha8 stream selected by its index, so results do not depend on how
//! paths are spread over threads.

mod stats;

use alloc::vec::Vec;

use num_complex::Complex64;
#[cfg(not(feature = "std"))]
use num_traits::Float;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};
#[cfg(feature = "parallel")]
use rayon::prelude::*;

pub use stats::Moments;

use crate::error::{Error, Result};
use crate::linalg::Cholesky;
use crate::model::{validate, CirParams, JumpParams, MarketState, SpreadContract, SpreadModel};

/// Paths (or antithetic pairs) per accumulation chunk. Fixed so that the
/// summation order is the same for any thread count.
const CHUNK: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McConfig {
    pub n_paths: usize,
    /// Time steps per year; a run uses `ceil(n_steps · T)` steps.
    pub n_steps: usize,
    pub seed: u64,
    pub antithetic: bool,
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            n_paths: 1_000_000,
            n_steps: 2000,
            seed: 20_100_611,
            antithetic: false,
        }
    }
}

impl McConfig {
    pub fn check(&self) -> Result<()> {
        if self.n_paths < 2 {
            return Err(Error::InvalidMcConfig("n_paths must be at least 2"));
        }
        if self.n_steps < 1 {
            return Err(Error::InvalidMcConfig("n_steps must be at least 1"));
        }
        Ok(())
    }

    pub fn steps_for(&self, maturity: f64) -> usize {
        ((self.n_steps as f64 * maturity).ceil() as usize).max(1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McResult {
    pub estimate: f64,
    pub std_error: f64,
    pub n_paths: usize,
    /// Wall time, when a clock is available.
    pub elapsed_secs: Option<f64>,
    /// Share of variance updates that went negative and were truncated.
    pub floored_fraction: f64,
}

/// Terminal log-prices and (truncated) variances of one path. Under the
/// proportional model both variance entries are the common variance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TerminalState {
    pub log_price: [f64; 2],
    pub variance: [f64; 2],
}

/// `E[e^{iu·(X_τ - X_0)}]` estimate with per-component standard errors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmpiricalCf {
    pub value: Complex64,
    pub std_error: [f64; 2],
}

/// A batch of simulated terminal states.
///
/// With antithetic sampling, entries `2p` and `2p + 1` form pair `p` and
/// every estimator averages over pairs first.
#[derive(Debug, Clone, PartialEq)]
pub struct Simulation {
    pub terminal: Vec<TerminalState>,
    pub antithetic: bool,
    pub steps: usize,
    pub log_spot: [f64; 2],
    pub floored_fraction: f64,
}

impl Simulation {
    fn group(&self) -> usize {
        if self.antithetic {
            2
        } else {
            1
        }
    }

    /// Order-fixed moments of `f` averaged within each path group.
    fn moments<const K: usize, F>(&self, f: F) -> [Moments; K]
    where
        F: Fn(&TerminalState) -> [f64; K] + Sync,
    {
        let g = self.group();
        let chunk = |states: &[TerminalState]| {
            let mut m = [Moments::default(); K];
            for grp in states.chunks(g) {
                let mut acc = [0.0; K];
                for s in grp {
                    let v = f(s);
                    for k in 0..K {
                        acc[k] += v[k];
                    }
                }
                for k in 0..K {
                    m[k].push(acc[k] / grp.len() as f64);
                }
            }
            m
        };
        #[cfg(feature = "parallel")]
        let parts: Vec<[Moments; K]> = self.terminal.par_chunks(CHUNK * g).map(chunk).collect();
        #[cfg(not(feature = "parallel"))]
        let parts: Vec<[Moments; K]> = self.terminal.chunks(CHUNK * g).map(chunk).collect();

        let mut total = [Moments::default(); K];
        for p in &parts {
            for k in 0..K {
                total[k].merge(&p[k]);
            }
        }
        total
    }

    /// Discounted mean payoff of the spread call.
    pub fn price(&self, contract: &SpreadContract, r: f64) -> McResult {
        let [m] = self.moments(|s| [contract.payoff(s.log_price[0].exp(), s.log_price[1].exp())]);
        let discount = (-r * contract.maturity).exp();
        McResult {
            estimate: discount * m.mean,
            std_error: discount * m.std_error(),
            n_paths: self.terminal.len(),
            elapsed_secs: None,
            floored_fraction: self.floored_fraction,
        }
    }

    pub fn empirical_cf(&self, u: [f64; 2]) -> EmpiricalCf {
        let x0 = self.log_spot;
        let [re, im] = self.moments(|s| {
            let phase = u[0] * (s.log_price[0] - x0[0]) + u[1] * (s.log_price[1] - x0[1]);
            [phase.cos(), phase.sin()]
        });
        EmpiricalCf {
            value: Complex64::new(re.mean, im.mean),
            std_error: [re.std_error(), im.std_error()],
        }
    }

    /// Sample mean and standard error of the terminal variance of `asset`.
    pub fn variance_mean(&self, asset: usize) -> (f64, f64) {
        let [m] = self.moments(|s| [s.variance[asset]]);
        (m.mean, m.std_error())
    }
}

enum VarianceDrivers {
    /// `(W_S1, W_S2, W_V)`.
    Common { cir: CirParams, chol: Cholesky<3> },
    /// `(W_S1, W_S2, W_V1, W_V2)`.
    Separate { cir: [CirParams; 2], chol: Cholesky<4> },
}

struct JumpSampler {
    clock: Poisson<f64>,
    k_bar: [f64; 2],
    chol: [[f64; 2]; 2],
}

struct Dynamics {
    sigma: [f64; 2],
    drivers: VarianceDrivers,
    jumps: Option<JumpSampler>,
    /// `r - λ k̄`, added once at maturity.
    drift: [f64; 2],
    dt: f64,
}

#[derive(Clone, Copy)]
struct PathState {
    x: [f64; 2],
    v: [f64; 2],
}

impl Dynamics {
    fn new(model: &SpreadModel, r: f64, dt: f64) -> Result<Self> {
        validate(model).into_result()?;
        let drivers = match model {
            SpreadModel::Proportional(m) => VarianceDrivers::Common {
                cir: m.cir,
                chol: Cholesky::factor(&m.driver_correlation())?,
            },
            SpreadModel::Independent(m) => VarianceDrivers::Separate {
                cir: m.cir,
                chol: Cholesky::factor(&m.driver_correlation())?,
            },
        };
        let j: &JumpParams = model.jumps();
        let jumps = if j.lambda > 0.0 {
            let clock = Poisson::new(j.lambda * dt).map_err(|_| Error::InvalidMcConfig("jump intensity"))?;
            Some(JumpSampler {
                clock,
                k_bar: j.k_bar,
                chol: Cholesky::factor(&j.jump_cov)?.lower,
            })
        } else {
            None
        };
        Ok(Self {
            sigma: model.sigma(),
            drivers,
            jumps,
            drift: [r - j.lambda * j.k_bar[0], r - j.lambda * j.k_bar[1]],
            dt,
        })
    }

    fn n_drivers(&self) -> usize {
        match self.drivers {
            VarianceDrivers::Common { .. } => 3,
            VarianceDrivers::Separate { .. } => 4,
        }
    }

    fn n_variances(&self) -> usize {
        self.n_drivers() - 2
    }

    fn initial(&self, x0: [f64; 2]) -> PathState {
        let v = match &self.drivers {
            VarianceDrivers::Common { cir, .. } => [cir.v0; 2],
            VarianceDrivers::Separate { cir, .. } => [cir[0].v0, cir[1].v0],
        };
        PathState { x: x0, v }
    }

    /// Correlated driver increments per unit `√dt`, padded to four.
    fn correlate(&self, z: &[f64; 4]) -> [f64; 4] {
        match &self.drivers {
            VarianceDrivers::Common { chol, .. } => {
                let w = chol.apply(&[z[0], z[1], z[2]]);
                [w[0], w[1], w[2], 0.0]
            }
            VarianceDrivers::Separate { chol, .. } => chol.apply(z),
        }
    }

    /// One diffusion step; returns the number of truncated variance updates.
    fn diffuse(&self, st: &mut PathState, w: &[f64; 4]) -> u64 {
        let dt = self.dt;
        let cir_step = |cir: &CirParams, v: f64, w: f64| {
            let vp = v.max(0.0);
            v + cir.kappa * (cir.v_bar - vp) * dt + cir.vol_of_vol * (vp * dt).sqrt() * w
        };
        let mut floored = 0;
        match &self.drivers {
            VarianceDrivers::Common { cir, .. } => {
                let vp = st.v[0].max(0.0);
                let sv = (vp * dt).sqrt();
                for m in 0..2 {
                    let s = self.sigma[m];
                    st.x[m] += -0.5 * s * s * vp * dt + s * sv * w[m];
                }
                let v = cir_step(cir, st.v[0], w[2]);
                floored += u64::from(v < 0.0);
                st.v = [v; 2];
            }
            VarianceDrivers::Separate { cir, .. } => {
                for m in 0..2 {
                    let vp = st.v[m].max(0.0);
                    let s = self.sigma[m];
                    st.x[m] += -0.5 * s * s * vp * dt + s * (vp * dt).sqrt() * w[m];
                    let v = cir_step(&cir[m], st.v[m], w[2 + m]);
                    floored += u64::from(v < 0.0);
                    st.v[m] = v;
                }
            }
        }
        floored
    }

    fn normals(&self, rng: &mut ChaCha8Rng) -> [f64; 4] {
        let mut z = [0.0; 4];
        for zi in z.iter_mut().take(self.n_drivers()) {
            *zi = StandardNormal.sample(rng);
        }
        z
    }

    #[allow(clippy::too_many_arguments)]
    /// Simulates stream `index`: one path, or an antithetic pair sharing
    /// the stream with negated normals and a common jump clock.
    fn run_stream(
        &self,
        seed: u64,
        index: u64,
        x0: [f64; 2],
        steps: usize,
        maturity: f64,
        pair: bool,
        out: &mut Vec<TerminalState>,
    ) -> u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index);
        let mut st = [self.initial(x0); 2];
        let lanes = if pair { 2 } else { 1 };
        let mut floored = 0;
        for _ in 0..steps {
            let z = self.normals(&mut rng);
            let w = self.correlate(&z);
            floored += self.diffuse(&mut st[0], &w);
            if pair {
                floored += self.diffuse(&mut st[1], &w.map(|v| -v));
            }
            if let Some(j) = &self.jumps {
                let n = j.clock.sample(&mut rng);
                if n > 0.0 {
                    let y: [f64; 2] = [StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng)];
                    let root_n = n.sqrt();
                    for (lane, s) in st.iter_mut().enumerate().take(lanes) {
                        let sign = if lane == 0 { 1.0 } else { -1.0 };
                        let c = &j.chol;
                        s.x[0] += n * j.k_bar[0] + sign * root_n * c[0][0] * y[0];
                        s.x[1] += n * j.k_bar[1] + sign * root_n * (c[1][0] * y[0] + c[1][1] * y[1]);
                    }
                }
            }
        }
        for s in st.iter().take(lanes) {
            out.push(TerminalState {
                log_price: [s.x[0] + self.drift[0] * maturity, s.x[1] + self.drift[1] * maturity],
                variance: [s.v[0].max(0.0), s.v[1].max(0.0)],
            });
        }
        floored
    }
}

/// Simulates terminal states at `maturity` for `cfg.n_paths` paths
/// (rounded up to even under antithetic sampling).
pub fn simulate_terminal(
    model: &SpreadModel,
    state: &MarketState,
    maturity: f64,
    cfg: &McConfig,
) -> Result<Simulation> {
    cfg.check()?;
    state.check()?;
    if !(maturity > 0.0 && maturity.is_finite()) {
        return Err(Error::InvalidContract("maturity must be positive"));
    }
    let steps = cfg.steps_for(maturity);
    let dyn_ = Dynamics::new(model, state.r, maturity / steps as f64)?;
    let x0 = state.log_spot();
    let n_streams = if cfg.antithetic {
        cfg.n_paths.div_ceil(2)
    } else {
        cfg.n_paths
    };
    let n_chunks = n_streams.div_ceil(CHUNK);
    let run_chunk = |c: usize| {
        let lo = c * CHUNK;
        let hi = (lo + CHUNK).min(n_streams);
        let mut out = Vec::with_capacity((hi - lo) * if cfg.antithetic { 2 } else { 1 });
        let mut floored = 0;
        for i in lo..hi {
            floored += dyn_.run_stream(cfg.seed, i as u64, x0, steps, maturity, cfg.antithetic, &mut out);
        }
        (out, floored)
    };
    #[cfg(feature = "parallel")]
    let parts: Vec<(Vec<TerminalState>, u64)> = (0..n_chunks).into_par_iter().map(run_chunk).collect();
    #[cfg(not(feature = "parallel"))]
    let parts: Vec<(Vec<TerminalState>, u64)> = (0..n_chunks).map(run_chunk).collect();

    let mut terminal = Vec::with_capacity(n_streams * if cfg.antithetic { 2 } else { 1 });
    let mut floored = 0u64;
    for (states, f) in parts {
        terminal.extend(states);
        floored += f;
    }
    let updates = terminal.len() as f64 * steps as f64 * dyn_.n_variances() as f64;
    Ok(Simulation {
        terminal,
        antithetic: cfg.antithetic,
        steps,
        log_spot: x0,
        floored_fraction: floored as f64 / updates,
    })
}

/// Monte Carlo price of the spread call with its standard error.
pub fn price_spread_mc(
    model: &SpreadModel,
    state: &MarketState,
    contract: &SpreadContract,
    cfg: &McConfig,
) -> Result<McResult> {
    contract.check()?;
    #[cfg(feature = "std")]
    let start = std::time::Instant::now();
    let sim = simulate_terminal(model, state, contract.maturity, cfg)?;
    #[allow(unused_mut)]
    let mut result = sim.price(contract, state.r);
    #[cfg(feature = "std")]
    {
        result.elapsed_secs = Some(start.elapsed().as_secs_f64());
    }
    Ok(result)
}

/// Empirical characteristic function of `X_τ - X_0` at real `u`.
pub fn empirical_cf(
    model: &SpreadModel,
    state: &MarketState,
    tau: f64,
    u: [f64; 2],
    cfg: &McConfig,
) -> Result<EmpiricalCf> {
    Ok(simulate_terminal(model, state, tau, cfg)?.empirical_cf(u))
}

/// As [`empirical_cf`] for several `u` on one set of paths.
pub fn empirical_cf_many(
    model: &SpreadModel,
    state: &MarketState,
    tau: f64,
    us: &[[f64; 2]],
    cfg: &McConfig,
) -> Result<Vec<EmpiricalCf>> {
    let sim = simulate_terminal(model, state, tau, cfg)?;
    Ok(us.iter().map(|&u| sim.empirical_cf(u)).collect())
}

/// Correlated per-step driver increments (unit variance), one per stream,
/// drawn exactly as the first step of [`simulate_terminal`] draws them.
/// Entries past the model's driver count are zero.
pub fn sample_driver_increments(model: &SpreadModel, n: usize, seed: u64) -> Result<Vec<[f64; 4]>> {
    let dyn_ = Dynamics::new(model, 0.0, 1.0)?;
    Ok((0..n as u64)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i);
            dyn_.correlate(&dyn_.normals(&mut rng))
        })
        .collect())
}
