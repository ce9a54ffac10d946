//! Trajectory driver shared by the analysis routines and the CLI.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::{compile_map_with, Circuit, KickExpansion};
use crate::dynamics::MapParams;
use crate::error::{Error, Result};
use crate::noise::{noisy_iterate, JitterStream, NoiseModel};
use crate::oracle::SplitOperator;
use crate::qstate::{distribution, init_coherent, init_step, w_alive, w_alive_register, StateVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    #[default]
    Circuit,
    Oracle,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum InitialState {
    /// Coherent packet at `(x0, p0)`.
    Coherent { x0: f64, p0: f64 },
    /// Uniform over the `x < 0` half.
    Step,
}

impl InitialState {
    /// Packet at the bottom of the left well.
    pub fn left_well(params: &MapParams) -> Self {
        InitialState::Coherent { x0: -params.a, p0: 0.0 }
    }

    pub fn prepare(&self, params: &MapParams) -> Result<StateVector> {
        match *self {
            InitialState::Coherent { x0, p0 } => init_coherent(params, x0, p0),
            InitialState::Step => Ok(init_step(params)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionConfig {
    pub params: MapParams,
    pub initial: InitialState,
    pub iterations: usize,
    /// Sampling stride; samples are taken at every multiple, `t = 0` included.
    pub stride: usize,
    pub backend: Backend,
    pub expansion: KickExpansion,
    pub noise: NoiseModel,
    pub realizations: usize,
    pub record_distributions: bool,
}

impl EvolutionConfig {
    pub fn new(params: MapParams, iterations: usize) -> Self {
        Self {
            initial: InitialState::left_well(&params),
            params,
            iterations,
            stride: 1,
            backend: Backend::Circuit,
            expansion: KickExpansion::default(),
            noise: NoiseModel::noiseless(),
            realizations: 1,
            record_distributions: false,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.stride == 0 {
            return Err(Error::Config("stride must be >= 1".into()));
        }
        match self.backend {
            Backend::Circuit if self.params.n_qubits < 5 => {
                Err(Error::Config("circuit backend needs n_q >= 5".into()))
            }
            Backend::Oracle if !self.noise.is_noiseless() => {
                Err(Error::Config("gate noise needs the circuit backend".into()))
            }
            _ if self.realizations == 0 => Err(Error::Config("realizations must be >= 1".into())),
            _ => Ok(()),
        }
    }
}

/// Sampled observables of one run or an ensemble average.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trajectory {
    pub times: Vec<usize>,
    pub alive: Vec<f64>,
    /// `W(x_m)` per sample; empty unless requested.
    pub distributions: Vec<Vec<f64>>,
}

impl Trajectory {
    fn record(&mut self, t: usize, alive: f64, dist: Option<Vec<f64>>) {
        self.times.push(t);
        self.alive.push(alive);
        if let Some(d) = dist {
            self.distributions.push(d);
        }
    }

    /// Pointwise mean of runs sampled on the same schedule, summed in order.
    pub fn average(runs: &[Trajectory]) -> Trajectory {
        let Some(first) = runs.first() else { return Trajectory::default() };
        let scale = 1.0 / runs.len() as f64;
        let mut alive = vec![0.0; first.alive.len()];
        let mut distributions = vec![vec![0.0; first.distributions.first().map_or(0, Vec::len)]; first.distributions.len()];
        for run in runs {
            alive.iter_mut().zip(&run.alive).for_each(|(a, b)| *a += b);
            for (acc, d) in distributions.iter_mut().zip(&run.distributions) {
                acc.iter_mut().zip(d).for_each(|(a, b)| *a += b);
            }
        }
        alive.iter_mut().for_each(|a| *a *= scale);
        distributions.iter_mut().flatten().for_each(|a| *a *= scale);
        Trajectory { times: first.times.clone(), alive, distributions }
    }
}

fn run_oracle(cfg: &EvolutionConfig, state: &StateVector) -> Result<Trajectory> {
    let mut prop = SplitOperator::new(&cfg.params);
    let mut psi: Vec<Complex64> = state.register().to_vec();
    let mut traj = Trajectory::default();
    let dist = |psi: &[Complex64]| cfg.record_distributions.then(|| psi.iter().map(|a| a.norm_sqr()).collect());
    traj.record(0, w_alive_register(&psi), dist(&psi));
    for t in 1..=cfg.iterations {
        prop.step(&mut psi)?;
        if t % cfg.stride == 0 {
            traj.record(t, w_alive_register(&psi), dist(&psi));
        }
    }
    Ok(traj)
}

fn run_circuit(cfg: &EvolutionConfig, circuit: &Circuit, state: &StateVector, realization: u64) -> Result<Trajectory> {
    let mut state = state.clone();
    let mut stream = JitterStream::new(&cfg.noise, realization, circuit.len());
    let mut traj = Trajectory::default();
    let dist = |s: &StateVector| cfg.record_distributions.then(|| distribution(s));
    traj.record(0, w_alive(&state), dist(&state));
    for t in 1..=cfg.iterations {
        noisy_iterate(&mut state, circuit, &cfg.noise, &mut stream, (t - 1) as u64)?;
        if t % cfg.stride == 0 {
            traj.record(t, w_alive(&state), dist(&state));
        }
    }
    Ok(traj)
}

/// Every realization separately, ordered by realization id. Noiseless and
/// oracle runs yield a single trajectory.
pub fn evolve_runs(cfg: &EvolutionConfig) -> Result<Vec<Trajectory>> {
    cfg.validate()?;
    let state = cfg.initial.prepare(&cfg.params)?;
    match cfg.backend {
        Backend::Oracle => Ok(vec![run_oracle(cfg, &state)?]),
        Backend::Circuit => {
            let circuit = compile_map_with(&cfg.params, cfg.expansion);
            if cfg.noise.is_noiseless() {
                return Ok(vec![run_circuit(cfg, &circuit, &state, 0)?]);
            }
            (0..cfg.realizations as u64)
                .into_par_iter()
                .map(|r| run_circuit(cfg, &circuit, &state, r))
                .collect()
        }
    }
}

/// Ensemble-averaged trajectory.
pub fn evolve(cfg: &EvolutionConfig) -> Result<Trajectory> {
    Ok(Trajectory::average(&evolve_runs(cfg)?))
}
