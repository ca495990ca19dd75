//! Coupling between a regulatory network and the cart.
//!
//! The four cart variables enter the network as extra proteins whose
//! concentrations are the variables scaled into `[0, 0.1]`. After a warm-up,
//! the network is advanced a fixed number of ticks per cart step and the
//! concentration of one P protein is decoded into a push left or right.

use std::fmt::Write as _;

use crate::cartpole::{Action, CartParams, CartState, VarRange, STATE_RANGES};
use crate::error::{invalid, GrnError, Result};
use crate::genome::{BitGenome, Word32};
use crate::regulation::{Dynamics, GrnParams, GrnState, RegulatoryNetwork};

/// Extra-protein signatures for x, θ, ẋ, θ̇: pairwise match degrees of 16 or 32.
pub const INPUT_SIGNATURES: [Word32; 4] = [
    Word32(0x0000_0000),
    Word32(0x0000_FFFF),
    Word32(0xFFFF_0000),
    Word32(0xFFFF_FFFF),
];

/// Maps cart variables onto extra-protein concentrations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InputEncoding {
    pub signatures: [Word32; 4],
    /// Ranges in display units (m, degrees, m/s, degrees/s).
    pub ranges: [VarRange; 4],
    /// Concentration assigned to a variable at the top of its range.
    pub max_conc: f64,
}

impl Default for InputEncoding {
    fn default() -> Self {
        InputEncoding {
            signatures: INPUT_SIGNATURES,
            ranges: STATE_RANGES,
            max_conc: 0.1,
        }
    }
}

impl InputEncoding {
    /// Linear scaling of each variable, clamped to its range, into `[0, max_conc]`.
    pub fn encode(&self, state: &CartState) -> [f64; 4] {
        let display = state.to_display();
        let mut out = [0.0; 4];
        for ((o, v), r) in out.iter_mut().zip(display).zip(self.ranges) {
            *o = self.max_conc * r.normalize(v);
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, clap::ValueEnum)]
pub enum DecodeMode {
    /// Push right iff the P concentration is above 0.5.
    #[default]
    Concentration,
    /// Push right on a rise, left on a fall, repeat on no change.
    Tendency,
}

pub fn decode_action(p_now: f64, p_prev: f64, prev_action: Action, mode: DecodeMode) -> Action {
    match mode {
        DecodeMode::Concentration => {
            if p_now > 0.5 {
                Action::Right
            } else {
                Action::Left
            }
        }
        DecodeMode::Tendency => {
            if p_now > p_prev {
                Action::Right
            } else if p_now < p_prev {
                Action::Left
            } else {
                prev_action
            }
        }
    }
}

/// Warm-up run before the first cart step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Warmup {
    pub max_steps: usize,
    pub tol: f64,
    /// Stabilize with all inputs at zero, then apply the initial state.
    pub zero_input: bool,
}

impl Default for Warmup {
    fn default() -> Self {
        Warmup {
            max_steps: 100_000,
            tol: 1e-6,
            zero_input: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControllerConfig {
    pub decode_mode: DecodeMode,
    /// GRN ticks between two cart steps.
    pub grn_steps_per_action: usize,
    pub warmup: Warmup,
    /// Action assumed before the first step (tendency mode repeats it on a flat reading).
    pub initial_action: Action,
    /// Cart steps needed for a fully successful episode.
    pub success_steps: usize,
    pub grn_params: GrnParams,
    pub cart: CartParams,
    pub encoding: InputEncoding,
}

impl Default for ControllerConfig {
    fn default() -> Self {
        ControllerConfig {
            decode_mode: DecodeMode::Concentration,
            grn_steps_per_action: 2000,
            warmup: Warmup::default(),
            initial_action: Action::Left,
            success_steps: 120_000,
            grn_params: GrnParams::default(),
            cart: CartParams::default(),
            encoding: InputEncoding::default(),
        }
    }
}

impl ControllerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.grn_steps_per_action == 0 {
            return Err(invalid("grn_steps_per_action must be at least 1"));
        }
        if self.success_steps == 0 {
            return Err(invalid("success_steps must be at least 1"));
        }
        if self.warmup.tol.is_nan() || self.warmup.tol < 0.0 {
            return Err(invalid("warm-up tolerance must be non-negative"));
        }
        self.grn_params.validate()?;
        self.cart.validate()
    }

    /// Compiles a genome against this configuration's input signatures.
    pub fn compile(&self, genome: &BitGenome) -> RegulatoryNetwork {
        RegulatoryNetwork::compile(genome.scan_genes(), self.encoding.signatures.to_vec())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryPoint {
    pub step: usize,
    pub state: CartState,
    /// Action applied to reach this state; the initial sample carries the
    /// configured initial action.
    pub action: Action,
    /// P concentration read when the action was chosen.
    pub p_conc: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeResult {
    pub steps_survived: usize,
    pub success: bool,
    pub p_index: usize,
    /// GRN ticks in which a concentration vector collapsed and was reset.
    pub degenerate_ticks: usize,
    pub trajectory: Option<Vec<TrajectoryPoint>>,
}

/// Initial GRN state for an episode starting at `initial`: uniform
/// concentrations, inputs applied, then the warm-up.
pub fn warm_start(dynamics: &Dynamics<'_>, cfg: &ControllerConfig, initial: &CartState) -> Result<GrnState> {
    let inputs = cfg.encoding.encode(initial);
    let mut state = if cfg.warmup.zero_input {
        dynamics.network().init_state(&[0.0; 4])?
    } else {
        dynamics.network().init_state(&inputs)?
    };
    if cfg.warmup.max_steps > 0 {
        dynamics.stabilize(&mut state, cfg.warmup.max_steps, cfg.warmup.tol);
    }
    if cfg.warmup.zero_input {
        state.set_extra(&inputs)?;
    }
    Ok(state)
}

/// Runs the cart from `initial` using a warmed-up GRN state.
pub fn run_from(
    dynamics: &Dynamics<'_>,
    mut grn: GrnState,
    p_index: usize,
    cfg: &ControllerConfig,
    initial: &CartState,
    max_steps: usize,
    record: bool,
) -> Result<EpisodeResult> {
    if p_index >= dynamics.network().p_count() {
        return Err(invalid(format!(
            "P gene index {p_index} out of range for {} P genes",
            dynamics.network().p_count()
        )));
    }
    let mut cart = *initial;
    let mut action = cfg.initial_action;
    let mut p_prev = grn.p_conc()[p_index];
    let mut trajectory = record.then(|| {
        vec![TrajectoryPoint {
            step: 0,
            state: cart,
            action,
            p_conc: p_prev,
        }]
    });
    let mut degenerate_ticks = 0;
    let mut steps = 0;
    while steps < max_steps {
        for _ in 0..cfg.grn_steps_per_action {
            degenerate_ticks += dynamics.tick(&mut grn) as usize;
        }
        let p_now = grn.p_conc()[p_index];
        action = decode_action(p_now, p_prev, action, cfg.decode_mode);
        p_prev = p_now;
        cart = cfg.cart.step(&cart, action);
        if cart.is_failure() {
            break;
        }
        steps += 1;
        if let Some(t) = trajectory.as_mut() {
            t.push(TrajectoryPoint {
                step: steps,
                state: cart,
                action,
                p_conc: p_now,
            });
        }
        grn.set_extra(&cfg.encoding.encode(&cart))?;
    }
    Ok(EpisodeResult {
        steps_survived: steps,
        success: steps >= cfg.success_steps,
        p_index,
        degenerate_ticks,
        trajectory,
    })
}

/// Warm-up followed by one episode controlled by P gene `p_index`.
pub fn run_episode(
    net: &RegulatoryNetwork,
    p_index: usize,
    cfg: &ControllerConfig,
    initial: &CartState,
    max_steps: usize,
    record: bool,
) -> Result<EpisodeResult> {
    if net.p_count() == 0 {
        return Err(GrnError::NoPGenes);
    }
    if p_index >= net.p_count() {
        return Err(invalid(format!(
            "P gene index {p_index} out of range for {} P genes",
            net.p_count()
        )));
    }
    let dynamics = net.dynamics(cfg.grn_params)?;
    let grn = warm_start(&dynamics, cfg, initial)?;
    run_from(&dynamics, grn, p_index, cfg, initial, max_steps, record)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    /// `success_steps / max(1, steps survived)` of the best P gene; 1 is perfect.
    pub fitness: f64,
    pub p_index: Option<usize>,
    pub tf_genes: usize,
    pub p_genes: usize,
    /// False when the genome lacks TF or P genes.
    pub valid: bool,
}

pub fn fitness_from_steps(steps: usize, success_steps: usize) -> f64 {
    success_steps as f64 / steps.max(1) as f64
}

/// Tries every P gene from the same warmed-up state and keeps the best;
/// the lowest index wins ties.
pub fn evaluate_network(net: &RegulatoryNetwork, cfg: &ControllerConfig, initial: &CartState) -> Evaluation {
    let invalid_eval = Evaluation {
        fitness: cfg.success_steps as f64,
        p_index: None,
        tf_genes: net.tf_count(),
        p_genes: net.p_count(),
        valid: false,
    };
    if net.tf_count() == 0 || net.p_count() == 0 {
        return invalid_eval;
    }
    let Ok(dynamics) = net.dynamics(cfg.grn_params) else {
        return invalid_eval;
    };
    let Ok(warm) = warm_start(&dynamics, cfg, initial) else {
        return invalid_eval;
    };
    let mut best: Option<(usize, usize)> = None;
    for p in 0..net.p_count() {
        let result =
            run_from(&dynamics, warm.clone(), p, cfg, initial, cfg.success_steps, false).expect("P index is in range");
        if best.is_none_or(|(_, steps)| result.steps_survived > steps) {
            best = Some((p, result.steps_survived));
        }
        if result.success {
            break;
        }
    }
    let (p, steps) = best.expect("at least one P gene");
    Evaluation {
        fitness: fitness_from_steps(steps, cfg.success_steps),
        p_index: Some(p),
        tf_genes: net.tf_count(),
        p_genes: net.p_count(),
        valid: true,
    }
}

pub fn evaluate_genome(genome: &BitGenome, cfg: &ControllerConfig, initial: &CartState) -> Evaluation {
    evaluate_network(&cfg.compile(genome), cfg, initial)
}

pub const TRAJECTORY_HEADER: &str = "step,x_m,theta_deg,xdot,thetadot_deg,action,p_conc";

pub fn trajectory_csv(points: &[TrajectoryPoint]) -> String {
    let mut out = String::from(TRAJECTORY_HEADER);
    out.push('\n');
    for p in points {
        let [x, theta, xdot, thetadot] = p.state.to_display();
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            p.step,
            x,
            theta,
            xdot,
            thetadot,
            p.action.symbol(),
            p.p_conc
        )
        .expect("writing to a String");
    }
    out
}
