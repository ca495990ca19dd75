//! Post-evolution analysis: the 625-case generalization suite, the
//! exhaustive bang-bang solvability search, and regulatory-network export.

use std::collections::HashSet;
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::cartpole::{Action, CartParams, CartState, STATE_RANGES};
use crate::controller::{run_from, warm_start, ControllerConfig};
use crate::error::{invalid, GrnError, Result};
use crate::genome::{BitGenome, GeneKind};
use crate::regulation::{Regulator, RegulatoryNetwork, Site};

/// Normalized grid levels per variable, as numerators over 40.
const LEVEL_NUMERATORS: [u32; 5] = [2, 11, 20, 29, 38];
pub const GRID_LEVELS: [f64; 5] = [0.05, 0.275, 0.50, 0.725, 0.95];
pub const GRID_SIZE: usize = 625;
/// Steps a controller must balance for a generalization case to pass.
pub const GENERALIZATION_STEPS: usize = 1000;
/// Match threshold used for network figures.
pub const DEFAULT_EDGE_THRESHOLD: u32 = 19;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneralizationCase {
    pub index: usize,
    /// Level index (0..5) per variable.
    pub levels: [usize; 4],
    pub normalized: [f64; 4],
    /// Physical values in (m, degrees, m/s, degrees/s).
    pub display: [f64; 4],
    pub physical: CartState,
}

impl GeneralizationCase {
    pub fn from_index(index: usize) -> Self {
        assert!(index < GRID_SIZE, "case index {index} out of range");
        let levels = [index / 125, (index / 25) % 5, (index / 5) % 5, index % 5];
        let mut normalized = [0.0; 4];
        let mut display = [0.0; 4];
        for v in 0..4 {
            let n = LEVEL_NUMERATORS[levels[v]] as f64;
            let r = STATE_RANGES[v];
            normalized[v] = GRID_LEVELS[levels[v]];
            // Weighted endpoints over an exact integer denominator keep the
            // grid exactly mirror-symmetric.
            display[v] = (r.min * (40.0 - n) + r.max * n) / 40.0;
        }
        GeneralizationCase {
            index,
            levels,
            normalized,
            display,
            physical: CartState::from_display(display),
        }
    }

    /// Start state with the θ̇ grid value read in `unit`.
    pub fn physical_in(&self, unit: ThetaDotUnit) -> CartState {
        match unit {
            ThetaDotUnit::Deg => self.physical,
            ThetaDotUnit::Rad => CartState {
                theta_dot: self.display[3],
                ..self.physical
            },
        }
    }

    /// Index of the case with every variable negated.
    pub fn mirror_index(&self) -> usize {
        let l = self.levels.map(|k| 4 - k);
        l[0] * 125 + l[1] * 25 + l[2] * 5 + l[3]
    }
}

/// All 625 cases, x varying slowest and θ̇ fastest.
pub fn generalization_grid() -> Vec<GeneralizationCase> {
    (0..GRID_SIZE).map(GeneralizationCase::from_index).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneralizationReport {
    pub p_index: usize,
    pub passed: Vec<bool>,
    pub score: usize,
}

impl GeneralizationReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("case_index,x,theta_deg,xdot,thetadot_deg,passed\n");
        for (case, passed) in generalization_grid().iter().zip(&self.passed) {
            let [x, t, xd, td] = case.display;
            writeln!(out, "{},{},{},{},{},{}", case.index, x, t, xd, td, *passed as u8).expect("writing to a String");
        }
        out
    }
}

/// Runs P gene `p_index` from every grid case with a fresh warm-up per case.
pub fn generalization_score(
    net: &RegulatoryNetwork,
    p_index: usize,
    cfg: &ControllerConfig,
    max_steps: usize,
) -> Result<GeneralizationReport> {
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
    let passed = generalization_grid()
        .par_iter()
        .map(|case| {
            let warm = warm_start(&dynamics, cfg, &case.physical)?;
            let r = run_from(&dynamics, warm, p_index, cfg, &case.physical, max_steps, false)?;
            Ok(r.steps_survived >= max_steps)
        })
        .collect::<Result<Vec<bool>>>()?;
    let score = passed.iter().filter(|&&p| p).count();
    Ok(GeneralizationReport { p_index, passed, score })
}

/// Scores a genome. Without a known P gene, every P gene is scored and the
/// best one kept (lowest index on ties).
pub fn generalization_score_genome(
    genome: &BitGenome,
    p_index: Option<usize>,
    cfg: &ControllerConfig,
    max_steps: usize,
) -> Result<GeneralizationReport> {
    let net = cfg.compile(genome);
    if net.tf_count() == 0 {
        return Err(GrnError::NoTfGenes);
    }
    match p_index {
        Some(p) => generalization_score(&net, p, cfg, max_steps),
        None => {
            let mut best: Option<GeneralizationReport> = None;
            for p in 0..net.p_count() {
                let r = generalization_score(&net, p, cfg, max_steps)?;
                if best.as_ref().is_none_or(|b| r.score > b.score) {
                    best = Some(r);
                }
            }
            best.ok_or(GrnError::NoPGenes)
        }
    }
}

/// Best/worst/median/mean/standard deviation of scores across runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoreSummary {
    pub best: usize,
    pub worst: usize,
    pub median: f64,
    pub mean: f64,
    /// Sample standard deviation (n − 1 denominator).
    pub std_dev: f64,
}

impl ScoreSummary {
    pub fn from_scores(scores: &[usize]) -> Option<Self> {
        if scores.is_empty() {
            return None;
        }
        let mut sorted = scores.to_vec();
        sorted.sort_unstable();
        let n = sorted.len();
        let median = if n % 2 == 1 {
            sorted[n / 2] as f64
        } else {
            (sorted[n / 2 - 1] + sorted[n / 2]) as f64 / 2.0
        };
        let mean = sorted.iter().sum::<usize>() as f64 / n as f64;
        let var = if n > 1 {
            sorted.iter().map(|&s| (s as f64 - mean).powi(2)).sum::<f64>() / (n - 1) as f64
        } else {
            0.0
        };
        Some(ScoreSummary {
            best: sorted[n - 1],
            worst: sorted[0],
            median,
            mean,
            std_dev: var.sqrt(),
        })
    }
}

/// Unit of the pole angular velocity range [-1.5, 1.5].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum ThetaDotUnit {
    /// Degrees per second.
    #[default]
    Deg,
    /// Radians per second.
    Rad,
}

/// Options for the solvability search.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SearchOptions {
    /// When set, subtrees already shown to fail are remembered by their
    /// state rounded to this grid. Faster on deep searches, no longer exact.
    pub memo_quantum: Option<f64>,
    /// Unit used for the grid's θ̇ values in [`solvability_table`].
    pub thetadot_unit: ThetaDotUnit,
}

/// Whether some sequence of `depth` bang-bang actions keeps the cart
/// inside the failure bounds at every step. Depth-first, right first,
/// pruning a branch as soon as it fails.
pub fn solvable(initial: &CartState, depth: usize, params: &CartParams) -> bool {
    solvable_with(initial, depth, params, SearchOptions::default())
}

pub fn solvable_with(initial: &CartState, depth: usize, params: &CartParams, opts: SearchOptions) -> bool {
    if initial.is_failure() {
        return false;
    }
    match opts.memo_quantum {
        None => dfs(initial, depth, params),
        Some(q) => {
            let mut dead = HashSet::new();
            dfs_memo(initial, depth, params, q, &mut dead)
        }
    }
}

fn dfs(s: &CartState, remaining: usize, params: &CartParams) -> bool {
    if remaining == 0 {
        return true;
    }
    [Action::Right, Action::Left].into_iter().any(|a| {
        let next = params.step(s, a);
        !next.is_failure() && dfs(&next, remaining - 1, params)
    })
}

type MemoKey = ([i64; 4], usize);

fn dfs_memo(s: &CartState, remaining: usize, params: &CartParams, q: f64, dead: &mut HashSet<MemoKey>) -> bool {
    if remaining == 0 {
        return true;
    }
    let key = (
        [s.x, s.theta, s.x_dot, s.theta_dot].map(|v| (v / q).round() as i64),
        remaining,
    );
    if dead.contains(&key) {
        return false;
    }
    for a in [Action::Right, Action::Left] {
        let next = params.step(s, a);
        if !next.is_failure() && dfs_memo(&next, remaining - 1, params, q, dead) {
            return true;
        }
    }
    dead.insert(key);
    false
}

/// Solvability of every grid case at `depth`, in case order.
pub fn solvability_table(depth: usize, params: &CartParams, opts: SearchOptions) -> Vec<bool> {
    generalization_grid()
        .par_iter()
        .map(|c| solvable_with(&c.physical_in(opts.thetadot_unit), depth, params, opts))
        .collect()
}

pub fn unsolvable_count(depth: usize, params: &CartParams) -> usize {
    solvability_table(depth, params, SearchOptions::default())
        .iter()
        .filter(|s| !**s)
        .count()
}

pub fn oracle_csv(depth: usize, table: &[bool]) -> String {
    let mut out = String::from("case_index,depth,solvable\n");
    for (i, s) in table.iter().enumerate() {
        writeln!(out, "{i},{depth},{}", *s as u8).expect("writing to a String");
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NetworkEdge {
    pub source: Regulator,
    /// Genome-order index of the regulated gene.
    pub target: usize,
    pub site: Site,
    pub match_degree: u32,
}

/// Every regulator → site connection whose match degree exceeds `threshold`.
pub fn extract_network(net: &RegulatoryNetwork, threshold: u32) -> Vec<NetworkEdge> {
    let mut edges = Vec::new();
    for source in net.regulators() {
        for target in 0..net.genes().len() {
            for site in [Site::Enhancer, Site::Inhibitor] {
                let m = net.match_degree(source, target, site);
                if m > threshold {
                    edges.push(NetworkEdge {
                        source,
                        target,
                        site,
                        match_degree: m,
                    });
                }
            }
        }
    }
    edges
}

const INPUT_NAMES: [&str; 4] = ["x", "theta", "xdot", "thetadot"];

fn gene_node(g: usize) -> String {
    format!("G{}", g + 1)
}

fn regulator_node(net: &RegulatoryNetwork, r: Regulator) -> String {
    match r {
        Regulator::Tf(i) => gene_node(net.gene_index(GeneKind::Tf, i)),
        Regulator::Extra(k) => format!("E{}", k + 1),
    }
}

/// DOT digraph: TF genes as hexagons, P genes as double hexagons, the
/// chosen P gene as a triple hexagon and extra proteins as triangles.
/// Enhancer edges are solid, inhibitor edges dashed, labels carry the match.
pub fn to_dot(edges: &[NetworkEdge], net: &RegulatoryNetwork, chosen_p: Option<usize>) -> String {
    let chosen = chosen_p
        .filter(|&p| p < net.p_count())
        .map(|p| net.gene_index(GeneKind::P, p));
    let mut out = String::from("digraph grn {\n");
    for (g, gene) in net.genes().iter().enumerate() {
        let peripheries = match gene.kind {
            GeneKind::Tf => 1,
            GeneKind::P if Some(g) == chosen => 3,
            GeneKind::P => 2,
        };
        writeln!(out, "  {} [shape=hexagon, peripheries={peripheries}];", gene_node(g)).unwrap();
    }
    for k in 0..net.extra_count() {
        let label = match INPUT_NAMES.get(k) {
            Some(name) if net.extra_count() == INPUT_NAMES.len() => name.to_string(),
            _ => format!("E{}", k + 1),
        };
        writeln!(out, "  E{} [shape=triangle, label=\"{label}\"];", k + 1).unwrap();
    }
    for e in edges {
        let style = match e.site {
            Site::Enhancer => "solid",
            Site::Inhibitor => "dashed",
        };
        writeln!(
            out,
            "  {} -> {} [style={style}, label=\"{}\"];",
            regulator_node(net, e.source),
            gene_node(e.target),
            e.match_degree
        )
        .unwrap();
    }
    out.push_str("}\n");
    out
}
