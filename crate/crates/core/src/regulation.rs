//! Regulatory networks compiled from scanned genes, and the concentration
//! dynamics of their proteins.
//!
//! Regulators are the TF proteins plus any extra (input) proteins. Every
//! gene, TF or P, has an enhancer and an inhibitor site. For a site the
//! regulatory signal is
//!
//! ```text
//! s = (1/N) Σ_j c_j exp(β (u_j − u_max))
//! ```
//!
//! where `u_j` is the match degree between regulator `j` and the site and
//! `u_max` is the largest match anywhere in the network. TF concentrations
//! follow `c ← c + δ(e − h)c` and P concentrations `c ← c + δ(e − h)`, each
//! clamped at zero and renormalized: TF proteins share `1 − Σ extra` with
//! the extra proteins, P proteins are normalized to 1 on their own.

use crate::error::{invalid, GrnError, Result};
use crate::genome::{Gene, GeneKind, Word32};

/// Scale factors of the regulation dynamics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrnParams {
    /// Sharpness of the match weighting.
    pub beta: f64,
    /// Time-unit scale of each update.
    pub delta: f64,
}

impl Default for GrnParams {
    fn default() -> Self {
        GrnParams { beta: 1.0, delta: 1.0 }
    }
}

impl GrnParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.beta.is_finite() && self.beta > 0.0) {
            return Err(invalid(format!("beta must be positive, got {}", self.beta)));
        }
        if !(self.delta.is_finite() && self.delta > 0.0) {
            return Err(invalid(format!("delta must be positive, got {}", self.delta)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Site {
    Enhancer,
    Inhibitor,
}

/// A regulator of the network: the protein of a TF gene or an extra protein.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regulator {
    /// Index into [`RegulatoryNetwork::tf_genes`].
    Tf(usize),
    /// Index into [`RegulatoryNetwork::extra_sigs`].
    Extra(usize),
}

/// Compiled genome: genes split by kind, regulator signatures and the
/// precomputed regulator × site match table.
#[derive(Debug, Clone, PartialEq)]
pub struct RegulatoryNetwork {
    genes: Vec<Gene>,
    tf: Vec<usize>,
    p: Vec<usize>,
    extra_sigs: Vec<Word32>,
    /// Row per regulator (TF proteins then extras), column per site
    /// (`2·gene` enhancer, `2·gene + 1` inhibitor, genes in genome order).
    match_table: Vec<u8>,
    u_max: u32,
}

impl RegulatoryNetwork {
    pub fn compile(genes: Vec<Gene>, extra_sigs: Vec<Word32>) -> Self {
        let tf: Vec<usize> = (0..genes.len()).filter(|&i| genes[i].kind == GeneKind::Tf).collect();
        let p: Vec<usize> = (0..genes.len()).filter(|&i| genes[i].kind == GeneKind::P).collect();
        let regulators = tf
            .iter()
            .map(|&g| genes[g].protein_sig)
            .chain(extra_sigs.iter().copied());
        let mut match_table = Vec::with_capacity((tf.len() + extra_sigs.len()) * 2 * genes.len());
        for sig in regulators {
            for gene in &genes {
                match_table.push(sig.match_degree(gene.enhancer_sig) as u8);
                match_table.push(sig.match_degree(gene.inhibitor_sig) as u8);
            }
        }
        let u_max = match_table.iter().copied().max().unwrap_or(0) as u32;
        RegulatoryNetwork {
            genes,
            tf,
            p,
            extra_sigs,
            match_table,
            u_max,
        }
    }

    /// All genes in genome order.
    pub fn genes(&self) -> &[Gene] {
        &self.genes
    }

    pub fn tf_genes(&self) -> impl ExactSizeIterator<Item = &Gene> + '_ {
        self.tf.iter().map(move |&g| &self.genes[g])
    }

    pub fn p_genes(&self) -> impl ExactSizeIterator<Item = &Gene> + '_ {
        self.p.iter().map(move |&g| &self.genes[g])
    }

    /// Genome-order index of the `i`-th gene of `kind`.
    pub fn gene_index(&self, kind: GeneKind, i: usize) -> usize {
        match kind {
            GeneKind::Tf => self.tf[i],
            GeneKind::P => self.p[i],
        }
    }

    pub fn tf_count(&self) -> usize {
        self.tf.len()
    }

    pub fn p_count(&self) -> usize {
        self.p.len()
    }

    pub fn extra_sigs(&self) -> &[Word32] {
        &self.extra_sigs
    }

    pub fn extra_count(&self) -> usize {
        self.extra_sigs.len()
    }

    /// Number of regulators (TF proteins plus extra proteins).
    pub fn regulator_count(&self) -> usize {
        self.tf.len() + self.extra_sigs.len()
    }

    pub fn regulators(&self) -> impl Iterator<Item = Regulator> {
        (0..self.tf.len())
            .map(Regulator::Tf)
            .chain((0..self.extra_sigs.len()).map(Regulator::Extra))
    }

    fn regulator_row(&self, r: Regulator) -> usize {
        match r {
            Regulator::Tf(i) => i,
            Regulator::Extra(k) => self.tf.len() + k,
        }
    }

    pub fn regulator_sig(&self, r: Regulator) -> Word32 {
        match r {
            Regulator::Tf(i) => self.genes[self.tf[i]].protein_sig,
            Regulator::Extra(k) => self.extra_sigs[k],
        }
    }

    fn site_column(gene: usize, site: Site) -> usize {
        2 * gene + matches!(site, Site::Inhibitor) as usize
    }

    /// Match degree between regulator `r` and `site` of gene `gene`
    /// (genome-order index).
    pub fn match_degree(&self, r: Regulator, gene: usize, site: Site) -> u32 {
        let cols = 2 * self.genes.len();
        self.match_table[self.regulator_row(r) * cols + Self::site_column(gene, site)] as u32
    }

    /// Largest entry of the match table (0 for an empty network).
    pub fn u_max(&self) -> u32 {
        self.u_max
    }

    /// Uniform starting state: TF proteins share `1 − Σ extra`, P proteins share 1.
    pub fn init_state(&self, extra_conc: &[f64]) -> Result<GrnState> {
        if self.tf.is_empty() {
            return Err(GrnError::NoTfGenes);
        }
        check_extra(extra_conc, self.extra_count(), 1.0)?;
        let budget = 1.0 - extra_conc.iter().sum::<f64>();
        Ok(GrnState {
            tf_conc: vec![budget / self.tf.len() as f64; self.tf.len()],
            p_conc: vec![1.0 / self.p.len() as f64; self.p.len()],
            extra_conc: extra_conc.to_vec(),
        })
    }

    /// Binds the network to dynamics parameters, precomputing the
    /// `exp(β(u − u_max))` weights.
    pub fn dynamics(&self, params: GrnParams) -> Result<Dynamics<'_>> {
        params.validate()?;
        let regs = self.regulator_count();
        let sites = 2 * self.genes.len();
        let mut weights = vec![0.0; sites * regs];
        for r in 0..regs {
            for s in 0..sites {
                let u = self.match_table[r * sites + s] as f64;
                weights[s * regs + r] = (params.beta * (u - self.u_max as f64)).exp();
            }
        }
        Ok(Dynamics {
            net: self,
            params,
            weights,
        })
    }
}

fn check_extra(values: &[f64], expected_len: usize, max_sum: f64) -> Result<()> {
    if values.len() != expected_len {
        return Err(invalid(format!(
            "expected {expected_len} extra-protein concentrations, got {}",
            values.len()
        )));
    }
    if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(invalid("extra-protein concentrations must be finite and non-negative"));
    }
    let sum: f64 = values.iter().sum();
    if sum > max_sum {
        return Err(invalid(format!(
            "extra-protein concentrations sum to {sum}, above the limit {max_sum}"
        )));
    }
    Ok(())
}

/// Concentrations of TF proteins, P proteins and extra proteins.
#[derive(Debug, Clone, PartialEq)]
pub struct GrnState {
    tf_conc: Vec<f64>,
    p_conc: Vec<f64>,
    extra_conc: Vec<f64>,
}

/// Tolerance on the concentration-sum invariants.
pub const SUM_TOLERANCE: f64 = 1e-9;

/// Largest total extra-protein concentration accepted by [`GrnState::set_extra`].
pub const MAX_EXTRA_SUM: f64 = 0.5;

impl GrnState {
    /// Builds a state from explicit vectors, checking the sum invariants.
    pub fn from_parts(tf_conc: Vec<f64>, p_conc: Vec<f64>, extra_conc: Vec<f64>) -> Result<Self> {
        let all = tf_conc.iter().chain(&p_conc).chain(&extra_conc);
        if all.clone().any(|c| !c.is_finite() || *c < 0.0) {
            return Err(invalid("concentrations must be finite and non-negative"));
        }
        let regulated: f64 = tf_conc.iter().chain(&extra_conc).sum();
        if (regulated - 1.0).abs() > SUM_TOLERANCE {
            return Err(invalid(format!(
                "TF plus extra concentrations sum to {regulated}, not 1"
            )));
        }
        let p: f64 = p_conc.iter().sum();
        if !p_conc.is_empty() && (p - 1.0).abs() > SUM_TOLERANCE {
            return Err(invalid(format!("P concentrations sum to {p}, not 1")));
        }
        Ok(GrnState {
            tf_conc,
            p_conc,
            extra_conc,
        })
    }

    pub fn tf_conc(&self) -> &[f64] {
        &self.tf_conc
    }

    pub fn p_conc(&self) -> &[f64] {
        &self.p_conc
    }

    pub fn extra_conc(&self) -> &[f64] {
        &self.extra_conc
    }

    /// Replaces the extra-protein concentrations and rescales the TF
    /// proteins to the remaining share. P proteins are untouched.
    pub fn set_extra(&mut self, values: &[f64]) -> Result<()> {
        check_extra(values, self.extra_conc.len(), MAX_EXTRA_SUM)?;
        self.extra_conc.copy_from_slice(values);
        let budget = 1.0 - values.iter().sum::<f64>();
        renormalize(&mut self.tf_conc, budget);
        Ok(())
    }

    /// Largest absolute per-protein difference to `other`.
    fn max_change(&self, other: &GrnState) -> f64 {
        self.tf_conc
            .iter()
            .zip(&other.tf_conc)
            .chain(self.p_conc.iter().zip(&other.p_conc))
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Rescales `conc` to sum to `target`. Returns true when the vector summed
/// to zero and was reset to a uniform split.
fn renormalize(conc: &mut [f64], target: f64) -> bool {
    if conc.is_empty() {
        return false;
    }
    let sum: f64 = conc.iter().sum();
    if sum > 0.0 {
        let scale = target / sum;
        conc.iter_mut().for_each(|c| *c *= scale);
        false
    } else {
        let even = target / conc.len() as f64;
        conc.iter_mut().for_each(|c| *c = even);
        true
    }
}

/// A network bound to its dynamics parameters.
#[derive(Debug, Clone)]
pub struct Dynamics<'a> {
    net: &'a RegulatoryNetwork,
    params: GrnParams,
    /// Row per site, column per regulator.
    weights: Vec<f64>,
}

impl<'a> Dynamics<'a> {
    pub fn network(&self) -> &'a RegulatoryNetwork {
        self.net
    }

    pub fn params(&self) -> GrnParams {
        self.params
    }

    fn site_signal(&self, state: &GrnState, column: usize) -> f64 {
        let n = self.net.regulator_count();
        let w = &self.weights[column * n..(column + 1) * n];
        let t = self.net.tf_count();
        let tf: f64 = w[..t].iter().zip(&state.tf_conc).map(|(w, c)| w * c).sum();
        let extra: f64 = w[t..].iter().zip(&state.extra_conc).map(|(w, c)| w * c).sum();
        (tf + extra) / n as f64
    }

    fn gene_signals(&self, state: &GrnState, gene: usize) -> (f64, f64) {
        (self.site_signal(state, 2 * gene), self.site_signal(state, 2 * gene + 1))
    }

    /// Enhancing and inhibiting signals `(e_i, h_i)` for every gene of `kind`,
    /// in the order of that kind's gene list.
    pub fn regulation_signals(&self, state: &GrnState, kind: GeneKind) -> Vec<(f64, f64)> {
        let genes = match kind {
            GeneKind::Tf => &self.net.tf,
            GeneKind::P => &self.net.p,
        };
        genes.iter().map(|&g| self.gene_signals(state, g)).collect()
    }

    /// One Euler update of the TF proteins. Returns true if every TF
    /// concentration hit zero and the vector was reset to uniform.
    pub fn step_tf(&self, state: &mut GrnState) -> bool {
        let delta = self.params.delta;
        let updated: Vec<f64> = self
            .net
            .tf
            .iter()
            .zip(&state.tf_conc)
            .map(|(&g, &c)| {
                let (e, h) = self.gene_signals(state, g);
                (c + delta * (e - h) * c).max(0.0)
            })
            .collect();
        state.tf_conc = updated;
        let budget = 1.0 - state.extra_conc.iter().sum::<f64>();
        renormalize(&mut state.tf_conc, budget)
    }

    /// One Euler update of the P proteins, driven by the current regulator
    /// concentrations. A network without P genes is left unchanged.
    pub fn step_products(&self, state: &mut GrnState) -> bool {
        let delta = self.params.delta;
        let updated: Vec<f64> = self
            .net
            .p
            .iter()
            .zip(&state.p_conc)
            .map(|(&g, &c)| {
                let (e, h) = self.gene_signals(state, g);
                (c + delta * (e - h)).max(0.0)
            })
            .collect();
        state.p_conc = updated;
        renormalize(&mut state.p_conc, 1.0)
    }

    /// One GRN tick: TF update, then P update reading the new TF levels.
    pub fn tick(&self, state: &mut GrnState) -> bool {
        let tf_reset = self.step_tf(state);
        let p_reset = self.step_products(state);
        tf_reset || p_reset
    }

    /// Ticks until the largest per-protein change in one tick is below
    /// `tol`, or `max_steps` ticks have run. Returns the ticks used.
    pub fn stabilize(&self, state: &mut GrnState, max_steps: usize, tol: f64) -> usize {
        let mut steps = 0;
        while steps < max_steps {
            let before = state.clone();
            self.tick(state);
            steps += 1;
            if state.max_change(&before) < tol {
                break;
            }
        }
        steps
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gene(kind: GeneKind, enh: u32, inh: u32, prot: u32) -> Gene {
        Gene {
            kind,
            promoter_start: 64,
            enhancer_sig: Word32(enh),
            inhibitor_sig: Word32(inh),
            protein_sig: Word32(prot),
        }
    }

    #[test]
    fn compile_full_complement_and_counts() {
        let g = gene(GeneKind::Tf, 0x0F0F_0F0F, 0x0F0F_0F0F, 0xF0F0_F0F0);
        let net = RegulatoryNetwork::compile(vec![g], vec![]);
        assert_eq!(net.u_max(), 32);
        assert_eq!(net.regulator_count(), 1);
        let net = RegulatoryNetwork::compile(vec![], vec![]);
        assert_eq!(net.u_max(), 0);
        assert_eq!(net.regulator_count(), 0);
    }

    #[test]
    fn init_state_uniform() {
        let genes = vec![
            gene(GeneKind::Tf, 1, 2, 3),
            gene(GeneKind::Tf, 1, 2, 3),
            gene(GeneKind::P, 1, 2, 3),
            gene(GeneKind::Tf, 1, 2, 3),
            gene(GeneKind::P, 1, 2, 3),
            gene(GeneKind::Tf, 1, 2, 3),
        ];
        let net = RegulatoryNetwork::compile(genes, vec![Word32(0); 4]);
        let s = net.init_state(&[0.05; 4]).unwrap();
        for &c in s.tf_conc() {
            assert!((c - 0.2).abs() < 1e-15);
        }
        assert_eq!(s.p_conc(), &[0.5, 0.5]);

        let empty = RegulatoryNetwork::compile(vec![gene(GeneKind::P, 1, 2, 3)], vec![]);
        assert_eq!(empty.init_state(&[]), Err(GrnError::NoTfGenes));
    }

    #[test]
    fn signal_at_u_max_and_one_below() {
        // TF protein 0 fully complements gene 0's enhancer; gene 1's enhancer
        // differs from the complement in one bit.
        let prot = 0xFFFF_FFFF;
        let genes = vec![
            gene(GeneKind::Tf, 0x0000_0000, 0xFFFF_FFFF, prot),
            gene(GeneKind::P, 0x0000_0001, 0xFFFF_FFFF, 0),
        ];
        let net = RegulatoryNetwork::compile(genes, vec![]);
        assert_eq!(net.u_max(), 32);
        let dynamics = net.dynamics(GrnParams::default()).unwrap();
        let state = net.init_state(&[]).unwrap();
        let tf = dynamics.regulation_signals(&state, GeneKind::Tf);
        assert_eq!(tf[0].0, 1.0);
        let p = dynamics.regulation_signals(&state, GeneKind::P);
        assert!((p[0].0 - (-1.0f64).exp()).abs() < 1e-15);
        assert!((p[0].0 - 0.367879).abs() < 1e-6);
    }

    #[test]
    fn signals_vanish_with_zero_concentrations() {
        let genes = vec![gene(GeneKind::Tf, 7, 9, 11), gene(GeneKind::P, 1, 2, 3)];
        let net = RegulatoryNetwork::compile(genes, vec![Word32(5)]);
        let dynamics = net.dynamics(GrnParams::default()).unwrap();
        // Extra protein takes everything, TF at zero... then zero that too.
        let state = GrnState {
            tf_conc: vec![0.0],
            p_conc: vec![1.0],
            extra_conc: vec![0.0],
        };
        for (e, h) in dynamics.regulation_signals(&state, GeneKind::Tf) {
            assert_eq!((e, h), (0.0, 0.0));
        }
    }

    #[test]
    fn step_tf_single_gene_stays_at_one() {
        let net = RegulatoryNetwork::compile(vec![gene(GeneKind::Tf, 0, 0xFFFF, 0xFF00_FF00)], vec![]);
        let dynamics = net.dynamics(GrnParams { beta: 0.5, delta: 3.0 }).unwrap();
        let mut state = net.init_state(&[]).unwrap();
        for _ in 0..100 {
            dynamics.step_tf(&mut state);
            assert_eq!(state.tf_conc(), &[1.0]);
        }
    }

    #[test]
    fn step_tf_equal_signals_is_fixed_point() {
        // Enhancer equals inhibitor for every gene, so e = h.
        let genes = vec![
            gene(GeneKind::Tf, 0x1234, 0x1234, 0xAAAA_0000),
            gene(GeneKind::Tf, 0x00FF_00FF, 0x00FF_00FF, 0x5555_5555),
            gene(GeneKind::P, 0xF000_000F, 0xF000_000F, 0),
        ];
        let net = RegulatoryNetwork::compile(genes, vec![Word32(0)]);
        let dynamics = net.dynamics(GrnParams::default()).unwrap();
        let mut state = GrnState::from_parts(vec![0.6, 0.3], vec![1.0], vec![0.1]).unwrap();
        let before = state.clone();
        dynamics.tick(&mut state);
        for (a, b) in state.tf_conc().iter().zip(before.tf_conc()) {
            assert!((a - b).abs() < 1e-15);
        }
        assert_eq!(state.p_conc(), before.p_conc());
    }

    #[test]
    fn step_tf_share_moves_toward_enhanced_gene() {
        // Gene 0 enhanced by both TF proteins, gene 1 inhibited by both.
        let a = 0x0000_0000;
        let b = 0x0000_000F;
        let genes = vec![gene(GeneKind::Tf, !a, a, a), gene(GeneKind::Tf, b, !b, b)];
        let net = RegulatoryNetwork::compile(genes, vec![]);
        let dynamics = net.dynamics(GrnParams { beta: 1.0, delta: 0.1 }).unwrap();
        let state0 = net.init_state(&[]).unwrap();
        let sig = dynamics.regulation_signals(&state0, GeneKind::Tf);
        assert!(sig[0].0 - sig[0].1 > 0.0 && sig[1].0 - sig[1].1 < 0.0);

        // Independent evaluation of one step.
        let raw: Vec<f64> = sig
            .iter()
            .zip(state0.tf_conc())
            .map(|((e, h), c)| c + 0.1 * (e - h) * c)
            .collect();
        let total: f64 = raw.iter().sum();
        let mut state = state0.clone();
        dynamics.step_tf(&mut state);
        assert!(state.tf_conc()[0] > 0.5);
        assert!((state.tf_conc()[0] - raw[0] / total).abs() < 1e-15);
    }

    #[test]
    fn step_products_hand_evaluated() {
        // Two P genes, one TF regulator (c = 1, N = 1). P gene 0 enhancer and
        // P gene 1 inhibitor fully match it; the other sites match at 0, so
        // with β large their weight is negligible: δ(e − h) ≈ (+δ, −δ).
        let prot = 0xFFFF_FFFF;
        let genes = vec![
            gene(GeneKind::Tf, 0xFFFF_FFFF, 0xFFFF_FFFF, prot),
            gene(GeneKind::P, 0, 0xFFFF_FFFF, 0),
            gene(GeneKind::P, 0xFFFF_FFFF, 0, 0),
        ];
        let net = RegulatoryNetwork::compile(genes, vec![]);
        let dynamics = net.dynamics(GrnParams { beta: 40.0, delta: 0.1 }).unwrap();
        let mut state = net.init_state(&[]).unwrap();
        assert_eq!(state.p_conc(), &[0.5, 0.5]);
        dynamics.step_products(&mut state);
        assert!((state.p_conc()[0] - 0.6).abs() < 1e-12);
        assert!((state.p_conc()[1] - 0.4).abs() < 1e-12);
        // TF untouched by the P update.
        assert_eq!(state.tf_conc(), &[1.0]);
    }

    #[test]
    fn step_products_degenerate_reset() {
        let genes = vec![
            gene(GeneKind::Tf, 0xFFFF_FFFF, 0xFFFF_FFFF, 0xFFFF_FFFF),
            gene(GeneKind::P, 0xFFFF_FFFF, 0, 0),
            gene(GeneKind::P, 0xFFFF_FFFF, 0, 0),
        ];
        let net = RegulatoryNetwork::compile(genes, vec![]);
        let dynamics = net.dynamics(GrnParams { beta: 40.0, delta: 5.0 }).unwrap();
        let mut state = net.init_state(&[]).unwrap();
        assert!(dynamics.step_products(&mut state));
        assert_eq!(state.p_conc(), &[0.5, 0.5]);
    }

    #[test]
    fn single_p_gene_stays_at_one() {
        let genes = vec![gene(GeneKind::Tf, 3, 5, 7), gene(GeneKind::P, 0x0FF0, 0xF00F, 0)];
        let net = RegulatoryNetwork::compile(genes, vec![]);
        let dynamics = net.dynamics(GrnParams::default()).unwrap();
        let mut state = net.init_state(&[]).unwrap();
        for _ in 0..50 {
            dynamics.tick(&mut state);
            assert_eq!(state.p_conc(), &[1.0]);
        }
    }

    #[test]
    fn set_extra_rescales_tf_share() {
        let genes = vec![gene(GeneKind::Tf, 1, 2, 3), gene(GeneKind::Tf, 4, 5, 6)];
        let net = RegulatoryNetwork::compile(genes, vec![Word32(0); 4]);
        let mut state = net.init_state(&[0.0; 4]).unwrap();
        state.set_extra(&[0.1; 4]).unwrap();
        let tf: f64 = state.tf_conc().iter().sum();
        assert!((tf - 0.6).abs() < 1e-12);
        let once = state.clone();
        state.set_extra(&[0.1; 4]).unwrap();
        assert_eq!(state, once);
        state.set_extra(&[0.0; 4]).unwrap();
        assert!((state.tf_conc().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(state.set_extra(&[0.2; 4]).is_err());
        assert!(state.set_extra(&[-0.1, 0.0, 0.0, 0.0]).is_err());
        assert!(state.set_extra(&[0.1; 3]).is_err());
    }

    #[test]
    fn stabilize_step_counts() {
        let genes = vec![gene(GeneKind::Tf, 0x1234, 0x1234, 0xAAAA_0000)];
        let net = RegulatoryNetwork::compile(genes, vec![]);
        let dynamics = net.dynamics(GrnParams::default()).unwrap();
        let mut state = net.init_state(&[]).unwrap();
        assert_eq!(dynamics.stabilize(&mut state, 100, 1e-6), 1);
        assert_eq!(dynamics.stabilize(&mut state, 37, 0.0), 37);
    }

    #[test]
    fn invalid_params_rejected() {
        let net = RegulatoryNetwork::compile(vec![], vec![]);
        assert!(net.dynamics(GrnParams { beta: 0.0, delta: 1.0 }).is_err());
        assert!(net.dynamics(GrnParams { beta: 1.0, delta: -1.0 }).is_err());
    }
}
