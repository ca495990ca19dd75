mod common;

use grn_pole::cartpole::{Action, CartParams, CartState};
use grn_pole::controller::{
    decode_action, evaluate_genome, run_episode, ControllerConfig, DecodeMode, InputEncoding, Warmup,
};
use grn_pole::genome::{match_degree, synthesize_protein, BitGenome, Gene, GeneKind, Word32};
use grn_pole::regulation::{GrnParams, RegulatoryNetwork};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn genome_strategy() -> impl Strategy<Value = BitGenome> {
    prop::collection::vec(any::<bool>(), 1..1500).prop_map(|b| BitGenome::from_bits(b).unwrap())
}

fn gene_strategy() -> impl Strategy<Value = Gene> {
    (any::<bool>(), any::<u32>(), any::<u32>(), any::<u32>()).prop_map(|(p, e, h, s)| Gene {
        kind: if p { GeneKind::P } else { GeneKind::Tf },
        promoter_start: 64,
        enhancer_sig: Word32(e),
        inhibitor_sig: Word32(h),
        protein_sig: Word32(s),
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn scanned_genes_reread_from_genome(g in genome_strategy()) {
        let genes = g.scan_genes();
        for gene in &genes {
            let p = gene.promoter_start;
            prop_assert!(p >= 64 && p + 192 <= g.len());
            prop_assert_eq!(gene.enhancer_sig, g.word_at(p - 64));
            prop_assert_eq!(gene.inhibitor_sig, g.word_at(p - 32));
            prop_assert_eq!(gene.protein_sig, synthesize_protein(&g.bits()[p + 32..p + 192]).unwrap());
            let suffix = g.word_at(p).0 & 0xFF;
            prop_assert_eq!(suffix, if gene.kind == GeneKind::Tf { 0 } else { 0xFF });
        }
        for pair in genes.windows(2) {
            prop_assert!(pair[0].promoter_start + 192 <= pair[1].promoter_start);
        }
        prop_assert_eq!(g.scan_genes(), genes);
    }

    #[test]
    fn synthesis_ignores_word_order(words in prop::array::uniform5(any::<u32>()), perm in Just([0usize, 1, 2, 3, 4]).prop_shuffle()) {
        let a = BitGenome::from_words(&words.map(Word32)).unwrap();
        let shuffled: Vec<Word32> = perm.iter().map(|&i| Word32(words[i])).collect();
        let b = BitGenome::from_words(&shuffled).unwrap();
        prop_assert_eq!(synthesize_protein(a.bits()).unwrap(), synthesize_protein(b.bits()).unwrap());
    }

    #[test]
    fn match_degree_laws(a in any::<u32>(), b in any::<u32>()) {
        let (a, b) = (Word32(a), Word32(b));
        prop_assert_eq!(match_degree(a, b), match_degree(b, a));
        prop_assert_eq!(match_degree(a, a), 0);
        prop_assert_eq!(match_degree(a, a.complement()), 32);
    }

    #[test]
    fn dm_without_mutation_repeats_first_word(d in 1u32..8, seed in any::<u64>()) {
        let g = BitGenome::duplication_mutation(d, 0.0, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        prop_assert_eq!(g.len(), 32 << d);
        let w = g.word_at(0);
        for k in 0..(1usize << d) {
            prop_assert_eq!(g.word_at(32 * k), w);
        }
    }

    #[test]
    fn genome_text_round_trip(g in genome_strategy()) {
        prop_assert_eq!(BitGenome::from_text(&g.to_text()).unwrap(), g);
    }

    #[test]
    fn signals_bounded_and_nonnegative(
        genes in prop::collection::vec(gene_strategy(), 1..6),
        extra in prop::array::uniform4(0.0f64..0.1),
        beta in 0.1f64..3.0,
    ) {
        prop_assume!(genes.iter().any(|g| g.kind == GeneKind::Tf));
        let net = RegulatoryNetwork::compile(genes, grn_pole::controller::INPUT_SIGNATURES.to_vec());
        let dynamics = net.dynamics(GrnParams { beta, delta: 1.0 }).unwrap();
        let state = net.init_state(&extra).unwrap();
        let bound = 1.0 / net.regulator_count() as f64;
        for kind in [GeneKind::Tf, GeneKind::P] {
            for (e, h) in dynamics.regulation_signals(&state, kind) {
                prop_assert!(e >= 0.0 && h >= 0.0);
                prop_assert!(e <= bound + 1e-15 && h <= bound + 1e-15);
            }
        }
    }

    #[test]
    fn relabeling_genes_permutes_trajectories(
        genes in prop::collection::vec(gene_strategy(), 2..6),
        perm_seed in any::<u64>(),
    ) {
        prop_assume!(genes.iter().any(|g| g.kind == GeneKind::Tf));
        use rand::seq::SliceRandom;
        let mut order: Vec<usize> = (0..genes.len()).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(perm_seed));
        let permuted: Vec<Gene> = order.iter().map(|&i| genes[i].clone()).collect();

        let a = RegulatoryNetwork::compile(genes.clone(), vec![]);
        let b = RegulatoryNetwork::compile(permuted, vec![]);
        let params = GrnParams { beta: 0.7, delta: 0.5 };
        let (da, db) = (a.dynamics(params).unwrap(), b.dynamics(params).unwrap());
        let (mut sa, mut sb) = (a.init_state(&[]).unwrap(), b.init_state(&[]).unwrap());
        // Position of each original gene within its kind list, in both networks.
        let kind_pos = |kind: GeneKind, genome_order: &[usize]| -> Vec<usize> {
            let mut pos = vec![usize::MAX; genes.len()];
            let mut k = 0;
            for &orig in genome_order {
                if genes[orig].kind == kind {
                    pos[orig] = k;
                    k += 1;
                }
            }
            pos
        };
        let identity: Vec<usize> = (0..genes.len()).collect();
        for _ in 0..20 {
            da.tick(&mut sa);
            db.tick(&mut sb);
            for (kind, ca, cb) in [
                (GeneKind::Tf, sa.tf_conc(), sb.tf_conc()),
                (GeneKind::P, sa.p_conc(), sb.p_conc()),
            ] {
                let pa = kind_pos(kind, &identity);
                let pb = kind_pos(kind, &order);
                for i in 0..genes.len() {
                    if genes[i].kind == kind {
                        prop_assert!((ca[pa[i]] - cb[pb[i]]).abs() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn mirrored_start_and_actions_mirror_trajectory(
        s in prop::array::uniform4(-0.5f64..0.5),
        actions in prop::collection::vec(any::<bool>(), 1..50),
    ) {
        let p = CartParams::default();
        let mut a = CartState { x: s[0], theta: s[1], x_dot: s[2], theta_dot: s[3] };
        let mut b = -a;
        for right in actions {
            let act = if right { Action::Right } else { Action::Left };
            a = p.step(&a, act);
            b = p.step(&b, act.mirror());
            prop_assert_eq!(b, -a);
        }
    }

    #[test]
    fn encoded_inputs_stay_in_range(s in prop::array::uniform4(-20.0f64..20.0)) {
        let c = InputEncoding::default().encode(&CartState { x: s[0], theta: s[1], x_dot: s[2], theta_dot: s[3] });
        prop_assert!(c.iter().all(|v| (0.0..=0.1).contains(v)));
        prop_assert!(c.iter().sum::<f64>() <= 0.4 + 1e-15);
    }

    #[test]
    fn concentration_decoding_is_memoryless(p in 0.0f64..1.0, q in 0.0f64..1.0) {
        let a = decode_action(p, q, Action::Left, DecodeMode::Concentration);
        let b = decode_action(p, 1.0 - q, Action::Right, DecodeMode::Concentration);
        prop_assert_eq!(a, b);
        prop_assert_eq!(decode_action(p, p, Action::Right, DecodeMode::Tendency), Action::Right);
        prop_assert_eq!(decode_action(p, p, Action::Left, DecodeMode::Tendency), Action::Left);
    }
}

#[test]
fn alternating_steps_match_reference_equations() {
    let p = CartParams::default();
    let mut s = CartState::default();
    let mut r = [0.0; 4];
    for k in 0..10 {
        let right = k % 2 == 0;
        s = p.step(&s, if right { Action::Right } else { Action::Left });
        r = common::reference_step(r, right);
        for (a, b) in [s.x, s.theta, s.x_dot, s.theta_dot].iter().zip(r) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}

#[test]
fn episodes_are_deterministic() {
    let cfg = ControllerConfig {
        success_steps: 300,
        grn_steps_per_action: 20,
        warmup: Warmup {
            max_steps: 2000,
            ..Default::default()
        },
        ..Default::default()
    };
    let mut found = 0;
    for seed in 0..40 {
        let g = BitGenome::duplication_mutation(7, 0.02, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let net = cfg.compile(&g);
        if net.tf_count() == 0 || net.p_count() == 0 {
            continue;
        }
        found += 1;
        let start = CartState::from_display([0.5, -3.0, 0.2, 1.0]);
        let a = run_episode(&net, 0, &cfg, &start, 300, true).unwrap();
        let b = run_episode(&net, 0, &cfg, &start, 300, true).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.trajectory.as_ref().unwrap().len(), a.steps_survived + 1);
        let e1 = evaluate_genome(&g, &cfg, &start);
        let e2 = evaluate_genome(&g, &cfg, &start);
        assert_eq!(e1, e2);
        assert!(e1.fitness >= 1.0);
        if a.success {
            assert_eq!(e1.fitness, 1.0);
        }
    }
    assert!(found > 0);
}
