mod common;

use itertools::Itertools;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use storage_codes::flowgame::{minimax, GameRules, GameState};

/// Plain minimax over explicit graphs, no memo and no symmetry reduction.
fn brute_force_game(state: &GameState, horizon: usize) -> u64 {
    if horizon == 0 {
        return state.history_min_cut;
    }
    state
        .graph
        .live()
        .into_iter()
        .map(|victim| {
            let mut killed = state.clone();
            killed.kill(victim).unwrap();
            killed
                .graph
                .live()
                .into_iter()
                .combinations(state.rules.r)
                .map(|helpers| {
                    let mut child = killed.clone();
                    child.rebuild(&helpers).unwrap();
                    brute_force_game(&child, horizon - 1)
                })
                .max()
                .unwrap()
        })
        .min()
        .unwrap()
}

fn start(n: usize, r: usize, alpha: u64, beta: u64) -> GameState {
    GameState::new(GameRules::new(n, r, alpha, beta).unwrap()).unwrap()
}

#[test]
fn minimax_matches_exhaustive_play() {
    for (n, r, alpha, beta, depth) in [
        (3, 2, 1, 1, 3),
        (3, 2, 2, 1, 3),
        (3, 1, 2, 1, 3),
        (4, 2, 1, 1, 3),
        (4, 2, 2, 1, 3),
        (4, 3, 3, 1, 3),
        (4, 1, 3, 2, 3),
        (5, 2, 1, 1, 2),
        (5, 2, 2, 1, 2),
    ] {
        let s = start(n, r, alpha, beta);
        for h in 0..=depth {
            let fast = minimax(&s, h).unwrap();
            let slow = brute_force_game(&s, h);
            assert_eq!(
                fast.value, slow,
                "n={n} r={r} alpha={alpha} beta={beta} h={h}"
            );
            assert_eq!(fast.line_value, slow);
        }
    }
}

#[test]
fn minimax_from_mid_game_positions() {
    let mut s = start(4, 2, 2, 1);
    s.kill(0).unwrap();
    assert_eq!(
        minimax(&s, 2).unwrap().value,
        brute_force_game_after_kill(&s, 2)
    );
    s.rebuild(&[1, 2]).unwrap();
    s.kill(3).unwrap();
    assert_eq!(
        minimax(&s, 2).unwrap().value,
        brute_force_game_after_kill(&s, 2)
    );
}

/// Builder to move: the pending rebuild closes the first round.
fn brute_force_game_after_kill(state: &GameState, horizon: usize) -> u64 {
    state
        .graph
        .live()
        .into_iter()
        .combinations(state.rules.r)
        .map(|helpers| {
            let mut child = state.clone();
            child.rebuild(&helpers).unwrap();
            brute_force_game(&child, horizon - 1)
        })
        .max()
        .unwrap()
}

#[test]
fn max_flow_matches_min_cut_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let (g, sinks) = common::random_flow_graph(&mut rng, 6);
        assert!(g.vertex_count() < 14);
        assert_eq!(
            g.collector_value_on(&sinks).unwrap(),
            common::brute_force_min_cut(&g, &sinks)
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rebuild_never_raises_value_above_pre_kill(
        seed in any::<u64>(),
        n in 3usize..6,
        alpha in 1u64..4,
        beta in 1u64..4,
        rounds in 1usize..6,
    ) {
        use rand::seq::SliceRandom;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = 2.min(n - 1);
        let mut s = start(n, r, alpha, beta);
        for _ in 0..rounds {
            let before = s.graph.collector_value();
            let live = s.graph.live();
            s.kill(*live.choose(&mut rng).unwrap()).unwrap();
            let live = s.graph.live();
            let helpers: Vec<usize> = live.choose_multiple(&mut rng, r).copied().collect();
            s.rebuild(&helpers).unwrap();
            prop_assert!(s.graph.collector_value() <= before);
            prop_assert!(s.graph.collector_value() <= n as u64 * alpha);
        }
    }

    #[test]
    fn deeper_search_never_raises_value(n in 3usize..6, alpha in 1u64..3, beta in 1u64..3, h in 0usize..6) {
        let s = start(n, 2, alpha, beta);
        let shallow = minimax(&s, h).unwrap().value;
        let deep = minimax(&s, h + 1).unwrap().value;
        prop_assert!(deep <= shallow);
    }
}
