mod common;

use clvr_core::adversary::{clvr_blocks_sandwich, front_first_price_inequality, SandwichScenario};
use clvr_core::metrics::{gini_of_wealth, log_deviation_sq, relative_to, volatility_is_quote_invariant};
use clvr_core::sequencers::{brute_force, clvr, gsr, metric_range, vhgsr, DEFAULT_FACTORIAL_CAP};
use clvr_core::workload::{generate_block, split_trades, SplitTarget};
use clvr_core::*;
use common::*;
use proptest::prelude::*;
use std::collections::BTreeMap;

fn trade_strategy(id: u64) -> impl Strategy<Value = Trade> {
    (any::<bool>(), 0.01f64..50.0).prop_map(move |(sell, amt)| {
        let dir = if sell { Direction::SellX } else { Direction::BuyY };
        Trade::new(id, dir, amt).unwrap()
    })
}

fn block_strategy(max: usize) -> impl Strategy<Value = Vec<Trade>> {
    (1..=max).prop_flat_map(|n| (0..n as u64).map(trade_strategy).collect::<Vec<_>>())
}

fn pool_strategy() -> impl Strategy<Value = Pool> {
    (50.0f64..5_000.0, 50.0f64..5_000.0).prop_map(|(x, y)| Pool::new(x, y).unwrap())
}

fn to_ref(trades: &[Trade]) -> Vec<RefTrade> {
    trades
        .iter()
        .map(|t| RefTrade {
            sell: t.direction == Direction::SellX,
            amount: t.amount_in,
        })
        .collect()
}

fn vol_of(pool: &Pool, trades: &[Trade], ordering: &Ordering) -> f64 {
    volatility(&execute_block(pool, trades, ordering, false).unwrap())
        .unwrap()
        .volatility
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn fee_free_swap_keeps_product(pool in pool_strategy(), t in trade_strategy(0)) {
        let (after, out) = execute_trade(&pool, &t).unwrap();
        prop_assert!(out > 0.0);
        let (k0, k1) = (pool.reserve_x * pool.reserve_y, after.reserve_x * after.reserve_y);
        prop_assert!(close(k0, k1, 1e-12), "{k0} vs {k1}");
    }

    #[test]
    fn fee_never_shrinks_product(x in 50.0f64..5_000.0, y in 50.0f64..5_000.0, f in 0.0f64..0.1, t in trade_strategy(0)) {
        let pool = Pool::with_fee(x, y, f).unwrap();
        let (after, out) = execute_trade(&pool, &t).unwrap();
        prop_assert!(after.reserve_x * after.reserve_y >= x * y * (1.0 - 1e-12));
        let free = execute_trade(&Pool::new(x, y).unwrap(), &t).unwrap().1;
        prop_assert!(out <= free * (1.0 + 1e-12));
    }

    #[test]
    fn sells_lower_and_buys_raise_price(pool in pool_strategy(), t in trade_strategy(0)) {
        let (after, _) = execute_trade(&pool, &t).unwrap();
        match t.direction {
            Direction::SellX => prop_assert!(after.spot_price() < pool.spot_price()),
            Direction::BuyY => prop_assert!(after.spot_price() > pool.spot_price()),
        }
    }

    #[test]
    fn matches_reference_pool(pool in pool_strategy(), trades in block_strategy(8)) {
        let trace = execute_block(&pool, &trades, &Ordering::identity(&trades), false).unwrap();
        let mut r = RefPool { x: pool.reserve_x, y: pool.reserve_y };
        for (s, t) in trace.steps.iter().zip(to_ref(&trades)) {
            let out = r.swap(t.sell, t.amount);
            prop_assert!(close(s.amount_out, out, 1e-9));
            prop_assert!(close(s.price_after, r.price(), 1e-9));
        }
    }

    #[test]
    fn reserves_account_for_every_token(pool in pool_strategy(), trades in block_strategy(8)) {
        let trace = execute_block(&pool, &trades, &Ordering::identity(&trades), false).unwrap();
        let (mut dx, mut dy) = (0.0, 0.0);
        for s in &trace.steps {
            match s.direction {
                Direction::SellX => { dx += s.amount_in; dy -= s.amount_out; }
                Direction::BuyY => { dy += s.amount_in; dx -= s.amount_out; }
            }
        }
        let scale = pool.reserve_x.max(pool.reserve_y);
        prop_assert!((trace.final_pool.reserve_x - pool.reserve_x - dx).abs() <= 1e-9 * scale);
        prop_assert!((trace.final_pool.reserve_y - pool.reserve_y - dy).abs() <= 1e-9 * scale);
    }

    #[test]
    fn volatility_ignores_quote_direction(pool in pool_strategy(), trades in block_strategy(8)) {
        let trace = execute_block(&pool, &trades, &Ordering::identity(&trades), false).unwrap();
        prop_assert!(volatility_is_quote_invariant(&trace).unwrap());
    }

    #[test]
    fn volatility_is_scale_free(pool in pool_strategy(), trades in block_strategy(8), c in 0.01f64..100.0) {
        let scaled: Vec<Trade> = trades
            .iter()
            .map(|t| Trade::new(t.id.0, t.direction, t.amount_in * c).unwrap())
            .collect();
        let ord = Ordering::identity(&trades);
        prop_assert!(close(vol_of(&pool, &trades, &ord), vol_of(&pool.scaled(c), &scaled, &ord), 1e-8));
    }

    #[test]
    fn gini_within_bounds(w in prop::collection::vec(0.0f64..1e6, 1..30)) {
        prop_assume!(w.iter().sum::<f64>() > 0.0);
        let g = gini_of_wealth(&w).unwrap();
        let n = w.len() as f64;
        prop_assert!(g >= -1e-12 && g <= 1.0 - 1.0 / n + 1e-12);
        prop_assert!((g - ref_gini(&w)).abs() <= 1e-9);
    }

    #[test]
    fn relative_score_is_monotone(lo in 0.0f64..1.0, span in 1e-6f64..1.0, a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let hi = lo + span;
        let (ra, rb) = (relative_to(lo + a * span, lo, hi).value_pct, relative_to(lo + b * span, lo, hi).value_pct);
        prop_assert!((0.0..=100.0).contains(&ra));
        if a < b { prop_assert!(ra <= rb); }
        prop_assert_eq!(relative_to(lo, lo, hi).value_pct, 0.0);
        prop_assert_eq!(relative_to(hi, lo, hi).value_pct, 100.0);
    }

    #[test]
    fn every_rule_returns_a_permutation(pool in pool_strategy(), trades in block_strategy(7), seed in any::<u64>()) {
        for seq in [
            SequencerKind::Fcfs,
            SequencerKind::Random { seed },
            SequencerKind::Gsr,
            SequencerKind::Vhgsr,
            SequencerKind::Clvr,
            SequencerKind::BruteForceMin(Metric::Volatility),
            SequencerKind::BruteForceMax(Metric::Gini),
        ] {
            let ord = seq.order(&pool, &trades).unwrap();
            let mut idx = ord.to_indices(&trades).unwrap();
            idx.sort_unstable();
            prop_assert_eq!(idx, (0..trades.len()).collect::<Vec<_>>());
        }
    }

    #[test]
    fn clvr_picks_closest_price_each_step(pool in pool_strategy(), trades in block_strategy(8)) {
        let ord = clvr(&pool, &trades).unwrap();
        let mut state = pool;
        let mut left: Vec<&Trade> = trades.iter().collect();
        for id in ord.ids() {
            let chosen = left.iter().position(|t| t.id == *id).unwrap();
            let dev = |t: &Trade| log_deviation_sq(&pool, &execute_trade(&state, t).unwrap().0);
            let best = left.iter().map(|t| dev(t)).fold(f64::INFINITY, f64::min);
            prop_assert_eq!(dev(left[chosen]), best);
            state = execute_trade(&state, left[chosen]).unwrap().0;
            left.remove(chosen);
        }
    }

    #[test]
    fn clvr_agrees_with_reference(pool in pool_strategy(), trades in block_strategy(8)) {
        let r = RefPool { x: pool.reserve_x, y: pool.reserve_y };
        let rt = to_ref(&trades);
        let ours = vol_of(&pool, &trades, &clvr(&pool, &trades).unwrap());
        let theirs = ref_volatility(r, &rt, &ref_clvr(r, &rt)).0;
        prop_assert!(close(ours, theirs, 1e-9), "{ours} vs {theirs}");
        let ours = vol_of(&pool, &trades, &vhgsr(&pool, &trades).unwrap());
        let theirs = ref_volatility(r, &rt, &ref_vhgsr(r, &rt)).0;
        prop_assert!(close(ours, theirs, 1e-9), "{ours} vs {theirs}");
    }

    #[test]
    fn gsr_trades_against_the_deviation(pool in pool_strategy(), trades in block_strategy(8)) {
        let ord = gsr(&pool, &trades).unwrap();
        let p0 = pool.spot_price();
        let trace = execute_block(&pool, &trades, &ord, false).unwrap();
        let mut price = p0;
        let mut left: Vec<Direction> = trades.iter().map(|t| t.direction).collect();
        for s in &trace.steps {
            let want = if price > p0 { Some(Direction::SellX) } else if price < p0 { Some(Direction::BuyY) } else { None };
            if let Some(d) = want {
                if left.contains(&d) {
                    prop_assert_eq!(s.direction, d);
                }
            }
            let k = left.iter().position(|d| *d == s.direction).unwrap();
            left.remove(k);
            price = s.price_after;
        }
    }

    #[test]
    fn brute_force_bounds_every_rule(pool in pool_strategy(), trades in block_strategy(6)) {
        let (lo, hi) = metric_range(&pool, &trades, Metric::Volatility, DEFAULT_FACTORIAL_CAP).unwrap();
        let (rlo, rhi) = ref_volatility_range(RefPool { x: pool.reserve_x, y: pool.reserve_y }, &to_ref(&trades));
        prop_assert!(close(lo, rlo, 1e-9) && close(hi, rhi, 1e-9));
        let (best, v) = brute_force(&pool, &trades, Metric::Volatility, Objective::Min, DEFAULT_FACTORIAL_CAP).unwrap();
        prop_assert_eq!(v, vol_of(&pool, &trades, &best));
        for seq in [SequencerKind::Clvr, SequencerKind::Vhgsr, SequencerKind::Gsr, SequencerKind::Fcfs] {
            let x = vol_of(&pool, &trades, &seq.order(&pool, &trades).unwrap());
            prop_assert!(lo <= x && x <= hi);
        }
    }

    #[test]
    fn clvr_never_enables_risk_free_sandwich(
        pool in pool_strategy(),
        victim in 0.01f64..200.0,
        front in 0.01f64..200.0,
        back in 0.01f64..400.0,
        mirror in any::<bool>(),
    ) {
        let mut s = SandwichScenario::new(pool, victim, front, back).unwrap();
        if mirror { s = s.mirrored(); }
        prop_assert!(clvr_blocks_sandwich(&s).unwrap());
        prop_assert_ne!(front_first_price_inequality(&s).unwrap(), Some(false));
    }

    #[test]
    fn splitting_preserves_each_owner(trades in block_strategy(8), k in 1usize..12, all in any::<bool>(), pick in 0u64..8) {
        let target = if all { SplitTarget::All } else { SplitTarget::One(TradeId(pick)) };
        let split = split_trades(&trades, k, target);
        let totals = |ts: &[Trade]| {
            let mut m: BTreeMap<(u64, bool), f64> = BTreeMap::new();
            for t in ts { *m.entry((t.owner_or_id(), t.direction == Direction::SellX)).or_default() += t.amount_in; }
            m
        };
        let (a, b) = (totals(&trades), totals(&split));
        prop_assert_eq!(a.len(), b.len());
        for (key, v) in a { prop_assert!(close(v, b[&key], 1e-12)); }
        let mut ids: Vec<u64> = split.iter().map(|t| t.id.0).collect();
        ids.sort_unstable();
        ids.dedup();
        prop_assert_eq!(ids.len(), split.len());
    }

    #[test]
    fn generation_is_seed_deterministic(n in 1usize..40, seed in any::<u64>()) {
        let spec = WorkloadSpec::standard(n, seed);
        prop_assert_eq!(generate_block(&spec).unwrap(), generate_block(&spec).unwrap());
    }
}
