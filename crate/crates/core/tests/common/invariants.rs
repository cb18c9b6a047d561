//! Module invariants as seeded checks. Each returns `Err` with a short
//! description of the first violation found.

use std::sync::Arc;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use sfc_core::arena::{self, EngineConfig, MatchTally};
use sfc_core::board::{self, Color, Move, Position, Wdl};
use sfc_core::corpus::{self, GameRecord};
use sfc_core::estimators::{
    fisher_score, fit_gaussian, qda_score, win_probability, LabeledExample, LogisticFitter, LogisticModel,
};
use sfc_core::evaluator::{FnEval, HeuristicEval};
use sfc_core::features::{self, FeatureVector, FEATURE_BOUNDS, NUM_FEATURES, PARITY};
use sfc_core::linalg::{spd_factor, weighted_normal_solve, Matrix};
use sfc_core::search::{self, MoveOrder, SearchLimits};

use super::{oracles, positions_with_discs, random_positions, rng, OVERLAPPING_GAMES};

pub type Check = Result<(), String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Check {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

// ---- board ----

pub fn move_generation_matches_ray_scan(count: usize) -> Check {
    for p in random_positions(11, count) {
        for (own, opp) in [(p.own(), p.opp()), (p.opp(), p.own())] {
            let fast = board::moves_mask(own, opp);
            let slow = oracles::naive_moves(own, opp);
            ensure(fast == slow, || format!("moves differ at\n{p}\n{fast:#x} vs {slow:#x}"))?;
            for s in board::squares(fast) {
                ensure(board::flips(own, opp, s) == oracles::naive_flips(own, opp, s), || format!("flips differ at {s}\n{p}"))?;
            }
        }
    }
    Ok(())
}

pub fn playouts_respect_rules(games: usize) -> Check {
    let mut r = rng(12);
    for _ in 0..games {
        let mut p = Position::initial();
        let mut placed = 0;
        let mut plies = 0;
        while !p.is_terminal() {
            let moves = p.legal_moves();
            let has_pass = moves.contains(&Move::Pass);
            ensure(!has_pass || moves.len() == 1, || format!("pass mixed with placements at\n{p}"))?;
            let mv = *moves.choose(&mut r).unwrap();
            let next = p.apply_move(mv).map_err(|e| e.to_string())?;
            ensure(next.black() & next.white() == 0, || "overlapping discs".into())?;
            match mv {
                Move::Place(_) => {
                    ensure(next.disc_count() == p.disc_count() + 1, || format!("disc count after {mv}"))?;
                    placed += 1;
                }
                Move::Pass => ensure(next.disc_count() == p.disc_count(), || "pass changed discs".into())?,
            }
            ensure(next.to_move() == p.to_move().opponent(), || "mover not toggled".into())?;
            p = next;
            plies += 1;
            ensure(placed <= 60 && plies <= 120, || "playout did not terminate".into())?;
        }
    }
    Ok(())
}

// ---- features ----

pub fn features_are_antisymmetric(count: usize) -> Check {
    for p in random_positions(21, count).into_iter().filter(|p| !p.is_terminal()) {
        let x = features::extract(&p).unwrap();
        let toggled = p.with_mover_toggled();
        if !toggled.is_terminal() {
            let t = features::extract(&toggled).unwrap();
            for k in 1..NUM_FEATURES {
                if k == PARITY {
                    ensure(t.values()[k] == x.values()[k], || "parity changed under mover toggle".into())?;
                } else {
                    ensure(t.values()[k] == -x.values()[k], || format!("feature {k} not negated\n{p}"))?;
                }
            }
        }
        let swapped = features::extract(&p.colour_swapped()).unwrap();
        ensure(swapped == x, || format!("colour swap with mover changed features\n{p}"))?;
    }
    Ok(())
}

pub fn features_within_bounds(count: usize) -> Check {
    for p in random_positions(22, count).into_iter().filter(|p| !p.is_terminal()) {
        let x = features::extract(&p).unwrap();
        ensure(features::extract(&p).unwrap() == x, || "extract not deterministic".into())?;
        ensure(x.len() == NUM_FEATURES, || "wrong length".into())?;
        for (k, (&v, &(lo, hi))) in x.values().iter().zip(FEATURE_BOUNDS.iter()).enumerate() {
            ensure(lo <= v && v <= hi, || format!("feature {k} = {v} outside [{lo}, {hi}]\n{p}"))?;
        }
    }
    Ok(())
}

// ---- linalg ----

fn random_spd(r: &mut impl Rng, n: usize) -> Matrix {
    let b: Vec<Vec<f64>> = (0..n).map(|_| (0..n).map(|_| r.random_range(-1.0..1.0)).collect()).collect();
    let mut a = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            a[(i, j)] = (0..n).map(|k| b[i][k] * b[j][k]).sum::<f64>() + if i == j { 0.5 } else { 0.0 };
        }
    }
    a
}

fn rows(a: &Matrix) -> Vec<Vec<f64>> {
    (0..a.rows()).map(|i| a.row(i).to_vec()).collect()
}

pub fn factorization_matches_oracles(trials: usize) -> Check {
    let mut r = rng(31);
    for t in 0..trials {
        let n = 1 + t % 6;
        let a = random_spd(&mut r, n);
        let f = spd_factor(&a, 0.0).map_err(|e| e.to_string())?;
        let b: Vec<f64> = (0..n).map(|_| r.random_range(-3.0..3.0)).collect();
        let x = f.solve(&b).unwrap();
        let res: f64 = a.mul_vec(&x).iter().zip(&b).map(|(u, v)| (u - v).powi(2)).sum::<f64>().sqrt();
        let scale = b.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-300);
        ensure(res / scale < 1e-10, || format!("relative residual {}", res / scale))?;

        let det = oracles::cofactor_det(&rows(&a));
        ensure((f.log_det() - det.ln()).abs() < 1e-10 * det.ln().abs().max(1.0), || {
            format!("log det {} vs cofactor {}", f.log_det(), det.ln())
        })?;
        let c = 0.5 + t as f64 * 0.37;
        let fc = spd_factor(&a.scaled(c), 0.0).unwrap();
        ensure((fc.log_det() - f.log_det() - n as f64 * c.ln()).abs() < 1e-10 * (1.0 + f.log_det().abs()), || {
            "log det scaling".into()
        })?;

        let inv = f.inverse();
        let gj = oracles::gauss_jordan_inverse(&rows(&a));
        for i in 0..n {
            for j in 0..n {
                let tol = 1e-9 * (1.0 + gj[i][j].abs());
                ensure((inv[(i, j)] - gj[i][j]).abs() < tol, || format!("inverse entry ({i},{j})"))?;
            }
        }
    }
    Ok(())
}

pub fn weighted_solve_minimizes(trials: usize) -> Check {
    let mut r = rng(32);
    for _ in 0..trials {
        let (m, p) = (40, 3);
        let data: Vec<f64> = (0..m).flat_map(|_| [1.0, r.random_range(-2.0..2.0), r.random_range(-2.0..2.0)]).collect();
        let x = Matrix::from_row_major(m, p, data).unwrap();
        let w: Vec<f64> = (0..m).map(|_| r.random_range(0.1..2.0)).collect();
        let z: Vec<f64> = (0..m).map(|_| r.random_range(-5.0..5.0)).collect();
        let beta = weighted_normal_solve(&x, &w, &z).map_err(|e| e.to_string())?;
        let loss = |b: &[f64]| -> f64 {
            (0..m).map(|i| w[i] * (z[i] - x.row(i).iter().zip(b).map(|(a, c)| a * c).sum::<f64>()).powi(2)).sum()
        };
        let best = loss(&beta);
        for _ in 0..50 {
            let cand: Vec<f64> = beta.iter().map(|b| b + r.random_range(-1e-3..1e-3)).collect();
            ensure(loss(&cand) >= best - 1e-9 * best.max(1.0), || "perturbed candidate beat the solve".into())?;
        }
    }
    Ok(())
}

// ---- estimators ----

fn fv(values: Vec<f64>) -> FeatureVector {
    FeatureVector::new(values).unwrap()
}

/// Binomial data from a known coefficient vector over standard-normal
/// features (plus intercept).
pub fn synthetic_logistic(seed: u64, beta: &[f64], count: usize, trials: u32) -> Vec<LabeledExample> {
    let mut r = rng(seed);
    (0..count)
        .map(|_| {
            let mut x = vec![1.0];
            x.extend((1..beta.len()).map(|_| -> f64 { StandardNormal.sample(&mut r) }));
            let p = win_probability(x.iter().zip(beta).map(|(a, b)| a * b).sum());
            let y = (0..trials).filter(|_| r.random::<f64>() < p).count() as f64;
            LabeledExample { x: fv(x), y, n: trials, discs: 30 }
        })
        .collect()
}

pub fn irls_trace_monotone() -> Check {
    for seed in 0..5 {
        let data = synthetic_logistic(40 + seed, &[0.4, -1.2, 0.8], 300, 20);
        let m = LogisticFitter::default().fit(&data).map_err(|e| e.to_string())?;
        let trace = &m.fit.as_ref().unwrap().log_likelihood_trace;
        for w in trace.windows(2) {
            ensure(w[1] >= w[0] - 1e-12 * w[0].abs().max(1.0), || format!("trace decreased: {trace:?}"))?;
        }
    }
    Ok(())
}

pub fn irls_unique_from_jittered_starts() -> Check {
    let data = synthetic_logistic(41, &[-0.3, 0.9, 0.5, -0.7], 500, 10);
    let fitter = LogisticFitter::new(1e-10, 100);
    let base = LogisticFitter::start_probabilities(&data);
    let mut r = rng(42);
    let mut fits = Vec::new();
    for _ in 0..2 {
        let start: Vec<f64> = base.iter().map(|p| (p + r.random_range(-0.01..0.01)).clamp(1e-3, 1.0 - 1e-3)).collect();
        fits.push(fitter.fit_from(&data, &start).map_err(|e| e.to_string())?.beta);
    }
    let gap = fits[0].iter().zip(&fits[1]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    ensure(gap < 1e-6, || format!("jittered starts disagree by {gap}"))
}

pub fn decisions_invariant_to_monotone_transform() -> Check {
    let mut r = rng(43);
    let beta: Vec<f64> = (0..NUM_FEATURES).map(|_| r.random_range(-0.3..0.3)).collect();
    let model = LogisticModel::from_coefficients(beta);
    let score = move |p: &Position| model.score(features::extract(p).unwrap().values());
    let score2 = score.clone();
    let plain = FnEval(move |p: &Position| win_probability(score(p)));
    let shifted = FnEval(move |p: &Position| win_probability(2.0 * score2(p) + 3.0));
    let limits = SearchLimits { max_depth: 1, wdl_empties_threshold: 0, node_budget: None };
    for p in positions_with_discs(44, 200, 8..=50) {
        if p.moves_mask() == 0 {
            continue;
        }
        let kids: Vec<Position> = board::squares(p.moves_mask()).map(|s| p.apply_move(Move::Place(s)).unwrap()).collect();
        let non_terminal: Vec<&Position> = kids.iter().filter(|k| !k.is_terminal()).collect();
        for a in &non_terminal {
            for b in &non_terminal {
                let (sa, sb) = (plain.0(a), plain.0(b));
                ensure((sa < sb) == (sa + 7.5 < sb + 7.5), || "constant shift changed order".into())?;
            }
        }
        let m1 = search::iterative_deepening(&p, &limits, &plain).unwrap();
        let m2 = search::iterative_deepening(&p, &limits, &shifted).unwrap();
        ensure(m1.best_move == m2.best_move, || format!("argmax changed under 2s+3\n{p}"))?;
    }
    Ok(())
}

fn gaussian_sample(r: &mut impl Rng, mu: &[f64], chol: &[Vec<f64>]) -> Vec<f64> {
    let z: Vec<f64> = (0..mu.len()).map(|_| -> f64 { StandardNormal.sample(&mut *r) }).collect();
    (0..mu.len()).map(|i| mu[i] + (0..=i).map(|k| chol[i][k] * z[k]).sum::<f64>()).collect()
}

fn class_data(r: &mut impl Rng, n: usize, mu: &[f64], chol: &[Vec<f64>], win: bool) -> Vec<LabeledExample> {
    (0..n)
        .map(|_| {
            let mut x = vec![1.0];
            x.extend(gaussian_sample(r, mu, chol));
            LabeledExample { x: fv(x), y: if win { 1.0 } else { 0.0 }, n: 1, discs: 30 }
        })
        .collect()
}

pub fn pooled_qda_equals_fisher(count: usize) -> Result<f64, String> {
    let mut r = rng(45);
    let chol_w = vec![vec![1.0, 0.0, 0.0], vec![0.3, 0.8, 0.0], vec![-0.2, 0.4, 1.1]];
    let chol_l = vec![vec![1.5, 0.0, 0.0], vec![-0.4, 0.6, 0.0], vec![0.1, 0.2, 0.7]];
    let mut data = class_data(&mut r, 400, &[1.0, -0.5, 0.3], &chol_w, true);
    data.extend(class_data(&mut r, 300, &[-0.2, 0.4, 0.0], &chol_l, false));
    let stats = fit_gaussian(&data, true).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for _ in 0..count {
        let mut x = vec![1.0];
        x.extend((0..3).map(|_| r.random_range(-4.0..4.0)));
        let x = fv(x);
        let q = qda_score(&stats, &x).map_err(|e| e.to_string())?;
        let f = fisher_score(&stats, &x).map_err(|e| e.to_string())?;
        worst = worst.max((q - f).abs()).max((win_probability(q) - win_probability(f)).abs());
    }
    ensure(worst < 1e-9, || format!("max |qda - fisher| = {worst:e}"))?;
    Ok(worst)
}

/// Held-out error rates (QDA, Fisher) for two Gaussian classes with
/// different covariances.
pub fn gaussian_error_rates(test_size: usize) -> Result<(f64, f64), String> {
    let mut r = rng(46);
    let (mu_w, chol_w) = ([0.8, 0.0], vec![vec![0.6, 0.0], vec![0.2, 0.5]]);
    let (mu_l, chol_l) = ([0.0, 0.3], vec![vec![1.6, 0.0], vec![-0.5, 1.4]]);
    let mut train = class_data(&mut r, 5000, &mu_w, &chol_w, true);
    train.extend(class_data(&mut r, 5000, &mu_l, &chol_l, false));
    let quad = fit_gaussian(&train, false).map_err(|e| e.to_string())?;
    let lin = fit_gaussian(&train, true).map_err(|e| e.to_string())?;
    let mut test = class_data(&mut r, test_size / 2, &mu_w, &chol_w, true);
    test.extend(class_data(&mut r, test_size / 2, &mu_l, &chol_l, false));
    let error = |score: &dyn Fn(&FeatureVector) -> f64| {
        test.iter().filter(|e| (score(&e.x) > 0.0) != (e.y == 1.0)).count() as f64 / test.len() as f64
    };
    let q = error(&|x| qda_score(&quad, x).unwrap());
    let f = error(&|x| fisher_score(&lin, x).unwrap());
    Ok((q, f))
}

pub fn qda_no_worse_than_fisher() -> Check {
    let (q, f) = gaussian_error_rates(100_000)?;
    ensure(q <= f + 0.005, || format!("QDA error {q} vs Fisher {f}"))
}

// ---- corpus ----

fn overlapping_records() -> Vec<GameRecord> {
    corpus::parse_games(&OVERLAPPING_GAMES.join("\n")).unwrap()
}

fn labels(g: &corpus::GameGraph) -> Vec<(Position, Option<Wdl>)> {
    g.nodes().map(|(p, n)| (*p, n.label)).collect()
}

pub fn propagation_matches_minimax(records: &[GameRecord]) -> Check {
    let graph = corpus::propagate_labels(corpus::build_graph(records));
    let oracle = oracles::observed_minimax(&records.iter().map(|r| r.moves.clone()).collect::<Vec<_>>());
    ensure(graph.len() == oracle.len(), || format!("graph has {} nodes, oracle {}", graph.len(), oracle.len()))?;
    for (p, node) in graph.nodes() {
        let want = oracle.get(p).copied();
        ensure(node.label == want, || format!("label {:?} vs oracle {want:?} at\n{p}", node.label))?;
    }
    Ok(())
}

pub fn games_round_trip() -> Check {
    let records = overlapping_records();
    let again = corpus::parse_games(&corpus::serialize_games(&records)).map_err(|e| e.to_string())?;
    ensure(again == records, || "round trip changed records".into())
}

pub fn graph_order_independent_and_stable() -> Check {
    let records = overlapping_records();
    let base = corpus::propagate_labels(corpus::build_graph(&records));
    let mut r = rng(51);
    for _ in 0..6 {
        let mut shuffled = records.clone();
        shuffled.shuffle(&mut r);
        let g = corpus::propagate_labels(corpus::build_graph(&shuffled));
        ensure(g == base, || "game order changed the graph".into())?;
    }
    let again = corpus::propagate_labels(base.clone());
    ensure(again == base, || "propagation not idempotent".into())?;
    ensure(base.is_consistent(), || "NegaMax consistency violated".into())?;

    // grow the corpus one game at a time, repeating lines, against the oracle
    for order in [[0, 1, 2], [2, 0, 1], [1, 2, 0]] {
        let mut subset: Vec<GameRecord> = Vec::new();
        for &i in &order {
            for _ in 0..2 {
                subset.push(records[i].clone());
                propagation_matches_minimax(&subset)?;
            }
        }
    }
    let g = corpus::propagate_labels(corpus::build_graph(&[records[0].clone()]));
    let before = labels(&g);
    let g2 = corpus::propagate_labels(corpus::build_graph(&[records[0].clone(), records[0].clone()]));
    ensure(labels(&g2) == before, || "repeating a game flipped labels".into())
}

// ---- search ----

pub fn negascout_equals_negamax(count: usize, max_depth: u32) -> Check {
    let eval = HeuristicEval;
    for (i, p) in positions_with_discs(61, count, 16..=44).iter().enumerate() {
        let depth = 1 + (i as u32 % max_depth);
        let want = oracles::naive_negamax(p, depth, &eval);
        let lib = search::negamax_eval(p, depth, &eval);
        let got = search::negascout(p, depth, 0.0, 1.0, &eval);
        ensure(lib == want && got == want, || format!("depth {depth}: negamax {lib}, negascout {got}, oracle {want}\n{p}"))?;
        for order in [MoveOrder::Squares, MoveOrder::Reversed] {
            let v = search::negascout_ordered(p, depth, 0.0, 1.0, &eval, order);
            ensure(v == want, || format!("{order:?} ordering changed the value"))?;
        }
        ensure((0.0..=1.0).contains(&got), || "value off the probability scale".into())?;
    }
    Ok(())
}

pub fn solver_matches_exhaustive(count: usize, max_empties: u32) -> Check {
    let lo = 64 - max_empties;
    for p in positions_with_discs(62, count, lo..=63) {
        let want = oracles::exhaustive_wdl(&p);
        let got = search::solve_wdl(&p).map_err(|e| e.to_string())?;
        ensure(got == want, || format!("solver {got:?} vs oracle {want:?}\n{p}"))?;
    }
    Ok(())
}

pub fn search_deterministic_and_scaled() -> Check {
    let limits = SearchLimits { max_depth: 4, wdl_empties_threshold: 10, node_budget: None };
    for p in positions_with_discs(63, 30, 10..=60) {
        let a = search::iterative_deepening(&p, &limits, &HeuristicEval).map_err(|e| e.to_string())?;
        let b = search::iterative_deepening(&p, &limits, &HeuristicEval).map_err(|e| e.to_string())?;
        ensure(a == b, || "search not deterministic".into())?;
        ensure((0.0..=1.0).contains(&a.score), || format!("score {} outside [0, 1]", a.score))?;
        if let Some(w) = a.exact {
            ensure(a.score == w.value(), || "exact score not in {0, 1/2, 1}".into())?;
        }
    }
    for p in random_positions(64, 3000).into_iter().filter(Position::is_terminal) {
        let v = search::negamax_eval(&p, 3, &HeuristicEval);
        ensure([0.0, 0.5, 1.0].contains(&v), || format!("terminal value {v}"))?;
    }
    Ok(())
}

// ---- arena ----

pub fn arena_fairness_and_conservation() -> Check {
    let limits = |d| SearchLimits { max_depth: d, wdl_empties_threshold: 8, node_budget: None };
    let a = EngineConfig::new("a", Arc::new(HeuristicEval), limits(2));
    let b = EngineConfig::new("b", Arc::new(HeuristicEval), limits(1));
    let openings: Vec<Position> =
        arena::random_book(4, 10, 71).iter().map(|l| board::replay(l.iter().copied()).unwrap()).collect();
    let ab = arena::play_match(&openings, &a, &b).map_err(|e| e.to_string())?;
    let ba = arena::play_match(&openings, &b, &a).map_err(|e| e.to_string())?;
    ensure(ab.total() == 2 * openings.len() as u32, || "each opening must give two games".into())?;
    ensure(ab.wins == ba.losses && ab.draws == ba.draws && ab.losses == ba.wins, || {
        format!("tally not conserved: {}-{}-{} vs {}-{}-{}", ab.wins, ab.draws, ab.losses, ba.wins, ba.draws, ba.losses)
    })?;
    for o in &openings {
        let colours: Vec<Color> = ab.games.iter().filter(|g| g.opening == *o).map(|g| g.a_colour).collect();
        ensure(colours.len() == 2 && colours[0] != colours[1], || "engine did not play both colours".into())?;
    }
    let pct = arena::winning_percentage(&ab);
    ensure((0.0..=1.0).contains(&pct), || "percentage out of range".into())?;
    let selfplay = arena::play_match(&openings, &a, &a).map_err(|e| e.to_string())?;
    ensure(arena::winning_percentage(&selfplay) == 0.5, || "self pairing not even".into())
}

/// Checked where it holds: moving a loss to a win never raises the p-value
/// while wins >= losses.
pub fn significance_monotone(total: u32) -> Check {
    for draws in [0, total / 5, total / 2] {
        let decisive = total - draws;
        let mut prev = f64::INFINITY;
        for wins in decisive.div_ceil(2)..=decisive {
            let (p, _) = arena::significance(&MatchTally::from_counts(wins, draws, decisive - wins), 0.05);
            ensure(p <= prev, || format!("p rose to {p} at wins={wins} draws={draws}"))?;
            ensure((0.0..=1.0).contains(&p), || "p outside [0, 1]".into())?;
            prev = p;
        }
    }
    Ok(())
}

/// Every check with its name, at the sizes the invariants call for.
pub fn all() -> Vec<(&'static str, Check)> {
    vec![
        ("board: move generation equals ray-scan oracle (10k)", move_generation_matches_ray_scan(10_000)),
        ("board: playouts respect rules", playouts_respect_rules(300)),
        ("features: antisymmetry (10k)", features_are_antisymmetric(10_000)),
        ("features: bounds and determinism", features_within_bounds(5_000)),
        ("linalg: factor/solve/log-det/inverse oracles", factorization_matches_oracles(60)),
        ("linalg: weighted solve minimizes", weighted_solve_minimizes(20)),
        ("estimators: IRLS trace monotone", irls_trace_monotone()),
        ("estimators: unique optimum from jittered starts", irls_unique_from_jittered_starts()),
        ("estimators: decisions invariant to monotone transform", decisions_invariant_to_monotone_transform()),
        ("estimators: pooled QDA equals Fisher", pooled_qda_equals_fisher(10_000).map(|_| ())),
        ("estimators: QDA no worse than Fisher on Gaussian data", qda_no_worse_than_fisher()),
        ("estimators: logistic recovery", logistic_recovery().map(|_| ())),
        ("corpus: game file round trip", games_round_trip()),
        ("corpus: graph order independence, idempotence, stability", graph_order_independent_and_stable()),
        ("search: NegaScout equals negamax, any ordering", negascout_equals_negamax(30, 4)),
        ("search: solver equals exhaustive", solver_matches_exhaustive(50, 8)),
        ("search: determinism and score scale", search_deterministic_and_scaled()),
        ("arena: colour fairness and tally conservation", arena_fairness_and_conservation()),
        ("arena: significance monotone", significance_monotone(200)),
    ]
}

pub struct Recovery {
    pub max_error: f64,
    pub iterations: usize,
}

pub const RECOVERY_BETA: [f64; 5] = [0.4, -0.9, 0.6, 0.25, -0.5];

/// Fits clamped Bernoulli data drawn from [`RECOVERY_BETA`].
pub fn logistic_recovery() -> Result<Recovery, String> {
    let raw = synthetic_logistic(47, &RECOVERY_BETA, 20_000, 1);
    let data = sfc_core::estimators::clamp_boundary_labels(raw);
    let m = LogisticFitter::new(1e-8, 50).fit(&data).map_err(|e| e.to_string())?;
    let max_error = m.beta.iter().zip(RECOVERY_BETA).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let fit = m.fit.unwrap();
    ensure(fit.converged, || "did not converge".into())?;
    ensure(max_error < 0.15, || format!("max coefficient error {max_error}"))?;
    ensure(fit.iterations <= 15, || format!("{} iterations", fit.iterations))?;
    Ok(Recovery { max_error, iterations: fit.iterations })
}
