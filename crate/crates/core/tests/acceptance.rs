//! Acceptance checks. Runs without the libtest harness and prints one
//! PASS/FAIL line per criterion; exits nonzero if any fails.

use std::fs;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rayon::prelude::*;

use wflo::bench::run_bench;
use wflo::evaluation::{efficiency, ideal_objective, objective};
use wflo::ga::{crossover, mutate, CrossoverKind, GAParams, RngStream};
use wflo::io::ConvergenceWriter;
use wflo::optimizer::{run, run_ga, run_observed, run_rlga, Algorithm, RunConfig};
use wflo::qlearn::{next_state, Action, ActionSpace, AgentState, Hyperparams, QTable};
use wflo::wake::{overlap_area, single_wake_deficit};
use wflo::wind::expected_power;
use wflo::{CandidateLayout, CaseId, Extent, Genome, LayoutKind, Point, TurbineSpec, WindScenario};

type Check = fn() -> Outcome;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    values[(values.len() - 1) / 2]
}

/// Deficit from the momentum-theory closed form, written out independently.
fn deficit_oracle(x: f64) -> f64 {
    let (r, zh, z0, ct) = (20.0_f64, 60.0_f64, 0.3_f64, 0.88_f64);
    let a = 0.5 * (1.0 - (1.0 - ct).sqrt());
    let r1 = r * ((1.0 - a) / (1.0 - 2.0 * a)).sqrt();
    let alpha = 0.5 / (zh / z0).ln();
    2.0 * a / (1.0 + alpha * x / r1).powi(2)
}

fn wake_analytics() -> Outcome {
    let spec = TurbineSpec::default();
    let d0 = single_wake_deficit(0.0, &spec).unwrap();
    let d200 = single_wake_deficit(200.0, &spec).unwrap();
    let pass = (d0 - 0.65359).abs() <= 1e-5
        && (d200 - 0.23241).abs() <= 1e-5
        && (d0 - deficit_oracle(0.0)).abs() <= 1e-12
        && (d200 - deficit_oracle(200.0)).abs() <= 1e-12;
    outcome(pass, format!("deficit(0) = {d0:.7}, deficit(200 m) = {d200:.7}"))
}

/// Fraction of a rotor disk at the origin covered by a wake circle at
/// distance `d`, by sampling the disk's bounding square.
fn overlap_monte_carlo(d: f64, r: f64, rw: f64, samples: usize, rng: &mut RngStream) -> f64 {
    let mut hits = 0usize;
    for _ in 0..samples {
        let x = rng.gen_range(-r..r);
        let y = rng.gen_range(-r..r);
        if x * x + y * y <= r * r && (x - d).powi(2) + y * y <= rw * rw {
            hits += 1;
        }
    }
    4.0 * r * r * hits as f64 / samples as f64
}

fn overlap_oracle() -> Outcome {
    let mut rng = RngStream::seed_from_u64(2024);
    let triples: Vec<(f64, f64, f64, u64)> = (0..100)
        .map(|_| {
            let r = rng.gen_range(10.0..40.0);
            // wakes start wider than the rotor and only grow
            let rw = rng.gen_range(r..5.0 * r);
            let d = rng.gen_range(0.0..r + rw + 5.0);
            (d, r, rw, rng.gen())
        })
        .collect();
    let worst = triples
        .par_iter()
        .map(|&(d, r, rw, seed)| {
            let mut local = RngStream::seed_from_u64(seed);
            let mc = overlap_monte_carlo(d, r, rw, 10_000_000, &mut local);
            (overlap_area(d, r, rw) - mc).abs() / (std::f64::consts::PI * r * r)
        })
        .reduce(|| 0.0, f64::max);
    outcome(worst <= 0.01, format!("100 triples, 1e7 samples each, worst error {:.4}% of rotor area", 100.0 * worst))
}

fn table_closure() -> Outcome {
    let uniform = WindScenario::unidirectional();
    let rows = [
        (14310.0, 30, 0.0015436, 0.9202),
        (19898.0, 40, 0.0013816, 0.9596),
        (20631.0, 42, 0.0013887, 0.9476),
        (20096.0, 41, 0.0013966, 0.9455),
    ];
    let mut pass = true;
    let mut worst_f: f64 = 0.0;
    let mut worst_eta: f64 = 0.0;
    for (p, n, f, eta) in rows {
        let df = (objective(p, n).unwrap() - f).abs();
        let de = (efficiency(p, n, &uniform).unwrap() - eta).abs();
        worst_f = worst_f.max(df);
        worst_eta = worst_eta.max(de);
        pass &= df <= 1e-4 && de <= 2e-4;
    }
    let ideal_a = ideal_objective(&uniform);
    let ideal_c = ideal_objective(&WindScenario::spread_default());
    let rel_a = (ideal_a / 1.286e-3 - 1.0).abs();
    let rel_c = (ideal_c / 6.785e-4 - 1.0).abs();
    pass &= rel_a <= 0.005 && rel_c <= 0.005;
    outcome(
        pass,
        format!(
            "max |f_obj err| {worst_f:.2e}, max |eta err| {worst_eta:.2e}, ideal {ideal_a:.5e} ({:+.3}%), spread ideal {ideal_c:.5e} ({:+.3}%)",
            100.0 * (ideal_a / 1.286e-3 - 1.0),
            100.0 * (ideal_c / 6.785e-4 - 1.0)
        ),
    )
}

fn case_ia_reproduction() -> Outcome {
    let best_of = |layout: LayoutKind| {
        let config = RunConfig {
            case: CaseId::IA,
            layout,
            algorithm: Algorithm::Rlga,
            generations: 20_000,
            ..Default::default()
        };
        let evaluator = config.evaluator(None).unwrap();
        (1..=5u64)
            .into_par_iter()
            .map(|seed| run(&evaluator, &RunConfig { seed, ..config.clone() }).unwrap())
            .min_by(|a, b| a.best_eval.objective.total_cmp(&b.best_eval.objective))
            .unwrap()
    };
    let aligned = best_of(LayoutKind::Aligned);
    let sunflower = best_of(LayoutKind::Sunflower);
    let bar = 0.0015436 * 1.005;
    let aligned_ok = aligned.best_eval.objective <= bar;
    let sunflower_ok =
        sunflower.best_eval.objective < sunflower.initial().best_objective && sunflower.best_eval.efficiency >= 0.90;
    outcome(
        aligned_ok && sunflower_ok,
        format!(
            "aligned f_obj {:.7} (bar {bar:.7}, N {}, eta {:.4}); sunflower f_obj {:.7} from {:.7}, eta {:.4}",
            aligned.best_eval.objective,
            aligned.best_eval.turbine_count,
            aligned.best_eval.efficiency,
            sunflower.best_eval.objective,
            sunflower.initial().best_objective,
            sunflower.best_eval.efficiency
        ),
    )
}

fn convergence_advantage() -> Outcome {
    let config = RunConfig { case: CaseId::IIA, layout: LayoutKind::Aligned, generations: 3000, ..Default::default() };
    let evaluator = config.evaluator(None).unwrap();
    let seeds: Vec<u64> = (1..=10).collect();
    let report = run_bench(&evaluator, &config, &seeds, None).unwrap();
    let ga = report.median_generations(Algorithm::Ga);
    let rlga = report.median_generations(Algorithm::Rlga);
    let evals = |runs: &[wflo::RunResult]| runs.iter().map(|r| r.evaluations).sum::<usize>();
    let pass = match (ga, rlga) {
        (Some(g), Some(r)) => (r as f64) <= 0.6 * g as f64,
        _ => false,
    };
    let show = |g: Option<usize>| g.map_or("never".to_string(), |g| g.to_string());
    outcome(
        pass,
        format!(
            "case IIA, 10 paired seeds, 3000 generations, target {:.2}: median generations GA {} vs RLGA {} (evaluations GA {} / RLGA {})",
            report.target,
            show(ga),
            show(rlga),
            evals(&report.ga),
            evals(&report.rlga)
        ),
    )
}

fn degenerate_equivalence() -> Outcome {
    let action = Action { parents_mating: 2, crossover: CrossoverKind::SinglePoint, mutation_percent: 4.0 };
    let mut checked = 0;
    let mut pass = true;
    for (case, layout, seed) in [
        (CaseId::IA, LayoutKind::Aligned, 1),
        (CaseId::IC, LayoutKind::Sunflower, 2),
        (CaseId::IIA, LayoutKind::Staggered, 3),
    ] {
        let config = RunConfig {
            case,
            layout,
            seed,
            generations: 2000,
            ga: GAParams::default(),
            rl_actions: ActionSpace::single(action),
            ..Default::default()
        };
        let evaluator = config.evaluator(None).unwrap();
        let ga = run_ga(&evaluator, &config).unwrap();
        let rl = run_rlga(&evaluator, &config).unwrap();
        pass &= ga.best == rl.best
            && ga.history.len() == rl.history.len()
            && ga.history.iter().zip(&rl.history).all(|(g, r)| {
                g.best_fitness.to_bits() == r.best_fitness.to_bits()
                    && g.best_objective.to_bits() == r.best_objective.to_bits()
                    && g.turbines == r.turbines
            });
        checked += ga.history.len();
    }
    outcome(pass, format!("{checked} generation records compared bit for bit over 3 cases"))
}

fn property_suites() -> Outcome {
    let mut failures: Vec<&str> = Vec::new();
    let mut check = |ok: bool, name: &'static str| {
        if !ok {
            failures.push(name);
        }
    };

    // elitist monotonicity
    let config = RunConfig { generations: 500, ..Default::default() };
    let evaluator = config.evaluator(None).unwrap();
    let monotone = (1..=10u64).all(|seed| {
        [Algorithm::Ga, Algorithm::Rlga].iter().all(|&algorithm| {
            let r = run(&evaluator, &RunConfig { seed, algorithm, ..config.clone() }).unwrap();
            r.history.windows(2).all(|w| w[1].best_fitness >= w[0].best_fitness)
        })
    });
    check(monotone, "elitist monotonicity");

    // byte-identical convergence CSVs
    let dir = tempfile::tempdir().unwrap();
    let identical = [Algorithm::Ga, Algorithm::Rlga].iter().all(|&algorithm| {
        let c = RunConfig { algorithm, seed: 42, generations: 1000, ..config.clone() };
        let files: Vec<Vec<u8>> = (0..2)
            .map(|i| {
                let path = dir.path().join(format!("{algorithm}_{i}.csv"));
                let mut w = ConvergenceWriter::create(&path, algorithm).unwrap();
                run_observed(&evaluator, &c, |rec| w.write(rec)).unwrap();
                fs::read(&path).unwrap()
            })
            .collect();
        files[0] == files[1]
    });
    check(identical, "seed determinism");

    // crossover closure
    let mut rng = RngStream::seed_from_u64(7);
    let closed = (0..1000).all(|t| {
        let n = rng.gen_range(2..300);
        let a = Genome::new((0..n).map(|_| rng.gen()).collect());
        let b = Genome::new((0..n).map(|_| rng.gen()).collect());
        let (c, d) = crossover(&a, &b, CrossoverKind::ALL[t % 4], &mut rng).unwrap();
        (0..n).all(|i| (c.get(i) == a.get(i) || c.get(i) == b.get(i)) && (d.get(i) == a.get(i) || d.get(i) == b.get(i)))
    });
    check(closed, "crossover closure");

    // mutation Hamming exactness
    let exact = mutate(Genome::zeros(100), 4.0, &mut rng).count_ones() == 4
        && mutate(Genome::zeros(25), 1.0, &mut rng).count_ones() == 1
        && (0..500).all(|_| {
            let n = rng.gen_range(1..1000);
            let pct = rng.gen_range(1..=4) as f64;
            let g = Genome::new((0..n).map(|_| rng.gen()).collect());
            let expected = ((pct / 100.0 * n as f64).round() as usize).max(1);
            mutate(g.clone(), pct, &mut rng).hamming(&g) == expected
        });
    check(exact, "mutation exactness");

    // one-step Bellman cases
    let hyper = Hyperparams { alpha: 0.1, gamma: 0.9, epsilon: 0.1 };
    let mut q = QTable::seeded(1, hyper).unwrap();
    for s in [AgentState::NoImprovement, AgentState::Improved] {
        for a in 0..32 {
            q.set(s, a, 0.0);
        }
    }
    let mut first = q.clone();
    first.update(AgentState::NoImprovement, 0, 1.0, AgentState::Improved);
    q.set(AgentState::NoImprovement, 5, 0.5);
    q.set(AgentState::Improved, 9, 1.0);
    q.update(AgentState::NoImprovement, 5, 0.0, AgentState::Improved);
    check(
        (first.get(AgentState::NoImprovement, 0) - 0.1).abs() < 1e-12
            && (q.get(AgentState::NoImprovement, 5) - 0.54).abs() < 1e-12,
        "Bellman cases",
    );

    // strict improvement
    check(
        next_state(8.0, 8.0) == AgentState::NoImprovement
            && next_state(10.0, 8.0) == AgentState::Improved
            && next_state(7.0, 8.0) == AgentState::NoImprovement,
        "next_state strictness",
    );

    // omnidirectional rotation invariance
    let extent = Extent::square(2000.0);
    let center = extent.center();
    let scenario = WindScenario::omnidirectional();
    let spec = TurbineSpec::default();
    let invariant = (0..50).all(|_| {
        let polar: Vec<(f64, f64)> =
            (0..rng.gen_range(2..20)).map(|_| (rng.gen_range(0.0..900.0), rng.gen_range(0.0..360.0))).collect();
        let place = |shift: f64| {
            let pts = polar
                .iter()
                .map(|&(rad, ang)| {
                    let t = (ang + shift).to_radians();
                    Point::new(center.x + rad * t.cos(), center.y + rad * t.sin())
                })
                .collect();
            CandidateLayout::custom(extent, pts).unwrap()
        };
        let turns = rng.gen_range(1..36) as f64;
        let (a, b) = (place(0.0), place(10.0 * turns));
        let genome = Genome::ones(a.len());
        let pa = expected_power(&genome, &a, &scenario, &spec).unwrap();
        let pb = expected_power(&genome, &b, &scenario, &spec).unwrap();
        (pa - pb).abs() <= 1e-6 * pa
    });
    check(invariant, "rotation invariance");

    if failures.is_empty() {
        outcome(true, "monotonicity, determinism, closure, mutation, Bellman, next_state, rotation all hold")
    } else {
        outcome(false, format!("failed: {}", failures.join(", ")))
    }
}

fn large_farm_ordering() -> Outcome {
    const GENERATIONS: usize = 200_000;
    const SEEDS: u64 = 5;
    let kinds = LayoutKind::GENERATED;
    let evaluators: Vec<_> = kinds
        .iter()
        .map(|&layout| RunConfig { case: CaseId::IIIA, layout, ..Default::default() }.evaluator(None).unwrap())
        .collect();
    let jobs: Vec<(usize, u64)> = (0..kinds.len()).flat_map(|k| (1..=SEEDS).map(move |s| (k, s))).collect();
    let results: Vec<(usize, f64, usize)> = jobs
        .par_iter()
        .map(|&(k, seed)| {
            let config = RunConfig {
                case: CaseId::IIIA,
                layout: kinds[k],
                generations: GENERATIONS,
                seed,
                ..Default::default()
            };
            let r = run(&evaluators[k], &config).unwrap();
            (k, r.best_eval.efficiency, r.best_eval.turbine_count)
        })
        .collect();
    let stats: Vec<(f64, f64)> = (0..kinds.len())
        .map(|k| {
            let mut eta: Vec<f64> = results.iter().filter(|r| r.0 == k).map(|r| r.1).collect();
            let mut n: Vec<f64> = results.iter().filter(|r| r.0 == k).map(|r| r.2 as f64).collect();
            (median(&mut eta), median(&mut n))
        })
        .collect();
    let index = |kind: LayoutKind| kinds.iter().position(|&k| k == kind).unwrap();
    let (aligned, staggered) = (index(LayoutKind::Aligned), index(LayoutKind::Staggered));
    let lowest = (0..kinds.len()).all(|k| k == aligned || stats[k].0 > stats[aligned].0);
    let highest = (0..kinds.len()).all(|k| k == staggered || stats[k].0 < stats[staggered].0);
    let counts = stats.iter().all(|&(_, n)| (90.0..=120.0).contains(&n));
    let table: Vec<String> = kinds.iter().zip(&stats).map(|(k, (eta, n))| format!("{k} eta {eta:.4} N {n}")).collect();
    outcome(
        lowest && highest && counts,
        format!("case IIIA, RLGA, {GENERATIONS} generations, medians of {SEEDS} seeds: {}", table.join("; ")),
    )
}

fn main() {
    let criteria: [(&str, Check); 8] = [
        ("wake analytics", wake_analytics),
        ("overlap-area oracle", overlap_oracle),
        ("table closure", table_closure),
        ("case IA reproduction", case_ia_reproduction),
        ("convergence advantage", convergence_advantage),
        ("degenerate equivalence", degenerate_equivalence),
        ("property suites", property_suites),
        ("large-farm ordering", large_farm_ordering),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = check();
        println!(
            "criterion {} [{name}]: {} ({:.1}s) {}",
            i + 1,
            if o.pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64(),
            o.detail
        );
        failed += usize::from(!o.pass);
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
