//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line per
//! criterion and exits nonzero if any failed.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ihara_core::entropy::{
    formal_group_log_series, ihara_entropy, joint_entropy_check, maximizer, shannon_entropy, tsallis_entropy,
    EntropyParams, FormalGroup, ProbabilityDistribution, Scale, MAXIMIZER_TOL,
};
use ihara_core::graph::{orientations, Graph};
use ihara_core::line_graph::{OrientedLineGraph, PowerIteration};
use ihara_core::primes::{count_closed_walks_bruteforce, enumerate_primes, euler_product_series, DEFAULT_DFS_BUDGET};
use ihara_core::zeta::{zeta_coefficients, ZetaModel};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn graphs() -> Vec<(&'static str, Graph)> {
    vec![
        ("K4", Graph::complete(4)),
        ("wheel", Graph::reflector_wheel()),
        ("diamond", Graph::diamond()),
        ("Petersen", Graph::petersen()),
    ]
}

fn olg(g: &Graph) -> OrientedLineGraph {
    OrientedLineGraph::build(orientations(g).expect("admissible"))
}

fn model(g: &Graph, order: usize) -> Arc<ZetaModel> {
    Arc::new(ZetaModel::build(g, order, &PowerIteration::default()).expect("model builds"))
}

fn params(g: &Graph) -> EntropyParams {
    EntropyParams::new(model(g, 32), Scale::Fraction(0.5)).expect("scale in domain")
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

/// Euler product over primes equals the exp-trace series to order 8.
fn series_identity() -> Outcome {
    let start = Instant::now();
    for (name, g) in graphs() {
        let t = olg(&g);
        let primes = enumerate_primes(&t, 8, DEFAULT_DFS_BUDGET).map_err(err)?;
        let euler = euler_product_series(&primes, 8).map_err(err)?;
        let traces = zeta_coefficients(&t.traces(8), 8).map_err(err)?;
        ensure(euler == traces, || format!("{name}: {euler:?} != {traces:?}"))?;
    }
    let elapsed = start.elapsed();
    ensure(elapsed <= Duration::from_secs(60), || format!("took {elapsed:?}"))?;
    Ok(format!("4 graphs, order 8, exact, {:.2?}", elapsed))
}

/// Traces equal exhaustive closed-walk counts for k <= 8.
fn trace_oracle() -> Outcome {
    for (name, g) in graphs() {
        let t = olg(&g);
        let tv = t.traces(8);
        for k in 1..=8 {
            let brute = count_closed_walks_bruteforce(&t, k, DEFAULT_DFS_BUDGET).map_err(err)?;
            ensure(*tv.get(k) == brute, || {
                format!("{name}: tr T^{k} = {} vs {brute}", tv.get(k))
            })?;
        }
        ensure(tv.get(1).is_zero() && tv.get(2).is_zero(), || {
            format!("{name}: tr T or tr T^2 nonzero")
        })?;
        if name == "K4" {
            ensure(*tv.get(3) == BigUint::from(24u32), || {
                format!("K4: tr T^3 = {}", tv.get(3))
            })?;
        }
    }
    Ok("k <= 8 on 4 graphs; tr T = tr T^2 = 0; K4 tr T^3 = 24".into())
}

/// Series evaluation stays within its reported bound of the determinant
/// value; the bound is small well inside the disc.
fn evaluation_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst_ratio = 0.0f64;
    let mut worst_tail = 0.0f64;
    for (name, g) in graphs() {
        let m = model(&g, 32);
        let lambda = m.lambda();
        for _ in 0..100 {
            let x = rng.gen_range(0.0..=0.9 / lambda);
            let s = m.series.eval(x).map_err(err)?;
            let exact = m.eval_exact(x).map_err(err)?;
            let diff = (s.value - exact).abs();
            ensure(diff <= s.error_bound, || {
                format!("{name}: x = {x}, |{} - {exact}| = {diff} > {}", s.value, s.error_bound)
            })?;
            if s.error_bound > 0.0 {
                worst_ratio = worst_ratio.max(diff / s.error_bound);
            }
        }
        for i in 0..=50 {
            let x = 0.5 / lambda * i as f64 / 50.0;
            let tail = m.series.tail_bound(x);
            ensure(tail <= 1e-6, || format!("{name}: tail bound {tail} at x = {x}"))?;
            worst_tail = worst_tail.max(tail);
        }
    }
    Ok(format!(
        "400 points, max |diff|/bound {worst_ratio:.3}; max tail bound for x <= 0.5/lambda {worst_tail:.2e}"
    ))
}

/// lambda = 2 for the 3-regular graphs.
fn regular_radius() -> Outcome {
    let mut report = Vec::new();
    for g in [Graph::complete(4), Graph::petersen()] {
        let sr = olg(&g).spectral_radius(&PowerIteration::default()).map_err(err)?;
        ensure((sr.lambda - 2.0).abs() <= 1e-10, || format!("lambda = {}", sr.lambda))?;
        report.push(format!("{:.2e}", (sr.lambda - 2.0).abs()));
    }
    Ok(format!("|lambda - 2| = {} (K4, Petersen)", report.join(", ")))
}

fn entropy_of(p: &[f64], params: &EntropyParams) -> Result<f64, String> {
    let d = ProbabilityDistribution::new(p.to_vec()).map_err(err)?;
    Ok(ihara_entropy(&d, params).map_err(err)?.entropy)
}

fn random_distribution(rng: &mut ChaCha8Rng) -> ProbabilityDistribution {
    let w = rng.gen_range(2..=4);
    let raw: Vec<f64> = (0..w).map(|_| rng.gen_range(0.01..1.0)).collect();
    let total: f64 = raw.iter().sum();
    ProbabilityDistribution::new(raw.iter().map(|x| x / total).collect()).expect("normalised")
}

/// Continuity, expansibility, maximality at the uniform distribution and
/// the composition law for independent systems.
fn shannon_khinchin() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst_delta = 0.0f64;
    for (name, g) in graphs() {
        let p = params(&g);

        // 1. |s(p') - s(p)| <= L |p' - p| on a 10^4 grid, L = sup |s'|
        let lip = p.h(0.0).map_err(err)?.abs().max(p.h(1.0).map_err(err)?.abs()) / p.normalizer();
        let n = 10_000;
        let mut prev = p.term(0.0).map_err(err)?;
        for i in 1..=n {
            let x = i as f64 / n as f64;
            let cur = p.term(x).map_err(err)?;
            let step = (cur - prev).abs();
            ensure(step <= lip / n as f64 + 1e-12, || {
                format!("{name}: continuity step {step} at p = {x} exceeds {}", lip / n as f64)
            })?;
            prev = cur;
        }

        // 2. adding a zero-probability event changes nothing
        for _ in 0..20 {
            let d = random_distribution(&mut rng);
            let s = ihara_entropy(&d, &p).map_err(err)?.entropy;
            let s0 = ihara_entropy(&d.with_zero_event(), &p).map_err(err)?.entropy;
            ensure(s == s0, || format!("{name}: expansibility {s} vs {s0}"))?;
        }

        // 3. maximum at the uniform distribution, 0.01 simplex grid
        let mut best = (f64::NEG_INFINITY, 0usize);
        for i in 0..=100 {
            let x = i as f64 / 100.0;
            let s = entropy_of(&[x, 1.0 - x], &p)?;
            if s > best.0 {
                best = (s, i);
            }
        }
        ensure(best.1 == 50, || format!("{name}: W = 2 argmax at {}", best.1))?;
        let uniform3 = entropy_of(&[1.0 / 3.0; 3], &p)?;
        let mut best3 = (f64::NEG_INFINITY, [0usize; 3]);
        for i in 0..=100usize {
            for j in 0..=100 - i {
                let k = 100 - i - j;
                let s = entropy_of(&[i as f64 / 100.0, j as f64 / 100.0, k as f64 / 100.0], &p)?;
                if s > best3.0 {
                    best3 = (s, [i, j, k]);
                }
            }
        }
        let dist = best3
            .1
            .iter()
            .map(|&c| (c as f64 / 100.0 - 1.0 / 3.0).abs())
            .fold(0.0, f64::max);
        ensure(dist <= 0.01 && uniform3 >= best3.0, || {
            format!(
                "{name}: W = 3 grid argmax {:?} ({}), uniform {uniform3}",
                best3.1, best3.0
            )
        })?;

        // 4. S(P_A P_B) against the law composed over the pairs
        for _ in 0..50 {
            let a = random_distribution(&mut rng);
            let b = random_distribution(&mut rng);
            let r = joint_entropy_check(&a, &b, &p).map_err(err)?;
            ensure(r.delta <= 1e-6, || {
                format!("{name}: joint delta {} for {a:?} x {b:?}", r.delta)
            })?;
            worst_delta = worst_delta.max(r.delta);
        }
    }
    Ok(format!(
        "continuity, expansibility, uniform argmax (W = 2, 3), 200 joint pairs with max delta {worst_delta:.2e}"
    ))
}

/// Root of h, monotone h, concave s.
fn maximizer_certificate() -> Outcome {
    let mut out = Vec::new();
    for (name, g) in graphs() {
        let p = params(&g);
        let m = maximizer(&p, MAXIMIZER_TOL).map_err(err)?;
        ensure(m.h_at_c.abs() <= 1e-12, || {
            format!("{name}: |h(c)| = {}", m.h_at_c.abs())
        })?;
        let n = 1000;
        let grid: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
        let hs = grid
            .iter()
            .map(|&x| p.h(x))
            .collect::<Result<Vec<_>, _>>()
            .map_err(err)?;
        ensure(hs.windows(2).all(|w| w[1] < w[0]), || {
            format!("{name}: h not strictly decreasing")
        })?;
        let ss = grid
            .iter()
            .map(|&x| p.term(x))
            .collect::<Result<Vec<_>, _>>()
            .map_err(err)?;
        let worst = ss
            .windows(3)
            .map(|w| w[2] - 2.0 * w[1] + w[0])
            .fold(f64::NEG_INFINITY, f64::max);
        ensure(worst <= 1e-8, || format!("{name}: second difference {worst}"))?;
        out.push(format!("{name} c = {:.6}", m.c));
    }
    Ok(out.join(", "))
}

/// Exact normalisation and inversion of G, law axioms to total degree 16.
fn formal_group_law() -> Outcome {
    let results: Vec<Result<String, String>> = std::thread::scope(|scope| {
        let handles: Vec<_> = graphs()
            .into_iter()
            .map(|(name, g)| {
                scope.spawn(move || -> Result<String, String> {
                    let p = params(&g);
                    let log = formal_group_log_series(&p, 32).map_err(err)?;
                    ensure(log.coeff(0).is_zero() && log.coeff(1).is_one(), || {
                        format!("{name}: a_0 = {}, a_1 = {}", log.coeff(0), log.coeff(1))
                    })?;
                    let group = FormalGroup::new(&p, 32).map_err(err)?;
                    ensure(group.log.compose(&group.exp).map_err(err)?.is_identity(), || {
                        format!("{name}: G(F(t)) != t mod t^33")
                    })?;
                    ensure(group.exp.compose(&group.log).map_err(err)?.is_identity(), || {
                        format!("{name}: F(G(t)) != t mod t^33")
                    })?;
                    let checks = group.check_axioms(16).map_err(err)?;
                    ensure(checks.all_pass(), || format!("{name}: {checks:?}"))?;
                    Ok(format!("{name} a = {}", p.a_exact()))
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|_| Err("worker panicked".into())))
            .collect()
    });
    let names = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    Ok(format!(
        "inverse mod t^33, axioms to degree 16 exact: {}",
        names.join(", ")
    ))
}

/// Tsallis tends to Shannon; a certain outcome carries no entropy.
fn comparator_sanity() -> Outcome {
    let u4 = ProbabilityDistribution::uniform(4);
    let shannon = shannon_entropy(&u4);
    for q in [1.0 - 1e-8, 1.0 + 1e-8] {
        let t = tsallis_entropy(&u4, q).map_err(err)?;
        ensure((t - shannon).abs() <= 1e-6, || format!("q = {q}: {t} vs {shannon}"))?;
    }
    let certain = ProbabilityDistribution::new(vec![1.0]).map_err(err)?;
    for (name, g) in graphs() {
        let s = ihara_entropy(&certain, &params(&g)).map_err(err)?.entropy;
        ensure(s == 0.0, || format!("{name}: S(1) = {s}"))?;
    }
    Ok("Tsallis within 1e-6 of Shannon at q = 1 +- 1e-8; S = 0 on a point mass".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("1 series identity", series_identity),
        ("2 trace oracle", trace_oracle),
        ("3 evaluation oracle", evaluation_oracle),
        ("4 regular spectral radius", regular_radius),
        ("5 Shannon-Khinchin axioms", shannon_khinchin),
        ("6 maximizer certificate", maximizer_certificate),
        ("7 formal group law", formal_group_law),
        ("8 comparator sanity", comparator_sanity),
    ];
    let mut failed = 0;
    for (label, run) in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {label} ({secs:.1}s): {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {label} ({secs:.1}s): {why}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 8 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
