//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use num_bigint::BigUint;
use zeck_core::experiments::{run_gap_scan, TrialRecord};
use zeck_core::report::to_canonical_json;
use zeck_core::{
    bad_probability, census_bad_c2, check_lemmas, count_bad_c2, decompose,
    exact_distribution_prefix, fib, ks_to_normal, recompose, run_counterexample, run_moment_slopes,
    run_theorem1, standardize, AlphaRule, ExperimentConfig, IntervalParams, LemmaReport, QRule,
    SamplingMode,
};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn zeckendorf_correctness() -> Outcome {
    let mut code = decompose(&BigUint::default());
    for m in 0u32..=1_000_000 {
        let value = BigUint::from(m);
        let d = decompose(&value);
        if recompose(d.coeffs()).ok() != Some(value) || d != code {
            return outcome(false, format!("round trip fails at m = {m}"));
        }
        code.increment();
    }
    let fibs: Vec<u64> = (0..=24)
        .map(|k| zeck_core::fib::fib_u64(k).unwrap())
        .collect();
    for k in 1..=22usize {
        let size = fibs[k + 1] as usize;
        let mut hit = vec![false; size];
        let mut legal = 0usize;
        for bits in 0u32..(1 << k) {
            if bits & (bits >> 1) != 0 {
                continue;
            }
            legal += 1;
            let v: u64 = (0..k)
                .filter(|i| bits >> i & 1 == 1)
                .map(|i| fibs[i + 1])
                .sum();
            if v as usize >= size || std::mem::replace(&mut hit[v as usize], true) {
                return outcome(
                    false,
                    format!("length {k}: value {v} out of range or repeated"),
                );
            }
        }
        if legal != size {
            return outcome(
                false,
                format!("length {k}: {legal} legal strings, F_{} = {size}", k + 1),
            );
        }
    }
    outcome(
        true,
        "m in [0, 1e6] round-trips; legal strings biject for k <= 22",
    )
}

fn census() -> Outcome {
    let mut sets = 0;
    for n in 4..=18 {
        for p in IntervalParams::all_for(n) {
            let (bad, _) = census_bad_c2(&p).unwrap();
            if bad != count_bad_c2(&p) {
                return outcome(
                    false,
                    format!("{p:?}: census {bad}, formula {}", count_bad_c2(&p)),
                );
            }
            sets += 1;
        }
    }
    let p = bad_probability(&IntervalParams::new(12, 4, 4).unwrap());
    let example = p.bad_count == BigUint::from(31u32) && p.total == BigUint::from(144u32);
    outcome(
        example,
        format!(
            "{sets} parameter sets match; (12,4,4) -> {} of {}",
            p.bad_count, p.total
        ),
    )
}

fn gap_rate() -> Outcome {
    let p = bad_probability(&IntervalParams::new(200, 100, 12).unwrap());
    let ratio = p.probability / p.asymptote;
    println!(
        "  note: the phi^(-q) constant gives ratio {:.6} (off by phi = {:.6})",
        p.probability / p.asymptote_minus_q,
        p.asymptote / p.asymptote_minus_q
    );
    outcome(
        (0.98..=1.02).contains(&ratio),
        format!(
            "exact {:.6e} / (2/sqrt5) phi^(1-q) = {ratio:.6}",
            p.probability
        ),
    )
}

fn c3_constant(r: &LemmaReport) -> Outcome {
    outcome(
        r.total.c3_failures == 0,
        format!(
            "{} gap cases over {} parameter sets, {} high-block changes",
            r.total.gap_cases, r.total.param_sets, r.total.c3_failures
        ),
    )
}

fn defect_and_bijection(r: &LemmaReport) -> Outcome {
    println!(
        "  note: the plain low-part offset leaves [0, q) at {} of {} offsets",
        r.total.truncated_rule_violations, r.total.offsets
    );
    outcome(
        r.total.defect_failures == 0 && r.total.bijection_failures == 0,
        format!(
            "{} offsets, defect failures {}, non-bijective intervals {}, max defect {}",
            r.total.offsets,
            r.total.defect_failures,
            r.total.bijection_failures,
            r.total.max_defect
        ),
    )
}

/// The first 50 gap-case trials at n = 60, alpha = 24, q = 6.
fn n60_trials() -> Vec<TrialRecord> {
    let mut c = ExperimentConfig::new(60, 80, 7);
    c.alpha_rule = AlphaRule::Fixed(24);
    c.q_rule = QRule::FourthRoot;
    c.mode = SamplingMode::Exhaustive;
    let r = run_theorem1(&c).unwrap();
    r.trials
        .into_iter()
        .filter(|t| t.gap_found)
        .take(50)
        .collect()
}

fn sandwich(r: &LemmaReport, trials: &[TrialRecord]) -> Outcome {
    let exhaustive = trials
        .iter()
        .all(|t| t.coverage == Some(zeck_core::interval::Coverage::Exhaustive(75025)));
    let held = trials.iter().filter(|t| t.sandwich == Some(true)).count();
    outcome(
        r.total.sandwich_failures == 0 && trials.len() == 50 && exhaustive && held == 50,
        format!(
            "n <= 18: {} failures; n = 60: {held} of {} intervals (F_24 offsets each)",
            r.total.sandwich_failures,
            trials.len()
        ),
    )
}

fn moment_slopes() -> Outcome {
    let ks: Vec<usize> = (50..=400).step_by(50).collect();
    let r = run_moment_slopes(&ks).unwrap();
    let pass = (r.mean_slope - 0.27639).abs() <= 0.005
        && (r.variance_slope - 0.08944).abs() <= 0.005
        && r.max_abs_mean_residual <= 1.0;
    outcome(
        pass,
        format!(
            "mean slope {:.5}, variance slope {:.5}, max |mean residual| {:.4}",
            r.mean_slope, r.variance_slope, r.max_abs_mean_residual
        ),
    )
}

fn gaussian(trials: &[TrialRecord]) -> Outcome {
    let ks: Vec<f64> = [50, 100, 200, 400]
        .iter()
        .map(|&k| ks_to_normal(&standardize(&exact_distribution_prefix(k)).unwrap()).statistic)
        .collect();
    let trend = ks.windows(2).all(|w| w[1] <= 1.1 * w[0]);
    let dev = trials
        .iter()
        .map(|t| t.ks_deviation.map_or(f64::INFINITY, f64::abs))
        .fold(0.0, f64::max);
    let over = trials
        .iter()
        .filter(|t| t.ks_deviation.is_none_or(|d| d.abs() > 0.03))
        .count();
    let mut devs: Vec<f64> = trials.iter().filter_map(|t| t.ks_deviation).collect();
    devs.sort_by(f64::total_cmp);
    println!(
        "  note: {over} of {} intervals deviate by more than 0.03; median deviation {:.4}",
        trials.len(),
        devs.get(devs.len() / 2).copied().unwrap_or(f64::NAN)
    );
    outcome(
        ks[3] <= 0.06 && trend && dev <= 0.03 && trials.len() == 50,
        format!(
            "KS(k=50,100,200,400) = {:.4} {:.4} {:.4} {:.4}; n = 60 max |KS - KS(F_24)| = {dev:.4}",
            ks[0], ks[1], ks[2], ks[3]
        ),
    )
}

fn counterexample() -> Outcome {
    let r = run_counterexample(16).unwrap();
    let mut s = r.s_values.clone();
    s.sort_unstable();
    let lower_ok = r.lower == fib(32).unwrap() + fib(17).unwrap() - 1u32;
    outcome(
        s == [2, 3, 9] && r.disjoint && lower_ok,
        format!(
            "s = {:?}, low {:?}, high {:?}",
            r.s_values, r.low_range, r.high_range
        ),
    )
}

fn determinism() -> Outcome {
    let mut runs = Vec::new();
    for workers in [1, 4, 1] {
        let mut exhaustive = ExperimentConfig::new(40, 24, 99);
        exhaustive.workers = Some(workers);
        let mut sampled = ExperimentConfig::new(70, 6, 5);
        sampled.mode = SamplingMode::Sampled(3000);
        sampled.workers = Some(workers);
        let text = [
            to_canonical_json(&zeck_core::ExperimentReport::Theorem1(
                run_theorem1(&exhaustive).unwrap(),
            )),
            to_canonical_json(&zeck_core::ExperimentReport::Theorem1(
                run_theorem1(&sampled).unwrap(),
            )),
            to_canonical_json(&run_counterexample(81).unwrap()),
            to_canonical_json(&run_gap_scan(&[30, 60], &[2, 4, 6], AlphaRule::Half).unwrap()),
            to_canonical_json(&run_moment_slopes(&[10, 20, 40]).unwrap()),
        ]
        .map(|r| r.unwrap())
        .join("\n");
        runs.push(text);
    }
    outcome(
        runs.windows(2).all(|w| w[0] == w[1]),
        format!("3 runs (workers 1, 4, 1), {} bytes each", runs[0].len()),
    )
}

fn report(id: usize, name: &str, start: Instant, o: Outcome, failures: &mut usize) {
    let status = if o.pass { "PASS" } else { "FAIL" };
    if !o.pass {
        *failures += 1;
    }
    println!(
        "{status} [{id:>2}] {name}: {} ({:.1}s)",
        o.detail,
        start.elapsed().as_secs_f64()
    );
}

fn main() -> ExitCode {
    let mut failures = 0;
    let t = Instant::now();
    report(
        1,
        "zeckendorf correctness",
        t,
        zeckendorf_correctness(),
        &mut failures,
    );
    let t = Instant::now();
    report(2, "no-gap census", t, census(), &mut failures);
    let t = Instant::now();
    report(3, "gap-probability rate", t, gap_rate(), &mut failures);

    let t = Instant::now();
    let lemmas = check_lemmas(4, 18).unwrap();
    report(
        4,
        "high block constant",
        t,
        c3_constant(&lemmas),
        &mut failures,
    );
    let t = Instant::now();
    report(
        5,
        "bounded defect and bijection",
        t,
        defect_and_bijection(&lemmas),
        &mut failures,
    );
    let t = Instant::now();
    let trials = n60_trials();
    report(
        6,
        "cdf sandwich",
        t,
        sandwich(&lemmas, &trials),
        &mut failures,
    );
    let t = Instant::now();
    report(7, "moment slopes", t, moment_slopes(), &mut failures);
    let t = Instant::now();
    report(8, "gaussian proxies", t, gaussian(&trials), &mut failures);
    let t = Instant::now();
    report(9, "counterexample", t, counterexample(), &mut failures);
    let t = Instant::now();
    report(10, "determinism", t, determinism(), &mut failures);

    println!("{} of 10 criteria passed", 10 - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
