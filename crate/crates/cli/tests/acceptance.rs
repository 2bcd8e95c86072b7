//! Acceptance suite: ten criteria, one PASS/FAIL line each. Runs without the
//! libtest harness so the lines always reach standard output; exits non-zero
//! when any criterion fails.

use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::Parser;
use rand::Rng;
use statrs::distribution::{Binomial, DiscreteCDF};

use reserve_cli::report::RunReport;
use reserve_cli::{execute, Cli};
use reserve_core::analysis::{
    adversarial_sequence, enumerate_compliant_runs, strictly_increasing, tail_diagnostic,
    worst_case_run,
};
use reserve_core::controlled_rounding::{
    controlled_round, extend_table, find_fraction_cycle, split_on_cycle, FractionCycle,
};
use reserve_core::model::quota::{within_department_quota, within_university_quota};
use reserve_core::rational::{int, ratio, to_f64};
use reserve_core::rng::{from_seed, replication_seeds};
use reserve_core::roster_flow::{
    build_flow_network, build_scheme_table, decompose_flow_once, find_flow_cycle, split_flow,
    FlowCycle, RosterSampler, Vertex,
};
use reserve_core::solutions::{estimate_mean, run_proposed};
use reserve_core::{FairShareTable, Rational, ReservationProblem, ReservationScheme};

type Outcome = Result<String, String>;

const THIRDS: &str = "category,numerator,denominator\nc1,1,3\nc2,2,3\n";
const MOD_THREE: &str = "index,category\n1,c2\n2,c2\n3,c1\n";

fn four_department_csv(periods: usize) -> String {
    let mut s = String::from("department,period,vacancies\n");
    for t in 1..=periods {
        for (d, q) in [("d1", 2), ("d2", 1), ("d3", 2), ("d4", 1)] {
            s.push_str(&format!("{d},{t},{q}\n"));
        }
    }
    s
}

fn four_departments() -> ReservationProblem {
    let scheme = ReservationScheme::new(["c1", "c2"], [ratio(1, 3), ratio(2, 3)]).unwrap();
    ReservationProblem::new(["d1", "d2", "d3", "d4"], scheme, vec![vec![2, 1, 2, 1]; 3]).unwrap()
}

fn two_by_two_first_period() -> FairShareTable {
    let scheme = ReservationScheme::new(["c1", "c2"], [ratio(1, 10), ratio(9, 10)]).unwrap();
    let p = ReservationProblem::new(["d1", "d2"], scheme, vec![vec![9, 8], vec![17, 7]]).unwrap();
    FairShareTable::for_period(&p, 1).unwrap()
}

fn three_by_three() -> FairShareTable {
    FairShareTable::from_internal(
        1,
        vec![
            vec![ratio(1, 2), ratio(1, 2), int(1)],
            vec![ratio(1, 4), ratio(1, 4), ratio(1, 2)],
            vec![ratio(3, 4), ratio(3, 4), ratio(3, 2)],
        ],
    )
    .unwrap()
}

fn cli(dir: &Path, args: &[&str]) -> Result<String, String> {
    let mut argv = vec!["reserve".to_string()];
    for a in args {
        argv.push(a.replace("{dir}", &dir.display().to_string()));
    }
    let parsed = Cli::try_parse_from(&argv).map_err(|e| e.to_string())?;
    execute(parsed).map_err(|e| e.to_string())
}

fn within(elapsed: Duration, limit_secs: u64) -> Result<(), String> {
    if elapsed <= Duration::from_secs(limit_secs) {
        Ok(())
    } else {
        Err(format!("took {:.2}s, limit {limit_secs}s", elapsed.as_secs_f64()))
    }
}

fn criterion_1() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    std::fs::write(dir.path().join("scheme.csv"), THIRDS).map_err(|e| e.to_string())?;
    std::fs::write(dir.path().join("problem.csv"), four_department_csv(3)).map_err(|e| e.to_string())?;
    std::fs::write(dir.path().join("roster.csv"), MOD_THREE).map_err(|e| e.to_string())?;
    let start = Instant::now();
    let expected: [(&str, [[[u64; 2]; 4]; 3]); 2] = [
        (
            "gov",
            [
                [[0, 2], [1, 0], [0, 2], [1, 0]],
                [[0, 4], [2, 0], [0, 4], [2, 0]],
                [[0, 6], [3, 0], [0, 6], [3, 0]],
            ],
        ),
        (
            "court",
            [
                [[0, 2], [0, 1], [0, 2], [0, 1]],
                [[1, 3], [0, 2], [1, 3], [0, 2]],
                [[2, 4], [1, 2], [2, 4], [1, 2]],
            ],
        ),
    ];
    for (solution, tables) in expected {
        let out = cli(
            dir.path(),
            &[
                "run", "--problem", "{dir}/problem.csv", "--scheme", "{dir}/scheme.csv",
                "--solution", solution, "--roster", "{dir}/roster.csv",
            ],
        )?;
        let report = RunReport::from_json(&out).map_err(|e| e.to_string())?;
        let got = report.tables().map_err(|e| e.to_string())?;
        for (t, want) in tables.iter().enumerate() {
            if got[t].1.internal() != want {
                return Err(format!("{solution} period {}: {:?}", t + 1, got[t].1.internal()));
            }
        }
    }
    within(start.elapsed(), 1)?;
    Ok(format!("six tables exact in {:.3}s", start.elapsed().as_secs_f64()))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let scheme = ReservationScheme::new(["c1", "c2"], [ratio(1, 10), ratio(9, 10)]).unwrap();
    let p = ReservationProblem::new(["d1", "d2"], scheme, vec![vec![9, 8], vec![17, 7]]).unwrap();
    let x1 = FairShareTable::for_period(&p, 1).map_err(|e| e.to_string())?;
    let x2 = FairShareTable::for_period(&p, 2).map_err(|e| e.to_string())?;
    let want1 = (
        vec![vec![ratio(9, 10), ratio(81, 10)], vec![ratio(8, 10), ratio(72, 10)]],
        vec![ratio(17, 10), ratio(153, 10)],
        int(17),
    );
    let want2 = (
        vec![vec![ratio(26, 10), ratio(234, 10)], vec![ratio(15, 10), ratio(135, 10)]],
        vec![ratio(41, 10), ratio(369, 10)],
        int(41),
    );
    for (x, w) in [(&x1, want1), (&x2, want2)] {
        if x.internal() != w.0 || x.column_totals() != w.1 || x.grand_total() != w.2 {
            return Err(format!("period {} differs", x.period()));
        }
    }
    within(start.elapsed(), 1)?;
    Ok("both fair share tables exact".into())
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let mut rng = from_seed(3);
    let mut draws = 0usize;
    for case in 0..1000 {
        let m = rng.random_range(1..=6usize);
        let n = rng.random_range(2..=6usize);
        let weights: Vec<i64> = (0..n).map(|_| rng.random_range(1..=20)).collect();
        let total: i64 = weights.iter().sum();
        let names: Vec<String> = (0..n).map(|j| format!("c{j}")).collect();
        let scheme =
            ReservationScheme::new(names, weights.iter().map(|&w| Rational::new(w, total))).unwrap();
        let vac: Vec<u64> = (0..m).map(|_| rng.random_range(0..=20)).collect();
        let depts: Vec<String> = (0..m).map(|i| format!("d{i}")).collect();
        let p = ReservationProblem::new(depts, scheme, vec![vac]).unwrap();
        let fair = FairShareTable::for_period(&p, 1).unwrap();
        for _ in 0..10 {
            let t = controlled_round(&fair, &mut rng);
            draws += 1;
            let d = within_department_quota(&t, &fair).map_err(|e| e.to_string())?;
            let u = within_university_quota(&t, &fair).map_err(|e| e.to_string())?;
            if !d.is_empty() || !u.is_empty() {
                return Err(format!("problem {case}: {} department, {} university violations", d.len(), u.len()));
            }
        }
    }
    within(start.elapsed(), 30)?;
    Ok(format!("{draws} draws on 1000 problems, zero failures, {:.2}s", start.elapsed().as_secs_f64()))
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let fair = two_by_two_first_period();
    let est = estimate_mean(100_000, 4, |s| Ok(controlled_round(&fair, &mut from_seed(s))))
        .map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    let mut checks: Vec<(Rational, Rational, f64)> = Vec::new();
    for i in 0..2 {
        for j in 0..2 {
            checks.push((est.mean[i][j], fair.entry(i, j), est.se[i][j]));
        }
    }
    for j in 0..2 {
        checks.push((est.column_mean[j], fair.column_totals()[j], est.column_se[j]));
    }
    for (mean, x, se) in checks {
        let z = to_f64(&(mean - x)).abs() / se;
        worst = worst.max(z);
        if z > 3.0 {
            return Err(format!("mean {} vs {} ({z:.2} SE)", to_f64(&mean), to_f64(&x)));
        }
    }
    within(start.elapsed(), 60)?;
    Ok(format!("10^5 draws, largest deviation {worst:.2} SE, {:.2}s", start.elapsed().as_secs_f64()))
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let mut iterations = 0usize;
    for fair in [three_by_three(), two_by_two_first_period()] {
        for seed in 0..200 {
            let mut rng = from_seed(seed);
            let mut v = extend_table(&fair);
            while let Some(cycle) = find_fraction_cycle(&v) {
                let split = split_on_cycle(&v, &cycle).map_err(|e| e.to_string())?;
                if split.mixture() != v.cells() {
                    return Err("rounding mixture differs from the table".into());
                }
                v = reserve_core::controlled_rounding::decompose_once(&v, &cycle, &mut rng)
                    .map_err(|e| e.to_string())?
                    .0;
                iterations += 1;
            }
        }
    }
    let scheme = ReservationScheme::new(["c1", "c2"], [ratio(1, 3), ratio(2, 3)]).unwrap();
    let base = build_flow_network(&build_scheme_table(&scheme, 3).unwrap());
    for seed in 0..200 {
        let mut rng = from_seed(seed);
        let mut net = base.clone();
        while let Some(cycle) = find_flow_cycle(&net) {
            let split = split_flow(&net, &cycle).map_err(|e| e.to_string())?;
            let mix = split.edge_mixture();
            if (0..mix.len()).any(|e| mix[e] != net.flow(e)) {
                return Err("flow mixture differs from the network".into());
            }
            net = decompose_flow_once(&net, &mut rng).map_err(|e| e.to_string())?.unwrap().0;
            iterations += 1;
        }
    }

    let v = extend_table(&three_by_three());
    let cycle = FractionCycle::new(
        vec![(0, 0), (0, 1), (1, 1), (1, 2), (2, 2), (2, 1), (3, 1), (3, 0)],
        &v,
    )
    .map_err(|e| e.to_string())?;
    let split = split_on_cycle(&v, &cycle).map_err(|e| e.to_string())?;
    if split.beta() != ratio(1, 3) || int(1) - split.beta() != ratio(2, 3) {
        return Err(format!("branch probabilities {} and {}", split.beta(), int(1) - split.beta()));
    }
    let pre = |len, category| Vertex::Prefix { len, category };
    let cell = |seat, category| Vertex::Cell { seat, category };
    let flow_cycle = FlowCycle::through(
        &base,
        &[
            pre(3, 0), cell(2, 0), Vertex::Row { seat: 2 }, cell(2, 1), pre(3, 1),
            pre(2, 1), cell(1, 1), Vertex::Row { seat: 1 }, cell(1, 0), pre(2, 0),
        ],
    )
    .map_err(|e| e.to_string())?;
    let fsplit = split_flow(&base, &flow_cycle).map_err(|e| e.to_string())?;
    if fsplit.beta() != ratio(1, 2) {
        return Err(format!("flow branch probability {}", fsplit.beta()));
    }
    Ok(format!(
        "{iterations} iterations exact; branch probabilities 1/3 and 2/3 ({:.2}s)",
        start.elapsed().as_secs_f64()
    ))
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let scheme = ReservationScheme::new(["c1", "c2"], [ratio(1, 3), ratio(2, 3)]).unwrap();
    let sampler = RosterSampler::new(&scheme);
    let (n, len) = (10_000usize, 300usize);
    let mut hits = vec![0u64; len];
    let mut rng = from_seed(6);
    for r in 0..n {
        let roster = sampler.draw_roster(len, &mut rng, Default::default());
        let mut count = 0i64;
        for (q, &c) in roster.assignment().iter().enumerate() {
            if c == 0 {
                count += 1;
                hits[q] += 1;
            }
            let q = q as i64 + 1;
            // |count - q/3| < 1  <=>  |3 count - q| < 3
            if (3 * count - q).abs() >= 3 {
                return Err(format!("roster {r}: prefix {q} holds {count}"));
            }
        }
    }
    let se = (1.0 / 3.0 * (2.0 / 3.0) / n as f64).sqrt();
    let worst = hits
        .iter()
        .map(|&h| (h as f64 / n as f64 - 1.0 / 3.0).abs() / se)
        .fold(0.0f64, f64::max);
    if let Some(p) = hits
        .iter()
        .position(|&h| (h as f64 / n as f64 - 1.0 / 3.0).abs() > 3.0 * se)
    {
        return Err(format!(
            "position {} marginal {:.4} outside 3 SE",
            p + 1,
            hits[p] as f64 / n as f64
        ));
    }
    within(start.elapsed(), 60)?;
    Ok(format!(
        "10^4 rosters within prefix quota, largest marginal deviation {worst:.2} SE, {:.2}s",
        start.elapsed().as_secs_f64()
    ))
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let p = four_departments();
    for seed in replication_seeds(7, 10_000) {
        let trace = run_proposed(&p, seed).map_err(|e| e.to_string())?;
        for (fair, res) in trace.periods() {
            let v = within_department_quota(res, fair).map_err(|e| e.to_string())?;
            if !v.is_empty() {
                return Err(format!("seed {seed}: {} violations", v.len()));
            }
        }
    }
    within(start.elapsed(), 60)?;
    Ok(format!("10^4 runs, zero violations, {:.2}s", start.elapsed().as_secs_f64()))
}

fn criterion_8() -> Outcome {
    let start = Instant::now();
    let scheme = ReservationScheme::new(["c1", "c2"], [ratio(1, 2), ratio(1, 2)]).unwrap();
    let names: Vec<String> = (1..=100).map(|i| format!("d{i}")).collect();
    let p = ReservationProblem::new(names, scheme, vec![vec![1; 100]]).unwrap();
    let reps = 100_000;
    let grid = [2.0, 4.0, 6.0, 8.0, 10.0];
    let d = tail_diagnostic(&p, 0, 1, reps, &grid, 8).map_err(|e| e.to_string())?;
    if d.fair_share != int(50) {
        return Err("fair share is not 50".into());
    }
    for g in 0..grid.len() {
        if d.upper_frequency[g] > (-grid[g] * grid[g] / 150.0).exp() + 3.0 * d.upper_se[g] {
            return Err(format!("upper tail at b = {} exceeds its bound", grid[g]));
        }
        if d.lower_frequency[g] > (-grid[g] * grid[g] / 100.0).exp() + 3.0 * d.lower_se[g] {
            return Err(format!("lower tail at b = {} exceeds its bound", grid[g]));
        }
    }
    let law = Binomial::new(0.5, 100).unwrap();
    let band = |f: f64, p: f64| (f - p).abs() <= 3.0 * (p * (1.0 - p) / reps as f64).sqrt();
    for (g, &b) in grid.iter().enumerate() {
        let upper = law.sf(50 + b as u64 - 1);
        let lower = law.cdf(50 - b as u64);
        if !band(d.upper_frequency[g], upper) || !band(d.lower_frequency[g], lower) {
            return Err(format!(
                "b = {b}: tails {:.5}/{:.5} vs binomial {upper:.5}/{lower:.5}",
                d.upper_frequency[g], d.lower_frequency[g]
            ));
        }
    }
    within(start.elapsed(), 120)?;
    Ok(format!(
        "10^5 replications within bounds and binomial bands, {:.2}s",
        start.elapsed().as_secs_f64()
    ))
}

fn criterion_9() -> Outcome {
    let start = Instant::now();
    let run = worst_case_run(8).map_err(|e| e.to_string())?;
    let maxes = run.max_department_bias();
    let odd: Vec<Rational> = maxes.iter().step_by(2).copied().collect();
    let even: Vec<Rational> = maxes.iter().skip(1).step_by(2).copied().collect();
    if maxes[7] < int(2) || !strictly_increasing(&odd) || !strictly_increasing(&even) {
        return Err(format!("trajectory {:?}", maxes.iter().map(to_f64).collect::<Vec<_>>()));
    }
    let case_one = adversarial_sequence(8, |s| if s.period % 2 == 1 { 0 } else { 1 })
        .map_err(|e| e.to_string())?;
    if case_one.tables[2].1.internal() != [vec![0, 1], vec![0, 0], vec![2, 0]] || case_one != run {
        return Err("worst case differs from the constructed trajectory".into());
    }
    for run in enumerate_compliant_runs(8).map_err(|e| e.to_string())? {
        let m = run.max_department_bias();
        if m[7] < int(1) {
            return Err(format!("compliant run {:?} ends at {}", run.choices, m[7]));
        }
    }
    within(start.elapsed(), 10)?;
    Ok(format!(
        "bias {} after 8 periods, strictly increasing, {:.3}s",
        maxes.iter().map(|m| format!("{}", to_f64(m))).collect::<Vec<_>>().join(" "),
        start.elapsed().as_secs_f64()
    ))
}

fn series(csv_text: &str, solution: &str, scope: &str, statistic: &str) -> Vec<f64> {
    csv_text
        .lines()
        .skip(1)
        .filter_map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0] == solution && f[2] == scope && f[3] == statistic).then(|| f[4].parse().unwrap())
        })
        .collect()
}

fn criterion_10() -> Outcome {
    let start = Instant::now();
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let synthetic = cli(
        dir.path(),
        &["compare", "--synthesize", "--replications", "20", "--seed", "10"],
    )?;
    let lo = series(&synthetic, "proposed", "department", "min");
    let hi = series(&synthetic, "proposed", "department", "max");
    if lo.len() != 9 || lo.iter().chain(&hi).any(|b| b.abs() >= 1.0) {
        return Err(format!("proposed department bias range {lo:?} .. {hi:?}"));
    }
    std::fs::write(dir.path().join("scheme.csv"), THIRDS).map_err(|e| e.to_string())?;
    std::fs::write(dir.path().join("problem.csv"), four_department_csv(8)).map_err(|e| e.to_string())?;
    std::fs::write(dir.path().join("roster.csv"), MOD_THREE).map_err(|e| e.to_string())?;
    let growth = cli(
        dir.path(),
        &[
            "compare", "--problem", "{dir}/problem.csv", "--scheme", "{dir}/scheme.csv",
            "--roster", "{dir}/roster.csv", "--replications", "20", "--seed", "10",
        ],
    )?;
    let gov = series(&growth, "government", "department", "max_abs");
    if gov.len() != 8 || gov.windows(2).any(|w| w[1] <= w[0]) {
        return Err(format!("government max |bias| {gov:?}"));
    }
    Ok(format!(
        "proposed inside (-1, 1) over 9 synthetic periods; government max |bias| {:.2} -> {:.2} ({:.2}s)",
        gov[0],
        gov[7],
        start.elapsed().as_secs_f64()
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("baseline worked example", criterion_1),
        ("fair share reproduction", criterion_2),
        ("rounding quota safety", criterion_3),
        ("rounding unbiasedness", criterion_4),
        ("decomposition identity", criterion_5),
        ("roster prefix quota", criterion_6),
        ("proposed department quota", criterion_7),
        ("university tail bounds", criterion_8),
        ("adversarial bias growth", criterion_9),
        ("synthetic comparison", criterion_10),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail}", k + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
