//! Acceptance criteria. Each prints one PASS/FAIL line; the process exits
//! non-zero if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use adjviz::parallel::distance_matrix_parallel;
use adjviz_core::adjacency::pair_distance;
use adjviz_core::embedding::MdsInit;
use adjviz_core::{
    classical_mds, cllr, det_curve, distance_matrix, eer, group_reduce, isotonic_regression,
    kendall_tau_fast, kendall_tau_naive, min_cllr, nonmetric_mds, procrustes_align,
    procrustes_normalize, tau_to_distance, DistanceMatrix, GroupMap, NonMetricConfig, ScoreMatrix,
};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_distr::{Distribution, StandardNormal};

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

fn within(elapsed: Duration, limit_s: f64) -> bool {
    elapsed.as_secs_f64() < limit_s
}

fn run(name: &str, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let result = catch_unwind(AssertUnwindSafe(f));
    let secs = start.elapsed().as_secs_f64();
    let (pass, detail) = match result {
        Ok(o) => (o.pass, o.detail),
        Err(e) => {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            (false, format!("panicked: {msg}"))
        }
    };
    println!(
        "{} {name:<28} {secs:>8.3}s  {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    pass
}

fn ids(prefix: &str, n: usize) -> Vec<String> {
    let width = n.to_string().len();
    (0..n).map(|i| format!("{prefix}{i:0width$}")).collect()
}

fn matrix(cols: Vec<Vec<f64>>) -> ScoreMatrix {
    ScoreMatrix::new(ids("t", cols[0].len()), ids("c", cols.len()), cols).unwrap()
}

fn normal(rng: &mut StdRng) -> f64 {
    StandardNormal.sample(rng)
}

fn random_labels(rng: &mut StdRng, n: usize) -> Vec<bool> {
    let mut labels: Vec<bool> = (0..n).map(|_| rng.random_bool(0.5)).collect();
    labels[0] = true;
    labels[n - 1] = false;
    labels
}

/// Column of length `n` where about a fifth of the entries repeat another
/// entry.
fn tied_column(rng: &mut StdRng, n: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..n).map(|_| normal(rng)).collect();
    for i in 0..n {
        if rng.random_bool(0.2) {
            v[i] = v[rng.random_range(0..n)];
        }
    }
    v
}

fn tau_oracle_equivalence() -> Outcome {
    let mut rng = StdRng::seed_from_u64(1);
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut degenerate = 0;
    for case in 0..500 {
        let n = rng.random_range(2..=2000);
        let x = tied_column(&mut rng, n);
        let y = tied_column(&mut rng, n);
        match (kendall_tau_naive(&x, &y), kendall_tau_fast(&x, &y)) {
            (Ok(a), Ok(b)) => {
                if a.stats != b.stats {
                    return outcome(
                        false,
                        format!("case {case}: counts {:?} vs {:?}", a.stats, b.stats),
                    );
                }
                worst = worst.max((a.tau - b.tau).abs());
            }
            (Err(a), Err(b)) if a == b => degenerate += 1,
            (a, b) => return outcome(false, format!("case {case}: {a:?} vs {b:?}")),
        }
    }
    let elapsed = start.elapsed();
    outcome(
        worst <= 1e-12 && within(elapsed, 60.0),
        format!("500 pairs, max |dtau| {worst:.1e}, {degenerate} degenerate in both"),
    )
}

fn distance_extremes() -> Outcome {
    let mut rng = StdRng::seed_from_u64(2);
    for case in 0..100 {
        let n = rng.random_range(2..=1000);
        let mut x: Vec<f64> = (0..n).map(|v| v as f64).collect();
        x.shuffle(&mut rng);
        let same: Vec<f64> = x.iter().map(|v| 3.0 * v + 1.0).collect();
        let reversed: Vec<f64> = x.iter().map(|v| -v).collect();
        let t1 = kendall_tau_fast(&x, &same).unwrap().tau;
        let t2 = kendall_tau_fast(&x, &reversed).unwrap().tau;
        let (d1, d2) = (tau_to_distance(t1).unwrap(), tau_to_distance(t2).unwrap());
        if t1 != 1.0 || d1 != 0.0 || t2 != -1.0 || d2 != 1.0 {
            return outcome(
                false,
                format!("case {case} (N={n}): tau {t1}/{t2}, D {d1}/{d2}"),
            );
        }
    }
    outcome(true, "100 permutations: tau=1,D=0 and tau=-1,D=1 exactly")
}

fn monotone_transforms_share_det() -> Outcome {
    let transforms: [fn(f64) -> f64; 4] = [
        |v| 2.5 * v + 3.0,
        |v| v * v * v + v,
        |v| (v / 500.0).exp(),
        |v| (v + 1.0).ln() * 7.0 - 2.0,
    ];
    let mut rng = StdRng::seed_from_u64(3);
    let start = Instant::now();
    for case in 0..100 {
        let n = rng.random_range(10..=2000);
        let x: Vec<f64> = (0..n)
            .map(|_| f64::from(rng.random_range(0..5000)))
            .collect();
        let f = transforms[case % transforms.len()];
        let y: Vec<f64> = x.iter().map(|&v| f(v)).collect();
        let labels = random_labels(&mut rng, n);
        let d = distance_matrix(&matrix(vec![x.clone(), y.clone()])).unwrap();
        let (cx, cy) = (
            det_curve(&x, &labels).unwrap(),
            det_curve(&y, &labels).unwrap(),
        );
        let same_det = cx
            .rates()
            .iter()
            .zip(cy.rates())
            .all(|(a, b)| a.0.to_bits() == b.0.to_bits() && a.1.to_bits() == b.1.to_bits())
            && cx.points.len() == cy.points.len();
        if d.get(0, 1) != 0.0 || !same_det || eer(&cx).to_bits() != eer(&cy).to_bits() {
            return outcome(
                false,
                format!("case {case}: D={} same_det={same_det}", d.get(0, 1)),
            );
        }
    }
    let elapsed = start.elapsed();
    outcome(
        within(elapsed, 10.0),
        "100 pairs: D=0, identical DET points, equal EER",
    )
}

fn euclidean(points: &[f64]) -> DistanceMatrix {
    let m = points.len() / 2;
    let mut v = vec![0.0; m * m];
    for i in 0..m {
        for j in 0..m {
            v[i * m + j] =
                (points[2 * i] - points[2 * j]).hypot(points[2 * i + 1] - points[2 * j + 1]);
        }
    }
    DistanceMatrix::new(ids("c", m), v).unwrap()
}

fn classical_recovery() -> Outcome {
    let mut rng = StdRng::seed_from_u64(4);
    let start = Instant::now();
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let pts: Vec<f64> = (0..20).map(|_| rng.random_range(-1.0..1.0)).collect();
        let e = classical_mds(&euclidean(&pts), 2).unwrap();
        let aligned = procrustes_align(&e.coords, &pts).unwrap();
        for (a, b) in aligned.iter().zip(&pts) {
            worst = worst.max((a - b).abs());
        }
    }
    let elapsed = start.elapsed();
    outcome(
        worst < 1e-7 && within(elapsed, 5.0),
        format!("50 trials, max error {worst:.1e}"),
    )
}

fn isotonic_minimax(y: &[f64]) -> Vec<f64> {
    let n = y.len();
    let mean = |a: usize, b: usize| y[a..=b].iter().sum::<f64>() / (b - a + 1) as f64;
    (0..n)
        .map(|i| {
            (0..=i)
                .map(|a| (i..n).map(|b| mean(a, b)).fold(f64::INFINITY, f64::min))
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect()
}

fn smacof_correctness() -> Outcome {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(5);
    let mut runs = 0;
    let mut check_trace = |d: &DistanceMatrix, init: MdsInit| -> Result<f64, String> {
        let e = nonmetric_mds(
            d,
            2,
            &NonMetricConfig {
                init,
                ..Default::default()
            },
        )
        .map_err(|e| e.to_string())?;
        runs += 1;
        match e.trace.windows(2).position(|w| w[1] > w[0]) {
            Some(k) => Err(format!("stress rose at iteration {}", k + 1)),
            None => Ok(e.stress),
        }
    };

    // Stress bound under the default (classical) start; seeded random
    // starts and monotone distortions only exercise the trace.
    let mut worst_stress = 0.0f64;
    for k in 0..20 {
        let pts: Vec<f64> = (0..20).map(|_| rng.random_range(-1.0..1.0)).collect();
        let d = euclidean(&pts);
        match check_trace(&d, MdsInit::Classical) {
            Ok(s) => worst_stress = worst_stress.max(s),
            Err(e) => return outcome(false, e),
        }
        if let Err(e) = check_trace(&d, MdsInit::Random { seed: k }) {
            return outcome(false, e);
        }
        let squared = DistanceMatrix::new(
            d.classifier_ids().to_vec(),
            d.values().iter().map(|v| v * v).collect(),
        )
        .unwrap();
        if let Err(e) = check_trace(&squared, MdsInit::Classical) {
            return outcome(false, e);
        }
    }
    for k in 0..40 {
        let m = rng.random_range(3..=20);
        let cols: Vec<Vec<f64>> = (0..m).map(|_| tied_column(&mut rng, 200)).collect();
        let d = distance_matrix(&matrix(cols)).unwrap();
        for init in [MdsInit::Classical, MdsInit::Random { seed: k }] {
            if let Err(e) = check_trace(&d, init) {
                return outcome(false, e);
            }
        }
    }

    let mut sequences = 0;
    for len in 1..=6u32 {
        for code in 0..4usize.pow(len) {
            let y: Vec<f64> = (0..len).map(|k| ((code >> (2 * k)) & 3) as f64).collect();
            let fit = isotonic_regression(&y, &vec![1.0; y.len()]).unwrap();
            if fit
                .fitted
                .iter()
                .zip(isotonic_minimax(&y))
                .any(|(a, b)| (a - b).abs() > 1e-9)
            {
                return outcome(false, format!("isotonic mismatch on {y:?}"));
            }
            sequences += 1;
        }
    }
    let elapsed = start.elapsed();
    outcome(
        worst_stress < 1e-6 && within(elapsed, 60.0),
        format!("{runs} runs monotone, Euclidean stress <= {worst_stress:.1e}, {sequences} isotonic sequences"),
    )
}

fn average_ranks(v: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..v.len()).collect();
    order.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut ranks = vec![0.0; v.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && v[order[j + 1]] == v[order[i]] {
            j += 1;
        }
        for &k in &order[i..=j] {
            ranks[k] = (i + j) as f64 / 2.0;
        }
        i = j + 1;
    }
    ranks
}

fn spearman(a: &[f64], b: &[f64]) -> f64 {
    let (ra, rb) = (average_ranks(a), average_ranks(b));
    let n = a.len() as f64;
    let (ma, mb) = (ra.iter().sum::<f64>() / n, rb.iter().sum::<f64>() / n);
    let cov: f64 = ra.iter().zip(&rb).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = ra.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = rb.iter().map(|y| (y - mb).powi(2)).sum();
    cov / (va * vb).sqrt()
}

/// Spearman correlation between `|a_i - a_j|` and embedded distance for
/// classifiers `(1 - a) * base + a * noise`, with one noise vector shared by
/// all classifiers or a fresh one each.
fn recovery_rho(rng: &mut StdRng, shared_noise: bool) -> (f64, f64) {
    let n = 5000;
    let base: Vec<f64> = (0..n).map(|_| normal(rng)).collect();
    let noise: Vec<f64> = (0..n).map(|_| normal(rng)).collect();
    let alphas: Vec<f64> = (0..20).map(|k| k as f64 * 0.05).collect();
    let cols: Vec<Vec<f64>> = alphas
        .iter()
        .map(|a| {
            (0..n)
                .map(|t| {
                    let z = if shared_noise { noise[t] } else { normal(rng) };
                    (1.0 - a) * base[t] + a * z
                })
                .collect()
        })
        .collect();
    let d = distance_matrix_parallel(&matrix(cols), 4).unwrap();
    let e = procrustes_normalize(&nonmetric_mds(&d, 2, &NonMetricConfig::default()).unwrap());
    let (mut gap, mut dist) = (Vec::new(), Vec::new());
    for i in 0..alphas.len() {
        for j in i + 1..alphas.len() {
            gap.push((alphas[i] - alphas[j]).abs());
            dist.push(e.distance(i, j));
        }
    }
    (spearman(&gap, &dist), e.stress)
}

fn synthetic_recovery() -> Outcome {
    let mut rng = StdRng::seed_from_u64(6);
    let start = Instant::now();
    let (rho, stress) = recovery_rho(&mut rng, true);
    let elapsed = start.elapsed();
    let (rho_own, _) = recovery_rho(&mut rng, false);
    outcome(
        rho > 0.8 && within(elapsed, 30.0),
        format!("Spearman {rho:.4}, stress {stress:.4} (per-classifier noise: {rho_own:.4})"),
    )
}

fn grouped_contract() -> Outcome {
    let mut rng = StdRng::seed_from_u64(7);
    let cols: Vec<Vec<f64>> = (0..8).map(|_| tied_column(&mut rng, 3000)).collect();
    let s = matrix(cols);
    let mut identity = GroupMap::new();
    for t in s.trial_ids() {
        identity.insert(t.clone(), t.clone()).unwrap();
    }
    let plain = distance_matrix(&s).unwrap();
    let grouped = distance_matrix(&group_reduce(&s, &identity).unwrap()).unwrap();
    let identical = plain.classifier_ids() == grouped.classifier_ids()
        && plain
            .values()
            .iter()
            .zip(grouped.values())
            .all(|(a, b)| a.to_bits() == b.to_bits());
    if !identical {
        return outcome(false, "identity grouping changed the matrix");
    }

    let (n, m, c) = (71_237, 50, 14);
    let base: Vec<f64> = (0..n).map(|_| normal(&mut rng)).collect();
    let cols: Vec<Vec<f64>> = (0..m)
        .map(|j| {
            let a = j as f64 / m as f64;
            base.iter()
                .map(|b| (1.0 - a) * b + a * normal(&mut rng))
                .collect()
        })
        .collect();
    let s = matrix(cols);
    let mut groups = GroupMap::new();
    for t in s.trial_ids() {
        groups
            .insert(t.clone(), format!("g{:02}", rng.random_range(0..c)))
            .unwrap();
    }
    let start = Instant::now();
    let reduced = group_reduce(&s, &groups).unwrap();
    let d = distance_matrix_parallel(&reduced, 4).unwrap();
    let e = nonmetric_mds(&d, 2, &NonMetricConfig::default()).unwrap();
    let elapsed = start.elapsed();
    outcome(
        within(elapsed, 2.0) && reduced.n_trials() == c && e.len() == m,
        format!("identity bit-identical; M={m}, N={n}, C={c} reduce+distances+embed"),
    )
}

fn cllr_anchors() -> Outcome {
    let mut rng = StdRng::seed_from_u64(8);
    for n in 2..=300 {
        let labels = random_labels(&mut rng, n);
        let c = cllr(&vec![0.0; n], &labels).unwrap();
        if c != 1.0 {
            return outcome(false, format!("all-zero LLRs, N={n}: cllr {c:e}"));
        }
    }
    let mut max_gap = f64::NEG_INFINITY;
    for case in 0..1000 {
        let n = rng.random_range(2..=200);
        let labels = random_labels(&mut rng, n);
        let scale = rng.random_range(0.1..5.0);
        let shift = rng.random_range(-2.0..2.0);
        let scores: Vec<f64> = labels
            .iter()
            .map(|&l| scale * (normal(&mut rng) + if l { 1.0 } else { -1.0 }) + shift)
            .collect();
        let (a, b) = (
            min_cllr(&scores, &labels).unwrap(),
            cllr(&scores, &labels).unwrap(),
        );
        if a > b {
            return outcome(false, format!("case {case}: min_cllr {a} > cllr {b}"));
        }
        max_gap = max_gap.max(a - b);
    }
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let n = rng.random_range(2..=200);
        let labels = random_labels(&mut rng, n);
        let scores: Vec<f64> = labels
            .iter()
            .map(|&l| rng.random_range(0.0..1.0) + if l { 1.5 } else { 0.0 })
            .collect();
        worst = worst.max(min_cllr(&scores, &labels).unwrap());
    }
    outcome(
        worst < 1e-6,
        format!(
            "all-zero => 1.0 exactly; 1000 instances min<=cllr; separable min_cllr <= {worst:.1e}"
        ),
    )
}

fn performance() -> Outcome {
    let mut rng = StdRng::seed_from_u64(9);
    let n = 1 << 17;
    let pair = matrix(vec![
        (0..n).map(|_| normal(&mut rng)).collect(),
        (0..n).map(|_| normal(&mut rng)).collect(),
    ]);
    let start = Instant::now();
    pair_distance(&pair, 0, 1).unwrap();
    let single = start.elapsed();

    let (n, m) = (134_730, 50);
    let base: Vec<f64> = (0..n).map(|_| normal(&mut rng)).collect();
    let cols: Vec<Vec<f64>> = (0..m)
        .map(|j| {
            let a = j as f64 / m as f64;
            base.iter()
                .map(|b| (1.0 - a) * b + a * normal(&mut rng))
                .collect()
        })
        .collect();
    let s = matrix(cols);
    let start = Instant::now();
    distance_matrix_parallel(&s, 4).unwrap();
    let full = start.elapsed();
    outcome(
        within(single, 0.25) && within(full, 60.0),
        format!(
            "single pair N=2^17 {:.1} ms; M={m}, N={n}, 4 workers {:.2} s",
            single.as_secs_f64() * 1e3,
            full.as_secs_f64()
        ),
    )
}

fn cli(args: &[&str], dir: &Path) {
    let status = Command::new(env!("CARGO_BIN_EXE_adjviz"))
        .args(args)
        .current_dir(dir)
        .status()
        .unwrap();
    assert!(status.success(), "adjviz {args:?} failed");
}

fn end_to_end_determinism() -> Outcome {
    let mut rng = StdRng::seed_from_u64(10);
    let base: Vec<f64> = (0..500).map(|_| normal(&mut rng)).collect();
    let mut files = Vec::new();
    for j in 0..6 {
        let a = j as f64 * 0.15;
        let body: String = base
            .iter()
            .enumerate()
            .map(|(t, b)| format!("trial{t:03}\t{}\n", (1.0 - a) * b + a * normal(&mut rng)))
            .collect();
        files.push((format!("sys{j}.tsv"), body));
    }
    let metadata = "id,backend,highlight\nsys0,gmm,1\nsys1,gmm,\nsys2,dnn,\nsys3,dnn,\nsys4,,\n";

    let produce = || -> Vec<Vec<u8>> {
        let dir = tempfile::tempdir().unwrap();
        std::fs::create_dir(dir.path().join("scores")).unwrap();
        for (name, body) in &files {
            std::fs::write(dir.path().join("scores").join(name), body).unwrap();
        }
        std::fs::write(dir.path().join("meta.csv"), metadata).unwrap();
        cli(
            &["distances", "scores", "-o", "dist.tsv", "--threads", "3"],
            dir.path(),
        );
        cli(&["embed", "dist.tsv", "-o", "emb.tsv"], dir.path());
        cli(
            &[
                "plot",
                "emb.tsv",
                "-o",
                "map.svg",
                "--metadata",
                "meta.csv",
                "--color-by",
                "backend",
            ],
            dir.path(),
        );
        ["dist.tsv", "emb.tsv", "map.svg"]
            .iter()
            .map(|f| std::fs::read(dir.path().join(f)).unwrap())
            .collect()
    };
    let (a, b) = (produce(), produce());
    let same = a == b;
    outcome(
        same,
        format!(
            "distances/embedding/SVG byte-identical: {same} ({} bytes)",
            a.iter().map(Vec::len).sum::<usize>()
        ),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        ("tau-oracle-equivalence", tau_oracle_equivalence),
        ("distance-extremes", distance_extremes),
        ("monotone-transform-det", monotone_transforms_share_det),
        ("classical-mds-recovery", classical_recovery),
        ("smacof-correctness", smacof_correctness),
        ("synthetic-recovery", synthetic_recovery),
        ("grouped-contract", grouped_contract),
        ("cllr-anchors", cllr_anchors),
        ("performance", performance),
        ("end-to-end-determinism", end_to_end_determinism),
    ];
    println!("\nacceptance: {} criteria", criteria.len());
    let failed = criteria.iter().filter(|(name, f)| !run(name, f)).count();
    println!(
        "acceptance: {} passed, {failed} failed\n",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
