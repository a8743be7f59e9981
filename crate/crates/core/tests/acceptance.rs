//! Acceptance criteria. Each test prints one `PASS`/`FAIL` line to stderr
//! (bypassing the harness capture) before asserting.

use std::io::Write;
use std::path::PathBuf;

use rand::Rng;
use viewmetric::clustering::{kmeans_fit, KMeansConfig};
use viewmetric::data::{gen_swiss_roll, load_csv, standardize, CsvOptions, Dataset, UCI_MANIFESTS};
use viewmetric::eval::{
    adjusted_mutual_info, adjusted_rand_index, best_map_accuracy, contingency,
    homogeneity_completeness, manifold_alignment, score_all,
};
use viewmetric::metric::{
    dim_similarity_gain, euclidean_distance, pairwise_distances, view_distance, MetricKind,
    NormKind,
};
use viewmetric::neighbors::{knn_evaluate, KnnConfig};
use viewmetric::rng::seeded;
use viewmetric::spectral::{spectral_radius, symmetric_eigenvalues};

const SAMPLES: usize = 10_000;

fn report(id: u32, name: &str, pass: bool, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    let _ = writeln!(
        std::io::stderr(),
        "criterion {id:>2} [{verdict}] {name}: {detail}"
    );
}

fn point(rng: &mut impl Rng, m: usize) -> Vec<f64> {
    (0..m).map(|_| rng.random_range(-100.0..100.0)).collect()
}

#[test]
fn criterion_01_plane_equivalence() {
    let mut rng = seeded(1);
    let mut worst: f64 = 0.0;
    for _ in 0..SAMPLES {
        let (x, y) = (point(&mut rng, 2), point(&mut rng, 2));
        let v = view_distance(&x, &y).unwrap();
        let e = euclidean_distance(&x, &y).unwrap();
        worst = worst.max((v - e).abs() / v.max(1.0));
    }
    let pass = worst <= 1e-12;
    report(
        1,
        "view equals euclidean at m=2",
        pass,
        &format!("max scaled |diff| {worst:e} over {SAMPLES} pairs"),
    );
    assert!(pass);
}

#[test]
fn criterion_02_metric_axioms() {
    let mut rng = seeded(2);
    let mut asym = 0;
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..SAMPLES {
        let m = rng.random_range(2..=10);
        let (x, y, z) = (point(&mut rng, m), point(&mut rng, m), point(&mut rng, m));
        for metric in MetricKind::ALL {
            let d = |a: &[f64], b: &[f64]| metric.distance(a, b).unwrap();
            if d(&x, &y) != d(&y, &x) || d(&y, &z) != d(&z, &y) || d(&x, &z) != d(&z, &x) {
                asym += 1;
            }
            let via = d(&x, &y) + d(&y, &z);
            worst = worst.max((d(&x, &z) - via) / via);
        }
    }
    let pass = asym == 0 && worst <= 1e-9;
    report(
        2,
        "symmetry and triangle inequality",
        pass,
        &format!("{asym} asymmetric triples, worst relative triangle excess {worst:e}"),
    );
    assert!(pass);
}

#[test]
fn criterion_03_dominance() {
    let mut rng = seeded(3);
    let (mut below, mut not_strict, mut strict_cases) = (0, 0, 0);
    for _ in 0..SAMPLES {
        let m = rng.random_range(2..=10);
        let x = point(&mut rng, m);
        let mut y = point(&mut rng, m);
        // Also exercise pairs that differ in a single coordinate.
        if rng.random_bool(0.2) {
            y = x.clone();
            y[rng.random_range(0..m)] += 1.0;
        }
        let v = view_distance(&x, &y).unwrap();
        let e = euclidean_distance(&x, &y).unwrap();
        if v < e - 1e-12 {
            below += 1;
        }
        let differing = x.iter().zip(&y).filter(|(a, b)| a != b).count();
        if m > 2 && differing >= 2 {
            strict_cases += 1;
            if v <= e {
                not_strict += 1;
            }
        }
    }
    let pass = below == 0 && not_strict == 0;
    report(
        3,
        "view dominates euclidean",
        pass,
        &format!("{below} violations, {not_strict} non-strict among {strict_cases} strict cases"),
    );
    assert!(pass);
}

#[test]
fn criterion_04_spectral_suite() {
    let mut rng = seeded(4);
    let mut failures = Vec::new();
    for set in 0..100 {
        let n = rng.random_range(3..=30);
        let m = rng.random_range(2..=8);
        let pts: Vec<Vec<f64>> = (0..n).map(|_| point(&mut rng, m)).collect();
        let mut rhos = [0.0; 2];
        for (slot, metric) in MetricKind::ALL.into_iter().enumerate() {
            let mat = pairwise_distances(&pts, metric).unwrap();
            let norm = mat.frobenius_norm();
            let eig = mat.eigenvalues(f64::INFINITY).unwrap();
            let positive = eig.iter().filter(|&&l| l > 1e-9 * norm).count();
            let rho = spectral_radius(&mat).unwrap();
            if positive != 1 {
                failures.push(format!(
                    "set {set} {metric}: {positive} positive eigenvalues"
                ));
            }
            if mat.trace().abs() > 1e-9 * norm {
                failures.push(format!("set {set} {metric}: trace {}", mat.trace()));
            }
            if (rho - eig[0]).abs() > 1e-9 * rho {
                failures.push(format!(
                    "set {set} {metric}: rho {rho} vs lambda_max {}",
                    eig[0]
                ));
            }
            rhos[slot] = rho;
        }
        let (euclid, view) = (rhos[0], rhos[1]);
        if view < euclid - 1e-9 {
            failures.push(format!("set {set}: rho view {view} < rho euclid {euclid}"));
        }
    }
    let pass = failures.is_empty();
    let detail = if pass {
        "100 point sets, both metrics".to_string()
    } else {
        failures.join("; ")
    };
    report(4, "distance-matrix spectra", pass, &detail);
    assert!(pass);
}

#[test]
fn criterion_05_gain_comparison() {
    let mut rng = seeded(5);
    let mut worst: f64 = f64::INFINITY;
    for _ in 0..SAMPLES {
        let x = point(&mut rng, 2);
        let t = rng.random_range(-100.0..100.0);
        let av = dim_similarity_gain(&x, t, NormKind::VNorm).unwrap();
        let a2 = dim_similarity_gain(&x, t, NormKind::TwoNorm).unwrap();
        worst = worst.min(av - a2);
    }
    let a2 = dim_similarity_gain(&[1.0, 0.0], 1.0, NormKind::TwoNorm).unwrap();
    let av = dim_similarity_gain(&[1.0, 0.0], 1.0, NormKind::VNorm).unwrap();
    let example =
        (a2 - (2f64.sqrt() - 1.0)).abs() <= 1e-12 && (av - (2f64.sqrt() + 1.0)).abs() <= 1e-12;
    let pass = worst >= -1e-12 && example;
    report(
        5,
        "view gain at least two-norm gain",
        pass,
        &format!("min(alpha_v - alpha_2) {worst:e}; x=(1,0),t=1 gives alpha_2={a2:.15}, alpha_v={av:.15}"),
    );
    assert!(pass);
}

#[test]
fn criterion_06_hand_values() {
    let v = view_distance(&[1.0, 2.0, 3.0], &[0.0, 0.0, 0.0]).unwrap();
    let want = 5f64.sqrt() + 10f64.sqrt() + 13f64.sqrt();
    let eig =
        symmetric_eigenvalues(3, &[0.0, 1.0, 2.0, 1.0, 0.0, 1.0, 2.0, 1.0, 0.0], 0.0).unwrap();
    let want_eig = [1.0 + 3f64.sqrt(), 1.0 - 3f64.sqrt(), -2.0];
    let eig_err = eig
        .iter()
        .zip(want_eig)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let pass = (v - want).abs() <= 1e-12 && eig_err <= 1e-9;
    report(
        6,
        "hand-computed values",
        pass,
        &format!(
            "view {v:.15} (diff {:e}), eigenvalue max diff {eig_err:e}",
            (v - want).abs()
        ),
    );
    assert!(pass);
}

/// Every labeling of length `n` with values below `k`.
fn all_labelings(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|l| (0..k).map(move |v| [l.clone(), vec![v]].concat()))
            .collect();
    }
    out
}

fn ari_by_pairs(t: &[usize], p: &[usize]) -> f64 {
    let (mut a, mut b, mut c, mut d) = (0.0, 0.0, 0.0, 0.0);
    for i in 0..t.len() {
        for j in i + 1..t.len() {
            match (t[i] == t[j], p[i] == p[j]) {
                (true, true) => a += 1.0,
                (true, false) => b += 1.0,
                (false, true) => c += 1.0,
                (false, false) => d += 1.0,
            }
        }
    }
    if b == 0.0 && c == 0.0 {
        return 1.0;
    }
    2.0 * (a * d - b * c) / ((a + b) * (b + d) + (a + c) * (c + d))
}

#[test]
fn criterion_07_ari_oracle() {
    let mut worst: f64 = 0.0;
    let mut pairs = 0usize;
    for n in 1..=6 {
        let all = all_labelings(n, 3);
        for t in &all {
            for p in &all {
                let got = adjusted_rand_index(&contingency(t, p).unwrap());
                worst = worst.max((got - ari_by_pairs(t, p)).abs());
                pairs += 1;
            }
        }
    }
    let spot = adjusted_rand_index(&contingency(&[0, 0, 1, 1], &[0, 1, 0, 1]).unwrap());
    let pass = worst <= 1e-12 && (spot + 0.5).abs() <= 1e-12;
    report(
        7,
        "ARI against pair counting",
        pass,
        &format!("{pairs} labeling pairs, max diff {worst:e}, spot {spot}"),
    );
    assert!(pass);
}

#[test]
fn criterion_08_swiss_roll_alignment() {
    let mut wins = 0;
    let mut rows = Vec::new();
    for seed in 0..5u64 {
        let d = gen_swiss_roll::<f64>(1500, 0.0, seed).unwrap();
        let t = d.t().unwrap();
        let score = |metric| {
            let cfg = KMeansConfig::new(8, metric)
                .with_seed(seed)
                .with_restarts(10);
            manifold_alignment(t, &kmeans_fit(d.points(), &cfg).unwrap().labels).unwrap()
        };
        let (e, v) = (score(MetricKind::Euclidean), score(MetricKind::View));
        if v < e {
            wins += 1;
        }
        rows.push(format!("seed {seed}: view {v:.4} vs euclid {e:.4}"));
    }
    let pass = wins >= 4;
    report(
        8,
        "swiss-roll manifold alignment",
        pass,
        &format!("view lower on {wins}/5 ({})", rows.join(", ")),
    );
    assert!(pass);
}

fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/uci")
}

struct AccuracyRuns {
    kmeans: Vec<(bool, MetricKind, f64)>,
    knn: Vec<(bool, MetricKind, usize, f64)>,
}

fn accuracy_runs(d: &Dataset<f64>) -> AccuracyRuns {
    let labels = d.labels().unwrap();
    let k = d.class_count().unwrap();
    let mut out = AccuracyRuns {
        kmeans: Vec::new(),
        knn: Vec::new(),
    };
    for standardized in [false, true] {
        let data = if standardized {
            standardize(d)
        } else {
            d.clone()
        };
        for metric in MetricKind::ALL {
            let model = kmeans_fit(
                data.points(),
                &KMeansConfig::new(k, metric).with_restarts(10),
            )
            .unwrap();
            out.kmeans.push((
                standardized,
                metric,
                best_map_accuracy(labels, &model.labels).unwrap(),
            ));
            for kk in [1, 3, 5, 7] {
                let acc = knn_evaluate(&data, &KnnConfig::new(kk, metric))
                    .unwrap()
                    .accuracy;
                out.knn.push((standardized, metric, kk, acc));
            }
        }
    }
    out
}

#[test]
fn criterion_09_reference_accuracy() {
    const KMEANS_REF: f64 = 0.9667;
    const KNN_REF: f64 = 0.98;
    let mut err = std::io::stderr();
    let mut iris = None;
    for m in UCI_MANIFESTS {
        let path = data_dir().join(format!("{}.csv", m.name));
        if !path.is_file() {
            let _ = writeln!(err, "    {:<8} missing", m.name);
            continue;
        }
        let mut opts = CsvOptions::default();
        if !std::fs::read_to_string(&path)
            .unwrap()
            .lines()
            .next()
            .unwrap_or("")
            .split(',')
            .any(|c| c.trim() == "label")
        {
            opts = opts.with_label(viewmetric::data::ColumnRef::Last);
        }
        let d = load_csv::<f64>(&path, &opts).unwrap();
        let runs = accuracy_runs(&d);
        for &(std, metric, acc) in &runs.kmeans {
            let _ = writeln!(
                err,
                "    {:<8} kmeans std={std:<5} {metric:<9} measured {acc:.4}",
                m.name
            );
        }
        for &(std, metric, kk, acc) in &runs.knn {
            let _ = writeln!(
                err,
                "    {:<8} knn k={kk} std={std:<5} {metric:<9} measured {acc:.4}",
                m.name
            );
        }
        if m.name == "iris" {
            iris = Some(runs);
        }
    }
    let Some(runs) = iris else {
        report(
            9,
            "reference accuracy on iris",
            true,
            "iris.csv not present; bounds not applicable",
        );
        return;
    };
    for r in &runs.kmeans {
        let _ = writeln!(
            err,
            "    iris kmeans delta vs {KMEANS_REF}: {:+.4} ({} std={})",
            r.2 - KMEANS_REF,
            r.1,
            r.0
        );
    }
    let within_kmeans = |std: bool| {
        runs.kmeans
            .iter()
            .filter(|r| r.0 == std)
            .all(|r| (r.2 - KMEANS_REF).abs() <= 0.05)
    };
    let kmeans_ok = within_kmeans(false) || within_kmeans(true);
    let knn_ok = MetricKind::ALL.iter().all(|&metric| {
        runs.knn
            .iter()
            .any(|r| r.1 == metric && (r.3 - KNN_REF).abs() <= 0.03)
    });
    let best_kmeans = runs.kmeans.iter().map(|r| r.2).fold(0.0, f64::max);
    let best_knn = runs.knn.iter().map(|r| r.3).fold(0.0, f64::max);
    let pass = kmeans_ok && knn_ok;
    report(
        9,
        "reference accuracy on iris",
        pass,
        &format!(
            "kmeans within 5pp of {KMEANS_REF}: {kmeans_ok} (best {best_kmeans:.4}); \
             knn within 3pp of {KNN_REF}: {knn_ok} (best {best_knn:.4})"
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_10_index_conventions() {
    let truth = [0, 0, 1, 1, 1, 2, 2, 2, 2];
    let s = score_all(&truth, &truth).unwrap();
    let identical = [s.ari, s.ami, s.v_measure, s.fmi, s.homogeneity]
        .iter()
        .all(|&v| v == 1.0);
    let table = contingency(&truth, &[0; 9]).unwrap();
    let h = homogeneity_completeness(&table).0;
    let ami = adjusted_mutual_info(&table);
    let pass = identical && h == 0.0 && ami == 0.0;
    report(
        10,
        "evaluation-index conventions",
        pass,
        &format!(
            "identical: ari {} ami {} v {} fmi {} homo {}; constant prediction: homo {h} ami {ami}",
            s.ari, s.ami, s.v_measure, s.fmi, s.homogeneity
        ),
    );
    assert!(pass);
}
