//! End-to-end acceptance checks. Each test prints one `PASS`/`FAIL` line.

mod common;

use std::collections::BTreeMap;
use std::fs::File;
use std::io::Write;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use common::{
    brute_auc, constructive_signal, gradient_check, mixed_config, naive_dft, random_net, random_planes,
    random_rf_config, rf_matches_oracle,
};
use phasenet_core::harness::{ablation_matrix, group_by_recipe, phase_fingerprint, AblationMatrix};
use phasenet_core::metrics::auc_roc;
use phasenet_core::net::{PlateauScheduler, TrainConfig};
use phasenet_core::spectral::{
    dft1, dft2_plane, idft1, idft2_complex, principal_phase, Complex64, PhaseMode, Signal1D,
};
use phasenet_core::synth::{generate_corpus, texture_batch, CorpusConfig};
use phasenet_core::upsample::{
    check_distributive, convolution_theorem_deviation, count_significant, count_significant_coeffs, fig1_sweep,
    predicted_counts, verify_duplication, ComponentCountModel, ResampleKind, UpsampledAmplitudeReading,
    DEFAULT_EPSILON,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Written outside the capture buffer so every line reaches the log.
fn report(id: u32, name: &str, pass: bool, detail: &str) {
    let status = if pass { "PASS" } else { "FAIL" };
    let mut out = std::io::stdout().lock();
    writeln!(out, "{status} criterion {id:>2} {name}: {detail}").unwrap();
    out.flush().unwrap();
    assert!(pass, "criterion {id} ({name}) failed: {detail}");
}

fn artifact_dir() -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("acceptance");
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn random_signal(rng: &mut ChaCha8Rng, n: usize) -> Signal1D {
    Signal1D::new((0..n).map(|_| rng.random_range(-1.0..1.0)).collect()).unwrap()
}

fn naive_circular(x: &[f64], c: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut padded = c.to_vec();
    padded.resize(n, 0.0);
    (0..n)
        .map(|i| (0..n).map(|j| padded[j] * x[(i + n - j) % n]).sum())
        .collect()
}

fn secs(d: Duration) -> f64 {
    d.as_secs_f64()
}

#[test]
fn c01_duplication_law() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let n = rng.random_range(4..=64);
        let x = random_signal(&mut rng, n);
        worst = worst.max(verify_duplication(&x));
        // direct transforms of both signals, no shared code path
        let up: Vec<f64> = x.samples().iter().flat_map(|&v| [v, 0.0]).collect();
        let (big, small) = (naive_dft(&up), naive_dft(x.samples()));
        for (u, z) in big.iter().enumerate() {
            worst = worst.max((z - small[u % n] * 0.5).norm());
        }
    }
    let elapsed = start.elapsed();
    let pass = worst < 1e-9 && elapsed < Duration::from_secs(10);
    report(
        1,
        "duplication law",
        pass,
        &format!("1000 signals, max deviation {worst:.2e}, {:.2}s", secs(elapsed)),
    );
}

#[test]
fn c02_transform_correctness() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut round_trip, mut parseval, mut oracle): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for n in 1..=64 {
        let x = random_signal(&mut rng, n);
        let spectrum = dft1(&x);
        let back = idft1(&spectrum);
        for (a, b) in back.samples().iter().zip(x.samples()) {
            round_trip = round_trip.max((a - b).abs());
        }
        let time: f64 = x.samples().iter().map(|v| v * v).sum();
        let freq: f64 = spectrum.coeffs().iter().map(|z| z.norm_sqr()).sum();
        parseval = parseval.max((time - n as f64 * freq).abs() / time);
        for (a, b) in spectrum.coeffs().iter().zip(naive_dft(x.samples())) {
            oracle = oracle.max((a - b).norm());
        }
    }
    for (h, w) in [(1, 1), (2, 3), (8, 8), (7, 12), (16, 16), (30, 17), (32, 64), (64, 64)] {
        let plane: Vec<f64> = (0..h * w).map(|_| rng.random_range(-1.0..1.0)).collect();
        let spectrum = dft2_plane(h, w, &plane);
        let back = idft2_complex(&spectrum);
        for (a, b) in back.values().iter().zip(&plane) {
            round_trip = round_trip.max((a - b).norm());
        }
        let time: f64 = plane.iter().map(|v| v * v).sum();
        let freq: f64 = spectrum.values().iter().map(|z| z.norm_sqr()).sum();
        parseval = parseval.max((time - (h * w) as f64 * freq).abs() / time);
        // separable oracle: direct transform of every row, then every column
        let rows: Vec<Vec<Complex64>> = plane.chunks(w).map(naive_dft).collect();
        for v in 0..w {
            let col_re: Vec<f64> = rows.iter().map(|r| r[v].re).collect();
            let col_im: Vec<f64> = rows.iter().map(|r| r[v].im).collect();
            let (re, im) = (naive_dft(&col_re), naive_dft(&col_im));
            for u in 0..h {
                let expected = re[u] + Complex64::i() * im[u];
                oracle = oracle.max((spectrum.get(u, v) - expected).norm());
            }
        }
    }
    let pass = round_trip < 1e-9 && parseval < 1e-9 && oracle < 1e-10;
    report(
        2,
        "transform correctness",
        pass,
        &format!("round-trip {round_trip:.2e}, Parseval rel {parseval:.2e}, brute-force {oracle:.2e}"),
    );
}

#[test]
fn c03_convolution_theorem() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let n = rng.random_range(1..=64);
        let m = rng.random_range(1..=n);
        let x = random_signal(&mut rng, n);
        let c = random_signal(&mut rng, m);
        worst = worst.max(convolution_theorem_deviation(&x, &c).unwrap());
        let mut padded = c.samples().to_vec();
        padded.resize(n, 0.0);
        let lhs = naive_dft(&naive_circular(x.samples(), c.samples()));
        let (fx, fc) = (naive_dft(x.samples()), naive_dft(&padded));
        for u in 0..n {
            worst = worst.max((lhs[u] - fx[u] * fc[u] * n as f64).norm());
        }
    }
    report(
        3,
        "convolution theorem",
        worst < 1e-10,
        &format!("100 cases, max deviation {worst:.2e}"),
    );
}

#[test]
fn c04_distributive_law() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let f = random_signal(&mut rng, 64);
        let g = random_signal(&mut rng, 64);
        let m = rng.random_range(1..=64);
        let h = random_signal(&mut rng, m);
        worst = worst.max(check_distributive(&f, &g, &h).unwrap());
        let sum: Vec<f64> = f.samples().iter().zip(g.samples()).map(|(a, b)| a + b).collect();
        let lhs = naive_circular(&sum, h.samples());
        let fh = naive_circular(f.samples(), h.samples());
        let gh = naive_circular(g.samples(), h.samples());
        for i in 0..64 {
            worst = worst.max((lhs[i] - (fh[i] + gh[i])).abs());
        }
    }
    report(
        4,
        "distributive law",
        worst < 1e-10,
        &format!("100 triples, max deviation {worst:.2e}"),
    );
}

#[test]
fn c05_component_counts() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut mismatches = Vec::new();
    for n in [8, 16, 32] {
        for k in [0, 1, 3] {
            let model = ComponentCountModel::new(n, k, DEFAULT_EPSILON).unwrap();
            let p = predicted_counts(&model, UpsampledAmplitudeReading::Labeled);
            let spectrum = dft1(&constructive_signal(&mut rng, n, k));
            let x_a = count_significant(&spectrum, DEFAULT_EPSILON).unwrap();
            let unit: Vec<Complex64> = spectrum
                .coeffs()
                .iter()
                .map(|z| Complex64::from_polar(1.0, principal_phase(*z)))
                .collect();
            let x_p = count_significant_coeffs(&unit, DEFAULT_EPSILON).unwrap();
            if (x_a, x_p) != (p.x_a, p.x_p) {
                mismatches.push(format!("N={n} k={k}: ({x_a}, {x_p}) vs ({}, {})", p.x_a, p.x_p));
            }
        }
    }
    let detail = if mismatches.is_empty() {
        "X_A and X_P exact for N in {8,16,32}, k in {0,1,3}".to_string()
    } else {
        mismatches.join("; ")
    };
    report(5, "component counts", mismatches.is_empty(), &detail);
}

#[test]
fn c06_fig1_trend() {
    let start = Instant::now();
    let corpus = texture_batch(1000, 64, 6).unwrap();
    let report_for = |mode| fig1_sweep(&corpus, ResampleKind::Bilinear, 5, mode).unwrap();
    let unit = report_for(PhaseMode::UnitAmplitude);
    let elapsed = start.elapsed();
    let abs = report_for(PhaseMode::AbsPhase);
    let dir = artifact_dir();
    unit.write_csv(File::create(dir.join("fig1_unit.csv")).unwrap())
        .unwrap();
    abs.write_csv(File::create(dir.join("fig1_abs.csv")).unwrap()).unwrap();

    let check = |r: &phasenet_core::upsample::SpectralDiffReport| {
        let monotone = r.rows[1..].windows(2).all(|w| w[1].phase_mean >= w[0].phase_mean);
        let dominant = r.rows[2..].iter().all(|row| row.phase_mean > row.amp_mean);
        let ratios: Vec<String> = r.rows[1..]
            .iter()
            .map(|row| format!("{:.2}", row.phase_mean / row.amp_mean))
            .collect();
        (monotone && dominant, monotone, ratios.join("/"))
    };
    let (unit_ok, unit_mono, unit_ratios) = check(&unit);
    let (abs_ok, abs_mono, abs_ratios) = check(&abs);
    let pass = unit_ok && elapsed < Duration::from_secs(300);
    report(
        6,
        "resampling drift trend",
        pass,
        &format!(
            "1000 images, bilinear, unit-amplitude phase: monotone={unit_mono}, |dP|/|dA| t=1..5 {unit_ratios}, {:.1}s \
             (abs-phase, informational: monotone={abs_mono}, ratios {abs_ratios}, holds={abs_ok})",
            secs(elapsed)
        ),
    );
}

#[test]
fn c07_gradient_fidelity() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let net = random_net(mixed_config(), &mut rng);
    let xs: Vec<_> = (0..3).map(|_| random_planes(&mut rng, 3, 12, 12)).collect();
    let refs: Vec<_> = xs.iter().collect();
    let (worst, count) = gradient_check(&net, &refs, &[2, 0, 1], 300, 7);
    let elapsed = start.elapsed();
    let pass = count >= 200 && worst < 1e-4 && elapsed < Duration::from_secs(60);
    report(
        7,
        "gradient fidelity",
        pass,
        &format!(
            "{count} parameters over conv/relu/maxpool/GAP/dense, max rel error {worst:.2e}, {:.2}s",
            secs(elapsed)
        ),
    );
}

#[test]
fn c08_receptive_field() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut failures = Vec::new();
    let mut checked = 0;
    while checked < 10 {
        if let Some(cfg) = random_rf_config(&mut rng) {
            if let Err(e) = rf_matches_oracle(&cfg) {
                failures.push(e);
            }
            checked += 1;
        }
    }
    let detail = if failures.is_empty() {
        "10 random configs match the perturbation oracle".to_string()
    } else {
        failures.join("; ")
    };
    report(8, "receptive field", failures.is_empty(), &detail);
}

#[test]
fn c09_scheduler_contract() {
    let tc = TrainConfig::default();
    let mut sched = PlateauScheduler::new(tc.learning_rate, tc.patience, tc.factor);
    let mut rates = vec![sched.lr()];
    sched.step(1.0);
    for _ in 0..20 {
        rates.push(sched.step(1.0));
    }
    let expected: Vec<f64> = (0..=20).map(|i| 2e-3 * 0.5f64.powi(i / 5)).collect();
    let first_drop = rates.iter().position(|&r| r != 2e-3);
    let pass = rates == expected && first_drop == Some(5) && rates[5] == 1e-3;
    let changes: Vec<String> = rates
        .windows(2)
        .filter(|w| w[0] != w[1])
        .map(|w| format!("{:e}", w[1]))
        .collect();
    report(
        9,
        "scheduler contract",
        pass,
        &format!("2e-3 -> {} on successive 5-epoch plateaus", changes.join(" -> ")),
    );
}

#[test]
fn c10_auc_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut mismatches = 0;
    let mut done = 0;
    while done < 100 {
        let n = rng.random_range(2..=50);
        let levels = rng.random_range(2..=10);
        let scores: Vec<f64> = (0..n)
            .map(|_| rng.random_range(0..levels) as f64 / levels as f64)
            .collect();
        let positive: Vec<bool> = (0..n).map(|_| rng.random_bool(0.5)).collect();
        if positive.iter().all(|&p| p) || positive.iter().all(|&p| !p) {
            continue;
        }
        if auc_roc(&scores, &positive).unwrap() != brute_auc(&scores, &positive) {
            mismatches += 1;
        }
        done += 1;
    }
    report(
        10,
        "AUC oracle equivalence",
        mismatches == 0,
        &format!("100 tied score sets, {mismatches} mismatches"),
    );
}

/// Phase-on cells beat phase-off at matched depth, and phase-on shallow is the best cell.
fn ablation_ordering(m: &AblationMatrix) -> (bool, String) {
    let cross = |phase, shallow| m.cell(phase, shallow).cross_auc_mean;
    let deep_ok = cross(true, false) > cross(false, false);
    let shallow_ok = cross(true, true) > cross(false, true);
    let best = m.cells.iter().all(|c| cross(true, true) >= c.cross_auc_mean);
    let cells: Vec<String> = m
        .cells
        .iter()
        .map(|c| format!("{} {:.3}±{:.3}", c.label(), c.cross_auc_mean, c.cross_auc_std))
        .collect();
    (
        deep_ok && shallow_ok && best,
        format!(
            "[{}] phase>rgb deep={deep_ok} shallow={shallow_ok}, full cell max={best}",
            cells.join(", ")
        ),
    )
}

/// Low-data regime: 90 training images per class, large val/test splits.
fn ablation_corpus_config() -> CorpusConfig {
    CorpusConfig {
        train_fraction: 0.3,
        val_fraction: 0.2,
        ..CorpusConfig::cross_distribution(7, 300)
    }
}

#[test]
fn c11_ablation_matrix() {
    let start = Instant::now();
    let corpus = generate_corpus(&ablation_corpus_config()).unwrap();
    let seeds = [0, 1, 2];
    let train_config = TrainConfig {
        max_epochs: 40,
        phase_mode: PhaseMode::UnitAmplitude,
        ..TrainConfig::default()
    };
    let dir = artifact_dir();
    let mut run_log = File::create(dir.join("ablation_runs.log")).unwrap();
    let unit = ablation_matrix(&corpus, &train_config, &seeds, &mut |r| {
        writeln!(run_log, "{r:?}").unwrap();
    })
    .unwrap();
    let elapsed = start.elapsed();
    unit.write_cells_csv(File::create(dir.join("ablation_unit.csv")).unwrap())
        .unwrap();
    unit.write_runs_csv(File::create(dir.join("ablation_unit_runs.csv")).unwrap())
        .unwrap();

    let abs_config = TrainConfig {
        phase_mode: PhaseMode::AbsPhase,
        ..train_config.clone()
    };
    let abs = ablation_matrix(&corpus, &abs_config, &seeds, &mut |r| {
        writeln!(run_log, "{r:?}").unwrap();
    })
    .unwrap();
    abs.write_cells_csv(File::create(dir.join("ablation_abs.csv")).unwrap())
        .unwrap();

    let (ordered, detail) = ablation_ordering(&unit);
    let (abs_ordered, abs_detail) = ablation_ordering(&abs);
    let pass = ordered && elapsed < Duration::from_secs(2 * 3600);
    report(
        11,
        "ablation matrix",
        pass,
        &format!(
            "held-out-kernel AUC, 3 seeds, unit-amplitude phase {detail}, {:.0}s \
             (abs-phase, informational: {abs_detail}, holds={abs_ordered})",
            secs(elapsed)
        ),
    );
}

#[test]
fn c12_fingerprint_separability() {
    let corpus = generate_corpus(&CorpusConfig::default()).unwrap();
    let groups = group_by_recipe(&corpus);
    let mut ratios = BTreeMap::new();
    for mode in [PhaseMode::AbsPhase, PhaseMode::UnitAmplitude] {
        let (_, r) = phase_fingerprint(&groups, mode).unwrap();
        let dir = artifact_dir();
        r.write_csv(File::create(dir.join(format!("fingerprint_{mode}.csv"))).unwrap())
            .unwrap();
        ratios.insert(mode, r.distinguishability);
    }
    let primary = ratios[&PhaseMode::default()];
    let pass = groups.len() >= 3 && primary > 1.0;
    let names: Vec<&str> = groups.keys().map(String::as_str).collect();
    report(
        12,
        "fingerprint separability",
        pass,
        &format!(
            "groups {names:?}, inter/intra {primary:.3} ({}), {} {:.3}",
            PhaseMode::default(),
            PhaseMode::UnitAmplitude,
            ratios[&PhaseMode::UnitAmplitude]
        ),
    );
}
