use std::f64::consts::PI;
use std::path::Path;

use anyhow::bail;
use phasenet_core::spectral::{dft1, idft1_complex, principal_phase, Complex64};
use phasenet_core::upsample::{
    check_distributive, convolution_theorem_deviation, count_significant, count_significant_coeffs, predicted_counts,
    upsample_zero_insert, verify_duplication, ComponentCountModel, DEFAULT_EPSILON,
};
use phasenet_core::{Signal1D, Spectrum1D};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::output;
use crate::VerifyTarget;

const DUPLICATION_TOLERANCE: f64 = 1e-9;
const IDENTITY_TOLERANCE: f64 = 1e-10;

fn random_signal(rng: &mut ChaCha8Rng, n: usize) -> anyhow::Result<Signal1D> {
    Ok(Signal1D::new((0..n).map(|_| rng.random_range(-1.0..1.0)).collect())?)
}

/// Real signal whose spectrum has exactly `k + 1` nonzero bins.
///
/// Bins are filled as DC, then Nyquist when `k` is odd, then conjugate pairs.
fn constructive_signal(rng: &mut ChaCha8Rng, n: usize, k: usize) -> anyhow::Result<Signal1D> {
    if k + 1 > n || (k % 2 == 1 && n % 2 == 1) {
        bail!("no real signal of length {n} has exactly {} spectral components", k + 1);
    }
    let mut spectrum = vec![Complex64::new(0.0, 0.0); n];
    spectrum[0] = Complex64::new(rng.random_range(0.5..1.0), 0.0);
    let mut remaining = k;
    if remaining % 2 == 1 {
        spectrum[n / 2] = Complex64::new(rng.random_range(0.5..1.0), 0.0);
        remaining -= 1;
    }
    for u in 1..=remaining / 2 {
        let z = Complex64::from_polar(rng.random_range(0.5..1.0), rng.random_range(-PI..PI));
        spectrum[u] = z;
        spectrum[n - u] = z.conj();
    }
    let time = idft1_complex(&Spectrum1D::new(spectrum)?);
    Ok(Signal1D::new(time.iter().map(|z| z.re).collect())?)
}

fn phase_count(spectrum: &Spectrum1D) -> anyhow::Result<usize> {
    let unit: Vec<Complex64> = spectrum
        .coeffs()
        .iter()
        .map(|&z| Complex64::from_polar(1.0, principal_phase(z)))
        .collect();
    Ok(count_significant_coeffs(&unit, DEFAULT_EPSILON)?)
}

/// Runs the random cases of one identity; returns `(case, n, deviation)` rows.
fn deviations(
    rng: &mut ChaCha8Rng,
    cases: usize,
    mut one: impl FnMut(&mut ChaCha8Rng) -> anyhow::Result<(usize, f64)>,
) -> anyhow::Result<Vec<(usize, usize, f64)>> {
    (0..cases).map(|case| one(rng).map(|(n, d)| (case, n, d))).collect()
}

pub fn run(target: VerifyTarget, cases: Option<usize>, seed: u64, out: &Path) -> anyhow::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if target == VerifyTarget::Counts {
        return counts(&mut rng, cases.unwrap_or(1), out);
    }
    let (name, tolerance, rows) = match target {
        VerifyTarget::Eq2 => (
            "duplication",
            DUPLICATION_TOLERANCE,
            deviations(&mut rng, cases.unwrap_or(1000), |rng| {
                let n = rng.random_range(4..=64);
                Ok((n, verify_duplication(&random_signal(rng, n)?)))
            })?,
        ),
        VerifyTarget::Eq5 => (
            "convolution-theorem",
            IDENTITY_TOLERANCE,
            deviations(&mut rng, cases.unwrap_or(100), |rng| {
                let n = rng.random_range(1..=64);
                let m = rng.random_range(1..=n.min(8));
                let (x, c) = (random_signal(rng, n)?, random_signal(rng, m)?);
                Ok((n, convolution_theorem_deviation(&x, &c)?))
            })?,
        ),
        VerifyTarget::Theorem1 => (
            "distributive-law",
            IDENTITY_TOLERANCE,
            deviations(&mut rng, cases.unwrap_or(100), |rng| {
                let n = rng.random_range(1..=64);
                let m = rng.random_range(1..=n);
                let (f, g, h) = (random_signal(rng, n)?, random_signal(rng, n)?, random_signal(rng, m)?);
                Ok((n, check_distributive(&f, &g, &h)?))
            })?,
        ),
        VerifyTarget::Counts => unreachable!("handled above"),
    };
    let (path, writer) = output::create(out, &format!("verify_{name}.csv"))?;
    let mut csv = csv::Writer::from_writer(writer);
    csv.write_record(["case", "n", "deviation"])?;
    for (case, n, d) in &rows {
        csv.write_record([case.to_string(), n.to_string(), d.to_string()])?;
    }
    csv.flush()?;
    output::announce(&path);
    let worst = rows.iter().map(|r| r.2).fold(0.0, f64::max);
    let failures = rows.iter().filter(|r| !(r.2 < tolerance)).count();
    println!(
        "{name}: {} cases, max deviation {worst:.3e}, tolerance {tolerance:.0e}",
        rows.len()
    );
    if failures > 0 {
        bail!("{name}: {failures} of {} cases exceed {tolerance:.0e}", rows.len());
    }
    Ok(())
}

fn counts(rng: &mut ChaCha8Rng, repeats: usize, out: &Path) -> anyhow::Result<()> {
    let (path, writer) = output::create(out, "verify_counts.csv")?;
    let mut csv = csv::Writer::from_writer(writer);
    csv.write_record(["n", "k", "trial", "quantity", "predicted", "measured"])?;
    let mut mismatches = Vec::new();
    for n in [8, 16, 32] {
        for k in [0, 1, 3] {
            let predicted = predicted_counts(&ComponentCountModel::new(n, k, DEFAULT_EPSILON)?, Default::default());
            for trial in 0..repeats {
                let x = constructive_signal(rng, n, k)?;
                let spectrum = dft1(&x);
                let up = dft1(&upsample_zero_insert(&x, 2)?);
                let checks = [
                    ("x_a", predicted.x_a, count_significant(&spectrum, DEFAULT_EPSILON)?),
                    ("x_p", predicted.x_p, phase_count(&spectrum)?),
                    ("x_a_up", predicted.x_a_up, count_significant(&up, DEFAULT_EPSILON)?),
                    ("x_p_up", predicted.x_p_up, phase_count(&up)?),
                ];
                for (quantity, expected, measured) in checks {
                    csv.write_record([
                        n.to_string(),
                        k.to_string(),
                        trial.to_string(),
                        quantity.to_string(),
                        expected.to_string(),
                        measured.to_string(),
                    ])?;
                    if expected != measured {
                        mismatches.push(format!(
                            "{quantity} n={n} k={k}: predicted {expected}, measured {measured}"
                        ));
                    }
                }
            }
        }
    }
    csv.flush()?;
    output::announce(&path);
    if !mismatches.is_empty() {
        bail!("component counts disagree:\n  {}", mismatches.join("\n  "));
    }
    println!("component counts: all {} checks match", 9 * 4 * repeats);
    Ok(())
}
