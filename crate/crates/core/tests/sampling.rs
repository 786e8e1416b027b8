use std::f64::consts::PI;

use qfree::ensembles::*;
use qfree::greens::GridSpec;
use qfree::laws::EllipticLaw;
use qfree::linalg::eigenvalues;
use qfree::C64;
use rand::Rng;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn elliptic(mu: f64) -> EnsembleSpec {
    EnsembleSpec::Elliptic(EllipticLaw::standard(mu).unwrap())
}

#[test]
fn second_moments() {
    let batch = sample_matrices(&elliptic(0.0), 256, 32, 11).unwrap();
    let m = mixed_moment(&batch, "XX†").unwrap();
    assert!((m - c(1.0, 0.0)).norm() < 0.05, "{m}");
    let m1 = mixed_moment(&batch, "X").unwrap();
    assert!(m1.norm() < 0.05, "{m1}");

    let batch = sample_matrices(&elliptic(0.5), 256, 32, 12).unwrap();
    let m = mixed_moment(&batch, "XX").unwrap();
    assert!((m - c(0.5, 0.0)).norm() < 0.05, "{m}");
    let m = mixed_moment(&batch, "XX*").unwrap();
    assert!((m - c(1.0, 0.0)).norm() < 0.05, "{m}");
}

#[test]
fn rotated_ginibre_has_the_same_radial_law() {
    let radii = |spec: &EnsembleSpec, seed| {
        let b = SampleBatch::generate(spec, 256, 48, seed).unwrap();
        let mut r: Vec<f64> = b.eigenvalues.iter().map(|z| z.norm()).collect();
        r.sort_by(f64::total_cmp);
        r
    };
    let a = radii(&EnsembleSpec::Ginibre, 1);
    let b = radii(&EnsembleSpec::scale(C64::from_polar(1.0, PI / 3.0), EnsembleSpec::Ginibre), 2);
    // two-sample Kolmogorov-Smirnov distance
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        if a[i] <= b[j] {
            i += 1;
        } else {
            j += 1;
        }
        d = d.max((i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs());
    }
    assert!(d <= 0.02, "KS distance {d}");
}

#[test]
fn adjoint_spectrum_is_conjugate() {
    let mut rng = rep_rng(3, 0);
    let law = EllipticLaw::new(c(0.2, -0.1), 1.0, 0.3, 0.4).unwrap();
    let x = sample_elliptic(&law, 60, &mut rng);
    let mut a: Vec<C64> = eigenvalues(&x).unwrap().into_iter().map(|z| z.conj()).collect();
    let mut b = eigenvalues(&x.adjoint()).unwrap();
    let key = |z: &C64| (z.re, z.im);
    a.sort_by(|p, q| key(p).partial_cmp(&key(q)).unwrap());
    b.sort_by(|p, q| key(p).partial_cmp(&key(q)).unwrap());
    for (p, q) in a.iter().zip(&b) {
        assert!((p - q).norm() < 1e-9, "{p} vs {q}");
    }
}

#[test]
fn histogram_of_uniform_disk_points() {
    let mut rng = rep_rng(9, 0);
    let pts: Vec<C64> = (0..200_000)
        .map(|_| C64::from_polar(rng.random::<f64>().sqrt(), 2.0 * PI * rng.random::<f64>()))
        .collect();
    let grid = GridSpec::new(-0.6, 0.6, -0.6, 0.6, 6, 6).unwrap();
    let h = histogram_density(&pts, &grid).unwrap();
    // ~1800 points per cell, 2.4% noise
    for v in &h.values {
        assert!((v - 1.0 / PI).abs() < 0.1 / PI, "{v}");
    }
}

#[test]
fn ginibre_histogram_is_flat() {
    let batch = SampleBatch::generate(&EnsembleSpec::Ginibre, 256, 100, 4).unwrap();
    let grid = GridSpec::new(-0.6, 0.6, -0.6, 0.6, 6, 6).unwrap();
    let h = histogram_density(&batch.eigenvalues, &grid).unwrap();
    let mean = h.values.iter().sum::<f64>() / h.values.len() as f64;
    assert!((mean * PI - 1.0).abs() < 0.05, "{mean}");
    for v in &h.values {
        assert!((v * PI - 1.0).abs() < 0.15, "{v}");
    }
}

#[test]
fn elliptic_density_matches_histogram() {
    let spec = elliptic(0.5);
    let theory = spec.theory().unwrap();
    let grid = GridSpec::new(-0.9, 0.9, -0.3, 0.3, 6, 2).unwrap();
    let rho = theory.density(&grid).unwrap();
    let expected = 1.0 / (PI * 1.5 * 0.5);
    for v in &rho.values {
        assert!((v - expected).abs() < 1e-6, "{v}");
    }
    let batch = SampleBatch::generate(&spec, 256, 60, 8).unwrap();
    let h = histogram_density(&batch.eigenvalues, &grid).unwrap();
    let mean = h.values.iter().sum::<f64>() / h.values.len() as f64;
    assert!((mean / expected - 1.0).abs() < 0.05, "{mean} vs {expected}");
}

#[test]
fn comparing_theory_with_itself() {
    let spec = elliptic(0.3);
    let theory = spec.theory().unwrap();
    let grid = GridSpec::new(-2.0, 2.0, -2.0, 2.0, 20, 20).unwrap();
    let rho = theory.density(&grid).unwrap();
    assert_eq!(density_l1(&rho, &rho, 100_000).unwrap(), 0.0);
}

#[test]
fn shifted_product_realises_the_limacon() {
    let spec = EnsembleSpec::product(
        EnsembleSpec::shift(c(1.0, 0.0), EnsembleSpec::Ginibre),
        EnsembleSpec::shift(c(1.0, 0.0), EnsembleSpec::Ginibre),
    );
    let theory = spec.theory().unwrap();
    let contour = theory.contour(360).unwrap();
    let grid = GridSpec::new(-1.0, 4.0, -2.5, 2.5, 40, 40).unwrap();
    let rho = theory.density(&grid).unwrap();
    let batch = SampleBatch::generate(&spec, 100, 200, 21).unwrap();
    let report = compare(&rho, Some(&contour), &batch).unwrap();
    assert!(report.coverage >= 0.95, "{report:?}");
    assert!((report.mass_theory - 1.0).abs() < 0.02, "{report:?}");
}
