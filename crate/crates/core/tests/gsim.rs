use fracspec::gsim::*;
use fracspec::specmodel::{autocovariance, limit_covariance};
use fracspec::stats::{ks_pvalue, ks_statistic_normal, mean};
use fracspec::SpectralModel;
use std::f64::consts::PI;

fn white() -> SpectralModel {
    SpectralModel::constant(1.0 / (2.0 * PI)).unwrap()
}

fn ar1(rho: f64) -> SpectralModel {
    SpectralModel::ar1(rho).unwrap()
}

#[test]
fn white_noise_pooled_moments() {
    let sampler = CirculantSampler::new(&white(), 1024).unwrap();
    let mut all = Vec::new();
    for k in 0..200 {
        all.extend(sampler.sample_values(11, k, 0.0));
    }
    let m = mean(&all);
    let v = all.iter().map(|x| x * x).sum::<f64>() / all.len() as f64;
    let total = all.len() as f64;
    assert!(m.abs() < 5.0 / total.sqrt(), "{m}");
    // Var(η²) = 2 for unit-variance Gaussians
    assert!((v - 1.0).abs() < 5.0 * (2.0 / total).sqrt(), "{v}");
}

#[test]
fn ar1_lag_one_autocovariance() {
    let path = sample_path(&ar1(0.5), 100_000, 3, 0.0).unwrap();
    let x = &path.values;
    let c1 = x.windows(2).map(|w| w[0] * w[1]).sum::<f64>() / (x.len() - 1) as f64;
    assert!((c1 - 0.5).abs() < 0.03, "{c1}");
}

#[test]
fn pairwise_covariances_match_autocovariance() {
    let reps = 20_000;
    for model in [ar1(0.5), ar1(-0.7), white()] {
        let sampler = CirculantSampler::new(&model, 64).unwrap();
        let draws: Vec<Vec<f64>> = (0..reps)
            .map(|k| sampler.sample_values(5, k, 0.0))
            .collect();
        for m in [0usize, 1, 2, 5, 17, 63] {
            let emp = draws.iter().map(|x| x[0] * x[m]).sum::<f64>() / reps as f64;
            let (r0, rm) = (autocovariance(&model, 0), autocovariance(&model, m as i64));
            let se = ((r0 * r0 + rm * rm) / reps as f64).sqrt();
            assert!((emp - rm).abs() < 5.0 * se, "lag {m}: {emp} vs {rm}");
        }
    }
}

#[test]
fn marginals_are_gaussian() {
    let model = ar1(0.5);
    let sampler = CirculantSampler::new(&model, 256).unwrap();
    let sd = autocovariance(&model, 0).sqrt();
    let z: Vec<f64> = (0..2000)
        .map(|k| sampler.sample_values(9, k, 0.0)[100] / sd)
        .collect();
    let p = ks_pvalue(ks_statistic_normal(&z), z.len());
    assert!(p >= 0.01, "{p}");
}

#[test]
fn limit_process_draws_have_target_covariance() {
    let probes = [PI / 2.0, PI, 3.0 * PI / 2.0];
    let cov = limit_covariance(&ar1(0.5), 0.25, &probes).unwrap();
    let reps = 5000;
    let draws: Vec<Vec<f64>> = (0..reps)
        .map(|k| sample_limit_process(&cov, 21, k))
        .collect();
    let m = cov.projected();
    for i in 0..3 {
        let mi = draws.iter().map(|d| d[i]).sum::<f64>() / reps as f64;
        assert!(mi.abs() < 5.0 * (m[(i, i)] / reps as f64).sqrt());
        for j in 0..3 {
            let emp = draws.iter().map(|d| d[i] * d[j]).sum::<f64>() / reps as f64;
            let se = ((m[(i, i)] * m[(j, j)] + m[(i, j)].powi(2)) / reps as f64).sqrt();
            assert!(
                (emp - m[(i, j)]).abs() < 5.0 * se,
                "({i},{j}) {emp} vs {}",
                m[(i, j)]
            );
        }
    }
}

#[test]
fn added_mean_shifts_and_centering_removes_it() {
    let model = ar1(0.3);
    let plain = sample_path_stream(&model, 128, 4, 9, 0.0).unwrap();
    let shifted = sample_path_stream(&model, 128, 4, 9, 2.5).unwrap();
    assert_eq!(shifted.added_mean, 2.5);
    for (a, b) in plain.values.iter().zip(&shifted.values) {
        assert!((b - a - 2.5).abs() < 1e-12);
    }
    let (c1, c2) = (center_sample(&plain), center_sample(&shifted));
    assert!(c1.centered && c2.centered);
    for (a, b) in c1.values.iter().zip(&c2.values) {
        assert!((a - b).abs() < 1e-12);
    }
    assert!(mean(&c2.values).abs() < 1e-12);
}

#[test]
fn draws_are_reproducible_per_stream() {
    let model = ar1(0.5);
    let a = sample_path_stream(&model, 300, 1, 2, 0.0).unwrap();
    let b = sample_path_stream(&model, 300, 1, 2, 0.0).unwrap();
    let c = sample_path_stream(&model, 300, 1, 3, 0.0).unwrap();
    assert_eq!(a.values, b.values);
    assert_ne!(a.values, c.values);
}

#[test]
fn csv_round_trip_is_exact() {
    let path = sample_path_stream(&ar1(0.5), 50, 8, 7, 1.25).unwrap();
    let mut buf = Vec::new();
    path.write_csv(&mut buf, &[]).unwrap();
    let back = SamplePath::read_csv(&buf[..]).unwrap();
    assert_eq!(back.values, path.values);
    assert_eq!((back.seed, back.stream, back.added_mean), (8, 7, 1.25));
}

#[test]
fn embedding_is_exact_for_valid_models() {
    for n in [1, 2, 3, 100, 1024, 5000] {
        let s = CirculantSampler::new(&ar1(0.9), n).unwrap();
        assert!(s.embedding_size() >= 2 * (n.max(2) - 1));
        assert_eq!(s.n(), n);
        assert_eq!(s.sample_values(1, 0, 0.0).len(), n);
    }
}
