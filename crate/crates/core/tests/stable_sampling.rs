use levy_atm::stable::{
    positive_part_mean, positive_prob, rng_stream, sample_stable, tail_asymptote, Side, StableLaw, StableParamsSsf,
};

fn draws(params: &StableParamsSsf, n: usize, seed: u64) -> Vec<f64> {
    let mut rng = rng_stream(seed, 0);
    (0..n).map(|_| sample_stable(params, &mut rng)).collect()
}

fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn binomial_se(p: f64, n: usize) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

#[test]
fn asymmetric_positive_probability() {
    let law = StableLaw::new(1.5, 1.0, 2.0).unwrap();
    let p = positive_prob(&law);
    assert!((p - 0.56827758823304448388).abs() < 1e-14);
    let n = 1_000_000;
    let zs = draws(&law.ssf_at(1.0).unwrap(), n, 11);
    let freq = zs.iter().filter(|z| **z >= 0.0).count() as f64 / n as f64;
    assert!((freq - p).abs() <= 3.0 * binomial_se(p, n), "{freq} vs {p}");
}

#[test]
fn positive_part_mean_by_simulation() {
    // Z⁺ has infinite variance, so compare the truncated mean E[Z⁺ ∧ L] plus
    // E[(Z − L)⁺] = C L^{1−Y}/(Y(Y − 1)) implied by P(Z > v) ~ (C/Y)v^{−Y}
    let law = StableLaw::new(1.5, 0.5, 0.5).unwrap();
    let level = 50.0;
    let zs: Vec<f64> = draws(&law.ssf_at(1.0).unwrap(), 1_000_000, 12)
        .into_iter()
        .map(|z| z.clamp(0.0, level))
        .collect();
    let (mean, se) = mean_and_se(&zs);
    let tail = law.c_plus() * level.powf(1.0 - law.y()) / (law.y() * (law.y() - 1.0));
    let estimate = mean + tail;
    assert!((estimate - positive_part_mean(&law)).abs() <= 3.0 * se, "{estimate} ± {se}");
}

#[test]
fn mean_equals_location() {
    let params = StableParamsSsf::new(1.5, 1.0, 0.0, 0.25).unwrap();
    let (mean, se) = mean_and_se(&draws(&params, 1_000_000, 13));
    assert!((mean - 0.25).abs() <= 3.0 * se, "{mean} ± {se}");
}

#[test]
fn symmetric_tail_frequencies() {
    // at C = 0.5 the leading term is still 28% off at v = 5; a small intensity
    // shrinks the scale so all three levels sit in the tail
    let law = StableLaw::new(1.5, 0.05, 0.05).unwrap();
    let n = 1_000_000;
    let zs = draws(&law.ssf_at(1.0).unwrap(), n, 14);
    for v in [5.0, 10.0, 20.0] {
        let freq = zs.iter().filter(|z| **z > v).count() as f64 / n as f64;
        let expected = tail_asymptote(&law, v, Side::Positive).unwrap();
        assert!((freq - expected).abs() <= 3.0 * binomial_se(expected, n), "v = {v}: {freq} vs {expected}");
    }
}

fn ks_statistic(mut a: Vec<f64>, mut b: Vec<f64>) -> f64 {
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

#[test]
fn self_similarity() {
    let law = StableLaw::new(1.5, 0.5, 1.0).unwrap();
    let n = 100_000;
    let t: f64 = 0.01;
    let scaled: Vec<f64> = draws(&law.ssf_at(t).unwrap(), n, 15)
        .into_iter()
        .map(|z| z * t.powf(-1.0 / law.y()))
        .collect();
    let unit = draws(&law.ssf_at(1.0).unwrap(), n, 16);
    let d = ks_statistic(scaled, unit);
    let critical = 1.63 * (2.0 / n as f64).sqrt();
    assert!(d < critical, "KS {d} >= {critical}");
}

#[test]
fn uniform_tail_bound() {
    let law = StableLaw::new(1.5, 0.5, 0.5).unwrap();
    let n = 100_000;
    let kappa = 2.0;
    for (k, t) in [1e-3, 1e-2, 1e-1, 1.0].into_iter().enumerate() {
        let zs = draws(&law.ssf_at(t).unwrap(), n, 20 + k as u64);
        for v in [1.0, 5.0, 10.0, 50.0] {
            let freq = zs.iter().filter(|z| z.abs() >= v).count() as f64 / n as f64;
            // one-sided test of P(|Z_t| ≥ v) ≤ κ t v^{−Y}
            let bound = (kappa * t * v.powf(-law.y())).min(1.0);
            assert!(freq <= bound + 3.0 * binomial_se(bound, n), "t = {t}, v = {v}: {}", freq * v.powf(law.y()) / t);
        }
    }
}
