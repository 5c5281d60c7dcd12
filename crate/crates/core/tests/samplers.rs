mod common;

use std::collections::HashMap;
use std::f64::consts::{FRAC_1_SQRT_2, PI};

use ndarray::array;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use bsfill_core::math::{haar_random_unitary, OccupationList, UnitaryMatrix};
use bsfill_core::samplers::{InputState, Sampler, SamplerKind};

use common::{all_outcomes, boson_probability, distinguishable_probability, histogram, tvd};

fn draws(sampler: &Sampler, count: usize, seed: u64) -> Vec<OccupationList> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| sampler.draw(&mut rng)).collect()
}

fn beam_splitter() -> UnitaryMatrix {
    let h = FRAC_1_SQRT_2;
    UnitaryMatrix::new(array![
        [Complex64::new(h, 0.0), Complex64::new(h, 0.0)],
        [Complex64::new(h, 0.0), Complex64::new(-h, 0.0)]
    ])
    .unwrap()
}

/// Mean-field law on a balanced beam splitter, integrated over a phase grid.
fn mean_field_hom_oracle() -> HashMap<Vec<u32>, f64> {
    const GRID: usize = 10_000;
    let (mut p11, mut p20, mut p02) = (0.0, 0.0, 0.0);
    for i in 0..GRID {
        let delta = 2.0 * PI * (i as f64 + 0.5) / GRID as f64;
        let q0 = (1.0 + delta.cos()) / 2.0;
        let q1 = 1.0 - q0;
        p20 += q0 * q0;
        p02 += q1 * q1;
        p11 += 2.0 * q0 * q1;
    }
    let g = GRID as f64;
    HashMap::from([(vec![1, 1], p11 / g), (vec![2, 0], p20 / g), (vec![0, 2], p02 / g)])
}

#[test]
fn mean_field_reproduces_phase_averaged_two_photon_law() {
    let oracle = mean_field_hom_oracle();
    assert!((oracle[&vec![1, 1]] - 0.25).abs() < 1e-9);
    assert!((oracle[&vec![2, 0]] - 0.375).abs() < 1e-9);

    let input = InputState::new(2, 2).unwrap();
    let sampler = Sampler::prepare(SamplerKind::MeanField, Some(&beam_splitter()), &input).unwrap();
    let n = 200_000;
    let hist = histogram(&draws(&sampler, n, 3));
    for (counts, p) in &oracle {
        let freq = *hist.get(counts).unwrap_or(&0) as f64 / n as f64;
        let se = (p * (1.0 - p) / n as f64).sqrt();
        assert!((freq - p).abs() < 5.0 * se, "{counts:?}: {freq} vs {p}");
    }
}

#[test]
fn boson_bunches_on_a_beam_splitter() {
    let input = InputState::new(2, 2).unwrap();
    let sampler = Sampler::boson(&beam_splitter(), &input).unwrap();
    let hist = histogram(&draws(&sampler, 10_000, 1));
    assert_eq!(hist.get(&vec![1, 1]), None);
}

#[test]
fn single_photon_laws_coincide() {
    // One photon cannot interfere: every unitary-based sampler routes it with |Lambda_k0|^2.
    let m = 6;
    let u = haar_random_unitary(m, 12).unwrap();
    let input = InputState::new(m, 1).unwrap();
    let law: Vec<f64> = (0..m).map(|k| u.get(k, 0).norm_sqr()).collect();
    let n = 60_000;
    for kind in [SamplerKind::Boson, SamplerKind::Distinguishable, SamplerKind::MeanField] {
        let sampler = Sampler::prepare(kind, Some(&u), &input).unwrap();
        let hist = histogram(&draws(&sampler, n, 5));
        let chi2: f64 = (0..m)
            .map(|k| {
                let mut counts = vec![0; m];
                counts[k] = 1;
                let observed = *hist.get(&counts).unwrap_or(&0) as f64;
                let expected = law[k] * n as f64;
                (observed - expected).powi(2) / expected
            })
            .sum();
        // 5 degrees of freedom; 0.999 quantile is 20.5.
        assert!(chi2 < 20.5, "{kind}: chi2 = {chi2}");
    }
}

#[test]
fn total_variation_shrinks_with_more_draws() {
    let (m, n) = (6, 3);
    let u = haar_random_unitary(m, 21).unwrap();
    let input = InputState::new(m, n).unwrap();
    for (kind, oracle) in [
        (SamplerKind::Boson, boson_probability as fn(&UnitaryMatrix, &OccupationList, &OccupationList) -> f64),
        (SamplerKind::Distinguishable, distinguishable_probability),
    ] {
        let law: Vec<(OccupationList, f64)> =
            all_outcomes(m, n).into_iter().map(|s| { let p = oracle(&u, input.occupation(), &s); (s, p) }).collect();
        let total: f64 = law.iter().map(|(_, p)| p).sum();
        assert!((total - 1.0).abs() < 1e-12);
        let sampler = Sampler::prepare(kind, Some(&u), &input).unwrap();
        let sample = draws(&sampler, 100_000, 8);
        let d: Vec<f64> = [1_000, 10_000, 100_000].iter().map(|&k| tvd(&histogram(&sample[..k]), k, &law)).collect();
        assert!(d[0] > d[1] && d[1] > d[2], "{kind}: {d:?}");
        assert!(d[2] < 0.02, "{kind}: {d:?}");
    }
}

#[test]
fn uniform_sampler_is_flat() {
    let (m, n) = (5, 2);
    let sampler = Sampler::uniform(m, n).unwrap();
    let outcomes = all_outcomes(m, n);
    let law: Vec<(OccupationList, f64)> = outcomes.iter().map(|s| (s.clone(), 1.0 / outcomes.len() as f64)).collect();
    let k = 50_000;
    assert!(tvd(&histogram(&draws(&sampler, k, 2)), k, &law) < 0.02);
}

#[test]
fn collision_free_sets_have_no_bunching() {
    let u = haar_random_unitary(12, 2).unwrap();
    let input = InputState::new(12, 3).unwrap();
    for kind in SamplerKind::ALL {
        let lambda = kind.needs_unitary().then_some(&u);
        let set = Sampler::prepare(kind, lambda, &input).unwrap().collect(150, 4, true).unwrap();
        assert_eq!(set.len(), 150);
        assert!(set.meta().collision_free);
        assert!(set.samples().iter().all(OccupationList::is_collision_free), "{kind}");
    }
}

#[test]
fn collection_is_deterministic_in_the_seed() {
    let u = haar_random_unitary(9, 3).unwrap();
    let input = InputState::new(9, 3).unwrap();
    for kind in SamplerKind::ALL {
        let sampler = Sampler::prepare(kind, kind.needs_unitary().then_some(&u), &input).unwrap();
        let a = sampler.collect(100, 77, false).unwrap();
        let b = sampler.collect(100, 77, false).unwrap();
        let c = sampler.collect(100, 78, false).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.samples(), c.samples());
    }
}
