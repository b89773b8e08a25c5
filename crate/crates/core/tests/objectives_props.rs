mod common;

use ndarray::Array2;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{fd_gradient, max_rel_error, normal_matrix, uniform_matrix, FD_STEP};
use svs_core::dsp::F0Contour;
use svs_core::gaussian::DiagGaussian;
use svs_core::objectives::{
    final_loss, kl_aperiodic, kl_diag_gaussian, pitch_loss, sample_gaussian, LossComponents,
    LossWeights,
};

fn gaussian(seed: u64, rows: usize, dims: usize) -> DiagGaussian {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    DiagGaussian::new(normal_matrix(&mut rng, rows, dims, 1.0), uniform_matrix(&mut rng, rows, dims, -1.5, 1.5)).unwrap()
}

fn components() -> impl Strategy<Value = LossComponents> {
    prop::array::uniform7(0.0f64..10.0).prop_map(|c| LossComponents {
        adv: c[0],
        fm: c[1],
        mel: c[2],
        pitch: c[3],
        kl_a: c[4],
        kl_p: c[5],
        dur: c[6],
    })
}

fn with_component(c: &LossComponents, i: usize, v: f64) -> LossComponents {
    let mut c = *c;
    *[&mut c.adv, &mut c.fm, &mut c.mel, &mut c.pitch, &mut c.kl_a, &mut c.kl_p, &mut c.dur][i] = v;
    c
}

proptest! {
    #[test]
    fn kl_is_non_negative(a in any::<u64>(), b in any::<u64>(), rows in 1usize..6, dims in 1usize..6) {
        let value = kl_diag_gaussian(&gaussian(a, rows, dims), &gaussian(b, rows, dims)).unwrap().value;
        prop_assert!(value >= 0.0);
    }

    #[test]
    fn kl_of_self_is_zero(a in any::<u64>(), rows in 1usize..6, dims in 1usize..6) {
        let q = gaussian(a, rows, dims);
        prop_assert!(kl_diag_gaussian(&q, &q).unwrap().value.abs() <= 1e-12);
    }

    #[test]
    fn kl_gradient_matches_finite_differences(seed in any::<u64>()) {
        let (q, p) = (gaussian(seed, 8, 4), gaussian(seed ^ 0x5555, 8, 4));
        let out = kl_diag_gaussian(&q, &p).unwrap();
        let flat = |m: &Array2<f64>| m.iter().copied().collect::<Vec<_>>();
        let numeric = fd_gradient(&flat(q.means()), FD_STEP, |x| {
            let m = Array2::from_shape_vec((8, 4), x.to_vec()).unwrap();
            kl_diag_gaussian(&DiagGaussian::new(m, q.log_stds().clone()).unwrap(), &p).unwrap().value
        });
        prop_assert!(max_rel_error(&flat(&out.grad_q.means), &numeric) < 1e-5);
        let numeric = fd_gradient(&flat(p.log_stds()), FD_STEP, |x| {
            let l = Array2::from_shape_vec((8, 4), x.to_vec()).unwrap();
            kl_diag_gaussian(&q, &DiagGaussian::new(p.means().clone(), l).unwrap()).unwrap().value
        });
        prop_assert!(max_rel_error(&flat(&out.grad_p.log_stds), &numeric) < 1e-5);
    }

    #[test]
    fn detached_block_is_zero(seed in any::<u64>(), lambda in 0.0f64..5.0) {
        let g = |k: u64| gaussian(seed.wrapping_add(k), 3, 2);
        let out = kl_aperiodic(&g(0), &g(1), &g(2), &g(3), lambda).unwrap();
        prop_assert!(out.grad_q_a.means.iter().chain(out.grad_q_a.log_stds.iter()).all(|&v| v == 0.0));
    }

    #[test]
    fn pitch_loss_ignores_units(
        f0 in prop::collection::vec(prop_oneof![1 => Just(0.0), 4 => 80.0f64..600.0], 5..40),
        ratio in prop::collection::vec(0.7f64..1.3, 40),
        scale in prop_oneof![Just(2.0), Just(1000.0), Just(0.001), 0.1f64..10.0],
    ) {
        let pred: Vec<f64> = f0.iter().zip(&ratio).map(|(f, r)| if *f > 0.0 { f * r } else { 1.0 }).collect();
        let smooth: Vec<f64> = pred.iter().map(|p| p * 1.05).collect();
        let base = pitch_loss(&F0Contour::new(f0.clone()).unwrap(), &pred, &smooth, 1.0, 5).unwrap().value;
        let up = |v: &[f64]| v.iter().map(|x| x * scale).collect::<Vec<_>>();
        let scaled = pitch_loss(&F0Contour::new(up(&f0)).unwrap(), &up(&pred), &up(&smooth), 1.0, 5).unwrap().value;
        prop_assert!((base - scaled).abs() <= 1e-9 * base.max(1.0), "{} vs {}", base, scaled);
    }

    #[test]
    fn final_loss_is_linear(c in components(), i in 0usize..7, delta in 0.01f64..5.0) {
        let w = LossWeights::default();
        let weights = [1.0, w.lambda_fm, w.lambda_mel, w.lambda_pitch, w.lambda_a, w.lambda_p, w.lambda_dur];
        let base = final_loss(&c, &w).unwrap();
        let v = c.named()[i].1;
        let moved = final_loss(&with_component(&c, i, v + delta), &w).unwrap();
        prop_assert!(((moved - base) / delta - weights[i]).abs() <= 1e-9 * weights[i].max(1.0) * (1.0 + base / delta));
    }
}

#[test]
fn zero_temperature_returns_the_mean() {
    let q = gaussian(3, 4, 3);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let eps = normal_matrix(&mut rng, 4, 3, 1.0);
    assert_eq!(&sample_gaussian(&q, 0.0, &eps).unwrap(), q.means());
}
