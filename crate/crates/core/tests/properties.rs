//! Property tests for the spectral layer and the transform invariants.

use num_complex::Complex64;
use proptest::prelude::*;

use cwt_core::*;

fn signal_strategy() -> impl Strategy<Value = SampledSignal> {
    // power-of-two and awkward lengths, bounded values
    (prop::sample::select(vec![96usize, 128, 160, 256]), any::<u64>()).prop_map(|(n, seed)| {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let grid = UniformGrid::centered(8.0, n).unwrap();
        let values: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        SampledSignal::from_real(grid, values).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn parseval(f in signal_strategy()) {
        let spec = forward_ft(&f);
        let time = signal_energy(&f);
        let freq = spec.energy();
        prop_assert!((time - freq).abs() <= 1e-10 * time.max(1e-30));
    }

    #[test]
    fn forward_ft_is_linear(f in signal_strategy(), g in signal_strategy(), a in -3.0f64..3.0, b in -3.0f64..3.0) {
        prop_assume!(f.grid().n() == g.grid().n());
        let combo = SampledSignal::new(
            f.grid().clone(),
            f.values().iter().zip(g.values()).map(|(x, y)| x * a + y * b).collect(),
        ).unwrap();
        let lhs = forward_ft(&combo);
        let ff = forward_ft(&f);
        let fg = forward_ft(&g);
        let scale = lhs.max_abs().max(1e-30);
        for ((l, x), y) in lhs.values().iter().zip(ff.values()).zip(fg.values()) {
            prop_assert!((l - (x * a + y * b)).norm() <= 1e-12 * scale);
        }
    }

    #[test]
    fn round_trip(f in signal_strategy()) {
        let back = inverse_ft(&forward_ft(&f), f.grid()).unwrap();
        let num: f64 = f.values().iter().zip(back.values()).map(|(a, b)| (a - b).norm_sqr()).sum();
        let den: f64 = f.values().iter().map(|v| v.norm_sqr()).sum::<f64>().max(1e-30);
        prop_assert!((num / den).sqrt() <= 1e-12);
    }

    #[test]
    fn circular_shift_modulates_spectrum(f in signal_strategy(), m in 1usize..32) {
        let n = f.grid().n();
        let shifted: Vec<Complex64> = (0..n).map(|k| f.values()[(k + n - m) % n]).collect();
        let fs = SampledSignal::new(f.grid().clone(), shifted).unwrap();
        let a = forward_ft(&f);
        let b = forward_ft(&fs);
        let scale = a.max_abs().max(1e-30);
        for (i, (va, vb)) in a.values().iter().zip(b.values()).enumerate() {
            let w = a.grid().frequency(i);
            let phase = Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * w * m as f64 * f.grid().dx());
            prop_assert!((va * phase - vb).norm() <= 1e-10 * scale);
        }
    }

    #[test]
    fn dilation_group_law(s1 in 0.25f64..4.0, s2 in 0.25f64..4.0, x in -4.0f64..4.0) {
        let psi = WaveletSpec::mexican_hat();
        let once = dilate_translate(&psi, s1, 0.0).unwrap();
        let composed = DilatedWavelet::new(once.base().clone(), s1 * s2, 0.0).unwrap();
        let direct = dilate_translate(&psi, s1 * s2, 0.0).unwrap();
        prop_assert!((composed.eval_time(x) - direct.eval_time(x)).norm() <= 1e-12);
    }

    #[test]
    fn plancherel_scales_quadratically(alpha in 0.1f64..4.0) {
        let grid = UniformGrid::centered(8.0, 256).unwrap();
        let f = SampledSignal::from_fn(grid.clone(), |x| (-x * x).exp() * (4.0 * x).cos()).unwrap();
        let f2 = SampledSignal::new(grid, f.values().iter().map(|v| v * alpha).collect()).unwrap();
        let psi = WaveletSpec::mexican_hat();
        let scales = ScaleGrid::geometric_pow2(1, 4, -8, 8).unwrap();
        let e1 = plancherel_energy(&cwt(&f, &psi, &scales).unwrap()).unwrap();
        let e2 = plancherel_energy(&cwt(&f2, &psi, &scales).unwrap()).unwrap();
        prop_assert!((e2 - alpha * alpha * e1).abs() <= 1e-10 * e1.max(1e-30));
    }
}
