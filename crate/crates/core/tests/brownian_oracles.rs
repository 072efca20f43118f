use histories_core::brownian_diffusion::*;
use histories_oracles::moments::brownian_moments;
use proptest::prelude::*;

fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| (lo.ln() + (hi / lo).ln() * i as f64 / (n - 1) as f64).exp()).collect()
}

fn as_array(s: &OneParticleGaussian<f64>) -> [f64; 5] {
    [s.q, s.p, s.sqq, s.sqp, s.spp]
}

#[test]
fn closed_form_matches_integrated_flow() {
    let s = OneParticleGaussian::new(0.4, 1.3, 0.7, -0.2, 0.9).unwrap();
    for d_qq in [0.0, 0.15] {
        let p = BrownianParams::new(1.7, 0.8, 0.6).with_position_diffusion(d_qq);
        for t in log_grid(0.05, 50.0, 7) {
            let got = as_array(&evolve_moments(&s, &p, t).unwrap());
            let want = brownian_moments(as_array(&s), 1.7, 0.8, 0.6, d_qq, t);
            for (g, w) in got.iter().zip(want) {
                assert!((g - w).abs() <= 1e-10 * w.abs().max(1.0), "t {t}: {g} vs {w}");
            }
        }
    }
}

#[test]
fn tiny_times_use_the_series_without_loss() {
    let s = OneParticleGaussian::new(0.0, 2.0, 1.0, 0.3, 0.5).unwrap();
    let p = BrownianParams::new(1.0, 1.0, 1.0);
    for t in [1e-9, 1e-6, 5e-5, 9.9e-5, 1.01e-4, 1e-3] {
        let got = as_array(&evolve_moments(&s, &p, t).unwrap());
        let want = brownian_moments(as_array(&s), 1.0, 1.0, 1.0, 0.0, t);
        for (g, w) in got.iter().zip(want) {
            assert!((g - w).abs() <= 1e-12 * w.abs().max(1.0), "t {t}: {g} vs {w}");
        }
    }
}

#[test]
fn fitted_diffusion_constant_matches_closed_form() {
    let s = OneParticleGaussian::new(0.0, 0.0, 1.0, 0.0, 1.0).unwrap();
    for (m, g, dpp) in [(1.0, 1.0, 1.0), (2.0, 0.5, 3.0), (0.5, 4.0, 0.2)] {
        let p = BrownianParams::new(m, g, dpp);
        let fit = diffusion_constant_fit(&s, &p, &grid(10.0 / g, 100.0 / g, 46)).unwrap();
        let d = dpp / (m * m * g * g);
        assert!(!fit.short_grid);
        assert!((fit.d_fit - d).abs() / d < 0.02, "{} vs {d}", fit.d_fit);
        assert!(fit.residual < 0.01, "{}", fit.residual);
    }
}

#[test]
fn doubling_momentum_diffusion_doubles_d() {
    let s = OneParticleGaussian::new(0.0, 0.0, 1.0, 0.0, 1.0).unwrap();
    let t = grid(10.0, 100.0, 46);
    let a = diffusion_constant_fit(&s, &BrownianParams::new(1.0, 1.0, 1.0), &t).unwrap();
    let b = diffusion_constant_fit(&s, &BrownianParams::new(1.0, 1.0, 2.0), &t).unwrap();
    assert!((b.d_fit / a.d_fit - 2.0).abs() < 0.01, "{}", b.d_fit / a.d_fit);
}

#[test]
fn long_time_slope_approaches_two_d() {
    let s = OneParticleGaussian::new(0.0, 1.0, 1.0, 0.0, 2.0).unwrap();
    let p = BrownianParams::new(1.3, 0.9, 0.7);
    let d = p.diffusion_constant();
    for t in [10.0 / 0.9, 30.0 / 0.9, 100.0 / 0.9] {
        let h: f64 = 1e-3;
        let up = evolve_moments(&s, &p, t + h).unwrap().sqq;
        let dn = evolve_moments(&s, &p, t - h).unwrap().sqq;
        let slope = (up - dn) / (2.0 * h);
        assert!((slope - 2.0 * d).abs() / (2.0 * d) < 0.01, "t {t}: {slope}");
    }
}

fn diffusion_setup() -> (OneParticleGaussian<f64>, BrownianParams<f64>) {
    let p = BrownianParams::new(1.0, 1.0, 1.0);
    // stationary momentum spread, drifting mean
    (OneParticleGaussian::new(0.0, 1.0, 1.0, 0.0, 1.0).unwrap(), p)
}

fn x_grid(s: &OneParticleGaussian<f64>, p: &BrownianParams<f64>, t_max: f64) -> Vec<f64> {
    let end = evolve_moments(s, p, t_max).unwrap();
    let half = 8.0 * end.sqq.sqrt() + end.q.abs() + 2.0;
    let start = evolve_moments(s, p, 0.05).unwrap().sqq.sqrt();
    let n = ((2.0 * half) / (0.05 * start)).ceil() as usize + 1;
    grid(-half, half, n)
}

#[test]
fn density_obeys_diffusion_late() {
    let (s, p) = diffusion_setup();
    let d = p.diffusion_constant();
    let ts = log_grid(0.1, 50.0, 16);
    let xs = x_grid(&s, &p, 50.0);
    let r = product_density_check(&s, &p, 10, d, &xs, &ts).unwrap();
    for row in &r.rows {
        if row.t >= 10.0 {
            assert!(row.residual < 0.05, "t {}: {}", row.t, row.residual);
        }
    }
    assert!(r.is_monotone_decreasing(), "{:?}", r.rows.iter().map(|r| r.residual).collect::<Vec<_>>());
}

#[test]
fn ballistic_start_is_not_diffusive() {
    let (s, p) = diffusion_setup();
    let xs = x_grid(&s, &p, 0.05);
    let r = product_density_check(&s, &p, 1, p.diffusion_constant(), &xs, &[0.01, 0.02]).unwrap();
    for row in &r.rows {
        assert!(row.residual > 0.5, "t {}: {}", row.t, row.residual);
    }
}

#[test]
fn residual_is_independent_of_particle_number() {
    let (s, p) = diffusion_setup();
    let xs = x_grid(&s, &p, 20.0);
    let ts = [0.5, 2.0, 20.0];
    let a = product_density_check(&s, &p, 1, 1.0, &xs, &ts).unwrap();
    let b = product_density_check(&s, &p, 100, 1.0, &xs, &ts).unwrap();
    for (x, y) in a.rows.iter().zip(&b.rows) {
        assert_eq!(x.residual, y.residual);
    }
}

#[test]
fn single_precision_follows_double() {
    let s32 = OneParticleGaussian::<f32>::new(0.2, 0.5, 1.0, 0.1, 0.8).unwrap();
    let s64 = OneParticleGaussian::<f64>::new(0.2, 0.5, 1.0, 0.1, 0.8).unwrap();
    let p32 = BrownianParams::<f32>::new(1.0, 0.5, 0.3);
    let p64 = BrownianParams::<f64>::new(1.0, 0.5, 0.3);
    for t in [1e-5, 0.3, 4.0, 60.0] {
        let a = evolve_moments(&s32, &p32, t as f32).unwrap();
        let b = evolve_moments(&s64, &p64, t).unwrap();
        assert!(((a.sqq as f64) - b.sqq).abs() / b.sqq < 1e-5, "t {t}");
        assert!(((a.spp as f64) - b.spp).abs() / b.spp < 1e-5, "t {t}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn covariance_stays_positive(
        m in 0.1f64..5.0, g in 0.05f64..5.0, dpp in 0.01f64..5.0, dqq in 0.0f64..1.0,
        sqq in 0.01f64..4.0, spp in 0.01f64..4.0, corr in -0.99f64..0.99, t in 0.0f64..200.0,
    ) {
        let s = OneParticleGaussian::new(0.0, 0.0, sqq, corr * (sqq * spp).sqrt(), spp).unwrap();
        let p = BrownianParams::new(m, g, dpp).with_position_diffusion(dqq);
        let e = evolve_moments(&s, &p, t).unwrap();
        prop_assert!(e.sqq >= 0.0 && e.spp >= 0.0);
        prop_assert!(e.sqq * e.spp - e.sqp * e.sqp >= -1e-12 * e.sqq * e.spp);
    }

    #[test]
    fn evolution_is_a_semigroup(t1 in 0.0f64..20.0, t2 in 0.0f64..20.0, g in 0.1f64..3.0) {
        let s = OneParticleGaussian::new(0.3, -0.7, 0.5, 0.05, 1.2).unwrap();
        let p = BrownianParams::new(1.1, g, 0.8);
        let a = evolve_moments(&evolve_moments(&s, &p, t1).unwrap(), &p, t2).unwrap();
        let b = evolve_moments(&s, &p, t1 + t2).unwrap();
        for (x, y) in as_array(&a).iter().zip(as_array(&b)) {
            prop_assert!((x - y).abs() <= 1e-12 * y.abs().max(1.0));
        }
    }
}
