//! One function per experiment kind. Each returns report rows and the bytes
//! of its CSV artifacts; nothing touches the filesystem here.

use crate::config::*;
use crate::criteria;
use crate::report::Row;
use histories_core::brownian_diffusion as bd;
use histories_core::exact_hilbert as eh;
use histories_core::gaussian_chain as gc;
use histories_core::phase_space_mc as ps;
use histories_core::rng::{stream_rng, streams};
use histories_core::scalar::Complex;
use histories_core::stats::fit_line;
use rand::Rng;
use std::fmt::Write as _;

pub type EngineError = Box<dyn std::error::Error + Send + Sync>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Artifact {
    pub name: String,
    pub bytes: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub rows: Vec<Row>,
    pub artifacts: Vec<Artifact>,
    pub notes: Vec<String>,
}

fn csv(name: &str, write: impl FnOnce(&mut Vec<u8>) -> std::io::Result<()>) -> Result<Artifact, EngineError> {
    let mut bytes = Vec::new();
    write(&mut bytes)?;
    Ok(Artifact { name: name.into(), bytes })
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

fn logspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| (lo.ln() + (hi / lo).ln() * i as f64 / (n - 1) as f64).exp()).collect()
}

pub fn run(cfg: &ResolvedConfig) -> Result<Outcome, EngineError> {
    let seed = cfg.seed_or_zero();
    match &cfg.params {
        Params::ConservedDecoherence(p) => conserved_decoherence(p, seed),
        Params::CoarseKScan(p) => coarse_k_scan(p),
        Params::PeakingVsN(p) => peaking_vs_n(p, seed),
        Params::GaussianKScan(p) => gaussian_k_scan(p),
        Params::VarianceScaling(p) => variance_scaling(p),
        Params::DiffusionEmergence(p) => diffusion_emergence(p),
    }
}

/// `(|a> + |b>)/sqrt 2` with `a`, `b` drawn from the lowest and highest
/// sectors of the total translation cosine, histories in that family.
pub fn conserved_decoherence(p: &ConservedDecoherenceParams, seed: u64) -> Result<Outcome, EngineError> {
    let spec = p.lattice.spec();
    let q = eh::translation_cosine(&spec);
    let family = eh::spectral_projectors(&q, &eh::edges_per_eigenvalue(&q))?;
    let occupied: Vec<usize> = (0..family.len()).filter(|&b| family.ranks[b] > 0).collect();
    if occupied.len() < 2 {
        return Err("the translation cosine has a single eigenvalue on this lattice".into());
    }
    let dim = spec.dimension();
    let mut rng = stream_rng(seed, streams::RANDOM_INSTANCE);
    let reference = eh::StateVector::<f64>::from_fn(dim, |_, _| {
        Complex::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
    });
    let a = eh::PureState::normalized(&family.projectors[occupied[0]] * &reference)?;
    let b = eh::PureState::normalized(&family.projectors[*occupied.last().unwrap()] * &reference)?;
    let schedule = eh::HistorySchedule::repeated(p.times.clone(), family)?;
    let exp = eh::conserved_superposition_experiment(&spec, &q, &a, &b, &schedule)?;
    let total = exp.matrix.trace();
    let rows = vec![
        Row::absolute("epsilon_off_diagonal", 1, exp.epsilon.epsilon, 0.0, criteria::EXACT_DECOHERENCE),
        Row::absolute("probability_total", 3, total, 1.0, criteria::PROBABILITY_TOTAL),
    ];
    let notes = vec![
        format!("eigenvalues a = {:e}, b = {:e}", exp.eigenvalue_a, exp.eigenvalue_b),
        format!("max |[Q, H]| = {:e}", exp.commutator_norm),
        format!("{} history strings", exp.matrix.len()),
    ];
    let artifact = csv("conserved_decoherence.csv", |w| exp.matrix.write_csv(w))?;
    Ok(Outcome { rows, artifacts: vec![artifact], notes })
}

/// Decoherence of `Re n(k)` histories for a product wavepacket across `k`.
pub fn coarse_k_scan(p: &CoarseKScanParams) -> Result<Outcome, EngineError> {
    let spec = p.lattice.spec();
    let h = eh::build_hamiltonian(&spec)?;
    let prop = eh::Propagator::new(&h, spec.hbar)?;
    let d = spec.num_sites;
    let wp = &p.wavepacket;
    let one: Vec<Complex<f64>> = (0..d)
        .map(|s| {
            let x = s as f64 - wp.center;
            Complex::from_polar((-x * x / (4.0 * wp.width * wp.width)).exp(), wp.momentum * s as f64)
        })
        .collect();
    let psi = eh::PureState::product(&one, spec.num_particles)?;
    let modes: Vec<i64> = if p.modes.is_empty() { (0..=(d / 2) as i64).collect() } else { p.modes.clone() };

    let mut table = String::from("mode,k,bins,strings,epsilon,probability_total,max_cell_residual,mean,variance,ratio\n");
    let mut eps_at_zero = None;
    let mut worst_total = 0.0f64;
    let mut worst_excess = 0.0f64;
    for &mode in &modes {
        let dspec = eh::DensityOperatorSpec::fourier_mode(&spec, mode);
        let k = eh::lattice_wavenumber(&spec, mode);
        let op = eh::build_density_operator(&spec, &dspec)?;
        let re = op.primary();
        let family = eh::spectral_projectors(re, &eh::uniform_edges(re, p.bin_width))?;
        let bins = family.ranks.iter().filter(|&&r| r > 0).count();
        let schedule = eh::HistorySchedule::repeated(p.times.clone(), family)?;
        let dm = eh::decoherence_functional(&psi, &schedule, &prop)?;
        let eps = eh::epsilon_decoherence(&dm).epsilon;
        let sums = eh::probability_sum_check(&dm, &eh::coarse_grain_partition(&dm.labels, &[0]))?;
        let total_dev = (sums.total_probability - 1.0).abs();
        worst_total = worst_total.max(total_dev);
        for c in &sums.cells {
            worst_excess = worst_excess.max(c.residual - c.interference_bound);
        }
        if mode == 0 {
            eps_at_zero = Some(eps);
        }
        let (mean, var) = eh::moments(&psi, re)?;
        let ratio = if mean.abs() > 1e-12 { var / (mean * mean) } else { f64::NAN };
        writeln!(
            table,
            "{mode},{k:e},{bins},{},{eps:e},{:e},{:e},{mean:e},{var:e},{ratio:e}",
            dm.len(),
            sums.total_probability,
            sums.max_residual()
        )?;
    }
    let mut rows = Vec::new();
    let mut notes = Vec::new();
    match eps_at_zero {
        Some(e) => rows.push(Row::absolute("epsilon_at_k0", 1, e, 0.0, criteria::EXACT_DECOHERENCE)),
        None => notes.push("mode 0 not scanned; no exact-conservation row".into()),
    }
    rows.push(Row::absolute("max_probability_total_deviation", 3, worst_total, 0.0, criteria::PROBABILITY_TOTAL));
    rows.push(Row::absolute(
        "coarse_grain_residual_above_bound",
        3,
        worst_excess.max(0.0),
        0.0,
        criteria::COARSE_GRAIN_SLACK,
    ));
    let artifact = Artifact { name: "coarse_k_scan.csv".into(), bytes: table.into_bytes() };
    Ok(Outcome { rows, artifacts: vec![artifact], notes })
}

pub fn peaking_vs_n(p: &PeakingParams, seed: u64) -> Result<Outcome, EngineError> {
    let p1 = ps::OneParticleDistribution::uniform(p.dim, p.box_len)?;
    let window = ps::WindowRegion::new(p.window_lo.clone(), p.window_side.clone(), p.box_len)?;
    let f = window.volume() / p1.volume();
    let cfg = ps::ScanConfig::Particles {
        p1,
        pair: None,
        window,
        ns: p.particle_numbers.clone(),
        n_samples: p.samples,
        seed,
        sampler: ps::SamplerOptions::default(),
    };
    let r = ps::scaling_scan(&cfg)?;
    let rows = vec![Row::absolute("log_log_slope_vs_N", 4, r.fit.slope, -1.0, criteria::PEAKING_SLOPE)];
    let mut notes = vec![
        format!("slope standard error {:e}", r.fit.slope_err),
        format!("prefactor {:e}, binomial (1 - f)/f = {:e}", r.prefactor, (1.0 - f) / f),
    ];
    if !r.unconverged_points.is_empty() {
        notes.push(format!("unconverged at N = {:?}", r.unconverged_points));
    }
    let artifact = csv("peaking_vs_N.csv", |w| r.write_csv(w))?;
    Ok(Outcome { rows, artifacts: vec![artifact], notes })
}

pub fn gaussian_k_scan(p: &GaussianKScanParams) -> Result<Outcome, EngineError> {
    let chain = |w0: f64| {
        gc::ChainSpec::uniform(p.num_modes, p.mass, w0, p.coupling, p.spacing).with_boundary(p.boundary.into())
    };
    let spec = chain(p.omega0);
    let mut state = gc::GaussianState::ground_state(&spec)?;
    if p.time > 0.0 {
        state = gc::evolve_gaussian(&state, &chain(p.quench_omega0.unwrap_or(p.omega0)), p.time)?;
    }
    let ks = linspace(0.0, p.k_max, p.k_points);
    let scan = gc::k_scan(&state, &ks);
    let zero_var = scan[0].moments.variance;

    let sigma = (0..p.num_modes).map(|j| state.sigma_q(j, j)).fold(0.0f64, f64::max).sqrt();
    let at_tiny = gc::small_k_ratio(&state, 1e-4 / sigma)?;
    let small_ks = logspace(1e-3 / sigma, 1e-1 / sigma, 9);
    let mut small = String::from("k,k_sigma,ratio\n");
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &k in &small_ks {
        let r = gc::small_k_ratio(&state, k)?;
        writeln!(small, "{k:e},{:e},{r:e}", k * sigma)?;
        xs.push(k.ln());
        ys.push((r - 1.0).abs().ln());
    }
    let fit = fit_line(&xs, &ys);
    let rows = vec![
        Row::absolute("variance_at_k0", 6, zero_var, 0.0, 0.0),
        Row::absolute("small_k_deviation_slope", 7, fit.slope, 2.0, criteria::SMALL_K_SLOPE),
        Row::absolute("small_k_ratio_at_k_sigma_1e-4", 7, at_tiny, 1.0, criteria::SMALL_K_RATIO),
    ];
    let notes = vec![format!("sigma_q = {sigma:e}")];
    let artifacts = vec![
        csv("gaussian_k_scan.csv", |w| gc::write_scan_csv(&scan, w))?,
        Artifact { name: "gaussian_k_scan_small_k.csv".into(), bytes: small.into_bytes() },
    ];
    Ok(Outcome { rows, artifacts, notes })
}

pub fn variance_scaling(p: &VarianceScalingParams) -> Result<Outcome, EngineError> {
    let l = p.kernel.length;
    let unit = l.powi(p.dim as i32);
    let volumes: Vec<f64> = logspace(p.v_min, p.v_max, p.points).into_iter().map(|v| v * unit).collect();
    let side_max = volumes.last().unwrap().powf(1.0 / p.dim as f64);
    let box_len = p.box_len.unwrap_or(2.0 * side_max + 4.0 * l);
    let p1 = ps::OneParticleDistribution::uniform(p.dim, box_len)?;
    let opts = ps::QuadratureOptions::default();

    let mut uncorrelated = 0.0f64;
    for &v in &volumes {
        let w = ps::WindowRegion::cube(p.dim, v, box_len)?;
        uncorrelated = uncorrelated.max(ps::variance_ratio_quadrature(&p1, None, &w, &opts)?.ratio.abs());
    }
    let mut rows = Vec::new();
    let mut notes = Vec::new();
    let artifact;
    match p.kernel.model() {
        Some(kernel) => {
            let r = ps::scaling_scan(&ps::ScanConfig::Volumes {
                p1: p1.clone(),
                pair: Some(kernel),
                volumes: volumes.clone(),
                quadrature: opts.clone(),
            })?;
            rows.push(Row::absolute("log_log_slope_vs_V", 5, r.fit.slope, -1.0, criteria::VOLUME_SLOPE));
            if p.kernel.shape == KernelChoice::Constant {
                let analytic = kernel.ball_integral(p.dim);
                rows.push(Row::relative("constant_kernel_prefactor", 5, r.prefactor, analytic, criteria::PREFACTOR_RELATIVE));
            } else {
                notes.push(format!("prefactor {:e}, kernel integral {:e}", r.prefactor, kernel.ball_integral(p.dim)));
            }
            for (v, flag) in &r.quadrature_flags {
                notes.push(format!("V = {v:e}: {flag:?}"));
            }
            artifact = csv("variance_scaling.csv", |w| r.write_csv(w))?;
        }
        None => {
            let mut t = String::from("V,ratio,error\n");
            for &v in &volumes {
                let w = ps::WindowRegion::cube(p.dim, v, box_len)?;
                writeln!(t, "{v:e},{:e},{:e}", ps::variance_ratio_quadrature(&p1, None, &w, &opts)?.ratio, 0.0)?;
            }
            artifact = Artifact { name: "variance_scaling.csv".into(), bytes: t.into_bytes() };
        }
    }
    rows.push(Row::absolute("uncorrelated_ratio", 5, uncorrelated, 0.0, criteria::UNCORRELATED_RATIO));
    Ok(Outcome { rows, artifacts: vec![artifact], notes })
}

pub fn diffusion_emergence(p: &DiffusionParams) -> Result<Outcome, EngineError> {
    let params = bd::BrownianParams::new(p.mass, p.gamma, p.d_pp).with_position_diffusion(p.d_qq);
    let initial =
        bd::OneParticleGaussian::new(p.q0, p.p0, p.sigma_qq0, p.sigma_qp0, p.sigma_pp0.unwrap_or(p.d_pp / p.gamma))?;
    let g = p.gamma;
    let fit_grid = linspace(p.fit_from / g, p.fit_to / g, p.fit_points);
    let fit = bd::diffusion_constant_fit(&initial, &params, &fit_grid)?;
    let d = params.diffusion_constant();

    let ts = logspace(p.check_from / g, p.check_to / g, p.check_points);
    let mut narrowest = f64::INFINITY;
    for &t in &ts {
        narrowest = narrowest.min(bd::evolve_moments(&initial, &params, t)?.sqq);
    }
    let end = bd::evolve_moments(&initial, &params, *ts.last().unwrap())?;
    let half = 8.0 * end.sqq.sqrt() + (end.q - initial.q).abs() + 8.0 * initial.sqq.sqrt();
    let dx = 0.05 * narrowest.sqrt();
    let n = (2.0 * half / dx).ceil() as usize + 1;
    if n > 2_000_000 {
        return Err(format!("x grid would need {n} points; narrow the time range").into());
    }
    let xs = linspace(initial.q - half, initial.q + half, n);
    let report = bd::product_density_check(&initial, &params, p.num_particles, fit.d_fit, &xs, &ts)?;

    let late = report.rows.iter().filter(|r| r.t * g >= 10.0 - 1e-9).map(|r| r.residual).fold(f64::NAN, f64::max);
    let violations = report.rows.windows(2).filter(|w| !(w[1].residual < w[0].residual)).count();
    let rows = vec![
        Row::relative("fitted_diffusion_constant", 8, fit.d_fit, d, criteria::DIFFUSION_CONSTANT_RELATIVE),
        Row::absolute("late_time_residual", 8, late, 0.0, criteria::DIFFUSION_RESIDUAL),
        Row::absolute("residual_monotonicity_violations", 8, violations as f64, 0.0, 0.0),
    ];
    let mut notes = vec![format!("linear fit residual {:e} of the fitted range", fit.residual)];
    if fit.short_grid {
        notes.push("fit grid does not span 10/gamma to 100/gamma".into());
    }
    let artifact = csv("diffusion_emergence.csv", |w| report.write_csv(w))?;
    Ok(Outcome { rows, artifacts: vec![artifact], notes })
}
