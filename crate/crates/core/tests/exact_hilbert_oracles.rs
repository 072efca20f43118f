use histories_core::exact_hilbert::*;
use histories_core::scalar::Complex;
use histories_oracles::{chain, lattice as olat, max_abs, sampling, CMat, CVec, C64};
use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Instance {
    spec: LatticeSpec<f64>,
    psi: DVector<Complex<f64>>,
    times: Vec<f64>,
    families: Vec<ProjectorFamily<f64>>,
    /// Oracle projectors built by basis enumeration where possible.
    oracle_families: Vec<Vec<CMat>>,
}

fn random_instance(rng: &mut ChaCha8Rng) -> Instance {
    let (n, d) = loop {
        let n: usize = rng.random_range(1..=4);
        let d: usize = rng.random_range(2..=9);
        if d.pow(n as u32) <= 81 && d.pow(n as u32) >= 4 {
            break (n, d);
        }
    };
    let boundary = if rng.random_bool(0.5) { Boundary::Periodic } else { Boundary::Open };
    let half: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
    let table: Vec<f64> = (0..d)
        .map(|r| match boundary {
            Boundary::Periodic => half[r.min(d - r)],
            Boundary::Open => half[r],
        })
        .collect();
    let spec = LatticeSpec::new(n, d, 1.0, 1.0)
        .with_hopping(rng.random_range(0.2..1.5))
        .with_hbar(rng.random_range(0.5..2.0))
        .with_boundary(boundary)
        .with_pair_potential(table);
    let dim = spec.dimension();
    let psi = DVector::from_fn(dim, |_, _| Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    let psi = psi.normalize();

    let steps = rng.random_range(1..=3);
    let mut t = 0.0;
    let mut times = Vec::new();
    let mut families = Vec::new();
    let mut oracle_families = Vec::new();
    for _ in 0..steps {
        t += rng.random_range(0.1..1.5);
        times.push(t);
        let len = rng.random_range(1..d);
        let start = if boundary == Boundary::Periodic { rng.random_range(0..d) } else { rng.random_range(0..=d - len) };
        let window = SiteWindow::run(start, len, d, boundary).unwrap();
        let sites = window.sites().to_vec();
        let kind = rng.random_range(0..3);
        let dspec = match kind {
            0 => DensityOperatorSpec::number(window),
            1 => DensityOperatorSpec::momentum(window),
            _ => DensityOperatorSpec::energy(window),
        };
        let op = build_density_operator(&spec, &dspec).unwrap();
        let op = op.primary();
        let edges = if kind == 0 {
            edges_per_eigenvalue(op)
        } else {
            let e = edges_per_eigenvalue(op);
            let spread = e[e.len() - 1] - e[0];
            uniform_edges(op, spread / rng.random_range(2.0..4.5))
        };
        let fam = spectral_projectors(op, &edges).unwrap();
        if kind == 0 {
            oracle_families.push(number_projectors(n, d, &sites));
        } else {
            oracle_families.push(fam.projectors.clone());
        }
        families.push(fam);
    }
    Instance { spec, psi, times, families, oracle_families }
}

/// Projectors onto basis states with exactly `k` particles in `sites`, for
/// every `k` that occurs.
fn number_projectors(n: usize, d: usize, sites: &[usize]) -> Vec<CMat> {
    let dim = d.pow(n as u32);
    let mut out = Vec::new();
    for k in 0..=n {
        let mut p = CMat::zeros(dim, dim);
        let mut any = false;
        for idx in 0..dim {
            let mut rest = idx;
            let mut inside = 0;
            for _ in 0..n {
                if sites.contains(&(rest % d)) {
                    inside += 1;
                }
                rest /= d;
            }
            if inside == k {
                p[(idx, idx)] = C64::new(1.0, 0.0);
                any = true;
            }
        }
        if any {
            out.push(p);
        }
    }
    out
}

fn oracle_hamiltonian(spec: &LatticeSpec<f64>) -> CMat {
    olat::tight_binding_hamiltonian(
        spec.num_particles,
        spec.num_sites,
        spec.hopping,
        spec.boundary == Boundary::Periodic,
        |a, b| spec.pair_energy(a, b),
    )
}

#[test]
fn hamiltonian_matches_kronecker_construction() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let inst = random_instance(&mut rng);
        let h = build_hamiltonian(&inst.spec).unwrap();
        let o = oracle_hamiltonian(&inst.spec);
        assert!(max_abs(&(h - o)) < 1e-12);
    }
}

#[test]
fn decoherence_functional_matches_operator_chains() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for case in 0..24 {
        let inst = random_instance(&mut rng);
        let h = build_hamiltonian(&inst.spec).unwrap();
        let prop = Propagator::new(&h, inst.spec.hbar).unwrap();
        let schedule = HistorySchedule::new(inst.times.clone(), inst.families.clone()).unwrap();
        let d = decoherence_functional(&PureState::new(inst.psi.clone()).unwrap(), &schedule, &prop).unwrap();

        let o_h = oracle_hamiltonian(&inst.spec) / C64::new(inst.spec.hbar, 0.0);
        let psi: CVec = inst.psi.clone();
        let o = chain::decoherence_matrix(&psi, &o_h, &inst.times, &inst.oracle_families);
        assert_eq!(o.nrows(), d.len(), "case {case}: history count");
        let err = max_abs(&(d.entries.clone() - o));
        assert!(err < 1e-11, "case {case}: max entry error {err:e}");
    }
}

#[test]
fn probability_sum_rules_hold() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for case in 0..24 {
        let inst = random_instance(&mut rng);
        let h = build_hamiltonian(&inst.spec).unwrap();
        let prop = Propagator::new(&h, inst.spec.hbar).unwrap();
        let schedule = HistorySchedule::new(inst.times.clone(), inst.families.clone()).unwrap();
        let d = decoherence_functional(&PureState::new(inst.psi.clone()).unwrap(), &schedule, &prop).unwrap();
        let total: f64 = d.probabilities().iter().sum();
        assert!((total - 1.0).abs() < 1e-10, "case {case}: total {total}");

        let o_h = oracle_hamiltonian(&inst.spec) / C64::new(inst.spec.hbar, 0.0);
        let keep: Vec<usize> = (0..inst.times.len()).step_by(2).collect();
        let partition = coarse_grain_partition(&d.labels, &keep);
        let report = probability_sum_check(&d, &partition).unwrap();
        for (cell, rule) in partition.iter().zip(&report.cells) {
            assert!(rule.within_bound(1e-12), "case {case}: {rule:?}");
            let labels: Vec<Vec<usize>> = cell.iter().map(|&i| d.labels[i].clone()).collect();
            let p = chain::cell_probability(&inst.psi, &o_h, &inst.times, &inst.oracle_families, &labels);
            assert!((p - rule.p_cell).abs() < 1e-11, "case {case}: cell probability {p} vs {}", rule.p_cell);
        }
    }
}

#[test]
fn projector_ranks_match_basis_enumeration() {
    let spec = LatticeSpec::new(2, 4, 1.0, 1.0);
    let window = SiteWindow::run(0, 2, 4, Boundary::Periodic).unwrap();
    let op = build_density_operator(&spec, &DensityOperatorSpec::number(window)).unwrap();
    let fam = spectral_projectors(op.primary(), &edges_per_eigenvalue(op.primary())).unwrap();
    assert_eq!(fam.ranks, vec![4, 8, 4]);
    assert_eq!(fam.ranks, olat::occupation_histogram(2, 4, &[0, 1]));

    for (n, d, w) in [(3usize, 3usize, vec![1usize]), (2, 6, vec![2, 3, 4]), (4, 3, vec![0, 1])] {
        let spec = LatticeSpec::new(n, d, 1.0, 1.0);
        let window = SiteWindow::new(w.clone(), d, Boundary::Periodic).unwrap();
        let op = build_density_operator(&spec, &DensityOperatorSpec::number(window)).unwrap();
        let fam = spectral_projectors(op.primary(), &edges_per_eigenvalue(op.primary())).unwrap();
        assert_eq!(fam.ranks, olat::occupation_histogram(n, d, &w));
    }
}

#[test]
fn spectrum_matches_oracle_eigenvalues() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..5 {
        let inst = random_instance(&mut rng);
        let h = build_hamiltonian(&inst.spec).unwrap();
        let prop = Propagator::new(&h, inst.spec.hbar).unwrap();
        let o = olat::eigenvalues(&oracle_hamiltonian(&inst.spec));
        for (a, b) in prop.energies().iter().zip(&o) {
            assert!((a - b).abs() < 1e-10);
        }
    }
}

fn uniform_product_ratio(n: usize, d: usize, w: usize) -> f64 {
    let spec = LatticeSpec::new(n, d, 1.0, 1.0);
    let amp = vec![Complex::new(1.0, 0.0); d];
    let state = PureState::product_on(&spec, &amp).unwrap();
    let window = SiteWindow::run(0, w, d, Boundary::Periodic).unwrap();
    let diag = number_density_diagonal(&spec, &window).unwrap();
    peaking_ratio_diagonal(&state, &diag).unwrap().ratio
}

#[test]
fn product_state_peaking_matches_sampling() {
    for (n, d, w) in [(2usize, 6usize, 2usize), (4, 4, 1), (6, 4, 2), (8, 3, 1)] {
        let exact = uniform_product_ratio(n, d, w);
        let f = w as f64 / d as f64;
        let counts = sampling::uniform_window_counts(n, f, 200_000, 99 + n as u64);
        let (mean, _) = sampling::mean_and_error(&counts);
        let var = counts.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (counts.len() as f64 - 1.0);
        let mc = var / (mean * mean);
        assert!((mc - exact).abs() / exact < 0.05, "n={n}: mc {mc} exact {exact}");
    }
}

#[test]
fn product_state_peaking_decreases_with_n() {
    let ratios: Vec<f64> = (1..=8).map(|n| uniform_product_ratio(n, 3, 1)).collect();
    for w in ratios.windows(2) {
        assert!(w[1] < w[0]);
    }
}

#[test]
fn conserved_translation_gives_exact_decoherence() {
    let spec = LatticeSpec::new(2, 6, 1.0, 1.0).with_pair_function(|r| if r == 0 { 0.7 } else if r == 1 || r == 5 { 0.3 } else { 0.0 });
    let q = translation_cosine(&spec);
    let fam = spectral_projectors(&q, &edges_per_eigenvalue(&q)).unwrap();
    let schedule = HistorySchedule::repeated(vec![0.4, 1.1, 2.3], fam.clone()).unwrap();
    // eigenvectors of Q from distinct sectors, via the oracle diagonalizer
    let dim = spec.dimension();
    let qm: CMat = q.clone();
    let eig = qm.symmetric_eigen();
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let first = order[0];
    let last = order[dim - 1];
    let a = PureState::normalized(eig.eigenvectors.column(first).into_owned()).unwrap();
    let b = PureState::normalized(eig.eigenvectors.column(last).into_owned()).unwrap();
    let exp = conserved_superposition_experiment(&spec, &q, &a, &b, &schedule).unwrap();
    assert!(exp.epsilon.epsilon < 1e-10, "{:?}", exp.epsilon);
    assert!((exp.eigenvalue_a - exp.eigenvalue_b).abs() > 0.5);
}
