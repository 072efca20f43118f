use super::distribution::OneParticleDistribution;
use super::error::{PhaseSpaceError, Result};
use super::kernel::PairCorrelationModel;
use crate::rng::{stream_rng, streams, StreamRng};
use crate::stats::integrated_autocorrelation;
use rand::Rng;
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplerOptions {
    /// Independent chains; their samples are concatenated in replica order.
    pub replicas: usize,
    pub burn_in_sweeps: usize,
    pub pilot_sweeps: usize,
    /// Autocorrelation time (in stored samples) above which the ensemble is
    /// flagged as not converged.
    pub max_tau: f64,
}

impl Default for SamplerOptions {
    fn default() -> Self {
        Self { replicas: 8, burn_in_sweeps: 200, pilot_sweeps: 2000, max_tau: 5.0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SamplerMeta {
    pub correlated: bool,
    pub acceptance_rate: f64,
    /// Integrated autocorrelation time of the pilot chain, in sweeps.
    pub tau_pilot: f64,
    /// Sweeps between stored configurations.
    pub thin: usize,
    /// Integrated autocorrelation time of the stored series, in samples.
    pub tau_stored: f64,
    pub effective_sample_size: f64,
    pub converged: bool,
}

/// `n_samples` configurations of `num_particles` particles, flattened as
/// `[sample][particle][axis]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelatedEnsemble {
    pub dim: usize,
    pub box_len: f64,
    pub num_particles: usize,
    pub n_samples: usize,
    pub seed: u64,
    pub samples: Vec<f64>,
    pub meta: SamplerMeta,
}

impl CorrelatedEnsemble {
    pub fn config(&self, s: usize) -> &[f64] {
        let w = self.num_particles * self.dim;
        &self.samples[s * w..(s + 1) * w]
    }
}

/// Periodic minimum-image distance.
#[inline]
pub fn periodic_distance(a: &[f64], b: &[f64], box_len: f64) -> f64 {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| {
            let d = (x - y).rem_euclid(box_len);
            let d = d.min(box_len - d);
            d * d
        })
        .sum::<f64>()
        .sqrt()
}

fn shares(total: usize, parts: usize) -> Vec<usize> {
    (0..parts).map(|r| total / parts + usize::from(r < total % parts)).collect()
}

/// Samples `N` particles from `prod_j p(q_j) prod_{j<l} (1 + c(|q_j - q_l|))`.
///
/// Without a kernel (or with an identically zero one) draws are i.i.d. from
/// `p`. Otherwise a Metropolis chain with independence proposals from `p`
/// updates one particle at a time; the stride between stored samples comes
/// from the autocorrelation time of a pilot run.
pub fn sample_ensemble(
    p1: &OneParticleDistribution,
    pair: Option<&PairCorrelationModel>,
    num_particles: usize,
    n_samples: usize,
    seed: u64,
    opts: &SamplerOptions,
) -> Result<CorrelatedEnsemble> {
    if num_particles < 2 {
        return Err(PhaseSpaceError::TooFewParticles(num_particles));
    }
    if n_samples < 100 {
        return Err(PhaseSpaceError::TooFewSamples(n_samples));
    }
    let replicas = opts.replicas.max(1);
    let width = num_particles * p1.dim;
    let pair = match pair {
        Some(k) => {
            k.validate(p1.box_len)?;
            if k.is_zero() {
                None
            } else {
                Some(k)
            }
        }
        None => None,
    };
    let Some(kernel) = pair else {
        let parts: Vec<Vec<f64>> = shares(n_samples, replicas)
            .into_par_iter()
            .enumerate()
            .map(|(r, count)| {
                let mut rng = stream_rng(seed, streams::ENSEMBLE + r as u64);
                let mut out = vec![0.0; count * width];
                for q in out.chunks_mut(p1.dim) {
                    p1.sample_into(&mut rng, q);
                }
                out
            })
            .collect();
        return Ok(CorrelatedEnsemble {
            dim: p1.dim,
            box_len: p1.box_len,
            num_particles,
            n_samples,
            seed,
            samples: parts.concat(),
            meta: SamplerMeta {
                correlated: false,
                acceptance_rate: 1.0,
                tau_pilot: 0.5,
                thin: 1,
                tau_stored: 0.5,
                effective_sample_size: n_samples as f64,
                converged: true,
            },
        });
    };

    // pilot run on its own stream fixes burn-in and thinning
    let mut pilot = Chain::new(p1, kernel, num_particles, stream_rng(seed, streams::ENSEMBLE + (1 << 31)));
    for _ in 0..opts.burn_in_sweeps {
        pilot.sweep();
    }
    let mut half = Vec::with_capacity(opts.pilot_sweeps);
    let mut close = Vec::with_capacity(opts.pilot_sweeps);
    for _ in 0..opts.pilot_sweeps {
        pilot.sweep();
        let (h, c) = pilot.observables();
        half.push(h);
        close.push(c);
    }
    let (t1, w1) = integrated_autocorrelation(&half);
    let (t2, w2) = integrated_autocorrelation(&close);
    let tau_pilot = t1.max(t2);
    let pilot_ok = w1 < opts.pilot_sweeps / 4 && w2 < opts.pilot_sweeps / 4;
    let thin = (2.0 * tau_pilot).ceil().max(1.0) as usize;
    let burn = opts.burn_in_sweeps.max((20.0 * tau_pilot).ceil() as usize);

    let parts: Vec<(Vec<f64>, Vec<f64>, Vec<f64>, u64, u64)> = shares(n_samples, replicas)
        .into_par_iter()
        .enumerate()
        .map(|(r, count)| {
            let mut chain = Chain::new(p1, kernel, num_particles, stream_rng(seed, streams::ENSEMBLE + r as u64));
            for _ in 0..burn {
                chain.sweep();
            }
            chain.accepted = 0;
            chain.proposed = 0;
            let mut out = Vec::with_capacity(count * width);
            let mut s_half = Vec::with_capacity(count);
            let mut s_close = Vec::with_capacity(count);
            for _ in 0..count {
                for _ in 0..thin {
                    chain.sweep();
                }
                out.extend_from_slice(&chain.q);
                let (h, c) = chain.observables();
                s_half.push(h);
                s_close.push(c);
            }
            (out, s_half, s_close, chain.accepted, chain.proposed)
        })
        .collect();

    let mut samples = Vec::with_capacity(n_samples * width);
    let mut tau_stored: f64 = 0.5;
    let (mut acc, mut prop) = (0u64, 0u64);
    for (out, h, c, a, p) in parts {
        samples.extend_from_slice(&out);
        if h.len() >= 16 {
            tau_stored = tau_stored.max(integrated_autocorrelation(&h).0).max(integrated_autocorrelation(&c).0);
        }
        acc += a;
        prop += p;
    }
    Ok(CorrelatedEnsemble {
        dim: p1.dim,
        box_len: p1.box_len,
        num_particles,
        n_samples,
        seed,
        samples,
        meta: SamplerMeta {
            correlated: true,
            acceptance_rate: if prop > 0 { acc as f64 / prop as f64 } else { 0.0 },
            tau_pilot,
            thin,
            tau_stored,
            effective_sample_size: n_samples as f64 / (2.0 * tau_stored),
            converged: pilot_ok && tau_stored < opts.max_tau,
        },
    })
}

struct Chain<'a> {
    p1: &'a OneParticleDistribution,
    kernel: &'a PairCorrelationModel,
    n: usize,
    q: Vec<f64>,
    rng: StreamRng,
    trial: Vec<f64>,
    accepted: u64,
    proposed: u64,
}

impl<'a> Chain<'a> {
    fn new(p1: &'a OneParticleDistribution, kernel: &'a PairCorrelationModel, n: usize, mut rng: StreamRng) -> Self {
        let mut q = vec![0.0; n * p1.dim];
        for x in q.chunks_mut(p1.dim) {
            p1.sample_into(&mut rng, x);
        }
        Self { p1, kernel, n, q, rng, trial: vec![0.0; p1.dim], accepted: 0, proposed: 0 }
    }

    fn pos(&self, j: usize) -> &[f64] {
        &self.q[j * self.p1.dim..(j + 1) * self.p1.dim]
    }

    /// One Metropolis update per particle, in order.
    fn sweep(&mut self) {
        let d = self.p1.dim;
        let b = self.p1.box_len;
        for j in 0..self.n {
            let mut trial = std::mem::take(&mut self.trial);
            self.p1.sample_into(&mut self.rng, &mut trial);
            let mut w_new = 1.0;
            let mut w_old = 1.0;
            for l in 0..self.n {
                if l == j {
                    continue;
                }
                let other = self.pos(l);
                w_new *= 1.0 + self.kernel.c(periodic_distance(&trial, other, b));
                w_old *= 1.0 + self.kernel.c(periodic_distance(self.pos(j), other, b));
            }
            self.proposed += 1;
            let accept = w_old <= 0.0 || self.rng.random::<f64>() * w_old < w_new;
            if accept {
                self.q[j * d..(j + 1) * d].copy_from_slice(&trial);
                self.accepted += 1;
            }
            self.trial = trial;
        }
    }

    /// Particles in the lower half along axis 0, and pairs closer than `L`.
    fn observables(&self) -> (f64, f64) {
        let b = self.p1.box_len;
        let half = (0..self.n).filter(|&j| self.pos(j)[0] < 0.5 * b).count() as f64;
        let mut close = 0usize;
        for j in 0..self.n {
            for l in j + 1..self.n {
                if periodic_distance(self.pos(j), self.pos(l), b) < self.kernel.length {
                    close += 1;
                }
            }
        }
        (half, close as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_kernel_matches_uncorrelated_stream() {
        let p = OneParticleDistribution::uniform(2, 4.0).unwrap();
        let opts = SamplerOptions::default();
        let a = sample_ensemble(&p, None, 5, 300, 9, &opts).unwrap();
        let zero = PairCorrelationModel::constant(1.0, 0.0);
        let b = sample_ensemble(&p, Some(&zero), 5, 300, 9, &opts).unwrap();
        assert_eq!(a.samples, b.samples);
    }

    #[test]
    fn samples_stay_in_box_and_replicas_are_deterministic() {
        let p = OneParticleDistribution::uniform(1, 5.0).unwrap();
        let k = PairCorrelationModel::constant(1.0, 0.5);
        let opts = SamplerOptions { pilot_sweeps: 400, ..Default::default() };
        let a = sample_ensemble(&p, Some(&k), 3, 200, 4, &opts).unwrap();
        let b = sample_ensemble(&p, Some(&k), 3, 200, 4, &opts).unwrap();
        assert_eq!(a, b);
        assert!(a.samples.iter().all(|&x| (0.0..5.0).contains(&x)));
        assert!(a.meta.correlated);
        assert!(a.meta.acceptance_rate > 0.5);
    }

    #[test]
    fn rejects_small_inputs() {
        let p = OneParticleDistribution::uniform(1, 5.0).unwrap();
        let opts = SamplerOptions::default();
        assert!(matches!(sample_ensemble(&p, None, 1, 200, 0, &opts), Err(PhaseSpaceError::TooFewParticles(1))));
        assert!(matches!(sample_ensemble(&p, None, 2, 99, 0, &opts), Err(PhaseSpaceError::TooFewSamples(99))));
        let bad = PairCorrelationModel::constant(1.0, -2.0);
        assert!(sample_ensemble(&p, Some(&bad), 2, 200, 0, &opts).is_err());
    }

    #[test]
    fn minimum_image() {
        assert!((periodic_distance(&[0.1], &[0.9], 1.0) - 0.2).abs() < 1e-15);
    }
}
