//! Multi-start search for the ensemble maximizing Holevo information.
//!
//! Candidates are the uniform computational-basis ensemble plus `trials`
//! random ensembles of at most `d²` pure states. The best candidate is then
//! polished by coordinate perturbation with a shrinking step.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use super::Ensemble;
use crate::channels::QuantumMap;
use crate::error::{Error, Result};
use crate::qmat::{entropy_of_hermitian, ComplexMatrix, DensityMatrix, ZERO};

const INITIAL_STEP: f64 = 0.1;
const MIN_STEP: f64 = 1e-6;
const MIN_IMPROVEMENT: f64 = 1e-10;
const MAX_SWEEPS: usize = 400;

/// The images `N(|k⟩⟨l|)` of all matrix units, so that a pure input costs
/// one pass over `d_in²` precomputed outputs.
#[derive(Debug, Clone)]
pub struct TransferMatrix {
    dim_in: usize,
    dim_out: usize,
    images: Vec<ComplexMatrix>,
}

impl TransferMatrix {
    pub fn from_map<M: QuantumMap + ?Sized>(map: &M) -> Self {
        let (dim_in, dim_out) = (map.dim_in(), map.dim_out());
        let mut images = Vec::with_capacity(dim_in * dim_in);
        for k in 0..dim_in {
            for l in 0..dim_in {
                let mut unit = ComplexMatrix::zeros(dim_in, dim_in);
                unit[(k, l)] = Complex64::new(1.0, 0.0);
                images.push(map.map_operator(&unit));
            }
        }
        Self { dim_in, dim_out, images }
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn apply(&self, m: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(m.shape(), (self.dim_in, self.dim_in), "transfer: input shape");
        let mut out = ComplexMatrix::zeros(self.dim_out, self.dim_out);
        for k in 0..self.dim_in {
            for l in 0..self.dim_in {
                let w = m[(k, l)];
                if w != ZERO {
                    out.add_scaled(&self.images[k * self.dim_in + l], w);
                }
            }
        }
        out
    }

    /// Output for the normalized ket `psi`.
    pub fn apply_pure(&self, psi: &[Complex64]) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.dim_out, self.dim_out);
        for k in 0..self.dim_in {
            for l in 0..self.dim_in {
                let w = psi[k] * psi[l].conj();
                if w != ZERO {
                    out.add_scaled(&self.images[k * self.dim_in + l], w);
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BestSource {
    UniformBasis,
    RandomTrial(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimizerDiagnostics {
    pub trials: usize,
    pub seed: u64,
    pub uniform_basis_chi: f64,
    pub best_random_chi: Option<f64>,
    /// Candidate the refinement started from.
    pub best_source: BestSource,
    pub refinement_sweeps: usize,
    pub evaluations: usize,
    pub ensemble_size: usize,
}

#[derive(Debug, Clone)]
pub struct OptimizerResult {
    pub ensemble: Ensemble,
    pub chi: f64,
    pub diagnostics: OptimizerDiagnostics,
}

/// Pure-state ensemble with cached channel outputs.
#[derive(Debug, Clone)]
struct Candidate {
    kets: Vec<Vec<Complex64>>,
    weights: Vec<f64>,
    outputs: Vec<ComplexMatrix>,
    entropies: Vec<f64>,
    chi: f64,
}

impl Candidate {
    fn new(tm: &TransferMatrix, kets: Vec<Vec<Complex64>>, weights: Vec<f64>) -> Result<Self> {
        let kets: Vec<_> = kets.into_iter().map(normalized).collect();
        let weights = normalized_weights(weights);
        let outputs: Vec<_> = kets.iter().map(|k| tm.apply_pure(k)).collect();
        let entropies = outputs.iter().map(entropy_of_hermitian).collect::<Result<Vec<_>>>()?;
        let chi = holevo_from_parts(&weights, &outputs, &entropies)?;
        Ok(Self {
            kets,
            weights,
            outputs,
            entropies,
            chi,
        })
    }

    fn into_ensemble(self) -> Result<Ensemble> {
        let entries = self
            .kets
            .iter()
            .zip(&self.weights)
            .filter(|(_, &w)| w > 0.0)
            .map(|(k, &w)| Ok((w, DensityMatrix::pure(k)?)))
            .collect::<Result<Vec<_>>>()?;
        let total: f64 = entries.iter().map(|(w, _)| w).sum();
        Ensemble::new(entries.into_iter().map(|(w, s)| (w / total, s)).collect())
    }
}

fn normalized(mut ket: Vec<Complex64>) -> Vec<Complex64> {
    let norm = ket.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    ket.iter_mut().for_each(|z| *z /= norm);
    ket
}

fn normalized_weights(mut w: Vec<f64>) -> Vec<f64> {
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= total);
    w
}

fn holevo_from_parts(weights: &[f64], outputs: &[ComplexMatrix], entropies: &[f64]) -> Result<f64> {
    let (r, c) = outputs[0].shape();
    let mut average = ComplexMatrix::zeros(r, c);
    let mut conditional = 0.0;
    for ((w, out), h) in weights.iter().zip(outputs).zip(entropies) {
        average.add_scaled(out, (*w).into());
        conditional += w * h;
    }
    Ok(entropy_of_hermitian(&average)? - conditional)
}

fn random_candidate(tm: &TransferMatrix, rng: &mut ChaCha8Rng) -> Result<Candidate> {
    let d = tm.dim_in();
    let size = rng.random_range(2..=(d * d).max(2));
    let kets = (0..size)
        .map(|_| {
            (0..d)
                .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
                .collect()
        })
        .collect();
    let weights = (0..size).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    Candidate::new(tm, kets, weights)
}

fn uniform_basis_candidate(tm: &TransferMatrix) -> Result<Candidate> {
    let d = tm.dim_in();
    let kets = (0..d)
        .map(|k| (0..d).map(|i| if i == k { Complex64::new(1.0, 0.0) } else { ZERO }).collect())
        .collect();
    Candidate::new(tm, kets, vec![1.0; d])
}

/// Per-trial stream, independent of scheduling.
fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

/// Coordinate ascent on the real and imaginary parts of every ket and on
/// every weight. Returns `(sweeps, evaluations)`.
fn refine(tm: &TransferMatrix, cand: &mut Candidate) -> Result<(usize, usize)> {
    let mut step = INITIAL_STEP;
    let mut sweeps = 0;
    let mut evaluations = 0;
    while step >= MIN_STEP && sweeps < MAX_SWEEPS {
        let before = cand.chi;
        for x in 0..cand.kets.len() {
            for coord in 0..2 * tm.dim_in() {
                for sign in [1.0, -1.0] {
                    let mut ket = cand.kets[x].clone();
                    let z = &mut ket[coord / 2];
                    if coord % 2 == 0 {
                        z.re += sign * step;
                    } else {
                        z.im += sign * step;
                    }
                    let ket = normalized(ket);
                    let out = tm.apply_pure(&ket);
                    let h = entropy_of_hermitian(&out)?;
                    let mut outputs = cand.outputs.clone();
                    let mut entropies = cand.entropies.clone();
                    outputs[x] = out;
                    entropies[x] = h;
                    let chi = holevo_from_parts(&cand.weights, &outputs, &entropies)?;
                    evaluations += 1;
                    if chi > cand.chi {
                        cand.kets[x] = ket;
                        cand.outputs = outputs;
                        cand.entropies = entropies;
                        cand.chi = chi;
                        break;
                    }
                }
            }
        }
        for x in 0..cand.weights.len() {
            for sign in [1.0, -1.0] {
                let mut weights = cand.weights.clone();
                weights[x] = (weights[x] + sign * step).max(0.0);
                if weights.iter().all(|&w| w == 0.0) {
                    continue;
                }
                let weights = normalized_weights(weights);
                let chi = holevo_from_parts(&weights, &cand.outputs, &cand.entropies)?;
                evaluations += 1;
                if chi > cand.chi {
                    cand.weights = weights;
                    cand.chi = chi;
                    break;
                }
            }
        }
        sweeps += 1;
        if cand.chi - before < MIN_IMPROVEMENT {
            step *= 0.5;
        }
    }
    Ok((sweeps, evaluations))
}

/// Searches for the Holevo-optimal ensemble of `ch`.
pub fn optimize_ensemble<M: QuantumMap + ?Sized>(ch: &M, trials: usize, seed: u64) -> Result<OptimizerResult> {
    if ch.dim_in() == 0 {
        return Err(Error::Empty("input space"));
    }
    let tm = TransferMatrix::from_map(ch);
    let uniform = uniform_basis_candidate(&tm)?;
    let uniform_basis_chi = uniform.chi;

    let randoms = (0..trials)
        .into_par_iter()
        .map(|t| random_candidate(&tm, &mut trial_rng(seed, t)))
        .collect::<Result<Vec<_>>>()?;

    let mut best = uniform;
    let mut best_source = BestSource::UniformBasis;
    let mut best_random_chi: Option<f64> = None;
    for (t, cand) in randoms.into_iter().enumerate() {
        best_random_chi = Some(best_random_chi.map_or(cand.chi, |b| b.max(cand.chi)));
        if cand.chi > best.chi {
            best = cand;
            best_source = BestSource::RandomTrial(t);
        }
    }

    let (refinement_sweeps, evaluations) = refine(&tm, &mut best)?;
    let chi = best.chi;
    let ensemble = best.into_ensemble()?;
    Ok(OptimizerResult {
        diagnostics: OptimizerDiagnostics {
            trials,
            seed,
            uniform_basis_chi,
            best_random_chi,
            best_source,
            refinement_sweeps,
            evaluations: evaluations + trials + 1,
            ensemble_size: ensemble.len(),
        },
        ensemble,
        chi,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::capacity::{holevo_analytic, holevo_of_ensemble};
    use crate::channels::{depolarizing_channel, KrausChannel};
    use crate::oracle::random_density_matrix;
    use crate::switch::{ControlState, SwitchedChannel};
    use approx::assert_abs_diff_eq;

    #[test]
    fn transfer_matrix_matches_direct_application() {
        let dep = depolarizing_channel(2, 0.3).unwrap();
        let sw = SwitchedChannel::new(&dep, &dep, ControlState::coherent(0.4).unwrap()).unwrap();
        let tm = TransferMatrix::from_map(&sw);
        for seed in 0..5 {
            let rho = random_density_matrix(2, seed);
            assert!(tm.apply(rho.matrix()).max_abs_diff(&sw.map_operator(rho.matrix())) < 1e-14);
        }
    }

    #[test]
    fn identity_channel_carries_one_bit() {
        let res = optimize_ensemble(&KrausChannel::identity(2), 20, 1).unwrap();
        assert_abs_diff_eq!(res.chi, 1.0, epsilon = 1e-6);
    }

    #[test]
    fn switched_depolarizing_is_attained_not_exceeded() {
        let dep = depolarizing_channel(2, 0.0).unwrap();
        let sw = SwitchedChannel::new(&dep, &dep, ControlState::plus()).unwrap();
        let res = optimize_ensemble(&sw, 50, 7).unwrap();
        let analytic = holevo_analytic(2, 0.0).unwrap().chi;
        assert!((res.chi - analytic).abs() <= 1e-6);
        assert!(res.chi <= analytic + 1e-8);
        // The returned ensemble really has the reported value.
        assert_abs_diff_eq!(holevo_of_ensemble(&sw, &res.ensemble).unwrap(), res.chi, epsilon = 1e-10);
    }

    #[test]
    fn deterministic_in_seed() {
        let dep = depolarizing_channel(2, 0.2).unwrap();
        let sw = SwitchedChannel::new(&dep, &dep, ControlState::coherent(0.3).unwrap()).unwrap();
        let a = optimize_ensemble(&sw, 16, 42).unwrap();
        let b = optimize_ensemble(&sw, 16, 42).unwrap();
        assert_eq!(a.chi.to_bits(), b.chi.to_bits());
        assert_eq!(a.diagnostics, b.diagnostics);
    }

    #[test]
    fn zero_trials_uses_uniform_basis() {
        let res = optimize_ensemble(&KrausChannel::identity(3), 0, 0).unwrap();
        assert_eq!(res.diagnostics.best_source, BestSource::UniformBasis);
        assert!(res.diagnostics.best_random_chi.is_none());
        assert_abs_diff_eq!(res.chi, 3f64.log2(), epsilon = 1e-9);
    }
}
