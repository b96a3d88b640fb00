//! Holevo information of the switched depolarizing channel.
//!
//! Two independent routes: closed-form spectra (valid for the `|+⟩`
//! control) and a numerical search over input ensembles that works for any
//! [`QuantumMap`].

mod optimizer;

pub use optimizer::{optimize_ensemble, BestSource, OptimizerDiagnostics, OptimizerResult, TransferMatrix};

use serde::Serialize;

use crate::channels::{check_probability, QuantumMap};
use crate::error::{Error, Result};
use crate::qmat::{
    entropy_of_hermitian, hermitian_spectrum, von_neumann_entropy, ComplexMatrix, DensityMatrix, Spectrum,
    TOL_TRACE,
};
use crate::switch::{switched_depolarizing_analytic, ControlState};

/// Probability-weighted states of a common dimension.
#[derive(Debug, Clone)]
pub struct Ensemble {
    entries: Vec<(f64, DensityMatrix)>,
}

impl Ensemble {
    pub fn new(entries: Vec<(f64, DensityMatrix)>) -> Result<Self> {
        let dim = entries.first().ok_or(Error::Empty("ensemble"))?.1.dim();
        if let Some((_, s)) = entries.iter().find(|(_, s)| s.dim() != dim) {
            return Err(Error::dims(dim, s.dim()));
        }
        if let Some((p, _)) = entries.iter().find(|(p, _)| p.is_nan() || *p < 0.0) {
            return Err(Error::param("probability", format!("{p} is negative")));
        }
        let total: f64 = entries.iter().map(|(p, _)| p).sum();
        if (total - 1.0).abs() > TOL_TRACE {
            return Err(Error::param("probability", format!("weights sum to {total}")));
        }
        Ok(Self { entries })
    }

    /// `d` computational basis states with equal weight.
    pub fn uniform_basis(d: usize) -> Self {
        let entries = (0..d)
            .map(|k| (1.0 / d as f64, DensityMatrix::basis(d, k).expect("k < d")))
            .collect();
        Self { entries }
    }

    pub fn entries(&self) -> &[(f64, DensityMatrix)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.entries[0].1.dim()
    }
}

/// `H(Σ p_x N(ρ_x)) − Σ p_x H(N(ρ_x))` in bits.
pub fn holevo_of_ensemble<M: QuantumMap + ?Sized>(ch: &M, ens: &Ensemble) -> Result<f64> {
    if ens.dim() != ch.dim_in() {
        return Err(Error::dims(ch.dim_in(), ens.dim()));
    }
    let n = ch.dim_out();
    let mut average = ComplexMatrix::zeros(n, n);
    let mut conditional = 0.0;
    for (p, rho) in ens.entries() {
        let out = ch.map_operator(rho.matrix());
        conditional += p * entropy_of_hermitian(&out)?;
        average.add_scaled(&out, (*p).into());
    }
    Ok(entropy_of_hermitian(&average)? - conditional)
}

/// Control marginal of the switched depolarizing channel; independent of the
/// target input.
pub fn reduced_control_state(d: usize, q: f64, ctrl: &ControlState) -> Result<DensityMatrix> {
    check_params(d, q)?;
    let p = ctrl.p();
    let a = (1.0 - q).powi(2);
    let b = q * (2.0 - q);
    let off = a * ctrl.coherence() / (d * d) as f64 + b * ctrl.coherence();
    let m = ComplexMatrix::from_real(2, 2, &[a * p + b * p, off, off, a * (1.0 - p) + b * (1.0 - p)])?;
    DensityMatrix::new(m)
}

/// Spectrum of `[[A, B], [B, A]]` as the union of the spectra of `A + B`
/// and `A − B`.
pub fn block_symmetric_spectrum(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<Spectrum> {
    if a.shape() != b.shape() {
        return Err(Error::dims(
            format!("{}x{}", a.rows(), a.cols()),
            format!("{}x{}", b.rows(), b.cols()),
        ));
    }
    let mut values: Vec<f64> = hermitian_spectrum(&(a + b))?.into();
    values.extend(Vec::<f64>::from(hermitian_spectrum(&(a - b))?));
    Ok(Spectrum::new(values))
}

/// Output spectrum for the `|+⟩` control given the input spectrum `λ`:
///
/// `λ⁺ = ((1−q)² + 4q(1−q))/2d + (q² + (1−q)²/2d²)·λ`,
/// `λ⁻ = (1−q)²/2d² · (d − λ)`.
pub fn switched_spectrum(d: usize, q: f64, rho_spectrum: &Spectrum) -> Result<Spectrum> {
    check_params(d, q)?;
    if rho_spectrum.len() != d {
        return Err(Error::dims(d, rho_spectrum.len()));
    }
    let df = d as f64;
    let r = 1.0 - q;
    let base = (r * r + 4.0 * q * r) / (2.0 * df);
    let slope = q * q + r * r / (2.0 * df * df);
    let minus = r * r / (2.0 * df * df);
    let values = rho_spectrum
        .values()
        .iter()
        .flat_map(|&l| [base + slope * l, minus * (df - l)])
        .collect();
    Ok(Spectrum::new(values))
}

/// Minimum output entropy for the `|+⟩` control, reached on pure inputs.
pub fn h_min(d: usize, q: f64) -> Result<f64> {
    let mut pure = vec![0.0; d];
    if let Some(first) = pure.first_mut() {
        *first = 1.0;
    }
    Ok(switched_spectrum(d, q, &Spectrum::new(pure))?.entropy())
}

/// Minimum output entropy for an arbitrary control state. The output is
/// affine in the input and covariant under target unitaries, so every pure
/// input gives the same entropy and concavity puts the minimum there.
pub fn h_min_general(d: usize, q: f64, ctrl: &ControlState) -> Result<f64> {
    let out = switched_depolarizing_analytic(d, q, ctrl, &DensityMatrix::basis(d, 0)?)?;
    von_neumann_entropy(out.state())
}

/// Closed-form Holevo information at the `|+⟩` control.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnalyticCapacity {
    pub chi: f64,
    pub entropy_control: f64,
    pub h_min: f64,
}

/// `χ = log₂ d + H(ρ̃_c) − H_min`.
pub fn holevo_analytic(d: usize, q: f64) -> Result<AnalyticCapacity> {
    let entropy_control = von_neumann_entropy(&reduced_control_state(d, q, &ControlState::plus())?)?;
    let h_min = h_min(d, q)?;
    Ok(AnalyticCapacity {
        chi: (d as f64).log2() + entropy_control - h_min,
        entropy_control,
        h_min,
    })
}

/// One row of a capacity sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CapacityReport {
    pub d: usize,
    pub q: f64,
    pub p: f64,
    /// Present only for the `|+⟩` control.
    pub chi_analytic: Option<f64>,
    pub chi_numeric: f64,
    pub entropy_control: f64,
    pub h_min: f64,
    pub optimizer_diagnostics: OptimizerDiagnostics,
}

fn check_params(d: usize, q: f64) -> Result<()> {
    if d < 2 {
        return Err(Error::param("d", format!("dimension must be at least 2, got {d}")));
    }
    check_probability("q", q)
}
