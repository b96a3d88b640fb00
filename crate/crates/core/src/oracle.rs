//! Brute-force reference computations and analytic-vs-numeric comparison
//! suites.
//!
//! The SWITCH output here is assembled from an explicit sum over every pair
//! of Kraus operators of the redundant depolarizing representation. Only the
//! [`crate::qmat`] primitives are shared with the closed-form code paths.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::capacity::{holevo_analytic, optimize_ensemble, reduced_control_state, switched_spectrum};
use crate::channels::depolarizing_channel;
use crate::error::{Error, Result};
use crate::qmat::{hermitian_spectrum, partial_trace_matrix, tensor, ComplexMatrix, DensityMatrix, Subsystem};
use crate::switch::{switch_channel, switched_depolarizing_analytic, ControlState, JointState, SwitchedChannel};

fn gaussian_matrix(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// Ginibre state `G G† / Tr(G G†)` with standard complex Gaussian `G`.
pub fn random_density_matrix(d: usize, seed: u64) -> DensityMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = gaussian_matrix(d, d, &mut rng);
    let w = g.matmul(&g.dagger());
    let tr = w.trace().re;
    DensityMatrix::new(w.scale_real(1.0 / tr)).expect("G G† is a valid state after normalization")
}

/// Pure state from a normalized Gaussian ket.
pub fn random_pure_state(d: usize, seed: u64) -> DensityMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ket: Vec<Complex64> = (0..d)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    DensityMatrix::pure(&ket).expect("Gaussian ket is nonzero")
}

/// `rows x cols` matrix with orthonormal columns (`V†V = I`), by
/// Gram–Schmidt on Gaussian columns. Requires `rows >= cols`.
pub fn random_isometry(rows: usize, cols: usize, seed: u64) -> ComplexMatrix {
    assert!(rows >= cols, "isometry needs rows >= cols");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = gaussian_matrix(rows, cols, &mut rng);
    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(cols);
    for c in 0..cols {
        let mut v: Vec<Complex64> = (0..rows).map(|r| g[(r, c)]).collect();
        // Two passes keep the columns orthogonal to machine precision.
        for _ in 0..2 {
            for b in &basis {
                let overlap: Complex64 = b.iter().zip(&v).map(|(x, y)| x.conj() * y).sum();
                v.iter_mut().zip(b).for_each(|(y, x)| *y -= overlap * x);
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        v.iter_mut().for_each(|z| *z /= norm);
        basis.push(v);
    }
    ComplexMatrix::from_fn(rows, cols, |r, c| basis[c][r])
}

/// Haar-distributed unitary (up to column phases).
pub fn random_unitary(d: usize, seed: u64) -> ComplexMatrix {
    random_isometry(d, d, seed)
}

/// `X(i)Z(j)` built entrywise: `⟨r|X(i)Z(j)|c⟩ = δ(r, c+i) e^{2πi jc/d}`.
fn weyl_entrywise(d: usize, i: usize, j: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(d, d, |r, c| {
        if r == (c + i) % d {
            Complex64::from_polar(1.0, 2.0 * PI * ((j * c) % d) as f64 / d as f64)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// `Σ_ij W_ij (ρ ⊗ ρ_c) W_ij†` over all `(d² + 1)²` Kraus pairs of two
/// generic depolarizing channels.
pub fn brute_force_switch_output(d: usize, q: f64, ctrl: &ControlState, rho: &DensityMatrix) -> Result<JointState> {
    if d < 2 {
        return Err(Error::param("d", format!("dimension must be at least 2, got {d}")));
    }
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::param("q", format!("{q} is outside [0, 1]")));
    }
    if rho.dim() != d {
        return Err(Error::dims(d, rho.dim()));
    }
    let p = ctrl.p();
    let c = if ctrl.is_coherent() { (p * (1.0 - p)).sqrt() } else { 0.0 };
    let rho_c = ComplexMatrix::from_real(2, 2, &[p, c, c, 1.0 - p])?;
    let input = tensor(rho.matrix(), &rho_c);

    let mut kraus = vec![ComplexMatrix::identity(d).scale_real(q.sqrt())];
    let w = (1.0 - q).sqrt() / d as f64;
    for i in 0..d {
        for j in 0..d {
            kraus.push(weyl_entrywise(d, i, j).scale_real(w));
        }
    }
    let p0 = ComplexMatrix::diag(&[1.0, 0.0]);
    let p1 = ComplexMatrix::diag(&[0.0, 1.0]);

    let mut out = ComplexMatrix::zeros(2 * d, 2 * d);
    for ki in &kraus {
        for kj in &kraus {
            let w_ij = &tensor(&ki.matmul(kj), &p0) + &tensor(&kj.matmul(ki), &p1);
            out = &out + &w_ij.conjugate(&input);
        }
    }
    JointState::new(d, DensityMatrix::new(out)?)
}

/// Named comparison families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    AnalyticVsBrute,
    SpectrumVsEigensolver,
    ChiVsOptimizer,
    Marginals,
    Cptp,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::AnalyticVsBrute,
        Suite::SpectrumVsEigensolver,
        Suite::ChiVsOptimizer,
        Suite::Marginals,
        Suite::Cptp,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::AnalyticVsBrute => "analytic-vs-brute",
            Suite::SpectrumVsEigensolver => "spectrum-vs-eigensolver",
            Suite::ChiVsOptimizer => "chi-vs-optimizer",
            Suite::Marginals => "marginals",
            Suite::Cptp => "cptp",
        }
    }

    pub fn description(&self) -> &'static str {
        match self {
            Suite::AnalyticVsBrute => "closed-form switched depolarizing output vs explicit Kraus-pair sum (max entry deviation)",
            Suite::SpectrumVsEigensolver => "lambda+/lambda- spectrum formula vs Hermitian eigensolver on brute-force output, p=1/2",
            Suite::ChiVsOptimizer => "closed-form Holevo information vs numerical ensemble optimizer, p=1/2",
            Suite::Marginals => "q=0 target marginal vs I/d and control marginal vs reduced control formula",
            Suite::Cptp => "max |sum W^dag W - I| for the SWITCH of two depolarizing channels",
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::UnknownSuite(s.to_string()))
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridPoint {
    pub d: usize,
    pub q: f64,
    pub p: f64,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub suite: Suite,
    pub description: String,
    pub tolerance: f64,
    pub max_abs_deviation: f64,
    pub instances_tested: usize,
    pub worst_case_parameters: Option<GridPoint>,
    pub passed: bool,
}

impl ComparisonReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

impl fmt::Display for ComparisonReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "suite:      {}", self.suite)?;
        writeln!(f, "checks:     {}", self.description)?;
        writeln!(f, "instances:  {}", self.instances_tested)?;
        writeln!(f, "max dev:    {:.3e}", self.max_abs_deviation)?;
        writeln!(f, "tolerance:  {:.3e}", self.tolerance)?;
        if let Some(w) = &self.worst_case_parameters {
            write!(f, "worst case: d={} q={} p={}", w.d, w.q, w.p)?;
            match w.seed {
                Some(s) => writeln!(f, " seed={s}")?,
                None => writeln!(f)?,
            }
        }
        write!(f, "result:     {}", if self.passed { "PASS" } else { "FAIL" })
    }
}

const Q_GRID: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];
const P_GRID: [f64; 4] = [0.0, 0.3, 0.5, 1.0];
const SEEDS_PER_POINT: u64 = 20;
const OPTIMIZER_TRIALS: usize = 100;

fn instance_seed(d: usize, qi: usize, pi: usize, s: u64) -> u64 {
    (((d as u64) * 16 + qi as u64) * 16 + pi as u64) * 1000 + s
}

fn grid(dims: &[usize], qs: &[f64], ps: &[f64], seeds: u64) -> Vec<GridPoint> {
    let mut points = Vec::new();
    for &d in dims {
        for (qi, &q) in qs.iter().enumerate() {
            for (pi, &p) in ps.iter().enumerate() {
                for s in 0..seeds {
                    points.push(GridPoint {
                        d,
                        q,
                        p,
                        seed: Some(instance_seed(d, qi, pi, s)),
                    });
                }
            }
        }
    }
    points
}

fn analytic_vs_brute(pt: &GridPoint) -> Result<f64> {
    let ctrl = ControlState::coherent(pt.p)?;
    let rho = random_density_matrix(pt.d, pt.seed.unwrap_or(0));
    let closed = switched_depolarizing_analytic(pt.d, pt.q, &ctrl, &rho)?;
    let brute = brute_force_switch_output(pt.d, pt.q, &ctrl, &rho)?;
    Ok(closed.max_abs_diff(&brute))
}

fn spectrum_vs_eigensolver(pt: &GridPoint) -> Result<f64> {
    let rho = random_density_matrix(pt.d, pt.seed.unwrap_or(0));
    let brute = brute_force_switch_output(pt.d, pt.q, &ControlState::plus(), &rho)?;
    let numeric = hermitian_spectrum(brute.matrix())?;
    let formula = switched_spectrum(pt.d, pt.q, &rho.spectrum())?;
    Ok(numeric.max_deviation(&formula))
}

fn chi_vs_optimizer(pt: &GridPoint) -> Result<f64> {
    let dep = depolarizing_channel(pt.d, pt.q)?;
    let sw = SwitchedChannel::new(&dep, &dep, ControlState::plus())?;
    let numeric = optimize_ensemble(&sw, OPTIMIZER_TRIALS, pt.seed.unwrap_or(0))?;
    Ok((numeric.chi - holevo_analytic(pt.d, pt.q)?.chi).abs())
}

fn marginals(pt: &GridPoint) -> Result<f64> {
    let ctrl = ControlState::coherent(pt.p)?;
    let rho = random_density_matrix(pt.d, pt.seed.unwrap_or(0));
    let out = brute_force_switch_output(pt.d, pt.q, &ctrl, &rho)?;
    let target = partial_trace_matrix(out.matrix(), pt.d, 2, Subsystem::A)?;
    let control = partial_trace_matrix(out.matrix(), pt.d, 2, Subsystem::B)?;
    let dev_target = target.max_abs_diff(DensityMatrix::maximally_mixed(pt.d).matrix());
    let dev_control = control.max_abs_diff(reduced_control_state(pt.d, pt.q, &ctrl)?.matrix());
    Ok(dev_target.max(dev_control))
}

fn cptp(pt: &GridPoint) -> Result<f64> {
    let dep = depolarizing_channel(pt.d, pt.q)?;
    Ok(switch_channel(&dep, &dep)?.is_cptp(0.0).max_deviation)
}

type Check = fn(&GridPoint) -> Result<f64>;

/// Runs one comparison family over its fixed grid and reports the worst
/// deviation together with the parameters that produced it.
pub fn verify_equivalence(suite: Suite, tolerance: f64) -> Result<ComparisonReport> {
    let (points, check): (Vec<GridPoint>, Check) = match suite {
        Suite::AnalyticVsBrute => (grid(&[2, 3, 4], &Q_GRID, &P_GRID, SEEDS_PER_POINT), analytic_vs_brute),
        Suite::SpectrumVsEigensolver => (grid(&[2, 3, 4, 5], &Q_GRID, &[0.5], SEEDS_PER_POINT), spectrum_vs_eigensolver),
        Suite::ChiVsOptimizer => (grid(&[2, 3], &[0.0, 0.5, 1.0], &[0.5], 1), chi_vs_optimizer),
        Suite::Marginals => (grid(&[2, 3, 4], &[0.0], &P_GRID, SEEDS_PER_POINT), marginals),
        Suite::Cptp => {
            let mut pts = grid(&[2, 3, 4, 5], &Q_GRID, &[0.5], 1);
            pts.iter_mut().for_each(|pt| pt.seed = None);
            (pts, cptp)
        }
    };
    let deviations = points.par_iter().map(check).collect::<Result<Vec<f64>>>()?;

    let mut worst: Option<(f64, GridPoint)> = None;
    for (dev, pt) in deviations.into_iter().zip(&points) {
        if worst.is_none_or(|(w, _)| dev > w) {
            worst = Some((dev, *pt));
        }
    }
    let max_abs_deviation = worst.map_or(0.0, |(w, _)| w);
    Ok(ComparisonReport {
        suite,
        description: suite.description().to_string(),
        tolerance,
        max_abs_deviation,
        instances_tested: points.len(),
        worst_case_parameters: worst.map(|(_, pt)| pt),
        passed: max_abs_deviation <= tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_states_are_valid_and_deterministic() {
        for seed in 0..20 {
            let d = 1 + (seed % 5) as usize;
            let rho = random_density_matrix(d, seed);
            assert!((rho.matrix().trace().re - 1.0).abs() < 1e-12);
            assert!(rho.spectrum().min() >= -1e-12);
            let again = random_density_matrix(d, seed);
            assert_eq!(rho, again);
        }
        assert_ne!(random_density_matrix(3, 1), random_density_matrix(3, 2));
    }

    #[test]
    fn ginibre_states_are_full_rank() {
        let rho = random_density_matrix(4, 9);
        assert!(rho.spectrum().min() > 1e-8);
    }

    #[test]
    fn isometry_and_unitary() {
        let v = random_isometry(7, 4, 3);
        assert!(v.dagger().matmul(&v).max_abs_diff(&ComplexMatrix::identity(4)) < 1e-13);
        let u = random_unitary(5, 4);
        assert!(u.matmul(&u.dagger()).max_abs_diff(&ComplexMatrix::identity(5)) < 1e-13);
    }

    #[test]
    fn brute_force_q0_structure() {
        for d in 2..=3 {
            let rho = random_density_matrix(d, 30 + d as u64);
            let out = brute_force_switch_output(d, 0.0, &ControlState::plus(), &rho).unwrap();
            let diag = ComplexMatrix::identity(d).scale_real(1.0 / (2 * d) as f64);
            let off = rho.matrix().scale_real(1.0 / (2 * d * d) as f64);
            assert!(out.control_block(0, 0).max_abs_diff(&diag) < 1e-12);
            assert!(out.control_block(1, 1).max_abs_diff(&diag) < 1e-12);
            assert!(out.control_block(0, 1).max_abs_diff(&off) < 1e-12);
            assert!(out.control_block(1, 0).max_abs_diff(&off) < 1e-12);
        }
    }

    #[test]
    fn brute_force_q1_is_product() {
        let rho = random_density_matrix(3, 5);
        let ctrl = ControlState::coherent(0.2).unwrap();
        let out = brute_force_switch_output(3, 1.0, &ctrl, &rho).unwrap();
        assert!(out.state().max_abs_diff(&rho.tensor(&ctrl.density())) < 1e-14);
    }

    #[test]
    fn brute_force_rejects_bad_input() {
        let rho = DensityMatrix::maximally_mixed(2);
        assert!(brute_force_switch_output(2, 2.0, &ControlState::plus(), &rho).is_err());
        assert!(brute_force_switch_output(3, 0.5, &ControlState::plus(), &rho).is_err());
    }

    #[test]
    fn weyl_entrywise_matches_channels_basis() {
        let basis = crate::channels::weyl_basis(4).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert!(weyl_entrywise(4, i, j).max_abs_diff(basis.get(i, j)) < 1e-14);
            }
        }
    }

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!(matches!("nonexistent".parse::<Suite>(), Err(Error::UnknownSuite(_))));
    }

    #[test]
    fn cptp_and_marginal_suites_pass() {
        let r = verify_equivalence(Suite::Cptp, 1e-12).unwrap();
        assert!(r.passed, "{r}");
        assert_eq!(r.instances_tested, 20);
        let r = verify_equivalence(Suite::Marginals, 1e-12).unwrap();
        assert!(r.passed, "{r}");
    }

    #[test]
    fn report_json_has_expected_fields() {
        let r = verify_equivalence(Suite::Cptp, 1e-12).unwrap();
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["suite"], "cptp");
        assert!(v["max_abs_deviation"].as_f64().unwrap() >= 0.0);
        assert_eq!(v["instances_tested"], 20);
    }
}
