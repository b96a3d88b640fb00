//! Kraus-form quantum channels, the Heisenberg–Weyl operator basis and the
//! depolarizing family built on it.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qmat::{tensor, ComplexMatrix, DensityMatrix, ONE, ZERO};

/// A linear map between operator spaces. States go in, states come out when
/// the map is a channel; arbitrary operators are accepted so that transfer
/// matrices can be assembled from matrix units.
pub trait QuantumMap {
    fn dim_in(&self) -> usize;
    fn dim_out(&self) -> usize;
    fn map_operator(&self, m: &ComplexMatrix) -> ComplexMatrix;

    /// Applies the map to a state and validates the result.
    fn map_state(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.dim() != self.dim_in() {
            return Err(Error::dims(self.dim_in(), rho.dim()));
        }
        DensityMatrix::new(self.map_operator(rho.matrix()))
    }
}

/// Channel given by a nonempty list of Kraus operators, each `dim_out x dim_in`.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    dim_in: usize,
    dim_out: usize,
    ops: Vec<ComplexMatrix>,
}

/// Outcome of a completeness check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CptpCheck {
    pub passed: bool,
    /// `max |Σ K†K − I|` over all entries.
    pub max_deviation: f64,
}

impl KrausChannel {
    pub fn new(ops: Vec<ComplexMatrix>) -> Result<Self> {
        let first = ops.first().ok_or(Error::Empty("Kraus operator list"))?;
        let (dim_out, dim_in) = first.shape();
        if let Some(bad) = ops.iter().find(|k| k.shape() != (dim_out, dim_in)) {
            return Err(Error::dims(
                format!("{dim_out}x{dim_in}"),
                format!("{}x{}", bad.rows(), bad.cols()),
            ));
        }
        Ok(Self { dim_in, dim_out, ops })
    }

    pub fn identity(d: usize) -> Self {
        Self {
            dim_in: d,
            dim_out: d,
            ops: vec![ComplexMatrix::identity(d)],
        }
    }

    pub fn unitary(u: ComplexMatrix) -> Result<Self> {
        Self::new(vec![u])
    }

    pub fn kraus_ops(&self) -> &[ComplexMatrix] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        self.map_state(rho)
    }

    pub fn is_cptp(&self, tol: f64) -> CptpCheck {
        let mut sum = ComplexMatrix::zeros(self.dim_in, self.dim_in);
        for k in &self.ops {
            sum.add_scaled(&k.dagger().matmul(k), ONE);
        }
        let max_deviation = sum.max_abs_diff(&ComplexMatrix::identity(self.dim_in));
        CptpCheck {
            passed: max_deviation <= tol,
            max_deviation,
        }
    }

    /// Kraus operators `L_i = Σ_j V_ij K_j` for a `m x n` mixing matrix `V`
    /// with `n = self.len()`. The channel is unchanged whenever `V†V = I`.
    pub fn remix(&self, v: &ComplexMatrix) -> Result<Self> {
        if v.cols() != self.ops.len() {
            return Err(Error::dims(self.ops.len(), v.cols()));
        }
        let ops = (0..v.rows())
            .map(|i| {
                let mut l = ComplexMatrix::zeros(self.dim_out, self.dim_in);
                for (j, k) in self.ops.iter().enumerate() {
                    l.add_scaled(k, v[(i, j)]);
                }
                l
            })
            .collect();
        Self::new(ops)
    }
}

impl QuantumMap for KrausChannel {
    fn dim_in(&self) -> usize {
        self.dim_in
    }

    fn dim_out(&self) -> usize {
        self.dim_out
    }

    fn map_operator(&self, m: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.dim_out, self.dim_out);
        for k in &self.ops {
            out.add_scaled(&k.conjugate(m), ONE);
        }
        out
    }
}

/// `second ∘ first`: Kraus operators `K2_i K1_j`.
pub fn compose_serial(first: &KrausChannel, second: &KrausChannel) -> Result<KrausChannel> {
    if second.dim_in != first.dim_out {
        return Err(Error::dims(first.dim_out, second.dim_in));
    }
    let ops = second
        .ops
        .iter()
        .flat_map(|k2| first.ops.iter().map(move |k1| k2.matmul(k1)))
        .collect();
    KrausChannel::new(ops)
}

/// `a ⊗ b`: Kraus operators `Ka_i ⊗ Kb_j`.
pub fn compose_parallel(a: &KrausChannel, b: &KrausChannel) -> Result<KrausChannel> {
    let ops = a
        .ops
        .iter()
        .flat_map(|ka| b.ops.iter().map(move |kb| tensor(ka, kb)))
        .collect();
    KrausChannel::new(ops)
}

/// Generalized shift `X(i)|l⟩ = |l + i mod d⟩`.
pub fn shift_operator(d: usize, i: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(d, d, |r, c| if r == (c + i) % d { ONE } else { ZERO })
}

/// Generalized clock `Z(j)|l⟩ = exp(2πi·jl/d)|l⟩`.
pub fn clock_operator(d: usize, j: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(d, d, |r, c| {
        if r == c {
            Complex64::from_polar(1.0, 2.0 * PI * ((j * r) % d) as f64 / d as f64)
        } else {
            ZERO
        }
    })
}

/// The `d²` Heisenberg–Weyl unitaries `X(i)Z(j)`, stored at index `i·d + j`.
#[derive(Debug, Clone)]
pub struct WeylBasis {
    dim: usize,
    unitaries: Vec<ComplexMatrix>,
}

impl WeylBasis {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn unitaries(&self) -> &[ComplexMatrix] {
        &self.unitaries
    }

    pub fn get(&self, i: usize, j: usize) -> &ComplexMatrix {
        &self.unitaries[i * self.dim + j]
    }
}

pub fn weyl_basis(d: usize) -> Result<WeylBasis> {
    if d < 2 {
        return Err(Error::param("d", format!("dimension must be at least 2, got {d}")));
    }
    let unitaries = (0..d)
        .flat_map(|i| (0..d).map(move |j| shift_operator(d, i).matmul(&clock_operator(d, j))))
        .collect();
    Ok(WeylBasis { dim: d, unitaries })
}

/// `ρ ↦ qρ + (1−q)/d² Σ U ρ U†`, kept in the redundant Kraus form
/// `{√q I} ∪ {√(1−q)/d · U_k}` over the full Weyl basis.
pub fn depolarizing_channel(d: usize, q: f64) -> Result<KrausChannel> {
    check_probability("q", q)?;
    let basis = weyl_basis(d)?;
    let mut ops = Vec::with_capacity(d * d + 1);
    ops.push(ComplexMatrix::identity(d).scale_real(q.sqrt()));
    let w = (1.0 - q).sqrt() / d as f64;
    ops.extend(basis.unitaries.iter().map(|u| u.scale_real(w)));
    KrausChannel::new(ops)
}

/// Phase-flip noise `{√(1−r) I, √r Z(1)}`. All Kraus operators are diagonal
/// and therefore commute.
pub fn dephasing_channel(d: usize, r: f64) -> Result<KrausChannel> {
    check_probability("r", r)?;
    if d < 2 {
        return Err(Error::param("d", format!("dimension must be at least 2, got {d}")));
    }
    KrausChannel::new(vec![
        ComplexMatrix::identity(d).scale_real((1.0 - r).sqrt()),
        clock_operator(d, 1).scale_real(r.sqrt()),
    ])
}

pub(crate) fn check_probability(name: &'static str, x: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::param(name, format!("{x} is outside [0, 1]")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{random_density_matrix, random_unitary};

    fn pauli(name: char) -> ComplexMatrix {
        let i = Complex64::new(0.0, 1.0);
        let v = match name {
            'I' => [ONE, ZERO, ZERO, ONE],
            'X' => [ZERO, ONE, ONE, ZERO],
            'Z' => [ONE, ZERO, ZERO, -ONE],
            // X·Z
            'W' => [ZERO, -ONE, ONE, ZERO],
            _ => [ZERO, -i, i, ZERO],
        };
        ComplexMatrix::new(2, 2, v.to_vec()).unwrap()
    }

    #[test]
    fn qubit_weyl_basis_is_paulis() {
        let b = weyl_basis(2).unwrap();
        assert_eq!(b.unitaries().len(), 4);
        assert!(b.get(0, 0).max_abs_diff(&pauli('I')) < 1e-15);
        assert!(b.get(0, 1).max_abs_diff(&pauli('Z')) < 1e-15);
        assert!(b.get(1, 0).max_abs_diff(&pauli('X')) < 1e-15);
        assert!(b.get(1, 1).max_abs_diff(&pauli('W')) < 1e-15);
    }

    #[test]
    fn weyl_orthogonality() {
        for d in 2..=5 {
            let b = weyl_basis(d).unwrap();
            for (a, ua) in b.unitaries().iter().enumerate() {
                assert!(ua.dagger().matmul(ua).max_abs_diff(&ComplexMatrix::identity(d)) < 1e-12);
                for (c, uc) in b.unitaries().iter().enumerate() {
                    let ip = ua.dagger().matmul(uc).trace();
                    let expect = if a == c { d as f64 } else { 0.0 };
                    assert!((ip - Complex64::new(expect, 0.0)).norm() < 1e-10, "d={d} ({a},{c}) -> {ip}");
                }
            }
        }
    }

    #[test]
    fn weyl_twirl_is_completely_depolarizing() {
        let b = weyl_basis(3).unwrap();
        let rho = random_density_matrix(3, 17);
        let mut sum = ComplexMatrix::zeros(3, 3);
        for u in b.unitaries() {
            sum.add_scaled(&u.conjugate(rho.matrix()), Complex64::new(1.0 / 9.0, 0.0));
        }
        assert!(sum.max_abs_diff(DensityMatrix::maximally_mixed(3).matrix()) <= 1e-12);
    }

    #[test]
    fn weyl_rejects_small_dimension() {
        assert!(weyl_basis(1).is_err());
        assert!(weyl_basis(0).is_err());
    }

    #[test]
    fn depolarizing_examples() {
        for d in 2..=4 {
            let rho = random_density_matrix(d, 3 + d as u64);
            let out = depolarizing_channel(d, 0.0).unwrap().apply(&rho).unwrap();
            assert!(out.max_abs_diff(&DensityMatrix::maximally_mixed(d)) < 1e-12);
            let out = depolarizing_channel(d, 1.0).unwrap().apply(&rho).unwrap();
            assert!(out.max_abs_diff(&rho) < 1e-12);
        }
        let out = depolarizing_channel(2, 0.5).unwrap().apply(&DensityMatrix::basis(2, 0).unwrap()).unwrap();
        assert!(out.matrix().max_abs_diff(&ComplexMatrix::diag(&[0.75, 0.25])) < 1e-12);
    }

    #[test]
    fn depolarizing_rejects_bad_q() {
        assert!(depolarizing_channel(2, -0.1).is_err());
        assert!(depolarizing_channel(2, 1.5).is_err());
        assert!(depolarizing_channel(2, f64::NAN).is_err());
    }

    #[test]
    fn depolarizing_kraus_count_is_redundant() {
        assert_eq!(depolarizing_channel(3, 0.2).unwrap().len(), 10);
    }

    #[test]
    fn cptp_checks() {
        assert!(depolarizing_channel(4, 0.3).unwrap().is_cptp(1e-10).passed);
        let bad = KrausChannel::new(vec![ComplexMatrix::identity(2).scale_real(2.0)]).unwrap();
        let check = bad.is_cptp(1e-10);
        assert!(!check.passed);
        assert!((check.max_deviation - 3.0).abs() < 1e-12);
    }

    #[test]
    fn apply_preserves_trace_on_random_pairs() {
        for seed in 0..100u64 {
            let d = 2 + (seed % 3) as usize;
            let q = (seed as f64) / 100.0;
            let ch = depolarizing_channel(d, q).unwrap();
            let out = ch.apply(&random_density_matrix(d, seed)).unwrap();
            assert!((out.matrix().trace().re - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn apply_dimension_mismatch() {
        let ch = KrausChannel::identity(2);
        assert!(matches!(ch.apply(&DensityMatrix::maximally_mixed(3)), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn serial_composition_of_depolarizing() {
        let d = 3;
        let (q1, q2) = (0.3, 0.6);
        let ch = compose_serial(&depolarizing_channel(d, q1).unwrap(), &depolarizing_channel(d, q2).unwrap()).unwrap();
        let direct = depolarizing_channel(d, q1 * q2).unwrap();
        for seed in 0..10 {
            let rho = random_density_matrix(d, seed);
            assert!(ch.apply(&rho).unwrap().max_abs_diff(&direct.apply(&rho).unwrap()) <= 1e-10);
        }
        let with_id = compose_serial(&direct, &KrausChannel::identity(d)).unwrap();
        let rho = random_density_matrix(d, 99);
        assert!(with_id.apply(&rho).unwrap().max_abs_diff(&direct.apply(&rho).unwrap()) < 1e-12);
    }

    #[test]
    fn serial_composition_dimension_mismatch() {
        assert!(compose_serial(&KrausChannel::identity(2), &KrausChannel::identity(3)).is_err());
    }

    #[test]
    fn parallel_completely_depolarizing() {
        let dep = depolarizing_channel(2, 0.0).unwrap();
        let ch = compose_parallel(&dep, &dep).unwrap();
        assert_eq!(ch.dim_in(), 4);
        for seed in 0..5 {
            let out = ch.apply(&random_density_matrix(4, seed)).unwrap();
            assert!(out.max_abs_diff(&DensityMatrix::maximally_mixed(4)) < 1e-12);
        }
    }

    #[test]
    fn depolarizing_is_unitarily_covariant() {
        for seed in 0..10 {
            let d = 2 + (seed % 3) as usize;
            let ch = depolarizing_channel(d, 0.37).unwrap();
            let u = random_unitary(d, 1000 + seed);
            let rho = random_density_matrix(d, seed);
            let rotated = DensityMatrix::new(u.conjugate(rho.matrix())).unwrap();
            let lhs = ch.apply(&rotated).unwrap();
            let rhs = u.conjugate(ch.apply(&rho).unwrap().matrix());
            assert!(lhs.matrix().max_abs_diff(&rhs) <= 1e-10);
        }
    }

    #[test]
    fn dephasing_kraus_commute() {
        let ch = dephasing_channel(3, 0.4).unwrap();
        let [a, b] = [&ch.kraus_ops()[0], &ch.kraus_ops()[1]];
        assert!(a.matmul(b).max_abs_diff(&b.matmul(a)) < 1e-15);
        assert!(ch.is_cptp(1e-12).passed);
    }
}
