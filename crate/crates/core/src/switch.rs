//! The quantum SWITCH of two channels.
//!
//! Joint operators are ordered `target ⊗ control`, so the joint index of
//! target level `t` and control level `c` is `2t + c`. Control `|0⟩` runs
//! channel 1 first, then channel 2; control `|1⟩` runs them the other way.

use serde::Serialize;

use crate::channels::{check_probability, KrausChannel, QuantumMap};
use crate::error::{Error, Result};
use crate::qmat::{partial_trace_matrix, tensor, ComplexMatrix, DensityMatrix, Subsystem};

/// State of the control qubit: weight `p` on `|0⟩`, either as the pure
/// superposition `√p|0⟩ + √(1−p)|1⟩` or as its dephased mixture.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ControlState {
    p: f64,
    coherent: bool,
}

impl ControlState {
    pub fn new(p: f64, coherent: bool) -> Result<Self> {
        check_probability("p", p)?;
        Ok(Self { p, coherent })
    }

    pub fn coherent(p: f64) -> Result<Self> {
        Self::new(p, true)
    }

    pub fn dephased(p: f64) -> Result<Self> {
        Self::new(p, false)
    }

    /// `|+⟩`
    pub fn plus() -> Self {
        Self { p: 0.5, coherent: true }
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn is_coherent(&self) -> bool {
        self.coherent
    }

    /// Off-diagonal element `⟨0|ρ_c|1⟩`.
    pub fn coherence(&self) -> f64 {
        if self.coherent {
            (self.p * (1.0 - self.p)).sqrt()
        } else {
            0.0
        }
    }

    pub fn density(&self) -> DensityMatrix {
        let c = self.coherence();
        let m = ComplexMatrix::from_real(2, 2, &[self.p, c, c, 1.0 - self.p]).expect("2x2");
        DensityMatrix::new(m).expect("control state is valid for p in [0, 1]")
    }
}

/// Output of the SWITCH on `target ⊗ control`, dimension `2d`.
#[derive(Debug, Clone)]
pub struct JointState {
    d: usize,
    state: DensityMatrix,
}

impl JointState {
    pub fn new(d: usize, state: DensityMatrix) -> Result<Self> {
        if state.dim() != 2 * d {
            return Err(Error::dims(2 * d, state.dim()));
        }
        Ok(Self { d, state })
    }

    pub fn target_dim(&self) -> usize {
        self.d
    }

    pub fn state(&self) -> &DensityMatrix {
        &self.state
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        self.state.matrix()
    }

    /// Target operator `⟨a|·|b⟩` for control labels `a, b ∈ {0, 1}`.
    pub fn control_block(&self, a: usize, b: usize) -> ComplexMatrix {
        let m = self.state.matrix();
        ComplexMatrix::from_fn(self.d, self.d, |r, c| m[(2 * r + a, 2 * c + b)])
    }

    pub fn target_marginal(&self) -> DensityMatrix {
        DensityMatrix::new(
            partial_trace_matrix(self.state.matrix(), self.d, 2, Subsystem::A).expect("shape checked"),
        )
        .expect("marginal of a state is a state")
    }

    pub fn control_marginal(&self) -> DensityMatrix {
        DensityMatrix::new(
            partial_trace_matrix(self.state.matrix(), self.d, 2, Subsystem::B).expect("shape checked"),
        )
        .expect("marginal of a state is a state")
    }

    pub fn max_abs_diff(&self, other: &JointState) -> f64 {
        self.state.max_abs_diff(&other.state)
    }
}

fn projector(c: usize) -> ComplexMatrix {
    let mut v = [0.0; 2];
    v[c] = 1.0;
    ComplexMatrix::diag(&v)
}

/// Kraus operators `W_ij = K2_i K1_j ⊗ |0⟩⟨0| + K1_j K2_i ⊗ |1⟩⟨1|`.
pub fn switch_channel(n1: &KrausChannel, n2: &KrausChannel) -> Result<KrausChannel> {
    let d = n1.dim_in();
    if n1.dim_out() != d {
        return Err(Error::dims(format!("square {d}x{d} channel"), format!("{}x{}", n1.dim_out(), d)));
    }
    if n2.dim_in() != d || n2.dim_out() != d {
        return Err(Error::dims(format!("{d}x{d}"), format!("{}x{}", n2.dim_out(), n2.dim_in())));
    }
    let (p0, p1) = (projector(0), projector(1));
    let mut ops = Vec::with_capacity(n1.len() * n2.len());
    for k2 in n2.kraus_ops() {
        for k1 in n1.kraus_ops() {
            let w = &tensor(&k2.matmul(k1), &p0) + &tensor(&k1.matmul(k2), &p1);
            ops.push(w);
        }
    }
    KrausChannel::new(ops)
}

pub fn switch_apply(
    n1: &KrausChannel,
    n2: &KrausChannel,
    rho: &DensityMatrix,
    ctrl: &ControlState,
) -> Result<JointState> {
    let w = switch_channel(n1, n2)?;
    if rho.dim() != n1.dim_in() {
        return Err(Error::dims(n1.dim_in(), rho.dim()));
    }
    let out = w.apply(&rho.tensor(&ctrl.density()))?;
    JointState::new(rho.dim(), out)
}

/// The SWITCH with a fixed control state, viewed as a channel from the
/// target alone to `target ⊗ control`.
#[derive(Debug, Clone)]
pub struct SwitchedChannel {
    switch: KrausChannel,
    control: ControlState,
    control_density: ComplexMatrix,
}

impl SwitchedChannel {
    pub fn new(n1: &KrausChannel, n2: &KrausChannel, control: ControlState) -> Result<Self> {
        Ok(Self {
            switch: switch_channel(n1, n2)?,
            control,
            control_density: control.density().into_matrix(),
        })
    }

    pub fn switch(&self) -> &KrausChannel {
        &self.switch
    }

    pub fn control(&self) -> ControlState {
        self.control
    }
}

impl QuantumMap for SwitchedChannel {
    fn dim_in(&self) -> usize {
        self.switch.dim_in() / 2
    }

    fn dim_out(&self) -> usize {
        self.switch.dim_out()
    }

    fn map_operator(&self, m: &ComplexMatrix) -> ComplexMatrix {
        self.switch.map_operator(&tensor(m, &self.control_density))
    }
}

/// Closed-form SWITCH output for two copies of the depolarizing channel
/// `ρ ↦ qρ + (1−q)I/d`:
///
/// `(1−q)²[(p|0⟩⟨0| + (1−p)|1⟩⟨1|) ⊗ I/d + c(|0⟩⟨1| + |1⟩⟨0|) ⊗ ρ/d²]
///   + 2q(1−q) ρ_c ⊗ I/d + q² ρ_c ⊗ ρ`
///
/// written here in control-first notation, with `c` the control coherence
/// (zero for a dephased control). The returned state is target ⊗ control.
pub fn switched_depolarizing_analytic(
    d: usize,
    q: f64,
    ctrl: &ControlState,
    rho: &DensityMatrix,
) -> Result<JointState> {
    if d < 2 {
        return Err(Error::param("d", format!("dimension must be at least 2, got {d}")));
    }
    check_probability("q", q)?;
    if rho.dim() != d {
        return Err(Error::dims(d, rho.dim()));
    }
    let p = ctrl.p();
    let c = ctrl.coherence();
    let df = d as f64;
    let mixed = ComplexMatrix::identity(d).scale_real(1.0 / df);
    let ctrl_density = ctrl.density().into_matrix();

    let ctrl_diag = ComplexMatrix::diag(&[p, 1.0 - p]);
    let ctrl_flip = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).expect("2x2");

    let a = (1.0 - q).powi(2);
    let mut out = tensor(&mixed, &ctrl_diag).scale_real(a);
    out.add_scaled(&tensor(rho.matrix(), &ctrl_flip), (a * c / (df * df)).into());
    out.add_scaled(&tensor(&mixed, &ctrl_density), (2.0 * q * (1.0 - q)).into());
    out.add_scaled(&tensor(rho.matrix(), &ctrl_density), (q * q).into());
    JointState::new(d, DensityMatrix::new(out)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FourierSign {
    Plus,
    Minus,
}

/// One outcome of measuring the control in `{|+⟩, |−⟩}`.
#[derive(Debug, Clone)]
pub struct FourierOutcome {
    pub sign: FourierSign,
    pub probability: f64,
    /// `⟨±| S(ρ ⊗ ρ_c) |±⟩` on the target, trace equal to `probability`.
    pub unnormalized: ComplexMatrix,
    /// Conditional target state; `None` when the outcome has zero probability.
    pub state: Option<DensityMatrix>,
}

pub fn fourier_measure_control(js: &JointState) -> [FourierOutcome; 2] {
    let b00 = js.control_block(0, 0);
    let b11 = js.control_block(1, 1);
    let cross = &js.control_block(0, 1) + &js.control_block(1, 0);
    let diag = &b00 + &b11;
    let outcome = |sign: FourierSign| {
        let s = if sign == FourierSign::Plus { 0.5 } else { -0.5 };
        let mut m = diag.scale_real(0.5);
        m.add_scaled(&cross, s.into());
        let probability = m.trace().re;
        let state = if probability > 0.0 {
            DensityMatrix::new(m.scale_real(1.0 / probability)).ok()
        } else {
            None
        };
        FourierOutcome {
            sign,
            probability,
            unnormalized: m,
            state,
        }
    };
    [outcome(FourierSign::Plus), outcome(FourierSign::Minus)]
}
