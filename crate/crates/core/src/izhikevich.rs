//! Izhikevich neuron dynamics and phase-plane analysis.
//!
//! The model is
//!
//! ```text
//! dv/dt = 0.04 v^2 + 5 v + 140 - u + I
//! du/dt = a (b v - u)
//! if v >= 30 mV: v <- c, u <- u + d
//! ```
//!
//! Besides integration this module exposes the pieces of the parameter tuning
//! loop: nullcline intersections, their linearization and classification, and
//! the rheobase current at which the two equilibria merge.

use crate::error::{ensure_finite, Error, Result};

/// Spike cutoff of the membrane potential (mV).
pub const SPIKE_THRESHOLD: f64 = 30.0;

/// Tolerance on trace and determinant below which an equilibrium is degenerate.
pub const DEGENERACY_TOL: f64 = 1e-12;

/// Row-major 2x2 matrix.
pub type Mat2 = [[f64; 2]; 2];

/// The four Izhikevich parameters shared by every neuron of a bundle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NeuronParams {
    /// Recovery time scale (1/ms).
    pub a: f64,
    /// Sensitivity of the recovery variable to sub-threshold fluctuations.
    pub b: f64,
    /// Post-spike reset potential (mV).
    pub c: f64,
    /// Post-spike recovery increment.
    pub d: f64,
}

impl NeuronParams {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let params = NeuronParams { a, b, c, d };
        params.validate()?;
        Ok(params)
    }

    /// Fast-spiking cells, used for the sensory layer.
    pub const FAST_SPIKING: NeuronParams = NeuronParams {
        a: 0.1,
        b: 0.2,
        c: -65.0,
        d: 2.0,
    };

    /// Tuned motor-layer cells.
    pub const MOTOR: NeuronParams = NeuronParams {
        a: 0.02,
        b: 0.15,
        c: -55.0,
        d: 6.0,
    };

    /// Starting point of the motor-layer tuning loop (integrator cells).
    pub const INTEGRATOR: NeuronParams = NeuronParams {
        a: 0.02,
        b: -0.1,
        c: -55.0,
        d: 6.0,
    };

    pub fn validate(&self) -> Result<()> {
        for (name, value) in [("a", self.a), ("b", self.b), ("c", self.c), ("d", self.d)] {
            ensure_finite(value, name)?;
        }
        if self.a <= 0.0 {
            return Err(Error::Config(format!("a must be positive, got {}", self.a)));
        }
        if self.c >= SPIKE_THRESHOLD {
            return Err(Error::Config(format!(
                "reset potential c = {} must lie below the {SPIKE_THRESHOLD} mV threshold",
                self.c
            )));
        }
        Ok(())
    }

    /// Resting state used when a neuron is (re)initialised: v = c, u = b c.
    pub fn resting_state(&self) -> NeuronState {
        NeuronState {
            v: self.c,
            u: self.b * self.c,
            last_spike: None,
        }
    }

    /// Smallest constant current that produces continuous spiking.
    pub fn rheobase(&self) -> f64 {
        rheobase(self)
    }
}

/// Dynamic state of one neuron.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NeuronState {
    pub v: f64,
    pub u: f64,
    pub last_spike: Option<f64>,
}

impl NeuronState {
    pub fn new(v: f64, u: f64) -> Self {
        NeuronState {
            v,
            u,
            last_spike: None,
        }
    }

    /// Advances the neuron by `dt` ms under constant input `i_ext`; `now` is
    /// the time stamped on a spike emitted during this step.
    pub fn step(
        self,
        params: &NeuronParams,
        i_ext: f64,
        dt: f64,
        now: f64,
    ) -> Result<(NeuronState, bool)> {
        ensure_finite(self.v, "membrane potential")?;
        ensure_finite(self.u, "recovery variable")?;
        ensure_finite(i_ext, "input current")?;
        ensure_finite(now, "time")?;
        if !(dt > 0.0 && dt <= 1.0) {
            return Err(Error::NumericDomain(format!(
                "time step must lie in (0, 1] ms, got {dt}"
            )));
        }
        let (v, u, spiked) = integrate(self.v, self.u, params, i_ext, dt);
        let last_spike = if spiked { Some(now) } else { self.last_spike };
        Ok((NeuronState { v, u, last_spike }, spiked))
    }
}

/// One forward-Euler step: two half steps on `v`, one full step on `u`.
///
/// On a spike `v` is reset to `c` and `u` is the pre-step value plus `d`.
#[inline]
pub(crate) fn integrate(v: f64, u: f64, p: &NeuronParams, i_ext: f64, dt: f64) -> (f64, f64, bool) {
    let half = 0.5 * dt;
    let mut v_next = v + half * (0.04 * v * v + 5.0 * v + 140.0 - u + i_ext);
    if v_next < SPIKE_THRESHOLD {
        v_next += half * (0.04 * v_next * v_next + 5.0 * v_next + 140.0 - u + i_ext);
    }
    if v_next >= SPIKE_THRESHOLD {
        // Capped at the threshold, then reset.
        return (p.c, u + p.d, true);
    }
    let u_next = u + dt * p.a * (p.b * v_next - u);
    (v_next, u_next, false)
}

/// Right-hand side of the membrane equation.
pub fn dv_dt(v: f64, u: f64, i_ext: f64) -> f64 {
    0.04 * v * v + 5.0 * v + 140.0 - u + i_ext
}

/// Right-hand side of the recovery equation.
pub fn du_dt(params: &NeuronParams, v: f64, u: f64) -> f64 {
    params.a * (params.b * v - u)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StabilityKind {
    StableNode,
    StableFocus,
    Saddle,
    UnstableNode,
    UnstableFocus,
    Degenerate,
}

impl StabilityKind {
    pub fn is_stable(self) -> bool {
        matches!(self, StabilityKind::StableNode | StabilityKind::StableFocus)
    }

    pub fn label(self) -> &'static str {
        match self {
            StabilityKind::StableNode => "stable node",
            StabilityKind::StableFocus => "stable focus",
            StabilityKind::Saddle => "saddle",
            StabilityKind::UnstableNode => "unstable node",
            StabilityKind::UnstableFocus => "unstable focus",
            StabilityKind::Degenerate => "degenerate",
        }
    }
}

impl std::fmt::Display for StabilityKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// An intersection of the v- and u-nullclines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Equilibrium {
    pub v_star: f64,
    pub u_star: f64,
    pub kind: StabilityKind,
}

/// Intersections of the nullclines for constant input `i_ext`, sorted by `v*`.
///
/// They are the real roots of `0.04 v^2 + (5 - b) v + 140 + I = 0` with
/// `u* = b v*`. Above the rheobase there are none.
pub fn equilibria(params: &NeuronParams, i_ext: f64) -> Vec<Equilibrium> {
    let qa = 0.04;
    let qb = 5.0 - params.b;
    let qc = 140.0 + i_ext;
    let disc = qb * qb - 4.0 * qa * qc;
    let scale = (qb * qb).max((4.0 * qa * qc).abs()).max(1.0);
    let make = |v: f64, kind: Option<StabilityKind>| Equilibrium {
        v_star: v,
        u_star: params.b * v,
        kind: kind.unwrap_or_else(|| classify(&linearize(params, v))),
    };
    if disc.abs() <= 1e-12 * scale {
        return vec![make(-qb / (2.0 * qa), Some(StabilityKind::Degenerate))];
    }
    if disc < 0.0 {
        return Vec::new();
    }
    // Numerically stable pairing of the two roots.
    let q = -0.5 * (qb + qb.signum() * disc.sqrt());
    let (r1, r2) = if q == 0.0 {
        let r = (disc.sqrt()) / (2.0 * qa);
        (-r, r)
    } else {
        (q / qa, qc / q)
    };
    let (lo, hi) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
    vec![make(lo, None), make(hi, None)]
}

/// Jacobian of the vector field at an equilibrium potential `v*`.
pub fn linearize(params: &NeuronParams, v_star: f64) -> Mat2 {
    [
        [0.08 * v_star + 5.0, -1.0],
        [params.a * params.b, -params.a],
    ]
}

/// Classifies a planar fixed point from the trace and determinant of its
/// linearization.
pub fn classify(l: &Mat2) -> StabilityKind {
    let tr = l[0][0] + l[1][1];
    let det = l[0][0] * l[1][1] - l[0][1] * l[1][0];
    if det.abs() < DEGENERACY_TOL {
        StabilityKind::Degenerate
    } else if det < 0.0 {
        StabilityKind::Saddle
    } else if tr.abs() < DEGENERACY_TOL {
        StabilityKind::Degenerate
    } else if tr < 0.0 {
        if tr * tr < 4.0 * det {
            StabilityKind::StableFocus
        } else {
            StabilityKind::StableNode
        }
    } else if tr * tr < 4.0 * det {
        StabilityKind::UnstableFocus
    } else {
        StabilityKind::UnstableNode
    }
}

/// Current at which the nullclines touch: `(5 - b)^2 / (4 * 0.04) - 140`.
pub fn rheobase(params: &NeuronParams) -> f64 {
    let qb = 5.0 - params.b;
    qb * qb / 0.16 - 140.0
}

/// Result of the stability check run at each pass of the tuning loop.
#[derive(Debug, Clone, PartialEq)]
pub struct TuningReport {
    pub params: NeuronParams,
    pub i_ext: f64,
    pub rheobase: f64,
    pub equilibria: Vec<Equilibrium>,
}

impl TuningReport {
    pub fn analyze(params: NeuronParams, i_ext: f64) -> Result<Self> {
        params.validate()?;
        ensure_finite(i_ext, "input current")?;
        Ok(TuningReport {
            params,
            i_ext,
            rheobase: rheobase(&params),
            equilibria: equilibria(&params, i_ext),
        })
    }

    /// True when the neuron rests at a stable equilibrium for this input.
    pub fn is_quiescent(&self) -> bool {
        self.equilibria.iter().any(|e| e.kind.is_stable())
    }

    pub fn verdict(&self) -> &'static str {
        match self.equilibria.len() {
            0 => "no equilibria (tonic firing)",
            1 => "saddle-node: at the verge of firing",
            _ if self.is_quiescent() => "resting: attractor/repeller pair present",
            _ => "no stable rest state",
        }
    }
}

impl std::fmt::Display for TuningReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let p = &self.params;
        writeln!(f, "params: a = {}, b = {}, c = {}, d = {}", p.a, p.b, p.c, p.d)?;
        writeln!(f, "input current: {}", self.i_ext)?;
        writeln!(f, "rheobase I* = {:.6}", self.rheobase)?;
        if self.equilibria.is_empty() {
            writeln!(f, "equilibria: none")?;
        } else {
            writeln!(f, "equilibria:")?;
            for e in &self.equilibria {
                writeln!(f, "  v* = {:.6}  u* = {:.6}  {}", e.v_star, e.u_star, e.kind)?;
            }
        }
        write!(f, "verdict: {}", self.verdict())
    }
}

/// Counts spikes emitted under a constant current over `duration_ms`,
/// ignoring those before `transient_ms`.
pub fn count_spikes(
    params: &NeuronParams,
    i_ext: f64,
    duration_ms: f64,
    transient_ms: f64,
    dt: f64,
) -> usize {
    let mut state = params.resting_state();
    let steps = (duration_ms / dt).round() as usize;
    let mut count = 0;
    for k in 0..steps {
        let (v, u, spiked) = integrate(state.v, state.u, params, i_ext, dt);
        state.v = v;
        state.u = u;
        if spiked && (k as f64 + 1.0) * dt > transient_ms {
            count += 1;
        }
    }
    count
}
