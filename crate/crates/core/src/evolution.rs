//! Non-Hermitian density-operator dynamics.
//!
//! A Hamiltonian `H = H₊ − iΓ` (ħ = 1) drives the non-normalized operator Ω
//! linearly,
//!
//! ```text
//! dΩ/dt = −i[H₊, Ω] − {Γ, Ω}
//! ```
//!
//! and the normalized ρ = Ω / tr Ω through the trace-preserving nonlinear flow
//!
//! ```text
//! dρ/dt = −i[H₊, ρ] − {Γ, ρ} + 2ρ·tr(ρΓ)
//! ```
//!
//! For unit-trace inputs the nonlinear flow is recovered exactly by
//! normalizing the linear solution. Any other input is integrated directly
//! with RK4.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::matrix::{anticommutator, commutator, mat_exp, ComplexMatrix};
use crate::scalar::{i_unit, Real};

/// Hermitian/anti-Hermitian split of a Hamiltonian: `H = h_plus − i·gamma`.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianSplit<T> {
    h_plus: ComplexMatrix<T>,
    gamma: ComplexMatrix<T>,
}

impl<T: Real> HamiltonianSplit<T> {
    /// `h_plus = (h + h†)/2`, `gamma = i(h − h†)/2`.
    pub fn split(h: &ComplexMatrix<T>) -> Self {
        let h_dag = h.adjoint();
        let half = T::lit(0.5);
        let h_plus = (h + &h_dag).scale_real(half);
        let gamma = (h - &h_dag).scale(i_unit::<T>() * half);
        Self { h_plus, gamma }
    }

    /// Assembles a split from its Hermitian parts, checking both.
    pub fn from_parts(h_plus: ComplexMatrix<T>, gamma: ComplexMatrix<T>) -> Result<Self> {
        h_plus.ensure_same_dim(&gamma)?;
        h_plus.ensure_hermitian()?;
        gamma.ensure_hermitian()?;
        Ok(Self { h_plus, gamma })
    }

    pub fn h_plus(&self) -> &ComplexMatrix<T> {
        &self.h_plus
    }

    /// The decay-rate operator Γ.
    pub fn gamma(&self) -> &ComplexMatrix<T> {
        &self.gamma
    }

    pub fn dim(&self) -> usize {
        self.h_plus.dim()
    }

    /// Reassembles `H = H₊ − iΓ`.
    pub fn hamiltonian(&self) -> ComplexMatrix<T> {
        &self.h_plus - &self.gamma.scale(i_unit())
    }

    pub fn is_hermitian_limit(&self) -> bool {
        self.gamma.max_abs() == T::zero()
    }

    fn ensure_dim(&self, m: &ComplexMatrix<T>) -> Result<()> {
        self.h_plus.ensure_same_dim(m)
    }
}

/// A density-like operator together with a flag asserting unit trace.
///
/// Plays the role of Ω (unflagged), ρ (flagged), and of intermediate
/// operator products such as ξΩ, which need not be Hermitian.
#[derive(Debug, Clone, PartialEq)]
pub struct StateMatrix<T> {
    matrix: ComplexMatrix<T>,
    normalized: bool,
}

impl<T: Real> StateMatrix<T> {
    pub fn unnormalized(matrix: ComplexMatrix<T>) -> Self {
        Self {
            matrix,
            normalized: false,
        }
    }

    /// Flags `matrix` as normalized; fails unless |tr − 1| is within tolerance.
    pub fn normalized(matrix: ComplexMatrix<T>) -> Result<Self> {
        let tr = matrix.trace();
        if (tr - Complex::new(T::one(), T::zero())).norm() > T::UNIT_TRACE_TOL {
            return Err(Error::NotUnitTrace { trace: tr.re.as_f64() });
        }
        Ok(Self {
            matrix,
            normalized: true,
        })
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix<T> {
        self.matrix
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn trace(&self) -> Complex<T> {
        self.matrix.trace()
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn has_unit_trace(&self) -> bool {
        (self.trace() - Complex::new(T::one(), T::zero())).norm() <= T::UNIT_TRACE_TOL
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Method {
    /// Ω(t) = U Ω(t₀) U† with U = exp(−iH(t − t₀)).
    #[default]
    ExactExponential,
    Rk4,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagationConfig<T> {
    pub method: Method,
    /// RK4 step, also the spacing of recorded trajectories.
    pub dt: T,
    /// Record every `record_stride`-th step in [`linear_trajectory`].
    pub record_stride: usize,
}

impl<T: Real> Default for PropagationConfig<T> {
    fn default() -> Self {
        Self {
            method: Method::ExactExponential,
            dt: T::lit(1e-3),
            record_stride: 1,
        }
    }
}

impl<T: Real> PropagationConfig<T> {
    pub fn exact() -> Self {
        Self::default()
    }

    pub fn rk4(dt: T) -> Self {
        Self {
            method: Method::Rk4,
            dt,
            record_stride: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > T::zero() && self.dt.is_finite()) {
            return Err(Error::InvalidParameter(format!("dt must be positive, got {}", self.dt)));
        }
        if self.record_stride == 0 {
            return Err(Error::InvalidParameter("record_stride must be at least 1".into()));
        }
        Ok(())
    }
}

/// Which evolution the nonlinear kernel uses for a given input.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NonlinearRoute {
    /// Unit-trace input: normalize the linear solution.
    LinearizingAnsatz,
    /// Any other trace: RK4 on the nonlinear equation itself.
    DirectIntegration,
}

pub fn nonlinear_route<T: Real>(x0: &StateMatrix<T>) -> NonlinearRoute {
    if x0.has_unit_trace() {
        NonlinearRoute::LinearizingAnsatz
    } else {
        NonlinearRoute::DirectIntegration
    }
}

fn linear_rhs_matrix<T: Real>(omega: &ComplexMatrix<T>, ham: &HamiltonianSplit<T>) -> ComplexMatrix<T> {
    let h = &ham.h_plus;
    let g = &ham.gamma;
    let comm = &(h * omega) - &(omega * h);
    let anti = &(g * omega) + &(omega * g);
    &comm.scale(-i_unit::<T>()) - &anti
}

fn nonlinear_rhs_matrix<T: Real>(rho: &ComplexMatrix<T>, ham: &HamiltonianSplit<T>) -> ComplexMatrix<T> {
    let feedback = rho.scale(rho.trace_of_product(&ham.gamma) * T::lit(2.0));
    &linear_rhs_matrix(rho, ham) + &feedback
}

/// Right-hand side of the linear equation for Ω.
pub fn linear_rhs<T: Real>(omega: &StateMatrix<T>, ham: &HamiltonianSplit<T>) -> Result<ComplexMatrix<T>> {
    ham.ensure_dim(omega.matrix())?;
    let comm = commutator(&ham.h_plus, omega.matrix())?;
    let anti = anticommutator(&ham.gamma, omega.matrix())?;
    Ok(&comm.scale(-i_unit::<T>()) - &anti)
}

/// Right-hand side of the nonlinear equation; no trace requirement on `rho`.
pub fn nonlinear_rhs<T: Real>(rho: &StateMatrix<T>, ham: &HamiltonianSplit<T>) -> Result<ComplexMatrix<T>> {
    ham.ensure_dim(rho.matrix())?;
    Ok(nonlinear_rhs_matrix(rho.matrix(), ham))
}

/// `exp(−iH·dt)`; the matching right factor is its adjoint.
pub fn linear_propagator<T: Real>(ham: &HamiltonianSplit<T>, dt: T) -> Result<ComplexMatrix<T>> {
    mat_exp(&ham.hamiltonian().scale(-i_unit::<T>() * dt))
}

fn rk4_step<T: Real>(
    x: &ComplexMatrix<T>,
    h: T,
    f: &impl Fn(&ComplexMatrix<T>) -> ComplexMatrix<T>,
) -> ComplexMatrix<T> {
    let half = h * T::lit(0.5);
    let k1 = f(x);
    let k2 = f(&(x + &k1.scale_real(half)));
    let k3 = f(&(x + &k2.scale_real(half)));
    let k4 = f(&(x + &k3.scale_real(h)));
    let sum = &(&(&k1 + &k2.scale_real(T::lit(2.0))) + &k3.scale_real(T::lit(2.0))) + &k4;
    x + &sum.scale_real(h / T::lit(6.0))
}

/// Number of equal RK4 steps no longer than `dt` covering `span`.
fn step_count<T: Real>(span: T, dt: T) -> usize {
    if span <= T::zero() {
        return 0;
    }
    // the slack keeps span = k·dt from rounding up to k + 1 steps
    let n = (span / dt * (T::one() - T::lit(1e-12))).ceil();
    n.to_usize().unwrap_or(usize::MAX).max(1)
}

fn rk4_advance<T: Real>(
    x: ComplexMatrix<T>,
    t_from: T,
    t_to: T,
    dt: T,
    f: &impl Fn(&ComplexMatrix<T>) -> ComplexMatrix<T>,
) -> Result<ComplexMatrix<T>> {
    let n = step_count(t_to - t_from, dt);
    if n == 0 {
        return Ok(x);
    }
    let h = (t_to - t_from) / T::lit(n as f64);
    let mut x = x;
    for k in 0..n {
        x = rk4_step(&x, h, f);
        if !x.is_finite() {
            return Err(Error::Diverged {
                time: (t_from + h * T::lit((k + 1) as f64)).as_f64(),
            });
        }
    }
    Ok(x)
}

fn check_forward<T: Real>(t0: T, t1: T) -> Result<()> {
    if t1 < t0 || !t0.is_finite() || !t1.is_finite() {
        return Err(Error::BackwardTime {
            from: t0.as_f64(),
            to: t1.as_f64(),
        });
    }
    Ok(())
}

fn exact_linear<T: Real>(
    omega0: &ComplexMatrix<T>,
    ham: &HamiltonianSplit<T>,
    span: T,
    time: T,
) -> Result<ComplexMatrix<T>> {
    if span == T::zero() {
        return Ok(omega0.clone());
    }
    let u = linear_propagator(ham, span).map_err(|_| Error::Diverged { time: time.as_f64() })?;
    let out = &(&u * omega0) * &u.adjoint();
    if out.is_finite() {
        Ok(out)
    } else {
        Err(Error::Diverged { time: time.as_f64() })
    }
}

/// Evolves Ω from `t0` to `t1` under the linear equation. The result is
/// flagged non-normalized.
pub fn propagate_linear<T: Real>(
    omega0: &StateMatrix<T>,
    ham: &HamiltonianSplit<T>,
    t0: T,
    t1: T,
    cfg: &PropagationConfig<T>,
) -> Result<StateMatrix<T>> {
    check_forward(t0, t1)?;
    cfg.validate()?;
    ham.ensure_dim(omega0.matrix())?;
    let m = match cfg.method {
        Method::ExactExponential => exact_linear(omega0.matrix(), ham, t1 - t0, t1)?,
        Method::Rk4 => rk4_advance(omega0.matrix().clone(), t0, t1, cfg.dt, &|x| linear_rhs_matrix(x, ham))?,
    };
    Ok(StateMatrix::unnormalized(m))
}

/// Linear evolution sampled at each of `times` (ascending, all ≥ `t0`).
///
/// The exact method evaluates every sample directly from `t0`; RK4 steps
/// sequentially from one sample to the next.
pub fn propagate_linear_at<T: Real>(
    omega0: &StateMatrix<T>,
    ham: &HamiltonianSplit<T>,
    t0: T,
    times: &[T],
    cfg: &PropagationConfig<T>,
) -> Result<Vec<StateMatrix<T>>> {
    cfg.validate()?;
    ham.ensure_dim(omega0.matrix())?;
    let mut out = Vec::with_capacity(times.len());
    let mut prev_t = t0;
    let mut prev = omega0.matrix().clone();
    for &t in times {
        check_forward(prev_t, t)?;
        let m = match cfg.method {
            Method::ExactExponential => exact_linear(omega0.matrix(), ham, t - t0, t)?,
            Method::Rk4 => rk4_advance(prev, prev_t, t, cfg.dt, &|x| linear_rhs_matrix(x, ham))?,
        };
        prev = m.clone();
        prev_t = t;
        out.push(StateMatrix::unnormalized(m));
    }
    Ok(out)
}

/// Linear trajectory recorded every `record_stride` steps of `dt`, plus the
/// end point.
pub fn linear_trajectory<T: Real>(
    omega0: &StateMatrix<T>,
    ham: &HamiltonianSplit<T>,
    t0: T,
    t1: T,
    cfg: &PropagationConfig<T>,
) -> Result<Vec<(T, StateMatrix<T>)>> {
    check_forward(t0, t1)?;
    cfg.validate()?;
    let n = step_count(t1 - t0, cfg.dt);
    let h = if n == 0 {
        T::zero()
    } else {
        (t1 - t0) / T::lit(n as f64)
    };
    let mut times: Vec<T> = (0..=n)
        .step_by(cfg.record_stride)
        .map(|k| t0 + h * T::lit(k as f64))
        .collect();
    if !n.is_multiple_of(cfg.record_stride) {
        times.push(t1);
    }
    let states = propagate_linear_at(omega0, ham, t0, &times, cfg)?;
    Ok(times.into_iter().zip(states).collect())
}

/// `matrix / tr(matrix)`, flagged normalized.
pub fn normalize<T: Real>(omega: &StateMatrix<T>) -> Result<StateMatrix<T>> {
    let tr = omega.trace();
    if tr.norm() < T::TRACE_FLOOR {
        return Err(Error::ZeroTrace {
            trace: tr.norm().as_f64(),
        });
    }
    let m = omega.matrix().scale(Complex::new(T::one(), T::zero()) / tr);
    Ok(StateMatrix {
        matrix: m,
        normalized: true,
    })
}

pub(crate) fn normalize_at<T: Real>(omega: &StateMatrix<T>, time: T) -> Result<StateMatrix<T>> {
    normalize(omega).map_err(|e| match e {
        Error::ZeroTrace { trace } => Error::TraceSingularity {
            time: time.as_f64(),
            trace,
        },
        other => other,
    })
}

/// RK4 integration of the nonlinear equation, whatever the input trace.
pub fn integrate_nonlinear_direct<T: Real>(
    x0: &StateMatrix<T>,
    ham: &HamiltonianSplit<T>,
    t0: T,
    t1: T,
    dt: T,
) -> Result<StateMatrix<T>> {
    check_forward(t0, t1)?;
    ham.ensure_dim(x0.matrix())?;
    let cfg = PropagationConfig {
        method: Method::Rk4,
        dt,
        record_stride: 1,
    };
    cfg.validate()?;
    let m = rk4_advance(x0.matrix().clone(), t0, t1, dt, &|x| nonlinear_rhs_matrix(x, ham))?;
    let normalized = x0.has_unit_trace();
    Ok(StateMatrix { matrix: m, normalized })
}

/// Evolves `x0` under the nonlinear equation from `t0` to `t1`.
///
/// Unit-trace inputs take the linearizing ansatz with `cfg.method`; anything
/// else is integrated directly with RK4 at `cfg.dt`, regardless of the
/// configured method (see [`nonlinear_route`]).
pub fn propagate_nonlinear<T: Real>(
    x0: &StateMatrix<T>,
    ham: &HamiltonianSplit<T>,
    t0: T,
    t1: T,
    cfg: &PropagationConfig<T>,
) -> Result<StateMatrix<T>> {
    match nonlinear_route(x0) {
        NonlinearRoute::LinearizingAnsatz => {
            let omega = propagate_linear(x0, ham, t0, t1, cfg)?;
            normalize_at(&omega, t1)
        }
        NonlinearRoute::DirectIntegration => {
            cfg.validate()?;
            integrate_nonlinear_direct(x0, ham, t0, t1, cfg.dt)
        }
    }
}

/// Statistical average `tr(ρ·obs)`, normalizing `state` first if needed.
pub fn expectation<T: Real>(state: &StateMatrix<T>, obs: &ComplexMatrix<T>) -> Result<Complex<T>> {
    state.matrix().ensure_same_dim(obs)?;
    if state.is_normalized() {
        Ok(state.matrix().trace_of_product(obs))
    } else {
        Ok(normalize(state)?.matrix().trace_of_product(obs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::pauli::*;
    use approx::assert_abs_diff_eq;

    type M = ComplexMatrix<f64>;

    fn cm(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn rho_x0() -> StateMatrix<f64> {
        StateMatrix::normalized((&identity::<f64>() + &sigma_x()).scale_real(0.5)).unwrap()
    }

    fn pd_split(gamma: f64) -> HamiltonianSplit<f64> {
        let g = &sigma_z::<f64>() + &identity::<f64>().scale_real(gamma);
        HamiltonianSplit::from_parts(sigma_x::<f64>().scale_real(-1.0), g).unwrap()
    }

    fn ed_split(a2: f64) -> HamiltonianSplit<f64> {
        let g = &sigma_y::<f64>().scale_real(a2) + &sigma_z::<f64>();
        HamiltonianSplit::from_parts(sigma_x::<f64>().scale_real(-1.0), g).unwrap()
    }

    #[test]
    fn split_of_hermitian_has_no_gamma() {
        let h = M::from_rows([[cm(1.0, 0.0), cm(2.0, -1.0)], [cm(2.0, 1.0), cm(-3.0, 0.0)]]).unwrap();
        let s = HamiltonianSplit::split(&h);
        assert_eq!(s.gamma(), &M::zeros(2));
        assert_eq!(s.h_plus(), &h);
    }

    #[test]
    fn split_of_anti_hermitian() {
        let h = sigma_z::<f64>().scale(cm(0.0, -1.0));
        let s = HamiltonianSplit::split(&h);
        assert_eq!(s.h_plus(), &M::zeros(2));
        assert_eq!(s.gamma(), &sigma_z());
    }

    #[test]
    fn split_of_pd_model() {
        let g = &sigma_z::<f64>() + &identity();
        let h = &sigma_x::<f64>().scale_real(-1.0) - &g.scale(cm(0.0, 1.0));
        let s = HamiltonianSplit::split(&h);
        assert!(s.h_plus().max_abs_diff(&sigma_x::<f64>().scale_real(-1.0)) < 1e-16);
        assert!(s.gamma().max_abs_diff(&g) < 1e-16);
        assert!(s.hamiltonian().max_abs_diff(&h) < 1e-15);
    }

    #[test]
    fn from_parts_rejects_non_hermitian() {
        let bad = M::from_rows([[cm(0.0, 0.0), cm(1.0, 0.0)], [cm(0.0, 0.0), cm(0.0, 0.0)]]).unwrap();
        assert!(matches!(
            HamiltonianSplit::from_parts(bad, M::zeros(2)),
            Err(Error::NotHermitian { .. })
        ));
        assert!(matches!(
            HamiltonianSplit::from_parts(M::zeros(2), M::zeros(3)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn linear_rhs_examples() {
        let ham = HamiltonianSplit::from_parts(sigma_y::<f64>(), M::zeros(2)).unwrap();
        let half = StateMatrix::unnormalized(M::identity(2).scale_real(0.5));
        assert_eq!(linear_rhs(&half, &ham).unwrap(), M::zeros(2));

        // H₊ = −σx, Γ = σz, Ω = ½(I + σx): Bloch reduction gives −σz
        let r = linear_rhs(&rho_x0(), &pd_split(0.0)).unwrap();
        assert!(r.max_abs_diff(&sigma_z::<f64>().scale_real(-1.0)) < 1e-16);
    }

    #[test]
    fn nonlinear_rhs_examples() {
        let ham = HamiltonianSplit::from_parts(sigma_y::<f64>().scale_real(0.7), M::zeros(2)).unwrap();
        let rho = rho_x0();
        assert_eq!(nonlinear_rhs(&rho, &ham).unwrap(), linear_rhs(&rho, &ham).unwrap());

        let half = StateMatrix::normalized(M::identity(2).scale_real(0.5)).unwrap();
        let r = nonlinear_rhs(&half, &pd_split(0.0)).unwrap();
        assert!(r.max_abs_diff(&sigma_z::<f64>().scale_real(-1.0)) < 1e-16);

        let t = nonlinear_rhs(&rho, &ed_split(0.8)).unwrap().trace();
        assert!(t.norm() < 1e-15);
    }

    #[test]
    fn rhs_dimension_mismatch() {
        let s = StateMatrix::unnormalized(M::identity(3));
        assert!(matches!(
            linear_rhs(&s, &pd_split(0.0)),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            nonlinear_rhs(&s, &pd_split(0.0)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn zero_span_is_identity() {
        let r = propagate_linear(&rho_x0(), &pd_split(1.0), 0.3, 0.3, &PropagationConfig::exact()).unwrap();
        assert_eq!(r.matrix(), rho_x0().matrix());
        assert!(!r.is_normalized());
        let r = propagate_linear(&rho_x0(), &pd_split(1.0), 0.3, 0.3, &PropagationConfig::rk4(1e-3)).unwrap();
        assert_eq!(r.matrix(), rho_x0().matrix());
    }

    #[test]
    fn backward_time_rejected() {
        let err = propagate_linear(&rho_x0(), &pd_split(0.0), 1.0, 0.5, &PropagationConfig::exact());
        assert_eq!(err, Err(Error::BackwardTime { from: 1.0, to: 0.5 }));
        let err = propagate_nonlinear(&rho_x0(), &pd_split(0.0), 1.0, 0.5, &PropagationConfig::exact());
        assert!(matches!(err, Err(Error::BackwardTime { .. })));
    }

    #[test]
    fn dph_omega_11_closed_form() {
        // Γ = −(σy − (σz + I)), Γ-rate 2: (Ω)₁₁ = ½ e^{−2·2·0.5}
        let g = &(&sigma_z::<f64>() + &identity()) - &sigma_y();
        let ham = HamiltonianSplit::from_parts(sigma_x::<f64>().scale_real(-1.0), g).unwrap();
        let om = propagate_linear(&rho_x0(), &ham, 0.0, 0.5, &PropagationConfig::exact()).unwrap();
        assert_abs_diff_eq!(om.matrix()[(0, 0)].re, 0.06766764161830635, epsilon = 1e-14);
    }

    #[test]
    fn ed_trace_growth() {
        let om = propagate_linear(&rho_x0(), &ed_split(1.0), 0.0, 0.5, &PropagationConfig::exact()).unwrap();
        // 2cosh(1) − 1
        assert_abs_diff_eq!(om.trace().re, 2.0861612696304874, epsilon = 1e-13);
        assert_abs_diff_eq!(om.trace().im, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn ed_averages_at_half() {
        let rho = propagate_nonlinear(&rho_x0(), &ed_split(1.0), 0.0, 0.5, &PropagationConfig::exact()).unwrap();
        assert!(rho.is_normalized());
        let s = 2.0 * 1f64.cosh() - 1.0;
        assert_abs_diff_eq!(expectation(&rho, &sigma_x()).unwrap().re, 1.0 / s, epsilon = 1e-13);
        assert_abs_diff_eq!(
            expectation(&rho, &sigma_y()).unwrap().re,
            (1.0 - 1f64.exp()) / s,
            epsilon = 1e-13
        );
        assert_abs_diff_eq!(expectation(&rho, &identity()).unwrap().re, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn hermitian_limit_is_unitary_conjugation() {
        let ham = HamiltonianSplit::from_parts(sigma_x::<f64>().scale_real(-1.0), M::zeros(2)).unwrap();
        let t = 0.7;
        let rho = propagate_nonlinear(&rho_x0(), &ham, 0.0, t, &PropagationConfig::exact()).unwrap();
        let u = mat_exp(&sigma_x::<f64>().scale(cm(0.0, t))).unwrap();
        let expected = &(&u * rho_x0().matrix()) * &u.adjoint();
        assert!(rho.matrix().max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn ansatz_matches_direct_integration() {
        let x0 = StateMatrix::normalized(
            M::from_rows([[cm(0.3, 0.0), cm(0.1, -0.4)], [cm(0.2, 0.7), cm(0.7, 0.0)]]).unwrap(),
        )
        .unwrap();
        let ham = ed_split(0.6);
        let a = propagate_nonlinear(&x0, &ham, 0.0, 1.3, &PropagationConfig::exact()).unwrap();
        let d = integrate_nonlinear_direct(&x0, &ham, 0.0, 1.3, 1e-3).unwrap();
        assert!(a.matrix().max_abs_diff(d.matrix()) < 1e-6);
    }

    #[test]
    fn non_unit_trace_takes_direct_route() {
        let x = StateMatrix::unnormalized(sigma_z::<f64>());
        assert_eq!(nonlinear_route(&x), NonlinearRoute::DirectIntegration);
        assert_eq!(nonlinear_route(&rho_x0()), NonlinearRoute::LinearizingAnsatz);
        // the exact method is overridden here, not rejected
        let r = propagate_nonlinear(&x, &pd_split(0.0), 0.0, 0.2, &PropagationConfig::exact()).unwrap();
        assert!(!r.is_normalized());
        assert!(r.matrix().is_finite());
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(normalize(&rho_x0()).unwrap().matrix(), rho_x0().matrix());
        let three = StateMatrix::unnormalized(rho_x0().matrix().scale_real(3.0));
        assert!(normalize(&three).unwrap().matrix().max_abs_diff(rho_x0().matrix()) < 1e-16);
        let d = StateMatrix::unnormalized(M::from_diagonal(&[2.0, 2.0]));
        assert_eq!(normalize(&d).unwrap().matrix(), &M::identity(2).scale_real(0.5));
        let zero = StateMatrix::unnormalized(sigma_z::<f64>());
        assert!(matches!(normalize(&zero), Err(Error::ZeroTrace { .. })));
        assert!(matches!(expectation(&zero, &sigma_x()), Err(Error::ZeroTrace { .. })));
    }

    #[test]
    fn singular_normalization_reports_time() {
        // Ω(t) ∝ e^{−2γt}; with γ = 40 the trace underflows the floor by t = 0.5
        let g = identity::<f64>().scale_real(40.0);
        let ham = HamiltonianSplit::from_parts(M::zeros(2), g).unwrap();
        let err = propagate_nonlinear(&rho_x0(), &ham, 0.0, 0.5, &PropagationConfig::exact());
        match err {
            Err(Error::TraceSingularity { time, .. }) => assert_eq!(time, 0.5),
            other => panic!("expected singularity, got {other:?}"),
        }
    }

    #[test]
    fn trajectory_records_stride_and_end() {
        let cfg = PropagationConfig {
            method: Method::Rk4,
            dt: 0.1,
            record_stride: 3,
        };
        let traj = linear_trajectory(&rho_x0(), &pd_split(0.0), 0.0, 1.0, &cfg).unwrap();
        let times: Vec<f64> = traj.iter().map(|(t, _)| *t).collect();
        assert_eq!(times.len(), 5);
        assert_abs_diff_eq!(times[3], 0.9, epsilon = 1e-15);
        assert_eq!(times[4], 1.0);
    }

    #[test]
    fn config_validation() {
        let mut cfg = PropagationConfig::<f64>::rk4(0.0);
        assert!(cfg.validate().is_err());
        cfg.dt = 1e-3;
        cfg.record_stride = 0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn normalized_flag_requires_unit_trace() {
        assert!(matches!(
            StateMatrix::normalized(M::identity(2)),
            Err(Error::NotUnitTrace { .. })
        ));
    }
}
