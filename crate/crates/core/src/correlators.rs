//! Time correlation functions under the two non-Hermitian definitions.
//!
//! * Nonlinear (`𝒞`): every segment between operator insertions is evolved by
//!   the trace-preserving nonlinear kernel, and the final trace is taken as is.
//! * Linear (`𝒞⁽ᴸ⁾`): segments are evolved by the linear Ω equation and the
//!   final trace is divided by tr Ω at the last time, with Ω evolved from the
//!   initial state without insertions.
//!
//! Insertions follow the left/right convention: ξ operators multiply from the
//! left, χ operators from the right, and a ξ and a χ at the same time
//! sandwich the operator. Public entry points start the clock at t₀ = 0.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::evolution::{
    integrate_nonlinear_direct, nonlinear_route, propagate_linear, propagate_linear_at, propagate_nonlinear,
    HamiltonianSplit, NonlinearRoute, PropagationConfig, StateMatrix,
};
use crate::matrix::ComplexMatrix;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// ξ: multiplies from the left.
    Left,
    /// χ: multiplies from the right.
    Right,
    /// The same operator on both sides.
    Both,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OperatorEvent<T> {
    pub operator: ComplexMatrix<T>,
    pub time: T,
    pub side: Side,
}

impl<T: Real> OperatorEvent<T> {
    pub fn left(operator: ComplexMatrix<T>, time: T) -> Self {
        Self {
            operator,
            time,
            side: Side::Left,
        }
    }

    pub fn right(operator: ComplexMatrix<T>, time: T) -> Self {
        Self {
            operator,
            time,
            side: Side::Right,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorrelationKind {
    Nonlinear,
    Linear,
}

/// Ordered union of ξ and χ times.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid<T> {
    origin: T,
    tau: Vec<T>,
    sides: Vec<Side>,
}

impl<T: Real> TimeGrid<T> {
    pub fn origin(&self) -> T {
        self.origin
    }

    pub fn tau(&self) -> &[T] {
        &self.tau
    }

    /// Which kinds of insertion happen at each τ entry.
    pub fn sides(&self) -> &[Side] {
        &self.sides
    }

    pub fn len(&self) -> usize {
        self.tau.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tau.is_empty()
    }
}

fn check_times<T: Real>(list: &[T], t0: T, name: &str) -> Result<()> {
    if let Some(bad) = list.iter().find(|&&t| t < t0 || !t.is_finite()) {
        return Err(Error::InvalidTimes(format!("{name} time {bad} precedes origin {t0}")));
    }
    if list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidTimes(format!("{name} times must be strictly increasing")));
    }
    Ok(())
}

/// Merges ξ times `t_list` and χ times `s_list` into one ascending grid.
/// Times within the merge tolerance collapse into a single [`Side::Both`] entry.
pub fn merge_times<T: Real>(t_list: &[T], s_list: &[T], t0: T) -> Result<TimeGrid<T>> {
    check_times(t_list, t0, "left")?;
    check_times(s_list, t0, "right")?;
    let (mut i, mut j) = (0, 0);
    let mut tau = Vec::with_capacity(t_list.len() + s_list.len());
    let mut sides = Vec::with_capacity(tau.capacity());
    while i < t_list.len() || j < s_list.len() {
        match (t_list.get(i), s_list.get(j)) {
            (Some(&t), Some(&s)) if (t - s).abs() <= T::TIME_MERGE_TOL => {
                tau.push(t.min(s));
                sides.push(Side::Both);
                i += 1;
                j += 1;
            }
            (Some(&t), Some(&s)) if t < s => {
                tau.push(t);
                sides.push(Side::Left);
                i += 1;
            }
            (_, Some(&s)) => {
                tau.push(s);
                sides.push(Side::Right);
                j += 1;
            }
            (Some(&t), None) => {
                tau.push(t);
                sides.push(Side::Left);
                i += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    Ok(TimeGrid { origin: t0, tau, sides })
}

/// Operators inserted at one grid time.
#[derive(Debug, Clone, PartialEq)]
pub struct Insertion<T> {
    pub xi: Option<ComplexMatrix<T>>,
    pub chi: Option<ComplexMatrix<T>>,
}

/// `ξD`, `Dχ` or `ξDχ` depending on which operators are present.
pub fn apply_insertion<T: Real>(insertion: &Insertion<T>, d: &StateMatrix<T>) -> Result<StateMatrix<T>> {
    let m = match (&insertion.xi, &insertion.chi) {
        (None, None) => return Err(Error::InvalidTimes("no operator event at this grid time".into())),
        (Some(xi), None) => xi.try_mul(d.matrix())?,
        (None, Some(chi)) => d.matrix().try_mul(chi)?,
        (Some(xi), Some(chi)) => xi.try_mul(d.matrix())?.try_mul(chi)?,
    };
    Ok(StateMatrix::unnormalized(m))
}

fn check_initial<T: Real>(initial: &StateMatrix<T>) -> Result<()> {
    if initial.has_unit_trace() {
        Ok(())
    } else {
        Err(Error::NotUnitTrace {
            trace: initial.trace().re.as_f64(),
        })
    }
}

fn evolve<T: Real>(
    kind: CorrelationKind,
    d: &StateMatrix<T>,
    ham: &HamiltonianSplit<T>,
    from: T,
    to: T,
    cfg: &PropagationConfig<T>,
) -> Result<StateMatrix<T>> {
    match kind {
        CorrelationKind::Nonlinear => propagate_nonlinear(d, ham, from, to, cfg),
        CorrelationKind::Linear => propagate_linear(d, ham, from, to, cfg),
    }
}

fn linear_denominator<T: Real>(
    initial: &StateMatrix<T>,
    ham: &HamiltonianSplit<T>,
    t0: T,
    t: T,
    cfg: &PropagationConfig<T>,
) -> Result<Complex<T>> {
    let tr = propagate_linear(initial, ham, t0, t, cfg)?.trace();
    if tr.norm() < T::TRACE_FLOOR {
        return Err(Error::TraceSingularity {
            time: t.as_f64(),
            trace: tr.norm().as_f64(),
        });
    }
    Ok(tr)
}

/// Two-time correlation `⟨χ(t2) ξ(t1)⟩` of the chosen kind, from t₀ = 0.
#[allow(clippy::too_many_arguments)]
pub fn correlate_two_time<T: Real>(
    kind: CorrelationKind,
    chi: &ComplexMatrix<T>,
    xi: &ComplexMatrix<T>,
    t1: T,
    t2: T,
    initial: &StateMatrix<T>,
    ham: &HamiltonianSplit<T>,
    cfg: &PropagationConfig<T>,
) -> Result<Complex<T>> {
    check_initial(initial)?;
    if t1.is_nan() || t2.is_nan() || t1 < T::zero() || t2 < t1 {
        return Err(Error::InvalidTimes(format!(
            "need t2 ≥ t1 ≥ 0, got t1 = {t1}, t2 = {t2}"
        )));
    }
    let t0 = T::zero();
    let at_t1 = evolve(kind, initial, ham, t0, t1, cfg)?;
    let inserted = StateMatrix::unnormalized(xi.try_mul(at_t1.matrix())?);
    let at_t2 = evolve(kind, &inserted, ham, t1, t2, cfg)?;
    let num = chi.try_mul(at_t2.matrix())?.trace();
    match kind {
        CorrelationKind::Nonlinear => Ok(num),
        CorrelationKind::Linear => Ok(num / linear_denominator(initial, ham, t0, t2, cfg)?),
    }
}

/// Autocorrelation `⟨χ(t) χ(0)⟩`.
pub fn autocorrelate<T: Real>(
    kind: CorrelationKind,
    chi: &ComplexMatrix<T>,
    t: T,
    initial: &StateMatrix<T>,
    ham: &HamiltonianSplit<T>,
    cfg: &PropagationConfig<T>,
) -> Result<Complex<T>> {
    correlate_two_time(kind, chi, chi, T::zero(), t, initial, ham, cfg)
}

/// Multi-time correlation for an arbitrary list of operator events.
///
/// Events on the same side must have distinct times; order in the list does
/// not matter.
pub fn correlate_multitime<T: Real>(
    kind: CorrelationKind,
    events: &[OperatorEvent<T>],
    initial: &StateMatrix<T>,
    ham: &HamiltonianSplit<T>,
    cfg: &PropagationConfig<T>,
) -> Result<Complex<T>> {
    correlate_multitime_from(kind, events, initial, ham, T::zero(), cfg)
}

fn correlate_multitime_from<T: Real>(
    kind: CorrelationKind,
    events: &[OperatorEvent<T>],
    initial: &StateMatrix<T>,
    ham: &HamiltonianSplit<T>,
    t0: T,
    cfg: &PropagationConfig<T>,
) -> Result<Complex<T>> {
    if events.is_empty() {
        return Err(Error::EmptyEvents);
    }
    check_initial(initial)?;

    let mut lefts: Vec<(T, &ComplexMatrix<T>)> = Vec::new();
    let mut rights: Vec<(T, &ComplexMatrix<T>)> = Vec::new();
    for ev in events {
        if matches!(ev.side, Side::Left | Side::Both) {
            lefts.push((ev.time, &ev.operator));
        }
        if matches!(ev.side, Side::Right | Side::Both) {
            rights.push((ev.time, &ev.operator));
        }
    }
    let by_time = |a: &(T, &ComplexMatrix<T>), b: &(T, &ComplexMatrix<T>)| {
        a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal)
    };
    lefts.sort_by(by_time);
    rights.sort_by(by_time);
    let t_list: Vec<T> = lefts.iter().map(|e| e.0).collect();
    let s_list: Vec<T> = rights.iter().map(|e| e.0).collect();
    let grid = merge_times(&t_list, &s_list, t0)?;

    let (mut li, mut ri) = (0, 0);
    let mut d = initial.clone();
    let mut prev = t0;
    for (&tau, &side) in grid.tau.iter().zip(&grid.sides) {
        d = evolve(kind, &d, ham, prev, tau, cfg)?;
        let mut insertion = Insertion { xi: None, chi: None };
        if matches!(side, Side::Left | Side::Both) {
            insertion.xi = Some(lefts[li].1.clone());
            li += 1;
        }
        if matches!(side, Side::Right | Side::Both) {
            insertion.chi = Some(rights[ri].1.clone());
            ri += 1;
        }
        d = apply_insertion(&insertion, &d)?;
        prev = tau;
    }
    let num = d.trace();
    match kind {
        CorrelationKind::Nonlinear => Ok(num),
        CorrelationKind::Linear => Ok(num / linear_denominator(initial, ham, t0, prev, cfg)?),
    }
}

/// `1 − c/cl`; `None` where `cl` vanishes.
pub fn relative_difference<T: Real>(c: Complex<T>, cl: Complex<T>) -> Option<Complex<T>> {
    if cl.norm() <= T::TRACE_FLOOR {
        None
    } else {
        Some(Complex::new(T::one(), T::zero()) - c / cl)
    }
}

fn ratio<T: Real>(num: Complex<T>, den: Complex<T>) -> Option<Complex<T>> {
    if den.norm() < T::TRACE_FLOOR {
        None
    } else {
        Some(num / den)
    }
}

fn check_series_times<T: Real>(times: &[T]) -> Result<()> {
    if times.iter().any(|&t| t.is_nan() || t < T::zero()) || times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidTimes("sample times must be ascending and ≥ 0".into()));
    }
    Ok(())
}

/// `⟨obs⟩` at each sample time; `None` where tr Ω vanishes.
pub fn average_series<T: Real>(
    obs: &ComplexMatrix<T>,
    times: &[T],
    initial: &StateMatrix<T>,
    ham: &HamiltonianSplit<T>,
    cfg: &PropagationConfig<T>,
) -> Result<Vec<Option<Complex<T>>>> {
    check_series_times(times)?;
    initial.matrix().ensure_same_dim(obs)?;
    let omegas = propagate_linear_at(initial, ham, T::zero(), times, cfg)?;
    Ok(omegas
        .iter()
        .map(|om| ratio(om.matrix().trace_of_product(obs), om.trace()))
        .collect())
}

/// Two-time correlation with ξ inserted at t₁ = 0 and χ read at each sample
/// time. Undefined samples (vanishing normalization) are `None`.
#[allow(clippy::too_many_arguments)]
pub fn correlation_series<T: Real>(
    kind: CorrelationKind,
    chi: &ComplexMatrix<T>,
    xi: &ComplexMatrix<T>,
    times: &[T],
    initial: &StateMatrix<T>,
    ham: &HamiltonianSplit<T>,
    cfg: &PropagationConfig<T>,
) -> Result<Vec<Option<Complex<T>>>> {
    check_series_times(times)?;
    check_initial(initial)?;
    let t0 = T::zero();
    let inserted = StateMatrix::unnormalized(xi.try_mul(initial.matrix())?);
    chi.ensure_same_dim(initial.matrix())?;

    match kind {
        CorrelationKind::Linear => {
            let num = propagate_linear_at(&inserted, ham, t0, times, cfg)?;
            let den = propagate_linear_at(initial, ham, t0, times, cfg)?;
            Ok(num
                .iter()
                .zip(&den)
                .map(|(n, d)| ratio(chi.trace_of_product(n.matrix()), d.trace()))
                .collect())
        }
        CorrelationKind::Nonlinear => match nonlinear_route(&inserted) {
            NonlinearRoute::LinearizingAnsatz => {
                let evolved = propagate_linear_at(&inserted, ham, t0, times, cfg)?;
                Ok(evolved
                    .iter()
                    .map(|e| ratio(chi.trace_of_product(e.matrix()), e.trace()))
                    .collect())
            }
            NonlinearRoute::DirectIntegration => {
                let mut out = Vec::with_capacity(times.len());
                let mut x = inserted;
                let mut prev = t0;
                for &t in times {
                    x = integrate_nonlinear_direct(&x, ham, prev, t, cfg.dt)?;
                    prev = t;
                    out.push(Some(chi.trace_of_product(x.matrix())));
                }
                Ok(out)
            }
        },
    }
}
