//! Two-level models with `H₊ = −Δσx` and three decay operators, their
//! reference initial states, and closed-form oracles for averages and
//! correlations.
//!
//! | model | Γ |
//! |-------|---|
//! | `ed`  | `Δ(a₂σy + σz + γI)` |
//! | `pd`  | `Δ(σz + γI)` |
//! | `dph` | `−Δ[σy − γ(σz + I)]` |
//!
//! Every `c₁ cosh A + c₂ sinh A + k` in the closed forms is evaluated as
//! `((c₁+c₂)·expm1(A) + (c₁−c₂)·expm1(−A))/2 + (c₁ + k)`, with `c₁ + k`
//! simplified by hand, so neither small nor large `A` loses digits.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;

use crate::correlators::{average_series, correlation_series, CorrelationKind};
use crate::error::{Error, Result};
use crate::evolution::{HamiltonianSplit, PropagationConfig, StateMatrix};
use crate::matrix::{pauli, ComplexMatrix};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Model {
    /// Exponential decay towards the asymptote.
    Ed,
    /// Polynomial decay.
    Pd,
    /// Asymptotic dephasing.
    Dph,
}

impl Model {
    pub const ALL: [Model; 3] = [Model::Ed, Model::Pd, Model::Dph];

    pub fn name(self) -> &'static str {
        match self {
            Model::Ed => "ed",
            Model::Pd => "pd",
            Model::Dph => "dph",
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ed" => Ok(Model::Ed),
            "pd" => Ok(Model::Pd),
            "dph" => Ok(Model::Dph),
            other => Err(Error::InvalidParameter(format!("unknown model `{other}`"))),
        }
    }
}

/// Which Pauli component the initial state is polarized along.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InitialFamily {
    /// `ρ_x = ½(I + σx − νσy)`
    X,
    /// `ρ_z = ½(I + σz − νσy)`
    Z,
}

impl InitialFamily {
    pub fn name(self) -> &'static str {
        match self {
            InitialFamily::X => "x",
            InitialFamily::Z => "z",
        }
    }
}

impl fmt::Display for InitialFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for InitialFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "x" => Ok(InitialFamily::X),
            "z" => Ok(InitialFamily::Z),
            other => Err(Error::InvalidParameter(format!("unknown initial family `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TlsScenario<T> {
    pub model: Model,
    /// Rate Δ, must be positive.
    pub delta: T,
    /// σy weight of the ed decay operator; ignored by the other models.
    pub a2: T,
    pub gamma: T,
    /// Off-shell σy admixture of the initial state.
    pub nu: T,
    pub init: InitialFamily,
}

impl<T: Real> TlsScenario<T> {
    /// Δ = 1 with every other parameter zero.
    pub fn new(model: Model, init: InitialFamily) -> Self {
        Self {
            model,
            delta: T::one(),
            a2: T::zero(),
            gamma: T::zero(),
            nu: T::zero(),
            init,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.delta <= T::zero() || !self.delta.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "delta must be positive, got {}",
                self.delta
            )));
        }
        for (name, v) in [("a2", self.a2), ("gamma", self.gamma), ("nu", self.nu)] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} must be finite")));
            }
        }
        Ok(())
    }

    /// Exponential rate of the model: α = 2a₂Δ (ed), Γ = 2γΔ (dph); pd has none.
    pub fn rate(&self) -> Option<T> {
        let two = T::lit(2.0);
        match self.model {
            Model::Ed => Some(two * self.a2 * self.delta),
            Model::Pd => None,
            Model::Dph => Some(two * self.gamma * self.delta),
        }
    }

    pub fn hamiltonian(&self) -> Result<HamiltonianSplit<T>> {
        build_model(self)
    }

    pub fn initial_state(&self) -> StateMatrix<T> {
        initial_state(self.init, self.nu)
    }
}

pub fn build_model<T: Real>(sc: &TlsScenario<T>) -> Result<HamiltonianSplit<T>> {
    sc.validate()?;
    let d = sc.delta;
    let id = pauli::identity::<T>();
    let h_plus = pauli::sigma_x::<T>().scale_real(-d);
    let gamma = match sc.model {
        Model::Ed => &(&pauli::sigma_y::<T>().scale_real(sc.a2) + &pauli::sigma_z()) + &id.scale_real(sc.gamma),
        Model::Pd => &pauli::sigma_z::<T>() + &id.scale_real(sc.gamma),
        Model::Dph => {
            let shifted = (&pauli::sigma_z::<T>() + &id).scale_real(sc.gamma);
            &shifted - &pauli::sigma_y()
        }
    }
    .scale_real(d);
    HamiltonianSplit::from_parts(h_plus, gamma)
}

pub fn initial_state<T: Real>(init: InitialFamily, nu: T) -> StateMatrix<T> {
    let axis = match init {
        InitialFamily::X => pauli::sigma_x::<T>(),
        InitialFamily::Z => pauli::sigma_z::<T>(),
    };
    let m = &(&pauli::identity::<T>() + &axis) - &pauli::sigma_y::<T>().scale_real(nu);
    StateMatrix::normalized(m.scale_real(T::lit(0.5))).expect("trace is one by construction")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn matrix<T: Real>(self) -> ComplexMatrix<T> {
        match self {
            Pauli::I => pauli::identity(),
            Pauli::X => pauli::sigma_x(),
            Pauli::Y => pauli::sigma_y(),
            Pauli::Z => pauli::sigma_z(),
        }
    }

    pub fn letter(self) -> char {
        match self {
            Pauli::I => 'i',
            Pauli::X => 'x',
            Pauli::Y => 'y',
            Pauli::Z => 'z',
        }
    }

    pub fn from_letter(c: char) -> Option<Self> {
        match c.to_ascii_lowercase() {
            'i' => Some(Pauli::I),
            'x' => Some(Pauli::X),
            'y' => Some(Pauli::Y),
            'z' => Some(Pauli::Z),
            _ => None,
        }
    }
}

/// What to compute numerically for one output series.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Probe {
    Average(Pauli),
    Correlation {
        kind: CorrelationKind,
        xi: Pauli,
        chi: Pauli,
    },
}

impl Probe {
    /// Evaluates the probe at each sample time; `None` marks a vanishing
    /// normalization.
    pub fn evaluate<T: Real>(
        self,
        times: &[T],
        initial: &StateMatrix<T>,
        ham: &HamiltonianSplit<T>,
        cfg: &PropagationConfig<T>,
    ) -> Result<Vec<Option<Complex<T>>>> {
        match self {
            Probe::Average(p) => average_series(&p.matrix(), times, initial, ham, cfg),
            Probe::Correlation { kind, xi, chi } => {
                correlation_series(kind, &chi.matrix(), &xi.matrix(), times, initial, ham, cfg)
            }
        }
    }
}

/// The closed-form series the oracle knows about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Series {
    Sx,
    Sy,
    Sz,
    Cxx,
    CxxL,
    Czz,
    CzzL,
    Czx,
    CzxL,
    Czy,
    CzyL,
}

impl Series {
    pub const ALL: [Series; 11] = [
        Series::Sx,
        Series::Sy,
        Series::Sz,
        Series::Cxx,
        Series::CxxL,
        Series::Czz,
        Series::CzzL,
        Series::Czx,
        Series::CzxL,
        Series::Czy,
        Series::CzyL,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Series::Sx => "sx",
            Series::Sy => "sy",
            Series::Sz => "sz",
            Series::Cxx => "c_xx",
            Series::CxxL => "c_xx_l",
            Series::Czz => "c_zz",
            Series::CzzL => "c_zz_l",
            Series::Czx => "c_zx",
            Series::CzxL => "c_zx_l",
            Series::Czy => "c_zy",
            Series::CzyL => "c_zy_l",
        }
    }

    pub fn probe(self) -> Probe {
        use CorrelationKind::{Linear, Nonlinear};
        let corr = |kind, xi, chi| Probe::Correlation { kind, xi, chi };
        match self {
            Series::Sx => Probe::Average(Pauli::X),
            Series::Sy => Probe::Average(Pauli::Y),
            Series::Sz => Probe::Average(Pauli::Z),
            Series::Cxx => corr(Nonlinear, Pauli::X, Pauli::X),
            Series::CxxL => corr(Linear, Pauli::X, Pauli::X),
            Series::Czz => corr(Nonlinear, Pauli::Z, Pauli::Z),
            Series::CzzL => corr(Linear, Pauli::Z, Pauli::Z),
            Series::Czx => corr(Nonlinear, Pauli::Z, Pauli::X),
            Series::CzxL => corr(Linear, Pauli::Z, Pauli::X),
            Series::Czy => corr(Nonlinear, Pauli::Z, Pauli::Y),
            Series::CzyL => corr(Linear, Pauli::Z, Pauli::Y),
        }
    }

    /// Series with a closed form for the given initial family.
    pub fn for_family(init: InitialFamily) -> &'static [Series] {
        match init {
            InitialFamily::X => &[Series::Sx, Series::Sy, Series::Sz, Series::Cxx, Series::CxxL],
            InitialFamily::Z => &[
                Series::Sx,
                Series::Sy,
                Series::Sz,
                Series::Czz,
                Series::CzzL,
                Series::Czx,
                Series::CzxL,
                Series::Czy,
                Series::CzyL,
            ],
        }
    }
}

/// One oracle value. `value` is `None` at a denominator zero. When the
/// printed expression is known to be wrong, `printed` holds it and `value`
/// holds the corrected form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleEntry<T> {
    pub value: Option<Complex<T>>,
    pub printed: Option<Complex<T>>,
}

impl<T: Real> OracleEntry<T> {
    fn of(value: Option<Complex<T>>) -> Self {
        Self { value, printed: None }
    }

    fn corrected(value: Option<Complex<T>>, printed: Complex<T>) -> Self {
        Self {
            value,
            printed: Some(printed),
        }
    }

    pub fn is_erratum(&self) -> bool {
        self.printed.is_some()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleSample<T> {
    /// Sample time; `+∞` for asymptotes.
    pub t: T,
    pub sx: Option<OracleEntry<T>>,
    pub sy: Option<OracleEntry<T>>,
    pub sz: Option<OracleEntry<T>>,
    pub c_xx: Option<OracleEntry<T>>,
    pub c_xx_l: Option<OracleEntry<T>>,
    pub c_zz: Option<OracleEntry<T>>,
    pub c_zz_l: Option<OracleEntry<T>>,
    pub c_zx: Option<OracleEntry<T>>,
    pub c_zx_l: Option<OracleEntry<T>>,
    pub c_zy: Option<OracleEntry<T>>,
    pub c_zy_l: Option<OracleEntry<T>>,
}

impl<T: Real> OracleSample<T> {
    fn empty(t: T) -> Self {
        Self {
            t,
            sx: None,
            sy: None,
            sz: None,
            c_xx: None,
            c_xx_l: None,
            c_zz: None,
            c_zz_l: None,
            c_zx: None,
            c_zx_l: None,
            c_zy: None,
            c_zy_l: None,
        }
    }

    pub fn get(&self, s: Series) -> Option<&OracleEntry<T>> {
        match s {
            Series::Sx => self.sx.as_ref(),
            Series::Sy => self.sy.as_ref(),
            Series::Sz => self.sz.as_ref(),
            Series::Cxx => self.c_xx.as_ref(),
            Series::CxxL => self.c_xx_l.as_ref(),
            Series::Czz => self.c_zz.as_ref(),
            Series::CzzL => self.c_zz_l.as_ref(),
            Series::Czx => self.c_zx.as_ref(),
            Series::CzxL => self.c_zx_l.as_ref(),
            Series::Czy => self.c_zy.as_ref(),
            Series::CzyL => self.c_zy_l.as_ref(),
        }
    }

    fn slot(&mut self, s: Series) -> &mut Option<OracleEntry<T>> {
        match s {
            Series::Sx => &mut self.sx,
            Series::Sy => &mut self.sy,
            Series::Sz => &mut self.sz,
            Series::Cxx => &mut self.c_xx,
            Series::CxxL => &mut self.c_xx_l,
            Series::Czz => &mut self.c_zz,
            Series::CzzL => &mut self.c_zz_l,
            Series::Czx => &mut self.c_zx,
            Series::CzxL => &mut self.c_zx_l,
            Series::Czy => &mut self.c_zy,
            Series::CzyL => &mut self.c_zy_l,
        }
    }

    fn set(&mut self, s: Series, v: Option<Complex<T>>) {
        *self.slot(s) = Some(OracleEntry::of(v));
    }

    fn set_real(&mut self, s: Series, v: T) {
        self.set(s, Some(Complex::new(v, T::zero())));
    }

    /// Populated series, in [`Series::ALL`] order.
    pub fn entries(&self) -> Vec<(Series, OracleEntry<T>)> {
        Series::ALL
            .iter()
            .filter_map(|&s| self.get(s).map(|e| (s, *e)))
            .collect()
    }
}

type C<T> = Complex<T>;

fn cr<T: Real>(x: T) -> C<T> {
    Complex::new(x, T::zero())
}

fn ci<T: Real>(x: T) -> C<T> {
    Complex::new(T::zero(), x)
}

/// `c1(cosh A − 1) + c2 sinh A`
fn hyp_m1<T: Real>(c1: C<T>, c2: C<T>, a: T) -> C<T> {
    let half = T::lit(0.5);
    ((c1 + c2) * a.exp_m1() + (c1 - c2) * (-a).exp_m1()) * half
}

fn div<T: Real>(num: C<T>, den: C<T>) -> Option<C<T>> {
    if den.norm() <= T::TRACE_FLOOR {
        return None;
    }
    let q = num / den;
    (q.re.is_finite() && q.im.is_finite()).then_some(q)
}

/// Closed-form averages and correlations at time `t ≥ 0`. Denominator zeros
/// leave the affected entries undefined.
pub fn oracle_sample<T: Real>(sc: &TlsScenario<T>, t: T) -> OracleSample<T> {
    let mut out = OracleSample::empty(t);
    match sc.model {
        Model::Ed => ed_sample(sc, t, &mut out),
        Model::Pd => pd_sample(sc, t, &mut out),
        Model::Dph => dph_sample(sc, t, &mut out),
    }
    out
}

fn ed_sample<T: Real>(sc: &TlsScenario<T>, t: T, out: &mut OracleSample<T>) {
    let one = T::one();
    let (a2, nu) = (sc.a2, sc.nu);
    let a = T::lit(2.0) * a2 * sc.delta * t;
    let q = a2 * a2;
    let em = (-a).exp_m1();
    let s = |b: T| hyp_m1(cr(q - b + one), cr(q * b), a) + cr(q);
    let tt = |b: T| hyp_m1(cr(q - a2 - b + one), cr(-a2 * (one - a2 * b)), a) + cr(q);

    match sc.init {
        InitialFamily::X => {
            let s_nu = s(nu);
            out.set(Series::Sx, div(cr(q), s_nu));
            let sy_num = hyp_m1(cr(nu * (one - q) - one), cr(-q), a) - cr(nu * q);
            out.set(Series::Sy, div(sy_num, s_nu));
            out.set(Series::Sz, div(cr(a2 * (one - nu) * em), s_nu));
            let inu = ci(nu * a2);
            let c_den = hyp_m1(cr(q + one) + inu, inu, a) + cr(q);
            out.set(Series::Cxx, div(cr(q), c_den));
            out.set(Series::CxxL, div(cr(q), s_nu));
        }
        InitialFamily::Z => {
            let (t0, t_nu) = (tt(T::zero()), tt(nu));
            out.set(Series::Sx, div(cr(T::zero()), t_nu));
            let h = hyp_m1(cr(one - nu * (a2 + one)), cr(-a2), a);
            out.set(Series::Sy, div(h * (a2 - one) - cr(nu * q), t_nu));
            out.set(Series::Sz, div(cr(a2 * ((one - nu) * em + a2)), t_nu));
            let zz = cr(a2 * (em + a2));
            let zx = ci(q * nu);
            let zy = hyp_m1(cr(one), cr(-a2), a) * (a2 - one);
            set_pairs(out, [(zz, t0, t_nu), (zx, t0, t_nu), (zy, t0, t_nu)]);
        }
    }
}

fn pd_sample<T: Real>(sc: &TlsScenario<T>, t: T, out: &mut OracleSample<T>) {
    let (one, two) = (T::one(), T::lit(2.0));
    let (d, nu) = (sc.delta, sc.nu);
    let s = |b: T| cr(two * d * d * (one - b) * t * t + one);
    let tt = |b: T| cr(two * d * (d * (one - b) * t - one) * t + one);

    match sc.init {
        InitialFamily::X => {
            let s_nu = s(nu);
            *out.slot(Series::Sx) = Some(OracleEntry::corrected(div(cr(one), s_nu), cr(T::zero())));
            out.set(Series::Sy, div(cr(one - nu), s_nu).map(|v| v - cr(one)));
            out.set(Series::Sz, div(cr(two * d * (nu - one) * t), s_nu));
            out.set(Series::Cxx, div(cr(one), s(T::zero()) + ci(two * nu * d * t)));
            out.set(Series::CxxL, div(cr(one), s_nu));
        }
        InitialFamily::Z => {
            let (t0, t_nu) = (tt(T::zero()), tt(nu));
            out.set(Series::Sx, div(cr(T::zero()), t_nu));
            out.set(Series::Sy, div(cr(one - nu), t_nu).map(|v| v - cr(one)));
            out.set(Series::Sz, div(cr(one - two * d * (one - nu) * t), t_nu));
            let zz = cr(one - two * d * t);
            let zx = ci(nu);
            let zy = cr(two * d * (one - d * t) * t);
            set_pairs(out, [(zz, t0, t_nu), (zx, t0, t_nu), (zy, t0, t_nu)]);
        }
    }
}

fn dph_sample<T: Real>(sc: &TlsScenario<T>, t: T, out: &mut OracleSample<T>) {
    let (one, two) = (T::one(), T::lit(2.0));
    let (g, nu) = (sc.gamma, sc.nu);
    let a = two * g * sc.delta * t;
    let g2 = g * g;
    let gt2 = g2 + one;
    let em = (-a).exp_m1();
    let decay = (-a).exp();
    let s = |b: T| hyp_m1(cr(gt2 - b * g), cr(-b * g), a) + cr(g2);
    let tt = |b: T| hyp_m1(cr(gt2 - b * g + one), cr(-g * (g + b)), a) + cr(g2);

    match sc.init {
        InitialFamily::X => {
            let s_nu = s(nu);
            out.set(Series::Sx, div(cr(g2), s_nu));
            out.set(Series::Sy, div(cr(g * (-nu * g - em)), s_nu));
            out.set(Series::Sz, div(cr(g2 * decay), s_nu).map(|v| v - cr(one)));
            let c_den = s(T::zero()) + hyp_m1(cr(-one), cr(g2), a) * ci(nu);
            out.set(Series::Cxx, div(cr(g2), c_den));
            out.set(Series::CxxL, div(cr(g2), s_nu));
        }
        InitialFamily::Z => {
            let (t0, t_nu) = (tt(T::zero()), tt(nu));
            out.set(Series::Sx, div(cr(T::zero()), t_nu));
            out.set(Series::Sy, div(cr(g * (-nu * g - two * em)), t_nu));
            out.set(Series::Sz, div(cr(two * g2 * decay), t_nu).map(|v| v - cr(one)));
            // 𝒞_zz = (T₀ − 4(cosh A − 1))/T₀
            let zz = t0 - hyp_m1(cr(T::lit(4.0)), cr(T::zero()), a);
            let zx = ci(g2 * nu);
            let zy = cr(-two * g * em);
            set_pairs(out, [(zz, t0, t_nu), (zx, t0, t_nu), (zy, t0, t_nu)]);
        }
    }
}

/// z-family correlations share numerators: 𝒞 divides by T₀, 𝒞⁽ᴸ⁾ by T_ν.
fn set_pairs<T: Real>(out: &mut OracleSample<T>, parts: [(C<T>, C<T>, C<T>); 3]) {
    let slots = [
        (Series::Czz, Series::CzzL),
        (Series::Czx, Series::CzxL),
        (Series::Czy, Series::CzyL),
    ];
    for ((c, cl), (num, t0, t_nu)) in slots.into_iter().zip(parts) {
        out.set(c, div(num, t0));
        out.set(cl, div(num, t_nu));
    }
}

fn heaviside_neg<T: Real>(x: T) -> bool {
    x < T::zero()
}

/// Closed-form `t → +∞` limits.
///
/// Errors with [`Error::DegenerateLimit`] where the limit formulas do not
/// apply: zero rate (α = 0 or Γ = 0), ed with ρ_z at |a₂| = 1, and pd with
/// ρ_x at ν = 1 (where ⟨σx⟩ ≡ 1).
pub fn oracle_asymptote<T: Real>(sc: &TlsScenario<T>) -> Result<OracleSample<T>> {
    sc.validate()?;
    let (zero, one, two) = (T::zero(), T::one(), T::lit(2.0));
    let nu = sc.nu;
    let mut out = OracleSample::empty(T::infinity());
    let x_family = sc.init == InitialFamily::X;

    match sc.model {
        Model::Ed => {
            let alpha = two * sc.a2 * sc.delta;
            if alpha == zero {
                return Err(Error::DegenerateLimit("ed with a2 = 0 has no exponential rate".into()));
            }
            if !x_family && sc.a2.abs() == one {
                return Err(Error::DegenerateLimit("ed with rho_z at |a2| = 1".into()));
            }
            let a2 = sc.a2;
            let neg = heaviside_neg(alpha);
            let q = a2 * a2;
            let lim_sz = if neg { two * a2 / (one + q) } else { zero };
            out.set_real(Series::Sx, zero);
            out.set_real(Series::Sy, if neg { -(one - q) / (one + q) } else { -one });
            out.set_real(Series::Sz, lim_sz);
            if x_family {
                out.set_real(Series::Cxx, zero);
                out.set_real(Series::CxxL, zero);
            } else {
                out.set_real(Series::Czz, lim_sz);
                out.set(Series::CzzL, div(cr(lim_sz), cr(one - nu)));
            }
        }
        Model::Pd => {
            if x_family && nu == one {
                return Err(Error::DegenerateLimit(
                    "pd with rho_x at nu = 1 keeps <sigma_x> = 1".into(),
                ));
            }
            out.set_real(Series::Sx, zero);
            out.set_real(Series::Sy, -one);
            out.set_real(Series::Sz, zero);
            if x_family {
                out.set_real(Series::Cxx, zero);
                out.set_real(Series::CxxL, zero);
            } else {
                out.set_real(Series::Czz, zero);
                out.set_real(Series::CzzL, if nu == one { one } else { zero });
            }
        }
        Model::Dph => {
            let rate = two * sc.gamma * sc.delta;
            if rate == zero {
                return Err(Error::DegenerateLimit(
                    "dph with gamma = 0 has no exponential rate".into(),
                ));
            }
            let g = sc.gamma;
            let gt2 = g * g + one;
            let neg = heaviside_neg(rate);
            let lim_sz = if neg { -(one - g * g) / gt2 } else { -one };
            out.set_real(Series::Sx, zero);
            out.set_real(Series::Sy, if neg { -two * g / gt2 } else { zero });
            out.set_real(Series::Sz, lim_sz);
            if x_family {
                out.set_real(Series::Cxx, zero);
                out.set_real(Series::CxxL, zero);
            } else {
                out.set_real(Series::Czz, lim_sz);
                if neg {
                    let printed = cr((one - g * g) / gt2);
                    out.c_zz_l = Some(OracleEntry::corrected(Some(cr(lim_sz)), printed));
                } else {
                    out.set(Series::CzzL, div(cr(one), cr(nu * g - one)));
                }
            }
        }
    }
    Ok(out)
}
