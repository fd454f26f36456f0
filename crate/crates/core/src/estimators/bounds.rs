//! Chebyshev and Vysochanskij–Petunin intervals for the ball estimators.
//!
//! All bounds use the asymptotic constants: the vanishing `o(1)` terms are
//! taken as zero, and `delta1`/`delta2` enter through their uniform bounds.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Uniform bound on the relative bias of a HyperLogLog estimate.
pub const DELTA1: f64 = 5e-5;
/// Uniform bound on the oscillating part of the standard error.
pub const DELTA2: f64 = 5e-4;
/// `sqrt(3 ln 2 - 1)`, the large-`p` limit of `beta_p`.
pub const BETA_INF: f64 = 1.038_96;

const BETA_TABLE: [(usize, f64); 4] = [(16, 1.106), (32, 1.070), (64, 1.054), (128, 1.046)];

/// The error-bound constants for a given register count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorBoundConstants<F> {
    pub registers: usize,
    pub delta1: F,
    pub delta2: F,
    pub beta: F,
    /// `beta / sqrt(p) + delta2`.
    pub eta: F,
}

impl<F: Scalar> ErrorBoundConstants<F> {
    pub fn for_registers(p: usize) -> Result<Self> {
        let beta = beta(p)?;
        Ok(Self {
            registers: p,
            delta1: F::lit(DELTA1),
            delta2: F::lit(DELTA2),
            beta,
            eta: beta / F::from_count(p as u64).sqrt() + F::lit(DELTA2),
        })
    }
}

/// `beta_p`: exact table values up to 128 (next-lower entry in between),
/// `beta_inf` above.
pub fn beta<F: Scalar>(p: usize) -> Result<F> {
    if p < 16 {
        return Err(Error::Config(format!("error bounds need p >= 16 registers, got {p}")));
    }
    if p > 128 {
        return Ok(F::lit(BETA_INF));
    }
    let (_, b) = BETA_TABLE.iter().rev().find(|(q, _)| *q <= p).expect("p >= 16");
    Ok(F::lit(*b))
}

pub fn eta<F: Scalar>(p: usize) -> Result<F> {
    ErrorBoundConstants::for_registers(p).map(|c| c.eta)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntervalStyle {
    /// `((1 - eps) / (1 + gamma) * x, (1 + eps) / (1 - gamma) * x)` around a ratio.
    MultiplicativeOnTruth,
    /// `(E - a, E + a)` around the expected count.
    AdditiveOnExpectation,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConfidenceInterval<F> {
    pub lo: F,
    /// `+inf` when the denominator factor `1 - gamma` is not positive.
    pub hi: F,
    pub confidence_lower_bound: F,
    pub style: IntervalStyle,
    /// Relative half-widths of the numerator and denominator events. Zero
    /// for additive intervals.
    pub epsilon: F,
    pub gamma: F,
    /// Cardinalities were estimates, not true values.
    pub plug_in: bool,
    /// A VP interval whose unimodality prerequisite was checked externally.
    pub unimodality_established: bool,
    /// Always true: `o(1)` terms are omitted.
    pub asymptotic_constants: bool,
}

impl<F: Scalar> ConfidenceInterval<F> {
    pub fn with_plug_in(mut self, plug_in: bool) -> Self {
        self.plug_in = plug_in;
        self
    }

    pub fn with_unimodality(mut self, established: bool) -> Self {
        self.unimodality_established = established;
        self
    }

    /// Closed-interval membership; an infinite `hi` admits everything above `lo`.
    pub fn contains(&self, x: F) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn half_width(&self) -> F {
        (self.hi - self.lo) / F::lit(2.0)
    }

    fn new(lo: F, hi: F, confidence: F, style: IntervalStyle, epsilon: F, gamma: F) -> Self {
        let (lo, hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
        Self {
            lo,
            hi,
            confidence_lower_bound: confidence.max(F::zero()).min(F::one()),
            style,
            epsilon,
            gamma,
            plug_in: false,
            unimodality_established: false,
            asymptotic_constants: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Inequality {
    Chebyshev,
    VysochanskijPetunin,
}

impl Inequality {
    fn factor<F: Scalar>(self) -> F {
        match self {
            Self::Chebyshev => F::one(),
            Self::VysochanskijPetunin => F::lit(4.0 / 9.0),
        }
    }
}

fn check_positive<F: Scalar>(name: &str, x: F) -> Result<()> {
    if x > F::zero() && !x.is_nan() {
        Ok(())
    } else {
        Err(Error::Precondition(format!("{name} must be positive, got {x}")))
    }
}

fn check_non_negative<F: Scalar>(name: &str, x: F) -> Result<()> {
    if x >= F::zero() {
        Ok(())
    } else {
        Err(Error::Precondition(format!("{name} must be non-negative, got {x}")))
    }
}

/// VP requires `width > sqrt(8/3 * Var)` with `Var <= eta^2 card^2`.
fn check_vp_width<F: Scalar>(name: &str, width: F, eta: F, card: F) -> Result<()> {
    let min = (F::lit(8.0 / 3.0)).sqrt() * eta * card;
    if width > min {
        Ok(())
    } else {
        Err(Error::Precondition(format!("{name} = {width} must exceed sqrt(8/3) * eta * cardinality = {min}")))
    }
}

/// Interval for `value = g(num / den)` where both counts have relative
/// standard error at most `eta`.
#[allow(clippy::too_many_arguments)]
fn ratio_interval<F: Scalar>(
    num: F,
    den: F,
    value: F,
    p: usize,
    w1: F,
    w2: F,
    inequality: Inequality,
) -> Result<ConfidenceInterval<F>> {
    check_non_negative("numerator cardinality", num)?;
    check_positive("denominator cardinality", den)?;
    check_positive("first width", w1)?;
    check_positive("second width", w2)?;
    let consts = ErrorBoundConstants::<F>::for_registers(p)?;
    let eta = consts.eta;
    if inequality == Inequality::VysochanskijPetunin {
        check_vp_width("lambda1", w1, eta, num)?;
        check_vp_width("lambda2", w2, eta, den)?;
    }
    let epsilon = w1 / num + consts.delta1;
    let gamma = w2 / den + consts.delta1;
    let confidence = F::one() - inequality.factor::<F>() * eta * eta * ((num / w1).powi(2) + (den / w2).powi(2));
    let (lo, hi) = if value == F::zero() {
        (F::zero(), F::zero())
    } else {
        let lo = (F::one() - epsilon) / (F::one() + gamma) * value;
        let hi = if gamma < F::one() { (F::one() + epsilon) / (F::one() - gamma) * value } else { F::infinity() };
        (lo, hi)
    };
    Ok(ConfidenceInterval::new(lo, hi, confidence, IntervalStyle::MultiplicativeOnTruth, epsilon, gamma))
}

pub fn chebyshev_conductance_interval<F: Scalar>(
    edges: F,
    out_edges: F,
    phi: F,
    p: usize,
    p1: F,
    p2: F,
) -> Result<ConfidenceInterval<F>> {
    check_positive("edgeball cardinality", edges)?;
    ratio_interval(edges, out_edges, phi, p, p1, p2, Inequality::Chebyshev)
}

pub fn vp_conductance_interval<F: Scalar>(
    edges: F,
    out_edges: F,
    phi: F,
    p: usize,
    lambda1: F,
    lambda2: F,
) -> Result<ConfidenceInterval<F>> {
    check_positive("edgeball cardinality", edges)?;
    ratio_interval(edges, out_edges, phi, p, lambda1, lambda2, Inequality::VysochanskijPetunin)
}

pub fn chebyshev_transitivity_interval<F: Scalar>(
    triangles: F,
    wedges: F,
    t: F,
    p: usize,
    p1: F,
    p2: F,
) -> Result<ConfidenceInterval<F>> {
    ratio_interval(triangles, wedges, t, p, p1, p2, Inequality::Chebyshev)
}

pub fn vp_transitivity_interval<F: Scalar>(
    triangles: F,
    wedges: F,
    t: F,
    p: usize,
    lambda1: F,
    lambda2: F,
) -> Result<ConfidenceInterval<F>> {
    ratio_interval(triangles, wedges, t, p, lambda1, lambda2, Inequality::VysochanskijPetunin)
}

fn additive_interval<F: Scalar>(
    triangles: F,
    p: usize,
    width: F,
    inequality: Inequality,
) -> Result<ConfidenceInterval<F>> {
    check_non_negative("triangle count", triangles)?;
    check_positive("width", width)?;
    let consts = ErrorBoundConstants::<F>::for_registers(p)?;
    let eta = consts.eta;
    if inequality == Inequality::VysochanskijPetunin {
        check_vp_width("lambda", width, eta, triangles)?;
    }
    // Expected estimate: the count inflated by the bias bound.
    let center = triangles * (F::one() + consts.delta1);
    let confidence = F::one() - inequality.factor::<F>() * (eta * triangles / width).powi(2);
    Ok(ConfidenceInterval::new(
        (center - width).max(F::zero()),
        center + width,
        confidence,
        IntervalStyle::AdditiveOnExpectation,
        F::zero(),
        F::zero(),
    ))
}

pub fn chebyshev_triangle_interval<F: Scalar>(triangles: F, p: usize, a: F) -> Result<ConfidenceInterval<F>> {
    additive_interval(triangles, p, a, Inequality::Chebyshev)
}

pub fn vp_triangle_interval<F: Scalar>(triangles: F, p: usize, lambda: F) -> Result<ConfidenceInterval<F>> {
    additive_interval(triangles, p, lambda, Inequality::VysochanskijPetunin)
}

/// Width multiplier `w / (eta * card)` that spends `(1 - confidence) / terms`
/// of the failure budget on each of `terms` events.
fn width_multiplier<F: Scalar>(confidence: F, terms: usize, vp: bool) -> Result<F> {
    if !(confidence > F::zero() && confidence < F::one()) {
        return Err(Error::Config(format!("target confidence must be in (0, 1), got {confidence}")));
    }
    let factor = if vp { F::lit(4.0 / 9.0) } else { F::one() };
    let per_term = (F::one() - confidence) / F::from_count(terms as u64);
    let m = (factor / per_term).sqrt();
    if vp && m <= F::lit(8.0 / 3.0).sqrt() {
        return Err(Error::Config(format!(
            "VP intervals need a target confidence above {:.4}",
            1.0 - terms as f64 * 4.0 / 24.0
        )));
    }
    Ok(m)
}

/// Chebyshev and VP intervals for a ratio estimator at a target confidence,
/// with widths proportional to `eta * cardinality` and an equal budget split.
pub fn ratio_intervals_at<F: Scalar>(
    num: F,
    den: F,
    value: F,
    p: usize,
    confidence: F,
) -> Result<(ConfidenceInterval<F>, ConfidenceInterval<F>)> {
    let eta = eta::<F>(p)?;
    let tiny = F::min_positive_value();
    let width = |m: F, card: F| (m * eta * card).max(tiny);
    let mc = width_multiplier(confidence, 2, false)?;
    let mv = width_multiplier(confidence, 2, true)?;
    let cheb = ratio_interval(num, den, value, p, width(mc, num), width(mc, den), Inequality::Chebyshev)?;
    let vp = ratio_interval(num, den, value, p, width(mv, num), width(mv, den), Inequality::VysochanskijPetunin)?;
    Ok((cheb, vp))
}

/// Chebyshev and VP triangle intervals at a target confidence.
pub fn triangle_intervals_at<F: Scalar>(
    triangles: F,
    p: usize,
    confidence: F,
) -> Result<(ConfidenceInterval<F>, ConfidenceInterval<F>)> {
    let eta = eta::<F>(p)?;
    let tiny = F::min_positive_value();
    let mc = width_multiplier(confidence, 1, false)?;
    let mv = width_multiplier(confidence, 1, true)?;
    Ok((
        additive_interval(triangles, p, (mc * eta * triangles).max(tiny), Inequality::Chebyshev)?,
        additive_interval(triangles, p, (mv * eta * triangles).max(tiny), Inequality::VysochanskijPetunin)?,
    ))
}
