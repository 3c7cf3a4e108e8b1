//! Exponential cubic B-spline basis on a uniform grid.
//!
//! The basis function `B_m` attached to knot `x_m` is supported on
//! `[x_{m-2}, x_{m+2}]` and is built from four pieces that blend linear and
//! hyperbolic terms controlled by the shape parameter `zeta`; as
//! `zeta*h -> 0` the basis converges to the polynomial cubic B-spline.
//!
//! Everything observable reduces to ratios of the auxiliary functions
//! `sinh(y)/y`, `(cosh(y)-1)/y^2`, `(sinh(y)-y)/y^3` and
//! `(y*cosh(y)-sinh(y))/y^3`, which this module evaluates through series
//! below `|y| = 1/2` so that tiny shape parameters lose no precision.

use crate::scalar::Scalar;
use crate::{GardnerError, Result};

/// Values of one basis function (and derivatives) at its three interior
/// knots.  These six numbers are all the collocation equations ever need.
///
/// With `s = sinh(zeta*h)`, `c = cosh(zeta*h)`, `q = zeta*h*c - s`:
///
/// - `alpha1 = (s - zeta*h)/(2q)` — value at `x_{m-1}` and `x_{m+1}`,
/// - `alpha2 = 1` — value at `x_m`,
/// - `beta1 = zeta*(1 - c)/(2q)` — slope at `x_{m+1}` (negative),
/// - `beta2 = -beta1` — slope at `x_{m-1}`,
/// - `gamma1 = zeta^2*s/(2q)` — curvature at `x_{m-1}` and `x_{m+1}`,
/// - `gamma2 = -2*gamma1` — curvature at `x_m`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BasisConstants<T> {
    pub zeta: T,
    pub h: T,
    pub alpha1: T,
    pub alpha2: T,
    pub beta1: T,
    pub beta2: T,
    pub gamma1: T,
    pub gamma2: T,
}

/// Closed-form coefficients of the four polynomial/hyperbolic pieces of a
/// basis function, plus the grid anchoring needed to evaluate it.
///
/// The outer pieces are `±b2*((x - x_k) - sinh(zeta*(x - x_k))/zeta)` and the
/// inner pieces are `a1 + b1*(x - x_m) + c1*exp(zeta*(x-x_m)) +
/// d1*exp(-zeta*(x-x_m))` (mirrored on the left).  The raw coefficients grow
/// like `1/(zeta*h)^2` and worse as `zeta*h -> 0`, so
/// [`evaluate_bspline`] works with algebraically regrouped forms instead;
/// the raw fields describe the same function and are cross-checked against
/// the regrouped evaluation in the tests.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SplinePieceCoefficients<T> {
    pub a1: T,
    pub b1: T,
    pub b2: T,
    pub c1: T,
    pub d1: T,
    /// Shape parameter the coefficients were built for.
    pub zeta: T,
    /// Knot spacing.
    pub h: T,
    /// Left end of the grid; knot `m` sits at `a + m*h`.
    pub a: T,
    /// Number of elements (knots run `0..=n`).
    pub n: usize,
    // cached pieces of the regrouped evaluation
    cosh_zh: T,
    sinh_over_h: T,  // sinh(zeta*h)/(zeta*h)
    q_over_cube: T,  // (zeta*h*cosh - sinh)/(zeta*h)^3
}

fn check_positive<T: Scalar>(zeta: T, h: T) -> Result<()> {
    if !(zeta.is_finite() && h.is_finite()) || zeta <= T::zero() || h <= T::zero() {
        return Err(GardnerError::InvalidBasisParameters {
            zeta: zeta.to64(),
            h: h.to64(),
        });
    }
    Ok(())
}

/// Series/direct switch point for the auxiliary ratio functions.
const SERIES_CUTOFF: f64 = 0.5;

/// `sinh(y)/y`, stable at `y = 0`.
fn sinh_ratio<T: Scalar>(y: T) -> T {
    if y.abs() < T::lit(SERIES_CUTOFF) {
        let y2 = y * y;
        // 1 + y^2/3! + y^4/5! + ... + y^12/13!
        T::one()
            + y2 * (T::lit(1.0 / 6.0)
                + y2 * (T::lit(1.0 / 120.0)
                    + y2 * (T::lit(1.0 / 5040.0)
                        + y2 * (T::lit(1.0 / 362880.0)
                            + y2 * (T::lit(1.0 / 39916800.0)
                                + y2 * T::lit(1.0 / 6227020800.0))))))
    } else {
        y.sinh() / y
    }
}

/// `(cosh(y) - 1)/y^2`, stable at `y = 0`.
fn coshm1_ratio<T: Scalar>(y: T) -> T {
    if y.abs() < T::lit(SERIES_CUTOFF) {
        let y2 = y * y;
        // 1/2! + y^2/4! + y^4/6! + ... + y^12/14!
        T::lit(0.5)
            + y2 * (T::lit(1.0 / 24.0)
                + y2 * (T::lit(1.0 / 720.0)
                    + y2 * (T::lit(1.0 / 40320.0)
                        + y2 * (T::lit(1.0 / 3628800.0)
                            + y2 * (T::lit(1.0 / 479001600.0)
                                + y2 * T::lit(1.0 / 87178291200.0))))))
    } else {
        // 2*sinh^2(y/2) avoids the cancellation in cosh(y) - 1
        let s = (y * T::lit(0.5)).sinh();
        T::lit(2.0) * s * s / (y * y)
    }
}

/// `(sinh(y) - y)/y^3`, stable at `y = 0`.
fn sinhm_ratio<T: Scalar>(y: T) -> T {
    if y.abs() < T::lit(SERIES_CUTOFF) {
        let y2 = y * y;
        // 1/3! + y^2/5! + y^4/7! + ... + y^12/15!
        T::lit(1.0 / 6.0)
            + y2 * (T::lit(1.0 / 120.0)
                + y2 * (T::lit(1.0 / 5040.0)
                    + y2 * (T::lit(1.0 / 362880.0)
                        + y2 * (T::lit(1.0 / 39916800.0)
                            + y2 * (T::lit(1.0 / 6227020800.0)
                                + y2 * T::lit(1.0 / 1307674368000.0))))))
    } else {
        (y.sinh() - y) / (y * y * y)
    }
}

/// `(y*cosh(y) - sinh(y))/y^3`, stable at `y = 0`.
fn q_ratio<T: Scalar>(y: T) -> T {
    if y.abs() < T::lit(SERIES_CUTOFF) {
        let y2 = y * y;
        // sum 2k*y^(2k-2)/(2k+1)!: 1/3 + y^2/30 + y^4/840 + y^6/45360 + ...
        T::lit(1.0 / 3.0)
            + y2 * (T::lit(1.0 / 30.0)
                + y2 * (T::lit(1.0 / 840.0)
                    + y2 * (T::lit(1.0 / 45360.0)
                        + y2 * (T::lit(1.0 / 3991680.0)
                            + y2 * (T::lit(1.0 / 518918400.0)
                                + y2 * T::lit(1.0 / 93405312000.0))))))
    } else {
        (y * y.cosh() - y.sinh()) / (y * y * y)
    }
}

/// Computes the six nodal constants for shape parameter `zeta` on spacing `h`.
///
/// All three independent constants are ratios whose numerator and denominator
/// vanish like `(zeta*h)^3`; they are evaluated through the ratio helpers, so
/// small `zeta*h` (deep in the series branch) loses no accuracy and the
/// cubic-spline limits `alpha1 -> 1/4`, `beta1 -> -3/(4h)`,
/// `gamma1 -> 3/(2h^2)` come out exact to rounding.
pub fn compute_basis_constants<T: Scalar>(zeta: T, h: T) -> Result<BasisConstants<T>> {
    check_positive(zeta, h)?;
    let y = zeta * h;
    let d2 = T::lit(2.0) * q_ratio(y);
    let alpha1 = sinhm_ratio(y) / d2;
    let beta1 = -coshm1_ratio(y) / (d2 * h);
    let gamma1 = sinh_ratio(y) / (d2 * h * h);
    Ok(BasisConstants {
        zeta,
        h,
        alpha1,
        alpha2: T::one(),
        beta1,
        beta2: -beta1,
        gamma1,
        gamma2: T::lit(-2.0) * gamma1,
    })
}

impl<T: Scalar> SplinePieceCoefficients<T> {
    /// Builds the piece coefficients for shape parameter `zeta` over the
    /// uniform grid `a + m*h`, `m = 0..=n`.
    pub fn new(zeta: T, a: T, h: T, n: usize) -> Result<Self> {
        check_positive(zeta, h)?;
        let y = zeta * h;
        let c = y.cosh();
        // q = y*cosh(y) - sinh(y), via the stable ratio so tiny y keeps all
        // its digits; the coefficient forms below are algebraic
        // simplifications of the textbook expressions with the (1 - cosh)
        // cancellations removed, e.g. c1 = (2*e^{-y} + 1)/(4q)
        let q = y * y * y * q_ratio(y);
        let two = T::lit(2.0);
        let four = T::lit(4.0);
        let a1 = y * c / q;
        let b1 = -zeta * (two * c + T::one()) / (two * q);
        let b2 = zeta / (two * q);
        let c1 = (two * (-y).exp() + T::one()) / (four * q);
        let d1 = -(two * y.exp() + T::one()) / (four * q);
        Ok(Self {
            a1,
            b1,
            b2,
            c1,
            d1,
            zeta,
            h,
            a,
            n,
            cosh_zh: c,
            sinh_over_h: sinh_ratio(y),
            q_over_cube: q_ratio(y),
        })
    }

    /// Right end of the grid.
    pub fn b(&self) -> T {
        self.a + self.h * T::from_usize(self.n).unwrap()
    }
}

/// Evaluates basis function `B_m` and its first two derivatives at `x`.
///
/// `m` may address the ghost knots `-1` and `n+1`.  Outside the support
/// `[x_{m-2}, x_{m+2}]` all three values are exactly zero.  The outer pieces
/// rise from zero like `(x - x_{m∓2})^3` and the inner pieces are evaluated
/// in the regrouped form
/// `B = 1 - s*(cosh(zeta*w) - 1)/q + (2c+1)*(sinh(zeta*w) - zeta*w)/(2q)`,
/// every term a stable ratio, so the evaluation stays accurate uniformly in
/// `zeta*h` (the raw piece coefficients would cancel catastrophically below
/// `zeta*h ~ 1e-5`).
pub fn evaluate_bspline<T: Scalar>(
    m: i64,
    x: T,
    coeffs: &SplinePieceCoefficients<T>,
) -> (T, T, T) {
    let h = coeffs.h;
    let xm = coeffs.a + h * T::from_i64(m).unwrap();
    let d = x - xm;
    let two_h = T::lit(2.0) * h;
    if d <= -two_h || d >= two_h {
        // the outer pieces vanish to second order at the support ends, so the
        // exact endpoints are zeros as well
        return (T::zero(), T::zero(), T::zero());
    }

    let zeta = coeffs.zeta;
    let dh = coeffs.q_over_cube; // (yc - s)/y^3 with y = zeta*h
    let sh = coeffs.sinh_over_h; // s/y
    let c2p1 = T::lit(2.0) * coeffs.cosh_zh + T::one();
    let half = T::lit(0.5);

    // Outer pieces: u = distance inside [0, h] from the support end.
    let outer = |u: T, sign: T| -> (T, T, T) {
        let r = u / h;
        let yu = zeta * u;
        let b = sinhm_ratio(yu) * r * r * r / (T::lit(2.0) * dh);
        let bp = sign * coshm1_ratio(yu) * r * r / (T::lit(2.0) * h * dh);
        let bpp = sinh_ratio(yu) * r / (T::lit(2.0) * h * h * dh);
        (b, bp, bpp)
    };
    // Inner pieces: w = |x - x_m| in [0, h]; slope flips with the side.
    let inner = |w: T, sign: T| -> (T, T, T) {
        let r = w / h;
        let yw = zeta * w;
        let b = T::one() - sh * coshm1_ratio(yw) * r * r / dh
            + c2p1 * sinhm_ratio(yw) * r * r * r / (T::lit(2.0) * dh);
        let bp = sign
            * (-sh * sinh_ratio(yw) * r / (h * dh)
                + c2p1 * coshm1_ratio(yw) * r * r / (T::lit(2.0) * h * dh));
        let bpp = -sh * (yw).cosh() / (h * h * dh)
            + c2p1 * sinh_ratio(yw) * r * half / (h * h * dh);
        (b, bp, bpp)
    };

    if d < -h {
        outer(d + two_h, T::one())
    } else if d <= T::zero() {
        inner(-d, -T::one())
    } else if d <= h {
        inner(d, T::one())
    } else {
        outer(two_h - d, -T::one())
    }
}
