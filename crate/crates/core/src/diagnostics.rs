//! Error norms, conserved quantities, von Neumann amplification factors,
//! and the shape-parameter scan.

use num_complex::Complex;

use crate::espline_basis::{compute_basis_constants, BasisConstants, SplinePieceCoefficients};
use crate::problem_model::ProblemSpec;
use crate::scalar::Scalar;
use crate::solver_core::{evaluate_solution, nodal_values, run, SplineState};
use crate::{GardnerError, Result};

/// Discrete maximum-norm error against the reference solution.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErrorReport<T> {
    pub t: T,
    /// `max_m |u(x_m, t) - U_m|`.
    pub linf: T,
    /// Node where the maximum is attained.
    pub argmax_node: usize,
}

/// One relative drift value; `absolute_fallback` marks quantities whose
/// baseline is zero, where the absolute change is reported instead.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Drift<T> {
    pub value: T,
    pub absolute_fallback: bool,
}

/// The three conserved quantities and (against a baseline) their drifts
/// `C_X = |(X - X_0)/X_0|`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConservationReport<T> {
    pub t: T,
    /// Mass `M = integral of u`.
    pub m: T,
    /// Momentum `E = integral of u^2`.
    pub e: T,
    /// Energy `H = integral of mu1*u^3/3 + mu2*u^4/6 - mu3*u_x^2`.
    pub h: T,
    pub c_m: Option<Drift<T>>,
    pub c_e: Option<Drift<T>>,
    pub c_h: Option<Drift<T>>,
}

/// Amplification-factor moduli of the two Fourier symbols at one phase.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AmplificationSample<T> {
    /// `phi = k*h` in `[0, pi]`.
    pub phase: T,
    /// Modulus of the momentum-equation factor.
    pub rho_momentum: T,
    /// Modulus of the constraint-equation factor (identically 1).
    pub rho_constraint: T,
    /// Frozen nonlinear coefficient standing in for `u + u^2`.
    pub epsilon: T,
}

/// Maximum-norm error of the nodal solution at the state's time.
pub fn linf_error<T: Scalar>(state: &SplineState<T>, spec: &ProblemSpec<T>) -> Result<ErrorReport<T>> {
    let exact = spec
        .analytical
        .as_ref()
        .ok_or(GardnerError::MissingAnalyticalSolution)?;
    let k = compute_basis_constants(spec.zeta, spec.grid.h)?;
    let nv = nodal_values(state, &k);
    let mut linf = T::zero();
    let mut argmax = 0usize;
    for (m, &um) in nv.u.iter().enumerate() {
        let err = (exact(spec.grid.node(m), state.t) - um).abs();
        if err > linf {
            linf = err;
            argmax = m;
        }
    }
    Ok(ErrorReport {
        t: state.t,
        linf,
        argmax_node: argmax,
    })
}

/// Computes `M`, `E`, `H` by the nodal rectangle rule `h * sum_m f(x_m)`,
/// with `u_x` taken from the spline derivative of `U`.  Drifts are filled
/// relative to `baseline` when given; a zero baseline quantity degrades to
/// the absolute change, flagged on the [`Drift`].
pub fn conservation<T: Scalar>(
    state: &SplineState<T>,
    spec: &ProblemSpec<T>,
    baseline: Option<&ConservationReport<T>>,
) -> Result<ConservationReport<T>> {
    let k = compute_basis_constants(spec.zeta, spec.grid.h)?;
    let nv = nodal_values(state, &k);
    let (m, e, h) = integrals_from_samples(&nv.u, &nv.ux, spec, spec.grid.h, None);
    Ok(attach_drifts(state.t, m, e, h, baseline))
}

/// Same quantities by per-element Gauss–Legendre quadrature of the spline
/// representation (`points` = 4 or 6 per element).  Kept alongside the
/// nodal rule as an independent cross-check of the integral values.
pub fn gauss_conservation<T: Scalar>(
    state: &SplineState<T>,
    spec: &ProblemSpec<T>,
    points: usize,
    baseline: Option<&ConservationReport<T>>,
) -> Result<ConservationReport<T>> {
    // Gauss–Legendre abscissae/weights on [-1, 1].
    let (xs, ws): (Vec<f64>, Vec<f64>) = match points {
        4 => (
            vec![
                -0.861136311594052575224,
                -0.339981043584856264803,
                0.339981043584856264803,
                0.861136311594052575224,
            ],
            vec![
                0.347854845137453857373,
                0.652145154862546142627,
                0.652145154862546142627,
                0.347854845137453857373,
            ],
        ),
        6 => (
            vec![
                -0.932469514203152027812,
                -0.661209386466264513661,
                -0.238619186083196908631,
                0.238619186083196908631,
                0.661209386466264513661,
                0.932469514203152027812,
            ],
            vec![
                0.171324492379170345040,
                0.360761573048138607570,
                0.467913934572691047390,
                0.467913934572691047390,
                0.360761573048138607570,
                0.171324492379170345040,
            ],
        ),
        other => panic!("unsupported Gauss point count {other} (use 4 or 6)"),
    };
    let coeffs = SplinePieceCoefficients::new(spec.zeta, spec.grid.a, spec.grid.h, spec.grid.n)?;
    let half_h = spec.grid.h * T::lit(0.5);
    let mut us = Vec::with_capacity(spec.grid.n * points);
    let mut uxs = Vec::with_capacity(spec.grid.n * points);
    let mut wts = Vec::with_capacity(spec.grid.n * points);
    for el in 0..spec.grid.n {
        let mid = spec.grid.node(el) + half_h;
        for (xi, wi) in xs.iter().zip(&ws) {
            let x = mid + half_h * T::lit(*xi);
            let (u, ux, _) = evaluate_solution(state, x, &coeffs)?;
            us.push(u);
            uxs.push(ux);
            wts.push(half_h * T::lit(*wi));
        }
    }
    let (m, e, h) = integrals_from_samples(&us, &uxs, spec, T::one(), Some(&wts));
    Ok(attach_drifts(state.t, m, e, h, baseline))
}

fn integrals_from_samples<T: Scalar>(
    u: &[T],
    ux: &[T],
    spec: &ProblemSpec<T>,
    uniform_weight: T,
    weights: Option<&[T]>,
) -> (T, T, T) {
    let p = spec.params;
    let third = T::lit(1.0 / 3.0);
    let sixth = T::lit(1.0 / 6.0);
    let mut m = T::zero();
    let mut e = T::zero();
    let mut h = T::zero();
    for (i, (&ui, &uxi)) in u.iter().zip(ux).enumerate() {
        let w = weights.map_or(uniform_weight, |ws| ws[i]);
        m += w * ui;
        e += w * ui * ui;
        h += w * (p.mu1 * ui * ui * ui * third + p.mu2 * ui * ui * ui * ui * sixth
            - p.mu3 * uxi * uxi);
    }
    (m, e, h)
}

fn attach_drifts<T: Scalar>(
    t: T,
    m: T,
    e: T,
    h: T,
    baseline: Option<&ConservationReport<T>>,
) -> ConservationReport<T> {
    let drift = |now: T, then: T| -> Drift<T> {
        if then == T::zero() {
            Drift {
                value: (now - then).abs(),
                absolute_fallback: true,
            }
        } else {
            Drift {
                value: ((now - then) / then).abs(),
                absolute_fallback: false,
            }
        }
    };
    ConservationReport {
        t,
        m,
        e,
        h,
        c_m: baseline.map(|b| drift(m, b.m)),
        c_e: baseline.map(|b| drift(e, b.e)),
        c_h: baseline.map(|b| drift(h, b.h)),
    }
}

/// Evaluates both von Neumann amplification factors at the given phases.
///
/// Substituting the Fourier ansatz (amplitude pair `(A1, A2) = (1, -1)`,
/// the sign carried by the constraint factor) into the two collocated
/// equations with the nonlinear factor `u + u^2` frozen at `epsilon` gives
///
/// `rho_momentum = (X1 + iY)/(X2 - iY)` with
/// `X1 = C + (dt*mu3/2)*G`, `X2 = C - (dt*mu3/2)*G`,
/// `Y = dt*epsilon*beta1*sin(phi)`, `C = 1 + 2*alpha1*cos(phi)`,
/// `G = 2*gamma1*(cos(phi) - 1)`,
///
/// and `rho_constraint = -1` identically.  Since `G <= 0` and `C > 0`,
/// `|X1| <= |X2|` and the momentum modulus never exceeds one for
/// `mu3 > 0`; at `phi = 0` it equals one exactly.
pub fn amplification_factors<T: Scalar>(
    spec: &ProblemSpec<T>,
    k: &BasisConstants<T>,
    epsilon: T,
    phases: &[T],
) -> Vec<AmplificationSample<T>> {
    let p = spec.params;
    let half_dt_mu3 = spec.dt * p.mu3 * T::lit(0.5);
    phases
        .iter()
        .map(|&phi| {
            let (sin, cos) = (phi.sin(), phi.cos());
            let c = T::one() + T::lit(2.0) * k.alpha1 * cos;
            let g = T::lit(2.0) * k.gamma1 * (cos - T::one());
            let x1 = c + half_dt_mu3 * g;
            let x2 = c - half_dt_mu3 * g;
            let y = spec.dt * epsilon * k.beta1 * sin;
            let rho1 = Complex::new(x1, y) / Complex::new(x2, -y);
            // constraint symbol: numerator and denominator are exact
            // negatives for any amplitude pair
            let num = Complex::new(-c, T::lit(2.0) * k.beta1 * sin);
            let rho2 = num / -num;
            AmplificationSample {
                phase: phi,
                rho_momentum: rho1.norm(),
                rho_constraint: rho2.norm(),
                epsilon,
            }
        })
        .collect()
}

/// Default frozen nonlinear factor for stability sweeps:
/// `max_m |U_m + U_m^2|` over the initial data.
pub fn default_epsilon<T: Scalar>(spec: &ProblemSpec<T>) -> T {
    let mut eps = T::zero();
    for m in 0..=spec.grid.n {
        let u = (spec.initial_u)(spec.grid.node(m));
        eps = eps.max((u + u * u).abs());
    }
    eps
}

/// Runs the solver once per shape parameter and ranks them by the maximum
/// error at `metric_time`.
///
/// Returns the best parameter (ties broken toward the smaller value) and
/// the full table in the input order; failed points carry their error
/// instead of aborting the scan.
pub fn zeta_scan<T: Scalar>(
    spec_template: &ProblemSpec<T>,
    zeta_grid: &[T],
    metric_time: T,
) -> Result<(T, Vec<(T, Result<T>)>)> {
    if spec_template.analytical.is_none() {
        return Err(GardnerError::MissingAnalyticalSolution);
    }
    let mut table: Vec<(T, Result<T>)> = Vec::with_capacity(zeta_grid.len());
    let mut best: Option<(T, T)> = None; // (linf, zeta)
    for &zeta in zeta_grid {
        let mut spec = spec_template.with_zeta(zeta);
        spec.t_end = metric_time;
        let outcome = run(&spec, &mut []).and_then(|state| linf_error(&state, &spec));
        match outcome {
            Ok(report) => {
                let candidate = (report.linf, zeta);
                let better = match best {
                    None => true,
                    Some((bl, bz)) => {
                        candidate.0 < bl || (candidate.0 == bl && zeta < bz)
                    }
                };
                if better {
                    best = Some(candidate);
                }
                table.push((zeta, Ok(report.linf)));
            }
            Err(e) => table.push((zeta, Err(e))),
        }
    }
    match best {
        Some((_, zeta)) => Ok((zeta, table)),
        None => Err(GardnerError::EmptyScan),
    }
}
