//! Collocation solver: initial coefficient fit and the linearized
//! Crank–Nicolson time step.
//!
//! The equation is reduced to the first-order-in-space system
//! `u_t + (mu1*u + mu2*u^2)*u_x + mu3*v_xx = 0`, `v = u_x`, and both fields
//! are expanded in the exponential B-spline basis:
//! `U = sum delta_m B_m`, `V = sum phi_m B_m` with ghost coefficients at
//! `m = -1` and `m = N+1`.  Nonlinear products are linearized about time
//! level `n` (two-level product rules; coefficients `K = U_m^n`,
//! `L = V_m^n` frozen per node), giving one banded solve per step.
//!
//! Row layout of the `2N+2` system (unknowns interleaved
//! `delta_0, phi_0, ..., delta_N, phi_N`): interior nodes `m = 1..N-1`
//! contribute a momentum row and a constraint row `(V - U_x)^{n+1} =
//! -(V - U_x)^n`; the boundary nodes contribute anchor rows that pin the
//! nodal values `U^{n+1}` and `V^{n+1}` at both ends.  With the ghost
//! reflections `delta_{-1} = delta_1` etc. folded in, an anchor row reads
//! `delta_0 + 2*alpha1*delta_1 = value`.  When the problem has a
//! reference solution the anchor values follow it; otherwise the anchors
//! hold the initial boundary values (the far-field constants).

use crate::banded::{solve_tridiagonal, BandedMatrix};
use crate::espline_basis::{
    compute_basis_constants, evaluate_bspline, BasisConstants, SplinePieceCoefficients,
};
use crate::problem_model::ProblemSpec;
use crate::scalar::Scalar;
use crate::{GardnerError, Result};

/// Spline coefficients of both fields at one time level.  `delta[i]` holds
/// `delta_{i-1}`, so the vectors have `N+3` entries including the ghosts.
#[derive(Clone, Debug, PartialEq)]
pub struct SplineState<T> {
    pub t: T,
    pub delta: Vec<T>,
    pub phi: Vec<T>,
}

impl<T: Scalar> SplineState<T> {
    /// Number of elements `N` (panics on malformed lengths).
    pub fn n_elements(&self) -> usize {
        assert!(self.delta.len() >= 5 && self.delta.len() == self.phi.len());
        self.delta.len() - 3
    }

    /// Copies the non-ghost coefficients into the interleaved solve vector.
    fn pack(&self) -> Vec<T> {
        let n = self.n_elements();
        let mut x = vec![T::zero(); 2 * (n + 1)];
        for m in 0..=n {
            x[2 * m] = self.delta[m + 1];
            x[2 * m + 1] = self.phi[m + 1];
        }
        x
    }

    /// Rebuilds a state from the solve vector, restoring the ghost
    /// coefficients from the reflection identities.
    fn unpack(t: T, x: &[T], n: usize) -> Self {
        let mut delta = vec![T::zero(); n + 3];
        let mut phi = vec![T::zero(); n + 3];
        for m in 0..=n {
            delta[m + 1] = x[2 * m];
            phi[m + 1] = x[2 * m + 1];
        }
        delta[0] = delta[2];
        delta[n + 2] = delta[n];
        phi[0] = phi[2];
        phi[n + 2] = phi[n];
        Self { t, delta, phi }
    }
}

/// Values of both fields and their derivatives at the grid nodes.
#[derive(Clone, Debug, PartialEq)]
pub struct NodalValues<T> {
    pub u: Vec<T>,
    pub ux: Vec<T>,
    pub uxx: Vec<T>,
    pub v: Vec<T>,
    pub vx: Vec<T>,
    pub vxx: Vec<T>,
}

/// Evaluates the three-term nodal identities for both fields:
/// `U_m = alpha1*delta_{m-1} + delta_m + alpha1*delta_{m+1}`,
/// `Ux_m = beta1*(delta_{m-1} - delta_{m+1})`,
/// `Uxx_m = gamma1*(delta_{m-1} + delta_{m+1}) + gamma2*delta_m`.
pub fn nodal_values<T: Scalar>(state: &SplineState<T>, k: &BasisConstants<T>) -> NodalValues<T> {
    let n = state.n_elements();
    let three_term = |c: &[T]| -> (Vec<T>, Vec<T>, Vec<T>) {
        let mut val = Vec::with_capacity(n + 1);
        let mut der = Vec::with_capacity(n + 1);
        let mut der2 = Vec::with_capacity(n + 1);
        for m in 0..=n {
            let (cl, cc, cr) = (c[m], c[m + 1], c[m + 2]);
            val.push(k.alpha1 * cl + cc + k.alpha1 * cr);
            der.push(k.beta1 * (cl - cr));
            der2.push(k.gamma1 * (cl + cr) + k.gamma2 * cc);
        }
        (val, der, der2)
    };
    let (u, ux, uxx) = three_term(&state.delta);
    let (v, vx, vxx) = three_term(&state.phi);
    NodalValues {
        u,
        ux,
        uxx,
        v,
        vx,
        vxx,
    }
}

/// The two banded matrices of one Crank–Nicolson step,
/// `A x^{n+1} = B x^n` (anchor rows aside, which pin boundary values).
#[derive(Clone, Debug)]
pub struct BandedSystem<T> {
    pub size: usize,
    pub lower_bandwidth: usize,
    pub upper_bandwidth: usize,
    pub a_bands: BandedMatrix<T>,
    pub b_bands: BandedMatrix<T>,
}

/// Fits both coefficient vectors to the initial data: collocation
/// `U(x_m, 0) = w(x_m)` at every node plus the two Neumann end conditions,
/// which eliminate the ghosts (`delta_{-1} = delta_1` etc.) and leave a
/// tridiagonal system of size `N+1`; likewise for `V` with `w'`.
pub fn build_initial_state<T: Scalar>(
    spec: &ProblemSpec<T>,
    k: &BasisConstants<T>,
) -> Result<SplineState<T>> {
    spec.validate()?;
    let n = spec.grid.n;
    let fit = |target: &dyn Fn(T) -> T| -> Result<Vec<T>> {
        let mut lower = vec![k.alpha1; n + 1];
        let mut diag = vec![T::one(); n + 1];
        let mut upper = vec![k.alpha1; n + 1];
        let two_a1 = T::lit(2.0) * k.alpha1;
        upper[0] = two_a1;
        lower[n] = two_a1;
        diag[0] = T::one();
        diag[n] = T::one();
        let rhs: Vec<T> = (0..=n).map(|m| target(spec.grid.node(m))).collect();
        let inner = solve_tridiagonal(&lower, &diag, &upper, &rhs)?;
        let mut c = vec![T::zero(); n + 3];
        c[1..=(n + 1)].copy_from_slice(&inner);
        c[0] = c[2];
        c[n + 2] = c[n];
        Ok(c)
    };
    let u0 = spec.initial_u.clone();
    let v0 = spec.initial_v.clone();
    Ok(SplineState {
        t: T::zero(),
        delta: fit(&move |x| u0(x))?,
        phi: fit(&move |x| v0(x))?,
    })
}

/// Assembles the step matrices about the given state (time level `n`).
///
/// Momentum row of node `m` (coefficients act on the listed unknowns):
///
/// - `Z = 2/dt + mu1*L + 2*mu2*K*L` on `U^{n+1}`,
/// - `W = mu1*K + mu2*K^2` on `Ux^{n+1}`,
/// - `mu3` on `Vxx^{n+1}`,
///
/// with right-hand-side matrix applying `Y = 2/dt + mu2*K*L` on `U^n` and
/// `-mu3` on `Vxx^n`.  Constraint rows carry the state-independent pattern
/// `(-beta1, alpha1 | 0, 1 | beta1, alpha1)` in `A` and its negation in
/// `B`.  Anchor rows at `m = 0` and `m = N` sample the nodal value
/// (`delta_0 + 2*alpha1*delta_1` and the `phi` analogue) in both matrices,
/// so with no external override the boundary values are held.
pub fn assemble_step<T: Scalar>(
    state: &SplineState<T>,
    spec: &ProblemSpec<T>,
    k: &BasisConstants<T>,
) -> BandedSystem<T> {
    let n = spec.grid.n;
    let size = 2 * (n + 1);
    let (kl, ku) = (3, 3);
    let mut a = BandedMatrix::zeros(size, kl, ku);
    let mut b = BandedMatrix::zeros(size, kl, ku);
    let nv = nodal_values(state, k);
    let p = spec.params;
    let two_over_dt = T::lit(2.0) / spec.dt;
    let two = T::lit(2.0);

    for m in 1..n {
        let kk = nv.u[m];
        let ll = nv.v[m];
        let z = two_over_dt + p.mu1 * ll + two * p.mu2 * kk * ll;
        let w = p.mu1 * kk + p.mu2 * kk * kk;
        let y = two_over_dt + p.mu2 * kk * ll;
        let r = 2 * m;
        let (jl, jc, jr) = (2 * (m - 1), 2 * m, 2 * (m + 1));
        // momentum row
        a.set(r, jl, z * k.alpha1 + w * k.beta1);
        a.set(r, jl + 1, p.mu3 * k.gamma1);
        a.set(r, jc, z);
        a.set(r, jc + 1, p.mu3 * k.gamma2);
        a.set(r, jr, z * k.alpha1 - w * k.beta1);
        a.set(r, jr + 1, p.mu3 * k.gamma1);
        b.set(r, jl, y * k.alpha1);
        b.set(r, jl + 1, -p.mu3 * k.gamma1);
        b.set(r, jc, y);
        b.set(r, jc + 1, -p.mu3 * k.gamma2);
        b.set(r, jr, y * k.alpha1);
        b.set(r, jr + 1, -p.mu3 * k.gamma1);
        // constraint row: (V - Ux)^{n+1} = -(V - Ux)^n
        a.set(r + 1, jl, -k.beta1);
        a.set(r + 1, jl + 1, k.alpha1);
        a.set(r + 1, jc + 1, T::one());
        a.set(r + 1, jr, k.beta1);
        a.set(r + 1, jr + 1, k.alpha1);
        b.set(r + 1, jl, k.beta1);
        b.set(r + 1, jl + 1, -k.alpha1);
        b.set(r + 1, jc + 1, -T::one());
        b.set(r + 1, jr, -k.beta1);
        b.set(r + 1, jr + 1, -k.alpha1);
    }

    // Anchor rows with the ghost reflection folded in.
    let two_a1 = T::lit(2.0) * k.alpha1;
    for (row, col0, col1) in [(0, 0, 2), (2 * n, 2 * n, 2 * (n - 1))] {
        a.set(row, col0, T::one());
        a.set(row, col1, two_a1);
        b.set(row, col0, T::one());
        b.set(row, col1, two_a1);
        a.set(row + 1, col0 + 1, T::one());
        a.set(row + 1, col1 + 1, two_a1);
        b.set(row + 1, col0 + 1, T::one());
        b.set(row + 1, col1 + 1, two_a1);
    }

    BandedSystem {
        size,
        lower_bandwidth: kl,
        upper_bandwidth: ku,
        a_bands: a,
        b_bands: b,
    }
}

/// Advances the state by one time step.
///
/// Solves `A x^{n+1} = B x^n` by banded LU without pivoting, overriding the
/// four anchor right-hand sides with the reference boundary traces at
/// `t^{n+1}` when the problem carries a reference solution, then restores
/// the ghost coefficients.
pub fn step<T: Scalar>(
    state: &SplineState<T>,
    spec: &ProblemSpec<T>,
    k: &BasisConstants<T>,
) -> Result<SplineState<T>> {
    let n = spec.grid.n;
    let expected = n + 3;
    if state.delta.len() != expected || state.phi.len() != expected {
        return Err(GardnerError::DimensionMismatch {
            state_len: state.delta.len(),
            expected,
        });
    }
    let sys = assemble_step(state, spec, k);
    let x = state.pack();
    let mut rhs = sys.b_bands.mul_vec(&x);
    let t_next = state.t + spec.dt;
    if let (Some(u), Some(ux)) = (&spec.analytical, &spec.analytical_ux) {
        let (xa, xb) = (spec.grid.a, spec.grid.b);
        rhs[0] = u(xa, t_next);
        rhs[1] = ux(xa, t_next);
        rhs[2 * n] = u(xb, t_next);
        rhs[2 * n + 1] = ux(xb, t_next);
    }
    let lu = sys.a_bands.lu_factor().map_err(|e| match e {
        GardnerError::NumericalBreakdown { row, pivot, .. } => GardnerError::NumericalBreakdown {
            step: ((state.t / spec.dt).to64().round() as usize) + 1,
            row,
            pivot,
        },
        other => other,
    })?;
    let xn1 = lu.solve(&rhs);
    Ok(SplineState::unpack(t_next, &xn1, n))
}

/// Runs the full simulation: builds the initial state, performs
/// `round(t_end/dt)` steps, and invokes every observer on the initial state
/// and after each step.
pub fn run<T: Scalar>(
    spec: &ProblemSpec<T>,
    observers: &mut [&mut dyn FnMut(&SplineState<T>)],
) -> Result<SplineState<T>> {
    spec.validate()?;
    let k = compute_basis_constants(spec.zeta, spec.grid.h)?;
    let mut state = build_initial_state(spec, &k)?;
    for obs in observers.iter_mut() {
        obs(&state);
    }
    for _ in 0..spec.step_count() {
        state = step(&state, spec, &k)?;
        for obs in observers.iter_mut() {
            obs(&state);
        }
    }
    Ok(state)
}

/// Evaluates `U`, `U_x` and `V` at an arbitrary point by summing the (at
/// most four) basis functions supported there.
pub fn evaluate_solution<T: Scalar>(
    state: &SplineState<T>,
    x: T,
    coeffs: &SplinePieceCoefficients<T>,
) -> Result<(T, T, T)> {
    let (a, b) = (coeffs.a, coeffs.b());
    if !(x >= a && x <= b) {
        return Err(GardnerError::OutOfDomain {
            x: x.to64(),
            a: a.to64(),
            b: b.to64(),
        });
    }
    let n = coeffs.n as i64;
    let j = ((x - a) / coeffs.h).floor().to64() as i64;
    let j = j.clamp(0, n - 1);
    let mut u = T::zero();
    let mut ux = T::zero();
    let mut v = T::zero();
    for m in (j - 1)..=(j + 2) {
        let (bm, bpm, _) = evaluate_bspline(m, x, coeffs);
        let idx = (m + 1) as usize;
        u += state.delta[idx] * bm;
        ux += state.delta[idx] * bpm;
        v += state.phi[idx] * bm;
    }
    Ok((u, ux, v))
}
