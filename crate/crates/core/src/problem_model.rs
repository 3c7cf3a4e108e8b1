//! Problem definition: equation parameters, grid, time stepping, initial
//! data, and the three built-in benchmark problems.
//!
//! The equation solved is `u_t + mu1*u*u_x + mu2*u^2*u_x + mu3*u_xxx = 0`
//! on a finite interval `[a, b]` with zero Neumann data at both ends (a
//! structural assumption: the benchmark solutions decay to constants at the
//! artificial boundaries).

use std::sync::Arc;

use crate::scalar::Scalar;
use crate::{GardnerError, Result};

/// Constant coefficients of the equation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GardnerParameters<T> {
    /// Quadratic nonlinearity coefficient.
    pub mu1: T,
    /// Cubic nonlinearity coefficient.
    pub mu2: T,
    /// Dispersion coefficient; must be nonzero.
    pub mu3: T,
}

impl<T: Scalar> GardnerParameters<T> {
    pub fn new(mu1: T, mu2: T, mu3: T) -> Result<Self> {
        if mu3 == T::zero() || !mu3.is_finite() {
            return Err(GardnerError::DegenerateDispersion);
        }
        Ok(Self { mu1, mu2, mu3 })
    }
}

/// Uniform spatial grid `x_m = a + m*h`, `m = 0..=n`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid<T> {
    pub a: T,
    pub b: T,
    /// Element count; there are `n + 1` nodes.
    pub n: usize,
    /// Spacing `(b - a)/n`.
    pub h: T,
}

impl<T: Scalar> Grid<T> {
    pub fn new(a: T, b: T, n: usize) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) || a >= b || n < 4 {
            return Err(GardnerError::InvalidGrid {
                a: a.to64(),
                b: b.to64(),
                n,
            });
        }
        let h = (b - a) / T::from_usize(n).unwrap();
        Ok(Self { a, b, n, h })
    }

    /// Node coordinate `x_m`.
    pub fn node(&self, m: usize) -> T {
        self.a + self.h * T::from_usize(m).unwrap()
    }

    /// All node coordinates.
    pub fn nodes(&self) -> Vec<T> {
        (0..=self.n).map(|m| self.node(m)).collect()
    }
}

/// Scalar field of one variable, shared and clonable.
pub type SpatialFn<T> = Arc<dyn Fn(T) -> T + Send + Sync>;
/// Scalar field of space and time.
pub type SpaceTimeFn<T> = Arc<dyn Fn(T, T) -> T + Send + Sync>;

/// Full specification of one initial-boundary-value problem.
#[derive(Clone)]
pub struct ProblemSpec<T> {
    pub params: GardnerParameters<T>,
    pub grid: Grid<T>,
    pub dt: T,
    /// Shape parameter of the exponential spline basis.
    pub zeta: T,
    pub t_end: T,
    /// Initial profile `u(x, 0)`.
    pub initial_u: SpatialFn<T>,
    /// Initial profile of the auxiliary field `v = u_x` at `t = 0`.
    pub initial_v: SpatialFn<T>,
    /// Exact solution `u(x, t)` when one is known.
    pub analytical: Option<SpaceTimeFn<T>>,
    /// Exact spatial derivative `u_x(x, t)` when one is known.
    pub analytical_ux: Option<SpaceTimeFn<T>>,
}

impl<T> std::fmt::Debug for ProblemSpec<T>
where
    T: std::fmt::Debug,
{
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("params", &self.params)
            .field("grid", &self.grid)
            .field("dt", &self.dt)
            .field("zeta", &self.zeta)
            .field("t_end", &self.t_end)
            .field("analytical", &self.analytical.is_some())
            .finish()
    }
}

impl<T: Scalar> ProblemSpec<T> {
    /// Validates the numeric fields (`dt > 0`, `zeta > 0`, `t_end >= 0`).
    /// `t_end = 0` is allowed and means "evaluate the initial data only".
    pub fn validate(&self) -> Result<()> {
        if self.params.mu3 == T::zero() {
            return Err(GardnerError::DegenerateDispersion);
        }
        if !(self.dt > T::zero() && self.dt.is_finite())
            || !(self.t_end >= T::zero() && self.t_end.is_finite())
        {
            return Err(GardnerError::InvalidTimeParameters {
                dt: self.dt.to64(),
                t_end: self.t_end.to64(),
            });
        }
        if !(self.zeta > T::zero() && self.zeta.is_finite()) {
            return Err(GardnerError::InvalidBasisParameters {
                zeta: self.zeta.to64(),
                h: self.grid.h.to64(),
            });
        }
        Ok(())
    }

    /// Number of time steps a full run performs.
    pub fn step_count(&self) -> usize {
        let steps = (self.t_end / self.dt).to64().round();
        if steps < 0.0 {
            0
        } else {
            steps as usize
        }
    }

    /// Returns a copy with a different shape parameter (used by scans).
    pub fn with_zeta(&self, zeta: T) -> Self {
        let mut s = self.clone();
        s.zeta = zeta;
        s
    }
}

/// Builds `v(x,0)` by sampling `u(x,0)` with 4th-order finite differences on
/// the grid: centered five-point stencils inside, one-sided at the ends.
/// Used when no closed-form derivative of a custom initial profile exists.
pub fn derivative_fallback<T: Scalar>(u0: &SpatialFn<T>, grid: &Grid<T>) -> SpatialFn<T> {
    let n = grid.n;
    let h = grid.h;
    let twelfth = T::lit(1.0) / (T::lit(12.0) * h);
    let us: Vec<T> = grid.nodes().iter().map(|&x| u0(x)).collect();
    let mut v = vec![T::zero(); n + 1];
    for (m, vm) in v.iter_mut().enumerate() {
        *vm = if m >= 2 && m + 2 <= n {
            (us[m - 2] - T::lit(8.0) * us[m - 1] + T::lit(8.0) * us[m + 1] - us[m + 2]) * twelfth
        } else if m == 0 {
            (T::lit(-25.0) * us[0] + T::lit(48.0) * us[1] - T::lit(36.0) * us[2]
                + T::lit(16.0) * us[3]
                - T::lit(3.0) * us[4])
                * twelfth
        } else if m == 1 {
            (T::lit(-3.0) * us[0] - T::lit(10.0) * us[1] + T::lit(18.0) * us[2]
                - T::lit(6.0) * us[3]
                + us[4])
                * twelfth
        } else if m == n - 1 {
            (T::lit(3.0) * us[n] + T::lit(10.0) * us[n - 1] - T::lit(18.0) * us[n - 2]
                + T::lit(6.0) * us[n - 3]
                - us[n - 4])
                * twelfth
        } else {
            (T::lit(25.0) * us[n] - T::lit(48.0) * us[n - 1] + T::lit(36.0) * us[n - 2]
                - T::lit(16.0) * us[n - 3]
                + T::lit(3.0) * us[n - 4])
                * twelfth
        };
    }
    let a = grid.a;
    Arc::new(move |x: T| {
        // nearest-node lookup keeps the fallback a pure grid sampling
        let idx = ((x - a) / h).to64().round();
        let idx = idx.clamp(0.0, n as f64) as usize;
        v[idx]
    })
}

/// Pulse benchmark: single solitary wave with `mu = (4, -3, 1)` on
/// `[-20, 30]`, exact solution
/// `u(x,t) = 2/(12 + 3*sqrt(14)*cosh(-x/3 + 5/3 + t/27))`.
pub fn example1_spec<T: Scalar>(n: usize, dt: T, zeta: T) -> Result<ProblemSpec<T>> {
    let params = GardnerParameters::new(T::lit(4.0), T::lit(-3.0), T::lit(1.0))?;
    let grid = Grid::new(T::lit(-20.0), T::lit(30.0), n)?;
    let third = T::lit(1.0 / 3.0);
    let s14 = T::lit(14.0).sqrt();
    let u = move |x: T, t: T| -> T {
        let theta = -x * third + T::lit(5.0 / 3.0) + t / T::lit(27.0);
        T::lit(2.0) / (T::lit(12.0) + T::lit(3.0) * s14 * theta.cosh())
    };
    let ux = move |x: T, t: T| -> T {
        let theta = -x * third + T::lit(5.0 / 3.0) + t / T::lit(27.0);
        let den = T::lit(12.0) + T::lit(3.0) * s14 * theta.cosh();
        T::lit(2.0) * s14 * theta.sinh() / (den * den)
    };
    Ok(ProblemSpec {
        params,
        grid,
        dt,
        zeta,
        t_end: T::lit(5.0),
        initial_u: Arc::new(move |x| u(x, T::zero())),
        initial_v: Arc::new(move |x| ux(x, T::zero())),
        analytical: Some(Arc::new(u)),
        analytical_ux: Some(Arc::new(ux)),
    })
}

/// Kink benchmark: travelling front with `mu = (1, -5, 1)` on `[-80, 80]`,
/// exact solution `u(x,t) = 1/10 - tanh((x - t/30)*sqrt(30)/60)/10`.
pub fn example2_spec<T: Scalar>(n: usize, dt: T, zeta: T) -> Result<ProblemSpec<T>> {
    let params = GardnerParameters::new(T::lit(1.0), T::lit(-5.0), T::lit(1.0))?;
    let grid = Grid::new(T::lit(-80.0), T::lit(80.0), n)?;
    let s30 = T::lit(30.0).sqrt();
    let tenth = T::lit(0.1);
    let u = move |x: T, t: T| -> T {
        let s = (x - t / T::lit(30.0)) * s30 / T::lit(60.0);
        tenth - tenth * s.tanh()
    };
    let ux = move |x: T, t: T| -> T {
        let s = (x - t / T::lit(30.0)) * s30 / T::lit(60.0);
        let sech = T::lit(1.0) / s.cosh();
        -s30 / T::lit(600.0) * sech * sech
    };
    Ok(ProblemSpec {
        params,
        grid,
        dt,
        zeta,
        t_end: T::lit(12.0),
        initial_u: Arc::new(move |x| u(x, T::zero())),
        initial_v: Arc::new(move |x| ux(x, T::zero())),
        analytical: Some(Arc::new(u)),
        analytical_ux: Some(Arc::new(ux)),
    })
}

/// Wave-generation benchmark: `mu = (10, -3, 1)` on `[-40, 60]`, initial
/// pulse `u(x,0) = (10/3)/(4 + sqrt(14)*cosh(x/3 - 5/3))`, no closed-form
/// solution (the pulse sheds a wave train).
pub fn example3_spec<T: Scalar>(n: usize, dt: T, zeta: T) -> Result<ProblemSpec<T>> {
    let params = GardnerParameters::new(T::lit(10.0), T::lit(-3.0), T::lit(1.0))?;
    let grid = Grid::new(T::lit(-40.0), T::lit(60.0), n)?;
    let third = T::lit(1.0 / 3.0);
    let s14 = T::lit(14.0).sqrt();
    let u0 = move |x: T| -> T {
        let theta = x * third - T::lit(5.0 / 3.0);
        T::lit(10.0 / 3.0) / (T::lit(4.0) + s14 * theta.cosh())
    };
    let v0 = move |x: T| -> T {
        let theta = x * third - T::lit(5.0 / 3.0);
        let den = T::lit(4.0) + s14 * theta.cosh();
        -T::lit(10.0 / 9.0) * s14 * theta.sinh() / (den * den)
    };
    Ok(ProblemSpec {
        params,
        grid,
        dt,
        zeta,
        t_end: T::lit(15.0),
        initial_u: Arc::new(u0),
        initial_v: Arc::new(v0),
        analytical: None,
        analytical_ux: None,
    })
}
