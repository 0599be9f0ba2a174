//! Fiberwise-convex Lagrangians and the two flows they induce.
//!
//! The built-in family is `L(x, v) = |v|_x^r` for `r > 1` (power of the
//! metric norm), for which the fiber derivative, its inverse and the
//! Hamiltonian all have closed forms in a conformal chart. Arbitrary
//! Lagrangians enter through callbacks for the value and its two partial
//! derivatives; the fiber derivative is then inverted by a damped Newton
//! iteration, which is what strict fiberwise convexity licenses.
//!
//! Flows integrate the first-order Hamiltonian system
//!
//! ```text
//! x' = dH/dp (x, p) = (dL/dv)^{-1} (x, p)      (Legendre inverse)
//! p' = -dH/dx (x, p) = dL/dx (x, v(x, p))
//! ```
//!
//! with fixed-step RK4. The Euler-Lagrange flow is defined as the
//! conjugation of the Hamiltonian flow by the fiber derivative, so the
//! two agree bit for bit wherever both are sampled.

use crate::error::{LotError, Result};
use crate::linalg;
use crate::manifold::{ManifoldModel, Point, Tangent};
use crate::tol;

type DynScalar = Box<dyn Fn(&[f64], &[f64]) -> f64 + Send + Sync>;
type DynVector = Box<dyn Fn(&[f64], &[f64]) -> Vec<f64> + Send + Sync>;

enum Family {
    /// `L(x, v) = |v|_x^r`, `r > 1`.
    Power { r: f64 },
    Custom { value: DynScalar, fiber: DynVector, position: DynVector },
}

pub struct Lagrangian {
    pub manifold: ManifoldModel,
    family: Family,
}

impl std::fmt::Debug for Lagrangian {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.family {
            Family::Power { r } => write!(f, "Lagrangian::power_metric(r = {r})"),
            Family::Custom { .. } => write!(f, "Lagrangian::custom"),
        }
    }
}

/// Number of RK4 steps for a horizon `t`: 1000 per unit of time, rounded
/// up to a multiple of 200 so downstream quadrature can subsample onto
/// 200 even intervals.
pub fn default_steps(t: f64) -> usize {
    let raw = (tol::STEPS_PER_UNIT_TIME as f64 * t.abs()).ceil().max(1.0);
    200 * ((raw / 200.0).ceil() as usize).max(1)
}

/// A sampled integral curve in phase space. `positions` live in the
/// chart's universal cover (torus coordinates are not wrapped between
/// samples, so velocities stay consistent with divided differences).
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub positions: Vec<Vec<f64>>,
    pub momenta: Vec<Vec<f64>>,
    pub velocities: Vec<Vec<f64>>,
    /// `max_i |E(t_i) - E(t_0)|` of the conserved energy along the run.
    pub energy_drift: f64,
}

impl Trajectory {
    pub fn endpoint(&self, m: &ManifoldModel) -> Result<Point> {
        m.point(self.positions.last().expect("nonempty trajectory").clone())
    }

    pub fn endpoint_velocity(&self) -> &[f64] {
        self.velocities.last().expect("nonempty trajectory")
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

impl Lagrangian {
    pub fn power_metric(manifold: ManifoldModel, r: f64) -> Result<Self> {
        if !(r > 1.0) || !r.is_finite() {
            return Err(LotError::Input(format!(
                "power-metric exponent must satisfy r > 1, got {r}"
            )));
        }
        Ok(Lagrangian { manifold, family: Family::Power { r } })
    }

    pub fn custom(
        manifold: ManifoldModel,
        value: DynScalar,
        fiber: DynVector,
        position: DynVector,
    ) -> Self {
        Lagrangian { manifold, family: Family::Custom { value, fiber, position } }
    }

    /// `Some(r)` for the power-of-metric family. Closed-form cost and
    /// map layers key off this.
    pub fn power_exponent(&self) -> Option<f64> {
        match self.family {
            Family::Power { r } => Some(r),
            Family::Custom { .. } => None,
        }
    }

    pub fn value(&self, x: &[f64], v: &[f64]) -> f64 {
        match &self.family {
            Family::Power { r } => {
                let q = self.manifold.conformal_factor(x) * linalg::norm2(v);
                q.powf(r / 2.0)
            }
            Family::Custom { value, .. } => value(x, v),
        }
    }

    /// Fiber derivative `p = dL/dv (x, v)`, a covector in chart
    /// components. Vanishes at `v = 0` for every `r > 1`.
    pub fn fiber_derivative(&self, x: &[f64], v: &[f64]) -> Vec<f64> {
        match &self.family {
            Family::Power { r } => {
                let vn = linalg::norm(v);
                if vn == 0.0 {
                    return vec![0.0; v.len()];
                }
                let cf = self.manifold.conformal_factor(x);
                linalg::scale(v, r * cf.powf(r / 2.0) * vn.powf(r - 2.0))
            }
            Family::Custom { fiber, .. } => fiber(x, v),
        }
    }

    /// `dL/dx (x, v)` in chart components.
    pub fn position_derivative(&self, x: &[f64], v: &[f64]) -> Vec<f64> {
        match &self.family {
            Family::Power { r } => {
                let vn = linalg::norm(v);
                if vn == 0.0 {
                    return vec![0.0; x.len()];
                }
                let cf = self.manifold.conformal_factor(x);
                let grad = self.manifold.conformal_factor_grad(x);
                linalg::scale(&grad, r / 2.0 * cf.powf(r / 2.0 - 1.0) * vn.powf(*r))
            }
            Family::Custom { position, .. } => position(x, v),
        }
    }

    /// Inverts the fiber derivative: the unique `v` with
    /// `dL/dv (x, v) = p`. Closed form for the power family; damped
    /// Newton with a finite-difference Jacobian otherwise.
    pub fn legendre_inverse(&self, x: &[f64], p: &[f64]) -> Result<Vec<f64>> {
        match &self.family {
            Family::Power { r } => {
                let pn = linalg::norm(p);
                // Below this the direction p/|p| is pure noise; the
                // reconstructed speed is at most (1e-12/r)^{1/(r-1)}.
                if pn <= tol::MOMENTUM_FREEZE {
                    return Ok(vec![0.0; p.len()]);
                }
                let cf = self.manifold.conformal_factor(x);
                let dual = pn / cf.sqrt();
                let speed_metric = (dual / r).powf(1.0 / (r - 1.0));
                let speed_chart = speed_metric / cf.sqrt();
                Ok(linalg::scale(p, speed_chart / pn))
            }
            Family::Custom { fiber, .. } => newton_fiber_inverse(fiber, x, p),
        }
    }

    /// Legendre transform `H(x, p) = sup_v [ p.v - L(x, v) ]`. For the
    /// power family `H = (r-1) (|p|_x* / r)^{r/(r-1)}` with `|.|_x*` the
    /// dual metric norm; otherwise the supremum is attained at the
    /// Legendre inverse.
    pub fn hamiltonian(&self, x: &[f64], p: &[f64]) -> Result<f64> {
        match &self.family {
            Family::Power { r } => {
                let cf = self.manifold.conformal_factor(x);
                let dual = linalg::norm(p) / cf.sqrt();
                Ok((r - 1.0) * (dual / r).powf(r / (r - 1.0)))
            }
            Family::Custom { value, .. } => {
                let v = self.legendre_inverse(x, p)?;
                Ok(linalg::dot(p, &v) - value(x, &v))
            }
        }
    }

    /// The conserved energy `E(x, v) = dL/dv(x,v).v - L(x, v)`; equals
    /// `(r-1) |v|_x^r` for the power family.
    pub fn energy(&self, x: &[f64], v: &[f64]) -> f64 {
        match &self.family {
            Family::Power { r } => {
                let q = self.manifold.conformal_factor(x) * linalg::norm2(v);
                (r - 1.0) * q.powf(r / 2.0)
            }
            Family::Custom { value, fiber, .. } => {
                linalg::dot(&fiber(x, v), v) - value(x, v)
            }
        }
    }

    /// Integrates the Hamiltonian system from `(x0, p0)` for time `t`
    /// with `steps` RK4 steps, sampling every step.
    pub fn hamiltonian_flow(
        &self,
        x0: &Point,
        p0: &[f64],
        t: f64,
        steps: usize,
    ) -> Result<Trajectory> {
        self.manifold.check(x0)?;
        if steps == 0 {
            return Err(LotError::Input("flow needs at least one step".into()));
        }
        let n = x0.coords.len();
        if p0.len() != n || !linalg::all_finite(p0) {
            return Err(LotError::Input("bad initial momentum".into()));
        }
        let h = t / steps as f64;
        let mut x = x0.coords.clone();
        let mut p = p0.to_vec();

        let mut times = Vec::with_capacity(steps + 1);
        let mut positions = Vec::with_capacity(steps + 1);
        let mut momenta = Vec::with_capacity(steps + 1);
        let mut velocities = Vec::with_capacity(steps + 1);

        let rhs = |x: &[f64], p: &[f64]| -> Result<(Vec<f64>, Vec<f64>)> {
            let v = self.legendre_inverse(x, p)?;
            let pd = self.position_derivative(x, &v);
            Ok((v, pd))
        };

        let v0 = self.legendre_inverse(&x, &p)?;
        let e0 = linalg::dot(&p, &v0) - self.value(&x, &v0);
        let mut drift = 0.0f64;
        times.push(0.0);
        positions.push(x.clone());
        momenta.push(p.clone());
        velocities.push(v0);

        for i in 0..steps {
            let (k1x, k1p) = rhs(&x, &p)?;
            let (k2x, k2p) = rhs(&linalg::axpy(&x, h / 2.0, &k1x), &linalg::axpy(&p, h / 2.0, &k1p))?;
            let (k3x, k3p) = rhs(&linalg::axpy(&x, h / 2.0, &k2x), &linalg::axpy(&p, h / 2.0, &k2p))?;
            let (k4x, k4p) = rhs(&linalg::axpy(&x, h, &k3x), &linalg::axpy(&p, h, &k3p))?;
            for j in 0..n {
                x[j] += h / 6.0 * (k1x[j] + 2.0 * k2x[j] + 2.0 * k3x[j] + k4x[j]);
                p[j] += h / 6.0 * (k1p[j] + 2.0 * k2p[j] + 2.0 * k3p[j] + k4p[j]);
            }
            if !linalg::all_finite(&x) || !linalg::all_finite(&p) {
                return Err(LotError::Integration(format!(
                    "state left the chart after step {} of {}",
                    i + 1,
                    steps
                )));
            }
            let v = self.legendre_inverse(&x, &p)?;
            let e = linalg::dot(&p, &v) - self.value(&x, &v);
            drift = drift.max((e - e0).abs());
            times.push(t * (i + 1) as f64 / steps as f64);
            positions.push(x.clone());
            momenta.push(p.clone());
            velocities.push(v);
        }

        Ok(Trajectory { times, positions, momenta, velocities, energy_drift: drift })
    }

    /// Euler-Lagrange flow from an initial tangent vector: the
    /// Hamiltonian flow conjugated by the fiber derivative.
    pub fn euler_lagrange_flow(&self, v0: &Tangent, t: f64, steps: usize) -> Result<Trajectory> {
        let p0 = self.fiber_derivative(&v0.base.coords, &v0.components);
        self.hamiltonian_flow(&v0.base, &p0, t, steps)
    }
}

/// Damped Newton solve of `fiber(x, v) = p` for `v`, seeded at `p / 2`
/// (exact when `L` is the squared euclidean speed).
fn newton_fiber_inverse(
    fiber: &DynVector,
    x: &[f64],
    p: &[f64],
) -> Result<Vec<f64>> {
    let n = p.len();
    let mut v = linalg::scale(p, 0.5);
    let res = |v: &[f64]| -> Vec<f64> { linalg::sub(&fiber(x, v), p) };
    let mut f = res(&v);
    let target = 1e-12 * (1.0 + linalg::norm(p));
    for _ in 0..60 {
        let fn0 = linalg::norm(&f);
        if fn0 <= target {
            return Ok(v);
        }
        let mut jac = nalgebra::DMatrix::<f64>::zeros(n, n);
        for j in 0..n {
            let h = tol::FD_STEP * (1.0 + v[j].abs());
            let mut vp = v.clone();
            vp[j] += h;
            let mut vm = v.clone();
            vm[j] -= h;
            let fp = fiber(x, &vp);
            let fm = fiber(x, &vm);
            for i in 0..n {
                jac[(i, j)] = (fp[i] - fm[i]) / (2.0 * h);
            }
        }
        let rhs = nalgebra::DVector::from_iterator(n, f.iter().map(|r| -r));
        let dv = jac.lu().solve(&rhs).ok_or_else(|| LotError::Convergence {
            context: "singular fiber-derivative Jacobian in Legendre inversion".into(),
            residual: fn0,
        })?;
        let mut s = 1.0;
        loop {
            let trial: Vec<f64> = (0..n).map(|i| v[i] + s * dv[i]).collect();
            let ft = res(&trial);
            if linalg::norm(&ft) <= (1.0 - 0.25 * s) * fn0 || s < 1e-4 {
                v = trial;
                f = ft;
                break;
            }
            s /= 2.0;
        }
    }
    let fin = linalg::norm(&f);
    if fin <= 1e-9 * (1.0 + linalg::norm(p)) {
        return Ok(v);
    }
    Err(LotError::Convergence {
        context: "Legendre inversion did not converge".into(),
        residual: fin,
    })
}
