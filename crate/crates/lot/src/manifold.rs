//! Chart-based complete Riemannian manifolds.
//!
//! Four built-in models, each covered by a single global chart:
//!
//! * `Euclidean` — flat `R^n`, identity chart.
//! * `Torus` — flat `[0,1)^n` with opposite faces glued; coordinates are
//!   canonicalized into the fundamental domain.
//! * `Sphere2` — the round 2-sphere of radius `R` in the stereographic
//!   chart; the chart covers everything except one pole (the pole
//!   antipodal to the chart origin). Metric `4R^2/(1+|u|^2)^2 * id`.
//! * `Hyperbolic2` — the Poincaré disk `|x| < 1` with metric
//!   `4/(1-|x|^2)^2 * id` (curvature -1).
//!
//! All four charts are conformal, which the Lagrangian layer exploits:
//! the metric is a scalar factor times the identity, and its chart
//! gradient is available in closed form.

use crate::error::{LotError, Result};
use crate::linalg;
use std::collections::BTreeMap;

pub const SPHERE_RADIUS_KEY: &str = "radius";

/// Margin below the disk boundary / the excluded sphere pole at which we
/// refuse points: the metric factor varies too fast outside it for any
/// fixed-step integrator to be trusted.
const CHART_EDGE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ManifoldKind {
    Euclidean,
    Torus,
    Sphere2,
    Hyperbolic2,
}

/// A point in chart coordinates. Every built-in model uses one global
/// chart, so `chart_id` is always 0; the field stays so that chart
/// identity travels with the data.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    pub chart_id: u8,
    pub coords: Vec<f64>,
}

/// A tangent vector `v` at `base`, in chart components.
#[derive(Debug, Clone, PartialEq)]
pub struct Tangent {
    pub base: Point,
    pub components: Vec<f64>,
}

impl Tangent {
    pub fn zero(base: Point) -> Self {
        let n = base.coords.len();
        Tangent { base, components: vec![0.0; n] }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ManifoldModel {
    pub kind: ManifoldKind,
    pub dim: usize,
    pub params: BTreeMap<String, f64>,
}

impl ManifoldModel {
    pub fn euclidean(dim: usize) -> Self {
        assert!(dim >= 1);
        ManifoldModel { kind: ManifoldKind::Euclidean, dim, params: BTreeMap::new() }
    }

    pub fn torus(dim: usize) -> Self {
        assert!(dim >= 1);
        ManifoldModel { kind: ManifoldKind::Torus, dim, params: BTreeMap::new() }
    }

    pub fn sphere2(radius: f64) -> Self {
        assert!(radius > 0.0);
        let mut params = BTreeMap::new();
        params.insert(SPHERE_RADIUS_KEY.to_string(), radius);
        ManifoldModel { kind: ManifoldKind::Sphere2, dim: 2, params }
    }

    pub fn hyperbolic2() -> Self {
        ManifoldModel { kind: ManifoldKind::Hyperbolic2, dim: 2, params: BTreeMap::new() }
    }

    pub fn radius(&self) -> f64 {
        *self.params.get(SPHERE_RADIUS_KEY).unwrap_or(&1.0)
    }

    /// Builds an admissible point, canonicalizing torus coordinates into
    /// `[0,1)^n` and rejecting coordinates outside the chart domain.
    pub fn point(&self, coords: Vec<f64>) -> Result<Point> {
        if coords.len() != self.dim {
            return Err(LotError::Input(format!(
                "point has {} coordinates, model dimension is {}",
                coords.len(),
                self.dim
            )));
        }
        if !linalg::all_finite(&coords) {
            return Err(LotError::Domain("non-finite coordinates".into()));
        }
        let coords = match self.kind {
            ManifoldKind::Torus => coords.iter().map(|c| c.rem_euclid(1.0)).collect(),
            ManifoldKind::Hyperbolic2 => {
                if linalg::norm(&coords) >= 1.0 - CHART_EDGE {
                    return Err(LotError::Domain(format!(
                        "|x| = {} is not inside the unit disk",
                        linalg::norm(&coords)
                    )));
                }
                coords
            }
            _ => coords,
        };
        Ok(Point { chart_id: 0, coords })
    }

    pub fn check(&self, x: &Point) -> Result<()> {
        if x.coords.len() != self.dim {
            return Err(LotError::Input(format!(
                "point has {} coordinates, model dimension is {}",
                x.coords.len(),
                self.dim
            )));
        }
        if !linalg::all_finite(&x.coords) {
            return Err(LotError::Domain("non-finite coordinates".into()));
        }
        if self.kind == ManifoldKind::Hyperbolic2 && linalg::norm(&x.coords) >= 1.0 - CHART_EDGE {
            return Err(LotError::Domain("point left the unit disk".into()));
        }
        Ok(())
    }

    /// Conformal factor `cf(x)` with metric `g_x = cf(x) * id`.
    pub fn conformal_factor(&self, coords: &[f64]) -> f64 {
        match self.kind {
            ManifoldKind::Euclidean | ManifoldKind::Torus => 1.0,
            ManifoldKind::Sphere2 => {
                let r = self.radius();
                let s = 1.0 + linalg::norm2(coords);
                4.0 * r * r / (s * s)
            }
            ManifoldKind::Hyperbolic2 => {
                let s = 1.0 - linalg::norm2(coords);
                4.0 / (s * s)
            }
        }
    }

    /// Chart gradient of the conformal factor.
    pub fn conformal_factor_grad(&self, coords: &[f64]) -> Vec<f64> {
        match self.kind {
            ManifoldKind::Euclidean | ManifoldKind::Torus => vec![0.0; self.dim],
            ManifoldKind::Sphere2 => {
                let r = self.radius();
                let s = 1.0 + linalg::norm2(coords);
                let c = -16.0 * r * r / (s * s * s);
                linalg::scale(coords, c)
            }
            ManifoldKind::Hyperbolic2 => {
                let s = 1.0 - linalg::norm2(coords);
                let c = 16.0 / (s * s * s);
                linalg::scale(coords, c)
            }
        }
    }

    /// The Riemannian inner product `g_x(u, v)`.
    pub fn metric(&self, x: &Point, u: &[f64], v: &[f64]) -> f64 {
        self.conformal_factor(&x.coords) * linalg::dot(u, v)
    }

    /// `|v|_x = sqrt(g_x(v, v))`.
    pub fn norm_at(&self, x: &Point, v: &[f64]) -> f64 {
        self.metric(x, v, v).max(0.0).sqrt()
    }

    pub fn tangent(&self, base: Point, components: Vec<f64>) -> Result<Tangent> {
        self.check(&base)?;
        if components.len() != self.dim || !linalg::all_finite(&components) {
            return Err(LotError::Input("bad tangent components".into()));
        }
        Ok(Tangent { base, components })
    }

    /// Geodesic point `exp_x(t * v)`. Total on complete models; the only
    /// failure mode is a sphere geodesic landing on the excluded pole,
    /// which has no chart coordinates.
    pub fn exp(&self, v: &Tangent, t: f64) -> Result<Point> {
        self.check(&v.base)?;
        let w = linalg::scale(&v.components, t);
        if linalg::norm(&w) == 0.0 {
            return Ok(v.base.clone());
        }
        match self.kind {
            ManifoldKind::Euclidean => self.point(linalg::add(&v.base.coords, &w)),
            ManifoldKind::Torus => self.point(linalg::add(&v.base.coords, &w)),
            ManifoldKind::Sphere2 => self.sphere_exp(&v.base.coords, &w),
            ManifoldKind::Hyperbolic2 => self.hyperbolic_exp(&v.base.coords, &w),
        }
    }

    /// Inverse of `exp`: the tangent at `x` pointing at `y` with
    /// `|log(x,y)|_x = dist(x,y)`. Errors on sphere antipodes, where the
    /// minimizing direction is not unique.
    pub fn log(&self, x: &Point, y: &Point) -> Result<Tangent> {
        self.check(x)?;
        self.check(y)?;
        let comps = match self.kind {
            ManifoldKind::Euclidean => linalg::sub(&y.coords, &x.coords),
            ManifoldKind::Torus => wrapped_delta(&x.coords, &y.coords),
            ManifoldKind::Sphere2 => self.sphere_log(&x.coords, &y.coords)?,
            ManifoldKind::Hyperbolic2 => self.hyperbolic_log(&x.coords, &y.coords),
        };
        Ok(Tangent { base: x.clone(), components: comps })
    }

    /// Riemannian distance.
    pub fn dist(&self, x: &Point, y: &Point) -> f64 {
        match self.kind {
            ManifoldKind::Euclidean => linalg::dist_euclid(&x.coords, &y.coords),
            ManifoldKind::Torus => linalg::norm(&wrapped_delta(&x.coords, &y.coords)),
            ManifoldKind::Sphere2 => {
                let r = self.radius();
                let p = sphere_embed(&x.coords, r);
                let q = sphere_embed(&y.coords, r);
                // atan2 of (|p x q|, p.q) stays fully accurate where an
                // acos of the normalized dot product loses half its
                // digits (nearly equal and nearly antipodal pairs).
                let cross = [
                    p[1] * q[2] - p[2] * q[1],
                    p[2] * q[0] - p[0] * q[2],
                    p[0] * q[1] - p[1] * q[0],
                ];
                r * linalg::norm(&cross).atan2(linalg::dot(&p, &q))
            }
            ManifoldKind::Hyperbolic2 => {
                let d = mobius_add(&linalg::scale(&x.coords, -1.0), &y.coords);
                2.0 * linalg::norm(&d).clamp(0.0, 1.0 - f64::EPSILON).atanh()
            }
        }
    }

    // ---- sphere chart machinery -------------------------------------

    fn sphere_exp(&self, u: &[f64], w_chart: &[f64]) -> Result<Point> {
        let r = self.radius();
        let p = sphere_embed(u, r);
        let jac = sphere_jacobian(u, r);
        let w = jac_apply(&jac, w_chart);
        let speed = linalg::norm(&w);
        if speed == 0.0 {
            return self.point(u.to_vec());
        }
        let ang = speed / r;
        // q = cos(ang) p + sin(ang) (R/|w|) w; rescale exactly onto the sphere
        // to stop rounding drift before chart projection.
        let q: Vec<f64> = (0..3)
            .map(|i| ang.cos() * p[i] + ang.sin() * (r / speed) * w[i])
            .collect();
        let qn = linalg::norm(&q);
        let q = linalg::scale(&q, r / qn);
        sphere_chart(&q, r).map(|coords| Point { chart_id: 0, coords })
    }

    fn sphere_log(&self, u: &[f64], v: &[f64]) -> Result<Vec<f64>> {
        let r = self.radius();
        let p = sphere_embed(u, r);
        let q = sphere_embed(v, r);
        let c = (linalg::dot(&p, &q) / (r * r)).clamp(-1.0, 1.0);
        let theta = c.acos();
        if theta == 0.0 {
            return Ok(vec![0.0; self.dim]);
        }
        if std::f64::consts::PI - theta < 1e-9 {
            return Err(LotError::AmbiguousLog(
                "antipodal points on the sphere: every direction minimizes".into(),
            ));
        }
        // w = (theta/sin theta) (q - cos(theta) p) has |w| = R*theta = dist.
        let sin = theta.sin();
        let w: Vec<f64> = (0..3).map(|i| theta / sin * (q[i] - c * p[i])).collect();
        Ok(self.sphere_pullback(u, &w))
    }

    /// Pulls an embedded tangent vector at `sigma(u)` back to chart
    /// components: `J^T w / lambda^2`, using that `J^T J = lambda^2 id`.
    fn sphere_pullback(&self, u: &[f64], w: &[f64]) -> Vec<f64> {
        let r = self.radius();
        let jac = sphere_jacobian(u, r);
        let lam2 = self.conformal_factor(u);
        (0..2)
            .map(|k| (0..3).map(|i| jac[i][k] * w[i]).sum::<f64>() / lam2)
            .collect()
    }

    // ---- Poincaré disk machinery ------------------------------------

    fn hyperbolic_exp(&self, x: &[f64], w: &[f64]) -> Result<Point> {
        let wn = linalg::norm(w);
        if wn == 0.0 {
            return self.point(x.to_vec());
        }
        let lam = 2.0 / (1.0 - linalg::norm2(x));
        let gnorm = lam * wn;
        let dir = linalg::scale(w, 1.0 / wn);
        let step = linalg::scale(&dir, (gnorm / 2.0).tanh());
        self.point(mobius_add(x, &step))
    }

    fn hyperbolic_log(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        let d = mobius_add(&linalg::scale(x, -1.0), y);
        let dn = linalg::norm(&d);
        if dn == 0.0 {
            return vec![0.0; x.len()];
        }
        let dist = 2.0 * dn.clamp(0.0, 1.0 - f64::EPSILON).atanh();
        let lam = 2.0 / (1.0 - linalg::norm2(x));
        linalg::scale(&d, dist / (lam * dn))
    }
}

/// Shortest per-axis representative of `y - x` on the flat torus, each
/// component wrapped into `[-1/2, 1/2)`. For the product metric this is
/// exactly the minimum over the 3^n lattice translates: the squared norm
/// decomposes per axis, so each axis minimizes independently.
pub fn wrapped_delta(x: &[f64], y: &[f64]) -> Vec<f64> {
    x.iter()
        .zip(y)
        .map(|(a, b)| {
            let mut d = (b - a).rem_euclid(1.0);
            if d >= 0.5 {
                d -= 1.0;
            }
            d
        })
        .collect()
}

/// Embeds chart coordinates onto the radius-`r` sphere in `R^3`. The
/// chart origin maps to the pole `(0,0,-r)`; the excluded pole is
/// `(0,0,r)`.
pub fn sphere_embed(u: &[f64], r: f64) -> Vec<f64> {
    let s = 1.0 + linalg::norm2(u);
    vec![2.0 * r * u[0] / s, 2.0 * r * u[1] / s, r * (linalg::norm2(u) - 1.0) / s]
}

/// Chart coordinates of an embedded sphere point, failing on (a small
/// neighborhood of) the excluded pole.
pub fn sphere_chart(q: &[f64], r: f64) -> Result<Vec<f64>> {
    let z = q[2] / r;
    if 1.0 - z < CHART_EDGE {
        return Err(LotError::Domain(
            "geodesic reached the pole excluded by the stereographic chart".into(),
        ));
    }
    Ok(vec![q[0] / r / (1.0 - z), q[1] / r / (1.0 - z)])
}

/// Columns of the embedding differential, `jac[i][k] = d sigma_i / d u_k`.
fn sphere_jacobian(u: &[f64], r: f64) -> [[f64; 2]; 3] {
    let s = 1.0 + linalg::norm2(u);
    let mut jac = [[0.0; 2]; 3];
    for k in 0..2 {
        for j in 0..2 {
            let kron = if j == k { 1.0 } else { 0.0 };
            jac[j][k] = r * (2.0 * kron * s - 4.0 * u[j] * u[k]) / (s * s);
        }
        jac[2][k] = 4.0 * r * u[k] / (s * s);
    }
    jac
}

fn jac_apply(jac: &[[f64; 2]; 3], v: &[f64]) -> Vec<f64> {
    (0..3).map(|i| jac[i][0] * v[0] + jac[i][1] * v[1]).collect()
}

/// Möbius addition on the unit ball (curvature -1 convention).
pub fn mobius_add(a: &[f64], b: &[f64]) -> Vec<f64> {
    let ab = linalg::dot(a, b);
    let na = linalg::norm2(a);
    let nb = linalg::norm2(b);
    let den = 1.0 + 2.0 * ab + na * nb;
    let ca = (1.0 + 2.0 * ab + nb) / den;
    let cb = (1.0 - na) / den;
    linalg::axpy(&linalg::scale(a, ca), cb, b)
}
