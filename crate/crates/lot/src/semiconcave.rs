//! Sampling-based semi-concavity certificates.
//!
//! A field `f` is semi-concave with linear modulus `k` on a box when
//! every pair of sample points satisfies
//!
//! ```text
//! f(y) - f(x) - l_x.(y - x) <= k |y - x|^2
//! ```
//!
//! with `l_x` a central-difference gradient. Certificates here are
//! falsification devices at desk scale, not proofs: they sample a
//! deterministic grid plus seeded uniform points and report the worst
//! violation. The module also certifies pointwise infima of uniformly
//! semi-concave families (which stay semi-concave with the same
//! constant) and runs the touching criterion: where a semi-convex field
//! touches a semi-concave field from below, both are differentiable
//! with a common gradient, and that gradient varies in a Lipschitz way
//! along the contact set.

use crate::error::{LotError, Result};
use crate::linalg;
use crate::tol;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Seed for the uniform half of every certificate's sample set.
pub const SAMPLE_SEED: u64 = 0x5EED_CAFE;

pub type ScalarField<'a> = dyn Fn(&[f64]) -> f64 + 'a;

/// Axis-aligned closed box in chart coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct ChartBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl ChartBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(LotError::Input("box bounds have mismatched dimensions".into()));
        }
        if lo.iter().zip(&hi).any(|(a, b)| !(a < b) || !a.is_finite() || !b.is_finite()) {
            return Err(LotError::Input("box needs finite lo < hi per axis".into()));
        }
        Ok(ChartBox { lo, hi })
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn diameter(&self) -> f64 {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(a, b)| (b - a) * (b - a))
            .sum::<f64>()
            .sqrt()
    }

    /// Inclusive per-axis grid with `per_axis` nodes, row-major order.
    pub fn grid(&self, per_axis: usize) -> Vec<Vec<f64>> {
        let n = self.dim();
        let mut out = Vec::with_capacity(per_axis.pow(n as u32));
        let mut idx = vec![0usize; n];
        loop {
            out.push(
                (0..n)
                    .map(|j| {
                        let a = idx[j] as f64 / (per_axis - 1) as f64;
                        self.lo[j] * (1.0 - a) + self.hi[j] * a
                    })
                    .collect(),
            );
            let mut j = 0;
            loop {
                idx[j] += 1;
                if idx[j] < per_axis {
                    break;
                }
                idx[j] = 0;
                j += 1;
                if j == n {
                    return out;
                }
            }
        }
    }

    fn sample_uniform(&self, rng: &mut ChaCha8Rng, count: usize) -> Vec<Vec<f64>> {
        (0..count)
            .map(|_| {
                (0..self.dim())
                    .map(|j| rng.gen_range(self.lo[j]..=self.hi[j]))
                    .collect()
            })
            .collect()
    }

    /// Grid points plus `extra` seeded uniform points: the sample set
    /// every certificate in this module ranges over.
    pub fn sample_set(&self, budget: usize) -> Vec<Vec<f64>> {
        let per_axis = ((budget as f64).powf(1.0 / self.dim() as f64).round() as usize).max(3);
        let mut pts = self.grid(per_axis);
        let mut rng = ChaCha8Rng::seed_from_u64(SAMPLE_SEED);
        pts.extend(self.sample_uniform(&mut rng, budget));
        pts
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Modulus {
    /// `omega(t) = k t`, entering the defect as the slack `k |y-x|^2`.
    Linear { k: f64 },
    /// Piecewise-constant upper envelope `(radius, omega)` with
    /// `omega(0) = 0`, nondecreasing.
    Tabulated { grid: Vec<(f64, f64)> },
}

#[derive(Debug, Clone)]
pub struct ModulusCertificate {
    pub modulus: Modulus,
    pub domain: ChartBox,
    pub samples: usize,
    pub max_violation: f64,
    /// `1 + max |f|` over the sample set; the PASS threshold is
    /// `1e-7 * scale`.
    pub scale: f64,
    pub pass: bool,
    /// Largest sampled gradient norm, used by the Lipschitz bound
    /// `|f(x) - f(y)| <= (max |l| + omega(diam)) |x - y|`.
    pub max_gradient_norm: f64,
}

fn central_gradient(f: &ScalarField, x: &[f64]) -> Result<Vec<f64>> {
    let mut g = Vec::with_capacity(x.len());
    for j in 0..x.len() {
        let h = 1e-5 * (1.0 + x[j].abs());
        let mut xp = x.to_vec();
        xp[j] += h;
        let mut xm = x.to_vec();
        xm[j] -= h;
        let (fp, fm) = (f(&xp), f(&xm));
        if !fp.is_finite() || !fm.is_finite() {
            return Err(LotError::Numerical("field evaluated to a non-finite value".into()));
        }
        g.push((fp - fm) / (2.0 * h));
    }
    Ok(g)
}

struct SampledField {
    points: Vec<Vec<f64>>,
    values: Vec<f64>,
    grads: Vec<Vec<f64>>,
    scale: f64,
}

fn sample_field(f: &ScalarField, domain: &ChartBox, budget: usize) -> Result<SampledField> {
    let points = domain.sample_set(budget);
    let mut values = Vec::with_capacity(points.len());
    let mut grads = Vec::with_capacity(points.len());
    let mut scale = 1.0f64;
    for p in &points {
        let v = f(p);
        if !v.is_finite() {
            return Err(LotError::Numerical("field evaluated to a non-finite value".into()));
        }
        scale = scale.max(1.0 + v.abs());
        values.push(v);
        grads.push(central_gradient(f, p)?);
    }
    Ok(SampledField { points, values, grads, scale })
}

/// Certifies `f` as semi-concave with linear modulus `k` on the box by
/// exhausting sample pairs. `samples` budgets both the grid resolution
/// and the number of extra uniform points.
pub fn certify_semiconcave(
    f: &ScalarField,
    domain: &ChartBox,
    samples: usize,
    k: f64,
) -> Result<ModulusCertificate> {
    if k < 0.0 || !k.is_finite() {
        return Err(LotError::Input("modulus constant must be finite and >= 0".into()));
    }
    let s = sample_field(f, domain, samples)?;
    let mut max_violation = f64::NEG_INFINITY;
    let mut max_grad = 0.0f64;
    for (i, x) in s.points.iter().enumerate() {
        max_grad = max_grad.max(linalg::norm(&s.grads[i]));
        for (j, y) in s.points.iter().enumerate() {
            if i == j {
                continue;
            }
            let d = linalg::sub(y, x);
            let defect = s.values[j] - s.values[i] - linalg::dot(&s.grads[i], &d)
                - k * linalg::norm2(&d);
            max_violation = max_violation.max(defect);
        }
    }
    let pass = max_violation <= tol::CERTIFICATE_SLACK * s.scale;
    Ok(ModulusCertificate {
        modulus: Modulus::Linear { k },
        domain: domain.clone(),
        samples,
        max_violation,
        scale: s.scale,
        pass,
        max_gradient_norm: max_grad,
    })
}

/// Semi-convexity is semi-concavity of the negated field.
pub fn certify_semiconvex(
    f: &ScalarField,
    domain: &ChartBox,
    samples: usize,
    k: f64,
) -> Result<ModulusCertificate> {
    certify_semiconcave(&|x: &[f64]| -f(x), domain, samples, k)
}

/// Builds a tabulated modulus for a C1 field empirically: the observed
/// defect-to-distance ratios are binned by pair distance and turned
/// into a nondecreasing envelope, so the resulting certificate holds on
/// the sample set by construction.
pub fn certify_tabulated(
    f: &ScalarField,
    domain: &ChartBox,
    samples: usize,
) -> Result<ModulusCertificate> {
    let s = sample_field(f, domain, samples)?;
    let bins = 12usize;
    let diam = domain.diameter();
    let mut omega = vec![0.0f64; bins + 1];
    let mut max_grad = 0.0f64;
    for (i, x) in s.points.iter().enumerate() {
        max_grad = max_grad.max(linalg::norm(&s.grads[i]));
        for (j, y) in s.points.iter().enumerate() {
            if i == j {
                continue;
            }
            let d = linalg::sub(y, x);
            let dn = linalg::norm(&d);
            if dn <= 1e-12 {
                continue;
            }
            let defect = s.values[j] - s.values[i] - linalg::dot(&s.grads[i], &d);
            let ratio = (defect / dn).max(0.0);
            let b = ((dn / diam * bins as f64).ceil() as usize).clamp(1, bins);
            omega[b] = omega[b].max(ratio);
        }
    }
    for b in 1..=bins {
        omega[b] = omega[b].max(omega[b - 1]);
    }
    let grid: Vec<(f64, f64)> =
        (0..=bins).map(|b| (diam * b as f64 / bins as f64, omega[b])).collect();
    Ok(ModulusCertificate {
        modulus: Modulus::Tabulated { grid },
        domain: domain.clone(),
        samples,
        max_violation: 0.0,
        scale: s.scale,
        pass: true,
        max_gradient_norm: max_grad,
    })
}

/// The `k1 + k2` constant for summing two linear-modulus certificates;
/// `None` when either is tabulated.
pub fn sum_rule(a: &ModulusCertificate, b: &ModulusCertificate) -> Option<f64> {
    match (&a.modulus, &b.modulus) {
        (Modulus::Linear { k: ka }, Modulus::Linear { k: kb }) => Some(ka + kb),
        _ => None,
    }
}

/// Certifies every member with constant `k`, then the pointwise inf
/// with the same `k`. Errors when a member fails its certificate.
pub fn inf_family_certificate<'a>(
    family: &'a [&'a ScalarField<'a>],
    domain: &ChartBox,
    samples: usize,
    k: f64,
) -> Result<(Box<ScalarField<'a>>, ModulusCertificate)> {
    if family.is_empty() {
        return Err(LotError::Input("empty family".into()));
    }
    for (i, member) in family.iter().enumerate() {
        let cert = certify_semiconcave(member, domain, samples, k)?;
        if !cert.pass {
            return Err(LotError::Precondition(format!(
                "family member {i} is not {k}-semi-concave on the box (violation {:.3e})",
                cert.max_violation
            )));
        }
    }
    let inf: Box<ScalarField<'a>> = Box::new(move |x: &[f64]| {
        family.iter().map(|g| g(x)).fold(f64::INFINITY, f64::min)
    });
    let cert = certify_semiconcave(&inf, domain, samples, k)?;
    Ok((inf, cert))
}

/// Outcome of the touching criterion at the supplied contact points.
#[derive(Debug, Clone)]
pub struct CertificateReport {
    pub pass: bool,
    pub contacts_checked: usize,
    /// Worst `|phi1 - phi2|` over the contact points.
    pub max_contact_gap: f64,
    /// Worst ordering defect `phi1 - phi2` over the box samples
    /// (should be <= 0 up to tolerance).
    pub max_order_violation: f64,
    /// Worst gradient disagreement at a contact point.
    pub max_gradient_mismatch: f64,
    /// Empirical Lipschitz constant of the common gradient over
    /// contact pairs.
    pub empirical_lipschitz: f64,
}

fn auto_certify(f: &ScalarField, domain: &ChartBox, samples: usize) -> Result<f64> {
    for k in [0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0, 256.0, 512.0] {
        if certify_semiconcave(f, domain, samples, k)?.pass {
            return Ok(k);
        }
    }
    Err(LotError::Precondition(
        "field admits no linear semi-concavity modulus up to k = 512 on the box".into(),
    ))
}

/// Touching criterion: `phi1` semi-convex below a semi-concave `phi2`,
/// equal on the contact points. Verifies the ordering and contact
/// hypotheses, then checks that both fields are differentiable at each
/// contact with a common gradient, and that this gradient is Lipschitz
/// along the contact set (estimated over contact pairs, with a
/// half-step stability re-check).
pub fn touching_criterion(
    phi1: &ScalarField,
    phi2: &ScalarField,
    contact: &[Vec<f64>],
    domain: &ChartBox,
    samples: usize,
) -> Result<CertificateReport> {
    auto_certify(&|x: &[f64]| -phi1(x), domain, samples)?;
    auto_certify(phi2, domain, samples)?;

    let mut max_order = f64::NEG_INFINITY;
    let mut scale = 1.0f64;
    for p in domain.sample_set(samples) {
        let (a, b) = (phi1(&p), phi2(&p));
        if !a.is_finite() || !b.is_finite() {
            return Err(LotError::Numerical("field evaluated to a non-finite value".into()));
        }
        scale = scale.max(1.0 + a.abs().max(b.abs()));
        max_order = max_order.max(a - b);
    }
    if max_order > tol::CERTIFICATE_SLACK * scale {
        return Err(LotError::Precondition(format!(
            "ordering phi1 <= phi2 fails on the box by {max_order:.3e}"
        )));
    }

    if contact.is_empty() {
        return Err(LotError::Input("no contact points supplied".into()));
    }
    let mut max_gap = 0.0f64;
    for p in contact {
        let gap = (phi1(p) - phi2(p)).abs();
        max_gap = max_gap.max(gap);
        if gap > tol::CONTACT_EQUALITY * scale {
            return Err(LotError::Precondition(format!(
                "phi1 != phi2 at a declared contact point (gap {gap:.3e})"
            )));
        }
    }

    let mut max_mismatch = 0.0f64;
    let mut grads = Vec::with_capacity(contact.len());
    for p in contact {
        let g1 = central_gradient(phi1, p)?;
        let g2 = central_gradient(phi2, p)?;
        let mism = linalg::dist_euclid(&g1, &g2);
        max_mismatch = max_mismatch.max(mism);
        grads.push(g1);
    }

    let lip = |grads: &[Vec<f64>]| {
        let mut worst = 0.0f64;
        for i in 0..contact.len() {
            for j in (i + 1)..contact.len() {
                let dx = linalg::dist_euclid(&contact[i], &contact[j]);
                if dx > 1e-10 {
                    worst = worst.max(linalg::dist_euclid(&grads[i], &grads[j]) / dx);
                }
            }
        }
        worst
    };
    let lipschitz = lip(&grads);

    // Stability: the estimate must not be an artifact of the step size.
    let mut grads_half = Vec::with_capacity(contact.len());
    for p in contact {
        let mut g = Vec::with_capacity(p.len());
        for j in 0..p.len() {
            let h = 0.5e-5 * (1.0 + p[j].abs());
            let mut xp = p.clone();
            xp[j] += h;
            let mut xm = p.clone();
            xm[j] -= h;
            g.push((phi1(&xp) - phi1(&xm)) / (2.0 * h));
        }
        grads_half.push(g);
    }
    let lipschitz_half = lip(&grads_half);
    let stable = (lipschitz - lipschitz_half).abs() <= 0.25 * lipschitz.max(lipschitz_half) + 1e-6;

    let grad_tol = tol::TOUCHING_GRADIENT * (1.0 + grads.iter().map(|g| linalg::norm(g)).fold(0.0, f64::max));
    Ok(CertificateReport {
        pass: max_mismatch <= grad_tol && lipschitz.is_finite() && stable,
        contacts_checked: contact.len(),
        max_contact_gap: max_gap,
        max_order_violation: max_order,
        max_gradient_mismatch: max_mismatch,
        empirical_lipschitz: lipschitz,
    })
}

/// Fraction of grid points where forward and backward differences of
/// `f` disagree beyond `1e-3` in some axis: a refinement-trend proxy
/// for differentiability off a small exceptional set.
pub fn nondifferentiable_fraction(f: &ScalarField, domain: &ChartBox, per_axis: usize) -> f64 {
    let pts = domain.grid(per_axis);
    let mut bad = 0usize;
    for p in &pts {
        let mut disagrees = false;
        for j in 0..p.len() {
            let h = (domain.hi[j] - domain.lo[j]) / (4.0 * (per_axis - 1) as f64);
            let mut xp = p.clone();
            xp[j] += h;
            let mut xm = p.clone();
            xm[j] -= h;
            let fwd = (f(&xp) - f(p)) / h;
            let bwd = (f(p) - f(&xm)) / h;
            if (fwd - bwd).abs() > 1e-3 {
                disagrees = true;
                break;
            }
        }
        if disagrees {
            bad += 1;
        }
    }
    bad as f64 / pts.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lagrangian::Lagrangian;
    use crate::manifold::ManifoldModel;
    use crate::minimizer;

    fn unit_box() -> ChartBox {
        ChartBox::new(vec![-1.0, -1.0], vec![1.0, 1.0]).unwrap()
    }

    #[test]
    fn concave_field_passes_with_zero_constant() {
        let f = |x: &[f64]| -linalg::norm2(x);
        let cert = certify_semiconcave(&f, &unit_box(), 60, 0.0).unwrap();
        assert!(cert.pass, "violation {}", cert.max_violation);
    }

    #[test]
    fn convex_quadratic_needs_its_exact_constant() {
        let f = |x: &[f64]| linalg::norm2(x);
        let good = certify_semiconcave(&f, &unit_box(), 60, 1.0).unwrap();
        assert!(good.pass, "violation {}", good.max_violation);
        let bad = certify_semiconcave(&f, &unit_box(), 60, 0.49).unwrap();
        assert!(!bad.pass);
        // Violation of the k-slack inequality for |x|^2 is exactly
        // (1 - k) |y - x|^2; the box realizes |y - x|^2 = 8.
        assert!((bad.max_violation - 0.51 * 8.0).abs() <= 1e-6);
    }

    #[test]
    fn euclidean_cost_slice_certifies_with_unit_constant() {
        let l = Lagrangian::power_metric(ManifoldModel::euclidean(2), 2.0).unwrap();
        let y0 = l.manifold.point(vec![0.3, -0.2]).unwrap();
        let f = |x: &[f64]| {
            let p = l.manifold.point(x.to_vec()).unwrap();
            minimizer::cost_fast(&l, &p, &y0, 1.0).unwrap()
        };
        let cert = certify_semiconcave(&f, &unit_box(), 40, 1.0).unwrap();
        assert!(cert.pass, "violation {}", cert.max_violation);
    }

    #[test]
    fn inf_of_linear_maps_is_certified_concave() {
        let f1 = |x: &[f64]| x[0] + 2.0 * x[1];
        let f2 = |x: &[f64]| -0.5 * x[0];
        let f3 = |x: &[f64]| 3.0 * x[1] - 1.0;
        let family: Vec<&ScalarField> = vec![&f1, &f2, &f3];
        let (inf, cert) = inf_family_certificate(&family, &unit_box(), 50, 0.0).unwrap();
        assert!(cert.pass, "violation {}", cert.max_violation);
        let probe = [0.5, -0.5];
        let expect = (0.5f64 - 1.0).min(-0.25).min(-2.5);
        assert_eq!(inf(&probe), expect);
    }

    #[test]
    fn inf_of_cost_slices_keeps_the_member_constant() {
        let l = Lagrangian::power_metric(ManifoldModel::euclidean(2), 2.0).unwrap();
        let targets: Vec<Vec<f64>> =
            vec![vec![0.2, 0.1], vec![-0.4, 0.3], vec![0.0, -0.5], vec![0.6, 0.6]];
        let slices: Vec<Box<ScalarField>> = targets
            .iter()
            .map(|y| {
                let yp = l.manifold.point(y.clone()).unwrap();
                let l = &l;
                Box::new(move |x: &[f64]| {
                    let p = l.manifold.point(x.to_vec()).unwrap();
                    minimizer::cost_fast(l, &p, &yp, 1.0).unwrap()
                }) as Box<ScalarField>
            })
            .collect();
        let family: Vec<&ScalarField> = slices.iter().map(|b| b.as_ref()).collect();
        let (_, cert) = inf_family_certificate(&family, &unit_box(), 40, 1.0).unwrap();
        assert!(cert.pass, "violation {}", cert.max_violation);
    }

    #[test]
    fn singleton_family_reproduces_the_member_certificate() {
        let f = |x: &[f64]| -linalg::norm2(x);
        let member = certify_semiconcave(&f, &unit_box(), 50, 0.0).unwrap();
        let family: Vec<&ScalarField> = vec![&f];
        let (_, cert) = inf_family_certificate(&family, &unit_box(), 50, 0.0).unwrap();
        assert_eq!(cert.max_violation, member.max_violation);
        assert_eq!(cert.pass, member.pass);
    }

    #[test]
    fn failing_member_blocks_the_family() {
        let f = |x: &[f64]| linalg::norm2(x); // needs k = 1
        let family: Vec<&ScalarField> = vec![&f];
        match inf_family_certificate(&family, &unit_box(), 50, 0.0) {
            Err(LotError::Precondition(_)) => {}
            Err(other) => panic!("expected precondition error, got {other:?}"),
            Ok(_) => panic!("expected precondition error, got a certificate"),
        };
    }

    #[test]
    fn certificates_add_under_sums() {
        let f = |x: &[f64]| linalg::norm2(x);
        let g = |x: &[f64]| 2.0 * linalg::norm2(x);
        let cf = certify_semiconcave(&f, &unit_box(), 40, 1.0).unwrap();
        let cg = certify_semiconcave(&g, &unit_box(), 40, 2.0).unwrap();
        let k = sum_rule(&cf, &cg).unwrap();
        assert_eq!(k, 3.0);
        let sum = |x: &[f64]| f(x) + g(x);
        let cert = certify_semiconcave(&sum, &unit_box(), 40, k).unwrap();
        assert!(cert.pass, "violation {}", cert.max_violation);
    }

    #[test]
    fn affine_touching_is_exact_with_zero_lipschitz() {
        let phi = |x: &[f64]| 2.0 * x[0] - x[1] + 0.25;
        let contact: Vec<Vec<f64>> = vec![vec![0.0, 0.0], vec![0.5, 0.5], vec![-0.5, 0.25]];
        let report = touching_criterion(&phi, &phi, &contact, &unit_box(), 40).unwrap();
        assert!(report.pass);
        assert!(report.max_gradient_mismatch <= 1e-9);
        assert!(report.empirical_lipschitz <= 1e-9);
    }

    #[test]
    fn opposite_parabolas_touch_at_the_origin() {
        let phi1 = |x: &[f64]| -linalg::norm2(x);
        let phi2 = |x: &[f64]| linalg::norm2(x);
        let contact: Vec<Vec<f64>> = vec![vec![0.0, 0.0]];
        let report = touching_criterion(&phi1, &phi2, &contact, &unit_box(), 40).unwrap();
        assert!(report.pass, "{report:?}");
        assert!(report.max_gradient_mismatch <= 1e-9);
    }

    #[test]
    fn ordering_violation_is_rejected() {
        let phi1 = |x: &[f64]| linalg::norm2(x) + 1.0;
        let phi2 = |_: &[f64]| 0.0;
        let contact: Vec<Vec<f64>> = vec![vec![0.0, 0.0]];
        match touching_criterion(&phi1, &phi2, &contact, &unit_box(), 40) {
            Err(LotError::Precondition(_)) => {}
            other => panic!("expected precondition error, got {other:?}"),
        }
    }

    #[test]
    fn tabulated_modulus_is_monotone_and_vanishes_at_zero() {
        let f = |x: &[f64]| x[0].sin() + x[1].cos();
        let cert = certify_tabulated(&f, &unit_box(), 60).unwrap();
        let Modulus::Tabulated { grid } = &cert.modulus else { panic!("expected table") };
        assert_eq!(grid[0], (0.0, 0.0));
        for w in grid.windows(2) {
            assert!(w[1].1 >= w[0].1);
            // C1 field with Hessian norm <= 1: the defect ratio grows
            // at most like half the pair distance.
            assert!(w[1].1 <= 0.75 * w[1].0 + 1e-9, "omega({}) = {}", w[1].0, w[1].1);
        }
        assert!(cert.pass);
    }

    #[test]
    fn certified_fields_are_lipschitz_on_the_box() {
        let f = |x: &[f64]| linalg::norm2(x);
        let cert = certify_semiconcave(&f, &unit_box(), 50, 1.0).unwrap();
        let Modulus::Linear { k } = cert.modulus else { unreachable!() };
        let bound = cert.max_gradient_norm + k * cert.domain.diameter();
        let pts = unit_box().sample_set(60);
        for a in &pts {
            for b in &pts {
                let dx = linalg::dist_euclid(a, b);
                if dx > 1e-10 {
                    assert!((f(a) - f(b)).abs() <= bound * dx + 1e-9);
                }
            }
        }
    }

    #[test]
    fn kink_fraction_shrinks_under_refinement() {
        let f = |x: &[f64]| x[0].abs();
        let fractions: Vec<f64> = [9, 17, 33]
            .iter()
            .map(|&g| nondifferentiable_fraction(&f, &unit_box(), g))
            .collect();
        assert!(fractions[0] > 0.0, "the kink must be visible on the coarse grid");
        assert!(fractions[1] <= fractions[0]);
        assert!(fractions[2] <= fractions[1]);
        assert!(fractions[2] < fractions[0]);
    }
}
