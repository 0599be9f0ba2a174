//! Certifies one-sided regularity of cost slices and probes where the
//! regularity genuinely breaks.

use lot::lagrangian::Lagrangian;
use lot::manifold::ManifoldModel;
use lot::minimizer::cost_fast;
use lot::semiconcave::{
    certify_semiconcave, inf_family_certificate, nondifferentiable_fraction, ChartBox,
    ScalarField,
};

fn main() -> Result<(), lot::LotError> {
    let m = ManifoldModel::euclidean(2);
    let lag = Lagrangian::power_metric(m.clone(), 2.0)?;
    let domain = ChartBox::new(vec![-0.5, -0.5], vec![0.5, 0.5])?;

    // A cost slice y -> c(x0, y) with the source held outside the box.
    let x0 = m.point(vec![-1.6, 0.0])?;
    let slice = |y: &[f64]| -> f64 {
        let p = m.point(y.to_vec()).unwrap();
        cost_fast(&lag, &x0, &p, 1.0).unwrap()
    };

    println!("certifying y -> c(x0, y) on a compact box:");
    for k in [0.5, 1.0, 2.0, 4.0] {
        let cert = certify_semiconcave(&slice, &domain, 96, k)?;
        println!(
            "  modulus k={k}: {} (worst defect {:+.2e})",
            if cert.pass { "certified" } else { "violated" },
            cert.max_violation
        );
        if cert.pass {
            break;
        }
    }

    // Pointwise infima keep the modulus. Three shifted slices stand in
    // for a family of sources.
    let x1 = m.point(vec![-1.6, 0.3])?;
    let x2 = m.point(vec![-1.5, -0.2])?;
    let s1 = |y: &[f64]| cost_fast(&lag, &x1, &m.point(y.to_vec()).unwrap(), 1.0).unwrap();
    let s2 = |y: &[f64]| cost_fast(&lag, &x2, &m.point(y.to_vec()).unwrap(), 1.0).unwrap();
    let fam: Vec<&ScalarField> = vec![&slice, &s1, &s2];
    let (_inf, cert) = inf_family_certificate(&fam, &domain, 96, 4.0)?;
    println!(
        "\ninf of 3 slices keeps the k=4 modulus over {} samples: {}",
        cert.samples, cert.pass
    );

    // The pointwise minimum of two slices creases where they cross.
    // Subtracting the smooth average isolates the kink, and the flagged
    // fraction shrinks under grid refinement.
    let xa = m.point(vec![-1.5, 0.0])?;
    let xb = m.point(vec![1.5, 0.0])?;
    let crease = |y: &[f64]| -> f64 {
        let p = m.point(y.to_vec()).unwrap();
        let a = cost_fast(&lag, &xa, &p, 1.0).unwrap();
        let b = cost_fast(&lag, &xb, &p, 1.0).unwrap();
        a.min(b) - 0.5 * (a + b)
    };
    println!("\nkink detection for the min of two slices:");
    for per_axis in [9, 17, 33] {
        let frac = nondifferentiable_fraction(&crease, &domain, per_axis);
        println!("  {per_axis:>2} points per axis: {:>5.1}% flagged", 100.0 * frac);
    }

    Ok(())
}
