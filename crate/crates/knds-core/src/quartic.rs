//! Root finding for monic quartics.
//!
//! Closed-form resolvents lose precision near double roots, so roots are
//! found by the Durand-Kerner simultaneous iteration (bounded, no
//! factorization order to choose) and later polished by Newton iteration
//! on the original polynomial (see `spacetime::find_horizons`). For simple
//! roots the iteration is quadratically convergent; near-multiple roots
//! still land within the polish basin.

use num_complex::Complex64;

/// All four roots of x^4 + c3 x^3 + c2 x^2 + c1 x + c0, unordered.
pub(crate) fn quartic_roots(c0: f64, c1: f64, c2: f64, c3: f64) -> [Complex64; 4] {
    let eval = |z: Complex64| (((z + c3) * z + c2) * z + c1) * z + c0;

    // Cauchy bound keeps the start circle outside no root.
    let radius = 1.0 + c0.abs().max(c1.abs()).max(c2.abs()).max(c3.abs());
    let seed = Complex64::new(0.4, 0.9);
    let mut z = [
        seed * radius,
        seed * seed * radius,
        seed * seed * seed * radius,
        seed * seed * seed * seed * radius,
    ];

    for _ in 0..200 {
        let mut largest_step = 0.0f64;
        for i in 0..4 {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..4 {
                if j != i {
                    denom *= z[i] - z[j];
                }
            }
            if denom.norm() == 0.0 {
                // coincident iterates; nudge apart instead of dividing by 0
                z[i] += Complex64::new(1e-12 * radius, 1e-12 * radius);
                largest_step = f64::INFINITY;
                continue;
            }
            let step = eval(z[i]) / denom;
            z[i] -= step;
            largest_step = largest_step.max(step.norm() / (1.0 + z[i].norm()));
        }
        if largest_step < 1e-15 {
            break;
        }
    }
    z
}

/// Real parts of roots passing the scale-aware realness cut
/// |imag| < 1e-10 (1 + |real|), ascending.
pub(crate) fn real_roots(roots: &[Complex64; 4]) -> Vec<f64> {
    let mut out: Vec<f64> = roots
        .iter()
        .filter(|z| z.im.abs() < 1e-10 * (1.0 + z.re.abs()))
        .map(|z| z.re)
        .collect();
    out.sort_by(|a, b| a.total_cmp(b));
    out
}
