//! Simultaneous root finding for small real polynomials (Aberth-Ehrlich).

use num_complex::Complex64;

use crate::error::{Error, Result};

const MAX_ITER: usize = 1000;

fn eval(coeffs: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// All complex roots of `sum coeffs[n] z^n`; the leading coefficient must be nonzero.
pub fn poly_roots(coeffs: &[f64]) -> Result<Vec<Complex64>> {
    let n = coeffs.len().saturating_sub(1);
    if n == 0 {
        return Ok(Vec::new());
    }
    let lead = coeffs[n];
    assert!(lead != 0.0, "leading coefficient must be nonzero");
    // Cauchy bound for the initial circle
    let radius = 1.0 + coeffs[..n].iter().map(|c| (c / lead).abs()).fold(0.0, f64::max);
    let r0 = (coeffs[0].abs() / lead.abs()).powf(1.0 / n as f64).clamp(1e-3, radius);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(r0, 0.4 + std::f64::consts::TAU * k as f64 / n as f64))
        .collect();
    for _ in 0..MAX_ITER {
        let mut worst = 0.0f64;
        for i in 0..n {
            let (p, dp) = eval(coeffs, z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let repulsion: Complex64 = (0..n).filter(|&j| j != i).map(|j| (z[i] - z[j]).inv()).sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if step.is_finite() {
                z[i] -= step;
                worst = worst.max(step.norm() / z[i].norm().max(1e-300));
            }
        }
        if worst < 1e-15 {
            return Ok(z);
        }
    }
    // multiple roots stall Aberth at ~sqrt(eps); accept if residuals are tiny
    let scale: f64 = coeffs.iter().map(|c| c.abs()).sum();
    if z.iter().all(|&x| eval(coeffs, x).0.norm() <= 1e-10 * scale * (1.0 + x.norm()).powi(n as i32)) {
        return Ok(z);
    }
    Err(Error::RootFinder(MAX_ITER))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sorted_moduli(r: &[Complex64]) -> Vec<f64> {
        let mut m: Vec<f64> = r.iter().map(|z| z.norm()).collect();
        m.sort_by(|a, b| a.partial_cmp(b).unwrap());
        m
    }

    #[test]
    fn linear_and_quadratic() {
        let r = poly_roots(&[-2.0, 1.0]).unwrap();
        assert!((r[0] - Complex64::new(2.0, 0.0)).norm() < 1e-12);
        // (1-u)(1-3u) = 1 - 4u + 3u^2
        let m = sorted_moduli(&poly_roots(&[1.0, -4.0, 3.0]).unwrap());
        assert!((m[0] - 1.0 / 3.0).abs() < 1e-12 && (m[1] - 1.0).abs() < 1e-12);
        assert!(poly_roots(&[5.0]).unwrap().is_empty());
    }

    #[test]
    fn repeated_roots() {
        // (1 + 3u^2)^2
        let r = poly_roots(&[1.0, 0.0, 6.0, 0.0, 9.0]).unwrap();
        for z in r {
            assert!((z.norm() - 3f64.sqrt().recip()).abs() < 1e-6);
        }
    }

    #[test]
    fn roots_of_unity() {
        let r = poly_roots(&[-1.0, 0.0, 0.0, 0.0, 0.0, 1.0]).unwrap();
        assert_eq!(r.len(), 5);
        for z in r {
            assert!((z.norm() - 1.0).abs() < 1e-12);
            assert!((z.powu(5) - 1.0).norm() < 1e-10);
        }
    }
}
