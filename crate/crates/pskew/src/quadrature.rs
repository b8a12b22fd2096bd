//! Gauss quadrature rules via Golub-Welsch.
//!
//! Nodes are the eigenvalues of the Jacobi matrix of the weight's
//! three-term recurrence; weights come from the first components of the
//! eigenvectors. The tridiagonal eigensolver is the implicit-shift QL
//! iteration, accumulating only the first row of the rotation product.

/// A quadrature rule on the weight's natural support.
#[derive(Clone, Debug)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// Implicit QL with Wilkinson shifts on a symmetric tridiagonal matrix.
/// `d` holds the diagonal, `e` the subdiagonal (`e[0]` unused on input).
/// `z` accumulates the first row of the eigenvector matrix.
fn tql_first_row(d: &mut [f64], e: &mut [f64], z: &mut [f64]) {
    let n = d.len();
    if n == 1 {
        return;
    }
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            assert!(iter < 50, "QL iteration failed to converge");
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c) = (1.0, 1.0);
            let mut p = 0.0;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                f = z[i + 1];
                z[i + 1] = s * z[i] + c * f;
                z[i] = c * z[i] - s * f;
            }
            if r == 0.0 && m > l {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    // Sort ascending, carrying z along.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].partial_cmp(&d[b]).unwrap());
    let ds: Vec<f64> = order.iter().map(|&i| d[i]).collect();
    let zs: Vec<f64> = order.iter().map(|&i| z[i]).collect();
    d.copy_from_slice(&ds);
    z.copy_from_slice(&zs);
}

fn golub_welsch(diag: Vec<f64>, sub: Vec<f64>, mu0: f64) -> GaussRule {
    let n = diag.len();
    let mut d = diag;
    let mut e = vec![0.0; n];
    e[1..n].copy_from_slice(&sub[1..n]);
    let mut z = vec![0.0; n];
    z[0] = 1.0;
    tql_first_row(&mut d, &mut e, &mut z);
    let weights = z.iter().map(|zi| mu0 * zi * zi).collect();
    GaussRule { nodes: d, weights }
}

/// Gauss-Legendre on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> GaussRule {
    assert!(n >= 1);
    let diag = vec![0.0; n];
    let mut sub = vec![0.0; n];
    for i in 1..n {
        let k = i as f64;
        sub[i] = k / (4.0 * k * k - 1.0f64).sqrt();
    }
    golub_welsch(diag, sub, 2.0)
}

/// Generalized Gauss-Laguerre for the weight `x^alpha e^{-x}` on `(0, inf)`.
pub fn gauss_laguerre(n: usize, alpha: f64) -> GaussRule {
    assert!(n >= 1);
    let mut diag = vec![0.0; n];
    let mut sub = vec![0.0; n];
    for i in 0..n {
        diag[i] = 2.0 * i as f64 + alpha + 1.0;
    }
    for i in 1..n {
        let k = i as f64;
        sub[i] = (k * (k + alpha)).sqrt();
    }
    golub_welsch(diag, sub, gamma(alpha + 1.0))
}

/// Gauss-Hermite for the weight `e^{-x^2}` on the real line.
pub fn gauss_hermite(n: usize) -> GaussRule {
    assert!(n >= 1);
    let diag = vec![0.0; n];
    let mut sub = vec![0.0; n];
    for i in 1..n {
        sub[i] = (i as f64 / 2.0).sqrt();
    }
    golub_welsch(diag, sub, std::f64::consts::PI.sqrt())
}

/// Lanczos approximation of the gamma function (g = 7, 9 terms).
fn gamma(x: f64) -> f64 {
    const G: f64 = 7.0;
    const C: [f64; 9] = [
        0.999_999_999_999_809_93,
        676.520_368_121_885_1,
        -1259.139_216_722_402_8,
        771.323_428_777_653_13,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        std::f64::consts::PI / ((std::f64::consts::PI * x).sin() * gamma(1.0 - x))
    } else {
        let x = x - 1.0;
        let mut a = C[0];
        let t = x + G + 0.5;
        for (i, &c) in C.iter().enumerate().skip(1) {
            a += c / (x + i as f64);
        }
        (2.0 * std::f64::consts::PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * a
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn moment(rule: &GaussRule, p: u32) -> f64 {
        rule.nodes
            .iter()
            .zip(&rule.weights)
            .map(|(x, w)| x.powi(p as i32) * w)
            .sum()
    }

    #[test]
    fn legendre_polynomial_moments() {
        let rule = gauss_legendre(8);
        // int_{-1}^{1} x^p dx = 2/(p+1) for even p, 0 for odd.
        for p in 0..15u32 {
            let exact = if p % 2 == 0 { 2.0 / (p as f64 + 1.0) } else { 0.0 };
            assert!((moment(&rule, p) - exact).abs() < 1e-12, "p={p}");
        }
    }

    #[test]
    fn laguerre_factorial_moments() {
        let rule = gauss_laguerre(10, 0.0);
        // int_0^inf x^p e^{-x} dx = p!.
        let mut fact = 1.0;
        for p in 0..15u32 {
            if p > 0 {
                fact *= p as f64;
            }
            let rel = (moment(&rule, p) - fact).abs() / fact;
            assert!(rel < 1e-10, "p={p} rel={rel}");
        }
    }

    #[test]
    fn laguerre_generalized_alpha() {
        let rule = gauss_laguerre(12, 1.5);
        // mu_0 = Gamma(2.5) = 1.5 * 0.5 * sqrt(pi).
        let exact = 1.5 * 0.5 * std::f64::consts::PI.sqrt();
        assert!((moment(&rule, 0) - exact).abs() < 1e-10);
    }

    #[test]
    fn hermite_gaussian_moments() {
        let rule = gauss_hermite(8);
        let sqrt_pi = std::f64::consts::PI.sqrt();
        // int x^2 e^{-x^2} = sqrt(pi)/2; int x^4 = 3 sqrt(pi)/4.
        assert!((moment(&rule, 0) - sqrt_pi).abs() < 1e-12);
        assert!((moment(&rule, 2) - sqrt_pi / 2.0).abs() < 1e-12);
        assert!((moment(&rule, 4) - 3.0 * sqrt_pi / 4.0).abs() < 1e-12);
    }
}
