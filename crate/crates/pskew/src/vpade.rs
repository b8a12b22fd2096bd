//! Generalized inverse vector Pade approximants (GIPA).
//!
//! For a real vector series `f` the `[N/2K]` GIPA is `R = Q / P` with a
//! scalar denominator `P` of degree exactly `2K`, `deg Q <= N`,
//! `P | ||Q||^2`, `P f - Q = O(z^{N+1})` and `P(0) != 0`. The denominator
//! is a Pfaffian of antisymmetrised double-residue moments of `f`; it can
//! equivalently be grown by the discrete-BKP tau recursion. Both routes
//! are implemented and must agree up to normalisation.

use std::collections::HashMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pfaffian::{int_range, pf_indexed, EntryOracle, ExtIndex};
use crate::poly::Poly;
use crate::scalar::{binomial, Field, Ring};

/// Vector-valued formal power series: `coeffs[a]` is the coefficient of
/// `z^a`, a vector of dimension `dim`.
#[derive(Clone, Debug)]
pub struct VectorSeries<B> {
    pub coeffs: Vec<Vec<B>>,
}

impl<B: Field> VectorSeries<B> {
    pub fn new(coeffs: Vec<Vec<B>>) -> Result<Self> {
        let d = coeffs.first().map(|c| c.len()).unwrap_or(0);
        if d == 0 || coeffs.iter().any(|c| c.len() != d) {
            return Err(Error::Config("series coefficients must share a nonzero dimension".into()));
        }
        Ok(VectorSeries { coeffs })
    }

    pub fn dim(&self) -> usize {
        self.coeffs[0].len()
    }

    /// Highest stored order `M`.
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    fn dot(&self, a: i64, b: i64) -> B {
        if a < 0 || b < 0 {
            return B::zero();
        }
        let (a, b) = (a as usize, b as usize);
        if a >= self.coeffs.len() || b >= self.coeffs.len() {
            return B::zero();
        }
        let mut acc = B::zero();
        for c in 0..self.dim() {
            acc = acc + self.coeffs[a][c].clone() * self.coeffs[b][c].clone();
        }
        acc
    }

    /// Components as scalar polynomials.
    pub fn component_polys(&self) -> Vec<Poly<B>> {
        (0..self.dim())
            .map(|c| Poly::from_coeffs(self.coeffs.iter().map(|v| v[c].clone()).collect()))
            .collect()
    }
}

/// Base exponent of the residue extraction at the `[N/2K]` anchor level
/// `k = 2K`: the entry integrand carries `x^{c - i} y^{c - j}` with
/// `c = 2K + PADE_EXPONENT_OFFSET - 2K = PADE_EXPONENT_OFFSET` there.
///
/// Pinned by scanning integer offsets against the GIPA axioms on random
/// exact series (see `tests::exponent_is_pinned_by_axioms`); the printed
/// `(xy)^{-N+1}`-type factors are off by one from the working value.
pub const PADE_EXPONENT_OFFSET: i64 = 0;

/// Moment provider for the reciprocal Pade family.
///
/// `mu` entries are windowed sums over products `f_a . f_b`,
/// antisymmetrised (average over the two contour orderings); `beta` is the
/// binomial row `C(l, 2K + i - k)`, the `f`-independent single moment that
/// satisfies the family's shift laws and stays nonzero on the recursion
/// path.
pub struct PadeMoments<'a, B> {
    pub f: &'a VectorSeries<B>,
    pub big_k: i64,
    /// Base exponent; `PADE_EXPONENT_OFFSET` unless experimenting.
    pub offset: i64,
}

impl<'a, B: Field> PadeMoments<'a, B> {
    pub fn new(f: &'a VectorSeries<B>, big_k: i64) -> Self {
        PadeMoments { f, big_k, offset: PADE_EXPONENT_OFFSET }
    }

    /// `-2 sum_{m >= 0} f_{m+p} . f_{q-1-m}` over valid indices
    /// (the `|x| > |y|` residue extraction before antisymmetrisation).
    pub fn window_raw(&self, p: i64, q: i64) -> B {
        let mut acc = B::zero();
        let m_top = self.f.order() as i64;
        for m in 0..=m_top {
            let a = m + p;
            let b = q - 1 - m;
            if b < 0 {
                break;
            }
            acc = acc + self.f.dot(a, b);
        }
        -(B::from_i64(2) * acc)
    }

    fn c_at(&self, k: i64) -> i64 {
        self.offset + k - 2 * self.big_k
    }

    /// Raw (ordering-dependent) entry before antisymmetrisation.
    pub fn mu_raw(&self, i: i64, j: i64, k: i64, l: i64) -> B {
        let c = self.c_at(k);
        let mut acc = B::zero();
        for r in 0..=l {
            for s in 0..=l {
                let w = binomial(l, r) * binomial(l, s);
                if w == 0 {
                    continue;
                }
                acc = acc + B::from_i64(w) * self.window_raw(i - c - r, j - c - s);
            }
        }
        acc
    }

    /// Antisymmetrised entry (equals the average of both contour orderings).
    pub fn mu(&self, i: i64, j: i64, k: i64, l: i64) -> B {
        let half = B::one().try_div(&B::from_i64(2)).expect("2 invertible");
        (self.mu_raw(i, j, k, l) - self.mu_raw(j, i, k, l)) * half
    }

    /// Symmetric defect of the raw extraction; reported, not asserted.
    pub fn symmetric_defect(&self, i: i64, j: i64, k: i64, l: i64) -> B {
        let half = B::one().try_div(&B::from_i64(2)).expect("2 invertible");
        (self.mu_raw(i, j, k, l) + self.mu_raw(j, i, k, l)) * half
    }

    pub fn beta(&self, i: i64, k: i64, l: i64) -> B {
        B::from_i64(binomial(l, 2 * self.big_k + i - k))
    }
}

struct PadeOracle<'a, 'b, B> {
    m: &'a PadeMoments<'b, B>,
    k: i64,
    l: i64,
}

impl<'a, 'b, B: Field> EntryOracle<B> for PadeOracle<'a, 'b, B> {
    fn entry(&self, a: &ExtIndex, b: &ExtIndex) -> B {
        use ExtIndex::*;
        match (a, b) {
            (Int(i), Int(j)) => self.m.mu(*i, *j, self.k, self.l),
            (D0, Int(i)) => self.m.beta(*i, self.k, self.l),
            (Int(i), D0) => -self.m.beta(*i, self.k, self.l),
            _ => B::zero(),
        }
    }
}

/// tau of the reciprocal family at `(n, k, l)` by direct Pfaffian, index
/// list starting at `-1` shifted into plain integers.
fn pade_tau_direct<B: Field>(m: &PadeMoments<'_, B>, n: i64, k: i64, l: i64) -> Result<B> {
    if n < 0 {
        return Ok(B::zero());
    }
    if n == 0 {
        return Ok(B::one());
    }
    let oracle = PadeOracle { m, k, l };
    if n % 2 == 0 {
        pf_indexed(&oracle, &int_range(0, n))
    } else {
        let mut idx = vec![ExtIndex::D0];
        idx.extend(int_range(0, n));
        pf_indexed(&oracle, &idx)
    }
}

/// Result of a GIPA construction.
#[derive(Clone, Debug)]
pub struct GipaResult<B> {
    pub p_denom: Poly<B>,
    pub q_num: Vec<Poly<B>>,
    pub report: AxiomReport,
}

/// Axiom check outcomes (exact backend: every residual must vanish).
#[derive(Clone, Debug)]
pub struct AxiomReport {
    pub deg_q_ok: bool,
    pub deg_p_ok: bool,
    pub p_at_zero_nonzero: bool,
    /// Coefficients `0..=N` of `P f - Q` (order condition), all zero.
    pub order_violations: usize,
    /// `||Q||^2 mod P` is the zero polynomial.
    pub divisibility_ok: bool,
}

impl AxiomReport {
    pub fn pass(&self) -> bool {
        self.deg_q_ok
            && self.deg_p_ok
            && self.p_at_zero_nonzero
            && self.order_violations == 0
            && self.divisibility_ok
    }
}

/// Numerator forced by axiom (3): the degree-`N` truncation of `P f`.
pub fn numerator_from_denominator<B: Field>(
    p: &Poly<B>,
    f: &VectorSeries<B>,
    n_type: usize,
) -> Vec<Poly<B>> {
    f.component_polys().into_iter().map(|fc| (p.clone() * fc).truncate(n_type)).collect()
}

/// Check the four GIPA axioms for a candidate `(P, Q)`.
pub fn verify_axioms<B: Field>(
    p: &Poly<B>,
    q: &[Poly<B>],
    f: &VectorSeries<B>,
    n_type: usize,
    big_k: usize,
) -> AxiomReport {
    let deg_q_ok = q.iter().all(|c| c.degree().map(|d| d <= n_type).unwrap_or(true));
    let deg_p_ok = p.degree() == Some(2 * big_k);
    let p_at_zero_nonzero = !p.coeff(0).is_zero();
    let comps = f.component_polys();
    let mut order_violations = 0;
    for (fc, qc) in comps.iter().zip(q.iter()) {
        let resid = p.clone() * fc.clone() - qc.clone();
        for m in 0..=n_type {
            if !resid.coeff(m).is_zero() {
                order_violations += 1;
            }
        }
    }
    let norm_sq = q.iter().fold(Poly::zero(), |acc, c| acc + c.clone() * c.clone());
    let divisibility_ok = match norm_sq.divmod(p) {
        Some((_, rem)) => rem.is_zero(),
        None => false,
    };
    AxiomReport { deg_q_ok, deg_p_ok, p_at_zero_nonzero, order_violations, divisibility_ok }
}

/// Denominator by the Pfaffian formula:
/// `P(z) = tau_{2K} * sum_j (-1)^j Pf(0..^j..2K) z^{2K-j}` at the anchor
/// level `(k, l) = (2K, 0)` (the `z^{2K}` prefactor clears the `z^{-i}`
/// rows into a genuine polynomial).
pub fn gipa_pfaffian<B: Field>(
    f: &VectorSeries<B>,
    n_type: usize,
    big_k: usize,
) -> Result<GipaResult<B>> {
    if f.order() < n_type + 2 * big_k {
        return Err(Error::InsufficientOrder {
            need: n_type + 2 * big_k,
            have: f.order(),
        });
    }
    let m = PadeMoments::new(f, big_k as i64);
    let k = 2 * big_k as i64;
    let tau = pade_tau_direct(&m, k, k, 0)?;
    if tau.is_zero() {
        return Err(Error::DegenerateTau { n: k, k, l: 0 });
    }
    let oracle = PadeOracle { m: &m, k, l: 0 };
    let mut coeffs = vec![B::zero(); 2 * big_k + 1];
    for j in 0..=(2 * big_k as i64) {
        let mut idx = Vec::new();
        for i in 0..=(2 * big_k as i64) {
            if i != j {
                idx.push(ExtIndex::Int(i));
            }
        }
        let minor = pf_indexed(&oracle, &idx)?;
        let signed = if j % 2 == 0 { minor } else { -minor };
        coeffs[2 * big_k - j as usize] = signed * tau.clone();
    }
    let p = Poly::from_coeffs(coeffs);
    let q = numerator_from_denominator(&p, f, n_type);
    let report = verify_axioms(&p, &q, f, n_type, big_k);
    Ok(GipaResult { p_denom: p, q_num: q, report })
}

/// Denominator by the discrete-BKP recursion: taus grown from the initial
/// data `tau_{-1} = 0, tau_0 = 1, tau_1 = Pf(d0, 0), tau_2 = Pf(0, 1)` via
/// the bilinear lattice equation, and the wave polynomials from the
/// three-term-with-shift recursion; result rescaled so its constant term
/// matches the Pfaffian path.
pub fn gipa_recursive<B: Field>(
    f: &VectorSeries<B>,
    n_type: usize,
    big_k: usize,
) -> Result<GipaResult<B>> {
    if f.order() < n_type + 2 * big_k {
        return Err(Error::InsufficientOrder {
            need: n_type + 2 * big_k,
            have: f.order(),
        });
    }
    let m = PadeMoments::new(f, big_k as i64);

    struct Rec<'a, 'b, B: Field> {
        m: &'a PadeMoments<'b, B>,
        taus: HashMap<(i64, i64, i64), B>,
        pts: HashMap<(i64, i64, i64), Poly<B>>,
    }
    impl<'a, 'b, B: Field> Rec<'a, 'b, B> {
        fn tau(&mut self, n: i64, k: i64, l: i64) -> Result<B> {
            if n < 0 {
                return Ok(B::zero());
            }
            if n == 0 {
                return Ok(B::one());
            }
            if let Some(v) = self.taus.get(&(n, k, l)) {
                return Ok(v.clone());
            }
            let v = if n == 1 {
                self.m.beta(0, k, l)
            } else if n == 2 {
                self.m.mu(0, 1, k, l)
            } else {
                // Bilinear recursion solved for tau_{n}:
                // tau_n^{k,l} tau_{n-3}^{k-2,l+1} = tau_{n-1}^{k,l}
                //   tau_{n-2}^{k-2,l+1} - tau_{n-1}^{k-1,l+1} tau_{n-2}^{k-1,l}
                //   + tau_{n-1}^{k-1,l} tau_{n-2}^{k-1,l+1}.
                let num = self.tau(n - 1, k, l)? * self.tau(n - 2, k - 2, l + 1)?
                    - self.tau(n - 1, k - 1, l + 1)? * self.tau(n - 2, k - 1, l)?
                    + self.tau(n - 1, k - 1, l)? * self.tau(n - 2, k - 1, l + 1)?;
                let den = self.tau(n - 3, k - 2, l + 1)?;
                num.try_div(&den).ok_or(Error::DegenerateTau { n: n - 3, k: k - 2, l: l + 1 })?
            };
            self.taus.insert((n, k, l), v.clone());
            Ok(v)
        }

        fn pt(&mut self, n: i64, k: i64, l: i64) -> Result<Poly<B>> {
            if n < 0 {
                return Ok(Poly::zero());
            }
            if n == 0 {
                return Ok(Poly::one());
            }
            if let Some(v) = self.pts.get(&(n, k, l)) {
                return Ok(v.clone());
            }
            // P~_{n}^{k,l} = (z+1) (tau_n^{k,l})^2/(tau_{n-1}^{k-1,l+1})^2
            //   P~_{n-1}^{k-1,l+1}
            //   - z tau_n^{k,l} tau_n^{k-1,l+1} / (tau_{n-1}^{k-1,l+1}
            //     tau_{n-1}^{k,l}) P~_{n-1}^{k,l}
            //   + z(z+1) tau_n^{k,l} tau_{n+1}^{k,l} / (tau_{n-1}^{k-1,l+1}
            //     tau_{n-2}^{k-1,l+1}) P~_{n-2}^{k-1,l+1}.
            let z = Poly::monomial(B::one(), 1);
            let zp1 = Poly::from_coeffs(vec![B::one(), B::one()]);
            let t_n = self.tau(n, k, l)?;
            let t_dn = self.tau(n - 1, k - 1, l + 1)?;
            let c1 = (t_n.clone() * t_n.clone())
                .try_div(&(t_dn.clone() * t_dn.clone()))
                .ok_or(Error::DegenerateTau { n: n - 1, k: k - 1, l: l + 1 })?;
            let c2 = (t_n.clone() * self.tau(n, k - 1, l + 1)?)
                .try_div(&(t_dn.clone() * self.tau(n - 1, k, l)?))
                .ok_or(Error::DegenerateTau { n: n - 1, k, l })?;
            let c3 = (t_n * self.tau(n + 1, k, l)?)
                .try_div(&(t_dn * self.tau(n - 2, k - 1, l + 1)?))
                .ok_or(Error::DegenerateTau { n: n - 2, k: k - 1, l: l + 1 })?;
            let v = zp1.clone() * self.pt(n - 1, k - 1, l + 1)?.scale(&c1)
                - z.clone() * self.pt(n - 1, k, l)?.scale(&c2)
                + z * zp1 * self.pt(n - 2, k - 1, l + 1)?.scale(&c3);
            self.pts.insert((n, k, l), v.clone());
            Ok(v)
        }
    }

    let mut rec = Rec { m: &m, taus: HashMap::new(), pts: HashMap::new() };
    let p_rec = rec.pt(2 * big_k as i64, 2 * big_k as i64, 0)?;

    // Normalise against the Pfaffian path through the constant term.
    let pfa = gipa_pfaffian(f, n_type, big_k)?;
    let scale = pfa
        .p_denom
        .coeff(0)
        .try_div(&p_rec.coeff(0))
        .ok_or_else(|| Error::AxiomViolation("recursive path lost the constant term".into()))?;
    let p = p_rec.scale(&scale);
    let q = numerator_from_denominator(&p, f, n_type);
    let report = verify_axioms(&p, &q, f, n_type, big_k);
    Ok(GipaResult { p_denom: p, q_num: q, report })
}

/// Float contour oracle for one raw entry: trapezoid quadrature of
/// `-2 (2 pi i)^{-2} oint oint x^{c-i} y^{c-j} f(x).f(y)/(x-y) dx dy`
/// on the circles `|x| = 2`, `|y| = 1/2` with `points` nodes per circle.
pub fn contour_entry_oracle(
    f: &VectorSeries<f64>,
    big_k: i64,
    i: i64,
    j: i64,
    points: usize,
) -> f64 {
    let c = PADE_EXPONENT_OFFSET; // anchor level k = 2K
    let eval = |z: Complex64| -> Vec<Complex64> {
        (0..f.dim())
            .map(|comp| {
                let mut acc = Complex64::new(0.0, 0.0);
                for a in (0..=f.order()).rev() {
                    acc = acc * z + Complex64::new(f.coeffs[a][comp], 0.0);
                }
                acc
            })
            .collect()
    };
    let _ = big_k;
    let (rx, ry) = (2.0, 0.5);
    let circle = |r: f64| -> Vec<(Complex64, Vec<Complex64>)> {
        (0..points)
            .map(|a| {
                let t = 2.0 * std::f64::consts::PI * a as f64 / points as f64;
                let z = Complex64::from_polar(r, t);
                (z, eval(z))
            })
            .collect()
    };
    let xs = circle(rx);
    let ys = circle(ry);
    let mut acc = Complex64::new(0.0, 0.0);
    for (x, fx) in &xs {
        let xpow = x.powi((c - i) as i32);
        for (y, fy) in &ys {
            let dot: Complex64 = fx.iter().zip(fy).map(|(p, q)| p * q).sum();
            let ypow = y.powi((c - j) as i32);
            // (1/2 pi i) oint g dz = (1/M) sum g(z_m) z_m on a circle.
            acc += xpow * ypow * dot / (x - y) * x * y;
        }
    }
    let val = Complex64::new(-2.0, 0.0) * acc / (points as f64 * points as f64);
    val.re
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;
    use crate::scalar::Rat;

    fn random_series(rng: &mut SplitMix64, d: usize, order: usize) -> VectorSeries<Rat> {
        VectorSeries::new(
            (0..=order).map(|_| (0..d).map(|_| rng.rat()).collect()).collect(),
        )
        .unwrap()
    }

    #[test]
    fn exponent_is_pinned_by_axioms() {
        // The residue-extraction exponent is the one integer offset for
        // which the axioms hold identically over random exact series.
        let mut rng = SplitMix64::new(701);
        let mut winners: Vec<i64> = (-4..=4).collect();
        for _ in 0..6 {
            let d = 1 + (rng.below(3) as usize);
            let n_type = 1 + (rng.below(4) as usize);
            let big_k = 1 + (rng.below(2) as usize);
            let f = random_series(&mut rng, d, n_type + 2 * big_k + 2);
            winners.retain(|&off| {
                let m = PadeMoments { f: &f, big_k: big_k as i64, offset: off };
                let k = 2 * big_k as i64;
                let tau = match pade_tau_direct(&m, k, k, 0) {
                    Ok(t) if !t.is_zero() => t,
                    _ => return true, // degenerate draw decides nothing
                };
                let _ = tau;
                let oracle = PadeOracle { m: &m, k, l: 0 };
                let mut coeffs = vec![<Rat as Ring>::zero(); 2 * big_k + 1];
                for j in 0..=(2 * big_k as i64) {
                    let idx: Vec<ExtIndex> = (0..=(2 * big_k as i64))
                        .filter(|i| *i != j)
                        .map(ExtIndex::Int)
                        .collect();
                    let minor = pf_indexed(&oracle, &idx).unwrap();
                    coeffs[2 * big_k - j as usize] = if j % 2 == 0 { minor } else { -minor };
                }
                let p = Poly::from_coeffs(coeffs);
                if p.is_zero() {
                    return false;
                }
                let q = numerator_from_denominator(&p, &f, n_type);
                verify_axioms(&p, &q, &f, n_type, big_k).pass()
            });
        }
        assert_eq!(winners, vec![PADE_EXPONENT_OFFSET], "surviving offsets: {winners:?}");
    }

    #[test]
    fn scalar_geometric_series() {
        // f = 1/(1-z): the [1/2] GIPA is (1-z)/(1-z)^2.
        let f = VectorSeries::new(vec![vec![Rat::one()]; 6]).unwrap();
        let g = gipa_pfaffian(&f, 1, 1).unwrap();
        assert!(g.report.pass(), "{:?}", g.report);
        // P proportional to (1 - z)^2.
        let p = &g.p_denom;
        let c0 = p.coeff(0);
        let expect = Poly::from_coeffs(vec![
            c0.clone(),
            -(Rat::from_i64(2) * c0.clone()),
            c0.clone(),
        ]);
        assert_eq!(*p, expect);
        // P f - Q = O(z^2) and in fact vanishes identically here.
        let q = &g.q_num[0];
        let pf_poly = p.clone() * f.component_polys()[0].clone();
        assert_eq!(pf_poly.truncate(1), q.clone());
    }

    #[test]
    fn k_zero_is_trivial() {
        let mut rng = SplitMix64::new(9);
        let f = random_series(&mut rng, 2, 5);
        let g = gipa_pfaffian(&f, 3, 0).unwrap();
        assert_eq!(g.p_denom, Poly::one());
        assert!(g.report.pass());
        let r = gipa_recursive(&f, 3, 0).unwrap();
        assert_eq!(r.p_denom, Poly::one());
    }

    #[test]
    fn axioms_hold_on_random_exact_series() {
        let mut rng = SplitMix64::new(501);
        let mut checked = 0;
        while checked < 25 {
            let d = 1 + (rng.below(3) as usize);
            let n_type = 1 + (rng.below(4) as usize);
            let big_k = 1 + (rng.below(2) as usize);
            let f = random_series(&mut rng, d, n_type + 2 * big_k + 2);
            match gipa_pfaffian(&f, n_type, big_k) {
                Ok(g) => {
                    assert!(
                        g.report.pass(),
                        "axioms failed d={d} N={n_type} K={big_k}: {:?}",
                        g.report
                    );
                    checked += 1;
                }
                Err(Error::DegenerateTau { .. }) => continue,
                Err(e) => panic!("unexpected error: {e}"),
            }
        }
    }

    #[test]
    fn recursive_path_matches_pfaffian_path() {
        let mut rng = SplitMix64::new(333);
        let mut checked = 0;
        while checked < 10 {
            let d = 1 + (rng.below(3) as usize);
            let n_type = 2 + (rng.below(3) as usize);
            let big_k = 1 + (rng.below(2) as usize);
            let f = random_series(&mut rng, d, n_type + 2 * big_k + 3);
            let pfa = match gipa_pfaffian(&f, n_type, big_k) {
                Ok(g) if g.report.pass() => g,
                _ => continue,
            };
            let rec = match gipa_recursive(&f, n_type, big_k) {
                Ok(r) => r,
                Err(Error::DegenerateTau { .. }) => continue,
                Err(e) => panic!("unexpected: {e}"),
            };
            assert_eq!(rec.p_denom, pfa.p_denom, "d={d} N={n_type} K={big_k}");
            checked += 1;
        }
    }

    #[test]
    fn corrupted_numerator_flagged() {
        let mut rng = SplitMix64::new(77);
        let f = random_series(&mut rng, 2, 7);
        let g = gipa_pfaffian(&f, 2, 1).unwrap();
        assert!(g.report.pass());
        let mut bad_q = g.q_num.clone();
        bad_q[0] = bad_q[0].clone() + Poly::monomial(Rat::one(), 1);
        let report = verify_axioms(&g.p_denom, &bad_q, &f, 2, 1);
        assert!(report.order_violations > 0);
        assert!(!report.pass());
    }

    #[test]
    fn perturbed_denominator_breaks_an_axiom() {
        let mut rng = SplitMix64::new(88);
        let f = random_series(&mut rng, 2, 8);
        let g = gipa_pfaffian(&f, 3, 1).unwrap();
        assert!(g.report.pass());
        for pos in 0..=2usize {
            let mut p = g.p_denom.clone();
            p.c[pos] = p.c[pos].clone() + Rat::one();
            let p = Poly::from_coeffs(p.c);
            let q = numerator_from_denominator(&p, &f, 3);
            let report = verify_axioms(&p, &q, &f, 3, 1);
            assert!(!report.pass(), "perturbing coefficient {pos} went unnoticed");
        }
    }

    #[test]
    fn contour_oracle_matches_window_sums() {
        let mut rng = SplitMix64::new(41);
        for _ in 0..3 {
            let d = 1 + (rng.below(3) as usize);
            let f_exact = random_series(&mut rng, d, 6);
            let f = VectorSeries::new(
                f_exact
                    .coeffs
                    .iter()
                    .map(|v| v.iter().map(crate::scalar::rat_to_f64).collect())
                    .collect(),
            )
            .unwrap();
            let big_k = 1i64;
            let m = PadeMoments::new(&f, big_k);
            for i in 0..=2 {
                for j in 0..=2 {
                    let direct = m.mu_raw(i, j, 2 * big_k, 0);
                    let oracle = contour_entry_oracle(&f, big_k, i, j, 512);
                    assert!(
                        (direct - oracle).abs() < 1e-10 * (1.0 + direct.abs()),
                        "entry ({i},{j}): {direct} vs {oracle}"
                    );
                }
            }
        }
    }

    #[test]
    fn short_series_rejected() {
        let f = VectorSeries::new(vec![vec![Rat::one()]; 3]).unwrap();
        assert!(matches!(
            gipa_pfaffian(&f, 3, 1),
            Err(Error::InsufficientOrder { need: 5, have: 2 })
        ));
    }
}
