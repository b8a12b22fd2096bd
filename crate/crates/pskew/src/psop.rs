//! Partial-skew-orthogonal polynomial families.
//!
//! A family holds the tau sequence `tau_{2n} = Pf(0..2n-1)`,
//! `tau_{2n+1} = Pf(d0, 0..2n)` and the wave polynomials
//! `tau_n P_n = Pf(.., z)` over one moment oracle. Internal identities are
//! kept in cleared-denominator (bilinear) form; the monic polynomials and
//! the nonlinear variables `u_n`, `b_n` are derived by division and raise
//! `DegenerateTau` when a required tau vanishes.

use crate::error::{Error, Result};
use crate::jet::MomentScalar;
use crate::measures::{tau_from_oracle, MomentOracle, MomentSystem};
use crate::pfaffian::{int_range, pf_poly, ExtIndex};
use crate::poly::Poly;
use crate::scalar::{Field, Ring};

/// PSOP family at fixed deformation indices.
pub struct PsopFamily<S> {
    /// `tau_n` for `n = 0..=n_max`.
    pub taus: Vec<S>,
    /// Cleared wave polynomials `tau_n P_n` (exact Pfaffian polynomials).
    pub raw: Vec<Poly<S>>,
    pub k: i64,
    pub l: i64,
}

impl<S: Field> PsopFamily<S> {
    pub fn tau(&self, n: i64) -> S {
        if n < 0 {
            S::zero()
        } else {
            self.taus
                .get(n as usize)
                .cloned()
                .unwrap_or_else(|| panic!("family built to n_max = {}, asked tau({n})", self.n_max()))
        }
    }

    /// Cleared polynomial `tau_n P_n`; `P_{-1} = P_{-2} = 0` boundary.
    pub fn raw_poly(&self, n: i64) -> Poly<S> {
        if n < 0 {
            Poly::zero()
        } else {
            self.raw
                .get(n as usize)
                .cloned()
                .unwrap_or_else(|| panic!("family built to n_max = {}, asked P({n})", self.n_max()))
        }
    }

    /// Monic `P_n`.
    pub fn monic(&self, n: i64) -> Result<Poly<S>> {
        if n < 0 {
            return Ok(Poly::zero());
        }
        let tau = self.tau(n);
        let inv = S::one()
            .try_div(&tau)
            .ok_or(Error::DegenerateTau { n, k: self.k, l: self.l })?;
        Ok(self.raw_poly(n).scale(&inv))
    }

    pub fn n_max(&self) -> i64 {
        self.taus.len() as i64 - 1
    }
}

/// Build a family from a moment oracle. `P(0) = 1`, `P(n)` via the
/// polynomial Pfaffians `Pf(0..2n, z)` and `Pf(d0, 0..2n+1, z)`.
pub fn build_family<S: MomentScalar>(
    oracle: &MomentOracle<'_, S>,
    n_max: i64,
) -> Result<PsopFamily<S>>
where
    S::Base: PartialOrd,
{
    let mut taus = Vec::new();
    let mut raw = Vec::new();
    for n in 0..=n_max {
        taus.push(tau_from_oracle(oracle, n)?);
        let idx = if n % 2 == 0 {
            let mut v = int_range(0, n + 1);
            v.push(ExtIndex::Z);
            v
        } else {
            let mut v = vec![ExtIndex::D0];
            v.extend(int_range(0, n + 1));
            v.push(ExtIndex::Z);
            v
        };
        raw.push(pf_poly(oracle, &idx)?);
    }
    Ok(PsopFamily { taus, raw, k: oracle.k, l: oracle.l })
}

/// Skew inner product extended bilinearly: `<p, q> = sum p_i q_j mu_{i,j}`.
pub fn skew_inner<S: MomentScalar>(
    sys: &MomentSystem<S>,
    k: i64,
    l: i64,
    p: &Poly<S>,
    q: &Poly<S>,
) -> S
where
    S::Base: PartialOrd,
{
    let mut acc = S::zero();
    for (i, pi) in p.c.iter().enumerate() {
        for (j, qj) in q.c.iter().enumerate() {
            acc = acc + pi.clone() * qj.clone() * sys.mu(i as i64, j as i64, k, l);
        }
    }
    acc
}

/// Partial-skew-orthogonality residuals in cleared form.
///
/// Even `n = 2m`: `<tau_{2m} P_{2m}, z^j> - tau_{2m+2} delta_{j,2m+1}` for
/// `j <= 2m+1`. Odd `n = 2m+1`: `<tau_{2m+1} P_{2m+1}, z^j> + tau_{2m+2}
/// beta_j`. All residuals are exactly zero.
pub fn orthogonality_residuals<S: MomentScalar>(
    sys: &MomentSystem<S>,
    family: &PsopFamily<S>,
    n: i64,
) -> Result<Vec<S>>
where
    S::Base: PartialOrd,
{
    let p = family.raw_poly(n);
    let m2 = if n % 2 == 0 { n } else { n - 1 };
    let tau_top = family.tau(m2 + 2);
    let mut out = Vec::new();
    for j in 0..=(m2 + 1) {
        let zj = Poly::monomial(S::one(), j as usize);
        let inner = skew_inner(sys, family.k, family.l, &p, &zj);
        let res = if n % 2 == 0 {
            if j == m2 + 1 {
                inner - tau_top.clone()
            } else {
                inner
            }
        } else {
            inner + tau_top.clone() * sys.beta(j, family.k, family.l)
        };
        out.push(res);
    }
    Ok(out)
}

/// `u_n = tau_{n+1} tau_{n-1} / tau_n^2` and `b_n = (d/dt tau_n)/tau_n` at
/// the origin, with the boundary `u_0 = b_0 = 0`.
pub fn un_bn<S: MomentScalar>(family: &PsopFamily<S>, n: i64) -> Result<(S::Base, S::Base)>
where
    S::Base: PartialOrd,
{
    if n == 0 {
        return Ok((S::Base::zero(), S::Base::zero()));
    }
    let t0 = family.tau(n).order0();
    let sq = t0.clone() * t0.clone();
    let u = (family.tau(n + 1).order0() * family.tau(n - 1).order0())
        .try_div(&sq)
        .ok_or(Error::DegenerateTau { n, k: family.k, l: family.l })?;
    let b = family
        .tau(n)
        .dt()
        .try_div(&t0)
        .ok_or(Error::DegenerateTau { n, k: family.k, l: family.l })?;
    Ok((u, b))
}

/// Residual polynomial of the four-term recurrence
/// `z (P_n + u_n P_{n-1}) = P_{n+1} + (b_{n+1}-b_n+u_n) P_n
///  - u_n (b_{n+1}-b_n+u_{n+1}) P_{n-1} - u_n^2 u_{n-1} P_{n-2}`,
/// evaluated at the origin. Zero coefficient-wise.
pub fn four_term_residual<S: MomentScalar>(
    family: &PsopFamily<S>,
    n: i64,
) -> Result<Poly<S::Base>>
where
    S::Base: PartialOrd,
{
    let p = |m: i64| -> Result<Poly<S::Base>> {
        let poly = family.monic(m)?;
        Ok(Poly::from_coeffs(poly.c.iter().map(|c| c.order0()).collect()))
    };
    let (u_nm1, _) = un_bn(family, n - 1)?;
    let (u_n, b_n) = un_bn(family, n)?;
    let (u_np1, b_np1) = un_bn(family, n + 1)?;
    let z = Poly::monomial(S::Base::one(), 1);
    let lhs = z * (p(n)? + p(n - 1)?.scale(&u_n));
    let c1 = b_np1.clone() - b_n.clone() + u_n.clone();
    let c2 = u_n.clone() * (b_np1 - b_n + u_np1);
    let c3 = u_n.clone() * u_n.clone() * u_nm1;
    let rhs = p(n + 1)? + p(n)?.scale(&c1) - p(n - 1)?.scale(&c2) - p(n - 2)?.scale(&c3);
    Ok(lhs - rhs)
}

/// Truncated Lax data for the 1+1 B-Toda lattice.
///
/// `L1` is unit lower bidiagonal with subdiagonal `u_n`; `L2` is lower
/// Hessenberg; `B2` is strictly lower with entries `u_n (b_{n+1} -
/// b_{n-1})`. Derived `L = L1^{-1} L2`, `B = L1^{-1} B2`.
pub struct LaxTruncation<B> {
    pub size: usize,
    pub u: Vec<B>,
    pub b: Vec<B>,
    pub l1: Vec<Vec<B>>,
    pub l2: Vec<Vec<B>>,
    pub b2: Vec<Vec<B>>,
}

fn lax_from_ub<B: Field>(u: &[B], b: &[B], n: usize) -> LaxTruncation<B> {
    // u[m], b[m] are u_m, b_m with u[0] = b[0] = 0; both slices carry one
    // entry past the truncation for the Hessenberg diagonal.
    let zero = || vec![B::zero(); n];
    let mut l1 = vec![zero(); n];
    let mut l2 = vec![zero(); n];
    let mut b2 = vec![zero(); n];
    for r in 0..n {
        l1[r][r] = B::one();
        if r >= 1 {
            l1[r][r - 1] = u[r].clone();
            b2[r][r - 1] = u[r].clone() * (b[r + 1].clone() - b[r - 1].clone());
            l2[r][r - 1] =
                u[r].clone() * (b[r].clone() - b[r + 1].clone() - u[r + 1].clone());
        }
        if r >= 2 {
            l2[r][r - 2] = -(u[r].clone() * u[r].clone() * u[r - 1].clone());
        }
        l2[r][r] = b[r + 1].clone() - b[r].clone() + u[r].clone();
        if r + 1 < n {
            l2[r][r + 1] = B::one();
        }
    }
    LaxTruncation { size: n, u: u.to_vec(), b: b.to_vec(), l1, l2, b2 }
}

/// Build the truncation from a jet family (values at the origin).
pub fn lax_matrices<S: MomentScalar>(
    family: &PsopFamily<S>,
    n: usize,
) -> Result<LaxTruncation<S::Base>>
where
    S::Base: PartialOrd,
{
    let mut u = Vec::with_capacity(n + 2);
    let mut b = Vec::with_capacity(n + 2);
    for m in 0..=(n as i64 + 1) {
        let (um, bm) = un_bn(family, m)?;
        u.push(um);
        b.push(bm);
    }
    Ok(lax_from_ub(&u, &b, n))
}

/// Forward substitution `L1 y = rhs` for unit lower bidiagonal `L1`.
fn solve_l1<B: Field, T>(
    u: &[B],
    rhs: &[T],
    mul: impl Fn(&B, &T) -> T,
    sub: impl Fn(T, T) -> T,
) -> Vec<T>
where
    T: Clone,
{
    let mut y: Vec<T> = Vec::with_capacity(rhs.len());
    for (r, v) in rhs.iter().enumerate() {
        if r == 0 {
            y.push(v.clone());
        } else {
            let prev = mul(&u[r], &y[r - 1]);
            y.push(sub(v.clone(), prev));
        }
    }
    y
}

/// Residuals of the truncated Lax pair.
///
/// * `spectral[r]`: row `r` of `L Phi - z Phi` as a polynomial, on rows
///   `0..size-2` (interior rows, unaffected by truncation).
/// * `evolution[r]`: row `r` of `dPhi/dt - B Phi` (jet coefficients).
/// * `commutator[r][c]`: `dL/dt - (BL - LB)` on the top-left block.
pub struct LaxResiduals<B> {
    pub spectral: Vec<Poly<B>>,
    pub evolution: Vec<Poly<B>>,
    pub commutator: Vec<Vec<B>>,
}

pub fn lax_residuals<S: MomentScalar>(
    family: &PsopFamily<S>,
    trunc: &LaxTruncation<S::Base>,
) -> Result<LaxResiduals<S::Base>>
where
    S::Base: PartialOrd,
{
    let n = trunc.size;
    let interior = n.saturating_sub(2);
    let polys: Vec<Poly<S::Base>> = (0..n as i64)
        .map(|m| {
            family
                .monic(m)
                .map(|p| Poly::from_coeffs(p.c.iter().map(|c| c.order0()).collect()))
        })
        .collect::<Result<_>>()?;
    let dpolys: Vec<Poly<S::Base>> = (0..n as i64)
        .map(|m| {
            // d/dt P = (d/dt (tau P) - (d/dt tau) P) / tau.
            let tau = family.tau(m);
            let raw = family.raw_poly(m);
            let t0 = tau.order0();
            let inv = S::Base::one().try_div(&t0).ok_or(Error::DegenerateTau {
                n: m,
                k: family.k,
                l: family.l,
            })?;
            let p0 = Poly::from_coeffs(raw.c.iter().map(|c| c.order0()).collect());
            let dp_raw = Poly::from_coeffs(raw.c.iter().map(|c| c.dt()).collect());
            let num = dp_raw - p0.scale(&(tau.dt() * inv.clone()));
            Ok(num.scale(&inv))
        })
        .collect::<Result<_>>()?;

    // Spectral: solve L1 y = L2 Phi, residual y - z Phi.
    let mat_poly = |m: &Vec<Vec<S::Base>>| -> Vec<Poly<S::Base>> {
        (0..n)
            .map(|r| {
                let mut acc = Poly::zero();
                for c in 0..n {
                    if !m[r][c].is_zero() {
                        acc = acc + polys[c].scale(&m[r][c]);
                    }
                }
                acc
            })
            .collect()
    };
    let l2_phi = mat_poly(&trunc.l2);
    let y = solve_l1(&trunc.u, &l2_phi, |u, p: &Poly<S::Base>| p.scale(u), |a, b| a - b);
    let z = Poly::monomial(S::Base::one(), 1);
    let spectral: Vec<Poly<S::Base>> = (0..interior.min(n))
        .map(|r| y[r].clone() - z.clone() * polys[r].clone())
        .collect();

    // Evolution: solve L1 y = B2 Phi, residual dPhi/dt - y.
    let b2_phi = mat_poly(&trunc.b2);
    let ydot = solve_l1(&trunc.u, &b2_phi, |u, p: &Poly<S::Base>| p.scale(u), |a, b| a - b);
    let evolution: Vec<Poly<S::Base>> =
        (0..interior.min(n)).map(|r| dpolys[r].clone() - ydot[r].clone()).collect();

    // Commutator: dL/dt - (BL - LB) on the top-left block, from jet-valued
    // u_n(t), b_n(t) carried to first order (needs order-2 taus).
    use crate::jet::Jet1;
    let mut u_jet: Vec<Jet1<S::Base>> = Vec::with_capacity(n + 2);
    let mut b_jet: Vec<Jet1<S::Base>> = Vec::with_capacity(n + 2);
    for m in 0..=(n as i64 + 1) {
        if m == 0 {
            u_jet.push(Jet1::new(S::Base::zero(), S::Base::zero()));
            b_jet.push(Jet1::new(S::Base::zero(), S::Base::zero()));
            continue;
        }
        let tau_j = |i: i64| -> Jet1<S::Base> {
            let t = family.tau(i);
            Jet1::new(t.order0(), t.dt())
        };
        let sq = tau_j(m).clone() * tau_j(m);
        let u = (tau_j(m + 1) * tau_j(m - 1))
            .try_div(&sq)
            .ok_or(Error::DegenerateTau { n: m, k: family.k, l: family.l })?;
        u_jet.push(u);
        let t = family.tau(m);
        let b = Jet1::new(t.dt(), t.dtt())
            .try_div(&Jet1::new(t.order0(), t.dt()))
            .ok_or(Error::DegenerateTau { n: m, k: family.k, l: family.l })?;
        b_jet.push(b);
    }
    let lax_jet = lax_from_ub(&u_jet, &b_jet, n);
    let solve_mat_jet = |l2: &Vec<Vec<Jet1<S::Base>>>| -> Vec<Vec<Jet1<S::Base>>> {
        let cols: Vec<Vec<Jet1<S::Base>>> = (0..n)
            .map(|c| {
                let rhs: Vec<Jet1<S::Base>> = (0..n).map(|r| l2[r][c].clone()).collect();
                solve_l1(
                    &lax_jet.u,
                    &rhs,
                    |u, v: &Jet1<S::Base>| u.clone() * v.clone(),
                    |a, b| a - b,
                )
            })
            .collect();
        (0..n).map(|r| (0..n).map(|c| cols[c][r].clone()).collect()).collect()
    };
    let mat_l_jet = solve_mat_jet(&lax_jet.l2);
    let l_mat: Vec<Vec<S::Base>> =
        mat_l_jet.iter().map(|row| row.iter().map(|v| v.c[0].clone()).collect()).collect();
    let b_mat: Vec<Vec<S::Base>> = {
        let cols: Vec<Vec<S::Base>> = (0..n)
            .map(|c| {
                let rhs: Vec<S::Base> = (0..n).map(|r| trunc.b2[r][c].clone()).collect();
                solve_l1(&trunc.u, &rhs, |u, v: &S::Base| u.clone() * v.clone(), |a, b| a - b)
            })
            .collect();
        (0..n).map(|r| (0..n).map(|c| cols[c][r].clone()).collect()).collect()
    };
    let block = n.saturating_sub(2);
    let mut commutator = vec![vec![S::Base::zero(); block]; block];
    for r in 0..block {
        for c in 0..block {
            let mut bl = S::Base::zero();
            let mut lb = S::Base::zero();
            for m in 0..n {
                bl = bl + b_mat[r][m].clone() * l_mat[m][c].clone();
                lb = lb + l_mat[r][m].clone() * b_mat[m][c].clone();
            }
            commutator[r][c] = mat_l_jet[r][c].c[1].clone() - (bl - lb);
        }
    }
    Ok(LaxResiduals { spectral, evolution, commutator })
}

/// Bures specialisation: the PSOPs equal the ensemble average of the
/// characteristic polynomial. Ordered-tuple enumeration of
/// `(-1)^{floor(n/2)} sum prod (x_j-x_i)^2/(x_i+x_j) prod (z-x_a) w_a`,
/// compared (in cleared form) against `tau_n P_n`.
pub fn bures_charpoly_residual<S: MomentScalar>(
    sys: &MomentSystem<S>,
    family: &PsopFamily<S>,
    n: usize,
) -> Result<Poly<S>>
where
    S::Base: PartialOrd,
{
    let nodes = &sys.measure.nodes;
    let weights = &sys.measure.weights;
    let count = nodes.len();
    if n > count {
        return Err(Error::InsufficientSupport { need: n, have: count });
    }
    let mut acc: Poly<S> = Poly::zero();
    let mut combo: Vec<usize> = (0..n).collect();
    let finish = |acc: Poly<S>| -> Poly<S> {
        let signed = if (n / 2) % 2 == 1 { -acc } else { acc };
        signed - family.raw_poly(n as i64)
    };
    loop {
        let mut coeff = S::Base::one();
        for i in 0..n {
            for j in (i + 1)..n {
                let (xi, xj) = (&nodes[combo[i]], &nodes[combo[j]]);
                let d = xj.clone() - xi.clone();
                coeff = coeff
                    * (d.clone() * d)
                        .try_div(&(xi.clone() + xj.clone()))
                        .ok_or_else(|| Error::DegenerateSite("x_i + x_j = 0".into()))?;
            }
        }
        let mut term = Poly::constant(S::from_base(&coeff));
        for &a in &combo {
            let w = S::from_base(&weights[a]) * sys.jet_node_factor(a);
            term = term.scale(&w);
            let root = Poly::from_coeffs(vec![-S::from_base(&nodes[a]), S::one()]);
            term = term * root;
        }
        acc = acc + term;

        // Next combination, or finish.
        let mut i = n;
        loop {
            if i == 0 {
                return Ok(finish(acc));
            }
            i -= 1;
            if combo[i] != i + count - n {
                break;
            }
            if i == 0 {
                return Ok(finish(acc));
            }
        }
        combo[i] += 1;
        for j in (i + 1)..n {
            combo[j] = combo[j - 1] + 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::Jet2;
    use crate::measures::{Binding, DiscreteMeasure, Kernel};
    use crate::rng::SplitMix64;
    use crate::scalar::Rat;

    fn r(n: i64) -> Rat {
        Rat::from_i64(n)
    }

    fn bures_sys(nodes: &[i64]) -> MomentSystem<Rat> {
        let m = DiscreteMeasure::new(
            nodes.iter().map(|&v| r(v)).collect(),
            vec![Rat::one(); nodes.len()],
        )
        .unwrap();
        MomentSystem::new(m, Kernel::Bures, Binding::ExpTQExpS).unwrap()
    }

    #[test]
    fn low_order_polynomials() {
        let sys = bures_sys(&[1, 2]);
        let oracle = MomentOracle::new(&sys, 0, 0);
        let fam = build_family(&oracle, 2).unwrap();
        // P(0) = 1.
        assert_eq!(fam.monic(0).unwrap(), Poly::one());
        // P(1) = z - beta_1/beta_0 = z - 3/2 on the {1,2} system.
        let p1 = fam.monic(1).unwrap();
        assert_eq!(p1, Poly::from_coeffs(vec![Rat::new((-3).into(), 2.into()), r(1)]));
        // P(2) = z^2 - (mu02/mu01) z + mu12/mu01.
        let p2 = fam.monic(2).unwrap();
        let mu01 = sys.mu(0, 1, 0, 0);
        let mu02 = sys.mu(0, 2, 0, 0);
        let mu12 = sys.mu(1, 2, 0, 0);
        assert_eq!(
            p2,
            Poly::from_coeffs(vec![
                mu12.try_div(&mu01).unwrap(),
                -mu02.try_div(&mu01).unwrap(),
                r(1),
            ])
        );
    }

    #[test]
    fn monic_and_degree() {
        let mut rng = SplitMix64::new(3);
        let m =
            DiscreteMeasure::new(rng.nodes(6), (0..6).map(|_| rng.pos_rat()).collect()).unwrap();
        let sys: MomentSystem<Rat> =
            MomentSystem::new(m, Kernel::Bures, Binding::ExpTQExpS).unwrap();
        let oracle = MomentOracle::new(&sys, 0, 0);
        let fam = build_family(&oracle, 6).unwrap();
        for n in 0..=6i64 {
            let p = fam.monic(n).unwrap();
            assert_eq!(p.degree(), Some(n as usize));
            assert_eq!(*p.leading().unwrap(), r(1));
        }
    }

    #[test]
    fn skew_inner_basics() {
        let sys = bures_sys(&[1, 2]);
        // <1, 1> = mu_{0,0} = 0; <z^i, z^j> = mu_{i,j}.
        let one = Poly::one();
        assert!(skew_inner(&sys, 0, 0, &one, &one).is_zero());
        let zi = Poly::monomial(Rat::one(), 1);
        let zj = Poly::monomial(Rat::one(), 2);
        assert_eq!(skew_inner(&sys, 0, 0, &zi, &zj), sys.mu(1, 2, 0, 0));
        // <P0, P1> = tau_2/tau_0 = mu_{0,1} = -1/3.
        let oracle = MomentOracle::new(&sys, 0, 0);
        let fam = build_family(&oracle, 2).unwrap();
        let p0 = fam.monic(0).unwrap();
        let p1 = fam.monic(1).unwrap();
        assert_eq!(skew_inner(&sys, 0, 0, &p0, &p1), Rat::new((-1).into(), 3.into()));
    }

    #[test]
    fn orthogonality_exact() {
        let mut rng = SplitMix64::new(41);
        for _ in 0..3 {
            let m = DiscreteMeasure::new(rng.nodes(6), (0..6).map(|_| rng.pos_rat()).collect())
                .unwrap();
            let sys: MomentSystem<Rat> =
                MomentSystem::new(m, Kernel::Bures, Binding::ExpTQExpS).unwrap();
            let oracle = MomentOracle::new(&sys, 0, 0);
            let fam = build_family(&oracle, 6).unwrap();
            for n in 0..=4i64 {
                for res in orthogonality_residuals(&sys, &fam, n).unwrap() {
                    assert!(res.is_zero(), "n={n}");
                }
            }
        }
    }

    #[test]
    fn four_term_recurrence_zero() {
        let mut rng = SplitMix64::new(8);
        let m =
            DiscreteMeasure::new(rng.nodes(7), (0..7).map(|_| rng.pos_rat()).collect()).unwrap();
        let sys: MomentSystem<Jet2<Rat>> =
            MomentSystem::new(m, Kernel::Bures, Binding::ExpTQExpS).unwrap();
        let oracle = MomentOracle::new(&sys, 0, 0);
        let fam = build_family(&oracle, 6).unwrap();
        for n in 1..=4i64 {
            let res = four_term_residual(&fam, n).unwrap();
            assert!(res.is_zero(), "n = {n}: {res:?}");
        }
    }

    #[test]
    fn lax_residuals_vanish_on_interior() {
        let mut rng = SplitMix64::new(15);
        for n in [5usize, 6] {
            let m = DiscreteMeasure::new(rng.nodes(8), (0..8).map(|_| rng.pos_rat()).collect())
                .unwrap();
            let sys: MomentSystem<Jet2<Rat>> =
                MomentSystem::new(m, Kernel::Bures, Binding::ExpTQExpS).unwrap();
            let oracle = MomentOracle::new(&sys, 0, 0);
            let fam = build_family(&oracle, n as i64 + 2).unwrap();
            let trunc = lax_matrices(&fam, n).unwrap();
            let res = lax_residuals(&fam, &trunc).unwrap();
            for (r, p) in res.spectral.iter().enumerate() {
                assert!(p.is_zero(), "spectral row {r}: {p:?}");
            }
            for (r, p) in res.evolution.iter().enumerate() {
                assert!(p.is_zero(), "evolution row {r}: {p:?}");
            }
            for row in &res.commutator {
                for v in row {
                    assert!(v.is_zero(), "commutator: {v:?}");
                }
            }
        }
    }

    #[test]
    fn charpoly_average_matches() {
        let mut rng = SplitMix64::new(29);
        let m =
            DiscreteMeasure::new(rng.nodes(5), (0..5).map(|_| rng.pos_rat()).collect()).unwrap();
        let sys: MomentSystem<Rat> =
            MomentSystem::new(m, Kernel::Bures, Binding::ExpTQExpS).unwrap();
        let oracle = MomentOracle::new(&sys, 0, 0);
        let fam = build_family(&oracle, 5).unwrap();
        for n in 0..=5usize {
            let res = bures_charpoly_residual(&sys, &fam, n).unwrap();
            assert!(res.is_zero(), "n = {n}: {res:?}");
        }
    }

    #[test]
    fn un_bn_boundary_and_values() {
        let m = DiscreteMeasure::new(vec![r(1), r(2), r(3)], vec![Rat::one(); 3]).unwrap();
        let sys: MomentSystem<Jet2<Rat>> =
            MomentSystem::new(m, Kernel::Bures, Binding::ExpTQExpS).unwrap();
        let oracle = MomentOracle::new(&sys, 0, 0);
        let fam = build_family(&oracle, 3).unwrap();
        assert_eq!(un_bn(&fam, 0).unwrap(), (<Rat as Ring>::zero(), <Rat as Ring>::zero()));
        // u_1 = tau_2 tau_0 / tau_1^2; b_1 = beta_1/beta_0 (tau_1 = beta_0).
        let (u1, b1) = un_bn(&fam, 1).unwrap();
        let t1 = fam.tau(1).order0();
        let t2 = fam.tau(2).order0();
        assert_eq!(u1, t2.try_div(&(t1.clone() * t1.clone())).unwrap());
        let beta0 = sys.beta(0, 0, 0).order0();
        let beta1 = sys.beta(1, 0, 0).order0();
        assert_eq!(b1, beta1.try_div(&beta0).unwrap());
    }

    #[test]
    fn degenerate_tau_detected() {
        let m = DiscreteMeasure::new(vec![r(1), r(2)], vec![r(1), r(1)]).unwrap();
        let zero_kernel = Kernel::Generic(vec![
            vec![<Rat as Ring>::zero(), <Rat as Ring>::zero()],
            vec![<Rat as Ring>::zero(), <Rat as Ring>::zero()],
        ]);
        let sys: MomentSystem<Rat> =
            MomentSystem::new(m, zero_kernel, Binding::ExpTQExpS).unwrap();
        let oracle = MomentOracle::new(&sys, 0, 0);
        let fam = build_family(&oracle, 2).unwrap();
        // tau_2 = mu_{0,1} = 0 for the zero kernel.
        assert!(matches!(fam.monic(2), Err(Error::DegenerateTau { n: 2, .. })));
    }
}
