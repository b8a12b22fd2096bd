//! Tau tables, residual verification and time evolution for the lattice
//! hierarchy.
//!
//! Seven systems are covered, one per weight deformation:
//!
//! | id         | kernel          | deformation            | time data |
//! |------------|-----------------|------------------------|-----------|
//! | `Glv1p2`   | any             | `x^k e^{tx}`           | order-1 jet |
//! | `Glv3d`    | any             | `x^k (1+x)^l`          | none |
//! | `BToda2p1` | `(q(x)-q(y))/(q(x)+q(y))` | `e^{tx+sq(x)}` | mixed jet |
//! | `BToda1p1` | `(x-y)/(x+y)`   | `e^{tx}`               | order-2 jet |
//! | `BToda1p2` | `(x-y)/(xy+x+y)`| `(1+x)^k e^{tx}`       | order-1 jet |
//! | `BToda3d`  | `(x-y)/(xy+x+y)`| `(1+x)^{k+l}`          | none |
//! | `BToda2d`  | `(x-y)/(xy+x+y)`| `(1+x)^k`              | none |
//!
//! Discrete-time systems are verified in bilinear (tau) form primarily;
//! the nonlinear forms are derived from tau ratios and checked where the
//! ratios are finite.

use std::collections::HashMap;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::jet::{Jet1, Jet2, JetTS, MomentScalar};
use crate::measures::{
    tau_from_oracle, Binding, C0Row, DiscreteMeasure, Kernel, MomentOracle, MomentSystem,
};
use crate::pfaffian::{int_range, pf_indexed, EntryOracle, ExtIndex};
use crate::poly::Poly;
use crate::psop::{build_family, PsopFamily};
use crate::scalar::{Field, Rat, Ring};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LatticeId {
    Glv1p2,
    Glv3d,
    BToda2p1,
    BToda1p1,
    BToda1p2,
    BToda3d,
    BToda2d,
}

impl LatticeId {
    pub const ALL: [LatticeId; 7] = [
        LatticeId::Glv1p2,
        LatticeId::Glv3d,
        LatticeId::BToda2p1,
        LatticeId::BToda1p1,
        LatticeId::BToda1p2,
        LatticeId::BToda3d,
        LatticeId::BToda2d,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            LatticeId::Glv1p2 => "glv-1p2",
            LatticeId::Glv3d => "glv-3d",
            LatticeId::BToda2p1 => "btoda-2p1",
            LatticeId::BToda1p1 => "btoda-1p1",
            LatticeId::BToda1p2 => "btoda-1p2",
            LatticeId::BToda3d => "btoda-3d",
            LatticeId::BToda2d => "btoda-2d",
        }
    }
}

impl FromStr for LatticeId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        LatticeId::ALL
            .iter()
            .copied()
            .find(|id| id.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown lattice system '{s}'")))
    }
}

/// Grid of tau values indexed by `(n, k, l)`.
///
/// `tau(0, ., .) = 1` and `tau(n < 0, ., .) = 0` hold by convention even
/// for cells outside the stored ranges.
#[derive(Clone, Debug)]
pub struct TauTable<S> {
    cells: HashMap<(i64, i64, i64), S>,
    pub n_max: i64,
    pub k_max: i64,
    pub l_max: i64,
}

impl<S: Ring> TauTable<S> {
    pub fn get(&self, n: i64, k: i64, l: i64) -> Result<S> {
        if n < 0 {
            return Ok(S::zero());
        }
        if n == 0 {
            return Ok(S::one());
        }
        self.cells.get(&(n, k, l)).cloned().ok_or(Error::MissingCell(n, k, l))
    }
}

/// Fill a tau table from a moment system by direct Pfaffian evaluation.
pub fn tau_table<S: MomentScalar>(
    sys: &MomentSystem<S>,
    n_max: i64,
    k_max: i64,
    l_max: i64,
) -> Result<TauTable<S>>
where
    S::Base: PartialOrd,
{
    let mut cells = HashMap::new();
    for k in 0..=k_max {
        for l in 0..=l_max {
            let oracle = MomentOracle::new(sys, k, l);
            for n in 1..=n_max {
                cells.insert((n, k, l), tau_from_oracle(&oracle, n)?);
            }
        }
    }
    Ok(TauTable { cells, n_max, k_max, l_max })
}

// -------------------------------------------------------------------------
// System constructors (one binding per lattice).
// -------------------------------------------------------------------------

pub fn glv1p2_system<B: Field + PartialOrd>(
    measure: DiscreteMeasure<B>,
    kernel: Kernel<B>,
) -> Result<MomentSystem<Jet1<B>>> {
    MomentSystem::new(measure, kernel, Binding::PowerExpT)
}

pub fn glv3d_system<B: Field + PartialOrd>(
    measure: DiscreteMeasure<B>,
    kernel: Kernel<B>,
) -> Result<MomentSystem<B>>
where
    B: MomentScalar<Base = B>,
{
    MomentSystem::new(measure, kernel, Binding::PowerShift)
}

pub fn btoda2p1_system<B: Field + PartialOrd>(
    measure: DiscreteMeasure<B>,
    q: Poly<B>,
) -> Result<MomentSystem<JetTS<B>>> {
    MomentSystem::new(measure, Kernel::QRatio(q), Binding::ExpTQExpS)
}

pub fn btoda1p1_system<B: Field + PartialOrd>(
    measure: DiscreteMeasure<B>,
) -> Result<MomentSystem<Jet2<B>>> {
    MomentSystem::new(measure, Kernel::Bures, Binding::ExpTQExpS)
}

pub fn btoda1p2_system<B: Field + PartialOrd>(
    measure: DiscreteMeasure<B>,
) -> Result<MomentSystem<Jet1<B>>> {
    MomentSystem::new(measure, Kernel::Shifted, Binding::ShiftExpT)
}

pub fn btoda3d_system<B: Field + PartialOrd>(measure: DiscreteMeasure<B>) -> Result<MomentSystem<B>>
where
    B: MomentScalar<Base = B>,
{
    MomentSystem::new(measure, Kernel::Shifted, Binding::ShiftKL)
}

pub fn btoda2d_system<B: Field + PartialOrd>(measure: DiscreteMeasure<B>) -> Result<MomentSystem<B>>
where
    B: MomentScalar<Base = B>,
{
    MomentSystem::new(measure, Kernel::Shifted, Binding::ShiftK)
}

// -------------------------------------------------------------------------
// Bilinear residuals.
// -------------------------------------------------------------------------

/// `tau_{n+1}^k (d/dt tau_n^{k+1}) - tau_n^{k+1} (d/dt tau_{n+1}^k)
///  - tau_{n+2}^k tau_{n-1}^{k+1} + tau_n^k tau_{n+1}^{k+1}`.
pub fn glv1p2_bilinear<S: MomentScalar>(t: &TauTable<S>, n: i64, k: i64) -> Result<S::Base> {
    let g = |n, k| t.get(n, k, 0);
    Ok(g(n + 1, k)?.order0() * g(n, k + 1)?.dt() - g(n, k + 1)?.order0() * g(n + 1, k)?.dt()
        - g(n + 2, k)?.order0() * g(n - 1, k + 1)?.order0()
        + g(n, k)?.order0() * g(n + 1, k + 1)?.order0())
}

/// Discrete BKP form of the gLV lattice.
pub fn glv3d_bilinear<S: Ring>(t: &TauTable<S>, n: i64, k: i64, l: i64) -> Result<S> {
    Ok(t.get(n + 2, k, l)? * t.get(n - 1, k + 1, l + 1)?
        - t.get(n, k, l + 1)? * t.get(n + 1, k + 1, l)?
        - t.get(n, k + 1, l + 1)? * t.get(n + 1, k, l)?
        + t.get(n, k + 1, l)? * t.get(n + 1, k, l + 1)?)
}

/// `(d2/dtds tau_n) tau_n - (dt tau_n)(ds tau_n)
///  - (ds tau_{n-1}) tau_{n+1} + (ds tau_{n+1}) tau_{n-1}`.
pub fn btoda2p1_bilinear<S: MomentScalar>(t: &TauTable<S>, n: i64) -> Result<S::Base> {
    let g = |n| t.get(n, 0, 0);
    Ok(g(n)?.dts() * g(n)?.order0() - g(n)?.dt() * g(n)?.ds()
        - g(n - 1)?.ds() * g(n + 1)?.order0()
        + g(n + 1)?.ds() * g(n - 1)?.order0())
}

/// Second-derivative bilinear form of the 1+1 B-Toda lattice.
pub fn btoda1p1_bilinear<S: MomentScalar>(t: &TauTable<S>, n: i64) -> Result<S::Base> {
    let g = |n| t.get(n, 0, 0);
    Ok(g(n)?.dtt() * g(n)?.order0() - g(n)?.dt() * g(n)?.dt()
        - g(n - 1)?.dt() * g(n + 1)?.order0()
        + g(n + 1)?.dt() * g(n - 1)?.order0())
}

/// `(d/dt tau_n^{k+1}) tau_n^k - (d/dt tau_n^k) tau_n^{k+1}
///  - tau_{n+1}^k tau_{n-1}^{k+1} + tau_{n+1}^{k+1} tau_{n-1}^k`.
pub fn btoda1p2_bilinear<S: MomentScalar>(t: &TauTable<S>, n: i64, k: i64) -> Result<S::Base> {
    let g = |n, k| t.get(n, k, 0);
    Ok(g(n, k + 1)?.dt() * g(n, k)?.order0() - g(n, k)?.dt() * g(n, k + 1)?.order0()
        - g(n + 1, k)?.order0() * g(n - 1, k + 1)?.order0()
        + g(n + 1, k + 1)?.order0() * g(n - 1, k)?.order0())
}

/// Fully discrete 3D B-Toda bilinear form.
pub fn btoda3d_bilinear<S: Ring>(t: &TauTable<S>, n: i64, k: i64, l: i64) -> Result<S> {
    Ok(t.get(n, k + 1, l + 1)? * t.get(n, k, l)? - t.get(n, k, l + 1)? * t.get(n, k + 1, l)?
        - t.get(n - 1, k + 1, l + 1)? * t.get(n + 1, k, l)?
        + t.get(n + 1, k + 1, l)? * t.get(n - 1, k, l + 1)?)
}

/// Fully discrete 2D B-Toda bilinear form (the `l` index is unused).
pub fn btoda2d_bilinear<S: Ring>(t: &TauTable<S>, n: i64, k: i64) -> Result<S> {
    Ok(t.get(n, k + 2, 0)? * t.get(n, k, 0)? - t.get(n, k + 1, 0)?.clone() * t.get(n, k + 1, 0)?
        - t.get(n + 1, k, 0)? * t.get(n - 1, k + 2, 0)?
        + t.get(n + 1, k + 1, 0)? * t.get(n - 1, k + 1, 0)?)
}

/// One residual entry of a bilinear sweep.
#[derive(Clone, Debug)]
pub struct SiteResidual {
    pub site: (i64, i64, i64),
    pub value: Rat,
}

/// Exact-backend bilinear sweep over interior sites `1 <= n <= n_max`,
/// `0 <= k <= k_max`, `0 <= l <= l_max` (indices a system does not carry
/// are fixed at zero). Deterministic row-major order in `n`, `k`, `l`.
pub fn bilinear_sweep(
    id: LatticeId,
    measure: &DiscreteMeasure<Rat>,
    n_max: i64,
    k_max: i64,
    l_max: i64,
) -> Result<Vec<SiteResidual>> {
    let mut out = Vec::new();
    match id {
        LatticeId::Glv1p2 => {
            let sys = glv1p2_system(measure.clone(), Kernel::Sgn)?;
            let t = tau_table(&sys, n_max + 2, k_max + 1, 0)?;
            for n in 1..=n_max {
                for k in 0..=k_max {
                    out.push(SiteResidual { site: (n, k, 0), value: glv1p2_bilinear(&t, n, k)? });
                }
            }
        }
        LatticeId::Glv3d => {
            let sys = glv3d_system(measure.clone(), Kernel::Sgn)?;
            let t = tau_table(&sys, n_max + 2, k_max + 1, l_max + 1)?;
            for n in 1..=n_max {
                for k in 0..=k_max {
                    for l in 0..=l_max {
                        out.push(SiteResidual {
                            site: (n, k, l),
                            value: glv3d_bilinear(&t, n, k, l)?,
                        });
                    }
                }
            }
        }
        LatticeId::BToda2p1 => {
            let sys = btoda2p1_system(measure.clone(), Poly::monomial(Rat::one(), 2))?;
            let t = tau_table(&sys, n_max + 1, 0, 0)?;
            for n in 1..=n_max {
                out.push(SiteResidual { site: (n, 0, 0), value: btoda2p1_bilinear(&t, n)? });
            }
        }
        LatticeId::BToda1p1 => {
            let sys = btoda1p1_system(measure.clone())?;
            let t = tau_table(&sys, n_max + 1, 0, 0)?;
            for n in 1..=n_max {
                out.push(SiteResidual { site: (n, 0, 0), value: btoda1p1_bilinear(&t, n)? });
            }
        }
        LatticeId::BToda1p2 => {
            let sys = btoda1p2_system(measure.clone())?;
            let t = tau_table(&sys, n_max + 1, k_max + 1, 0)?;
            for n in 1..=n_max {
                for k in 0..=k_max {
                    out.push(SiteResidual { site: (n, k, 0), value: btoda1p2_bilinear(&t, n, k)? });
                }
            }
        }
        LatticeId::BToda3d => {
            let sys = btoda3d_system(measure.clone())?;
            let t = tau_table(&sys, n_max + 1, k_max + 1, l_max + 1)?;
            for n in 1..=n_max {
                for k in 0..=k_max {
                    for l in 0..=l_max {
                        out.push(SiteResidual {
                            site: (n, k, l),
                            value: btoda3d_bilinear(&t, n, k, l)?,
                        });
                    }
                }
            }
        }
        LatticeId::BToda2d => {
            let sys = btoda2d_system(measure.clone())?;
            let t = tau_table(&sys, n_max + 1, k_max + 2, 0)?;
            for n in 1..=n_max {
                for k in 0..=k_max {
                    out.push(SiteResidual { site: (n, k, 0), value: btoda2d_bilinear(&t, n, k)? });
                }
            }
        }
    }
    Ok(out)
}

// -------------------------------------------------------------------------
// Nonlinear variables and residuals.
// -------------------------------------------------------------------------

/// Named variable grids extracted from a tau table.
#[derive(Clone, Debug, Default)]
pub struct LatticeState<B> {
    pub fields: Vec<(&'static str, HashMap<(i64, i64, i64), B>)>,
}

impl<B: Clone> LatticeState<B> {
    pub fn get(&self, name: &str, site: (i64, i64, i64)) -> Option<&B> {
        self.fields.iter().find(|(n, _)| *n == name).and_then(|(_, m)| m.get(&site))
    }
}

fn ratio<S: Field>(num: S, den: S, site: (i64, i64, i64)) -> Result<S> {
    num.try_div(&den).ok_or_else(|| Error::DegenerateSite(format!("{site:?}")))
}

/// Extract the nonlinear variables of a system from its tau table
/// (order-zero parts for jet backends).
pub fn nonlinear_vars<S: MomentScalar>(
    id: LatticeId,
    t: &TauTable<S>,
) -> Result<LatticeState<S::Base>> {
    let mut fields: Vec<(&'static str, HashMap<(i64, i64, i64), S::Base>)> = Vec::new();
    let mut push = |name: &'static str| -> usize {
        fields.push((name, HashMap::new()));
        fields.len() - 1
    };
    let val = |t: &TauTable<S>, n: i64, k: i64, l: i64| -> Result<S::Base> {
        Ok(t.get(n, k, l)?.order0())
    };
    match id {
        LatticeId::Glv1p2 | LatticeId::BToda1p2 => {
            // r_n^k = tau_n^{k+1}/tau_n^k, v_n^k = tau_{n+1}^k/tau_n^{k+1}.
            let r = push("r");
            let v = push("v");
            for n in 0..=t.n_max - 1 {
                for k in 0..=t.k_max - 1 {
                    let site = (n, k, 0);
                    let rv = ratio(val(t, n, k + 1, 0)?, val(t, n, k, 0)?, site)?;
                    let vv = ratio(val(t, n + 1, k, 0)?, val(t, n, k + 1, 0)?, site)?;
                    fields[r].1.insert(site, rv);
                    fields[v].1.insert(site, vv);
                }
            }
        }
        LatticeId::Glv3d | LatticeId::BToda3d => {
            let v = push("v");
            let u = push("u");
            let w = push("w");
            for n in 0..=t.n_max - 1 {
                for k in 0..=t.k_max - 1 {
                    for l in 0..=t.l_max - 1 {
                        let site = (n, k, l);
                        let d = val(t, n, k, l)?;
                        fields[v].1.insert(site, ratio(val(t, n + 1, k, l)?, d.clone(), site)?);
                        fields[u].1.insert(site, ratio(val(t, n, k + 1, l)?, d.clone(), site)?);
                        fields[w].1.insert(site, ratio(val(t, n, k, l + 1)?, d, site)?);
                    }
                }
            }
        }
        LatticeId::BToda2d => {
            let v = push("v");
            let u = push("u");
            for n in 0..=t.n_max - 1 {
                for k in 0..=t.k_max - 1 {
                    let site = (n, k, 0);
                    let d = val(t, n, k, 0)?;
                    fields[v].1.insert(site, ratio(val(t, n + 1, k, 0)?, d.clone(), site)?);
                    fields[u].1.insert(site, ratio(val(t, n, k + 1, 0)?, d, site)?);
                }
            }
        }
        LatticeId::BToda1p1 | LatticeId::BToda2p1 => {
            // u_n = tau_{n+1} tau_{n-1} / tau_n^2; b_n = d log tau_n
            // (s-derivative for 2+1, t-derivative for 1+1).
            let u = push("u");
            let b = push("b");
            for n in 0..=t.n_max - 1 {
                let site = (n, 0, 0);
                if n == 0 {
                    fields[u].1.insert(site, S::Base::zero());
                    fields[b].1.insert(site, S::Base::zero());
                    continue;
                }
                let tn = val(t, n, 0, 0)?;
                let sq = tn.clone() * tn.clone();
                fields[u].1.insert(
                    site,
                    ratio(val(t, n + 1, 0, 0)? * val(t, n - 1, 0, 0)?, sq, site)?,
                );
                let d = if id == LatticeId::BToda2p1 {
                    t.get(n, 0, 0)?.ds()
                } else {
                    t.get(n, 0, 0)?.dt()
                };
                fields[b].1.insert(site, ratio(d, tn, site)?);
            }
        }
    }
    Ok(LatticeState { fields })
}

/// Residuals of the nonlinear system at one site, exactly zero on tau
/// tables from a moment system.
pub fn nonlinear_residual<S: MomentScalar>(
    id: LatticeId,
    t: &TauTable<S>,
    n: i64,
    k: i64,
    l: i64,
) -> Result<Vec<S::Base>> {
    let site = (n, k, l);
    let v0 = |n: i64, k: i64, l: i64| -> Result<S::Base> { Ok(t.get(n, k, l)?.order0()) };
    match id {
        LatticeId::Glv1p2 => {
            // v_n^k as a jet ratio; dv/dt = v_n r_{n+1}/(v_{n-1} r_n)
            // (v_{n-1} - v_{n+1}); v_n^k r_n^k = r_{n+1}^{k-1} v_n^{k-1}.
            let vjet = |n: i64, k: i64| -> Result<S> {
                let num = t.get(n + 1, k, 0)?;
                let den = t.get(n, k + 1, 0)?;
                num.try_div(&den).ok_or_else(|| Error::DegenerateSite(format!("{site:?}")))
            };
            let v = |n: i64, k: i64| -> Result<S::Base> { Ok(vjet(n, k)?.order0()) };
            let r = |n: i64, k: i64| -> Result<S::Base> {
                ratio(v0(n, k + 1, 0)?, v0(n, k, 0)?, site)
            };
            let coeff = ratio(v(n, k)? * r(n + 1, k)?, v(n - 1, k)? * r(n, k)?, site)?;
            let r1 = vjet(n, k)?.dt() - coeff * (v(n - 1, k)? - v(n + 1, k)?);
            let mut out = vec![r1];
            if k >= 1 {
                out.push(v(n, k)? * r(n, k)? - r(n + 1, k - 1)? * v(n, k - 1)?);
            }
            Ok(out)
        }
        LatticeId::Glv3d => {
            let v = |n: i64, k: i64, l: i64| ratio(v0(n + 1, k, l)?, v0(n, k, l)?, site);
            let u = |n: i64, k: i64, l: i64| ratio(v0(n, k + 1, l)?, v0(n, k, l)?, site);
            let w = |n: i64, k: i64, l: i64| ratio(v0(n, k, l + 1)?, v0(n, k, l)?, site);
            let r1 = v(n, k + 1, l)? * u(n, k, l)? - v(n, k, l)? * u(n + 1, k, l)?;
            let r2 = v(n, k, l + 1)? * w(n, k, l)? - v(n, k, l)? * w(n + 1, k, l)?;
            let r3 = ratio(v(n + 1, k, l)?, v(n - 1, k + 1, l + 1)?, site)?
                - S::Base::one()
                - ratio(u(n + 1, k, l)?, u(n, k, l + 1)?, site)?
                + ratio(w(n + 1, k, l)?, w(n, k + 1, l)?, site)?;
            Ok(vec![r1, r2, r3])
        }
        LatticeId::BToda2p1 => {
            let ujet = |n: i64| -> Result<S> {
                let sq = t.get(n, 0, 0)?.clone() * t.get(n, 0, 0)?;
                (t.get(n + 1, 0, 0)? * t.get(n - 1, 0, 0)?)
                    .try_div(&sq)
                    .ok_or_else(|| Error::DegenerateSite(format!("{site:?}")))
            };
            let bval = |n: i64| -> Result<S::Base> {
                if n == 0 {
                    return Ok(S::Base::zero());
                }
                ratio(t.get(n, 0, 0)?.ds(), t.get(n, 0, 0)?.order0(), site)
            };
            // b_n carried as a t-jet to reach the cross derivative.
            let bjet = |n: i64| -> Result<Jet1<S::Base>> {
                if n == 0 {
                    return Ok(Jet1::new(S::Base::zero(), S::Base::zero()));
                }
                let tau = t.get(n, 0, 0)?;
                Jet1::new(tau.ds(), tau.dts())
                    .try_div(&Jet1::new(tau.order0(), tau.dt()))
                    .ok_or_else(|| Error::DegenerateSite(format!("{site:?}")))
            };
            let u = ujet(n)?;
            let r1 = u.ds()
                - u.order0() * (bval(n + 1)? - S::Base::from_i64(2) * bval(n)? + bval(n - 1)?);
            let r2 = bjet(n)?.c[1].clone() - u.order0() * (bval(n - 1)? - bval(n + 1)?);
            Ok(vec![r1, r2])
        }
        LatticeId::BToda1p1 => {
            let tjet = |n: i64| -> Result<Jet1<S::Base>> {
                let tau = t.get(n, 0, 0)?;
                Ok(Jet1::new(tau.order0(), tau.dt()))
            };
            let ujet = |n: i64| -> Result<Jet1<S::Base>> {
                let sq = tjet(n)?.clone() * tjet(n)?;
                (tjet(n + 1)? * tjet(n - 1)?)
                    .try_div(&sq)
                    .ok_or_else(|| Error::DegenerateSite(format!("{site:?}")))
            };
            let bjet = |n: i64| -> Result<Jet1<S::Base>> {
                if n == 0 {
                    return Ok(Jet1::new(S::Base::zero(), S::Base::zero()));
                }
                let tau = t.get(n, 0, 0)?;
                Jet1::new(tau.dt(), tau.dtt())
                    .try_div(&Jet1::new(tau.order0(), tau.dt()))
                    .ok_or_else(|| Error::DegenerateSite(format!("{site:?}")))
            };
            let u = ujet(n)?;
            let b = |m: i64| -> Result<S::Base> { Ok(bjet(m)?.c[0].clone()) };
            let r1 = u.c[1].clone()
                - u.c[0].clone() * (b(n + 1)? - S::Base::from_i64(2) * b(n)? + b(n - 1)?);
            let r2 = bjet(n)?.c[1].clone() - u.c[0].clone() * (b(n - 1)? - b(n + 1)?);
            Ok(vec![r1, r2])
        }
        LatticeId::BToda1p2 => {
            let rjet = |n: i64, k: i64| -> Result<S> {
                t.get(n, k + 1, 0)?
                    .try_div(&t.get(n, k, 0)?)
                    .ok_or_else(|| Error::DegenerateSite(format!("{site:?}")))
            };
            let r = |n: i64, k: i64| -> Result<S::Base> { Ok(rjet(n, k)?.order0()) };
            let v = |n: i64, k: i64| ratio(v0(n + 1, k, 0)?, v0(n, k + 1, 0)?, site);
            let coeff = ratio(v(n, k)? * r(n, k)?, v(n - 1, k)? * r(n - 1, k)?, site)?;
            let r1 = rjet(n, k)?.dt() - coeff * (r(n - 1, k)? - r(n + 1, k)?);
            let mut out = vec![r1];
            if k >= 1 {
                out.push(v(n, k)? * r(n, k)? - r(n + 1, k - 1)? * v(n, k - 1)?);
            }
            Ok(out)
        }
        LatticeId::BToda3d => {
            let v = |n: i64, k: i64, l: i64| ratio(v0(n + 1, k, l)?, v0(n, k, l)?, site);
            let u = |n: i64, k: i64, l: i64| ratio(v0(n, k + 1, l)?, v0(n, k, l)?, site);
            let w = |n: i64, k: i64, l: i64| ratio(v0(n, k, l + 1)?, v0(n, k, l)?, site);
            let r1 = v(n, k + 1, l)? * u(n, k, l)? - v(n, k, l)? * u(n + 1, k, l)?;
            let r2 = v(n, k, l + 1)? * w(n, k, l)? - v(n, k, l)? * w(n + 1, k, l)?;
            // The last denominator reads v_n^{k,l+1}: dividing the
            // bilinear form at site n+1 by tau_{n+1}^{k,l+1} tau_{n+1}^{k+1,l}
            // produces v_{n+1}^{k+1,l} / v_n^{k,l+1} there.
            let r3 = ratio(u(n + 1, k, l + 1)?, u(n + 1, k, l)?, site)?
                - S::Base::one()
                - ratio(
                    v(n + 1, k, l)? * w(n, k + 1, l)?,
                    w(n + 1, k, l)? * v(n, k + 1, l)?,
                    site,
                )?
                + ratio(v(n + 1, k + 1, l)?, v(n, k, l + 1)?, site)?;
            Ok(vec![r1, r2, r3])
        }
        LatticeId::BToda2d => {
            let v = |n: i64, k: i64| ratio(v0(n + 1, k, 0)?, v0(n, k, 0)?, site);
            let u = |n: i64, k: i64| ratio(v0(n, k + 1, 0)?, v0(n, k, 0)?, site);
            let r1 = v(n, k + 1)? * u(n, k)? - v(n, k)? * u(n + 1, k)?;
            // k+l reduction of the 3D form, with the same denominator
            // correction: the last term divides by v_n^{k+1}.
            let r2 = ratio(u(n + 1, k + 1)?, u(n + 1, k)?, site)?
                - S::Base::one()
                - ratio(v(n + 1, k)? * u(n, k + 1)?, u(n + 1, k)? * v(n, k + 1)?, site)?
                + ratio(v(n + 1, k + 1)?, v(n, k + 1)?, site)?;
            Ok(vec![r1, r2])
        }
    }
}

// -------------------------------------------------------------------------
// Adjacent-family wave relations (zero residual polynomials).
// -------------------------------------------------------------------------

/// Families on a `(k, l)` grid, each built to the same `n_max`.
pub fn family_grid<S: MomentScalar>(
    sys: &MomentSystem<S>,
    n_max: i64,
    k_max: i64,
    l_max: i64,
) -> Result<HashMap<(i64, i64), PsopFamily<S>>>
where
    S::Base: PartialOrd,
{
    let mut out = HashMap::new();
    for k in 0..=k_max {
        for l in 0..=l_max {
            let oracle = MomentOracle::new(sys, k, l);
            out.insert((k, l), build_family(&oracle, n_max)?);
        }
    }
    Ok(out)
}

/// Residual polynomial of the adjacent-family relation of a lattice at
/// `(n, k, l)`, in cleared (division-free) form wherever the printed
/// relation allows it.
pub fn adjacent_relation_residual<S: MomentScalar>(
    id: LatticeId,
    fams: &HashMap<(i64, i64), PsopFamily<S>>,
    n: i64,
    k: i64,
    l: i64,
) -> Result<Poly<S>> {
    let fam = |k: i64, l: i64| -> Result<&PsopFamily<S>> {
        fams.get(&(k, l)).ok_or(Error::MissingCell(-1, k, l))
    };
    let z = Poly::monomial(S::one(), 1);
    let zp1 = Poly::from_coeffs(vec![S::one(), S::one()]);
    match id {
        LatticeId::Glv1p2 => {
            // z (tau_{n+1}^k Pi_n^{k+1} + tau_{n+2}^k Pi_{n-1}^{k+1})
            //  = tau_n^{k+1} Pi_{n+1}^k + tau_{n+1}^{k+1} Pi_n^k.
            let f0 = fam(k, 0)?;
            let f1 = fam(k + 1, 0)?;
            let lhs = z.clone()
                * (f1.raw_poly(n).scale(&f0.tau(n + 1))
                    + f1.raw_poly(n - 1).scale(&f0.tau(n + 2)));
            let rhs = f0.raw_poly(n + 1).scale(&f1.tau(n))
                + f0.raw_poly(n).scale(&f1.tau(n + 1));
            Ok(lhs - rhs)
        }
        LatticeId::Glv3d => {
            let f00 = fam(k, l)?;
            let f10 = fam(k + 1, l)?;
            let f01 = fam(k, l + 1)?;
            let f11 = fam(k + 1, l + 1)?;
            let lhs = zp1.clone() * f01.raw_poly(n).scale(&f10.tau(n + 1))
                + f00.raw_poly(n + 1).scale(&f11.tau(n));
            let rhs = z.clone() * zp1 * f11.raw_poly(n - 1).scale(&f00.tau(n + 2))
                + z * f10.raw_poly(n).scale(&f01.tau(n + 1));
            Ok(lhs - rhs)
        }
        LatticeId::BToda2p1 | LatticeId::BToda1p1 => {
            // tau_n^2 dP_n = (tau_{n-1} dtau_{n+1} - tau_{n+1} dtau_{n-1})
            //   P_{n-1} - tau_{n+1} tau_{n-1} dP_{n-1},
            // with d = d/ds for 2+1 and d = d/dt for 1+1; order-0 check.
            let f = fam(0, 0)?;
            let deriv = |v: &S| -> S::Base {
                if id == LatticeId::BToda2p1 {
                    v.ds()
                } else {
                    v.dt()
                }
            };
            let base_poly = |p: &Poly<S>| -> Poly<S::Base> {
                Poly::from_coeffs(p.c.iter().map(|c| c.order0()).collect())
            };
            let dmonic = |m: i64| -> Result<Poly<S::Base>> {
                // d(P) = (d(tau P) - d(tau) P)/tau at the origin.
                let tau = f.tau(m);
                let t0 = tau.order0();
                let inv = S::Base::one().try_div(&t0).ok_or(Error::DegenerateTau {
                    n: m,
                    k: 0,
                    l: 0,
                })?;
                let raw = f.raw_poly(m);
                let draw = Poly::from_coeffs(raw.c.iter().map(deriv).collect());
                let p0 = base_poly(&raw).scale(&inv);
                Ok((draw - p0.scale(&deriv(&tau))).scale(&inv))
            };
            let monic0 = |m: i64| -> Result<Poly<S::Base>> {
                let tau = f.tau(m);
                let inv = S::Base::one().try_div(&tau.order0()).ok_or(
                    Error::DegenerateTau { n: m, k: 0, l: 0 },
                )?;
                Ok(base_poly(&f.raw_poly(m)).scale(&inv))
            };
            let t = |m: i64| f.tau(m).order0();
            let dt_ = |m: i64| deriv(&f.tau(m));
            let lhs = dmonic(n)?.scale(&(t(n) * t(n)));
            let c = t(n - 1) * dt_(n + 1) - t(n + 1) * dt_(n - 1);
            let rhs = monic0(n - 1)?.scale(&c) - dmonic(n - 1)?.scale(&(t(n + 1) * t(n - 1)));
            let residual = lhs - rhs;
            Ok(Poly::from_coeffs(residual.c.iter().map(|v| S::from_base(v)).collect()))
        }
        LatticeId::BToda1p2 => {
            // tau_n^k Pi_n^{k+1} - tau_n^{k+1} Pi_n^k
            //  = tau_{n+1}^{k+1} Pi_{n-1}^k - tau_{n+1}^k Pi_{n-1}^{k+1}.
            let f0 = fam(k, 0)?;
            let f1 = fam(k + 1, 0)?;
            let lhs = f1.raw_poly(n).scale(&f0.tau(n)) - f0.raw_poly(n).scale(&f1.tau(n));
            let rhs = f0.raw_poly(n - 1).scale(&f1.tau(n + 1))
                - f1.raw_poly(n - 1).scale(&f0.tau(n + 1));
            Ok(lhs - rhs)
        }
        LatticeId::BToda3d => {
            let f00 = fam(k, l)?;
            let f10 = fam(k + 1, l)?;
            let f01 = fam(k, l + 1)?;
            let f11 = fam(k + 1, l + 1)?;
            let lhs = f00.raw_poly(n).scale(&f11.tau(n)) - f10.raw_poly(n).scale(&f01.tau(n));
            let rhs = zp1
                * (f11.raw_poly(n - 1).scale(&f00.tau(n + 1))
                    - f01.raw_poly(n - 1).scale(&f10.tau(n + 1)));
            Ok(lhs - rhs)
        }
        LatticeId::BToda2d => {
            let f0 = fam(k, 0)?;
            let f1 = fam(k + 1, 0)?;
            let f2 = fam(k + 2, 0)?;
            let lhs = f0.raw_poly(n).scale(&f2.tau(n)) - f1.raw_poly(n).scale(&f1.tau(n));
            let rhs = zp1
                * (f2.raw_poly(n - 1).scale(&f0.tau(n + 1))
                    - f1.raw_poly(n - 1).scale(&f1.tau(n + 1)));
            Ok(lhs - rhs)
        }
    }
}

/// The lemma relations tying shifted tau cells to `c0`-augmented Pfaffians
/// for the fully discrete gLV lattice; returns the six residuals at `n`.
pub fn glv3d_lemma_residuals<S: MomentScalar>(
    sys: &MomentSystem<S>,
    n: i64,
    k: i64,
    l: i64,
) -> Result<Vec<S>>
where
    S::Base: PartialOrd,
{
    let base = MomentOracle::with_c0(sys, k, l, C0Row::AltEven);
    let mut out = Vec::new();
    // tau_{2n}^{k+1,l} = Pf(1..2n)^{k,l}
    let t = tau_from_oracle(&MomentOracle::new(sys, k + 1, l), 2 * n)?;
    out.push(t - pf_indexed(&base, &int_range(1, 2 * n + 1))?);
    // tau_{2n+1}^{k+1,l} = Pf(d0,1..2n+1)^{k,l}
    let t = tau_from_oracle(&MomentOracle::new(sys, k + 1, l), 2 * n + 1)?;
    let mut idx = vec![ExtIndex::D0];
    idx.extend(int_range(1, 2 * n + 2));
    out.push(t - pf_indexed(&base, &idx)?);
    // tau_{2n}^{k,l+1} = Pf(c0,0..2n)^{k,l}
    let t = tau_from_oracle(&MomentOracle::new(sys, k, l + 1), 2 * n)?;
    let mut idx = vec![ExtIndex::C0];
    idx.extend(int_range(0, 2 * n + 1));
    out.push(t - pf_indexed(&base, &idx)?);
    // tau_{2n+1}^{k,l+1} = Pf(d0,c0,0..2n+1)^{k,l}
    let t = tau_from_oracle(&MomentOracle::new(sys, k, l + 1), 2 * n + 1)?;
    let mut idx = vec![ExtIndex::D0, ExtIndex::C0];
    idx.extend(int_range(0, 2 * n + 2));
    out.push(t - pf_indexed(&base, &idx)?);
    // tau_{2n}^{k+1,l+1} = -Pf(c0,1..2n+1)^{k,l}
    let t = tau_from_oracle(&MomentOracle::new(sys, k + 1, l + 1), 2 * n)?;
    let mut idx = vec![ExtIndex::C0];
    idx.extend(int_range(1, 2 * n + 2));
    out.push(t + pf_indexed(&base, &idx)?);
    // tau_{2n+1}^{k+1,l+1} = -Pf(d0,c0,1..2n+2)^{k,l}
    let t = tau_from_oracle(&MomentOracle::new(sys, k + 1, l + 1), 2 * n + 1)?;
    let mut idx = vec![ExtIndex::D0, ExtIndex::C0];
    idx.extend(int_range(1, 2 * n + 3));
    out.push(t + pf_indexed(&base, &idx)?);
    Ok(out)
}

// -------------------------------------------------------------------------
// Discrete-time stepping by bilinear corner filling.
// -------------------------------------------------------------------------

/// Advance the 2D B-Toda tau table one step in `k`: from the columns at
/// `k` and `k+1`, produce the column at `k+2` via the bilinear recurrence
/// (solved for `tau_n^{k+2}`, induction in `n` from `tau_0 = 1`).
pub fn btoda2d_step<S: Field>(t: &TauTable<S>, k: i64, n_max: i64) -> Result<Vec<S>> {
    let mut next: Vec<S> = vec![S::one()];
    for n in 1..=n_max {
        let prev = next[(n - 1) as usize].clone();
        let num = t.get(n, k + 1, 0)?.clone() * t.get(n, k + 1, 0)?
            + t.get(n + 1, k, 0)? * prev
            - t.get(n + 1, k + 1, 0)? * t.get(n - 1, k + 1, 0)?;
        let den = t.get(n, k, 0)?;
        next.push(
            num.try_div(&den)
                .ok_or_else(|| Error::DegenerateSite(format!("(n,k)=({n},{k})")))?,
        );
    }
    Ok(next)
}

/// Fill the `(k+1, l+1)` corner of a 3D table from its three neighbours
/// via the lattice's bilinear equation. Returns `tau_n^{k+1,l+1}` for
/// `n = 0..=n_max`.
pub fn discrete_corner_step<S: Field>(
    id: LatticeId,
    t: &TauTable<S>,
    k: i64,
    l: i64,
    n_max: i64,
) -> Result<Vec<S>> {
    let mut corner: Vec<S> = vec![S::one()];
    for n in 1..=n_max {
        let prev = corner[(n - 1) as usize].clone();
        let value = match id {
            LatticeId::Glv3d => {
                // Bilinear form at site n solved for tau_n^{k+1,l+1}, with
                // the corner value at n-1 feeding the induction.
                let num = t.get(n + 2, k, l)? * prev
                    - t.get(n, k, l + 1)? * t.get(n + 1, k + 1, l)?
                    + t.get(n, k + 1, l)? * t.get(n + 1, k, l + 1)?;
                num.try_div(&t.get(n + 1, k, l)?)
            }
            LatticeId::BToda3d => {
                let num = t.get(n, k, l + 1)? * t.get(n, k + 1, l)?
                    + prev * t.get(n + 1, k, l)?
                    - t.get(n + 1, k + 1, l)? * t.get(n - 1, k, l + 1)?;
                num.try_div(&t.get(n, k, l)?)
            }
            _ => return Err(Error::Config(format!("{} is not a 3D discrete system", id.name()))),
        };
        corner.push(value.ok_or_else(|| Error::DegenerateSite(format!("(n,k,l)=({n},{k},{l})")))?);
    }
    Ok(corner)
}

// -------------------------------------------------------------------------
// Semi-discrete evolution.
// -------------------------------------------------------------------------

/// State of the 1+1 B-Toda flow, indices `0..=n_max` with `u[0]=b[0]=0`.
/// `b_tail` closes the system above: it stands for `b_{n_max+1}` and stays
/// frozen (exactly right when the measure has `n_max` nodes, since then
/// `u_{n_max} = 0` and `b_{n_max}` is constant).
#[derive(Clone, Debug)]
pub struct BToda11State {
    pub u: Vec<f64>,
    pub b: Vec<f64>,
    pub b_tail: f64,
}

impl BToda11State {
    pub fn n_max(&self) -> usize {
        self.u.len() - 1
    }

    fn rhs(&self) -> (Vec<f64>, Vec<f64>) {
        let n = self.n_max();
        let mut du = vec![0.0; n + 1];
        let mut db = vec![0.0; n + 1];
        let b_at = |m: usize| -> f64 {
            if m <= n {
                self.b[m]
            } else {
                self.b_tail
            }
        };
        for m in 1..=n {
            du[m] = self.u[m] * (b_at(m + 1) - 2.0 * self.b[m] + self.b[m - 1]);
            db[m] = self.u[m] * (self.b[m - 1] - b_at(m + 1));
        }
        (du, db)
    }
}

/// Classical fourth-order Runge-Kutta on the 1+1 B-Toda system.
pub fn evolve_btoda11(
    state0: &BToda11State,
    dt: f64,
    steps: usize,
) -> Result<Vec<BToda11State>> {
    let n = state0.n_max();
    let mut out = Vec::with_capacity(steps + 1);
    out.push(state0.clone());
    let mut s = state0.clone();
    for step in 0..steps {
        let add = |s: &BToda11State, d: &(Vec<f64>, Vec<f64>), h: f64| -> BToda11State {
            BToda11State {
                u: s.u.iter().zip(&d.0).map(|(a, b)| a + h * b).collect(),
                b: s.b.iter().zip(&d.1).map(|(a, b)| a + h * b).collect(),
                b_tail: s.b_tail,
            }
        };
        let k1 = s.rhs();
        let k2 = add(&s, &k1, dt / 2.0).rhs();
        let k3 = add(&s, &k2, dt / 2.0).rhs();
        let k4 = add(&s, &k3, dt).rhs();
        for m in 0..=n {
            s.u[m] += dt / 6.0 * (k1.0[m] + 2.0 * k2.0[m] + 2.0 * k3.0[m] + k4.0[m]);
            s.b[m] += dt / 6.0 * (k1.1[m] + 2.0 * k2.1[m] + 2.0 * k3.1[m] + k4.1[m]);
        }
        if s.u.iter().chain(&s.b).any(|v| !v.is_finite()) {
            return Err(Error::BlowUp(step));
        }
        out.push(s.clone());
    }
    Ok(out)
}

/// Initial (or oracle) state of the 1+1 B-Toda flow from a float measure:
/// `u_n`, `b_n` from order-2 jet taus. Taus whose ratio falls below `tol`
/// are treated as vanished (finite-support truncation), closing the tail.
pub fn btoda11_state_from_measure(
    measure: &DiscreteMeasure<f64>,
    n_max: usize,
    tol: f64,
) -> Result<BToda11State> {
    let sys = btoda1p1_system(measure.clone())?;
    let oracle = MomentOracle::new(&sys, 0, 0);
    // tau_n vanishes identically once n exceeds the node count (the
    // de Bruijn sum is empty), so those cells are zeroed structurally
    // rather than computed through roundoff.
    let support = measure.len() as i64;
    let mut taus: Vec<Jet2<f64>> = Vec::with_capacity(n_max + 3);
    for n in 0..=(n_max as i64 + 2) {
        if n > support {
            taus.push(<Jet2<f64> as Ring>::zero());
        } else {
            taus.push(tau_from_oracle(&oracle, n)?);
        }
    }
    let mut u = vec![0.0; n_max + 1];
    let mut b = vec![0.0; n_max + 1];
    for m in 1..=n_max {
        let t0 = taus[m].c[0];
        if t0.abs() < tol {
            return Err(Error::DegenerateTau { n: m as i64, k: 0, l: 0 });
        }
        let un = taus[m + 1].c[0] * taus[m - 1].c[0] / (t0 * t0);
        u[m] = if un.abs() < tol { 0.0 } else { un };
        b[m] = taus[m].c[1] / t0;
    }
    let b_tail = if u[n_max] == 0.0 || taus[n_max + 1].c[0].abs() < tol {
        0.0
    } else {
        taus[n_max + 1].c[1] / taus[n_max + 1].c[0]
    };
    Ok(BToda11State { u, b, b_tail })
}

/// Linear moment flow `d mu_{i,j}/dt = mu_{i+1,j} + mu_{i,j+1}`,
/// `d beta_i/dt = beta_{i+1}` on a square table with a frozen tail band,
/// integrated by RK4. Drives the semi-discrete systems whose nonlinear
/// field equations are not closed on a finite grid (1+2 gLV, 2+1 and 1+2
/// B-Toda): the fields are re-extracted from the evolved tables.
#[derive(Clone, Debug)]
pub struct MomentFlowState {
    /// `mu[i][j]`, antisymmetric, size `(i_cap+2)^2`; the band at index
    /// `i_cap+1` is frozen.
    pub mu: Vec<Vec<f64>>,
    pub beta: Vec<f64>,
    pub i_cap: usize,
}

impl MomentFlowState {
    pub fn from_measure<SB: MomentScalar<Base = f64>>(
        sys: &MomentSystem<SB>,
        i_cap: usize,
    ) -> Self {
        let n = i_cap + 2;
        let mut mu = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..n {
                mu[i][j] = sys.mu(i as i64, j as i64, 0, 0).order0();
            }
        }
        let beta = (0..n).map(|i| sys.beta(i as i64, 0, 0).order0()).collect();
        MomentFlowState { mu, beta, i_cap }
    }

    fn rhs(&self) -> (Vec<Vec<f64>>, Vec<f64>) {
        let n = self.i_cap + 2;
        let mut dmu = vec![vec![0.0; n]; n];
        let mut dbeta = vec![0.0; n];
        for i in 0..=self.i_cap {
            for j in 0..=self.i_cap {
                dmu[i][j] = self.mu[i + 1][j] + self.mu[i][j + 1];
            }
            dbeta[i] = self.beta[i + 1];
        }
        (dmu, dbeta)
    }
}

/// RK4 on the truncated moment flow.
pub fn evolve_moment_flow(
    state0: &MomentFlowState,
    dt: f64,
    steps: usize,
) -> Result<Vec<MomentFlowState>> {
    let mut out = Vec::with_capacity(steps + 1);
    out.push(state0.clone());
    let mut s = state0.clone();
    let n = state0.i_cap + 2;
    for step in 0..steps {
        let add = |s: &MomentFlowState, d: &(Vec<Vec<f64>>, Vec<f64>), h: f64| -> MomentFlowState {
            let mut t = s.clone();
            for i in 0..n {
                for j in 0..n {
                    t.mu[i][j] += h * d.0[i][j];
                }
                t.beta[i] += h * d.1[i];
            }
            t
        };
        let k1 = s.rhs();
        let k2 = add(&s, &k1, dt / 2.0).rhs();
        let k3 = add(&s, &k2, dt / 2.0).rhs();
        let k4 = add(&s, &k3, dt).rhs();
        for i in 0..n {
            for j in 0..n {
                s.mu[i][j] +=
                    dt / 6.0 * (k1.0[i][j] + 2.0 * k2.0[i][j] + 2.0 * k3.0[i][j] + k4.0[i][j]);
            }
            s.beta[i] += dt / 6.0 * (k1.1[i] + 2.0 * k2.1[i] + 2.0 * k3.1[i] + k4.1[i]);
        }
        if s.beta.iter().any(|v| !v.is_finite()) {
            return Err(Error::BlowUp(step));
        }
        out.push(s.clone());
    }
    Ok(out)
}

/// Entry oracle over an evolved moment table, with the `(k, l)` shifts of
/// the given binding applied by index arithmetic.
pub struct TableMomentOracle<'a> {
    pub state: &'a MomentFlowState,
    pub binding: Binding,
    pub k: i64,
    /// `q` polynomial for the `d1` row of the 2+1 system.
    pub q: Option<Poly<f64>>,
}

impl<'a> TableMomentOracle<'a> {
    fn mu_at(&self, i: i64, j: i64) -> f64 {
        let get = |i: i64, j: i64| -> f64 {
            if i < 0 || j < 0 {
                return 0.0;
            }
            let cap = self.state.i_cap as i64 + 1;
            if i > cap || j > cap {
                return 0.0;
            }
            self.state.mu[i as usize][j as usize]
        };
        match self.binding {
            Binding::PowerExpT => get(i + self.k, j + self.k),
            Binding::ShiftExpT => {
                let mut acc = 0.0;
                for r in 0..=self.k {
                    for s in 0..=self.k {
                        let c = (crate::scalar::binomial(self.k, r)
                            * crate::scalar::binomial(self.k, s)) as f64;
                        acc += c * get(i + r, j + s);
                    }
                }
                acc
            }
            _ => get(i, j),
        }
    }

    fn beta_at(&self, i: i64) -> f64 {
        let get = |i: i64| -> f64 {
            if i < 0 || i > self.state.i_cap as i64 + 1 {
                return 0.0;
            }
            self.state.beta[i as usize]
        };
        match self.binding {
            Binding::PowerExpT => get(i + self.k),
            Binding::ShiftExpT => {
                (0..=self.k).map(|r| crate::scalar::binomial(self.k, r) as f64 * get(i + r)).sum()
            }
            _ => get(i),
        }
    }

    fn d1_at(&self, i: i64) -> f64 {
        match &self.q {
            Some(q) => q.c.iter().enumerate().map(|(c, qc)| qc * self.beta_at(i + c as i64)).sum(),
            None => self.beta_at(i + 1),
        }
    }
}

impl<'a> EntryOracle<f64> for TableMomentOracle<'a> {
    fn entry(&self, a: &ExtIndex, b: &ExtIndex) -> f64 {
        use ExtIndex::*;
        match (a, b) {
            (Int(i), Int(j)) => self.mu_at(*i, *j),
            (D0, Int(i)) => self.beta_at(*i),
            (Int(i), D0) => -self.beta_at(*i),
            (D1, Int(i)) => self.d1_at(*i),
            (Int(i), D1) => -self.d1_at(*i),
            _ => 0.0,
        }
    }
}

/// tau over an evolved moment table.
pub fn table_tau(oracle: &TableMomentOracle<'_>, n: i64) -> Result<f64> {
    if n < 0 {
        return Ok(0.0);
    }
    if n == 0 {
        return Ok(1.0);
    }
    if n % 2 == 0 {
        pf_indexed(oracle, &int_range(0, n))
    } else {
        let mut idx = vec![ExtIndex::D0];
        idx.extend(int_range(0, n));
        pf_indexed(oracle, &idx)
    }
}
