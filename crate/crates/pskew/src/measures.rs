//! Measures, skew kernels, deformation bindings and moment systems.
//!
//! A [`MomentSystem`] realises one family of bimoments
//! `mu_{i,j}^{k,l} = sum x^i y^j omega(x,y) (deformation) w(x) w(y)` and
//! single moments `beta_i^{k,l}` over a discrete measure. Continuous
//! weights are handled by discretising through a Gauss rule first, so a
//! single code path serves both the exact-rational and the float backend.
//!
//! Algebraic identities are verified on discrete rational measures: every
//! bilinear identity in this crate is polynomial in the moments, so
//! exactness on discrete data is full verification; integrals are only the
//! paper-side device.

use std::collections::HashMap;
use std::sync::Mutex;

use crate::error::{Error, Result};
use crate::jet::MomentScalar;
use crate::pfaffian::{int_range, pf, pf_indexed, EntryOracle, ExtIndex, SkewMatrix};
use crate::poly::Poly;
use crate::scalar::{pow_field, Field, Rat, Ring};

/// Skew-symmetric integral kernel `omega(x, y) = -omega(y, x)`.
#[derive(Clone, Debug)]
pub enum Kernel<B> {
    /// `sgn(x - y)`; discrete measures only.
    Sgn,
    /// `(x - y) / (x + y)` (Bures).
    Bures,
    /// `(x - y) / (x y + x + y)`.
    Shifted,
    /// `(q(x) - q(y)) / (q(x) + q(y))` for a polynomial `q`, positive and
    /// increasing on the support.
    QRatio(Poly<B>),
    /// Explicit antisymmetric table over node indices.
    Generic(Vec<Vec<B>>),
}

impl<B: Field + PartialOrd> Kernel<B> {
    /// Default deformation-distinguishing polynomial `q(x) = x^2`.
    pub fn default_qratio() -> Self {
        Kernel::QRatio(Poly::monomial(B::one(), 2))
    }

    /// The auxiliary function `q` tied to this kernel (`x` unless QRatio).
    pub fn q_value(&self, x: &B) -> B {
        match self {
            Kernel::QRatio(q) => q.eval(x),
            _ => x.clone(),
        }
    }

    /// Kernel value on two nodes (by index for the table case).
    fn omega(&self, ia: usize, ib: usize, x: &B, y: &B) -> Result<B> {
        match self {
            Kernel::Sgn => Ok(if x > y {
                B::one()
            } else if y > x {
                -B::one()
            } else {
                B::zero()
            }),
            Kernel::Bures => {
                let den = x.clone() + y.clone();
                (x.clone() - y.clone())
                    .try_div(&den)
                    .ok_or_else(|| Error::DegenerateSite(format!("x + y = 0 at nodes {ia},{ib}")))
            }
            Kernel::Shifted => {
                let den = x.clone() * y.clone() + x.clone() + y.clone();
                (x.clone() - y.clone())
                    .try_div(&den)
                    .ok_or_else(|| Error::DegenerateSite(format!("xy+x+y = 0 at nodes {ia},{ib}")))
            }
            Kernel::QRatio(q) => {
                let qx = q.eval(x);
                let qy = q.eval(y);
                let den = qx.clone() + qy.clone();
                (qx - qy)
                    .try_div(&den)
                    .ok_or_else(|| Error::DegenerateSite(format!("q(x)+q(y) = 0 at nodes {ia},{ib}")))
            }
            Kernel::Generic(t) => Ok(t[ia][ib].clone()),
        }
    }
}

/// Discrete measure with strictly increasing nodes and positive weights.
#[derive(Clone, Debug)]
pub struct DiscreteMeasure<B> {
    pub nodes: Vec<B>,
    pub weights: Vec<B>,
}

impl<B: Field + PartialOrd> DiscreteMeasure<B> {
    pub fn new(nodes: Vec<B>, weights: Vec<B>) -> Result<Self> {
        if nodes.len() != weights.len() {
            return Err(Error::Config("nodes and weights must have equal length".into()));
        }
        for w in nodes.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::Config("nodes must be strictly increasing".into()));
            }
        }
        Ok(DiscreteMeasure { nodes, weights })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Continuous weights handled through Gauss quadrature.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ContinuousWeight {
    /// `x^alpha e^{-x}` on `(0, inf)`.
    Laguerre { alpha: f64 },
    /// `e^{-x^2}` on the real line.
    GaussianLine,
}

#[derive(Clone, Copy, Debug)]
pub struct ContinuousMeasure {
    pub weight: ContinuousWeight,
    /// Gauss rule order per axis.
    pub order: usize,
}

impl ContinuousMeasure {
    pub fn new(weight: ContinuousWeight, order: usize) -> Self {
        ContinuousMeasure { weight, order }
    }

    /// Discretise through the matching Gauss rule.
    pub fn discretize(&self) -> DiscreteMeasure<f64> {
        self.discretize_shifted(0.0).expect("t = 0 is always integrable")
    }

    /// Discretise with the factor `e^{t x}` absorbed into the weights.
    ///
    /// For the Laguerre weight the true integral diverges once `t >= 1`.
    pub fn discretize_shifted(&self, t: f64) -> Result<DiscreteMeasure<f64>> {
        let rule = match self.weight {
            ContinuousWeight::Laguerre { alpha } => {
                if t >= 1.0 {
                    return Err(Error::DivergentMoment(format!(
                        "e^(tx) against the Laguerre weight needs t < 1, got t = {t}"
                    )));
                }
                crate::quadrature::gauss_laguerre(self.order, alpha)
            }
            ContinuousWeight::GaussianLine => crate::quadrature::gauss_hermite(self.order),
        };
        let weights = rule
            .nodes
            .iter()
            .zip(&rule.weights)
            .map(|(x, w)| w * (t * x).exp())
            .collect();
        DiscreteMeasure::new(rule.nodes, weights)
    }
}

/// Which deformation the `(k, l)` indices apply to the weight, and what the
/// `d1` character row means.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Binding {
    /// `x^{k+i} e^{tx}`; `l` unused. (Semi-discrete gLV.)
    PowerExpT,
    /// `x^{k+i} (1+x)^l`. (Full-discrete gLV.)
    PowerShift,
    /// `x^i e^{tx + s q(x)}`; `k, l` unused. (2+1 and 1+1 B-Toda.)
    ExpTQExpS,
    /// `x^i (1+x)^k e^{tx}`; `l` unused. (1+2 B-Toda.)
    ShiftExpT,
    /// `x^i (1+x)^{k+l}`. (3D discrete B-Toda.)
    ShiftKL,
    /// `x^i (1+x)^k`; `l` unused. (2D discrete B-Toda.)
    ShiftK,
    /// `x^{k+i} (1-x)^l`, with the double-integral `beta`. (Acceleration.)
    AccelKL,
}

impl Binding {
    fn uses_one_minus_x(&self) -> bool {
        matches!(self, Binding::AccelKL)
    }

    fn node_power_can_go_negative(&self) -> bool {
        // AccelKL divides by (1 - x); the power of x itself stays >= 0
        // for all bindings here (the Pade family uses its own extractor).
        false
    }
}

/// One realised moment family.
pub struct MomentSystem<S: MomentScalar> {
    pub measure: DiscreteMeasure<S::Base>,
    pub kernel: Kernel<S::Base>,
    pub binding: Binding,
    omega: Vec<Vec<S::Base>>,
    /// Scale of the shift deformation: the `(1+x)` factors become
    /// `(1 + shift_scale * x)`. Default 1; used by continuum-limit checks.
    shift_scale: S::Base,
    /// Per-node jet factor `exp(e_t x) exp(e_s q(x))`, truncated by `S`.
    jet_factor: Vec<S>,
    mu_cache: Mutex<HashMap<(i64, i64, i64, i64), S>>,
    beta_cache: Mutex<HashMap<(i64, i64, i64), S>>,
}

impl<S: MomentScalar> MomentSystem<S>
where
    S::Base: PartialOrd,
{
    pub fn new(
        measure: DiscreteMeasure<S::Base>,
        kernel: Kernel<S::Base>,
        binding: Binding,
    ) -> Result<Self> {
        if binding.uses_one_minus_x() {
            for x in &measure.nodes {
                if *x == S::Base::one() {
                    return Err(Error::Config(
                        "acceleration binding divides by (1 - x); node 1 not allowed".into(),
                    ));
                }
            }
        }
        if binding.node_power_can_go_negative() {
            for x in &measure.nodes {
                if x.is_zero() {
                    return Err(Error::Config("node 0 with negative powers".into()));
                }
            }
        }
        let n = measure.len();
        let mut omega = vec![vec![S::Base::zero(); n]; n];
        for a in 0..n {
            for b in 0..n {
                if a != b {
                    omega[a][b] =
                        kernel.omega(a, b, &measure.nodes[a], &measure.nodes[b])?;
                }
            }
        }
        let jet_factor = measure
            .nodes
            .iter()
            .map(|x| {
                let q = kernel.q_value(x);
                S::t_factor(x) * S::s_factor(&q)
            })
            .collect();
        Ok(MomentSystem {
            measure,
            kernel,
            binding,
            omega,
            shift_scale: S::Base::one(),
            jet_factor,
            mu_cache: Mutex::new(HashMap::new()),
            beta_cache: Mutex::new(HashMap::new()),
        })
    }

    /// Replace the shift-deformation scale (continuum-limit studies).
    pub fn with_shift_scale(mut self, scale: S::Base) -> Self {
        self.shift_scale = scale;
        self.mu_cache = Mutex::new(HashMap::new());
        self.beta_cache = Mutex::new(HashMap::new());
        self
    }

    pub fn node_count(&self) -> usize {
        self.measure.len()
    }

    /// Truncated jet factor `exp(e_t x_a) exp(e_s q(x_a))` of node `a`.
    pub fn jet_node_factor(&self, a: usize) -> S {
        self.jet_factor[a].clone()
    }

    /// Deformed power of node `a`: `x^i` times the binding's `(k,l)` factor.
    fn deform(&self, a: usize, i: i64, k: i64, l: i64) -> S::Base {
        let x = &self.measure.nodes[a];
        let one_plus = S::Base::one() + self.shift_scale.clone() * x.clone();
        let one_minus = S::Base::one() - x.clone();
        let p = |base: &S::Base, e: i64| -> S::Base {
            pow_field(base, e).expect("deformation power must exist; nodes validated")
        };
        match self.binding {
            Binding::PowerExpT => p(x, i + k),
            Binding::PowerShift => p(x, i + k) * p(&one_plus, l),
            Binding::ExpTQExpS => p(x, i),
            Binding::ShiftExpT => p(x, i) * p(&one_plus, k),
            Binding::ShiftKL => p(x, i) * p(&one_plus, k + l),
            Binding::ShiftK => p(x, i) * p(&one_plus, k),
            Binding::AccelKL => p(x, i + k) * p(&one_minus, l),
        }
    }

    /// Bimoment `mu_{i,j}^{k,l}`.
    pub fn mu(&self, i: i64, j: i64, k: i64, l: i64) -> S {
        if let Some(v) = self.mu_cache.lock().unwrap().get(&(i, j, k, l)) {
            return v.clone();
        }
        let n = self.node_count();
        let mut acc = S::zero();
        for a in 0..n {
            for b in (a + 1)..n {
                let cross = self.deform(a, i, k, l) * self.deform(b, j, k, l)
                    - self.deform(a, j, k, l) * self.deform(b, i, k, l);
                let base = self.omega[a][b].clone()
                    * cross
                    * self.measure.weights[a].clone()
                    * self.measure.weights[b].clone();
                acc = acc
                    + S::from_base(&base) * self.jet_factor[a].clone() * self.jet_factor[b].clone();
            }
        }
        self.mu_cache.lock().unwrap().insert((i, j, k, l), acc.clone());
        acc
    }

    /// Single moment `beta_i^{k,l}`.
    ///
    /// For the acceleration binding this is the double integral
    /// `-sum x^k y^{k+i} omega (1-x)^{l-1} (1-y)^l w w`, which satisfies the
    /// shift laws `beta_i^{k+1,l} = beta_{i+1}^{k,l} + mu_{0,i+1}^{k,l}` and
    /// `beta_i^{k,l+1} = mu_{0,i+1}^{k,l} - mu_{0,i}^{k,l}` exactly.
    pub fn beta(&self, i: i64, k: i64, l: i64) -> S {
        if let Some(v) = self.beta_cache.lock().unwrap().get(&(i, k, l)) {
            return v.clone();
        }
        let n = self.node_count();
        let acc = if self.binding == Binding::AccelKL {
            let mut acc = S::zero();
            for a in 0..n {
                for b in 0..n {
                    if a == b {
                        continue;
                    }
                    let xa = &self.measure.nodes[a];
                    let xb = &self.measure.nodes[b];
                    let fa = pow_field(xa, k).unwrap()
                        * pow_field(&(S::Base::one() - xa.clone()), l - 1).unwrap();
                    let fb = pow_field(xb, k + i).unwrap()
                        * pow_field(&(S::Base::one() - xb.clone()), l).unwrap();
                    let base = self.omega[a][b].clone()
                        * fa
                        * fb
                        * self.measure.weights[a].clone()
                        * self.measure.weights[b].clone();
                    acc = acc - S::from_base(&base);
                }
            }
            acc
        } else {
            let mut acc = S::zero();
            for a in 0..n {
                let base = self.deform(a, i, k, l) * self.measure.weights[a].clone();
                acc = acc + S::from_base(&base) * self.jet_factor[a].clone();
            }
            acc
        };
        self.beta_cache.lock().unwrap().insert((i, k, l), acc.clone());
        acc
    }

    /// The `d1` character row.
    ///
    /// `ExpTQExpS` carries `d1 = d beta / ds`, a `q`-weighted moment; the
    /// shift bindings carry `d1(i) = beta(i+1)`.
    pub fn d1_row(&self, i: i64, k: i64, l: i64) -> S {
        match self.binding {
            Binding::ExpTQExpS => {
                let n = self.node_count();
                let mut acc = S::zero();
                for a in 0..n {
                    let q = self.kernel.q_value(&self.measure.nodes[a]);
                    let base =
                        self.deform(a, i, k, l) * q * self.measure.weights[a].clone();
                    acc = acc + S::from_base(&base) * self.jet_factor[a].clone();
                }
                acc
            }
            _ => self.beta(i + 1, k, l),
        }
    }
}

/// Sign convention of the `c0` row, which differs between lattice families.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum C0Row {
    /// `Pf(c0, i) = (-1)^i` (discrete gLV, discrete B-Toda).
    AltEven,
    /// `Pf(c0, i) = (-1)^{i-1}` (Pade reciprocal family).
    AltOdd,
    /// `Pf(c0, i) = 1` (acceleration lattice).
    Ones,
}

impl C0Row {
    pub fn value<S: Ring>(&self, i: i64) -> S {
        let flip = match self {
            C0Row::AltEven => i.rem_euclid(2) == 1,
            C0Row::AltOdd => i.rem_euclid(2) == 0,
            C0Row::Ones => false,
        };
        if flip {
            -S::one()
        } else {
            S::one()
        }
    }
}

/// Entry oracle over a moment system at fixed deformation indices `(k, l)`.
pub struct MomentOracle<'a, S: MomentScalar>
where
    S::Base: PartialOrd,
{
    pub sys: &'a MomentSystem<S>,
    pub k: i64,
    pub l: i64,
    pub c0: C0Row,
}

impl<'a, S: MomentScalar> MomentOracle<'a, S>
where
    S::Base: PartialOrd,
{
    pub fn new(sys: &'a MomentSystem<S>, k: i64, l: i64) -> Self {
        MomentOracle { sys, k, l, c0: C0Row::AltEven }
    }

    pub fn with_c0(sys: &'a MomentSystem<S>, k: i64, l: i64, c0: C0Row) -> Self {
        MomentOracle { sys, k, l, c0 }
    }
}

impl<'a, S: MomentScalar> EntryOracle<S> for MomentOracle<'a, S>
where
    S::Base: PartialOrd,
{
    fn entry(&self, a: &ExtIndex, b: &ExtIndex) -> S {
        use ExtIndex::*;
        match (a, b) {
            (Int(i), Int(j)) => self.sys.mu(*i, *j, self.k, self.l),
            (D0, Int(i)) => self.sys.beta(*i, self.k, self.l),
            (Int(i), D0) => -self.sys.beta(*i, self.k, self.l),
            (D1, Int(i)) => self.sys.d1_row(*i, self.k, self.l),
            (Int(i), D1) => -self.sys.d1_row(*i, self.k, self.l),
            (C0, Int(i)) => self.c0.value(*i),
            (Int(i), C0) => -self.c0.value::<S>(*i),
            _ => S::zero(),
        }
    }
}

/// tau_{2n} = Pf(0..2n-1), tau_{2n+1} = Pf(d0, 0..2n) over the oracle.
pub fn tau_from_oracle<S: MomentScalar>(oracle: &MomentOracle<'_, S>, n: i64) -> Result<S>
where
    S::Base: PartialOrd,
{
    if n < 0 {
        return Ok(S::zero());
    }
    if n == 0 {
        return Ok(S::one());
    }
    if n % 2 == 0 {
        pf_indexed(oracle, &int_range(0, n))
    } else {
        let mut idx = vec![ExtIndex::D0];
        idx.extend(int_range(0, n));
        pf_indexed(oracle, &idx)
    }
}

fn combinations(n: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if r > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..r).collect();
    loop {
        out.push(idx.clone());
        // Advance the lexicographically next combination.
        let mut i = r;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] != i + n - r {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        idx[i] += 1;
        for j in (i + 1)..r {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

fn vandermonde<B: Field>(xs: &[B]) -> B {
    let mut acc = B::one();
    for i in 0..xs.len() {
        for j in (i + 1)..xs.len() {
            acc = acc * (xs[j].clone() - xs[i].clone());
        }
    }
    acc
}

/// Per-node factor `w * g(x; k, l)` with the binding's deformation but the
/// monomial part stripped (the monomials live in the Vandermonde block).
fn node_factor<S: MomentScalar>(sys: &MomentSystem<S>, a: usize, k: i64, l: i64) -> S
where
    S::Base: PartialOrd,
{
    let base = sys.deform(a, 0, k, l) * sys.measure.weights[a].clone();
    S::from_base(&base) * sys.jet_factor[a].clone()
}

/// Brute-force de Bruijn oracle, even case: the ordered-tuple sum
/// `sum Pf(W) * Vandermonde * prod(w g)` over increasing `2n`-tuples.
/// Equals `Pf(0..2n-1)` at the same `(k, l)`.
pub fn debruijn_even<S: MomentScalar>(sys: &MomentSystem<S>, n: usize, k: i64, l: i64) -> Result<S>
where
    S::Base: PartialOrd,
{
    let mut acc = S::zero();
    for tuple in combinations(sys.node_count(), 2 * n) {
        let xs: Vec<S::Base> = tuple.iter().map(|&a| sys.measure.nodes[a].clone()).collect();
        let mut up = Vec::new();
        for i in 0..tuple.len() {
            for j in (i + 1)..tuple.len() {
                up.push(sys.omega[tuple[i]][tuple[j]].clone());
            }
        }
        let w = SkewMatrix::from_upper(tuple.len(), &up)?;
        let pfw = pf(&w)?;
        let mut term = S::from_base(&(pfw * vandermonde(&xs)));
        for &a in &tuple {
            term = term * node_factor(sys, a, k, l);
        }
        acc = acc + term;
    }
    Ok(acc)
}

/// Odd case: `(2n+1)`-tuples with the ones-bordered `W`. Equals
/// `Pf(d0, 0..2n)`.
pub fn debruijn_odd<S: MomentScalar>(sys: &MomentSystem<S>, n: usize, k: i64, l: i64) -> Result<S>
where
    S::Base: PartialOrd,
{
    let mut acc = S::zero();
    for tuple in combinations(sys.node_count(), 2 * n + 1) {
        let m = tuple.len();
        let xs: Vec<S::Base> = tuple.iter().map(|&a| sys.measure.nodes[a].clone()).collect();
        // Bordered matrix of order m+1: row 0 is the ones border, the rest
        // is the omega block. Upper triangle, row-major.
        let mut upper = vec![S::Base::one(); m];
        for i in 0..m {
            for j in (i + 1)..m {
                upper.push(sys.omega[tuple[i]][tuple[j]].clone());
            }
        }
        let w = SkewMatrix::from_upper(m + 1, &upper)?;
        let pfw = pf(&w)?;
        let mut term = S::from_base(&(pfw * vandermonde(&xs)));
        for &a in &tuple {
            term = term * node_factor(sys, a, k, l);
        }
        acc = acc + term;
    }
    Ok(acc)
}

/// Closed product forms of the multiple-integral tau formulas.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MultiIntegralStyle {
    /// `Pf(W) * Vandermonde` for a general kernel (gLV remarks).
    PfW,
    /// `(-1)^{floor(n/2)} prod (x_j - x_i)^2 / (x_i + x_j)` (Bures).
    BuresSquared,
    /// `prod (q_i - q_j)(x_j - x_i) / (q_i + q_j)` (2+1 B-Toda).
    QRatioProduct,
    /// `(-1)^{floor(n/2)} prod (x_j - x_i)^2 / (x_i x_j + x_i + x_j)`.
    ShiftedSquared,
}

/// Ordered-tuple evaluation of the multiple-integral tau formula; equals
/// the Pfaffian `tau_n^{k,l}`.
pub fn tau_multi_integral<S: MomentScalar>(
    sys: &MomentSystem<S>,
    style: MultiIntegralStyle,
    n: usize,
    k: i64,
    l: i64,
) -> Result<S>
where
    S::Base: PartialOrd,
{
    if n == 0 {
        return Ok(S::one());
    }
    match style {
        MultiIntegralStyle::PfW => {
            if n % 2 == 0 {
                debruijn_even(sys, n / 2, k, l)
            } else {
                debruijn_odd(sys, n / 2, k, l)
            }
        }
        _ => {
            let mut acc = S::zero();
            for tuple in combinations(sys.node_count(), n) {
                let xs: Vec<S::Base> =
                    tuple.iter().map(|&a| sys.measure.nodes[a].clone()).collect();
                let mut prod = S::Base::one();
                for i in 0..n {
                    for j in (i + 1)..n {
                        let (xi, xj) = (&xs[i], &xs[j]);
                        let num;
                        let den;
                        match style {
                            MultiIntegralStyle::BuresSquared => {
                                let d = xj.clone() - xi.clone();
                                num = d.clone() * d;
                                den = xi.clone() + xj.clone();
                            }
                            MultiIntegralStyle::ShiftedSquared => {
                                let d = xj.clone() - xi.clone();
                                num = d.clone() * d;
                                den = xi.clone() * xj.clone() + xi.clone() + xj.clone();
                            }
                            MultiIntegralStyle::QRatioProduct => {
                                let qi = sys.kernel.q_value(xi);
                                let qj = sys.kernel.q_value(xj);
                                num = (qi.clone() - qj.clone()) * (xj.clone() - xi.clone());
                                den = qi + qj;
                            }
                            MultiIntegralStyle::PfW => unreachable!(),
                        }
                        prod = prod
                            * num.try_div(&den).ok_or_else(|| {
                                Error::DegenerateSite("zero denominator in product form".into())
                            })?;
                    }
                }
                let mut term = S::from_base(&prod);
                for &a in &tuple {
                    term = term * node_factor(sys, a, k, l);
                }
                acc = acc + term;
            }
            let sign_flip = matches!(
                style,
                MultiIntegralStyle::BuresSquared | MultiIntegralStyle::ShiftedSquared
            ) && (n / 2) % 2 == 1;
            Ok(if sign_flip { -acc } else { acc })
        }
    }
}

/// Continuous-backend moment for the Bures kernel over the Laguerre
/// weight `e^{-x}` (alpha = 0), with the deformation `e^{t(x+y)}`.
///
/// Rotating to `u = x + y`, `v = (x - y)/(x + y)` turns the integrand into
/// `u^{i+j+1} (1+v)^i (1-v)^j v e^{-(1-t)u} / 2^{i+j+1}`, a polynomial in
/// both variables, so Gauss-Laguerre (in `w = (1-t)u`) times Gauss-Legendre
/// integrates it to machine precision.
pub fn bures_laguerre_moment(i: u32, j: u32, t: f64, order: usize) -> Result<f64> {
    if t >= 1.0 {
        return Err(Error::DivergentMoment(format!("needs t < 1, got {t}")));
    }
    let lag = crate::quadrature::gauss_laguerre(order, 0.0);
    let leg = crate::quadrature::gauss_legendre(order);
    let p = (i + j + 1) as i32;
    let scale = (1.0 - t).powi(-(p + 1));
    let u_int: f64 = lag
        .nodes
        .iter()
        .zip(&lag.weights)
        .map(|(w, wt)| w.powi(p) * wt)
        .sum::<f64>()
        * scale;
    let v_int: f64 = leg
        .nodes
        .iter()
        .zip(&leg.weights)
        .map(|(v, wt)| (1.0 + v).powi(i as i32) * (1.0 - v).powi(j as i32) * v * wt)
        .sum();
    Ok(u_int * v_int / 2f64.powi(p))
}

/// Third de Bruijn formula: the unordered integral of the paired
/// determinant equals `N! Pf(m)` with
/// `m_{ij} = int (phi_i psi_j - phi_j psi_i)`. Validated with
/// `phi_i = x^i`, `psi_i = x^{i} (1+x)` over the discrete measure.
pub fn debruijn_unordered_residual(measure: &DiscreteMeasure<Rat>, n: usize) -> Result<Rat> {
    let p = measure.len();
    let two_n = 2 * n;
    let phi = |i: usize, x: &Rat| -> Rat { pow_field(x, i as i64).unwrap() };
    let psi = |i: usize, x: &Rat| -> Rat {
        pow_field(x, i as i64).unwrap() * (Rat::one() + x.clone())
    };
    // Pairing matrix.
    let mut up = Vec::new();
    for i in 0..two_n {
        for j in (i + 1)..two_n {
            let mut acc = Rat::zero();
            for a in 0..p {
                let x = &measure.nodes[a];
                acc = acc
                    + (phi(i, x) * psi(j, x) - phi(j, x) * psi(i, x))
                        * measure.weights[a].clone();
            }
            up.push(acc);
        }
    }
    let m = SkewMatrix::from_upper(two_n, &up)?;
    let rhs = {
        let mut fact = Rat::one();
        for v in 1..=n {
            fact = fact * Rat::from_i64(v as i64);
        }
        fact * pf(&m)?
    };
    // Left side: sum over all n-tuples (with repeats; those vanish) of the
    // 2n x 2n determinant with column pairs (phi_i(x_j), psi_i(x_j)).
    let mut lhs = Rat::zero();
    let mut tuple = vec![0usize; n];
    loop {
        let mut cols: Vec<Vec<Rat>> = Vec::with_capacity(two_n);
        for &a in tuple.iter() {
            let x = &measure.nodes[a];
            cols.push((0..two_n).map(|i| phi(i, x)).collect());
            cols.push((0..two_n).map(|i| psi(i, x)).collect());
        }
        // det of the matrix whose (i, c) entry is cols[c][i].
        let rows: Vec<Vec<Rat>> =
            (0..two_n).map(|i| cols.iter().map(|c| c[i].clone()).collect()).collect();
        let mut term = crate::pfaffian::det(&rows);
        for &a in tuple.iter() {
            term = term * measure.weights[a].clone();
        }
        lhs = lhs + term;
        // Next tuple in the full product space.
        let mut pos = 0;
        loop {
            if pos == n {
                return Ok(lhs - rhs);
            }
            tuple[pos] += 1;
            if tuple[pos] < p {
                break;
            }
            tuple[pos] = 0;
            pos += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::{Jet1, Jet2};
    use crate::rng::SplitMix64;

    fn r(n: i64) -> Rat {
        Rat::from_i64(n)
    }

    fn unit_measure(ns: &[i64]) -> DiscreteMeasure<Rat> {
        DiscreteMeasure::new(ns.iter().map(|&v| r(v)).collect(), vec![Rat::one(); ns.len()])
            .unwrap()
    }

    #[test]
    fn bures_two_node_moment() {
        let sys: MomentSystem<Rat> =
            MomentSystem::new(unit_measure(&[1, 2]), Kernel::Bures, Binding::PowerExpT).unwrap();
        // mu_{0,1} = -2/3 + 1/3 = -1/3 by the direct 2x2 double sum.
        assert_eq!(sys.mu(0, 1, 0, 0), Rat::new((-1).into(), 3.into()));
        assert!(sys.mu(3, 3, 0, 0).is_zero());
        // beta_0 = 2, beta_1 = 3.
        assert_eq!(sys.beta(0, 0, 0), r(2));
        assert_eq!(sys.beta(1, 0, 0), r(3));
    }

    #[test]
    fn jet_moment_derivative_laws() {
        let sys: MomentSystem<Jet1<Rat>> =
            MomentSystem::new(unit_measure(&[1, 2]), Kernel::Bures, Binding::PowerExpT).unwrap();
        // d/dt mu_{i,j} = mu_{i+1,j} + mu_{i,j+1}; d/dt beta_i = beta_{i+1}.
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            let lhs = sys.mu(i, j, 0, 0).dt();
            let rhs = sys.mu(i + 1, j, 0, 0).order0() + sys.mu(i, j + 1, 0, 0).order0();
            assert_eq!(lhs, rhs);
        }
        assert_eq!(sys.beta(0, 0, 0).dt(), sys.beta(1, 0, 0).order0());
    }

    #[test]
    fn structural_shift_laws() {
        let mut rng = SplitMix64::new(77);
        let nodes = rng.nodes(5);
        let weights: Vec<Rat> = (0..5).map(|_| rng.pos_rat()).collect();
        let m = DiscreteMeasure::new(nodes, weights).unwrap();

        // gLV binding: mu^{k+1} = mu_{i+1,j+1}^k, beta^{k+1} = beta_{i+1}^k.
        let sys: MomentSystem<Rat> =
            MomentSystem::new(m.clone(), Kernel::Sgn, Binding::PowerExpT).unwrap();
        for k in 0..3 {
            for i in 0..4 {
                for j in 0..4 {
                    assert_eq!(sys.mu(i, j, k + 1, 0), sys.mu(i + 1, j + 1, k, 0));
                }
                assert_eq!(sys.beta(i, k + 1, 0), sys.beta(i + 1, k, 0));
            }
        }

        // Shift binding: mu^{k,l+1} = sum of four shifted entries.
        let sys: MomentSystem<Rat> =
            MomentSystem::new(m.clone(), Kernel::Bures, Binding::PowerShift).unwrap();
        for l in 0..3 {
            for i in 0..4 {
                for j in 0..4 {
                    let lhs = sys.mu(i, j, 0, l + 1);
                    let rhs = sys.mu(i, j, 0, l)
                        + sys.mu(i + 1, j, 0, l)
                        + sys.mu(i, j + 1, 0, l)
                        + sys.mu(i + 1, j + 1, 0, l);
                    assert_eq!(lhs, rhs);
                }
                assert_eq!(
                    sys.beta(i, 0, l + 1),
                    sys.beta(i, 0, l) + sys.beta(i + 1, 0, l)
                );
            }
        }

        // Accel binding shift laws, including the double-integral beta.
        let sys: MomentSystem<Rat> =
            MomentSystem::new(m, Kernel::Bures, Binding::AccelKL).unwrap();
        for k in 0..2 {
            for l in 0..2 {
                for i in 0..3 {
                    for j in 0..3 {
                        assert_eq!(sys.mu(i, j, k + 1, l), sys.mu(i + 1, j + 1, k, l));
                        let lhs = sys.mu(i, j, k, l + 1);
                        let rhs = sys.mu(i, j, k, l) - sys.mu(i + 1, j, k, l)
                            - sys.mu(i, j + 1, k, l)
                            + sys.mu(i + 1, j + 1, k, l);
                        assert_eq!(lhs, rhs);
                    }
                    assert_eq!(
                        sys.beta(i, k + 1, l),
                        sys.beta(i + 1, k, l) + sys.mu(0, i + 1, k, l)
                    );
                    assert_eq!(
                        sys.beta(i, k, l + 1),
                        sys.mu(0, i + 1, k, l) - sys.mu(0, i, k, l)
                    );
                }
            }
        }
    }

    #[test]
    fn qratio_s_derivative_law() {
        // d/ds mu_{i,j} = d1_i beta_j - beta_i d1_j for the QRatio binding.
        use crate::jet::JetTS;
        let mut rng = SplitMix64::new(5);
        let m = DiscreteMeasure::new(rng.nodes(4), vec![Rat::one(); 4]).unwrap();
        let sys: MomentSystem<JetTS<Rat>> =
            MomentSystem::new(m, Kernel::default_qratio(), Binding::ExpTQExpS).unwrap();
        for (i, j) in [(0, 1), (1, 2), (0, 3)] {
            let lhs = sys.mu(i, j, 0, 0).ds();
            let rhs = sys.d1_row(i, 0, 0).order0() * sys.beta(j, 0, 0).order0()
                - sys.beta(i, 0, 0).order0() * sys.d1_row(j, 0, 0).order0();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn debruijn_oracles_match_pfaffians() {
        let mut rng = SplitMix64::new(13);
        let nodes = rng.nodes(5);
        let weights: Vec<Rat> = (0..5).map(|_| rng.pos_rat()).collect();
        let m = DiscreteMeasure::new(nodes, weights).unwrap();
        for kernel in [Kernel::Sgn, Kernel::Bures, Kernel::Shifted, Kernel::default_qratio()] {
            let sys: MomentSystem<Rat> =
                MomentSystem::new(m.clone(), kernel, Binding::PowerShift).unwrap();
            let oracle = MomentOracle::new(&sys, 1, 1);
            for n in 0..=2usize {
                let even = debruijn_even(&sys, n, 1, 1).unwrap();
                assert_eq!(even, tau_from_oracle(&oracle, 2 * n as i64).unwrap());
                let odd = debruijn_odd(&sys, n, 1, 1).unwrap();
                assert_eq!(odd, tau_from_oracle(&oracle, 2 * n as i64 + 1).unwrap());
            }
            // Beyond the support both sides vanish.
            let sys3: MomentSystem<Rat> = MomentSystem::new(
                unit_measure(&[2, 3, 4]),
                Kernel::Bures,
                Binding::PowerExpT,
            )
            .unwrap();
            assert!(debruijn_even(&sys3, 2, 0, 0).unwrap().is_zero());
        }
    }

    #[test]
    fn debruijn_two_node_hand_value() {
        // n=1, nodes {1,2}: sum = omega(1,2) * (2-1) * w1 w2 = Pf(0,1).
        let sys: MomentSystem<Rat> =
            MomentSystem::new(unit_measure(&[1, 2]), Kernel::Bures, Binding::PowerExpT).unwrap();
        assert_eq!(debruijn_even(&sys, 1, 0, 0).unwrap(), sys.mu(0, 1, 0, 0));
    }

    #[test]
    fn multi_integral_styles_match_tau() {
        let mut rng = SplitMix64::new(21);
        let m = DiscreteMeasure::new(rng.nodes(4), vec![Rat::one(); 4]).unwrap();

        let bures: MomentSystem<Rat> =
            MomentSystem::new(m.clone(), Kernel::Bures, Binding::ExpTQExpS).unwrap();
        let shifted: MomentSystem<Rat> =
            MomentSystem::new(m.clone(), Kernel::Shifted, Binding::ShiftK).unwrap();
        let qr: MomentSystem<Rat> =
            MomentSystem::new(m.clone(), Kernel::default_qratio(), Binding::ExpTQExpS).unwrap();
        for n in 0..=4i64 {
            let ob = MomentOracle::new(&bures, 0, 0);
            assert_eq!(
                tau_multi_integral(&bures, MultiIntegralStyle::BuresSquared, n as usize, 0, 0)
                    .unwrap(),
                tau_from_oracle(&ob, n).unwrap(),
                "bures n={n}"
            );
            let os = MomentOracle::new(&shifted, 2, 0);
            assert_eq!(
                tau_multi_integral(&shifted, MultiIntegralStyle::ShiftedSquared, n as usize, 2, 0)
                    .unwrap(),
                tau_from_oracle(&os, n).unwrap(),
                "shifted n={n}"
            );
            let oq = MomentOracle::new(&qr, 0, 0);
            assert_eq!(
                tau_multi_integral(&qr, MultiIntegralStyle::QRatioProduct, n as usize, 0, 0)
                    .unwrap(),
                tau_from_oracle(&oq, n).unwrap(),
                "qratio n={n}"
            );
        }
    }

    #[test]
    fn unordered_debruijn() {
        let m = unit_measure(&[1, 2, 3, 5]);
        for n in 1..=2usize {
            assert!(debruijn_unordered_residual(&m, n).unwrap().is_zero());
        }
    }

    #[test]
    fn continuous_agrees_with_finer_rule() {
        // The rotated rule is the continuous backend for Bures + Laguerre:
        // polynomial-exact, so coarse and 4x finer rules coincide tightly.
        for i in 0..=4u32 {
            for j in (i + 1)..=6u32 {
                if i + j > 10 {
                    continue;
                }
                let a = bures_laguerre_moment(i, j, 0.0, 64).unwrap();
                let b = bures_laguerre_moment(i, j, 0.0, 256).unwrap();
                let rel = (a - b).abs() / b.abs().max(1e-300);
                assert!(rel < 1e-8, "mu({i},{j}) rel={rel}");
            }
        }
        // The tensor discretisation converges to the same values, slowly
        // (the kernel is not smooth at the corner); sanity-bound it.
        let coarse = ContinuousMeasure::new(ContinuousWeight::Laguerre { alpha: 0.0 }, 64);
        let sc: MomentSystem<f64> =
            MomentSystem::new(coarse.discretize(), Kernel::Bures, Binding::ExpTQExpS).unwrap();
        for (i, j) in [(0u32, 1u32), (1, 2), (2, 3)] {
            let a = sc.mu(i as i64, j as i64, 0, 0);
            let b = bures_laguerre_moment(i, j, 0.0, 128).unwrap();
            let rel = (a - b).abs() / b.abs();
            assert!(rel < 1e-3, "tensor path mu({i},{j}) rel={rel}");
        }
    }

    #[test]
    fn jet_moments_match_finite_differences() {
        // Float sanity: order-1 and order-2 jet parts against central
        // differences of the reweighted continuous backend.
        let c = ContinuousMeasure::new(ContinuousWeight::Laguerre { alpha: 0.0 }, 64);
        let jet_sys: MomentSystem<Jet2<f64>> =
            MomentSystem::new(c.discretize(), Kernel::Bures, Binding::ExpTQExpS).unwrap();
        let h = 1e-4;
        let at = |t: f64| -> MomentSystem<f64> {
            MomentSystem::new(c.discretize_shifted(t).unwrap(), Kernel::Bures, Binding::ExpTQExpS)
                .unwrap()
        };
        let (sp, sm, s0) = (at(h), at(-h), at(0.0));
        let jet = jet_sys.mu(0, 1, 0, 0);
        let d1 = (sp.mu(0, 1, 0, 0) - sm.mu(0, 1, 0, 0)) / (2.0 * h);
        let d2 = (sp.mu(0, 1, 0, 0) - 2.0 * s0.mu(0, 1, 0, 0) + sm.mu(0, 1, 0, 0)) / (h * h);
        assert!((jet.dt() - d1).abs() < 1e-6 * (1.0 + d1.abs()));
        assert!((jet.dtt() - d2).abs() < 1e-4 * (1.0 + d2.abs()));
    }

    #[test]
    fn divergent_moment_rejected() {
        let c = ContinuousMeasure::new(ContinuousWeight::Laguerre { alpha: 0.0 }, 8);
        assert!(matches!(c.discretize_shifted(1.0), Err(Error::DivergentMoment(_))));
    }
}
