//! Pfaffian evaluation over plain and extended index lists.
//!
//! The engine works from an [`EntryOracle`]: any source of antisymmetric
//! entries keyed by [`ExtIndex`]. Integer indices address the bimoment
//! table; the characters `d0`, `d1`, `c0` address auxiliary rows (single
//! moments, their derivatives, alternating constants); `z` marks the
//! polynomial row of a wave-function Pfaffian.
//!
//! Evaluation is memoised Laplace expansion over index subsets. Sizes in
//! this crate stay below ~16 indices, where the `O(2^m m^2)` cost is
//! negligible and the expansion applies verbatim to character rows and
//! polynomial rows.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::scalar::{Field, Ring};

/// Index into an extended Pfaffian.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum ExtIndex {
    /// Bimoment index; negative values are allowed (Pade reciprocal family).
    Int(i64),
    D0,
    D1,
    C0,
    /// Polynomial row; at most one per list, in last position.
    Z,
}

impl std::fmt::Display for ExtIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ExtIndex::Int(i) => write!(f, "{i}"),
            ExtIndex::D0 => write!(f, "d0"),
            ExtIndex::D1 => write!(f, "d1"),
            ExtIndex::C0 => write!(f, "c0"),
            ExtIndex::Z => write!(f, "z"),
        }
    }
}

/// Convenience: the list `(lo..hi)` as integer indices.
pub fn int_range(lo: i64, hi: i64) -> Vec<ExtIndex> {
    (lo..hi).map(ExtIndex::Int).collect()
}

/// Source of antisymmetric Pfaffian entries.
pub trait EntryOracle<S: Ring> {
    /// Entry `Pf(a, b)`; must satisfy `entry(a,b) = -entry(b,a)`.
    fn entry(&self, a: &ExtIndex, b: &ExtIndex) -> S;

    /// Row against the polynomial index: `Pf(i, z) = z^i` for integer
    /// indices, zero for character rows. Families with other conventions
    /// override this.
    fn poly_entry(&self, a: &ExtIndex) -> Poly<S> {
        match a {
            ExtIndex::Int(i) if *i >= 0 => Poly::monomial(S::one(), *i as usize),
            _ => Poly::zero(),
        }
    }
}

/// Plain skew-symmetric matrix of even order, stored densely.
#[derive(Clone, Debug)]
pub struct SkewMatrix<S> {
    pub n: usize,
    a: Vec<Vec<S>>,
}

impl<S: Ring> SkewMatrix<S> {
    /// Build from the strict upper triangle, row-major:
    /// `(a01, a02, .., a0{n-1}, a12, ..)`.
    pub fn from_upper(n: usize, upper: &[S]) -> Result<Self> {
        let expected = if n < 2 { 0 } else { n * (n - 1) / 2 };
        if upper.len() != expected {
            return Err(Error::InvalidIndexList(format!(
                "expected {expected} upper entries for order {n}, got {}",
                upper.len()
            )));
        }
        let mut a = vec![vec![S::zero(); n]; n];
        let mut it = upper.iter();
        for i in 0..n {
            for j in (i + 1)..n {
                let v = it.next().unwrap().clone();
                a[i][j] = v.clone();
                a[j][i] = -v;
            }
        }
        Ok(SkewMatrix { n, a })
    }

    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.a[i][j]
    }

    pub fn set_upper(&mut self, i: usize, j: usize, v: S) {
        assert!(i < j);
        self.a[i][j] = v.clone();
        self.a[j][i] = -v;
    }
}

impl<S: Ring> EntryOracle<S> for SkewMatrix<S> {
    fn entry(&self, a: &ExtIndex, b: &ExtIndex) -> S {
        match (a, b) {
            (ExtIndex::Int(i), ExtIndex::Int(j)) => self.a[*i as usize][*j as usize].clone(),
            _ => S::zero(),
        }
    }
}

/// Pfaffian of a plain skew matrix. Order 0 gives 1 by convention.
pub fn pf<S: Ring>(m: &SkewMatrix<S>) -> Result<S> {
    if m.n % 2 != 0 {
        return Err(Error::InvalidOrder(m.n));
    }
    let idx = int_range(0, m.n as i64);
    pf_indexed(m, &idx)
}

fn entry_table<S: Ring>(oracle: &impl EntryOracle<S>, indices: &[ExtIndex]) -> Result<Vec<Vec<S>>> {
    let m = indices.len();
    let mut table = vec![vec![S::zero(); m]; m];
    for i in 0..m {
        for j in (i + 1)..m {
            let v = table[i][j].clone();
            let _ = v;
            let e = oracle.entry(&indices[i], &indices[j]);
            table[i][j] = e.clone();
            table[j][i] = -e;
        }
    }
    // Spot-check antisymmetry: diagonal entries and the first off-diagonal pair.
    for i in 0..m {
        let d = oracle.entry(&indices[i], &indices[i]);
        if !d.is_zero() {
            return Err(Error::BadOracle(indices[i].to_string(), indices[i].to_string()));
        }
    }
    if m >= 2 {
        let fwd = oracle.entry(&indices[0], &indices[1]);
        let bwd = oracle.entry(&indices[1], &indices[0]);
        if !(fwd + bwd).is_zero() {
            return Err(Error::BadOracle(indices[0].to_string(), indices[1].to_string()));
        }
    }
    Ok(table)
}

fn pf_masked<S: Ring>(table: &[Vec<S>], mask: u32, memo: &mut HashMap<u32, S>) -> S {
    if mask == 0 {
        return S::one();
    }
    if let Some(v) = memo.get(&mask) {
        return v.clone();
    }
    // Expand along the highest remaining index (the last element).
    let last = 31 - mask.leading_zeros();
    let rest = mask & !(1u32 << last);
    let mut acc = S::zero();
    let mut sign_plus = true;
    let mut j = rest;
    while j != 0 {
        let low = j.trailing_zeros();
        j &= j - 1;
        let sub = rest & !(1u32 << low);
        let term = table[low as usize][last as usize].clone() * pf_masked(table, sub, memo);
        acc = if sign_plus { acc + term } else { acc - term };
        sign_plus = !sign_plus;
    }
    memo.insert(mask, acc.clone());
    acc
}

fn pf_masked_first<S: Ring>(table: &[Vec<S>], mask: u32, memo: &mut HashMap<u32, S>) -> S {
    if mask == 0 {
        return S::one();
    }
    if let Some(v) = memo.get(&mask) {
        return v.clone();
    }
    // Expand along the lowest remaining index instead.
    let first = mask.trailing_zeros();
    let rest = mask & !(1u32 << first);
    let mut acc = S::zero();
    let mut sign_plus = true;
    let mut j = rest;
    while j != 0 {
        let low = j.trailing_zeros();
        j &= j - 1;
        let sub = rest & !(1u32 << low);
        let term = table[first as usize][low as usize].clone() * pf_masked_first(table, sub, memo);
        acc = if sign_plus { acc + term } else { acc - term };
        sign_plus = !sign_plus;
    }
    memo.insert(mask, acc.clone());
    acc
}

fn check_indices(indices: &[ExtIndex], allow_z: bool) -> Result<()> {
    if indices.len() % 2 != 0 {
        return Err(Error::InvalidOrder(indices.len()));
    }
    if indices.len() > 30 {
        return Err(Error::InvalidIndexList("more than 30 indices".into()));
    }
    let zs = indices.iter().filter(|i| **i == ExtIndex::Z).count();
    if zs > 0 && (!allow_z || zs > 1 || *indices.last().unwrap() != ExtIndex::Z) {
        return Err(Error::InvalidIndexList(
            "z must appear at most once, in last position, in polynomial evaluation".into(),
        ));
    }
    Ok(())
}

/// Pfaffian over an extended index list (no `z`).
pub fn pf_indexed<S: Ring>(oracle: &impl EntryOracle<S>, indices: &[ExtIndex]) -> Result<S> {
    check_indices(indices, false)?;
    if indices.is_empty() {
        return Ok(S::one());
    }
    let table = entry_table(oracle, indices)?;
    let mask = (1u32 << indices.len()) - 1;
    Ok(pf_masked(&table, mask, &mut HashMap::new()))
}

/// Same value as [`pf_indexed`], expanded along the opposite pivot; used to
/// assert pivot independence.
pub fn pf_indexed_first_pivot<S: Ring>(
    oracle: &impl EntryOracle<S>,
    indices: &[ExtIndex],
) -> Result<S> {
    check_indices(indices, false)?;
    if indices.is_empty() {
        return Ok(S::one());
    }
    let table = entry_table(oracle, indices)?;
    let mask = (1u32 << indices.len()) - 1;
    Ok(pf_masked_first(&table, mask, &mut HashMap::new()))
}

/// Polynomial-valued Pfaffian: the list must end in `z`.
///
/// Expands along the `z` row, delegating the even-order minors to
/// [`pf_indexed`]: `Pf(i_1..i_{2m-1}, z) = sum_p (-1)^{p+1} Pf(rest_p) *
/// poly_entry(i_p)`. The single index list `[z]` yields the constant 1
/// (degenerate base convention).
pub fn pf_poly<S: Ring>(oracle: &impl EntryOracle<S>, indices: &[ExtIndex]) -> Result<Poly<S>> {
    check_indices(indices, true)?;
    if indices.is_empty() {
        return Ok(Poly::one());
    }
    let (last, head) = indices.split_last().unwrap();
    if *last != ExtIndex::Z {
        return Err(Error::InvalidIndexList("polynomial evaluation needs trailing z".into()));
    }
    if head.is_empty() {
        return Ok(Poly::one());
    }
    let table = entry_table(oracle, head)?;
    let full = (1u32 << head.len()) - 1;
    let mut memo = HashMap::new();
    let mut acc = Poly::zero();
    let mut sign_plus = true;
    for (p, idx) in head.iter().enumerate() {
        let sub = full & !(1u32 << p);
        let minor = pf_masked(&table, sub, &mut memo);
        let row = oracle.poly_entry(idx);
        let term = row.scale(&minor);
        acc = if sign_plus { acc + term } else { acc - term };
        sign_plus = !sign_plus;
    }
    Ok(acc)
}

/// Determinant by exact Gaussian elimination (first-nonzero pivoting).
pub fn det<S: Field>(a: &[Vec<S>]) -> S {
    let n = a.len();
    let mut m: Vec<Vec<S>> = a.to_vec();
    let mut sign_plus = true;
    let mut acc = S::one();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !m[r][col].is_zero());
        let Some(p) = pivot else { return S::zero() };
        if p != col {
            m.swap(p, col);
            sign_plus = !sign_plus;
        }
        let pv = m[col][col].clone();
        acc = acc * pv.clone();
        for r in (col + 1)..n {
            let f = match m[r][col].try_div(&pv) {
                Some(f) => f,
                None => unreachable!("pivot checked nonzero"),
            };
            for c in col..n {
                let sub = f.clone() * m[col][c].clone();
                m[r][c] = m[r][c].clone() - sub;
            }
        }
    }
    if sign_plus {
        acc
    } else {
        -acc
    }
}

/// Determinant of a [`SkewMatrix`].
pub fn skew_det<S: Field>(m: &SkewMatrix<S>) -> S {
    let rows: Vec<Vec<S>> = (0..m.n).map(|i| (0..m.n).map(|j| m.a[i][j].clone()).collect()).collect();
    det(&rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;
    use crate::scalar::Rat;

    fn r(n: i64) -> Rat {
        Rat::from_i64(n)
    }

    #[test]
    fn order_zero_is_one_and_pair_is_entry() {
        let m = SkewMatrix::<Rat>::from_upper(0, &[]).unwrap();
        assert_eq!(pf(&m).unwrap(), r(1));
        let m = SkewMatrix::from_upper(2, &[r(7)]).unwrap();
        assert_eq!(pf(&m).unwrap(), r(7));
    }

    #[test]
    fn order_four_signed_matchings() {
        // (a01, a02, a03, a12, a13, a23) -> a01 a23 - a02 a13 + a03 a12.
        // Derived by enumerating the three perfect matchings of {0,1,2,3}.
        let up: Vec<Rat> = (1..=6).map(r).collect();
        let m = SkewMatrix::from_upper(4, &up).unwrap();
        let expect = r(1) * r(6) - r(2) * r(5) + r(3) * r(4);
        assert_eq!(pf(&m).unwrap(), expect);
    }

    #[test]
    fn odd_order_rejected() {
        let m = SkewMatrix::from_upper(3, &[r(1), r(2), r(3)]).unwrap();
        assert!(matches!(pf(&m), Err(Error::InvalidOrder(3))));
    }

    #[test]
    fn pf_squared_is_det() {
        let mut rng = SplitMix64::new(11);
        for order in [2usize, 4, 6, 8] {
            let up: Vec<Rat> = (0..order * (order - 1) / 2).map(|_| rng.rat()).collect();
            let m = SkewMatrix::from_upper(order, &up).unwrap();
            let p = pf(&m).unwrap();
            assert_eq!(p.clone() * p, skew_det(&m));
        }
    }

    #[test]
    fn pivot_independence() {
        let mut rng = SplitMix64::new(5);
        for order in [4usize, 6, 8] {
            let up: Vec<Rat> = (0..order * (order - 1) / 2).map(|_| rng.rat()).collect();
            let m = SkewMatrix::from_upper(order, &up).unwrap();
            let idx = int_range(0, order as i64);
            assert_eq!(
                pf_indexed(&m, &idx).unwrap(),
                pf_indexed_first_pivot(&m, &idx).unwrap()
            );
        }
    }

    #[test]
    fn row_scaling_and_swap_properties() {
        let mut rng = SplitMix64::new(17);
        let order = 6;
        let up: Vec<Rat> = (0..15).map(|_| rng.rat()).collect();
        let m = SkewMatrix::from_upper(order, &up).unwrap();
        let base = pf(&m).unwrap();

        // Scaling row+column 2 by c scales the Pfaffian by c.
        let c = r(3);
        let mut scaled = m.clone();
        for j in 0..order {
            if j != 2 {
                let v = scaled.get(2.min(j), 2.max(j)).clone() * c.clone();
                scaled.set_upper(2.min(j), 2.max(j), v);
            }
        }
        assert_eq!(pf(&scaled).unwrap(), base.clone() * c);

        // Swapping two indices changes the sign.
        let mut idx = int_range(0, order as i64);
        idx.swap(1, 4);
        assert_eq!(pf_indexed(&m, &idx).unwrap(), -base);
    }

    #[test]
    fn pf_poly_matches_concrete_powers() {
        // pf_poly evaluated at z0 equals pf_indexed with the z row replaced
        // by concrete powers of z0.
        struct WithPowers {
            m: SkewMatrix<Rat>,
            z0: Rat,
            zpos: i64,
        }
        impl EntryOracle<Rat> for WithPowers {
            fn entry(&self, a: &ExtIndex, b: &ExtIndex) -> Rat {
                if a == b {
                    return Rat::zero();
                }
                match (a, b) {
                    (ExtIndex::Int(i), ExtIndex::Int(j)) if *i == self.zpos => {
                        -crate::scalar::pow_field(&self.z0, *j).unwrap()
                    }
                    (ExtIndex::Int(i), ExtIndex::Int(j)) if *j == self.zpos => {
                        crate::scalar::pow_field(&self.z0, *i).unwrap()
                    }
                    (ExtIndex::Int(i), ExtIndex::Int(j)) => self.m.entry(
                        &ExtIndex::Int(*i),
                        &ExtIndex::Int(*j),
                    ),
                    _ => Rat::zero(),
                }
            }
        }
        let mut rng = SplitMix64::new(23);
        let up: Vec<Rat> = (0..6).map(|_| rng.rat()).collect();
        let m = SkewMatrix::from_upper(4, &up).unwrap();
        let mut idx = int_range(0, 3);
        idx.push(ExtIndex::Z);
        let p = pf_poly(&m, &idx).unwrap();
        let z0 = r(5);
        let oracle = WithPowers { m: m.clone(), z0: z0.clone(), zpos: 99 };
        let mut concrete = int_range(0, 3);
        concrete.push(ExtIndex::Int(99));
        assert_eq!(p.eval(&z0), pf_indexed(&oracle, &concrete).unwrap());
    }
}
