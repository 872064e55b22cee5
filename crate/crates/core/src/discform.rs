//! Discriminant groups and finite quadratic forms.
//!
//! A [`FiniteQuadraticForm`] lives on `Z/d_1 ⊕ … ⊕ Z/d_k` (`d_i | d_{i+1}`,
//! `d_i > 1`) with one generator per factor. Values are stored as integer
//! numerators over a common denominator: `q` modulo `2·den`, `b` modulo
//! `den`, so all group-level arithmetic stays in machine integers.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::error::{Error, Result};
use crate::lattice::{Lattice, Signature};
use crate::numtheory::{self, is_prime, legendre, p_power_part};

/// Default bound on the group order for exhaustive isomorphism searches.
pub const DEFAULT_BRUTE_FORCE_BOUND: u64 = 10_000;

/// A rational number modulo 2, canonical representative in `[0, 2)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QmodTwoZ(BigRational);

impl QmodTwoZ {
    pub fn new(r: BigRational) -> Self {
        QmodTwoZ(reduce_mod(&r, 2))
    }

    pub fn from_ratio(n: i64, d: i64) -> Self {
        Self::new(BigRational::new(n.into(), d.into()))
    }

    pub fn value(&self) -> &BigRational {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl fmt::Display for QmodTwoZ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", fmt_rational(&self.0))
    }
}

/// Reduce a rational into `[0, m)`.
pub fn reduce_mod(r: &BigRational, m: i64) -> BigRational {
    let m = BigRational::from_integer(m.into());
    let k = (r / &m).floor();
    r - k * m
}

pub fn fmt_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::Parse { pos: 0, msg: format!("bad rational '{s}'") };
    let s = s.trim().replace('−', "-");
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// Coordinates with respect to the generators, `0 ≤ a_i < d_i`.
pub type GroupElement = Vec<i64>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteQuadraticForm {
    factors: Vec<u64>,
    den: i64,
    q_num: Vec<i64>,
    b_num: Vec<Vec<i64>>,
}

#[derive(Serialize, Deserialize)]
struct FormJson {
    factors: Vec<u64>,
    q: Vec<String>,
    b: Vec<Vec<String>>,
}

impl FiniteQuadraticForm {
    pub fn trivial() -> Self {
        FiniteQuadraticForm { factors: Vec::new(), den: 1, q_num: Vec::new(), b_num: Vec::new() }
    }

    /// Build a form from generator orders and rational values. The factors
    /// need not form a divisibility chain; the result is normalized.
    pub fn from_values(factors: &[u64], q: &[BigRational], b: &[Vec<BigRational>]) -> Result<Self> {
        let k = factors.len();
        if q.len() != k || b.len() != k || b.iter().any(|r| r.len() != k) {
            return Err(Error::Precondition("form data has inconsistent dimensions".into()));
        }
        let den = arith::common_denominator(q.iter().chain(b.iter().flatten()));
        let den = den.to_i64().ok_or(Error::Overflow("denominator"))?;
        let to_num = |r: &BigRational, m: i64| -> i64 {
            let v = reduce_mod(&(r * BigRational::from_integer(den.into())), m);
            v.to_integer().to_i64().unwrap()
        };
        let q_num: Vec<i64> = q.iter().map(|r| to_num(r, 2 * den)).collect();
        let b_num: Vec<Vec<i64>> = b.iter().map(|row| row.iter().map(|r| to_num(r, den)).collect()).collect();
        for i in 0..k {
            if factors[i] < 1 {
                return Err(Error::Precondition("factor must be positive".into()));
            }
            for j in 0..k {
                if b_num[i][j] != b_num[j][i] {
                    return Err(Error::Precondition("bilinear values not symmetric".into()));
                }
                if (b_num[i][j] as i128 * factors[i] as i128) % den as i128 != 0 {
                    return Err(Error::Precondition(format!("b(g{i},g{j}) not killed by order")));
                }
            }
            if (q_num[i] - b_num[i][i]).rem_euclid(den) != 0 {
                return Err(Error::Precondition(format!("q(g{i}) and b(g{i},g{i}) disagree mod 1")));
            }
            let d = factors[i] as i128;
            if ((d * d + 2 * d) * q_num[i] as i128) % (2 * den as i128) != 0 {
                return Err(Error::Precondition(format!("q(g{i}) not well defined")));
            }
        }
        let raw = FiniteQuadraticForm { factors: factors.to_vec(), den, q_num, b_num };
        Ok(raw.normalized())
    }

    fn normalized(&self) -> Self {
        let all: Vec<GroupElement> = (0..self.factors.len()).map(|i| self.unit(i)).collect();
        self.subquotient(&all, &[]).expect("normalization of a valid form").0
    }

    fn unit(&self, i: usize) -> GroupElement {
        let mut e = vec![0; self.factors.len()];
        e[i] = 1 % self.factors[i] as i64;
        e
    }

    pub fn factors(&self) -> &[u64] {
        &self.factors
    }

    pub fn order(&self) -> u64 {
        self.factors.iter().product()
    }

    pub fn length(&self) -> usize {
        self.factors.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn zero(&self) -> GroupElement {
        vec![0; self.factors.len()]
    }

    pub fn denominator(&self) -> i64 {
        self.den
    }

    pub fn reduce(&self, x: &[i64]) -> GroupElement {
        x.iter().zip(&self.factors).map(|(a, d)| a.rem_euclid(*d as i64)).collect()
    }

    pub fn add(&self, x: &[i64], y: &[i64]) -> GroupElement {
        x.iter().zip(y).zip(&self.factors).map(|((a, b), d)| (a + b).rem_euclid(*d as i64)).collect()
    }

    pub fn scale(&self, k: i64, x: &[i64]) -> GroupElement {
        x.iter()
            .zip(&self.factors)
            .map(|(a, d)| ((k as i128 * *a as i128).rem_euclid(*d as i128)) as i64)
            .collect()
    }

    pub fn element_order(&self, x: &[i64]) -> u64 {
        x.iter().zip(&self.factors).fold(1u64, |acc, (a, d)| acc.lcm(&(*d / (*d).gcd(&(*a as u64)))))
    }

    /// `q(x)·den` modulo `2·den`.
    pub fn q_num(&self, x: &[i64]) -> i64 {
        let m = 2 * self.den as i128;
        let mut acc: i128 = 0;
        for i in 0..x.len() {
            if x[i] == 0 {
                continue;
            }
            let xi = x[i] as i128;
            acc += xi * xi % m * self.q_num[i] as i128;
            for j in i + 1..x.len() {
                if x[j] != 0 {
                    acc += 2 * (xi * x[j] as i128 % m) * self.b_num[i][j] as i128;
                }
            }
            acc %= m;
        }
        acc.rem_euclid(m) as i64
    }

    /// `b(x,y)·den` modulo `den`.
    pub fn b_num(&self, x: &[i64], y: &[i64]) -> i64 {
        let m = self.den as i128;
        let mut acc: i128 = 0;
        for i in 0..x.len() {
            if x[i] == 0 {
                continue;
            }
            for j in 0..y.len() {
                if y[j] != 0 {
                    acc += (x[i] as i128 * y[j] as i128 % m) * self.b_num[i][j] as i128;
                }
            }
            acc %= m;
        }
        acc.rem_euclid(m) as i64
    }

    pub fn q(&self, x: &[i64]) -> QmodTwoZ {
        QmodTwoZ::from_ratio(self.q_num(x), self.den)
    }

    /// Bilinear value in `[0, 1)`.
    pub fn b(&self, x: &[i64], y: &[i64]) -> BigRational {
        BigRational::new(self.b_num(x, y).into(), self.den.into())
    }

    pub fn q_values(&self) -> Vec<QmodTwoZ> {
        (0..self.length()).map(|i| self.q(&self.unit(i))).collect()
    }

    pub fn b_values(&self) -> Vec<Vec<BigRational>> {
        (0..self.length()).map(|i| (0..self.length()).map(|j| self.b(&self.unit(i), &self.unit(j))).collect()).collect()
    }

    /// `q(x)` compared against a rational value modulo 2.
    pub fn q_equals(&self, x: &[i64], value: &BigRational) -> bool {
        let v = reduce_mod(value, 2) * BigRational::from_integer(self.den.into());
        v.is_integer() && v.to_integer() == BigInt::from(self.q_num(x))
    }

    /// All elements in mixed-radix order (first coordinate fastest).
    pub fn elements(&self) -> Vec<GroupElement> {
        let n = self.order() as usize;
        let mut out = Vec::with_capacity(n);
        let mut cur = self.zero();
        for _ in 0..n {
            out.push(cur.clone());
            for (c, d) in cur.iter_mut().zip(&self.factors) {
                *c += 1;
                if *c < *d as i64 {
                    break;
                }
                *c = 0;
            }
        }
        out
    }

    pub fn index_of(&self, x: &[i64]) -> usize {
        let mut idx = 0usize;
        let mut mult = 1usize;
        for (c, d) in x.iter().zip(&self.factors) {
            idx += *c as usize * mult;
            mult *= *d as usize;
        }
        idx
    }

    pub fn negate(&self) -> Self {
        let m2 = 2 * self.den;
        FiniteQuadraticForm {
            factors: self.factors.clone(),
            den: self.den,
            q_num: self.q_num.iter().map(|q| (-q).rem_euclid(m2)).collect(),
            b_num: self.b_num.iter().map(|r| r.iter().map(|b| (-b).rem_euclid(self.den)).collect()).collect(),
        }
    }

    /// Orthogonal direct sum, with generators of `self` then of `other`
    /// before normalization. Use [`Self::orthogonal_sum_raw`] for the
    /// unnormalized version that keeps the concatenated coordinates.
    pub fn orthogonal_sum(&self, other: &Self) -> Self {
        self.orthogonal_sum_raw(other).normalized()
    }

    /// Orthogonal sum on concatenated coordinates (factors may not form a
    /// divisibility chain).
    pub fn orthogonal_sum_raw(&self, other: &Self) -> Self {
        let den = self.den.lcm(&other.den);
        let (s1, s2) = (den / self.den, den / other.den);
        let k1 = self.length();
        let k = k1 + other.length();
        let mut q_num = Vec::with_capacity(k);
        q_num.extend(self.q_num.iter().map(|q| q * s1));
        q_num.extend(other.q_num.iter().map(|q| q * s2));
        let mut b_num = vec![vec![0; k]; k];
        for i in 0..k1 {
            for j in 0..k1 {
                b_num[i][j] = self.b_num[i][j] * s1;
            }
        }
        for i in 0..other.length() {
            for j in 0..other.length() {
                b_num[k1 + i][k1 + j] = other.b_num[i][j] * s2;
            }
        }
        let mut factors = self.factors.clone();
        factors.extend(&other.factors);
        FiniteQuadraticForm { factors, den, q_num, b_num }
    }

    /// The quotient `⟨sub⟩ / ⟨rel⟩` with its induced form, where `rel`
    /// generates a subgroup of `⟨sub⟩` on which the form is well defined
    /// (isotropic and orthogonal to `⟨sub⟩`). Also returns the quotient
    /// generators as elements of `self`.
    pub fn subquotient(&self, sub: &[GroupElement], rel: &[GroupElement]) -> Result<(Self, Vec<GroupElement>)> {
        let k = self.length();
        if k == 0 {
            return Ok((Self::trivial(), Vec::new()));
        }
        let relations: Vec<Vec<BigInt>> = (0..k)
            .map(|i| {
                let mut v = vec![BigInt::zero(); k];
                v[i] = BigInt::from(self.factors[i]);
                v
            })
            .collect();
        let to_big = |x: &GroupElement| x.iter().map(|&a| BigInt::from(a)).collect::<Vec<_>>();
        let mut p_gens: Vec<Vec<BigInt>> = relations.clone();
        p_gens.extend(sub.iter().map(to_big));
        let basis = arith::lattice_basis(&p_gens, k);
        debug_assert_eq!(basis.len(), k);
        // columns of `cols` are the basis vectors
        let cols: arith::RatMatrix = (0..k)
            .map(|i| basis.iter().map(|b| BigRational::from_integer(b[i].clone())).collect())
            .collect();
        let mut r_gens = relations;
        r_gens.extend(rel.iter().map(to_big));
        let mut rel_cols: Vec<Vec<BigInt>> = Vec::with_capacity(r_gens.len());
        for r in &r_gens {
            let rhs: Vec<BigRational> = r.iter().map(|x| BigRational::from_integer(x.clone())).collect();
            let y = arith::solve_rational(&cols, &rhs).expect("basis is nonsingular");
            if y.iter().any(|c| !c.is_integer()) {
                return Err(Error::Precondition("relation subgroup is not contained in the subgroup".into()));
            }
            rel_cols.push(y.into_iter().map(|c| c.to_integer()).collect());
        }
        let rel_mat: arith::IntMatrix = (0..k).map(|i| rel_cols.iter().map(|c| c[i].clone()).collect()).collect();
        let s = arith::smith_normal_form(&rel_mat);
        let diag = s.diagonal();
        let mut factors = Vec::new();
        let mut gens = Vec::new();
        for (i, d) in diag.iter().enumerate() {
            if d.is_one() {
                continue;
            }
            assert!(!d.is_zero(), "relations have full rank");
            // generator = basis · (U^{-1} e_i)
            let coeffs: Vec<BigInt> = s.u_inv.iter().map(|row| row[i].clone()).collect();
            let mut g = vec![BigInt::zero(); k];
            for (c, b) in coeffs.iter().zip(&basis) {
                for t in 0..k {
                    g[t] += c * &b[t];
                }
            }
            let g: GroupElement = g
                .iter()
                .zip(&self.factors)
                .map(|(x, d)| x.mod_floor(&BigInt::from(*d)).to_i64().unwrap())
                .collect();
            factors.push(d.to_u64().ok_or(Error::Overflow("factor"))?);
            gens.push(g);
        }
        let n = gens.len();
        let q_num = gens.iter().map(|g| self.q_num(g)).collect();
        let b_num = (0..n).map(|i| (0..n).map(|j| self.b_num(&gens[i], &gens[j])).collect()).collect();
        let mut out = FiniteQuadraticForm { factors, den: self.den, q_num, b_num };
        out.shrink_denominator();
        Ok((out, gens))
    }

    fn shrink_denominator(&mut self) {
        let mut g = self.den;
        for q in &self.q_num {
            g = g.gcd(q);
        }
        for r in &self.b_num {
            for b in r {
                g = g.gcd(b);
            }
        }
        // q is stored mod 2·den, so only divide if all numerators stay
        // integers after division.
        if g > 1 {
            self.den /= g;
            self.q_num.iter_mut().for_each(|q| *q /= g);
            self.b_num.iter_mut().flatten().for_each(|b| *b /= g);
        }
        if self.den == 0 {
            self.den = 1;
        }
    }

    /// Restriction to the `p`-primary component.
    pub fn p_part(&self, p: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let gens: Vec<GroupElement> = (0..self.length())
            .map(|i| {
                let d = self.factors[i];
                self.scale((d / p_power_part(d, p)) as i64, &self.unit(i))
            })
            .collect();
        Ok(self.subquotient(&gens, &[])?.0)
    }

    /// Subgroup generated by `gens`, as a sorted list of element indices.
    pub fn span(&self, gens: &[GroupElement]) -> Vec<GroupElement> {
        self.span_bounded(gens, u64::MAX).expect("unbounded span")
    }

    /// [`Self::span`], or `None` once the subgroup exceeds `max` elements.
    pub fn span_bounded(&self, gens: &[GroupElement], max: u64) -> Option<Vec<GroupElement>> {
        let mut seen = BTreeSet::new();
        let mut list = vec![self.zero()];
        seen.insert(self.index_of(&self.zero()));
        let mut i = 0;
        while i < list.len() {
            let x = list[i].clone();
            for g in gens {
                let y = self.add(&x, g);
                if seen.insert(self.index_of(&y)) {
                    if list.len() as u64 >= max {
                        return None;
                    }
                    list.push(y);
                }
            }
            i += 1;
        }
        list.sort_by_key(|x| self.index_of(x));
        Some(list)
    }

    /// A small generating set of the subgroup whose elements are listed.
    pub fn generators_of(&self, elements: &[GroupElement]) -> Vec<GroupElement> {
        let mut gens: Vec<GroupElement> = Vec::new();
        let mut have = BTreeSet::new();
        have.insert(self.index_of(&self.zero()));
        for x in elements {
            if have.contains(&self.index_of(x)) {
                continue;
            }
            gens.push(x.clone());
            have = self.span(&gens).iter().map(|y| self.index_of(y)).collect();
        }
        gens
    }

    /// Elements orthogonal (under `b`) to every element of `gens`.
    pub fn orthogonal_of(&self, gens: &[GroupElement]) -> Vec<GroupElement> {
        self.elements().into_iter().filter(|x| gens.iter().all(|g| self.b_num(x, g) == 0)).collect()
    }

    /// Apply a homomorphism given by the images of the generators.
    pub fn apply(&self, target: &Self, images: &[GroupElement], x: &[i64]) -> GroupElement {
        let mut out = target.zero();
        for (c, img) in x.iter().zip(images) {
            if *c != 0 {
                out = target.add(&out, &target.scale(*c, img));
            }
        }
        out
    }

    /// Signature modulo 8 of any even lattice with this discriminant form,
    /// read off the Gauss sum `Σ exp(πi·q(x)) = √|A|·exp(πi·σ/4)`.
    pub fn signature_mod8(&self) -> u8 {
        let (mut re, mut im) = (0f64, 0f64);
        for x in self.elements() {
            let t = std::f64::consts::PI * self.q_num(&x) as f64 / self.den as f64;
            re += t.cos();
            im += t.sin();
        }
        let r2 = re * re + im * im;
        assert!((r2 - self.order() as f64).abs() < 1e-6 * self.order() as f64, "nondegenerate form");
        let eighths = (im.atan2(re) / (std::f64::consts::PI / 4.0)).round() as i64;
        eighths.rem_euclid(8) as u8
    }

    pub fn to_json(&self) -> serde_json::Value {
        let j = FormJson {
            factors: self.factors.clone(),
            q: self.q_values().iter().map(|q| q.to_string()).collect(),
            b: self.b_values().iter().map(|r| r.iter().map(fmt_rational).collect()).collect(),
        };
        serde_json::to_value(j).unwrap()
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let j: FormJson = serde_json::from_value(v.clone()).map_err(|e| Error::Parse { pos: 0, msg: e.to_string() })?;
        let q: Vec<BigRational> = j.q.iter().map(|s| parse_rational(s)).collect::<Result<_>>()?;
        let b: Vec<Vec<BigRational>> =
            j.b.iter().map(|r| r.iter().map(|s| parse_rational(s)).collect::<Result<_>>()).collect::<Result<_>>()?;
        if j.factors.iter().any(|&d| d < 2) || j.factors.windows(2).any(|w| w[1] % w[0] != 0) {
            return Err(Error::Precondition("factors must satisfy 1 < d_1 | d_2 | ...".into()));
        }
        Self::from_values(&j.factors, &q, &b)
    }
}

impl fmt::Display for FiniteQuadraticForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "trivial");
        }
        let grp: Vec<String> = self.factors.iter().map(|d| format!("Z/{d}")).collect();
        let q: Vec<String> = self.q_values().iter().map(|q| q.to_string()).collect();
        write!(f, "{} q=[{}]", grp.join("+"), q.join(","))
    }
}

/// `A_L = L*/L` with generators given as dual vectors.
#[derive(Clone, Debug)]
pub struct DiscriminantGroup {
    pub form: FiniteQuadraticForm,
    /// Dual-lattice generators in the coordinates of `L ⊗ Q`.
    pub generators: Vec<Vec<BigRational>>,
    // rows of D·V⁻¹ for the nontrivial factors
    coord_rows: Vec<Vec<BigInt>>,
}

impl DiscriminantGroup {
    pub fn of(l: &Lattice) -> Self {
        Self::of_pairing(l, &l.gram_big())
    }

    /// The group `{y ∈ L⊗Q : C·y integral} / L` for an integer matrix `C`
    /// of full column rank. With `C = G_L` this is `A_L`; with
    /// `C = G_M·B` for an embedding `B: L → M` it is `(M* ∩ L⊗Q) / L`.
    pub fn of_pairing(l: &Lattice, c: &arith::IntMatrix) -> Self {
        let s = arith::smith_normal_form(c);
        let diag = s.diagonal();
        let mut factors = Vec::new();
        let mut generators = Vec::new();
        let mut coord_rows = Vec::new();
        for (i, d) in diag.iter().enumerate() {
            if d.is_one() {
                continue;
            }
            factors.push(d.to_u64().expect("invariant factor fits"));
            generators
                .push(s.v.iter().map(|row| BigRational::new(row[i].clone(), d.clone())).collect::<Vec<_>>());
            coord_rows.push(s.v_inv[i].iter().map(|x| x * d).collect());
        }
        let k = factors.len();
        let q: Vec<BigRational> = generators.iter().map(|x| l.inner_rational(x, x)).collect();
        let b: Vec<Vec<BigRational>> =
            (0..k).map(|i| (0..k).map(|j| l.inner_rational(&generators[i], &generators[j])).collect()).collect();
        let den = arith::common_denominator(q.iter().chain(b.iter().flatten())).to_i64().unwrap();
        let num = |r: &BigRational, m: i64| {
            reduce_mod(&(r * BigRational::from_integer(den.into())), m).to_integer().to_i64().unwrap()
        };
        let form = FiniteQuadraticForm {
            factors,
            den,
            q_num: q.iter().map(|r| num(r, 2 * den)).collect(),
            b_num: b.iter().map(|r| r.iter().map(|x| num(x, den)).collect()).collect(),
        };
        DiscriminantGroup { form, generators, coord_rows }
    }

    /// Class in `A_L` of a dual vector.
    pub fn class_of(&self, y: &[BigRational]) -> Result<GroupElement> {
        self.coord_rows
            .iter()
            .zip(self.form.factors())
            .map(|(row, d)| {
                let c: BigRational = row
                    .iter()
                    .zip(y)
                    .fold(BigRational::zero(), |acc, (a, b)| acc + BigRational::from_integer(a.clone()) * b);
                if !c.is_integer() {
                    return Err(Error::NotInDual);
                }
                Ok(c.to_integer().mod_floor(&BigInt::from(*d)).to_i64().unwrap())
            })
            .collect()
    }

    /// A dual vector representing the class.
    pub fn lift(&self, x: &[i64]) -> Vec<BigRational> {
        let r = self.generators.first().map_or(0, |g| g.len());
        let mut out = vec![BigRational::zero(); r];
        for (c, g) in x.iter().zip(&self.generators) {
            for (o, v) in out.iter_mut().zip(g) {
                *o += v * BigInt::from(*c);
            }
        }
        out
    }
}

pub fn discriminant_form(l: &Lattice) -> FiniteQuadraticForm {
    DiscriminantGroup::of(l).form
}

/// Candidate images for each generator of `from` inside `to`.
fn candidates(from: &FiniteQuadraticForm, to: &FiniteQuadraticForm) -> Vec<Vec<GroupElement>> {
    let lcm = from.den.lcm(&to.den);
    let (sf, st) = (lcm / from.den, lcm / to.den);
    let elems = to.elements();
    (0..from.length())
        .map(|i| {
            let g = from.unit(i);
            let target = from.q_num(&g) * sf;
            elems
                .iter()
                .filter(|y| to.element_order(y) == from.factors[i] && to.q_num(y) * st == target)
                .cloned()
                .collect()
        })
        .collect()
}

/// Isometries `from → to`, given as images of the generators of `from`.
/// Stops after `limit` solutions when given.
pub fn find_isometries(
    from: &FiniteQuadraticForm,
    to: &FiniteQuadraticForm,
    limit: Option<usize>,
    bound: u64,
) -> Result<Vec<Vec<GroupElement>>> {
    if from.factors != to.factors {
        return Ok(Vec::new());
    }
    if to.order() > bound {
        return Err(Error::BoundExceeded { order: to.order(), bound });
    }
    let cands = candidates(from, to);
    let lcm = from.den.lcm(&to.den);
    let (sf, st) = (lcm / from.den, lcm / to.den);
    let k = from.length();
    let mut out = Vec::new();
    let mut chosen: Vec<GroupElement> = Vec::with_capacity(k);
    fn rec(
        i: usize,
        k: usize,
        from: &FiniteQuadraticForm,
        to: &FiniteQuadraticForm,
        cands: &[Vec<GroupElement>],
        (sf, st): (i64, i64),
        chosen: &mut Vec<GroupElement>,
        out: &mut Vec<Vec<GroupElement>>,
        limit: Option<usize>,
    ) {
        if limit.is_some_and(|l| out.len() >= l) {
            return;
        }
        if i == k {
            out.push(chosen.clone());
            return;
        }
        let gi = from.unit(i);
        for y in &cands[i] {
            let ok = (0..i).all(|j| from.b_num(&gi, &from.unit(j)) * sf == to.b_num(y, &chosen[j]) * st);
            if ok {
                chosen.push(y.clone());
                rec(i + 1, k, from, to, cands, (sf, st), chosen, out, limit);
                chosen.pop();
            }
        }
    }
    rec(0, k, from, to, &cands, (sf, st), &mut chosen, &mut out, limit);
    Ok(out)
}

/// The orthogonal group `O(q)`, each element given by generator images.
pub fn automorphisms(f: &FiniteQuadraticForm, bound: u64) -> Result<Vec<Vec<GroupElement>>> {
    find_isometries(f, f, None, bound)
}

fn cyclic_equivalent(f1: &FiniteQuadraticForm, f2: &FiniteQuadraticForm, p: u64) -> bool {
    let order = f1.factors[0];
    let g = vec![1];
    // value times the group order is an integer for forms of even lattices
    let scaled = |f: &FiniteQuadraticForm, two_adic: bool| -> Option<BigInt> {
        let v = if two_adic {
            BigRational::new(f.q_num(&g).into(), f.den.into())
        } else {
            f.b(&g, &g)
        };
        let s = v * BigRational::from_integer(order.into());
        s.is_integer().then(|| s.to_integer())
    };
    if p == 2 {
        let (Some(c1), Some(c2)) = (scaled(f1, true), scaled(f2, true)) else {
            return brute_equivalent(f1, f2);
        };
        // q(g) = c/2^a mod 2, generator changes multiply c by odd squares;
        // odd squares mod 2^(a+1) are exactly the residues ≡ 1 mod min(8, 2^(a+1))
        let m = BigInt::from((2 * order).min(8));
        let c1 = c1.mod_floor(&m);
        let c2 = c2.mod_floor(&m);
        if c1.is_even() || c2.is_even() {
            return brute_equivalent(f1, f2);
        }
        let inv = (1..m.to_i64().unwrap()).step_by(2).map(BigInt::from).find(|u| (u * &c2).mod_floor(&m).is_one());
        let ratio = (c1 * inv.unwrap()).mod_floor(&m);
        ratio.is_one()
    } else {
        let (Some(c1), Some(c2)) = (scaled(f1, false), scaled(f2, false)) else {
            return brute_equivalent(f1, f2);
        };
        let c1 = c1.mod_floor(&BigInt::from(p)).to_i64().unwrap();
        let c2 = c2.mod_floor(&BigInt::from(p)).to_i64().unwrap();
        legendre(c1, p) == legendre(c2, p)
    }
}

fn brute_equivalent(f1: &FiniteQuadraticForm, f2: &FiniteQuadraticForm) -> bool {
    find_isometries(f1, f2, Some(1), u64::MAX).map(|v| !v.is_empty()).unwrap_or(false)
}

/// Equivalence of finite quadratic forms, decided prime by prime.
///
/// Cyclic `p`-parts use the square-class criterion; other `p`-parts are
/// compared by exhaustive isomorphism search, limited to groups of order
/// at most `bound`.
pub fn forms_equivalent_with_bound(f1: &FiniteQuadraticForm, f2: &FiniteQuadraticForm, bound: u64) -> Result<bool> {
    if f1.order() != f2.order() {
        return Ok(false);
    }
    for p in numtheory::prime_divisors(f1.order()) {
        let a = f1.p_part(p)?;
        let b = f2.p_part(p)?;
        if a.factors != b.factors {
            return Ok(false);
        }
        let same = if a.length() == 1 {
            cyclic_equivalent(&a, &b, p)
        } else {
            !find_isometries(&a, &b, Some(1), bound)?.is_empty()
        };
        if !same {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn forms_equivalent(f1: &FiniteQuadraticForm, f2: &FiniteQuadraticForm) -> Result<bool> {
    forms_equivalent_with_bound(f1, f2, DEFAULT_BRUTE_FORCE_BOUND)
}

/// Signature plus discriminant form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenusDescriptor {
    pub signature: Signature,
    pub disc: FiniteQuadraticForm,
}

impl GenusDescriptor {
    pub fn of(l: &Lattice) -> Self {
        GenusDescriptor { signature: l.signature(), disc: discriminant_form(l) }
    }

    pub fn same_genus(&self, other: &GenusDescriptor) -> Result<bool> {
        Ok(self.signature == other.signature && forms_equivalent(&self.disc, &other.disc)?)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "signature": [self.signature.plus, self.signature.minus],
            "disc": self.disc.to_json(),
        })
    }
}

/// Whether an even lattice with this signature and discriminant form
/// exists. Decided when the rank exceeds the length; `None` when rank and
/// length coincide and local conditions would be needed.
pub fn genus_exists(sig: Signature, form: &FiniteQuadraticForm) -> Option<bool> {
    let rank = sig.rank();
    if rank < form.length() {
        return Some(false);
    }
    let sigma = (sig.plus as i64 - sig.minus as i64).rem_euclid(8) as u8;
    if sigma != form.signature_mod8() {
        return Some(false);
    }
    if rank > form.length() {
        return Some(true);
    }
    None
}

/// Which sufficient criterion shows a lattice is unique in its genus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GenusCertificate {
    /// Indefinite, rank ≥ 3 and rank ≥ ℓ + 2 (Miranda–Morrison VIII.4.2).
    RankExceedsLength,
    /// A declared hyperbolic-plane summand (Nikulin 1.13.4).
    HyperbolicSummand,
    /// Indefinite, rank ≥ 3 with small 2-adic invariant factors
    /// (Miranda–Morrison VIII.7.8).
    TwoAdicFactors,
}

impl GenusCertificate {
    pub fn tag(&self) -> &'static str {
        match self {
            GenusCertificate::RankExceedsLength => "rank_exceeds_length",
            GenusCertificate::HyperbolicSummand => "hyperbolic_summand",
            GenusCertificate::TwoAdicFactors => "two_adic_factors",
        }
    }
}

pub fn genus_unique_certificate(l: &Lattice) -> Option<GenusCertificate> {
    let sig = l.signature();
    let disc = discriminant_form(l);
    let rank = l.rank();
    if !l.hyperbolic_offsets().is_empty() {
        return Some(GenusCertificate::HyperbolicSummand);
    }
    if sig.is_indefinite() && rank >= 3 && rank >= disc.length() + 2 {
        return Some(GenusCertificate::RankExceedsLength);
    }
    let d = disc.factors();
    let two_adic = (d.len() >= 2 && d[0] == 2 && d[1] == 2)
        || (d.len() >= 3 && d[0] == 2 && d[1] == 4 && d[2] % 8 == 4)
        || (d.len() >= 2 && d[0] == 4 && d[1] == 4);
    if sig.is_indefinite() && rank >= 3 && two_adic {
        return Some(GenusCertificate::TwoAdicFactors);
    }
    None
}
