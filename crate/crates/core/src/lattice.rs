//! Even nondegenerate integral lattices given by Gram matrices.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{self, IntMatrix};
use crate::error::{Error, Result};

/// Coordinates of a vector in the basis of some lattice.
pub type LatticeVector = Vec<i64>;

/// A summand recorded when a lattice is assembled from named pieces.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SummandKind {
    Hyperbolic,
    A(usize),
    D(usize),
    E(usize),
    Diagonal(i64),
    Raw,
}

impl SummandKind {
    pub fn is_unimodular(&self) -> bool {
        matches!(self, SummandKind::Hyperbolic | SummandKind::E(8))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summand {
    pub kind: SummandKind,
    pub scale: i64,
    pub offset: usize,
    pub len: usize,
}

impl Summand {
    pub fn is_plain(&self, kind: &SummandKind) -> bool {
        self.scale == 1 && &self.kind == kind
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Signature {
    pub plus: usize,
    pub minus: usize,
}

impl Signature {
    pub fn new(plus: usize, minus: usize) -> Self {
        Signature { plus, minus }
    }

    pub fn rank(&self) -> usize {
        self.plus + self.minus
    }

    pub fn is_indefinite(&self) -> bool {
        self.plus > 0 && self.minus > 0
    }

    /// Componentwise difference, `None` if it would be negative.
    pub fn checked_sub(&self, other: &Signature) -> Option<Signature> {
        Some(Signature { plus: self.plus.checked_sub(other.plus)?, minus: self.minus.checked_sub(other.minus)? })
    }
}

impl std::ops::Add for Signature {
    type Output = Signature;
    fn add(self, o: Signature) -> Signature {
        Signature { plus: self.plus + o.plus, minus: self.minus + o.minus }
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.plus, self.minus)
    }
}

/// An even, nondegenerate, symmetric integral bilinear form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lattice {
    gram: Vec<Vec<i64>>,
    label: Option<String>,
    summands: Vec<Summand>,
}

impl Lattice {
    pub fn new(gram: Vec<Vec<i64>>) -> Result<Self> {
        let n = gram.len();
        if n == 0 || gram.iter().any(|r| r.len() != n) {
            return Err(Error::NotSquare);
        }
        for i in 0..n {
            for j in 0..i {
                if gram[i][j] != gram[j][i] {
                    return Err(Error::NotSymmetric);
                }
            }
            if gram[i][i] % 2 != 0 {
                return Err(Error::NotEven { index: i, value: gram[i][i] });
            }
        }
        if arith::determinant(&arith::from_i64(&gram)).is_zero() {
            return Err(Error::Degenerate);
        }
        let summands = vec![Summand { kind: SummandKind::Raw, scale: 1, offset: 0, len: n }];
        Ok(Lattice { gram, label: None, summands })
    }

    /// Hyperbolic plane with Gram `[[0,1],[1,0]]`.
    pub fn hyperbolic() -> Self {
        Self::named(vec![vec![0, 1], vec![1, 0]], SummandKind::Hyperbolic, "U")
    }

    /// Rank-one lattice `<k>`.
    pub fn diagonal(k: i64) -> Result<Self> {
        let mut l = Self::new(vec![vec![k]])?;
        l.summands[0].kind = SummandKind::Diagonal(k);
        l.label = Some(format!("<{k}>"));
        Ok(l)
    }

    /// Negative definite root lattice `A_n`, `D_n` or `E_n`.
    pub fn root(family: char, n: usize) -> Result<Self> {
        let (edges, kind): (Vec<(usize, usize)>, SummandKind) = match family {
            'A' if n >= 1 => ((1..n).map(|i| (i - 1, i)).collect(), SummandKind::A(n)),
            // d_2 - d_3 - ... - d_n with d_1 attached to d_3
            'D' if n >= 4 => {
                let mut e: Vec<_> = (2..n).map(|i| (i - 1, i)).collect();
                e.push((0, 2));
                (e, SummandKind::D(n))
            }
            // e_2 - e_3 - ... - e_n with e_1 attached to e_4
            'E' if (6..=8).contains(&n) => {
                let mut e: Vec<_> = (2..n).map(|i| (i - 1, i)).collect();
                e.push((0, 3));
                (e, SummandKind::E(n))
            }
            _ => return Err(Error::Precondition(format!("no root lattice {family}{n}"))),
        };
        let mut g = vec![vec![0i64; n]; n];
        for (i, row) in g.iter_mut().enumerate() {
            row[i] = -2;
        }
        for (i, j) in edges {
            g[i][j] = 1;
            g[j][i] = 1;
        }
        Ok(Self::named(g, kind, &format!("{family}{n}")))
    }

    fn named(gram: Vec<Vec<i64>>, kind: SummandKind, label: &str) -> Self {
        let len = gram.len();
        Lattice { gram, label: Some(label.to_string()), summands: vec![Summand { kind, scale: 1, offset: 0, len }] }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn rank(&self) -> usize {
        self.gram.len()
    }

    pub fn gram(&self) -> &[Vec<i64>] {
        &self.gram
    }

    pub fn gram_big(&self) -> IntMatrix {
        arith::from_i64(&self.gram)
    }

    pub fn entry(&self, i: usize, j: usize) -> i64 {
        self.gram[i][j]
    }

    pub fn summands(&self) -> &[Summand] {
        &self.summands
    }

    /// Offsets of declared (unscaled) hyperbolic-plane summands.
    pub fn hyperbolic_offsets(&self) -> Vec<usize> {
        self.summands.iter().filter(|s| s.is_plain(&SummandKind::Hyperbolic)).map(|s| s.offset).collect()
    }

    pub fn determinant(&self) -> BigInt {
        arith::determinant(&self.gram_big())
    }

    /// |det| as u64; lattices in this crate always have small discriminant.
    pub fn abs_det(&self) -> u64 {
        use num_traits::ToPrimitive;
        self.determinant().abs().to_u64().expect("determinant fits in u64")
    }

    fn check_dim(&self, x: &[i64]) -> Result<()> {
        if x.len() != self.rank() {
            return Err(Error::DimensionMismatch { expected: self.rank(), got: x.len() });
        }
        Ok(())
    }

    pub fn inner(&self, x: &[i64], y: &[i64]) -> Result<i64> {
        self.check_dim(x)?;
        self.check_dim(y)?;
        let mut acc: i128 = 0;
        for i in 0..x.len() {
            if x[i] == 0 {
                continue;
            }
            let mut row: i128 = 0;
            for j in 0..y.len() {
                row += self.gram[i][j] as i128 * y[j] as i128;
            }
            acc += x[i] as i128 * row;
        }
        i64::try_from(acc).map_err(|_| Error::Overflow("inner product"))
    }

    pub fn square(&self, x: &[i64]) -> Result<i64> {
        self.inner(x, x)
    }

    /// `gram * x`.
    pub fn pairing_vector(&self, x: &[i64]) -> Result<Vec<i64>> {
        self.check_dim(x)?;
        self.gram
            .iter()
            .map(|row| {
                let s: i128 = row.iter().zip(x).map(|(a, b)| *a as i128 * *b as i128).sum();
                i64::try_from(s).map_err(|_| Error::Overflow("pairing"))
            })
            .collect()
    }

    /// Rational bilinear form on `L ⊗ Q`.
    pub fn inner_rational(&self, x: &[BigRational], y: &[BigRational]) -> BigRational {
        let mut acc = BigRational::zero();
        for i in 0..x.len() {
            if x[i].is_zero() {
                continue;
            }
            let mut row = BigRational::zero();
            for j in 0..y.len() {
                if self.gram[i][j] != 0 && !y[j].is_zero() {
                    row += &y[j] * BigInt::from(self.gram[i][j]);
                }
            }
            acc += &x[i] * row;
        }
        acc
    }

    /// Exact signature by symmetric elimination over Q.
    ///
    /// A zero diagonal pivot is repaired by a congruence (swap with a nonzero
    /// diagonal entry, or add a row/column with a nonzero off-diagonal entry);
    /// a trailing block that is identically zero cannot occur for a
    /// nondegenerate form.
    pub fn signature(&self) -> Signature {
        let n = self.rank();
        let mut a = arith::to_rational(&self.gram_big());
        let (mut plus, mut minus) = (0, 0);
        for k in 0..n {
            if a[k][k].is_zero() {
                if let Some(j) = (k + 1..n).find(|&j| !a[j][j].is_zero()) {
                    a.swap(k, j);
                    for row in a.iter_mut() {
                        row.swap(k, j);
                    }
                } else if let Some(j) = (k + 1..n).find(|&j| !a[k][j].is_zero()) {
                    // row_k += row_j, col_k += col_j: new a_kk = 2 a_kj
                    for c in 0..n {
                        let t = a[j][c].clone();
                        a[k][c] += t;
                    }
                    for row in a.iter_mut() {
                        let t = row[j].clone();
                        row[k] += t;
                    }
                } else {
                    unreachable!("nondegenerate form has no zero row");
                }
            }
            let p = a[k][k].clone();
            if p.is_positive() {
                plus += 1;
            } else {
                minus += 1;
            }
            for i in k + 1..n {
                if a[i][k].is_zero() {
                    continue;
                }
                let f = &a[i][k] / &p;
                for j in k..n {
                    let t = &f * &a[k][j];
                    a[i][j] -= t;
                }
            }
            for i in k + 1..n {
                a[k][i] = BigRational::zero();
                a[i][k] = BigRational::zero();
            }
        }
        Signature { plus, minus }
    }

    /// gcd of the pairings of a primitive vector with the whole lattice.
    pub fn divisibility(&self, s: &[i64]) -> Result<u64> {
        self.check_dim(s)?;
        let g = gcd_i64(s);
        if g == 0 {
            return Err(Error::ZeroVector);
        }
        if g != 1 {
            return Err(Error::Imprimitive(g.to_string()));
        }
        Ok(gcd_i64(&self.pairing_vector(s)?))
    }

    pub fn direct_sum(parts: &[Lattice]) -> Lattice {
        let n: usize = parts.iter().map(|p| p.rank()).sum();
        let mut gram = vec![vec![0i64; n]; n];
        let mut summands = Vec::new();
        let mut off = 0;
        let mut labels = Vec::new();
        for p in parts {
            for i in 0..p.rank() {
                for j in 0..p.rank() {
                    gram[off + i][off + j] = p.gram[i][j];
                }
            }
            summands.extend(p.summands.iter().map(|s| Summand { offset: s.offset + off, ..s.clone() }));
            labels.push(p.label.clone().unwrap_or_else(|| "[..]".into()));
            off += p.rank();
        }
        Lattice { gram, label: Some(labels.join(" + ")), summands }
    }

    pub fn rescale(&self, k: i64) -> Result<Lattice> {
        if k == 0 {
            return Err(Error::Precondition("rescale factor must be nonzero".into()));
        }
        if k == 1 {
            return Ok(self.clone());
        }
        let gram = self.gram.iter().map(|r| r.iter().map(|x| x * k).collect()).collect();
        Ok(Lattice {
            gram,
            label: self.label.as_ref().map(|l| format!("({l})({k})")),
            summands: self.summands.iter().map(|s| Summand { scale: s.scale * k, ..s.clone() }).collect(),
        })
    }

    /// Saturated orthogonal complement of the span of `vs`.
    ///
    /// Returns the complement as a lattice together with its primitive
    /// embedding (basis coordinates) into `self`.
    pub fn orthogonal_complement(&self, vs: &[LatticeVector]) -> Result<(Lattice, PrimitiveEmbedding)> {
        for v in vs {
            self.check_dim(v)?;
        }
        let span_gram: Vec<Vec<i64>> =
            vs.iter().map(|x| vs.iter().map(|y| self.inner(x, y)).collect::<Result<Vec<_>>>()).collect::<Result<_>>()?;
        if vs.is_empty() || arith::determinant(&arith::from_i64(&span_gram)).is_zero() {
            return Err(Error::Degenerate);
        }
        let rows: IntMatrix = vs
            .iter()
            .map(|v| self.pairing_vector(v).map(|p| p.into_iter().map(BigInt::from).collect()))
            .collect::<Result<_>>()?;
        let kernel = arith::integer_kernel(&rows, self.rank());
        let images: Vec<LatticeVector> = kernel.iter().map(|k| big_to_i64(k)).collect::<Result<_>>()?;
        if images.is_empty() {
            return Err(Error::Precondition("complement is zero".into()));
        }
        let gram: Vec<Vec<i64>> = images
            .iter()
            .map(|x| images.iter().map(|y| self.inner(x, y)).collect::<Result<Vec<_>>>())
            .collect::<Result<_>>()?;
        let comp = Lattice::new(gram)?;
        let emb = PrimitiveEmbedding::new(comp.clone(), self.clone(), images)?;
        Ok((comp, emb))
    }

    /// Gram of an arbitrary family of vectors.
    pub fn gram_of(&self, vs: &[LatticeVector]) -> Result<Vec<Vec<i64>>> {
        vs.iter().map(|x| vs.iter().map(|y| self.inner(x, y)).collect()).collect()
    }
}

impl fmt::Display for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> =
            self.gram.iter().map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")).collect();
        write!(f, "[{}]", rows.join(";"))
    }
}

pub fn gcd_i64(xs: &[i64]) -> u64 {
    xs.iter().fold(0u64, |g, &x| g.gcd(&x.unsigned_abs()))
}

pub(crate) fn big_to_i64(v: &[BigInt]) -> Result<Vec<i64>> {
    use num_traits::ToPrimitive;
    v.iter().map(|x| x.to_i64().ok_or(Error::Overflow("coordinate"))).collect()
}

/// A primitive isometric embedding of `source` into `ambient`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimitiveEmbedding {
    pub source: Lattice,
    pub ambient: Lattice,
    /// Ambient coordinates of the images of the source basis.
    pub images: Vec<LatticeVector>,
}

impl PrimitiveEmbedding {
    pub fn new(source: Lattice, ambient: Lattice, images: Vec<LatticeVector>) -> Result<Self> {
        if images.len() != source.rank() {
            return Err(Error::DimensionMismatch { expected: source.rank(), got: images.len() });
        }
        for v in &images {
            ambient.check_dim(v)?;
        }
        if ambient.gram_of(&images)? != source.gram {
            return Err(Error::InvalidEmbedding("image Gram differs from source Gram".into()));
        }
        if !is_saturated(&images) {
            return Err(Error::InvalidEmbedding("image is not primitive".into()));
        }
        Ok(PrimitiveEmbedding { source, ambient, images })
    }

    /// Ambient coordinates of the image of a source vector.
    pub fn image_of(&self, x: &[i64]) -> LatticeVector {
        let mut out = vec![0i64; self.ambient.rank()];
        for (c, img) in x.iter().zip(&self.images) {
            if *c != 0 {
                for (o, v) in out.iter_mut().zip(img) {
                    *o += c * v;
                }
            }
        }
        out
    }

    /// Orthogonal complement of the image in the ambient lattice.
    pub fn complement(&self) -> Result<(Lattice, PrimitiveEmbedding)> {
        self.ambient.orthogonal_complement(&self.images)
    }

    /// Divisibility of the image of a source vector in the ambient lattice.
    pub fn ambient_divisibility(&self, x: &[i64]) -> Result<u64> {
        self.ambient.divisibility(&self.image_of(x))
    }
}

/// A family of integer vectors spans a saturated sublattice iff the
/// elementary divisors of its coordinate matrix are all 1.
pub fn is_saturated(vs: &[LatticeVector]) -> bool {
    if vs.is_empty() {
        return true;
    }
    let m: IntMatrix = vs.iter().map(|v| v.iter().map(|&x| BigInt::from(x)).collect()).collect();
    let s = arith::smith_normal_form(&m);
    let d = s.diagonal();
    d.len() == vs.len() && d.iter().all(|x| x.is_one())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_lattice_expr;

    #[test]
    fn inner_products() {
        let u = Lattice::hyperbolic();
        assert_eq!(u.inner(&[1, 0], &[0, 1]).unwrap(), 1);
        let a2 = Lattice::root('A', 2).unwrap();
        assert_eq!(a2.inner(&[1, 2], &[1, 2]).unwrap(), -6);
        assert_eq!(a2.inner(&[1, 2], &[0, 0]).unwrap(), 0);
        assert!(matches!(a2.inner(&[1], &[1, 2]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn signatures_of_table_lattices() {
        let og6 = parse_lattice_expr("U^3 + <-2>^2").unwrap();
        assert_eq!(og6.signature(), Signature::new(3, 5));
        let og10 = parse_lattice_expr("U^3 + E8^2 + A2").unwrap();
        assert_eq!(og10.signature(), Signature::new(3, 21));
        assert_eq!(Lattice::diagonal(6).unwrap().signature(), Signature::new(1, 0));
    }

    #[test]
    fn divisibility_examples() {
        let og6 = parse_lattice_expr("U^3 + <-2>^2").unwrap();
        assert_eq!(og6.divisibility(&[0, 0, 0, 0, 0, 0, 1, 0]).unwrap(), 2);
        assert_eq!(og6.divisibility(&[1, -1, 0, 0, 0, 0, 0, 0]).unwrap(), 1);
        let og10 = parse_lattice_expr("U^3 + E8^2 + A2").unwrap();
        let mut s = vec![0; 24];
        s[0] = 1;
        s[1] = -3;
        assert_eq!(og10.divisibility(&s).unwrap(), 1);
        assert_eq!(og10.square(&s).unwrap(), -6);
        assert_eq!(og6.divisibility(&[0; 8]), Err(Error::ZeroVector));
        assert!(matches!(og6.divisibility(&[2, 0, 0, 0, 0, 0, 0, 0]), Err(Error::Imprimitive(_))));
    }

    #[test]
    fn complement_examples() {
        let og6 = parse_lattice_expr("U^3 + <-2>^2").unwrap();
        // <u1,u2,v1,v2,a+b>
        let vs = vec![
            vec![1, 0, 0, 0, 0, 0, 0, 0],
            vec![0, 1, 0, 0, 0, 0, 0, 0],
            vec![0, 0, 1, 0, 0, 0, 0, 0],
            vec![0, 0, 0, 1, 0, 0, 0, 0],
            vec![0, 0, 0, 0, 0, 0, 1, 1],
        ];
        let (c, emb) = og6.orthogonal_complement(&vs).unwrap();
        assert_eq!(c.rank(), 3);
        assert_eq!(c.signature(), Signature::new(1, 2));
        assert_eq!(c.abs_det(), 4);
        for img in &emb.images {
            for v in &vs {
                assert_eq!(og6.inner(img, v).unwrap(), 0);
            }
        }
        let u3 = parse_lattice_expr("U^3").unwrap();
        let (c, _) = u3.orthogonal_complement(&[vec![1, 0, 0, 0, 0, 0], vec![0, 1, 0, 0, 0, 0]]).unwrap();
        assert_eq!(c.rank(), 4);
        assert_eq!(c.abs_det(), 1);
        assert_eq!(c.signature(), Signature::new(2, 2));
        assert_eq!(og6.orthogonal_complement(&[vec![1, 0, 0, 0, 0, 0, 0, 0]]).unwrap_err(), Error::Degenerate);
    }

    #[test]
    fn sums_and_rescaling() {
        let l = Lattice::direct_sum(&[Lattice::hyperbolic(), Lattice::diagonal(-2).unwrap()]);
        assert_eq!(l.gram(), &[vec![0, 1, 0], vec![1, 0, 0], vec![0, 0, -2]]);
        assert_eq!(Lattice::hyperbolic().rescale(2).unwrap().gram(), &[vec![0, 2], vec![2, 0]]);
        assert_eq!(l.rescale(1).unwrap(), l);
        assert_eq!(l.hyperbolic_offsets(), vec![0]);
        assert!(Lattice::hyperbolic().rescale(2).unwrap().hyperbolic_offsets().is_empty());
    }

    #[test]
    fn rejects_bad_grams() {
        assert_eq!(Lattice::new(vec![vec![1]]).unwrap_err(), Error::NotEven { index: 0, value: 1 });
        assert_eq!(Lattice::new(vec![vec![0]]).unwrap_err(), Error::Degenerate);
        assert_eq!(Lattice::new(vec![vec![2, 1], vec![0, 2]]).unwrap_err(), Error::NotSymmetric);
    }
}
