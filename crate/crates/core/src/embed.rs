//! Primitive embeddings: existence and uniqueness criteria, classification
//! data, overlattices, and bounded searches for special vectors.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::arith;
use crate::discform::{
    automorphisms, genus_exists, DiscriminantGroup, FiniteQuadraticForm, GenusDescriptor, GroupElement,
    DEFAULT_BRUTE_FORCE_BOUND,
};
use crate::error::{Error, Result};
use crate::lattice::{gcd_i64, Lattice, LatticeVector, PrimitiveEmbedding, Signature};
use crate::par::Exec;
use crate::search::{active_coords, search_embeddings, shell_search};

/// Default sup-norm bound for witness searches.
pub const DEFAULT_HEIGHT: u32 = 8;

/// Number of lattice points a single shell search may visit.
const SHELL_BUDGET: u128 = 20_000_000;

/// Heights tried by plain search before the constructive step.
const EAGER_HEIGHT: u32 = 2;
const EAGER_BUDGET: u128 = 2_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Yes,
    No,
    Undetermined,
}

/// Outcome of a semi-decision procedure.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Decision {
    pub verdict: Verdict,
    pub witness: Option<LatticeVector>,
    /// Second vector of a hyperbolic pair.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub partner: Option<LatticeVector>,
    pub obstruction: Option<String>,
    pub bound: Option<u32>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl Decision {
    pub fn yes(witness: LatticeVector) -> Self {
        Decision { verdict: Verdict::Yes, witness: Some(witness), partner: None, obstruction: None, bound: None, notes: vec![] }
    }

    pub fn no(obstruction: impl Into<String>) -> Self {
        Decision {
            verdict: Verdict::No,
            witness: None,
            partner: None,
            obstruction: Some(obstruction.into()),
            bound: None,
            notes: vec![],
        }
    }

    pub fn undetermined(bound: u32) -> Self {
        Decision { verdict: Verdict::Undetermined, witness: None, partner: None, obstruction: None, bound: Some(bound), notes: vec![] }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("decision serializes")
    }
}

fn rat(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

fn rat_vec(v: &[i64]) -> Vec<BigRational> {
    v.iter().map(|&x| rat(x)).collect()
}

fn int_vec(v: &[BigRational]) -> Option<LatticeVector> {
    v.iter().map(|x| if x.is_integer() { x.to_integer().to_i64() } else { None }).collect()
}

/// Columns `G_M·B` for an embedding, as used by [`DiscriminantGroup::of_pairing`].
pub fn pairing_matrix(e: &PrimitiveEmbedding) -> arith::IntMatrix {
    let pv: Vec<Vec<i64>> = e.images.iter().map(|x| e.ambient.pairing_vector(x).expect("image fits")).collect();
    (0..e.ambient.rank()).map(|i| pv.iter().map(|col| BigInt::from(col[i])).collect()).collect()
}

fn identity_embedding(l: &Lattice) -> PrimitiveEmbedding {
    let images = (0..l.rank())
        .map(|i| {
            let mut v = vec![0; l.rank()];
            v[i] = 1;
            v
        })
        .collect();
    PrimitiveEmbedding { source: l.clone(), ambient: l.clone(), images }
}

fn points(dim: usize, h: u32) -> u128 {
    (2 * h as u128 + 1).saturating_pow(dim as u32)
}

/// Search for a primitive `v ∈ L` with `v² = square` and divisibility `div`.
///
/// A vector `v` of square `n` and divisibility `d` gives `v/d ∈ L*` of
/// order `d` in `A_L` with `q(v/d) = n/d²`; if no such class exists the
/// answer is a sound No. Otherwise the answer is Yes as soon as a witness
/// is found, either by enumerating small vectors or by completing a dual
/// vector inside a hyperbolic plane of `L`.
pub fn find_vector(l: &Lattice, square: i64, div: u64, height: u32) -> Decision {
    find_vector_in(&identity_embedding(l), square, div, height)
}

/// Same as [`find_vector`] for vectors of the sublattice `N = e.source`,
/// with divisibility measured in the ambient lattice. The witness is given
/// in ambient coordinates.
pub fn find_vector_in(e: &PrimitiveEmbedding, square: i64, div: u64, height: u32) -> Decision {
    find_vector_with(e, square, div, height, Exec::default())
}

pub fn find_vector_with(e: &PrimitiveEmbedding, square: i64, div: u64, height: u32, exec: Exec) -> Decision {
    if div == 0 {
        return Decision::no("zero_divisibility");
    }
    if square % 2 != 0 {
        return Decision::no("odd_square");
    }
    if square % div as i64 != 0 {
        return Decision::no("divisibility_does_not_divide_square");
    }
    let sig = e.source.signature();
    if (sig.minus == 0 && square <= 0) || (sig.plus == 0 && square >= 0) {
        return Decision::no("square_sign_excluded_by_definiteness");
    }
    let g =DiscriminantGroup::of_pairing(&e.source, &pairing_matrix(e));
    let target = BigRational::new(BigInt::from(square), BigInt::from(div) * BigInt::from(div));
    let classes: Vec<GroupElement> = g
        .form
        .elements()
        .into_iter()
        .filter(|x| g.form.element_order(x) == div && g.form.q_equals(x, &target))
        .collect();
    if classes.is_empty() {
        return Decision::no(format!("no class of order {div} with q = {} mod 2", crate::discform::fmt_rational(&target)));
    }
    let check = |v: &[i64]| -> bool {
        gcd_i64(v) == 1 && e.source.square(v).ok() == Some(square) && {
            let y = e.image_of(v);
            e.ambient.divisibility(&y).ok() == Some(div)
        }
    };
    let coords = if e.source == e.ambient { active_coords(&e.source) } else { (0..e.source.rank()).collect() };
    let shell = |h: u32| -> Option<LatticeVector> {
        shell_search(exec, coords.len(), h as usize, |w| {
            let mut v = vec![0i64; e.source.rank()];
            for (c, x) in coords.iter().zip(w) {
                v[*c] = *x;
            }
            check(&v).then_some(v)
        })
    };
    let mut searched = 0;
    for h in 1..=height.min(EAGER_HEIGHT) {
        if points(coords.len(), h) > EAGER_BUDGET {
            break;
        }
        if let Some(v) = shell(h) {
            return Decision::yes(e.image_of(&v));
        }
        searched = h;
    }
    if let Some(w) = construct_witness(e, &g, &classes[0], square, div) {
        if check(&w) {
            return Decision::yes(e.image_of(&w));
        }
    }
    for h in searched + 1..=height {
        if points(coords.len(), h) > SHELL_BUDGET {
            break;
        }
        if let Some(v) = shell(h) {
            return Decision::yes(e.image_of(&v));
        }
        searched = h;
    }
    Decision::undetermined(searched)
}

/// A hyperbolic pair of `N` in `N`-coordinates: a declared plane of the
/// ambient lying in `N`, else a small search inside `N`.
fn hyperbolic_pair_of(e: &PrimitiveEmbedding) -> Option<(LatticeVector, LatticeVector)> {
    let basis: arith::RatMatrix = (0..e.ambient.rank())
        .map(|i| e.images.iter().map(|v| rat(v[i])).collect())
        .collect();
    let bt = arith::transpose(&basis);
    let normal: arith::RatMatrix =
        bt.iter().map(|r| bt.iter().map(|c| r.iter().zip(c).map(|(a, b)| a * b).sum()).collect()).collect();
    let to_source = |y: &[i64]| {
        let y = rat_vec(y);
        let z = arith::solve_rational(&normal, &arith::rat_mat_vec(&bt, &y))?;
        (arith::rat_mat_vec(&basis, &z) == y).then_some(())?;
        int_vec(&z)
    };
    for o in e.ambient.hyperbolic_offsets() {
        let unit = |i: usize| {
            let mut v = vec![0; e.ambient.rank()];
            v[i] = 1;
            v
        };
        if let (Some(a), Some(b)) = (to_source(&unit(o)), to_source(&unit(o + 1))) {
            return Some((a, b));
        }
    }
    let d = find_hyperbolic_pair(&e.source, EAGER_HEIGHT);
    Some((d.witness?, d.partner?))
}

/// Complete the class `x` to a vector `d(y + e + m f)` with `y ⊥ ⟨e, f⟩`.
fn construct_witness(
    e: &PrimitiveEmbedding,
    g: &DiscriminantGroup,
    x: &[i64],
    square: i64,
    div: u64,
) -> Option<LatticeVector> {
    let (pe, pf) = hyperbolic_pair_of(e)?;
    let n = &e.source;
    let y = g.lift(x);
    let (re, rf) = (rat_vec(&pe), rat_vec(&pf));
    let by_e = n.inner_rational(&y, &re);
    let by_f = n.inner_rational(&y, &rf);
    let y: Vec<BigRational> =
        y.iter().zip(re.iter().zip(&rf)).map(|(a, (u, v))| a - &by_f * u - &by_e * v).collect();
    let d = rat(div as i64);
    let target = rat(square) / (&d * &d);
    let m = (target - n.inner_rational(&y, &y)) / rat(2);
    if !m.is_integer() {
        return None;
    }
    let w: Vec<BigRational> = y.iter().zip(re.iter().zip(&rf)).map(|(a, (u, v))| (a + u + &m * v) * &d).collect();
    int_vec(&w)
}

/// Solve `c·f = 1` for a vector `c` with coprime entries.
fn unit_solution(c: &[i64]) -> Option<LatticeVector> {
    let row: arith::IntMatrix = vec![c.iter().map(|&x| BigInt::from(x)).collect()];
    let s = arith::smith_normal_form(&row);
    let d = s.diagonal();
    if d.first().map(|x| x.abs()) != Some(BigInt::one()) {
        return None;
    }
    // U·c·V = D with D = [±1, 0, …]: f = V e_1 · (U⁻¹ D⁻¹)
    let scale = &s.u[0][0] * &d[0];
    let f: Option<Vec<i64>> = s.v.iter().map(|row| (&row[0] * &scale).to_i64()).collect();
    f.filter(|f| f.iter().zip(c).map(|(a, b)| a * b).sum::<i64>() == 1)
}

/// Complete a primitive isotropic `e` with `div(e) = 1` to a hyperbolic pair.
pub fn complete_hyperbolic_pair(l: &Lattice, e: &[i64]) -> Option<LatticeVector> {
    let c = l.pairing_vector(e).ok()?;
    let f0 = unit_solution(&c)?;
    let k = l.square(&f0).ok()? / 2;
    Some(f0.iter().zip(e).map(|(a, b)| a - k * b).collect())
}

/// Search for `e, f ∈ L` spanning a copy of `U`.
pub fn find_hyperbolic_pair(l: &Lattice, height: u32) -> Decision {
    let sig = l.signature();
    if !sig.is_indefinite() {
        return Decision::no("definite");
    }
    if let Some(&o) = l.hyperbolic_offsets().first() {
        let unit = |i: usize| {
            let mut v = vec![0; l.rank()];
            v[i] = 1;
            v
        };
        let mut d = Decision::yes(unit(o));
        d.partner = Some(unit(o + 1));
        return d;
    }
    let form = crate::discform::discriminant_form(l);
    if form.length() + 2 > l.rank() {
        return Decision::no("length_exceeds_rank_minus_two");
    }
    let rest = Signature::new(sig.plus - 1, sig.minus - 1);
    if genus_exists(rest, &form) == Some(false) {
        return Decision::no("no_complement_genus");
    }
    let coords = active_coords(l);
    let mut searched = 0;
    for h in 1..=height {
        if points(coords.len(), h) > SHELL_BUDGET {
            break;
        }
        let hit = shell_search(Exec::default(), coords.len(), h as usize, |w| {
            let mut v = vec![0i64; l.rank()];
            for (c, x) in coords.iter().zip(w) {
                v[*c] = *x;
            }
            if gcd_i64(&v) != 1 || l.square(&v).ok()? != 0 {
                return None;
            }
            let f = complete_hyperbolic_pair(l, &v)?;
            Some((v, f))
        });
        if let Some((e, f)) = hit {
            let mut d = Decision::yes(e);
            d.partner = Some(f);
            return d;
        }
        searched = h;
    }
    Decision::undetermined(searched)
}

fn splits_hyperbolic_2adic(q2: &FiniteQuadraticForm) -> bool {
    let two: Vec<GroupElement> = q2.elements().into_iter().filter(|x| q2.element_order(x) == 2).collect();
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let zero = BigRational::zero();
    let one = BigRational::one();
    for (i, x) in two.iter().enumerate() {
        for y in &two[i + 1..] {
            if q2.b(x, y) != half {
                continue;
            }
            let (qx, qy) = (q2.q(x), q2.q(y));
            if (qx.value() == &zero && qy.value() == &zero) || (qx.value() == &one && qy.value() == &one) {
                return true;
            }
        }
    }
    false
}

/// Sufficient conditions for a unique primitive embedding of `s` into an
/// even unimodular lattice of signature `ambient`.
pub fn unimodular_embedding_unique(s: &Lattice, ambient: Signature) -> bool {
    let sig = s.signature();
    if sig.plus >= ambient.plus || sig.minus >= ambient.minus {
        return false;
    }
    let gap = ambient.rank() - s.rank();
    let form = crate::discform::discriminant_form(s);
    for p in crate::numtheory::prime_divisors(form.order()) {
        let qp = form.p_part(p).expect("prime");
        let lp = qp.length();
        if p != 2 {
            if gap < 2 + lp {
                return false;
            }
        } else if gap < lp || (gap == lp && !splits_hyperbolic_2adic(&qp)) {
            return false;
        }
    }
    true
}

/// The overlattice of `l` generated by lifts of an isotropic subgroup of
/// `A_l`.
pub fn glue_overlattice(l: &Lattice, h: &[GroupElement]) -> Result<Lattice> {
    let g = DiscriminantGroup::of(l);
    let f = &g.form;
    let span = f.span(h);
    for x in &span {
        if !f.q(x).is_zero() {
            return Err(Error::NotIsotropic(format!("q{x:?} = {}", f.q(x))));
        }
    }
    if span.len() <= 1 {
        return Ok(l.clone());
    }
    let r = l.rank();
    let mut gens: Vec<Vec<BigRational>> = (0..r)
        .map(|i| (0..r).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }).collect())
        .collect();
    gens.extend(h.iter().map(|x| g.lift(x)));
    let den = arith::common_denominator(gens.iter().flatten());
    let scaled: Vec<Vec<BigInt>> = gens.iter().map(|v| v.iter().map(|x| (x * &den).to_integer()).collect()).collect();
    let basis = arith::lattice_basis(&scaled, r);
    let basis: Vec<Vec<BigRational>> =
        basis.iter().map(|v| v.iter().map(|x| BigRational::new(x.clone(), den.clone())).collect()).collect();
    let gram: Option<Vec<Vec<i64>>> = basis
        .iter()
        .map(|u| basis.iter().map(|v| int_vec(&[l.inner_rational(u, v)]).map(|x| x[0])).collect())
        .collect();
    Lattice::new(gram.ok_or_else(|| Error::NonIntegral("overlattice Gram".into()))?)
}

/// Subgroups of a finite quadratic form, each as (generators, elements),
/// with at most `max_order` elements.
pub fn subgroups(f: &FiniteQuadraticForm, max_order: u64) -> Vec<(Vec<GroupElement>, Vec<GroupElement>)> {
    let all: Vec<GroupElement> = f.elements().into_iter().filter(|x| f.element_order(x) <= max_order).collect();
    let key = |els: &[GroupElement]| {
        let mut k: Vec<usize> = els.iter().map(|x| f.index_of(x)).collect();
        k.sort_unstable();
        k
    };
    let zero = vec![f.zero()];
    let mut seen = std::collections::BTreeSet::new();
    seen.insert(key(&zero));
    let mut out = vec![(Vec::new(), zero)];
    let mut i = 0;
    while i < out.len() {
        let (gens, els) = out[i].clone();
        for x in &all {
            if els.contains(x) {
                continue;
            }
            let mut g2 = gens.clone();
            g2.push(x.clone());
            let Some(span) = f.span_bounded(&g2, max_order) else {
                continue;
            };
            if seen.insert(key(&span)) {
                out.push((g2, span));
            }
        }
        i += 1;
    }
    out
}

/// Injective homomorphisms `⟨gens⟩ → to` preserving `q`, as graphs
/// listing `(x, φ(x))` for every element of the source subgroup.
fn form_embeddings(
    from: &FiniteQuadraticForm,
    gens: &[GroupElement],
    to: &FiniteQuadraticForm,
) -> Vec<Vec<(GroupElement, GroupElement)>> {
    let targets = to.elements();
    let mut out = Vec::new();
    let mut graph = vec![(from.zero(), to.zero())];
    extend_graph(from, gens, to, &targets, &mut graph, &mut out);
    out
}

fn extend_graph(
    from: &FiniteQuadraticForm,
    gens: &[GroupElement],
    to: &FiniteQuadraticForm,
    targets: &[GroupElement],
    graph: &mut Vec<(GroupElement, GroupElement)>,
    out: &mut Vec<Vec<(GroupElement, GroupElement)>>,
) {
    let Some((g, rest)) = gens.split_first() else {
        out.push(graph.clone());
        return;
    };
    let ord = from.element_order(g);
    'img: for t in targets {
        if to.element_order(t) != ord || from.q(g) != to.q(t) {
            continue;
        }
        let base = graph.clone();
        let mut next = base.clone();
        for k in 1..ord as i64 {
            let (gk, tk) = (from.scale(k, g), to.scale(k, t));
            for (a, b) in &base {
                let x = from.add(a, &gk);
                let y = to.add(b, &tk);
                match next.iter().find(|(p, _)| *p == x) {
                    Some((_, q)) if *q != y => continue 'img,
                    Some(_) => {}
                    None => {
                        if next.iter().any(|(_, q)| *q == y) || from.q(&x) != to.q(&y) {
                            continue 'img;
                        }
                        next.push((x, y));
                    }
                }
            }
        }
        let saved = std::mem::replace(graph, next);
        extend_graph(from, rest, to, targets, graph, out);
        *graph = saved;
    }
}

/// Canonical key of a glue graph under `O(A_M)`.
fn orbit_key_with(
    fs: &FiniteQuadraticForm,
    fm: &FiniteQuadraticForm,
    auts: &[Vec<GroupElement>],
    graph: &[(GroupElement, GroupElement)],
) -> Vec<(usize, usize)> {
    auts.iter()
        .map(|phi| {
            let mut k: Vec<(usize, usize)> =
                graph.iter().map(|(s, m)| (fs.index_of(s), fm.index_of(&fm.apply(fm, phi, m)))).collect();
            k.sort_unstable();
            k
        })
        .min()
        .unwrap_or_default()
}

/// One class of primitive embeddings `S ↪ M` at the level of
/// discriminant forms.
#[derive(Clone, Debug)]
pub struct EmbeddingData {
    /// Generators of `H_S ⊆ A_S`.
    pub h_s: Vec<GroupElement>,
    /// Their images under `γ`, generating `H_M ⊆ A_M`.
    pub h_m: Vec<GroupElement>,
    /// The full graph of `γ`.
    pub graph: Vec<(GroupElement, GroupElement)>,
    pub complement: GenusDescriptor,
    /// Whether the complement genus is nonempty; `None` when undecided.
    pub complement_exists: Option<bool>,
    /// Canonical `O(A_M)`-orbit key.
    pub key: Vec<(usize, usize)>,
}

impl EmbeddingData {
    /// `|H_S|`; for a rank-one source this is the divisibility of the
    /// generator in `M`.
    pub fn glue_order(&self) -> usize {
        self.graph.len()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "h_s": self.h_s,
            "h_m": self.h_m,
            "glue_order": self.glue_order(),
            "complement": self.complement.to_json(),
            "complement_exists": self.complement_exists,
        })
    }
}

/// Discriminant form of the complement for a glue graph.
fn complement_form(
    fs: &FiniteQuadraticForm,
    fm: &FiniteQuadraticForm,
    graph: &[(GroupElement, GroupElement)],
) -> Result<FiniteQuadraticForm> {
    let sum = fs.orthogonal_sum_raw(&fm.negate());
    let gamma: Vec<GroupElement> = graph
        .iter()
        .map(|(s, m)| {
            let mut v = s.clone();
            v.extend(m);
            v
        })
        .collect();
    let perp = sum.generators_of(&sum.orthogonal_of(&gamma));
    let (delta, _) = sum.subquotient(&perp, &sum.generators_of(&gamma))?;
    Ok(delta.negate())
}

/// All `O(A_M)`-classes of glue data `(H_S, H_M, γ)` whose complement
/// genus is not known to be empty.
pub fn enumerate_embedding_data(s: &Lattice, m: &Lattice) -> Result<Vec<EmbeddingData>> {
    let fs = crate::discform::discriminant_form(s);
    let fm = crate::discform::discriminant_form(m);
    let size = fs.order().saturating_mul(fm.order());
    if size > DEFAULT_BRUTE_FORCE_BOUND * 10 {
        return Err(Error::BoundExceeded { order: size, bound: DEFAULT_BRUTE_FORCE_BOUND * 10 });
    }
    let Some(sig) = m.signature().checked_sub(&s.signature()) else {
        return Ok(Vec::new());
    };
    let auts = automorphisms(&fm, DEFAULT_BRUTE_FORCE_BOUND)?;
    let mut seen = std::collections::BTreeSet::new();
    let mut out = Vec::new();
    for (gens, _) in subgroups(&fs, fm.order()) {
        for graph in form_embeddings(&fs, &gens, &fm) {
            let key = orbit_key_with(&fs, &fm, &auts, &graph);
            if !seen.insert(key.clone()) {
                continue;
            }
            let disc = complement_form(&fs, &fm, &graph)?;
            let exists = genus_exists(sig, &disc);
            if exists == Some(false) {
                continue;
            }
            let h_m = gens.iter().map(|g| graph.iter().find(|(x, _)| x == g).unwrap().1.clone()).collect();
            out.push(EmbeddingData {
                h_s: gens.clone(),
                h_m,
                graph,
                complement: GenusDescriptor { signature: sig, disc },
                complement_exists: exists,
                key,
            });
        }
    }
    Ok(out)
}

/// The glue graph `{(s, m)}` of an explicit embedding: `s ∈ A_S` and
/// `m ∈ A_M` are the classes of the same vector of `M* ∩ S⊗Q`.
pub fn glue_data(e: &PrimitiveEmbedding) -> Result<Vec<(GroupElement, GroupElement)>> {
    let h = DiscriminantGroup::of_pairing(&e.source, &pairing_matrix(e));
    let gs = DiscriminantGroup::of(&e.source);
    let gm = DiscriminantGroup::of(&e.ambient);
    let mut out = Vec::new();
    for x in h.form.elements() {
        let z = h.lift(&x);
        let y: Vec<BigRational> = (0..e.ambient.rank())
            .map(|i| z.iter().zip(&e.images).fold(BigRational::zero(), |acc, (c, v)| acc + c * rat(v[i])))
            .collect();
        out.push((gs.class_of(&z)?, gm.class_of(&y)?));
    }
    let (fs, fm) = (&gs.form, &gm.form);
    out.iter_mut().for_each(|(s, m)| {
        *s = fs.reduce(s);
        *m = fm.reduce(m);
    });
    Ok(out)
}

/// Canonical `O(A_M)`-orbit key of an explicit embedding, comparable with
/// [`EmbeddingData::key`].
pub fn orbit_key(e: &PrimitiveEmbedding) -> Result<Vec<(usize, usize)>> {
    let fs = crate::discform::discriminant_form(&e.source);
    let fm = crate::discform::discriminant_form(&e.ambient);
    let auts = automorphisms(&fm, DEFAULT_BRUTE_FORCE_BOUND)?;
    Ok(orbit_key_with(&fs, &fm, &auts, &glue_data(e)?))
}

/// Search for an explicit embedding realizing the given glue data.
pub fn realize_embedding_data(
    s: &Lattice,
    m: &Lattice,
    data: &EmbeddingData,
    height: u32,
) -> Result<Option<PrimitiveEmbedding>> {
    let fs = crate::discform::discriminant_form(s);
    let fm = crate::discform::discriminant_form(m);
    let auts = automorphisms(&fm, DEFAULT_BRUTE_FORCE_BOUND)?;
    let mut found = None;
    let mut err = None;
    search_embeddings(s, m, height, &mut |e| match glue_data(&e) {
        Ok(g) if orbit_key_with(&fs, &fm, &auts, &g) == data.key => {
            found = Some(e);
            true
        }
        Ok(_) => false,
        Err(x) => {
            err = Some(x);
            true
        }
    })?;
    match err {
        Some(x) => Err(x),
        None => Ok(found),
    }
}
