//! Bounded enumeration of integer vectors and explicit embedding search.
//!
//! Vectors are visited shell by shell in the sup norm. Inside a shell the
//! order is colexicographic on value indices `0, 1, -1, 2, -2, …` with the
//! first coordinate varying fastest; every search in the crate uses this
//! order, so "first witness" is well defined and independent of threading.

use crate::error::Result;
use crate::lattice::{is_saturated, Lattice, LatticeVector, PrimitiveEmbedding, SummandKind};
use crate::par::{par_find_first, Exec};

pub(crate) fn value_at(i: usize) -> i64 {
    let k = i.div_ceil(2) as i64;
    if i % 2 == 1 {
        k
    } else {
        -k
    }
}

/// Visit the vectors of `Z^dim` with sup norm exactly `h`. When `last` is
/// given, the last (slowest) coordinate is pinned to that value index.
pub(crate) fn shell_find<R>(
    dim: usize,
    h: usize,
    last: Option<usize>,
    f: &mut dyn FnMut(&[i64]) -> Option<R>,
) -> Option<R> {
    if dim == 0 {
        return if h == 0 { f(&[]) } else { None };
    }
    let top = 2 * h;
    let mut idx = vec![0usize; dim];
    let free = if last.is_some() { dim - 1 } else { dim };
    if let Some(l) = last {
        idx[dim - 1] = l;
    }
    let mut v: Vec<i64> = idx.iter().map(|&i| value_at(i)).collect();
    loop {
        if h == 0 || v.iter().any(|x| x.unsigned_abs() as usize == h) {
            if let Some(r) = f(&v) {
                return Some(r);
            }
        }
        let mut k = 0;
        loop {
            if k == free {
                return None;
            }
            if idx[k] < top {
                idx[k] += 1;
                v[k] = value_at(idx[k]);
                break;
            }
            idx[k] = 0;
            v[k] = 0;
            k += 1;
        }
    }
}

/// First hit in a shell, splitting the work on the slowest coordinate.
pub(crate) fn shell_search<R, F>(exec: Exec, dim: usize, h: usize, f: F) -> Option<R>
where
    R: Send,
    F: Fn(&[i64]) -> Option<R> + Sync + Send,
{
    if dim == 0 {
        return if h == 0 { f(&[]) } else { None };
    }
    let chunks: Vec<usize> = (0..=2 * h).collect();
    par_find_first(exec, &chunks, |&c| shell_find(dim, h, Some(c), &mut |v| f(v)))
}

/// Coordinates of a lattice grouped by declared unimodular blocks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct BlockLayout {
    pub u: Vec<usize>,
    pub e8: Vec<usize>,
    pub rest: Vec<usize>,
}

pub(crate) fn layout(l: &Lattice) -> BlockLayout {
    let mut out = BlockLayout { u: Vec::new(), e8: Vec::new(), rest: Vec::new() };
    for s in l.summands() {
        if s.is_plain(&SummandKind::Hyperbolic) {
            out.u.push(s.offset);
        } else if s.is_plain(&SummandKind::E(8)) {
            out.e8.push(s.offset);
        } else {
            out.rest.extend(s.offset..s.offset + s.len);
        }
    }
    out
}

/// Coordinates used by witness searches: everything outside declared
/// `E8` blocks.
pub(crate) fn active_coords(l: &Lattice) -> Vec<usize> {
    let lay = layout(l);
    (0..l.rank()).filter(|i| !lay.e8.iter().any(|o| (*o..*o + 8).contains(i))).collect()
}

/// Pairs `(p, q)` with `p·q = t` and both entries bounded by `h`.
fn divisor_pairs(t: i64, h: u64) -> Vec<(i64, i64)> {
    let mut out = Vec::new();
    if t == 0 {
        out.push((0, 0));
        for i in 1..=2 * h as usize {
            out.push((value_at(i), 0));
            out.push((0, value_at(i)));
        }
    } else {
        let a = t.unsigned_abs();
        let mut p = 1u64;
        while p * p <= a {
            if a % p == 0 {
                for d in [p, a / p] {
                    for s in [1i64, -1] {
                        let x = s * d as i64;
                        if !out.contains(&(x, t / x)) {
                            out.push((x, t / x));
                        }
                    }
                }
            }
            p += 1;
        }
    }
    out.retain(|&(p, q)| p.unsigned_abs() <= h && q.unsigned_abs() <= h);
    let rank = |x: i64| if x > 0 { 2 * x - 1 } else { -2 * x };
    out.sort_by_key(|&(p, q)| (p.abs().max(q.abs()), rank(p), rank(q)));
    out
}

struct EmbedSearch<'a> {
    s: &'a Lattice,
    m: &'a Lattice,
    generic: Vec<usize>,
    fixed: Vec<Option<LatticeVector>>,
    free_u: Vec<usize>,
    rest: Vec<usize>,
    height: usize,
}

impl EmbedSearch<'_> {
    fn level_blocks(&self, i: usize) -> (Vec<usize>, Option<usize>) {
        let nf = self.free_u.len();
        let boxed_u = &self.free_u[..i.min(nf)];
        let mut coords = self.rest.clone();
        coords.extend(boxed_u.iter().flat_map(|&o| [o, o + 1]));
        (coords, self.free_u.get(i).copied())
    }

    fn target(&self, i: usize, j: usize) -> i64 {
        self.s.entry(self.generic[i], self.generic[j])
    }

    /// Depth-first search over levels; `size` tracks the sup norm of the
    /// partial tuple so that each tuple is reported at exactly one height.
    fn dfs(
        &self,
        h: usize,
        level: usize,
        chosen: &mut Vec<(LatticeVector, Vec<i64>)>,
        size: usize,
        visit: &mut dyn FnMut(PrimitiveEmbedding) -> bool,
    ) -> bool {
        if level == self.generic.len() {
            if size != h && !(h == 1 && size == 0) {
                return false;
            }
            let mut images = self.fixed.clone();
            for (g, (x, _)) in self.generic.iter().zip(chosen.iter()) {
                images[*g] = Some(x.clone());
            }
            let images: Vec<LatticeVector> = images.into_iter().map(|x| x.unwrap()).collect();
            if !is_saturated(&images) {
                return false;
            }
            return match PrimitiveEmbedding::new(self.s.clone(), self.m.clone(), images) {
                Ok(e) => visit(e),
                Err(_) => false,
            };
        }
        let (coords, solve) = self.level_blocks(level);
        let n = self.target(level, level);
        let rank_m = self.m.rank();
        for hs in 0..=h {
            let stop = shell_find(coords.len(), hs, None, &mut |w: &[i64]| {
                let mut x = vec![0i64; rank_m];
                for (c, v) in coords.iter().zip(w) {
                    x[*c] = *v;
                }
                for (j, (_, pv)) in chosen.iter().enumerate() {
                    let b: i64 = coords.iter().zip(w).map(|(c, v)| pv[*c] * v).sum();
                    if b != self.target(level, j) {
                        return None;
                    }
                }
                let qw = self.m.square(&x).ok()?;
                let sols: Vec<(i64, i64)> = match solve {
                    Some(_) => {
                        let rem = n - qw;
                        if rem % 2 != 0 {
                            return None;
                        }
                        divisor_pairs(rem / 2, h as u64)
                    }
                    None if qw == n => vec![(0, 0)],
                    None => return None,
                };
                for (p, q) in sols {
                    let extra = p.unsigned_abs().max(q.unsigned_abs()) as usize;
                    if let Some(o) = solve {
                        x[o] = p;
                        x[o + 1] = q;
                    }
                    let pv = self.m.pairing_vector(&x).ok()?;
                    chosen.push((x.clone(), pv));
                    let done = self.dfs(h, level + 1, chosen, size.max(hs).max(extra), visit);
                    chosen.pop();
                    if done {
                        return Some(());
                    }
                }
                None
            });
            if stop.is_some() {
                return true;
            }
        }
        false
    }
}

/// Enumerate primitive embeddings `S → M` found by bounded search.
///
/// Declared `U` and `E8` summands of `S` are sent to unused blocks of the
/// same type in `M`. The remaining basis vectors are placed one at a
/// time: the i-th one ranges over a box on the first i unused hyperbolic
/// planes of `M` plus the non-unimodular coordinates, and its component in
/// the next unused plane is solved from the required square. `visit`
/// returns `true` to stop.
pub fn search_embeddings(
    s: &Lattice,
    m: &Lattice,
    height: u32,
    visit: &mut dyn FnMut(PrimitiveEmbedding) -> bool,
) -> Result<()> {
    let ls = layout(s);
    let lm = layout(m);
    let mut fixed: Vec<Option<LatticeVector>> = vec![None; s.rank()];
    let mut free_u = lm.u.clone();
    let mut free_e8 = lm.e8.clone();
    let mut generic = ls.rest.clone();
    let unit = |i: usize| {
        let mut v = vec![0i64; m.rank()];
        v[i] = 1;
        v
    };
    for o in &ls.u {
        if free_u.is_empty() {
            generic.extend([*o, *o + 1]);
        } else {
            let p = free_u.remove(0);
            fixed[*o] = Some(unit(p));
            fixed[*o + 1] = Some(unit(p + 1));
        }
    }
    for o in &ls.e8 {
        if free_e8.is_empty() {
            generic.extend(*o..*o + 8);
        } else {
            let p = free_e8.remove(0);
            for k in 0..8 {
                fixed[*o + k] = Some(unit(p + k));
            }
        }
    }
    generic.sort_unstable();
    let search = EmbedSearch { s, m, generic, fixed, free_u, rest: lm.rest.clone(), height: height as usize };
    for h in 1..=search.height {
        if search.dfs(h, 0, &mut Vec::new(), 0, visit) {
            break;
        }
    }
    Ok(())
}

/// First primitive embedding found by [`search_embeddings`].
pub fn find_embedding_by_search(s: &Lattice, m: &Lattice, height: u32) -> Option<PrimitiveEmbedding> {
    if s.rank() > m.rank() {
        return None;
    }
    let mut found = None;
    search_embeddings(s, m, height, &mut |e| {
        found = Some(e);
        true
    })
    .ok()?;
    found
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_lattice_expr;

    #[test]
    fn shells_are_complete_and_disjoint() {
        let mut seen = std::collections::BTreeSet::new();
        for h in 0..=2 {
            shell_find::<()>(3, h, None, &mut |v| {
                assert!(seen.insert(v.to_vec()));
                assert_eq!(v.iter().map(|x| x.unsigned_abs()).max().unwrap() as usize, h);
                None
            });
        }
        assert_eq!(seen.len(), 125);
        let mut first = Vec::new();
        shell_find::<()>(2, 1, None, &mut |v| {
            first.push(v.to_vec());
            None
        });
        assert_eq!(first[0], vec![1, 0]);
        assert_eq!(first[2], vec![0, 1]);
    }

    #[test]
    fn parallel_shell_matches_sequential() {
        let f = |v: &[i64]| (v.iter().sum::<i64>() == 3 && v[0] < 0).then(|| v.to_vec());
        for h in 1..4 {
            assert_eq!(shell_search(Exec::Sequential, 4, h, f), shell_search(Exec::Parallel, 4, h, f));
        }
    }

    #[test]
    fn divisor_pairs_sorted() {
        assert_eq!(divisor_pairs(4, 2)[0], (2, 2));
        assert!(divisor_pairs(3, 3).contains(&(-1, -3)));
        assert!(divisor_pairs(3, 1).is_empty());
        assert_eq!(divisor_pairs(0, 1)[0], (0, 0));
    }

    #[test]
    fn u_into_u_cubed_uses_first_block() {
        let u = parse_lattice_expr("U").unwrap();
        let m = parse_lattice_expr("U^3").unwrap();
        let e = find_embedding_by_search(&u, &m, 2).unwrap();
        assert_eq!(e.images, vec![vec![1, 0, 0, 0, 0, 0], vec![0, 1, 0, 0, 0, 0]]);
    }

    #[test]
    fn rank_two_into_og6() {
        let t = parse_lattice_expr("<6>^2").unwrap();
        let m = parse_lattice_expr("U^3 + <-2>^2").unwrap();
        let e = find_embedding_by_search(&t, &m, 3).unwrap();
        assert_eq!(m.gram_of(&e.images).unwrap(), t.gram());
        assert_eq!(e.images, vec![vec![2, 2, 0, 0, 0, 0, 1, 0], vec![0, 0, 2, 2, 0, 0, 0, 1]]);
    }
}
