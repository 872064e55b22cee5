//! Naming lattices in a genus by sums of catalogued building blocks.

use std::path::Path;

use crate::discform::{discriminant_form, forms_equivalent, GenusDescriptor};
use crate::dsl::parse_lattice_expr;
use crate::error::{Error, Result};
use crate::lattice::{Lattice, Signature};

const BUILTIN: &str = include_str!("../data/catalog.txt");

/// Environment variable naming a catalog file that replaces the builtin one.
pub const CATALOG_ENV: &str = "LATTICE_FORGE_CATALOG";

#[derive(Clone, Debug)]
struct Atom {
    expr: String,
    lattice: Lattice,
    sig: Signature,
    abs_det: u64,
}

/// An ordered list of building blocks.
#[derive(Clone, Debug)]
pub struct Catalog {
    atoms: Vec<Atom>,
}

impl Catalog {
    /// Parse one expression per line; blank lines and `#` comments are
    /// ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut atoms = Vec::new();
        for line in text.lines() {
            let expr = line.split('#').next().unwrap_or("").trim();
            if expr.is_empty() {
                continue;
            }
            let lattice = parse_lattice_expr(expr)?;
            atoms.push(Atom { expr: expr.to_string(), sig: lattice.signature(), abs_det: lattice.abs_det(), lattice });
        }
        Ok(Catalog { atoms })
    }

    pub fn builtin() -> Self {
        Self::parse(BUILTIN).expect("builtin catalog parses")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// The catalog named by [`CATALOG_ENV`], else the builtin one.
    pub fn from_env() -> Result<Self> {
        match std::env::var_os(CATALOG_ENV) {
            Some(p) => Self::load(Path::new(&p)),
            None => Ok(Self::builtin()),
        }
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// First sum of atoms (as a multiset in catalog order) lying in the
    /// genus `g`, with rank at most `max_rank` and each atom's `|det|` at
    /// most `max_det`.
    pub fn realize(&self, g: &GenusDescriptor, max_rank: usize, max_det: u64) -> Option<Lattice> {
        let rank = g.signature.rank();
        if rank > max_rank {
            return None;
        }
        let order = g.disc.order();
        let mut chosen = Vec::new();
        self.dfs(g, 0, g.signature, order, max_det, &mut chosen)
    }

    fn dfs(
        &self,
        g: &GenusDescriptor,
        from: usize,
        left: Signature,
        order: u64,
        max_det: u64,
        chosen: &mut Vec<usize>,
    ) -> Option<Lattice> {
        if left.rank() == 0 {
            if order != 1 {
                return None;
            }
            let parts: Vec<Lattice> = chosen.iter().map(|&i| self.atoms[i].lattice.clone()).collect();
            let sum = Lattice::direct_sum(&parts);
            if forms_equivalent(&discriminant_form(&sum), &g.disc).unwrap_or(false) {
                let label = chosen.iter().map(|&i| self.atoms[i].expr.as_str()).collect::<Vec<_>>().join(" + ");
                return Some(sum.with_label(label));
            }
            return None;
        }
        for i in from..self.atoms.len() {
            let a = &self.atoms[i];
            if a.sig.plus > left.plus || a.sig.minus > left.minus || a.abs_det > max_det || order % a.abs_det != 0 {
                continue;
            }
            chosen.push(i);
            let next = Signature::new(left.plus - a.sig.plus, left.minus - a.sig.minus);
            let hit = self.dfs(g, i, next, order / a.abs_det, max_det, chosen);
            chosen.pop();
            if hit.is_some() {
                return hit;
            }
        }
        None
    }
}

/// [`Catalog::realize`] with the catalog from the environment.
pub fn realize_genus(g: &GenusDescriptor, max_rank: usize, max_det: u64) -> Option<Lattice> {
    Catalog::from_env().ok()?.realize(g, max_rank, max_det)
}
