//! `latt` verbs.

use clap::Subcommand;
use lattice_forge::discform::{genus_unique_certificate, GenusDescriptor};
use lattice_forge::embed::{enumerate_embedding_data, find_vector, find_vector_in, glue_overlattice, realize_embedding_data};
use lattice_forge::{discriminant_form, forms_equivalent, Lattice};
use serde_json::{json, Value};

use crate::report::Report;
use crate::{input, CliError, CliResult, Global};

#[derive(Subcommand, Debug)]
pub enum Cmd {
    /// Rank, signature, determinant and discriminant form.
    ///
    /// Discriminant forms after Nikulin, Integral symmetric bilinear forms
    /// and some of their applications (1979).
    Info { expr: String },
    /// Discriminant form as exact JSON.
    ///
    /// Nikulin (1979); normal forms after Miranda–Morrison, Embeddings of
    /// integral quadratic forms, Ch. IV.
    Disc { expr: String },
    /// Isomorphism of discriminant forms and sameness of genus.
    ///
    /// The genus of an even lattice is fixed by its signature and
    /// discriminant form (Nikulin 1979, Cor. 1.9.4).
    Equiv { first: String, second: String },
    /// Orthogonal complement of a primitive embedding.
    ///
    /// Input `{"source", "ambient", "images"}` inline or as a file.
    Complement {
        #[arg(long)]
        embedding: String,
    },
    /// Primitive vector of given square and divisibility.
    ///
    /// No answers come from the discriminant-form obstruction; for lattices
    /// with two hyperbolic planes the Eichler criterion reduces the search
    /// to one orbit representative.
    FindVector {
        /// Lattice expression; omit when `--embedding` is given.
        expr: Option<String>,
        /// Search inside the orthogonal complement of this embedding, with
        /// divisibility taken in the ambient lattice.
        #[arg(long)]
        embedding: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        square: i64,
        #[arg(long, default_value_t = 1)]
        div: u64,
    },
    /// Overlattice defined by an isotropic subgroup of the discriminant group.
    ///
    /// Overlattices correspond to isotropic subgroups (Nikulin 1979,
    /// Prop. 1.4.1).
    Glue {
        expr: String,
        /// Subgroup generators in discriminant coordinates, e.g. `[[1,1]]`.
        #[arg(long)]
        subgroup: String,
    },
    /// Classes of primitive embeddings `S ↪ M` with explicit realizations.
    ///
    /// Glue data classification after Nikulin (1979), Prop. 1.15.1.
    EmbedSearch { source: String, ambient: String },
}

pub fn lattice_json(l: &Lattice) -> Value {
    let sig = l.signature();
    json!({
        "gram": l.gram(),
        "rank": l.rank(),
        "signature": [sig.plus, sig.minus],
        "det": l.determinant().to_string(),
    })
}

fn info(l: &Lattice) -> Value {
    let f = discriminant_form(l);
    let mut v = lattice_json(l);
    let m = v.as_object_mut().unwrap();
    m.insert("abs_det".into(), json!(l.abs_det()));
    m.insert("disc".into(), f.to_json());
    m.insert("disc_text".into(), json!(f.to_string()));
    m.insert("length".into(), json!(f.length()));
    m.insert("unimodular".into(), json!(f.is_trivial()));
    m.insert("genus_certificate".into(), serde_json::to_value(genus_unique_certificate(l)).unwrap());
    v
}

pub fn run(cmd: &Cmd, g: &Global) -> (Report, CliResult<()>) {
    let verb = match cmd {
        Cmd::Info { .. } => "latt.info",
        Cmd::Disc { .. } => "latt.disc",
        Cmd::Equiv { .. } => "latt.equiv",
        Cmd::Complement { .. } => "latt.complement",
        Cmd::FindVector { .. } => "latt.find-vector",
        Cmd::Glue { .. } => "latt.glue",
        Cmd::EmbedSearch { .. } => "latt.embed-search",
    };
    let mut rep = Report::new(verb);
    let out = dispatch(cmd, g, &mut rep);
    (rep, out)
}

fn dispatch(cmd: &Cmd, g: &Global, rep: &mut Report) -> CliResult<()> {
    match cmd {
        Cmd::Info { expr } => {
            rep.echo("expr", expr.as_str());
            rep.result = info(&input::lattice(expr)?);
        }
        Cmd::Disc { expr } => {
            rep.echo("expr", expr.as_str());
            rep.result = discriminant_form(&input::lattice(expr)?).to_json();
        }
        Cmd::Equiv { first, second } => {
            rep.echo("first", first.as_str());
            rep.echo("second", second.as_str());
            let (a, b) = (input::lattice(first)?, input::lattice(second)?);
            let forms = forms_equivalent(&discriminant_form(&a), &discriminant_form(&b))?;
            let genus = GenusDescriptor::of(&a).same_genus(&GenusDescriptor::of(&b))?;
            rep.result = json!({"forms_equivalent": forms, "same_genus": genus});
        }
        Cmd::Complement { embedding } => {
            rep.echo("embedding", embedding.as_str());
            let e = input::embedding(embedding, None)?;
            let (n, ne) = e.complement()?;
            rep.result = json!({"complement": info(&n), "images": ne.images});
        }
        Cmd::FindVector { expr, embedding, square, div } => {
            rep.echo("square", *square);
            rep.echo("div", *div);
            rep.echo("height", g.height);
            let d = match (expr, embedding) {
                (Some(x), None) => {
                    rep.echo("expr", x.as_str());
                    find_vector(&input::lattice(x)?, *square, *div, g.height)
                }
                (None, Some(e)) => {
                    rep.echo("embedding", e.as_str());
                    find_vector_in(&input::embedding(e, None)?, *square, *div, g.height)
                }
                _ => return Err(CliError::Usage("give exactly one of EXPR or --embedding".into())),
            };
            rep.result = d.to_json();
        }
        Cmd::Glue { expr, subgroup } => {
            rep.echo("expr", expr.as_str());
            rep.echo("subgroup", subgroup.as_str());
            let l = input::lattice(expr)?;
            let h = input::int_matrix(subgroup)?;
            let f = discriminant_form(&l);
            if h.iter().any(|x| x.len() != f.length()) {
                return Err(CliError::Usage(format!("generators must have {} coordinates", f.length())));
            }
            rep.result = info(&glue_overlattice(&l, &h)?);
        }
        Cmd::EmbedSearch { source, ambient } => {
            rep.echo("source", source.as_str());
            rep.echo("ambient", ambient.as_str());
            rep.echo("height", g.height);
            let (s, m) = (input::lattice(source)?, input::lattice(ambient)?);
            let mut classes = Vec::new();
            for data in enumerate_embedding_data(&s, &m)? {
                let e = realize_embedding_data(&s, &m, &data, g.height)?;
                let mut v = data.to_json();
                let obj = v.as_object_mut().unwrap();
                obj.insert("realized".into(), json!(e.is_some()));
                obj.insert("images".into(), json!(e.as_ref().map(|e| &e.images)));
                obj.insert(
                    "complement_gram".into(),
                    match &e {
                        Some(e) => json!(e.complement()?.0.gram()),
                        None => Value::Null,
                    },
                );
                classes.push(v);
            }
            rep.result = json!({"classes": classes});
        }
    }
    Ok(())
}
