//! `hk` verbs.

use clap::Subcommand;
use lattice_forge::discform::fmt_rational;
use lattice_forge::hk::{
    bb_lattice, bfield_transform, census_smallest_nonmoduli, extended_square, kummer_q, markman_p, moduli_criterion,
    morrison_abelian_check, mukai_pairing, og10_lsv_criterion, og10_rank3_classify, og6_rank3_classify, sigma_class,
    singular_k3_reduce, wall_test, ClassifyOptions, DeformationType, HKPeriod, MukaiVector,
};
use lattice_forge::lattice::gcd_i64;
use lattice_forge::par::Exec;
use lattice_forge::Lattice;
use num_rational::BigRational;
use serde_json::{json, Value};

use crate::latt::lattice_json;
use crate::report::Report;
use crate::{input, CliError, CliResult, Global};

fn dtype(s: &str) -> Result<DeformationType, String> {
    DeformationType::parse(s).map_err(|e| e.to_string())
}

#[derive(Subcommand, Debug)]
pub enum Cmd {
    /// Beauville–Bogomolov lattice of a deformation type.
    ///
    /// Beauville (1983) for K3[n] and Kum_n; Rapagnetta (2007, 2008) for
    /// OG10 and OG6.
    Bb {
        #[arg(long = "type", value_parser = dtype)]
        dtype: DeformationType,
    },
    /// Moduli criterion: NS contains σ with σ² = −2, div 2 (OG6) or
    /// σ² = −6, div 3 (OG10).
    ///
    /// Orbits of primitive vectors follow the Eichler criterion.
    /// Embedding JSON `{"source", "images"}` with optional `"ambient"`.
    Criterion {
        #[arg(long = "type", value_parser = dtype)]
        dtype: DeformationType,
        #[arg(long)]
        embedding: String,
    },
    /// Lattice condition for the Laza–Saccà–Voisin compactification: a
    /// hyperbolic plane inside NS of an OG10 period.
    ///
    /// Laza, Saccà, Voisin, A hyper-Kähler compactification of the
    /// intermediate Jacobian fibration (2017).
    Lsv {
        #[arg(long)]
        embedding: String,
    },
    /// Classes of NS of rank 3 for T = U² ⊕ ⟨−2d⟩ (OG6) or
    /// U² ⊕ E8² ⊕ ⟨−2d⟩ (OG10).
    ///
    /// Embedding classes via Nikulin (1979), Prop. 1.15.1.
    Rank3 {
        #[arg(long = "type", value_parser = dtype, default_value = "og6")]
        dtype: DeformationType,
        #[arg(long)]
        d: u64,
    },
    /// The OG10 case of `rank3`, with the U-summand and LSV columns.
    Rank3Og10 {
        #[arg(long)]
        d: u64,
    },
    /// Scan positive definite even binary T by determinant for the first
    /// non-moduli class.
    ///
    /// Singular K3 surfaces are classified by T (Shioda–Inose 1977).
    Census {
        #[arg(long = "type", value_parser = dtype)]
        dtype: DeformationType,
        /// Run without the thread pool.
        #[arg(long)]
        sequential: bool,
    },
    /// Coprime pairs (r, s) with −rs = n − 1 for K3[n].
    ///
    /// Markman, Integral constraints on the monodromy group of the
    /// hyperkähler resolution of a symmetric product of a K3 surface (2010).
    Pn {
        #[arg(long)]
        n: u64,
    },
    /// Coprime pairs (r, s) with −rs = n + 1 for Kum_n.
    Qn {
        #[arg(long)]
        n: u64,
    },
    /// Classes D ∈ NS defining walls for a Mukai vector v = (v0, c, v4).
    ///
    /// Wall-crossing after Bayer–Macrì, MMP for moduli of sheaves on K3s
    /// via wall-crossing (2014).
    Walls {
        #[arg(long, allow_hyphen_values = true)]
        v: String,
        #[arg(long)]
        ns: String,
    },
    /// Gauss reduction of a positive definite even binary form.
    ///
    /// Reduced forms label singular K3 surfaces (Shioda–Inose 1977).
    Reduce {
        #[arg(long)]
        form: String,
    },
    /// B-field transform exp(λ) of (r, μ, s) in Z ⊕ L ⊕ Z.
    ///
    /// Huybrechts, Generalized Calabi–Yau structures, K3 surfaces, and
    /// B-fields (2005).
    Bfield {
        #[arg(long)]
        form: String,
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
        #[arg(long, allow_hyphen_values = true)]
        r: String,
        #[arg(long, allow_hyphen_values = true)]
        mu: String,
        #[arg(long, allow_hyphen_values = true)]
        s: String,
    },
    /// Whether T of signature (2, k), k ≤ 3, embeds primitively into U³.
    ///
    /// Morrison, On K3 surfaces with large Picard number (1984).
    Morrison {
        #[arg(long)]
        t: String,
    },
}

pub fn run(cmd: &Cmd, g: &Global) -> (Report, CliResult<()>) {
    let verb = match cmd {
        Cmd::Bb { .. } => "hk.bb",
        Cmd::Criterion { .. } => "hk.criterion",
        Cmd::Lsv { .. } => "hk.lsv",
        Cmd::Rank3 { .. } => "hk.rank3",
        Cmd::Rank3Og10 { .. } => "hk.rank3-og10",
        Cmd::Census { .. } => "hk.census",
        Cmd::Pn { .. } => "hk.pn",
        Cmd::Qn { .. } => "hk.qn",
        Cmd::Walls { .. } => "hk.walls",
        Cmd::Reduce { .. } => "hk.reduce",
        Cmd::Bfield { .. } => "hk.bfield",
        Cmd::Morrison { .. } => "hk.morrison",
    };
    let mut rep = Report::new(verb);
    let out = dispatch(cmd, g, &mut rep);
    (rep, out)
}

fn opts(g: &Global) -> ClassifyOptions {
    ClassifyOptions { height: g.height, name_genus: true, ..ClassifyOptions::default() }
}

fn period(t: DeformationType, embedding: &str) -> CliResult<HKPeriod> {
    Ok(HKPeriod::new(t, input::embedding(embedding, Some(bb_lattice(t)))?)?)
}

fn pairs(v: Vec<(i64, i64)>) -> Value {
    json!(v.iter().map(|&(r, s)| [r, s]).collect::<Vec<_>>())
}

fn rat_json(x: &BigRational) -> Value {
    json!(fmt_rational(x))
}

fn rats_json(xs: &[BigRational]) -> Value {
    json!(xs.iter().map(fmt_rational).collect::<Vec<_>>())
}

fn walls(v: &MukaiVector, ns: &Lattice, height: u32) -> CliResult<Vec<Vec<i64>>> {
    let n = ns.rank();
    if n > 4 {
        return Err(CliError::Usage("wall scan supports NS of rank at most 4".into()));
    }
    let h = height as i64;
    let mut d = vec![-h; n];
    let mut out = Vec::new();
    loop {
        // One representative of ±D, primitive.
        let lead = d.iter().find(|&&x| x != 0).copied().unwrap_or(0);
        if lead > 0 && gcd_i64(&d) == 1 && wall_test(v, &d, ns)? {
            out.push(d.clone());
        }
        let mut i = n;
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            if d[i] < h {
                d[i] += 1;
                break;
            }
            d[i] = -h;
        }
    }
}

fn dispatch(cmd: &Cmd, g: &Global, rep: &mut Report) -> CliResult<()> {
    match cmd {
        Cmd::Bb { dtype } => {
            rep.echo("type", dtype.to_string());
            let l = bb_lattice(*dtype);
            let f = lattice_forge::discriminant_form(&l);
            let mut v = lattice_json(&l);
            v["expr"] = json!(l.label());
            v["disc"] = f.to_json();
            v["disc_text"] = json!(f.to_string());
            v["dimension"] = json!(dtype.dimension());
            rep.result = v;
        }
        Cmd::Criterion { dtype, embedding } => {
            rep.echo("type", dtype.to_string());
            rep.echo("embedding", embedding.as_str());
            rep.echo("height", g.height);
            let p = period(*dtype, embedding)?;
            let (square, div) = sigma_class(*dtype)?;
            let d = moduli_criterion(&p, g.height)?;
            rep.result = json!({
                "sigma": {"square": square, "div": div},
                "ns": lattice_json(&p.ns.source),
                "decision": d.to_json(),
                "moduli": d.verdict == lattice_forge::embed::Verdict::Yes,
            });
        }
        Cmd::Lsv { embedding } => {
            rep.echo("embedding", embedding.as_str());
            rep.echo("height", g.height);
            let p = period(DeformationType::OG10, embedding)?;
            rep.result = json!({"ns": lattice_json(&p.ns.source), "decision": og10_lsv_criterion(&p, g.height)?.to_json()});
        }
        Cmd::Rank3 { dtype, d } => {
            rep.echo("type", dtype.to_string());
            rep.echo("d", *d);
            rep.echo("height", g.height);
            rep.result = match dtype {
                DeformationType::OG6 => og6_rank3_classify(*d, opts(g))?.to_json(),
                DeformationType::OG10 => og10_rank3_classify(*d, opts(g))?.to_json(),
                other => return Err(CliError::Usage(format!("rank3 needs og6 or og10, got {other}"))),
            };
        }
        Cmd::Rank3Og10 { d } => {
            rep.echo("d", *d);
            rep.echo("height", g.height);
            rep.result = og10_rank3_classify(*d, opts(g))?.to_json();
        }
        Cmd::Census { dtype, sequential } => {
            let max_det = g.max_det.unwrap_or(20);
            rep.echo("type", dtype.to_string());
            rep.echo("max_det", max_det);
            rep.echo("height", g.height);
            let exec = if *sequential { Exec::Sequential } else { Exec::Parallel };
            let o = ClassifyOptions { name_genus: false, ..opts(g) };
            rep.result = census_smallest_nonmoduli(*dtype, max_det, o, exec)?.to_json();
        }
        Cmd::Pn { n } => {
            rep.echo("n", *n);
            if *n < 2 {
                return Err(CliError::Usage("n must be at least 2".into()));
            }
            rep.result = json!({"pairs": pairs(markman_p(*n))});
        }
        Cmd::Qn { n } => {
            rep.echo("n", *n);
            if *n < 2 {
                return Err(CliError::Usage("n must be at least 2".into()));
            }
            rep.result = json!({"pairs": pairs(kummer_q(*n))});
        }
        Cmd::Walls { v, ns } => {
            rep.echo("v", v.as_str());
            rep.echo("ns", ns.as_str());
            rep.echo("height", g.height);
            let ns = input::lattice(ns)?;
            let v = MukaiVector::parse(v)?;
            if v.v2.len() != ns.rank() {
                return Err(CliError::Usage(format!("v needs {} middle coordinates", ns.rank())));
            }
            let found = walls(&v, &ns, g.height)?;
            rep.result = json!({
                "v_square": mukai_pairing(&v, &v, &ns)?,
                "count": found.len(),
                "walls": found,
            });
        }
        Cmd::Reduce { form } => {
            rep.echo("form", form.as_str());
            let q = input::lattice(form)?;
            let r = singular_k3_reduce(&q)?;
            let gr = r.gram();
            rep.result = json!({
                "reduced": gr,
                "abc": [gr[0][0] / 2, gr[0][1], gr[1][1] / 2],
                "det": r.abs_det(),
            });
        }
        Cmd::Bfield { form, lambda, r, mu, s } => {
            for (k, x) in [("form", form), ("lambda", lambda), ("r", r), ("mu", mu), ("s", s)] {
                rep.echo(k, x.as_str());
            }
            let l = input::lattice(form)?;
            let lam = input::rational_list(lambda)?;
            let (r, mu, s) = (input::rational(r)?, input::rational_list(mu)?, input::rational(s)?);
            let (r2, mu2, s2) = bfield_transform(&lam, (&r, &mu, &s), &l)?;
            rep.result = json!({
                "image": {"r": rat_json(&r2), "mu": rats_json(&mu2), "s": rat_json(&s2)},
                "square_before": rat_json(&extended_square(&r, &mu, &s, &l)),
                "square_after": rat_json(&extended_square(&r2, &mu2, &s2, &l)),
            });
        }
        Cmd::Morrison { t } => {
            rep.echo("t", t.as_str());
            rep.result = morrison_abelian_check(&input::lattice(t)?)?.to_json();
        }
    }
    Ok(())
}
