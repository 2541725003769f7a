use std::path::Path;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use xp_core::blowup::{rd_generators, BlowupError, CurveRdModel, CurveSpec, ProjPoint, RdVariant};
use xp_core::chain::{homology_ranks, simplicial_chain_complex, ChainComplexJson, ChainError};
use xp_core::derham::{default_truncation, h1_basis, h1_rank, CocycleJson, DerhamError};
use xp_core::period::{
    integrate_path, pair_relative, parse_complex, period_matrix, properness_check, stokes_check, IntegrationOptions,
    PathSpec, PeriodError, Properness, Triangle, Verdict,
};
use xp_core::sa_domain::{parse_rational, DomainError, GaussianRational, RatForm, RatFunc, SignConditionRegion};
use xp_core::simplex::{barycentric_subdivision, GeomComplex, Retraction, SimplexError};
use xp_core::volume::{combine_signed_volumes, parse_box, represent_volume, DensityDomain, SignedItem, VolumeError};

use crate::output::{Failure, Outcome, Status};
use crate::{CheckCmd, Cli, Command, ComplexCmd, DerhamArgs, HomologyCmd, PeriodCmd, VolumeCmd};

type Res = Result<Outcome, Failure>;

fn usage(e: impl ToString) -> Failure {
    Failure::Usage(e.to_string())
}

fn from_period(e: PeriodError) -> Failure {
    match e {
        PeriodError::RejectedPath(_) | PeriodError::PoleOnPath(_) | PeriodError::PoleOnSimplex => {
            Failure::Rejected(e.to_string())
        }
        PeriodError::QuadratureFailure(_) => Failure::Numerical(e.to_string()),
        _ => usage(e),
    }
}

fn from_volume(e: VolumeError) -> Failure {
    match e {
        VolumeError::UnboundedDomain(_) | VolumeError::DensityUndefined(_) => Failure::Rejected(e.to_string()),
        VolumeError::Quadrature(_) => Failure::Numerical(e.to_string()),
        _ => usage(e),
    }
}

fn from_derham(e: DerhamError) -> Failure {
    match e {
        DerhamError::NotStabilized { .. } => Failure::Numerical(e.to_string()),
        _ => usage(e),
    }
}

fn from_chain(e: ChainError) -> Failure {
    match e {
        ChainError::Json(_) | ChainError::Shape(_) => usage(e),
        ChainError::NotStabilized { .. } => Failure::Numerical(e.to_string()),
        _ => Failure::Rejected(e.to_string()),
    }
}

fn from_blowup(e: BlowupError) -> Failure {
    match e {
        BlowupError::Json(_) | BlowupError::Domain(_) | BlowupError::UnsupportedShape(_) => usage(e),
        _ => Failure::Rejected(e.to_string()),
    }
}

fn from_simplex(e: SimplexError) -> Failure {
    match e {
        SimplexError::Json(_) | SimplexError::BadVertexIndex(_) => usage(e),
        _ => Failure::Rejected(e.to_string()),
    }
}

/// JSON given inline or as a path to a file.
fn json_arg(arg: &str) -> Result<String, Failure> {
    let t = arg.trim_start();
    if t.starts_with('{') || t.starts_with('[') {
        return Ok(arg.to_string());
    }
    std::fs::read_to_string(Path::new(arg)).map_err(|e| usage(format!("cannot read `{arg}`: {e}")))
}

fn list(arg: Option<&str>) -> Vec<&str> {
    arg.map(|s| s.split(',').map(str::trim).filter(|x| !x.is_empty()).collect()).unwrap_or_default()
}

fn gaussians(arg: Option<&str>) -> Result<Vec<GaussianRational>, Failure> {
    list(arg).into_iter().map(|s| s.parse::<GaussianRational>().map_err(usage)).collect()
}

fn complexes(arg: Option<&str>) -> Result<Vec<Complex64>, Failure> {
    list(arg).into_iter().map(|s| parse_complex(s).map_err(usage)).collect()
}

pub fn dispatch(cli: &Cli) -> Res {
    let g = &cli.global;
    let opts = IntegrationOptions { tol: g.tol, force: g.force, ..Default::default() };
    if !(g.tol > 0.0) {
        return Err(usage("--tol must be positive"));
    }
    match &cli.command {
        Command::Period(PeriodCmd::Eval { f, omega, path, marked, values }) => {
            period_eval(f, omega, path, marked.as_deref(), values.as_deref(), &opts)
        }
        Command::Period(PeriodCmd::Matrix { n }) => {
            if *n == 0 {
                return Err(usage("--n must be at least 1"));
            }
            let m = period_matrix(*n, &opts).map_err(from_period)?;
            let mut o = Outcome::ok(m.to_json());
            if m.det.norm() == 0.0 {
                o = o.with_status(Status::Error).note("determinant vanished: pairing is degenerate");
            }
            Ok(o)
        }
        Command::Homology(HomologyCmd::Rd { curve, punctures, marked, f }) => {
            homology_rd(curve, punctures.as_deref(), marked.as_deref(), f.as_deref())
        }
        Command::Homology(HomologyCmd::Chain { input, complex, sub }) => {
            homology_chain(input.as_deref(), complex.as_deref(), sub.as_deref())
        }
        Command::Derham(args) => derham(args),
        Command::Complex(ComplexCmd::Core { input }) => {
            let k = GeomComplex::parse_json(&json_arg(input)?).map_err(from_simplex)?;
            let r = Retraction::new(&k);
            Ok(Outcome::ok(json!({
                "core": r.core().to_json(),
                "subdivision_size": r.subdivision().len(),
                "core_size": r.core().len(),
            })))
        }
        Command::Complex(ComplexCmd::Subdivide { input }) => {
            let k = GeomComplex::parse_json(&json_arg(input)?).map_err(from_simplex)?;
            let b = barycentric_subdivision(&k);
            Ok(Outcome::ok(json!({"subdivision": b.to_json(), "size": b.len()})))
        }
        Command::Volume(VolumeCmd::Represent { domain, density }) => {
            let d = DensityDomain::from_json(&json_arg(domain)?, density).map_err(from_volume)?;
            let r = represent_volume(&d, g.tol.max(1e-12)).map_err(from_volume)?;
            Ok(Outcome::ok(r.to_json()))
        }
        Command::Volume(VolumeCmd::Combine { spec, eps }) => volume_combine(spec, eps.as_deref()),
        Command::Check(CheckCmd::Stokes { triangle, omega, f, random }) => match (triangle, random) {
            (Some(t), _) => {
                let tri = parse_triangle(t)?;
                let omega =
                    RatForm::parse(omega.as_deref().unwrap_or("0"), Some(&["x", "y"]), Some(1)).map_err(usage)?;
                let f = RatFunc::parse_in(f.as_deref().unwrap_or("0"), &["x", "y"]).map_err(usage)?;
                let r = stokes_check(&tri, &omega, &f).map_err(from_period)?;
                Ok(Outcome::ok(serde_json::to_value(r).expect("report serialises")))
            }
            (None, Some(n)) => stokes_random(*n, g.seed),
            (None, None) => Err(usage("give --triangle with --omega and --f, or --random N")),
        },
        Command::Check(CheckCmd::Proper { f, path }) => {
            let f = RatFunc::parse(f).map_err(usage)?;
            let path = PathSpec::parse(path).map_err(usage)?;
            let p = properness_check(&f, &path).map_err(from_period)?;
            let o = Outcome::ok(p.to_json());
            Ok(match p {
                Properness::Reject(r) => o.with_status(Status::Rejected).note(r.to_string()),
                _ => o,
            })
        }
    }
}

fn period_eval(
    f: &str,
    omega: &str,
    path: &str,
    marked: Option<&str>,
    values: Option<&str>,
    opts: &IntegrationOptions,
) -> Res {
    let f = RatFunc::parse(f).map_err(usage)?;
    let omega = RatForm::parse(omega, None, Some(1)).map_err(usage)?;
    let path = PathSpec::parse(path).map_err(usage)?;
    let v = if marked.is_some() || values.is_some() {
        let (y, a) = (complexes(marked)?, complexes(values)?);
        pair_relative(&f, &omega, &y, &a, &path, opts)
    } else {
        integrate_path(&f, &omega, &path, opts)
    }
    .map_err(from_period)?;
    let o = Outcome::ok(v.to_json());
    Ok(match &v.verdict {
        Verdict::Converged => o,
        Verdict::Rejected(r) => {
            o.with_status(Status::Rejected).note(format!("forced evaluation of a rejected path: {r}"))
        }
    })
}

fn curve_spec(
    curve: &str,
    punctures: Option<&str>,
    marked: Option<&str>,
    f: Option<&str>,
) -> Result<CurveSpec, Failure> {
    let mut p: Vec<ProjPoint> = match curve {
        "A1" | "a1" => vec![ProjPoint::Infinity],
        "P1" | "p1" => Vec::new(),
        other => {
            if punctures.is_some() || marked.is_some() || f.is_some() {
                return Err(usage("a curve JSON already carries punctures, marked points and f"));
            }
            return CurveSpec::parse_json(&json_arg(other)?).map_err(from_blowup);
        }
    };
    for s in list(punctures) {
        p.push(ProjPoint::parse(s).map_err(from_blowup)?);
    }
    let f = f.ok_or_else(|| usage("--f is required"))?;
    let f = RatFunc::parse_in(f, &["z"]).map_err(usage)?;
    CurveSpec::new(p, gaussians(marked)?, f).map_err(from_blowup)
}

fn homology_rd(curve: &str, punctures: Option<&str>, marked: Option<&str>, f: Option<&str>) -> Res {
    let spec = curve_spec(curve, punctures, marked, f)?;
    let bcirc = CurveRdModel::build(&spec, RdVariant::Bcirc);
    let bsharp = CurveRdModel::build(&spec, RdVariant::Bsharp);
    let (ranks, sharp) = (bcirc.relative_ranks(), bsharp.relative_ranks());
    let generators = rd_generators(&spec).ok().map(|dirs| {
        dirs.into_iter()
            .map(|d| PathSpec::Ray { base: Complex64::new(0.0, 0.0), direction: d }.to_string())
            .collect::<Vec<_>>()
    });
    let mut o = Outcome::ok(json!({
        "rank": ranks.get(1).copied().unwrap_or(0),
        "ranks": ranks,
        "bsharp_ranks": sharp,
        "classes": spec.classify_punctures(),
        "cells": bcirc.cell_counts(),
        "euler_characteristic": bcirc.euler_characteristic(),
        "boundary_pieces": bcirc.boundary_piece_count(),
        "generators": generators,
    }));
    if generators.is_none() {
        o = o.note("explicit generators are only listed for (A1, {0}, z^n)");
    }
    if ranks != sharp {
        o = o.with_status(Status::Error).note("B∘ and B♯ models disagree");
    }
    Ok(o)
}

fn homology_chain(input: Option<&str>, complex: Option<&str>, sub: Option<&str>) -> Res {
    let c = match (input, complex) {
        (Some(i), _) => {
            let raw: ChainComplexJson = serde_json::from_str(&json_arg(i)?).map_err(usage)?;
            raw.to_complex().map_err(from_chain)?
        }
        (None, Some(k)) => {
            let k = GeomComplex::parse_json(&json_arg(k)?).map_err(from_simplex)?;
            let l = match sub {
                Some(s) => GeomComplex::parse_json(&json_arg(s)?).map_err(from_simplex)?,
                None => GeomComplex::empty(k.ambient()),
            };
            simplicial_chain_complex(&k, &l).map_err(from_chain)?
        }
        (None, None) => return Err(usage("give --in or --complex")),
    };
    Ok(Outcome::ok(json!({
        "ranks": homology_ranks(&c),
        "dims": (0..c.len()).map(|n| c.dim(n)).collect::<Vec<_>>(),
        "euler_characteristic": c.euler_characteristic(),
    })))
}

fn derham(args: &DerhamArgs) -> Res {
    let f = RatFunc::parse_in(&args.f, &["z"]).map_err(usage)?;
    let marked = gaussians(args.marked.as_deref())?;
    let n = match args.n {
        Some(n) => n,
        None => default_truncation(&f).map_err(from_derham)?,
    };
    let rank = h1_rank(&f, &marked, n).map_err(from_derham)?;
    let basis = h1_basis(&f, &marked, n).map_err(from_derham)?;
    Ok(Outcome::ok(json!({
        "rank": rank,
        "truncation": n,
        "basis": basis.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        "cocycles": basis.iter().map(CocycleJson::from).collect::<Vec<_>>(),
    })))
}

fn volume_combine(spec: &str, eps: Option<&str>) -> Res {
    let raw: Value = serde_json::from_str(&json_arg(spec)?).map_err(usage)?;
    let eps_text = match (eps, raw.get("eps")) {
        (Some(e), _) => e.to_string(),
        (None, Some(Value::String(s))) => s.clone(),
        (None, Some(v)) => v.to_string(),
        (None, None) => return Err(usage("no mesh size: pass --eps or set `eps` in the spec")),
    };
    let eps = parse_rational(&eps_text).ok_or_else(|| usage(format!("`{eps_text}` is not a rational mesh size")))?;
    let items_raw = raw.get("items").and_then(Value::as_array).ok_or_else(|| usage("spec needs an `items` array"))?;
    let mut items = Vec::new();
    for it in items_raw {
        let sign = it.get("sign").and_then(Value::as_i64).ok_or_else(|| usage("item without `sign`"))?;
        let region = it.get("region").ok_or_else(|| usage("item without `region`"))?;
        let region = SignConditionRegion::from_json(&region.to_string()).map_err(|e: DomainError| usage(e))?;
        let bbox = parse_box(it.get("box").ok_or_else(|| usage("item without `box`"))?).map_err(from_volume)?;
        items.push(SignedItem { sign: sign as i8, region, bbox });
    }
    let c = combine_signed_volumes(&items, &eps).map_err(from_volume)?;
    let mut o = Outcome::ok(c.to_json());
    if c.negative_total {
        o = o.note("NegativeTotal: the signed sum is negative; the result is reported with all signs flipped");
    }
    if !c.resolved {
        o = o.note("mesh too coarse: fewer inner positive cubes than cubes meeting the negative part");
    }
    Ok(o)
}

fn parse_triangle(text: &str) -> Result<Triangle, Failure> {
    let pts: Vec<[f64; 2]> = text
        .split(';')
        .map(|p| {
            let c: Vec<f64> = p.split(',').map(|x| x.trim().parse::<f64>()).collect::<Result<_, _>>().map_err(usage)?;
            match c.as_slice() {
                [x, y] => Ok([*x, *y]),
                _ => Err(usage(format!("`{p}` is not a point x,y"))),
            }
        })
        .collect::<Result<_, _>>()?;
    let arr: [[f64; 2]; 3] = pts.try_into().map_err(|_| usage("a triangle needs three points"))?;
    Ok(Triangle(arr))
}

/// Polynomial of total degree ≤ 3 in x, y with small Gaussian integer coefficients.
fn random_poly(rng: &mut ChaCha8Rng) -> String {
    let mut terms = Vec::new();
    for a in 0..=3u32 {
        for b in 0..=(3 - a) {
            if rng.gen_bool(0.5) {
                let (re, im) = (rng.gen_range(-2..=2), rng.gen_range(-1..=1));
                terms.push(format!("({re}+({im})*i)*x^{a}*y^{b}"));
            }
        }
    }
    if terms.is_empty() {
        "1".into()
    } else {
        terms.join(" + ")
    }
}

fn random_triangle(rng: &mut ChaCha8Rng) -> Triangle {
    loop {
        let mut v = [[0.0; 2]; 3];
        for p in &mut v {
            *p = [rng.gen_range(-4..=4) as f64 / 4.0, rng.gen_range(-4..=4) as f64 / 4.0];
        }
        let det = (v[1][0] - v[0][0]) * (v[2][1] - v[0][1]) - (v[1][1] - v[0][1]) * (v[2][0] - v[0][0]);
        if det.abs() > 1e-3 {
            return Triangle(v);
        }
    }
}

fn stokes_random(n: usize, seed: u64) -> Res {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    let mut cases = Vec::new();
    for _ in 0..n {
        let tri = random_triangle(&mut rng);
        let omega_src = format!("({})*dx + ({})*dy", random_poly(&mut rng), random_poly(&mut rng));
        let f_src = random_poly(&mut rng);
        let omega = RatForm::parse(&omega_src, Some(&["x", "y"]), Some(1)).map_err(usage)?;
        let f = RatFunc::parse_in(&f_src, &["x", "y"]).map_err(usage)?;
        let r = stokes_check(&tri, &omega, &f).map_err(from_period)?;
        worst = worst.max(r.residual);
        cases.push(json!({"triangle": tri.0, "omega": omega_src, "f": f_src, "residual": r.residual}));
    }
    let o = Outcome::ok(json!({"cases": n, "seed": seed, "max_residual": worst, "instances": cases}));
    Ok(if worst < 1e-6 { o } else { o.with_status(Status::Error).note("residual above 1e-6") })
}
