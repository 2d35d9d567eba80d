use std::path::Path;

use rbo_core::applications::{
    aks_flow, block_triangular_residuals, casimir, default_l0, euclidean_block_residuals,
    factorize, matched_pair_from_rbo, matched_pair_group_check,
};
use rbo_core::cohomology::cohomology_table;
use rbo_core::correspondence::{
    check_local_rbo, diff_group_rbo, integrate_rbo, max_disagreement, polynomial_cochain, van_est,
    van_est_square_check,
};
use rbo_core::group::{
    check_descendent_group, check_group_rbo, check_theta_action, operator_by_name,
    random_unit_coords, GroupRbo, Sampling, DEFAULT_RADIUS,
};
use rbo_core::io::{load_rbo, parse_algebra, parse_modified_r, read_json};
use rbo_core::lie::{check_jacobi, parse_family};
use rbo_core::rbo::{check_mybe, full_check};
use rbo_core::{Error, Matrix, Report, Result, Tolerance};

use crate::output::Output;
use crate::{Cli, Command, Config};

pub struct Outcome {
    pub passed: bool,
    pub rendered: String,
}

/// 1 for verified failures, 2 for unusable input.
pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::CheckFailed(_) | Error::Divergence { .. } | Error::Singular(_) => 1,
        Error::Parse(_) | Error::Dimension(_) | Error::Domain(_) | Error::Unsupported(_) => 2,
    }
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    let c = &cli.config;
    let out = match &cli.command {
        Command::Check {
            rbos,
            algebras,
            rmats,
            groups,
        } => check(c, rbos, algebras, rmats, groups)?,
        Command::Cohomology { file, kmax } => cohomology(c, file, *kmax)?,
        Command::Integrate { file } => integrate(c, file)?,
        Command::Vanest { group, degree } => vanest(c, group, *degree)?,
        Command::Factorize { group, t, x0 } => factorize_cmd(c, group, *t, x0.as_deref())?,
        Command::Aks {
            group,
            tmax,
            steps,
            x0,
        } => aks(c, group, *tmax, *steps, x0.as_deref())?,
        Command::Matched { rbo, group } => matched(c, rbo.as_deref(), group.as_deref())?,
    };
    let passed = out.passed;
    Ok(Outcome {
        passed,
        rendered: out.render(c.format)?,
    })
}

fn tol(c: &Config, default: f64) -> f64 {
    c.tol_abs.unwrap_or(default)
}

fn sampling(c: &Config, radius: f64) -> Sampling {
    Sampling {
        count: c.samples,
        radius,
        seed: c.seed,
    }
}

fn group_op(name: &str) -> Result<GroupRbo> {
    operator_by_name(name)
}

fn check(
    c: &Config,
    rbos: &[std::path::PathBuf],
    algebras: &[std::path::PathBuf],
    rmats: &[std::path::PathBuf],
    groups: &[String],
) -> Result<Output> {
    if rbos.is_empty() && algebras.is_empty() && rmats.is_empty() && groups.is_empty() {
        return Err(Error::Parse(
            "nothing to check; pass --rbo, --algebra, --r or --group".into(),
        ));
    }
    let mut out = Output::new("check");
    for p in algebras {
        let a = parse_algebra(&read_json(p)?, &p.display().to_string())?;
        let mut r = check_jacobi(&a, tol(c, 1e-10));
        r.name = format!("{} jacobi", p.display());
        out.report(&r);
    }
    for p in rbos {
        let input = load_rbo(p)?;
        let mut r = full_check(&input.rbo, tol(c, 1e-10));
        r.name = input.name;
        out.report(&r);
    }
    for p in rmats {
        let base = p.parent().unwrap_or(Path::new("."));
        let r = parse_modified_r(&read_json(p)?, base, &p.display().to_string())?;
        let mut rep = check_mybe(&r, tol(c, 1e-10));
        rep.name = format!("{} mybe", p.display());
        out.report(&rep);
    }
    for name in groups {
        let o = group_op(name)?;
        let s = sampling(c, c.radius.unwrap_or(DEFAULT_RADIUS));
        let t = tol(c, 1e-9);
        let mut r = Report::new(name.clone());
        r.absorb(check_group_rbo(&o, &s, t)?);
        r.absorb(check_descendent_group(&o, &s, t)?);
        r.absorb(check_theta_action(&o, &s, t)?);
        out.report(&r);
    }
    Ok(out)
}

fn cohomology(c: &Config, file: &Path, kmax: usize) -> Result<Output> {
    if kmax == 0 {
        return Err(Error::Parse("--kmax must be at least 1".into()));
    }
    let input = load_rbo(file)?;
    let t = Tolerance::new(c.tol_abs.unwrap_or(0.0), c.tol_rel)?;
    let table = cohomology_table(&input.rbo, kmax, t)?;
    let mut out = Output::new("cohomology");
    out.line(format!("{}: cohomology up to degree {kmax}", input.name));
    out.line(format!(
        "{:>3}  {:>8}  {:>8}  {:>6}",
        "k", "dim C^k", "rank d_k", "dim H^k"
    ));
    let mut csv = String::from("k,dim_cochains,rank_d,dim_h\n");
    for row in &table.rows {
        out.line(format!(
            "{:>3}  {:>8}  {:>8}  {:>6}",
            row.k, row.dim_cochains, row.rank_d, row.dim_h
        ));
        csv.push_str(&format!(
            "{},{},{},{}\n",
            row.k, row.dim_cochains, row.rank_d, row.dim_h
        ));
    }
    let mut r = Report::new("complex");
    r.check("d∘d", table.dd_max, 1e-12);
    out.report(&r);
    out.field("operator", &input.name)
        .field("table", &table.rows);
    out.csv = Some(csv);
    Ok(out)
}

fn integrate(c: &Config, file: &Path) -> Result<Output> {
    let input = load_rbo(file)?;
    let data = input.group.ok_or_else(|| {
        Error::Parse(format!(
            "{}: no \"group\" block; integration needs group data",
            file.display()
        ))
    })?;
    let radius = c.radius.unwrap_or(data.radius);
    let local = integrate_rbo(
        &input.rbo,
        data.g.clone(),
        data.h.clone(),
        data.action.clone(),
        radius,
        &input.name,
    )?;
    let mut out = Output::new("integrate");
    out.line(format!(
        "{}: integrated on the log-ball of radius {radius}",
        input.name
    ));
    out.line(format!("provenance {}", local.provenance));
    out.field("operator", &input.name)
        .field("provenance", local.provenance.to_string())
        .field("radius", radius)
        .field("g", data.g.name())
        .field("h", data.h.name());

    let back = diff_group_rbo(&local.op)?;
    let mut r = Report::new("roundtrip");
    r.check(
        "diff(int(B)) = B",
        (&back.rbo.b - &input.rbo.b).max_abs(),
        tol(c, 1e-6),
    );
    out.report(&r);

    let mut local_check = check_local_rbo(&local, &sampling(c, radius / 3.0), 1e-9)?;
    local_check.name = "local operator identity".into();
    out.report(&local_check);

    if let Some(name) = &data.analytic {
        let analytic = group_op(name)?;
        let d = max_disagreement(&analytic, &local.op, &sampling(c, radius))?;
        let mut r = Report::new(format!("agreement with {name}"));
        r.push(
            rbo_core::Check::new("max |B_int - B_analytic|", d.residual, 1e-8)
                .with_counts(d.evaluated.unwrap_or(0), d.skipped.unwrap_or(0)),
        );
        out.report(&r);
    }
    out.field("cached_solves", local.cached_solves());
    Ok(out)
}

fn vanest(c: &Config, group: &str, degree: usize) -> Result<Output> {
    if !(1..=2).contains(&degree) {
        return Err(Error::Unsupported(format!(
            "--degree {degree}: the square check needs degree 1 or 2"
        )));
    }
    let o = group_op(group)?;
    let f = polynomial_cochain(&o.h, o.g.dim(), degree)?;
    let ve = van_est(&o, &f)?;
    let mut out = Output::new("vanest");
    out.line(format!(
        "{group}: Van Est of the degree-{degree} test cochain"
    ));
    out.line(format!(
        "VE(F) = {:?}",
        ve.coords
            .iter()
            .map(|x| format!("{x:.6e}"))
            .collect::<Vec<_>>()
    ));
    out.field("group", group)
        .field("degree", degree)
        .field("van_est", &ve.coords);
    out.report(&van_est_square_check(&o, &f, tol(c, 1e-3))?);
    Ok(out)
}

fn direction(c: &Config, dim: usize, x0: Option<&[f64]>) -> Result<Vec<f64>> {
    match x0 {
        Some(x) if x.len() != dim => Err(Error::Parse(format!(
            "--x0 has {} coordinates, the algebra has {dim}",
            x.len()
        ))),
        Some(x) => Ok(x.to_vec()),
        None => Ok(random_unit_coords(dim, &mut sampling(c, 0.0).rng())),
    }
}

fn factorize_cmd(c: &Config, group: &str, t: f64, x0: Option<&[f64]>) -> Result<Output> {
    let o = group_op(group)?;
    let x0 = direction(c, o.g.dim(), x0)?;
    let f = factorize(&o, &x0, t)?;
    let mut out = Output::new("factorize");
    let mut r = Report::new("factorization");
    r.check("|exp(2tX0) - g+ g-^-1|_F", f.residual, tol(c, 1e-9));
    match parse_family(group)? {
        (fam, _) if fam == "euclidean" => {
            let (tr, rot) = euclidean_block_residuals(&f);
            r.check("g+ translation block", tr, 1e-10)
                .check("g- rotation block - I", rot, 1e-10);
        }
        (fam, p) if fam == "gl_block" => {
            let (plus, minus) = block_triangular_residuals(&f, p[0]);
            r.check("g+ lower-left block", plus, 1e-10)
                .check("g- block unipotent", minus, 1e-10);
        }
        _ => {}
    }
    out.line(format!("{group}: t = {t}, x0 = {x0:?}"));
    out.line(format!("exp(2tX0) =\n{}", fmt_matrix(&f.exp)));
    out.line(format!("g+ =\n{}", fmt_matrix(&f.g_plus)));
    out.line(format!("g- =\n{}", fmt_matrix(&f.g_minus)));
    out.report(&r);
    out.field("group", group)
        .field("t", t)
        .field("x0", &x0)
        .field("exp", &f.exp)
        .field("g_plus", &f.g_plus)
        .field("g_minus", &f.g_minus);
    Ok(out)
}

fn fmt_matrix(m: &Matrix) -> String {
    m.to_rows()
        .iter()
        .map(|r| {
            format!(
                "  [{}]",
                r.iter()
                    .map(|x| format!("{x:>12.8}"))
                    .collect::<Vec<_>>()
                    .join(" ")
            )
        })
        .collect::<Vec<_>>()
        .join("\n")
}

/// Coordinates whose norm is conserved along the flow, where known.
fn aks(c: &Config, group: &str, tmax: f64, steps: usize, x0: Option<&[f64]>) -> Result<Output> {
    if steps == 0 || !tmax.is_finite() {
        return Err(Error::Parse(
            "--steps must be positive and --tmax finite".into(),
        ));
    }
    let o = group_op(group)?;
    let x0 = direction(c, o.g.dim(), x0)?;
    let l0 = default_l0(o.g.lie_algebra(), &x0, Tolerance::new(0.0, c.tol_rel)?);
    let ts: Vec<f64> = (0..=steps)
        .map(|i| tmax * i as f64 / steps as f64)
        .collect();
    let cas = casimir(&o.g);
    let tr = aks_flow(
        &o,
        &x0,
        &l0,
        &ts,
        cas.as_deref().unwrap_or(&|_: &[f64]| 0.0),
    )?;

    let mut out = Output::new("aks");
    let d = o.g.dim();
    let header: Vec<String> = std::iter::once("t".to_string())
        .chain((0..d).map(|i| format!("L{i}")))
        .chain(["agreement".to_string(), "casimir".to_string()])
        .collect();
    let mut csv = header.join(",") + "\n";
    for p in &tr.points {
        let row: Vec<String> = std::iter::once(format!("{:.16e}", p.t))
            .chain(p.l.iter().map(|x| format!("{x:.16e}")))
            .chain([
                format!("{:.16e}", p.agreement),
                format!("{:.16e}", p.casimir),
            ])
            .collect();
        csv.push_str(&row.join(","));
        csv.push('\n');
    }
    let agreement = tr.points.iter().map(|p| p.agreement).fold(0.0, f64::max);
    let c0 = tr.points.first().map_or(0.0, |p| p.casimir);
    let drift = tr
        .points
        .iter()
        .map(|p| (p.casimir - c0).abs())
        .fold(0.0, f64::max);
    let mut r = Report::new("aks");
    r.check("g+ and g- trajectories agree", agreement, tol(c, 1e-8));
    if cas.is_some() {
        r.check("casimir drift", drift, 1e-10 * c0.abs().max(1.0));
    }
    r.push(rbo_core::Check::verdict(
        "trajectory complete",
        tr.truncated.is_none(),
    ));
    out.line(format!("{group}: x0 = {x0:?}, L0 = {l0:?}"));
    out.line(csv.trim_end());
    if let Some(why) = &tr.truncated {
        out.line(format!("truncated: {why}"));
    }
    out.report(&r);
    out.field("group", group)
        .field("x0", &x0)
        .field("l0", &l0)
        .field("truncated", &tr.truncated);
    out.field(
        "points",
        tr.points
            .iter()
            .map(|p| serde_json::json!({"t": p.t, "l": p.l, "agreement": p.agreement, "casimir": p.casimir}))
            .collect::<Vec<_>>(),
    );
    out.csv = Some(csv);
    Ok(out)
}

fn matched(c: &Config, rbo: Option<&Path>, group: Option<&str>) -> Result<Output> {
    if rbo.is_none() && group.is_none() {
        return Err(Error::Parse("pass --rbo FILE and/or --group NAME".into()));
    }
    let mut out = Output::new("matched");
    if let Some(p) = rbo {
        let input = load_rbo(p)?;
        let m = matched_pair_from_rbo(&input.rbo, tol(c, 1e-10))?;
        let mut r = m.report;
        r.name = format!("{} matched pair", input.name);
        out.report(&r);
    }
    if let Some(g) = group {
        let o = group_op(g)?;
        let mut r = matched_pair_group_check(
            &o,
            &sampling(c, c.radius.unwrap_or(DEFAULT_RADIUS)),
            tol(c, 1e-9),
        )?;
        r.name = format!("{g} matched pair group");
        out.report(&r);
    }
    Ok(out)
}
