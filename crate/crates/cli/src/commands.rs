//! Subcommand bodies. Each writes a CSV table (to `--out` or stdout), an
//! optional JSON document, and a one-line summary on stdout.

use std::f64::consts::PI;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use roughwall::control::{det_columns, det_noise_floor, lie_bracket, lie_rank, lie_singular_values, Fields4, GeneralFields3, TotalFields3, Z_WORDS};
use roughwall::dynamics::{Swimmer3, Swimmer4};
use roughwall::linalg::condition_number;
use roughwall::mobility::{grand_resistance, SphereCluster};
use roughwall::stroke::{integrate_stroke, FieldsMode};
use roughwall::swimmer::{arm_directions4, centers3, centers4, frame3, matrices_stu};
use roughwall::wall::{blake_images, dz_green_wall, green_flat, green_rough, stokeslet, WallProfile};
use serde::Serialize;
use serde_json::json;

use crate::config::{RunConfig, SwimmerKind};
use crate::{CliError, Command, KernelKind};

/// Full-precision number formatting for tables.
fn num(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes `header` and `rows` to `--out` (or `stdout`).
fn write_table(cfg: &RunConfig, stdout: &mut dyn Write, header: &[&str], rows: &[Vec<String>]) -> Result<(), CliError> {
    let sink: Box<dyn Write + '_> = match &cfg.out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(&mut *stdout),
    };
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}

fn write_json<T: Serialize>(path: Option<&Path>, value: &T) -> Result<(), CliError> {
    if let Some(p) = path {
        let mut f = BufWriter::new(File::create(p)?);
        serde_json::to_writer_pretty(&mut f, value)?;
        writeln!(f)?;
        f.flush()?;
    }
    Ok(())
}

fn summary(stdout: &mut dyn Write, line: String) -> Result<(), CliError> {
    writeln!(stdout, "{line}")?;
    Ok(())
}

fn swimmer3(cfg: &RunConfig, a: f64, profile: WallProfile) -> Result<Swimmer3, CliError> {
    let mut sw = Swimmer3::new(a, cfg.fluid()?, profile)?;
    sw.quad = cfg.quad;
    Ok(sw)
}

fn swimmer4(cfg: &RunConfig) -> Result<Swimmer4, CliError> {
    let mut sw = Swimmer4::new(cfg.a, cfg.fluid()?, cfg.profile.clone())?;
    sw.quad = cfg.quad;
    Ok(sw)
}

fn require_three(cfg: &RunConfig, what: &str) -> Result<(), CliError> {
    match cfg.swimmer {
        SwimmerKind::ThreeSphere => Ok(()),
        SwimmerKind::FourSphere => Err(CliError::Config(format!("{what} is defined for the three-sphere swimmer only"))),
    }
}

fn point3(v: &[f64], flag: &str) -> Result<[f64; 3], CliError> {
    <[f64; 3]>::try_from(v).map_err(|_| CliError::Usage(format!("--{flag} takes three comma-separated values")))
}

pub fn dispatch(cmd: &Command, cfg: &RunConfig, stdout: &mut dyn Write) -> Result<(), CliError> {
    match cmd {
        Command::Kernel { kind, r, r0, self_interaction } => kernel(cfg, stdout, *kind, r, r0, *self_interaction),
        Command::Mobility => mobility(cfg, stdout),
        Command::Fields => fields(cfg, stdout),
        Command::Brackets { fd_check } => brackets(cfg, stdout, *fd_check),
        Command::DetSweep { no_rank, .. } => det_sweep(cfg, stdout, !no_rank),
        Command::Rank => rank(cfg, stdout),
        Command::Simulate { check_planar, .. } => simulate(cfg, stdout, *check_planar),
        Command::VerifyAppendix { z } => verify_appendix(cfg, stdout, *z),
    }
}

fn kernel(
    cfg: &RunConfig,
    stdout: &mut dyn Write,
    kind: KernelKind,
    r: &[f64],
    r0: &[f64],
    self_interaction: bool,
) -> Result<(), CliError> {
    let (r, r0) = (point3(r, "r")?, point3(r0, "r0")?);
    let fluid = cfg.fluid()?;
    let k = match kind {
        KernelKind::Stokeslet => stokeslet(&[r[0] - r0[0], r[1] - r0[1], r[2] - r0[2]], &fluid)?,
        KernelKind::Images => blake_images(&r, &r0, &fluid)?,
        KernelKind::Green => green_flat(&r, &r0, &fluid)?,
        KernelKind::Dz => dz_green_wall([r[0], r[1]], &r0, &fluid)?,
        KernelKind::Rough => green_rough(&r, &r0, &cfg.profile, &fluid, &cfg.quad, self_interaction)?,
    };
    let rows: Vec<Vec<String>> = (0..3)
        .flat_map(|i| (0..3).map(move |j| (i, j)))
        .map(|(i, j)| vec![(i + 1).to_string(), (j + 1).to_string(), num(k[(i, j)])])
        .collect();
    write_table(cfg, stdout, &["row", "col", "value"], &rows)?;
    let m: Vec<Vec<f64>> = (0..3).map(|i| (0..3).map(|j| k[(i, j)]).collect()).collect();
    write_json(cfg.json.as_deref(), &json!({ "kind": format!("{kind:?}").to_lowercase(), "r": r, "r0": r0, "matrix": m }))?;
    summary(stdout, format!("kernel {}: max |K_ij| = {}", format!("{kind:?}").to_lowercase(), num(k.amax())))
}

fn rows_of(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

fn mobility(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<(), CliError> {
    let x = cfg.state();
    let (centers, xc, basis, shape): (Vec<[f64; 3]>, [f64; 3], [[f64; 3]; 3], DMatrix<f64>) = match cfg.swimmer {
        SwimmerKind::ThreeSphere => {
            let u = matrices_stu(&x).u.map_value();
            (centers3(&x).to_vec(), [x[4], x[5], x[6]], frame3(&x[2], &x[3]), u)
        }
        SwimmerKind::FourSphere => {
            let dirs = arm_directions4(&x);
            let shape = DMatrix::from_fn(12, 4, |r, c| if r / 3 == c { dirs[c][r % 3] } else { 0.0 });
            let id = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
            (centers4(&x).to_vec(), [x[4], x[5], x[6]], id, shape)
        }
    };
    let cluster = SphereCluster {
        centers,
        a: cfg.a,
        fluid: cfg.fluid()?,
        profile: cfg.profile.clone(),
    };
    let g = grand_resistance(&cluster, xc, basis, &shape, &cfg.quad, &Default::default())?;
    let m = DMatrix::from_column_slice(6, 6, g.m.as_slice());
    let mut rows = Vec::new();
    for (name, mat) in [("M", &m), ("N", &g.n)] {
        for i in 0..mat.nrows() {
            for j in 0..mat.ncols() {
                rows.push(vec![name.to_string(), (i + 1).to_string(), (j + 1).to_string(), num(mat[(i, j)])]);
            }
        }
    }
    write_table(cfg, stdout, &["matrix", "row", "col", "value"], &rows)?;
    let cond = condition_number(&m);
    let asym = (&m - m.transpose()).amax();
    write_json(
        cfg.json.as_deref(),
        &json!({ "m": rows_of(&m), "n": rows_of(&g.n), "condition_number": cond, "asymmetry": asym }),
    )?;
    summary(stdout, format!("mobility: cond(M) = {}, max |M - M^T| = {}", num(cond), num(asym)))
}

fn field_row(field: usize, part: &str, v: &[f64]) -> Vec<String> {
    let mut r = vec![field.to_string(), part.to_string()];
    r.extend(v.iter().map(|&c| num(c)));
    r
}

fn fields(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<(), CliError> {
    let x = cfg.state();
    let n = cfg.state_len();
    let mut rows = Vec::new();
    match cfg.swimmer {
        SwimmerKind::ThreeSphere => {
            let sw = swimmer3(cfg, cfg.a, cfg.profile.clone())?;
            let split = sw.split_fields(&x)?;
            let general = sw.general_fields(&x)?;
            for i in 0..2 {
                for (part, f) in [
                    ("f0", &split.f0),
                    ("f1", &split.f1),
                    ("f2", &split.f2),
                    ("total", &split.total),
                    ("general", &general),
                ] {
                    rows.push(field_row(i + 1, part, &f[i]));
                }
            }
        }
        SwimmerKind::FourSphere => {
            let f = swimmer4(cfg)?.fields(&x)?;
            for (i, v) in f.iter().enumerate() {
                rows.push(field_row(i + 1, "total", v));
            }
        }
    }
    let mut header = vec!["field".to_string(), "part".to_string()];
    header.extend((1..=n).map(|k| format!("c{k}")));
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    write_table(cfg, stdout, &header, &rows)?;
    let doc: Vec<_> = rows
        .iter()
        .map(|r| json!({ "field": r[0].parse::<usize>().unwrap(), "part": r[1], "values": r[2..].iter().map(|s| s.parse::<f64>().unwrap()).collect::<Vec<_>>() }))
        .collect();
    write_json(cfg.json.as_deref(), &doc)?;
    summary(stdout, format!("fields: {} rows at state {:?}", rows.len(), x))
}

fn brackets(cfg: &RunConfig, stdout: &mut dyn Write, fd_check: bool) -> Result<(), CliError> {
    require_three(cfg, "brackets")?;
    let x = cfg.state();
    let sw = swimmer3(cfg, cfg.a, cfg.profile.clone())?;
    let z = sw.z_vectors(&x)?;
    let det = det_columns(&z.total);
    let floor = det_noise_floor(&z.total);
    let mut rows = Vec::new();
    for (set, cols) in [("z0", &z.z0), ("z1", &z.z1), ("z2", &z.z2), ("total", &z.total)] {
        for (w, c) in Z_WORDS.iter().zip(cols.iter()) {
            let mut r = vec![set.to_string(), w.to_string(), String::new(), String::new()];
            r.extend(c.iter().map(|&v| num(v)));
            rows.push(r);
        }
    }
    let names = ["F1", "F2"].into_iter().chain(Z_WORDS);
    for (w, c) in names.zip(z.columns7.iter()) {
        let mut r = vec!["full".to_string(), w.to_string()];
        r.extend(c.iter().map(|&v| num(v)));
        rows.push(r);
    }
    write_table(cfg, stdout, &["set", "word", "c1", "c2", "c3", "c4", "c5", "c6", "c7"], &rows)?;

    let fd_err = if fd_check {
        let sw = &sw;
        let f = |k: usize| move |y: &[f64]| -> roughwall::Result<Vec<f64>> { Ok(sw.split_fields(y)?.total[k].clone()) };
        let (f1, f2) = (f(0), f(1));
        let fd = lie_bracket(&f1, &f2, &x, &cfg.fd)?;
        Some(fd.iter().zip(&z.columns7[2]).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max))
    } else {
        None
    };
    write_json(
        cfg.json.as_deref(),
        &json!({ "state": x, "z": z, "det7": det, "noise_floor": floor, "fd_bracket_error": fd_err }),
    )?;
    let mut line = format!("det7 = {} (noise floor {})", num(det), num(floor));
    if let Some(e) = fd_err {
        line.push_str(&format!("; max |[F1,F2] jet - fd| = {}", num(e)));
    }
    summary(stdout, line)
}

#[derive(Debug, Serialize)]
struct SweepRow {
    index: usize,
    params: [f64; 9],
    det7: Option<f64>,
    noise_floor: Option<f64>,
    rank: Option<usize>,
    status: String,
}

fn sweep_point(cfg: &RunConfig, p: &[f64; 9], with_rank: bool) -> Result<(f64, f64, Option<usize>), CliError> {
    let sw = swimmer3(cfg, p[0], cfg.profile.with_epsilon(p[1]))?;
    let x = &p[2..];
    let (det, floor) = sw.det7_with_floor(x)?;
    let rank = if with_rank {
        Some(lie_rank(&TotalFields3::at(&sw, x)?, x, cfg.depth(), cfg.svd_tol)?)
    } else {
        None
    };
    Ok((det, floor, rank))
}

fn det_sweep(cfg: &RunConfig, stdout: &mut dyn Write, with_rank: bool) -> Result<(), CliError> {
    require_three(cfg, "det-sweep")?;
    let s = cfg.state();
    let base = [cfg.a, cfg.profile.epsilon, s[0], s[1], s[2], s[3], s[4], s[5], s[6]];
    let axes = cfg.grid.resolve(base);
    let total: usize = axes.iter().map(Vec::len).product();
    let points: Vec<[f64; 9]> = (0..total)
        .map(|mut idx| {
            // last axis varies fastest
            let mut p = [0.0; 9];
            for k in (0..9).rev() {
                p[k] = axes[k][idx % axes[k].len()];
                idx /= axes[k].len();
            }
            p
        })
        .collect();
    let results: Vec<SweepRow> = points
        .par_iter()
        .enumerate()
        .map(|(index, p)| match sweep_point(cfg, p, with_rank) {
            Ok((det, floor, rank)) => SweepRow {
                index,
                params: *p,
                det7: Some(det),
                noise_floor: Some(floor),
                rank,
                status: if det.abs() > floor { "ok".into() } else { "noise".into() },
            },
            Err(e) => SweepRow {
                index,
                params: *p,
                det7: None,
                noise_floor: None,
                rank: None,
                status: if e.exit_code() == 2 { format!("invalid: {e}") } else { format!("numerical: {e}") },
            },
        })
        .collect();
    let rows: Vec<Vec<String>> = results
        .iter()
        .map(|r| {
            let mut row = vec![r.index.to_string()];
            row.extend(r.params.iter().map(|&v| num(v)));
            row.push(r.det7.map(num).unwrap_or_default());
            row.push(r.noise_floor.map(num).unwrap_or_default());
            row.push(r.rank.map(|k| k.to_string()).unwrap_or_default());
            row.push(r.status.clone());
            row
        })
        .collect();
    write_table(
        cfg,
        stdout,
        &["index", "a", "eps", "xi1", "xi2", "theta", "phi", "x", "y", "z", "det7", "noise_floor", "rank", "status"],
        &rows,
    )?;
    write_json(cfg.json.as_deref(), &results)?;
    let count = |p: &str| results.iter().filter(|r| r.status.starts_with(p)).count();
    summary(
        stdout,
        format!(
            "det-sweep: {total} points, {} ok, {} noise, {} invalid, {} numerical",
            count("ok"),
            count("noise"),
            count("invalid"),
            count("numerical")
        ),
    )
}

fn rank(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<(), CliError> {
    let x = cfg.state();
    let depth = cfg.depth();
    let (r, sv) = match (cfg.swimmer, cfg.mode) {
        (SwimmerKind::ThreeSphere, FieldsMode::Asymptotic) => {
            let sw = swimmer3(cfg, cfg.a, cfg.profile.clone())?;
            let fam = TotalFields3::at(&sw, &x)?;
            (lie_rank(&fam, &x, depth, cfg.svd_tol)?, lie_singular_values(&fam, &x, depth)?)
        }
        (SwimmerKind::ThreeSphere, FieldsMode::General) => {
            let sw = swimmer3(cfg, cfg.a, cfg.profile.clone())?;
            let fam = GeneralFields3::at(&sw, &x)?;
            (lie_rank(&fam, &x, depth, cfg.svd_tol)?, lie_singular_values(&fam, &x, depth)?)
        }
        (SwimmerKind::FourSphere, _) => {
            let sw = swimmer4(cfg)?;
            let fam = Fields4::at(&sw, &x)?;
            (lie_rank(&fam, &x, depth, cfg.svd_tol)?, lie_singular_values(&fam, &x, depth)?)
        }
    };
    let rows: Vec<Vec<String>> = sv.iter().enumerate().map(|(i, &s)| vec![(i + 1).to_string(), num(s)]).collect();
    write_table(cfg, stdout, &["index", "singular_value"], &rows)?;
    write_json(
        cfg.json.as_deref(),
        &json!({ "state": x, "depth": depth, "svd_tol": cfg.svd_tol, "rank": r, "singular_values": sv }),
    )?;
    summary(stdout, format!("rank = {r}"))
}

fn simulate(cfg: &RunConfig, stdout: &mut dyn Write, check_planar: bool) -> Result<(), CliError> {
    require_three(cfg, "simulate")?;
    let stroke = cfg.stroke.build()?;
    let mut x = cfg.state();
    if cfg.state.is_none() {
        x[0] = stroke.vertices[0][0];
        x[1] = stroke.vertices[0][1];
    }
    let x0: [f64; 7] = std::array::from_fn(|k| x[k]);
    let sw = swimmer3(cfg, cfg.a, cfg.profile.clone())?;
    let traj = integrate_stroke(&sw, x0, &stroke, cfg.mode, &cfg.integrator)?;
    let rows: Vec<Vec<String>> = traj
        .times
        .iter()
        .zip(&traj.states)
        .map(|(t, s)| std::iter::once(*t).chain(s.iter().copied()).map(num).collect())
        .collect();
    write_table(cfg, stdout, &["t", "xi1", "xi2", "theta", "phi", "x", "y", "z"], &rows)?;
    write_json(cfg.json.as_deref(), &traj)?;
    let xf = traj.final_state();
    let d: Vec<String> = (2..7).map(|k| num(xf[k] - x0[k])).collect();
    let mut line = format!(
        "simulate: net (dtheta, dphi, dx, dy, dz) = ({}), {} steps per leg",
        d.join(", "),
        traj.stats.steps_per_leg
    );
    if check_planar {
        line.push_str(&format!(
            "; max |dy| = {}, max |dphi| = {}",
            num(traj.max_deviation(5)),
            num(traj.max_deviation(3))
        ));
    }
    summary(stdout, line)
}

/// Constant term of `c0 + c1/z + c2/z²` through three samples.
fn extrapolate(z: [f64; 3], v: [f64; 3]) -> Result<f64, CliError> {
    let m = DMatrix::from_fn(3, 3, |i, j| z[i].powi(-(j as i32)));
    let c = m
        .lu()
        .solve(&DVector::from_row_slice(&v))
        .ok_or_else(|| CliError::Config("extrapolation nodes must be distinct".into()))?;
    Ok(c[0])
}

fn appendix_state(z: f64) -> [f64; 7] {
    [1.0, 2.0, PI / 3.0, PI / 3.0, 1.0, 2.0, z]
}

fn verify_appendix(cfg: &RunConfig, stdout: &mut dyn Write, z: f64) -> Result<(), CliError> {
    require_three(cfg, "verify-appendix")?;
    let a = cfg.a;
    let sw = swimmer3(cfg, a, WallProfile::flat())?;
    let s3 = 3f64.sqrt();
    let want = [
        [41.0 * s3 / 432.0, 41.0 / 144.0, 41.0 / 216.0],
        [-13.0 * s3 / 81.0, -13.0 / 27.0, -26.0 / 81.0],
        [-19.0 * s3 / 1296.0, -19.0 / 432.0, -19.0 / 648.0],
    ];
    // (quantity, target, computed, tolerance)
    let mut table: Vec<(String, f64, f64, f64)> = Vec::new();
    let z1 = sw.z_vectors(&appendix_state(z))?.z1;
    for (i, w) in want.iter().enumerate() {
        for (k, axis) in ["x", "y", "z"].iter().enumerate() {
            table.push((format!("Z1 {} {axis} / a", Z_WORDS[i]), w[k], z1[i][2 + k] / a, 1e-6));
        }
    }
    let zs: [f64; 3] = [40.0, 80.0, 160.0];
    let mut v = [0.0; 3];
    for (vk, &zk) in v.iter_mut().zip(&zs) {
        *vk = sw.z_vectors(&appendix_state(zk))?.z1[0][0] / a * zk.powi(4);
    }
    let target = 21627.0 * s3 / 57344.0;
    table.push(("Z1 [F1,F2] theta z^4 / a".into(), target, extrapolate(zs, v)?, 0.01 * target));

    let zs: [f64; 3] = [20.0, 30.0, 40.0];
    let mut v = [0.0; 3];
    for (vk, &zk) in v.iter_mut().zip(&zs) {
        *vk = PI * PI * zk.powi(24) * sw.det_int(&appendix_state(zk), [1.0, 0.0], [0.0, 0.0])? / a.powi(5);
    }
    let p = -2451455.0 + 1682769.0 * s3;
    let target = -4209544161.0 / 5279854836580352.0 * p;
    table.push(("det_int((1,0),(0,0)) pi^2 z^24 / a^5".into(), target, extrapolate(zs, v)?, 0.05 * target.abs()));

    let rows: Vec<Vec<String>> = table
        .iter()
        .map(|(q, t, c, tol)| {
            let err = (c - t).abs();
            vec![q.clone(), num(*t), num(*c), num(err), num(*tol), (err <= *tol).to_string()]
        })
        .collect();
    write_table(cfg, stdout, &["quantity", "target", "computed", "abs_error", "tolerance", "pass"], &rows)?;
    let doc: Vec<_> = table
        .iter()
        .map(|(q, t, c, tol)| json!({ "quantity": q, "target": t, "computed": c, "abs_error": (c - t).abs(), "tolerance": tol, "pass": (c - t).abs() <= *tol }))
        .collect();
    write_json(cfg.json.as_deref(), &doc)?;
    let passed = table.iter().filter(|(_, t, c, tol)| (c - t).abs() <= *tol).count();
    summary(stdout, format!("verify-appendix: {passed}/{} rows within tolerance", table.len()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extrapolation_recovers_a_quadratic_in_inverse_z() {
        let f = |z: f64| 2.5 - 3.0 / z + 7.0 / (z * z);
        let c = extrapolate([10.0, 20.0, 40.0], [f(10.0), f(20.0), f(40.0)]).unwrap();
        assert!((c - 2.5).abs() < 1e-12);
    }
}
