//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Runs sequentially so the wall-clock limits are measured without
//! competing test threads.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use lightfield_core::asgeirsson::{
    discrete_asgeirsson_report, random_configs, run_theorem_checks, theorem1_check, theorem2_check,
    worst_rel_diff, Theorem,
};
use lightfield_core::coords::{arctan2_normalized, round_trip_stats};
use lightfield_core::io::{decode_pnm, read_raster, read_geometry};
use lightfield_core::resample::{
    angular_bins, layout_size, render_polar_layout, select_shift_sign, to_polar_grid, Analytic,
    DiscreteLightfield, PolarGridParams, ShiftSign,
};
use lightfield_core::residuals::{
    john_residual, residual_sweep, uniform_points, Operator, StencilSpec,
};
use lightfield_core::synth::{radiance_closed_form, radiance_quadrature};
use lightfield_core::{Error, Exec, InXi, Ray, Scene, XiPoint};
use sha2::{Digest, Sha256};

type Check = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Check + 'a>);

const SEED: u64 = 20240601;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit_s: u64) -> Result<(), String> {
    ensure(elapsed < Duration::from_secs(limit_s), || {
        format!("took {:.2}s, limit {limit_s}s", elapsed.as_secs_f64())
    })
}

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures")
}

struct Run {
    code: i32,
    stderr: String,
}

fn lfcheck(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_lfcheck"))
        .args(args)
        .output()
        .expect("spawn lfcheck");
    Run {
        code: out.status.code().unwrap_or(-1),
        stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
    }
}

fn lfcheck_ok(args: &[&str]) -> Result<(), String> {
    let r = lfcheck(args);
    ensure(r.code == 0, || format!("lfcheck {} exited {}: {}", args.join(" "), r.code, r.stderr.trim()))
}

fn sha256(path: &Path) -> String {
    let bytes = std::fs::read(path).expect("read output");
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn p(path: &Path) -> &str {
    path.to_str().expect("utf-8 temp path")
}

// 1
fn coordinate_round_trip() -> Check {
    let t = Instant::now();
    let rays: Vec<Ray> = uniform_points(1_000_000, 100.0, SEED)
        .into_iter()
        .map(Ray::from_array)
        .collect();
    let stats = round_trip_stats(&rays, Exec::default());
    let elapsed = t.elapsed();
    ensure(stats.count == 1_000_000, || format!("checked {} rays", stats.count))?;
    // one rounding of the sum plus one of the halving, relative to the
    // largest component of the ray
    ensure(stats.xi_max_ulps <= 2.0, || {
        format!("xi round trip off by {} ulps of max|component|", stats.xi_max_ulps)
    })?;
    ensure(stats.polar_max_abs <= 1e-9, || {
        format!("polar round trip error {}", stats.polar_max_abs)
    })?;
    within(elapsed, 10)?;
    Ok(format!(
        "1e6 rays: xi err {:.2e} ({:.2} ulp), polar err {:.2e}, {:.2}s",
        stats.xi_max_abs,
        stats.xi_max_ulps,
        stats.polar_max_abs,
        elapsed.as_secs_f64()
    ))
}

// 2
fn arctan2_branch_table() -> Check {
    let exact = [
        ((1.0, 0.0), FRAC_PI_2),
        ((-1.0, 0.0), 3.0 * FRAC_PI_2),
        ((0.0, -1.0), PI),
    ];
    for ((y, x), want) in exact {
        let got = arctan2_normalized(y, x).map_err(|e| e.to_string())?;
        ensure(got == want, || format!("atan2({y}, {x}) = {got}, want {want}"))?;
    }
    // x > 0, and the +π / −π branches for x < 0, against the branch formulas
    let branches = [
        ((1.0, 2.0), (0.5f64).atan()),
        ((1.0, -2.0), (-0.5f64).atan() + PI),
        ((-1.0, -2.0), (0.5f64).atan() - PI + TAU),
        ((-1.0, 2.0), (-0.5f64).atan() + TAU),
    ];
    for ((y, x), want) in branches {
        let got = arctan2_normalized(y, x).map_err(|e| e.to_string())?;
        ensure((got - want).abs() <= 1e-15 && (0.0..TAU).contains(&got), || {
            format!("atan2({y}, {x}) = {got}, want {want}")
        })?;
    }
    ensure(matches!(arctan2_normalized(0.0, 0.0), Err(Error::UndefinedAngle)), || {
        "origin did not report an undefined angle".into()
    })?;
    Ok("pi/2, 3pi/2, pi exact; +-pi branches within 1e-15; origin undefined".into())
}

// 3
fn john_transform_oracle() -> Check {
    let scene = Scene::fixture();
    let hw = scene.oracle_half_width();
    let rays: Vec<Ray> = uniform_points(10_000, 10.0, SEED + 3)
        .into_iter()
        .map(Ray::from_array)
        .collect();
    let t = Instant::now();
    let errs = Exec::default().map_slice(&rays, |&r| {
        let cf = radiance_closed_form(&scene, r);
        let q = radiance_quadrature(&scene, r, hw, 4001).expect("valid quadrature");
        (cf - q).abs() / cf.abs().max(q.abs()).max(f64::MIN_POSITIVE)
    });
    let elapsed = t.elapsed();
    let worst = errs.iter().cloned().fold(0.0, f64::max);
    ensure(worst <= 1e-8, || format!("worst relative error {worst:e}"))?;
    within(elapsed, 30)?;
    Ok(format!("1e4 rays, worst rel err {worst:.2e}, {:.2}s", elapsed.as_secs_f64()))
}

// 4
fn pde_residuals() -> Check {
    let scene = Scene::fixture();
    let points = uniform_points(1000, 2.0, SEED + 4);
    let coarse = StencilSpec::new(0.05).map_err(|e| e.to_string())?;
    let fine = StencilSpec::new(0.025).map_err(|e| e.to_string())?;
    let mut notes = Vec::new();
    for op in [Operator::John, Operator::Ultrahyperbolic] {
        let a = residual_sweep(&scene, &points, coarse, op).map_err(|e| e.to_string())?;
        let b = residual_sweep(&scene, &points, fine, op).map_err(|e| e.to_string())?;
        let ratio = a.rms / b.rms;
        let rel = b.rms / b.field_max;
        ensure((3.0..=5.0).contains(&ratio), || format!("{op}: ratio {ratio}"))?;
        ensure(rel <= 1e-4, || format!("{op}: rms/field_max {rel:e}"))?;
        notes.push(format!("{op} ratio {ratio:.3} rms/max {rel:.1e}"));
    }
    let xv = |r: Ray| r.x * r.v;
    let worst = points
        .iter()
        .map(|&q| (john_residual(&xv, Ray::from_array(q), fine) + 1.0).abs())
        .fold(0.0, f64::max);
    ensure(worst <= 1e-10, || format!("x*v residual off -1 by {worst:e}"))?;
    lfcheck_ok(&["--assert", "--seed", "4", "check-john"])?;
    Ok(format!("{}; x*v -> -1 within {worst:.1e}; CLI --assert ok", notes.join("; ")))
}

// 5
fn theorem1() -> Check {
    let scene = Scene::fixture();
    let configs = random_configs(Theorem::SingleCircle, 20, 512, 1.0, 2.0, SEED + 5);
    ensure(configs.iter().all(|c| c.r1 > 0.0 && c.r1 <= 2.0), || "radius outside (0, 2]".into())?;
    let reports = run_theorem_checks(&InXi(&scene), &configs, Exec::default()).map_err(|e| e.to_string())?;
    let worst = reports.iter().map(|r| r.rel_diff).fold(0.0, f64::max);
    ensure(worst <= 1e-8, || format!("worst rel_diff {worst:e}"))?;
    let sq = |q: XiPoint| q.xi1 * q.xi1;
    for r in [0.25, 1.0, 2.0] {
        let rep = theorem1_check(&sq, XiPoint::default(), r, 512).map_err(|e| e.to_string())?;
        let err = (rep.lhs - rep.rhs - PI * r * r).abs();
        ensure(err <= 1e-10, || format!("xi1^2 at R={r}: lhs-rhs off pi R^2 by {err:e}"))?;
    }
    Ok(format!("20 configs, worst rel_diff {worst:.2e}; xi1^2 gives pi R^2"))
}

// 6
fn theorem2() -> Check {
    let scene = Scene::fixture();
    let configs = random_configs(Theorem::DoubleCircle, 20, 256, 1.0, 2.0, SEED + 6);
    ensure(configs.iter().all(|c| c.r1 != c.r2), || "equal radii drawn".into())?;
    let t = Instant::now();
    let reports = run_theorem_checks(&InXi(&scene), &configs, Exec::default()).map_err(|e| e.to_string())?;
    let elapsed = t.elapsed();
    let worst = reports.iter().map(|r| r.rel_diff).fold(0.0, f64::max);
    ensure(worst <= 1e-8, || format!("worst rel_diff {worst:e}"))?;
    within(elapsed, 60)?;
    let f = |q: XiPoint| q.xi1 * q.xi1 + q.xi4 * q.xi4;
    let rep = theorem2_check(&f, XiPoint::default(), 0.5, 1.5, 256).map_err(|e| e.to_string())?;
    let err = (rep.lhs - rep.rhs - TAU * TAU * (0.25 - 2.25)).abs();
    ensure(err <= 1e-10, || format!("xi1^2+xi4^2 counter-case off by {err:e}"))?;
    lfcheck_ok(&["--assert", "check-asgeirsson", "--mode", "continuous"])?;
    Ok(format!(
        "20 configs, worst rel_diff {worst:.2e}, {:.2}s; CLI --assert ok",
        elapsed.as_secs_f64()
    ))
}

// 7
fn discrete_asgeirsson() -> Check {
    let scene = Scene::fixture();
    let worst_for = |os: usize| -> Result<(f64, usize), String> {
        let params = PolarGridParams {
            oversample: os,
            ..PolarGridParams::new(4, 4)
        };
        let pl = to_polar_grid(&Analytic(&scene), &params).map_err(|e| e.to_string())?;
        let rows = discrete_asgeirsson_report(&pl);
        ensure(rows.iter().all(|r| r.r1 != r.r2), || "diagonal pair reported".into())?;
        let valid = rows.iter().filter(|r| r.fully_valid).count();
        let worst = worst_rel_diff(&rows, false).ok_or("no fully valid pairs")?;
        Ok((worst, valid))
    };
    let (w1, n1) = worst_for(1)?;
    let (w4, _) = worst_for(4)?;
    ensure(w1 <= 5e-2, || format!("worst rel_diff {w1:e}"))?;
    ensure(w4 < w1, || format!("oversampling x4 did not reduce worst rel_diff: {w4:e} vs {w1:e}"))?;
    lfcheck_ok(&["--assert", "check-asgeirsson", "--mode", "discrete"])?;
    Ok(format!("{n1} fully valid pairs, worst {w1:.2e}; x4 oversampling {w4:.2e}; CLI --assert ok"))
}

// 8
fn discretization_constants() -> Check {
    for r in 0..=10 {
        ensure(angular_bins(r) == 7 * r + 1, || format!("angular_bins({r}) = {}", angular_bins(r)))?;
    }
    let (r1max, r2max) = (4, 3);
    let pl = to_polar_grid(&Analytic(&Scene::fixture()), &PolarGridParams::new(r1max, r2max))
        .map_err(|e| e.to_string())?;
    let block = pl.block(2, 3).ok_or("block (2, 3) missing")?;
    ensure(block.len() == 330, || format!("block (2, 3) has {} bins", block.len()))?;
    let img = render_polar_layout(&pl, false);
    let height: usize = (0..=r1max).map(|r| 7 * r + 1).sum();
    let width: usize = (0..=r2max).map(|r| 7 * r + 1).sum();
    ensure(img.height == height && img.width == width, || {
        format!("layout {}x{}, want {width}x{height}", img.width, img.height)
    })?;
    ensure(layout_size(r1max, r2max, false) == (width, height), || "layout_size disagrees".into())?;
    Ok(format!("7R+1 for R=0..10; block (2,3) = 330 bins; layout height {height}"))
}

// 9
fn shift_handling(dir: &Path) -> Check {
    let geometry = fixtures().join("fixture.geometry");
    let raster = dir.join("depth9.pgm");
    let scene = fixtures().join("depth9.scene");
    lfcheck_ok(&["synth", "--scene", p(&scene), "--geometry", p(&geometry), "--out", p(&raster)])?;
    let mut hashes = Vec::new();
    for shift in ["0", "2", "5", "9"] {
        let mut run_hashes = Vec::new();
        for rep in 0..2 {
            let out = dir.join(format!("shift{shift}_{rep}.lfp"));
            lfcheck_ok(&[
                "to-polar", "--raster", p(&raster), "--geometry", p(&geometry), "--shift", shift,
                "--archive", p(&out),
            ])?;
            run_hashes.push(sha256(&out));
        }
        ensure(run_hashes[0] == run_hashes[1], || format!("shift {shift}: reruns differ"))?;
        hashes.push(run_hashes.swap_remove(0));
    }
    let mut distinct = hashes.clone();
    distinct.sort();
    distinct.dedup();
    ensure(distinct.len() == 4, || format!("only {} distinct archives", distinct.len()))?;

    // the scene sits at depth +9, so the walk must prefer the positive sign;
    // the same raster mirrored in u must prefer the negative one
    let geom = read_geometry(&geometry).map_err(|e| e.to_string())?;
    let img = read_raster(&raster).map_err(|e| e.to_string())?;
    let starts: Vec<Ray> = (-3..=3).map(|x| Ray::new(x as f64 * 1.5, 0.5, -1.0, 0.0)).collect();
    let lf = DiscreteLightfield::new(geom.clone(), img.clone()).map_err(|e| e.to_string())?;
    let picked = select_shift_sign(&lf, &starts, 5);
    ensure(picked == Some(ShiftSign::Positive), || format!("selected {picked:?} for depth +9"))?;
    let mirrored = mirror_microimages(&img, &geom);
    let lf = DiscreteLightfield::new(geom, mirrored).map_err(|e| e.to_string())?;
    let picked = select_shift_sign(&lf, &starts, 5);
    ensure(picked == Some(ShiftSign::Negative), || format!("selected {picked:?} for mirrored raster"))?;
    let short: Vec<&str> = hashes.iter().map(|h| &h[..12]).collect();
    Ok(format!("shifts 0/2/5/9 -> {}; sign selection +/- ok", short.join(" ")))
}

/// Reverses the order of microimage columns, which flips the sign of `u`
/// and therefore of every depth.
fn mirror_microimages(
    img: &lightfield_core::Raster,
    g: &lightfield_core::resample::LightfieldGeometry,
) -> lightfield_core::Raster {
    let mut out = img.clone();
    let cols = g.microimage_cols;
    for row in 0..img.height {
        for col in 0..img.width {
            let (mu, px) = (col / g.pitch_x, col % g.pitch_x);
            let src = (cols - 1 - mu) * g.pitch_x + px;
            out.set_pixel(col, row, img.pixel(src, row));
        }
    }
    out
}

// 10
fn figure_substitutes(dir: &Path) -> Check {
    let geometry = fixtures().join("fixture.geometry");
    let mut hashes = Vec::new();
    for rep in 0..2 {
        let raster = dir.join(format!("fixture_{rep}.pgm"));
        let archive = dir.join(format!("fixture_{rep}.lfp"));
        let layout = dir.join(format!("layout_{rep}.pgm"));
        let cmap = dir.join(format!("colormap_{rep}.ppm"));
        let orig9 = dir.join(format!("original9_{rep}.ppm"));
        let orig0 = dir.join(format!("original0_{rep}.ppm"));
        let cmap0 = dir.join(format!("colormap0_{rep}.ppm"));
        lfcheck_ok(&["synth", "--geometry", p(&geometry), "--out", p(&raster)])?;
        lfcheck_ok(&[
            "to-polar", "--raster", p(&raster), "--geometry", p(&geometry), "--archive", p(&archive),
            "--layout", p(&layout), "--separators",
        ])?;
        lfcheck_ok(&[
            "colormap", "--geometry", p(&geometry), "--shift", "9", "--colormap", p(&cmap), "--original", p(&orig9),
        ])?;
        lfcheck_ok(&[
            "colormap", "--geometry", p(&geometry), "--shift", "0", "--colormap", p(&cmap0), "--original", p(&orig0),
        ])?;
        hashes.push(
            [&raster, &archive, &layout, &cmap, &orig9, &orig0]
                .iter()
                .map(|f| sha256(f))
                .collect::<Vec<_>>(),
        );
    }
    ensure(hashes[0] == hashes[1], || "artifacts differ between identical runs".into())?;

    let cmap = decode_pnm(&std::fs::read(dir.join("colormap_0.ppm")).unwrap()).map_err(|e| e.to_string())?;
    ensure((cmap.width, cmap.height) == layout_size(7, 7, false), || "colormap size".into())?;
    let to8 = |v: f64| (v * 255.0).round() as u8;
    // block colors have no blue; gray bins do
    let mut greens: Vec<u8> = cmap.data.chunks(3).filter(|c| c[2] == 0.0).map(|c| to8(c[1])).collect();
    greens.sort();
    greens.dedup();
    let want: Vec<u8> = (1..=8).map(|k| (255.0 * k as f64 / 8.0).round() as u8).collect();
    ensure(greens == want, || format!("green tones {greens:?}, want {want:?}"))?;
    let gray = cmap.data.chunks(3).any(|c| c.iter().all(|&v| to8(v) == 128));
    ensure(gray, || "no gray out-of-raster bins".into())?;

    let o9 = std::fs::read(dir.join("original9_0.ppm")).unwrap();
    let o0 = std::fs::read(dir.join("original0_0.ppm")).unwrap();
    ensure(o9 != o0, || "shift 0 and 9 coverage maps identical".into())?;
    let short: Vec<&str> = hashes[0].iter().map(|h| &h[..12]).collect();
    Ok(format!("raster/archive/layout/colormap/orig9/orig0 = {}", short.join(" ")))
}

fn main() {
    // `cargo test -- <filter>` style arguments are accepted and ignored
    let dir = tempfile::tempdir().expect("temp dir");
    let criteria: Vec<Criterion> = vec![
        ("coordinate round trip", Box::new(coordinate_round_trip)),
        ("arctan2 branch table", Box::new(arctan2_branch_table)),
        ("John transform oracle", Box::new(john_transform_oracle)),
        ("PDE residuals", Box::new(pde_residuals)),
        ("Theorem 1 single circles", Box::new(theorem1)),
        ("Theorem 2 double circles", Box::new(theorem2)),
        ("discrete Asgeirsson sums", Box::new(discrete_asgeirsson)),
        ("discretization constants", Box::new(discretization_constants)),
        ("shift handling", Box::new(|| shift_handling(dir.path()))),
        ("figure substitutes", Box::new(|| figure_substitutes(dir.path()))),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS criterion {:>2} ({name}): {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {:>2} ({name}): {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
