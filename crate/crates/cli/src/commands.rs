use std::io::Write;
use std::path::Path;

use lightfield_core::asgeirsson::{
    discrete_asgeirsson_report, random_configs, run_theorem_checks, worst_rel_diff, Theorem,
};
use lightfield_core::coords::round_trip_stats;
use lightfield_core::io::{
    pair_table, read_geometry, read_polar_archive, read_raster, read_scene, residual_table,
    theorem_table, write_atomic, write_polar_archive, write_raster, CsvTable,
};
use lightfield_core::resample::{
    render_colormap, render_coordinate_map_original, render_polar_layout, to_polar_grid, Analytic,
    Coverage, DiscreteLightfield, LightfieldGeometry, PolarGridParams, PolarLightfield, ShiftSign,
};
use lightfield_core::residuals::{residual_sweep, uniform_points, Operator, ResidualReport, StencilSpec};
use lightfield_core::synth::sample_plenoptic_raster;
use lightfield_core::{InXi, Ray, Scene};

use crate::args::{
    CheckAsgeirssonArgs, CheckJohnArgs, Cli, ColormapArgs, Command, Mode, PolarArgs, RoundtripArgs,
    SceneArg, ShiftArgs, SignArg, SynthArgs, ToPolarArgs, Which,
};
use crate::Failure;

type Outcome = std::result::Result<(), Failure>;

/// Tolerances applied under `--assert`.
const CONTINUOUS_TOL: f64 = 1e-8;
const DISCRETE_TOL: f64 = 5e-2;
const RESIDUAL_RATIO: (f64, f64) = (3.0, 5.0);
const RESIDUAL_REL_RMS: f64 = 1e-4;
const XI_MAX_ULPS: f64 = 2.0;
const POLAR_MAX_ABS: f64 = 1e-9;

/// Resolved configuration, echoed to stderr and into CSV headers.
struct Echo(Vec<String>);

impl Echo {
    fn new(cli: &Cli, command: &str) -> Self {
        let threads = cli.threads.map_or("auto".to_string(), |n| n.to_string());
        Echo(vec![
            format!("lfcheck {command}"),
            format!("seed={}", cli.seed),
            format!("threads={threads}"),
            format!("assert={}", cli.assert_mode),
        ])
    }

    fn set(&mut self, key: &str, value: impl std::fmt::Display) {
        self.0.push(format!("{key}={value}"));
    }

    fn print(&self) {
        for line in &self.0 {
            eprintln!("# {line}");
        }
    }

    fn annotate(&self, mut table: CsvTable) -> CsvTable {
        let mut comments = self.0.clone();
        comments.append(&mut table.comments);
        table.comments = comments;
        table
    }
}

pub fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Synth(a) => synth(cli, a),
        Command::CheckJohn(a) => check_john(cli, a),
        Command::CheckAsgeirsson(a) => check_asgeirsson(cli, a),
        Command::ToPolar(a) => to_polar(cli, a),
        Command::Colormap(a) => colormap(cli, a),
        Command::RoundtripCheck(a) => roundtrip(cli, a),
    }
}

fn load_scene(arg: &SceneArg, echo: &mut Echo) -> Result<Scene, Failure> {
    match &arg.scene {
        Some(p) => {
            echo.set("scene", p.display());
            Ok(read_scene(p)?)
        }
        None => {
            echo.set("scene", "<fixture>");
            Ok(Scene::fixture())
        }
    }
}

fn emit_csv(table: &CsvTable, out: Option<&Path>) -> Outcome {
    let bytes = table.to_bytes()?;
    match out {
        Some(p) => write_atomic(p, &bytes)?,
        None => std::io::stdout()
            .write_all(&bytes)
            .map_err(|e| Failure::Data(e.into()))?,
    }
    Ok(())
}

fn check(ok: bool, assert_mode: bool, msg: impl FnOnce() -> String) -> Outcome {
    if ok || !assert_mode {
        return Ok(());
    }
    Err(Failure::Numeric(msg()))
}

fn polar_params(p: &PolarArgs, seed: u64, echo: &mut Echo) -> Result<PolarGridParams, Failure> {
    let params = PolarGridParams {
        r1max: p.r1max,
        r2max: p.r2max,
        rho: p.rho,
        oversample: p.oversample,
        jitter: p.jitter.then_some(seed),
    };
    params.validate()?;
    echo.set("r1max", params.r1max);
    echo.set("r2max", params.r2max);
    echo.set("rho", params.rho);
    echo.set("oversample", params.oversample);
    echo.set("jitter", p.jitter);
    Ok(params)
}

fn shifted_geometry(path: &Path, s: &ShiftArgs, echo: &mut Echo) -> Result<LightfieldGeometry, Failure> {
    let g = read_geometry(path)?;
    let sign = match s.shift_sign {
        SignArg::Positive => ShiftSign::Positive,
        SignArg::Negative => ShiftSign::Negative,
    };
    let shift = s.shift.unwrap_or(g.shift);
    let g = g.with_shift(shift, sign)?;
    echo.set("geometry", path.display());
    echo.set("shift", shift);
    echo.set("shift_sign", format!("{:?}", s.shift_sign).to_lowercase());
    Ok(g)
}

fn synth(cli: &Cli, a: &SynthArgs) -> Outcome {
    let mut echo = Echo::new(cli, "synth");
    let scene = load_scene(&a.scene, &mut echo)?;
    let geom = read_geometry(&a.geometry)?;
    echo.set("geometry", a.geometry.display());
    let lf = sample_plenoptic_raster(&scene, &geom);
    let peak = lf.raster().max_value();
    let raster = if peak > 0.0 {
        lf.raster().scaled(1.0 / peak)
    } else {
        lf.into_raster()
    };
    echo.set("size", format!("{}x{}", raster.width, raster.height));
    echo.set("peak_radiance", peak);
    echo.set("maxval", a.maxval);
    echo.set("out", a.out.display());
    echo.print();
    write_raster(&raster, &a.out, a.maxval)?;
    Ok(())
}

fn check_john(cli: &Cli, a: &CheckJohnArgs) -> Outcome {
    let mut echo = Echo::new(cli, "check-john");
    let scene = load_scene(&a.scene, &mut echo)?.scaled(a.scale)?;
    if a.steps.is_empty() {
        return Err(Failure::Usage("at least one --h is required".into()));
    }
    let stencils = a
        .steps
        .iter()
        .map(|&h| StencilSpec::new(h))
        .collect::<lightfield_core::Result<Vec<_>>>()?;
    let operators: &[Operator] = match a.which {
        Which::John => &[Operator::John],
        Which::Ultrahyperbolic => &[Operator::Ultrahyperbolic],
        Which::Both => &[Operator::John, Operator::Ultrahyperbolic],
    };
    echo.set("scale", a.scale);
    echo.set("h", a.steps.iter().map(f64::to_string).collect::<Vec<_>>().join(" "));
    echo.set("n_points", a.n_points);
    echo.set("extent", a.extent);
    echo.set("which", format!("{:?}", a.which).to_lowercase());
    echo.print();

    let points = uniform_points(a.n_points, a.extent, cli.seed);
    let mut table = CsvTable::new(&[]);
    let mut notes = Vec::new();
    let mut failures = Vec::new();
    for &op in operators {
        let reports = stencils
            .iter()
            .map(|&st| residual_sweep(&scene, &points, st, op))
            .collect::<lightfield_core::Result<Vec<ResidualReport>>>()?;
        let last = reports.last().expect("non-empty stencil list");
        notes.push(format!("{op} field_max={}", last.field_max));
        for pair in reports.windows(2) {
            let ratio = pair[0].rms / pair[1].rms;
            notes.push(format!("{op} rms_ratio h={}/h={} = {ratio}", pair[0].h, pair[1].h));
            if !(RESIDUAL_RATIO.0..=RESIDUAL_RATIO.1).contains(&ratio) {
                failures.push(format!("{op}: rms ratio {ratio} outside [3, 5]"));
            }
        }
        let rel = last.rms / last.field_max;
        notes.push(format!("{op} rms/field_max at h={} = {rel}", last.h));
        if rel.is_nan() || rel > RESIDUAL_REL_RMS {
            failures.push(format!("{op}: rms/field_max {rel} above {RESIDUAL_REL_RMS}"));
        }
        let section = residual_table(&reports);
        if table.header.is_empty() {
            table = section;
        } else {
            table.extend(section);
        }
    }
    for n in &notes {
        eprintln!("# {n}");
    }
    let mut table = echo.annotate(table);
    table.comments.extend(notes);
    emit_csv(&table, a.out.as_deref())?;
    check(failures.is_empty(), cli.assert_mode, || failures.join("; "))
}

fn check_asgeirsson(cli: &Cli, a: &CheckAsgeirssonArgs) -> Outcome {
    let mut echo = Echo::new(cli, "check-asgeirsson");
    echo.set("mode", format!("{:?}", a.mode).to_lowercase());
    match a.mode {
        Mode::Continuous => {
            if a.archive.is_some() {
                return Err(Failure::Usage("--archive only applies to --mode discrete".into()));
            }
            let scene = load_scene(&a.scene, &mut echo)?;
            let tol = a.tol.unwrap_or(CONTINUOUS_TOL);
            echo.set("configs", a.configs);
            echo.set("n1", a.n1);
            echo.set("n2", a.n2);
            echo.set("center_extent", a.center_extent);
            echo.set("max_radius", a.max_radius);
            echo.set("tol", tol);
            echo.print();
            let mut configs = random_configs(
                Theorem::SingleCircle,
                a.configs,
                a.n1,
                a.center_extent,
                a.max_radius,
                cli.seed,
            );
            configs.extend(random_configs(
                Theorem::DoubleCircle,
                a.configs,
                a.n2,
                a.center_extent,
                a.max_radius,
                cli.seed.wrapping_add(1),
            ));
            let reports = run_theorem_checks(&InXi(&scene), &configs, Default::default())?;
            let worst = reports.iter().map(|r| r.rel_diff).fold(0.0, f64::max);
            let note = format!("worst rel_diff={worst}");
            eprintln!("# {note}");
            let table = echo.annotate(theorem_table(&reports)).comment(note);
            emit_csv(&table, a.out.as_deref())?;
            check(worst <= tol, cli.assert_mode, || {
                format!("worst rel_diff {worst} above {tol}")
            })
        }
        Mode::Discrete => {
            let pl = match &a.archive {
                Some(p) => {
                    if a.scene.scene.is_some() {
                        return Err(Failure::Usage("give either --scene or --archive".into()));
                    }
                    echo.set("archive", p.display());
                    read_polar_archive(p)?
                }
                None => {
                    let scene = load_scene(&a.scene, &mut echo)?;
                    let params = polar_params(&a.polar, cli.seed, &mut echo)?;
                    to_polar_grid(&Analytic(&scene), &params)?
                }
            };
            let tol = a.tol.unwrap_or(DISCRETE_TOL);
            echo.set("include_partial", a.include_partial);
            echo.set("tol", tol);
            echo.print();
            let rows = discrete_asgeirsson_report(&pl);
            let worst = worst_rel_diff(&rows, a.include_partial);
            let note = match worst {
                Some(w) => format!("worst rel_diff={w}"),
                None => "worst rel_diff=none (no eligible pairs)".to_string(),
            };
            eprintln!("# {note}");
            let table = echo.annotate(pair_table(&rows)).comment(note);
            emit_csv(&table, a.out.as_deref())?;
            match worst {
                Some(w) => check(w <= tol, cli.assert_mode, || {
                    format!("worst rel_diff {w} above {tol}")
                }),
                None => check(false, cli.assert_mode, || "no pair is eligible for the check".into()),
            }
        }
    }
}

fn valid_fraction(pl: &PolarLightfield) -> f64 {
    let (valid, total) = pl.blocks().iter().fold((0, 0), |(v, t), b| {
        (v + b.mask().iter().filter(|&&m| m).count(), t + b.len())
    });
    valid as f64 / total as f64
}

fn to_polar(cli: &Cli, a: &ToPolarArgs) -> Outcome {
    let mut echo = Echo::new(cli, "to-polar");
    let geom = shifted_geometry(&a.geometry, &a.shift, &mut echo)?;
    let raster = read_raster(&a.raster)?;
    echo.set("raster", a.raster.display());
    let params = polar_params(&a.polar, cli.seed, &mut echo)?;
    let lf = DiscreteLightfield::new(geom, raster)?;
    let pl = to_polar_grid(&lf, &params)?;
    echo.set("archive", a.archive.display());
    if let Some(p) = &a.layout {
        echo.set("layout", p.display());
        echo.set("separators", a.separators);
    }
    echo.set("valid_fraction", valid_fraction(&pl));
    echo.print();
    write_polar_archive(&pl, &a.archive)?;
    if let Some(p) = &a.layout {
        write_raster(&render_polar_layout(&pl, a.separators), p, 255)?;
    }
    Ok(())
}

fn colormap(cli: &Cli, a: &ColormapArgs) -> Outcome {
    let mut echo = Echo::new(cli, "colormap");
    let geom = shifted_geometry(&a.geometry, &a.shift, &mut echo)?;
    let polar = PolarArgs {
        r1max: a.r1max,
        r2max: a.r2max,
        rho: a.rho,
        oversample: a.oversample,
        jitter: false,
    };
    let params = polar_params(&polar, cli.seed, &mut echo)?;
    let pl = to_polar_grid(&Coverage(&geom), &params)?;
    let map = render_coordinate_map_original(&geom, &params);
    echo.set("valid_fraction", valid_fraction(&pl));
    echo.set("covered_pixels", map.covered);
    echo.set("collisions", map.collisions);
    echo.set("colormap", a.colormap.display());
    echo.set("original", a.original.display());
    echo.print();
    write_raster(&render_colormap(&pl), &a.colormap, 255)?;
    write_raster(&map.image, &a.original, 255)?;
    Ok(())
}

fn roundtrip(cli: &Cli, a: &RoundtripArgs) -> Outcome {
    let mut echo = Echo::new(cli, "roundtrip-check");
    echo.set("n", a.n);
    echo.set("extent", a.extent);
    echo.print();
    let rays: Vec<Ray> = uniform_points(a.n, a.extent, cli.seed)
        .into_iter()
        .map(Ray::from_array)
        .collect();
    let stats = round_trip_stats(&rays, Default::default());
    let mut table = CsvTable::new(&["count", "xi_max_abs", "xi_max_ulps", "polar_max_abs"]);
    table.rows.push(vec![
        stats.count.to_string(),
        stats.xi_max_abs.to_string(),
        stats.xi_max_ulps.to_string(),
        stats.polar_max_abs.to_string(),
    ]);
    emit_csv(&echo.annotate(table), a.out.as_deref())?;
    check(
        stats.xi_max_ulps <= XI_MAX_ULPS && stats.polar_max_abs <= POLAR_MAX_ABS,
        cli.assert_mode,
        || {
            format!(
                "xi error {} (ulps of max component, limit {XI_MAX_ULPS}), polar error {} (limit {POLAR_MAX_ABS})",
                stats.xi_max_ulps, stats.polar_max_abs
            )
        },
    )
}
