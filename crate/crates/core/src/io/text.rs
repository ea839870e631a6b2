//! Scene and geometry text files.
//!
//! Scene: one emitter per line, `a b c sigma amplitude`, whitespace
//! separated. Geometry: one `key = value` per line. Both accept blank lines
//! and `#` comments.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::resample::LightfieldGeometry;
use crate::synth::{GaussianBlob, Scene};

/// Content lines with 1-based numbers, comments stripped.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let body = line.split('#').next().unwrap_or("").trim();
        (!body.is_empty()).then_some((i + 1, body))
    })
}

fn parse_num<T: FromStr>(line: usize, what: &str, s: &str) -> Result<T> {
    s.parse()
        .map_err(|_| Error::parse(line, format!("cannot parse {what} from {s:?}")))
}

pub fn parse_scene(text: &str) -> Result<Scene> {
    let mut blobs = Vec::new();
    let mut last = 0;
    for (line, body) in content_lines(text) {
        last = line;
        let fields: Vec<&str> = body.split_whitespace().collect();
        if fields.len() != 5 {
            return Err(Error::parse(line, format!("expected 5 fields, found {}", fields.len())));
        }
        let v: Vec<f64> = fields
            .iter()
            .zip(["a", "b", "c", "sigma", "amplitude"])
            .map(|(f, what)| parse_num(line, what, f))
            .collect::<Result<_>>()?;
        let blob = GaussianBlob::new([v[0], v[1], v[2]], v[3], v[4]).map_err(|e| Error::parse(line, e.to_string()))?;
        blobs.push(blob);
    }
    Scene::new(blobs).map_err(|e| Error::parse(last.max(1), e.to_string()))
}

pub fn format_scene(scene: &Scene) -> String {
    let mut out = String::from("# a b c sigma amplitude\n");
    for b in scene.blobs() {
        let [a, bb, c] = b.center;
        let _ = writeln!(out, "{a} {bb} {c} {} {}", b.sigma, b.amplitude);
    }
    out
}

pub fn read_scene(path: &Path) -> Result<Scene> {
    parse_scene(&super::read_text(path)?)
}

pub fn write_scene(scene: &Scene, path: &Path) -> Result<()> {
    super::write_atomic(path, format_scene(scene).as_bytes())
}

const GEOMETRY_KEYS: [&str; 9] = [
    "cols",
    "rows",
    "pitch_x",
    "pitch_y",
    "ref_micro_u",
    "ref_micro_v",
    "ref_pixel_x",
    "ref_pixel_y",
    "shift",
];

pub fn parse_geometry(text: &str) -> Result<LightfieldGeometry> {
    let mut seen: BTreeMap<&str, (usize, &str)> = BTreeMap::new();
    let mut last = 0;
    for (line, body) in content_lines(text) {
        last = line;
        let (key, value) = body
            .split_once('=')
            .ok_or_else(|| Error::parse(line, format!("expected `key = value`, found {body:?}")))?;
        let key = key.trim();
        let value = value.trim();
        let Some(&known) = GEOMETRY_KEYS.iter().find(|&&k| k == key) else {
            return Err(Error::parse(line, format!("unknown key {key:?}")));
        };
        if let Some((first, _)) = seen.insert(known, (line, value)) {
            return Err(Error::parse(line, format!("duplicate key {key:?} (first on line {first})")));
        }
    }
    let int = |key: &str| -> Result<usize> {
        let (line, v) = seen
            .get(key)
            .ok_or_else(|| Error::parse(last.max(1), format!("missing key {key:?}")))?;
        parse_num(*line, key, v)
    };
    let (shift_line, shift) = *seen
        .get("shift")
        .ok_or_else(|| Error::parse(last.max(1), "missing key \"shift\""))?;
    let shift: f64 = parse_num(shift_line, "shift", shift)?;
    LightfieldGeometry::new(
        int("cols")?,
        int("rows")?,
        int("pitch_x")?,
        int("pitch_y")?,
        (int("ref_micro_u")?, int("ref_micro_v")?),
        (int("ref_pixel_x")?, int("ref_pixel_y")?),
        shift,
    )
}

pub fn format_geometry(g: &LightfieldGeometry) -> String {
    let values = [
        g.microimage_cols.to_string(),
        g.microimage_rows.to_string(),
        g.pitch_x.to_string(),
        g.pitch_y.to_string(),
        g.ref_micro.0.to_string(),
        g.ref_micro.1.to_string(),
        g.ref_pixel.0.to_string(),
        g.ref_pixel.1.to_string(),
        g.shift.to_string(),
    ];
    GEOMETRY_KEYS
        .iter()
        .zip(values)
        .map(|(k, v)| format!("{k} = {v}\n"))
        .collect()
}

pub fn read_geometry(path: &Path) -> Result<LightfieldGeometry> {
    parse_geometry(&super::read_text(path)?)
}

pub fn write_geometry(g: &LightfieldGeometry, path: &Path) -> Result<()> {
    super::write_atomic(path, format_geometry(g).as_bytes())
}
