//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits nonzero if any failed.

use std::collections::hash_map::DefaultHasher;
use std::f64::consts::PI;
use std::fs;
use std::hash::{Hash, Hasher};
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wheeltrace::bench::run_bench;
use wheeltrace::depth_model::{bundled_measurements, derive_mean_amplitude, fit_errors, DepthModel};
use wheeltrace::engine::{region_of_interest, stamp};
use wheeltrace::kinematics::{ackermann_angles, static_wheel_loads};
use wheeltrace::scenario::{simulate, ScenarioConfig};
use wheeltrace::terrain::{value_noise_terrain, NoiseParams};
use wheeltrace::timing::{time_stamps, SweepOptions};
use wheeltrace::trace_geometry::{depth_bound, deformation_depth, lateral_profile, longitudinal_profile, wave_frequency};
use wheeltrace::{Heightmap, PixelRegion, RoverSpec, SoilParams, WheelContact, WheelSpec};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, msg: String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg)
    }
}

// (load N, trough mm, crest mm, mean mm, amplitude mm)
const SWT_ROWS: [(f64, f64, f64, f64, f64); 5] = [
    (3.0, -6.5, 1.5, -2.50, 8.0),
    (5.0, -8.0, 0.5, -3.75, 8.5),
    (8.6, -9.5, -1.0, -5.25, 8.5),
    (12.9, -12.0, -3.0, -7.50, 9.0),
    (17.9, -13.5, -4.5, -9.00, 9.0),
];

fn table_points(pick: impl Fn(&(f64, f64, f64, f64, f64)) -> f64) -> Vec<(f64, f64)> {
    SWT_ROWS.iter().map(|r| (r.0, pick(r))).collect()
}

fn c1_table_derivation() -> Outcome {
    let t = Instant::now();
    let rows = bundled_measurements();
    check(rows.len() == 5, format!("{} bundled rows", rows.len()))?;
    for (m, &(load, trough, crest, mean, amp)) in rows.iter().zip(&SWT_ROWS) {
        check(m.load_n == load && m.trough_mm == trough && m.crest_mm == crest, format!("row {m:?}"))?;
        let (got_mean, got_amp) = derive_mean_amplitude(m).map_err(|e| e.to_string())?;
        check(
            got_mean == mean && got_amp == amp,
            format!("load {load}: ({got_mean}, {got_amp}) != ({mean}, {amp})"),
        )?;
    }
    Ok(format!("5/5 rows exact in {:?}", t.elapsed()))
}

fn c2_amplitude_regression() -> Outcome {
    let t = Instant::now();
    let model = DepthModel::fit(&bundled_measurements()).map_err(|e| e.to_string())?;
    let elapsed = t.elapsed();
    let (b0, b1) = (model.amp.intercept, model.amp.slope);
    check((7.90..=8.10).contains(&b0), format!("intercept {b0}"))?;
    check((0.055..=0.070).contains(&b1), format!("slope {b1}"))?;
    Ok(format!("A = {b0:.4} + {b1:.5} F in {elapsed:?}"))
}

fn c3_mean_regression() -> Outcome {
    let model = DepthModel::fit(&bundled_measurements()).map_err(|e| e.to_string())?;
    let (b0, b1) = (model.mu.intercept, model.mu.slope);
    check((-1.55..=-1.25).contains(&b0), format!("intercept {b0}"))?;
    check((-0.47..=-0.41).contains(&b1), format!("slope {b1}"))?;
    let mae = fit_errors(&model.mu, &table_points(|r| r.3)).map_err(|e| e.to_string())?.mae;
    check(mae <= 0.35, format!("MAE {mae}"))?;
    Ok(format!("mu = {b0:.4} + {b1:.5} F, MAE {mae:.4} mm"))
}

fn c4_trough_crest() -> Outcome {
    let model = DepthModel::published();
    let mut worst = 0.0f64;
    for &(load, trough, crest, _, _) in &SWT_ROWS {
        let (mu, a) = (model.mean_mm(load), model.amplitude_mm(load));
        worst = worst.max((mu - 0.5 * a - trough).abs()).max((mu + 0.5 * a - crest).abs());
    }
    check(worst <= 0.75, format!("worst residual {worst} mm"))?;
    // centerline stamp extremes are the same trough and crest
    let wheel = WheelSpec::rashid();
    let soil = SoilParams::from_degrees(60.0).unwrap();
    let n = wave_frequency(&wheel, 0.0).unwrap();
    for &(load, ..) in &SWT_ROWS {
        // h(0) = 1 is a crest, h(1/n) = -1 a trough
        let crest = deformation_depth(0.0, 0.0, load, 0.0, &wheel, &soil, &model).unwrap() * 1e3;
        let trough = deformation_depth(1.0 / n, 0.0, load, 0.0, &wheel, &soil, &model).unwrap() * 1e3;
        let (mu, a) = (model.mean_mm(load), model.amplitude_mm(load));
        check(
            (trough - (mu - 0.5 * a)).abs() < 1e-9 && (crest - (mu + 0.5 * a)).abs() < 1e-9,
            format!("stamp extremes at {load} N: {trough}, {crest}"),
        )?;
    }
    Ok(format!("worst |residual| {worst:.4} mm"))
}

/// Lateral profile transcribed branch by branch, `u = 2y/w` in `[-1, 1]`.
fn piecewise_g(u: f64, theta: f64) -> f64 {
    let t = theta.tan();
    if 1.0 - 1.0 / t < u && u <= 1.0 {
        t * u - t
    } else if -1.0 + 1.0 / t <= u && u <= 1.0 - 1.0 / t {
        -1.0
    } else {
        -t * u - t
    }
}

fn c5_profile_invariants() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let w = 0.1;
    let mut worst = 0.0f64;
    for deg in [45.0, 60.0, 75.0] {
        let theta: f64 = f64::to_radians(deg);
        for y in [0.5 * w, -0.5 * w] {
            let g = lateral_profile(y, w, theta);
            check(g == 0.0, format!("g({y}) = {g} at {deg} deg"))?;
        }
        for k in 0..1000 {
            let u = -1.0 + 2.0 * k as f64 / 999.0;
            let d = (lateral_profile(0.5 * w * u, w, theta) - piecewise_g(u, theta)).abs();
            worst = worst.max(d);
        }
    }
    check(worst <= 1e-12, format!("piecewise mismatch {worst}"))?;

    for _ in 0..100 {
        let wheel = WheelSpec {
            radius: rng.gen_range(0.05..0.5),
            width: 0.1,
            grouser_count: rng.gen_range(4..40),
            grouser_length: 0.0,
        };
        let s = rng.gen_range(0.0..0.9);
        let n = wave_frequency(&wheel, s).unwrap();
        let expected = wheel.grouser_count as f64 / (2.0 * PI * wheel.radius * (1.0 - s));
        check((n - expected).abs() <= 1e-12 * expected, format!("n {n} vs {expected}"))?;
        let period = 2.0 / n;
        for _ in 0..5 {
            let xi = rng.gen_range(-5.0..5.0);
            let d = (longitudinal_profile(xi + period, n) - longitudinal_profile(xi, n)).abs();
            check(d < 1e-9, format!("h not periodic: N={} r={} s={s} xi={xi} d={d}", wheel.grouser_count, wheel.radius))?;
        }
    }

    let model = DepthModel::published();
    let wheel = WheelSpec::rashid();
    for _ in 0..100_000 {
        let soil = SoilParams::from_degrees(rng.gen_range(10.0..89.0)).unwrap();
        let load = rng.gen_range(0.0..30.0);
        let s = rng.gen_range(0.0..0.95);
        let xi = rng.gen_range(-10.0..10.0);
        let y = rng.gen_range(-0.1..0.1);
        let dz = deformation_depth(xi, y, load, s, &wheel, &soil, &model).unwrap();
        let bound = depth_bound(load, &model);
        check(dz.abs() <= bound * (1.0 + 1e-12), format!("|{dz}| > {bound}"))?;
    }
    Ok(format!("max piecewise deviation {worst:.1e}; 100 periods; 1e5 bound samples"))
}

fn map_hash(map: &Heightmap, skip: Option<PixelRegion>) -> u64 {
    let mut h = DefaultHasher::new();
    for row in 0..map.rows() {
        for col in 0..map.cols() {
            if skip.is_some_and(|r| r.contains(col, row)) {
                continue;
            }
            map.get(col, row).to_bits().hash(&mut h);
        }
    }
    h.finish()
}

fn write_straight_scenario(dir: &Path, seed: u64) -> ScenarioConfig {
    fs::write(dir.join("drive.txt"), "0 0.1 0\n50 0 0\n").unwrap();
    let text = format!(
        "terrain.extent_m = 8.0\nterrain.resolution_m = 0.01\nterrain.seed = {seed}\n\
         soil.repose_angle_deg = 60.0\ntrajectory.path = \"drive.txt\"\n\
         rover.start_x_m = -2.5\noutput.mesh = \"none\"\n"
    );
    ScenarioConfig::parse(&text, dir).unwrap()
}

fn c6_stamping() -> Outcome {
    let wheel = WheelSpec::rashid();
    let soil = SoilParams::from_degrees(60.0).unwrap();
    let model = DepthModel::published();
    let terrain = value_noise_terrain(2.0, 0.005, &NoiseParams { seed: 3, ..Default::default() }).unwrap();

    let contact = WheelContact::new([0.13, -0.07], 0.4, 9.0, 0.1);
    let mut once = terrain.clone();
    stamp(&mut once, &contact, &wheel, &soil, &model).map_err(|e| e.to_string())?;
    let mut twice = once.clone();
    stamp(&mut twice, &contact, &wheel, &soil, &model).map_err(|e| e.to_string())?;
    check(once == twice, "double stamp changed the map".into())?;

    let roi = region_of_interest(&contact, &wheel, &terrain).map_err(|e| e.to_string())?;
    check(
        map_hash(&terrain, Some(roi)) == map_hash(&once, Some(roi)),
        "texels outside the ROI changed".into(),
    )?;

    // two overlapping stamps on one straight line share the trace frame
    let origin = [-0.5, 0.2];
    let a = WheelContact::new([0.0, 0.2], 0.0, 6.0, 0.0).with_trace(origin, [1.0, 0.0]);
    let b = WheelContact {
        position: [0.063, 0.2],
        ..a
    };
    let (mut ma, mut mb) = (terrain.clone(), terrain.clone());
    let ra = stamp(&mut ma, &a, &wheel, &soil, &model).unwrap().roi.unwrap();
    let rb = stamp(&mut mb, &b, &wheel, &soil, &model).unwrap().roi.unwrap();
    let foot = wheel.foot_profile();
    let mut shared = 0;
    for row in ra.min_row.max(rb.min_row)..=ra.max_row.min(rb.max_row) {
        for col in ra.min_col.max(rb.min_col)..=ra.max_col.min(rb.max_col) {
            let [x, y] = terrain.pixel_to_world(col as f64, row as f64);
            if foot.contains(x - a.position[0], y - 0.2) && foot.contains(x - b.position[0], y - 0.2) {
                check(
                    ma.get(col, row).to_bits() == mb.get(col, row).to_bits(),
                    format!("phase mismatch at ({col}, {row})"),
                )?;
                shared += 1;
            }
        }
    }
    check(shared > 100, format!("only {shared} shared texels"))?;

    let t = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_straight_scenario(dir.path(), 1);
    let summary = simulate(&cfg, &dir.path().join("out")).map_err(|e| e.to_string())?;
    let n = wave_frequency(&wheel, 0.0).unwrap();
    let expected = (5.0 * n / 2.0).round() as i64;
    check(expected == 56, format!("oracle count {expected}"))?;
    let counts: Vec<usize> = summary.wheels.iter().map(|w| w.trough_count).collect();
    for &c in &counts {
        check((c as i64 - 56).abs() <= 1, format!("trough counts {counts:?}"))?;
    }
    Ok(format!(
        "idempotent, local, {shared} shared texels coherent; troughs {counts:?} in {:?}",
        t.elapsed()
    ))
}

fn c7_ackermann() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    let mut done = 0;
    while done < 1000 {
        let delta: f64 = rng.gen_range(0.01..1.3) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let l: f64 = rng.gen_range(0.2..2.0);
        let t: f64 = rng.gen_range(0.1..1.5);
        if (l / delta.tan()).abs() <= 0.5 * t {
            continue;
        }
        let (left, right) = ackermann_angles(delta, l, t).map_err(|e| e.to_string())?;
        let (inner, outer) = if delta > 0.0 { (left, right) } else { (right, left) };
        let cot = |a: f64| 1.0 / a.tan().abs();
        let d = (cot(outer) - cot(inner) - t / l).abs();
        worst = worst.max(d);
        done += 1;
    }
    check(worst <= 1e-9, format!("cot identity off by {worst}"))?;

    let mut load_err = 0.0f64;
    for _ in 0..1000 {
        let spec = RoverSpec {
            wheelbase: rng.gen_range(0.3..2.0),
            track: rng.gen_range(0.3..2.0),
            mass: rng.gen_range(1.0..500.0),
            gravity: rng.gen_range(1.0..10.0),
            com_offset: [0.0, 0.0],
            wheel: WheelSpec::rashid(),
            slip: 0.0,
        };
        let spec = RoverSpec {
            com_offset: [
                rng.gen_range(-0.45..0.45) * spec.wheelbase,
                rng.gen_range(-0.45..0.45) * spec.track,
            ],
            ..spec
        };
        let loads = static_wheel_loads(&spec).map_err(|e| e.to_string())?;
        load_err = load_err.max((loads.iter().sum::<f64>() - spec.mass * spec.gravity).abs());
    }
    check(load_err <= 1e-9, format!("load sum off by {load_err}"))?;
    Ok(format!("cot residual {worst:.1e}, load sum residual {load_err:.1e}"))
}

fn c8_scaling() -> Outcome {
    let sizes: Vec<(f64, f64)> = [10.0, 20.0, 40.0]
        .iter()
        .flat_map(|&e| [0.05, 0.1, 0.2].map(|r| (e, r)))
        .collect();
    let opts = SweepOptions {
        stamps: 200,
        remesh_reps: 7,
        load_n: 8.0,
    };
    let report = run_bench(&sizes, &opts).map_err(|e| e.to_string())?;
    check(report.rows.len() >= 9, format!("{} rows", report.rows.len()))?;
    let r2 = report.remesh_r2;
    check(r2 >= 0.9, format!("remesh R^2 {r2}"))?;

    // stamp time, smallest vs largest map at 0.05 m/texel; rounds interleave
    // so drift in machine load hits both maps alike
    let opts = SweepOptions {
        stamps: 2000,
        ..opts
    };
    let small = Heightmap::square(10.0, 0.05, 0.0).unwrap();
    let large = Heightmap::square(40.0, 0.05, 0.0).unwrap();
    let (mut ts, mut tl) = (f64::INFINITY, f64::INFINITY);
    for _ in 0..3 {
        ts = ts.min(time_stamps(small.clone(), &opts));
        tl = tl.min(time_stamps(large.clone(), &opts));
    }
    let ratio = tl / ts;
    check((0.5..=2.0).contains(&ratio), format!("stamp time ratio {ratio} ({ts} vs {tl} ms)"))?;
    Ok(format!(
        "remesh R^2 {r2:.4}, {:.2} ms at 1e6 texels; stamp ratio 40m/10m {ratio:.3}",
        report.remesh_ms_at_1m()
    ))
}

fn c9_determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_straight_scenario(dir.path(), 42);
    simulate(&cfg, &dir.path().join("a")).map_err(|e| e.to_string())?;
    simulate(&cfg, &dir.path().join("b")).map_err(|e| e.to_string())?;
    let a = fs::read(dir.path().join("a/heightmap_final.rgt")).unwrap();
    let b = fs::read(dir.path().join("b/heightmap_final.rgt")).unwrap();
    check(a == b, "two identical runs differ".into())?;

    let map = Heightmap::load(dir.path().join("a/heightmap_final.rgt")).map_err(|e| e.to_string())?;
    let path = dir.path().join("again.rgt");
    map.save(&path).map_err(|e| e.to_string())?;
    let back = Heightmap::load(&path).map_err(|e| e.to_string())?;
    check(back == map && fs::read(&path).unwrap() == a, "round trip not bit-exact".into())?;

    for (c0, r0, c1, r1) in [(0, 0, 1, 1), (10, 20, 19, 24), (0, 0, 799, 799), (5, 5, 5, 40)] {
        let region = PixelRegion::new(c0, r0, c1, r1);
        let (w, h) = (region.width(), region.height());
        match map.export_mesh(Some(region)) {
            Ok(mesh) => check(
                mesh.vertices.len() == w * h && mesh.faces.len() == 2 * (w - 1) * (h - 1),
                format!("{w}x{h}: {} vertices, {} faces", mesh.vertices.len(), mesh.faces.len()),
            )?,
            Err(_) => check(w < 2 || h < 2, format!("{w}x{h} region rejected"))?,
        }
    }
    Ok(format!("{} byte snapshots identical, round trip exact, mesh counts exact", a.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("table derivation", c1_table_derivation),
        ("amplitude regression", c2_amplitude_regression),
        ("mean regression", c3_mean_regression),
        ("trough/crest reproduction", c4_trough_crest),
        ("profile invariants", c5_profile_invariants),
        ("stamping properties", c6_stamping),
        ("ackermann and loads", c7_ackermann),
        ("performance scaling", c8_scaling),
        ("determinism and round trips", c9_determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("criterion {} {name}: PASS ({detail})", i + 1),
            Err(why) => {
                println!("criterion {} {name}: FAIL ({why})", i + 1);
                failed += 1;
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
