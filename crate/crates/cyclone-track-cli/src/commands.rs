//! Subcommand implementations.
//!
//! Every command computes its artifacts fully before writing any file, so
//! bad flags or numerical failures never leave partial outputs behind.

use clap::Args;
use cyclone_track::baroclinic::{self, BaroclinicState};
use cyclone_track::barotropic::{self, integration_constants, BarotropicState};
use cyclone_track::fitting::{
    find_b0, fixed_b0_fit, forecast as forecast_plane, sweep_track, FitConfig, PlanePoint,
};
use cyclone_track::friction::collapse_simulation;
use cyclone_track::geo::{
    self, evaluate_forecast, parse_track, plane_to_track, write_track, FitReport, Track,
};
use cyclone_track::trajectory::closed_form_coefficients;
use cyclone_track::{coriolis_parameter, two_dim_gamma, ModelParams};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

type CmdResult = Result<(), Box<dyn std::error::Error>>;
type WindowContext = ([PlanePoint; 3], (f64, f64), f64);

/// Physical-parameter flags shared by the model-driving commands.
#[derive(Args, Debug)]
pub struct ParamFlags {
    /// Latitude used for the Coriolis parameter, degrees.
    #[arg(long, conflicts_with = "coriolis")]
    lat: Option<f64>,
    /// Coriolis parameter, 1/s (alternative to --lat).
    #[arg(long)]
    coriolis: Option<f64>,
    /// Conventional adiabatic exponent; reduced internally.
    #[arg(long, default_value_t = 1.4, conflicts_with = "gamma")]
    gamma3d: f64,
    /// Reduced two-dimensional exponent, in (1, 2) (alternative to --gamma3d).
    #[arg(long)]
    gamma: Option<f64>,
    /// Pressure-gradient coupling constant.
    #[arg(long, default_value_t = 0.1)]
    c0: f64,
    /// Specific gas constant, J/(kg K).
    #[arg(long, default_value_t = 287.0)]
    gas_constant: f64,
    /// Turbulent shear viscosity.
    #[arg(long, default_value_t = 0.0)]
    mu: f64,
    /// Second viscosity.
    #[arg(long, default_value_t = 0.0)]
    lambda: f64,
    /// Heat conduction coefficient.
    #[arg(long, default_value_t = 0.0)]
    kappa: f64,
    /// Ocean heat inflow.
    #[arg(long, default_value_t = 0.0)]
    xi: f64,
    /// Surface-friction rate, 1/s.
    #[arg(long, default_value_t = 0.0)]
    k: f64,
}

impl ParamFlags {
    fn build(&self) -> Result<ModelParams, Box<dyn std::error::Error>> {
        let coriolis = match (self.lat, self.coriolis) {
            (Some(lat), None) => coriolis_parameter(lat)?,
            (None, Some(l)) => l,
            (None, None) => return Err("one of --lat or --coriolis is required".into()),
            (Some(_), Some(_)) => unreachable!("clap enforces the conflict"),
        };
        let gamma = match self.gamma {
            Some(g) => g,
            None => two_dim_gamma(self.gamma3d)?,
        };
        Ok(ModelParams::new(gamma, coriolis, self.c0)?
            .with_gas_constant(self.gas_constant)?
            .with_heat_terms(self.mu, self.lambda, self.kappa, self.xi)?
            .with_friction(self.k)?)
    }
}

fn read_to_string(path: &Path) -> Result<String, Box<dyn std::error::Error>> {
    fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()).into())
}

fn write_file(path: &Path, contents: &str) -> CmdResult {
    fs::write(path, contents).map_err(|e| format!("cannot write {}: {e}", path.display()).into())
}

fn duration_seconds(
    days: Option<f64>,
    hours: Option<f64>,
) -> Result<f64, Box<dyn std::error::Error>> {
    let t = match (days, hours) {
        (Some(d), None) => d * 86_400.0,
        (None, Some(h)) => h * 3_600.0,
        (None, None) => return Err("one of --days or --hours is required".into()),
        (Some(_), Some(_)) => return Err("--days conflicts with --hours".into()),
    };
    if !(t >= 0.0) {
        return Err("the duration must be non-negative".into());
    }
    Ok(t)
}

// ---------------------------------------------------------------- simulate

#[derive(Args, Debug)]
pub struct SimulateArgs {
    /// Which coefficient system to integrate.
    #[arg(long, value_parser = ["barotropic", "baroclinic", "friction"])]
    model: String,
    /// JSON file with the initial state.
    #[arg(long)]
    state: PathBuf,
    #[command(flatten)]
    params: ParamFlags,
    /// Integration step, seconds.
    #[arg(long, default_value_t = 60.0)]
    dt: f64,
    /// Run length in days.
    #[arg(long)]
    days: Option<f64>,
    /// Run length in hours.
    #[arg(long)]
    hours: Option<f64>,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
}

fn barotropic_csv(series: &[(f64, BarotropicState)]) -> String {
    let mut out = String::from("t_hours,a,b,A,M,N,K,v1,v2,x1,x2\n");
    for (t, s) in series {
        writeln!(
            out,
            "{:.6},{:.9e},{:.9e},{:.9e},{:.9e},{:.9e},{:.9e},{:.9e},{:.9e},{:.9e},{:.9e}",
            t / 3600.0,
            s.div,
            s.rot,
            s.curvature,
            s.grad[0],
            s.grad[1],
            s.core,
            s.vel[0],
            s.vel[1],
            s.pos[0],
            s.pos[1]
        )
        .expect("string writes cannot fail");
    }
    out
}

pub fn simulate(args: &SimulateArgs) -> CmdResult {
    let params = args.params.build()?;
    let t_end = duration_seconds(args.days, args.hours)?;
    let state_text = read_to_string(&args.state)?;
    match args.model.as_str() {
        "baroclinic" => {
            let s0: BaroclinicState =
                serde_json::from_str(&state_text).map_err(|e| format!("bad state file: {e}"))?;
            let series = baroclinic::simulate(&s0, &params, args.dt, t_end)?;
            let c_ref = baroclinic::baroclinic_coupling(&s0, &params)?;
            let mut drift = 0.0f64;
            for (_, s) in series.iter().skip(1) {
                let c = baroclinic::baroclinic_coupling(s, &params)?;
                drift = drift.max((c - c_ref).abs() / c_ref.abs().max(1e-300));
            }
            let mut out = String::from("t_hours,a,b,A1,M1,N1,K1,K2,v1,v2,x1,x2\n");
            for (t, s) in &series {
                writeln!(
                    out,
                    "{:.6},{:.9e},{:.9e},{:.9e},{:.9e},{:.9e},{:.9e},{:.9e},{:.9e},{:.9e},{:.9e},{:.9e}",
                    t / 3600.0,
                    s.div,
                    s.rot,
                    s.curvature,
                    s.grad[0],
                    s.grad[1],
                    s.core_temp,
                    s.density,
                    s.vel[0],
                    s.vel[1],
                    s.pos[0],
                    s.pos[1]
                )
                .expect("string writes cannot fail");
            }
            write_file(&args.out, &out)?;
            println!(
                "baroclinic run: {} states, rotation-relation drift {:.3e}",
                series.len(),
                drift
            );
        }
        model @ ("barotropic" | "friction") => {
            let s0: BarotropicState =
                serde_json::from_str(&state_text).map_err(|e| format!("bad state file: {e}"))?;
            if model == "friction" {
                let run = collapse_simulation(&s0, &params, args.dt, t_end)?;
                write_file(&args.out, &barotropic_csv(&run.series))?;
                println!(
                    "friction run: {} states, phase-curve drift {:.3e}, min divergence {:.3e}, max |rotation| {:.3e}",
                    run.series.len(),
                    run.invariant_drift,
                    run.min_div,
                    run.max_abs_rot
                );
            } else {
                let series = barotropic::simulate(&s0, &params, args.dt, t_end)?;
                let c_ref = integration_constants(&s0, &params)?;
                let mut drift = [0.0f64; 3];
                for (_, s) in series.iter().skip(1) {
                    let c = integration_constants(s, &params)?;
                    drift[0] = drift[0].max(
                        (c.coupling - c_ref.coupling).abs() / c_ref.coupling.abs().max(1e-300),
                    );
                    drift[1] = drift[1].max(
                        (c.core_scale - c_ref.core_scale).abs()
                            / c_ref.core_scale.abs().max(1e-300),
                    );
                    drift[2] = drift[2].max(
                        (c.phase_curve - c_ref.phase_curve).abs()
                            / c_ref.phase_curve.abs().max(1e-300),
                    );
                }
                write_file(&args.out, &barotropic_csv(&series))?;
                println!(
                    "barotropic run: {} states, drifts: coupling {:.3e}, core-scale {:.3e}, phase-curve {:.3e}",
                    series.len(),
                    drift[0],
                    drift[1],
                    drift[2]
                );
            }
        }
        other => return Err(format!("unknown model `{other}`").into()),
    }
    Ok(())
}

// --------------------------------------------------------------- trajectory

#[derive(Args, Debug)]
pub struct TrajectoryArgs {
    /// Origin latitude, degrees; also sets the Coriolis parameter.
    #[arg(long)]
    lat: f64,
    /// Origin longitude, degrees.
    #[arg(long, default_value_t = 0.0)]
    lon: f64,
    /// Equilibrium rotation coefficient b0, 1/s.
    #[arg(long, allow_hyphen_values = true)]
    b0: f64,
    /// Initial eye velocity, m/s, as `VX,VY`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    v0: Vec<f64>,
    /// Forcing amplitudes, m/s^2, as `M,N`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    mn: Vec<f64>,
    /// Horizon, hours.
    #[arg(long, default_value_t = 72.0)]
    hours: f64,
    /// Output step, hours.
    #[arg(long, default_value_t = 0.5)]
    step: f64,
    /// Output track CSV path.
    #[arg(long)]
    out: PathBuf,
    /// Optional path for the decomposition JSON (stdout otherwise).
    #[arg(long)]
    decomposition: Option<PathBuf>,
}

pub fn trajectory(args: &TrajectoryArgs) -> CmdResult {
    if !(args.step > 0.0) || !(args.hours >= 0.0) {
        return Err("--hours and --step must be positive".into());
    }
    if args.v0.len() != 2 || args.mn.len() != 2 {
        return Err("--v0 and --mn each need two comma-separated values".into());
    }
    let l = coriolis_parameter(args.lat)?;
    let coeffs = closed_form_coefficients(
        [0.0, 0.0],
        [args.v0[0], args.v0[1]],
        [args.mn[0], args.mn[1]],
        l,
        args.b0,
    )?;
    let n = (args.hours / args.step).round() as usize;
    let plane: Vec<PlanePoint> = (0..=n)
        .map(|k| {
            let t = k as f64 * args.step * 3600.0;
            PlanePoint {
                t,
                pos: coeffs.position(t),
            }
        })
        .collect();
    let track = plane_to_track(&plane, (args.lat, args.lon))?;
    let decomposition = coeffs.decompose();
    let json = serde_json::to_string_pretty(&decomposition)?;
    write_file(&args.out, &write_track(&track))?;
    match &args.decomposition {
        Some(path) => write_file(path, &json)?,
        None => println!("{json}"),
    }
    Ok(())
}

// ---------------------------------------------------------------- fitting

#[derive(Args, Debug)]
pub struct FitFlags {
    /// Acceptance threshold on the two condition roots, 1/s.
    #[arg(long, default_value_t = 2e-6)]
    epsilon: f64,
    /// Half-width of the scanned vorticity interval, 1/s.
    #[arg(long, default_value_t = 1e-4)]
    bound: f64,
    /// Use the tight physical-magnitude bound (1e-5 1/s).
    #[arg(long, conflicts_with = "bound")]
    strict: bool,
    /// Number of scan nodes.
    #[arg(long, default_value_t = 4001)]
    grid: usize,
}

impl FitFlags {
    fn config(&self) -> FitConfig {
        FitConfig {
            bound: if self.strict { 1e-5 } else { self.bound },
            epsilon: self.epsilon,
            grid_points: self.grid,
        }
    }
}

#[derive(Args, Debug)]
pub struct FitArgs {
    /// Input track CSV.
    #[arg(long)]
    track: PathBuf,
    /// Index of the window's first point.
    #[arg(long, default_value_t = 0)]
    window: usize,
    #[command(flatten)]
    flags: FitFlags,
    /// Skip the root search and fit at this vorticity, 1/s.
    #[arg(long, allow_hyphen_values = true)]
    b0: Option<f64>,
    /// Optional output path for the fit JSON (stdout otherwise).
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Project one window of a geographic track onto the tangent plane at its
/// first point.
fn window_of(track: &Track, start: usize) -> Result<WindowContext, Box<dyn std::error::Error>> {
    if track.points.len() < start + 3 {
        return Err(format!(
            "window {start} needs points {start}..{}, track has {}",
            start + 2,
            track.points.len()
        )
        .into());
    }
    let origin = (track.points[start].lat, track.points[start].lon);
    let mut window = [PlanePoint {
        t: 0.0,
        pos: [0.0, 0.0],
    }; 3];
    for (k, w) in window.iter_mut().enumerate() {
        let p = &track.points[start + k];
        *w = PlanePoint {
            t: p.t,
            pos: geo::project((p.lat, p.lon), origin)?,
        };
    }
    let l = coriolis_parameter(track.points[start].lat)?;
    Ok((window, origin, l))
}

pub fn fit(args: &FitArgs) -> CmdResult {
    let track = parse_track(&read_to_string(&args.track)?)?;
    let (window, origin, l) = window_of(&track, args.window)?;
    let cfg = args.flags.config();
    let result = match args.b0 {
        Some(b0) => fixed_b0_fit(&window[0], &window[1], &window[2], b0, l, cfg.epsilon)?,
        None => find_b0(&window[0], &window[1], &window[2], l, &cfg)?,
    };
    let report = FitReport::new(&result, origin)?;
    let json = serde_json::to_string_pretty(&report)?;
    match &args.out {
        Some(path) => {
            write_file(path, &json)?;
            println!(
                "window {}: accepted = {}, b0 = {}",
                args.window,
                result.accepted,
                result.b0.map_or("none".to_string(), |b| format!("{b:.6e}"))
            );
        }
        None => println!("{json}"),
    }
    Ok(())
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    /// Input track CSV.
    #[arg(long)]
    track: PathBuf,
    #[command(flatten)]
    flags: FitFlags,
    /// Optional output path for the JSON array (stdout otherwise).
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn sweep(args: &SweepArgs) -> CmdResult {
    let track = parse_track(&read_to_string(&args.track)?)?;
    if track.points.len() < 3 {
        return Err("a sweep needs at least three track points".into());
    }
    let cfg = args.flags.config();
    let fits = sweep_track(&track, &cfg);
    let reports = fits
        .iter()
        .enumerate()
        .map(|(i, fit)| {
            let origin = (track.points[i].lat, track.points[i].lon);
            FitReport::new(fit, origin)
        })
        .collect::<cyclone_track::Result<Vec<_>>>()?;
    let json = serde_json::to_string_pretty(&reports)?;
    let accepted = fits.iter().filter(|f| f.accepted).count();
    match &args.out {
        Some(path) => {
            write_file(path, &json)?;
            println!("{} windows, {} accepted", fits.len(), accepted);
        }
        None => println!("{json}"),
    }
    Ok(())
}

#[derive(Args, Debug)]
pub struct ForecastArgs {
    /// Input track CSV.
    #[arg(long)]
    track: PathBuf,
    /// Index of the window's first point.
    #[arg(long, default_value_t = 0)]
    window: usize,
    #[command(flatten)]
    flags: FitFlags,
    /// Skip the root search and fit at this vorticity, 1/s.
    #[arg(long, allow_hyphen_values = true)]
    b0: Option<f64>,
    /// Forecast horizon, hours.
    #[arg(long, default_value_t = 72.0)]
    hours: f64,
    /// Output step, hours.
    #[arg(long, default_value_t = 3.0)]
    step: f64,
    /// Output forecast track CSV.
    #[arg(long)]
    out: PathBuf,
}

pub fn forecast(args: &ForecastArgs) -> CmdResult {
    if !(args.step > 0.0) || !(args.hours >= 0.0) {
        return Err("--hours and --step must be positive".into());
    }
    let track = parse_track(&read_to_string(&args.track)?)?;
    let (window, origin, l) = window_of(&track, args.window)?;
    let cfg = args.flags.config();
    let result = match args.b0 {
        Some(b0) => fixed_b0_fit(&window[0], &window[1], &window[2], b0, l, cfg.epsilon)?,
        None => find_b0(&window[0], &window[1], &window[2], l, &cfg)?,
    };
    if !result.accepted {
        return Err(format!(
            "window {} was rejected (roots {:?} / {:?}); no forecast",
            args.window, result.b01, result.b02
        )
        .into());
    }
    let plane = forecast_plane(&result, l, args.hours * 3600.0, args.step * 3600.0)?;
    let track_out = plane_to_track(&plane, origin)?;
    write_file(&args.out, &write_track(&track_out))?;
    println!(
        "forecast from window {}: b0 = {:.6e}, {} points",
        args.window,
        result.b0.expect("accepted fit carries b0"),
        plane.len()
    );
    Ok(())
}

#[derive(Args, Debug)]
pub struct EvaluateArgs {
    /// Forecast track CSV.
    #[arg(long)]
    forecast: PathBuf,
    /// Reference track CSV with the same epoch.
    #[arg(long)]
    actual: PathBuf,
    /// Optional output path for the error table CSV (stdout otherwise).
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn evaluate(args: &EvaluateArgs) -> CmdResult {
    let fc = parse_track(&read_to_string(&args.forecast)?)?;
    let actual = parse_track(&read_to_string(&args.actual)?)?;
    let table = evaluate_forecast(&fc, &actual)?;
    let csv = table.to_csv();
    match &args.out {
        Some(path) => {
            write_file(path, &csv)?;
            println!(
                "{} scored points, mean error {:.3} km, max {:.3} km",
                table.rows.len(),
                table.mean / 1000.0,
                table.max / 1000.0
            );
        }
        None => print!("{csv}"),
    }
    Ok(())
}

// ------------------------------------------------------------------- phase

#[derive(Args, Debug)]
pub struct PhaseArgs {
    /// JSON file with the base state; its rotation and curvature set the
    /// shared coupling constant of the orbit family.
    #[arg(long)]
    state: PathBuf,
    #[command(flatten)]
    params: ParamFlags,
    /// Curvature scale factors, one orbit each.
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "0.5,0.75,1.0,1.25,1.5",
        allow_negative_numbers = false
    )]
    scales: Vec<f64>,
    /// Run length in days.
    #[arg(long, default_value_t = 3.0)]
    days: f64,
    /// Integration step, seconds.
    #[arg(long, default_value_t = 60.0)]
    dt: f64,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
}

pub fn phase(args: &PhaseArgs) -> CmdResult {
    let params = args.params.build()?;
    let base: BarotropicState = serde_json::from_str(&read_to_string(&args.state)?)
        .map_err(|e| format!("bad state file: {e}"))?;
    if args.scales.is_empty() {
        return Err("--scales needs at least one factor".into());
    }
    let coupling = integration_constants(&base, &params)?.coupling;
    let mut out = String::from("orbit,t_hours,A,a,b\n");
    for (idx, scale) in args.scales.iter().enumerate() {
        if !(*scale > 0.0) {
            return Err(format!("scale factors must be positive, got {scale}").into());
        }
        let curvature = scale * base.curvature;
        let mut s0 = base;
        s0.div = 0.0;
        s0.curvature = curvature;
        s0.rot = 0.5 * params.coriolis + coupling * curvature.powf(1.0 / params.gamma);
        let run = collapse_simulation(&s0, &params, args.dt, args.days * 86_400.0)?;
        for (t, s) in &run.series {
            writeln!(
                out,
                "{idx},{:.6},{:.9e},{:.9e},{:.9e}",
                t / 3600.0,
                s.curvature,
                s.div,
                s.rot
            )
            .expect("string writes cannot fail");
        }
    }
    write_file(&args.out, &out)?;
    println!("{} orbits written", args.scales.len());
    Ok(())
}
