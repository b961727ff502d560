//! `evolve`: observables of one trajectory on the truncated open chain.

use std::collections::BTreeMap;

use fockskin::{evolve, BoundaryCondition, ChainSpec, InitialState, OscillatorParams};

use crate::commands::{describe_initial, parse_initial};
use crate::config::Config;
use crate::output::{emit, fmt_float, Cell, Table};
use crate::{CliError, CommonArgs};

#[derive(clap::Args)]
pub struct Args {
    /// Initial state: sibc=<re>,<im> | obc=<l> | delta=<j> | random=<seed>[,<support>]
    #[arg(long, value_parser = parse_initial)]
    initial: Option<InitialState>,
    /// Truncation D (sites 0..=D)
    #[arg(long)]
    trunc: Option<usize>,
    #[arg(long)]
    t_max: Option<f64>,
    #[arg(long)]
    dt_out: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    nu: Option<i64>,
    #[arg(long)]
    omega: Option<f64>,
    #[arg(long)]
    kappa: Option<f64>,
    /// Also dump every frame (long CSV: t,site,re,im) to this path
    #[arg(long)]
    frames: Option<std::path::PathBuf>,
    #[command(flatten)]
    common: CommonArgs,
}

pub fn run(args: Args) -> Result<(), CliError> {
    let cfg = Config::load(args.common.config.as_deref())?;
    let initial = match args.initial {
        Some(i) => i,
        None => match cfg.get::<String>("initial")? {
            Some(raw) => parse_initial(&raw).map_err(CliError::Usage)?,
            None => return Err(CliError::Usage("--initial is required".into())),
        },
    };
    let trunc = cfg.resolve(args.trunc, "trunc", 50)?;
    let t_max = cfg.resolve(args.t_max, "t-max", 40.0)?;
    let dt_out = cfg.resolve(args.dt_out, "dt-out", 0.5)?;
    let nu = cfg.resolve(args.nu, "nu", 0)?;
    let omega = cfg.resolve(args.omega, "omega", 1.0)?;
    let kappa = cfg.resolve(args.kappa, "kappa", 0.1)?;
    let format = args.common.format(&cfg)?;

    let spec = ChainSpec::new(OscillatorParams { omega, kappa }, nu, trunc, BoundaryCondition::Open);
    let trace = evolve(&spec, &initial, t_max, dt_out)?;

    let rows = trace
        .times
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            vec![
                Cell::Float(t),
                Cell::Float(trace.edge_avg[i].re),
                Cell::Float(trace.edge_avg[i].im),
                Cell::Float(trace.particle_number[i]),
                Cell::Float(trace.trace_sum[i].re),
                Cell::Float(trace.trace_sum[i].im),
                Cell::Float(trace.tail_mass[i]),
            ]
        })
        .collect();
    let table = Table {
        columns: vec!["t", "edge_avg_re", "edge_avg_im", "N", "trace_re", "trace_im", "tail_mass"],
        rows,
    };

    if let Some(path) = &args.frames {
        let mut dump = String::from("t,site,re,im\n");
        for (i, frame) in trace.frames.iter().enumerate() {
            for (site, a) in frame.iter().enumerate() {
                dump.push_str(&format!(
                    "{},{},{},{}\n",
                    fmt_float(trace.times[i]),
                    site,
                    fmt_float(a.re),
                    fmt_float(a.im)
                ));
            }
        }
        std::fs::write(path, dump)?;
    }

    let mut parameters = BTreeMap::new();
    parameters.insert("initial".into(), describe_initial(&initial).into());
    parameters.insert("trunc".into(), trunc.into());
    parameters.insert("t-max".into(), t_max.into());
    parameters.insert("dt-out".into(), dt_out.into());
    parameters.insert("nu".into(), nu.into());
    parameters.insert("omega".into(), omega.into());
    parameters.insert("kappa".into(), kappa.into());

    let mut extra = serde_json::Map::new();
    extra.insert("tail_threshold".into(), trace.tail_threshold.into());
    extra.insert(
        "trusted_horizon".into(),
        trace.trusted_horizon().map(serde_json::Value::from).unwrap_or(serde_json::Value::Null),
    );
    extra.insert("integrator_rtol".into(), fockskin::INTEGRATOR_RTOL.into());

    emit("evolve", &table, parameters, extra, args.common.out.as_deref(), format)
}
