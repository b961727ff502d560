//! `scaling`: per-truncation spectral markers — the top of the spectrum,
//! the distance of the nearest eigenvalue to i*kappa, and the loop radius.

use std::collections::BTreeMap;

use num_complex::Complex64;

use fockskin::{
    loop_trace, pbc_spectrum_numeric, BoundaryCondition, ChainSpec, OscillatorParams,
};

use crate::commands::parse_dims;
use crate::config::Config;
use crate::output::{emit, Cell, Table};
use crate::{CliError, CommonArgs};

#[derive(clap::Args)]
pub struct Args {
    #[arg(long, allow_hyphen_values = true)]
    nu: Option<i64>,
    /// Comma-separated truncation list, e.g. 50,100,200,400
    #[arg(long)]
    dims: Option<String>,
    /// Rays for the loop tracer
    #[arg(long)]
    n_angles: Option<usize>,
    #[arg(long)]
    omega: Option<f64>,
    #[arg(long)]
    kappa: Option<f64>,
    #[command(flatten)]
    common: CommonArgs,
}

pub fn run(args: Args) -> Result<(), CliError> {
    let cfg = Config::load(args.common.config.as_deref())?;
    let nu = cfg.resolve(args.nu, "nu", 0)?;
    let dims_raw = cfg.resolve(args.dims, "dims", "50,100,200,400".to_string())?;
    let dims = parse_dims(&dims_raw)?;
    let n_angles = cfg.resolve(args.n_angles, "n-angles", 64)?;
    let omega = cfg.resolve(args.omega, "omega", 1.0)?;
    let kappa = cfg.resolve(args.kappa, "kappa", 0.1)?;
    let format = args.common.format(&cfg)?;
    if dims.is_empty() {
        return Err(CliError::Usage("--dims must list at least one truncation".into()));
    }

    let params = OscillatorParams { omega, kappa };
    let ik = Complex64::new(0.0, kappa);
    let mut rows = Vec::with_capacity(dims.len());
    for &dim in &dims {
        let spec = ChainSpec::new(params, nu, dim, BoundaryCondition::Periodic);
        let spectrum = pbc_spectrum_numeric(&spec)?;
        let max_im = spectrum.values.iter().map(|v| v.im).fold(f64::NEG_INFINITY, f64::max);
        let dist_ik = spectrum
            .values
            .iter()
            .map(|v| (v - ik).norm())
            .fold(f64::INFINITY, f64::min);
        let trace = loop_trace(&params, nu, dim, n_angles)?;
        rows.push(vec![
            Cell::Int(dim as i64),
            Cell::Float(max_im),
            Cell::Float(dist_ik),
            Cell::Float(trace.max_radius()),
        ]);
    }
    let table = Table { columns: vec!["dim", "max_im", "dist_ikappa", "loop_radius"], rows };

    let mut parameters = BTreeMap::new();
    parameters.insert("nu".into(), nu.into());
    parameters.insert("dims".into(), dims_raw.into());
    parameters.insert("n-angles".into(), n_angles.into());
    parameters.insert("omega".into(), omega.into());
    parameters.insert("kappa".into(), kappa.into());

    emit("scaling", &table, parameters, serde_json::Map::new(), args.common.out.as_deref(), format)
}
