//! `spectra`: eigenvalues of one chain, one row per value.

use std::collections::BTreeMap;

use fockskin::{
    obc_spectrum_analytic, pbc_spectrum_numeric, BoundaryCondition, ChainSpec, OscillatorParams,
    SpectrumMethod,
};

use crate::commands::{describe_bc, parse_bc};
use crate::config::Config;
use crate::output::{emit, Cell, Table};
use crate::{CliError, CommonArgs};

#[derive(clap::Args)]
pub struct Args {
    /// Chain index nu
    #[arg(long, allow_hyphen_values = true)]
    nu: Option<i64>,
    /// Truncation D (matrix size D+1)
    #[arg(long)]
    dim: Option<usize>,
    /// Boundary condition: obc, pbc or tbc=<theta>
    #[arg(long, value_parser = parse_bc)]
    bc: Option<BoundaryCondition>,
    /// Oscillator frequency
    #[arg(long)]
    omega: Option<f64>,
    /// Damping rate
    #[arg(long)]
    kappa: Option<f64>,
    #[command(flatten)]
    common: CommonArgs,
}

pub fn run(args: Args) -> Result<(), CliError> {
    let cfg = Config::load(args.common.config.as_deref())?;
    let nu = cfg.resolve(args.nu, "nu", 0)?;
    let dim = cfg.resolve(args.dim, "dim", 50)?;
    let omega = cfg.resolve(args.omega, "omega", 1.0)?;
    let kappa = cfg.resolve(args.kappa, "kappa", 0.1)?;
    let bc = match args.bc {
        Some(bc) => bc,
        None => match cfg.get::<String>("bc")? {
            Some(raw) => parse_bc(&raw).map_err(CliError::Usage)?,
            None => BoundaryCondition::Periodic,
        },
    };
    if kappa <= 0.0 {
        return Err(CliError::Usage(format!("kappa must be positive, got {kappa}")));
    }
    let format = args.common.format(&cfg)?;

    let spec = ChainSpec::new(OscillatorParams { omega, kappa }, nu, dim, bc);
    let spectrum = match bc {
        BoundaryCondition::Open => obc_spectrum_analytic(&spec),
        _ => pbc_spectrum_numeric(&spec)?,
    };

    let rows = spectrum
        .values
        .iter()
        .enumerate()
        .map(|(i, v)| vec![Cell::Int(i as i64), Cell::Float(v.re), Cell::Float(v.im)])
        .collect();
    let table = Table { columns: vec!["index", "re", "im"], rows };

    let mut parameters = BTreeMap::new();
    parameters.insert("nu".into(), nu.into());
    parameters.insert("dim".into(), dim.into());
    parameters.insert("bc".into(), describe_bc(&bc).into());
    parameters.insert("omega".into(), omega.into());
    parameters.insert("kappa".into(), kappa.into());

    let mut extra = serde_json::Map::new();
    extra.insert(
        "method".into(),
        match spectrum.method {
            SpectrumMethod::NumericEigensolver => "numeric-eigensolver",
            SpectrumMethod::AnalyticObc => "analytic-obc",
            SpectrumMethod::AnalyticRoots => "analytic-roots",
        }
        .into(),
    );

    emit("spectra", &table, parameters, extra, args.common.out.as_deref(), format)
}
