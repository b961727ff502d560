//! `annihilate`: the annihilation-operator experiment. Emits numeric and
//! analytic periodic spectra side by side; the manifest carries the loop
//! radius, the winding of the requested power, and (when asked) a coherent
//! mode's eigen-residual.

use std::collections::BTreeMap;

use num_complex::Complex64;

use fockskin::{
    annihilation_spectrum_numeric, coherent_mode, pbc_loop_radius, pbc_roots_analytic,
    winding_power, AnnihilationSpec, BoundaryCondition,
};

use crate::commands::parse_complex;
use crate::config::Config;
use crate::output::{emit, Cell, Table};
use crate::{CliError, CommonArgs};

#[derive(clap::Args)]
pub struct Args {
    /// Truncation D (matrix size D+1)
    #[arg(long)]
    dim: Option<usize>,
    /// Operator power p for the winding
    #[arg(long)]
    power: Option<u32>,
    /// Reference energy re,im for the winding
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    reference: Option<Complex64>,
    /// Coherent amplitude re,im to check as an edge mode
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    alpha: Option<Complex64>,
    /// Truncation for the coherent mode check
    #[arg(long)]
    coherent_len: Option<usize>,
    #[arg(long)]
    n_theta: Option<usize>,
    #[command(flatten)]
    common: CommonArgs,
}

pub fn run(args: Args) -> Result<(), CliError> {
    let cfg = Config::load(args.common.config.as_deref())?;
    let dim = cfg.resolve(args.dim, "dim", 40)?;
    let power = cfg.resolve(args.power, "power", 1)?;
    let n_theta = cfg.resolve(args.n_theta, "n-theta", 128)?;
    let coherent_len = cfg.resolve(args.coherent_len, "coherent-len", 60)?;
    let reference = match args.reference {
        Some(r) => r,
        None => match cfg.get::<String>("reference")? {
            Some(raw) => parse_complex(&raw).map_err(CliError::Usage)?,
            None => Complex64::ZERO,
        },
    };
    let alpha = match args.alpha {
        Some(a) => Some(a),
        None => cfg
            .get::<String>("alpha")?
            .map(|raw| parse_complex(&raw).map_err(CliError::Usage))
            .transpose()?,
    };
    let format = args.common.format(&cfg)?;

    let numeric =
        annihilation_spectrum_numeric(&AnnihilationSpec::new(dim, BoundaryCondition::Periodic, power))?;
    let analytic = pbc_roots_analytic(dim)?;
    let rows = numeric
        .values
        .iter()
        .zip(&analytic.values)
        .enumerate()
        .map(|(i, (n, a))| {
            vec![
                Cell::Int(i as i64),
                Cell::Float(n.re),
                Cell::Float(n.im),
                Cell::Float(a.re),
                Cell::Float(a.im),
            ]
        })
        .collect();
    let table = Table {
        columns: vec!["index", "re_numeric", "im_numeric", "re_analytic", "im_analytic"],
        rows,
    };

    let winding = winding_power(power, dim, reference, n_theta)?;
    let radius = pbc_loop_radius(dim);

    let mut parameters = BTreeMap::new();
    parameters.insert("dim".into(), dim.into());
    parameters.insert("power".into(), power.into());
    parameters.insert("reference".into(), format!("{},{}", reference.re, reference.im).into());
    parameters.insert("n-theta".into(), n_theta.into());
    parameters.insert("coherent-len".into(), coherent_len.into());
    if let Some(a) = alpha {
        parameters.insert("alpha".into(), format!("{},{}", a.re, a.im).into());
    }

    let mut extra = serde_json::Map::new();
    extra.insert("winding".into(), winding.w.into());
    extra.insert("magnitude_test".into(), winding.magnitude_test.into());
    extra.insert("loop_radius".into(), radius.into());
    extra.insert(
        "radius_over_sqrt_d_over_e".into(),
        (radius / ((dim as f64 + 1.0) / std::f64::consts::E).sqrt()).into(),
    );
    if let Some(a) = alpha {
        let mode = coherent_mode(a, coherent_len)?;
        extra.insert("coherent_residual".into(), mode.residual.into());
    }

    emit("annihilate", &table, parameters, extra, args.common.out.as_deref(), format)
}
