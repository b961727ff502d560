//! `winding-map`: winding number and ln|R| on a grid of reference energies.
//!
//! Cells inside the guard band around the spectral loop get an empty
//! winding column and are counted in the manifest; the w = -1 <=> |R| < 1
//! correspondence is enforced on every off-band cell.

use std::collections::BTreeMap;

use num_complex::Complex64;

use fockskin::{r_product, winding_number, OscillatorParams, WINDING_GUARD_BAND};

use crate::config::Config;
use crate::output::{emit, Cell, Table};
use crate::{CliError, CommonArgs};

#[derive(clap::Args)]
pub struct Args {
    #[arg(long, allow_hyphen_values = true)]
    nu: Option<i64>,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    re_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    re_max: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    im_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    im_max: Option<f64>,
    /// Grid points along the real axis
    #[arg(long)]
    nx: Option<usize>,
    /// Grid points along the imaginary axis
    #[arg(long)]
    ny: Option<usize>,
    /// Twist-angle samples per winding evaluation
    #[arg(long)]
    n_theta: Option<usize>,
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
    let dim = cfg.resolve(args.dim, "dim", 50)?;
    let omega = cfg.resolve(args.omega, "omega", 1.0)?;
    let kappa = cfg.resolve(args.kappa, "kappa", 0.1)?;
    let params = OscillatorParams { omega, kappa };
    // default box: the loop bounding box scale
    let scale = kappa * (dim as f64 + 1.0);
    let re_mid = nu as f64 * omega;
    let re_min = cfg.resolve(args.re_min, "re-min", re_mid - 0.35 * scale)?;
    let re_max = cfg.resolve(args.re_max, "re-max", re_mid + 0.35 * scale)?;
    let im_min = cfg.resolve(args.im_min, "im-min", -1.05 * scale)?;
    let im_max = cfg.resolve(args.im_max, "im-max", 0.05 * scale)?;
    let nx = cfg.resolve(args.nx, "nx", 41)?;
    let ny = cfg.resolve(args.ny, "ny", 41)?;
    let n_theta = cfg.resolve(args.n_theta, "n-theta", 128)?;
    let format = args.common.format(&cfg)?;
    if nx < 2 || ny < 2 {
        return Err(CliError::Usage(format!("grid must be at least 2x2, got {nx}x{ny}")));
    }
    if !(re_max > re_min) || !(im_max > im_min) {
        return Err(CliError::Usage("empty grid box".into()));
    }

    let mut rows = Vec::with_capacity(nx * ny);
    let mut ambiguous = 0usize;
    let mut violations = 0usize;
    for ix in 0..nx {
        for iy in 0..ny {
            let om = Complex64::new(
                re_min + (re_max - re_min) * ix as f64 / (nx - 1) as f64,
                im_min + (im_max - im_min) * iy as f64 / (ny - 1) as f64,
            );
            let lr = r_product(&params, nu, dim, om);
            let log_abs = if lr.is_zero() { f64::NEG_INFINITY } else { lr.log_mag };
            let w_cell = if !lr.is_zero() && log_abs.abs() < WINDING_GUARD_BAND {
                ambiguous += 1;
                Cell::Empty
            } else {
                let res = winding_number(&params, nu, dim, om, n_theta)?;
                if (res.w == -1) != (log_abs < 0.0) {
                    violations += 1;
                }
                Cell::Int(res.w)
            };
            rows.push(vec![Cell::Float(om.re), Cell::Float(om.im), w_cell, Cell::Float(log_abs)]);
        }
    }

    let table = Table { columns: vec!["re", "im", "w", "log_abs_R"], rows };

    let mut parameters = BTreeMap::new();
    parameters.insert("nu".into(), nu.into());
    parameters.insert("dim".into(), dim.into());
    parameters.insert("re-min".into(), re_min.into());
    parameters.insert("re-max".into(), re_max.into());
    parameters.insert("im-min".into(), im_min.into());
    parameters.insert("im-max".into(), im_max.into());
    parameters.insert("nx".into(), nx.into());
    parameters.insert("ny".into(), ny.into());
    parameters.insert("n-theta".into(), n_theta.into());
    parameters.insert("omega".into(), omega.into());
    parameters.insert("kappa".into(), kappa.into());

    let mut extra = serde_json::Map::new();
    extra.insert("ambiguous_cells".into(), ambiguous.into());
    extra.insert("consistency_violations".into(), violations.into());
    extra.insert("guard_band".into(), WINDING_GUARD_BAND.into());

    let total = nx * ny;
    if violations > 0 {
        return Err(CliError::Numerical(format!(
            "{violations} cells violate the winding/magnitude correspondence"
        )));
    }
    if ambiguous * 100 >= total {
        return Err(CliError::Numerical(format!(
            "{ambiguous} of {total} cells sit on the loop guard band"
        )));
    }

    emit("winding-map", &table, parameters, extra, args.common.out.as_deref(), format)
}
