pub mod annihilate;
pub mod evolve;
pub mod scaling;
pub mod spectra;
pub mod winding_map;

use num_complex::Complex64;

use crate::CliError;

/// Parse "re,im" into a complex number.
pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let (re, im) = s
        .split_once(',')
        .ok_or_else(|| format!("expected re,im, got {s:?}"))?;
    let re: f64 = re.trim().parse().map_err(|_| format!("bad real part {re:?}"))?;
    let im: f64 = im.trim().parse().map_err(|_| format!("bad imaginary part {im:?}"))?;
    Ok(Complex64::new(re, im))
}

/// Parse obc | pbc | tbc=<theta>.
pub fn parse_bc(s: &str) -> Result<fockskin::BoundaryCondition, String> {
    use fockskin::BoundaryCondition as Bc;
    match s.to_ascii_lowercase().as_str() {
        "obc" => Ok(Bc::Open),
        "pbc" => Ok(Bc::Periodic),
        other => match other.strip_prefix("tbc=") {
            Some(theta) => theta
                .parse::<f64>()
                .map(|theta| Bc::Twisted { theta })
                .map_err(|_| format!("bad twist angle {theta:?}")),
            None => Err(format!("expected obc, pbc or tbc=<theta>, got {s:?}")),
        },
    }
}

/// Parse sibc=<re>,<im> | obc=<l> | delta=<j> | random=<seed>[,<support>].
pub fn parse_initial(s: &str) -> Result<fockskin::InitialState, String> {
    use fockskin::InitialState as Init;
    let lower = s.to_ascii_lowercase();
    if let Some(rest) = lower.strip_prefix("sibc=") {
        return parse_complex(rest).map(|energy| Init::Sibc { energy });
    }
    if let Some(rest) = lower.strip_prefix("obc=") {
        return rest
            .parse::<usize>()
            .map(|level| Init::Obc { level })
            .map_err(|_| format!("bad level {rest:?}"));
    }
    if let Some(rest) = lower.strip_prefix("delta=") {
        return rest
            .parse::<usize>()
            .map(|site| Init::Delta { site })
            .map_err(|_| format!("bad site {rest:?}"));
    }
    if let Some(rest) = lower.strip_prefix("random=") {
        let (seed, support) = match rest.split_once(',') {
            Some((seed, support)) => (
                seed.parse::<u64>().map_err(|_| format!("bad seed {seed:?}"))?,
                support.parse::<usize>().map_err(|_| format!("bad support {support:?}"))?,
            ),
            None => (rest.parse::<u64>().map_err(|_| format!("bad seed {rest:?}"))?, 5),
        };
        return Ok(Init::Random { seed, support });
    }
    Err(format!("expected sibc=..., obc=..., delta=... or random=..., got {s:?}"))
}

/// Parse a comma-separated list of truncations.
pub fn parse_dims(s: &str) -> Result<Vec<usize>, CliError> {
    s.split(',')
        .map(|part| {
            part.trim()
                .parse::<usize>()
                .map_err(|_| CliError::Usage(format!("bad dimension {part:?} in list")))
        })
        .collect()
}

/// Describe an initial state for the manifest.
pub fn describe_initial(init: &fockskin::InitialState) -> String {
    use fockskin::InitialState as Init;
    match init {
        Init::Sibc { energy } => format!("sibc={},{}", energy.re, energy.im),
        Init::Obc { level } => format!("obc={level}"),
        Init::Delta { site } => format!("delta={site}"),
        Init::Random { seed, support } => format!("random={seed},{support}"),
    }
}

/// Describe a boundary condition for the manifest.
pub fn describe_bc(bc: &fockskin::BoundaryCondition) -> String {
    use fockskin::BoundaryCondition as Bc;
    match bc {
        Bc::Open => "obc".to_string(),
        Bc::Periodic => "pbc".to_string(),
        Bc::Twisted { theta } => format!("tbc={theta}"),
    }
}
