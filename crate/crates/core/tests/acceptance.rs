//! Acceptance suite: one test per shipped claim, each printing a pass line
//! with the measured numbers. Run with
//! `cargo test -p fockskin --test acceptance -- --nocapture` to see them.

use std::time::Instant;

use num_complex::Complex64;

use fockskin::{
    annihilation_spectrum_numeric, block_decompose, build_liouvillian, coherent_mode,
    envelope_decay_rate, evolve, growth_rate_fit, loop_trace, obc_spectrum_analytic,
    pbc_loop_radius, pbc_roots_analytic, pbc_spectrum_numeric, r_product, ridge_divergence_sum,
    scaled_log_r, skin_effect_density, winding_number, winding_power, AnnihilationSpec,
    BoundaryCondition, ChainSpec, InitialState, OscillatorParams, WINDING_GUARD_BAND,
};

fn params() -> OscillatorParams {
    OscillatorParams { omega: 1.0, kappa: 0.1 }
}

fn pass(id: u32, details: &str) {
    println!("[acceptance] criterion {id:02} PASS - {details}");
}

/// 1. Open-boundary spectra: numeric diagonalization against the analytic
/// ladder for nu in {-2..2} at D = 100, within 1e-8, under 5 s.
#[test]
fn criterion_01_obc_analytic_vs_numeric() {
    let start = Instant::now();
    let mut worst = 0.0_f64;
    for nu in [-2i64, -1, 0, 1, 2] {
        let spec = ChainSpec::new(params(), nu, 100, BoundaryCondition::Open);
        let matrix = spec.build_matrix().unwrap();
        let mut numeric: Vec<Complex64> = matrix.eigenvalues().unwrap().iter().copied().collect();
        numeric.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        let analytic = obc_spectrum_analytic(&spec).values;
        for (n, a) in numeric.iter().zip(&analytic) {
            worst = worst.max((n - a).norm());
        }
    }
    let elapsed = start.elapsed();
    assert!(worst < 1e-8, "max |E_numeric - E_analytic| = {worst:.3e}");
    assert!(elapsed.as_secs_f64() < 5.0, "took {elapsed:?}");
    pass(1, &format!("max deviation {worst:.2e}, runtime {elapsed:.2?}"));
}

/// 2. i*kappa is an exact periodic eigenvalue at every truncation, and at
/// D = 50 every numeric eigenvalue solves |R| = 1 to 1e-6.
#[test]
fn criterion_02_exact_pbc_membership_of_i_kappa() {
    let p = params();
    let ik = Complex64::new(0.0, p.kappa);
    let mut worst_membership = 0.0_f64;
    for dim in [1usize, 10, 50, 200, 400] {
        let spec = ChainSpec::new(p, 0, dim, BoundaryCondition::Periodic);
        let spectrum = pbc_spectrum_numeric(&spec).unwrap();
        let nearest = spectrum
            .values
            .iter()
            .map(|v| (v - ik).norm())
            .fold(f64::INFINITY, f64::min);
        assert!(nearest < 1e-8, "D={dim}: min |lambda - i kappa| = {nearest:.3e}");
        worst_membership = worst_membership.max(nearest);
    }
    let spec = ChainSpec::new(p, 0, 50, BoundaryCondition::Periodic);
    let spectrum = pbc_spectrum_numeric(&spec).unwrap();
    let mut worst_r = 0.0_f64;
    for v in &spectrum.values {
        let r = r_product(&p, 0, 50, *v);
        let dev = (r.log_mag.exp() - 1.0).abs();
        assert!(dev < 1e-6, "| |R| - 1 | = {dev:.3e} at {v}");
        worst_r = worst_r.max(dev);
    }
    pass(
        2,
        &format!("worst membership {worst_membership:.2e}, worst | |R|-1 | {worst_r:.2e} at D=50"),
    );
}

/// 3. The loop radius doubles with the truncation, and the continuum
/// approximation of ln|R|/D converges like C/D with stable C.
#[test]
fn criterion_03_linear_loop_scaling() {
    let p = params();
    let r200 = loop_trace(&p, 0, 200, 64).unwrap();
    let r400 = loop_trace(&p, 0, 400, 64).unwrap();
    assert!(r200.failed_rays.is_empty() && r400.failed_rays.is_empty());
    let ratio = r400.max_radius() / r200.max_radius();
    assert!((ratio - 2.0).abs() < 0.1, "radius ratio {ratio}");

    // error constant C = D * |scaled_log_r - ln|R|/D| at fixed scaled points
    let points = [Complex64::new(-0.45, 0.3), Complex64::new(-0.5, -0.2), Complex64::new(0.3, 0.4)];
    let mut c_values = Vec::new();
    for pt in points {
        let mut cs = Vec::new();
        for d in [50usize, 100, 200] {
            let et = pt * d as f64;
            let e = et * Complex64::new(0.0, p.kappa);
            let approx = scaled_log_r(&p, 0, d, e).unwrap();
            let exact = r_product(&p, 0, d, e).log_mag / d as f64;
            cs.push((approx - exact).abs() * d as f64);
        }
        let (lo, hi) = (cs.iter().cloned().fold(f64::INFINITY, f64::min),
                        cs.iter().cloned().fold(0.0_f64, f64::max));
        assert!(hi / lo < 1.2, "C drifts under doubling at {pt}: {cs:?}");
        c_values.push(cs[2]);
    }
    pass(
        3,
        &format!("radius ratio {ratio:.4}, error constants C ~ {:?}", c_values),
    );
}

/// 4. Complete winding correspondence on a 41 x 41 grid over the D = 50
/// loop bounding box: off the guard band, w = -1 exactly when |R| < 1;
/// interior cells wind -1, far-exterior references wind 0.
#[test]
fn criterion_04_complete_winding_correspondence() {
    let p = params();
    let (nu, d) = (0i64, 50usize);
    let trace = loop_trace(&p, nu, d, 64).unwrap();
    let (mut re_min, mut re_max) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut im_min, mut im_max) = (f64::INFINITY, f64::NEG_INFINITY);
    for pt in &trace.points {
        re_min = re_min.min(pt.re);
        re_max = re_max.max(pt.re);
        im_min = im_min.min(pt.im);
        im_max = im_max.max(pt.im);
    }
    let mut interior = 0usize;
    let mut exterior = 0usize;
    let mut banded = 0usize;
    for ix in 0..41 {
        for iy in 0..41 {
            let omega = Complex64::new(
                re_min + (re_max - re_min) * ix as f64 / 40.0,
                im_min + (im_max - im_min) * iy as f64 / 40.0,
            );
            let lr = r_product(&p, nu, d, omega);
            if !lr.is_zero() && lr.log_mag.abs() < WINDING_GUARD_BAND {
                banded += 1;
                continue;
            }
            let result = winding_number(&p, nu, d, omega, 128).unwrap();
            let inside = lr.is_zero() || lr.log_mag < 0.0;
            assert_eq!(result.w == -1, inside, "correspondence broke at {omega}");
            assert_eq!(result.magnitude_test, inside);
            if inside {
                interior += 1;
                assert_eq!(result.w, -1);
            } else {
                exterior += 1;
                assert_eq!(result.w, 0);
            }
        }
    }
    assert!(interior > 400, "grid should cover the loop interior, got {interior}");
    assert!(exterior > 100, "grid should cover the exterior, got {exterior}");
    // far-exterior reference energies
    for omega in [
        Complex64::new(0.0, 2.0 * p.kappa * d as f64),
        Complex64::new(20.0, 10.0),
    ] {
        assert_eq!(winding_number(&p, nu, d, omega, 128).unwrap().w, 0);
    }
    pass(
        4,
        &format!(
            "41x41 grid: {interior} interior w=-1, {exterior} exterior w=0, {banded} banded, 0 mismatches"
        ),
    );
}

/// 5. Conservation laws of the truncated population chain: the trace is
/// flat to 1e-8 and the particle number decays as exp(-kappa t) to 1e-6
/// relative over t in [0, 40], within 10 s.
#[test]
fn criterion_05_dynamics_conservation_laws() {
    let start = Instant::now();
    let spec = ChainSpec::new(params(), 0, 50, BoundaryCondition::Open);
    let trace = evolve(
        &spec,
        &InitialState::Sibc { energy: Complex64::new(0.0, 0.05) },
        40.0,
        0.5,
    )
    .unwrap();
    let t0 = trace.trace_sum[0];
    let n0 = trace.particle_number[0];
    let mut worst_trace = 0.0_f64;
    let mut worst_n = 0.0_f64;
    for (i, &t) in trace.times.iter().enumerate() {
        worst_trace = worst_trace.max((trace.trace_sum[i] - t0).norm());
        let expected = (-0.1 * t).exp();
        worst_n = worst_n.max((trace.particle_number[i] / n0 - expected).abs() / expected);
    }
    let elapsed = start.elapsed();
    assert!(worst_trace < 1e-8, "trace drift {worst_trace:.3e}");
    assert!(worst_n < 1e-6, "particle-number relative error {worst_n:.3e}");
    assert!(elapsed.as_secs_f64() < 10.0, "took {elapsed:?}");
    pass(
        5,
        &format!("trace drift {worst_trace:.2e}, N(t) relative error {worst_n:.2e}, runtime {elapsed:.2?}"),
    );
}

/// 6. Amplification phenomenology on 51 sites: the anomalous mode above the
/// real axis grows at +0.05, the first open-boundary eigenstate decays at
/// -0.1, and a real-energy interior mode holds steady.
///
/// The level-1 eigenstate carries amplitudes (1, -1)/sqrt(2), whose edge
/// average is exactly zero, so its rate is measured on the frame-norm
/// envelope instead of the edge average.
#[test]
fn criterion_06_anomalous_amplification_rates() {
    let spec = ChainSpec::new(params(), 0, 50, BoundaryCondition::Open);
    let window = (0.0, 10.0);

    let grow = evolve(&spec, &InitialState::Sibc { energy: Complex64::new(0.0, 0.05) }, 10.0, 0.25)
        .unwrap();
    let up = growth_rate_fit(&grow, window).unwrap();
    assert!((up - 0.05).abs() < 0.05 * 0.05, "growth rate {up}");

    let decay = evolve(&spec, &InitialState::Obc { level: 1 }, 10.0, 0.25).unwrap();
    let down = envelope_decay_rate(&decay, window).unwrap();
    assert!((down + 0.1).abs() < 0.05 * 0.1, "decay rate {down}");

    // a real interior energy: |R| < 1 there, and the mode neither grows nor
    // decays
    let e_real = Complex64::new(0.05, 0.0);
    assert!(r_product(&params(), 0, 50, e_real).log_mag < 0.0);
    let steady = evolve(&spec, &InitialState::Sibc { energy: e_real }, 10.0, 0.25).unwrap();
    let flat = growth_rate_fit(&steady, window).unwrap();
    assert!(flat.abs() < 1e-3, "steady rate {flat}");

    pass(
        6,
        &format!("rates: +{up:.4} (circle), {down:.4} (square), {flat:.1e} (triangle)"),
    );
}

/// 7. Skin-effect signature: at nu = 0, D = 100 the total eigenstate
/// density on the first ten sites exceeds the uniform share by more than
/// 1.5x. The exact factor is a measured quantity and printed.
#[test]
fn criterion_07_skin_effect_density() {
    let spec = ChainSpec::new(params(), 0, 100, BoundaryCondition::Open);
    let density = skin_effect_density(&spec).unwrap();
    let first10: f64 = density[..10].iter().sum();
    let uniform = 10.0 * 101.0 / 101.0;
    let factor = first10 / uniform;
    assert!(factor > 1.5, "edge accumulation factor {factor}");
    pass(7, &format!("first-10-site density {first10:.4} = {factor:.3} x uniform share"));
}

/// 8. The loop-boundary divergence sum grows by ln 2 per truncation
/// doubling at D = 1000.
#[test]
fn criterion_08_divergence_sum_increment() {
    let p = params();
    let e = Complex64::new(0.0, 0.05); // fixed interior energy
    let increment = ridge_divergence_sum(&p, 0, 2000, e) - ridge_divergence_sum(&p, 0, 1000, e);
    let target = std::f64::consts::LN_2;
    let rel = (increment - target).abs() / target;
    assert!(rel < 0.05, "increment {increment} vs ln 2, rel {rel:.3e}");
    pass(8, &format!("sum(2D) - sum(D) = {increment:.5} (ln 2 = {target:.5}, rel {rel:.1e})"));
}

/// 9. Annihilation-operator program: numeric periodic eigenvalues hit the
/// analytic roots at D = 40; the loop radius approaches sqrt((D+1)/e)
/// (within 2% once the Stirling prefactor has decayed, pinned at D = 100
/// since the criterion names no dimension for this clause; the D = 40
/// value is reported as measured); the alpha = 2 coherent state is an
/// eigenvector to 1e-8 at 61 sites; and the p-th operator power winds -p.
#[test]
fn criterion_09_annihilation_supplement() {
    // roots
    let numeric =
        annihilation_spectrum_numeric(&AnnihilationSpec::new(40, BoundaryCondition::Periodic, 1))
            .unwrap();
    let analytic = pbc_roots_analytic(40).unwrap();
    let mut worst_root = 0.0_f64;
    for v in &numeric.values {
        let nearest = analytic
            .values
            .iter()
            .map(|r| (v - r).norm())
            .fold(f64::INFINITY, f64::min);
        worst_root = worst_root.max(nearest);
    }
    assert!(worst_root < 1e-6, "root mismatch {worst_root:.3e}");

    // radius against sqrt((D+1)/e)
    let stirling_ratio = |d: usize| pbc_loop_radius(d) / ((d as f64 + 1.0) / std::f64::consts::E).sqrt();
    let at40 = stirling_ratio(40);
    let at100 = stirling_ratio(100);
    assert!((at100 - 1.0).abs() < 0.02, "radius ratio at D=100: {at100}");
    assert!(at100 < at40, "ratio should shrink with D");

    // coherent eigen-residual
    let coherent = coherent_mode(Complex64::new(2.0, 0.0), 60).unwrap();
    assert!(coherent.residual < 1e-8, "residual {:.3e}", coherent.residual);

    // power windings at D = 30
    let w1 = winding_power(1, 30, Complex64::ZERO, 128).unwrap().w;
    let w2 = winding_power(2, 30, Complex64::ONE, 128).unwrap().w;
    let w3 = winding_power(3, 30, Complex64::new(0.0, 2.0), 128).unwrap().w;
    assert_eq!((w1, w2, w3), (-1, -2, -3));

    pass(
        9,
        &format!(
            "roots {worst_root:.1e}, radius/sqrt((D+1)/e) = {at40:.4} (D=40) -> {at100:.4} (D=100), \
             coherent residual {:.1e}, windings ({w1},{w2},{w3})",
            coherent.residual
        ),
    );
}

/// 10. The vectorized generator at cutoff M = 8 decomposes exactly (zero
/// off-block mass) into the open chain matrices.
#[test]
fn criterion_10_liouvillian_decomposition() {
    let p = params();
    let cutoff = 8usize;
    let h = build_liouvillian(&p, cutoff).unwrap();
    // block_decompose fails on any nonzero cross-sector entry
    let blocks = block_decompose(&h, cutoff).unwrap();
    assert_eq!(blocks.len(), 2 * cutoff + 1);
    let mut compared = 0;
    for (nu, block) in &blocks {
        let span = cutoff - nu.unsigned_abs() as usize;
        if span == 0 {
            assert_eq!(block[(0, 0)], fockskin::onsite(&p, *nu, 0));
            continue;
        }
        let chain = ChainSpec::new(p, *nu, span, BoundaryCondition::Open)
            .build_matrix()
            .unwrap();
        assert_eq!(block, &chain, "block nu={nu} differs from its chain");
        compared += 1;
    }
    pass(
        10,
        &format!("M=8: zero off-block mass, {compared} blocks bitwise equal to their chains"),
    );
}
