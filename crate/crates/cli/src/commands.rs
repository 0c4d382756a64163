//! One function per subcommand. Each builds its tables from the effective
//! config and returns the paths it wrote.

use std::f64::consts::{PI, SQRT_2};
use std::path::{Path, PathBuf};

use latosc::coherent::{
    angular_apply, angular_nonconservation, coherent_state, defined_residual, displacement_apply, eigen_residual,
    ground_state_2d, CoherentKind, CoherentSpec,
};
use latosc::manybody::{
    pair_correlation_cells, pair_correlation_mc, pair_correlation_quad, radial_profile, RingParams,
};
use latosc::model::{KGrid, OscParams};
use latosc::numerics::{RngState, StencilOrder};
use latosc::oscillator::{
    apply_operator, ground_state_analytic, number_matrix, spectrum as solve_spectrum, uncertainty_report, LadderAction,
    Representation,
};
use latosc::scattering::{origin_curve, scattering_sweep};
use num_complex::Complex64;

use crate::args::{AngularArgs, CoherentArgs, GroundArgs, ManybodyArgs, MethodArg, Rep, ScatteringArgs, SpectrumArgs};
use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{emit, Cell, Table};

/// Effective settings shared by all commands.
#[derive(Debug, Clone)]
pub struct Context {
    pub config: RunConfig,
    pub out_dir: PathBuf,
    pub emit_plot: bool,
}

impl Context {
    fn target(&self, out: &Option<PathBuf>, default_name: &str) -> PathBuf {
        out.clone().unwrap_or_else(|| self.out_dir.join(default_name))
    }

    fn write(&self, table: &Table, path: &Path, plot: (&str, &str, Option<&str>)) -> Result<Vec<PathBuf>, CliError> {
        emit(table, path, self.emit_plot.then_some(plot)).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })
    }
}

/// `<stem><suffix>.csv` next to `path`.
fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map_or_else(String::new, |s| s.to_string_lossy().into_owned());
    path.with_file_name(format!("{stem}{suffix}.csv"))
}

fn check_gamma(gamma_d: f64) -> Result<(), CliError> {
    if gamma_d > 0.0 && gamma_d.is_finite() {
        Ok(())
    } else {
        Err(CliError::Usage(format!(
            "--gamma-d must be finite and > 0, got {gamma_d}"
        )))
    }
}

pub fn stencil(cfg: &RunConfig) -> StencilOrder {
    if cfg.stencil_order == 2 {
        StencilOrder::Second
    } else {
        StencilOrder::Fourth
    }
}

pub fn osc_params(cfg: &RunConfig, gamma_d: f64) -> Result<OscParams, CliError> {
    let n_max = (cfg.n_max > 0).then_some(cfg.n_max);
    Ok(OscParams::from_gamma(gamma_d, cfg.k_points, n_max)?)
}

pub fn spectrum(ctx: &Context, a: &SpectrumArgs) -> Result<Vec<PathBuf>, CliError> {
    check_gamma(a.gamma_d)?;
    if a.n_eigs == 0 {
        return Err(CliError::Usage("--n-eigs must be at least 1".into()));
    }
    let cfg = &ctx.config;
    let params = osc_params(cfg, a.gamma_d)?;
    let rep = match a.rep {
        Rep::Site => Representation::Site,
        Rep::Kspace => Representation::KSpace(stencil(cfg)),
    };
    let matrix = number_matrix(rep, &params)?;
    let res = solve_spectrum(&matrix, a.n_eigs, false, cfg.eig_tol)?;

    let command = format!(
        "spectrum --gamma-d {} --rep {} --n-eigs {}",
        a.gamma_d,
        a.rep.name(),
        a.n_eigs
    );
    let mut t = Table::new(&command, cfg, &["s", "N_tilde", "rep", "gamma_d", "resolution"]);
    for (s, w) in res.eigenvalues.iter().enumerate() {
        t.push(vec![
            s.into(),
            (*w).into(),
            a.rep.name().into(),
            a.gamma_d.into(),
            res.resolution.into(),
        ]);
    }
    let path = ctx.target(&a.out, &format!("spectrum_{}.csv", a.rep.name()));
    ctx.write(&t, &path, ("s", "N_tilde", None))
}

pub fn groundstate(ctx: &Context, a: &GroundArgs) -> Result<Vec<PathBuf>, CliError> {
    check_gamma(a.gamma_d)?;
    let cfg = &ctx.config;
    let grid = osc_params(cfg, a.gamma_d)?.grid();
    let psi = ground_state_analytic(&grid);
    let apsi = apply_operator(LadderAction::Annihilation, &psi);
    let u = uncertainty_report(&psi)?;

    let command = format!("groundstate --gamma-d {}", a.gamma_d);
    let mut t = Table::new(&command, cfg, &["k", "psi0", "a_psi0_abs"]);
    t.note(format!("annihilation_residual = {:.16e}", apsi.norm() / psi.norm()));
    t.note(format!("delta_x = {:.16e}", u.delta_x));
    t.note(format!("delta_p = {:.16e}", u.delta_p));
    t.note(format!("mean_cos = {:.16e}", u.mean_cos));
    t.note(format!("gup_slack = {:.16e}", u.gup_slack()));
    for ((k, v), av) in grid.points().zip(psi.values()).zip(apsi.values()) {
        t.push(vec![k.into(), v.re.into(), av.norm().into()]);
    }
    let path = ctx.target(&a.out, "groundstate.csv");
    ctx.write(&t, &path, ("k", "psi0", None))
}

/// Seeded amplitudes: uniform in the disc `|alpha| <= alpha_max`, or lattice
/// multiples `j d / sqrt(2)` for the eigenstate form.
pub fn seeded_alphas(cfg: &RunConfig, kind: CoherentKind, grid: &KGrid) -> Vec<Complex64> {
    match kind {
        CoherentKind::Eigenstate => (1..=cfg.coherent_alphas)
            .map(|j| Complex64::new(j as f64 * grid.d() / SQRT_2, 0.0))
            .collect(),
        _ => {
            let mut rng = RngState::new(cfg.seed);
            (0..cfg.coherent_alphas)
                .map(|_| {
                    let r = cfg.alpha_max * rng.uniform().sqrt();
                    Complex64::from_polar(r, 2.0 * PI * rng.uniform())
                })
                .collect()
        }
    }
}

/// Relation residual and norm of the coherent state of the given kind.
pub fn coherent_residual(kind: CoherentKind, alpha: Complex64, grid: &KGrid) -> Result<(f64, f64), CliError> {
    Ok(match kind {
        CoherentKind::Displacement => {
            let psi = displacement_apply(alpha, &ground_state_analytic(grid));
            (defined_residual(alpha, &psi)?, psi.norm())
        }
        CoherentKind::Defined => {
            let c = coherent_state(CoherentSpec::new(alpha, kind), grid)?;
            (defined_residual(alpha, &c.state)?, c.norm)
        }
        CoherentKind::Eigenstate => {
            let c = coherent_state(CoherentSpec::new(alpha, kind), grid)?;
            (eigen_residual(alpha, &c.state)?, c.norm)
        }
    })
}

pub fn coherent(ctx: &Context, a: &CoherentArgs) -> Result<Vec<PathBuf>, CliError> {
    check_gamma(a.gamma_d)?;
    let cfg = &ctx.config;
    let grid = osc_params(cfg, a.gamma_d)?.grid();
    let kind: CoherentKind = a.kind.name().parse()?;
    let alphas: Vec<Complex64> = if a.alpha.is_empty() {
        seeded_alphas(cfg, kind, &grid)
    } else {
        a.alpha.iter().map(|(re, im)| Complex64::new(*re, *im)).collect()
    };

    let mut command = format!("coherent --gamma-d {} --kind {}", a.gamma_d, a.kind.name());
    for (re, im) in &a.alpha {
        command.push_str(&format!(" --alpha {re},{im}"));
    }
    let mut t = Table::new(&command, cfg, &["alpha_re", "alpha_im", "kind", "residual", "norm"]);
    for alpha in alphas {
        let (r, norm) = coherent_residual(kind, alpha, &grid)?;
        t.push(vec![
            alpha.re.into(),
            alpha.im.into(),
            kind.to_string().into(),
            r.into(),
            norm.into(),
        ]);
    }
    let path = ctx.target(&a.out, &format!("coherent_{}.csv", a.kind.name()));
    ctx.write(&t, &path, ("alpha_re", "residual", None))
}

/// `||L psi_0|| / ||psi_0||` for the 2D ground state at spacing `d`.
pub fn angular_ground(d: f64, m: usize) -> Result<f64, CliError> {
    let grid = KGrid::new(d, m)?;
    let psi = ground_state_2d(&grid);
    Ok(angular_apply(&psi).norm() / psi.norm())
}

pub fn angular(ctx: &Context, a: &AngularArgs) -> Result<Vec<PathBuf>, CliError> {
    if a.d.is_empty() || a.d.iter().any(|d| !(*d > 0.0 && d.is_finite())) {
        return Err(CliError::Usage("--d needs positive finite spacings".into()));
    }
    let cfg = &ctx.config;
    let r = angular_nonconservation(&a.d, cfg.angular_points)?;
    let spacings: Vec<String> = a.d.iter().map(f64::to_string).collect();
    let command = format!("angular --d {}", spacings.join(","));
    let mut t = Table::new(&command, cfg, &["d", "residual", "l_ground"]);
    for (d, r) in a.d.iter().zip(r) {
        t.push(vec![
            (*d).into(),
            r.into(),
            angular_ground(*d, cfg.angular_points)?.into(),
        ]);
    }
    let path = ctx.target(&a.out, "angular.csv");
    ctx.write(&t, &path, ("d", "residual", None))
}

/// `inset_points` couplings evenly spaced over `[0, inset_lambda_max]`.
pub fn inset_lambdas(cfg: &RunConfig) -> Vec<f64> {
    let n = cfg.inset_points.max(2);
    (0..n)
        .map(|i| cfg.inset_lambda_max * i as f64 / (n - 1) as f64)
        .collect()
}

pub fn scattering(ctx: &Context, a: &ScatteringArgs) -> Result<Vec<PathBuf>, CliError> {
    if a.v0.is_empty() {
        return Err(CliError::Usage("--v0 needs at least one value".into()));
    }
    let mut cfg = ctx.config.clone();
    if let Some(n) = a.n_theta {
        cfg.n_theta = n;
    }
    let curves =
        a.v0.iter()
            .map(|v0| scattering_sweep(*v0, cfg.n_theta, cfg.quad_resolution))
            .collect::<Result<Vec<_>, _>>()?;

    let depths: Vec<String> = a.v0.iter().map(f64::to_string).collect();
    let command = format!("scattering --v0 {}", depths.join(","));
    let mut t = Table::new(&command, &cfg, &["theta0_over_pi", "a_bar", "v0", "resolution"]);
    for c in &curves {
        for (th, ab) in c.theta0.iter().zip(&c.a_bar) {
            t.push(vec![(th / PI).into(), (*ab).into(), c.v0.into(), c.resolution.into()]);
        }
    }
    let mut inset = Table::new(&command, &cfg, &["lambda_L", "a_bar_at_0"]);
    for (l, ab) in origin_curve(&inset_lambdas(&cfg), cfg.quad_resolution)? {
        inset.push(vec![l.into(), ab.into()]);
    }

    let path = ctx.target(&a.out, "scattering.csv");
    let mut written = ctx.write(&t, &path, ("theta0_over_pi", "a_bar", Some("v0")))?;
    written.extend(ctx.write(&inset, &sibling(&path, "_inset"), ("lambda_L", "a_bar_at_0", None))?);
    Ok(written)
}

pub fn manybody(ctx: &Context, a: &ManybodyArgs) -> Result<Vec<PathBuf>, CliError> {
    let mut cfg = ctx.config.clone();
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    if let Some(c) = a.coeff_c {
        cfg.coeff_c = c;
    }
    let p = RingParams::new(a.n, a.lambda, cfg.coeff_c)?;
    let pc = match a.method {
        MethodArg::Quad if cfg.quad_refine > 1 => pair_correlation_cells(&p, cfg.pair_grid, cfg.quad_refine)?,
        MethodArg::Quad => pair_correlation_quad(&p, cfg.pair_grid)?,
        MethodArg::Mc => pair_correlation_mc(&p, cfg.pair_grid, cfg.mc_samples, cfg.mc_chains, cfg.seed)?,
    };
    let method = pc.method.to_string();
    let command = format!("manybody --n {} --lambda {} --method {method}", a.n, a.lambda);

    let columns: &[&'static str] = match pc.stderr {
        Some(_) => &["theta", "theta_prime", "rho", "stderr", "N", "lambda_tilde", "method"],
        None => &["theta", "theta_prime", "rho", "N", "lambda_tilde", "method"],
    };
    let mut t = Table::new(&command, &cfg, columns);
    if let Some(acc) = pc.acceptance {
        t.note(format!("acceptance = {acc:.16e}"));
    }
    let mesh = pc.mesh();
    for (i, th) in mesh.iter().enumerate() {
        for (j, tp) in mesh.iter().enumerate() {
            let idx = i * pc.g + j;
            let mut row: Vec<Cell> = vec![(*th).into(), (*tp).into(), pc.values[idx].into()];
            if let Some(se) = &pc.stderr {
                row.push(se[idx].into());
            }
            row.extend([a.n.into(), a.lambda.into(), method.as_str().into()]);
            t.push(row);
        }
    }
    let mut radial = Table::new(&command, &cfg, &["delta", "rho_hat"]);
    for (delta, rho) in radial_profile(&pc) {
        radial.push(vec![delta.into(), rho.into()]);
    }

    let path = ctx.target(&a.out, &format!("manybody_n{}_{method}.csv", a.n));
    let mut written = ctx.write(&t, &path, ("theta", "rho", None))?;
    written.extend(ctx.write(&radial, &sibling(&path, "_radial"), ("delta", "rho_hat", None))?);
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sibling_keeps_directory() {
        assert_eq!(
            sibling(Path::new("/a/b/run.csv"), "_inset"),
            PathBuf::from("/a/b/run_inset.csv")
        );
        assert_eq!(sibling(Path::new("run"), "_radial"), PathBuf::from("run_radial.csv"));
    }

    #[test]
    fn inset_spans_the_range() {
        let l = inset_lambdas(&RunConfig::default());
        assert_eq!(l.len(), 41);
        assert_eq!(l[0], 0.0);
        assert_eq!(*l.last().unwrap(), 2.0);
    }

    #[test]
    fn seeded_alphas_stay_in_the_disc() {
        let cfg = RunConfig::default();
        let grid = KGrid::new(0.1, 64).unwrap();
        let a = seeded_alphas(&cfg, CoherentKind::Defined, &grid);
        assert_eq!(a.len(), 20);
        assert!(a.iter().all(|z| z.norm() <= 3.0));
        assert_eq!(a, seeded_alphas(&cfg, CoherentKind::Defined, &grid));
        let e = seeded_alphas(&cfg, CoherentKind::Eigenstate, &grid);
        assert!((e[2].re - 3.0 * 0.1 / SQRT_2).abs() < 1e-15);
    }
}
