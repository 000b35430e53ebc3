use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use spectral_bounds::eigensolve::SolverOptions;
use spectral_bounds::verify::{
    certify, configure_threads, heisenberg_verify, immersibility, mesh_verify, slack_svg,
    sphere_verify, AmbientSpec, CertifyOptions, HeisenbergOptions, MeshOptions, MeshSource,
    OutputFormat, PotentialSpec, SphereOptions, VerificationReport,
    DEFAULT_DISCRETIZATION_TOLERANCE,
};

/// Check universal eigenvalue inequalities against closed-form and computed spectra.
#[derive(Parser)]
#[command(name = "spectral-bounds", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Relative discretization band for computed spectra.
    #[arg(long, global = true, default_value_t = DEFAULT_DISCRETIZATION_TOLERANCE)]
    tol: f64,
    /// Seed for solver start blocks and random sampling.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Also write an SVG plot of normalized slack against k.
    #[arg(long, global = true)]
    plot: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Exact saturation and closed-form bound checks on the round n-sphere.
    SphereVerify {
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 10)]
        m_max: u32,
    },
    /// Assemble −Δ + q on a mesh, solve and check the inequalities.
    MeshVerify {
        /// Built-in mesh: icosphere:L, ellipsoid:a:b:c:L, cap:angle:L, clifford:res, disc:r:rings, torus:L1:L2:res.
        #[arg(long = "gen", conflicts_with = "mesh", required_unless_present = "mesh")]
        generator: Option<String>,
        /// Mesh file in OFF format.
        #[arg(long)]
        mesh: Option<PathBuf>,
        #[arg(long, default_value_t = 20)]
        kmax: usize,
        /// Potential: zero, const:c or gh2:g (q = g|h|²).
        #[arg(long, default_value = "zero")]
        q: String,
        /// Treat the surface as immersed in sphere, rp, cp or qp.
        #[arg(long)]
        ambient: Option<String>,
        /// Export the assembled operator as COO triplets plus a JSON sidecar.
        #[arg(long)]
        export: Option<PathBuf>,
        #[arg(long, default_value_t = 1e-8)]
        solver_tol: f64,
        #[arg(long, default_value_t = 500)]
        max_iter: usize,
    },
    /// Dirichlet sublaplacian on a Heisenberg cube.
    HeisenbergVerify {
        #[arg(long, default_value_t = 1)]
        n: u32,
        /// Cube side length.
        #[arg(long = "box", default_value_t = 2.0)]
        side: f64,
        #[arg(long, default_value_t = 24)]
        res: usize,
        #[arg(long, default_value_t = 10)]
        kmax: usize,
        #[arg(long, default_value_t = 1e-8)]
        solver_tol: f64,
        #[arg(long, default_value_t = 1000)]
        max_iter: usize,
    },
    /// Lower bound on ‖h‖² from a spectrum stored as a JSON list.
    Immersibility {
        spectrum: PathBuf,
        #[arg(long, default_value_t = 2)]
        n: u32,
        /// Use only λ_1..λ_(K+1).
        #[arg(long = "k")]
        k: Option<usize>,
    },
    /// Exact saturation certificates over a range of dimensions and levels.
    Certify {
        #[arg(long, default_value_t = 6)]
        n_max: u32,
        #[arg(long, default_value_t = 20)]
        m_max: u32,
        /// Coupling g for the shifted operator, repeatable (decimal or p/q).
        #[arg(long = "g", allow_hyphen_values = true)]
        g: Vec<String>,
        /// Random rational couplings per (n, m).
        #[arg(long, default_value_t = 0)]
        g_samples: usize,
    },
}

fn run(cli: Cli) -> spectral_bounds::Result<VerificationReport> {
    let g = &cli.global;
    let solver = |tol: f64, max_iter: usize| SolverOptions {
        tol,
        max_iter,
        seed: g.seed,
        ..SolverOptions::default()
    };
    match cli.command {
        Command::SphereVerify { n, m_max } => sphere_verify(&SphereOptions::new(n, m_max)),
        Command::MeshVerify { generator, mesh, kmax, q, ambient, export, solver_tol, max_iter } => {
            let source = match (generator, mesh) {
                (Some(spec), _) => MeshSource::parse_generator(&spec)?,
                (None, Some(path)) => MeshSource::File(path),
                (None, None) => unreachable!("clap requires one mesh source"),
            };
            let mut opts = MeshOptions::new(source, kmax);
            opts.potential = q.parse::<PotentialSpec>()?;
            opts.ambient = ambient.map(|a| a.parse::<AmbientSpec>()).transpose()?;
            opts.tol = g.tol;
            opts.solver = solver(solver_tol, max_iter);
            opts.export = export;
            mesh_verify(&opts)
        }
        Command::HeisenbergVerify { n, side, res, kmax, solver_tol, max_iter } => {
            let mut opts = HeisenbergOptions::new(n, side, res, kmax);
            opts.tol = g.tol;
            opts.solver = solver(solver_tol, max_iter);
            heisenberg_verify(&opts)
        }
        Command::Immersibility { spectrum, n, k } => immersibility(&spectrum, n, k),
        Command::Certify { n_max, m_max, g: g_values, g_samples } => certify(&CertifyOptions {
            n_max,
            m_max,
            g_values,
            g_samples,
            seed: g.seed,
        }),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    let format = match cli.global.format {
        Format::Json => OutputFormat::Json,
        Format::Csv => OutputFormat::Csv,
    };
    let out = cli.global.out.clone();
    let plot = cli.global.plot.clone();
    let report = match run(cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(if e.is_input_error() { 2 } else { 1 });
        }
    };
    let written = match &out {
        Some(path) => report.write(path, format),
        None => report.render(format).map(|text| {
            // A closed pipe (e.g. `| head`) is not an error worth reporting.
            let _ = writeln!(std::io::stdout().lock(), "{text}");
        }),
    };
    let plotted = plot.map_or(Ok(()), |p| std::fs::write(&p, slack_svg(&report)));
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    if let Err(e) = plotted {
        eprintln!("error: writing plot: {e}");
        return ExitCode::from(2);
    }
    let failed = report.failures().count();
    eprintln!(
        "{}: {} ({} checks, {failed} failed)",
        report.command,
        if report.pass { "PASS" } else { "FAIL" },
        report.checks.len()
    );
    if report.pass { ExitCode::SUCCESS } else { ExitCode::from(1) }
}
