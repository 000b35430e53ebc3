//! The five verification pipelines behind the command-line tool.

use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{AmbientSpec, BoundRow, CheckRow, MeshSource, PotentialSpec, SolverSummary, VerificationReport};
use crate::bounds::{
    ambient_deltas, heisenberg_bounds, heisenberg_simple, heisenberg_yang_check,
    immersion_curvature_floor, quadratic_bounds, reilly_chain, reilly_first, simple_upper,
    yang_check, yang_check_simple, InequalityCheck, SpectralData, Tolerance, CLOSED_FORM_TOLERANCE,
};
use crate::certifier::{
    certify_gap_shift, certify_saturation, parse_rational, sphere_index_sweep, SaturationReport,
};
use crate::eigensolve::{solve_smallest, EigenSolution, SolverOptions};
use crate::geometry::{
    apply_dirichlet, assemble_heisenberg, assemble_laplacian, delta_integrals, export_operator,
    mean_curvature, schrodinger, DiscreteOperator, HeisenbergGrid,
};
use crate::spectra::{ambient_constant, gap_index, sphere_spectrum};
use crate::{Error, Result};

/// Default relative band absorbing discretization error in computed spectra.
pub const DEFAULT_DISCRETIZATION_TOLERANCE: f64 = 0.05;

fn closed_form_label() -> String {
    "closed form: relative 1e-9; exact certificates: zero tolerance".to_string()
}

fn band_label(tol: f64) -> String {
    format!(
        "discretization band {tol}: inequality rows relative to max(|lhs|, |rhs|), bracket and upper-bound rows relative to λ_(k+1)"
    )
}

fn saturation_row(name: &str, r: &SaturationReport) -> CheckRow {
    let lhs = r.lhs.to_f64().unwrap_or(f64::NAN);
    let rhs = r.rhs.to_f64().unwrap_or(f64::NAN);
    let slack = (&r.rhs - &r.lhs).to_f64().unwrap_or(f64::NAN);
    let g = r.g.as_ref().map(|g| format!(" g={g}")).unwrap_or_default();
    CheckRow {
        name: name.to_string(),
        k: r.k.to_u64().unwrap_or(u64::MAX),
        lhs,
        rhs,
        slack,
        tolerance: 0.0,
        satisfied: r.equal,
        detail: Some(format!("n={} m={}{g} lhs={} rhs={}", r.n, r.m, r.lhs, r.rhs)),
    }
}

/// `|lhs − rhs| ≤ rel·max(|lhs|, |rhs|)`, as a row.
fn equality_row(name: &str, check: &InequalityCheck, rel: f64) -> CheckRow {
    let scale = check.lhs.abs().max(check.rhs.abs());
    let eq = InequalityCheck::with_scale(check.k, check.slack.abs(), 0.0, Tolerance::Relative(rel), scale);
    CheckRow::from_check(name, &eq)
}

fn solver_summary(op: &DiscreteOperator, sol: &EigenSolution) -> SolverSummary {
    SolverSummary {
        unknowns: op.dim(),
        vertices: op.full_size,
        boundary_size: op.boundary_size(),
        eigenvalues: sol.eigenvalues.clone(),
        residuals: sol.residuals.clone(),
        iterations: sol.iterations,
        converged: sol.converged_count,
        max_residual: sol.residuals.iter().fold(0.0, |a: f64, &b| a.max(b)),
        mass_orthonormality_error: sol.mass_orthonormality_error(&op.mass),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SphereOptions {
    pub n: u32,
    pub m_max: u32,
    /// Largest `k` evaluated in floating point (the gap index grows fast).
    pub float_k_cap: usize,
}

impl SphereOptions {
    pub fn new(n: u32, m_max: u32) -> Self {
        Self { n, m_max, float_k_cap: 5000 }
    }
}

/// Exact saturation at every gap level `m ≤ m_max`, the exact inequality at
/// every index, and the floating-point bound checks on the closed-form
/// spectrum of the unit `n`-sphere with `δ_i = n²/4`.
pub fn sphere_verify(opts: &SphereOptions) -> Result<VerificationReport> {
    let n = opts.n;
    if n == 0 {
        return Err(Error::invalid("dimension n must be at least 1"));
    }
    let mut report = VerificationReport::new("sphere-verify", 0, closed_form_label());
    report.param("n", n);
    report.param("m_max", opts.m_max);

    for r in certify_saturation(n, opts.m_max)? {
        report.push(saturation_row("saturation", &r));
    }

    let k_gap = gap_index(n, opts.m_max)?;
    let k_max = k_gap.to_usize().unwrap_or(usize::MAX).min(opts.float_k_cap);
    report.param("k_max", k_max);
    for r in sphere_index_sweep(n, k_max as u64)? {
        let row = CheckRow {
            name: "yang_exact".to_string(),
            k: r.k,
            lhs: r.lhs.to_f64().unwrap_or(f64::NAN),
            rhs: r.rhs.to_f64().unwrap_or(f64::NAN),
            slack: (&r.rhs - &r.lhs).to_f64().unwrap_or(f64::NAN),
            tolerance: 0.0,
            satisfied: r.satisfied,
            detail: r.at_gap.then(|| "gap index".to_string()),
        };
        report.push(row);
    }

    // Enough levels to reach λ_{k_max+1}.
    let mut levels = opts.m_max as usize + 2;
    let values = loop {
        let seq = sphere_spectrum(n, levels)?.to_f64();
        if seq.total_count() as usize > k_max {
            break seq.expanded(k_max + 1);
        }
        levels += 1;
    };
    let n_f = f64::from(n);
    let delta = n_f * n_f / 4.0;
    for k in 1..=k_max {
        let data = SpectralData::from_prefix(n, &values, k)?
            .with_deltas(vec![delta; k])?
            .with_delta_sup(delta)?;
        let next = values[k];
        let yang = yang_check(&data, CLOSED_FORM_TOLERANCE)?;
        report.push(CheckRow::from_check("yang", &yang));
        if next > values[k - 1] {
            report.push(equality_row("yang_equality", &yang, 1e-9));
        }
        let bound = quadratic_bounds(&data, None)?;
        report.push(CheckRow::from_check("bracket", &bound.bracket_check(k, next, CLOSED_FORM_TOLERANCE)));
        report.bounds.push(BoundRow::from_bound("quadratic", k, &bound, Some(next)));
        let upper = simple_upper(&data)?;
        report.push(CheckRow::from_check(
            "simple_upper",
            &InequalityCheck::with_scale(k, next, upper, CLOSED_FORM_TOLERANCE, next),
        ));
    }

    if values.len() >= 2 {
        // The round sphere has |h|² = n² everywhere.
        let reilly = reilly_first(values[1], n_f * n_f, n, CLOSED_FORM_TOLERANCE)?;
        report.push(CheckRow::from_check("reilly_first", &reilly));
        let floor = immersion_curvature_floor(&values, n)?;
        report.push(CheckRow::from_check(
            "curvature_floor",
            &InequalityCheck::new(floor.k, floor.floor, n_f * n_f, CLOSED_FORM_TOLERANCE),
        ));
        report.values.insert("curvature_floor".into(), floor.floor);
    }
    report.values.insert("gap_index".into(), k_gap.to_f64().unwrap_or(f64::INFINITY));
    Ok(report.finalize())
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeshOptions {
    pub source: MeshSource,
    pub k_max: usize,
    pub potential: PotentialSpec,
    pub ambient: Option<AmbientSpec>,
    /// Relative discretization band.
    pub tol: f64,
    pub solver: SolverOptions,
    /// Writes the assembled operator in COO form when set.
    pub export: Option<PathBuf>,
}

impl MeshOptions {
    pub fn new(source: MeshSource, k_max: usize) -> Self {
        Self {
            source,
            k_max,
            potential: PotentialSpec::Zero,
            ambient: None,
            tol: DEFAULT_DISCRETIZATION_TOLERANCE,
            solver: SolverOptions::default(),
            export: None,
        }
    }
}

fn validate_band(tol: f64) -> Result<()> {
    if !(tol >= 0.0 && tol.is_finite()) {
        return Err(Error::invalid("tolerance must be a nonnegative number"));
    }
    Ok(())
}

/// Assembles `−Δ + q` on the mesh (Dirichlet if it has a boundary), solves
/// for `k_max + 1` eigenpairs and checks every inequality that applies.
pub fn mesh_verify(opts: &MeshOptions) -> Result<VerificationReport> {
    if opts.k_max == 0 {
        return Err(Error::invalid("k_max must be at least 1"));
    }
    validate_band(opts.tol)?;
    let mesh = opts.source.build()?;
    if mesh.is_periodic() {
        return Err(Error::invalid(
            "mesh-verify needs an immersed surface; the coordinates of a periodically identified mesh are not single-valued",
        ));
    }
    let full = assemble_laplacian(&mesh)?;
    let geom = mean_curvature(&mesh, &full)?;
    let q = opts.potential.evaluate(&geom.h_sq);
    let base = if mesh.is_closed() {
        full.clone()
    } else {
        apply_dirichlet(&full, mesh.boundary())?
    };
    let op = schrodinger(&base, &q)?;
    if let Some(path) = &opts.export {
        export_operator(&op, path)?;
    }
    if opts.k_max + 1 > op.dim() {
        return Err(Error::invalid(format!(
            "k_max + 1 = {} exceeds the {} unknowns of the operator",
            opts.k_max + 1,
            op.dim()
        )));
    }
    let sol = solve_smallest(&op, opts.k_max + 1, &opts.solver)?;
    let values = &sol.eigenvalues;
    let ints = delta_integrals(&op, &sol.eigenvectors, &geom.h_sq)?;

    let n = 2u32;
    let tol = Tolerance::Relative(opts.tol);
    let mut report = VerificationReport::new("mesh-verify", opts.solver.seed, band_label(opts.tol));
    report.param("mesh", opts.source.to_string());
    report.param("k_max", opts.k_max);
    report.param("potential", opts.potential.to_string());
    report.param("ambient", opts.ambient.map(|a| format!("{a:?}").to_lowercase()));
    report.param("solver_tol", opts.solver.tol);
    report.param("closed", mesh.is_closed());

    // Per-dof `|h|²/4 − q` (or its ambient analogue) for the uniform δ.
    let interior = &op.interior_map;
    let (deltas, pointwise): (Vec<f64>, Vec<f64>) = match opts.ambient {
        None => {
            let pw = interior.iter().map(|&d| geom.h_sq[d] / 4.0 - q[d]).collect();
            (ints.deltas.clone(), pw)
        }
        Some(AmbientSpec::Sphere) => {
            // Mean curvature inside the unit sphere: drop the radial part.
            let reps = mesh.representatives();
            let mut tangential = vec![0.0; mesh.num_dofs()];
            for (d, t) in tangential.iter_mut().enumerate() {
                let x = mesh.vertex(reps[d]);
                let r2: f64 = x.iter().map(|c| c * c).sum();
                if (r2 - 1.0).abs() > 1e-6 {
                    return Err(Error::invalid(format!(
                        "--ambient sphere needs vertices on the unit sphere (|X|² = {r2} at vertex {d})"
                    )));
                }
                let h = &geom.mean_curvature[d];
                let radial: f64 = h.iter().zip(x).map(|(a, b)| a * b).sum();
                *t = h.iter().zip(x).map(|(a, b)| (a - radial * b).powi(2)).sum();
            }
            let c = ambient_constant(AmbientSpec::Sphere.space(), n)?.effective_f64();
            let t_ints = delta_integrals(&op, &sol.eigenvectors, &tangential)?;
            let deltas = ambient_deltas(&t_ints.h_sq_integrals, &ints.q_integrals, c)?;
            let pw = interior.iter().map(|&d| 0.25 * (tangential[d] + c) - q[d]).collect();
            report.values.insert("max_tangential_h_sq".into(), tangential.iter().fold(0.0, |a: f64, &b| a.max(b)));
            (deltas, pw)
        }
        Some(amb) => {
            let c = ambient_constant(amb.space(), n)?.effective_f64();
            let deltas = ambient_deltas(&ints.h_sq_integrals, &ints.q_integrals, c)?;
            let pw = interior.iter().map(|&d| 0.25 * (geom.h_sq[d] + c) - q[d]).collect();
            report.values.insert("ambient_constant".into(), c);
            (deltas, pw)
        }
    };
    let delta_sup = pointwise.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));

    for k in 1..=opts.k_max {
        let next = values[k];
        let data = SpectralData::from_prefix(n, values, k)?
            .with_deltas(deltas[..k].to_vec())?
            .with_delta_sup(delta_sup)?;
        report.push(CheckRow::from_check("yang", &yang_check(&data, tol)?));
        report.push(CheckRow::from_check("yang_simple", &yang_check_simple(&data, tol)?));
        let bound = quadratic_bounds(&data, None)?;
        report.push(CheckRow::from_check("bracket", &bound.bracket_check(k, next, tol)));
        report.bounds.push(BoundRow::from_bound("quadratic", k, &bound, Some(next)));
        let upper = simple_upper(&data)?;
        report.push(CheckRow::from_check(
            "simple_upper",
            &InequalityCheck::with_scale(k, next, upper, tol, next),
        ));
    }

    let max_iso = geom.triangle_energy_density.iter().map(|e| (e - 2.0).abs()).fold(0.0, f64::max);
    report.push(CheckRow::from_check(
        "isometry",
        &InequalityCheck::new(0, max_iso, 0.0, Tolerance::Absolute(1e-9)),
    ));

    // Boundary nodes carry the boundary curvature, not h; use interior nodes.
    let mean_h_sq = geom.mean_h_sq(&op);
    let max_h_sq = interior.iter().map(|&d| geom.h_sq[d]).fold(0.0, f64::max);
    if opts.potential.is_zero() {
        let floor = immersion_curvature_floor(values, n)?;
        report.push(CheckRow::from_check(
            "curvature_floor",
            &InequalityCheck::new(floor.k, floor.floor, max_h_sq, tol),
        ));
        report.values.insert("curvature_floor".into(), floor.floor);
        if mesh.is_closed() {
            let reilly = reilly_first(values[1], mean_h_sq, n, tol)?;
            report.values.insert("reilly_ratio".into(), values[1] / reilly.rhs);
            report.push(CheckRow::from_check("reilly_first", &reilly));
            let chain = reilly_chain(values[0], max_h_sq, n, (opts.k_max + 1) as u32)?;
            for c in chain.check(values, tol) {
                report.push(CheckRow::from_check("reilly_chain", &c));
            }
            if let Some(b) = chain.bound(2) {
                report.values.insert("reilly_chain_ratio_k2".into(), values[1] / b);
            }
        }
    }

    report.values.insert("mean_h_sq".into(), mean_h_sq);
    report.values.insert("max_h_sq".into(), max_h_sq);
    report.values.insert("delta_sup".into(), delta_sup);
    report.values.insert("area".into(), mesh.total_area());
    report.values.insert("euler_characteristic".into(), mesh.euler_characteristic() as f64);
    report.solver = Some(solver_summary(&op, &sol));
    Ok(report.finalize())
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeisenbergOptions {
    pub n: u32,
    /// Side length of the cube `[−side/2, side/2]^{2n+1}`.
    pub side: f64,
    pub res: usize,
    pub k_max: usize,
    pub tol: f64,
    pub solver: SolverOptions,
}

impl HeisenbergOptions {
    pub fn new(n: u32, side: f64, res: usize, k_max: usize) -> Self {
        Self {
            n,
            side,
            res,
            k_max,
            tol: DEFAULT_DISCRETIZATION_TOLERANCE,
            solver: SolverOptions::default(),
        }
    }
}

/// Dirichlet sublaplacian on a Heisenberg cube: the universal inequality,
/// the two-sided bracket, and dominance of the simple bound.
pub fn heisenberg_verify(opts: &HeisenbergOptions) -> Result<VerificationReport> {
    if opts.n == 0 {
        return Err(Error::invalid("Heisenberg parameter n must be at least 1"));
    }
    if opts.k_max == 0 {
        return Err(Error::invalid("k_max must be at least 1"));
    }
    if opts.res < 8 {
        return Err(Error::invalid("resolution must be at least 8 per axis"));
    }
    validate_band(opts.tol)?;
    let grid = HeisenbergGrid::cube(opts.n, opts.side, opts.res)?;
    let op = assemble_heisenberg(&grid)?;
    if opts.k_max + 1 > op.dim() {
        return Err(Error::invalid("k_max + 1 exceeds the number of grid unknowns"));
    }
    let sol = solve_smallest(&op, opts.k_max + 1, &opts.solver)?;
    let values = &sol.eigenvalues;
    let tol = Tolerance::Relative(opts.tol);

    let mut report = VerificationReport::new("heisenberg-verify", opts.solver.seed, band_label(opts.tol));
    report.param("n", opts.n);
    report.param("side", opts.side);
    report.param("res", opts.res);
    report.param("k_max", opts.k_max);
    report.param("solver_tol", opts.solver.tol);

    for k in 1..=opts.k_max {
        let next = values[k];
        let data = SpectralData::from_prefix(opts.n, values, k)?;
        report.push(CheckRow::from_check("heisenberg_yang", &heisenberg_yang_check(&data, tol)?));
        let bound = heisenberg_bounds(&data);
        report.push(CheckRow::from_check("bracket", &bound.bracket_check(k, next, tol)));
        report.bounds.push(BoundRow::from_bound("heisenberg", k, &bound, Some(next)));
        let simple = heisenberg_simple(&data);
        report.push(CheckRow::from_check(
            "simple_dominates_upper",
            &InequalityCheck::new(k, bound.upper, simple.bound, CLOSED_FORM_TOLERANCE),
        ));
        report.push(
            CheckRow::from_check(
                "simple_upper",
                &InequalityCheck::with_scale(k, next, simple.bound, tol, next),
            )
            .with_detail(format!("ppw_comparison={}", simple.ppw_comparison)),
        );
    }
    report.solver = Some(solver_summary(&op, &sol));
    Ok(report.finalize())
}

/// Curvature floor from a spectrum stored as a JSON array of numbers.
pub fn immersibility(path: &Path, n: u32, k: Option<usize>) -> Result<VerificationReport> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let values: Vec<f64> = serde_json::from_str(&text)?;
    let prefix = match k {
        Some(0) => return Err(Error::invalid("K must be at least 1")),
        Some(k) if values.len() < k + 1 => {
            return Err(Error::invalid(format!(
                "K = {k} needs {} eigenvalues, the file has {}",
                k + 1,
                values.len()
            )))
        }
        Some(k) => &values[..=k],
        None => &values[..],
    };
    let floor = immersion_curvature_floor(prefix, n)?;
    let mut report = VerificationReport::new("immersibility", 0, "none (evaluation only)");
    report.param("spectrum", path.display().to_string());
    report.param("n", n);
    report.param("K", prefix.len() - 1);
    report.param("per_k", &floor.per_k);
    report.values.insert("floor".into(), floor.floor);
    report.values.insert("k".into(), floor.k as f64);
    Ok(report.finalize())
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertifyOptions {
    pub n_max: u32,
    pub m_max: u32,
    /// Couplings `g` given as decimals or fractions.
    pub g_values: Vec<String>,
    /// Random rational couplings per `(n, m)`.
    pub g_samples: usize,
    pub seed: u64,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        Self {
            n_max: 6,
            m_max: 20,
            g_values: Vec::new(),
            g_samples: 0,
            seed: 42,
        }
    }
}

/// A random rational `p/q` with `|p| ≤ 1000` and `1 ≤ q ≤ 1000`.
pub fn random_rational(rng: &mut impl Rng) -> BigRational {
    let p: i64 = rng.gen_range(-1000..=1000);
    let q: i64 = rng.gen_range(1..=1000);
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

/// Exact saturation for every `n ≤ n_max`, `m ≤ m_max`, plus the shifted
/// identity for the requested and sampled couplings.
pub fn certify(opts: &CertifyOptions) -> Result<VerificationReport> {
    if opts.n_max == 0 {
        return Err(Error::invalid("n range must include at least n = 1"));
    }
    let couplings: Vec<BigRational> = opts.g_values.iter().map(|g| parse_rational(g)).collect::<Result<_>>()?;
    let mut report = VerificationReport::new("certify", opts.seed, "exact: zero tolerance");
    report.param("n_max", opts.n_max);
    report.param("m_max", opts.m_max);
    report.param("g", &opts.g_values);
    report.param("g_samples", opts.g_samples);

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for n in 1..=opts.n_max {
        for r in certify_saturation(n, opts.m_max)? {
            report.push(saturation_row("saturation", &r));
        }
        for m in 0..=opts.m_max {
            let sampled: Vec<BigRational> = (0..opts.g_samples).map(|_| random_rational(&mut rng)).collect();
            for g in couplings.iter().chain(&sampled) {
                report.push(saturation_row("gap_shift", &certify_gap_shift(n, m, g)?));
            }
        }
    }
    Ok(report.finalize())
}
