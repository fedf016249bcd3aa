//! Command-line front end: `solve`, `verify` and `volume`, each producing a
//! JSON [`RunReport`].

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::arith::{bloch_wigner, Field, Scalar};
use crate::bloch::{beta_of_shapes, delta, five_term, volume, volume_variation_check, VariationReport};
use crate::complex3::{parse_triangulation, ParseOptions, TriangulationComplex};
use crate::flags::{a_coordinates, random_rational_affine, AffineFlag, FlagTetrahedron};
use crate::gluing::{
    build_equations, classify_figure_eight, continue_family, figure_eight_standard_structures, multistart, newton_solve,
    random_start, snap_decoration, zcoords_c64, BoundaryTargets, Decoration, EigenTargets, EquationSystem,
    FamilyOptions, NewtonOptions, TangentSelection,
};
use crate::holonomy::{eigenvalue_pair, peripheral_invariants, PeripheralInvariants};
use crate::nzsymp::{
    epsilon_matrix, homology_hj, kernel_generators, master_sides, rank, verify_boundary_formula, verify_holonomy_square,
    verify_mult_by_4, IntegerMatrixComplex, NzError,
};

pub const SCHEMA_VERSION: u32 = 1;

const FIG8_JSON: &str = include_str!("../../examples/data/fig8.json");

pub const EXIT_PARSE: i32 = 2;
pub const EXIT_NO_CONVERGENCE: i32 = 3;
pub const EXIT_VERIFY: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "flagtri", version, about = "Flag-decorated triangulations: gluing equations, holonomy, volume and homological checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Solve the gluing equations by seeded multi-start Newton.
    Solve(SolveArgs),
    /// Run verification batteries.
    Verify(VerifyArgs),
    /// Volume, β and peripheral invariants of a given solution.
    Volume(VolumeArgs),
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    /// Write the JSON report here instead of stdout.
    #[arg(long, value_name = "OUT.json")]
    pub json: Option<PathBuf>,
    /// Record wall time in the report (makes it non-reproducible).
    #[arg(long)]
    pub timing: bool,
    /// Reject face gluings that do not preserve vertex order.
    #[arg(long)]
    pub require_ordered: bool,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    /// Triangulation file.
    pub file: PathBuf,
    /// `unipotent`, `free`, or a JSON file with one {a, a_star, b, b_star} per torus link.
    #[arg(long, default_value = "unipotent")]
    pub boundary: String,
    /// Residual tolerance (∞-norm of the log-residual).
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    #[arg(long, default_value_t = 100)]
    pub max_iter: usize,
    /// Number of random starts.
    #[arg(long, default_value_t = 100)]
    pub seeds: u64,
    /// First seed; starts use seed, seed + 1, ….
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Distinct solutions are at least this far apart.
    #[arg(long, default_value_t = 1e-6)]
    pub cluster_radius: f64,
    /// Continue a family of N steps from the solution of largest volume (internal equations only).
    #[arg(long = "continue", value_name = "N")]
    pub continue_steps: Option<usize>,
    #[arg(long, default_value_t = 1e-2)]
    pub step: f64,
    /// Snap solutions to ℚ(√−3) or ℚ(√−7) and re-verify exactly.
    #[arg(long)]
    pub snap: bool,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Bloch,
    Nz,
    Gluing,
    All,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Triangulation file (needed by the nz and gluing suites).
    pub file: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Suite::All)]
    pub suite: Suite,
    /// Random instances per randomized check.
    #[arg(long, default_value_t = 100)]
    pub random: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args, Debug)]
pub struct VolumeArgs {
    /// Triangulation file.
    pub file: PathBuf,
    /// JSON file with the shapes (z12, z21, z34, z43) of each tetrahedron.
    #[arg(long, conflicts_with_all = ["shapes", "standard"])]
    pub solution: Option<PathBuf>,
    /// The same, inline.
    #[arg(long, conflicts_with = "standard")]
    pub shapes: Option<String>,
    /// A figure-eight standard structure by name.
    #[arg(long)]
    pub standard: Option<String>,
    /// Use the complex conjugate decoration.
    #[arg(long)]
    pub conj: bool,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(String),
    #[error("no convergence: {0}")]
    NoConvergence(String),
    #[error("verification failed: {0}")]
    Verify(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => EXIT_PARSE,
            CliError::NoConvergence(_) => EXIT_NO_CONVERGENCE,
            CliError::Verify(_) => EXIT_VERIFY,
            CliError::Io(_) => 1,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct InputInfo {
    pub path: String,
    pub sha256: String,
    pub tetrahedra: usize,
    pub closed: bool,
    pub links: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<InputInfo>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solve: Option<SolveSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verify: Option<VerifySection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub volume: Option<VolumeSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<u128>,
}

impl RunReport {
    fn new(command: &str) -> Self {
        RunReport {
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            input: None,
            seed: None,
            solve: None,
            verify: None,
            volume: None,
            wall_time_ms: None,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TorusNumeric {
    pub link: usize,
    pub a_path: String,
    pub b_path: String,
    /// A, A*, B, B*.
    pub eigenvalues: [Complex64; 4],
}

#[derive(Clone, Debug, Serialize)]
pub struct ExactSolution {
    pub decoration: Decoration,
    pub holds_exactly: bool,
    pub peripheral: PeripheralInvariants,
}

#[derive(Clone, Debug, Serialize)]
pub struct SolutionEntry {
    pub shapes: Vec<[Complex64; 4]>,
    pub count: usize,
    pub first_seed: u64,
    pub iterations: usize,
    pub residual_trace: Vec<f64>,
    pub residual: f64,
    pub jacobian_rank: usize,
    pub volume: f64,
    pub peripheral: Vec<TorusNumeric>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub standard_structure: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<ExactSolution>,
}

#[derive(Clone, Debug, Serialize)]
pub struct FamilyRow {
    pub step: usize,
    pub residual: f64,
    pub volume: f64,
    pub peripheral: Vec<[Complex64; 4]>,
}

#[derive(Clone, Debug, Serialize)]
pub struct FamilySection {
    pub step: f64,
    pub rows: Vec<FamilyRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variation: Option<VariationReport>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SolveSection {
    pub boundary: String,
    pub equations: usize,
    pub unknowns: usize,
    pub attempts: usize,
    pub converged: usize,
    pub solutions: Vec<SolutionEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilySection>,
    pub note: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub suite: String,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifySection {
    pub suite: Suite,
    pub checks: Vec<CheckResult>,
    pub all_passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct VolumeSection {
    pub decoration: Decoration,
    pub volume: f64,
    /// Support of β with coefficients.
    pub beta: Vec<(String, i64)>,
    pub gluing_residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub holds_exactly: Option<bool>,
    pub peripheral: PeripheralInvariants,
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn load(path: &Path, opts: &OutputArgs) -> Result<(TriangulationComplex, InputInfo), CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    let cx = parse_triangulation(&text, ParseOptions { require_ordered: opts.require_ordered })
        .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    let info = InputInfo {
        path: path.display().to_string(),
        sha256: sha256_hex(text.as_bytes()),
        tetrahedra: cx.num_tetrahedra(),
        closed: cx.is_closed(),
        links: cx.links().iter().map(|l| format!("{:?}", l.kind).to_lowercase()).collect(),
    };
    Ok((cx, info))
}

fn is_figure_eight(cx: &TriangulationComplex) -> bool {
    parse_triangulation(FIG8_JSON, ParseOptions::default()).is_ok_and(|f| f.to_doc() == cx.to_doc())
}

fn parse_boundary(spec: &str) -> Result<BoundaryTargets, CliError> {
    match spec {
        "unipotent" => Ok(BoundaryTargets::Unipotent),
        "free" => Ok(BoundaryTargets::Free),
        path => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Parse(format!("{path}: {e}")))?;
            let t: Vec<EigenTargets> = serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("{path}: {e}")))?;
            Ok(BoundaryTargets::Explicit(t))
        }
    }
}

fn volume_c64(shapes: &[[Complex64; 4]]) -> f64 {
    shapes.iter().flatten().map(|&z| bloch_wigner(z)).sum::<f64>() / 4.0
}

fn peripheral_c64(cx: &TriangulationComplex, shapes: &[[Complex64; 4]]) -> Vec<TorusNumeric> {
    let Ok(z) = zcoords_c64(shapes) else { return vec![] };
    let mut out = vec![];
    for link in 0..cx.links().len() {
        let Ok((a, b)) = cx.link_homology_basis(link) else { continue };
        let (Ok((ca, cas)), Ok((cb, cbs))) = (eigenvalue_pair(&z, &a), eigenvalue_pair(&z, &b)) else { continue };
        out.push(TorusNumeric { link, a_path: a.to_string(), b_path: b.to_string(), eigenvalues: [ca, cas, cb, cbs] });
    }
    out
}

pub fn cmd_solve(args: &SolveArgs) -> Result<RunReport, CliError> {
    let (cx, info) = load(&args.file, &args.out)?;
    let targets = parse_boundary(&args.boundary)?;
    let sys = build_equations(&cx, &targets).map_err(|e| CliError::Parse(e.to_string()))?;
    let opts = NewtonOptions { tol: args.tol, max_iter: args.max_iter, ..NewtonOptions::default() };
    let mut report = RunReport::new("solve");
    report.seed = Some(args.seed);
    let unknowns = sys.num_unknowns();
    if sys.is_empty() {
        report.input = Some(info);
        report.solve = Some(SolveSection {
            boundary: args.boundary.clone(),
            equations: 0,
            unknowns,
            attempts: 0,
            converged: 0,
            solutions: vec![],
            family: None,
            note: "no equations: every generic decoration is a solution".to_string(),
        });
        return Ok(report);
    }
    let seeds: Vec<u64> = (args.seed..args.seed + args.seeds).collect();
    let ms = multistart(&sys, &seeds, &opts, args.cluster_radius);
    if ms.converged == 0 {
        return Err(CliError::NoConvergence(format!("0 of {} starts converged", ms.attempts)));
    }
    let fig8 = is_figure_eight(&cx);
    let table = figure_eight_standard_structures();
    let mut solutions = vec![];
    for c in &ms.clusters {
        let rerun = newton_solve(&sys, &random_start(sys.num_tetrahedra, c.first_seed), &opts)
            .map_err(|e| CliError::NoConvergence(e.to_string()))?;
        let standard_structure = fig8
            .then(|| classify_figure_eight(&c.representative, args.cluster_radius))
            .flatten()
            .map(|(k, conj)| if conj { format!("{} (conjugate)", table[k].name) } else { table[k].name.to_string() });
        let exact = if args.snap {
            snap_decoration(&sys, &c.representative, 1e-10).map(|d| {
                let holds = sys.holds_exactly(&d).unwrap_or(false);
                let peripheral = d.zcoords().ok().and_then(|z| peripheral_invariants(&cx, &z).ok()).unwrap_or_default();
                ExactSolution { decoration: d, holds_exactly: holds, peripheral }
            })
        } else {
            None
        };
        solutions.push(SolutionEntry {
            volume: volume_c64(&c.representative),
            peripheral: peripheral_c64(&cx, &c.representative),
            shapes: c.representative.clone(),
            count: c.count,
            first_seed: c.first_seed,
            iterations: rerun.iterations,
            residual_trace: rerun.trace,
            residual: rerun.residual,
            jacobian_rank: rerun.rank,
            standard_structure,
            exact,
        });
    }
    let family = match args.continue_steps {
        None => None,
        Some(steps) => {
            let free = build_equations(&cx, &BoundaryTargets::Free).map_err(|e| CliError::Parse(e.to_string()))?;
            let fopts = FamilyOptions { steps, step: args.step, tangent: TangentSelection::Seeded(args.seed), newton: opts };
            let from = solutions.iter().max_by(|x, y| x.volume.abs().total_cmp(&y.volume.abs())).expect("some solution converged");
            let fam = continue_family(&free, &from.shapes, &fopts).map_err(|e| CliError::NoConvergence(e.to_string()))?;
            let rows: Vec<FamilyRow> = fam
                .iter()
                .enumerate()
                .map(|(k, r)| FamilyRow {
                    step: k,
                    residual: r.residual,
                    volume: volume_c64(&r.shapes),
                    peripheral: peripheral_c64(&cx, &r.shapes).into_iter().map(|t| t.eigenvalues).collect(),
                })
                .collect();
            let variation = if rows.iter().all(|r| r.peripheral.len() == 1) {
                let vols: Vec<f64> = rows.iter().map(|r| r.volume).collect();
                let inv: Vec<[Complex64; 4]> = rows.iter().map(|r| r.peripheral[0]).collect();
                volume_variation_check(&vols, &inv).ok()
            } else {
                None
            };
            Some(FamilySection { step: args.step, rows, variation })
        }
    };
    report.input = Some(info);
    report.solve = Some(SolveSection {
        boundary: args.boundary.clone(),
        equations: sys.len(),
        unknowns,
        attempts: ms.attempts,
        converged: ms.converged,
        solutions,
        family,
        note: "solutions found from finitely many random starts; this is evidence, not a proof of completeness".to_string(),
    });
    Ok(report)
}

struct Checks {
    suite: &'static str,
    out: Vec<CheckResult>,
}

impl Checks {
    fn push(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.out.push(CheckResult { suite: self.suite.to_string(), name: name.to_string(), passed, detail: detail.into() });
    }

    fn from_result<T>(&mut self, name: &str, r: Result<T, NzError>, ok: impl FnOnce(&T) -> (bool, String)) {
        match r {
            Ok(v) => {
                let (p, d) = ok(&v);
                self.push(name, p, d);
            }
            Err(e) => self.push(name, false, e.to_string()),
        }
    }
}

pub fn bloch_checks(n: usize, seed: u64) -> Vec<CheckResult> {
    let mut c = Checks { suite: "bloch", out: vec![] };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bad = 0;
    for _ in 0..n {
        let flags = random_rational_affine(&mut rng, 8);
        if !master_sides(&flags).is_ok_and(|s| s.agree()) {
            bad += 1;
        }
    }
    c.push("master_identity", bad == 0, format!("δβ(T) = ½a∧a = ½z∧z on {n} random rational tetrahedra, {bad} failures"));

    let (mut done, mut bad) = (0, 0);
    while done < n {
        let x = Scalar::ratio(rng.gen_range(-200..200), rng.gen_range(1..150));
        let y = Scalar::ratio(rng.gen_range(-200..200), rng.gen_range(1..150));
        let Ok(f) = five_term(&x, &y) else { continue };
        done += 1;
        if !delta(&f).is_ok_and(|w| w.is_zero()) {
            bad += 1;
        }
    }
    c.push("five_term_delta", bad == 0, format!("δ(five-term) = 0 on {n} rational pairs, {bad} failures"));

    let mut worst: f64 = 0.0;
    for _ in 0..n {
        let x = Scalar::float(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        let y = Scalar::float(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        if let Ok(f) = five_term(&x, &y) {
            worst = worst.max((4.0 * volume(&f)).abs());
        }
    }
    c.push("five_term_dilog", worst < 1e-11, format!("max |Σ D| = {worst:.3e} on {n} complex pairs"));

    let hyp = volume(&beta_of_shapes(&vec![std::array::from_fn(|_| Scalar::omega()); 2]));
    c.push("fig8_volume", (hyp - 2.029883212819307).abs() < 1e-10, format!("Vol(all ω) = {hyp:.12}"));
    c.out
}

/// One random rational affine flag per vertex class; `None` when some
/// tetrahedron meets a vertex class twice or no generic draw is found.
pub fn random_vertex_decoration(cx: &TriangulationComplex, rng: &mut ChaCha8Rng) -> Option<Vec<[AffineFlag; 4]>> {
    let classes = cx.vertex_classes();
    let mut class_of = vec![[usize::MAX; 4]; cx.num_tetrahedra()];
    for (k, cl) in classes.iter().enumerate() {
        for &(t, v) in cl {
            class_of[t][v] = k;
        }
    }
    if class_of.iter().any(|c| (0..4).any(|a| (a + 1..4).any(|b| c[a] == c[b]))) {
        return None;
    }
    for _ in 0..100 {
        let pool: Vec<AffineFlag> =
            (0..classes.len().div_ceil(4)).flat_map(|_| random_rational_affine(rng, 6)).collect();
        let flags: Vec<[AffineFlag; 4]> =
            class_of.iter().map(|c| std::array::from_fn(|v| pool[c[v]].clone())).collect();
        let generic = flags.iter().all(|f| {
            FlagTetrahedron::new(std::array::from_fn(|v| f[v].flag())).is_ok() && a_coordinates(f).is_ok()
        });
        if generic {
            return Some(flags);
        }
    }
    None
}

pub fn nz_checks(cx: &TriangulationComplex, n: usize, seed: u64) -> Vec<CheckResult> {
    let mut c = Checks { suite: "nz", out: vec![] };
    let e = epsilon_matrix();
    let skew = e.transpose() == -&e;
    let kernel_ok = kernel_generators().iter().all(|g| (&e * nalgebra::DMatrix::from_column_slice(16, 1, g)).iter().all(|&x| x == 0));
    c.push("epsilon", skew && rank(&e) == 8 && kernel_ok, format!("skew {skew}, rank {}, ε·v = ε·w = 0: {kernel_ok}", rank(&e)));
    let m = IntegerMatrixComplex::new(cx);
    c.push("F*pF = 0", m.f_star_p_f_vanishes(), format!("F is {}×{}", m.f.nrows(), m.f.ncols()));
    c.from_result("homology_rank", homology_hj(cx), |r| {
        (r.rank == r.expected, format!("dim ℋ(J) = {} (expected {}), dim ℋ(J*) = {}, torsion {:?}", r.rank, r.expected, r.dim_h_jstar, r.torsion))
    });
    if cx.is_closed() {
        c.from_result("mult_by_4", verify_mult_by_4(cx), |r| (true, r.checks.join("; ")));
        c.push(
            "closed_case_wedge_identity",
            c.out.last().is_some_and(|x| x.passed),
            "certified structurally through h̄*Ω = −4ω; not checked numerically over ℂ",
        );
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        match random_vertex_decoration(cx, &mut rng) {
            None => c.push("unipotent_boundary_formula", true, "not applicable: no vertex-class decoration is generic"),
            Some(_) => {
                let mut bad = vec![];
                let trials = n.clamp(1, 20);
                for k in 0..trials {
                    let flags = random_vertex_decoration(cx, &mut rng).expect("a generic draw exists");
                    match verify_boundary_formula(cx, Some(&flags)) {
                        Ok(v) if v.holds() => {}
                        Ok(_) => bad.push(format!("trial {k}: δβ ≠ W(Σ)")),
                        Err(e) => bad.push(format!("trial {k}: {e}")),
                    }
                }
                c.push("unipotent_boundary_formula", bad.is_empty(), format!("δβ(K) = W(Σ) on {trials} random rational decorations {bad:?}"));
            }
        }
    }
    c.out
}

pub fn gluing_checks(cx: &TriangulationComplex, seed: u64) -> Vec<CheckResult> {
    let mut c = Checks { suite: "gluing", out: vec![] };
    let sys = match build_equations(cx, &BoundaryTargets::Unipotent) {
        Ok(s) => s,
        Err(e) => {
            c.push("equations", false, e.to_string());
            return c.out;
        }
    };
    c.push("equations", true, format!("{} equations in {} unknowns", sys.len(), sys.num_unknowns()));
    if is_figure_eight(cx) {
        for s in figure_eight_standard_structures() {
            let holds = sys.holds_exactly(&s.decoration).unwrap_or(false);
            let z = s.decoration.zcoords().expect("standard structures are generic");
            let unipotent = peripheral_invariants(cx, &z).is_ok_and(|p| p.tori.iter().all(|t| t.as_array().iter().all(|x| x.is_one())));
            c.push(&format!("standard_{}", s.name), holds && unipotent, format!("equations hold exactly: {holds}; A = B = A* = B* = 1: {unipotent}"));
            let sq = verify_holonomy_square(cx, &z);
            c.from_result(&format!("holonomy_square_{}", s.name), sq, |r| (r.exact, format!("{} entries", r.entries.len())));
        }
        let hyp = &figure_eight_standard_structures()[0];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = hyp.decoration.to_c64();
        let start: Vec<[Complex64; 4]> =
            w.iter().map(|s| s.map(|z| z + Complex64::new(rng.gen_range(-1e-2..1e-2), rng.gen_range(-1e-2..1e-2)))).collect();
        let ok = newton_solve(&sys, &start, &NewtonOptions::default())
            .is_ok_and(|r| r.shapes.iter().flatten().zip(w.iter().flatten()).all(|(a, b)| (a - b).norm() < 1e-10));
        c.push("newton_recovers_hyperbolic", ok, "from a 1e-2 perturbation of the all-ω point");
    } else if !sys.is_empty() {
        let ms = multistart(&sys, &(seed..seed + 20).collect::<Vec<_>>(), &NewtonOptions::default(), 1e-6);
        c.push("multistart", true, format!("{} of {} starts converged, {} clusters", ms.converged, ms.attempts, ms.clusters.len()));
    }
    c.out
}

pub fn cmd_verify(args: &VerifyArgs) -> Result<RunReport, CliError> {
    let mut report = RunReport::new("verify");
    report.seed = Some(args.seed);
    let needs_file = matches!(args.suite, Suite::Nz | Suite::Gluing);
    let loaded = match &args.file {
        Some(p) => Some(load(p, &args.out)?),
        None if needs_file => return Err(CliError::Parse(format!("suite {:?} needs a triangulation file", args.suite).to_lowercase())),
        None => None,
    };
    let mut checks = vec![];
    if matches!(args.suite, Suite::Bloch | Suite::All) {
        checks.extend(bloch_checks(args.random, args.seed));
    }
    if let Some((cx, _)) = &loaded {
        if matches!(args.suite, Suite::Nz | Suite::All) {
            checks.extend(nz_checks(cx, args.random, args.seed));
        }
        if matches!(args.suite, Suite::Gluing | Suite::All) {
            checks.extend(gluing_checks(cx, args.seed));
        }
    }
    let first_failure = checks.iter().find(|c| !c.passed).map(|c| format!("{}/{}", c.suite, c.name));
    report.input = loaded.map(|(_, i)| i);
    report.verify = Some(VerifySection { suite: args.suite, all_passed: first_failure.is_none(), first_failure, checks });
    Ok(report)
}

fn read_decoration(args: &VolumeArgs) -> Result<Decoration, CliError> {
    let text = if let Some(p) = &args.solution {
        std::fs::read_to_string(p).map_err(|e| CliError::Parse(format!("{}: {e}", p.display())))?
    } else if let Some(s) = &args.shapes {
        s.clone()
    } else if let Some(name) = &args.standard {
        let s = figure_eight_standard_structures().into_iter().find(|s| s.name == name);
        return s.map(|s| s.decoration).ok_or_else(|| CliError::Parse(format!("unknown standard structure {name}")));
    } else {
        return Err(CliError::Parse("one of --solution, --shapes, --standard is required".into()));
    };
    let shapes: Vec<[Scalar; 4]> = serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("shapes: {e}")))?;
    Decoration::new(shapes).map_err(|e| CliError::Parse(e.to_string()))
}

pub fn cmd_volume(args: &VolumeArgs) -> Result<RunReport, CliError> {
    let (cx, info) = load(&args.file, &args.out)?;
    let mut dec = read_decoration(args)?;
    if args.conj {
        dec = dec.conj();
    }
    if dec.num_tetrahedra() != cx.num_tetrahedra() {
        return Err(CliError::Parse(format!("{} tetrahedra in the solution, {} in the triangulation", dec.num_tetrahedra(), cx.num_tetrahedra())));
    }
    let sys: EquationSystem = build_equations(&cx, &BoundaryTargets::Free).map_err(|e| CliError::Parse(e.to_string()))?;
    let (res, _) = sys.residual(&dec.to_c64()).map_err(|e| CliError::Parse(e.to_string()))?;
    let b = beta_of_shapes(&dec.shapes);
    let z = dec.zcoords().map_err(|e| CliError::Parse(e.to_string()))?;
    let peripheral = peripheral_invariants(&cx, &z).map_err(|e| CliError::Parse(e.to_string()))?;
    let mut report = RunReport::new("volume");
    report.input = Some(info);
    report.volume = Some(VolumeSection {
        volume: volume(&b),
        beta: b.terms().map(|(p, n)| (p.to_string(), n)).collect(),
        gluing_residual: res.iter().map(|v| v.norm()).fold(0.0, f64::max),
        holds_exactly: dec.is_exact().then(|| sys.holds_exactly(&dec).unwrap_or(false)),
        peripheral,
        decoration: dec,
    });
    Ok(report)
}

/// Runs one command; the report is returned even when verification fails,
/// together with the exit code.
pub fn run(cli: &Cli) -> Result<(RunReport, i32), CliError> {
    let start = Instant::now();
    let (mut report, out) = match &cli.command {
        Command::Solve(a) => (cmd_solve(a)?, &a.out),
        Command::Verify(a) => (cmd_verify(a)?, &a.out),
        Command::Volume(a) => (cmd_volume(a)?, &a.out),
    };
    if out.timing {
        report.wall_time_ms = Some(start.elapsed().as_millis());
    }
    let text = serde_json::to_string_pretty(&report).expect("reports serialize") + "\n";
    match &out.json {
        Some(p) => std::fs::write(p, &text).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?,
        None => print!("{text}"),
    }
    let code = match &report.verify {
        Some(v) if !v.all_passed => EXIT_VERIFY,
        _ => 0,
    };
    Ok((report, code))
}

pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok((report, code)) => {
            if let Some(f) = report.verify.as_ref().and_then(|v| v.first_failure.as_ref()) {
                eprintln!("verification failed: {f}");
            }
            code
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
