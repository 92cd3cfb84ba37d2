//! Command-line interface of the `movprim` binary.

use std::f64::consts::TAU;
use std::path::PathBuf;
use std::sync::Arc;

use clap::error::ErrorKind;
use clap::{ArgGroup, Args, CommandFactory, Parser, Subcommand, ValueEnum};
use nalgebra::{DMatrix, DVector};

use crate::combine::CombinationNode;
use crate::contraction::{
    block_eigenvalues, check_contraction, check_transverse_hopf, solve_metric_and_rate, transformation_jacobian,
    HopfRegion, LinearSystem, Metric, SampleRegion, ThetaThetaRule,
};
use crate::error::{Error, Result};
use crate::io::report::{contraction_report, transverse_report};
use crate::io::synth::{synth_demo, Shape};
use crate::io::{
    export_trajectory, gnuplot_script, load_combination, load_demonstration, load_primitive, save_demonstration,
    save_primitive,
};
use crate::learning::{learn_primitive, Gains, LearningParams};
use crate::trajectory::{MovementKind, Trajectory};
use crate::transform::{rollout_primitive, rotation_2d, rotation_3d, ModulatedPrimitive, Modulation, DEFAULT_DT};

#[derive(Debug, Parser)]
#[command(
    name = "movprim",
    version,
    about = "Learn, modulate, combine and verify movement primitives"
)]
pub struct Cli {
    /// Integration step in seconds
    #[arg(long, global = true, default_value_t = DEFAULT_DT, value_parser = positive)]
    pub dt: f64,
    /// Seed recorded for reproducible runs
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Log progress to stderr
    #[arg(short, long, global = true)]
    pub verbose: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a synthetic demonstration CSV
    Synth(SynthArgs),
    /// Fit a primitive to a demonstration CSV
    Learn(LearnArgs),
    /// Roll out a modulated primitive to a trajectory CSV
    Generate(GenerateArgs),
    /// Roll out a combination file to a trajectory CSV
    Combine(CombineArgs),
    /// Print a contraction certificate
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, value_enum)]
    pub shape: Shape,
    /// Number of samples (at least 2)
    #[arg(long, default_value_t = 1200, value_parser = clap::value_parser!(u64).range(2..))]
    pub samples: u64,
    /// Duration in seconds; rhythmic shapes complete one period
    #[arg(long, default_value_t = 1.0, value_parser = positive)]
    pub duration: f64,
    #[arg(long, default_value_t = 1.0, value_parser = positive)]
    pub amplitude: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Discrete,
    Rhythmic,
}

impl From<KindArg> for MovementKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Discrete => MovementKind::Discrete,
            KindArg::Rhythmic => MovementKind::Rhythmic,
        }
    }
}

#[derive(Debug, Args)]
pub struct LearnArgs {
    /// Demonstration CSV with header t,y1..yn[,v1..vn[,a1..an]]
    #[arg(long)]
    pub demo: PathBuf,
    #[arg(long, value_enum, default_value_t = KindArg::Discrete)]
    pub kind: KindArg,
    #[arg(long, default_value_t = 50, value_parser = clap::value_parser!(u64).range(1..))]
    pub n_basis: u64,
    #[arg(long, default_value_t = 100.0, value_parser = positive)]
    pub alpha_z: f64,
    /// Defaults to alpha_z / 4 (critical damping)
    #[arg(long, value_parser = positive)]
    pub beta_z: Option<f64>,
    /// Phase decay rate for discrete primitives [default: 1.0]
    #[arg(long, value_parser = positive)]
    pub alpha_s: Option<f64>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Trajectory CSV (t,y1..yn,v1..vn)
    #[arg(long)]
    pub out: PathBuf,
    /// Keep every n-th integration step (the last step is always kept)
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub stride: u64,
    /// Also write a gnuplot script for the CSV
    #[arg(long)]
    pub gnuplot_script: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long)]
    pub primitive: PathBuf,
    /// Spatial scale kappa_s
    #[arg(long, default_value_t = 1.0, value_parser = positive)]
    pub scale: f64,
    /// Temporal scale kappa_t (2 plays back twice as fast)
    #[arg(long, default_value_t = 1.0, value_parser = positive)]
    pub time_scale: f64,
    /// Rotation angle in degrees (planar, or about --rotate-axis in 3-D)
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub rotate_deg: f64,
    /// Rotation axis for 3-D primitives [default: 0,0,1]
    #[arg(long, value_delimiter = ',', num_args = 3, allow_negative_numbers = true)]
    pub rotate_axis: Option<Vec<f64>>,
    /// Spatial offset y_off, comma separated
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub offset: Option<Vec<f64>>,
    /// Start position y0, comma separated [default: origin]
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub start: Option<Vec<f64>>,
    /// Time offset t_off in seconds
    #[arg(long, default_value_t = 0.0)]
    pub time_offset: f64,
    /// Rollout length in seconds [default: 1.5 tau (discrete) or two periods (rhythmic)]
    #[arg(long, value_parser = positive)]
    pub duration: Option<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct CombineArgs {
    /// Combination file; primitive paths resolve against its directory
    #[arg(long)]
    pub config: PathBuf,
    /// Rollout length in seconds [default: covers every leaf]
    #[arg(long, value_parser = positive)]
    pub duration: Option<f64>,
    /// Start position, comma separated [default: first leaf's y0 + y_off]
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub start: Option<Vec<f64>>,
    /// Override the transformation-system time constant
    #[arg(long, value_parser = positive)]
    pub tau: Option<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ThetaRuleArg {
    /// tau_r^2 (gamma^2 - r^2)^2 + 1
    SquaredGap,
    /// tau_r^2 (gamma^2 - r^2) + value
    LinearGap,
    /// value
    Constant,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("system").required(true).args(["primitive", "hopf", "tau"])))]
pub struct VerifyArgs {
    /// Certify the transformation system of a primitive file
    #[arg(long)]
    pub primitive: Option<PathBuf>,
    /// Certify transverse contraction of the Hopf oscillator
    #[arg(long)]
    pub hopf: bool,
    /// Time constant of a transformation system given by its parameters
    #[arg(long, value_parser = positive)]
    pub tau: Option<f64>,
    #[arg(long, requires = "tau", default_value_t = 100.0, value_parser = positive)]
    pub alpha_z: f64,
    /// Defaults to alpha_z / 4
    #[arg(long, requires = "tau", value_parser = positive)]
    pub beta_z: Option<f64>,
    #[arg(long, requires = "tau", default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub dim: u64,
    /// Limit-cycle radius
    #[arg(long, requires = "hopf", default_value_t = 1.0, value_parser = positive)]
    pub gamma: f64,
    #[arg(long, requires = "hopf", default_value_t = 1.0, value_parser = positive)]
    pub tau_r: f64,
    /// Inner radius of the certified annulus (must be positive)
    #[arg(long, requires = "hopf", default_value_t = 0.5, value_parser = positive)]
    pub epsilon: f64,
    /// Grid points per polar axis
    #[arg(long, requires = "hopf", default_value_t = 64, value_parser = clap::value_parser!(u64).range(1..))]
    pub grid: u64,
    #[arg(long, requires = "hopf", value_enum, default_value_t = ThetaRuleArg::SquaredGap)]
    pub m_theta_theta: ThetaRuleArg,
    /// Margin or constant used by the linear-gap and constant rules
    #[arg(long, requires = "hopf", default_value_t = 1.0)]
    pub m_theta_theta_value: f64,
}

fn positive(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("must be a positive number, got {v}"))
    }
}

impl Cli {
    /// Cross-flag checks clap cannot express. Errors are usage errors.
    pub fn check(&self) -> std::result::Result<(), clap::Error> {
        let conflict = |msg: &str| Err(Cli::command().error(ErrorKind::ArgumentConflict, msg));
        match &self.command {
            Command::Learn(a) if a.kind == KindArg::Rhythmic && a.alpha_s.is_some() => {
                conflict("--alpha-s only applies to --kind discrete")
            }
            Command::Generate(a) if a.rotate_axis.is_some() && a.rotate_deg == 0.0 => {
                conflict("--rotate-axis needs a nonzero --rotate-deg")
            }
            _ => Ok(()),
        }
    }
}

pub fn run(cli: Cli) -> Result<()> {
    log::info!("dt = {}, seed = {}", cli.dt, cli.seed);
    match cli.command {
        Command::Synth(a) => synth(a),
        Command::Learn(a) => learn(a),
        Command::Generate(a) => generate(a, cli.dt),
        Command::Combine(a) => combine(a, cli.dt),
        Command::Verify(a) => verify(a),
    }
}

fn synth(a: SynthArgs) -> Result<()> {
    let demo = synth_demo(a.shape, a.samples as usize, a.duration, a.amplitude)?;
    save_demonstration(&demo, &a.out)?;
    println!("wrote {} {} samples to {}", demo.len(), a.shape, a.out.display());
    Ok(())
}

fn learn(a: LearnArgs) -> Result<()> {
    let demo = load_demonstration(&a.demo, a.kind.into())?;
    log::info!("loaded {} samples of dimension {}", demo.len(), demo.dim());
    let params = LearningParams {
        gains: Gains::new(a.alpha_z, a.beta_z.unwrap_or(a.alpha_z / 4.0))?,
        alpha_s: a.alpha_s.unwrap_or(1.0),
        n_basis: a.n_basis as usize,
    };
    let outcome = learn_primitive(&demo, &params)?;
    save_primitive(&outcome.primitive, &a.out)?;
    println!("relative residual: {:.6e}", outcome.relative_residual);
    println!("wrote {} primitive to {}", outcome.primitive.kind, a.out.display());
    Ok(())
}

fn vector(name: &'static str, v: Option<Vec<f64>>, dim: usize) -> Result<DVector<f64>> {
    match v {
        None => Ok(DVector::zeros(dim)),
        Some(v) if v.len() == dim => Ok(DVector::from_vec(v)),
        Some(v) => Err(Error::param(
            name,
            format!("primitive has dimension {dim}, got {} components", v.len()),
        )),
    }
}

fn rotation(dim: usize, degrees: f64, axis: Option<Vec<f64>>) -> Result<DMatrix<f64>> {
    match (dim, axis) {
        (_, None) if degrees == 0.0 => Ok(DMatrix::identity(dim, dim)),
        (2, None) => Ok(rotation_2d(degrees)),
        (3, None) => rotation_3d([0.0, 0.0, 1.0], degrees),
        (3, Some(axis)) => rotation_3d([axis[0], axis[1], axis[2]], degrees),
        (dim, _) => Err(Error::param(
            "rotate-deg",
            format!("rotations are supported for 2-D and 3-D primitives, got dimension {dim}"),
        )),
    }
}

/// Default rollout length for one modulated primitive, from its start.
fn natural_duration(leaf: &ModulatedPrimitive) -> f64 {
    let tau = leaf.effective_tau();
    leaf.modulation.t_off
        + match leaf.primitive.kind {
            MovementKind::Discrete => 1.5 * tau,
            MovementKind::Rhythmic => 2.0 * TAU * tau,
        }
}

fn tree_duration(node: &CombinationNode) -> f64 {
    match node {
        CombinationNode::Leaf(l) => natural_duration(l),
        CombinationNode::Parallel { children, .. } => children.iter().map(tree_duration).fold(0.0, f64::max),
        CombinationNode::Sequential { children, offsets, .. } => children
            .iter()
            .zip(offsets)
            .map(|(c, off)| off + tree_duration(c))
            .fold(0.0, f64::max),
    }
}

fn write_output(traj: &Trajectory, out: &OutputArgs) -> Result<()> {
    export_trajectory(traj, &out.out, out.stride as usize)?;
    println!("wrote {} steps to {}", traj.len(), out.out.display());
    if let Some(script) = &out.gnuplot_script {
        let text = gnuplot_script(&out.out, traj.dim());
        std::fs::write(script, text).map_err(|e| Error::io(script, e))?;
        println!("wrote gnuplot script to {}", script.display());
    }
    Ok(())
}

fn generate(a: GenerateArgs, dt: f64) -> Result<()> {
    let prim = Arc::new(load_primitive(&a.primitive)?);
    let dim = prim.dim();
    let modulation = Modulation {
        kappa_s: a.scale,
        kappa_t: a.time_scale,
        rotation: rotation(dim, a.rotate_deg, a.rotate_axis)?,
        y_off: vector("offset", a.offset, dim)?,
        t_off: a.time_offset,
        y0: vector("start", a.start, dim)?,
    };
    let leaf = ModulatedPrimitive::new(prim, modulation)?;
    let duration = a.duration.unwrap_or_else(|| natural_duration(&leaf));
    log::info!("rolling out {duration} s with tau = {}", leaf.effective_tau());
    let traj = rollout_primitive(&leaf, duration, dt)?;
    write_output(&traj, &a.output)
}

fn combine(a: CombineArgs, dt: f64) -> Result<()> {
    let node = load_combination(&a.config)?;
    let duration = a.duration.unwrap_or_else(|| tree_duration(&node));
    let dim = node.leaves()[0].primitive.dim();
    let start = a.start.map(|s| vector("start", Some(s), dim)).transpose()?;
    log::info!("rolling out {} leaves for {duration} s", node.leaves().len());
    let traj = node.rollout(duration, dt, start.as_ref(), a.tau)?;
    write_output(&traj, &a.output)
}

fn verify(a: VerifyArgs) -> Result<()> {
    if a.hopf {
        return verify_hopf(&a);
    }
    let (tau, gains, dim) = match &a.primitive {
        Some(path) => {
            let p = load_primitive(path)?;
            (p.tau_demo, p.gains, p.dim())
        }
        None => {
            let tau = a.tau.expect("clap enforces one system flag");
            let gains = Gains::new(a.alpha_z, a.beta_z.unwrap_or(a.alpha_z / 4.0))?;
            (tau, gains, a.dim as usize)
        }
    };
    println!(
        "transformation system: tau = {tau}, alpha_z = {}, beta_z = {}, n = {dim}",
        gains.alpha_z, gains.beta_z
    );
    let j = transformation_jacobian(tau, gains.alpha_z, gains.beta_z, dim)?;
    let (m, rate) = solve_metric_and_rate(&j)?;
    let system = LinearSystem(j.clone());
    let origin = SampleRegion::point(&vec![0.0; 2 * dim]);
    let cert = check_contraction(&system, &Metric::Constant(m), rate, &origin)?;
    print!("{}", contraction_report(&cert, &block_eigenvalues(&j)?));
    let identity = check_contraction(
        &system,
        &Metric::Constant(DMatrix::identity(2 * dim, 2 * dim)),
        rate,
        &origin,
    )?;
    println!(
        "identity metric at the same rate: worst residual {:.6e} ({})",
        identity.worst_residual,
        if identity.pass { "PASS" } else { "FAIL" }
    );
    if cert.pass {
        Ok(())
    } else {
        Err(Error::Singular(format!(
            "certificate failed with residual {:e}",
            cert.worst_residual
        )))
    }
}

fn verify_hopf(a: &VerifyArgs) -> Result<()> {
    let rule = match a.m_theta_theta {
        ThetaRuleArg::SquaredGap => ThetaThetaRule::SquaredGap,
        ThetaRuleArg::LinearGap => ThetaThetaRule::LinearGap {
            margin: a.m_theta_theta_value,
        },
        ThetaRuleArg::Constant => ThetaThetaRule::Constant(a.m_theta_theta_value),
    };
    let region = HopfRegion {
        r_count: a.grid as usize,
        theta_count: a.grid as usize,
        ..HopfRegion::new(a.epsilon, a.gamma)
    };
    let cert = check_transverse_hopf(a.gamma, a.tau_r, &region, rule)?;
    print!("{}", transverse_report(&cert));
    if cert.certificate.pass {
        Ok(())
    } else {
        Err(Error::Singular("transverse certificate failed".into()))
    }
}
