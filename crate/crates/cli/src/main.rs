//! `bgeo`: decision-boundary geometry from the command line.
//!
//! Subcommands cover the whole pipeline: synthetic data, training,
//! derivative checks, curvature sampling, tensor dumps, level-set
//! extraction, Euler-characteristic reports, flatness conditions and the
//! end-to-end two-spheres experiment.

use anyhow::{bail, Context, Result};
use boundary_geometry::curvature::{sample_curvature, ChartQuality};
use boundary_geometry::derivatives::fd_check;
use boundary_geometry::error::Error as GeoError;
use boundary_geometry::flatness::{check_conditions, make_flat_network, TheoremCase};
use boundary_geometry::levelset::{
    extract_curve_2d, extract_surface_3d, sample_grid, GridSpec,
};
use boundary_geometry::network::{ActivationKind, MlpNetwork};
use boundary_geometry::pipeline::{
    gen_spheres_dataset, run_experiment_43, train, ExperimentConfig, LabeledDataset, TrainConfig,
};
use boundary_geometry::riemann::{boundary_tensors, DgammaPath};
use boundary_geometry::topology::euler_characteristic;
use clap::{Parser, Subcommand};
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "bgeo", version, about = "geometry and topology of decision boundaries")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the two-spheres dataset as CSV (x,y,z,label).
    GenData {
        /// points per class
        #[arg(long, default_value_t = 600)]
        n: usize,
        /// inner,outer sphere radii
        #[arg(long, default_value = "1,2", allow_hyphen_values = true)]
        radii: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train a one-hidden-layer network with full-batch gradient descent.
    Train {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value_t = 40)]
        hidden: usize,
        /// tanh | sigmoid | softplus:ALPHA
        #[arg(long, default_value = "tanh")]
        act: String,
        #[arg(long, default_value_t = 0.5)]
        lr: f64,
        #[arg(long, default_value_t = 500_000)]
        iters: u64,
        #[arg(long, default_value_t = 0.1)]
        init_std: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compare analytic derivatives against finite differences at a point.
    CheckDerivs {
        #[arg(long)]
        model: PathBuf,
        /// comma-separated coordinates
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        #[arg(long, default_value_t = 1e-5)]
        step: f64,
    },
    /// Evaluate boundary curvature (k in 2D, K in 3D) at points from a CSV.
    Curvature {
        #[arg(long)]
        model: PathBuf,
        /// CSV of points, one row per point
        #[arg(long)]
        points: PathBuf,
        /// output CSV (stdout when omitted)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Dump metric, Christoffel symbols, Riemann tensor, curvature 2-form
    /// and Euler-form density at a point.
    Tensors {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        /// use the manifold finite-difference path for the connection
        /// derivative instead of the analytic one
        #[arg(long)]
        fd: bool,
        #[arg(long, default_value_t = 1e-4)]
        step: f64,
    },
    /// Extract the boundary as geometry: OBJ mesh (3D) or CSV curves (2D).
    Extract {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value_t = 0.02)]
        lambda: f64,
        /// per-axis bounds "lo,hi;lo,hi;..."
        #[arg(long, allow_hyphen_values = true)]
        bounds: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Extract the boundary and report its Euler characteristic.
    Euler {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value_t = 0.02)]
        lambda: f64,
        /// per-axis bounds "lo,hi;..." (default: [-2.5, 2.5] per axis)
        #[arg(long, allow_hyphen_values = true)]
        bounds: Option<String>,
        #[arg(long)]
        mesh_out: Option<PathBuf>,
    },
    /// Check the flat/developable weight conditions of a model.
    CheckFlat {
        #[arg(long)]
        model: PathBuf,
    },
    /// Construct a network satisfying a flatness condition exactly.
    MakeFlat {
        /// t61a | t61b | t63a | t63b | t64-linear | t64-axis:Q
        #[arg(long)]
        case: String,
        /// input and hidden widths, e.g. 3x40 or 4x20x20
        #[arg(long)]
        dims: String,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the end-to-end two-spheres experiment and write artifacts.
    Experiment43 {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 600)]
        n: usize,
        #[arg(long, default_value_t = 40)]
        hidden: usize,
        #[arg(long, default_value_t = 0.5)]
        lr: f64,
        #[arg(long, default_value_t = 500_000)]
        iters: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 0.02)]
        lambda: f64,
    },
}

fn parse_floats(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .with_context(|| format!("bad number {t:?}"))
        })
        .collect()
}

fn parse_bounds(text: &str) -> Result<Vec<(f64, f64)>> {
    text.split(';')
        .map(|axis| {
            let v = parse_floats(axis)?;
            if v.len() != 2 {
                bail!("bounds axis {axis:?} must be lo,hi");
            }
            Ok((v[0], v[1]))
        })
        .collect()
}

fn parse_activation(text: &str) -> Result<ActivationKind> {
    match text {
        "tanh" => Ok(ActivationKind::Tanh),
        "sigmoid" => Ok(ActivationKind::Sigmoid),
        other => {
            if let Some(alpha) = other.strip_prefix("softplus:") {
                Ok(ActivationKind::Softplus {
                    alpha: alpha.parse().context("bad softplus alpha")?,
                })
            } else {
                bail!("unknown activation {other:?} (tanh | sigmoid | softplus:ALPHA)")
            }
        }
    }
}

fn parse_dims(text: &str) -> Result<Vec<usize>> {
    text.split('x')
        .map(|t| t.parse::<usize>().with_context(|| format!("bad dim {t:?}")))
        .collect()
}

fn parse_case(text: &str) -> Result<TheoremCase> {
    Ok(match text {
        "t61a" => TheoremCase::T61a,
        "t61b" => TheoremCase::T61b,
        "t63a" => TheoremCase::T63a,
        "t63b" => TheoremCase::T63b,
        "t64-linear" => TheoremCase::T64Linear,
        other => {
            if let Some(q) = other.strip_prefix("t64-axis:") {
                TheoremCase::T64Axis(q.parse().context("bad axis index")?)
            } else {
                bail!("unknown case {other:?}")
            }
        }
    })
}

fn load_points_csv(path: &PathBuf) -> Result<Vec<Vec<f64>>> {
    let text = std::fs::read_to_string(path)?;
    let mut points = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if ln == 0 && line.split(',').next().unwrap_or("").parse::<f64>().is_err() {
            continue; // header
        }
        points.push(parse_floats(line).with_context(|| format!("line {}", ln + 1))?);
    }
    Ok(points)
}

fn run() -> Result<()> {
    match Cli::parse().command {
        Command::GenData { n, radii, seed, out } => {
            let r = parse_floats(&radii)?;
            if r.len() != 2 {
                bail!("--radii needs two values");
            }
            let data = gen_spheres_dataset(n, (r[0], r[1]), seed)?;
            data.save_csv(&out)?;
            eprintln!("wrote {} points to {}", data.len(), out.display());
        }
        Command::Train {
            data,
            hidden,
            act,
            lr,
            iters,
            init_std,
            seed,
            out,
        } => {
            let dataset = LabeledDataset::load_csv(&data)?;
            let activation = parse_activation(&act)?;
            let net0 = MlpNetwork::random(&[dataset.dim(), hidden], activation, init_std, seed)?;
            let cfg = TrainConfig {
                lr,
                iters,
                init_std,
                seed,
                ..TrainConfig::default()
            };
            let outcome = train(&net0, &dataset, &cfg)?;
            outcome.net.save(&out)?;
            println!(
                "{}",
                serde_json::json!({
                    "accuracy": outcome.accuracy,
                    "final_loss": outcome.final_loss,
                    "monotonicity_violations": outcome.monotonicity_violations,
                    "model": out.display().to_string(),
                })
            );
        }
        Command::CheckDerivs { model, point, step } => {
            let net = MlpNetwork::load(&model)?;
            let x = parse_floats(&point)?;
            let report = fd_check(&net, &x, step)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
        }
        Command::Curvature { model, points, out } => {
            let net = MlpNetwork::load(&model)?;
            let pts = load_points_csv(&points)?;
            let mut csv = String::new();
            let d = net.input_dim();
            for axis in 0..d {
                csv.push_str(&format!("x{},", axis + 1));
            }
            csv.push_str("curvature,grad_norm,dependent_axis,flag\n");
            for p in &pts {
                for v in p {
                    csv.push_str(&format!("{v},"));
                }
                match sample_curvature(&net, p) {
                    Ok(s) => {
                        let flag = match s.quality {
                            ChartQuality::Good => "good",
                            ChartQuality::Marginal => "marginal",
                        };
                        csv.push_str(&format!(
                            "{},{},{},{}\n",
                            s.curvature, s.grad_norm, s.dependent_axis, flag
                        ));
                    }
                    Err(GeoError::SingularPoint { grad_norm, .. }) => {
                        csv.push_str(&format!(",{grad_norm},,singular\n"));
                    }
                    Err(e) => return Err(e.into()),
                }
            }
            match out {
                Some(path) => std::fs::write(path, csv)?,
                None => print!("{csv}"),
            }
        }
        Command::Tensors {
            model,
            point,
            fd,
            step,
        } => {
            let net = MlpNetwork::load(&model)?;
            let x = parse_floats(&point)?;
            let path = if fd {
                DgammaPath::ManifoldFd { step }
            } else {
                DgammaPath::Analytic
            };
            let tensors = boundary_tensors(&net, &x, path)?;
            println!("{}", serde_json::to_string_pretty(&tensors.to_report())?);
        }
        Command::Extract {
            model,
            lambda,
            bounds,
            out,
        } => {
            let net = MlpNetwork::load(&model)?;
            let spec = GridSpec::new(parse_bounds(&bounds)?, lambda)?;
            let grid = sample_grid(&net, &spec)?;
            match net.input_dim() {
                3 => {
                    let mesh = extract_surface_3d(&net, &grid)?;
                    mesh.save_obj(&out)?;
                    eprintln!(
                        "wrote {} vertices / {} faces to {}",
                        mesh.vertices.len(),
                        mesh.faces.len(),
                        out.display()
                    );
                }
                2 => {
                    let curves = extract_curve_2d(&net, &grid)?;
                    curves.save_csv(&out)?;
                    eprintln!(
                        "wrote {} loops / {} open chains to {}",
                        curves.loops.len(),
                        curves.open_chains.len(),
                        out.display()
                    );
                }
                d => bail!("extraction supports 2D and 3D models, got {d}D"),
            }
        }
        Command::Euler {
            model,
            lambda,
            bounds,
            mesh_out,
        } => {
            let net = MlpNetwork::load(&model)?;
            if net.input_dim() != 3 {
                bail!("euler needs a 3D model");
            }
            let bounds = match bounds {
                Some(b) => parse_bounds(&b)?,
                None => vec![(-2.5, 2.5); 3],
            };
            let spec = GridSpec::new(bounds, lambda)?;
            let grid = sample_grid(&net, &spec)?;
            let mesh = extract_surface_3d(&net, &grid)?;
            let report = euler_characteristic(&net, &mesh, lambda)?;
            if let Some(path) = mesh_out {
                mesh.save_obj(path)?;
            }
            println!("{}", serde_json::to_string_pretty(&report)?);
        }
        Command::CheckFlat { model } => {
            let net = MlpNetwork::load(&model)?;
            let verdicts = check_conditions(&net)?;
            println!("{}", serde_json::to_string_pretty(&verdicts)?);
        }
        Command::MakeFlat {
            case,
            dims,
            seed,
            out,
        } => {
            let case = parse_case(&case)?;
            let dims = parse_dims(&dims)?;
            let net = make_flat_network(case, &dims, seed)?;
            net.save(&out)?;
            eprintln!("wrote {case} network to {}", out.display());
        }
        Command::Experiment43 {
            out,
            n,
            hidden,
            lr,
            iters,
            seed,
            lambda,
        } => {
            let cfg = ExperimentConfig {
                n_per_class: n,
                hidden,
                lambda,
                data_seed: seed,
                train: TrainConfig {
                    lr,
                    iters,
                    seed,
                    ..TrainConfig::default()
                },
                out_dir: Some(out.clone()),
                ..ExperimentConfig::default()
            };
            let outcome = run_experiment_43(&cfg)?;
            println!(
                "{}",
                serde_json::json!({
                    "accuracy": outcome.accuracy,
                    "final_loss": outcome.final_loss,
                    "report": outcome.report,
                    "artifacts": out.display().to_string(),
                })
            );
        }
    }
    Ok(())
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
