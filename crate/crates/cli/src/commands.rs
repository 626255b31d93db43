use std::path::{Path, PathBuf};

use flakelab::{
    austin_certificate, cube_embedding_into_lp, cube_vertices, embed_snowflake_lp, enflo_type_constant,
    hamming_cube, lp_point_metric, model_space_descriptors, optimal_euclidean_distortion,
    rademacher_type_constant, snowflake, snowflake_exponent_scan, AustinHypothesis, AustinMember,
    C2Options, DistortionEvidence, EnfloCertificate, FiniteMetricSpace, MetricMap, PointSetLp,
    QuasiNormModel,
};
use serde::Deserialize;

use crate::args::{
    AustinArgs, Cli, Command, CubeArgs, DistortArgs, EmbedArgs, EnfloArgs, EnfloTarget, ScanArgs,
    SolverArgs, TypeArgs,
};
use crate::output::{read_json, write_atomic, Destination};
use crate::{suite, CliError, Result, OUT_DIR_ENV};

pub fn dispatch(cli: Cli) -> Result<()> {
    let out_dir = cli
        .out_dir
        .clone()
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from));
    let dir = out_dir.as_deref();
    match cli.command {
        Command::Cube(a) => cube(a, dir),
        Command::Embed(a) => embed(a, dir),
        Command::Distort(a) => distort(a, dir),
        Command::Enflo(a) => enflo(a, dir),
        Command::Type(a) => type_constant(a, dir),
        Command::Austin(a) => austin(a, dir),
        Command::Scan(a) => scan(a, dir),
        Command::Suite(a) => suite::run_from_args(a, cli.out_dir),
    }
}

impl SolverArgs {
    pub fn apply(&self, mut opts: C2Options) -> C2Options {
        if let Some(v) = self.rel_tol {
            opts.rel_tol = v;
        }
        if let Some(v) = self.feasibility_tol {
            opts.feasibility_tol = v;
        }
        if let Some(v) = self.max_iterations {
            opts.max_iterations = v;
        }
        opts
    }
}

fn cube(a: CubeArgs, dir: Option<&Path>) -> Result<()> {
    let space = hamming_cube(a.n as usize, a.p)?;
    Destination::resolve(a.out, dir, "cube.json").emit(&space)
}

#[derive(Deserialize)]
#[serde(untagged)]
enum PointsInput {
    Doc(PointSetLp),
    Bare(Vec<Vec<f64>>),
}

fn embed(a: EmbedArgs, dir: Option<&Path>) -> Result<()> {
    let ps = match (&a.points, a.cube) {
        (Some(path), _) => match read_json::<PointsInput>(path)? {
            PointsInput::Doc(doc) => PointSetLp::new(a.p.unwrap_or(doc.p), doc.points)?,
            PointsInput::Bare(points) => {
                let p = a
                    .p
                    .ok_or_else(|| CliError::Usage("--p is required for a bare array of points".into()))?;
                PointSetLp::new(p, points)?
            }
        },
        (None, Some(n)) => {
            let p = a.p.ok_or_else(|| CliError::Usage("--p is required with --cube".into()))?;
            PointSetLp::new(p, cube_vertices(n as usize))?
        }
        (None, None) => unreachable!("clap requires --points or --cube"),
    };
    let e = embed_snowflake_lp(&ps)?;
    Destination::resolve(a.out, dir, "embedding.json").emit(&e)
}

fn distort(a: DistortArgs, dir: Option<&Path>) -> Result<()> {
    let mut space = match (&a.space, a.cube) {
        (Some(path), _) => read_json::<FiniteMetricSpace>(path)?,
        (None, Some(n)) => hamming_cube(n as usize, a.p)?,
        (None, None) => unreachable!("clap requires --space or --cube"),
    };
    if let Some(alpha) = a.snowflake {
        space = snowflake(&space, alpha)?;
    }
    let opts = a.solver.apply(C2Options::default());
    let r = optimal_euclidean_distortion(&space, &opts)?;
    Destination::resolve(a.out, dir, "distortion.json").emit(&r)
}

/// `{-1, 1}^n` in ℓ_2^n, in cube order.
pub fn euclidean_sign_cube(n: usize) -> Result<FiniteMetricSpace> {
    let pts = cube_vertices(n)
        .into_iter()
        .map(|v| v.into_iter().map(|b| 2.0 * b - 1.0).collect())
        .collect();
    Ok(lp_point_metric(&PointSetLp::new(2.0, pts)?)?)
}

/// Enflo certificate of the sign-cube identity into ℓ_2: constant 1, so the
/// distortion lower bound is √n.
pub fn hilbert_cube_certificate(n: usize) -> Result<EnfloCertificate> {
    let f = MetricMap::identity(hamming_cube(n, 1.0)?, euclidean_sign_cube(n)?)?;
    Ok(enflo_type_constant(format!("sign-cube-{n}-l2"), &f, 2.0)?)
}

fn enflo(a: EnfloArgs, dir: Option<&Path>) -> Result<()> {
    let (id, map) = match (&a.map, a.n, a.into) {
        (Some(path), _, _) => (path.display().to_string(), read_json::<MetricMap>(path)?),
        (None, Some(n), Some(into)) => {
            let n = n as usize;
            let source = hamming_cube(n, 1.0)?;
            let (name, target) = match into {
                EnfloTarget::Cube => ("cube", source.clone()),
                EnfloTarget::L2 => ("l2", euclidean_sign_cube(n)?),
                EnfloTarget::Snowflake => ("snowflake", snowflake(&source, a.alpha)?),
            };
            (format!("sign-cube-{n}-{name}"), MetricMap::identity(source, target)?)
        }
        _ => unreachable!("clap requires --map or --n with --into"),
    };
    let cert = enflo_type_constant(id, &map, a.exponent)?;
    Destination::resolve(a.out, dir, "enflo.json").emit(&cert)
}

fn type_constant(a: TypeArgs, dir: Option<&Path>) -> Result<()> {
    let (id, vectors) = match (&a.vectors, a.basis) {
        (Some(path), _) => (path.display().to_string(), read_json::<Vec<Vec<f64>>>(path)?),
        (None, Some(n)) => {
            let n = n as usize;
            let basis = (0..n)
                .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
                .collect();
            (format!("basis-{n}"), basis)
        }
        (None, None) => unreachable!("clap requires --vectors or --basis"),
    };
    let r = rademacher_type_constant(id, &vectors, a.q, a.p)?;
    Destination::resolve(a.out, dir, "type.json").emit(&r)
}

/// Cube family `H_n → (ℓ_{p_X}^n, ‖·‖^r)` with Hilbert-distortion evidence.
pub fn austin_family(model: &QuasiNormModel, dims: &[usize]) -> Result<Vec<AustinMember>> {
    dims.iter()
        .map(|&n| {
            let e = cube_embedding_into_lp(n, model)?;
            Ok(AustinMember {
                space: e.map.source.clone(),
                map: e.map,
                evidence: DistortionEvidence::Enflo(hilbert_cube_certificate(n)?),
            })
        })
        .collect()
}

pub fn austin_hypothesis(model: &QuasiNormModel, dims: &[usize], eta: f64) -> AustinHypothesis {
    AustinHypothesis {
        gamma: model.r / model.p_x,
        eta,
        a: 1.0,
        b: 1.0,
        k: 1.0,
        d: 1.0,
        family_ids: dims.iter().map(|n| format!("H{n}")).collect(),
    }
}

fn austin(a: AustinArgs, dir: Option<&Path>) -> Result<()> {
    let model = model_space_descriptors(a.model_p)?;
    let dims: Vec<usize> = a.dims.iter().map(|&n| n as usize).collect();
    let family = austin_family(&model, &dims)?;
    let mut h = austin_hypothesis(&model, &dims, a.eta);
    if let Some(g) = a.gamma {
        h.gamma = g;
    }
    h.a = a.a;
    h.b = a.b;
    h.k = a.k;
    h.d = a.d;
    let bound = austin_certificate(&h, &family)?;
    let dest = Destination::resolve(a.out, dir, "austin.json");
    dest.emit(&bound)?;
    if let Some(csv) = a.csv.or_else(|| dest.sibling("austin.csv")) {
        write_atomic(&csv, bound.to_csv()?.as_bytes())?;
    }
    Ok(())
}

fn scan(a: ScanArgs, dir: Option<&Path>) -> Result<()> {
    let opts = a.solver.apply(C2Options::default());
    let table = snowflake_exponent_scan(&a.dims, &a.alphas, &opts)?;
    let dest = Destination::resolve(a.out, dir, "scan.json");
    dest.emit(&table)?;
    if let Some(csv) = a.csv.or_else(|| dest.sibling("scan.csv")) {
        write_atomic(&csv, table.to_csv()?.as_bytes())?;
    }
    Ok(())
}
