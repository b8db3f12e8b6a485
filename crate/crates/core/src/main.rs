use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use twomedian::builders::random_point;
use twomedian::disc::gauss_bonnet::gauss_bonnet;
use twomedian::disc::{fill_disc, full_triangle_disc};
use twomedian::full_triangle::FullTriangleQuery;
use twomedian::geodesic::geodesic;
use twomedian::io::{from_point, read_complex, read_points, to_json, to_points, write_json, ResultFile};
use twomedian::link::{build_link, check_cat0};
use twomedian::median::{median2, FourTriangles, Location};
use twomedian::svg::{render_configuration, render_diagram, render_link};
use twomedian::tetra::verify_quadruple;
use twomedian::{Error, PointRef, TriangleComplex};

/// Geodesics, full triangles and 2-medians in 2-dimensional CAT(0) triangle complexes.
#[derive(Parser)]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Complex file (JSON).
    #[arg(long, global = true)]
    complex: Option<PathBuf>,
    /// Point file (JSON).
    #[arg(long, global = true)]
    points: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 1e-6)]
    tol: f64,
    /// Where to write the result file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Where to write an SVG picture.
    #[arg(long, global = true)]
    svg: Option<PathBuf>,
    /// Seed for randomized audits.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Check the link condition and simple connectivity.
    CheckCat0,
    /// Geodesic between two points.
    Geodesic,
    /// Full triangle on the first three points; membership of the others.
    FullTriangle,
    /// 2-median of four points.
    Median2,
    /// Folded disc filling the geodesic triangle on three points.
    FillDisc,
    /// Gauss–Bonnet audit of filled discs (given points, or random ones with --seed).
    AuditGb,
    /// Build, fold and verify the deflated tetrahedron through the 2-median.
    TetraVerify,
    /// Picture of a link (one point), a full triangle (three) or a 2-median configuration (four).
    RenderSvg,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::CheckCat0 => "check-cat0",
            Command::Geodesic => "geodesic",
            Command::FullTriangle => "full-triangle",
            Command::Median2 => "median2",
            Command::FillDisc => "fill-disc",
            Command::AuditGb => "audit-gb",
            Command::TetraVerify => "tetra-verify",
            Command::RenderSvg => "render-svg",
        }
    }
}

/// How a run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
enum Status {
    Ok,
    Invalid,
    Violation,
    Failed,
}

impl Status {
    fn code(self) -> u8 {
        match self {
            Status::Ok => 0,
            Status::Failed => 1,
            Status::Invalid => 2,
            Status::Violation => 3,
        }
    }

    fn of(e: &Error) -> Self {
        if e.is_theorem_violation() {
            return Status::Violation;
        }
        match e {
            Error::Invalid(_)
            | Error::Input(_)
            | Error::PointNotInCell(_)
            | Error::CoordsOutOfRange(_)
            | Error::NotMember(_)
            | Error::CurvatureTooLarge(_) => Status::Invalid,
            _ => Status::Failed,
        }
    }
}

struct Outcome {
    status: Status,
    result: ResultFile,
    svg: Option<String>,
}

fn ok(kind: &str, location: Value, diagnostics: Value) -> Outcome {
    Outcome { status: Status::Ok, result: ResultFile { kind: kind.into(), location, diagnostics }, svg: None }
}

fn spec(x: &TriangleComplex, p: &PointRef) -> Value {
    serde_json::to_value(from_point(x, p)).unwrap()
}

fn need(points: &[PointRef], n: usize, what: &str) -> twomedian::Result<()> {
    if points.len() < n {
        return Err(Error::Input(format!("{what} needs {n} points, got {}", points.len())));
    }
    Ok(())
}

fn four(points: &[PointRef]) -> twomedian::Result<[PointRef; 4]> {
    need(points, 4, "a quadruple")?;
    Ok([points[0], points[1], points[2], points[3]])
}

fn labelled(points: &[PointRef]) -> Vec<(PointRef, String)> {
    points.iter().enumerate().map(|(i, p)| (*p, format!("x{i}"))).collect()
}

fn run(cli: &Cli) -> twomedian::Result<Outcome> {
    let path = cli.complex.as_ref().ok_or_else(|| Error::Input("--complex is required".into()))?;
    let x = read_complex(path)?;
    let x = &x;
    let points = match &cli.points {
        Some(p) => to_points(x, &read_points(p)?)?,
        None => Vec::new(),
    };
    match cli.command {
        Command::CheckCat0 => {
            let report = check_cat0(x);
            let mut out = ok("cat0", json!(report.passed), serde_json::to_value(&report).unwrap());
            if !report.passed {
                out.status = Status::Invalid;
            }
            if cli.svg.is_some() {
                // the worst link if any fails, else the first vertex
                let v = report
                    .link_failures
                    .first()
                    .and_then(|f| x.vertex_labels.iter().position(|l| l.to_string() == f.vertex))
                    .unwrap_or(0);
                out.svg = Some(render_link(&build_link(x, &PointRef::Vertex(v)), &format!("link of {}", x.vertex_labels[v])));
            }
            Ok(out)
        }
        Command::Geodesic => {
            need(&points, 2, "a geodesic")?;
            let g = geodesic(x, &points[0], &points[1])?;
            let path: Vec<Value> = g.path.points.iter().map(|p| spec(x, p)).collect();
            Ok(ok("geodesic", json!({ "length": g.length, "path": path }), json!({ "worst_violation": g.worst_violation })))
        }
        Command::FullTriangle => {
            need(&points, 3, "a full triangle")?;
            let corners = [points[0], points[1], points[2]];
            let q = FullTriangleQuery::new(x, corners)?;
            let contains: Vec<bool> = points[3..].iter().map(|p| q.contains(p)).collect::<twomedian::Result<_>>()?;
            let disc = full_triangle_disc(x, &corners[0], &corners[1], &corners[2])?;
            let d = disc.diagram();
            let mut out = ok(
                "full_triangle",
                json!({ "contains": contains }),
                json!({
                    "area": disc.image(x).area(),
                    "triangles": d.tris.len(),
                    "euler_characteristic": d.euler_characteristic(),
                    "side_lengths": q.sides().iter().map(|s| s.length).collect::<Vec<_>>(),
                }),
            );
            out.svg = Some(render_configuration(x, &[d], &labelled(&points), None, "full triangle"));
            Ok(out)
        }
        Command::Median2 => {
            let pts = four(&points)?;
            let m = median2(x, &pts, cli.tol)?;
            let mut diag = serde_json::to_value(&m.diagnostics).unwrap();
            diag["clusters"] = m.diagnostics.clusters.iter().map(|p| spec(x, p)).collect();
            let (kind, location, segment) = match &m.location {
                Location::Point { point } => ("point", spec(x, point), None),
                Location::Segment { ends, length, split } => (
                    "segment",
                    json!({ "ends": [spec(x, &ends[0]), spec(x, &ends[1])], "length": length, "split": split }),
                    Some(*ends),
                ),
            };
            let mut out = ok(kind, location, diag);
            if cli.svg.is_some() {
                let discs = FourTriangles::new(x, pts)?;
                let ds: Vec<_> = discs.discs.iter().map(|d| d.diagram()).collect();
                let mut marks = labelled(&pts);
                if let Some(p) = m.point() {
                    marks.push((p, "m".into()));
                }
                out.svg = Some(render_configuration(x, &ds, &marks, segment, "2-median"));
            }
            Ok(out)
        }
        Command::FillDisc => {
            need(&points, 3, "a disc")?;
            let f = fill_disc(x, &points[..3])?;
            let d = &f.diagram;
            let mut out = ok(
                "disc",
                json!({
                    "triangles": d.tris.len(),
                    "euler_characteristic": d.euler_characteristic(),
                    "is_disc": d.is_disc(),
                }),
                json!({ "fold": f.fold, "overlaps": f.overlaps.len() }),
            );
            if !f.overlaps.is_empty() {
                out.status = Status::Violation;
            }
            out.svg = Some(render_diagram(x, d, "folded disc"));
            Ok(out)
        }
        Command::AuditGb => {
            let triples: Vec<[PointRef; 3]> = match cli.seed {
                Some(seed) if points.is_empty() => {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    (0..10).map(|_| [0; 3].map(|_| random_point(x, &mut rng))).collect()
                }
                _ => {
                    need(&points, 3, "a disc")?;
                    points.chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect()
                }
            };
            let mut audits = Vec::new();
            let mut worst: f64 = 0.0;
            let mut signs = true;
            for t in &triples {
                let f = fill_disc(x, t)?;
                let c = gauss_bonnet(x, &f.diagram);
                worst = worst.max(c.residual);
                signs &= c.sign_ok;
                audits.push(json!({
                    "corners": t.iter().map(|p| spec(x, p)).collect::<Vec<_>>(),
                    "residual": c.residual,
                    "sign_ok": c.sign_ok,
                    "chi": c.chi,
                    "worst_interior": c.worst_interior,
                    "worst_boundary": c.worst_boundary,
                }));
            }
            let mut out = ok("gauss_bonnet", json!({ "worst_residual": worst, "sign_ok": signs }), json!({ "audits": audits }));
            if worst >= 1e-9 || !signs {
                out.status = Status::Violation;
            }
            Ok(out)
        }
        Command::TetraVerify => {
            let pts = four(&points)?;
            let (report, fold) = verify_quadruple(x, &pts, cli.tol)?;
            let location = json!({ "conclusions_ok": report.conclusions_ok(), "all_ok": report.all_ok() });
            let mut out = ok("tetra", location, json!({ "report": report, "fold": fold }));
            if !report.conclusions_ok() {
                out.status = Status::Violation;
            }
            Ok(out)
        }
        Command::RenderSvg => {
            let svg = match points.len() {
                1 => render_link(&build_link(x, &points[0]), "link"),
                3 => {
                    let d = full_triangle_disc(x, &points[0], &points[1], &points[2])?;
                    render_configuration(x, &[d.diagram()], &labelled(&points), None, "full triangle")
                }
                4 => {
                    let pts = four(&points)?;
                    let discs = FourTriangles::new(x, pts)?;
                    let ds: Vec<_> = discs.discs.iter().map(|d| d.diagram()).collect();
                    render_configuration(x, &ds, &labelled(&points), None, "full triangles")
                }
                n => return Err(Error::Input(format!("render-svg takes 1, 3 or 4 points, got {n}"))),
            };
            let mut out = ok("svg", Value::Null, json!({ "bytes": svg.len() }));
            out.svg = Some(svg);
            Ok(out)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command = cli.command.name();
    let (status, report) = match run(&cli) {
        Ok(out) => {
            let mut written = Ok(());
            if let Some(path) = &cli.out {
                written = write_json(path, &out.result);
            }
            if let (Some(path), Some(svg)) = (&cli.svg, &out.svg) {
                if written.is_ok() {
                    written = std::fs::write(path, svg).map_err(|e| Error::Input(format!("cannot write {}: {e}", path.display())));
                }
            }
            match written {
                Ok(()) => (out.status, json!({ "command": command, "status": out.status, "result": out.result })),
                Err(e) => {
                    eprintln!("error: {e}");
                    (Status::Failed, json!({ "command": command, "status": Status::Failed, "error": e.to_string() }))
                }
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            let status = Status::of(&e);
            (status, json!({ "command": command, "status": status, "error": e.to_string() }))
        }
    };
    print!("{}", to_json(&report));
    ExitCode::from(status.code())
}
