//! `sahom`: homology of semi-algebraic maps and zigzag diagrams from the
//! command line. Every stage reads and writes plain files, so the pipeline
//! can be run end to end or one step at a time.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use sahom::closedify::{closedify_formula, InfinitesimalLadder, LadderMode};
use sahom::cylinder::{build_zigzag_cyl, map_cylinder, Piece};
use sahom::homology::{betti_numbers, homology_basis, induced_inclusion_map};
use sahom::io::{chain_terms, CellsFile, ComplexFile, DiagramFile, MapDescFile, VertexInterner};
use sahom::pipeline::{map_functor, zigzag_functor, PipelineConfig};
use sahom::poly::{fmt_rational, parse_rational};
use sahom::raster::{rasterize, GridSpec, MembershipMode};
use sahom::simpreplace::{replace_sets, ReplaceOptions};
use sahom::zigzag::{barcode, validate_barcode, ZigzagModule};
use sahom::{FormulaFile, Interval, IntervalBox, Rational};

#[derive(Parser)]
#[command(name = "sahom", version, about = "Homology of semi-algebraic maps and zigzag diagrams")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Mapping cylinder formulas.
    #[command(subcommand)]
    Cyl(CylCommand),
    /// Closed relaxation of a quantifier-free formula.
    Closedify(ClosedifyArgs),
    /// Rasterize formulas on a common grid and triangulate them as nested complexes.
    Rasterize(RasterizeArgs),
    /// Betti numbers, bases and inclusion maps of a complex file.
    Homology(HomologyArgs),
    /// Homology of a map: bases of H_i(S), H_i(T) and the matrices of H_i(f).
    MapFunctor(MapArgs),
    /// Homology modules of a zigzag diagram.
    ZigzagFunctor(DiagramArgs),
    /// Barcodes of a zigzag diagram or of a module file.
    Barcode(BarcodeArgs),
}

#[derive(Subcommand)]
enum CylCommand {
    /// Theta, its quantifier-free form and the source slice for one map.
    Build {
        #[arg(long)]
        map: PathBuf,
        /// Directory for `theta.txt`, `theta_qf.txt` and `theta_t1.txt`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The pieces of the zigzag cylinder of a diagram.
    Zigzag {
        #[arg(long)]
        diagram: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct ClosedifyArgs {
    /// Formula file (`vars:` header and body).
    #[arg(long)]
    formula: PathBuf,
    /// Ladder base for numeric thresholds.
    #[arg(long, default_value = "1/16", conflicts_with = "symbolic")]
    eta: String,
    /// Keep thresholds as variables `__mu_j`, `__nu_j`.
    #[arg(long)]
    symbolic: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RasterizeArgs {
    /// Formula files over the same variables; repeat for nested sets.
    #[arg(long = "formula", required = true)]
    formulas: Vec<PathBuf>,
    /// Half-width of the cube `[-radius, radius]^d` that is rasterized.
    #[arg(long, default_value = "2", conflicts_with = "bbox")]
    radius: String,
    /// Explicit box as `lo,hi` per axis separated by `;`, e.g. `-2,2;0,1`.
    #[arg(long = "box", allow_hyphen_values = true)]
    bbox: Option<String>,
    #[arg(long, default_value_t = 16)]
    res: u32,
    #[arg(long, default_value = "outer")]
    mode: MembershipMode,
    #[arg(long)]
    no_collapse: bool,
    /// Complex file to write.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the raw cells of each set.
    #[arg(long)]
    cells: Option<PathBuf>,
}

#[derive(Args)]
struct HomologyArgs {
    #[arg(long)]
    complex: PathBuf,
    /// Subcomplex whose inclusion map is computed.
    #[arg(long)]
    sub: Option<String>,
    /// Use this named subcomplex as the ambient space.
    #[arg(long = "in")]
    within: Option<String>,
    #[arg(long, default_value_t = 2)]
    max_dim: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct Common {
    /// TOML file with pipeline settings; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    max_dim: Option<usize>,
    #[arg(long)]
    res: Option<u32>,
    #[arg(long)]
    radius: Option<String>,
    #[arg(long)]
    eta: Option<String>,
    #[arg(long)]
    mode: Option<MembershipMode>,
    #[arg(long)]
    no_collapse: bool,
    #[arg(long)]
    no_stability: bool,
    /// Output directory for the report and complexes.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MapArgs {
    #[arg(long)]
    map: PathBuf,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct DiagramArgs {
    #[arg(long)]
    diagram: PathBuf,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct BarcodeArgs {
    #[arg(long, required_unless_present = "module", conflicts_with = "module")]
    diagram: Option<PathBuf>,
    /// A module file (`dims`, `arrows`) instead of a diagram.
    #[arg(long)]
    module: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

fn rational(s: &str) -> Result<Rational> {
    parse_rational(s.trim()).with_context(|| format!("`{s}` is not an exact rational"))
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

impl Common {
    fn config(&self) -> Result<PipelineConfig> {
        let mut c = match &self.config {
            Some(p) => PipelineConfig::from_toml(&read(p)?)?,
            None => PipelineConfig::default(),
        };
        if let Some(v) = self.max_dim {
            c.max_dim = v;
        }
        if let Some(v) = self.res {
            c.res = v;
        }
        if let Some(v) = &self.radius {
            c.radius = rational(v)?;
        }
        if let Some(v) = &self.eta {
            c.eta = rational(v)?;
        }
        if let Some(v) = self.mode {
            c.mode = v;
        }
        if self.no_collapse {
            c.collapse = false;
        }
        if self.no_stability {
            c.stability = false;
        }
        if self.out.is_some() {
            c.out = self.out.clone();
        }
        c.validate()?;
        Ok(c)
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

/// Writes `value` to `path`, or to stdout when no path is given.
fn emit<T: Serialize>(path: Option<&Path>, value: &T) -> Result<()> {
    let text = to_json(value)?;
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write_in(dir: &Path, name: &str, text: &str) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let p = dir.join(name);
    fs::write(&p, text).with_context(|| format!("writing {}", p.display()))
}

fn cyl(cmd: CylCommand) -> Result<()> {
    match cmd {
        CylCommand::Build { map, out } => {
            let desc = MapDescFile::parse(&read(&map)?)?.to_desc()?;
            let art = map_cylinder(&desc)?;
            let files = [
                ("theta.txt", FormulaFile {
                    vars: art.theta_vars.clone(),
                    free: art.vars.len(),
                    formula: art.theta.clone(),
                }),
                ("theta_qf.txt", FormulaFile::new(art.vars.clone(), art.theta_qf()?.clone())),
                ("theta_t1.txt", FormulaFile::new(art.vars.clone(), art.theta_t1()?.clone())),
            ];
            for (name, f) in files {
                match &out {
                    Some(dir) => write_in(dir, name, &f.render())?,
                    None => print!("# {name}\n{}", f.render()),
                }
            }
        }
        CylCommand::Zigzag { diagram, out } => {
            let d = DiagramFile::parse(&read(&diagram)?)?.to_desc()?;
            let zc = build_zigzag_cyl(&d)?;
            let mut pieces = Vec::new();
            for (label, piece) in zc.labels.iter().zip(&zc.pieces) {
                let entry = match piece {
                    Piece::Cylinder(art) => {
                        let f = FormulaFile::new(zc.vars.clone(), art.theta_qf()?.clone());
                        let file = format!("{label}.txt");
                        if let Some(dir) = &out {
                            write_in(dir, &file, &f.render())?;
                        }
                        serde_json::json!({ "label": label, "kind": "cylinder", "file": file,
                            "interval": [fmt_rational(&art.a), fmt_rational(&art.b)] })
                    }
                    Piece::Prism(p) => serde_json::json!({ "label": label, "kind": "prism",
                        "interval": [fmt_rational(&p.mu_lo), fmt_rational(&p.mu_hi)],
                        "graphs": p.graphs.len() }),
                };
                pieces.push(entry);
            }
            let summary = serde_json::json!({
                "n": zc.n, "k": zc.k, "vars": zc.vars.names(), "pieces": pieces, "members": zc.members,
            });
            match &out {
                Some(dir) => write_in(dir, "zigzag.json", &to_json(&summary)?)?,
                None => print!("{}", to_json(&summary)?),
            }
        }
    }
    Ok(())
}

fn closedify(a: ClosedifyArgs) -> Result<()> {
    let file = FormulaFile::parse(&read(&a.formula)?)?;
    let mode = if a.symbolic {
        LadderMode::Symbolic
    } else {
        LadderMode::Numeric(InfinitesimalLadder::new(file.formula.polynomials().len(), rational(&a.eta)?)?)
    };
    let (f, vars) = closedify_formula(&file.formula, &file.vars, &mode)?;
    let text = FormulaFile::new(vars, f).render();
    match a.out {
        Some(p) => fs::write(&p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn parse_box(text: &str) -> Result<IntervalBox> {
    let axes = text
        .split(';')
        .map(|axis| {
            let (lo, hi) = axis.split_once(',').with_context(|| format!("axis `{axis}` is not `lo,hi`"))?;
            let (lo, hi) = (rational(lo.trim())?, rational(hi.trim())?);
            if lo >= hi {
                bail!("axis `{axis}` is empty");
            }
            Ok(Interval::new(lo, hi))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(IntervalBox::new(axes))
}

fn rasterize_cmd(a: RasterizeArgs) -> Result<()> {
    let files = a
        .formulas
        .iter()
        .map(|p| FormulaFile::parse(&read(p)?).with_context(|| format!("parsing {}", p.display())))
        .collect::<Result<Vec<_>>>()?;
    let dim = files[0].free;
    if files.iter().any(|f| f.free != dim) {
        bail!("all formulas must have the same number of variables");
    }
    let grid = match &a.bbox {
        Some(text) => {
            let b = parse_box(text)?;
            if b.dim() != dim {
                bail!("box has {} axes but the formulas have {dim} variables", b.dim());
            }
            GridSpec::new(b, a.res, a.mode)?
        }
        None => GridSpec::cube(dim, &rational(&a.radius)?, a.res, a.mode)?,
    };
    let sets = files
        .iter()
        .map(|f| rasterize(&f.formula, &grid))
        .collect::<sahom::Result<Vec<_>>>()?;
    let names: Vec<String> = a
        .formulas
        .iter()
        .map(|p| p.file_stem().map_or("set".into(), |s| s.to_string_lossy().into_owned()))
        .collect();
    let nested = replace_sets(&sets, &names, ReplaceOptions { collapse: !a.no_collapse })?;
    for ((name, set), sub) in names.iter().zip(&sets).zip(&nested.subcomplexes) {
        eprintln!("{name}: {} cells, {} simplices, betti {:?}", set.len(), sub.total_count(), betti_numbers(sub, dim.saturating_sub(1)));
    }
    if let Some(p) = &a.cells {
        emit(Some(p), &sets.iter().map(CellsFile::from_set).collect::<Vec<_>>())?;
    }
    emit(a.out.as_deref(), &ComplexFile::from_nested(&nested))
}

#[derive(Serialize)]
struct HomologyReport {
    betti: Vec<usize>,
    bases: Vec<Vec<Vec<sahom::io::ChainTerm>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    inclusion: Option<Inclusion>,
}

#[derive(Serialize)]
struct Inclusion {
    sub: String,
    betti: Vec<usize>,
    maps: Vec<sahom::linalg::Matrix>,
    ranks: Vec<usize>,
}

fn homology(a: HomologyArgs) -> Result<()> {
    let file: ComplexFile = serde_json::from_str(&read(&a.complex)?)?;
    let mut interner = VertexInterner::default();
    let ambient = match &a.within {
        Some(name) => {
            file.to_complex(&mut interner)?;
            file.subcomplex(name, &mut interner)?
        }
        None => file.to_complex(&mut interner)?,
    };
    let coords = |v: u64| interner.coords(v).to_vec();
    let bases: Vec<_> = (0..=a.max_dim).map(|i| homology_basis(&ambient, i)).collect();
    let inclusion = match &a.sub {
        Some(name) => {
            let mut int2 = VertexInterner::default();
            // Reuse the numbering of the ambient file so vertex ids agree.
            file.to_complex(&mut int2)?;
            let sub = file.subcomplex(name, &mut int2)?;
            let sub_bases: Vec<_> = (0..=a.max_dim).map(|i| homology_basis(&sub, i)).collect();
            let maps = (0..=a.max_dim)
                .map(|i| Ok(induced_inclusion_map(&sub, &ambient, i, &sub_bases[i], &bases[i])?.matrix))
                .collect::<Result<Vec<_>>>()?;
            Some(Inclusion {
                sub: name.clone(),
                betti: sub_bases.iter().map(|b| b.betti()).collect(),
                ranks: maps.iter().map(|m| m.rank()).collect(),
                maps,
            })
        }
        None => None,
    };
    let report = HomologyReport {
        betti: bases.iter().map(|b| b.betti()).collect(),
        bases: bases.iter().map(|b| chain_terms(&ambient, b, &coords)).collect(),
        inclusion,
    };
    emit(a.out.as_deref(), &report)
}

fn map_cmd(a: MapArgs) -> Result<()> {
    let cfg = a.common.config()?;
    let desc = MapDescFile::parse(&read(&a.map)?)?.to_desc()?;
    let out = map_functor(&desc, &cfg)?;
    for w in &out.report.warnings {
        eprintln!("warning: {w}");
    }
    match &cfg.out {
        Some(dir) => {
            write_in(dir, "report.json", &to_json(&out.report)?)?;
            write_in(dir, "complexes.json", &to_json(&ComplexFile::from_nested(&out.complexes))?)
        }
        None => emit(None, &out.report),
    }
}

fn zigzag_cmd(a: DiagramArgs) -> Result<()> {
    let cfg = a.common.config()?;
    let d = DiagramFile::parse(&read(&a.diagram)?)?.to_desc()?;
    let out = zigzag_functor(&d, &cfg)?;
    for w in &out.report.warnings {
        eprintln!("warning: {w}");
    }
    match &cfg.out {
        Some(dir) => {
            write_in(dir, "report.json", &to_json(&out.report)?)?;
            write_in(dir, "complexes.json", &to_json(&ComplexFile::from_nested(&out.complexes))?)
        }
        None => emit(None, &out.report),
    }
}

fn barcode_cmd(a: BarcodeArgs) -> Result<()> {
    let entries: Vec<(usize, sahom::zigzag::Barcode, bool)> = match (&a.diagram, &a.module) {
        (_, Some(p)) => {
            let m: ZigzagModule = serde_json::from_str(&read(p)?)?;
            let b = barcode(&m);
            let ok = validate_barcode(&m, &b).valid;
            vec![(0, b, ok)]
        }
        (Some(p), None) => {
            let cfg = a.common.config()?;
            let d = DiagramFile::parse(&read(p)?)?.to_desc()?;
            let r = zigzag_functor(&d, &cfg)?.report;
            for w in &r.warnings {
                eprintln!("warning: {w}");
            }
            r.barcodes
                .into_iter()
                .map(|e| (e.dim, e.barcode, e.validation.valid))
                .collect()
        }
        (None, None) => bail!("either --diagram or --module is required"),
    };
    for (dim, b, _) in &entries {
        println!("H{dim}: {b}");
    }
    if let Some(dir) = &a.common.out {
        let json: Vec<_> = entries
            .iter()
            .map(|(dim, b, ok)| serde_json::json!({ "dim": dim, "barcode": b, "valid": ok }))
            .collect();
        write_in(dir, "barcodes.json", &to_json(&json)?)?;
    }
    if entries.iter().any(|e| !e.2) {
        bail!("barcode failed validation");
    }
    Ok(())
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Cyl(c) => cyl(c),
        Command::Closedify(a) => closedify(a),
        Command::Rasterize(a) => rasterize_cmd(a),
        Command::Homology(a) => homology(a),
        Command::MapFunctor(a) => map_cmd(a),
        Command::ZigzagFunctor(a) => zigzag_cmd(a),
        Command::Barcode(a) => barcode_cmd(a),
    }
}
