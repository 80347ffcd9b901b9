//! One function per command. Each returns an [`Outcome`]; nothing here prints.

use std::fs;
use std::path::Path;

use paperfold::collar::{build_collar, disk_boundary, Collar};
use paperfold::criterion::{divergence_report, injectivity_radius, mcmullen_system, Analysis, CriterionParams, Hypothesis, Verdict};
use paperfold::modulus::{standard_times, Modulus};
use paperfold::rational::{decimal, fmt_rat, parse_rat, to_f64, LogValue, Rat};
use paperfold::scar::{ball_component, classify_point, Base, Cn, PointClass, ScarPair, ScarPoint};
use paperfold::scheme::{builtin_example, parse_scheme, serialize_scheme, truncate, validate, BoundaryParam, FoldingScheme, BUILTIN_NAMES};

use crate::render::{render_scene, Annulus, Layers, SceneData};
use crate::report::Report;
use crate::{Cli, Command, Format, Options, Scene, Source};

/// Relative tolerance at which the modulus grid refinement stops.
pub const MODULUS_REL_TOL: f64 = 1e-2;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;

/// What a command produced and the exit status it asks for.
#[derive(Clone, Debug, PartialEq)]
pub enum Artifact {
    Report(Report),
    Svg(String),
    Text(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub artifact: Artifact,
    pub status: i32,
}

impl Outcome {
    fn ok(artifact: Artifact) -> Self {
        Outcome { artifact, status: EXIT_OK }
    }

    /// The bytes written to the output for the chosen format.
    pub fn render(&self, format: Format) -> Result<String, String> {
        match (&self.artifact, format) {
            (Artifact::Report(r), Format::Text) => Ok(r.to_text()),
            (Artifact::Report(r), Format::Machine) => Ok(r.to_machine()),
            (Artifact::Report(_), Format::Svg) => Err("--format svg is only available for `render`".into()),
            (Artifact::Svg(s), _) | (Artifact::Text(s), _) => Ok(s.clone()),
        }
    }
}

type CmdResult<T> = Result<T, String>;

fn lib<T>(r: paperfold::Result<T>) -> CmdResult<T> {
    r.map_err(|e| e.to_string())
}

fn rational(flag: &str, s: &str) -> CmdResult<Rat> {
    parse_rat(s.trim()).ok_or_else(|| format!("--{flag}: `{s}` is not a rational number"))
}

fn positive(flag: &str, s: &str) -> CmdResult<Rat> {
    let r = rational(flag, s)?;
    if !r.is_positive() {
        return Err(format!("--{flag} must be positive, got {s}"));
    }
    Ok(r)
}

fn optional(flag: &str, s: &Option<String>) -> CmdResult<Option<Rat>> {
    s.as_deref().map(|s| positive(flag, s)).transpose()
}

/// Loads the scheme named by a builtin or read from a PFS file.
pub fn load_scheme(src: &Source) -> CmdResult<FoldingScheme> {
    match (&src.builtin, &src.input) {
        (Some(_), Some(_)) => Err("give either an input file or --builtin, not both".into()),
        (Some(name), None) => lib(builtin_example(name)),
        (None, Some(path)) => load_file(path),
        (None, None) => Err("no scheme given: pass an input file or --builtin <name>".into()),
    }
}

fn load_file(path: &Path) -> CmdResult<FoldingScheme> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse_scheme(&text).map_err(|e| format!("{}: {e}", path.display()))
}

/// A boundary parameter written `t` (polygon 0) or `poly:t`.
pub fn parse_param(s: &str) -> CmdResult<BoundaryParam> {
    let (poly, t) = match s.split_once(':') {
        Some((p, t)) => (p.trim().parse::<usize>().map_err(|_| format!("--at: bad polygon index in `{s}`"))?, t),
        None => (0, s),
    };
    Ok(BoundaryParam::new(poly, rational("at", t)?))
}

fn param_text(p: &BoundaryParam) -> String {
    format!("{}:{}", p.poly, fmt_rat(&p.t))
}

/// h̄ from the flag, then the scheme's own value, then the automatic collar height.
pub fn resolve_hbar(scheme: &FoldingScheme, opts: &Options) -> CmdResult<Rat> {
    let requested = optional("hbar", &opts.hbar)?.or(scheme.meta.hbar);
    Ok(lib(build_collar(&scheme.multipolygon, &Rat::from_integer(1), requested))?.hbar)
}

/// Truncation, injectivity radius, collar and radius sweeps shared by the analysis commands.
pub struct Setup {
    pub eps: Rat,
    pub analysis: Analysis,
    pub collar: Collar,
}

pub fn setup(scheme: &FoldingScheme, opts: &Options) -> CmdResult<Setup> {
    let eps = positive("eps", &opts.eps)?;
    let pair = lib(ScarPair::build(lib(truncate(scheme, &eps))?))?;
    let rbar = match optional("rbar", &opts.rbar)? {
        Some(r) => r,
        None => lib(injectivity_radius(&pair))?,
    };
    let hbar = optional("hbar", &opts.hbar)?.or(scheme.meta.hbar);
    let collar = lib(build_collar(&scheme.multipolygon, &rbar, hbar))?;
    let params = lib(CriterionParams::new(rbar, collar.hbar))?;
    let analysis = lib(Analysis::new(pair, params, &rbar))?;
    Ok(Setup { eps, analysis, collar })
}

fn header(rep: &mut Report, scheme: &FoldingScheme) {
    let name = if scheme.meta.name.is_empty() { "(unnamed)" } else { scheme.meta.name.as_str() };
    rep.field("scheme", name);
}

/// Runs the parsed command line.
pub fn execute(cli: &Cli) -> CmdResult<Outcome> {
    let opts = &cli.opts;
    match &cli.command {
        Command::Validate(src) => cmd_validate(&load_scheme(src)?),
        Command::Classify(src) => cmd_classify(&load_scheme(src)?, opts),
        Command::Criterion(src) => cmd_criterion(&load_scheme(src)?, opts),
        Command::Mcmullen(src) => cmd_mcmullen(&load_scheme(src)?, opts),
        Command::Modulus(src) => cmd_modulus(&load_scheme(src)?, opts),
        Command::Render(src) => cmd_render(&load_scheme(src)?, opts),
        Command::Example { name } => cmd_example(name.as_deref()),
    }
}

pub fn cmd_validate(scheme: &FoldingScheme) -> CmdResult<Outcome> {
    let v = validate(scheme);
    let mut rep = Report::new("validate");
    header(&mut rep, scheme);
    rep.field("polygons", scheme.multipolygon.polygons.len().to_string())
        .rational("boundary_length", &scheme.multipolygon.boundary_length())
        .rational("total_pairing_length", &v.total_pairing_length)
        .rational("half_boundary", &v.half_boundary)
        .field("finite", scheme.generator.is_finite().to_string());
    let t = rep.table("checks", &["check", "result", "detail"]);
    for c in &v.checks {
        t.rows.push(vec![c.name.to_string(), if c.passed { "ok".into() } else { "FAILED".into() }, c.detail.clone()]);
    }
    let passed = v.passed();
    rep.field("valid", passed.to_string());
    Ok(Outcome { artifact: Artifact::Report(rep), status: if passed { EXIT_OK } else { EXIT_ERROR } })
}

fn class_text(c: PointClass) -> String {
    match c {
        PointClass::Planar => "planar".into(),
        PointClass::Vertex(k) => format!("vertex(valence {k})"),
        PointClass::DeclaredSingular => "singular".into(),
        PointClass::TruncationUnknown => "unknown(truncation)".into(),
    }
}

fn cn_text(cn: &Cn) -> String {
    match cn {
        Cn::Count(n) => n.to_string(),
        Cn::Breakpoint => "breakpoint".into(),
        Cn::Unknown => "unknown".into(),
    }
}

pub fn cmd_classify(scheme: &FoldingScheme, opts: &Options) -> CmdResult<Outcome> {
    let s = setup(scheme, opts)?;
    let pair = &s.analysis.pair;
    let tree = &pair.collapse;
    let fs = pair.fs();
    let mut rep = Report::new("classify");
    header(&mut rep, scheme);
    rep.rational("eps", &s.eps)
        .field("pairings", fs.pairings.len().to_string())
        .field("gaps", fs.gaps.len().to_string())
        .rational("tail_measure", &fs.tail_measure)
        .field("tail_groups", fs.group_count.to_string())
        .field("nodes", tree.nodes.len().to_string())
        .field("edges", tree.graph.edges.len().to_string())
        .field("singular_nodes", tree.singular_points().len().to_string())
        .field("euler_characteristic", tree.euler_characteristic().to_string())
        .rational("rbar", &s.analysis.params.rbar)
        .rational("hbar", &s.analysis.params.hbar);
    let radius = optional("radius", &opts.radius)?;
    if let Some(r) = &radius {
        rep.rational("radius", r).field("components_at_radius", s.analysis.component_count(r).to_string());
    }
    if !opts.at.is_empty() {
        let t = rep.table("points", &["at", "class", "cm_singular", "cn_singular", "cm_point", "cn_point"]);
        for at in &opts.at {
            let p = parse_param(at)?;
            let x = lib(tree.locate(&p))?;
            let mut row = vec![param_text(&p), class_text(classify_point(tree, &x))];
            for base in [Base::Singular, Base::Point(x.clone())] {
                match &radius {
                    Some(r) => match ball_component(tree, &base, &x, r) {
                        Ok(info) => row.extend([fmt_rat(&info.cm), cn_text(&info.cn)]),
                        Err(_) => row.extend(["-".to_string(), "unknown".to_string()]),
                    },
                    None => row.extend(["-".to_string(), "-".to_string()]),
                }
            }
            t.rows.push(row);
        }
    }
    Ok(Outcome::ok(Artifact::Report(rep)))
}

pub fn cmd_criterion(scheme: &FoldingScheme, opts: &Options) -> CmdResult<Outcome> {
    let eps = positive("eps", &opts.eps)?;
    let hypothesis: Hypothesis = lib(opts.hypothesis.parse())?;
    let hbar = resolve_hbar(scheme, opts)?;
    let cert = lib(divergence_report(scheme, hypothesis, opts.k, &eps, optional("rbar", &opts.rbar)?, &hbar))?;
    let mut rep = Report::new("criterion");
    header(&mut rep, scheme);
    rep.field("hypothesis", cert.hypothesis.to_string())
        .field("windows", opts.k.to_string())
        .rational("eps", &cert.eps)
        .rational("rbar", &cert.params.rbar)
        .rational("hbar", &cert.params.hbar)
        .rational("M", &cert.params.m);
    let t = rep.table("window", &["k", "[a,b]", "W_k", "error", "hypothesis", "components", "certified"]);
    t.inline = true;
    for w in &cert.windows {
        t.rows.push(vec![
            w.k.to_string(),
            format!("[{},{}]", fmt_rat(&w.lo), fmt_rat(&w.hi)),
            decimal(w.w),
            "lower".into(),
            cert.hypothesis.to_string(),
            w.components.to_string(),
            w.certified.to_string(),
        ]);
    }
    if let Some(c) = cert.c {
        rep.bound("c", c, "lower");
    }
    let certified = cert.verdict == Verdict::Certified;
    rep.field("verdict", if certified { "CERTIFIED_UNDER_HYPOTHESIS" } else { "INCONCLUSIVE" });
    if !cert.reason.is_empty() {
        rep.field("reason", &cert.reason);
    }
    Ok(Outcome { artifact: Artifact::Report(rep), status: if certified { EXIT_OK } else { EXIT_INCONCLUSIVE } })
}

pub fn cmd_mcmullen(scheme: &FoldingScheme, opts: &Options) -> CmdResult<Outcome> {
    let s = setup(scheme, opts)?;
    let sys = lib(mcmullen_system(&s.analysis, opts.k0, opts.k1))?;
    let mut rep = Report::new("mcmullen");
    header(&mut rep, scheme);
    rep.rational("eps", &s.eps)
        .rational("rbar", &s.analysis.params.rbar)
        .rational("M", &s.analysis.params.m)
        .field("levels", format!("{}..{}", opts.k0, opts.k1));
    let t = rep.table("levels", &["k", "r_lo", "r_hi", "classes", "eps_min", "bound_min"]);
    for l in &sys.levels {
        let eps_min = l.classes.iter().map(|c| c.eps).min().map(|e| fmt_rat(&e)).unwrap_or_else(|| "-".into());
        let bound_min = l.classes.iter().map(|c| c.bound).fold(f64::INFINITY, f64::min);
        t.rows.push(vec![l.k.to_string(), fmt_rat(&l.r_lo), fmt_rat(&l.r_hi), l.classes.len().to_string(), eps_min, decimal(bound_min)]);
    }
    let ok = sys.flags.unnested && sys.flags.nested && sys.flags.sums;
    rep.bound("chain_min", sys.chain_min, "lower")
        .field("chain_target", decimal(sys.chain_target))
        .field("unnested", sys.flags.unnested.to_string())
        .field("nested", sys.flags.nested.to_string())
        .field("sums", sys.flags.sums.to_string())
        .field("verdict", if ok { "ALL_CONDITIONS_HOLD" } else { "INCONCLUSIVE" });
    Ok(Outcome { artifact: Artifact::Report(rep), status: if ok { EXIT_OK } else { EXIT_INCONCLUSIVE } })
}

pub fn cmd_modulus(scheme: &FoldingScheme, opts: &Options) -> CmdResult<Outcome> {
    let s = setup(scheme, opts)?;
    let md = lib(Modulus::new(&s.analysis))?;
    let p = &md.params;
    let big_r = optional("R", &opts.big_r)?;
    let mut rep = Report::new("modulus");
    header(&mut rep, scheme);
    rep.rational("eps", &s.eps)
        .rational("rbar", &p.rbar)
        .rational("hbar", &p.hbar)
        .rational("boundary_length", &p.boundary_length)
        .rational("delta", &p.delta)
        .rational("M", &p.m)
        .field("kappa", p.kappa.render())
        .field("R_mode", big_r.map_or("NORMALIZED".to_string(), |r| format!("EXPLICIT R={}", fmt_rat(&r))));
    if opts.times > 0 {
        let ts = standard_times(p, opts.times);
        let rows = lib(md.rho_global(&ts, MODULUS_REL_TOL))?;
        // Values are in units of 8R; an explicit R rescales the grid branch only.
        let scale = big_r.map_or(1.0, |r| 8.0 * to_f64(&r));
        rep.field("rho_hat.direction", "upper at each sample, grid maximum").field("rho_bar.direction", "upper");
        let t = rep.table("rho", &["t", "rho_hat", "rho_bar", "dominating_branch"]);
        for g in &rows {
            let hat = g.rho_hat * scale;
            let lip = LogValue { ln: p.kappa.ln + to_f64(&g.t).ln() };
            let (bar, branch) = if hat > 0.0 && hat.ln() > lip.ln { (LogValue::from_value(hat), "GRID") } else { (lip, "LIPSCHITZ") };
            t.rows.push(vec![fmt_rat(&g.t), decimal(hat), bar.render(), branch.into()]);
        }
    }
    Ok(Outcome::ok(Artifact::Report(rep)))
}

pub fn cmd_render(scheme: &FoldingScheme, opts: &Options) -> CmdResult<Outcome> {
    let s = setup(scheme, opts)?;
    let pair = &s.analysis.pair;
    let mut data = SceneData::new(pair.fs());
    data.layers = match opts.scene {
        Scene::Scheme => Layers { pairings: true, ..Layers::default() },
        Scene::Scar => Layers { pairings: true, scar: true, ..Layers::default() },
        Scene::Collar => Layers { collar: true, ..Layers::default() },
        Scene::Disk | Scene::Mcmullen => Layers { collar: true, annuli: true, ..Layers::default() },
    };
    data.scar = Some(&pair.collapse);
    data.collar = Some((&s.collar, s.collar.hbar));
    match opts.scene {
        Scene::Disk => {
            let at = opts.at.first().ok_or("--scene disk needs --at")?;
            let r = optional("radius", &opts.radius)?.ok_or("--scene disk needs --radius")?;
            let tree = &pair.collapse;
            let x = lib(tree.locate(&parse_param(at)?))?;
            let base = if classify_point(tree, &x) == PointClass::DeclaredSingular { Base::Singular } else { Base::Point(x.clone()) };
            let disk = lib(disk_boundary(tree, &s.collar, &base, &x, &r))?;
            data.annuli.push(Annulus { level: 0, boundary: disk });
        }
        Scene::Mcmullen => {
            let sys = lib(mcmullen_system(&s.analysis, opts.k0, opts.k1))?;
            let tree = &pair.collapse;
            for l in &sys.levels {
                for c in &l.classes {
                    let x = ScarPoint::Node(c.members[0]);
                    for r in [c.outer, c.inner] {
                        // Radii whose frontier touches a tail are skipped in the picture.
                        if let Ok(b) = disk_boundary(tree, &s.collar, &Base::Singular, &x, &r) {
                            data.annuli.push(Annulus { level: l.k, boundary: b });
                        }
                    }
                }
            }
        }
        _ => {}
    }
    Ok(Outcome::ok(Artifact::Svg(render_scene(&data))))
}

pub fn cmd_example(name: Option<&str>) -> CmdResult<Outcome> {
    match name {
        Some(n) => Ok(Outcome::ok(Artifact::Text(serialize_scheme(&lib(builtin_example(n))?)))),
        None => Ok(Outcome::ok(Artifact::Text(BUILTIN_NAMES.iter().map(|n| format!("{n}\n")).collect()))),
    }
}
