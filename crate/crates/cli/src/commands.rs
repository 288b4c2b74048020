use std::path::{Path, PathBuf};

use fspec_miner::artifact;
use fspec_miner::eval::{make_cases, split_corpus, topk_accuracy, CaseKind};
use fspec_miner::frontend::parse as parse_unit;
use fspec_miner::fspec::{curve_csv, infer as infer_fspec, learning_curve, FSpec};
use fspec_miner::graam::{build_graam, Graam};
use fspec_miner::ifd::{IfdModel, SoundnessVerdict};
use fspec_miner::pipeline::{framework_ifd, mine_corpus, mine_unit, mini_files, read_sources, sound_graams, UnitReport};
use fspec_miner::recommend::{detect_and_fix, next_api, NextApiResult, Recommendation};
use fspec_miner::slicer::build_paugs;
use fspec_miner::synth::corpus_spec;
use fspec_miner::FrameworkManifest;
use serde::Serialize;

use crate::run::{usage, Failure, Run};
use crate::{EvalMode, RecommendMode};

fn stem(p: &Path) -> String {
    p.file_stem().unwrap_or_default().to_string_lossy().into_owned()
}

fn load_manifest(ctx: &mut Run, path: &Path) -> Result<FrameworkManifest, Failure> {
    ctx.input(path)?;
    let m = FrameworkManifest::load(path)?;
    if let Some(src) = &m.source {
        ctx.input(src)?;
    }
    Ok(m)
}

fn framework_sources(manifest: &FrameworkManifest, src: Option<&Path>) -> Result<Vec<(String, String)>, Failure> {
    match src.or(manifest.source.as_deref()) {
        Some(dir) => Ok(read_sources(&mini_files(dir)?)?),
        None => Ok(Vec::new()),
    }
}

fn load_ifd(ctx: &mut Run, manifest: &FrameworkManifest, ifd: Option<&Path>) -> Result<IfdModel, Failure> {
    match ifd {
        Some(p) => {
            let model: IfdModel = artifact::from_json("ifd", &ctx.read(p)?)?;
            if model.framework != manifest.name {
                return Err(usage(format!(
                    "{} describes framework `{}`, not `{}`",
                    p.display(),
                    model.framework,
                    manifest.name
                )));
            }
            Ok(model)
        }
        None => Ok(framework_ifd(&framework_sources(manifest, None)?, manifest)?),
    }
}

fn mine(ctx: &mut Run, unit: &Path, framework: &Path, ifd: Option<&Path>) -> Result<(UnitReport, IfdModel), Failure> {
    let manifest = load_manifest(ctx, framework)?;
    let model = load_ifd(ctx, &manifest, ifd)?;
    let src = ctx.read(unit)?;
    let report = mine_unit(&stem(unit), &src, &manifest, &model)?;
    for s in &report.skipped {
        eprintln!("skipped: {s}");
    }
    Ok((report, model))
}

pub fn parse(ctx: &mut Run, file: &Path) -> Result<(), Failure> {
    let src = ctx.read(file)?;
    let ir = parse_unit(&src, &stem(file))?;
    ctx.write_artifact(&format!("{}.ir.json", stem(file)), "ir", &ir)?;
    ctx.finish("parse")
}

pub fn paug(ctx: &mut Run, unit: &Path, framework: &Path) -> Result<(), Failure> {
    let manifest = load_manifest(ctx, framework)?;
    let src = ctx.read(unit)?;
    let ir = parse_unit(&src, &stem(unit))?;
    let mut paugs = Vec::new();
    for r in build_paugs(&ir, &manifest) {
        match r {
            Ok(p) => paugs.push(p),
            Err(e) => eprintln!("skipped: {e}"),
        }
    }
    ctx.write_artifact(&format!("{}.paugs.json", stem(unit)), "paugs", &paugs)?;
    println!("{} usage(s)", paugs.len());
    ctx.finish("paug")
}

pub fn ifd(ctx: &mut Run, src: Option<&Path>, framework: &Path) -> Result<(), Failure> {
    let manifest = load_manifest(ctx, framework)?;
    if let Some(dir) = src {
        ctx.input(dir)?;
    }
    let sources = framework_sources(&manifest, src)?;
    if sources.is_empty() {
        return Err(usage("no framework sources found"));
    }
    let model = framework_ifd(&sources, &manifest)?;
    for (ty, w, r) in model.orders() {
        println!("{ty}: {w} before {r}");
    }
    ctx.write_artifact(&format!("{}.ifd.json", manifest.name), "ifd", &model)?;
    ctx.finish("ifd")
}

#[derive(Serialize)]
struct UsageVerdict<'a> {
    entry: &'a str,
    verdict: &'a SoundnessVerdict,
}

pub fn validate(ctx: &mut Run, unit: &Path, framework: &Path, ifd: Option<&Path>) -> Result<(), Failure> {
    let (report, _) = mine(ctx, unit, framework, ifd)?;
    let verdicts: Vec<UsageVerdict> =
        report.usages.iter().map(|u| UsageVerdict { entry: &u.paug.entry, verdict: &u.verdict }).collect();
    let mut sound = true;
    for v in &verdicts {
        match v.verdict {
            SoundnessVerdict::Sound => println!("{}: sound", v.entry),
            SoundnessVerdict::Unsound { violations } => {
                sound = false;
                println!("{}: unsound", v.entry);
                for x in violations {
                    let e = &x.entry;
                    println!("  {:?}: {}.{} reads `{}` written by {}", x.kind, e.ty, e.reader, e.field, e.writer);
                }
            }
        }
    }
    ctx.write_artifact(&format!("{}.verdicts.json", stem(unit)), "verdicts", &verdicts)?;
    ctx.finish("validate")?;
    if sound {
        Ok(())
    } else {
        Err(Failure::Validation)
    }
}

pub fn graam(ctx: &mut Run, unit: &Path, framework: &Path, ifd: Option<&Path>) -> Result<(), Failure> {
    let (report, _) = mine(ctx, unit, framework, ifd)?;
    let mut graams = Vec::new();
    for u in &report.usages {
        match &u.graam {
            Some(g) => graams.push(g.clone()),
            None => eprintln!("{}: unsound usage left out", u.paug.entry),
        }
    }
    ctx.write_artifact(&format!("{}.graams.json", stem(unit)), "graams", &graams)?;
    println!("{} GRAAM(s)", graams.len());
    ctx.finish("graam")
}

/// GRAAMs from `*.graams.json` files in `dir`, then from mining its
/// `units/` when a framework manifest is at hand.
fn collect_graams(ctx: &mut Run, dir: &Path, framework: Option<&Path>) -> Result<(String, Vec<Graam>), Failure> {
    if !dir.is_dir() {
        return Err(usage(format!("{} is not a directory", dir.display())));
    }
    let mut name = None;
    let mut graams = Vec::new();
    let mut artifacts: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.to_string_lossy().ends_with(".graams.json"))
        .collect();
    artifacts.sort();
    for p in artifacts {
        let gs: Vec<Graam> = artifact::from_json("graams", &ctx.read(&p)?)?;
        graams.extend(gs);
    }
    let manifest_path = framework.map(Path::to_path_buf).or_else(|| {
        let p = dir.join("framework.toml");
        p.is_file().then_some(p)
    });
    if let Some(mp) = manifest_path {
        let manifest = load_manifest(ctx, &mp)?;
        let ifd = framework_ifd(&framework_sources(&manifest, None)?, &manifest)?;
        let units_dir = dir.join("units");
        let units_dir = if units_dir.is_dir() { units_dir } else { dir.to_path_buf() };
        let paths = mini_files(&units_dir)?;
        for p in &paths {
            ctx.input(p)?;
        }
        let units: Vec<(String, String)> = read_sources(&paths)?
            .into_iter()
            .map(|(n, s)| (n.trim_end_matches(".mini").to_string(), s))
            .collect();
        let reports = mine_corpus(&units, &manifest, &ifd);
        for r in &reports {
            if let Err(e) = r {
                eprintln!("{e}");
            }
        }
        graams.extend(sound_graams(&reports));
        name = Some(manifest.name);
    }
    if graams.is_empty() {
        return Err(usage(format!("no GRAAMs found in {}", dir.display())));
    }
    let name = name.unwrap_or_else(|| graams[0].framework.clone());
    Ok((name, graams))
}

pub fn infer(ctx: &mut Run, dir: &Path, framework: Option<&Path>, dot: bool) -> Result<(), Failure> {
    let (name, graams) = collect_graams(ctx, dir, framework)?;
    let f = infer_fspec(&name, &graams)?;
    ctx.write_artifact("fspec.json", "fspec", &f)?;
    if dot {
        ctx.write("fspec.dot", &f.to_dot())?;
    }
    println!("{} GRAAM(s) merged into {} node(s)", graams.len(), f.size());
    ctx.finish("infer")
}

pub fn curve(ctx: &mut Run, dir: &Path, framework: Option<&Path>) -> Result<(), Failure> {
    let (name, graams) = collect_graams(ctx, dir, framework)?;
    let points = learning_curve(&name, &graams)?;
    ctx.write("curve.csv", &curve_csv(&points))?;
    ctx.finish("curve")
}

#[derive(Serialize)]
struct Advice {
    entry: String,
    verdict: SoundnessVerdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    next: Option<NextApiResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    fixes: Option<Vec<Recommendation>>,
}

pub fn recommend(
    ctx: &mut Run,
    unit: &Path,
    fspec: &Path,
    framework: &Path,
    ifd: Option<&Path>,
    k: usize,
    mode: RecommendMode,
) -> Result<(), Failure> {
    if k == 0 {
        return Err(usage("--k must be at least 1"));
    }
    let f: FSpec = artifact::from_json("fspec", &ctx.read(fspec)?)?;
    let (report, model) = mine(ctx, unit, framework, ifd)?;
    if f.framework != model.framework {
        return Err(usage(format!("specification is for `{}`, unit uses `{}`", f.framework, model.framework)));
    }
    let mut advice = Vec::new();
    for u in report.usages {
        let g = build_graam(&u.paug, &model)?;
        println!("{}:", u.paug.entry);
        let (next, fixes) = match mode {
            RecommendMode::Next => {
                let r = next_api(&g, &f, k);
                if r.conforms {
                    println!("  complete as written");
                }
                for c in &r.candidates {
                    println!("  next {} (frequency {})", c.label, c.frequency);
                }
                if let Some(d) = &r.diagnostic {
                    println!("  {d}");
                }
                (Some(r), None)
            }
            RecommendMode::Fix => {
                let recs = detect_and_fix(&g, &f, k);
                for (i, r) in recs.iter().enumerate() {
                    println!("  #{} {:?} score {:.3} ({:?}, support {})", i + 1, r.kind, r.score, r.band, r.support);
                    for s in &r.patch {
                        println!("    {s}");
                    }
                }
                (None, Some(recs))
            }
        };
        advice.push(Advice { entry: u.paug.entry.clone(), verdict: u.verdict, next, fixes });
    }
    ctx.write_artifact(&format!("{}.recommendations.json", stem(unit)), "recommendations", &advice)?;
    ctx.finish("recommend")
}

pub struct EvalArgs {
    pub mode: EvalMode,
    pub corpus: PathBuf,
    pub framework: Option<PathBuf>,
    pub seed: u64,
    pub k: usize,
    pub test_fraction: f64,
    pub closed_world: bool,
}

pub fn eval(ctx: &mut Run, a: EvalArgs) -> Result<(), Failure> {
    if a.k == 0 {
        return Err(usage("--k must be at least 1"));
    }
    if !(0.0..=1.0).contains(&a.test_fraction) {
        return Err(usage("--test-fraction must lie in [0, 1]"));
    }
    ctx.seed = a.seed;
    let kind = match a.mode {
        EvalMode::Next => CaseKind::NextApi,
        EvalMode::Missed => CaseKind::MissedApi,
        EvalMode::Swapped => CaseKind::SwappedApi,
    };
    let (name, graams) = collect_graams(ctx, &a.corpus, a.framework.as_deref())?;
    let (train, test) =
        if a.closed_world { (graams.clone(), graams) } else { split_corpus(&graams, a.test_fraction, a.seed) };
    let f = infer_fspec(&name, &train)?;
    let cases = make_cases(kind, &test, a.seed);
    let report = topk_accuracy(&cases, &f, a.k)?;
    let mut csv = String::from("k,accuracy\n");
    for (i, acc) in report.topk.iter().enumerate() {
        csv.push_str(&format!("{},{acc:.6}\n", i + 1));
    }
    ctx.write(&format!("eval_{}.csv", kind.name()), &csv)?;
    ctx.write_artifact(&format!("eval_{}.json", kind.name()), "eval_report", &report)?;
    println!("{} case(s), top-1 {:.3}, top-{} {:.3}", report.cases, report.top(1), a.k, report.top(a.k));
    ctx.finish("eval")
}

pub fn synth(ctx: &mut Run, name: &str, copies: usize, seed: u64) -> Result<(), Failure> {
    let spec = corpus_spec(name).ok_or_else(|| usage(format!("unknown corpus `{name}` (try miniauth or minirmi)")))?;
    if copies == 0 {
        return Err(usage("--copies must be at least 1"));
    }
    ctx.seed = seed;
    let corpus = spec.generate(copies, seed);
    corpus.write_to(ctx.out_dir())?;
    println!("{} unit(s) written to {}", corpus.units.len(), ctx.out_dir().display());
    ctx.finish("synth")
}
