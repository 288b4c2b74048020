//! End-to-end helpers: framework loading and per-unit mining.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::frontend::{parse, parse_many, ProgramIR};
use crate::fspec::{infer, FSpec};
use crate::graam::{build_graam, Graam};
use crate::ifd::{extract_ifd, validate, IfdModel, SoundnessVerdict};
use crate::manifest::FrameworkManifest;
use crate::slicer::{build_paugs, Paug};

/// `.mini` files directly under `dir`, sorted by name.
pub fn mini_files(dir: &Path) -> Result<Vec<PathBuf>, Error> {
    let mut out = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))? {
        let p = entry.map_err(|e| Error::Io(e.to_string()))?.path();
        if p.extension().is_some_and(|x| x == "mini") {
            out.push(p);
        }
    }
    out.sort();
    Ok(out)
}

pub fn read_sources(paths: &[PathBuf]) -> Result<Vec<(String, String)>, Error> {
    paths
        .iter()
        .map(|p| {
            let text = std::fs::read_to_string(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?;
            Ok((p.file_name().unwrap_or_default().to_string_lossy().into_owned(), text))
        })
        .collect()
}

/// IFD of a framework given as sources.
pub fn framework_ifd(sources: &[(String, String)], manifest: &FrameworkManifest) -> Result<IfdModel, Error> {
    let ir: ProgramIR = parse_many(sources, &manifest.name)?;
    Ok(extract_ifd(&ir, manifest))
}

/// IFD of the framework whose sources the manifest points at; empty when it
/// names no source directory.
pub fn load_framework_ifd(manifest: &FrameworkManifest) -> Result<IfdModel, Error> {
    match &manifest.source {
        Some(dir) => framework_ifd(&read_sources(&mini_files(dir)?)?, manifest),
        None => Ok(IfdModel { framework: manifest.name.clone(), entries: Vec::new() }),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MinedUsage {
    pub paug: Paug,
    pub verdict: SoundnessVerdict,
    /// Present for sound usages only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graam: Option<Graam>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UnitReport {
    pub unit: String,
    pub usages: Vec<MinedUsage>,
    /// Entrypoints without framework calls, and other per-unit problems.
    pub skipped: Vec<String>,
}

/// Parses one unit and runs every entrypoint through slicing, validation
/// and GRAAM construction.
pub fn mine_unit(
    name: &str,
    source: &str,
    manifest: &FrameworkManifest,
    ifd: &IfdModel,
) -> Result<UnitReport, Error> {
    let ir = parse(source, name)?;
    let mut usages = Vec::new();
    let mut skipped = Vec::new();
    for r in build_paugs(&ir, manifest) {
        match r {
            Ok(paug) => {
                let verdict = validate(&paug, ifd);
                let graam = if verdict.is_sound() { Some(build_graam(&paug, ifd)?) } else { None };
                usages.push(MinedUsage { paug, verdict, graam });
            }
            Err(e) => skipped.push(e.to_string()),
        }
    }
    Ok(UnitReport { unit: name.to_string(), usages, skipped })
}

/// `mine_unit` over many units in parallel; results keep input order.
pub fn mine_corpus(
    units: &[(String, String)],
    manifest: &FrameworkManifest,
    ifd: &IfdModel,
) -> Vec<Result<UnitReport, Error>> {
    units.par_iter().map(|(n, s)| mine_unit(n, s, manifest, ifd)).collect()
}

/// Sound GRAAMs of all units that parsed.
pub fn sound_graams(reports: &[Result<UnitReport, Error>]) -> Vec<Graam> {
    reports
        .iter()
        .flatten()
        .flat_map(|r| r.usages.iter().filter_map(|u| u.graam.clone()))
        .collect()
}

/// Mines `units` and infers the framework specification.
pub fn learn(units: &[(String, String)], manifest: &FrameworkManifest, ifd: &IfdModel) -> Result<FSpec, Error> {
    infer(&manifest.name, &sound_graams(&mine_corpus(units, manifest, ifd)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::miniauth;

    #[test]
    fn generated_units_mine_to_sound_graams() {
        let spec = miniauth();
        let corpus = spec.generate(1, 3);
        let ifd = framework_ifd(&corpus.framework, &corpus.manifest).unwrap();
        let units: Vec<_> = corpus.units.iter().map(|u| (u.name.clone(), u.source.clone())).collect();
        let reports = mine_corpus(&units, &corpus.manifest, &ifd);
        for r in &reports {
            let r = r.as_ref().unwrap();
            assert_eq!(r.usages.len(), 1, "{}", r.unit);
            assert!(r.usages[0].verdict.is_sound(), "{}: {:?}", r.unit, r.usages[0].verdict);
        }
        assert_eq!(sound_graams(&reports).len(), spec.templates.len());
    }
}
