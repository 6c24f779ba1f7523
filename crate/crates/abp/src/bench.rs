//! Timing the planner over a directory of domains and problems.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use abp_core::{plan, Domain, PlanStatus, Problem, SearchConfig};
use serde::{Deserialize, Serialize};

use crate::parse::{domain_from_sexp, problem_from_sexp};
use crate::sexp::parse_one;
use crate::LoadError;

/// A problem together with the domain it names.
#[derive(Clone, Debug)]
pub struct Instance {
    pub name: String,
    pub domain: Domain,
    pub problem: Problem,
}

fn files_with_extension(dir: &Path, ext: &str) -> Result<Vec<PathBuf>, LoadError> {
    let entries = fs::read_dir(dir).map_err(|e| LoadError::io(dir, e))?;
    let mut out = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| LoadError::io(dir, e))?.path();
        if path.extension().is_some_and(|x| x == ext) {
            out.push(path);
        }
    }
    out.sort();
    Ok(out)
}

/// Loads every `*.abp` domain and every `*.p` problem of `dir`, pairing
/// problems with domains by the domain name they declare. Instances are
/// sorted by file name.
pub fn load_suite(dir: &Path) -> Result<Vec<Instance>, LoadError> {
    let mut domains: BTreeMap<String, Domain> = BTreeMap::new();
    for path in files_with_extension(dir, "abp")? {
        let text = fs::read_to_string(&path).map_err(|e| LoadError::io(&path, e))?;
        let d = parse_one(&text)
            .map_err(Into::into)
            .and_then(|x| domain_from_sexp(&x))
            .map_err(|e| LoadError::parse(&path, e))?;
        domains.insert(d.name.to_string(), d);
    }
    let mut out = Vec::new();
    for path in files_with_extension(dir, "p")? {
        let text = fs::read_to_string(&path).map_err(|e| LoadError::io(&path, e))?;
        let x = parse_one(&text).map_err(|e| LoadError::parse(&path, e.into()))?;
        let domain_name = x
            .as_list()
            .and_then(|l| l.get(2))
            .and_then(|d| d.as_atom())
            .unwrap_or_default()
            .to_string();
        let Some(domain) = domains.get(&domain_name) else {
            return Err(LoadError::MissingDomain {
                path: path.clone(),
                domain: domain_name,
            });
        };
        let problem = problem_from_sexp(&x, domain).map_err(|e| LoadError::parse(&path, e))?;
        out.push(Instance {
            name: path.file_stem().unwrap_or_default().to_string_lossy().into_owned(),
            domain: domain.clone(),
            problem,
        });
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub instance: String,
    /// `None` is an unbounded number of assumptions.
    pub bound: Option<u32>,
    pub status: String,
    pub weight: Option<u32>,
    pub expansions: u64,
    /// Median wall-clock time over the repetitions.
    pub ms: f64,
}

impl BenchRow {
    pub fn to_sexp(&self) -> String {
        let bound = self.bound.map_or("none".to_string(), |b| b.to_string());
        let weight = self.weight.map_or("none".to_string(), |w| w.to_string());
        format!(
            "(:row :instance {} :bound {} :status {} :weight {} :expansions {} :ms {:.3})",
            self.instance, bound, self.status, weight, self.expansions, self.ms
        )
    }
}

/// Plans every instance under every assumption bound, `repeat` times each.
pub fn run_bench(
    instances: &[Instance],
    bounds: &[Option<u32>],
    repeat: usize,
    base: &SearchConfig,
) -> Vec<BenchRow> {
    let mut rows = Vec::new();
    for inst in instances {
        for &bound in bounds {
            let config = SearchConfig {
                max_assumptions: bound,
                ..base.clone()
            };
            let mut times = Vec::new();
            let mut last = None;
            for _ in 0..repeat.max(1) {
                let start = Instant::now();
                let r = plan(&inst.domain, &inst.problem, &config);
                times.push(start.elapsed().as_secs_f64() * 1e3);
                last = Some(r);
            }
            times.sort_by(|a, b| a.total_cmp(b));
            let ms = times[times.len() / 2];
            let row = match last.expect("at least one repetition") {
                Ok(r) => BenchRow {
                    instance: inst.name.clone(),
                    bound,
                    status: r.status.label().to_string(),
                    weight: r.conjecture.as_ref().map(|c| c.total_weight),
                    expansions: r.stats.expansions,
                    ms,
                },
                Err(e) => BenchRow {
                    instance: inst.name.clone(),
                    bound,
                    status: format!("error: {}", e),
                    weight: None,
                    expansions: 0,
                    ms,
                },
            };
            rows.push(row);
        }
    }
    rows
}

/// True when the status means the search found a conjecture.
pub fn solved(status: &str) -> bool {
    status == PlanStatus::Solved.label()
}
