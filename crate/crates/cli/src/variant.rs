//! Parser for compact algorithm variant strings.
//!
//! Grammar (one structural head token, then optional `key=value` tokens
//! separated by whitespace):
//!
//! ```text
//! CPA_<k>_<R>_<AS>_<RP>-DE_<M>^<N>    cluster-adaptive DE
//! DE_<M>^<N>                          fixed-parameter DE
//! SHADE_<M>^<N>                       success-history DE
//! ```
//!
//! * `<k>` — cluster count, either an integer (fixed) or `lo:hi`
//!   (silhouette scan over that inclusive range).
//! * `<R>` — centroid sampling radius, `<AS>` — success-archive size,
//!   `<RP>` — candidates regenerated per clustering cycle.
//! * `<M>` — mutation code: `R` rand/1, `R2` rand/2, `B` best/1,
//!   `B2` best/2, `TB` current-to-best/1, `C` current-to-pbest/1 with
//!   parent archive. SHADE accepts only `R` and `C`.
//! * `<N>` — population size.
//!
//! Option tokens: `cross=bin|exp` (any family), `F=` / `CR=` (plain DE
//! only), `p=` (pbest fraction, `C` mutation in CPA/DE heads), `mem=`
//! (SHADE memory slots).
//!
//! Defaults: CPA and plain DE use exponential crossover, SHADE uses
//! binomial; plain DE uses F=0.5, CR=0.9; `C` uses p=0.1; SHADE keeps
//! 100 memory slots.
//!
//! Examples: `CPA_8_0.2_50_200-DE_R^60`, `SHADE_C^100`,
//! `DE_R^60 F=0.5 CR=0.9 cross=bin`.

use std::fmt;

use cpa_core::cpa::{ClusterCount, CpaConfig};
use cpa_core::de::{Crossover, DeParams, Mutation, PlainDeConfig};
use cpa_core::shade::{ShadeConfig, ShadeMutation};
use cpa_core::{BenchmarkProblem64, EvalBudget, RngStream, RunRecord64};

/// Parse failure with the byte offset of the offending token.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VariantError {
    pub spec: String,
    pub offset: usize,
    pub message: String,
}

impl fmt::Display for VariantError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "bad variant {:?} at byte {}: {}",
            self.spec, self.offset, self.message
        )
    }
}

impl std::error::Error for VariantError {}

fn fail<T>(spec: &str, offset: usize, message: impl Into<String>) -> Result<T, VariantError> {
    Err(VariantError {
        spec: spec.to_string(),
        offset,
        message: message.into(),
    })
}

/// A fully resolved algorithm: the label is the trimmed input string and
/// doubles as the CSV key.
#[derive(Debug, Clone)]
pub struct Algorithm {
    pub label: String,
    pub kind: AlgorithmKind,
}

#[derive(Debug, Clone)]
pub enum AlgorithmKind {
    Cpa(CpaConfig<f64>),
    PlainDe(PlainDeConfig<f64>),
    Shade(ShadeConfig),
}

impl Algorithm {
    /// Execute one independent run with its own budget and RNG stream.
    pub fn execute(
        &self,
        problem: &BenchmarkProblem64,
        evals: u64,
        seed: u64,
    ) -> Result<RunRecord64, cpa_core::Error> {
        let mut budget = EvalBudget::new(evals);
        let mut rng = RngStream::new(seed);
        let mut record = match &self.kind {
            AlgorithmKind::Cpa(c) => cpa_core::cpa::cpa_run(problem, c, &mut budget, &mut rng)?,
            AlgorithmKind::PlainDe(c) => cpa_core::de::de_run(problem, c, &mut budget, &mut rng)?,
            AlgorithmKind::Shade(c) => {
                cpa_core::shade::shade_run(problem, c, &mut budget, &mut rng)?
            }
        };
        record.algorithm = self.label.clone();
        Ok(record)
    }

    /// Multi-line explanation of the resolved configuration.
    pub fn explain(&self) -> String {
        match &self.kind {
            AlgorithmKind::Cpa(c) => format!("{}\n  resolved: {}", self.label, c.describe()),
            AlgorithmKind::PlainDe(c) => format!("{}\n  resolved: {}", self.label, c.describe()),
            AlgorithmKind::Shade(c) => format!("{}\n  resolved: {}", self.label, c.describe()),
        }
    }
}

/// Per-token view of the option tail.
struct Options {
    cross: Option<Crossover>,
    f: Option<f64>,
    cr: Option<f64>,
    p: Option<f64>,
    mem: Option<usize>,
}

fn parse_number<T: std::str::FromStr>(
    spec: &str,
    token: &str,
    offset: usize,
    what: &str,
) -> Result<T, VariantError> {
    if token.is_empty() {
        return fail(spec, offset, format!("expected {what}, found nothing"));
    }
    token
        .parse::<T>()
        .or_else(|_| fail(spec, offset, format!("expected {what}, found {token:?}")))
}

fn parse_mutation(spec: &str, code: &str, offset: usize, p: f64) -> Result<Mutation, VariantError> {
    match code {
        "R" => Ok(Mutation::Rand1),
        "R2" => Ok(Mutation::Rand2),
        "B" => Ok(Mutation::Best1),
        "B2" => Ok(Mutation::Best2),
        "TB" => Ok(Mutation::CurrentToBest1),
        "C" => Ok(Mutation::CurrentToPBest1 { p, archive: true }),
        _ => fail(
            spec,
            offset,
            format!("unknown mutation code {code:?} (expected R, R2, B, B2, TB, or C)"),
        ),
    }
}

/// Split `MUT^N` into a mutation code and a population size.
fn parse_mut_pop<'a>(
    spec: &str,
    tail: &'a str,
    tail_offset: usize,
) -> Result<(&'a str, usize, usize), VariantError> {
    let caret = match tail.find('^') {
        Some(c) => c,
        None => return fail(spec, tail_offset, "expected '^' before the population size"),
    };
    let code = &tail[..caret];
    let n: usize = parse_number(
        spec,
        &tail[caret + 1..],
        tail_offset + caret + 1,
        "a population size",
    )?;
    Ok((code, tail_offset, n))
}

fn parse_options(spec: &str, head_len: usize) -> Result<Options, VariantError> {
    let mut opts = Options {
        cross: None,
        f: None,
        cr: None,
        p: None,
        mem: None,
    };
    let tail = &spec[head_len..];
    let mut search_from = 0;
    for token in tail.split_whitespace() {
        let offset = head_len + search_from + tail[search_from..].find(token).unwrap();
        search_from = offset - head_len + token.len();
        let (key, value) = match token.split_once('=') {
            Some(kv) => kv,
            None => return fail(spec, offset, format!("expected key=value, found {token:?}")),
        };
        let value_offset = offset + key.len() + 1;
        match key {
            "cross" => {
                opts.cross = Some(match value {
                    "bin" => Crossover::Binomial,
                    "exp" => Crossover::Exponential,
                    _ => {
                        return fail(
                            spec,
                            value_offset,
                            format!("expected bin or exp, found {value:?}"),
                        )
                    }
                })
            }
            "F" => opts.f = Some(parse_number(spec, value, value_offset, "a number for F")?),
            "CR" => opts.cr = Some(parse_number(spec, value, value_offset, "a number for CR")?),
            "p" => opts.p = Some(parse_number(spec, value, value_offset, "a pbest fraction")?),
            "mem" => opts.mem = Some(parse_number(spec, value, value_offset, "a memory size")?),
            _ => return fail(spec, offset, format!("unknown option {key:?}")),
        }
    }
    Ok(opts)
}

fn reject_option(
    spec: &str,
    present: bool,
    name: &str,
    family: &str,
) -> Result<(), VariantError> {
    if present {
        return fail(
            spec,
            spec.len(),
            format!("option {name} does not apply to {family}"),
        );
    }
    Ok(())
}

/// Parse a variant string into a runnable algorithm.
pub fn parse_variant(input: &str) -> Result<Algorithm, VariantError> {
    let spec = input.trim();
    if spec.is_empty() {
        return fail(spec, 0, "empty variant string");
    }
    let head_len = spec.find(char::is_whitespace).unwrap_or(spec.len());
    let head = &spec[..head_len];
    let opts = parse_options(spec, head_len)?;

    let kind = if let Some(body) = head.strip_prefix("CPA_") {
        let base = 4; // offset of `body` within `spec`
        let dash = match body.find("-DE_") {
            Some(d) => d,
            None => return fail(spec, base, "expected a '-DE_' section after the CPA fields"),
        };
        let fields: Vec<&str> = body[..dash].split('_').collect();
        if fields.len() != 4 {
            return fail(
                spec,
                base,
                format!(
                    "expected four '_'-separated fields k_R_AS_RP, found {}",
                    fields.len()
                ),
            );
        }
        let mut offsets = Vec::with_capacity(4);
        let mut at = base;
        for f in &fields {
            offsets.push(at);
            at += f.len() + 1;
        }

        let clusters = if let Some((lo, hi)) = fields[0].split_once(':') {
            let lo: usize = parse_number(spec, lo, offsets[0], "a cluster-range lower bound")?;
            let hi: usize =
                parse_number(spec, hi, offsets[0] + fields[0].find(':').unwrap() + 1,
                    "a cluster-range upper bound")?;
            ClusterCount::SilhouetteRange(lo, hi)
        } else {
            ClusterCount::Fixed(parse_number(spec, fields[0], offsets[0], "a cluster count")?)
        };
        let radius: f64 = parse_number(spec, fields[1], offsets[1], "a sampling radius")?;
        let archive: usize = parse_number(spec, fields[2], offsets[2], "an archive size")?;
        let regen: usize = parse_number(spec, fields[3], offsets[3], "a regeneration count")?;

        let tail_offset = base + dash + 4;
        let (code, code_offset, n) = parse_mut_pop(spec, &body[dash + 4..], tail_offset)?;
        let mutation = parse_mutation(spec, code, code_offset, opts.p.unwrap_or(0.1))?;
        if opts.p.is_some() && !matches!(mutation, Mutation::CurrentToPBest1 { .. }) {
            return fail(spec, spec.len(), "option p only applies to the C mutation");
        }
        reject_option(spec, opts.f.is_some(), "F", "an adaptive variant")?;
        reject_option(spec, opts.cr.is_some(), "CR", "an adaptive variant")?;
        reject_option(spec, opts.mem.is_some(), "mem", "a CPA variant")?;

        let mut config =
            CpaConfig::standard(mutation, opts.cross.unwrap_or(Crossover::Exponential), n);
        config.clusters = clusters;
        config.max_radius = radius;
        config.archive_capacity = archive;
        config.regen_count = regen;
        AlgorithmKind::Cpa(config)
    } else if let Some(body) = head.strip_prefix("SHADE_") {
        let (code, code_offset, n) = parse_mut_pop(spec, body, 6)?;
        let mutation = match code {
            "R" => ShadeMutation::Rand1,
            "C" => ShadeMutation::CurrentToPBest,
            _ => {
                return fail(
                    spec,
                    code_offset,
                    format!("unknown mutation code {code:?} (SHADE takes R or C)"),
                )
            }
        };
        reject_option(spec, opts.f.is_some(), "F", "an adaptive variant")?;
        reject_option(spec, opts.cr.is_some(), "CR", "an adaptive variant")?;
        reject_option(spec, opts.p.is_some(), "p", "SHADE (p is drawn per individual)")?;

        let mut config = ShadeConfig::standard(mutation, n);
        if let Some(mem) = opts.mem {
            config.memory_size = mem;
        }
        if let Some(cross) = opts.cross {
            config.crossover = cross;
        }
        AlgorithmKind::Shade(config)
    } else if let Some(body) = head.strip_prefix("DE_") {
        let (code, code_offset, n) = parse_mut_pop(spec, body, 3)?;
        let mutation = parse_mutation(spec, code, code_offset, opts.p.unwrap_or(0.1))?;
        if opts.p.is_some() && !matches!(mutation, Mutation::CurrentToPBest1 { .. }) {
            return fail(spec, spec.len(), "option p only applies to the C mutation");
        }
        reject_option(spec, opts.mem.is_some(), "mem", "plain DE")?;

        let mut config =
            PlainDeConfig::standard(mutation, opts.cross.unwrap_or(Crossover::Exponential), n);
        config.params = DeParams::new(opts.f.unwrap_or(0.5), opts.cr.unwrap_or(0.9));
        AlgorithmKind::PlainDe(config)
    } else {
        return fail(
            spec,
            0,
            format!(
                "unknown algorithm family in {head:?} (expected CPA_, DE_, or SHADE_)"
            ),
        );
    };

    let valid = match &kind {
        AlgorithmKind::Cpa(c) => c.validate(),
        AlgorithmKind::PlainDe(c) => c.validate(),
        AlgorithmKind::Shade(c) => c.validate(),
    };
    if let Err(e) = valid {
        return fail(spec, spec.len(), e.to_string());
    }

    Ok(Algorithm {
        label: spec.to_string(),
        kind,
    })
}
