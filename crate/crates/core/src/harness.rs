//! Verification campaigns: a registry of relations between measures, run
//! over every function of a given arity or over a seeded random sample.
//!
//! Random tables are drawn with ChaCha8: function `k` of a campaign with
//! seed `s` uses `ChaCha8Rng::seed_from_u64(s)` on stream `k`, one
//! `random::<bool>()` per input in index order. Results never depend on
//! the number of worker threads.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::approx::{self, ApproxDegreeResult, Convention};
use crate::combinatorial::{self, Profile, QueryComplexity};
use crate::error::{check_arity, Error, Result};
use crate::family::from_family;
use crate::formula::parse_formula;
use crate::gamma2;
use crate::graph::GraphProperty;
use crate::poly;
use crate::spectral;
use crate::truth_table::TruthTable;

/// Largest arity for exhaustive campaigns.
pub const EXHAUSTIVE_CAP: usize = 4;
pub const DEFAULT_TOLERANCE: f64 = 1e-6;

/// Reads `tt:N:HEX`, `fam:NAME:P[,P]`, `formula:TEXT` or `graph:NAME:V`.
pub fn parse_function_spec(spec: &str) -> Result<TruthTable> {
    let bad = |reason: &str| Error::FunctionSpec {
        spec: spec.to_string(),
        reason: reason.to_string(),
    };
    let (kind, rest) = spec
        .split_once(':')
        .ok_or_else(|| bad("missing `kind:` prefix"))?;
    match kind {
        "tt" => {
            let (n, hex) = rest
                .split_once(':')
                .ok_or_else(|| bad("expected tt:N:HEX"))?;
            let n = n.trim().parse().map_err(|_| bad("arity is not a number"))?;
            TruthTable::from_hex(n, hex.trim())
        }
        "fam" => {
            let (name, params) = rest
                .split_once(':')
                .ok_or_else(|| bad("expected fam:NAME:PARAMS"))?;
            let params = params
                .split([',', ':'])
                .map(|p| {
                    p.trim()
                        .parse::<usize>()
                        .map_err(|_| bad("parameters must be integers"))
                })
                .collect::<Result<Vec<_>>>()?;
            from_family(name.trim(), &params)
        }
        "formula" => parse_formula(rest)?.to_table(),
        "graph" => {
            let (name, v) = rest
                .split_once(':')
                .ok_or_else(|| bad("expected graph:NAME:VERTICES"))?;
            let v = v
                .trim()
                .parse()
                .map_err(|_| bad("vertex count is not a number"))?;
            Ok(GraphProperty::builtin(name.trim(), v)?.table)
        }
        _ => Err(bad("unknown kind (expected tt, fam, formula or graph)")),
    }
}

/// Every measure accepted by [`measure`].
pub const MEASURES: &[&str] = &[
    "n", "s", "s0", "s1", "avg-s", "bs", "c", "c0", "c1", "d", "deg", "deg2", "fdeg", "adeg",
    "lambda", "k",
];

/// Computes the requested measures; a measure over its cap is an error
/// naming it.
pub fn measure(f: &TruthTable, ids: &[&str]) -> Result<BTreeMap<String, serde_json::Value>> {
    use serde_json::json;
    let mut out = BTreeMap::new();
    let mut ctx = Context::new(f);
    let mut qc = QueryComplexity::new();
    for &id in ids {
        let value = match id {
            "n" => json!(f.arity()),
            "s" => json!(ctx.sensitivity().max()),
            "s0" => json!(ctx.sensitivity().on_zero),
            "s1" => json!(ctx.sensitivity().on_one),
            "avg-s" => json!(combinatorial::average_sensitivity(f)),
            "bs" => json!(ctx.bs()?),
            "c" => json!(ctx.c()?),
            "c0" => json!(combinatorial::certificate_complexity(f)?.on_zero),
            "c1" => json!(combinatorial::certificate_complexity(f)?.on_one),
            "d" => json!(ctx.d(&mut qc)?),
            "deg" => json!(ctx.deg()),
            "deg2" => json!(poly::degree_gf2(f)),
            "fdeg" => json!(poly::fourier(f).degree()),
            "adeg" => json!(ctx.adeg()?.degree),
            "lambda" => json!(ctx.lambda()?),
            "k" => json!(spectral::koutsoupias(f)?),
            other => return Err(Error::UnknownMeasure(other.to_string())),
        };
        out.insert(id.to_string(), value);
    }
    Ok(out)
}

/// Lazily computed measures of one function.
struct Context<'a> {
    f: &'a TruthTable,
    lambda: Option<f64>,
    deg: Option<usize>,
    sens: Option<Profile>,
    bs: Option<usize>,
    c: Option<usize>,
    d: Option<usize>,
    adeg: Option<ApproxDegreeResult>,
}

impl<'a> Context<'a> {
    fn new(f: &'a TruthTable) -> Self {
        Context {
            f,
            lambda: None,
            deg: None,
            sens: None,
            bs: None,
            c: None,
            d: None,
            adeg: None,
        }
    }

    fn lambda(&mut self) -> Result<f64> {
        if self.lambda.is_none() {
            self.lambda = Some(spectral::lambda(self.f)?.lambda);
        }
        Ok(self.lambda.unwrap())
    }

    fn deg(&mut self) -> usize {
        *self.deg.get_or_insert_with(|| poly::degree(self.f))
    }

    fn sensitivity(&mut self) -> &Profile {
        self.sens
            .get_or_insert_with(|| combinatorial::sensitivity(self.f))
    }

    fn bs(&mut self) -> Result<usize> {
        if self.bs.is_none() {
            self.bs = Some(combinatorial::block_sensitivity(self.f)?.max());
        }
        Ok(self.bs.unwrap())
    }

    fn c(&mut self) -> Result<usize> {
        if self.c.is_none() {
            self.c = Some(combinatorial::certificate_complexity(self.f)?.max());
        }
        Ok(self.c.unwrap())
    }

    fn d(&mut self, qc: &mut QueryComplexity) -> Result<usize> {
        if self.d.is_none() {
            self.d = Some(qc.depth(self.f)?);
        }
        Ok(self.d.unwrap())
    }

    fn adeg(&mut self) -> Result<&ApproxDegreeResult> {
        if self.adeg.is_none() {
            self.adeg = Some(approx::approx_degree(
                self.f,
                1.0 / 3.0,
                Convention::UnitInterval,
            )?);
        }
        Ok(self.adeg.as_ref().unwrap())
    }
}

type Check = fn(&mut Context, &mut QueryComplexity) -> Result<(f64, f64)>;

/// One relation `lhs ≤ rhs`; equalities are checked as `|a − b| ≤ 0`.
pub struct Relation {
    pub id: &'static str,
    pub statement: &'static str,
    pub cap: usize,
    check: Check,
}

fn s0s1(ctx: &mut Context) -> f64 {
    let s = ctx.sensitivity();
    (s.on_zero * s.on_one) as f64
}

pub static RELATIONS: &[Relation] = &[
    Relation {
        id: "huang",
        statement: "deg(f) <= lambda(f)^2",
        cap: 16,
        check: |c, _| Ok((c.deg() as f64, c.lambda()?.powi(2))),
    },
    Relation {
        id: "huang-witness",
        statement: "sqrt(deg f) <= |A_g v|/|v| for the signed-hypercube eigenvector v on a full-degree subcube g",
        cap: 10,
        check: |c, _| {
            if c.f.is_constant() {
                return Ok((0.0, 0.0));
            }
            let (sub, _) = spectral::max_degree_subcube(c.f)?;
            let w = spectral::huang_witness(&sub)?;
            Ok(((c.deg() as f64).sqrt(), w.ratio))
        },
    },
    Relation {
        id: "s-le-lambda2",
        statement: "s(f) <= lambda(f)^2",
        cap: 16,
        check: |c, _| Ok((c.sensitivity().max() as f64, c.lambda()?.powi(2))),
    },
    Relation {
        id: "lambda-le-deg",
        statement: "lambda(f) <= deg(f)",
        cap: 16,
        check: |c, _| Ok((c.lambda()?, c.deg() as f64)),
    },
    Relation {
        id: "lambda-s-product",
        statement: "lambda(f) <= sqrt(s0(f) * s1(f))",
        cap: 16,
        check: |c, _| Ok((c.lambda()?, s0s1(c).sqrt())),
    },
    Relation {
        id: "avg-sensitivity",
        statement: "E_x[s_x(f)] <= lambda(f)",
        cap: 16,
        check: |c, _| Ok((combinatorial::average_sensitivity(c.f), c.lambda()?)),
    },
    Relation {
        id: "deg-s0s1",
        statement: "deg(f) <= s0(f) * s1(f)",
        cap: 16,
        check: |c, _| Ok((c.deg() as f64, s0s1(c))),
    },
    Relation {
        id: "midrijanis",
        statement: "D(f) <= bs(f) * deg(f)",
        cap: 6,
        check: |c, qc| Ok((c.d(qc)? as f64, (c.bs()? * c.deg()) as f64)),
    },
    Relation {
        id: "bs-ge-s",
        statement: "s(f) <= bs(f)",
        cap: 6,
        check: |c, _| Ok((c.sensitivity().max() as f64, c.bs()? as f64)),
    },
    Relation {
        id: "c-ge-bs",
        statement: "bs(f) <= C(f)",
        cap: 6,
        check: |c, _| Ok((c.bs()? as f64, c.c()? as f64)),
    },
    Relation {
        id: "d-ge-c",
        statement: "C(f) <= D(f)",
        cap: 6,
        check: |c, qc| Ok((c.c()? as f64, c.d(qc)? as f64)),
    },
    Relation {
        id: "deg2-le-deg",
        statement: "deg_2(f) <= deg(f)",
        cap: 16,
        check: |c, _| Ok((poly::degree_gf2(c.f) as f64, c.deg() as f64)),
    },
    Relation {
        id: "tightadeg",
        statement: "lambda(f) <= adeg_{1/3}(f) / (1 - 2/3), with a valid witness and a dual certificate at degree adeg - 1",
        cap: 5,
        check: |c, _| {
            let lambda = c.lambda()?;
            let a = c.adeg()?;
            let certified = a.slack >= -1e-9
                && (a.degree == 0
                    || a.certificate.as_ref().is_some_and(|k| k.correlation > k.threshold));
            let lhs = if certified { lambda } else { f64::INFINITY };
            Ok((lhs, 3.0 * a.degree as f64))
        },
    },
    Relation {
        id: "degadeg",
        statement: "deg(f) <= (3 * adeg_{1/3}(f))^2",
        cap: 5,
        check: |c, _| {
            let a = c.adeg()?.degree as f64;
            Ok((c.deg() as f64, 9.0 * a * a))
        },
    },
    Relation {
        id: "gamma2-chain",
        statement: "lambda(f) <= |B_q|/(1-2e) <= gamma_2(M)/(1-2e) <= d/(1-2e) for e in {0, 1/3}, B_q from the degree-d LP witness",
        cap: 5,
        check: |c, _| {
            let mut worst = f64::NEG_INFINITY;
            for eps in [0.0, 1.0 / 3.0] {
                let r = gamma2::certificate_chain(c.f, eps)?;
                for l in &r.links {
                    worst = worst.max(l.lhs - l.rhs);
                }
            }
            Ok((worst, 0.0))
        },
    },
    Relation {
        id: "koutsoupias-eq",
        statement: "lambda(f) = |Q| for Q the sensitive-edge matrix between f^-1(0) and f^-1(1)",
        cap: 10,
        check: |c, _| Ok(((c.lambda()? - spectral::koutsoupias(c.f)?).abs(), 0.0)),
    },
    Relation {
        id: "hadamard-identity",
        statement: "2A_f = A_H - diag(g) A_H diag(g) exactly, and the top eigenvalue of RXR - X equals lambda(f)",
        cap: 8,
        check: |c, _| {
            let r = spectral::hadamard_identities(c.f)?;
            let lhs = if r.identity_exact && r.conjugation_residual <= 1e-9 {
                (r.rxr_top - r.lambda).abs()
            } else {
                f64::INFINITY
            };
            Ok((lhs, 0.0))
        },
    },
    Relation {
        id: "composition-lambda",
        statement: "lambda(f o f) = lambda(f)^2",
        cap: 3,
        check: |c, _| {
            let l = c.lambda()?;
            let composed = spectral::lambda(&c.f.compose(c.f)?)?.lambda;
            Ok(((composed - l * l).abs(), 0.0))
        },
    },
];

pub fn relation(id: &str) -> Result<&'static Relation> {
    RELATIONS
        .iter()
        .find(|r| r.id == id)
        .ok_or_else(|| Error::UnknownRelation(id.to_string()))
}

/// Expands `all` to every relation whose cap admits arity `n`, drops
/// duplicates, and rejects relations whose cap is below `n`.
pub fn select_relations(ids: &[&str], n: usize) -> Result<Vec<&'static Relation>> {
    let mut out: Vec<&'static Relation> = Vec::new();
    for &id in ids {
        let add: Vec<&'static Relation> = if id == "all" {
            RELATIONS.iter().filter(|r| n <= r.cap).collect()
        } else {
            let r = relation(id)?;
            if n > r.cap {
                return Err(Error::ArityCap {
                    what: r.id,
                    arity: n,
                    cap: r.cap,
                });
            }
            vec![r]
        };
        for r in add {
            if !out.iter().any(|o| o.id == r.id) {
                out.push(r);
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug)]
pub struct CampaignOptions {
    /// Worker threads; 0 uses the rayon default.
    pub jobs: usize,
    pub tolerance: f64,
}

impl Default for CampaignOptions {
    fn default() -> Self {
        CampaignOptions {
            jobs: 0,
            tolerance: DEFAULT_TOLERANCE,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Failure {
    pub function: String,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RelationSummary {
    pub id: String,
    pub statement: String,
    pub checked: usize,
    pub passed: usize,
    pub failed: usize,
    /// Smallest `rhs − lhs` seen, with the function attaining it.
    pub worst_margin: Option<f64>,
    pub worst_function: Option<String>,
    pub failures: Vec<Failure>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CampaignReport {
    pub campaign: String,
    pub n: usize,
    pub seed: Option<u64>,
    pub function_count: usize,
    pub tolerance: f64,
    pub relations: Vec<RelationSummary>,
    pub passed: bool,
}

impl CampaignReport {
    pub fn total_failures(&self) -> usize {
        self.relations.iter().map(|r| r.failed).sum()
    }
}

fn run_campaign(
    campaign: String,
    n: usize,
    seed: Option<u64>,
    count: usize,
    table: impl Fn(usize) -> Result<TruthTable> + Sync,
    relations: &[&'static Relation],
    opts: CampaignOptions,
) -> Result<CampaignReport> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs)
        .build()
        .map_err(|e| Error::Precondition(format!("thread pool: {e}")))?;
    let per_function: Vec<(TruthTable, Vec<(f64, f64)>)> = pool.install(|| {
        (0..count)
            .into_par_iter()
            .map_init(QueryComplexity::new, |qc, k| {
                let f = table(k)?;
                let mut ctx = Context::new(&f);
                let values = relations
                    .iter()
                    .map(|r| (r.check)(&mut ctx, qc))
                    .collect::<Result<Vec<_>>>()?;
                Ok((f, values))
            })
            .collect::<Result<Vec<_>>>()
    })?;

    let mut summaries: Vec<RelationSummary> = relations
        .iter()
        .map(|r| RelationSummary {
            id: r.id.to_string(),
            statement: r.statement.to_string(),
            checked: 0,
            passed: 0,
            failed: 0,
            worst_margin: None,
            worst_function: None,
            failures: Vec::new(),
        })
        .collect();
    for (f, values) in &per_function {
        for (s, &(lhs, rhs)) in summaries.iter_mut().zip(values) {
            let margin = rhs - lhs;
            s.checked += 1;
            // NaN margins count as failures
            if margin >= -opts.tolerance {
                s.passed += 1;
            } else {
                s.failed += 1;
                s.failures.push(Failure {
                    function: f.to_string(),
                    lhs,
                    rhs,
                });
            }
            if s.worst_margin.is_none_or(|w| margin < w || margin.is_nan()) {
                s.worst_margin = Some(margin);
                s.worst_function = Some(f.to_string());
            }
        }
    }
    let passed = summaries.iter().all(|s| s.failed == 0);
    Ok(CampaignReport {
        campaign,
        n,
        seed,
        function_count: count,
        tolerance: opts.tolerance,
        relations: summaries,
        passed,
    })
}

/// Checks every function of arity `n ≤ 4`, in table order.
pub fn verify_exhaustive(n: usize, ids: &[&str], opts: CampaignOptions) -> Result<CampaignReport> {
    check_arity("exhaustive campaigns", n, EXHAUSTIVE_CAP)?;
    let relations = select_relations(ids, n)?;
    let len = 1usize << n;
    let count = 1usize << len;
    run_campaign(
        format!("exhaustive-n{n}"),
        n,
        None,
        count,
        |k| TruthTable::from_u64(n, k as u64),
        &relations,
        opts,
    )
}

/// Table `k` of a random campaign.
pub fn random_table(n: usize, seed: u64, k: usize) -> Result<TruthTable> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(k as u64);
    TruthTable::from_fn(n, |_| rng.random::<bool>())
}

/// Checks `count` seeded random functions of arity `n`.
pub fn verify_random(
    n: usize,
    count: usize,
    seed: u64,
    ids: &[&str],
    opts: CampaignOptions,
) -> Result<CampaignReport> {
    let relations = select_relations(ids, n)?;
    run_campaign(
        format!("random-n{n}-count{count}"),
        n,
        Some(seed),
        count,
        |k| random_table(n, seed, k),
        &relations,
        opts,
    )
}
