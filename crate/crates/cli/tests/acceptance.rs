//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::panic::{self, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::Instant;

use bftk_core::adversary::{self, MinimaxWeightScheme};
use bftk_core::approx::{self, Convention};
use bftk_core::formula::{random_read_once, readonce_degree_check};
use bftk_core::gamma2;
use bftk_core::graph::{self, GraphProperty, PROPERTIES};
use bftk_core::harness::{self, CampaignOptions, CampaignReport};
use bftk_core::linalg::top_eigen;
use bftk_core::poly;
use bftk_core::spectral::{self, hadamard_identity_exact};
use bftk_core::truth_table::all_functions;
use bftk_core::{from_family, TruthTable};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn campaign(n: usize, ids: &[&str]) -> Result<CampaignReport, String> {
    let opts = CampaignOptions {
        jobs: 8,
        tolerance: 1e-6,
    };
    let r = harness::verify_exhaustive(n, ids, opts).map_err(|e| e.to_string())?;
    if r.passed {
        Ok(r)
    } else {
        let bad: Vec<String> = r
            .relations
            .iter()
            .filter(|s| s.failed > 0)
            .map(|s| {
                format!(
                    "{} ({} failures, e.g. {})",
                    s.id, s.failed, s.failures[0].function
                )
            })
            .collect();
        Err(format!("n = {n}: {}", bad.join("; ")))
    }
}

fn criterion_1() -> Outcome {
    let ids = [
        "huang",
        "s-le-lambda2",
        "lambda-le-deg",
        "lambda-s-product",
        "avg-sensitivity",
        "deg-s0s1",
        "midrijanis",
        "bs-ge-s",
        "c-ge-bs",
        "d-ge-c",
        "deg2-le-deg",
    ];
    let mut total = 0;
    let mut elapsed = 0.0;
    for n in 1..=4 {
        let start = Instant::now();
        total += campaign(n, &ids)?.function_count;
        elapsed = start.elapsed().as_secs_f64();
    }
    ensure(elapsed <= 300.0, || format!("n = 4 took {elapsed:.1}s"))?;
    Ok(format!(
        "{total} functions, {} relations, n = 4 in {elapsed:.1}s",
        ids.len()
    ))
}

fn criterion_2() -> Outcome {
    for n in 2..=10 {
        let or = spectral::lambda(&from_family("or", &[n]).unwrap())
            .unwrap()
            .lambda;
        let parity = spectral::lambda(&from_family("parity", &[n]).unwrap())
            .unwrap()
            .lambda;
        ensure((or - (n as f64).sqrt()).abs() <= 1e-8, || {
            format!("lambda(OR_{n}) = {or}")
        })?;
        ensure((parity - n as f64).abs() <= 1e-8, || {
            format!("lambda(PARITY_{n}) = {parity}")
        })?;
    }
    Ok("n = 2..10".into())
}

fn criterion_3() -> Outcome {
    for n in 1..=12 {
        let b = spectral::signing_matrix(n).map_err(|e| e.to_string())?;
        ensure(b.square_is_scaled_identity(), || {
            format!("B_{n}^2 != {n} I")
        })?;
        ensure(b.trace() == 0, || format!("trace(B_{n}) = {}", b.trace()))?;
        if n <= 7 {
            // dense integer product as a second opinion
            let d = b.to_dense();
            let len = d.len();
            for x in 0..len {
                for z in 0..len {
                    let v: i64 = (0..len).map(|y| d[x][y] * d[y][z]).sum();
                    ensure(v == if x == z { n as i64 } else { 0 }, || {
                        format!("dense B_{n}^2 at ({x},{z})")
                    })?;
                }
            }
        }
    }
    Ok("n = 1..12".into())
}

fn criterion_4() -> Outcome {
    let mut count = 0;
    for n in 2..=3 {
        for f in all_functions(n).unwrap().filter(|f| poly::degree(f) == n) {
            let w = spectral::huang_witness(&f).map_err(|e| format!("{f}: {e}"))?;
            ensure(w.holds && w.ratio >= (n as f64).sqrt() - 1e-8, || {
                format!("{f}: ratio {}", w.ratio)
            })?;
            count += 1;
        }
    }
    let mut sampled = 0;
    let mut k = 0;
    while sampled < 100 {
        let f = harness::random_table(4, 2024, k).unwrap();
        k += 1;
        if poly::degree(&f) != 4 {
            continue;
        }
        let w = spectral::huang_witness(&f).map_err(|e| format!("{f}: {e}"))?;
        ensure(w.holds && w.ratio >= 2.0 - 1e-8, || {
            format!("{f}: ratio {}", w.ratio)
        })?;
        sampled += 1;
    }
    Ok(format!(
        "{count} full-degree functions at n = 2,3 and 100 at n = 4"
    ))
}

fn criterion_5() -> Outcome {
    let mut count = 0;
    for n in 0..=4 {
        for f in all_functions(n).unwrap() {
            ensure(hadamard_identity_exact(&f).unwrap(), || {
                format!("identity fails for {f}")
            })?;
            count += 1;
        }
    }
    for n in 0..=3 {
        for f in all_functions(n).unwrap() {
            let top = top_eigen(&spectral::rxr_minus_x(&f).unwrap()).0;
            let lambda = spectral::lambda(&f).unwrap().lambda;
            ensure((top - lambda).abs() <= 1e-6, || {
                format!("{f}: top {top} vs lambda {lambda}")
            })?;
        }
    }
    Ok(format!(
        "identity on {count} functions, eigenvalue match n <= 3"
    ))
}

fn criterion_6() -> Outcome {
    let mut total = 0;
    for n in 1..=4 {
        total += campaign(n, &["tightadeg", "degadeg"])?.function_count;
    }
    // spot check that the certificates are present where required
    let f = from_family("or", &[4]).unwrap();
    let a = approx::approx_degree(&f, 1.0 / 3.0, Convention::UnitInterval).unwrap();
    ensure(
        a.certificate.is_some_and(|c| c.correlation > c.threshold),
        || "OR_4 certificate".into(),
    )?;
    Ok(format!("{total} functions"))
}

const PRINTED_12_3: [[i64; 13]; 13] = [
    [0, -1, -2, -3, -2, -1, 0, 1, 2, 3, 2, 1, 0],
    [1, 0, -1, -2, -3, -2, -1, 0, 1, 2, 3, 2, 1],
    [2, 1, 0, -1, -2, -3, -2, -1, 0, 1, 2, 3, 2],
    [3, 2, 1, 0, -1, -2, -3, -2, -1, 0, 1, 2, 3],
    [2, 3, 2, 1, 0, -1, -2, -3, -2, -1, 0, 1, 2],
    [1, 2, 3, 2, 1, 0, -1, -2, -3, -2, -1, 0, 1],
    [0, 1, 2, 3, 2, 1, 0, -1, -2, -3, -2, -1, 0],
    [-1, 0, 1, 2, 3, 2, 1, 0, -1, -2, -3, -2, -1],
    [-2, -1, 0, 1, 2, 3, 2, 1, 0, -1, -2, -3, -2],
    [-3, -2, -1, 0, 1, 2, 3, 2, 1, 0, -1, -2, -3],
    [-2, -3, -2, -1, 0, 1, 2, 3, 2, 1, 0, -1, -2],
    [-1, -2, -3, -2, -1, 0, 1, 2, 3, 2, 1, 0, -1],
    [0, -1, -2, -3, -2, -1, 0, 1, 2, 3, 2, 1, 0],
];

fn criterion_7() -> Outcome {
    let c = gamma2::build_gamma2_certificate(12, 3).map_err(|e| e.to_string())?;
    for (a, printed) in PRINTED_12_3.iter().enumerate() {
        for (b, &expected) in printed.iter().enumerate() {
            let product: i64 = (0..6).map(|j| c.s[j][a] * c.t[j][b]).sum();
            ensure(product == c.m[a][b], || {
                format!("S^T T differs at ({a},{b})")
            })?;
            ensure(c.m[a][b] == expected, || {
                format!("M differs from the printed matrix at ({a},{b})")
            })?;
        }
    }
    ensure(c.column_norms_squared() == (3, 3), || {
        format!("{:?}", c.column_norms_squared())
    })?;
    let mut total = 0;
    for n in 1..=4 {
        total += campaign(n, &["gamma2-chain"])?.function_count;
    }
    Ok(format!(
        "printed matrix reproduced; chain on {total} functions at eps in {{0, 1/3}}"
    ))
}

fn random_nonconstant(rng: &mut ChaCha8Rng, n: usize) -> TruthTable {
    loop {
        let f = TruthTable::from_fn(n, |_| rng.random::<bool>()).unwrap();
        if !f.is_constant() {
            return f;
        }
    }
}

fn criterion_8() -> Outcome {
    let mut pairs = 0;
    for f in all_functions(2).unwrap().filter(|f| !f.is_constant()) {
        for g in all_functions(2).unwrap().filter(|g| !g.is_constant()) {
            let r = adversary::composition_check(&f, &g).unwrap();
            ensure(r.holds, || format!("{f} o {g}: {r:?}"))?;
            pairs += 1;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..200 {
        let n = rng.random_range(1..=3);
        let m = rng.random_range(1..=3);
        let f = random_nonconstant(&mut rng, n);
        let g = random_nonconstant(&mut rng, m);
        let r = adversary::composition_check(&f, &g).unwrap();
        ensure(r.holds, || format!("{f} o {g}: {r:?}"))?;
    }
    Ok(format!("{pairs} exhaustive pairs and 200 random pairs"))
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut functions = 0;
    for n in 1..=3 {
        for f in all_functions(n).unwrap() {
            let lambda = spectral::lambda(&f).unwrap().lambda;
            if !f.is_constant() {
                let w = adversary::swa1_witness(&f).unwrap();
                ensure((w.value - lambda).abs() <= 1e-6, || {
                    format!("{f}: SWA value {} vs {lambda}", w.value)
                })?;
            }
            for _ in 0..500 {
                let w: MinimaxWeightScheme =
                    adversary::random_feasible_scheme(&f, &mut rng).unwrap();
                let objective =
                    adversary::mm1_objective(&f, &w).map_err(|e| format!("{f}: {e}"))?;
                ensure(objective >= lambda - 1e-6, || {
                    format!("{f}: objective {objective} < {lambda}")
                })?;
            }
            functions += 1;
        }
    }
    Ok(format!("{functions} functions, 500 schemes each"))
}

fn criterion_10() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for _ in 0..200 {
        let n = rng.random_range(1..=10);
        let f = random_read_once(n, &mut rng);
        ensure(readonce_degree_check(&f).unwrap(), || {
            format!("deg != n for {f}")
        })?;
    }
    let mut checked = 0;
    for v in 3..=4 {
        for &(name, monotone) in PROPERTIES {
            let p = GraphProperty::builtin(name, v).unwrap();
            ensure(graph::random_invariance(&p, 50, &mut rng), || {
                format!("{name} on {v} vertices")
            })?;
            let flags = graph::check_graph_property(&p);
            ensure(flags.invariant, || {
                format!("{name} on {v} vertices: generators")
            })?;
            if !monotone {
                continue;
            }
            ensure(flags.monotone && flags.nontrivial, || {
                format!("{name} on {v}: {flags:?}")
            })?;
            let r = graph::graph_property_report(&p).unwrap();
            ensure(
                r.lambda * r.lambda >= r.deg as f64 - 1e-6 && r.deg >= r.deg2,
                || {
                    format!(
                        "{name} on {v}: lambda {} deg {} deg2 {}",
                        r.lambda, r.deg, r.deg2
                    )
                },
            )?;
            checked += 1;
        }
    }
    Ok(format!(
        "200 formulas; {checked} monotone property instances"
    ))
}

fn criterion_11() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut outputs = Vec::new();
    for k in 0..2 {
        let path = dir.path().join(format!("run{k}.json"));
        let status = Command::new(env!("CARGO_BIN_EXE_bftk"))
            .args([
                "verify",
                "--n",
                "4",
                "--exhaustive",
                "--relations",
                "all",
                "--jobs",
                "8",
                "--seed",
                "7",
            ])
            .arg("--out")
            .arg(&path)
            .status()
            .map_err(|e| e.to_string())?;
        ensure(status.success(), || format!("run {k} exited with {status}"))?;
        outputs.push(std::fs::read(&path).map_err(|e| e.to_string())?);
    }
    ensure(outputs[0] == outputs[1], || "reports differ".into())?;
    Ok(format!(
        "two reports of {} bytes are identical",
        outputs[0].len()
    ))
}

fn main() -> ExitCode {
    let criteria: [(usize, fn() -> Outcome); 11] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
        (10, criterion_10),
        (11, criterion_11),
    ];
    let mut failed = 0;
    for (k, run) in criteria {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(run))
            .unwrap_or_else(|e| Err(format!("panicked: {:?}", e.downcast_ref::<String>())));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {k:>2}: PASS ({detail}; {secs:.1}s)"),
            Err(detail) => {
                failed += 1;
                println!("criterion {k:>2}: FAIL ({detail}; {secs:.1}s)");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
