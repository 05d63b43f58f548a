//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on failure.

use std::f64::consts::{FRAC_PI_4, TAU};
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use qshape::corpus::{build_corpus, compare_all, run, CorpusConfig, RunOptions};
use qshape::dce::{relevance, simplify};
use qshape::descriptor::{describe, describe_points};
use qshape::geometry::{format_poly, validate_polygon, Point, SimplePolygon};
use qshape::reconstruct::{
    greedy_refine, mismatch_score, reconstruct, trace_prototype, SearchParams,
};
use qshape::similarity::{best_alignment, compute_weights};
use qshape::synthetic::{rng, star_polygon, Similarity};
use qshape::Execution;
use rand::Rng;

type Check = fn() -> Outcome;

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        ok,
        detail: detail.into(),
    }
}

fn within(x: f64, target: f64, tol: f64) -> bool {
    (x - target).abs() <= tol
}

fn weighting() -> Outcome {
    let w = compute_weights(0.0926, 0.2837).expect("positive means");
    let (wd, wc) = (w.w_dir * 0.0926, w.w_dist * 0.2837);
    let ok = within(w.dst2dir, 3.0637, 0.01)
        && within(w.w_dir, 0.754, 0.005)
        && within(w.w_dist, 0.246, 0.005)
        && within(wd, 0.0698, 0.0005)
        && within(wc, 0.0698, 0.0005);
    outcome(
        ok,
        format!(
            "dst2dir {:.4}, w_dir {:.4}, w_dist {:.4}, weighted means {:.5} / {:.5}",
            w.dst2dir, w.w_dir, w.w_dist, wd, wc
        ),
    )
}

fn pair_accounting() -> Outcome {
    let dir = tempfile::tempdir().expect("temp dir");
    let mut r = rng(97);
    for i in 0..97 {
        let n = r.gen_range(12..40);
        let pts = Similarity::random(&mut r).apply_all(&star_polygon(&mut r, n, 0.3));
        fs::write(dir.path().join(format!("s{i:03}.poly")), format_poly(&pts)).expect("write");
    }
    let corpus =
        build_corpus(dir.path(), &CorpusConfig::default(), Execution::Sequential).expect("corpus");
    let start = Instant::now();
    let cmp = compare_all(&corpus.entries, Execution::Sequential).expect("compare");
    let secs = start.elapsed().as_secs_f64();
    let rows = cmp.matrix.to_csv(&cmp.weights).lines().count() - 1;
    let evals = cmp.matrix.shift_evaluations();
    outcome(
        corpus.entries.len() == 97 && rows == 4656 && evals == 55_872 && secs < 60.0,
        format!(
            "{} entries, {rows} pair rows, {evals} shift evaluations, {secs:.3} s single-threaded",
            corpus.entries.len()
        ),
    )
}

fn comparison_axioms() -> Outcome {
    let mut r = rng(3);
    let shapes: Vec<_> = (0..200)
        .map(|_| describe_points(&star_polygon(&mut r, 12, 0.3), 4).expect("describe"))
        .collect();
    let mut identity = true;
    let mut worst: f64 = 0.0;
    for (i, a) in shapes.iter().enumerate() {
        let same = best_alignment(a, a).expect("align");
        identity &= same.dir_err == 0.0 && same.dist_err == 0.0;
        let b = &shapes[(i + 1) % shapes.len()];
        let ab = best_alignment(a, b).expect("align");
        let ba = best_alignment(b, a).expect("align");
        worst = worst.max(((ab.dir_err + ab.dist_err) - (ba.dir_err + ba.dist_err)).abs());
    }
    outcome(
        identity && worst <= 1e-12,
        format!("200 random 12-gons: identity exact = {identity}, max symmetry gap {worst:e}"),
    )
}

fn descriptor_invariance() -> Outcome {
    let mut r = rng(4);
    let mut same = 0;
    for _ in 0..1000 {
        let n = r.gen_range(3..30);
        let m = r.gen_range(1..8);
        let pts = star_polygon(&mut r, n, 0.1);
        let moved = Similarity::random(&mut r).apply_all(&pts);
        if describe_points(&pts, m).expect("describe")
            == describe_points(&moved, m).expect("describe")
        {
            same += 1;
        }
    }
    outcome(
        same == 1000,
        format!("{same}/1000 descriptors bit-identical after similarity transforms"),
    )
}

fn is_subsequence(sub: &[Point], full: &[Point]) -> bool {
    let mut it = full.iter();
    sub.iter().all(|v| it.any(|w| w == v))
}

fn dce_contract() -> Outcome {
    let mut r = rng(5);
    let mut good = 0;
    for _ in 0..500 {
        let n = r.gen_range(20..=200);
        let p = validate_polygon(&star_polygon(&mut r, n, 0.2)).expect("simple");
        if let Ok(s) = simplify(&p, 12) {
            if s.len() == 12
                && is_subsequence(s.vertices(), p.vertices())
                && validate_polygon(s.vertices()).is_ok()
            {
                good += 1;
            }
        }
    }
    let collinear = relevance(
        Point::new(0.0, 0.0),
        Point::new(1.0, 0.0),
        Point::new(3.0, 0.0),
    )
    .expect("relevance");
    let right = relevance(
        Point::new(0.0, 0.0),
        Point::new(1.0, 0.0),
        Point::new(1.0, 1.0),
    )
    .expect("relevance");
    outcome(
        good == 500 && collinear == 0.0 && within(right, FRAC_PI_4, 1e-12),
        format!("{good}/500 simplified to 12 valid subsequences; collinear K = {collinear}, right-angle K = {right:.15}"),
    )
}

fn regular(n: usize) -> SimplePolygon {
    let pts: Vec<Point> = (0..n)
        .map(|k| {
            let t = TAU * k as f64 / n as f64;
            Point::new(t.cos(), t.sin())
        })
        .collect();
    validate_polygon(&pts).expect("regular polygon")
}

fn rectangle(w: f64, h: f64) -> SimplePolygon {
    validate_polygon(&[
        Point::new(0.0, 0.0),
        Point::new(w, 0.0),
        Point::new(w, h),
        Point::new(0.0, h),
    ])
    .expect("rectangle")
}

fn reconstruction() -> Outcome {
    let start = Instant::now();
    let mut r = rng(6);
    let randoms: Vec<SimplePolygon> = (0..100)
        .map(|_| validate_polygon(&star_polygon(&mut r, 12, 0.3)).expect("simple"))
        .collect();

    // (a) own descriptor scores zero
    let zero = randoms
        .iter()
        .filter(|p| {
            mismatch_score(p.vertices(), &describe(p, 4).expect("describe")).expect("score") == 0.0
        })
        .count();

    // (b) monotone refinement
    let params = SearchParams::default();
    let mut monotone = 0;
    for p in &randoms {
        let target = describe(p, 4).expect("describe");
        let res = greedy_refine(&trace_prototype(&target), &target, &params).expect("refine");
        if res.score_trace.windows(2).all(|w| w[1] < w[0]) && res.final_score <= res.initial_score {
            monotone += 1;
        }
    }

    // (c) exact round trip for rectangles and regular polygons
    let mut targets: Vec<(String, SimplePolygon)> = [
        (1.0, 1.0),
        (2.0, 1.0),
        (3.0, 1.0),
        (1.5, 1.0),
        (5.0, 2.0),
        (1.0, 4.0),
    ]
    .iter()
    .map(|&(w, h)| (format!("{w}x{h} rectangle"), rectangle(w, h)))
    .collect();
    for _ in 0..10 {
        let (w, h) = (r.gen_range(0.1..10.0), r.gen_range(0.1..10.0));
        targets.push((format!("{w:.3}x{h:.3} rectangle"), rectangle(w, h)));
    }
    targets.extend((3..=12).map(|n| (format!("regular {n}-gon"), regular(n))));
    let mut missed = Vec::new();
    for (name, p) in &targets {
        let target = describe(p, 4).expect("describe");
        let res = reconstruct(&target, &params).expect("reconstruct");
        let back = describe_points(&res.vertices, 4);
        if !(res.simple && back.as_ref().is_ok_and(|b| *b == target)) {
            missed.push(format!("{name} (score {:.4})", res.final_score));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        zero == 100 && monotone == 100 && missed.is_empty() && secs < 120.0,
        format!(
            "(a) {zero}/100 zero self-mismatch; (b) {monotone}/100 strictly decreasing traces; (c) {}/{} exact round trips{}; {secs:.1} s",
            targets.len() - missed.len(),
            targets.len(),
            if missed.is_empty() { String::new() } else { format!(", missed: {}", missed.join(", ")) }
        ),
    )
}

fn bundled_corpus() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/synthetic20")
}

fn determinism() -> Outcome {
    let input = bundled_corpus();
    let tmp = tempfile::tempdir().expect("temp dir");
    let mut outputs = Vec::new();
    let mut report = None;
    for (round, jobs) in [(0, 1), (1, 1), (2, 8), (3, 8)] {
        let options = RunOptions {
            input: input.clone(),
            out: tmp.path().join(format!("run{round}")),
            config: CorpusConfig::default(),
            top: 5,
            exec: Execution::from_jobs(Some(jobs)),
            svg: false,
        };
        report = Some(run(&options).expect("corpus run"));
        let csv = fs::read(options.out.join("pairs.csv")).expect("csv");
        let json = fs::read(options.out.join("report.json")).expect("json");
        outputs.push((csv, json));
    }
    let identical = outputs.windows(2).all(|w| w[0] == w[1]);
    let report = report.expect("at least one run");
    let mut dups = 0;
    let mut hits = 0;
    for e in &report.entries {
        let name = e.file_name();
        if let Some(orig) = name.strip_suffix("_dup.poly") {
            dups += 1;
            let best = &report.entries[report.queries.best_match[e.id].id];
            hits += usize::from(best.file_name() == format!("{orig}.poly"));
        }
    }
    let rate = hits as f64 / dups.max(1) as f64;
    outcome(
        identical && report.entries.len() == 20 && dups == 10 && rate >= 0.95,
        format!(
            "{} entries; outputs byte-identical across 2 runs x jobs {{1, 8}}: {identical}; duplicates matched to original {hits}/{dups}",
            report.entries.len()
        ),
    )
}

fn main() {
    let criteria: [(&str, Check); 7] = [
        ("1 weighting reproduction", weighting),
        ("2 pair accounting", pair_accounting),
        ("3 comparison axioms", comparison_axioms),
        ("4 descriptor invariance", descriptor_invariance),
        ("5 DCE contract", dce_contract),
        ("6 reconstruction round-trip", reconstruction),
        ("7 end-to-end determinism", determinism),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let o = check();
        failed += usize::from(!o.ok);
        println!(
            "{} criterion {name}: {}",
            if o.ok { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    println!(
        "N/A  criterion 8 bird-corpus figures: not reproducible without the original image corpus; covered by criteria 3-7 and the synthetic walkthrough"
    );
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
