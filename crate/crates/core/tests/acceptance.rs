//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero when any criterion fails.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use fuzzwrap::evaluator::{
    evaluate, generate_corpus, precision, recall, AnomalyProfile, EvalReport, ExactDelimiterWrapper,
};
use fuzzwrap::fuzzy::{combine, infer_error_tot, Combiner, Partition, Term};
use fuzzwrap::induction::{detector_cost, detector_cost_with};
use fuzzwrap::page_model::{DetectorWindow, Edge, Side};
use fuzzwrap::tokenizer::tokenize;
use fuzzwrap::{extract, train, TokenClass, WrapperConfig, ZoneKind};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

const GLOBAL_BEGIN_MATRIX: [[u32; 12]; 5] = [
    [0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0],
    [2, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0],
    [2, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, 0, 2, 0, 0, 1],
    [3, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0],
];

fn global_begin_matrix() -> Outcome {
    let model = train(&common::listing_pages(), &WrapperConfig::default()).map_err(|e| e.to_string())?;
    let m = &model.separator(&ZoneKind::Global, Edge::Begin).ok_or("no global begin separator")?.left.matrix;
    let mut mismatches = Vec::new();
    for (distance, row) in GLOBAL_BEGIN_MATRIX.iter().enumerate() {
        for (column, &expected) in row.iter().enumerate() {
            let class = TokenClass::from_column(column).unwrap();
            if m.count(distance, class) != expected {
                mismatches.push(format!("f({distance},{class})={}", m.count(distance, class)));
            }
        }
    }
    check(
        mismatches.is_empty() && m.count(4, TokenClass::C1Alph) == 3,
        format!("60 cells, {} mismatches {mismatches:?}, f(4,C1Alph)={}", mismatches.len(), m.count(4, TokenClass::C1Alph)),
    )
}

fn worked_cost() -> Outcome {
    use TokenClass::*;
    let model = train(&common::listing_pages(), &WrapperConfig::default()).map_err(|e| e.to_string())?;
    let m = &model.separator(&ZoneKind::Global, Edge::Begin).unwrap().left.matrix;
    let window = DetectorWindow {
        side: Side::Left,
        zone: ZoneKind::Global,
        edge: Edge::Begin,
        classes: vec![C1Alph, C1Alph, ListOpen, HtmlOpen],
    };
    let literal = detector_cost_with(&window, |class, distance| {
        let (truth, observed_at) = match (class, distance) {
            (C1Alph, 4) => (1.0, 4),
            (C1Alph, 3) => (0.5, 4),
            (ListOpen, 2) => (0.66, 3),
            (_, d) => (1.0, d),
        };
        truth * f64::from(m.count(observed_at, class)) / f64::from(m.n_instances)
    });
    let default = detector_cost(m, &window, 2);
    let literal_ok = ((literal * 100.0).round() as i64 - 226).abs() <= 1;
    let default_ok = (default - 13.0 / 6.0).abs() <= 1e-6;
    check(literal_ok && default_ok, format!("literal truths {literal:.4} (2.26 +- 0.01), w=2 {default:.6} (2.167)"))
}

fn metric_fidelity() -> Outcome {
    let counts = [(20, 12, 10), (35, 34, 23), (55, 20, 11), (73, 30, 18), (108, 33, 26)];
    let expected = [(0.600, 0.500), (0.971, 0.657), (0.364, 0.200), (0.411, 0.247), (0.306, 0.241)];
    let round3 = |x: f64| (x * 1000.0).round() / 1000.0;
    let mut good = 0;
    for ((total, extracted, pertinent), (r, p)) in counts.into_iter().zip(expected) {
        good += usize::from(round3(recall(extracted, total).unwrap()) == r);
        good += usize::from(round3(precision(pertinent, total).unwrap()) == p);
    }
    check(good == 10, format!("{good}/10 ratios match to 3 decimals"))
}

fn perfect_regularity() -> Outcome {
    let corpus = generate_corpus(&AnomalyProfile::regular(), 10, 42).map_err(|e| e.to_string())?;
    let min_records = corpus.pages.iter().map(|p| p.labels.records.len()).min().unwrap_or(0);
    let model = train(&corpus.training_pages(3), &WrapperConfig::default()).map_err(|e| e.to_string())?;
    let report = evaluate(&corpus, &model).map_err(|e| e.to_string())?;
    check(
        report.recall == 1.0 && report.precision == 1.0 && min_records >= 5,
        format!("seed 42, {} tuples, min {min_records}/page: recall {}, precision {}", report.total, report.recall, report.precision),
    )
}

fn anomaly_robustness() -> Outcome {
    let profile = AnomalyProfile::preset("mixed").unwrap();
    let (mut fuzzy, mut base) = (Vec::new(), Vec::new());
    let mut wins = 0;
    let seeds = 0..12u64;
    for seed in seeds.clone() {
        let corpus = generate_corpus(&profile, 10, seed).map_err(|e| e.to_string())?;
        let training = corpus.training_pages(3);
        let model = train(&training, &WrapperConfig::default()).map_err(|e| e.to_string())?;
        let f = evaluate(&corpus, &model).map_err(|e| e.to_string())?;
        let b = evaluate(&corpus, &ExactDelimiterWrapper::learn(&training)).map_err(|e| e.to_string())?;
        wins += usize::from(f.recall > b.recall);
        fuzzy.push(f);
        base.push(b);
    }
    let pool = |reports: &[EvalReport]| {
        let sum = |f: fn(&EvalReport) -> usize| reports.iter().map(f).sum::<usize>();
        (sum(|r| r.extracted), sum(|r| r.pertinent), sum(|r| r.total))
    };
    let ((fe, fp, total), (be, bp, _)) = (pool(&fuzzy), pool(&base));
    let (fr, br) = (fe as f64 / total as f64, be as f64 / total as f64);
    check(
        fr > br,
        format!(
            "mixed 20%/20%, seeds 0..12 x 10 pages, {total} tuples: recall fuzzy {fr:.3} vs baseline {br:.3}; \
             precision {:.3} vs {:.3}; standard precision {:.3} vs {:.3}; fuzzy ahead on {wins}/12 seeds",
            fp as f64 / total as f64,
            bp as f64 / total as f64,
            fp as f64 / fe.max(1) as f64,
            bp as f64 / be.max(1) as f64,
        ),
    )
}

fn fuzzy_properties() -> Outcome {
    let p = Partition::default();
    let zero = infer_error_tot(0.0, 0.0, &p) == 0.0;
    let grid: Vec<f64> = (0..41).map(|k| -1.0 + f64::from(k) * 0.05).collect();
    let (mut worst_anti, mut worst_sum) = (0.0f64, 0.0f64);
    for &l in &grid {
        for &r in &grid {
            worst_anti = worst_anti.max((infer_error_tot(l, r, &p) + infer_error_tot(-l, -r, &p)).abs());
            worst_sum = worst_sum.max((combine(l, r, Combiner::Sum, &p) - (l + r)).abs());
        }
    }
    let peaks = Term::ALL.iter().all(|&t| p.fuzzify(p.term(t).peak).get(t) == 1.0);
    check(
        zero && worst_anti <= 1e-9 && worst_sum <= 1e-12 && peaks,
        format!("f(0,0)=0 {zero}, antisymmetry max {worst_anti:.1e}, sum max {worst_sum:.1e}, peaks {peaks}"),
    )
}

const FRAGMENTS: &[&str] = &[
    "<UL>", "</UL>", "<LI>", "<B>", "</B>", "<I>", "</I>", "<BR>", "<TD class=x>", "<!DOCTYPE html>", "<", ">",
    "</", "<a", "Congo", "Kenya", "FSM", "A", "professor", "123", "7", " ", "  ", "\t", "\n", "\r\n", ":", ",",
    "(", "&amp;", "§", "é", "É", "中文", "€", "ǅ",
];

fn tokenizer_round_trip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1000);
    let mut pages: Vec<String> = (0..1000)
        .map(|_| {
            let n = rng.gen_range(0..40);
            (0..n).map(|_| FRAGMENTS[rng.gen_range(0..FRAGMENTS.len())]).collect()
        })
        .collect();
    pages.extend(common::fixture_html().into_iter().map(|(_, html)| html));
    let lossless = pages
        .iter()
        .filter(|page| {
            let tokens = tokenize(page);
            let tiled = tokens.windows(2).all(|w| w[0].span.end == w[1].span.start);
            tiled && tokens.iter().map(|t| t.lexeme.as_str()).collect::<String>() == **page
        })
        .count();
    check(lossless == pages.len(), format!("{lossless}/{} pages reconstructed", pages.len()))
}

fn determinism() -> Outcome {
    let mut pages = common::listing_pages();
    let config = WrapperConfig::default();
    let a = train(&pages, &config).map_err(|e| e.to_string())?.to_json();
    let b = train(&pages, &config).map_err(|e| e.to_string())?.to_json();
    let corpus = generate_corpus(&AnomalyProfile::preset("noisy").unwrap(), 8, 9).map_err(|e| e.to_string())?;
    pages.extend(corpus.training_pages(3));
    let model = train(&pages, &config).map_err(|e| e.to_string())?;
    let same_again = model.to_json() == train(&pages, &config).map_err(|e| e.to_string())?.to_json();
    let results_equal = corpus.pages.iter().all(|p| {
        let first = extract(&p.labels.page_id, &p.html, &model).map(|r| r.to_json());
        first == extract(&p.labels.page_id, &p.html, &model).map(|r| r.to_json())
    });
    check(
        a == b && same_again && results_equal,
        format!("model bytes equal {}, mixed-source model equal {same_again}, {} results equal {results_equal}", a == b, corpus.pages.len()),
    )
}

fn main() -> ExitCode {
    type Criterion = (&'static str, fn() -> Outcome, Option<Duration>);
    let criteria: [Criterion; 8] = [
        ("global-begin frequency matrix", global_begin_matrix, Some(Duration::from_secs(1))),
        ("worked detector cost", worked_cost, Some(Duration::from_secs(1))),
        ("metric fidelity", metric_fidelity, None),
        ("perfect regularity", perfect_regularity, Some(Duration::from_secs(10))),
        ("anomaly robustness", anomaly_robustness, Some(Duration::from_secs(30))),
        ("fuzzy engine properties", fuzzy_properties, None),
        ("tokenizer round trip", tokenizer_round_trip, None),
        ("determinism", determinism, None),
    ];
    let mut failed = 0;
    for (name, run, limit) in criteria {
        let started = Instant::now();
        let outcome = run();
        let elapsed = started.elapsed();
        let slow = limit.is_some_and(|l| elapsed >= l);
        let (verdict, detail) = match (&outcome, slow) {
            (Ok(d), false) => ("PASS", d.clone()),
            (Ok(d), true) => ("FAIL", format!("{d}; too slow")),
            (Err(d), _) => ("FAIL", d.clone()),
        };
        failed += usize::from(verdict == "FAIL");
        let limit = limit.map_or(String::new(), |l| format!(" < {:.0} s", l.as_secs_f64()));
        println!("{verdict} {name} ({:.3} s{limit}): {detail}", elapsed.as_secs_f64());
    }
    println!("{} of 8 criteria passed", 8 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
