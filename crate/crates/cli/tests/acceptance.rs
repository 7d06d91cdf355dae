//! One PASS/FAIL line per acceptance criterion. Run with `--nocapture` to
//! see the table.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use mfia::cascade::{analytic_tau_spectrum, generate_cascade, CascadeSpec};
use mfia::formats::encode_pgm;
use mfia::holder::large_deviation_spectrum;
use mfia::moments::{
    chhabra_spectrum, estimate_tau, generalized_dimensions, legendre_spectrum, QGrid, ScaleSet,
};
use mfia::pipeline::{analyze_measure, AnalysisConfig};
use mfia::segment::SpectrumLookup;
use mfia::stats::{anova_groups, fit_lda, loocv, LabeledDataset, LabeledRow, LdaOptions};
use mfia::{BitDepth, GrayImage, MeasureGrid, MeasureKind};

type Check = Result<String, String>;

const C8_WEIGHTS: [f64; 4] = [0.4, 0.3, 0.2, 0.1];

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within_time(t: Instant, limit: Duration) -> Result<Duration, String> {
    let e = t.elapsed();
    ensure(e < limit, || format!("took {e:.2?}, limit {limit:?}"))?;
    Ok(e)
}

fn mfia(args: &[&str]) -> Result<Output, String> {
    let o = Command::new(env!("CARGO_BIN_EXE_mfia"))
        .args(args)
        .env_remove("MFIA_THREADS")
        .output()
        .map_err(|e| e.to_string())?;
    if !o.status.success() {
        return Err(format!("mfia {}: {}", args[0], String::from_utf8_lossy(&o.stderr).trim()));
    }
    Ok(o)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn c8() -> MeasureGrid {
    generate_cascade(&CascadeSpec::new(C8_WEIGHTS, 8)).unwrap()
}

fn monofractal_identity() -> Check {
    let t = Instant::now();
    let m = MeasureGrid::from_values(256, vec![1.0; 256 * 256], MeasureKind::Sum).map_err(|e| e.to_string())?;
    let a = analyze_measure(&m, &AnalysisConfig::default(), "uniform", None).map_err(|e| e.to_string())?;
    let e = within_time(t, Duration::from_secs(2))?;
    let dq_err = a.dq.d().iter().map(|d| (d - 2.0).abs()).fold(0.0, f64::max);
    let ch_err = a
        .chhabra
        .points()
        .iter()
        .map(|p| (p.alpha - 2.0).abs().max((p.f - 2.0).abs()))
        .fold(0.0, f64::max);
    let map_err = a
        .alpha_map
        .alpha()
        .iter()
        .map(|x| x.map_or(f64::INFINITY, |v| (v - 2.0).abs()))
        .fold(0.0, f64::max);
    ensure(dq_err <= 1e-3, || format!("D(q) off by {dq_err}"))?;
    ensure(ch_err <= 1e-3, || format!("Chhabra point off by {ch_err}"))?;
    ensure(map_err <= 1e-6, || format!("alpha map off by {map_err}"))?;
    Ok(format!("max errors D {dq_err:.1e}, (a,f) {ch_err:.1e}, map {map_err:.1e}; {e:.2?}"))
}

fn cascade_tau() -> Check {
    let t = Instant::now();
    let q = QGrid::default();
    let tau = estimate_tau(&c8(), &q, &ScaleSet::default()).map_err(|e| e.to_string())?;
    let e = within_time(t, Duration::from_secs(5))?;
    let an = analytic_tau_spectrum(&C8_WEIGHTS, q.values()).map_err(|e| e.to_string())?;
    let (mut pos, mut neg) = (0.0f64, 0.0f64);
    for (i, &qq) in q.values().iter().enumerate() {
        let err = (tau.tau()[i] - an.tau[i]).abs();
        if qq >= 0.0 {
            pos = pos.max(err);
        } else {
            neg = neg.max(err);
        }
    }
    let t1 = tau.at(1.0).ok_or("q=1 missing")?.abs();
    ensure(pos <= 0.05, || format!("q>=0 error {pos}"))?;
    ensure(neg <= 0.15, || format!("q<0 error {neg}"))?;
    ensure(t1 <= 1e-6, || format!("|tau(1)| = {t1}"))?;
    Ok(format!("max error q>=0 {pos:.4}, q<0 {neg:.4}, |tau(1)| {t1:.1e}; {e:.2?}"))
}

fn cascade_chhabra() -> Check {
    let ch = chhabra_spectrum(&c8(), &QGrid::default(), &ScaleSet::default()).map_err(|e| e.to_string())?;
    let an = analytic_tau_spectrum(&C8_WEIGHTS, &[0.0, 1.0, 2.0]).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for (i, q) in [0.0, 1.0, 2.0].into_iter().enumerate() {
        let p = ch.at_q(q).ok_or(format!("q={q} missing"))?;
        worst = worst.max((p.alpha - an.alpha[i]).abs()).max((p.f - an.f[i]).abs());
    }
    // frozen closed-form values, evaluated independently
    ensure((an.alpha[2] - 1.646).abs() < 1e-3 && (an.f[2] - 1.556).abs() < 1e-3 && (an.f[0] - 2.0).abs() < 1e-12, || {
        "closed forms drifted".into()
    })?;
    ensure(worst <= 0.08, || format!("max error {worst}"))?;
    Ok(format!("max error over q in {{0,1,2}}: {worst:.4}"))
}

fn spectrum_shape() -> Check {
    let tau = estimate_tau(&c8(), &QGrid::default(), &ScaleSet::default()).map_err(|e| e.to_string())?;
    let leg = legendre_spectrum(&tau).map_err(|e| e.to_string())?;
    let mut concave_gap = 0.0f64;
    for w in leg.points().windows(3) {
        let chord = w[0].f + (w[2].f - w[0].f) * (w[1].alpha - w[0].alpha) / (w[2].alpha - w[0].alpha);
        concave_gap = concave_gap.max(chord - w[1].f);
    }
    let at1 = leg.at_q(1.0).ok_or("q=1 missing")?;
    let diag = (at1.f - at1.alpha).abs();
    let peak = leg.max_f().ok_or("empty spectrum")?.f;
    let dq = generalized_dimensions(&tau).map_err(|e| e.to_string())?;
    let rise = dq.d().windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max);
    ensure(concave_gap <= 0.03, || format!("concavity violated by {concave_gap}"))?;
    ensure(diag <= 0.02, || format!("|f(a(1)) - a(1)| = {diag}"))?;
    ensure((peak - 2.0).abs() <= 0.05, || format!("max f = {peak}"))?;
    ensure(rise <= 0.05, || format!("D(q) rises by {rise}"))?;
    Ok(format!("concavity gap {concave_gap:.4}, |f-a| at q=1 {diag:.4}, max f {peak:.4}, D rise {rise:.4}"))
}

fn ld_vs_chhabra() -> Check {
    let m = c8();
    let ch = chhabra_spectrum(&m, &QGrid::default(), &ScaleSet::default()).map_err(|e| e.to_string())?;
    let ld = large_deviation_spectrum(&m, &ScaleSet::default(), 0.05).map_err(|e| e.to_string())?;
    let lookup = SpectrumLookup::new(&ch).map_err(|e| e.to_string())?;
    let diffs: Vec<f64> = ld
        .points()
        .iter()
        .filter_map(|p| lookup.f_at(p.alpha).map(|f| (f - p.f).abs()))
        .collect();
    ensure(!diffs.is_empty(), || "no overlapping support".into())?;
    let worst = diffs.iter().copied().fold(0.0, f64::max);
    ensure(worst <= 0.25, || format!("max |f_LD - f_CH| = {worst}"))?;
    Ok(format!("{} overlapping bins, max difference {worst:.4}", diffs.len()))
}

fn selected_and_dimension(stdout: &[u8]) -> (usize, Option<f64>) {
    let text = String::from_utf8_lossy(stdout);
    let field = |k: &str| {
        text.lines()
            .find_map(|l| l.strip_prefix(k).and_then(|r| r.strip_prefix('\t')).map(str::to_string))
    };
    let n = field("selected").and_then(|v| v.parse().ok()).unwrap_or(0);
    (n, field("box_dimension").and_then(|v| v.parse().ok()))
}

fn imfa_edges(dir: &Path) -> Check {
    let off = 64;
    let square = GrayImage::from_fn(256, 256, BitDepth::Eight, |r, c| {
        if (off..off + 128).contains(&r) && (off..off + 128).contains(&c) {
            200
        } else {
            50
        }
    })
    .map_err(|e| e.to_string())?;
    let uniform = GrayImage::from_fn(256, 256, BitDepth::Eight, |_, _| 90).map_err(|e| e.to_string())?;
    let (sq, un) = (dir.join("square.pgm"), dir.join("uniform.pgm"));
    fs::write(&sq, encode_pgm(&square, &[])).map_err(|e| e.to_string())?;
    fs::write(&un, encode_pgm(&uniform, &[])).map_err(|e| e.to_string())?;

    let mask = dir.join("mask.pgm");
    let o = mfia(&["segment", "--input", s(&sq), "--output", s(&mask), "--f-target", "1.0", "--tol", "0.2"])?;
    let (n, d) = selected_and_dimension(&o.stdout);
    let d = d.ok_or("empty edge mask")?;
    ensure((d - 1.0).abs() <= 0.15, || format!("edge box dimension {d}"))?;

    let o = mfia(&["segment", "--input", s(&un), "--output", s(&mask), "--f-target", "2.0", "--tol", "0.2"])?;
    let (full, _) = selected_and_dimension(&o.stdout);
    ensure(full == 256 * 256, || format!("uniform selected {full} of 65536"))?;
    Ok(format!("edge mask {n} px, box dimension {d:.4}; uniform selects {full}/65536"))
}

fn accuracy_of(report: &str, key: &str) -> Result<f64, String> {
    let line = report
        .lines()
        .find_map(|l| l.strip_prefix(key).and_then(|r| r.strip_prefix('\t')))
        .ok_or(format!("`{key}` missing from report"))?;
    let pct = line.split('%').next().unwrap();
    ensure(pct.split('.').nth(1).map(str::len) == Some(1), || format!("not one decimal: {line}"))?;
    pct.parse::<f64>().map_err(|e| e.to_string())
}

fn synth_class(dir: &Path, weights: &str, seed: u64) -> Result<(), String> {
    mfia(&[
        "synth", "--weights", weights, "--depth", "8", "--shuffle", "--seed", &seed.to_string(), "--count", "50",
        "--prefix", "img", "--output", s(dir),
    ])
    .map(|_| ())
}

fn analyze_and_classify(root: &Path) -> Result<String, String> {
    let csv = root.with_extension("csv");
    mfia(&["analyze", "--input", s(root), "--output", s(&csv)])?;
    let o = mfia(&["classify", "--input", s(&csv)])?;
    Ok(String::from_utf8_lossy(&o.stdout).into_owned())
}

fn classification_protocol(dir: &Path) -> Check {
    let t = Instant::now();
    let classes = root_with(dir, "classes");
    synth_class(&classes.join("strong"), "0.40,0.30,0.20,0.10", 1000)?;
    synth_class(&classes.join("mid"), "0.34,0.28,0.22,0.16", 2000)?;
    synth_class(&classes.join("weak"), "0.28,0.26,0.24,0.22", 3000)?;
    let report = analyze_and_classify(&classes)?;
    let overall = accuracy_of(&report, "accuracy")?;
    let pair = accuracy_of(&report, "strong:weak")?;

    let control = root_with(dir, "control");
    for (name, seed) in [("c1", 4000), ("c2", 5000), ("c3", 6000)] {
        synth_class(&control.join(name), "0.34,0.28,0.22,0.16", seed)?;
    }
    let chance = accuracy_of(&analyze_and_classify(&control)?, "accuracy")?;
    let e = within_time(t, Duration::from_secs(180))?;
    ensure(pair >= 90.0, || format!("well-separated pair {pair}%"))?;
    ensure(overall >= 60.0, || format!("overall {overall}%"))?;
    ensure((chance - 100.0 / 3.0).abs() <= 15.0, || format!("control {chance}%"))?;
    Ok(format!("overall {overall:.1}%, strong:weak {pair:.1}%, control {chance:.1}%; {e:.1?}"))
}

fn root_with(dir: &Path, name: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    fs::create_dir_all(&p).unwrap();
    p
}

fn toy_lda() -> LabeledDataset {
    let rows = [
        ("a0", "A", [0.0, 0.0]),
        ("a1", "A", [0.0, 1.0]),
        ("a2", "A", [1.0, 0.0]),
        ("b0", "B", [5.0, 5.0]),
        ("b1", "B", [5.0, 6.0]),
        ("b2", "B", [6.0, 5.0]),
    ]
    .iter()
    .map(|(id, l, v)| LabeledRow {
        id: id.to_string(),
        label: l.to_string(),
        values: v.to_vec(),
    })
    .collect();
    LabeledDataset::new(vec!["x".into(), "y".into()], rows).unwrap()
}

fn stats_oracles() -> Check {
    let g = |v: &[&[f64]]| v.iter().map(|s| s.to_vec()).collect::<Vec<_>>();
    // F = 6.0, p = 0.049825 (independent hand computation)
    let six = anova_groups(&g(&[&[1.0, 1.0, 3.0, 3.0], &[3.0, 3.0, 5.0, 5.0]])).map_err(|e| e.to_string())?;
    ensure((six.f - 6.0).abs() < 1e-9 && (six.p - 0.0498).abs() <= 1e-3, || {
        format!("F {} p {}", six.f, six.p)
    })?;
    // the groups {1,2,3,4} vs {3,4,5,6} give F = 4.8, p = 0.070988
    let listed = anova_groups(&g(&[&[1.0, 2.0, 3.0, 4.0], &[3.0, 4.0, 5.0, 6.0]])).map_err(|e| e.to_string())?;
    ensure((listed.f - 4.8).abs() < 1e-9 && (listed.p - 0.070988).abs() <= 1e-5, || {
        format!("F {} p {}", listed.f, listed.p)
    })?;

    let ds = toy_lda();
    let opts = LdaOptions::default();
    let cm = loocv(&ds, None, &opts).map_err(|e| e.to_string())?;
    ensure(cm.correct() == 6 && cm.total() == 6, || format!("toy LOOCV {}/{}", cm.correct(), cm.total()))?;

    let mut rev: Vec<LabeledRow> = ds.rows().to_vec();
    rev.reverse();
    let permuted = LabeledDataset::new(ds.feature_names().to_vec(), rev).unwrap();
    ensure(loocv(&permuted, None, &opts).map_err(|e| e.to_string())? == cm, || {
        "row order changed the confusion matrix".into()
    })?;
    let doubled: Vec<LabeledRow> = ds.rows().iter().chain(ds.rows()).cloned().collect();
    let doubled = LabeledDataset::new(ds.feature_names().to_vec(), doubled).unwrap();
    let (m1, m2) = (fit_lda(&ds).unwrap(), fit_lda(&doubled).unwrap());
    let m3 = fit_lda(&permuted).unwrap();
    let bits = |m: &mfia::stats::LdaModel| {
        let mut v: Vec<u64> = m.class_means().iter().flat_map(|c| c.iter().map(|x| x.to_bits())).collect();
        v.extend(m.pooled_cov().iter().map(|x| x.to_bits()));
        v
    };
    ensure(bits(&m1) == bits(&m2), || "duplication changed the model".into())?;
    ensure(bits(&m1) == bits(&m3), || "permutation changed the model".into())?;
    Ok(format!(
        "ANOVA F {:.4} p {:.6}; {{1,2,3,4}}/{{3,4,5,6}} F {:.4} p {:.6}; toy LOOCV 100.0%; invariances bit-exact",
        six.f, six.p, listed.f, listed.p
    ))
}

fn determinism(dir: &Path) -> Check {
    let root = root_with(dir, "det");
    for (k, w) in ["0.40,0.30,0.20,0.10", "0.28,0.26,0.24,0.22"].iter().enumerate() {
        mfia(&[
            "synth", "--weights", w, "--depth", "7", "--shuffle", "--seed", &(k * 100).to_string(), "--count", "6",
            "--prefix", "m", "--output", s(&root.join(format!("class{k}"))),
        ])?;
    }
    let textures = root.join("texture");
    fs::create_dir_all(&textures).unwrap();
    for i in 0..4u32 {
        let img = GrayImage::from_fn(96, 80, BitDepth::Sixteen, |r, c| {
            ((r as u32 * 131 + c as u32 * 71 + i * 977) % 4000 + 10) as u16
        })
        .unwrap();
        fs::write(textures.join(format!("t{i}.pgm")), encode_pgm(&img, &[])).unwrap();
    }
    let mut outs = Vec::new();
    for threads in ["1", "8"] {
        let csv = dir.join(format!("det{threads}.csv"));
        mfia(&["--threads", threads, "analyze", "--input", s(&root), "--output", s(&csv)])?;
        outs.push(fs::read(&csv).map_err(|e| e.to_string())?);
    }
    ensure(outs[0] == outs[1], || "CSV differs between --threads 1 and 8".into())?;
    Ok(format!("16 images, {} identical bytes", outs[0].len()))
}

#[test]
fn acceptance_criteria() {
    let dir = tempfile::tempdir().unwrap();
    let results: Vec<(u32, &str, Check)> = vec![
        (1, "monofractal identity", monofractal_identity()),
        (2, "cascade tau oracle", cascade_tau()),
        (3, "cascade Chhabra oracle", cascade_chhabra()),
        (4, "spectrum shape", spectrum_shape()),
        (5, "large-deviation vs Chhabra", ld_vs_chhabra()),
        (6, "edge extraction", imfa_edges(dir.path())),
        (7, "classification protocol", classification_protocol(dir.path())),
        (8, "statistics oracles", stats_oracles()),
        (9, "determinism across threads", determinism(dir.path())),
    ];
    let mut failed = Vec::new();
    for (n, name, r) in &results {
        match r {
            Ok(detail) => println!("PASS {n} {name}: {detail}"),
            Err(why) => {
                println!("FAIL {n} {name}: {why}");
                failed.push(*n);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
