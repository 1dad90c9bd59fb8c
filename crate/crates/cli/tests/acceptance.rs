//! Acceptance suite: nine release gates, one test per gate, covering
//! gradient correctness, shape algebra, impurity math, split optimality,
//! super-resolution quality, the end-to-end experiment, determinism, grid
//! enumeration, and patch accounting. Each test prints a PASS line with
//! its measured evidence (visible with `--nocapture`).
//!
//! The heavyweight artifacts (a trained 2x model, a full experiment run)
//! are built once and shared between the tests that grade them and the
//! determinism test that repeats them.

use std::collections::HashSet;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tempfile::TempDir;

use perisr::forest::{
    best_split, split_score, ClassCounts, Dataset, ImpurityKind, SplitCandidate,
};
use perisr::imagekit::{bicubic_resize, load_image, psnr, RasterImage};
use perisr::pipeline::{load_manifest, split_person_disjoint, SplitRatios};
use perisr::srcnn::{
    backward, conv_valid_forward, forward, load_model, mse_loss, upscale, ConvLayer,
    ModelMetadata, SrcnnModel, Tensor3,
};

// --- CLI plumbing ---------------------------------------------------------

fn perisr_cmd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_perisr"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn perisr_ok(args: &[&str]) -> Output {
    let out = perisr_cmd(args);
    assert!(
        out.status.success(),
        "perisr {args:?} failed:\n{}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn synth(dir: &Path, subjects: usize, per_subject: usize, seed: u64) -> PathBuf {
    perisr_ok(&[
        "synth",
        "--subjects",
        &subjects.to_string(),
        "--per-subject",
        &per_subject.to_string(),
        "--seed",
        &seed.to_string(),
        "--out",
        dir.to_str().unwrap(),
    ]);
    dir.join("manifest.csv")
}

// --- Shared heavyweight artifacts -----------------------------------------

/// A 2x model trained with the reference configuration (batch 16, 50
/// epochs, learning rate 1e-5, momentum 0.9) on an 80-image corpus.
struct SrArtifacts {
    dir: TempDir,
    manifest: PathBuf,
    model_path: PathBuf,
    pairs_used: usize,
    train_wall: Duration,
}

static SR: OnceLock<SrArtifacts> = OnceLock::new();

const SR_SEED: u64 = 42;

fn train_sr_run(manifest: &Path, out: &Path) -> (usize, Duration) {
    let started = Instant::now();
    let run = perisr_ok(&[
        "train-sr",
        "--manifest",
        manifest.to_str().unwrap(),
        "--scale",
        "2",
        "--seed",
        &SR_SEED.to_string(),
        "--out",
        out.to_str().unwrap(),
    ]);
    let wall = started.elapsed();
    let stderr = String::from_utf8_lossy(&run.stderr);
    let pairs = stderr
        .lines()
        .find(|l| l.starts_with("trained on "))
        .and_then(|l| l.split_whitespace().nth(2))
        .and_then(|n| n.parse::<usize>().ok())
        .expect("trainer reports its pair count");
    (pairs, wall)
}

fn sr() -> &'static SrArtifacts {
    SR.get_or_init(|| {
        let dir = tempfile::tempdir().unwrap();
        let manifest = synth(&dir.path().join("corpus"), 20, 4, SR_SEED);
        let model_path = dir.path().join("run1/sr2x.srcn");
        let (pairs_used, train_wall) = train_sr_run(&manifest, &model_path);
        SrArtifacts { dir, manifest, model_path, pairs_used, train_wall }
    })
}

/// One complete experiment over the default matrix (3 impurity kinds x
/// 4 tree counts x 3 scales x 2 eyes) on a 40-image corpus.
struct ExpArtifacts {
    dir: TempDir,
    out_dir: PathBuf,
    results_text: String,
    wall: Duration,
}

static EXP: OnceLock<ExpArtifacts> = OnceLock::new();

const EXP_SEED: u64 = 45;

fn experiment_run(manifest: &Path, out_dir: &Path) -> Duration {
    let started = Instant::now();
    perisr_ok(&[
        "experiment",
        "--manifest",
        manifest.to_str().unwrap(),
        "--seed",
        &EXP_SEED.to_string(),
        "--patch-budget",
        "1000",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    started.elapsed()
}

fn exp() -> &'static ExpArtifacts {
    EXP.get_or_init(|| {
        let dir = tempfile::tempdir().unwrap();
        let manifest = synth(&dir.path().join("corpus"), 20, 2, EXP_SEED);
        let out_dir = dir.path().join("run1");
        let wall = experiment_run(&manifest, &out_dir);
        let results_text = std::fs::read_to_string(out_dir.join("results.csv")).unwrap();
        ExpArtifacts { dir, out_dir, results_text, wall }
    })
}

// --- Gradient checking -----------------------------------------------------

/// Evaluates perturbed losses layer by layer, reusing the unperturbed
/// activations of every layer before the perturbed one (they cannot be
/// affected by the perturbation). Perturbing a first-layer parameter
/// recomputes only the one output map it feeds.
struct StagedNet<'m> {
    model: &'m SrcnnModel,
    input: Tensor3,
    target: Tensor3,
    post1: Tensor3,
    post2: Tensor3,
}

/// Shifts parameter `index` of a layer, counting weights first, biases
/// after.
fn bump(layer: &mut ConvLayer, index: usize, delta: f64) {
    let nw = layer.weights().len();
    if index < nw {
        layer.weights_mut()[index] += delta;
    } else {
        layer.biases_mut()[index - nw] += delta;
    }
}

impl<'m> StagedNet<'m> {
    fn new(model: &'m SrcnnModel, input: Tensor3, target: Tensor3) -> Self {
        let post1 = conv_valid_forward(&input, &model.layers()[0]).unwrap();
        let post2 = conv_valid_forward(&post1, &model.layers()[1]).unwrap();
        Self { model, input, target, post1, post2 }
    }

    fn loss_from_post2(&self, post2: &Tensor3, layer3: &ConvLayer) -> f64 {
        let out = conv_valid_forward(post2, layer3).unwrap();
        mse_loss(&out, &self.target).unwrap().0
    }

    /// Loss under the shifted parameter, plus the on/off pattern of every
    /// rectifier output the shift can influence. Differing patterns at the
    /// two ends of a difference window mean the window straddles a
    /// rectifier boundary, where a difference quotient stops being a
    /// derivative estimate.
    fn perturbed_loss(&self, layer: usize, index: usize, delta: f64) -> (f64, Vec<bool>) {
        let layers = self.model.layers();
        let active = |t: &Tensor3| t.data().iter().map(|&v| v > 0.0).collect::<Vec<bool>>();
        match layer {
            0 => {
                // Rebuild only the affected output map of layer 1 as a
                // one-filter layer, then splice it over the cached map.
                let l1 = &layers[0];
                let per_map = l1.in_channels() * l1.kernel_h() * l1.kernel_w();
                let nw = l1.weights().len();
                let (map, local) = if index < nw {
                    (index / per_map, Some(index % per_map))
                } else {
                    (index - nw, None)
                };
                let mut weights = l1.weights()[map * per_map..(map + 1) * per_map].to_vec();
                let mut bias = l1.biases()[map];
                match local {
                    Some(i) => weights[i] += delta,
                    None => bias += delta,
                }
                let single = ConvLayer::new(
                    1,
                    l1.in_channels(),
                    l1.kernel_h(),
                    l1.kernel_w(),
                    weights,
                    vec![bias],
                    l1.activation(),
                )
                .unwrap();
                let map_out = conv_valid_forward(&self.input, &single).unwrap();
                let mut post1 = self.post1.clone();
                let (_, h, w) = post1.shape();
                post1.data_mut()[map * h * w..(map + 1) * h * w].copy_from_slice(map_out.data());
                let post2 = conv_valid_forward(&post1, &layers[1]).unwrap();
                let mut pattern = active(&map_out);
                pattern.extend(active(&post2));
                (self.loss_from_post2(&post2, &layers[2]), pattern)
            }
            1 => {
                let mut l2 = layers[1].clone();
                bump(&mut l2, index, delta);
                let post2 = conv_valid_forward(&self.post1, &l2).unwrap();
                let pattern = active(&post2);
                (self.loss_from_post2(&post2, &layers[2]), pattern)
            }
            _ => {
                // The output layer is linear, so the loss is smooth in its
                // parameters; no pattern to track.
                let mut l3 = layers[2].clone();
                bump(&mut l3, index, delta);
                (self.loss_from_post2(&self.post2, &l3), Vec::new())
            }
        }
    }

    /// Central difference quotient over `[param - eps, param + eps]`, and
    /// whether that window straddles a rectifier boundary.
    fn central_difference(&self, layer: usize, index: usize, eps: f64) -> (f64, bool) {
        let (up, up_pattern) = self.perturbed_loss(layer, index, eps);
        let (down, down_pattern) = self.perturbed_loss(layer, index, -eps);
        ((up - down) / (2.0 * eps), up_pattern != down_pattern)
    }
}

/// Loss of a freshly assembled model with one shifted parameter; the slow
/// reference used to spot-check the staged evaluator.
fn full_forward_loss(
    model: &SrcnnModel,
    input: &Tensor3,
    target: &Tensor3,
    layer: usize,
    index: usize,
    delta: f64,
) -> f64 {
    let mut layers = model.layers().clone();
    bump(&mut layers[layer], index, delta);
    let [l1, l2, l3] = layers;
    let perturbed = SrcnnModel::from_layers(
        model.channels(),
        l1,
        l2,
        l3,
        ModelMetadata { seed: 0, epochs: 0, final_loss: 0.0 },
    )
    .unwrap();
    let (out, _) = forward(&perturbed, input).unwrap();
    mse_loss(&out, target).unwrap().0
}

fn random_tensor(rng: &mut ChaCha8Rng, c: usize, h: usize, w: usize) -> Tensor3 {
    let data = (0..c * h * w).map(|_| rng.gen_range(0.05..0.95)).collect();
    Tensor3::from_data(c, h, w, data).unwrap()
}

#[test]
fn a1_every_parameter_gradient_matches_central_differences() {
    let started = Instant::now();
    let eps = 1e-5;
    let mut rng = ChaCha8Rng::seed_from_u64(314);
    let mut worst_rel: f64 = 0.0;
    let mut total_params = 0usize;
    let mut below_floor = 0usize;
    let mut kink_windows = 0usize;

    for i in 0..20u64 {
        let channels = if i % 2 == 0 { 1 } else { 3 };
        let model = SrcnnModel::random(channels, 1000 + 37 * i, 0.05).unwrap();
        let input = random_tensor(&mut rng, channels, 15, 15);
        let target = random_tensor(&mut rng, channels, 3, 3);

        let (out, cache) = forward(&model, &input).unwrap();
        let (loss, loss_grad) = mse_loss(&out, &target).unwrap();
        let grads = backward(&model, &cache, &loss_grad).unwrap();

        let staged = StagedNet::new(&model, input.clone(), target.clone());
        let base = staged.loss_from_post2(&staged.post2, &model.layers()[2]);
        assert!(
            (base - loss).abs() <= 1e-12 * loss.abs().max(1.0),
            "staged evaluator disagrees on the unperturbed loss"
        );

        let mut largest_grad: f64 = 0.0;
        for layer in 0..3 {
            let n = model.layers()[layer].weights().len() + model.layers()[layer].biases().len();
            for index in 0..n {
                let (mut fd, mut straddle) = staged.central_difference(layer, index, eps);

                // Spot-check the staged shortcut against a full forward
                // pass on a sweep of parameters.
                if index % 101 == 0 {
                    let up_full = full_forward_loss(&model, &input, &target, layer, index, eps);
                    let down_full = full_forward_loss(&model, &input, &target, layer, index, -eps);
                    let fd_full = (up_full - down_full) / (2.0 * eps);
                    assert!(
                        (fd - fd_full).abs() <= 1e-6 * fd.abs().max(fd_full.abs()).max(1e-6),
                        "staged oracle diverges from full forward: {fd} vs {fd_full}"
                    );
                }

                let nw = model.layers()[layer].weights().len();
                let analytic = if index < nw {
                    grads.layers()[layer].weights()[index]
                } else {
                    grads.layers()[layer].biases()[index - nw]
                };
                // The denominator floor absorbs the difference quotient's
                // own noise: the loss carries ~1e-16 relative rounding, so
                // each quotient carries ~1e-11 absolute noise at this
                // epsilon. Gradients below the floor are thereby still
                // compared at absolute precision 1e-10.
                let rel_to = |fd: f64| (fd - analytic).abs() / fd.abs().max(analytic.abs()).max(1e-6);
                let mut rel = rel_to(fd);

                // When the difference window provably straddles a rectifier
                // boundary, the quotient measures two different linear
                // pieces at once and is not a derivative estimate. Shrink
                // the window for just those parameters until it sits on a
                // single smooth piece, then hold the same bar.
                let mut used_eps = eps;
                if rel >= 1e-4 && straddle {
                    kink_windows += 1;
                    while rel >= 1e-4 && straddle && used_eps > 1e-9 {
                        used_eps /= 10.0;
                        let (next_fd, next_straddle) =
                            staged.central_difference(layer, index, used_eps);
                        fd = next_fd;
                        straddle = next_straddle;
                        rel = rel_to(fd);
                    }
                }

                if fd.abs().max(analytic.abs()) < 1e-6 {
                    below_floor += 1;
                }
                assert!(
                    rel < 1e-4,
                    "model {i} layer {layer} param {index}: analytic {analytic}, \
                     finite difference {fd} (eps {used_eps:.0e}, straddles rectifier \
                     boundary: {straddle}), relative error {rel}"
                );
                worst_rel = worst_rel.max(rel);
                largest_grad = largest_grad.max(analytic.abs());
                total_params += 1;
            }
        }
        assert!(
            largest_grad > 1e-3,
            "model {i}: gradients are suspiciously small (largest {largest_grad:.3e})"
        );
    }

    let wall = started.elapsed();
    assert!(wall < Duration::from_secs(120), "gradient check took {wall:?}");
    println!(
        "PASS: {total_params} gradients across 20 models match central differences \
         (worst relative error {worst_rel:.3e}, {below_floor} parameters under the \
         1e-6 noise floor, {kink_windows} windows shrunk at rectifier boundaries, \
         {wall:.1?})"
    );
}

// --- Shape algebra ----------------------------------------------------------

#[test]
fn a2_forward_shrinks_by_twelve_and_upscale_multiplies_exactly() {
    let mut rng = ChaCha8Rng::seed_from_u64(2718);
    for i in 0..50u64 {
        let channels = if i % 2 == 0 { 1 } else { 3 };
        let h = rng.gen_range(13..=44);
        let w = rng.gen_range(13..=44);
        let model = SrcnnModel::random(channels, 500 + i, 0.05).unwrap();
        let input = random_tensor(&mut rng, channels, h, w);
        let (out, _) = forward(&model, &input).unwrap();
        assert_eq!(out.shape(), (channels, h - 12, w - 12), "input {h}x{w}");
    }

    let model = SrcnnModel::random(1, 7, 0.05).unwrap();
    for (h, w) in [(10usize, 14usize), (21, 17), (150, 150)] {
        let data = (0..h * w).map(|p| (p % 97) as f64 / 96.0).collect();
        let img = RasterImage::from_data(h, w, 1, data).unwrap();
        for scale in [2usize, 3] {
            let big = upscale(&model, &img, scale).unwrap();
            assert_eq!(
                (big.height(), big.width()),
                (scale * h, scale * w),
                "{h}x{w} at {scale}x"
            );
        }
    }

    println!(
        "PASS: 50 random forward shapes shrink by 12 per axis; upscale yields exact \
         multiples including 150->300 and 150->450"
    );
}

// --- Impurity formulas ------------------------------------------------------

#[test]
fn a3_impurity_values_match_direct_formulas_and_bounds() {
    use perisr::forest::{deviance_impurity, gini_impurity, twoing_score};

    let mut rng = ChaCha8Rng::seed_from_u64(161803);
    for _ in 0..1000 {
        let k = rng.gen_range(2..=5usize);
        let counts: Vec<u64> = loop {
            let c: Vec<u64> = (0..k).map(|_| rng.gen_range(0..=40u64)).collect();
            if c.iter().sum::<u64>() > 0 {
                break c;
            }
        };
        let total: u64 = counts.iter().sum();
        let node = ClassCounts::from_counts(counts.clone());

        let mut direct_gini = 1.0;
        let mut direct_dev = 0.0;
        for &c in &counts {
            let p = c as f64 / total as f64;
            direct_gini -= p * p;
            if c > 0 {
                direct_dev -= p * p.ln();
            }
        }

        let gini = gini_impurity(&node).unwrap();
        let dev = deviance_impurity(&node).unwrap();
        assert!((gini - direct_gini).abs() <= 1e-12, "{counts:?}: {gini} vs {direct_gini}");
        assert!((dev - direct_dev).abs() <= 1e-12, "{counts:?}: {dev} vs {direct_dev}");
        assert!((0.0..=1.0 - 1.0 / k as f64 + 1e-12).contains(&gini), "{counts:?}: gini {gini}");
        assert!((0.0..=(k as f64).ln() + 1e-12).contains(&dev), "{counts:?}: deviance {dev}");
    }

    // Twoing stays within [0, 1] for binary splits.
    for _ in 0..1000 {
        let (left, right) = loop {
            let l: Vec<u64> = (0..2).map(|_| rng.gen_range(0..=40u64)).collect();
            let r: Vec<u64> = (0..2).map(|_| rng.gen_range(0..=40u64)).collect();
            if l.iter().sum::<u64>() + r.iter().sum::<u64>() > 0 {
                break (l, r);
            }
        };
        let tw = twoing_score(&ClassCounts::from_counts(left.clone()), &ClassCounts::from_counts(right.clone()))
            .unwrap();
        assert!(
            (0.0..=1.0 + 1e-12).contains(&tw),
            "twoing out of range for {left:?} | {right:?}: {tw}"
        );
    }

    // A perfectly balanced separating split scores exactly 1.
    for _ in 0..20 {
        let n = rng.gen_range(1..=40u64);
        let tw = twoing_score(
            &ClassCounts::from_counts(vec![n, 0]),
            &ClassCounts::from_counts(vec![0, n]),
        )
        .unwrap();
        assert_eq!(tw, 1.0, "perfect split of {n}+{n} must score exactly 1");
    }

    println!(
        "PASS: 1000 random count vectors match the closed-form gini and deviance \
         within 1e-12 and respect their bounds; twoing is bounded and exact on the \
         perfect balanced split"
    );
}

// --- Split optimality -------------------------------------------------------

/// Brute-force reference: every feature, every midpoint between distinct
/// sorted values, tallied by a full scan, scored with the public scorer,
/// tie-broken toward (higher score, lower feature, lower threshold).
fn exhaustive_best_split(data: &Dataset, kind: ImpurityKind) -> Option<SplitCandidate> {
    let n = data.n_samples();
    if n < 2 {
        return None;
    }
    let all: Vec<usize> = (0..n).collect();
    let parent = data.tally(&all);
    let mut best: Option<SplitCandidate> = None;
    for feature in 0..data.n_features() {
        let mut values: Vec<f64> = (0..n).map(|i| data.value(i, feature)).collect();
        values.sort_by(f64::total_cmp);
        values.dedup();
        for pair in values.windows(2) {
            let threshold = 0.5 * (pair[0] + pair[1]);
            let mut left = vec![0u64; data.n_classes()];
            let mut right = vec![0u64; data.n_classes()];
            for i in 0..n {
                if data.value(i, feature) < threshold {
                    left[data.label(i)] += 1;
                } else {
                    right[data.label(i)] += 1;
                }
            }
            let score = split_score(
                kind,
                &parent,
                &ClassCounts::from_counts(left),
                &ClassCounts::from_counts(right),
            )
            .unwrap();
            let wins = match &best {
                None => true,
                Some(b) => {
                    score > b.score
                        || (score == b.score
                            && (feature < b.feature
                                || (feature == b.feature && threshold < b.threshold)))
                }
            };
            if wins {
                best = Some(SplitCandidate { feature, threshold, score });
            }
        }
    }
    best.filter(|b| b.score > 0.0)
}

#[test]
fn a4_best_split_agrees_with_exhaustive_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(577215);
    let lattice = [0.0, 0.25, 0.5, 0.75, 1.0];
    let mut splits_found = 0usize;
    let mut none_agreed = 0usize;

    for case in 0..200 {
        let n = rng.gen_range(2..=12usize);
        let d = rng.gen_range(1..=3usize);
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..d).map(|_| lattice[rng.gen_range(0..lattice.len())]).collect())
            .collect();
        let labels: Vec<usize> = (0..n).map(|_| usize::from(rng.gen_bool(0.5))).collect();
        let data = Dataset::from_rows(&rows, &labels).unwrap();
        let indices: Vec<usize> = (0..n).collect();
        let features: Vec<usize> = (0..d).collect();

        for kind in ImpurityKind::ALL {
            let got = best_split(&data, &indices, &features, kind);
            let want = exhaustive_best_split(&data, kind);
            match (got, want) {
                (None, None) => none_agreed += 1,
                (Some(g), Some(w)) => {
                    assert_eq!(g.feature, w.feature, "case {case} {kind:?}: feature");
                    assert_eq!(
                        g.threshold.to_bits(),
                        w.threshold.to_bits(),
                        "case {case} {kind:?}: threshold {} vs {}",
                        g.threshold,
                        w.threshold
                    );
                    assert_eq!(
                        g.score.to_bits(),
                        w.score.to_bits(),
                        "case {case} {kind:?}: score {} vs {}",
                        g.score,
                        w.score
                    );
                    splits_found += 1;
                }
                (got, want) => {
                    panic!("case {case} {kind:?}: implementation {got:?}, reference {want:?}")
                }
            }
        }
    }

    println!(
        "PASS: 200 random datasets x 3 criteria agree with exhaustive search \
         bit for bit ({splits_found} splits, {none_agreed} agreed-empty results)"
    );
}

// --- Super-resolution quality -----------------------------------------------

#[test]
fn a5_super_resolution_beats_bicubic_on_held_out_subjects() {
    let art = sr();
    assert!(
        art.pairs_used >= 5000,
        "reference training must cover at least 5000 patch pairs, used {}",
        art.pairs_used
    );
    assert!(
        art.train_wall < Duration::from_secs(30 * 60),
        "training took {:?}",
        art.train_wall
    );

    let loss_csv = std::fs::read_to_string(art.model_path.with_extension("loss.csv")).unwrap();
    assert_eq!(loss_csv.lines().count(), 51, "header plus one loss row per epoch");

    let model = load_model(&art.model_path).unwrap();
    let entries = load_manifest(&art.manifest).unwrap();
    let split = split_person_disjoint(&entries, SplitRatios::default(), SR_SEED).unwrap();
    assert!(!split.test.is_empty());

    let (mut bicubic_sum, mut sr_sum) = (0.0, 0.0);
    for entry in &split.test {
        let hr = load_image(&entry.image_path).unwrap();
        let small = bicubic_resize(&hr, hr.height() / 2, hr.width() / 2).unwrap();
        let bicubic_only = bicubic_resize(&small, hr.height(), hr.width()).unwrap();
        let restored = upscale(&model, &small, 2).unwrap();
        bicubic_sum += psnr(&bicubic_only, &hr).unwrap();
        sr_sum += psnr(&restored, &hr).unwrap();
    }
    let n = split.test.len() as f64;
    let (bicubic_db, sr_db) = (bicubic_sum / n, sr_sum / n);
    let margin = sr_db - bicubic_db;
    assert!(
        margin >= 0.3,
        "mean test PSNR {sr_db:.3} dB vs bicubic {bicubic_db:.3} dB: margin {margin:.3} < 0.3"
    );

    println!(
        "PASS: {} pairs, 50 epochs in {:.0?}; mean test PSNR {sr_db:.3} dB vs bicubic \
         {bicubic_db:.3} dB (margin +{margin:.3} dB)",
        art.pairs_used, art.train_wall
    );
}

// --- End-to-end experiment ---------------------------------------------------

#[test]
fn a6_full_experiment_emits_complete_table_and_separates_classes() {
    let art = exp();
    assert!(
        art.wall < Duration::from_secs(20 * 60),
        "experiment took {:?}",
        art.wall
    );

    let lines: Vec<&str> = art.results_text.lines().collect();
    assert_eq!(lines[0], "kind,trees,scale,eye,accuracy_pct");
    assert_eq!(lines.len(), 73, "header plus all 72 cells");

    // Rows arrive in canonical order and cover the whole matrix.
    let mut row = 1;
    let mut tdc_scale1 = Vec::new();
    for kind in ["gdi", "tr", "tdc"] {
        for trees in [100, 300, 500, 1000] {
            for scale in [1, 2, 3] {
                for eye in ["L", "R"] {
                    let prefix = format!("{kind},{trees},{scale},{eye},");
                    let line = lines[row];
                    assert!(
                        line.starts_with(&prefix),
                        "row {row}: expected {prefix}.., got {line}"
                    );
                    let acc: f64 = line[prefix.len()..].parse().unwrap();
                    assert!((0.0..=100.0).contains(&acc));
                    if kind == "tdc" && trees == 1000 && scale == 1 {
                        tdc_scale1.push(acc);
                    }
                    row += 1;
                }
            }
        }
    }

    let table = std::fs::read_to_string(art.out_dir.join("table.txt")).unwrap();
    let table_lines: Vec<&str> = table.lines().collect();
    assert_eq!(table_lines.len(), 13, "header plus 12 rows");
    for data_line in &table_lines[1..] {
        let tokens: Vec<&str> = data_line.split_whitespace().collect();
        assert_eq!(tokens.len(), 8, "kind, trees, and six accuracy columns: {data_line}");
        tokens[2..].iter().for_each(|t| {
            t.parse::<f64>().unwrap();
        });
    }

    assert_eq!(tdc_scale1.len(), 2, "one deviance/1000-tree cell per eye at native scale");
    for (eye, acc) in ["L", "R"].iter().zip(&tdc_scale1) {
        assert!(
            *acc >= 90.0,
            "deviance with 1000 trees at native scale, eye {eye}: {acc:.2}% < 90%"
        );
    }

    println!(
        "PASS: 72 cells in {:.0?}, 12x6 table complete, deviance/1000-tree native-scale \
         accuracy L {:.2}% R {:.2}%",
        art.wall, tdc_scale1[0], tdc_scale1[1]
    );
}

// --- Determinism --------------------------------------------------------------

#[test]
fn a7_identical_seeds_reproduce_model_and_results_bytes() {
    let sr_art = sr();
    let manifest2 = synth(&sr_art.dir.path().join("corpus-repeat"), 20, 4, SR_SEED);
    let model2 = sr_art.dir.path().join("run2/sr2x.srcn");
    let (pairs2, _) = train_sr_run(&manifest2, &model2);
    assert_eq!(pairs2, sr_art.pairs_used);
    assert_eq!(
        std::fs::read(&sr_art.model_path).unwrap(),
        std::fs::read(&model2).unwrap(),
        "repeated training must rebuild the model byte for byte"
    );
    assert_eq!(
        std::fs::read(sr_art.model_path.with_extension("loss.csv")).unwrap(),
        std::fs::read(model2.with_extension("loss.csv")).unwrap(),
        "loss histories must match byte for byte"
    );

    let exp_art = exp();
    let exp_manifest2 = synth(&exp_art.dir.path().join("corpus-repeat"), 20, 2, EXP_SEED);
    let out2 = exp_art.dir.path().join("run2");
    experiment_run(&exp_manifest2, &out2);
    assert_eq!(
        exp_art.results_text.as_bytes(),
        &std::fs::read(out2.join("results.csv")).unwrap()[..],
        "repeated experiment must rebuild results.csv byte for byte"
    );
    for model in ["models/sr2x.srcn", "models/sr3x.srcn"] {
        assert_eq!(
            std::fs::read(exp_art.out_dir.join(model)).unwrap(),
            std::fs::read(out2.join(model)).unwrap(),
            "{model} must match byte for byte"
        );
    }

    println!(
        "PASS: repeated runs with the same seeds rebuilt the trained model, its loss \
         history, both experiment models, and results.csv byte for byte"
    );
}

// --- Grid enumeration -----------------------------------------------------------

#[test]
fn a8_grid_search_enumerates_all_2700_configurations() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = synth(&dir.path().join("corpus"), 4, 2, 44);
    let ledger_path = dir.path().join("grid/ledger.csv");
    let started = Instant::now();
    perisr_ok(&[
        "grid-search",
        "--manifest",
        manifest.to_str().unwrap(),
        "--seed",
        "44",
        "--limit",
        "0",
        "--patch-budget",
        "1",
        "--out",
        ledger_path.to_str().unwrap(),
    ]);
    let wall = started.elapsed();

    let ledger = std::fs::read_to_string(&ledger_path).unwrap();
    let lines: Vec<&str> = ledger.lines().collect();
    assert_eq!(lines[0], "batch,epochs,lr,momentum,val_mse");
    assert_eq!(lines.len(), 2701, "header plus one row per configuration");

    let mut configs = HashSet::new();
    let mut has_reference_point = false;
    for line in &lines[1..] {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 5, "malformed ledger row: {line}");
        let batch: usize = fields[0].parse().unwrap();
        let epochs: usize = fields[1].parse().unwrap();
        let lr: f64 = fields[2].parse().unwrap();
        let momentum: f64 = fields[3].parse().unwrap();
        fields[4].parse::<f64>().unwrap();
        configs.insert((batch, epochs, lr.to_bits(), momentum.to_bits()));
        if batch == 16 && epochs == 50 && lr == 1e-5 && momentum == 0.9 {
            has_reference_point = true;
        }
    }
    assert_eq!(configs.len(), 2700, "all enumerated configurations are distinct");
    assert!(
        has_reference_point,
        "the grid must contain batch 16, 50 epochs, lr 1e-5, momentum 0.9"
    );
    assert!(ledger_path.with_extension("best.json").exists());

    println!("PASS: grid search scored 2700 distinct configurations (contains the \
         reference point 16/50/1e-5/0.9) in {wall:.0?}");
}

// --- Patch accounting -------------------------------------------------------------

#[test]
fn a9_patch_grid_and_budget_counts_are_exact() {
    use perisr::imagekit::{extract_patch_pairs, PATCH_STRIDE};
    use perisr::pipeline::{run_sr_training, subsample_plan, DEFAULT_PATCH_BUDGET};
    use perisr::srcnn::TrainConfig;

    let data = (0..150 * 150).map(|p| (p % 251) as f64 / 250.0).collect();
    let img = RasterImage::from_data(150, 150, 1, data).unwrap();
    let pairs = extract_patch_pairs(&img, 2, PATCH_STRIDE, "t").unwrap();
    assert_eq!(pairs.len(), 81, "a 150x150 image yields a 9x9 patch grid");

    assert_eq!(DEFAULT_PATCH_BUDGET, 100_000);
    let plan = subsample_plan(120_000, DEFAULT_PATCH_BUDGET, 7);
    assert_eq!(plan.len(), 100_000, "the cap subsamples exactly to budget");
    assert!(plan.windows(2).all(|w| w[0] < w[1]), "plan is sorted and duplicate-free");
    assert!(*plan.last().unwrap() < 120_000);

    // The cap is live end to end: two images offer 162 pairs, the budget
    // keeps exactly 100.
    let other = RasterImage::from_data(
        150,
        150,
        1,
        (0..150 * 150).map(|p| (p % 127) as f64 / 126.0).collect(),
    )
    .unwrap();
    let config = TrainConfig {
        batch_size: 16,
        epochs: 1,
        learning_rate: 1e-5,
        momentum: 0.9,
        seed: 1,
    };
    let report = run_sr_training(&[img, other], 2, &config, 100).unwrap();
    assert_eq!(report.pairs_used, 100);
    assert_eq!(report.loss_history.len(), 1);

    println!(
        "PASS: 150x150 -> 81 pairs at patch 25 / stride 15; 120000 -> 100000 under \
         the default budget; a live training run kept exactly 100 of 162"
    );
}
