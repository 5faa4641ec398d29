//! Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
//! criterion fails. Runs without the libtest harness so the lines always
//! reach the terminal.

use std::collections::BTreeSet;
use std::f64::consts::LN_2;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use lsm::config::{RunConfig, WeightsJson};
use lsm::experiment::{self, ablation_configs, SweepPlan};
use lsm::format::{load_bundle, load_manifest, load_model, ModelConfigJson};
use lsm::records::read_records;
use lsm::report::{aggregate, markdown_table, mean_std, svg_plot};
use lsm_core::autodiff::{finite_diff_check, Graph, OpKind};
use lsm_core::data::{gen_sit_dataset, split_counts, split_semi_supervised, swap_params, SitParams};
use lsm_core::metrics::{mean_miou, miou, nrmse};
use lsm_core::model::{
    confusion_loss, domain_classifier_loss, losses, Batch, DomainSpec, LossKind, LossWeights, LsmModel, ModelConfig, Net, Session, Term,
};
use lsm_core::train::{evaluate, fit, ioda_pretrain, AblationId, EarlyStopping, Monitor, PretrainConfig, StopReason, TaskMetric, TrainConfig};
use lsm_core::{rng, Tensor};
use rand::Rng as _;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e2s<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn random(shape: &[usize], lo: f64, hi: f64, r: &mut rng::Rng) -> Tensor {
    let n: usize = shape.iter().product();
    Tensor::new(shape.to_vec(), (0..n).map(|_| r.gen_range(lo..hi)).collect()).unwrap()
}

fn one_hot(rows: usize, pixels: usize, classes: usize, r: &mut rng::Rng) -> Tensor {
    let mut d = vec![0.0; rows * pixels * classes];
    for p in 0..rows * pixels {
        d[p * classes + r.gen_range(0..classes)] = 1.0;
    }
    Tensor::new(vec![rows, pixels * classes], d).unwrap()
}

fn tiny_model(loss: LossKind, seed: u64, randomize: bool) -> LsmModel {
    let mut m = LsmModel::new(
        DomainSpec::grayscale_image("image", 3),
        DomainSpec::class_map("mask", 3, 3, loss),
        ModelConfig {
            latent_dim: 3,
            encoder_hidden: vec![4],
            link_hidden_layers: 1,
            classifier_hidden: vec![3],
        },
        seed,
    )
    .unwrap();
    if randomize {
        let mut r = rng::stream(seed, 11);
        let p: Vec<f64> = (0..m.param_count()).map(|_| r.gen_range(-0.8..0.8)).collect();
        m.set_flat_params(&Net::ALL, &p).unwrap();
    }
    m
}

fn tiny_batches(seed: u64) -> Vec<Batch> {
    let mut r = rng::stream(seed, 12);
    vec![
        Batch::paired(random(&[3, 9], 0.0, 1.0, &mut r), one_hot(3, 9, 3, &mut r)).unwrap(),
        Batch::only_x(random(&[2, 9], 0.0, 1.0, &mut r)).unwrap(),
        Batch::only_y(one_hot(2, 9, 3, &mut r)).unwrap(),
    ]
}

const GENERATORS: [Net; 6] = [Net::EncoderX, Net::EncoderY, Net::DecoderX, Net::DecoderY, Net::LinkXY, Net::LinkYX];
const CLASSIFIERS: [Net; 2] = [Net::ClassifierX, Net::ClassifierY];

// ---------------------------------------------------------------- 1

fn op_error(kind: &OpKind, shapes: &[&[usize]], range: (f64, f64), seed: u64) -> Result<f64, String> {
    let mut r = rng::stream(seed, 1);
    let inputs: Vec<Tensor> = shapes.iter().map(|s| random(s, range.0, range.1, &mut r)).collect();
    let flat: Vec<f64> = inputs.iter().flat_map(|t| t.data().to_vec()).collect();
    let cseed: u64 = r.gen();
    let f = |p: &[f64]| {
        let mut g = Graph::new();
        let mut ids = Vec::new();
        let mut off = 0;
        for s in shapes {
            let n: usize = s.iter().product();
            ids.push(g.leaf(Tensor::new(s.to_vec(), p[off..off + n].to_vec())?));
            off += n;
        }
        let out = g.apply(kind.clone(), &ids)?;
        let shape = g.shape(out).to_vec();
        let c = g.constant(random(&shape, -1.0, 1.0, &mut rng::stream(cseed, 2)));
        let prod = g.mul(out, c)?;
        let loss = g.sum(prod)?;
        let grads = g.backward(loss)?;
        let v = g.scalar(loss).expect("scalar");
        Ok((v, ids.iter().flat_map(|&i| grads.get(i).expect("leaf grad").to_vec()).collect()))
    };
    let rep = finite_diff_check(f, &flat, 1e-6).map_err(e2s)?;
    ensure(rep.checked > 0, || format!("{kind:?}: nothing checked"))?;
    Ok(rep.max_rel_error)
}

#[derive(Clone, Copy, Debug)]
enum Objective {
    Term(Term),
    Final,
    Classifiers,
}

fn loss_error(loss: LossKind, obj: Objective, seed: u64) -> Result<f64, String> {
    let model = tiny_model(loss, seed, true);
    let batches = tiny_batches(seed);
    let w = LossWeights {
        recon_x: 0.7,
        recon_y: 1.3,
        sup_xy: 1.1,
        sup_yx: 0.9,
        distance: 0.6,
        confusion: 0.8,
    };
    let nets: &[Net] = match obj {
        Objective::Term(t) if t.is_adversarial() => &CLASSIFIERS,
        Objective::Classifiers => &CLASSIFIERS,
        _ => &GENERATORS,
    };
    let sizes: Vec<usize> = nets.iter().flat_map(|&n| model.net(n).params().map(Tensor::len).collect::<Vec<_>>()).collect();
    let f = |p: &[f64]| {
        let mut m = model.clone();
        m.set_flat_params(nets, p)?;
        let mut s = Session::new(&m, true);
        let step = s.build_step(&w, &batches, true)?;
        let node = match obj {
            Objective::Term(t) => step.term(t).expect("built"),
            Objective::Final => step.main.expect("built"),
            Objective::Classifiers => step.adversarial.expect("built"),
        };
        let mut grads = s.graph.backward(node)?;
        let v = s.graph.scalar(node).expect("scalar");
        let flat: Vec<f64> = s
            .collect_grads(&mut grads, nets)
            .into_iter()
            .zip(&sizes)
            .flat_map(|(g, &n)| g.unwrap_or_else(|| vec![0.0; n]))
            .collect();
        Ok((v, flat))
    };
    let rep = finite_diff_check(f, &model.flat_params(nets), 1e-5).map_err(e2s)?;
    Ok(rep.max_rel_error)
}

fn criterion_1() -> Outcome {
    let t0 = Instant::now();
    let ops: Vec<(OpKind, Vec<&[usize]>, (f64, f64))> = vec![
        (OpKind::MatMul, vec![&[3, 4], &[4, 2]], (-1.0, 1.0)),
        (OpKind::MatMulTransB, vec![&[3, 4], &[5, 4]], (-1.0, 1.0)),
        (OpKind::AddBroadcast, vec![&[3, 4], &[4]], (-1.0, 1.0)),
        (OpKind::Sub, vec![&[2, 3], &[2, 3]], (-1.0, 1.0)),
        (OpKind::Mul, vec![&[2, 3], &[2, 3]], (-1.0, 1.0)),
        (OpKind::Affine { scale: 2.5, shift: -0.4 }, vec![&[5]], (-1.0, 1.0)),
        (OpKind::Relu, vec![&[2, 4]], (-1.0, 1.0)),
        (OpKind::Sigmoid, vec![&[2, 4]], (-4.0, 4.0)),
        (OpKind::Tanh, vec![&[2, 4]], (-2.0, 2.0)),
        (OpKind::Reshape(vec![4, 2]), vec![&[2, 4]], (-1.0, 1.0)),
        (OpKind::Concat { axis: 1 }, vec![&[2, 3], &[2, 2]], (-1.0, 1.0)),
        (OpKind::Softmax, vec![&[3, 4]], (-2.0, 2.0)),
        (OpKind::Mean, vec![&[3, 4]], (-1.0, 1.0)),
        (OpKind::Sum, vec![&[3, 4]], (-1.0, 1.0)),
        (OpKind::Abs, vec![&[2, 4]], (-1.0, 1.0)),
        (OpKind::Square, vec![&[2, 4]], (-1.0, 1.0)),
        (OpKind::Log, vec![&[2, 4]], (0.05, 2.0)),
    ];
    let mut worst: f64 = 0.0;
    for seed in 0..10 {
        for (kind, shapes, range) in &ops {
            let e = op_error(kind, shapes, *range, seed)?;
            ensure(e < 1e-4, || format!("{kind:?} seed {seed}: relative error {e:.3e}"))?;
            worst = worst.max(e);
        }
    }
    let mut objectives: Vec<Objective> = Term::ALL.iter().map(|&t| Objective::Term(t)).collect();
    objectives.extend([Objective::Final, Objective::Classifiers]);
    for seed in 0..4 {
        for loss in [LossKind::Bce, LossKind::Ce] {
            for &obj in &objectives {
                let e = loss_error(loss, obj, 100 + seed)?;
                ensure(e < 1e-4, || format!("{obj:?} {loss:?} seed {seed}: relative error {e:.3e}"))?;
                worst = worst.max(e);
            }
        }
    }
    let el = t0.elapsed();
    ensure(el < Duration::from_secs(120), || format!("took {el:.1?}"))?;
    Ok(format!("{} op kinds, {} objectives, worst relative error {worst:.2e}, {el:.1?}", ops.len(), objectives.len()))
}

// ---------------------------------------------------------------- 2

fn zero_classifiers(m: &mut LsmModel) {
    for p in m.params_mut(&CLASSIFIERS) {
        p.data_mut().iter_mut().for_each(|v| *v = 0.0);
    }
}

fn criterion_2() -> Outcome {
    let two_ln2 = 2.0 * LN_2;
    let b = tiny_batches(3);
    let mut worst_dc: f64 = 0.0;
    for seed in 0..20 {
        let mut m = tiny_model(LossKind::Bce, seed, true);
        zero_classifiers(&mut m);
        let (dx, dy) = domain_classifier_loss(&m, &b[1], &b[2]).map_err(e2s)?;
        let (cx, cy) = confusion_loss(&m, &b[1], &b[2]).map_err(e2s)?;
        for v in [dx, dy] {
            worst_dc = worst_dc.max((v - two_ln2).abs());
        }
        for v in [cx, cy] {
            ensure((v - two_ln2).abs() < 1e-12, || format!("confusion at uniform output {v}"))?;
        }
    }
    ensure(worst_dc < 1e-9, || format!("DC loss at uniform output off by {worst_dc:.2e}"))?;
    // Away from 1/2 the confusion loss is strictly above its minimum.
    let mut min_gap = f64::INFINITY;
    for seed in 0..50 {
        let m = tiny_model(LossKind::Bce, 1000 + seed, true);
        let (cx, cy) = confusion_loss(&m, &b[1], &b[2]).map_err(e2s)?;
        min_gap = min_gap.min(cx - two_ln2).min(cy - two_ln2);
    }
    ensure(min_gap > 0.0, || format!("confusion below 2 ln 2 by {}", -min_gap))?;
    let mut g = Graph::new();
    let p = g.constant(Tensor::scalar(0.5));
    let t = g.constant(Tensor::scalar(1.0));
    let l = losses::bce(&mut g, p, t).map_err(e2s)?;
    let v = g.scalar(l).expect("scalar");
    ensure((v - LN_2).abs() <= 1e-12, || format!("BCE(0.5, 1) = {v}"))?;
    Ok(format!("DC at 1/2 within {worst_dc:.1e} of 2 ln 2; confusion gap off 1/2 >= {min_gap:.2e}; BCE(0.5,1) = ln 2"))
}

// ---------------------------------------------------------------- 3

fn all_zero(grads: Vec<Option<Vec<f64>>>) -> bool {
    grads.into_iter().flatten().flatten().all(|v| v == 0.0)
}

fn criterion_3() -> Outcome {
    let w = LossWeights::lsm();
    let mut checked = 0;
    for seed in 0..10 {
        let m = tiny_model(LossKind::Bce, seed, true);
        let b = tiny_batches(seed);
        let mut s = Session::new(&m, true);
        let step = s.build_step(&w, &b, true).map_err(e2s)?;
        for t in [Term::ConfX, Term::ConfY] {
            let mut g = s.graph.backward(step.term(t).expect("built")).map_err(e2s)?;
            ensure(all_zero(s.collect_grads(&mut g, &CLASSIFIERS)), || format!("{} reaches a classifier", t.name()))?;
            checked += 1;
        }
        for t in [Term::ClassifierX, Term::ClassifierY] {
            let mut g = s.graph.backward(step.term(t).expect("built")).map_err(e2s)?;
            ensure(all_zero(s.collect_grads(&mut g, &GENERATORS)), || format!("{} reaches an encoder or link", t.name()))?;
            checked += 1;
        }
        let mut g = s.graph.backward(step.main.expect("built")).map_err(e2s)?;
        ensure(all_zero(s.collect_grads(&mut g, &CLASSIFIERS)), || "main loss reaches a classifier".into())?;
        let mut g = s.graph.backward(step.adversarial.expect("built")).map_err(e2s)?;
        ensure(all_zero(s.collect_grads(&mut g, &GENERATORS)), || "classifier loss reaches a generator".into())?;
    }
    Ok(format!("{checked} term backward passes, every routed gradient exactly zero"))
}

// ---------------------------------------------------------------- 4

fn brute_miou(pred: &[u8], gt: &[u8]) -> Option<f64> {
    let mut ious = Vec::new();
    for c in 1..3u8 {
        let (mut inter, mut union) = (0usize, 0usize);
        for (p, g) in pred.iter().zip(gt) {
            let (a, b) = (*p == c, *g == c);
            inter += usize::from(a && b);
            union += usize::from(a || b);
        }
        if union > 0 {
            ious.push(inter as f64 / union as f64);
        }
    }
    (!ious.is_empty()).then(|| ious.iter().sum::<f64>() / ious.len() as f64)
}

fn direct_nrmse(p: &[f64], g: &[f64], eyes: (usize, usize)) -> f64 {
    let k = p.len() / 2;
    let se: f64 = (0..k).map(|i| (p[2 * i] - g[2 * i]).powi(2) + (p[2 * i + 1] - g[2 * i + 1]).powi(2)).map(f64::sqrt).sum();
    let (a, b) = eyes;
    let d = ((g[2 * a] - g[2 * b]).powi(2) + (g[2 * a + 1] - g[2 * b + 1]).powi(2)).sqrt();
    se / (k as f64 * d)
}

fn criterion_4() -> Outcome {
    let mut r = rng::stream(4, 0);
    let mut maps = Vec::new();
    for _ in 0..1000 {
        let pred: Vec<u8> = (0..64).map(|_| r.gen_range(0..3)).collect();
        // Sparse ground truth so some maps miss a class entirely.
        let gt: Vec<u8> = (0..64).map(|_| if r.gen_bool(0.7) { 0 } else { r.gen_range(0..3) }).collect();
        let got = miou(&pred, &gt, 3, &[0]).map_err(e2s)?;
        let want = brute_miou(&pred, &gt);
        ensure(got == want, || format!("mIoU {got:?} vs brute force {want:?}"))?;
        maps.push((pred, gt));
    }
    let mean = mean_miou(maps.iter().map(|(p, g)| (p.as_slice(), g.as_slice())), 3, &[0]).map_err(e2s)?;
    let vals: Vec<f64> = maps.iter().filter_map(|(p, g)| brute_miou(p, g)).collect();
    let want = vals.iter().sum::<f64>() / vals.len() as f64;
    ensure(mean.map(|m| (m - want).abs() < 1e-12) == Some(true), || format!("mean mIoU {mean:?} vs {want}"))?;

    let k = 8;
    let eyes = (0, 1);
    let mut worst_direct: f64 = 0.0;
    let mut worst_inv: f64 = 0.0;
    for _ in 0..100 {
        let g: Vec<f64> = (0..2 * k).map(|_| r.gen_range(0.0..1.0)).collect();
        let p: Vec<f64> = g.iter().map(|v| v + r.gen_range(-0.1..0.1)).collect();
        let e = nrmse(&p, &g, eyes).map_err(e2s)?;
        worst_direct = worst_direct.max((e - direct_nrmse(&p, &g, eyes)).abs());
        let (s, th, tx, ty) = (r.gen_range(0.2..5.0), r.gen_range(0.0..std::f64::consts::TAU), r.gen_range(-3.0..3.0), r.gen_range(-3.0..3.0));
        let tf = |v: &[f64]| -> Vec<f64> {
            v.chunks(2)
                .flat_map(|q| [s * (th.cos() * q[0] - th.sin() * q[1]) + tx, s * (th.sin() * q[0] + th.cos() * q[1]) + ty])
                .collect()
        };
        let e2 = nrmse(&tf(&p), &tf(&g), eyes).map_err(e2s)?;
        worst_inv = worst_inv.max((e2 - e).abs() / e.abs().max(1e-300));
    }
    ensure(worst_direct <= 1e-12, || format!("NRMSE differs from direct evaluation by {worst_direct:.2e}"))?;
    ensure(worst_inv < 1e-9, || format!("NRMSE changes under a similarity by {worst_inv:.2e} (relative)"))?;
    Ok(format!("1000 maps exact; NRMSE direct diff {worst_direct:.1e}; similarity drift {worst_inv:.1e}"))
}

// ---------------------------------------------------------------- 5

const CX: (f64, f64) = (0.15, 0.85);
const CY: (f64, f64) = (0.15, 0.85);
const R: (f64, f64) = (0.10, 0.30);
const T: (f64, f64) = (0.02, 0.10);

fn oracle_mask(p: &SitParams, size: usize) -> Vec<u8> {
    let map = |v: f64, from: (f64, f64), to: (f64, f64)| to.0 + (v - from.0) * (to.1 - to.0) / (from.1 - from.0);
    let (cx, cy, r, t) = (map(p.t, T, CX), map(p.r, R, CY), map(p.cy, CY, R), map(p.cx, CX, T));
    let mut out = Vec::new();
    for row in 0..size {
        for col in 0..size {
            let x = (col as f64 + 0.5) / size as f64;
            let y = (row as f64 + 0.5) / size as f64;
            let d = (x - cx).hypot(y - cy);
            out.push(if d < r - t / 2.0 {
                1
            } else if (d - r).abs() <= t / 2.0 {
                2
            } else {
                0
            });
        }
    }
    out
}

fn criterion_5() -> Outcome {
    let mut r = rng::stream(5, 0);
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        let p = SitParams::new(r.gen_range(CX.0..=CX.1), r.gen_range(CY.0..=CY.1), r.gen_range(R.0..=R.1), r.gen_range(T.0..=T.1)).map_err(e2s)?;
        let q = swap_params(&swap_params(&p));
        for (a, b) in [(p.cx, q.cx), (p.cy, q.cy), (p.r, q.r), (p.t, q.t)] {
            worst = worst.max((a - b).abs());
        }
    }
    ensure(worst < 1e-12, || format!("swap twice moves parameters by {worst:.2e}"))?;
    let size = 24;
    let sit = gen_sit_dataset(100, size, 17, None).map_err(e2s)?;
    for (i, p) in sit.params.iter().enumerate() {
        let y = sit.dataset.y.row(i);
        let classes: Vec<u8> = y
            .chunks(3)
            .map(|c| c.iter().position(|&v| v == 1.0).expect("one-hot") as u8)
            .collect();
        ensure(y.iter().all(|&v| v == 0.0 || v == 1.0), || "mask is not one-hot".into())?;
        ensure(classes == oracle_mask(p, size), || format!("sample {i}: mask differs from rasterization"))?;
    }
    let again = gen_sit_dataset(100, size, 17, None).map_err(e2s)?;
    let bits = |d: &[f64]| d.iter().map(|v| v.to_bits()).collect::<Vec<_>>();
    ensure(bits(again.dataset.x.data()) == bits(sit.dataset.x.data()) && again.dataset.y == sit.dataset.y, || "regeneration differs".into())?;
    let other = gen_sit_dataset(100, size, 18, None).map_err(e2s)?;
    ensure(other.dataset.x != sit.dataset.x, || "distinct seeds gave identical images".into())?;
    Ok(format!("involution within {worst:.1e}; 100 masks match rasterization; regeneration bit-identical"))
}

// ---------------------------------------------------------------- 6

fn criterion_6() -> Outcome {
    // 143 items leave exactly 100 for training.
    let ds = gen_sit_dataset(143, 16, 6, None).map_err(e2s)?.dataset;
    for n in 0..=100u32 {
        let c = split_counts(143, n).map_err(e2s)?;
        let b = split_semi_supervised(&ds, n, 9).map_err(e2s)?;
        let want = (n as usize * 50 / 100, 50 - n as usize * 50 / 100);
        ensure(c.train == 100 && (c.paired, c.x_only) == want && c.y_only == want.1, || format!("N={n}: counts {c:?}"))?;
        ensure(
            (b.paired.len(), b.x_only.len(), b.y_only.len()) == (want.0, want.1, want.1),
            || format!("N={n}: bank sizes differ from counts"),
        )?;
        let banks = [&b.paired.origins, &b.x_only.origins, &b.y_only.origins, &b.val.origins, &b.test.origins];
        let total: usize = banks.iter().map(|o| o.len()).sum();
        let set: BTreeSet<usize> = banks.iter().flat_map(|o| o.iter().copied()).collect();
        ensure(set.len() == total, || format!("N={n}: banks overlap"))?;
        // Unpaired views of one sample never appear in both domains.
        let xs: BTreeSet<_> = b.x_only.origins.iter().collect();
        ensure(b.y_only.origins.iter().all(|o| !xs.contains(o)), || format!("N={n}: x and y views share a sample"))?;
        if n == 60 {
            ensure(want == (30, 20), || "N=60 is not 30/20/20".into())?;
        }
    }
    Ok("N = 0..100 on 100 training items follow floor(N/2) pairs, disjoint banks; N=60 gives 30/20/20".into())
}

// ---------------------------------------------------------------- 7

fn criterion_7() -> Outcome {
    let t0 = Instant::now();
    // 183 samples: 70% is 128 training items, half of which are paired.
    let ds = gen_sit_dataset(183, 32, 7, None).map_err(e2s)?.dataset;
    let bundle = split_semi_supervised(&ds, 100, 0).map_err(e2s)?;
    ensure(bundle.paired.len() == 64, || format!("{} pairs", bundle.paired.len()))?;
    let mut weights: LossWeights = "1111".parse::<AblationId>().map_err(e2s)?.weights();
    weights.distance = 0.1;
    let cfg = TrainConfig {
        weights,
        monitor: Monitor::TrainPaired,
        target: Some(0.9),
        patience: 1000,
        seed: 1,
        ..TrainConfig::new(TaskMetric::Miou)
    };
    let model = LsmModel::new(bundle.x_spec.clone(), bundle.y_spec.clone(), ModelConfig::default(), 1).map_err(e2s)?;
    let out = fit(model, &bundle, &cfg).map_err(e2s)?;
    let train = evaluate(&out.model, &bundle.paired, TaskMetric::Miou).map_err(e2s)?.unwrap_or(0.0);
    let el = t0.elapsed();
    ensure(train >= 0.9, || format!("train mIoU {train:.4} after {} epochs", out.history.stopped_epoch()))?;
    ensure(el < Duration::from_secs(15 * 60), || format!("took {el:.1?}"))?;
    Ok(format!("train mIoU {train:.4} at epoch {} of 1000, {el:.1?}", out.history.stopped_epoch()))
}

// ---------------------------------------------------------------- 8

/// Desk configuration for the trend check.
fn trend_base() -> RunConfig {
    RunConfig {
        max_epochs: 150,
        patience: 30,
        weights: WeightsJson {
            distance: 0.1,
            ..WeightsJson::default()
        },
        model: ModelConfigJson {
            latent_dim: 32,
            encoder_hidden: vec![256, 128],
            link_hidden_layers: 1,
            classifier_hidden: vec![128],
        },
        ..RunConfig::default()
    }
}

fn criterion_8() -> Outcome {
    let t0 = Instant::now();
    let ds = gen_sit_dataset(1000, 16, 7, None).map_err(e2s)?.dataset;
    let ids = ["1111".parse::<AblationId>().map_err(e2s)?, "0000".parse().map_err(e2s)?];
    let plan = SweepPlan {
        configs: ablation_configs(&trend_base(), &ids),
        levels: vec![100, 20, 5],
        seeds: vec![1, 2, 3],
        split_seed: 0,
        threads: experiment::threads_from_env().map_err(e2s)?,
    };
    let recs = experiment::sweep(&ds, &plan).map_err(e2s)?;
    let cells = aggregate(&recs).map_err(e2s)?;
    let cell = |m: &str, n: u32| -> Result<f64, String> {
        cells
            .iter()
            .find(|c| c.model == m && c.n_percent == n && c.values.len() == 3)
            .map(|c| c.mean)
            .ok_or_else(|| format!("missing cell {m} N={n}"))
    };
    let (a100, a20, a5) = (cell("1111", 100)?, cell("1111", 20)?, cell("1111", 5)?);
    let (b100, b20) = (cell("0000", 100)?, cell("0000", 20)?);
    let summary = format!("1111: {a100:.3}/{a20:.3}/{a5:.3}, 0000: {b100:.3}/{b20:.3} at N=100/20/5, {:.1?}", t0.elapsed());
    let slack = 0.02;
    let checks = [
        (a100 + slack >= b100, "1111 >= 0000 at N=100"),
        (a20 + slack >= b20, "1111 >= 0000 at N=20"),
        (a100 + slack >= a20, "1111 N=100 >= N=20"),
        (a20 + slack >= a5, "1111 N=20 >= N=5"),
    ];
    for (ok, what) in checks {
        ensure(ok, || format!("{what} fails; {summary}"))?;
    }
    Ok(summary)
}

// ---------------------------------------------------------------- 9

fn small_bundle(n_percent: u32) -> Result<lsm_core::data::DatasetBundle, String> {
    let ds = gen_sit_dataset(60, 16, 9, None).map_err(e2s)?.dataset;
    split_semi_supervised(&ds, n_percent, 3).map_err(e2s)
}

fn small_model(b: &lsm_core::data::DatasetBundle, seed: u64) -> Result<LsmModel, String> {
    let cfg = ModelConfig {
        latent_dim: 8,
        encoder_hidden: vec![24],
        link_hidden_layers: 1,
        classifier_hidden: vec![8],
    };
    LsmModel::new(b.x_spec.clone(), b.y_spec.clone(), cfg, seed).map_err(e2s)
}

fn criterion_9() -> Outcome {
    let b = small_bundle(20)?;
    let base = TrainConfig {
        max_epochs: 4,
        patience: 4,
        batch_paired: 4,
        batch_x: 4,
        batch_y: 4,
        seed: 5,
        ..TrainConfig::new(TaskMetric::Miou)
    };
    let run = |w: LossWeights| fit(small_model(&b, 5)?, &b, &TrainConfig { weights: w, ..base.clone() }).map_err(e2s);
    let abl = run("0000".parse::<AblationId>().map_err(e2s)?.weights())?;
    let basic = run(LossWeights::basic())?;
    let bits = |m: &LsmModel| m.flat_params(&Net::ALL).iter().map(|v| v.to_bits()).collect::<Vec<_>>();
    ensure(abl.history == basic.history && bits(&abl.model) == bits(&basic.model), || "0000 differs from the basic baseline".into())?;

    let sop_w = "1100".parse::<AblationId>().map_err(e2s)?.weights();
    ensure(sop_w == LossWeights::sop(), || format!("1100 weights {sop_w:?}"))?;
    let sop = run(sop_w)?;
    let h = &sop.history;
    let banned = [Term::DistX, Term::DistY, Term::ConfX, Term::ConfY, Term::ClassifierX, Term::ClassifierY];
    ensure(h.epochs.iter().all(|e| banned.iter().all(|&t| e.term(t).is_none())), || "SOP run logged a distance or adversarial term".into())?;
    ensure(h.dc_updates == 0 && h.main_updates > 0, || format!("SOP run: {} classifier updates", h.dc_updates))?;
    ensure(h.epochs.iter().any(|e| e.term(Term::ReconX).is_some()), || "SOP run has no reconstruction".into())?;
    let full = run(LossWeights::lsm())?;
    ensure(full.history.dc_updates == full.history.main_updates, || "full run: classifier and main update counts differ".into())?;

    let mut m = small_model(&b, 6)?;
    let links = [Net::LinkXY, Net::LinkYX];
    let before = m.flat_params(&links);
    let enc_before = m.flat_params(&[Net::EncoderX]);
    ioda_pretrain(&mut m, &b, &PretrainConfig { epochs: 3, lr: 1e-3, batch: 4, seed: 6 }).map_err(e2s)?;
    let after = m.flat_params(&links);
    ensure(
        before.iter().zip(&after).all(|(a, b)| a.to_bits() == b.to_bits()),
        || "pre-training moved a link parameter".into(),
    )?;
    ensure(enc_before != m.flat_params(&[Net::EncoderX]), || "pre-training did not train the encoder".into())?;
    Ok(format!("0000 == basic bit for bit; 1100 == SOP with 0 classifier updates over {} main; links unchanged by pre-training", h.main_updates))
}

// ---------------------------------------------------------------- 10

fn criterion_10() -> Outcome {
    let mut es = EarlyStopping::new(5, true);
    let series = [0.1, 0.2, 0.3, 0.3, 0.25, 0.3, 0.29, 0.3, 0.3, 0.3];
    let mut stopped = None;
    for (i, v) in series.iter().enumerate() {
        if es.observe(i + 1, Some(*v)).stop {
            stopped = Some(i + 1);
            break;
        }
    }
    ensure(stopped == Some(8) && es.best().map(|b| b.0) == Some(3), || format!("plateau stop {stopped:?}, best {:?}", es.best()))?;

    // A real fit returns the weights of its best epoch.
    let b = small_bundle(60)?;
    let cfg = TrainConfig {
        max_epochs: 30,
        patience: 3,
        batch_paired: 4,
        batch_x: 4,
        batch_y: 4,
        lr: 3e-3,
        seed: 2,
        ..TrainConfig::new(TaskMetric::Miou)
    };
    let out = fit(small_model(&b, 2)?, &b, &cfg).map_err(e2s)?;
    let h = &out.history;
    let val = evaluate(&out.model, &b.val, TaskMetric::Miou).map_err(e2s)?;
    ensure(val == h.best_value, || format!("returned model scores {val:?}, best was {:?}", h.best_value))?;
    if h.stop == StopReason::Patience {
        ensure(h.stopped_epoch() == h.best_epoch + cfg.patience, || format!("stopped at {} with best {}", h.stopped_epoch(), h.best_epoch))?;
    }

    let ds = gen_sit_dataset(143, 16, 10, None).map_err(e2s)?.dataset;
    let base = RunConfig {
        max_epochs: 2,
        patience: 2,
        model: ModelConfigJson {
            latent_dim: 8,
            encoder_hidden: vec![16],
            link_hidden_layers: 1,
            classifier_hidden: vec![8],
        },
        ..RunConfig::default()
    };
    let plan = SweepPlan {
        configs: vec![base],
        levels: vec![100, 60, 20, 5, 3, 1],
        seeds: vec![1, 2, 3, 4, 5],
        split_seed: 0,
        threads: experiment::threads_from_env().map_err(e2s)?,
    };
    let recs = experiment::sweep(&ds, &plan).map_err(e2s)?;
    ensure(recs.len() == 30, || format!("{} records, expected 6 levels x 5 seeds", recs.len()))?;
    let cells = aggregate(&recs).map_err(e2s)?;
    let table = markdown_table(&cells, "test", "miou");
    let header = table.lines().next().unwrap_or_default();
    ensure(header == "| model | 100% | 60% | 20% | 5% | 3% | 1% |", || format!("table header {header:?}"))?;
    ensure(table.lines().count() == 3, || "table should hold one model row".into())?;
    let svg = svg_plot(&cells, "test", "miou");
    ensure(svg.contains(r#"class="band""#), || "plot has no band".into())?;
    for n in plan.levels {
        let vals: Vec<f64> = recs.iter().filter(|r| r.n_percent == n).map(|r| r.value).collect();
        let (_, std) = mean_std(&vals);
        let std = std.expect("five seeds");
        let tag = format!(r#"data-n="{n}" "#);
        let at = svg.find(&tag).ok_or_else(|| format!("no point for N={n}"))?;
        let rest = &svg[at..];
        let s = rest.split("data-std=\"").nth(1).and_then(|t| t.split('"').next()).ok_or("no std attribute")?;
        let plotted: f64 = s.parse().map_err(e2s)?;
        ensure(plotted == std, || format!("N={n}: band half-width {plotted} vs sample std {std}"))?;
    }
    Ok(format!("plateau stops at 8 with best 3; fit returns best-epoch weights; 30-run sweep table and std bands check out"))
}

// ---------------------------------------------------------------- 11

fn lsm_cmd(args: &[&str]) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_lsm")).args(args).output().map_err(e2s)?;
    ensure(out.status.code() == Some(0), || {
        format!("lsm {}: exit {:?}: {}", args.join(" "), out.status.code(), String::from_utf8_lossy(&out.stderr).trim())
    })
}

fn pipeline(root: &Path) -> Result<(), String> {
    let p = |s: &str| root.join(s).to_string_lossy().into_owned();
    std::fs::write(
        root.join("config.json"),
        r#"{"max_epochs": 2, "patience": 1, "model": {"latent_dim": 8, "encoder_hidden": [16], "link_hidden_layers": 1, "classifier_hidden": [8]}}"#,
    )
    .map_err(e2s)?;
    lsm_cmd(&["gen-sit", "--n", "60", "--size", "16", "--seed", "7", "--out", &p("data")])?;
    lsm_cmd(&["split", "--in", &p("data"), "--n-percent", "60", "--seed", "1", "--out", &p("bundle")])?;
    lsm_cmd(&["train", "--data", &p("bundle"), "--config", &p("config.json"), "--out", &p("run")])?;
    lsm_cmd(&["eval", "--model", &p("run"), "--data", &p("bundle"), "--out", &p("eval")])?;
    lsm_cmd(&["report", "--records", &p("eval/records.csv"), "--out", &p("report")])?;
    Ok(())
}

fn tree(root: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in std::fs::read_dir(&d).unwrap() {
            let path = e.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let rel = path.strip_prefix(root).unwrap().to_string_lossy().into_owned();
                out.push((rel, std::fs::read(&path).unwrap()));
            }
        }
    }
    out.sort();
    out
}

fn criterion_11() -> Outcome {
    let a = tempfile::tempdir().map_err(e2s)?;
    let b = tempfile::tempdir().map_err(e2s)?;
    pipeline(a.path())?;
    pipeline(b.path())?;
    let m = load_manifest(&a.path().join("data")).map_err(e2s)?;
    ensure(m.n == 60 && m.seed == Some(7), || "dataset manifest fields".into())?;
    let bundle = load_bundle(&a.path().join("bundle")).map_err(e2s)?;
    ensure(bundle.n_percent == 60, || "bundle manifest N%".into())?;
    load_model(&a.path().join("run/model")).map_err(e2s)?;
    let train = read_records(&a.path().join("run/records.csv")).map_err(e2s)?;
    let eval = read_records(&a.path().join("eval/records.csv")).map_err(e2s)?;
    ensure(eval.iter().any(|r| r.metric == "miou") && !train.is_empty(), || "no miou records".into())?;
    let header = std::fs::read_to_string(a.path().join("eval/records.csv")).map_err(e2s)?;
    ensure(header.starts_with("run_id,config_hash,n_percent,epoch,split,metric,value\n"), || "records header".into())?;
    ensure(a.path().join("report/table.md").exists(), || "report table missing".into())?;
    let (ta, tb) = (tree(a.path()), tree(b.path()));
    let files = ta.len();
    ensure(ta == tb, || "rerun output differs".into())?;
    Ok(format!("exit 0 throughout; manifests and CSV parse; rerun bit-identical over {files} files"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("gradient correctness", criterion_1),
        ("closed-form loss values", criterion_2),
        ("gradient routing", criterion_3),
        ("metric oracles", criterion_4),
        ("data properties", criterion_5),
        ("split protocol", criterion_6),
        ("overfit sanity", criterion_7),
        ("trend reproduction", criterion_8),
        ("baseline equivalences", criterion_9),
        ("protocol mechanics", criterion_10),
        ("CLI round trip", criterion_11),
    ];
    let only: Option<usize> = std::env::args().skip(1).find_map(|a| a.strip_prefix("criterion_").and_then(|n| n.parse().ok()));
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let n = i + 1;
        if only.is_some_and(|o| o != n) {
            continue;
        }
        match f() {
            Ok(detail) => println!("criterion {n:>2} PASS  {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("criterion {n:>2} FAIL  {name}: {why}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
