use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::LN_2;

use rand::Rng as _;

use super::*;
use crate::{rng, Tensor};

fn small_config() -> ModelConfig {
    ModelConfig {
        latent_dim: 3,
        encoder_hidden: vec![5],
        link_hidden_layers: 1,
        classifier_hidden: vec![4],
    }
}

fn image_to_mask(loss: LossKind, seed: u64) -> LsmModel {
    LsmModel::new(
        DomainSpec::grayscale_image("image", 4),
        DomainSpec::class_map("mask", 4, 3, loss),
        small_config(),
        seed,
    )
    .unwrap()
}

fn uniform(shape: &[usize], seed: u64) -> Tensor {
    let mut r = rng::stream(seed, 99);
    let n: usize = shape.iter().product();
    Tensor::new(shape.to_vec(), (0..n).map(|_| r.gen_range(0.0..1.0)).collect()).unwrap()
}

fn one_hot(batch: usize, pixels: usize, classes: usize, seed: u64) -> Tensor {
    let mut r = rng::stream(seed, 98);
    let mut data = vec![0.0; batch * pixels * classes];
    for px in 0..batch * pixels {
        data[px * classes + r.gen_range(0..classes)] = 1.0;
    }
    Tensor::new(vec![batch, pixels * classes], data).unwrap()
}

fn zero_all(model: &mut LsmModel) {
    for p in model.params_mut(&Net::ALL) {
        p.data_mut().iter_mut().for_each(|v| *v = 0.0);
    }
}

#[test]
fn translate_shape_contract() {
    let model = image_to_mask(LossKind::Bce, 1);
    for b in [1, 3] {
        let y = translate(&model, &uniform(&[b, 16], 2), Direction::XToY).unwrap();
        assert_eq!(y.shape(), &[b, 4, 4, 3]);
        assert!(y.is_finite());
        let x = translate(&model, &uniform(&[b, 4, 4, 3], 3), Direction::YToX).unwrap();
        assert_eq!(x.shape(), &[b, 4, 4, 1]);
    }
    assert!(matches!(
        translate(&model, &uniform(&[2, 15], 2), Direction::XToY),
        Err(crate::Error::ShapeMismatch { .. })
    ));
}

#[test]
fn zero_weights_give_half_everywhere() {
    let mut model = image_to_mask(LossKind::Bce, 1);
    zero_all(&mut model);
    let y = translate(&model, &uniform(&[2, 16], 5), Direction::XToY).unwrap();
    assert!(y.data().iter().all(|&v| v == 0.5));
}

#[test]
fn supervised_loss_closed_forms() {
    // BCE: p = 1/2 for every element gives ln 2 whatever the target.
    let mut model = image_to_mask(LossKind::Bce, 1);
    zero_all(&mut model);
    let batch = Batch::paired(uniform(&[2, 16], 1), one_hot(2, 16, 3, 2)).unwrap();
    let (xy, _) = supervised_translation_loss(&model, &batch).unwrap();
    assert!((xy - LN_2).abs() < 1e-12);

    // CE: zero logits give a uniform softmax over 4 classes.
    let mut model = LsmModel::new(
        DomainSpec::grayscale_image("image", 4),
        DomainSpec::class_map("mask", 4, 4, LossKind::Ce),
        small_config(),
        1,
    )
    .unwrap();
    zero_all(&mut model);
    let batch = Batch::paired(uniform(&[2, 16], 1), one_hot(2, 16, 4, 2)).unwrap();
    let (xy, yx) = supervised_translation_loss(&model, &batch).unwrap();
    assert!((xy - libm::log(4.0)).abs() < 1e-12);
    // Reverse direction is MSE against the image with a constant 0.5 output.
    let expected: f64 = batch.x().unwrap().data().iter().map(|v| (v - 0.5) * (v - 0.5)).sum::<f64>() / 32.0;
    assert!((yx - expected).abs() < 1e-12);
}

#[test]
fn supervised_mse_of_exact_prediction_is_zero() {
    let mut model = LsmModel::new(
        DomainSpec::landmarks("a", 2),
        DomainSpec::landmarks("b", 3),
        small_config(),
        4,
    )
    .unwrap();
    zero_all(&mut model);
    let batch = Batch::paired(Tensor::full(&[2, 4], 0.5), Tensor::full(&[2, 6], 0.5)).unwrap();
    assert_eq!(supervised_translation_loss(&model, &batch).unwrap(), (0.0, 0.0));
}

#[test]
fn supervised_loss_rejects_unpaired() {
    let model = image_to_mask(LossKind::Bce, 1);
    let batch = Batch::only_x(uniform(&[2, 16], 1)).unwrap();
    assert!(matches!(
        supervised_translation_loss(&model, &batch),
        Err(crate::Error::WrongBatchKind { .. })
    ));
    assert!(latent_distance_loss(&model, &batch).is_err());
}

#[test]
fn reconstruction_activation_rule() {
    let model = image_to_mask(LossKind::Bce, 7);
    let r = reconstruction_loss(&model, &Batch::only_x(uniform(&[3, 16], 1)).unwrap()).unwrap();
    assert!(r.x.is_some());
    assert_eq!(r.y, None);
    let r = reconstruction_loss(&model, &Batch::only_y(one_hot(3, 16, 3, 1)).unwrap()).unwrap();
    assert_eq!(r.x, None);
    assert!(r.y.is_some());
}

#[test]
fn random_init_mse_reconstruction_is_bounded() {
    for seed in 0..5 {
        let model = image_to_mask(LossKind::Bce, seed);
        let r = reconstruction_loss(&model, &Batch::only_x(uniform(&[4, 16], seed)).unwrap()).unwrap();
        assert!(r.x.unwrap() <= 1.0);
    }
}

#[test]
fn distance_closed_forms() {
    let mut model = image_to_mask(LossKind::Bce, 2);
    zero_all(&mut model);
    // All codes are zero, so translated and native codes coincide.
    let batch = Batch::paired(uniform(&[2, 16], 1), one_hot(2, 16, 3, 2)).unwrap();
    assert_eq!(latent_distance_loss(&model, &batch).unwrap(), (0.0, 0.0));
}

#[test]
fn classifier_and_confusion_at_uniform_output() {
    let mut model = image_to_mask(LossKind::Bce, 3);
    zero_all(&mut model);
    let bx = Batch::only_x(uniform(&[3, 16], 1)).unwrap();
    let by = Batch::only_y(one_hot(3, 16, 3, 1)).unwrap();
    let (dy, dx) = domain_classifier_loss(&model, &bx, &by).unwrap();
    assert!((dy - 2.0 * LN_2).abs() < 1e-12);
    assert!((dx - 2.0 * LN_2).abs() < 1e-12);
    let (cy, cx) = confusion_loss(&model, &bx, &by).unwrap();
    assert!((cy - 2.0 * LN_2).abs() < 1e-12);
    assert!((cx - 2.0 * LN_2).abs() < 1e-12);
    // Missing side.
    assert!(matches!(
        domain_classifier_loss(&model, &by, &by),
        Err(crate::Error::EmptyBatch(_))
    ));
}

fn step_grads(model: &LsmModel, w: &LossWeights, batches: &[Batch], classifiers: bool) -> (Vec<Option<Vec<f64>>>, Vec<Option<Vec<f64>>>, StepGraph) {
    let mut s = Session::new(model, true);
    let step = s.build_step(w, batches, classifiers).unwrap();
    let main = step.main.map(|m| s.graph.backward(m).unwrap());
    let adv = step.adversarial.map(|a| s.graph.backward(a).unwrap());
    let all: Vec<Net> = Net::ALL.to_vec();
    let main = main.map(|mut g| s.collect_grads(&mut g, &all)).unwrap_or_default();
    let adv = adv.map(|mut g| s.collect_grads(&mut g, &all)).unwrap_or_default();
    (main, adv, step)
}

fn nets_grads(model: &LsmModel, grads: &[Option<Vec<f64>>], nets: &[Net]) -> Vec<f64> {
    // grads are in Net::ALL order, params per net in order
    let mut out = Vec::new();
    let mut idx = 0;
    for net in Net::ALL {
        let n = model.net(net).params().count();
        if nets.contains(&net) {
            for g in grads[idx..idx + n].iter().flatten() {
                out.extend_from_slice(g);
            }
        }
        idx += n;
    }
    out
}

#[test]
fn gradient_routing_is_exact() {
    let model = image_to_mask(LossKind::Bce, 9);
    let bx = Batch::only_x(uniform(&[3, 16], 1)).unwrap();
    let by = Batch::only_y(one_hot(3, 16, 3, 1)).unwrap();
    let w = LossWeights {
        confusion: 1.0,
        ..LossWeights::zero()
    };
    let (main, adv, _) = step_grads(&model, &w, &[bx, by], true);
    let dc_from_conf = nets_grads(&model, &main, &Net::CLASSIFIERS);
    assert!(dc_from_conf.iter().all(|&g| g == 0.0));
    let gen_from_conf = nets_grads(&model, &main, &[Net::EncoderX, Net::EncoderY, Net::LinkXY, Net::LinkYX]);
    assert!(gen_from_conf.iter().any(|&g| g != 0.0));

    let gen_from_dc = nets_grads(&model, &adv, &Net::MAIN);
    assert!(gen_from_dc.iter().all(|&g| g == 0.0));
    let dc_from_dc = nets_grads(&model, &adv, &Net::CLASSIFIERS);
    assert!(dc_from_dc.iter().any(|&g| g != 0.0));
}

#[test]
fn final_loss_with_zero_weights() {
    let model = image_to_mask(LossKind::Bce, 1);
    let batches = [Batch::paired(uniform(&[2, 16], 1), one_hot(2, 16, 3, 2)).unwrap()];
    let r = final_loss(&model, &LossWeights::zero(), &batches, false).unwrap();
    assert_eq!(r.main, 0.0);
    assert!(r.degenerate);
    assert!(r.terms.is_empty());
}

#[test]
fn final_loss_is_linear_in_distance_weight() {
    let model = image_to_mask(LossKind::Bce, 4);
    let batches = [
        Batch::paired(uniform(&[2, 16], 1), one_hot(2, 16, 3, 2)).unwrap(),
        Batch::only_x(uniform(&[2, 16], 3)).unwrap(),
        Batch::only_y(one_hot(2, 16, 3, 4)).unwrap(),
    ];
    let w1 = LossWeights::lsm();
    let w2 = LossWeights { distance: 2.0, ..w1 };
    let w0 = LossWeights { distance: 0.0, ..w1 };
    let r1 = final_loss(&model, &w1, &batches, true).unwrap();
    let r2 = final_loss(&model, &w2, &batches, true).unwrap();
    let r0 = final_loss(&model, &w0, &batches, true).unwrap();
    let d1 = r1.main - r0.main;
    let d2 = r2.main - r0.main;
    assert!((d2 - 2.0 * d1).abs() < 1e-12 * (1.0 + r1.main.abs()));
    let dist: f64 = r1
        .terms
        .iter()
        .filter(|(t, _)| matches!(t, Term::DistX | Term::DistY))
        .map(|(_, v)| v)
        .sum();
    assert!((d1 - dist).abs() < 1e-12 * (1.0 + r1.main.abs()));
    assert!(r1.adversarial.is_some());
}

#[test]
fn basic_weights_reduce_to_supervised_terms() {
    let model = image_to_mask(LossKind::Bce, 5);
    let paired = Batch::paired(uniform(&[2, 16], 1), one_hot(2, 16, 3, 2)).unwrap();
    let batches = [
        paired.clone(),
        Batch::only_x(uniform(&[2, 16], 3)).unwrap(),
        Batch::only_y(one_hot(2, 16, 3, 4)).unwrap(),
    ];
    let r = final_loss(&model, &LossWeights::basic(), &batches, false).unwrap();
    let (xy, yx) = supervised_translation_loss(&model, &paired).unwrap();
    assert_eq!(r.main, xy + yx);
    let names: Vec<Term> = r.terms.iter().map(|(t, _)| *t).collect();
    assert_eq!(names, [Term::SupXY, Term::SupYX]);
}

#[test]
fn sop_builds_no_distance_or_adversarial_terms() {
    let model = image_to_mask(LossKind::Bce, 5);
    let batches = [
        Batch::paired(uniform(&[2, 16], 1), one_hot(2, 16, 3, 2)).unwrap(),
        Batch::only_x(uniform(&[2, 16], 3)).unwrap(),
        Batch::only_y(one_hot(2, 16, 3, 4)).unwrap(),
    ];
    let r = final_loss(&model, &LossWeights::sop(), &batches, false).unwrap();
    assert!(r.adversarial.is_none());
    for (t, _) in &r.terms {
        assert!(matches!(t, Term::SupXY | Term::SupYX | Term::ReconX | Term::ReconY));
    }
}

#[test]
fn duplicate_batch_kind_rejected() {
    let model = image_to_mask(LossKind::Bce, 5);
    let b = Batch::only_x(uniform(&[2, 16], 3)).unwrap();
    assert!(final_loss(&model, &LossWeights::lsm(), &[b.clone(), b], false).is_err());
}

#[test]
fn flat_params_round_trip() {
    let mut model = image_to_mask(LossKind::Bce, 5);
    let flat = model.flat_params(&Net::MAIN);
    let doubled: Vec<f64> = flat.iter().map(|v| v * 2.0).collect();
    model.set_flat_params(&Net::MAIN, &doubled).unwrap();
    assert_eq!(model.flat_params(&Net::MAIN), doubled);
    assert!(model.set_flat_params(&Net::MAIN, &doubled[1..]).is_err());
}
