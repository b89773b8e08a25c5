//! Training objectives as pure functions. Every loss returns its value along
//! with the analytic gradient with respect to its differentiable inputs.
//!
//! Subgradients of `|x|` are taken as 0 at `x = 0`.

use ndarray::{Array2, ArrayD, Zip};

use crate::dsp::{log_f0_masked, median_smooth_f0, F0Contour};
use crate::error::{Error, Result};
use crate::gaussian::DiagGaussianBatch;

/// Gradient with respect to the `(means, log_stds)` of a Gaussian batch.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianGrad {
    pub means: Array2<f64>,
    pub log_stds: Array2<f64>,
}

impl GaussianGrad {
    fn zeros(dim: (usize, usize)) -> Self {
        GaussianGrad {
            means: Array2::zeros(dim),
            log_stds: Array2::zeros(dim),
        }
    }

    fn scaled(mut self, k: f64) -> Self {
        self.means *= k;
        self.log_stds *= k;
        self
    }
}

/// A scalar loss and its gradient.
#[derive(Debug, Clone, PartialEq)]
pub struct LossGrad<G> {
    pub value: f64,
    pub grad: G,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KlOutput {
    pub value: f64,
    pub grad_q: GaussianGrad,
    pub grad_p: GaussianGrad,
}

/// `KL(q || p)` between diagonal Gaussians, summed over dimensions and
/// averaged over rows.
pub fn kl_diag_gaussian(q: &DiagGaussianBatch, p: &DiagGaussianBatch) -> Result<KlOutput> {
    if q.dim() != p.dim() {
        return Err(Error::shape(format!(
            "KL between {:?} and {:?}",
            q.dim(),
            p.dim()
        )));
    }
    let (rows, _) = q.dim();
    if rows == 0 {
        return Err(Error::shape("KL over an empty batch"));
    }
    let scale = 1.0 / rows as f64;
    let mut grad_q = GaussianGrad::zeros(q.dim());
    let mut grad_p = GaussianGrad::zeros(q.dim());
    let mut total = 0.0;

    for (idx, &mq) in q.means().indexed_iter() {
        let (lq, mp, lp) = (q.log_stds()[idx], p.means()[idx], p.log_stds()[idx]);
        let inv_var_p = (-2.0 * lp).exp();
        let var_ratio = (2.0 * (lq - lp)).exp();
        let diff = mq - mp;
        let sq = diff * diff * inv_var_p;
        total += lp - lq + 0.5 * (var_ratio + sq) - 0.5;

        grad_q.means[idx] = scale * diff * inv_var_p;
        grad_p.means[idx] = -scale * diff * inv_var_p;
        grad_q.log_stds[idx] = scale * (var_ratio - 1.0);
        grad_p.log_stds[idx] = scale * (1.0 - var_ratio - sq);
    }

    Ok(KlOutput {
        value: total * scale,
        grad_q,
        grad_p,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct KlAperiodicOutput {
    pub value: f64,
    pub grad_q_l: GaussianGrad,
    pub grad_p_l: GaussianGrad,
    /// Always zero: the aperiodic posterior enters detached.
    pub grad_q_a: GaussianGrad,
    pub grad_p_a: GaussianGrad,
}

/// `KL(q_l || p_l) + λ_l · KL(sg[q_a] || p_a)`, where `sg` blocks gradient
/// flow into the aperiodic posterior.
pub fn kl_aperiodic(
    q_l: &DiagGaussianBatch,
    p_l: &DiagGaussianBatch,
    q_a_detached: &DiagGaussianBatch,
    p_a: &DiagGaussianBatch,
    lambda_l: f64,
) -> Result<KlAperiodicOutput> {
    let linguistic = kl_diag_gaussian(q_l, p_l)?;
    let aperiodic = kl_diag_gaussian(q_a_detached, p_a)?;
    Ok(KlAperiodicOutput {
        value: linguistic.value + lambda_l * aperiodic.value,
        grad_q_l: linguistic.grad_q,
        grad_p_l: linguistic.grad_p,
        grad_q_a: GaussianGrad::zeros(q_a_detached.dim()),
        grad_p_a: aperiodic.grad_p.scaled(lambda_l),
    })
}

/// Reparameterized draw `μ + τ · σ · ε`. `τ = 0` returns the means exactly.
pub fn sample_gaussian(
    stats: &DiagGaussianBatch,
    tau: f64,
    eps: &Array2<f64>,
) -> Result<Array2<f64>> {
    if eps.dim() != stats.dim() {
        return Err(Error::shape(format!(
            "noise {:?} vs stats {:?}",
            eps.dim(),
            stats.dim()
        )));
    }
    if !(tau.is_finite() && tau >= 0.0) {
        return Err(Error::value(format!("temperature must be >= 0, got {tau}")));
    }
    let mut z = stats.means().clone();
    Zip::from(&mut z)
        .and(stats.log_stds())
        .and(eps)
        .for_each(|z, &l, &e| *z += tau * l.exp() * e);
    Ok(z)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PitchLossOutput {
    pub value: f64,
    /// With respect to the predicted F0.
    pub grad_pred: Vec<f64>,
    /// With respect to the predicted smoothed F0.
    pub grad_smooth_pred: Vec<f64>,
}

/// Log-F0 L1 loss on voiced frames plus `λ_s` times the same loss against the
/// median-smoothed target. Both terms share the voicing mask of `f0_true`;
/// with no voiced frames the loss is 0.
pub fn pitch_loss(
    f0_true: &F0Contour,
    f0_pred: &[f64],
    f0_smooth_pred: &[f64],
    lambda_s: f64,
    kernel: usize,
) -> Result<PitchLossOutput> {
    let n = f0_true.len();
    if f0_pred.len() != n || f0_smooth_pred.len() != n {
        return Err(Error::shape(format!(
            "F0 lengths differ: target {n}, prediction {}, smoothed prediction {}",
            f0_pred.len(),
            f0_smooth_pred.len()
        )));
    }
    let target = log_f0_masked(f0_true);
    let smoothed = log_f0_masked(&median_smooth_f0(f0_true, kernel)?);
    let mut grad_pred = vec![0.0; n];
    let mut grad_smooth_pred = vec![0.0; n];
    let n_voiced = target.n_voiced();
    if n_voiced == 0 {
        return Ok(PitchLossOutput {
            value: 0.0,
            grad_pred,
            grad_smooth_pred,
        });
    }
    let inv = 1.0 / n_voiced as f64;

    let (mut raw, mut smooth) = (0.0, 0.0);
    for i in (0..n).filter(|&i| target.voiced[i]) {
        let (p, ps) = (f0_pred[i], f0_smooth_pred[i]);
        if !(p > 0.0 && ps > 0.0 && p.is_finite() && ps.is_finite()) {
            return Err(Error::value(format!(
                "frame {i} is voiced but predictions are {p} / {ps}"
            )));
        }
        let d = target.values[i] - p.ln();
        let ds = smoothed.values[i] - ps.ln();
        raw += d.abs();
        smooth += ds.abs();
        // d/dp |ln t - ln p| = -sign(ln t - ln p) / p
        grad_pred[i] = -sign(d) * inv / p;
        grad_smooth_pred[i] = -lambda_s * sign(ds) * inv / ps;
    }
    Ok(PitchLossOutput {
        value: (raw + lambda_s * smooth) * inv,
        grad_pred,
        grad_smooth_pred,
    })
}

fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Mean absolute error between two mel frame matrices; gradient with respect
/// to `mel_pred`.
pub fn mel_loss(mel_true: &Array2<f64>, mel_pred: &Array2<f64>) -> Result<LossGrad<Array2<f64>>> {
    if mel_true.dim() != mel_pred.dim() {
        return Err(Error::shape(format!(
            "mel {:?} vs {:?}",
            mel_true.dim(),
            mel_pred.dim()
        )));
    }
    if mel_true.is_empty() {
        return Err(Error::shape("empty mel"));
    }
    let inv = 1.0 / mel_true.len() as f64;
    let mut value = 0.0;
    let grad = Zip::from(mel_true).and(mel_pred).map_collect(|&t, &p| {
        value += (p - t).abs();
        sign(p - t) * inv
    });
    Ok(LossGrad {
        value: value * inv,
        grad,
    })
}

/// Mean squared error between durations; gradient with respect to `d_pred`.
pub fn duration_loss(d_true: &[f64], d_pred: &[f64]) -> Result<LossGrad<Vec<f64>>> {
    if d_true.len() != d_pred.len() {
        return Err(Error::shape(format!(
            "{} target durations vs {} predictions",
            d_true.len(),
            d_pred.len()
        )));
    }
    if d_true.is_empty() {
        return Err(Error::shape("no durations"));
    }
    let inv = 1.0 / d_true.len() as f64;
    let value = d_true
        .iter()
        .zip(d_pred)
        .map(|(t, p)| (p - t).powi(2))
        .sum::<f64>()
        * inv;
    let grad = d_true
        .iter()
        .zip(d_pred)
        .map(|(t, p)| 2.0 * (p - t) * inv)
        .collect();
    Ok(LossGrad { value, grad })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LsganOutput {
    pub dis: f64,
    pub adv: f64,
    pub grad_dis_real: Vec<ArrayD<f64>>,
    pub grad_dis_fake: Vec<ArrayD<f64>>,
    pub grad_adv_fake: Vec<ArrayD<f64>>,
}

/// Least-squares GAN losses over a set of sub-discriminator outputs. Each
/// output array is reduced by its mean, then sub-discriminators are averaged
/// with equal weight.
pub fn lsgan_losses(d_real: &[ArrayD<f64>], d_fake: &[ArrayD<f64>]) -> Result<LsganOutput> {
    if d_real.is_empty() || d_fake.is_empty() {
        return Err(Error::shape("no discriminator outputs"));
    }
    if d_real.len() != d_fake.len() {
        return Err(Error::shape(format!(
            "{} real outputs vs {} fake outputs",
            d_real.len(),
            d_fake.len()
        )));
    }
    if d_real.iter().chain(d_fake).any(|a| a.is_empty()) {
        return Err(Error::shape("empty discriminator output"));
    }
    let k = 1.0 / d_real.len() as f64;
    let mut out = LsganOutput {
        dis: 0.0,
        adv: 0.0,
        grad_dis_real: Vec::with_capacity(d_real.len()),
        grad_dis_fake: Vec::with_capacity(d_real.len()),
        grad_adv_fake: Vec::with_capacity(d_real.len()),
    };
    for (real, fake) in d_real.iter().zip(d_fake) {
        let wr = k / real.len() as f64;
        let wf = k / fake.len() as f64;
        out.dis += wr * real.iter().map(|r| (r - 1.0).powi(2)).sum::<f64>()
            + wf * fake.iter().map(|f| f * f).sum::<f64>();
        out.adv += wf * fake.iter().map(|f| (f - 1.0).powi(2)).sum::<f64>();
        out.grad_dis_real.push(real.mapv(|r| 2.0 * wr * (r - 1.0)));
        out.grad_dis_fake.push(fake.mapv(|f| 2.0 * wf * f));
        out.grad_adv_fake.push(fake.mapv(|f| 2.0 * wf * (f - 1.0)));
    }
    Ok(out)
}

/// Intermediate discriminator activations, one array per layer.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureStack {
    pub layers: Vec<ArrayD<f64>>,
}

impl FeatureStack {
    pub fn new(layers: Vec<ArrayD<f64>>) -> Self {
        FeatureStack { layers }
    }

    /// Element count `N_l` of each layer.
    pub fn layer_sizes(&self) -> Vec<usize> {
        self.layers.iter().map(|l| l.len()).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatchingOutput {
    pub value: f64,
    pub grad_real: Vec<ArrayD<f64>>,
    pub grad_fake: Vec<ArrayD<f64>>,
}

/// `Σ_l (1/N_l) ‖real_l − fake_l‖₁`: per-layer mean absolute difference,
/// summed over layers.
pub fn feature_matching_loss(
    real: &FeatureStack,
    fake: &FeatureStack,
) -> Result<FeatureMatchingOutput> {
    if real.layers.len() != fake.layers.len() {
        return Err(Error::shape(format!(
            "{} real layers vs {} fake layers",
            real.layers.len(),
            fake.layers.len()
        )));
    }
    let mut out = FeatureMatchingOutput {
        value: 0.0,
        grad_real: Vec::with_capacity(real.layers.len()),
        grad_fake: Vec::with_capacity(real.layers.len()),
    };
    for (l, (r, f)) in real.layers.iter().zip(&fake.layers).enumerate() {
        if r.shape() != f.shape() {
            return Err(Error::shape(format!(
                "layer {l}: {:?} vs {:?}",
                r.shape(),
                f.shape()
            )));
        }
        if r.is_empty() {
            return Err(Error::shape(format!("layer {l} is empty")));
        }
        let inv = 1.0 / r.len() as f64;
        let mut sum = 0.0;
        let grad_real = Zip::from(r).and(f).map_collect(|&a, &b| {
            sum += (a - b).abs();
            sign(a - b) * inv
        });
        out.value += sum * inv;
        out.grad_fake.push(grad_real.mapv(|g| -g));
        out.grad_real.push(grad_real);
    }
    Ok(out)
}

/// Weights of the generator objective. Defaults: λ_l = 1, λ_s = 1,
/// λ_fm = 2, λ_mel = 45, λ_pitch = 10, λ_a = 1, λ_p = 1, λ_dur = 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossWeights {
    pub lambda_l: f64,
    pub lambda_s: f64,
    pub lambda_fm: f64,
    pub lambda_mel: f64,
    pub lambda_pitch: f64,
    pub lambda_a: f64,
    pub lambda_p: f64,
    pub lambda_dur: f64,
}

impl Default for LossWeights {
    fn default() -> Self {
        LossWeights {
            lambda_l: 1.0,
            lambda_s: 1.0,
            lambda_fm: 2.0,
            lambda_mel: 45.0,
            lambda_pitch: 10.0,
            lambda_a: 1.0,
            lambda_p: 1.0,
            lambda_dur: 1.0,
        }
    }
}

impl LossWeights {
    pub fn validate(&self) -> Result<()> {
        let named = [
            ("lambda_l", self.lambda_l),
            ("lambda_s", self.lambda_s),
            ("lambda_fm", self.lambda_fm),
            ("lambda_mel", self.lambda_mel),
            ("lambda_pitch", self.lambda_pitch),
            ("lambda_a", self.lambda_a),
            ("lambda_p", self.lambda_p),
            ("lambda_dur", self.lambda_dur),
        ];
        match named.iter().find(|(_, w)| !(w.is_finite() && *w >= 0.0)) {
            Some((name, w)) => Err(Error::Config(format!(
                "{name} must be finite and >= 0, got {w}"
            ))),
            None => Ok(()),
        }
    }
}

/// Per-term generator losses fed to [`final_loss`].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LossComponents {
    pub adv: f64,
    pub fm: f64,
    pub mel: f64,
    pub pitch: f64,
    pub kl_a: f64,
    pub kl_p: f64,
    pub dur: f64,
}

impl LossComponents {
    pub fn named(&self) -> [(&'static str, f64); 7] {
        [
            ("adv", self.adv),
            ("fm", self.fm),
            ("mel", self.mel),
            ("pitch", self.pitch),
            ("kl_a", self.kl_a),
            ("kl_p", self.kl_p),
            ("dur", self.dur),
        ]
    }
}

/// `adv + λ_fm·fm + λ_mel·mel + λ_pitch·pitch + λ_a·kl_a + λ_p·kl_p + λ_dur·dur`
pub fn final_loss(c: &LossComponents, w: &LossWeights) -> Result<f64> {
    if let Some((name, v)) = c.named().into_iter().find(|(_, v)| !v.is_finite()) {
        return Err(Error::value(format!("loss component {name} is {v}")));
    }
    w.validate()?;
    Ok(c.adv
        + w.lambda_fm * c.fm
        + w.lambda_mel * c.mel
        + w.lambda_pitch * c.pitch
        + w.lambda_a * c.kl_a
        + w.lambda_p * c.kl_p
        + w.lambda_dur * c.dur)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::LN_2;

    use ndarray::{array, IxDyn};

    use super::*;

    fn gauss(m: Array2<f64>, l: Array2<f64>) -> DiagGaussianBatch {
        DiagGaussianBatch::new(m, l).unwrap()
    }

    #[test]
    fn kl_identical_is_zero() {
        let q = gauss(array![[0.3, -1.2], [2.0, 0.5]], array![[0.1, -0.4], [1.5, 0.0]]);
        let out = kl_diag_gaussian(&q, &q).unwrap();
        assert!(out.value.abs() < 1e-12);
        assert!(out.grad_q.means.iter().all(|g| g.abs() < 1e-15));
    }

    #[test]
    fn kl_unit_shift() {
        let q = gauss(array![[1.0]], array![[0.0]]);
        let p = gauss(array![[0.0]], array![[0.0]]);
        assert!((kl_diag_gaussian(&q, &p).unwrap().value - 0.5).abs() < 1e-12);
    }

    #[test]
    fn kl_shape_mismatch() {
        let q = gauss(array![[1.0]], array![[0.0]]);
        let p = gauss(array![[0.0, 0.0]], array![[0.0, 0.0]]);
        assert!(matches!(kl_diag_gaussian(&q, &p), Err(Error::Shape(_))));
    }

    #[test]
    fn kl_aperiodic_terms() {
        let a = gauss(array![[0.2, 0.1]], array![[0.3, -0.2]]);
        let b = gauss(array![[-0.5, 0.4]], array![[0.0, 0.1]]);
        let zero = kl_aperiodic(&a, &a, &b, &b, 1.0).unwrap();
        assert!(zero.value.abs() < 1e-12);

        let kl_ab = kl_diag_gaussian(&a, &b).unwrap().value;
        let only_l = kl_aperiodic(&a, &b, &b, &a, 0.0).unwrap();
        assert_eq!(only_l.value, kl_ab);

        let out = kl_aperiodic(&a, &b, &b, &a, 0.7).unwrap();
        assert!(out.grad_q_a.means.iter().all(|&g| g == 0.0));
        assert!(out.grad_q_a.log_stds.iter().all(|&g| g == 0.0));
    }

    #[test]
    fn sampling_edges() {
        let g = gauss(array![[1.0, -2.0]], array![[0.5, -0.3]]);
        let eps = array![[0.7, -1.3]];
        assert_eq!(sample_gaussian(&g, 0.0, &eps).unwrap(), g.means());
        assert_eq!(
            sample_gaussian(&g, 0.667, &Array2::zeros((1, 2))).unwrap(),
            g.means()
        );
        assert!(sample_gaussian(&g, -1.0, &eps).is_err());
        assert!(sample_gaussian(&g, 1.0, &array![[0.0]]).is_err());
    }

    #[test]
    fn pitch_loss_values() {
        let f0 = F0Contour::new(vec![200.0; 20]).unwrap();
        let perfect = pitch_loss(&f0, &[200.0; 20], &[200.0; 20], 1.0, 13).unwrap();
        assert_eq!(perfect.value, 0.0);

        let half = pitch_loss(&f0, &[100.0; 20], &[1.0; 20], 0.0, 13).unwrap();
        assert!((half.value - LN_2).abs() < 1e-12);

        let both = pitch_loss(&f0, &[100.0; 20], &[100.0; 20], 0.5, 13).unwrap();
        assert!((both.value - 1.5 * LN_2).abs() < 1e-12);
    }

    #[test]
    fn pitch_loss_masks_unvoiced() {
        let f0 = F0Contour::new(vec![0.0, 200.0, 0.0]).unwrap();
        let out = pitch_loss(&f0, &[-5.0, 100.0, 0.0], &[0.0, 200.0, 0.0], 1.0, 3).unwrap();
        assert!((out.value - LN_2).abs() < 1e-12);
        assert_eq!(out.grad_pred[0], 0.0);

        let silent = F0Contour::new(vec![0.0; 3]).unwrap();
        assert_eq!(pitch_loss(&silent, &[0.0; 3], &[0.0; 3], 1.0, 3).unwrap().value, 0.0);

        assert!(pitch_loss(&f0, &[1.0, 0.0, 1.0], &[1.0; 3], 1.0, 3).is_err());
        assert!(pitch_loss(&f0, &[1.0; 2], &[1.0; 3], 1.0, 3).is_err());
    }

    #[test]
    fn mel_loss_values() {
        let a = array![[1.0, 2.0], [3.0, 4.0]];
        assert_eq!(mel_loss(&a, &a).unwrap().value, 0.0);
        assert!((mel_loss(&a, &(&a - 0.25)).unwrap().value - 0.25).abs() < 1e-15);
        assert!(mel_loss(&a, &array![[1.0]]).is_err());
    }

    #[test]
    fn duration_loss_values() {
        assert_eq!(duration_loss(&[1.0, 2.0], &[1.0, 2.0]).unwrap().value, 0.0);
        assert_eq!(duration_loss(&[2.0, 4.0], &[3.0, 3.0]).unwrap().value, 1.0);
        assert_eq!(duration_loss(&[2.0, 4.0], &[4.0, 2.0]).unwrap().value, 4.0);
        assert!(duration_loss(&[1.0], &[1.0, 2.0]).is_err());
    }

    fn filled(shape: &[usize], v: f64) -> ArrayD<f64> {
        ArrayD::from_elem(IxDyn(shape), v)
    }

    #[test]
    fn lsgan_values() {
        let real = vec![filled(&[3], 1.0), filled(&[2, 2], 1.0)];
        let fake = vec![filled(&[3], 0.0), filled(&[2, 2], 0.0)];
        let out = lsgan_losses(&real, &fake).unwrap();
        assert_eq!((out.dis, out.adv), (0.0, 1.0));

        let out = lsgan_losses(&fake, &real).unwrap();
        assert_eq!((out.dis, out.adv), (2.0, 0.0));

        let out = lsgan_losses(&[filled(&[4], 1.0)], &[filled(&[4], 0.5)]).unwrap();
        assert_eq!(out.adv, 0.25);

        assert!(lsgan_losses(&[], &[]).is_err());
    }

    #[test]
    fn feature_matching_values() {
        let a = FeatureStack::new(vec![filled(&[2, 3], 0.5), filled(&[5], -1.0)]);
        assert_eq!(feature_matching_loss(&a, &a).unwrap().value, 0.0);

        let b = FeatureStack::new(vec![filled(&[2, 3], 1.5), filled(&[5], 0.0)]);
        assert_eq!(feature_matching_loss(&a, &b).unwrap().value, 2.0);

        let r = FeatureStack::new(vec![ArrayD::from_shape_vec(IxDyn(&[4]), vec![1.0, 0.0, 0.5, 0.0]).unwrap()]);
        let f = FeatureStack::new(vec![ArrayD::from_shape_vec(IxDyn(&[4]), vec![0.0, 0.0, 0.0, 0.5]).unwrap()]);
        assert_eq!(feature_matching_loss(&r, &f).unwrap().value, 0.5);

        let c = FeatureStack::new(vec![filled(&[3, 2], 0.5), filled(&[5], -1.0)]);
        assert!(feature_matching_loss(&a, &c).is_err());
    }

    #[test]
    fn final_loss_weighting() {
        let w = LossWeights::default();
        let ones = LossComponents {
            adv: 1.0,
            fm: 1.0,
            mel: 1.0,
            pitch: 1.0,
            kl_a: 1.0,
            kl_p: 1.0,
            dur: 1.0,
        };
        assert_eq!(final_loss(&ones, &w).unwrap(), 61.0);
        assert_eq!(final_loss(&LossComponents::default(), &w).unwrap(), 0.0);

        let zero_w = LossWeights {
            lambda_fm: 0.0,
            lambda_mel: 0.0,
            lambda_pitch: 0.0,
            lambda_a: 0.0,
            lambda_p: 0.0,
            lambda_dur: 0.0,
            ..w
        };
        let c = LossComponents { adv: 0.3, ..ones };
        assert_eq!(final_loss(&c, &zero_w).unwrap(), 0.3);

        let nan = LossComponents { mel: f64::NAN, ..ones };
        assert!(final_loss(&nan, &w).is_err());
        let neg = LossWeights { lambda_mel: -1.0, ..w };
        assert!(final_loss(&ones, &neg).is_err());
    }
}
