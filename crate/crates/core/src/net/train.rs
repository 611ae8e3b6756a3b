use std::io::Write;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::NetConfig;
use super::model::{Network, Planes};
use crate::error::{invalid, Error, Result};
use crate::spectral::{make_rgbp_with, ImageGrid, PhaseMode};
use crate::synth::{mix_seed, Corpus, Split};

/// Which planes the network sees.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InputMode {
    Rgb,
    /// RGB plus the phase-only reconstruction.
    #[default]
    Rgbp,
}

impl InputMode {
    pub fn channels(self) -> usize {
        match self {
            InputMode::Rgb => 3,
            InputMode::Rgbp => 4,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            InputMode::Rgb => "rgb",
            InputMode::Rgbp => "rgbp",
        }
    }

    /// Network input for `image`, every channel shifted from `[0, 1]` to `[-0.5, 0.5]`.
    pub fn planes(self, image: &ImageGrid, phase_mode: PhaseMode) -> Result<Planes> {
        let mut planes = match self {
            InputMode::Rgb => {
                if image.channels() != 3 {
                    return Err(invalid!("RGB input needs 3 channels, got {}", image.channels()));
                }
                Planes::from(image)
            }
            InputMode::Rgbp => Planes::from(&make_rgbp_with(image, phase_mode)?),
        };
        planes.data.iter_mut().for_each(|v| *v -= 0.5);
        Ok(planes)
    }
}

impl FromStr for InputMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rgb" => Ok(InputMode::Rgb),
            "rgbp" => Ok(InputMode::Rgbp),
            other => Err(Error::InvalidConfig(format!("unknown input mode {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    /// Epochs without validation improvement before the rate is cut.
    pub patience: usize,
    pub factor: f64,
    pub batch_size: usize,
    pub max_epochs: usize,
    /// Training stops once the rate falls below this.
    pub min_lr: f64,
    pub seed: u64,
    pub phase_mode: PhaseMode,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 2e-3,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            patience: 5,
            factor: 0.5,
            batch_size: 32,
            max_epochs: 100,
            min_lr: 1e-5,
            seed: 0,
            phase_mode: PhaseMode::default(),
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.into()));
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad("learning rate must be positive");
        }
        if self.patience == 0 {
            return bad("patience must be at least 1");
        }
        if !(self.factor > 0.0 && self.factor < 1.0) {
            return bad("decay factor must lie in (0, 1)");
        }
        if self.batch_size == 0 || self.max_epochs == 0 {
            return bad("batch size and epoch budget must be positive");
        }
        if !(0.0..1.0).contains(&self.beta1) || !(0.0..1.0).contains(&self.beta2) || self.epsilon <= 0.0 {
            return bad("invalid Adam constants");
        }
        Ok(())
    }
}

/// Cuts the rate by `factor` after `patience` consecutive epochs without a
/// new best validation loss, then starts counting again.
#[derive(Debug, Clone, PartialEq)]
pub struct PlateauScheduler {
    lr: f64,
    best: f64,
    bad_epochs: usize,
    patience: usize,
    factor: f64,
}

impl PlateauScheduler {
    pub fn new(lr: f64, patience: usize, factor: f64) -> Self {
        Self {
            lr,
            best: f64::INFINITY,
            bad_epochs: 0,
            patience,
            factor,
        }
    }

    pub fn lr(&self) -> f64 {
        self.lr
    }

    pub fn bad_epochs(&self) -> usize {
        self.bad_epochs
    }

    /// Records one epoch's validation loss and returns the rate for the next.
    pub fn step(&mut self, val_loss: f64) -> f64 {
        if val_loss < self.best {
            self.best = val_loss;
            self.bad_epochs = 0;
        } else {
            self.bad_epochs += 1;
            if self.bad_epochs >= self.patience {
                self.lr *= self.factor;
                self.bad_epochs = 0;
            }
        }
        self.lr
    }
}

#[derive(Debug, Clone)]
pub struct Adam {
    beta1: f64,
    beta2: f64,
    epsilon: f64,
    m: Vec<f64>,
    v: Vec<f64>,
    t: i32,
}

impl Adam {
    pub fn new(len: usize, beta1: f64, beta2: f64, epsilon: f64) -> Self {
        Self {
            beta1,
            beta2,
            epsilon,
            m: vec![0.0; len],
            v: vec![0.0; len],
            t: 0,
        }
    }

    pub fn step(&mut self, params: &mut [f64], grad: &[f64], lr: f64) {
        self.t += 1;
        let c1 = 1.0 - self.beta1.powi(self.t);
        let c2 = 1.0 - self.beta2.powi(self.t);
        for (((p, &g), m), v) in params.iter_mut().zip(grad).zip(&mut self.m).zip(&mut self.v) {
            *m = self.beta1 * *m + (1.0 - self.beta1) * g;
            *v = self.beta2 * *v + (1.0 - self.beta2) * g * g;
            *p -= lr * (*m / c1) / ((*v / c2).sqrt() + self.epsilon);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochLog {
    pub epoch: usize,
    pub train_loss: f64,
    pub val_loss: f64,
    pub lr: f64,
}

pub fn write_log_csv<W: Write>(log: &[EpochLog], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for row in log {
        w.serialize(row)?;
    }
    w.flush().map_err(|e| Error::io("<log>", e))?;
    Ok(())
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    /// Parameters from the epoch with the lowest validation loss.
    pub network: Network,
    pub best_epoch: usize,
    /// Parameters after the last epoch.
    pub final_network: Network,
    pub log: Vec<EpochLog>,
}

/// Inputs and class labels of one split.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub inputs: Vec<Planes>,
    pub labels: Vec<usize>,
}

impl Dataset {
    pub fn from_split(corpus: &Corpus, split: Split, mode: InputMode, phase_mode: PhaseMode) -> Result<Self> {
        let mut inputs = Vec::new();
        let mut labels = Vec::new();
        for (entry, image) in corpus.split(split) {
            inputs.push(mode.planes(image, phase_mode)?);
            labels.push(entry.class);
        }
        Ok(Self { inputs, labels })
    }

    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    /// Mean loss over the whole set.
    pub fn loss(&self, net: &Network) -> Result<f64> {
        let refs: Vec<&Planes> = self.inputs.iter().collect();
        net.loss(&refs, &self.labels)
    }
}

/// Adam + plateau halving; returns the best-validation parameters.
pub fn train(net: &NetConfig, tc: &TrainConfig, train_set: &Dataset, val_set: &Dataset) -> Result<TrainOutcome> {
    tc.validate()?;
    net.validate()?;
    if train_set.is_empty() || val_set.is_empty() {
        return Err(invalid!("training needs non-empty train and val splits"));
    }
    let mut network = Network::init(net.clone(), tc.seed)?;
    let mut adam = Adam::new(network.params().len(), tc.beta1, tc.beta2, tc.epsilon);
    let mut scheduler = PlateauScheduler::new(tc.learning_rate, tc.patience, tc.factor);
    let mut best = (f64::INFINITY, 0usize, network.clone());
    let mut log = Vec::new();
    let mut order: Vec<usize> = (0..train_set.len()).collect();
    let diverged = |epoch: usize, log: &Vec<EpochLog>| Error::TrainingDivergence {
        epoch,
        last_good_epoch: log.last().map(|l: &EpochLog| l.epoch),
    };

    for epoch in 1..=tc.max_epochs {
        let lr = scheduler.lr();
        order.sort_unstable();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(mix_seed(tc.seed, epoch as u64)));
        let mut loss_sum = 0.0;
        for batch in order.chunks(tc.batch_size) {
            let inputs: Vec<&Planes> = batch.iter().map(|&i| &train_set.inputs[i]).collect();
            let labels: Vec<usize> = batch.iter().map(|&i| train_set.labels[i]).collect();
            let (loss, grad) = match network.loss_and_grad(&inputs, &labels) {
                Err(Error::TrainingDivergence { .. }) => return Err(diverged(epoch, &log)),
                other => other?,
            };
            loss_sum += loss * batch.len() as f64;
            adam.step(network.params_mut(), &grad, lr);
        }
        let train_loss = loss_sum / train_set.len() as f64;
        let val_loss = match val_set.loss(&network) {
            Err(Error::TrainingDivergence { .. }) => return Err(diverged(epoch, &log)),
            other => other?,
        };
        log.push(EpochLog {
            epoch,
            train_loss,
            val_loss,
            lr,
        });
        if val_loss < best.0 {
            best = (val_loss, epoch, network.clone());
        }
        if scheduler.step(val_loss) < tc.min_lr {
            break;
        }
    }
    Ok(TrainOutcome {
        network: best.2,
        best_epoch: best.1,
        final_network: network,
        log,
    })
}
