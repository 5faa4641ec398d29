/// Patience-based stopping on a monitored value.
#[derive(Debug, Clone, PartialEq)]
pub struct EarlyStopping {
    patience: usize,
    maximize: bool,
    best: Option<(usize, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Observation {
    /// Strictly better than every earlier value.
    pub improved: bool,
    /// `patience` epochs have passed since the best epoch.
    pub stop: bool,
}

impl EarlyStopping {
    pub fn new(patience: usize, maximize: bool) -> Self {
        EarlyStopping {
            patience,
            maximize,
            best: None,
        }
    }

    /// Best `(epoch, value)` so far.
    pub fn best(&self) -> Option<(usize, f64)> {
        self.best
    }

    /// Records `value` for 1-indexed `epoch`. `None` or NaN never improves.
    pub fn observe(&mut self, epoch: usize, value: Option<f64>) -> Observation {
        let improved = match (value.filter(|v| !v.is_nan()), self.best) {
            (Some(v), None) => Some(v),
            (Some(v), Some((_, b))) if (self.maximize && v > b) || (!self.maximize && v < b) => Some(v),
            _ => None,
        };
        if let Some(v) = improved {
            self.best = Some((epoch, v));
        }
        let best_epoch = self.best.map_or(0, |(e, _)| e);
        Observation {
            improved: improved.is_some(),
            stop: epoch - best_epoch >= self.patience,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plateau_after_three_stops_at_eight() {
        let mut es = EarlyStopping::new(5, true);
        let series = [0.1, 0.2, 0.3, 0.3, 0.25, 0.3, 0.1, 0.2, 0.9];
        let mut stopped = None;
        for (i, v) in series.iter().enumerate() {
            if es.observe(i + 1, Some(*v)).stop {
                stopped = Some(i + 1);
                break;
            }
        }
        assert_eq!(stopped, Some(8));
        assert_eq!(es.best(), Some((3, 0.3)));
    }

    #[test]
    fn minimize_and_missing() {
        let mut es = EarlyStopping::new(2, false);
        assert!(es.observe(1, None).improved.eq(&false));
        assert!(es.observe(2, Some(1.0)).improved);
        assert!(!es.observe(3, Some(f64::NAN)).improved);
        assert!(es.observe(4, Some(2.0)).stop);
    }
}
