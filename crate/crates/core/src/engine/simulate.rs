use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp;

use super::{reduce_instantaneous, step_distribution, BrsSpec, EngineError, EngineOptions, Label, Semantics};
use crate::bigraph::Bigraph;

#[derive(Debug, Clone)]
pub struct SimStep {
    pub state: Bigraph,
    /// Rules realising the step, comma separated.
    pub rule: String,
    pub label: String,
    /// Elapsed time after the step (stochastic systems only).
    pub time: f64,
}

#[derive(Debug, Clone)]
pub struct SimTrace {
    pub seed: u64,
    pub init: Bigraph,
    pub steps: Vec<SimStep>,
    pub time: f64,
    /// True when the run ended in a state with no enabled rule.
    pub deadlock: bool,
}

impl SimTrace {
    /// Every visited state, the initial one first.
    pub fn states(&self) -> impl Iterator<Item = &Bigraph> {
        std::iter::once(&self.init).chain(self.steps.iter().map(|s| &s.state))
    }
}

/// A single random run of at most `max_steps` steps.
pub fn simulate(spec: &BrsSpec, max_steps: usize, seed: u64, opts: &EngineOptions) -> Result<SimTrace, EngineError> {
    if !spec.init.is_ground() {
        return Err(EngineError::InitNotGround);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let init = reduce_instantaneous(&spec.init, spec, opts)?;
    let mut state = init.clone();
    let mut steps = Vec::new();
    let mut time = 0.0;
    let mut deadlock = false;
    while steps.len() < max_steps {
        let mut succs = step_distribution::<f64>(&state, spec, opts)?;
        if succs.is_empty() {
            deadlock = true;
            break;
        }
        if spec.semantics == Semantics::Abrs {
            let mut actions: Vec<String> = Vec::new();
            for s in &succs {
                let a = s.label.action().unwrap_or_default().to_string();
                if !actions.contains(&a) {
                    actions.push(a);
                }
            }
            let chosen = &actions[rng.random_range(0..actions.len())];
            succs.retain(|s| s.label.action().unwrap_or_default() == chosen);
        }
        let pick = match spec.semantics {
            Semantics::Brs => rng.random_range(0..succs.len()),
            _ => {
                let weights: Vec<f64> = succs.iter().map(|s| *s.label.value().unwrap_or(&1.0)).collect();
                if spec.semantics == Semantics::Sbrs {
                    let total: f64 = weights.iter().sum();
                    let dwell = Exp::new(total).expect("positive total rate").sample(&mut rng);
                    time += dwell;
                }
                WeightedIndex::new(&weights)
                    .expect("positive weights")
                    .sample(&mut rng)
            }
        };
        let s = succs.swap_remove(pick);
        let rule = s.rules.iter().cloned().collect::<Vec<_>>().join(",");
        let label = match &s.label {
            Label::None => "-".to_string(),
            l => l.render(),
        };
        state = s.state.clone();
        steps.push(SimStep {
            state: s.state,
            rule,
            label,
            time,
        });
    }
    Ok(SimTrace {
        seed,
        init,
        steps,
        time,
        deadlock,
    })
}
