use std::collections::BTreeSet;

use super::Trace;
use crate::model::Location;
use crate::scalar::Scalar;

/// First moment some agent holds the information of every agent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConvergecastWitness {
    pub agent: usize,
    pub time: Scalar,
    pub location: Location,
}

/// On failure returns the maximal information sets that were reached.
pub fn verify_convergecast(tr: &Trace) -> Result<ConvergecastWitness, Vec<Vec<usize>>> {
    let n = tr.agent_count();
    if n == 1 {
        return Ok(ConvergecastWitness { agent: 1, time: Scalar::zero(), location: tr.start[0].clone() });
    }
    let best = tr
        .timeline
        .iter()
        .filter(|e| e.info.len() == n)
        .min_by(|x, y| x.time.cmp(&y.time).then(x.agent.cmp(&y.agent)));
    if let Some(e) = best {
        return Ok(ConvergecastWitness {
            agent: e.agent,
            time: e.time.clone(),
            location: e.location.clone(),
        });
    }
    let sets: BTreeSet<&BTreeSet<usize>> = tr.info.iter().collect();
    let maximal = sets
        .iter()
        .filter(|s| !sets.iter().any(|t| t.len() > s.len() && s.is_subset(t)))
        .map(|s| s.iter().copied().collect())
        .collect();
    Err(maximal)
}

/// On failure returns the agents that never learn the source information.
pub fn verify_broadcast(tr: &Trace, source: usize) -> Result<(), Vec<usize>> {
    let missing: Vec<usize> = tr
        .info
        .iter()
        .enumerate()
        .filter(|(_, s)| !s.contains(&source))
        .map(|(i, _)| i + 1)
        .collect();
    if missing.is_empty() {
        Ok(())
    } else {
        Err(missing)
    }
}

pub fn max_power_used(tr: &Trace) -> (Scalar, Vec<Scalar>) {
    let max = tr.power.iter().max().cloned().unwrap_or_else(Scalar::zero);
    (max, tr.power.clone())
}
