use serde::{Deserialize, Serialize};

use super::{
    run_round_one, run_round_two_alice, run_round_two_charlie, Outcome, Pattern, ProtocolError,
    RoundReport, WCoefficients,
};

/// Picks the round for a (possibly signed) residual state.
///
/// After the phase flip, `|a| = |b|` goes to Charlie alone, `|b| = |c|` to
/// Alice alone, and general or already maximal states run the full round.
pub fn next_round(w: &WCoefficients) -> Result<RoundReport, ProtocolError> {
    let (n, _) = w.sign_normalized();
    match n.pattern() {
        Pattern::General | Pattern::Maximal => run_round_one(&n),
        Pattern::TwoEqualAB => run_round_two_charlie(&n),
        Pattern::TwoEqualBC => run_round_two_alice(&n),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecursionNode {
    /// Outcomes from the root down to and including this node.
    pub path: Vec<Outcome>,
    /// Absolute probability of reaching this node.
    pub probability: f64,
    pub posterior: WCoefficients,
    pub is_success: bool,
    /// 1-based round that produced this node.
    pub round: usize,
    pub children: Vec<RecursionNode>,
}

impl RecursionNode {
    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecursionResult {
    pub input: WCoefficients,
    pub depth: usize,
    pub total_success_probability: f64,
    /// Cumulative success probability after rounds `1..=depth`.
    pub success_by_depth: Vec<f64>,
    /// Branches of the first round with their expanded subtrees.
    pub tree: Vec<RecursionNode>,
}

impl RecursionResult {
    pub fn leaves(&self) -> Vec<&RecursionNode> {
        fn walk<'a>(n: &'a RecursionNode, out: &mut Vec<&'a RecursionNode>) {
            if n.is_leaf() {
                out.push(n);
            }
            for c in &n.children {
                walk(c, out);
            }
        }
        let mut out = Vec::new();
        for n in &self.tree {
            walk(n, &mut out);
        }
        out
    }

    /// Probability left in failure leaves that were not expanded further.
    pub fn failure_mass(&self) -> f64 {
        self.leaves()
            .iter()
            .filter(|n| !n.is_success)
            .map(|n| n.probability)
            .sum()
    }

    pub fn node_count(&self) -> usize {
        fn count(n: &RecursionNode) -> usize {
            1 + n.children.iter().map(count).sum::<usize>()
        }
        self.tree.iter().map(count).sum()
    }
}

/// Expands every failure branch until `max_depth` rounds have been run along each path.
///
/// Failure leaves whose next round would be degenerate (a coefficient lost to
/// underflow) stay unexpanded. Only a degenerate input is an error, and
/// only when at least one round is requested.
pub fn recurse(w: &WCoefficients, max_depth: usize) -> Result<RecursionResult, ProtocolError> {
    let mut gains = vec![0.0; max_depth];
    let tree = if max_depth == 0 {
        Vec::new()
    } else {
        if w.is_degenerate() {
            return Err(ProtocolError::Degenerate(
                "concentration needs all three coefficients nonzero",
            ));
        }
        let first = next_round(w)?;
        expand(&first, &[], 1.0, 1, max_depth, &mut gains)
    };
    let success_by_depth: Vec<f64> = gains
        .iter()
        .scan(0.0, |acc, g| {
            *acc += g;
            Some(*acc)
        })
        .collect();
    Ok(RecursionResult {
        input: *w,
        depth: max_depth,
        total_success_probability: success_by_depth.last().copied().unwrap_or(0.0),
        success_by_depth,
        tree,
    })
}

fn expand(
    report: &RoundReport,
    prefix: &[Outcome],
    mass: f64,
    round: usize,
    max_depth: usize,
    gains: &mut [f64],
) -> Vec<RecursionNode> {
    report
        .branches
        .iter()
        .map(|branch| {
            let mut path = prefix.to_vec();
            path.push(branch.outcome);
            let probability = mass * branch.probability;
            let mut children = Vec::new();
            if branch.is_success {
                gains[round - 1] += probability;
            } else if round < max_depth && probability > 0.0 {
                if let Ok(next) = next_round(&branch.posterior) {
                    children = expand(&next, &path, probability, round + 1, max_depth, gains);
                }
            }
            RecursionNode {
                path,
                probability,
                posterior: branch.posterior,
                is_success: branch.is_success,
                round,
                children,
            }
        })
        .collect()
}
