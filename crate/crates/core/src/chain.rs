//! Dynamic programs over a linear chain of the three language tags.
//!
//! Both the HMM (log-probabilities) and the CRF (unnormalized scores)
//! reduce a sentence to a [`ChainScores`] lattice and share these routines.

use crate::corpus::{LangTag, NUM_TAGS};
use crate::linalg::log_sum_exp;

pub type TagVec = [f64; NUM_TAGS];

#[derive(Debug, Clone, PartialEq)]
pub struct ChainScores {
    pub start: TagVec,
    /// `transition[prev][next]`
    pub transition: [TagVec; NUM_TAGS],
    /// One row per position.
    pub emission: Vec<TagVec>,
}

/// Per-position and per-edge posteriors of a chain.
#[derive(Debug, Clone, PartialEq)]
pub struct Marginals {
    pub log_z_forward: f64,
    pub log_z_backward: f64,
    pub unary: Vec<TagVec>,
    /// `pairwise[t][i][j]` is the probability of tag i at t and j at t + 1.
    pub pairwise: Vec<[TagVec; NUM_TAGS]>,
}

impl ChainScores {
    pub fn len(&self) -> usize {
        self.emission.len()
    }

    pub fn is_empty(&self) -> bool {
        self.emission.is_empty()
    }

    /// Score of one tag path, accumulated in the same order as Viterbi so
    /// equal paths compare bitwise equal.
    pub fn path_score(&self, tags: &[LangTag]) -> f64 {
        assert_eq!(tags.len(), self.len(), "path length");
        let mut prev = tags[0].index();
        let mut score = self.start[prev] + self.emission[0][prev];
        for (t, tag) in tags.iter().enumerate().skip(1) {
            let j = tag.index();
            score = score + self.transition[prev][j] + self.emission[t][j];
            prev = j;
        }
        score
    }

    /// Highest-scoring path and its score. Ties resolve to the lower tag
    /// both at the final position and at every back-pointer.
    pub fn viterbi(&self) -> (Vec<LangTag>, f64) {
        let n = self.len();
        assert!(n > 0, "viterbi on empty chain");
        let mut delta: TagVec = std::array::from_fn(|j| self.start[j] + self.emission[0][j]);
        let mut back = vec![[0usize; NUM_TAGS]; n];
        for t in 1..n {
            let mut next = [0.0; NUM_TAGS];
            for j in 0..NUM_TAGS {
                let mut best = 0;
                let mut best_score = delta[0] + self.transition[0][j];
                for i in 1..NUM_TAGS {
                    let s = delta[i] + self.transition[i][j];
                    if s > best_score {
                        best = i;
                        best_score = s;
                    }
                }
                back[t][j] = best;
                next[j] = best_score + self.emission[t][j];
            }
            delta = next;
        }
        let mut last = 0;
        for j in 1..NUM_TAGS {
            if delta[j] > delta[last] {
                last = j;
            }
        }
        let score = delta[last];
        let mut path = vec![LangTag::En; n];
        let mut cur = last;
        for t in (0..n).rev() {
            path[t] = LangTag::from_index(cur);
            cur = back[t][cur];
        }
        (path, score)
    }

    /// Log forward messages, `alpha[t][j]`.
    pub fn forward(&self) -> Vec<TagVec> {
        let n = self.len();
        let mut alpha = Vec::with_capacity(n);
        if n == 0 {
            return alpha;
        }
        alpha.push(std::array::from_fn(|j| self.start[j] + self.emission[0][j]));
        for t in 1..n {
            let prev = &alpha[t - 1];
            let row = std::array::from_fn(|j| {
                let terms: TagVec = std::array::from_fn(|i| prev[i] + self.transition[i][j]);
                log_sum_exp(&terms) + self.emission[t][j]
            });
            alpha.push(row);
        }
        alpha
    }

    /// Log backward messages, `beta[t][i]`, with `beta[n-1] = 0`.
    pub fn backward(&self) -> Vec<TagVec> {
        let n = self.len();
        let mut beta = vec![[0.0; NUM_TAGS]; n];
        for t in (0..n.saturating_sub(1)).rev() {
            let next = beta[t + 1];
            beta[t] = std::array::from_fn(|i| {
                let terms: TagVec = std::array::from_fn(|j| {
                    self.transition[i][j] + self.emission[t + 1][j] + next[j]
                });
                log_sum_exp(&terms)
            });
        }
        beta
    }

    pub fn log_partition(&self) -> f64 {
        self.forward().last().map_or(0.0, |row| log_sum_exp(row))
    }

    pub fn marginals(&self) -> Marginals {
        let n = self.len();
        let alpha = self.forward();
        let beta = self.backward();
        let log_z_forward = alpha.last().map_or(0.0, |row| log_sum_exp(row));
        let log_z_backward = if n == 0 {
            0.0
        } else {
            let terms: TagVec =
                std::array::from_fn(|j| self.start[j] + self.emission[0][j] + beta[0][j]);
            log_sum_exp(&terms)
        };
        let unary = (0..n)
            .map(|t| std::array::from_fn(|j| (alpha[t][j] + beta[t][j] - log_z_forward).exp()))
            .collect();
        let pairwise = (0..n.saturating_sub(1))
            .map(|t| {
                std::array::from_fn(|i| {
                    std::array::from_fn(|j| {
                        (alpha[t][i]
                            + self.transition[i][j]
                            + self.emission[t + 1][j]
                            + beta[t + 1][j]
                            - log_z_forward)
                            .exp()
                    })
                })
            })
            .collect();
        Marginals {
            log_z_forward,
            log_z_backward,
            unary,
            pairwise,
        }
    }

    /// Per-position argmax of the posterior marginals, lower tag on ties.
    pub fn posterior_decode(&self) -> Vec<LangTag> {
        self.marginals()
            .unary
            .iter()
            .map(|row| LangTag::from_index(crate::linalg::argmax(row)))
            .collect()
    }
}
