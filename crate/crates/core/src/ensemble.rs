//! Hard-voting ensemble over independently fitted base learners.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::learners::{self, class_counts, Hyperparameters, Label, LearnerKind, LearnerSpec, TrainedModel};
use crate::sparse::SparseVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum TieBreak {
    /// The class seen more often at fit time; class 0 if that also ties.
    #[default]
    MajorityClassPrior,
    FixedZero,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VotingConfig {
    pub members: Vec<LearnerKind>,
    pub tie_break: TieBreak,
}

impl Default for VotingConfig {
    /// One learner per classifier family: the linear SVM stands in for the
    /// SVM family, giving seven voters.
    fn default() -> Self {
        Self {
            members: vec![
                LearnerKind::SvmLinear,
                LearnerKind::RandomForest,
                LearnerKind::Knn,
                LearnerKind::Mnb,
                LearnerKind::Mlp,
                LearnerKind::SgdHinge,
                LearnerKind::Adaboost,
            ],
            tie_break: TieBreak::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VotingModel {
    pub members: Vec<TrainedModel>,
    pub tie_break: TieBreak,
    /// `[n0, n1]` from the training labels.
    pub training_class_prior: [usize; 2],
}

/// Modal label of `member_labels`; exact ties are settled by `tie_break`.
pub fn hard_vote(member_labels: &[Label], tie_break: TieBreak, prior: [usize; 2]) -> Label {
    let ones = member_labels.iter().filter(|&&y| y == 1).count();
    let zeros = member_labels.len() - ones;
    match ones.cmp(&zeros) {
        std::cmp::Ordering::Greater => 1,
        std::cmp::Ordering::Less => 0,
        std::cmp::Ordering::Equal => match tie_break {
            TieBreak::MajorityClassPrior => Label::from(prior[1] > prior[0]),
            TieBreak::FixedZero => 0,
        },
    }
}

/// Specs for the configured members. Each member reuses `seed` as its base
/// seed; [`fit_voting`] derives per-member seeds from it.
pub fn member_specs(config: &VotingConfig, hyperparameters: &Hyperparameters, seed: u64) -> Vec<LearnerSpec> {
    config
        .members
        .iter()
        .map(|&kind| LearnerSpec {
            kind,
            hyperparameters: hyperparameters.clone(),
            seed,
        })
        .collect()
}

/// Fits each member on the full training set with its own derived seed.
pub fn fit_voting(
    specs: &[LearnerSpec],
    tie_break: TieBreak,
    vectors: &[SparseVector],
    labels: &[Label],
    n_features: usize,
) -> Result<VotingModel> {
    if specs.len() < 2 {
        return Err(Error::Config(format!(
            "a voting ensemble needs at least two members, got {}",
            specs.len()
        )));
    }
    if let Some(s) = specs.iter().find(|s| s.kind == LearnerKind::Voting) {
        return Err(Error::Config(format!("nested voting member with seed {}", s.seed)));
    }
    learners::check_training_set(vectors, labels, n_features)?;
    let members = specs
        .par_iter()
        .map(|spec| {
            let member = LearnerSpec {
                seed: spec.member_seed(),
                ..spec.clone()
            };
            learners::fit(&member, vectors, labels, n_features)
                .map_err(|e| Error::Fit(format!("voting member {}: {e}", spec.kind)))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(VotingModel {
        members,
        tie_break,
        training_class_prior: class_counts(labels),
    })
}

impl VotingModel {
    pub fn n_features(&self) -> usize {
        self.members[0].n_features()
    }

    pub fn member_predictions(&self, x: &SparseVector) -> Vec<Label> {
        self.members.iter().map(|m| m.predict_unchecked(x)).collect()
    }

    pub(crate) fn predict_unchecked(&self, x: &SparseVector) -> Label {
        hard_vote(&self.member_predictions(x), self.tie_break, self.training_class_prior)
    }

    pub fn predict(&self, x: &SparseVector) -> Result<Label> {
        x.check_dim(self.n_features())?;
        Ok(self.predict_unchecked(x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learners::fixtures::separable;
    use proptest::prelude::*;

    #[test]
    fn vote_examples() {
        let prior = [6, 4];
        assert_eq!(hard_vote(&[1, 1, 0], TieBreak::MajorityClassPrior, prior), 1);
        assert_eq!(hard_vote(&[0, 0, 0, 0], TieBreak::MajorityClassPrior, prior), 0);
        assert_eq!(hard_vote(&[1, 1, 0, 0], TieBreak::MajorityClassPrior, prior), 0);
        assert_eq!(hard_vote(&[1, 1, 0, 0], TieBreak::MajorityClassPrior, [3, 7]), 1);
        assert_eq!(hard_vote(&[1, 1, 0, 0], TieBreak::MajorityClassPrior, [5, 5]), 0);
        assert_eq!(hard_vote(&[1, 0], TieBreak::FixedZero, [0, 9]), 0);
    }

    #[test]
    fn default_members_are_seven() {
        let (xs, ys) = separable(30, 1);
        let specs = member_specs(&VotingConfig::default(), &Hyperparameters::default(), 3);
        let model = fit_voting(&specs, TieBreak::default(), &xs, &ys, 2).unwrap();
        assert_eq!(model.members.len(), 7);
        assert_eq!(model.training_class_prior, [15, 15]);
    }

    #[test]
    fn single_member_is_rejected() {
        let (xs, ys) = separable(10, 1);
        let specs = vec![LearnerSpec::new(LearnerKind::Mnb, 0)];
        assert!(matches!(
            fit_voting(&specs, TieBreak::default(), &xs, &ys, 2),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn member_errors_are_tagged() {
        let (xs, ys) = separable(4, 1);
        // default k = 5 exceeds four samples
        let specs = vec![
            LearnerSpec::new(LearnerKind::Mnb, 0),
            LearnerSpec::new(LearnerKind::Knn, 0),
        ];
        let err = fit_voting(&specs, TieBreak::default(), &xs, &ys, 2).unwrap_err();
        assert!(err.to_string().contains("knn"), "{err}");
    }

    #[test]
    fn members_are_independent() {
        let (xs, ys) = separable(30, 2);
        let all = vec![
            LearnerSpec::new(LearnerKind::Mlp, 5),
            LearnerSpec::new(LearnerKind::RandomForest, 5),
            LearnerSpec::new(LearnerKind::SvmLinear, 5),
        ];
        let full = fit_voting(&all, TieBreak::default(), &xs, &ys, 2).unwrap();
        let reduced = fit_voting(&all[1..], TieBreak::default(), &xs, &ys, 2).unwrap();
        assert_eq!(full.members[1], reduced.members[0]);
        assert_eq!(full.members[2], reduced.members[1]);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn vote_is_permutation_invariant(
            labels in prop::collection::vec(0u8..=1, 1..12),
            prior in (0usize..20, 0usize..20),
            fixed in any::<bool>(),
            rot in 0usize..12,
        ) {
            let tb = if fixed { TieBreak::FixedZero } else { TieBreak::MajorityClassPrior };
            let prior = [prior.0, prior.1];
            let base = hard_vote(&labels, tb, prior);
            let mut rotated = labels.clone();
            rotated.rotate_left(rot % labels.len());
            let mut reversed = labels.clone();
            reversed.reverse();
            let mut sorted = labels.clone();
            sorted.sort();
            prop_assert_eq!(hard_vote(&rotated, tb, prior), base);
            prop_assert_eq!(hard_vote(&reversed, tb, prior), base);
            prop_assert_eq!(hard_vote(&sorted, tb, prior), base);

            let ones = labels.iter().filter(|&&y| y == 1).count();
            if 2 * ones > labels.len() {
                prop_assert_eq!(base, 1);
            } else if 2 * ones < labels.len() {
                prop_assert_eq!(base, 0);
            }
        }
    }
}
