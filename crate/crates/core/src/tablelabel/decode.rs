use crate::ingest::TableGrid;

use super::features::{featurize, RowFeatures};
use super::{LabelError, LabelerModel, LineLabel};

const L: usize = LineLabel::COUNT;

/// Total score of a label sequence: emissions row by row, then transitions.
pub fn sequence_score(rows: &[RowFeatures], labels: &[LineLabel], model: &LabelerModel) -> f64 {
    let mut score = 0.0;
    for (i, (row, label)) in rows.iter().zip(labels).enumerate() {
        score += model.emission(row, *label);
        if i > 0 {
            score += model.transition_weight(labels[i - 1], *label);
        }
    }
    score
}

/// Max-scoring sequence for precomputed features. Among equal-scoring
/// sequences the lexicographically smallest one (label order, first row
/// first) is returned.
///
/// A backward pass computes the best completion score from every
/// (row, label); the forward pass then takes the smallest label whose
/// completion reaches the optimum.
pub fn viterbi_rows(rows: &[RowFeatures], model: &LabelerModel) -> Vec<LineLabel> {
    let n = rows.len();
    if n == 0 {
        return Vec::new();
    }
    let emit: Vec<[f64; L]> =
        rows.iter().map(|r| LineLabel::ALL.map(|l| model.emission(r, l))).collect();
    let mut best = vec![[0.0f64; L]; n];
    best[n - 1] = emit[n - 1];
    for i in (0..n - 1).rev() {
        for a in 0..L {
            let tail = (0..L)
                .map(|b| model.trans[a][b] + best[i + 1][b])
                .fold(f64::NEG_INFINITY, f64::max);
            best[i][a] = emit[i][a] + tail;
        }
    }
    let argmax_first = |scores: [f64; L]| {
        let top = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        scores.iter().position(|s| *s == top).expect("finite scores")
    };
    let mut out = Vec::with_capacity(n);
    let mut prev = argmax_first(best[0]);
    out.push(LineLabel::ALL[prev]);
    for row in &best[1..] {
        let scores: [f64; L] = std::array::from_fn(|b| model.trans[prev][b] + row[b]);
        prev = argmax_first(scores);
        out.push(LineLabel::ALL[prev]);
    }
    out
}

/// Labels every row of `grid`.
pub fn viterbi_label(grid: &TableGrid, model: &LabelerModel) -> Result<Vec<LineLabel>, LabelError> {
    Ok(viterbi_rows(&featurize(grid)?, model))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::docmodel::DocId;
    use crate::tablelabel::Feature;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn grid(rows: &[&[&str]]) -> TableGrid {
        TableGrid::new(DocId::new("T"), rows.iter().map(|r| r.iter().map(|s| s.to_string()).collect()).collect())
    }

    /// Exhaustive search over all 4^n sequences, visited in lexicographic
    /// order so the first maximum is the tie-break winner.
    pub(crate) fn brute_force(rows: &[RowFeatures], model: &LabelerModel) -> (Vec<LineLabel>, f64) {
        let n = rows.len();
        let mut best: Option<(Vec<LineLabel>, f64)> = None;
        for code in 0..L.pow(n as u32) {
            let labels: Vec<LineLabel> =
                (0..n).map(|i| LineLabel::ALL[(code / L.pow((n - 1 - i) as u32)) % L]).collect();
            let s = sequence_score(rows, &labels, model);
            if best.as_ref().is_none_or(|(_, b)| s > *b) {
                best = Some((labels, s));
            }
        }
        best.unwrap()
    }

    /// Weights on a quarter grid keep every sum exact, so ties are real ties.
    pub(crate) fn random_model(rng: &mut impl Rng) -> LabelerModel {
        let mut m = LabelerModel::zero();
        for w in m.emit.iter_mut().flatten().chain(m.trans.iter_mut().flatten()) {
            *w = rng.gen_range(-8i32..=8) as f64 / 4.0;
        }
        m
    }

    #[test]
    fn dominating_weights() {
        let mut m = LabelerModel::zero();
        m.set_feature_weight(Feature::IsFirstRow, LineLabel::ColumnHeader, 10.0);
        m.set_feature_weight(Feature::MajorityNumeric, LineLabel::Data, 10.0);
        let labels = viterbi_label(&grid(&[&["Year", "Area"], &["2016", "1518"]]), &m).unwrap();
        assert_eq!(labels, [LineLabel::ColumnHeader, LineLabel::Data]);
    }

    #[test]
    fn zero_model_takes_first_label() {
        let labels = viterbi_label(&grid(&[&["a"], &["1"], &["b"]]), &LabelerModel::zero()).unwrap();
        assert_eq!(labels, [LineLabel::ColumnHeader; 3]);
    }

    #[test]
    fn empty_grid_is_an_error() {
        assert_eq!(viterbi_label(&grid(&[]), &LabelerModel::zero()), Err(LabelError::EmptyGrid));
    }

    #[test]
    fn five_row_fixture_matches_enumeration() {
        let g = grid(&[
            &["", "Irrigated", "Dryland"],
            &["New South Wales"],
            &["2015-16", "1,200", "300"],
            &["2016-17", "1,518", "410"],
            &["Source: ABARES (2017)"],
        ]);
        let rows = featurize(&g).unwrap();
        let model = LabelerModel::builtin();
        let (oracle, score) = brute_force(&rows, &model);
        let got = viterbi_rows(&rows, &model);
        assert_eq!(got, oracle);
        assert_eq!(sequence_score(&rows, &got, &model), score);
        assert_eq!(
            got,
            [LineLabel::ColumnHeader, LineLabel::RowHeaderLine, LineLabel::Data, LineLabel::Data, LineLabel::Note]
        );
    }

    #[test]
    fn random_models_match_enumeration() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for _ in 0..200 {
            let n = rng.gen_range(1..=6);
            let rows: Vec<RowFeatures> = (0..n)
                .map(|_| {
                    let on: Vec<Feature> = Feature::ALL.into_iter().filter(|_| rng.gen_bool(0.4)).collect();
                    RowFeatures::from_active(&on)
                })
                .collect();
            let model = random_model(&mut rng);
            let (oracle, score) = brute_force(&rows, &model);
            let got = viterbi_rows(&rows, &model);
            assert_eq!(sequence_score(&rows, &got, &model), score);
            assert_eq!(got, oracle);
        }
    }

    proptest! {
        #[test]
        fn one_label_per_row(cells in proptest::collection::vec(
            proptest::collection::vec(prop::sample::select(vec!["", "Area", "1,200", "2016", "n/a", "Note: x"]), 1..4),
            1..8,
        )) {
            let g = TableGrid::new(DocId::new("T"), cells.iter().map(|r| r.iter().map(|s| s.to_string()).collect()).collect());
            let labels = viterbi_label(&g, &LabelerModel::builtin()).unwrap();
            prop_assert_eq!(labels.len(), cells.len());
        }
    }
}
