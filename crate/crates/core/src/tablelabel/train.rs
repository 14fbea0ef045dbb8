use super::decode::viterbi_rows;
use super::features::{featurize, Feature, RowFeatures};
use super::{LabelError, LabelerModel, LineLabel, TrainingExample};

const F: usize = Feature::COUNT;
const L: usize = LineLabel::COUNT;

/// Fraction of rows labeled correctly by `model`.
pub fn accuracy(data: &[(Vec<RowFeatures>, Vec<LineLabel>)], model: &LabelerModel) -> f64 {
    let mut right = 0usize;
    let mut total = 0usize;
    for (rows, gold) in data {
        let pred = viterbi_rows(rows, model);
        right += pred.iter().zip(gold).filter(|(p, g)| p == g).count();
        total += gold.len();
    }
    if total == 0 {
        1.0
    } else {
        right as f64 / total as f64
    }
}

/// `w += scale * phi(rows, labels)`
fn add_features(model: &mut LabelerModel, rows: &[RowFeatures], labels: &[LineLabel], scale: f64) {
    for (i, (row, label)) in rows.iter().zip(labels).enumerate() {
        for f in row.active() {
            model.emit[f as usize][*label as usize] += scale;
        }
        if i > 0 {
            model.trans[labels[i - 1] as usize][*label as usize] += scale;
        }
    }
}

fn accumulate(sum: &mut LabelerModel, w: &LabelerModel) {
    for f in 0..F {
        for l in 0..L {
            sum.emit[f][l] += w.emit[f][l];
        }
    }
    for a in 0..L {
        for b in 0..L {
            sum.trans[a][b] += w.trans[a][b];
        }
    }
}

/// Averaged structured perceptron, starting from the zero model and
/// visiting examples in the given order. Returns the averaged weights unless
/// the final or zero weights fit the training set strictly better.
pub fn train_labeler(examples: &[TrainingExample], epochs: usize) -> Result<LabelerModel, LabelError> {
    if examples.is_empty() {
        return Err(LabelError::EmptyTrainingSet);
    }
    let mut data = Vec::with_capacity(examples.len());
    for ex in examples {
        let rows = featurize(&ex.grid)?;
        if rows.len() != ex.labels.len() {
            return Err(LabelError::LengthMismatch { rows: rows.len(), labels: ex.labels.len() });
        }
        data.push((rows, ex.labels.clone()));
    }

    let mut w = LabelerModel::zero();
    let mut sum = LabelerModel::zero();
    let mut steps = 0usize;
    for _ in 0..epochs.max(1) {
        for (rows, gold) in &data {
            let pred = viterbi_rows(rows, &w);
            if pred != *gold {
                add_features(&mut w, rows, gold, 1.0);
                add_features(&mut w, rows, &pred, -1.0);
            }
            accumulate(&mut sum, &w);
            steps += 1;
        }
    }
    let mut avg = sum;
    for v in avg.emit.iter_mut().flatten().chain(avg.trans.iter_mut().flatten()) {
        *v /= steps as f64;
    }

    let candidates = [avg, w, LabelerModel::zero()];
    let mut best = 0;
    let mut best_acc = accuracy(&data, &candidates[0]);
    for (i, m) in candidates.iter().enumerate().skip(1) {
        let acc = accuracy(&data, m);
        if acc > best_acc {
            best = i;
            best_acc = acc;
        }
    }
    Ok(candidates.into_iter().nth(best).expect("three candidates"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::docmodel::DocId;
    use crate::ingest::TableGrid;
    use LineLabel::*;

    fn example(rows: &[&[&str]], labels: &[LineLabel]) -> TrainingExample {
        TrainingExample {
            grid: TableGrid::new(DocId::new("T"), rows.iter().map(|r| r.iter().map(|s| s.to_string()).collect()).collect()),
            labels: labels.to_vec(),
        }
    }

    fn relabel_accuracy(examples: &[TrainingExample], model: &LabelerModel) -> f64 {
        let data: Vec<_> = examples.iter().map(|e| (featurize(&e.grid).unwrap(), e.labels.clone())).collect();
        accuracy(&data, model)
    }

    #[test]
    fn separable_example_is_learned() {
        let ex = vec![example(
            &[&["Year", "Area"], &["2016", "1518"], &["2017", "1600"], &["Source: survey, 2018 ed."]],
            &[ColumnHeader, Data, Data, Note],
        )];
        let m = train_labeler(&ex, 5).unwrap();
        assert_eq!(viterbi_rows(&featurize(&ex[0].grid).unwrap(), &m), ex[0].labels);
        assert_eq!(relabel_accuracy(&ex, &m), 1.0);
    }

    #[test]
    fn empty_training_set() {
        assert_eq!(train_labeler(&[], 3), Err(LabelError::EmptyTrainingSet));
    }

    #[test]
    fn conflicting_labels_cap_accuracy() {
        let rows: &[&[&str]] = &[&["Area"], &["12"]];
        let ex = vec![example(rows, &[ColumnHeader, Data]), example(rows, &[Data, ColumnHeader])];
        let m = train_labeler(&ex, 10).unwrap();
        assert!(relabel_accuracy(&ex, &m) <= 0.5);
    }

    #[test]
    fn never_worse_than_zero_model_and_deterministic() {
        let ex = vec![
            example(&[&["Region", "Area"], &["NSW", "1,200"], &["QLD", "800"]], &[ColumnHeader, Data, Data]),
            example(&[&["Crop", "Yield"], &["Cotton"], &["2016", "10.2"], &["Note: dryland only"]], &[
                ColumnHeader,
                RowHeaderLine,
                Data,
                Note,
            ]),
            example(&[&["1", "2"], &["3", "4"]], &[Data, Data]),
        ];
        let zero = relabel_accuracy(&ex, &LabelerModel::zero());
        for epochs in 1..6 {
            let m = train_labeler(&ex, epochs).unwrap();
            assert!(relabel_accuracy(&ex, &m) >= zero);
            assert_eq!(train_labeler(&ex, epochs).unwrap(), m);
        }
    }

    #[test]
    fn mismatched_labels() {
        let ex = vec![example(&[&["a"], &["1"]], &[Data])];
        assert_eq!(train_labeler(&ex, 1), Err(LabelError::LengthMismatch { rows: 2, labels: 1 }));
    }
}
