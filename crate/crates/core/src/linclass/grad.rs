//! Softmax cross-entropy over an averaged embedding, generic over the float
//! type so the same arithmetic drives f32 training and f64 gradient checks.

use num_traits::Float;

/// Mean of the input rows selected by `ids`. A zero vector when `ids` is empty.
pub fn mean_rows<F: Float>(input: &[F], dim: usize, ids: &[u32]) -> Vec<F> {
    let mut hidden = vec![F::zero(); dim];
    if ids.is_empty() {
        return hidden;
    }
    for &id in ids {
        let row = &input[id as usize * dim..(id as usize + 1) * dim];
        for (h, &w) in hidden.iter_mut().zip(row) {
            *h = *h + w;
        }
    }
    let scale = F::one() / F::from(ids.len()).unwrap();
    for h in &mut hidden {
        *h = *h * scale;
    }
    hidden
}

/// `output · hidden` for a row-major `labels × dim` output table.
pub fn scores<F: Float>(hidden: &[F], output: &[F]) -> Vec<F> {
    let dim = hidden.len();
    output
        .chunks_exact(dim)
        .map(|row| row.iter().zip(hidden).fold(F::zero(), |acc, (&w, &h)| acc + w * h))
        .collect()
}

/// Numerically stable softmax, in place.
pub fn softmax_in_place<F: Float>(values: &mut [F]) {
    let max = values.iter().copied().fold(F::neg_infinity(), F::max);
    let mut sum = F::zero();
    for v in values.iter_mut() {
        *v = (*v - max).exp();
        sum = sum + *v;
    }
    for v in values.iter_mut() {
        *v = *v / sum;
    }
}

/// Loss and gradients of one example with respect to the scores and the
/// hidden vector. The output-table gradient is the outer product
/// `score_grad ⊗ hidden`; each input row receives `hidden_grad / n` per
/// occurrence among the example's `n` feature ids.
#[derive(Clone, Debug)]
pub struct ExampleGradient<F> {
    pub loss: F,
    pub score_grad: Vec<F>,
    pub hidden_grad: Vec<F>,
}

pub fn example_gradient<F: Float>(hidden: &[F], output: &[F], label: usize) -> ExampleGradient<F> {
    let dim = hidden.len();
    let mut probs = scores(hidden, output);
    softmax_in_place(&mut probs);
    let loss = -probs[label].max(F::min_positive_value()).ln();
    let mut score_grad = probs;
    score_grad[label] = score_grad[label] - F::one();
    let mut hidden_grad = vec![F::zero(); dim];
    for (g, row) in score_grad.iter().zip(output.chunks_exact(dim)) {
        for (hg, &w) in hidden_grad.iter_mut().zip(row) {
            *hg = *hg + *g * w;
        }
    }
    ExampleGradient {
        loss,
        score_grad,
        hidden_grad,
    }
}

/// Cross-entropy of one example under full tables.
pub fn example_loss<F: Float>(input: &[F], output: &[F], dim: usize, ids: &[u32], label: usize) -> F {
    let hidden = mean_rows(input, dim, ids);
    let mut probs = scores(&hidden, output);
    softmax_in_place(&mut probs);
    -probs[label].ln()
}

/// Dense gradients of [`example_loss`] with respect to both tables.
pub fn full_gradient<F: Float>(
    input: &[F],
    output: &[F],
    dim: usize,
    ids: &[u32],
    label: usize,
) -> (F, Vec<F>, Vec<F>) {
    let hidden = mean_rows(input, dim, ids);
    let g = example_gradient(&hidden, output, label);
    let mut grad_output = vec![F::zero(); output.len()];
    for (j, &sg) in g.score_grad.iter().enumerate() {
        for k in 0..dim {
            grad_output[j * dim + k] = sg * hidden[k];
        }
    }
    let mut grad_input = vec![F::zero(); input.len()];
    if !ids.is_empty() {
        let inv = F::one() / F::from(ids.len()).unwrap();
        for &id in ids {
            for k in 0..dim {
                let at = id as usize * dim + k;
                grad_input[at] = grad_input[at] + g.hidden_grad[k] * inv;
            }
        }
    }
    (g.loss, grad_input, grad_output)
}

/// One SGD step on plain tables. Returns the example loss.
pub fn sgd_step<F: Float>(input: &mut [F], output: &mut [F], dim: usize, ids: &[u32], label: usize, lr: F) -> F {
    let hidden = mean_rows(input, dim, ids);
    let g = example_gradient(&hidden, output, label);
    for (row, &sg) in output.chunks_exact_mut(dim).zip(&g.score_grad) {
        let step = lr * sg;
        for (w, &h) in row.iter_mut().zip(&hidden) {
            *w = *w - step * h;
        }
    }
    if !ids.is_empty() {
        let scale = lr / F::from(ids.len()).unwrap();
        for &id in ids {
            let row = &mut input[id as usize * dim..(id as usize + 1) * dim];
            for (w, &hg) in row.iter_mut().zip(&g.hidden_grad) {
                *w = *w - scale * hg;
            }
        }
    }
    g.loss
}
