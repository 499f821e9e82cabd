#pragma once

#include <deque>
#include <stdexcept>
#include <vector>

#include "hemcnn/augment.hpp"
#include "hemcnn/model.hpp"
#include "hemcnn/nn.hpp"
#include "hemcnn/rng.hpp"

namespace hemcnn {

// Splits a shuffled example order into label-balanced batches. Each slot is
// filled from whichever class has more examples left (tie -> Left), which
// yields strict 5/5 batches on a balanced pool and keeps the tail batches
// balanced to within one example when the pool is uneven.
inline std::vector<std::vector<int>> balanced_batches(const std::vector<int>& order,
                                                      const std::vector<Hand>& labels,
                                                      int batch_size) {
  std::deque<int> left, right;
  for (int idx : order) (labels[idx] == Hand::Left ? left : right).push_back(idx);
  std::vector<std::vector<int>> batches;
  while (!left.empty() || !right.empty()) {
    std::vector<int> batch;
    while (static_cast<int>(batch.size()) < batch_size && (!left.empty() || !right.empty())) {
      const bool take_left =
          right.empty() || (!left.empty() && left.size() >= right.size());
      auto& q = take_left ? left : right;
      batch.push_back(q.front());
      q.pop_front();
    }
    batches.push_back(std::move(batch));
  }
  return batches;
}

struct TrainResult {
  std::vector<double> epoch_loss;  // mean cross-entropy per epoch
};

// Mini-batch Adam training with hemisphere dropout. Per epoch: shuffle, form
// balanced batches, and for each batch average the cross-entropy gradient
// over its (dropout-masked) examples and take one optimizer step at the
// epoch's learning rate. Fully deterministic given the rng stream.
inline TrainResult train(HemCNNModel& model, const std::vector<Example>& examples,
                         const TrainSchedule& schedule, const DropoutConfig& dropout,
                         Rng& rng) {
  schedule.validate();
  dropout.validate();
  if (examples.empty()) throw std::invalid_argument("train: no examples");
  bool has_left = false, has_right = false;
  for (const auto& ex : examples) (ex.label == Hand::Left ? has_left : has_right) = true;
  if (!has_left || !has_right)
    throw std::invalid_argument("train: examples must contain both classes");

  std::vector<Hand> labels(examples.size());
  for (std::size_t i = 0; i < examples.size(); ++i) labels[i] = examples[i].label;

  std::vector<double> params = get_params(model);
  AdamState adam(params.size());
  TrainResult result;

  std::vector<int> order(examples.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);

  for (int epoch = 0; epoch < schedule.epochs; ++epoch) {
    const double lr = lr_at_epoch(schedule, epoch);
    rng.shuffle(order);
    double epoch_loss_sum = 0.0;
    for (const auto& batch : balanced_batches(order, labels, schedule.batch_size)) {
      std::vector<double> grad(params.size(), 0.0);
      const double inv = 1.0 / static_cast<double>(batch.size());
      for (int idx : batch) {
        const Example& ex = examples[idx];
        const Tensor2 x = hemisphere_dropout(ex.x, dropout, rng);
        const ForwardTrace t = forward(model, x);
        const int label = ex.label == Hand::Left ? 0 : 1;
        epoch_loss_sum += nll_loss(t.logp, label);
        backward_accumulate(model, x, t, label, inv, grad);
      }
      adam_step(params, grad, adam, lr);
      set_params(model, params);
    }
    result.epoch_loss.push_back(epoch_loss_sum / static_cast<double>(examples.size()));
  }
  return result;
}

}  // namespace hemcnn
