#include "shiftconv/complexity.hpp"

#include <string>

#include "shiftconv/conv_core.hpp"
#include "shiftconv/errors.hpp"

namespace shiftconv {

namespace {

void check_params(const CostParams& p) {
  if (p.layers < 1) throw InvalidInputError("cost model needs at least one layer");
  if (p.frames < 1) throw InvalidInputError("cost model needs at least one frame");
  if (p.window < 1) throw InvalidInputError("cost model needs window >= 1");
}

// Minimal stack with the requested geometry for live counting; values are
// irrelevant to the counter.
NetworkSpec unit_channel_net(std::size_t layers, std::size_t window) {
  NetworkSpec net;
  net.layers.reserve(layers);
  for (std::size_t l = 0; l < layers; ++l) {
    ConvLayer layer;
    layer.taps.assign(window, Matrix(1, 1));
    layer.bias.assign(1, 0.0);
    layer.activation = Activation::kIdentity;
    net.layers.push_back(std::move(layer));
  }
  return net;
}

std::uint64_t live_counter_total(std::size_t layers, std::size_t window,
                                 std::size_t input_length) {
  const NetworkSpec net = unit_channel_net(layers, window);
  OpCounter counter;
  forward_stack(net, Sequence::zeros(input_length, 1), counter);
  return counter.total();
}

}  // namespace

std::uint64_t count_normal_deepest_fixed(const CostParams& p) {
  check_params(p);
  std::uint64_t total = 0;
  for (std::size_t k = 0; k < p.layers; ++k) {
    total += static_cast<std::uint64_t>(p.frames) + k * (p.window - 1);
  }
  return total;
}

std::uint64_t count_normal_input_fixed(const CostParams& p) {
  check_params(p);
  std::uint64_t total = 0;
  for (std::size_t k = 1; k <= p.layers; ++k) {
    const std::int64_t term = static_cast<std::int64_t>(p.frames) -
                              static_cast<std::int64_t>(k * (p.window - 1));
    if (term < 1) {
      throw InfeasibleStackError("layer " + std::to_string(k) + " of " +
                                 std::to_string(p.layers) + " would span " +
                                 std::to_string(term) + " frames");
    }
    total += static_cast<std::uint64_t>(term);
  }
  return total;
}

std::uint64_t count_deep_shifting(const CostParams& p) {
  check_params(p);
  return p.layers;
}

double speedup_factor(const CostParams& p) {
  (void)count_normal_input_fixed(p);  // validates feasibility
  return static_cast<double>(p.frames) -
         static_cast<double>((p.layers + 1) * (p.window - 1)) / 2.0;
}

ClosedForms closed_form_counts(const CostParams& p) {
  check_params(p);
  const std::int64_t n = static_cast<std::int64_t>(p.layers);
  const std::int64_t t = static_cast<std::int64_t>(p.frames);
  const std::int64_t w = static_cast<std::int64_t>(p.window);
  return ClosedForms{
      n * t + (n - 1) * (n - 2) / 2 * (w - 1),
      n * t - n * (n - 1) / 2 * (w - 1),
  };
}

ReconciliationRow reconcile_point(const CostParams& p) {
  ReconciliationRow row;
  row.params = p;
  row.series_deepest = count_normal_deepest_fixed(p);
  const ClosedForms closed = closed_form_counts(p);
  row.closed_deepest = closed.deepest_fixed;
  row.closed_input = closed.input_fixed;
  row.shift_per_step = count_deep_shifting(p);

  // Deepest-fixed geometry: input long enough that the deepest layer spans
  // `frames` steps.
  row.counter_deepest =
      live_counter_total(p.layers, p.window, p.frames + p.layers * (p.window - 1));
  row.series_deepest_matches_counter = row.series_deepest == row.counter_deepest;
  row.closed_deepest_matches_series =
      row.closed_deepest == static_cast<std::int64_t>(row.series_deepest);

  try {
    row.series_input = count_normal_input_fixed(p);
    row.speedup = speedup_factor(p);
    row.counter_input = live_counter_total(p.layers, p.window, p.frames);
    row.series_input_matches_counter = *row.series_input == *row.counter_input;
    row.closed_input_matches_series =
        row.closed_input == static_cast<std::int64_t>(*row.series_input);
  } catch (const InfeasibleStackError&) {
    // input-fixed columns stay absent
  }
  return row;
}

std::vector<ReconciliationRow> reconcile_grid(std::size_t n_max, std::size_t t_max,
                                              std::size_t w_min, std::size_t w_max) {
  if (n_max < 1 || t_max < 1 || w_min < 1 || w_max < w_min) {
    throw InvalidInputError("reconcile_grid: empty range");
  }
  std::vector<ReconciliationRow> rows;
  rows.reserve(n_max * t_max * (w_max - w_min + 1));
  for (std::size_t n = 1; n <= n_max; ++n) {
    for (std::size_t t = 1; t <= t_max; ++t) {
      for (std::size_t w = w_min; w <= w_max; ++w) {
        rows.push_back(reconcile_point(CostParams{n, t, w}));
      }
    }
  }
  return rows;
}

}  // namespace shiftconv
