#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace shiftconv {

// Inputs of the operation-count model. `frames` anchors the time axis: the
// deepest layer's length in the deepest-fixed scenario, the input length in
// the input-fixed scenario. All layers use the same window here; heterogeneous
// stacks are covered by live counters instead.
struct CostParams {
  std::size_t layers = 1;  // n
  std::size_t frames = 1;  // t
  std::size_t window = 2;  // w
};

// Deepest-fixed scenario: the deepest layer spans `frames` steps and every
// shallower layer grows by w-1. Literal series sum_{k=0}^{n-1} (t + k(w-1)).
std::uint64_t count_normal_deepest_fixed(const CostParams& p);

// Input-fixed scenario: the input spans `frames` steps and each deeper layer
// shrinks by w-1. Literal series sum_{k=1}^{n} (t - k(w-1)). Throws
// InfeasibleStackError when any term would drop below one frame.
std::uint64_t count_normal_input_fixed(const CostParams& p);

// Steady-state cost of the shifting evaluator: one convolution per layer per
// pushed frame, regardless of geometry.
std::uint64_t count_deep_shifting(const CostParams& p);

// Per-encoding gain in the input-fixed scenario: t - (n+1)(w-1)/2. Satisfies
// speedup_factor(p) * count_deep_shifting(p) == count_normal_input_fixed(p)
// exactly.
double speedup_factor(const CostParams& p);

// Closed-form totals for both scenarios: n*t + (n-1)(n-2)(w-1)/2 and
// n*t - n(n-1)(w-1)/2. They agree with their series only for single-layer
// stacks; the reconciliation report carries both so the disagreement is
// visible per instance. The series (backed by live counters) is ground truth.
struct ClosedForms {
  std::int64_t deepest_fixed;
  std::int64_t input_fixed;
};
ClosedForms closed_form_counts(const CostParams& p);

// One grid point of the reconciliation report: both series, both closed
// forms, live naive-forward counter totals for matching geometries, the
// steady-state shift cost and speedup, and agreement flags. Input-fixed
// columns are absent when the geometry is infeasible.
struct ReconciliationRow {
  CostParams params;
  std::uint64_t series_deepest = 0;
  std::int64_t closed_deepest = 0;
  std::optional<std::uint64_t> series_input;
  std::int64_t closed_input = 0;
  std::uint64_t shift_per_step = 0;
  std::optional<double> speedup;
  std::uint64_t counter_deepest = 0;
  std::optional<std::uint64_t> counter_input;
  bool series_deepest_matches_counter = false;
  bool series_input_matches_counter = false;
  bool closed_deepest_matches_series = false;
  bool closed_input_matches_series = false;
};

// Runs live naive forward passes (channel size 1) over the inclusive grid and
// reconciles them against the analytic counts.
std::vector<ReconciliationRow> reconcile_grid(std::size_t n_max, std::size_t t_max,
                                              std::size_t w_min, std::size_t w_max);

ReconciliationRow reconcile_point(const CostParams& p);

}  // namespace shiftconv
