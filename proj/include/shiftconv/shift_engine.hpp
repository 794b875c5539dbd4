#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "shiftconv/conv_core.hpp"
#include "shiftconv/types.hpp"

namespace shiftconv {

// Cyclic frame store. Pushing beyond capacity evicts the oldest frame by
// overwriting its slot; logical order (oldest to newest) is recovered from the
// head index, so no frame payload is ever moved by the rotation.
class RingBuffer {
 public:
  explicit RingBuffer(std::size_t capacity);

  void push(Frame frame);
  void clear();

  std::size_t capacity() const noexcept { return capacity_; }
  std::size_t fill() const noexcept { return fill_; }
  bool full() const noexcept { return fill_ == capacity_; }

  // index 0 = oldest retained frame.
  const Frame& at(std::size_t index) const;
  // back 0 = newest frame.
  const Frame& from_newest(std::size_t back) const;

  // Retained frames, oldest to newest.
  Sequence to_sequence() const;

 private:
  std::vector<Frame> slots_;
  std::size_t capacity_;
  std::size_t head_ = 0;  // slot of the oldest frame
  std::size_t fill_ = 0;
};

// Outcome of one pushed frame: per layer, the newly computed frame (absent
// while that layer is still warming up). A layer performs exactly one
// convolution operation per push once its input window is full, and none
// before, so ops_this_step(l) is 1 precisely when new_frames[l] is present.
struct StepResult {
  std::vector<std::optional<Frame>> new_frames;

  int ops_this_step(std::size_t layer) const {
    return new_frames[layer].has_value() ? 1 : 0;
  }
  std::size_t total_ops() const {
    std::size_t n = 0;
    for (const auto& f : new_frames) n += f.has_value() ? 1 : 0;
    return n;
  }
};

// Weights with a monotonically increasing version stamp. Engines remember the
// version they were primed with; if the shared weights are replaced from
// elsewhere, their cached activations are stale and push_frame refuses to run
// until the engine is invalidated. Updates require external synchronization
// with concurrent readers.
class VersionedNet {
 public:
  explicit VersionedNet(NetworkSpec spec);

  const NetworkSpec& spec() const noexcept { return spec_; }
  std::uint64_t version() const noexcept { return version_; }
  void update(NetworkSpec spec);

 private:
  NetworkSpec spec_;
  std::uint64_t version_ = 0;
};

// Streaming evaluator. Per layer it keeps a ring buffer over that layer's
// input; each pushed frame computes at most one new frame per layer (the
// newest one) and reuses every previously cached activation by rotation.
// After warm-up the retained activations are bit-identical to a naive full
// forward pass over the whole stream prefix, because both paths run the same
// conv_frame kernel on the same values.
//
// One engine is single-threaded mutable state. The underlying VersionedNet
// may be shared read-only across engines.
class ShiftEngine {
 public:
  ShiftEngine(NetworkSpec net, std::size_t deepest_retained);
  ShiftEngine(std::shared_ptr<VersionedNet> net, std::size_t deepest_retained);

  // Feeds one input frame and cascades: every layer whose input buffer is
  // full computes exactly one new frame via conv_frame and passes it on.
  // Throws StaleCacheError when the shared weights changed since priming and
  // InvalidInputError on a context-size mismatch.
  StepResult push_frame(Frame frame);

  // Newest reconstruction frame that has become fixed -- the frame with
  // contributions from all `decoder.window()` deepest activations -- computed
  // once per newly produced deepest frame. Returns nullopt during warm-up or
  // when no new deepest frame arrived since the last call. The decoder's taps
  // are applied transposed; `output_bias` (empty = zero, else length
  // decoder.in_channels()) is added after the adjoint sum.
  std::optional<Frame> streaming_decode(const ConvLayer& decoder,
                                        std::span<const double> output_bias = {});

  // Installs new weights: clears every buffer (cached activations were
  // computed under the old weights), bumps the version, keeps the operation
  // counter. The new network must have the old one's geometry.
  void invalidate(NetworkSpec new_net);

  // Clears all buffers and stream position; weights and counter are kept.
  void reset();

  // Buffered activations as plain sequences, oldest to newest, without
  // mutating state. Entry 0 is the retained input window; entry l+1 holds
  // layer l's retained output frames.
  std::vector<Sequence> snapshot() const;

  const NetworkSpec& network() const noexcept { return net_->spec(); }
  const OpCounter& counter() const noexcept { return counter_; }
  std::uint64_t frames_seen() const noexcept { return frames_seen_; }
  std::uint64_t weights_version() const noexcept { return primed_version_; }
  std::size_t deepest_retained() const noexcept;
  std::uint64_t deepest_frames_produced() const noexcept { return deepest_produced_; }

 private:
  void build_buffers(std::size_t deepest_retained);

  std::shared_ptr<VersionedNet> net_;
  std::uint64_t primed_version_ = 0;
  // buffers_[l] feeds layer l (capacity w_l); buffers_[depth] retains the
  // deepest layer's output (caller-configured capacity).
  std::vector<RingBuffer> buffers_;
  std::vector<std::vector<const Frame*>> window_scratch_;
  OpCounter counter_;
  std::uint64_t frames_seen_ = 0;
  std::uint64_t deepest_produced_ = 0;
  std::uint64_t decoded_ = 0;
};

}  // namespace shiftconv
