#include "shiftconv/shift_engine.hpp"

#include <string>

#include "shiftconv/errors.hpp"

namespace shiftconv {

RingBuffer::RingBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw InvalidInputError("ring buffer capacity must be at least 1");
  slots_.resize(capacity);
}

void RingBuffer::push(Frame frame) {
  if (fill_ < capacity_) {
    slots_[(head_ + fill_) % capacity_] = std::move(frame);
    ++fill_;
  } else {
    // Overwrite the oldest slot in place; the head index rotates instead of
    // any payload moving.
    slots_[head_] = std::move(frame);
    head_ = (head_ + 1) % capacity_;
  }
}

void RingBuffer::clear() {
  head_ = 0;
  fill_ = 0;
}

const Frame& RingBuffer::at(std::size_t index) const {
  if (index >= fill_) throw InvalidInputError("ring buffer index past fill");
  return slots_[(head_ + index) % capacity_];
}

const Frame& RingBuffer::from_newest(std::size_t back) const {
  if (back >= fill_) throw InvalidInputError("ring buffer index past fill");
  return at(fill_ - 1 - back);
}

Sequence RingBuffer::to_sequence() const {
  Sequence s;
  s.frames.reserve(fill_);
  for (std::size_t i = 0; i < fill_; ++i) s.frames.push_back(at(i));
  return s;
}

VersionedNet::VersionedNet(NetworkSpec spec) : spec_(std::move(spec)) {
  validate_network(spec_);
}

void VersionedNet::update(NetworkSpec spec) {
  validate_network(spec);
  spec_ = std::move(spec);
  ++version_;
}

ShiftEngine::ShiftEngine(NetworkSpec net, std::size_t deepest_retained)
    : ShiftEngine(std::make_shared<VersionedNet>(std::move(net)), deepest_retained) {}

ShiftEngine::ShiftEngine(std::shared_ptr<VersionedNet> net, std::size_t deepest_retained)
    : net_(std::move(net)) {
  if (!net_) throw InvalidInputError("engine needs a network");
  if (deepest_retained == 0) {
    throw InvalidInputError("deepest_retained must be at least 1");
  }
  primed_version_ = net_->version();
  build_buffers(deepest_retained);
}

void ShiftEngine::build_buffers(std::size_t deepest_retained) {
  const NetworkSpec& spec = net_->spec();
  buffers_.clear();
  window_scratch_.clear();
  buffers_.reserve(spec.depth() + 1);
  window_scratch_.reserve(spec.depth());
  for (const ConvLayer& layer : spec.layers) {
    buffers_.emplace_back(layer.window());
    window_scratch_.emplace_back(layer.window(), nullptr);
  }
  buffers_.emplace_back(deepest_retained);
}

std::size_t ShiftEngine::deepest_retained() const noexcept {
  return buffers_.back().capacity();
}

StepResult ShiftEngine::push_frame(Frame frame) {
  if (net_->version() != primed_version_) {
    throw StaleCacheError(
        "cached activations were computed under weights version " +
        std::to_string(primed_version_) + ", current is " +
        std::to_string(net_->version()) + "; reset or invalidate first");
  }
  const NetworkSpec& spec = net_->spec();
  if (frame.size() != spec.input_channels()) {
    throw InvalidInputError("push_frame: frame length " + std::to_string(frame.size()) +
                            " does not match input context " +
                            std::to_string(spec.input_channels()));
  }

  StepResult result;
  result.new_frames.resize(spec.depth());
  ++frames_seen_;
  buffers_[0].push(std::move(frame));
  for (std::size_t l = 0; l < spec.depth(); ++l) {
    RingBuffer& feed = buffers_[l];
    if (!feed.full()) break;  // no new arrival cascades deeper this step
    const ConvLayer& layer = spec.layers[l];
    std::vector<const Frame*>& window = window_scratch_[l];
    for (std::size_t tau = 0; tau < layer.window(); ++tau) window[tau] = &feed.at(tau);
    Frame fresh = conv_frame(layer, std::span<const Frame* const>(window), &counter_, l);
    result.new_frames[l] = fresh;
    if (l + 1 == spec.depth()) ++deepest_produced_;
    buffers_[l + 1].push(std::move(fresh));
  }
  return result;
}

std::optional<Frame> ShiftEngine::streaming_decode(const ConvLayer& decoder,
                                                   std::span<const double> output_bias) {
  validate_layer(decoder);
  const std::size_t w = decoder.window();
  const std::size_t cin = decoder.in_channels();
  const std::size_t cout = decoder.out_channels();
  if (cout != net_->spec().output_channels()) {
    throw InvalidInputError("streaming_decode: decoder output channels do not match the deepest layer");
  }
  if (!output_bias.empty() && output_bias.size() != cin) {
    throw InvalidInputError("streaming_decode: output bias length does not match decoder input channels");
  }

  if (deepest_produced_ < w) return std::nullopt;  // no frame is fixed yet
  const std::uint64_t fixed_count = deepest_produced_ - w + 1;
  if (decoded_ >= fixed_count) return std::nullopt;  // newest fixed frame already emitted
  const RingBuffer& deepest = buffers_.back();
  if (deepest.fill() < w) return std::nullopt;  // retention too short to decode

  // Adjoint sum over the newest w deepest frames; same accumulation order as
  // the interior frames of full_conv_adjoint, so the values match it exactly.
  Frame out(cin);
  for (std::size_t j = 0; j < cin; ++j) {
    double acc = 0.0;
    for (std::size_t tau = 0; tau < w; ++tau) {
      const Matrix& tap = decoder.taps[tau];
      const double* h = deepest.from_newest(tau).data();
      for (std::size_t i = 0; i < cout; ++i) {
        acc += tap(i, j) * h[i];
      }
    }
    if (!output_bias.empty()) acc += output_bias[j];
    out[j] = activate(decoder.activation, acc);
  }
  decoded_ = fixed_count;
  return out;
}

void ShiftEngine::invalidate(NetworkSpec new_net) {
  validate_network(new_net);
  if (!same_geometry(new_net, net_->spec())) {
    throw InvalidInputError("invalidate: replacement network must keep the layer geometry");
  }
  net_->update(std::move(new_net));
  primed_version_ = net_->version();
  for (RingBuffer& b : buffers_) b.clear();
  frames_seen_ = 0;
  deepest_produced_ = 0;
  decoded_ = 0;
  // counter_ deliberately survives: it tallies work done, not cache state.
}

void ShiftEngine::reset() {
  primed_version_ = net_->version();
  for (RingBuffer& b : buffers_) b.clear();
  frames_seen_ = 0;
  deepest_produced_ = 0;
  decoded_ = 0;
}

std::vector<Sequence> ShiftEngine::snapshot() const {
  std::vector<Sequence> out;
  out.reserve(buffers_.size());
  for (const RingBuffer& b : buffers_) out.push_back(b.to_sequence());
  return out;
}

}  // namespace shiftconv
