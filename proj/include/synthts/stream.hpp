#pragma once

/**
 * @file stream.hpp
 * @brief Unlimited per-epoch regeneration over a framed binary stream.
 *
 * Sample i of epoch e is synthesize(seed, epoch_sample_key(e, i)), so epochs
 * never reuse each other's (or a batch dataset's) random streams, and any epoch
 * can be replayed from (seed, e) alone.
 *
 * Frame layout (little-endian), 32-byte header then payload:
 *
 *   0  u32 magic 0x46535453 ("STSF")
 *   4  u32 kind: 0 epoch begin, 1 sample, 2 epoch end
 *   8  u64 epoch
 *  16  u64 index (begin: epoch size; sample: sample index; end: samples sent)
 *  24  u32 channels C
 *  28  u32 window length N
 *
 * A sample frame carries N float32 composite values and the C x N float32
 * label matrix. Begin and end frames carry no payload.
 */

#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <deque>
#include <exception>
#include <mutex>
#include <optional>
#include <span>
#include <thread>
#include <vector>

#include "synthts/binary_format.hpp"
#include "synthts/errors.hpp"
#include "synthts/labels.hpp"
#include "synthts/mixer.hpp"

namespace synthts {

inline constexpr std::uint32_t kFrameMagic = 0x46535453;
inline constexpr std::size_t kFrameHeaderBytes = 32;

enum class FrameKind : std::uint32_t { EpochBegin = 0, Sample = 1, EpochEnd = 2 };

struct FrameHeader {
  FrameKind kind = FrameKind::Sample;
  std::uint64_t epoch = 0;
  std::uint64_t index = 0;
  std::uint32_t channels = 0;
  std::uint32_t window_len = 0;

  std::size_t payload_bytes() const noexcept {
    return kind == FrameKind::Sample ? (std::size_t{1} + channels) * window_len * sizeof(float) : 0;
  }
  bool operator==(const FrameHeader&) const = default;
};

inline void encode_frame_header(const FrameHeader& h, std::byte* out) {
  le::put_u32(out, kFrameMagic);
  le::put_u32(out + 4, static_cast<std::uint32_t>(h.kind));
  le::put_u64(out + 8, h.epoch);
  le::put_u64(out + 16, h.index);
  le::put_u32(out + 24, h.channels);
  le::put_u32(out + 28, h.window_len);
}

inline FrameHeader decode_frame_header(std::span<const std::byte> bytes) {
  if (bytes.size() < kFrameHeaderBytes || le::get_u32(bytes.data()) != kFrameMagic)
    throw ReadError("bad frame header");
  FrameHeader h;
  const auto kind = le::get_u32(bytes.data() + 4);
  if (kind > 2) throw ReadError("unknown frame kind");
  h.kind = static_cast<FrameKind>(kind);
  h.epoch = le::get_u64(bytes.data() + 8);
  h.index = le::get_u64(bytes.data() + 16);
  h.channels = le::get_u32(bytes.data() + 24);
  h.window_len = le::get_u32(bytes.data() + 28);
  return h;
}

/// Destination for frames. write() returns false once the peer is gone.
class FrameSink {
 public:
  virtual ~FrameSink() = default;
  virtual bool write(std::span<const std::byte> bytes) = 0;
};

/// Appends everything to memory.
class MemorySink final : public FrameSink {
 public:
  bool write(std::span<const std::byte> bytes) override {
    data.insert(data.end(), bytes.begin(), bytes.end());
    return true;
  }
  std::vector<std::byte> data;
};

/// Writes to a stdio stream (stdout or a named pipe).
class FileSink final : public FrameSink {
 public:
  explicit FileSink(std::FILE* f) : f_(f) {}
  bool write(std::span<const std::byte> bytes) override {
    return std::fwrite(bytes.data(), 1, bytes.size(), f_) == bytes.size() && std::fflush(f_) == 0;
  }

 private:
  std::FILE* f_;
};

/// Multi-producer / multi-consumer FIFO with a fixed capacity. push() blocks
/// while full; close() wakes everyone and makes push() fail.
template <class T>
class BoundedQueue {
 public:
  explicit BoundedQueue(std::size_t capacity) : capacity_(capacity == 0 ? 1 : capacity) {}

  bool push(T item) {
    std::unique_lock lock(mu_);
    not_full_.wait(lock, [&] { return closed_ || items_.size() < capacity_; });
    if (closed_) return false;
    items_.push_back(std::move(item));
    not_empty_.notify_one();
    return true;
  }

  /// nullopt once closed and drained.
  std::optional<T> pop() {
    std::unique_lock lock(mu_);
    not_empty_.wait(lock, [&] { return closed_ || !items_.empty(); });
    if (items_.empty()) return std::nullopt;
    T item = std::move(items_.front());
    items_.pop_front();
    not_full_.notify_one();
    return item;
  }

  void close() {
    std::lock_guard lock(mu_);
    closed_ = true;
    not_full_.notify_all();
    not_empty_.notify_all();
  }

  std::size_t size() const {
    std::lock_guard lock(mu_);
    return items_.size();
  }
  std::size_t capacity() const noexcept { return capacity_; }

 private:
  mutable std::mutex mu_;
  std::condition_variable not_full_, not_empty_;
  std::deque<T> items_;
  std::size_t capacity_;
  bool closed_ = false;
};

class EpochStreamer {
 public:
  EpochStreamer(EngineConfig config, std::uint64_t seed, std::size_t epoch_size, std::size_t window_len,
                std::size_t queue_capacity = 64)
      : config_(config), schema_(config), seed_(seed), epoch_size_(epoch_size), window_len_(window_len),
        queue_capacity_(queue_capacity) {
    try {
      validate(config_);
      require_window(window_len_);
    } catch (const InvalidWindow& e) {
      throw ConfigError(e.what());
    }
  }

  std::size_t channels() const noexcept { return schema_.channels(); }
  std::size_t window_len() const noexcept { return window_len_; }
  std::size_t epoch_size() const noexcept { return epoch_size_; }
  std::uint64_t seed() const noexcept { return seed_; }
  const EngineConfig& config() const noexcept { return config_; }

  SyntheticSample sample(std::uint64_t epoch, std::uint64_t index) const {
    return render_sample(sample_params(seed_, epoch_sample_key(epoch, index), window_len_, config_), schema_);
  }

  std::vector<std::byte> sample_frame(std::uint64_t epoch, std::uint64_t index) const {
    const SyntheticSample s = sample(epoch, index);
    const FrameHeader h = header(FrameKind::Sample, epoch, index);
    std::vector<std::byte> out(kFrameHeaderBytes + h.payload_bytes());
    encode_frame_header(h, out.data());
    std::byte* p = out.data() + kFrameHeaderBytes;
    for (double v : s.composite) le::put_f32(p, static_cast<float>(v)), p += sizeof(float);
    for (double v : s.labels.values) le::put_f32(p, static_cast<float>(v)), p += sizeof(float);
    return out;
  }

  /// Emits one epoch: a begin frame, epoch_size sample frames, an end frame.
  /// A producer thread renders ahead into a bounded queue, so a slow sink
  /// stalls generation instead of growing memory. Throws StreamClosed when the
  /// sink reports failure.
  void stream_epoch(std::uint64_t epoch, FrameSink& sink) const {
    if (!sink.write(control_frame(FrameKind::EpochBegin, epoch, epoch_size_))) throw StreamClosed("sink closed");

    BoundedQueue<std::vector<std::byte>> queue(queue_capacity_);
    std::exception_ptr producer_error;
    std::jthread producer([&] {
      try {
        for (std::uint64_t i = 0; i < epoch_size_; ++i)
          if (!queue.push(sample_frame(epoch, i))) return;
      } catch (...) {
        producer_error = std::current_exception();
      }
      queue.close();
    });

    std::uint64_t sent = 0;
    while (auto frame = queue.pop()) {
      if (!sink.write(*frame)) {
        queue.close();
        producer.join();
        throw StreamClosed("sink closed during epoch " + std::to_string(epoch));
      }
      ++sent;
    }
    producer.join();
    if (producer_error) std::rethrow_exception(producer_error);
    if (!sink.write(control_frame(FrameKind::EpochEnd, epoch, sent))) throw StreamClosed("sink closed");
  }

  /// Streams epochs first_epoch, first_epoch + 1, ...; `epochs` = nullopt runs
  /// until the sink closes (then StreamClosed propagates).
  void stream_unlimited(FrameSink& sink, std::uint64_t first_epoch = 0,
                        std::optional<std::uint64_t> epochs = std::nullopt) const {
    for (std::uint64_t e = first_epoch; !epochs || e < first_epoch + *epochs; ++e) stream_epoch(e, sink);
  }

 private:
  FrameHeader header(FrameKind kind, std::uint64_t epoch, std::uint64_t index) const {
    return {kind, epoch, index, static_cast<std::uint32_t>(channels()), static_cast<std::uint32_t>(window_len_)};
  }

  std::vector<std::byte> control_frame(FrameKind kind, std::uint64_t epoch, std::uint64_t index) const {
    std::vector<std::byte> out(kFrameHeaderBytes);
    encode_frame_header(header(kind, epoch, index), out.data());
    return out;
  }

  EngineConfig config_;
  LabelSchema schema_;
  std::uint64_t seed_;
  std::size_t epoch_size_;
  std::size_t window_len_;
  std::size_t queue_capacity_;
};

/// One decoded frame.
struct Frame {
  FrameHeader header;
  std::vector<float> composite;
  std::vector<float> labels;
};

/// Splits a byte stream into frames. Throws ReadError on a truncated tail.
inline std::vector<Frame> parse_frames(std::span<const std::byte> bytes) {
  std::vector<Frame> frames;
  std::size_t pos = 0;
  while (pos < bytes.size()) {
    Frame f;
    f.header = decode_frame_header(bytes.subspan(pos));
    pos += kFrameHeaderBytes;
    const std::size_t payload = f.header.payload_bytes();
    if (bytes.size() - pos < payload) throw ReadError("truncated frame payload");
    if (payload) {
      f.composite.resize(f.header.window_len);
      f.labels.resize(static_cast<std::size_t>(f.header.channels) * f.header.window_len);
      decode_floats(bytes.subspan(pos), f.composite);
      decode_floats(bytes.subspan(pos + f.composite.size() * sizeof(float)), f.labels);
    }
    pos += payload;
    frames.push_back(std::move(f));
  }
  return frames;
}

}  // namespace synthts
