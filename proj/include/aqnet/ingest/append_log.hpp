#pragma once

#include <array>
#include <atomic>
#include <cstddef>
#include <memory>
#include <stdexcept>

namespace aqnet::ingest {

/// Append-only sequence with lock-free reads.
///
/// Storage is a fixed directory of lazily allocated chunks, so elements never
/// move once written. An element becomes visible to readers only after the
/// release-store of the size counter that follows its construction; a reader
/// that loads size() sees fully written elements below that index.
///
/// push_back() callers must serialize among themselves.
template <typename T, std::size_t ChunkSize = 4096, std::size_t MaxChunks = 4096>
class AppendLog {
 public:
  AppendLog() = default;
  AppendLog(const AppendLog&) = delete;
  AppendLog& operator=(const AppendLog&) = delete;

  ~AppendLog() {
    for (auto& c : chunks_) delete c.load(std::memory_order_relaxed);
  }

  static constexpr std::size_t capacity() noexcept { return ChunkSize * MaxChunks; }

  void push_back(T value) {
    const std::size_t n = size_.load(std::memory_order_relaxed);
    const std::size_t c = n / ChunkSize;
    if (c >= MaxChunks) throw std::length_error("append log capacity exhausted");
    Chunk* chunk = chunks_[c].load(std::memory_order_relaxed);
    if (chunk == nullptr) {
      chunk = new Chunk();
      chunks_[c].store(chunk, std::memory_order_release);
    }
    (*chunk)[n % ChunkSize] = std::move(value);
    size_.store(n + 1, std::memory_order_release);
  }

  std::size_t size() const noexcept { return size_.load(std::memory_order_acquire); }
  bool empty() const noexcept { return size() == 0; }

  /// Precondition: i < a value previously returned by size().
  const T& operator[](std::size_t i) const noexcept {
    return (*chunks_[i / ChunkSize].load(std::memory_order_acquire))[i % ChunkSize];
  }

 private:
  using Chunk = std::array<T, ChunkSize>;
  std::array<std::atomic<Chunk*>, MaxChunks> chunks_{};
  std::atomic<std::size_t> size_{0};
};

}  // namespace aqnet::ingest
