#pragma once

#include <cstdint>
#include <memory>
#include <vector>

namespace clinscribe {

// Time source used for ledger timestamps, version-store commit times and
// retry backoff. Injected so that tests and mock-backed pipeline runs are
// fully deterministic.
class Clock {
 public:
  virtual ~Clock() = default;

  // Milliseconds since the Unix epoch.
  virtual std::int64_t now_ms() = 0;

  virtual void sleep_ms(std::int64_t duration_ms) = 0;
};

class SystemClock final : public Clock {
 public:
  std::int64_t now_ms() override;
  void sleep_ms(std::int64_t duration_ms) override;
};

// Advances by a fixed step on every now_ms() call and by the requested
// duration on sleep_ms(). Strictly increasing when step_ms > 0.
class DeterministicClock final : public Clock {
 public:
  explicit DeterministicClock(std::int64_t start_ms, std::int64_t step_ms = 1000)
      : current_ms_(start_ms), step_ms_(step_ms) {}

  std::int64_t now_ms() override {
    std::int64_t t = current_ms_;
    current_ms_ += step_ms_;
    return t;
  }

  void sleep_ms(std::int64_t duration_ms) override {
    current_ms_ += duration_ms;
    sleeps_.push_back(duration_ms);
  }

  // Recorded sleep durations, in call order. Lets tests observe backoff.
  const std::vector<std::int64_t>& sleeps() const { return sleeps_; }

 private:
  std::int64_t current_ms_;
  std::int64_t step_ms_;
  std::vector<std::int64_t> sleeps_;
};

std::shared_ptr<Clock> make_system_clock();

}  // namespace clinscribe
