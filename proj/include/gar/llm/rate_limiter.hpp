// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <mutex>

namespace gar::llm {

/// Token bucket limiting request admission. `acquire` blocks until a token is
/// available; requests are never dropped. A rate of 0 disables limiting.
class TokenBucket {
 public:
  using Clock = std::chrono::steady_clock;

  TokenBucket(double requests_per_minute, double burst = 1.0);

  void acquire();
  double requests_per_minute() const { return rate_per_sec_ * 60.0; }

 private:
  double rate_per_sec_;
  double capacity_;
  double tokens_;
  Clock::time_point last_;
  std::mutex mu_;
};

}  // namespace gar::llm
