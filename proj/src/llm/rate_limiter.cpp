// SPDX-License-Identifier: Apache-2.0

#include "gar/llm/rate_limiter.hpp"

#include <algorithm>
#include <thread>

namespace gar::llm {

TokenBucket::TokenBucket(double requests_per_minute, double burst)
    : rate_per_sec_(std::max(0.0, requests_per_minute) / 60.0),
      capacity_(std::max(1.0, burst)),
      tokens_(capacity_),
      last_(Clock::now()) {}

void TokenBucket::acquire() {
  if (rate_per_sec_ <= 0.0) return;
  while (true) {
    std::chrono::duration<double> wait{};
    {
      std::lock_guard lock(mu_);
      const auto now = Clock::now();
      tokens_ = std::min(capacity_, tokens_ + std::chrono::duration<double>(now - last_).count() * rate_per_sec_);
      last_ = now;
      if (tokens_ >= 1.0) {
        tokens_ -= 1.0;
        return;
      }
      wait = std::chrono::duration<double>((1.0 - tokens_) / rate_per_sec_);
    }
    std::this_thread::sleep_for(wait);
  }
}

}  // namespace gar::llm
