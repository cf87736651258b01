#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace regmatch {

// One benchmark observation. total_steps counts SAMPLE-OUT-EDGE calls for the
// walk matchers and probe count for the probe game; wall time is reported but
// never used as a gate.
struct BenchRecord {
  std::string algo;
  int n = 0;
  int d = 0;
  std::uint64_t seed = 0;
  long long wall_time_ns = 0;
  long long total_steps = 0;
  long long total_restarts = 0;
  long long augmentations = 0;
  long long m = 0;

  static constexpr const char* kHeader =
      "algo,n,d,seed,wall_time_ns,total_steps,total_restarts,augmentations,m";

  std::string to_csv() const;
  static std::optional<BenchRecord> from_csv(const std::string& line);

  friend bool operator==(const BenchRecord&, const BenchRecord&) = default;
};

}  // namespace regmatch
