#include "regmatch/bench.hpp"

#include <sstream>
#include <vector>

namespace regmatch {

std::string BenchRecord::to_csv() const {
  std::ostringstream out;
  out << algo << ',' << n << ',' << d << ',' << seed << ',' << wall_time_ns << ','
      << total_steps << ',' << total_restarts << ',' << augmentations << ',' << m;
  return out.str();
}

std::optional<BenchRecord> BenchRecord::from_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (fields.size() != 9) return std::nullopt;
  try {
    BenchRecord r;
    r.algo = fields[0];
    r.n = std::stoi(fields[1]);
    r.d = std::stoi(fields[2]);
    r.seed = std::stoull(fields[3]);
    r.wall_time_ns = std::stoll(fields[4]);
    r.total_steps = std::stoll(fields[5]);
    r.total_restarts = std::stoll(fields[6]);
    r.augmentations = std::stoll(fields[7]);
    r.m = std::stoll(fields[8]);
    return r;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

}  // namespace regmatch
