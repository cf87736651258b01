#include "regmatch/bvn.hpp"

#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

namespace regmatch {

namespace {

template <typename W>
void write_matrix_impl(int n, const std::vector<Triplet<W>>& entries,
                       const char* mode, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << n << ' ' << entries.size() << ' ' << mode << '\n';
  for (const auto& t : entries)
    out << t.row << ' ' << t.col << ' ' << detail::weight_str(t.weight) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path);
}

template <typename W>
std::vector<Triplet<W>> read_triplets(std::ifstream& in, const std::string& path,
                                      long long m) {
  std::vector<Triplet<W>> entries;
  entries.reserve(static_cast<std::size_t>(m));
  std::string line;
  for (long long i = 0; i < m; ++i) {
    if (!std::getline(in, line))
      throw std::runtime_error(path + ": truncated file, expected " +
                               std::to_string(m) + " entries");
    std::istringstream ls(line);
    Triplet<W> t;
    if (!(ls >> t.row >> t.col >> t.weight))
      throw std::runtime_error(path + ":" + std::to_string(i + 2) +
                               ": expected \"row col weight\"");
    entries.push_back(t);
  }
  return entries;
}

}  // namespace

MatrixVariant read_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": missing header");
  int n = 0;
  long long m = 0;
  std::string mode;
  {
    std::istringstream hs(line);
    if (!(hs >> n >> m >> mode))
      throw std::runtime_error(path + ":1: malformed header, expected \"n m mode\"");
  }
  if (mode == "float")
    return DoublyStochasticMatrix<double>::load(n, read_triplets<double>(in, path, m));
  if (mode == "int")
    return DoublyStochasticMatrix<long long>::load(
        n, read_triplets<long long>(in, path, m));
  throw std::runtime_error(path + ":1: unknown mode \"" + mode +
                           "\" (expected float or int)");
}

void write_matrix_float(int n, const std::vector<Triplet<double>>& entries,
                        const std::string& path) {
  write_matrix_impl(n, entries, "float", path);
}

void write_matrix_int(int n, const std::vector<Triplet<long long>>& entries,
                      const std::string& path) {
  write_matrix_impl(n, entries, "int", path);
}

namespace {

template <typename W>
void write_decomposition_impl(const BvnDecomposition<W>& dec,
                              const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  for (const auto& term : dec.terms) {
    out << detail::weight_str(term.lambda);
    for (int q : term.perm) out << ' ' << q;
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace

void write_decomposition(const BvnDecomposition<double>& dec,
                         const std::string& path) {
  write_decomposition_impl(dec, path);
}

void write_decomposition(const BvnDecomposition<long long>& dec,
                         const std::string& path) {
  write_decomposition_impl(dec, path);
}

std::vector<Triplet<double>> gen_random_doubly_stochastic(int n, int perms,
                                                          std::uint64_t seed) {
  if (n < 1 || perms < 1)
    throw std::invalid_argument("gen_random_doubly_stochastic: need n, perms >= 1");
  Rng rng = make_rng(seed);
  std::vector<double> lambda(perms);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double sum = 0.0;
  for (auto& l : lambda) {
    l = unit(rng) + 1e-3;  // bounded away from zero
    sum += l;
  }
  for (auto& l : lambda) l /= sum;

  std::map<std::pair<int, int>, double> acc;
  std::vector<int> perm(n);
  for (int k = 0; k < perms; ++k) {
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    for (int p = 0; p < n; ++p) acc[{p, perm[p]}] += lambda[k];
  }
  std::vector<Triplet<double>> out;
  out.reserve(acc.size());
  for (const auto& [key, w] : acc) out.push_back({key.first, key.second, w});
  return out;
}

std::vector<Triplet<long long>> gen_integer_doubly_stochastic(int n, int d,
                                                              std::uint64_t seed) {
  if (n < 1 || d < 1)
    throw std::invalid_argument("gen_integer_doubly_stochastic: need n, d >= 1");
  Rng rng = make_rng(seed);
  std::map<std::pair<int, int>, long long> acc;
  std::vector<int> perm(n);
  for (int k = 0; k < d; ++k) {
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    for (int p = 0; p < n; ++p) acc[{p, perm[p]}] += 1;
  }
  std::vector<Triplet<long long>> out;
  out.reserve(acc.size());
  for (const auto& [key, w] : acc) out.push_back({key.first, key.second, w});
  return out;
}

}  // namespace regmatch
