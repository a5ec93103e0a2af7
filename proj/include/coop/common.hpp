#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace coop {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Bad user input: malformed files, dimension mismatches, invalid settings.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numeric trouble: degenerate systems, diverging iterations.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

// Seeded generator wrapper. All randomness in the library flows through
// this so that a seed pins down every draw.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double normal() { return normal_(gen_); }
  double uniform() { return unif_(gen_); }

  // Uniform integer in [0, hi).
  std::uint64_t integer(std::uint64_t hi);

  // Fills column by column.
  Vector normal_vector(Index n);
  Matrix normal_matrix(Index rows, Index cols);

  // Fisher-Yates shuffle; stable across standard library implementations.
  void shuffle(std::vector<Index>& items);

  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> unif_{0.0, 1.0};
};

// Runs body(i) for i in [0, count). With threads <= 1 runs inline, in
// order; otherwise items are claimed from a shared counter. Bodies must
// only write to disjoint slots. First exception is rethrown after join.
void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t)>& body);

}  // namespace coop
