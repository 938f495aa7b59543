#pragma once

// Timing harness behind `tcred bench` and the benchmark acceptance check.

#include <optional>
#include <string>
#include <string_view>

#include "tcred/backend.hpp"

namespace tcred::bench {

enum class Op { prepare, sign, unblind, aggcred, prove, verify };

std::string_view to_string(Op op);
std::optional<Op> parse_op(std::string_view name);

struct Config {
  std::size_t attributes = 1;
  std::size_t private_attributes = 1;
  std::size_t threshold = 2;
  std::size_t authorities = 3;
};

struct Result {
  Op op;
  std::size_t iters = 0;
  double mean_ms = 0;
  double stddev_ms = 0;  // sample standard deviation
};

/// Times `iters` runs of one operation on fixed inputs built up front.
/// Throws std::invalid_argument on iters == 0 or an inconsistent config.
Result run(Op op, std::size_t iters, const Config& config = {}, Rng& rng = system_rng());

std::string csv_header();
std::string csv_row(const Result& r);

}  // namespace tcred::bench
