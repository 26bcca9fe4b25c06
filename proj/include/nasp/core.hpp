#pragma once

#include <Eigen/Dense>

#include <chrono>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace nasp {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Numerical tolerances shared by every module.
struct Tolerances {
  static constexpr double feas = 1e-7;    ///< constraint residual
  static constexpr double opt = 1e-7;     ///< objective optimality gap
  static constexpr double pivot = 1e-9;   ///< smallest admissible pivot
  static constexpr double comp = 1e-7;    ///< complementarity product
  static constexpr double weight = 1e-8;  ///< smallest support weight kept
  static constexpr double deviation = 1e-6;
};

enum class ErrorCode {
  DimensionMismatch,
  NumericalFailure,
  EncodingLengthMismatch,
  TooManyComplementarities,
  EmptyPieceList,
  NonPsdObjective,
  DegenerateWeight,
  InvalidInstance,
  InvalidConfig,
  ProfileMismatch,
  TimeLimit,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

/// Wall-clock budget. A default-constructed deadline never expires.
class Deadline {
 public:
  using Clock = std::chrono::steady_clock;

  Deadline() = default;
  explicit Deadline(double seconds)
      : end_(Clock::now() + std::chrono::duration_cast<Clock::duration>(
                                std::chrono::duration<double>(seconds))) {}

  bool expired() const { return end_ && Clock::now() >= *end_; }
  void check() const {
    if (expired()) fail(ErrorCode::TimeLimit, "time budget exhausted");
  }

 private:
  std::optional<Clock::time_point> end_;
};

/// Appends `rows` below `top`; column counts must agree (empty blocks pass).
Matrix vstack(const Matrix& top, const Matrix& rows);
Vector vconcat(const Vector& top, const Vector& tail);

}  // namespace nasp
