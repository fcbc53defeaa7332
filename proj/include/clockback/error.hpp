#pragma once

#include <stdexcept>
#include <string>

namespace clockback {

// Error categories shared by the C++ core and the C API (see clockback.h).
enum class ErrorCode : int {
  kOk = 0,
  kInvalidArgument = 1,
  kDomain = 2,
  kNoConvergence = 3,
  kGridTooNarrow = 4,
  kBoundaryLeak = 5,
  kScatteringIncomplete = 6,
  kZeroProbability = 7,
  kIo = 8,
  kInternal = 9,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Raised when adaptive quadrature exhausts its subdivision budget. Carries
/// the best estimate so callers can still inspect it.
class QuadratureError : public Error {
 public:
  QuadratureError(const std::string& what, double best_re, double best_im,
                  double error_estimate)
      : Error(ErrorCode::kNoConvergence, what),
        best_re_(best_re),
        best_im_(best_im),
        error_estimate_(error_estimate) {}

  double best_re() const noexcept { return best_re_; }
  double best_im() const noexcept { return best_im_; }
  double error_estimate() const noexcept { return error_estimate_; }

 private:
  double best_re_;
  double best_im_;
  double error_estimate_;
};

/// Raised by the propagator when the wavepacket reaches the periodic boundary.
class BoundaryLeakError : public Error {
 public:
  BoundaryLeakError(const std::string& what, double leak)
      : Error(ErrorCode::kBoundaryLeak, what), leak_(leak) {}

  double leak() const noexcept { return leak_; }

 private:
  double leak_;
};

inline void require(bool cond, const std::string& what,
                    ErrorCode code = ErrorCode::kInvalidArgument) {
  if (!cond) throw Error(code, what);
}

}  // namespace clockback
