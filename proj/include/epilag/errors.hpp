#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace epilag {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// ingest
class MalformedCsv : public Error {
 public:
  explicit MalformedCsv(const std::string& msg) : Error("malformed CSV: " + msg) {}
};

class EmptyInput : public Error {
 public:
  explicit EmptyInput(const std::string& msg) : Error("empty input: " + msg) {}
};

class DistrictNotFound : public Error {
 public:
  explicit DistrictNotFound(const std::string& district)
      : Error("district not found in case data: " + district) {}
};

class EmptyAfterClean : public Error {
 public:
  explicit EmptyAfterClean(const std::string& district)
      : Error("no records survive cleaning for district: " + district) {}
};

// fetch
class NetworkError : public Error {
 public:
  explicit NetworkError(const std::string& msg) : Error("network error: " + msg) {}
};

class HttpStatusError : public Error {
 public:
  HttpStatusError(int status, const std::string& url)
      : Error("HTTP " + std::to_string(status) + " for " + url), status_(status) {}
  int status() const { return status_; }

 private:
  int status_;
};

// correlation
class ConstantInput : public Error {
 public:
  explicit ConstantInput(const std::string& msg) : Error("constant input: " + msg) {}
};

class LengthMismatch : public Error {
 public:
  LengthMismatch(std::size_t a, std::size_t b)
      : Error("length mismatch: " + std::to_string(a) + " vs " + std::to_string(b)) {}
};

class InsufficientOverlap : public Error {
 public:
  InsufficientOverlap(std::size_t got, std::size_t need)
      : Error("insufficient overlap: " + std::to_string(got) + " pairs, need " +
              std::to_string(need)) {}
};

class NoValidLag : public Error {
 public:
  explicit NoValidLag(const std::string& msg) : Error("no valid lag: " + msg) {}
};

// regressors
class DimensionMismatch : public Error {
 public:
  DimensionMismatch(std::size_t got, std::size_t expected)
      : Error("feature count mismatch: got " + std::to_string(got) + ", model expects " +
              std::to_string(expected)) {}
};

class NonFiniteLoss : public Error {
 public:
  explicit NonFiniteLoss(const std::string& msg) : Error("non-finite loss: " + msg) {}
};

// evaluation
class TooFewSamples : public Error {
 public:
  TooFewSamples(std::size_t got, std::size_t need)
      : Error("too few samples: " + std::to_string(got) + ", need " + std::to_string(need)) {}
};

class ConstantTarget : public Error {
 public:
  explicit ConstantTarget(const std::string& msg) : Error("constant target: " + msg) {}
};

// configuration / CLI
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& msg) : Error("config error: " + msg) {}
};

}  // namespace epilag
