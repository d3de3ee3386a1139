#ifndef WALKCAST_ERRORS_HPP
#define WALKCAST_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace walkcast {

// Error taxonomy mapped to process exit codes by the CLI:
//   ConfigError / ValidationError -> 2, DivergenceError -> 3, IoError -> 4.
class Error : public std::runtime_error {
 public:
  enum class Kind { config, validation, divergence, io };

  Error(Kind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& message)
      : Error(Kind::config, message) {}
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& message)
      : Error(Kind::validation, message) {}
};

// Non-finite values encountered during numeric iteration.
class DivergenceError : public Error {
 public:
  explicit DivergenceError(const std::string& message, long epoch = -1,
                           long batch = -1)
      : Error(Kind::divergence, message), epoch_(epoch), batch_(batch) {}

  long epoch() const { return epoch_; }
  long batch() const { return batch_; }

 private:
  long epoch_;
  long batch_;
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& message) : Error(Kind::io, message) {}
};

}  // namespace walkcast

#endif  // WALKCAST_ERRORS_HPP
