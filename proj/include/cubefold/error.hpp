#pragma once

#include <stdexcept>
#include <string>

namespace cubefold {

// Error severity classes map onto the CLI exit-code contract:
// validation failures exit 1, lemma-violation aborts exit 2, resource caps exit 3.
enum class ErrorKind { validation, lemma_violation, resource };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string code, const std::string& message)
      : std::runtime_error(code + ": " + message), kind_(kind), code_(std::move(code)) {}

  ErrorKind kind() const { return kind_; }
  const std::string& code() const { return code_; }

 private:
  ErrorKind kind_;
  std::string code_;
};

inline int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::validation: return 1;
    case ErrorKind::lemma_violation: return 2;
    case ErrorKind::resource: return 3;
  }
  return 1;
}

[[noreturn]] inline void fail(ErrorKind kind, const std::string& code, const std::string& message) {
  throw Error(kind, code, message);
}

[[noreturn]] inline void fail_validation(const std::string& code, const std::string& message) {
  throw Error(ErrorKind::validation, code, message);
}

[[noreturn]] inline void fail_lemma(const std::string& code, const std::string& message) {
  throw Error(ErrorKind::lemma_violation, code, message);
}

}  // namespace cubefold
