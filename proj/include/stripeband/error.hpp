#pragma once

#include <stdexcept>
#include <string>

namespace stripeband {

enum class error_kind { validation, numerical, io };

class error : public std::runtime_error {
public:
  error(error_kind k, const std::string& what) : std::runtime_error(what), kind_(k) {}
  error_kind kind() const { return kind_; }

private:
  error_kind kind_;
};

inline int exit_code(error_kind k) {
  switch (k) {
    case error_kind::validation: return 2;
    case error_kind::numerical: return 3;
    case error_kind::io: return 4;
  }
  return 1;
}

inline const char* kind_name(error_kind k) {
  switch (k) {
    case error_kind::validation: return "validation";
    case error_kind::numerical: return "numerical";
    case error_kind::io: return "io";
  }
  return "unknown";
}

}  // namespace stripeband
