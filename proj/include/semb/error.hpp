#ifndef SEMB_ERROR_HPP
#define SEMB_ERROR_HPP

#include <stdexcept>
#include <string>

namespace semb {

enum class ErrorCode {
    validation = 2,  // combinatorial/geometric validation failure
    schema = 3,      // malformed interchange document
    io = 4,          // file system problems
    invalid_argument = 5,
};

class SembError : public std::runtime_error {
  public:
    SembError(ErrorCode code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
    ErrorCode code() const { return code_; }

  private:
    ErrorCode code_;
};

}  // namespace semb

#endif
