#ifndef CARTAN_ERROR_HPP
#define CARTAN_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace cartan {

/// Library error with a stable machine-readable kind tag ("ShapeMismatch",
/// "NotAUnit", ...) in addition to the human-readable message.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& msg)
        : std::runtime_error(kind + ": " + msg), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

[[noreturn]] inline void raise(std::string_view kind, const std::string& msg) {
    throw Error(std::string(kind), msg);
}

inline void require(bool cond, std::string_view kind, const std::string& msg) {
    if (!cond) raise(kind, msg);
}

} // namespace cartan

#endif
