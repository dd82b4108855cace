#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace stlsbb {

enum class Errc {
    nonpositive_curvature,
    invalid_parameter,
    missing_state,
    bracket_invalid,
    degenerate_input,
    dimension_mismatch,
    invalid_setting,
    dimension_too_small,
    zero_gradient,
    line_search_stall,
    all_failed_on_problem,
    parse_error,
};

std::string_view to_string(Errc code) noexcept;

/// Exception carrying a machine-checkable error code.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

} // namespace stlsbb
