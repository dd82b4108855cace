#pragma once

#include "stlsbb/stepcore.hpp"

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace stlsbb {

enum class Termination {
    gradient_tolerance,
    distance_tolerance,
    iteration_cap,
};

std::string_view to_string(Termination t) noexcept;
Termination termination_from_string(std::string_view name);

/// One iteration. `alpha` is the step actually taken from x_k and
/// `safeguarded_alpha` the trial value before backtracking. The final row
/// describes the iterate the run stopped at and carries no step (alpha,
/// backtracks and fevals are zero).
struct TraceRow {
    std::size_t k = 0;
    double f = 0.0;
    double grad_norm = 0.0;
    double alpha = 0.0;
    double safeguarded_alpha = 0.0;
    std::size_t backtracks = 0;
    std::size_t fevals = 0;
};

struct RunTrace {
    std::vector<TraceRow> rows;
    Termination termination = Termination::iteration_cap;
    Vector final_x;
    double alpha0 = 0.0;
    std::string alpha0_rule;
    std::string stop_rule;
    std::string policy;

    /// Index of the iterate the run stopped at.
    std::size_t iterations() const { return rows.empty() ? 0 : rows.back().k; }
    bool converged() const { return termination != Termination::iteration_cap; }
};

/// Versioned CSV: comment header, column names, one row per iteration,
/// trailing `# termination=` line. Reals use 17 significant digits so a
/// trace read back with read_trace_csv() is bit-identical.
void write_trace_csv(std::ostream& os, const RunTrace& trace);
void write_trace_json(std::ostream& os, const RunTrace& trace);
RunTrace read_trace_csv(std::istream& is);

/// printf("%.17g") as a std::string.
std::string format_g17(double value);

} // namespace stlsbb
