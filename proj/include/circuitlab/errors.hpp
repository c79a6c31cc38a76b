#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace circuitlab {

struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed object: bad wire reference, length mismatch, index out of range.
struct structural_error : error {
    using error::error;
};

// Inconsistent or unsupported parameter combination.
struct parameter_error : error {
    using error::error;
};

// A configured enumeration or sampling budget was exceeded. Distinct from a
// negative search result.
struct budget_error : error {
    using error::error;
};

// A search ran to completion without finding the requested object.
struct not_found_error : error {
    using error::error;
};

// A witnessing-protocol rule was broken (e.g. candidate already queried).
struct protocol_violation : error {
    using error::error;
};

// k-uniform sparsification failed verification after all retries.
struct sparsification_error : error {
    sparsification_error(const std::string& msg, std::size_t worst)
        : error(msg), worst_opponent(worst) {}
    std::size_t worst_opponent;
};

// The antichecker game is degenerate: some row computes the target exactly.
struct degenerate_game_error : error {
    using error::error;
};

// A pipeline-level verification failed (measured gap below threshold).
struct pipeline_error : error {
    pipeline_error(const std::string& msg, double measured)
        : error(msg), measured_value(measured) {}
    double measured_value;
};

}  // namespace circuitlab
