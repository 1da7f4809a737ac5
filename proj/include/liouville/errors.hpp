#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace liouville {

/// Base class for all library errors.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Geometric precondition violated (point outside domain, ball not contained, ...).
struct domain_error : error {
    using error::error;
};

/// Invalid configuration (grid too small, mismatched grids, bad options).
struct config_error : error {
    using error::error;
};

/// Kernel or Green function evaluated at a non-admissible point (x == y).
struct singularity_error : error {
    using error::error;
};

/// Degenerate geometric input (coincident points for a mediatrix, ...).
struct degenerate_input_error : error {
    using error::error;
};

/// Newton iteration failed to reach the requested tolerance.
struct nonconvergence_error : error {
    nonconvergence_error(const std::string& msg, double residual, int iters)
        : error(msg), last_residual(residual), iterations(iters) {}
    double last_residual;
    int iterations;
};

/// Linearized operator numerically singular (turning point hit head-on).
struct fold_error : error {
    using error::error;
};

/// Continuation step length collapsed below the configured minimum.
struct stall_error : error {
    using error::error;
};

/// Blow-up extraction did not terminate within max_points.
struct runaway_error : error {
    using error::error;
};

/// Derivative stencil could not be built at some nodes.
struct stencil_error : error {
    stencil_error(const std::string& msg, std::vector<int> nodes)
        : error(msg), flagged_nodes(std::move(nodes)) {}
    std::vector<int> flagged_nodes;
};

/// Radial problem has no solution for the requested parameter.
struct no_solution_error : error {
    using error::error;
};

}  // namespace liouville
