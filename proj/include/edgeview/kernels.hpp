#pragma once

#include <optional>
#include <span>

#include "edgeview/linalg.hpp"

// Dense N x N accumulation of per-view row-space projectors.
//
// aggregate_serial is the reference: it forms each Y^T (Y Y^T + ridge I)^{-1} Y
// directly with an LDLT solve. aggregate_parallel accumulates F F^T from the
// low-rank projector factors over OpenMP column tiles. Both return the same
// matrix up to rounding; tests hold them against each other.
namespace edgeview::kernels {

// ridge == nullopt selects numerics::default_ridge per view.
Matrix aggregate_serial(std::span<const Matrix> views, std::optional<double> ridge);
Matrix aggregate_parallel(std::span<const Matrix> views, std::optional<double> ridge,
                          int threads = 0);

// Number of OpenMP threads honoured by the parallel kernels (EDGEVIEW_WORKERS, else the
// OpenMP default).
int default_workers();

}  // namespace edgeview::kernels
