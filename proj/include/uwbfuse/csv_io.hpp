#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "uwbfuse/corrections.hpp"
#include "uwbfuse/exchange_record.hpp"
#include "uwbfuse/experiment.hpp"
#include "uwbfuse/scene.hpp"

namespace uwbfuse {

/// Shortest text that reads back to the same double; used for every
/// floating-point CSV field.
std::string format_double(double value);

/// Header: round_idx, t1_r, t2_r, t3_r, p2_r, t1_t, t2_t, t3_t, p1_t, p3_t,
/// then t1_s<i>, t2_s<i>, t3_s<i>, p1_s<i>, p2_s<i> per anchor, then
/// true_x, true_y when the records carry truth. A missing t3_s is written
/// as an empty field. All records must list the same anchors.
void write_records_csv(std::ostream& out, const std::vector<ExchangeRecord>& records);

/// The initiating station is the one non-tag scene station absent from the
/// anchor columns. Throws DataError on malformed input.
std::vector<ExchangeRecord> read_records_csv(std::istream& in, const Scene& scene);

/// Header: round_idx, t_toa, t_tdoa_s<i>..., and with diagnostics
/// c13_rt, c13_s<i>..., e1, e2, e3_s<i>, e4_s<i>..., k. Failed anchors have
/// an empty t_tdoa field.
void write_corrected_csv(std::ostream& out, const std::vector<CorrectedMeasurement>& rows,
                         bool diagnostics);

std::vector<CorrectedMeasurement> read_corrected_csv(std::istream& in, const Scene& scene);

/// Header: round_idx, mode, x, y, residual_norm, iterations, converged,
/// cov_xx, cov_xy, cov_yy.
void write_estimates_csv(std::ostream& out, const std::vector<RoundEstimate>& rows);

std::vector<RoundEstimate> read_estimates_csv(std::istream& in);

}  // namespace uwbfuse
