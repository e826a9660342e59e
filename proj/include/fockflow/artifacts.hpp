#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "fockflow/dynamics.hpp"
#include "fockflow/flow.hpp"
#include "fockflow/spectra.hpp"

namespace fockflow {

/// Shortest-exact decimal form used in every artifact (%.17g).
std::string csv_number(double v);

/// Emits each line of `header` prefixed with "# ", so the run that produced
/// a file can be reproduced from the file alone.
void write_comment_block(std::ostream& out, std::string_view header);

/// Columns: s, E_0..E_{m-1}, gap_l (gap between levels l and l+1).
void write_spectrum_csv(std::ostream& out, std::string_view header, const std::vector<SpectrumSlice>& slices,
                        std::size_t l);
void write_gap_csv(std::ostream& out, std::string_view header, const GapReport& report);
/// Columns: s, E_0..E_{M-1}, norm_drift, min_gap.
void write_flow_csv(std::ostream& out, std::string_view header, const FlowTrajectory& trajectory);
/// Columns: T, probability, norm_drift, slices.
void write_sweep_csv(std::ostream& out, std::string_view header, const std::vector<SweepPoint>& points);

}  // namespace fockflow
